//! Parameter sets of the three schemes and the byte sizes derived from them.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Florete,
    Espada,
    Sable,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Florete, Scheme::Espada, Scheme::Sable];

    pub fn params(self) -> &'static SchemeParams {
        match self {
            Scheme::Florete => &FLORETE,
            Scheme::Espada => &ESPADA,
            Scheme::Sable => &SABLE,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Florete => "florete",
            Scheme::Espada => "espada",
            Scheme::Sable => "sable",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "florete" => Ok(Scheme::Florete),
            "espada" => Ok(Scheme::Espada),
            "sable" => Ok(Scheme::Sable),
            _ => Err(Error::UnknownScheme(s.to_string())),
        }
    }
}

/// The quotient polynomial defining the ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reduction {
    /// `x^n + 1`
    Negacyclic,
    /// `x^n - x^(n/2) + 1`
    Trinomial,
}

/// One parameter set. Moduli are stored as their base-2 logarithms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeParams {
    pub scheme: Scheme,
    /// Ring degree.
    pub n: usize,
    /// Module rank.
    pub l: usize,
    pub eps_q: u32,
    pub eps_p: u32,
    pub eps_t: u32,
    /// Message bits carried by each coefficient of `v`.
    pub b: u32,
    /// Binomial parameter; samples lie in `[-eta, eta]`.
    pub eta: u32,
    pub reduction: Reduction,
}

pub const FLORETE: SchemeParams = SchemeParams {
    scheme: Scheme::Florete,
    n: 768,
    l: 1,
    eps_q: 10,
    eps_p: 9,
    eps_t: 3,
    b: 1,
    eta: 1,
    reduction: Reduction::Trinomial,
};

pub const ESPADA: SchemeParams = SchemeParams {
    scheme: Scheme::Espada,
    n: 64,
    l: 12,
    eps_q: 15,
    eps_p: 13,
    eps_t: 3,
    b: 4,
    eta: 3,
    reduction: Reduction::Negacyclic,
};

pub const SABLE: SchemeParams = SchemeParams {
    scheme: Scheme::Sable,
    n: 256,
    l: 3,
    eps_q: 11,
    eps_p: 9,
    eps_t: 4,
    b: 1,
    eta: 1,
    reduction: Reduction::Negacyclic,
};

pub const SEED_BYTES: usize = 32;
pub const MSG_BYTES: usize = 32;
pub const KEY_BYTES: usize = 32;
pub const HASH_BYTES: usize = 32;

impl SchemeParams {
    /// Width `mu = 2*eta` of the binomial distribution.
    pub fn mu(&self) -> u32 {
        2 * self.eta
    }

    /// Bits per packed secret coefficient: two's complement wide enough for `[-eta, eta]`.
    pub fn secret_bits(&self) -> u32 {
        match self.eta {
            1 => 2,
            2 | 3 => 4,
            _ => 8,
        }
    }

    /// Total number of coefficients in a vector of `l` polynomials.
    pub fn vec_coeffs(&self) -> usize {
        self.n * self.l
    }

    /// Bits per coefficient of the `v` component of a ciphertext.
    pub fn v_bits(&self) -> u32 {
        self.eps_t + self.b
    }

    /// Rounding constant of the `q -> p` compression.
    pub fn h(&self) -> u16 {
        1 << (self.eps_q - self.eps_p - 1)
    }

    /// Rounding constant of the `p -> 2^B t` compression.
    pub fn h1(&self) -> u16 {
        1 << (self.eps_p - self.eps_t - self.b - 1)
    }

    /// Decryption offset centring the message window.
    pub fn h2(&self) -> u16 {
        (1u16 << (self.eps_p - self.b - 1)) - (1u16 << (self.eps_p - self.eps_t - self.b - 1))
    }

    pub fn packed_b_bytes(&self) -> usize {
        self.vec_coeffs() * self.eps_p as usize / 8
    }

    pub fn packed_u_bytes(&self) -> usize {
        self.packed_b_bytes()
    }

    pub fn packed_v_bytes(&self) -> usize {
        self.n * self.v_bits() as usize / 8
    }

    pub fn packed_s_bytes(&self) -> usize {
        self.vec_coeffs() * self.secret_bits() as usize / 8
    }

    pub fn public_key_bytes(&self) -> usize {
        SEED_BYTES + self.packed_b_bytes()
    }

    pub fn ciphertext_bytes(&self) -> usize {
        self.packed_u_bytes() + self.packed_v_bytes()
    }

    pub fn secret_key_bytes(&self) -> usize {
        self.packed_s_bytes() + KEY_BYTES + HASH_BYTES + self.public_key_bytes()
    }

    /// Bytes of SHAKE-128 output consumed to sample one secret vector.
    pub fn cbd_stream_bytes(&self) -> usize {
        self.vec_coeffs() * self.mu() as usize / 8
    }

    /// Bytes of SHAKE-128 output consumed to expand the public matrix.
    pub fn matrix_stream_bytes(&self) -> usize {
        self.l * self.l * self.n * self.eps_q as usize / 8
    }

    /// Input size of the masked A2B step of the ciphertext comparison:
    /// `u~` at `eps_q` bits plus `v~` at `eps_p` bits per coefficient.
    pub fn comparison_a2b_bytes(&self) -> usize {
        (self.vec_coeffs() * self.eps_q as usize + self.n * self.eps_p as usize) / 8
    }

    /// Input size of the final all-bits-one test: one ciphertext worth of bits.
    pub fn comparison_all_ones_bytes(&self) -> usize {
        (self.vec_coeffs() * self.eps_p as usize + self.n * self.v_bits() as usize) / 8
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        let f = Scheme::Florete.params();
        assert_eq!((f.n, f.l, f.eps_q, f.eps_p, f.eps_t, f.b, f.eta), (768, 1, 10, 9, 3, 1, 1));
        let e = Scheme::Espada.params();
        assert_eq!((e.n, e.l, e.eps_q, e.eps_p, e.eps_t, e.b, e.eta), (64, 12, 15, 13, 3, 4, 3));
        let s = Scheme::Sable.params();
        assert_eq!((s.n, s.l, s.eps_q, s.eps_p, s.eps_t, s.b, s.eta), (256, 3, 11, 9, 4, 1, 1));
        assert_eq!([f.mu(), e.mu(), s.mu()], [2, 6, 2]);
    }

    #[test]
    fn moduli_ordering_and_capacity() {
        for scheme in Scheme::ALL {
            let p = scheme.params();
            assert!(p.eps_t < p.eps_p && p.eps_p < p.eps_q);
            assert!(p.n * p.b as usize >= 256);
        }
        assert_eq!(FLORETE.n, 3 * 256 * FLORETE.b as usize);
        assert_eq!(ESPADA.n * ESPADA.b as usize, 256);
        assert_eq!(SABLE.n * SABLE.b as usize, 256);
    }

    #[test]
    fn byte_sizes() {
        let sizes: Vec<_> = Scheme::ALL
            .iter()
            .map(|s| {
                let p = s.params();
                (p.public_key_bytes(), p.secret_key_bytes(), p.ciphertext_bytes())
            })
            .collect();
        assert_eq!(sizes, vec![(896, 1152, 1248), (1280, 1728, 1304), (896, 1152, 1024)]);
    }

    #[test]
    fn comparison_input_sizes() {
        let a2b: Vec<_> = Scheme::ALL.iter().map(|s| s.params().comparison_a2b_bytes()).collect();
        let ones: Vec<_> =
            Scheme::ALL.iter().map(|s| s.params().comparison_all_ones_bytes()).collect();
        assert_eq!(a2b, vec![1824, 1544, 1344]);
        assert_eq!(ones, vec![1248, 1304, 1024]);
    }

    #[test]
    fn parse_names() {
        assert_eq!("Sable".parse::<Scheme>().unwrap(), Scheme::Sable);
        assert!("saber".parse::<Scheme>().is_err());
    }
}
