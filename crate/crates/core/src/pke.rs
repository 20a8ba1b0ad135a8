//! The LWR public-key encryption scheme underlying the KEM, with the scheme-specific message
//! encodings.

use crate::error::{Error, Result};
use crate::keccak::shake128;
use crate::pack::get_bit;
use crate::params::{Scheme, SchemeParams, MSG_BYTES, SEED_BYTES};
use crate::poly::{Poly, PolyVec};
use crate::sampler::{cbd_vec, gen_matrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey {
    pub seed_a: [u8; SEED_BYTES],
    /// Rounded `A^T s` modulo `p`.
    pub b: PolyVec,
}

impl PublicKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.seed_a.to_vec();
        out.extend(self.b.pack(self.b.width()).expect("coefficients fit"));
        out
    }

    pub fn from_bytes(bytes: &[u8], params: &SchemeParams) -> Result<Self> {
        if bytes.len() != params.public_key_bytes() {
            return Err(Error::Length { expected: params.public_key_bytes(), got: bytes.len() });
        }
        let mut seed_a = [0u8; SEED_BYTES];
        seed_a.copy_from_slice(&bytes[..SEED_BYTES]);
        let b = PolyVec::unpack(&bytes[SEED_BYTES..], params.eps_p, params.l, params.n)?;
        Ok(PublicKey { seed_a, b })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ciphertext {
    /// `eps_p`-bit coefficients.
    pub u: PolyVec,
    /// `eps_t + B`-bit coefficients.
    pub v: Poly,
}

impl Ciphertext {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.u.pack(self.u.width()).expect("coefficients fit");
        out.extend(self.v.pack(self.v.width()).expect("coefficients fit"));
        out
    }

    pub fn from_bytes(bytes: &[u8], params: &SchemeParams) -> Result<Self> {
        if bytes.len() != params.ciphertext_bytes() {
            return Err(Error::Length { expected: params.ciphertext_bytes(), got: bytes.len() });
        }
        let split = params.packed_u_bytes();
        let u = PolyVec::unpack(&bytes[..split], params.eps_p, params.l, params.n)?;
        let v = Poly::unpack(&bytes[split..], params.v_bits(), params.n)?;
        Ok(Ciphertext { u, v })
    }
}

/// Encodes a 256-bit message as a polynomial with `B`-bit coefficients.
///
/// Florete repeats every bit at positions `b`, `b + 256` and `b + 512`. Espada packs bits
/// `4b..4b+3` into coefficient `b`, lowest bit first. Sable maps bit `b` to coefficient `b`.
pub fn arrange_msg(m: &[u8; MSG_BYTES], params: &SchemeParams) -> Poly {
    let bit = |i: usize| get_bit(m, i) as u16;
    let coeffs = match params.scheme {
        Scheme::Florete => (0..params.n).map(|i| bit(i % 256)).collect(),
        Scheme::Espada => (0..params.n)
            .map(|c| (0..4).fold(0u16, |acc, j| acc | bit(4 * c + j) << j))
            .collect(),
        Scheme::Sable => (0..params.n).map(bit).collect(),
    };
    Poly::from_coeffs(coeffs, params.b)
}

/// Inverse of [`arrange_msg`]; Florete decodes each bit by majority over its three copies.
pub fn original_msg(mpoly: &Poly, params: &SchemeParams) -> [u8; MSG_BYTES] {
    let c = mpoly.coeffs();
    let mut out = [0u8; MSG_BYTES];
    let mut set = |i: usize, v: bool| out[i / 8] |= (v as u8) << (i % 8);
    match params.scheme {
        Scheme::Florete => {
            for b in 0..256 {
                set(b, c[b] + c[b + 256] + c[b + 512] > 1);
            }
        }
        Scheme::Espada => {
            for (b, &coef) in c.iter().enumerate() {
                for j in 0..4 {
                    set(4 * b + j, coef >> j & 1 == 1);
                }
            }
        }
        Scheme::Sable => {
            for (b, &coef) in c.iter().enumerate() {
                set(b, coef & 1 == 1);
            }
        }
    }
    out
}

/// Secret vector drawn from the binomial distribution seeded by `seed`, modulo `2^width`.
pub fn sample_secret(seed: &[u8; SEED_BYTES], params: &SchemeParams, width: u32) -> PolyVec {
    let stream = shake128(seed, params.cbd_stream_bytes());
    cbd_vec(&stream, params, width).expect("stream sized for the secret")
}

/// Returns the public key and the secret `s` modulo `q`.
pub fn pke_keygen(
    seed_a: &[u8; SEED_BYTES],
    seed_s: &[u8; SEED_BYTES],
    params: &SchemeParams,
) -> (PublicKey, PolyVec) {
    let a = gen_matrix(seed_a, params);
    let s = sample_secret(seed_s, params, params.eps_q);
    let b = a
        .mul_vec_transposed(&s, params)
        .expect("shapes match")
        .map(|p| p.add_const(params.h()).shift_right(params.eps_q - params.eps_p));
    (PublicKey { seed_a: *seed_a, b }, s)
}

/// Encrypts the encoded message `m` with coins `r`.
pub fn pke_enc(pk: &PublicKey, m: &Poly, r: &[u8; SEED_BYTES], params: &SchemeParams) -> Result<Ciphertext> {
    if m.width() != params.b || m.len() != params.n {
        return Err(Error::Malformed("message polynomial shape".into()));
    }
    let a = gen_matrix(&pk.seed_a, params);
    let sp = sample_secret(r, params, params.eps_q);
    let u = a
        .mul_vec(&sp, params)?
        .map(|p| p.add_const(params.h()).shift_right(params.eps_q - params.eps_p));
    let sp_p = sp.map(|p| p.with_width(params.eps_p));
    let v = pk
        .b
        .inner(&sp_p, params)?
        .add_const(params.h1())
        .sub(&m.with_width(params.eps_p).shift_left(params.eps_p - params.b))?
        .shift_right(params.eps_p - params.eps_t - params.b);
    Ok(Ciphertext { u, v })
}

/// `u^T s + h2 - 2^(eps_p - eps_t - B) v` modulo `p`, the value whose top `B` bits carry
/// the message.
pub fn pke_dec_pre_shift(s: &PolyVec, ct: &Ciphertext, params: &SchemeParams) -> Result<Poly> {
    let s_p = s.map(|p| p.with_width(params.eps_p));
    let scaled_v = ct.v.with_width(params.eps_p).shift_left(params.eps_p - params.v_bits());
    ct.u.inner(&s_p, params)?.add_const(params.h2()).sub(&scaled_v)
}

/// Decrypts to the `B`-bit message polynomial.
pub fn pke_dec(s: &PolyVec, ct: &Ciphertext, params: &SchemeParams) -> Result<Poly> {
    Ok(pke_dec_pre_shift(s, ct, params)?.shift_right(params.eps_p - params.b))
}
