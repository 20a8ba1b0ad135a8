//! CCA-secure KEM obtained from the PKE by the Fujisaki-Okamoto transform with implicit
//! rejection. `G` is SHA3-512, `H` and the KDF are SHA3-256.

use crate::error::{Error, Result};
use crate::keccak::{sha3_256, sha3_512};
use crate::pack::{pack_bits, unpack_bits};
use crate::params::{SchemeParams, HASH_BYTES, KEY_BYTES, MSG_BYTES, SEED_BYTES};
use crate::pke::{arrange_msg, original_msg, pke_dec, pke_enc, pke_keygen, Ciphertext, PublicKey};
use crate::poly::PolyVec;
use crate::rng::{Label, RandomnessSource};

pub type SessionKey = [u8; KEY_BYTES];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretKey {
    /// Secret vector modulo `q`, coefficients in `[-eta, eta]`.
    pub s: PolyVec,
    /// Implicit-rejection key.
    pub z: [u8; KEY_BYTES],
    /// `H(pk)`.
    pub pkh: [u8; HASH_BYTES],
    pub pk: PublicKey,
}

impl SecretKey {
    pub fn to_bytes(&self, params: &SchemeParams) -> Vec<u8> {
        let bits = params.secret_bits();
        let m = (1u16 << bits) - 1;
        let s: Vec<u16> = self.s.flat_coeffs().iter().map(|c| c & m).collect();
        let mut out = pack_bits(&s, bits).expect("masked to width");
        out.extend_from_slice(&self.z);
        out.extend_from_slice(&self.pkh);
        out.extend(self.pk.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8], params: &SchemeParams) -> Result<Self> {
        if bytes.len() != params.secret_key_bytes() {
            return Err(Error::Length { expected: params.secret_key_bytes(), got: bytes.len() });
        }
        let bits = params.secret_bits();
        let s_len = params.packed_s_bytes();
        let raw = unpack_bits(&bytes[..s_len], bits, params.vec_coeffs())?;
        let signed: Vec<u16> = raw
            .iter()
            .map(|&c| {
                let v = ((c as i32) << (32 - bits)) >> (32 - bits);
                if v.unsigned_abs() > params.eta {
                    Err(Error::Malformed(format!("secret coefficient {v} out of range")))
                } else {
                    Ok((v as u32 & ((1 << params.eps_q) - 1)) as u16)
                }
            })
            .collect::<Result<_>>()?;
        let s = PolyVec::from_flat(&signed, params.n, params.eps_q);
        let mut z = [0u8; KEY_BYTES];
        z.copy_from_slice(&bytes[s_len..s_len + KEY_BYTES]);
        let mut pkh = [0u8; HASH_BYTES];
        pkh.copy_from_slice(&bytes[s_len + KEY_BYTES..s_len + KEY_BYTES + HASH_BYTES]);
        let pk = PublicKey::from_bytes(&bytes[s_len + KEY_BYTES + HASH_BYTES..], params)?;
        Ok(SecretKey { s, z, pkh, pk })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KemKeyPair {
    pub pk: PublicKey,
    pub sk: SecretKey,
}

/// Key pair from explicit seeds.
pub fn kem_keygen_from_seeds(
    seed_a: &[u8; SEED_BYTES],
    seed_s: &[u8; SEED_BYTES],
    z: &[u8; KEY_BYTES],
    params: &SchemeParams,
) -> KemKeyPair {
    let (pk, s) = pke_keygen(seed_a, seed_s, params);
    let pkh = sha3_256(&pk.to_bytes());
    KemKeyPair { sk: SecretKey { s, z: *z, pkh, pk: pk.clone() }, pk }
}

pub fn kem_keygen(params: &SchemeParams, rng: &mut RandomnessSource) -> Result<KemKeyPair> {
    let bytes = rng.random_bytes(2 * SEED_BYTES + KEY_BYTES, Label::Unlabeled)?;
    let take = |i: usize| -> [u8; 32] { bytes[32 * i..32 * (i + 1)].try_into().unwrap() };
    Ok(kem_keygen_from_seeds(&take(0), &take(1), &take(2), params))
}

/// `KDF(prefix || H(c))`.
pub fn derive_key(prefix: &[u8; 32], ct_bytes: &[u8]) -> SessionKey {
    let mut buf = prefix.to_vec();
    buf.extend_from_slice(&sha3_256(ct_bytes));
    sha3_256(&buf)
}

/// `(K^, r) = G(pkh || m)`.
pub fn hash_g(pkh: &[u8; HASH_BYTES], m: &[u8; MSG_BYTES]) -> ([u8; 32], [u8; 32]) {
    let mut buf = pkh.to_vec();
    buf.extend_from_slice(m);
    let d = sha3_512(&buf);
    (d[..32].try_into().unwrap(), d[32..].try_into().unwrap())
}

/// Encapsulation with the raw message seed supplied by the caller.
pub fn kem_encaps_from_seed(
    pk: &PublicKey,
    seed: &[u8; MSG_BYTES],
    params: &SchemeParams,
) -> Result<(Ciphertext, SessionKey)> {
    let m = sha3_256(seed);
    let (khat, r) = hash_g(&sha3_256(&pk.to_bytes()), &m);
    let ct = pke_enc(pk, &arrange_msg(&m, params), &r, params)?;
    let key = derive_key(&khat, &ct.to_bytes());
    Ok((ct, key))
}

pub fn kem_encaps(
    pk: &PublicKey,
    params: &SchemeParams,
    rng: &mut RandomnessSource,
) -> Result<(Ciphertext, SessionKey)> {
    let seed: [u8; 32] = rng.random_bytes(MSG_BYTES, Label::Unlabeled)?.try_into().unwrap();
    kem_encaps_from_seed(pk, &seed, params)
}

/// Byte equality without early exit.
pub fn ct_eq(a: &[u8], b: &[u8]) -> bool {
    a.len() == b.len() && a.iter().zip(b).fold(0u8, |acc, (x, y)| acc | (x ^ y)) == 0
}

/// Unmasked decapsulation.
pub fn kem_decaps(sk: &SecretKey, ct_bytes: &[u8], params: &SchemeParams) -> Result<SessionKey> {
    let ct = Ciphertext::from_bytes(ct_bytes, params)?;
    let m = original_msg(&pke_dec(&sk.s, &ct, params)?, params);
    let (khat, r) = hash_g(&sk.pkh, &m);
    let again = pke_enc(&sk.pk, &arrange_msg(&m, params), &r, params)?;
    let prefix = if ct_eq(&again.to_bytes(), ct_bytes) { khat } else { sk.z };
    Ok(derive_key(&prefix, ct_bytes))
}
