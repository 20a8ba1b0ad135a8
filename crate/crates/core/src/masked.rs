//! Masked decapsulation at arbitrary order.
//!
//! The long-term secret, the decrypted message, the hash outputs, the re-encryption coins and
//! the re-encrypted ciphertext stay shared throughout. The only values recombined are the
//! comparison bit and, when it accepts, the pre-key `K^'`.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::gadgets::{a2b_bitsliced, all_bits_one, all_bits_one_input_bits, b2a, lanes_to_planes, sec_add_planes};
use crate::kem::{derive_key, SecretKey, SessionKey};
use crate::keccak::{masked_sha3_512, masked_shake128};
use crate::params::{Scheme, SchemeParams, HASH_BYTES, KEY_BYTES, MSG_BYTES};
use crate::pke::{Ciphertext, PublicKey};
use crate::poly::{Poly, PolyVec};
use crate::rng::{Label, RandomnessSource};
use crate::sampler::{gen_matrix, masked_cbd};
use crate::shares::{ArithShares, BooleanShares, MaskedBytes};

/// A secret key whose vector `s` is arithmetically shared modulo `p`.
#[derive(Clone, Debug)]
pub struct MaskedSecretKey {
    /// One polynomial vector per share.
    s_shares: Vec<PolyVec>,
    pub z: [u8; KEY_BYTES],
    pub pkh: [u8; HASH_BYTES],
    pub pk: PublicKey,
}

impl MaskedSecretKey {
    /// Splits `sk.s mod p` into `order + 1` arithmetic shares per coefficient.
    pub fn import(sk: &SecretKey, params: &SchemeParams, order: usize, rng: &mut RandomnessSource) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidOrder(0));
        }
        let flat = sk.s.flat_coeffs();
        let shared = rng.scoped(Label::KeyImport, |rng| {
            flat.iter()
                .map(|&c| ArithShares::share(c as u64, params.eps_p, order, rng))
                .collect::<Result<Vec<_>>>()
        })?;
        rng.check()?;
        Ok(MaskedSecretKey {
            s_shares: transpose_arith(&shared, params.n),
            z: sk.z,
            pkh: sk.pkh,
            pk: sk.pk.clone(),
        })
    }

    pub fn order(&self) -> usize {
        self.s_shares.len() - 1
    }

    pub fn n_shares(&self) -> usize {
        self.s_shares.len()
    }

    /// Shares of the `i`-th coefficient of `s` (polynomial-major).
    pub fn coefficient_shares(&self, i: usize) -> ArithShares {
        let width = self.s_shares[0].width();
        let n = self.s_shares[0].elems()[0].len();
        ArithShares::from_shares(
            self.s_shares.iter().map(|v| v.elems()[i / n].coeffs()[i % n] as u64).collect(),
            width,
        )
    }
}

/// Per-coefficient sharings to one polynomial vector per share.
fn transpose_arith(coeffs: &[ArithShares], n: usize) -> Vec<PolyVec> {
    let width = coeffs[0].width();
    (0..coeffs[0].n_shares())
        .map(|i| {
            let flat: Vec<u16> = coeffs.iter().map(|a| a.shares()[i] as u16).collect();
            PolyVec::from_flat(&flat, n, width)
        })
        .collect()
}

/// One polynomial (or vector) per share back to per-coefficient sharings.
fn to_coeff_shares(per_share: &[Vec<u16>], width: u32) -> Vec<ArithShares> {
    (0..per_share[0].len())
        .map(|c| ArithShares::from_shares(per_share.iter().map(|s| s[c] as u64).collect(), width))
        .collect()
}

/// Wall-clock time spent in each stage of a masked decapsulation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StageTimes {
    times: [Duration; Label::ALL.len()],
}

impl StageTimes {
    pub fn get(&self, label: Label) -> Duration {
        self.times[label.index()]
    }

    pub fn total(&self) -> Duration {
        self.times.iter().sum()
    }

    pub fn add(&mut self, label: Label, d: Duration) {
        self.times[label.index()] += d;
    }
}

fn stage<T>(
    label: Label,
    rng: &mut RandomnessSource,
    times: &mut Option<&mut StageTimes>,
    f: impl FnOnce(&mut RandomnessSource) -> T,
) -> T {
    let start = Instant::now();
    let out = rng.scoped(label, f);
    if let Some(t) = times.as_deref_mut() {
        t.add(label, start.elapsed());
    }
    out
}

/// Share-wise `u^T s_i`, with `h2 - 2^(eps_p - eps_t - B) v` folded into share 0.
pub fn masked_dec_arith(msk: &MaskedSecretKey, ct: &Ciphertext, params: &SchemeParams) -> Result<Vec<ArithShares>> {
    let scaled_v = ct.v.with_width(params.eps_p).shift_left(params.eps_p - params.v_bits());
    let mut per_share = Vec::with_capacity(msk.n_shares());
    for (i, s) in msk.s_shares.iter().enumerate() {
        let mut w = ct.u.inner(s, params)?;
        if i == 0 {
            w = w.add_const(params.h2()).sub(&scaled_v)?;
        }
        per_share.push(w.coeffs().to_vec());
    }
    Ok(to_coeff_shares(&per_share, params.eps_p))
}

/// A2B followed by dropping the low `eps_p - B` bits; returns one `B`-bit lane per coefficient.
pub fn masked_compress(w: &[ArithShares], params: &SchemeParams, rng: &mut RandomnessSource) -> Vec<BooleanShares> {
    a2b_bitsliced(w, rng).iter().map(|c| c.shift_right(params.eps_p - params.b)).collect()
}

/// Places one-bit lanes at consecutive message bit positions, share by share.
fn bits_to_bytes(bits: &[BooleanShares]) -> MaskedBytes {
    let n = bits[0].n_shares();
    let mut out = vec![vec![0u8; bits.len().div_ceil(8)]; n];
    for (pos, b) in bits.iter().enumerate() {
        for (o, s) in out.iter_mut().zip(b.shares()) {
            o[pos / 8] |= ((s & 1) as u8) << (pos % 8);
        }
    }
    MaskedBytes::from_shares(out)
}

/// Masked decoding of the message polynomial into 256 shared message bits.
///
/// Florete takes the majority of the three copies of each bit: the copies are added as 2-bit
/// values with two secure additions and bit 1 of the sum is kept. The additions are bitsliced
/// over 64 message bits at a time. Espada and Sable decode share-wise.
pub fn masked_original_msg(lanes: &[BooleanShares], params: &SchemeParams, rng: &mut RandomnessSource) -> MaskedBytes {
    match params.scheme {
        Scheme::Florete => {
            let n = lanes[0].n_shares();
            let mut out = vec![vec![0u8; MSG_BYTES]; n];
            for start in (0..256).step_by(64) {
                let plane = |off: usize| {
                    let p = lanes_to_planes(&lanes[off + start..off + start + 64], 1).pop().unwrap();
                    vec![p, BooleanShares::public(0, 64, n)]
                };
                let w = sec_add_planes(&plane(0), &plane(256), rng);
                let w = sec_add_planes(&w, &plane(512), rng);
                for (o, s) in out.iter_mut().zip(w[1].shares()) {
                    o[start / 8..start / 8 + 8].copy_from_slice(&s.to_le_bytes());
                }
            }
            MaskedBytes::from_shares(out)
        }
        Scheme::Espada => {
            let bits: Vec<BooleanShares> =
                lanes.iter().flat_map(|l| (0..4).map(move |j| l.bit(j))).collect();
            bits_to_bytes(&bits)
        }
        Scheme::Sable => bits_to_bytes(lanes),
    }
}

/// Arithmetic shares modulo `2^B` of the encoded message polynomial.
///
/// For one-bit coefficients the Boolean shares already are arithmetic shares modulo 2.
/// Espada nibbles go through [`b2a`].
pub fn masked_arrange_msg(m: &MaskedBytes, params: &SchemeParams, rng: &mut RandomnessSource) -> Vec<ArithShares> {
    match params.scheme {
        Scheme::Florete => (0..params.n)
            .map(|c| {
                let b = m.bits(c % 256, 1);
                ArithShares::from_shares(b.shares().to_vec(), 1)
            })
            .collect(),
        Scheme::Sable => (0..params.n)
            .map(|c| ArithShares::from_shares(m.bits(c, 1).shares().to_vec(), 1))
            .collect(),
        Scheme::Espada => (0..params.n).map(|c| b2a(&m.bits(4 * c, 4), 4, rng)).collect(),
    }
}

/// Masked decryption to shared message bytes.
pub fn masked_pke_dec(
    msk: &MaskedSecretKey,
    ct: &Ciphertext,
    params: &SchemeParams,
    rng: &mut RandomnessSource,
) -> Result<MaskedBytes> {
    masked_pke_dec_timed(msk, ct, params, rng, &mut None)
}

fn masked_pke_dec_timed(
    msk: &MaskedSecretKey,
    ct: &Ciphertext,
    params: &SchemeParams,
    rng: &mut RandomnessSource,
    times: &mut Option<&mut StageTimes>,
) -> Result<MaskedBytes> {
    let w = stage(Label::DecryptionArithmetic, rng, times, |_| masked_dec_arith(msk, ct, params))?;
    let lanes = stage(Label::Compression, rng, times, |rng| masked_compress(&w, params, rng));
    Ok(stage(Label::OriginalMsg, rng, times, |rng| masked_original_msg(&lanes, params, rng)))
}

/// Re-encryption of a shared message with shared coins. Returns `u~` (width `eps_q`) and
/// `v~` (width `eps_p`) before their final right shifts.
pub fn masked_reencrypt(
    m: &MaskedBytes,
    r: &MaskedBytes,
    pk: &PublicKey,
    params: &SchemeParams,
    rng: &mut RandomnessSource,
) -> Result<(Vec<ArithShares>, Vec<ArithShares>)> {
    masked_reencrypt_timed(m, r, pk, params, rng, &mut None)
}

fn masked_reencrypt_timed(
    m: &MaskedBytes,
    r: &MaskedBytes,
    pk: &PublicKey,
    params: &SchemeParams,
    rng: &mut RandomnessSource,
    times: &mut Option<&mut StageTimes>,
) -> Result<(Vec<ArithShares>, Vec<ArithShares>)> {
    let stream = stage(Label::Xof, rng, times, |rng| masked_shake128(r, params.cbd_stream_bytes(), rng));
    let sp = stage(Label::Cbd, rng, times, |rng| masked_cbd(&stream, params, params.eps_q, rng))?;
    let msg = stage(Label::ArrangeMsg, rng, times, |rng| masked_arrange_msg(m, params, rng));
    stage(Label::EncryptionArithmetic, rng, times, |_| {
        let sp = transpose_arith(&sp, params.n);
        let a = gen_matrix(&pk.seed_a, params);
        let mut u_shares = Vec::with_capacity(sp.len());
        let mut v_shares = Vec::with_capacity(sp.len());
        for (i, s) in sp.iter().enumerate() {
            let mut u = a.mul_vec(s, params)?;
            let s_p = s.map(|p| p.with_width(params.eps_p));
            let mut v = pk.b.inner(&s_p, params)?;
            if i == 0 {
                u = u.map(|p| p.add_const(params.h()));
                v = v.add_const(params.h1());
            }
            let mi: Vec<u16> = msg.iter().map(|c| c.shares()[i] as u16).collect();
            let mi = Poly::from_coeffs(mi, params.eps_p).shift_left(params.eps_p - params.b);
            v = v.sub(&mi)?;
            u_shares.push(u.flat_coeffs());
            v_shares.push(v.coeffs().to_vec());
        }
        Ok((to_coeff_shares(&u_shares, params.eps_q), to_coeff_shares(&v_shares, params.eps_p)))
    })
}

/// Shared lanes fed to the all-bits-one test: the complemented XOR difference between the
/// shifted re-encryption and the public ciphertext.
pub fn comparison_lanes(
    u_tilde: &[ArithShares],
    v_tilde: &[ArithShares],
    ct: &Ciphertext,
    params: &SchemeParams,
    rng: &mut RandomnessSource,
) -> Vec<BooleanShares> {
    let u_pub = ct.u.flat_coeffs();
    let v_pub = ct.v.coeffs();
    let diff = |b: &BooleanShares, shift: u32, c: u16| {
        let mut y = b.shift_right(shift);
        y.xor_public(c as u64, 1);
        y.not_share0();
        y
    };
    let mut lanes = Vec::with_capacity(u_tilde.len() + v_tilde.len());
    for (b, &c) in a2b_bitsliced(u_tilde, rng).iter().zip(&u_pub) {
        lanes.push(diff(b, params.eps_q - params.eps_p, c));
    }
    for (b, &c) in a2b_bitsliced(v_tilde, rng).iter().zip(v_pub) {
        lanes.push(diff(b, params.eps_p - params.v_bits(), c));
    }
    lanes
}

/// Shared bit that is 1 iff the re-encryption equals `ct`.
pub fn masked_ciphertext_compare(
    u_tilde: &[ArithShares],
    v_tilde: &[ArithShares],
    ct: &Ciphertext,
    params: &SchemeParams,
    rng: &mut RandomnessSource,
) -> BooleanShares {
    let lanes = comparison_lanes(u_tilde, v_tilde, ct, params, rng);
    boolean_all_bits_one_test(&lanes, rng)
}

/// Secure AND over every bit of every lane.
pub fn boolean_all_bits_one_test(lanes: &[BooleanShares], rng: &mut RandomnessSource) -> BooleanShares {
    all_bits_one(lanes, rng)
}

/// Bytes entering the comparison's A2B conversions and its all-bits-one test, measured on the
/// actual share widths.
pub fn comparison_input_bytes(u_tilde: &[ArithShares], v_tilde: &[ArithShares], lanes: &[BooleanShares]) -> (usize, usize) {
    let a2b_bits: usize = u_tilde.iter().chain(v_tilde).map(|a| a.width() as usize).sum();
    (a2b_bits / 8, all_bits_one_input_bits(lanes) / 8)
}

/// Masked decapsulation. The result equals [`crate::kem::kem_decaps`] on the same inputs.
pub fn masked_kem_decaps(
    msk: &MaskedSecretKey,
    ct_bytes: &[u8],
    params: &SchemeParams,
    rng: &mut RandomnessSource,
) -> Result<SessionKey> {
    masked_kem_decaps_timed(msk, ct_bytes, params, rng, None)
}

/// [`masked_kem_decaps`] recording the time spent per stage.
pub fn masked_kem_decaps_timed(
    msk: &MaskedSecretKey,
    ct_bytes: &[u8],
    params: &SchemeParams,
    rng: &mut RandomnessSource,
    times: Option<&mut StageTimes>,
) -> Result<SessionKey> {
    let mut times = times;
    if msk.order() == 0 {
        return Err(Error::InvalidOrder(0));
    }
    let ct = Ciphertext::from_bytes(ct_bytes, params)?;
    let m = masked_pke_dec_timed(msk, &ct, params, rng, &mut times)?;
    debug_assert_eq!(m.len(), MSG_BYTES);
    let digest = stage(Label::HashG, rng, &mut times, |rng| masked_sha3_512(&m, &msk.pkh, rng));
    let khat = digest.slice(0..32);
    let r = digest.slice(32..64);
    let (u_t, v_t) = masked_reencrypt_timed(&m, &r, &msk.pk, params, rng, &mut times)?;
    let bit = stage(Label::Comparison, rng, &mut times, |rng| masked_ciphertext_compare(&u_t, &v_t, &ct, params, rng));
    rng.check()?;
    stage(Label::Other, rng, &mut times, |_| {
        let prefix: [u8; 32] = if bit.recombine() == 1 {
            khat.recombine().try_into().expect("32-byte pre-key")
        } else {
            msk.z
        };
        Ok(derive_key(&prefix, ct_bytes))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kem::{kem_decaps, kem_encaps_from_seed, kem_keygen_from_seeds, KemKeyPair};
    use crate::keccak::{sha3_512, shake128};
    use crate::params::{ESPADA, FLORETE, SABLE};
    use crate::pke::{arrange_msg, original_msg, pke_dec, pke_dec_pre_shift, pke_enc};
    use rand::{Rng, SeedableRng};

    const ALL: [&SchemeParams; 3] = [&FLORETE, &ESPADA, &SABLE];

    fn keypair(p: &SchemeParams, seed: u8) -> KemKeyPair {
        kem_keygen_from_seeds(&[seed; 32], &[seed ^ 0x55; 32], &[seed ^ 0xaa; 32], p)
    }

    #[test]
    fn import_recombines_to_secret() {
        let mut src = RandomnessSource::from_u64(70);
        for p in ALL {
            let kp = keypair(p, 1);
            let msk = MaskedSecretKey::import(&kp.sk, p, 3, &mut src).unwrap();
            assert_eq!(msk.order(), 3);
            let m = (1u16 << p.eps_p) - 1;
            for (i, &c) in kp.sk.s.flat_coeffs().iter().enumerate() {
                assert_eq!(msk.coefficient_shares(i).recombine() as u16, c & m);
            }
            assert!(src.ledger().get(Label::KeyImport) > 0);
        }
        let kp = keypair(&SABLE, 1);
        assert!(matches!(MaskedSecretKey::import(&kp.sk, &SABLE, 0, &mut src), Err(Error::InvalidOrder(0))));
    }

    #[test]
    fn majority_decoder_exhaustive() {
        let mut src = RandomnessSource::from_u64(71);
        for t in 1..=3 {
            for pattern in 0..8u64 {
                for _ in 0..100 {
                    let (x, y, z) = (pattern & 1, pattern >> 1 & 1, pattern >> 2);
                    let mut lanes: Vec<BooleanShares> =
                        (0..768).map(|_| BooleanShares::public(0, 1, t + 1)).collect();
                    lanes[9] = BooleanShares::share(x, 1, t, &mut src).unwrap();
                    lanes[9 + 256] = BooleanShares::share(y, 1, t, &mut src).unwrap();
                    lanes[9 + 512] = BooleanShares::share(z, 1, t, &mut src).unwrap();
                    let out = masked_original_msg(&lanes, &FLORETE, &mut src);
                    assert_eq!(out.n_shares(), t + 1);
                    let m = out.recombine();
                    assert_eq!((m[1] >> 1) & 1, (x + y + z > 1) as u8);
                    assert!(m.iter().enumerate().all(|(i, &b)| i == 1 || b == 0));
                }
            }
        }
    }

    #[test]
    fn compress_matches_plain_shift() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(72);
        let mut src = RandomnessSource::from_u64(72);
        for p in ALL {
            for t in 1..=3 {
                for _ in 0..1000 / 3 {
                    let x = rng.gen_range(0..1u64 << p.eps_p);
                    let a = ArithShares::share(x, p.eps_p, t, &mut src).unwrap();
                    let lane = masked_compress(&[a], p, &mut src).pop().unwrap();
                    assert_eq!(lane.width(), p.b);
                    assert_eq!(lane.recombine(), x >> (p.eps_p - p.b));
                }
            }
        }
        let top = ArithShares::share(1 << (SABLE.eps_p - 1), SABLE.eps_p, 2, &mut src).unwrap();
        assert_eq!(masked_compress(&[top], &SABLE, &mut src)[0].recombine(), 1);
    }

    #[test]
    fn masked_arrange_matches_plain() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(73);
        let mut src = RandomnessSource::from_u64(73);
        for p in ALL {
            for t in 1..=3 {
                let m: [u8; 32] = rng.gen();
                let shared = MaskedBytes::share(&m, t, &mut src).unwrap();
                let got: Vec<u16> = masked_arrange_msg(&shared, p, &mut src).iter().map(|a| a.recombine() as u16).collect();
                assert_eq!(got, arrange_msg(&m, p).coeffs());
            }
        }
    }

    #[test]
    fn masked_decryption_matches_plain() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(74);
        let mut src = RandomnessSource::from_u64(74);
        for p in ALL {
            let kp = keypair(p, 2);
            for t in 1..=3 {
                let msk = MaskedSecretKey::import(&kp.sk, p, t, &mut src).unwrap();
                for _ in 0..4 {
                    let m: [u8; 32] = rng.gen();
                    let ct = pke_enc(&kp.pk, &arrange_msg(&m, p), &rng.gen(), p).unwrap();
                    let got = masked_pke_dec(&msk, &ct, p, &mut src).unwrap();
                    assert_eq!(got.n_shares(), t + 1);
                    assert_eq!(got.recombine(), original_msg(&pke_dec(&kp.sk.s, &ct, p).unwrap(), p));
                    assert_eq!(got.recombine(), m);
                }
            }
        }
    }

    #[test]
    fn zero_secret_decrypts_like_plain_zero_secret() {
        let mut src = RandomnessSource::from_u64(75);
        for p in ALL {
            let mut kp = keypair(p, 3);
            kp.sk.s = PolyVec::zero(p.l, p.n, p.eps_q);
            let msk = MaskedSecretKey::import(&kp.sk, p, 2, &mut src).unwrap();
            let ct = pke_enc(&kp.pk, &arrange_msg(&[0x3c; 32], p), &[9; 32], p).unwrap();
            let expect = original_msg(&pke_dec_pre_shift(&kp.sk.s, &ct, p).unwrap().shift_right(p.eps_p - p.b), p);
            assert_eq!(masked_pke_dec(&msk, &ct, p, &mut src).unwrap().recombine(), expect);
        }
    }

    #[test]
    fn masked_g_matches_plain() {
        let mut src = RandomnessSource::from_u64(76);
        let m = [0x42u8; 32];
        let pkh = [0x17u8; 32];
        let shared = MaskedBytes::share(&m, 2, &mut src).unwrap();
        let mut buf = pkh.to_vec();
        buf.extend_from_slice(&m);
        assert_eq!(masked_sha3_512(&shared, &pkh, &mut src).recombine(), sha3_512(&buf).to_vec());
    }

    #[test]
    fn reencryption_matches_plain() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(77);
        let mut src = RandomnessSource::from_u64(77);
        for p in ALL {
            let kp = keypair(p, 4);
            for t in 1..=3 {
                let m: [u8; 32] = rng.gen();
                let r: [u8; 32] = rng.gen();
                let sm = MaskedBytes::share(&m, t, &mut src).unwrap();
                let sr = MaskedBytes::share(&r, t, &mut src).unwrap();
                let (ut, vt) = masked_reencrypt(&sm, &sr, &kp.pk, p, &mut src).unwrap();
                assert!(ut.iter().all(|a| a.width() == p.eps_q && a.n_shares() == t + 1));
                assert!(vt.iter().all(|a| a.width() == p.eps_p));
                let ct = pke_enc(&kp.pk, &arrange_msg(&m, p), &r, p).unwrap();
                let u: Vec<u16> = ut.iter().map(|a| (a.recombine() >> (p.eps_q - p.eps_p)) as u16).collect();
                let v: Vec<u16> = vt.iter().map(|a| (a.recombine() >> (p.eps_p - p.v_bits())) as u16).collect();
                assert_eq!(u, ct.u.flat_coeffs());
                assert_eq!(v, ct.v.coeffs());
            }
        }
    }

    #[test]
    fn comparison_accepts_honest_and_rejects_flips() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(78);
        let mut src = RandomnessSource::from_u64(78);
        for p in ALL {
            let kp = keypair(p, 5);
            let t = 2;
            let m: [u8; 32] = rng.gen();
            let r: [u8; 32] = rng.gen();
            let sm = MaskedBytes::share(&m, t, &mut src).unwrap();
            let sr = MaskedBytes::share(&r, t, &mut src).unwrap();
            let (ut, vt) = masked_reencrypt(&sm, &sr, &kp.pk, p, &mut src).unwrap();
            let ct = pke_enc(&kp.pk, &arrange_msg(&m, p), &r, p).unwrap();
            assert_eq!(masked_ciphertext_compare(&ut, &vt, &ct, p, &mut src).recombine(), 1);
            let bytes = ct.to_bytes();
            for _ in 0..10 {
                let mut bad = bytes.clone();
                let pos = rng.gen_range(0..bad.len() * 8);
                bad[pos / 8] ^= 1 << (pos % 8);
                let bad = Ciphertext::from_bytes(&bad, p).unwrap();
                assert_eq!(masked_ciphertext_compare(&ut, &vt, &bad, p, &mut src).recombine(), 0);
            }
            let lanes = comparison_lanes(&ut, &vt, &ct, p, &mut src);
            assert_eq!(comparison_input_bytes(&ut, &vt, &lanes), (p.comparison_a2b_bytes(), p.comparison_all_ones_bytes()));
        }
    }

    #[test]
    fn decaps_matches_unmasked() {
        let mut src = RandomnessSource::from_u64(79);
        for p in ALL {
            let kp = keypair(p, 6);
            for t in 1..=2 {
                let msk = MaskedSecretKey::import(&kp.sk, p, t, &mut src).unwrap();
                let (ct, key) = kem_encaps_from_seed(&kp.pk, &[t as u8; 32], p).unwrap();
                let bytes = ct.to_bytes();
                assert_eq!(masked_kem_decaps(&msk, &bytes, p, &mut src).unwrap(), key);
                let mut bad = bytes.clone();
                bad[100] ^= 0x10;
                let masked = masked_kem_decaps(&msk, &bad, p, &mut src).unwrap();
                assert_eq!(masked, kem_decaps(&kp.sk, &bad, p).unwrap());
                assert_ne!(masked, key);
            }
        }
    }

    #[test]
    fn ledger_labels_and_growth() {
        let p = &FLORETE;
        let kp = keypair(p, 7);
        let (ct, _) = kem_encaps_from_seed(&kp.pk, &[1; 32], p).unwrap();
        let mut prev: Option<Vec<u64>> = None;
        for t in 1..=3 {
            let mut src = RandomnessSource::from_u64(80);
            let msk = MaskedSecretKey::import(&kp.sk, p, t, &mut src).unwrap();
            src.reset_ledger();
            let mut times = StageTimes::default();
            masked_kem_decaps_timed(&msk, &ct.to_bytes(), p, &mut src, Some(&mut times)).unwrap();
            let l = src.ledger();
            assert_eq!(l.get(Label::DecryptionArithmetic), 0);
            assert_eq!(l.get(Label::EncryptionArithmetic), 0);
            assert_eq!(l.get(Label::Other), 0);
            assert_eq!(l.get(Label::Unlabeled), 0);
            for lab in [Label::Compression, Label::OriginalMsg, Label::HashG, Label::Xof, Label::Cbd, Label::Comparison] {
                assert!(l.get(lab) > 0, "{lab}");
            }
            assert!(times.total() > Duration::ZERO);
            let row: Vec<u64> = Label::ALL.iter().map(|&x| l.get(x)).collect();
            if let Some(prev) = prev {
                for (a, b) in prev.iter().zip(&row) {
                    assert!(*a == 0 && *b == 0 || b > a);
                }
            }
            prev = Some(row);
        }
    }

    #[test]
    fn seeded_decaps_is_reproducible() {
        let p = &SABLE;
        let kp = keypair(p, 8);
        let (ct, _) = kem_encaps_from_seed(&kp.pk, &[2; 32], p).unwrap();
        let run = || {
            let mut src = RandomnessSource::seeded(&shake128(b"run", 32).try_into().unwrap());
            let msk = MaskedSecretKey::import(&kp.sk, p, 2, &mut src).unwrap();
            let key = masked_kem_decaps(&msk, &ct.to_bytes(), p, &mut src).unwrap();
            (key, src.ledger().clone())
        };
        assert_eq!(run(), run());
    }
}
