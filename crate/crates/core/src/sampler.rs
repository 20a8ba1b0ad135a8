//! Public-matrix expansion, the plain centered binomial sampler and its masked counterparts.
//!
//! Each CBD draw reads a `2η`-bit field from the stream: `x` is the low `η` bits, `y` the high
//! `η` bits, and the sample is `HW(x) - HW(y)`.

use crate::error::{Error, Result};
use crate::gadgets::{b2a, lanes_to_planes, planes_to_lanes, sec_bit_add_planes, sec_bit_sub_planes};
use crate::keccak::shake128;
use crate::pack::{get_bit, unpack_bits};
use crate::params::SchemeParams;
use crate::poly::{Poly, PolyMatrix, PolyVec};
use crate::rng::RandomnessSource;
use crate::shares::{ArithShares, BooleanShares, MaskedBytes};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CbdSpec {
    pub eta: u32,
}

impl CbdSpec {
    pub fn for_params(params: &SchemeParams) -> Self {
        CbdSpec { eta: params.eta }
    }

    pub fn bits_per_draw(&self) -> u32 {
        2 * self.eta
    }

    /// Boolean lane width used inside the masked sampler for this distribution.
    pub fn lane_width(&self) -> u32 {
        if self.eta == 1 {
            2
        } else {
            3
        }
    }
}

/// Expands `seed` into the `l x l` public matrix with `eps_q`-bit coefficients.
pub fn gen_matrix(seed: &[u8; 32], params: &SchemeParams) -> PolyMatrix {
    let (l, n) = (params.l, params.n);
    let stream = shake128(seed, params.matrix_stream_bytes());
    let coeffs = unpack_bits(&stream, params.eps_q, l * l * n).expect("stream sized for the matrix");
    let rows = coeffs
        .chunks(l * n)
        .map(|row| PolyVec::from_flat(row, n, params.eps_q))
        .collect();
    PolyMatrix::new(rows)
}

/// Unmasked CBD over the first `count` fields of `stream`.
pub fn cbd_sample(stream: &[u8], spec: CbdSpec, count: usize) -> Result<Vec<i32>> {
    let needed = (count * spec.bits_per_draw() as usize).div_ceil(8);
    if stream.len() < needed {
        return Err(Error::Length { expected: needed, got: stream.len() });
    }
    let eta = spec.eta as usize;
    Ok((0..count)
        .map(|i| {
            let base = i * 2 * eta;
            let hx: i32 = (0..eta).map(|k| get_bit(stream, base + k) as i32).sum();
            let hy: i32 = (0..eta).map(|k| get_bit(stream, base + eta + k) as i32).sum();
            hx - hy
        })
        .collect())
}

/// Secret vector sampled from `stream` as a polynomial vector mod `2^width`.
pub fn cbd_vec(stream: &[u8], params: &SchemeParams, width: u32) -> Result<PolyVec> {
    let vals = cbd_sample(stream, CbdSpec::for_params(params), params.vec_coeffs())?;
    let polys = vals.chunks(params.n).map(|c| Poly::from_signed(c, width)).collect();
    PolyVec::new(polys)
}

/// Masked sampler for 1-bit `x`, `y` built on a bit subtraction: `y - x` is computed in a
/// 2-bit lane, flipping bit 0 of one share maps it to `x - y + 1`, and the offset is removed
/// after conversion.
pub fn mask_cbd_sampler_a(
    x: &BooleanShares,
    y: &BooleanShares,
    width: u32,
    rng: &mut RandomnessSource,
) -> ArithShares {
    mask_cbd_sampler_a_batch(std::slice::from_ref(x), std::slice::from_ref(y), width, rng)
        .pop()
        .unwrap()
}

/// Bitsliced form of [`mask_cbd_sampler_a`] over up to 64 lanes.
pub fn mask_cbd_sampler_a_batch(
    x: &[BooleanShares],
    y: &[BooleanShares],
    width: u32,
    rng: &mut RandomnessSource,
) -> Vec<ArithShares> {
    let xp = lanes_to_planes(x, 1);
    let mut yp = lanes_to_planes(y, 1);
    let n = yp[0].n_shares();
    yp.push(BooleanShares::public(0, yp[0].width(), n));
    let mut z = sec_bit_sub_planes(&yp, &xp, rng);
    z[0].not_share0();
    planes_to_lanes(&z, x.len())
        .iter()
        .map(|lane| {
            let mut a = b2a(lane, width, rng);
            a.sub_const(1, 1);
            a
        })
        .collect()
}

/// Masked sampler for 1-bit `x`, `y`: both are converted to arithmetic shares and subtracted
/// share-wise.
pub fn mask_cbd_sampler_b(
    x: &BooleanShares,
    y: &BooleanShares,
    width: u32,
    rng: &mut RandomnessSource,
) -> ArithShares {
    let ax = b2a(x, width, rng);
    let ay = b2a(y, width, rng);
    ax.sub(&ay)
}

/// Masked sampler for 3-bit `x`, `y`: the Hamming weights are combined in a 3-bit two's
/// complement lane, bit 2 of one share is flipped (adding 4 mod 8 on a value in `[-3, 3]`),
/// and the offset is removed after conversion.
pub fn mask_cbd_sampler_c(
    x: &BooleanShares,
    y: &BooleanShares,
    width: u32,
    rng: &mut RandomnessSource,
) -> ArithShares {
    mask_cbd_sampler_c_batch(std::slice::from_ref(x), std::slice::from_ref(y), width, rng)
        .pop()
        .unwrap()
}

/// Bitsliced form of [`mask_cbd_sampler_c`] over up to 64 lanes.
pub fn mask_cbd_sampler_c_batch(
    x: &[BooleanShares],
    y: &[BooleanShares],
    width: u32,
    rng: &mut RandomnessSource,
) -> Vec<ArithShares> {
    let mut z = sec_bit_add_planes(&lanes_to_planes(x, 3), rng);
    let n = z[0].n_shares();
    z.push(BooleanShares::public(0, z[0].width(), n));
    let mut z = sec_bit_sub_planes(&z, &lanes_to_planes(y, 3), rng);
    z[2].not_share0();
    planes_to_lanes(&z, x.len())
        .iter()
        .map(|lane| {
            let mut a = b2a(lane, width, rng);
            a.sub_const(4, 1);
            a
        })
        .collect()
}

/// Masked CBD over a Boolean-shared stream, producing `params.vec_coeffs()` arithmetic sharings
/// mod `2^width`. Florete and Sable use [`mask_cbd_sampler_b`], Espada [`mask_cbd_sampler_c`].
pub fn masked_cbd(
    stream: &MaskedBytes,
    params: &SchemeParams,
    width: u32,
    rng: &mut RandomnessSource,
) -> Result<Vec<ArithShares>> {
    let spec = CbdSpec::for_params(params);
    let count = params.vec_coeffs();
    let needed = (count * spec.bits_per_draw() as usize).div_ceil(8);
    if stream.len() < needed {
        return Err(Error::Length { expected: needed, got: stream.len() });
    }
    let eta = spec.eta;
    let field = |i: usize| {
        let base = i * 2 * eta as usize;
        (stream.bits(base, eta), stream.bits(base + eta as usize, eta))
    };
    let mut out = Vec::with_capacity(count);
    if eta == 1 {
        for i in 0..count {
            let (x, y) = field(i);
            out.push(mask_cbd_sampler_b(&x, &y, width, rng));
        }
    } else {
        for start in (0..count).step_by(64) {
            let (xs, ys): (Vec<_>, Vec<_>) = (start..(start + 64).min(count)).map(field).unzip();
            out.extend(mask_cbd_sampler_c_batch(&xs, &ys, width, rng));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{ESPADA, FLORETE, SABLE};

    fn plain(x: u64, y: u64) -> i64 {
        x.count_ones() as i64 - y.count_ones() as i64
    }

    fn wrap(v: i64, width: u32) -> u64 {
        v.rem_euclid(1 << width) as u64
    }

    fn share(x: u64, w: u32, t: usize, src: &mut RandomnessSource) -> BooleanShares {
        BooleanShares::share(x, w, t, src).unwrap()
    }

    #[test]
    fn matrix_is_deterministic_and_in_range() {
        let seed = [7u8; 32];
        for p in [&FLORETE, &ESPADA, &SABLE] {
            let a = gen_matrix(&seed, p);
            assert_eq!(a, gen_matrix(&seed, p));
            assert_eq!(a.rows().len(), p.l);
            for row in a.rows() {
                for poly in row.elems() {
                    assert_eq!(poly.len(), p.n);
                    assert!(poly.coeffs().iter().all(|&c| (c as u32) < 1 << p.eps_q));
                }
            }
        }
        assert_eq!(FLORETE.matrix_stream_bytes(), 960);
        let stream = shake128(&seed, 960);
        assert_eq!(gen_matrix(&seed, &FLORETE).get(0, 0).coeffs(), unpack_bits(&stream, 10, 768).unwrap());
    }

    #[test]
    fn matrix_differs_across_seeds() {
        assert_ne!(gen_matrix(&[1u8; 32], &SABLE), gen_matrix(&[2u8; 32], &SABLE));
    }

    #[test]
    fn cbd_definitions() {
        let s1 = CbdSpec { eta: 1 };
        assert_eq!(cbd_sample(&[0b01], s1, 1).unwrap(), vec![1]);
        assert_eq!(cbd_sample(&[0b10], s1, 1).unwrap(), vec![-1]);
        assert_eq!(cbd_sample(&[0b11], s1, 1).unwrap(), vec![0]);
        assert_eq!(cbd_sample(&[0b0000_0111], CbdSpec { eta: 3 }, 1).unwrap(), vec![3]);
        assert_eq!(cbd_sample(&[0b0011_1000], CbdSpec { eta: 3 }, 1).unwrap(), vec![-3]);
        assert!(matches!(cbd_sample(&[0u8; 5], CbdSpec { eta: 3 }, 8), Err(Error::Length { .. })));
    }

    #[test]
    fn cbd_matches_binomial_pmf() {
        for eta in [1u32, 3] {
            let draws = 1_000_000usize;
            let spec = CbdSpec { eta };
            let stream = shake128(&[eta as u8; 32], draws * 2 * eta as usize / 8);
            let vals = cbd_sample(&stream, spec, draws).unwrap();
            let mu = 2 * eta;
            let mut counts = vec![0usize; mu as usize + 1];
            for v in vals {
                assert!(v.unsigned_abs() <= eta);
                counts[(v + eta as i32) as usize] += 1;
            }
            let binom = |k: u32| -> f64 {
                let mut c = 1.0;
                for i in 0..k {
                    c = c * (mu - i) as f64 / (i + 1) as f64;
                }
                c / (1u64 << mu) as f64
            };
            for (k, &c) in counts.iter().enumerate() {
                let p = binom(k as u32);
                let mean = p * draws as f64;
                let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
                assert!((c as f64 - mean).abs() <= 3.0 * sigma, "eta {eta} bucket {k}: {c} vs {mean}");
            }
        }
    }

    #[test]
    fn samplers_a_and_b_exhaustive() {
        let mut src = RandomnessSource::from_u64(40);
        for t in 1..=3 {
            for x in 0..2 {
                for y in 0..2 {
                    for _ in 0..100 {
                        let sx = share(x, 1, t, &mut src);
                        let sy = share(y, 1, t, &mut src);
                        let a = mask_cbd_sampler_a(&sx, &sy, 13, &mut src);
                        let b = mask_cbd_sampler_b(&sx, &sy, 13, &mut src);
                        assert_eq!(a.n_shares(), t + 1);
                        assert_eq!(b.n_shares(), t + 1);
                        assert_eq!(a.recombine(), wrap(plain(x, y), 13));
                        assert_eq!(b.recombine(), a.recombine());
                    }
                }
            }
        }
    }

    #[test]
    fn sampler_c_exhaustive() {
        let mut src = RandomnessSource::from_u64(41);
        for t in 1..=3 {
            for x in 0..8 {
                for y in 0..8 {
                    for _ in 0..100 {
                        let sx = share(x, 3, t, &mut src);
                        let sy = share(y, 3, t, &mut src);
                        let c = mask_cbd_sampler_c(&sx, &sy, 15, &mut src);
                        assert_eq!(c.n_shares(), t + 1);
                        assert_eq!(c.recombine(), wrap(plain(x, y), 15));
                    }
                }
            }
        }
    }

    /// The offset step written as a share-local transform `z_i[2] ^= z_i[1]` on every share
    /// followed by `z_0[2] ^= 1`, kept here to show it does not compute `+4`.
    fn sampler_c_with_bit_trick(x: &BooleanShares, y: &BooleanShares, width: u32, rng: &mut RandomnessSource) -> ArithShares {
        let mut z = sec_bit_add_planes(&lanes_to_planes(std::slice::from_ref(x), 3), rng);
        let n = z[0].n_shares();
        z.push(BooleanShares::public(0, 1, n));
        let z = sec_bit_sub_planes(&z, &lanes_to_planes(std::slice::from_ref(y), 3), rng);
        let mut lane = planes_to_lanes(&z, 1).pop().unwrap();
        let shares: Vec<u64> = lane.shares().iter().map(|&s| s ^ (((s >> 1) & 1) << 2)).collect();
        lane = BooleanShares::from_shares(shares, 3);
        lane.xor_public(4, 0);
        let mut a = b2a(&lane, width, rng);
        a.sub_const(4, 1);
        a
    }

    #[test]
    fn share_local_bit_trick_fails_the_oracle() {
        let mut src = RandomnessSource::from_u64(42);
        let mut wrong = 0;
        for x in 0..8 {
            for y in 0..8 {
                let sx = share(x, 3, 1, &mut src);
                let sy = share(y, 3, 1, &mut src);
                let out = sampler_c_with_bit_trick(&sx, &sy, 15, &mut src).recombine();
                if out != wrap(plain(x, y), 15) {
                    wrong += 1;
                }
            }
        }
        assert!(wrong > 0);
    }

    #[test]
    fn batch_samplers_match_scalar_oracle() {
        let mut src = RandomnessSource::from_u64(43);
        let stream = shake128(b"lanes", 64);
        let xs: Vec<_> = (0..64).map(|i| share((stream[i] & 7) as u64, 3, 2, &mut src)).collect();
        let ys: Vec<_> = (0..64).map(|i| share((stream[i] >> 4 & 7) as u64, 3, 2, &mut src)).collect();
        let out = mask_cbd_sampler_c_batch(&xs, &ys, 15, &mut src);
        for ((o, x), y) in out.iter().zip(&xs).zip(&ys) {
            assert_eq!(o.recombine(), wrap(plain(x.recombine(), y.recombine()), 15));
        }
        let x1: Vec<_> = (0..40).map(|i| share((stream[i] & 1) as u64, 1, 3, &mut src)).collect();
        let y1: Vec<_> = (0..40).map(|i| share((stream[i] >> 1 & 1) as u64, 1, 3, &mut src)).collect();
        let out = mask_cbd_sampler_a_batch(&x1, &y1, 10, &mut src);
        for ((o, x), y) in out.iter().zip(&x1).zip(&y1) {
            assert_eq!(o.recombine(), wrap(plain(x.recombine(), y.recombine()), 10));
        }
    }

    #[test]
    fn masked_cbd_matches_plain() {
        for p in [&FLORETE, &ESPADA, &SABLE] {
            for t in 1..=2 {
                let mut src = RandomnessSource::from_u64(44 + t as u64);
                let stream = shake128(b"coins", p.cbd_stream_bytes());
                let masked = MaskedBytes::share(&stream, t, &mut src).unwrap();
                let out = masked_cbd(&masked, p, p.eps_q, &mut src).unwrap();
                let plain = cbd_vec(&stream, p, p.eps_q).unwrap().flat_coeffs();
                let got: Vec<u16> = out.iter().map(|a| a.recombine() as u16).collect();
                assert_eq!(got, plain);
            }
        }
    }

    #[test]
    fn sampler_randomness_is_deterministic() {
        let cost = |x, y| {
            let mut src = RandomnessSource::from_u64(5);
            let sx = share(x, 3, 2, &mut src);
            let sy = share(y, 3, 2, &mut src);
            src.reset_ledger();
            mask_cbd_sampler_c(&sx, &sy, 15, &mut src);
            src.ledger().total()
        };
        assert_eq!(cost(0, 0), cost(7, 5));
    }
}
