//! Order-generic masking gadgets: secure AND, Kogge-Stone addition, bitsliced Hamming-weight
//! arithmetic and the conversions between Boolean and arithmetic sharings.
//!
//! Every gadget takes `t + 1` shares and returns `t + 1` shares. Fresh randomness comes only
//! from the [`RandomnessSource`] argument, and the number of bytes drawn depends only on the
//! share count and the word width.

use crate::rng::RandomnessSource;
use crate::shares::{ArithShares, BooleanShares};

#[inline]
fn mask64(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// ISW multiplication over `GF(2)^w`: `(t+1)^2` partial products, `t(t+1)/2` random words.
pub fn sec_and(a: &BooleanShares, b: &BooleanShares, rng: &mut RandomnessSource) -> BooleanShares {
    assert_eq!(a.n_shares(), b.n_shares(), "share counts differ");
    let width = a.width().max(b.width());
    let (x, y) = (a.shares(), b.shares());
    let n = x.len();
    let mut c: Vec<u64> = x.iter().zip(y).map(|(p, q)| p & q).collect();
    for i in 0..n {
        for j in i + 1..n {
            let r = rng.word(width);
            c[i] ^= r;
            c[j] ^= (r ^ (x[i] & y[j])) ^ (x[j] & y[i]);
        }
    }
    BooleanShares::from_shares(c, width)
}

/// Re-randomises a Boolean sharing with `t` fresh words.
pub fn refresh(x: &mut BooleanShares, rng: &mut RandomnessSource) {
    let width = x.width();
    let s = x.shares_mut();
    for j in 1..s.len() {
        let r = rng.word(width);
        s[0] ^= r;
        s[j] ^= r;
    }
}

fn refresh_words(s: &mut [u64], width: u32, rng: &mut RandomnessSource) {
    for j in 1..s.len() {
        let r = rng.word(width);
        s[0] ^= r;
        s[j] ^= r;
    }
}

/// Number of Kogge-Stone levels needed to propagate a carry across `width` bits.
fn ks_levels(width: u32) -> u32 {
    if width <= 2 {
        0
    } else {
        32 - (width - 2).leading_zeros()
    }
}

/// `a + b mod 2^w` on Boolean sharings, where `w` is the larger input width.
pub fn sec_add(a: &BooleanShares, b: &BooleanShares, rng: &mut RandomnessSource) -> BooleanShares {
    let width = a.width().max(b.width());
    let a = a.with_width(width);
    let b = b.with_width(width);
    let mut p = a.xor(&b);
    let mut g = sec_and(&a, &b, rng);
    let levels = ks_levels(width);
    for j in 0..levels {
        let s = 1u32 << j;
        let h = sec_and(&p, &g.shift_left(s), rng);
        g = g.xor(&h);
        if j + 1 < levels {
            let mut ps = p.shift_left(s);
            refresh(&mut ps, rng);
            p = sec_and(&p, &ps, rng);
        }
    }
    a.xor(&b).xor(&g.shift_left(1))
}

/// Bit length of `v`.
fn bit_len(v: u32) -> u32 {
    32 - v.leading_zeros()
}

/// Bitsliced Hamming weight. Plane `k` holds bit `k` of every lane; the result has
/// `bit_len(planes.len())` planes holding the per-lane weight.
pub fn sec_bit_add_planes(planes: &[BooleanShares], rng: &mut RandomnessSource) -> Vec<BooleanShares> {
    let out_bits = bit_len(planes.len() as u32) as usize;
    let mut acc: Vec<BooleanShares> = Vec::with_capacity(out_bits);
    let mut iter = planes.iter();
    let first = match iter.next() {
        Some(p) => p.clone(),
        None => return Vec::new(),
    };
    let zero = BooleanShares::public(0, first.width(), first.n_shares());
    acc.push(first);
    acc.resize(out_bits, zero);
    for plane in iter {
        let mut carry = plane.clone();
        for k in 0..out_bits {
            let sum = acc[k].xor(&carry);
            if k + 1 < out_bits {
                carry = sec_and(&acc[k], &carry, rng);
            }
            acc[k] = sum;
        }
    }
    acc
}

/// Bitsliced `z - HW(y)` in the two's complement width `z_planes.len()`.
pub fn sec_bit_sub_planes(
    z_planes: &[BooleanShares],
    y_planes: &[BooleanShares],
    rng: &mut RandomnessSource,
) -> Vec<BooleanShares> {
    let mut z = z_planes.to_vec();
    let bits = z.len();
    for y in y_planes {
        let mut borrow = y.clone();
        for k in 0..bits {
            let diff = z[k].xor(&borrow);
            if k + 1 < bits {
                let mut nz = z[k].clone();
                nz.not_share0();
                borrow = sec_and(&nz, &borrow, rng);
            }
            z[k] = diff;
        }
    }
    z
}

/// Splits a single lane into 1-bit planes.
fn planes_of(x: &BooleanShares) -> Vec<BooleanShares> {
    (0..x.width()).map(|i| x.bit(i)).collect()
}

fn lane_of(planes: &[BooleanShares]) -> BooleanShares {
    let n = planes[0].n_shares();
    let shares = (0..n)
        .map(|i| planes.iter().enumerate().fold(0u64, |acc, (k, p)| acc | (p.shares()[i] & 1) << k))
        .collect();
    BooleanShares::from_shares(shares, planes.len() as u32)
}

/// Hamming weight of a `j`-bit lane, as a `bit_len(j)`-bit sharing.
pub fn sec_bit_add(x: &BooleanShares, rng: &mut RandomnessSource) -> BooleanShares {
    lane_of(&sec_bit_add_planes(&planes_of(x), rng))
}

/// `z - HW(y) mod 2^(z.width)`.
pub fn sec_bit_sub(z: &BooleanShares, y: &BooleanShares, rng: &mut RandomnessSource) -> BooleanShares {
    lane_of(&sec_bit_sub_planes(&planes_of(z), &planes_of(y), rng))
}

/// Transposes `lanes` (each `width` bits, at most 64 of them) into `width` bit planes.
pub fn lanes_to_planes(lanes: &[BooleanShares], width: u32) -> Vec<BooleanShares> {
    assert!(lanes.len() <= 64);
    let n = lanes[0].n_shares();
    (0..width)
        .map(|k| {
            let shares = (0..n)
                .map(|i| {
                    lanes.iter().enumerate().fold(0u64, |acc, (c, l)| acc | ((l.shares()[i] >> k) & 1) << c)
                })
                .collect();
            BooleanShares::from_shares(shares, lanes.len() as u32)
        })
        .collect()
}

/// Inverse of [`lanes_to_planes`].
pub fn planes_to_lanes(planes: &[BooleanShares], count: usize) -> Vec<BooleanShares> {
    let n = planes[0].n_shares();
    (0..count)
        .map(|c| {
            let shares = (0..n)
                .map(|i| planes.iter().enumerate().fold(0u64, |acc, (k, p)| acc | ((p.shares()[i] >> c) & 1) << k))
                .collect();
            BooleanShares::from_shares(shares, planes.len() as u32)
        })
        .collect()
}

/// Arithmetic-to-Boolean conversion by recursive halving: each half is converted on its own,
/// both are expanded back to the full share count and combined with [`sec_add`].
pub fn a2b(a: &ArithShares, rng: &mut RandomnessSource) -> BooleanShares {
    a2b_rec(a.shares(), a.width(), rng)
}

fn a2b_rec(shares: &[u64], width: u32, rng: &mut RandomnessSource) -> BooleanShares {
    let n = shares.len();
    if n == 1 {
        return BooleanShares::from_shares(vec![shares[0]], width);
    }
    let h = n / 2;
    let x = expand(a2b_rec(&shares[..h], width, rng), n, rng);
    let y = expand(a2b_rec(&shares[h..], width, rng), n, rng);
    sec_add(&x, &y, rng)
}

fn expand(x: BooleanShares, n: usize, rng: &mut RandomnessSource) -> BooleanShares {
    let width = x.width();
    let mut s = x.shares().to_vec();
    s.resize(n, 0);
    refresh_words(&mut s, width, rng);
    BooleanShares::from_shares(s, width)
}

/// Bitsliced addition of two `k`-plane sharings with a ripple carry:
/// `c_{j+1} = ((a_j ^ c_j) & (b_j ^ c_j)) ^ c_j`, one [`sec_and`] per plane except the last.
pub fn sec_add_planes(a: &[BooleanShares], b: &[BooleanShares], rng: &mut RandomnessSource) -> Vec<BooleanShares> {
    assert_eq!(a.len(), b.len());
    let k = a.len();
    let mut out = Vec::with_capacity(k);
    let mut carry: Option<BooleanShares> = None;
    for j in 0..k {
        let ab = a[j].xor(&b[j]);
        let sum = match &carry {
            Some(c) => ab.xor(c),
            None => ab.clone(),
        };
        out.push(sum);
        if j + 1 < k {
            carry = Some(match carry {
                None => sec_and(&a[j], &b[j], rng),
                Some(c) => sec_and(&a[j].xor(&c), &b[j].xor(&c), rng).xor(&c),
            });
        }
    }
    out
}

/// Bitsliced A2B over up to 64 sharings of one width: each share is transposed into bit
/// planes, then the same recursive halving as [`a2b`] runs with [`sec_add_planes`].
/// Returns `width` planes; bit `c` of plane `j` is bit `j` of coefficient `c`.
pub fn a2b_planes(coeffs: &[ArithShares], rng: &mut RandomnessSource) -> Vec<BooleanShares> {
    assert!(!coeffs.is_empty() && coeffs.len() <= 64);
    let width = coeffs[0].width();
    let n = coeffs[0].n_shares();
    let lanes = coeffs.len() as u32;
    let share_planes: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            (0..width)
                .map(|j| coeffs.iter().enumerate().fold(0u64, |acc, (c, a)| acc | ((a.shares()[i] >> j) & 1) << c))
                .collect()
        })
        .collect();
    a2b_planes_rec(&share_planes, lanes, rng)
}

fn a2b_planes_rec(shares: &[Vec<u64>], lanes: u32, rng: &mut RandomnessSource) -> Vec<BooleanShares> {
    let n = shares.len();
    if n == 1 {
        return shares[0].iter().map(|&p| BooleanShares::from_shares(vec![p], lanes)).collect();
    }
    let h = n / 2;
    let x: Vec<_> = a2b_planes_rec(&shares[..h], lanes, rng).into_iter().map(|p| expand(p, n, rng)).collect();
    let y: Vec<_> = a2b_planes_rec(&shares[h..], lanes, rng).into_iter().map(|p| expand(p, n, rng)).collect();
    sec_add_planes(&x, &y, rng)
}

/// [`a2b_planes`] transposed back to one Boolean sharing per coefficient.
pub fn a2b_bitsliced(coeffs: &[ArithShares], rng: &mut RandomnessSource) -> Vec<BooleanShares> {
    coeffs
        .chunks(64)
        .flat_map(|chunk| {
            let planes = a2b_planes(chunk, rng);
            planes_to_lanes(&planes, chunk.len())
        })
        .collect()
}

#[inline]
fn psi(x: u64, r: u64, m: u64) -> u64 {
    (x ^ r).wrapping_sub(r) & m
}

/// Boolean-to-arithmetic conversion modulo `2^width` built on the affine map
/// `psi(x, r) = (x ^ r) - r`: the sharing is split into `x - x'` and `x'`, both re-shared on one
/// share fewer and converted recursively.
pub fn b2a(b: &BooleanShares, width: u32, rng: &mut RandomnessSource) -> ArithShares {
    let m = mask64(width);
    let x: Vec<u64> = b.shares().iter().map(|s| s & m).collect();
    ArithShares::from_shares(b2a_rec(x, width, rng), width)
}

fn b2a_rec(x: Vec<u64>, width: u32, rng: &mut RandomnessSource) -> Vec<u64> {
    let m = mask64(width);
    let n = x.len();
    match n {
        1 => x,
        2 => {
            let r = rng.word(width);
            let a = psi(x[0], r, m) ^ psi(x[0], r ^ x[1], m) ^ x[0];
            vec![a, x[1]]
        }
        _ => {
            let mut e = x;
            e.push(0);
            refresh_words(&mut e, width, rng);
            let mut y: Vec<u64> = (1..=n).map(|i| psi(e[0], e[i], m)).collect();
            if (n - 1) % 2 == 1 {
                y[0] ^= e[0];
            }
            let z = e[1..].to_vec();
            let a = b2a_rec(compress(y, width, rng), width, rng);
            let b = b2a_rec(compress(z, width, rng), width, rng);
            let mut out = Vec::with_capacity(n);
            for i in 0..n - 2 {
                out.push(a[i].wrapping_add(b[i]) & m);
            }
            out.push(a[n - 2]);
            out.push(b[n - 2]);
            out
        }
    }
}

/// Refreshes, then merges the last two shares.
fn compress(mut s: Vec<u64>, width: u32, rng: &mut RandomnessSource) -> Vec<u64> {
    refresh_words(&mut s, width, rng);
    let last = s.pop().unwrap();
    *s.last_mut().unwrap() ^= last;
    s
}

/// Secure AND of every bit of every lane, returned as a one-bit sharing.
///
/// Lanes are concatenated share by share into 64-bit words (a linear step), the tail of the
/// last word is padded with ones in share 0, and the words are reduced with [`sec_and`].
pub fn all_bits_one(lanes: &[BooleanShares], rng: &mut RandomnessSource) -> BooleanShares {
    assert!(!lanes.is_empty());
    let n = lanes[0].n_shares();
    let mut words: Vec<Vec<u64>> = Vec::new();
    let mut cur = vec![0u64; n];
    let mut fill = 0u32;
    for lane in lanes {
        let w = lane.width();
        let mut done = 0u32;
        while done < w {
            let take = (64 - fill).min(w - done);
            for (c, s) in cur.iter_mut().zip(lane.shares()) {
                *c |= ((s >> done) & mask64(take)) << fill;
            }
            fill += take;
            done += take;
            if fill == 64 {
                words.push(std::mem::replace(&mut cur, vec![0u64; n]));
                fill = 0;
            }
        }
    }
    if fill > 0 {
        cur[0] |= !mask64(fill);
        words.push(cur);
    }
    let mut acc: Vec<BooleanShares> =
        words.into_iter().map(|w| BooleanShares::from_shares(w, 64)).collect();
    while acc.len() > 1 {
        let mut next = Vec::with_capacity(acc.len().div_ceil(2));
        let mut it = acc.chunks(2);
        for pair in &mut it {
            if pair.len() == 2 {
                next.push(sec_and(&pair[0], &pair[1], rng));
            } else {
                next.push(pair[0].clone());
            }
        }
        acc = next;
    }
    let mut x = acc.pop().unwrap();
    let mut width = 64;
    while width > 1 {
        width /= 2;
        let lo = x.with_width(width);
        let hi = x.shift_right(width).with_width(width);
        x = sec_and(&lo, &hi, rng);
    }
    x
}

/// Number of input bits processed by [`all_bits_one`] for the given lanes.
pub fn all_bits_one_input_bits(lanes: &[BooleanShares]) -> usize {
    lanes.iter().map(|l| l.width() as usize).sum()
}
