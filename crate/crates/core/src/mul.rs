//! Polynomial multipliers over `Z_{2^k}[x]`.
//!
//! All arithmetic is wrapping `u32`. The Toom-Cook interpolations divide by small powers of two,
//! which costs a few high bits; the result stays exact modulo `2^24` at worst, well above the
//! 16-bit coefficient ceiling.

use crate::params::Reduction;

const SCHOOLBOOK_CUTOFF: usize = 16;

// Multiplicative inverses modulo 2^32.
const INV3: u32 = 0xAAAA_AAAB;
const INV9: u32 = 0x38E3_8E39;
const INV15: u32 = 0xEEEE_EEEF;

/// Full product of two equal-length operands; output has length `2n`.
pub fn schoolbook(a: &[u32], b: &[u32]) -> Vec<u32> {
    let n = a.len();
    let mut c = vec![0u32; 2 * n];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            c[i + j] = c[i + j].wrapping_add(ai.wrapping_mul(bj));
        }
    }
    c
}

/// Full product using the Toom-Cook / Karatsuba chain appropriate to the operand size:
/// 768 → Toom-3 → 256 → Toom-4 → 64 → Karatsuba → 32 → Karatsuba → 16 → schoolbook.
pub fn fast(a: &[u32], b: &[u32]) -> Vec<u32> {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    if n <= SCHOOLBOOK_CUTOFF || n % 2 != 0 {
        schoolbook(a, b)
    } else if n > 256 && n % 3 == 0 {
        toom3(a, b)
    } else if n >= 256 && n % 4 == 0 {
        toom4(a, b)
    } else {
        karatsuba(a, b)
    }
}

fn karatsuba(a: &[u32], b: &[u32]) -> Vec<u32> {
    let n = a.len();
    let h = n / 2;
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);
    let lo = fast(a0, b0);
    let hi = fast(a1, b1);
    let sa: Vec<u32> = a0.iter().zip(a1).map(|(x, y)| x.wrapping_add(*y)).collect();
    let sb: Vec<u32> = b0.iter().zip(b1).map(|(x, y)| x.wrapping_add(*y)).collect();
    let mid = fast(&sa, &sb);
    let mut c = vec![0u32; 2 * n];
    for i in 0..2 * h {
        c[i] = c[i].wrapping_add(lo[i]);
        c[i + 2 * h] = c[i + 2 * h].wrapping_add(hi[i]);
        let m = mid[i].wrapping_sub(lo[i]).wrapping_sub(hi[i]);
        c[i + h] = c[i + h].wrapping_add(m);
    }
    c
}

/// Toom-3 with evaluation points {0, 1, -1, -2, inf} and Bodrato's interpolation.
fn toom3(a: &[u32], b: &[u32]) -> Vec<u32> {
    let n = a.len();
    let k = n / 3;
    let eval = |p: &[u32]| {
        let (p0, rest) = p.split_at(k);
        let (p1, p2) = rest.split_at(k);
        let mut e0 = Vec::with_capacity(k);
        let mut e1 = Vec::with_capacity(k);
        let mut em1 = Vec::with_capacity(k);
        let mut em2 = Vec::with_capacity(k);
        for i in 0..k {
            let s = p0[i].wrapping_add(p2[i]);
            e0.push(p0[i]);
            e1.push(s.wrapping_add(p1[i]));
            em1.push(s.wrapping_sub(p1[i]));
            em2.push(p0[i].wrapping_sub(p1[i] << 1).wrapping_add(p2[i] << 2));
        }
        [e0, e1, em1, em2, p2.to_vec()]
    };
    let ea = eval(a);
    let eb = eval(b);
    let w: Vec<Vec<u32>> = ea.iter().zip(eb.iter()).map(|(x, y)| fast(x, y)).collect();
    let (w0, w1, wm1, wm2, winf) = (&w[0], &w[1], &w[2], &w[3], &w[4]);

    let mut c = vec![0u32; 2 * n];
    for i in 0..2 * k {
        let r0 = w0[i];
        let r4 = winf[i];
        let mut r3 = wm2[i].wrapping_sub(w1[i]).wrapping_mul(INV3);
        let mut r1 = w1[i].wrapping_sub(wm1[i]) >> 1;
        let mut r2 = wm1[i].wrapping_sub(r0);
        r3 = (r2.wrapping_sub(r3) >> 1).wrapping_add(r4 << 1);
        r2 = r2.wrapping_add(r1).wrapping_sub(r4);
        r1 = r1.wrapping_sub(r3);
        for (slot, val) in [r0, r1, r2, r3, r4].into_iter().enumerate() {
            let idx = i + slot * k;
            c[idx] = c[idx].wrapping_add(val);
        }
    }
    c
}

/// Toom-4 with evaluation points {inf, 2, 1, -1, 1/2, -1/2, 0}, the latter two scaled by 8.
fn toom4(a: &[u32], b: &[u32]) -> Vec<u32> {
    let n = a.len();
    let k = n / 4;
    let eval = |p: &[u32]| {
        let mut out: [Vec<u32>; 7] = Default::default();
        for v in out.iter_mut() {
            v.reserve(k);
        }
        for j in 0..k {
            let (r0, r1, r2, r3) = (p[j], p[j + k], p[j + 2 * k], p[j + 3 * k]);
            let r4 = r0.wrapping_add(r2);
            let r5 = r1.wrapping_add(r3);
            out[2].push(r4.wrapping_add(r5));
            out[3].push(r4.wrapping_sub(r5));
            let r4 = ((r0 << 2).wrapping_add(r2)) << 1;
            let r5 = (r1 << 2).wrapping_add(r3);
            out[4].push(r4.wrapping_add(r5));
            out[5].push(r4.wrapping_sub(r5));
            out[1].push((r3 << 3).wrapping_add(r2 << 2).wrapping_add(r1 << 1).wrapping_add(r0));
            out[6].push(r0);
            out[0].push(r3);
        }
        out
    };
    let ea = eval(a);
    let eb = eval(b);
    let w: Vec<Vec<u32>> = ea.iter().zip(eb.iter()).map(|(x, y)| fast(x, y)).collect();

    let mut c = vec![0u32; 2 * n];
    for i in 0..2 * k {
        let r0 = w[0][i];
        let mut r1 = w[1][i];
        let mut r2 = w[2][i];
        let mut r3 = w[3][i];
        let mut r4 = w[4][i];
        let mut r5 = w[5][i];
        let r6 = w[6][i];

        r1 = r1.wrapping_add(r4);
        r5 = r5.wrapping_sub(r4);
        r3 = r3.wrapping_sub(r2) >> 1;
        r4 = r4.wrapping_sub(r0);
        r4 = r4.wrapping_sub(r6 << 6);
        r4 = (r4 << 1).wrapping_add(r5);
        r2 = r2.wrapping_add(r3);
        r1 = r1.wrapping_sub(r2 << 6).wrapping_sub(r2);
        r2 = r2.wrapping_sub(r6);
        r2 = r2.wrapping_sub(r0);
        r1 = r1.wrapping_add(r2.wrapping_mul(45));
        r4 = r4.wrapping_sub(r2 << 3).wrapping_mul(INV3) >> 3;
        r5 = r5.wrapping_add(r1);
        r1 = r1.wrapping_add(r3 << 4).wrapping_mul(INV9) >> 1;
        r3 = 0u32.wrapping_sub(r3.wrapping_add(r1));
        r5 = r1.wrapping_mul(30).wrapping_sub(r5).wrapping_mul(INV15) >> 2;
        r2 = r2.wrapping_sub(r4);
        r1 = r1.wrapping_sub(r5);

        for (slot, val) in [r6, r5, r4, r3, r2, r1, r0].into_iter().enumerate() {
            let idx = i + slot * k;
            c[idx] = c[idx].wrapping_add(val);
        }
    }
    c
}

/// Folds a full product of two degree-`< n` polynomials back into the ring.
pub fn reduce(full: &mut [u32], n: usize, reduction: Reduction) -> Vec<u32> {
    match reduction {
        Reduction::Negacyclic => {
            (0..n).map(|i| full[i].wrapping_sub(full.get(i + n).copied().unwrap_or(0))).collect()
        }
        Reduction::Trinomial => {
            // x^n = x^(n/2) - 1; walking downwards lets terms folded above n be folded again.
            let half = n / 2;
            for k in (n..full.len()).rev() {
                let c = full[k];
                if c != 0 {
                    full[k - half] = full[k - half].wrapping_add(c);
                    full[k - n] = full[k - n].wrapping_sub(c);
                    full[k] = 0;
                }
            }
            full[..n].to_vec()
        }
    }
}
