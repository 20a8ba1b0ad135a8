//! Boolean and arithmetic sharings and the share-wise linear maps on them.
//!
//! `recombine` reveals the secret. It exists for test oracles, the CLI and the final public
//! outputs of decapsulation; masked computations never call it on intermediate values.

use crate::error::{Error, Result};
use crate::rng::RandomnessSource;

#[inline]
fn mask64(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 {
        Err(Error::InvalidOrder(order))
    } else {
        Ok(())
    }
}

/// A `width`-bit value split as `x = x_0 ^ x_1 ^ ... ^ x_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanShares {
    shares: Vec<u64>,
    width: u32,
}

impl BooleanShares {
    /// Shares `x`: the first `order` shares are fresh random words, the last one fixes the XOR.
    pub fn share(x: u64, width: u32, order: usize, rng: &mut RandomnessSource) -> Result<Self> {
        check_order(order)?;
        let m = mask64(width);
        let mut shares = Vec::with_capacity(order + 1);
        let mut last = x & m;
        for _ in 0..order {
            let r = rng.word(width);
            last ^= r;
            shares.push(r);
        }
        shares.push(last);
        Ok(BooleanShares { shares, width })
    }

    pub fn from_shares(shares: Vec<u64>, width: u32) -> Self {
        let m = mask64(width);
        BooleanShares { shares: shares.into_iter().map(|s| s & m).collect(), width }
    }

    /// A sharing of a public constant: `c` in share 0, zeros elsewhere.
    pub fn public(c: u64, width: u32, n_shares: usize) -> Self {
        let mut shares = vec![0u64; n_shares];
        shares[0] = c & mask64(width);
        BooleanShares { shares, width }
    }

    pub fn recombine(&self) -> u64 {
        self.shares.iter().fold(0, |a, s| a ^ s)
    }

    pub fn shares(&self) -> &[u64] {
        &self.shares
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn n_shares(&self) -> usize {
        self.shares.len()
    }

    pub fn order(&self) -> usize {
        self.shares.len() - 1
    }

    pub fn map(&self, width: u32, f: impl Fn(u64) -> u64) -> BooleanShares {
        let m = mask64(width);
        BooleanShares { shares: self.shares.iter().map(|&s| f(s) & m).collect(), width }
    }

    pub fn xor(&self, other: &BooleanShares) -> BooleanShares {
        debug_assert_eq!(self.n_shares(), other.n_shares());
        let width = self.width.max(other.width);
        BooleanShares {
            shares: self.shares.iter().zip(&other.shares).map(|(a, b)| a ^ b).collect(),
            width,
        }
    }

    /// Logical right shift; the width shrinks by `k`.
    pub fn shift_right(&self, k: u32) -> BooleanShares {
        assert!(k < self.width, "shift amount must be below the width");
        self.map(self.width - k, |s| s >> k)
    }

    /// Left shift, truncated to the current width.
    pub fn shift_left(&self, k: u32) -> BooleanShares {
        self.map(self.width, |s| if k >= 64 { 0 } else { s << k })
    }

    /// Zero-extends or truncates every share to `width` bits.
    pub fn with_width(&self, width: u32) -> BooleanShares {
        self.map(width, |s| s)
    }

    /// The one-bit sharing of bit `i`.
    pub fn bit(&self, i: u32) -> BooleanShares {
        self.map(1, |s| s >> i)
    }

    /// `x ^ c`, applied to the share at `index`.
    pub fn xor_public(&mut self, c: u64, index: usize) {
        self.shares[index] ^= c & mask64(self.width);
    }

    /// `!x` within the width, applied to share 0.
    pub fn not_share0(&mut self) {
        self.shares[0] ^= mask64(self.width);
    }

    /// Per-share bitwise AND with a public mask.
    pub fn and_public(&self, c: u64) -> BooleanShares {
        self.map(self.width, |s| s & c)
    }

    pub(crate) fn shares_mut(&mut self) -> &mut [u64] {
        &mut self.shares
    }
}

/// A value of `Z_{2^width}` split as `x = x_0 + x_1 + ... + x_t mod 2^width`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArithShares {
    shares: Vec<u64>,
    width: u32,
}

impl ArithShares {
    pub fn share(x: u64, width: u32, order: usize, rng: &mut RandomnessSource) -> Result<Self> {
        check_order(order)?;
        let m = mask64(width);
        let mut shares = Vec::with_capacity(order + 1);
        let mut last = x & m;
        for _ in 0..order {
            let r = rng.word(width);
            last = last.wrapping_sub(r) & m;
            shares.push(r);
        }
        shares.push(last);
        Ok(ArithShares { shares, width })
    }

    pub fn from_shares(shares: Vec<u64>, width: u32) -> Self {
        let m = mask64(width);
        ArithShares { shares: shares.into_iter().map(|s| s & m).collect(), width }
    }

    pub fn recombine(&self) -> u64 {
        self.shares.iter().fold(0u64, |a, s| a.wrapping_add(*s)) & mask64(self.width)
    }

    pub fn shares(&self) -> &[u64] {
        &self.shares
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn n_shares(&self) -> usize {
        self.shares.len()
    }

    pub fn order(&self) -> usize {
        self.shares.len() - 1
    }

    /// `x + c mod 2^width`, applied to the share at `index`.
    pub fn add_const(&mut self, c: u64, index: usize) {
        let m = mask64(self.width);
        self.shares[index] = self.shares[index].wrapping_add(c) & m;
    }

    /// `x - c mod 2^width`, applied to the share at `index`.
    pub fn sub_const(&mut self, c: u64, index: usize) {
        let m = mask64(self.width);
        self.shares[index] = self.shares[index].wrapping_sub(c) & m;
    }

    pub fn sub(&self, other: &ArithShares) -> ArithShares {
        debug_assert_eq!(self.width, other.width);
        let m = mask64(self.width);
        ArithShares {
            shares: self.shares.iter().zip(&other.shares).map(|(a, b)| a.wrapping_sub(*b) & m).collect(),
            width: self.width,
        }
    }

    /// Reduces every share modulo `2^width`. Exact only when narrowing.
    pub fn reduce(&self, width: u32) -> ArithShares {
        debug_assert!(width <= self.width);
        ArithShares::from_shares(self.shares.clone(), width)
    }
}

/// A byte string split into XOR shares, one byte string per share.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskedBytes {
    shares: Vec<Vec<u8>>,
}

impl MaskedBytes {
    pub fn share(data: &[u8], order: usize, rng: &mut RandomnessSource) -> Result<Self> {
        check_order(order)?;
        let mut last = data.to_vec();
        let mut shares = Vec::with_capacity(order + 1);
        for _ in 0..order {
            let r: Vec<u8> = (0..data.len()).map(|_| rng.word(8) as u8).collect();
            for (l, b) in last.iter_mut().zip(&r) {
                *l ^= b;
            }
            shares.push(r);
        }
        shares.push(last);
        Ok(MaskedBytes { shares })
    }

    pub fn from_shares(shares: Vec<Vec<u8>>) -> Self {
        debug_assert!(shares.windows(2).all(|w| w[0].len() == w[1].len()));
        MaskedBytes { shares }
    }

    pub fn recombine(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len()];
        for s in &self.shares {
            for (o, b) in out.iter_mut().zip(s) {
                *o ^= b;
            }
        }
        out
    }

    pub fn shares(&self) -> &[Vec<u8>] {
        &self.shares
    }

    pub fn n_shares(&self) -> usize {
        self.shares.len()
    }

    pub fn len(&self) -> usize {
        self.shares.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> MaskedBytes {
        MaskedBytes { shares: self.shares.iter().map(|s| s[range.clone()].to_vec()).collect() }
    }

    /// Share-wise extraction of the `width`-bit field starting at stream bit `offset`.
    pub fn bits(&self, offset: usize, width: u32) -> BooleanShares {
        let shares = self
            .shares
            .iter()
            .map(|s| {
                let mut v = 0u64;
                for k in 0..width as usize {
                    v |= (crate::pack::get_bit(s, offset + k) as u64) << k;
                }
                v
            })
            .collect();
        BooleanShares { shares, width }
    }
}
