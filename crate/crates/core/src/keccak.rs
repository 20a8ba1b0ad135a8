//! Keccak-f[1600], the FIPS-202 wrappers built on it, and a Boolean-masked variant.
//!
//! The masked permutation applies theta, rho, pi and iota share by share (iota only to share 0)
//! and computes chi with one `sec_and` per lane.

use crate::gadgets::sec_and;
use crate::rng::RandomnessSource;
use crate::shares::{BooleanShares, MaskedBytes};

pub const SHA3_256_RATE: usize = 136;
pub const SHA3_512_RATE: usize = 72;
pub const SHAKE128_RATE: usize = 168;

const SHA3_SUFFIX: u8 = 0x06;
const SHAKE_SUFFIX: u8 = 0x1f;

const RC: [u64; 24] = [
    0x0000_0000_0000_0001,
    0x0000_0000_0000_8082,
    0x8000_0000_0000_808a,
    0x8000_0000_8000_8000,
    0x0000_0000_0000_808b,
    0x0000_0000_8000_0001,
    0x8000_0000_8000_8081,
    0x8000_0000_0000_8009,
    0x0000_0000_0000_008a,
    0x0000_0000_0000_0088,
    0x0000_0000_8000_8009,
    0x0000_0000_8000_000a,
    0x0000_0000_8000_808b,
    0x8000_0000_0000_008b,
    0x8000_0000_0000_8089,
    0x8000_0000_0000_8003,
    0x8000_0000_0000_8002,
    0x8000_0000_0000_0080,
    0x0000_0000_0000_800a,
    0x8000_0000_8000_000a,
    0x8000_0000_8000_8081,
    0x8000_0000_0000_8080,
    0x0000_0000_8000_0001,
    0x8000_0000_8000_8008,
];

// Rotation offsets indexed by lane x + 5y.
const RHO: [u32; 25] =
    [0, 1, 62, 28, 27, 36, 44, 6, 55, 20, 3, 10, 43, 25, 39, 41, 45, 15, 21, 8, 18, 2, 61, 56, 14];

/// 25 lanes of 64 bits, lane `(x, y)` at index `x + 5y`.
pub type KeccakState = [u64; 25];

#[inline]
fn theta_rho_pi(a: &KeccakState) -> KeccakState {
    let mut c = [0u64; 5];
    for x in 0..5 {
        c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
    }
    let mut b = [0u64; 25];
    for x in 0..5 {
        let d = c[(x + 4) % 5] ^ c[(x + 1) % 5].rotate_left(1);
        for y in 0..5 {
            let idx = x + 5 * y;
            // pi: (x, y) -> (y, 2x + 3y)
            let dst = y + 5 * ((2 * x + 3 * y) % 5);
            b[dst] = (a[idx] ^ d).rotate_left(RHO[idx]);
        }
    }
    b
}

/// The linear part of one round (theta, rho, pi) followed by iota when `round` is given.
pub fn linear_layer(a: &KeccakState, round: Option<usize>) -> KeccakState {
    let mut b = theta_rho_pi(a);
    if let Some(r) = round {
        b[0] ^= RC[r];
    }
    b
}

pub fn keccak_f1600(state: &mut KeccakState) {
    for rc in RC {
        let b = theta_rho_pi(state);
        for y in 0..5 {
            for x in 0..5 {
                state[x + 5 * y] = b[x + 5 * y] ^ (!b[(x + 1) % 5 + 5 * y] & b[(x + 2) % 5 + 5 * y]);
            }
        }
        state[0] ^= rc;
    }
}

fn xor_block(state: &mut KeccakState, block: &[u8]) {
    for (i, chunk) in block.chunks(8).enumerate() {
        let mut lane = [0u8; 8];
        lane[..chunk.len()].copy_from_slice(chunk);
        state[i] ^= u64::from_le_bytes(lane);
    }
}

fn extract(state: &KeccakState, out: &mut [u8]) {
    for (i, chunk) in out.chunks_mut(8).enumerate() {
        chunk.copy_from_slice(&state[i].to_le_bytes()[..chunk.len()]);
    }
}

/// Pads `msg` with the domain suffix and the final bit to a whole number of blocks.
fn pad(msg: &[u8], rate: usize, suffix: u8) -> Vec<u8> {
    let mut buf = msg.to_vec();
    buf.push(suffix);
    while buf.len() % rate != 0 {
        buf.push(0);
    }
    let last = buf.len() - 1;
    buf[last] |= 0x80;
    buf
}

fn sponge(msg: &[u8], rate: usize, suffix: u8, outlen: usize) -> Vec<u8> {
    let mut st = [0u64; 25];
    for block in pad(msg, rate, suffix).chunks(rate) {
        xor_block(&mut st, block);
        keccak_f1600(&mut st);
    }
    let mut out = vec![0u8; outlen];
    for (i, chunk) in out.chunks_mut(rate).enumerate() {
        if i > 0 {
            keccak_f1600(&mut st);
        }
        extract(&st, chunk);
    }
    out
}

pub fn sha3_256(msg: &[u8]) -> [u8; 32] {
    sponge(msg, SHA3_256_RATE, SHA3_SUFFIX, 32).try_into().unwrap()
}

pub fn sha3_512(msg: &[u8]) -> [u8; 64] {
    sponge(msg, SHA3_512_RATE, SHA3_SUFFIX, 64).try_into().unwrap()
}

pub fn shake128(msg: &[u8], outlen: usize) -> Vec<u8> {
    sponge(msg, SHAKE128_RATE, SHAKE_SUFFIX, outlen)
}

/// Incremental SHAKE-128 output stream.
#[derive(Clone)]
pub struct Shake128Reader {
    state: KeccakState,
    buf: [u8; SHAKE128_RATE],
    pos: usize,
}

impl Shake128Reader {
    pub fn new(msg: &[u8]) -> Self {
        let mut state = [0u64; 25];
        for block in pad(msg, SHAKE128_RATE, SHAKE_SUFFIX).chunks(SHAKE128_RATE) {
            xor_block(&mut state, block);
            keccak_f1600(&mut state);
        }
        let mut buf = [0u8; SHAKE128_RATE];
        extract(&state, &mut buf);
        Shake128Reader { state, buf, pos: 0 }
    }

    pub fn read(&mut self, out: &mut [u8]) {
        let mut done = 0;
        while done < out.len() {
            if self.pos == SHAKE128_RATE {
                keccak_f1600(&mut self.state);
                extract(&self.state, &mut self.buf);
                self.pos = 0;
            }
            let take = (SHAKE128_RATE - self.pos).min(out.len() - done);
            out[done..done + take].copy_from_slice(&self.buf[self.pos..self.pos + take]);
            self.pos += take;
            done += take;
        }
    }
}

/// A Keccak state split into XOR shares.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskedKeccakState {
    pub shares: Vec<KeccakState>,
}

impl MaskedKeccakState {
    pub fn zero(n_shares: usize) -> Self {
        MaskedKeccakState { shares: vec![[0u64; 25]; n_shares] }
    }

    pub fn recombine(&self) -> KeccakState {
        let mut out = [0u64; 25];
        for s in &self.shares {
            for (o, l) in out.iter_mut().zip(s) {
                *o ^= l;
            }
        }
        out
    }
}

pub fn masked_keccak_f1600(m: &mut MaskedKeccakState, rng: &mut RandomnessSource) {
    let n = m.shares.len();
    for rc in RC {
        let b: Vec<KeccakState> = m.shares.iter().map(theta_rho_pi).collect();
        for y in 0..5 {
            for x in 0..5 {
                let idx = x + 5 * y;
                let lane = |k: usize| -> BooleanShares {
                    BooleanShares::from_shares(b.iter().map(|s| s[k]).collect(), 64)
                };
                let mut not_next = lane((x + 1) % 5 + 5 * y);
                not_next.not_share0();
                let t = sec_and(&not_next, &lane((x + 2) % 5 + 5 * y), rng);
                for i in 0..n {
                    m.shares[i][idx] = b[i][idx] ^ t.shares()[i];
                }
            }
        }
        m.shares[0][0] ^= rc;
    }
}

/// Masked sponge over `public || secret`. The public prefix and all padding go into share 0;
/// every share of the secret part is absorbed into its own state share.
fn masked_sponge(
    public_prefix: &[u8],
    secret: &MaskedBytes,
    rate: usize,
    suffix: u8,
    outlen: usize,
    rng: &mut RandomnessSource,
) -> MaskedBytes {
    let n = secret.n_shares();
    let total = public_prefix.len() + secret.len();
    let mut share_msgs: Vec<Vec<u8>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut buf = Vec::with_capacity(total + rate);
        if i == 0 {
            buf.extend_from_slice(public_prefix);
        } else {
            buf.resize(public_prefix.len(), 0);
        }
        buf.extend_from_slice(&secret.shares()[i]);
        if i == 0 {
            buf = pad(&buf, rate, suffix);
        } else {
            let padded = pad(&buf, rate, suffix).len();
            buf.resize(padded, 0);
        }
        share_msgs.push(buf);
    }

    let mut st = MaskedKeccakState::zero(n);
    let blocks = share_msgs[0].len() / rate;
    for blk in 0..blocks {
        for (s, msg) in st.shares.iter_mut().zip(&share_msgs) {
            xor_block(s, &msg[blk * rate..(blk + 1) * rate]);
        }
        masked_keccak_f1600(&mut st, rng);
    }

    let mut out = vec![vec![0u8; outlen]; n];
    let mut done = 0;
    let mut first = true;
    while done < outlen {
        if !first {
            masked_keccak_f1600(&mut st, rng);
        }
        first = false;
        let take = rate.min(outlen - done);
        for (o, s) in out.iter_mut().zip(&st.shares) {
            extract(s, &mut o[done..done + take]);
        }
        done += take;
    }
    MaskedBytes::from_shares(out)
}

/// `SHA3-512(public_prefix || secret)` with the secret and the digest Boolean-masked.
pub fn masked_sha3_512(
    secret: &MaskedBytes,
    public_prefix: &[u8],
    rng: &mut RandomnessSource,
) -> MaskedBytes {
    masked_sponge(public_prefix, secret, SHA3_512_RATE, SHA3_SUFFIX, 64, rng)
}

pub fn masked_shake128(seed: &MaskedBytes, outlen: usize, rng: &mut RandomnessSource) -> MaskedBytes {
    masked_sponge(&[], seed, SHAKE128_RATE, SHAKE_SUFFIX, outlen, rng)
}
