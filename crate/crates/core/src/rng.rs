//! Randomness sources for the masking gadgets, with per-component byte accounting.

use std::fmt;

use crate::error::{Error, Result};
use crate::keccak::Shake128Reader;
use crate::params::Scheme;

/// Which part of masked decapsulation a random byte was spent on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    DecryptionArithmetic,
    Compression,
    OriginalMsg,
    HashG,
    Xof,
    Cbd,
    EncryptionArithmetic,
    ArrangeMsg,
    Comparison,
    Other,
    /// Splitting a long-term key into shares; not part of a decapsulation.
    KeyImport,
    /// Draws made outside any pipeline stage (tests, ad-hoc sharing).
    Unlabeled,
}

impl Label {
    pub const ALL: [Label; 12] = [
        Label::DecryptionArithmetic,
        Label::Compression,
        Label::OriginalMsg,
        Label::HashG,
        Label::Xof,
        Label::Cbd,
        Label::EncryptionArithmetic,
        Label::ArrangeMsg,
        Label::Comparison,
        Label::Other,
        Label::KeyImport,
        Label::Unlabeled,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::DecryptionArithmetic => "decryption-polynomial-arithmetic",
            Label::Compression => "compression",
            Label::OriginalMsg => "original_msg",
            Label::HashG => "hash-g",
            Label::Xof => "xof",
            Label::Cbd => "cbd",
            Label::EncryptionArithmetic => "encryption-polynomial-arithmetic",
            Label::ArrangeMsg => "arrange_msg",
            Label::Comparison => "comparison",
            Label::Other => "other",
            Label::KeyImport => "key-import",
            Label::Unlabeled => "unlabeled",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Bytes drawn per label.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RandomnessLedger {
    counts: [u64; Label::ALL.len()],
}

impl RandomnessLedger {
    pub fn get(&self, label: Label) -> u64 {
        self.counts[label.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn charge(&mut self, label: Label, n: usize) {
        self.counts[label.index()] += n as u64;
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, u64)> + '_ {
        Label::ALL.iter().map(move |&l| (l, self.get(l)))
    }
}

enum Mode {
    Os,
    Seeded(Box<Shake128Reader>),
}

/// Source of the fresh randomness consumed by masking gadgets.
///
/// Draws are charged to the currently active [`Label`]. A single source is meant for one
/// pipeline at a time; concurrent pipelines should each own a source.
pub struct RandomnessSource {
    mode: Mode,
    ledger: RandomnessLedger,
    label: Label,
    failure: Option<String>,
}

impl RandomnessSource {
    /// Deterministic stream: SHAKE-128 of the seed.
    pub fn seeded(seed: &[u8; 32]) -> Self {
        RandomnessSource {
            mode: Mode::Seeded(Box::new(Shake128Reader::new(seed))),
            ledger: RandomnessLedger::default(),
            label: Label::Unlabeled,
            failure: None,
        }
    }

    /// Convenience for tests and benches.
    pub fn from_u64(seed: u64) -> Self {
        let mut s = [0u8; 32];
        s[..8].copy_from_slice(&seed.to_le_bytes());
        Self::seeded(&s)
    }

    /// Operating-system entropy.
    pub fn os() -> Self {
        RandomnessSource {
            mode: Mode::Os,
            ledger: RandomnessLedger::default(),
            label: Label::Unlabeled,
            failure: None,
        }
    }

    pub fn ledger(&self) -> &RandomnessLedger {
        &self.ledger
    }

    pub fn reset_ledger(&mut self) {
        self.ledger = RandomnessLedger::default();
    }

    pub fn label(&self) -> Label {
        self.label
    }

    /// Runs `f` with draws charged to `label`, restoring the previous label afterwards.
    pub fn scoped<T>(&mut self, label: Label, f: impl FnOnce(&mut Self) -> T) -> T {
        let prev = std::mem::replace(&mut self.label, label);
        let out = f(self);
        self.label = prev;
        out
    }

    /// Fills `out` and charges the bytes to `label`.
    pub fn random_bytes(&mut self, count: usize, label: Label) -> Result<Vec<u8>> {
        let mut out = vec![0u8; count];
        if count == 0 {
            return Ok(out);
        }
        self.fill_raw(&mut out)?;
        self.ledger.charge(label, count);
        Ok(out)
    }

    fn fill_raw(&mut self, out: &mut [u8]) -> Result<()> {
        match &mut self.mode {
            Mode::Seeded(reader) => {
                reader.read(out);
                Ok(())
            }
            Mode::Os => getrandom::getrandom(out).map_err(|e| Error::Entropy(e.to_string())),
        }
    }

    /// A uniformly random `width`-bit word, charged to the active label as `ceil(width/8)` bytes.
    ///
    /// Gadgets cannot propagate errors without obscuring their algebra, so an entropy failure
    /// is latched: the word is zero and [`RandomnessSource::check`] reports it afterwards.
    pub fn word(&mut self, width: u32) -> u64 {
        debug_assert!((1..=64).contains(&width));
        let nbytes = width.div_ceil(8) as usize;
        let mut buf = [0u8; 8];
        if let Err(e) = self.fill_raw(&mut buf[..nbytes]) {
            self.failure.get_or_insert(e.to_string());
            return 0;
        }
        self.ledger.charge(self.label, nbytes);
        let v = u64::from_le_bytes(buf);
        if width == 64 {
            v
        } else {
            v & ((1u64 << width) - 1)
        }
    }

    /// Reports an entropy failure that happened since the last check.
    pub fn check(&mut self) -> Result<()> {
        match self.failure.take() {
            Some(msg) => Err(Error::Entropy(msg)),
            None => Ok(()),
        }
    }
}

/// One row of a randomness report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub label: &'static str,
    pub bytes: u64,
}

/// Per-component randomness consumed by one masked decapsulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerReport {
    pub scheme: Scheme,
    pub order: usize,
    pub rows: Vec<ReportRow>,
}

/// Summarises a ledger in the row order of the decapsulation breakdown:
/// totals first, then each stage and its sub-components.
pub fn ledger_report(ledger: &RandomnessLedger, scheme: Scheme, order: usize) -> LedgerReport {
    use Label::*;
    let g = |l| ledger.get(l);
    let decryption = g(DecryptionArithmetic) + g(Compression) + g(OriginalMsg);
    let secret_gen = g(Xof) + g(Cbd);
    let encryption = secret_gen + g(EncryptionArithmetic) + g(ArrangeMsg) + g(Comparison);
    let total = decryption + g(HashG) + encryption + g(Other);
    let rows = vec![
        ("CCA-KEM-Decapsulation", total),
        ("CPA-PKE-Decryption", decryption),
        ("Decryption/Polynomial arithmetic", g(DecryptionArithmetic)),
        ("Decryption/Compression", g(Compression)),
        ("Decryption/original_msg", g(OriginalMsg)),
        ("Hash G (SHA3-512)", g(HashG)),
        ("CPA-PKE-Encryption", encryption),
        ("Encryption/Secret generation", secret_gen),
        ("Encryption/XOF (SHAKE-128)", g(Xof)),
        ("Encryption/CBD", g(Cbd)),
        ("Encryption/Polynomial arithmetic", g(EncryptionArithmetic)),
        ("Encryption/arrange_msg", g(ArrangeMsg)),
        ("Encryption/Polynomial Comparison", g(Comparison)),
        ("Other operations", g(Other)),
    ];
    LedgerReport {
        scheme,
        order,
        rows: rows.into_iter().map(|(label, bytes)| ReportRow { label, bytes }).collect(),
    }
}

impl LedgerReport {
    pub fn get(&self, label: &str) -> Option<u64> {
        self.rows.iter().find(|r| r.label == label).map(|r| r.bytes)
    }

    /// `scheme,order,label,bytes` with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("scheme,order,label,bytes\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{}\n", self.scheme, self.order, r.label, r.bytes));
        }
        s
    }
}
