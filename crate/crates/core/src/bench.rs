//! Host-side timing of unmasked and masked decapsulation.
//!
//! Ratios of masked to unmasked time are the reported quantity; absolute host timings are not
//! comparable with microcontroller cycle counts.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::kem::{ct_eq, derive_key, hash_g, kem_encaps_from_seed, kem_keygen_from_seeds, SecretKey};
use crate::masked::{masked_kem_decaps_timed, MaskedSecretKey, StageTimes};
use crate::params::{Scheme, SchemeParams};
use crate::pke::{arrange_msg, original_msg, pke_dec, pke_enc, Ciphertext};
use crate::rng::{Label, RandomnessSource};

pub const STAGES: [&str; 5] =
    ["CCA-KEM-Decapsulation", "CPA-PKE-Decryption", "Hash G (SHA3-512)", "CPA-PKE-Encryption", "Other operations"];
/// Reference masked/unmasked decapsulation factors for orders 1 to 3, measured on a Cortex-M4.
/// Published masked/unmasked decapsulation factors for orders 1 to 3 on a Cortex-M4.
pub fn reference_factor(scheme: Scheme, order: usize) -> Option<f64> {
    let row = match scheme {
        Scheme::Florete => [2.74, 5.07, 7.75],
        Scheme::Sable => [2.38, 4.26, 6.35],
        Scheme::Espada => [1.78, 2.82, 4.07],
    };
    order.checked_sub(1).and_then(|i| row.get(i).copied())
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageResult {
    pub stage: &'static str,
    pub mean_ns: f64,
    /// Mean time relative to the same stage of unmasked decapsulation.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchResult {
    pub scheme: Scheme,
    pub order: usize,
    pub stages: Vec<StageResult>,
}

impl BenchResult {
    pub fn total_ratio(&self) -> f64 {
        self.stages[0].ratio
    }
}

fn unmasked_timed(sk: &SecretKey, ct_bytes: &[u8], params: &SchemeParams) -> Result<[Duration; 5]> {
    let mut t = [Duration::ZERO; 5];
    let start = Instant::now();
    let ct = Ciphertext::from_bytes(ct_bytes, params)?;
    let m = original_msg(&pke_dec(&sk.s, &ct, params)?, params);
    t[1] = start.elapsed();
    let s = Instant::now();
    let (khat, r) = hash_g(&sk.pkh, &m);
    t[2] = s.elapsed();
    let s = Instant::now();
    let again = pke_enc(&sk.pk, &arrange_msg(&m, params), &r, params)?;
    let ok = ct_eq(&again.to_bytes(), ct_bytes);
    t[3] = s.elapsed();
    let s = Instant::now();
    std::hint::black_box(derive_key(if ok { &khat } else { &sk.z }, ct_bytes));
    t[4] = s.elapsed();
    t[0] = start.elapsed();
    Ok(t)
}

fn masked_stages(st: &StageTimes, total: Duration) -> [Duration; 5] {
    use Label::*;
    let sum = |ls: &[Label]| ls.iter().map(|&l| st.get(l)).sum();
    [
        total,
        sum(&[DecryptionArithmetic, Compression, OriginalMsg]),
        st.get(HashG),
        sum(&[Xof, Cbd, EncryptionArithmetic, ArrangeMsg, Comparison]),
        st.get(Other),
    ]
}

fn mean_ns(acc: &[Duration; 5], iters: usize) -> [f64; 5] {
    acc.map(|d| d.as_nanos() as f64 / iters as f64)
}

/// Times decapsulation at order 0 (unmasked) and at every listed order.
pub fn run_bench(scheme: Scheme, orders: &[usize], iters: usize) -> Result<Vec<BenchResult>> {
    if iters == 0 {
        return Err(Error::Malformed("iters must be at least 1".into()));
    }
    let params = scheme.params();
    let kp = kem_keygen_from_seeds(&[1; 32], &[2; 32], &[3; 32], params);
    let (ct, _) = kem_encaps_from_seed(&kp.pk, &[4; 32], params)?;
    let ct = ct.to_bytes();

    unmasked_timed(&kp.sk, &ct, params)?;
    let mut acc = [Duration::ZERO; 5];
    for _ in 0..iters {
        let t = unmasked_timed(&kp.sk, &ct, params)?;
        for (a, d) in acc.iter_mut().zip(t) {
            *a += d;
        }
    }
    let base = mean_ns(&acc, iters);
    let mut results = vec![BenchResult {
        scheme,
        order: 0,
        stages: STAGES
            .iter()
            .zip(base)
            .map(|(&stage, mean_ns)| StageResult { stage, mean_ns, ratio: 1.0 })
            .collect(),
    }];

    for &order in orders.iter().filter(|&&o| o > 0) {
        let mut rng = RandomnessSource::from_u64(order as u64);
        let msk = MaskedSecretKey::import(&kp.sk, params, order, &mut rng)?;
        masked_kem_decaps_timed(&msk, &ct, params, &mut rng, None)?;
        let mut acc = [Duration::ZERO; 5];
        for _ in 0..iters {
            let mut st = StageTimes::default();
            let start = Instant::now();
            masked_kem_decaps_timed(&msk, &ct, params, &mut rng, Some(&mut st))?;
            let t = masked_stages(&st, start.elapsed());
            for (a, d) in acc.iter_mut().zip(t) {
                *a += d;
            }
        }
        let means = mean_ns(&acc, iters);
        results.push(BenchResult {
            scheme,
            order,
            stages: STAGES
                .iter()
                .zip(means.iter().zip(base))
                .map(|(&stage, (&m, b))| StageResult { stage, mean_ns: m, ratio: if b > 0.0 { m / b } else { f64::NAN } })
                .collect(),
        });
    }
    Ok(results)
}

/// `scheme,order,stage,mean_ns,ratio` with a header line.
pub fn to_csv(results: &[BenchResult]) -> String {
    let mut s = String::from("scheme,order,stage,mean_ns,ratio\n");
    for r in results {
        for st in &r.stages {
            let _ = writeln!(s, "{},{},{},{:.0},{:.3}", r.scheme, r.order, st.stage, st.mean_ns, st.ratio);
        }
    }
    s
}

/// Human-readable summary with the reference factors next to the measured ones.
pub fn summary(results: &[BenchResult]) -> String {
    let mut s = String::from("host wall-clock ratios (not comparable with Cortex-M4 cycle counts)\n");
    let _ = writeln!(s, "{:<8} {:>5} {:>14} {:>10} {:>10}", "scheme", "order", "decaps_ns", "measured", "reference");
    for r in results {
        let reference = reference_factor(r.scheme, r.order).map_or("-".to_string(), |f| format!("{f:.2}x"));
        let _ = writeln!(
            s,
            "{:<8} {:>5} {:>14.0} {:>9.2}x {:>10}",
            r.scheme.name(),
            r.order,
            r.stages[0].mean_ns,
            r.total_ratio(),
            reference
        );
    }
    s
}
