//! Known-answer files in the `count = / seed = / pk = / sk = / ct = / ss =` text layout.
//!
//! Every entry is derived from its 32-byte `seed`, and the seeds are derived from a master
//! seed, so a file can be regenerated and checked from scratch.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::keccak::shake128;
use crate::kem::{kem_decaps, kem_encaps_from_seed, kem_keygen_from_seeds, SecretKey};
use crate::masked::{masked_kem_decaps, MaskedSecretKey};
use crate::params::SchemeParams;
use crate::rng::RandomnessSource;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KatEntry {
    pub count: usize,
    pub seed: [u8; 32],
    pub pk: Vec<u8>,
    pub sk: Vec<u8>,
    pub ct: Vec<u8>,
    pub ss: Vec<u8>,
}

/// Seed of entry `i`: bytes `32i..32i+32` of `SHAKE-128(master)`.
pub fn entry_seeds(master: &[u8], count: usize) -> Vec<[u8; 32]> {
    shake128(master, 32 * count)
        .chunks(32)
        .map(|c| c.try_into().unwrap())
        .collect()
}

/// Derives one entry: the seed expands to `seed_A || seed_s || z || message seed`.
pub fn derive_entry(count: usize, seed: &[u8; 32], params: &SchemeParams) -> Result<KatEntry> {
    let x = shake128(seed, 128);
    let part = |i: usize| -> [u8; 32] { x[32 * i..32 * (i + 1)].try_into().unwrap() };
    let kp = kem_keygen_from_seeds(&part(0), &part(1), &part(2), params);
    let (ct, ss) = kem_encaps_from_seed(&kp.pk, &part(3), params)?;
    Ok(KatEntry {
        count,
        seed: *seed,
        pk: kp.pk.to_bytes(),
        sk: kp.sk.to_bytes(params),
        ct: ct.to_bytes(),
        ss: ss.to_vec(),
    })
}

pub fn generate(master: &[u8], count: usize, params: &SchemeParams) -> Result<Vec<KatEntry>> {
    entry_seeds(master, count)
        .iter()
        .enumerate()
        .map(|(i, s)| derive_entry(i, s, params))
        .collect()
}

pub fn format(entries: &[KatEntry], params: &SchemeParams) -> String {
    let mut out = format!("# {}\n\n", params.scheme);
    for e in entries {
        let _ = write!(
            out,
            "count = {}\nseed = {}\npk = {}\nsk = {}\nct = {}\nss = {}\n\n",
            e.count,
            hex::encode_upper(e.seed),
            hex::encode_upper(&e.pk),
            hex::encode_upper(&e.sk),
            hex::encode_upper(&e.ct),
            hex::encode_upper(&e.ss)
        );
    }
    out
}

pub fn parse(text: &str) -> Result<Vec<KatEntry>> {
    let mut entries = Vec::new();
    let mut fields: Vec<(String, String)> = Vec::new();
    let flush = |fields: &mut Vec<(String, String)>, entries: &mut Vec<KatEntry>| -> Result<()> {
        if fields.is_empty() {
            return Ok(());
        }
        let get = |k: &str| -> Result<&str> {
            fields
                .iter()
                .find(|(key, _)| key == k)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::Malformed(format!("missing field `{k}`")))
        };
        let bytes = |k: &str| -> Result<Vec<u8>> {
            hex::decode(get(k)?).map_err(|e| Error::Malformed(format!("field `{k}`: {e}")))
        };
        let count = get("count")?
            .parse()
            .map_err(|e| Error::Malformed(format!("field `count`: {e}")))?;
        let seed = bytes("seed")?
            .try_into()
            .map_err(|_| Error::Malformed("seed must be 32 bytes".into()))?;
        entries.push(KatEntry { count, seed, pk: bytes("pk")?, sk: bytes("sk")?, ct: bytes("ct")?, ss: bytes("ss")? });
        fields.clear();
        Ok(())
    };
    for line in text.lines() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            flush(&mut fields, &mut entries)?;
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Malformed(format!("expected `key = value`, got `{line}`")))?;
        fields.push((k.trim().to_string(), v.trim().to_string()));
    }
    flush(&mut fields, &mut entries)?;
    Ok(entries)
}

/// Re-derives the entry from its seed and checks every field, then decapsulates `ct` with
/// the unmasked key and, for `order >= 1`, with a masked key.
pub fn verify_entry(entry: &KatEntry, params: &SchemeParams, order: usize) -> Result<bool> {
    let expect = derive_entry(entry.count, &entry.seed, params)?;
    if expect != *entry {
        return Ok(false);
    }
    let sk = SecretKey::from_bytes(&entry.sk, params)?;
    let ss = if order == 0 {
        kem_decaps(&sk, &entry.ct, params)?
    } else {
        let mut rng = RandomnessSource::seeded(&entry.seed);
        let msk = MaskedSecretKey::import(&sk, params, order, &mut rng)?;
        masked_kem_decaps(&msk, &entry.ct, params, &mut rng)?
    };
    Ok(ss.as_slice() == entry.ss.as_slice())
}
