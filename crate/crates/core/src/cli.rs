//! Command-line front end. [`run`] returns the process exit code: 0 on success, 1 when a
//! verification or operation fails, 2 on a usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bench;
use crate::error::Error;
use crate::kat;
use crate::keccak::shake128;
use crate::kem::{kem_decaps, kem_encaps_from_seed, kem_keygen_from_seeds, SecretKey};
use crate::masked::{masked_kem_decaps, MaskedSecretKey};
use crate::params::Scheme;
use crate::pke::PublicKey;
use crate::rng::{ledger_report, RandomnessSource};

#[derive(Parser, Debug)]
#[command(name = "scabbard", version, about = "LWR key encapsulation with masked decapsulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SchemeArg {
    /// florete, espada or sable
    #[arg(long)]
    scheme: Scheme,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a key pair and write `pk = ` / `sk = ` lines.
    Keygen {
        #[command(flatten)]
        scheme: SchemeArg,
        /// Hex seed for deterministic output; OS entropy otherwise.
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encapsulate to the `pk` found in the input file and write `ct = ` / `ss = ` lines.
    Encaps {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decapsulate the `ct` with the `sk` found in the input files and write `ss = `.
    Decaps {
        #[command(flatten)]
        scheme: SchemeArg,
        /// May be repeated; fields of all files are merged.
        #[arg(long = "in", required = true)]
        input: Vec<PathBuf>,
        /// Masking order; 0 runs the unmasked reference.
        #[arg(long, default_value_t = 0)]
        order: usize,
        /// Block to use when the input holds several `count = ` entries.
        #[arg(long)]
        count: Option<usize>,
        /// Hex seed for the masking randomness; OS entropy otherwise.
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate or verify a known-answer file.
    Kat {
        #[command(subcommand)]
        action: KatAction,
    },
    /// Time unmasked and masked decapsulation.
    Bench {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        orders: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        iters: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Randomness consumed per component by one masked decapsulation.
    RandReport {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(long)]
        seed: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum KatAction {
    Gen {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Accepted for symmetry with `verify`; generation does not depend on it.
        #[arg(long, default_value_t = 0)]
        order: usize,
        #[arg(long)]
        file: PathBuf,
        /// Hex master seed; defaults to the scheme name.
        #[arg(long)]
        seed: Option<String>,
    },
    Verify {
        #[command(flatten)]
        scheme: SchemeArg,
        /// Verify only the first N entries.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 0)]
        order: usize,
        #[arg(long)]
        file: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Failed(e.to_string())
    }
}

type CliResult = std::result::Result<(), Failure>;

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Failed(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn decode_seed(seed: &str) -> std::result::Result<Vec<u8>, Failure> {
    hex::decode(seed).map_err(|e| Failure::Usage(format!("--seed must be hex: {e}")))
}

/// `SHAKE-128(seed)` truncated to `len`, or OS entropy without a seed.
fn seed_material(seed: &Option<String>, len: usize) -> std::result::Result<Vec<u8>, Failure> {
    match seed {
        Some(s) => Ok(shake128(&decode_seed(s)?, len)),
        None => Ok(RandomnessSource::os().random_bytes(len, crate::rng::Label::Unlabeled)?),
    }
}

fn rng_from(seed: &Option<String>) -> std::result::Result<RandomnessSource, Failure> {
    Ok(match seed {
        Some(s) => RandomnessSource::seeded(&shake128(&decode_seed(s)?, 32).try_into().unwrap()),
        None => RandomnessSource::os(),
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Failed(format!("{}: {e}", p.display()))),
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn read(path: &PathBuf) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Failed(format!("{}: {e}", path.display())))
}

/// `key = value` lines grouped into blank-line separated blocks.
fn blocks(text: &str) -> Vec<Vec<(String, String)>> {
    let mut out = vec![Vec::new()];
    for line in text.lines().map(str::trim) {
        if line.is_empty() {
            if !out.last().unwrap().is_empty() {
                out.push(Vec::new());
            }
        } else if let Some((k, v)) = line.split_once('=') {
            if !line.starts_with('#') {
                out.last_mut().unwrap().push((k.trim().to_string(), v.trim().to_string()));
            }
        }
    }
    out.retain(|b| !b.is_empty());
    out
}

fn field(fields: &[(String, String)], key: &str) -> std::result::Result<Vec<u8>, Failure> {
    let v = fields
        .iter()
        .find(|(k, _)| k == key)
        .ok_or_else(|| Failure::Failed(format!("input has no `{key}` field")))?;
    hex::decode(&v.1).map_err(|e| Failure::Failed(format!("field `{key}`: {e}")))
}

fn select_fields(texts: &[String], count: Option<usize>) -> Vec<(String, String)> {
    let mut merged = Vec::new();
    for t in texts {
        let bs = blocks(t);
        let chosen = match count {
            Some(n) => bs
                .iter()
                .find(|b| b.iter().any(|(k, v)| k == "count" && v.parse() == Ok(n)))
                .cloned()
                .unwrap_or_default(),
            None => bs.into_iter().next().unwrap_or_default(),
        };
        merged.extend(chosen);
    }
    merged
}

fn dispatch(cmd: Command) -> CliResult {
    match cmd {
        Command::Keygen { scheme, seed, out } => {
            let p = scheme.scheme.params();
            let s = seed_material(&seed, 96)?;
            let part = |i: usize| -> [u8; 32] { s[32 * i..32 * (i + 1)].try_into().unwrap() };
            let kp = kem_keygen_from_seeds(&part(0), &part(1), &part(2), p);
            let text = format!(
                "pk = {}\nsk = {}\n",
                hex::encode_upper(kp.pk.to_bytes()),
                hex::encode_upper(kp.sk.to_bytes(p))
            );
            emit(&out, &text)
        }
        Command::Encaps { scheme, input, seed, out } => {
            let p = scheme.scheme.params();
            let fields = select_fields(&[read(&input)?], None);
            let pk = PublicKey::from_bytes(&field(&fields, "pk")?, p)?;
            let m: [u8; 32] = seed_material(&seed, 32)?.try_into().unwrap();
            let (ct, ss) = kem_encaps_from_seed(&pk, &m, p)?;
            let text = format!("ct = {}\nss = {}\n", hex::encode_upper(ct.to_bytes()), hex::encode_upper(ss));
            emit(&out, &text)
        }
        Command::Decaps { scheme, input, order, count, seed, out } => {
            let p = scheme.scheme.params();
            let texts = input.iter().map(read).collect::<std::result::Result<Vec<_>, _>>()?;
            let fields = select_fields(&texts, count);
            let sk = SecretKey::from_bytes(&field(&fields, "sk")?, p)?;
            let ct = field(&fields, "ct")?;
            let ss = if order == 0 {
                kem_decaps(&sk, &ct, p)?
            } else {
                let mut rng = rng_from(&seed)?;
                let msk = MaskedSecretKey::import(&sk, p, order, &mut rng)?;
                masked_kem_decaps(&msk, &ct, p, &mut rng)?
            };
            emit(&out, &format!("ss = {}\n", hex::encode_upper(ss)))
        }
        Command::Kat { action: KatAction::Gen { scheme, count, order: _, file, seed } } => {
            let p = scheme.scheme.params();
            let master = match &seed {
                Some(s) => decode_seed(s)?,
                None => scheme.scheme.name().as_bytes().to_vec(),
            };
            let entries = kat::generate(&master, count, p)?;
            emit(&Some(file), &kat::format(&entries, p))
        }
        Command::Kat { action: KatAction::Verify { scheme, count, order, file } } => {
            let p = scheme.scheme.params();
            let mut entries = kat::parse(&read(&file)?)?;
            if let Some(n) = count {
                entries.truncate(n);
            }
            if entries.is_empty() {
                return Err(Failure::Failed("no entries to verify".into()));
            }
            let mut bad = Vec::new();
            for e in &entries {
                if !kat::verify_entry(e, p, order).unwrap_or(false) {
                    bad.push(e.count);
                }
            }
            if bad.is_empty() {
                println!("{} entries verified ({} order {order})", entries.len(), scheme.scheme);
                Ok(())
            } else {
                Err(Failure::Failed(format!("entries failed verification: {bad:?}")))
            }
        }
        Command::Bench { scheme, orders, iters, csv } => {
            if iters == 0 {
                return Err(Failure::Usage("--iters must be at least 1".into()));
            }
            let results = bench::run_bench(scheme.scheme, &orders, iters)?;
            print!("{}", bench::summary(&results));
            match csv {
                Some(path) => emit(&Some(path), &bench::to_csv(&results)),
                None => emit(&None, &bench::to_csv(&results)),
            }
        }
        Command::RandReport { scheme, order, seed } => {
            if order == 0 {
                return Err(Failure::Usage("--order must be at least 1".into()));
            }
            let p = scheme.scheme.params();
            let kp = kem_keygen_from_seeds(&[1; 32], &[2; 32], &[3; 32], p);
            let (ct, _) = kem_encaps_from_seed(&kp.pk, &[4; 32], p)?;
            let mut rng = match &seed {
                Some(_) => rng_from(&seed)?,
                None => RandomnessSource::from_u64(0),
            };
            let msk = MaskedSecretKey::import(&kp.sk, p, order, &mut rng)?;
            rng.reset_ledger();
            masked_kem_decaps(&msk, &ct.to_bytes(), p, &mut rng)?;
            emit(&None, &ledger_report(rng.ledger(), scheme.scheme, order).to_csv())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["scabbard", "keygen", "--scheme", "kyber"]), 2);
        assert_eq!(run(["scabbard", "frobnicate"]), 2);
        assert_eq!(run(["scabbard", "keygen", "--scheme", "sable", "--bogus"]), 2);
        assert_eq!(run(["scabbard", "keygen", "--scheme", "sable", "--seed", "xyz"]), 2);
        assert_eq!(run(["scabbard", "rand-report", "--scheme", "sable", "--order", "0"]), 2);
    }

    #[test]
    fn help_exits_0() {
        assert_eq!(run(["scabbard", "--help"]), 0);
    }

    #[test]
    fn block_selection() {
        let text = "# x\n\ncount = 0\nsk = 00\n\ncount = 1\nsk = 11\n".to_string();
        let f = select_fields(std::slice::from_ref(&text), Some(1));
        assert_eq!(field(&f, "sk").ok(), Some(vec![0x11]));
        let f = select_fields(&[text], None);
        assert_eq!(field(&f, "sk").ok(), Some(vec![0x00]));
    }
}
