use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scabbard(args: &[&str], paths: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_scabbard"));
    cmd.args(args);
    for (flag, p) in paths {
        cmd.arg(flag).arg(p);
    }
    cmd.output().unwrap()
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("scabbard-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn kat_generate_then_verify() {
    let dir = workdir("kat");
    let file = dir.join("kat.txt");
    for scheme in ["florete", "espada", "sable"] {
        let gen = scabbard(&["kat", "gen", "--scheme", scheme, "--count", "3"], &[("--file", &file)]);
        assert!(gen.status.success());
        let verify = scabbard(&["kat", "verify", "--scheme", scheme, "--order", "2"], &[("--file", &file)]);
        assert_eq!(verify.status.code(), Some(0), "{}", String::from_utf8_lossy(&verify.stderr));
    }
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn corrupted_kat_fails_verification() {
    let dir = workdir("corrupt");
    let file = dir.join("kat.txt");
    assert!(scabbard(&["kat", "gen", "--scheme", "sable", "--count", "2"], &[("--file", &file)]).status.success());
    let text = std::fs::read_to_string(&file).unwrap();
    let line = text.lines().find(|l| l.starts_with("ss = ")).unwrap();
    let last = if line.ends_with('0') { '1' } else { '0' };
    let bad = text.replacen(line, &format!("{}{last}", &line[..line.len() - 1]), 1);
    std::fs::write(&file, bad).unwrap();
    let verify = scabbard(&["kat", "verify", "--scheme", "sable"], &[("--file", &file)]);
    assert_eq!(verify.status.code(), Some(1));
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn keygen_encaps_decaps_agree_masked_and_unmasked() {
    let dir = workdir("flow");
    let keys = dir.join("keys.txt");
    let enc = dir.join("enc.txt");
    assert!(scabbard(&["keygen", "--scheme", "espada", "--seed", "0a0b"], &[("--out", &keys)]).status.success());
    assert!(scabbard(&["encaps", "--scheme", "espada", "--seed", "0c"], &[("--in", &keys), ("--out", &enc)])
        .status
        .success());
    let expected = std::fs::read_to_string(&enc).unwrap().lines().find(|l| l.starts_with("ss = ")).unwrap().to_string();
    for order in ["0", "2"] {
        let out = scabbard(&["decaps", "--scheme", "espada", "--order", order], &[("--in", &keys), ("--in", &enc)]);
        assert!(out.status.success());
        assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), expected);
    }
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn bench_csv_has_one_row_per_order_and_stage() {
    let dir = workdir("bench");
    let csv = dir.join("bench.csv");
    let out = scabbard(&["bench", "--scheme", "sable", "--orders", "1,2", "--iters", "1"], &[("--csv", &csv)]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "scheme,order,stage,mean_ns,ratio");
    assert_eq!(lines.len(), 1 + 3 * scabbard::bench::STAGES.len());
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(scabbard(&["keygen"], &[]).status.code(), Some(2));
    assert_eq!(scabbard(&["keygen", "--scheme", "rapier"], &[]).status.code(), Some(2));
    assert_eq!(scabbard(&["rand-report", "--scheme", "sable", "--order", "0"], &[]).status.code(), Some(2));
    assert_eq!(scabbard(&["keygen", "--scheme", "sable", "--seed", "xyz"], &[]).status.code(), Some(2));
}

#[test]
fn rand_report_lists_components() {
    let out = scabbard(&["rand-report", "--scheme", "florete", "--order", "1", "--seed", "00"], &[]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Comparison") && text.contains("Hash G"));
}
