//! Every subcommand against stored output. Regenerate with
//! `UPDATE_GOLDEN=1 cargo test -p mnshift-cli --test golden`.

use std::path::PathBuf;
use std::process::Command;

const CASES: &[(&str, &[&str], i32)] = &[
    ("validate", &["validate", "--config", "config.json"], 0),
    ("enumerate-omega", &["enumerate-omega", "-n", "2", "-m", "2", "--depth", "1"], 0),
    ("enumerate-pef", &["enumerate-pef", "-n", "2", "-m", "2", "--depth", "1"], 0),
    ("psi", &["psi", "--efunc", "f1.json"], 0),
    ("psi-dot", &["psi", "--efunc", "f1.json", "--dot"], 0),
    ("phi", &["phi", "--config", "config.json"], 0),
    ("extend", &["extend", "--efunc", "f1.json"], 0),
    ("deepen", &["deepen", "--efunc", "f1.json", "--depth", "2"], 0),
    ("deepen-seeded", &["deepen", "--efunc", "f1.json", "--depth", "2", "--seed", "5"], 0),
    ("act", &["act", "--word", "b1^-1 a2", "--efunc", "f2.json"], 0),
    ("act-empty", &["act", "--word", "b2^-1 a1", "--efunc", "f2.json"], 1),
    ("act-not-alternating", &["act", "--word", "a1 a2", "--efunc", "f2.json"], 1),
    ("act-shortfall", &["act", "--word", "b1^-1 a1 b1^-1 a2 b2^-1 a1", "--efunc", "f2.json"], 1),
    ("gamma", &["gamma", "--point", "point.json", "--depth", "3"], 0),
    ("gamma-x", &["gamma", "--point", "point_x.json", "--depth", "3"], 0),
    ("fixed-point", &["fixed-point", "-n", "2", "-m", "2", "--depth", "3"], 0),
    ("fixed-point-dot", &["fixed-point", "-n", "2", "-m", "2", "--depth", "2", "--dot"], 0),
    ("freeness", &["freeness", "-n", "2", "-m", "2", "--max-word", "2", "--open-depth", "1"], 0),
    ("isotropy", &["isotropy", "--point", "point.json", "--depth", "8"], 0),
    ("isotropy-word", &["isotropy", "--config", "fixed3.json", "--word", "b1^-1 a1"], 0),
    ("isotropy-aperiodic", &["isotropy", "--point", "aperiodic.json", "--depth", "6"], 1),
    ("orbit", &["orbit", "--config", "fixed3.json", "--max-len", "1"], 0),
    ("ball", &["ball", "-n", "2", "-m", "2", "--max-len", "2"], 0),
    ("f2", &["f2", "-n", "2", "-m", "2", "--word", "a1^-1 b1 a2^-1 b2"], 0),
    ("check-r", &["check-r", "--set", "theta0.json"], 0),
    ("check-r-prime", &["check-r", "--set", "theta45.json", "--prime"], 0),
    ("tame", &["tame", "--set", "theta0.json", "--max-len", "6"], 0),
    ("tame-violation", &["tame", "--set", "theta45.json", "--max-len", "6"], 1),
    ("trace", &["trace", "--set", "theta45.json"], 0),
];

fn dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join(name)
}

fn run(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_mnshift")).args(args).current_dir(dir("fixtures")).output().unwrap();
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap())
}

#[test]
fn outputs_match_golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for (name, args, code) in CASES {
        let (stdout, status) = run(args);
        assert_eq!(status, *code, "{name}: exit code");
        let path = dir("golden").join(format!("{name}.out"));
        if update {
            std::fs::write(&path, &stdout).unwrap();
        } else {
            let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
            assert_eq!(stdout, expected, "{name}: output differs from {}", path.display());
        }
    }
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["freeness", "-n", "2", "-m", "2", "--max-word", "2", "--open-depth", "1"];
    let (single, _) = {
        let out = Command::new(env!("CARGO_BIN_EXE_mnshift"))
            .args(args)
            .env("MNSHIFT_THREADS", "1")
            .output()
            .unwrap();
        (String::from_utf8(out.stdout).unwrap(), out.status)
    };
    let out = Command::new(env!("CARGO_BIN_EXE_mnshift")).args(args).env("MNSHIFT_THREADS", "3").output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), single);
    assert_eq!(run(&args).0, single);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["psi"]).1, 2);
    assert_eq!(run(&["no-such-verb"]).1, 2);
    assert_eq!(run(&["psi", "--efunc", "missing.json"]).1, 2);
    assert_eq!(run(&["f2", "-n", "2", "-m", "2", "--word", "a3"]).1, 2);
    assert_eq!(run(&["fixed-point", "-n", "2", "-m", "1", "--depth", "2"]).1, 2);
}
