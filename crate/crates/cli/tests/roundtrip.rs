//! Emitted JSON re-parses to an equal value.

use std::path::Path;
use std::process::Command;

use mnshift_core::config::Configuration;
use mnshift_core::efunc::PartialEFunction;
use tempfile::TempDir;

fn mnshift(args: &[&str], cwd: &Path) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_mnshift")).args(args).current_dir(cwd).output().unwrap();
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap())
}

fn fixtures() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

#[test]
fn configurations_and_functions_round_trip() {
    let tmp = TempDir::new().unwrap();
    let (text, code) = mnshift(&["deepen", "--efunc", "f1.json", "--depth", "3", "--seed", "9"], &fixtures());
    assert_eq!(code, 0);
    let f: PartialEFunction = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&f).unwrap() + "\n", text);
    std::fs::write(tmp.path().join("f.json"), &text).unwrap();

    let (cfg_text, _) = mnshift(&["psi", "--efunc", "f.json"], tmp.path());
    let cfg: Configuration = serde_json::from_str(&cfg_text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&cfg).unwrap() + "\n", cfg_text);
    std::fs::write(tmp.path().join("c.json"), &cfg_text).unwrap();

    let (back, code) = mnshift(&["phi", "--config", "c.json"], tmp.path());
    assert_eq!(code, 0);
    assert_eq!(back, text);
    let (report, code) = mnshift(&["validate", "--config", "c.json"], tmp.path());
    assert_eq!(code, 0);
    assert!(report.contains("\"clean\": true"));
}

#[test]
fn invalid_configuration_exits_one() {
    let tmp = TempDir::new().unwrap();
    let bad = r#"{"n":2,"m":2,"depth":1,"members":["e","a1"]}"#;
    std::fs::write(tmp.path().join("bad.json"), bad).unwrap();
    let (report, code) = mnshift(&["validate", "--config", "bad.json"], tmp.path());
    assert_eq!(code, 1);
    let value: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(value["clean"], false);
}

#[test]
fn every_json_output_reparses() {
    for name in std::fs::read_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")).unwrap() {
        let path = name.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        if text.starts_with("digraph") {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let again: serde_json::Value = serde_json::from_str(&serde_json::to_string(&value).unwrap()).unwrap();
        assert_eq!(again, value, "{}", path.display());
    }
}
