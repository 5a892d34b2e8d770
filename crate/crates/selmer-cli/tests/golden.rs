//! Runs the binary on the bundled inputs and compares with the committed
//! outputs. `UPDATE_GOLDEN=1 cargo test -p selmer-cli` rewrites them.

use std::path::PathBuf;
use std::process::Command;

use selmer::descent_global::GlobalLedger;

const CASES: &[(&str, &[&str])] = &[
    ("tate_i4.txt", &["tate", "[0,-26,0,135,-567]", "-p", "3"]),
    ("tate_i4.json", &["tate", "[0,-26,0,135,-567]", "-p", "3", "--format", "json"]),
    ("local_x3_25x_at_5.txt", &["local", "[0,0,0,-25,0]", "-p", "5"]),
    ("local_x3_25x_at_5.json", &["local", "[0,0,0,-25,0]", "-p", "5", "--format", "json"]),
    ("local_31_velu.txt", &["local", "[0,0,0,-189,1269]", "-p", "31", "--isogeny", "velu:3"]),
    ("xt_quintic_37.txt", &["xt", "@quintic.poly", "--points", "@ex2.pts", "-p", "37"]),
    ("xt_quintic_73.txt", &["xt", "@quintic.poly", "--points", "@ex2.pts", "-p", "73"]),
    ("xt_quintic_191.txt", &["xt", "@quintic.poly", "--points", "@ex2.pts", "-p", "191"]),
    ("xt_quintic_inf.txt", &["xt", "@quintic.poly", "--points", "@ex2.pts", "-p", "inf"]),
    ("tfae_quintic.json", &["tfae", "@quintic.poly", "--format", "json"]),
    ("ledger_quintic.txt", &["ledger", "@quintic.poly", "--class-data", "@quintic.classes", "--points", "@ex2.pts"]),
    (
        "ledger_quintic.json",
        &["ledger", "@quintic.poly", "--class-data", "@quintic.classes", "--points", "@ex2.pts", "--format", "json"],
    ),
    ("ledger_mestre.json", &["ledger", "@mestre.curve", "--format", "json"]),
    ("oracle_family.txt", &["oracle", "family", "--count", "20"]),
];

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples-data")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let dir = data_dir();
    let args: Vec<String> = args
        .iter()
        .map(|a| match a.strip_prefix('@') {
            Some(f) => dir.join(f).to_string_lossy().into_owned(),
            None => a.to_string(),
        })
        .collect();
    let out = Command::new(env!("CARGO_BIN_EXE_selmer")).args(&args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn golden_outputs() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let dir = data_dir().join("expected");
    for (file, args) in CASES {
        let (code, out, err) = run(args);
        assert_eq!(code, 0, "{args:?}: {err}");
        let path = dir.join(file);
        if update {
            std::fs::create_dir_all(&dir).unwrap();
            std::fs::write(&path, &out).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(out, expected, "output of {args:?} differs from {file}");
    }
}

#[test]
fn output_is_deterministic() {
    for (_, args) in CASES.iter().filter(|(f, _)| f.ends_with(".json")) {
        assert_eq!(run(args).1, run(args).1, "{args:?}");
    }
}

#[test]
fn ledger_json_round_trips() {
    let (_, out, _) = run(CASES.iter().find(|(f, _)| *f == "ledger_quintic.json").unwrap().1);
    let ledger: GlobalLedger = serde_json::from_str(&out).unwrap();
    assert_eq!(ledger.selmer_rank_interval, Some([6, 7]));
    assert_eq!(ledger.class_interval, Some([3, 7]));
    let again = serde_json::to_string_pretty(&ledger).unwrap() + "\n";
    assert_eq!(again, out);
    let back: GlobalLedger = serde_json::from_str(&again).unwrap();
    assert_eq!(back, ledger);
}

#[test]
fn mestre_ledger_index_bound() {
    let (_, out, _) = run(&["ledger", "@mestre.curve", "--format", "json"]);
    let ledger: GlobalLedger = serde_json::from_str(&out).unwrap();
    assert_eq!(ledger.index_bound_c_in_s, 2);
    let at2 = ledger.breakdown.iter().find(|c| c.place.to_string() == "2").unwrap();
    assert_eq!(at2.s_over_i(), 1);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["tate", "[0,0,0,1,0]", "-p", "4"]).0, 1);
    assert_eq!(run(&["tate", "[0,0", "-p", "3"]).0, 1);
    assert_eq!(run(&["no-such-command"]).0, 1);
    assert_eq!(run(&["local", "[0,0,0,-25,0]", "-p", "5", "--isogeny", "mul:3"]).0, 2);
    assert_eq!(run(&["ledger", "X^3-X", "--class-data", "/nonexistent"]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
}
