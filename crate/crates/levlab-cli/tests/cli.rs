//! End-to-end checks of the binary: exit-code contract, config-file
//! merging, and byte-identical reproducibility apart from the single
//! timestamped header line.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn levlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// File contents with every `# generated` line removed.
fn stable_content(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
        .lines()
        .filter(|l| !l.starts_with("# generated"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn assert_dirs_match(a: &Path, b: &Path) {
    let mut names: Vec<String> = fs::read_dir(a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(!names.is_empty(), "no outputs in {}", a.display());
    for name in names {
        assert_eq!(
            stable_content(&a.join(&name)),
            stable_content(&b.join(&name)),
            "file {name} differs between reruns"
        );
    }
}

#[test]
fn classify_exit_codes_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();

    let run = levlab(&["classify", "--psi", "lin-log:1", "--out", out]);
    assert_eq!(exit_code(&run), 0, "divergent verdict must exit 0");
    let json = fs::read_to_string(dir.path().join("classify.json")).unwrap();
    assert!(json.contains("\"divergent\""));
    assert!(json.contains("\"schema_version\": 1"));
    assert!(json.contains("\"config_hash\""));
    assert!(json.contains("\"seed\""));

    let run = levlab(&["classify", "--psi", "lin-log:2", "--out", out]);
    assert_eq!(exit_code(&run), 0, "convergent verdict must exit 0");

    let run = levlab(&["classify", "--psi", "garbage", "--out", out]);
    assert_eq!(exit_code(&run), 1, "malformed selector must exit 1");
}

#[test]
fn table_weight_is_undecided_and_malformed_table_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let table = dir.path().join("psi.csv");
    fs::write(&table, "r,psi\n1,1\n10,5\n100,20\n1000,80\n").unwrap();
    let sel = format!("table:{}", table.display());

    let run = levlab(&["classify", "--psi", &sel, "--out", out]);
    assert_eq!(exit_code(&run), 2, "finite tables cannot be certified");

    let run = levlab(&["dichotomy", "--psi", &sel, "--out", out]);
    assert_eq!(exit_code(&run), 2, "undecided weight must not run an experiment");
    let json = fs::read_to_string(dir.path().join("verdict.json")).unwrap();
    assert!(json.contains("\"undecided\""));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "r,psi\n1,banana\n").unwrap();
    let run = levlab(&["classify", "--psi", &format!("table:{}", bad.display()), "--out", out]);
    assert_eq!(exit_code(&run), 1);
}

#[test]
fn transform_exit_codes_and_zero_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();

    // cheap op for the exit-code contract
    let run = levlab(&["transform", "--space", "r3", "--op", "slice-check", "--out", out]);
    assert_eq!(exit_code(&run), 0);

    // impossible tolerance -> exit 3, residual still reported
    let run = levlab(&[
        "transform", "--space", "r3", "--op", "slice-check", "--tol", "1e-30", "--out", out,
    ]);
    assert_eq!(exit_code(&run), 3);
    let json = fs::read_to_string(dir.path().join("residual.json")).unwrap();
    assert!(json.contains("\"pass\": false"));

    // zero function (empty bump window) -> zero residual, exit 0
    let run = levlab(&[
        "transform", "--space", "r3", "--op", "slice-check", "--bump", "1,1", "--out", out,
    ]);
    assert_eq!(exit_code(&run), 0);
    let json = fs::read_to_string(dir.path().join("residual.json")).unwrap();
    assert!(json.contains("\"residual\": 0.0"), "got: {json}");

    let run = levlab(&["transform", "--op", "no-such-op", "--out", out]);
    assert_eq!(exit_code(&run), 1);
}

#[test]
fn config_file_is_merged_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"psi": "lin-log:2", "seed": 9}"#).unwrap();

    // psi and seed come from the file
    let run = levlab(&[
        "classify", "--config", cfg.to_str().unwrap(), "--out", out_a.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&run), 0);
    let json = fs::read_to_string(out_a.join("classify.json")).unwrap();
    assert!(json.contains("\"convergent\""));
    assert!(json.contains("\"seed\": 9"));

    // the flag overrides the file's psi
    let out_b = dir.path().join("b");
    let run = levlab(&[
        "classify", "--config", cfg.to_str().unwrap(), "--psi", "lin-log:1",
        "--out", out_b.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&run), 0);
    let json = fs::read_to_string(out_b.join("classify.json")).unwrap();
    assert!(json.contains("\"divergent\""));

    // unknown config keys are rejected
    fs::write(&cfg, r#"{"psii": "typo"}"#).unwrap();
    let run = levlab(&[
        "classify", "--config", cfg.to_str().unwrap(), "--psi", "sqrt",
        "--out", out_b.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&run), 1);
}

#[test]
fn reruns_are_byte_identical_apart_from_the_timestamp_line() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("classify", vec!["classify", "--psi", "lin-log:1", "--seed", "5"]),
        ("slice", vec!["transform", "--space", "r3", "--op", "slice-check"]),
        ("approx", vec!["approx", "--seed", "13", "--probes", "50"]),
        ("witness", vec!["witness", "--psi", "sqrt", "--l", "2", "--domain", "line"]),
    ];
    for (name, args) in cases {
        let a = dir.path().join(format!("{name}_a"));
        let b = dir.path().join(format!("{name}_b"));
        for out in [&a, &b] {
            let mut full = args.clone();
            let out_s = out.to_str().unwrap().to_string();
            full.push("--out");
            full.push(&out_s);
            let run = levlab(&full);
            assert_eq!(
                exit_code(&run),
                0,
                "{name}: {}",
                String::from_utf8_lossy(&run.stderr)
            );
        }
        assert_dirs_match(&a, &b);
    }
}

#[test]
fn approx_responds_to_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (out, seed) in [(&a, "1"), (&b, "2")] {
        let run = levlab(&[
            "approx", "--seed", seed, "--probes", "20", "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&run), 0);
    }
    // different probe sets -> different certified maxima (and config hash)
    let ja = fs::read_to_string(a.join("approx.json")).unwrap();
    let jb = fs::read_to_string(b.join("approx.json")).unwrap();
    assert_ne!(ja, jb);
}
