use std::path::PathBuf;
use std::process::{Command, Output};

fn ggv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ggv"))
        .args(args)
        .output()
        .unwrap()
}

fn shipped(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.ggv"))
        .display()
        .to_string()
}

fn scratch(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("ggv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn passing_and_failing_suites() {
    let out = ggv(&[
        "check",
        "--fixture",
        "ex31_prime",
        "--suite",
        "conformal-integrability",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("verdict conf-integrability: pass"), "{text}");

    let out = ggv(&[
        "check",
        "--fixture",
        "ex32_rescaled",
        "--suite",
        "gk",
        "--points",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(1));

    let out = ggv(&[
        "check",
        "--file",
        &shipped("ex32"),
        "--suite",
        "all",
        "--points",
        "8",
        "--report",
        "jsonl",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text
        .lines()
        .all(|l| l.starts_with('{') && l.contains(r#""points":8"#)));
}

#[test]
fn usage_and_parse_errors_exit_with_two() {
    for args in [
        vec![
            "check",
            "--fixture",
            "ex31_prime",
            "--suite",
            "hypersurface",
        ],
        vec!["check", "--fixture", "nonexistent", "--suite", "gk"],
        vec!["check", "--fixture", "ex31", "--suite", "bogus"],
        vec![
            "check",
            "--fixture",
            "ex31",
            "--file",
            "x.ggv",
            "--suite",
            "gk",
        ],
        vec![
            "check",
            "--fixture",
            "ex31",
            "--suite",
            "algebraic",
            "--points",
            "0",
        ],
        vec![
            "check",
            "--fixture",
            "ex31",
            "--suite",
            "algebraic",
            "--seed",
            "0xZZ",
        ],
        vec!["parse-check", "/nonexistent/file.ggv"],
    ] {
        let out = ggv(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    let bad = scratch(
        "bad.ggv",
        "chart dim = 1\nchart box x1 = 0 1\nA 1 1 = sin(\n",
    );
    let out = ggv(&["parse-check", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 3"));
}

#[test]
fn numeric_domain_failures_exit_with_three() {
    let path = scratch(
        "domain.ggv",
        "chart dim = 2\nchart box x1 = -1 1\nchart box x2 = -1 1\nA 1 1 = ln(x1 - 5)\n",
    );
    let out = ggv(&[
        "check",
        "--file",
        &path,
        "--suite",
        "algebraic",
        "--points",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn listing_parsing_and_export() {
    let out = ggv(&["fixtures"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "ex31",
        "ex31_prime",
        "ex32",
        "ex32_rescaled",
        "ex33_heisenberg",
        "flat_kahler",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }

    let out = ggv(&["parse-check", &shipped("ex32_rescaled")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        "ok: dim 4, structure, metric, lee, hypersurface"
    );

    let out = ggv(&["export", "--fixture", "ex31"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout, std::fs::read(shipped("ex31")).unwrap());
}
