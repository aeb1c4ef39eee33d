use std::path::{Path, PathBuf};
use std::process::Command as Process;

use geolin_cli::{run_text, Command, DocumentError, Format, Kind, Options, SystemDocument, INPUT_ERROR};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus_text(name: &str) -> String {
    std::fs::read_to_string(corpus().join(name)).unwrap()
}

fn documents() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(corpus())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    names
}

fn text(command: Command, doc: &str) -> (i32, String) {
    run_text(command, doc, &Options::default(), Format::Text)
}

fn parse_err(src: &str) -> DocumentError {
    SystemDocument::parse(src).unwrap_err()
}

#[test]
fn every_corpus_document_parses() {
    for name in documents() {
        let doc = SystemDocument::parse(&corpus_text(&name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(doc.name, name);
    }
}

#[test]
fn malformed_documents() {
    let head = "[system]\nname = \"t\"\nkind = \"cubic-2\"\n";
    assert!(matches!(parse_err("[system]\nname = \"t\"\n"), DocumentError::MissingKey("kind")));
    assert!(matches!(parse_err("[system]\nkind = \"cubic-3\"\nname = \"t\""), DocumentError::UnknownKind(_)));
    assert!(matches!(
        parse_err(&format!("{head}[coefficients]\nA44 = \"1\"\n")),
        DocumentError::UnknownKey { section: "coefficients", .. }
    ));
    assert!(matches!(
        parse_err(&format!("{head}[coefficients]\nA22 = 1\n")),
        DocumentError::Syntax { line: 5, .. }
    ));
    assert!(matches!(
        parse_err(&format!("{head}[coefficients]\nA22 = \"1\"\nA22 = \"2\"\n")),
        DocumentError::Syntax { line: 6, .. }
    ));
    assert!(matches!(
        parse_err(&format!("{head}[coefficients]\nA22 = \"x^y\"\n")),
        DocumentError::Syntax { line: 5, .. }
    ));
    assert!(matches!(
        parse_err(&format!("{head}[coefficients]\nA22 = \"dy\"\n")),
        DocumentError::Syntax { line: 5, .. }
    ));
    assert!(matches!(parse_err(&format!("{head}[extra]\n")), DocumentError::Syntax { .. }));
    assert!(matches!(parse_err("A22 = \"1\"\n"), DocumentError::Syntax { line: 1, .. }));
    assert!(matches!(
        parse_err(&format!("{head}[transformation]\nX1 = \"x\"\nX2 = \"y\"\n")),
        DocumentError::Incomplete { section: "transformation", .. }
    ));
    assert!(matches!(
        parse_err(&format!("{head}[metric]\np = \"1\"\nq = \"0\"\nr = \"1\"\n")),
        DocumentError::Invalid(_)
    ));
    assert!(matches!(
        parse_err(&format!("{head}[gauge]\nb = \"1\"\n")),
        DocumentError::UnknownKey { section: "gauge", .. }
    ));
    assert!(matches!(
        parse_err("[system]\nname = \"t\"\nkind = \"cubic-2\"\ncoordinates = \"x, y\"\n"),
        DocumentError::Syntax { line: 4, .. }
    ));
}

#[test]
fn comments_and_omitted_coefficients() {
    let doc = SystemDocument::parse(
        "# leading\n[system]\nname = \"t\"  # trailing\nkind = \"linear-2\"\n\n[coefficients]\n  D2 = \"w*y\"\n",
    )
    .unwrap();
    assert_eq!(doc.kind, Kind::Linear2);
    assert_eq!(doc.coefficient("D3"), geolin_expr::ex("0"));
    assert_eq!(doc.coefficient("D2"), geolin_expr::ex("w*y"));
}

#[test]
fn command_kind_mismatches_are_input_errors() {
    let cases = [
        (Command::Project, "sys-ex3"),
        (Command::Lift, "lie-ex1-geodesic"),
        (Command::VerifyMetric, "sys-ex4"),
        (Command::Riemann, "sys-ex5"),
        (Command::Appendix, "sphere"),
        (Command::VerifyTransform, "sys-ex1"),
        (Command::NormalForm, "sys-ex1"),
        (Command::VerifyMetric, "lie-counter"),
    ];
    for (c, name) in cases {
        let (code, out) = text(c, &corpus_text(name));
        assert_eq!(code, INPUT_ERROR, "{} {name}: {out}", c.name());
        assert!(out.starts_with("error: "));
    }
}

#[test]
fn gauge_flags_override_the_block() {
    let doc = corpus_text("sys-ex3");
    let (code, _) = text(Command::Appendix, &doc);
    assert_eq!(code, 0);
    let opts = Options {
        gauge: vec!["G3_33=0".into()],
        ..Options::default()
    };
    let (code, out) = run_text(Command::Appendix, &doc, &opts, Format::Text);
    assert_eq!(code, 1);
    assert!(out.contains("G3_33_z.1"));
    for bad in ["G3_33", "b=1", "G3_33=x^y"] {
        let opts = Options {
            gauge: vec![bad.into()],
            ..Options::default()
        };
        assert_eq!(run_text(Command::Appendix, &doc, &opts, Format::Text).0, INPUT_ERROR);
    }
}

#[test]
fn exit_codes_follow_verdicts() {
    assert_eq!(text(Command::Check, &corpus_text("sys-ex4")).0, 0);
    assert_eq!(text(Command::Check, &corpus_text("sys-ex2")).0, 1);
    assert_eq!(text(Command::VerifyTransform, &corpus_text("sys-ex3")).0, 0);
    assert_eq!(text(Command::Check, "[system]\nname = \"t\"\n").0, INPUT_ERROR);
    // logarithm of a negative quantity at every sample point
    let doc = "[system]\nname = \"t\"\nkind = \"geodesic-2\"\n[coefficients]\nb = \"x*ln(-y)\"\n";
    let (code, out) = text(Command::Check, doc);
    assert_eq!(code, 2, "{out}");
    assert!(out.contains("UNDECIDED"));
}

#[test]
fn projection_inverts_lift() {
    let (_, lifted) = text(Command::Lift, &corpus_text("sys-ex4"));
    let body: String = lifted.lines().skip_while(|l| *l != "[coefficients]").take_while(|l| !l.starts_with("verdict")).map(|l| format!("{l}\n")).collect();
    let doc = format!("[system]\nname = \"lifted\"\nkind = \"geodesic-3\"\n{body}");
    let (code, projected) = text(Command::Project, &doc);
    assert_eq!(code, 0);
    let original = SystemDocument::parse(&corpus_text("sys-ex4")).unwrap();
    for line in projected.lines().filter(|l| l.contains(" = \"")) {
        let (name, value) = line.split_once(" = ").unwrap();
        let value = geolin_expr::ex(value.trim_matches('"'));
        assert_eq!(value, original.coefficient(name), "{name}");
    }
}

#[test]
fn json_reports_are_structured() {
    let (code, out) = run_text(Command::Check, &corpus_text("sys-ex2"), &Options::default(), Format::Json);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["document"], "sys-ex2");
    assert_eq!(v["verdict"], "FAIL");
    assert_eq!(v["zero_test"]["points"], 16);
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 15);
    let failing: Vec<&str> = records
        .iter()
        .filter(|r| r["verdict"] == "NONZERO")
        .map(|r| r["id"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["cubic.4", "cubic.12"]);
    assert_eq!(records[3]["residual"], "-1");
    assert!(records[3]["witness"]["value"].as_f64().unwrap() < 0.0);
    assert!(v.get("timing_ms").is_none());
}

#[test]
fn binary_reports_are_byte_identical() {
    let bin = env!("CARGO_BIN_EXE_geolin");
    for (cmd, name) in [("check", "sys-ex4"), ("appendix", "sys-ex3"), ("verify-transform", "lie-ex2")] {
        let run = || {
            Process::new(bin)
                .args([cmd, "--format", "json", "--seed", "7"])
                .arg(corpus().join(name))
                .output()
                .unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout);
    }
    let out = Process::new(bin).args(["check", "/nonexistent"]).output().unwrap();
    assert_eq!(out.status.code(), Some(INPUT_ERROR));
    let out = Process::new(bin)
        .args(["check", "--zero-test-points", "4", "--precision-bits", "128", "--tolerance", "1e-20"])
        .arg(corpus().join("sys-ex2"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("zero test: 4 points, 128 bits, tolerance 1e-20, seed 0"));
}

/// Text reports for every corpus document, compared with files under
/// `tests/golden`. Set `GEOLIN_UPDATE_GOLDEN=1` to rewrite them.
#[test]
fn golden_reports() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let update = std::env::var_os("GEOLIN_UPDATE_GOLDEN").is_some();
    let mut mismatches = Vec::new();
    for name in documents() {
        let src = corpus_text(&name);
        let doc = SystemDocument::parse(&src).unwrap();
        let mut commands = vec![Command::Check];
        if doc.transformation.is_some() {
            commands.push(Command::VerifyTransform);
        }
        if doc.metric.is_some() {
            commands.push(Command::VerifyMetric);
        }
        if !doc.gauge.is_empty() {
            commands.push(Command::Appendix);
        }
        for c in commands {
            let (_, out) = text(c, &src);
            let path = dir.join(format!("{name}.{}.txt", c.name()));
            if update {
                std::fs::write(&path, &out).unwrap();
            } else if std::fs::read_to_string(&path).ok().as_deref() != Some(out.as_str()) {
                mismatches.push(path.display().to_string());
            }
        }
    }
    assert!(mismatches.is_empty(), "golden mismatch: {mismatches:?}");
}
