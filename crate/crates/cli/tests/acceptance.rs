//! End-to-end command tests: every construction command's output passes
//! verify, single-entry perturbations are rejected, and exit codes follow
//! the 0/1/2 discipline.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wittkit"))
}

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            dir: tempfile::tempdir().expect("tempdir"),
        }
    }

    fn write(&self, name: &str, contents: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        std::fs::write(&path, contents).expect("write input");
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("spawn wittkit");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 path")
}

const FORM5: &str = r#"{"n": 5, "alphas": ["1", "1", "1"]}"#;

#[test]
fn witt_extend_round_trip_and_gram_mismatch() {
    let ws = Workspace::new();
    let form = ws.write("form.json", FORM5);
    let vectors = ws.write(
        "vectors.json",
        r#"{"sources": [["0","0","0","0","1"]], "targets": [["0","0","0","1","0"]]}"#,
    );
    let cert = ws.path("witt.cert.json");
    let (code, out, _) = run(&[
        "witt-extend",
        p(&form),
        p(&vectors),
        "--output",
        p(&cert),
    ]);
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = run(&["verify", p(&cert)]);
    assert_eq!(code, 0, "{out}");

    // Gram mismatch is an input error: exit 2 naming the pair.
    let bad = ws.write(
        "bad.json",
        r#"{"sources": [["0","0","0","0","1"]], "targets": [["0","0","0","0","2"]]}"#,
    );
    let (code, _, err) = run(&["witt-extend", p(&form), p(&bad), "--output", p(&cert)]);
    assert_eq!(code, 2);
    assert!(err.contains("gram mismatch at (1,1)"), "stderr: {err}");

    // Missing file: exit 2.
    let (code, _, _) = run(&[
        "witt-extend",
        p(&ws.path("absent.json")),
        p(&vectors),
        "--output",
        p(&cert),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn special_witt_extend_lands_in_so() {
    let ws = Workspace::new();
    let form = ws.write("form.json", FORM5);
    let vectors = ws.write(
        "vectors.json",
        r#"{"sources": [["0","0","1","0","0"]], "targets": [["0","0","0","1","0"]]}"#,
    );
    let cert = ws.path("witt.cert.json");
    let (code, _, _) = run(&[
        "witt-extend",
        p(&form),
        p(&vectors),
        "--special",
        "--output",
        p(&cert),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&cert).unwrap();
    assert!(text.contains("\"det\": \"+1\""));
    let (code, _, _) = run(&["verify", p(&cert)]);
    assert_eq!(code, 0);
}

#[test]
fn lift_round_trip_and_bad_prime() {
    let ws = Workspace::new();
    let form = ws.write("form.json", FORM5);
    let vectors = ws.write(
        "vectors.json",
        r#"{"sources": [["0","0","1","0","0"]], "targets": [["0","0","0","1","0"]]}"#,
    );
    let cert = ws.path("lift.cert.json");
    let (code, _, _) = run(&[
        "lift",
        p(&form),
        p(&vectors),
        "--prime",
        "3",
        "--precision",
        "10",
        "--output",
        p(&cert),
    ]);
    assert_eq!(code, 0);
    let (code, _, _) = run(&["verify", p(&cert)]);
    assert_eq!(code, 0);

    // Deterministic across runs: byte-identical certificates.
    let cert2 = ws.path("lift2.cert.json");
    run(&[
        "lift",
        p(&form),
        p(&vectors),
        "--prime",
        "3",
        "--precision",
        "10",
        "--output",
        p(&cert2),
    ]);
    assert_eq!(
        std::fs::read_to_string(&cert).unwrap(),
        std::fs::read_to_string(&cert2).unwrap()
    );

    // --special with 2m+1 > n: exit 2.
    let form3 = ws.write("form3.json", r#"{"gram": [["1","0","0"],["0","1","0"],["0","0","1"]]}"#);
    let sys3 = ws.write(
        "sys3.json",
        r#"{"sources": [["1","0","0"],["0","1","0"]], "targets": [["1","0","0"],["0","1","0"]]}"#,
    );
    let (code, _, err) = run(&[
        "lift",
        p(&form3),
        p(&sys3),
        "--prime",
        "5",
        "--precision",
        "6",
        "--special",
        "--output",
        p(&ws.path("x.json")),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("2m+1"), "stderr: {err}");

    // p = 2: exit 2 with the hypothesis message.
    let (code, _, err) = run(&[
        "lift",
        p(&form),
        p(&vectors),
        "--prime",
        "2",
        "--precision",
        "10",
        "--output",
        p(&ws.path("x.json")),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("p=2 unsupported"), "stderr: {err}");

    // Bad place names the obstructing coefficient.
    let form_bad = ws.write("form_bad.json", r#"{"n": 5, "alphas": ["3", "1", "1"]}"#);
    let (code, _, err) = run(&[
        "lift",
        p(&form_bad),
        p(&vectors),
        "--prime",
        "3",
        "--precision",
        "10",
        "--output",
        p(&ws.path("x.json")),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("alpha_3"), "stderr: {err}");
}

#[test]
fn orbit_negative_and_positive() {
    let ws = Workspace::new();
    let form = ws.write("form.json", FORM5);
    let pair = ws.write(
        "pair.json",
        r#"{"a": ["1","0","0","0","0"], "b": ["3","0","0","0","0"]}"#,
    );
    let cert = ws.path("orbit.cert.json");
    let (code, out, _) = run(&[
        "orbit-test",
        p(&form),
        p(&pair),
        "--prime",
        "3",
        "--precision",
        "2",
        "--output",
        p(&cert),
    ]);
    assert_eq!(code, 1, "{out}");
    let (code, _, _) = run(&["verify", p(&cert)]);
    assert_eq!(code, 0);

    let pair = ws.write(
        "pair2.json",
        r#"{"a": ["0","0","1","0","0"], "b": ["0","0","0","1","0"]}"#,
    );
    let (code, _, _) = run(&[
        "orbit-test",
        p(&form),
        p(&pair),
        "--prime",
        "3",
        "--precision",
        "6",
        "--output",
        p(&cert),
    ]);
    assert_eq!(code, 0);
    let (code, _, _) = run(&["verify", p(&cert)]);
    assert_eq!(code, 0);

    // f-value mismatch is an error.
    let pair = ws.write(
        "pair3.json",
        r#"{"a": ["0","0","1","0","0"], "b": ["0","0","2","0","0"]}"#,
    );
    let (code, _, _) = run(&[
        "orbit-test",
        p(&form),
        p(&pair),
        "--prime",
        "3",
        "--precision",
        "6",
        "--output",
        p(&cert),
    ]);
    assert_eq!(code, 2);
}

fn identity_map_json(n: usize) -> String {
    let matrix: Vec<Vec<String>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { "1".into() } else { "0".into() })
                .collect()
        })
        .collect();
    serde_json::json!({
        "matrix": matrix,
        "det": "+1",
        "spinor_norm": 1,
        "reflection_word": []
    })
    .to_string()
}

#[test]
fn borovoi_round_trip_local_and_rejections() {
    let ws = Workspace::new();
    let form = ws.write("form.json", FORM5);
    let element = ws.write("ident.json", &identity_map_json(5));
    let cert = ws.path("borovoi.cert.json");
    let (code, _, _) = run(&[
        "borovoi",
        p(&form),
        p(&element),
        "--local",
        "7",
        "12",
        "--output",
        p(&cert),
    ]);
    assert_eq!(code, 0);
    let (code, _, _) = run(&["verify", p(&cert)]);
    assert_eq!(code, 0);

    // Byte-identical output across runs.
    let cert2 = ws.path("borovoi2.cert.json");
    run(&[
        "borovoi",
        p(&form),
        p(&element),
        "--local",
        "7",
        "12",
        "--output",
        p(&cert2),
    ]);
    assert_eq!(
        std::fs::read_to_string(&cert).unwrap(),
        std::fs::read_to_string(&cert2).unwrap()
    );

    // A reflection (det -1) is a verified negative: exit 1.
    let refl = serde_json::json!({
        "matrix": [
            ["1","0","0","0","0"],
            ["0","1","0","0","0"],
            ["0","0","-1","0","0"],
            ["0","0","0","1","0"],
            ["0","0","0","0","1"]
        ],
        "det": "-1",
        "spinor_norm": null,
        "reflection_word": null
    })
    .to_string();
    let element = ws.write("refl.json", &refl);
    let (code, out, _) = run(&["borovoi", p(&form), p(&element), "--output", p(&cert)]);
    assert_eq!(code, 1);
    assert!(out.contains("not in spinor kernel"), "stdout: {out}");
}

#[test]
fn sap_appendix_example_and_dim4() {
    let ws = Workspace::new();
    let q3 = ws.write(
        "q3.json",
        r#"{"gram": [["1","0","0"],["0","1","0"],["0","0","-2"]]}"#,
    );
    let cert = ws.path("sap.cert.json");
    let (code, out, _) = run(&[
        "sap",
        p(&q3),
        "1",
        "real",
        "1,0,0",
        "--output",
        p(&cert),
    ]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("holds=false"));
    let (code, _, _) = run(&["verify", p(&cert)]);
    assert_eq!(code, 0);

    let q4 = ws.write(
        "q4.json",
        r#"{"gram": [["1","0","0","0"],["0","1","0","0"],["0","0","1","0"],["0","0","0","-2"]]}"#,
    );
    let (code, out, _) = run(&[
        "sap",
        p(&q4),
        "1",
        "real",
        "1,0,0,0",
        "--output",
        p(&cert),
    ]);
    assert_eq!(code, 0, "{out}");

    // Compact Q_S: hypothesis failure, exit 2.
    let sphere = ws.write(
        "sphere.json",
        r#"{"gram": [["1","0","0"],["0","1","0"],["0","0","1"]]}"#,
    );
    let (code, _, err) = run(&[
        "sap",
        p(&sphere),
        "1",
        "real",
        "1,0,0",
        "--output",
        p(&cert),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("noncompact"), "stderr: {err}");

    // Witness off the quadric: exit 2.
    let (code, _, _) = run(&[
        "sap",
        p(&q3),
        "1",
        "real",
        "1,1,0",
        "--output",
        p(&cert),
    ]);
    assert_eq!(code, 2);

    // Adding a finite place where the complement form is anisotropic
    // flips the ternary verdict to true with that witness place.
    let (code, out, _) = run(&[
        "sap",
        p(&q3),
        "1",
        "real,5",
        "1,0,0",
        "--output",
        p(&cert),
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("witness-place 5"), "stdout: {out}");
    let (code, _, _) = run(&["verify", p(&cert)]);
    assert_eq!(code, 0);
}

#[test]
fn every_certificate_kind_rejects_single_entry_perturbation() {
    let ws = Workspace::new();
    let form = ws.write("form.json", FORM5);
    let vectors = ws.write(
        "vectors.json",
        r#"{"sources": [["0","0","0","0","1"]], "targets": [["0","0","0","1","0"]]}"#,
    );
    let element = ws.write("ident.json", &identity_map_json(5));
    let q3 = ws.write(
        "q3.json",
        r#"{"gram": [["1","0","0"],["0","1","0"],["0","0","-2"]]}"#,
    );

    let witt = ws.path("witt.cert.json");
    let lift = ws.path("lift.cert.json");
    let borovoi = ws.path("borovoi.cert.json");
    let sap = ws.path("sap.cert.json");
    let inv = ws.path("inv.cert.json");
    let norm = ws.path("norm.cert.json");
    run(&["witt-extend", p(&form), p(&vectors), "--output", p(&witt)]);
    run(&[
        "lift",
        p(&form),
        p(&vectors),
        "--prime",
        "5",
        "--precision",
        "8",
        "--output",
        p(&lift),
    ]);
    run(&["borovoi", p(&form), p(&element), "--output", p(&borovoi)]);
    run(&["sap", p(&q3), "1", "real", "1,0,0", "--output", p(&sap)]);
    run(&["invariants", p(&q3), "--output", p(&inv)]);
    run(&["form-normalize", p(&form), "--output", p(&norm)]);

    // Perturb the claimed result of each certificate (an output matrix
    // entry or the verdict), never the embedded input, which would just
    // describe a different, equally valid instance.
    for (path, anchor) in [
        (&witt, "\"matrix\""),
        (&lift, "\"X\""),
        (&borovoi, "\"matrix\""),
        (&sap, "\"holds\""),
        (&inv, "\"witt_index\""),
        (&norm, "\"transform\""),
    ] {
        let (code, out, err) = run(&["verify", p(path)]);
        assert_eq!(code, 0, "fresh certificate {path:?}: {out} {err}");
        let text = std::fs::read_to_string(path).unwrap();
        let tampered = perturb_after(&text, anchor);
        assert_ne!(text, tampered, "perturbation must change {path:?}");
        let bad = ws.path("tampered.json");
        std::fs::write(&bad, &tampered).unwrap();
        let (code, out, _) = run(&["verify", p(&bad)]);
        assert!(
            code == 1 || code == 2,
            "tampered {path:?} must be rejected, got {code}: {out}"
        );
    }

    // Truncated file: exit 2.
    let text = std::fs::read_to_string(&witt).unwrap();
    let cut = ws.path("cut.json");
    std::fs::write(&cut, &text[..text.len() / 2]).unwrap();
    let (code, _, _) = run(&["verify", p(&cut)]);
    assert_eq!(code, 2);

    // Unknown kind: exit 2.
    let unk = ws.path("unk.json");
    std::fs::write(&unk, r#"{"kind": "mystery", "version": "v", "payload": {}}"#).unwrap();
    let (code, _, _) = run(&["verify", p(&unk)]);
    assert_eq!(code, 2);
}

/// Flip the first claimed value after the anchor key: a quoted digit, a
/// bare integer, or a boolean, leaving JSON structure intact.
fn perturb_after(text: &str, anchor: &str) -> String {
    let start = text.find(anchor).expect("anchor present") + anchor.len();
    let bytes = text.as_bytes();
    let mut i = start;
    while i + 2 < bytes.len() {
        if bytes[i] == b'"' && bytes[i + 1].is_ascii_digit() {
            let d = bytes[i + 1];
            let mut out = bytes.to_vec();
            out[i + 1] = if d == b'9' { b'4' } else { d + 1 };
            return String::from_utf8(out).unwrap();
        }
        if text[i..].starts_with("true") {
            return format!("{}false{}", &text[..i], &text[i + 4..]);
        }
        if text[i..].starts_with("false") {
            return format!("{}true{}", &text[..i], &text[i + 5..]);
        }
        if bytes[i].is_ascii_digit() && !bytes[i - 1].is_ascii_digit() && bytes[i - 1] != b'"' {
            let d = bytes[i];
            let mut out = bytes.to_vec();
            out[i] = if d == b'9' { b'4' } else { d + 1 };
            return String::from_utf8(out).unwrap();
        }
        i += 1;
    }
    text.to_string()
}

#[test]
fn selftest_runs_clean() {
    let (code, out, _) = run(&["selftest", "--seed", "7"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("all suites passed"));
}
