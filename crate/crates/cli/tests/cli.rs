use std::path::PathBuf;
use std::process::Command;

use proptest::prelude::*;
use serde_json::json;

use taydom_cli::commands::{AbelDoc, CertifyDoc, GenerateDoc};
use taydom_cli::job::{Command as Cmd, JobSpec, Mode};
use taydom_core::scalar::{abs_q, rat};
use taydom_core::{DominationCertificate, IndexLaw, Rational, RecurrenceSpec, SRule};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_taydom"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("taydom-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_doc(name: &str, v: serde_json::Value) -> PathBuf {
    let p = scratch(name);
    std::fs::write(&p, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    p
}

fn fib() -> serde_json::Value {
    json!({ "spec": { "constant_part": ["1", "1"] }, "init": ["0", "1"] })
}

#[test]
fn certify_fibonacci_with_turan() {
    let doc = write_doc("fib.json", fib());
    let out = scratch("fib-report.json");
    let st = bin()
        .args(["certify", doc.to_str().unwrap(), "--method", "turan", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stderr));
    let text = String::from_utf8(st.stdout).unwrap();
    assert!(text.contains("turan") && text.contains("status: ok"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["details"]["certificate"]["n"], json!(1));
    assert_eq!(report["details"]["verification"]["pass"], json!(true));
    // the table shows the same R string as the document
    let r = report["details"]["certificate"]["r"].as_str().unwrap();
    assert!(text.contains(r));
}

#[test]
fn generate_zero_init_writes_zero_csv() {
    let doc = write_doc("zero.json", json!({ "spec": { "constant_part": ["2", "-1/3"] }, "init": ["0", "0"] }));
    let st = bin().args(["generate", doc.to_str().unwrap(), "--horizon", "10"]).output().unwrap();
    assert_eq!(st.status.code(), Some(0));
    let csv = String::from_utf8(st.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "k,num,den");
    assert_eq!(lines.len(), 12);
    for (k, l) in lines[1..].iter().enumerate() {
        assert_eq!(*l, format!("{k},0,1"));
    }
}

#[test]
fn float_csv_header() {
    let doc = write_doc("fib-float.json", fib());
    let csv = scratch("fib.csv");
    let st = bin()
        .args(["generate", doc.to_str().unwrap(), "--mode", "float", "--horizon", "5", "--csv", csv.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0));
    let body = std::fs::read_to_string(csv).unwrap();
    assert!(body.starts_with("k,re,im\n0,0,0\n1,1e+0,0\n"), "{body}");
}

#[test]
fn malformed_document_exits_with_schema_code() {
    let bad = scratch("bad.json");
    std::fs::write(&bad, "{ \"spec\": ").unwrap();
    let st = bin().args(["certify", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    let diag: serde_json::Value = serde_json::from_slice(&st.stderr).unwrap();
    assert_eq!(diag["error"]["kind"], json!("schema"));

    let wrong = write_doc("wrong.json", json!({ "spec": { "constant_part": [0.5] }, "init": ["1"] }));
    let st = bin().args(["certify", wrong.to_str().unwrap()]).output().unwrap();
    assert_eq!(st.status.code(), Some(2), "floating literals are not rationals");
}

#[test]
fn failed_verification_exits_with_three() {
    let doc = write_doc(
        "verify.json",
        json!({
            "certificate": { "n": 0, "r": "1", "s_rule": { "rule": "constant", "c": "1" }, "method": "manual" },
            "values": ["1", "2", "1"]
        }),
    );
    let st = bin().args(["verify", doc.to_str().unwrap()]).output().unwrap();
    assert_eq!(st.status.code(), Some(3));
    let text = String::from_utf8(st.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("* 1")), "{text}");
}

#[test]
fn saved_jobs_rerun_identically() {
    let doc = write_doc("fib-job.json", fib());
    let job = scratch("job.json");
    let out1 = scratch("r1.json");
    let out2 = scratch("r2.json");
    let st = bin()
        .args(["certify", doc.to_str().unwrap(), "--seed", "5", "--horizon", "120", "--emit-job", job.to_str().unwrap()])
        .args(["--out", out1.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0));
    let saved = std::fs::read_to_string(&job).unwrap();
    assert_eq!(JobSpec::from_json(&saved).unwrap().to_json(), saved);
    let st = bin().args(["--job", job.to_str().unwrap(), "--out", out2.to_str().unwrap()]).output().unwrap();
    assert_eq!(st.status.code(), Some(0));
    assert_eq!(std::fs::read(out1).unwrap(), std::fs::read(out2).unwrap());
}

#[test]
fn suite_subset_runs() {
    let out = scratch("suite.json");
    let st = bin()
        .args(["suite", "--only", "5,6", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stdout));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["details"]["criteria"]["5"]["pass"], json!(true));
}

#[test]
fn other_commands_accept_their_documents() {
    let cases = [
        ("dfinite", json!({ "family": "step" }), vec![]),
        (
            "zeros",
            json!({ "values": ["1", "-3", "2"], "radii": [0.25, 0.75, 2.0] }),
            vec![],
        ),
        (
            "bautin",
            json!({
                "recurrence": { "d": 1, "nvars": 1, "rules": [[{ "alpha": [1], "coeff": { "nvars": 1, "terms": [[[1], "1"]] } }]], "linear": true },
                "init": [{ "nvars": 1, "terms": [[[0], "1"]] }]
            }),
            vec!["--horizon", "8"],
        ),
        ("abel", json!({ "equation": { "p": ["1"], "q": [], "a": "0", "b": "1" } }), vec![]),
    ];
    for (cmd, doc, extra) in cases {
        let p = write_doc(&format!("{cmd}.json"), doc);
        let st = bin().arg(cmd).arg(&p).args(&extra).output().unwrap();
        assert_eq!(
            st.status.code(),
            Some(0),
            "{cmd}: {}{}",
            String::from_utf8_lossy(&st.stdout),
            String::from_utf8_lossy(&st.stderr)
        );
    }
}

fn q() -> impl Strategy<Value = Rational> {
    (-50i64..50, 1i64..20).prop_map(|(p, d)| rat(p, d))
}

fn law() -> impl Strategy<Value = IndexLaw> {
    prop_oneof![
        Just(IndexLaw::Zero),
        q().prop_map(IndexLaw::harmonic),
        q().prop_map(IndexLaw::dyadic_decay),
        q().prop_map(|value| IndexLaw::Constant { value }),
    ]
}

fn spec() -> impl Strategy<Value = RecurrenceSpec> {
    (1usize..5)
        .prop_flat_map(|d| (prop::collection::vec(q(), d), prop::collection::vec(law(), d)))
        .prop_filter_map("nonzero constant part", |(c, l)| RecurrenceSpec::new(c, l).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn job_round_trip(seed in any::<u64>(), horizon in prop::option::of(0usize..10_000), prec in prop::option::of(8u32..2000),
                      float in any::<bool>(), only in prop::collection::vec(1u8..=10, 0..4), scale in prop::option::of(0.001f64..4.0),
                      s in spec(), init in prop::collection::vec(q(), 1..4)) {
        let mut job = JobSpec::new(Cmd::Certify);
        job.seed = seed;
        job.horizon = horizon;
        job.precision = prec;
        job.mode = if float { Mode::Float } else { Mode::Exact };
        job.only = only;
        job.scale = scale;
        job.document = Some(serde_json::to_value(GenerateDoc { spec: s, init }).unwrap());
        let text = job.to_json();
        let back = JobSpec::from_json(&text).unwrap();
        prop_assert_eq!(&back, &job);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn documents_round_trip(s in spec(), init in prop::collection::vec(q(), 1..4), r in prop::option::of(q()),
                            n in 0usize..20, c in q()) {
        let doc = CertifyDoc { spec: s, init, method: Some("auto".into()), r, overrides: vec![] };
        let v = serde_json::to_string(&doc).unwrap();
        let back: CertifyDoc = serde_json::from_str(&v).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), v);
        prop_assert_eq!(back.spec, doc.spec);

        let cert = DominationCertificate::new(n, rat(1, 3), SRule::Constant { c: abs_q(&c) + rat(1, 1) }).unwrap();
        let v = serde_json::to_string(&cert).unwrap();
        prop_assert_eq!(serde_json::from_str::<DominationCertificate>(&v).unwrap(), cert);
    }

    #[test]
    fn abel_documents_round_trip(p in prop::collection::vec(-4i64..4, 0..4), qc in prop::collection::vec(-4i64..4, 0..4), a in -2i64..2) {
        let Ok(eq) = taydom_abel::AbelEquation::from_ints(&p, &qc, a, a + 1) else { return Ok(()) };
        let doc = AbelDoc { equation: eq, samples: vec![rat(1, 100)], x: Some(rat(1, 2)), radius: Some(0.1), moments: Some(5) };
        let v = serde_json::to_string(&doc).unwrap();
        let back: AbelDoc = serde_json::from_str(&v).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), v);
    }
}
