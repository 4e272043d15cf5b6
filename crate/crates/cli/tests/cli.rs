use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn model(name: &str) -> String {
    models().join(name).to_string_lossy().into_owned()
}

fn ctxcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctxcat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn enumerate_writes_a_reloadable_poset() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("poset.json");
    let o = ctxcat(&[
        "enumerate",
        "--model",
        &model("chain.json"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("3 contexts, 2 Hasse edges"));
    let loaded = ctxcat::io::parse_poset(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(loaded.poset.len(), 3);
    assert_eq!(loaded.observables, vec!["fine", "coarse"]);
}

#[test]
fn presheaf_check_reports_no_violations() {
    for m in [
        "qubit.json",
        "chain.json",
        "classical_line.json",
        "topologimeter_3x2.json",
    ] {
        let o = ctxcat(&["presheaf-check", "--model", &model(m)]);
        assert_eq!(code(&o), 0);
        assert!(
            stdout(&o).trim_end().ends_with("0 violations"),
            "{m}: {}",
            stdout(&o)
        );
        let j = json(&ctxcat(&["--json", "presheaf-check", "--model", &model(m)]));
        assert_eq!(j["violations"].as_array().unwrap().len(), 0);
    }
}

#[test]
fn minimax_on_the_classical_line() {
    let o = ctxcat(&[
        "minimax",
        "--model",
        &model("classical_line.json"),
        "--json",
    ]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert_eq!(j["minimax"], serde_json::json!([1]));
    assert_eq!(j["ties"], serde_json::json!([]));
}

#[test]
fn dot_output_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.dot");
    let b = dir.path().join("b.dot");
    for p in [&a, &b] {
        let o = ctxcat(&[
            "minimax",
            "--model",
            &model("classical_line.json"),
            "--dot",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
    }
    let (da, db) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(da, db);
    let text = String::from_utf8(da).unwrap();
    assert!(text.starts_with("digraph contexts {"));
    assert!(text.contains("minimax=true"));
    assert!(text.contains("style=dashed"));
}

#[test]
fn daseinise_single_context_and_all() {
    let dir = tempfile::tempdir().unwrap();
    let proj = write(
        dir.path(),
        "p.json",
        r#"{"matrix": [[[0.5, 0], [0.5, 0]], [[0.5, 0], [0.5, 0]]]}"#,
    );
    let qubit = model("qubit.json");
    let o = ctxcat(&[
        "--json",
        "daseinise",
        "--model",
        &qubit,
        "--projection",
        &proj,
        "--all",
    ]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    let results = j["results"].as_array().unwrap();
    assert_eq!(results.len(), 3);
    let ranks: Vec<(u64, u64)> = results
        .iter()
        .map(|r| {
            (
                r["inner"]["rank"].as_u64().unwrap(),
                r["outer"]["rank"].as_u64().unwrap(),
            )
        })
        .collect();
    // trivial: (0, 2); Sz: (0, 2); Sx contains the projection: (1, 1)
    assert_eq!(ranks, vec![(0, 2), (0, 2), (1, 1)]);

    let o = ctxcat(&[
        "daseinise",
        "--model",
        &qubit,
        "--projection",
        &proj,
        "--context",
        "2",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "c2: inner rank 1, outer rank 1\n");
}

#[test]
fn topologimeter_reports_line_and_circle() {
    let o = ctxcat(&[
        "--json",
        "topologimeter",
        "--m",
        "12",
        "--n",
        "9",
        "--measure",
        "--seed",
        "3",
    ]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert_eq!(j["b1_totals"], serde_json::json!({"A1": 0, "A2": 1}));
    assert_eq!(j["contexts"]["A2"]["spectrum_size"], 24);
    assert_eq!(j["measurements"][0]["topology"]["class"], "path-like");

    let o = ctxcat(&[
        "--json",
        "topologimeter",
        "--m",
        "3",
        "--n",
        "2",
        "--full-matrix",
    ]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert_eq!(j["cross_mode"], serde_json::json!({"A1": true, "A2": true}));
    assert_eq!(j["maximality"]["entries"]["A2"]["commutant_dim"], 6);
    assert_eq!(j["maximality"]["entries"]["A1"]["commutant_dim"], 4);
}

#[test]
fn ingest_reshapes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "d.csv", "1,2,3,4,5,6\n6,5,4,3,2,1\n");
    let out = dir.path().join("g.json");
    let o = ctxcat(&[
        "ingest",
        "--csv",
        &csv,
        "--rows",
        "2",
        "--cols",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let g: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(
        g["tables"][1],
        serde_json::json!([[6.0, 5.0, 4.0], [3.0, 2.0, 1.0]])
    );
}

#[test]
fn exit_code_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let bad_json = write(d, "bad.json", "{\"dim\": 2, \"observables\": ");
    let unknown_field = write(
        d,
        "unk.json",
        r#"{"dim": 1, "observables": {}, "colour": 1}"#,
    );
    let non_herm = write(
        d,
        "nh.json",
        r#"{"dim": 2, "observables": {"A": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]}}"#,
    );
    let short_row = write(d, "short.csv", "1,2,3\n");
    let text_field = write(d, "text.csv", "1,2,x,4\n");
    let not_proj = write(
        d,
        "np.json",
        r#"{"matrix": [[[2, 0], [0, 0]], [[0, 0], [0, 0]]]}"#,
    );
    let out = d.join("o.json");
    let out = out.to_str().unwrap();
    let qubit = model("qubit.json");
    let missing = d.join("missing.json");
    let missing = missing.to_str().unwrap();

    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["presheaf-check", "--model", &qubit], 0),
        (vec!["--help"], 0),
        (vec![], 1),
        (vec!["frobnicate"], 1),
        (vec!["enumerate", "--model", &qubit], 1),
        (
            vec!["daseinise", "--model", &qubit, "--projection", &not_proj],
            1,
        ),
        (
            vec![
                "daseinise",
                "--model",
                &qubit,
                "--projection",
                &not_proj,
                "--all",
            ],
            1,
        ),
        (
            vec![
                "daseinise",
                "--model",
                &qubit,
                "--projection",
                &not_proj,
                "--context",
                "0",
                "--all",
            ],
            1,
        ),
        (vec!["enumerate", "--model", missing, "--out", out], 1),
        (vec!["enumerate", "--model", &bad_json, "--out", out], 1),
        (
            vec!["enumerate", "--model", &unknown_field, "--out", out],
            1,
        ),
        (vec!["enumerate", "--model", &non_herm, "--out", out], 1),
        (
            vec![
                "ingest", "--csv", &short_row, "--rows", "2", "--cols", "2", "--out", out,
            ],
            1,
        ),
        (
            vec![
                "ingest",
                "--csv",
                &text_field,
                "--rows",
                "2",
                "--cols",
                "2",
                "--out",
                out,
            ],
            1,
        ),
        (
            vec![
                "ingest",
                "--csv",
                &text_field,
                "--rows",
                "0",
                "--cols",
                "2",
                "--out",
                out,
            ],
            1,
        ),
        (vec!["topologimeter", "--m", "2", "--n", "2"], 1),
        (vec!["topologimeter", "--m", "3", "--n", "x"], 1),
        (
            vec!["topologimeter", "--m", "3", "--n", "2", "--seed", "1"],
            1,
        ),
    ];
    for (args, want) in cases {
        let o = ctxcat(&args);
        assert_eq!(
            code(&o),
            want,
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        if want != 0 {
            assert!(!o.stderr.is_empty(), "{args:?}: no message");
        }
    }
    assert!(
        !Path::new(out).exists(),
        "failed commands must not leave output behind"
    );

    let o = ctxcat(&[
        "daseinise",
        "--model",
        &qubit,
        "--projection",
        &not_proj,
        "--context",
        "99",
    ]);
    assert_eq!(code(&o), 1);
}
