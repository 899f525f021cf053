use std::path::Path;
use std::process::{Command, Output};

use confspace::ce::CeEngine;
use confspace::lie::{build_lie_model, Variant};
use confspace::model::{preset_instances, serialize_model, PresetSpec};
use serde_json::Value;

mod schema;

fn run(args: &[&str]) -> Output {
    run_env(args, None)
}

fn run_env(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_confspace"));
    cmd.args(args).env_remove("CONFSPACE_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("CONFSPACE_CACHE_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON output")
}

const TORUS_AS_GENERAL: &str = r#"{
  "name": "torus-as-general",
  "n": 2,
  "connected": true,
  "orientable_surface": false,
  "untwisted": [{"degree": 0, "label": "1"}, {"degree": 1, "label": "a"}, {"degree": 1, "label": "b"}, {"degree": 2, "label": "p"}],
  "twisted": [{"degree": 0, "label": "1"}, {"degree": 1, "label": "a"}, {"degree": 1, "label": "b"}, {"degree": 2, "label": "p"}],
  "ww_products": [
    {"left_label": "1", "right_label": "1", "result": [{"label": "1", "coeff_num": 1}]},
    {"left_label": "1", "right_label": "a", "result": [{"label": "a", "coeff_num": 1}]},
    {"left_label": "1", "right_label": "b", "result": [{"label": "b", "coeff_num": 1}]},
    {"left_label": "1", "right_label": "p", "result": [{"label": "p", "coeff_num": 1}]},
    {"left_label": "a", "right_label": "b", "result": [{"label": "p", "coeff_num": 1}]}
  ],
  "uu_products": [
    {"left_label": "1", "right_label": "1", "result": [{"label": "1", "coeff_num": 1}]},
    {"left_label": "1", "right_label": "a", "result": [{"label": "a", "coeff_num": 1}]},
    {"left_label": "1", "right_label": "b", "result": [{"label": "b", "coeff_num": 1}]},
    {"left_label": "1", "right_label": "p", "result": [{"label": "p", "coeff_num": 1}]},
    {"left_label": "a", "right_label": "b", "result": [{"label": "p", "coeff_num": 1}]}
  ]
}"#;

#[test]
fn klein_twisted_csv() {
    let o = run(&["betti", "--manifold", "klein-bottle", "--k", "1..6", "--variant", "twisted", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "k,degree,dimension\n1,1,1\n1,2,1\n3,3,1\n3,4,1\n5,5,1\n5,6,1\n"
    );
}

#[test]
fn weight_zero_is_one_row() {
    let o = run(&["betti", "--manifold", "euclidean", "--param", "n=2", "--k", "0", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "k,degree,dimension\n0,0,1\n");
}

#[test]
fn dense_and_raw_degrees() {
    let sparse = stdout(&run(&["betti", "-m", "euclidean", "--param", "n=2", "--k", "3", "--format", "csv"]));
    assert_eq!(sparse, "k,degree,dimension\n3,0,1\n3,1,1\n");
    let dense = stdout(&run(&["betti", "-m", "rp-even", "--param", "n=2", "--k", "2", "--format", "csv", "--dense"]));
    assert_eq!(dense, "k,degree,dimension\n2,0,1\n2,1,0\n2,2,0\n2,3,1\n");
    // Odd n with twisted coefficients shifts each weight by one degree.
    let space = stdout(&run(&["betti", "-m", "sphere", "--param", "n=3", "--k", "2", "--variant", "twisted", "--format", "csv"]));
    let raw = stdout(&run(&[
        "betti", "-m", "sphere", "--param", "n=3", "--k", "2", "--variant", "twisted", "--format", "csv", "--raw-degrees",
    ]));
    let degrees = |s: &str| -> Vec<usize> {
        s.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect()
    };
    let (a, b) = (degrees(&space), degrees(&raw));
    assert_eq!(a.len(), b.len());
    assert!(a.iter().zip(&b).all(|(x, y)| x + 2 == *y));
}

#[test]
fn table_format_is_aligned() {
    let o = run(&["betti", "-m", "punctured-torus", "--k", "2"]);
    assert_eq!(
        stdout(&o),
        "# punctured-torus, standard, space degrees\nk  degree  dimension\n2       0          1\n2       1          2\n2       2          2\n"
    );
}

#[test]
fn json_round_trips_to_the_library_table() {
    let o = run(&["betti", "-m", "nonorientable-surface", "--param", "h=3", "--k", "0..5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    schema::check("betti", &doc);
    let rows: Vec<(usize, usize, usize)> = doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            let f = |k: &str| r[k].as_u64().unwrap() as usize;
            (f("k"), f("degree"), f("dimension"))
        })
        .collect();
    let model = PresetSpec::new("nonorientable-surface", &[("h", 3)]).build().unwrap();
    let engine = CeEngine::new(build_lie_model(&model, Variant::Standard).unwrap());
    let ks: Vec<usize> = (0..=5).collect();
    assert_eq!(rows, engine.betti_table(&ks).unwrap().entries());
}

#[test]
fn model_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("torus.json");
    std::fs::write(&good, TORUS_AS_GENERAL).unwrap();
    let o = run(&["betti", "--manifold", good.to_str().unwrap(), "--k", "2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "k,degree,dimension\n2,0,1\n2,1,2\n2,2,1\n");

    // A class above the top degree.
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"name": "bad", "n": 2, "connected": false,
            "untwisted": [{"degree": 3, "label": "x"}], "twisted": []}"#,
    )
    .unwrap();
    let o = run(&["betti", "--manifold", bad.to_str().unwrap(), "--k", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("invalid"), "{}", stderr(&o));

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ \"name\": ").unwrap();
    let o = run(&["betti", "--manifold", broken.to_str().unwrap(), "--k", "1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["betti", "--manifold", good.to_str().unwrap(), "--param", "n=3", "--k", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["betti", "--manifold", "no-such-thing", "--k", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stability_commands() {
    let o = run(&["stability", "--manifold", "klein-bottle", "--kmax", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("verdict   pass"));
    assert!(text.contains("sharp     onto but not iso at k=0 degree=1"));
    assert!(text.contains("k=5 degree=6"));

    let o = run(&["stability", "--manifold", "orientable-surface", "--param", "g=2", "--kmax", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("range     orientable surface: iso for * < k, onto for * = k"));

    let o = run(&["stability", "--manifold", "euclidean", "--param", "n=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n > 1"));

    let o = run(&["stability", "--manifold", "klein-bottle", "--kmax", "3", "--format", "json"]);
    schema::check("stability", &json(&o));
    let o = run(&["stability", "--manifold", "klein-bottle", "--kmax", "2", "--format", "csv"]);
    assert!(stdout(&o).starts_with("k,degree,source_dim,target_dim,rank,iso,surjective,expected\n0,0,1,1,1,yes,yes,iso\n"));
}

#[test]
fn stability_violation_exits_one() {
    // The torus satisfies only the surface range; declaring it a general
    // manifold produces a real counterexample.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("torus.json");
    std::fs::write(&path, TORUS_AS_GENERAL).unwrap();
    let o = run(&["stability", "--manifold", path.to_str().unwrap(), "--kmax", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("first counterexample: k=2 degree=2"));
}

#[test]
fn check_commands() {
    for args in [
        &["check", "--manifold", "punctured-euclidean", "--param", "n=3,m=2", "--kmax", "6"][..],
        &["check", "--manifold", "torus", "--kmax", "4"][..],
        &["check", "--manifold", "sphere", "--param", "n=3", "--kmax", "8"][..],
        &["check", "--manifold", "moebius-closed", "--variant", "relative", "--kmax", "5"][..],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}\n{}", stdout(&o));
        assert!(stdout(&o).contains(" 0 disagreements"));
    }
    let sphere = stdout(&run(&["check", "-m", "sphere", "--param", "n=3", "--kmax", "8"]));
    assert_eq!(sphere.lines().filter(|l| l.contains("sym-power")).count(), 9);
    let torus = stdout(&run(&["check", "-m", "torus", "--kmax", "4"]));
    assert!(!torus.contains("golden"));

    let o = run(&["check", "-m", "klein-bottle", "--variant", "twisted", "--kmax", "3", "--format", "json"]);
    schema::check("check", &json(&o));
    let o = run(&["check", "-m", "torus", "--variant", "relative"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn presets_listing() {
    let o = run(&["presets", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    schema::check("presets", &doc);
    assert!(doc.as_array().unwrap().len() >= 12);

    let o = run(&["presets", "--filter", "surface", "--format", "csv"]);
    let names: Vec<String> = stdout(&o).lines().skip(1).map(|l| l.split(',').next().unwrap().to_string()).collect();
    assert_eq!(names, ["orientable-surface", "nonorientable-surface"]);
    assert!(stdout(&run(&["presets"])).lines().count() >= 24);
}

#[test]
fn cap_exceeded_exits_three() {
    let o = run(&["betti", "-m", "orientable-surface", "--param", "g=3", "--k", "8", "--max-slice-dim", "100"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("above the cap"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["betti", "-m", "orientable-surface", "--param", "g=2", "--k", "0..5", "--format", "json"][..],
        &["stability", "-m", "klein-bottle", "--kmax", "4"][..],
        &["check", "-m", "punctured-torus", "--kmax", "4", "--format", "csv"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.stdout, b.stdout);
        let mut sequential = vec!["--sequential"];
        sequential.extend_from_slice(args);
        assert_eq!(run(&sequential).stdout, a.stdout);
    }
}

#[test]
fn disk_cache() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["betti", "-m", "punctured-torus", "--k", "0..4", "--format", "csv", "--dense"];
    let plain = run(&args);
    let first = run_env(&args, Some(dir.path()));
    assert_eq!(first.stdout, plain.stdout);
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 5);
    let second = run_env(&args, Some(dir.path()));
    assert_eq!(second.stdout, plain.stdout);

    // A damaged entry is recomputed.
    std::fs::write(&files[0], "not json").unwrap();
    let third = run_env(&args, Some(dir.path()));
    assert_eq!(third.stdout, plain.stdout);

    // Another variant does not reuse these entries.
    run_env(&["betti", "-m", "punctured-torus", "--k", "0..4", "--variant", "twisted"], Some(dir.path()));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 10);
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(run(&["betti", "-m", "torus", "--k", "5..2"]).status.code(), Some(2));
    assert_eq!(run(&["betti", "-m", "torus"]).status.code(), Some(2));
    assert_eq!(run(&["betti", "-m", "torus", "--k", "1", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&["betti", "-m", "euclidean", "--param", "n", "--k", "1"]).status.code(), Some(2));
    assert_eq!(run(&["betti", "-m", "sphere", "--param", "n=2,q=1", "--k", "1"]).status.code(), Some(2));
}

#[test]
fn model_files_match_their_schema() {
    schema::check_model(&serde_json::from_str(TORUS_AS_GENERAL).unwrap());
    for spec in preset_instances() {
        let text = serialize_model(&spec.build().unwrap()).unwrap();
        schema::check_model(&serde_json::from_str(&text).unwrap());
    }
    let extra: Value = serde_json::from_str(r#"{"name": "x", "n": 2, "connected": true, "genus": 1}"#).unwrap();
    let root = schema::load_file("model.schema.json");
    assert!(!schema::validate(&root, &root, &extra, "$").is_empty());
}
