use std::path::Path;
use std::process::Command;

use dline_core::cli::{run, EXIT_INDETERMINATE, EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK};
use dline_core::cosets::library::dihedral;
use dline_core::cosets::GroupSpec;
use dline_core::germs::{make_wa, Germ};
use tempfile::TempDir;

fn dline(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("dline").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn file(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn json_file<T: serde::Serialize>(dir: &TempDir, name: &str, v: &T) -> String {
    file(dir, name, &serde_json::to_string(v).unwrap())
}

/// Parses and re-emits; the bytes must not change.
fn assert_round_trips(out: &str) {
    let v: serde_json::Value = serde_json::from_str(out).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", out);
}

fn d3_file(dir: &TempDir) -> String {
    let g = dihedral(3);
    let a = g.subgroup_by_names(&["e", "s"]).unwrap();
    let b = g.subgroup_by_names(&["e", "sr"]).unwrap();
    json_file(dir, "d3.json", &GroupSpec::from_group(&g, &[("A", &a), ("B", &b)]))
}

const JOIN_SPEC: &str = r#"{
    "charts": [{"image": [-1, 1], "map": "identity"}, {"image": [0, 2]}],
    "transitions": [{"between": [0, 1], "pieces": [{"from": 0, "to": 1, "coeffs": [0, 0.5, 0.5]}]}],
    "k": 2
}"#;

#[test]
fn cosets_by_name_and_by_elements() {
    let dir = TempDir::new().unwrap();
    let g = d3_file(&dir);
    let (code, out, _) = dline(&["cosets", &g, "--C", "A", "--D", "B"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("r2") && out.contains("sr2"), "{out}");
    let (code, by_names, _) = dline(&["cosets", &g, "--C", "e,s", "--D", "e,sr"]);
    assert_eq!((code, &by_names), (EXIT_OK, &out));
    let (code, pm, _) = dline(&["cosets", &g, "--D", "A", "--pm", "--json"]);
    assert_eq!(code, EXIT_OK);
    assert_round_trips(&pm);
    let (code, _, err) = dline(&["cosets", &g, "--C", "e,r", "--D", "A"]);
    assert_eq!(code, EXIT_INPUT, "{err}");
}

#[test]
fn classify_exit_codes_and_table() {
    let (code, out, _) = dline(&["classify", "--a", "2", "--b", "0.5", "--k", "2"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("fix") && out.contains("ex") && out.contains("nonempty"), "{out}");
    let (code, out, _) = dline(&["classify", "--a", "2", "--b", "3", "--k", "1"]);
    assert_eq!(code, EXIT_NEGATIVE);
    assert!(out.contains("not diffeomorphic"));
    let (code, out, _) = dline(&["classify", "--a", "1/3", "--b", "3", "--json"]);
    assert_eq!(code, EXIT_OK);
    assert_round_trips(&out);
    let (code, _, _) = dline(&["classify", "--a", "-2", "--b", "3"]);
    assert_eq!(code, EXIT_INPUT);
}

#[test]
fn classify_grid_is_ordered() {
    let (code, out, _) = dline(&["classify", "--grid", "2,0.5,3", "--json"]);
    assert_eq!(code, EXIT_OK);
    assert_round_trips(&out);
    let v: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
    let pairs: Vec<(String, String)> =
        v.iter().map(|e| (e["a"].as_str().unwrap().into(), e["b"].as_str().unwrap().into())).collect();
    let vals = ["2", "0.5", "3"];
    let want: Vec<(String, String)> =
        vals.iter().flat_map(|a| vals.iter().map(move |b| (a.to_string(), b.to_string()))).collect();
    assert_eq!(pairs, want);
    let (_, again, _) = dline(&["classify", "--grid", "2,0.5,3", "--json"]);
    assert_eq!(again, out);
}

#[test]
fn germ_subcommands() {
    let dir = TempDir::new().unwrap();
    let w2 = json_file(&dir, "w2.json", &make_wa(2.0).unwrap());
    let sq = json_file(&dir, "sq.json", &Germ::polynomial(&[1.0, 1.0]).unwrap());
    let (code, out, _) = dline(&["germ", "invert", &w2, "--json"]);
    assert_eq!(code, EXIT_OK);
    assert_round_trips(&out);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["exact"], true);
    let (code, out, _) = dline(&["germ", "invert", &sq, "--json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!((v["exact"].clone(), v["provenance"].clone()), (false.into(), "inverted_numerically".into()));
    let (code, out, _) = dline(&["germ", "jet", &sq, "--k", "3"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("x>0: 1, 2, 0"), "{out}");
    let (code, out, _) = dline(&["germ", "compose", &w2, &sq, "--json"]);
    assert_eq!(code, EXIT_OK);
    assert_round_trips(&out);
    let (code, out, _) = dline(&["germ", "wa", "--a", "3"]);
    assert_eq!(code, EXIT_OK);
    assert!(!out.is_empty());
}

#[test]
fn structure_same_answers() {
    let dir = TempDir::new().unwrap();
    let w2 = json_file(&dir, "w2.json", &make_wa(2.0).unwrap());
    let id = json_file(&dir, "id.json", &Germ::identity());
    let spec = file(
        &dir,
        "spec.json",
        &format!(r#"{{"special_atlas": {{"h": {}}}, "k": 2}}"#, serde_json::to_string(&Germ::linear(3.0).unwrap()).unwrap()),
    );
    let (code, out, _) = dline(&["structure", "same", "--h", &w2, "--g", &id, "--k", "2"]);
    assert_eq!(code, EXIT_NEGATIVE);
    assert!(out.starts_with("false"), "{out}");
    // Linear germs all give the standard structure.
    let (code, out, _) = dline(&["structure", "same", "--h", &spec, "--g", &id]);
    assert_eq!(code, EXIT_OK, "{out}");
    let (code, out, _) = dline(&["structure", "same", "--h", &w2, "--g", &w2, "--json"]);
    assert_eq!(code, EXIT_OK);
    assert_round_trips(&out);
}

#[test]
fn psi_selfcheck() {
    for a in ["1", "4", "2.5"] {
        let (code, out, _) = dline(&["psi", "--a", a, "--selfcheck"]);
        assert_eq!(code, EXIT_OK, "{out}");
    }
    let (code, out, _) = dline(&["psi", "--a", "4", "--selfcheck", "--json"]);
    assert_eq!(code, EXIT_OK);
    assert_round_trips(&out);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["selfcheck"]["pass"], true);
    assert_eq!(dline(&["psi", "--a", "0"]).0, EXIT_INPUT);
}

#[test]
fn join_writes_a_certified_chart() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "join.json", JOIN_SPEC);
    let out_path = dir.path().join("chart.json");
    let (code, out, err) = dline(&["join", &spec, "--out", out_path.to_str().unwrap(), "--json"]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_round_trips(&out);
    assert_eq!(std::fs::read_to_string(&out_path).unwrap(), out);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["certified"], true);
    let (code, human, _) = dline(&["join", &spec, "--order", "middle-out", "--tol", "1e-3"]);
    assert_eq!(code, EXIT_OK);
    assert!(human.contains("certified"));
}

#[test]
fn verify_pass_fail_and_refine() {
    let dir = TempDir::new().unwrap();
    let xabsx = file(
        &dir,
        "xabsx.json",
        r#"{"pieces": [{"from": -1, "to": 0, "coeffs": [0, 1, -1]}, {"from": 0, "to": 1, "coeffs": [0, 1, 1]}]}"#,
    );
    let (code, out, _) = dline(&["verify", &xabsx, "--k", "1", "--json"]);
    assert_eq!(code, EXIT_OK);
    assert_round_trips(&out);
    let (code, _, _) = dline(&["verify", &xabsx, "--k", "2"]);
    assert_eq!(code, EXIT_NEGATIVE);
    let (code, out, _) = dline(&["verify", &xabsx, "--k", "1", "--refine", "1", "--json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["refinement"], 1);
}

#[test]
fn malformed_input_is_exit_2_with_location() {
    let dir = TempDir::new().unwrap();
    let broken = file(&dir, "broken.json", "{\"pieces\": [\n  {\"from\": 0,,}\n]}");
    let (code, _, err) = dline(&["verify", &broken, "--k", "1"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("line 2"), "{err}");
    let missing = dir.path().join("nope.json");
    assert_eq!(dline(&["join", missing.to_str().unwrap()]).0, EXIT_INPUT);
    assert_eq!(dline(&["classify", "--a", "2", "--b", "3", "--bogus"]).0, EXIT_INPUT);
    assert_eq!(dline(&[]).0, EXIT_INPUT);
    let (code, out, _) = dline(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("cosets"));
}

#[test]
fn infeasible_glue_is_exit_3() {
    let dir = TempDir::new().unwrap();
    // Transition flat at the left end and steep at the right: no eps leaves
    // room for the bump mass.
    let samples: Vec<[f64; 2]> = (0..=400)
        .map(|i| {
            let x = 1.0 + i as f64 / 400.0;
            let t = x - 1.0;
            [x, 1.0 + ((3000.0 * (t - 1.0)).exp() + 1e-6 * t - (-3000.0f64).exp()) / (1.0 + 1e-6 - (-3000.0f64).exp())]
        })
        .collect();
    let spec = serde_json::json!({
        "charts": [{"image": [0, 2]}, {"image": [1, 3]}],
        "transitions": [{"between": [0, 1], "samples": samples}],
    });
    let path = json_file(&dir, "steep.json", &spec);
    let (code, _, err) = dline(&["join", &path]);
    assert_eq!(code, EXIT_INDETERMINATE, "{err}");
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_dline");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code().unwrap();
    assert_eq!(status(&["classify", "--a", "2", "--b", "3"]), EXIT_NEGATIVE);
    assert_eq!(status(&["psi", "--a", "1", "--selfcheck"]), EXIT_OK);
    assert_eq!(status(&["cosets", "/nonexistent/group.json", "--C", "A"]), EXIT_INPUT);
    assert!(Path::new(bin).exists());
}
