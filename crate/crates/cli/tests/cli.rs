use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn fsa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsa")).args(args).env_remove("FSA_THREADS").output().unwrap()
}

fn run(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![cmd, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    fsa(&args)
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// A bundled config edited in place and saved into `dir`.
fn edited(dir: &Path, name: &str, edit: impl FnOnce(&mut Value)) -> PathBuf {
    let mut v = json(&bundled(name));
    edit(&mut v);
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    path
}

fn small_grid(v: &mut Value) {
    v["pseudo"]["resolution"] = serde_json::json!({"nx": 21, "ny": 21});
}

#[test]
fn analyze_identity() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = run("analyze", &bundled("identity.json"), &out, &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = json(&out.join("report.json"));
    assert_eq!(report["inputs"], json(&bundled("identity.json")));
    assert_eq!(report["stable"], true);
    for q in ["norm", "inv_norm", "kappa"] {
        assert_eq!(report["reports"][q]["sequence_limsup"], 1.0, "{q}");
    }
    let csv = fs::read_to_string(out.join("samples.csv")).unwrap();
    assert!(csv.starts_with("quantity,n,value\nnorm,1,1\n"));
    assert_eq!(csv.lines().count(), 1 + 3 * 10);
}

#[test]
fn analyze_block_flip_and_kappa() {
    let tmp = TempDir::new().unwrap();
    let o = run("analyze", &bundled("blockflip03.json"), tmp.path(), &["--n-max", "12"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&tmp.path().join("report.json"));
    let v = r["reports"]["inv_norm"]["sequence_limsup"].as_f64().unwrap();
    assert!((v - 10.0 / 3.0).abs() < 1e-9, "{v}");
    assert_eq!(r["inputs"]["n_range"]["end"], 12);

    let o = run("analyze", &bundled("kappa_a.json"), tmp.path(), &["--n-max", "12"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&tmp.path().join("report.json"));
    let k = r["reports"]["kappa"]["sequence_limsup"].as_f64().unwrap();
    assert!((k - 16.0).abs() < 1e-9, "{k}");
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    let cfg = bundled("blockflip03.json");
    assert_eq!(code(&run("analyze", &cfg, &a, &["--n-max", "10"])), 0);
    assert_eq!(code(&run("analyze", &cfg, &b, &["--n-max", "10", "--parallel"])), 0);
    // the report itself is a valid config
    assert_eq!(code(&run("analyze", &a.join("report.json"), &c, &[])), 0);
    for f in ["report.json", "samples.csv"] {
        let first = fs::read(a.join(f)).unwrap();
        assert_eq!(first, fs::read(b.join(f)).unwrap(), "{f}");
        assert_eq!(first, fs::read(c.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn config_errors_name_the_path() {
    let tmp = TempDir::new().unwrap();
    let bad = edited(tmp.path(), "identity.json", |v| {
        v["operators"]["I"]["diagonals"][0]["lefty"] = Value::Bool(true);
    });
    let o = run("analyze", &bad, &tmp.path().join("out"), &[]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("$.operators.I.diagonals[0]"), "{}", stderr(&o));
    assert!(!tmp.path().join("out").exists());

    let o = run("analyze", &tmp.path().join("missing.json"), tmp.path(), &[]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("missing.json"));

    let o = run("analyze", &bundled("identity.json"), tmp.path(), &["--n-max", "0"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("--n-max"), "{}", stderr(&o));

    let o = run("pollution", &bundled("identity.json"), tmp.path(), &[]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("pollution"), "{}", stderr(&o));

    let o = fsa(&["analyze", "--out", "x"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn bad_thread_count() {
    let tmp = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_fsa"))
        .args(["analyze", "--config", bundled("identity.json").to_str().unwrap()])
        .args(["--out", tmp.path().to_str().unwrap()])
        .env("FSA_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("FSA_THREADS"));
}

#[test]
fn shift_sections_are_unstable() {
    let tmp = TempDir::new().unwrap();
    let o = run("analyze", &bundled("laurent_shift.json"), tmp.path(), &[]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let r = json(&tmp.path().join("report.json"));
    assert_eq!(r["stable"], false);
    assert_eq!(r["reports"]["inv_norm"]["sequence_limsup"], "inf");
}

#[test]
fn pseudo_writes_grids_and_summary() {
    let tmp = TempDir::new().unwrap();
    let cfg = edited(tmp.path(), "identity.json", small_grid);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let o = run("pseudo", &cfg, &a, &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(code(&run("pseudo", &cfg, &b, &["--parallel"])), 0);
    let s = json(&a.join("summary.json"));
    let files: Vec<&str> = s["files"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    assert_eq!(files, ["grid_n6.csv", "grid_n7.csv", "grid_n8.csv", "grid_n9.csv", "grid_n10.csv", "indicator_union.csv"]);
    for f in files.iter().chain(&["summary.json"]) {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let grid = fs::read_to_string(a.join("grid_n6.csv")).unwrap();
    assert!(grid.starts_with("re,im,mu\n"));
    assert_eq!(grid.lines().count(), 1 + 21 * 21);
    assert_eq!(s["summaries"][0]["consistent"], true);
    assert_eq!(s["summaries"][0]["verdict"]["verdict"], "convergent");
}

#[test]
fn shifted_flip_pseudospectra_do_not_converge() {
    let tmp = TempDir::new().unwrap();
    let cfg = edited(tmp.path(), "shiftedflip.json", |v| {
        v["pseudo"]["resolution"] = serde_json::json!({"nx": 41, "ny": 41});
    });
    let o = run("pseudo", &cfg, tmp.path(), &["--n-max", "12"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = json(&tmp.path().join("summary.json"));
    assert_eq!(s["summaries"][0]["sequence_converges"], false);
    assert_eq!(s["summaries"][0]["verdict"]["verdict"], "divergent");
}

fn verdict_of(out: &Path, kind: &str) -> Value {
    let v = json(&out.join("verdicts.json"));
    v["verdicts"].as_array().unwrap().iter().find(|r| r["quantity"]["kind"] == kind).unwrap()["verdict"].clone()
}

#[test]
fn converge_block_flips() {
    let tmp = TempDir::new().unwrap();
    let o = run("converge", &bundled("blockflip03.json"), tmp.path(), &[]);
    // the bundled grid is large; the scalar verdicts are what matter here
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = verdict_of(tmp.path(), "inv_norm");
    assert_eq!(v["verdict"], "divergent");
    assert_eq!(v["witnesses"], serde_json::json!([0, 1]));

    let o = run("converge", &bundled("blockflip07.json"), tmp.path(), &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(verdict_of(tmp.path(), "inv_norm")["verdict"], "convergent");
}

#[test]
fn converge_laurent_fs() {
    let tmp = TempDir::new().unwrap();
    let cfg = edited(tmp.path(), "laurent_fs.json", small_grid);
    let o = run("converge", &cfg, tmp.path(), &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&tmp.path().join("verdicts.json"));
    for r in v["verdicts"].as_array().unwrap() {
        assert_eq!(r["verdict"]["verdict"], "convergent", "{r}");
    }
}

#[test]
fn pollution_culprits() {
    let tmp = TempDir::new().unwrap();
    let o = run("pollution", &bundled("blockflip03.json"), tmp.path(), &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let p = json(&tmp.path().join("pollution.json"));
    let first = &p["results"][0];
    assert_eq!(first["lambda"], serde_json::json!([0.3, 0.0]));
    assert_eq!(first["attribution"], "pollution");
    let kinds: Vec<&str> = first["culprits"].as_array().unwrap().iter().map(|c| c["kind"].as_str().unwrap()).collect();
    assert!(!kinds.is_empty() && !kinds.contains(&"center"), "{kinds:?}");
    assert_eq!(p["results"][3]["attribution"], "clear");
}
