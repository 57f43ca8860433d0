use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hcls::geometry::hyperbolic_distance_stable;
use hcls::graph::read_edge_list;
use hcls::vi::Checkpoint;
use hcls::PolarPoint;
use hcls_cli::commands::Truth;
use hcls_cli::dataset::load_edge_list;

fn hcls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcls"))
        .args(args)
        .env_remove("HCLS_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_grid_config(dir: &Path) -> PathBuf {
    let cfg = dir.join("grid.json");
    fs::write(
        &cfg,
        r#"{"N": [30], "R": [3], "reps": 2, "T": 0.01, "geometry": "hyperbolic", "seed": 4}"#,
    )
    .unwrap();
    cfg
}

fn list(dir: &Path, suffix: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.to_str().unwrap().ends_with(suffix))
        .collect();
    v.sort();
    v
}

#[test]
fn generate_writes_pairs_and_reruns_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_grid_config(tmp.path());
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        let o = hcls(&["generate", "--config", s(&cfg), "--out", s(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let edges = list(&a, ".edges");
    assert_eq!(edges.len(), 2);
    assert_eq!(list(&a, ".truth.json").len(), 2);
    for e in &edges {
        let twin = b.join(e.file_name().unwrap());
        assert_eq!(fs::read(e).unwrap(), fs::read(twin).unwrap());
    }
    // save → load keeps the edge set
    let text = fs::read(&edges[0]).unwrap();
    let g = read_edge_list(text.as_slice()).unwrap();
    let loaded = load_edge_list(&edges[0]).unwrap();
    assert_eq!(loaded.graph, g);
    let truth: Truth = serde_json::from_slice(&fs::read(edges[0].with_extension("truth.json")).unwrap()).unwrap();
    assert_eq!(truth.config.n(), 30);
}

#[test]
fn metrics_csv_has_fixed_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("k4.txt");
    fs::write(&path, "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n").unwrap();
    let o = hcls(&["metrics", s(&path)]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "graph,n,m,density,circuit_rank,clustering,mean_betweenness,mean_closeness,mean_eigenvector,mean_path_length,modularity"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..6], ["k4", "4", "6", "1", "3", "1"]);
}

#[test]
fn fit_vi_smoke_and_export_is_canonical_isometry() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("toy.txt");
    // two triangles joined by a bridge, plus a pendant
    fs::write(&path, "0 1\n1 2\n0 2\n2 3\n3 4\n4 5\n3 5\n5 6\n").unwrap();
    let out = tmp.path().join("out");
    let o = hcls(&["fit", s(&path), "--engine", "vi", "--model", "hcls", "--epochs", "200", "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let auc = report["auc"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&auc));
    assert!(report["accuracy"].as_f64().is_some());

    let ckpt_path = out.join("toy.hcls.vi.ckpt");
    let ckpt = Checkpoint::load(&ckpt_path).unwrap();
    let csv = tmp.path().join("emb.csv");
    let svg = tmp.path().join("emb.svg");
    let o = hcls(&["export-embedding", s(&ckpt_path), "--out", s(&csv), "--svg", s(&svg)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(&svg).unwrap().contains("<svg"));
    let rows: Vec<Vec<f64>> = fs::read_to_string(&csv)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 7);
    let anchor = (0..7)
        .min_by(|&a, &b| ckpt.embedding[a][0].total_cmp(&ckpt.embedding[b][0]))
        .unwrap();
    assert_eq!(rows[anchor][2], 0.0);
    let degrees = ckpt.header.degrees.clone();
    let mass: f64 = rows.iter().zip(&degrees).map(|(r, &d)| d as f64 * r[2].sin()).sum();
    assert!(mass >= 0.0);
    let point = |p: [f64; 2]| PolarPoint::new(p[0], p[1]).unwrap();
    for i in 0..7 {
        for j in (i + 1)..7 {
            let before = hyperbolic_distance_stable(point(ckpt.embedding[i]), point(ckpt.embedding[j]));
            let after = hyperbolic_distance_stable(point([rows[i][1], rows[i][2]]), point([rows[j][1], rows[j][2]]));
            assert!((before - after).abs() <= 1e-10 * before.max(1.0));
        }
    }

    let o = hcls(&["info", s(&ckpt_path)]);
    let info: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(info["kind"], "checkpoint");
    assert_eq!(info["n"], 7);
}

#[test]
fn fixed_temperature_model_pins_half() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("p.txt");
    fs::write(&path, "0 1\n1 2\n2 3\n3 4\n").unwrap();
    let o = hcls(&[
        "fit", s(&path), "--model", "hcls-fixed-T", "--epochs", "50", "--hidden", "8", "--out", s(tmp.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["params"]["temperature"].as_f64().unwrap(), 0.5);
}

#[test]
fn hmc_fit_with_truth_reports_correlations() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_grid_config(tmp.path());
    let gen = tmp.path().join("gen");
    assert!(hcls(&["generate", "--config", s(&cfg), "--out", s(&gen)]).status.success());
    let edges = &list(&gen, ".edges")[0];
    let truth = edges.with_extension("truth.json");
    let out = tmp.path().join("fit");
    let o = hcls(&[
        "fit", s(edges), "--engine", "hmc", "--warmup", "40", "--draws", "20", "--leapfrog", "8", "--epochs", "100",
        "--truth", s(&truth), "--out", s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report["pearson"].as_f64().is_some() && report["spearman"].as_f64().is_some());
    let stem = edges.file_stem().unwrap().to_str().unwrap();
    let draws = fs::read_to_string(out.join(format!("{stem}.hcls.hmc.draws.csv"))).unwrap();
    assert_eq!(draws.lines().next().unwrap(), "iter,R,alpha,T");
    assert_eq!(draws.lines().count(), 21);
    assert!(out.join(format!("{stem}.hcls.hmc.diagnostics.json")).exists());
}

#[test]
fn hmc_size_guard_and_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let big = tmp.path().join("big.txt");
    let text: String = (0..600).map(|i| format!("{} {}\n", i, (i + 1) % 600)).collect();
    fs::write(&big, text).unwrap();
    let o = hcls(&["fit", s(&big), "--engine", "hmc", "--out", s(tmp.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--force"));

    let empty = tmp.path().join("empty.txt");
    fs::write(&empty, "").unwrap();
    assert_eq!(hcls(&["metrics", s(&empty)]).status.code(), Some(2));

    let bad = tmp.path().join("bad.txt");
    fs::write(&bad, "0 1\nnope\n").unwrap();
    let o = hcls(&["info", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    assert_eq!(hcls(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(hcls(&["fit", s(&bad), "--model", "nope"]).status.code(), Some(1));
    assert_eq!(hcls(&["--help"]).status.code(), Some(0));
}

#[test]
fn info_reports_self_loops_and_relabelling() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("labels.txt");
    fs::write(&path, "10 20\n20 20\n20 30\n10 20\n").unwrap();
    let o = hcls(&["info", s(&path)]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("1 self-loop"));
    let info: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(info["n"], 3);
    assert_eq!(info["m"], 2);
    assert_eq!(info["self_loops_dropped"], 1);
    assert_eq!(info["duplicates_merged"], 1);
    assert_eq!(info["relabelled"], true);
}

#[test]
fn experiment_table2_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("t2.json");
    fs::write(
        &cfg,
        r#"{"n": [30, 50], "radius": [3], "replicates": 3, "jobs": 2,
            "fit": {"vi": {"epochs": 40, "hidden_dim": 8}}}"#,
    )
    .unwrap();
    let out = tmp.path().join("exp");
    let o = hcls(&["experiment", "table2", "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("table2.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "N,R,model,replicates,auc_mean,auc_max,auc_prop_best,accuracy_mean,accuracy_max,accuracy_prop_best"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2 * 3);
    for m in ["hcls", "hcls-fixed-T", "ecls"] {
        assert_eq!(rows.iter().filter(|r| r.split(',').nth(2) == Some(m)).count(), 2);
    }
    assert_eq!(fs::read_to_string(out.join("table2_runs.csv")).unwrap().lines().count(), 1 + 2 * 3 * 3);
}

#[test]
fn experiment_misspec_and_fig5_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("exp");
    let o = hcls(&[
        "experiment", "misspec", "--n", "30", "--reps", "2", "--epochs", "30", "--out", s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let pw = fs::read_to_string(out.join("misspec_pairwise.csv")).unwrap();
    assert_eq!(pw.lines().count(), 1 + 3 * 3 * 2);
    assert!(pw.contains("euclidean-T0.5") && pw.contains("hyperbolic-T0.01"));

    let o = hcls(&["experiment", "fig5", "--reps", "4", "--n", "40", "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = fs::read_to_string(out.join("fig5_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 2 * 3);
    assert_eq!(fs::read_to_string(out.join("fig5.csv")).unwrap().lines().count(), 1 + 2 * 3 * 4);
}
