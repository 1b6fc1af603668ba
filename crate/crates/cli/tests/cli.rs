use std::fs;
use std::process::Command;

use disnet_cli::{emit_report, manifest_path, resolve, run_experiment, Cli, ExperimentConfig, Format, Kind};
use serde_json::Value;

fn disnet(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_disnet")).args(args).output().expect("binary runs")
}

fn config_from(args: &[&str]) -> ExperimentConfig {
    use clap::Parser;
    let cli = Cli::try_parse_from(std::iter::once("disnet").chain(args.iter().copied())).unwrap();
    let (kind, flags) = match cli.command {
        disnet_cli::Command::Resist(f) => (Kind::Resist, f),
        disnet_cli::Command::Sweep(f) => (Kind::Sweep, f),
        disnet_cli::Command::Bisect(f) => (Kind::Bisect, f),
        disnet_cli::Command::DrwZ(f) => (Kind::DrwZ, f),
        other => panic!("unexpected {other:?}"),
    };
    resolve(kind, &flags).unwrap()
}

const RESIST: [&str; 11] = ["resist", "--family", "z2", "--l1", "0.5", "--l2", "2", "--p", "0.5", "--radii", "3,6,12,24"];

#[test]
fn resist_csv_header() {
    let out = disnet(&[&RESIST[..], &["--seeds", "2"]].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("seed,p,n,R,nw_lower,flow_upper,residual,iters"));
    assert_eq!(lines.count(), 8);
    assert!(text.ends_with('\n') && !text.contains('\r'));
}

#[test]
fn same_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (name, jobs) in [("a.csv", "1"), ("b.csv", "1"), ("c.csv", "3")] {
        let path = dir.path().join(name);
        let p = path.to_str().unwrap();
        let out = disnet(&[&RESIST[..], &["--seeds", "4", "--jobs", jobs, "--out", p]].concat());
        assert!(out.status.success());
        files.push(fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(files[0], files[2]);
}

#[test]
fn manifest_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.json");
    let out = disnet(&[
        "sweep", "--family", "z1", "--l1", "0.5", "--l2", "2", "--p-grid", "0.3,0.9", "--radii", "25,50,100,200",
        "--seed", "7", "--seeds", "3", "--format", "json", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m: Value = serde_json::from_str(&fs::read_to_string(manifest_path(&path)).unwrap()).unwrap();
    assert_eq!(m["tool"], "disnet");
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["config"]["kind"], "sweep");
    assert_eq!(m["config"]["seeds"], serde_json::json!([7, 8, 9]));
    assert_eq!(m["config"]["p_grid"].as_array().unwrap().len(), 2);
    let data: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(data["result"]["rows"].as_array().unwrap().len(), 6);
}

#[test]
fn empty_seed_list_is_a_config_error() {
    let out = disnet(&[&RESIST[..], &["--seeds", "0"]].concat());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seeds"));
    assert!(out.stdout.is_empty());
}

#[test]
fn field_level_messages() {
    let cases: [(&[&str], &str); 5] = [
        (&["resist", "--family", "z2", "--l1", "0.5", "--l2", "2", "--radii", "3,6,12,24"], "p:"),
        (&["resist", "--family", "z2", "--l1", "-1", "--l2", "2", "--p", "0.5", "--radii", "3,6"], "l1:"),
        (&["resist", "--family", "z2", "--l1", "1", "--l2", "2", "--p", "1.5", "--radii", "3,6"], "p:"),
        (&["resist", "--family", "w2", "--l1", "1", "--l2", "2", "--p", "0.5", "--radii", "3,6"], "family:"),
        (&["resist", "--family", "z2", "--l1", "1", "--l2", "2", "--p", "0.5", "--radii", "6,3"], "radii:"),
    ];
    for (args, field) in cases {
        let out = disnet(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(field), "{args:?}: {err}");
    }
    assert_eq!(disnet(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(disnet(&["bisect", "--family", "z1", "--l1", "0.5", "--l2", "2", "--seeds", "5", "--radii", "1,2,3,4"]).status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    fs::write(&path, r#"{"family": "z2", "l1": 0.5, "l2": 2.0, "p": 0.2, "radii": [3, 6, 12, 24], "seeds": [1, 2]}"#).unwrap();
    let cfg = config_from(&["resist", "--config", path.to_str().unwrap(), "--p", "0.6"]);
    assert_eq!(cfg.p, Some(0.6));
    assert_eq!(cfg.seeds, vec![1, 2]);
    assert_eq!(cfg.radii, vec![3, 6, 12, 24]);
    fs::write(&path, r#"{"family": "z2", "bogus": 1}"#).unwrap();
    let out = disnet(&["resist", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bisect_report_schema() {
    let cfg = config_from(&[
        "bisect", "--family", "z1", "--l1", "0.5", "--l2", "2", "--radii", "25,50,100,200", "--seeds", "30", "--delta", "0.1",
    ]);
    let res = run_experiment(&cfg).unwrap();
    let doc: Value = serde_json::from_slice(&emit_report(&res, Format::Json)).unwrap();
    let r = &doc["result"];
    for key in ["family", "lambda1", "lambda2", "probes", "bracket", "closed_form", "status", "message"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert_eq!(r["family"], "z1");
    assert_eq!(r["status"], "no_transition");
    assert_eq!(r["bracket"].as_array().unwrap().len(), 2);
    for probe in r["probes"].as_array().unwrap() {
        assert_eq!(probe["verdicts"].as_array().unwrap().len(), 30);
        let f = &probe["fractions"];
        let total: f64 = ["recurrent", "undecided", "transient"].iter().map(|k| f[k].as_f64().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
    let csv = String::from_utf8(emit_report(&res, Format::Csv)).unwrap();
    assert!(csv.starts_with("p,recurrent,undecided,transient,median\n"));
}

#[test]
fn drw_z_above_threshold_is_transient() {
    let cfg = config_from(&["drw-z", "--l1", "0.5", "--l2", "2", "--p", "0.7", "--range", "100000", "--seeds", "50"]);
    let res = run_experiment(&cfg).unwrap();
    let transient = res.table.rows.iter().filter(|r| r[2] == "transient".into()).count();
    assert!(transient >= 45, "{transient} of 50");
    let csv = String::from_utf8(emit_report(&res, Format::Csv)).unwrap();
    assert!(csv.starts_with("seed,p,verdict,f_window_ratio,S_drift_left,S_drift_right\n"));
}

#[test]
fn every_subcommand_runs() {
    let runs: [&[&str]; 7] = [
        &["drw-tree", "--family", "t3", "--l1", "1.5", "--l2", "4"],
        &["tree-stats", "--family", "t3", "--p", "0.8", "--depth", "6", "--replicas", "20", "--format", "json"],
        &["crossings", "--width", "5", "--height", "4", "--p-grid", "0.3,0.7,1", "--seeds", "3"],
        &["current-uniq", "--l1", "0.5", "--l2", "1", "--p", "0.5", "--depth", "4"],
        &["speed", "--family", "z2", "--lambda", "0.5", "--steps", "1000", "--replicas", "4"],
        &["one-arm", "--family", "z2", "--p", "0.5", "--radii", "4,8", "--replicas", "50"],
        &["sweep", "--family", "t3", "--l1", "1.5", "--l2", "4", "--p-grid", "0.4,0.9", "--depth", "8"],
    ];
    for args in runs {
        let out = disnet(args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stdout.is_empty());
    }
    let out = disnet(&["crossings", "--width", "5", "--height", "4", "--p", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().nth(1).unwrap().rsplit(',').next(), Some("4"));
}

#[test]
fn graph_dump_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    let out = disnet(&[
        "resist", "--family", "z1", "--l1", "0.5", "--l2", "2", "--p", "0.5", "--radii", "1,2", "--dump", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# zd_ball d=1 radius=2 root=0 vertices=5 edges=4\n"));
    assert_eq!(text.lines().count(), 5);
}
