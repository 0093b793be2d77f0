use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_pk-cutoff");

const TWO_POINTS: &str = r#"{"balls":[{"center":[[1,0],[0,0]],"radius":0},{"center":[[0.6,0],[0,0.8]],"radius":0}]}"#;

fn write_config(dir: &Path, extra: &str, deltas: &str) -> std::path::PathBuf {
    let path = dir.join("cfg.json");
    let text = format!(r#"{{{extra}"deltas":{deltas},"set":{TWO_POINTS}}}"#);
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn verify_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#""samples":4000,"#, "[0.1]");
    let out = dir.path().join("out");
    let o = run(&["verify", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("verify_delta_0.1.json")).unwrap()).unwrap();
    assert_eq!(report["max_dev_on_K"], 0.0);
    assert_eq!(report["max_val_off_Kdelta"], 0.0);
    assert_eq!(report["pass"], true);
}

#[test]
fn delta_at_or_above_delta0_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "", "[0.4]");
    let o = run(&["verify", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("deltas"));
}

#[test]
fn single_sample_still_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#""S":1,"#, "[0.1]");
    let o = run(&["verify", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn scaling_needs_three_deltas() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "", "[0.2, 0.1]");
    let o = run(&["scaling", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("deltas"));
}

#[test]
fn scaling_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#""samples":4000,"grid":{"points":50},"#, "[0.2, 0.1, 0.05]");
    let out = dir.path().join("out");
    let o = run(&["scaling", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(code(&o) == 0 || code(&o) == 1);
    let csv = fs::read_to_string(out.join("scaling_alpha1.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("delta,theta,seminorm"));
    assert_eq!(lines.count(), 3);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("scaling_alpha1.json")).unwrap()).unwrap();
    assert_eq!(summary["alpha"], 1);
    assert!(summary["slope"].is_number());
}

#[test]
fn eval_at_centre_and_far_away() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#""samples":2000,"#, "[0.1]");
    let pts = dir.path().join("pts.csv");
    // [1:0] is in K; [1:1] is at distance π/4 from both centres
    fs::write(&pts, "re0,im0,re1,im1\n1,0,0,0\n1,0,1,0\n").unwrap();
    let out = dir.path().join("out");
    let o = run(&["eval", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--points", pts.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("eval.csv")).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "re0,im0,re1,im1,chi");
    let chi = |r: &str| r.rsplit(',').next().unwrap().parse::<f64>().unwrap();
    assert_eq!(chi(rows[1]), 1.0);
    assert_eq!(chi(rows[2]), 0.0);
}

#[test]
fn eval_empty_input_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#""samples":10,"#, "[0.1]");
    let pts = dir.path().join("pts.csv");
    fs::write(&pts, "re0,im0,re1,im1\n").unwrap();
    let o = run(&["eval", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--points", pts.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_to_string(dir.path().join("eval.csv")).unwrap(), "re0,im0,re1,im1,chi\n");
}

#[test]
fn eval_malformed_row_names_the_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#""samples":10,"#, "[0.1]");
    let pts = dir.path().join("pts.csv");
    fs::write(&pts, "re0,im0,re1,im1\n1,0,0,0\n1,0,x,0\n").unwrap();
    let o = run(&["eval", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--points", pts.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 2"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#""samples":3000,"grid":{"points":40},"#, "[0.2, 0.1, 0.05]");
    let mut outputs = Vec::new();
    for run_id in 0..2 {
        let out = dir.path().join(format!("run{run_id}"));
        let o = run(&["scaling", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(code(&o) <= 1);
        outputs.push((
            fs::read(out.join("scaling_alpha1.csv")).unwrap(),
            fs::read(out.join("scaling_alpha1.json")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn seed_flag_changes_samples() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#""samples":500,"grid":{"points":20},"#, "[0.2, 0.1, 0.05]");
    let read = |seed: &str| {
        let out = dir.path().join(format!("s{seed}"));
        run(&["scaling", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", seed]);
        fs::read_to_string(out.join("scaling_alpha1.csv")).unwrap()
    };
    assert_ne!(read("1"), read("2"));
}

#[test]
fn bundled_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["verify_k1.json", "scaling_alpha1.json", "scaling_alpha2.json"] {
        pk_cutoff::cli::RunConfig::load(&root.join(name)).unwrap();
    }
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let o = run(&["frobnicate"]);
    assert_eq!(code(&o), 2);
}
