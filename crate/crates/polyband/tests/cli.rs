use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("polyband-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn polyband(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyband"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn params_prints_the_planar_cascade() {
    let out = scratch("params");
    let o = polyband(&["params"], &configs().join("params_d2.toml"), &out);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("m = 13, alpha = 1/13, k1 = 10, p1 = 15"), "{text}");
    assert!(!text.contains("FAIL"));
    assert_eq!(text.lines().filter(|l| l.trim_start().starts_with("PASS")).count(), 18);
    let json: serde_json::Value = serde_json::from_slice(&fs::read(out.join("params.json")).unwrap()).unwrap();
    assert_eq!(json["command"], "params");
    assert_eq!(json["data"][0]["m"], 13);
    assert_eq!(json["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn params_in_three_dimensions() {
    let out = scratch("params3");
    let o = polyband(&["params"], &configs().join("params_d3.toml"), &out);
    assert!(o.status.success());
    assert!(stdout(&o).contains("m = 32, alpha = 1/32, k1 = 34"));
}

#[test]
fn low_smoothness_exits_with_the_named_inequality() {
    let dir = scratch("tampered");
    let text = fs::read_to_string(configs().join("params_d2.toml")).unwrap().replace("s = 45.0", "s = 30.0");
    let cfg = dir.join("tampered.toml");
    fs::write(&cfg, text).unwrap();
    let o = polyband(&["params"], &cfg, &dir);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("iteration_depth"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = scratch("badconfig");
    let cfg = dir.join("bad.toml");
    fs::write(&cfg, "[lattice]\nkind = \"cubic\"\ndim = 2\ncolour = 3\n").unwrap();
    let o = polyband(&["params"], &cfg, &dir);
    assert_eq!(o.status.code(), Some(2));
    let o = polyband(&["params"], &dir.join("missing.toml"), &dir);
    assert_eq!(o.status.code(), Some(2));
    // the sweep section is required by verify only
    let o = polyband(&["verify"], &configs().join("params_d2.toml"), &dir);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_on_the_free_operator_has_zero_errors() {
    let out = scratch("free");
    let o = polyband(&["verify"], &configs().join("sweep_free.toml"), &out);
    assert!(o.status.success());
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(out.join("verify.csv")).unwrap();
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        assert_eq!(rec[2].parse::<f64>().unwrap(), 0.0);
        assert_eq!(rec[3].parse::<f64>().unwrap(), 1.0);
        rows += 1;
    }
    assert_eq!(rows, 6);
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = configs().join("generic.toml");
    for (cmd, file) in [("predict", "predict.csv"), ("measure", "measure.json"), ("bloch", "bloch.json")] {
        let a = scratch(&format!("{cmd}-a"));
        let b = scratch(&format!("{cmd}-b"));
        assert!(polyband(&[cmd], &cfg, &a).status.success());
        assert!(polyband(&[cmd], &cfg, &b).status.success());
        let fa = fs::read(a.join(file)).unwrap();
        assert_eq!(fa, fs::read(b.join(file)).unwrap(), "{cmd}");
        assert!(String::from_utf8_lossy(&fa).contains("config_hash"));
    }
}

#[test]
fn plane_points_are_resonant_and_the_block_wins() {
    let out = scratch("resonant");
    let o = polyband(&["resonant-check"], &configs().join("resonant.toml"), &out);
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_slice(&fs::read(out.join("resonant.json")).unwrap()).unwrap();
    for row in json["data"].as_array().unwrap() {
        let block = row["block_deviation"].as_f64().unwrap().abs();
        let series = row["series_deviation"].as_f64().unwrap().abs();
        assert!(10.0 * block <= series, "{row}");
    }
}

#[test]
fn free_gap_scan_is_gapless() {
    let dir = scratch("freegaps");
    let cfg = dir.join("free.toml");
    let text = "[lattice]\nkind = \"cubic\"\ndim = 2\n\n[potential]\nkind = \"zero\"\n\n[operator]\nl = 1\ns = 10.0\n\n\
                [cascade]\nmode = \"theory\"\nrho = [20.0]\n\n[bands]\ngrid = 8\nbands = 12\n";
    fs::write(&cfg, text).unwrap();
    let o = polyband(&["gaps"], &cfg, &dir);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_slice(&fs::read(dir.join("gaps.json")).unwrap()).unwrap();
    assert_eq!(json["data"]["gaps"].as_array().unwrap().len(), 0);
    assert_eq!(json["data"]["stable"], true);
}

#[test]
fn isoenergetic_skips_the_axis_ray() {
    let out = scratch("iso");
    let o = polyband(&["isoenergetic"], &configs().join("generic.toml"), &out);
    assert!(o.status.success());
    let text = fs::read_to_string(out.join("isoenergetic.csv")).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(data.len(), 6);
    assert_eq!(data.iter().filter(|l| l.contains("resonant")).count(), 2);
}
