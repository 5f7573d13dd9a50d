use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn fig8(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fig8"))
        .arg("--cache-dir")
        .arg(cache)
        .args(args)
        .env_remove("FIG8_THREADS")
        .env_remove("FIG8_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    rd.records().map(|r| r.unwrap().iter().map(str::to_string).collect()).collect()
}

fn jeffrey(r: u32) -> f64 {
    let s5 = 5f64.sqrt();
    0.5 - 1.0 / (2.0 * s5) - (2.0 / s5) * (2.0 * std::f64::consts::PI * r as f64 / 5.0).cos()
}

#[test]
fn invariant_of_zero_surgery_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let o = fig8(dir.path(), &["invariant", "-p", "0", "-q", "1", "-r", "5..40"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 36);
    for row in rows {
        let r: u32 = row[0].parse().unwrap();
        let re: f64 = row[1].parse().unwrap();
        let im: f64 = row[2].parse().unwrap();
        assert!((re - jeffrey(r)).abs() < 1e-8 * r as f64 && im.abs() < 1e-8 * r as f64, "r = {r}");
    }
}

#[test]
fn second_run_is_served_from_cache_with_identical_bits() {
    let dir = tempfile::tempdir().unwrap();
    let a = fig8(dir.path(), &["invariant", "-p", "1", "-q", "1", "-r", "10"]);
    let b = fig8(dir.path(), &["invariant", "-p", "1", "-q", "1", "-r", "10"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stderr).contains("0 hits"));
    assert!(String::from_utf8_lossy(&b.stderr).contains("1 hits"));
    let text = std::fs::read_to_string(dir.path().join("tau.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 1);
}

#[test]
fn non_coprime_slope_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = fig8(dir.path(), &["invariant", "-p", "2", "-q", "4", "-r", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("p/q not in lowest terms"));
}

#[test]
fn bad_configuration_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = fig8(dir.path(), &["--quad-tol", "0.5", "jones", "-r", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "threads = 0\n").unwrap();
    let o = fig8(dir.path(), &["--config", cfg.to_str().unwrap(), "jones", "-r", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

fn critical(p: &str, q: &str) -> Value {
    let dir = tempfile::tempdir().unwrap();
    let o = fig8(dir.path(), &["critical", "-p", p, "-q", q]);
    assert!(o.status.success());
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn critical_points_of_zero_surgery() {
    let v = critical("0", "1");
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), 2);
    let mut cs: Vec<f64> = pts.iter().map(|p| p["cs"].as_f64().unwrap()).collect();
    cs.sort_by(f64::total_cmp);
    assert!((cs[0] - 0.2).abs() < 1e-8 && (cs[1] - 0.8).abs() < 1e-8);
    for p in pts {
        assert!((p["det_h"].as_f64().unwrap() - 5.0).abs() < 1e-9);
    }
}

#[test]
fn critical_points_of_three_surgery_include_the_endpoint_class() {
    let v = critical("3", "1");
    let pts = v["points"].as_array().unwrap();
    assert!(pts.iter().any(|p| (p["theta"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-12));
}

#[test]
fn critical_defects_are_small_for_one_surgery() {
    let v = critical("1", "1");
    let pts = v["points"].as_array().unwrap();
    assert!(!pts.is_empty());
    assert!(pts.iter().all(|p| p["defect"].as_f64().unwrap() < 1e-6));
}

#[test]
fn negative_slopes_parse() {
    let v = critical("-1", "1");
    assert_eq!(v["p"], -1);
    let dir = tempfile::tempdir().unwrap();
    let o = fig8(dir.path(), &["chern-simons", "-p", "-3", "-q", "2"]);
    assert!(o.status.success());
}

#[test]
fn verify_volume_writes_its_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reports");
    let o = fig8(dir.path(), &["verify", "volume", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(out.join("volume_scan.json")).unwrap()).unwrap();
    assert_eq!(rep["name"], "volume_scan");
    assert_eq!(rep["passed"], true);
}

#[test]
fn verify_aec_on_hyperbolic_slope_is_report_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reports");
    let o = fig8(dir.path(), &["verify", "aec", "--pq", "5/1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("conjectural"));
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(out.join("aec_scan_5_1.json")).unwrap()).unwrap();
    assert_eq!(rep["conjectural"], true);
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = fig8(dir.path(), &["verify", "nothing", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

const SWEEP: [&str; 5] = ["sweep", "--pq", "1/1,2/1,3/1", "--r", "50,100,200,400"];

#[test]
fn sweep_emits_residual_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = fig8(dir.path(), &SWEEP);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "p,q,r,tau_re,tau_im,pred_re,pred_im,rel_residual");
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r[7].parse::<f64>().unwrap().is_finite()));
}

#[test]
fn parallel_sweep_equals_serial_sweep() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let serial = fig8(a.path(), &[&["--threads", "1"], &SWEEP[..]].concat());
    let parallel = fig8(b.path(), &[&["--threads", "4"], &SWEEP[..]].concat());
    assert!(serial.status.success() && parallel.status.success());
    assert_eq!(serial.stdout, parallel.stdout);
}

#[test]
fn environment_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_fig8"))
        .args(["--format", "csv", "jones", "-r", "5"])
        .env("FIG8_OUTPUT_FORMAT", "json")
        .env("FIG8_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["r"], 5);
}

// Keys of every JSON object, paths joined with '.', arrays collapsed to '[]'.
fn schema(v: &Value, path: &str, out: &mut std::collections::BTreeSet<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                out.insert(p.clone());
                schema(x, &p, out);
            }
        }
        Value::Array(a) => {
            for x in a {
                schema(x, &format!("{path}[]"), out);
            }
        }
        _ => {}
    }
}

fn schema_text(v: &Value) -> String {
    let mut s = std::collections::BTreeSet::new();
    schema(v, "", &mut s);
    s.into_iter().collect::<Vec<_>>().join("\n") + "\n"
}

fn golden(name: &str, got: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("FIG8_BLESS").is_some() {
        std::fs::write(&path, got).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(got, want, "schema drift in {name}; rerun with FIG8_BLESS=1 after review");
}

#[test]
fn output_schemas_match_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let inv = fig8(dir.path(), &["invariant", "-p", "1", "-q", "1", "-r", "5"]);
    golden("invariant.csv.header", stdout(&inv).lines().next().unwrap());
    let sweep = fig8(dir.path(), &["--format", "json", "sweep", "--pq", "1/1", "--r", "50"]);
    golden("sweep.json.schema", &schema_text(&serde_json::from_slice(&sweep.stdout).unwrap()));
    golden("critical.json.schema", &schema_text(&critical("1", "1")));
    let cs = fig8(dir.path(), &["chern-simons", "-p", "1", "-q", "1"]);
    golden("chern_simons.json.schema", &schema_text(&serde_json::from_slice(&cs.stdout).unwrap()));
    let asy = fig8(dir.path(), &["asymptotics", "-p", "1", "-r", "50"]);
    golden("asymptotics.json.schema", &schema_text(&serde_json::from_slice(&asy.stdout).unwrap()));
    let out = dir.path().join("reports");
    fig8(dir.path(), &["verify", "repvar", "--out", out.to_str().unwrap()]);
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(out.join("repvar.json")).unwrap()).unwrap();
    golden("report.json.schema", &schema_text(&rep));
}
