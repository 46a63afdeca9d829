//! End-to-end tests of the `ectasym` binary: exit codes, determinism and
//! report shapes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chrono::NaiveDate;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ectasym"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Deterministic mean-reverting series written as date,value CSV.
fn write_ect_csv(path: &Path, n: usize) {
    let mut out = String::from("date,value\n");
    let start = NaiveDate::from_ymd_opt(1996, 1, 8).unwrap();
    let mut x = 0.0f64;
    for k in 0..n {
        // fixed recursion: persistent, sign-balanced, no randomness needed
        x = 0.9 * x + ((k * k + 3) as f64 * 0.7101).sin() * 0.05;
        let date = start + chrono::Duration::weeks(k as i64);
        out.push_str(&format!("{date},{x:.6}\n"));
    }
    fs::write(path, out).unwrap();
}

/// Tiny deterministic PRNG for fixtures (uniform on (-0.5, 0.5)).
struct SplitMix(u64);

impl SplitMix {
    fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }
}

/// Cointegrated gas/oil price pair in levels.
fn write_market(dir: &Path, tag: &str) -> (PathBuf, PathBuf) {
    let n = 700;
    let start = NaiveDate::from_ymd_opt(1996, 1, 8).unwrap();
    let mut rng = SplitMix(tag.len() as u64 + 99);
    let mut log_oil = 4.0f64;
    let mut noise = 0.0f64;
    let mut gas_rows = String::from("date,price\n");
    let mut oil_rows = String::from("date,price\n");
    for k in 0..n {
        log_oil += rng.next_f64() * 0.05;
        noise = 0.85 * noise + rng.next_f64() * 0.02;
        let log_gas = 0.3 + 0.7 * log_oil + noise;
        let date = start + chrono::Duration::weeks(k as i64);
        gas_rows.push_str(&format!("{date},{:.8}\n", log_gas.exp()));
        oil_rows.push_str(&format!("{date},{:.8}\n", log_oil.exp()));
    }
    let gas = dir.join(format!("{tag}_gas.csv"));
    let oil = dir.join(format!("{tag}_oil.csv"));
    fs::write(&gas, gas_rows).unwrap();
    fs::write(&oil, oil_rows).unwrap();
    (gas, oil)
}

#[test]
fn usage_errors_exit_with_two() {
    let out = run(&["asym", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["simulate", "--kind", "arfima"]); // missing --d
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
}

#[test]
fn missing_input_exits_with_one() {
    let out = run(&["asym", "--input", "/nonexistent.csv", "--surrogates", "100"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn ingest_repairs_gaps() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("gappy.csv");
    fs::write(
        &input,
        "date,price\n1996-01-08,1.0\n1996-01-15,\n1996-01-22,3.0\n",
    )
    .unwrap();
    let out = run(&["ingest", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("date,value,imputed\n"));
    assert!(text.contains("1996-01-15,2,1"), "got: {text}");
}

#[test]
fn asym_reports_are_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("ect.csv");
    write_ect_csv(&input, 400);
    let args = [
        "asym",
        "--input",
        input.to_str().unwrap(),
        "--surrogates",
        "500",
        "--seed",
        "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "stderr: {}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let json: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(json["n_surrogates"], 500);
    assert_eq!(json["rng"], "chacha8");
    let p = json["median"]["p_value"].as_f64().unwrap();
    assert!(p > 0.0 && p <= 1.0);
}

#[test]
fn longmem_reports_exact_lw_se_for_bandwidth_60() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("ect.csv");
    write_ect_csv(&input, 959);
    let out = run(&[
        "longmem",
        "--input",
        input.to_str().unwrap(),
        "--bandwidth",
        "60",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let estimates = json["estimates"].as_array().unwrap();
    assert_eq!(estimates.len(), 2);
    let lw = estimates
        .iter()
        .find(|e| e["method"] == "LW")
        .expect("LW estimate present");
    assert_eq!(lw["se"].as_f64().unwrap(), 0.0645497);
    assert_eq!(lw["bandwidth"], 60);
}

#[test]
fn cointegrate_then_asym_via_ect_file() {
    let tmp = tempfile::tempdir().unwrap();
    let (gas, oil) = write_market(tmp.path(), "m");
    let ect = tmp.path().join("ect.csv");
    let out = run(&[
        "cointegrate",
        "--gas",
        gas.to_str().unwrap(),
        "--oil",
        oil.to_str().unwrap(),
        "--ect-out",
        ect.to_str().unwrap(),
        "--force",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let beta = json["transmission"].as_f64().unwrap();
    assert!((beta - 0.7).abs() < 0.05, "transmission {beta}");

    let out = run(&[
        "asym",
        "--input",
        ect.to_str().unwrap(),
        "--value-column",
        "ect",
        "--surrogates",
        "200",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
}

#[test]
fn unitroot_runs_both_tests() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("series.csv");
    write_ect_csv(&input, 300);
    let out = run(&["unitroot", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(json["adf"]["statistic"].is_f64());
    assert!(json["kpss"]["statistic"].is_f64());
}

#[test]
fn pipeline_runs_and_isolates_missing_market() {
    let tmp = tempfile::tempdir().unwrap();
    let (gas, oil) = write_market(tmp.path(), "good");
    let config = tmp.path().join("pipeline.conf");
    fs::write(
        &config,
        format!(
            "seed = 11\nn_surrogates = 200\noutput_dir = out\n\
             market good {} {}\nmarket broken missing.csv {}\n",
            gas.file_name().unwrap().to_str().unwrap(),
            oil.file_name().unwrap().to_str().unwrap(),
            oil.file_name().unwrap().to_str().unwrap(),
        ),
    )
    .unwrap();

    let out = run(&["pipeline", "--config", config.to_str().unwrap(), "--force"]);
    // one market fails -> operational failure, but the good market completed
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("broken"), "stderr: {}", stderr(&out));

    let coint = fs::read_to_string(tmp.path().join("out/cointegration.csv")).unwrap();
    assert!(coint.lines().any(|l| l.starts_with("good,")), "got: {coint}");
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("out/run_metadata.json")).unwrap())
            .unwrap();
    assert_eq!(meta["failures"][0]["market"], "broken");
    assert_eq!(meta["rng"], "chacha8");
}

#[test]
fn pipeline_is_deterministic_at_the_binary_level() {
    let tmp = tempfile::tempdir().unwrap();
    let (gas, oil) = write_market(tmp.path(), "m");
    let config = tmp.path().join("pipeline.conf");
    fs::write(
        &config,
        format!(
            "seed = 5\nn_surrogates = 200\nmarket m {} {}\n",
            gas.file_name().unwrap().to_str().unwrap(),
            oil.file_name().unwrap().to_str().unwrap(),
        ),
    )
    .unwrap();

    for (dir, _) in [("a", 0), ("b", 1)] {
        let out = run(&[
            "pipeline",
            "--config",
            config.to_str().unwrap(),
            "--output-dir",
            tmp.path().join(dir).to_str().unwrap(),
            "--force",
        ]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    }
    for name in [
        "unit_root.json",
        "cointegration.json",
        "ecm.json",
        "asymmetry.json",
        "unit_root.csv",
        "cointegration.csv",
        "ecm.csv",
        "asymmetry.csv",
        "series/m_prices.csv",
        "series/m_ect.csv",
    ] {
        let a = fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
}

#[test]
fn simulate_emits_rejection_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let output = tmp.path().join("rates.csv");
    let out = run(&[
        "simulate",
        "--kind",
        "threshold-ar",
        "--tests",
        "wave,rrr",
        "--phi-up",
        "0.5,0.8",
        "--phi-down",
        "0.5",
        "--length",
        "64",
        "--reps",
        "100",
        "--surrogates",
        "100",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = fs::read_to_string(&output).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "test,kind,d,phi_up,phi_down,sigma,length,replications,alpha,surrogates,seed,rejection_rate"
    );
    assert_eq!(lines.count(), 4, "2 tests × 2 grid cells");
}
