use std::process::{Command, Output};

use specsense_core::detection::DetectorConfig;
use specsense_validation::oracle::nakagami_average_pd;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specsense"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specsense"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn printed_exactly(text: &str) -> f64 {
    let x: f64 = text
        .parse()
        .unwrap_or_else(|_| panic!("not a number: {text}"));
    assert_eq!(format!("{x:.16e}"), text, "does not round-trip");
    x
}

/// Rows of a CSV table as `column -> text`.
fn csv_table(text: &str) -> Vec<Vec<(String, String)>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    let mut distinct = header.clone();
    distinct.sort();
    distinct.dedup();
    assert_eq!(
        distinct.len(),
        header.len(),
        "duplicate columns in {header:?}"
    );
    assert_eq!(&header[..2], ["schema_version", "command"]);
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            assert_eq!(rec.len(), header.len());
            header
                .iter()
                .cloned()
                .zip(rec.iter().map(String::from))
                .collect()
        })
        .collect()
}

fn field(row: &[(String, String)], name: &str) -> f64 {
    let text = &row.iter().find(|(k, _)| k == name).unwrap().1;
    printed_exactly(text)
}

#[test]
fn pd_example() {
    let out = stdout(&run(&[
        "pd",
        "--u",
        "2",
        "--threshold",
        "7.78",
        "--m",
        "1.3",
        "--ms",
        "2.7",
        "--snr-db",
        "6",
    ]));
    let rows = csv_table(&out);
    assert_eq!(rows.len(), 1);
    let pd = field(&rows[0], "pd");
    assert!((pd - 0.52).abs() <= 0.03, "{pd}");
    assert!(field(&rows[0], "terms") >= 1.0);
    assert!(field(&rows[0], "last_term") >= 0.0);
}

#[test]
fn entropy_example() {
    let out = stdout(&run(&[
        "entropy",
        "--m",
        "2",
        "--ms",
        "3",
        "--snr-db",
        "5",
        "--samples",
        "20000",
    ]));
    let rows = csv_table(&out);
    assert!((field(&rows[0], "h_p") - 3.005).abs() <= 0.005);
    assert!((field(&rows[0], "h_pq_ray") - 3.104).abs() <= 0.005);
}

#[test]
fn entropy_settings_have_eight_rows() {
    let out = stdout(&run(&["entropy", "--table1", "--samples", "5000"]));
    let rows = csv_table(&out);
    assert_eq!(rows.len(), 8);
    for row in &rows {
        assert!(field(row, "h_pq_ray") >= field(row, "h_p"));
        assert!(field(row, "kl_nak") >= 0.0);
    }
}

#[test]
fn rayleigh_roc_matches_oracle() {
    let out = stdout(&run(&[
        "roc", "--u", "2", "--snr-db", "0", "--m", "1", "--ms", "10000",
    ]));
    let rows = csv_table(&out);
    assert_eq!(rows.len(), 200);
    for row in rows.iter().step_by(10) {
        let cfg = DetectorConfig::new(2, field(row, "threshold")).unwrap();
        let want = nakagami_average_pd(&cfg, 1.0, 1.0).unwrap();
        assert!((field(row, "pd") - want).abs() < 1e-3);
    }
}

#[test]
fn json_documents_round_trip() {
    for args in [
        vec![
            "--format",
            "json",
            "roc",
            "--snr-db",
            "3",
            "--m",
            "3.5",
            "--ms",
            "4.3",
            "--fusion",
            "and",
            "--users",
            "4",
            "--pf-grid",
            "1e-3:0.5:7",
        ],
        vec![
            "--format",
            "json",
            "auc",
            "--snr-db",
            "2",
            "--sweep",
            "m:1:15:4",
            "--sweep",
            "ms:2:15:3",
        ],
        vec![
            "--format", "json", "simulate", "--snr-db", "7", "--m", "5.6", "--ms", "1.1", "--sls",
            "2", "--trials", "5000",
        ],
        vec!["--format", "json", "auc", "--snr-db", "-3"],
    ] {
        let out = stdout(&run(&args));
        let doc: serde_json::Value = serde_json::from_str(&out).expect("one JSON document");
        assert_eq!(doc["schema_version"], "1");
        let width = doc["columns"].as_array().unwrap().len();
        let rows = doc["rows"].as_array().unwrap();
        assert!(!rows.is_empty());
        // every number appears in the text exactly as its 17-digit rendering
        for row in rows {
            let row = row.as_array().unwrap();
            assert_eq!(row.len(), width);
            for v in row {
                let x = v.as_f64().unwrap();
                assert!(x.is_finite());
                assert!(out.contains(&format!("{x:.16e}")), "{x}");
            }
        }
    }
}

#[test]
fn csv_round_trip_with_quoting() {
    let out = stdout(&run(&[
        "auc",
        "--u",
        "3",
        "--snr-db",
        "2",
        "--sweep",
        "m:1:4:4,ms:2:5:2",
    ]));
    let rows = csv_table(&out);
    assert_eq!(rows.len(), 8);
    assert_eq!(
        rows[0][1].1,
        "auc --u 3 --snr-db 2 --sweep m:1:4:4,ms:2:5:2"
    );
    for row in &rows {
        for (k, v) in row
            .iter()
            .filter(|(k, _)| ["m", "ms", "auc", "snr_db"].contains(&k.as_str()))
        {
            let x = printed_exactly(v);
            if k == "auc" {
                assert!((0.5..=1.0).contains(&x));
            }
        }
    }
}

#[test]
fn simulated_roc_columns() {
    let out = stdout(&run(&[
        "roc",
        "--snr-db",
        "3",
        "--m",
        "3.5",
        "--ms",
        "4.3",
        "--pf-grid",
        "0.01:0.3:3",
        "--simulate",
        "--trials",
        "20000",
    ]));
    for row in csv_table(&out) {
        let (pd, sim, ci) = (
            field(&row, "pd"),
            field(&row, "pd_sim"),
            field(&row, "ci95"),
        );
        assert!((pd - sim).abs() < 2.0 * ci + 1e-3, "{pd} {sim} {ci}");
    }
}

#[test]
fn argument_errors_exit_2_and_name_the_flag() {
    let o = run(&["roc", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--bogus"));

    let o = run(&["pd", "--m", "1", "--ms", "1", "--snr-db", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--ms"));

    let o = run(&["roc", "--snr-db", "3", "--pf-grid", "0.5:0.1:3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--pf-grid"));

    let o = run(&["auc", "--snr-db", "3", "--sweep", "x:1:2:3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--sweep"));

    let o = run(&["pd", "--m", "2", "--snr-db", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--ms"));

    let o = run_env(
        &["pd", "--m", "2", "--ms", "3", "--snr-db", "3"],
        "SPECSENSE_THREADS",
        "none",
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("SPECSENSE_THREADS"));
}

#[test]
fn non_convergence_exits_1_with_parameters() {
    let o = run(&[
        "pd",
        "--m",
        "1",
        "--ms",
        "3",
        "--snr-db",
        "3",
        "--threshold",
        "60",
        "--max-terms",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("no convergence") && err.contains("threshold=6.0000000000000000e1"),
        "{err}"
    );
    assert!(o.stdout.is_empty());
}

#[test]
fn thread_count_does_not_change_results() {
    let args = [
        "simulate", "--snr-db", "3", "--m", "3.5", "--ms", "4.3", "--fusion", "or", "--users", "3",
        "--trials", "30000",
    ];
    let one = stdout(&run_env(&args, "SPECSENSE_THREADS", "1"));
    let many = stdout(&run_env(&args, "SPECSENSE_THREADS", "6"));
    assert_eq!(one, many);
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest"]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(o.status.code(), Some(0), "{err}");
    assert_eq!(
        err.lines().filter(|l| l.contains(" PASS: ")).count(),
        9,
        "{err}"
    );
    let rows = csv_table(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| field(r, "passed") == 1.0));
}
