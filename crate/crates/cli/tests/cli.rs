use std::path::Path;
use std::process::{Command, Output};

fn weaktomo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weaktomo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn crb_scan_original_dst_reports_argmin() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("crb.csv");
    let o = weaktomo(&[
        "crb-scan",
        "--protocol",
        "dst-original",
        "--grid",
        "0.05:1.5:30",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["strength", "C", "divergent"]);
    assert_eq!(rows.len(), 30);
    let best = rows
        .iter()
        .map(|r| (r[0].parse::<f64>().unwrap(), r[1].parse::<f64>().unwrap()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!((0.80..=1.00).contains(&best.0), "{best:?}");
    assert!(stdout(&o).contains("argmin strength"));
}

#[test]
fn crb_scan_mub_is_a_single_row() {
    let o = weaktomo(&["crb-scan", "--protocol", "mub"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2, "{text}");
    let c: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((c - 13.0 / 12.0).abs() < 0.01 * 13.0 / 12.0);
}

#[test]
fn usage_errors_exit_2() {
    let o = weaktomo(&["crb-scan"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
    assert_eq!(weaktomo(&["crb-scan", "--protocol", "nope"]).status.code(), Some(2));
    assert_eq!(
        weaktomo(&["crb-scan", "--protocol", "dst-original", "--grid", "0:2:3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        weaktomo(&["simulate", "--protocol", "mub", "--n", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        weaktomo(&["basis-distribution", "--epsilon", "-1"]).status.code(),
        Some(2)
    );
}

#[test]
fn divergence_exits_3_unless_allowed() {
    let args = ["crb-scan", "--protocol", "dst-original", "--grid", "1.5:1.5707963267948966:2"];
    let o = weaktomo(&args);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("true"));
    let mut allowed = args.to_vec();
    allowed.push("--allow-divergent");
    assert!(weaktomo(&allowed).status.success());
}

#[test]
fn simulate_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_weaktomo"))
            .env("RAYON_NUM_THREADS", threads)
            .args([
                "simulate",
                "--protocol",
                "dst-original",
                "--phi",
                "0.89",
                "--n",
                "200",
                "--trials",
                "16",
                "--particles",
                "300",
                "--seed",
                "7",
                "--out",
                path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        path
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "3");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let (header, rows) = read_csv(&a);
    assert_eq!(header, ["N", "mean_infidelity", "stderr", "protocol", "strength"]);
    assert_eq!(rows.last().unwrap()[0], "200");
    assert_eq!(rows[0][3], "dst-original");
    assert_eq!(rows[0][4], "0.89");
}

#[test]
fn simulate_das_arvind_approaches_its_bound() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("da.csv");
    let o = weaktomo(&[
        "simulate",
        "--protocol",
        "das-arvind",
        "--epsilon",
        "0.575",
        "--n",
        "1000",
        "--trials",
        "500",
        "--seed",
        "7",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = read_csv(&path);
    let last: f64 = rows.last().unwrap()[1].parse().unwrap();
    // C(0.575) ≈ 1.019 from the Cramér–Rao scan.
    let ratio = last / (1.019 / 1000.0);
    assert!((ratio - 1.0).abs() < 0.2, "{ratio}");
}

#[test]
fn basis_distribution_rows_and_metric() {
    let dir = tempfile::tempdir().unwrap();
    let metric = |eps: &str| {
        let path = dir.path().join(format!("b{eps}.csv"));
        let o = weaktomo(&[
            "basis-distribution",
            "--epsilon",
            eps,
            "--nodes",
            "201",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        let (header, rows) = read_csv(&path);
        assert_eq!(header, ["nx", "ny", "nz", "weight"]);
        let mut total = 0.0;
        for r in &rows {
            assert!(r[1].parse::<f64>().unwrap() >= 0.0);
            total += r[3].parse::<f64>().unwrap();
        }
        assert!((total - 1.0).abs() < 1e-6);
        let text = stdout(&o);
        text.trim().rsplit(' ').next().unwrap().parse::<f64>().unwrap()
    };
    assert!(metric("0.1") > metric("0.575"));
}

#[test]
fn povm_check_verdicts() {
    let o = weaktomo(&["povm-check", "--protocol", "das-arvind", "--epsilon", "0.575"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("random ODOP: yes"));

    let o = weaktomo(&["povm-check", "--protocol", "tetrahedron"]);
    assert!(stdout(&o).contains("random ODOP: no (4 unmatched)"));

    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("povm.json");
    let o = weaktomo(&[
        "povm-check",
        "--protocol",
        "dst-original",
        "--phi",
        "0.89",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("valid: yes"));
    assert!(text.contains("random ODOP: "));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(doc["dim"], 2);
    assert_eq!(doc["elements"].as_array().unwrap().len(), 16);
}
