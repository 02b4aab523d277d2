use robin_symmetry::cli::{self, EXIT_FAIL, EXIT_INVALID, EXIT_PASS};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("robin-symmetry").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).expect("valid JSON")
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn verify_canonical_passes() {
    let (code, out, _) = run(&[
        "verify", "--n", "2", "--R", "1", "--a", "0.5", "--beta", "0.25", "--h", "1e-3",
    ]);
    assert_eq!(code, EXIT_PASS);
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["constraint"], "GuaranteedNonnegative");
    assert!(v["oracle"]["max_pde_residual_fd"].as_f64().unwrap() <= 1e-4);
}

#[test]
fn verify_rejects_centre_outside_ball() {
    let (code, out, err) = run(&["verify", "--n", "2", "--R", "1", "--a", "1.5", "--beta", "0.25"]);
    assert_eq!(code, EXIT_INVALID);
    assert!(out.is_empty());
    assert!(err.contains("1.5"), "{err}");
}

#[test]
fn verify_n1_reports_never_nonnegative() {
    let (code, out, _) = run(&["verify", "--n", "1", "--R", "1", "--a", "0.5", "--beta", "1"]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(json(&out)["constraint"], "NeverNonnegative");
}

#[test]
fn verify_csv_has_single_row() {
    let (code, out, _) = run(&["verify", "--format", "csv", "--samples", "50"]);
    assert_eq!(code, EXIT_PASS);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header[0], "n");
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][col(&header, "pass")], "1");
    assert!(!out.contains('\r'));
}

#[test]
fn invalid_inputs_exit_2() {
    for args in [
        &["verify", "--beta", "-1"][..],
        &["verify", "--h", "0.5"],
        &["verify", "--h", "0"],
        &["verify", "--order", "3"],
        &["verify", "--format", "xml"],
        &["verify", "--beta", "0.1:0.2:2"],
        &["verify", "--samples", "0"],
        &["verify", "--a", "nan"],
        &["verify", "--x0", "0.1,0.2", "--n", "3"],
        &["region", "--a", "0:1:0"],
        &["solve1d", "--R", "1", "--beta", "1"],
        &["solve1d", "--f", "exp:1"],
        &["profile", "--radius", "2"],
        &["bogus"],
        &["verify", "--nope"],
    ] {
        let (code, _, err) = run(args);
        assert_eq!(code, EXIT_INVALID, "{args:?}: {err}");
    }
}

#[test]
fn region_example_grid() {
    let (code, out, _) = run(&[
        "region",
        "--n",
        "2",
        "--R",
        "1",
        "--a",
        "0.1:0.9:9",
        "--beta",
        "0.05:1:20",
    ]);
    assert_eq!(code, EXIT_PASS);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["a", "beta", "threshold", "guaranteed", "min_f_composed_phi"]);
    assert_eq!(rows.len(), 180);
    // a-then-beta order.
    assert_eq!(rows[0][0], rows[19][0]);
    assert_ne!(rows[19][0], rows[20][0]);
    for row in &rows {
        let min: f64 = row[4].parse().unwrap();
        if row[3] == "1" {
            assert!(min >= -1e-12, "{row:?}");
        }
    }
}

#[test]
fn region_threshold_is_inclusive() {
    let (_, out, _) = run(&["region", "--n", "2", "--a", "0.5", "--beta", "0.3333333333333333"]);
    let (_, rows) = csv_rows(&out);
    assert_eq!(rows[0][3], "1");
}

#[test]
fn region_n3_threshold_constant() {
    let (_, out, _) = run(&["region", "--n", "3", "--a", "0.1:0.9:5", "--beta", "0.25:1:4"]);
    let (_, rows) = csv_rows(&out);
    for row in rows {
        assert_eq!(row[2].parse::<f64>().unwrap(), 0.5);
    }
}

#[test]
fn region_n1_threshold_empty() {
    let (code, out, _) = run(&["region", "--n", "1", "--a", "0.5", "--beta", "1"]);
    assert_eq!(code, EXIT_PASS);
    let (_, rows) = csv_rows(&out);
    assert_eq!(rows[0][2], "");
    assert_eq!(rows[0][3], "0");
    assert!(rows[0][4].parse::<f64>().unwrap() < 0.0);
}

#[test]
fn profile_circle_extremes() {
    let (code, out, _) = run(&["profile", "--n", "2", "--R", "1", "--a", "0.5", "--beta", "0.25"]);
    assert_eq!(code, EXIT_PASS);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["curve", "x1", "x2", "r", "phi", "f_phi", "laplacian_phi"]);
    let phi = col(&header, "phi");
    let circle: Vec<f64> = rows
        .iter()
        .filter(|r| r[0] == "circle")
        .map(|r| r[phi].parse().unwrap())
        .collect();
    assert_eq!(circle.len(), 360);
    let min = circle.iter().copied().fold(f64::INFINITY, f64::min);
    let max = circle.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!((min - 3f64.powf(-0.25)).abs() < 1e-11);
    assert!((max - 1.0).abs() < 1e-11);

    let segment: Vec<f64> = rows
        .iter()
        .filter(|r| r[0] == "segment")
        .map(|r| r[phi].parse().unwrap())
        .collect();
    assert!(segment.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn profile_centred_circle_is_constant() {
    let (_, out, _) = run(&["profile", "--a", "0", "--beta", "0.25"]);
    let (_, rows) = csv_rows(&out);
    let first = rows[0][4].clone();
    assert!(rows.iter().filter(|r| r[0] == "circle").all(|r| r[4] == first));
}

#[test]
fn solve1d_examples() {
    let (code, out, _) = run(&["solve1d", "--f", "const:1", "--R", "1", "--beta", "1"]);
    assert_eq!(code, EXIT_PASS);
    let v = json(&out);
    assert!(v["report"]["symmetry_defect"].as_f64().unwrap() <= 1e-8);
    assert_eq!(v["symmetry_check"]["pass"], true);

    let (code, out, _) = run(&[
        "solve1d",
        "--f",
        "paper-n1",
        "--R",
        "1",
        "--a",
        "0.5",
        "--beta",
        "1",
        "--seed-value",
        "0.3333",
    ]);
    assert_eq!(code, EXIT_PASS);
    let v = json(&out);
    assert!((v["report"]["endpoint_defect"].as_f64().unwrap() - 2.0 / 3.0).abs() <= 1e-6);

    let (code, out, _) = run(&["solve1d", "--f", "const:0", "--R", "1", "--beta", "1"]);
    assert_eq!(code, EXIT_PASS);
    let v = json(&out);
    assert_eq!(v["report"]["positive"], false);
    assert!(v["report"]["max_value"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn solve1d_csv_table() {
    let (code, out, _) = run(&[
        "solve1d",
        "--f",
        "power:2",
        "--R",
        "1",
        "--beta",
        "0.5",
        "--seed-value",
        "0.5",
        "--format",
        "csv",
    ]);
    assert_eq!(code, EXIT_PASS);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["x", "u", "du"]);
    assert_eq!(rows.len(), 2001);
}

#[test]
fn solve1d_no_convergence_exits_1() {
    let (code, out, _) = run(&[
        "solve1d",
        "--f",
        "const:1",
        "--R",
        "1",
        "--beta",
        "1",
        "--seed-value",
        "1e300",
    ]);
    assert_eq!(code, EXIT_FAIL, "{out}");
    let v = json(&out);
    assert_eq!(v["converged"], false);
    assert!(v["error"].is_string());
}

#[test]
fn failed_audit_exits_1_and_writes_report() {
    // A sharp peak near the boundary: the stencil truncation error at
    // h = 0.01 is far above C·h².
    let (code, out, _) = run(&[
        "verify",
        "--n",
        "2",
        "--a",
        "0.99",
        "--beta",
        "20",
        "--h",
        "0.01",
        "--samples",
        "50",
    ]);
    assert_eq!(code, EXIT_FAIL, "{out}");
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn sweep_rows_in_grid_order() {
    let (code, out, _) = run(&["sweep", "--a", "0.2:0.6:3", "--beta", "0.1:0.3:3", "--samples", "40"]);
    assert_eq!(code, EXIT_PASS);
    let (header, rows) = csv_rows(&out);
    assert_eq!(rows.len(), 9);
    let (a, b) = (col(&header, "a"), col(&header, "beta"));
    let keys: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r[a].parse().unwrap(), r[b].parse().unwrap()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    assert_eq!(keys, sorted);
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        &["verify", "--samples", "200", "--seed", "11"][..],
        &[
            "sweep",
            "--a",
            "0:0.8:3",
            "--beta",
            "0.2:0.6:2",
            "--samples",
            "60",
            "--seed",
            "3",
        ],
        &["region", "--a", "0.1:0.9:3", "--beta", "0.1:1:4", "--samples", "500"],
        &["profile", "--samples", "30", "--format", "json"],
        &["solve1d", "--f", "power:2", "--beta", "0.5", "--seed-value", "0.5"],
    ] {
        let first = run(args);
        let second = run(args);
        assert_eq!(first, second, "{args:?}");
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("report.json");
    std::fs::write(
        &cfg,
        "# canonical point\nn = 2\nR = 1\na = 0.5\nbeta = 0.9\nsamples = 100\n",
    )
    .unwrap();
    let (code, stdout, _) = run(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--beta",
        "0.25",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_PASS);
    assert!(stdout.is_empty());
    let v = json(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(v["params"]["beta"].as_f64(), Some(0.25));
    assert_eq!(v["samples"], 100);

    std::fs::write(&cfg, "n = 2\nwhatever = 1\n").unwrap();
    let (code, _, err) = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("whatever"));

    let (code, _, _) = run(&["verify", "--config", dir.path().join("missing").to_str().unwrap()]);
    assert_eq!(code, EXIT_INVALID);
}

#[test]
fn json_numbers_round_trip() {
    let (_, out, _) = run(&["verify", "--samples", "20"]);
    let v = json(&out);
    let tol = v["oracle"]["tolerance"].as_f64().unwrap();
    let scale = v["oracle"]["laplacian_scale"].as_f64().unwrap();
    assert_eq!(tol, 100.0 * scale * 1e-3 * 1e-3);
}

#[test]
fn help_exits_zero() {
    let (code, _, _) = run(&["--help"]);
    assert_eq!(code, EXIT_PASS);
}
