use std::process::{Command, Output};

use lattice_ortho::{make_family, BigComplex, Family, FamilyName};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lattice-ortho"))
        .args(args)
        .env_remove("LATTICE_ORTHO_PRECISION")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn num(v: &Value, prec: u32) -> BigComplex {
    let re = v["re"].as_str().unwrap();
    let im = v["im"].as_str().unwrap();
    let s = if im == "0" {
        re.to_string()
    } else if im.starts_with('-') {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    };
    BigComplex::parse(&s, prec).unwrap()
}

#[test]
fn charlier_weights_csv() {
    let out = run(&[
        "weights", "--family", "charlier", "--arg", "a=1", "--count", "5", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["k", "re_x", "im_x", "re_r", "im_r", "status", "tail_estimate"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 5);
    let r0: f64 = rows[0][3].parse().unwrap();
    assert!((r0 - 0.3678794412).abs() < 1e-10);
}

#[test]
fn finite_family_is_detected() {
    let out = run(&["weights", "--family", "krawtchouk", "--arg", "p=0.5", "--arg", "N=2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["count"], 3);
    assert_eq!(v["finite_family"], 3);
    let want = ["1/4", "1/2", "1/4"];
    for (e, w) in v["entries"].as_array().unwrap().iter().zip(want) {
        assert!(num(&e["r"], 256).approx_eq(&BigComplex::parse(w, 256).unwrap()));
        assert_eq!(e["status"], "terminated");
    }
}

#[test]
fn uniform_hahn_csv() {
    let out = run(&[
        "weights", "--family", "hahn", "--arg", "alpha=0", "--arg", "beta=0", "--arg", "N=2", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let third = BigComplex::from_ratio(1, 3, 256);
    let mut n = 0;
    for r in rdr.records() {
        let r = r.unwrap();
        assert!(BigComplex::parse(&r[3], 256).unwrap().approx_eq(&third));
        n += 1;
    }
    assert_eq!(n, 3);
}

#[test]
fn verify_finite_hahn_is_exact() {
    let out = run(&[
        "verify", "--family", "hahn", "--arg", "alpha=0", "--arg", "beta=0", "--arg", "N=2", "--nmax", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["offdiag_max"].as_f64().unwrap(), 0.0);
    assert_eq!(v["passed"], true);
}

#[test]
fn verify_raw_reports_tail_allowance() {
    let out = run(&[
        "verify",
        "--raw",
        "a1=1,a2=0,b0=0,b1=1,b2=0,d1=0,d2=-1",
        "--nmax",
        "3",
        "--K",
        "80",
    ]);
    let v = json(&out);
    assert!(v.get("tail_allowance").is_some());
    assert_eq!(v["K"], 80);
    assert_eq!(v["family"]["name"], "raw");
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_rejects_divergent_meixner() {
    let out = run(&["verify", "--family", "meixner", "--arg", "c=2", "--arg", "beta=1"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "convergence_condition");
}

#[test]
fn charlier_recurrence() {
    let out = run(&["recurrence", "--family", "charlier", "--arg", "a=1", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    let one = BigComplex::one(256);
    assert!(num(&rows[0]["beta"], 256).approx_eq(&one));
    assert!(num(&rows[1]["alpha"], 256).approx_eq(&one));
    assert!(num(&rows[0]["K"], 256).approx_eq(&one));
    assert!(rows[0]["alpha"].is_null());
}

#[test]
fn wilson_recurrence_matches_closed_form() {
    let out = run(&[
        "recurrence",
        "--family",
        "wilson",
        "--arg",
        "a=.5",
        "--arg",
        "b=.5",
        "--arg",
        "c=.5",
        "--arg",
        "d=.5",
        "--n",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let spec = make_family(
        FamilyName::Wilson,
        &[("a", "1/2"), ("b", "1/2"), ("c", "1/2"), ("d", "1/2")],
        256,
    )
    .unwrap();
    for row in &v["rows"].as_array().unwrap()[1..] {
        let n = row["n"].as_u64().unwrap() as usize;
        let got = num(&row["alpha"], 256);
        assert!(got.approx_eq(&spec.alpha_closed_form(n).unwrap()));
        assert!(got.approx_eq(&num(&row["alpha_closed_form"], 256)));
    }
}

#[test]
fn json_round_trip_is_bit_exact() {
    for prec in ["128", "256", "333"] {
        let out = run(&[
            "recurrence",
            "--family",
            "continuous-hahn",
            "--arg",
            "a=1/3",
            "--arg",
            "b=2",
            "--arg",
            "c=1/7",
            "--arg",
            "d=3/5",
            "--n",
            "4",
            "--precision",
            prec,
        ]);
        assert_eq!(out.status.code(), Some(0));
        let p: u32 = prec.parse().unwrap();
        let spec = make_family(
            FamilyName::ContinuousHahn,
            &[("a", "1/3"), ("b", "2"), ("c", "1/7"), ("d", "3/5")],
            p,
        )
        .unwrap();
        let fam = Family::new(spec.params);
        let v = json(&out);
        for row in v["rows"].as_array().unwrap() {
            let n = row["n"].as_u64().unwrap() as usize;
            assert_eq!(num(&row["beta"], p), fam.beta(n).unwrap(), "precision {prec}, n = {n}");
        }
    }
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_lattice-ortho"))
        .args(["weights", "--family", "charlier", "--arg", "a=1", "--count", "2"])
        .env("LATTICE_ORTHO_PRECISION", "128")
        .output()
        .unwrap();
    assert_eq!(json(&out)["precision"], 128);
    let out = Command::new(env!("CARGO_BIN_EXE_lattice-ortho"))
        .args([
            "weights",
            "--family",
            "charlier",
            "--arg",
            "a=1",
            "--count",
            "2",
            "--precision",
            "192",
        ])
        .env("LATTICE_ORTHO_PRECISION", "128")
        .output()
        .unwrap();
    assert_eq!(json(&out)["precision"], 192);
}

#[test]
fn configuration_errors_exit_1() {
    for args in [
        vec!["weights", "--family", "nope"],
        vec!["weights", "--family", "charlier"],
        vec!["weights", "--family", "charlier", "--arg", "a"],
        vec!["weights", "--family", "charlier", "--arg", "a=1", "--precision", "8"],
        vec!["weights", "--family", "charlier", "--arg", "a=1", "--tol", "0"],
        vec!["weights", "--family", "charlier", "--arg", "a=1", "--method", "simpson"],
        vec!["weights", "--bogus"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(json(&out)["error"]["kind"].is_string());
    }
}

#[test]
fn per_entry_failure_exits_2() {
    // continuous Hahn with b - a = 5/2: r_3 and later diverge
    let out = run(&[
        "weights",
        "--family",
        "continuous-hahn",
        "--arg",
        "a=1/2",
        "--arg",
        "b=3",
        "--arg",
        "c=1/3",
        "--arg",
        "d=1",
        "--count",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    let e = &v["entries"].as_array().unwrap()[3];
    assert_eq!(e["status"], "error");
    assert_eq!(e["error"]["kind"], "convergence_condition");
}

#[test]
fn weight_methods_agree() {
    let mut values = Vec::new();
    for m in ["closed-form", "direct-series", "triangular"] {
        let out = run(&[
            "weights",
            "--family",
            "hahn",
            "--arg",
            "alpha=1/2",
            "--arg",
            "beta=2",
            "--arg",
            "N=4",
            "--method",
            m,
        ]);
        assert_eq!(out.status.code(), Some(0), "{m}");
        let v = json(&out);
        values.push(
            v["entries"]
                .as_array()
                .unwrap()
                .iter()
                .map(|e| num(&e["r"], 256))
                .collect::<Vec<_>>(),
        );
    }
    for other in &values[1..] {
        for (a, b) in values[0].iter().zip(other) {
            assert!(a.approx_eq(b));
        }
    }
}

#[test]
fn moments_and_recovery() {
    let out = run(&[
        "moments", "--family", "charlier", "--arg", "a=1", "--count", "4", "--K", "60",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let ms = v["moments"].as_array().unwrap();
    assert_eq!(ms.len(), 4);
    assert!(ms[3]["residual"].as_f64().unwrap() < 1e-20);
    assert!(num(&ms[0]["m"], 256).approx_eq(&BigComplex::one(256)));
}

#[test]
fn validate_and_families() {
    let out = run(&[
        "validate", "--family", "hahn", "--arg", "alpha=1", "--arg", "beta=1", "--arg", "N=4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["terminating_at"], 5);
    let out = run(&["families"]);
    assert_eq!(out.status.code(), Some(0));
    let names: Vec<String> = json(&out)["families"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["name"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(
        names,
        [
            "wilson",
            "continuous-hahn",
            "hahn",
            "continuous-dual-hahn",
            "krawtchouk",
            "meixner",
            "charlier"
        ]
    );
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let out = run(&[
        "weights",
        "--family",
        "charlier",
        "--arg",
        "a=1",
        "--count",
        "3",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
}
