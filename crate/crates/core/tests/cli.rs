use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mtsdp::instances::load_instance;
use mtsdp::report::Summary;

fn mtsdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtsdp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("instances").join(name)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn solve_converges_with_mu_recursion() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("run.csv");
    let json = dir.path().join("run.json");
    let o = mtsdp(&[
        "solve",
        "--instance",
        "lsdp-small",
        "--scaling",
        "hkm",
        "--alpha",
        "0.1",
        "--xi",
        "0.5",
        "--xi-prime",
        "0.3333333333",
        "--csv",
        csv.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let mut rdr = csv::Reader::from_path(&csv).unwrap();
    let header = rdr.headers().unwrap().clone();
    assert_eq!(header.iter().collect::<Vec<_>>(), mtsdp::report::CSV_HEADER.to_vec());
    let mus: Vec<f64> = rdr.records().map(|r| r.unwrap()[1].parse().unwrap()).collect();
    assert!(mus.len() > 5);
    for m in mus.windows(2) {
        assert!((m[1] - m[0].powf(1.1)).abs() <= 1e-15 * m[1]);
    }

    let summary = Summary::from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(summary.status, "converged");
    assert!(summary.final_residual <= summary.config.tol);
    assert!(summary.regularity.as_ref().unwrap().all_hold());
    assert!(summary.estimated_order.unwrap() >= 1.05);
}

#[test]
fn inadmissible_xi_warns_and_proceeds() {
    let o = mtsdp(&[
        "solve",
        "--instance",
        "lsdp-small",
        "--scaling",
        "nt",
        "--xi",
        "0.3",
        "--csv",
        "/dev/null",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("outside [0.5, 1)"), "{}", stderr(&o));
}

#[test]
fn violated_parameter_inequality_exits_2() {
    let o = mtsdp(&[
        "solve",
        "--instance",
        "lsdp-small",
        "--xi-prime",
        "0.2",
        "--csv",
        "/dev/null",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("(xi - alpha)/(1 + alpha) > xi' > xi/2"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn unknown_instance_exits_2() {
    let o = mtsdp(&["solve", "--instance", "unknown"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn iteration_limit_exits_1() {
    let o = mtsdp(&[
        "solve",
        "--instance",
        "lsdp-small",
        "--max-iters",
        "2",
        "--csv",
        "/dev/null",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("iteration limit"), "{}", stderr(&o));
}

#[test]
fn verify_runs_one_suite() {
    let o = mtsdp(&["verify", "--only", "lemma-dx", "--trials", "10000"]);
    assert_eq!(o.status.code(), Some(0));
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.lines().count(), 1);
    assert!(out.starts_with("PASS lemma-dx: 10000 trials"), "{out}");
}

#[test]
fn verify_seed_reproduces_samples() {
    let a = mtsdp(&[
        "verify", "--only", "svec", "--only", "xyx", "--trials", "50", "--seed", "7",
    ]);
    let b = mtsdp(&[
        "verify", "--only", "svec", "--only", "xyx", "--trials", "50", "--seed", "7",
    ]);
    let digests = |o: &Output| -> Vec<String> {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .map(|l| {
                l.split("digest ")
                    .nth(1)
                    .unwrap()
                    .split(',')
                    .next()
                    .unwrap()
                    .to_string()
            })
            .collect()
    };
    assert_eq!(digests(&a).len(), 2);
    assert_eq!(digests(&a), digests(&b));
    let c = mtsdp(&["verify", "--only", "svec", "--trials", "50", "--seed", "8"]);
    assert_ne!(digests(&a)[0], digests(&c)[0]);
}

#[test]
fn verify_default_passes() {
    let o = mtsdp(&["verify", "--trials", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn report_prints_regularity() {
    let o = mtsdp(&["report", "--instance", "lsdp-small"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["nondegenerate"], true);
    assert_eq!(v["strict_complementarity"], true);
    assert_eq!(v["sosc"], true);
}

#[test]
fn report_reverifies_summary() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("run.json");
    let o = mtsdp(&[
        "solve",
        "--instance",
        "quad-nsdp",
        "--csv",
        "/dev/null",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = mtsdp(&["report", "--summary", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("consistent"));
}

#[test]
fn shipped_instances_load_and_validate() {
    for name in ["lsdp-small.json", "quad-nsdp.json"] {
        let spec = load_instance(&shipped(name)).unwrap();
        assert!(spec.known_solution.is_some(), "{name}");
        spec.validate().unwrap();
    }
    let spec = load_instance(&shipped("near-corr-4.json")).unwrap();
    assert_eq!((spec.problem().n(), spec.problem().m(), spec.problem().s()), (10, 4, 4));
}

#[test]
fn shipped_instance_solves_like_builtin() {
    let a = mtsdp(&["solve", "--instance", "lsdp-small"]);
    let path = shipped("lsdp-small.json");
    let b = mtsdp(&["solve", "--instance-file", path.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
