//! End-to-end runs of the `numrange` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_complex::Complex64;
use numrange::corners::{cone_test, CornerCertificate};
use numrange::frames::{gaussian_vector, rng_from_seed};
use numrange::numerics::ComplexMatrix;
use numrange_cli::error::*;
use numrange_cli::io::{load_matrix, read_cloud, read_json, write_matrix, Envelope};
use numrange_cli::SEED_ENV;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_numrange"));
    c.env_remove(SEED_ENV);
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn matrix(dir: &Path, name: &str, d: usize, entries: &[[f64; 2]]) -> PathBuf {
    let path = dir.join(name);
    let entries: Vec<String> = entries.iter().map(|[a, b]| format!("[{a},{b}]")).collect();
    fs::write(&path, format!(r#"{{"d":{d},"entries":[{}]}}"#, entries.join(","))).unwrap();
    path
}

fn diag01(dir: &Path) -> PathBuf {
    matrix(dir, "diag01.json", 2, &[[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
}

fn jordan(dir: &Path) -> PathBuf {
    matrix(dir, "jordan.json", 2, &[[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 0.0]])
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sample_of_identity_is_one_point() {
    let dir = TempDir::new().unwrap();
    let m = matrix(
        dir.path(),
        "id3.json",
        3,
        &[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]],
    );
    let out = dir.path().join("out");
    let o = run(&["sample", "--matrix", s(&m), "--n", "2", "--samples", "10", "--format", "csv", "--out", s(&out)]);
    assert_eq!(code(&o), EXIT_OK, "{}", String::from_utf8_lossy(&o.stderr));
    let cloud = read_cloud(&out.join("cloud.json")).unwrap();
    assert_eq!(cloud.len(), 10);
    for p in &cloud.points {
        assert!(p.value.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() <= 1e-12));
    }
    assert_eq!(fs::read_to_string(out.join("cloud.csv")).unwrap().lines().count(), 11);
}

#[test]
fn corners_of_a_segment_are_its_endpoints() {
    let dir = TempDir::new().unwrap();
    let m = diag01(dir.path());
    let out = dir.path().join("out");
    let o = run(&[
        "corners", "--matrix", s(&m), "--n", "1", "--samples", "10000", "--seed", "1", "--delta-min", "0.5", "--out", s(&out),
    ]);
    assert_eq!(code(&o), EXIT_OK, "{}", String::from_utf8_lossy(&o.stderr));
    let certs: Envelope<Vec<CornerCertificate>> = read_json(&out.join("corners.json")).unwrap();
    let certified: Vec<_> = certs.result.iter().filter(|c| c.certified).collect();
    assert_eq!(certified.len(), 2);
    let mut xs: Vec<f64> = certified.iter().map(|c| c.point.value[0].re).collect();
    xs.sort_by(f64::total_cmp);
    assert!(xs[0].abs() <= 1e-8 && (xs[1] - 1.0).abs() <= 1e-8, "{xs:?}");
    for c in certified {
        assert!(c.max_residual().unwrap() <= 1e-8);
    }
}

#[test]
fn certificates_revalidate_against_the_written_cloud() {
    let dir = TempDir::new().unwrap();
    let m = matrix(dir.path(), "r.json", 3, &[[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [-1.0, 0.0]]);
    let out = dir.path().join("out");
    let o = run(&["corners", "--matrix", s(&m), "--samples", "3000", "--seed", "4", "--out", s(&out)]);
    assert_eq!(code(&o), EXIT_OK, "{}", String::from_utf8_lossy(&o.stderr));
    let cloud = read_cloud(&out.join("cloud.json")).unwrap();
    let t = load_matrix(&m).unwrap();
    assert!(cloud.matches(&t));
    let certs: Envelope<Vec<CornerCertificate>> = read_json(&out.join("corners.json")).unwrap();
    assert!(!certs.result.is_empty());
    for c in &certs.result {
        let again = cone_test(&cloud, &c.point, c.epsilon).unwrap();
        assert_eq!(again.delta, c.delta);
        assert_eq!(again.neighbor_count, c.neighbor_count);
        assert!(c.point.witness_error(&t).unwrap() <= 1e-12);
    }
}

#[test]
fn jordan_block_passes_vacuously() {
    let dir = TempDir::new().unwrap();
    let m = jordan(dir.path());
    let out = dir.path().join("out");
    let o = run(&["verify", "--theorem", "1.1", "--matrix", s(&m), "--samples", "3000", "--out", s(&out)]);
    assert_eq!(code(&o), EXIT_OK, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["result"]["passed"], true);
    assert_eq!(report["result"]["certificates"].as_array().unwrap().len(), 0);
}

#[test]
fn harmonic_family_meets_the_sigma_threshold() {
    let dir = TempDir::new().unwrap();
    let d = 100;
    let entries: Vec<[f64; 2]> = (0..d * d)
        .map(|k| if k % (d + 1) == 0 { [1.0 / (k / (d + 1) + 1) as f64, 0.0] } else { [0.0, 0.0] })
        .collect();
    let m = matrix(dir.path(), "h.json", d, &entries);
    let out = dir.path().join("out");
    let o = run(&["verify", "--theorem", "1.2", "--matrix", s(&m), "--dims", "10,30,100", "--samples", "2000", "--out", s(&out)]);
    assert_eq!(code(&o), EXIT_OK, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn support_command_matches_disk_radius() {
    let dir = TempDir::new().unwrap();
    let m = jordan(dir.path());
    let out = dir.path().join("out");
    let o = run(&["support", "--matrix", s(&m), "--direction", "1,0", "--direction", "3,-4", "--out", s(&out)]);
    assert_eq!(code(&o), EXIT_OK);
    let v: serde_json::Value = serde_json::from_slice(&fs::read(out.join("support.json")).unwrap()).unwrap();
    for r in v["result"].as_array().unwrap() {
        assert!((r["value"].as_f64().unwrap() - 0.5).abs() <= 1e-10);
    }
}

#[test]
fn suite_and_plot_run() {
    let dir = TempDir::new().unwrap();
    let m = diag01(dir.path());
    let out = dir.path().join("out");
    let o = run(&["suite", "--matrix", s(&m), "--n", "2", "--out", s(&out)]);
    assert_eq!(code(&o), EXIT_OK, "{}", String::from_utf8_lossy(&o.stdout));
    let o = run(&["corners", "--matrix", s(&m), "--samples", "500", "--out", s(&out)]);
    assert_eq!(code(&o), EXIT_OK);
    let o = run(&[
        "plot",
        "--cloud",
        s(&out.join("cloud.json")),
        "--corners",
        s(&out.join("corners.json")),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), EXIT_OK);
    let svg = fs::read_to_string(out.join("plot.svg")).unwrap();
    assert_eq!(svg.matches("<path").count(), 2);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let m = matrix(dir.path(), "r.json", 2, &[[0.5, -1.0], [1.0, 0.25], [0.3, 0.0], [0.0, 1.0]]);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run(&["corners", "--matrix", s(&m), "--samples", "1500", "--seed", "9", "--out", s(out)]);
        assert_eq!(code(&o), EXIT_OK);
    }
    for f in ["cloud.json", "corners.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn seed_environment_overrides_flag() {
    let dir = TempDir::new().unwrap();
    let m = matrix(dir.path(), "r.json", 2, &[[0.5, -1.0], [1.0, 0.25], [0.3, 0.0], [0.0, 1.0]]);
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    let base = ["sample", "--matrix", s(&m), "--samples", "20"];
    run(&[&base[..], &["--seed", "5", "--out", s(&a)]].concat());
    let o = bin()
        .args(base)
        .args(["--seed", "1", "--out", s(&b)])
        .env(SEED_ENV, "5")
        .output()
        .unwrap();
    assert_eq!(code(&o), EXIT_OK);
    run(&[&base[..], &["--seed", "1", "--out", s(&c)]].concat());
    let cloud = |p: &Path| fs::read(p.join("cloud.json")).unwrap();
    assert_eq!(cloud(&a), cloud(&b));
    assert_ne!(cloud(&a), cloud(&c));
}

#[test]
fn matrix_files_round_trip_bit_exactly() {
    let dir = TempDir::new().unwrap();
    let mut rng = rng_from_seed(3);
    for d in 1..=6 {
        let mut entries = gaussian_vector(d * d, &mut rng);
        entries[0] = Complex64::new(0.1 + 0.2, -1e-300);
        let t = ComplexMatrix::new(d, entries).unwrap();
        let path = dir.path().join(format!("m{d}.json"));
        write_matrix(&path, &t, Some("random".into())).unwrap();
        let back = load_matrix(&path).unwrap();
        for (x, y) in t.entries().iter().zip(back.entries()) {
            assert_eq!((x.re.to_bits(), x.im.to_bits()), (y.re.to_bits(), y.im.to_bits()));
        }
    }
}

#[test]
fn exit_codes_follow_the_error_kind() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    let ok = diag01(p);
    let garbled = p.join("garbled.json");
    fs::write(&garbled, "{\"d\": 2, \"entries\": [").unwrap();
    let short = matrix(p, "short.json", 2, &[[1.0, 0.0]]);
    let huge = p.join("huge.json");
    fs::write(&huge, r#"{"d":1,"entries":[[1e999,0]]}"#).unwrap();
    let missing = p.join("missing.json");
    let out = p.join("out");
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["frobnicate"], EXIT_USAGE),
        (vec!["sample"], EXIT_USAGE),
        (vec!["sample", "--matrix", s(&ok), "--tol", "bogus=1"], EXIT_USAGE),
        (vec!["sample", "--matrix", s(&ok), "--delta-min", "0"], EXIT_USAGE),
        (vec!["sample", "--matrix", s(&garbled)], EXIT_PARSE),
        (vec!["sample", "--matrix", s(&huge)], EXIT_PARSE),
        (vec!["sample", "--matrix", s(&short)], EXIT_LENGTH),
        (vec!["sample", "--matrix", s(&ok), "--n", "3", "--out", s(&out)], EXIT_LENGTH),
        (vec!["support", "--matrix", s(&ok), "--direction", "1,0;0,0", "--out", s(&out)], EXIT_LENGTH),
        (vec!["support", "--matrix", s(&ok), "--direction", "inf,0", "--out", s(&out)], EXIT_NON_FINITE),
        (vec!["sample", "--matrix", s(&missing)], EXIT_IO),
        (
            vec!["corners", "--matrix", s(&ok), "--samples", "300", "--epsilon", "1e-14", "--out", s(&out)],
            EXIT_INCONCLUSIVE,
        ),
        (vec!["--help"], EXIT_OK),
    ];
    for (args, expected) in cases {
        let o = run(&args);
        assert_eq!(code(&o), expected, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}
