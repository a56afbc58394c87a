use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use melnikov::dynamics::numeric_melnikov;
use melnikov::exactalg::rational::ratio;
use melnikov_cli::{cmd_normal_form, cmd_sample_curve, cmd_scan, Format, InstanceSpec, ScanParams};
use proptest::prelude::*;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn sample() -> InstanceSpec {
    InstanceSpec::parse(&std::fs::read_to_string(data("sample.spec")).unwrap()).unwrap()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_melnikov"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn normal_form_matches_golden_file() {
    let golden = std::fs::read_to_string(data("sample.normal-form.txt")).unwrap();
    assert_eq!(
        cmd_normal_form(&sample(), Format::Text).unwrap().body,
        golden
    );
    let spec = data("sample.spec");
    let (code, stdout, _) = run(&["normal-form", "--spec", spec.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(stdout, golden);
}

#[test]
fn scan_is_byte_identical_across_runs() {
    let params = ScanParams {
        samples: 24,
        seed: 11,
    };
    let spec = sample();
    for format in [Format::Json, Format::Csv] {
        let a = cmd_scan(&spec, format, &params).unwrap().body;
        let b = cmd_scan(&spec, format, &params).unwrap().body;
        assert_eq!(a, b);
    }
    let dir = tempfile::tempdir().unwrap();
    let spec_path = data("sample.spec");
    let outputs: Vec<Vec<u8>> = ["a.json", "b.json"]
        .iter()
        .map(|name| {
            let out = dir.path().join(name);
            let (code, _, _) = run(&[
                "scan",
                "--spec",
                spec_path.to_str().unwrap(),
                "--samples",
                "8",
                "--seed",
                "5",
                "--format",
                "json",
                "--out",
                out.to_str().unwrap(),
            ]);
            assert_eq!(code, 0);
            std::fs::read(out).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn scan_of_two_hundred_samples_fits_the_budget() {
    let start = Instant::now();
    let out = cmd_scan(
        &sample(),
        Format::Csv,
        &ScanParams {
            samples: 200,
            seed: 1,
        },
    )
    .unwrap();
    assert!(start.elapsed() < Duration::from_secs(300));
    assert_eq!(out.body.lines().count(), 201);
    assert!(out
        .body
        .lines()
        .skip(1)
        .all(|l| l.split(',').nth(3) == Some("true")));
}

#[test]
fn sample_curve_agrees_with_quadrature() {
    let spec = sample();
    let out = cmd_sample_curve(&spec, Format::Csv, 12, Some(20)).unwrap();
    let fam = spec.family();
    let coeffs = spec.coeffs();
    for line in out.body.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let quad = numeric_melnikov(&fam, &coeffs, cols[0], 64).unwrap();
        assert!(
            (cols[1] - quad).abs() <= 1e-9 * quad.abs().max(1e-3),
            "h = {}",
            cols[0]
        );
    }
}

#[test]
fn exit_status_reflects_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let spec = data("sample.spec");
    let spec = spec.to_str().unwrap();

    let (code, stdout, _) = run(&["verify", "--spec", spec]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("verdict  match"));

    let bad = dir.path().join("bad.spec");
    std::fs::write(&bad, "[family]\nalpha1 = 1/2\nalpha2 = x\n").unwrap();
    let (code, _, stderr) = run(&["zeros", "--spec", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("bad.spec:3:"), "{stderr}");

    // A grid of two labels cannot resolve two cycles: mismatch even after halving.
    let (code, stdout, stderr) = run(&["verify", "--spec", spec, "--points", "2"]);
    assert_eq!(code, 1, "{stdout}");
    assert!(stderr.contains("mismatch"));

    let zero = dir.path().join("zero.spec");
    std::fs::write(
        &zero,
        "[family]\nalpha1 = 1/2\nalpha2 = -1/3\nm1 = 1\nm2 = 1\n[perturbation]\nn = 2\nK = 1\n",
    )
    .unwrap();
    let (code, stdout, _) = run(&["zeros", "--spec", zero.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("identically zero"));
}

fn rational_text() -> impl Strategy<Value = String> {
    prop_oneof![
        (-99i64..=99, 1i64..=99).prop_map(|(p, q)| format!("{p}/{q}")),
        (-999i64..=999).prop_map(|k| format!("{}", k as f64 / 1000.0)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spec_round_trips(
        a1 in (1i64..=9, any::<bool>()),
        a2 in (1i64..=9, any::<bool>()),
        m1 in 1u32..=3,
        m2 in 1u32..=3,
        n in 0u32..=4,
        entries in prop::collection::vec((any::<bool>(), 0u32..=4, 0u32..=4, -8i64..=8), 0..10),
        eps in prop::option::of(rational_text()),
    ) {
        let alpha = |(p, s): (i64, bool)| if s { format!("{p}/4") } else { format!("-{p}/4") };
        let mut text = format!(
            "[family]\nalpha1 = {}\nalpha2 = {}\nm1 = {m1}\nm2 = {m2}\n[perturbation]\nn = {n}\nK = 2\n",
            alpha(a1), alpha(a2)
        );
        let mut seen = std::collections::BTreeSet::new();
        for (is_a, i, j, v) in entries {
            if i + j <= n && seen.insert((is_a, i, j)) {
                text.push_str(&format!("{}[{i},{j}] = {}\n", if is_a { 'a' } else { 'b' }, ratio(v, 4)));
            }
        }
        if let Some(e) = &eps {
            text.push_str(&format!("[run]\neps = {e}\n"));
        }
        let spec = InstanceSpec::parse(&text).unwrap();
        let again = InstanceSpec::parse(&spec.serialize()).unwrap();
        prop_assert_eq!(&spec, &again);
        prop_assert_eq!(spec.coeffs(), again.coeffs());
    }
}
