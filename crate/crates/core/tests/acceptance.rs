//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if any
//! criterion fails. Run with `--nocapture` to see the lines.

mod common;

use std::f64::consts::FRAC_PI_2;
use std::process::Command;
use std::time::Instant;

use qdb_core::data::{parse_experiments, render_results};
use qdb_core::model::markov_predict;
use qdb_core::report::{mean_relative_error, table4};
use qdb_core::{
    build_block_hamiltonian, closed_form_conditional, embedded_experiment, embedded_experiments,
    embedded_reference, evolve, fit_block_param, fit_experiment, initial_state_from_priors,
    load_experiments, markov_total_probability, matrix_exponential_unitary, pignistic_transform,
    predict, qdb_conditional, FaceType, FileFormat, FitResult, HamiltonianParams, MassFunction,
    ModelConfig, ModelKind, SquareMatrix, StateVector,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn table4_reproduction() -> Check {
    let rows = table4(&ModelConfig::default()).map_err(|e| e.to_string())?;
    ensure(rows.len() == 6, || format!("{} rows", rows.len()))?;
    let mut worst: f64 = 0.0;
    for r in &rows {
        ensure(
            r.delta_p_t.abs() <= 0.004 && r.delta_p_attack.abs() <= 0.004,
            || {
                format!(
                    "{}: P_T {:.4} vs {:.4}, P(A) {:.4} vs {:.4}",
                    r.source_id, r.p_t, r.published_p_t, r.p_attack, r.published_p_attack
                )
            },
        )?;
        for (fitted, observed) in [
            (r.p_attack_given_good, r.observed_attack_given_good),
            (r.p_attack_given_bad, r.observed_attack_given_bad),
        ] {
            ensure((fitted - observed).abs() < 1e-6, || {
                format!(
                    "{}: fitted conditional {fitted} vs observed {observed}",
                    r.source_id
                )
            })?;
        }
        worst = worst.max(r.delta_p_t.abs()).max(r.delta_p_attack.abs());
    }
    Ok(format!("6 rows within 0.004 (worst {worst:.4})"))
}

fn interference_constant() -> Check {
    let mut rng = StdRng::seed_from_u64(2);
    for _ in 0..1000 {
        let p_g = rng.random_range(0.0..=1.0);
        let params = HamiltonianParams::at_default_time(
            rng.random_range(-10.0..10.0),
            rng.random_range(-10.0..10.0),
        )
        .unwrap();
        let p = predict(p_g, 1.0 - p_g, &params).map_err(|e| e.to_string())?;
        ensure((p.interference - 1.0 / 12.0).abs() < 1e-9, || {
            format!("interference {} at p_g={p_g}, {params:?}", p.interference)
        })?;
    }
    for rec in embedded_experiments()
        .iter()
        .filter(|r| r.face_type == FaceType::Narrow)
    {
        let r = embedded_reference(&rec.source_id, ModelKind::Qdb).unwrap();
        let diff = r.p_attack - r.p_t;
        ensure((diff - 0.0833).abs() <= 0.0002 + 1e-12, || {
            format!("{} published P(A) - P_T = {diff:.4}", rec.source_id)
        })?;
    }
    Ok("1000 random draws at 1/12, published differences 0.0833".into())
}

fn accuracy() -> Check {
    let rows = table4(&ModelConfig::default()).map_err(|e| e.to_string())?;
    let mre = mean_relative_error(&rows);
    ensure(mre <= 0.05, || {
        format!("mean relative error {:.2}%", mre * 100.0)
    })?;
    Ok(format!("mean relative error {:.2}%", mre * 100.0))
}

fn unitarity() -> Check {
    let mut rng = StdRng::seed_from_u64(4);
    let mut worst_u: f64 = 0.0;
    let mut worst_n: f64 = 0.0;
    for _ in 0..1000 {
        let h = rng.random_range(-10.0..10.0);
        let t = rng.random_range(-10.0..10.0);
        let hm = build_block_hamiltonian(h);
        let u = matrix_exponential_unitary(&hm, t).map_err(|e| e.to_string())?;
        worst_u = worst_u.max(u.unitarity_defect());
        let p_g = rng.random_range(0.0..=1.0);
        let state = initial_state_from_priors(p_g, 1.0 - p_g).unwrap();
        let full = hm.direct_sum(&build_block_hamiltonian(-h));
        let evolved = evolve(&state, &full, t).map_err(|e| e.to_string())?;
        worst_n = worst_n.max((evolved.norm_squared().sqrt() - 1.0).abs());
    }
    ensure(worst_u < 1e-12 && worst_n < 1e-12, || {
        format!("unitarity defect {worst_u:e}, norm drift {worst_n:e}")
    })?;
    Ok(format!("defect {worst_u:.1e}, drift {worst_n:.1e}"))
}

fn uncertain_invariance() -> Check {
    let mut worst: f64 = 0.0;
    for i in 0..=2000 {
        let h = -10.0 + i as f64 * 0.01;
        let p = qdb_core::model::block_action_probabilities(h, FRAC_PI_2);
        worst = worst.max((p.uncertain - 1.0 / 3.0).abs());
    }
    ensure(worst <= 1e-12, || format!("max |P(U) - 1/3| = {worst:e}"))?;
    Ok(format!("2001 points, max deviation {worst:.1e}"))
}

fn oracle_equivalence() -> Check {
    let mut worst_closed: f64 = 0.0;
    for i in 0..=20_000 {
        let h = -10.0 + i as f64 * 1e-3;
        let d = (qdb_conditional(h, FRAC_PI_2, 0.25) - closed_form_conditional(h, 0.25)).abs();
        worst_closed = worst_closed.max(d);
    }
    ensure(worst_closed <= 1e-10, || {
        format!("closed form gap {worst_closed:e}")
    })?;

    let mut rng = StdRng::seed_from_u64(6);
    let mut worst_series: f64 = 0.0;
    for _ in 0..500 {
        let h = common::random_hermitian(&mut rng, 3, 3.0);
        let mut t: f64 = rng.random_range(-5.0..5.0);
        let norm = common::frobenius(&h);
        if norm * t.abs() > 20.0 {
            t *= 20.0 / (norm * t.abs());
        }
        let u = matrix_exponential_unitary(&h, t).map_err(|e| e.to_string())?;
        let reference: SquareMatrix = common::series_exp(&h, t);
        worst_series = worst_series.max(u.matrix().max_abs_diff(&reference));
    }
    ensure(worst_series <= 1e-10, || {
        format!("series oracle gap {worst_series:e}")
    })?;
    Ok(format!(
        "closed form {worst_closed:.1e}, series {worst_series:.1e}"
    ))
}

fn markov_baseline() -> Check {
    let r = embedded_experiment("Townsend2000", FaceType::Narrow).unwrap();
    let p = markov_total_probability(r.p_g, r.p_attack_given_good, r.p_b, r.p_attack_given_bad)
        .map_err(|e| e.to_string())?;
    ensure((p - 0.5926).abs() <= 1e-12, || format!("P_T = {p}"))?;
    let m = markov_predict(r.p_g, r.p_attack_given_good, r.p_b, r.p_attack_given_bad).unwrap();
    ensure(m.interference() == 0.0, || {
        format!("interference {}", m.interference())
    })?;
    Ok(format!("P_T = P(A) = {p:.4}"))
}

fn pignistic() -> Check {
    let cases: [(&str, &[(&str, f64)]); 3] = [
        ("A,W:1", &[("A", 0.5), ("W", 0.5)]),
        ("A:0.4 A,W:0.6", &[("A", 0.7), ("W", 0.3)]),
        ("A,U,W:0.3 U:0.7", &[("A", 0.1), ("U", 0.8), ("W", 0.1)]),
    ];
    for (spec, expected) in cases {
        let bet = pignistic_transform(&spec.parse::<MassFunction>().map_err(|e| e.to_string())?);
        ensure(bet.len() == expected.len(), || format!("{spec}: {bet:?}"))?;
        for (label, p) in expected {
            ensure((bet[*label] - p).abs() < 1e-15, || {
                format!("{spec}: {bet:?}")
            })?;
        }
    }
    let mut rng = StdRng::seed_from_u64(8);
    let labels = ["a", "b", "c", "d", "e", "f"];
    for _ in 0..1000 {
        let n = rng.random_range(1..=8);
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let focal: Vec<(Vec<&str>, f64)> = raw
            .iter()
            .map(|m| {
                let mut subset: Vec<&str> = labels
                    .iter()
                    .copied()
                    .filter(|_| rng.random_bool(0.5))
                    .collect();
                if subset.is_empty() {
                    subset.push(labels[rng.random_range(0..labels.len())]);
                }
                (subset, m / total)
            })
            .collect();
        let mass = MassFunction::new(focal, &[]).map_err(|e| e.to_string())?;
        let sum: f64 = pignistic_transform(&mass).values().sum();
        ensure((sum - 1.0).abs() <= 1e-12, || {
            format!("sum {sum} for {mass}")
        })?;
    }
    Ok("3 examples exact, 1000 random sums at 1".into())
}

fn fit_round_trip() -> Check {
    let mut rng = StdRng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let h_star = rng.random_range(-10.0..=10.0);
        let target = qdb_conditional(h_star, FRAC_PI_2, 0.25);
        let fit = fit_block_param(target, 0.25);
        worst = worst.max((fit.fitted - target).abs());
    }
    ensure(worst <= 1e-6, || format!("worst residual {worst:e}"))?;
    Ok(format!("100 targets, worst residual {worst:.1e}"))
}

fn cli_contract() -> Check {
    let bin = env!("CARGO_BIN_EXE_qdb");
    let out = Command::new(bin)
        .args(["reproduce", "t4"])
        .output()
        .map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    ensure(out.status.code() == Some(0), || {
        format!("reproduce t4 exited {:?}", out.status)
    })?;
    ensure(
        stdout.matches("PASS").count() >= 6 && !stdout.contains("FAIL"),
        || stdout.to_string(),
    )?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let records = embedded_experiments();
    let results: Vec<FitResult> = records
        .iter()
        .map(|r| {
            let fit = fit_experiment(r.p_g, r.p_b, r.p_attack_given_good, r.p_attack_given_bad)?;
            Ok(FitResult::new(r.clone(), &fit))
        })
        .collect::<qdb_core::Result<_>>()
        .map_err(|e| e.to_string())?;
    for (format, name) in [(FileFormat::Json, "fit.json"), (FileFormat::Csv, "fit.csv")] {
        let path = dir.path().join(name);
        qdb_core::export_results(&results, &path, format).map_err(|e| e.to_string())?;
        let back = load_experiments(&path).map_err(|e| e.to_string())?;
        ensure(back.len() == records.len(), || {
            format!("{name}: {} rows", back.len())
        })?;
        for (a, b) in records.iter().zip(&back) {
            let fields = [
                (a.p_g, b.p_g),
                (a.p_attack_given_good, b.p_attack_given_good),
                (a.p_b, b.p_b),
                (a.p_attack_given_bad, b.p_attack_given_bad),
                (a.p_t_observed, b.p_t_observed),
                (a.p_attack_observed, b.p_attack_observed),
            ];
            ensure(
                a.source_id == b.source_id
                    && a.face_type == b.face_type
                    && fields.iter().all(|(x, y)| (x - y).abs() < 5e-7),
                || format!("{name}: {a:?} != {b:?}"),
            )?;
        }
        let rendered = render_results(&results, format).map_err(|e| e.to_string())?;
        let reparsed = parse_experiments(&rendered, format, &path).map_err(|e| e.to_string())?;
        ensure(reparsed == back, || {
            format!("{name}: rendering differs from file")
        })?;
    }

    let bad = dir.path().join("bad.csv");
    std::fs::write(
        &bad,
        "source_id,face_type,p_g,p_attack_given_good,p_b,p_attack_given_bad,p_t_observed,p_attack_observed\n\
         ok,narrow,0.17,0.41,0.83,0.63,0.59,0.69\n\
         broken,narrow,1.7,0.41,0.83,0.63,0.59,0.69\n",
    )
    .map_err(|e| e.to_string())?;
    let out = Command::new(bin)
        .args(["fit", "-i"])
        .arg(&bad)
        .output()
        .map_err(|e| e.to_string())?;
    let stderr = String::from_utf8_lossy(&out.stderr);
    ensure(out.status.code() == Some(1), || {
        format!("bad input exited {:?}", out.status)
    })?;
    ensure(stderr.contains("row 2") && stderr.contains("p_g"), || {
        stderr.to_string()
    })?;
    Ok(format!(
        "t4 PASS, JSON/CSV lossless, bad file: {}",
        stderr.trim()
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("published fit reproduction", table4_reproduction),
        ("interference constant", interference_constant),
        ("accuracy", accuracy),
        ("unitarity and normalization", unitarity),
        ("uncertain-state invariance", uncertain_invariance),
        ("oracle equivalence", oracle_equivalence),
        ("Markov baseline", markov_baseline),
        ("pignistic transformation", pignistic),
        ("fit round trip", fit_round_trip),
        ("CLI contract", cli_contract),
    ];
    let start = Instant::now();
    let mut failures = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = check();
        let ms = t.elapsed().as_millis();
        match &result {
            Ok(detail) => println!("PASS {:>2}. {name}: {detail} ({ms} ms)", i + 1),
            Err(detail) => {
                println!("FAIL {:>2}. {name}: {detail} ({ms} ms)", i + 1);
                failures.push(i + 1);
            }
        }
    }
    println!(
        "{} of 10 criteria passed in {:.2} s",
        10 - failures.len(),
        start.elapsed().as_secs_f64()
    );
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
