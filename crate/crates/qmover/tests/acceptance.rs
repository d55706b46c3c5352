//! End-to-end acceptance checks. Each test prints a single PASS/FAIL line
//! so the suite doubles as a claim report:
//! `cargo test --test acceptance -- --nocapture`.

use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qmover::channels::convex_combine;
use qmover::movers::{
    appendix_a_solve, appendix_b_g, check_gqm_constraints, constraint_tensor, cp_threshold,
    critical_p, is_gqm, lambda_formula, output_purity, purity_check, universal_inverter,
    witness_map, witness_scan_cell, InverterParams, WitnessParams,
};
use qmover::states::random_pure_state;

type C64 = Complex64;

fn report(name: &str, ok: bool, detail: &str) {
    println!("[{}] {}: {}", if ok { "PASS" } else { "FAIL" }, name, detail);
    assert!(ok, "{name}: {detail}");
}

fn p_sweep() -> Vec<f64> {
    (0..20).map(|k| 0.05 * k as f64).collect()
}

fn random_axis(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let a = [
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
        ];
        if (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt() > 0.1 {
            return a;
        }
    }
}

fn random_amplitude_pair(rng: &mut ChaCha8Rng) -> (C64, C64) {
    let theta = (rng.gen::<f64>()).asin();
    let (a, b) = (theta.cos(), theta.sin());
    let ph1 = rng.gen::<f64>() * std::f64::consts::TAU;
    let ph2 = rng.gen::<f64>() * std::f64::consts::TAU;
    (C64::from_polar(a, ph1), C64::from_polar(b, ph2))
}

#[test]
fn inversion_threshold_bisection() {
    let mut worst = 0.0f64;
    let mut worst_time = 0.0f64;
    for d in 2..=6 {
        let start = Instant::now();
        let r = cp_threshold(d, 1e-9).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        worst_time = worst_time.max(elapsed);
        worst = worst.max((r.empirical - 1.0 / (d as f64 + 1.0)).abs());
        if d == 2 {
            assert!((r.empirical - 1.0 / 3.0).abs() <= 1e-9);
        }
    }
    report(
        "cp threshold",
        worst <= 1e-9 && worst_time < 1.0,
        &format!("bisection vs 1/(d+1), d=2..6: max dev {worst:.2e}, max time {worst_time:.2}s"),
    );
}

#[test]
fn fidelity_condition_on_haar_states() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0f64;
    for d in 2..=5 {
        for &p in &p_sweep() {
            let e = universal_inverter(&InverterParams::new(d, p).unwrap());
            for _ in 0..100 {
                let psi = random_pure_state(d, &mut rng).unwrap();
                let out = e.apply(&psi.projector()).unwrap();
                let f = out.sandwich(psi.amplitudes(), psi.amplitudes()).re;
                worst = worst.max((f - p).abs());
            }
        }
    }
    for _ in 0..8 {
        let axis = random_axis(&mut rng);
        for &p in &p_sweep() {
            let e = witness_map(&WitnessParams::qubit(p, axis).unwrap()).unwrap();
            for _ in 0..100 {
                let psi = random_pure_state(2, &mut rng).unwrap();
                let out = e.apply(&psi.projector()).unwrap();
                let f = out.sandwich(psi.amplitudes(), psi.amplitudes()).re;
                worst = worst.max((f - p).abs());
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "fidelity condition",
        worst <= 1e-12 && elapsed < 5.0,
        &format!("inverter d=2..5 and qubit witness maps: max |F - p| = {worst:.2e}, {elapsed:.2}s"),
    );
}

#[test]
fn output_purity_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut worst = 0.0f64;
    let mut strict = true;
    for d in 2..=5 {
        for &p in &p_sweep() {
            let params = InverterParams::new(d, p).unwrap();
            let e = universal_inverter(&params);
            let psi = random_pure_state(d, &mut rng).unwrap();
            worst = worst.max((purity_check(&e, &psi).unwrap() - output_purity(&params)).abs());
        }
        let boundary = 1.0 / (d as f64 + 1.0);
        for k in 0..=20 {
            let p = boundary + (1.0 - 1e-6 - boundary) * k as f64 / 20.0;
            let e = universal_inverter(&InverterParams::new(d, p).unwrap());
            let psi = random_pure_state(d, &mut rng).unwrap();
            strict &= purity_check(&e, &psi).unwrap() < 1.0;
        }
    }
    report(
        "output purity",
        worst <= 1e-12 && strict,
        &format!("closed form vs Tr[rho^2]: max dev {worst:.2e}, strictly mixed: {strict}"),
    );
}

#[test]
fn werner_witness_detection_region() {
    let start = Instant::now();
    let axis = [0.0, 0.0, 1.0];
    let mut worst = 0.0f64;
    let mut region_ok = true;
    for iq in 0..21 {
        let q = iq as f64 / 20.0;
        for ip in 0..21 {
            let p = 0.95 * ip as f64 / 20.0;
            let row = witness_scan_cell(q, p, axis, 1e-10).unwrap();
            worst = worst.max((row.lambda_numeric - lambda_formula(q, p)).abs());
            // skip cells within 1e-8 of the detection boundary
            if (q - 1.0 / 3.0).abs() < 1e-8 || (q > 1.0 / 3.0 && (p - critical_p(q)).abs() < 1e-8)
            {
                continue;
            }
            let expected = q > 1.0 / 3.0 && p < critical_p(q);
            region_ok &= row.detected == expected;
        }
    }
    let corner = witness_scan_cell(1.0, 0.0, axis, 1e-10).unwrap();
    let corner_ok = (corner.lambda_numeric + 0.5).abs() <= 1e-10;
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "werner witness",
        worst <= 1e-10 && region_ok && corner_ok && elapsed < 2.0,
        &format!(
            "21x21 grid: max |lambda - formula| = {worst:.2e}, region exact: {region_ok}, \
             lambda(1,0) = -1/2: {corner_ok}, {elapsed:.2}s"
        ),
    );
}

#[test]
fn orthonormal_pair_constraints() {
    let mut worst = 0.0f64;
    let mut kraus_ok = true;
    for d in 2..=4 {
        let boundary = 1.0 / (d as f64 + 1.0);
        for k in 0..10 {
            let p = k as f64 / 9.0;
            let mut e = universal_inverter(&InverterParams::new(d, p).unwrap());
            if p >= boundary - 1e-12 {
                e = e.with_kraus_from_choi(1e-9).unwrap();
            }
            let r = check_gqm_constraints(&e, p, 50, 31 + d as u64, 1e-10).unwrap();
            worst = worst.max(r.max_residual());
            if let Some(b) = &r.kraus_bound {
                kraus_ok &= b.satisfied;
            }
        }
    }
    // the pair-overlap bound is saturated for d=2 at p = 1/3
    let e = universal_inverter(&InverterParams::new(2, 1.0 / 3.0).unwrap())
        .with_kraus_from_choi(1e-9)
        .unwrap();
    let t = constraint_tensor(&e, 0, 1).unwrap();
    let tight = (t.get(0, 0, 1, 1).norm() - 1.0 / 3.0).abs() <= 1e-10;
    report(
        "pair constraints",
        worst <= 1e-10 && kraus_ok && tight,
        &format!(
            "d=2..4, 10 p-values, 50 pairs: max residual {worst:.2e}, \
             overlap bound holds: {kraus_ok}, tight at d=2: {tight}"
        ),
    );
}

#[test]
fn convex_mixtures_stay_in_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let d = rng.gen_range(2..=3);
        let n = rng.gen_range(2..=4);
        let ps: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let mut weights: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let parts: Vec<_> = ps
            .iter()
            .zip(&weights)
            .map(|(&p, &w)| (universal_inverter(&InverterParams::new(d, p).unwrap()), w))
            .collect();
        let mix = convex_combine(&parts).unwrap();
        let p_mix: f64 = ps.iter().zip(&weights).map(|(p, w)| p * w).sum();
        let verdict = is_gqm(&mix, p_mix, 5, rng.gen(), 1e-11).unwrap();
        worst = worst.max(verdict.max_deviation);
        assert!(verdict.is_gqm);
    }
    report(
        "convex closure",
        worst <= 1e-11,
        &format!("1000 random mixtures: max fidelity deviation {worst:.2e}"),
    );
}

#[test]
fn no_go_falsifiers() {
    let r = appendix_a_solve(0.5, 1000, 23).unwrap();
    let solve_ok = r.falsified_count == r.trials
        && r.max_combination_residual_at_solution <= 1e-12
        && r.max_constancy_residual_at_solution <= 1e-12;

    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let mut worst_g = 0.0f64;
    for &p in &[0.0, 0.2, 1.0 / 3.0, 0.7] {
        let e = universal_inverter(&InverterParams::new(2, p).unwrap());
        let t = constraint_tensor(&e, 0, 1).unwrap();
        for _ in 0..100 {
            let (alpha, beta) = random_amplitude_pair(&mut rng);
            worst_g = worst_g.max((appendix_b_g(&t, p, alpha, beta).unwrap() - p).abs());
        }
    }
    report(
        "no-go falsifiers",
        solve_ok && worst_g <= 1e-10,
        &format!(
            "scalar models falsified {}/{}, solution residuals {:.2e}/{:.2e}, \
             max |G - p| = {worst_g:.2e}",
            r.falsified_count,
            r.trials,
            r.max_combination_residual_at_solution,
            r.max_constancy_residual_at_solution
        ),
    );
}

#[test]
fn orthogonal_component_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let mut worst = 0.0f64;
    for &p in &[0.0, 0.2, 1.0 / 3.0, 0.6, 0.9] {
        let e = universal_inverter(&InverterParams::new(2, p).unwrap());
        for _ in 0..50 {
            let psi = random_pure_state(2, &mut rng).unwrap();
            let perp = psi.orthogonal_qubit().unwrap();
            let out = e.apply(&psi.projector()).unwrap();
            let f = out.sandwich(perp.amplitudes(), perp.amplitudes()).re;
            worst = worst.max((f - (1.0 - p)).abs());
            if (p - 1.0 / 3.0).abs() < 1e-15 {
                assert!((f - 2.0 / 3.0).abs() <= 1e-12);
            }
        }
    }
    report(
        "orthogonal-component bound",
        worst <= 1e-12,
        &format!("qubit inverter: max |<perp|out|perp> - (1-p)| = {worst:.2e}"),
    );
}

#[test]
fn cli_output_is_deterministic() {
    let bin = env!("CARGO_BIN_EXE_qmover");
    let commands: &[&[&str]] = &[
        &["threshold", "--d", "3"],
        &["threshold", "--d", "2", "--format", "json"],
        &["witness", "--q-steps", "5", "--p-steps", "5", "--seed", "7"],
        &["witness", "--q-steps", "3", "--p-steps", "3", "--format", "json"],
        &["verify", "--map", "inverter", "--d", "2", "--p", "0.5", "--samples", "20", "--seed", "3"],
        &["verify", "--map", "witness", "--d", "2", "--p", "0.25", "--samples", "10", "--format", "csv"],
        &["verify", "--map", "mix", "--d", "3", "--p", "0.4", "--samples", "10"],
        &["constraints", "--d", "2", "--p", "0.5", "--samples", "10", "--seed", "1"],
        &["constraints", "--d", "3", "--p", "0.2", "--samples", "5", "--format", "json"],
        &["nogo", "--p", "0.5", "--trials", "3", "--seed", "2"],
        &["nogo", "--p", "0", "--trials", "2", "--format", "csv"],
    ];
    let mut ok = true;
    for args in commands {
        let first = Command::new(bin).args(*args).output().unwrap();
        let second = Command::new(bin).args(*args).output().unwrap();
        let same = first.stdout == second.stdout
            && first.stderr == second.stderr
            && first.status == second.status;
        if !same || !first.status.success() {
            eprintln!(
                "command {:?}: identical = {}, status = {:?}\n{}",
                args,
                same,
                first.status,
                String::from_utf8_lossy(&first.stderr)
            );
            ok = false;
        }
    }
    report(
        "cli determinism",
        ok,
        "double runs of every subcommand are byte-identical and succeed",
    );
}
