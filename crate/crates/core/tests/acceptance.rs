//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Criterion 15 (byte-identical CLI output) lives in the CLI crate's
//! integration tests, next to the binary it exercises.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use emlab_core::capacity::{cap_equivalence_check, capacitary_potential};
use emlab_core::geom::{
    frostman_check, frostman_exhaustive_oracle, greedy_decompose, hausdorff_outer,
    log_moment_check_1d, omega, verify_decomposition, CoverMode, HausdorffTarget, PointMeasure,
    PowerStepFn, SubsetHausdorff,
};
use emlab_core::grid::{Domain, GridFunction};
use emlab_core::linear::{check_interpolation, check_kato, solve_linear, SolverOptions};
use emlab_core::measure::DiscreteMeasure;
use emlab_core::nonlin::Nonlinearity;
use emlab_core::reduced::{
    critical_boundary, reduced_measure, threshold_scan_exponential, ReducedOptions,
};
use emlab_core::semilinear::{check_absorption, contraction_solve, SemilinearProblem};

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn ball3(h: f64) -> Arc<Domain<f64>> {
    Domain::new_ball(3, &[0.0, 0.0, 0.0], 1.0, h).unwrap()
}

fn dirac3(dom: &Arc<Domain<f64>>) -> DiscreteMeasure<f64> {
    DiscreteMeasure::dirac(dom, &[0.0, 0.0, 0.0], 1.0, true).unwrap()
}

/// Criterion 1: 3D Green's function on the unit ball, relative ℓ¹ error
/// against c₃(1/|x| − 1) with c₃ = 1/4π: ≤ 8% at h = 1/32, decreasing across
/// h ∈ {1/8, 1/16, 1/32}, runtime ≤ 60 s.
#[test]
fn criterion_01_green_function_3d() {
    let t0 = Instant::now();
    let c3 = 1.0 / (4.0 * PI);
    let mut errs = Vec::new();
    for &n in &[8.0, 16.0, 32.0] {
        let dom = ball3(1.0 / n);
        let mu = dirac3(&dom);
        let rep = solve_linear(&dom, &mu, &SolverOptions::default()).unwrap();
        let centre = dom.nearest_interior_node(&[0.0, 0.0, 0.0]);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..dom.interior_count() {
            if i == centre {
                continue; // the continuum reference is +∞ on the atom itself
            }
            let p = dom.node_pos(i);
            let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            let exact = c3 * (1.0 / r - 1.0);
            num += (rep.u.values()[i] - exact).abs();
            den += exact.abs();
        }
        errs.push(num / den);
    }
    let elapsed = t0.elapsed();
    let pass = errs[2] <= 0.08 && errs[1] > errs[2] && errs[0] > errs[1] && elapsed.as_secs() <= 60;
    report(
        "criterion 1 (Green 3D)",
        pass,
        &format!("rel l1 errors {errs:?}, elapsed {elapsed:?}"),
    );
    assert!(pass);
}

fn ladder_l1_and_tv(p: f64, spacings: &[f64]) -> (Vec<f64>, f64, f64) {
    let g = Nonlinearity::polynomial(p).unwrap();
    let opts = ReducedOptions::default();
    let mut l1 = Vec::new();
    let mut tv_mu_star = 0.0;
    let mut tv_mu = 0.0;
    for &h in spacings {
        let dom = ball3(h);
        let mu = dirac3(&dom);
        let r = reduced_measure(&dom, &g, &mu, &opts).unwrap();
        l1.push(r.u_star.norms().l1);
        tv_mu_star = r.mu_star.tv_norm();
        tv_mu = mu.tv_norm();
    }
    (l1, tv_mu_star, tv_mu)
}

/// Criterion 2: supercritical collapse surrogate at g(t) = t³, μ = δ₀, N = 3.
///
/// The monotone-decrease clause holds. The 0.5× clauses cannot hold at the
/// borderline exponent p = N/(N−2) = 3: the absorbed mass near the atom
/// grows only like 6.3e-3·ln(1/h) (≈ 0.027 at h = 1/32), so the fixed-h
/// solutions shrink by ~1% per refinement back-to-back, not by half, and the
/// saturated ladder retains the full atom. This test states the criterion
/// verbatim and is expected to stay red; see the README notes.
#[test]
fn criterion_02_supercritical_collapse() {
    let (l1, tv_mu_star, tv_mu) = ladder_l1_and_tv(3.0, &[1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0]);
    let monotone = l1[1] < l1[0] && l1[2] < l1[1];
    let halved = l1[2] <= 0.5 * l1[0];
    let tv_halved = tv_mu_star <= 0.5 * tv_mu;
    let pass = monotone && halved && tv_halved;
    report(
        "criterion 2 (supercritical collapse)",
        pass,
        &format!(
            "l1 {l1:?} (monotone {monotone}, halved {halved}), tv(mu*) {tv_mu_star:.3} vs 0.5·{tv_mu:.3} ({tv_halved})"
        ),
    );
    assert!(
        pass,
        "expected red: logarithmic collapse at the borderline exponent; \
         l1 ratio {:.3}, tv ratio {:.3}",
        l1[2] / l1[0],
        tv_mu_star / tv_mu
    );
}

/// Criterion 3: subcritical persistence, g(t) = t²: tv(μ − μ*) ≤ 0.1·tv(μ)
/// at h = 1/32.
#[test]
fn criterion_03_subcritical_persistence() {
    let g = Nonlinearity::polynomial(2.0).unwrap();
    let dom = ball3(1.0 / 32.0);
    let mu = dirac3(&dom);
    let r = reduced_measure(&dom, &g, &mu, &ReducedOptions::default()).unwrap();
    let gap = mu.sub(&r.mu_star).unwrap().tv_norm();
    let pass = gap <= 0.1 * mu.tv_norm();
    report(
        "criterion 3 (subcritical persistence)",
        pass,
        &format!(
            "tv(mu - mu*) = {gap:.3e} vs 0.1·tv = {:.3e}",
            0.1 * mu.tv_norm()
        ),
    );
    assert!(pass);
}

/// Criterion 4: exponential threshold on the 2D disk. I(2π, 1/128) within
/// 10% of 2π; the convergent/divergent boundary inside [3.4π, 4.6π] across
/// h ∈ {1/32, 1/64, 1/128}; each run ≤ 120 s.
#[test]
fn criterion_04_exponential_threshold() {
    let t0 = Instant::now();
    let spacings = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];
    let masses: Vec<f64> = [2.0, 2.6, 3.0, 3.4, 3.8, 4.2, 4.6, 5.2, 6.0]
        .iter()
        .map(|m| m * PI)
        .collect();
    let rows = threshold_scan_exponential(&masses, &spacings, &SolverOptions::default()).unwrap();
    let elapsed = t0.elapsed();

    let i_2pi = rows
        .iter()
        .find(|r| (r.param - 2.0 * PI).abs() < 1e-9 && (r.h - 1.0 / 128.0).abs() < 1e-12)
        .unwrap()
        .statistic;
    let value_ok = (i_2pi - 2.0 * PI).abs() <= 0.1 * (2.0 * PI);

    // the boundary must sit inside the window: everything ≤ 3.4π convergent,
    // everything ≥ 4.6π divergent
    let low_ok = rows
        .iter()
        .filter(|r| r.param <= 3.4 * PI + 1e-9)
        .all(|r| r.classification == "convergent");
    let high_ok = rows
        .iter()
        .filter(|r| r.param >= 4.6 * PI - 1e-9)
        .all(|r| r.classification == "divergent");
    let boundary = critical_boundary(&rows);
    let time_ok = elapsed.as_secs() <= 120;

    let pass = value_ok && low_ok && high_ok && time_ok;
    report(
        "criterion 4 (exponential threshold)",
        pass,
        &format!(
            "I(2π, 1/128) = {i_2pi:.4} (target {:.4} ±10%), boundary ≈ {boundary:?} (/π: {:?}), elapsed {elapsed:?}",
            2.0 * PI,
            boundary.map(|b| b / PI)
        ),
    );
    assert!(pass);
}

/// Criterion 5: Brezis–Merle bound, c ∈ {π, 2π, 3π} at h = 1/128:
/// grid integral ≤ πd²/(1 − c/4π) + 10% with d = 2 (disk diameter).
#[test]
fn criterion_05_brezis_merle_bound() {
    let dom = Domain::<f64>::new_ball(2, &[0.0, 0.0], 1.0, 1.0 / 128.0).unwrap();
    let mut all_ok = true;
    let mut details = String::new();
    for &c in &[PI, 2.0 * PI, 3.0 * PI] {
        let mu = DiscreteMeasure::dirac(&dom, &[0.0, 0.0], c, true).unwrap();
        let rep = solve_linear(&dom, &mu, &SolverOptions::default()).unwrap();
        let integral = dom.cell_volume() * rep.u.values().iter().map(|&v| v.exp()).sum::<f64>();
        let bound = emlab_core::geom::brezis_merle_bound(c, 2.0).unwrap();
        let ok = integral <= 1.1 * bound;
        all_ok &= ok;
        details.push_str(&format!(
            "c={:.2}π: I={integral:.3} ≤ 1.1·{bound:.3} ({ok}); ",
            c / PI
        ));
    }
    report("criterion 5 (Brezis-Merle bound)", all_ok, &details);
    assert!(all_ok);
}

/// Criterion 6: discrete Kato inequalities on 1000 random grid functions,
/// single- and two-function forms, zero tolerance.
#[test]
fn criterion_06_kato_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let dom = Domain::<f64>::new_box(&[(0.0, 1.0), (0.0, 1.0)], 0.1).unwrap();
    let mut random_u = |rng: &mut ChaCha8Rng| -> GridFunction<f64> {
        let vals: Vec<f64> = (0..dom.interior_count())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        dom.from_values(vals).unwrap()
    };
    let mut worst_single = f64::INFINITY;
    let mut worst_pair = f64::INFINITY;
    for _ in 0..500 {
        let u1 = random_u(&mut rng);
        let u2 = random_u(&mut rng);
        let f1 = u1.laplacian_apply().scale(-1.0);
        let f2 = u2.laplacian_apply().scale(-1.0);
        let single = check_kato(&u1, &f1, None, 0.0).unwrap();
        let pair = check_kato(&u1, &f1, Some((&u2, &f2)), 0.0).unwrap();
        assert!(single.pass && pair.pass);
        worst_single = worst_single.min(single.single_margin.min(pair.single_margin));
        worst_pair = worst_pair.min(pair.pair_margin.unwrap());
    }
    let pass = worst_single >= 0.0 && worst_pair >= 0.0;
    report(
        "criterion 6 (Kato suite)",
        pass,
        &format!("1000 functions; worst margins: single {worst_single:e}, pair {worst_pair:e}"),
    );
    assert!(pass);
}

/// Criterion 7: interpolation inequality ‖D T_κ(u)‖² ≤ κ·tv(μ) with ≤ 1e-12
/// slack on 200 random (μ, κ) instances.
#[test]
fn criterion_07_interpolation_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let tight = SolverOptions {
        tol_rel: 1e-13,
        ..Default::default()
    };
    let mut pass = true;
    for case in 0..200 {
        let dim2 = case % 2 == 1;
        let dom = if dim2 {
            Domain::<f64>::new_box(&[(0.0, 1.0), (0.0, 1.0)], 1.0 / 10.0).unwrap()
        } else {
            Domain::<f64>::new_box(&[(0.0, 1.0)], 1.0 / 24.0).unwrap()
        };
        let mut mu = DiscreteMeasure::zero(&dom);
        for _ in 0..rng.gen_range(0..3) {
            let p: Vec<f64> = (0..dom.dim()).map(|_| rng.gen_range(0.1..0.9)).collect();
            mu.push_atom(&p, rng.gen_range(-2.0..2.0), rng.gen_bool(0.3))
                .unwrap();
        }
        if rng.gen_bool(0.7) {
            let vals: Vec<f64> = (0..dom.interior_count())
                .map(|_| rng.gen_range(-1.0..1.5))
                .collect();
            mu.set_density(dom.from_values(vals).unwrap()).unwrap();
        }
        if mu.tv_norm() == 0.0 {
            continue;
        }
        let mut rep = solve_linear(&dom, &mu, &tight).unwrap();
        let kappa = rng.gen_range(0.0..1.2) * rep.u.norms().linf.max(1e-3);
        let chk = check_interpolation(&mut rep, &mu, kappa, 1e-12).unwrap();
        if !chk.pass {
            println!("  instance {case}: lhs {} rhs {}", chk.lhs, chk.rhs);
            pass = false;
        }
    }
    report(
        "criterion 7 (interpolation)",
        pass,
        "200 random (mu, kappa) instances",
    );
    assert!(pass);
}

/// Criterion 8: absorption ‖g(u)‖ℓ¹ ≤ tv(μ) + 1e-6 for every converged
/// semilinear trace.
#[test]
fn criterion_08_absorption() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let gs: Vec<Nonlinearity<f64>> = vec![
        Nonlinearity::linear(),
        Nonlinearity::polynomial(2.0).unwrap(),
        Nonlinearity::polynomial(3.0).unwrap(),
        Nonlinearity::exponential(),
    ];
    let mut checked = 0;
    let mut pass = true;
    for case in 0..32 {
        let dom = if case % 2 == 0 {
            Domain::<f64>::new_box(&[(0.0, 1.0)], 1.0 / 32.0).unwrap()
        } else {
            Domain::<f64>::new_box(&[(0.0, 1.0), (0.0, 1.0)], 1.0 / 12.0).unwrap()
        };
        let mut mu = DiscreteMeasure::zero(&dom);
        if rng.gen_bool(0.5) {
            let p: Vec<f64> = (0..dom.dim()).map(|_| rng.gen_range(0.2..0.8)).collect();
            mu.push_atom(&p, rng.gen_range(-1.5..1.5), rng.gen_bool(0.5))
                .unwrap();
        }
        let vals: Vec<f64> = (0..dom.interior_count())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        mu.set_density(dom.from_values(vals).unwrap()).unwrap();

        let g = gs[case % gs.len()].clone();
        let prob = SemilinearProblem::new(&dom, g, mu.clone());
        let trace = contraction_solve(&prob).unwrap();
        assert!(trace.converged);
        let (lhs, rhs, ok) = check_absorption(&trace, &mu, 1e-6);
        if !ok {
            println!("  case {case}: |g(u)| {lhs} > tv {rhs} + 1e-6");
            pass = false;
        }
        checked += 1;
    }
    report(
        "criterion 8 (absorption)",
        pass,
        &format!("{checked} converged traces"),
    );
    assert!(pass);
}

/// Criterion 9: Brezis–Strauss contraction across 50 random data pairs for
/// monotone g: ‖g(u_m) − g(u_n)‖ℓ¹ ≤ tv(μ_m − μ_n) + 2·tol.
#[test]
fn criterion_09_contraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let dom = Domain::<f64>::new_box(&[(0.0, 1.0), (0.0, 1.0)], 1.0 / 12.0).unwrap();
    let gs: Vec<Nonlinearity<f64>> = vec![
        Nonlinearity::linear(),
        Nonlinearity::polynomial(3.0).unwrap(),
        Nonlinearity::exponential(),
    ];
    let mut pass = true;
    for case in 0..50 {
        let mut make_mu = |rng: &mut ChaCha8Rng| {
            let mut mu = DiscreteMeasure::zero(&dom);
            let vals: Vec<f64> = (0..dom.interior_count())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            mu.set_density(dom.from_values(vals).unwrap()).unwrap();
            if rng.gen_bool(0.4) {
                mu.push_atom(
                    &[rng.gen_range(0.2..0.8), rng.gen_range(0.2..0.8)],
                    rng.gen_range(-1.0..1.0),
                    false,
                )
                .unwrap();
            }
            mu
        };
        let mu_m = make_mu(&mut rng);
        let mu_n = make_mu(&mut rng);
        let g = gs[case % gs.len()].clone();
        let pm = SemilinearProblem::new(&dom, g.clone(), mu_m.clone());
        let pn = SemilinearProblem::new(&dom, g.clone(), mu_n.clone());
        let tm = contraction_solve(&pm).unwrap();
        let tn = contraction_solve(&pn).unwrap();
        let lhs = tm.g_of_u.sub(&tn.g_of_u).norms().l1;
        let rhs = mu_m.sub(&mu_n).unwrap().tv_norm() + 2.0 * pm.tol.max(pn.tol);
        if lhs > rhs {
            println!("  pair {case}: {lhs} > {rhs}");
            pass = false;
        }
    }
    report("criterion 9 (contraction)", pass, "50 random data pairs");
    assert!(pass);
}

/// Criterion 10: Hausdorff values — exact single-ball formula at machine
/// precision (independent Γ quadrature oracle), 3-point counting measure,
/// and the 33-sample segment within 5% of its length.
#[test]
fn criterion_10_hausdorff_balls() {
    // independent Γ via composite Simpson on ∫₀^∞ t^{x-1} e^{-t} dt
    let gamma_quad = |x: f64| -> f64 {
        let f = |t: f64| {
            if t <= 0.0 {
                0.0
            } else {
                t.powf(x - 1.0) * (-t).exp()
            }
        };
        let (a, b, n) = (1e-12, 60.0, 600_000);
        let hstep = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for k in 1..n {
            let t = a + k as f64 * hstep;
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(t);
        }
        s * hstep / 3.0
    };

    let mut pass = true;
    // single balls: ω_s r^s for integer s against closed forms, fractional s
    // against the quadrature oracle
    for &(s, r) in &[(0.0, 0.4), (1.0, 0.7), (2.0, 0.3), (3.0, 0.9), (1.5, 0.5)] {
        let (v, _) = hausdorff_outer::<f64>(
            &HausdorffTarget::Ball {
                center: [0.0; 3],
                radius: r,
            },
            3,
            s,
            1.0,
            CoverMode::Exact,
        )
        .unwrap();
        let expect = match s {
            s if s == 0.0 => 1.0,
            s if s == 1.0 => 2.0 * r,
            s if s == 2.0 => PI * r * r,
            s if s == 3.0 => 4.0 * PI / 3.0 * r * r * r,
            _ => PI.powf(s / 2.0) / gamma_quad(s / 2.0 + 1.0) * r.powf(s),
        };
        let tol = if s == 1.5 {
            1e-7 * expect
        } else {
            1e-13 * (1.0 + expect)
        };
        if (v - expect).abs() > tol {
            println!("  ball s={s} r={r}: {v} vs {expect}");
            pass = false;
        }
    }

    // 3 distinct points, s = 0, δ below half the min gap → 3
    let pts = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.3, 0.9, 0.0]];
    let (v3, _) = hausdorff_outer(
        &HausdorffTarget::Points(&pts),
        2,
        0.0,
        0.2,
        CoverMode::Exact,
    )
    .unwrap();
    if v3 != 3.0 {
        println!("  3-point counting: {v3}");
        pass = false;
    }

    // 33 samples of [0, L]: greedy H¹_∞ within 5% of L
    let l = 2.4;
    let seg: Vec<[f64; 3]> = (0..33).map(|i| [l * i as f64 / 32.0, 0.0, 0.0]).collect();
    let (vseg, cover) = hausdorff_outer(
        &HausdorffTarget::Points(&seg),
        1,
        1.0,
        f64::INFINITY,
        CoverMode::Greedy,
    )
    .unwrap();
    if (vseg - l).abs() > 0.05 * l || !cover.covers(&seg) {
        println!("  segment: {vseg} vs {l}");
        pass = false;
    }

    report(
        "criterion 10 (Hausdorff balls)",
        pass,
        &format!("ball formula, counting = {v3}, segment = {vseg:.4} vs L = {l}"),
    );
    assert!(pass);
}

/// Criterion 11: Frostman equivalence against the exhaustive subset oracle
/// on 100 random ≤ 8-atom measures.
#[test]
fn criterion_11_frostman_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut agreements = 0;
    let mut pass = true;
    for case in 0..100 {
        let n = rng.gen_range(1..=8);
        let pts: Vec<[f64; 3]> = (0..n)
            .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0])
            .collect();
        let ws: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.5)).collect();
        let nu = PointMeasure::new(2, pts, ws).unwrap();
        let s = if case % 3 == 2 { 0.5 } else { 0.0 };
        let alpha = rng.gen_range(0.3..2.5);
        let delta = rng.gen_range(0.1..2.0);
        let fast = frostman_check(&nu, alpha, s, delta).unwrap();
        let slow = frostman_exhaustive_oracle(&nu, alpha, s, delta).unwrap();
        if fast != slow {
            println!("  case {case}: density {fast} vs subsets {slow} (s={s})");
            pass = false;
        } else {
            agreements += 1;
        }
    }
    report(
        "criterion 11 (Frostman equivalence)",
        pass,
        &format!("{agreements}/100 agree"),
    );
    assert!(pass);
}

/// Criterion 12: greedy decomposition postconditions verified exhaustively
/// on 100 random ≤ 12-atom instances.
#[test]
fn criterion_12_greedy_decomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut pass = true;
    for case in 0..100 {
        let n = rng.gen_range(1..=12);
        let pts: Vec<[f64; 3]> = (0..n)
            .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0])
            .collect();
        let ws: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..2.0)).collect();
        let mu = PointMeasure::new(2, pts.clone(), ws).unwrap();
        let alpha = rng.gen_range(0.3..2.0);
        let delta = rng.gen_range(0.05..1.5);
        let sh = SubsetHausdorff::build(&pts, 0.0, delta).unwrap();
        let mut t = |mask: u64| alpha * sh.value(mask);
        let kept = greedy_decompose(&mu, &mut t, 0.5).unwrap();
        if !verify_decomposition(&mu, &mut t, kept) {
            println!("  case {case}: postconditions fail (kept {kept:b})");
            pass = false;
        }
    }
    report(
        "criterion 12 (greedy decomposition)",
        pass,
        "100 instances, exhaustive subsets",
    );
    assert!(pass);
}

/// Criterion 13: the step family f_ε(r) = α r^s χ_{r ≥ ε} reproduces the
/// exact logarithmic left side and an O(1) right-left gap down to ε = 1e-6.
#[test]
fn criterion_13_log_estimate_1d() {
    let (alpha, s, d) = (1.0, 1.0, 1.0);
    let mut pass = true;
    let mut gaps = Vec::new();
    for k in 1..=6 {
        let eps = 10f64.powi(-k);
        let f = PowerStepFn {
            pieces: vec![(0.0, 0.0, 0.0), (eps, alpha, s)],
            d,
        };
        let chk = log_moment_check_1d(&f, alpha, s).unwrap();
        let lhs_exact = alpha * (d / eps).ln();
        if !chk.pass || (chk.lhs - lhs_exact).abs() > 1e-9 * (1.0 + lhs_exact) {
            println!(
                "  eps={eps}: lhs {} (exact {lhs_exact}), rhs {}",
                chk.lhs, chk.rhs
            );
            pass = false;
        }
        gaps.push(chk.rhs - chk.lhs);
    }
    let gmin = gaps.iter().cloned().fold(f64::MAX, f64::min);
    let gmax = gaps.iter().cloned().fold(f64::MIN, f64::max);
    if gmax - gmin > 1.0 || gmax > 5.0 {
        println!("  gaps not O(1): {gaps:?}");
        pass = false;
    }
    report(
        "criterion 13 (1D log estimate)",
        pass,
        &format!("gap range [{gmin:.4}, {gmax:.4}] over eps in 1e-1..1e-6"),
    );
    assert!(pass);
}

/// Criterion 14: capacity equivalence |‖Δ(u_K − ε)⁺‖ℓ¹ − 2·cap|/cap ≤ 0.2 at
/// h = 1/32 for a center node and a 3×3 block.
#[test]
fn criterion_14_capacity_equivalence() {
    let dom = Domain::<f64>::new_box(&[(0.0, 1.0), (0.0, 1.0)], 1.0 / 32.0).unwrap();
    let centre = dom.nearest_interior_node(&[0.5, 0.5]);
    let mut block = Vec::new();
    for i in 0..dom.interior_count() {
        let p = dom.node_pos(i);
        if (p[0] - 0.5).abs() <= 1.0 / 32.0 + 1e-12 && (p[1] - 0.5).abs() <= 1.0 / 32.0 + 1e-12 {
            block.push(i);
        }
    }
    assert_eq!(block.len(), 9);

    let mut pass = true;
    let mut details = String::new();
    for (name, k) in [("center-node", vec![centre]), ("3x3-block", block)] {
        let r = capacitary_potential(&dom, &k).unwrap();
        let chk = cap_equivalence_check(&r, 0.5, 0.2).unwrap();
        details.push_str(&format!(
            "{name}: mass {:.4} vs 2·cap {:.4} (rel err {:.3}); ",
            chk.mass,
            2.0 * chk.cap,
            chk.ratio_error
        ));
        pass &= chk.pass;
    }
    report("criterion 14 (capacity equivalence)", pass, &details);
    assert!(pass);
}

/// Sanity anchor used by criterion 4: at c = 0 the integral is the disk area.
#[test]
fn exponential_scan_zero_mass_area() {
    let dom = Domain::<f64>::new_ball(2, &[0.0, 0.0], 1.0, 1.0 / 128.0).unwrap();
    let zero = dom.zeros();
    let integral = dom.cell_volume() * zero.values().iter().map(|&v| v.exp()).sum::<f64>();
    let pass = (integral - PI).abs() < 0.05 * PI;
    report(
        "criterion 4 anchor (c = 0 area)",
        pass,
        &format!("h² Σ e⁰ = {integral:.5} vs π = {PI:.5}"),
    );
    assert!(pass);
}

/// ω_s anchors used throughout the geometry: ω₀ = 1, ω₁ = 2, ω₂ = π,
/// ω₃ = 4π/3.
#[test]
fn omega_anchor_values() {
    let pass = (omega::<f64>(0.0).unwrap() - 1.0).abs() < 1e-12
        && (omega::<f64>(1.0).unwrap() - 2.0).abs() < 1e-12
        && (omega::<f64>(2.0).unwrap() - PI).abs() < 1e-12
        && (omega::<f64>(3.0).unwrap() - 4.0 * PI / 3.0).abs() < 1e-12;
    report("omega anchors", pass, "ω₀..ω₃ against closed forms");
    assert!(pass);
}
