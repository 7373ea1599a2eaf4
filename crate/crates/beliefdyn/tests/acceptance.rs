//! Acceptance suite: end-to-end checks of the solvers and the simulator
//! against closed forms, stated identities and each other, each with a
//! pinned tolerance. One test per criterion; every test prints a PASS/FAIL
//! line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Two checks (6c and 8) assert an idealized instantaneous interaction
//! field — one that jumps straight to its stationary value — which the
//! exact dynamics provably do not satisfy; see the comments on those tests
//! for the closed-form analysis. They are kept as stated, and fail, rather
//! than being weakened to match the solver. Check 5 pins a population size
//! whose finite-size fluctuations exceed its threshold; it likewise fails
//! with the measurements in its message.

use std::time::Instant;

use beliefdyn::model::{
    build_preset, AlphaShape, InitialCondition, Influence, PresetParams, Profile, ScenarioSpec,
};
use beliefdyn::numerics::{make_grid, DensityField};
use beliefdyn::stationary::{
    apply_operator_a, closed_form_product, fredholm_phi, gaussian_family_from_phi,
    homogeneous_closed_form, marginal_modes, successive_approximation, FredholmMethod,
};
use beliefdyn::transient::{density_at, laplace_consistency_check, solve_transient};
use beliefdyn::{csvio, mcsim};

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion}: {detail}");
}

fn preset(name: &str, params: PresetParams) -> ScenarioSpec {
    build_preset(name, &params).expect("preset builds")
}

fn homogeneous(alpha: f64, sigma2: f64) -> ScenarioSpec {
    preset(
        "homogeneous",
        PresetParams {
            alpha: Some(alpha),
            sigma2: Some(sigma2),
            ..Default::default()
        },
    )
}

fn inhomogeneous(shape: AlphaShape, n: u32) -> ScenarioSpec {
    preset(
        "inhomogeneous",
        PresetParams {
            shape: Some(shape),
            n: Some(n),
            ..Default::default()
        },
    )
}

fn bounded_rect(alpha: f64, sigma2: f64) -> ScenarioSpec {
    preset(
        "bounded-rect",
        PresetParams {
            alpha: Some(alpha),
            sigma2: Some(sigma2),
            ..Default::default()
        },
    )
}

/// The asymmetric constant-influence scenario: `alpha = (p+1)^2/4`,
/// `zeta = 1`, `u(p) = p`.
fn ramp_alpha_constant_influence() -> ScenarioSpec {
    preset(
        "proximity",
        PresetParams {
            n: Some(0),
            ..Default::default()
        },
    )
}

/// Criterion 1 — the solver marginal reproduces the homogeneous closed
/// form `rho(x) = [erf((a+x)/s) + erf((a-x)/s)] / (4a)` to 1e-5 on a
/// 201x801 grid for alpha in {0.1, 0.5, 1.0}, within 10 s.
#[test]
fn c1_homogeneous_closed_form() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for alpha in [0.1, 0.5, 1.0] {
        let spec = homogeneous(alpha, 0.01);
        let grid = make_grid(&spec, 201, 801).unwrap();
        let fam = closed_form_product(&spec, &grid).unwrap();
        let marg = fam.belief_marginal(&spec, &grid.x_nodes);
        for (k, &x) in grid.x_nodes.iter().enumerate() {
            worst = worst.max((marg[k] - homogeneous_closed_form(alpha, 0.01, x)).abs());
        }
    }
    let elapsed = start.elapsed();
    report(
        "C1 homogeneous closed form",
        worst <= 1e-5 && elapsed.as_secs() <= 10,
        &format!("max abs error {worst:.2e}, {elapsed:.2?}"),
    );
}

/// Criterion 2 — successive approximation, Fredholm reconstruction and the
/// product closed form agree pairwise in L1 <= 1e-4 for the four
/// inhomogeneous presets, within 60 s total.
#[test]
fn c2_three_way_solver_agreement() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for shape in [AlphaShape::OneMinusAbs, AlphaShape::Abs] {
        for n in [0, 8] {
            let spec = inhomogeneous(shape, n);
            let grid = make_grid(&spec, 201, 401).unwrap();
            let closed = closed_form_product(&spec, &grid)
                .unwrap()
                .to_density_field(&spec, &grid);
            let phi = fredholm_phi(&spec, &grid, FredholmMethod::Nystrom).unwrap();
            let fredholm = gaussian_family_from_phi(&spec, &grid, phi)
                .unwrap()
                .to_density_field(&spec, &grid);
            let (successive, rep) = successive_approximation(&spec, &grid, 1e-8, 1000).unwrap();
            assert!(rep.converged, "shape {shape:?} n {n} did not converge");
            worst = worst
                .max(closed.l1_distance(&fredholm))
                .max(closed.l1_distance(&successive))
                .max(fredholm.l1_distance(&successive));
        }
    }
    let elapsed = start.elapsed();
    report(
        "C2 three-way solver agreement",
        worst <= 1e-4 && elapsed.as_secs() <= 60,
        &format!("max pairwise L1 {worst:.2e}, {elapsed:.2?}"),
    );
}

/// Criterion 3 — even stubbornness and influence with odd prejudice force
/// the stationary interaction mean to vanish: max |phi*| <= 1e-8.
#[test]
fn c3_symmetric_phi_star_vanishes() {
    let mut worst = 0.0f64;
    let mut cases: Vec<ScenarioSpec> = vec![
        homogeneous(0.1, 0.01),
        homogeneous(0.5, 0.01),
        homogeneous(1.0, 0.01),
    ];
    for shape in [AlphaShape::OneMinusAbs, AlphaShape::Abs] {
        for n in [0, 8] {
            cases.push(inhomogeneous(shape, n));
        }
    }
    for spec in &cases {
        let grid = make_grid(spec, 201, 101).unwrap();
        let phi = fredholm_phi(spec, &grid, FredholmMethod::Nystrom).unwrap();
        worst = worst.max(phi.iter().map(|v| v.abs()).fold(0.0f64, f64::max));
    }
    report(
        "C3 symmetric phi* = 0",
        worst <= 1e-8,
        &format!("max |phi*| {worst:.2e} over {} presets", cases.len()),
    );
}

/// Criterion 4 — bounded confidence: two clusters at +-0.5 +- 0.05 for
/// alpha = 0.1, sigma^2 = 1e-3; unimodal for sigma^2 = 0.1; clusterization
/// gone at alpha = 0.3. Within 5 min.
#[test]
fn c4_bounded_confidence_clusterization() {
    let start = Instant::now();
    let solve = |alpha: f64, sigma2: f64| {
        let spec = bounded_rect(alpha, sigma2);
        let grid = make_grid(&spec, 201, 801).unwrap();
        let (rho, rep) = successive_approximation(&spec, &grid, 1e-8, 10_000).unwrap();
        assert!(rep.converged, "alpha {alpha} sigma2 {sigma2} not converged");
        marginal_modes(&grid.x_nodes, &rho.belief_marginal())
    };
    let clustered = solve(0.1, 1e-3);
    let noisy = solve(0.1, 0.1);
    let stubborn = solve(0.3, 1e-3);
    let elapsed = start.elapsed();
    let two_at_half = clustered.len() == 2
        && clustered.iter().all(|(x, _)| (x.abs() - 0.5).abs() <= 0.05);
    report(
        "C4 bounded-confidence clusterization",
        two_at_half && noisy.len() == 1 && stubborn.len() == 1 && elapsed.as_secs() <= 300,
        &format!(
            "low-noise modes {:?}; high-noise {}; alpha=0.3 {}; {elapsed:.2?}",
            clustered.iter().map(|(x, _)| (x * 1e3).round() / 1e3).collect::<Vec<_>>(),
            noisy.len(),
            stubborn.len()
        ),
    );
}

/// Tail-averaged belief histogram of one seeded run against the
/// mean-field marginal, on the run's own histogram bins.
fn long_run_l1(
    spec: &ScenarioSpec,
    seed: u64,
    agents: usize,
    t_final: f64,
    dt: f64,
    reference: &DensityField,
) -> f64 {
    let mut ens = mcsim::init_ensemble(spec, agents, seed, InitialCondition::Prejudice);
    let steps = (t_final / dt) as usize;
    let traj = mcsim::mc_run(&mut ens, t_final, dt, (steps / 200).max(1), 20, 60).unwrap();
    let mut avg: Option<mcsim::EmpiricalHistogram> = None;
    for (t, h) in &traj.histograms {
        if *t >= 0.75 * t_final {
            match &mut avg {
                None => avg = Some(h.clone()),
                Some(a) => a.accumulate(h, 1.0),
            }
        }
    }
    let mut avg = avg.unwrap();
    avg.renormalize();
    avg.l1_vs_marginal(&reference.grid.x_nodes, &reference.belief_marginal())
}

/// Criterion 5 — Monte Carlo validation of the bounded-confidence fixed
/// point: U = 1000, alpha = 0.3, sigma^2 = 1e-3, L1 <= 0.1 against the
/// mean-field solution by t = 200, median over 5 seeds, within 10 min.
///
/// Asserted as stated. The 0.1 threshold presumes that time averaging
/// beats the empirical fluctuations down to the sampling scale, but in
/// this regime the finite population's collective structure wanders and
/// freezes (cluster centers sit wherever the 1000-agent prejudice sample
/// balances), leaving a systematic L1 of ~ 0.2-0.3 per seed that no
/// binning or windowing choice removes. The effect is purely finite-size:
/// doubling the population roughly halves the gap (U = 2000 gives ~ 0.105)
/// and pooling the five seeds' histograms (an effective 5000-agent
/// ensemble, reported in the detail line) pushes it further down, while
/// the same protocol in the unbounded-confidence regime sits at the
/// sampling floor (~ 0.05). The simulator is validated by those controls;
/// the pinned (U, threshold) pair is not attainable.
#[test]
fn c5_mc_validation_of_bounded_confidence() {
    let start = Instant::now();
    let spec = bounded_rect(0.3, 1e-3);
    let grid = make_grid(&spec, 201, 801).unwrap();
    let (reference, rep) = successive_approximation(&spec, &grid, 1e-8, 10_000).unwrap();
    assert!(rep.converged);

    let seeds = [7u64, 8, 9, 10, 11];
    let mut per_seed = Vec::new();
    let mut pooled: Option<mcsim::EmpiricalHistogram> = None;
    for &seed in &seeds {
        let mut ens = mcsim::init_ensemble(&spec, 1000, seed, InitialCondition::Prejudice);
        let traj = mcsim::mc_run(&mut ens, 200.0, 0.05, 20, 20, 60).unwrap();
        let mut avg: Option<mcsim::EmpiricalHistogram> = None;
        for (t, h) in &traj.histograms {
            if *t >= 150.0 {
                match &mut avg {
                    None => avg = Some(h.clone()),
                    Some(a) => a.accumulate(h, 1.0),
                }
                match &mut pooled {
                    None => pooled = Some(h.clone()),
                    Some(a) => a.accumulate(h, 1.0),
                }
            }
        }
        let mut avg = avg.unwrap();
        avg.renormalize();
        per_seed.push(avg.l1_vs_marginal(&grid.x_nodes, &reference.belief_marginal()));
    }
    let mut sorted = per_seed.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    let mut pooled = pooled.unwrap();
    pooled.renormalize();
    let pooled_l1 = pooled.l1_vs_marginal(&grid.x_nodes, &reference.belief_marginal());
    let elapsed = start.elapsed();
    report(
        "C5 MC validation at U = 1000 (as stated)",
        median <= 0.1 && elapsed.as_secs() <= 600,
        &format!(
            "median L1 {median:.3} (per seed {:?}); pooled 5-seed ensemble {pooled_l1:.3}; {elapsed:.1?}",
            per_seed.iter().map(|v| (v * 1e3).round() / 1e3).collect::<Vec<_>>()
        ),
    );
}

/// Companion to criterion 5: the identical protocol in the regime where
/// the mean-field solution is exact (homogeneous, unbounded confidence)
/// sits at the finite-sample floor, validating the simulator end to end.
#[test]
fn c5_companion_mc_matches_exact_family() {
    let spec = homogeneous(0.5, 0.01);
    let grid = make_grid(&spec, 201, 801).unwrap();
    let reference = closed_form_product(&spec, &grid)
        .unwrap()
        .to_density_field(&spec, &grid);
    let l1 = long_run_l1(&spec, 7, 1000, 40.0, 0.01, &reference);
    report(
        "C5-companion MC vs exact stationary family",
        l1 <= 0.1,
        &format!("L1 {l1:.3}"),
    );
}

/// Criterion 6a — Green variance formula vs Monte Carlo ensemble variance
/// (no interaction) within 10% at t in {0.5, 1, 5}, U = 1e4.
#[test]
fn c6a_green_variance_vs_mc() {
    let mut spec = homogeneous(0.5, 0.01);
    spec.alpha = Profile::Constant { value: 0.5 };
    spec.prejudice = Profile::Constant { value: 0.0 };
    spec.zeta = Influence::Zero;
    spec.validate().unwrap();
    let mut ens = mcsim::init_ensemble(&spec, 10_000, 11, InitialCondition::Prejudice);
    let dt = 1e-3;
    let mut worst = 0.0f64;
    let mut t = 0.0;
    for target in [0.5, 1.0, 5.0] {
        while t < target - dt / 2.0 {
            mcsim::mc_step(&mut ens, dt).unwrap();
            t += dt;
        }
        let expect = 0.01 * (1.0 - (-2.0 * 0.5 * t).exp()) / (2.0 * 0.5);
        let rel = (ens.belief_variance() - expect).abs() / expect;
        worst = worst.max(rel);
    }
    report(
        "C6a MC matches the Green variance formula",
        worst <= 0.10,
        &format!("max relative error {worst:.3}"),
    );
}

/// Criterion 6b — with constant stubbornness the population mean belief is
/// conserved at the mean prejudice, |mean(t) - mean u| <= 1e-6.
#[test]
fn c6b_constant_alpha_mean_conservation() {
    let mut spec = homogeneous(0.3, 0.01);
    // asymmetric prejudice so the conserved value is nontrivial
    spec.prejudice = Profile::Table {
        nodes: vec![-1.0, 1.0],
        values: vec![-0.7, 1.3],
    };
    spec.validate().unwrap();
    let grid = make_grid(&spec, 201, 51).unwrap();
    let sol = solve_transient(&spec, &grid, 10.0, 1e-3, InitialCondition::Prejudice).unwrap();
    let mut worst = 0.0f64;
    for k in 0..sol.phi_path.nt() {
        worst = worst.max((sol.population_mean(&spec, k) - 0.3).abs());
    }
    report(
        "C6b constant-alpha mean conservation",
        worst <= 1e-6,
        &format!("max |mean - mean prejudice| {worst:.2e}"),
    );
}

/// Criterion 6c — the asymmetric constant-influence case is stated to have
/// an interaction field of exactly 1/2 for every t > 0 (prejudice start).
///
/// The exact field cannot jump: phi(0) = integral of rho0 u = 0, and the
/// renewal equation
///     phi(t) = (1 - e^{-t})/6 + (2/3) int_0^t e^{tau-t} phi(tau) dtau
/// solves in closed form to phi(t) = (1 - e^{-t/3})/2 — confirmed by the
/// solver to O(dt^2) and by the Laplace identity (criterion 7). The
/// constant-1/2 claim holds only as t -> infinity, so this check fails at
/// finite times; it is asserted as stated rather than weakened.
#[test]
fn c6c_instant_half_interaction_field_as_stated() {
    let spec = ramp_alpha_constant_influence();
    let grid = make_grid(&spec, 201, 51).unwrap();
    let sol = solve_transient(&spec, &grid, 10.0, 1e-3, InitialCondition::Prejudice).unwrap();
    let mut worst = 0.0f64;
    let mut worst_exact = 0.0f64;
    for (k, &t) in sol.phi_path.t_nodes.iter().enumerate() {
        if t <= 0.0 {
            continue;
        }
        let got = sol.phi_path.value(100, k);
        worst = worst.max((got - 0.5).abs());
        worst_exact = worst_exact.max((got - 0.5 * (1.0 - (-t / 3.0).exp())).abs());
    }
    report(
        "C6c phi = 1/2 for all t > 0 (as stated)",
        worst <= 1e-6,
        &format!(
            "max |phi - 1/2| = {worst:.3} at finite t; the solver instead matches \
             (1 - e^{{-t/3}})/2 to {worst_exact:.2e}"
        ),
    );
}

/// Criterion 7 — Laplace self-consistency: the numerically transformed
/// interaction field equals (I0 + I1)/(1 - I2) with relative residual
/// <= 1e-4 at s in {0.5, 1, 2} for two product-form presets.
#[test]
fn c7_laplace_self_consistency() {
    let mut worst = 0.0f64;
    for spec in [
        inhomogeneous(AlphaShape::Abs, 8),
        ramp_alpha_constant_influence(),
    ] {
        let grid = make_grid(&spec, 101, 31).unwrap();
        let sol = solve_transient(&spec, &grid, 60.0, 2e-3, InitialCondition::Prejudice).unwrap();
        let res = laplace_consistency_check(&spec, &sol.phi_path, &[0.5, 1.0, 2.0]).unwrap();
        worst = worst.max(res.iter().copied().fold(0.0f64, f64::max));
    }
    report(
        "C7 Laplace self-consistency",
        worst <= 1e-4,
        &format!("max relative residual {worst:.2e}"),
    );
}

/// Criterion 8 — the transient density at t = 10/w matches the stationary
/// solution in L1 <= 1e-2 for the two constant-influence scenarios
/// (`alpha = |p|` and `alpha = (p+1)^2/4`, both with w = 1).
///
/// The symmetric case passes: its interaction field is identically zero
/// and relaxation is pure e^{-t}. The asymmetric case cannot pass as
/// stated: its interaction field relaxes with time constant 3 (see 6c),
/// so at t = 10 the slice means still sit ~ 0.012 away from their limits,
/// an L1 gap of ~ 0.13. Asserted as stated.
#[test]
fn c8_relaxation_to_stationarity_at_t10() {
    let mut details = Vec::new();
    let mut pass = true;
    for (label, spec) in [
        (
            "alpha=|p|",
            {
                let mut s = homogeneous(0.5, 0.01);
                s.alpha = Profile::Floor {
                    min: beliefdyn::model::ALPHA_FLOOR,
                    inner: Box::new(Profile::Abs),
                };
                s.validate().unwrap();
                s
            },
        ),
        ("alpha=(p+1)^2/4", ramp_alpha_constant_influence()),
    ] {
        let grid = make_grid(&spec, 201, 801).unwrap();
        // w = 1 for both scenarios: t = 10 / w = 10.
        let sol = solve_transient(&spec, &grid, 10.0, 2e-3, InitialCondition::Prejudice).unwrap();
        let transient = density_at(&spec, &sol, 10.0, &grid).unwrap();
        let stationary = closed_form_product(&spec, &grid)
            .unwrap()
            .to_density_field(&spec, &grid);
        let l1 = transient.l1_distance(&stationary);
        details.push(format!("{label}: L1 {l1:.2e}"));
        pass &= l1 <= 1e-2;
    }
    report(
        "C8 relaxation to stationarity at t = 10/w (as stated)",
        pass,
        &details.join("; "),
    );
}

/// Criterion 9a — the stationary operator preserves the personality
/// marginal to 1e-10 per node.
#[test]
fn c9a_operator_marginal_preservation() {
    let spec = bounded_rect(0.1, 1e-3);
    let grid = make_grid(&spec, 101, 401).unwrap();
    let start = apply_operator_a(&spec, &DensityField::zeros(grid.clone())).unwrap();
    let out = apply_operator_a(&spec, &start).unwrap();
    let mut worst = 0.0f64;
    for (i, &p) in grid.p_nodes.iter().enumerate() {
        worst = worst.max((out.integrate_x(i) - spec.rho0(p)).abs());
    }
    report(
        "C9a operator preserves the personality marginal",
        worst <= 1e-10,
        &format!("max marginal error {worst:.2e}"),
    );
}

/// Criterion 9b — converged fixed points satisfy ||A{rho*} - rho*||_1
/// <= 2 tol.
#[test]
fn c9b_fixed_point_residual() {
    let tol = 1e-8;
    let mut worst = 0.0f64;
    for spec in [bounded_rect(0.1, 1e-3), inhomogeneous(AlphaShape::Abs, 8)] {
        let grid = make_grid(&spec, 101, 401).unwrap();
        let (rho, rep) = successive_approximation(&spec, &grid, tol, 1000).unwrap();
        assert!(rep.converged);
        worst = worst.max(apply_operator_a(&spec, &rho).unwrap().l1_distance(&rho));
    }
    report(
        "C9b fixed point residual <= 2 tol",
        worst <= 2.0 * tol,
        &format!("max residual {worst:.2e}"),
    );
}

/// Criterion 9c — the O(U) product-form interaction path agrees with the
/// O(U^2) sum to 1e-12 per agent per step on U <= 200.
#[test]
fn c9c_fast_path_equivalence() {
    let spec = inhomogeneous(AlphaShape::OneMinusAbs, 8);
    let mut ens = mcsim::init_ensemble(&spec, 200, 3, InitialCondition::Prejudice);
    let mut worst = 0.0f64;
    let (z1, z2) = match &spec.zeta {
        Influence::Product { zeta1, zeta2 } => (zeta1.clone(), zeta2.clone()),
        _ => unreachable!(),
    };
    for _ in 0..20 {
        let fast = mcsim::interaction_sums(&ens);
        for i in 0..ens.len() {
            let mut direct = 0.0;
            for j in 0..ens.len() {
                if j != i {
                    direct += z1.eval(ens.personalities[i])
                        * z2.eval(ens.personalities[j])
                        * (ens.beliefs[j] - ens.beliefs[i]);
                }
            }
            worst = worst.max((fast[i] - direct).abs());
        }
        mcsim::mc_step(&mut ens, 0.01).unwrap();
    }
    report(
        "C9c fast path vs O(U^2) equivalence",
        worst <= 1e-12,
        &format!("max per-agent per-step deviation {worst:.2e}"),
    );
}

/// Criterion 9d — identical (seed, spec, dt, t_final) give byte-identical
/// trajectory files regardless of thread count.
#[test]
fn c9d_determinism_byte_for_byte() {
    let spec = bounded_rect(0.3, 1e-3);
    let run_with_threads = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let mut ens = mcsim::init_ensemble(&spec, 256, 42, InitialCondition::Prejudice);
            let traj = mcsim::mc_run(&mut ens, 2.0, 0.01, 20, 8, 24).unwrap();
            (csvio::trajectory_to_csv(&traj), csvio::histograms_to_csv(&traj))
        })
    };
    let a = run_with_threads(1);
    let b = run_with_threads(4);
    let c = run_with_threads(4);
    report(
        "C9d byte-for-byte determinism across thread counts",
        a == b && b == c,
        "trajectory and histogram CSVs identical",
    );
}

/// Criterion 9e — ergodicity smoke test: starting from the prejudice
/// configuration or from the post-event Gaussian, the same scenario with
/// `inf alpha > 0` reaches long-run histograms within L1 <= 0.15 of each
/// other.
#[test]
fn c9e_ergodicity_smoke_test() {
    // The population mean relaxes at rate alpha, so the horizon must cover
    // several multiples of 1/alpha for the post-event start to forget its
    // offset.
    let spec = homogeneous(0.3, 0.01);
    let long_run = |init: InitialCondition, seed: u64| {
        let mut ens = mcsim::init_ensemble(&spec, 2000, seed, init);
        let traj = mcsim::mc_run(&mut ens, 40.0, 0.01, 40, 12, 40).unwrap();
        let mut avg: Option<mcsim::EmpiricalHistogram> = None;
        for (t, h) in &traj.histograms {
            if *t >= 30.0 {
                match &mut avg {
                    None => avg = Some(h.clone()),
                    Some(a) => a.accumulate(h, 1.0),
                }
            }
        }
        let mut avg = avg.unwrap();
        avg.renormalize();
        avg
    };
    let a = long_run(InitialCondition::Prejudice, 5);
    let b = long_run(
        InitialCondition::Gaussian {
            mean: 1.0,
            var: 1e-4,
        },
        1005,
    );
    let l1: f64 = a
        .x_masses()
        .iter()
        .zip(b.x_masses())
        .map(|(x, y)| (x - y).abs())
        .sum();
    report(
        "C9e ergodicity across initial conditions",
        l1 <= 0.15,
        &format!("belief-histogram L1 {l1:.3}"),
    );
}

/// The transient density must also relax to the stationary solution in L1
/// <= 1e-3 when given enough time (20 / inf w); companion to criterion 8
/// showing the gap there is purely the stated horizon.
#[test]
fn transient_reaches_stationarity_eventually() {
    let spec = ramp_alpha_constant_influence();
    let grid = make_grid(&spec, 201, 801).unwrap();
    let sol = solve_transient(&spec, &grid, 40.0, 2e-3, InitialCondition::Prejudice).unwrap();
    let late = density_at(&spec, &sol, 40.0, &grid).unwrap();
    let stationary = closed_form_product(&spec, &grid)
        .unwrap()
        .to_density_field(&spec, &grid);
    let l1 = late.l1_distance(&stationary);
    report(
        "C8-companion relaxation at t = 40",
        l1 <= 1e-3,
        &format!("L1 {l1:.2e}"),
    );
}

/// PhiPath contract: phi(p, t_final) matches the stationary phi* from the
/// Fredholm solver to 1e-4 when the horizon is long enough.
#[test]
fn phi_path_limit_matches_stationary_phi() {
    let spec = ramp_alpha_constant_influence();
    let grid = make_grid(&spec, 101, 31).unwrap();
    let sol = solve_transient(&spec, &grid, 35.0, 2e-3, InitialCondition::Prejudice).unwrap();
    let phi_star = fredholm_phi(&spec, &grid, FredholmMethod::Nystrom).unwrap();
    let last = sol.phi_path.at_time(sol.phi_path.nt() - 1);
    let worst = last
        .iter()
        .zip(&phi_star)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    report(
        "phi(t_final) -> phi*",
        worst <= 1e-4,
        &format!("max deviation {worst:.2e}"),
    );
}
