//! The `validate` subcommand: a reduced-scale cross-check battery over all
//! modules, printing one PASS/FAIL line per check.

use beliefdyn::config::scenario_from_toml;
use beliefdyn::model::{
    build_preset, AlphaShape, InitialCondition, Influence, PresetParams, Profile,
};
use beliefdyn::numerics::{
    dot, erf_eval, linspace, make_grid, solve_dense, trapezoid_weights, Matrix,
};
use beliefdyn::stationary::{
    closed_form_product, fredholm_phi, gaussian_family_from_phi, homogeneous_closed_form,
    marginal_modes, successive_approximation, FredholmMethod,
};
use beliefdyn::transient::{laplace_consistency_check, solve_transient};
use beliefdyn::{csvio, mcsim, Error};

type Check = (&'static str, fn() -> Result<String, String>);

pub fn run(only: &Option<String>) -> Result<u8, Error> {
    let checks: Vec<Check> = vec![
        ("model/presets-validate", presets_validate),
        ("model/rho0-unit-mass", rho0_unit_mass),
        ("model/sigma0-rejected", sigma0_rejected),
        ("numerics/erf-oracle", erf_oracle),
        ("numerics/trapezoid-quadratic", trapezoid_quadratic),
        ("numerics/lu-recovery", lu_recovery),
        ("numerics/csv-roundtrip", csv_roundtrip),
        ("stationary/homogeneous-closed-form", homogeneous_marginal),
        ("stationary/three-way-agreement", three_way_agreement),
        ("stationary/symmetric-phi-zero", symmetric_phi_zero),
        ("stationary/bounded-clusterization", bounded_clusterization),
        ("transient/renewal-closed-form", renewal_closed_form),
        ("transient/mean-conservation", mean_conservation),
        ("transient/laplace-consistency", laplace_consistency),
        ("mc/determinism", mc_determinism),
        ("mc/fast-path-equivalence", mc_fast_path),
        ("mc/green-variance", mc_green_variance),
    ];

    let mut failures = 0usize;
    let mut ran = 0usize;
    for (name, check) in checks {
        if let Some(filter) = only {
            if !name.contains(filter.as_str()) {
                continue;
            }
        }
        ran += 1;
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("{} checks run, {} failed", ran, failures);
    Ok(if failures > 0 { 1 } else { 0 })
}

fn presets_validate() -> Result<String, String> {
    let cases = [
        ("homogeneous", PresetParams::default()),
        (
            "inhomogeneous",
            PresetParams {
                shape: Some(AlphaShape::Abs),
                n: Some(8),
                ..Default::default()
            },
        ),
        (
            "proximity",
            PresetParams {
                n: Some(4),
                ..Default::default()
            },
        ),
        (
            "community",
            PresetParams {
                kappa: Some(0.3),
                ..Default::default()
            },
        ),
        ("bounded-rect", PresetParams::default()),
        ("event-driven", PresetParams::default()),
    ];
    for (name, params) in cases {
        build_preset(name, &params).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok("6 presets validated".into())
}

fn rho0_unit_mass() -> Result<String, String> {
    let spec = build_preset("homogeneous", &PresetParams::default()).map_err(|e| e.to_string())?;
    let nodes = linspace(-1.0, 1.0, 401);
    let w = trapezoid_weights(&nodes);
    let rho: Vec<f64> = nodes.iter().map(|&p| spec.rho0(p)).collect();
    let mass = dot(&w, &rho);
    if (mass - 1.0).abs() <= 1e-6 {
        Ok(format!("mass = {mass:.9}"))
    } else {
        Err(format!("mass = {mass}"))
    }
}

fn sigma0_rejected() -> Result<String, String> {
    // An invalid configuration must be refused upstream: expected failure.
    match scenario_from_toml("[preset]\nname = \"homogeneous\"\nsigma2 = 0.0\n") {
        Err(_) => Ok("sigma2 = 0 rejected as expected".into()),
        Ok(_) => Err("sigma2 = 0 was accepted".into()),
    }
}

fn erf_oracle() -> Result<String, String> {
    let err = (erf_eval(1.0) - 0.842_700_792_949_714_9).abs();
    if err < 1e-12 && erf_eval(0.0) == 0.0 && (erf_eval(10.0) - 1.0).abs() < 1e-12 {
        Ok(format!("erf(1) error {err:.1e}"))
    } else {
        Err(format!("erf(1) error {err:e}"))
    }
}

fn trapezoid_quadratic() -> Result<String, String> {
    let nodes = linspace(-1.0, 1.0, 1001);
    let w = trapezoid_weights(&nodes);
    let vals: Vec<f64> = nodes.iter().map(|&x| 0.7 * x * x - 0.3 * x + 2.0).collect();
    let exact = 2.0 * 0.7 / 3.0 + 4.0;
    let rel = (dot(&w, &vals) - exact).abs() / exact;
    if rel <= 1e-6 {
        Ok(format!("relative error {rel:.2e}"))
    } else {
        Err(format!("relative error {rel:e}"))
    }
}

fn lu_recovery() -> Result<String, String> {
    let n = 20;
    let mut a = Matrix::zeros(n);
    let mut state = 0x243f6a8885a308d3u64;
    let mut next = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = next();
        }
        a[(i, i)] += n as f64;
    }
    let x_true: Vec<f64> = (0..n).map(|i| (i as f64 - 9.0) / 4.0).collect();
    let b = a.matvec(&x_true);
    let x = solve_dense(&a, &b).map_err(|e| e.to_string())?;
    let err = x
        .iter()
        .zip(&x_true)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0f64, f64::max);
    if err <= 1e-9 {
        Ok(format!("recovery error {err:.2e}"))
    } else {
        Err(format!("recovery error {err:e}"))
    }
}

fn csv_roundtrip() -> Result<String, String> {
    let spec = build_preset("homogeneous", &PresetParams::default()).map_err(|e| e.to_string())?;
    let grid = make_grid(&spec, 7, 9).map_err(|e| e.to_string())?;
    let fam = closed_form_product(&spec, &grid).map_err(|e| e.to_string())?;
    let field = fam.to_density_field(&spec, &grid);
    let text = csvio::density_to_csv(&field);
    let back = csvio::density_from_csv(&text).map_err(|e| e.to_string())?;
    if back.values() == field.values() {
        Ok("bit-exact round trip".into())
    } else {
        Err("values changed across the round trip".into())
    }
}

fn homogeneous_marginal() -> Result<String, String> {
    let spec = build_preset(
        "homogeneous",
        &PresetParams {
            alpha: Some(0.5),
            sigma2: Some(0.01),
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let grid = make_grid(&spec, 101, 401).map_err(|e| e.to_string())?;
    let fam = closed_form_product(&spec, &grid).map_err(|e| e.to_string())?;
    let marg = fam.belief_marginal(&spec, &grid.x_nodes);
    let mut worst = 0.0f64;
    for (k, &x) in grid.x_nodes.iter().enumerate() {
        worst = worst.max((marg[k] - homogeneous_closed_form(0.5, 0.01, x)).abs());
    }
    if worst <= 1e-6 {
        Ok(format!("max abs error {worst:.2e}"))
    } else {
        Err(format!("max abs error {worst:e}"))
    }
}

fn three_way_agreement() -> Result<String, String> {
    let spec = build_preset(
        "inhomogeneous",
        &PresetParams {
            shape: Some(AlphaShape::Abs),
            n: Some(8),
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let grid = make_grid(&spec, 101, 201).map_err(|e| e.to_string())?;
    let fam = closed_form_product(&spec, &grid).map_err(|e| e.to_string())?;
    let a = fam.to_density_field(&spec, &grid);
    let phi = fredholm_phi(&spec, &grid, FredholmMethod::Nystrom).map_err(|e| e.to_string())?;
    let b = gaussian_family_from_phi(&spec, &grid, phi)
        .map_err(|e| e.to_string())?
        .to_density_field(&spec, &grid);
    let (c, rep) =
        successive_approximation(&spec, &grid, 1e-8, 500).map_err(|e| e.to_string())?;
    if !rep.converged {
        return Err("successive approximation did not converge".into());
    }
    let d_ab = a.l1_distance(&b);
    let d_ac = a.l1_distance(&c);
    let d_bc = b.l1_distance(&c);
    let worst = d_ab.max(d_ac).max(d_bc);
    if worst <= 1e-4 {
        Ok(format!("pairwise L1 <= {worst:.2e}"))
    } else {
        Err(format!("pairwise L1 = {worst:e}"))
    }
}

fn symmetric_phi_zero() -> Result<String, String> {
    let mut worst = 0.0f64;
    for (shape, n) in [
        (AlphaShape::OneMinusAbs, 0),
        (AlphaShape::Abs, 0),
        (AlphaShape::OneMinusAbs, 8),
        (AlphaShape::Abs, 8),
    ] {
        let spec = build_preset(
            "inhomogeneous",
            &PresetParams {
                shape: Some(shape),
                n: Some(n),
                ..Default::default()
            },
        )
        .map_err(|e| e.to_string())?;
        let grid = make_grid(&spec, 101, 101).map_err(|e| e.to_string())?;
        let phi = fredholm_phi(&spec, &grid, FredholmMethod::Nystrom).map_err(|e| e.to_string())?;
        worst = worst.max(phi.iter().map(|v| v.abs()).fold(0.0f64, f64::max));
    }
    if worst <= 1e-8 {
        Ok(format!("max |phi*| = {worst:.2e}"))
    } else {
        Err(format!("max |phi*| = {worst:e}"))
    }
}

fn bounded_clusterization() -> Result<String, String> {
    let solve = |alpha: f64, sigma2: f64| -> Result<Vec<(f64, f64)>, String> {
        let spec = build_preset(
            "bounded-rect",
            &PresetParams {
                alpha: Some(alpha),
                sigma2: Some(sigma2),
                ..Default::default()
            },
        )
        .map_err(|e| e.to_string())?;
        let grid = make_grid(&spec, 101, 401).map_err(|e| e.to_string())?;
        let (rho, rep) =
            successive_approximation(&spec, &grid, 1e-8, 2000).map_err(|e| e.to_string())?;
        if !rep.converged {
            return Err(format!("not converged for alpha={alpha} sigma2={sigma2}"));
        }
        Ok(marginal_modes(&grid.x_nodes, &rho.belief_marginal()))
    };
    let low_noise = solve(0.1, 1e-3)?;
    if low_noise.len() != 2 {
        return Err(format!("alpha=0.1 sigma2=1e-3: {} modes", low_noise.len()));
    }
    for (x, _) in &low_noise {
        if (x.abs() - 0.5).abs() > 0.05 {
            return Err(format!("cluster at {x}, expected +-0.5 +- 0.05"));
        }
    }
    let high_noise = solve(0.1, 0.1)?;
    if high_noise.len() != 1 {
        return Err(format!("alpha=0.1 sigma2=0.1: {} modes", high_noise.len()));
    }
    let stubborn = solve(0.3, 1e-3)?;
    if stubborn.len() != 1 {
        return Err(format!("alpha=0.3 sigma2=1e-3: {} modes", stubborn.len()));
    }
    Ok(format!(
        "clusters at {:+.3}/{:+.3}; vanish with noise and stubbornness",
        low_noise[0].0, low_noise[1].0
    ))
}

fn renewal_closed_form() -> Result<String, String> {
    let mut spec = build_preset("homogeneous", &PresetParams::default()).map_err(|e| e.to_string())?;
    spec.alpha = Profile::Floor {
        min: beliefdyn::model::ALPHA_FLOOR,
        inner: Box::new(Profile::RampSquared),
    };
    spec.validate().map_err(|e| e.to_string())?;
    let grid = make_grid(&spec, 101, 31).map_err(|e| e.to_string())?;
    let sol = solve_transient(&spec, &grid, 6.0, 5e-3, InitialCondition::Prejudice)
        .map_err(|e| e.to_string())?;
    let mut a1 = 0.0;
    let mut a2 = 0.0;
    for (j, &pq) in grid.p_nodes.iter().enumerate() {
        let al = spec.alpha(pq);
        a1 += grid.p_weights[j] * spec.rho0(pq) * al * spec.u(pq);
        a2 += grid.p_weights[j] * spec.rho0(pq) * (1.0 - al);
    }
    let rate = 1.0 - a2;
    let mut worst = 0.0f64;
    for (k, &t) in sol.phi_path.t_nodes.iter().enumerate() {
        let expect = a1 / rate * (1.0 - (-rate * t).exp());
        worst = worst.max((sol.phi_path.value(50, k) - expect).abs());
    }
    if worst <= 5e-5 {
        Ok(format!("max deviation {worst:.2e}"))
    } else {
        Err(format!("max deviation {worst:e}"))
    }
}

fn mean_conservation() -> Result<String, String> {
    let mut spec = build_preset("homogeneous", &PresetParams::default()).map_err(|e| e.to_string())?;
    spec.alpha = Profile::Constant { value: 0.3 };
    spec.prejudice = Profile::Table {
        nodes: vec![-1.0, 1.0],
        values: vec![-0.7, 1.3],
    };
    spec.validate().map_err(|e| e.to_string())?;
    let grid = make_grid(&spec, 101, 31).map_err(|e| e.to_string())?;
    let sol = solve_transient(&spec, &grid, 5.0, 1e-3, InitialCondition::Prejudice)
        .map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for k in 0..sol.phi_path.nt() {
        worst = worst.max((sol.population_mean(&spec, k) - 0.3).abs());
    }
    if worst <= 1e-6 {
        Ok(format!("max |mean - mean prejudice| = {worst:.2e}"))
    } else {
        Err(format!("max drift {worst:e}"))
    }
}

fn laplace_consistency() -> Result<String, String> {
    let spec = build_preset(
        "proximity",
        &PresetParams {
            n: Some(0),
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let grid = make_grid(&spec, 101, 31).map_err(|e| e.to_string())?;
    let sol = solve_transient(&spec, &grid, 50.0, 2e-3, InitialCondition::Prejudice)
        .map_err(|e| e.to_string())?;
    let res = laplace_consistency_check(&spec, &sol.phi_path, &[0.5, 1.0, 2.0])
        .map_err(|e| e.to_string())?;
    let worst = res.iter().copied().fold(0.0f64, f64::max);
    if worst <= 1e-4 {
        Ok(format!("max relative residual {worst:.2e}"))
    } else {
        Err(format!("max relative residual {worst:e}"))
    }
}

fn mc_determinism() -> Result<String, String> {
    let spec = build_preset("bounded-rect", &PresetParams::default()).map_err(|e| e.to_string())?;
    let run = || -> Result<String, String> {
        let mut ens = mcsim::init_ensemble(&spec, 128, 99, InitialCondition::Prejudice);
        let traj = mcsim::mc_run(&mut ens, 0.5, 0.01, 10, 4, 16).map_err(|e| e.to_string())?;
        Ok(csvio::trajectory_to_csv(&traj))
    };
    if run()? == run()? {
        Ok("repeat run byte-identical".into())
    } else {
        Err("trajectories differ across identical runs".into())
    }
}

fn mc_fast_path() -> Result<String, String> {
    let spec = build_preset(
        "inhomogeneous",
        &PresetParams {
            shape: Some(AlphaShape::OneMinusAbs),
            n: Some(8),
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let ens = mcsim::init_ensemble(&spec, 150, 5, InitialCondition::Prejudice);
    let fast = mcsim::interaction_sums(&ens);
    let (z1, z2) = ens.spec.product_form().expect("product form preset");
    let mut worst = 0.0f64;
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
    if worst <= 1e-12 {
        Ok(format!("max per-agent deviation {worst:.2e}"))
    } else {
        Err(format!("max per-agent deviation {worst:e}"))
    }
}

fn mc_green_variance() -> Result<String, String> {
    // No interaction, common prejudice 0: the ensemble variance follows
    // sigma^2 (1 - e^{-2 alpha t}) / (2 alpha).
    let mut spec = build_preset("homogeneous", &PresetParams::default()).map_err(|e| e.to_string())?;
    spec.alpha = Profile::Constant { value: 0.3 };
    spec.prejudice = Profile::Constant { value: 0.0 };
    spec.zeta = Influence::Zero;
    spec.validate().map_err(|e| e.to_string())?;
    let mut ens = mcsim::init_ensemble(&spec, 2000, 21, InitialCondition::Prejudice);
    let dt = 1e-3;
    let t = 1.0;
    for _ in 0..(t / dt) as usize {
        mcsim::mc_step(&mut ens, dt).map_err(|e| e.to_string())?;
    }
    let expect = 0.01 * (1.0 - (-2.0 * 0.3 * t).exp()) / (2.0 * 0.3);
    let got = ens.belief_variance();
    let rel = (got - expect).abs() / expect;
    if rel <= 0.10 {
        Ok(format!("relative error {rel:.3}"))
    } else {
        Err(format!("relative error {rel}"))
    }
}
