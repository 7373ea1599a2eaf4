//! The stationary / transient / mc subcommands.

use std::fmt::Write as _;

use beliefdyn::config::RunSettings;
use beliefdyn::model::{w_nodes, InitialCondition};
use beliefdyn::numerics::{make_grid, DensityField};
use beliefdyn::stationary::{
    apply_operator_a, closed_form_product, contraction_bound_check, fredholm_phi,
    gaussian_family_from_phi, marginal_modes, successive_approximation, FredholmMethod,
};
use beliefdyn::transient::{density_at, laplace_consistency_check, solve_transient};
use beliefdyn::{csvio, mcsim, Error};

use crate::{write_file, write_manifest, McArgs, StationaryArgs, TransientArgs};

const DEFAULT_NP: usize = 201;
const DEFAULT_NX: usize = 401;

pub fn stationary(args: StationaryArgs) -> Result<u8, Error> {
    let resolved = crate::resolve(
        &args.common,
        RunSettings {
            tol: args.tol,
            max_iter: args.max_iter,
            ..Default::default()
        },
    )?;
    let spec = &resolved.spec;
    let np = resolved.run.np.unwrap_or(DEFAULT_NP);
    let nx = resolved.run.nx.unwrap_or(DEFAULT_NX);
    let tol = resolved.run.tol.unwrap_or(1e-8);
    let max_iter = resolved.run.max_iter.unwrap_or(10_000);
    let grid = make_grid(spec, np, nx)?;
    write_manifest(&resolved, "stationary")?;

    let diag = contraction_bound_check(spec);
    println!(
        "contraction: lhs = {:.6e}, global bound sigma^2/8 = {:.6e} ({}), local bound sigma^2/2 = {:.6e} ({}), domain = {}",
        diag.lhs,
        diag.global_bound,
        if diag.global { "satisfied" } else { "violated" },
        diag.local_bound,
        if diag.local { "satisfied" } else { "violated" },
        if diag.compact_domain { "compact" } else { "truncated line" },
    );
    if !diag.guaranteed() {
        println!("convergence unguaranteed up front; certified a posteriori by the residual");
    }

    let mut report = String::new();
    let _ = writeln!(report, "grid_np={np}");
    let _ = writeln!(report, "grid_nx={nx}");
    let _ = writeln!(report, "contraction_lhs={:.17e}", diag.lhs);
    let _ = writeln!(report, "contraction_global_bound={:.17e}", diag.global_bound);
    let _ = writeln!(report, "contraction_local_bound={:.17e}", diag.local_bound);
    let _ = writeln!(report, "contraction_global={}", diag.global);
    let _ = writeln!(report, "contraction_local={}", diag.local);
    let _ = writeln!(report, "contraction_domain_compact={}", diag.compact_domain);
    let _ = writeln!(report, "convergence_guaranteed={}", diag.guaranteed());

    let mut exit = 0u8;
    let (field, marginal) = if spec.product_form().is_some() {
        let fam = closed_form_product(spec, &grid)?;
        let field = fam.to_density_field(spec, &grid);
        let marginal = fam.belief_marginal(spec, &grid.x_nodes);
        let _ = writeln!(report, "method=closed-form-product");
        let _ = writeln!(report, "phi_star={:.17e}", fam.phi_star[0]);
        (field, marginal)
    } else if spec.belief_independent() {
        let phi = fredholm_phi(spec, &grid, FredholmMethod::Nystrom)?;
        let fam = gaussian_family_from_phi(spec, &grid, phi)?;
        let field = fam.to_density_field(spec, &grid);
        let marginal = fam.belief_marginal(spec, &grid.x_nodes);
        let _ = writeln!(report, "method=fredholm-nystrom");
        let lo = fam.phi_star.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = fam
            .phi_star
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let _ = writeln!(report, "phi_star_min={lo:.17e}");
        let _ = writeln!(report, "phi_star_max={hi:.17e}");
        (field, marginal)
    } else {
        let (field, fp) = successive_approximation(spec, &grid, tol, max_iter)?;
        let _ = writeln!(report, "method=successive-approximation");
        let _ = writeln!(report, "iterations={}", fp.iterations);
        let _ = writeln!(report, "converged={}", fp.converged);
        let _ = writeln!(report, "final_residual={:.17e}", fp.final_residual);
        if !fp.converged {
            eprintln!(
                "fixed point not converged after {} iterations (last delta {:.3e})",
                fp.iterations,
                fp.l1_deltas.last().copied().unwrap_or(f64::NAN)
            );
            exit = 3;
        }
        let marginal = field.belief_marginal();
        (field, marginal)
    };

    // One operator application as an a-posteriori residual for every method.
    let residual = apply_operator_a(spec, &field)?.l1_distance(&field);
    let _ = writeln!(report, "operator_residual_l1={residual:.17e}");
    let modes = marginal_modes(&grid.x_nodes, &marginal);
    let _ = writeln!(report, "marginal_modes={}", modes.len());
    for (k, (x, h)) in modes.iter().enumerate() {
        let _ = writeln!(report, "mode_{k}_x={x:.17e}");
        let _ = writeln!(report, "mode_{k}_height={h:.17e}");
    }

    write_file(&resolved.out_dir, "density.csv", &csvio::density_to_csv(&field))?;
    write_file(
        &resolved.out_dir,
        "marginal.csv",
        &csvio::marginal_to_csv(&grid.x_nodes, &marginal),
    )?;
    write_file(&resolved.out_dir, "report.txt", &report)?;
    println!(
        "stationary solution written to {} ({} modes)",
        resolved.out_dir.display(),
        modes.len()
    );
    Ok(exit)
}

pub fn transient(args: TransientArgs) -> Result<u8, Error> {
    let resolved = crate::resolve(
        &args.common,
        RunSettings {
            t_final: args.t_final,
            dt: args.dt,
            snapshot_times: args.snapshot_times.clone(),
            laplace_check: args.laplace_check.clone(),
            init: args.init,
            ..Default::default()
        },
    )?;
    let spec = &resolved.spec;
    if !spec.belief_independent() {
        // bounded confidence has no transient solver
        return Err(Error::BeliefDependentZeta);
    }
    let np = resolved.run.np.unwrap_or(DEFAULT_NP);
    let nx = resolved.run.nx.unwrap_or(DEFAULT_NX);
    let grid = make_grid(spec, np, nx)?;
    let w = w_nodes(spec, &grid)?;
    let w_max = w.iter().copied().fold(0.0f64, f64::max);
    let w_min = w.iter().copied().fold(f64::INFINITY, f64::min);
    let dt = resolved.run.dt.unwrap_or(0.01 / w_max);
    let t_final = resolved.run.t_final.unwrap_or(20.0 / w_min);
    let init = resolved.run.init.unwrap_or(InitialCondition::Prejudice);
    if let Some(s_samples) = &resolved.run.laplace_check {
        // Fail before solving if the horizon cannot support the transform.
        for &s in s_samples {
            if (-s * t_final).exp() >= 1e-10 {
                return Err(Error::PathTooShort(format!(
                    "laplace check at s = {s} needs t_final >= {:.1}, got {t_final}",
                    10.0 * std::f64::consts::LN_10 / s
                )));
            }
        }
    }
    write_manifest(&resolved, "transient")?;

    let sol = solve_transient(spec, &grid, t_final, dt, init)?;
    let path = &sol.phi_path;

    write_file(
        &resolved.out_dir,
        "phi.csv",
        &csvio::phi_path_to_csv(path, 201),
    )?;

    // Thinned belief-marginal time series.
    let stride = (path.nt() / 100).max(1);
    let mut samples = Vec::new();
    for k in (0..path.nt()).step_by(stride) {
        let t = path.t_nodes[k];
        let f = density_at(spec, &sol, t, &grid)?;
        samples.push((t, f.belief_marginal()));
    }
    write_file(
        &resolved.out_dir,
        "marginal_series.csv",
        &csvio::marginal_series_to_csv(&samples, &grid.x_nodes),
    )?;

    let mut report = String::new();
    let _ = writeln!(report, "grid_np={np}");
    let _ = writeln!(report, "grid_nx={nx}");
    let _ = writeln!(report, "dt={dt:.17e}");
    let _ = writeln!(report, "t_final={t_final:.17e}");
    let _ = writeln!(report, "steps={}", path.nt() - 1);

    if let Some(times) = &resolved.run.snapshot_times {
        for (i, &t) in times.iter().enumerate() {
            let f = density_at(spec, &sol, t, &grid)?;
            let name = format!("snapshot_{i}_t{t}.csv");
            write_file(&resolved.out_dir, &name, &csvio::density_to_csv(&f))?;
            let _ = writeln!(report, "snapshot_{i}_time={t:.17e}");
        }
    }

    if let Some(s_samples) = &resolved.run.laplace_check {
        let residuals = laplace_consistency_check(spec, path, s_samples)?;
        let mut text = String::from("s,relative_residual\n");
        for (s, r) in s_samples.iter().zip(&residuals) {
            let _ = writeln!(text, "{s},{r:.17e}");
            println!("laplace residual at s = {s}: {r:.3e}");
            let _ = writeln!(report, "laplace_residual_s{s}={r:.17e}");
        }
        write_file(&resolved.out_dir, "laplace.txt", &text)?;
    }

    write_file(&resolved.out_dir, "report.txt", &report)?;
    println!(
        "transient solution written to {} ({} time nodes)",
        resolved.out_dir.display(),
        path.nt()
    );
    Ok(0)
}

pub fn mc(args: McArgs) -> Result<u8, Error> {
    let resolved = crate::resolve(
        &args.common,
        RunSettings {
            agents: args.agents,
            t_final: args.t_final,
            dt: args.dt,
            record_every: args.record_every,
            p_bins: args.bins.map(|b| b.0),
            x_bins: args.bins.map(|b| b.1),
            init: args.init,
            ..Default::default()
        },
    )?;
    let spec = &resolved.spec;
    let agents = resolved.run.agents.unwrap_or(1000);
    let dt = resolved
        .run
        .dt
        .unwrap_or(1e-3 / spec.s_zeta().max(1.0));
    let t_final = resolved.run.t_final.unwrap_or(200.0);
    let steps = (t_final / dt).round().max(1.0) as usize;
    let record_every = resolved.run.record_every.unwrap_or((steps / 200).max(1));
    let p_bins = resolved.run.p_bins.unwrap_or(20);
    let x_bins = resolved.run.x_bins.unwrap_or(60);
    let seed = resolved.run.seed.unwrap_or(0);
    let init = resolved.run.init.unwrap_or(InitialCondition::Prejudice);
    write_manifest(&resolved, "mc")?;

    let mut ens = mcsim::init_ensemble(spec, agents, seed, init);
    let traj = mcsim::mc_run(&mut ens, t_final, dt, record_every, p_bins, x_bins)?;
    let diag = mcsim::drift_diagnostic(&ens);

    write_file(
        &resolved.out_dir,
        "trajectory.csv",
        &csvio::trajectory_to_csv(&traj),
    )?;
    write_file(
        &resolved.out_dir,
        "histograms.csv",
        &csvio::histograms_to_csv(&traj),
    )?;

    let mut report = String::new();
    let _ = writeln!(report, "agents={agents}");
    let _ = writeln!(report, "seed={seed}");
    let _ = writeln!(report, "dt={dt:.17e}");
    let _ = writeln!(report, "t_final={t_final:.17e}");
    let _ = writeln!(report, "final_mean_belief={:.17e}", ens.mean_belief());
    let _ = writeln!(
        report,
        "final_belief_variance={:.17e}",
        ens.belief_variance()
    );
    let _ = writeln!(report, "max_abs_belief={:.17e}", diag.max_abs_belief);
    let _ = writeln!(report, "drift_at_max_belief={:.17e}", diag.drift_at_max);
    let _ = writeln!(report, "drift_at_min_belief={:.17e}", diag.drift_at_min);

    if let Some(path) = &args.validate_against {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let reference = csvio::density_from_csv(&text)?;
        let l1 = long_run_l1(&traj, &reference);
        println!("L1 distance to reference density: {l1:.4}");
        let _ = writeln!(report, "validation_l1={l1:.17e}");
    }
    write_file(&resolved.out_dir, "report.txt", &report)?;
    println!(
        "simulation written to {} ({} records)",
        resolved.out_dir.display(),
        traj.times.len()
    );
    Ok(0)
}

/// L1 distance between the long-run (final quarter, time averaged)
/// empirical belief histogram and a reference density's belief marginal.
pub fn long_run_l1(traj: &mcsim::McTrajectory, reference: &DensityField) -> f64 {
    let t_final = *traj.times.last().unwrap();
    let cut = 0.75 * t_final;
    let mut averaged: Option<mcsim::EmpiricalHistogram> = None;
    let mut count = 0.0;
    for (t, h) in &traj.histograms {
        if *t >= cut {
            match &mut averaged {
                None => averaged = Some(h.clone()),
                Some(acc) => acc.accumulate(h, 1.0),
            }
            count += 1.0;
        }
    }
    let mut avg = averaged.expect("trajectory has no histograms");
    if count > 1.0 {
        avg.renormalize();
    }
    let marginal = reference.belief_marginal();
    avg.l1_vs_marginal(&reference.grid.x_nodes, &marginal)
}
