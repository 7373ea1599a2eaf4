//! Time-dependent belief densities under unbounded confidence.
//!
//! With belief-independent influence the drift is linear in `x`, so per
//! personality the density evolves as an Ornstein-Uhlenbeck process whose
//! Green function is Gaussian with
//!
//! ```text
//! mean(p, t) = e^{-w t} x0(p) + (1 - e^{-w t}) alpha u / w
//!              + alphabar eta int_0^t e^{w (tau - t)} phi(p, tau) dtau
//! var(p, t)  = sigma^2 (1 - e^{-2 w t}) / (2 w)
//! ```
//!
//! The interaction field `phi(p, t)` is itself a functional of the density,
//! giving a second-kind Volterra equation which [`solve_transient`] marches
//! in time: the exponential-kernel convolution is updated by an exact
//! recurrence with a trapezoidal increment, and the implicit coupling of
//! the newest value across personalities is solved with one pre-factored
//! linear system. Laplace-domain identities are kept as cross-checks.

use crate::model::{InitialCondition, ScenarioSpec};
use crate::numerics::{
    linspace, lu_factor, normal_pdf, trapezoid_weights, DensityField, Grid, Matrix,
};
use crate::{Error, Result};

/// The self-consistent interaction field `phi(p, t)` on a (personality,
/// time) lattice, together with the initial condition that produced it.
#[derive(Debug, Clone)]
pub struct PhiPath {
    pub p_nodes: Vec<f64>,
    pub t_nodes: Vec<f64>,
    pub init: InitialCondition,
    /// Time-major values: `phi[k * np + i]` is `phi(p_i, t_k)`.
    values: Vec<f64>,
}

impl PhiPath {
    pub fn np(&self) -> usize {
        self.p_nodes.len()
    }

    pub fn nt(&self) -> usize {
        self.t_nodes.len()
    }

    pub fn t_final(&self) -> f64 {
        *self.t_nodes.last().unwrap()
    }

    pub fn value(&self, p_index: usize, t_index: usize) -> f64 {
        self.values[t_index * self.np() + p_index]
    }

    /// All personalities at one time node.
    pub fn at_time(&self, t_index: usize) -> &[f64] {
        let np = self.np();
        &self.values[t_index * np..(t_index + 1) * np]
    }

    /// One personality's series over time.
    pub fn series(&self, p_index: usize) -> Vec<f64> {
        (0..self.nt()).map(|k| self.value(p_index, k)).collect()
    }

    /// Bilinear interpolation in (p, t).
    pub fn interpolate(&self, p: f64, t: f64) -> Result<f64> {
        if !(0.0..=self.t_final() + 1e-12).contains(&t) {
            return Err(Error::TimeOutOfRange {
                t,
                t_max: self.t_final(),
            });
        }
        let (k, lam_t) = bracket(&self.t_nodes, t);
        let (i, lam_p) = bracket(&self.p_nodes, p.clamp(self.p_nodes[0], *self.p_nodes.last().unwrap()));
        let f = |kk: usize, ii: usize| self.value(ii, kk);
        let a = f(k, i) * (1.0 - lam_p) + f(k, i + 1) * lam_p;
        let b = f(k + 1, i) * (1.0 - lam_p) + f(k + 1, i + 1) * lam_p;
        Ok(a * (1.0 - lam_t) + b * lam_t)
    }
}

/// Index of the segment containing `x` plus the interpolation weight.
fn bracket(nodes: &[f64], x: f64) -> (usize, f64) {
    let n = nodes.len();
    if x <= nodes[0] {
        return (0, 0.0);
    }
    if x >= nodes[n - 1] {
        return (n - 2, 1.0);
    }
    let mut k = match nodes.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        Ok(k) => k,
        Err(k) => k - 1,
    };
    if k >= n - 1 {
        k = n - 2;
    }
    ((k), (x - nodes[k]) / (nodes[k + 1] - nodes[k]))
}

/// Full transient solution: the interaction field plus the per-node Green
/// means and variances, consistent with the same discrete convolution.
#[derive(Debug, Clone)]
pub struct TransientSolution {
    pub phi_path: PhiPath,
    /// Time-major `mean[k * np + i]`.
    pub mean: Vec<f64>,
    /// Time-major `var[k * np + i]` (Green variance, excluding any initial
    /// spread; see [`density_at`]).
    pub var: Vec<f64>,
    pub init: InitialCondition,
}

impl TransientSolution {
    pub fn mean_at(&self, p_index: usize, t_index: usize) -> f64 {
        self.mean[t_index * self.phi_path.np() + p_index]
    }

    pub fn var_at(&self, p_index: usize, t_index: usize) -> f64 {
        self.var[t_index * self.phi_path.np() + p_index]
    }

    /// Population mean belief at a time node,
    /// `int m(p, t) rho0(p) dp` by quadrature.
    pub fn population_mean(&self, spec: &ScenarioSpec, t_index: usize) -> f64 {
        let w = trapezoid_weights(&self.phi_path.p_nodes);
        let np = self.phi_path.np();
        let mut acc = 0.0;
        for i in 0..np {
            acc += w[i] * spec.rho0(self.phi_path.p_nodes[i]) * self.mean_at(i, t_index);
        }
        acc
    }
}

struct VolterraSetup {
    eta: Vec<f64>,
    w: Vec<f64>,
    alpha: Vec<f64>,
    u: Vec<f64>,
    x0: Vec<f64>,
    /// `C[i][j] = wp_j zeta(p_i, p_j) rho0(p_j) / eta(p_i)`
    c: Matrix,
    /// `M[i][j] = C[i][j] alphabar(p_j) eta(p_j)`
    m: Matrix,
}

fn volterra_setup(spec: &ScenarioSpec, grid: &Grid, init: InitialCondition) -> Result<VolterraSetup> {
    if !spec.belief_independent() {
        return Err(Error::BeliefDependentZeta);
    }
    let eta = crate::model::eta_nodes(spec, grid)?;
    let inf_eta = eta.iter().copied().fold(f64::INFINITY, f64::min);
    if inf_eta <= 1e-12 {
        return Err(Error::DegenerateInfluence(format!(
            "inf eta = {inf_eta}; the interaction field is undefined"
        )));
    }
    let w = crate::model::w_nodes(spec, grid)?;
    let np = grid.np();
    let alpha: Vec<f64> = grid.p_nodes.iter().map(|&p| spec.alpha(p)).collect();
    let u: Vec<f64> = grid.p_nodes.iter().map(|&p| spec.u(p)).collect();
    let x0: Vec<f64> = grid.p_nodes.iter().map(|&p| init.mean_at(spec, p)).collect();
    let mut c = Matrix::zeros(np);
    let mut m = Matrix::zeros(np);
    for i in 0..np {
        for j in 0..np {
            let cij = grid.p_weights[j] * spec.zeta_pp(grid.p_nodes[i], grid.p_nodes[j])
                * spec.rho0(grid.p_nodes[j])
                / eta[i];
            c[(i, j)] = cij;
            m[(i, j)] = cij * (1.0 - alpha[j]) * eta[j];
        }
    }
    Ok(VolterraSetup {
        eta,
        w,
        alpha,
        u,
        x0,
        c,
        m,
    })
}

/// Marches the Volterra self-consistency equation for `phi(p, t)` and the
/// Green means and variances on `t_k = k dt` up to `t_final`.
pub fn solve_transient(
    spec: &ScenarioSpec,
    grid: &Grid,
    t_final: f64,
    dt: f64,
    init: InitialCondition,
) -> Result<TransientSolution> {
    assert!(dt > 0.0 && t_final > 0.0);
    let setup = volterra_setup(spec, grid, init)?;
    let np = grid.np();
    let max_w = setup.w.iter().copied().fold(0.0f64, f64::max);
    if dt * max_w > 0.5 {
        return Err(Error::StepTooLarge(format!(
            "dt * max w = {} > 0.5; shrink the step",
            dt * max_w
        )));
    }
    let steps = (t_final / dt).round().max(1.0) as usize;

    // Implicit trapezoidal closure: (I - dt/2 M) phi_k = rhs. Factor once.
    let mut a = Matrix::identity(np);
    for i in 0..np {
        for j in 0..np {
            a[(i, j)] -= 0.5 * dt * setup.m[(i, j)];
        }
    }
    let lu = lu_factor(&a)?;
    let decay: Vec<f64> = setup.w.iter().map(|&w| (-w * dt).exp()).collect();

    let mut t_nodes = Vec::with_capacity(steps + 1);
    let mut phi_values = Vec::with_capacity((steps + 1) * np);
    let mut mean = Vec::with_capacity((steps + 1) * np);
    let mut var = Vec::with_capacity((steps + 1) * np);

    t_nodes.push(0.0);
    let phi0 = setup.c.matvec(&setup.x0);
    phi_values.extend_from_slice(&phi0);
    mean.extend_from_slice(&setup.x0);
    var.extend(std::iter::repeat_n(0.0, np));

    let mut conv = vec![0.0; np]; // int_0^{t_k} e^{w (tau - t_k)} phi dtau
    let mut phi_prev = phi0;
    for k in 1..=steps {
        let t = k as f64 * dt;
        t_nodes.push(t);
        // Green mean without the interaction term.
        let mut base = vec![0.0; np];
        for i in 0..np {
            let e0 = (-setup.w[i] * t).exp();
            base[i] = e0 * setup.x0[i] + (1.0 - e0) * setup.alpha[i] * setup.u[i] / setup.w[i];
        }
        let b0 = setup.c.matvec(&base);
        // Known part of the convolution at t_k.
        let partial: Vec<f64> = (0..np)
            .map(|j| decay[j] * (conv[j] + 0.5 * dt * phi_prev[j]))
            .collect();
        let coupled = setup.m.matvec(&partial);
        let rhs: Vec<f64> = (0..np).map(|i| b0[i] + coupled[i]).collect();
        let phi_k = lu.solve(&rhs);
        for j in 0..np {
            conv[j] = partial[j] + 0.5 * dt * phi_k[j];
        }
        for i in 0..np {
            mean.push(base[i] + (1.0 - setup.alpha[i]) * setup.eta[i] * conv[i]);
            var.push(
                spec.sigma2 * (1.0 - (-2.0 * setup.w[i] * t).exp()) / (2.0 * setup.w[i]),
            );
        }
        phi_values.extend_from_slice(&phi_k);
        phi_prev = phi_k;
    }

    Ok(TransientSolution {
        phi_path: PhiPath {
            p_nodes: grid.p_nodes.clone(),
            t_nodes,
            init,
            values: phi_values,
        },
        mean,
        var,
        init,
    })
}

/// Convenience wrapper returning only the interaction field.
pub fn solve_phi_volterra(
    spec: &ScenarioSpec,
    grid: &Grid,
    t_final: f64,
    dt: f64,
    init: InitialCondition,
) -> Result<PhiPath> {
    Ok(solve_transient(spec, grid, t_final, dt, init)?.phi_path)
}

/// Green-function mean and variance at `(p, t)` for an impulse released at
/// `x0`, with the interaction history taken from `phi_path` (convolved by
/// trapezoid on its time nodes).
pub fn green_mean_var(
    spec: &ScenarioSpec,
    p: f64,
    x0: f64,
    phi_path: &PhiPath,
    t: f64,
) -> Result<(f64, f64)> {
    if !spec.belief_independent() {
        return Err(Error::BeliefDependentZeta);
    }
    if !(0.0..=phi_path.t_final() + 1e-12).contains(&t) {
        return Err(Error::TimeOutOfRange {
            t,
            t_max: phi_path.t_final(),
        });
    }
    let wp = trapezoid_weights(&phi_path.p_nodes);
    let mut eta = 0.0;
    for (j, &pq) in phi_path.p_nodes.iter().enumerate() {
        eta += wp[j] * spec.zeta_pp(p, pq) * spec.rho0(pq);
    }
    let alpha = spec.alpha(p);
    let w = alpha + (1.0 - alpha) * eta;
    let u = spec.u(p);

    // Convolution int_0^t e^{w (tau - t)} phi(p, tau) dtau over the stored
    // time nodes, with a partial final segment if t falls between nodes.
    let mut conv = 0.0;
    let mut prev_t = 0.0;
    let mut prev_f = phi_path.interpolate(p, 0.0)?;
    let mut done = false;
    for k in 1..phi_path.nt() {
        let tk = phi_path.t_nodes[k];
        let (seg_t, last) = if tk >= t { (t, true) } else { (tk, false) };
        let f = phi_path.interpolate(p, seg_t)? * (w * (seg_t - t)).exp();
        conv += 0.5 * (seg_t - prev_t) * (prev_f * (w * (prev_t - t)).exp() + f);
        prev_t = seg_t;
        prev_f = phi_path.interpolate(p, seg_t)?;
        if last {
            done = true;
            break;
        }
    }
    debug_assert!(done || t <= phi_path.t_nodes[0]);

    let e0 = (-w * t).exp();
    let mean = e0 * x0 + (1.0 - e0) * alpha * u / w + (1.0 - alpha) * eta * conv;
    let var = spec.sigma2 * (1.0 - (-2.0 * w * t).exp()) / (2.0 * w);
    Ok((mean, var))
}

/// Density at time `t`: per personality the Gaussian Green kernel applied
/// to the initial condition. Point-mass initial conditions give exactly
/// `N(mean(p,t), var(p,t))`; Gaussian initial conditions add
/// `e^{-2wt} var0` to the variance.
pub fn density_at(
    spec: &ScenarioSpec,
    solution: &TransientSolution,
    t: f64,
    grid: &Grid,
) -> Result<DensityField> {
    let path = &solution.phi_path;
    assert_eq!(path.p_nodes, grid.p_nodes, "grid mismatch");
    if !(0.0..=path.t_final() + 1e-12).contains(&t) {
        return Err(Error::TimeOutOfRange {
            t,
            t_max: path.t_final(),
        });
    }
    let (k, lam) = bracket(&path.t_nodes, t);
    let np = grid.np();
    let w = crate::model::w_nodes(spec, grid)?;
    let var0 = solution.init.variance();
    let dx_min = grid.x_spacing_min();

    let mut field = DensityField::zeros(grid.clone());
    for i in 0..np {
        let rho0 = spec.rho0(grid.p_nodes[i]);
        let m = solution.mean_at(i, k) * (1.0 - lam) + solution.mean_at(i, k + 1) * lam;
        let green_var = spec.sigma2 * (1.0 - (-2.0 * w[i] * t).exp()) / (2.0 * w[i]);
        let v = green_var + (-2.0 * w[i] * t).exp() * var0;
        let row = field.row_mut(i);
        if v.sqrt() < 0.25 * dx_min {
            // Too narrow for the grid: a near-delta column in the nearest bin.
            let mut nearest = 0;
            for (j, &x) in grid.x_nodes.iter().enumerate() {
                if (x - m).abs() < (grid.x_nodes[nearest] - m).abs() {
                    nearest = j;
                }
            }
            row[nearest] = rho0 / grid.x_weights[nearest];
        } else {
            for (j, &x) in grid.x_nodes.iter().enumerate() {
                row[j] = normal_pdf(x, m, v);
            }
            let z = crate::numerics::dot(&grid.x_weights, row);
            if z > 0.0 {
                let scale = rho0 / z;
                for r in row.iter_mut() {
                    *r *= scale;
                }
            }
        }
    }
    Ok(field)
}

/// `I2_hat(s) = int zeta1(p) zeta2(p) rho0(p) alphabar(p) / (s + w(p)) dp`
/// for product-form influence; the resolvent denominator of the transient
/// interaction field in the Laplace domain.
pub fn laplace_i2(spec: &ScenarioSpec, s: f64) -> Result<f64> {
    let (zeta1, zeta2) = spec
        .product_form()
        .ok_or_else(|| Error::ProductFormMismatch("Laplace diagnostics need a gravity model".into()))?;
    let (a, b) = spec.personality_domain;
    let p_nodes = linspace(a, b, 2001);
    let wp = trapezoid_weights(&p_nodes);
    let mut eta = 0.0;
    for (j, &p) in p_nodes.iter().enumerate() {
        eta += wp[j] * zeta2.eval(p) * spec.rho0(p);
    }
    // The transform only converges for Re(s) > -inf w; past that the
    // integrand crosses its pole.
    let inf_w = p_nodes
        .iter()
        .map(|&p| {
            let al = spec.alpha(p);
            al + (1.0 - al) * zeta1.eval(p) * eta
        })
        .fold(f64::INFINITY, f64::min);
    if s + inf_w < 1e-12 {
        return Err(Error::PoleOnPath(s + inf_w));
    }
    let mut acc = 0.0;
    for (j, &p) in p_nodes.iter().enumerate() {
        let al = spec.alpha(p);
        let w = al + (1.0 - al) * zeta1.eval(p) * eta;
        let denom = s + w;
        if denom.abs() < 1e-12 {
            return Err(Error::PoleOnPath(denom));
        }
        acc += wp[j] * zeta1.eval(p) * zeta2.eval(p) * spec.rho0(p) * (1.0 - al) / denom;
    }
    Ok(acc)
}

/// Cross-checks the time-domain interaction field against its explicit
/// Laplace-domain solution `phi_hat = (I0_hat + I1_hat) / (1 - I2_hat)`.
///
/// `I0_hat` and `I1_hat` are numerically transformed from their
/// time-domain definitions with the same trapezoid weights used for
/// `phi`, so the residual isolates genuine inconsistency rather than
/// quadrature flavor. Returns one relative residual per `s` sample.
pub fn laplace_consistency_check(
    spec: &ScenarioSpec,
    phi_path: &PhiPath,
    s_samples: &[f64],
) -> Result<Vec<f64>> {
    if spec.product_form().is_none() {
        return Err(Error::ProductFormMismatch(
            "Laplace diagnostics need a gravity model".into(),
        ));
    }
    let wp = trapezoid_weights(&phi_path.p_nodes);
    let tw = trapezoid_weights(&phi_path.t_nodes);
    let t_final = phi_path.t_final();

    // Per-node data for the time-domain I0, I1.
    let eta: Vec<f64> = phi_path
        .p_nodes
        .iter()
        .map(|&p| {
            phi_path
                .p_nodes
                .iter()
                .zip(&wp)
                .map(|(&pq, &wq)| wq * spec.zeta_pp(p, pq) * spec.rho0(pq))
                .sum()
        })
        .collect();
    let w: Vec<f64> = phi_path
        .p_nodes
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let a = spec.alpha(p);
            a + (1.0 - a) * eta[i]
        })
        .collect();
    let x0: Vec<f64> = phi_path
        .p_nodes
        .iter()
        .map(|&p| phi_path.init.mean_at(spec, p))
        .collect();

    // phi(p, t) is personality-independent in product form; use the first
    // node's series. I0 and I1 likewise.
    let ref_i = 0;
    let phi_t = phi_path.series(ref_i);
    let p_ref = phi_path.p_nodes[ref_i];
    let i0_i1_at = |t: f64| -> (f64, f64) {
        let mut i0 = 0.0;
        let mut i1 = 0.0;
        for (j, &pq) in phi_path.p_nodes.iter().enumerate() {
            let z = spec.zeta_pp(p_ref, pq) * spec.rho0(pq) * wp[j];
            let e = (-w[j] * t).exp();
            i0 += z * e * x0[j];
            i1 += z * (1.0 - e) * spec.alpha(pq) * spec.u(pq) / w[j];
        }
        (i0 / eta[ref_i], i1 / eta[ref_i])
    };

    let mut residuals = Vec::with_capacity(s_samples.len());
    for &s in s_samples {
        if (-s * t_final).exp() >= 1e-10 {
            return Err(Error::PathTooShort(format!(
                "need exp(-s t_final) < 1e-10, got {:e} at s = {s}",
                (-s * t_final).exp()
            )));
        }
        let mut phi_hat_num = 0.0;
        let mut i0_hat = 0.0;
        let mut i1_hat = 0.0;
        for (k, &t) in phi_path.t_nodes.iter().enumerate() {
            let e = (-s * t).exp() * tw[k];
            phi_hat_num += e * phi_t[k];
            let (i0, i1) = i0_i1_at(t);
            i0_hat += e * i0;
            i1_hat += e * i1;
        }
        // I2_hat on the path's own personality rule, so the residual
        // isolates inconsistency rather than quadrature flavor.
        let mut i2_hat = 0.0;
        for (j, &pq) in phi_path.p_nodes.iter().enumerate() {
            let al = spec.alpha(pq);
            let denom = s + w[j];
            if denom.abs() < 1e-12 {
                return Err(Error::PoleOnPath(denom));
            }
            i2_hat +=
                wp[j] * spec.zeta_pp(p_ref, pq) * spec.rho0(pq) * (1.0 - al) * eta[j]
                    / (eta[ref_i] * denom);
        }
        let predicted = (i0_hat + i1_hat) / (1.0 - i2_hat);
        let denom = predicted.abs().max(1e-9);
        residuals.push((phi_hat_num - predicted).abs() / denom);
    }
    Ok(residuals)
}
