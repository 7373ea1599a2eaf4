//! Stationary belief distributions.
//!
//! The stationary density is the fixed point of the operator
//!
//! ```text
//! A{rho}(p, x) = K(p) exp( (2/sigma^2) int_0^x mu_int(p, y, rho) dy
//!                          - alpha(p) (x - u(p))^2 / sigma^2 ) rho0(p)
//! ```
//!
//! where `mu_int` is the interaction part of the drift and `K(p)`
//! normalizes each personality slice. Three routes are provided:
//!
//! * [`successive_approximation`] iterates the operator directly and works
//!   for every influence kernel, including bounded confidence;
//! * [`fredholm_phi`] solves the Fredholm equation of the second kind for
//!   the interaction mean `phi*(p)` when the influence is
//!   belief-independent (Nystrom or Neumann series);
//! * [`closed_form_product`] evaluates the closed form available when the
//!   influence factorizes as `zeta1(p) zeta2(p')`.

use rayon::prelude::*;

use crate::model::{eta_nodes, w_nodes, BeliefDomain, Influence, ScenarioSpec};
use crate::numerics::{
    cumulative_trapezoid_from, dot, erf_eval, normal_cdf, normal_pdf, DensityField,
    Grid, Matrix,
};
use crate::{Error, Result};

/// Exponent spread beyond which `exp` would saturate even in log space;
/// reaching it means the iterate is blowing up, not merely stiff.
const EXP_GUARD: f64 = 700.0;

// ---------------------------------------------------------------------------
// Drift
// ---------------------------------------------------------------------------

/// Full drift `mu_x(p, x, rho)` by direct quadrature:
/// interaction attraction plus the prejudice pull `alpha(p)(u(p) - x)`.
///
/// This is the reference (slow) path; the operator below uses structure-
/// aware evaluations that agree with it to rounding.
pub fn drift_mu(spec: &ScenarioSpec, rho: &DensityField, p: f64, x: f64) -> f64 {
    let grid = &rho.grid;
    let mut interact = 0.0;
    for (i, &pq) in grid.p_nodes.iter().enumerate() {
        let row = rho.row(i);
        let wp = grid.p_weights[i];
        let mut inner = 0.0;
        for (j, &xq) in grid.x_nodes.iter().enumerate() {
            let d = (xq - x).abs();
            inner += grid.x_weights[j] * spec.zeta(d, p, pq) * (xq - x) * row[j];
        }
        interact += wp * inner;
    }
    spec.alpha_bar(p) * interact + spec.alpha(p) * (spec.u(p) - x)
}

/// Interaction drift `mu_int(p_i, x_k) = alphabar(p_i) * I(p_i, x_k)` at
/// every node, exploiting the declared kernel structure. Row-major.
fn interaction_drift(spec: &ScenarioSpec, rho: &DensityField) -> Vec<f64> {
    let grid = &rho.grid;
    let np = grid.np();
    let nx = grid.nx();
    let mut out = vec![0.0; np * nx];
    match &spec.zeta {
        Influence::Zero => {}
        z if z.belief_independent() => {
            // I(p, x) = b(p) - a(p) x with
            //   a(p) = int zeta(p, p') M0(p') dp',  M0 = slice mass
            //   b(p) = int zeta(p, p') M1(p') dp',  M1 = slice first moment
            let m0: Vec<f64> = (0..np).map(|i| rho.integrate_x(i)).collect();
            let m1: Vec<f64> = (0..np).map(|i| rho.first_moment_x(i)).collect();
            out.par_chunks_mut(nx).enumerate().for_each(|(i, row)| {
                let p = grid.p_nodes[i];
                let mut a = 0.0;
                let mut b = 0.0;
                for j in 0..np {
                    let zw = grid.p_weights[j] * spec.zeta_pp(p, grid.p_nodes[j]);
                    a += zw * m0[j];
                    b += zw * m1[j];
                }
                let ab = spec.alpha_bar(p);
                for (k, &x) in grid.x_nodes.iter().enumerate() {
                    row[k] = ab * (b - a * x);
                }
            });
        }
        _ => {
            // Distance kernel zeta(|x' - x|): the personality integral
            // collapses onto the belief marginal.
            let pm = rho.belief_marginal();
            let mut s = vec![0.0; nx];
            s.par_iter_mut().enumerate().for_each(|(k, sk)| {
                let y = grid.x_nodes[k];
                let mut acc = 0.0;
                for (j, &xq) in grid.x_nodes.iter().enumerate() {
                    let d = (xq - y).abs();
                    acc += grid.x_weights[j] * spec.zeta(d, 0.0, 0.0) * (xq - y) * pm[j];
                }
                *sk = acc;
            });
            out.par_chunks_mut(nx).enumerate().for_each(|(i, row)| {
                let ab = spec.alpha_bar(grid.p_nodes[i]);
                for k in 0..nx {
                    row[k] = ab * s[k];
                }
            });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// The operator and its fixed point
// ---------------------------------------------------------------------------

/// One application of the stationary operator.
///
/// Works entirely in log space: the per-slice exponent is the cumulative
/// trapezoid of the interaction drift (anchored at the node nearest 0;
/// the constant is absorbed by the normalization) minus the prejudice
/// Gaussian term. Each slice is then normalized to mass 1 in belief and
/// scaled by `rho0(p)`, so the personality marginal is preserved exactly.
pub fn apply_operator_a(spec: &ScenarioSpec, rho: &DensityField) -> Result<DensityField> {
    let grid = rho.grid.clone();
    let np = grid.np();
    let nx = grid.nx();
    let anchor = grid.x_anchor();
    let inv_s2 = 1.0 / spec.sigma2;
    let mu_int = interaction_drift(spec, rho);

    let rows: Vec<Result<Vec<f64>>> = (0..np)
        .into_par_iter()
        .map(|i| {
            let p = grid.p_nodes[i];
            let alpha = spec.alpha(p);
            let u = spec.u(p);
            let rho0 = spec.rho0(p);
            let cum = cumulative_trapezoid_from(
                &grid.x_nodes,
                &mu_int[i * nx..(i + 1) * nx],
                anchor,
            );
            let mut log_g = vec![0.0; nx];
            let mut e_min = f64::INFINITY;
            let mut e_max = f64::NEG_INFINITY;
            for k in 0..nx {
                let e = 2.0 * inv_s2 * cum[k];
                e_min = e_min.min(e);
                e_max = e_max.max(e);
                let dx = grid.x_nodes[k] - u;
                log_g[k] = e - alpha * dx * dx * inv_s2;
            }
            if !(e_max - e_min).is_finite() || e_max - e_min > EXP_GUARD {
                return Err(Error::OverflowGuard {
                    spread: e_max - e_min,
                });
            }
            let top = log_g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut row: Vec<f64> = log_g.iter().map(|&l| (l - top).exp()).collect();
            let z = dot(&grid.x_weights, &row);
            let scale = rho0 / z;
            for v in &mut row {
                *v *= scale;
            }
            Ok(row)
        })
        .collect();

    let mut values = Vec::with_capacity(np * nx);
    for row in rows {
        values.extend_from_slice(&row?);
    }
    DensityField::from_values(grid, values)
}

/// Convergence record of the fixed-point iteration.
#[derive(Debug, Clone)]
pub struct FixedPointReport {
    /// Number of operator applications after the zero-drift bootstrap.
    pub iterations: usize,
    /// L1 distance between consecutive iterates, one entry per iteration.
    pub l1_deltas: Vec<f64>,
    pub converged: bool,
    /// `|| A{rho*} - rho* ||_1` of the returned iterate.
    pub final_residual: f64,
}

/// Iterates `rho <- A{rho}` from the prescribed zero-interaction start
/// until the L1 distance between consecutive iterates drops to `tol`.
///
/// On `max_iter` exhaustion the last iterate and its report (with
/// `converged = false`) are still returned so the caller can decide.
pub fn successive_approximation(
    spec: &ScenarioSpec,
    grid: &Grid,
    tol: f64,
    max_iter: usize,
) -> Result<(DensityField, FixedPointReport)> {
    assert!(tol > 0.0, "tolerance must be positive");
    // Starting iterate: interaction drift suppressed, i.e. the image of the
    // zero field, a pure prejudice Gaussian per personality.
    let mut rho = apply_operator_a(spec, &DensityField::zeros(grid.clone()))?;
    let mut deltas = Vec::new();
    let mut converged = false;
    for _ in 0..max_iter {
        let next = apply_operator_a(spec, &rho)?;
        let delta = next.l1_distance(&rho);
        deltas.push(delta);
        rho = next;
        if delta <= tol {
            converged = true;
            break;
        }
    }
    let final_residual = apply_operator_a(spec, &rho)?.l1_distance(&rho);
    let report = FixedPointReport {
        iterations: deltas.len(),
        l1_deltas: deltas,
        converged: converged && final_residual <= tol,
        final_residual,
    };
    Ok((rho, report))
}

/// Contraction diagnosis for the operator on a compact belief space.
#[derive(Debug, Clone, Copy)]
pub struct ContractionDiagnosis {
    /// True when the belief domain is genuinely compact. On a truncated
    /// line the numbers below are computed with the truncation bound and
    /// are indicative only.
    pub compact_domain: bool,
    /// `S_zeta * S_x * X0`.
    pub lhs: f64,
    /// Global contraction threshold `sigma^2 / 8`.
    pub global_bound: f64,
    /// Local (near the fixed point) threshold `sigma^2 / 2`.
    pub local_bound: f64,
    pub global: bool,
    pub local: bool,
}

impl ContractionDiagnosis {
    pub fn guaranteed(&self) -> bool {
        self.compact_domain && self.global
    }
}

/// Compares `S_zeta * S_x * X0` against the global (`sigma^2/8`) and local
/// (`sigma^2/2`) contraction thresholds.
pub fn contraction_bound_check(spec: &ScenarioSpec) -> ContractionDiagnosis {
    let (compact, s_x) = match spec.belief_domain {
        BeliefDomain::Compact { min, max } => (true, min.abs().max(max.abs())),
        BeliefDomain::UnboundedLine => (false, spec.truncated_belief_interval().1),
    };
    let s_zeta = spec.s_zeta();
    let x0 = spec.support_radius();
    let lhs = if s_zeta == 0.0 || x0 == 0.0 {
        0.0
    } else {
        s_zeta * s_x * x0
    };
    let global_bound = spec.sigma2 / 8.0;
    let local_bound = spec.sigma2 / 2.0;
    ContractionDiagnosis {
        compact_domain: compact,
        lhs,
        global_bound,
        local_bound,
        global: lhs < global_bound,
        local: lhs < local_bound,
    }
}

// ---------------------------------------------------------------------------
// Unbounded confidence: the Fredholm route
// ---------------------------------------------------------------------------

/// Discretization method for the Fredholm equation
/// `phi = h + int Gamma(p, p') phi(p') dp'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FredholmMethod {
    /// Quadrature collocation: solve `(I - Gamma W) phi = h` densely.
    /// Works whenever the discrete system is nonsingular.
    Nystrom,
    /// Successive substitution (partial sums of the iterated-kernel
    /// series); requires the discrete L2 kernel norm to be below 1.
    NeumannSeries,
}

struct FredholmSystem {
    h: Vec<f64>,
    gamma: Matrix,
}

fn fredholm_system(spec: &ScenarioSpec, grid: &Grid) -> Result<FredholmSystem> {
    if !spec.belief_independent() {
        return Err(Error::BeliefDependentZeta);
    }
    let eta = eta_nodes(spec, grid)?;
    let inf_eta = eta.iter().copied().fold(f64::INFINITY, f64::min);
    if inf_eta <= 1e-12 {
        return Err(Error::DegenerateInfluence(format!(
            "inf eta = {inf_eta}; the interaction mean is undefined"
        )));
    }
    let w = w_nodes(spec, grid)?;
    let np = grid.np();
    let mut h = vec![0.0; np];
    let mut gamma = Matrix::zeros(np);
    for i in 0..np {
        let p = grid.p_nodes[i];
        let mut acc = 0.0;
        for j in 0..np {
            let pq = grid.p_nodes[j];
            let z = spec.zeta_pp(p, pq);
            let rho0 = spec.rho0(pq);
            acc += grid.p_weights[j] * z * rho0 * spec.alpha(pq) * spec.u(pq) / w[j];
            gamma[(i, j)] = z * rho0 * spec.alpha_bar(pq) * eta[j] / (eta[i] * w[j]);
        }
        h[i] = acc / eta[i];
    }
    Ok(FredholmSystem { h, gamma })
}

/// Solves for the stationary interaction mean `phi*(p)` at the personality
/// nodes. Requires belief-independent influence.
pub fn fredholm_phi(spec: &ScenarioSpec, grid: &Grid, method: FredholmMethod) -> Result<Vec<f64>> {
    let sys = fredholm_system(spec, grid)?;
    let np = grid.np();
    match method {
        FredholmMethod::Nystrom => {
            let mut a = Matrix::identity(np);
            for i in 0..np {
                for j in 0..np {
                    a[(i, j)] -= sys.gamma[(i, j)] * grid.p_weights[j];
                }
            }
            crate::numerics::solve_dense(&a, &sys.h)
        }
        FredholmMethod::NeumannSeries => {
            let mut l2 = 0.0;
            for i in 0..np {
                for j in 0..np {
                    let g = sys.gamma[(i, j)];
                    l2 += grid.p_weights[i] * grid.p_weights[j] * g * g;
                }
            }
            if l2 >= 1.0 {
                return Err(Error::SeriesDiverges { norm: l2.sqrt() });
            }
            let mut phi = sys.h.clone();
            for _ in 0..100_000 {
                let mut next = sys.h.clone();
                for i in 0..np {
                    let mut acc = 0.0;
                    for j in 0..np {
                        acc += sys.gamma[(i, j)] * grid.p_weights[j] * phi[j];
                    }
                    next[i] += acc;
                }
                let diff = phi
                    .iter()
                    .zip(&next)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                let scale = next.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
                phi = next;
                if diff <= 1e-14 * (1.0 + scale) {
                    break;
                }
            }
            Ok(phi)
        }
    }
}

// ---------------------------------------------------------------------------
// Gaussian family
// ---------------------------------------------------------------------------

/// Stationary solution under unbounded confidence: per personality a
/// Gaussian slice `N(m(p), sigma^2 / (2 w(p)))` scaled by `rho0(p)`.
#[derive(Debug, Clone)]
pub struct GaussianFamilySolution {
    pub p_nodes: Vec<f64>,
    pub m: Vec<f64>,
    pub w: Vec<f64>,
    pub phi_star: Vec<f64>,
    pub sigma2: f64,
}

impl GaussianFamilySolution {
    /// Per-slice belief variance `sigma^2 / (2 w(p))`.
    pub fn variance(&self, i: usize) -> f64 {
        self.sigma2 / (2.0 * self.w[i])
    }

    /// Samples the family on a grid.
    pub fn to_density_field(&self, spec: &ScenarioSpec, grid: &Grid) -> DensityField {
        assert_eq!(self.p_nodes, grid.p_nodes, "grid mismatch");
        let mut field = DensityField::zeros(grid.clone());
        for i in 0..grid.np() {
            let rho0 = spec.rho0(grid.p_nodes[i]);
            let m = self.m[i];
            let v = self.variance(i);
            let row = field.row_mut(i);
            for (k, &x) in grid.x_nodes.iter().enumerate() {
                row[k] = rho0 * normal_pdf(x, m, v);
            }
        }
        field
    }

    /// Belief marginal `rho(x) = int rho0(p) N(x; m(p), v(p)) dp` by exact
    /// integration over personality segments with a locally linear mean.
    ///
    /// Plain trapezoid over p misses by O(h^2 * max|d N/dp|), which the
    /// narrow slices amplify badly; integrating the Gaussian in closed form
    /// per segment removes that amplification and is exact whenever the
    /// mean is linear in p and `rho0`, `w` are constant.
    pub fn belief_marginal(&self, spec: &ScenarioSpec, x_nodes: &[f64]) -> Vec<f64> {
        let np = self.p_nodes.len();
        let mut out = vec![0.0; x_nodes.len()];
        for s in 0..np - 1 {
            let h = self.p_nodes[s + 1] - self.p_nodes[s];
            let rho_bar = 0.5 * (spec.rho0(self.p_nodes[s]) + spec.rho0(self.p_nodes[s + 1]));
            if rho_bar == 0.0 {
                continue;
            }
            let v_bar = 0.5 * (self.variance(s) + self.variance(s + 1));
            let m0 = self.m[s];
            let m1 = self.m[s + 1];
            let dm = m1 - m0;
            let sd = v_bar.sqrt();
            if dm.abs() < 1e-9 * sd.max(1e-300) {
                let mm = 0.5 * (m0 + m1);
                for (k, &x) in x_nodes.iter().enumerate() {
                    out[k] += h * rho_bar * normal_pdf(x, mm, v_bar);
                }
            } else {
                let scale = h * rho_bar / dm;
                for (k, &x) in x_nodes.iter().enumerate() {
                    let phi1 = normal_cdf((m1 - x) / sd);
                    let phi0 = normal_cdf((m0 - x) / sd);
                    out[k] += scale * (phi1 - phi0);
                }
            }
        }
        out
    }
}

/// Assembles the Gaussian family from a solved interaction mean:
/// `m(p) = [alpha u + alphabar eta phi](p) / w(p)`.
pub fn gaussian_family_from_phi(
    spec: &ScenarioSpec,
    grid: &Grid,
    phi: Vec<f64>,
) -> Result<GaussianFamilySolution> {
    let eta = eta_nodes(spec, grid)?;
    let w = w_nodes(spec, grid)?;
    let m = grid
        .p_nodes
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let a = spec.alpha(p);
            (a * spec.u(p) + (1.0 - a) * eta[i] * phi[i]) / w[i]
        })
        .collect();
    Ok(GaussianFamilySolution {
        p_nodes: grid.p_nodes.clone(),
        m,
        w,
        phi_star: phi,
        sigma2: spec.sigma2,
    })
}

/// Closed form for product influence `zeta = zeta1(p) zeta2(p')`:
/// the interaction mean collapses to a scalar
///
/// ```text
/// phi* = (1/eta) * int zeta2 rho0 alpha u / w dp'
///              / (1 - int zeta2 rho0 alphabar zeta1 / w dp')
/// ```
///
/// with `eta = int zeta2 rho0 dp'` and `w(p') = alpha + alphabar zeta1 eta`.
pub fn closed_form_product(spec: &ScenarioSpec, grid: &Grid) -> Result<GaussianFamilySolution> {
    let (zeta1, zeta2) = spec
        .product_form()
        .ok_or_else(|| Error::ProductFormMismatch("closed form needs a gravity model".into()))?;
    let (zeta1, zeta2) = (zeta1.clone(), zeta2.clone());

    let mut eta_scalar = 0.0;
    for (j, &pq) in grid.p_nodes.iter().enumerate() {
        eta_scalar += grid.p_weights[j] * zeta2.eval(pq) * spec.rho0(pq);
    }
    if eta_scalar <= 1e-12 {
        return Err(Error::DegenerateInfluence(format!(
            "scalar eta = {eta_scalar}"
        )));
    }
    let mut num = 0.0;
    let mut den = 1.0;
    for (j, &pq) in grid.p_nodes.iter().enumerate() {
        let a = spec.alpha(pq);
        let ab = 1.0 - a;
        let z1 = zeta1.eval(pq);
        let w = a + ab * z1 * eta_scalar;
        let common = grid.p_weights[j] * zeta2.eval(pq) * spec.rho0(pq) / w;
        num += common * a * spec.u(pq);
        den -= common * ab * z1;
    }
    if den.abs() <= 1e-12 {
        return Err(Error::DenominatorVanishes(den));
    }
    let phi_star = num / (eta_scalar * den);
    gaussian_family_from_phi(spec, grid, vec![phi_star; grid.np()])
}

/// Cluster modes of a belief marginal: maximal runs where the density
/// stays at or above half its peak, one mode (the argmax) per run.
///
/// Counting raw local maxima would report shallow ripples of a broad
/// distribution as separate clusters; the half-maximum rule matches the
/// usual reading of "distinct clusters" (well separated peaks with little
/// mass between them).
pub fn marginal_modes(x_nodes: &[f64], values: &[f64]) -> Vec<(f64, f64)> {
    let peak = values.iter().copied().fold(0.0f64, f64::max);
    if !(peak > 0.0) {
        return Vec::new();
    }
    let threshold = 0.5 * peak;
    let mut modes = Vec::new();
    let mut best: Option<(f64, f64)> = None;
    for (j, &v) in values.iter().enumerate() {
        if v >= threshold {
            match best {
                Some((_, b)) if b >= v => {}
                _ => best = Some((x_nodes[j], v)),
            }
        } else if let Some(m) = best.take() {
            modes.push(m);
        }
    }
    if let Some(m) = best {
        modes.push(m);
    }
    modes
}

/// Homogeneous closed form: constant stubbornness, unit influence, uniform
/// personalities on [-1, 1] and `u(p) = p` give the belief marginal
///
/// ```text
/// rho(x) = 1/(4 alpha) [ erf((alpha + x)/sigma) + erf((alpha - x)/sigma) ]
/// ```
pub fn homogeneous_closed_form(alpha: f64, sigma2: f64, x: f64) -> f64 {
    assert!(alpha > 0.0 && alpha <= 1.0);
    assert!(sigma2 > 0.0);
    let s = sigma2.sqrt();
    (erf_eval((alpha + x) / s) + erf_eval((alpha - x) / s)) / (4.0 * alpha)
}
