//! Scenario definitions: the coefficient functions of the dynamics, named
//! presets, validation, and the derived quantities `eta(p)` and `w(p)`.
//!
//! A scenario is plain data. Coefficient functions are either named shapes
//! or tabulated samples with linear interpolation; arbitrary runtime
//! expressions are deliberately not supported so configurations stay
//! auditable. [`build_scenario`] is the validated constructor used by
//! everything that ingests external input; tests and embedders may also
//! assemble a [`ScenarioSpec`] directly.

use serde::{Deserialize, Serialize};

use crate::numerics::{dot, erf_eval, linspace, trapezoid_weights, Grid};
use crate::{Error, Result};

/// Smallest admissible stubbornness. The dynamics are ergodic only when
/// `inf alpha > 0`; preset shapes that touch zero at isolated points are
/// floored here.
pub const ALPHA_FLOOR: f64 = 1e-6;

/// Number of samples used by validation and derived-quantity scans.
const VALIDATION_NODES: usize = 201;

/// A scalar coefficient function of personality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Profile {
    Constant { value: f64 },
    /// `p` itself (the usual prejudice choice).
    Identity,
    /// `|p|`: stubborn agents at the extremes.
    Abs,
    /// `1 - |p|`: stubborn agents at the center.
    OneMinusAbs,
    /// `(p + 1)^2 / 4`: stubbornness ramping from 0 at p = -1 to 1 at p = 1.
    RampSquared,
    /// Lower clamp of another profile.
    Floor { min: f64, inner: Box<Profile> },
    /// Integer power of another profile.
    Pow { n: u32, inner: Box<Profile> },
    /// Tabulated samples with linear interpolation, clamped outside.
    Table { nodes: Vec<f64>, values: Vec<f64> },
}

impl Profile {
    pub fn eval(&self, p: f64) -> f64 {
        match self {
            Profile::Constant { value } => *value,
            Profile::Identity => p,
            Profile::Abs => p.abs(),
            Profile::OneMinusAbs => 1.0 - p.abs(),
            Profile::RampSquared => (p + 1.0) * (p + 1.0) / 4.0,
            Profile::Floor { min, inner } => inner.eval(p).max(*min),
            Profile::Pow { n, inner } => inner.eval(p).powi(*n as i32),
            Profile::Table { nodes, values } => {
                if nodes.is_empty() {
                    return f64::NAN;
                }
                if p <= nodes[0] {
                    return values[0];
                }
                if p >= nodes[nodes.len() - 1] {
                    return values[values.len() - 1];
                }
                let k = match nodes.binary_search_by(|n| n.partial_cmp(&p).unwrap()) {
                    Ok(k) => return values[k],
                    Err(k) => k - 1,
                };
                let t = (p - nodes[k]) / (nodes[k + 1] - nodes[k]);
                values[k] + t * (values[k + 1] - values[k])
            }
        }
    }

    fn validate_tables(&self) -> Result<()> {
        match self {
            Profile::Table { nodes, values } => {
                if nodes.len() < 2 || nodes.len() != values.len() {
                    return Err(Error::InvalidCoefficient(format!(
                        "table needs >= 2 matched samples, got {} nodes / {} values",
                        nodes.len(),
                        values.len()
                    )));
                }
                if !nodes.iter().chain(values).all(|v| v.is_finite()) {
                    return Err(Error::InvalidCoefficient(
                        "table contains non-finite entries".into(),
                    ));
                }
                if nodes.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidCoefficient(
                        "table nodes must be strictly increasing".into(),
                    ));
                }
                Ok(())
            }
            Profile::Floor { min, inner } => {
                if !min.is_finite() {
                    return Err(Error::InvalidCoefficient("non-finite floor".into()));
                }
                inner.validate_tables()
            }
            Profile::Pow { inner, .. } => inner.validate_tables(),
            Profile::Constant { value } => {
                if value.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidCoefficient("non-finite constant".into()))
                }
            }
            _ => Ok(()),
        }
    }
}

/// Mutual influence `zeta(|x' - x|, p, p')`.
///
/// Every variant declares its structural properties (belief independence,
/// product form, sup bound, support radius) by construction rather than by
/// runtime inspection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Influence {
    /// Gravity model `zeta(p, p') = zeta1(p) * zeta2(p')`.
    Product { zeta1: Profile, zeta2: Profile },
    /// Proximity kernel `2 / (1 + (5 |p - p'|)^n)`: attraction between
    /// agents of similar prejudice.
    Proximity { n: u32 },
    /// Community kernel `1/2 + 1/2 erf(p p' / kappa)`: two communities with
    /// tunable cross-interaction.
    Community { kappa: f64 },
    /// Prejudice-similarity kernel `1 / (1 + (p - p')^2)`: interaction
    /// strength grows with how close two prejudices are.
    PrejudiceSimilarity,
    /// Smooth rectangle in belief distance,
    /// `amplitude / (1 + (d / support)^sharpness)`: bounded confidence.
    BoundedRect {
        amplitude: f64,
        support: f64,
        sharpness: u32,
    },
    /// Tabulated belief-distance kernel; zero beyond the last node.
    DistanceTable { nodes: Vec<f64>, values: Vec<f64> },
    /// No interaction at all.
    Zero,
}

impl Influence {
    pub fn eval(&self, d: f64, p: f64, pp: f64) -> f64 {
        match self {
            Influence::Product { zeta1, zeta2 } => zeta1.eval(p) * zeta2.eval(pp),
            Influence::Proximity { n } => {
                if *n == 0 {
                    1.0
                } else {
                    2.0 / (1.0 + (5.0 * (p - pp).abs()).powi(*n as i32))
                }
            }
            Influence::Community { kappa } => 0.5 + 0.5 * erf_eval(p * pp / kappa),
            Influence::PrejudiceSimilarity => {
                let d = p - pp;
                1.0 / (1.0 + d * d)
            }
            Influence::BoundedRect {
                amplitude,
                support,
                sharpness,
            } => amplitude / (1.0 + (d.abs() / support).powi(*sharpness as i32)),
            Influence::DistanceTable { nodes, values } => {
                let d = d.abs();
                if nodes.is_empty() || d > nodes[nodes.len() - 1] {
                    return 0.0;
                }
                Profile::Table {
                    nodes: nodes.clone(),
                    values: values.clone(),
                }
                .eval(d)
            }
            Influence::Zero => 0.0,
        }
    }

    /// Influence ignores the belief distance.
    pub fn belief_independent(&self) -> bool {
        matches!(
            self,
            Influence::Product { .. }
                | Influence::Proximity { .. }
                | Influence::Community { .. }
                | Influence::PrejudiceSimilarity
                | Influence::Zero
        )
    }

    /// Product-form factors, when the kernel is a gravity model.
    pub fn product_form(&self) -> Option<(&Profile, &Profile)> {
        match self {
            Influence::Product { zeta1, zeta2 } => Some((zeta1, zeta2)),
            _ => None,
        }
    }

    /// Declared support radius in belief distance; infinite when the
    /// kernel does not vanish at large distance.
    pub fn support_radius(&self) -> f64 {
        match self {
            Influence::BoundedRect { support, .. } => *support,
            Influence::DistanceTable { nodes, .. } => {
                nodes.last().copied().unwrap_or(0.0)
            }
            Influence::Zero => 0.0,
            _ => f64::INFINITY,
        }
    }
}

/// Belief space: the whole real line (numerically truncated where the
/// stationary tails are negligible) or a compact interval with reflecting
/// boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BeliefDomain {
    UnboundedLine,
    Compact { min: f64, max: f64 },
}

/// Initial belief configuration shared by the transient solver and the
/// Monte Carlo simulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialCondition {
    /// Every agent starts exactly at its prejudice `u(p)`.
    Prejudice,
    /// Every agent starts from the same Gaussian, e.g. right after an event
    /// that polarized beliefs.
    Gaussian { mean: f64, var: f64 },
}

impl InitialCondition {
    /// Mean initial belief of agents with personality `p`.
    pub fn mean_at(&self, spec: &ScenarioSpec, p: f64) -> f64 {
        match self {
            InitialCondition::Prejudice => spec.u(p),
            InitialCondition::Gaussian { mean, .. } => *mean,
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            InitialCondition::Prejudice => 0.0,
            InitialCondition::Gaussian { var, .. } => *var,
        }
    }
}

/// The full model: coefficient functions of the dynamics plus domain
/// declarations. Immutable after construction; evaluation methods are pure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    /// Closed interval of personalities `[p_min, p_max]`.
    pub personality_domain: (f64, f64),
    pub belief_domain: BeliefDomain,
    /// Stubbornness `alpha(p)` in `[0, 1]`; weight on prejudice versus
    /// social influence.
    pub alpha: Profile,
    /// Prejudice `u(p)`: the a-priori belief, a fixed attractor.
    pub prejudice: Profile,
    /// Mutual influence strength.
    pub zeta: Influence,
    /// Endogenous noise variance `sigma^2 > 0`.
    pub sigma2: f64,
    /// Personality density `rho0(p) >= 0`, integrating to 1.
    pub rho0: Profile,
}

impl ScenarioSpec {
    pub fn alpha(&self, p: f64) -> f64 {
        self.alpha.eval(p)
    }

    /// `1 - alpha(p)`.
    pub fn alpha_bar(&self, p: f64) -> f64 {
        1.0 - self.alpha.eval(p)
    }

    pub fn u(&self, p: f64) -> f64 {
        self.prejudice.eval(p)
    }

    pub fn rho0(&self, p: f64) -> f64 {
        self.rho0.eval(p)
    }

    pub fn zeta(&self, d: f64, p: f64, pp: f64) -> f64 {
        self.zeta.eval(d, p, pp)
    }

    /// Belief-independent kernel value `zeta(p, p')`.
    pub fn zeta_pp(&self, p: f64, pp: f64) -> f64 {
        self.zeta.eval(0.0, p, pp)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    pub fn belief_independent(&self) -> bool {
        self.zeta.belief_independent()
    }

    pub fn product_form(&self) -> Option<(&Profile, &Profile)> {
        self.zeta.product_form()
    }

    /// Uniform samples of the personality domain for validation and scans.
    fn p_samples(&self) -> Vec<f64> {
        let (a, b) = self.personality_domain;
        linspace(a, b, VALIDATION_NODES)
    }

    /// Sup of `zeta` over the declared domains.
    pub fn s_zeta(&self) -> f64 {
        match &self.zeta {
            Influence::Product { zeta1, zeta2 } => {
                let ps = self.p_samples();
                let sup = |f: &Profile| ps.iter().map(|&p| f.eval(p)).fold(0.0f64, f64::max);
                sup(zeta1) * sup(zeta2)
            }
            Influence::Proximity { n } => {
                if *n == 0 {
                    1.0
                } else {
                    2.0
                }
            }
            Influence::Community { kappa } => {
                let (a, b) = self.personality_domain;
                let m = (a.abs().max(b.abs())).powi(2);
                0.5 + 0.5 * erf_eval(m / kappa)
            }
            Influence::PrejudiceSimilarity => 1.0,
            Influence::BoundedRect { amplitude, .. } => *amplitude,
            Influence::DistanceTable { values, .. } => {
                values.iter().copied().fold(0.0f64, f64::max)
            }
            Influence::Zero => 0.0,
        }
    }

    /// Declared belief-distance support radius `X0`.
    pub fn support_radius(&self) -> f64 {
        self.zeta.support_radius()
    }

    pub fn inf_alpha(&self) -> f64 {
        self.p_samples()
            .iter()
            .map(|&p| self.alpha(p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn sup_abs_prejudice(&self) -> f64 {
        self.p_samples()
            .iter()
            .map(|&p| self.u(p).abs())
            .fold(0.0f64, f64::max)
    }

    /// `inf_p w(p)` over the validation sample when the influence is
    /// belief-independent, falling back to `inf alpha` otherwise
    /// (`w >= alpha` always, so the fallback is conservative).
    pub fn inf_w(&self) -> f64 {
        if self.belief_independent() && !matches!(self.zeta, Influence::Zero) {
            let ps = self.p_samples();
            let w = trapezoid_weights(&ps);
            let rho: Vec<f64> = ps.iter().map(|&p| self.rho0(p)).collect();
            ps.iter()
                .map(|&p| {
                    let eta: f64 = ps
                        .iter()
                        .zip(&w)
                        .zip(&rho)
                        .map(|((&pq, &wq), &rq)| wq * self.zeta_pp(p, pq) * rq)
                        .sum();
                    let a = self.alpha(p);
                    a + (1.0 - a) * eta
                })
                .fold(f64::INFINITY, f64::min)
        } else {
            self.inf_alpha()
        }
    }

    /// Truncation of an unbounded belief line: the stationary slices are
    /// Gaussians of variance at most `sigma^2 / (2 inf w)` centered within
    /// the prejudice range, so beyond `max |u| + 6 sigma / sqrt(2 inf w)`
    /// the tails carry negligible mass.
    pub fn truncated_belief_interval(&self) -> (f64, f64) {
        let x_max = self.sup_abs_prejudice()
            + 6.0 * self.sigma() / (2.0 * self.inf_w()).sqrt();
        (-x_max, x_max)
    }

    /// Runs the full invariant battery on a validation sample.
    pub fn validate(&self) -> Result<()> {
        let (p_lo, p_hi) = self.personality_domain;
        if !(p_lo.is_finite() && p_hi.is_finite()) || p_hi <= p_lo {
            return Err(Error::DomainEmpty(format!(
                "personality domain [{p_lo}, {p_hi}]"
            )));
        }
        if let BeliefDomain::Compact { min, max } = self.belief_domain {
            if !(min.is_finite() && max.is_finite()) || max <= min {
                return Err(Error::DomainEmpty(format!("belief domain [{min}, {max}]")));
            }
        }
        if !(self.sigma2.is_finite() && self.sigma2 > 0.0) {
            return Err(Error::NonPositiveNoise(self.sigma2));
        }
        self.alpha.validate_tables()?;
        self.prejudice.validate_tables()?;
        self.rho0.validate_tables()?;
        if let Influence::Product { zeta1, zeta2 } = &self.zeta {
            zeta1.validate_tables()?;
            zeta2.validate_tables()?;
        }
        if let Influence::DistanceTable { nodes, values } = &self.zeta {
            Profile::Table {
                nodes: nodes.clone(),
                values: values.clone(),
            }
            .validate_tables()?;
        }
        if let Influence::Community { kappa } = &self.zeta {
            if !(kappa.is_finite() && *kappa > 0.0) {
                return Err(Error::InvalidCoefficient(format!(
                    "community interaction level must be positive, got {kappa}"
                )));
            }
        }
        if let Influence::BoundedRect {
            amplitude, support, ..
        } = &self.zeta
        {
            if !(amplitude.is_finite() && *amplitude >= 0.0)
                || !(support.is_finite() && *support > 0.0)
            {
                return Err(Error::InvalidCoefficient(
                    "bounded-rect kernel needs amplitude >= 0 and support > 0".into(),
                ));
            }
        }

        let ps = self.p_samples();
        let w = trapezoid_weights(&ps);

        // Stubbornness in [0, 1] with a strictly positive infimum.
        let mut inf_alpha = f64::INFINITY;
        for &p in &ps {
            let a = self.alpha(p);
            if !a.is_finite() || !(0.0..=1.0).contains(&a) {
                return Err(Error::InvalidStubbornness(format!(
                    "alpha({p}) = {a} outside [0, 1]"
                )));
            }
            inf_alpha = inf_alpha.min(a);
        }
        if inf_alpha < ALPHA_FLOOR {
            return Err(Error::InvalidStubbornness(format!(
                "inf alpha = {inf_alpha} violates the ergodicity requirement inf alpha > 0"
            )));
        }

        // Prejudice finite.
        for &p in &ps {
            if !self.u(p).is_finite() {
                return Err(Error::InvalidCoefficient(format!(
                    "prejudice u({p}) is not finite"
                )));
            }
        }

        // Personality density: nonnegative, unit mass.
        let rho: Vec<f64> = ps.iter().map(|&p| self.rho0(p)).collect();
        if rho.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::InvalidCoefficient(
                "rho0 must be finite and nonnegative".into(),
            ));
        }
        let mass = dot(&w, &rho);
        if (mass - 1.0).abs() > 1e-6 {
            return Err(Error::UnnormalizedRho0(mass));
        }

        // Influence nonnegative and finite on a sample of arguments.
        let d_samples = [0.0, 0.1, 0.5, 1.0, 2.0];
        for &p in ps.iter().step_by(20) {
            for &pq in ps.iter().step_by(20) {
                for &d in &d_samples {
                    let z = self.zeta(d, p, pq);
                    if !z.is_finite() || z < 0.0 {
                        return Err(Error::InvalidCoefficient(format!(
                            "zeta({d}, {p}, {pq}) = {z} must be finite and nonnegative"
                        )));
                    }
                }
            }
        }

        // Product form consistency at sampled triples.
        if let Some((z1, z2)) = self.product_form() {
            for (k, &p) in ps.iter().step_by(7).enumerate() {
                let pq = ps[(k * 13 + 5) % ps.len()];
                let d = d_samples[k % d_samples.len()];
                let full = self.zeta(d, p, pq);
                let fact = z1.eval(p) * z2.eval(pq);
                if (full - fact).abs() > 1e-12 {
                    return Err(Error::ProductFormMismatch(format!(
                        "zeta({d}, {p}, {pq}) = {full} but zeta1*zeta2 = {fact}"
                    )));
                }
            }
        }

        // Mean influence eta(p) must be bounded away from zero for the
        // unbounded-confidence machinery (a uniformly zero kernel is the
        // legitimate no-interaction scenario and is exempt).
        if self.belief_independent() && !matches!(self.zeta, Influence::Zero) {
            let mut inf_eta = f64::INFINITY;
            for &p in &ps {
                let eta: f64 = ps
                    .iter()
                    .zip(&w)
                    .zip(&rho)
                    .map(|((&pq, &wq), &rq)| wq * self.zeta_pp(p, pq) * rq)
                    .sum();
                inf_eta = inf_eta.min(eta);
            }
            if inf_eta <= 1e-8 {
                return Err(Error::DegenerateInfluence(format!(
                    "inf eta = {inf_eta}; mean influence must stay positive"
                )));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Derived quantities
// ---------------------------------------------------------------------------

/// Mean influence `eta(p) = integral zeta(p, p') rho0(p') dp'`.
///
/// Only defined for belief-independent influence.
pub fn eval_eta(spec: &ScenarioSpec, p: f64, grid: &Grid) -> Result<f64> {
    if !spec.belief_independent() {
        return Err(Error::BeliefDependentZeta);
    }
    let mut acc = 0.0;
    for (j, &pq) in grid.p_nodes.iter().enumerate() {
        acc += grid.p_weights[j] * spec.zeta_pp(p, pq) * spec.rho0(pq);
    }
    Ok(acc)
}

/// Effective restoring rate `w(p) = alpha(p) + (1 - alpha(p)) eta(p)`.
pub fn eval_w(spec: &ScenarioSpec, p: f64, grid: &Grid) -> Result<f64> {
    let eta = eval_eta(spec, p, grid)?;
    let a = spec.alpha(p);
    Ok(a + (1.0 - a) * eta)
}

/// `eta(p)` at every personality node.
pub fn eta_nodes(spec: &ScenarioSpec, grid: &Grid) -> Result<Vec<f64>> {
    grid.p_nodes
        .iter()
        .map(|&p| eval_eta(spec, p, grid))
        .collect()
}

/// `w(p)` at every personality node.
pub fn w_nodes(spec: &ScenarioSpec, grid: &Grid) -> Result<Vec<f64>> {
    grid.p_nodes
        .iter()
        .map(|&p| eval_w(spec, p, grid))
        .collect()
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

/// A named scenario with a validated spec.
#[derive(Debug, Clone)]
pub struct ScenarioPreset {
    pub name: &'static str,
    pub summary: &'static str,
    pub spec: ScenarioSpec,
}

/// Stubbornness shape selector for the inhomogeneous preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaShape {
    /// `1 - |p|`: stubborn agents hold the neutral belief.
    OneMinusAbs,
    /// `|p|`: stubborn agents hold extremal beliefs.
    Abs,
}

/// Community structure selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommunityMode {
    /// Stubborn agents in both communities (`alpha = |p|`).
    Symmetric,
    /// Stubborn agents only in the positive-prejudice community
    /// (`alpha = (p+1)^2/4`).
    OneSided,
}

/// Optional preset parameters; unset fields take the preset's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PresetParams {
    pub alpha: Option<f64>,
    pub sigma2: Option<f64>,
    pub n: Option<u32>,
    pub kappa: Option<f64>,
    pub shape: Option<AlphaShape>,
    pub mode: Option<CommunityMode>,
}

fn base_spec(alpha: Profile, zeta: Influence, sigma2: f64) -> ScenarioSpec {
    ScenarioSpec {
        personality_domain: (-1.0, 1.0),
        belief_domain: BeliefDomain::UnboundedLine,
        alpha,
        prejudice: Profile::Identity,
        zeta,
        sigma2,
        rho0: Profile::Constant { value: 0.5 },
    }
}

fn floored(inner: Profile) -> Profile {
    Profile::Floor {
        min: ALPHA_FLOOR,
        inner: Box::new(inner),
    }
}

const PRESET_NAMES: [(&str, &str); 6] = [
    (
        "homogeneous",
        "constant stubbornness, constant mutual influence (params: alpha, sigma2)",
    ),
    (
        "inhomogeneous",
        "stubbornness 1-|p| or |p|, influence zeta2 = alpha^n (params: shape, n, sigma2)",
    ),
    (
        "proximity",
        "alpha = (p+1)^2/4, influence 2/(1+(5|p-p'|)^n) (params: n, sigma2)",
    ),
    (
        "community",
        "two communities, zeta = 1/2 + 1/2 erf(p p'/kappa) (params: kappa, mode, sigma2)",
    ),
    (
        "bounded-rect",
        "bounded confidence: smooth rectangular zeta(d), support 1/3 (params: alpha, sigma2)",
    ),
    (
        "event-driven",
        "constant alpha, zeta = 1/(1+(p-p')^2); pair with a Gaussian initial condition (params: alpha, sigma2)",
    ),
];

/// Lists the available presets and their tunable parameters.
pub fn preset_catalog() -> Vec<(&'static str, &'static str)> {
    PRESET_NAMES.to_vec()
}

/// Builds a named preset. The spec is validated before being returned.
pub fn build_preset(name: &str, params: &PresetParams) -> Result<ScenarioSpec> {
    let sigma2 = params.sigma2.unwrap_or(0.01);
    let spec = match name {
        "homogeneous" => base_spec(
            Profile::Constant {
                value: params.alpha.unwrap_or(0.5),
            },
            Influence::Product {
                zeta1: Profile::Constant { value: 1.0 },
                zeta2: Profile::Constant { value: 1.0 },
            },
            sigma2,
        ),
        "inhomogeneous" => {
            let shape = match params.shape.unwrap_or(AlphaShape::OneMinusAbs) {
                AlphaShape::OneMinusAbs => Profile::OneMinusAbs,
                AlphaShape::Abs => Profile::Abs,
            };
            let alpha = floored(shape);
            let n = params.n.unwrap_or(0);
            let zeta2 = if n == 0 {
                Profile::Constant { value: 1.0 }
            } else {
                Profile::Pow {
                    n,
                    inner: Box::new(alpha.clone()),
                }
            };
            base_spec(
                alpha,
                Influence::Product {
                    zeta1: Profile::Constant { value: 1.0 },
                    zeta2,
                },
                sigma2,
            )
        }
        "proximity" => {
            let n = params.n.unwrap_or(0);
            let zeta = if n == 0 {
                // constant kernel: keep the product structure explicit
                Influence::Product {
                    zeta1: Profile::Constant { value: 1.0 },
                    zeta2: Profile::Constant { value: 1.0 },
                }
            } else {
                Influence::Proximity { n }
            };
            base_spec(floored(Profile::RampSquared), zeta, sigma2)
        }
        "community" => {
            let alpha = match params.mode.unwrap_or(CommunityMode::Symmetric) {
                CommunityMode::Symmetric => floored(Profile::Abs),
                CommunityMode::OneSided => floored(Profile::RampSquared),
            };
            base_spec(
                alpha,
                Influence::Community {
                    kappa: params.kappa.unwrap_or(0.1),
                },
                sigma2,
            )
        }
        "bounded-rect" => base_spec(
            Profile::Constant {
                value: params.alpha.unwrap_or(0.1),
            },
            Influence::BoundedRect {
                amplitude: 1.0,
                support: 1.0 / 3.0,
                sharpness: 64,
            },
            params.sigma2.unwrap_or(1e-3),
        ),
        "event-driven" => base_spec(
            Profile::Constant {
                value: params.alpha.unwrap_or(0.1),
            },
            Influence::PrejudiceSimilarity,
            sigma2,
        ),
        other => {
            return Err(Error::Config(format!(
                "unknown preset '{other}' (known: {})",
                PRESET_NAMES
                    .iter()
                    .map(|(n, _)| *n)
                    .collect::<Vec<_>>()
                    .join(", ")
            )))
        }
    };
    spec.validate()?;
    Ok(spec)
}
