//! Direct stochastic simulation of the finite agent system.
//!
//! Euler-Maruyama with synchronous updates: every agent reads the time-t
//! beliefs, so one step is an embarrassingly parallel map. Noise comes
//! from per-agent counter-based ChaCha streams derived from the master
//! seed, which makes trajectories bit-identical regardless of thread
//! count. The pairwise interaction is O(U^2) in general with an O(U)
//! fast path when the influence is a gravity model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::model::{BeliefDomain, InitialCondition, Influence, ScenarioSpec};
use crate::numerics::{cumulative_trapezoid_from, linspace, piecewise_linear_integral};
use crate::{Error, Result};

/// Finite agent ensemble plus its deterministic noise streams.
#[derive(Debug, Clone)]
pub struct AgentEnsemble {
    pub spec: ScenarioSpec,
    pub personalities: Vec<f64>,
    pub beliefs: Vec<f64>,
    pub time: f64,
    pub seed: u64,
    rngs: Vec<ChaCha8Rng>,
    // Per-agent coefficient caches; the spec is immutable so these stay valid.
    alpha: Vec<f64>,
    prejudice: Vec<f64>,
    sup_alpha: f64,
    s_zeta: f64,
}

impl AgentEnsemble {
    pub fn len(&self) -> usize {
        self.beliefs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beliefs.is_empty()
    }

    pub fn mean_belief(&self) -> f64 {
        self.beliefs.iter().sum::<f64>() / self.len() as f64
    }

    pub fn belief_variance(&self) -> f64 {
        let m = self.mean_belief();
        self.beliefs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / self.len() as f64
    }

    pub fn max_abs_belief(&self) -> f64 {
        self.beliefs.iter().map(|x| x.abs()).fold(0.0f64, f64::max)
    }

    /// Mean prejudice of the sampled population; the conserved center of
    /// the dynamics when stubbornness is constant.
    pub fn sample_mean_prejudice(&self) -> f64 {
        self.prejudice.iter().sum::<f64>() / self.len() as f64
    }
}

/// Draws personalities i.i.d. from `rho0` by inverse CDF and places the
/// initial beliefs; bit-reproducible for a given seed.
pub fn init_ensemble(
    spec: &ScenarioSpec,
    agents: usize,
    seed: u64,
    init: InitialCondition,
) -> AgentEnsemble {
    assert!(agents >= 2, "need at least two agents");
    // Inverse CDF of rho0 on a fine personality sample.
    let (a, b) = spec.personality_domain;
    let nodes = linspace(a, b, 2001);
    let rho: Vec<f64> = nodes.iter().map(|&p| spec.rho0(p)).collect();
    let mut cdf = cumulative_trapezoid_from(&nodes, &rho, 0);
    let total = *cdf.last().unwrap();
    for c in &mut cdf {
        *c /= total;
    }
    let invert = |v: f64| -> f64 {
        let k = match cdf.binary_search_by(|c| c.partial_cmp(&v).unwrap()) {
            Ok(k) => return nodes[k],
            Err(0) => return nodes[0],
            Err(k) if k >= cdf.len() => return nodes[nodes.len() - 1],
            Err(k) => k - 1,
        };
        let dc = cdf[k + 1] - cdf[k];
        if dc <= f64::MIN_POSITIVE {
            nodes[k]
        } else {
            nodes[k] + (v - cdf[k]) / dc * (nodes[k + 1] - nodes[k])
        }
    };

    let mut personalities = Vec::with_capacity(agents);
    let mut beliefs = Vec::with_capacity(agents);
    let mut rngs = Vec::with_capacity(agents);
    for i in 0..agents {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64 + 1);
        let p = invert(rng.random::<f64>());
        let x = match init {
            InitialCondition::Prejudice => spec.u(p),
            InitialCondition::Gaussian { mean, var } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + var.sqrt() * z
            }
        };
        personalities.push(p);
        beliefs.push(x);
        rngs.push(rng);
    }
    let alpha: Vec<f64> = personalities.iter().map(|&p| spec.alpha(p)).collect();
    let prejudice: Vec<f64> = personalities.iter().map(|&p| spec.u(p)).collect();
    let sup_alpha = alpha.iter().copied().fold(0.0f64, f64::max);
    let s_zeta = spec.s_zeta();
    AgentEnsemble {
        spec: spec.clone(),
        personalities,
        beliefs,
        time: 0.0,
        seed,
        rngs,
        alpha,
        prejudice,
        sup_alpha,
        s_zeta,
    }
}

fn reflect(mut x: f64, min: f64, max: f64) -> f64 {
    for _ in 0..64 {
        if x < min {
            x = 2.0 * min - x;
        } else if x > max {
            x = 2.0 * max - x;
        } else {
            return x;
        }
    }
    x.clamp(min, max)
}

/// Pairwise interaction sums for every agent, in a fixed reduction order:
/// `sum_{j != i} zeta(|x_j - x_i|, p_i, p_j) (x_j - x_i)`, before the
/// `(1 - alpha) / U` scaling. Exposed for the fast-path equivalence
/// diagnostics.
pub fn interaction_sums(ens: &AgentEnsemble) -> Vec<f64> {
    let u_count = ens.len();
    let beliefs = &ens.beliefs;
    let ps = &ens.personalities;
    match &ens.spec.zeta {
        Influence::Zero => vec![0.0; u_count],
        Influence::Product { zeta1, zeta2 } => {
            // O(U): zeta1(p_i) [ sum_j zeta2(p_j)(x_j - x_i) ] with the
            // self term removed.
            let z2: Vec<f64> = ps.iter().map(|&p| zeta2.eval(p)).collect();
            let mut s0 = 0.0;
            let mut s1 = 0.0;
            for j in 0..u_count {
                s0 += z2[j];
                s1 += z2[j] * beliefs[j];
            }
            (0..u_count)
                .map(|i| {
                    let x = beliefs[i];
                    zeta1.eval(ps[i]) * ((s1 - z2[i] * x) - x * (s0 - z2[i]))
                })
                .collect()
        }
        _ => {
            let mut out = vec![0.0; u_count];
            out.par_iter_mut().enumerate().for_each(|(i, acc)| {
                let xi = beliefs[i];
                let pi = ps[i];
                let mut s = 0.0;
                for j in 0..u_count {
                    if j == i {
                        continue;
                    }
                    let dx = beliefs[j] - xi;
                    s += ens.spec.zeta(dx.abs(), pi, ps[j]) * dx;
                }
                *acc = s;
            });
            out
        }
    }
}

/// One synchronous Euler-Maruyama step.
pub fn mc_step(ens: &mut AgentEnsemble, dt: f64) -> Result<()> {
    if !(dt > 0.0) || dt * (ens.sup_alpha + ens.s_zeta) >= 0.5 {
        return Err(Error::StepTooLarge(format!(
            "dt (sup alpha + S_zeta) = {} must stay below 0.5",
            dt * (ens.sup_alpha + ens.s_zeta)
        )));
    }
    let u_count = ens.len();
    let inter = interaction_sums(ens);
    let sigma_dt = ens.spec.sigma() * dt.sqrt();
    let inv_u = 1.0 / u_count as f64;
    let bounds = match ens.spec.belief_domain {
        BeliefDomain::Compact { min, max } => Some((min, max)),
        BeliefDomain::UnboundedLine => None,
    };

    let beliefs = &ens.beliefs;
    let alpha = &ens.alpha;
    let prejudice = &ens.prejudice;
    let mut next = vec![0.0; u_count];
    next.par_iter_mut()
        .zip(ens.rngs.par_iter_mut())
        .enumerate()
        .for_each(|(i, (slot, rng))| {
            let x = beliefs[i];
            let a = alpha[i];
            let z: f64 = rng.sample(StandardNormal);
            let mut xn = x
                + (1.0 - a) * inv_u * inter[i] * dt
                + a * (prejudice[i] - x) * dt
                + sigma_dt * z;
            if let Some((lo, hi)) = bounds {
                xn = reflect(xn, lo, hi);
            }
            *slot = xn;
        });
    ens.beliefs = next;
    ens.time += dt;
    Ok(())
}

/// Normalized 2-D histogram of the ensemble over (personality, belief).
#[derive(Debug, Clone)]
pub struct EmpiricalHistogram {
    pub p_edges: Vec<f64>,
    pub x_edges: Vec<f64>,
    /// Row-major over personality bins; sums to 1.
    pub mass: Vec<f64>,
}

impl EmpiricalHistogram {
    pub fn p_bins(&self) -> usize {
        self.p_edges.len() - 1
    }

    pub fn x_bins(&self) -> usize {
        self.x_edges.len() - 1
    }

    pub fn bin_mass(&self, i: usize, j: usize) -> f64 {
        self.mass[i * self.x_bins() + j]
    }

    pub fn p_center(&self, i: usize) -> f64 {
        0.5 * (self.p_edges[i] + self.p_edges[i + 1])
    }

    pub fn x_center(&self, j: usize) -> f64 {
        0.5 * (self.x_edges[j] + self.x_edges[j + 1])
    }

    /// Belief-bin masses, summed over personalities.
    pub fn x_masses(&self) -> Vec<f64> {
        let xb = self.x_bins();
        let mut out = vec![0.0; xb];
        for i in 0..self.p_bins() {
            for j in 0..xb {
                out[j] += self.bin_mass(i, j);
            }
        }
        out
    }

    /// Accumulates another histogram with the same shape (for time
    /// averaging); the result is renormalized mass.
    pub fn accumulate(&mut self, other: &EmpiricalHistogram, weight: f64) {
        assert_eq!(self.mass.len(), other.mass.len());
        for (a, b) in self.mass.iter_mut().zip(&other.mass) {
            *a += weight * b;
        }
    }

    pub fn renormalize(&mut self) {
        let total: f64 = self.mass.iter().sum();
        if total > 0.0 {
            for m in &mut self.mass {
                *m /= total;
            }
        }
    }

    /// L1 distance between this histogram's belief masses and a density
    /// marginal sampled on `x_nodes` (piecewise-linear), integrated over
    /// the same bins.
    pub fn l1_vs_marginal(&self, x_nodes: &[f64], marginal: &[f64]) -> f64 {
        let masses = self.x_masses();
        let mut acc = 0.0;
        for j in 0..self.x_bins() {
            let expected =
                piecewise_linear_integral(x_nodes, marginal, self.x_edges[j], self.x_edges[j + 1]);
            acc += (masses[j] - expected).abs();
        }
        acc
    }
}

/// Normalized 2-D histogram over the scenario's declared domains; samples
/// outside the range land in the edge bins so the mass is exactly 1.
pub fn empirical_density(ens: &AgentEnsemble, p_bins: usize, x_bins: usize) -> EmpiricalHistogram {
    assert!(p_bins >= 1 && x_bins >= 1);
    let (p_lo, p_hi) = ens.spec.personality_domain;
    let (x_lo, x_hi) = match ens.spec.belief_domain {
        BeliefDomain::Compact { min, max } => (min, max),
        BeliefDomain::UnboundedLine => ens.spec.truncated_belief_interval(),
    };
    let p_edges = linspace(p_lo, p_hi, p_bins + 1);
    let x_edges = linspace(x_lo, x_hi, x_bins + 1);
    let mut counts = vec![0u64; p_bins * x_bins];
    let bin_of = |v: f64, lo: f64, hi: f64, n: usize| -> usize {
        let t = ((v - lo) / (hi - lo) * n as f64).floor();
        (t.max(0.0) as usize).min(n - 1)
    };
    for k in 0..ens.len() {
        let i = bin_of(ens.personalities[k], p_lo, p_hi, p_bins);
        let j = bin_of(ens.beliefs[k], x_lo, x_hi, x_bins);
        counts[i * x_bins + j] += 1;
    }
    let inv = 1.0 / ens.len() as f64;
    EmpiricalHistogram {
        p_edges,
        x_edges,
        mass: counts.iter().map(|&c| c as f64 * inv).collect(),
    }
}

/// Time series captured by [`mc_run`].
#[derive(Debug, Clone)]
pub struct McTrajectory {
    pub times: Vec<f64>,
    pub mean_belief: Vec<f64>,
    pub belief_variance: Vec<f64>,
    pub max_abs_belief: Vec<f64>,
    pub histograms: Vec<(f64, EmpiricalHistogram)>,
}

/// Steps the ensemble to `t_final`, capturing summary statistics and a
/// histogram every `record_every` steps (and at the start and end).
pub fn mc_run(
    ens: &mut AgentEnsemble,
    t_final: f64,
    dt: f64,
    record_every: usize,
    p_bins: usize,
    x_bins: usize,
) -> Result<McTrajectory> {
    assert!(record_every >= 1);
    let steps = (t_final / dt).round().max(1.0) as usize;
    let mut traj = McTrajectory {
        times: Vec::new(),
        mean_belief: Vec::new(),
        belief_variance: Vec::new(),
        max_abs_belief: Vec::new(),
        histograms: Vec::new(),
    };
    let record = |ens: &AgentEnsemble, traj: &mut McTrajectory| {
        traj.times.push(ens.time);
        traj.mean_belief.push(ens.mean_belief());
        traj.belief_variance.push(ens.belief_variance());
        traj.max_abs_belief.push(ens.max_abs_belief());
        traj.histograms
            .push((ens.time, empirical_density(ens, p_bins, x_bins)));
    };
    record(ens, &mut traj);
    for k in 1..=steps {
        mc_step(ens, dt)?;
        if k % record_every == 0 || k == steps {
            record(ens, &mut traj);
        }
    }
    Ok(traj)
}

/// Sign check of the noise-free drift at the belief extremes.
#[derive(Debug, Clone, Copy)]
pub struct DriftDiagnostic {
    pub max_abs_belief: f64,
    /// Drift of the agent holding the largest belief.
    pub drift_at_max: f64,
    /// Drift of the agent holding the smallest belief.
    pub drift_at_min: f64,
}

/// Computes the deterministic part of the increment for the agents at the
/// extreme beliefs; with `inf alpha > 0` the drift points inward once the
/// belief leaves a compact set.
pub fn drift_diagnostic(ens: &AgentEnsemble) -> DriftDiagnostic {
    let inter = interaction_sums(ens);
    let inv_u = 1.0 / ens.len() as f64;
    let drift = |i: usize| {
        (1.0 - ens.alpha[i]) * inv_u * inter[i] + ens.alpha[i] * (ens.prejudice[i] - ens.beliefs[i])
    };
    let mut i_max = 0;
    let mut i_min = 0;
    for (i, &x) in ens.beliefs.iter().enumerate() {
        if x > ens.beliefs[i_max] {
            i_max = i;
        }
        if x < ens.beliefs[i_min] {
            i_min = i;
        }
    }
    DriftDiagnostic {
        max_abs_belief: ens.max_abs_belief(),
        drift_at_max: drift(i_max),
        drift_at_min: drift(i_min),
    }
}
