//! Grids, quadrature, special functions and dense linear algebra shared by
//! the solvers.
//!
//! Everything here is deliberately plain: uniform nodes, trapezoidal
//! weights, LU with partial pivoting. The densities the solvers manipulate
//! are smooth, so composite trapezoid quadrature on a sufficiently fine
//! uniform grid is accurate and keeps every operation composable.

use crate::model::{BeliefDomain, ScenarioSpec};
use crate::{Error, Result};

/// Tensor discretization of the (personality, belief) space with
/// trapezoidal quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub p_nodes: Vec<f64>,
    pub x_nodes: Vec<f64>,
    pub p_weights: Vec<f64>,
    pub x_weights: Vec<f64>,
}

impl Grid {
    /// Builds a grid from explicit node lists; weights are the trapezoid
    /// rule for whatever (strictly increasing) spacing the nodes have.
    pub fn from_nodes(p_nodes: Vec<f64>, x_nodes: Vec<f64>) -> Result<Grid> {
        if p_nodes.len() < 3 || x_nodes.len() < 3 {
            return Err(Error::GridTooCoarse {
                np: p_nodes.len(),
                nx: x_nodes.len(),
            });
        }
        for nodes in [&p_nodes, &x_nodes] {
            if !nodes.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidCoefficient("non-finite grid node".into()));
            }
            if nodes.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidCoefficient(
                    "grid nodes must be strictly increasing".into(),
                ));
            }
        }
        let p_weights = trapezoid_weights(&p_nodes);
        let x_weights = trapezoid_weights(&x_nodes);
        Ok(Grid {
            p_nodes,
            x_nodes,
            p_weights,
            x_weights,
        })
    }

    pub fn np(&self) -> usize {
        self.p_nodes.len()
    }

    pub fn nx(&self) -> usize {
        self.x_nodes.len()
    }

    /// Index of the belief node closest to 0; anchor for cumulative
    /// integrals whose constant offset is absorbed by normalization.
    pub fn x_anchor(&self) -> usize {
        let mut best = 0;
        for (j, x) in self.x_nodes.iter().enumerate() {
            if x.abs() < self.x_nodes[best].abs() {
                best = j;
            }
        }
        best
    }

    pub fn x_spacing_min(&self) -> f64 {
        self.x_nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Uniform grid over the scenario's domains. Unbounded belief domains are
/// truncated to the interval where the stationary Gaussian tails carry
/// negligible mass (see [`ScenarioSpec::truncated_belief_interval`]).
pub fn make_grid(spec: &ScenarioSpec, np: usize, nx: usize) -> Result<Grid> {
    if np < 3 || nx < 3 {
        return Err(Error::GridTooCoarse { np, nx });
    }
    let (p_lo, p_hi) = spec.personality_domain;
    if !(p_hi - p_lo).is_finite() || p_hi <= p_lo {
        return Err(Error::DomainEmpty(format!(
            "personality domain [{p_lo}, {p_hi}]"
        )));
    }
    let (x_lo, x_hi) = match spec.belief_domain {
        BeliefDomain::Compact { min, max } => (min, max),
        BeliefDomain::UnboundedLine => spec.truncated_belief_interval(),
    };
    if !(x_hi - x_lo).is_finite() || x_hi <= x_lo {
        return Err(Error::DomainEmpty(format!("belief domain [{x_lo}, {x_hi}]")));
    }
    Grid::from_nodes(linspace(p_lo, p_hi, np), linspace(x_lo, x_hi, nx))
}

/// Uniform nodes including both endpoints.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + i as f64 * h })
        .collect()
}

/// Composite trapezoid weights for arbitrary strictly increasing nodes.
pub fn trapezoid_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let h = nodes[i + 1] - nodes[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

/// Weighted sum with a fixed left-to-right order, so results are
/// reproducible bit-for-bit regardless of caller parallelism.
pub fn dot(weights: &[f64], values: &[f64]) -> f64 {
    debug_assert_eq!(weights.len(), values.len());
    let mut acc = 0.0;
    for (w, v) in weights.iter().zip(values) {
        acc += w * v;
    }
    acc
}

/// Cumulative trapezoid integral of `values` sampled at `nodes`, anchored
/// so the result is exactly 0 at `anchor`.
pub fn cumulative_trapezoid_from(nodes: &[f64], values: &[f64], anchor: usize) -> Vec<f64> {
    let n = nodes.len();
    debug_assert_eq!(values.len(), n);
    debug_assert!(anchor < n);
    let mut out = vec![0.0; n];
    for j in anchor + 1..n {
        let h = nodes[j] - nodes[j - 1];
        out[j] = out[j - 1] + 0.5 * h * (values[j] + values[j - 1]);
    }
    for j in (0..anchor).rev() {
        let h = nodes[j + 1] - nodes[j];
        out[j] = out[j + 1] - 0.5 * h * (values[j] + values[j + 1]);
    }
    out
}

/// Error function, accurate to better than 1e-15 absolute.
pub fn erf_eval(z: f64) -> f64 {
    libm::erf(z)
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf_eval(z * std::f64::consts::FRAC_1_SQRT_2))
}

/// Normal density with mean `m` and variance `v`.
pub fn normal_pdf(x: f64, m: f64, v: f64) -> f64 {
    let d = x - m;
    (-d * d / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt()
}

// ---------------------------------------------------------------------------
// Dense linear algebra
// ---------------------------------------------------------------------------

/// Dense square matrix, row-major.
#[derive(Debug, Clone)]
pub struct Matrix {
    pub n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Matrix {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n);
        let mut out = vec![0.0; self.n];
        for i in 0..self.n {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            out[i] = dot(row, v);
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// LU factorization with partial pivoting, reusable across right-hand
/// sides (the Volterra march solves the same system every step).
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: Matrix,
    perm: Vec<usize>,
}

/// Pivots smaller than this fraction of the matrix scale are treated as
/// singular.
const PIVOT_TOL: f64 = 1e-14;

pub fn lu_factor(a: &Matrix) -> Result<LuFactors> {
    let n = a.n;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    // Scale for the singularity test: the largest row infinity-norm.
    let scale = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| a[(i, j)].abs())
                .fold(0.0f64, f64::max)
        })
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = lu[(col, col)].abs();
        for r in col + 1..n {
            let v = lu[(r, col)].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if !pivot_val.is_finite() || pivot_val < PIVOT_TOL * scale {
            return Err(Error::SingularMatrix {
                col,
                pivot: pivot_val,
            });
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = lu[(col, j)];
                lu[(col, j)] = lu[(pivot_row, j)];
                lu[(pivot_row, j)] = tmp;
            }
            perm.swap(col, pivot_row);
        }
        let d = lu[(col, col)];
        for r in col + 1..n {
            let f = lu[(r, col)] / d;
            lu[(r, col)] = f;
            for j in col + 1..n {
                let v = lu[(col, j)];
                lu[(r, j)] -= f * v;
            }
        }
    }
    Ok(LuFactors { lu, perm })
}

impl LuFactors {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.n;
        debug_assert_eq!(b.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = b[self.perm[i]];
            for j in 0..i {
                acc -= self.lu[(i, j)] * y[j];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc -= self.lu[(i, j)] * y[j];
            }
            y[i] = acc / self.lu[(i, i)];
        }
        y
    }
}

/// Solves `A x = b` by LU with partial pivoting.
pub fn solve_dense(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    Ok(lu_factor(a)?.solve(b))
}

// ---------------------------------------------------------------------------
// Density fields
// ---------------------------------------------------------------------------

/// `rho(p, x)` sampled on a [`Grid`], row-major over personality.
#[derive(Debug, Clone)]
pub struct DensityField {
    pub grid: Grid,
    values: Vec<f64>,
}

impl DensityField {
    pub fn zeros(grid: Grid) -> DensityField {
        let n = grid.np() * grid.nx();
        DensityField {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn constant(grid: Grid, v: f64) -> DensityField {
        let n = grid.np() * grid.nx();
        DensityField {
            grid,
            values: vec![v; n],
        }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<DensityField> {
        if values.len() != grid.np() * grid.nx() {
            return Err(Error::InvalidCoefficient(format!(
                "field shape mismatch: {} values for a {}x{} grid",
                values.len(),
                grid.np(),
                grid.nx()
            )));
        }
        Ok(DensityField { grid, values })
    }

    /// Evaluates `f(p, x)` at every node.
    pub fn tabulate(grid: Grid, f: impl Fn(f64, f64) -> f64) -> DensityField {
        let mut values = Vec::with_capacity(grid.np() * grid.nx());
        for &p in &grid.p_nodes {
            for &x in &grid.x_nodes {
                values.push(f(p, x));
            }
        }
        DensityField { grid, values }
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.nx() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let nx = self.grid.nx();
        &self.values[i * nx..(i + 1) * nx]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let nx = self.grid.nx();
        &mut self.values[i * nx..(i + 1) * nx]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows_mut(&mut self) -> std::slice::ChunksMut<'_, f64> {
        self.values.chunks_mut(self.grid.nx())
    }

    /// Belief integral of one personality slice.
    pub fn integrate_x(&self, p_index: usize) -> f64 {
        dot(&self.grid.x_weights, self.row(p_index))
    }

    /// First belief moment of one personality slice.
    pub fn first_moment_x(&self, p_index: usize) -> f64 {
        let row = self.row(p_index);
        let mut acc = 0.0;
        for j in 0..self.grid.nx() {
            acc += self.grid.x_weights[j] * self.grid.x_nodes[j] * row[j];
        }
        acc
    }

    /// Marginal over personality: `rho(x) = integral rho(p, x) dp`.
    pub fn belief_marginal(&self) -> Vec<f64> {
        let nx = self.grid.nx();
        let mut out = vec![0.0; nx];
        for i in 0..self.grid.np() {
            let w = self.grid.p_weights[i];
            let row = self.row(i);
            for j in 0..nx {
                out[j] += w * row[j];
            }
        }
        out
    }

    /// Marginal over belief per personality node.
    pub fn personality_marginal(&self) -> Vec<f64> {
        (0..self.grid.np()).map(|i| self.integrate_x(i)).collect()
    }

    pub fn mass(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.grid.np() {
            acc += self.grid.p_weights[i] * self.integrate_x(i);
        }
        acc
    }

    /// Scales the field to unit total mass. A mass already within 1e-12 of
    /// 1 is left untouched, which makes normalization exactly idempotent.
    pub fn normalize(&mut self) -> Result<()> {
        let m = self.mass();
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::InvalidCoefficient(format!(
                "cannot normalize field with mass {m}"
            )));
        }
        if (m - 1.0).abs() <= 1e-12 {
            return Ok(());
        }
        for v in &mut self.values {
            *v /= m;
        }
        Ok(())
    }

    /// Quadrature L1 distance; both fields must share the grid.
    pub fn l1_distance(&self, other: &DensityField) -> f64 {
        assert_eq!(
            self.grid, other.grid,
            "L1 distance requires a shared grid"
        );
        let mut acc = 0.0;
        for i in 0..self.grid.np() {
            let wp = self.grid.p_weights[i];
            let a = self.row(i);
            let b = other.row(i);
            let mut slice = 0.0;
            for j in 0..self.grid.nx() {
                slice += self.grid.x_weights[j] * (a[j] - b[j]).abs();
            }
            acc += wp * slice;
        }
        acc
    }
}

/// L1 distance between two functions of x sampled on shared nodes.
pub fn l1_distance_1d(x_weights: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for j in 0..a.len() {
        acc += x_weights[j] * (a[j] - b[j]).abs();
    }
    acc
}

/// Integral of a piecewise-linear function (given by nodes/values) over
/// `[lo, hi]`. Used to project solver marginals onto histogram bins.
pub fn piecewise_linear_integral(nodes: &[f64], values: &[f64], lo: f64, hi: f64) -> f64 {
    debug_assert!(lo <= hi);
    let n = nodes.len();
    if hi <= nodes[0] || lo >= nodes[n - 1] {
        return 0.0;
    }
    let lo = lo.max(nodes[0]);
    let hi = hi.min(nodes[n - 1]);
    let value_at = |x: f64, k: usize| -> f64 {
        let t = (x - nodes[k]) / (nodes[k + 1] - nodes[k]);
        values[k] + t * (values[k + 1] - values[k])
    };
    let mut acc = 0.0;
    for k in 0..n - 1 {
        let a = nodes[k].max(lo);
        let b = nodes[k + 1].min(hi);
        if b <= a {
            continue;
        }
        acc += 0.5 * (b - a) * (value_at(a, k) + value_at(b, k));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent oracle: Taylor series of erf summed to convergence.
    /// erf(z) = 2/sqrt(pi) * sum (-1)^n z^(2n+1) / (n! (2n+1))
    fn erf_taylor(z: f64) -> f64 {
        let mut term = z;
        let mut sum = z;
        let mut n = 0usize;
        loop {
            n += 1;
            term *= -z * z / n as f64;
            let inc = term / (2 * n + 1) as f64;
            sum += inc;
            if inc.abs() < 1e-18 {
                break;
            }
        }
        2.0 / std::f64::consts::PI.sqrt() * sum
    }

    #[test]
    fn erf_at_zero_and_limits() {
        assert_eq!(erf_eval(0.0), 0.0);
        assert!((erf_eval(10.0) - 1.0).abs() < 1e-12);
        assert!((erf_eval(-10.0) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn erf_matches_taylor_oracle() {
        // Frozen value from the series oracle.
        assert!((erf_taylor(1.0) - 0.8427007929497149).abs() < 1e-15);
        assert!((erf_eval(1.0) - 0.8427007929497149).abs() < 1e-12);
        for z in [-2.5, -1.0, -0.3, 0.1, 0.7, 1.9, 3.0] {
            assert!(
                (erf_eval(z) - erf_taylor(z)).abs() < 1e-12,
                "erf mismatch at {z}"
            );
        }
    }

    #[test]
    fn trapezoid_weights_uniform_three_nodes() {
        let w = trapezoid_weights(&[0.0, 1.0, 2.0]);
        assert_eq!(w, vec![0.5, 1.0, 0.5]);
    }

    #[test]
    fn grid_shape_and_anchor() {
        let g = Grid::from_nodes(linspace(-1.0, 1.0, 3), linspace(-2.0, 2.0, 5)).unwrap();
        assert_eq!(g.p_nodes, vec![-1.0, 0.0, 1.0]);
        assert!((g.x_nodes[1] - g.x_nodes[0] - 1.0).abs() < 1e-15);
        assert_eq!(g.x_anchor(), 2);
        // weights sum to the domain length
        assert!((g.p_weights.iter().sum::<f64>() - 2.0).abs() < 1e-12);
        assert!((g.x_weights.iter().sum::<f64>() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn grid_rejects_too_few_nodes() {
        let err = Grid::from_nodes(vec![0.0, 1.0], linspace(0.0, 1.0, 5)).unwrap_err();
        assert!(matches!(err, Error::GridTooCoarse { np: 2, .. }));
    }

    #[test]
    fn cumulative_trapezoid_anchored() {
        // f(x) = 2x on [-1, 1]; integral from 0 is x^2 (trapezoid exact for linear f).
        let nodes = linspace(-1.0, 1.0, 201);
        let vals: Vec<f64> = nodes.iter().map(|x| 2.0 * x).collect();
        let anchor = 100;
        assert_eq!(nodes[anchor], 0.0);
        let cum = cumulative_trapezoid_from(&nodes, &vals, anchor);
        for (j, &x) in nodes.iter().enumerate() {
            assert!((cum[j] - x * x).abs() < 1e-14, "at {x}: {}", cum[j]);
        }
    }

    #[test]
    fn integrate_x_constant_field() {
        let g = Grid::from_nodes(linspace(-1.0, 1.0, 11), linspace(-1.0, 1.0, 21)).unwrap();
        let f = DensityField::constant(g, 0.25);
        for i in 0..11 {
            assert!((f.integrate_x(i) - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn integrate_x_delta_column() {
        let g = Grid::from_nodes(linspace(-1.0, 1.0, 5), linspace(-1.0, 1.0, 9)).unwrap();
        let mut f = DensityField::zeros(g);
        f.row_mut(2)[4] = 3.0;
        let w = f.grid.x_weights[4];
        assert!((f.integrate_x(2) - 3.0 * w).abs() < 1e-15);
    }

    #[test]
    fn integrate_x_gaussian_column_matches_erf_difference() {
        // Column holds a normal pdf; quadrature over [-8, 8] with dense nodes
        // must match the CDF difference of the interval.
        let g = Grid::from_nodes(linspace(-1.0, 1.0, 3), linspace(-8.0, 8.0, 2001)).unwrap();
        let s2 = 0.7;
        let mut f = DensityField::zeros(g);
        let xs = f.grid.x_nodes.clone();
        for (j, &x) in xs.iter().enumerate() {
            f.row_mut(0)[j] = normal_pdf(x, 0.0, s2);
        }
        let expected = normal_cdf(8.0 / s2.sqrt()) - normal_cdf(-8.0 / s2.sqrt());
        assert!((f.integrate_x(0) - expected).abs() < 1e-6);
        assert!((f.integrate_x(0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn solve_dense_identity_and_diagonal() {
        let id = Matrix::identity(3);
        let x = solve_dense(&id, &[1.0, -2.0, 3.5]).unwrap();
        assert_eq!(x, vec![1.0, -2.0, 3.5]);

        let mut d = Matrix::zeros(2);
        d[(0, 0)] = 2.0;
        d[(1, 1)] = 4.0;
        let x = solve_dense(&d, &[2.0, 8.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15);
        assert!((x[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn solve_dense_recovers_known_solution() {
        // Well-conditioned random-ish 20x20 system built from a known x.
        let n = 20;
        let mut a = Matrix::zeros(n);
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = next();
            }
            a[(i, i)] += n as f64; // diagonally dominant
        }
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 - 7.5) / 3.0).collect();
        let b = a.matvec(&x_true);
        let x = solve_dense(&a, &b).unwrap();
        let err = x
            .iter()
            .zip(&x_true)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(err < 1e-9, "recovery error {err}");
    }

    #[test]
    fn solve_dense_flags_singular() {
        let mut a = Matrix::zeros(2);
        a[(0, 0)] = 1.0;
        a[(0, 1)] = 2.0;
        a[(1, 0)] = 2.0;
        a[(1, 1)] = 4.0;
        assert!(matches!(
            solve_dense(&a, &[1.0, 2.0]),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn normalize_is_idempotent_within_one_ulp() {
        let g = Grid::from_nodes(linspace(-1.0, 1.0, 31), linspace(-2.0, 2.0, 41)).unwrap();
        let mut f = DensityField::tabulate(g, |p, x| (1.0 + p * p) * (-x * x).exp());
        f.normalize().unwrap();
        let once = f.values().to_vec();
        f.normalize().unwrap();
        assert_eq!(once, f.values(), "renormalization changed entries");
        assert!((f.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn piecewise_linear_integral_exact_on_segments() {
        let nodes = [0.0, 1.0, 2.0];
        let values = [0.0, 2.0, 0.0];
        assert!((piecewise_linear_integral(&nodes, &values, 0.0, 2.0) - 2.0).abs() < 1e-15);
        assert!((piecewise_linear_integral(&nodes, &values, 0.5, 1.5) - 1.5).abs() < 1e-15);
        assert!((piecewise_linear_integral(&nodes, &values, -5.0, 0.0)).abs() < 1e-15);
    }

    proptest! {
        /// Trapezoid quadrature of a quadratic on >= 1001 uniform nodes is
        /// accurate to 1e-6 relative.
        #[test]
        fn trapezoid_quadratic_accuracy(a in -1.0f64..1.0, b in -1.0f64..1.0, c in 1.5f64..3.0) {
            let nodes = linspace(-1.0, 1.0, 1001);
            let w = trapezoid_weights(&nodes);
            let vals: Vec<f64> = nodes.iter().map(|&x| a * x * x + b * x + c).collect();
            let num = dot(&w, &vals);
            let exact = 2.0 * a / 3.0 + 2.0 * c;
            prop_assert!((num - exact).abs() <= 1e-6 * exact.abs());
        }

        /// Normalizing any positive field yields unit mass; renormalizing
        /// changes nothing beyond 1 ulp.
        #[test]
        fn normalize_unit_mass(seed in 0u64..1000) {
            let g = Grid::from_nodes(linspace(-1.0, 1.0, 11), linspace(-1.0, 1.0, 17)).unwrap();
            let mut f = DensityField::tabulate(g, |p, x| {
                1.0 + 0.5 * ((seed as f64 * 0.01 + p * 3.0 + x * 7.0).sin()).abs()
            });
            f.normalize().unwrap();
            prop_assert!((f.mass() - 1.0).abs() < 1e-8);
        }
    }
}
