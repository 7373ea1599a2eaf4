//! CSV serialization of densities, marginals, interaction-field paths and
//! simulation time series.
//!
//! All writers emit UTF-8 with LF line endings and 17-significant-digit
//! floats, so files round-trip exactly and repeated runs are byte
//! identical. The density reader accepts any strictly increasing node
//! sets and rebuilds trapezoid weights, rejecting malformed, non-finite
//! or negative input; it is exercised directly by the fuzz targets.

use std::fmt::Write as _;

use crate::mcsim::McTrajectory;
use crate::numerics::{DensityField, Grid};
use crate::transient::PhiPath;
use crate::{Error, Result};

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// `p,x,rho` rows, row-major over the personality nodes.
pub fn density_to_csv(field: &DensityField) -> String {
    let grid = &field.grid;
    let mut out = String::with_capacity(grid.np() * grid.nx() * 60);
    out.push_str("p,x,rho\n");
    for (i, &p) in grid.p_nodes.iter().enumerate() {
        let p_s = fmt_float(p);
        for (j, &x) in grid.x_nodes.iter().enumerate() {
            let _ = writeln!(out, "{p_s},{},{}", fmt_float(x), fmt_float(field.value(i, j)));
        }
    }
    out
}

/// Parses a density CSV produced by [`density_to_csv`] (or compatible):
/// exact header `p,x,rho`, complete row-major blocks, finite nonnegative
/// densities.
pub fn density_from_csv(text: &str) -> Result<DensityField> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == "p,x,rho" => {}
        other => {
            return Err(Error::Csv(format!(
                "expected header 'p,x,rho', got {other:?}"
            )))
        }
    }
    let mut p_nodes: Vec<f64> = Vec::new();
    let mut x_nodes: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut x_index = 0usize;
    let mut first_block_done = false;

    for (lineno, line) in lines.enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let (p, x, rho) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(p), Some(x), Some(r), None) => (p, x, r),
            _ => {
                return Err(Error::Csv(format!(
                    "line {}: expected 3 comma-separated fields",
                    lineno + 2
                )))
            }
        };
        let parse = |s: &str, what: &str| -> Result<f64> {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|_| Error::Csv(format!("line {}: bad {what} '{s}'", lineno + 2)))?;
            if !v.is_finite() {
                return Err(Error::Csv(format!(
                    "line {}: non-finite {what}",
                    lineno + 2
                )));
            }
            Ok(v)
        };
        let p = parse(p, "p")?;
        let x = parse(x, "x")?;
        let rho = parse(rho, "rho")?;
        if rho < 0.0 {
            return Err(Error::Csv(format!(
                "line {}: negative density {rho}",
                lineno + 2
            )));
        }

        let new_block = match p_nodes.last() {
            None => true,
            Some(&last) => p != last,
        };
        if new_block {
            if let Some(&last) = p_nodes.last() {
                // finished a block: it must have covered all x nodes
                if x_index != x_nodes.len() {
                    return Err(Error::Csv(format!(
                        "block p = {last} has {x_index} rows, expected {}",
                        x_nodes.len()
                    )));
                }
                first_block_done = true;
                if p <= last {
                    return Err(Error::Csv(
                        "personality nodes must be strictly increasing".into(),
                    ));
                }
            }
            p_nodes.push(p);
            x_index = 0;
        }
        if !first_block_done {
            if let Some(&last) = x_nodes.last() {
                if x <= last {
                    return Err(Error::Csv(
                        "belief nodes must be strictly increasing".into(),
                    ));
                }
            }
            x_nodes.push(x);
        } else {
            if x_index >= x_nodes.len() {
                return Err(Error::Csv(format!(
                    "block p = {p} has more rows than the first block"
                )));
            }
            if x != x_nodes[x_index] {
                return Err(Error::Csv(format!(
                    "belief nodes differ between blocks ({x} vs {})",
                    x_nodes[x_index]
                )));
            }
        }
        x_index += 1;
        values.push(rho);
    }
    if x_index != x_nodes.len() {
        return Err(Error::Csv("last personality block is incomplete".into()));
    }
    let grid = Grid::from_nodes(p_nodes, x_nodes)?;
    DensityField::from_values(grid, values)
}

/// `x,rho` marginal rows.
pub fn marginal_to_csv(x_nodes: &[f64], values: &[f64]) -> String {
    let mut out = String::from("x,rho\n");
    for (x, v) in x_nodes.iter().zip(values) {
        let _ = writeln!(out, "{},{}", fmt_float(*x), fmt_float(*v));
    }
    out
}

/// `t,p,phi` rows, time-major.
pub fn phi_path_to_csv(path: &PhiPath, thin_to: usize) -> String {
    let mut out = String::from("t,p,phi\n");
    let stride = (path.nt() / thin_to.max(1)).max(1);
    for k in (0..path.nt()).step_by(stride) {
        let t_s = fmt_float(path.t_nodes[k]);
        for (i, &p) in path.p_nodes.iter().enumerate() {
            let _ = writeln!(out, "{t_s},{},{}", fmt_float(p), fmt_float(path.value(i, k)));
        }
    }
    out
}

/// `t,stat_name,value` rows for the Monte Carlo summaries.
pub fn trajectory_to_csv(traj: &McTrajectory) -> String {
    let mut out = String::from("t,stat_name,value\n");
    for (k, &t) in traj.times.iter().enumerate() {
        let t_s = fmt_float(t);
        let _ = writeln!(out, "{t_s},mean_belief,{}", fmt_float(traj.mean_belief[k]));
        let _ = writeln!(
            out,
            "{t_s},belief_variance,{}",
            fmt_float(traj.belief_variance[k])
        );
        let _ = writeln!(
            out,
            "{t_s},max_abs_belief,{}",
            fmt_float(traj.max_abs_belief[k])
        );
    }
    out
}

/// `t,p_bin_center,x_bin_center,mass` rows for histogram snapshots.
pub fn histograms_to_csv(traj: &McTrajectory) -> String {
    let mut out = String::from("t,p_bin_center,x_bin_center,mass\n");
    for (t, h) in &traj.histograms {
        let t_s = fmt_float(*t);
        for i in 0..h.p_bins() {
            for j in 0..h.x_bins() {
                let _ = writeln!(
                    out,
                    "{t_s},{},{},{}",
                    fmt_float(h.p_center(i)),
                    fmt_float(h.x_center(j)),
                    fmt_float(h.bin_mass(i, j))
                );
            }
        }
    }
    out
}

/// `t,x,rho_marginal` rows: the belief marginal over time.
pub fn marginal_series_to_csv(samples: &[(f64, Vec<f64>)], x_nodes: &[f64]) -> String {
    let mut out = String::from("t,x,rho_marginal\n");
    for (t, marg) in samples {
        let t_s = fmt_float(*t);
        for (x, v) in x_nodes.iter().zip(marg) {
            let _ = writeln!(out, "{t_s},{},{}", fmt_float(*x), fmt_float(*v));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linspace;
    use proptest::prelude::*;

    fn sample_field() -> DensityField {
        let grid = Grid::from_nodes(linspace(-1.0, 1.0, 5), linspace(-2.0, 2.0, 7)).unwrap();
        DensityField::tabulate(grid, |p, x| (1.0 + p).abs() * (-x * x).exp())
    }

    #[test]
    fn density_round_trips_exactly() {
        let f = sample_field();
        let text = density_to_csv(&f);
        let g = density_from_csv(&text).unwrap();
        assert_eq!(f.grid.p_nodes, g.grid.p_nodes);
        assert_eq!(f.grid.x_nodes, g.grid.x_nodes);
        assert_eq!(f.values(), g.values());
        // writing again gives identical bytes
        assert_eq!(text, density_to_csv(&g));
    }

    #[test]
    fn reader_rejects_malformed_input() {
        for bad in [
            "",
            "a,b\n",
            "p,x,rho\n1,2\n",
            "p,x,rho\n1,2,3,4\n",
            "p,x,rho\nnan,0,0\n",
            "p,x,rho\n0,0,-1\n",
            "p,x,rho\n0,0,inf\n",
            // non-increasing x nodes
            "p,x,rho\n0,1,0\n0,1,0\n",
            // inconsistent block lengths
            "p,x,rho\n0,0,1\n0,1,1\n1,0,1\n",
            // p decreasing
            "p,x,rho\n1,0,1\n1,1,1\n0,0,1\n0,1,1\n",
        ] {
            assert!(density_from_csv(bad).is_err(), "accepted: {bad:?}");
        }
    }

    #[test]
    fn reader_accepts_tiny_valid_grid() {
        let text = "p,x,rho\n\
            0,0,1\n0,1,1\n0,2,1\n\
            1,0,1\n1,1,1\n1,2,1\n\
            2,0,1\n2,1,1\n2,2,1\n";
        let f = density_from_csv(text).unwrap();
        assert_eq!(f.grid.np(), 3);
        assert_eq!(f.grid.nx(), 3);
        assert!((f.mass() - 4.0).abs() < 1e-12);
    }

    proptest! {
        /// Round trip: parse(write(f)) reproduces values bit for bit.
        #[test]
        fn roundtrip_property(seed in 0u64..500) {
            let grid = Grid::from_nodes(linspace(-1.0, 1.0, 4), linspace(0.0, 1.0, 5)).unwrap();
            let f = DensityField::tabulate(grid, |p, x| {
                ((seed as f64 + 1.0) * (p + 2.0) * (x + 1.5)).fract().abs()
            });
            let g = density_from_csv(&density_to_csv(&f)).unwrap();
            prop_assert_eq!(f.values(), g.values());
        }
    }
}
