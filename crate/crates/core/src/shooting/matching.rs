//! Propagation of solution subspaces with periodic re-orthonormalization.

use nalgebra::DMatrix;

use super::asymptotic::{growth_bound, orthonormalize};
use crate::ode::{integrate, DenseStep, OdeOptions};
use crate::radial::RadialSystem;
use crate::Result;

/// One leg between checkpoints: columns start orthonormal and end as `Q R`.
#[derive(Debug, Clone)]
pub(crate) struct Segment {
    pub r_factor: DMatrix<f64>,
    pub steps: Vec<DenseStep>,
}

#[derive(Debug, Clone)]
pub(crate) struct Sweep {
    /// R of the initial orthonormalization.
    pub r_initial: DMatrix<f64>,
    pub segments: Vec<Segment>,
    /// Orthonormal columns at the end point.
    pub q_end: DMatrix<f64>,
}

/// Checkpoints from `from` to `to` (excluded, included), spaced by growth.
pub(crate) fn checkpoints(system: &RadialSystem, e: f64, from: f64, to: f64) -> Vec<f64> {
    let outward = to > from;
    let mut out = Vec::new();
    let mut r = from;
    loop {
        let g = growth_bound(system, e, r).max(1e-300);
        let geometric = if outward { 0.5 * r } else { r / 3.0 };
        let step = geometric.min(4.0 / g).max(1e-12 * r);
        let next = if outward { r + step } else { r - step };
        if (outward && next >= to * (1.0 - 1e-12)) || (!outward && next <= to * (1.0 + 1e-12)) {
            out.push(to);
            return out;
        }
        out.push(next);
        r = next;
    }
}

/// Integrates the columns of `y0` from `from` through `points`.
pub(crate) fn sweep(
    system: &RadialSystem,
    e: f64,
    y0: DMatrix<f64>,
    from: f64,
    points: &[f64],
    opt: &OdeOptions,
) -> Result<Sweep> {
    let (mut q, r_initial) = orthonormalize(y0);
    let d = q.nrows();
    let k = q.ncols();
    let mut segments = Vec::with_capacity(points.len());
    let mut start = from;
    for &end in points {
        let mut steps = Vec::new();
        let (y, _) = integrate(
            |r, y, dy| system.rhs(r, e, y, dy),
            start,
            q.as_slice(),
            end,
            opt,
            |s| {
                if opt.dense {
                    steps.push(s.clone());
                }
            },
        )?;
        let (q_new, r_factor) = orthonormalize(DMatrix::from_column_slice(d, k, &y));
        q = q_new;
        segments.push(Segment { r_factor, steps });
        start = end;
    }
    Ok(Sweep { r_initial, segments, q_end: q })
}
