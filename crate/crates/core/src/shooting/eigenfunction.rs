//! Normalized eigenfunctions assembled from the matched sweeps.

use nalgebra::{DMatrix, DVector};

use super::frobenius::FrobeniusBasis;
use super::matching::Sweep;
use crate::angular::gauss_legendre;
use crate::ode::DenseStep;
use crate::{Error, Result};

#[derive(Debug, Clone)]
struct Piece {
    lo: f64,
    hi: f64,
    step: DenseStep,
    coef: Vec<f64>,
}

/// Continuous eigenfunction: series on [0, r0], dense integrator output beyond.
#[derive(Debug, Clone)]
pub struct Eigenfunction {
    dim: usize,
    series: FrobeniusBasis,
    series_coef: Vec<f64>,
    pieces: Vec<Piece>,
    scale: f64,
}

impl Eigenfunction {
    pub fn r0(&self) -> f64 {
        self.series.r0
    }

    /// Last radius covered; the function is taken as zero beyond it.
    pub fn r_max(&self) -> f64 {
        self.pieces.last().map_or(self.series.r0, |p| p.hi)
    }

    /// Normalized components at `r`.
    pub fn eval(&self, r: f64) -> Vec<f64> {
        let mut y = self.raw(r);
        for v in &mut y {
            *v *= self.scale;
        }
        y
    }

    fn raw(&self, r: f64) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d];
        if r <= self.series.r0 {
            for (j, c) in self.series_coef.iter().enumerate() {
                let v = self.series.eval(j, r);
                for i in 0..d {
                    out[i] += c * v[i];
                }
            }
            return out;
        }
        if r > self.r_max() {
            return out;
        }
        let idx = self.pieces.partition_point(|p| p.hi < r).min(self.pieces.len() - 1);
        let p = &self.pieces[idx];
        let k = p.coef.len();
        let mut buf = vec![0.0; d * k];
        p.step.eval(r, &mut buf);
        for (j, c) in p.coef.iter().enumerate() {
            for i in 0..d {
                out[i] += c * buf[j * d + i];
            }
        }
        out
    }
}

/// Normalized samples on Gauss-Legendre nodes of every integration step.
#[derive(Debug, Clone)]
pub(crate) struct Samples {
    pub r: Vec<f64>,
    pub weights: Vec<f64>,
    /// components[i][n]
    pub components: Vec<Vec<f64>>,
}

fn back_propagate(sweep: &Sweep, end_coef: DVector<f64>, pieces: &mut Vec<Piece>) -> Result<DVector<f64>> {
    let mut c = end_coef;
    for seg in sweep.segments.iter().rev() {
        c = seg
            .r_factor
            .solve_upper_triangular(&c)
            .ok_or_else(|| Error::Internal("singular R factor in back-propagation".into()))?;
        for s in &seg.steps {
            let (lo, hi) = if s.h > 0.0 { (s.t_old, s.t_new()) } else { (s.t_new(), s.t_old) };
            pieces.push(Piece { lo, hi, step: s.clone(), coef: c.iter().copied().collect() });
        }
    }
    Ok(c)
}

/// Builds the normalized eigenfunction from the null vector of the matching matrix.
pub(crate) fn assemble(
    series: FrobeniusBasis,
    left: &Sweep,
    right: &Sweep,
    norm_mask: &[bool],
    nodes_per_step: usize,
) -> Result<(Eigenfunction, Samples)> {
    let d = left.q_end.nrows();
    let kl = left.q_end.ncols();
    let kr = right.q_end.ncols();
    let mut m = DMatrix::zeros(d, kl + kr);
    m.columns_mut(0, kl).copy_from(&left.q_end);
    m.columns_mut(kl, kr).copy_from(&right.q_end);
    let svd = m.svd(false, true);
    let vt = svd.v_t.ok_or_else(|| Error::Internal("SVD without V".into()))?;
    let imin = svd.singular_values.imin();
    let v = vt.row(imin).transpose();
    let mut pieces = Vec::new();
    let c_left = back_propagate(left, DVector::from_iterator(kl, v.rows(0, kl).iter().copied()), &mut pieces)?;
    let series_coef = left
        .r_initial
        .solve_upper_triangular(&c_left)
        .ok_or_else(|| Error::Internal("singular series orthonormalization".into()))?;
    back_propagate(right, DVector::from_iterator(kr, v.rows(kl, kr).iter().map(|x| -x)), &mut pieces)?;
    pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut f = Eigenfunction {
        dim: d,
        series,
        series_coef: series_coef.iter().copied().collect(),
        pieces,
        scale: 1.0,
    };
    // quadrature nodes
    let (x, w) = gauss_legendre(nodes_per_step);
    let mut intervals: Vec<(f64, f64)> = vec![(0.0, f.series.r0)];
    intervals.extend(f.pieces.iter().map(|p| (p.lo, p.hi)));
    let mut r = Vec::with_capacity(intervals.len() * x.len());
    let mut weights = Vec::with_capacity(r.capacity());
    for (lo, hi) in intervals {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (xi, wi) in x.iter().zip(&w) {
            r.push(mid + half * xi);
            weights.push(half * wi);
        }
    }
    let mut components = vec![Vec::with_capacity(r.len()); d];
    for &ri in &r {
        let y = f.raw(ri);
        for i in 0..d {
            components[i].push(y[i]);
        }
    }
    let norm2: f64 = (0..r.len())
        .map(|n| {
            let s: f64 = (0..d).filter(|&i| norm_mask[i]).map(|i| components[i][n].powi(2)).sum();
            weights[n] * r[n] * r[n] * s
        })
        .sum();
    if !(norm2.is_finite() && norm2 > 0.0) {
        return Err(Error::Internal("eigenfunction has zero norm".into()));
    }
    let dominant = dominant_component(&r, &weights, &components, norm_mask);
    let peak = components[dominant].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let first = components[dominant].iter().find(|v| v.abs() > 1e-3 * peak).copied().unwrap_or(1.0);
    f.scale = first.signum() / norm2.sqrt();
    for comp in &mut components {
        for v in comp.iter_mut() {
            *v *= f.scale;
        }
    }
    Ok((f, Samples { r, weights, components }))
}

/// Index of the component with the largest weighted norm among `mask`.
pub(crate) fn dominant_component(r: &[f64], w: &[f64], comps: &[Vec<f64>], mask: &[bool]) -> usize {
    let mut best = 0;
    let mut best_norm = -1.0;
    for (i, c) in comps.iter().enumerate() {
        if !mask[i] {
            continue;
        }
        let n: f64 = c.iter().zip(r).zip(w).map(|((y, r), w)| w * r * r * y * y).sum();
        if n > best_norm {
            best_norm = n;
            best = i;
        }
    }
    best
}

/// Sign changes of a sampled function, ignoring values below `rel`·max.
pub fn count_nodes(values: &[f64], rel: f64) -> usize {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut last = 0.0f64;
    let mut nodes = 0;
    for &v in values {
        if v.abs() <= rel * peak {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            nodes += 1;
        }
        last = v;
    }
    nodes
}
