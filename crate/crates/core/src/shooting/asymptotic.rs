//! Decaying solutions at large radius and the choice of the outer radius.

use nalgebra::DMatrix;

use crate::radial::RadialSystem;
use crate::{Error, Result};

pub(crate) fn coefficient_matrix(system: &RadialSystem, e: f64, r: f64) -> DMatrix<f64> {
    let d = system.dim();
    DMatrix::from_row_slice(d, d, &system.coefficients(&r, e))
}

/// Real parts of the eigenvalues of A(r), descending.
fn local_rates(system: &RadialSystem, e: f64, r: f64) -> Vec<f64> {
    let a = coefficient_matrix(system, e, r);
    let mut re: Vec<f64> = a.complex_eigenvalues().iter().map(|z| z.re).collect();
    re.sort_by(|x, y| y.total_cmp(x));
    re
}

/// Slowest local decay rate of the decaying family (0 in allowed regions).
pub(crate) fn decay_rate(system: &RadialSystem, e: f64, r: f64) -> f64 {
    let re = local_rates(system, e, r);
    re[system.dim() / 2 - 1].max(0.0)
}

/// Largest local growth or decay rate, used to space re-orthonormalizations.
pub(crate) fn growth_bound(system: &RadialSystem, e: f64, r: f64) -> f64 {
    local_rates(system, e, r).iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn check_bound_window(system: &RadialSystem, e: f64) -> Result<()> {
    if system.interaction.sigma == 0.0 && e >= 0.0 {
        return Err(Error::domain(format!(
            "binding energy {e:e} is not below threshold: no decaying solutions without confinement"
        )));
    }
    Ok(())
}

/// ∫_{r_c}^{r} κ dr for increasing r until it reaches `decay_log`.
pub fn outer_radius(system: &RadialSystem, e: f64, r_c: f64, decay_log: f64) -> Result<f64> {
    check_bound_window(system, e)?;
    let mut r = r_c;
    let mut k = decay_rate(system, e, r);
    let mut acc = 0.0;
    let limit = r_c * 1e9;
    while acc < decay_log {
        let h = if k > 0.0 { (0.25 / k).min(0.1 * r) } else { 0.1 * r };
        let r_new = r + h;
        let k_new = decay_rate(system, e, r_new);
        acc += 0.5 * (k + k_new) * h;
        r = r_new;
        k = k_new;
        if r > limit {
            return Err(Error::domain(format!("no decaying region found up to r = {r:e}")));
        }
    }
    Ok(r.max(1.5 * r_c))
}

/// ∫_{a}^{b} κ dr by the trapezoidal rule.
pub(crate) fn decay_integral(system: &RadialSystem, e: f64, a: f64, b: f64) -> f64 {
    let n = 200;
    let h = (b - a) / n as f64;
    let mut acc = 0.0;
    let mut prev = decay_rate(system, e, a);
    for i in 1..=n {
        let k = decay_rate(system, e, a + h * i as f64);
        acc += 0.5 * (prev + k) * h;
        prev = k;
    }
    acc
}

const REFERENCE: [[f64; 4]; 2] = [[0.8, 0.55, -0.35, 0.45], [-0.3, 0.6, 0.7, -0.4]];

/// Diagonal similarity D⁻¹BD equalizing row and column norms; returns (D⁻¹BD, D).
fn balance(mut b: DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let n = b.nrows();
    let mut dscale = vec![1.0; n];
    for _ in 0..50 {
        let mut done = true;
        for i in 0..n {
            let c: f64 = (0..n).filter(|&k| k != i).map(|k| b[(k, i)].abs()).sum();
            let r: f64 = (0..n).filter(|&k| k != i).map(|k| b[(i, k)].abs()).sum();
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let f = (r / c).sqrt();
            if (f - 1.0).abs() > 0.05 {
                done = false;
                dscale[i] *= f;
                for k in 0..n {
                    b[(k, i)] *= f;
                    b[(i, k)] /= f;
                }
            }
        }
        if done {
            break;
        }
    }
    (b, dscale)
}

/// Sign function of a matrix by Newton iteration.
fn matrix_sign(b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let mut s = b.clone();
    for _ in 0..100 {
        let inv = s.clone().try_inverse()?;
        // determinant scaling speeds up early iterations
        let det = s.determinant().abs();
        let c = if det > 0.0 { det.powf(-1.0 / s.nrows() as f64) } else { 1.0 };
        let next = (&s * c + inv / c) * 0.5;
        let change = (&next - &s).norm() / next.norm();
        s = next;
        if change < 1e-15 {
            return Some(s);
        }
    }
    let check = (&s * &s - DMatrix::identity(s.nrows(), s.ncols())).norm();
    (check < 1e-10).then_some(s)
}

/// Orthonormal columns with positive R diagonal.
pub(crate) fn orthonormalize(y: DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let qr = y.qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for k in 0..r.nrows() {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
            r.row_mut(k).neg_mut();
        }
    }
    (q, r)
}

/// Orthonormal basis (d × d/2) of the decaying solutions of the frozen system at `r_max`.
pub fn asymptotic_start(system: &RadialSystem, e: f64, r_max: f64) -> Result<DMatrix<f64>> {
    check_bound_window(system, e)?;
    let d = system.dim();
    let b = -coefficient_matrix(system, e, r_max);
    let scale = b.norm();
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::domain(format!("degenerate asymptotic system at r = {r_max:e}")));
    }
    let (bal, dscale) = balance(b / scale);
    let s = matrix_sign(&bal).ok_or_else(|| Error::domain(format!("no exponential dichotomy at r = {r_max:e}")))?;
    let p = DMatrix::from_fn(d, d, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        0.5 * (id - s[(i, j)]) * dscale[i] / dscale[j]
    });
    // orthogonal projector onto range(P), oriented by fixed reference columns
    let svd = p.svd(true, false);
    let u = svd.u.ok_or_else(|| Error::Internal("SVD without U".into()))?;
    let mut idx: Vec<usize> = (0..d).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let k = d / 2;
    if svd.singular_values[idx[k]] > 1e-6 * svd.singular_values[idx[0]] {
        return Err(Error::domain("decaying subspace has the wrong dimension"));
    }
    let range = DMatrix::from_fn(d, k, |i, j| u[(i, idx[j])]);
    let w = DMatrix::from_fn(d, k, |i, j| REFERENCE[j][i]);
    let (q, r) = orthonormalize(&range * (range.transpose() * w));
    if (0..k).any(|i| r[(i, i)] < 1e-6) {
        return Err(Error::Internal("reference columns nearly orthogonal to the decaying subspace".into()));
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ChannelSpec, InteractionSpec, Parity, ParticleSpec};
    use crate::radial::build_system;

    fn ff() -> RadialSystem {
        let f1 = ParticleSpec::fermion(1.3).unwrap();
        let f2 = ParticleSpec::fermion(0.7).unwrap();
        build_system(ChannelSpec::fermion_fermion(1, Parity::I), f1, f2, InteractionSpec::coulomb(0.3).unwrap()).unwrap()
    }

    #[test]
    fn start_spans_stable_eigenvectors() {
        let sys = ff();
        let e = -0.01;
        let r = 300.0;
        let q = asymptotic_start(&sys, e, r).unwrap();
        let b = -coefficient_matrix(&sys, e, r);
        // B q should stay in span(q): residual after projection vanishes
        let bq = &b * &q;
        let proj = &q * (q.transpose() * &bq);
        let err = (bq - proj).norm();
        assert!(err < 1e-9 * b.norm(), "{err}");
        // and B restricted to it is contracting
        let small = q.transpose() * &b * &q;
        for z in small.complex_eigenvalues().iter() {
            assert!(z.re < 0.0);
        }
    }

    #[test]
    fn above_threshold_rejected() {
        let sys = ff();
        assert!(matches!(asymptotic_start(&sys, 0.01, 100.0), Err(Error::Domain(_))));
        assert!(matches!(outer_radius(&sys, 0.01, 1.0, 40.0), Err(Error::Domain(_))));
    }

    #[test]
    fn outer_radius_reaches_decay() {
        let sys = ff();
        let e = -0.01;
        let r = outer_radius(&sys, e, 5.0, 42.0).unwrap();
        let got = decay_integral(&sys, e, 5.0, r);
        assert!((got - 42.0).abs() < 1.0, "{got}");
    }
}
