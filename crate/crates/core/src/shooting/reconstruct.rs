//! Components eliminated from the solved systems, rebuilt from the algebraic relations.

use serde::Serialize;

use super::SpectralResult;
use crate::model::{ChannelSpec, Parity};
use crate::radial::{RadialSystem, SystemKind};
use crate::{Error, Result};

/// Every radial component of a state on the result's sample grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullComponents {
    pub channel: ChannelSpec,
    pub names: Vec<String>,
    pub r: Vec<f64>,
    /// values[i][n] at r[n].
    pub values: Vec<Vec<f64>>,
}

/// Rebuilds the full component set: SS → φ₁…φ₄, SF → a₁…a₄, FF → a₀,a₁,b₀,b₁,c₀,c₁,d₀,d₁.
/// One-body limit systems return their solved components unchanged.
pub fn eigenfunction_full(result: &SpectralResult, system: &RadialSystem) -> Result<FullComponents> {
    if result.component_names.len() != system.dim() {
        return Err(Error::config("result does not belong to this system"));
    }
    let n = result.r.len();
    let point = |k: usize| -> Vec<f64> { result.components.iter().map(|c| c[k]).collect() };
    let names: &[&str] = match system.kind {
        SystemKind::ScalarScalar { .. } => &["phi1", "phi2", "phi3", "phi4"],
        SystemKind::ScalarFermion { .. } => &["a1", "a2", "a3", "a4"],
        SystemKind::FermionFermion { .. } | SystemKind::FermionFermionJ0 { .. } => {
            &["a0", "a1", "b0", "b1", "c0", "c1", "d0", "d1"]
        }
        _ => system.component_names(),
    };
    let mut values = vec![Vec::with_capacity(n); names.len()];
    for k in 0..n {
        let row = full_at(system, result.binding, result.r[k], &point(k))?;
        for (i, v) in row.into_iter().enumerate() {
            values[i].push(v);
        }
    }
    Ok(FullComponents { channel: system.channel, names: names.iter().map(|s| s.to_string()).collect(), r: result.r.clone(), values })
}

/// Full components at one radius from the solved vector `y`.
pub(crate) fn full_at(system: &RadialSystem, e: f64, r: f64, y: &[f64]) -> Result<Vec<f64>> {
    let (m1, m2) = (system.particles.0.mass, system.particles.1.mass);
    let alpha = system.interaction.alpha;
    let sigma = system.interaction.sigma;
    let eps = e + alpha / r;
    let lr = eps + m1 + m2;
    if lr == 0.0 {
        return Err(Error::Internal(format!("λ(r) vanishes at r = {r:e}")));
    }
    let d = system.dim();
    let a = system.coefficients(&r, e);
    let dy: Vec<f64> = (0..d).map(|i| -(0..d).map(|k| a[i * d + k] * y[k]).sum::<f64>()).collect();
    Ok(match system.kind {
        SystemKind::ScalarScalar { ell } => {
            let u = y[0];
            let ell2 = f64::from(ell * (ell + 1));
            // ∇²u = u'' + 2u'/r − ℓ(ℓ+1)u/r²
            let lap = dy[1] + 2.0 * y[1] / r - ell2 * u / (r * r);
            let phi2 = eps * (2.0 * m1 + eps) / (4.0 * m2 * lr) * u;
            let phi3 = eps * (2.0 * m2 + eps) / (4.0 * m1 * lr) * u;
            let phi4 = (lap / (2.0 * m2) + (lr - m1 + m2) * phi2) / (2.0 * m1);
            vec![u, phi2, phi3, phi4]
        }
        SystemKind::ScalarFermion { two_j, parity } => {
            let (ms, mf) = (m1, m2);
            let j = f64::from(two_j) / 2.0;
            // λ(r) − m_S ± m_F, with m_F → −m_F for parity II
            let (plus, minus) = match parity {
                Parity::I => (eps + 2.0 * mf, eps),
                Parity::II => (eps, eps + 2.0 * mf),
            };
            let (f, g) = (y[0], y[1]);
            let a4 = (dy[0] - (j - 0.5) / r * f + plus * g) / (2.0 * ms);
            let a3 = -(dy[1] + (j + 1.5) / r * g - minus * f) / (2.0 * ms);
            vec![f, g, a3, a4]
        }
        SystemKind::FermionFermion { j, parity } => ff_full(f64::from(j), parity, y[0], y[1], y[2], y[3], r, lr, m1, m2, sigma),
        SystemKind::FermionFermionJ0 { parity } => ff_full(0.0, parity, y[0], 0.0, y[1], 0.0, r, lr, m1, m2, sigma),
        _ => y.to_vec(),
    })
}

#[allow(clippy::too_many_arguments)]
fn ff_full(j: f64, parity: Parity, ap: f64, bm: f64, up: f64, vm: f64, r: f64, lr: f64, m1: f64, m2: f64, sigma: f64) -> Vec<f64> {
    let ms = m1 + m2 + sigma * r;
    let mu = m1 - m2;
    let (x, z) = match parity {
        Parity::I => (ms, mu),
        Parity::II => (-mu, -ms),
    };
    let jj = (j * (j + 1.0)).sqrt();
    let am = x * ap / lr;
    let bp = x * bm / lr;
    let um = -(2.0 * jj / r * bm + z * up) / lr;
    let vp = (2.0 * jj / r * ap - z * vm) / lr;
    let s0 = (j / (2.0 * j + 1.0)).sqrt();
    let s1 = ((j + 1.0) / (2.0 * j + 1.0)).sqrt();
    let (cp, dp) = (-s0 * up - s1 * vp, s1 * up - s0 * vp);
    let (cm, dm) = (-s0 * um - s1 * vm, s1 * um - s0 * vm);
    let split = |p: f64, m: f64| ((p + m) / 2.0, (p - m) / 2.0);
    let (a0, a1) = split(ap, am);
    let (b0, b1) = split(bp, bm);
    let (c0, c1) = split(cp, cm);
    let (d0, d1) = split(dp, dm);
    vec![a0, a1, b0, b1, c0, c1, d0, d1]
}
