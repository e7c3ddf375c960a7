//! Regular solutions at the origin as Frobenius series.
//!
//! A diagonal shearing `y = diag(r^s) z` brings the system to `z' = B(r) z / r` with
//! `B` analytic at 0. Each retained exponent ρ of `B(0)` gives `z = r^ρ Σ c_k r^k`
//! with `((ρ + k) − B₀) c_k = Σ_{i≥1} B_i c_{k−i}`.

use nalgebra::{DMatrix, DVector};

use crate::radial::RadialSystem;
use crate::series::Series;
use crate::{Error, Result};

/// Fixed reference vectors used to orient null spaces reproducibly.
const ORIENT: [[f64; 4]; 2] = [[1.0, 0.618_034, 0.381_966, 0.236_068], [0.145_898, -0.381_966, 1.0, 0.527_864]];

/// Series basis of the regular solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct FrobeniusBasis {
    /// Indicial exponent of each retained solution (in the sheared variable).
    pub exponents: Vec<f64>,
    /// Shear powers `s` with `y_i = r^{s_i} z_i`.
    pub shear: Vec<i32>,
    /// `coefficients[j][k]` is c_k of solution j.
    pub coefficients: Vec<Vec<Vec<f64>>>,
    /// Handoff radius; solutions are scaled by `(r/r0)^ρ`.
    pub r0: f64,
    /// Evaluate at the handoff with diagonal Padé resummation.
    pub pade: bool,
    /// All eigen-exponents of the residue matrix, descending by real part.
    pub all_exponents: Vec<(f64, f64)>,
}

impl FrobeniusBasis {
    pub fn count(&self) -> usize {
        self.exponents.len()
    }

    pub fn order(&self) -> usize {
        self.coefficients.first().map_or(0, |c| c.len().saturating_sub(1))
    }

    /// Solution `j` at radius `r` by direct summation.
    pub fn eval(&self, j: usize, r: f64) -> Vec<f64> {
        let coef = &self.coefficients[j];
        let d = self.shear.len();
        let mut z = vec![0.0; d];
        for c in coef.iter().rev() {
            for i in 0..d {
                z[i] = z[i] * r + c[i];
            }
        }
        self.finish(j, r, z)
    }

    /// Solution `j` at the handoff radius, Padé-resummed if enabled.
    pub fn eval_handoff(&self, j: usize) -> Vec<f64> {
        if !self.pade {
            return self.eval(j, self.r0);
        }
        let d = self.shear.len();
        let mut z = vec![0.0; d];
        let coef = &self.coefficients[j];
        for (i, zi) in z.iter_mut().enumerate() {
            let scaled: Vec<f64> = coef.iter().enumerate().map(|(k, c)| c[i] * self.r0.powi(k as i32)).collect();
            *zi = pade_at_one(&scaled).unwrap_or_else(|| scaled.iter().sum());
        }
        self.finish(j, self.r0, z)
    }

    fn finish(&self, j: usize, r: f64, mut z: Vec<f64>) -> Vec<f64> {
        let scale = (r / self.r0).powf(self.exponents[j]);
        for (zi, &s) in z.iter_mut().zip(&self.shear) {
            *zi *= scale * r.powi(s);
        }
        z
    }

    /// Size of the last retained term relative to the sum at `r0`, worst over solutions.
    pub fn tail_ratio(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.count() {
            let coef = &self.coefficients[j];
            let n = coef.len() - 1;
            let mut total: f64 = 0.0;
            let mut last: f64 = 0.0;
            for (k, c) in coef.iter().enumerate() {
                let rk = self.r0.powi(k as i32);
                for &ci in c {
                    total = total.max((ci * rk).abs());
                    if k + 2 >= n {
                        last = last.max((ci * rk).abs());
                    }
                }
            }
            worst = worst.max(last / total.max(f64::MIN_POSITIVE));
        }
        worst
    }
}

/// Diagonal Padé approximant of Σ a_k t^k evaluated at t = 1.
fn pade_at_one(a: &[f64]) -> Option<f64> {
    let l = (a.len() - 1) / 2;
    if l == 0 {
        return None;
    }
    // Σ_{j=0}^{l} q_j a_{l+i−j} = 0, i = 1..l, with q_0 = 1
    let m = DMatrix::from_fn(l, l, |i, j| a[l + i - j]);
    let rhs = DVector::from_fn(l, |i, _| -a[l + i + 1]);
    let q = m.lu().solve(&rhs)?;
    let mut qs = vec![1.0];
    qs.extend(q.iter().copied());
    let num: f64 = (0..=l).map(|i| (0..=i).map(|j| qs[j] * a[i - j]).sum::<f64>()).sum();
    let den: f64 = qs.iter().sum();
    let v = num / den;
    (v.is_finite() && den.abs() > 1e-8).then_some(v)
}

/// Smallest nonnegative shear making r·D⁻¹AD analytic, or `None`.
fn find_shear(val: &[Option<i32>], d: usize) -> Option<Vec<i32>> {
    let mut best: Option<Vec<i32>> = None;
    let total = 3usize.pow(d as u32);
    for code in 0..total {
        let s: Vec<i32> = (0..d).map(|i| ((code / 3usize.pow(i as u32)) % 3) as i32).collect();
        let ok = (0..d).all(|i| {
            (0..d).all(|j| match val[i * d + j] {
                Some(v) => v + 1 + s[j] - s[i] >= 0,
                None => true,
            })
        });
        if ok && best.as_ref().map_or(true, |b| s.iter().sum::<i32>() < b.iter().sum::<i32>()) {
            best = Some(s);
        }
    }
    best
}

/// Builds the regular-solution basis of `system` at binding energy `e`.
pub fn frobenius_start(system: &RadialSystem, e: f64, order: usize, r0: f64) -> Result<FrobeniusBasis> {
    if order < 4 {
        return Err(Error::config(format!("series order must be >= 4, got {order}")));
    }
    if !(r0.is_finite() && r0 > 0.0) {
        return Err(Error::config(format!("series handoff radius must be positive, got {r0}")));
    }
    let d = system.dim();
    let n = order as i32;
    let mut request = n + 4;
    let (a, shear) = loop {
        let a = system.coefficients(&Series::variable(request), e);
        let val: Vec<Option<i32>> = a.iter().map(|s| (!s.is_zero()).then(|| s.valuation())).collect();
        let shear = find_shear(&val, d)
            .ok_or_else(|| Error::domain("origin is not a regular singular point of the system"))?;
        let enough = (0..d).all(|i| (0..d).all(|j| a[i * d + j].precision() > n - 1 - shear[j] + shear[i]));
        if enough {
            break (a, shear);
        }
        request += 4;
        if request > 4 * n + 40 {
            return Err(Error::Internal("coefficient expansion lost too much precision".into()));
        }
    };
    // B_k entries
    let b: Vec<DMatrix<f64>> = (0..=n)
        .map(|k| {
            DMatrix::from_fn(d, d, |i, j| {
                let mut v = -a[i * d + j].coeff(k - 1 - shear[j] + shear[i]);
                if k == 0 && i == j {
                    v -= f64::from(shear[i]);
                }
                v
            })
        })
        .collect();
    let b0 = &b[0];
    let scale = b0.norm().max(1.0);
    let mut eig: Vec<(f64, f64)> = b0.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
    eig.sort_by(|x, y| y.0.total_cmp(&x.0));
    let keep = d / 2;
    for &(re, im) in &eig[..keep] {
        if im.abs() > 1e-9 * re.abs().max(1.0) {
            return Err(Error::domain(format!(
                "complex indicial exponent {re} ± {}i: coupling too strong for a regular solution",
                im.abs()
            )));
        }
    }
    if (eig[keep - 1].0 - eig[keep].0).abs() < 1e-9 * scale && eig[keep].1.abs() < 1e-9 * scale {
        return Err(Error::domain("regular and irregular indicial exponents coincide"));
    }
    // group retained exponents and take oriented null spaces
    let mut exponents = Vec::with_capacity(keep);
    let mut starts: Vec<DVector<f64>> = Vec::with_capacity(keep);
    let mut i = 0;
    while i < keep {
        let rho = eig[i].0;
        let mut mult = 1;
        while i + mult < keep && (eig[i + mult].0 - rho).abs() < 1e-8 * scale {
            mult += 1;
        }
        let shifted = b0 - DMatrix::identity(d, d) * rho;
        let svd = shifted.svd(false, true);
        let vt = svd.v_t.as_ref().ok_or_else(|| Error::Internal("SVD without V".into()))?;
        let mut order_idx: Vec<usize> = (0..d).collect();
        order_idx.sort_by(|&x, &y| svd.singular_values[x].total_cmp(&svd.singular_values[y]));
        if svd.singular_values[order_idx[mult - 1]] > 1e-7 * scale {
            return Err(Error::Logarithmic { rho, other: rho, order: 0 });
        }
        let null: Vec<DVector<f64>> =
            order_idx[..mult].iter().map(|&k| vt.row(k).transpose().into_owned()).collect();
        let mut chosen: Vec<DVector<f64>> = Vec::new();
        for w in ORIENT.iter().take(mult) {
            let w = DVector::from_fn(d, |k, _| w[k]);
            let mut v = DVector::zeros(d);
            for nv in &null {
                v += nv * nv.dot(&w);
            }
            for c in &chosen {
                let p = c.dot(&v);
                v -= c * p;
            }
            let norm = v.norm();
            if norm < 1e-6 {
                return Err(Error::Internal("degenerate null-space orientation".into()));
            }
            chosen.push(v / norm);
        }
        for v in chosen {
            exponents.push(rho);
            starts.push(v);
        }
        i += mult;
    }
    let mut coefficients = Vec::with_capacity(keep);
    for (rho, c0) in exponents.iter().zip(&starts) {
        let mut cs: Vec<DVector<f64>> = vec![c0.clone()];
        for k in 1..=n as usize {
            let mut rhs = DVector::zeros(d);
            for s in 1..=k {
                rhs += &b[s] * &cs[k - s];
            }
            let m = DMatrix::identity(d, d) * (rho + k as f64) - b0;
            let svd = m.svd(true, true);
            let smax = svd.singular_values.max();
            let smin = svd.singular_values.min();
            let ck = if smin > 1e-10 * smax {
                svd.solve(&rhs, 0.0)
            } else {
                let c = svd.solve(&rhs, 1e-10 * smax);
                let c = c.map_err(|e| Error::Internal(e.to_string()))?;
                let resid = (&(DMatrix::identity(d, d) * (rho + k as f64) - b0) * &c - &rhs).norm();
                if resid > 1e-8 * rhs.norm().max(f64::MIN_POSITIVE) {
                    return Err(Error::Logarithmic { rho: *rho, other: rho + k as f64, order: k });
                }
                Ok(c)
            }
            .map_err(|e| Error::Internal(e.to_string()))?;
            cs.push(ck);
        }
        coefficients.push(cs.into_iter().map(|c| c.iter().copied().collect()).collect());
    }
    Ok(FrobeniusBasis { exponents, shear, coefficients, r0, pade: false, all_exponents: eig })
}
