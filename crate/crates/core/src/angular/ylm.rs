//! Complex spherical harmonics with the Condon-Shortley phase.

use nalgebra::Complex;

/// Normalized associated Legendre values N_l^m P_l^m(cos θ) for fixed m ≥ 0, l = m..=lmax,
/// including the Condon-Shortley factor and the 1/√(4π) of Y.
fn normalized_legendre_column(lmax: u32, m: u32, theta: f64) -> Vec<f64> {
    let x = theta.cos();
    let s = theta.sin().abs();
    // P̄_m^m = (−1)^m √((2m+1)!!/(4π (2m)!!)) sin^m θ
    let mut pmm = (1.0 / (4.0 * std::f64::consts::PI)).sqrt();
    for k in 1..=m {
        let k = f64::from(k);
        pmm *= -((2.0 * k + 1.0) / (2.0 * k)).sqrt() * s;
    }
    let mut out = vec![0.0; (lmax + 1) as usize];
    if lmax < m {
        return out;
    }
    out[m as usize] = pmm;
    if lmax == m {
        return out;
    }
    let mf = f64::from(m);
    let mut prev = pmm;
    let mut cur = x * (2.0 * mf + 3.0).sqrt() * pmm;
    out[(m + 1) as usize] = cur;
    for l in (m + 2)..=lmax {
        let lf = f64::from(l);
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
        let next = a * (x * cur - b * prev);
        prev = cur;
        cur = next;
        out[l as usize] = cur;
    }
    out
}

/// Y_l^m(θ, φ). Zero when |m| > l.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Complex<f64> {
    if m.unsigned_abs() > l {
        return Complex::new(0.0, 0.0);
    }
    let am = m.unsigned_abs();
    let p = normalized_legendre_column(l, am, theta)[l as usize];
    let y = Complex::from_polar(p, f64::from(am) * phi);
    if m >= 0 {
        y
    } else if am % 2 == 0 {
        y.conj()
    } else {
        -y.conj()
    }
}
