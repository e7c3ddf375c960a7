//! Gauss-Legendre rules and a product grid on the unit sphere.

use nalgebra::Complex;

/// Nodes and weights of the n-point Gauss-Legendre rule on [−1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "quadrature order must be positive");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let nf = n as f64;
    (p, nf * (z * p - p0) / (z * z - 1.0))
}

/// Gauss-Legendre in cos θ times the uniform trapezoid rule in φ.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    pub theta: Vec<f64>,
    pub theta_weight: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_weight: f64,
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        let (x, w) = gauss_legendre(n_theta);
        let theta = x.iter().map(|c| c.acos()).collect();
        let phi = (0..n_phi).map(|k| 2.0 * std::f64::consts::PI * k as f64 / n_phi as f64).collect();
        Self { theta, theta_weight: w, phi, phi_weight: 2.0 * std::f64::consts::PI / n_phi as f64 }
    }

    /// The default grid used for angular matrix elements.
    pub fn standard() -> Self {
        Self::new(64, 128)
    }

    pub fn integrate_complex(&self, f: impl Fn(f64, f64) -> Complex<f64>) -> Complex<f64> {
        let mut acc = Complex::new(0.0, 0.0);
        for (t, wt) in self.theta.iter().zip(&self.theta_weight) {
            let mut ring = Complex::new(0.0, 0.0);
            for p in &self.phi {
                ring += f(*t, *p);
            }
            acc += ring * (*wt * self.phi_weight);
        }
        acc
    }

    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.integrate_complex(|t, p| Complex::new(f(t, p), 0.0)).re
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_for_polynomials() {
        for n in [1usize, 2, 5, 16, 64] {
            let (x, w) = gauss_legendre(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
            for k in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} k={k}");
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn sphere_area() {
        let g = SphereGrid::new(8, 16);
        assert_relative_eq!(g.integrate(|_, _| 1.0), 4.0 * std::f64::consts::PI, max_relative = 1e-14);
    }
}
