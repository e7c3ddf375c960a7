//! Closed-form spectra and parameter maps.

use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OracleSource {
    Schroedinger,
    KleinGordon,
    Dirac,
    Free,
}

/// One closed-form level: binding energy excluding rest masses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleLevel {
    pub n: u32,
    /// Orbital ℓ (Schrödinger, Klein-Gordon).
    pub ell: Option<u32>,
    /// 2j (Dirac).
    pub two_j: Option<u32>,
    pub energy: f64,
    pub source: OracleSource,
}

/// −1 + (1 + x)^(−1/2) without cancellation.
fn inverse_sqrt_minus_one(x: f64) -> f64 {
    let s = (1.0 + x).sqrt();
    -x / (s * (1.0 + s))
}

/// −m_R α²/(2n²).
pub fn schrodinger_level(n: u32, mr: f64, alpha: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("principal quantum number must be at least 1"));
    }
    Ok(-mr * alpha * alpha / (2.0 * f64::from(n * n)))
}

fn relativistic_level(n: u32, k: f64, m: f64, alpha: f64) -> Result<f64> {
    let rad = k * k - alpha * alpha;
    if rad <= 0.0 {
        return Err(Error::domain(format!("coupling {alpha} reaches the critical value {k}")));
    }
    let big_n = f64::from(n) - k + rad.sqrt();
    Ok(m * inverse_sqrt_minus_one(alpha * alpha / (big_n * big_n)))
}

/// Klein-Gordon Coulomb level with orbital ℓ = k − 1/2.
pub fn klein_gordon_level(n: u32, ell: u32, m: f64, alpha: f64) -> Result<f64> {
    if n == 0 || ell >= n {
        return Err(Error::domain(format!("need 0 ≤ ℓ ≤ n − 1, got n = {n}, ℓ = {ell}")));
    }
    relativistic_level(n, f64::from(ell) + 0.5, m, alpha)
}

/// Dirac Coulomb level for total angular momentum j = two_j/2.
pub fn dirac_level(n: u32, two_j: u32, m: f64, alpha: f64) -> Result<f64> {
    if two_j % 2 == 0 || n == 0 || two_j + 1 > 2 * n {
        return Err(Error::domain(format!("need half-integer j ≤ n − 1/2, got n = {n}, 2j = {two_j}")));
    }
    relativistic_level(n, f64::from(two_j + 1) / 2.0, m, alpha)
}

/// Free two-body energies {E₁+E₂, −(E₁+E₂), E₁−E₂, −(E₁−E₂)} at relative momentum q.
pub fn free_spectrum(q: f64, m1: f64, m2: f64) -> Result<[f64; 4]> {
    if !(q >= 0.0) {
        return Err(Error::domain(format!("momentum must be non-negative, got {q}")));
    }
    let e1 = q.hypot(m1);
    let e2 = q.hypot(m2);
    Ok([e1 + e2, -(e1 + e2), e1 - e2, -(e1 - e2)])
}

/// Parameters of the confluent Heun functions solving the two-scalar Coulomb equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeunParameters {
    pub eta: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub zeta: f64,
}

pub fn heun_parameters(lambda: f64, m1: f64, m2: f64, alpha: f64, j: u32) -> Result<HeunParameters> {
    if !(lambda > 0.0) {
        return Err(Error::domain(format!("invariant mass must be positive, got {lambda}")));
    }
    let l2 = lambda * lambda;
    let big = (m1 + m2) * (m1 + m2);
    let small = (m1 - m2) * (m1 - m2);
    let eta_rad = (big - l2) * (l2 - small);
    if eta_rad < 0.0 {
        return Err(Error::domain(format!("λ = {lambda} is outside the bound window: η is complex")));
    }
    let jj = f64::from(j) * f64::from(j + 1);
    let beta_rad = 0.25 + 4.0 * jj - alpha * alpha;
    let dm2 = m1 * m1 - m2 * m2;
    let gamma_rad = l2 * l2 - 4.0 * alpha * alpha * dm2 * dm2;
    if beta_rad < 0.0 || gamma_rad < 0.0 {
        return Err(Error::domain("complex β or γ for this coupling"));
    }
    Ok(HeunParameters {
        eta: alpha / l2 * eta_rad.sqrt(),
        beta: beta_rad.sqrt(),
        gamma: gamma_rad.sqrt() / (2.0 * l2),
        delta: -alpha * alpha * (l2 * l2 - dm2 * dm2) / (2.0 * l2 * l2),
        zeta: 0.125 + alpha * alpha / 2.0,
    })
}

/// The first `count` levels of a closed-form spectrum for fixed ℓ (or 2j for Dirac).
pub fn oracle_levels(source: OracleSource, angular: u32, count: u32, mass: f64, alpha: f64) -> Result<Vec<OracleLevel>> {
    let first = match source {
        OracleSource::Schroedinger | OracleSource::KleinGordon => angular + 1,
        OracleSource::Dirac => (angular + 1) / 2,
        OracleSource::Free => return Err(Error::domain("the free spectrum has no discrete levels")),
    };
    (first..first + count)
        .map(|n| {
            let (energy, ell, two_j) = match source {
                OracleSource::Schroedinger => (schrodinger_level(n, mass, alpha)?, Some(angular), None),
                OracleSource::KleinGordon => (klein_gordon_level(n, angular, mass, alpha)?, Some(angular), None),
                _ => (dirac_level(n, angular, mass, alpha)?, None, Some(angular)),
            };
            Ok(OracleLevel { n, ell, two_j, energy, source })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ALPHA: f64 = 0.0072973525698;

    /// −1 + (1+x)^(−1/2) by its binomial series, independent of the closed form.
    fn series_oracle(x: f64) -> f64 {
        let mut term = 1.0;
        let mut acc = 0.0;
        for k in 1..12 {
            term *= -(2.0 * k as f64 - 1.0) / (2.0 * k as f64) * x;
            acc += term;
        }
        acc
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn schrodinger_table_values() {
        let e1 = schrodinger_level(1, 0.5, ALPHA).unwrap();
        // the printed digits are truncated rather than rounded
        assert!(rel(e1, -1.331283e-5) < 1e-6);
        let e2 = schrodinger_level(2, 0.5, ALPHA).unwrap();
        assert!(rel(e2, -3.328210e-6) < 1e-6);
        assert_eq!(schrodinger_level(3, 0.5, 0.0).unwrap(), 0.0);
        assert!(schrodinger_level(0, 0.5, ALPHA).is_err());
    }

    #[test]
    fn klein_gordon_table_values() {
        assert!(rel(klein_gordon_level(1, 0, 0.5, ALPHA).unwrap(), -1.331372e-5) < 5e-7);
        assert!(rel(klein_gordon_level(1, 0, 1e7, ALPHA).unwrap(), -266.274498) < 5e-9);
        assert!(klein_gordon_level(1, 1, 1.0, ALPHA).is_err());
        assert!(matches!(klein_gordon_level(1, 0, 1.0, 0.6), Err(Error::Domain(_))));
    }

    #[test]
    fn dirac_table_values() {
        assert!(rel(dirac_level(1, 1, 1e7, ALPHA).unwrap(), -266.260317) < 5e-9);
        // ground state m(√(1−α²) − 1)
        let exact = (1.0 - ALPHA * ALPHA).sqrt() - 1.0;
        assert!(rel(dirac_level(1, 1, 1.0, ALPHA).unwrap(), exact) < 1e-12);
        assert!(dirac_level(1, 3, 1.0, ALPHA).is_err());
        assert!(dirac_level(1, 2, 1.0, ALPHA).is_err());
    }

    #[test]
    fn closed_forms_match_series() {
        for n in 1..4 {
            for ell in 0..n {
                let k = f64::from(ell) + 0.5;
                let big_n = f64::from(n) - k + (k * k - ALPHA * ALPHA).sqrt();
                let x = ALPHA * ALPHA / (big_n * big_n);
                assert!(rel(klein_gordon_level(n, ell, 1.0, ALPHA).unwrap(), series_oracle(x)) < 1e-14);
            }
        }
    }

    #[test]
    fn free_spectrum_values() {
        assert_eq!(free_spectrum(3.0, 4.0, 0.0).unwrap(), [8.0, -8.0, 2.0, -2.0]);
        assert_eq!(free_spectrum(0.0, 1.5, 0.5).unwrap(), [2.0, -2.0, 1.0, -1.0]);
        assert!(free_spectrum(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn heun_trivial_limits() {
        let p = heun_parameters(1.9, 1.0, 1.0, 0.0, 0).unwrap();
        assert_eq!((p.zeta, p.delta, p.eta, p.beta), (0.125, 0.0, 0.0, 0.5));
        assert!(heun_parameters(2.5, 1.0, 1.0, 0.1, 0).is_err());
        assert!(heun_parameters(0.5, 1.5, 0.5, 0.1, 0).is_err());
    }

    #[test]
    fn heun_double_entry() {
        // independent re-typing in expanded polynomial form
        let (lambda, m1, m2, a, j) = (2.7_f64, 1.6_f64, 1.2_f64, 0.31_f64, 2u32);
        let p = heun_parameters(lambda, m1, m2, a, j).unwrap();
        let l4 = lambda.powi(4);
        let s = m1 * m1 + m2 * m2;
        let d = m1 * m1 - m2 * m2;
        let eta2 = a * a / l4 * (-l4 + 2.0 * s * lambda * lambda - d * d);
        assert!(rel(p.eta * p.eta, eta2) < 1e-13);
        assert!(rel(p.beta * p.beta, 24.25 - a * a) < 1e-14);
        assert!(rel(4.0 * l4 * p.gamma * p.gamma, l4 - 4.0 * a * a * d * d) < 1e-13);
        assert!(rel(p.delta, -a * a / 2.0 + a * a * d * d / (2.0 * l4)) < 1e-13);
        assert!(rel(p.zeta, 0.125 + a * a / 2.0) < 1e-15);
    }

    #[test]
    fn oracle_level_lists() {
        let d = oracle_levels(OracleSource::Dirac, 3, 2, 1.0, ALPHA).unwrap();
        assert_eq!(d.iter().map(|l| l.n).collect::<Vec<_>>(), vec![2, 3]);
        let s = oracle_levels(OracleSource::Schroedinger, 1, 3, 1.0, ALPHA).unwrap();
        assert_eq!(s[0].n, 2);
        assert!(oracle_levels(OracleSource::Free, 0, 1, 1.0, ALPHA).is_err());
    }

    proptest! {
        #[test]
        fn relativistic_corrections_are_order_alpha4(n in 1u32..5, a in 1e-4f64..0.05) {
            let s = schrodinger_level(n, 1.0, a).unwrap();
            let kg = klein_gordon_level(n, 0, 1.0, a).unwrap();
            let d = dirac_level(n, 1, 1.0, a).unwrap();
            let scale = a.powi(4);
            prop_assert!((kg - s).abs() <= 2.0 * scale);
            prop_assert!((d - s).abs() <= 2.0 * scale);
        }

        #[test]
        fn free_spectrum_symmetric(q in 0.0f64..10.0, m1 in 0.0f64..5.0, m2 in 0.0f64..5.0) {
            let a = free_spectrum(q, m1, m2).unwrap();
            let b = free_spectrum(q, m2, m1).unwrap();
            prop_assert_eq!(a[0], b[0]);
            prop_assert!((a[2] + b[2]).abs() < 1e-12);
        }
    }
}
