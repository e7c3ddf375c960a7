//! Angular functions: harmonics, Clebsch-Gordan coefficients, spinors, spin-1 triplets
//! and spherical Bessel functions.

mod bessel;
mod cg;
pub mod quadrature;
mod ylm;

pub use bessel::spherical_bessel;
pub use cg::{cg2, clebsch_gordan};
pub use quadrature::{gauss_legendre, SphereGrid};
pub use ylm::spherical_harmonic;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which spin-1 × orbital coupling: orbital ℓ = j (B), j − 1 (C) or j + 1 (D).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TripletKind {
    B,
    C,
    D,
}

impl TripletKind {
    pub fn orbital(self, j: u32) -> Option<u32> {
        match self {
            TripletKind::B => Some(j),
            TripletKind::C => j.checked_sub(1),
            TripletKind::D => Some(j + 1),
        }
    }
}

/// Components of a spinor (2) or triplet (3) at one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularVector {
    pub components: Vec<Complex<f64>>,
}

impl AngularVector {
    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().map(|c| c.norm_sqr()).sum()
    }

    /// ⟨self, other⟩ with the first argument conjugated.
    pub fn dot(&self, other: &AngularVector) -> Complex<f64> {
        self.components.iter().zip(&other.components).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Ω^(kind)_{j,m}: components ordered by spin projection +1, 0, −1.
pub fn spherical_triplet(kind: TripletKind, j: u32, m: i32, theta: f64, phi: f64) -> Result<AngularVector> {
    let ell = kind
        .orbital(j)
        .ok_or_else(|| Error::domain(format!("triplet {kind:?} needs j >= 1")))?;
    if m.unsigned_abs() > j {
        return Err(Error::domain(format!("|m| = {} exceeds j = {j}", m.abs())));
    }
    if kind == TripletKind::B && j == 0 {
        return Err(Error::domain("triplet B vanishes for j = 0"));
    }
    let components = [1i32, 0, -1]
        .iter()
        .map(|&s| {
            let w = cg2(2 * ell as i32, 2 * (m - s), 2, 2 * s, 2 * j as i32, 2 * m);
            spherical_harmonic(ell, m - s, theta, phi) * w
        })
        .collect();
    Ok(AngularVector { components })
}

/// Ω_{j,ℓ,m} with half-integers passed doubled (`two_j`, `two_m`).
pub fn spherical_spinor(two_j: u32, ell: u32, two_m: i32, theta: f64, phi: f64) -> Result<AngularVector> {
    if two_j % 2 == 0 || two_m.rem_euclid(2) != 1 {
        return Err(Error::domain("spinor needs half-integer j and m"));
    }
    if two_m.unsigned_abs() > two_j {
        return Err(Error::domain("|m| exceeds j"));
    }
    let j = f64::from(two_j) / 2.0;
    let m = f64::from(two_m) / 2.0;
    // Y index m ∓ 1/2
    let lo = (two_m - 1) / 2;
    let hi = (two_m + 1) / 2;
    let (w1, w2) = if 2 * ell + 1 == two_j {
        (((j + m) / (2.0 * j)).sqrt(), ((j - m) / (2.0 * j)).sqrt())
    } else if 2 * ell == two_j + 1 {
        (-((j - m + 1.0) / (2.0 * j + 2.0)).sqrt(), ((j + m + 1.0) / (2.0 * j + 2.0)).sqrt())
    } else {
        return Err(Error::domain(format!("ℓ = {ell} is not j ± 1/2 for j = {j}")));
    };
    Ok(AngularVector {
        components: vec![
            spherical_harmonic(ell, lo, theta, phi) * w1,
            spherical_harmonic(ell, hi, theta, phi) * w2,
        ],
    })
}
