//! Particles, couplings, channels and the free two-body kinematics.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Scalar,
    Fermion,
}

/// One constituent. `kappa` is the magnetic-moment factor g/2 (1 for a Dirac point particle).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleSpec {
    pub mass: f64,
    pub spin: Spin,
    pub kappa: f64,
}

impl ParticleSpec {
    pub fn new(mass: f64, spin: Spin, kappa: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::domain(format!("particle mass must be positive, got {mass}")));
        }
        if !kappa.is_finite() {
            return Err(Error::domain("kappa must be finite"));
        }
        Ok(Self { mass, spin, kappa })
    }

    pub fn scalar(mass: f64) -> Result<Self> {
        Self::new(mass, Spin::Scalar, 1.0)
    }

    pub fn fermion(mass: f64) -> Result<Self> {
        Self::new(mass, Spin::Fermion, 1.0)
    }

    pub fn with_kappa(self, kappa: f64) -> Result<Self> {
        Self::new(self.mass, self.spin, kappa)
    }
}

/// Couplings: vector strength `alpha` (V = −α/r), scalar string tension `sigma`
/// (energy², coupled to the mass term) and Breit coupling `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionSpec {
    pub alpha: f64,
    pub sigma: f64,
    pub g: f64,
}

impl InteractionSpec {
    pub fn new(alpha: f64, sigma: f64, g: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::domain(format!("alpha must be >= 0, got {alpha}")));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::domain(format!("sigma must be >= 0, got {sigma}")));
        }
        if !g.is_finite() {
            return Err(Error::domain("Breit coupling must be finite"));
        }
        Ok(Self { alpha, sigma, g })
    }

    pub fn coulomb(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.0, 0.0)
    }

    pub fn cornell(alpha: f64, sigma: f64) -> Result<Self> {
        Self::new(alpha, sigma, 0.0)
    }

    pub fn with_breit(self, g: f64) -> Result<Self> {
        Self::new(self.alpha, self.sigma, g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChannelKind {
    #[serde(rename = "SS")]
    ScalarScalar,
    #[serde(rename = "SF")]
    ScalarFermion,
    #[serde(rename = "FF")]
    FermionFermion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    I,
    II,
}

/// A channel: system kind, angular momentum and parity family.
///
/// The angular momentum is stored doubled so SF half-integers are exact.
/// For SS it is the orbital ℓ, for SF and FF the total j.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub two_j: u32,
    pub parity: Parity,
}

impl ChannelSpec {
    pub fn scalar_scalar(ell: u32) -> Self {
        Self { kind: ChannelKind::ScalarScalar, two_j: 2 * ell, parity: Parity::I }
    }

    /// `two_j` must be odd.
    pub fn scalar_fermion(two_j: u32, parity: Parity) -> Result<Self> {
        if two_j % 2 == 0 {
            return Err(Error::domain(format!("SF channel needs half-integer j, got 2j = {two_j}")));
        }
        Ok(Self { kind: ChannelKind::ScalarFermion, two_j, parity })
    }

    pub fn fermion_fermion(j: u32, parity: Parity) -> Self {
        Self { kind: ChannelKind::FermionFermion, two_j: 2 * j, parity }
    }

    pub fn j(&self) -> f64 {
        f64::from(self.two_j) / 2.0
    }

    /// Orbital ℓ for SS, integer j for FF. Panics on SF.
    pub fn int_j(&self) -> u32 {
        assert!(self.two_j % 2 == 0, "half-integer channel has no integer j");
        self.two_j / 2
    }

    pub fn validate(&self, p1: &ParticleSpec, p2: &ParticleSpec) -> Result<()> {
        let spins = (p1.spin, p2.spin);
        let ok = match self.kind {
            ChannelKind::ScalarScalar => spins == (Spin::Scalar, Spin::Scalar),
            ChannelKind::ScalarFermion => spins == (Spin::Scalar, Spin::Fermion),
            ChannelKind::FermionFermion => spins == (Spin::Fermion, Spin::Fermion),
        };
        if !ok {
            return Err(Error::config(format!(
                "channel {:?} does not match particle spins {:?}",
                self.kind, spins
            )));
        }
        match self.kind {
            ChannelKind::ScalarFermion if self.two_j % 2 == 0 => {
                Err(Error::config("SF channel needs half-integer j"))
            }
            ChannelKind::ScalarScalar | ChannelKind::FermionFermion if self.two_j % 2 == 1 => {
                Err(Error::config("SS and FF channels need integer angular momentum"))
            }
            _ => Ok(()),
        }
    }
}

/// Classical reduced kinematics in the zero-momentum frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinematicState {
    pub lambda: f64,
    pub l: f64,
    pub q0: f64,
}

impl KinematicState {
    pub fn new(lambda: f64, l: f64, m1: f64, m2: f64) -> Result<Self> {
        Ok(Self { lambda, l, q0: relative_energy_q0(lambda, m1, m2)? })
    }
}

fn check_mass(m: f64) -> Result<()> {
    if m.is_finite() && m > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("mass must be positive, got {m}")))
    }
}

pub fn reduced_mass(m1: f64, m2: f64) -> Result<f64> {
    check_mass(m1)?;
    check_mass(m2)?;
    Ok(m1 * m2 / (m1 + m2))
}

/// λ = √(q² + m1²) + √(q² + m2²).
pub fn free_total_energy(q: f64, m1: f64, m2: f64) -> Result<f64> {
    if !(q.is_finite() && q >= 0.0) {
        return Err(Error::domain(format!("momentum must be >= 0, got {q}")));
    }
    if !(m1 >= 0.0 && m2 >= 0.0) {
        return Err(Error::domain("masses must be >= 0"));
    }
    Ok(q.hypot(m1) + q.hypot(m2))
}

/// q0 = (m1² − m2²)/(2λ).
pub fn relative_energy_q0(lambda: f64, m1: f64, m2: f64) -> Result<f64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::domain("relative energy needs a finite nonzero λ"));
    }
    Ok((m1 - m2) * (m1 + m2) / (2.0 * lambda))
}
