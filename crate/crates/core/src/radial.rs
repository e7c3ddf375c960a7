//! Radial first-order systems y' + A(r) y = 0 for every channel and limit.
//!
//! Coefficients are written in terms of ε = E + α/r, where E is the binding energy
//! measured from the system's threshold, so that differences such as λ(r)² − M² never
//! suffer cancellation.

use serde::{Deserialize, Serialize};

use crate::angular::spherical_bessel;
use crate::model::{ChannelKind, ChannelSpec, InteractionSpec, Parity, ParticleSpec, Spin};
use crate::series::Field;
use crate::{Error, Result};

/// Concrete equation family behind a [`RadialSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SystemKind {
    /// (u, u′) of the two-scalar radial equation.
    ScalarScalar { ell: u32 },
    /// (f, g) of the scalar-fermion pair.
    ScalarFermion { two_j: u32, parity: Parity },
    /// (a₊, b₋, u₊, v₋) of the two-fermion system, j ≥ 1.
    FermionFermion { j: u32, parity: Parity },
    /// (a₊, u₊): the j = 0 two-fermion system with the vanishing pair dropped.
    FermionFermionJ0 { parity: Parity },
    /// (f, g) Dirac pair of the lighter fermion.
    Dirac { kappa: i32 },
    /// (u, u′) Klein-Gordon equation of the lighter scalar.
    KleinGordon { ell: u32 },
    /// (u, u′) Schrödinger equation with reduced mass.
    Schroedinger { ell: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitKind {
    DiracOfLighter,
    KleinGordonOfLighter,
    Schroedinger,
}

/// An immutable radial eigenvalue problem in the binding energy E.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSystem {
    pub kind: SystemKind,
    pub channel: ChannelSpec,
    pub particles: (ParticleSpec, ParticleSpec),
    pub interaction: InteractionSpec,
}

fn check_channel(channel: &ChannelSpec, p1: &ParticleSpec, p2: &ParticleSpec, inter: &InteractionSpec) -> Result<()> {
    channel.validate(p1, p2)?;
    if channel.kind != ChannelKind::FermionFermion && inter.sigma != 0.0 {
        return Err(Error::config("SS and SF channels are defined for a Coulomb interaction only (sigma = 0)"));
    }
    Ok(())
}

/// The radial system of a channel.
pub fn build_system(channel: ChannelSpec, p1: ParticleSpec, p2: ParticleSpec, inter: InteractionSpec) -> Result<RadialSystem> {
    check_channel(&channel, &p1, &p2, &inter)?;
    let kind = match channel.kind {
        ChannelKind::ScalarScalar => SystemKind::ScalarScalar { ell: channel.int_j() },
        ChannelKind::ScalarFermion => SystemKind::ScalarFermion { two_j: channel.two_j, parity: channel.parity },
        ChannelKind::FermionFermion if channel.two_j == 0 => SystemKind::FermionFermionJ0 { parity: channel.parity },
        ChannelKind::FermionFermion => SystemKind::FermionFermion { j: channel.int_j(), parity: channel.parity },
    };
    Ok(RadialSystem { kind, channel, particles: (p1, p2), interaction: inter })
}

/// Limiting one-body systems of a channel. Two-fermion channels yield one Dirac
/// (or Schrödinger) system per orbital content of the parity family.
pub fn limit_system(
    kind: LimitKind,
    channel: ChannelSpec,
    p1: ParticleSpec,
    p2: ParticleSpec,
    inter: InteractionSpec,
) -> Result<Vec<RadialSystem>> {
    channel.validate(&p1, &p2)?;
    let two_j = channel.two_j as i32;
    let kinds: Vec<SystemKind> = match (kind, channel.kind) {
        (LimitKind::DiracOfLighter, ChannelKind::ScalarFermion) => {
            let k = (two_j + 1) / 2;
            vec![SystemKind::Dirac { kappa: if channel.parity == Parity::I { -k } else { k } }]
        }
        (LimitKind::DiracOfLighter, ChannelKind::FermionFermion) => {
            let j = two_j / 2;
            let pair = if channel.parity == Parity::I { [-(j + 1), j] } else { [-j, j + 1] };
            pair.into_iter().filter(|&k| k != 0).map(|kappa| SystemKind::Dirac { kappa }).collect()
        }
        (LimitKind::KleinGordonOfLighter, ChannelKind::ScalarScalar) => {
            vec![SystemKind::KleinGordon { ell: channel.int_j() }]
        }
        (LimitKind::KleinGordonOfLighter, ChannelKind::ScalarFermion) => {
            vec![SystemKind::KleinGordon { ell: sf_orbital(channel) }]
        }
        (LimitKind::Schroedinger, ChannelKind::ScalarScalar) => vec![SystemKind::Schroedinger { ell: channel.int_j() }],
        (LimitKind::Schroedinger, ChannelKind::ScalarFermion) => {
            vec![SystemKind::Schroedinger { ell: sf_orbital(channel) }]
        }
        (LimitKind::Schroedinger, ChannelKind::FermionFermion) => {
            let j = channel.int_j();
            match channel.parity {
                Parity::I => vec![SystemKind::Schroedinger { ell: j }],
                Parity::II if j == 0 => vec![SystemKind::Schroedinger { ell: 1 }],
                Parity::II => vec![SystemKind::Schroedinger { ell: j - 1 }, SystemKind::Schroedinger { ell: j + 1 }],
            }
        }
        _ => {
            return Err(Error::config(format!("limit {kind:?} is not available for channel {:?}", channel.kind)));
        }
    };
    Ok(kinds
        .into_iter()
        .map(|kind| RadialSystem { kind, channel, particles: (p1, p2), interaction: inter })
        .collect())
}

fn sf_orbital(channel: ChannelSpec) -> u32 {
    match channel.parity {
        Parity::I => (channel.two_j - 1) / 2,
        Parity::II => (channel.two_j + 1) / 2,
    }
}

/// Two-fermion coefficients (E, F, G) in their parity-I form, with the mass profile
/// `ms` = M + σr and `mu` passed explicitly. Parity II follows from
/// `ms → −mu`, `mu → −ms`.
pub fn ff_coefficients_reference<T: Field>(r: &T, lambda_r: &T, ms: &T, mu: &T, j: f64) -> (T, T, T) {
    let jj = j * (j + 1.0);
    let two_l = lambda_r.clone() * 2.0;
    let e = mu.clone() * jj.sqrt() / (r.clone() * lambda_r.clone());
    let f = (lambda_r.square() - mu.square()) / two_l.clone();
    let g = (lambda_r.square() - ms.square()) / two_l - (r.square() * lambda_r.clone()).recip() * (2.0 * jj);
    (e, f, g)
}

impl RadialSystem {
    pub fn dim(&self) -> usize {
        match self.kind {
            SystemKind::FermionFermion { .. } => 4,
            _ => 2,
        }
    }

    fn masses(&self) -> (f64, f64) {
        (self.particles.0.mass, self.particles.1.mass)
    }

    /// Mass of the particle that survives a one-body limit.
    fn light_mass(&self) -> f64 {
        let (p1, p2) = self.particles;
        match self.kind {
            SystemKind::Dirac { .. } => match (p1.spin, p2.spin) {
                (Spin::Fermion, Spin::Fermion) => p1.mass.min(p2.mass),
                (Spin::Fermion, _) => p1.mass,
                _ => p2.mass,
            },
            SystemKind::KleinGordon { .. } => match (p1.spin, p2.spin) {
                (Spin::Scalar, Spin::Scalar) => p1.mass.min(p2.mass),
                (Spin::Scalar, _) => p1.mass,
                _ => p2.mass,
            },
            _ => p1.mass.min(p2.mass),
        }
    }

    /// λ at zero binding: m₁ + m₂, or the light mass for one-body limits, or 0 for Schrödinger.
    pub fn threshold(&self) -> f64 {
        let (m1, m2) = self.masses();
        match self.kind {
            SystemKind::Dirac { .. } | SystemKind::KleinGordon { .. } => self.light_mass(),
            SystemKind::Schroedinger { .. } => 0.0,
            _ => m1 + m2,
        }
    }

    /// Mass governing the nonrelativistic scale of this system.
    pub fn reduced_mass(&self) -> f64 {
        let (m1, m2) = self.masses();
        match self.kind {
            SystemKind::Dirac { .. } | SystemKind::KleinGordon { .. } => self.light_mass(),
            _ => m1 * m2 / (m1 + m2),
        }
    }

    /// Characteristic length min(1/(m_R α), (m_R σ)^(−1/3)).
    pub fn scale_length(&self) -> f64 {
        let m = self.reduced_mass();
        let a = self.interaction.alpha;
        let s = self.interaction.sigma;
        let coulomb = if a > 0.0 { 1.0 / (m * a) } else { f64::INFINITY };
        let linear = if s > 0.0 { (m * s).powf(-1.0 / 3.0) } else { f64::INFINITY };
        let l = coulomb.min(linear);
        if l.is_finite() {
            l
        } else {
            1.0 / m
        }
    }

    pub fn lambda(&self, e: f64) -> f64 {
        self.threshold() + e
    }

    pub fn component_names(&self) -> &'static [&'static str] {
        match self.kind {
            SystemKind::ScalarScalar { .. } | SystemKind::KleinGordon { .. } | SystemKind::Schroedinger { .. } => {
                &["u", "du"]
            }
            SystemKind::ScalarFermion { .. } | SystemKind::Dirac { .. } => &["f", "g"],
            SystemKind::FermionFermion { .. } => &["a+", "b-", "u+", "v-"],
            SystemKind::FermionFermionJ0 { .. } => &["a+", "u+"],
        }
    }

    /// Components entering the L² norm (the derivative slot of second-order equations is excluded).
    pub fn norm_mask(&self) -> Vec<bool> {
        match self.kind {
            SystemKind::ScalarScalar { .. } | SystemKind::KleinGordon { .. } | SystemKind::Schroedinger { .. } => {
                vec![true, false]
            }
            _ => vec![true; self.dim()],
        }
    }

    /// A(r) row-major for y' = −A y, at binding energy `e`.
    pub fn coefficients<T: Field>(&self, r: &T, e: f64) -> Vec<T> {
        let (m1, m2) = self.masses();
        let alpha = self.interaction.alpha;
        let sigma = self.interaction.sigma;
        let eps = r.recip() * alpha + e;
        let zero = r.lift(0.0);
        let inv_r = r.recip();
        match self.kind {
            SystemKind::ScalarScalar { ell } => {
                let big = m1 + m2;
                let lr = eps.clone() + big;
                // η² = ε(2M+ε)(2m₁+ε)(2m₂+ε)/(4λ(r)²)
                let eta2 = eps.clone() * (eps.clone() + 2.0 * big) * (eps.clone() + 2.0 * m1) * (eps.clone() + 2.0 * m2)
                    / (lr.square() * 4.0);
                let l2 = f64::from(ell * (ell + 1));
                let k = eta2 - inv_r.square() * l2;
                let p = inv_r.clone() * 2.0 - (r.square() * lr).recip() * (alpha / 2.0);
                vec![zero.clone(), zero.lift(-1.0), k, p]
            }
            SystemKind::KleinGordon { ell } => {
                let m = self.light_mass();
                let l2 = f64::from(ell * (ell + 1));
                let k = eps.clone() * (eps + 2.0 * m) - inv_r.square() * l2;
                vec![zero.clone(), zero.lift(-1.0), k, inv_r * 2.0]
            }
            SystemKind::Schroedinger { ell } => {
                let mr = self.reduced_mass();
                let l2 = f64::from(ell * (ell + 1));
                let k = (eps - r.clone() * sigma) * (2.0 * mr) - inv_r.square() * l2;
                vec![zero.clone(), zero.lift(-1.0), k, inv_r * 2.0]
            }
            SystemKind::Dirac { kappa } => {
                let m = self.light_mass();
                let kf = f64::from(kappa);
                vec![
                    inv_r.clone() * (kf + 1.0),
                    -(eps.clone() + 2.0 * m),
                    eps - r.clone() * sigma,
                    inv_r * (1.0 - kf),
                ]
            }
            SystemKind::ScalarFermion { two_j, parity } => {
                let (ms, mf) = (m1, m2);
                let j = f64::from(two_j) / 2.0;
                let lr = eps.clone() + (ms + mf);
                let two_l = lr.clone() * 2.0;
                // (λ(r) + m_F)² − m_S² and (λ(r) − m_F)² − m_S²
                let plus = (eps.clone() + 2.0 * mf) * (eps.clone() + 2.0 * (ms + mf));
                let minus = eps.clone() * (eps.clone() + 2.0 * ms);
                let (p, q) = match parity {
                    Parity::I => (plus / two_l.clone(), minus / two_l),
                    Parity::II => (minus / two_l.clone(), plus / two_l),
                };
                let a = (r.square() * lr).recip() * (alpha / 2.0);
                vec![
                    -(inv_r.clone() * (j - 0.5) + a.clone()),
                    -p,
                    q,
                    inv_r * (j + 1.5) - a,
                ]
            }
            SystemKind::FermionFermion { j, parity } => {
                let (e_, f, g) = self.ff_efg(r, &eps, f64::from(j), parity);
                let z = zero;
                vec![
                    z.clone(), e_.clone(), -f.clone(), z.clone(),
                    e_.clone(), inv_r.clone(), z.clone(), f,
                    g.clone(), z.clone(), inv_r.clone() * 2.0, e_.clone(),
                    z, -g, e_, inv_r,
                ]
            }
            SystemKind::FermionFermionJ0 { parity } => {
                let (_, f, g) = self.ff_efg(r, &eps, 0.0, parity);
                vec![zero, -f, g, inv_r * 2.0]
            }
        }
    }

    /// Cancellation-free (E, F, G) of the two-fermion system.
    fn ff_efg<T: Field>(&self, r: &T, eps: &T, j: f64, parity: Parity) -> (T, T, T) {
        let (m1, m2) = self.masses();
        let big = m1 + m2;
        let mu = m1 - m2;
        let sigma = self.interaction.sigma;
        let jj = j * (j + 1.0);
        let lr = eps.clone() + big;
        let two_l = lr.clone() * 2.0;
        // λ(r)² − μ² = (2m₂ + ε)(2m₁ + ε)
        let d_mu = (eps.clone() + 2.0 * m2) * (eps.clone() + 2.0 * m1);
        // λ(r)² − (M + σr)² = (ε − σr)(2M + ε + σr)
        let sr = r.clone() * sigma;
        let d_ms = (eps.clone() - sr.clone()) * (eps.clone() + sr.clone() + 2.0 * big);
        let centrifugal = (r.square() * lr.clone()).recip() * (2.0 * jj);
        let rl = r.clone() * lr;
        match parity {
            Parity::I => {
                let e = rl.recip() * (jj.sqrt() * mu);
                (e, d_mu / two_l.clone(), d_ms / two_l - centrifugal)
            }
            Parity::II => {
                let e = -((sr + big) / rl) * jj.sqrt();
                (e, d_ms / two_l.clone(), d_mu / two_l - centrifugal)
            }
        }
    }

    /// y′ = −A(r) y for plain floating point.
    pub fn rhs(&self, r: f64, e: f64, y: &[f64], dy: &mut [f64]) {
        let a = self.coefficients(&r, e);
        let d = self.dim();
        let cols = y.len() / d;
        for c in 0..cols {
            for i in 0..d {
                let mut s = 0.0;
                for k in 0..d {
                    s += a[i * d + k] * y[c * d + k];
                }
                dy[c * d + i] = -s;
            }
        }
    }

    /// Residual ‖y′ + A y‖∞ of a vector function sampled via central differences.
    pub fn residual(&self, e: f64, r: f64, f: impl Fn(f64) -> Vec<f64>) -> f64 {
        let h = 1e-4 * r;
        let yp = f(r + h);
        let ym = f(r - h);
        let yp2 = f(r + 2.0 * h);
        let ym2 = f(r - 2.0 * h);
        let y = f(r);
        let a = self.coefficients(&r, e);
        let d = self.dim();
        let mut worst: f64 = 0.0;
        let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..d {
            let dy = (8.0 * (yp[i] - ym[i]) - (yp2[i] - ym2[i])) / (12.0 * h);
            let ay: f64 = (0..d).map(|k| a[i * d + k] * y[k]).sum();
            worst = worst.max((dy + ay).abs());
        }
        worst / scale.max(f64::MIN_POSITIVE)
    }
}

/// Regular closed-form solutions of a free (α = σ = 0) system at λ above threshold.
#[derive(Debug, Clone)]
pub struct FreeSolutionBasis {
    system: RadialSystem,
    pub lambda: f64,
    pub k: f64,
}

/// k = √((λ² − M²)(λ² − μ²))/(2λ).
pub fn free_wavenumber(lambda: f64, m1: f64, m2: f64) -> Result<f64> {
    let big = m1 + m2;
    let mu = m1 - m2;
    if !(lambda > big) {
        return Err(Error::domain(format!("λ = {lambda} is not above the threshold {big}")));
    }
    Ok(((lambda - big) * (lambda + big) * (lambda - mu) * (lambda + mu)).sqrt() / (2.0 * lambda))
}

pub fn free_solution_basis(system: &RadialSystem, lambda: f64) -> Result<FreeSolutionBasis> {
    if system.interaction.alpha != 0.0 || system.interaction.sigma != 0.0 {
        return Err(Error::domain("free solutions need alpha = sigma = 0"));
    }
    let (m1, m2) = system.masses();
    let k = match system.kind {
        SystemKind::ScalarScalar { .. } | SystemKind::ScalarFermion { .. } | SystemKind::FermionFermion { .. } | SystemKind::FermionFermionJ0 { .. } => {
            free_wavenumber(lambda, m1, m2)?
        }
        _ => return Err(Error::domain("free solutions are provided for the two-body channels only")),
    };
    Ok(FreeSolutionBasis { system: system.clone(), lambda, k })
}

impl FreeSolutionBasis {
    /// Number of independent regular solutions.
    pub fn count(&self) -> usize {
        self.system.dim() / 2
    }

    /// Member `index` evaluated at r.
    pub fn eval(&self, index: usize, r: f64) -> Vec<f64> {
        let (m1, m2) = self.system.masses();
        let lam = self.lambda;
        let k = self.k;
        let x = k * r;
        match self.system.kind {
            SystemKind::ScalarScalar { ell } => {
                let jl = spherical_bessel(ell, x);
                let djl = f64::from(ell) / x * jl - spherical_bessel(ell + 1, x);
                vec![jl, k * djl]
            }
            SystemKind::ScalarFermion { two_j, parity } => {
                let ell = (two_j - 1) / 2;
                let (ms, mf) = (m1, m2);
                let mf = if parity == Parity::I { mf } else { -mf };
                let pref = -2.0 * k * lam / ((lam + mf).powi(2) - ms * ms);
                vec![spherical_bessel(ell, x), pref * spherical_bessel(ell + 1, x)]
            }
            SystemKind::FermionFermion { j, parity } => {
                let (a, b) = if index == 0 { (1.0, 0.0) } else { (0.0, 1.0) };
                ff_free(j, parity, a, b, lam, k, r, m1, m2).to_vec()
            }
            SystemKind::FermionFermionJ0 { parity } => {
                let y = ff_free(0, parity, 1.0, 0.0, lam, k, r, m1, m2);
                vec![y[0], y[2]]
            }
            _ => unreachable!("checked at construction"),
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn ff_free(j: u32, parity: Parity, a: f64, b: f64, lam: f64, k: f64, r: f64, m1: f64, m2: f64) -> [f64; 4] {
    let mu = match parity {
        Parity::I => m1 - m2,
        Parity::II => -(m1 + m2),
    };
    let jf = f64::from(j);
    let big_j = (jf * (jf + 1.0)).sqrt();
    let d = lam * lam - mu * mu;
    let x = k * r;
    let j0 = spherical_bessel(j, x);
    let j1 = spherical_bessel(j + 1, x);
    [
        a * j0,
        b * j0,
        (2.0 * a * jf * lam + 2.0 * b * big_j * mu) / (d * r) * j0 - 2.0 * a * k * lam / d * j1,
        -(2.0 * a * big_j * mu + 2.0 * b * (jf + 1.0) * lam) / (d * r) * j0 + 2.0 * b * k * lam / d * j1,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::free_total_energy;
    use crate::series::Series;
    use proptest::prelude::*;

    fn fermions(m1: f64, m2: f64) -> (ParticleSpec, ParticleSpec) {
        (ParticleSpec::fermion(m1).unwrap(), ParticleSpec::fermion(m2).unwrap())
    }

    /// Direct transcription of the uncancelled formulas.
    fn naive(sys: &RadialSystem, r: f64, lam: f64) -> Vec<f64> {
        let (m1, m2) = sys.masses();
        let (al, sg) = (sys.interaction.alpha, sys.interaction.sigma);
        let lr = lam + al / r;
        match sys.kind {
            SystemKind::ScalarScalar { ell } => {
                let l2 = f64::from(ell * (ell + 1));
                let eta2 = lr * lr / 4.0 + (m1 * m1 - m2 * m2).powi(2) / (4.0 * lr * lr) - (m1 * m1 + m2 * m2) / 2.0;
                vec![0.0, -1.0, eta2 - l2 / (r * r), 2.0 / r - al / (2.0 * r * r * lr)]
            }
            SystemKind::FermionFermion { j, parity } => {
                let (ms, mu) = (m1 + m2 + sg * r, m1 - m2);
                let (ms, mu) = if parity == Parity::I { (ms, mu) } else { (-mu, -ms) };
                let (e, f, g) = ff_coefficients_reference(&r, &lr, &ms, &mu, f64::from(j));
                vec![0.0, e, -f, 0.0, e, 1.0 / r, 0.0, f, g, 0.0, 2.0 / r, e, 0.0, -g, e, 1.0 / r]
            }
            SystemKind::ScalarFermion { two_j, parity } => {
                let j = f64::from(two_j) / 2.0;
                let mf = if parity == Parity::I { m2 } else { -m2 };
                let c = al / (2.0 * r * (lam * r + al));
                let p = ((lr + mf).powi(2) - m1 * m1) / (2.0 * lr);
                let q = ((lr - mf).powi(2) - m1 * m1) / (2.0 * lr);
                vec![-((j - 0.5) / r + c), -p, q, (j + 1.5) / r - c]
            }
            _ => unimplemented!(),
        }
    }

    #[test]
    fn cancellation_free_forms_match_transcription() {
        let (f1, f2) = fermions(1.3, 0.7);
        let s = ParticleSpec::scalar(1.1).unwrap();
        let inter = InteractionSpec::new(0.3, 0.05, 0.0).unwrap();
        let coul = InteractionSpec::coulomb(0.3).unwrap();
        let systems = vec![
            build_system(ChannelSpec::fermion_fermion(2, Parity::I), f1, f2, inter).unwrap(),
            build_system(ChannelSpec::fermion_fermion(1, Parity::II), f1, f2, inter).unwrap(),
            build_system(ChannelSpec::scalar_scalar(2), s, ParticleSpec::scalar(0.4).unwrap(), coul).unwrap(),
            build_system(ChannelSpec::scalar_fermion(3, Parity::I).unwrap(), s, f2, coul).unwrap(),
            build_system(ChannelSpec::scalar_fermion(1, Parity::II).unwrap(), s, f2, coul).unwrap(),
        ];
        for sys in &systems {
            for &r in &[0.05, 0.7, 3.0] {
                let e = -0.03;
                let a = sys.coefficients(&r, e);
                let b = naive(sys, r, sys.lambda(e));
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()), "{:?} r={r}: {x} vs {y}", sys.kind);
                }
            }
        }
    }

    #[test]
    fn equal_masses_kill_parity_one_coupling() {
        let (f1, f2) = fermions(1.0, 1.0);
        let sys = build_system(ChannelSpec::fermion_fermion(3, Parity::I), f1, f2, InteractionSpec::cornell(0.4, 0.2).unwrap()).unwrap();
        for &r in &[0.01, 0.5, 7.0] {
            let a = sys.coefficients(&r, -0.1);
            assert_eq!(a[1], 0.0);
            assert_eq!(a[4], 0.0);
        }
    }

    proptest! {
        #[test]
        fn parity_substitution(r in 0.01f64..10.0, lam in 0.5f64..3.0, m1 in 0.1f64..2.0, m2 in 0.1f64..2.0, sg in 0.0f64..0.5, al in 0.0f64..0.5, j in 1u32..5) {
            let (p1, p2) = fermions(m1, m2);
            let inter = InteractionSpec::new(al, sg, 0.0).unwrap();
            let one = build_system(ChannelSpec::fermion_fermion(j, Parity::I), p1, p2, inter).unwrap();
            let two = build_system(ChannelSpec::fermion_fermion(j, Parity::II), p1, p2, inter).unwrap();
            let lr = lam + al / r;
            let ms = m1 + m2 + sg * r;
            let mu = m1 - m2;
            let (e1, f1, g1) = ff_coefficients_reference(&r, &lr, &ms, &mu, f64::from(j));
            let (e2, f2, g2) = ff_coefficients_reference(&r, &lr, &(-mu), &(-ms), f64::from(j));
            let e = lam - m1 - m2;
            let a1 = one.coefficients(&r, e);
            let a2 = two.coefficients(&r, e);
            let tol = |v: f64| 1e-12 * (1.0 + v.abs());
            prop_assert!((a1[1] - e1).abs() < tol(e1) && (a1[7] - f1).abs() < tol(f1) && (a1[8] - g1).abs() < tol(g1));
            prop_assert!((a2[1] - e2).abs() < tol(e2) && (a2[7] - f2).abs() < tol(f2) && (a2[8] - g2).abs() < tol(g2));
        }

        #[test]
        fn sf_parity_maps_by_fermion_mass_sign(r in 0.01f64..10.0, e in -0.3f64..-0.01, ms in 0.3f64..2.0, mf in 0.3f64..2.0, two_j in 0u32..4) {
            let two_j = 2 * two_j + 1;
            let s = ParticleSpec::scalar(ms).unwrap();
            let inter = InteractionSpec::coulomb(0.2).unwrap();
            let one = build_system(ChannelSpec::scalar_fermion(two_j, Parity::I).unwrap(), s, ParticleSpec::fermion(mf).unwrap(), inter).unwrap();
            let two = build_system(ChannelSpec::scalar_fermion(two_j, Parity::II).unwrap(), s, ParticleSpec::fermion(mf).unwrap(), inter).unwrap();
            let a1 = one.coefficients(&r, e);
            let a2 = two.coefficients(&r, e);
            // swapping m_F → −m_F exchanges the two off-diagonal magnitudes
            prop_assert!((a1[1] + a2[2]).abs() <= 1e-12 * (1.0 + a1[1].abs()));
            prop_assert!((a1[2] + a2[1]).abs() <= 1e-12 * (1.0 + a1[2].abs()));
            prop_assert_eq!(a1[0], a2[0]);
        }
    }

    #[test]
    fn series_and_float_agree() {
        let (f1, f2) = fermions(1.2, 0.5);
        let sys = build_system(ChannelSpec::fermion_fermion(1, Parity::II), f1, f2, InteractionSpec::cornell(0.3, 0.1).unwrap()).unwrap();
        let s = Series::variable(30);
        let a = sys.coefficients(&s, -0.05);
        for &r in &[1e-3, 1e-2] {
            let f = sys.coefficients(&r, -0.05);
            for (x, y) in a.iter().zip(&f) {
                assert!((x.eval(r) - y).abs() <= 1e-10 * (1.0 + y.abs()));
            }
        }
    }

    fn free_cases() -> Vec<RadialSystem> {
        let (f1, f2) = fermions(1.3, 0.7);
        let (s1, s2) = (ParticleSpec::scalar(1.1).unwrap(), ParticleSpec::scalar(0.6).unwrap());
        let free = InteractionSpec::coulomb(0.0).unwrap();
        let mut v = vec![];
        for ell in 0..3 {
            v.push(build_system(ChannelSpec::scalar_scalar(ell), s1, s2, free).unwrap());
        }
        for two_j in [1, 3, 5] {
            for p in [Parity::I, Parity::II] {
                v.push(build_system(ChannelSpec::scalar_fermion(two_j, p).unwrap(), s1, f2, free).unwrap());
            }
        }
        for j in 0..4 {
            for p in [Parity::I, Parity::II] {
                v.push(build_system(ChannelSpec::fermion_fermion(j, p), f1, f2, free).unwrap());
            }
        }
        v
    }

    #[test]
    fn free_solutions_satisfy_systems() {
        for sys in free_cases() {
            let (m1, m2) = sys.masses();
            let lam = free_total_energy(0.8, m1, m2).unwrap();
            let basis = free_solution_basis(&sys, lam).unwrap();
            let e = lam - sys.threshold();
            for idx in 0..basis.count() {
                let mut worst: f64 = 0.0;
                let mut x = 0.1;
                while x <= 50.0 {
                    let r = x / basis.k;
                    worst = worst.max(sys.residual(e, r, |t| basis.eval(idx, t)));
                    x *= 1.15;
                }
                assert!(worst < 1e-9, "{:?} #{idx}: {worst}", sys.kind);
            }
        }
    }

    #[test]
    fn free_wavenumber_equal_masses() {
        let k = free_wavenumber(2.5, 1.0, 1.0).unwrap();
        assert!((k - (2.5f64 * 2.5 - 4.0).sqrt() / 2.0).abs() < 1e-15);
        assert!(free_wavenumber(1.9, 1.0, 1.0).is_err());
        let k = free_wavenumber(free_total_energy(0.37, 0.9, 0.2).unwrap(), 0.9, 0.2).unwrap();
        assert!((k - 0.37).abs() < 1e-14);
    }

    #[test]
    fn build_rejects_mismatches() {
        let s = ParticleSpec::scalar(1.0).unwrap();
        let f = ParticleSpec::fermion(1.0).unwrap();
        let cornell = InteractionSpec::cornell(0.1, 0.1).unwrap();
        assert!(build_system(ChannelSpec::scalar_scalar(0), s, s, cornell).is_err());
        assert!(build_system(ChannelSpec::fermion_fermion(0, Parity::I), s, f, cornell).is_err());
        assert!(build_system(ChannelSpec::fermion_fermion(0, Parity::I), f, f, cornell).is_ok());
    }

    #[test]
    fn dirac_mixing_decouples() {
        // m₁ → ∞ coefficient matrices, mixed by the orthogonal T_I / T_II
        for parity in [Parity::I, Parity::II] {
            let j = 2.0f64;
            let s0 = (j / (2.0 * j + 1.0)).sqrt();
            let s1 = ((j + 1.0) / (2.0 * j + 1.0)).sqrt();
            let r = 0.83;
            let (e, f, g) = dirac_efg(r, j, 0.9, 1.0, -0.02, 0.1, parity);
            let c = [[0.0, e, -f, 0.0], [e, 1.0 / r, 0.0, f], [g, 0.0, 2.0 / r, e], [0.0, -g, e, 1.0 / r]];
            // y = T z (parity I) or z = T y (parity II)
            let t1 = [[0.0, 0.0, s0, s1], [0.0, 0.0, s1, -s0], [s1, -s0, 0.0, 0.0], [s0, s1, 0.0, 0.0]];
            let t2 = [[0.0, 0.0, s0, s1], [0.0, 0.0, -s1, s0], [s1, s0, 0.0, 0.0], [s0, -s1, 0.0, 0.0]];
            let mm = |a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]| {
                let mut o = [[0.0; 4]; 4];
                for i in 0..4 {
                    for k in 0..4 {
                        for l in 0..4 {
                            o[i][k] += a[i][l] * b[l][k];
                        }
                    }
                }
                o
            };
            let tr = |a: &[[f64; 4]; 4]| {
                let mut o = [[0.0; 4]; 4];
                for i in 0..4 {
                    for k in 0..4 {
                        o[i][k] = a[k][i];
                    }
                }
                o
            };
            let mixed = match parity {
                Parity::I => mm(&tr(&t1), &mm(&c, &t1)),
                Parity::II => mm(&t2, &mm(&c, &tr(&t2))),
            };
            let mut off: f64 = 0.0;
            for (a, b) in [(0, 1), (0, 2), (3, 1), (3, 2)] {
                off = off.max(mixed[a][b].abs()).max(mixed[b][a].abs());
            }
            assert!(off < 1e-12, "{parity:?}: {off}");
        }
    }

    /// m₁ → ∞ limit of (E, F, G) at light mass m₂.
    fn dirac_efg(r: f64, j: f64, alpha: f64, m2: f64, e: f64, sigma: f64, parity: Parity) -> (f64, f64, f64) {
        let big_j = (j * (j + 1.0)).sqrt();
        let l2 = m2 + e + alpha / r;
        let (ed, fd, gd) = (big_j / r, l2 + m2, l2 - m2 - sigma * r);
        match parity {
            Parity::I => (ed, fd, gd),
            Parity::II => (-ed, gd, fd),
        }
    }

    #[test]
    fn limit_systems_for_channels() {
        let (f1, f2) = fermions(1000.0, 1.0);
        let c = InteractionSpec::coulomb(0.1).unwrap();
        let d = limit_system(LimitKind::DiracOfLighter, ChannelSpec::fermion_fermion(1, Parity::I), f1, f2, c).unwrap();
        let kappas: Vec<_> = d.iter().map(|s| s.kind).collect();
        assert_eq!(kappas, vec![SystemKind::Dirac { kappa: -2 }, SystemKind::Dirac { kappa: 1 }]);
        let d0 = limit_system(LimitKind::DiracOfLighter, ChannelSpec::fermion_fermion(0, Parity::II), f1, f2, c).unwrap();
        assert_eq!(d0[0].kind, SystemKind::Dirac { kappa: 1 });
        assert_eq!(d0.len(), 1);
        let sch = limit_system(LimitKind::Schroedinger, ChannelSpec::fermion_fermion(1, Parity::II), f1, f2, c).unwrap();
        assert_eq!(sch.len(), 2);
        assert!(limit_system(LimitKind::KleinGordonOfLighter, ChannelSpec::fermion_fermion(1, Parity::II), f1, f2, c).is_err());
        assert_eq!(d[0].threshold(), 1.0);
    }
}
