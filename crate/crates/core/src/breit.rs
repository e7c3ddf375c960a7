//! First-order Breit spin-spin shift of two-fermion states.
//!
//! States live in the 16-dimensional product of two Dirac spaces. Index
//! `4·(2p₁ + s₁) + (2p₂ + s₂)` with p = 0 for upper and 1 for lower Dirac
//! components and s = 0 for spin up. The four multiplets of the radial
//! reduction occupy the (upper, lower) blocks as M = (0,0), −M = (1,1),
//! −μ = (1,0), μ = (0,1), each in (singlet, triplet₊, triplet₀, triplet₋) order.

use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use crate::angular::{spherical_harmonic, spherical_triplet, SphereGrid, TripletKind};
use crate::model::{ChannelKind, Parity};
use crate::radial::RadialSystem;
use crate::shooting::{eigenfunction_full, FullComponents, SpectralResult};
use crate::{Error, Result};

type C64 = Complex<f64>;

/// Dirac blocks (p₁, p₂) of the multiplets M, −M, −μ, μ.
pub const MULTIPLET_BLOCKS: [(usize, usize); 4] = [(0, 0), (1, 1), (1, 0), (0, 1)];

/// Spin states over (s₁, s₂) = (↑↑, ↑↓, ↓↑, ↓↓): singlet, t₊, t₀, t₋.
fn spin_states() -> [[f64; 4]; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[0.0, h, -h, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0, h, h, 0.0], [0.0, 0.0, 0.0, 1.0]]
}

pub fn product_index(p1: usize, s1: usize, p2: usize, s2: usize) -> usize {
    4 * (2 * p1 + s1) + (2 * p2 + s2)
}

fn pauli(a: usize) -> [[C64; 2]; 2] {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match a {
        0 => [[z, one], [one, z]],
        1 => [[z, -i], [i, z]],
        _ => [[one, z], [z, -one]],
    }
}

/// Dirac α_A = [[0, σ_A], [σ_A, 0]] in the (p, s) ordering.
pub fn dirac_alpha(a: usize) -> DMatrix<C64> {
    let s = pauli(a);
    DMatrix::from_fn(4, 4, |row, col| {
        let (pr, sr) = (row / 2, row % 2);
        let (pc, sc) = (col / 2, col % 2);
        if pr != pc {
            s[sr][sc]
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// γ⁰ = diag(1, 1, −1, −1).
pub fn dirac_beta() -> DMatrix<C64> {
    DMatrix::from_fn(4, 4, |r, c| if r == c { C64::new(if r < 2 { 1.0 } else { -1.0 }, 0.0) } else { C64::new(0.0, 0.0) })
}

fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// Precomputed α₁·α₂ and α₁_A α₂_B.
struct BreitTensors {
    scalar: DMatrix<C64>,
    tensor: Vec<DMatrix<C64>>,
}

impl BreitTensors {
    fn new() -> Self {
        let al: Vec<DMatrix<C64>> = (0..3).map(dirac_alpha).collect();
        let mut scalar = DMatrix::zeros(16, 16);
        let mut tensor = Vec::with_capacity(9);
        for a in 0..3 {
            scalar += kron(&al[a], &al[a]);
            for b in 0..3 {
                tensor.push(kron(&al[a], &al[b]));
            }
        }
        Self { scalar, tensor }
    }

    fn at(&self, n: [f64; 3]) -> DMatrix<C64> {
        let mut m = self.scalar.clone();
        for a in 0..3 {
            for b in 0..3 {
                m += &self.tensor[3 * a + b] * C64::new(n[a] * n[b], 0.0);
            }
        }
        m
    }
}

fn direction(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// The Breit operator (g/2r)(α₁·α₂ + (α₁·n)(α₂·n)) at a point; Hermitian.
pub fn breit_matrix(g: f64, r: f64, theta: f64, phi: f64) -> DMatrix<C64> {
    BreitTensors::new().at(direction(theta, phi)) * C64::new(g / (2.0 * r), 0.0)
}

/// Angular 16-vector multiplying radial function `k` (a₀,a₁,b₀,b₁,c₀,c₁,d₀,d₁).
pub fn angular_vector(k: usize, j: u32, m: i32, parity: Parity, theta: f64, phi: f64) -> Result<[C64; 16]> {
    let zero = C64::new(0.0, 0.0);
    // slot vector (singlet, t₊, t₀, t₋) and multiplet index in the parity-I layout
    let mut slots = [zero; 4];
    let (block, phase) = match k {
        0 | 2 => (0, C64::new(1.0, 0.0)),
        1 | 3 => (1, C64::new(1.0, 0.0)),
        4 | 6 => (2, C64::new(0.0, 1.0)),
        5 | 7 => (3, C64::new(0.0, 1.0)),
        _ => return Err(Error::domain(format!("radial index {k} out of range"))),
    };
    let triplet = |kind: TripletKind| -> Result<Option<Vec<C64>>> {
        if kind.orbital(j).is_none() || (kind == TripletKind::B && j == 0) {
            return Ok(None);
        }
        Ok(Some(spherical_triplet(kind, j, m, theta, phi)?.components))
    };
    match k {
        0 | 1 => slots[0] = spherical_harmonic(j, m, theta, phi),
        _ => {
            let kind = match k {
                2 | 3 => TripletKind::B,
                4 | 5 => TripletKind::C,
                _ => TripletKind::D,
            };
            if let Some(c) = triplet(kind)? {
                slots[1..4].copy_from_slice(&c);
            }
        }
    }
    // parity II swaps the first two multiplets with the last two
    let block = match parity {
        Parity::I => block,
        Parity::II => (block + 2) % 4,
    };
    let (p1, p2) = MULTIPLET_BLOCKS[block];
    let spins = spin_states();
    let mut out = [zero; 16];
    for (slot, amp) in slots.iter().enumerate() {
        if *amp == zero {
            continue;
        }
        for s1 in 0..2 {
            for s2 in 0..2 {
                out[product_index(p1, s1, p2, s2)] += phase * amp * spins[slot][2 * s1 + s2];
            }
        }
    }
    Ok(out)
}

/// A two-fermion state in factorized form: 8 radial functions times angular 16-vectors.
#[derive(Debug, Clone, Serialize)]
pub struct State16 {
    pub j: u32,
    pub m: i32,
    pub parity: Parity,
    pub r: Vec<f64>,
    pub weights: Vec<f64>,
    /// radial[k][n], normalized so the assembled state has unit norm.
    pub radial: Vec<Vec<f64>>,
    #[serde(skip)]
    grid: SphereGrid,
}

fn grid_for(j: u32, refine: usize) -> SphereGrid {
    let nt = (2 * j as usize + 6) * refine;
    SphereGrid::new(nt, 2 * nt)
}

impl State16 {
    /// Full 16-vector at radial sample `n` and direction (θ, φ).
    pub fn value(&self, n: usize, theta: f64, phi: f64) -> Result<[C64; 16]> {
        let mut out = [C64::new(0.0, 0.0); 16];
        for k in 0..8 {
            let f = self.radial[k][n];
            if f == 0.0 {
                continue;
            }
            let v = angular_vector(k, self.j, self.m, self.parity, theta, phi)?;
            for i in 0..16 {
                out[i] += v[i] * f;
            }
        }
        Ok(out)
    }

    /// ∫ |Ψ|² d³r.
    pub fn norm(&self) -> Result<f64> {
        let overlap = angular_matrix(self.j, self.m, self.parity, &self.grid, None)?;
        Ok(contract(&overlap, &self.radial, &self.r, &self.weights, 2).re)
    }
}

/// M_kl = ∫ Φ_k† T Φ_l dΩ, with T the Breit angular operator or the identity.
fn angular_matrix(j: u32, m: i32, parity: Parity, grid: &SphereGrid, op: Option<&BreitTensors>) -> Result<DMatrix<C64>> {
    let mut out = DMatrix::zeros(8, 8);
    for (t, wt) in grid.theta.iter().zip(&grid.theta_weight) {
        for p in &grid.phi {
            let w = wt * grid.phi_weight;
            let phis: Vec<[C64; 16]> = (0..8).map(|k| angular_vector(k, j, m, parity, *t, *p)).collect::<Result<_>>()?;
            let tmat = op.map(|o| o.at(direction(*t, *p)));
            for l in 0..8 {
                let tl: Vec<C64> = match &tmat {
                    Some(tm) => (0..16).map(|i| (0..16).map(|q| tm[(i, q)] * phis[l][q]).sum()).collect(),
                    None => phis[l].to_vec(),
                };
                for k in 0..8 {
                    let s: C64 = (0..16).map(|i| phis[k][i].conj() * tl[i]).sum();
                    out[(k, l)] += s * w;
                }
            }
        }
    }
    Ok(out)
}

/// Σ_kl M_kl ∫ f_k f_l r^power dr.
fn contract(m: &DMatrix<C64>, radial: &[Vec<f64>], r: &[f64], w: &[f64], power: i32) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..8 {
        for l in 0..8 {
            if m[(k, l)].norm() == 0.0 {
                continue;
            }
            let integral: f64 = (0..r.len()).map(|n| w[n] * r[n].powi(power) * radial[k][n] * radial[l][n]).sum();
            acc += m[(k, l)] * integral;
        }
    }
    acc
}

/// Builds the normalized 16-component state from a full two-fermion component set.
pub fn assemble_state16(full: &FullComponents, weights: &[f64], j: u32, m: i32, parity: Parity) -> Result<State16> {
    if full.channel.kind != ChannelKind::FermionFermion || full.values.len() != 8 {
        return Err(Error::config("a 16-component state needs a two-fermion component set"));
    }
    if full.channel.two_j != 2 * j || full.channel.parity != parity {
        return Err(Error::config(format!(
            "component set is for j = {}, {:?}; requested j = {j}, {parity:?}",
            full.channel.j(),
            full.channel.parity
        )));
    }
    if m.unsigned_abs() > j {
        return Err(Error::domain(format!("|m| = {} exceeds j = {j}", m.abs())));
    }
    if weights.len() != full.r.len() {
        return Err(Error::config("quadrature weights do not match the radial grid"));
    }
    let mut state = State16 {
        j,
        m,
        parity,
        r: full.r.clone(),
        weights: weights.to_vec(),
        radial: full.values.clone(),
        grid: grid_for(j, 1),
    };
    let n2 = state.norm()?;
    if !(n2.is_finite() && n2 > 0.0) {
        return Err(Error::Internal("assembled state has zero norm".into()));
    }
    let s = 1.0 / n2.sqrt();
    for f in &mut state.radial {
        for v in f.iter_mut() {
            *v *= s;
        }
    }
    Ok(state)
}

/// ⟨Ψ|V_B|Ψ⟩ for a normalized state.
pub fn breit_shift(state: &State16, g: f64) -> Result<f64> {
    if g == 0.0 {
        return Ok(0.0);
    }
    let ops = BreitTensors::new();
    let coarse = angular_matrix(state.j, state.m, state.parity, &state.grid, Some(&ops))?;
    let fine = angular_matrix(state.j, state.m, state.parity, &grid_for(state.j, 2), Some(&ops))?;
    let a = contract(&coarse, &state.radial, &state.r, &state.weights, 1);
    let b = contract(&fine, &state.radial, &state.r, &state.weights, 1);
    let scale = b.norm().max(f64::MIN_POSITIVE);
    if (a - b).norm() > 1e-8 * scale {
        return Err(Error::Accuracy(format!("angular quadrature not converged ({:e} vs {:e})", a.re, b.re)));
    }
    if b.im.abs() > 1e-10 * scale {
        return Err(Error::Internal(format!("Breit expectation has an imaginary part {:e}", b.im)));
    }
    Ok(0.5 * g * b.re)
}

/// Assembles the m = 0 state of a two-fermion level and returns its Breit shift.
pub fn level_shift(result: &SpectralResult, system: &RadialSystem, g: f64) -> Result<f64> {
    let full = eigenfunction_full(result, system)?;
    let ch = system.channel;
    let state = assemble_state16(&full, &result.weights, ch.int_j(), 0, ch.parity)?;
    breit_shift(&state, g)
}

/// Singlet and triplet levels with their perturbed difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hyperfine {
    pub singlet_binding: f64,
    pub singlet_shift: f64,
    pub triplet_binding: f64,
    pub triplet_shift: f64,
    /// (E + ΔE)_triplet − (E + ΔE)_singlet in natural units.
    pub splitting: f64,
}

/// Hyperfine splitting between a singlet-type and a triplet-type level.
pub fn hyperfine_splitting(
    singlet: (&SpectralResult, &RadialSystem),
    triplet: (&SpectralResult, &RadialSystem),
    g: f64,
) -> Result<Hyperfine> {
    if singlet.1.particles != triplet.1.particles || singlet.1.interaction != triplet.1.interaction {
        return Err(Error::config("singlet and triplet solves use different particles or interaction"));
    }
    let ds = level_shift(singlet.0, singlet.1, g)?;
    let dt = level_shift(triplet.0, triplet.1, g)?;
    Ok(Hyperfine {
        singlet_binding: singlet.0.binding,
        singlet_shift: ds,
        triplet_binding: triplet.0.binding,
        triplet_shift: dt,
        splitting: (triplet.0.binding - singlet.0.binding) + (dt - ds),
    })
}
