//! Double shooting for radial eigenvalue problems.
//!
//! Regular solutions start from a Frobenius series near the origin and are
//! integrated out to the matching radius `r_c`; decaying solutions start at
//! `r_max` and are integrated inward. Both subspaces are kept orthonormal, so the
//! determinant of the joined columns at `r_c` is scale-free and vanishes exactly
//! at eigenvalues.
//!
//! All energies here are binding energies `E = λ − threshold`.

mod asymptotic;
mod eigenfunction;
mod frobenius;
mod matching;
mod reconstruct;
mod search;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use asymptotic::{asymptotic_start, outer_radius};
pub use eigenfunction::{count_nodes, Eigenfunction};
pub use frobenius::{frobenius_start, FrobeniusBasis};
pub use reconstruct::{eigenfunction_full, FullComponents};
pub use search::{brent, golden_min};

use crate::ode::OdeOptions;
use crate::radial::{RadialSystem, SystemKind};
use crate::{Error, Result};

/// Numerical knobs of a solve. Every radius override is absolute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub rtol: f64,
    pub atol: f64,
    pub series_order: usize,
    /// Resum the series at the handoff radius with diagonal Padé approximants.
    pub pade: bool,
    pub r0: Option<f64>,
    pub r_c: Option<f64>,
    pub r_max: Option<f64>,
    /// Multiplier on the default matching radius.
    pub r_c_scale: f64,
    /// Multiplier on the default outer radius.
    pub r_max_scale: f64,
    /// Required ∫κ dr between `r_c` and `r_max`.
    pub decay_log: f64,
    pub scan_points: usize,
    /// Relative tolerance on the binding energy in root refinement.
    pub root_rtol: f64,
    pub nodes_per_step: usize,
    pub max_steps: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-30,
            series_order: 30,
            pade: false,
            r0: None,
            r_c: None,
            r_max: None,
            r_c_scale: 1.0,
            r_max_scale: 1.0,
            decay_log: 42.0,
            scan_points: 400,
            root_rtol: 1e-13,
            nodes_per_step: 8,
            max_steps: 200_000,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be positive, got {v}")))
            }
        };
        positive(self.rtol, "rtol")?;
        positive(self.atol, "atol")?;
        positive(self.r_c_scale, "r_c_scale")?;
        positive(self.r_max_scale, "r_max_scale")?;
        positive(self.decay_log, "decay_log")?;
        positive(self.root_rtol, "root_rtol")?;
        for (v, name) in [(self.r0, "r0"), (self.r_c, "r_c"), (self.r_max, "r_max")] {
            if let Some(v) = v {
                positive(v, name)?;
            }
        }
        if self.series_order < 4 {
            return Err(Error::config("series_order must be >= 4"));
        }
        if self.scan_points < 2 {
            return Err(Error::config("scan_points must be >= 2"));
        }
        if self.nodes_per_step < 2 {
            return Err(Error::config("nodes_per_step must be >= 2"));
        }
        Ok(())
    }

    fn ode(&self, dense: bool) -> OdeOptions {
        OdeOptions { rtol: self.rtol, atol: self.atol, h_max: 0.0, max_steps: self.max_steps, dense }
    }
}

/// Radii used for one determinant evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub r0: f64,
    pub r_c: f64,
    pub r_max: f64,
}

/// Matching determinant at one energy.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub binding: f64,
    pub lambda: f64,
    /// det[Q_L | Q_R] with orthonormal columns, in [−1, 1].
    pub determinant: f64,
    /// Smallest singular value of the matching matrix.
    pub condition: f64,
    pub geometry: Geometry,
    /// Orthonormal left (regular) columns at `r_c`.
    pub left: DMatrix<f64>,
    /// Orthonormal right (decaying) columns at `r_c`.
    pub right: DMatrix<f64>,
}

/// One eigenstate with its normalized radial samples.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralResult {
    pub lambda: f64,
    pub binding: f64,
    pub nodes: usize,
    /// Index of the component carrying most of the norm.
    pub dominant: usize,
    pub component_names: Vec<String>,
    pub geometry: Geometry,
    /// Quadrature nodes and weights: ∫ f dr ≈ Σ w f(r).
    pub r: Vec<f64>,
    pub weights: Vec<f64>,
    /// components[i][n] at r[n].
    pub components: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub function: Eigenfunction,
}

impl SpectralResult {
    /// Normalized components at an arbitrary radius.
    pub fn eval(&self, r: f64) -> Vec<f64> {
        self.function.eval(r)
    }

    /// ∫ Σ_mask y² r² dr on the sample grid.
    pub fn norm(&self, mask: &[bool]) -> f64 {
        (0..self.r.len())
            .map(|n| {
                let s: f64 = self.components.iter().zip(mask).filter(|(_, m)| **m).map(|(c, _)| c[n] * c[n]).sum();
                self.weights[n] * self.r[n] * self.r[n] * s
            })
            .sum()
    }
}

/// Eigenvalues found in a bracket plus solve-level diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub levels: Vec<SpectralResult>,
    pub warnings: Vec<String>,
    pub determinant_evaluations: usize,
}

fn has_lambda_singularity(system: &RadialSystem) -> bool {
    matches!(
        system.kind,
        SystemKind::ScalarScalar { .. }
            | SystemKind::ScalarFermion { .. }
            | SystemKind::FermionFermion { .. }
            | SystemKind::FermionFermionJ0 { .. }
    )
}

/// Default series handoff radius.
fn default_r0(system: &RadialSystem, e: f64) -> f64 {
    let l = system.scale_length();
    let mut r0 = 1e-3 * l;
    let alpha = system.interaction.alpha;
    if alpha > 0.0 && has_lambda_singularity(system) {
        // the coefficients are singular where λ + α/r = 0
        r0 = r0.min(0.1 * alpha / system.lambda(e).abs());
    }
    r0
}

fn series_basis(system: &RadialSystem, e: f64, settings: &SolverSettings, r0: Option<f64>) -> Result<FrobeniusBasis> {
    let start = r0.or(settings.r0).unwrap_or_else(|| default_r0(system, e));
    let mut basis = frobenius_start(system, e, settings.series_order, start)?;
    basis.pade = settings.pade;
    if r0.is_none() && settings.r0.is_none() {
        for _ in 0..40 {
            if basis.tail_ratio() < 1e-16 {
                break;
            }
            basis.r0 *= 0.5;
        }
    }
    Ok(basis)
}

/// Radii for energy `e`, honoring overrides.
pub fn geometry(system: &RadialSystem, e: f64, settings: &SolverSettings) -> Result<Geometry> {
    settings.validate()?;
    let basis = series_basis(system, e, settings, None)?;
    let r_c = settings.r_c.unwrap_or(system.scale_length() * settings.r_c_scale);
    let r_max = match settings.r_max {
        Some(r) => {
            if asymptotic::decay_integral(system, e, r_c, r) < 1e3f64.ln() {
                return Err(Error::config(format!(
                    "r_max = {r:e} is too small: decay factor above 1e-3 at r_max"
                )));
            }
            r
        }
        None => outer_radius(system, e, r_c, settings.decay_log)? * settings.r_max_scale,
    };
    if !(basis.r0 < r_c && r_c < r_max) {
        return Err(Error::config(format!(
            "radii must satisfy r0 < r_c < r_max, got {:e}, {r_c:e}, {r_max:e}",
            basis.r0
        )));
    }
    Ok(Geometry { r0: basis.r0, r_c, r_max })
}

struct Matched {
    result: MatchResult,
    basis: FrobeniusBasis,
    left: matching::Sweep,
    right: matching::Sweep,
}

fn match_at(system: &RadialSystem, e: f64, geo: Geometry, settings: &SolverSettings, dense: bool) -> Result<Matched> {
    let d = system.dim();
    let k = d / 2;
    let basis = series_basis(system, e, settings, Some(geo.r0))?;
    let mut y0 = DMatrix::zeros(d, k);
    for j in 0..k {
        let v = basis.eval_handoff(j);
        for i in 0..d {
            y0[(i, j)] = v[i];
        }
    }
    let opt = settings.ode(dense);
    let left_points = matching::checkpoints(system, e, geo.r0, geo.r_c);
    let left = matching::sweep(system, e, y0, geo.r0, &left_points, &opt)?;
    let q_start = asymptotic_start(system, e, geo.r_max)?;
    let right_points = matching::checkpoints(system, e, geo.r_max, geo.r_c);
    let right = matching::sweep(system, e, q_start, geo.r_max, &right_points, &opt)?;
    let mut m = DMatrix::zeros(d, d);
    m.columns_mut(0, k).copy_from(&left.q_end);
    m.columns_mut(k, k).copy_from(&right.q_end);
    let condition = m.singular_values().min();
    let determinant = m.determinant();
    let result = MatchResult {
        binding: e,
        lambda: system.lambda(e),
        determinant,
        condition,
        geometry: geo,
        left: left.q_end.clone(),
        right: right.q_end.clone(),
    };
    Ok(Matched { result, basis, left, right })
}

/// Matching determinant at binding energy `e`.
pub fn spectral_determinant(system: &RadialSystem, e: f64, settings: &SolverSettings) -> Result<MatchResult> {
    let geo = geometry(system, e, settings)?;
    Ok(match_at(system, e, geo, settings, false)?.result)
}

/// Matching determinant with all radii fixed by the caller.
pub fn spectral_determinant_at(system: &RadialSystem, e: f64, geo: Geometry, settings: &SolverSettings) -> Result<MatchResult> {
    settings.validate()?;
    Ok(match_at(system, e, geo, settings, false)?.result)
}

/// Default bracket in binding energy for the first `max_count` levels.
pub fn default_bracket(system: &RadialSystem, max_count: usize) -> (f64, f64) {
    let m = system.reduced_mass();
    let a = system.interaction.alpha;
    let s = system.interaction.sigma;
    if s == 0.0 {
        // a free system has no bound states; any below-threshold window will do
        let lo = if a > 0.0 { -5.0 * m * a * a } else { -m };
        (lo, -1e-8 * m)
    } else {
        let lo = if a > 0.0 { -2.0 * m * a * a } else { 0.0 };
        (lo, 4.0 * s.sqrt() * max_count.max(1) as f64)
    }
}

/// Builds the normalized eigenstate at a refined energy.
pub fn eigenstate(system: &RadialSystem, e: f64, geo: Geometry, settings: &SolverSettings) -> Result<SpectralResult> {
    let matched = match_at(system, e, geo, settings, true)?;
    let mask = system.norm_mask();
    let (function, samples) =
        eigenfunction::assemble(matched.basis, &matched.left, &matched.right, &mask, settings.nodes_per_step)?;
    let dominant = eigenfunction::dominant_component(&samples.r, &samples.weights, &samples.components, &mask);
    let nodes = count_nodes(&samples.components[dominant], 1e-6);
    let mut warnings = Vec::new();
    if matched.result.condition > 1e-6 {
        warnings.push(format!("matching matrix not singular at the root (σ_min = {:e})", matched.result.condition));
    }
    Ok(SpectralResult {
        lambda: system.lambda(e),
        binding: e,
        nodes,
        dominant,
        component_names: system.component_names().iter().map(|s| s.to_string()).collect(),
        geometry: geo,
        r: samples.r,
        weights: samples.weights,
        components: samples.components,
        warnings,
        function,
    })
}

struct Scanner<'a> {
    system: &'a RadialSystem,
    settings: &'a SolverSettings,
    evaluations: usize,
    warnings: Vec<String>,
}

impl Scanner<'_> {
    fn det(&mut self, e: f64) -> Result<(f64, Geometry)> {
        self.evaluations += 1;
        let geo = geometry(self.system, e, self.settings)?;
        Ok((match_at(self.system, e, geo, self.settings, false)?.result.determinant, geo))
    }

    fn det_fixed(&mut self, e: f64, geo: Geometry) -> Result<f64> {
        self.evaluations += 1;
        Ok(match_at(self.system, e, geo, self.settings, false)?.result.determinant)
    }

    /// Refines a sign change on [a, b] with radii frozen at the shallow end.
    fn refine(&mut self, a: f64, b: f64) -> Result<(f64, Geometry)> {
        let (_, geo) = self.det(b)?;
        let fa = self.det_fixed(a, geo)?;
        let fb = self.det_fixed(b, geo)?;
        if fa.signum() == fb.signum() {
            return Err(Error::Accuracy(format!("sign change on [{a:e}, {b:e}] lost with frozen radii")));
        }
        let tol = self.settings.root_rtol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        let root = brent(|x| self.det_fixed(x, geo), a, b, fa, fb, tol, 200)?;
        Ok((root, geo))
    }

    /// Looks for a hidden pair of roots around a local minimum of |det|.
    fn split_pair(&mut self, a: f64, b: f64, sign: f64) -> Result<Vec<(f64, f64)>> {
        let (_, geo) = self.det(b)?;
        let (x, fx) = golden_min(|x| Ok(sign * self.det_fixed(x, geo)?), a, b, 60)?;
        if fx < 0.0 {
            self.warnings.push(format!("near-degenerate pair resolved around E = {x:e}"));
            Ok(vec![(a, x), (x, b)])
        } else {
            if fx < 1e-8 {
                self.warnings.push(format!("possible unresolved near-degenerate pair near E = {x:e} (|det| = {fx:e})"));
            }
            Ok(Vec::new())
        }
    }
}

fn scan_grid(system: &RadialSystem, lo: f64, hi: f64, n: usize, max_count: usize) -> Vec<f64> {
    let alpha = system.interaction.alpha;
    let m = system.reduced_mass();
    if system.interaction.sigma == 0.0 && alpha > 0.0 && hi < 0.0 {
        // uniform in the effective principal number n = α√(m/(2|E|)), with the
        // spacing set so that `n` points cover the first max_count + 1 shells
        let neff = |e: f64| alpha * (m / (2.0 * e.abs())).sqrt();
        let (a, b) = (neff(lo), neff(hi));
        let step = ((b - a) / (n - 1) as f64).min((max_count + 1) as f64 / (n - 1) as f64);
        let count = ((b - a) / step).ceil() as usize + 1;
        (0..count)
            .map(|i| {
                let t = (a + step * i as f64).min(b);
                -m * alpha * alpha / (2.0 * t * t)
            })
            .collect()
    } else {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }
}

/// Eigenvalues in the binding-energy bracket, ascending, at most `max_count`.
pub fn find_eigenvalues(
    system: &RadialSystem,
    bracket: (f64, f64),
    max_count: usize,
    settings: &SolverSettings,
) -> Result<Spectrum> {
    settings.validate()?;
    let (lo, hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::config(format!("bracket must satisfy lo < hi, got [{lo}, {hi}]")));
    }
    let inter = system.interaction;
    if inter.sigma == 0.0 && hi >= 0.0 {
        return Err(Error::domain("Coulomb bracket must lie below threshold (E < 0)"));
    }
    let mut spectrum = Spectrum { levels: Vec::new(), warnings: Vec::new(), determinant_evaluations: 0 };
    if max_count == 0 || (inter.alpha == 0.0 && inter.sigma == 0.0) {
        return Ok(spectrum);
    }
    let grid = scan_grid(system, lo, hi, settings.scan_points, max_count);
    let mut sc = Scanner { system, settings, evaluations: 0, warnings: Vec::new() };
    let mut roots: Vec<(f64, Geometry)> = Vec::new();
    let mut prev: Vec<(f64, f64)> = Vec::new();
    for &e in &grid {
        let d = match sc.det(e) {
            Ok((d, _)) => d,
            Err(err) if err.is_input_error() => return Err(err),
            Err(err) => {
                sc.warnings.push(format!("determinant failed at E = {e:e}: {err}"));
                prev.clear();
                continue;
            }
        };
        let mut intervals = Vec::new();
        if let Some(&(ep, dp)) = prev.last() {
            if dp.signum() != d.signum() {
                intervals.push((ep, e));
            } else if prev.len() >= 2 {
                let (epp, dpp) = prev[prev.len() - 2];
                if dp.abs() < dpp.abs() && dp.abs() < d.abs() && dpp.signum() == dp.signum() {
                    intervals.extend(sc.split_pair(epp, e, dp.signum())?);
                }
            }
        }
        for (a, b) in intervals {
            match sc.refine(a, b) {
                Ok(root) => roots.push(root),
                Err(err) => sc.warnings.push(format!("refinement on [{a:e}, {b:e}] failed: {err}")),
            }
        }
        prev.push((e, d));
        if roots.len() >= max_count {
            break;
        }
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    roots.dedup_by(|a, b| (a.0 - b.0).abs() <= 10.0 * settings.root_rtol * a.0.abs());
    roots.truncate(max_count);
    for (e, geo) in roots {
        match eigenstate(system, e, geo, settings) {
            Ok(level) => spectrum.levels.push(level),
            Err(err) => sc.warnings.push(format!("eigenfunction at E = {e:e} failed: {err}")),
        }
    }
    spectrum.warnings = sc.warnings;
    spectrum.determinant_evaluations = sc.evaluations;
    Ok(spectrum)
}

#[cfg(test)]
mod tests;
