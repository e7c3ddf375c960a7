//! Bundled parameter sets and recomputation of the reference tables.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::breit::level_shift;
use crate::constants::{string_tension_mev2, U_MEV};
use crate::model::{ChannelSpec, InteractionSpec, Parity, ParticleSpec};
use crate::oracles::{dirac_level, klein_gordon_level, schrodinger_level};
use crate::radial::{build_system, RadialSystem};
use crate::shooting::{default_bracket, eigenfunction_full, find_eigenvalues, SolverSettings, SpectralResult};
use crate::units::{EnergyScale, Units};
use crate::{Error, Result};

const ATOMS: &str = include_str!("../data/atoms.toml");
const MESONS: &str = include_str!("../data/mesons.toml");
const LEVELS: &str = include_str!("../data/levels.toml");

#[derive(Debug, Clone, Deserialize)]
pub struct AtomParticle {
    #[serde(default = "unit_charge")]
    pub charge: u32,
    pub mass_u: f64,
    pub kappa: f64,
}

fn unit_charge() -> u32 {
    1
}

#[derive(Debug, Clone, Deserialize)]
pub struct AtomSystem {
    pub label: String,
    pub heavy: String,
    pub light: String,
    pub units: String,
    pub hfs: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct AtomData {
    pub version: u32,
    pub alpha: f64,
    pub particles: BTreeMap<String, AtomParticle>,
    pub systems: Vec<AtomSystem>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct MesonFamily {
    pub quarks: [String; 2],
    pub sigma_gev_fm: f64,
    pub alpha_s: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct MesonState {
    pub table: u32,
    pub family: String,
    pub term: String,
    pub name: String,
    pub reference: f64,
    /// Energy rank within the channel, overriding the dominant-component family.
    #[serde(default)]
    pub rank: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct MesonData {
    pub version: u32,
    pub quarks: BTreeMap<String, f64>,
    pub families: BTreeMap<String, MesonFamily>,
    pub states: Vec<MesonState>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ScalarScalarRow {
    pub n: u32,
    pub l: u32,
    pub ratio: f64,
    pub schr: f64,
    pub kg: f64,
    pub num: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ScalarFermionRow {
    pub state: String,
    pub n: u32,
    pub l: u32,
    pub two_j: u32,
    /// KG, m_S/m_F = 0.1, 1, 10, Dirac.
    pub values: [f64; 5],
}

#[derive(Debug, Clone, Deserialize)]
pub struct LevelData {
    pub version: u32,
    pub alpha: f64,
    pub scalar_scalar: Vec<ScalarScalarRow>,
    pub scalar_fermion: Vec<ScalarFermionRow>,
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Internal(format!("bundled {what} data: {e}")))
}

pub fn atom_data() -> Result<AtomData> {
    parse(ATOMS, "atom")
}

pub fn meson_data() -> Result<MesonData> {
    parse(MESONS, "meson")
}

pub fn level_data() -> Result<LevelData> {
    parse(LEVELS, "level")
}

/// Mass ratios of the scalar-fermion columns.
pub const SF_RATIOS: [f64; 3] = [0.1, 1.0, 10.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableName {
    Table1,
    Table2,
    Table3,
    Table4,
    Table5,
}

impl FromStr for TableName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "table1" => TableName::Table1,
            "table2" => TableName::Table2,
            "table3" => TableName::Table3,
            "table4" => TableName::Table4,
            "table5" => TableName::Table5,
            other => return Err(Error::config(format!("unknown table '{other}' (expected table1 … table5)"))),
        })
    }
}

/// One compared quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub column: String,
    pub unit: String,
    pub reference: f64,
    pub computed: Option<f64>,
    /// (computed − reference)/|reference|.
    pub deviation: Option<f64>,
    pub error: Option<String>,
}

impl Cell {
    fn new(column: &str, unit: &str, reference: f64, computed: Result<f64>) -> Self {
        let (computed, error) = match computed {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Cell {
            column: column.to_string(),
            unit: unit.to_string(),
            reference,
            computed,
            deviation: computed.map(|v| (v - reference) / reference.abs()),
            error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub label: String,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub table: TableName,
    pub rows: Vec<TableRow>,
}

impl TableReport {
    pub fn max_abs_deviation(&self) -> Option<f64> {
        self.rows
            .iter()
            .flat_map(|r| r.cells.iter().filter_map(|c| c.deviation))
            .map(f64::abs)
            .reduce(f64::max)
    }
}

/// Spectroscopic term n ^(2S+1) L_J.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Term {
    pub n: u32,
    pub spin: u32,
    pub ell: u32,
    pub j: u32,
}

/// Which radial structure dominates a two-fermion level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    /// Spin singlet, ℓ = j.
    Singlet,
    /// Spin triplet, ℓ = j.
    Triplet,
    /// Spin triplet, ℓ = j − 1.
    LowerOrbital,
    /// Spin triplet, ℓ = j + 1.
    UpperOrbital,
}

impl FromStr for Term {
    type Err = Error;

    /// Parses "n 2S+1 L J", e.g. "1 3 S 1".
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let bad = || Error::config(format!("term '{s}' is not of the form 'n 2S+1 L J'"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let n: u32 = parts[0].parse().map_err(|_| bad())?;
        let mult: u32 = parts[1].parse().map_err(|_| bad())?;
        let ell = "SPDFGH".find(parts[2].to_ascii_uppercase().as_str()).ok_or_else(bad)? as u32;
        let j: u32 = parts[3].parse().map_err(|_| bad())?;
        if n == 0 || !(mult == 1 || mult == 3) || parts[2].len() != 1 {
            return Err(bad());
        }
        let spin = (mult - 1) / 2;
        let ok = if spin == 0 { j == ell } else { j + 1 >= ell && j <= ell + 1 && !(ell == 0 && j != 1) };
        if !ok {
            return Err(Error::config(format!("term '{s}' has inconsistent angular momenta")));
        }
        Ok(Term { n, spin, ell, j })
    }
}

impl Term {
    /// Two-fermion channel and radial family of the term.
    pub fn channel(&self) -> (ChannelSpec, Family) {
        let (parity, family) = if self.spin == 0 {
            (Parity::I, Family::Singlet)
        } else if self.ell == self.j {
            (Parity::I, Family::Triplet)
        } else if self.ell + 1 == self.j {
            (Parity::II, Family::LowerOrbital)
        } else {
            (Parity::II, Family::UpperOrbital)
        };
        (ChannelSpec::fermion_fermion(self.j, parity), family)
    }
}

/// Family of a solved two-fermion level from the weights of its full components.
pub fn level_family(result: &SpectralResult, system: &RadialSystem) -> Result<Family> {
    let ch = system.channel;
    if ch.two_j == 0 {
        return Ok(match ch.parity {
            Parity::I => Family::Singlet,
            Parity::II => Family::UpperOrbital,
        });
    }
    let full = eigenfunction_full(result, system)?;
    let weight = |idx: [usize; 2]| -> f64 {
        idx.iter()
            .map(|&i| (0..full.r.len()).map(|n| result.weights[n] * (full.r[n] * full.values[i][n]).powi(2)).sum::<f64>())
            .sum()
    };
    Ok(match ch.parity {
        Parity::I if weight([0, 1]) >= weight([2, 3]) => Family::Singlet,
        Parity::I => Family::Triplet,
        Parity::II if weight([4, 5]) >= weight([6, 7]) => Family::LowerOrbital,
        Parity::II => Family::UpperOrbital,
    })
}

/// Levels of one channel, solved once and shared between rows.
struct ChannelCache {
    system: RadialSystem,
    levels: Vec<(SpectralResult, Family)>,
}

impl ChannelCache {
    fn solve(system: RadialSystem, count: usize, settings: &SolverSettings) -> Result<Self> {
        let spec = find_eigenvalues(&system, default_bracket(&system, count), count, settings)?;
        let levels = spec
            .levels
            .into_iter()
            .map(|l| {
                let f = level_family(&l, &system)?;
                Ok((l, f))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { system, levels })
    }

    /// The n-th level (1-based) of a family.
    fn find(&self, family: Family, n: u32) -> Result<&SpectralResult> {
        self.levels
            .iter()
            .filter(|(_, f)| *f == family)
            .nth(n as usize - 1)
            .map(|(l, _)| l)
            .ok_or_else(|| Error::Accuracy(format!("level {n} of family {family:?} not found in the solved window")))
    }
}

fn fermion(mass: f64, kappa: f64) -> Result<ParticleSpec> {
    ParticleSpec::fermion(mass)?.with_kappa(kappa)
}

fn selected(label: &str, subset: Option<&[String]>) -> bool {
    subset.is_none_or(|s| s.iter().any(|x| x == label || x.split(':').next() == Some(label)))
}

fn column_selected(label: &str, column: &str, subset: Option<&[String]>) -> bool {
    match subset {
        None => true,
        Some(s) => s.iter().any(|x| x == label || *x == format!("{label}:{column}")),
    }
}

/// Row labels of a table, as accepted by the subset argument of [`run_table`].
pub fn row_labels(table: TableName) -> Result<Vec<String>> {
    Ok(match table {
        TableName::Table1 => level_data()?.scalar_scalar.iter().map(table1_label).collect(),
        TableName::Table2 => level_data()?.scalar_fermion.iter().map(|r| r.state.clone()).collect(),
        TableName::Table3 => atom_data()?.systems.iter().map(|s| s.label.clone()).collect(),
        TableName::Table4 | TableName::Table5 => {
            let want = if table == TableName::Table4 { 4 } else { 5 };
            meson_data()?.states.into_iter().filter(|s| s.table == want).map(|s| s.name).collect()
        }
    })
}

fn table1_label(r: &ScalarScalarRow) -> String {
    format!("({},{}) {}", r.n, r.l, r.ratio)
}

/// Recomputes a reference table. `subset` restricts rows by label (tables 3–5 also
/// accept "label:column"); solver failures are recorded per cell.
pub fn run_table(table: TableName, subset: Option<&[String]>, settings: &SolverSettings) -> Result<TableReport> {
    if let Some(s) = subset {
        let known = row_labels(table)?;
        for x in s {
            let base = x.split(':').next().unwrap_or(x);
            if !known.iter().any(|k| k == x || k == base) {
                return Err(Error::config(format!("unknown row '{x}' for {table:?}")));
            }
        }
    }
    let rows = match table {
        TableName::Table1 => table1(subset, settings)?,
        TableName::Table2 => table2(subset, settings)?,
        TableName::Table3 => table3(subset, settings)?,
        TableName::Table4 => mesons(4, subset, settings)?,
        TableName::Table5 => mesons(5, subset, settings)?,
    };
    Ok(TableReport { table, rows })
}

/// Two-scalar Coulomb level (n, ℓ) with m₂ = 1 and m₁ = ratio.
pub fn scalar_scalar_level(n: u32, ell: u32, ratio: f64, alpha: f64, settings: &SolverSettings) -> Result<f64> {
    if ell >= n {
        return Err(Error::domain(format!("need ℓ < n, got n = {n}, ℓ = {ell}")));
    }
    let sys = build_system(
        ChannelSpec::scalar_scalar(ell),
        ParticleSpec::scalar(ratio)?,
        ParticleSpec::scalar(1.0)?,
        InteractionSpec::coulomb(alpha)?,
    )?;
    let idx = (n - ell) as usize;
    let spec = find_eigenvalues(&sys, default_bracket(&sys, idx), idx, settings)?;
    spec.levels
        .get(idx - 1)
        .map(|l| l.binding)
        .ok_or_else(|| Error::Accuracy(format!("only {} levels found for ℓ = {ell}", spec.levels.len())))
}

fn table1(subset: Option<&[String]>, settings: &SolverSettings) -> Result<Vec<TableRow>> {
    let data = level_data()?;
    let a = data.alpha;
    let mut rows = vec![];
    for r in &data.scalar_scalar {
        let label = table1_label(r);
        if !selected(&label, subset) {
            continue;
        }
        let mr = r.ratio / (r.ratio + 1.0);
        rows.push(TableRow {
            label,
            cells: vec![
                Cell::new("E_schr", "m2", r.schr, schrodinger_level(r.n, mr, a)),
                Cell::new("E_kg", "m2", r.kg, klein_gordon_level(r.n, r.l, mr, a)),
                Cell::new("E_num", "m2", r.num, scalar_scalar_level(r.n, r.l, r.ratio, a, settings)),
            ],
        });
    }
    Ok(rows)
}

/// Scalar-fermion level in units of 1e-7 m_R, with m_F = 1 and m_S = ratio.
pub fn scalar_fermion_level(n: u32, ell: u32, two_j: u32, ratio: f64, alpha: f64, settings: &SolverSettings) -> Result<f64> {
    let parity = if 2 * ell + 1 == two_j { Parity::I } else { Parity::II };
    let sys = build_system(
        ChannelSpec::scalar_fermion(two_j, parity)?,
        ParticleSpec::scalar(ratio)?,
        ParticleSpec::fermion(1.0)?,
        InteractionSpec::coulomb(alpha)?,
    )?;
    if ell >= n {
        return Err(Error::domain(format!("need ℓ < n, got n = {n}, ℓ = {ell}")));
    }
    let idx = (n - ell) as usize;
    let spec = find_eigenvalues(&sys, default_bracket(&sys, idx), idx, settings)?;
    let level = spec
        .levels
        .get(idx - 1)
        .ok_or_else(|| Error::Accuracy(format!("only {} levels found", spec.levels.len())))?;
    Ok(level.binding / sys.reduced_mass() * 1e7)
}

fn table2(subset: Option<&[String]>, settings: &SolverSettings) -> Result<Vec<TableRow>> {
    let data = level_data()?;
    let a = data.alpha;
    let unit = "1e-7 m_R";
    let mut rows = vec![];
    for r in &data.scalar_fermion {
        if !selected(&r.state, subset) {
            continue;
        }
        let mut cells = vec![Cell::new("KG", unit, r.values[0], klein_gordon_level(r.n, r.l, 1e7, a))];
        for (k, ratio) in SF_RATIOS.iter().enumerate() {
            let col = format!("mS/mF={ratio}");
            cells.push(Cell::new(&col, unit, r.values[k + 1], scalar_fermion_level(r.n, r.l, r.two_j, *ratio, a, settings)));
        }
        cells.push(Cell::new("D", unit, r.values[4], dirac_level(r.n, r.two_j, 1e7, a)));
        rows.push(TableRow { label: r.state.clone(), cells });
    }
    Ok(rows)
}

/// Levels entering the hyperfine splittings: (singlet-like, triplet-like) as
/// (j, parity, family, n) pairs.
fn hfs_levels(state: &str) -> Result<[(u32, Parity, Family, u32); 2]> {
    use Family::*;
    use Parity::*;
    Ok(match state {
        "1s" => [(0, I, Singlet, 1), (1, II, LowerOrbital, 1)],
        "2s" => [(0, I, Singlet, 2), (1, II, LowerOrbital, 2)],
        // the lower j = 1 parity-I level of the 2p pair has j_light = 1/2
        "2p1/2" => [(0, II, UpperOrbital, 1), (1, I, Singlet, 1)],
        "2p3/2" => [(1, I, Singlet, 2), (2, II, LowerOrbital, 1)],
        other => return Err(Error::config(format!("unknown hyperfine state '{other}'"))),
    })
}

/// Hydrogen-like two-fermion system in units of the light mass.
pub struct AtomSetup {
    pub heavy: ParticleSpec,
    pub light: ParticleSpec,
    pub interaction: InteractionSpec,
    pub scale: EnergyScale,
    pub units: Units,
}

pub fn atom_setup(system: &AtomSystem, data: &AtomData) -> Result<AtomSetup> {
    let get = |name: &str| {
        data.particles.get(name).ok_or_else(|| Error::Internal(format!("unknown particle '{name}' in atom data")))
    };
    let (h, l) = (get(&system.heavy)?, get(&system.light)?);
    let za = f64::from(h.charge * l.charge) * data.alpha;
    let g = h.kappa * l.kappa * za;
    Ok(AtomSetup {
        heavy: fermion(h.mass_u / l.mass_u, h.kappa)?,
        light: fermion(1.0, l.kappa)?,
        interaction: InteractionSpec::coulomb(za)?.with_breit(g)?,
        scale: EnergyScale::mev(l.mass_u * U_MEV),
        units: system.units.parse()?,
    })
}

/// Hyperfine splitting of one atomic state ("1s", "2s", "2p1/2", "2p3/2") in the table's units.
pub fn atom_hyperfine(system: &AtomSystem, data: &AtomData, state: &str, settings: &SolverSettings) -> Result<f64> {
    let setup = atom_setup(system, data)?;
    let mut caches: BTreeMap<(u32, bool), ChannelCache> = BTreeMap::new();
    hyperfine_from(&setup, state, &mut caches, settings)
}

fn hyperfine_from(
    setup: &AtomSetup,
    state: &str,
    caches: &mut BTreeMap<(u32, bool), ChannelCache>,
    settings: &SolverSettings,
) -> Result<f64> {
    let pair = hfs_levels(state)?;
    let mut total = [0.0; 2];
    for (k, &(j, parity, family, n)) in pair.iter().enumerate() {
        let key = (j, parity == Parity::II);
        if !caches.contains_key(&key) {
            // enough levels to reach 2s and both members of the 2p pair
            let count = if j >= 1 && parity == Parity::I { 2 } else { 2.min(2 * n as usize) };
            let sys = build_system(ChannelSpec::fermion_fermion(j, parity), setup.heavy, setup.light, setup.interaction)?;
            caches.insert(key, ChannelCache::solve(sys, count, settings)?);
        }
        let cache = &caches[&key];
        let level = if j >= 1 && parity == Parity::I {
            // the 2p pair is identified by energy order
            cache.levels.get(n as usize - 1).map(|(l, _)| l).ok_or_else(|| Error::Accuracy("2p pair not found".into()))?
        } else {
            cache.find(family, n)?
        };
        let shift = level_shift(level, &cache.system, setup.interaction.g)?;
        total[k] = level.binding + shift;
    }
    setup.scale.convert(total[1] - total[0], setup.units)
}

fn table3(subset: Option<&[String]>, settings: &SolverSettings) -> Result<Vec<TableRow>> {
    let data = atom_data()?;
    let mut rows = vec![];
    for system in &data.systems {
        if !selected(&system.label, subset) {
            continue;
        }
        let setup = atom_setup(system, &data)?;
        let mut caches = BTreeMap::new();
        let mut cells = vec![];
        for state in ["1s", "2s", "2p1/2", "2p3/2"] {
            if !column_selected(&system.label, state, subset) {
                continue;
            }
            let reference = *system.hfs.get(state).ok_or_else(|| Error::Internal(format!("missing {state} value")))?;
            cells.push(Cell::new(state, &system.units, reference, hyperfine_from(&setup, state, &mut caches, settings)));
        }
        rows.push(TableRow { label: system.label.clone(), cells });
    }
    Ok(rows)
}

/// Quark masses (MeV, heavier first) and the Cornell interaction with g = α of a family.
pub fn meson_family(data: &MesonData, family: &str) -> Result<(ParticleSpec, ParticleSpec, InteractionSpec)> {
    let fam = data.families.get(family).ok_or_else(|| Error::config(format!("unknown meson family '{family}'")))?;
    let mass = |q: &str| data.quarks.get(q).copied().ok_or_else(|| Error::Internal(format!("unknown quark '{q}'")));
    let (m1, m2) = (mass(&fam.quarks[0])?, mass(&fam.quarks[1])?);
    let alpha = 4.0 / 3.0 * fam.alpha_s;
    let inter = InteractionSpec::cornell(alpha, string_tension_mev2(fam.sigma_gev_fm))?.with_breit(alpha)?;
    Ok((ParticleSpec::fermion(m1.max(m2))?, ParticleSpec::fermion(m1.min(m2))?, inter))
}

/// Meson mass (MeV) of a term: rest masses + binding energy + Breit shift.
pub fn meson_mass(data: &MesonData, family: &str, term: &str, settings: &SolverSettings) -> Result<f64> {
    let mut caches = BTreeMap::new();
    meson_mass_cached(data, family, term.parse()?, None, &mut caches, settings)
}

fn meson_mass_cached(
    data: &MesonData,
    family: &str,
    term: Term,
    rank: Option<u32>,
    caches: &mut BTreeMap<(String, u32, bool), ChannelCache>,
    settings: &SolverSettings,
) -> Result<f64> {
    let (q1, q2, inter) = meson_family(data, family)?;
    let (channel, fam) = term.channel();
    let key = (family.to_string(), term.j, channel.parity == Parity::II);
    if !caches.contains_key(&key) {
        // two interleaved families per channel unless j = 0
        let wanted = data
            .states
            .iter()
            .filter(|s| s.family == family)
            .filter_map(|s| s.term.parse::<Term>().ok())
            .filter(|t| t.channel().0 == channel)
            .map(|t| t.n)
            .max()
            .unwrap_or(term.n)
            .max(term.n)
            .max(rank.unwrap_or(0)) as usize;
        let count = if term.j == 0 { wanted } else { 2 * wanted + 1 };
        let sys = build_system(channel, q1, q2, inter)?;
        caches.insert(key.clone(), ChannelCache::solve(sys, count, settings)?);
    }
    let cache = &caches[&key];
    let level = match rank {
        Some(k) => cache
            .levels
            .get(k.max(1) as usize - 1)
            .map(|(l, _)| l)
            .ok_or_else(|| Error::Accuracy(format!("level {k} of the channel not found")))?,
        None => cache.find(fam, term.n)?,
    };
    let shift = level_shift(level, &cache.system, inter.g)?;
    Ok(q1.mass + q2.mass + level.binding + shift)
}

fn mesons(table: u32, subset: Option<&[String]>, settings: &SolverSettings) -> Result<Vec<TableRow>> {
    let data = meson_data()?;
    let mut caches = BTreeMap::new();
    let mut rows = vec![];
    for s in data.states.iter().filter(|s| s.table == table) {
        if !selected(&s.name, subset) {
            continue;
        }
        let computed = s.term.parse().and_then(|t| meson_mass_cached(&data, &s.family, t, s.rank, &mut caches, settings));
        rows.push(TableRow { label: s.name.clone(), cells: vec![Cell::new(&s.term, "MeV", s.reference, computed)] });
    }
    Ok(rows)
}
