//! Subcommand implementations.

use std::path::Path;

use anyhow::Context;
use rayon::prelude::*;
use serde::Serialize;
use twobody_core::breit::level_shift;
use twobody_core::classical::{classify, integrate_trajectory, radial_period_angle, turning_points, OrbitParams, Regime};
use twobody_core::model::ChannelKind;
use twobody_core::oracles::{free_spectrum, heun_parameters, oracle_levels, OracleSource};
use twobody_core::tables::{run_table, TableName, TableReport};
use twobody_core::units::{EnergyScale, Units};
use twobody_core::{
    build_system, default_bracket, eigenfunction_full, find_eigenvalues, spectral_determinant, Parity,
    RadialSystem, SolverSettings, SpectralResult,
};

use crate::config::{Format, Model, RunConfig};
use crate::output::{emit, Field, Table};
use crate::{ConfigError, SolverFailure};

/// Options shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Common {
    pub format: Option<Format>,
    pub units: Option<String>,
    pub out: Option<std::path::PathBuf>,
    pub threads: Option<usize>,
    pub strict: bool,
}

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

fn parity_label(p: Parity) -> &'static str {
    match p {
        Parity::I => "I",
        Parity::II => "II",
    }
}

fn kind_label(k: ChannelKind) -> &'static str {
    match k {
        ChannelKind::ScalarScalar => "SS",
        ChannelKind::ScalarFermion => "SF",
        ChannelKind::FermionFermion => "FF",
    }
}

/// Resolved output settings of a config-driven command.
struct Sink<'a> {
    format: Format,
    units: Units,
    scale: EnergyScale,
    out: Option<&'a Path>,
}

fn sink<'a>(cfg: &'a RunConfig, common: &'a Common) -> anyhow::Result<Sink<'a>> {
    let units = cfg.units(common.units.as_deref())?;
    let scale = cfg.output.mev_per_unit.map_or(EnergyScale::dimensionless(), EnergyScale::mev);
    if units != Units::Natural && scale.mev_per_unit.is_none() {
        return Err(config_err(format!("units {} need output.mev_per_unit in the config", units.label())));
    }
    Ok(Sink {
        format: common.format.or(cfg.output.format).unwrap_or(Format::Csv),
        units,
        scale,
        out: common.out.as_deref().or(cfg.output.path.as_deref()),
    })
}

fn with_threads<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build()?;
    Ok(pool.install(job))
}

#[derive(Debug, Serialize)]
struct Eigenfunction {
    r: Vec<f64>,
    names: Vec<String>,
    components: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
struct LevelReport {
    level: usize,
    binding_energy: f64,
    lambda: f64,
    breit_shift: Option<f64>,
    nodes: usize,
    r_c: f64,
    warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eigenfunction: Option<Eigenfunction>,
}

#[derive(Debug, Serialize)]
struct ChannelReport {
    index: usize,
    kind: &'static str,
    j: f64,
    parity: &'static str,
    bracket: [f64; 2],
    levels: Vec<LevelReport>,
    warnings: Vec<String>,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct SolveReport {
    units: &'static str,
    channels: Vec<ChannelReport>,
}

fn solve_channel(
    model: &Model,
    index: usize,
    settings: &SolverSettings,
    sink: &Sink,
    eigenfunctions: bool,
    strict: bool,
) -> ChannelReport {
    let (spec, count, bracket) = model.channels[index];
    let mut report = ChannelReport {
        index,
        kind: kind_label(spec.kind),
        j: spec.j(),
        parity: parity_label(spec.parity),
        bracket: [f64::NAN; 2],
        levels: vec![],
        warnings: vec![],
        error: None,
    };
    let mut run = || -> anyhow::Result<()> {
        let sys = build_system(spec, model.first, model.second, model.interaction)?;
        let bracket = bracket.unwrap_or_else(|| default_bracket(&sys, count));
        report.bracket = [bracket.0, bracket.1];
        let spectrum = find_eigenvalues(&sys, bracket, count, settings)?;
        report.warnings = spectrum.warnings.clone();
        for (k, level) in spectrum.levels.iter().enumerate() {
            report.levels.push(level_report(&sys, level, k + 1, model, sink, eigenfunctions)?);
        }
        if strict {
            let any = !report.warnings.is_empty() || report.levels.iter().any(|l| !l.warnings.is_empty());
            if any {
                anyhow::bail!("warnings raised under --strict");
            }
        }
        Ok(())
    };
    if let Err(e) = run() {
        report.error = Some(format!("{e:#}"));
    }
    report
}

fn level_report(
    sys: &RadialSystem,
    level: &SpectralResult,
    index: usize,
    model: &Model,
    sink: &Sink,
    eigenfunctions: bool,
) -> anyhow::Result<LevelReport> {
    let g = model.interaction.g;
    let shift = if g != 0.0 && sys.channel.kind == ChannelKind::FermionFermion {
        Some(level_shift(level, sys, g)?)
    } else {
        None
    };
    let conv = |v: f64| sink.scale.convert(v, sink.units);
    let eigenfunction = if eigenfunctions {
        let full = eigenfunction_full(level, sys)?;
        Some(Eigenfunction { r: full.r, names: full.names, components: full.values })
    } else {
        None
    };
    Ok(LevelReport {
        level: index,
        binding_energy: conv(level.binding)?,
        lambda: conv(level.lambda)?,
        breit_shift: shift.map(conv).transpose()?,
        nodes: level.nodes,
        r_c: level.geometry.r_c,
        warnings: level.warnings.clone(),
        eigenfunction,
    })
}

pub fn solve(config: &Path, common: &Common) -> anyhow::Result<()> {
    let cfg = RunConfig::load(config)?;
    let model = cfg.model()?;
    let sink = sink(&cfg, common)?;
    let settings = cfg.solver.clone();
    let eigen = cfg.output.eigenfunctions;
    let channels: Vec<ChannelReport> = with_threads(common.threads, || {
        (0..model.channels.len())
            .into_par_iter()
            .map(|k| solve_channel(&model, k, &settings, &sink, eigen, common.strict))
            .collect()
    })?;
    let unit = sink.units.label();
    let mut table = Table::new(&[
        ("channel", None),
        ("kind", None),
        ("j", None),
        ("parity", None),
        ("level", None),
        ("binding_energy", Some(unit)),
        ("lambda", Some(unit)),
        ("breit_shift", Some(unit)),
        ("nodes", None),
        ("error", None),
    ]);
    for c in &channels {
        let head = |t: &mut Table, rest: Vec<Field>| {
            let mut row: Vec<Field> = vec![c.index.into(), c.kind.into(), c.j.into(), c.parity.into()];
            row.extend(rest);
            t.push(row);
        };
        if let Some(e) = &c.error {
            head(&mut table, vec![Field::Empty, Field::Empty, Field::Empty, Field::Empty, Field::Empty, e.as_str().into()]);
        }
        for l in &c.levels {
            head(
                &mut table,
                vec![l.level.into(), l.binding_energy.into(), l.lambda.into(), l.breit_shift.into(), l.nodes.into(), Field::Empty],
            );
        }
    }
    let failed = channels.iter().filter(|c| c.error.is_some()).count();
    emit(sink.format, sink.out, &SolveReport { units: unit, channels }, &table)?;
    if failed > 0 {
        return Err(SolverFailure(format!("{failed} channel(s) failed")).into());
    }
    Ok(())
}

/// Converts table values between physical units with MeV as the pivot.
fn table_units(report: &mut TableReport, units: Option<Units>) -> anyhow::Result<()> {
    let Some(target) = units else { return Ok(()) };
    let mev = EnergyScale::mev(1.0);
    for row in &mut report.rows {
        for cell in &mut row.cells {
            let from: Units = match cell.unit.parse() {
                Ok(u @ (Units::MeV | Units::MHz | Units::MilliEv)) => u,
                _ if target == Units::Natural => continue,
                _ => return Err(config_err(format!("{:?} values in {} cannot be converted to {}", report.table, cell.unit, target.label()))),
            };
            if target == Units::Natural {
                return Err(config_err(format!("{:?} holds physical values; natural units are not defined for it", report.table)));
            }
            let convert = |v: f64| -> anyhow::Result<f64> { Ok(mev.convert(mev.to_natural(v, from)?, target)?) };
            cell.reference = convert(cell.reference)?;
            cell.computed = cell.computed.map(convert).transpose()?;
            cell.unit = target.label().to_string();
        }
    }
    Ok(())
}

pub fn table(name: &str, rows: Option<Vec<String>>, settings: Option<&Path>, common: &Common) -> anyhow::Result<()> {
    let table_name: TableName = name.parse().map_err(|e: twobody_core::Error| config_err(e.to_string()))?;
    let settings = match settings {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display())).map_err(|e| config_err(format!("{e:#}")))?;
            let s: SolverSettings = toml::from_str(&text).map_err(|e| config_err(e.to_string()))?;
            s.validate().map_err(|e| config_err(e.to_string()))?;
            s
        }
        None => SolverSettings::default(),
    };
    let units = common.units.as_deref().map(str::parse::<Units>).transpose().map_err(|e| config_err(e.to_string()))?;
    let mut report = with_threads(common.threads, || run_table(table_name, rows.as_deref(), &settings))?
        .map_err(|e| if e.is_input_error() { config_err(e.to_string()) } else { anyhow::Error::from(e) })?;
    table_units(&mut report, units)?;
    let all_units: std::collections::BTreeSet<&str> = report.rows.iter().flat_map(|r| r.cells.iter().map(|c| c.unit.as_str())).collect();
    let unit = if all_units.len() == 1 { all_units.into_iter().next().unwrap_or("") } else { "per unit column" };
    let mut csv = Table::new(&[
        ("row", None),
        ("column", None),
        ("unit", None),
        ("reference", Some(unit)),
        ("computed", Some(unit)),
        ("relative_deviation", Some("1")),
        ("error", None),
    ]);
    for r in &report.rows {
        for c in &r.cells {
            csv.push(vec![
                r.label.as_str().into(),
                c.column.as_str().into(),
                c.unit.as_str().into(),
                c.reference.into(),
                c.computed.into(),
                c.deviation.into(),
                c.error.clone().map_or(Field::Empty, Field::Text),
            ]);
        }
    }
    let out = common.out.as_deref();
    emit(common.format.unwrap_or(Format::Csv), out, &report, &csv)?;
    let failed = report.rows.iter().flat_map(|r| &r.cells).filter(|c| c.error.is_some()).count();
    if failed > 0 {
        return Err(SolverFailure(format!("{failed} table cell(s) failed")).into());
    }
    Ok(())
}

/// `lo:hi:n` with n ≥ 1 points.
pub fn parse_grid(s: &str) -> anyhow::Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || config_err(format!("grid '{s}' is not lo:hi:n"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite()) || n == 0 || lo > hi {
        return Err(config_err(format!("grid '{s}' needs finite lo ≤ hi and n ≥ 1")));
    }
    Ok((lo, hi, n))
}

#[derive(Debug, Serialize)]
struct ScanPoint {
    binding_energy: f64,
    lambda: f64,
    determinant: Option<f64>,
    /// The determinant changes sign between this point and the next.
    sign_change: bool,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct ScanReport {
    channel: usize,
    units: &'static str,
    points: Vec<ScanPoint>,
    sign_changes: usize,
}

pub fn scan(config: &Path, channel: usize, grid: &str, common: &Common) -> anyhow::Result<()> {
    let cfg = RunConfig::load(config)?;
    let model = cfg.model()?;
    let sink = sink(&cfg, common)?;
    let (lo, hi, n) = parse_grid(grid)?;
    let (spec, _, _) = *model
        .channels
        .get(channel)
        .ok_or_else(|| config_err(format!("channel {channel} not in config ({} channels)", model.channels.len())))?;
    let sys = build_system(spec, model.first, model.second, model.interaction).map_err(|e| config_err(e.to_string()))?;
    let energies: Vec<f64> =
        if n == 1 || lo == hi { vec![lo] } else { (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect() };
    let settings = cfg.solver.clone();
    let values: Vec<Result<f64, String>> = with_threads(common.threads, || {
        energies
            .par_iter()
            .map(|&e| spectral_determinant(&sys, e, &settings).map(|m| m.determinant).map_err(|err| err.to_string()))
            .collect()
    })?;
    let mut points = vec![];
    for (k, (&e, v)) in energies.iter().zip(&values).enumerate() {
        let next = values.get(k + 1).and_then(|r| r.as_ref().ok());
        let sign_change = matches!((v, next), (Ok(a), Some(b)) if a.signum() != b.signum());
        points.push(ScanPoint {
            binding_energy: sink.scale.convert(e, sink.units)?,
            lambda: sink.scale.convert(sys.lambda(e), sink.units)?,
            determinant: v.as_ref().ok().copied(),
            sign_change,
            error: v.as_ref().err().cloned(),
        });
    }
    let unit = sink.units.label();
    let mut table = Table::new(&[
        ("binding_energy", Some(unit)),
        ("lambda", Some(unit)),
        ("determinant", Some("1")),
        ("sign_change", None),
        ("error", None),
    ]);
    for p in &points {
        table.push(vec![
            p.binding_energy.into(),
            p.lambda.into(),
            p.determinant.into(),
            if p.sign_change { "yes".into() } else { Field::Empty },
            p.error.clone().map_or(Field::Empty, Field::Text),
        ]);
    }
    let failed = points.iter().filter(|p| p.error.is_some()).count();
    let sign_changes = points.iter().filter(|p| p.sign_change).count();
    emit(sink.format, sink.out, &ScanReport { channel, units: unit, points, sign_changes }, &table)?;
    if failed == energies.len() {
        return Err(SolverFailure("determinant failed at every grid point".into()).into());
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct OrbitReport {
    params: OrbitParams,
    regime: Regime,
    turning_points: Vec<f64>,
    /// Angle swept between successive pericentres (bound orbits).
    period_angle: Option<f64>,
    points: Vec<twobody_core::classical::OrbitPoint>,
}

pub fn orbit(config: &Path, common: &Common) -> anyhow::Result<()> {
    let cfg = RunConfig::load(config)?;
    let model = cfg.model()?;
    let o = cfg.orbit.as_ref().ok_or_else(|| config_err("orbit needs an [orbit] section"))?;
    let units = cfg.units(common.units.as_deref())?;
    if units != Units::Natural {
        return Err(config_err("orbit output is in natural units only"));
    }
    let (m1, m2) = (model.first.mass, model.second.mass);
    let lambda = match (o.lambda, o.energy) {
        (Some(l), None) => l,
        (None, Some(e)) => m1 + m2 + e,
        _ => return Err(config_err("orbit needs exactly one of lambda or energy")),
    };
    let p = OrbitParams::new(lambda, o.l, model.interaction.alpha, m1, m2).map_err(|e| config_err(e.to_string()))?;
    let regime = classify(&p);
    let tps = turning_points(&p);
    let range = match (o.range, tps.as_slice()) {
        (Some([a, b]), _) => (a, b),
        (None, [a, b, ..]) => (*a, *b),
        _ => return Err(config_err(format!("{regime:?} orbit has turning points {tps:?}; give orbit.range"))),
    };
    let sample = integrate_trajectory(&p, range, o.samples)?;
    let period_angle = if tps.len() >= 2 && o.range.is_none() { Some(radial_period_angle(&p)?) } else { None };
    let mut table = Table::new(&[("r", Some("1/energy")), ("u", Some("energy")), ("theta", Some("rad"))]);
    for pt in &sample.points {
        table.push(vec![pt.r.into(), pt.u.into(), pt.theta.into()]);
    }
    let report = OrbitReport { params: p, regime, turning_points: tps, period_angle, points: sample.points };
    emit(common.format.or(cfg.output.format).unwrap_or(Format::Csv), common.out.as_deref().or(cfg.output.path.as_deref()), &report, &table)
}

/// Arguments of the `oracle` subcommand.
#[derive(Debug, Clone)]
pub struct OracleArgs {
    pub kind: String,
    pub mass: f64,
    pub alpha: f64,
    pub angular: u32,
    pub count: u32,
    pub q: Option<f64>,
    pub m1: f64,
    pub m2: f64,
    pub lambda: Option<f64>,
}

pub fn oracle(args: &OracleArgs, common: &Common) -> anyhow::Result<()> {
    let units = common.units.as_deref().map(str::parse::<Units>).transpose().map_err(|e| config_err(e.to_string()))?;
    if units.is_some_and(|u| u != Units::Natural) {
        return Err(config_err("oracle output is in natural units only"));
    }
    let format = common.format.unwrap_or(Format::Csv);
    let out = common.out.as_deref();
    let input = |e: twobody_core::Error| config_err(e.to_string());
    match args.kind.as_str() {
        "schroedinger" | "klein-gordon" | "dirac" => {
            let source = match args.kind.as_str() {
                "schroedinger" => OracleSource::Schroedinger,
                "klein-gordon" => OracleSource::KleinGordon,
                _ => OracleSource::Dirac,
            };
            let levels = oracle_levels(source, args.angular, args.count, args.mass, args.alpha).map_err(input)?;
            let mut t = Table::new(&[("n", None), ("ell", None), ("two_j", None), ("energy", Some("natural"))]);
            for l in &levels {
                t.push(vec![l.n.into(), l.ell.map_or(Field::Empty, Field::from), l.two_j.map_or(Field::Empty, Field::from), l.energy.into()]);
            }
            emit(format, out, &levels, &t)
        }
        "free" => {
            let q = args.q.ok_or_else(|| config_err("free oracle needs --q"))?;
            let e = free_spectrum(q, args.m1, args.m2).map_err(input)?;
            let mut t = Table::new(&[("branch", None), ("energy", Some("natural"))]);
            for (name, v) in ["E1+E2", "-(E1+E2)", "E1-E2", "-(E1-E2)"].iter().zip(e) {
                t.push(vec![(*name).into(), v.into()]);
            }
            emit(format, out, &e, &t)
        }
        "heun" => {
            let lambda = args.lambda.ok_or_else(|| config_err("heun oracle needs --lambda"))?;
            let h = heun_parameters(lambda, args.m1, args.m2, args.alpha, args.angular).map_err(input)?;
            let mut t = Table::new(&[("eta", Some("1")), ("beta", Some("1")), ("gamma", Some("1")), ("delta", Some("1")), ("zeta", Some("1"))]);
            t.push(vec![h.eta.into(), h.beta.into(), h.gamma.into(), h.delta.into(), h.zeta.into()]);
            emit(format, out, &h, &t)
        }
        other => Err(config_err(format!("unknown oracle '{other}' (schroedinger, klein-gordon, dirac, free, heun)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("-1e-5:-1e-6:10").unwrap(), (-1e-5, -1e-6, 10));
        assert_eq!(parse_grid("1:1:1").unwrap(), (1.0, 1.0, 1));
        for bad in ["1:2", "a:2:3", "2:1:3", "1:2:0", "1:inf:3"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn table_unit_conversion() {
        let mut r = TableReport {
            table: TableName::Table3,
            rows: vec![twobody_core::tables::TableRow {
                label: "x".into(),
                cells: vec![twobody_core::tables::Cell {
                    column: "1s".into(),
                    unit: "meV".into(),
                    reference: 1.0,
                    computed: Some(2.0),
                    deviation: Some(1.0),
                    error: None,
                }],
            }],
        };
        table_units(&mut r, Some(Units::MeV)).unwrap();
        let c = &r.rows[0].cells[0];
        assert!((c.reference - 1e-9).abs() < 1e-24 && c.unit == "MeV");
        assert!(table_units(&mut r, Some(Units::Natural)).is_err());
    }
}
