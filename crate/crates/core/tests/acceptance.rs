//! Acceptance criteria 1–10. Each test writes one `criterion N: PASS|FAIL …` line
//! straight to stdout (bypassing the harness capture) and then asserts.

use std::io::Write;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use twobody_core::classical::{classify, radial_momentum, OrbitParams, Regime};
use twobody_core::oracles::{dirac_level, klein_gordon_level, schrodinger_level};
use twobody_core::radial::SystemKind;
use twobody_core::tables::{level_data, meson_data, meson_mass, run_table, TableName, SF_RATIOS};
use twobody_core::{
    build_system, default_bracket, find_eigenvalues, free_solution_basis, free_total_energy, limit_system, ChannelSpec,
    InteractionSpec, LimitKind, Parity, ParticleSpec, RadialSystem, SolverSettings,
};

const ALPHA: f64 = 0.0072973525698;

fn report(n: u32, ok: bool, detail: &str) {
    let line = format!("criterion {n:>2}: {} {detail}\n", if ok { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn levels(sys: &RadialSystem, count: usize, settings: &SolverSettings) -> Vec<(f64, usize)> {
    let spec = find_eigenvalues(sys, default_bracket(sys, count), count, settings).expect("solve");
    spec.levels.iter().map(|l| (l.binding, l.nodes)).collect()
}

fn coulomb(alpha: f64) -> InteractionSpec {
    InteractionSpec::coulomb(alpha).unwrap()
}

fn fermion(m: f64) -> ParticleSpec {
    ParticleSpec::fermion(m).unwrap()
}

fn scalar(m: f64) -> ParticleSpec {
    ParticleSpec::scalar(m).unwrap()
}

#[test]
fn criterion_01_scalar_scalar_table() {
    let start = Instant::now();
    let report_t = run_table(TableName::Table1, None, &SolverSettings::default()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let worst = report_t
        .rows
        .iter()
        .map(|r| r.cells.iter().find(|c| c.column == "E_num").and_then(|c| c.deviation).map_or(f64::INFINITY, f64::abs))
        .fold(0.0, f64::max);
    let ok = report_t.rows.len() == 6 && worst < 5e-5 && elapsed < 60.0;
    report(1, ok, &format!("Table I: 6 rows, max |dev| {worst:.2e} (tol 5e-5), {elapsed:.1} s (limit 60 s)"));
    assert!(ok);
}

#[test]
fn criterion_02_scalar_fermion_table() {
    let start = Instant::now();
    let data = level_data().unwrap();
    let table = run_table(TableName::Table2, None, &SolverSettings::default()).unwrap();
    let mut worst_num: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    let mut worst_printed: f64 = 0.0;
    let settings = SolverSettings::default();
    for (row, spec) in table.rows.iter().zip(&data.scalar_fermion) {
        for c in &row.cells {
            let d = c.deviation.map_or(f64::INFINITY, f64::abs);
            if c.column.starts_with("mS/mF") {
                worst_num = worst_num.max(d);
            }
        }
        // printed KG and D columns against the closed forms, to half a unit in the last printed digit
        let kg = klein_gordon_level(spec.n, spec.l, 1e7, ALPHA).unwrap();
        let d = dirac_level(spec.n, spec.two_j, 1e7, ALPHA).unwrap();
        worst_printed = worst_printed.max((kg - spec.values[0]).abs()).max((d - spec.values[4]).abs());
        // the same columns from the engine applied to the one-body limits
        let parity = if 2 * spec.l + 1 == spec.two_j { Parity::I } else { Parity::II };
        let channel = ChannelSpec::scalar_fermion(spec.two_j, parity).unwrap();
        let idx = (spec.n - spec.l) as usize;
        let limits = [(LimitKind::KleinGordonOfLighter, 1.0, 1e4, kg), (LimitKind::DiracOfLighter, 1e4, 1.0, d)];
        for (kind, ms, mf, exact) in limits {
            let sys = &limit_system(kind, channel, scalar(ms), fermion(mf), coulomb(ALPHA)).unwrap()[0];
            let e = levels(sys, idx, &settings)[idx - 1].0 * 1e7;
            worst_oracle = worst_oracle.max(rel(e, exact));
        }
    }
    // opposite-parity degeneracy 2s1/2 / 2p1/2 at equal masses
    let pick = |parity, idx: usize| {
        let sys = build_system(ChannelSpec::scalar_fermion(1, parity).unwrap(), scalar(1.0), fermion(1.0), coulomb(ALPHA)).unwrap();
        levels(&sys, idx, &settings)[idx - 1].0
    };
    let split = rel(pick(Parity::I, 2), pick(Parity::II, 1));
    let elapsed = start.elapsed().as_secs_f64();
    let ok = table.rows.len() == 9 && worst_num < 5e-6 && worst_oracle < 1e-9 && worst_printed <= 5e-7 + 1e-12 && split < 1e-10 && elapsed < 600.0;
    report(
        2,
        ok,
        &format!(
            "Table II: max |dev| {worst_num:.2e} over ratios {SF_RATIOS:?} (tol 5e-6), KG/D limit solves vs oracles {worst_oracle:.1e} (tol 1e-9), \
             printed KG/D vs oracles {worst_printed:.1e} (half-ulp 5e-7), \
             2s1/2-2p1/2 split {split:.1e} (tol 1e-10), {elapsed:.1} s"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_03_fermion_pair_dirac_limit() {
    let settings = SolverSettings::default();
    let devs: Vec<f64> = [1e2, 1e3, 1e4]
        .iter()
        .map(|&ratio| {
            let sys = build_system(ChannelSpec::fermion_fermion(0, Parity::I), fermion(ratio), fermion(1.0), coulomb(ALPHA)).unwrap();
            let e = levels(&sys, 1, &settings)[0].0;
            rel(e, dirac_level(1, 1, sys.reduced_mass(), ALPHA).unwrap())
        })
        .collect();
    let ok = devs[2] < 1e-3 && devs[0] > devs[1] && devs[1] > devs[2];
    report(3, ok, &format!("FF 1s vs Dirac(m_R) at m1/m2 = 1e2, 1e3, 1e4: {:.2e}, {:.2e}, {:.2e} (last < 1e-3, decreasing)", devs[0], devs[1], devs[2]));
    assert!(ok);
}

/// Least-squares slope of log(dev) against log(c).
fn exponent(cs: &[f64], devs: &[f64]) -> f64 {
    let xs: Vec<f64> = cs.iter().map(|c| c.ln()).collect();
    let ys: Vec<f64> = devs.iter().map(|d| d.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    -sxy / sxx
}

#[test]
fn criterion_04_nonrelativistic_scaling() {
    // restoring c turns α into α/c; the relative relativistic correction is O(α²/c²)
    let settings = SolverSettings::default();
    let cs = [4.0, 8.0, 16.0];
    let base = 0.2;
    let dev = |make: &dyn Fn(f64) -> RadialSystem| -> Vec<f64> {
        cs.iter()
            .map(|c| {
                let a = base / c;
                let sys = make(a);
                rel(levels(&sys, 1, &settings)[0].0, schrodinger_level(1, sys.reduced_mass(), a).unwrap())
            })
            .collect()
    };
    let ss = dev(&|a| build_system(ChannelSpec::scalar_scalar(0), scalar(1.0), scalar(1.0), coulomb(a)).unwrap());
    let ff = dev(&|a| build_system(ChannelSpec::fermion_fermion(0, Parity::I), fermion(1.0), fermion(1.0), coulomb(a)).unwrap());
    let (ps, pf) = (exponent(&cs, &ss), exponent(&cs, &ff));
    let ok = (ps - 2.0).abs() <= 0.2 && (pf - 2.0).abs() <= 0.2;
    report(4, ok, &format!("1/c^p fit over c = 4, 8, 16: SS p = {ps:.3}, FF p = {pf:.3} (2 ± 0.2)"));
    assert!(ok);
}

#[test]
fn criterion_05_hydrogen_hyperfine() {
    let table = run_table(TableName::Table3, Some(&["(p,e):1s".into(), "(p,e):2s".into()]), &SolverSettings::default()).unwrap();
    let cells = &table.rows[0].cells;
    let v1 = cells[0].computed.unwrap_or(f64::NAN);
    let v2 = cells[1].computed.unwrap_or(f64::NAN);
    let ok = (v1 - 1420.595).abs() < 1.5 && (v2 - 177.580).abs() < 0.2;
    report(5, ok, &format!("(p,e) HFS 1s {v1:.4} MHz (1420.595 ± 1.5), 2s {v2:.4} MHz (177.580 ± 0.2)"));
    assert!(ok);
}

#[test]
fn criterion_06_meson_subset() {
    let data = meson_data().unwrap();
    let settings = SolverSettings::default();
    let phi = meson_mass(&data, "ss", "1 3 S 1", &settings).unwrap();
    let psi = meson_mass(&data, "cc", "1 3 S 1", &settings).unwrap();
    let ok = (phi - 1019.44).abs() < 2.0 && (psi - 3097.91).abs() < 2.0;
    report(6, ok, &format!("phi {phi:.2} MeV (1019.44 ± 2), J/psi {psi:.2} MeV (3097.91 ± 2)"));
    assert!(ok);
}

#[test]
fn criterion_07_free_solution_residuals() {
    let free = InteractionSpec::coulomb(0.0).unwrap();
    let (m1, m2) = (1.3, 0.7);
    let mut systems = vec![];
    for l in 0..3 {
        systems.push(build_system(ChannelSpec::scalar_scalar(l), scalar(m1), scalar(m2), free).unwrap());
    }
    for p in [Parity::I, Parity::II] {
        for two_j in [1, 3] {
            systems.push(build_system(ChannelSpec::scalar_fermion(two_j, p).unwrap(), scalar(m1), fermion(m2), free).unwrap());
        }
        for j in 0..3 {
            systems.push(build_system(ChannelSpec::fermion_fermion(j, p), fermion(m1), fermion(m2), free).unwrap());
        }
    }
    let mut worst: f64 = 0.0;
    for sys in &systems {
        let lam = free_total_energy(0.9, m1, m2).unwrap();
        let basis = free_solution_basis(sys, lam).unwrap();
        let e = lam - sys.threshold();
        for idx in 0..basis.count() {
            let mut x = 0.1;
            while x <= 50.0 {
                worst = worst.max(sys.residual(e, x / basis.k, |t| basis.eval(idx, t)));
                x *= 1.1;
            }
        }
    }
    let ok = worst < 1e-9;
    report(7, ok, &format!("{} free systems (SS, SF I/II, FF I/II), max residual {worst:.1e} over kr in [0.1, 50] (tol 1e-9)", systems.len()));
    assert!(ok);
}

#[test]
fn criterion_08_solver_robustness() {
    let base = SolverSettings::default();
    let shifted = SolverSettings { r_c_scale: 1.4, ..base.clone() };
    let tighter = SolverSettings { rtol: base.rtol / 2.0, ..base.clone() };
    let longer = SolverSettings { r_max_scale: 1.6, ..base.clone() };
    let a = 0.1;
    let systems = [
        build_system(ChannelSpec::scalar_scalar(0), scalar(1.0), scalar(1.0), coulomb(a)).unwrap(),
        build_system(ChannelSpec::scalar_scalar(1), scalar(3.0), scalar(1.0), coulomb(a)).unwrap(),
        build_system(ChannelSpec::scalar_fermion(1, Parity::I).unwrap(), scalar(2.0), fermion(1.0), coulomb(a)).unwrap(),
        build_system(ChannelSpec::scalar_fermion(1, Parity::II).unwrap(), scalar(2.0), fermion(1.0), coulomb(a)).unwrap(),
        build_system(ChannelSpec::fermion_fermion(0, Parity::I), fermion(1.0), fermion(1.0), coulomb(a)).unwrap(),
        build_system(ChannelSpec::fermion_fermion(0, Parity::II), fermion(1.0), fermion(1.0), coulomb(a)).unwrap(),
    ];
    let (mut d_rc, mut d_tol, mut d_rmax) = (0.0f64, 0.0f64, 0.0f64);
    let mut monotone = true;
    for sys in &systems {
        let b = levels(sys, 4, &base);
        let nodes: Vec<usize> = b.iter().map(|l| l.1).collect();
        monotone &= nodes.windows(2).all(|w| w[1] > w[0]);
        for (other, worst) in [(&shifted, &mut d_rc), (&tighter, &mut d_tol), (&longer, &mut d_rmax)] {
            for (x, y) in levels(sys, 4, other).iter().zip(&b) {
                *worst = worst.max(rel(x.0, y.0));
            }
        }
    }
    let ok = d_rc < 1e-10 && d_tol < 1e-10 && d_rmax < 1e-8 && monotone;
    report(
        8,
        ok,
        &format!(
            "r_c shift {d_rc:.1e} (1e-10), tolerance halving {d_tol:.1e} (1e-10), r_max growth {d_rmax:.1e} (1e-8), \
             node monotonicity over 4 levels x {} channels: {monotone}",
            systems.len()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_09_classical_module() {
    let mut runner = TestRunner::new(Config { cases: 100, ..Config::default() });
    let worst = std::cell::Cell::new(0.0f64);
    let result = runner.run(&(0.05f64..5.0, 0.1f64..5.0, 0.0f64..5.0, 0.5f64..20.0), |(q, m1, m2, r)| {
        let lam = free_total_energy(q, m1, m2).unwrap();
        let qr = radial_momentum(r, lam, 0.0, m1, m2, 0.0).unwrap();
        let d = (qr - q).abs() / q.max(1.0);
        worst.set(worst.get().max(d));
        prop_assert!(d < 1e-12);
        Ok(())
    });
    // bisect the elliptic/hyperbolic transition in L for equal masses
    let alpha = 0.3;
    let regime = |l: f64| classify(&OrbitParams::new(1.9, l, alpha, 1.0, 1.0).unwrap());
    let (mut lo, mut hi) = (0.1 * alpha, alpha);
    let ends = (regime(lo), regime(hi));
    while hi - lo > 1e-9 * alpha {
        let mid = 0.5 * (lo + hi);
        if regime(mid) == Regime::Elliptic {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let flip = 0.5 * (lo + hi);
    let ok = result.is_ok()
        && ends == (Regime::Hyperbolic, Regime::Elliptic)
        && (flip - alpha / 2.0).abs() < 1e-6 * alpha;
    report(
        9,
        ok,
        &format!("free q_r = q over 100 draws, max {:.1e} (1e-12); regime flip at L = {:.9}α (0.5α ± 1e-6α)", worst.get(), flip / alpha),
    );
    assert!(ok);
}

#[test]
fn criterion_10_limit_systems_match_oracles() {
    let settings = SolverSettings::default();
    let a = 0.05;
    let (h, l) = (5.0, 1.0);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let channels = [
        (LimitKind::Schroedinger, ChannelSpec::scalar_scalar(0), scalar(h), scalar(l)),
        (LimitKind::Schroedinger, ChannelSpec::scalar_scalar(1), scalar(h), scalar(l)),
        (LimitKind::KleinGordonOfLighter, ChannelSpec::scalar_scalar(0), scalar(h), scalar(l)),
        (LimitKind::KleinGordonOfLighter, ChannelSpec::scalar_scalar(2), scalar(h), scalar(l)),
        (LimitKind::DiracOfLighter, ChannelSpec::scalar_fermion(1, Parity::I).unwrap(), scalar(h), fermion(l)),
        (LimitKind::DiracOfLighter, ChannelSpec::scalar_fermion(1, Parity::II).unwrap(), scalar(h), fermion(l)),
        (LimitKind::DiracOfLighter, ChannelSpec::scalar_fermion(3, Parity::I).unwrap(), scalar(h), fermion(l)),
    ];
    for (kind, channel, p1, p2) in channels {
        for sys in limit_system(kind, channel, p1, p2, coulomb(a)).unwrap() {
            for (k, (e, _)) in levels(&sys, 3, &settings).into_iter().enumerate() {
                let k = k as u32;
                let m = sys.reduced_mass();
                let exact = match sys.kind {
                    SystemKind::Schroedinger { ell } => schrodinger_level(ell + 1 + k, m, a),
                    SystemKind::KleinGordon { ell } => klein_gordon_level(ell + 1 + k, ell, m, a),
                    SystemKind::Dirac { kappa } => {
                        let two_j = 2 * kappa.unsigned_abs() - 1;
                        // ℓ = j + 1/2 for κ > 0 removes the n = j + 1/2 level
                        let first = (two_j + 1) / 2 + u32::from(kappa > 0);
                        dirac_level(first + k, two_j, m, a)
                    }
                    other => panic!("unexpected limit {other:?}"),
                }
                .unwrap();
                worst = worst.max(rel(e, exact));
                cases += 1;
            }
        }
    }
    let ok = worst < 1e-8;
    report(10, ok, &format!("{cases} limit-system levels vs Schroedinger/KG/Dirac oracles, max rel dev {worst:.1e} (1e-8)"));
    assert!(ok);
}
