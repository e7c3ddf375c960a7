use super::*;
use crate::model::{ChannelSpec, InteractionSpec, Parity, ParticleSpec};
use crate::oracles::{dirac_level, klein_gordon_level, schrodinger_level};
use crate::radial::{build_system, limit_system, LimitKind};

const ALPHA: f64 = 0.0072973525698;

fn ss(ratio: f64, ell: u32, alpha: f64) -> RadialSystem {
    let s1 = ParticleSpec::scalar(ratio).unwrap();
    let s2 = ParticleSpec::scalar(1.0).unwrap();
    build_system(ChannelSpec::scalar_scalar(ell), s1, s2, InteractionSpec::coulomb(alpha).unwrap()).unwrap()
}

fn sf(ratio: f64, two_j: u32, parity: Parity) -> RadialSystem {
    let s = ParticleSpec::scalar(ratio).unwrap();
    let f = ParticleSpec::fermion(1.0).unwrap();
    build_system(ChannelSpec::scalar_fermion(two_j, parity).unwrap(), s, f, InteractionSpec::coulomb(ALPHA).unwrap()).unwrap()
}

fn ff(ratio: f64, j: u32, parity: Parity, alpha: f64) -> RadialSystem {
    let f1 = ParticleSpec::fermion(ratio).unwrap();
    let f2 = ParticleSpec::fermion(1.0).unwrap();
    build_system(ChannelSpec::fermion_fermion(j, parity), f1, f2, InteractionSpec::coulomb(alpha).unwrap()).unwrap()
}

fn levels(sys: &RadialSystem, count: usize, settings: &SolverSettings) -> Vec<f64> {
    let spec = find_eigenvalues(sys, default_bracket(sys, count), count, settings).unwrap();
    assert_eq!(spec.levels.len(), count);
    spec.levels.iter().map(|l| l.binding).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn schroedinger_limit_matches_bohr_levels() {
    let s = ParticleSpec::scalar(1.0).unwrap();
    let sys = &limit_system(LimitKind::Schroedinger, ChannelSpec::scalar_scalar(0), s, s, InteractionSpec::coulomb(0.1).unwrap())
        .unwrap()[0];
    for (n, e) in levels(sys, 3, &SolverSettings::default()).into_iter().enumerate() {
        let exact = schrodinger_level(n as u32 + 1, 0.5, 0.1).unwrap();
        assert!(rel(e, exact) < 1e-9, "n = {}: {e} vs {exact}", n + 1);
    }
}

#[test]
fn equal_scalars_reproduce_reference_ground_state() {
    // two equal scalars, (n, ℓ) = (1, 0), in units of m₂
    let e = levels(&ss(1.0, 0, ALPHA), 1, &SolverSettings::default())[0];
    assert!(rel(e, -1.331323e-5) < 5e-5, "{e}");
    // reduced-mass Klein-Gordon value differs at relative order α²
    let kg = klein_gordon_level(1, 0, 0.5, ALPHA).unwrap();
    assert!(rel(e, kg) > 1e-6 && rel(e, kg) < 1e-4);
}

#[test]
fn heavy_scalar_partner_approaches_dirac() {
    let sys = sf(1e4, 1, Parity::I);
    let e = levels(&sys, 1, &SolverSettings::default())[0];
    let d = dirac_level(1, 1, sys.reduced_mass(), ALPHA).unwrap();
    assert!(rel(e, d) < 1e-3, "{e} vs {d}");
}

#[test]
fn hydrogen_like_fermions_near_dirac() {
    let sys = ff(1836.15267245, 0, Parity::I, ALPHA);
    let e = levels(&sys, 1, &SolverSettings::default())[0];
    let d = dirac_level(1, 1, sys.reduced_mass(), ALPHA).unwrap();
    assert!(rel(e, d) < 1e-3, "{e} vs {d}");
}

#[test]
fn node_counts_increase_with_level() {
    let settings = SolverSettings::default();
    for sys in [ss(1.0, 0, 0.1), sf(1.0, 1, Parity::I), ff(1.0, 0, Parity::I, 0.1)] {
        let spec = find_eigenvalues(&sys, default_bracket(&sys, 3), 3, &settings).unwrap();
        let nodes: Vec<usize> = spec.levels.iter().map(|l| l.nodes).collect();
        assert!(nodes.windows(2).all(|w| w[1] > w[0]), "{:?}: {nodes:?}", sys.kind);
        let energies: Vec<f64> = spec.levels.iter().map(|l| l.binding).collect();
        assert!(energies.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn eigenvalues_independent_of_matching_radius() {
    let sys = ss(1.0, 1, 0.1);
    let base = levels(&sys, 2, &SolverSettings::default());
    let shifted = levels(&sys, 2, &SolverSettings { r_c_scale: 1.3, ..SolverSettings::default() });
    let longer = levels(&sys, 2, &SolverSettings { r_max_scale: 1.5, ..SolverSettings::default() });
    for k in 0..2 {
        assert!(rel(shifted[k], base[k]) < 1e-10, "{} vs {}", shifted[k], base[k]);
        assert!(rel(longer[k], base[k]) < 1e-8);
    }
}

#[test]
fn determinant_changes_sign_across_eigenvalue() {
    let sys = ss(1.0, 0, 0.1);
    let settings = SolverSettings::default();
    let e = levels(&sys, 1, &settings)[0];
    let lo = spectral_determinant(&sys, e * 1.01, &settings).unwrap();
    let hi = spectral_determinant(&sys, e * 0.99, &settings).unwrap();
    assert!(lo.determinant.signum() != hi.determinant.signum());
}

#[test]
fn empty_bracket_is_an_error() {
    let sys = ss(1.0, 0, 0.1);
    assert!(find_eigenvalues(&sys, (1.0, 0.5), 1, &SolverSettings::default()).is_err());
}
