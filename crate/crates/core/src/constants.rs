//! Physical constants (CODATA 2010 where the atomic data come from).

/// Fine-structure constant.
pub const ALPHA: f64 = 0.0072973525698;

/// Unified atomic mass unit in MeV.
pub const U_MEV: f64 = 931.494061;

/// Planck constant in eV·s.
pub const H_EV_S: f64 = 4.135667516e-15;

/// ħc in MeV·fm.
pub const HBARC_MEV_FM: f64 = 197.3269718;

/// Masses in u.
pub const M_ELECTRON_U: f64 = 5.485799091e-4;
pub const M_PROTON_U: f64 = 1.007276466879;
pub const M_MUON_U: f64 = 0.1134289267;
pub const M_HELION_U: f64 = 3.0160293;

/// Magnetic-moment factors g/2.
pub const KAPPA_PROTON: f64 = 2.7928473565;
pub const KAPPA_ELECTRON: f64 = 1.0011596522;
pub const KAPPA_MUON: f64 = 1.0011659207;
pub const KAPPA_HELION: f64 = -3.1839627379413;

/// String tension given in GeV/fm, returned in MeV².
pub fn string_tension_mev2(gev_per_fm: f64) -> f64 {
    gev_per_fm * 1000.0 * HBARC_MEV_FM
}
