//! Atomic transitions and the dynamic polarizability at imaginary frequency.
//!
//! Dipole tensors are contracted isotropically: a transition enters only
//! through its frequency and the squared position matrix element summed over
//! the degenerate final states, Σ_m |⟨a|r|b_m⟩|².

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::constants::{PhysicalConstants, CODATA};
use crate::error::{require, Error, Result};
use crate::quad::{integrate_algebraic, IntegralResult, QuadConfig};

/// A dipole transition out of the reference state a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    omega_ba: f64,
    dipole_sq: f64,
}

impl Transition {
    /// `omega_ba` = ω_b − ω_a in rad/s (negative for a downward transition),
    /// `dipole_sq` = |⟨a|r|b⟩|² in cm².
    pub fn new(omega_ba: f64, dipole_sq: f64) -> Result<Self> {
        require(
            "omega_ba",
            omega_ba,
            omega_ba != 0.0,
            "transition frequency must be finite and nonzero",
        )?;
        require(
            "dipole_sq",
            dipole_sq,
            dipole_sq >= 0.0,
            "squared dipole matrix element must be finite and non-negative",
        )?;
        Ok(Self { omega_ba, dipole_sq })
    }

    pub fn omega_ba(&self) -> f64 {
        self.omega_ba
    }

    /// ω_ab = ω_a − ω_b, the sign convention of the shift integrals.
    pub fn omega_ab(&self) -> f64 {
        -self.omega_ba
    }

    pub fn dipole_sq(&self) -> f64 {
        self.dipole_sq
    }

    pub fn with_dipole_sq(self, dipole_sq: f64) -> Result<Self> {
        Self::new(self.omega_ba, dipole_sq)
    }
}

/// A reference state together with the transitions retained from it.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomModel {
    name: String,
    state_label: String,
    transitions: Vec<Transition>,
}

impl AtomModel {
    pub fn new(name: impl Into<String>, state_label: impl Into<String>, transitions: Vec<Transition>) -> Result<Self> {
        if transitions.is_empty() {
            return Err(Error::InvalidModel(String::from(
                "an atom model needs at least one transition",
            )));
        }
        Ok(Self {
            name: name.into(),
            state_label: state_label.into(),
            transitions,
        })
    }

    /// Hydrogen 1s with the single 1s → 2p transition.
    ///
    /// ω = (3/8) e²/(a₀ħ), the Bohr-level 1s-2p spacing (10.2 eV), and
    /// Σ_m |⟨1s|r|2p_m⟩|² = 3 (128√2/243)² a₀² = (98304/59049) a₀², which is
    /// oscillator strength f = 0.4162.
    pub fn hydrogen_1s() -> Self {
        let k = CODATA;
        let omega = 0.375 * k.hartree() / k.hbar;
        let dipole_sq = 98_304.0 / 59_049.0 * k.bohr_radius * k.bohr_radius;
        Self {
            name: String::from("hydrogen"),
            state_label: String::from("1s"),
            transitions: alloc::vec![Transition { omega_ba: omega, dipole_sq }],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_label(&self) -> &str {
        &self.state_label
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// True when every retained transition goes upward.
    pub fn is_ground_state(&self) -> bool {
        self.transitions.iter().all(|t| t.omega_ba > 0.0)
    }

    pub fn max_abs_frequency(&self) -> f64 {
        self.transitions.iter().map(|t| t.omega_ba.abs()).fold(0.0, f64::max)
    }

    pub fn min_abs_frequency(&self) -> f64 {
        self.transitions
            .iter()
            .map(|t| t.omega_ba.abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Returns a copy with the transition frequencies multiplied by `factor`.
    pub fn scaled_frequencies(&self, factor: f64) -> Result<Self> {
        let transitions = self
            .transitions
            .iter()
            .map(|t| Transition::new(t.omega_ba * factor, t.dipole_sq))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.name.clone(), self.state_label.clone(), transitions)
    }

    /// Returns a copy with every squared dipole moment multiplied by `factor`.
    pub fn scaled_dipoles(&self, factor: f64) -> Result<Self> {
        let transitions = self
            .transitions
            .iter()
            .map(|t| t.with_dipole_sq(t.dipole_sq * factor))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.name.clone(), self.state_label.clone(), transitions)
    }
}

/// Dynamic polarizability α(iu), cm³.
#[derive(Debug, Clone, PartialEq)]
pub enum PolarizabilityModel {
    /// Frequency-independent α₀.
    Static { alpha0: f64 },
    /// Single oscillator α₀ω₀²/(ω₀² + u²).
    Lorentz { alpha0: f64, omega0: f64 },
    /// (2e²/3ħ) Σ_b ω_ba |⟨a|r|b⟩|² / (ω_ba² + u²).
    FromTransitions(AtomModel),
}

impl PolarizabilityModel {
    pub fn constant(alpha0: f64) -> Result<Self> {
        require("alpha0", alpha0, alpha0 >= 0.0, "static polarizability must be non-negative")?;
        Ok(Self::Static { alpha0 })
    }

    pub fn lorentz(alpha0: f64, omega0: f64) -> Result<Self> {
        require("alpha0", alpha0, alpha0 >= 0.0, "static polarizability must be non-negative")?;
        require("omega0", omega0, omega0 > 0.0, "resonance frequency must be positive")?;
        Ok(Self::Lorentz { alpha0, omega0 })
    }

    pub fn from_transitions(atom: AtomModel) -> Result<Self> {
        if !atom.is_ground_state() {
            return Err(Error::InvalidModel(format!(
                "polarizability of {} {} needs a ground-state model (all omega_ba > 0)",
                atom.name, atom.state_label
            )));
        }
        Ok(Self::FromTransitions(atom))
    }

    /// Single-oscillator model with the static polarizability of `atom` and
    /// its lowest transition frequency. Exact for one-transition atoms.
    pub fn lorentz_matched(atom: &AtomModel) -> Result<Self> {
        if !atom.is_ground_state() {
            return Err(Error::InvalidModel(format!(
                "{} {} is not a ground-state model",
                atom.name, atom.state_label
            )));
        }
        let alpha0 = transitions_polarizability(&CODATA, atom, 0.0);
        Self::lorentz(alpha0, atom.min_abs_frequency())
    }

    /// Static polarizability α(0).
    pub fn static_value(&self) -> f64 {
        self.at(0.0)
    }

    /// Lowest resonance frequency, `None` for a static model.
    pub fn resonance(&self) -> Option<f64> {
        match self {
            PolarizabilityModel::Static { .. } => None,
            PolarizabilityModel::Lorentz { omega0, .. } => Some(*omega0),
            PolarizabilityModel::FromTransitions(atom) => Some(atom.min_abs_frequency()),
        }
    }

    /// Scales α(iu) by a constant factor.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        match self {
            PolarizabilityModel::Static { alpha0 } => Self::constant(alpha0 * factor),
            PolarizabilityModel::Lorentz { alpha0, omega0 } => Self::lorentz(alpha0 * factor, *omega0),
            PolarizabilityModel::FromTransitions(atom) => Self::from_transitions(atom.scaled_dipoles(factor)?),
        }
    }

    pub(crate) fn at(&self, u: f64) -> f64 {
        match self {
            PolarizabilityModel::Static { alpha0 } => *alpha0,
            PolarizabilityModel::Lorentz { alpha0, omega0 } => {
                let w2 = omega0 * omega0;
                alpha0 * w2 / (w2 + u * u)
            }
            PolarizabilityModel::FromTransitions(atom) => transitions_polarizability(&CODATA, atom, u),
        }
    }
}

fn transitions_polarizability(k: &PhysicalConstants, atom: &AtomModel, u: f64) -> f64 {
    let prefactor = 2.0 * k.e_charge * k.e_charge / (3.0 * k.hbar);
    let sum: f64 = atom
        .transitions
        .iter()
        .map(|t| t.omega_ba * t.dipole_sq / (t.omega_ba * t.omega_ba + u * u))
        .sum();
    prefactor * sum
}

/// α(iu) in cm³ at imaginary angular frequency `u` (rad/s).
pub fn polarizability_iu(model: &PolarizabilityModel, u: f64) -> Result<f64> {
    require("u", u, u >= 0.0, "imaginary frequency must be finite and non-negative")?;
    Ok(model.at(u))
}

/// ∫₀^∞ α_A(iω) α_B(iω) dω over angular frequency, in cm⁶·rad/s.
///
/// Divide by c to get the same integral over the wavenumber u = ω/c used in
/// the dispersion-energy formulas.
pub fn london_integral(a: &PolarizabilityModel, b: &PolarizabilityModel, cfg: &QuadConfig) -> Result<IntegralResult> {
    let scale = match (a.resonance(), b.resonance()) {
        (None, None) => {
            return Err(Error::Divergent(
                "the product of two static polarizabilities does not decay; the London integral needs a frequency-dependent model",
            ))
        }
        (Some(w), None) | (None, Some(w)) => w,
        (Some(wa), Some(wb)) => libm::sqrt(wa * wb),
    };
    if a.static_value() == 0.0 || b.static_value() == 0.0 {
        return Ok(IntegralResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        });
    }
    Ok(integrate_algebraic(|u| a.at(u) * b.at(u), scale, cfg)?)
}
