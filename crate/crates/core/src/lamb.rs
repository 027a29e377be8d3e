//! Level shifts of a uniformly accelerated atom in free space.
//!
//! The vacuum-fluctuation shift of state a is
//!
//! ```text
//! (e²/3πc³) Σ_b |⟨a|r|b⟩|² ∫₀^∞ dω ω³ (1 + a²/c²ω²) coth(πcω/a) P[1/(ω+ω_ab) − 1/(ω−ω_ab)]
//! ```
//!
//! and the radiation-reaction shift is
//!
//! ```text
//! −(e²/3πc³) Σ_b |⟨a|r|b⟩|² ∫₀^∞ dω ω³ P[1/(ω+ω_ab) + 1/(ω−ω_ab)]
//! ```
//!
//! Writing coth(y) = 1 + 2 n_B(2y) splits the vacuum-fluctuation integral into
//! four pieces. The two pieces carrying the Bose factor converge on their own
//! (damped on the scale a/2πc); the other two grow without bound in ω and are
//! regularized by a [`CutoffPolicy`]. The radiation-reaction integral is
//! regularized by the same policy and takes no acceleration at all.

use core::f64::consts::PI;

use crate::atom::{AtomModel, Transition};
use crate::constants::{Acceleration, CODATA};
use crate::error::{converged, require, Error, Result};
use crate::quad::{bose, integrate_principal_value, Domain, QuadConfig};

/// Electron rest energy over ħ, m_e c²/ħ in rad/s.
pub const ELECTRON_REST_FREQUENCY: f64 = 8.187_105_776_9e-7 / 1.054_571_817e-27;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CutoffShape {
    /// Integrate up to Λ and stop.
    Hard,
    /// Weight the integrand by exp(−ω/Λ) and integrate to infinity.
    Exponential,
}

/// Ultraviolet regularization of the cutoff-dependent pieces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffPolicy {
    lambda: f64,
    shape: CutoffShape,
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        Self {
            lambda: ELECTRON_REST_FREQUENCY,
            shape: CutoffShape::Hard,
        }
    }
}

impl CutoffPolicy {
    pub fn new(lambda: f64, shape: CutoffShape) -> Result<Self> {
        require("lambda", lambda, lambda > 0.0, "cutoff frequency must be positive")?;
        Ok(Self { lambda, shape })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn shape(&self) -> CutoffShape {
        self.shape
    }

    /// The cutoff has to sit above every transition of the atom.
    pub fn validate_for(&self, atom: &AtomModel) -> Result<()> {
        let top = atom.max_abs_frequency();
        require(
            "lambda",
            self.lambda,
            self.lambda > top,
            "cutoff frequency must exceed the largest transition frequency",
        )?;
        Ok(())
    }
}

/// Vacuum-fluctuation shift split by origin, plus the radiation-reaction
/// shift. Energies in erg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftBreakdown {
    /// ω³ term with coth → 1, cutoff-regularized.
    pub inertial_vf: f64,
    /// ω³ term with the Bose factor.
    pub thermal_vf: f64,
    /// a²/c²ω² term with the Bose factor.
    pub nonthermal_a2_bose: f64,
    /// a²/c²ω² term with coth → 1, cutoff-regularized.
    pub nonthermal_a2_cutoff: f64,
    pub rr: f64,
    pub cutoff: CutoffPolicy,
    pub acceleration: Acceleration,
}

impl ShiftBreakdown {
    pub fn total_vf(&self) -> f64 {
        self.inertial_vf + self.thermal_vf + self.nonthermal_a2_bose + self.nonthermal_a2_cutoff
    }

    /// Sum of the two a² pieces.
    pub fn nonthermal_vf(&self) -> f64 {
        self.nonthermal_a2_bose + self.nonthermal_a2_cutoff
    }

    pub fn total(&self) -> f64 {
        self.total_vf() + self.rr
    }
}

#[inline]
fn resolvent_vf(w: f64, omega_ab: f64) -> f64 {
    1.0 / (w + omega_ab) - 1.0 / (w - omega_ab)
}

#[inline]
fn resolvent_rr(w: f64, omega_ab: f64) -> f64 {
    1.0 / (w + omega_ab) + 1.0 / (w - omega_ab)
}

/// e²|⟨a|r|b⟩|² / (3πc³)
fn strength(t: &Transition) -> f64 {
    let k = CODATA;
    k.e_charge * k.e_charge * t.dipole_sq() / (3.0 * PI * k.c * k.c * k.c)
}

/// Angular frequency scale a/(2πc) of the Bose factor.
fn bose_scale(a: Acceleration) -> f64 {
    a.cm_per_s2() / (2.0 * PI * CODATA.c)
}

/// P∫ g(ω) dω over the cutoff-regularized range.
pub(crate) fn cutoff_integral<G: Fn(f64) -> f64>(
    g: G,
    pole: f64,
    cutoff: &CutoffPolicy,
    cfg: &QuadConfig,
    what: &'static str,
) -> Result<f64> {
    let lambda = cutoff.lambda;
    let result = match cutoff.shape {
        CutoffShape::Hard => integrate_principal_value(g, pole, Domain::Finite { upper: lambda }, cfg)?,
        CutoffShape::Exponential => integrate_principal_value(
            |w| g(w) * libm::exp(-w / lambda),
            pole,
            Domain::Decaying { decay_scale: lambda },
            cfg,
        )?,
    };
    converged(what, result)
}

/// P∫₀^∞ g(ω)·2n_B(ω/scale) dω.
pub(crate) fn bose_integral<G: Fn(f64) -> f64>(
    g: G,
    pole: f64,
    scale: f64,
    cfg: &QuadConfig,
    what: &'static str,
) -> Result<f64> {
    let result = integrate_principal_value(
        |w| {
            let n = bose(w / scale);
            // n underflows to 0 far out in the tail; skip g there
            if n == 0.0 {
                0.0
            } else {
                2.0 * n * g(w)
            }
        },
        pole,
        Domain::Decaying { decay_scale: scale },
        cfg,
    )?;
    converged(what, result)
}

fn check_inputs(atom: &AtomModel, cutoff: &CutoffPolicy, cfg: &QuadConfig) -> Result<()> {
    cfg.validate()?;
    cutoff.validate_for(atom)
}

/// Radiation-reaction shift, erg. Takes no acceleration: in free space the
/// reaction field is independent of the motion.
pub fn rr_shift(atom: &AtomModel, cutoff: &CutoffPolicy, cfg: &QuadConfig) -> Result<f64> {
    check_inputs(atom, cutoff, cfg)?;
    let mut total = 0.0;
    for t in atom.transitions().iter().filter(|t| t.dipole_sq() > 0.0) {
        let s = t.omega_ab();
        let integral = cutoff_integral(
            |w| w * w * w * resolvent_rr(w, s),
            s.abs(),
            cutoff,
            cfg,
            "radiation-reaction shift",
        )?;
        total -= strength(t) * integral;
    }
    Ok(total)
}

/// Vacuum-fluctuation shift with its four-way split, together with the
/// radiation-reaction shift for the same cutoff.
pub fn vf_shift(atom: &AtomModel, a: Acceleration, cutoff: &CutoffPolicy, cfg: &QuadConfig) -> Result<ShiftBreakdown> {
    check_inputs(atom, cutoff, cfg)?;
    let mut inertial = 0.0;
    for t in atom.transitions().iter().filter(|t| t.dipole_sq() > 0.0) {
        let s = t.omega_ab();
        inertial += strength(t)
            * cutoff_integral(
                |w| w * w * w * resolvent_vf(w, s),
                s.abs(),
                cutoff,
                cfg,
                "inertial vacuum-fluctuation shift",
            )?;
    }
    let pieces = acceleration_pieces(atom, a, cutoff, cfg)?;
    Ok(ShiftBreakdown {
        inertial_vf: inertial,
        thermal_vf: pieces.thermal,
        nonthermal_a2_bose: pieces.nonthermal_bose,
        nonthermal_a2_cutoff: pieces.nonthermal_cutoff,
        rr: rr_shift(atom, cutoff, cfg)?,
        cutoff: *cutoff,
        acceleration: a,
    })
}

#[derive(Debug, Clone, Copy, Default)]
struct AccelerationPieces {
    thermal: f64,
    nonthermal_bose: f64,
    nonthermal_cutoff: f64,
}

fn acceleration_pieces(
    atom: &AtomModel,
    a: Acceleration,
    cutoff: &CutoffPolicy,
    cfg: &QuadConfig,
) -> Result<AccelerationPieces> {
    let mut out = AccelerationPieces::default();
    if a.is_zero() {
        // exact limit: the Bose factor vanishes and the a² term carries a² = 0
        return Ok(out);
    }
    let scale = bose_scale(a);
    let a_over_c = a.cm_per_s2() / CODATA.c;
    let a2 = a_over_c * a_over_c;
    for t in atom.transitions().iter().filter(|t| t.dipole_sq() > 0.0) {
        let s = t.omega_ab();
        let p = s.abs();
        let k = strength(t);
        out.thermal += k * bose_integral(|w| w * w * w * resolvent_vf(w, s), p, scale, cfg, "thermal shift")?;
        out.nonthermal_bose +=
            k * a2 * bose_integral(|w| w * resolvent_vf(w, s), p, scale, cfg, "non-thermal Bose shift")?;
        out.nonthermal_cutoff +=
            k * a2 * cutoff_integral(|w| w * resolvent_vf(w, s), p, cutoff, cfg, "non-thermal cutoff shift")?;
    }
    Ok(out)
}

/// Crossing point where the thermal piece equals the a² pieces in magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparability {
    pub acceleration: Acceleration,
    /// ln(|thermal_vf| / |nonthermal_a2_bose + nonthermal_a2_cutoff|) at the root.
    pub log_ratio: f64,
    pub thermal_vf: f64,
    pub nonthermal_vf: f64,
    pub cutoff: CutoffPolicy,
    pub iterations: usize,
}

/// ln(|thermal| / |non-thermal|) together with both pieces.
pub fn thermal_log_ratio(
    atom: &AtomModel,
    a: Acceleration,
    cutoff: &CutoffPolicy,
    cfg: &QuadConfig,
) -> Result<(f64, f64, f64)> {
    check_inputs(atom, cutoff, cfg)?;
    require("acceleration", a.cm_per_s2(), !a.is_zero(), "the ratio is undefined at a = 0")?;
    let p = acceleration_pieces(atom, a, cutoff, cfg)?;
    let nonthermal = p.nonthermal_bose + p.nonthermal_cutoff;
    Ok((libm::log(p.thermal.abs() / nonthermal.abs()), p.thermal, nonthermal))
}

/// Bisects ln(ratio) in ln a over `bracket` (cm/s²) until the acceleration is
/// pinned to 0.01 %.
pub fn comparable_acceleration(
    atom: &AtomModel,
    cutoff: &CutoffPolicy,
    bracket: (f64, f64),
    cfg: &QuadConfig,
) -> Result<Comparability> {
    let (lo, hi) = bracket;
    require("bracket lower end", lo, lo > 0.0, "bracket must be positive")?;
    require("bracket upper end", hi, hi > lo, "bracket upper end must exceed the lower end")?;
    let ratio = |a: f64| thermal_log_ratio(atom, Acceleration::new(a)?, cutoff, cfg);

    let (mut lo, mut hi) = (lo, hi);
    let (f_lo, _, _) = ratio(lo)?;
    let (f_hi, _, _) = ratio(hi)?;
    if !(f_lo.is_finite() || f_hi.is_finite()) || f_lo * f_hi > 0.0 || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NoSignChange {
            lo,
            log_ratio_lo: f_lo,
            hi,
            log_ratio_hi: f_hi,
        });
    }
    let rising = f_lo < f_hi;
    let mut iterations = 0;
    while libm::log(hi / lo) > 1e-4 && iterations < 200 {
        iterations += 1;
        let mid = libm::sqrt(lo * hi);
        let (f_mid, _, _) = ratio(mid)?;
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (f_mid < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = libm::sqrt(lo * hi);
    let (log_ratio, thermal_vf, nonthermal_vf) = ratio(root)?;
    Ok(Comparability {
        acceleration: Acceleration::new(root)?,
        log_ratio,
        thermal_vf,
        nonthermal_vf,
        cutoff: *cutoff,
        iterations,
    })
}
