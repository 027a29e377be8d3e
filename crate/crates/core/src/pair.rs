//! Dispersion interaction of two atoms accelerating together.
//!
//! In the dimensionless variable x = uR, u = ω/c the imaginary wavenumber, the
//! three terms of the energy at lab time t are
//!
//! ```text
//! static    −(ħc/πR⁷)          ∫ α_A α_B (x⁴ + 2x³ + 5x² + 6x + 3) e^{−2x} dx
//! linear    (a²t/2c³)(ħc/πR⁶)  ∫ α_A α_B (3x² + 4x + 2) e^{−2x} dx
//! quadratic (a²t²/6c²)(ħc/πR⁷) ∫ α_A α_B (−x⁴ + 4x³ + 8x² + 8x + 4) e^{−2x} dx
//! ```
//!
//! with α evaluated at the imaginary angular frequency cx/R.

use core::f64::consts::PI;
use core::fmt;

use crate::atom::{london_integral, PolarizabilityModel};
use crate::constants::{Acceleration, CODATA};
use crate::error::{converged, require, Error, Result};
use crate::quad::{integrate_decaying, QuadConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct PairConfig {
    r: f64,
    acceleration: Acceleration,
    t: f64,
    alpha_a: PolarizabilityModel,
    alpha_b: PolarizabilityModel,
}

impl PairConfig {
    /// `r` in cm, `t` in s.
    pub fn new(
        r: f64,
        acceleration: Acceleration,
        t: f64,
        alpha_a: PolarizabilityModel,
        alpha_b: PolarizabilityModel,
    ) -> Result<Self> {
        require("R", r, r > 0.0, "interatomic distance must be positive")?;
        require("t", t, t >= 0.0, "time must be non-negative")?;
        let cfg = Self {
            r,
            acceleration,
            t,
            alpha_a,
            alpha_b,
        };
        require("a^2 t^2 / c^2", cfg.expansion_parameter(), true, "must be finite")?;
        Ok(cfg)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn acceleration(&self) -> Acceleration {
        self.acceleration
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn alpha_a(&self) -> &PolarizabilityModel {
        &self.alpha_a
    }

    pub fn alpha_b(&self) -> &PolarizabilityModel {
        &self.alpha_b
    }

    pub fn with_r(&self, r: f64) -> Result<Self> {
        Self::new(r, self.acceleration, self.t, self.alpha_a.clone(), self.alpha_b.clone())
    }

    pub fn with_motion(&self, acceleration: Acceleration, t: f64) -> Result<Self> {
        Self::new(self.r, acceleration, t, self.alpha_a.clone(), self.alpha_b.clone())
    }

    pub fn swapped(&self) -> Self {
        Self {
            alpha_a: self.alpha_b.clone(),
            alpha_b: self.alpha_a.clone(),
            ..self.clone()
        }
    }

    /// a²t²/c².
    pub fn expansion_parameter(&self) -> f64 {
        let v = self.acceleration.cm_per_s2() * self.t / CODATA.c;
        v * v
    }

    /// The corrections come from an expansion in a·t/c; past a²t²/c² = 1 the
    /// numbers are still computed but should not be trusted.
    pub fn beyond_validity(&self) -> bool {
        self.expansion_parameter() > 1.0
    }

    /// Lowest resonance of the two atoms, `None` if both are static.
    pub fn resonance(&self) -> Option<f64> {
        match (self.alpha_a.resonance(), self.alpha_b.resonance()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(w), None) | (None, Some(w)) => Some(w),
            (None, None) => None,
        }
    }

    /// R measured in units of c/ω₀.
    pub fn reduced_distance(&self) -> Option<f64> {
        self.resonance().map(|w| self.r * w / CODATA.c)
    }

    /// Near below 0.1 c/ω₀, far above 10 c/ω₀. Two static atoms are always in
    /// the far zone.
    pub fn zone(&self) -> Zone {
        match self.reduced_distance() {
            None => Zone::Far,
            Some(x) if x < 0.1 => Zone::Near,
            Some(x) if x > 10.0 => Zone::Far,
            Some(_) => Zone::Intermediate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Term {
    Static,
    Linear,
    Quadratic,
}

impl Term {
    pub const ALL: [Term; 3] = [Term::Static, Term::Linear, Term::Quadratic];

    pub fn name(self) -> &'static str {
        match self {
            Term::Static => "static",
            Term::Linear => "linear",
            Term::Quadratic => "quadratic",
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Zone {
    Near,
    Intermediate,
    Far,
}

impl Zone {
    pub fn name(self) -> &'static str {
        match self {
            Zone::Near => "near",
            Zone::Intermediate => "intermediate",
            Zone::Far => "far",
        }
    }
}

impl fmt::Display for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Energies in erg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionBreakdown {
    pub static_term: f64,
    pub linear_t_term: f64,
    pub quadratic_t_term: f64,
    pub total: f64,
    pub beyond_validity: bool,
}

fn static_kernel(x: f64) -> f64 {
    (((x + 2.0) * x + 5.0) * x + 6.0) * x + 3.0
}

fn linear_kernel(x: f64) -> f64 {
    (3.0 * x + 4.0) * x + 2.0
}

fn quadratic_kernel(x: f64) -> f64 {
    (((-x + 4.0) * x + 8.0) * x + 8.0) * x + 4.0
}

/// ∫₀^∞ α_A α_B p(x) e^{−2x} dx.
fn reduced_integral(cfg: &PairConfig, q: &QuadConfig, p: fn(f64) -> f64, what: &'static str) -> Result<f64> {
    q.validate()?;
    if cfg.alpha_a.static_value() == 0.0 || cfg.alpha_b.static_value() == 0.0 {
        return Ok(0.0);
    }
    let to_frequency = CODATA.c / cfg.r;
    let f = |x: f64| {
        let u = to_frequency * x;
        cfg.alpha_a.at(u) * cfg.alpha_b.at(u) * p(x) * libm::exp(-2.0 * x)
    };
    converged(what, integrate_decaying(f, 0.5, q)?)
}

/// Interaction of the two atoms at rest, erg.
pub fn static_vdw(cfg: &PairConfig, q: &QuadConfig) -> Result<f64> {
    let k = CODATA;
    let r7 = libm::pow(cfg.r, 7.0);
    Ok(-(k.hbar * k.c / (PI * r7)) * reduced_integral(cfg, q, static_kernel, "static interaction")?)
}

/// Correction growing linearly in t, erg. Zero without quadrature when a·t = 0.
pub fn linear_correction(cfg: &PairConfig, q: &QuadConfig) -> Result<f64> {
    let k = CODATA;
    let a = cfg.acceleration.cm_per_s2();
    if a == 0.0 || cfg.t == 0.0 {
        return Ok(0.0);
    }
    let r6 = libm::pow(cfg.r, 6.0);
    let pref = a * a * cfg.t / (2.0 * k.c * k.c * k.c) * (k.hbar * k.c / (PI * r6));
    Ok(pref * reduced_integral(cfg, q, linear_kernel, "linear-in-t correction")?)
}

/// Correction growing as t², erg. Zero without quadrature when a·t = 0.
pub fn quadratic_correction(cfg: &PairConfig, q: &QuadConfig) -> Result<f64> {
    let k = CODATA;
    let a = cfg.acceleration.cm_per_s2();
    if a == 0.0 || cfg.t == 0.0 {
        return Ok(0.0);
    }
    let r7 = libm::pow(cfg.r, 7.0);
    let pref = a * a * cfg.t * cfg.t / (6.0 * k.c * k.c) * (k.hbar * k.c / (PI * r7));
    Ok(pref * reduced_integral(cfg, q, quadratic_kernel, "quadratic-in-t correction")?)
}

pub fn term(which: Term, cfg: &PairConfig, q: &QuadConfig) -> Result<f64> {
    match which {
        Term::Static => static_vdw(cfg, q),
        Term::Linear => linear_correction(cfg, q),
        Term::Quadratic => quadratic_correction(cfg, q),
    }
}

pub fn total_interaction(cfg: &PairConfig, q: &QuadConfig) -> Result<InteractionBreakdown> {
    let static_term = static_vdw(cfg, q)?;
    let linear_t_term = linear_correction(cfg, q)?;
    let quadratic_t_term = quadratic_correction(cfg, q)?;
    Ok(InteractionBreakdown {
        static_term,
        linear_t_term,
        quadratic_t_term,
        total: static_term + linear_t_term + quadratic_t_term,
        beyond_validity: cfg.beyond_validity(),
    })
}

/// Leading closed form of a term deep inside a zone, erg.
///
/// The near zone uses ∫α_Aα_B dω and needs at least one frequency-dependent
/// model; the far zone uses the static polarizabilities.
pub fn zone_asymptote(which: Term, zone: Zone, cfg: &PairConfig, q: &QuadConfig) -> Result<f64> {
    let k = CODATA;
    let r = cfg.r;
    let a = cfg.acceleration.cm_per_s2();
    let (t, c) = (cfg.t, k.c);
    let motion = a * a / (c * c);
    match zone {
        Zone::Intermediate => Err(Error::InvalidZone(
            "no closed form between the near and far zones",
        )),
        Zone::Near => {
            if cfg.alpha_a.resonance().is_none() && cfg.alpha_b.resonance().is_none() {
                return Err(Error::InvalidZone(
                    "near-zone forms need a frequency-dependent polarizability",
                ));
            }
            let l = converged("London integral", london_integral(&cfg.alpha_a, &cfg.alpha_b, q)?)?;
            Ok(match which {
                Term::Static => -3.0 * k.hbar / (PI * libm::pow(r, 6.0)) * l,
                Term::Linear => motion * t / c * k.hbar / (PI * libm::pow(r, 5.0)) * l,
                Term::Quadratic => 2.0 / 3.0 * motion * t * t * k.hbar / (PI * libm::pow(r, 6.0)) * l,
            })
        }
        Zone::Far => {
            let aa = cfg.alpha_a.static_value() * cfg.alpha_b.static_value();
            Ok(match which {
                Term::Static => -(23.0 / (4.0 * PI)) * k.hbar * c * aa / libm::pow(r, 7.0),
                Term::Linear => (11.0 / (8.0 * PI)) * motion * t / c * k.hbar * c * aa / libm::pow(r, 6.0),
                Term::Quadratic => (9.0 / (8.0 * PI)) * motion * t * t * k.hbar * c * aa / libm::pow(r, 7.0),
            })
        }
    }
}

/// Centered d ln|E| / d ln R from evaluations at R(1 ± dlog_r).
pub fn powerlaw_exponent(which: Term, cfg: &PairConfig, q: &QuadConfig, dlog_r: f64) -> Result<f64> {
    require("dlog_r", dlog_r, dlog_r > 0.0 && dlog_r < 0.5, "step must lie in (0, 0.5)")?;
    let up = term(which, &cfg.with_r(cfg.r * (1.0 + dlog_r))?, q)?;
    let down = term(which, &cfg.with_r(cfg.r * (1.0 - dlog_r))?, q)?;
    if up == 0.0 || down == 0.0 {
        return Err(Error::UndefinedExponent);
    }
    Ok((libm::log(up.abs()) - libm::log(down.abs())) / (libm::log1p(dlog_r) - libm::log1p(-dlog_r)))
}

pub const DEFAULT_DLOG_R: f64 = 1e-3;

/// |linear + quadratic| / |static|.
pub fn relative_correction(cfg: &PairConfig, q: &QuadConfig) -> Result<f64> {
    let b = total_interaction(cfg, q)?;
    require(
        "static term",
        b.static_term,
        b.static_term != 0.0,
        "relative correction needs a nonzero static interaction",
    )?;
    Ok((b.linear_t_term + b.quadratic_t_term).abs() / b.static_term.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::AtomModel;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn hydrogen() -> PolarizabilityModel {
        PolarizabilityModel::lorentz_matched(&AtomModel::hydrogen_1s()).unwrap()
    }

    fn w0() -> f64 {
        hydrogen().resonance().unwrap()
    }

    fn lorentz_pair(r: f64, a: f64, t: f64) -> PairConfig {
        PairConfig::new(r, Acceleration::new(a).unwrap(), t, hydrogen(), hydrogen()).unwrap()
    }

    fn static_pair(r: f64, a: f64, t: f64) -> PairConfig {
        let m = PolarizabilityModel::constant(4.5 * 1.481_847_1e-25).unwrap();
        PairConfig::new(r, Acceleration::new(a).unwrap(), t, m.clone(), m).unwrap()
    }

    fn q() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn static_polarizabilities_give_closed_forms() {
        let k = CODATA;
        for r in [1e-5, 1e-4, 1e-3] {
            let cfg = static_pair(r, 1e13, 1e-3);
            let aa = cfg.alpha_a.static_value() * cfg.alpha_b.static_value();
            let s = static_vdw(&cfg, &q()).unwrap();
            assert!(rel(s, -(23.0 / (4.0 * PI)) * k.hbar * k.c * aa / libm::pow(r, 7.0)) < 1e-7);
            let a2t_c3 = 1e26 * 1e-3 / (k.c * k.c * k.c);
            let lin = linear_correction(&cfg, &q()).unwrap();
            assert!(rel(lin, (11.0 / (8.0 * PI)) * a2t_c3 * k.hbar * k.c * aa / libm::pow(r, 6.0)) < 1e-7);
            let a2t2_c2 = 1e26 * 1e-6 / (k.c * k.c);
            let quad = quadratic_correction(&cfg, &q()).unwrap();
            assert!(rel(quad, (9.0 / (8.0 * PI)) * a2t2_c2 * k.hbar * k.c * aa / libm::pow(r, 7.0)) < 1e-7);
            for which in Term::ALL {
                let asym = zone_asymptote(which, Zone::Far, &cfg, &q()).unwrap();
                assert!(rel(term(which, &cfg, &q()).unwrap(), asym) < 1e-7);
            }
        }
    }

    #[test]
    fn london_limit() {
        let m = hydrogen();
        let (alpha0, omega0) = match m {
            PolarizabilityModel::Lorentz { alpha0, omega0 } => (alpha0, omega0),
            _ => unreachable!(),
        };
        let r = 1e-3 * CODATA.c / omega0;
        let cfg = lorentz_pair(r, 0.0, 0.0);
        let s = static_vdw(&cfg, &q()).unwrap();
        let london = -0.75 * CODATA.hbar * omega0 * alpha0 * alpha0 / libm::pow(r, 6.0);
        assert!(rel(s, london) < 1e-3, "{s:e} vs {london:e}");
        assert!(rel(zone_asymptote(Term::Static, Zone::Near, &cfg, &q()).unwrap(), london) < 1e-8);
    }

    #[test]
    fn near_zone_asymptotes() {
        let r = 1e-3 * CODATA.c / w0();
        let cfg = lorentz_pair(r, 1e13, 1e-3);
        assert_eq!(cfg.zone(), Zone::Near);
        for which in Term::ALL {
            let full = term(which, &cfg, &q()).unwrap();
            let asym = zone_asymptote(which, Zone::Near, &cfg, &q()).unwrap();
            assert!(rel(full, asym) < 1e-3, "{which}: {full:e} vs {asym:e}");
        }
    }

    #[test]
    fn far_zone_asymptotes_with_dynamic_polarizability() {
        let r = 1e3 * CODATA.c / w0();
        let cfg = lorentz_pair(r, 1e13, 1e-3);
        assert_eq!(cfg.zone(), Zone::Far);
        for which in Term::ALL {
            let full = term(which, &cfg, &q()).unwrap();
            let asym = zone_asymptote(which, Zone::Far, &cfg, &q()).unwrap();
            assert!(rel(full, asym) < 1e-2, "{which}: {full:e} vs {asym:e}");
        }
    }

    #[test]
    fn exponents() {
        let scale = CODATA.c / w0();
        let cases = [
            (Term::Static, 1e-3, -6.0),
            (Term::Static, 1e3, -7.0),
            (Term::Linear, 1e-3, -5.0),
            (Term::Linear, 1e3, -6.0),
            (Term::Quadratic, 1e-3, -6.0),
            (Term::Quadratic, 1e3, -7.0),
        ];
        for (which, x, want) in cases {
            let cfg = lorentz_pair(x * scale, 1e13, 1e-3);
            let got = powerlaw_exponent(which, &cfg, &q(), DEFAULT_DLOG_R).unwrap();
            assert!((got - want).abs() < 0.01, "{which} at {x}: {got}");
        }
        let at_rest = lorentz_pair(scale, 0.0, 0.0);
        assert!(matches!(
            powerlaw_exponent(Term::Linear, &at_rest, &q(), DEFAULT_DLOG_R),
            Err(Error::UndefinedExponent)
        ));
        assert!(powerlaw_exponent(Term::Static, &at_rest, &q(), 0.0).is_err());
    }

    #[test]
    fn rest_recovers_static_interaction() {
        let cfg = lorentz_pair(1e-6, 0.0, 1.0);
        let b = total_interaction(&cfg, &q()).unwrap();
        assert_eq!(b.linear_t_term, 0.0);
        assert_eq!(b.quadratic_t_term, 0.0);
        assert_eq!(b.total, static_vdw(&cfg, &q()).unwrap());
        let cfg = lorentz_pair(1e-6, 1e20, 0.0);
        assert_eq!(total_interaction(&cfg, &q()).unwrap().total, static_vdw(&cfg, &q()).unwrap());
        assert_eq!(relative_correction(&cfg, &q()).unwrap(), 0.0);
    }

    #[test]
    fn zero_polarizability_gives_zero() {
        let zero = PolarizabilityModel::lorentz(0.0, w0()).unwrap();
        let cfg = PairConfig::new(1e-6, Acceleration::new(1e13).unwrap(), 1e-3, zero, hydrogen()).unwrap();
        let b = total_interaction(&cfg, &q()).unwrap();
        assert_eq!(b.total, 0.0);
        assert!(relative_correction(&cfg, &q()).is_err());
    }

    #[test]
    fn sign_structure() {
        let cfg = lorentz_pair(1e-7, 1e13, 1e-3);
        let b = total_interaction(&cfg, &q()).unwrap();
        assert!(b.static_term < 0.0);
        assert!(b.linear_t_term > 0.0 && b.quadratic_t_term > 0.0);
        assert_eq!(b.total, b.static_term + b.linear_t_term + b.quadratic_t_term);
    }

    #[test]
    fn relative_correction_magnitudes() {
        let t = 1e-3;
        let a = CODATA.c * libm::sqrt(0.2) / t;
        let near = relative_correction(&lorentz_pair(1e-7, a, t), &q()).unwrap();
        let far = relative_correction(&lorentz_pair(3e-5, a, t), &q()).unwrap();
        assert!((0.02..=0.30).contains(&near), "{near}");
        assert!((0.002..=0.10).contains(&far), "{far}");
        // deep in the near zone the quadratic term dominates: ratio → (2/9) a²t²/c²
        let deep = lorentz_pair(1e-3 * CODATA.c / w0(), a, t);
        let b = total_interaction(&deep, &q()).unwrap();
        assert!(rel(b.quadratic_t_term / b.static_term.abs(), 2.0 / 9.0 * 0.2) < 1e-2);
    }

    #[test]
    fn zones_and_validity() {
        let scale = CODATA.c / w0();
        assert_eq!(lorentz_pair(0.05 * scale, 0.0, 0.0).zone(), Zone::Near);
        assert_eq!(lorentz_pair(scale, 0.0, 0.0).zone(), Zone::Intermediate);
        assert_eq!(lorentz_pair(20.0 * scale, 0.0, 0.0).zone(), Zone::Far);
        assert_eq!(static_pair(1e-9, 0.0, 0.0).zone(), Zone::Far);
        let cfg = lorentz_pair(scale, 0.0, 0.0);
        assert!(matches!(
            zone_asymptote(Term::Static, Zone::Intermediate, &cfg, &q()),
            Err(Error::InvalidZone(_))
        ));
        assert!(matches!(
            zone_asymptote(Term::Static, Zone::Near, &static_pair(1e-6, 0.0, 0.0), &q()),
            Err(Error::InvalidZone(_))
        ));
        assert!(!lorentz_pair(1e-6, 1e13, 1e-3).beyond_validity());
        assert!(lorentz_pair(1e-6, 1e14, 1.0).beyond_validity());
        assert!(total_interaction(&lorentz_pair(1e-6, 1e14, 1.0), &q()).unwrap().beyond_validity);
    }

    #[test]
    fn invalid_configs() {
        let m = hydrogen();
        assert!(PairConfig::new(0.0, Acceleration::ZERO, 0.0, m.clone(), m.clone()).is_err());
        assert!(PairConfig::new(-1e-6, Acceleration::ZERO, 0.0, m.clone(), m.clone()).is_err());
        assert!(PairConfig::new(1e-6, Acceleration::ZERO, -1.0, m.clone(), m.clone()).is_err());
        assert!(PairConfig::new(1e-6, Acceleration::new(1e300).unwrap(), 1e300, m.clone(), m).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn exchange_symmetry(log_r in -8.0f64..-3.0, ratio in 0.2f64..5.0, wratio in 0.3f64..3.0) {
            let a = PolarizabilityModel::lorentz(4.5 * 1.481_847_1e-25, w0()).unwrap();
            let b = PolarizabilityModel::lorentz(ratio * 4.5 * 1.481_847_1e-25, wratio * w0()).unwrap();
            let cfg = PairConfig::new(libm::pow(10.0, log_r), Acceleration::new(1e13).unwrap(), 1e-3, a, b).unwrap();
            let x = total_interaction(&cfg, &q()).unwrap();
            let y = total_interaction(&cfg.swapped(), &q()).unwrap();
            prop_assert!(rel(x.static_term, y.static_term) < 1e-14);
            prop_assert!(rel(x.linear_t_term, y.linear_t_term) < 1e-14);
            prop_assert!(rel(x.quadratic_t_term, y.quadratic_t_term) < 1e-14);
        }

        #[test]
        fn bilinear_and_motion_scaling(log_r in -8.0f64..-4.0, fa in 0.1f64..10.0, fb in 0.1f64..10.0, k in 0.1f64..10.0) {
            let r = libm::pow(10.0, log_r);
            let base = lorentz_pair(r, 1e13, 1e-3);
            let scaled = PairConfig::new(
                r,
                base.acceleration(),
                base.t(),
                base.alpha_a().scaled(fa).unwrap(),
                base.alpha_b().scaled(fb).unwrap(),
            )
            .unwrap();
            let s0 = static_vdw(&base, &q()).unwrap();
            prop_assert!(rel(static_vdw(&scaled, &q()).unwrap(), fa * fb * s0) < 1e-12);

            let lin = linear_correction(&base, &q()).unwrap();
            let quad = quadratic_correction(&base, &q()).unwrap();
            // a → k a: both scale as k²; t → k t: k and k²
            let faster = base.with_motion(Acceleration::new(k * 1e13).unwrap(), 1e-3).unwrap();
            prop_assert!(rel(linear_correction(&faster, &q()).unwrap(), k * k * lin) < 1e-12);
            prop_assert!(rel(quadratic_correction(&faster, &q()).unwrap(), k * k * quad) < 1e-12);
            let later = base.with_motion(Acceleration::new(1e13).unwrap(), k * 1e-3).unwrap();
            prop_assert!(rel(linear_correction(&later, &q()).unwrap(), k * lin) < 1e-12);
            prop_assert!(rel(quadratic_correction(&later, &q()).unwrap(), k * k * quad) < 1e-12);
        }
    }
}
