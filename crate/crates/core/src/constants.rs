//! Physical constants (Gaussian/CGS), acceleration units, and the Unruh
//! temperature map T = ħa / (2π c k_B).

use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use alloc::string::ToString;

use crate::error::{require, Error, Result};

/// Fundamental constants in Gaussian/CGS units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, erg·s.
    pub hbar: f64,
    /// Speed of light, cm/s.
    pub c: f64,
    /// Boltzmann constant, erg/K.
    pub k_boltzmann: f64,
    /// Elementary charge, statcoulomb (esu).
    pub e_charge: f64,
    /// Bohr radius, cm.
    pub bohr_radius: f64,
}

/// CODATA 2018 recommended values.
pub const CODATA: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-27,
    c: 2.997_924_58e10,
    k_boltzmann: 1.380_649e-16,
    // 1.602176634e-19 C times 10 c[SI]
    e_charge: 4.803_204_712_570_263e-10,
    bohr_radius: 5.291_772_109_03e-9,
};

/// Identifier of the compiled-in constant set, reported by the CLI.
pub const CONSTANT_SET_ID: &str = "CODATA-2018-CGS";

impl PhysicalConstants {
    pub const fn codata() -> Self {
        CODATA
    }

    /// Builds a custom constant set. Only for tests that need to perturb a
    /// constant; production code always runs on [`CODATA`].
    #[cfg(any(test, feature = "test-hooks"))]
    pub fn overridden(
        hbar: f64,
        c: f64,
        k_boltzmann: f64,
        e_charge: f64,
        bohr_radius: f64,
    ) -> Result<Self> {
        const POSITIVE: &str = "constants must be finite and positive";
        Ok(Self {
            hbar: require("hbar", hbar, hbar > 0.0, POSITIVE)?,
            c: require("c", c, c > 0.0, POSITIVE)?,
            k_boltzmann: require("k_boltzmann", k_boltzmann, k_boltzmann > 0.0, POSITIVE)?,
            e_charge: require("e_charge", e_charge, e_charge > 0.0, POSITIVE)?,
            bohr_radius: require("bohr_radius", bohr_radius, bohr_radius > 0.0, POSITIVE)?,
        })
    }

    /// Hartree energy e²/a₀, erg.
    pub fn hartree(&self) -> f64 {
        self.e_charge * self.e_charge / self.bohr_radius
    }

    /// Kelvin per (cm/s²): ħ / (2π c k_B).
    fn unruh_factor(&self) -> f64 {
        self.hbar / (2.0 * PI * self.c * self.k_boltzmann)
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        CODATA
    }
}

/// Proper acceleration in cm/s², never negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Acceleration(f64);

impl Acceleration {
    pub const ZERO: Acceleration = Acceleration(0.0);

    pub fn new(cm_per_s2: f64) -> Result<Self> {
        require(
            "acceleration",
            cm_per_s2,
            cm_per_s2 >= 0.0,
            "acceleration must be finite and non-negative",
        )
        .map(Acceleration)
    }

    /// Builds an acceleration from a value expressed in `unit`.
    pub fn from_unit(value: f64, unit: AccelerationUnit) -> Result<Self> {
        Self::new(convert_acceleration(
            value,
            unit,
            AccelerationUnit::CentimetrePerSecondSquared,
        ))
    }

    pub fn cm_per_s2(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }
}

impl fmt::Display for Acceleration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} cm/s^2", self.0)
    }
}

/// Acceleration units accepted at the boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AccelerationUnit {
    CentimetrePerSecondSquared,
    MetrePerSecondSquared,
    /// Standard gravity, 9.80665 m/s².
    StandardGravity,
}

impl AccelerationUnit {
    /// Size of one unit in cm/s².
    pub const fn in_cm_per_s2(self) -> f64 {
        match self {
            AccelerationUnit::CentimetrePerSecondSquared => 1.0,
            AccelerationUnit::MetrePerSecondSquared => 100.0,
            AccelerationUnit::StandardGravity => 980.665,
        }
    }

    pub const fn tag(self) -> &'static str {
        match self {
            AccelerationUnit::CentimetrePerSecondSquared => "cm/s^2",
            AccelerationUnit::MetrePerSecondSquared => "m/s^2",
            AccelerationUnit::StandardGravity => "g0",
        }
    }
}

impl FromStr for AccelerationUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "cm/s^2" | "cm/s2" | "cm s^-2" => Ok(AccelerationUnit::CentimetrePerSecondSquared),
            "m/s^2" | "m/s2" | "m s^-2" => Ok(AccelerationUnit::MetrePerSecondSquared),
            "g0" | "g_0" | "g_n" => Ok(AccelerationUnit::StandardGravity),
            other => Err(Error::UnknownUnit(other.to_string())),
        }
    }
}

impl fmt::Display for AccelerationUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Converts `value` from one acceleration unit to another.
pub fn convert_acceleration(value: f64, from: AccelerationUnit, to: AccelerationUnit) -> f64 {
    if from == to {
        return value;
    }
    value * from.in_cm_per_s2() / to.in_cm_per_s2()
}

/// Unruh temperature in kelvin for the CODATA constant set.
pub fn unruh_temperature(a: Acceleration) -> f64 {
    unruh_temperature_with(&CODATA, a)
}

pub fn unruh_temperature_with(consts: &PhysicalConstants, a: Acceleration) -> f64 {
    a.cm_per_s2() * consts.unruh_factor()
}

/// Proper acceleration whose Unruh temperature is `kelvin`.
pub fn unruh_acceleration(kelvin: f64) -> Result<Acceleration> {
    unruh_acceleration_with(&CODATA, kelvin)
}

pub fn unruh_acceleration_with(consts: &PhysicalConstants, kelvin: f64) -> Result<Acceleration> {
    let t = require(
        "temperature",
        kelvin,
        kelvin >= 0.0,
        "temperature must be finite and non-negative",
    )?;
    Acceleration::new(t / consts.unruh_factor())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codata_values() {
        let k = PhysicalConstants::codata();
        for (got, want) in [
            (k.hbar, 1.054572e-27),
            (k.c, 2.997925e10),
            (k.k_boltzmann, 1.380649e-16),
            (k.e_charge, 4.803205e-10),
            (k.bohr_radius, 5.291772e-9),
        ] {
            assert!(got > 0.0);
            assert!(((got - want) / want).abs() < 5e-7, "{got} vs {want}");
        }
        // e²/a₀ is the Hartree energy, 4.3597447222071e-11 erg
        assert!((k.hartree() / 4.359_744_722_207_1e-11 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn independent_constant_sets_are_bit_identical() {
        let a = PhysicalConstants::codata();
        let b = PhysicalConstants::default();
        assert_eq!(a.hbar.to_bits(), b.hbar.to_bits());
        assert_eq!(a.c.to_bits(), b.c.to_bits());
        assert_eq!(a.k_boltzmann.to_bits(), b.k_boltzmann.to_bits());
        assert_eq!(a.e_charge.to_bits(), b.e_charge.to_bits());
        assert_eq!(a.bohr_radius.to_bits(), b.bohr_radius.to_bits());
    }

    #[test]
    fn override_hook_validates() {
        assert!(PhysicalConstants::overridden(1.0, 1.0, 1.0, 1.0, 1.0).is_ok());
        assert!(PhysicalConstants::overridden(1.0, -1.0, 1.0, 1.0, 1.0).is_err());
        let k = PhysicalConstants::overridden(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let t = unruh_temperature_with(&k, Acceleration::new(2.0 * PI).unwrap());
        assert!((t - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unruh_temperature_examples() {
        assert_eq!(unruh_temperature(Acceleration::ZERO), 0.0);
        let t = unruh_temperature(Acceleration::new(2.47e22).unwrap());
        assert!((t - 1.0).abs() < 5e-3, "T = {t}");
        let x = Acceleration::new(3.7e21).unwrap();
        let x2 = Acceleration::new(7.4e21).unwrap();
        assert_eq!(unruh_temperature(x2), 2.0 * unruh_temperature(x));
    }

    #[test]
    fn unruh_acceleration_examples() {
        assert_eq!(unruh_acceleration(0.0).unwrap(), Acceleration::ZERO);
        // 2π c k_B / ħ with CODATA 2018
        let a = unruh_acceleration(1.0).unwrap().cm_per_s2();
        let oracle = 2.0 * PI * 2.997_924_58e10 * 1.380_649e-16 / 1.054_571_817e-27;
        assert!((a / oracle - 1.0).abs() < 1e-15);
        assert!((a / 2.466e22 - 1.0).abs() < 1e-3);
        for t in [1e-3, 1.0, 1e3] {
            let back = unruh_temperature(unruh_acceleration(t).unwrap());
            assert!(((back - t) / t).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_inputs_rejected() {
        assert!(Acceleration::new(-1.0).is_err());
        assert!(Acceleration::new(f64::NAN).is_err());
        assert!(unruh_acceleration(-1e-3).is_err());
    }

    #[test]
    fn unit_conversion() {
        use AccelerationUnit::*;
        assert_eq!(convert_acceleration(1.0, MetrePerSecondSquared, CentimetrePerSecondSquared), 100.0);
        assert_eq!(convert_acceleration(1.0, StandardGravity, CentimetrePerSecondSquared), 980.665);
        let units = [CentimetrePerSecondSquared, MetrePerSecondSquared, StandardGravity];
        for from in units {
            for to in units {
                let v = 123.456e7;
                let back = convert_acceleration(convert_acceleration(v, from, to), to, from);
                assert!(((back - v) / v).abs() <= 2.0 * f64::EPSILON);
            }
        }
        assert_eq!("m/s^2".parse::<AccelerationUnit>().unwrap(), MetrePerSecondSquared);
        assert_eq!("g0".parse::<AccelerationUnit>().unwrap(), StandardGravity);
        assert!(matches!("furlong/fortnight^2".parse::<AccelerationUnit>(), Err(Error::UnknownUnit(_))));
        let a = Acceleration::from_unit(2.0, StandardGravity).unwrap();
        assert_eq!(a.cm_per_s2(), 1961.33);
    }
}
