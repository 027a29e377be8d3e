//! Level shift of an accelerated atom near a perfectly reflecting wall.
//!
//! The boundary kernel K(ω; z₀, a) is supplied by the caller. The shift is
//!
//! ```text
//! vf = −P (e²|r_ab|²/3) Σ_b ∫ K coth(πcω/a) [1/(ω+ω_ab) − 1/(ω−ω_ab)] dω
//! rr = +P (e²|r_ab|²/3) Σ_b ∫ K [1/(ω+ω_ab) + 1/(ω−ω_ab)] dω
//! ```
//!
//! with P = 1/(8π²c³(2z₀)³). The coth weight is split as in [`crate::lamb`]:
//! the unit part goes through the cutoff policy, the Bose part decays on its own.
//! Kernels must vanish at least linearly at ω = 0, otherwise the Bose part
//! diverges logarithmically there.

use alloc::vec::Vec;
use core::cell::Cell;
use core::f64::consts::PI;
use core::fmt;

use crate::atom::{AtomModel, Transition};
use crate::constants::{Acceleration, CODATA};
use crate::error::{require, Error, Result};
use crate::lamb::{bose_integral, cutoff_integral, CutoffPolicy};
use crate::quad::QuadConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelSource {
    ClosedForm,
    Tabulated,
}

/// Isotropically contracted boundary kernel, dimensionless.
///
/// Implementations must be pure: the engine may call `evaluate` from several
/// threads and in any order.
pub trait WallKernel: Sync {
    fn evaluate(&self, omega: f64, z0: f64, a: f64) -> f64;

    /// Declared bound K_max on |K|.
    fn bound(&self) -> f64;

    fn source(&self) -> KernelSource;
}

/// Kernel given by a closure `(ω, z₀, a) -> K`.
pub struct ClosedFormKernel<F> {
    f: F,
    bound: f64,
}

impl<F> ClosedFormKernel<F>
where
    F: Fn(f64, f64, f64) -> f64 + Sync,
{
    pub fn new(f: F, bound: f64) -> Result<Self> {
        require("kernel bound", bound, bound >= 0.0, "bound must be non-negative")?;
        Ok(Self { f, bound })
    }
}

impl<F> fmt::Debug for ClosedFormKernel<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedFormKernel").field("bound", &self.bound).finish_non_exhaustive()
    }
}

impl<F> WallKernel for ClosedFormKernel<F>
where
    F: Fn(f64, f64, f64) -> f64 + Sync,
{
    fn evaluate(&self, omega: f64, z0: f64, a: f64) -> f64 {
        (self.f)(omega, z0, a)
    }

    fn bound(&self) -> f64 {
        self.bound
    }

    fn source(&self) -> KernelSource {
        KernelSource::ClosedForm
    }
}

/// Kernel sampled on an ω grid, interpolated with a monotone cubic
/// (Fritsch–Carlson slopes).
///
/// The table is taken to belong to one (z₀, a) pair and ignores both
/// arguments. The origin (0, 0) is added as a node when the grid starts above
/// zero, which keeps K = O(ω). Beyond the last node K is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedKernel {
    omega: Vec<f64>,
    value: Vec<f64>,
    slope: Vec<f64>,
    bound: f64,
}

impl TabulatedKernel {
    pub fn new(omega: Vec<f64>, value: Vec<f64>) -> Result<Self> {
        if omega.len() != value.len() {
            return Err(Error::InvalidModel(alloc::format!(
                "kernel table has {} frequencies but {} values",
                omega.len(),
                value.len()
            )));
        }
        if omega.is_empty() {
            return Err(Error::InvalidModel("kernel table is empty".into()));
        }
        for (i, (&w, &k)) in omega.iter().zip(&value).enumerate() {
            if !w.is_finite() || w < 0.0 || !k.is_finite() {
                return Err(Error::InvalidModel(alloc::format!(
                    "kernel table row {}: omega = {w:e}, K = {k:e}",
                    i + 1
                )));
            }
            if i > 0 && w <= omega[i - 1] {
                return Err(Error::InvalidModel(alloc::format!(
                    "kernel table frequencies must be strictly increasing (row {})",
                    i + 1
                )));
            }
        }
        let (mut omega, mut value) = (omega, value);
        if omega[0] == 0.0 {
            if value[0] != 0.0 {
                return Err(Error::KernelContract {
                    omega: 0.0,
                    value: value[0],
                    reason: "kernel must vanish at omega = 0",
                });
            }
        } else {
            omega.insert(0, 0.0);
            value.insert(0, 0.0);
        }
        let slope = pchip_slopes(&omega, &value);
        let bound = value.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(Self {
            omega,
            value,
            slope,
            bound,
        })
    }

    pub fn nodes(&self) -> (&[f64], &[f64]) {
        (&self.omega, &self.value)
    }

    pub fn interpolate(&self, w: f64) -> f64 {
        let n = self.omega.len();
        if !(w >= 0.0) || w > self.omega[n - 1] {
            return 0.0;
        }
        if n == 1 {
            return self.value[0];
        }
        let i = self.omega.partition_point(|&x| x <= w).clamp(1, n - 1) - 1;
        let h = self.omega[i + 1] - self.omega[i];
        let t = (w - self.omega[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.value[i] + h10 * h * self.slope[i] + h01 * self.value[i + 1] + h11 * h * self.slope[i + 1]
    }
}

impl WallKernel for TabulatedKernel {
    fn evaluate(&self, omega: f64, _z0: f64, _a: f64) -> f64 {
        self.interpolate(omega)
    }

    fn bound(&self) -> f64 {
        self.bound
    }

    fn source(&self) -> KernelSource {
        KernelSource::Tabulated
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return alloc::vec![0.0; n];
    }
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    if n == 2 {
        return alloc::vec![delta[0], delta[0]];
    }
    let mut d = alloc::vec![0.0; n];
    for k in 1..n - 1 {
        let (a, b) = (delta[k - 1], delta[k]);
        if a == 0.0 || b == 0.0 || (a > 0.0) != (b > 0.0) {
            continue;
        }
        let w1 = 2.0 * h[k] + h[k - 1];
        let w2 = h[k] + 2.0 * h[k - 1];
        d[k] = (w1 + w2) / (w1 / a + w2 / b);
    }
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

// one-sided three-point estimate, clipped to keep the end interval monotone
fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d == 0.0 || (d > 0.0) != (d0 > 0.0) {
        0.0
    } else if (d0 > 0.0) != (d1 > 0.0) && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallConfig {
    z0: f64,
    acceleration: Acceleration,
    cutoff: CutoffPolicy,
}

impl WallConfig {
    /// `z0` in cm.
    pub fn new(z0: f64, acceleration: Acceleration, cutoff: CutoffPolicy) -> Result<Self> {
        require("z0", z0, z0 > 0.0, "atom-wall distance must be positive")?;
        Ok(Self {
            z0,
            acceleration,
            cutoff,
        })
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn acceleration(&self) -> Acceleration {
        self.acceleration
    }

    pub fn cutoff(&self) -> CutoffPolicy {
        self.cutoff
    }

    pub fn with_acceleration(self, acceleration: Acceleration) -> Self {
        Self { acceleration, ..self }
    }

    pub fn with_z0(self, z0: f64) -> Result<Self> {
        Self::new(z0, self.acceleration, self.cutoff)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallShift {
    pub vf: f64,
    pub rr: f64,
    pub total: f64,
}

type Violation = Cell<Option<(f64, f64, &'static str)>>;

/// Evaluates K and records the first contract breach. A breach yields NaN so
/// the quadrature stops at once.
struct Guarded<'a> {
    kernel: &'a dyn WallKernel,
    z0: f64,
    a: f64,
    bound: f64,
    violation: Violation,
}

impl<'a> Guarded<'a> {
    fn new(kernel: &'a dyn WallKernel, wc: &WallConfig) -> Self {
        let bound = kernel.bound();
        Self {
            kernel,
            z0: wc.z0,
            a: wc.acceleration.cm_per_s2(),
            // slack for rounding in interpolants that touch the bound
            bound: bound * (1.0 + 1e-12),
            violation: Cell::new(None),
        }
    }

    fn eval(&self, w: f64) -> f64 {
        let k = self.kernel.evaluate(w, self.z0, self.a);
        let reason = if !k.is_finite() {
            "kernel value is not finite"
        } else if k.abs() > self.bound {
            "kernel exceeds its declared bound"
        } else {
            return k;
        };
        if self.violation.get().is_none() {
            self.violation.set(Some((w, k, reason)));
        }
        f64::NAN
    }

    /// Kernel breaches take precedence over the quadrature error they caused.
    fn check<T>(&self, r: Result<T>) -> Result<T> {
        match self.violation.get() {
            Some((omega, value, reason)) => Err(Error::KernelContract {
                omega,
                value,
                reason,
            }),
            None => r,
        }
    }

    /// K(ω) = O(ω) at the origin: a tenfold step toward zero must shrink |K|
    /// by well over half.
    fn check_origin(&self, scale: f64) -> Result<()> {
        let outer = 1e-6 * scale;
        let inner = 1e-7 * scale;
        let k_outer = self.eval(outer);
        let k_inner = self.eval(inner);
        self.check(Ok(()))?;
        if k_inner.abs() > 0.5 * k_outer.abs() && k_inner != 0.0 {
            return Err(Error::KernelContract {
                omega: inner,
                value: k_inner,
                reason: "kernel must vanish linearly as omega -> 0",
            });
        }
        Ok(())
    }
}

fn prefactor(t: &Transition, z0: f64) -> f64 {
    let k = CODATA;
    let d = 2.0 * z0;
    k.e_charge * k.e_charge * t.dipole_sq() / 3.0 / (8.0 * PI * PI * k.c * k.c * k.c * d * d * d)
}

fn check_inputs(atom: &AtomModel, wc: &WallConfig, cfg: &QuadConfig) -> Result<()> {
    cfg.validate()?;
    wc.cutoff.validate_for(atom)
}

/// Vacuum-fluctuation part of the atom-wall shift, erg.
pub fn vf_shift_wall(atom: &AtomModel, kernel: &dyn WallKernel, wc: &WallConfig, cfg: &QuadConfig) -> Result<f64> {
    check_inputs(atom, wc, cfg)?;
    let g = Guarded::new(kernel, wc);
    let accelerated = !wc.acceleration.is_zero();
    if accelerated {
        g.check_origin(atom.min_abs_frequency())?;
    }
    let beta = wc.acceleration.cm_per_s2() / (2.0 * PI * CODATA.c);
    let mut total = 0.0;
    for t in atom.transitions().iter().filter(|t| t.dipole_sq() > 0.0) {
        let s = t.omega_ab();
        let resolvent = |w: f64| 1.0 / (w + s) - 1.0 / (w - s);
        let unit = g.check(cutoff_integral(
            |w| g.eval(w) * resolvent(w),
            s.abs(),
            &wc.cutoff,
            cfg,
            "atom-wall vacuum-fluctuation shift",
        ))?;
        let thermal = if accelerated {
            g.check(bose_integral(
                |w| g.eval(w) * resolvent(w),
                s.abs(),
                beta,
                cfg,
                "atom-wall thermal shift",
            ))?
        } else {
            0.0
        };
        total -= prefactor(t, wc.z0) * (unit + thermal);
    }
    Ok(total)
}

/// Radiation-reaction part of the atom-wall shift, erg. The acceleration only
/// reaches it through the kernel.
pub fn rr_shift_wall(atom: &AtomModel, kernel: &dyn WallKernel, wc: &WallConfig, cfg: &QuadConfig) -> Result<f64> {
    check_inputs(atom, wc, cfg)?;
    let g = Guarded::new(kernel, wc);
    let mut total = 0.0;
    for t in atom.transitions().iter().filter(|t| t.dipole_sq() > 0.0) {
        let s = t.omega_ab();
        let integral = g.check(cutoff_integral(
            |w| g.eval(w) * (1.0 / (w + s) + 1.0 / (w - s)),
            s.abs(),
            &wc.cutoff,
            cfg,
            "atom-wall radiation-reaction shift",
        ))?;
        total += prefactor(t, wc.z0) * integral;
    }
    Ok(total)
}

pub fn total_wall_shift(
    atom: &AtomModel,
    kernel: &dyn WallKernel,
    wc: &WallConfig,
    cfg: &QuadConfig,
) -> Result<WallShift> {
    let vf = vf_shift_wall(atom, kernel, wc, cfg)?;
    let rr = rr_shift_wall(atom, kernel, wc, cfg)?;
    Ok(WallShift { vf, rr, total: vf + rr })
}
