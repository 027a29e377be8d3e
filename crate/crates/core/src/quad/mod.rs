//! Adaptive quadrature for the integral classes that appear in the shift and
//! interaction formulas: exponentially damped integrals on [0, ∞), integrals
//! with power-law tails, and Cauchy principal values with a simple pole on
//! the positive axis.
//!
//! Every routine runs a global adaptive 21-point Gauss-Kronrod scheme over an
//! initial set of geometrically graded panels, so features at very different
//! scales (a resonance at 10¹⁶ rad/s next to a cutoff at 10²⁰ rad/s, or a
//! polarizability that falls off at uR ~ 10⁻³) are all seen by the first pass.

mod gauss_kronrod;
mod special;

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use gauss_kronrod::{gk21, EVALUATIONS};
pub use special::{bose_occupation, coth_stable};
pub(crate) use special::bose;

/// Number of halvings used when grading panels toward an endpoint.
const GRADING_DEPTH: i32 = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evaluations: usize,
    /// A damped tail is dropped once the integrand falls below this fraction
    /// of its sampled peak.
    pub tail_truncation_threshold: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-300,
            max_evaluations: 1_000_000,
            tail_truncation_threshold: 1e-16,
        }
    }
}

impl QuadConfig {
    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        Self { rel_tol, ..self }
    }

    pub fn with_max_evaluations(self, max_evaluations: usize) -> Self {
        Self {
            max_evaluations,
            ..self
        }
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(QuadError::InvalidConfig("rel_tol must lie in (0, 1)"));
        }
        if !(self.abs_tol >= 0.0 && self.abs_tol.is_finite()) {
            return Err(QuadError::InvalidConfig("abs_tol must be finite and non-negative"));
        }
        if self.max_evaluations < 100 {
            return Err(QuadError::InvalidConfig("max_evaluations must be at least 100"));
        }
        if !(self.tail_truncation_threshold > 0.0 && self.tail_truncation_threshold < 1.0) {
            return Err(QuadError::InvalidConfig(
                "tail_truncation_threshold must lie in (0, 1)",
            ));
        }
        Ok(())
    }

    fn tolerance(&self, value: f64) -> f64 {
        let rel = self.rel_tol * value.abs();
        if rel > self.abs_tol {
            rel
        } else {
            self.abs_tol
        }
    }
}

/// Outcome of one quadrature call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    /// Set only when `abs_error_estimate` met the requested tolerance.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadError {
    /// The integrand returned NaN or ±∞ at `x`.
    NonFinite { x: f64, value: f64 },
    InvalidArgument { name: &'static str, value: f64 },
    InvalidConfig(&'static str),
    /// The residue extrapolation at the pole did not produce a finite number.
    ResidueNotFinite { pole: f64, residue: f64 },
    /// The pole coincides with the end of a finite integration range.
    PoleOnBoundary { pole: f64 },
}

impl fmt::Display for QuadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadError::NonFinite { x, value } => {
                write!(f, "integrand is not finite at x = {x:e} (value {value})")
            }
            QuadError::InvalidArgument { name, value } => write!(f, "invalid {name}: {value:e}"),
            QuadError::InvalidConfig(msg) => write!(f, "invalid quadrature config: {msg}"),
            QuadError::ResidueNotFinite { pole, residue } => {
                write!(f, "residue at pole {pole:e} is not finite ({residue})")
            }
            QuadError::PoleOnBoundary { pole } => {
                write!(f, "pole {pole:e} lies on the end of the integration range")
            }
        }
    }
}

impl core::error::Error for QuadError {}

/// Upper end of a [0, ...) integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// [0, upper].
    Finite { upper: f64 },
    /// [0, ∞) with |f(x)| eventually bounded by C·exp(−x / decay_scale).
    Decaying { decay_scale: f64 },
}

/// ∫ₐᵇ f(x) dx.
pub fn integrate_finite<F>(f: F, lower: f64, upper: f64, cfg: &QuadConfig) -> Result<IntegralResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    check_finite("lower limit", lower)?;
    check_finite("upper limit", upper)?;
    if lower == upper {
        return Ok(IntegralResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        });
    }
    let (lo, hi, sign) = if lower < upper {
        (lower, upper, 1.0)
    } else {
        (upper, lower, -1.0)
    };
    let mut panels = Vec::new();
    graded_panels(lo, hi, 0, &mut panels);
    let pieces: [&dyn Fn(f64) -> f64; 1] = [&f];
    let mut res = adaptive(&pieces, &panels, cfg, 0, 0.0)?;
    res.value *= sign;
    Ok(res)
}

/// ∫₀^∞ f(x) dx for an integrand damped on the scale `decay_scale`.
pub fn integrate_decaying<F>(f: F, decay_scale: f64, cfg: &QuadConfig) -> Result<IntegralResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    check_positive("decay scale", decay_scale)?;
    let mut evaluations = 0;
    let tail = truncate_tail(&f, decay_scale, cfg.tail_truncation_threshold, &mut evaluations)?;
    let mut panels = Vec::new();
    graded_panels(0.0, tail.upper, 0, &mut panels);
    let pieces: [&dyn Fn(f64) -> f64; 1] = [&f];
    adaptive(&pieces, &panels, cfg, evaluations, tail.error)
}

/// ∫₀^∞ f(x) dx for an integrand with a power-law tail, through the map
/// x = scale·t/(1 − t) onto t ∈ [0, 1).
pub fn integrate_algebraic<F>(f: F, scale: f64, cfg: &QuadConfig) -> Result<IntegralResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    check_positive("scale", scale)?;
    let mapped = |t: f64| {
        let s = 1.0 - t;
        let y = f(scale * t / s);
        // the map sends the last nodes to huge x where decaying integrands underflow
        if y == 0.0 {
            0.0
        } else {
            y * scale / (s * s)
        }
    };
    let mut panels = Vec::new();
    graded_panels(0.0, 0.5, 0, &mut panels);
    let mut upper = Vec::new();
    graded_panels(0.0, 0.5, 0, &mut upper);
    // mirror the grading toward t = 1
    panels.extend(upper.iter().map(|&(a, b, p)| (1.0 - b, 1.0 - a, p)));
    let pieces: [&dyn Fn(f64) -> f64; 1] = [&mapped];
    adaptive(&pieces, &panels, cfg, 0, 0.0)
}

/// Cauchy principal value of ∫ f(x) dx over `domain` for an integrand with at
/// most a simple pole at `pole` > 0.
///
/// The residue r = lim (x − pole)·f(x) is estimated by Richardson
/// extrapolation; r/(x − pole) is then subtracted on the symmetric window
/// [pole − h, pole + h], where its principal value vanishes, and the window
/// integral is folded onto [0, h]. Outside the window f is integrated as is.
pub fn integrate_principal_value<F>(
    f: F,
    pole: f64,
    domain: Domain,
    cfg: &QuadConfig,
) -> Result<IntegralResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    check_positive("pole", pole)?;
    let mut evaluations = 0;
    let (upper, tail_error) = match domain {
        Domain::Finite { upper } => {
            check_positive("upper limit", upper)?;
            if pole == upper {
                return Err(QuadError::PoleOnBoundary { pole });
            }
            (upper, 0.0)
        }
        Domain::Decaying { decay_scale } => {
            check_positive("decay scale", decay_scale)?;
            let tail = truncate_tail(&f, decay_scale, cfg.tail_truncation_threshold, &mut evaluations)?;
            // a truncation point landing exactly on the pole would leave no room for the window
            let upper = if tail.upper == pole { 1.25 * tail.upper } else { tail.upper };
            (upper, tail.error)
        }
    };

    let plain: &dyn Fn(f64) -> f64 = &f;
    if pole > upper {
        let mut panels = Vec::new();
        graded_panels(0.0, upper, 0, &mut panels);
        return adaptive(&[plain], &panels, cfg, evaluations, tail_error);
    }
    let half_width = if upper - pole < pole { upper - pole } else { pole };
    let residue = residue(&f, pole, half_width, &mut evaluations)?;
    let folded = |s: f64| {
        // use the offsets actually representable around the pole
        let above = pole + s;
        let below = pole - s;
        let (d_above, d_below) = (above - pole, pole - below);
        if d_above == 0.0 || d_below == 0.0 {
            return 0.0;
        }
        (f(above) - residue / d_above) + (f(below) + residue / d_below)
    };
    let pieces: [&dyn Fn(f64) -> f64; 2] = [plain, &folded];

    let mut panels = Vec::new();
    // grade toward the pole only down to offsets that still resolve it
    let depth = libm::log2(half_width / (1e-9 * pole)).clamp(1.0, GRADING_DEPTH as f64) as i32;
    graded_panels_depth(0.0, half_width, 1, depth, &mut panels);
    if pole - half_width > 0.0 {
        graded_panels(0.0, pole - half_width, 0, &mut panels);
    }
    if pole + half_width < upper {
        graded_panels(pole + half_width, upper, 0, &mut panels);
    }
    adaptive(&pieces, &panels, cfg, evaluations, tail_error)
}

fn check_finite(name: &'static str, value: f64) -> Result<f64, QuadError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(QuadError::InvalidArgument { name, value })
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<f64, QuadError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(QuadError::InvalidArgument { name, value })
    }
}

fn eval<F: Fn(f64) -> f64 + ?Sized>(f: &F, x: f64, evaluations: &mut usize) -> Result<f64, QuadError> {
    *evaluations += 1;
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(QuadError::NonFinite { x, value: y })
    }
}

/// Richardson-extrapolated lim_{δ→0} δ·[f(p + δ) − f(p − δ)] / 2.
fn residue<F: Fn(f64) -> f64>(f: &F, pole: f64, half_width: f64, evaluations: &mut usize) -> Result<f64, QuadError> {
    const LEVELS: usize = 6;
    let mut table = [[0.0f64; LEVELS]; LEVELS];
    let mut delta = half_width / 8.0;
    for i in 0..LEVELS {
        let up = eval(f, pole + delta, evaluations)?;
        let down = eval(f, pole - delta, evaluations)?;
        table[i][0] = 0.5 * delta * (up - down);
        let mut factor = 1.0;
        for j in 1..=i {
            // error series in δ², halving δ divides each order by 4
            factor *= 4.0;
            table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
        }
        delta *= 0.5;
    }
    let r = table[LEVELS - 1][LEVELS - 1];
    if r.is_finite() {
        Ok(r)
    } else {
        Err(QuadError::ResidueNotFinite { pole, residue: r })
    }
}

struct Tail {
    upper: f64,
    error: f64,
}

/// Picks the truncation point of a damped integrand: start at
/// decay_scale·ln(1/threshold) and push outward until |f| has dropped below
/// threshold × (sampled peak). The remainder is bounded by |f(upper)|·decay_scale.
fn truncate_tail<F: Fn(f64) -> f64>(
    f: &F,
    decay_scale: f64,
    threshold: f64,
    evaluations: &mut usize,
) -> Result<Tail, QuadError> {
    let span = decay_scale * libm::log(1.0 / threshold);
    let mut peak = 0.0f64;
    let mut x = span;
    for _ in 0..48 {
        peak = peak.max(eval(f, x, evaluations)?.abs());
        x *= 0.5;
    }
    let mut upper = span;
    let mut at_upper = eval(f, upper, evaluations)?.abs();
    for _ in 0..60 {
        if at_upper <= threshold * peak {
            break;
        }
        peak = peak.max(at_upper);
        upper *= 1.25;
        at_upper = eval(f, upper, evaluations)?.abs();
    }
    Ok(Tail {
        upper,
        error: at_upper * decay_scale,
    })
}

/// Splits [lo, hi] into panels graded geometrically toward `lo`.
fn graded_panels(lo: f64, hi: f64, piece: usize, out: &mut Vec<(f64, f64, usize)>) {
    graded_panels_depth(lo, hi, piece, GRADING_DEPTH, out)
}

fn graded_panels_depth(lo: f64, hi: f64, piece: usize, depth: i32, out: &mut Vec<(f64, f64, usize)>) {
    if !(hi > lo) {
        return;
    }
    if lo == 0.0 {
        let mut b = hi;
        for _ in 0..depth {
            let a = 0.5 * b;
            out.push((a, b, piece));
            b = a;
        }
        out.push((0.0, b, piece));
        return;
    }
    let ratio = hi / lo;
    let n = if lo > 0.0 && ratio > 2.0 {
        let k = libm::ceil(libm::log2(ratio)) as usize;
        k.min(64)
    } else {
        1
    };
    let mut a = lo;
    for i in 1..=n {
        let b = if i == n {
            hi
        } else {
            lo * libm::pow(ratio, i as f64 / n as f64)
        };
        out.push((a, b, piece));
        a = b;
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    piece: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.piece.cmp(&self.piece))
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Global adaptive bisection: always refine the panel with the largest error
/// estimate until the summed estimate (plus `extra_error`) meets tolerance.
fn adaptive(
    pieces: &[&dyn Fn(f64) -> f64],
    initial: &[(f64, f64, usize)],
    cfg: &QuadConfig,
    mut evaluations: usize,
    extra_error: f64,
) -> Result<IntegralResult, QuadError> {
    let mut heap = BinaryHeap::with_capacity(initial.len() * 4);
    let mut frozen = Vec::new();
    let mut total = 0.0;
    let mut error = 0.0;

    for &(a, b, piece) in initial {
        if !(b > a) {
            continue;
        }
        let est = gk21(pieces[piece], a, b)?;
        evaluations += EVALUATIONS;
        total += est.value;
        error += est.error;
        heap.push(Panel {
            a,
            b,
            value: est.value,
            error: est.error,
            piece,
        });
    }

    while error + extra_error > cfg.tolerance(total) {
        if evaluations + 2 * EVALUATIONS > cfg.max_evaluations {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        let width = worst.b - worst.a;
        let scale = worst.a.abs().max(worst.b.abs());
        if !(worst.a < mid && mid < worst.b) || width <= 1e3 * f64::EPSILON * scale {
            frozen.push(worst);
            continue;
        }
        let f = pieces[worst.piece];
        let left = gk21(f, worst.a, mid)?;
        let right = gk21(f, mid, worst.b)?;
        evaluations += 2 * EVALUATIONS;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: left.value,
            error: left.error,
            piece: worst.piece,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: right.value,
            error: right.error,
            piece: worst.piece,
        });
    }

    // resum in a fixed order so the result does not carry running-sum drift
    let mut panels = heap.into_vec();
    panels.extend(frozen);
    panels.sort_unstable_by(|p, q| p.piece.cmp(&q.piece).then(p.a.total_cmp(&q.a)));
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let abs_error_estimate = panels.iter().map(|p| p.error).sum::<f64>() + extra_error;
    Ok(IntegralResult {
        value,
        abs_error_estimate,
        evaluations,
        converged: abs_error_estimate <= cfg.tolerance(value),
    })
}

#[cfg(test)]
mod tests;
