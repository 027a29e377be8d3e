use super::QuadError;

const SERIES_LIMIT: f64 = 1e-2;
const ASYMPTOTIC_LIMIT: f64 = 20.0;

/// coth(x) for x > 0 with relative error below 1e-13 on [1e-12, 700].
pub fn coth_stable(x: f64) -> Result<f64, QuadError> {
    if !(x > 0.0) || x.is_nan() {
        return Err(QuadError::InvalidArgument {
            name: "coth argument",
            value: x,
        });
    }
    Ok(coth(x))
}

/// Bose-Einstein occupation 1/(eˣ − 1) for x > 0.
pub fn bose_occupation(x: f64) -> Result<f64, QuadError> {
    if !(x > 0.0) || x.is_nan() {
        return Err(QuadError::InvalidArgument {
            name: "Bose occupation argument",
            value: x,
        });
    }
    Ok(bose(x))
}

#[inline]
pub(crate) fn coth(x: f64) -> f64 {
    if x < SERIES_LIMIT {
        coth_series(x)
    } else if x < ASYMPTOTIC_LIMIT {
        1.0 / libm::tanh(x)
    } else {
        coth_asymptotic(x)
    }
}

// 1/x + x/3 − x³/45 + 2x⁵/945
#[inline]
fn coth_series(x: f64) -> f64 {
    let x2 = x * x;
    1.0 / x + x * (1.0 / 3.0 + x2 * (-1.0 / 45.0 + x2 * (2.0 / 945.0)))
}

#[inline]
fn coth_asymptotic(x: f64) -> f64 {
    1.0 + 2.0 * libm::exp(-2.0 * x)
}

#[inline]
pub(crate) fn bose(x: f64) -> f64 {
    1.0 / libm::expm1(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn coth_examples() {
        // Laurent series oracle at 1e-8: 1e8 + 3.333e-9
        assert!(rel(coth_stable(1e-8).unwrap(), 1e8 + 1e-8 / 3.0) < 1e-12);
        assert_eq!(coth_stable(50.0).unwrap(), 1.0);
        let e2 = libm::exp(2.0);
        assert!(rel(coth_stable(1.0).unwrap(), (e2 + 1.0) / (e2 - 1.0)) < 1e-14);
        // mpmath: coth(1) = 1.313035285499331303636161
        assert!(rel(coth_stable(1.0).unwrap(), 1.313_035_285_499_331_3) < 1e-15);
    }

    #[test]
    fn coth_branches_agree_at_joins() {
        for x in [SERIES_LIMIT * 0.999, SERIES_LIMIT * 1.001] {
            assert!(rel(coth_series(x), 1.0 / libm::tanh(x)) < 1e-14);
        }
        for x in [ASYMPTOTIC_LIMIT * 0.999, ASYMPTOTIC_LIMIT * 1.001] {
            assert!(rel(coth_asymptotic(x), 1.0 / libm::tanh(x)) < 1e-15);
        }
    }

    #[test]
    fn coth_matches_exponential_form_over_range() {
        // (1 + e^{-2x}) / (1 - e^{-2x}) written with expm1 for an independent route
        let mut x = 1e-12;
        while x < 700.0 {
            let m = libm::expm1(-2.0 * x);
            let reference = -(2.0 + m) / m;
            assert!(rel(coth(x), reference) < 1e-13, "x = {x}");
            x *= 1.37;
        }
    }

    #[test]
    fn bose_examples() {
        // series 1/x − 1/2 + x/12
        assert!(rel(bose_occupation(1e-10).unwrap(), 1e10 - 0.5) < 1e-10);
        let e = libm::exp(-100.0);
        assert!(rel(bose_occupation(100.0).unwrap(), e * (1.0 + e)) < 1e-14);
    }

    #[test]
    fn coth_bose_identity() {
        for x in [0.1, 1.0, 10.0] {
            let lhs = coth_stable(x / 2.0).unwrap();
            let rhs = 1.0 + 2.0 * bose_occupation(x).unwrap();
            assert!(rel(lhs, rhs) < 1e-12);
        }
    }

    #[test]
    fn nonpositive_arguments_rejected() {
        for bad in [0.0, -1.0, f64::NAN] {
            assert!(coth_stable(bad).is_err());
            assert!(bose_occupation(bad).is_err());
        }
    }
}
