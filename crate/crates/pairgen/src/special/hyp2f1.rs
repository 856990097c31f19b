//! Gauss hypergeometric 2F1 for complex parameters on the unit disk.
//!
//! The direct power series is used away from z = 1; close to z = 1 the
//! evaluation routes through the z -> 1-z connection formula
//! (Abramowitz & Stegun 15.3.6), whose Gamma-function weights are formed in
//! log space. The connection route is also what keeps the evaluation
//! numerically sane for the Sauter-pulse parameter sets: with |Im a|, |Im b|
//! ~ 20-60 the direct series grows by several orders before it converges,
//! while the transformed series in 1-z stays tame.

use num_complex::Complex64;

use super::gamma::log_gamma_complex;
use crate::error::{Error, Result};

/// Relative magnitude at which the series terminates (two consecutive terms).
pub const SERIES_TOL: f64 = 1e-16;
/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 100_000;

const INTEGER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct Hyp2F1Params {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl Hyp2F1Params {
    pub fn new(a: Complex64, b: Complex64, c: Complex64) -> Result<Self> {
        if near_nonpositive_integer(c) {
            return Err(Error::Domain(format!(
                "c = {c} is a non-positive integer (pole of the 2F1 series)"
            )));
        }
        Ok(Self { a, b, c })
    }

    /// Parameters of d/dz 2F1(a,b,c;z) = (ab/c) 2F1(a+1,b+1,c+1;z).
    pub fn shifted_up(&self) -> Result<Self> {
        Self::new(self.a + 1.0, self.b + 1.0, self.c + 1.0)
    }
}

fn near_nonpositive_integer(z: Complex64) -> bool {
    z.im.abs() < INTEGER_TOL && z.re < 0.5 && (z.re - z.re.round()).abs() < INTEGER_TOL
}

fn near_integer(z: Complex64) -> bool {
    z.im.abs() < INTEGER_TOL && (z.re - z.re.round()).abs() < INTEGER_TOL
}

/// 2F1(a,b,c;z).
pub fn hyp2f1(params: &Hyp2F1Params, z: Complex64) -> Result<Complex64> {
    hyp2f1_with_complement(params, z, Complex64::new(1.0, 0.0) - z)
}

/// Same as [`hyp2f1`] but with 1-z supplied by the caller. Callers working
/// at z -> 1 must pass the complement directly: recomputing it from a stored
/// z loses all precision once 1-z drops below ~1e-9.
pub fn hyp2f1_with_complement(
    params: &Hyp2F1Params,
    z: Complex64,
    one_minus_z: Complex64,
) -> Result<Complex64> {
    if z.norm_sqr() == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let rz = z.norm();
    let rmz = one_minus_z.norm();
    if rz <= 0.5 {
        return hyp2f1_series(params, z);
    }
    if rmz <= 0.6 {
        return match hyp2f1_connection(params, z, one_minus_z) {
            Err(Error::DegenerateParameters(_)) if rz < 1.0 => hyp2f1_series(params, z),
            other => other,
        };
    }
    if rz < 1.0 {
        return hyp2f1_series(params, z);
    }
    Err(Error::Domain(format!(
        "2F1 argument z = {z} outside the supported region (|z| < 1 or |1-z| <= 0.6)"
    )))
}

/// Direct power series; converges for |z| < 1.
pub fn hyp2f1_series(params: &Hyp2F1Params, z: Complex64) -> Result<Complex64> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut below = 0usize;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let cn = params.c + nf;
        if cn.norm_sqr() < 1e-24 {
            return Err(Error::Domain(format!(
                "2F1 series pole: c + {n} vanishes for c = {}",
                params.c
            )));
        }
        term = term * (params.a + nf) * (params.b + nf) / (cn * (nf + 1.0)) * z;
        sum += term;
        if term.norm() <= SERIES_TOL * sum.norm() {
            below += 1;
            if below >= 2 {
                return Ok(sum);
            }
        } else {
            below = 0;
        }
    }
    Err(Error::NonConvergence {
        terms: MAX_TERMS,
        ratio: term.norm() / sum.norm().max(f64::MIN_POSITIVE),
    })
}

/// The z -> 1-z connection formula. Requires c-a-b away from the integers
/// (the logarithmic limit case is deliberately not implemented; callers
/// perturb their parameters instead).
pub fn hyp2f1_connection(
    params: &Hyp2F1Params,
    _z: Complex64,
    one_minus_z: Complex64,
) -> Result<Complex64> {
    let (a, b, c) = (params.a, params.b, params.c);
    let cab = c - a - b;
    if near_integer(cab) {
        return Err(Error::DegenerateParameters(format!("{cab}")));
    }
    let lg_c = log_gamma_complex(c)?;
    let coef1 = (lg_c + log_gamma_complex(cab)?
        - log_gamma_complex(c - a)?
        - log_gamma_complex(c - b)?)
    .exp();
    let coef2 = (lg_c + log_gamma_complex(-cab)?
        - log_gamma_complex(a)?
        - log_gamma_complex(b)?)
    .exp();
    if !coef1.is_finite() || !coef2.is_finite() {
        return Err(Error::Overflow("hyp2f1_connection coefficients"));
    }
    let p1 = Hyp2F1Params::new(a, b, a + b - c + 1.0)?;
    let p2 = Hyp2F1Params::new(c - a, c - b, cab + 1.0)?;
    let f1 = hyp2f1_series(&p1, one_minus_z)?;
    let f2 = hyp2f1_series(&p2, one_minus_z)?;
    Ok(coef1 * f1 + one_minus_z.powc(cab) * coef2 * f2)
}

/// d/dz 2F1(a,b,c;z) via the contiguous-parameter identity.
pub fn hyp2f1_derivative(params: &Hyp2F1Params, z: Complex64) -> Result<Complex64> {
    let shifted = params.shifted_up()?;
    Ok(params.a * params.b / params.c * hyp2f1(&shifted, z)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(a: Complex64, b: Complex64, cc: Complex64) -> Hyp2F1Params {
        Hyp2F1Params::new(a, b, cc).unwrap()
    }

    #[test]
    fn value_at_origin_is_one() {
        let p = params(c(0.3, 2.0), c(-1.2, 0.4), c(0.9, -3.0));
        assert!((hyp2f1(&p, c(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn log_identity() {
        // 2F1(1,1,2;z) = -ln(1-z)/z
        let p = params(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0));
        let z = c(0.5, 0.0);
        let expected = 2.0 * std::f64::consts::LN_2; // 1.3862943611198906
        let v = hyp2f1(&p, z).unwrap();
        assert!((v.re - expected).abs() < 1e-13 && v.im.abs() < 1e-13);
    }

    #[test]
    fn binomial_identity() {
        // 2F1(a,b,b;z) = (1-z)^(-a)
        let p = params(c(0.5, 0.0), c(3.0, 0.0), c(3.0, 0.0));
        let v = hyp2f1(&p, c(0.5, 0.0)).unwrap();
        assert!((v.re - std::f64::consts::SQRT_2).abs() < 1e-13 && v.im.abs() < 1e-13);
    }

    #[test]
    fn derivative_at_origin_is_ab_over_c() {
        let p = params(c(0.4, 1.0), c(2.0, -0.5), c(1.5, 0.7));
        let d = hyp2f1_derivative(&p, c(0.0, 0.0)).unwrap();
        assert!((d - p.a * p.b / p.c).norm() < 1e-14);
    }

    #[test]
    fn derivative_of_log_identity() {
        // d/dz [-ln(1-z)/z] at z = 0.5 equals 4 - 4 ln 2 = 1.2274112777602189
        let p = params(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0));
        let d = hyp2f1_derivative(&p, c(0.5, 0.0)).unwrap();
        let expected = 4.0 - 4.0 * std::f64::consts::LN_2;
        assert!((d.re - expected).abs() < 1e-12 && d.im.abs() < 1e-13);
    }

    #[test]
    fn derivative_of_binomial_identity() {
        // d/dz (1-z)^(-1/2) at 0.5 = 0.5 * 0.5^{-3/2} = sqrt(2)
        let p = params(c(0.5, 0.0), c(3.0, 0.0), c(3.0, 0.0));
        let d = hyp2f1_derivative(&p, c(0.5, 0.0)).unwrap();
        assert!((d.re - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_central_difference() {
        let p = params(c(0.5, -2.0), c(0.5, 2.0), c(1.0, -3.0));
        let h = 1e-6;
        for &x in &[0.2, 0.45, 0.7] {
            let d = hyp2f1_derivative(&p, c(x, 0.0)).unwrap();
            let fd = (hyp2f1(&p, c(x + h, 0.0)).unwrap() - hyp2f1(&p, c(x - h, 0.0)).unwrap())
                / (2.0 * h);
            assert!((d - fd).norm() / d.norm() < 1e-6, "x = {x}");
        }
    }

    #[test]
    fn series_and_connection_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
        let mut checked = 0usize;
        while checked < 60 {
            let a = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let b = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let cc = c(rng.gen_range(0.5..3.0), rng.gen_range(-2.0..2.0));
            let cab = cc - a - b;
            if cab.im.abs() < 0.05 && (cab.re - cab.re.round()).abs() < 0.05 {
                continue;
            }
            let p = match Hyp2F1Params::new(a, b, cc) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let z = c(rng.gen_range(0.5..0.95), 0.0);
            let s = hyp2f1_series(&p, z).unwrap();
            let t = hyp2f1_connection(&p, z, c(1.0, 0.0) - z).unwrap();
            let rel = (s - t).norm() / s.norm();
            assert!(rel < 1e-8, "routes disagree at a={a} b={b} c={cc} z={z}: {rel:.3e}");
            checked += 1;
        }
    }

    #[test]
    fn degenerate_parameters_are_rejected() {
        // c - a - b = 1 exactly
        let p = params(c(0.5, 1.0), c(0.5, -1.0), c(2.0, 0.0));
        match hyp2f1_connection(&p, c(0.97, 0.0), c(0.03, 0.0)) {
            Err(Error::DegenerateParameters(_)) => {}
            other => panic!("expected DegenerateParameters, got {other:?}"),
        }
        // the router falls back to the series where it still converges
        let v = hyp2f1_with_complement(&p, c(0.97, 0.0), c(0.03, 0.0)).unwrap();
        let s = hyp2f1_series(&p, c(0.97, 0.0)).unwrap();
        assert!((v - s).norm() < 1e-12 * s.norm());
    }

    #[test]
    fn nonpositive_integer_c_is_rejected() {
        assert!(Hyp2F1Params::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).is_err());
        assert!(Hyp2F1Params::new(c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0)).is_err());
    }

    #[test]
    fn sauter_scale_parameters_evaluate_near_one() {
        // the magnitudes the Sauter pulse produces: large imaginary parts
        let lam = 19.993749028252936;
        let t0 = 22.360679774997898; // tau * omega0 at p = 0
        let a = c(0.5, -lam);
        let b = c(0.5, lam);
        let cc = c(1.0, -t0);
        let p = params(a, b, cc);
        for &u in &[1e-8, 1e-4, 0.05, 0.3] {
            let v = hyp2f1_with_complement(&p, c(1.0 - u, 0.0), c(u, 0.0)).unwrap();
            assert!(v.re.is_finite() && v.im.is_finite());
        }
    }
}
