//! Adiabatic reference mode functions: the iterated WKB frequency, the two
//! auxiliary-function variants that define the reference bases, and the WKB
//! phase integral.
//!
//! The two bases used throughout are order-0 in the frequency iteration,
//! Omega = omega, and differ only in the auxiliary real function carried by
//! the reference derivative: V = 0 (first choice) or V = -omega_dot/(2 omega)
//! (second, "natural" choice, the exact logarithmic derivative of the WKB
//! amplitude).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{omega, omega_time_derivatives, Momentum, PulseParams};
use num_complex::Complex64;

/// Auxiliary-function variant selecting the reference basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VVariant {
    Zero,
    NaturalChoice,
}

/// A reference adiabatic basis: V-variant plus frequency iteration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BasisChoice {
    pub v_variant: VVariant,
    pub omega_order: u32,
}

impl BasisChoice {
    /// Omega = omega, V = 0.
    pub const fn choice1() -> Self {
        Self { v_variant: VVariant::Zero, omega_order: 0 }
    }

    /// Omega = omega, V = -omega_dot / (2 omega).
    pub const fn choice2() -> Self {
        Self { v_variant: VVariant::NaturalChoice, omega_order: 0 }
    }

    pub fn label(&self) -> String {
        let base = match self.v_variant {
            VVariant::Zero => "choice1",
            VVariant::NaturalChoice => "choice2",
        };
        if self.omega_order == 0 {
            base.to_string()
        } else {
            format!("{base}-j{}", self.omega_order)
        }
    }
}

impl TryFrom<String> for BasisChoice {
    type Error = String;
    fn try_from(s: String) -> std::result::Result<Self, String> {
        match s.as_str() {
            "choice1" => Ok(Self::choice1()),
            "choice2" => Ok(Self::choice2()),
            other => Err(format!("unknown basis '{other}' (expected choice1 or choice2)")),
        }
    }
}

impl From<BasisChoice> for String {
    fn from(b: BasisChoice) -> String {
        b.label()
    }
}

/// Reference frequency, auxiliary function and accumulated phase at one time.
#[derive(Debug, Clone, Copy)]
pub struct AdiabaticFrame {
    pub omega_ref: f64,
    pub v_ref: f64,
    pub phase: f64,
}

/// Iterated adiabatic frequency Omega^(j), j in {0, 1, 2}.
///
/// Order 0 is omega itself; order 1 uses the closed-form omega derivatives;
/// order 2 iterates once more with Richardson-extrapolated numerical
/// derivatives of Omega^(1) (exploratory only; the production bases use j=0).
pub fn adiabatic_frequency(pulse: &PulseParams, p: Momentum, t: f64, j: u32) -> Result<f64> {
    match j {
        0 => Ok(omega(pulse, p, t)),
        1 => {
            let sq = omega1_sq(pulse, p, t);
            if sq <= 0.0 {
                return Err(Error::ImaginaryFrequency { t, value: sq });
            }
            Ok(sq.sqrt())
        }
        2 => {
            let om1 = adiabatic_frequency(pulse, p, t, 1)?;
            let h = 1e-3 * pulse.tau();
            let f = |tt: f64| adiabatic_frequency(pulse, p, tt, 1);
            let d1 = derivative_5pt(&f, t, h)?;
            let d2 = second_derivative_5pt(&f, t, h)?;
            let w = omega(pulse, p, t);
            let sq = w * w - (d2 / (2.0 * om1) - 0.75 * (d1 / om1) * (d1 / om1));
            if sq <= 0.0 {
                return Err(Error::ImaginaryFrequency { t, value: sq });
            }
            Ok(sq.sqrt())
        }
        _ => Err(Error::Domain(format!("adiabatic order j = {j} not supported (j <= 2)"))),
    }
}

fn omega1_sq(pulse: &PulseParams, p: Momentum, t: f64) -> f64 {
    let (w, wd, wdd) = omega_time_derivatives(pulse, p, t);
    w * w - (wdd / (2.0 * w) - 0.75 * (wd / w) * (wd / w))
}

/// Auxiliary function V of the chosen basis at time t.
pub fn v_function(pulse: &PulseParams, p: Momentum, t: f64, choice: BasisChoice) -> Result<f64> {
    match choice.v_variant {
        VVariant::Zero => Ok(0.0),
        VVariant::NaturalChoice => {
            if choice.omega_order == 0 {
                let (w, wd, _) = omega_time_derivatives(pulse, p, t);
                Ok(-wd / (2.0 * w))
            } else {
                let j = choice.omega_order;
                let om = adiabatic_frequency(pulse, p, t, j)?;
                let h = 1e-3 * pulse.tau();
                let f = |tt: f64| adiabatic_frequency(pulse, p, tt, j);
                let d1 = derivative_5pt(&f, t, h)?;
                Ok(-d1 / (2.0 * om))
            }
        }
    }
}

/// WKB phase integral of Omega^(j) from t0 to t (adaptive Simpson).
pub fn wkb_phase(pulse: &PulseParams, p: Momentum, t0: f64, t: f64, j: u32) -> Result<f64> {
    if t == t0 {
        return Ok(0.0);
    }
    let f = |tt: f64| adiabatic_frequency(pulse, p, tt, j);
    adaptive_simpson(&f, t0, t, 1e-11)
}

/// WKB reference mode exp(-i Theta)/sqrt(2 Omega) with the phase taken from
/// the default start of integration (-10 tau).
pub fn wkb_mode(pulse: &PulseParams, p: Momentum, t: f64, j: u32) -> Result<Complex64> {
    wkb_mode_from(pulse, p, crate::mode::default_t_start(pulse), t, j)
}

pub fn wkb_mode_from(
    pulse: &PulseParams,
    p: Momentum,
    t0: f64,
    t: f64,
    j: u32,
) -> Result<Complex64> {
    let om = adiabatic_frequency(pulse, p, t, j)?;
    let theta = wkb_phase(pulse, p, t0, t, j)?;
    Ok(Complex64::from_polar(1.0 / (2.0 * om).sqrt(), -theta))
}

/// Frame at time t with phase 0. Occupation numbers |beta|^2 and the
/// constraint |alpha|^2 - |beta|^2 are phase-independent, so sweeps use this
/// directly; callers needing phased coefficients use `frame_with_phase`.
pub fn frame_at(pulse: &PulseParams, p: Momentum, t: f64, choice: BasisChoice) -> Result<AdiabaticFrame> {
    Ok(AdiabaticFrame {
        omega_ref: adiabatic_frequency(pulse, p, t, choice.omega_order)?,
        v_ref: v_function(pulse, p, t, choice)?,
        phase: 0.0,
    })
}

pub fn frame_with_phase(
    pulse: &PulseParams,
    p: Momentum,
    t0: f64,
    t: f64,
    choice: BasisChoice,
) -> Result<AdiabaticFrame> {
    Ok(AdiabaticFrame {
        omega_ref: adiabatic_frequency(pulse, p, t, choice.omega_order)?,
        v_ref: v_function(pulse, p, t, choice)?,
        phase: wkb_phase(pulse, p, t0, t, choice.omega_order)?,
    })
}

fn derivative_5pt(f: &dyn Fn(f64) -> Result<f64>, t: f64, h: f64) -> Result<f64> {
    Ok((8.0 * (f(t + h)? - f(t - h)?) - (f(t + 2.0 * h)? - f(t - 2.0 * h)?)) / (12.0 * h))
}

fn second_derivative_5pt(f: &dyn Fn(f64) -> Result<f64>, t: f64, h: f64) -> Result<f64> {
    Ok((-(f(t + 2.0 * h)? + f(t - 2.0 * h)?) + 16.0 * (f(t + h)? + f(t - h)?) - 30.0 * f(t)?)
        / (12.0 * h * h))
}

fn adaptive_simpson(f: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> Result<f64>,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm)?;
        let frm = f(rm)?;
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 {
            return Err(Error::Domain("phase quadrature failed to converge".into()));
        }
        if delta.abs() <= 15.0 * tol {
            Ok(left + right + delta / 15.0)
        } else {
            Ok(recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
        }
    }
    let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
    let fa = f(lo)?;
    let m = 0.5 * (lo + hi);
    let fm = f(m)?;
    let fb = f(hi)?;
    let whole = simpson(fa, fm, fb, lo, hi);
    let scaled_tol = tol * (1.0 + whole.abs());
    Ok(sign * recurse(f, lo, hi, fa, fm, fb, whole, scaled_tol, 48)?)
}
