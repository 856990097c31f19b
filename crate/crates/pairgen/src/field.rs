//! Sauter pulse kinematics: field profile, vector potential, the
//! time-dependent mode frequency, the y = (1 + tanh(t/tau))/2 substitution
//! and the hypergeometric parameter set of the exact solution.
//!
//! Units are natural: hbar = c = m = |e| = 1, field strength in units of the
//! critical field. The particle charge is negative (e = -1) by convention;
//! the kinematic momentum entering the frequency is
//! p_par - e E0 tau tanh(t/tau), so its asymptotic values are
//! omega0 = sqrt((p_par + e E0 tau)^2 + p_perp^2 + 1) at early times and
//! omega1 with the opposite sign of the shift at late times.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::Hyp2F1Params;

/// Sauter pulse E_z(t) = e0 sech^2(t/tau).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseParams {
    e0: f64,
    tau: f64,
    charge_sign: f64,
}

impl PulseParams {
    /// Validates e0 > 0, tau > 0 and the exact-solution threshold
    /// (e0 tau^2)^2 > 1/4 (real lambda).
    pub fn new(e0: f64, tau: f64) -> Result<Self> {
        if !(e0 > 0.0) || !(tau > 0.0) || !e0.is_finite() || !tau.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "pulse requires e0 > 0 and tau > 0, got e0 = {e0}, tau = {tau}"
            )));
        }
        if (e0 * tau * tau).powi(2) <= 0.25 {
            return Err(Error::SubThreshold { e0, tau });
        }
        Ok(Self { e0, tau, charge_sign: -1.0 })
    }

    /// Vanishing field. Only the oscillator-equation (ODE) machinery works
    /// here; the hypergeometric parameter set does not exist (lambda is
    /// imaginary), so `hyp_params` and the exact solver reject it.
    pub fn null_field(tau: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidConfig(format!("tau must be positive, got {tau}")));
        }
        Ok(Self { e0: 0.0, tau, charge_sign: -1.0 })
    }

    /// Mirror charge convention (flips the spectra in p_par). Test hook.
    pub fn with_charge_sign(mut self, sign: f64) -> Result<Self> {
        if sign != 1.0 && sign != -1.0 {
            return Err(Error::InvalidConfig(format!("charge sign must be +-1, got {sign}")));
        }
        self.charge_sign = sign;
        Ok(self)
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn charge_sign(&self) -> f64 {
        self.charge_sign
    }

    /// E_z(t) = e0 sech^2(t/tau); even in t.
    pub fn electric_field(&self, t: f64) -> f64 {
        let s = 1.0 / (t / self.tau).cosh();
        self.e0 * s * s
    }

    /// A_z(t) = -e0 tau tanh(t/tau); odd in t, -dA/dt = E.
    pub fn vector_potential(&self, t: f64) -> f64 {
        -self.e0 * self.tau * (t / self.tau).tanh()
    }

    /// Keldysh adiabaticity parameter gamma = 1/(e0 tau).
    pub fn keldysh(&self) -> f64 {
        1.0 / (self.e0 * self.tau)
    }
}

/// Longitudinal and transverse momentum of a produced particle, units m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Momentum {
    pub p_par: f64,
    pub p_perp: f64,
}

impl Momentum {
    pub fn new(p_par: f64, p_perp: f64) -> Result<Self> {
        if p_perp < 0.0 || !p_par.is_finite() || !p_perp.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "momentum requires p_perp >= 0 and finite components, got ({p_par}, {p_perp})"
            )));
        }
        Ok(Self { p_par, p_perp })
    }

    pub fn longitudinal(p_par: f64) -> Self {
        Self { p_par, p_perp: 0.0 }
    }

    /// Transverse energy squared, eps_perp^2 = 1 + p_perp^2.
    pub fn eps_perp_sq(&self) -> f64 {
        1.0 + self.p_perp * self.p_perp
    }
}

/// Kinematic longitudinal momentum p_par - e E0 tau tanh(t/tau).
pub fn kinematic_momentum(pulse: &PulseParams, p: Momentum, t: f64) -> f64 {
    p.p_par - pulse.charge_sign * pulse.e0 * pulse.tau * (t / pulse.tau).tanh()
}

/// Mode frequency omega(p, t) = sqrt(eps_perp^2 + pi(t)^2) >= 1.
pub fn omega(pulse: &PulseParams, p: Momentum, t: f64) -> f64 {
    omega_sq(pulse, p, t).sqrt()
}

pub fn omega_sq(pulse: &PulseParams, p: Momentum, t: f64) -> f64 {
    let pi_t = kinematic_momentum(pulse, p, t);
    p.eps_perp_sq() + pi_t * pi_t
}

/// (omega, omega_dot, omega_ddot) in closed form for the Sauter profile.
pub fn omega_time_derivatives(pulse: &PulseParams, p: Momentum, t: f64) -> (f64, f64, f64) {
    let th = (t / pulse.tau).tanh();
    let sech2 = 1.0 - th * th;
    let s = pulse.charge_sign;
    let pi_t = p.p_par - s * pulse.e0 * pulse.tau * th;
    let pi_dot = -s * pulse.e0 * sech2;
    let pi_ddot = 2.0 * s * pulse.e0 * th * sech2 / pulse.tau;
    let w = (p.eps_perp_sq() + pi_t * pi_t).sqrt();
    let w_dot = pi_t * pi_dot / w;
    let w_ddot = (pi_dot * pi_dot + pi_t * pi_ddot - w_dot * w_dot) / w;
    (w, w_dot, w_ddot)
}

/// Asymptotic frequencies (omega0 at t -> -inf, omega1 at t -> +inf).
pub fn omega_asymptotics(pulse: &PulseParams, p: Momentum) -> (f64, f64) {
    let shift = pulse.charge_sign * pulse.e0 * pulse.tau;
    let eps2 = p.eps_perp_sq();
    let w0 = (eps2 + (p.p_par + shift) * (p.p_par + shift)).sqrt();
    let w1 = (eps2 + (p.p_par - shift) * (p.p_par - shift)).sqrt();
    (w0, w1)
}

/// y(t) = (1 + tanh(t/tau))/2, computed as a logistic to keep full precision
/// in both tails.
pub fn y_of_t(pulse: &PulseParams, t: f64) -> f64 {
    1.0 / (1.0 + (-2.0 * t / pulse.tau).exp())
}

/// 1 - y(t), exact in the late-time tail where 1 - y underflows in y itself.
pub fn u_of_t(pulse: &PulseParams, t: f64) -> f64 {
    1.0 / (1.0 + (2.0 * t / pulse.tau).exp())
}

/// Inverse of `y_of_t` on (0, 1).
pub fn t_of_y(pulse: &PulseParams, y: f64) -> Result<f64> {
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::Domain(format!("t_of_y requires 0 < y < 1, got {y}")));
    }
    Ok(0.5 * pulse.tau * (y / (1.0 - y)).ln())
}

/// Frequency as a function of (y, 1-y); tanh(t/tau) = y - u exactly.
pub fn omega_of_yu(pulse: &PulseParams, p: Momentum, y: f64, u: f64) -> f64 {
    let pi_y = p.p_par - pulse.charge_sign * pulse.e0 * pulse.tau * (y - u);
    (p.eps_perp_sq() + pi_y * pi_y).sqrt()
}

/// Parameter set of the exact hypergeometric solution.
#[derive(Debug, Clone, Copy)]
pub struct SauterHypParams {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub lambda: f64,
    pub omega0: f64,
    pub omega1: f64,
}

impl SauterHypParams {
    pub fn f_params(&self) -> Hyp2F1Params {
        Hyp2F1Params { a: self.a, b: self.b, c: self.c }
    }
}

/// Builds a, b, c, lambda from the pulse and momentum:
/// a,b = 1/2 + i tau (omega1 - omega0)/2 -+ i lambda, c = 1 - i tau omega0,
/// lambda = sqrt((e0 tau^2)^2 - 1/4) (|charge| = 1).
pub fn hyp_params(pulse: &PulseParams, p: Momentum) -> Result<SauterHypParams> {
    let lam_sq = (pulse.e0 * pulse.tau * pulse.tau).powi(2) - 0.25;
    if lam_sq <= 0.0 {
        return Err(Error::SubThreshold { e0: pulse.e0, tau: pulse.tau });
    }
    let lambda = lam_sq.sqrt();
    let (omega0, omega1) = omega_asymptotics(pulse, p);
    let half_diff = 0.5 * pulse.tau * (omega1 - omega0);
    let a = Complex64::new(0.5, half_diff - lambda);
    let b = Complex64::new(0.5, half_diff + lambda);
    let c = Complex64::new(1.0, -pulse.tau * omega0);
    Ok(SauterHypParams { a, b, c, lambda, omega0, omega1 })
}
