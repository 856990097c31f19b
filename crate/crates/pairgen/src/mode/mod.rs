//! Exact mode functions of the Sauter-pulse oscillator equation and an
//! independent adaptive ODE integration used as a cross-validation oracle.
//!
//! The positive-frequency solution is normalized so that it approaches
//! exp(-i omega0 t)/sqrt(2 omega0) in the remote past; the branch constant of
//! (y-1)^{i tau omega1 / 2} is absorbed into the normalization, which leaves
//! a pure phase (1-y)^{i tau omega1/2} and makes the Wronskian condition the
//! single source of truth for the overall constant.

mod ode;

pub use ode::{default_t_start, integrate_mode, ode_oracle, OdeSolution};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{hyp_params, t_of_y, u_of_t, y_of_t, Momentum, PulseParams};
use crate::special::hyp2f1_with_complement;

/// Mode function value and time derivative at a fixed time.
#[derive(Debug, Clone, Copy)]
pub struct ModeState {
    pub phi: Complex64,
    pub phi_dot: Complex64,
    pub t: f64,
}

impl ModeState {
    /// conj(phi) phi_dot - conj(phi_dot) phi; equals -i for a correctly
    /// normalized positive-frequency mode at all times.
    pub fn wronskian(&self) -> Complex64 {
        self.phi.conj() * self.phi_dot - self.phi_dot.conj() * self.phi
    }

    /// |wronskian - (-i)|, the conserved-quantity drift.
    pub fn wronskian_drift(&self) -> f64 {
        (self.wronskian() - Complex64::new(0.0, -1.0)).norm()
    }
}

/// Exact positive-frequency mode at y = (1 + tanh(t/tau))/2 in (0, 1).
pub fn exact_mode(pulse: &PulseParams, p: Momentum, y: f64) -> Result<ModeState> {
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::Domain(format!("exact_mode requires 0 < y < 1, got {y}")));
    }
    exact_mode_yu(pulse, p, y, 1.0 - y, t_of_y(pulse, y)?)
}

/// Exact mode at time t; computes y and 1-y separately so that neither tail
/// loses precision.
pub fn exact_mode_at(pulse: &PulseParams, p: Momentum, t: f64) -> Result<ModeState> {
    let y = y_of_t(pulse, t);
    let u = u_of_t(pulse, t);
    if y <= 0.0 || u <= 0.0 {
        return Err(Error::Domain(format!(
            "time t = {t} is too deep in a tail for the y-substitution"
        )));
    }
    exact_mode_yu(pulse, p, y, u, t)
}

pub(crate) fn exact_mode_yu(
    pulse: &PulseParams,
    p: Momentum,
    y: f64,
    u: f64,
    t: f64,
) -> Result<ModeState> {
    let hp = hyp_params(pulse, p)?;
    let fp = hp.f_params();
    let zy = Complex64::new(y, 0.0);
    let zu = Complex64::new(u, 0.0);
    let g2 = hyp2f1_with_complement(&fp, zy, zu)?;
    let g1 = hyp2f1_with_complement(&fp.shifted_up()?, zy, zu)?;

    let tau = pulse.tau();
    // pure phase y^{-i tau omega0/2} (1-y)^{+i tau omega1/2}
    let theta = -0.5 * tau * hp.omega0 * y.ln() + 0.5 * tau * hp.omega1 * u.ln();
    let phase = Complex64::new(0.0, theta).exp();
    let norm = 1.0 / (2.0 * hp.omega0).sqrt();

    let omega_bar = u * hp.omega0 + y * hp.omega1;
    let series_part = fp.a * fp.b / fp.c * g1 * (2.0 / tau * y * u);
    let phi = phase * g2 * norm;
    let phi_dot = phase * (series_part + g2 * Complex64::new(0.0, -omega_bar)) * norm;
    let state = ModeState { phi, phi_dot, t };
    if !phi.re.is_finite() || !phi.im.is_finite() || !phi_dot.re.is_finite() || !phi_dot.im.is_finite() {
        return Err(Error::Overflow("exact_mode"));
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::omega_sq;

    fn pulse() -> PulseParams {
        PulseParams::new(0.2, 10.0).unwrap()
    }

    #[test]
    fn early_time_limit_is_plane_wave_amplitude() {
        let pl = pulse();
        let p = Momentum::longitudinal(0.0);
        let st = exact_mode(&pl, p, 1e-9).unwrap();
        let expected = 1.0 / (2.0 * 5.0f64.sqrt());
        assert!((st.phi.norm_sqr() - expected).abs() < 1e-7 * expected);
        // phi_dot ~ -i omega0 phi
        let ratio = st.phi_dot / st.phi;
        assert!((ratio - Complex64::new(0.0, -5.0f64.sqrt())).norm() < 1e-6);
    }

    #[test]
    fn wronskian_is_minus_i_across_the_pulse() {
        let pl = pulse();
        for &pp in &[-2.0, -0.5, 0.0, 1.0, 3.0] {
            let p = Momentum::longitudinal(pp);
            for &y in &[1e-6, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.9999] {
                let st = exact_mode(&pl, p, y).unwrap();
                assert!(
                    st.wronskian_drift() < 1e-8,
                    "drift {:.3e} at p = {pp}, y = {y}",
                    st.wronskian_drift()
                );
            }
        }
    }

    #[test]
    fn wronskian_with_transverse_momentum() {
        let pl = pulse();
        let p = Momentum::new(0.7, 1.2).unwrap();
        for &y in &[0.2, 0.5, 0.95] {
            let st = exact_mode(&pl, p, y).unwrap();
            assert!(st.wronskian_drift() < 1e-8);
        }
    }

    #[test]
    fn satisfies_oscillator_equation_by_finite_differences() {
        // |phi_dd + omega^2 phi| / (omega^2 |phi|) < 1e-5 on a mid-pulse grid
        let pl = pulse();
        let p = Momentum::longitudinal(0.4);
        let h = 1e-3;
        for &t in &[-12.0, -3.0, 0.0, 4.0, 11.0, 25.0] {
            let sm = exact_mode_at(&pl, p, t - h).unwrap();
            let s0 = exact_mode_at(&pl, p, t).unwrap();
            let sp = exact_mode_at(&pl, p, t + h).unwrap();
            let phi_dd = (sp.phi - s0.phi * 2.0 + sm.phi) / (h * h);
            let w2 = omega_sq(&pl, p, t);
            let resid = (phi_dd + s0.phi * w2).norm() / (w2 * s0.phi.norm());
            assert!(resid < 1e-5, "residual {resid:.3e} at t = {t}");
            // first derivative consistency as well
            let fd = (sp.phi - sm.phi) / (2.0 * h);
            assert!((fd - s0.phi_dot).norm() / s0.phi_dot.norm() < 1e-5);
        }
    }

    #[test]
    fn rejects_out_of_range_y() {
        let pl = pulse();
        let p = Momentum::longitudinal(0.0);
        assert!(exact_mode(&pl, p, 0.0).is_err());
        assert!(exact_mode(&pl, p, 1.0).is_err());
        assert!(exact_mode(&pl, p, -0.3).is_err());
    }

    #[test]
    fn null_field_has_no_exact_solution() {
        let pl = PulseParams::null_field(10.0).unwrap();
        assert!(matches!(
            exact_mode(&pl, Momentum::longitudinal(0.0), 0.5),
            Err(Error::SubThreshold { .. })
        ));
    }
}
