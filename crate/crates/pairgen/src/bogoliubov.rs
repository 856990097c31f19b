//! Time-dependent Bogoliubov coefficients and the single-particle
//! distribution f(p, t) = |beta|^2 in a chosen adiabatic basis.
//!
//! With reference modes phi_ref(+-) = exp(-+ i Theta)/sqrt(2 Omega) and the
//! reference derivative Q = -i Omega + V, solving the 2x2 decomposition of
//! (Phi, Phi_dot) gives
//!
//!   alpha =  i phi_ref(-) [ Phi_dot - (i Omega + V) Phi ]
//!   beta  = -i phi_ref(+) [ Phi_dot + (i Omega - V) Phi ]
//!
//! which satisfies |alpha|^2 - |beta|^2 = 1 whenever the mode carries the
//! Wronskian -i. Occupations are independent of the reference phase origin,
//! so sweeps use phase-0 frames.

use num_complex::Complex64;
use serde::Serialize;

use crate::adiabatic::{frame_at, v_function, AdiabaticFrame, BasisChoice};
use crate::error::{Error, Result};
use crate::field::{hyp_params, omega_of_yu, t_of_y, Momentum, PulseParams};
use crate::mode::{default_t_start, exact_mode_at, integrate_mode, ModeState};
use crate::special::hyp2f1_with_complement;

/// Instantaneous Bogoliubov pair (alpha, beta) at time t.
#[derive(Debug, Clone, Copy)]
pub struct BogoliubovPair {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub t: f64,
}

impl BogoliubovPair {
    /// | |alpha|^2 - |beta|^2 - 1 |, the normalization defect.
    pub fn constraint_defect(&self) -> f64 {
        (self.alpha.norm_sqr() - self.beta.norm_sqr() - 1.0).abs()
    }
}

/// Occupation sample of the distribution function.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DistributionSample {
    pub f: f64,
    pub p: Momentum,
    pub t: f64,
    pub basis: BasisChoice,
}

/// Mode-function source for the distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Exact,
    Ode,
}

/// Projects an exact mode state onto the reference basis of `frame`.
///
/// Fails with `ConstraintViolation` when the normalization defect exceeds
/// 1e-5, which signals inconsistent mode/frame inputs.
pub fn bogoliubov_coefficients(mode: &ModeState, frame: &AdiabaticFrame) -> Result<BogoliubovPair> {
    let om = frame.omega_ref;
    let v = frame.v_ref;
    let phi_ref_plus = Complex64::from_polar(1.0 / (2.0 * om).sqrt(), -frame.phase);
    let phi_ref_minus = phi_ref_plus.conj();
    let alpha = Complex64::i()
        * phi_ref_minus
        * (mode.phi_dot - Complex64::new(v, om) * mode.phi);
    let beta = -Complex64::i()
        * phi_ref_plus
        * (mode.phi_dot + Complex64::new(-v, om) * mode.phi);
    let pair = BogoliubovPair { alpha, beta, t: mode.t };
    let defect = pair.constraint_defect();
    if defect > 1e-5 {
        return Err(Error::ConstraintViolation(defect));
    }
    Ok(pair)
}

/// f(p, t) = |beta|^2 from the chosen solver and basis.
pub fn distribution(
    pulse: &PulseParams,
    p: Momentum,
    t: f64,
    basis: BasisChoice,
    solver: Solver,
) -> Result<DistributionSample> {
    let mode = match solver {
        Solver::Exact => exact_mode_at(pulse, p, t)?,
        Solver::Ode => {
            let t_start = default_t_start(pulse).min(t - pulse.tau());
            let sol = integrate_mode(pulse, p, t_start, &[t])?;
            sol.states[0]
        }
    };
    let frame = frame_at(pulse, p, t, basis)?;
    let pair = bogoliubov_coefficients(&mode, &frame)?;
    Ok(DistributionSample { f: pair.beta.norm_sqr(), p, t, basis })
}

/// f assembled directly in the y variable from the hypergeometric pieces:
/// f = |C|^2/(2 Omega) | (2/tau) y (1-y) (ab/c) g1 + (i(Omega - omega_bar) - V) g2 |^2
/// with g1, g2 the contiguous hypergeometric values and
/// omega_bar = (1-y) omega0 + y omega1. Same formula as the time-variable
/// route under the substitution; kept as an independent assembly for
/// cross-checking.
pub fn distribution_y_form(
    pulse: &PulseParams,
    p: Momentum,
    y: f64,
    basis: BasisChoice,
) -> Result<f64> {
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::Domain(format!("distribution_y_form requires 0 < y < 1, got {y}")));
    }
    if basis.omega_order != 0 {
        return Err(Error::Domain("y-form assembly supports order-0 bases only".into()));
    }
    let u = 1.0 - y;
    let t = t_of_y(pulse, y)?;
    let hp = hyp_params(pulse, p)?;
    let fp = hp.f_params();
    let zy = Complex64::new(y, 0.0);
    let zu = Complex64::new(u, 0.0);
    let g2 = hyp2f1_with_complement(&fp, zy, zu)?;
    let g1 = hyp2f1_with_complement(&fp.shifted_up()?, zy, zu)?;
    let tau = pulse.tau();
    let omega_ref = omega_of_yu(pulse, p, y, u);
    let v = v_function(pulse, p, t, basis)?;
    let omega_bar = u * hp.omega0 + y * hp.omega1;
    let tvec = fp.a * fp.b / fp.c * g1 * (2.0 / tau * y * u)
        + g2 * Complex64::new(-v, omega_ref - omega_bar);
    Ok(tvec.norm_sqr() / (2.0 * omega_ref * 2.0 * hp.omega0))
}

/// One ODE sweep reused across an increasing time grid.
pub fn distribution_series(
    pulse: &PulseParams,
    p: Momentum,
    t_grid: &[f64],
    basis: BasisChoice,
) -> Result<Vec<DistributionSample>> {
    if t_grid.is_empty() {
        return Err(Error::Domain("empty time grid".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("time grid must be strictly increasing".into()));
    }
    let t_start = default_t_start(pulse).min(t_grid[0] - pulse.tau());
    let sol = integrate_mode(pulse, p, t_start, t_grid)?;
    sol.states
        .iter()
        .map(|mode| {
            let frame = frame_at(pulse, p, mode.t, basis)?;
            let pair = bogoliubov_coefficients(mode, &frame)?;
            Ok(DistributionSample { f: pair.beta.norm_sqr(), p, t: mode.t, basis })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::y_of_t;
    use crate::mode::exact_mode;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pulse() -> PulseParams {
        PulseParams::new(0.2, 10.0).unwrap()
    }

    #[test]
    fn free_field_creates_nothing() {
        let pl = PulseParams::null_field(10.0).unwrap();
        let p = Momentum::new(0.8, 0.5).unwrap();
        for basis in [BasisChoice::choice1(), BasisChoice::choice2()] {
            for &t in &[-20.0, 0.0, 30.0] {
                let s = distribution(&pl, p, t, basis, Solver::Ode).unwrap();
                assert!(s.f < 1e-14, "f = {} at t = {t}", s.f);
            }
        }
        // |alpha| -> 1 up to phase
        let sol = integrate_mode(&pl, p, -100.0, &[5.0]).unwrap();
        let frame = frame_at(&pl, p, 5.0, BasisChoice::choice1()).unwrap();
        let pair = bogoliubov_coefficients(&sol.states[0], &frame).unwrap();
        assert!((pair.alpha.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn initial_condition_carries_no_particles() {
        let pl = pulse();
        let t0 = -8.0 * pl.tau();
        for &pp in &[-1.0, 0.0, 2.0] {
            let p = Momentum::longitudinal(pp);
            let s = distribution(&pl, p, t0, BasisChoice::choice1(), Solver::Exact).unwrap();
            assert!(s.f < 1e-10, "f = {} at p = {pp}", s.f);
        }
    }

    #[test]
    fn constraint_holds_on_random_samples() {
        let pl = pulse();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0020);
        for _ in 0..300 {
            let p = Momentum::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.0..1.5)).unwrap();
            let t = rng.gen_range(-20.0..50.0);
            let basis = if rng.gen_bool(0.5) { BasisChoice::choice1() } else { BasisChoice::choice2() };
            let mode = exact_mode_at(&pl, p, t).unwrap();
            let frame = frame_at(&pl, p, t, basis).unwrap();
            let pair = bogoliubov_coefficients(&mode, &frame).unwrap();
            assert!(pair.constraint_defect() < 1e-7, "defect {:.3e}", pair.constraint_defect());
            assert!(pair.beta.norm_sqr() >= 0.0);
        }
    }

    #[test]
    fn occupation_is_phase_convention_neutral() {
        // the reference phase origin drops out of |alpha|, |beta|
        let pl = pulse();
        let p = Momentum::longitudinal(0.6);
        let t = 7.0;
        let mode = exact_mode_at(&pl, p, t).unwrap();
        let basis = BasisChoice::choice2();
        let f0 = crate::adiabatic::frame_with_phase(&pl, p, -10.0 * pl.tau(), t, basis).unwrap();
        let f1 = crate::adiabatic::frame_with_phase(&pl, p, 0.0, t, basis).unwrap();
        let p0 = bogoliubov_coefficients(&mode, &f0).unwrap();
        let p1 = bogoliubov_coefficients(&mode, &f1).unwrap();
        assert!((p0.beta.norm_sqr() - p1.beta.norm_sqr()).abs() < 1e-12 * p0.beta.norm_sqr());
        assert!((p0.alpha.norm() - p1.alpha.norm()).abs() < 1e-12);
    }

    #[test]
    fn exact_and_ode_solvers_agree() {
        let pl = pulse();
        for &pp in &[-1.0, 0.0, 1.5] {
            let p = Momentum::longitudinal(pp);
            for &t in &[0.0, 15.0, 40.0] {
                let fe = distribution(&pl, p, t, BasisChoice::choice1(), Solver::Exact).unwrap().f;
                let fo = distribution(&pl, p, t, BasisChoice::choice1(), Solver::Ode).unwrap().f;
                if fe > 1e-12 {
                    assert!((fe - fo).abs() / fe < 1e-6, "p={pp} t={t}: {fe:.6e} vs {fo:.6e}");
                } else {
                    assert!((fe - fo).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn t_form_and_y_form_assemblies_agree() {
        let pl = pulse();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0021);
        for _ in 0..100 {
            let p = Momentum::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.0..1.0)).unwrap();
            let t = rng.gen_range(-15.0..40.0);
            let basis = if rng.gen_bool(0.5) { BasisChoice::choice1() } else { BasisChoice::choice2() };
            let ft = distribution(&pl, p, t, basis, Solver::Exact).unwrap().f;
            let fy = distribution_y_form(&pl, p, y_of_t(&pl, t), basis).unwrap();
            // relative agreement at 1e-9 above the roundoff floor; below
            // f ~ 1e-10 the assemblies differ only by cancellation noise
            let denom = ft.abs().max(1e-10);
            assert!((ft - fy).abs() / denom < 1e-9, "t = {t}: {ft:.6e} vs {fy:.6e}");
        }
    }

    #[test]
    fn late_time_occupation_matches_both_bases() {
        let pl = pulse();
        let p = Momentum::longitudinal(0.0);
        let t = 10.0 * pl.tau();
        let f1 = distribution(&pl, p, t, BasisChoice::choice1(), Solver::Exact).unwrap().f;
        let f2 = distribution(&pl, p, t, BasisChoice::choice2(), Solver::Exact).unwrap().f;
        assert!((f1 - f2).abs() / f1 < 1e-6, "f1 = {f1:.6e}, f2 = {f2:.6e}");
        assert!(f1 > 3.4e-7 && f1 < 3.6e-7, "f1 = {f1:.6e}");
    }

    #[test]
    fn series_has_flat_residual_tail() {
        let pl = pulse();
        let p = Momentum::longitudinal(0.0);
        let grid: Vec<f64> = (0..=200).map(|k| 60.0 + 0.2 * k as f64).collect();
        let series = distribution_series(&pl, p, &grid, BasisChoice::choice1()).unwrap();
        let vals: Vec<f64> = series.iter().map(|s| s.f).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / vals.len() as f64;
        assert!(var.sqrt() < 1e-3 * mean, "stdev/mean = {:.3e}", var.sqrt() / mean);
    }

    #[test]
    fn second_choice_suppressed_in_quasiparticle_region() {
        // suppression away from t = 0; at (p = 0, t = 0) the auxiliary
        // function vanishes identically and the two bases coincide.
        let pl = pulse();
        let p = Momentum::longitudinal(0.0);
        for &t in &[-5.0, 5.0] {
            let f1 = distribution(&pl, p, t, BasisChoice::choice1(), Solver::Exact).unwrap().f;
            let f2 = distribution(&pl, p, t, BasisChoice::choice2(), Solver::Exact).unwrap().f;
            assert!(f2 < f1, "t = {t}: f1 = {f1:.3e}, f2 = {f2:.3e}");
        }
        let f1 = distribution(&pl, p, 0.0, BasisChoice::choice1(), Solver::Exact).unwrap().f;
        let f2 = distribution(&pl, p, 0.0, BasisChoice::choice2(), Solver::Exact).unwrap().f;
        assert!((f1 - f2).abs() < 1e-12 * f1);
    }

    #[test]
    fn single_point_series_at_early_time() {
        let pl = pulse();
        let p = Momentum::longitudinal(0.5);
        let series =
            distribution_series(&pl, p, &[-8.0 * pl.tau()], BasisChoice::choice1()).unwrap();
        assert!(series[0].f < 1e-10);
    }
}
