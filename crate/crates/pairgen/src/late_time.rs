//! Late-time structure of the occupation number.
//!
//! Near y = 1 the two branches of the z -> 1-z connection formula split the
//! assembled amplitude into a non-oscillatory part (weight Gamma1) and a part
//! carrying the pure phase (1-y)^{-i tau omega1} (weight Gamma2). Squaring
//! gives
//!
//!   f(p, y) ~ |N|^2 ( C0 + (1-y) C1 + (1-y)^2 C2 ),  |N|^2 = 1/(2 omega0),
//!
//! where each coefficient decomposes into a constant plus cos/sin of
//! Upsilon = rho + tau omega1 ln(1-y), rho = arg(Gamma1 conj(Gamma2)).
//! The squared weights |Gamma1|^2, |Gamma2|^2 collapse to hyperbolic
//! closed forms, evaluated here in log space (their exponent scales reach
//! ~200). This module computes those weights, the expansion coefficients
//! from exact Taylor data of the branch amplitudes, and an independent
//! least-squares extraction from the exact f used as the oracle.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::adiabatic::{BasisChoice, VVariant};
use crate::bogoliubov::distribution_y_form;
use crate::error::{Error, Result};
use crate::field::{hyp_params, omega_asymptotics, Momentum, PulseParams, SauterHypParams};
use crate::special::{ln_cosh, ln_sinh, log_add_exp, log_gamma_complex};

/// Squared connection-formula weights and their relative phase.
#[derive(Debug, Clone, Copy)]
pub struct GammaFactors {
    /// |Gamma(c) Gamma(c-a-b-1) / (Gamma(c-a) Gamma(c-b))|^2
    pub gamma1_sq: f64,
    /// |Gamma(c) Gamma(a+b-c) / (Gamma(a) Gamma(b))|^2
    pub gamma2_sq: f64,
    /// |Gamma1 conj(Gamma2)|
    pub cross_mag: f64,
    /// rho = arg(Gamma1 conj(Gamma2))
    pub cross_phase: f64,
}

/// Closed-form weights: with S+- = (pi/2)(2 lambda +- tau(omega0+omega1)) and
/// D+- = (pi/2)(tau(omega1-omega0) +- 2 lambda),
///
///   |Gamma1|^2 = (w0/w1) cosh(S-) cosh(S+) / ((1 + tau^2 w1^2) sinh(pi tau w0) sinh(pi tau w1))
///   |Gamma2|^2 = (w0/w1) cosh(D-) cosh(D+) / (sinh(pi tau w0) sinh(pi tau w1))
///
/// The phase is the exact log-Gamma combination (not a Stirling estimate);
/// see `stirling_cross_phase` for the asymptotic closed form kept as a
/// cross-check.
pub fn gamma_factors(hp: &SauterHypParams, pulse: &PulseParams) -> Result<GammaFactors> {
    let tau = pulse.tau();
    let (w0, w1, lam) = (hp.omega0, hp.omega1, hp.lambda);
    let pi = std::f64::consts::PI;

    let args = [
        0.5 * pi * (2.0 * lam - tau * (w0 + w1)),
        0.5 * pi * (2.0 * lam + tau * (w0 + w1)),
        0.5 * pi * (tau * (w1 - w0) - 2.0 * lam),
        0.5 * pi * (tau * (w1 - w0) + 2.0 * lam),
        pi * tau * w0,
        pi * tau * w1,
    ];
    if args.iter().any(|a| a.abs() > 700.0) {
        return Err(Error::Overflow("gamma_factors hyperbolic arguments"));
    }

    let ln_sinh0 = ln_sinh(pi * tau * w0);
    let ln_sinh1 = ln_sinh(pi * tau * w1);
    let ln_ratio = (w0 / w1).ln();
    let ln_g1 = ln_ratio - (1.0 + tau * tau * w1 * w1).ln() + ln_cosh(args[0]) + ln_cosh(args[1])
        - ln_sinh0
        - ln_sinh1;
    let ln_g2 = ln_ratio + ln_cosh(args[2]) + ln_cosh(args[3]) - ln_sinh0 - ln_sinh1;
    if ln_g1 > 700.0 || ln_g2 > 700.0 {
        return Err(Error::Overflow("gamma_factors magnitude"));
    }

    let (a, b, c) = (hp.a, hp.b, hp.c);
    let cab = c - a - b;
    let cross_phase = (log_gamma_complex(cab - 1.0)? - log_gamma_complex(c - a)?
        - log_gamma_complex(c - b)?
        + log_gamma_complex(a)?
        + log_gamma_complex(b)?
        - log_gamma_complex(-cab)?)
    .im;

    Ok(GammaFactors {
        gamma1_sq: ln_g1.exp(),
        gamma2_sq: ln_g2.exp(),
        cross_mag: (0.5 * (ln_g1 + ln_g2)).exp(),
        cross_phase,
    })
}

/// Stirling-based closed-form estimate of the relative phase, transcribed
/// from the asymptotic reduction. Kept as a comparison oracle only; the
/// production phase is the exact log-Gamma combination.
pub fn stirling_cross_phase(hp: &SauterHypParams, pulse: &PulseParams) -> f64 {
    let tau = pulse.tau();
    let (w0, w1, lam) = (hp.omega0, hp.omega1, hp.lambda);
    let tw1 = tau * w1;
    let pi = std::f64::consts::PI;
    let sq = |x: f64| x * x;
    0.25 * (2.0 * pi + 4.0 * tw1 - 4.0 * tw1.atan() - 4.0 * tw1 * (-1.0 + tw1.ln())
        - 4.0 * tw1 * tw1.ln()
        - (2.0 * lam + (w0 - w1) * tau) * (-2.0 + (0.25 + sq(lam + 0.5 * tau * (w0 - w1))).ln())
        + (2.0 * lam + (w1 - w0) * tau) * (-2.0 + (0.25 + sq(lam + 0.5 * tau * (w1 - w0))).ln())
        - (2.0 * lam - (w0 + w1) * tau) * (-2.0 + (0.25 * (1.0 + sq(lam + 0.5 * tau * (w0 - w1)))).ln())
        + (2.0 * lam + (w0 + w1) * tau) * (-2.0 + (0.25 * (1.0 + sq(lam + 0.5 * tau * (w0 + w1)))).ln()))
}

/// Residual occupation at t -> +infinity:
/// f = [cosh(2 pi lambda) + cosh(pi tau (omega1 - omega0))] / (2 sinh(pi tau omega0) sinh(pi tau omega1)).
pub fn asymptotic_distribution(pulse: &PulseParams, p: Momentum) -> Result<f64> {
    let hp = hyp_params(pulse, p)?;
    let tau = pulse.tau();
    let pi = std::f64::consts::PI;
    let ln_num = log_add_exp(
        ln_cosh(2.0 * pi * hp.lambda),
        ln_cosh(pi * tau * (hp.omega1 - hp.omega0)),
    );
    let ln_f = ln_num
        - std::f64::consts::LN_2
        - ln_sinh(pi * tau * hp.omega0)
        - ln_sinh(pi * tau * hp.omega1);
    Ok(ln_f.exp())
}

/// Expansion coefficients evaluated at a given y (> 0.9).
#[derive(Debug, Clone, Copy)]
pub struct ExpansionCoeffs {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub valid_from_y: f64,
}

/// Oscillation model of the first-order coefficient:
/// C1 ~ cos_amp cos(Upsilon) + sin_amp sin(Upsilon) + const,
/// Upsilon = phase + frequency * ln(1-y).
#[derive(Debug, Clone, Copy)]
pub struct OscillationModel {
    pub cos_amp: f64,
    pub sin_amp: f64,
    pub phase: f64,
    pub frequency: f64,
}

impl OscillationModel {
    pub fn amplitude(&self) -> f64 {
        self.cos_amp.hypot(self.sin_amp)
    }
}

/// All y-independent ingredients of the truncated expansion.
#[derive(Debug, Clone, Copy)]
pub struct ExpansionParts {
    /// coefficient of the y^2 channel: 4 nu0 omega1^2 |Gamma2|^2
    pub c0_coef: f64,
    pub c1_cos: f64,
    pub c1_sin: f64,
    pub c1_const: f64,
    pub c2_cos: f64,
    pub c2_sin: f64,
    pub c2_const: f64,
    /// rho, the Upsilon phase offset
    pub phase: f64,
    /// tau * omega1, the Upsilon frequency in ln(1-y)
    pub frequency: f64,
    /// |N|^2 = 1/(2 omega0)
    pub norm_sq: f64,
}

impl ExpansionParts {
    pub fn coeffs_at(&self, y: f64) -> ExpansionCoeffs {
        let u = 1.0 - y;
        let ups = self.phase + self.frequency * u.ln();
        let (s, c) = ups.sin_cos();
        ExpansionCoeffs {
            c0: self.c0_coef * y * y,
            c1: self.c1_const + self.c1_cos * c + self.c1_sin * s,
            c2: self.c2_const + self.c2_cos * c + self.c2_sin * s,
            valid_from_y: 0.9,
        }
    }

    /// Truncated f(p, y) = |N|^2 (C0 + (1-y) C1 + (1-y)^2 C2).
    pub fn truncated_f(&self, y: f64) -> f64 {
        let u = 1.0 - y;
        let k = self.coeffs_at(y);
        self.norm_sq * (k.c0 + u * k.c1 + u * u * k.c2)
    }

    pub fn c1_model(&self) -> OscillationModel {
        OscillationModel {
            cos_amp: self.c1_cos,
            sin_amp: self.c1_sin,
            phase: self.phase,
            frequency: self.frequency,
        }
    }
}

fn taylor_f1(a: Complex64, b: Complex64, g: Complex64) -> Complex64 {
    a * b / g
}

fn taylor_f2(a: Complex64, b: Complex64, g: Complex64) -> Complex64 {
    a * b * (a + 1.0) * (b + 1.0) / (g * (g + 1.0) * 2.0)
}

/// Exact (1-y)-Taylor data of the two branch amplitudes, assembled into the
/// expansion coefficients. The interpretation nu_k = k-th Taylor coefficient
/// of 1/(2 Omega(y)) around y = 1 (so nu0 = 1/(2 omega1)) is enforced by the
/// numeric oracle (`numeric_extraction`).
pub fn expansion_parts(
    pulse: &PulseParams,
    p: Momentum,
    basis: BasisChoice,
) -> Result<ExpansionParts> {
    if basis.omega_order != 0 {
        return Err(Error::Domain("late-time expansion supports order-0 bases only".into()));
    }
    let hp = hyp_params(pulse, p)?;
    let gf = gamma_factors(&hp, pulse)?;
    let tau = pulse.tau();
    let s = pulse.charge_sign();
    let e0 = pulse.e0();
    let (w0, w1) = (hp.omega0, hp.omega1);
    let eps2 = p.eps_perp_sq();
    let pi1 = p.p_par - s * e0 * tau;

    // omega(u) = w1 + w1_c u + w2_c u^2 near u = 1-y = 0
    let w1_c = 2.0 * s * e0 * tau * pi1 / w1;
    let w2_c = 2.0 * e0 * e0 * tau * tau * eps2 / (w1 * w1 * w1);
    // 1/(2 omega(u)) Taylor
    let nu0 = 1.0 / (2.0 * w1);
    let nu1 = -w1_c / (2.0 * w1 * w1);
    let nu2 = (w1_c * w1_c - w2_c * w1) / (2.0 * w1 * w1 * w1);
    // auxiliary-function Taylor (V = 0 or V = -omega_dot/(2 omega))
    let (v1, v2) = match basis.v_variant {
        VVariant::Zero => (0.0, 0.0),
        VVariant::NaturalChoice => (
            w1_c / (tau * w1),
            (2.0 * w2_c - w1_c - w1_c * w1_c / w1) / (tau * w1),
        ),
    };
    // q(u) = i(Omega - omega_bar) - V = q1 u + q2 u^2
    let q1 = Complex64::new(-v1, w1_c + w1 - w0);
    let q2 = Complex64::new(-v2, w2_c);

    let (a, b, c) = (hp.a, hp.b, hp.c);
    let cab = c - a - b; // = -i tau omega1
    let g_a = a + b - c + 1.0;
    let f_a1 = taylor_f1(a, b, g_a);
    let f_b1 = taylor_f1(c - a, c - b, cab + 1.0);
    let f_a1_shift = taylor_f1(a + 1.0, b + 1.0, g_a + 1.0);
    let f_b1_low = taylor_f1(c - a, c - b, cab);
    let f_b2_low = taylor_f2(c - a, c - b, cab);

    let two_over_tau_ab = a * b * (2.0 / tau);
    let pa1 = two_over_tau_ab + (cab - 1.0) * q1;
    let pa2 = two_over_tau_ab * (f_a1_shift - 1.0) + (cab - 1.0) * (q2 + q1 * f_a1);
    let pb0 = (a + b - c) * (2.0 / tau); // = 2 i omega1
    let pb1 = pb0 * (f_b1_low - 1.0) + q1;
    let pb2 = pb0 * (f_b2_low - f_b1_low) + q2 + q1 * f_b1;

    let x1 = pa1 * pb0.conj();
    let x2 = pa2 * pb0.conj() + pa1 * pb1.conj();

    let g1sq = gf.gamma1_sq;
    let g2sq = gf.gamma2_sq;
    let cross = gf.cross_mag;

    let pb0_sq = pb0.norm_sqr();
    let d0 = nu0 * g2sq * pb0_sq;
    let d1 = nu0 * g2sq * 2.0 * (pb1 * pb0.conj()).re + nu1 * g2sq * pb0_sq;
    let d2 = nu0 * (g1sq * pa1.norm_sqr() + g2sq * (pb1.norm_sqr() + 2.0 * (pb2 * pb0.conj()).re))
        + nu1 * g2sq * 2.0 * (pb1 * pb0.conj()).re
        + nu2 * g2sq * pb0_sq;

    let c0_coef = 4.0 * nu0 * w1 * w1 * g2sq;
    debug_assert!((d0 - c0_coef).abs() <= 1e-12 * c0_coef.abs().max(f64::MIN_POSITIVE));

    Ok(ExpansionParts {
        c0_coef,
        c1_cos: 2.0 * cross * nu0 * x1.re,
        c1_sin: -2.0 * cross * nu0 * x1.im,
        // the y^2 channel contributes -2 c0_coef at order u and +c0_coef at u^2
        c1_const: d1 + 2.0 * c0_coef,
        c2_cos: 2.0 * cross * (nu0 * x2.re + nu1 * x1.re),
        c2_sin: -2.0 * cross * (nu0 * x2.im + nu1 * x1.im),
        c2_const: d2 - c0_coef,
        phase: gf.cross_phase,
        frequency: tau * w1,
        norm_sq: 1.0 / (2.0 * w0),
    })
}

/// Expansion coefficients at y; errors outside the late-time regime y > 0.9.
pub fn expansion_coeffs(
    pulse: &PulseParams,
    p: Momentum,
    y: f64,
    basis: BasisChoice,
) -> Result<ExpansionCoeffs> {
    if y <= 0.9 {
        return Err(Error::Domain(format!(
            "expansion_coeffs is a late-time form, requires y > 0.9, got {y}"
        )));
    }
    Ok(expansion_parts(pulse, p, basis)?.coeffs_at(y))
}

/// Truncated late-time occupation |N|^2 (C0 + u C1 + u^2 C2).
pub fn truncated_distribution(
    pulse: &PulseParams,
    p: Momentum,
    y: f64,
    basis: BasisChoice,
) -> Result<f64> {
    if y <= 0.9 {
        return Err(Error::Domain(format!("truncated form requires y > 0.9, got {y}")));
    }
    Ok(expansion_parts(pulse, p, basis)?.truncated_f(y))
}

/// First-order oscillation model for the longitudinal spectrum (p_perp = 0).
pub fn c1_dominant(pulse: &PulseParams, p: Momentum, basis: BasisChoice) -> Result<OscillationModel> {
    if p.p_perp != 0.0 {
        return Err(Error::Domain("c1_dominant is derived for p_perp = 0".into()));
    }
    Ok(expansion_parts(pulse, p, basis)?.c1_model())
}

/// Fit window in y for the numeric extraction.
pub const FIT_Y_LO: f64 = 0.995;
pub const FIT_Y_HI: f64 = 0.99995;

/// Least-squares extraction of the expansion coefficients from the exact f.
#[derive(Debug, Clone, Copy)]
pub struct LateTimeFit {
    /// fitted coefficient of the y^2 channel (compare 4 nu0 omega1^2 |Gamma2|^2)
    pub constant: f64,
    pub c1_cos: f64,
    pub c1_sin: f64,
    pub c1_const: f64,
    pub c2_cos: f64,
    pub c2_sin: f64,
    pub c2_const: f64,
    pub phase: f64,
    pub frequency: f64,
    pub residual_rms: f64,
    pub n_points: usize,
}

impl LateTimeFit {
    pub fn coeffs_at(&self, y: f64) -> ExpansionCoeffs {
        let u = 1.0 - y;
        let ups = self.phase + self.frequency * u.ln();
        let (s, c) = ups.sin_cos();
        ExpansionCoeffs {
            c0: self.constant * y * y,
            c1: self.c1_const + self.c1_cos * c + self.c1_sin * s,
            c2: self.c2_const + self.c2_cos * c + self.c2_sin * s,
            valid_from_y: FIT_Y_LO,
        }
    }
}

fn fit_window_samples(
    pulse: &PulseParams,
    p: Momentum,
    basis: BasisChoice,
    kappa: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let v_lo = (1.0 - FIT_Y_HI).ln();
    let v_hi = (1.0 - FIT_Y_LO).ln();
    let span = v_hi - v_lo;
    let periods = kappa * span / (2.0 * std::f64::consts::PI);
    if periods < 2.0 {
        return Err(Error::IllConditionedFit(format!(
            "only {periods:.2} oscillation periods inside the fit window"
        )));
    }
    let n = ((16.0 * kappa * span / (2.0 * std::f64::consts::PI)) as usize).clamp(1600, 20_000);
    let hp = hyp_params(pulse, p)?;
    let norm = 2.0 * hp.omega0; // divide out |N|^2
    let mut vs = Vec::with_capacity(n);
    let mut gs = Vec::with_capacity(n);
    for i in 0..n {
        let v = v_lo + span * i as f64 / (n - 1) as f64;
        let u = v.exp();
        let f = distribution_y_form(pulse, p, 1.0 - u, basis)?;
        vs.push(v);
        gs.push(f * norm);
    }
    Ok((vs, gs))
}

fn seven_channels(v: f64, rho: f64, kappa: f64) -> [f64; 7] {
    let u = v.exp();
    let y = 1.0 - u;
    let ups = rho + kappa * v;
    let (s, c) = ups.sin_cos();
    [y * y, u * c, u * s, u, u * u * c, u * u * s, u * u]
}

fn solve_seven_channel(vs: &[f64], gs: &[f64], rho: f64, kappa: f64) -> Result<[f64; 7]> {
    let n = vs.len();
    let mut scale = [0.0f64; 7];
    for &v in vs {
        let row = seven_channels(v, rho, kappa);
        for j in 0..7 {
            scale[j] += row[j] * row[j];
        }
    }
    for sj in &mut scale {
        *sj = (*sj / n as f64).sqrt();
        if *sj == 0.0 || !sj.is_finite() {
            return Err(Error::IllConditionedFit("degenerate basis column".into()));
        }
    }
    let mut ata = DMatrix::<f64>::zeros(7, 7);
    let mut atg = DVector::<f64>::zeros(7);
    for (i, &v) in vs.iter().enumerate() {
        let mut row = seven_channels(v, rho, kappa);
        for j in 0..7 {
            row[j] /= scale[j];
        }
        for j in 0..7 {
            for k in 0..7 {
                ata[(j, k)] += row[j] * row[k];
            }
            atg[j] += row[j] * gs[i];
        }
    }
    let sol = ata
        .lu()
        .solve(&atg)
        .ok_or_else(|| Error::IllConditionedFit("singular normal equations".into()))?;
    let mut coef = [0.0f64; 7];
    for j in 0..7 {
        coef[j] = sol[j] / scale[j];
        if !coef[j].is_finite() {
            return Err(Error::IllConditionedFit("non-finite coefficient".into()));
        }
    }
    Ok(coef)
}

/// Fits g(v) = k0 y^2 + u (a1 cos U + b1 sin U + d1) + u^2 (a2 cos U + b2 sin U + d2)
/// with u = e^v, U = rho + kappa v, against the exact occupation on the
/// window [`FIT_Y_LO`, `FIT_Y_HI`].
pub fn numeric_extraction(
    pulse: &PulseParams,
    p: Momentum,
    basis: BasisChoice,
) -> Result<LateTimeFit> {
    let hp = hyp_params(pulse, p)?;
    let gf = gamma_factors(&hp, pulse)?;
    let kappa = pulse.tau() * hp.omega1;
    let rho = gf.cross_phase;
    let (vs, gs) = fit_window_samples(pulse, p, basis, kappa)?;
    let n = vs.len();

    let coef = solve_seven_channel(&vs, &gs, rho, kappa)?;

    let mut resid_sq = 0.0;
    let mut signal_sq = 0.0;
    for (i, &v) in vs.iter().enumerate() {
        let row = seven_channels(v, rho, kappa);
        let model: f64 = (0..7).map(|j| coef[j] * row[j]).sum();
        resid_sq += (gs[i] - model) * (gs[i] - model);
        signal_sq += gs[i] * gs[i];
    }
    let residual_rms = (resid_sq / signal_sq.max(f64::MIN_POSITIVE)).sqrt();

    Ok(LateTimeFit {
        constant: coef[0],
        c1_cos: coef[1],
        c1_sin: coef[2],
        c1_const: coef[3],
        c2_cos: coef[4],
        c2_sin: coef[5],
        c2_const: coef[6],
        phase: rho,
        frequency: kappa,
        residual_rms,
        n_points: n,
    })
}

/// Oscillation frequency of the exact f in the variable ln(1-y), extracted
/// from zero crossings of the detrended signal. Should equal tau * omega1.
pub fn oscillation_frequency(pulse: &PulseParams, p: Momentum, basis: BasisChoice) -> Result<f64> {
    let hp = hyp_params(pulse, p)?;
    let kappa_hint = pulse.tau() * hp.omega1;
    let (vs, gs) = fit_window_samples(pulse, p, basis, kappa_hint)?;
    let n = vs.len();

    // detrend with the non-oscillatory channels of the full fit (fitting
    // only {y^2, u, u^2} against a signal whose oscillation reaches ~60% of
    // the total at the wide end would poison the trend and scramble the
    // small-amplitude crossings at the narrow end); the crossings remain an
    // independent frequency measurement
    let hp2 = hyp_params(pulse, p)?;
    let rho = gamma_factors(&hp2, pulse)?.cross_phase;
    let coef = solve_seven_channel(&vs, &gs, rho, kappa_hint)?;
    let resid: Vec<f64> = (0..n)
        .map(|i| {
            let u = vs[i].exp();
            let y = 1.0 - u;
            gs[i] - (coef[0] * y * y + coef[3] * u + coef[6] * u * u)
        })
        .collect();

    // linear-interpolated zero crossings
    let mut crossings = Vec::new();
    for i in 1..n {
        if resid[i - 1] == 0.0 {
            continue;
        }
        if resid[i - 1].signum() != resid[i].signum() {
            let frac = resid[i - 1] / (resid[i - 1] - resid[i]);
            crossings.push(vs[i - 1] + frac * (vs[i] - vs[i - 1]));
        }
    }
    if crossings.len() < 10 {
        return Err(Error::IllConditionedFit(format!(
            "only {} zero crossings in the fit window",
            crossings.len()
        )));
    }
    // crossing k sits at total phase k pi up to a slow drift from the
    // u^2-channel mixing, which advances like e^v across the window; fit
    // k pi = a + freq v + c e^v and report the v-linear rate
    let m = crossings.len();
    let mut a3 = DMatrix::<f64>::zeros(3, 3);
    let mut b3 = DVector::<f64>::zeros(3);
    for (k, &v) in crossings.iter().enumerate() {
        let row = [1.0, v, v.exp()];
        let target = std::f64::consts::PI * k as f64;
        for j in 0..3 {
            for l in 0..3 {
                a3[(j, l)] += row[j] * row[l];
            }
            b3[j] += row[j] * target;
        }
    }
    let sol = a3
        .lu()
        .solve(&b3)
        .ok_or_else(|| Error::IllConditionedFit(format!("degenerate crossing fit ({m} crossings)")))?;
    Ok(sol[1].abs())
}
