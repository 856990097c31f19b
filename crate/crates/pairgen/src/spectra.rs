//! Longitudinal momentum spectra and their temporal analysis: sweep
//! assembly, quasiparticle/transient/residual stage boundaries, the three
//! spectral stage times (central-peak formation, dominance, disappearance of
//! oscillation), normalization and the scaled-time overlap comparison
//! between the two adiabatic bases.

use rayon::prelude::*;
use serde::Serialize;

use crate::adiabatic::BasisChoice;
use crate::bogoliubov::{distribution, distribution_series, DistributionSample, Solver};
use crate::error::{Error, Result};
use crate::field::{Momentum, PulseParams};

/// Sampled f over a longitudinal momentum grid at a fixed time.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRecord {
    pub p_grid: Vec<f64>,
    pub f_values: Vec<f64>,
    pub t: f64,
    pub basis: BasisChoice,
    pub pulse: PulseParams,
    /// points where the evaluation failed (stored as NaN in `f_values`)
    pub missing: usize,
}

/// Detected stage times; a `None` flags a failed detection.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StageTimes {
    pub t_cp: Option<f64>,
    pub t_dom: Option<f64>,
    pub t_dis: Option<f64>,
}

/// Half-width (in samples) of the strict-dominance window for a local
/// maximum: 0.05 momentum units on either side.
pub fn dominance_half_width(dp: f64) -> usize {
    ((0.05 / dp).round() as usize).max(1)
}

/// f(p_par, t) over a grid at p_perp = 0, exact solver, parallel over the
/// grid. Failed points are recorded as NaN and counted.
pub fn lms_sweep(
    pulse: &PulseParams,
    t: f64,
    basis: BasisChoice,
    p_grid: &[f64],
) -> Result<SpectrumRecord> {
    if p_grid.len() < 2 {
        return Err(Error::InvalidConfig("momentum grid needs at least 2 points".into()));
    }
    if p_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("momentum grid must be strictly increasing".into()));
    }
    let f_values: Vec<f64> = p_grid
        .par_iter()
        .map(|&pp| {
            distribution(pulse, Momentum::longitudinal(pp), t, basis, Solver::Exact)
                .map(|s| s.f)
                .unwrap_or(f64::NAN)
        })
        .collect();
    let missing = f_values.iter().filter(|v| v.is_nan()).count();
    Ok(SpectrumRecord { p_grid: p_grid.to_vec(), f_values, t, basis, pulse: *pulse, missing })
}

/// Indices of strict local maxima (greater than every neighbor within `k`
/// samples on both sides; NaN neighborhoods disqualify).
pub fn local_maxima(values: &[f64], k: usize) -> Vec<usize> {
    let n = values.len();
    let mut out = Vec::new();
    if n < 2 * k + 1 {
        return out;
    }
    'outer: for i in k..n - k {
        let v = values[i];
        if !v.is_finite() {
            continue;
        }
        for d in 1..=k {
            let (a, b) = (values[i - d], values[i + d]);
            if !a.is_finite() || !b.is_finite() || a >= v || b >= v {
                continue 'outer;
            }
        }
        out.push(i);
    }
    out
}

fn local_minima(values: &[f64], k: usize) -> Vec<usize> {
    let neg: Vec<f64> = values.iter().map(|v| -v).collect();
    local_maxima(&neg, k)
}

/// Fringe visibility max (f_hi - f_lo)/(f_hi + f_lo) over adjacent
/// local-extremum pairs inside the window [lo, hi], excluding
/// |p - exclude_center| < exclude_halfwidth. Returns 0 for a smooth profile.
pub fn fringe_contrast(
    p_grid: &[f64],
    values: &[f64],
    lo: f64,
    hi: f64,
    exclude_center: f64,
    exclude_halfwidth: f64,
) -> f64 {
    let dp = p_grid[1] - p_grid[0];
    let k = dominance_half_width(dp);
    let inside = |i: usize| {
        let p = p_grid[i];
        p >= lo && p <= hi && (p - exclude_center).abs() >= exclude_halfwidth
    };
    let mut extrema: Vec<(usize, f64)> = local_maxima(values, k)
        .into_iter()
        .chain(local_minima(values, k))
        .filter(|&i| inside(i) && values[i].is_finite())
        .map(|i| (i, values[i]))
        .collect();
    extrema.sort_by_key(|e| e.0);
    let mut best = 0.0f64;
    for pair in extrema.windows(2) {
        let (a, b) = (pair[0].1, pair[1].1);
        let (hi_v, lo_v) = if a >= b { (a, b) } else { (b, a) };
        if hi_v + lo_v > 0.0 {
            best = best.max((hi_v - lo_v) / (hi_v + lo_v));
        }
    }
    best
}

/// Central-peak stage times from a time-ordered sequence of records:
/// formation (a local maximum exists within |p| < 0.3), dominance (that
/// maximum exceeds every other local maximum) and disappearance of the
/// oscillation (fringe contrast over p in [-1, 1], excluding 0.1 around the
/// central peak, drops below 0.05).
pub fn detect_peak_stages(records: &[SpectrumRecord]) -> Result<StageTimes> {
    if records.len() < 3 {
        return Err(Error::DetectionFailure("need at least 3 records".into()));
    }
    if records.windows(2).any(|w| w[1].t <= w[0].t) {
        return Err(Error::DetectionFailure("records must be time-ordered".into()));
    }
    let mut t_cp = None;
    let mut t_dom = None;
    let mut t_dis = None;
    for rec in records {
        let dp = rec.p_grid[1] - rec.p_grid[0];
        let k = dominance_half_width(dp);
        let maxima = local_maxima(&rec.f_values, k);
        let central = maxima
            .iter()
            .copied()
            .filter(|&i| rec.p_grid[i].abs() < 0.3)
            .max_by(|&a, &b| rec.f_values[a].total_cmp(&rec.f_values[b]));
        let Some(ci) = central else { continue };
        if t_cp.is_none() {
            t_cp = Some(rec.t);
        }
        if t_dom.is_none() {
            let dominant = maxima
                .iter()
                .copied()
                .filter(|&i| rec.p_grid[i].abs() >= 0.3)
                .all(|i| rec.f_values[i] < rec.f_values[ci]);
            if dominant {
                t_dom = Some(rec.t);
            }
        }
        if t_dom.is_some() && t_dis.is_none() && rec.t > t_dom.unwrap() {
            let contrast =
                fringe_contrast(&rec.p_grid, &rec.f_values, -1.0, 1.0, rec.p_grid[ci], 0.1);
            if contrast < 0.05 {
                t_dis = Some(rec.t);
            }
        }
    }
    Ok(StageTimes { t_cp, t_dom, t_dis })
}

/// Transient-stage bounds of an f(t) series: `t_in` is the first crossing of
/// the residual level after the quasiparticle peak, `t_out` the earliest
/// time after which the centered moving average (window tau/2) stays within
/// +-10% of the residual level.
pub fn detect_transient_bounds(
    pulse: &PulseParams,
    series: &[DistributionSample],
) -> Result<(f64, f64)> {
    let n = series.len();
    if n < 10 {
        return Err(Error::DetectionFailure("series too short".into()));
    }
    let fs: Vec<f64> = series.iter().map(|s| s.f).collect();
    let ts: Vec<f64> = series.iter().map(|s| s.t).collect();

    let tail_start = n - (n / 5).max(2);
    let tail = &fs[tail_start..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let var = tail.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / tail.len() as f64;
    let stdev = var.sqrt();
    if stdev > 0.1 * mean || !(mean > 0.0) {
        return Err(Error::NoPlateau { stdev, mean });
    }
    let f_const = mean;

    let dt = (ts[n - 1] - ts[0]) / (n - 1) as f64;
    let half = ((0.25 * pulse.tau() / dt).round() as usize).max(1);
    let smoothed: Vec<f64> = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            fs[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect();

    // earliest index after which the moving average stays inside the band
    let mut out_idx = 0;
    for i in (0..n).rev() {
        if (smoothed[i] - f_const).abs() > 0.1 * f_const {
            out_idx = (i + 1).min(n - 1);
            break;
        }
    }
    let t_out = ts[out_idx];

    let peak = fs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut t_in = t_out;
    for i in peak..n - 1 {
        let (a, b) = (fs[i] - f_const, fs[i + 1] - f_const);
        if a == 0.0 || a.signum() != b.signum() {
            let frac = a / (a - b);
            t_in = ts[i] + frac * (ts[i + 1] - ts[i]);
            break;
        }
    }
    Ok((t_in.min(t_out), t_out))
}

/// Record rescaled by its maximum (max of the output is 1).
pub fn normalized_spectrum(record: &SpectrumRecord) -> Result<SpectrumRecord> {
    let max = record.f_values.iter().copied().filter(|v| v.is_finite()).fold(0.0f64, f64::max);
    if !(max > 0.0) {
        return Err(Error::AllZeroSpectrum);
    }
    let mut out = record.clone();
    for v in &mut out.f_values {
        *v /= max;
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct OverlapEntry {
    pub fraction: f64,
    pub t_choice1: f64,
    pub t_choice2: f64,
    /// rms of the pointwise difference of the normalized spectra
    pub l2_normalized: f64,
    pub max_abs_normalized_diff: f64,
    pub contrast_choice1: f64,
    pub contrast_choice2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OverlapReport {
    pub t_out_choice1: f64,
    pub t_out_choice2: f64,
    pub entries: Vec<OverlapEntry>,
}

/// Compares the two bases' normalized spectra at times scaled by each
/// basis's own end-of-transient t_out (detected at p = 0).
pub fn scaled_time_overlap(
    pulse: &PulseParams,
    fractions: &[f64],
    p_grid: &[f64],
) -> Result<OverlapReport> {
    let tau = pulse.tau();
    let grid: Vec<f64> = {
        let dt = tau / 100.0;
        let n = (11.0 * tau / dt).round() as usize;
        (0..=n).map(|i| -3.0 * tau + i as f64 * dt).collect()
    };
    let p0 = Momentum::longitudinal(0.0);
    let mut t_outs = [0.0f64; 2];
    for (slot, basis) in [BasisChoice::choice1(), BasisChoice::choice2()].iter().enumerate() {
        let series = distribution_series(pulse, p0, &grid, *basis)?;
        let (_, t_out) = detect_transient_bounds(pulse, &series)?;
        t_outs[slot] = t_out;
    }

    let mut entries = Vec::with_capacity(fractions.len());
    for &frac in fractions {
        let t1 = frac * t_outs[0];
        let t2 = frac * t_outs[1];
        let r1 = normalized_spectrum(&lms_sweep(pulse, t1, BasisChoice::choice1(), p_grid)?)?;
        let r2 = normalized_spectrum(&lms_sweep(pulse, t2, BasisChoice::choice2(), p_grid)?)?;
        let mut sq_sum = 0.0;
        let mut max_abs = 0.0f64;
        let mut count = 0usize;
        for (a, b) in r1.f_values.iter().zip(&r2.f_values) {
            if a.is_finite() && b.is_finite() {
                let d = a - b;
                sq_sum += d * d;
                max_abs = max_abs.max(d.abs());
                count += 1;
            }
        }
        if count == 0 {
            return Err(Error::DetectionFailure("no valid overlap points".into()));
        }
        let center1 = peak_position(&r1);
        let center2 = peak_position(&r2);
        entries.push(OverlapEntry {
            fraction: frac,
            t_choice1: t1,
            t_choice2: t2,
            l2_normalized: (sq_sum / count as f64).sqrt(),
            max_abs_normalized_diff: max_abs,
            contrast_choice1: fringe_contrast(&r1.p_grid, &r1.f_values, -1.0, 1.0, center1, 0.1),
            contrast_choice2: fringe_contrast(&r2.p_grid, &r2.f_values, -1.0, 1.0, center2, 0.1),
        });
    }
    Ok(OverlapReport { t_out_choice1: t_outs[0], t_out_choice2: t_outs[1], entries })
}

fn peak_position(rec: &SpectrumRecord) -> f64 {
    rec.f_values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| rec.p_grid[i])
        .unwrap_or(0.0)
}

/// Uniform grid helper (inclusive of both ends up to rounding).
pub fn uniform_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(max > min) {
        return Err(Error::InvalidConfig(format!(
            "grid requires max > min and step > 0, got [{min}, {max}] step {step}"
        )));
    }
    let n = ((max - min) / step).round() as usize;
    if n < 1 {
        return Err(Error::InvalidConfig("grid has fewer than 2 points".into()));
    }
    Ok((0..=n).map(|i| min + step * i as f64).collect())
}
