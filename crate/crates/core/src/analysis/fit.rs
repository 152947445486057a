//! Rate, frequency, peak and width extraction from sampled curves.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Decay rate and angular frequency of a damped oscillation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedOscillation {
    pub frequency: f64,
    pub decay: f64,
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_regression(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Fit(format!("need two or more paired samples, got {}", x.len())));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Rate of `|y| ~ e^{-rate t}` from a log-linear fit over samples with
/// `|y| > floor`.
pub fn exponential_decay(t: &[f64], y: &[f64], floor: f64) -> Result<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = t
        .iter()
        .zip(y)
        .filter(|(_, v)| v.abs() > floor)
        .map(|(a, v)| (*a, v.abs().ln()))
        .unzip();
    let (slope, _) = linear_regression(&xs, &ys)?;
    Ok(-slope)
}

/// Indices of the local maxima of `|y|`.
pub fn envelope_peaks(y: &[f64]) -> Vec<usize> {
    (1..y.len().saturating_sub(1))
        .filter(|&i| {
            let a = y[i].abs();
            a > y[i - 1].abs() && a >= y[i + 1].abs()
        })
        .collect()
}

/// Angular frequency of the dominant spectral line of a uniformly sampled
/// signal, by zero-padded FFT with parabolic refinement of the peak bin.
pub fn dominant_frequency(dt: f64, y: &[f64], min_frequency: f64) -> Result<f64> {
    if y.len() < 4 || !dt.is_finite() || dt <= 0.0 {
        return Err(Error::Fit("signal too short for a frequency estimate".into()));
    }
    let n = (y.len() * 16).next_power_of_two();
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let mut buf: Vec<Complex<f64>> = y.iter().map(|v| Complex::new(v - mean, 0.0)).collect();
    buf.resize(n, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let bin_width = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    let first = ((min_frequency / bin_width).ceil() as usize).max(1);
    let power: Vec<f64> = buf[..n / 2].iter().map(|z| z.norm_sqr()).collect();
    if first + 1 >= power.len() {
        return Err(Error::Fit("minimum frequency above Nyquist".into()));
    }
    let k = (first..power.len() - 1)
        .max_by(|&a, &b| power[a].total_cmp(&power[b]))
        .ok_or_else(|| Error::Fit("empty spectrum".into()))?;
    let offset = if k > first {
        parabolic_offset(power[k - 1], power[k], power[k + 1])
    } else {
        0.0
    };
    Ok((k as f64 + offset) * bin_width)
}

/// Frequency by FFT and decay by log-envelope regression of `y`, the
/// signal minus its asymptote. Envelope peaks smaller than
/// `floor * max|y|` are ignored.
pub fn damped_oscillation(t: &[f64], y: &[f64], floor: f64) -> Result<DampedOscillation> {
    if t.len() != y.len() || t.len() < 4 {
        return Err(Error::Fit("mismatched or short series".into()));
    }
    let dt = t[1] - t[0];
    let frequency = dominant_frequency(dt, y, 0.0)?;
    let peaks = envelope_peaks(y);
    let amax = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (pt, py): (Vec<f64>, Vec<f64>) = peaks
        .into_iter()
        .filter(|&i| y[i].abs() > floor * amax)
        .map(|i| (t[i], y[i]))
        .unzip();
    let decay = exponential_decay(&pt, &py, 0.0)?;
    Ok(DampedOscillation { frequency, decay })
}

fn parabolic_offset(l: f64, c: f64, r: f64) -> f64 {
    let denom = l - 2.0 * c + r;
    if denom == 0.0 {
        0.0
    } else {
        (0.5 * (l - r) / denom).clamp(-0.5, 0.5)
    }
}

/// Location and height of the largest sample of `y` among indices
/// accepted by `mask`, refined by a parabola through its neighbours.
pub fn peak(x: &[f64], y: &[f64], mask: impl Fn(f64) -> bool) -> Option<(f64, f64)> {
    let i = (0..y.len())
        .filter(|&i| mask(x[i]))
        .max_by(|&a, &b| y[a].total_cmp(&y[b]))?;
    if i == 0 || i + 1 == y.len() {
        return Some((x[i], y[i]));
    }
    let off = parabolic_offset(y[i - 1], y[i], y[i + 1]);
    let dx = x[i + 1] - x[i];
    let height = y[i] - 0.25 * (y[i - 1] - y[i + 1]) * off;
    Some((x[i] + off * dx, height))
}

/// Half width at half maximum of the peak at index `center`, from linear
/// interpolation of the half-height crossings on both sides. One-sided
/// when the curve never drops below half height on one side.
pub fn hwhm(x: &[f64], y: &[f64], center: usize) -> Option<f64> {
    let half = 0.5 * y[center];
    let cross = |i: usize, j: usize| x[i] + (half - y[i]) * (x[j] - x[i]) / (y[j] - y[i]);
    let right = (center..y.len() - 1)
        .find(|&i| y[i + 1] <= half)
        .map(|i| cross(i, i + 1) - x[center]);
    let left = (1..=center)
        .rev()
        .find(|&i| y[i - 1] <= half)
        .map(|i| x[center] - cross(i, i - 1));
    match (left, right) {
        (Some(l), Some(r)) => Some(0.5 * (l + r)),
        (Some(w), None) | (None, Some(w)) => Some(w),
        (None, None) => None,
    }
}
