//! One-sided cosine spectra of the amplitude-intensity correlation,
//! quadrature variance and zero-delay noise functionals.
//!
//! The positive- and negative-delay halves of `h_phi` carry different
//! information and are transformed separately:
//!
//! ```text
//! S(omega) = 4 gamma_e alpha_ee int_0^inf [h_phi(tau) - 1] cos(omega tau) dtau
//! ```
//!
//! Each numerator is an exponential sum `c_0 + sum_k c_k e^{lambda_k tau}`,
//! so the transform is evaluated exactly as
//! `sum_k c_k (-lambda_k) / (lambda_k^2 + omega^2)`, dropping the
//! stationary term `c_0`. [`quadrature_spectrum`] integrates a sampled
//! series instead and serves as a cross-check.

use crate::analysis::ZeroDelayMoments;
use crate::correlations::{CorrelationSeries, Quadrature, SeriesKind};
use crate::error::{Error, Result};
use crate::liouvillian::{Atom, ExpSum};
use crate::model::{AtomParams, Level, Transition};

/// Largest `|h - 1|` tolerated at the end of a series fed to
/// [`quadrature_spectrum`].
pub const TAIL_TOL: f64 = 1e-4;

/// Symmetric uniform frequency grid `[-omega_max, omega_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    pub omega_max: f64,
    pub values: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(omega_max: f64, n_points: usize) -> Result<Self> {
        if !omega_max.is_finite() || omega_max <= 0.0 {
            return Err(Error::InvalidGrid(format!("omega_max must be positive, got {omega_max}")));
        }
        if n_points < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 frequencies, got {n_points}")));
        }
        let step = 2.0 * omega_max / (n_points - 1) as f64;
        // mirror the lower half so the grid is exactly symmetric
        let mut values = vec![0.0; n_points];
        for i in 0..n_points {
            let j = n_points - 1 - i;
            if i <= j {
                let w = -omega_max + i as f64 * step;
                values[i] = w;
                values[j] = -w;
            }
        }
        if n_points % 2 == 1 {
            values[n_points / 2] = 0.0;
        }
        Ok(FrequencyGrid { omega_max, values })
    }

    pub fn n_points(&self) -> usize {
        self.values.len()
    }
}

impl Default for FrequencyGrid {
    /// 2001 points over `[-5, 5]`.
    fn default() -> Self {
        FrequencyGrid::new(5.0, 2001).expect("static grid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumSide {
    PositiveDelay,
    NegativeDelay,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSeries {
    pub grid: FrequencyGrid,
    pub total: Vec<f64>,
    /// Second-order part. Equal to `total` on the negative-delay side.
    pub s2: Vec<f64>,
    /// Third-order part. Zero on the negative-delay side.
    pub s3: Vec<f64>,
    pub side: SpectrumSide,
    pub transition: Transition,
    pub quadrature: Quadrature,
    pub efficiency_eta: f64,
}

/// Noise at zero delay: `H^(2)`, `H^(3)`, `H^(N)` and the variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseReport {
    pub h2_0: f64,
    pub h3_0: f64,
    pub hn_0: f64,
    pub variance: f64,
}

fn transform(sum: &ExpSum, prefactor: f64, grid: &FrequencyGrid) -> Vec<f64> {
    grid.values
        .iter()
        .map(|&w| prefactor * sum.cosine_transform(w).re)
        .collect()
}

impl Atom {
    /// `4 gamma_e alpha_ee / (alpha_ee alpha_phi)`, the factor turning a
    /// transformed numerator into a spectrum.
    pub fn spectral_prefactor(&self, e: Transition, q: Quadrature) -> Result<f64> {
        let norm = self.aic_normalization(e, q)?;
        Ok(4.0 * e.decay_rate(&self.params) / norm.alpha_phi.unwrap_or(1.0))
    }

    pub fn spectrum_positive_side(&self, e: Transition, q: Quadrature, grid: &FrequencyGrid) -> Result<SpectrumSeries> {
        let pre = self.spectral_prefactor(e, q)?;
        let total = transform(&self.aic_positive_numerator(e, q)?, pre, grid);
        let s2 = transform(&self.h2_numerator(e, q)?, pre, grid);
        let s3 = transform(&self.h3_numerator(e, q)?, pre, grid);
        Ok(SpectrumSeries {
            grid: grid.clone(),
            total,
            s2,
            s3,
            side: SpectrumSide::PositiveDelay,
            transition: e,
            quadrature: q,
            efficiency_eta: 1.0,
        })
    }

    pub fn spectrum_negative_side(&self, e: Transition, q: Quadrature, grid: &FrequencyGrid) -> Result<SpectrumSeries> {
        let pre = self.spectral_prefactor(e, q)?;
        let total = transform(&self.aic_negative_numerator(e, q)?, pre, grid);
        Ok(SpectrumSeries {
            grid: grid.clone(),
            s2: total.clone(),
            s3: vec![0.0; total.len()],
            total,
            side: SpectrumSide::NegativeDelay,
            transition: e,
            quadrature: q,
            efficiency_eta: 1.0,
        })
    }

    /// Normally ordered variance `V_phi = Re[e^{-i phi} <Delta sigma_eg Delta sigma_phi>]`;
    /// negative values mean squeezing.
    pub fn variance(&self, e: Transition, q: Quadrature) -> f64 {
        let m = ZeroDelayMoments::closed_form(&self.steady, e);
        let p = q.phase();
        (p * (m.m_eg_eg * p + m.m_eg_ge * p.conj())).re / 2.0
    }

    pub fn noise_functionals(&self, e: Transition, q: Quadrature) -> NoiseReport {
        let m = ZeroDelayMoments::closed_form(&self.steady, e);
        let p = q.phase();
        let alpha_ge = self.steady.alpha(Level::G, e.level());
        // <Delta sigma_eg Delta sigma_phi> and <Delta sigma_eg Delta sigma_phi Delta sigma_ge>
        let eg_phi = (m.m_eg_eg * p + m.m_eg_ge * p.conj()) * 0.5;
        let eg_phi_ge = (m.m_eg_eg_ge * p + m.m_eg_ge_ge * p.conj()) * 0.5;
        NoiseReport {
            h2_0: 2.0 * (alpha_ge * eg_phi).re,
            h3_0: eg_phi_ge.re,
            hn_0: (p * m.m_eg_ee).re,
            variance: self.variance(e, q),
        }
    }
}

pub fn spectrum_positive_side(
    params: &AtomParams,
    e: Transition,
    q: Quadrature,
    grid: &FrequencyGrid,
) -> Result<SpectrumSeries> {
    Atom::new(*params)?.spectrum_positive_side(e, q, grid)
}

pub fn spectrum_negative_side(
    params: &AtomParams,
    e: Transition,
    q: Quadrature,
    grid: &FrequencyGrid,
) -> Result<SpectrumSeries> {
    Atom::new(*params)?.spectrum_negative_side(e, q, grid)
}

pub fn variance(params: &AtomParams, e: Transition, q: Quadrature) -> Result<f64> {
    Ok(Atom::new(*params)?.variance(e, q))
}

pub fn noise_functionals(params: &AtomParams, e: Transition, q: Quadrature) -> Result<NoiseReport> {
    Ok(Atom::new(*params)?.noise_functionals(e, q))
}

/// Trapezoid rule on a uniform grid.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// `int S(omega) d omega` over the grid of a spectrum.
pub fn integrate(grid: &FrequencyGrid, values: &[f64]) -> f64 {
    trapezoid(&grid.values, values)
}

/// Spectrum of a sampled correlation by trapezoid quadrature over its
/// delay grid, with Richardson extrapolation against the half-resolution
/// rule when the grid allows it. `h - 1` is transformed for the full
/// correlations, `h^(2)` and `h^(3)` as they are.
pub fn quadrature_spectrum(series: &CorrelationSeries, gamma_e: f64, omegas: &[f64]) -> Result<Vec<f64>> {
    let offset = match series.kind {
        SeriesKind::AicPositive | SeriesKind::AicNegative => 1.0,
        SeriesKind::Aic2 | SeriesKind::Aic3 => 0.0,
        SeriesKind::G2 => {
            return Err(Error::WrongSeriesKind {
                found: "G2",
                expected: "an amplitude-intensity series",
            })
        }
    };
    let f: Vec<f64> = series.values.iter().map(|h| h - offset).collect();
    let tail = f.last().copied().unwrap_or(0.0).abs();
    if tail > TAIL_TOL {
        return Err(Error::TailNotConverged { residual: tail });
    }
    let tau = &series.grid.values;
    let pre = 4.0 * gamma_e * series.normalization.alpha_ee;
    let halvable = (tau.len() - 1).is_multiple_of(2) && tau.len() >= 5;
    Ok(omegas
        .iter()
        .map(|&w| {
            let g: Vec<f64> = tau.iter().zip(&f).map(|(t, v)| v * (w * t).cos()).collect();
            let fine = trapezoid(tau, &g);
            let value = if halvable {
                let ct: Vec<f64> = tau.iter().step_by(2).copied().collect();
                let cg: Vec<f64> = g.iter().step_by(2).copied().collect();
                let coarse = trapezoid(&ct, &cg);
                fine + (fine - coarse) / 3.0
            } else {
                fine
            };
            pre * value
        })
        .collect())
}

/// The two-sided exponential transform `int [h(tau) - 1] e^{i omega tau}`
/// of both halves. Its real part is the sum of the two cosine spectra, so
/// the sides cannot be told apart from it. Test-only.
#[cfg(test)]
pub(crate) fn two_sided_transform(atom: &Atom, e: Transition, q: Quadrature, omega: f64) -> Result<crate::model::C64> {
    use crate::model::C64;
    let pos = atom.aic_positive_numerator(e, q)?;
    let neg = atom.aic_negative_numerator(e, q)?;
    let pre = atom.spectral_prefactor(e, q)?;
    // int_0^inf c e^{lambda t} e^{+-i w t} dt = -c / (lambda +- i w)
    let side = |s: &ExpSum, sign: f64| -> C64 {
        s.terms
            .iter()
            .map(|m| -m.coeff / (m.rate + C64::new(0.0, sign * omega)))
            .sum()
    };
    Ok((side(&pos, 1.0) + side(&neg, -1.0)) * pre)
}
