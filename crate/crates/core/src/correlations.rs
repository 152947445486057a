//! Two-time correlations of the fluorescence by quantum regression.
//!
//! Every correlation has the form `<A(0) B(tau) C(0)> = Tr[B e^{L tau}(C rho A)]`
//! with `rho` the steady state. The numerators are kept as exponential sums
//! over Liouvillian modes; the spectra reuse them.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::liouvillian::{Atom, ExpSum, Mode};
use crate::model::{AtomParams, AtomicOp, Level, Op3, C64};

pub use crate::model::Transition;

const MIN_POPULATION: f64 = 1e-12;
const MIN_QUADRATURE_MEAN: f64 = 1e-12;

/// Local-oscillator phase selecting the measured dipole quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub phi: f64,
}

impl Quadrature {
    pub const IN_PHASE: Quadrature = Quadrature { phi: 0.0 };
    pub const OUT_OF_PHASE: Quadrature = Quadrature { phi: FRAC_PI_2 };

    pub fn new(phi: f64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::InvalidParams {
                name: "phi",
                reason: format!("{phi} is not finite"),
            });
        }
        Ok(Quadrature { phi })
    }

    /// `e^{-i phi}`.
    pub fn phase(&self) -> C64 {
        C64::from_polar(1.0, -self.phi)
    }
}

/// Uniform delays `0 = tau_0 < ... < tau_{n-1} = tau_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayGrid {
    pub tau_max: f64,
    pub values: Vec<f64>,
}

impl DelayGrid {
    pub fn new(tau_max: f64, n_points: usize) -> Result<Self> {
        if !tau_max.is_finite() || tau_max <= 0.0 {
            return Err(Error::InvalidGrid(format!("tau_max must be positive, got {tau_max}")));
        }
        if n_points < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 delays, got {n_points}")));
        }
        let step = tau_max / (n_points - 1) as f64;
        let mut values: Vec<f64> = (0..n_points).map(|i| i as f64 * step).collect();
        values[n_points - 1] = tau_max;
        Ok(DelayGrid { tau_max, values })
    }

    /// 2000 points over `[0, 20]` for the strong transition and `[0, 100]`
    /// for the weak one.
    pub fn default_for(e: Transition) -> Self {
        let tau_max = match e {
            Transition::Strong => 20.0,
            Transition::Weak => 100.0,
        };
        DelayGrid::new(tau_max, 2000).expect("static grid")
    }

    pub fn n_points(&self) -> usize {
        self.values.len()
    }

    pub fn step(&self) -> f64 {
        self.tau_max / (self.values.len() - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    G2,
    AicPositive,
    AicNegative,
    Aic2,
    Aic3,
}

impl SeriesKind {
    pub fn name(self) -> &'static str {
        match self {
            SeriesKind::G2 => "G2",
            SeriesKind::AicPositive => "AicPositive",
            SeriesKind::AicNegative => "AicNegative",
            SeriesKind::Aic2 => "Aic2",
            SeriesKind::Aic3 => "Aic3",
        }
    }
}

/// Denominators applied to a correlation numerator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    pub alpha_ee: f64,
    /// Steady-state quadrature mean; absent for `g2`.
    pub alpha_phi: Option<f64>,
}

impl Normalization {
    pub fn denominator(&self) -> f64 {
        match self.alpha_phi {
            Some(a) => self.alpha_ee * a,
            None => self.alpha_ee * self.alpha_ee,
        }
    }
}

/// Normalized correlation sampled on a delay grid. Negative-delay series
/// are stored as functions of `|tau|`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSeries {
    pub grid: DelayGrid,
    pub values: Vec<f64>,
    pub kind: SeriesKind,
    pub transition: Transition,
    pub quadrature: Option<Quadrature>,
    pub normalization: Normalization,
}

impl CorrelationSeries {
    /// Values multiplied back by the normalization denominator.
    pub fn unnormalized(&self) -> Vec<f64> {
        let d = self.normalization.denominator();
        self.values.iter().map(|v| v * d).collect()
    }
}

fn sigma(j: Level, k: Level) -> Op3 {
    AtomicOp::sigma(j, k).matrix
}

/// `(f + conj f)/2` with `f = factor * sum`, so that `eval` returns
/// `Re[factor * sum(t)]` in its real part.
fn real_part(sum: ExpSum, factor: C64) -> ExpSum {
    let scaled = sum.scale(factor);
    let mut terms = Vec::with_capacity(2 * scaled.terms.len());
    for m in &scaled.terms {
        terms.push(Mode {
            coeff: m.coeff * 0.5,
            rate: m.rate,
        });
        terms.push(Mode {
            coeff: m.coeff.conj() * 0.5,
            rate: m.rate.conj(),
        });
    }
    ExpSum {
        stationary: C64::new(scaled.stationary.re, 0.0),
        terms,
    }
}

impl Atom {
    pub fn check_populated(&self, e: Transition) -> Result<f64> {
        let pop = self.steady.population(e);
        if pop <= MIN_POPULATION {
            return Err(Error::UnpopulatedTransition {
                transition: e,
                population: pop,
            });
        }
        Ok(pop)
    }

    /// `alpha_phi = Re[alpha_eg e^{-i phi}]`.
    pub fn quadrature_mean(&self, e: Transition, q: Quadrature) -> f64 {
        (self.steady.coherence(e) * q.phase()).re
    }

    /// Denominators `alpha_ee alpha_phi` of the amplitude-intensity
    /// correlation, after checking they do not vanish.
    pub fn aic_normalization(&self, e: Transition, q: Quadrature) -> Result<Normalization> {
        let alpha_ee = self.check_populated(e)?;
        let alpha_phi = self.quadrature_mean(e, q);
        if alpha_phi.abs() <= MIN_QUADRATURE_MEAN {
            return Err(Error::DegenerateQuadratureMean {
                phi: q.phi,
                mean: alpha_phi,
            });
        }
        Ok(Normalization {
            alpha_ee,
            alpha_phi: Some(alpha_phi),
        })
    }

    /// Numerator of `g2_ee`: `Tr[sigma_ee e^{L tau}(sigma_ge rho sigma_eg)]`.
    pub fn g2_numerator(&self, e: Transition) -> Result<ExpSum> {
        let lvl = e.level();
        self.regression(&sigma(lvl, Level::G), &sigma(lvl, lvl), &sigma(Level::G, lvl))
    }

    /// Numerator of `h_phi(tau >= 0)`: `Tr[sigma_phi e^{L tau}(sigma_ge rho sigma_eg)]`.
    pub fn aic_positive_numerator(&self, e: Transition, q: Quadrature) -> Result<ExpSum> {
        let lvl = e.level();
        let quad = AtomicOp::quadrature(e, q.phi).matrix;
        let sum = self.regression(&sigma(lvl, Level::G), &quad, &sigma(Level::G, lvl))?;
        Ok(real_part(sum, C64::new(1.0, 0.0)))
    }

    /// Numerator of `h_phi(tau <= 0)` as a function of `|tau|`:
    /// `Re[e^{-i phi} Tr[sigma_ee e^{L|tau|}(rho sigma_eg)]]`.
    pub fn aic_negative_numerator(&self, e: Transition, q: Quadrature) -> Result<ExpSum> {
        let lvl = e.level();
        let sum = self.regression(&sigma(lvl, Level::G), &sigma(lvl, lvl), &Op3::identity())?;
        Ok(real_part(sum, q.phase()))
    }

    /// `<Delta sigma_eg(0) Delta sigma_phi(tau)>`.
    pub fn quadrature_covariance(&self, e: Transition, q: Quadrature) -> Result<ExpSum> {
        let (d_eg, d_phi, _) = self.fluctuations(e, q);
        self.regression(&d_eg, &d_phi, &Op3::identity())
    }

    /// Numerator of `h^(2)`: `2 Re[alpha_ge <Delta sigma_eg(0) Delta sigma_phi(tau)>]`.
    pub fn h2_numerator(&self, e: Transition, q: Quadrature) -> Result<ExpSum> {
        let alpha_ge = self.steady.alpha(Level::G, e.level());
        let cov = self.quadrature_covariance(e, q)?;
        Ok(real_part(cov, alpha_ge * 2.0))
    }

    /// Numerator of `h^(3)`: `<Delta sigma_eg(0) Delta sigma_phi(tau) Delta sigma_ge(0)>`.
    pub fn h3_numerator(&self, e: Transition, q: Quadrature) -> Result<ExpSum> {
        let (d_eg, d_phi, d_ge) = self.fluctuations(e, q);
        let sum = self.regression(&d_eg, &d_phi, &d_ge)?;
        Ok(real_part(sum, C64::new(1.0, 0.0)))
    }

    fn fluctuations(&self, e: Transition, q: Quadrature) -> (Op3, Op3, Op3) {
        let lvl = e.level();
        let rho = self.rho();
        let d_eg = AtomicOp::sigma(lvl, Level::G).fluctuation(rho).matrix;
        let d_ge = AtomicOp::sigma(Level::G, lvl).fluctuation(rho).matrix;
        let d_phi = AtomicOp::quadrature(e, q.phi).fluctuation(rho).matrix;
        (d_eg, d_phi, d_ge)
    }

    /// Samples `Tr[B e^{L tau}(C rho A)]` on the grid, maps each value
    /// through `post` and divides by the normalization.
    fn sample(
        &self,
        ops: (&Op3, &Op3, &Op3),
        post: impl Fn(C64) -> f64,
        grid: &DelayGrid,
        norm: Normalization,
    ) -> Result<Vec<f64>> {
        let d = norm.denominator();
        let raw = self.regression_samples(ops.0, ops.1, ops.2, &grid.values)?;
        Ok(raw.into_iter().map(|z| post(z) / d).collect())
    }

    pub fn g2(&self, e: Transition, grid: &DelayGrid) -> Result<CorrelationSeries> {
        let alpha_ee = self.check_populated(e)?;
        let norm = Normalization {
            alpha_ee,
            alpha_phi: None,
        };
        let lvl = e.level();
        let values = self.sample(
            (&sigma(lvl, Level::G), &sigma(lvl, lvl), &sigma(Level::G, lvl)),
            |z| z.re,
            grid,
            norm,
        )?;
        Ok(CorrelationSeries {
            grid: grid.clone(),
            values,
            kind: SeriesKind::G2,
            transition: e,
            quadrature: None,
            normalization: norm,
        })
    }

    pub fn aic_positive(&self, e: Transition, q: Quadrature, grid: &DelayGrid) -> Result<CorrelationSeries> {
        let norm = self.aic_normalization(e, q)?;
        let lvl = e.level();
        let quad = AtomicOp::quadrature(e, q.phi).matrix;
        let values = self.sample(
            (&sigma(lvl, Level::G), &quad, &sigma(Level::G, lvl)),
            |z| z.re,
            grid,
            norm,
        )?;
        Ok(self.series(grid, values, SeriesKind::AicPositive, e, q, norm))
    }

    pub fn aic_negative(&self, e: Transition, q: Quadrature, grid: &DelayGrid) -> Result<CorrelationSeries> {
        let norm = self.aic_normalization(e, q)?;
        let lvl = e.level();
        let phase = q.phase();
        let values = self.sample(
            (&sigma(lvl, Level::G), &sigma(lvl, lvl), &Op3::identity()),
            |z| (phase * z).re,
            grid,
            norm,
        )?;
        Ok(self.series(grid, values, SeriesKind::AicNegative, e, q, norm))
    }

    /// `(h^(2), h^(3))` on `tau >= 0`.
    pub fn aic_decomposition(
        &self,
        e: Transition,
        q: Quadrature,
        grid: &DelayGrid,
    ) -> Result<(CorrelationSeries, CorrelationSeries)> {
        let norm = self.aic_normalization(e, q)?;
        let alpha_ge = self.steady.alpha(Level::G, e.level());
        let (d_eg, d_phi, d_ge) = self.fluctuations(e, q);
        let id = Op3::identity();
        let h2 = self.sample((&d_eg, &d_phi, &id), |z| 2.0 * (alpha_ge * z).re, grid, norm)?;
        let h3 = self.sample((&d_eg, &d_phi, &d_ge), |z| z.re, grid, norm)?;
        Ok((
            self.series(grid, h2, SeriesKind::Aic2, e, q, norm),
            self.series(grid, h3, SeriesKind::Aic3, e, q, norm),
        ))
    }

    fn series(
        &self,
        grid: &DelayGrid,
        values: Vec<f64>,
        kind: SeriesKind,
        e: Transition,
        q: Quadrature,
        normalization: Normalization,
    ) -> CorrelationSeries {
        CorrelationSeries {
            grid: grid.clone(),
            values,
            kind,
            transition: e,
            quadrature: Some(q),
            normalization,
        }
    }
}

/// `g2_ee(tau)` of a freshly solved atom.
pub fn g2(params: &AtomParams, e: Transition, grid: &DelayGrid) -> Result<CorrelationSeries> {
    Atom::new(*params)?.g2(e, grid)
}

/// `h_phi(tau >= 0)`.
pub fn aic_positive(params: &AtomParams, e: Transition, q: Quadrature, grid: &DelayGrid) -> Result<CorrelationSeries> {
    Atom::new(*params)?.aic_positive(e, q, grid)
}

/// `h_phi(tau <= 0)` indexed by `|tau|`.
pub fn aic_negative(params: &AtomParams, e: Transition, q: Quadrature, grid: &DelayGrid) -> Result<CorrelationSeries> {
    Atom::new(*params)?.aic_negative(e, q, grid)
}

/// `(h^(2), h^(3))` with `h = 1 + h^(2) + h^(3)` on `tau >= 0`.
pub fn aic_decomposition(
    params: &AtomParams,
    e: Transition,
    q: Quadrature,
    grid: &DelayGrid,
) -> Result<(CorrelationSeries, CorrelationSeries)> {
    Atom::new(*params)?.aic_decomposition(e, q, grid)
}
