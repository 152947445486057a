//! Zero-delay closed forms, classical-inequality checks and asymmetry
//! measures.

pub mod fit;

use crate::correlations::{CorrelationSeries, SeriesKind};
use crate::error::{Error, Result};
use crate::liouvillian::{Atom, SteadyState};
use crate::model::{AtomParams, AtomicOp, Level, Op3, Transition, C64};

/// Slack applied to every classical bound so that rounding at the boundary
/// is not reported.
pub const VIOLATION_SLACK: f64 = 1e-9;

/// Default `sup |h(tau) - h(-tau)|` below which a correlation is called
/// symmetric.
pub const SYMMETRY_THRESHOLD: f64 = 1e-3;

/// Steady-state moments of the dipole fluctuations `Delta sigma = sigma - alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroDelayMoments {
    /// `<Delta sigma_eg Delta sigma_ge>`
    pub m_eg_ge: C64,
    /// `<Delta sigma_eg Delta sigma_eg>`
    pub m_eg_eg: C64,
    /// `<Delta sigma_eg Delta sigma_ee>`
    pub m_eg_ee: C64,
    /// `<Delta sigma_eg Delta sigma_ge Delta sigma_ge>`
    pub m_eg_ge_ge: C64,
    /// `<Delta sigma_eg Delta sigma_eg Delta sigma_ge>`
    pub m_eg_eg_ge: C64,
}

impl ZeroDelayMoments {
    /// Moments expressed through `alpha_eg` and `alpha_ee` alone.
    pub fn closed_form(steady: &SteadyState, e: Transition) -> Self {
        let a_eg = steady.coherence(e);
        let a_ge = a_eg.conj();
        let a_ee = C64::new(steady.population(e), 0.0);
        let excess = C64::new(a_eg.norm_sqr(), 0.0) - a_ee;
        ZeroDelayMoments {
            m_eg_ge: -excess,
            m_eg_eg: -a_eg * a_eg,
            m_eg_ee: -a_eg * a_ee,
            m_eg_ge_ge: a_ge * excess * 2.0,
            m_eg_eg_ge: a_eg * excess * 2.0,
        }
    }

    /// Moments from explicit products `Tr[Delta A Delta B ... rho]`.
    pub fn direct(rho: &Op3, e: Transition) -> Self {
        let lvl = e.level();
        let d = |j, k| AtomicOp::sigma(j, k).fluctuation(rho).matrix;
        let (eg, ge, ee) = (d(lvl, Level::G), d(Level::G, lvl), d(lvl, lvl));
        let ev = |m: Op3| (m * rho).trace();
        ZeroDelayMoments {
            m_eg_ge: ev(eg * ge),
            m_eg_eg: ev(eg * eg),
            m_eg_ee: ev(eg * ee),
            m_eg_ge_ge: ev(eg * ge * ge),
            m_eg_eg_ge: ev(eg * eg * ge),
        }
    }

    pub fn as_array(&self) -> [C64; 5] {
        [
            self.m_eg_ge,
            self.m_eg_eg,
            self.m_eg_ee,
            self.m_eg_ge_ge,
            self.m_eg_eg_ge,
        ]
    }

    pub fn max_residual(&self, other: &ZeroDelayMoments) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub fn analytic_zero_delay(atom: &Atom, e: Transition) -> ZeroDelayMoments {
    let closed = ZeroDelayMoments::closed_form(&atom.steady, e);
    debug_assert!(closed.max_residual(&ZeroDelayMoments::direct(atom.rho(), e)) < 1e-12);
    closed
}

pub fn analytic_zero_delay_for(params: &AtomParams, e: Transition) -> Result<ZeroDelayMoments> {
    Ok(analytic_zero_delay(&Atom::new(*params)?, e))
}

/// `h^(3)(0) = 2(|alpha_eg|^2 - alpha_ee) / alpha_ee`.
pub fn h3_at_zero(steady: &SteadyState, e: Transition) -> f64 {
    let a_ee = steady.population(e);
    2.0 * (steady.coherence(e).norm_sqr() - a_ee) / a_ee
}

/// Grid points breaking `0 <= h - 1 <= 1` or `|h(tau) - 1| <= |h(0) - 1| <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationReport {
    /// Delays where `h - 1 < 0`.
    pub bound1_lo_violated: Vec<f64>,
    /// Delays where `h - 1 > 1`.
    pub bound1_hi_violated: Vec<f64>,
    /// Delays where `|h(tau) - 1| > |h(0) - 1|`.
    pub bound2_violated: Vec<f64>,
    /// Whether `|h(0) - 1| > 1`.
    pub origin_violated: bool,
    pub max_excess: f64,
}

impl ViolationReport {
    pub fn any(&self) -> bool {
        self.origin_violated
            || !self.bound1_lo_violated.is_empty()
            || !self.bound1_hi_violated.is_empty()
            || !self.bound2_violated.is_empty()
    }
}

pub fn classical_violations(series: &CorrelationSeries) -> Result<ViolationReport> {
    if !matches!(series.kind, SeriesKind::AicPositive | SeriesKind::AicNegative) {
        return Err(Error::WrongSeriesKind {
            found: series.kind.name(),
            expected: "AicPositive or AicNegative",
        });
    }
    let origin = (series.values[0] - 1.0).abs();
    let mut report = ViolationReport {
        bound1_lo_violated: Vec::new(),
        bound1_hi_violated: Vec::new(),
        bound2_violated: Vec::new(),
        origin_violated: origin > 1.0 + VIOLATION_SLACK,
        max_excess: 0.0,
    };
    for (&tau, &h) in series.grid.values.iter().zip(&series.values) {
        let dev = h - 1.0;
        if dev < -VIOLATION_SLACK {
            report.bound1_lo_violated.push(tau);
        }
        if dev > 1.0 + VIOLATION_SLACK {
            report.bound1_hi_violated.push(tau);
        }
        if dev.abs() > origin + VIOLATION_SLACK {
            report.bound2_violated.push(tau);
        }
        report.max_excess = report.max_excess.max(dev.abs());
    }
    Ok(report)
}

/// Difference between the two sides of `h_phi` on a shared `|tau|` grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetryReport {
    pub sup_diff: f64,
    pub l2_diff: f64,
    pub symmetric_flag: bool,
}

pub fn asymmetry(pos: &CorrelationSeries, neg: &CorrelationSeries) -> Result<AsymmetryReport> {
    asymmetry_with_threshold(pos, neg, SYMMETRY_THRESHOLD)
}

pub fn asymmetry_with_threshold(
    pos: &CorrelationSeries,
    neg: &CorrelationSeries,
    threshold: f64,
) -> Result<AsymmetryReport> {
    if pos.grid != neg.grid {
        return Err(Error::GridMismatch("delay grids differ".into()));
    }
    if pos.transition != neg.transition {
        return Err(Error::GridMismatch(format!(
            "transitions differ ({} vs {})",
            pos.transition, neg.transition
        )));
    }
    if pos.quadrature != neg.quadrature {
        return Err(Error::GridMismatch("quadratures differ".into()));
    }
    let n = pos.values.len() as f64;
    let (sup, sq) = pos
        .values
        .iter()
        .zip(&neg.values)
        .map(|(a, b)| (a - b).abs())
        .fold((0.0f64, 0.0f64), |(s, q), d| (s.max(d), q + d * d));
    Ok(AsymmetryReport {
        sup_diff: sup,
        l2_diff: (sq / n).sqrt(),
        symmetric_flag: sup < threshold,
    })
}
