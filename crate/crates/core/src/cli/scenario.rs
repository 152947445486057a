//! Named computations and their dispatch to the physics modules.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use rayon::prelude::*;

use super::table::OutputTable;
use super::ScenarioError;
use crate::analysis::classical_violations;
use crate::correlations::{CorrelationSeries, DelayGrid, Quadrature};
use crate::spectra::FrequencyGrid;
use crate::{Atom, AtomParams, Error, Transition};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    G2,
    Aic,
    AicDecomposition,
    Spectrum,
    VarianceScan,
    NoiseScan,
}

impl Observable {
    pub const ALL: [Observable; 6] = [
        Observable::G2,
        Observable::Aic,
        Observable::AicDecomposition,
        Observable::Spectrum,
        Observable::VarianceScan,
        Observable::NoiseScan,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Observable::G2 => "g2",
            Observable::Aic => "aic",
            Observable::AicDecomposition => "aic_decomposition",
            Observable::Spectrum => "spectrum",
            Observable::VarianceScan => "variance_scan",
            Observable::NoiseScan => "noise_scan",
        }
    }

    fn is_scan(self) -> bool {
        matches!(self, Observable::VarianceScan | Observable::NoiseScan)
    }
}

impl FromStr for Observable {
    type Err = ScenarioError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Observable::ALL
            .into_iter()
            .find(|o| o.key() == s)
            .ok_or_else(|| ScenarioError::Validation(format!("unknown observable `{s}`")))
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Which transition(s) a scenario reports on. `Both` is only meaningful
/// for `g2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionSel {
    Strong,
    Weak,
    Both,
}

impl TransitionSel {
    fn transitions(self) -> Vec<Transition> {
        match self {
            TransitionSel::Strong => vec![Transition::Strong],
            TransitionSel::Weak => vec![Transition::Weak],
            TransitionSel::Both => Transition::BOTH.to_vec(),
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            TransitionSel::Strong => "strong",
            TransitionSel::Weak => "weak",
            TransitionSel::Both => "both",
        }
    }
}

impl FromStr for TransitionSel {
    type Err = ScenarioError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strong" | "s" => Ok(TransitionSel::Strong),
            "weak" | "w" => Ok(TransitionSel::Weak),
            "both" => Ok(TransitionSel::Both),
            _ => Err(ScenarioError::Validation(format!("unknown transition `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    GammaW,
    OmegaS,
    OmegaW,
    DeltaS,
    DeltaW,
    Phi,
}

impl SweepParam {
    pub const ALL: [SweepParam; 6] = [
        SweepParam::GammaW,
        SweepParam::OmegaS,
        SweepParam::OmegaW,
        SweepParam::DeltaS,
        SweepParam::DeltaW,
        SweepParam::Phi,
    ];

    pub fn key(self) -> &'static str {
        match self {
            SweepParam::GammaW => "gamma_w",
            SweepParam::OmegaS => "omega_s",
            SweepParam::OmegaW => "omega_w",
            SweepParam::DeltaS => "delta_s",
            SweepParam::DeltaW => "delta_w",
            SweepParam::Phi => "phi",
        }
    }

    fn apply(self, s: &mut Scenario, v: f64) {
        match self {
            SweepParam::GammaW => s.params.gamma_w = v,
            SweepParam::OmegaS => s.params.omega_s = v,
            SweepParam::OmegaW => s.params.omega_w = v,
            SweepParam::DeltaS => s.params.delta_s = v,
            SweepParam::DeltaW => s.params.delta_w = v,
            SweepParam::Phi => s.phi = Some(v),
        }
    }
}

impl FromStr for SweepParam {
    type Err = ScenarioError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SweepParam::ALL
            .into_iter()
            .find(|p| p.key() == s)
            .ok_or_else(|| ScenarioError::Validation(format!("cannot sweep `{s}`")))
    }
}

/// `steps` evenly spaced values over `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        let d = (self.max - self.min) / (self.steps - 1) as f64;
        let mut v: Vec<f64> = (0..self.steps).map(|i| self.min + i as f64 * d).collect();
        v[self.steps - 1] = self.max;
        v
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        if !self.min.is_finite() || !self.max.is_finite() || self.max <= self.min {
            return Err(ScenarioError::Validation(format!(
                "sweep range [{}, {}] is empty",
                self.min, self.max
            )));
        }
        if self.steps < 2 {
            return Err(ScenarioError::Validation(format!(
                "sweep needs at least 2 steps, got {}",
                self.steps
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub params: AtomParams,
    pub transition: TransitionSel,
    /// Quadrature angle; `pi / 2` when absent.
    pub phi: Option<f64>,
    pub observable: Observable,
    /// Delay range; per-transition default when absent.
    pub tau_max: Option<f64>,
    pub n_tau: usize,
    pub omega_max: f64,
    pub n_omega: usize,
    pub sweep: Option<Sweep>,
    /// Append classical-inequality flags to `aic` tables.
    pub violation_flags: bool,
}

impl Scenario {
    pub fn new(name: impl Into<String>, params: AtomParams, transition: TransitionSel, observable: Observable) -> Self {
        Scenario {
            name: name.into(),
            params,
            transition,
            phi: None,
            observable,
            tau_max: None,
            n_tau: 2000,
            omega_max: 5.0,
            n_omega: 2001,
            sweep: None,
            violation_flags: false,
        }
    }

    fn with_tau_max(mut self, tau_max: f64) -> Self {
        self.tau_max = Some(tau_max);
        self
    }

    fn with_sweep(mut self, param: SweepParam, min: f64, max: f64, steps: usize) -> Self {
        self.sweep = Some(Sweep { param, min, max, steps });
        self
    }

    pub fn quadrature(&self) -> Result<Quadrature, ScenarioError> {
        Quadrature::new(self.phi.unwrap_or(FRAC_PI_2)).map_err(|e| ScenarioError::Validation(e.to_string()))
    }

    fn single_transition(&self) -> Result<Transition, ScenarioError> {
        match self.transition {
            TransitionSel::Strong => Ok(Transition::Strong),
            TransitionSel::Weak => Ok(Transition::Weak),
            TransitionSel::Both => Err(ScenarioError::Validation(format!(
                "observable `{}` needs a single transition",
                self.observable
            ))),
        }
    }

    pub fn delay_grid(&self, e: Transition) -> Result<DelayGrid, ScenarioError> {
        let tau_max = self.tau_max.unwrap_or_else(|| DelayGrid::default_for(e).tau_max);
        DelayGrid::new(tau_max, self.n_tau).map_err(|e| ScenarioError::Validation(e.to_string()))
    }

    pub fn frequency_grid(&self) -> Result<FrequencyGrid, ScenarioError> {
        FrequencyGrid::new(self.omega_max, self.n_omega).map_err(|e| ScenarioError::Validation(e.to_string()))
    }

    /// Parameter sets this scenario evaluates, after validation.
    fn points(&self) -> Result<Vec<(f64, Scenario)>, ScenarioError> {
        let Some(sweep) = self.sweep else {
            return Ok(Vec::new());
        };
        sweep.validate()?;
        sweep
            .values()
            .into_iter()
            .map(|v| {
                let mut s = self.clone();
                s.sweep = None;
                sweep.param.apply(&mut s, v);
                s.check_params()?;
                Ok((v, s))
            })
            .collect()
    }

    fn check_params(&self) -> Result<(), ScenarioError> {
        if self.params.gamma_s != 1.0 {
            return Err(ScenarioError::Validation("gamma_s is the unit and must equal 1".into()));
        }
        self.params
            .validate()
            .map_err(|e| ScenarioError::Validation(e.to_string()))?;
        self.quadrature()?;
        Ok(())
    }

    /// Checks every input without computing anything.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.name.trim().is_empty() {
            return Err(ScenarioError::Validation("scenario name is empty".into()));
        }
        self.check_params()?;
        if self.observable != Observable::G2 {
            self.single_transition()?;
        }
        if self.observable.is_scan() {
            if self.sweep.is_none() {
                return Err(ScenarioError::Validation(format!(
                    "observable `{}` needs a sweep",
                    self.observable
                )));
            }
            self.points()?;
        } else {
            if self.sweep.is_some() {
                return Err(ScenarioError::Validation(format!(
                    "observable `{}` cannot be swept; use variance_scan or noise_scan",
                    self.observable
                )));
            }
            for e in self.transition.transitions() {
                self.delay_grid(e)?;
            }
            if self.observable == Observable::Spectrum {
                self.frequency_grid()?;
            }
        }
        Ok(())
    }

    /// `(key, value)` pairs describing the scenario, in a fixed order.
    pub fn settings(&self) -> Vec<(String, String)> {
        let p = &self.params;
        let mut out: Vec<(String, String)> = vec![
            ("scenario".into(), self.name.clone()),
            ("observable".into(), self.observable.to_string()),
            ("transition".into(), self.transition.key().into()),
            ("gamma_s".into(), p.gamma_s.to_string()),
            ("gamma_w".into(), p.gamma_w.to_string()),
            ("omega_s".into(), p.omega_s.to_string()),
            ("omega_w".into(), p.omega_w.to_string()),
            ("delta_s".into(), p.delta_s.to_string()),
            ("delta_w".into(), p.delta_w.to_string()),
            ("phi".into(), self.phi.unwrap_or(FRAC_PI_2).to_string()),
        ];
        match self.observable {
            Observable::G2 | Observable::Aic | Observable::AicDecomposition => {
                let tau = match self.tau_max {
                    Some(t) => t.to_string(),
                    None => "default".into(),
                };
                out.push(("tau_max".into(), tau));
                out.push(("n_tau".into(), self.n_tau.to_string()));
            }
            Observable::Spectrum => {
                out.push(("omega_max".into(), self.omega_max.to_string()));
                out.push(("n_omega".into(), self.n_omega.to_string()));
            }
            Observable::VarianceScan | Observable::NoiseScan => {}
        }
        if let Some(sw) = &self.sweep {
            out.push((
                "sweep".into(),
                format!("{} from {} to {} in {} steps", sw.param.key(), sw.min, sw.max, sw.steps),
            ));
        }
        out
    }
}

fn comp(name: &str) -> impl Fn(Error) -> ScenarioError + '_ {
    move |source| match source {
        Error::InvalidParams { .. } | Error::InvalidGrid(_) => ScenarioError::Validation(format!("{name}: {source}")),
        _ => ScenarioError::Computation {
            scenario: name.to_string(),
            source,
        },
    }
}

fn timestamp() -> String {
    let at = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::from_timestamp(secs, 0))
        .unwrap_or_else(Utc::now);
    at.to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Evaluates a scenario into a table with a provenance header.
pub fn run_scenario(s: &Scenario) -> Result<OutputTable, ScenarioError> {
    s.validate()?;
    let mut table = match s.observable {
        Observable::G2 => g2_table(s)?,
        Observable::Aic => aic_table(s)?,
        Observable::AicDecomposition => decomposition_table(s)?,
        Observable::Spectrum => spectrum_table(s)?,
        Observable::VarianceScan | Observable::NoiseScan => scan_table(s)?,
    };
    for (k, v) in s.settings() {
        table.annotate(k, v);
    }
    table.annotate("version", concat!("v3la ", env!("CARGO_PKG_VERSION")));
    table.annotate("timestamp", timestamp());
    Ok(table)
}

fn g2_table(s: &Scenario) -> Result<OutputTable, ScenarioError> {
    let err = comp(&s.name);
    let atom = Atom::new(s.params).map_err(&err)?;
    let transitions = s.transition.transitions();
    let mut headers = vec!["tau".to_string()];
    headers.extend(transitions.iter().map(|e| format!("g2_{}", e.tag())));
    // both columns share the delay axis of the first transition
    let grid = s.delay_grid(transitions[0])?;
    let series: Vec<CorrelationSeries> = transitions
        .iter()
        .map(|&e| atom.g2(e, &grid))
        .collect::<Result<_, _>>()
        .map_err(&err)?;
    let mut table = OutputTable::new(headers)?;
    for (i, &tau) in grid.values.iter().enumerate() {
        let mut row = vec![tau];
        row.extend(series.iter().map(|c| c.values[i]));
        table.push_row(row)?;
    }
    Ok(table)
}

fn flags_at(report: &crate::analysis::ViolationReport, tau: f64) -> [f64; 3] {
    let has = |v: &[f64]| if v.contains(&tau) { 1.0 } else { 0.0 };
    [
        has(&report.bound1_lo_violated),
        has(&report.bound1_hi_violated),
        has(&report.bound2_violated),
    ]
}

/// `h_phi` on `[-tau_max, tau_max]`, negative delays first.
fn aic_table(s: &Scenario) -> Result<OutputTable, ScenarioError> {
    let err = comp(&s.name);
    let e = s.single_transition()?;
    let q = s.quadrature()?;
    let grid = s.delay_grid(e)?;
    let atom = Atom::new(s.params).map_err(&err)?;
    let pos = atom.aic_positive(e, q, &grid).map_err(&err)?;
    let neg = atom.aic_negative(e, q, &grid).map_err(&err)?;
    let mut headers = vec!["tau", "h"];
    let reports = if s.violation_flags {
        headers.extend(["bound1_lo", "bound1_hi", "bound2"]);
        Some((
            classical_violations(&neg).map_err(&err)?,
            classical_violations(&pos).map_err(&err)?,
        ))
    } else {
        None
    };
    let mut table = OutputTable::new(headers)?;
    let n = grid.n_points();
    let rows = (1..n)
        .rev()
        .map(|i| (-grid.values[i], neg.values[i], grid.values[i], true))
        .chain((0..n).map(|i| (grid.values[i], pos.values[i], grid.values[i], false)));
    for (tau, h, abs_tau, negative) in rows {
        let mut row = vec![tau, h];
        if let Some((rn, rp)) = &reports {
            row.extend(flags_at(if negative { rn } else { rp }, abs_tau));
        }
        table.push_row(row)?;
    }
    Ok(table)
}

fn decomposition_table(s: &Scenario) -> Result<OutputTable, ScenarioError> {
    let err = comp(&s.name);
    let e = s.single_transition()?;
    let q = s.quadrature()?;
    let grid = s.delay_grid(e)?;
    let atom = Atom::new(s.params).map_err(&err)?;
    let pos = atom.aic_positive(e, q, &grid).map_err(&err)?;
    let neg = atom.aic_negative(e, q, &grid).map_err(&err)?;
    let (h2, h3) = atom.aic_decomposition(e, q, &grid).map_err(&err)?;
    let mut table = OutputTable::new(["tau", "h_pos", "h_neg", "h2", "h3"])?;
    for (i, &tau) in grid.values.iter().enumerate() {
        table.push_row(vec![tau, pos.values[i], neg.values[i], h2.values[i], h3.values[i]])?;
    }
    Ok(table)
}

fn spectrum_table(s: &Scenario) -> Result<OutputTable, ScenarioError> {
    let err = comp(&s.name);
    let e = s.single_transition()?;
    let q = s.quadrature()?;
    let grid = s.frequency_grid()?;
    let atom = Atom::new(s.params).map_err(&err)?;
    let pos = atom.spectrum_positive_side(e, q, &grid).map_err(&err)?;
    let neg = atom.spectrum_negative_side(e, q, &grid).map_err(&err)?;
    let mut table = OutputTable::new(["omega", "s_neg", "s_pos", "s2", "s3"])?;
    for (i, &w) in grid.values.iter().enumerate() {
        table.push_row(vec![w, neg.total[i], pos.total[i], pos.s2[i], pos.s3[i]])?;
    }
    Ok(table)
}

fn scan_table(s: &Scenario) -> Result<OutputTable, ScenarioError> {
    let sweep = s
        .sweep
        .ok_or_else(|| ScenarioError::Validation("scan without sweep".into()))?;
    let e = s.single_transition()?;
    let points = s.points()?;
    let noise = s.observable == Observable::NoiseScan;
    let rows: Vec<Vec<f64>> = points
        .par_iter()
        .map(|(v, point)| {
            let err = comp(&s.name);
            let atom = Atom::new(point.params).map_err(&err)?;
            let report = atom.noise_functionals(e, point.quadrature()?);
            Ok(if noise {
                vec![*v, report.h2_0, report.h3_0, report.hn_0, report.variance]
            } else {
                vec![*v, report.variance]
            })
        })
        .collect::<Result<_, ScenarioError>>()?;
    let headers: Vec<&str> = if noise {
        vec![sweep.param.key(), "H2", "H3", "HN", "V"]
    } else {
        vec![sweep.param.key(), "V"]
    };
    let mut table = OutputTable::new(headers)?;
    for row in rows {
        table.push_row(row)?;
    }
    Ok(table)
}

/// Number of sweep workers: `V3LA_WORKERS` when set to a positive integer,
/// else the available parallelism.
pub fn worker_count() -> usize {
    std::env::var(super::WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

const FIG8A_SWEEP: (f64, f64, usize) = (0.0, 2.0, 201);
const WEAK_SWEEP: (f64, f64, usize) = (0.0, 0.3, 151);

fn fig2(name: &str, omega_s: f64) -> Scenario {
    Scenario::new(name, AtomParams::resonant(0.1, omega_s, 0.1), TransitionSel::Both, Observable::G2).with_tau_max(20.0)
}

fn aic(name: &str, omega_s: f64, observable: Observable) -> Scenario {
    Scenario::new(name, AtomParams::resonant(0.1, omega_s, 0.1), TransitionSel::Weak, observable)
}

fn fig8a(name: &str, gamma_w: f64, omega_w: f64) -> Scenario {
    let (lo, hi, n) = FIG8A_SWEEP;
    Scenario::new(name, AtomParams::resonant(gamma_w, 0.5, omega_w), TransitionSel::Strong, Observable::VarianceScan)
        .with_sweep(SweepParam::OmegaS, lo, hi, n)
}

fn weak_scan(name: &str, omega_s: f64, observable: Observable) -> Scenario {
    let (lo, hi, n) = WEAK_SWEEP;
    Scenario::new(name, AtomParams::resonant(0.1, omega_s, 0.1), TransitionSel::Weak, observable)
        .with_sweep(SweepParam::OmegaW, lo, hi, n)
}

/// Every shipped preset, in listing order.
pub fn presets() -> Vec<Scenario> {
    vec![
        fig2("fig2a", 0.5),
        fig2("fig2b", 3.5),
        aic("fig4", 0.5, Observable::AicDecomposition),
        aic("fig5", 3.5, Observable::AicDecomposition),
        aic("fig6", 0.5, Observable::Spectrum),
        aic("fig7", 3.5, Observable::Spectrum),
        fig8a("fig8a", 0.01, 0.05),
        fig8a("fig8a-ii", 0.01, 0.1),
        fig8a("fig8a-iii", 0.1, 0.1),
        weak_scan("fig8b", 0.1, Observable::VarianceScan),
        weak_scan("fig8b-ii", 0.2, Observable::VarianceScan),
        weak_scan("fig8b-iii", 0.5, Observable::VarianceScan),
        weak_scan("fig9", 0.1, Observable::NoiseScan),
        weak_scan("fig9-ii", 0.5, Observable::NoiseScan),
        weak_scan("fig9-iii", 0.9, Observable::NoiseScan),
    ]
}

pub fn preset_names() -> Vec<String> {
    presets().into_iter().map(|s| s.name).collect()
}

pub fn preset(name: &str) -> Option<Scenario> {
    presets().into_iter().find(|s| s.name == name)
}
