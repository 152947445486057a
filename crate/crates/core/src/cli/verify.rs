//! Identity suite run by `v3la verify`.
//!
//! Every check compares two independently computed quantities over a set of
//! parameter cases (the presets plus seeded random atoms) and reports the
//! worst residual against a fixed tolerance.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::scenario::presets;
use super::table::OutputTable;
use crate::analysis::{h3_at_zero, ZeroDelayMoments};
use crate::correlations::Quadrature;
use crate::model::MaxNorm;
use crate::{build_liouvillian, steady_state, Atom, AtomParams, Liouvillian, Transition};

pub const RANDOM_SETS: usize = 20;
pub const RANDOM_SEED: u64 = 0x5eed_3a1a;

/// `|alpha_phi|` below which normalized checks are skipped for a case.
const MIN_QUADRATURE_MEAN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    /// Case with the largest residual.
    pub worst_case: String,
}

impl CheckResult {
    fn new(name: &'static str, tolerance: f64) -> Self {
        CheckResult {
            name,
            cases: 0,
            max_residual: 0.0,
            tolerance,
            worst_case: String::new(),
        }
    }

    fn record(&mut self, case: &str, residual: f64) {
        self.cases += 1;
        // a NaN residual is sticky and counts as the worst
        if self.max_residual.is_nan() {
            return;
        }
        if self.cases == 1 || residual.is_nan() || residual > self.max_residual {
            self.max_residual = residual;
            self.worst_case = case.to_string();
        }
    }

    pub fn passed(&self) -> bool {
        self.cases > 0 && self.max_residual <= self.tolerance
    }
}

/// Named parameter sets: preset bases, then seeded random atoms.
pub fn parameter_cases() -> Vec<(String, AtomParams)> {
    let mut cases: Vec<(String, AtomParams)> = presets().into_iter().map(|s| (s.name, s.params)).collect();
    cases.extend(random_params(RANDOM_SETS, RANDOM_SEED));
    cases
}

/// Random atoms with `0.01 <= gamma_w <= 1`, `0.05 <= Omega <= 4` and
/// `|Delta| <= 2`.
pub fn random_params(n: usize, seed: u64) -> Vec<(String, AtomParams)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let gamma_w = 10f64.powf(rng.random_range(-2.0..=0.0));
            let p = AtomParams::resonant(gamma_w, rng.random_range(0.05..=4.0), rng.random_range(0.05..=4.0))
                .with_detunings(rng.random_range(-2.0..=2.0), rng.random_range(-2.0..=2.0));
            (format!("random-{i:02}"), p)
        })
        .collect()
}

/// `<<I| L` over the given generators.
pub fn check_trace_preservation<'a>(cases: impl IntoIterator<Item = (&'a str, &'a Liouvillian)>) -> CheckResult {
    let mut c = CheckResult::new("trace_preservation", 1e-10);
    for (name, l) in cases {
        c.record(name, l.trace_residual());
    }
    c
}

/// Midpoint rule on the real line after `omega = tan u`.
fn integrate_real_line(f: impl Fn(f64) -> f64, n: usize) -> f64 {
    let du = PI / n as f64;
    (0..n)
        .map(|i| {
            let u = -FRAC_PI_2 + (i as f64 + 0.5) * du;
            let c = u.cos();
            f(u.tan()) / (c * c)
        })
        .sum::<f64>()
        * du
}

struct Suite {
    checks: Vec<CheckResult>,
}

impl Suite {
    fn get(&mut self, name: &'static str, tolerance: f64) -> &mut CheckResult {
        if let Some(i) = self.checks.iter().position(|c| c.name == name) {
            return &mut self.checks[i];
        }
        self.checks.push(CheckResult::new(name, tolerance));
        self.checks.last_mut().expect("just pushed")
    }

    fn fail(&mut self, name: &'static str, tolerance: f64, case: &str) {
        self.get(name, tolerance).record(case, f64::NAN);
    }

    fn atom_checks(&mut self, case: &str, atom: &Atom, resonant: bool) {
        let residual = (atom.liouvillian.matrix() * atom.steady.vec()).max_norm();
        self.get("steady_state_fixed_point", 1e-10).record(case, residual);
        for e in Transition::BOTH {
            let tagged = format!("{case}/{}", e.tag());
            let closed = ZeroDelayMoments::closed_form(&atom.steady, e);
            let direct = ZeroDelayMoments::direct(atom.rho(), e);
            self.get("appendix_moments", 1e-12).record(&tagged, closed.max_residual(&direct));
            self.transition_checks(&tagged, atom, e, resonant);
        }
    }

    fn transition_checks(&mut self, case: &str, atom: &Atom, e: Transition, resonant: bool) {
        let a_ee = atom.steady.population(e);
        if a_ee < 1e-9 {
            return;
        }
        match atom.g2_numerator(e) {
            Ok(g) => self.get("g2_zero", 1e-12).record(case, g.eval(0.0).re.abs() / (a_ee * a_ee)),
            Err(_) => self.fail("g2_zero", 1e-12, case),
        }
        let q = Quadrature::OUT_OF_PHASE;
        if atom.quadrature_mean(e, q).abs() < MIN_QUADRATURE_MEAN {
            return;
        }
        if let Err(err) = self.aic_checks(case, atom, e, q, resonant) {
            log::warn!("{case}: {err}");
            self.fail("aic_zero", 1e-10, case);
        }
    }

    fn aic_checks(&mut self, case: &str, atom: &Atom, e: Transition, q: Quadrature, resonant: bool) -> crate::Result<()> {
        let denom = atom.aic_normalization(e, q)?.denominator();
        let a_ee = atom.steady.population(e);
        let a_phi = atom.quadrature_mean(e, q);
        let pos = atom.aic_positive_numerator(e, q)?;
        let neg = atom.aic_negative_numerator(e, q)?;
        let h2 = atom.h2_numerator(e, q)?;
        let h3 = atom.h3_numerator(e, q)?;

        let h_pos0 = pos.eval(0.0).re / denom;
        let h_neg0 = neg.eval(0.0).re / denom;
        self.get("aic_zero", 1e-10).record(case, h_pos0.abs().max(h_neg0.abs()));

        let abs2 = atom.steady.coherence(e).norm_sqr();
        let h2_0 = h2.eval(0.0).re / denom;
        let h3_0 = h3.eval(0.0).re / denom;
        let split = (h2_0 - (1.0 - 2.0 * abs2 / a_ee))
            .abs()
            .max((h3_0 - h3_at_zero(&atom.steady, e)).abs());
        self.get("h3_zero_identity", 1e-10).record(case, split);

        let slow = e.decay_rate(&atom.params).min(atom.params.gamma_w);
        let closure = (0..=400)
            .map(|i| {
                let t = i as f64 * 0.05 / slow;
                let h = pos.eval(t).re / denom;
                (1.0 + h2.eval(t).re / denom + h3.eval(t).re / denom - h).abs()
            })
            .fold(0.0, f64::max);
        self.get("decomposition_closure", 1e-8).record(case, closure);

        let noise = atom.noise_functionals(e, q);
        let identity = (noise.hn_0 - noise.h2_0 - noise.h3_0)
            .abs()
            .max((noise.h2_0 - h2.eval(0.0).re).abs())
            .max((noise.h3_0 - h3.eval(0.0).re).abs())
            .max((noise.hn_0 - (neg.eval(0.0).re - denom)).abs());
        self.get("noise_identity", 1e-10).record(case, identity);

        let cov = atom.quadrature_covariance(e, q)?.eval(0.0);
        let v_regressed = (q.phase() * cov).re;
        self.get("variance_consistency", 1e-12)
            .record(case, (noise.variance - v_regressed).abs());

        let pre = atom.spectral_prefactor(e, q)?;
        let integral = integrate_real_line(|w| pre * h2.cosine_transform(w).re, 20_000);
        let expected = 4.0 * PI * e.decay_rate(&atom.params) * noise.h2_0 / a_phi;
        self.get("squeezing_integral", 1e-3)
            .record(case, (integral - expected).abs() / expected.abs().max(1e-12));
        if resonant {
            let via_variance = 8.0 * PI * e.decay_rate(&atom.params) * noise.variance;
            self.get("squeezing_integral_variance", 1e-3)
                .record(case, (integral - via_variance).abs() / via_variance.abs().max(1e-12));
        }
        Ok(())
    }
}

/// Runs the suite on explicit cases.
pub fn run_checks_on(cases: &[(String, AtomParams)]) -> Vec<CheckResult> {
    let mut suite = Suite { checks: Vec::new() };
    let mut generators: Vec<(String, Liouvillian)> = Vec::new();
    for (name, p) in cases {
        let l = match build_liouvillian(p) {
            Ok(l) => l,
            Err(err) => {
                log::warn!("{name}: {err}");
                suite.fail("steady_state_fixed_point", 1e-10, name);
                continue;
            }
        };
        generators.push((name.clone(), l.clone()));
        let atom = steady_state(&l).map(|steady| Atom {
            params: *p,
            liouvillian: l,
            steady,
        });
        match atom {
            Ok(atom) => {
                let resonant = p.delta_s == 0.0 && p.delta_w == 0.0;
                suite.atom_checks(name, &atom, resonant)
            }
            Err(err) => {
                log::warn!("{name}: {err}");
                suite.fail("steady_state_fixed_point", 1e-10, name);
            }
        }
    }
    let trace = check_trace_preservation(generators.iter().map(|(n, l)| (n.as_str(), l)));
    let mut checks = vec![trace];
    checks.extend(suite.checks);
    checks
}

pub fn run_checks() -> Vec<CheckResult> {
    run_checks_on(&parameter_cases())
}

/// Pass/fail table, one row per check.
pub fn checks_table(checks: &[CheckResult]) -> OutputTable {
    let mut t = OutputTable::new(["cases", "max_residual", "tolerance", "pass"])
        .expect("static headers")
        .with_labels("check");
    for c in checks {
        // a NaN residual is reported as +inf in the numeric column
        let shown = if c.max_residual.is_nan() { f64::MAX } else { c.max_residual };
        t.push_labelled(
            c.name,
            vec![c.cases as f64, shown, c.tolerance, if c.passed() { 1.0 } else { 0.0 }],
        )
        .expect("finite row");
    }
    t
}

/// Human-readable lines, one per check.
pub fn render(checks: &[CheckResult]) -> String {
    checks
        .iter()
        .map(|c| {
            format!(
                "{} {:<28} max residual {:.3e} (tol {:.0e}) over {} cases{}\n",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.max_residual,
                c.tolerance,
                c.cases,
                if c.passed() { String::new() } else { format!(", worst: {}", c.worst_case) }
            )
        })
        .collect()
}

/// Full suite over presets and random atoms.
pub fn verify_all() -> OutputTable {
    let checks = run_checks();
    let mut t = checks_table(&checks);
    t.annotate("suite", "identity checks");
    t.annotate("random_sets", RANDOM_SETS.to_string());
    t.annotate("seed", RANDOM_SEED.to_string());
    t.annotate(
        "overall",
        if checks.iter().all(CheckResult::passed) { "pass" } else { "fail" },
    );
    t
}
