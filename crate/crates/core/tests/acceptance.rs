//! Acceptance suite: one PASS/FAIL line per criterion, thresholds fixed.
//! Runs without the libtest harness so that every criterion is evaluated
//! and reported even when an earlier one fails.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use v3la::analysis::fit::{damped_oscillation, hwhm, peak};
use v3la::analysis::{asymmetry, ZeroDelayMoments};
use v3la::cli::{preset, presets, run_scenario, Scenario, TransitionSel};
use v3la::correlations::{DelayGrid, Quadrature};
use v3la::spectra::{trapezoid, FrequencyGrid};
use v3la::{Atom, AtomParams, Level, Transition};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

const PI2: Quadrature = Quadrature::OUT_OF_PHASE;

fn transitions(s: &Scenario) -> Vec<Transition> {
    match s.transition {
        TransitionSel::Strong => vec![Transition::Strong],
        TransitionSel::Weak => vec![Transition::Weak],
        TransitionSel::Both => Transition::BOTH.to_vec(),
    }
}

fn random_atoms(n: usize, seed: u64) -> Vec<AtomParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            AtomParams::resonant(
                10f64.powf(rng.random_range(-2.0..=0.0)),
                rng.random_range(0.05..=4.0),
                rng.random_range(0.05..=4.0),
            )
            .with_detunings(rng.random_range(-2.0..=2.0), rng.random_range(-2.0..=2.0))
        })
        .collect()
}

fn antibunching_zeros() -> Outcome {
    let (mut g2_max, mut h_max) = (0.0f64, 0.0f64);
    let grid = DelayGrid::new(1.0, 2).unwrap();
    for s in presets() {
        let atom = Atom::new(s.params).unwrap();
        for e in transitions(&s) {
            g2_max = g2_max.max(atom.g2(e, &grid).unwrap().values[0].abs());
            if s.transition != TransitionSel::Both {
                let pos = atom.aic_positive(e, PI2, &grid).unwrap().values[0];
                let neg = atom.aic_negative(e, PI2, &grid).unwrap().values[0];
                h_max = h_max.max(pos.abs()).max(neg.abs());
            }
        }
    }
    outcome(
        g2_max < 1e-12 && h_max < 1e-10,
        format!("max g2(0) = {g2_max:.2e} (< 1e-12), max |h(0)| = {h_max:.2e} (< 1e-10) over all presets"),
    )
}

fn appendix_identities() -> Outcome {
    let mut sets: Vec<AtomParams> = presets().into_iter().map(|s| s.params).collect();
    sets.extend(random_atoms(100, 0xacce97));
    let mut worst = 0.0f64;
    for p in &sets {
        let atom = Atom::new(*p).unwrap();
        for e in Transition::BOTH {
            let closed = ZeroDelayMoments::closed_form(&atom.steady, e);
            let direct = ZeroDelayMoments::direct(atom.rho(), e);
            worst = worst.max(closed.max_residual(&direct));
        }
    }
    outcome(
        worst < 1e-12,
        format!("max moment residual {worst:.2e} (< 1e-12) over {} sets, both transitions", sets.len()),
    )
}

fn third_order_zero_delay() -> Outcome {
    let grid = DelayGrid::new(1.0, 2).unwrap();
    let mut worst = 0.0f64;
    let mut sets: Vec<AtomParams> = presets().into_iter().map(|s| s.params).collect();
    sets.extend(random_atoms(20, 0x5ca1e));
    for p in &sets {
        let atom = Atom::new(*p).unwrap();
        for e in Transition::BOTH {
            if atom.quadrature_mean(e, PI2).abs() < 1e-6 {
                continue;
            }
            let (h2, h3) = atom.aic_decomposition(e, PI2, &grid).unwrap();
            let a_ee = atom.steady.population(e);
            let closed = 2.0 * (atom.steady.coherence(e).norm_sqr() - a_ee) / a_ee;
            worst = worst
                .max((h3.values[0] + 1.0 + h2.values[0]).abs())
                .max((h3.values[0] - closed).abs());
        }
    }
    let strong = Atom::new(AtomParams::resonant(0.1, 0.5, 0.1).scale_drive(1000.0)).unwrap();
    let (_, h3) = strong.aic_decomposition(Transition::Weak, PI2, &grid).unwrap();
    let limit = h3.values[0];
    outcome(
        worst < 1e-10 && (limit + 2.0).abs() < 0.05,
        format!("max identity residual {worst:.2e} (< 1e-10); h3(0) at 1000x drive = {limit:.4} (-2 +- 0.05)"),
    )
}

fn decomposition_closure() -> Outcome {
    let mut worst = 0.0f64;
    for name in ["fig4", "fig5"] {
        let t = run_scenario(&preset(name).unwrap()).unwrap();
        let [h, h2, h3] = ["h_pos", "h2", "h3"].map(|c| t.column(c).unwrap());
        for ((h, a), b) in h.iter().zip(&h2).zip(&h3) {
            worst = worst.max((1.0 + a + b - h).abs());
        }
    }
    outcome(worst < 1e-8, format!("max |1 + h2 + h3 - h| = {worst:.2e} (< 1e-8) on fig4, fig5"))
}

fn noise_identity() -> Outcome {
    let mut worst = 0.0f64;
    let mut rows = 0;
    for name in ["fig9", "fig9-ii", "fig9-iii"] {
        let t = run_scenario(&preset(name).unwrap()).unwrap();
        for r in &t.rows {
            worst = worst.max((r[3] - r[1] - r[2]).abs());
            rows += 1;
        }
    }
    outcome(worst < 1e-10, format!("max |HN - H2 - H3| = {worst:.2e} (< 1e-10) over {rows} sweep points"))
}

/// Random atoms are drawn in the resonant regime used throughout, where
/// the mean dipole lies along the `phi = pi/2` quadrature.
fn squeezing_spectrum_relation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5c2);
    let grid = FrequencyGrid::new(2000.0, 400_001).unwrap();
    let mut ratios = Vec::new();
    while ratios.len() < 5 {
        let p = AtomParams::resonant(
            rng.random_range(0.05..=0.5),
            rng.random_range(0.2..=2.0),
            rng.random_range(0.05..=1.0),
        );
        let atom = Atom::new(p).unwrap();
        let e = Transition::Weak;
        let v = atom.variance(e, PI2);
        if v.abs() < 1e-4 {
            continue;
        }
        let s2 = atom.spectrum_positive_side(e, PI2, &grid).unwrap().s2;
        let integral = trapezoid(&grid.values, &s2);
        ratios.push(integral / (4.0 * PI * p.gamma_w * v));
    }
    let worst = ratios.iter().fold(0.0f64, |m, r| m.max((r - 1.0).abs()));
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.4}")).collect();
    outcome(
        worst < 0.01,
        format!("int S2 / (4 pi gamma_w V) = [{}] (1 +- 0.01)", shown.join(", ")),
    )
}

fn asymmetry_and_violation() -> Outcome {
    let atom4 = Atom::new(preset("fig4").unwrap().params).unwrap();
    let grid = DelayGrid::default_for(Transition::Weak);
    let pos = atom4.aic_positive(Transition::Weak, PI2, &grid).unwrap();
    let neg = atom4.aic_negative(Transition::Weak, PI2, &grid).unwrap();
    let sup = asymmetry(&pos, &neg).unwrap().sup_diff;
    let atom5 = Atom::new(preset("fig5").unwrap().params).unwrap();
    let pos5 = atom5.aic_positive(Transition::Weak, PI2, &grid).unwrap();
    let neg5 = atom5.aic_negative(Transition::Weak, PI2, &grid).unwrap();
    let dev = pos5
        .values
        .iter()
        .chain(&neg5.values)
        .fold(0.0f64, |m, h| m.max((h - 1.0).abs()));
    outcome(
        sup > 0.1 && dev > 2.0,
        format!("fig4 sup|h(t) - h(-t)| = {sup:.3} (> 0.1); fig5 max|h - 1| = {dev:.2} (> 2)"),
    )
}

fn strong_g2_dynamics() -> Outcome {
    let t = run_scenario(&preset("fig2b").unwrap()).unwrap();
    let tau = t.column("tau").unwrap();
    let y: Vec<f64> = t.column("g2_ss").unwrap().iter().map(|g| g - 1.0).collect();
    let fit = damped_oscillation(&tau, &y, 1e-3).unwrap();
    let f_ok = (fit.frequency - 3.5).abs() < 0.15 * 3.5;
    let d_ok = (fit.decay - 0.75).abs() < 0.25 * 0.75;
    outcome(
        f_ok && d_ok,
        format!(
            "g2_ss frequency {:.3} (3.5 +- 15%), damping {:.3} (0.75 +- 25%)",
            fit.frequency, fit.decay
        ),
    )
}

fn weak_sub_unity() -> Outcome {
    let t = run_scenario(&preset("fig2b").unwrap()).unwrap();
    let tau = t.column("tau").unwrap();
    let g = t.column("g2_ww").unwrap();
    let window: Vec<f64> = tau
        .iter()
        .zip(&g)
        .filter(|(t, _)| (1.0..=20.0).contains(*t))
        .map(|(_, v)| *v)
        .collect();
    let frac = window.iter().filter(|v| **v < 1.0).count() as f64 / window.len() as f64;
    outcome(frac > 0.5, format!("fraction of g2_ww < 1 on [1, 20] = {frac:.3} (> 0.5)"))
}

fn center_index(omega: &[f64]) -> usize {
    omega.iter().position(|w| *w == 0.0).unwrap()
}

fn spectral_peaks() -> Outcome {
    let t = run_scenario(&preset("fig7").unwrap()).unwrap();
    let omega = t.column("omega").unwrap();
    let abs_pos: Vec<f64> = t.column("s_pos").unwrap().iter().map(|v| v.abs()).collect();
    let (right, _) = peak(&omega, &abs_pos, |w| w > 0.5).unwrap();
    let (left, _) = peak(&omega, &abs_pos, |w| w < -0.5).unwrap();
    let c = center_index(&omega);
    let neg_width = hwhm(&omega, &t.column("s_neg").unwrap(), c);
    let pos_width = hwhm(&omega, &t.column("s_pos").unwrap(), c);
    let gamma_w = 0.1;
    let peaks_ok = (right - 1.75).abs() < 0.3 && (left + 1.75).abs() < 0.3;
    let narrow_ok = neg_width.is_some_and(|w| w > gamma_w / 2.0 && w < 2.0 * gamma_w);
    let absent_ok = pos_width.is_none_or(|w| w > 2.0 * gamma_w);
    outcome(
        peaks_ok && narrow_ok && absent_ok,
        format!(
            "positive-side peaks at {left:.3}, {right:.3} (+-1.75 +- 0.3); central HWHM negative side {:?}, positive side {:?} (gamma_w = 0.1)",
            neg_width.map(|w| (w * 1e3).round() / 1e3),
            pos_width.map(|w| (w * 1e3).round() / 1e3)
        ),
    )
}

fn no_second_order_squeezing() -> Outcome {
    let t = run_scenario(&preset("fig6").unwrap()).unwrap();
    let omega = t.column("omega").unwrap();
    let s2 = t.column("s2").unwrap();
    let s3 = t.column("s3").unwrap();
    let (i2, min2) = s2
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, b), (i, v)| if *v < b { (i, *v) } else { (bi, b) });
    let neg_s3: Vec<f64> = s3.iter().map(|v| -v).collect();
    let (right, r_depth) = peak(&omega, &neg_s3, |w| w > 0.0).unwrap();
    let (left, l_depth) = peak(&omega, &neg_s3, |w| w < 0.0).unwrap();
    let s2_ok = min2 >= -1e-9;
    let s3_ok = r_depth > 0.0 && l_depth > 0.0 && (right - 0.25).abs() < 0.15 && (left + 0.25).abs() < 0.15;
    outcome(
        s2_ok && s3_ok,
        format!(
            "min S2 = {min2:.3e} at omega = {:.3} (>= -1e-9); S3 minima at {left:.3}, {right:.3} (+-0.25 +- 0.15)",
            omega[i2]
        ),
    )
}

fn variance_squeezing_exists() -> Outcome {
    let t = run_scenario(&preset("fig8b").unwrap()).unwrap();
    let (arg, min) = t
        .rows
        .iter()
        .filter(|r| r[0] > 0.0 && r[0] <= 0.3)
        .fold((0.0, f64::INFINITY), |(a, m), r| if r[1] < m { (r[0], r[1]) } else { (a, m) });
    outcome(
        min < 0.0,
        format!("min V = {min:.4e} at omega_w = {arg:.3} (< 0) for omega_s = 0.1, gamma_w = 0.1"),
    )
}

fn oracle_equivalence() -> Outcome {
    let (spacing, n, sub) = (0.05, 401, 10);
    let grid = DelayGrid::new(spacing * (n - 1) as f64, n).unwrap();
    let mut worst = 0.0f64;
    for s in presets() {
        let atom = Atom::new(s.params).unwrap();
        for e in transitions(&s) {
            let r = common::correlations(&s.params, common::level(e == Transition::Strong), FRAC_PI_2, spacing, n, sub);
            let ours = [
                atom.g2(e, &grid).unwrap().values,
                atom.aic_positive(e, PI2, &grid).unwrap().values,
                atom.aic_negative(e, PI2, &grid).unwrap().values,
            ];
            for (mine, theirs) in ours.iter().zip([&r.g2, &r.h_pos, &r.h_neg]) {
                for (a, b) in mine.iter().zip(theirs) {
                    worst = worst.max(common::relative_gap(*a, *b, b.abs()));
                }
            }
        }
    }
    let mut spectrum_worst = 0.0f64;
    for name in ["fig6", "fig7"] {
        let s = preset(name).unwrap();
        let t = run_scenario(&s).unwrap();
        let omega = t.column("omega").unwrap();
        let (dt, m) = (0.01, 30_001);
        let r = common::correlations(&s.params, common::W, FRAC_PI_2, dt, m, 1);
        let a_ee = common::expect(&common::steady_state(&s.params), common::W, common::W).re;
        for (col, h) in [("s_pos", &r.h_pos), ("s_neg", &r.h_neg)] {
            let v = t.column(col).unwrap();
            let i = (0..v.len()).max_by(|a, b| v[*a].abs().total_cmp(&v[*b].abs())).unwrap();
            let numeric = common::spectrum_by_quadrature(s.params.gamma_w, a_ee, dt, h, omega[i]);
            spectrum_worst = spectrum_worst.max((numeric - v[i]).abs() / v[i].abs());
        }
    }
    outcome(
        worst < 1e-6 && spectrum_worst < 0.01,
        format!("max eigen vs RK4 gap {worst:.2e} (< 1e-6 rel) on all presets; spectrum vs quadrature at peak {spectrum_worst:.2e} (< 1%)"),
    )
}

fn limits() -> Outcome {
    let mut worst = 0.0f64;
    for s in presets() {
        let atom = Atom::new(s.params).unwrap();
        let grid = DelayGrid::new(60.0 / s.params.gamma_w, 2).unwrap();
        for e in transitions(&s) {
            worst = worst.max((atom.g2(e, &grid).unwrap().values[1] - 1.0).abs());
            if s.transition != TransitionSel::Both {
                worst = worst
                    .max((atom.aic_positive(e, PI2, &grid).unwrap().values[1] - 1.0).abs())
                    .max((atom.aic_negative(e, PI2, &grid).unwrap().values[1] - 1.0).abs());
            }
        }
    }
    let dark = Atom::new(AtomParams::resonant(0.1, 0.0, 0.0)).unwrap();
    let ground_gap = (dark.steady.alpha(Level::G, Level::G).re - 1.0).abs();
    let mut noise = 0.0f64;
    for e in Transition::BOTH {
        let n = dark.noise_functionals(e, PI2);
        noise = noise.max(n.variance.abs()).max(n.h2_0.abs()).max(n.h3_0.abs()).max(n.hn_0.abs());
    }
    outcome(
        worst < 1e-3 && ground_gap < 1e-12 && noise < 1e-12,
        format!("max |corr(60/gamma_w) - 1| = {worst:.2e} (< 1e-3); undriven: |rho_gg - 1| = {ground_gap:.1e}, max |noise| = {noise:.1e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 14] = [
        ("antibunching zeros", antibunching_zeros),
        ("zero-delay moment identities", appendix_identities),
        ("third-order zero-delay identity", third_order_zero_delay),
        ("decomposition closure", decomposition_closure),
        ("noise identity", noise_identity),
        ("squeezing spectrum vs variance", squeezing_spectrum_relation),
        ("time asymmetry and violation", asymmetry_and_violation),
        ("strong-transition g2 dynamics", strong_g2_dynamics),
        ("weak-transition sub-unity g2", weak_sub_unity),
        ("spectral peaks, strong drive", spectral_peaks),
        ("no second-order squeezing", no_second_order_squeezing),
        ("variance squeezing exists", variance_squeezing_exists),
        ("oracle equivalence", oracle_equivalence),
        ("long-delay and undriven limits", limits),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.pass {
            failed += 1;
        }
        println!(
            "{} [{:02}] {name}: {}",
            if result.pass { "PASS" } else { "FAIL" },
            i + 1,
            result.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
