mod common;

use std::f64::consts::FRAC_PI_2;

use common::{correlations, expect, generator, relative_gap, spectrum_by_quadrature, steady_state, M3};
use v3la::correlations::{DelayGrid, Quadrature};
use v3la::model::MaxNorm;
use v3la::spectra::FrequencyGrid;
use v3la::{build_liouvillian, Atom, AtomParams, Transition};

fn detuned() -> Vec<AtomParams> {
    vec![
        AtomParams::resonant(0.1, 0.5, 0.1).with_detunings(0.3, -0.2),
        AtomParams::resonant(0.05, 2.0, 0.3).with_detunings(-1.0, 0.5),
        AtomParams::resonant(0.3, 1.2, 0.8).with_detunings(0.0, 1.5),
    ]
}

#[test]
fn generator_matches_operator_form() {
    for p in detuned() {
        let l = build_liouvillian(&p).unwrap();
        assert!((l.matrix() - generator(&p)).max_norm() < 1e-14);
    }
}

#[test]
fn steady_state_matches_linear_solve() {
    for p in detuned() {
        let atom = Atom::new(p).unwrap();
        let reference: M3 = steady_state(&p);
        assert!((atom.rho() - reference).max_norm() < 1e-10, "{p:?}");
    }
}

#[test]
fn detuned_correlations_match_rk4() {
    let (spacing, n, sub) = (0.05, 401, 10);
    for p in detuned() {
        let atom = Atom::new(p).unwrap();
        let grid = DelayGrid::new(spacing * (n - 1) as f64, n).unwrap();
        let q = Quadrature::OUT_OF_PHASE;
        for (e, strong) in [(Transition::Strong, true), (Transition::Weak, false)] {
            let r = correlations(&p, common::level(strong), FRAC_PI_2, spacing, n, sub);
            let g2 = atom.g2(e, &grid).unwrap();
            let pos = atom.aic_positive(e, q, &grid).unwrap();
            let neg = atom.aic_negative(e, q, &grid).unwrap();
            for i in 0..n {
                assert!(relative_gap(g2.values[i], r.g2[i], r.g2[i].abs()) < 1e-6);
                assert!(relative_gap(pos.values[i], r.h_pos[i], r.h_pos[i].abs()) < 1e-6);
                assert!(relative_gap(neg.values[i], r.h_neg[i], r.h_neg[i].abs()) < 1e-6);
            }
        }
    }
}

#[test]
fn spectra_match_trapezoid_quadrature_at_peak() {
    for omega_s in [0.5, 3.5] {
        let p = AtomParams::resonant(0.1, omega_s, 0.1);
        let atom = Atom::new(p).unwrap();
        let q = Quadrature::OUT_OF_PHASE;
        let grid = FrequencyGrid::default();
        let (spacing, n) = (0.01, 30_001);
        let r = correlations(&p, common::W, FRAC_PI_2, spacing, n, 1);
        let a_ee = expect(&steady_state(&p), common::W, common::W).re;
        for (analytic, h) in [
            (atom.spectrum_positive_side(Transition::Weak, q, &grid).unwrap().total, &r.h_pos),
            (atom.spectrum_negative_side(Transition::Weak, q, &grid).unwrap().total, &r.h_neg),
        ] {
            let (i, peak) = analytic
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .map(|(i, v)| (i, *v))
                .unwrap();
            let numeric = spectrum_by_quadrature(p.gamma_w, a_ee, spacing, h, grid.values[i]);
            assert!((numeric - peak).abs() < 0.01 * peak.abs(), "{numeric} vs {peak}");
        }
    }
}
