//! Reference implementations used as oracles: the master equation in
//! operator form, its RK4 integration, a linear-solve steady state and
//! trapezoid quadrature. Nothing here goes through the crate's
//! superoperator or eigendecomposition code.

#![allow(dead_code)]

use nalgebra::{Matrix3, SMatrix, SVector};
use num_complex::Complex64 as C;
use v3la::AtomParams;

pub type M3 = Matrix3<C>;

pub const G: usize = 0;
pub const S: usize = 1;
pub const W: usize = 2;

pub fn level(strong: bool) -> usize {
    if strong {
        S
    } else {
        W
    }
}

pub fn sigma(j: usize, k: usize) -> M3 {
    let mut m = M3::zeros();
    m[(j, k)] = C::new(1.0, 0.0);
    m
}

fn commutator(a: &M3, b: &M3) -> M3 {
    a * b - b * a
}

/// Right-hand side of the master equation.
pub fn lindblad(p: &AtomParams, rho: &M3) -> M3 {
    let mi = C::new(0.0, -1.0);
    let mut out = M3::zeros();
    for (e, gamma, omega, delta) in [
        (S, p.gamma_s, p.omega_s, p.delta_s),
        (W, p.gamma_w, p.omega_w, p.delta_w),
    ] {
        let drive = (sigma(e, G) + sigma(G, e)) * C::new(omega / 2.0, 0.0);
        out += commutator(&drive, rho) * mi;
        out += commutator(&sigma(e, e), rho) * (mi * delta);
        let jump = sigma(G, e) * rho * sigma(e, G) * C::new(2.0, 0.0) - sigma(e, e) * rho - rho * sigma(e, e);
        out += jump * C::new(gamma / 2.0, 0.0);
    }
    out
}

/// Matrix of the master equation in column-stacked coordinates, built by
/// acting on basis operators.
pub fn generator(p: &AtomParams) -> SMatrix<C, 9, 9> {
    let mut m = SMatrix::<C, 9, 9>::zeros();
    for c in 0..3 {
        for r in 0..3 {
            let image = lindblad(p, &sigma(r, c));
            for cc in 0..3 {
                for rr in 0..3 {
                    m[(3 * cc + rr, 3 * c + r)] = image[(rr, cc)];
                }
            }
        }
    }
    m
}

/// Stationary state from `L x = 0` with one row replaced by `Tr x = 1`.
pub fn steady_state(p: &AtomParams) -> M3 {
    let mut a = generator(p);
    let mut b = SVector::<C, 9>::zeros();
    for j in 0..9 {
        a[(0, j)] = C::new(0.0, 0.0);
    }
    for d in 0..3 {
        a[(0, 4 * d)] = C::new(1.0, 0.0);
    }
    b[0] = C::new(1.0, 0.0);
    let x = a.lu().solve(&b).expect("regular system");
    M3::from_fn(|r, c| x[3 * c + r])
}

pub fn rk4_step(p: &AtomParams, x: &M3, dt: f64) -> M3 {
    let h = C::new(dt, 0.0);
    let half = C::new(dt / 2.0, 0.0);
    let k1 = lindblad(p, x);
    let k2 = lindblad(p, &(x + k1 * half));
    let k3 = lindblad(p, &(x + k2 * half));
    let k4 = lindblad(p, &(x + k3 * h));
    x + (k1 + k2 * C::new(2.0, 0.0) + k3 * C::new(2.0, 0.0) + k4) * (h / C::new(6.0, 0.0))
}

/// `Tr[B x(t)]` with `x(0) = x0`, on `t_i = i * spacing`, integrating with
/// `substeps` RK4 steps per interval.
pub fn sample(p: &AtomParams, x0: &M3, b: &M3, spacing: f64, n: usize, substeps: usize) -> Vec<C> {
    let dt = spacing / substeps as f64;
    let mut x = *x0;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            for _ in 0..substeps {
                x = rk4_step(p, &x, dt);
            }
        }
        out.push((b * x).trace());
    }
    out
}

/// `<sigma_jk> = <k|rho|j>`.
pub fn expect(rho: &M3, j: usize, k: usize) -> C {
    rho[(k, j)]
}

pub fn quadrature(e: usize, phi: f64) -> M3 {
    let p = C::from_polar(1.0, -phi);
    (sigma(e, G) * p + sigma(G, e) * p.conj()) * C::new(0.5, 0.0)
}

/// Mean dipole quadrature `Re[alpha_eg e^{-i phi}]`.
pub fn alpha_phi(rho: &M3, e: usize, phi: f64) -> f64 {
    (expect(rho, e, G) * C::from_polar(1.0, -phi)).re
}

/// Reference `g2`, `h(tau >= 0)` and `h(tau <= 0)` sampled by RK4.
pub struct Reference {
    pub g2: Vec<f64>,
    pub h_pos: Vec<f64>,
    pub h_neg: Vec<f64>,
}

pub fn correlations(p: &AtomParams, e: usize, phi: f64, spacing: f64, n: usize, substeps: usize) -> Reference {
    let rho = steady_state(p);
    let a_ee = expect(&rho, e, e).re;
    let a_phi = alpha_phi(&rho, e, phi);
    let shelved = sigma(G, e) * rho * sigma(e, G);
    let g2 = sample(p, &shelved, &sigma(e, e), spacing, n, substeps)
        .into_iter()
        .map(|z| z.re / (a_ee * a_ee))
        .collect();
    let h_pos = sample(p, &shelved, &quadrature(e, phi), spacing, n, substeps)
        .into_iter()
        .map(|z| z.re / (a_ee * a_phi))
        .collect();
    let phase = C::from_polar(1.0, -phi);
    let h_neg = sample(p, &(rho * sigma(e, G)), &sigma(e, e), spacing, n, substeps)
        .into_iter()
        .map(|z| (phase * z).re / (a_ee * a_phi))
        .collect();
    Reference { g2, h_pos, h_neg }
}

pub fn trapezoid(dx: f64, y: &[f64]) -> f64 {
    let inner: f64 = y[1..y.len() - 1].iter().sum();
    dx * (inner + 0.5 * (y[0] + y[y.len() - 1]))
}

/// `4 gamma_e alpha_ee * int_0^T (h - 1) cos(omega tau) dtau` by the
/// trapezoid rule on uniformly sampled `h`.
pub fn spectrum_by_quadrature(gamma_e: f64, a_ee: f64, spacing: f64, h: &[f64], omega: f64) -> f64 {
    let y: Vec<f64> = h
        .iter()
        .enumerate()
        .map(|(i, v)| (v - 1.0) * (omega * i as f64 * spacing).cos())
        .collect();
    4.0 * gamma_e * a_ee * trapezoid(spacing, &y)
}

pub fn relative_gap(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(1.0)
}
