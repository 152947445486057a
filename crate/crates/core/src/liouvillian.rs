//! Lindblad generator of the driven V-type atom, its eigendecomposition,
//! propagation and steady state.

use std::sync::OnceLock;

use nalgebra::SVector;

use crate::error::{Error, Result};
use crate::model::{AtomParams, AtomicOp, DensityOp, Level, MaxNorm, Op3, OpVec, SuperOp, Transition, C64};
use crate::superop::{self, trace_functional, trace_with};

/// Eigenvalues closer to zero than this are treated as stationary modes.
pub const NULL_TOL: f64 = 1e-8;

/// Above this right-eigenvector condition number propagation switches to
/// the dense matrix exponential.
pub const MAX_CONDITION: f64 = 1e12;

const MIN_NORMALIZER: f64 = 1e-12;

/// Spectral data of a Liouvillian, `L = R diag(lambda) R^{-1}`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: SVector<C64, 9>,
    pub right: SuperOp,
    pub left: SuperOp,
    pub condition: f64,
    /// Index of the eigenvalue nearest zero.
    pub stationary: usize,
}

#[derive(Debug, Clone)]
struct Decomposition {
    values: SVector<C64, 9>,
    right: SuperOp,
    left: Option<SuperOp>,
    condition: f64,
    stationary: usize,
}

/// `d vec(rho)/dt = L vec(rho)`.
#[derive(Debug)]
pub struct Liouvillian {
    matrix: SuperOp,
    decomposition: OnceLock<Decomposition>,
}

impl Clone for Liouvillian {
    fn clone(&self) -> Self {
        Liouvillian {
            matrix: self.matrix,
            decomposition: self.decomposition.clone(),
        }
    }
}

/// Builds the rotating-frame generator: drive `-i (Omega_e/2)[sigma_eg + sigma_ge, .]`,
/// detuning `-i Delta_e [sigma_ee, .]` and the decay of each excited state
/// into its own reservoir at rate `gamma_e`.
pub fn build_liouvillian(params: &AtomParams) -> Result<Liouvillian> {
    params.validate()?;
    let mut h = Op3::zeros();
    let mut dissipator = SuperOp::zeros();
    for e in Transition::BOTH {
        let (gamma, omega, delta) = e.rates(params);
        let lvl = e.level();
        let up = AtomicOp::sigma(lvl, Level::G).matrix;
        let down = AtomicOp::sigma(Level::G, lvl).matrix;
        let pop = AtomicOp::sigma(lvl, lvl).matrix;
        h += (up + down) * C64::new(omega / 2.0, 0.0) + pop * C64::new(delta, 0.0);
        let jump = superop::sandwich(&down, &up) * C64::new(2.0, 0.0)
            - superop::left(&pop)
            - superop::right(&pop);
        dissipator += jump * C64::new(gamma / 2.0, 0.0);
    }
    let coherent = (superop::left(&h) - superop::right(&h)) * C64::new(0.0, -1.0);
    Ok(Liouvillian::from_matrix(coherent + dissipator))
}

impl Liouvillian {
    pub fn from_matrix(matrix: SuperOp) -> Self {
        Liouvillian {
            matrix,
            decomposition: OnceLock::new(),
        }
    }

    pub fn matrix(&self) -> &SuperOp {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> SVector<C64, 9> {
        self.decomposition().values
    }

    /// Full eigendecomposition; fails when the eigenbasis is too
    /// ill-conditioned to invert reliably.
    pub fn eigen(&self) -> Result<Eigen> {
        let d = self.decomposition();
        match d.left {
            Some(left) if d.condition <= MAX_CONDITION => Ok(Eigen {
                values: d.values,
                right: d.right,
                left,
                condition: d.condition,
                stationary: d.stationary,
            }),
            _ => Err(Error::IllConditionedEigenbasis {
                condition: d.condition,
                limit: MAX_CONDITION,
            }),
        }
    }

    /// Largest entry of `<<I| L`; zero for a trace-preserving generator.
    pub fn trace_residual(&self) -> f64 {
        let id = trace_functional(&Op3::identity());
        (id.transpose() * self.matrix).max_norm()
    }

    /// `e^{L t} x0`, through the eigenbasis when it is well conditioned and
    /// the dense exponential otherwise.
    pub fn evolve(&self, x0: &OpVec, t: f64) -> Result<OpVec> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidGrid(format!("propagation time {t} must be finite and >= 0")));
        }
        if t == 0.0 {
            return Ok(*x0);
        }
        match self.eigen() {
            Ok(eig) => {
                let mut y = eig.left * x0;
                for k in 0..9 {
                    if k != eig.stationary {
                        y[k] *= (eig.values[k] * t).exp();
                    }
                }
                Ok(eig.right * y)
            }
            Err(_) => Ok(self.propagator(t) * x0),
        }
    }

    /// Dense `e^{L t}` by scaling and squaring.
    pub fn propagator(&self, t: f64) -> SuperOp {
        (self.matrix * C64::new(t, 0.0)).exp()
    }

    /// Writes `Tr[O e^{L t} x0]` as a stationary constant plus decaying
    /// exponentials.
    pub fn expansion(&self, observable: &Op3, x0: &OpVec) -> Result<ExpSum> {
        let eig = self.eigen()?;
        let f = trace_functional(observable);
        let row = f.transpose() * eig.right;
        let weights = eig.left * x0;
        let mut terms = Vec::with_capacity(8);
        let mut stationary = C64::new(0.0, 0.0);
        for k in 0..9 {
            let c = row[k] * weights[k];
            if k == eig.stationary {
                stationary = c;
            } else {
                terms.push(Mode {
                    coeff: c,
                    rate: eig.values[k],
                });
            }
        }
        Ok(ExpSum { stationary, terms })
    }

    fn decomposition(&self) -> &Decomposition {
        self.decomposition.get_or_init(|| decompose(&self.matrix))
    }
}

/// One decaying mode `coeff * e^{rate t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub coeff: C64,
    pub rate: C64,
}

/// `f(t) = stationary + sum_k c_k e^{lambda_k t}` with `Re lambda_k < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSum {
    pub stationary: C64,
    pub terms: Vec<Mode>,
}

impl ExpSum {
    pub fn eval(&self, t: f64) -> C64 {
        self.stationary + self.transient(t)
    }

    pub fn transient(&self, t: f64) -> C64 {
        self.terms.iter().map(|m| m.coeff * (m.rate * t).exp()).sum()
    }

    /// `int_0^inf (f(t) - stationary) cos(omega t) dt`.
    pub fn cosine_transform(&self, omega: f64) -> C64 {
        let w2 = C64::new(omega * omega, 0.0);
        self.terms
            .iter()
            .map(|m| -m.coeff * m.rate / (m.rate * m.rate + w2))
            .sum()
    }

    pub fn scale(mut self, factor: C64) -> Self {
        self.stationary *= factor;
        for m in &mut self.terms {
            m.coeff *= factor;
        }
        self
    }

    /// Slowest decay rate among modes with non-negligible weight.
    pub fn slowest_rate(&self, weight_floor: f64) -> Option<f64> {
        self.terms
            .iter()
            .filter(|m| m.coeff.norm() > weight_floor)
            .map(|m| -m.rate.re)
            .min_by(|a, b| a.total_cmp(b))
    }
}

fn decompose(matrix: &SuperOp) -> Decomposition {
    let (q, t) = matrix.clone_owned().schur().unpack();
    let values = t.diagonal();
    let scale = t.max_norm().max(1.0);
    let small = f64::EPSILON * scale;

    // Eigenvectors of the triangular factor by back substitution.
    let mut v = SuperOp::zeros();
    for k in 0..9 {
        let lambda = t[(k, k)];
        v[(k, k)] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for m in (j + 1)..=k {
                acc += t[(j, m)] * v[(m, k)];
            }
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < small {
                denom = C64::new(small, 0.0);
            }
            v[(j, k)] = -acc / denom;
        }
    }
    let mut right = q * v;
    for mut col in right.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col /= C64::new(n, 0.0);
        }
    }

    let sv = right.singular_values();
    let (smax, smin) = sv
        .iter()
        .fold((0.0f64, f64::INFINITY), |(a, b), &s| (a.max(s), b.min(s)));
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let left = right.try_inverse();

    let stationary = (0..9)
        .min_by(|&a, &b| values[a].norm().total_cmp(&values[b].norm()))
        .unwrap_or(0);

    Decomposition {
        values,
        right,
        left,
        condition,
        stationary,
    }
}

/// Stationary density operator together with `alpha_jk = <sigma_jk>`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub rho: DensityOp,
    /// `alpha[(j, k)] = Tr[sigma_jk rho] = <k|rho|j>`.
    pub alpha: Op3,
}

impl SteadyState {
    fn from_rho(rho: DensityOp) -> Self {
        let alpha = rho.matrix().transpose();
        SteadyState { rho, alpha }
    }

    pub fn alpha(&self, j: Level, k: Level) -> C64 {
        self.alpha[(j.index(), k.index())]
    }

    /// `alpha_ee` of the given transition.
    pub fn population(&self, e: Transition) -> f64 {
        self.alpha(e.level(), e.level()).re
    }

    /// `alpha_eg` of the given transition.
    pub fn coherence(&self, e: Transition) -> C64 {
        self.alpha(e.level(), Level::G)
    }

    pub fn vec(&self) -> OpVec {
        superop::vec(self.rho.matrix())
    }
}

/// Null vector of `L`, trace-normalized and symmetrized.
pub fn steady_state(l: &Liouvillian) -> Result<SteadyState> {
    let d = l.decomposition();
    let near_zero = d.values.iter().filter(|z| z.norm() < NULL_TOL).count();
    if near_zero > 1 {
        return Err(Error::DegenerateNullSpace {
            count: near_zero,
            tol: NULL_TOL,
        });
    }
    let nearest = d.values[d.stationary].norm();
    if near_zero == 0 {
        return Err(Error::NoStationaryState {
            nearest,
            tol: NULL_TOL,
        });
    }
    let x = d.right.column(d.stationary).into_owned();
    let m = superop::unvec(&x);
    let tr = m.trace();
    if tr.norm() < MIN_NORMALIZER {
        return Err(Error::NonPhysicalState { trace: tr.norm() });
    }
    let m = m / tr;
    let m = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let rho = DensityOp::new(m).map_err(|_| Error::NonPhysicalState { trace: tr.norm() })?;
    Ok(SteadyState::from_rho(rho))
}

/// The atom with its generator and stationary state, shared by all
/// correlation and spectral computations.
#[derive(Debug, Clone)]
pub struct Atom {
    pub params: AtomParams,
    pub liouvillian: Liouvillian,
    pub steady: SteadyState,
}

impl Atom {
    pub fn new(params: AtomParams) -> Result<Self> {
        let liouvillian = build_liouvillian(&params)?;
        let steady = steady_state(&liouvillian)?;
        Ok(Atom {
            params,
            liouvillian,
            steady,
        })
    }

    pub fn rho(&self) -> &Op3 {
        self.steady.rho.matrix()
    }

    /// `<A(0) B(t) C(0)>` unfolded: `Tr[B e^{L t} (C rho A)]` as an
    /// exponential sum.
    pub fn regression(&self, a: &Op3, b: &Op3, c: &Op3) -> Result<ExpSum> {
        let x0 = superop::vec(&(c * self.rho() * a));
        self.liouvillian.expansion(b, &x0)
    }

    /// `Tr[B e^{L t} (C rho A)]` sampled at the given times; uses the
    /// exponential sum when available, otherwise dense propagation.
    pub fn regression_samples(&self, a: &Op3, b: &Op3, c: &Op3, times: &[f64]) -> Result<Vec<C64>> {
        match self.regression(a, b, c) {
            Ok(sum) => Ok(times.iter().map(|&t| sum.eval(t)).collect()),
            Err(Error::IllConditionedEigenbasis { .. }) => {
                let x0 = superop::vec(&(c * self.rho() * a));
                let f = trace_functional(b);
                times
                    .iter()
                    .map(|&t| self.liouvillian.evolve(&x0, t).map(|x| trace_with(&f, &x)))
                    .collect()
            }
            Err(e) => Err(e),
        }
    }
}
