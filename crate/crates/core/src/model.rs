//! The V-type three-level atom: basis, parameters and operators.
//!
//! A single ground state `|g>` is coupled by two lasers to the excited
//! states `|s>` (fast decay) and `|w>` (slow decay). Each excited state
//! decays to `|g>` through its own reservoir. All rates and frequencies are
//! in units of `gamma_s`, all times in units of `1 / gamma_s`.

use std::fmt;

use log::warn;
use nalgebra::{Matrix3, SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Operator on the three-dimensional atomic Hilbert space.
pub type Op3 = Matrix3<C64>;

/// Superoperator on column-stacked 3x3 operators.
pub type SuperOp = SMatrix<C64, 9, 9>;

/// Column-stacked 3x3 operator.
pub type OpVec = SVector<C64, 9>;

/// Largest entry modulus of a complex matrix or vector.
pub trait MaxNorm {
    fn max_norm(&self) -> f64;
}

impl<R, C, S> MaxNorm for nalgebra::Matrix<C64, R, C, S>
where
    R: nalgebra::Dim,
    C: nalgebra::Dim,
    S: nalgebra::RawStorage<C64, R, C>,
{
    fn max_norm(&self) -> f64 {
        self.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

pub(crate) const HERMITIAN_TOL: f64 = 1e-10;
pub(crate) const TRACE_TOL: f64 = 1e-10;
pub(crate) const PSD_TOL: f64 = 1e-9;

/// Basis states, in matrix order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    G = 0,
    S = 1,
    W = 2,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::G, Level::S, Level::W];

    pub fn index(self) -> usize {
        self as usize
    }

    fn symbol(self) -> char {
        match self {
            Level::G => 'g',
            Level::S => 's',
            Level::W => 'w',
        }
    }
}

/// One of the two dipole transitions sharing the ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transition {
    Strong,
    Weak,
}

impl Transition {
    pub const BOTH: [Transition; 2] = [Transition::Strong, Transition::Weak];

    /// Excited level of this transition.
    pub fn level(self) -> Level {
        match self {
            Transition::Strong => Level::S,
            Transition::Weak => Level::W,
        }
    }

    /// `(gamma_e, omega_e, delta_e)` of this transition.
    pub fn rates(self, params: &AtomParams) -> (f64, f64, f64) {
        match self {
            Transition::Strong => (params.gamma_s, params.omega_s, params.delta_s),
            Transition::Weak => (params.gamma_w, params.omega_w, params.delta_w),
        }
    }

    pub fn decay_rate(self, params: &AtomParams) -> f64 {
        self.rates(params).0
    }

    /// Two-letter tag used in column names: `ss` or `ww`.
    pub fn tag(self) -> &'static str {
        match self {
            Transition::Strong => "ss",
            Transition::Weak => "ww",
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transition::Strong => f.write_str("strong"),
            Transition::Weak => f.write_str("weak"),
        }
    }
}

/// Decay rates, Rabi frequencies and detunings of the driven atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomParams {
    pub gamma_s: f64,
    pub gamma_w: f64,
    pub omega_s: f64,
    pub omega_w: f64,
    pub delta_s: f64,
    pub delta_w: f64,
}

impl AtomParams {
    /// Resonant driving with `gamma_s = 1`.
    pub fn resonant(gamma_w: f64, omega_s: f64, omega_w: f64) -> Self {
        AtomParams {
            gamma_s: 1.0,
            gamma_w,
            omega_s,
            omega_w,
            delta_s: 0.0,
            delta_w: 0.0,
        }
    }

    pub fn with_detunings(mut self, delta_s: f64, delta_w: f64) -> Self {
        self.delta_s = delta_s;
        self.delta_w = delta_w;
        self
    }

    /// Same atom with both Rabi frequencies multiplied by `factor`.
    pub fn scale_drive(mut self, factor: f64) -> Self {
        self.omega_s *= factor;
        self.omega_w *= factor;
        self
    }

    /// Checks the parameter invariants. `gamma_w > gamma_s` only warns, as
    /// it merely swaps the roles of the two transitions.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gamma_s", self.gamma_s),
            ("gamma_w", self.gamma_w),
            ("omega_s", self.omega_s),
            ("omega_w", self.omega_w),
            ("delta_s", self.delta_s),
            ("delta_w", self.delta_w),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidParams {
                    name,
                    reason: format!("{v} is not finite"),
                });
            }
        }
        for (name, v) in [("gamma_s", self.gamma_s), ("gamma_w", self.gamma_w)] {
            if v <= 0.0 {
                return Err(Error::InvalidParams {
                    name,
                    reason: format!("decay rate must be positive, got {v}"),
                });
            }
        }
        for (name, v) in [("omega_s", self.omega_s), ("omega_w", self.omega_w)] {
            if v < 0.0 {
                return Err(Error::InvalidParams {
                    name,
                    reason: format!("Rabi frequency must be non-negative, got {v}"),
                });
            }
        }
        if self.gamma_w > self.gamma_s {
            warn!(
                "gamma_w = {} exceeds gamma_s = {}; the 'weak' transition decays faster",
                self.gamma_w, self.gamma_s
            );
        }
        Ok(())
    }
}

/// Atomic operator in the `{g, s, w}` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicOp {
    pub matrix: Op3,
    pub label: Option<String>,
}

impl AtomicOp {
    pub fn new(matrix: Op3) -> Self {
        AtomicOp {
            matrix,
            label: None,
        }
    }

    /// `sigma_jk = |j><k|`.
    pub fn sigma(j: Level, k: Level) -> Self {
        let mut matrix = Op3::zeros();
        matrix[(j.index(), k.index())] = C64::new(1.0, 0.0);
        AtomicOp {
            matrix,
            label: Some(format!("sigma_{}{}", j.symbol(), k.symbol())),
        }
    }

    pub fn identity() -> Self {
        AtomicOp {
            matrix: Op3::identity(),
            label: Some("I".into()),
        }
    }

    /// Dipole quadrature `(sigma_eg e^{-i phi} + sigma_ge e^{i phi}) / 2`.
    pub fn quadrature(e: Transition, phi: f64) -> Self {
        let lvl = e.level();
        let up = AtomicOp::sigma(lvl, Level::G).matrix;
        let down = AtomicOp::sigma(Level::G, lvl).matrix;
        let phase = C64::from_polar(1.0, -phi);
        AtomicOp {
            matrix: (up * phase + down * phase.conj()) * C64::new(0.5, 0.0),
            label: Some(format!("sigma_phi[{}, {phi}]", e.tag())),
        }
    }

    /// `Tr[A rho]`.
    pub fn expect(&self, rho: &Op3) -> C64 {
        (self.matrix * rho).trace()
    }

    /// Fluctuation operator `A - <A> I` about the given state.
    pub fn fluctuation(&self, rho: &Op3) -> AtomicOp {
        let mean = self.expect(rho);
        AtomicOp {
            matrix: self.matrix - Op3::identity() * mean,
            label: self.label.as_ref().map(|l| format!("d{l}")),
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite 3x3 operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOp {
    matrix: Op3,
}

impl DensityOp {
    pub fn new(matrix: Op3) -> Result<Self> {
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParams {
                name: "rho",
                reason: "non-finite entry".into(),
            });
        }
        let herm = (matrix - matrix.adjoint()).max_norm();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidParams {
                name: "rho",
                reason: format!("not Hermitian (deviation {herm:e})"),
            });
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidParams {
                name: "rho",
                reason: format!("trace {tr} differs from 1"),
            });
        }
        let rho = DensityOp { matrix };
        let min = rho.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::InvalidParams {
                name: "rho",
                reason: format!("negative eigenvalue {min:e}"),
            });
        }
        Ok(rho)
    }

    pub fn pure(level: Level) -> Self {
        DensityOp {
            matrix: AtomicOp::sigma(level, level).matrix,
        }
    }

    pub fn ground() -> Self {
        DensityOp::pure(Level::G)
    }

    pub fn matrix(&self) -> &Op3 {
        &self.matrix
    }

    pub fn population(&self, level: Level) -> f64 {
        self.matrix[(level.index(), level.index())].re
    }

    pub fn eigenvalues(&self) -> [f64; 3] {
        let ev = self.matrix.symmetric_eigenvalues();
        [ev[0], ev[1], ev[2]]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }
}
