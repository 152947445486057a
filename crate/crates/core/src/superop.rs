//! Column-stacking vectorization of 3x3 operators.
//!
//! `vec(A rho B) = (B^T (x) A) vec(rho)`; entry `(r, c)` of an operator sits
//! at index `3 c + r` of its vector.

use crate::model::{Op3, OpVec, SuperOp, C64};

pub fn vec(op: &Op3) -> OpVec {
    OpVec::from_iterator(op.iter().copied())
}

pub fn unvec(x: &OpVec) -> Op3 {
    Op3::from_iterator(x.iter().copied())
}

pub fn kron(a: &Op3, b: &Op3) -> SuperOp {
    let mut out = SuperOp::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..3 {
                for l in 0..3 {
                    out[(3 * i + k, 3 * j + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Superoperator of `rho -> A rho B`.
pub fn sandwich(a: &Op3, b: &Op3) -> SuperOp {
    kron(&b.transpose(), a)
}

/// Superoperator of `rho -> A rho`.
pub fn left(a: &Op3) -> SuperOp {
    sandwich(a, &Op3::identity())
}

/// Superoperator of `rho -> rho B`.
pub fn right(b: &Op3) -> SuperOp {
    sandwich(&Op3::identity(), b)
}

/// Row vector `f` with `f . vec(X) = Tr[O X]`.
pub fn trace_functional(observable: &Op3) -> OpVec {
    vec(&observable.transpose())
}

/// `Tr[O X]` evaluated on a vectorized `X`.
pub fn trace_with(functional: &OpVec, x: &OpVec) -> C64 {
    functional.iter().zip(x.iter()).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MaxNorm;

    fn sample(seed: f64) -> Op3 {
        Op3::from_fn(|r, c| C64::new((seed + r as f64 * 1.3 - c as f64).sin(), (seed * c as f64 + r as f64).cos()))
    }

    #[test]
    fn sandwich_matches_matrix_product() {
        let (a, b, rho) = (sample(0.2), sample(1.1), sample(2.7));
        let lhs = sandwich(&a, &b) * vec(&rho);
        let rhs = vec(&(a * rho * b));
        assert!((lhs - rhs).max_norm() < 1e-13);
    }

    #[test]
    fn vec_roundtrip_and_trace() {
        let (o, x) = (sample(0.4), sample(3.3));
        assert_eq!(unvec(&vec(&x)), x);
        let direct = (o * x).trace();
        assert!((trace_with(&trace_functional(&o), &vec(&x)) - direct).norm() < 1e-13);
    }
}
