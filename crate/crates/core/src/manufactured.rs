//! The polynomial benchmark `u = grad b` with
//! `b = x^3 y^3 z^3 (x - 1)^3 (y - 1)^3 (z - 1)^3` on the unit cube.

use crate::calculus::{PolyVector, Polynomial};

#[derive(Clone, Debug)]
pub struct Benchmark {
    pub b: Polynomial,
    pub u: PolyVector,
    pub div_u: Polynomial,
    pub grad_div_u: PolyVector,
    /// Source with `-laplace(div u) = j`.
    pub j: Polynomial,
}

/// Expands `b` and differentiates it symbolically. All coefficients are
/// small integers, so the expansion is exact in floating point.
pub fn build_benchmark() -> Benchmark {
    let bubble = |axis: usize| {
        let t = Polynomial::coordinate(axis);
        let t_minus_1 = &t - &Polynomial::constant(1.0);
        (&t * &t_minus_1).pow(3)
    };
    let b = &(&bubble(0) * &bubble(1)) * &bubble(2);
    let u = b.gradient();
    let div_u = u.divergence();
    let grad_div_u = div_u.gradient();
    let j = -&div_u.laplacian();
    Benchmark {
        b,
        u,
        div_u,
        grad_div_u,
        j,
    }
}
