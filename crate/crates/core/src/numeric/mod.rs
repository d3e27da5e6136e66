//! Foundation numerics: complex scalars, polynomials and root finding,
//! dense complex linear algebra, and root-multiset matching.
//!
//! Everything works in double precision under a single tolerance policy:
//! [`DEFAULT_TOL`] for relative residuals and [`DISTINCT_THRESHOLD`] for
//! chordal root separation.

mod mat;
mod matching;
mod poly;
mod projective;

pub use mat::{homogeneous_nullvector, numerical_rank, pivot_profile, MatC};
pub use matching::{match_roots, RootMatching};
pub use poly::{interpolate_coeffs, poly_roots, Polynomial};
pub use projective::{projective_distance, ProjVec};

use num_complex::Complex64;

/// The scalar type used throughout: double-precision complex numbers.
pub type C64 = Complex64;

/// Default relative tolerance for residual and rank decisions.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Two values on the Riemann sphere count as distinct when their chordal
/// distance exceeds this threshold.
pub const DISTINCT_THRESHOLD: f64 = 1e-6;

/// Chordal distance between two points of the Riemann sphere, given as
/// finite complex values. Bounded by 1 and finite even for huge inputs.
pub fn chordal_distance(a: C64, b: C64) -> f64 {
    let na = (1.0 + a.norm_sqr()).sqrt();
    let nb = (1.0 + b.norm_sqr()).sqrt();
    (a - b).norm() / (na * nb)
}

/// Checks that a scalar has finite components.
pub fn is_finite_c(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// All pairwise chordal distances exceed the threshold.
pub fn pairwise_distinct(values: &[C64], threshold: f64) -> bool {
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            if chordal_distance(values[i], values[j]) <= threshold {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chordal_is_symmetric_and_bounded() {
        let a = C64::new(3.0, -2.0);
        let b = C64::new(-1.0, 0.5);
        assert_eq!(chordal_distance(a, b), chordal_distance(b, a));
        assert!(chordal_distance(a, b) <= 1.0);
        assert_eq!(chordal_distance(a, a), 0.0);
    }

    #[test]
    fn chordal_stays_finite_near_infinity() {
        let a = C64::new(1e12, 0.0);
        let b = C64::new(-1e12, 0.0);
        let d = chordal_distance(a, b);
        assert!(d.is_finite() && d > 0.0);
    }
}
