//! Seeded random generation of well-separated test data: varieties, fiber
//! points, unimodular 2x2 matrices, and invertible transforms. Everything
//! flows through an explicit ChaCha generator, so a seed pins the run.

use crate::error::{Error, Result};
use crate::moduli::Sl2;
use crate::numeric::{chordal_distance, numerical_rank, MatC, C64};
use crate::pencil::BinaryForm;
use crate::variety::{is_regular, point_from_fiber, DiagonalIntersection, RegularityReport, SurfacePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Minimum chordal separation of generated parameter and root sets. Two
/// orders above the distinctness threshold keeps conditioning tame.
pub const SAMPLE_SEPARATION: f64 = 5e-2;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform complex number in the square [-scale, scale]^2.
pub fn random_complex(rng: &mut ChaCha8Rng, scale: f64) -> C64 {
    C64::new(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    )
}

/// Random sign bits for fiber sheets.
pub fn sign_bits(rng: &mut ChaCha8Rng, count: usize) -> Vec<bool> {
    (0..count).map(|_| rng.gen_bool(0.5)).collect()
}

/// `count` values in the box [-2, 2]^2, pairwise separated and away from
/// every entry of `avoid` by the sample separation.
pub fn separated_values(rng: &mut ChaCha8Rng, count: usize, avoid: &[C64]) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::with_capacity(count);
    let mut guard = 0usize;
    while out.len() < count {
        guard += 1;
        assert!(guard < 100_000, "separation sampling stalled");
        let cand = random_complex(rng, 2.0);
        let clear = out
            .iter()
            .chain(avoid.iter())
            .all(|v| chordal_distance(*v, cand) > SAMPLE_SEPARATION);
        if clear {
            out.push(cand);
        }
    }
    out
}

/// A random diagonal intersection of dimension n: n + 3 separated nonzero
/// parameters.
pub fn random_variety(rng: &mut ChaCha8Rng, n: usize) -> DiagonalIntersection {
    let zero = [C64::new(0.0, 0.0)];
    loop {
        let lambdas = separated_values(rng, n + 3, &zero);
        if let Ok(v) = DiagonalIntersection::new(lambdas) {
            return v;
        }
    }
}

/// A random regular point of X, found by sampling fiber points over forms
/// with separated roots away from the parameters and the origin. Returns
/// the point together with its regularity report.
pub fn random_regular_point(
    rng: &mut ChaCha8Rng,
    x_var: &DiagonalIntersection,
    max_tries: usize,
) -> Result<(SurfacePoint, RegularityReport)> {
    let n = x_var.n();
    let mut avoid: Vec<C64> = x_var.lambdas().to_vec();
    avoid.push(C64::new(0.0, 0.0));
    for _ in 0..max_tries {
        let roots = separated_values(rng, n, &avoid);
        let psi = BinaryForm::from_roots(&roots)?;
        let sheet = sign_bits(rng, n + 3);
        let (point, general) = point_from_fiber(x_var, &psi, &sheet)?;
        if !general {
            continue;
        }
        let report = is_regular(x_var, &point)?;
        if report.is_regular() {
            return Ok((point, report));
        }
    }
    Err(Error::NoConvergence(format!(
        "no regular point found in {max_tries} draws"
    )))
}

/// Like [`random_regular_point`] but only requiring conditions (i), (ii),
/// (iv); needed at n = 3 where the Möbius-genericity condition is empty of
/// content (three points always admit symmetries).
pub fn random_weakly_regular_point(
    rng: &mut ChaCha8Rng,
    x_var: &DiagonalIntersection,
    max_tries: usize,
) -> Result<(SurfacePoint, RegularityReport)> {
    let n = x_var.n();
    let mut avoid: Vec<C64> = x_var.lambdas().to_vec();
    avoid.push(C64::new(0.0, 0.0));
    for _ in 0..max_tries {
        let roots = separated_values(rng, n, &avoid);
        let psi = BinaryForm::from_roots(&roots)?;
        let sheet = sign_bits(rng, n + 3);
        let (point, general) = point_from_fiber(x_var, &psi, &sheet)?;
        if !general {
            continue;
        }
        let report = is_regular(x_var, &point)?;
        if report.weakly_regular() {
            return Ok((point, report));
        }
    }
    Err(Error::NoConvergence(format!(
        "no weakly regular point found in {max_tries} draws"
    )))
}

/// A random unimodular 2x2 matrix, kept away from ill-conditioned corners.
pub fn random_sl2(rng: &mut ChaCha8Rng) -> Sl2 {
    loop {
        let a = random_complex(rng, 1.0);
        let b = random_complex(rng, 1.0);
        let c = random_complex(rng, 1.0);
        let d = random_complex(rng, 1.0);
        let det = a * d - b * c;
        if det.norm() > 0.3 {
            if let Ok(g) = Sl2::from_general(a, b, c, d) {
                return g;
            }
        }
    }
}

/// A random well-conditioned invertible n x n matrix: identity plus a
/// moderate perturbation.
pub fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> MatC {
    loop {
        let mut m = MatC::identity(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += random_complex(rng, 0.4);
            }
        }
        if numerical_rank(&m, 1e-6) == n {
            return m;
        }
    }
}
