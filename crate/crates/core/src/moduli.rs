//! The Möbius action of SL(2,C) on binary forms and computable orbit
//! invariants, used to compare pencil classes through their discriminants.
//!
//! The invariant of a degree-n form with distinct roots is the
//! lexicographically minimal sorted list of cross-ratio images of the
//! remaining roots, over all ordered root triples sent to (0, 1, infinity).
//! Lists are compared after quantizing coordinates, so forms in the same
//! orbit produce identical invariants up to the quantum.

use crate::error::{Error, Result};
use crate::numeric::{pairwise_distinct, C64, DISTINCT_THRESHOLD};
use crate::pencil::{moebius_root, BinaryForm};
use crate::variety::{self, DiagonalIntersection, SurfacePoint};

/// Quantum for the lexicographic minimization inside
/// [`canonical_invariant`]. Near-symmetric forms may need a tighter value.
pub const INVARIANT_QUANTUM: f64 = 1e-6;

/// An element of SL(2,C), acting on roots by `z -> (az + b)/(cz + d)`.
#[derive(Debug, Clone, Copy)]
pub struct Sl2 {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Sl2 {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Sl2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Sl2::new(
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        )
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn check_unimodular(&self) -> Result<()> {
        let defect = (self.det() - C64::new(1.0, 0.0)).norm();
        if defect > 1e-8 {
            return Err(Error::NotUnimodular(defect));
        }
        Ok(())
    }

    /// Scales an invertible 2x2 matrix to determinant one.
    pub fn from_general(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = [a, b, c, d].iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
        if det.norm() < 1e-14 * scale * scale {
            return Err(Error::SingularTransform);
        }
        let s = det.sqrt();
        Ok(Sl2::new(a / s, b / s, c / s, d / s))
    }

    pub fn inverse(&self) -> Sl2 {
        Sl2::new(self.d, -self.b, -self.c, self.a)
    }

    /// Matrix product `self * rhs`.
    pub fn compose(&self, rhs: &Sl2) -> Sl2 {
        Sl2::new(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }

    pub fn moebius(&self, z: C64) -> Result<C64> {
        moebius_root(self, z)
    }
}

/// Image of `z` under the Möbius map sending `(z1, z2, z3)` to
/// `(0, 1, infinity)`.
pub fn cross_ratio_image(z: C64, z1: C64, z2: C64, z3: C64) -> C64 {
    ((z - z1) * (z2 - z3)) / ((z - z3) * (z2 - z1))
}

/// The unique Möbius map carrying the source triple to the target triple,
/// returned as a unimodular matrix. Points in each triple must be distinct.
pub fn moebius_from_triples(src: [C64; 3], dst: [C64; 3]) -> Result<Sl2> {
    // matrix of z -> ((z - z1)(z2 - z3)) / ((z - z3)(z2 - z1))
    fn to_zero_one_inf(t: [C64; 3]) -> (C64, C64, C64, C64) {
        let (z1, z2, z3) = (t[0], t[1], t[2]);
        let p = z2 - z3;
        let q = z2 - z1;
        (p, -z1 * p, q, -z3 * q)
    }
    let (a1, b1, c1, d1) = to_zero_one_inf(src);
    let (a2, b2, c2, d2) = to_zero_one_inf(dst);
    // dst_map^{-1} * src_map, with the adjugate standing in for the inverse
    let (ia, ib, ic, id) = (d2, -b2, -c2, a2);
    Sl2::from_general(
        ia * a1 + ib * c1,
        ia * b1 + ib * d1,
        ic * a1 + id * c1,
        ic * b1 + id * d1,
    )
}

/// Applies g to a binary form by moving its finite roots and re-expanding.
/// The form must have full degree (no root at `[0:1]`); a transformed root
/// landing at infinity is an error.
pub fn sl2_act(g: &Sl2, psi: &BinaryForm, tol: f64) -> Result<BinaryForm> {
    g.check_unimodular()?;
    let roots = psi.finite_roots(tol)?;
    let moved: Result<Vec<C64>> = roots.iter().map(|r| moebius_root(g, *r)).collect();
    BinaryForm::from_roots(&moved?)
}

/// The canonical Möbius-orbit invariant of a stable binary form.
#[derive(Debug, Clone)]
pub struct ModuliInvariant {
    pub n: usize,
    /// Sorted cross-ratio images of the n-3 non-triple roots; empty for
    /// n = 3, where the orbit is a single point.
    pub canon: Vec<C64>,
}

impl ModuliInvariant {
    pub fn is_trivial(&self) -> bool {
        self.canon.is_empty()
    }

    /// Max entrywise deviation; infinite on shape mismatch.
    pub fn distance(&self, other: &ModuliInvariant) -> f64 {
        if self.n != other.n || self.canon.len() != other.canon.len() {
            return f64::INFINITY;
        }
        self.canon
            .iter()
            .zip(&other.canon)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0_f64, f64::max)
    }

    pub fn approx_eq(&self, other: &ModuliInvariant, tol: f64) -> bool {
        self.distance(other) <= tol
    }
}

fn quant_key(z: C64) -> (i64, i64) {
    let clamp = |x: f64| x.clamp(-1e15, 1e15);
    (
        (clamp(z.re) / INVARIANT_QUANTUM).round() as i64,
        (clamp(z.im) / INVARIANT_QUANTUM).round() as i64,
    )
}

fn sort_by_quantized(values: &mut [C64]) {
    values.sort_by_key(|z| quant_key(*z));
}

fn lex_less(a: &[C64], b: &[C64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        let (kx, ky) = (quant_key(*x), quant_key(*y));
        if kx != ky {
            return kx < ky;
        }
    }
    false
}

/// Computes the canonical invariant of a form with n distinct finite roots:
/// over every ordered root triple sent to (0, 1, infinity), the sorted image
/// list of the remaining roots, keeping the quantized-lexicographic minimum.
pub fn canonical_invariant(psi: &BinaryForm, tol: f64) -> Result<ModuliInvariant> {
    let mut roots = psi.finite_roots(tol)?;
    if !pairwise_distinct(&roots, DISTINCT_THRESHOLD) {
        return Err(Error::NotStable);
    }
    sort_by_quantized(&mut roots);
    let n = roots.len();
    if n == 3 {
        return Ok(ModuliInvariant { n, canon: vec![] });
    }
    let mut best: Option<Vec<C64>> = None;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k {
                    continue;
                }
                let mut images: Vec<C64> = Vec::with_capacity(n - 3);
                for (m, r) in roots.iter().enumerate() {
                    if m == i || m == j || m == k {
                        continue;
                    }
                    images.push(cross_ratio_image(*r, roots[i], roots[j], roots[k]));
                }
                sort_by_quantized(&mut images);
                match &best {
                    None => best = Some(images),
                    Some(cur) => {
                        if lex_less(&images, cur) {
                            best = Some(images);
                        }
                    }
                }
            }
        }
    }
    Ok(ModuliInvariant {
        n,
        canon: best.expect("n >= 4 has triples"),
    })
}

/// Searches for a Möbius map matching the root sets of two stable forms.
/// Returns a unimodular representative realizing `sl2_act(g, psi1) = psi2`
/// projectively, or `None` when the forms are in different orbits.
pub fn same_class(psi1: &BinaryForm, psi2: &BinaryForm, tol: f64) -> Result<Option<Sl2>> {
    if psi1.degree() != psi2.degree() {
        return Ok(None);
    }
    let r1 = psi1.finite_roots(tol)?;
    let r2 = psi2.finite_roots(tol)?;
    if !pairwise_distinct(&r1, DISTINCT_THRESHOLD) || !pairwise_distinct(&r2, DISTINCT_THRESHOLD) {
        return Err(Error::NotStable);
    }
    let n = r1.len();
    if n < 3 {
        return Ok(None);
    }
    let src = [r1[0], r1[1], r1[2]];
    let match_tol = DISTINCT_THRESHOLD.max(tol);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k {
                    continue;
                }
                let g = match moebius_from_triples(src, [r2[i], r2[j], r2[k]]) {
                    Ok(g) => g,
                    Err(_) => continue,
                };
                let moved: Result<Vec<C64>> =
                    r1.iter().map(|r| moebius_root(&g, *r)).collect();
                let moved = match moved {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                if let Ok(m) = crate::numeric::match_roots(&moved, &r2) {
                    if m.max_distance < match_tol {
                        return Ok(Some(g));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// The moduli invariant of the second fundamental form at a point: the
/// canonical invariant of its discriminant. Needs the point to satisfy the
/// regularity conditions that make the discriminant stable (nonzero
/// coordinates, distinct finite roots, nondegenerate restrictions).
pub fn mu(x_var: &DiagonalIntersection, point: &SurfacePoint) -> Result<ModuliInvariant> {
    let report = variety::is_regular(x_var, point)?;
    if !report.weakly_regular() {
        return Err(Error::NotRegular(
            "conditions (i), (ii), (iv) fail at this point".into(),
        ));
    }
    let theta = variety::theta(x_var, point, variety::ThetaMode::Closed)?;
    canonical_invariant(&theta, crate::numeric::DEFAULT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{match_roots, DEFAULT_TOL};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_acts_trivially() {
        let psi = BinaryForm::from_roots(&[c(1.0, 0.0), c(2.0, 1.0), c(-0.5, 0.3)]).unwrap();
        let out = sl2_act(&Sl2::identity(), &psi, DEFAULT_TOL).unwrap();
        assert!(out.projectively_close(&psi, 1e-10));
    }

    #[test]
    fn translation_shifts_roots() {
        let psi = BinaryForm::from_roots(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        let g = Sl2::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        let out = sl2_act(&g, &psi, DEFAULT_TOL).unwrap();
        let roots = out.finite_roots(DEFAULT_TOL).unwrap();
        let expected = vec![c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)];
        let m = match_roots(&expected, &roots).unwrap();
        assert!(m.max_distance < 1e-10);
    }

    #[test]
    fn action_composes_projectively() {
        let psi =
            BinaryForm::from_roots(&[c(1.0, 0.2), c(-2.0, 0.4), c(0.5, -1.0), c(3.0, 0.0)])
                .unwrap();
        let g1 = Sl2::from_general(c(1.0, 0.1), c(0.3, 0.0), c(-0.2, 0.0), c(1.1, 0.0)).unwrap();
        let g2 = Sl2::from_general(c(0.8, 0.0), c(0.0, 0.4), c(0.1, 0.1), c(1.0, -0.2)).unwrap();
        let seq = sl2_act(&g2, &sl2_act(&g1, &psi, DEFAULT_TOL).unwrap(), DEFAULT_TOL).unwrap();
        let joint = sl2_act(&g2.compose(&g1), &psi, DEFAULT_TOL).unwrap();
        assert!(seq.projectively_close(&joint, 1e-8));
    }

    #[test]
    fn root_at_infinity_detected() {
        let psi = BinaryForm::from_roots(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        // c z + d vanishes at z = 2
        let g = Sl2::from_general(c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0)).unwrap();
        assert!(matches!(
            sl2_act(&g, &psi, DEFAULT_TOL),
            Err(Error::RootAtInfinity)
        ));
    }

    #[test]
    fn degree_three_invariant_is_trivial() {
        let psi = BinaryForm::from_roots(&[c(1.0, 0.0), c(5.0, 2.0), c(-3.0, 1.0)]).unwrap();
        let inv = canonical_invariant(&psi, DEFAULT_TOL).unwrap();
        assert!(inv.is_trivial());
    }

    #[test]
    fn invariant_is_sl2_invariant() {
        let psi = BinaryForm::from_roots(&[
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(2.0, 0.5),
            c(3.0, -0.7),
            c(-1.5, 0.2),
        ])
        .unwrap();
        let g = Sl2::from_general(c(1.3, 0.2), c(-0.4, 0.1), c(0.2, -0.1), c(0.9, 0.0)).unwrap();
        let moved = sl2_act(&g, &psi, DEFAULT_TOL).unwrap();
        let i1 = canonical_invariant(&psi, DEFAULT_TOL).unwrap();
        let i2 = canonical_invariant(&moved, DEFAULT_TOL).unwrap();
        assert!(i1.approx_eq(&i2, 1e-6), "distance {}", i1.distance(&i2));
    }

    #[test]
    fn invariant_separates_distinct_cross_ratios() {
        let a = BinaryForm::from_roots(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)])
            .unwrap();
        let b = BinaryForm::from_roots(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)])
            .unwrap();
        let ia = canonical_invariant(&a, DEFAULT_TOL).unwrap();
        let ib = canonical_invariant(&b, DEFAULT_TOL).unwrap();
        assert!(!ia.approx_eq(&ib, 1e-6));
        // hand oracle: the six cross ratios of {0,1,2,3} are
        // {-3, 4, -1/3, 1/4, 4/3, 3/4}; the quantized-lex minimum is -3
        assert!(
            ia.canon.len() == 1 && (ia.canon[0] - c(-3.0, 0.0)).norm() < 1e-9,
            "canon = {:?}",
            ia.canon
        );
        // and for {0,1,2,4} the minimum is -2
        assert!((ib.canon[0] - c(-2.0, 0.0)).norm() < 1e-9, "canon = {:?}", ib.canon);
    }

    #[test]
    fn repeated_roots_are_not_stable() {
        let psi = BinaryForm::from_roots(&[c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)])
            .unwrap();
        assert!(matches!(
            canonical_invariant(&psi, DEFAULT_TOL),
            Err(Error::NotStable)
        ));
    }

    #[test]
    fn same_class_finds_witness_and_rejects_distinct_orbits() {
        let psi = BinaryForm::from_roots(&[
            c(0.3, 0.1),
            c(1.2, -0.4),
            c(-2.0, 0.0),
            c(0.0, 1.5),
            c(2.2, 0.3),
        ])
        .unwrap();
        let g = Sl2::from_general(c(1.0, -0.3), c(0.5, 0.0), c(0.0, 0.2), c(1.1, 0.1)).unwrap();
        let moved = sl2_act(&g, &psi, DEFAULT_TOL).unwrap();
        let found = same_class(&psi, &moved, DEFAULT_TOL).unwrap();
        let found = found.expect("orbit witness must exist");
        let check = sl2_act(&found, &psi, DEFAULT_TOL).unwrap();
        assert!(check.projectively_close(&moved, 1e-6));

        let other = BinaryForm::from_roots(&[
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(2.0, 0.0),
            c(3.3, 0.0),
            c(-4.0, 1.0),
        ])
        .unwrap();
        assert!(same_class(&psi, &other, DEFAULT_TOL).unwrap().is_none());

        // degree mismatch
        let low = BinaryForm::from_roots(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!(same_class(&psi, &low, DEFAULT_TOL).unwrap().is_none());
    }

    #[test]
    fn invariant_survives_the_group_action_in_bulk() {
        // 200 random (form, g) pairs at various degrees
        let mut rng = crate::sample::rng_from_seed(5);
        for trial in 0..200 {
            let n = 4 + trial % 4;
            let roots = crate::sample::separated_values(&mut rng, n, &[]);
            let psi = BinaryForm::from_roots(&roots).unwrap();
            let g = loop {
                let g = crate::sample::random_sl2(&mut rng);
                if roots
                    .iter()
                    .all(|r| (g.c * r + g.d).norm() > 0.2)
                {
                    break g;
                }
            };
            let moved = sl2_act(&g, &psi, DEFAULT_TOL).unwrap();
            let i1 = canonical_invariant(&psi, DEFAULT_TOL).unwrap();
            let i2 = canonical_invariant(&moved, DEFAULT_TOL).unwrap();
            assert!(
                i1.approx_eq(&i2, 1e-6),
                "trial {trial}: invariant drift {:.3e}",
                i1.distance(&i2)
            );
        }
    }

    #[test]
    fn same_class_is_reflexive_symmetric_and_matches_invariants() {
        let mut rng = crate::sample::rng_from_seed(9);
        for trial in 0..200 {
            let n = 4 + trial % 3;
            let a = BinaryForm::from_roots(&crate::sample::separated_values(&mut rng, n, &[]))
                .unwrap();
            assert!(same_class(&a, &a, DEFAULT_TOL).unwrap().is_some());
            let b = BinaryForm::from_roots(&crate::sample::separated_values(&mut rng, n, &[]))
                .unwrap();
            let ab = same_class(&a, &b, DEFAULT_TOL).unwrap().is_some();
            let ba = same_class(&b, &a, DEFAULT_TOL).unwrap().is_some();
            assert_eq!(ab, ba, "trial {trial}: symmetry violated");
            let ia = canonical_invariant(&a, DEFAULT_TOL).unwrap();
            let ib = canonical_invariant(&b, DEFAULT_TOL).unwrap();
            assert_eq!(
                ab,
                ia.approx_eq(&ib, 1e-6),
                "trial {trial}: class decision disagrees with invariants"
            );
        }
    }

    #[test]
    fn mu_is_constant_on_fibers() {
        let lam: Vec<C64> = (0..8)
            .map(|k| c(1.1 + 0.85 * k as f64, 0.2 * ((k % 3) as f64 - 1.0)))
            .collect();
        let x = DiagonalIntersection::new(lam).unwrap(); // n = 5
        let roots = [
            c(-1.2, 0.5),
            c(-2.9, 1.3),
            c(-0.4, -1.1),
            c(-4.3, 0.2),
            c(-1.8, -2.0),
        ];
        let psi = BinaryForm::from_roots(&roots).unwrap();
        // two fiber sheets over the same form
        let (p1, _) = variety::point_from_fiber(&x, &psi, &[false; 8]).unwrap();
        let mut signs = vec![false; 8];
        signs[3] = true;
        signs[6] = true;
        let (p2, _) = variety::point_from_fiber(&x, &psi, &signs).unwrap();
        let m1 = mu(&x, &p1).unwrap();
        let m2 = mu(&x, &p2).unwrap();
        assert!(m1.approx_eq(&m2, 1e-9));
        // a point over the transformed form stays in the same mu fiber
        let g = Sl2::from_general(c(1.1, 0.1), c(0.3, -0.2), c(0.05, 0.1), c(0.9, 0.0)).unwrap();
        let moved = sl2_act(&g, &psi, DEFAULT_TOL).unwrap();
        let (p3, general) = variety::point_from_fiber(&x, &moved, &[false; 8]).unwrap();
        assert!(general);
        let m3 = mu(&x, &p3).unwrap();
        assert!(
            m1.approx_eq(&m3, 1e-6),
            "mu must be invariant along the fiber, drift {:.3e}",
            m1.distance(&m3)
        );
    }

    #[test]
    fn moebius_from_triples_maps_points() {
        let src = [c(0.1, 0.0), c(1.0, 1.0), c(-2.0, 0.5)];
        let dst = [c(3.0, 0.0), c(0.0, -1.0), c(0.7, 0.2)];
        let g = moebius_from_triples(src, dst).unwrap();
        g.check_unimodular().unwrap();
        for (s, d) in src.iter().zip(&dst) {
            let img = g.moebius(*s).unwrap();
            assert!((img - d).norm() < 1e-10);
        }
    }
}
