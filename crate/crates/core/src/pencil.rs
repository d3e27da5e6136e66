//! Quadratic forms, pencils of quadrics, their discriminants, standard
//! bases, and the multiplier map attached to a good pair.
//!
//! A pencil is stored as an ordered pair of symmetric matrices
//! `(A^phi1, A^phi2)`. Its discriminant is the binary form
//! `det(s*phi1 - t*phi2)`; the pencil is nonsingular when that form has
//! full degree and distinct roots. Roots are kept as the finite values
//! `tau_i` of the factors `(tau_i s - t)`.

use crate::error::{Error, Result};
use crate::moduli::Sl2;
use crate::numeric::{
    homogeneous_nullvector, interpolate_coeffs, numerical_rank, pairwise_distinct, poly_roots,
    projective_distance, MatC, Polynomial, ProjVec, C64, DEFAULT_TOL, DISTINCT_THRESHOLD,
};

/// A quadratic form on C^n, represented by its symmetric matrix.
#[derive(Debug, Clone)]
pub struct QuadForm {
    mat: MatC,
}

impl QuadForm {
    pub fn new(mat: MatC) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::InvalidInput("quadratic form matrix not square".into()));
        }
        if mat.symmetry_defect() > 1e-10 {
            return Err(Error::InvalidInput(
                "quadratic form matrix not symmetric".into(),
            ));
        }
        Ok(QuadForm { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &MatC {
        &self.mat
    }

    /// phi(v) = v^T A v (no conjugation; the form is bilinear over C).
    pub fn eval(&self, v: &[C64]) -> C64 {
        self.bilinear(v, v)
    }

    pub fn bilinear(&self, u: &[C64], v: &[C64]) -> C64 {
        let av = self.mat.mul_vec(v);
        u.iter().zip(av).map(|(a, b)| a * b).sum()
    }

    /// Nondegenerate at tolerance: full numerical rank.
    pub fn is_nondegenerate(&self, tol: f64) -> bool {
        numerical_rank(&self.mat, tol) == self.dim()
    }
}

/// An ordered pair of quadratic forms of equal dimension, generating a
/// pencil of quadrics.
#[derive(Debug, Clone)]
pub struct Pencil {
    pub phi1: QuadForm,
    pub phi2: QuadForm,
}

impl Pencil {
    pub fn new(phi1: QuadForm, phi2: QuadForm) -> Result<Self> {
        if phi1.dim() != phi2.dim() {
            return Err(Error::InvalidInput("pencil forms of unequal dimension".into()));
        }
        if phi1.dim() == 0 {
            return Err(Error::InvalidInput("zero-dimensional pencil".into()));
        }
        Ok(Pencil { phi1, phi2 })
    }

    pub fn from_matrices(a1: MatC, a2: MatC) -> Result<Self> {
        Pencil::new(QuadForm::new(a1)?, QuadForm::new(a2)?)
    }

    pub fn dim(&self) -> usize {
        self.phi1.dim()
    }

    /// Sine of the angle between the two matrices seen as vectors; zero for
    /// a linearly dependent pair.
    pub fn independence_defect(&self) -> f64 {
        let a = self.phi1.matrix();
        let b = self.phi2.matrix();
        let mut g11 = 0.0_f64;
        let mut g22 = 0.0_f64;
        let mut g12 = C64::new(0.0, 0.0);
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                g11 += a[(i, j)].norm_sqr();
                g22 += b[(i, j)].norm_sqr();
                g12 += a[(i, j)].conj() * b[(i, j)];
            }
        }
        if g11 == 0.0 || g22 == 0.0 {
            return 0.0;
        }
        let cos2 = (g12.norm_sqr() / (g11 * g22)).min(1.0);
        (1.0 - cos2).max(0.0).sqrt()
    }
}

/// A binary form of degree n in (s, t): `coeffs[k]` multiplies `s^k t^(n-k)`.
/// Stored projectively normalized.
#[derive(Debug, Clone)]
pub struct BinaryForm {
    coeffs: ProjVec,
}

impl BinaryForm {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        Ok(BinaryForm {
            coeffs: ProjVec::new(coeffs)?,
        })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        self.coeffs.coords()
    }

    pub fn eval(&self, s: C64, t: C64) -> C64 {
        let n = self.degree();
        let mut acc = C64::new(0.0, 0.0);
        let mut sp = C64::new(1.0, 0.0);
        let mut tp = vec![C64::new(1.0, 0.0); n + 1];
        for k in 1..=n {
            tp[k] = tp[k - 1] * t;
        }
        for k in 0..=n {
            acc += self.coeffs()[k] * sp * tp[n - k];
            sp *= s;
        }
        acc
    }

    /// Expands `prod_i (tau_i s - t)` for finite root values `tau_i`.
    pub fn from_roots(roots: &[C64]) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::InvalidInput("binary form needs degree >= 1".into()));
        }
        let n = roots.len();
        // elementary symmetric functions of the roots
        let mut e = vec![C64::new(0.0, 0.0); n + 1];
        e[0] = C64::new(1.0, 0.0);
        let mut deg = 0usize;
        for r in roots {
            deg += 1;
            for k in (1..=deg).rev() {
                let prev = e[k - 1];
                e[k] += r * prev;
            }
        }
        let sign = |k: usize| if (n - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        let coeffs: Vec<C64> = (0..=n).map(|k| e[k] * sign(k)).collect();
        BinaryForm::new(coeffs)
    }

    /// The dehomogenization psi(1, t) as a polynomial in t, ascending.
    pub fn t_polynomial(&self) -> Polynomial {
        let mut rev: Vec<C64> = self.coeffs().to_vec();
        rev.reverse();
        Polynomial::new(rev)
    }

    /// True when the t-degree drops at s = 1, i.e. `[0:1]` is a root.
    pub fn has_root_at_s_zero(&self, tol: f64) -> bool {
        // coeffs are normalized with max modulus 1
        self.coeffs()[0].norm() <= tol
    }

    /// The n finite roots. Errors when the form vanishes at `[0:1]` (a root
    /// at infinity in the t-chart).
    pub fn finite_roots(&self, tol: f64) -> Result<Vec<C64>> {
        if self.has_root_at_s_zero(tol.max(DISTINCT_THRESHOLD)) {
            return Err(Error::InvalidInput(
                "binary form vanishes at [0:1]; no finite root list".into(),
            ));
        }
        poly_roots(&self.t_polynomial(), tol)
    }

    /// Projective comparison of coefficient vectors.
    pub fn projectively_close(&self, other: &BinaryForm, tol: f64) -> bool {
        self.degree() == other.degree()
            && projective_distance(self.coeffs(), other.coeffs()) <= tol
    }
}

/// A simultaneous diagonalization of a good pair: columns `w_i` of
/// `basis` satisfy `W^T A1 W = diag(roots)` and `W^T A2 W = I`, with each
/// `w_i` spanning the singular line of `phi1 - tau_i phi2`.
#[derive(Debug, Clone)]
pub struct StandardBasis {
    pub basis: MatC,
    pub roots: Vec<C64>,
}

const DISCRIMINANT_PIVOT_SKIP: f64 = 1e-14;

/// The discriminant binary form `det(s*phi1 - t*phi2)`, computed by
/// evaluating the determinant at s = 1 over n+1 interpolation nodes and
/// homogenizing. Nodes where elimination collapses are skipped.
pub fn discriminant(p: &Pencil) -> Result<BinaryForm> {
    if p.independence_defect() < 1e-12 {
        return Err(Error::DegeneratePencil);
    }
    let n = p.dim();
    let a1 = p.phi1.matrix();
    let a2 = p.phi2.matrix();
    let norm1 = a1.max_norm();
    let norm2 = a2.max_norm();
    if norm1 == 0.0 && norm2 == 0.0 {
        return Err(Error::DegeneratePencil);
    }
    // wide real nodes at the natural scale of the generalized spectrum
    let scale = if norm2 > 0.0 { (norm1.max(1e-300)) / norm2 } else { 1.0 };

    let mut nodes: Vec<C64> = Vec::with_capacity(n + 1);
    let mut values: Vec<C64> = Vec::with_capacity(n + 1);
    let mut nonzero_seen = false;
    let mut k = 0usize;
    while nodes.len() < n + 1 && k < 6 * (n + 2) {
        let raw = node_candidate(k);
        k += 1;
        let t = C64::new(raw * scale, 0.0);
        let m = a1.sub(&a2.scale(t));
        // complete-pivot elimination; a collapsing pivot means the value is
        // zero to rounding, with no relative accuracy left
        let rank = numerical_rank(&m, DISCRIMINANT_PIVOT_SKIP);
        if rank < n {
            continue;
        }
        let d = m.det();
        if d.norm() > 0.0 {
            nonzero_seen = true;
        }
        nodes.push(t);
        values.push(d);
    }
    if nodes.len() < n + 1 || !nonzero_seen {
        return Err(Error::DegeneratePencil);
    }
    let t_coeffs = interpolate_coeffs(&nodes, &values);
    // p(t) = sum b_m t^m with b_m = c_{n-m}; c_k multiplies s^k t^{n-k}
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    for (m, b) in t_coeffs.iter().enumerate() {
        coeffs[n - m] = *b;
    }
    BinaryForm::new(coeffs)
}

/// Interpolation node sequence 0, 1, -1, 2, -2, ...
fn node_candidate(k: usize) -> f64 {
    if k == 0 {
        0.0
    } else {
        let mag = k.div_ceil(2) as f64;
        if k % 2 == 1 {
            mag
        } else {
            -mag
        }
    }
}

/// Nonsingularity test. The flag is true when the discriminant keeps exact
/// degree n in t at s = 1 (no root at `[0:1]`) and its n roots are pairwise
/// separated by the distinctness threshold. The roots found are returned
/// either way.
pub fn is_nonsingular(p: &Pencil, tol: f64) -> Result<(bool, Vec<C64>)> {
    let disc = discriminant(p)?;
    if disc.has_root_at_s_zero(tol.max(DISTINCT_THRESHOLD)) {
        let roots = poly_roots(&disc.t_polynomial(), tol).unwrap_or_default();
        return Ok((false, roots));
    }
    let roots = poly_roots(&disc.t_polynomial(), tol)?;
    let ok = roots.len() == p.dim() && pairwise_distinct(&roots, DISTINCT_THRESHOLD);
    Ok((ok, roots))
}

/// Builds a standard basis for a good pair: both forms must be
/// nondegenerate and the pencil nonsingular. Column `i` spans
/// `Sing(phi1 - tau_i phi2)`, rescaled so `phi2(w_i) = 1`, with the sign
/// ambiguity fixed so the earliest max-modulus entry has argument in
/// `(-pi/2, pi/2]`.
pub fn standard_basis(p: &Pencil) -> Result<StandardBasis> {
    let n = p.dim();
    if !p.phi1.is_nondegenerate(DEFAULT_TOL) {
        return Err(Error::DegenerateForm("phi1 is numerically degenerate".into()));
    }
    if !p.phi2.is_nondegenerate(DEFAULT_TOL) {
        return Err(Error::DegenerateForm("phi2 is numerically degenerate".into()));
    }
    let (ok, roots) = is_nonsingular(p, DEFAULT_TOL)?;
    if !ok {
        return Err(Error::NotNonsingular(
            "discriminant roots are not n distinct finite values".into(),
        ));
    }
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(n);
    for tau in &roots {
        let m = p.phi1.matrix().sub(&p.phi2.matrix().scale(*tau));
        let w = homogeneous_nullvector(&m, 1e-6)?;
        let q = p.phi2.eval(w.coords());
        if q.norm() < 1e-12 {
            return Err(Error::IllConditioned(
                "singular vector is numerically isotropic for phi2".into(),
            ));
        }
        let mut col: Vec<C64> = w.coords().iter().map(|z| z / q.sqrt()).collect();
        fix_sign(&mut col);
        columns.push(col);
    }
    let basis = MatC::from_columns(&columns)?;
    // block equations sanity check
    let wt = basis.transpose();
    let d1 = wt.mul(&p.phi1.matrix().mul(&basis));
    let d2 = wt.mul(&p.phi2.matrix().mul(&basis));
    let scale1 = p.phi1.matrix().max_norm().max(1.0);
    let mut defect = d2.sub(&MatC::identity(n)).max_norm();
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { roots[i] } else { C64::new(0.0, 0.0) };
            defect = defect.max((d1[(i, j)] - target).norm() / scale1);
        }
    }
    if defect > 1e-6 {
        return Err(Error::IllConditioned(format!(
            "standard-basis block equations violated by {:.3e}",
            defect
        )));
    }
    Ok(StandardBasis { basis, roots })
}

/// Flips the sign so the earliest max-modulus entry has argument in
/// `(-pi/2, pi/2]`.
fn fix_sign(col: &mut [C64]) {
    let max = col.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    let lead = col
        .iter()
        .find(|z| z.norm() >= max * (1.0 - 1e-14))
        .copied()
        .unwrap_or(C64::new(1.0, 0.0));
    let flip = if lead.re.abs() > 1e-12 * max {
        lead.re < 0.0
    } else {
        lead.im < 0.0
    };
    if flip {
        for z in col.iter_mut() {
            *z = -*z;
        }
    }
}

/// The linear map multiplying the i-th standard coordinate by the i-th
/// discriminant root: `W diag(tau) W^{-1}` in ambient coordinates.
pub fn alpha_map(p: &Pencil) -> Result<MatC> {
    let sb = standard_basis(p)?;
    let d = MatC::diagonal(&sb.roots);
    let winv = sb.basis.inverse()?;
    Ok(sb.basis.mul(&d).mul(&winv))
}

/// Replaces the good pair by `(a phi1 + b phi2, c phi1 + d phi2)` for a
/// unimodular 2x2 matrix. Each finite discriminant root tau moves to
/// `(a tau + b) / (c tau + d)`.
pub fn transform_pair(p: &Pencil, g: &Sl2) -> Result<Pencil> {
    g.check_unimodular()?;
    let a1 = p.phi1.matrix();
    let a2 = p.phi2.matrix();
    let new1 = a1.scale(g.a).add(&a2.scale(g.b));
    let new2 = a1.scale(g.c).add(&a2.scale(g.d));
    Pencil::from_matrices(new1, new2)
}

/// Pulls both forms back along an invertible T: `A -> T^T A T`.
pub fn pullback(p: &Pencil, t: &MatC) -> Result<Pencil> {
    let n = p.dim();
    if !t.is_square() || t.rows() != n {
        return Err(Error::InvalidInput("pullback matrix has wrong shape".into()));
    }
    if numerical_rank(t, 1e-12) < n {
        return Err(Error::SingularTransform);
    }
    let tt = t.transpose();
    let new1 = tt.mul(&p.phi1.matrix().mul(t));
    let new2 = tt.mul(&p.phi2.matrix().mul(t));
    Pencil::from_matrices(new1, new2)
}

/// Möbius image of a finite root under the root-transformation rule of a
/// pair change.
pub fn moebius_root(g: &Sl2, tau: C64) -> Result<C64> {
    let denom = g.c * tau + g.d;
    if denom.norm() < 1e-12 * (1.0 + tau.norm()) {
        return Err(Error::RootAtInfinity);
    }
    Ok((g.a * tau + g.b) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::match_roots;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn diag_pencil(taus: &[f64]) -> Pencil {
        let d: Vec<C64> = taus.iter().map(|t| c(*t, 0.0)).collect();
        Pencil::from_matrices(MatC::diagonal(&d), MatC::identity(taus.len())).unwrap()
    }

    #[test]
    fn discriminant_of_diag_123() {
        let p = diag_pencil(&[1.0, 2.0, 3.0]);
        let disc = discriminant(&p).unwrap();
        // (s-t)(2s-t)(3s-t) = -t^3 + 6st^2 - 11s^2t + 6s^3
        let expected = BinaryForm::new(vec![
            c(-1.0, 0.0),
            c(6.0, 0.0),
            c(-11.0, 0.0),
            c(6.0, 0.0),
        ])
        .unwrap();
        assert!(disc.projectively_close(&expected, 1e-10));
        // s^n coefficient proportional to det(phi1) = 6, t^n to -det(phi2)
        let ratio = disc.coeffs()[3] / disc.coeffs()[0];
        assert!((ratio - c(-6.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn dependent_pair_is_degenerate() {
        let a = MatC::diagonal(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let p = Pencil::from_matrices(a.clone(), a).unwrap();
        assert!(matches!(discriminant(&p), Err(Error::DegeneratePencil)));
    }

    #[test]
    fn pullback_preserves_discriminant_class() {
        let p = diag_pencil(&[1.0, -2.0, 3.5, 0.7]);
        let t = MatC::from_rows(vec![
            vec![c(1.0, 0.2), c(0.3, -0.4), c(0.0, 0.1), c(0.5, 0.0)],
            vec![c(-0.2, 0.0), c(1.1, 0.0), c(0.4, 0.3), c(0.0, 0.0)],
            vec![c(0.0, 0.5), c(0.2, 0.2), c(0.9, -0.1), c(0.3, 0.0)],
            vec![c(0.1, 0.0), c(0.0, -0.3), c(0.2, 0.0), c(1.4, 0.2)],
        ])
        .unwrap();
        let q = pullback(&p, &t).unwrap();
        let (_, roots_p) = is_nonsingular(&p, DEFAULT_TOL).unwrap();
        let (_, roots_q) = is_nonsingular(&q, DEFAULT_TOL).unwrap();
        let m = match_roots(&roots_p, &roots_q).unwrap();
        assert!(m.max_distance < 1e-8, "root drift {}", m.max_distance);
    }

    #[test]
    fn pullback_rejects_singular_transform() {
        let p = diag_pencil(&[1.0, 2.0, 3.0]);
        let mut t = MatC::identity(3);
        t[(2, 2)] = c(0.0, 0.0);
        assert!(matches!(pullback(&p, &t), Err(Error::SingularTransform)));
    }

    #[test]
    fn nonsingularity_flags() {
        let (ok, roots) = is_nonsingular(&diag_pencil(&[1.0, 2.0, 3.0]), DEFAULT_TOL).unwrap();
        assert!(ok);
        let mut sorted: Vec<f64> = roots.iter().map(|r| r.re).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((sorted[0] - 1.0).abs() < 1e-10);
        assert!((sorted[2] - 3.0).abs() < 1e-10);

        let (ok, _) = is_nonsingular(&diag_pencil(&[1.0, 1.0, 3.0]), DEFAULT_TOL).unwrap();
        assert!(!ok, "repeated root must fail");

        // a zero diagonal entry is fine: phi1 degenerate but pencil nonsingular
        let (ok, roots) = is_nonsingular(&diag_pencil(&[0.0, 2.0, 3.0]), DEFAULT_TOL).unwrap();
        assert!(ok);
        assert!(roots.iter().any(|r| r.norm() < 1e-10));
    }

    #[test]
    fn standard_basis_of_diagonal_pencil_is_signed_identity() {
        let p = diag_pencil(&[1.5, -0.5, 2.5]);
        let sb = standard_basis(&p).unwrap();
        // each column must be +/- a coordinate vector, matched to its root
        for (j, tau) in sb.roots.iter().enumerate() {
            let idx = [1.5, -0.5, 2.5]
                .iter()
                .position(|t| (c(*t, 0.0) - tau).norm() < 1e-8)
                .unwrap();
            let col = sb.basis.column(j);
            for (i, v) in col.iter().enumerate() {
                if i == idx {
                    assert!((v - c(1.0, 0.0)).norm() < 1e-8, "sign convention");
                } else {
                    assert!(v.norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn standard_basis_recovers_conjugated_pencil() {
        let p = diag_pencil(&[1.0, 2.0, 3.0, 4.0]);
        let t = MatC::from_rows(vec![
            vec![c(1.0, 0.0), c(0.4, 0.1), c(-0.2, 0.0), c(0.0, 0.3)],
            vec![c(0.2, -0.1), c(1.2, 0.0), c(0.1, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-0.3, 0.2), c(0.8, 0.0), c(0.25, 0.0)],
            vec![c(0.3, 0.0), c(0.0, 0.1), c(0.0, -0.2), c(1.1, 0.0)],
        ])
        .unwrap();
        let q = pullback(&p, &t).unwrap();
        let sb = standard_basis(&q).unwrap();
        // rebuilt forms must match the pencil matrices
        let winv = sb.basis.inverse().unwrap();
        let winv_t = winv.transpose();
        let rebuilt1 = winv_t.mul(&MatC::diagonal(&sb.roots)).mul(&winv);
        let rebuilt2 = winv_t.mul(&winv);
        let rel1 = rebuilt1.sub(q.phi1.matrix()).max_norm() / q.phi1.matrix().max_norm();
        let rel2 = rebuilt2.sub(q.phi2.matrix()).max_norm() / q.phi2.matrix().max_norm();
        assert!(rel1 < 1e-7, "phi1 rebuild error {rel1}");
        assert!(rel2 < 1e-7, "phi2 rebuild error {rel2}");
        // columns recover T^{-1} e_i up to sign and order
        let tinv = t.inverse().unwrap();
        for j in 0..4 {
            let col = sb.basis.column(j);
            let idx = [1.0, 2.0, 3.0, 4.0]
                .iter()
                .position(|v| (c(*v, 0.0) - sb.roots[j]).norm() < 1e-7)
                .unwrap();
            let target = tinv.column(idx);
            assert!(projective_distance(&col, &target) < 1e-7);
        }
    }

    #[test]
    fn repeated_root_pencil_rejected_by_standard_basis() {
        let p = diag_pencil(&[2.0, 2.0, 3.0]);
        assert!(standard_basis(&p).is_err());
    }

    #[test]
    fn alpha_map_diag_and_conjugated() {
        let p = diag_pencil(&[1.0, 2.0, 3.0, 4.0]);
        let a = alpha_map(&p).unwrap();
        let expect = MatC::diagonal(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        assert!(a.sub(&expect).max_norm() < 1e-8);

        let t = MatC::from_rows(vec![
            vec![c(1.0, 0.1), c(0.2, 0.0), c(0.0, -0.3), c(0.1, 0.0)],
            vec![c(0.0, 0.0), c(0.9, 0.0), c(0.3, 0.1), c(0.0, 0.2)],
            vec![c(-0.2, 0.0), c(0.1, 0.1), c(1.3, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.1), c(0.0, 0.0), c(-0.1, 0.0), c(0.8, 0.0)],
        ])
        .unwrap();
        let q = pullback(&p, &t).unwrap();
        // pullback acts by T^T A T, so the multiplier of the pulled-back
        // pencil is T^{-1} alpha T
        let aq = alpha_map(&q).unwrap();
        let tinv = t.inverse().unwrap();
        let expect_q = tinv.mul(&a).mul(&t);
        assert!(
            aq.sub(&expect_q).max_norm() / expect_q.max_norm() < 1e-7,
            "alpha map must conjugate"
        );
        // applying alpha twice on a standard column scales by tau^2
        let sb = standard_basis(&q).unwrap();
        let col = sb.basis.column(0);
        let twice = aq.mul_vec(&aq.mul_vec(&col));
        let tau2 = sb.roots[0] * sb.roots[0];
        for (lhs, rhs) in twice.iter().zip(col.iter().map(|z| z * tau2)) {
            assert!((lhs - rhs).norm() < 1e-7);
        }
    }

    #[test]
    fn transform_pair_identity_and_unimodularity() {
        let p = diag_pencil(&[1.0, 2.0, 3.0]);
        let id = Sl2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        let q = transform_pair(&p, &id).unwrap();
        assert!(q.phi1.matrix().sub(p.phi1.matrix()).max_norm() == 0.0);

        let bad = Sl2::new(c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert!(matches!(
            transform_pair(&p, &bad),
            Err(Error::NotUnimodular(_))
        ));
    }

    #[test]
    fn transform_pair_moves_roots_by_moebius() {
        let p = diag_pencil(&[1.0, 2.0, 3.0]);
        let g = Sl2::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        let q = transform_pair(&p, &g).unwrap();
        let (ok, roots) = is_nonsingular(&q, DEFAULT_TOL).unwrap();
        assert!(ok);
        let expected: Vec<C64> = [1.0, 2.0, 3.0]
            .iter()
            .map(|t| moebius_root(&g, c(*t, 0.0)).unwrap())
            .collect();
        let m = match_roots(&expected, &roots).unwrap();
        assert!(m.max_distance < 1e-9);
    }

    #[test]
    fn reflection_pullbacks_fix_diagonal_pencils_exactly() {
        // the 2^(n-1) coordinate reflections (sign patterns modulo a global
        // sign) satisfy diag(eps)^T A diag(eps) = A for diagonal A
        let p = diag_pencil(&[1.0, 2.0, 3.0, 4.0]);
        for bits in 0..8u32 {
            let eps: Vec<C64> = (0..4)
                .map(|i| {
                    if i < 3 && (bits >> i) & 1 == 1 {
                        c(-1.0, 0.0)
                    } else {
                        c(1.0, 0.0)
                    }
                })
                .collect();
            let t = MatC::diagonal(&eps);
            let q = pullback(&p, &t).unwrap();
            assert_eq!(q.phi1.matrix(), p.phi1.matrix());
            assert_eq!(q.phi2.matrix(), p.phi2.matrix());
        }
    }

    #[test]
    fn discriminant_interpolation_matches_direct_determinant() {
        // n up to 10: compare the interpolated form against direct
        // determinant evaluation at 5 fresh (s, t) points
        for n in [4usize, 7, 10] {
            let taus: Vec<f64> = (0..n).map(|k| 0.6 + 0.83 * k as f64).collect();
            let p0 = diag_pencil(&taus);
            let t = MatC::from_fn(n, n, |i, j| {
                c(
                    if i == j { 1.0 } else { 0.0 } + 0.13 * (((i * 7 + j * 3) % 5) as f64 - 2.0),
                    0.09 * (((i + 2 * j) % 7) as f64 - 3.0),
                )
            });
            let p = pullback(&p0, &t).unwrap();
            let disc = discriminant(&p).unwrap();
            // fix the projective scale at one probe, then compare the rest
            let probes: Vec<(C64, C64)> = (0..5)
                .map(|k| {
                    let kf = k as f64;
                    (c(0.7 + 0.31 * kf, -0.2 + 0.11 * kf), c(-0.4 + 0.23 * kf, 0.5 - 0.17 * kf))
                })
                .collect();
            let direct = |s: C64, tt: C64| {
                p.phi1.matrix().scale(s).sub(&p.phi2.matrix().scale(tt)).det()
            };
            let gamma = direct(probes[0].0, probes[0].1) / disc.eval(probes[0].0, probes[0].1);
            for (s, tt) in &probes[1..] {
                let want = direct(*s, *tt);
                let got = gamma * disc.eval(*s, *tt);
                assert!(
                    (want - got).norm() <= 1e-8 * want.norm().max(1e-12),
                    "n={n}: interpolation drift {:.3e}",
                    (want - got).norm() / want.norm()
                );
            }
        }
    }

    #[test]
    fn pullback_by_scalar_matrix_scales_forms() {
        let p = diag_pencil(&[1.0, 2.0, 3.0, 4.0]);
        let t = MatC::diagonal(&[c(2.5, 0.0); 4]);
        let q = pullback(&p, &t).unwrap();
        let expect = p.phi1.matrix().scale(c(6.25, 0.0));
        assert!(q.phi1.matrix().sub(&expect).max_norm() < 1e-12);
        let da = discriminant(&p).unwrap();
        let db = discriminant(&q).unwrap();
        assert!(da.projectively_close(&db, 1e-10));
    }

    #[test]
    fn binary_form_roots_round_trip() {
        let roots = vec![c(1.0, 0.5), c(-2.0, 0.0), c(0.3, -1.1)];
        let f = BinaryForm::from_roots(&roots).unwrap();
        let back = f.finite_roots(DEFAULT_TOL).unwrap();
        let m = match_roots(&roots, &back).unwrap();
        assert!(m.max_distance < 1e-10);
        for r in &roots {
            assert!(f.eval(c(1.0, 0.0), *r).norm() < 1e-10);
        }
    }
}
