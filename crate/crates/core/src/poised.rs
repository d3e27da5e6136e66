//! Poised three-dimensional subspaces, the kernel of the moduli map at a
//! regular point, the refined moduli data, and injectivity certificates.
//!
//! A subspace is poised by a good pair when it is spanned by
//! `{u, alpha(u), alpha^2(u)}` for a vector u with all standard coordinates
//! nonzero; the witness `[u]` is projectively unique for n >= 4. At a
//! regular point of X the kernel of the moduli map is such a subspace, and
//! its squared witness coordinates have a closed form in the discriminant
//! roots and the variety parameters.

use crate::error::{Error, Result};
use crate::moduli::Sl2;
use crate::numeric::{
    chordal_distance, homogeneous_nullvector, numerical_rank, MatC, ProjVec, C64, DEFAULT_TOL,
    DISTINCT_THRESHOLD,
};
use crate::pencil::{standard_basis, Pencil, StandardBasis};
use crate::variety::{
    assumption_scaled, is_regular, tangent_frame, DiagonalIntersection, SurfacePoint,
    TangentFrame,
};

/// The span of `{u, alpha(u), alpha^2(u)}` for a general witness u, in
/// ambient coordinates.
#[derive(Debug, Clone)]
pub struct PoisedSubspace {
    /// n x 3 matrix whose columns are u, alpha(u), alpha^2(u).
    pub basis: MatC,
    pub witness: ProjVec,
}

/// Relative threshold for a standard coordinate to count as nonzero.
fn generality_defect(std_coords: &[C64]) -> Option<usize> {
    let max = std_coords.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    std_coords
        .iter()
        .position(|z| z.norm() <= DISTINCT_THRESHOLD * max)
}

/// Builds the poised span of a general vector `u` (ambient coordinates).
pub fn poised_span(p: &Pencil, u: &[C64]) -> Result<PoisedSubspace> {
    let sb = standard_basis(p)?;
    poised_span_with_basis(p, &sb, u)
}

fn poised_span_with_basis(_p: &Pencil, sb: &StandardBasis, u: &[C64]) -> Result<PoisedSubspace> {
    let n = sb.roots.len();
    if u.len() != n {
        return Err(Error::InvalidInput("vector length mismatch".into()));
    }
    let winv = sb.basis.inverse()?;
    let u_std = winv.mul_vec(u);
    if let Some(i) = generality_defect(&u_std) {
        return Err(Error::NotGeneral(i));
    }
    let a1: Vec<C64> = u_std.iter().zip(&sb.roots).map(|(z, t)| z * t).collect();
    let a2: Vec<C64> = a1.iter().zip(&sb.roots).map(|(z, t)| z * t).collect();
    let cols = vec![
        u.to_vec(),
        sb.basis.mul_vec(&a1),
        sb.basis.mul_vec(&a2),
    ];
    let basis = MatC::from_columns(&cols)?;
    if numerical_rank(&basis, DEFAULT_TOL) != 3 {
        return Err(Error::IllConditioned(
            "span of u, alpha(u), alpha^2(u) is rank-deficient".into(),
        ));
    }
    Ok(PoisedSubspace {
        basis,
        witness: ProjVec::new(u.to_vec())?,
    })
}

/// Decides whether a 3-dimensional span (columns of `span`, ambient
/// coordinates) is poised by the pencil, returning the projectively unique
/// general witness when it is.
pub fn is_poised(p: &Pencil, span: &MatC) -> Result<Option<ProjVec>> {
    let n = p.dim();
    if n < 4 {
        return Err(Error::DimensionTooSmall(
            "witness uniqueness needs dim >= 4".into(),
        ));
    }
    if span.rows() != n || span.cols() != 3 {
        return Err(Error::InvalidInput("span must be n x 3".into()));
    }
    if numerical_rank(span, DEFAULT_TOL) != 3 {
        return Err(Error::InvalidInput("span is not 3-dimensional".into()));
    }
    let sb = standard_basis(p)?;
    let winv = sb.basis.inverse()?;
    let s_std = winv.mul(span);

    // Hermitian orthonormal basis q of the span, for the residual projector
    let q = gram_schmidt(&s_std);
    // conditions: (I - q q^H) alpha^l s_std c = 0 for l = 1, 2
    let mut rows: Vec<Vec<C64>> = Vec::with_capacity(2 * n);
    for l in 1..=2 {
        let mut m = s_std.clone();
        for _ in 0..l {
            for i in 0..n {
                for j in 0..3 {
                    m[(i, j)] *= sb.roots[i];
                }
            }
        }
        let projected = residual(&q, &m);
        for i in 0..n {
            rows.push(projected.row(i).to_vec());
        }
    }
    let system = MatC::from_rows(rows)?;
    let coeff = match homogeneous_nullvector(&system, DEFAULT_TOL) {
        Ok(v) => v,
        Err(Error::FullRank) | Err(Error::AmbiguousNullspace(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let u_std = s_std.mul_vec(coeff.coords());
    if generality_defect(&u_std).is_some() {
        return Ok(None);
    }
    // re-span check: u, alpha u, alpha^2 u must fill the original space
    let au: Vec<C64> = u_std.iter().zip(&sb.roots).map(|(z, t)| z * t).collect();
    let aau: Vec<C64> = au.iter().zip(&sb.roots).map(|(z, t)| z * t).collect();
    let mut all = Vec::new();
    for j in 0..3 {
        all.push(s_std.column(j));
    }
    all.push(u_std.clone());
    all.push(au);
    all.push(aau);
    if numerical_rank(&MatC::from_columns(&all)?, 1e-6) != 3 {
        return Ok(None);
    }
    let ambient = sb.basis.mul_vec(&u_std);
    Ok(Some(ProjVec::new(ambient)?))
}

/// Hermitian Gram-Schmidt, returning an orthonormal basis of the column
/// span.
fn gram_schmidt(m: &MatC) -> MatC {
    let mut q = m.clone();
    for j in 0..q.cols() {
        for prev in 0..j {
            let mut inner = C64::new(0.0, 0.0);
            for i in 0..q.rows() {
                inner += q[(i, prev)].conj() * q[(i, j)];
            }
            for i in 0..q.rows() {
                let qp = q[(i, prev)];
                q[(i, j)] -= inner * qp;
            }
        }
        let norm: f64 = (0..q.rows()).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for i in 0..q.rows() {
                q[(i, j)] /= norm;
            }
        }
    }
    q
}

/// `(I - q q^H) m` for an orthonormal q.
fn residual(q: &MatC, m: &MatC) -> MatC {
    let mut qh = MatC::zeros(q.cols(), q.rows());
    for i in 0..q.rows() {
        for j in 0..q.cols() {
            qh[(j, i)] = q[(i, j)].conj();
        }
    }
    m.sub(&q.mul(&qh.mul(m)))
}

/// The squared standard coordinates of the witness, as a projective point:
/// the image of the poised subspace under the squaring chart attached to a
/// standard basis.
pub fn tilde_v(p: &Pencil, s: &PoisedSubspace) -> Result<ProjVec> {
    let sb = standard_basis(p)?;
    let winv = sb.basis.inverse()?;
    let u_std = winv.mul_vec(s.witness.coords());
    if generality_defect(&u_std).is_some() {
        return Err(Error::NotPoised);
    }
    // the stored witness must actually generate the stored span
    let au: Vec<C64> = u_std.iter().zip(&sb.roots).map(|(z, t)| z * t).collect();
    let aau: Vec<C64> = au.iter().zip(&sb.roots).map(|(z, t)| z * t).collect();
    let s_std = winv.mul(&s.basis);
    let all = vec![
        s_std.column(0),
        s_std.column(1),
        s_std.column(2),
        u_std.clone(),
        au,
        aau,
    ];
    if numerical_rank(&MatC::from_columns(&all)?, 1e-6) != 3 {
        return Err(Error::NotPoised);
    }
    ProjVec::new(u_std.iter().map(|z| z * z).collect())
}

/// The kernel of the moduli map at a regular point: generators in frame
/// coordinates, the witness in standard coordinates of the restricted
/// pencil, and the discriminant roots pairing the coordinates.
#[derive(Debug, Clone)]
pub struct KernelSubspace {
    /// u^(0), u^(1), u^(2) on frame coordinates.
    pub u_gen: [Vec<C64>; 3],
    /// Standard coordinates v^(0), v^(1), v^(2) of the generators; the
    /// witness is v^(0).
    pub v: [Vec<C64>; 3],
    /// Discriminant roots in the order used by the standard basis.
    pub alphas: Vec<C64>,
    pub standard: StandardBasis,
    pub frame: TangentFrame,
}

/// Computes the kernel generators of the moduli map at a regular point
/// from closed formulas (no numerical differentiation). Needs conditions
/// (i), (ii), (iv); the Möbius-genericity condition does not enter the
/// kernel formulas.
pub fn kernel_subspace(
    x_var: &DiagonalIntersection,
    point: &SurfacePoint,
) -> Result<KernelSubspace> {
    let report = is_regular(x_var, point)?;
    if !report.weakly_regular() {
        return Err(Error::NotRegular(format!(
            "flags: general={}, nonsingular={}, nondegenerate={}",
            report.phi_general, report.sff_nonsingular, report.restrictions_nondegenerate
        )));
    }
    let n = x_var.n();
    let frame = tangent_frame(x_var, point)?;
    let sb = standard_basis(&frame.restricted)?;
    let alphas = sb.roots.clone();
    let lam = frame.lambdas_rel().to_vec();
    let x_scaled = assumption_scaled(&lam, frame.x_rel(), &alphas);

    // u^(l)_i = x_i sum_j (lam_pivot - lam_i) a_j^l / ((lam_i - a_j)(lam_pivot - a_j))
    // with the first pivot in the last-three block playing lam_pivot
    let pivot = lam[n];
    let mut u_gen: [Vec<C64>; 3] = [vec![], vec![], vec![]];
    for (l, slot) in u_gen.iter_mut().enumerate() {
        *slot = (0..n)
            .map(|i| {
                let mut acc = C64::new(0.0, 0.0);
                for a in &alphas {
                    let mut term = (pivot - lam[i]) / ((lam[i] - a) * (pivot - a));
                    for _ in 0..l {
                        term *= a;
                    }
                    acc += term;
                }
                acc * x_scaled[i]
            })
            .collect();
    }

    let winv = sb.basis.inverse()?;
    let v = [
        winv.mul_vec(&u_gen[0]),
        winv.mul_vec(&u_gen[1]),
        winv.mul_vec(&u_gen[2]),
    ];
    Ok(KernelSubspace {
        u_gen,
        v,
        alphas,
        standard: sb,
        frame,
    })
}

impl KernelSubspace {
    /// The closed form for the squared witness coordinates:
    /// `-prod_{k != i}(a_i - a_k) / prod_j (a_i - lambda_j)`.
    pub fn witness_squared_closed_form(&self, lambdas: &[C64]) -> Vec<C64> {
        closed_form_witness_squared(&self.alphas, lambdas)
    }

    /// The kernel as a poised subspace of the restricted pencil.
    pub fn poised(&self) -> Result<PoisedSubspace> {
        let basis = MatC::from_columns(&[
            self.u_gen[0].clone(),
            self.u_gen[1].clone(),
            self.u_gen[2].clone(),
        ])?;
        if numerical_rank(&basis, DEFAULT_TOL) != 3 {
            return Err(Error::IllConditioned("kernel generators rank-deficient".into()));
        }
        Ok(PoisedSubspace {
            basis,
            witness: ProjVec::new(self.u_gen[0].clone())?,
        })
    }
}

/// `z_i = -prod_{k != i}(a_i - a_k) / prod_j (a_i - lam_j)`.
fn closed_form_witness_squared(alphas: &[C64], lambdas: &[C64]) -> Vec<C64> {
    alphas
        .iter()
        .enumerate()
        .map(|(i, ai)| {
            let mut num = C64::new(-1.0, 0.0);
            for (k, ak) in alphas.iter().enumerate() {
                if k != i {
                    num *= ai - ak;
                }
            }
            let mut den = C64::new(1.0, 0.0);
            for l in lambdas {
                den *= ai - l;
            }
            num / den
        })
        .collect()
}

/// The refined moduli data at a regular point: the discriminant roots in a
/// canonical order and the projective squared-witness vector paired with
/// them.
#[derive(Debug, Clone)]
pub struct RefinedSample {
    pub alphas: Vec<C64>,
    pub v: ProjVec,
}

/// Evaluates the refined moduli map at a regular point via the closed form.
pub fn refined_mu(x_var: &DiagonalIntersection, point: &SurfacePoint) -> Result<RefinedSample> {
    let report = is_regular(x_var, point)?;
    if !report.is_regular() {
        return Err(Error::NotRegular("refined moduli needs a regular point".into()));
    }
    let alphas = report.alpha_roots; // sorted canonically by is_regular
    let v = closed_form_witness_squared(&alphas, x_var.lambdas());
    Ok(RefinedSample {
        alphas,
        v: ProjVec::new(v)?,
    })
}

/// The squared-witness vector of the fiber sibling reached by g: with
/// `lam'_j = (d lam_j - b)/(-c lam_j + a)`, returns
/// `z_i = -prod_{k != i}(a_i - a_k) / prod_j (a_i - lam'_j)` paired with the
/// untransformed roots.
pub fn fiber_point_image(
    x_var: &DiagonalIntersection,
    point: &SurfacePoint,
    g: &Sl2,
) -> Result<RefinedSample> {
    g.check_unimodular()?;
    let report = is_regular(x_var, point)?;
    if !report.is_regular() {
        return Err(Error::NotRegular("fiber image needs a regular point".into()));
    }
    let alphas = report.alpha_roots;
    let ginv = g.inverse();
    let mut moved = Vec::with_capacity(x_var.lambdas().len());
    for l in x_var.lambdas() {
        match ginv.moebius(*l) {
            Ok(v) => moved.push(v),
            Err(_) => {
                return Err(Error::IllConditioned(
                    "a transformed parameter lands at infinity".into(),
                ))
            }
        }
    }
    for a in &alphas {
        for l in &moved {
            if chordal_distance(*a, *l) <= DISTINCT_THRESHOLD {
                return Err(Error::IllConditioned(
                    "a transformed parameter collides with a root".into(),
                ));
            }
        }
    }
    let v = closed_form_witness_squared(&alphas, &moved);
    Ok(RefinedSample {
        alphas,
        v: ProjVec::new(v)?,
    })
}

/// The tangent image data of the refined moduli map at a regular point, in
/// standard coordinates indexed by the discriminant roots.
#[derive(Debug, Clone)]
pub struct TangentImage {
    pub alphas: Vec<C64>,
    pub w: [Vec<C64>; 3],
    pub vx: Vec<C64>,
    /// dim span{w0, w1, w2, vx}
    pub rank_t4: usize,
    /// dim span{w0, alpha w0, alpha^2 w0, vx, alpha vx}
    pub rank_t5: usize,
}

/// Computes `w^(l)_i = vx_i * sum_j lam_j^l / (a_i - lam_j)` and the two
/// rank statistics that certify injectivity.
pub fn tangent_image(
    x_var: &DiagonalIntersection,
    point: &SurfacePoint,
) -> Result<TangentImage> {
    let report = is_regular(x_var, point)?;
    if !report.is_regular() {
        return Err(Error::NotRegular("tangent image needs a regular point".into()));
    }
    let alphas = report.alpha_roots;
    let vx = closed_form_witness_squared(&alphas, x_var.lambdas());
    let mut w: [Vec<C64>; 3] = [vec![], vec![], vec![]];
    for (l, slot) in w.iter_mut().enumerate() {
        *slot = alphas
            .iter()
            .zip(&vx)
            .map(|(a, v)| {
                let mut acc = C64::new(0.0, 0.0);
                for lam in x_var.lambdas() {
                    let mut term = C64::new(1.0, 0.0) / (a - lam);
                    for _ in 0..l {
                        term *= lam;
                    }
                    acc += term;
                }
                acc * v
            })
            .collect();
    }
    let mul_alpha = |v: &[C64]| -> Vec<C64> {
        v.iter().zip(&alphas).map(|(z, a)| z * a).collect()
    };
    let t4 = MatC::from_columns(&[w[0].clone(), w[1].clone(), w[2].clone(), vx.clone()])?;
    let t5 = MatC::from_columns(&[
        w[0].clone(),
        mul_alpha(&w[0]),
        mul_alpha(&mul_alpha(&w[0])),
        vx.clone(),
        mul_alpha(&vx),
    ])?;
    Ok(TangentImage {
        alphas,
        w,
        vx,
        rank_t4: numerical_rank(&t4, DEFAULT_TOL),
        rank_t5: numerical_rank(&t5, DEFAULT_TOL),
    })
}

/// Certifies that the refined moduli map has injective derivative at the
/// point: the tangent image spans must reach dimensions 4 and 5. Only
/// meaningful for n > 4: five vectors cannot be independent in dimension
/// four.
pub fn injectivity_certificate(
    x_var: &DiagonalIntersection,
    point: &SurfacePoint,
) -> Result<bool> {
    if x_var.n() <= 4 {
        return Err(Error::DimensionTooSmall(format!(
            "rank-5 certificate needs dim > 4, got {}",
            x_var.n()
        )));
    }
    let image = tangent_image(x_var, point)?;
    Ok(image.rank_t4 == 4 && image.rank_t5 == 5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::projective_distance;
    use crate::pencil::{pullback, transform_pair, BinaryForm};
    use crate::variety::point_from_fiber;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn diag_pencil(taus: &[f64]) -> Pencil {
        let d: Vec<C64> = taus.iter().map(|t| c(*t, 0.0)).collect();
        Pencil::from_matrices(MatC::diagonal(&d), MatC::identity(taus.len())).unwrap()
    }

    fn test_variety(n: usize) -> DiagonalIntersection {
        let lam: Vec<C64> = (0..n + 3)
            .map(|k| c(1.0 + 0.9 * k as f64, 0.15 * ((k % 3) as f64 - 1.0)))
            .collect();
        DiagonalIntersection::new(lam).unwrap()
    }

    fn regular_point(x: &DiagonalIntersection) -> SurfacePoint {
        // equally spaced roots would admit a Möbius reflection; stagger them
        let n = x.n();
        let roots: Vec<C64> = (0..n)
            .map(|k| {
                let kf = k as f64;
                c(-1.3 - 0.8 * kf - 0.07 * kf * kf, 0.4 + 0.3 * kf + 0.11 * kf * kf)
            })
            .collect();
        let psi = BinaryForm::from_roots(&roots).unwrap();
        let (p, general) = point_from_fiber(x, &psi, &vec![false; n + 3]).unwrap();
        assert!(general);
        p
    }

    #[test]
    fn poised_span_vandermonde_rank() {
        let p = diag_pencil(&[1.0, 2.0, 3.0, 4.0]);
        let u = vec![c(1.0, 0.0); 4];
        let s = poised_span(&p, &u).unwrap();
        assert_eq!(numerical_rank(&s.basis, DEFAULT_TOL), 3);
    }

    #[test]
    fn poised_span_rejects_zero_coordinate() {
        let p = diag_pencil(&[1.0, 2.0, 3.0, 4.0]);
        let u = vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)];
        // the offending index refers to the internal root order
        assert!(matches!(poised_span(&p, &u), Err(Error::NotGeneral(_))));
    }

    #[test]
    fn is_poised_round_trip_recovers_witness() {
        let p = diag_pencil(&[1.0, -2.0, 3.0, 0.5, 2.2]);
        let u = vec![
            c(1.0, 0.3),
            c(-0.7, 0.2),
            c(0.4, -1.0),
            c(1.3, 0.0),
            c(0.2, 0.9),
        ];
        let s = poised_span(&p, &u).unwrap();
        let w = is_poised(&p, &s.basis).unwrap().expect("span is poised");
        assert!(projective_distance(w.coords(), &u) < 1e-8);
    }

    #[test]
    fn coordinate_span_is_not_poised() {
        let p = diag_pencil(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let mut cols = Vec::new();
        for j in 0..3 {
            let mut e = vec![c(0.0, 0.0); 5];
            e[j] = c(1.0, 0.0);
            cols.push(e);
        }
        let span = MatC::from_columns(&cols).unwrap();
        assert!(is_poised(&p, &span).unwrap().is_none());
    }

    #[test]
    fn pair_independence_of_witness() {
        // same subspace, transformed pair: witness coordinates scale by
        // (c a_i + d)^-2 in the shared standard lines
        let p = diag_pencil(&[1.0, -2.0, 3.0, 0.5, 2.2]);
        let sb = standard_basis(&p).unwrap();
        let u = vec![
            c(0.8, 0.1),
            c(-0.5, 0.7),
            c(1.2, -0.2),
            c(0.3, 0.4),
            c(-1.1, 0.6),
        ];
        let s = poised_span(&p, &u).unwrap();
        let g = Sl2::from_general(c(1.1, 0.0), c(0.4, 0.1), c(-0.2, 0.05), c(0.9, 0.0)).unwrap();
        let p2 = transform_pair(&p, &g).unwrap();
        let w2 = is_poised(&p2, &s.basis).unwrap().expect("still poised");
        let winv = sb.basis.inverse().unwrap();
        let u_std = winv.mul_vec(&u);
        let w2_std = winv.mul_vec(w2.coords());
        let expected: Vec<C64> = u_std
            .iter()
            .zip(&sb.roots)
            .map(|(z, a)| {
                let f = g.c * a + g.d;
                z * f * f
            })
            .collect();
        assert!(
            projective_distance(&w2_std, &expected) < 1e-7,
            "witness transform law"
        );
    }

    #[test]
    fn gl_equivariance_of_spans() {
        let p = diag_pencil(&[1.0, 2.2, 3.1, 4.5, 5.9]);
        let u = vec![
            c(0.8, 0.1),
            c(-0.5, 0.7),
            c(1.2, -0.2),
            c(0.3, 0.4),
            c(-1.1, 0.6),
        ];
        let t = MatC::from_fn(5, 5, |i, j| {
            c(
                if i == j { 1.0 } else { 0.0 } + 0.1 * ((i * 5 + j) % 3) as f64,
                0.05 * ((i + 2 * j) % 4) as f64,
            )
        });
        let s = poised_span(&p, &u).unwrap();
        let pt = pullback(&p, &t).unwrap();
        let tinv = t.inverse().unwrap();
        let s2 = poised_span(&pt, &tinv.mul_vec(&u)).unwrap();
        // T^{-1}(span) equals the span computed for the pulled-back pair
        let mut cols = Vec::new();
        for j in 0..3 {
            cols.push(tinv.mul_vec(&s.basis.column(j)));
        }
        for j in 0..3 {
            cols.push(s2.basis.column(j));
        }
        let stacked = MatC::from_columns(&cols).unwrap();
        assert_eq!(numerical_rank(&stacked, 1e-6), 3);
    }

    #[test]
    fn tilde_v_squares_witness_and_ignores_signs() {
        let p = diag_pencil(&[1.0, 2.0, 3.0, 4.0]);
        let u = vec![c(1.0, 0.0); 4];
        let s = poised_span(&p, &u).unwrap();
        let v = tilde_v(&p, &s).unwrap();
        for z in v.coords() {
            assert!((z - c(1.0, 0.0)).norm() < 1e-9);
        }
        // flipping witness signs leaves the image unchanged
        let flipped = vec![c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)];
        let s2 = poised_span(&p, &flipped).unwrap();
        let v2 = tilde_v(&p, &s2).unwrap();
        assert!(projective_distance(v.coords(), v2.coords()) < 1e-12);
    }

    #[test]
    fn tilde_v_is_equivariant_under_pullback() {
        // pull back the pencil and the witness: with the two standard bases
        // matched root-by-root, the squared-coordinate image is unchanged
        let p = diag_pencil(&[1.0, -2.0, 3.0, 0.5, 2.2]);
        let u = vec![
            c(0.9, 0.2),
            c(-0.6, 0.8),
            c(1.1, -0.3),
            c(0.4, 0.5),
            c(-1.2, 0.7),
        ];
        let t = MatC::from_fn(5, 5, |i, j| {
            c(
                if i == j { 1.0 } else { 0.0 } + 0.12 * (((i * 3 + j) % 4) as f64 - 1.5),
                0.07 * (((2 * i + j) % 5) as f64 - 2.0),
            )
        });
        let s = poised_span(&p, &u).unwrap();
        let v1 = tilde_v(&p, &s).unwrap();
        let pt = pullback(&p, &t).unwrap();
        let tinv = t.inverse().unwrap();
        let s2 = poised_span(&pt, &tinv.mul_vec(&u)).unwrap();
        let v2 = tilde_v(&pt, &s2).unwrap();
        // align the root orders of the two standard bases
        let r1 = standard_basis(&p).unwrap().roots;
        let r2 = standard_basis(&pt).unwrap().roots;
        let m = crate::numeric::match_roots(&r1, &r2).unwrap();
        assert!(m.max_distance < 1e-8);
        let permuted: Vec<C64> = m.perm.iter().map(|j| v2.coords()[*j]).collect();
        assert!(
            projective_distance(v1.coords(), &permuted) < 1e-7,
            "squared witness must not move under pullback"
        );
    }

    #[test]
    fn fiber_image_rejects_parameter_root_collision() {
        let x = test_variety(5);
        let p = regular_point(&x);
        let report = crate::variety::is_regular(&x, &p).unwrap();
        let alpha = report.alpha_roots[0];
        let lam = x.lambdas()[0];
        // with c = 0, a = d = 1: lambda' = lambda - b; send lambda_1 onto alpha_1
        let g = Sl2::new(c(1.0, 0.0), lam - alpha, c(0.0, 0.0), c(1.0, 0.0));
        assert!(matches!(
            fiber_point_image(&x, &p, &g),
            Err(Error::IllConditioned(_))
        ));
    }

    #[test]
    fn certificate_demands_regularity() {
        // a fiber point over a form with a root at some lambda has a zero
        // coordinate and is not regular
        let x = test_variety(5);
        let mut roots: Vec<C64> = (0..5)
            .map(|k| c(-2.0 - 0.9 * k as f64, 0.5 + 0.4 * k as f64))
            .collect();
        roots[0] = x.lambdas()[2];
        let psi = crate::pencil::BinaryForm::from_roots(&roots).unwrap();
        let (p, general) = point_from_fiber(&x, &psi, &[false; 8]).unwrap();
        assert!(!general);
        assert!(matches!(
            injectivity_certificate(&x, &p),
            Err(Error::NotRegular(_))
        ));
    }

    #[test]
    fn refined_mu_ignores_fiber_sheet() {
        let x = test_variety(5);
        let roots: Vec<C64> = (0..5)
            .map(|k| {
                let kf = k as f64;
                c(-1.1 - 0.7 * kf - 0.05 * kf * kf, 0.3 + 0.25 * kf + 0.09 * kf * kf)
            })
            .collect();
        let psi = crate::pencil::BinaryForm::from_roots(&roots).unwrap();
        let (p1, _) = point_from_fiber(&x, &psi, &[false; 8]).unwrap();
        let mut signs = vec![false; 8];
        signs[1] = true;
        signs[4] = true;
        let (p2, _) = point_from_fiber(&x, &psi, &signs).unwrap();
        let a = refined_mu(&x, &p1).unwrap();
        let b = refined_mu(&x, &p2).unwrap();
        let m = crate::numeric::match_roots(&a.alphas, &b.alphas).unwrap();
        assert!(m.max_distance < 1e-9);
        let permuted: Vec<C64> = m.perm.iter().map(|j| b.v.coords()[*j]).collect();
        assert!(projective_distance(a.v.coords(), &permuted) < 1e-9);
    }

    #[test]
    fn kernel_relations_and_closed_form() {
        let x = test_variety(5);
        let p = regular_point(&x);
        let k = kernel_subspace(&x, &p).unwrap();
        let n = x.n();
        // v^(1) = alpha v^(0), v^(2) = alpha^2 v^(0)
        let scale: f64 = k.v[0].iter().map(|z| z.norm()).fold(0.0, f64::max);
        for i in 0..n {
            let a = k.alphas[i];
            assert!((k.v[1][i] - a * k.v[0][i]).norm() < 1e-7 * scale);
            assert!((k.v[2][i] - a * a * k.v[0][i]).norm() < 1e-7 * scale);
        }
        // squared witness against the closed form
        let closed = k.witness_squared_closed_form(x.lambdas());
        for i in 0..n {
            let got = k.v[0][i] * k.v[0][i];
            assert!(
                (got - closed[i]).norm() < 1e-7 * closed[i].norm().max(1e-12),
                "coordinate {i}: {got} vs {}",
                closed[i]
            );
        }
        // the kernel is poised with witness u^(0)
        let poised = k.poised().unwrap();
        let w = is_poised(&k.frame.restricted, &poised.basis)
            .unwrap()
            .expect("kernel must be poised");
        assert!(projective_distance(w.coords(), &k.u_gen[0]) < 1e-7);
    }

    #[test]
    fn refined_mu_is_fiber_image_at_identity() {
        let x = test_variety(5);
        let p = regular_point(&x);
        let a = refined_mu(&x, &p).unwrap();
        let b = fiber_point_image(&x, &p, &Sl2::identity()).unwrap();
        assert!(projective_distance(a.v.coords(), b.v.coords()) < 1e-12);
        // and matches the kernel witness squared, projectively
        let k = kernel_subspace(&x, &p).unwrap();
        let squared: Vec<C64> = k.v[0].iter().map(|z| z * z).collect();
        let m = crate::numeric::match_roots(&a.alphas, &k.alphas).unwrap();
        let permuted: Vec<C64> = m.perm.iter().map(|j| squared[*j]).collect();
        assert!(projective_distance(a.v.coords(), &permuted) < 1e-7);
    }

    #[test]
    fn fiber_image_two_path_consistency() {
        // path A: closed formula with transformed parameters;
        // path B: construct the sibling variety explicitly and read the
        // kernel witness off the fiber point over the same roots
        let x = test_variety(5);
        let p = regular_point(&x);
        let g = Sl2::from_general(c(1.05, 0.1), c(0.2, -0.1), c(0.1, 0.05), c(0.95, 0.0)).unwrap();
        let image = fiber_point_image(&x, &p, &g).unwrap();

        let ginv = g.inverse();
        let moved: Vec<C64> = x
            .lambdas()
            .iter()
            .map(|l| ginv.moebius(*l).unwrap())
            .collect();
        let xp = DiagonalIntersection::new(moved).unwrap();
        let psi = BinaryForm::from_roots(&image.alphas).unwrap();
        let (point_b, general) = point_from_fiber(&xp, &psi, &[false; 8]).unwrap();
        assert!(general);
        let kb = kernel_subspace(&xp, &point_b).unwrap();
        let squared: Vec<C64> = kb.v[0].iter().map(|z| z * z).collect();
        let m = crate::numeric::match_roots(&image.alphas, &kb.alphas).unwrap();
        assert!(m.max_distance < 1e-7, "theta roots must round trip");
        let permuted: Vec<C64> = m.perm.iter().map(|j| squared[*j]).collect();
        assert!(
            projective_distance(image.v.coords(), &permuted) < 1e-6,
            "two-path distance {}",
            projective_distance(image.v.coords(), &permuted)
        );
    }

    #[test]
    fn tangent_image_relations_and_ranks() {
        let x = test_variety(5);
        let p = regular_point(&x);
        let ti = tangent_image(&x, &p).unwrap();
        let n = x.n();
        let count = n + 3;
        let sum_lambda: C64 = x.lambdas().iter().sum();
        let scale: f64 = ti.vx.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for i in 0..n {
            let a = ti.alphas[i];
            let r1 = a * ti.w[0][i] - ti.w[1][i] - C64::new(count as f64, 0.0) * ti.vx[i];
            let r2 = a * ti.w[1][i] - ti.w[2][i] - sum_lambda * ti.vx[i];
            assert!(r1.norm() < 1e-9 * scale.max(1.0), "first relation: {}", r1.norm());
            assert!(r2.norm() < 1e-9 * scale.max(1.0), "second relation: {}", r2.norm());
        }
        assert_eq!(ti.rank_t4, 4);
        assert_eq!(ti.rank_t5, 5);
        assert!(injectivity_certificate(&x, &p).unwrap());
    }

    #[test]
    fn certificate_refuses_dim_four() {
        let x = test_variety(4);
        let p = regular_point(&x);
        assert!(matches!(
            injectivity_certificate(&x, &p),
            Err(Error::DimensionTooSmall(_))
        ));
    }
}
