//! The n-dimensional variety X in P^{n+3-1} cut by the two diagonal
//! quadrics `sum lambda_i z_i^2 = 0` and `sum z_i^2 = 0`: membership, fiber
//! sampling, tangent frames, the second-fundamental-form discriminant in
//! closed form and by brute force, and pointwise regularity.
//!
//! Formulas are stated with the three pivot coordinates in the last three
//! slots; points are permuted into that layout internally and results are
//! permuted back where they live in ambient coordinates.

use crate::error::{Error, Result};
use crate::moduli::moebius_from_triples;
use crate::numeric::{
    chordal_distance, match_roots, pairwise_distinct, poly_roots, MatC, ProjVec, C64,
    DEFAULT_TOL, DISTINCT_THRESHOLD,
};
use crate::pencil::{discriminant, BinaryForm, Pencil};

/// X given by `lambda`: n + 3 pairwise distinct, nonzero parameters.
#[derive(Debug, Clone)]
pub struct DiagonalIntersection {
    lambdas: Vec<C64>,
}

impl DiagonalIntersection {
    pub fn new(lambdas: Vec<C64>) -> Result<Self> {
        if lambdas.len() < 6 {
            return Err(Error::InvalidLambdas(format!(
                "need at least 6 parameters (dim >= 3), got {}",
                lambdas.len()
            )));
        }
        if lambdas
            .iter()
            .any(|l| chordal_distance(*l, C64::new(0.0, 0.0)) <= DISTINCT_THRESHOLD)
        {
            return Err(Error::InvalidLambdas("a parameter is numerically zero".into()));
        }
        if !pairwise_distinct(&lambdas, DISTINCT_THRESHOLD) {
            return Err(Error::InvalidLambdas("parameters are not pairwise distinct".into()));
        }
        Ok(DiagonalIntersection { lambdas })
    }

    /// Dimension of the variety.
    pub fn n(&self) -> usize {
        self.lambdas.len() - 3
    }

    pub fn lambdas(&self) -> &[C64] {
        &self.lambdas
    }

    /// The ambient pencil `(diag(lambda), I)`.
    pub fn ambient_pencil(&self) -> Pencil {
        Pencil::from_matrices(
            MatC::diagonal(&self.lambdas),
            MatC::identity(self.lambdas.len()),
        )
        .expect("diagonal ambient pair is well-formed")
    }
}

/// A point of X, stored projectively normalized; membership in both
/// quadrics is enforced on construction.
#[derive(Debug, Clone)]
pub struct SurfacePoint {
    coords: ProjVec,
}

impl SurfacePoint {
    pub fn new(x_var: &DiagonalIntersection, coords: Vec<C64>) -> Result<Self> {
        if coords.len() != x_var.lambdas.len() {
            return Err(Error::InvalidInput(format!(
                "point has {} coordinates, ambient space needs {}",
                coords.len(),
                x_var.lambdas.len()
            )));
        }
        let v = ProjVec::new(coords)?;
        let norm2: f64 = v.coords().iter().map(|z| z.norm_sqr()).sum();
        let q2: C64 = v.coords().iter().map(|z| z * z).sum();
        let q1: C64 = v
            .coords()
            .iter()
            .zip(&x_var.lambdas)
            .map(|(z, l)| l * z * z)
            .sum();
        let scale1 = x_var.lambdas.iter().map(|l| l.norm()).fold(0.0, f64::max);
        let tol = 1e-7;
        if q2.norm() > tol * norm2 || q1.norm() > tol * norm2 * scale1 {
            return Err(Error::InvalidInput(format!(
                "point fails membership: |phi2| = {:.3e}, |phi1| = {:.3e}",
                q2.norm(),
                q1.norm()
            )));
        }
        Ok(SurfacePoint { coords: v })
    }

    pub fn coords(&self) -> &[C64] {
        self.coords.coords()
    }

    /// All coordinates above the generality threshold.
    pub fn is_phi_general(&self) -> bool {
        self.coords
            .coords()
            .iter()
            .all(|z| z.norm() > DISTINCT_THRESHOLD)
    }
}

/// Samples the fiber of the discriminant map over `psi`:
/// `x_i = sign_i * sqrt(psi(1, lambda_i) / prod_{j != i}(lambda_i - lambda_j))`.
///
/// The boolean flag reports whether the point came out with all coordinates
/// nonzero (a root of psi at some lambda_i zeroes that coordinate).
pub fn point_from_fiber(
    x_var: &DiagonalIntersection,
    psi: &BinaryForm,
    signs: &[bool],
) -> Result<(SurfacePoint, bool)> {
    let count = x_var.lambdas.len();
    if psi.degree() != x_var.n() {
        return Err(Error::InvalidInput(format!(
            "form degree {} does not match dim {}",
            psi.degree(),
            x_var.n()
        )));
    }
    if signs.len() != count {
        return Err(Error::InvalidInput(format!(
            "need {} sign bits, got {}",
            count,
            signs.len()
        )));
    }
    let one = C64::new(1.0, 0.0);
    let mut coords = Vec::with_capacity(count);
    for i in 0..count {
        let li = x_var.lambdas[i];
        let num = psi.eval(one, li);
        let mut den = one;
        for j in 0..count {
            if j != i {
                den *= li - x_var.lambdas[j];
            }
        }
        let mut xi = (num / den).sqrt();
        if signs[i] {
            xi = -xi;
        }
        coords.push(xi);
    }
    let point = SurfacePoint::new(x_var, coords)?;
    let general = point.is_phi_general();
    Ok((point, general))
}

/// A tangent frame at a point with at least three usable coordinates: the
/// pivot triple is moved to the last three slots, the space `W_x` gets the
/// basis `e'_1..e'_n`, and the restricted pencil lives on those frame
/// coordinates.
#[derive(Debug, Clone)]
pub struct TangentFrame {
    pub point: SurfacePoint,
    /// Original indices of the three pivot coordinates, ascending.
    pub pivot_triple: [usize; 3],
    /// Relabeling: `perm[relabeled] = original index`. The pivots occupy
    /// the last three relabeled slots.
    pub perm: Vec<usize>,
    /// The n frame vectors in ambient coordinates.
    pub frame: Vec<Vec<C64>>,
    /// The pencil `(phi1|W, phi2|W)` on frame coordinates.
    pub restricted: Pencil,
    lambdas_rel: Vec<C64>,
    x_rel: Vec<C64>,
}

impl TangentFrame {
    pub fn lambdas_rel(&self) -> &[C64] {
        &self.lambdas_rel
    }

    pub fn x_rel(&self) -> &[C64] {
        &self.x_rel
    }

    /// Ambient vector of a tangent direction given in frame coordinates.
    pub fn to_ambient(&self, z: &[C64]) -> Vec<C64> {
        let count = self.point.coords().len();
        let mut out = vec![C64::new(0.0, 0.0); count];
        for (zi, e) in z.iter().zip(&self.frame) {
            for (o, ev) in out.iter_mut().zip(e) {
                *o += zi * ev;
            }
        }
        out
    }
}

/// Chooses the pivot triple (three largest-modulus coordinates, ties broken
/// by index) and the relabeling that puts it last.
fn relabeling(coords: &[C64]) -> Result<(Vec<usize>, [usize; 3])> {
    let count = coords.len();
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| {
        coords[b]
            .norm()
            .partial_cmp(&coords[a].norm())
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut pivots = [order[0], order[1], order[2]];
    pivots.sort_unstable();
    if coords[pivots[2]].norm() <= DISTINCT_THRESHOLD {
        return Err(Error::InvalidInput(
            "fewer than three usable coordinates; not a valid point of X".into(),
        ));
    }
    let mut perm: Vec<usize> = (0..count).filter(|i| !pivots.contains(i)).collect();
    perm.extend_from_slice(&pivots);
    Ok((perm, pivots))
}

/// Builds the tangent frame at `x` over the default pivot triple (the
/// three largest-modulus coordinates).
pub fn tangent_frame(x_var: &DiagonalIntersection, point: &SurfacePoint) -> Result<TangentFrame> {
    let (_, pivot_triple) = relabeling(point.coords())?;
    tangent_frame_with_pivots(x_var, point, pivot_triple)
}

/// Builds the tangent frame over a caller-chosen pivot triple; all three
/// pivot coordinates must be usable. The discriminant of the restricted
/// pencil does not depend on the choice.
pub fn tangent_frame_with_pivots(
    x_var: &DiagonalIntersection,
    point: &SurfacePoint,
    mut pivot_triple: [usize; 3],
) -> Result<TangentFrame> {
    let n = x_var.n();
    let count = n + 3;
    pivot_triple.sort_unstable();
    if pivot_triple[0] == pivot_triple[1]
        || pivot_triple[1] == pivot_triple[2]
        || pivot_triple[2] >= count
    {
        return Err(Error::InvalidInput("pivot triple must be three distinct indices".into()));
    }
    if pivot_triple
        .iter()
        .any(|&i| point.coords()[i].norm() <= DISTINCT_THRESHOLD)
    {
        return Err(Error::InvalidInput(
            "a chosen pivot coordinate is numerically zero".into(),
        ));
    }
    let mut perm: Vec<usize> = (0..count).filter(|i| !pivot_triple.contains(i)).collect();
    perm.extend_from_slice(&pivot_triple);
    let lam: Vec<C64> = perm.iter().map(|&i| x_var.lambdas[i]).collect();
    let x: Vec<C64> = perm.iter().map(|&i| point.coords()[i]).collect();

    // in relabeled slots the pivots sit at n, n+1, n+2; the frame vector of
    // slot i < n corrects slots n+1 and n+2 so both pairings with x vanish
    let mut frame = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = vec![C64::new(0.0, 0.0); count];
        e[perm[i]] = C64::new(1.0, 0.0);
        let c1 = -(lam[n + 2] - lam[i]) * x[i] / ((lam[n + 2] - lam[n + 1]) * x[n + 1]);
        let c2 = -(lam[n + 1] - lam[i]) * x[i] / ((lam[n + 1] - lam[n + 2]) * x[n + 2]);
        e[perm[n + 1]] = c1;
        e[perm[n + 2]] = c2;
        frame.push(e);
    }

    // restricted forms on frame coordinates
    let denom = (lam[n + 2] - lam[n + 1]) * (lam[n + 2] - lam[n + 1]);
    let xp1 = x[n + 1] * x[n + 1];
    let xp2 = x[n + 2] * x[n + 2];
    let mut m1 = MatC::zeros(n, n);
    let mut m2 = MatC::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let a = (lam[n + 2] - lam[i]) * (lam[n + 2] - lam[j]) * x[i] * x[j] / (denom * xp1);
            let b = (lam[n + 1] - lam[i]) * (lam[n + 1] - lam[j]) * x[i] * x[j] / (denom * xp2);
            m1[(i, j)] = lam[n + 1] * a + lam[n + 2] * b;
            m2[(i, j)] = a + b;
            if i == j {
                m1[(i, j)] += lam[i];
                m2[(i, j)] += C64::new(1.0, 0.0);
            }
        }
    }
    let restricted = Pencil::from_matrices(m1, m2)?;
    Ok(TangentFrame {
        point: point.clone(),
        pivot_triple,
        perm,
        frame,
        restricted,
        lambdas_rel: lam,
        x_rel: x,
    })
}

/// Which route computes the discriminant of the second fundamental form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaMode {
    /// Coefficient formula in the lambda and squared coordinates.
    Closed,
    /// Determinant of the restricted pencil on a tangent frame.
    Brute,
}

/// The discriminant of the second fundamental form at `x`, as a projective
/// binary form of degree n.
pub fn theta(
    x_var: &DiagonalIntersection,
    point: &SurfacePoint,
    mode: ThetaMode,
) -> Result<BinaryForm> {
    match mode {
        ThetaMode::Brute => {
            let frame = tangent_frame(x_var, point)?;
            discriminant(&frame.restricted)
        }
        ThetaMode::Closed => {
            let n = x_var.n();
            let (perm, _) = relabeling(point.coords())?;
            let lam: Vec<C64> = perm.iter().map(|&i| x_var.lambdas[i]).collect();
            let x: Vec<C64> = perm.iter().map(|&i| point.coords()[i]).collect();
            // a_k = (-1)^(n-k) sum_{i<=n} (lam_i-lam_{n+1})(lam_i-lam_{n+2}) x_i^2 e_k(lam kept)
            let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
            for i in 0..=n {
                let weight = (lam[i] - lam[n + 1]) * (lam[i] - lam[n + 2]) * x[i] * x[i];
                let esp = elementary_symmetric(
                    lam[..=n]
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, l)| *l),
                    n,
                );
                for k in 0..=n {
                    let sign = if (n - k).is_multiple_of(2) { 1.0 } else { -1.0 };
                    coeffs[k] += weight * esp[k] * sign;
                }
            }
            BinaryForm::new(coeffs)
        }
    }
}

/// Elementary symmetric polynomials e_0..e_max of an iterator of values.
fn elementary_symmetric(values: impl Iterator<Item = C64>, max: usize) -> Vec<C64> {
    let mut e = vec![C64::new(0.0, 0.0); max + 1];
    e[0] = C64::new(1.0, 0.0);
    let mut used = 0usize;
    for v in values {
        used += 1;
        let top = used.min(max);
        for k in (1..=top).rev() {
            let prev = e[k - 1];
            e[k] += v * prev;
        }
    }
    e
}

/// The four regularity flags at a point, plus the discriminant roots found.
#[derive(Debug, Clone)]
pub struct RegularityReport {
    /// (i) all coordinates above threshold.
    pub phi_general: bool,
    /// (ii) the SFF discriminant has n distinct roots, none at `[0:1]`,
    /// `[1:0]`, or any `[1:lambda_j]`.
    pub sff_nonsingular: bool,
    /// (iii) no nontrivial Möbius transformation permutes the root set.
    pub sff_generic: bool,
    /// (iv) the restricted forms are numerically nondegenerate.
    pub restrictions_nondegenerate: bool,
    pub alpha_roots: Vec<C64>,
}

impl RegularityReport {
    pub fn is_regular(&self) -> bool {
        self.phi_general
            && self.sff_nonsingular
            && self.sff_generic
            && self.restrictions_nondegenerate
    }

    /// Conditions (i), (ii), (iv) only.
    pub fn weakly_regular(&self) -> bool {
        self.phi_general && self.sff_nonsingular && self.restrictions_nondegenerate
    }
}

/// Evaluates the regularity conditions at `x`. Never fails on a valid
/// point; the report carries the flags.
pub fn is_regular(
    x_var: &DiagonalIntersection,
    point: &SurfacePoint,
) -> Result<RegularityReport> {
    let n = x_var.n();
    let phi_general = point.is_phi_general();

    let th = theta(x_var, point, ThetaMode::Closed)?;
    let mut alpha_roots: Vec<C64> = Vec::new();
    let mut sff_nonsingular = false;
    if !th.has_root_at_s_zero(DISTINCT_THRESHOLD) {
        if let Ok(mut roots) = poly_roots(&th.t_polynomial(), DEFAULT_TOL) {
            sort_complex(&mut roots);
            let distinct = roots.len() == n && pairwise_distinct(&roots, DISTINCT_THRESHOLD);
            let zero = C64::new(0.0, 0.0);
            let away_from_zero = roots
                .iter()
                .all(|r| chordal_distance(*r, zero) > DISTINCT_THRESHOLD);
            let away_from_lambdas = roots.iter().all(|r| {
                x_var
                    .lambdas
                    .iter()
                    .all(|l| chordal_distance(*r, *l) > DISTINCT_THRESHOLD)
            });
            sff_nonsingular = distinct && away_from_zero && away_from_lambdas;
            alpha_roots = roots;
        }
    }

    let sff_generic = if sff_nonsingular {
        !has_moebius_root_symmetry(&alpha_roots)
    } else {
        false
    };

    let restrictions_nondegenerate = match tangent_frame(x_var, point) {
        Ok(frame) => {
            frame.restricted.phi1.is_nondegenerate(DEFAULT_TOL)
                && frame.restricted.phi2.is_nondegenerate(DEFAULT_TOL)
        }
        Err(_) => false,
    };

    Ok(RegularityReport {
        phi_general,
        sff_nonsingular,
        sff_generic,
        restrictions_nondegenerate,
        alpha_roots,
    })
}

pub(crate) fn sort_complex(values: &mut [C64]) {
    values.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
}

/// Searches for a nontrivial Möbius transformation preserving the root set:
/// for every ordered triple image of the first three roots, build the unique
/// Möbius map and test set invariance.
fn has_moebius_root_symmetry(roots: &[C64]) -> bool {
    let n = roots.len();
    if n < 3 {
        return true;
    }
    let src = [roots[0], roots[1], roots[2]];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k {
                    continue;
                }
                if i == 0 && j == 1 && k == 2 {
                    continue; // the identity map
                }
                let g = match moebius_from_triples(src, [roots[i], roots[j], roots[k]]) {
                    Ok(g) => g,
                    Err(_) => continue,
                };
                let mut images = Vec::with_capacity(n);
                let mut valid = true;
                for r in roots {
                    match g.moebius(*r) {
                        Ok(v) => images.push(v),
                        Err(_) => {
                            valid = false;
                            break;
                        }
                    }
                }
                if !valid {
                    continue;
                }
                if let Ok(m) = match_roots(&images, roots) {
                    if m.max_distance < DISTINCT_THRESHOLD {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Rescales the relabeled coordinates onto the normalization in which
/// `x_i^2 = prod_j (lambda_i - alpha_j) / prod_{j != i} (lambda_i - lambda_j)`
/// exactly; the closed kernel and diagonalization formulas are stated on
/// that scale.
pub(crate) fn assumption_scaled(lam: &[C64], x: &[C64], alphas: &[C64]) -> Vec<C64> {
    // the last slot holds a pivot coordinate, guaranteed nonzero
    let i0 = x.len() - 1;
    let mut num = C64::new(1.0, 0.0);
    for a in alphas {
        num *= lam[i0] - a;
    }
    let mut den = C64::new(1.0, 0.0);
    for (j, l) in lam.iter().enumerate() {
        if j != i0 {
            den *= lam[i0] - l;
        }
    }
    let gamma = (num / den / (x[i0] * x[i0])).sqrt();
    x.iter().map(|z| z * gamma).collect()
}

/// The diagonalization data of the restricted pencil at a regular point:
/// scalars `c_i` and linear forms `F_i` on frame coordinates with
/// `Z_i^2 = -c_i F_i^2`, so that
/// `s phi1|W - t phi2|W = -sum_i (alpha_i s - t) c_i F_i^2`.
#[derive(Debug, Clone)]
pub struct SffDiagonalization {
    pub alphas: Vec<C64>,
    pub c: Vec<C64>,
    /// Row i holds the coefficients of F_i on frame coordinates.
    pub f_rows: MatC,
    pub frame: TangentFrame,
}

/// Computes the closed-form diagonalization of Lemma-type
/// `Z_i^2 = -c_i F_i^2`. Requires conditions (i), (ii), (iv).
pub fn diagonalize_sff(
    x_var: &DiagonalIntersection,
    point: &SurfacePoint,
) -> Result<SffDiagonalization> {
    let report = is_regular(x_var, point)?;
    if !report.weakly_regular() {
        return Err(Error::NotRegular(
            "conditions (i), (ii), (iv) fail at this point".into(),
        ));
    }
    let n = x_var.n();
    let frame = tangent_frame(x_var, point)?;
    let lam = frame.lambdas_rel().to_vec();
    let alphas = report.alpha_roots;
    let x_scaled = assumption_scaled(&lam, frame.x_rel(), &alphas);

    let mut c = Vec::with_capacity(n);
    let mut f_rows = MatC::zeros(n, n);
    for i in 0..n {
        let ai = alphas[i];
        let mut sep = C64::new(1.0, 0.0);
        for (j, aj) in alphas.iter().enumerate() {
            if j != i {
                sep *= ai - aj;
            }
        }
        let mut num = C64::new(1.0, 0.0);
        for l in &lam[..=n] {
            num *= ai - l;
        }
        c.push(num / (sep * (ai - lam[n + 1]) * (ai - lam[n + 2])));
        for j in 0..n {
            f_rows[(i, j)] =
                (lam[n + 1] - lam[j]) * (lam[n + 2] - lam[j]) / (ai - lam[j]) * x_scaled[j];
        }
    }
    Ok(SffDiagonalization {
        alphas,
        c,
        f_rows,
        frame,
    })
}

/// Projects ambient coordinates onto X by underdetermined Newton steps on
/// the two defining quadrics. Converges quadratically from nearby starts.
pub fn project_onto(x_var: &DiagonalIntersection, coords: &[C64]) -> Result<SurfacePoint> {
    if coords.len() != x_var.lambdas.len() {
        return Err(Error::InvalidInput("coordinate count mismatch".into()));
    }
    let mut y = coords.to_vec();
    for _ in 0..8 {
        let f1: C64 = y
            .iter()
            .zip(&x_var.lambdas)
            .map(|(z, l)| l * z * z)
            .sum();
        let f2: C64 = y.iter().map(|z| z * z).sum();
        let norm2: f64 = y.iter().map(|z| z.norm_sqr()).sum();
        if f1.norm() + f2.norm() < 1e-14 * norm2 {
            break;
        }
        // jacobian rows: 2 lambda_i y_i and 2 y_i; least-norm update
        // delta = J^H (J J^H)^{-1} f
        let j1: Vec<C64> = y
            .iter()
            .zip(&x_var.lambdas)
            .map(|(z, l)| 2.0 * l * z)
            .collect();
        let j2: Vec<C64> = y.iter().map(|z| 2.0 * z).collect();
        let g11: C64 = j1.iter().map(|z| z * z.conj()).sum();
        let g12: C64 = j1.iter().zip(&j2).map(|(a, b)| a * b.conj()).sum();
        let g21: C64 = j2.iter().zip(&j1).map(|(a, b)| a * b.conj()).sum();
        let g22: C64 = j2.iter().map(|z| z * z.conj()).sum();
        let det = g11 * g22 - g12 * g21;
        if det.norm() < 1e-300 {
            return Err(Error::IllConditioned("projection jacobian collapsed".into()));
        }
        // solve (J J^H) w = f
        let w1 = (g22 * f1 - g12 * f2) / det;
        let w2 = (g11 * f2 - g21 * f1) / det;
        for i in 0..y.len() {
            y[i] -= j1[i].conj() * w1 + j2[i].conj() * w2;
        }
    }
    SurfacePoint::new(x_var, y)
}

/// The two combinatorial sums `S0 = sum_i P_i/Q_i` and
/// `S1 = sum_i l_i P_i/Q_i` with `P_i = prod_l (l_i - a_l)` and
/// `Q_i = prod_{j != i} (l_i - l_j)`; both vanish identically for
/// `|l| = |a| + 3`.
pub fn combinatorial_residual(l: &[C64], a: &[C64]) -> Result<(C64, C64)> {
    if !pairwise_distinct(l, DISTINCT_THRESHOLD) || !pairwise_distinct(a, DISTINCT_THRESHOLD) {
        return Err(Error::InvalidInput(
            "inputs must be pairwise distinct".into(),
        ));
    }
    for li in l {
        for ai in a {
            if chordal_distance(*li, *ai) <= DISTINCT_THRESHOLD {
                return Err(Error::InvalidInput(
                    "the two lists share a value".into(),
                ));
            }
        }
    }
    let mut s0 = C64::new(0.0, 0.0);
    let mut s1 = C64::new(0.0, 0.0);
    for (i, li) in l.iter().enumerate() {
        let mut p = C64::new(1.0, 0.0);
        for ai in a {
            p *= li - ai;
        }
        let mut q = C64::new(1.0, 0.0);
        for (j, lj) in l.iter().enumerate() {
            if j != i {
                q *= li - lj;
            }
        }
        let term = p / q;
        s0 += term;
        s1 += li * term;
    }
    Ok((s0, s1))
}
