use super::C64;
use crate::error::{Error, Result};

/// A univariate polynomial with complex coefficients in ascending powers:
/// `coeffs[k]` multiplies `z^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

impl Polynomial {
    /// Builds a polynomial, trimming trailing coefficients that are
    /// numerically zero relative to the largest coefficient.
    pub fn new(coeffs: Vec<C64>) -> Self {
        let mut p = Polynomial { coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        if self.coeffs.is_empty() {
            self.coeffs.push(C64::new(0.0, 0.0));
            return;
        }
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0_f64, f64::max);
        let cut = max * 1e-14;
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().norm() <= cut {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Expansion of `lead * prod (z - r_i)`, coefficients ascending.
    pub fn from_roots(roots: &[C64], lead: C64) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); roots.len() + 1];
        coeffs[0] = lead;
        for (deg, r) in roots.iter().enumerate() {
            // multiply by (z - r): shift the top coefficient, then fold
            coeffs[deg + 1] = coeffs[deg];
            for k in (1..=deg).rev() {
                let prev = coeffs[k - 1];
                coeffs[k] = prev - r * coeffs[k];
            }
            coeffs[0] = -r * coeffs[0];
        }
        Polynomial { coeffs }
    }

    /// Max-modulus of the coefficients.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0_f64, f64::max)
    }
}

/// Coefficients (ascending) of the unique polynomial of degree
/// `nodes.len() - 1` through the given data, by Newton divided differences.
pub fn interpolate_coeffs(nodes: &[C64], values: &[C64]) -> Vec<C64> {
    assert_eq!(nodes.len(), values.len());
    let n = nodes.len();
    // divided-difference table, in place
    let mut dd = values.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - level]);
        }
    }
    // expand the Newton form sum dd[k] * prod_{j<k} (z - nodes[j])
    let mut coeffs = vec![C64::new(0.0, 0.0); n];
    let mut basis = vec![C64::new(0.0, 0.0); n];
    basis[0] = C64::new(1.0, 0.0);
    let mut basis_deg = 0usize;
    for k in 0..n {
        for j in 0..=basis_deg {
            coeffs[j] += dd[k] * basis[j];
        }
        if k + 1 < n {
            // basis *= (z - nodes[k])
            basis[basis_deg + 1] = basis[basis_deg];
            for j in (1..=basis_deg).rev() {
                let prev = basis[j - 1];
                basis[j] = prev - nodes[k] * basis[j];
            }
            basis[0] = -nodes[k] * basis[0];
            basis_deg += 1;
        }
    }
    coeffs
}

/// Sum of |c_k| |z|^k, the natural scale of rounding error in Horner
/// evaluation at z.
fn eval_scale(coeffs: &[C64], z: C64) -> f64 {
    let az = z.norm();
    let mut pow = 1.0;
    let mut acc = 0.0;
    for c in coeffs {
        acc += c.norm() * pow;
        pow *= az;
    }
    acc
}

const MAX_ABERTH_ITERATIONS: usize = 400;

/// All complex roots of `p`, with multiplicity, by Aberth-Ehrlich iteration
/// from a perturbed-circle initialization followed by Newton polishing.
///
/// The returned roots satisfy the rebuild contract: expanding
/// `lead * prod (z - r_i)` reproduces the input coefficients to within
/// `tol * max|coeff|` (otherwise `NoConvergence`). Exact zero roots coming
/// from vanishing low-order coefficients are split off first.
pub fn poly_roots(p: &Polynomial, tol: f64) -> Result<Vec<C64>> {
    let max = p.max_coeff();
    if max == 0.0 {
        return Err(Error::DegenerateInput("zero polynomial".into()));
    }
    if p.degree() == 0 {
        return Err(Error::DegenerateInput(
            "constant polynomial has no roots".into(),
        ));
    }
    // Split off roots at the origin: leading zeros of the ascending layout.
    let zero_cut = max * 1e-14;
    let low = p
        .coeffs()
        .iter()
        .position(|c| c.norm() > zero_cut)
        .expect("nonzero polynomial");
    let zeros = vec![C64::new(0.0, 0.0); low];
    let reduced: Vec<C64> = p.coeffs()[low..].iter().map(|c| c / max).collect();
    let d = reduced.len() - 1;
    let lead = *p.coeffs().last().unwrap();

    let rebuild_error = |roots: &[C64]| -> f64 {
        let rebuilt = Polynomial::from_roots(roots, lead);
        let mut err = 0.0_f64;
        for k in 0..=p.degree() {
            let a = p.coeffs().get(k).copied().unwrap_or(C64::new(0.0, 0.0));
            let b = rebuilt.coeffs().get(k).copied().unwrap_or(C64::new(0.0, 0.0));
            err = err.max((a - b).norm());
        }
        err
    };

    // Newton polishing sharpens simple roots but skews the symmetric
    // arrangement of a multiple-root cluster; the Weierstrass sweep refines
    // the root set as a whole toward an exact factorization. Keep whichever
    // candidate rebuilds the coefficients best.
    let mut best: Vec<C64> = zeros.clone();
    let mut best_err = f64::INFINITY;
    if d > 0 {
        let (raw, polished) = aberth(&reduced)?;
        let swept = weierstrass_refine(&reduced, &raw);
        let collapsed = collapse_clusters(&reduced, &polished);
        for cand in [raw, polished, swept, collapsed] {
            let mut full = zeros.clone();
            full.extend(cand);
            let err = rebuild_error(&full);
            if err < best_err {
                best_err = err;
                best = full;
            }
        }
    } else {
        best_err = rebuild_error(&best);
    }

    if best_err > tol.max(1e-12) * max {
        return Err(Error::NoConvergence(format!(
            "rebuild error {:.3e} exceeds {:.3e}",
            best_err,
            tol.max(1e-12) * max
        )));
    }
    Ok(best)
}

/// Coefficients of the derivative, ascending.
fn derivative_coeffs(coeffs: &[C64]) -> Vec<C64> {
    if coeffs.len() <= 1 {
        return vec![C64::new(0.0, 0.0)];
    }
    coeffs[1..]
        .iter()
        .enumerate()
        .map(|(k, c)| c * ((k + 1) as f64))
        .collect()
}

/// Groups roots lying within a small radius of each other and replaces each
/// group of size m by m copies of a center refined by Newton on the
/// (m-1)-th derivative, where a true m-fold root is simple. Pointwise
/// iteration cannot place a multiple root better than eps^(1/m); the
/// collapsed set restores the lost accuracy when the cluster really is one
/// root. The rebuild check decides whether to keep it.
fn collapse_clusters(coeffs: &[C64], roots: &[C64]) -> Vec<C64> {
    let d = roots.len();
    let radius = 3e-4;
    // union-find over near-coincident roots
    let mut group: Vec<usize> = (0..d).collect();
    fn find(group: &mut Vec<usize>, i: usize) -> usize {
        if group[i] != i {
            let r = find(group, group[i]);
            group[i] = r;
        }
        group[i]
    }
    for i in 0..d {
        for j in (i + 1)..d {
            if (roots[i] - roots[j]).norm() < radius * (1.0 + roots[i].norm()) {
                let (a, b) = (find(&mut group, i), find(&mut group, j));
                if a != b {
                    group[a] = b;
                }
            }
        }
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); d];
    for i in 0..d {
        let r = find(&mut group, i);
        members[r].push(i);
    }
    let mut out = roots.to_vec();
    for cluster in members.iter().filter(|m| m.len() >= 2) {
        let m = cluster.len();
        let mut center = cluster
            .iter()
            .map(|&i| roots[i])
            .fold(C64::new(0.0, 0.0), |a, b| a + b)
            / (m as f64);
        // Newton on p^(m-1), where the m-fold root is simple
        let mut dc = coeffs.to_vec();
        for _ in 0..(m - 1) {
            dc = derivative_coeffs(&dc);
        }
        let p = Polynomial { coeffs: dc };
        for _ in 0..30 {
            let (pv, dv) = p.eval_with_derivative(center);
            if dv.norm() == 0.0 {
                break;
            }
            let step = pv / dv;
            if !super::is_finite_c(step) || step.norm() > radius * 10.0 * (1.0 + center.norm()) {
                break;
            }
            center -= step;
            if step.norm() <= 1e-16 * (1.0 + center.norm()) {
                break;
            }
        }
        for &i in cluster {
            out[i] = center;
        }
    }
    out
}

/// Weierstrass (Durand-Kerner) sweeps: the fixed points are exact
/// factorizations of the polynomial, so the sweep contracts the rebuild
/// error even inside multiple-root clusters where pointwise Newton stalls.
fn weierstrass_refine(coeffs: &[C64], start: &[C64]) -> Vec<C64> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let poly = Polynomial {
        coeffs: coeffs.to_vec(),
    };
    let mut z = start.to_vec();
    for _sweep in 0..60 {
        let mut max_step = 0.0_f64;
        for k in 0..d {
            let mut denom = lead;
            for j in 0..d {
                if j != k {
                    denom *= z[k] - z[j];
                }
            }
            if denom.norm() < 1e-300 {
                continue;
            }
            let w = poly.eval(z[k]) / denom;
            z[k] -= w;
            max_step = max_step.max(w.norm() / (1.0 + z[k].norm()));
        }
        if max_step < 1e-16 {
            break;
        }
    }
    if z.iter().all(|v| super::is_finite_c(*v)) {
        z
    } else {
        start.to_vec()
    }
}

/// Aberth-Ehrlich on a polynomial with nonzero constant and leading terms
/// (normalized so max|c| = 1). Returns the converged iterates and a
/// Newton-polished copy.
fn aberth(coeffs: &[C64]) -> Result<(Vec<C64>, Vec<C64>)> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let c0 = coeffs[0];
    let poly = Polynomial {
        coeffs: coeffs.to_vec(),
    };

    // Initial guesses on a circle of radius |c0/cd|^(1/d), capped by the
    // Cauchy bound, with a deterministic angular stagger that breaks the
    // symmetries of structured inputs.
    let cauchy = 1.0
        + coeffs[..d]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0_f64, f64::max);
    let r = (c0.norm() / lead.norm()).powf(1.0 / d as f64).min(cauchy).max(1e-3);
    let mut z: Vec<C64> = (0..d)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (d as f64)
                + 0.3785
                + 0.01 * (k as f64);
            let rk = r * (1.0 + 1e-3 * ((k % 5) as f64));
            C64::from_polar(rk, theta)
        })
        .collect();

    let mut converged = vec![false; d];
    for _iter in 0..MAX_ABERTH_ITERATIONS {
        let mut max_step = 0.0_f64;
        for k in 0..d {
            if converged[k] {
                continue;
            }
            let (pv, dv) = poly.eval_with_derivative(z[k]);
            // Adams-style stopping test: the residual is at rounding level.
            if pv.norm() <= 20.0 * f64::EPSILON * eval_scale(coeffs, z[k]) {
                converged[k] = true;
                continue;
            }
            let newton = if dv.norm() == 0.0 {
                // stationary point: nudge off it
                C64::new(1e-6 * (1.0 + z[k].norm()), 1e-6)
            } else {
                pv / dv
            };
            let mut repulsion = C64::new(0.0, 0.0);
            for j in 0..d {
                if j != k {
                    let diff = z[k] - z[j];
                    if diff.norm() > 0.0 {
                        repulsion += 1.0 / diff;
                    }
                }
            }
            let denom = C64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() < 1e-300 {
                newton
            } else {
                newton / denom
            };
            z[k] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
        }
        if converged.iter().all(|c| *c) || max_step < 1e-15 {
            break;
        }
    }

    for zk in &z {
        if !super::is_finite_c(*zk) {
            return Err(Error::NoConvergence("non-finite iterate".into()));
        }
    }

    let mut polished = z.clone();
    for zk in polished.iter_mut() {
        for _ in 0..3 {
            let (pv, dv) = poly.eval_with_derivative(*zk);
            if dv.norm() == 0.0 {
                break;
            }
            let step = pv / dv;
            if !super::is_finite_c(step) || step.norm() > 0.5 * (1.0 + zk.norm()) {
                break;
            }
            *zk -= step;
        }
    }
    Ok((z, polished))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{chordal_distance, match_roots, DEFAULT_TOL};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn quadratic_z2_minus_1() {
        let p = Polynomial::new(vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let mut roots = poly_roots(&p, DEFAULT_TOL).unwrap();
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((roots[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((roots[1] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn triple_root_clusters_within_1e5() {
        // (z-2)^3 = z^3 - 6 z^2 + 12 z - 8, expanded by hand
        let p = Polynomial::new(vec![c(-8.0, 0.0), c(12.0, 0.0), c(-6.0, 0.0), c(1.0, 0.0)]);
        let roots = poly_roots(&p, DEFAULT_TOL).unwrap();
        assert_eq!(roots.len(), 3);
        for r in &roots {
            assert!((r - c(2.0, 0.0)).norm() < 1e-5, "root {r} too far from 2");
        }
        // residual of the rebuilt polynomial stays small despite the cluster
        let rebuilt = Polynomial::from_roots(&roots, c(1.0, 0.0));
        for (a, b) in p.coeffs().iter().zip(rebuilt.coeffs()) {
            assert!((a - b).norm() < 1e-7);
        }
    }

    #[test]
    fn constant_polynomial_is_degenerate() {
        let p = Polynomial::new(vec![c(5.0, 0.0)]);
        assert!(matches!(
            poly_roots(&p, DEFAULT_TOL),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn zero_polynomial_is_degenerate() {
        let p = Polynomial::new(vec![c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            poly_roots(&p, DEFAULT_TOL),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn zero_roots_are_split_off() {
        // z^2 (z - 3)
        let p = Polynomial::new(vec![
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(-3.0, 0.0),
            c(1.0, 0.0),
        ]);
        let roots = poly_roots(&p, DEFAULT_TOL).unwrap();
        let zeros = roots.iter().filter(|r| r.norm() < 1e-12).count();
        assert_eq!(zeros, 2);
        assert!(roots.iter().any(|r| (r - c(3.0, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn random_well_separated_roots_rebuild_sharply() {
        // seeded LCG keeps the test deterministic without pulling in rand here
        let mut state = 0x9e3779b97f4a7c15_u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0
        };
        for trial in 0..20 {
            let deg = 3 + (trial % 10);
            let mut roots: Vec<C64> = Vec::new();
            while roots.len() < deg {
                let cand = c(next(), next());
                if roots.iter().all(|r| chordal_distance(*r, cand) > 1e-3) {
                    roots.push(cand);
                }
            }
            let p = Polynomial::from_roots(&roots, c(1.0, 0.0));
            let found = poly_roots(&p, DEFAULT_TOL).unwrap();
            let rebuilt = Polynomial::from_roots(&found, c(1.0, 0.0));
            let scale = p.max_coeff();
            for (a, b) in p.coeffs().iter().zip(rebuilt.coeffs()) {
                assert!(
                    (a - b).norm() < 1e-8 * scale,
                    "rebuild error too large at degree {deg}"
                );
            }
            let m = match_roots(&roots, &found).unwrap();
            assert!(m.max_distance < 1e-9);
        }
    }
}
