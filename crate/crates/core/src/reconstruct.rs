//! Recovery of the defining parameters of an unknown diagonal intersection
//! from refined moduli samples taken along a moduli fiber.
//!
//! Each sample pairs the discriminant roots `a_i` with the projective
//! squared-witness vector `v`. Inverting the closed form
//! `v_i = -prod_{k != i}(a_i - a_k) / u_i` exposes values
//! `u_i = sigma_0 a_i^{n+3} + ... + sigma_{n+3}` of one unknown polynomial
//! whose roots are the variety parameters; two samples sharing exactly one
//! root pin a common projective scale and give 2n-1 equations for the n+5
//! homogeneous unknowns, enough for n >= 5. The nullvector of the stacked
//! Vandermonde system is the sigma-vector; its roots are the parameters.

use crate::error::{Error, Result};
use crate::numeric::{
    chordal_distance, homogeneous_nullvector, match_roots, pivot_profile, poly_roots, MatC,
    Polynomial, ProjVec, C64, DISTINCT_THRESHOLD,
};
use crate::pencil::BinaryForm;
use crate::poised::{refined_mu, RefinedSample};
use crate::sample::sign_bits;
use crate::variety::{point_from_fiber, DiagonalIntersection};
use rand_chacha::ChaCha8Rng;

/// Coefficients, highest power first, of the degree n+3 polynomial whose
/// roots are the recovered parameters. Projective.
#[derive(Debug, Clone)]
pub struct SigmaVector {
    pub coeffs: ProjVec,
}

/// Draws one refined sample per alpha set from the given variety. Every
/// extra set must share exactly its first root with the base set. When
/// `signs` is empty, fiber sheets are chosen from the seeded generator;
/// the refined data does not depend on the choice.
pub fn samples_from_variety(
    x_var: &DiagonalIntersection,
    base_alphas: &[C64],
    extra_alpha_sets: &[Vec<C64>],
    signs: &[bool],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<RefinedSample>> {
    let n = x_var.n();
    if base_alphas.len() != n {
        return Err(Error::InvalidInput(format!(
            "base alpha set has {} roots, dim is {}",
            base_alphas.len(),
            n
        )));
    }
    for (idx, set) in extra_alpha_sets.iter().enumerate() {
        if set.len() != n {
            return Err(Error::InvalidInput(format!("alpha set {idx} has wrong length")));
        }
        let mut shared = 0usize;
        for a in set {
            for b in base_alphas {
                if chordal_distance(*a, *b) <= DISTINCT_THRESHOLD {
                    shared += 1;
                }
            }
        }
        if shared != 1 || chordal_distance(set[0], base_alphas[0]) > DISTINCT_THRESHOLD {
            return Err(Error::InvalidInput(format!(
                "alpha set {idx} must share exactly the first root with the base set"
            )));
        }
    }
    let count = n + 3;
    let mut samples = Vec::with_capacity(1 + extra_alpha_sets.len());
    let mut all_sets: Vec<&[C64]> = vec![base_alphas];
    all_sets.extend(extra_alpha_sets.iter().map(|s| s.as_slice()));
    for (idx, set) in all_sets.iter().enumerate() {
        let psi = BinaryForm::from_roots(set)?;
        let sheet: Vec<bool> = if signs.len() == count {
            signs.to_vec()
        } else {
            sign_bits(rng, count)
        };
        let (point, _) = point_from_fiber(x_var, &psi, &sheet)?;
        match refined_mu(x_var, &point) {
            Ok(sample) => samples.push(sample),
            Err(Error::NotRegular(msg)) => {
                return Err(Error::NotRegular(format!("alpha set {idx}: {msg}")))
            }
            Err(e) => return Err(e),
        }
    }
    Ok(samples)
}

/// u_i = -prod_{k != i}(a_i - a_k) / v_i for one sample.
fn u_values(sample: &RefinedSample) -> Result<Vec<C64>> {
    let n = sample.alphas.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let vi = sample.v.coords()[i];
        if vi.norm() < 1e-14 {
            return Err(Error::InconsistentSamples(
                "a squared-witness entry is zero".into(),
            ));
        }
        let mut num = C64::new(-1.0, 0.0);
        for (k, ak) in sample.alphas.iter().enumerate() {
            if k != i {
                num *= sample.alphas[i] - ak;
            }
        }
        out.push(num / vi);
    }
    Ok(out)
}

/// Solves the homogeneous system for the sigma-vector. Needs n >= 5 and at
/// least two samples sharing exactly one root (the per-sample projective
/// scales are aligned through it). Returns the sigma-vector and the
/// relative residual of the stacked system.
pub fn solve_sigma(samples: &[RefinedSample], n: usize) -> Result<(SigmaVector, f64)> {
    if n < 5 {
        return Err(Error::DimensionTooSmall(
            "reconstruction needs dim >= 5".into(),
        ));
    }
    if samples.is_empty() {
        return Err(Error::InvalidInput("no samples given".into()));
    }
    for s in samples {
        if s.alphas.len() != n || s.v.len() != n {
            return Err(Error::InvalidInput("sample arity mismatch".into()));
        }
    }
    let base_u = u_values(&samples[0])?;
    // (root, aligned u) pairs entering the system; the shared root enters once
    let mut entries: Vec<(C64, C64)> = samples[0]
        .alphas
        .iter()
        .copied()
        .zip(base_u.iter().copied())
        .collect();
    for (idx, s) in samples.iter().enumerate().skip(1) {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (i, a) in samples[0].alphas.iter().enumerate() {
            for (j, b) in s.alphas.iter().enumerate() {
                if chordal_distance(*a, *b) <= DISTINCT_THRESHOLD {
                    pairs.push((i, j));
                }
            }
        }
        if pairs.len() != 1 {
            return Err(Error::InconsistentSamples(format!(
                "sample {idx} shares {} roots with the base sample, expected exactly 1",
                pairs.len()
            )));
        }
        let (bi, sj) = pairs[0];
        let u = u_values(s)?;
        if u[sj].norm() < 1e-14 {
            return Err(Error::InconsistentSamples(
                "shared-root value is zero; cannot align scales".into(),
            ));
        }
        let gamma = base_u[bi] / u[sj];
        for (j, a) in s.alphas.iter().enumerate() {
            if j != sj {
                entries.push((*a, gamma * u[j]));
            }
        }
    }

    // rows [a^{n+3}, ..., a, 1, -u] in the unknowns (sigma_0..sigma_{n+3}, mu)
    let cols = n + 5;
    let mut rows: Vec<Vec<C64>> = Vec::with_capacity(entries.len());
    for (a, u) in &entries {
        let mut row = Vec::with_capacity(cols);
        let mut pw = C64::new(1.0, 0.0);
        let mut powers = vec![C64::new(1.0, 0.0); n + 4];
        for p in powers.iter_mut() {
            *p = pw;
            pw *= a;
        }
        for k in (0..n + 4).rev() {
            row.push(powers[k]);
        }
        row.push(-u);
        rows.push(row);
    }
    let m = MatC::from_rows(rows)?;

    // column equilibration keeps the Vandermonde block balanced
    let mut col_scale = vec![0.0_f64; cols];
    for j in 0..cols {
        for i in 0..m.rows() {
            col_scale[j] = col_scale[j].max(m[(i, j)].norm());
        }
        if col_scale[j] == 0.0 {
            col_scale[j] = 1.0;
        }
    }
    let scaled = MatC::from_fn(m.rows(), cols, |i, j| m[(i, j)] / col_scale[j]);
    let nullvec = match homogeneous_nullvector(&scaled, crate::numeric::DEFAULT_TOL) {
        Ok(v) => v,
        Err(Error::FullRank) => {
            // noisy overdetermined stack: no exact nullvector remains, so
            // take the weakest pivot direction and let the reported
            // residual carry the misfit
            let profile = pivot_profile(&scaled);
            let last = profile.last().copied().unwrap_or(0.0);
            homogeneous_nullvector(&scaled, (last * 1.01).max(crate::numeric::DEFAULT_TOL))?
        }
        Err(e) => return Err(e),
    };
    let mut sol: Vec<C64> = nullvec
        .coords()
        .iter()
        .zip(&col_scale)
        .map(|(z, s)| z / s)
        .collect();
    let residual_num: f64 = m
        .mul_vec(&sol)
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let sol_norm: f64 = sol.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let residual = residual_num / (m.frobenius_norm() * sol_norm);
    sol.truncate(n + 4);
    Ok((
        SigmaVector {
            coeffs: ProjVec::new(sol)?,
        },
        residual,
    ))
}

/// Roots of the sigma polynomial: the recovered parameter multiset.
pub fn recover_lambdas(sigma: &SigmaVector) -> Result<Vec<C64>> {
    let coeffs = sigma.coeffs.coords();
    let expected = coeffs.len() - 1;
    // highest power first; poly_roots wants ascending
    let mut ascending: Vec<C64> = coeffs.to_vec();
    ascending.reverse();
    let p = Polynomial::new(ascending);
    if p.degree() != expected {
        return Err(Error::DegenerateRecovery);
    }
    let roots = poly_roots(&p, crate::numeric::DEFAULT_TOL)?;
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            if chordal_distance(roots[i], roots[j]) <= DISTINCT_THRESHOLD {
                return Err(Error::DegenerateRecovery);
            }
        }
    }
    Ok(roots)
}

/// Two parameter multisets define biregular varieties exactly when they
/// match as multisets.
pub fn varieties_match(lam_a: &[C64], lam_b: &[C64], tol: f64) -> Result<bool> {
    if lam_a.len() != lam_b.len() {
        return Err(Error::LengthMismatch(lam_a.len(), lam_b.len()));
    }
    let m = match_roots(lam_a, lam_b)?;
    Ok(m.max_distance <= tol)
}

/// Fresh alpha sets for reconstruction: one base set and `extras` more, all
/// sharing exactly the base's first root, all roots staying away from the
/// variety parameters and the origin.
pub fn reconstruction_alpha_sets(
    rng: &mut ChaCha8Rng,
    x_var: &DiagonalIntersection,
    extras: usize,
) -> (Vec<C64>, Vec<Vec<C64>>) {
    let n = x_var.n();
    let mut avoid: Vec<C64> = x_var.lambdas().to_vec();
    avoid.push(C64::new(0.0, 0.0));
    let base = crate::sample::separated_values(rng, n, &avoid);
    let mut sets = Vec::with_capacity(extras);
    for _ in 0..extras {
        let mut avoid_k = avoid.clone();
        avoid_k.extend_from_slice(&base);
        let mut fresh = crate::sample::separated_values(rng, n - 1, &avoid_k);
        let mut set = vec![base[0]];
        set.append(&mut fresh);
        sets.push(set);
    }
    (base, sets)
}

pub use crate::sample::rng_from_seed;
