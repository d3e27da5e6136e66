use super::{C64, ProjVec};
use crate::error::{Error, Result};

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MatC {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl MatC {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatC {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = MatC::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("matrix with no rows".into()));
        }
        let cols = rows[0].len();
        if cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged or empty matrix rows".into()));
        }
        let nrows = rows.len();
        let data: Vec<C64> = rows.into_iter().flatten().collect();
        Ok(MatC {
            rows: nrows,
            cols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = MatC::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = MatC::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = *e;
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<C64>]) -> Result<Self> {
        if cols.is_empty() || cols[0].is_empty() {
            return Err(Error::InvalidInput("matrix with no columns".into()));
        }
        let n = cols[0].len();
        if cols.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidInput("ragged matrix columns".into()));
        }
        Ok(MatC::from_fn(n, cols.len(), |i, j| cols[j][i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> MatC {
        MatC::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, rhs: &MatC) -> MatC {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = MatC::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum::<C64>()
            })
            .collect()
    }

    pub fn scale(&self, s: C64) -> MatC {
        MatC {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, rhs: &MatC) -> MatC {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        MatC {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &MatC) -> MatC {
        self.add(&rhs.scale(C64::new(-1.0, 0.0)))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0_f64, f64::max)
    }

    /// Determinant by complete-pivot elimination. Returns 0 when a pivot
    /// collapses below rounding level.
    pub fn det(&self) -> C64 {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let elim = Elimination::run(self, 1e-15);
        if elim.rank < self.rows {
            return C64::new(0.0, 0.0);
        }
        let mut d = if elim.swaps.is_multiple_of(2) {
            C64::new(1.0, 0.0)
        } else {
            C64::new(-1.0, 0.0)
        };
        for k in 0..self.rows {
            d *= elim.u[(k, k)];
        }
        d
    }

    /// Solves `self * x = b` for square full-rank systems.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        assert!(self.is_square() && b.len() == self.rows);
        let n = self.rows;
        let elim = Elimination::run_with_rhs(self, b, 1e-14);
        if elim.rank < n {
            return Err(Error::SingularTransform);
        }
        let rhs = elim.rhs.as_ref().expect("rhs tracked");
        let mut xp = vec![C64::new(0.0, 0.0); n];
        for k in (0..n).rev() {
            let mut acc = rhs[k];
            for j in (k + 1)..n {
                acc -= elim.u[(k, j)] * xp[j];
            }
            xp[k] = acc / elim.u[(k, k)];
        }
        let mut x = vec![C64::new(0.0, 0.0); n];
        for (permuted, original) in elim.col_perm.iter().enumerate() {
            x[*original] = xp[permuted];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<MatC> {
        assert!(self.is_square());
        let n = self.rows;
        let mut out = MatC::zeros(n, n);
        for j in 0..n {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
            let col = self.solve(&e)?;
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        Ok(out)
    }

    /// Symmetry defect `max |A - A^T|` relative to `max |A|`.
    pub fn symmetry_defect(&self) -> f64 {
        assert!(self.is_square(), "symmetry defect of a non-square matrix");
        let max = self.max_norm();
        if max == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).norm());
            }
        }
        worst / max
    }
}

impl std::ops::Index<(usize, usize)> for MatC {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for MatC {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Gaussian elimination with complete pivoting. The pivot sequence is
/// non-increasing in modulus, so rank decisions compare each pivot against
/// the first one.
struct Elimination {
    u: MatC,
    col_perm: Vec<usize>,
    rank: usize,
    swaps: usize,
    first_pivot: f64,
    rhs: Option<Vec<C64>>,
}

impl Elimination {
    fn run(m: &MatC, rel_tol: f64) -> Elimination {
        Self::run_inner(m, None, rel_tol)
    }

    fn run_with_rhs(m: &MatC, b: &[C64], rel_tol: f64) -> Elimination {
        Self::run_inner(m, Some(b.to_vec()), rel_tol)
    }

    fn run_inner(m: &MatC, rhs: Option<Vec<C64>>, rel_tol: f64) -> Elimination {
        let mut u = m.clone();
        let mut rhs = rhs;
        let (rows, cols) = (u.rows, u.cols);
        let mut col_perm: Vec<usize> = (0..cols).collect();
        let mut swaps = 0usize;
        let mut first_pivot = 0.0_f64;
        let steps = rows.min(cols);
        let mut rank = steps;

        for k in 0..steps {
            // complete pivoting: largest modulus in the trailing block
            let (mut pi, mut pj, mut pv) = (k, k, 0.0_f64);
            for i in k..rows {
                for j in k..cols {
                    let v = u[(i, j)].norm();
                    if v > pv {
                        pv = v;
                        pi = i;
                        pj = j;
                    }
                }
            }
            if k == 0 {
                first_pivot = pv;
            }
            if pv <= rel_tol * first_pivot || pv == 0.0 {
                rank = k;
                break;
            }
            if pi != k {
                for j in 0..cols {
                    let tmp = u[(k, j)];
                    u[(k, j)] = u[(pi, j)];
                    u[(pi, j)] = tmp;
                }
                if let Some(r) = rhs.as_mut() {
                    r.swap(k, pi);
                }
                swaps += 1;
            }
            if pj != k {
                for i in 0..rows {
                    let tmp = u[(i, k)];
                    u[(i, k)] = u[(i, pj)];
                    u[(i, pj)] = tmp;
                }
                col_perm.swap(k, pj);
                swaps += 1;
            }
            let pivot = u[(k, k)];
            for i in (k + 1)..rows {
                let factor = u[(i, k)] / pivot;
                if factor.norm_sqr() == 0.0 {
                    continue;
                }
                u[(i, k)] = C64::new(0.0, 0.0);
                for j in (k + 1)..cols {
                    let ukj = u[(k, j)];
                    u[(i, j)] -= factor * ukj;
                }
                if let Some(r) = rhs.as_mut() {
                    let rk = r[k];
                    r[i] -= factor * rk;
                }
            }
        }

        Elimination {
            u,
            col_perm,
            rank,
            swaps,
            first_pivot,
            rhs,
        }
    }
}

/// Numerical rank by pivoted elimination: a pivot counts while its modulus
/// exceeds `tol` times the first (largest) pivot.
pub fn numerical_rank(m: &MatC, tol: f64) -> usize {
    Elimination::run(m, tol).rank
}

/// Ratios pivot_k / pivot_0 of the complete-pivot elimination, a cheap
/// rank-revealing profile (non-increasing).
pub fn pivot_profile(m: &MatC) -> Vec<f64> {
    let elim = Elimination::run(m, 0.0);
    let steps = m.rows().min(m.cols());
    let first = elim.first_pivot;
    if first == 0.0 {
        return vec![0.0; steps];
    }
    (0..steps)
        .map(|k| {
            if k < elim.rank {
                elim.u[(k, k)].norm() / first
            } else {
                0.0
            }
        })
        .collect()
}

/// Spanning vector of a one-dimensional nullspace, normalized projectively.
///
/// Requires the numerical nullity at tolerance `tol` to be exactly one:
/// full rank gives `FullRank`, nullity two or more gives
/// `AmbiguousNullspace`.
pub fn homogeneous_nullvector(m: &MatC, tol: f64) -> Result<ProjVec> {
    let elim = Elimination::run(m, tol);
    let nullity = m.cols - elim.rank;
    if nullity == 0 {
        return Err(Error::FullRank);
    }
    if nullity > 1 {
        return Err(Error::AmbiguousNullspace(nullity));
    }
    if elim.first_pivot == 0.0 {
        return Err(Error::AmbiguousNullspace(m.cols));
    }
    let r = elim.rank;
    // one free variable, at permuted position r
    let mut xp = vec![C64::new(0.0, 0.0); m.cols];
    xp[r] = C64::new(1.0, 0.0);
    for k in (0..r).rev() {
        let mut acc = C64::new(0.0, 0.0);
        for j in (k + 1)..m.cols {
            acc += elim.u[(k, j)] * xp[j];
        }
        xp[k] = -acc / elim.u[(k, k)];
    }
    let mut x = vec![C64::new(0.0, 0.0); m.cols];
    for (permuted, original) in elim.col_perm.iter().enumerate() {
        x[*original] = xp[permuted];
    }

    let residual_of = |v: &[C64]| -> f64 {
        let num: f64 = m.mul_vec(v).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let den: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        num / (m.frobenius_norm() * den)
    };
    // the contract promises ||M v|| <= tol ||M|| ||v||; refine by shifted
    // inverse iteration on the normal equations if back-substitution alone
    // falls short
    if residual_of(&x) > tol {
        let mh = hermitian_of(m);
        let mut gram = mh.mul(m);
        let shift = (tol * m.frobenius_norm()).powi(2) * 1e-2;
        for i in 0..gram.rows() {
            gram[(i, i)] += C64::new(shift, 0.0);
        }
        for _ in 0..3 {
            match gram.solve(&x) {
                Ok(next) => {
                    let norm: f64 =
                        next.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    if norm == 0.0 {
                        break;
                    }
                    x = next.iter().map(|z| z / norm).collect();
                }
                Err(_) => break,
            }
            if residual_of(&x) <= tol {
                break;
            }
        }
        if residual_of(&x) > tol {
            return Err(Error::IllConditioned(format!(
                "nullvector residual {:.3e} exceeds tolerance",
                residual_of(&x)
            )));
        }
    }
    ProjVec::new(x)
}

fn hermitian_of(m: &MatC) -> MatC {
    MatC::from_fn(m.cols(), m.rows(), |i, j| m[(j, i)].conj())
}
