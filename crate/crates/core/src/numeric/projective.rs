use super::C64;
use crate::error::{Error, Result};

/// A point of complex projective space: a nonzero coordinate vector stored in
/// a normalized form where the earliest coordinate of maximal modulus equals
/// exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjVec {
    coords: Vec<C64>,
}

impl ProjVec {
    /// Normalizes a coordinate vector. Fails on (numerically) zero vectors
    /// or non-finite entries.
    pub fn new(coords: Vec<C64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("empty projective vector".into()));
        }
        if coords.iter().any(|z| !super::is_finite_c(*z)) {
            return Err(Error::InvalidInput(
                "non-finite entry in projective vector".into(),
            ));
        }
        let max = coords.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
        if max == 0.0 {
            return Err(Error::InvalidInput("zero projective vector".into()));
        }
        // Earliest coordinate within rounding of the maximal modulus pins
        // the representative.
        let pivot = coords
            .iter()
            .position(|z| z.norm() >= max * (1.0 - 1e-14))
            .expect("max exists");
        let scale = coords[pivot];
        let mut out: Vec<C64> = coords.iter().map(|z| z / scale).collect();
        out[pivot] = C64::new(1.0, 0.0);
        Ok(ProjVec { coords: out })
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

/// Projective distance between two coordinate vectors: the sine of the
/// Hermitian angle between the lines they span, computed as the relative
/// residual of the best scalar multiple (stable near zero).
pub fn projective_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len(), "projective_distance: length mismatch");
    let na2: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let nb2: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    if na2 == 0.0 || nb2 == 0.0 {
        return 1.0;
    }
    let inner: C64 = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| x.conj() * y)
        .sum::<C64>();
    let scale = inner / na2;
    let res: f64 = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (y - scale * x).norm_sqr())
        .sum();
    (res / nb2).max(0.0).sqrt().min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn normalization_pins_earliest_max_to_one() {
        let v = ProjVec::new(vec![c(0.0, 2.0), c(-2.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(v.coords()[0], c(1.0, 0.0));
    }

    #[test]
    fn normalization_is_scale_invariant_and_idempotent() {
        let raw = vec![c(0.3, -1.2), c(2.0, 0.7), c(-0.1, 0.0)];
        let v = ProjVec::new(raw.clone()).unwrap();
        let scaled: Vec<C64> = raw.iter().map(|z| z * c(-3.5, 1.25)).collect();
        let w = ProjVec::new(scaled).unwrap();
        for (a, b) in v.coords().iter().zip(w.coords()) {
            assert!((a - b).norm() < 1e-14);
        }
        let again = ProjVec::new(v.coords().to_vec()).unwrap();
        assert_eq!(again.coords(), v.coords());
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(ProjVec::new(vec![c(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn projective_distance_detects_proportionality() {
        let a = vec![c(1.0, 2.0), c(-0.5, 0.1)];
        let b: Vec<C64> = a.iter().map(|z| z * c(0.0, -4.0)).collect();
        assert!(projective_distance(&a, &b) < 1e-15);
        let d = projective_distance(&a, &[c(1.0, 2.0), c(0.5, 0.1)]);
        assert!(d > 0.1);
    }
}
