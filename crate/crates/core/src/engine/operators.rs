use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Largest entry of `|A - A†|`.
pub(crate) fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Hermiticity check at 1e-12, relative to the matrix scale once entries exceed 1.
pub(crate) fn check_hermitian(m: &CMatrix) -> Result<()> {
    let dev = hermitian_deviation(m);
    if dev > 1e-12 * max_abs(m).max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// Constant Hamiltonian (rad/s) applied for a fixed duration (s).
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSegment {
    matrix: CMatrix,
    duration: f64,
}

impl HamiltonianSegment {
    /// Zero duration is accepted and acts as the identity.
    pub fn new(matrix: CMatrix, duration: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        if !(duration >= 0.0) || !duration.is_finite() {
            return Err(Error::param("duration", format!("must be finite and non-negative, got {duration}")));
        }
        check_hermitian(&matrix)?;
        Ok(HamiltonianSegment { matrix, duration })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    /// Same Hamiltonian for a different duration.
    pub fn with_duration(&self, duration: f64) -> Result<Self> {
        HamiltonianSegment::new(self.matrix.clone(), duration)
    }

    /// Splits the segment into `parts` equal sub-segments.
    pub fn split(&self, parts: usize) -> Vec<HamiltonianSegment> {
        let parts = parts.max(1);
        let dt = self.duration / parts as f64;
        (0..parts).map(|_| HamiltonianSegment { matrix: self.matrix.clone(), duration: dt }).collect()
    }
}

/// Lindblad jump operator, entries in √(rate) units.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseOperator {
    matrix: CMatrix,
    description: String,
}

impl CollapseOperator {
    pub fn new(matrix: CMatrix, description: impl Into<String>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        if matrix.iter().all(|z| z.norm() == 0.0) {
            return Err(Error::param("collapse", "operator has no nonzero entry"));
        }
        Ok(CollapseOperator { matrix, description: description.into() })
    }

    /// Incoherent decay `|to⟩⟨from|` at `rate` (s⁻¹).
    pub fn decay(dimension: usize, from: usize, to: usize, rate: f64, description: impl Into<String>) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::param("rate", format!("decay rate must be positive, got {rate}")));
        }
        if from >= dimension || to >= dimension {
            return Err(Error::DimensionMismatch { expected: dimension, found: from.max(to) + 1 });
        }
        let mut m = CMatrix::zeros(dimension, dimension);
        m[(to, from)] = C64::new(rate.sqrt(), 0.0);
        CollapseOperator::new(m, description)
    }

    /// Pure dephasing of `level`: coherences with it decay at `rate / 2`.
    pub fn dephasing(dimension: usize, level: usize, rate: f64, description: impl Into<String>) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::param("rate", format!("dephasing rate must be positive, got {rate}")));
        }
        if level >= dimension {
            return Err(Error::DimensionMismatch { expected: dimension, found: level + 1 });
        }
        let mut m = CMatrix::zeros(dimension, dimension);
        m[(level, level)] = C64::new(rate.sqrt(), 0.0);
        CollapseOperator::new(m, description)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    /// Total rate leaving `level` through this channel, `(L†L)_{ll}`.
    pub fn rate_out_of(&self, level: usize) -> f64 {
        self.matrix.column(level).iter().map(|z| z.norm_sqr()).sum()
    }

    /// Embeds the operator acting on one factor of a product space.
    pub fn embed(&self, left_dim: usize, right_dim: usize) -> Result<Self> {
        let m = kron(&kron(&CMatrix::identity(left_dim, left_dim), &self.matrix), &CMatrix::identity(right_dim, right_dim));
        CollapseOperator::new(m, self.description.clone())
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(HamiltonianSegment::new(m, 1.0), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn rejects_negative_duration_and_empty_collapse() {
        assert!(HamiltonianSegment::new(CMatrix::zeros(2, 2), -1.0).is_err());
        assert!(CollapseOperator::new(CMatrix::zeros(2, 2), "nothing").is_err());
        assert!(CollapseOperator::decay(2, 1, 0, -3.0, "neg").is_err());
    }

    #[test]
    fn decay_rate_bookkeeping() {
        let c = CollapseOperator::decay(3, 2, 0, 5.0, "r->0").unwrap();
        assert!((c.rate_out_of(2) - 5.0).abs() < 1e-12);
        assert_eq!(c.rate_out_of(0), 0.0);
    }

    #[test]
    fn kron_shapes() {
        let a = CMatrix::identity(3, 3);
        let b = CMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        let k = kron(&a, &b);
        assert_eq!(k.shape(), (6, 6));
        assert_eq!(k[(2, 3)], C64::new(1.0, 0.0));
        assert_eq!(k[(1, 2)], C64::new(0.0, 0.0));
    }
}
