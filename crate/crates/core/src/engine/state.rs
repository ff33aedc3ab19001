use nalgebra::DVector;

use super::basis::LevelBasis;
use super::operators::{hermitian_deviation, CMatrix, C64};
use crate::error::{Error, Result};

pub type CVector = DVector<C64>;

/// Pure state: complex amplitudes over a labeled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    basis: LevelBasis,
    amplitudes: CVector,
}

impl QuantumState {
    pub fn new(basis: LevelBasis, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != basis.dimension() {
            return Err(Error::DimensionMismatch { expected: basis.dimension(), found: amplitudes.len() });
        }
        Ok(QuantumState { basis, amplitudes })
    }

    /// The basis vector for `label`.
    pub fn basis_state(basis: &LevelBasis, label: &str) -> Result<Self> {
        let idx = basis.index_of(label)?;
        let mut amps = CVector::zeros(basis.dimension());
        amps[idx] = C64::new(1.0, 0.0);
        Ok(QuantumState { basis: basis.clone(), amplitudes: amps })
    }

    /// Builds a state from `(label, amplitude)` pairs and normalizes it.
    pub fn superposition(basis: &LevelBasis, terms: &[(&str, C64)]) -> Result<Self> {
        let mut amps = CVector::zeros(basis.dimension());
        for (label, a) in terms {
            amps[basis.index_of(label)?] += *a;
        }
        let norm = amps.norm();
        if norm == 0.0 {
            return Err(Error::param("amplitudes", "superposition has zero norm"));
        }
        amps.unscale_mut(norm);
        Ok(QuantumState { basis: basis.clone(), amplitudes: amps })
    }

    pub fn basis(&self) -> &LevelBasis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitude(&self, label: &str) -> Result<C64> {
        Ok(self.amplitudes[self.basis.index_of(label)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn population(&self, label: &str) -> Result<f64> {
        Ok(self.amplitude(label)?.norm_sqr())
    }

    pub(crate) fn with_amplitudes(&self, amplitudes: CVector) -> QuantumState {
        QuantumState { basis: self.basis.clone(), amplitudes }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        let elements = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix { basis: self.basis.clone(), elements }
    }
}

/// `|⟨a|b⟩|²`, clamped into [0, 1].
pub fn overlap_fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    if a.dimension() != b.dimension() {
        return Err(Error::DimensionMismatch { expected: a.dimension(), found: b.dimension() });
    }
    let ip = a.amplitudes.dotc(&b.amplitudes);
    Ok(ip.norm_sqr().clamp(0.0, 1.0))
}

/// Mixed state over a labeled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    basis: LevelBasis,
    elements: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-12), unit trace (1e-9) and positivity (−1e-9).
    pub fn new(basis: LevelBasis, elements: CMatrix) -> Result<Self> {
        let rho = DensityMatrix::new_unchecked(basis, elements)?;
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn new_unchecked(basis: LevelBasis, elements: CMatrix) -> Result<Self> {
        let d = basis.dimension();
        if elements.shape() != (d, d) {
            return Err(Error::DimensionMismatch { expected: d, found: elements.nrows() });
        }
        Ok(DensityMatrix { basis, elements })
    }

    /// Incoherent mixture of basis levels with the given weights (normalized).
    pub fn mixture(basis: &LevelBasis, weights: &[(&str, f64)]) -> Result<Self> {
        let mut m = CMatrix::zeros(basis.dimension(), basis.dimension());
        let total: f64 = weights.iter().map(|(_, w)| *w).sum();
        if !(total > 0.0) || weights.iter().any(|(_, w)| *w < 0.0) {
            return Err(Error::InvalidDensity("mixture weights must be non-negative with positive sum".into()));
        }
        for (label, w) in weights {
            let i = basis.index_of(label)?;
            m[(i, i)] += C64::new(w / total, 0.0);
        }
        DensityMatrix::new(basis.clone(), m)
    }

    pub fn validate(&self) -> Result<()> {
        let dev = hermitian_deviation(&self.elements);
        if dev > 1e-12 {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {dev:e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDensity(format!("trace is {tr}, expected 1")));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -1e-9 {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(())
    }

    pub fn basis(&self) -> &LevelBasis {
        &self.basis
    }

    pub fn elements(&self) -> &CMatrix {
        &self.elements
    }

    pub fn dimension(&self) -> usize {
        self.elements.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.elements.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.elements + self.elements.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn populations(&self) -> Vec<f64> {
        self.elements.diagonal().iter().map(|z| z.re.max(0.0)).collect()
    }

    pub fn population(&self, label: &str) -> Result<f64> {
        let i = self.basis.index_of(label)?;
        Ok(self.elements[(i, i)].re.max(0.0))
    }

    pub fn coherence(&self, row: &str, col: &str) -> Result<C64> {
        Ok(self.elements[(self.basis.index_of(row)?, self.basis.index_of(col)?)])
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with(&self, psi: &QuantumState) -> Result<f64> {
        if psi.dimension() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), found: psi.dimension() });
        }
        let a = psi.amplitudes();
        Ok(a.dotc(&(&self.elements * a)).re.clamp(0.0, 1.0))
    }

    pub(crate) fn with_elements(&self, elements: CMatrix) -> DensityMatrix {
        DensityMatrix { basis: self.basis.clone(), elements }
    }
}

/// Either kind of state; `populations` is defined for both.
pub trait Populations {
    fn populations(&self) -> Vec<f64>;
}

impl Populations for QuantumState {
    fn populations(&self) -> Vec<f64> {
        QuantumState::populations(self)
    }
}

impl Populations for DensityMatrix {
    fn populations(&self) -> Vec<f64> {
        DensityMatrix::populations(self)
    }
}

/// Level populations of a pure or mixed state.
pub fn populations<S: Populations>(state: &S) -> Vec<f64> {
    state.populations()
}
