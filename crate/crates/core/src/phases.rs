use crate::dim::{Dimension, PhaseLayout};
use crate::error::PhaseError;
use crate::scalar::{canonical_angle, Real};

/// The free relative phases of a candidate Gram matrix, one per inter-basis
/// pair `(a, b)` with `a < b`, stored in [`PhaseLayout`] order (radians).
///
/// The Gram entry `G[a][b]` carries `e^{+iφ}`, `G[b][a]` carries `e^{-iφ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseVector<T = f64> {
    d: Dimension,
    phases: Vec<T>,
}

impl<T: Real> PhaseVector<T> {
    pub fn new(d: Dimension, phases: Vec<T>) -> Result<Self, PhaseError> {
        if phases.len() != d.phase_count() {
            return Err(PhaseError::WrongLength { expected: d.phase_count(), got: phases.len() });
        }
        if let Some(index) = phases.iter().position(|p| !p.is_finite()) {
            return Err(PhaseError::NonFinite { index });
        }
        Ok(PhaseVector { d, phases })
    }

    pub fn zeros(d: Dimension) -> Self {
        PhaseVector { d, phases: vec![T::zero(); d.phase_count()] }
    }

    pub fn dim(&self) -> Dimension {
        self.d
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.phases
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.phases
    }

    pub fn into_vec(self) -> Vec<T> {
        self.phases
    }

    /// Copy with every phase reduced to `[0, 2π)`.
    pub fn canonical(&self) -> Self {
        PhaseVector { d: self.d, phases: self.phases.iter().map(|&p| canonical_angle(p)).collect() }
    }

    /// Phase of `G[a][b]` for any two states in different bases.
    pub fn between(&self, layout: &PhaseLayout, a: usize, b: usize) -> T {
        if a < b {
            self.phases[layout.slot(a, b).expect("intra-basis pair")]
        } else {
            -self.phases[layout.slot(b, a).expect("intra-basis pair")]
        }
    }

    /// Rephase state `a` by `e^{iθ}`: `G[a][b] → e^{-iθ} G[a][b]` for all `b`.
    pub fn rephase_state(&mut self, layout: &PhaseLayout, a: usize, theta: T) {
        let n = self.d.states();
        for b in 0..n {
            if b == a || self.d.same_basis(a, b) {
                continue;
            }
            if a < b {
                self.phases[layout.slot(a, b).unwrap()] -= theta;
            } else {
                self.phases[layout.slot(b, a).unwrap()] += theta;
            }
        }
    }
}

impl PhaseVector<f64> {
    /// Lossy conversion to another scalar type.
    pub fn cast<U: Real>(&self) -> PhaseVector<U> {
        PhaseVector { d: self.d, phases: self.phases.iter().map(|&p| crate::scalar::real(p)).collect() }
    }
}
