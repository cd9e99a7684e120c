//! Truncated angular-momentum basis of a single rotor.

/// The momenta `m = -M, …, M` of a rotor truncated at cutoff `M`.
///
/// Index `i` of a vector or matrix corresponds to momentum `i - M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MomentumBasis {
    cutoff: usize,
}

impl MomentumBasis {
    pub fn new(cutoff: usize) -> Self {
        Self { cutoff }
    }

    /// Infers the cutoff from an odd dimension `2M + 1`.
    pub fn from_dim(dim: usize) -> Option<Self> {
        (dim % 2 == 1).then(|| Self::new(dim / 2))
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        2 * self.cutoff + 1
    }

    pub fn index(&self, m: i64) -> Option<usize> {
        let shifted = m + self.cutoff as i64;
        (0..self.dim() as i64)
            .contains(&shifted)
            .then_some(shifted as usize)
    }

    pub fn momentum(&self, index: usize) -> i64 {
        index as i64 - self.cutoff as i64
    }

    pub fn momenta(&self) -> impl Iterator<Item = i64> {
        let m = self.cutoff as i64;
        -m..=m
    }

    /// Index of `m` folded back into the basis, treating momentum as
    /// periodic with period `2M + 1`.
    pub fn wrapped_index(&self, m: i64) -> usize {
        (m + self.cutoff as i64).rem_euclid(self.dim() as i64) as usize
    }
}
