//! Density matrices over truncated rotor bases and their spectral
//! diagnostics: von Neumann entropy, purity, partial traces.
//!
//! Product-space matrices use the row-major index `i_S * dim_B + i_B`.

use nalgebra::{DMatrix, DVector};

use crate::basis::MomentumBasis;
use crate::error::{Error, Result};
use crate::C64;

pub type CMatrix = DMatrix<C64>;

const MODULE: &str = "densmat";

/// Maximum allowed `|ρ_ij - conj(ρ_ji)|`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Maximum allowed `|tr ρ - 1|`.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted as numerical noise.
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalues at or below this floor do not contribute to the entropy.
pub const ENTROPY_FLOOR: f64 = 1e-14;

/// A Hermitian, positive semidefinite, unit-trace complex matrix.
///
/// [`DensityMatrix::new`] checks all three invariants. Channel outputs are
/// built with [`DensityMatrix::from_entries_unchecked`] because truncation
/// leakage can shave the trace by a monitored amount; call
/// [`DensityMatrix::validate`] to re-check.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let rho = Self::from_entries_unchecked(entries)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Wraps a square matrix without checking Hermiticity, trace or
    /// positivity.
    pub fn from_entries_unchecked(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::shape(
                MODULE,
                "non-empty square matrix",
                format!("{}x{}", entries.nrows(), entries.ncols()),
            ));
        }
        Ok(Self { entries })
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    pub fn pure(psi: &DVector<C64>) -> Result<Self> {
        let norm2 = psi.norm_squared();
        if norm2 == 0.0 || !norm2.is_finite() {
            return Err(Error::domain(MODULE, "state vector has zero norm"));
        }
        Self::new(psi * psi.adjoint() / C64::from(norm2))
    }

    /// `|m⟩⟨m|` in the basis with cutoff `M`.
    pub fn momentum_eigenstate(basis: MomentumBasis, m: i64) -> Result<Self> {
        let i = basis.index(m).ok_or_else(|| {
            Error::domain(
                MODULE,
                format!("momentum {m} outside cutoff {}", basis.cutoff()),
            )
        })?;
        let mut entries = CMatrix::zeros(basis.dim(), basis.dim());
        entries[(i, i)] = C64::from(1.0);
        Ok(Self { entries })
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::shape(MODULE, "dim >= 1", 0));
        }
        Ok(Self {
            entries: CMatrix::identity(dim, dim) / C64::from(dim as f64),
        })
    }

    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        if let Some(p) = probabilities.iter().find(|p| **p < 0.0) {
            return Err(Error::domain(MODULE, format!("negative probability {p}")));
        }
        let diag = DVector::from_iterator(
            probabilities.len(),
            probabilities.iter().map(|&p| C64::from(p)),
        );
        Self::new(CMatrix::from_diagonal(&diag))
    }

    /// `a ⊗ b` with the row-major product index.
    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Self {
        Self {
            entries: a.entries.kronecker(&b.entries),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_hermitian_trace()?;
        let min = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::Invariant {
                module: MODULE,
                invariant: "positivity",
                detail: format!("minimum eigenvalue {min:.3e}"),
            });
        }
        Ok(())
    }

    fn validate_hermitian_trace(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::Invariant {
                module: MODULE,
                invariant: "hermiticity",
                detail: format!("max |rho_ij - conj(rho_ji)| = {herm:.3e}"),
            });
        }
        let tr = self.trace();
        if (tr - C64::from(1.0)).norm() > TRACE_TOL {
            return Err(Error::Invariant {
                module: MODULE,
                invariant: "unit trace",
                detail: format!("trace = {:.15}{:+.3e}i", tr.re, tr.im),
            });
        }
        Ok(())
    }

    /// Diagonal entries `⟨i|ρ|i⟩`.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).collect()
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, unitary: &CMatrix) -> Result<Self> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::shape(
                MODULE,
                format!("{0}x{0} unitary", self.dim()),
                format!("{}x{}", unitary.nrows(), unitary.ncols()),
            ));
        }
        Ok(Self {
            entries: unitary * &self.entries * unitary.adjoint(),
        })
    }
}

/// Probabilities of the reduced state of one rotor in a two-rotor
/// energy eigenstate: `p0` for `k = 0` and `pk[k-1]` for each of `±k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedSpectrum {
    p0: f64,
    pk: Vec<f64>,
}

/// Tolerance on `p0 + 2 Σ pk = 1`.
pub const SPECTRUM_SUM_TOL: f64 = 1e-10;

impl ReducedSpectrum {
    pub fn new(p0: f64, pk: Vec<f64>) -> Result<Self> {
        if let Some(p) = std::iter::once(&p0).chain(&pk).find(|&&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::domain(
                MODULE,
                format!("probability {p} outside [0, 1]"),
            ));
        }
        let total = p0 + 2.0 * pk.iter().sum::<f64>();
        if (total - 1.0).abs() > SPECTRUM_SUM_TOL {
            return Err(Error::Invariant {
                module: MODULE,
                invariant: "spectrum sum rule",
                detail: format!("p0 + 2 sum pk = {total:.15}"),
            });
        }
        Ok(Self { p0, pk })
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn pk(&self) -> &[f64] {
        &self.pk
    }

    /// All eigenvalues with multiplicity, `p0` first then `p1, p1, p2, p2, …`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        std::iter::once(self.p0)
            .chain(self.pk.iter().flat_map(|&p| [p, p]))
            .collect()
    }

    /// The reduced state as a diagonal matrix in the basis `k = -K+1..K-1`.
    pub fn to_density_matrix(&self) -> DensityMatrix {
        let basis = MomentumBasis::new(self.pk.len());
        let mut entries = CMatrix::zeros(basis.dim(), basis.dim());
        for m in basis.momenta() {
            let i = basis.index(m).unwrap();
            let p = if m == 0 {
                self.p0
            } else {
                self.pk[m.unsigned_abs() as usize - 1]
            };
            entries[(i, i)] = C64::from(p);
        }
        DensityMatrix { entries }
    }
}

fn shannon_term(p: f64) -> f64 {
    if p > ENTROPY_FLOOR {
        -p * p.ln()
    } else {
        0.0
    }
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `S = -Σ λ ln λ` in nats over eigenvalues above [`ENTROPY_FLOOR`].
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    rho.validate_hermitian_trace()?;
    let ev = rho.eigenvalues();
    if let Some(&min) = ev.first() {
        if min < -PSD_TOL {
            return Err(Error::Invariant {
                module: MODULE,
                invariant: "positivity",
                detail: format!("minimum eigenvalue {min:.3e}"),
            });
        }
    }
    Ok(ev.into_iter().map(shannon_term).sum())
}

/// `S = -p0 ln p0 - 2 Σ pk ln pk`.
pub fn spectrum_entropy(spectrum: &ReducedSpectrum) -> Result<f64> {
    if let Some(p) = std::iter::once(&spectrum.p0)
        .chain(&spectrum.pk)
        .find(|&&p| p < 0.0)
    {
        return Err(Error::domain(MODULE, format!("negative probability {p}")));
    }
    Ok(shannon_term(spectrum.p0) + 2.0 * spectrum.pk.iter().map(|&p| shannon_term(p)).sum::<f64>())
}

/// `tr ρ²`, computed as the Frobenius norm squared.
pub fn purity(rho: &DensityMatrix) -> Result<f64> {
    rho.validate_hermitian_trace()?;
    Ok(rho.entries.norm_squared())
}

fn check_product_dims(rho: &CMatrix, dim_s: usize, dim_b: usize) -> Result<()> {
    if rho.nrows() != dim_s * dim_b || rho.ncols() != dim_s * dim_b {
        return Err(Error::shape(
            MODULE,
            format!("{0}x{0} (= {dim_s} x {dim_b})", dim_s * dim_b),
            format!("{}x{}", rho.nrows(), rho.ncols()),
        ));
    }
    Ok(())
}

/// `tr_B ρ` for a product-basis matrix with row-major `(i_S, i_B)` index.
pub fn partial_trace_bath_matrix(rho: &CMatrix, dim_s: usize, dim_b: usize) -> Result<CMatrix> {
    check_product_dims(rho, dim_s, dim_b)?;
    Ok(CMatrix::from_fn(dim_s, dim_s, |a, c| {
        (0..dim_b).map(|b| rho[(a * dim_b + b, c * dim_b + b)]).sum()
    }))
}

/// `tr_S ρ` for a product-basis matrix with row-major `(i_S, i_B)` index.
pub fn partial_trace_system_matrix(rho: &CMatrix, dim_s: usize, dim_b: usize) -> Result<CMatrix> {
    check_product_dims(rho, dim_s, dim_b)?;
    Ok(CMatrix::from_fn(dim_b, dim_b, |b, d| {
        (0..dim_s).map(|a| rho[(a * dim_b + b, a * dim_b + d)]).sum()
    }))
}

pub fn partial_trace_bath(rho: &DensityMatrix, dim_s: usize, dim_b: usize) -> Result<DensityMatrix> {
    partial_trace_bath_matrix(&rho.entries, dim_s, dim_b).map(|entries| DensityMatrix { entries })
}

pub fn partial_trace_system(rho: &DensityMatrix, dim_s: usize, dim_b: usize) -> Result<DensityMatrix> {
    partial_trace_system_matrix(&rho.entries, dim_s, dim_b).map(|entries| DensityMatrix { entries })
}

/// `½ ‖A - B‖₁` for Hermitian `A`, `B`.
pub fn trace_distance_matrix(a: &CMatrix, b: &CMatrix) -> f64 {
    0.5 * hermitian_eigenvalues(&(a - b)).iter().map(|l| l.abs()).sum::<f64>()
}

pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::shape(MODULE, a.dim(), b.dim()));
    }
    Ok(trace_distance_matrix(&a.entries, &b.entries))
}
