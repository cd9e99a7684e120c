//! Entanglement of the un-kicked two-rotor bound states.
//!
//! For a total eigenstate `e^{imΘ} ce_{2n}(θ)` with centre-of-mass angle
//! `Θ = (θ₁+θ₂)/2` and relative angle `θ = (θ₁-θ₂)/2`, the reduced density
//! matrix of rotor 1 is diagonal in its momentum basis with eigenvalues
//! `p_0 = 2A_0²` and `p_{±k} = A_{2k}²/2`. The centre-of-mass factor only
//! shifts the momentum labels, so the spectrum is independent of `m`.

use crate::densmat::{spectrum_entropy, ReducedSpectrum, SPECTRUM_SUM_TOL};
use crate::error::{Error, Result};
use crate::mathieu::{self, MathieuMode, QConvention};

const MODULE: &str = "bound";

#[derive(Clone, Debug, PartialEq)]
pub struct BoundStateResult {
    pub g: f64,
    /// Relative-motion energy `E₂ = a + g`.
    pub e2: f64,
    pub spectrum: ReducedSpectrum,
    /// Entanglement entropy in nats.
    pub entropy: f64,
}

pub fn reduced_spectrum(mode: &MathieuMode) -> Result<ReducedSpectrum> {
    let norm = mode.normalization();
    if (norm - 1.0).abs() > SPECTRUM_SUM_TOL {
        return Err(Error::Invariant {
            module: MODULE,
            invariant: "Mathieu normalization",
            detail: format!("2 A_0^2 + sum A_2k^2 = {norm:.15}"),
        });
    }
    let c = mode.coefficients();
    ReducedSpectrum::new(
        2.0 * c[0] * c[0],
        c[1..].iter().map(|a| a * a / 2.0).collect(),
    )
}

fn result_for(g: f64, mode: &MathieuMode) -> Result<BoundStateResult> {
    let spectrum = reduced_spectrum(mode)?;
    let entropy = spectrum_entropy(&spectrum)?;
    Ok(BoundStateResult {
        g,
        e2: mode.characteristic_value() + g,
        spectrum,
        entropy,
    })
}

/// Entropy and energy of the order-`2n` eigenstate at coupling `g`.
pub fn bound_state(g: f64, order: u32, convention: QConvention) -> Result<BoundStateResult> {
    if !(g >= 0.0) {
        return Err(Error::domain(MODULE, format!("coupling g = {g} must be >= 0")));
    }
    let mode = mathieu::mode(convention.mathieu_q(g), order)?;
    result_for(g, &mode)
}

pub fn entropy_vs_coupling(
    g_grid: &[f64],
    order: u32,
    convention: QConvention,
) -> Result<Vec<BoundStateResult>> {
    g_grid
        .iter()
        .map(|&g| bound_state(g, order, convention))
        .collect()
}

/// Excited eigenstate of order `2n` at Mathieu parameter `q`; the coupling
/// reported is `g = q` (paper-numbers convention).
pub fn excited_state_spectrum(q: f64, order: u32) -> Result<BoundStateResult> {
    let mode = mathieu::mode(q, order)?;
    result_for(q, &mode)
}

/// `g ∈ [0, 5]` at 51 points.
pub fn default_g_grid() -> Vec<f64> {
    (0..=50).map(|i| i as f64 / 10.0).collect()
}
