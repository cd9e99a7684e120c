//! The stationary-bath one-kick channel on the system rotor,
//!
//! ```text
//! Φ(ρ) = (1/2π) ∫ dθ K_θ U_f ρ U_f† K_θ†,   K_θ = exp(-i g cos(θ - θ̂)),
//! U_f = exp(-iπ p̂² / N),                    N = 2π m_S / τ.
//! ```
//!
//! Expanding `K_θ` with Jacobi–Anger, the θ-average removes every cross term
//! and leaves the Kraus family `K_n = J_n(g) S_{-n} U_f`, where `S_{-n}`
//! lowers the momentum by `n`:
//!
//! ```text
//! Φ(ρ) = Σ_n J_n(g)² S_{-n} U_f ρ U_f† S_{-n}†.
//! ```
//!
//! [`KrausChannel::apply_bessel`] uses this closed form;
//! [`apply_quadrature`] evaluates the θ integral directly on a grid and must
//! agree with it.

use std::f64::consts::PI;

use crate::basis::MomentumBasis;
use crate::bessel::{tail_rule_n_cut, BesselTable};
use crate::densmat::{purity, von_neumann_entropy, CMatrix, DensityMatrix};
use crate::error::{Error, Result};
use crate::C64;

const MODULE: &str = "kraus";

/// Completeness must hold to this tolerance.
pub const COMPLETENESS_TOL: f64 = 1e-12;
/// Largest trace loss through the momentum cutoff per application.
pub const LEAKAGE_TOL: f64 = 1e-8;

/// What happens to amplitude shifted past `±M`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Boundary {
    /// Dropped; the loss is reported as leakage.
    #[default]
    Truncate,
    /// Folded back modulo `2M + 1`. Exactly unital on the truncated space,
    /// but momentum transfer across the edge is unphysical.
    Periodic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    g: f64,
    dimension_parameter: f64,
    period: f64,
    basis: MomentumBasis,
    bessel: BesselTable,
    free_phases: Vec<C64>,
    boundary: Boundary,
}

fn check_n_cut(g: f64, n_cut: usize, bessel: &BesselTable) -> Result<()> {
    let required = (g.abs() + 30.0).ceil() as usize;
    let deficit = 1.0 - bessel.square_sum();
    if n_cut < required || deficit.abs() > COMPLETENESS_TOL {
        return Err(Error::CompletenessDeficit {
            deficit,
            n_cut,
            required,
        });
    }
    Ok(())
}

impl KrausChannel {
    /// Channel with kick strength `g` and dimension parameter
    /// `N = 2π m_S / τ` on the basis with cutoff `M`.
    pub fn new(g: f64, dimension_parameter: f64, cutoff: usize, n_cut: usize) -> Result<Self> {
        if !g.is_finite() {
            return Err(Error::domain(MODULE, format!("g = {g} must be finite")));
        }
        if !(dimension_parameter > 0.0 && dimension_parameter.is_finite()) {
            return Err(Error::domain(
                MODULE,
                format!("N = {dimension_parameter} must be > 0"),
            ));
        }
        let bessel = BesselTable::new(g, n_cut);
        check_n_cut(g, n_cut, &bessel)?;
        let basis = MomentumBasis::new(cutoff);
        let free_phases = basis
            .momenta()
            .map(|m| C64::from_polar(1.0, -PI * (m * m) as f64 / dimension_parameter))
            .collect();
        Ok(Self {
            g,
            dimension_parameter,
            period: 1.0,
            basis,
            bessel,
            free_phases,
            boundary: Boundary::Truncate,
        })
    }

    /// Channel for a system rotor of mass `m_S` kicked every `τ`, with the
    /// tail-rule shift cutoff.
    pub fn from_physical(g: f64, tau: f64, m_s: f64, cutoff: usize) -> Result<Self> {
        if !(tau > 0.0) || !(m_s > 0.0) {
            return Err(Error::domain(
                MODULE,
                format!("tau = {tau} and m_S = {m_s} must be > 0"),
            ));
        }
        Ok(Self::new(g, 2.0 * PI * m_s / tau, cutoff, tail_rule_n_cut(g))?.with_period(tau))
    }

    /// Sets the kick period used for trajectory time labels.
    pub fn with_period(mut self, tau: f64) -> Self {
        self.period = tau;
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn kick_strength(&self) -> f64 {
        self.g
    }

    pub fn dimension_parameter(&self) -> f64 {
        self.dimension_parameter
    }

    /// Kick period used to label trajectory times (1 unless built with
    /// [`KrausChannel::from_physical`]).
    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn basis(&self) -> MomentumBasis {
        self.basis
    }

    pub fn n_cut(&self) -> usize {
        self.bessel.n_cut()
    }

    /// `J_n(g)` for `|n| ≤ n_cut`.
    pub fn weight(&self, n: i64) -> f64 {
        self.bessel.get(n)
    }

    pub fn free_phases(&self) -> &[C64] {
        &self.free_phases
    }

    /// `1 - Σ_{|n| ≤ n_cut} J_n(g)²`.
    pub fn completeness_deficit(&self) -> f64 {
        1.0 - self.bessel.square_sum()
    }

    fn shift_range(&self) -> i64 {
        match self.boundary {
            // Larger shifts leave the basis from every starting momentum.
            Boundary::Truncate => self.n_cut().min(2 * self.basis.cutoff()) as i64,
            Boundary::Periodic => self.n_cut() as i64,
        }
    }

    fn free_evolution(&self, rho: &CMatrix) -> CMatrix {
        CMatrix::from_fn(rho.nrows(), rho.ncols(), |a, b| {
            self.free_phases[a] * rho[(a, b)] * self.free_phases[b].conj()
        })
    }

    fn target(&self, m: i64) -> Option<usize> {
        match self.boundary {
            Boundary::Truncate => self.basis.index(m),
            Boundary::Periodic => Some(self.basis.wrapped_index(m)),
        }
    }

    /// Explicit Kraus operators `K_n = J_n S_{-n} U_f` for `|n| ≤ n_cut`
    /// (restricted to shifts that can act inside the basis).
    pub fn kraus_operators(&self) -> Vec<CMatrix> {
        let d = self.basis.dim();
        let r = self.shift_range();
        (-r..=r)
            .map(|n| {
                let mut k = CMatrix::zeros(d, d);
                for (i, m) in self.basis.momenta().enumerate() {
                    if let Some(j) = self.target(m - n) {
                        k[(j, i)] += self.free_phases[i] * self.weight(n);
                    }
                }
                k
            })
            .collect()
    }

    /// Applies the channel without the leakage check; returns the image and
    /// the trace lost through the cutoff.
    pub fn apply_unchecked(&self, rho: &DensityMatrix) -> Result<(DensityMatrix, f64)> {
        let d = self.basis.dim();
        if rho.dim() != d {
            return Err(Error::shape(MODULE, d, rho.dim()));
        }
        let free = self.free_evolution(rho.entries());
        let mut out = CMatrix::zeros(d, d);
        let r = self.shift_range();
        let momenta: Vec<i64> = self.basis.momenta().collect();
        for n in -r..=r {
            let w = self.weight(n).powi(2);
            if w == 0.0 {
                continue;
            }
            let targets: Vec<Option<usize>> = momenta.iter().map(|&m| self.target(m - n)).collect();
            for (i, ti) in targets.iter().enumerate() {
                let Some(ti) = *ti else { continue };
                for (j, tj) in targets.iter().enumerate() {
                    if let Some(tj) = *tj {
                        out[(ti, tj)] += free[(i, j)] * w;
                    }
                }
            }
        }
        let leakage = rho.trace().re - out.trace().re;
        Ok((DensityMatrix::from_entries_unchecked(out)?, leakage))
    }

    pub fn apply_bessel(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let (out, leakage) = self.apply_unchecked(rho)?;
        if leakage > LEAKAGE_TOL {
            return Err(Error::Leakage {
                module: MODULE,
                deficiency: leakage,
                limit: LEAKAGE_TOL,
            });
        }
        Ok(out)
    }
}

/// Smallest θ grid accepted by [`apply_quadrature`].
pub fn min_quadrature_points(n_cut: usize, cutoff: usize) -> usize {
    4 * (n_cut + cutoff)
}

/// Trapezoidal θ-average `(1/N_θ) Σ_j K_{θ_j} U_f ρ U_f† K_{θ_j}†`.
///
/// `K_θ` is built from the angle-space representation of
/// `exp(-i g cos(θ - θ̂))`: its momentum matrix elements are Fourier
/// coefficients sampled on `n_theta` points, never Bessel values.
pub fn apply_quadrature(
    g: f64,
    dimension_parameter: f64,
    n_theta: usize,
    rho: &DensityMatrix,
) -> Result<DensityMatrix> {
    let basis = MomentumBasis::from_dim(rho.dim())
        .ok_or_else(|| Error::shape(MODULE, "odd dimension 2M+1", rho.dim()))?;
    let required = min_quadrature_points(tail_rule_n_cut(g), basis.cutoff());
    if n_theta < required {
        return Err(Error::Quadrature { n_theta, required });
    }
    if !(dimension_parameter > 0.0) {
        return Err(Error::domain(
            MODULE,
            format!("N = {dimension_parameter} must be > 0"),
        ));
    }
    let d = basis.dim();
    let m_max = 2 * basis.cutoff() as i64;

    // c_k = (1/2π) ∫ dφ exp(-i g cos φ) e^{-ikφ}; the θ-shifted operator has
    // coefficients c_k e^{-ikθ}.
    let grid: Vec<f64> = (0..n_theta)
        .map(|j| 2.0 * PI * j as f64 / n_theta as f64)
        .collect();
    let samples: Vec<C64> = grid.iter().map(|&p| C64::from_polar(1.0, -g * p.cos())).collect();
    let coeff: Vec<C64> = (-m_max..=m_max)
        .map(|k| {
            grid.iter()
                .zip(&samples)
                .map(|(&p, &f)| f * C64::from_polar(1.0, -(k as f64) * p))
                .sum::<C64>()
                / n_theta as f64
        })
        .collect();

    let phases: Vec<C64> = basis
        .momenta()
        .map(|m| C64::from_polar(1.0, -PI * (m * m) as f64 / dimension_parameter))
        .collect();
    let free = CMatrix::from_fn(d, d, |a, b| phases[a] * rho.entries()[(a, b)] * phases[b].conj());

    let mut out = CMatrix::zeros(d, d);
    for &theta in &grid {
        let k_theta = CMatrix::from_fn(d, d, |i, j| {
            let k = i as i64 - j as i64;
            coeff[(k + m_max) as usize] * C64::from_polar(1.0, -(k as f64) * theta)
        });
        out += &k_theta * &free * k_theta.adjoint();
    }
    DensityMatrix::from_entries_unchecked(out / C64::from(n_theta as f64))
}

/// One row of a channel trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KickRecord {
    pub kick: usize,
    pub time: f64,
    pub entropy: f64,
    /// `|tr ρ - 1|`.
    pub trace_dev: f64,
    pub purity: f64,
}

/// `Φⁿ(ρ₀)` for `n = 0..=n_kicks` with per-kick diagnostics, plus the final
/// state.
pub fn iterate(
    channel: &KrausChannel,
    rho0: &DensityMatrix,
    n_kicks: usize,
) -> Result<(Vec<KickRecord>, DensityMatrix)> {
    let record = |kick: usize, rho: &DensityMatrix| -> Result<KickRecord> {
        Ok(KickRecord {
            kick,
            time: kick as f64 * channel.period(),
            entropy: von_neumann_entropy(rho)?,
            trace_dev: (rho.trace().re - 1.0).abs(),
            purity: purity(rho)?,
        })
    };
    let mut rho = rho0.clone();
    let mut rows = Vec::with_capacity(n_kicks + 1);
    rows.push(record(0, &rho)?);
    for k in 1..=n_kicks {
        rho = channel.apply_bessel(&rho)?;
        rows.push(record(k, &rho)?);
    }
    Ok((rows, rho))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn channel(g: f64, m: usize) -> KrausChannel {
        KrausChannel::new(g, 2.0 * PI, m, tail_rule_n_cut(g)).unwrap()
    }

    #[test]
    fn zero_coupling_is_free_evolution() {
        let ch = channel(0.0, 4);
        let ops = ch.kraus_operators();
        let nonzero: Vec<_> = ops.iter().filter(|k| k.camax() > 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        let phases = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(ch.free_phases().to_vec()));
        assert!((nonzero[0] - &phases).camax() < 1e-15);

        let mut psi = nalgebra::DVector::<C64>::zeros(9);
        psi[3] = C64::new(0.6, 0.0);
        psi[5] = C64::new(0.0, 0.8);
        let rho = DensityMatrix::pure(&psi).unwrap();
        let out = ch.apply_bessel(&rho).unwrap();
        let expect = rho.conjugate_by(&phases).unwrap();
        assert!((out.entries() - expect.entries()).camax() < 1e-15);
    }

    #[test]
    fn small_coupling_weight() {
        let g: f64 = 0.1414;
        let ch = channel(g, 4);
        let j0sq = ch.weight(0).powi(2);
        // J_0² = 1 - g²/2 + 3g⁴/32 - …
        assert!((j0sq - (1.0 - g * g / 2.0)).abs() < 0.1 * g.powi(4));
        assert!((j0sq - (1.0 - g * g / 2.0 + 3.0 * g.powi(4) / 32.0)).abs() < g.powi(6));
    }

    #[test]
    fn completeness() {
        let ch = KrausChannel::new(1.0, 2.0 * PI, 4, 31).unwrap();
        assert!(ch.completeness_deficit().abs() < 1e-12);
        let err = KrausChannel::new(1.0, 2.0 * PI, 4, 1).unwrap_err();
        match err {
            Error::CompletenessDeficit { deficit, .. } => {
                let j0 = crate::bessel::bessel_j(0, 1.0);
                let j1 = crate::bessel::bessel_j(1, 1.0);
                assert!((deficit - (1.0 - j0 * j0 - 2.0 * j1 * j1)).abs() < 1e-14);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn operator_sum_is_identity_in_interior() {
        let ch = channel(0.5, 12);
        let d = ch.basis().dim();
        let sum = ch
            .kraus_operators()
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k);
        for i in 10..d - 10 {
            for j in 10..d - 10 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((sum[(i, j)] - C64::from(expect)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn momentum_eigenstate_spreads_with_bessel_weights() {
        let g = 0.8;
        let ch = channel(g, 15);
        let rho = DensityMatrix::momentum_eigenstate(ch.basis(), 0).unwrap();
        let out = ch.apply_bessel(&rho).unwrap();
        for (i, m) in ch.basis().momenta().enumerate() {
            for j in 0..ch.basis().dim() {
                let v = out.entries()[(i, j)];
                if i == j {
                    let expect = crate::bessel::bessel_j(-m, g).powi(2);
                    assert!((v.re - expect).abs() < 1e-15 && v.im.abs() < 1e-15);
                } else {
                    assert_eq!(v, C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn leakage_is_reported() {
        let ch = channel(0.5, 3);
        let rho = DensityMatrix::momentum_eigenstate(ch.basis(), 3).unwrap();
        assert!(matches!(ch.apply_bessel(&rho), Err(Error::Leakage { .. })));
        let (_, leak) = ch.apply_unchecked(&rho).unwrap();
        assert!(leak > 0.0);
    }

    #[test]
    fn periodic_boundary_is_unital() {
        let ch = channel(1.0, 4).with_boundary(Boundary::Periodic);
        let mm = DensityMatrix::maximally_mixed(9).unwrap();
        let out = ch.apply_bessel(&mm).unwrap();
        assert!((out.entries() - mm.entries()).camax() < 1e-14);
    }

    #[test]
    fn quadrature_agrees_with_bessel_on_basic_inputs() {
        let g = 0.1414;
        let ch = channel(g, 8);
        let n_theta = min_quadrature_points(ch.n_cut(), 8);
        let mut psi = nalgebra::DVector::<C64>::zeros(17);
        psi[7] = C64::new(0.6, 0.0);
        psi[9] = C64::new(0.0, 0.8);
        for rho in [
            DensityMatrix::momentum_eigenstate(ch.basis(), 0).unwrap(),
            DensityMatrix::pure(&psi).unwrap(),
        ] {
            let a = ch.apply_bessel(&rho).unwrap();
            let b = apply_quadrature(g, 2.0 * PI, n_theta, &rho).unwrap();
            assert!((a.entries() - b.entries()).camax() < 1e-10);
            let c = apply_quadrature(g, 2.0 * PI, 2 * n_theta, &rho).unwrap();
            assert!((b.entries() - c.entries()).camax() < 1e-12);
        }
        let rho = DensityMatrix::momentum_eigenstate(ch.basis(), 0).unwrap();
        let free = apply_quadrature(0.0, 2.0 * PI, 200, &rho).unwrap();
        assert!((free.entries() - rho.entries()).camax() < 1e-14);
    }

    #[test]
    fn quadrature_rejects_coarse_grid() {
        let rho = DensityMatrix::maximally_mixed(9).unwrap();
        assert!(matches!(
            apply_quadrature(0.3, 2.0 * PI, 20, &rho),
            Err(Error::Quadrature { .. })
        ));
    }

    #[test]
    fn iterate_zero_kicks_returns_initial_state() {
        let ch = channel(0.3, 6);
        let rho = DensityMatrix::momentum_eigenstate(ch.basis(), 0).unwrap();
        let (rows, last) = iterate(&ch, &rho, 0).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].entropy, 0.0);
        assert_eq!(last, rho);
    }

    #[test]
    fn physical_constructor_sets_period() {
        let ch = KrausChannel::from_physical(0.2, 0.5, 1.0, 4).unwrap();
        assert!((ch.dimension_parameter() - 4.0 * PI).abs() < 1e-12);
        assert_eq!(ch.period(), 0.5);
    }
}
