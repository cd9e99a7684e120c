//! Exact unitary dynamics of the kicked rotor pair on a truncated product
//! momentum basis.
//!
//! One period is `U = K · (F_S ⊗ F_B)` with free phases
//! `F_X = diag(e^{-i m² τ / (2 m_X)})` followed by the kick
//! `K = exp(-i g cos(θ_S - θ_B))`. The kick conserves `m_S + m_B`:
//!
//! ```text
//! ⟨m_S + δ, m_B - δ| K |m_S, m_B⟩ = (-i)^δ J_δ(g)
//! ```
//!
//! Amplitude pushed past either cutoff is dropped; leakage is measured and
//! bounded instead of wrapped around.

use std::f64::consts::PI;

use nalgebra::{DVector, SymmetricEigen};

use crate::basis::MomentumBasis;
use crate::bessel::{tail_rule_n_cut, BesselTable};
use crate::densmat::{
    trace_distance_matrix, von_neumann_entropy, CMatrix, DensityMatrix,
};
use crate::error::{Error, Result};
use crate::C64;

const MODULE: &str = "floquet";

/// Bessel tail (`Σ_{|n|>w} J_n²`) tolerated inside the unitary interior.
pub const INTERIOR_TAIL_TOL: f64 = 1e-10;
/// Allowed norm loss along an exact trajectory.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KickedSystemParams {
    pub g: f64,
    pub tau: f64,
    pub m_s: f64,
    /// Bath mass; `f64::INFINITY` freezes the bath free evolution.
    pub m_b: f64,
    pub cutoff_s: usize,
    pub cutoff_b: usize,
}

impl KickedSystemParams {
    pub fn new(g: f64, tau: f64, m_s: f64, m_b: f64, cutoff_s: usize, cutoff_b: usize) -> Result<Self> {
        let p = Self {
            g,
            tau,
            m_s,
            m_b,
            cutoff_s,
            cutoff_b,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::domain(MODULE, what));
        if !self.g.is_finite() {
            return bad(format!("g = {} must be finite", self.g));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad(format!("tau = {} must be > 0", self.tau));
        }
        if !(self.m_s > 0.0 && self.m_s.is_finite()) {
            return bad(format!("m_S = {} must be > 0", self.m_s));
        }
        if !(self.m_b > 0.0) {
            return bad(format!("m_B = {} must be > 0", self.m_b));
        }
        if self.cutoff_s < 1 || self.cutoff_b < 1 {
            return bad(format!(
                "cutoffs M_S = {}, M_B = {} must be >= 1",
                self.cutoff_s, self.cutoff_b
            ));
        }
        Ok(())
    }

    /// `N = 2π m_S / τ`.
    pub fn dimension_parameter(&self) -> f64 {
        2.0 * PI * self.m_s / self.tau
    }

    /// `N₀² τ / m_B`, small in the stationary-bath regime.
    pub fn regime_ratio(&self, bath_cutoff: usize) -> f64 {
        (bath_cutoff * bath_cutoff) as f64 * self.tau / self.m_b
    }

    /// Same parameters with an infinitely heavy (stationary) bath.
    pub fn stationary_bath_limit(&self) -> Self {
        Self {
            m_b: f64::INFINITY,
            ..*self
        }
    }

    pub fn system_basis(&self) -> MomentumBasis {
        MomentumBasis::new(self.cutoff_s)
    }

    pub fn bath_basis(&self) -> MomentumBasis {
        MomentumBasis::new(self.cutoff_b)
    }

    pub fn dim(&self) -> usize {
        self.system_basis().dim() * self.bath_basis().dim()
    }
}

/// Diagonal bath state `Σ_ν c_ν |ν⟩⟨ν|` over `ν ∈ {-N₀, …, N₀}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BathSpec {
    cutoff: usize,
    beta: f64,
    weights: Vec<f64>,
}

impl BathSpec {
    pub fn new(cutoff: usize, beta: f64, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != 2 * cutoff + 1 {
            return Err(Error::shape(MODULE, 2 * cutoff + 1, weights.len()));
        }
        if let Some(c) = weights.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(Error::domain(MODULE, format!("bath weight {c} outside [0, 1]")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(MODULE, format!("bath weights sum to {total}")));
        }
        Ok(Self {
            cutoff,
            beta,
            weights,
        })
    }

    /// The bath momentum eigenstate `ν = 0`.
    pub fn ground() -> Self {
        Self {
            cutoff: 0,
            beta: f64::INFINITY,
            weights: vec![1.0],
        }
    }

    /// Equal weights `1/(2N₀+1)`: the infinite-temperature state below the
    /// energy cutoff.
    pub fn flat(cutoff: usize) -> Self {
        let n = 2 * cutoff + 1;
        Self {
            cutoff,
            beta: 0.0,
            weights: vec![1.0 / n as f64; n],
        }
    }

    /// `c_ν ∝ exp(-β ν² / (2 m_B))` below the cutoff.
    pub fn thermal(cutoff: usize, beta: f64, m_b: f64) -> Result<Self> {
        let raw: Vec<f64> = (-(cutoff as i64)..=cutoff as i64)
            .map(|nu| (-beta * (nu * nu) as f64 / (2.0 * m_b)).exp())
            .collect();
        let z: f64 = raw.iter().sum();
        Self::new(cutoff, beta, raw.into_iter().map(|c| c / z).collect())
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(ν, c_ν)` for the occupied levels.
    pub fn occupied(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let n0 = self.cutoff as i64;
        (-n0..=n0)
            .zip(self.weights.iter().copied())
            .filter(|(_, c)| *c > 0.0)
    }

    pub fn density_matrix(&self, basis: MomentumBasis) -> Result<DensityMatrix> {
        if self.cutoff > basis.cutoff() {
            return Err(Error::shape(
                MODULE,
                format!("bath cutoff M_B >= N0 = {}", self.cutoff),
                basis.cutoff(),
            ));
        }
        let mut p = vec![0.0; basis.dim()];
        for (nu, c) in self.occupied() {
            p[basis.index(nu).unwrap()] = c;
        }
        DensityMatrix::diagonal(&p)
    }
}

fn minus_i_pow(n: i64) -> C64 {
    match n.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, -1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 1.0),
    }
}

/// Amplitude `(-i)^δ J_δ(g)` for the transition `(m_S, m_B) → (m_S+δ, m_B-δ)`.
pub fn kick_matrix_element(g: f64, delta: i64) -> C64 {
    minus_i_pow(delta) * crate::bessel::bessel_j(delta, g)
}

/// Fourier coefficients `c_n` of `exp(-i g cos φ)` for `|n| ≤ n_max` by
/// trapezoidal quadrature on `n_grid` points; index `n + n_max`.
pub fn kick_amplitudes_dft(g: f64, n_max: usize, n_grid: usize) -> Vec<C64> {
    let samples: Vec<(f64, C64)> = (0..n_grid)
        .map(|j| {
            let phi = 2.0 * PI * j as f64 / n_grid as f64;
            (phi, C64::from_polar(1.0, -g * phi.cos()))
        })
        .collect();
    (-(n_max as i64)..=n_max as i64)
        .map(|n| {
            samples
                .iter()
                .map(|&(phi, f)| f * C64::from_polar(1.0, -(n as f64) * phi))
                .sum::<C64>()
                / n_grid as f64
        })
        .collect()
}

/// How the kick amplitudes are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KickMethod {
    /// Analytic Jacobi–Anger coefficients.
    Bessel,
    /// Trapezoidal Fourier transform of `exp(-i g cos φ)` on this many points.
    AngleGrid(usize),
}

/// The one-period evolution operator, applied sparsely.
#[derive(Clone, Debug)]
pub struct FloquetOperator {
    params: KickedSystemParams,
    n_cut: usize,
    kick: Vec<C64>,
    phase_s: Vec<C64>,
    phase_b: Vec<C64>,
    band: usize,
    deficiency: f64,
}

fn free_phases(basis: MomentumBasis, tau: f64, mass: f64) -> Vec<C64> {
    basis
        .momenta()
        .map(|m| {
            if mass.is_infinite() {
                C64::new(1.0, 0.0)
            } else {
                C64::from_polar(1.0, -((m * m) as f64) * tau / (2.0 * mass))
            }
        })
        .collect()
}

impl FloquetOperator {
    pub fn new(params: KickedSystemParams) -> Result<Self> {
        Self::with_method(params, KickMethod::Bessel)
    }

    pub fn with_method(params: KickedSystemParams, method: KickMethod) -> Result<Self> {
        params.validate()?;
        let (ms, mb) = (params.cutoff_s, params.cutoff_b);
        let n_cut = tail_rule_n_cut(params.g).min(2 * ms.min(mb));
        let kick = match method {
            KickMethod::Bessel => (-(n_cut as i64)..=n_cut as i64)
                .map(|d| kick_matrix_element(params.g, d))
                .collect(),
            KickMethod::AngleGrid(points) => kick_amplitudes_dft(params.g, n_cut, points),
        };

        let table = BesselTable::new(params.g, tail_rule_n_cut(params.g));
        let band = table.band_width(INTERIOR_TAIL_TOL);
        let mut op = Self {
            params,
            n_cut,
            kick,
            phase_s: free_phases(params.system_basis(), params.tau, params.m_s),
            phase_b: free_phases(params.bath_basis(), params.tau, params.m_b),
            band,
            deficiency: 0.0,
        };
        if band > ms || band > mb {
            let worst = op.column_deficiency_max(false);
            return Err(Error::Leakage {
                module: MODULE,
                deficiency: worst,
                limit: INTERIOR_TAIL_TOL,
            });
        }
        op.deficiency = op.column_deficiency_max(true);
        if op.deficiency > INTERIOR_TAIL_TOL {
            return Err(Error::Leakage {
                module: MODULE,
                deficiency: op.deficiency,
                limit: INTERIOR_TAIL_TOL,
            });
        }
        Ok(op)
    }

    fn column_deficiency_max(&self, interior_only: bool) -> f64 {
        let (sb, bb) = (self.params.system_basis(), self.params.bath_basis());
        let w = self.band as i64;
        let (ms, mb) = (self.params.cutoff_s as i64, self.params.cutoff_b as i64);
        let mut worst = 0.0f64;
        for a in sb.momenta() {
            for b in bb.momenta() {
                if interior_only && (a.abs() > ms - w || b.abs() > mb - w) {
                    continue;
                }
                let kept: f64 = self
                    .shifts()
                    .filter(|&(d, _)| sb.index(a + d).is_some() && bb.index(b - d).is_some())
                    .map(|(_, amp)| amp.norm_sqr())
                    .sum();
                worst = worst.max(1.0 - kept);
            }
        }
        worst
    }

    fn shifts(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let n = self.n_cut as i64;
        (-n..=n).zip(self.kick.iter().copied())
    }

    pub fn params(&self) -> &KickedSystemParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    /// Momenta farther than this from either cutoff see a unitary kick
    /// up to [`INTERIOR_TAIL_TOL`].
    pub fn boundary_band(&self) -> usize {
        self.band
    }

    /// Largest `1 - ‖U|m_S, m_B⟩‖²` over interior basis states.
    pub fn interior_deficiency(&self) -> f64 {
        self.deficiency
    }

    pub fn index(&self, m_s: i64, m_b: i64) -> Option<usize> {
        let (sb, bb) = (self.params.system_basis(), self.params.bath_basis());
        Some(sb.index(m_s)? * bb.dim() + bb.index(m_b)?)
    }

    pub fn apply(&self, psi: &DVector<C64>) -> Result<DVector<C64>> {
        if psi.len() != self.dim() {
            return Err(Error::shape(MODULE, self.dim(), psi.len()));
        }
        let (sb, bb) = (self.params.system_basis(), self.params.bath_basis());
        let db = bb.dim();
        let mut out = DVector::<C64>::zeros(self.dim());
        for (ia, a) in sb.momenta().enumerate() {
            for (ib, b) in bb.momenta().enumerate() {
                let amp = psi[ia * db + ib] * self.phase_s[ia] * self.phase_b[ib];
                if amp == C64::new(0.0, 0.0) {
                    continue;
                }
                for (d, k) in self.shifts() {
                    if let (Some(ja), Some(jb)) = (sb.index(a + d), bb.index(b - d)) {
                        out[ja * db + jb] += k * amp;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Dense matrix of the operator.
    pub fn to_matrix(&self) -> CMatrix {
        let n = self.dim();
        let mut u = CMatrix::zeros(n, n);
        let mut e = DVector::<C64>::zeros(n);
        for c in 0..n {
            e[c] = C64::new(1.0, 0.0);
            u.set_column(c, &self.apply(&e).expect("dimension matches"));
            e[c] = C64::new(0.0, 0.0);
        }
        u
    }

    /// `U ρ U†` on the full product space.
    pub fn conjugate(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.nrows() != self.dim() || rho.ncols() != self.dim() {
            return Err(Error::shape(MODULE, self.dim(), rho.nrows()));
        }
        let apply_columns = |m: &CMatrix| -> Result<CMatrix> {
            let mut out = CMatrix::zeros(m.nrows(), m.ncols());
            for c in 0..m.ncols() {
                out.set_column(c, &self.apply(&m.column(c).into_owned())?);
            }
            Ok(out)
        };
        let left = apply_columns(rho)?;
        Ok(apply_columns(&left.adjoint())?.adjoint())
    }
}

/// Dense Floquet matrix `K · (F_S ⊗ F_B)`.
pub fn build_floquet(params: KickedSystemParams) -> Result<CMatrix> {
    Ok(FloquetOperator::new(params)?.to_matrix())
}

/// `ψ, Uψ, …, Uⁿψ`.
pub fn evolve_pure(op: &FloquetOperator, psi0: &DVector<C64>, n_kicks: usize) -> Result<Vec<DVector<C64>>> {
    let norm0 = psi0.norm_squared();
    let mut out = Vec::with_capacity(n_kicks + 1);
    out.push(psi0.clone());
    for _ in 0..n_kicks {
        let next = op.apply(out.last().unwrap())?;
        let loss = (norm0 - next.norm_squared()).abs();
        if loss > NORM_TOL {
            return Err(Error::Leakage {
                module: MODULE,
                deficiency: loss,
                limit: NORM_TOL,
            });
        }
        out.push(next);
    }
    Ok(out)
}

/// `ρ, UρU†, …` on the full product space.
pub fn evolve_density(op: &FloquetOperator, rho0: &DensityMatrix, n_kicks: usize) -> Result<Vec<DensityMatrix>> {
    let tr0 = rho0.trace().re;
    let mut out = Vec::with_capacity(n_kicks + 1);
    out.push(rho0.clone());
    for _ in 0..n_kicks {
        let next = op.conjugate(out.last().unwrap().entries())?;
        let loss = (tr0 - next.trace().re).abs();
        if loss > NORM_TOL {
            return Err(Error::Leakage {
                module: MODULE,
                deficiency: loss,
                limit: NORM_TOL,
            });
        }
        out.push(DensityMatrix::from_entries_unchecked(next)?);
    }
    Ok(out)
}

/// Reduced system and bath states after each kick.
#[derive(Clone, Debug)]
pub struct ReducedStates {
    pub system: DensityMatrix,
    pub bath: DensityMatrix,
}

/// Evolves `ρ_S(0) ⊗ ρ_B(0)` exactly and returns both marginals at kicks
/// `0..=n_kicks`.
///
/// The initial state is decomposed into product pure states, which are
/// propagated individually so the full product density matrix is never
/// formed.
pub fn reduced_trajectory(
    op: &FloquetOperator,
    system0: &DensityMatrix,
    bath: &BathSpec,
    n_kicks: usize,
) -> Result<Vec<ReducedStates>> {
    let (sb, bb) = (op.params.system_basis(), op.params.bath_basis());
    let (ds, db) = (sb.dim(), bb.dim());
    if system0.dim() != ds {
        return Err(Error::shape(MODULE, ds, system0.dim()));
    }
    if bath.cutoff() > bb.cutoff() {
        return Err(Error::shape(
            MODULE,
            format!("bath cutoff M_B >= N0 = {}", bath.cutoff()),
            bb.cutoff(),
        ));
    }

    let eig = SymmetricEigen::new(system0.entries().clone());
    let mut sys = vec![CMatrix::zeros(ds, ds); n_kicks + 1];
    let mut bth = vec![CMatrix::zeros(db, db); n_kicks + 1];
    for (col, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= 1e-15 {
            continue;
        }
        let phi = eig.eigenvectors.column(col);
        for (nu, c) in bath.occupied() {
            let ib = bb.index(nu).unwrap();
            let mut psi = DVector::<C64>::zeros(ds * db);
            for ia in 0..ds {
                psi[ia * db + ib] = phi[ia];
            }
            let w = C64::from(lambda * c);
            for (k, state) in evolve_pure(op, &psi, n_kicks)?.iter().enumerate() {
                let amp = CMatrix::from_fn(ds, db, |a, b| state[a * db + b]);
                sys[k] += &amp * amp.adjoint() * w;
                bth[k] += (amp.adjoint() * &amp).transpose() * w;
            }
        }
    }
    sys.into_iter()
        .zip(bth)
        .map(|(s, b)| {
            Ok(ReducedStates {
                system: DensityMatrix::from_entries_unchecked(s)?,
                bath: DensityMatrix::from_entries_unchecked(b)?,
            })
        })
        .collect()
}

/// `½‖tr_S ρ(nτ) - ρ_B(0)‖₁` with the system starting in `|m = 0⟩`.
pub fn bath_perturbation(params: KickedSystemParams, bath: &BathSpec, n_kicks: usize) -> Result<f64> {
    let op = FloquetOperator::new(params)?;
    let system0 = DensityMatrix::momentum_eigenstate(params.system_basis(), 0)?;
    let traj = reduced_trajectory(&op, &system0, bath, n_kicks)?;
    let rho_b0 = bath.density_matrix(params.bath_basis())?;
    Ok(trace_distance_matrix(
        traj[n_kicks].bath.entries(),
        rho_b0.entries(),
    ))
}

/// One CSV row of an exact two-rotor run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactRecord {
    pub kick: usize,
    pub system_entropy: f64,
    pub bath_distance: f64,
}

pub fn exact_two_rotor_run(
    params: KickedSystemParams,
    system0: &DensityMatrix,
    bath: &BathSpec,
    n_kicks: usize,
) -> Result<Vec<ExactRecord>> {
    let op = FloquetOperator::new(params)?;
    let rho_b0 = bath.density_matrix(params.bath_basis())?;
    reduced_trajectory(&op, system0, bath, n_kicks)?
        .iter()
        .enumerate()
        .map(|(kick, st)| {
            Ok(ExactRecord {
                kick,
                system_entropy: von_neumann_entropy(&st.system)?,
                bath_distance: trace_distance_matrix(st.bath.entries(), rho_b0.entries()),
            })
        })
        .collect()
}
