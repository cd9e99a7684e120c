//! GKSL dynamics of the system rotor with jump operators `cos θ` and
//! `sin θ`.
//!
//! On a truncated momentum basis the generator is taken in anticommutator
//! form,
//!
//! ```text
//! D[ρ] = γ (cos ρ cos + sin ρ sin - ½{cos² + sin², ρ}),
//! ```
//!
//! which reduces to `γ (cos ρ cos + sin ρ sin - ρ)` wherever `ρ` avoids the
//! two edge momenta, and stays trace preserving and unital on the whole
//! truncated space. `cos² + sin²` is the identity except for `½` on `|±M⟩`.
//!
//! The sandwich terms are applied through the identity
//! `cos ρ cos + sin ρ sin = ½(S₊ρS₋ + S₋ρS₊)` with unit momentum shifts `S±`.

use nalgebra::DVector;

use crate::basis::MomentumBasis;
use crate::densmat::{von_neumann_entropy, CMatrix, DensityMatrix};
use crate::error::{Error, Result};
use crate::C64;

const MODULE: &str = "lindblad";

/// Stop the exponential series once a term is this small (max-norm).
pub const SERIES_TOL: f64 = 1e-14;
/// Give up on the exponential series after this many terms.
pub const SERIES_MAX_TERMS: usize = 200;
/// Largest trace drift tolerated by [`continuous_evolve`].
pub const TRACE_DRIFT_TOL: f64 = 1e-8;
/// `dt · γ` must not exceed this.
pub const MAX_STEP_RATE: f64 = 0.1;

/// Whether `gamma` is a per-kick strength or a rate per unit time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateUnit {
    PerKick,
    PerTime,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LindbladGenerator {
    basis: MomentumBasis,
    cos_op: CMatrix,
    sin_op: CMatrix,
    gamma: f64,
    unit: RateUnit,
    m_s: f64,
    energies: Vec<f64>,
}

fn shift_ops(basis: MomentumBasis) -> (CMatrix, CMatrix) {
    let d = basis.dim();
    let mut cos_op = CMatrix::zeros(d, d);
    let mut sin_op = CMatrix::zeros(d, d);
    for i in 0..d - 1 {
        // ⟨m+1| cos |m⟩ = ½, ⟨m+1| sin |m⟩ = 1/(2i)
        cos_op[(i + 1, i)] = C64::new(0.5, 0.0);
        cos_op[(i, i + 1)] = C64::new(0.5, 0.0);
        sin_op[(i + 1, i)] = C64::new(0.0, -0.5);
        sin_op[(i, i + 1)] = C64::new(0.0, 0.5);
    }
    (cos_op, sin_op)
}

impl LindbladGenerator {
    pub fn new(cutoff: usize, gamma: f64, unit: RateUnit, m_s: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::domain(MODULE, format!("gamma = {gamma} must be >= 0")));
        }
        if !(m_s > 0.0 && m_s.is_finite()) {
            return Err(Error::domain(MODULE, format!("m_S = {m_s} must be > 0")));
        }
        let basis = MomentumBasis::new(cutoff);
        let (cos_op, sin_op) = shift_ops(basis);
        let energies = basis.momenta().map(|m| (m * m) as f64 / (2.0 * m_s)).collect();
        Ok(Self {
            basis,
            cos_op,
            sin_op,
            gamma,
            unit,
            m_s,
            energies,
        })
    }

    /// Per-kick strength `γ = g²/2`.
    pub fn kicked(cutoff: usize, g: f64, m_s: f64) -> Result<Self> {
        Self::new(cutoff, g * g / 2.0, RateUnit::PerKick, m_s)
    }

    /// Continuous rate `γ′ = g′²/2`.
    pub fn continuous(cutoff: usize, g_prime: f64, m_s: f64) -> Result<Self> {
        Self::new(cutoff, g_prime * g_prime / 2.0, RateUnit::PerTime, m_s)
    }

    /// Per-kick generator whose `L = 1/τ` kicks per unit time reproduce this
    /// continuous rate: `γ_kick = γ′ τ`.
    pub fn discretize(&self, tau: f64) -> Result<Self> {
        if self.unit != RateUnit::PerTime {
            return Err(Error::domain(MODULE, "only a continuous rate can be discretized"));
        }
        if !(tau > 0.0) {
            return Err(Error::domain(MODULE, format!("tau = {tau} must be > 0")));
        }
        let mut out = self.clone();
        out.gamma = self.gamma * tau;
        out.unit = RateUnit::PerKick;
        Ok(out)
    }

    /// A chain of `n` identical bath rotors adds `n` copies of the same
    /// dissipator, so only `γ` changes.
    pub fn with_bath_rotors(mut self, n: usize) -> Self {
        self.gamma *= n as f64;
        self
    }

    pub fn basis(&self) -> MomentumBasis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn unit(&self) -> RateUnit {
        self.unit
    }

    pub fn system_mass(&self) -> f64 {
        self.m_s
    }

    pub fn cos_op(&self) -> &CMatrix {
        &self.cos_op
    }

    pub fn sin_op(&self) -> &CMatrix {
        &self.sin_op
    }

    /// Diagonal of `H_S = p²/(2 m_S)`.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn hamiltonian(&self) -> CMatrix {
        CMatrix::from_diagonal(&DVector::from_iterator(
            self.dim(),
            self.energies.iter().map(|&e| C64::from(e)),
        ))
    }

    /// `cos² + sin²`: one in the interior, `½` on the edges.
    pub fn jump_norm(&self) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|i| if i == 0 || i == d - 1 { 0.5 } else { 1.0 })
            .collect()
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::shape(MODULE, self.dim(), n));
        }
        Ok(())
    }

    /// `D[ρ]` via momentum shifts, `O(d²)`.
    pub fn dissipator(&self, rho: &CMatrix) -> Result<CMatrix> {
        self.check_dim(rho.nrows())?;
        self.check_dim(rho.ncols())?;
        Ok(self.dissipate(rho))
    }

    fn dissipate(&self, rho: &CMatrix) -> CMatrix {
        let d = self.dim();
        let n = self.jump_norm();
        let g = self.gamma;
        CMatrix::from_fn(d, d, |a, b| {
            let mut s = C64::new(0.0, 0.0);
            if a > 0 && b > 0 {
                s += rho[(a - 1, b - 1)];
            }
            if a + 1 < d && b + 1 < d {
                s += rho[(a + 1, b + 1)];
            }
            (s * 0.5 - rho[(a, b)] * (0.5 * (n[a] + n[b]))) * g
        })
    }

    /// `D[ρ]` by explicit matrix products with the jump operators.
    pub fn dissipator_dense(&self, rho: &CMatrix) -> Result<CMatrix> {
        self.check_dim(rho.nrows())?;
        let c = &self.cos_op;
        let s = &self.sin_op;
        let norm = c * c + s * s;
        let sandwich = c * rho * c + s * rho * s;
        let anti = &norm * rho + rho * &norm;
        Ok((sandwich - anti * C64::from(0.5)) * C64::from(self.gamma))
    }

    fn free_phase(&self, rho: &CMatrix, t: f64) -> CMatrix {
        let e = &self.energies;
        CMatrix::from_fn(rho.nrows(), rho.ncols(), |a, b| {
            rho[(a, b)] * C64::from_polar(1.0, -(e[a] - e[b]) * t)
        })
    }

    /// `exp(D)[ρ] = Σ_k D^k[ρ]/k!`, applied term by term.
    fn exp_dissipator(&self, rho: &CMatrix) -> Result<CMatrix> {
        let mut sum = rho.clone();
        let mut term = rho.clone();
        for k in 1..=SERIES_MAX_TERMS {
            term = self.dissipate(&term) / C64::from(k as f64);
            sum += &term;
            if term.camax() < SERIES_TOL {
                return Ok(sum);
            }
        }
        Err(Error::NonConvergence {
            module: MODULE,
            detail: format!("dissipator series above {SERIES_TOL:e} after {SERIES_MAX_TERMS} terms"),
        })
    }
}

/// One kick of the flow: free evolution for `τ`, then `exp(D)`.
pub fn kicked_flow_step(gen: &LindbladGenerator, tau: f64, rho: &DensityMatrix) -> Result<DensityMatrix> {
    gen.check_dim(rho.dim())?;
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::domain(MODULE, format!("tau = {tau} must be >= 0")));
    }
    let free = gen.free_phase(rho.entries(), tau);
    DensityMatrix::from_entries_unchecked(gen.exp_dissipator(&free)?)
}

/// One row of a GKSL trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LindbladRecord {
    /// Kick index or time.
    pub step_or_t: f64,
    pub entropy: f64,
    pub trace_dev: f64,
    /// Population on `|±M⟩`.
    pub edge_occupation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LindbladTrajectory {
    pub records: Vec<LindbladRecord>,
    pub final_state: DensityMatrix,
}

fn record(label: f64, rho: &DensityMatrix) -> Result<LindbladRecord> {
    let e = rho.entries();
    let d = rho.dim();
    Ok(LindbladRecord {
        step_or_t: label,
        entropy: von_neumann_entropy(rho)?,
        trace_dev: (rho.trace().re - 1.0).abs(),
        edge_occupation: e[(0, 0)].re + if d > 1 { e[(d - 1, d - 1)].re } else { 0.0 },
    })
}

/// Iterates [`kicked_flow_step`] `n_kicks` times, recording every kick.
pub fn kicked_trajectory(
    gen: &LindbladGenerator,
    tau: f64,
    rho0: &DensityMatrix,
    n_kicks: usize,
) -> Result<LindbladTrajectory> {
    let mut rho = rho0.clone();
    let mut records = Vec::with_capacity(n_kicks + 1);
    records.push(record(0.0, &rho)?);
    for k in 1..=n_kicks {
        rho = kicked_flow_step(gen, tau, &rho)?;
        records.push(record(k as f64, &rho)?);
    }
    Ok(LindbladTrajectory {
        records,
        final_state: rho,
    })
}

/// Integrates `ρ̇ = -i[H_S, ρ] + D[ρ]` up to `t_final` with classical RK4
/// in the interaction picture; the free phases are exact, so only `γ`
/// limits the step for diagonal states. Coherences between neighbouring
/// momenta pick up interaction-picture phases at the level-spacing
/// differences, so off-diagonal initial states also need `dt` small against
/// `m_S`. The step is shrunk so that a whole number of steps lands on
/// `t_final`.
pub fn continuous_evolve(
    gen: &LindbladGenerator,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
) -> Result<LindbladTrajectory> {
    gen.check_dim(rho0.dim())?;
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::domain(MODULE, format!("t_final = {t_final} must be >= 0")));
    }
    if !(dt > 0.0) || dt * gen.gamma > MAX_STEP_RATE {
        return Err(Error::domain(
            MODULE,
            format!("dt = {dt} must satisfy 0 < dt <= {MAX_STEP_RATE}/gamma"),
        ));
    }
    let steps = (t_final / dt).ceil() as usize;
    let h = if steps == 0 { 0.0 } else { t_final / steps as f64 };

    // d/dt ρ_I = U(t)† D[U(t) ρ_I U(t)†] U(t), U(t) = exp(-iH t).
    let rhs = |t: f64, x: &CMatrix| -> CMatrix {
        let lab = gen.free_phase(x, t);
        gen.free_phase(&gen.dissipate(&lab), -t)
    };

    let initial_trace = rho0.trace().re;
    let mut x = rho0.entries().clone();
    let mut records = Vec::with_capacity(steps + 1);
    records.push(record(0.0, rho0)?);
    for k in 0..steps {
        let t = k as f64 * h;
        let half = C64::from(h / 2.0);
        let k1 = rhs(t, &x);
        let k2 = rhs(t + h / 2.0, &(&x + &k1 * half));
        let k3 = rhs(t + h / 2.0, &(&x + &k2 * half));
        let k4 = rhs(t + h, &(&x + &k3 * C64::from(h)));
        x += (k1 + (k2 + k3) * C64::from(2.0) + k4) * C64::from(h / 6.0);

        let t_next = (k + 1) as f64 * h;
        let rho = DensityMatrix::from_entries_unchecked(gen.free_phase(&x, t_next))?;
        let drift = (rho.trace().re - initial_trace).abs();
        if drift > TRACE_DRIFT_TOL || !drift.is_finite() {
            return Err(Error::Unstable {
                module: MODULE,
                detail: format!("trace drift {drift:e} at t = {t_next} with dt = {h}"),
            });
        }
        records.push(record(t_next, &rho)?);
    }
    let final_state = DensityMatrix::from_entries_unchecked(gen.free_phase(&x, t_final))?;
    Ok(LindbladTrajectory {
        records,
        final_state,
    })
}
