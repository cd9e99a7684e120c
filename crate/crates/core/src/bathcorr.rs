//! Two-time correlation of the bath coupling operators in the flat-cutoff
//! bath state `ρ_B = (1/2N₀) Σ_{|μ| ≤ N₀} |μ⟩⟨μ|`.
//!
//! Averaging `cos θ_B(t′) cos θ_B(t)` (Heisenberg picture, free bath
//! rotor) over that state gives a Dirichlet kernel in `x = Δ/(2 m_B)`,
//! `Δ = t - t′`:
//!
//! ```text
//! C(Δ) = (1/4N₀) Σ_{μ=-N₀}^{N₀} e^{i(2μ+1)x}
//!      = (1/4N₀) e^{ix} sin((2N₀+1)x) / sin x.
//! ```
//!
//! The `sin θ_B` channel produces the same sum, so one function serves both.
//! As `N₀ → ∞` the kernel tends to `½` at `Δ = 0` and to zero elsewhere,
//! except at the revivals `x ∈ πℤ` where `sin x` vanishes.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::C64;

const MODULE: &str = "bathcorr";

/// `|sin x|` below this marks a revival row in [`delta_limit_report`].
pub const REVIVAL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationParams {
    pub n0: u64,
    pub m_b: f64,
    pub t: f64,
    pub t_prime: f64,
}

impl CorrelationParams {
    pub fn new(n0: u64, m_b: f64, t: f64, t_prime: f64) -> Result<Self> {
        let p = Self { n0, m_b, t, t_prime };
        p.validate()?;
        Ok(p)
    }

    pub fn from_delta(n0: u64, m_b: f64, delta: f64) -> Result<Self> {
        Self::new(n0, m_b, delta, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n0 == 0 {
            return Err(Error::domain(MODULE, "N0 must be >= 1"));
        }
        if !(self.m_b > 0.0 && self.m_b.is_finite()) {
            return Err(Error::domain(MODULE, format!("m_B = {} must be > 0", self.m_b)));
        }
        if !(self.t.is_finite() && self.t_prime.is_finite()) {
            return Err(Error::domain(MODULE, "times must be finite"));
        }
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        self.t - self.t_prime
    }

    /// `x = Δ / (2 m_B)`.
    pub fn phase(&self) -> f64 {
        self.delta() / (2.0 * self.m_b)
    }

    pub fn swapped(&self) -> Self {
        Self {
            t: self.t_prime,
            t_prime: self.t,
            ..*self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    Cos,
    Sin,
}

/// `sin(n y) / sin y`, continuous through `y ∈ πℤ`.
fn dirichlet_ratio(n: f64, x: f64) -> f64 {
    // The ratio has period π for odd n.
    let y = x - (x / PI).round() * PI;
    if (n * y).abs() < 1e-5 {
        let y2 = y * y;
        n * (1.0 - (n * n - 1.0) * y2 / 6.0 + (n * n - 1.0) * (3.0 * n * n - 7.0) * y2 * y2 / 360.0)
    } else {
        (n * y).sin() / y.sin()
    }
}

/// Closed-form kernel; exact at `Δ = 0` where it equals `(2N₀+1)/(4N₀)`.
pub fn correlation_kernel(params: &CorrelationParams) -> C64 {
    let n0 = params.n0 as f64;
    let x = params.phase();
    C64::from_polar(1.0, x) * (dirichlet_ratio(2.0 * n0 + 1.0, x) / (4.0 * n0))
}

/// Kernel for either coupling channel; both reduce to the same sum.
pub fn channel_kernel(_channel: Channel, params: &CorrelationParams) -> C64 {
    correlation_kernel(params)
}

/// `1 / (4 N₀ |sin x|)`, infinite at revivals.
pub fn dirichlet_bound(n0: u64, m_b: f64, delta: f64) -> f64 {
    let s = (delta / (2.0 * m_b)).sin().abs();
    if s < REVIVAL_TOL {
        f64::INFINITY
    } else {
        1.0 / (4.0 * n0 as f64 * s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelRow {
    pub n0: u64,
    pub delta: f64,
    pub value: C64,
    pub bound: f64,
    /// `Δ` sits on a revival (`sin x ≈ 0`, `Δ ≠ 0`).
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaLimitReport {
    pub rows: Vec<KernelRow>,
    /// `(N₀, max |C(Δ)|)` over unflagged `Δ ≠ 0`; `None` if no such point.
    pub off_diagonal_max: Vec<(u64, Option<f64>)>,
}

pub fn delta_limit_report(n0_ladder: &[u64], delta_grid: &[f64], m_b: f64) -> Result<DeltaLimitReport> {
    let mut rows = Vec::with_capacity(n0_ladder.len() * delta_grid.len());
    let mut off_diagonal_max = Vec::with_capacity(n0_ladder.len());
    for &n0 in n0_ladder {
        let mut best: Option<f64> = None;
        for &delta in delta_grid {
            let p = CorrelationParams::from_delta(n0, m_b, delta)?;
            let value = correlation_kernel(&p);
            let bound = dirichlet_bound(n0, m_b, delta);
            let flagged = delta != 0.0 && bound.is_infinite();
            if delta != 0.0 && !flagged {
                let a = value.norm();
                best = Some(best.map_or(a, |b| b.max(a)));
            }
            rows.push(KernelRow {
                n0,
                delta,
                value,
                bound,
                flagged,
            });
        }
        off_diagonal_max.push((n0, best));
    }
    Ok(DeltaLimitReport {
        rows,
        off_diagonal_max,
    })
}
