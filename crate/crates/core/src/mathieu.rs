//! Even π-periodic Mathieu cosine functions `ce_{2n}(x, q)`.
//!
//! Convention: `y'' + (a - 2q cos 2x) y = 0` with
//! `ce_{2n}(x, q) = Σ_k A_{2k} cos 2kx` normalised so that
//! `2 A_0² + Σ_{k≥1} A_{2k}² = 1`. The coefficients obey
//!
//! ```text
//! a A_0          = q A_2
//! (a - 4) A_2    = q (2 A_0 + A_4)
//! (a - 4k²) A_2k = q (A_{2k-2} + A_{2k+2}),   k ≥ 2
//! ```
//!
//! Scaling `A_0` by `√2` makes this a symmetric tridiagonal eigenproblem
//! whose unit eigenvectors are exactly the normalised coefficient vectors.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MODULE: &str = "mathieu";

/// Largest acceptable `|A_{2(K-1)}|`.
pub const TAIL_TOL: f64 = 1e-12;
/// Truncation must exceed the highest requested index `n` by this much.
pub const ORDER_BUFFER: usize = 10;

/// How the rotor coupling `g` maps onto the Mathieu parameter `q`.
///
/// Separating the two-rotor Schrödinger equation gives
/// `φ'' + (E - g + g cos 2θ) φ = 0`, i.e. `q = -g/2` in the convention of
/// this module ([`QConvention::Textbook`]). The published anchors
/// (`E₂ = 0.545`, `S = 0.38` at unit coupling) instead correspond to
/// `q = g` ([`QConvention::PaperNumbers`], the default). Both are exposed;
/// the characteristic values only depend on `|q|`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QConvention {
    #[default]
    PaperNumbers,
    Textbook,
}

impl QConvention {
    pub fn mathieu_q(self, g: f64) -> f64 {
        match self {
            QConvention::PaperNumbers => g,
            QConvention::Textbook => -g / 2.0,
        }
    }
}

/// `max(25, ⌈|q|⌉ + 25)`.
pub fn default_truncation(q: f64) -> usize {
    25usize.max(q.abs().ceil() as usize + 25)
}

/// One even Mathieu cosine function of order `2n`.
#[derive(Clone, Debug, PartialEq)]
pub struct MathieuMode {
    order: u32,
    q: f64,
    a: f64,
    coeffs: Vec<f64>,
}

impl MathieuMode {
    /// The order `2n`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Characteristic value `a_{2n}(q)`.
    pub fn characteristic_value(&self) -> f64 {
        self.a
    }

    /// `A_0, A_2, …, A_{2(K-1)}`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    /// `2 A_0² + Σ A_{2k}²`.
    pub fn normalization(&self) -> f64 {
        self.coeffs[0].powi(2) + self.coeffs.iter().map(|c| c * c).sum::<f64>()
    }

    /// Largest residual of the three-term recurrence over `k ≤ K - 2`.
    pub fn recurrence_residual(&self) -> f64 {
        let (a, q, c) = (self.a, self.q, &self.coeffs);
        let k_len = c.len();
        let at = |k: usize| c.get(k).copied().unwrap_or(0.0);
        let mut worst = (a * at(0) - q * at(1)).abs();
        if k_len > 1 {
            worst = worst.max(((a - 4.0) * at(1) - q * (2.0 * at(0) + at(2))).abs());
        }
        for k in 2..k_len.saturating_sub(1) {
            let kk = (k * k) as f64;
            worst = worst.max(((a - 4.0 * kk) * at(k) - q * (at(k - 1) + at(k + 1))).abs());
        }
        worst
    }

    /// `ce_{2n}(θ) = Σ A_{2k} cos 2kθ`.
    pub fn evaluate(&self, theta: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a * (2.0 * k as f64 * theta).cos())
            .sum()
    }

    /// `ce''_{2n}(θ) = -Σ 4k² A_{2k} cos 2kθ`.
    pub fn second_derivative(&self, theta: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let w = 2.0 * k as f64;
                -w * w * a * (w * theta).cos()
            })
            .sum()
    }

    /// `y'' + (a - 2q cos 2θ) y` at `θ`.
    pub fn ode_residual(&self, theta: f64) -> f64 {
        self.second_derivative(theta)
            + (self.a - 2.0 * self.q * (2.0 * theta).cos()) * self.evaluate(theta)
    }
}

/// Free-rotor quantum number of the centre-of-mass motion, `E₁ = m²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CenterOfMassMode {
    pub m: i64,
}

impl CenterOfMassMode {
    pub fn energy(&self) -> f64 {
        (self.m * self.m) as f64
    }

    /// Even `m` pairs with the π-periodic relative-motion sector.
    pub fn pairs_with_pi_periodic(&self) -> bool {
        self.m % 2 == 0
    }
}

fn tridiagonal(q: f64, k: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(k, k);
    for i in 0..k {
        m[(i, i)] = 4.0 * (i * i) as f64;
        if i + 1 < k {
            let off = if i == 0 { std::f64::consts::SQRT_2 * q } else { q };
            m[(i, i + 1)] = off;
            m[(i + 1, i)] = off;
        }
    }
    m
}

struct Solved {
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
}

fn solve(q: f64, n_max: usize, k: usize) -> Result<Solved> {
    if !q.is_finite() {
        return Err(Error::domain(MODULE, format!("q = {q} is not finite")));
    }
    if k < n_max + ORDER_BUFFER {
        return Err(Error::Truncation {
            module: MODULE,
            detail: format!(
                "K = {k} cannot resolve order 2*{n_max}; need K >= {}",
                n_max + ORDER_BUFFER
            ),
        });
    }
    let eig = SymmetricEigen::new(tridiagonal(q, k));
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mut values = Vec::with_capacity(n_max + 1);
    let mut vectors = Vec::with_capacity(n_max + 1);
    for (n, &col) in order.iter().take(n_max + 1).enumerate() {
        let mut v: Vec<f64> = eig.eigenvectors.column(col).iter().copied().collect();
        v[0] /= std::f64::consts::SQRT_2;
        if v[n] < 0.0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }
        let tail = v[k - 1].abs();
        if tail >= TAIL_TOL {
            return Err(Error::Truncation {
                module: MODULE,
                detail: format!(
                    "|A_{}| = {tail:.3e} for order {} at q = {q}; increase K = {k}",
                    2 * (k - 1),
                    2 * n
                ),
            });
        }
        values.push(eig.eigenvalues[col]);
        vectors.push(v);
    }
    Ok(Solved { values, vectors })
}

/// `a_0(q), a_2(q), …, a_{2 n_max}(q)` in ascending order from a `K × K`
/// truncation.
pub fn characteristic_values(q: f64, n_max: usize, k: usize) -> Result<Vec<f64>> {
    solve(q, n_max, k).map(|s| s.values)
}

fn check_even(order: u32) -> Result<usize> {
    if order % 2 != 0 {
        return Err(Error::UnsupportedSector {
            module: MODULE,
            detail: format!("order {order} is odd; only even π-periodic cosine modes exist here"),
        });
    }
    Ok(order as usize / 2)
}

/// Fourier coefficients of `ce_order(x, q)`; `order` must be even.
///
/// Sign convention: `A_order > 0` (for order 0 this is `A_0 > 0`).
pub fn even_coefficients(q: f64, order: u32, k: usize) -> Result<MathieuMode> {
    let n = check_even(order)?;
    let mut solved = solve(q, n, k)?;
    Ok(MathieuMode {
        order,
        q,
        a: solved.values[n],
        coeffs: solved.vectors.swap_remove(n),
    })
}

/// [`even_coefficients`] with the default truncation.
pub fn mode(q: f64, order: u32) -> Result<MathieuMode> {
    let n = check_even(order)?;
    even_coefficients(q, order, default_truncation(q).max(n + ORDER_BUFFER))
}

pub fn evaluate_ce(mode: &MathieuMode, theta: f64) -> f64 {
    mode.evaluate(theta)
}

/// Relative-motion energy `E₂ⁿ = a_{2n}(q) + g` of the rotor pair.
pub fn pendulum_energy(g: f64, n: usize, convention: QConvention) -> Result<f64> {
    let q = convention.mathieu_q(g);
    let k = default_truncation(q).max(n + ORDER_BUFFER);
    let values = characteristic_values(q, n, k)?;
    Ok(values[n] + g)
}
