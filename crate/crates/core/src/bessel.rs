//! Integer-order Bessel functions of the first kind.
//!
//! The kick `exp(-i g cos φ)` expands as `Σ_n (-i)^n J_n(g) e^{inφ}`
//! (Jacobi–Anger), so every kicked operator in the crate is weighted by a
//! table of `J_n(g)` for `|n| ≤ n_cut`.

/// `J_0(x), …, J_{n_max}(x)` by Miller's downward recurrence, normalised
/// with `J_0 + 2 Σ_k J_{2k} = 1`.
pub fn bessel_j_table(x: f64, n_max: usize) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let top = n_max.max(ax.ceil() as usize);
    let start = top + 30 + (40.0 * top as f64).sqrt() as usize;
    let start = start + start % 2;

    let mut values = vec![0.0; start + 2];
    values[start] = 1e-300;
    for k in (1..=start).rev() {
        values[k - 1] = 2.0 * k as f64 / ax * values[k] - values[k + 1];
        if values[k - 1].abs() > 1e250 {
            for v in values[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let norm = values[0] + 2.0 * values.iter().step_by(2).skip(1).sum::<f64>();
    for (n, slot) in out.iter_mut().enumerate() {
        let v = values[n] / norm;
        *slot = if x < 0.0 && n % 2 == 1 { -v } else { v };
    }
    out
}

/// `J_n(x)` for any integer `n`, using `J_{-n} = (-1)^n J_n`.
pub fn bessel_j(n: i64, x: f64) -> f64 {
    let table = bessel_j_table(x, n.unsigned_abs() as usize);
    signed_order(&table, n)
}

fn signed_order(table: &[f64], n: i64) -> f64 {
    let v = table[n.unsigned_abs() as usize];
    if n < 0 && n % 2 != 0 {
        -v
    } else {
        v
    }
}

/// `J_n(g)` for `n = -n_cut, …, n_cut`.
#[derive(Clone, Debug, PartialEq)]
pub struct BesselTable {
    g: f64,
    n_cut: usize,
    positive: Vec<f64>,
}

impl BesselTable {
    pub fn new(g: f64, n_cut: usize) -> Self {
        Self {
            g,
            n_cut,
            positive: bessel_j_table(g, n_cut),
        }
    }

    pub fn argument(&self) -> f64 {
        self.g
    }

    pub fn n_cut(&self) -> usize {
        self.n_cut
    }

    /// `J_n(g)`, zero beyond the cutoff.
    pub fn get(&self, n: i64) -> f64 {
        if n.unsigned_abs() as usize > self.n_cut {
            0.0
        } else {
            signed_order(&self.positive, n)
        }
    }

    /// `Σ_{|n| ≤ n_cut} J_n(g)²`.
    pub fn square_sum(&self) -> f64 {
        self.positive[0].powi(2) + 2.0 * self.positive[1..].iter().map(|v| v * v).sum::<f64>()
    }

    /// Smallest `w` with `Σ_{|n| > w} J_n² ≤ tol`.
    pub fn band_width(&self, tol: f64) -> usize {
        let mut tail = 0.0;
        for n in (1..=self.n_cut).rev() {
            tail += 2.0 * self.positive[n].powi(2);
            if tail > tol {
                return n;
            }
        }
        0
    }
}

/// Shift cutoff large enough that the Bessel tail is below double precision
/// for arguments of order `g`.
pub fn tail_rule_n_cut(g: f64) -> usize {
    g.abs().ceil() as usize + 30
}
