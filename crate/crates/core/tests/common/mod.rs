//! Reference computations for the integration tests. None of these call
//! into the crate's numerical kernels; they rebuild each quantity from its
//! definition with dense linear algebra.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub type CMat = DMatrix<C64>;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Eigenvalues (ascending) of a Hermitian matrix.
pub fn eigvals(m: &CMat) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn trace_distance(a: &CMat, b: &CMat) -> f64 {
    0.5 * eigvals(&(a - b)).iter().map(|x| x.abs()).sum::<f64>()
}

pub fn entropy(m: &CMat) -> f64 {
    eigvals(m)
        .into_iter()
        .filter(|p| *p > 1e-14)
        .map(|p| -p * p.ln())
        .sum()
}

// ---------------------------------------------------------------- Mathieu

/// Ground state of `-d²/dx² + 2q cos 2x` in the full plane-wave basis
/// `e^{2imx}`, `|m| ≤ k`; returns `(a, c_m)` with `Σ|c_m|² = 1`.
pub fn relative_ground_state(q: f64, k: usize) -> (f64, Vec<f64>) {
    let d = 2 * k + 1;
    let h = DMatrix::<f64>::from_fn(d, d, |i, j| {
        let m = i as f64 - k as f64;
        if i == j {
            4.0 * m * m
        } else if i.abs_diff(j) == 1 {
            q
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(h);
    let (imin, a) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap();
    let v: Vec<f64> = eig.eigenvectors.column(imin).iter().copied().collect();
    (a, v)
}

/// Reduced spectrum of rotor 1 obtained by sampling the two-rotor
/// wavefunction `ψ(θ₁, θ₂) = Σ_m c_m e^{im(θ₁-θ₂)}` on an `n × n` grid and
/// diagonalising the discretised one-body kernel `∫ ψ(θ₁,θ₂) ψ*(θ₁',θ₂) dθ₂`.
/// Descending order.
pub fn kernel_spectrum(q: f64, k: usize, n: usize) -> Vec<f64> {
    let (_, cm) = relative_ground_state(q, k);
    let theta: Vec<f64> = (0..n).map(|i| 2.0 * std::f64::consts::PI * i as f64 / n as f64).collect();
    let psi = DMatrix::<f64>::from_fn(n, n, |i, j| {
        let u = theta[i] - theta[j];
        cm.iter()
            .enumerate()
            .map(|(idx, cv)| cv * ((idx as f64 - k as f64) * u).cos())
            .sum()
    });
    let norm = psi.norm_squared();
    let rho = &psi * psi.transpose() / norm;
    let mut ev: Vec<f64> = SymmetricEigen::new(rho).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// `a₀(q)` from the continued fraction
/// `a = 2q² / (a - 4 - q² / (a - 16 - q² / (a - 36 - …)))`,
/// located by scanning for the first sign change and bisecting.
pub fn a0_continued_fraction(q: f64) -> f64 {
    let depth = 60;
    let f = |a: f64| {
        let mut tail = 0.0;
        for k in (1..=depth).rev() {
            let kk = (2 * k) as f64;
            tail = q * q / (a - kk * kk - tail);
        }
        a - 2.0 * tail
    };
    if q == 0.0 {
        return 0.0;
    }
    let mut lo = -2.0 * q.abs() - 2.0;
    let step = 1e-3;
    let mut flo = f(lo);
    loop {
        let hi = lo + step;
        let fhi = f(hi);
        if flo.signum() != fhi.signum() && (fhi - flo).abs() < 10.0 {
            let (mut l, mut h) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (l + h);
                if f(mid).signum() == f(l).signum() {
                    l = mid;
                } else {
                    h = mid;
                }
            }
            return 0.5 * (l + h);
        }
        lo = hi;
        flo = fhi;
        assert!(lo < 4.0, "no root found for q = {q}");
    }
}

// ---------------------------------------------------------------- Bessel

/// `J_n(x)` by the power series.
pub fn bessel_series(n: i64, x: f64) -> f64 {
    let k = n.unsigned_abs() as u32;
    let half = x / 2.0;
    let mut term = half.powi(k as i32) / (1..=k).map(f64::from).product::<f64>();
    let mut sum = term;
    for j in 1..200 {
        term *= -half * half / (j as f64 * (j + k) as f64);
        sum += term;
        if term.abs() < 1e-300 {
            break;
        }
    }
    if n < 0 && k % 2 == 1 {
        -sum
    } else {
        sum
    }
}

// ---------------------------------------------------------------- rotor operators

pub fn shift_up(d: usize) -> CMat {
    // S₊|m⟩ = |m+1⟩
    CMat::from_fn(d, d, |i, j| if i == j + 1 { c(1.0) } else { c(0.0) })
}

pub fn cos_theta(d: usize) -> CMat {
    let s = shift_up(d);
    (&s + s.adjoint()) * c(0.5)
}

pub fn sin_theta(d: usize) -> CMat {
    let s = shift_up(d);
    (&s - s.adjoint()) * C64::new(0.0, -0.5)
}

pub fn kinetic(d: usize, mass: f64) -> CMat {
    let m0 = (d / 2) as f64;
    CMat::from_fn(d, d, |i, j| {
        if i == j {
            let m = i as f64 - m0;
            c(m * m / (2.0 * mass))
        } else {
            c(0.0)
        }
    })
}

/// `exp(-iHt)` for diagonal `H`.
pub fn diag_unitary(h: &CMat, t: f64) -> CMat {
    CMat::from_fn(h.nrows(), h.ncols(), |i, j| {
        if i == j {
            C64::from_polar(1.0, -h[(i, i)].re * t)
        } else {
            c(0.0)
        }
    })
}

// ---------------------------------------------------------------- superoperators

/// Column-stacking `vec`.
pub fn vec_of(m: &CMat) -> DVector<C64> {
    DVector::from_iterator(m.len(), m.iter().copied())
}

pub fn unvec(v: &DVector<C64>, d: usize) -> CMat {
    CMat::from_iterator(d, d, v.iter().copied())
}

/// `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.
pub fn sandwich(a: &CMat, b: &CMat) -> CMat {
    b.transpose().kronecker(a)
}

/// GKSL Liouvillian `-i[H,·] + γ Σ_k (L ρ L† - ½{L†L, ρ})` for Hermitian
/// jump operators, vectorised.
pub fn liouvillian(h: &CMat, jumps: &[CMat], gamma: f64) -> CMat {
    let d = h.nrows();
    let id = CMat::identity(d, d);
    let mut l = (sandwich(h, &id) - sandwich(&id, h)) * C64::new(0.0, -1.0);
    for j in jumps {
        let jd = j.adjoint();
        let n = &jd * j;
        l += (sandwich(j, &jd) - (sandwich(&n, &id) + sandwich(&id, &n)) * c(0.5)) * c(gamma);
    }
    l
}

/// Superoperator matrix of a linear map, built column by column from the
/// images of the matrix units `|i⟩⟨j|`.
pub fn superoperator(d: usize, mut map: impl FnMut(&CMat) -> CMat) -> CMat {
    let mut out = CMat::zeros(d * d, d * d);
    for j in 0..d {
        for i in 0..d {
            let mut e = CMat::zeros(d, d);
            e[(i, j)] = c(1.0);
            let img = vec_of(&map(&e));
            out.set_column(j * d + i, &img);
        }
    }
    out
}

/// Choi matrix `Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`.
pub fn choi(d: usize, mut map: impl FnMut(&CMat) -> CMat) -> CMat {
    let mut out = CMat::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let mut e = CMat::zeros(d, d);
            e[(i, j)] = c(1.0);
            let img = map(&e);
            for a in 0..d {
                for b in 0..d {
                    out[(i * d + a, j * d + b)] = img[(a, b)];
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------- bath correlations

/// `(1/4N₀) Σ_μ e^{i(2μ+1)x}` term by term.
pub fn kernel_direct_sum(n0: u64, m_b: f64, delta: f64) -> C64 {
    let x = delta / (2.0 * m_b);
    let n = n0 as i64;
    (-n..=n)
        .map(|mu| C64::from_polar(1.0, (2 * mu + 1) as f64 * x))
        .sum::<C64>()
        / (4.0 * n0 as f64)
}

/// `Σ_{|μ| ≤ N₀} (1/2N₀) ⟨μ| O(t′) O(t) |μ⟩` with `O(t) = e^{iHt} O e^{-iHt}`
/// and `H = p²/(2m_B)`, on a basis large enough to hold `μ ± 1`.
pub fn bath_operator_correlation(op: &CMat, n0: u64, m_b: f64, t: f64, t_prime: f64) -> C64 {
    let d = op.nrows();
    let h = kinetic(d, m_b);
    let heis = |time: f64| diag_unitary(&h, -time) * op * diag_unitary(&h, time);
    let prod = heis(t_prime) * heis(t);
    let centre = (d / 2) as i64;
    let n = n0 as i64;
    (-n..=n)
        .map(|mu| prod[((mu + centre) as usize, (mu + centre) as usize)])
        .sum::<C64>()
        / (2.0 * n0 as f64)
}

// ---------------------------------------------------------------- random states

/// `G G† / tr(G G†)` with uniform complex entries, embedded on the indices
/// `offset..offset+support` of a `d`-dimensional space.
pub fn random_density(rng: &mut StdRng, d: usize, offset: usize, support: usize) -> CMat {
    let g = CMat::from_fn(support, support, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let small = &g * g.adjoint();
    let tr = small.trace().re;
    let mut out = CMat::zeros(d, d);
    out.view_mut((offset, offset), (support, support))
        .copy_from(&(small / c(tr)));
    out
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
