//! Reference computations written without the library's linear algebra:
//! Hermitian spectra through the real symmetric embedding, qubit entropies in
//! closed form, and discord by exhaustive Bloch-sphere search.
#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::DMatrix;
use num_complex::Complex64;
use qerase::qmath::ComplexMatrix;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// Eigenvalues of a Hermitian `H` from `[[Re H, −Im H], [Im H, Re H]]`,
/// whose spectrum is that of `H` with every value doubled.
pub fn spectrum(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.nrows();
    let real = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut ev: Vec<f64> = real.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev.iter().step_by(2).copied().collect()
}

pub fn shannon(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 1e-15).map(|&x| -x * x.log2()).sum()
}

pub fn entropy(h: &ComplexMatrix) -> f64 {
    shannon(&spectrum(h))
}

/// Unnormalized conditional state on A after projecting B (two qubits,
/// index a·2 + b) onto `u`, as `(ρ00, ρ01, ρ11)`.
fn project_b(rho: &ComplexMatrix, u: [Complex64; 2]) -> (f64, Complex64, f64) {
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (a, row) in m.iter_mut().enumerate() {
        for (ap, entry) in row.iter_mut().enumerate() {
            for b in 0..2 {
                for bp in 0..2 {
                    *entry += u[b].conj() * rho[(a * 2 + b, ap * 2 + bp)] * u[bp];
                }
            }
        }
    }
    (m[0][0].re, m[0][1], m[1][1].re)
}

/// Swaps the two qubits of a two-qubit operator.
pub fn swap_qubits(rho: &ComplexMatrix) -> ComplexMatrix {
    let s = |i: usize| (i % 2) * 2 + i / 2;
    ComplexMatrix::from_fn(4, 4, |i, j| rho[(s(i), s(j))])
}

/// Trace of the block `(ρ00, ρ01, ρ11)` times the entropy of its normalization.
fn weighted_entropy((a, b, d): (f64, Complex64, f64)) -> f64 {
    let p = a + d;
    if p <= 1e-14 {
        return 0.0;
    }
    let disc = ((a - d).powi(2) + 4.0 * b.norm_sqr()).sqrt();
    p * shannon(&[(p + disc) / (2.0 * p), (p - disc) / (2.0 * p)])
}

pub struct Correlations {
    pub mutual_information: f64,
    pub classical: f64,
    pub discord: f64,
}

/// Discord of a two-qubit state measured on B by exhaustive search over an
/// `n × n` grid of Bloch directions (θ over [0, π], φ over [0, 2π)).
pub fn two_qubit_discord_grid(rho: &ComplexMatrix, n: usize) -> Correlations {
    let rho_a = ComplexMatrix::from_fn(2, 2, |i, j| rho[(i * 2, j * 2)] + rho[(i * 2 + 1, j * 2 + 1)]);
    let rho_b = ComplexMatrix::from_fn(2, 2, |i, j| rho[(i, j)] + rho[(2 + i, 2 + j)]);
    let s_a = entropy(&rho_a);
    let mi = s_a + entropy(&rho_b) - entropy(rho);
    let mut best = f64::INFINITY;
    for it in 0..n {
        let theta = std::f64::consts::PI * it as f64 / (n - 1) as f64;
        for ip in 0..n {
            let phi = 2.0 * std::f64::consts::PI * ip as f64 / n as f64;
            let up = [Complex64::new((theta / 2.0).cos(), 0.0), Complex64::from_polar((theta / 2.0).sin(), phi)];
            let down = [-Complex64::from_polar((theta / 2.0).sin(), -phi), Complex64::new((theta / 2.0).cos(), 0.0)];
            let h = weighted_entropy(project_b(rho, up)) + weighted_entropy(project_b(rho, down));
            best = best.min(h);
        }
    }
    let classical = s_a - best;
    Correlations { mutual_information: mi, classical, discord: mi - classical }
}

/// Closed-form discord of `p|Ψ⁻⟩⟨Ψ⁻| + (1−p) I/4`.
pub fn werner_discord(p: f64) -> f64 {
    let t = |x: f64| if x > 0.0 { x * x.log2() } else { 0.0 };
    0.25 * (t(1.0 - p) - 2.0 * t(1.0 + p) + t(1.0 + 3.0 * p))
}

pub fn werner(p: f64) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [0.0, s, -s, 0.0];
    ComplexMatrix::from_fn(4, 4, |i, j| {
        let id = if i == j { 0.25 * (1.0 - p) } else { 0.0 };
        Complex64::new(p * psi[i] * psi[j] + id, 0.0)
    })
}
