//! Seeded random operators and states for property suites.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::operator::{c, HermitianOperator, Matrix, C64};
use crate::spectrum::reconstruct;
use crate::state::DensityMatrix;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

pub fn complex_gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    Matrix::from_fn(n, n, |_, _| c(gaussian(rng), gaussian(rng)))
}

/// GUE-like Hermitian operator with entries of order `scale`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> HermitianOperator {
    let g = complex_gaussian_matrix(rng, n);
    HermitianOperator::new((&g + g.adjoint()) * c(0.5 * scale, 0.0)).expect("Hermitian by construction")
}

/// Haar-distributed unitary via QR with the phase of `R`'s diagonal removed.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let qr = complex_gaussian_matrix(rng, n).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random point on the probability simplex, each weight at least `floor`.
pub fn simplex<R: Rng + ?Sized>(rng: &mut R, n: usize, floor: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let free = 1.0 - floor * n as f64;
    raw.iter().map(|w| floor + free * w / total).collect()
}

/// `U diag(weights) U†`.
pub fn density_with_spectrum(weights: &[f64], basis: &Matrix) -> DensityMatrix {
    DensityMatrix::new(reconstruct(weights, basis)).expect("valid spectrum")
}

/// Full-rank random density matrix with a Haar-random eigenbasis.
pub fn density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityMatrix {
    let w = simplex(rng, n, 0.01);
    let u = unitary(rng, n);
    density_with_spectrum(&w, &u)
}

/// Random phase `e^{i phi}`.
pub fn phase<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let phi = rng.random::<f64>() * std::f64::consts::TAU;
    c(phi.cos(), phi.sin())
}

/// Uniformly random unit 3-vector scaled by `norm`.
pub fn vector3<R: Rng + ?Sized>(rng: &mut R, norm: f64) -> [f64; 3] {
    loop {
        let v = [gaussian(rng), gaussian(rng), gaussian(rng)];
        let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if len > 1e-6 {
            return [v[0] / len * norm, v[1] / len * norm, v[2] / len * norm];
        }
    }
}
