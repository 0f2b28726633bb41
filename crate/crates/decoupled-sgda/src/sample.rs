//! Seeded random problem generators shared by the harness, examples and tests.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::games::QuadraticGame;
use crate::point::JointPoint;

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Random orthogonal matrix from the QR factorization of a Gaussian matrix.
pub fn random_orthogonal(dim: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    gaussian_matrix(dim, dim, rng).qr().q()
}

/// Random SPD matrix `Q diag(lambda) Q^T` with eigenvalues log-uniform in
/// `[eig_lo, eig_hi]`.
pub fn random_spd(dim: usize, eig_lo: f64, eig_hi: f64, rng: &mut impl Rng) -> DMatrix<f64> {
    assert!(eig_lo > 0.0 && eig_hi >= eig_lo);
    let q = random_orthogonal(dim, rng);
    let log_ratio = (eig_hi / eig_lo).ln();
    let lambda = DVector::from_fn(dim, |_, _| eig_lo * (rng.random::<f64>() * log_ratio).exp());
    &q * DMatrix::from_diagonal(&lambda) * q.transpose()
}

/// Random coupling matrix scaled post-hoc to the requested spectral norm.
pub fn random_cross(d_u: usize, d_v: usize, sigma_max: f64, rng: &mut impl Rng) -> DMatrix<f64> {
    let c0 = gaussian_matrix(d_u, d_v, rng);
    if sigma_max == 0.0 {
        return DMatrix::zeros(d_u, d_v);
    }
    let current = c0.clone().svd(false, false).singular_values.max();
    c0 * (sigma_max / current)
}

/// Random quadratic game with SPD blocks and a coupling of the given
/// spectral norm.
pub fn random_quadratic_game(
    d_u: usize,
    d_v: usize,
    eig_lo: f64,
    eig_hi: f64,
    c_norm: f64,
    rng: &mut impl Rng,
) -> QuadraticGame {
    let a = random_spd(d_u, eig_lo, eig_hi, rng);
    let b = random_spd(d_v, eig_lo, eig_hi, rng);
    let c = random_cross(d_u, d_v, c_norm, rng);
    QuadraticGame::new(a, b, c).expect("constructed SPD blocks")
}

/// Random quadratic game whose Euclidean coupling degree is exactly
/// `kappa_c` (the coupling is scaled to `kappa_c * min eigenvalue of A, B`).
pub fn random_game_with_kappa_c(
    d_u: usize,
    d_v: usize,
    eig_lo: f64,
    eig_hi: f64,
    kappa_c: f64,
    rng: &mut impl Rng,
) -> QuadraticGame {
    let a = random_spd(d_u, eig_lo, eig_hi, rng);
    let b = random_spd(d_v, eig_lo, eig_hi, rng);
    let mu_bar = a
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .min()
        .min(b.clone().symmetric_eigen().eigenvalues.min());
    let c = random_cross(d_u, d_v, kappa_c * mu_bar, rng);
    QuadraticGame::new(a, b, c).expect("constructed SPD blocks")
}

/// Random point with coordinates uniform in `[-radius, radius]`.
pub fn random_point(dims: &[usize], radius: f64, rng: &mut impl Rng) -> JointPoint {
    JointPoint::new(
        dims.iter()
            .map(|&d| DVector::from_fn(d, |_, _| radius * (2.0 * rng.random::<f64>() - 1.0)))
            .collect(),
    )
}

/// Random point of Euclidean norm one.
pub fn random_unit_point(dims: &[usize], rng: &mut impl Rng) -> JointPoint {
    let p = JointPoint::new(
        dims.iter()
            .map(|&d| DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal)))
            .collect(),
    );
    let n = p.stacked().norm();
    p.scale(1.0 / n)
}
