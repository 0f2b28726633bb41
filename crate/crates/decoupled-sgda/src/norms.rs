//! Weighted block norms and their duals.
//!
//! Each player block `i` carries a weight `alpha_i > 0` and an SPD matrix
//! `P_i`. The primal norm is `||x||^2 = sum_i alpha_i <P_i x_i, x_i>`; the
//! dual norm is `||g||_*^2 = sum_i (1/alpha_i) <g_i, P_i^{-1} g_i>`. With
//! `alpha_i = 1`, `P_i = I` both collapse to the Euclidean norm.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::point::{block_name, JointPoint};

/// Symmetry tolerance used when validating SPD inputs.
const SYMMETRY_TOL: f64 = 1e-10;

/// One block of a [`NormSpec`]: weight, SPD matrix and derived factors.
#[derive(Debug, Clone)]
pub struct NormBlock {
    pub alpha: f64,
    pub p: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    /// trace(P^{-1}); sets the per-coordinate noise scale.
    tr_p_inv: f64,
    p_sqrt: DMatrix<f64>,
    p_inv_sqrt: DMatrix<f64>,
}

/// Norm weights for a joint space; immutable after construction.
#[derive(Debug, Clone)]
pub struct NormSpec {
    blocks: Vec<NormBlock>,
}

/// Validate symmetry and positive-definiteness of `m`, returning its
/// symmetric eigendecomposition `(eigenvalues, eigenvectors)`.
pub fn check_spd(m: &DMatrix<f64>, name: &str) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let asymmetry = (m - m.transpose()).amax();
    if asymmetry > SYMMETRY_TOL * (1.0 + m.amax()) {
        return Err(Error::NotSymmetric {
            name: name.to_string(),
            asymmetry,
        });
    }
    let eig = m.clone().symmetric_eigen();
    let min = eig.eigenvalues.min();
    if min <= 0.0 || min.is_nan() {
        return Err(Error::NotPositiveDefinite {
            name: name.to_string(),
            eigenvalue: min,
        });
    }
    Ok((eig.eigenvalues, eig.eigenvectors))
}

impl NormBlock {
    fn new(alpha: f64, p: DMatrix<f64>, name: &str) -> Result<Self> {
        if alpha <= 0.0 || !alpha.is_finite() {
            return Err(Error::InvalidParameter {
                name: format!("alpha_{name}"),
                message: format!("must be a positive real, got {alpha}"),
            });
        }
        let (eigenvalues, eigenvectors) = check_spd(&p, &format!("P_{name}"))?;
        let chol = Cholesky::new(p.clone()).expect("SPD check passed");
        let tr_p_inv = eigenvalues.iter().map(|l| 1.0 / l).sum();
        let sqrt_l = DMatrix::from_diagonal(&eigenvalues.map(f64::sqrt));
        let inv_sqrt_l = DMatrix::from_diagonal(&eigenvalues.map(|l| 1.0 / l.sqrt()));
        let p_sqrt = &eigenvectors * sqrt_l * eigenvectors.transpose();
        let p_inv_sqrt = &eigenvectors * inv_sqrt_l * eigenvectors.transpose();
        Ok(Self {
            alpha,
            p,
            chol,
            tr_p_inv,
            p_sqrt,
            p_inv_sqrt,
        })
    }

    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    /// `P^{-1} g`, via the cached Cholesky factorization.
    pub fn apply_p_inv(&self, g: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(g)
    }

    /// `(alpha P)^{-1} g`; the preconditioner applied by every solver step.
    pub fn precondition(&self, g: &DVector<f64>) -> DVector<f64> {
        self.apply_p_inv(g) / self.alpha
    }

    /// Squared block primal norm `<P x, x>` (without the alpha weight).
    pub fn block_primal_sq(&self, x: &DVector<f64>) -> f64 {
        (&self.p * x).dot(x)
    }

    /// Squared block dual norm `<g, P^{-1} g>` (without the 1/alpha weight).
    pub fn block_dual_sq(&self, g: &DVector<f64>) -> f64 {
        self.apply_p_inv(g).dot(g)
    }

    pub fn tr_p_inv(&self) -> f64 {
        self.tr_p_inv
    }

    /// Lower Cholesky factor of `alpha P`.
    pub fn scaled_chol_l(&self) -> DMatrix<f64> {
        self.chol.l() * self.alpha.sqrt()
    }

    pub fn p_sqrt(&self) -> &DMatrix<f64> {
        &self.p_sqrt
    }

    pub fn p_inv_sqrt(&self) -> &DMatrix<f64> {
        &self.p_inv_sqrt
    }
}

impl NormSpec {
    /// Build from per-block weights and SPD matrices.
    pub fn new(alphas: Vec<f64>, ps: Vec<DMatrix<f64>>) -> Result<Self> {
        if alphas.len() != ps.len() || alphas.is_empty() {
            return Err(Error::InvalidParameter {
                name: "alphas".into(),
                message: "need one alpha per block matrix".into(),
            });
        }
        let n = alphas.len();
        let blocks = alphas
            .into_iter()
            .zip(ps)
            .enumerate()
            .map(|(i, (alpha, p))| NormBlock::new(alpha, p, &block_name(i, n)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { blocks })
    }

    /// Euclidean geometry: `alpha = 1`, `P = I` for every block.
    pub fn euclidean(dims: &[usize]) -> Self {
        Self::new(
            vec![1.0; dims.len()],
            dims.iter().map(|&d| DMatrix::identity(d, d)).collect(),
        )
        .expect("identity blocks are SPD")
    }

    /// Euclidean geometry with custom per-block weights.
    pub fn weighted_euclidean(alphas: Vec<f64>, dims: &[usize]) -> Result<Self> {
        Self::new(
            alphas,
            dims.iter().map(|&d| DMatrix::identity(d, d)).collect(),
        )
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, i: usize) -> &NormBlock {
        &self.blocks[i]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(NormBlock::dim).collect()
    }

    fn check(&self, x: &JointPoint) -> Result<()> {
        x.check_dims(&self.dims())
    }

    /// Primal norm `(sum_i alpha_i <P_i x_i, x_i>)^{1/2}`.
    pub fn primal_norm(&self, x: &JointPoint) -> Result<f64> {
        Ok(self.primal_norm_sq(x)?.sqrt())
    }

    pub fn primal_norm_sq(&self, x: &JointPoint) -> Result<f64> {
        self.check(x)?;
        Ok(self
            .blocks
            .iter()
            .zip(x.blocks())
            .map(|(b, xi)| b.alpha * b.block_primal_sq(xi))
            .sum())
    }

    /// Dual norm `(sum_i (1/alpha_i) <g_i, P_i^{-1} g_i>)^{1/2}`.
    pub fn dual_norm(&self, g: &JointPoint) -> Result<f64> {
        Ok(self.dual_norm_sq(g)?.sqrt())
    }

    pub fn dual_norm_sq(&self, g: &JointPoint) -> Result<f64> {
        self.check(g)?;
        Ok(self
            .blocks
            .iter()
            .zip(g.blocks())
            .map(|(b, gi)| b.block_dual_sq(gi) / b.alpha)
            .sum())
    }

    /// `P^{-1} g` with `P = diag(alpha_i P_i)`: the solver preconditioner.
    pub fn precondition(&self, g: &JointPoint) -> Result<JointPoint> {
        self.check(g)?;
        Ok(JointPoint::new(
            self.blocks
                .iter()
                .zip(g.blocks())
                .map(|(b, gi)| b.precondition(gi))
                .collect(),
        ))
    }

    /// True when every block is `alpha = 1`, `P = I`.
    pub fn is_euclidean(&self) -> bool {
        self.blocks
            .iter()
            .all(|b| b.alpha == 1.0 && b.p == DMatrix::identity(b.dim(), b.dim()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    fn pt(u: f64, v: f64) -> JointPoint {
        JointPoint::scalar(u, v)
    }

    #[test]
    fn euclidean_identity_case() {
        // ||(3, 4)|| = 5 with alpha = 1, P = I.
        let ns = NormSpec::euclidean(&[1, 1]);
        assert_eq!(ns.primal_norm(&pt(3.0, 4.0)).unwrap(), 5.0);
        assert_eq!(ns.dual_norm(&pt(3.0, 4.0)).unwrap(), 5.0);
        assert_eq!(ns.primal_norm(&pt(0.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn weighted_norms() {
        // alpha_u = 4: ||(3,4)||^2 = 4*9 + 16 = 52.
        let ns = NormSpec::weighted_euclidean(vec![4.0, 1.0], &[1, 1]).unwrap();
        let n = ns.primal_norm(&pt(3.0, 4.0)).unwrap();
        assert!((n - 52f64.sqrt()).abs() < 1e-12, "got {n}");
        // dual of (2, 0): (1/4)*4 = 1.
        assert!((ns.dual_norm(&pt(2.0, 0.0)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn self_duality_under_identity() {
        let ns = NormSpec::euclidean(&[3, 2]);
        let mut rng = stream_rng(7, 0, 0);
        for _ in 0..50 {
            let x = JointPoint::new(vec![
                nalgebra::DVector::from_fn(3, |_, _| rng.random::<f64>() - 0.5),
                nalgebra::DVector::from_fn(2, |_, _| rng.random::<f64>() - 0.5),
            ]);
            let p = ns.primal_norm(&x).unwrap();
            let d = ns.dual_norm(&x).unwrap();
            assert!((p - d).abs() <= 1e-14 * (1.0 + p));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let not_spd = DMatrix::from_row_slice(1, 1, &[-1.0]);
        let err = NormSpec::new(vec![1.0], vec![not_spd]).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));

        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        let err = NormSpec::new(vec![1.0], vec![asym]).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric { .. }));

        let err = NormSpec::weighted_euclidean(vec![0.0, 1.0], &[1, 1]).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { .. }));
    }

    #[test]
    fn dimension_mismatch_names_block() {
        let ns = NormSpec::euclidean(&[2, 1]);
        let err = ns.primal_norm(&pt(1.0, 1.0)).unwrap_err();
        assert!(err.to_string().contains('u'), "{err}");
    }

    /// Cauchy-Schwarz in the weighted geometry: <g, x> <= ||g||_* ||x||.
    #[test]
    fn norm_duality_property() {
        let mut rng = stream_rng(11, 0, 0);
        for trial in 0..200 {
            let dims = [1 + trial % 3, 1 + (trial / 3) % 3];
            let ns = random_norm_spec(&dims, &mut rng);
            let x = random_point(&dims, &mut rng);
            let g = random_point(&dims, &mut rng);
            let lhs = g.dot(&x);
            let rhs = ns.dual_norm(&g).unwrap() * ns.primal_norm(&x).unwrap();
            assert!(lhs <= rhs + 1e-10 * (1.0 + rhs), "lhs {lhs} rhs {rhs}");
        }
    }

    fn random_point(dims: &[usize], rng: &mut impl Rng) -> JointPoint {
        JointPoint::new(
            dims.iter()
                .map(|&d| nalgebra::DVector::from_fn(d, |_, _| 2.0 * rng.random::<f64>() - 1.0))
                .collect(),
        )
    }

    fn random_norm_spec(dims: &[usize], rng: &mut impl Rng) -> NormSpec {
        let alphas = dims
            .iter()
            .map(|_| 0.25 + 4.0 * rng.random::<f64>())
            .collect();
        let ps = dims
            .iter()
            .map(|&d| {
                let m = DMatrix::from_fn(d, d, |_, _| rng.random::<f64>() - 0.5);
                &m * m.transpose() + DMatrix::identity(d, d) * 0.3
            })
            .collect();
        NormSpec::new(alphas, ps).unwrap()
    }
}
