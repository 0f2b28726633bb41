//! Stochastic gradient oracles with a per-block variance model.
//!
//! Each player's oracle observes its own gradient block with low variance
//! and the opponent's block with (possibly much) higher variance:
//! `sigma_uu`/`sigma_uv` bound the u-player's own and cross blocks,
//! `sigma_vv`/`sigma_vu` the v-player's. The decoupled oracle only ever
//! evaluates own blocks of the frozen operator `F_xbar` and carries a single
//! variance `sigma_bar` for the stacked query.
//!
//! Noise is zero-mean isotropic Gaussian per block, scaled so the expected
//! squared dual norm of the noise equals the configured variance (per-block
//! dual norm for the four owner variances, joint dual norm for `sigma_bar`,
//! which is split evenly between the two own-block queries). Under the
//! Euclidean norm this means a per-coordinate std of `sigma / sqrt(dim)`.
//!
//! Draws are addressed by `(seed, stream_id, draw index)` and are bit-stable;
//! see [`crate::rng`].

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{operator_f, operator_f_bar, TwoPlayerGame};
use crate::norms::NormSpec;
use crate::point::JointPoint;
use crate::rng::stream_rng;

/// Which player's oracle (or the decoupled one) is being queried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    /// Own blocks of `F_xbar`, variance `sigma_bar` on the stacked query.
    Decoupled,
    /// The u-player's view of `F`: `sigma_uu` on the u block, `sigma_uv` on v.
    OwnerU,
    /// The v-player's view of `F`: `sigma_vv` on the v block, `sigma_vu` on u.
    OwnerV,
}

/// Standard deviations of the oracle noise plus the stream address.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma_uu: f64,
    pub sigma_uv: f64,
    pub sigma_vu: f64,
    pub sigma_vv: f64,
    /// Std of the decoupled oracle's stacked query.
    pub sigma_bar: f64,
    pub seed: u64,
    pub stream_id: u64,
}

impl NoiseModel {
    pub fn new(
        sigma_uu: f64,
        sigma_uv: f64,
        sigma_vu: f64,
        sigma_vv: f64,
        sigma_bar: f64,
        seed: u64,
        stream_id: u64,
    ) -> Result<Self> {
        for (name, s) in [
            ("sigma_uu", sigma_uu),
            ("sigma_uv", sigma_uv),
            ("sigma_vu", sigma_vu),
            ("sigma_vv", sigma_vv),
            ("sigma_bar", sigma_bar),
        ] {
            if s < 0.0 || !s.is_finite() {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    message: format!("std must be a nonnegative real, got {s}"),
                });
            }
        }
        Ok(Self {
            sigma_uu,
            sigma_uv,
            sigma_vu,
            sigma_vv,
            sigma_bar,
            seed,
            stream_id,
        })
    }

    /// Decoupled-only noise: `sigma_bar` set, owner variances zero.
    pub fn decoupled_only(sigma_bar: f64, seed: u64, stream_id: u64) -> Result<Self> {
        Self::new(0.0, 0.0, 0.0, 0.0, sigma_bar, seed, stream_id)
    }

    /// Balanced own-block noise with unbalanced cross-block noise, and
    /// `sigma_bar^2 = sigma_uu^2 + sigma_vv^2` for the decoupled oracle.
    pub fn unbalanced(diag: f64, off_diag: f64, seed: u64, stream_id: u64) -> Result<Self> {
        let bar = (2.0 * diag * diag).sqrt();
        Self::new(diag, off_diag, off_diag, diag, bar, seed, stream_id)
    }

    pub fn zero(seed: u64, stream_id: u64) -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0, 0.0, seed, stream_id).expect("zero is valid")
    }

    pub fn is_zero(&self) -> bool {
        self.sigma_uu == 0.0
            && self.sigma_uv == 0.0
            && self.sigma_vu == 0.0
            && self.sigma_vv == 0.0
            && self.sigma_bar == 0.0
    }

    /// Same variances, different stream address.
    pub fn with_address(&self, seed: u64, stream_id: u64) -> Self {
        Self {
            seed,
            stream_id,
            ..self.clone()
        }
    }

    /// Isotropic Gaussian noise for block `block` of `ns`, scaled so the
    /// expected squared *block* dual norm is `target_dual_sq`, drawn from the
    /// keystream segment `draw`.
    pub fn block_noise(
        &self,
        ns: &NormSpec,
        block: usize,
        target_dual_sq: f64,
        draw: u64,
    ) -> DVector<f64> {
        let dim = ns.block(block).dim();
        if target_dual_sq == 0.0 {
            return DVector::zeros(dim);
        }
        // E <z, P^{-1} z> = tr(P^{-1}) for isotropic unit z.
        let std = (target_dual_sq / ns.block(block).tr_p_inv()).sqrt();
        let mut rng = stream_rng(self.seed, self.stream_id, draw);
        DVector::from_fn(dim, |_, _| std * rng.sample::<f64, _>(StandardNormal))
    }

    /// Per-block target variances (in block dual norms) for an oracle kind.
    ///
    /// For the decoupled oracle `sigma_bar^2` is split evenly between the two
    /// own-block queries in the *joint* dual norm, so block `i` receives
    /// `alpha_i * sigma_bar^2 / 2` in its block dual norm.
    pub fn block_targets(&self, ns: &NormSpec, kind: OracleKind) -> [f64; 2] {
        match kind {
            OracleKind::Decoupled => [
                self.decoupled_block_target(ns, 0),
                self.decoupled_block_target(ns, 1),
            ],
            OracleKind::OwnerU => [self.sigma_uu.powi(2), self.sigma_uv.powi(2)],
            OracleKind::OwnerV => [self.sigma_vu.powi(2), self.sigma_vv.powi(2)],
        }
    }

    /// Decoupled-oracle target for one block of an N-block space:
    /// `sigma_bar^2` split evenly across blocks in the joint dual norm.
    pub fn decoupled_block_target(&self, ns: &NormSpec, block: usize) -> f64 {
        ns.block(block).alpha * self.sigma_bar * self.sigma_bar / ns.num_blocks() as f64
    }
}

/// Noisy operator query. `Decoupled` evaluates `F_xbar(x)` and perturbs both
/// own blocks; `OwnerU`/`OwnerV` evaluate `F(x)` and perturb both blocks with
/// that player's variances. The expectation over draws equals the
/// deterministic operator.
///
/// The stacked query with index `draw` consumes the keystream segments
/// `2*draw` (u block) and `2*draw + 1` (v block), so the two blocks are
/// independent and can also be generated separately via
/// [`NoiseModel::block_noise`].
pub fn stochastic_oracle<G: TwoPlayerGame + ?Sized>(
    game: &G,
    ns: &NormSpec,
    x: &JointPoint,
    x_ref: &JointPoint,
    noise: &NoiseModel,
    kind: OracleKind,
    draw: u64,
) -> Result<JointPoint> {
    let mut value = match kind {
        OracleKind::Decoupled => operator_f_bar(game, x, x_ref)?,
        OracleKind::OwnerU | OracleKind::OwnerV => operator_f(game, x)?,
    };
    let targets = noise.block_targets(ns, kind);
    for (block, &target) in targets.iter().enumerate() {
        if target > 0.0 {
            let eta = noise.block_noise(ns, block, target, 2 * draw + block as u64);
            *value.block_mut(block) += eta;
        }
    }
    Ok(value)
}
