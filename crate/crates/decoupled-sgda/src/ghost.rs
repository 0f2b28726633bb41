//! Decoupled rounds with a ghost sequence: instead of holding the opponent
//! frozen at the round start, each player advances a linear extrapolation of
//! the opponent by the averaged inter-round increment
//! `delta = (x_0^r - x_0^{r-1}) / K`, one increment per local step.
//!
//! The first round has no history, so `delta = 0` and the round coincides
//! with a plain decoupled round. The ghost is deterministic: it extrapolates
//! communicated points and never incorporates oracle noise.

use crate::error::Error;
use crate::games::TwoPlayerGame;
use crate::noise::{NoiseModel, OracleKind};
use crate::norms::NormSpec;
use crate::point::JointPoint;
use crate::solvers::DrawCounter;

/// Extrapolation state of one ghost round.
#[derive(Debug, Clone)]
pub struct GhostState {
    /// Per-block increments `(u_0^r - u_0^{r-1}) / K`, `(v_0^r - v_0^{r-1}) / K`.
    pub delta: JointPoint,
    /// Final ghost point `(u~_K, v~_K)` reached during the round.
    pub ghost_end: JointPoint,
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn ghost_round_counted<G: TwoPlayerGame + ?Sized>(
    game: &G,
    ns: &NormSpec,
    x0: &JointPoint,
    prev_x0: Option<&JointPoint>,
    gamma: f64,
    k: usize,
    noise: Option<&NoiseModel>,
    draws: &mut DrawCounter,
) -> std::result::Result<(JointPoint, GhostState), usize> {
    let delta = match prev_x0 {
        Some(prev) => x0.sub(prev).scale(1.0 / k as f64),
        None => JointPoint::zeros(&x0.dims()),
    };
    let mut x = x0.clone();
    // Ghost blocks start at the opponent's communicated round-start block.
    let mut ghost = x0.clone();
    for t in 0..k {
        // v~_{t+1} = v~_t + delta_v, then the u step against the ghost.
        ghost.block_mut(1).axpy(1.0, delta.block(1), 1.0);
        let mut g_u = game.grad_u(x.u(), ghost.v());
        let draw_u = draws.next();
        if let Some(n) = noise {
            let target = n.block_targets(ns, OracleKind::Decoupled)[0];
            if target > 0.0 {
                g_u += n.block_noise(ns, 0, target, draw_u);
            }
        }
        let du = ns.block(0).precondition(&g_u);
        x.block_mut(0).axpy(-gamma, &du, 1.0);

        // u~_{t+1} = u~_t + delta_u, then the v step against the ghost.
        ghost.block_mut(0).axpy(1.0, delta.block(0), 1.0);
        let mut g_v = -game.grad_v(ghost.u(), x.v());
        let draw_v = draws.next();
        if let Some(n) = noise {
            let target = n.block_targets(ns, OracleKind::Decoupled)[1];
            if target > 0.0 {
                g_v += n.block_noise(ns, 1, target, draw_v);
            }
        }
        let dv = ns.block(1).precondition(&g_v);
        x.block_mut(1).axpy(-gamma, &dv, 1.0);

        if !x.is_finite() {
            return Err(t);
        }
    }
    Ok((
        x,
        GhostState {
            delta,
            ghost_end: ghost,
        },
    ))
}

/// One ghost round from `x0`, with `prev_x0` the previous round's start
/// (`None` on the first round). Returns the communicated point and the
/// ghost state. Draw indexing matches [`crate::solvers::decoupled_round`],
/// so the first round is bit-identical to a decoupled round.
#[allow(clippy::too_many_arguments)]
pub fn ghost_round<G: TwoPlayerGame + ?Sized>(
    game: &G,
    ns: &NormSpec,
    x0: &JointPoint,
    prev_x0: Option<&JointPoint>,
    gamma: f64,
    k: usize,
    noise: Option<&NoiseModel>,
    draw_base: u64,
) -> crate::error::Result<(JointPoint, GhostState)> {
    game.check_point(x0)?;
    if let Some(p) = prev_x0 {
        game.check_point(p)?;
    }
    let mut draws = DrawCounter(draw_base);
    ghost_round_counted(game, ns, x0, prev_x0, gamma, k, noise, &mut draws)
        .map_err(|step| Error::Divergence { round: 1, step })
}
