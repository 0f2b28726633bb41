//! N-player games: each player owns one block and minimizes its own payoff
//! against the others' frozen strategies, communicating once per round.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::games::TwoPlayerGame;
use crate::norms::NormSpec;
use crate::point::JointPoint;
use crate::solvers::{DrawCounter, RoundRecord, RunConfig, RunStatus, RunTrace, SolverError};
use crate::spectra::spectral_norm;

/// An N-player game given through per-player payoff gradients. Each oracle
/// reads the full joint point but returns only its owner's block.
pub trait NPlayerGame {
    fn block_dims(&self) -> Vec<usize>;

    /// `grad_n f_n(x)`: player `n`'s payoff gradient w.r.t. its own block.
    fn grad_n(&self, n: usize, x: &JointPoint) -> DVector<f64>;

    /// Known Nash equilibrium, if any.
    fn equilibrium(&self) -> Option<JointPoint> {
        None
    }

    fn num_players(&self) -> usize {
        self.block_dims().len()
    }

    fn check_point(&self, x: &JointPoint) -> Result<()> {
        x.check_dims(&self.block_dims())
    }
}

/// Stacked simultaneous-gradient field `F(x) = (grad_1 f_1, ..., grad_N f_N)`.
pub fn nplayer_operator_f<G: NPlayerGame + ?Sized>(g: &G, x: &JointPoint) -> Result<JointPoint> {
    g.check_point(x)?;
    Ok(JointPoint::new(
        (0..g.num_players()).map(|n| g.grad_n(n, x)).collect(),
    ))
}

/// Frozen-opponent field: block `n` is `grad_n f_n` evaluated with player
/// `n`'s block live and every other block at the reference point.
pub fn nplayer_operator_f_bar<G: NPlayerGame + ?Sized>(
    g: &G,
    x: &JointPoint,
    x_ref: &JointPoint,
) -> Result<JointPoint> {
    g.check_point(x)?;
    g.check_point(x_ref)?;
    let blocks = (0..g.num_players())
        .map(|n| {
            let mut arg = x_ref.clone();
            *arg.block_mut(n) = x.block(n).clone();
            g.grad_n(n, &arg)
        })
        .collect();
    Ok(JointPoint::new(blocks))
}

// ---------------------------------------------------------------------------
// Quadratic N-player family
// ---------------------------------------------------------------------------

/// Quadratic N-player game
/// `f_n(x) = 1/2 x^n' A_n x^n + x^n' sum_{j != n} C_{nj} x^j`
/// with SPD own blocks; the Nash equilibrium is the origin.
#[derive(Debug, Clone)]
pub struct QuadraticNPlayer {
    own: Vec<DMatrix<f64>>,
    /// `cross[n][j]`: the coupling of player n's gradient to block j
    /// (`None` on the diagonal and for absent couplings).
    cross: Vec<Vec<Option<DMatrix<f64>>>>,
}

impl QuadraticNPlayer {
    pub fn new(own: Vec<DMatrix<f64>>, mut cross: Vec<Vec<Option<DMatrix<f64>>>>) -> Result<Self> {
        let n = own.len();
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "own".into(),
                message: "need at least one player".into(),
            });
        }
        for (i, a) in own.iter().enumerate() {
            crate::norms::check_spd(a, &format!("A_{i}"))?;
        }
        if cross.is_empty() {
            cross = vec![vec![None; n]; n];
        }
        if cross.len() != n || cross.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidParameter {
                name: "cross".into(),
                message: "cross coupling must be an N x N grid".into(),
            });
        }
        for (i, row) in cross.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if let Some(c) = c {
                    if i == j {
                        return Err(Error::InvalidParameter {
                            name: format!("cross[{i}][{j}]"),
                            message: "diagonal couplings belong in the own-block matrix".into(),
                        });
                    }
                    if c.nrows() != own[i].nrows() || c.ncols() != own[j].nrows() {
                        return Err(Error::DimensionMismatch {
                            block: format!("cross[{i}][{j}]"),
                            expected: own[i].nrows() * own[j].nrows(),
                            got: c.nrows() * c.ncols(),
                        });
                    }
                }
            }
        }
        Ok(Self { own, cross })
    }

    /// Fully separable game (no couplings).
    pub fn separable(own: Vec<DMatrix<f64>>) -> Result<Self> {
        let n = own.len();
        Self::new(own, vec![vec![None; n]; n])
    }

    /// Interaction strength `Lbar_n = (sum_{j != n} ||C_{nj}||^2)^{1/2}` of
    /// player `n` with all others.
    pub fn l_bar_n(&self, n: usize) -> f64 {
        self.cross[n]
            .iter()
            .flatten()
            .map(|c| spectral_norm(c).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Gap constant `L_c = (max_i sum_{j != i} Lbar_j^2 / alpha_j)^{1/2}`.
    pub fn l_c(&self, ns: &NormSpec) -> f64 {
        let n = self.own.len();
        let l_bars: Vec<f64> = (0..n).map(|i| self.l_bar_n(i)).collect();
        (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i)
                    .map(|j| l_bars[j].powi(2) / ns.block(j).alpha)
                    .sum::<f64>()
            })
            .fold(0.0f64, f64::max)
            .sqrt()
    }

    /// Strong monotonicity `mu_bar = min_i mu_i / alpha_i` with
    /// `mu_i = lambda_min(A_i)`.
    pub fn mu_bar(&self, ns: &NormSpec) -> f64 {
        self.own
            .iter()
            .enumerate()
            .map(|(i, a)| a.clone().symmetric_eigen().eigenvalues.min() / ns.block(i).alpha)
            .fold(f64::INFINITY, f64::min)
    }
}

impl NPlayerGame for QuadraticNPlayer {
    fn block_dims(&self) -> Vec<usize> {
        self.own.iter().map(DMatrix::nrows).collect()
    }

    fn grad_n(&self, n: usize, x: &JointPoint) -> DVector<f64> {
        let mut g = &self.own[n] * x.block(n);
        for (j, c) in self.cross[n].iter().enumerate() {
            if let Some(c) = c {
                g += c * x.block(j);
            }
        }
        g
    }

    fn equilibrium(&self) -> Option<JointPoint> {
        Some(JointPoint::zeros(&self.block_dims()))
    }
}

/// A two-player zero-sum game viewed as a 2-player game with payoffs
/// `f_1 = f` and `f_2 = -f`, so the stacked field equals `F`.
pub struct MinimaxAsNPlayer<'a, G: TwoPlayerGame + ?Sized>(pub &'a G);

impl<G: TwoPlayerGame + ?Sized> NPlayerGame for MinimaxAsNPlayer<'_, G> {
    fn block_dims(&self) -> Vec<usize> {
        self.0.dims().to_vec()
    }

    fn grad_n(&self, n: usize, x: &JointPoint) -> DVector<f64> {
        if n == 0 {
            self.0.grad_u(x.u(), x.v())
        } else {
            -self.0.grad_v(x.u(), x.v())
        }
    }

    fn equilibrium(&self) -> Option<JointPoint> {
        self.0.saddle()
    }
}

// ---------------------------------------------------------------------------
// Decoupled SGD runs
// ---------------------------------------------------------------------------

/// Run round-structured decoupled SGD: every player takes `K` local steps on
/// its own block with all others frozen at the round-start point, then one
/// communication stacks the blocks.
///
/// Uses `cfg`'s stepsize, local steps, rounds, norms, noise, init and stop
/// rule; the method field is ignored (the update is the decoupled one).
/// Within a round the players are logically parallel; the sequential
/// implementation is equivalent because each gradient reads only its own
/// live block.
pub fn decoupled_sgd_run<G: NPlayerGame + ?Sized>(g: &G, cfg: &RunConfig) -> Result<RunTrace> {
    g.check_point(&cfg.init)?;
    let n = g.num_players();
    if cfg.norms.num_blocks() != n {
        return Err(Error::DimensionMismatch {
            block: "norm spec".into(),
            expected: n,
            got: cfg.norms.num_blocks(),
        });
    }
    let equilibrium = g.equilibrium();
    let mut draws = DrawCounter(0);
    let mut x = cfg.init.clone();
    let mut records = Vec::with_capacity(cfg.rounds);
    let mut status = RunStatus::BudgetExhausted;
    let mut oracle_calls = 0usize;

    for round in 1..=cfg.rounds {
        let x0 = x.clone();
        for step in 0..cfg.local_steps {
            // All gradients are taken before any block moves; own block live,
            // every other at the round start.
            let mut grads = Vec::with_capacity(n);
            for player in 0..n {
                let mut arg = x0.clone();
                *arg.block_mut(player) = x.block(player).clone();
                let mut grad = g.grad_n(player, &arg);
                let draw = draws.next();
                if let Some(noise) = &cfg.noise {
                    let target = noise.decoupled_block_target(&cfg.norms, player);
                    if target > 0.0 {
                        grad += noise.block_noise(&cfg.norms, player, target, draw);
                    }
                }
                grads.push(grad);
            }
            for (player, grad) in grads.iter().enumerate() {
                let d = cfg.norms.block(player).precondition(grad);
                x.block_mut(player).axpy(-cfg.gamma, &d, 1.0);
            }
            oracle_calls += n;
            if !x.is_finite() {
                return Err(SolverError::Diverged {
                    round,
                    step,
                    partial: Box::new(RunTrace {
                        records,
                        status: RunStatus::BudgetExhausted,
                    }),
                }
                .into());
            }
        }
        let field = nplayer_operator_f(g, &x)?;
        let grad_norm = cfg.norms.dual_norm(&field)?;
        let dist_sq = equilibrium
            .as_ref()
            .map(|e| cfg.norms.primal_norm_sq(&x.sub(e)).expect("dims checked"));
        records.push(RoundRecord {
            round,
            point: x.clone(),
            dist_sq,
            grad_norm,
            comm_rounds: round,
            oracle_calls,
        });
        let stopped = match cfg.stop {
            Some(crate::solvers::StopRule::DistanceBelow(eps)) => {
                dist_sq.map(|d| d.sqrt() <= eps).unwrap_or(false)
            }
            Some(crate::solvers::StopRule::GradNormBelow(eps)) => grad_norm <= eps,
            None => false,
        };
        if stopped {
            status = RunStatus::Converged;
            break;
        }
    }
    Ok(RunTrace { records, status })
}
