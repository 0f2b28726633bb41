//! Round-structured solver engine for two-player games.
//!
//! One round is one communication: players exchange blocks only at round
//! boundaries. The decoupled method takes `K` local gradient steps per round
//! against the opponent's block frozen at the round start; the single-step
//! baselines (GDA, alternating GDA, extragradient, optimistic GDA) take one
//! step per round, so rounds and iterations coincide for them.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::games::{operator_f, TwoPlayerGame};
use crate::ghost::ghost_round_counted;
use crate::noise::{NoiseModel, OracleKind};
use crate::norms::NormSpec;
use crate::point::JointPoint;

/// Solver selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// K local steps per round against the frozen opponent.
    Decoupled,
    /// Simultaneous gradient descent ascent (the K = 1 special case).
    Gda,
    /// Update u first, then v against the new u.
    AltGda,
    /// Extragradient: extrapolate, then step at the extrapolated point.
    Eg,
    /// Optimistic GDA: step along `2 F(x_t) - F(x_{t-1})`.
    Ogda,
    /// Decoupled with a linear extrapolation of the opponent between rounds.
    Ghost,
}

impl Method {
    pub fn is_local_update(self) -> bool {
        matches!(self, Method::Decoupled | Method::Ghost)
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Decoupled => "decoupled",
            Method::Gda => "gda",
            Method::AltGda => "alt_gda",
            Method::Eg => "eg",
            Method::Ogda => "ogda",
            Method::Ghost => "ghost",
        }
    }
}

/// Stop criterion, checked at round boundaries only.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// Stop when `||x - x*|| <= eps` (needs a game with a known saddle).
    DistanceBelow(f64),
    /// Stop when `||F(x)||_* <= eps`.
    GradNormBelow(f64),
}

/// Full description of one run. The noise model's `(seed, stream_id)` is the
/// run's random address; identical configs produce identical traces.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub method: Method,
    pub gamma: f64,
    /// Local steps per round; forced to 1 for the single-step baselines.
    pub local_steps: usize,
    pub rounds: usize,
    pub norms: NormSpec,
    pub noise: Option<NoiseModel>,
    pub init: JointPoint,
    pub stop: Option<StopRule>,
}

impl RunConfig {
    /// Effective local steps per round for the configured method.
    pub fn effective_k(&self) -> usize {
        if self.method.is_local_update() {
            self.local_steps
        } else {
            1
        }
    }

    fn validate<G: TwoPlayerGame + ?Sized>(&self, game: &G) -> crate::error::Result<()> {
        if self.gamma <= 0.0 || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter {
                name: "gamma".into(),
                message: format!("stepsize must be positive, got {}", self.gamma),
            });
        }
        if self.local_steps == 0 {
            return Err(Error::InvalidParameter {
                name: "local_steps".into(),
                message: "K must be at least 1".into(),
            });
        }
        if self.rounds == 0 {
            return Err(Error::InvalidParameter {
                name: "rounds".into(),
                message: "R must be at least 1".into(),
            });
        }
        game.check_point(&self.init)?;
        if self.norms.dims() != game.dims() {
            return Err(Error::DimensionMismatch {
                block: "norm spec".into(),
                expected: game.dims().iter().sum(),
                got: self.norms.dims().iter().sum(),
            });
        }
        Ok(())
    }
}

/// Per-round trace entry; `point` is the communicated end-of-round point.
#[derive(Debug, Clone)]
pub struct RoundRecord {
    /// 1-based round index.
    pub round: usize,
    pub point: JointPoint,
    /// `||x - x*||^2` in the configured norm, when the saddle is known.
    pub dist_sq: Option<f64>,
    /// Dual norm of the deterministic field `F` at the point.
    pub grad_norm: f64,
    /// Communication rounds so far (equals `round`: one sync per round).
    pub comm_rounds: usize,
    /// Cumulative per-player oracle queries. One query touches one block:
    /// a decoupled round costs `2K`, a GDA/alternating/optimistic step 2,
    /// an extragradient step 4.
    pub oracle_calls: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct RunTrace {
    pub records: Vec<RoundRecord>,
    pub status: RunStatus,
}

impl RunTrace {
    pub fn final_point(&self) -> &JointPoint {
        &self
            .records
            .last()
            .expect("trace has at least one round")
            .point
    }

    pub fn rounds_run(&self) -> usize {
        self.records.len()
    }

    /// Serialize as CSV rows
    /// `method,K,R_index,gamma,seed,dist_sq,grad_norm,comm_rounds,oracle_calls`.
    pub fn to_csv(&self, method: Method, k: usize, gamma: f64, seed: u64) -> String {
        let mut out = String::from(
            "method,K,R_index,gamma,seed,dist_sq,grad_norm,comm_rounds,oracle_calls\n",
        );
        for rec in &self.records {
            let dist = rec.dist_sq.map(|d| format!("{d:e}")).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{:e},{},{},{:e},{},{}\n",
                method.name(),
                k,
                rec.round,
                gamma,
                seed,
                dist,
                rec.grad_norm,
                rec.comm_rounds,
                rec.oracle_calls
            ));
        }
        out
    }
}

/// Solver failure: bad configuration, or divergence with the partial trace
/// up to the last finite round.
#[derive(Debug)]
pub enum SolverError {
    Config(Error),
    Diverged {
        round: usize,
        step: usize,
        partial: Box<RunTrace>,
    },
}

impl std::fmt::Display for SolverError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolverError::Config(e) => write!(f, "{e}"),
            SolverError::Diverged { round, step, .. } => {
                write!(f, "divergence at round {round}, local step {step}")
            }
        }
    }
}

impl std::error::Error for SolverError {}

impl From<SolverError> for Error {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Config(e) => e,
            SolverError::Diverged { round, step, .. } => Error::Divergence { round, step },
        }
    }
}

pub type RunResult = std::result::Result<RunTrace, SolverError>;

// ---------------------------------------------------------------------------
// Rounds
// ---------------------------------------------------------------------------

/// Counter handing out one keystream segment per oracle block query.
#[derive(Debug, Clone, Copy, Default)]
pub struct DrawCounter(pub u64);

impl DrawCounter {
    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> u64 {
        let d = self.0;
        self.0 += 1;
        d
    }
}

fn own_block_query<G: TwoPlayerGame + ?Sized>(
    game: &G,
    ns: &NormSpec,
    block: usize,
    live: &JointPoint,
    frozen: &JointPoint,
    noise: Option<&NoiseModel>,
    draws: &mut DrawCounter,
) -> nalgebra::DVector<f64> {
    // Block of the descent field F_xbar: own argument live, cross frozen.
    let mut g = if block == 0 {
        game.grad_u(live.u(), frozen.v())
    } else {
        -game.grad_v(frozen.u(), live.v())
    };
    let draw = draws.next();
    if let Some(n) = noise {
        let target = n.block_targets(ns, OracleKind::Decoupled)[block];
        if target > 0.0 {
            g += n.block_noise(ns, block, target, draw);
        }
    }
    g
}

/// One decoupled round: `K` local steps with the opponent frozen at `x0`.
///
/// `u_{t+1} = u_t - gamma (alpha_u P_u)^{-1} grad_u f(u_t, v_0; xi)`,
/// `v_{t+1} = v_t + gamma (alpha_v P_v)^{-1} grad_v f(u_0, v_t; xi)`.
///
/// Returns the communicated point `(u_K, v_K)`, or the local step index at
/// which an iterate became non-finite.
pub(crate) fn decoupled_round_counted<G: TwoPlayerGame + ?Sized>(
    game: &G,
    ns: &NormSpec,
    x0: &JointPoint,
    gamma: f64,
    k: usize,
    noise: Option<&NoiseModel>,
    draws: &mut DrawCounter,
) -> std::result::Result<JointPoint, usize> {
    let mut x = x0.clone();
    for t in 0..k {
        let g_u = own_block_query(game, ns, 0, &x, x0, noise, draws);
        let g_v = own_block_query(game, ns, 1, &x, x0, noise, draws);
        let du = ns.block(0).precondition(&g_u);
        let dv = ns.block(1).precondition(&g_v);
        x.block_mut(0).axpy(-gamma, &du, 1.0);
        x.block_mut(1).axpy(-gamma, &dv, 1.0);
        if !x.is_finite() {
            return Err(t);
        }
    }
    Ok(x)
}

/// Standalone decoupled round starting at draw index `draw_base`.
pub fn decoupled_round<G: TwoPlayerGame + ?Sized>(
    game: &G,
    ns: &NormSpec,
    x0: &JointPoint,
    gamma: f64,
    k: usize,
    noise: Option<&NoiseModel>,
    draw_base: u64,
) -> crate::error::Result<JointPoint> {
    game.check_point(x0)?;
    let mut draws = DrawCounter(draw_base);
    decoupled_round_counted(game, ns, x0, gamma, k, noise, &mut draws)
        .map_err(|step| Error::Divergence { round: 1, step })
}

/// State carried between [`baseline_step`] calls; only OGDA uses it.
#[derive(Debug, Clone, Default)]
pub struct BaselineState {
    /// Previous (possibly noisy) operator value for the optimistic step.
    pub prev_operator: Option<JointPoint>,
}

fn noisy_field<G: TwoPlayerGame + ?Sized>(
    game: &G,
    ns: &NormSpec,
    x: &JointPoint,
    noise: Option<&NoiseModel>,
    draws: &mut DrawCounter,
) -> JointPoint {
    // Baselines query the full field at the live point; the same own-block
    // noise model applies with xbar = x, so GDA and decoupled K = 1 consume
    // identical draws.
    let u = own_block_query(game, ns, 0, x, x, noise, draws);
    let v = own_block_query(game, ns, 1, x, x, noise, draws);
    JointPoint::new(vec![u, v])
}

/// One step of a single-step baseline. Returns the new point; OGDA's first
/// step (empty state) falls back to plain GDA.
#[allow(clippy::too_many_arguments)]
pub fn baseline_step<G: TwoPlayerGame + ?Sized>(
    game: &G,
    ns: &NormSpec,
    x: &JointPoint,
    gamma: f64,
    method: Method,
    state: &mut BaselineState,
    noise: Option<&NoiseModel>,
    draws: &mut DrawCounter,
) -> crate::error::Result<JointPoint> {
    game.check_point(x)?;
    let next = match method {
        Method::Gda => {
            let f = noisy_field(game, ns, x, noise, draws);
            let mut next = x.clone();
            next.axpy(-gamma, &ns.precondition(&f)?);
            next
        }
        Method::AltGda => {
            // u first, then v against the updated u.
            let g_u = own_block_query(game, ns, 0, x, x, noise, draws);
            let mut next = x.clone();
            let du = ns.block(0).precondition(&g_u);
            next.block_mut(0).axpy(-gamma, &du, 1.0);
            let g_v = own_block_query(game, ns, 1, &next, &next, noise, draws);
            let dv = ns.block(1).precondition(&g_v);
            next.block_mut(1).axpy(-gamma, &dv, 1.0);
            next
        }
        Method::Eg => {
            let f = noisy_field(game, ns, x, noise, draws);
            let mut mid = x.clone();
            mid.axpy(-gamma, &ns.precondition(&f)?);
            if !mid.is_finite() {
                return Err(Error::Divergence { round: 0, step: 0 });
            }
            let f_mid = noisy_field(game, ns, &mid, noise, draws);
            let mut next = x.clone();
            next.axpy(-gamma, &ns.precondition(&f_mid)?);
            next
        }
        Method::Ogda => {
            let f = noisy_field(game, ns, x, noise, draws);
            let drift = match state.prev_operator.take() {
                Some(prev) => {
                    let mut d = f.scale(2.0);
                    d.axpy(-1.0, &prev);
                    d
                }
                None => f.clone(),
            };
            state.prev_operator = Some(f);
            let mut next = x.clone();
            next.axpy(-gamma, &ns.precondition(&drift)?);
            next
        }
        Method::Decoupled | Method::Ghost => {
            return Err(Error::InvalidParameter {
                name: "method".into(),
                message: "baseline_step handles single-step methods only".into(),
            })
        }
    };
    Ok(next)
}

fn oracle_calls_per_round(method: Method, k: usize) -> usize {
    match method {
        Method::Decoupled | Method::Ghost => 2 * k,
        Method::Gda | Method::AltGda | Method::Ogda => 2,
        Method::Eg => 4,
    }
}

/// Run `cfg.rounds` communication rounds (or fewer if the stop rule fires).
///
/// ```
/// use decoupled_sgda::solvers::{run, Method, RunConfig};
/// use decoupled_sgda::{JointPoint, NormSpec, QuadraticGame};
///
/// let game = QuadraticGame::scalar(1.0, 10.0, 0.2)?;
/// let trace = run(
///     &game,
///     &RunConfig {
///         method: Method::Decoupled,
///         gamma: 0.01,
///         local_steps: 300,
///         rounds: 20,
///         norms: NormSpec::euclidean(&[1, 1]),
///         noise: None,
///         init: JointPoint::scalar(1.0, -1.0),
///         stop: None,
///     },
/// )
/// .map_err(decoupled_sgda::Error::from)?;
/// assert!(trace.records.last().unwrap().dist_sq.unwrap() < 1e-6);
/// # Ok::<(), decoupled_sgda::Error>(())
/// ```
pub fn run<G: TwoPlayerGame + ?Sized>(game: &G, cfg: &RunConfig) -> RunResult {
    cfg.validate(game).map_err(SolverError::Config)?;
    let k = cfg.effective_k();
    let saddle = game.saddle();
    let mut draws = DrawCounter(0);
    let mut baseline_state = BaselineState::default();
    let mut prev_x0: Option<JointPoint> = None;

    let mut x = cfg.init.clone();
    let mut records = Vec::with_capacity(cfg.rounds);
    let mut status = RunStatus::BudgetExhausted;
    let mut oracle_calls = 0usize;

    for round in 1..=cfg.rounds {
        let next = match cfg.method {
            Method::Decoupled => decoupled_round_counted(
                game,
                &cfg.norms,
                &x,
                cfg.gamma,
                k,
                cfg.noise.as_ref(),
                &mut draws,
            ),
            Method::Ghost => {
                match ghost_round_counted(
                    game,
                    &cfg.norms,
                    &x,
                    prev_x0.as_ref(),
                    cfg.gamma,
                    k,
                    cfg.noise.as_ref(),
                    &mut draws,
                ) {
                    Ok((next, _ghost)) => Ok(next),
                    Err(step) => Err(step),
                }
            }
            method => {
                match baseline_step(
                    game,
                    &cfg.norms,
                    &x,
                    cfg.gamma,
                    method,
                    &mut baseline_state,
                    cfg.noise.as_ref(),
                    &mut draws,
                ) {
                    Ok(p) => {
                        if p.is_finite() {
                            Ok(p)
                        } else {
                            Err(0)
                        }
                    }
                    Err(Error::Divergence { step, .. }) => Err(step),
                    Err(e) => return Err(SolverError::Config(e)),
                }
            }
        };
        let next = match next {
            Ok(p) => p,
            Err(step) => {
                return Err(SolverError::Diverged {
                    round,
                    step,
                    partial: Box::new(RunTrace {
                        records,
                        status: RunStatus::BudgetExhausted,
                    }),
                })
            }
        };

        prev_x0 = Some(x.clone());
        oracle_calls += oracle_calls_per_round(cfg.method, k);
        let field = operator_f(game, &next).map_err(SolverError::Config)?;
        let grad_norm = cfg.norms.dual_norm(&field).map_err(SolverError::Config)?;
        let dist_sq = saddle.as_ref().map(|s| {
            cfg.norms
                .primal_norm_sq(&next.sub(s))
                .expect("dims validated")
        });
        records.push(RoundRecord {
            round,
            point: next.clone(),
            dist_sq,
            grad_norm,
            comm_rounds: round,
            oracle_calls,
        });
        x = next;

        let stopped = match cfg.stop {
            Some(StopRule::DistanceBelow(eps)) => dist_sq.map(|d| d.sqrt() <= eps).unwrap_or(false),
            Some(StopRule::GradNormBelow(eps)) => grad_norm <= eps,
            None => false,
        };
        if stopped {
            status = RunStatus::Converged;
            break;
        }
    }
    Ok(RunTrace { records, status })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::QuadraticGame;
    use crate::point::JointPoint;

    fn qg(a: f64, b: f64, c: f64) -> QuadraticGame {
        QuadraticGame::scalar(a, b, c).unwrap()
    }

    fn euclid() -> NormSpec {
        NormSpec::euclidean(&[1, 1])
    }

    fn cfg(method: Method, gamma: f64, k: usize, rounds: usize) -> RunConfig {
        RunConfig {
            method,
            gamma,
            local_steps: k,
            rounds,
            norms: euclid(),
            noise: None,
            init: JointPoint::scalar(1.0, -1.0),
            stop: None,
        }
    }

    #[test]
    fn decoupled_round_hand_values() {
        // a=1, b=10, c=2.7, x0=(1,-1), gamma=0.1, K=2: u1 = 1.17, u2 = 1.323.
        let g = qg(1.0, 10.0, 2.7);
        let x = decoupled_round(
            &g,
            &euclid(),
            &JointPoint::scalar(1.0, -1.0),
            0.1,
            2,
            None,
            0,
        )
        .unwrap();
        assert!((x.u()[0] - 1.323).abs() < 1e-12, "u2 = {}", x.u()[0]);
    }

    #[test]
    fn decoupled_round_geometric_decay_without_coupling() {
        let g = qg(1.0, 10.0, 0.0);
        let x = decoupled_round(
            &g,
            &euclid(),
            &JointPoint::scalar(1.0, -1.0),
            0.1,
            3,
            None,
            0,
        )
        .unwrap();
        assert!((x.u()[0] - 0.729).abs() < 1e-12);
    }

    #[test]
    fn k1_matches_one_gda_step() {
        let g = qg(1.0, 10.0, 2.7);
        let x0 = JointPoint::scalar(1.0, -1.0);
        let dec = decoupled_round(&g, &euclid(), &x0, 0.05, 1, None, 0).unwrap();
        let mut st = BaselineState::default();
        let mut draws = DrawCounter(0);
        let gda = baseline_step(
            &g,
            &euclid(),
            &x0,
            0.05,
            Method::Gda,
            &mut st,
            None,
            &mut draws,
        )
        .unwrap();
        assert!(dec.max_abs_diff(&gda) < 1e-16);
    }

    #[test]
    fn gda_step_hand_values() {
        // a=1, b=10, c=0 at (1,-1), gamma=0.1: (0.9, 0).
        let g = qg(1.0, 10.0, 0.0);
        let mut st = BaselineState::default();
        let mut draws = DrawCounter(0);
        let x = baseline_step(
            &g,
            &euclid(),
            &JointPoint::scalar(1.0, -1.0),
            0.1,
            Method::Gda,
            &mut st,
            None,
            &mut draws,
        )
        .unwrap();
        assert!((x.u()[0] - 0.9).abs() < 1e-15);
        assert!(x.v()[0].abs() < 1e-15);
    }

    #[test]
    fn alt_gda_equals_gda_without_coupling() {
        let g = qg(1.0, 10.0, 0.0);
        let x0 = JointPoint::scalar(0.7, 0.4);
        let mut st = BaselineState::default();
        let mut d1 = DrawCounter(0);
        let a = baseline_step(
            &g,
            &euclid(),
            &x0,
            0.07,
            Method::AltGda,
            &mut st,
            None,
            &mut d1,
        )
        .unwrap();
        let mut d2 = DrawCounter(0);
        let b = baseline_step(
            &g,
            &euclid(),
            &x0,
            0.07,
            Method::Gda,
            &mut st,
            None,
            &mut d2,
        )
        .unwrap();
        assert!(a.max_abs_diff(&b) < 1e-16);
    }

    #[test]
    fn eg_fixed_at_saddle() {
        let g = qg(1.0, 10.0, 2.7);
        let x0 = JointPoint::scalar(0.0, 0.0);
        let mut st = BaselineState::default();
        let mut draws = DrawCounter(0);
        let x = baseline_step(
            &g,
            &euclid(),
            &x0,
            0.1,
            Method::Eg,
            &mut st,
            None,
            &mut draws,
        )
        .unwrap();
        assert_eq!(x, x0);
    }

    #[test]
    fn ogda_first_step_is_gda() {
        let g = qg(2.0, 3.0, 1.0);
        let x0 = JointPoint::scalar(0.5, -0.2);
        let mut st = BaselineState::default();
        let mut d1 = DrawCounter(0);
        let o = baseline_step(
            &g,
            &euclid(),
            &x0,
            0.05,
            Method::Ogda,
            &mut st,
            None,
            &mut d1,
        )
        .unwrap();
        let mut st2 = BaselineState::default();
        let mut d2 = DrawCounter(0);
        let g1 = baseline_step(
            &g,
            &euclid(),
            &x0,
            0.05,
            Method::Gda,
            &mut st2,
            None,
            &mut d2,
        )
        .unwrap();
        assert!(o.max_abs_diff(&g1) < 1e-16);
        assert!(st.prev_operator.is_some());
    }

    #[test]
    fn gda_run_equals_decoupled_k1_run_with_noise() {
        let g = qg(1.0, 4.0, 0.8);
        let noise = NoiseModel::decoupled_only(0.3, 11, 2).unwrap();
        let mut c1 = cfg(Method::Gda, 0.05, 1, 20);
        c1.noise = Some(noise.clone());
        let mut c2 = cfg(Method::Decoupled, 0.05, 1, 20);
        c2.noise = Some(noise);
        let t1 = run(&g, &c1).unwrap();
        let t2 = run(&g, &c2).unwrap();
        for (a, b) in t1.records.iter().zip(&t2.records) {
            assert!(a.point.max_abs_diff(&b.point) < 1e-15);
        }
    }

    #[test]
    fn seed_determinism() {
        let g = qg(1.0, 4.0, 0.8);
        let mut c = cfg(Method::Decoupled, 0.05, 5, 15);
        c.noise = Some(NoiseModel::decoupled_only(0.5, 99, 1).unwrap());
        let t1 = run(&g, &c).unwrap();
        let t2 = run(&g, &c).unwrap();
        for (a, b) in t1.records.iter().zip(&t2.records) {
            assert_eq!(a.point, b.point);
        }
    }

    #[test]
    fn trace_accounting() {
        let g = qg(1.0, 4.0, 0.3);
        let t = run(&g, &cfg(Method::Decoupled, 0.05, 7, 9)).unwrap();
        assert_eq!(t.records.len(), 9);
        for (i, rec) in t.records.iter().enumerate() {
            assert_eq!(rec.round, i + 1);
            assert_eq!(rec.comm_rounds, i + 1);
            assert_eq!(rec.oracle_calls, 2 * 7 * (i + 1));
        }
        let t = run(&g, &cfg(Method::Eg, 0.05, 7, 4)).unwrap();
        // K forced to 1; EG evaluates both players twice per step.
        assert_eq!(t.records.last().unwrap().oracle_calls, 16);
    }

    /// Noisy weakly coupled runs stay within the two-regime rate bound:
    /// the mean end-of-round squared distance over many seeds is at most
    /// the bound value plus three standard errors.
    #[test]
    fn noisy_weakly_coupled_run_within_rate_bound() {
        use crate::rng::stream_rng;
        use crate::spectra::{self, PrescriptionTarget};
        let mut rng = stream_rng(56, 0, 0);
        let game = crate::sample::random_game_with_kappa_c(2, 2, 0.5, 2.0, 0.15, &mut rng);
        let ns = NormSpec::euclidean(&[2, 2]);
        let consts = spectra::analyze(&game, &ns).unwrap();
        let p = spectra::prescribed_hyperparams(&consts, PrescriptionTarget::Weakly, 1);
        let init = crate::sample::random_point(&[2, 2], 1.0, &mut rng);
        let d = ns.primal_norm(&init).unwrap();
        let sigma_bar = 0.3;
        let rounds = 25;

        let mut dists = Vec::new();
        for seed in 0..60u64 {
            let cfg = RunConfig {
                method: Method::Decoupled,
                gamma: p.gamma,
                local_steps: p.k,
                rounds,
                norms: ns.clone(),
                noise: Some(NoiseModel::decoupled_only(sigma_bar, 900 + seed, seed).unwrap()),
                init: init.clone(),
                stop: None,
            };
            let trace = run(&game, &cfg).unwrap();
            dists.push(trace.records.last().unwrap().dist_sq.unwrap());
        }
        let n = dists.len() as f64;
        let mean = dists.iter().sum::<f64>() / n;
        let var = dists.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();

        let bound = spectra::theoretical_bound(&consts, rounds, p.k, p.gamma, d, sigma_bar);
        assert!(bound.hypotheses_satisfied, "{:?}", bound.violations);
        assert!(
            mean <= bound.value + 3.0 * se,
            "mean {mean:.3e} above bound {:.3e} + 3se {se:.3e}",
            bound.value
        );
    }

    /// Fully decoupled noiseless rounds contract the distance by at least
    /// `(1 - gamma mu_bar)^K` per round.
    #[test]
    fn per_round_contraction_without_coupling() {
        use crate::rng::stream_rng;
        let mut rng = stream_rng(55, 0, 0);
        for _ in 0..30 {
            let game = crate::sample::random_quadratic_game(3, 2, 0.4, 3.0, 0.0, &mut rng);
            let ns = NormSpec::euclidean(&[3, 2]);
            let consts = crate::spectra::analyze(&game, &ns).unwrap();
            let gamma = 0.8 / consts.l_bar;
            let k = 6;
            let cfg = RunConfig {
                method: Method::Decoupled,
                gamma,
                local_steps: k,
                rounds: 5,
                norms: ns,
                noise: None,
                init: crate::sample::random_point(&[3, 2], 1.0, &mut rng),
                stop: None,
            };
            let trace = run(&game, &cfg).unwrap();
            let factor = (1.0 - gamma * consts.mu_bar).powi(k as i32);
            let mut prev = cfg.norms.primal_norm_sq(&cfg.init).unwrap();
            for rec in &trace.records {
                let d = rec.dist_sq.unwrap();
                assert!(
                    d.sqrt() <= factor * prev.sqrt() + 1e-12,
                    "ratio {} > {factor}",
                    d.sqrt() / prev.sqrt()
                );
                prev = d;
            }
        }
    }

    #[test]
    fn config_validation_errors() {
        let g = qg(1.0, 1.0, 0.0);
        for bad in [
            cfg(Method::Gda, 0.0, 1, 5),
            cfg(Method::Gda, -0.1, 1, 5),
            cfg(Method::Decoupled, 0.1, 0, 5),
            cfg(Method::Decoupled, 0.1, 1, 0),
        ] {
            match run(&g, &bad) {
                Err(SolverError::Config(Error::InvalidParameter { .. })) => {}
                other => panic!("expected config rejection, got {other:?}"),
            }
        }
    }

    #[test]
    fn stop_rule_at_round_boundary() {
        let g = qg(1.0, 1.0, 0.0);
        let mut c = cfg(Method::Decoupled, 0.5, 4, 100);
        c.stop = Some(StopRule::DistanceBelow(1e-6));
        let t = run(&g, &c).unwrap();
        assert_eq!(t.status, RunStatus::Converged);
        assert!(t.rounds_run() < 100);
        let last = t.records.last().unwrap();
        assert!(last.dist_sq.unwrap().sqrt() <= 1e-6);
    }

    #[test]
    fn divergence_reports_round_and_partial_trace() {
        let g = qg(1.0, 1.0, 0.0);
        // gamma far above 2/L: distance doubles every step and overflows.
        let c = cfg(Method::Decoupled, 1e300, 8, 50);
        match run(&g, &c) {
            Err(SolverError::Diverged { round, partial, .. }) => {
                assert!(round >= 1);
                assert!(partial.records.len() < 50);
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn csv_schema() {
        let g = qg(1.0, 4.0, 0.3);
        let t = run(&g, &cfg(Method::Gda, 0.05, 1, 3)).unwrap();
        let csv = t.to_csv(Method::Gda, 1, 0.05, 7);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "method,K,R_index,gamma,seed,dist_sq,grad_norm,comm_rounds,oracle_calls"
        );
        assert_eq!(lines.count(), 3);
    }
}
