//! Federated minimax: client games distributed over machines that own one
//! player each (decoupled) or evolve full local copies (local SGDA).
//!
//! The global objective is the uniform client average. Everything here lives
//! in the plain Euclidean geometry. Client machines are split by player:
//! `M` machines own `u` and `M` own `v` (2M total). A u-machine's oracle
//! observes its own block with std `noise_own` and the opponent block with
//! std `noise_cross`; the decoupled method never queries opponent blocks, so
//! only `noise_own` ever enters it.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::games::{operator_f, QuadraticGame, TwoPlayerGame};
use crate::noise::{NoiseModel, OracleKind};
use crate::norms::NormSpec;
use crate::point::JointPoint;
use crate::rng::stream_rng;
use crate::solvers::{DrawCounter, RoundRecord, RunStatus, RunTrace, SolverError};

/// One client's payoff: a quadratic game plus linear terms,
/// `f_m(u, v) = 1/2 <u, A u> - 1/2 <v, B v> + <u, C v> + <d, u> + <e, v>`.
/// The linear terms move the client's own saddle away from the global one,
/// which is what makes a federation heterogeneous.
#[derive(Debug, Clone)]
pub struct QuadraticClient {
    pub game: QuadraticGame,
    pub lin_u: DVector<f64>,
    pub lin_v: DVector<f64>,
}

impl QuadraticClient {
    pub fn new(game: QuadraticGame, lin_u: DVector<f64>, lin_v: DVector<f64>) -> Result<Self> {
        if lin_u.len() != game.dim_u() || lin_v.len() != game.dim_v() {
            return Err(Error::DimensionMismatch {
                block: "linear terms".into(),
                expected: game.dim_u() + game.dim_v(),
                got: lin_u.len() + lin_v.len(),
            });
        }
        Ok(Self { game, lin_u, lin_v })
    }

    pub fn homogeneous(game: QuadraticGame) -> Self {
        let [du, dv] = game.dims();
        Self {
            lin_u: DVector::zeros(du),
            lin_v: DVector::zeros(dv),
            game,
        }
    }

    pub fn grad_u(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        self.game.grad_u(u, v) + &self.lin_u
    }

    pub fn grad_v(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        self.game.grad_v(u, v) + &self.lin_v
    }

    /// Descent field `(grad_u, -grad_v)`.
    pub fn field(&self, x: &JointPoint) -> JointPoint {
        JointPoint::new(vec![self.grad_u(x.u(), x.v()), -self.grad_v(x.u(), x.v())])
    }
}

/// A federated minimax problem: M client games (per player side), uniform
/// aggregation, and the per-machine oracle noise.
#[derive(Debug, Clone)]
pub struct FederatedProblem {
    pub clients: Vec<QuadraticClient>,
    /// Std of a machine's own-block gradient noise (sigma of the rate bound).
    pub noise_own: f64,
    /// Std of a machine's opponent-block gradient noise; only local SGDA
    /// consumes opponent blocks.
    pub noise_cross: f64,
    pub seed: u64,
    pub stream_id: u64,
}

impl FederatedProblem {
    pub fn new(
        clients: Vec<QuadraticClient>,
        noise_own: f64,
        noise_cross: f64,
        seed: u64,
        stream_id: u64,
    ) -> Result<Self> {
        if clients.is_empty() {
            return Err(Error::InvalidParameter {
                name: "clients".into(),
                message: "need at least one client".into(),
            });
        }
        let dims = clients[0].game.dims();
        for (m, c) in clients.iter().enumerate() {
            if c.game.dims() != dims {
                return Err(Error::DimensionMismatch {
                    block: format!("client {m}"),
                    expected: dims.iter().sum(),
                    got: c.game.dims().iter().sum(),
                });
            }
        }
        for (name, s) in [("noise_own", noise_own), ("noise_cross", noise_cross)] {
            if s < 0.0 || !s.is_finite() {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    message: format!("std must be nonnegative, got {s}"),
                });
            }
        }
        Ok(Self {
            clients,
            noise_own,
            noise_cross,
            seed,
            stream_id,
        })
    }

    pub fn noiseless(clients: Vec<QuadraticClient>) -> Result<Self> {
        Self::new(clients, 0.0, 0.0, 0, 0)
    }

    pub fn num_clients(&self) -> usize {
        self.clients.len()
    }

    pub fn dims(&self) -> [usize; 2] {
        self.clients[0].game.dims()
    }

    /// The global game: averaged `(A, B, C)` and averaged linear terms.
    pub fn global(&self) -> QuadraticClient {
        let m = self.clients.len() as f64;
        let mut a = self.clients[0].game.a().clone();
        let mut b = self.clients[0].game.b().clone();
        let mut c = self.clients[0].game.c().clone();
        let mut lin_u = self.clients[0].lin_u.clone();
        let mut lin_v = self.clients[0].lin_v.clone();
        for client in &self.clients[1..] {
            a += client.game.a();
            b += client.game.b();
            c += client.game.c();
            lin_u += &client.lin_u;
            lin_v += &client.lin_v;
        }
        QuadraticClient {
            game: QuadraticGame::new(a / m, b / m, c / m).expect("average of SPD is SPD"),
            lin_u: lin_u / m,
            lin_v: lin_v / m,
        }
    }

    /// Saddle of the global game: the solution of
    /// `[[A, C], [-C^T, B]] x = (-d, e)`.
    pub fn global_saddle(&self) -> Result<JointPoint> {
        let g = self.global();
        let [du, dv] = g.game.dims();
        let mut jac = nalgebra::DMatrix::zeros(du + dv, du + dv);
        jac.view_mut((0, 0), (du, du)).copy_from(g.game.a());
        jac.view_mut((0, du), (du, dv)).copy_from(g.game.c());
        jac.view_mut((du, 0), (dv, du))
            .copy_from(&(-g.game.c().transpose()));
        jac.view_mut((du, du), (dv, dv)).copy_from(g.game.b());
        let mut rhs = DVector::zeros(du + dv);
        rhs.rows_mut(0, du).copy_from(&(-&g.lin_u));
        rhs.rows_mut(du, dv).copy_from(&g.lin_v);
        let x = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Unsupported("global saddle system is singular".into()))?;
        Ok(JointPoint::from_stacked(&x, &[du, dv]))
    }

    /// Euclidean constants `(mu, L)` of the global game: `mu` is the smaller
    /// block strong-convexity constant, `L` the two-argument smoothness
    /// `max(L_u, L_v, ||C||)`.
    pub fn global_constants(&self) -> (f64, f64) {
        let g = self.global();
        let eig_a = g.game.a().clone().symmetric_eigen().eigenvalues;
        let eig_b = g.game.b().clone().symmetric_eigen().eigenvalues;
        let c_norm = crate::spectra::spectral_norm(g.game.c());
        let mu = eig_a.min().min(eig_b.min());
        let l = eig_a.max().max(eig_b.max()).max(c_norm);
        (mu, l)
    }
}

/// Heterogeneity at the global saddle:
/// `zeta* = max_m max(||grad_u f_m(x*)||, ||grad_v f_m(x*)||)`.
pub fn measure_zeta_star(p: &FederatedProblem) -> Result<f64> {
    let saddle = p.global_saddle()?;
    Ok(p.clients
        .iter()
        .map(|c| {
            c.grad_u(saddle.u(), saddle.v())
                .norm()
                .max(c.grad_v(saddle.u(), saddle.v()).norm())
        })
        .fold(0.0, f64::max))
}

/// Distance bound at round `R` for the decoupled federated method:
/// `D^2 exp(-gamma mu K R / 2) + 96 K^2 L^2 gamma^2 zeta*^2 / mu^2
///  + 6 K L^2 gamma^2 sigma^2 / mu^2 + 2 gamma sigma^2 / (M mu)`,
/// valid for `gamma <= mu / (32 L^2 K)`.
#[derive(Debug, Clone, Serialize)]
pub struct FederatedBound {
    pub value: f64,
    pub contraction_term: f64,
    pub heterogeneity_term: f64,
    pub local_noise_term: f64,
    pub averaged_noise_term: f64,
    pub hypotheses_satisfied: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn theorem_e_bound(
    mu: f64,
    l: f64,
    gamma: f64,
    k: usize,
    rounds: usize,
    m_clients: usize,
    d: f64,
    sigma: f64,
    zeta_star: f64,
) -> FederatedBound {
    let kf = k as f64;
    let contraction = d * d * (-gamma * mu * kf * rounds as f64 / 2.0).exp();
    let heterogeneity = 96.0 * kf * kf * l * l * gamma * gamma * zeta_star * zeta_star / (mu * mu);
    let local_noise = 6.0 * kf * l * l * gamma * gamma * sigma * sigma / (mu * mu);
    let averaged_noise = 2.0 * gamma * sigma * sigma / (m_clients as f64 * mu);
    FederatedBound {
        value: contraction + heterogeneity + local_noise + averaged_noise,
        contraction_term: contraction,
        heterogeneity_term: heterogeneity,
        local_noise_term: local_noise,
        averaged_noise_term: averaged_noise,
        hypotheses_satisfied: gamma <= mu / (32.0 * l * l * kf),
    }
}

fn iso_noise(dim: usize, sigma: f64, seed: u64, stream: u64, draw: u64) -> DVector<f64> {
    if sigma == 0.0 {
        return DVector::zeros(dim);
    }
    // Per-coordinate std sigma / sqrt(dim), so E||eta||^2 = sigma^2.
    let std = sigma / (dim as f64).sqrt();
    let mut rng = stream_rng(seed, stream, draw);
    DVector::from_fn(dim, |_, _| std * rng.sample::<f64, _>(StandardNormal))
}

fn record_round(
    records: &mut Vec<RoundRecord>,
    round: usize,
    x: &JointPoint,
    global: &QuadraticClient,
    saddle: &JointPoint,
    oracle_calls: usize,
) {
    let field = global.field(x);
    let diff = x.sub(saddle);
    records.push(RoundRecord {
        round,
        point: x.clone(),
        dist_sq: Some(diff.dot(&diff)),
        grad_norm: field.dot(&field).sqrt(),
        comm_rounds: round,
        oracle_calls,
    });
}

fn diverged(records: Vec<RoundRecord>, round: usize, step: usize) -> Error {
    SolverError::Diverged {
        round,
        step,
        partial: Box::new(RunTrace {
            records,
            status: RunStatus::BudgetExhausted,
        }),
    }
    .into()
}

/// Federated decoupled run: u-machines take `K` local steps on `u` against
/// the broadcast `vbar`, v-machines symmetrically; the server averages each
/// block across its machines and broadcasts.
pub fn federated_decoupled_run(
    p: &FederatedProblem,
    x0: &JointPoint,
    gamma: f64,
    k: usize,
    rounds: usize,
) -> Result<RunTrace> {
    let [du, dv] = p.dims();
    x0.check_dims(&[du, dv])?;
    let global = p.global();
    let saddle = p.global_saddle()?;
    let m = p.num_clients();
    let mut x = x0.clone();
    let mut records = Vec::with_capacity(rounds);
    let mut draws = DrawCounter(0);
    let mut oracle_calls = 0usize;

    for round in 1..=rounds {
        let mut u_sum = DVector::zeros(du);
        let mut v_sum = DVector::zeros(dv);
        for client in &p.clients {
            let mut u = x.u().clone();
            for step in 0..k {
                let noise = iso_noise(du, p.noise_own, p.seed, p.stream_id, draws.next());
                u.axpy(-gamma, &(client.grad_u(&u, x.v()) + noise), 1.0);
                if !u.iter().all(|a| a.is_finite()) {
                    return Err(diverged(records, round, step));
                }
            }
            u_sum += u;
        }
        for client in &p.clients {
            let mut v = x.v().clone();
            for step in 0..k {
                let noise = iso_noise(dv, p.noise_own, p.seed, p.stream_id, draws.next());
                v.axpy(gamma, &(client.grad_v(x.u(), &v) + noise), 1.0);
                if !v.iter().all(|a| a.is_finite()) {
                    return Err(diverged(records, round, step));
                }
            }
            v_sum += v;
        }
        x = JointPoint::new(vec![u_sum / m as f64, v_sum / m as f64]);
        oracle_calls += 2 * m * k;
        record_round(&mut records, round, &x, &global, &saddle, oracle_calls);
    }
    Ok(RunTrace {
        records,
        status: RunStatus::BudgetExhausted,
    })
}

/// M-client local SGDA baseline in the same player-split hardware model:
/// all 2M machines evolve a full local copy with their own oracle (a
/// u-machine sees cross blocks with `noise_cross`), and the server averages
/// every copy.
pub fn local_sgda_mclient(
    p: &FederatedProblem,
    x0: &JointPoint,
    gamma: f64,
    k: usize,
    rounds: usize,
) -> Result<RunTrace> {
    let [du, dv] = p.dims();
    x0.check_dims(&[du, dv])?;
    let global = p.global();
    let saddle = p.global_saddle()?;
    let m = p.num_clients();
    let mut x = x0.clone();
    let mut records = Vec::with_capacity(rounds);
    let mut draws = DrawCounter(0);
    let mut oracle_calls = 0usize;

    for round in 1..=rounds {
        let mut u_sum = DVector::zeros(du);
        let mut v_sum = DVector::zeros(dv);
        // side 0: u-owners, side 1: v-owners.
        for side in 0..2 {
            for client in &p.clients {
                let mut copy = x.clone();
                for step in 0..k {
                    let (sigma_u, sigma_v) = if side == 0 {
                        (p.noise_own, p.noise_cross)
                    } else {
                        (p.noise_cross, p.noise_own)
                    };
                    let eta_u = iso_noise(du, sigma_u, p.seed, p.stream_id, draws.next());
                    let eta_v = iso_noise(dv, sigma_v, p.seed, p.stream_id, draws.next());
                    let mut field = client.field(&copy);
                    *field.block_mut(0) += eta_u;
                    *field.block_mut(1) += eta_v;
                    copy.axpy(-gamma, &field);
                    if !copy.is_finite() {
                        return Err(diverged(records, round, step));
                    }
                }
                u_sum += copy.u();
                v_sum += copy.v();
            }
        }
        x = JointPoint::new(vec![u_sum / (2 * m) as f64, v_sum / (2 * m) as f64]);
        oracle_calls += 4 * m * k;
        record_round(&mut records, round, &x, &global, &saddle, oracle_calls);
    }
    Ok(RunTrace {
        records,
        status: RunStatus::BudgetExhausted,
    })
}

/// Single-problem local SGDA with one machine per player (eq. local-GDA
/// baseline): both machines evolve full copies of `game` with their own
/// unbalanced oracles, synchronized by averaging at round ends.
pub fn two_oracle_local_sgda<G: TwoPlayerGame + ?Sized>(
    game: &G,
    ns: &NormSpec,
    x0: &JointPoint,
    gamma: f64,
    k: usize,
    rounds: usize,
    noise: &NoiseModel,
) -> Result<RunTrace> {
    game.check_point(x0)?;
    let saddle = game.saddle();
    let mut x = x0.clone();
    let mut records = Vec::with_capacity(rounds);
    let mut draws = DrawCounter(0);
    let mut oracle_calls = 0usize;

    for round in 1..=rounds {
        let mut copy_u = x.clone();
        let mut copy_v = x.clone();
        for step in 0..k {
            for (copy, kind) in [
                (&mut copy_u, OracleKind::OwnerU),
                (&mut copy_v, OracleKind::OwnerV),
            ] {
                let mut field = operator_f(game, copy)?;
                let targets = noise.block_targets(ns, kind);
                for (block, &target) in targets.iter().enumerate() {
                    let draw = draws.next();
                    if target > 0.0 {
                        *field.block_mut(block) += noise.block_noise(ns, block, target, draw);
                    }
                }
                copy.axpy(-gamma, &ns.precondition(&field)?);
                if !copy.is_finite() {
                    return Err(diverged(records, round, step));
                }
            }
        }
        x = copy_u.add(&copy_v).scale(0.5);
        oracle_calls += 4 * k;
        let field = operator_f(game, &x)?;
        let grad_norm = ns.dual_norm(&field)?;
        let dist_sq = saddle
            .as_ref()
            .map(|s| ns.primal_norm_sq(&x.sub(s)).expect("dims checked"));
        records.push(RoundRecord {
            round,
            point: x.clone(),
            dist_sq,
            grad_norm,
            comm_rounds: round,
            oracle_calls,
        });
    }
    Ok(RunTrace {
        records,
        status: RunStatus::BudgetExhausted,
    })
}

/// CSV rows for federated traces; the two-player schema plus a client count.
pub fn trace_to_csv_with_clients(
    trace: &RunTrace,
    method: &str,
    k: usize,
    gamma: f64,
    seed: u64,
    clients: usize,
) -> String {
    let mut out = String::from(
        "method,K,R_index,gamma,seed,dist_sq,grad_norm,comm_rounds,oracle_calls,clients\n",
    );
    for rec in &trace.records {
        let dist = rec.dist_sq.map(|d| format!("{d:e}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{:e},{},{},{:e},{},{},{}\n",
            method,
            k,
            rec.round,
            gamma,
            seed,
            dist,
            rec.grad_norm,
            rec.comm_rounds,
            rec.oracle_calls,
            clients
        ));
    }
    out
}
