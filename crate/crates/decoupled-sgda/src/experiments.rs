//! Desk-scale experiment protocols: trajectory traces, rounds-to-accuracy
//! sweeps over the coupling strength, lowest-gradient-norm sweeps for the
//! non-convex game and for unbalanced oracle noise, and the ghost-sequence
//! comparison.
//!
//! Every sweep is deterministic: cells draw their problem and noise from
//! streams keyed by the cell index, parallel and sequential execution yield
//! identical results, and outputs are sorted before emission.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::games::{QuadraticGame, ToyGanGame, TwoPlayerGame};
use crate::harness::{
    fmt_f64, grid_search_gamma, rounds_to_epsilon, CellOutcome, CsvTable, GammaGrid, TargetMetric,
};
use crate::noise::NoiseModel;
use crate::norms::NormSpec;
use crate::point::JointPoint;
use crate::rng::stream_rng;
use crate::sample;
use crate::solvers::{run, Method, RunConfig, SolverError};
use crate::spectra;

/// Regularization strength at which the GAN-like game enters the
/// weakly-coupled-like regime; emitted with the sweep as a plot marker.
pub const TOYGAN_WEAK_REGIME_LAMBDA: f64 = 50.0;

/// Stream id offsets per experiment family, so their draws never collide.
const STREAM_EIGEN: u64 = 2 << 20;
const STREAM_TOYGAN: u64 = 3 << 20;
const STREAM_NOISE: u64 = 4 << 20;

fn map_cells<T: Send>(
    cells: usize,
    parallel: bool,
    f: impl Fn(usize) -> T + Send + Sync,
) -> Vec<T> {
    if parallel {
        (0..cells).into_par_iter().map(f).collect()
    } else {
        (0..cells).map(f).collect()
    }
}

fn log_spaced(lo: f64, hi: f64, cells: usize) -> Vec<f64> {
    assert!(cells >= 1 && lo > 0.0);
    if cells == 1 {
        return vec![lo];
    }
    (0..cells)
        .map(|i| lo * (hi / lo).powf(i as f64 / (cells - 1) as f64))
        .collect()
}

fn validate_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(crate::error::Error::InvalidParameter {
            name: "trials".into(),
            message: "at least one trial is required".into(),
        });
    }
    Ok(())
}

fn validate_cells(cells: usize) -> Result<()> {
    if cells == 0 {
        return Err(crate::error::Error::InvalidParameter {
            name: "cells".into(),
            message: "at least one sweep cell is required".into(),
        });
    }
    Ok(())
}

fn lin_spaced(lo: f64, hi: f64, cells: usize) -> Vec<f64> {
    assert!(cells >= 1);
    if cells == 1 {
        return vec![lo];
    }
    (0..cells)
        .map(|i| lo + (hi - lo) * i as f64 / (cells - 1) as f64)
        .collect()
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

/// Trajectory protocol on the scalar game family: a fixed round budget, a
/// uniform stepsize grid searched per cell, per-step points and per-round
/// distances emitted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectorySpec {
    /// Scalar games `(a, b, c)`.
    pub games: Vec<(f64, f64, f64)>,
    pub k_values: Vec<usize>,
    pub rounds: usize,
    pub gamma_grid: GammaGrid,
    pub init: (f64, f64),
    pub seed: u64,
}

impl Default for TrajectorySpec {
    fn default() -> Self {
        Self {
            games: vec![
                (1.0, 10.0, 10.0),
                (1.0, 10.0, 3.5),
                (1.0, 10.0, 2.7),
                (1.0, 10.0, 0.0),
            ],
            k_values: vec![1, 2, 5],
            rounds: 31,
            gamma_grid: GammaGrid::uniform(0.0001, 0.1, 25),
            init: (1.0, -1.0),
            seed: 1,
        }
    }
}

/// Noiseless decoupled local steps with the opponent frozen at `x0`,
/// recording the point after every local step.
pub fn decoupled_steps<G: TwoPlayerGame + ?Sized>(
    game: &G,
    ns: &NormSpec,
    x0: &JointPoint,
    gamma: f64,
    k: usize,
) -> Vec<JointPoint> {
    let mut out = Vec::with_capacity(k);
    let mut x = x0.clone();
    for _ in 0..k {
        let g_u = game.grad_u(x.u(), x0.v());
        let g_v = -game.grad_v(x0.u(), x.v());
        let du = ns.block(0).precondition(&g_u);
        let dv = ns.block(1).precondition(&g_v);
        x.block_mut(0).axpy(-gamma, &du, 1.0);
        x.block_mut(1).axpy(-gamma, &dv, 1.0);
        out.push(x.clone());
    }
    out
}

/// Run the trajectory protocol. Rows:
/// `experiment,method,K,gamma,seed,a,b,c,round,step,metric_name,metric_value,censored`
/// with `u`/`v` rows per local step and one `dist` row per round (step = K).
pub fn trajectory_experiment(spec: &TrajectorySpec) -> Result<CsvTable> {
    spec.gamma_grid.validate()?;
    let ns = NormSpec::euclidean(&[1, 1]);
    let init = JointPoint::scalar(spec.init.0, spec.init.1);
    let grid = spec.gamma_grid.values();
    let mut table = CsvTable::new(&[
        "experiment",
        "method",
        "K",
        "gamma",
        "seed",
        "a",
        "b",
        "c",
        "round",
        "step",
        "metric_name",
        "metric_value",
        "censored",
    ]);

    for &(a, b, c) in &spec.games {
        let game = QuadraticGame::scalar(a, b, c)?;
        for &k in &spec.k_values {
            let template = RunConfig {
                method: Method::Decoupled,
                gamma: grid[0],
                local_steps: k,
                rounds: spec.rounds,
                norms: ns.clone(),
                noise: None,
                init: init.clone(),
                stop: None,
            };
            // Best stepsize: fewest rounds to a deep target within the round
            // budget, ties toward smaller gamma; censored cells fall back to
            // the smallest stable stepsize.
            let search = grid_search_gamma(
                &game,
                &template,
                &grid,
                TargetMetric::Distance,
                1e-9,
                spec.rounds,
            )?;
            let gamma = search.gamma;
            let censored = search.outcome.is_censored();

            let mut x = init.clone();
            for round in 1..=spec.rounds {
                let steps = decoupled_steps(&game, &ns, &x, gamma, k);
                for (t, p) in steps.iter().enumerate() {
                    for (name, val) in [("u", p.u()[0]), ("v", p.v()[0])] {
                        table.push(vec![
                            "trajectories".into(),
                            "decoupled".into(),
                            k.to_string(),
                            fmt_f64(gamma),
                            spec.seed.to_string(),
                            fmt_f64(a),
                            fmt_f64(b),
                            fmt_f64(c),
                            round.to_string(),
                            (t + 1).to_string(),
                            name.into(),
                            fmt_f64(val),
                            censored.to_string(),
                        ]);
                    }
                }
                x = steps.last().cloned().unwrap_or_else(|| x.clone());
                let dist = ns.primal_norm(&x)?;
                table.push(vec![
                    "trajectories".into(),
                    "decoupled".into(),
                    k.to_string(),
                    fmt_f64(gamma),
                    spec.seed.to_string(),
                    fmt_f64(a),
                    fmt_f64(b),
                    fmt_f64(c),
                    round.to_string(),
                    k.to_string(),
                    "dist".into(),
                    fmt_f64(dist),
                    censored.to_string(),
                ]);
            }
        }
    }
    Ok(table)
}

// ---------------------------------------------------------------------------
// Coupling-strength sweep (rounds to accuracy)
// ---------------------------------------------------------------------------

/// Rounds-to-accuracy sweep over the coupling spectral norm, on random SPD
/// games regenerated per cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenSweepSpec {
    pub cells: usize,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub dim_u: usize,
    pub dim_v: usize,
    /// Eigenvalue range of the random SPD own blocks.
    pub eig_lo: f64,
    pub eig_hi: f64,
    pub methods: Vec<Method>,
    /// Local-step counts for the decoupled method (baselines always run 1).
    pub k_values: Vec<usize>,
    pub gamma_grid: GammaGrid,
    pub epsilon: f64,
    pub budget: usize,
    pub seed: u64,
}

impl Default for EigenSweepSpec {
    fn default() -> Self {
        Self {
            cells: 20,
            lambda_lo: 10f64.powf(-1.5),
            lambda_hi: 10f64.powf(1.5),
            dim_u: 3,
            dim_v: 3,
            eig_lo: 0.5,
            eig_hi: 5.0,
            methods: vec![
                Method::Gda,
                Method::Decoupled,
                Method::Eg,
                Method::Ogda,
                Method::AltGda,
            ],
            k_values: vec![1, 2, 5, 10, 50],
            gamma_grid: GammaGrid::log(1e-4, 1.0, 25),
            epsilon: 1e-6,
            budget: 100_000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenCellRow {
    pub cell: usize,
    pub lambda_max: f64,
    pub kappa_c: f64,
    pub method: Method,
    pub k: usize,
    pub gamma: f64,
    pub outcome: CellOutcome,
}

/// Run the sweep; one row per (cell, method, K).
pub fn eigen_sweep(spec: &EigenSweepSpec, parallel: bool) -> Result<Vec<EigenCellRow>> {
    validate_cells(spec.cells)?;
    spec.gamma_grid.validate()?;
    let lambdas = log_spaced(spec.lambda_lo, spec.lambda_hi, spec.cells);
    let dims = [spec.dim_u, spec.dim_v];
    let ns = NormSpec::euclidean(&dims);
    let grid = spec.gamma_grid.values();

    let per_cell = map_cells(spec.cells, parallel, |cell| -> Result<Vec<EigenCellRow>> {
        let mut rng = stream_rng(spec.seed, STREAM_EIGEN + cell as u64, 0);
        let game = sample::random_quadratic_game(
            spec.dim_u,
            spec.dim_v,
            spec.eig_lo,
            spec.eig_hi,
            lambdas[cell],
            &mut rng,
        );
        let init = sample::random_unit_point(&dims, &mut rng);
        let kappa_c = spectra::analyze(&game, &ns)?.kappa_c;
        let mut rows = Vec::new();
        for &method in &spec.methods {
            let ks: &[usize] = if method.is_local_update() {
                &spec.k_values
            } else {
                &[1]
            };
            for &k in ks {
                let template = RunConfig {
                    method,
                    gamma: grid[0],
                    local_steps: k,
                    rounds: spec.budget,
                    norms: ns.clone(),
                    noise: None,
                    init: init.clone(),
                    stop: None,
                };
                // A cell whose whole grid diverges is a result, not a sweep
                // failure; record it with the smallest stepsize tried.
                let search = match grid_search_gamma(
                    &game,
                    &template,
                    &grid,
                    TargetMetric::Distance,
                    spec.epsilon,
                    spec.budget,
                ) {
                    Ok(s) => s,
                    Err(crate::error::Error::AllStepsizesDiverged { .. }) => {
                        crate::harness::GridSearchResult {
                            gamma: grid[0],
                            outcome: CellOutcome::Diverged,
                        }
                    }
                    Err(e) => return Err(e),
                };
                rows.push(EigenCellRow {
                    cell,
                    lambda_max: lambdas[cell],
                    kappa_c,
                    method,
                    k,
                    gamma: search.gamma,
                    outcome: search.outcome,
                });
            }
        }
        Ok(rows)
    });

    let mut rows = Vec::new();
    for cell_rows in per_cell {
        rows.extend(cell_rows?);
    }
    Ok(rows)
}

pub fn eigen_sweep_csv(rows: &[EigenCellRow], spec: &EigenSweepSpec) -> CsvTable {
    let mut table = CsvTable::new(&[
        "experiment",
        "method",
        "K",
        "gamma",
        "seed",
        "cell",
        "lambda_max_c",
        "kappa_c",
        "outcome",
        "metric_name",
        "metric_value",
        "censored",
    ]);
    for r in rows {
        table.push(vec![
            "eigen_sweep".into(),
            r.method.name().into(),
            r.k.to_string(),
            fmt_f64(r.gamma),
            spec.seed.to_string(),
            r.cell.to_string(),
            fmt_f64(r.lambda_max),
            fmt_f64(r.kappa_c),
            r.outcome.label().into(),
            "rounds_to_eps".into(),
            r.outcome.reported_rounds(spec.budget).to_string(),
            (!matches!(r.outcome, CellOutcome::Converged { .. })).to_string(),
        ]);
    }
    table
}

// ---------------------------------------------------------------------------
// Non-convex (GAN-like) sweep
// ---------------------------------------------------------------------------

/// Lowest-gradient-norm sweep over the regularization strength of the
/// GAN-like game, with stochastic decoupled oracles.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToyGanSweepSpec {
    pub cells: usize,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    /// Generator dimension; the discriminator block has m^2 coordinates.
    pub m: usize,
    pub k_values: Vec<usize>,
    pub rounds: usize,
    pub trials: usize,
    pub sigma_bar: f64,
    pub gamma_grid: GammaGrid,
    pub seed: u64,
}

impl Default for ToyGanSweepSpec {
    fn default() -> Self {
        Self {
            cells: 16,
            lambda_lo: 10f64.powf(-4.5),
            lambda_hi: 1e3,
            m: 2,
            k_values: (1..=5).collect(),
            rounds: 100,
            trials: 5,
            sigma_bar: 1.0,
            gamma_grid: GammaGrid::log(1e-4, 1e-1, 10),
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ToyGanCellRow {
    pub cell: usize,
    pub lambda: f64,
    pub k: usize,
    pub gamma: f64,
    /// Mean over trials of the lowest `||F||_*` reached within the budget.
    pub mean_min_grad: f64,
}

fn min_grad_of_run<G: TwoPlayerGame + ?Sized>(game: &G, cfg: &RunConfig) -> f64 {
    match run(game, cfg) {
        Ok(trace) => trace
            .records
            .iter()
            .map(|r| r.grad_norm)
            .fold(f64::INFINITY, f64::min),
        Err(SolverError::Diverged { partial, .. }) => partial
            .records
            .iter()
            .map(|r| r.grad_norm)
            .fold(f64::INFINITY, f64::min),
        Err(SolverError::Config(_)) => f64::INFINITY,
    }
}

/// Run the sweep; one row per (cell, K) at the per-cell best stepsize
/// (lowest mean metric, ties toward smaller gamma).
pub fn toygan_sweep(spec: &ToyGanSweepSpec, parallel: bool) -> Result<Vec<ToyGanCellRow>> {
    validate_cells(spec.cells)?;
    validate_trials(spec.trials)?;
    spec.gamma_grid.validate()?;
    let lambdas = log_spaced(spec.lambda_lo, spec.lambda_hi, spec.cells);
    let dims = [spec.m, spec.m * spec.m];
    let ns = NormSpec::euclidean(&dims);
    let grid = spec.gamma_grid.values();
    // One covariance for the whole sweep.
    let sigma = {
        let mut rng = stream_rng(spec.seed, STREAM_TOYGAN, 0);
        sample::random_spd(spec.m, 0.5, 2.0, &mut rng)
    };

    let per_cell = map_cells(spec.cells, parallel, |cell| -> Result<Vec<ToyGanCellRow>> {
        let lambda = lambdas[cell];
        let game = ToyGanGame::new(sigma.clone(), lambda, lambda)?;
        let mut cell_rng = stream_rng(spec.seed, STREAM_TOYGAN + 1 + cell as u64, 0);
        let init = sample::random_unit_point(&dims, &mut cell_rng);
        let mut rows = Vec::new();
        for (ki, &k) in spec.k_values.iter().enumerate() {
            let mut best: Option<(f64, f64)> = None; // (gamma, metric)
            for &gamma in &grid {
                let mut total = 0.0;
                for trial in 0..spec.trials {
                    let stream = STREAM_TOYGAN
                        + 1000
                        + (cell as u64) * 1024
                        + (ki as u64) * 64
                        + trial as u64;
                    let cfg = RunConfig {
                        method: Method::Decoupled,
                        gamma,
                        local_steps: k,
                        rounds: spec.rounds,
                        norms: ns.clone(),
                        noise: Some(
                            NoiseModel::decoupled_only(spec.sigma_bar, spec.seed, stream)
                                .expect("nonnegative std"),
                        ),
                        init: init.clone(),
                        stop: None,
                    };
                    total += min_grad_of_run(&game, &cfg);
                }
                let metric = total / spec.trials as f64;
                let better = match best {
                    None => metric.is_finite(),
                    Some((_, m)) => metric < m,
                };
                if better {
                    best = Some((gamma, metric));
                }
            }
            let (gamma, metric) = best.unwrap_or((grid[0], f64::INFINITY));
            rows.push(ToyGanCellRow {
                cell,
                lambda,
                k,
                gamma,
                mean_min_grad: metric,
            });
        }
        Ok(rows)
    });

    let mut rows = Vec::new();
    for cell_rows in per_cell {
        rows.extend(cell_rows?);
    }
    Ok(rows)
}

pub fn toygan_sweep_csv(rows: &[ToyGanCellRow], spec: &ToyGanSweepSpec) -> CsvTable {
    let mut table = CsvTable::new(&[
        "experiment",
        "method",
        "K",
        "gamma",
        "seed",
        "cell",
        "lambda",
        "weak_regime",
        "metric_name",
        "metric_value",
        "censored",
    ]);
    for r in rows {
        table.push(vec![
            "toygan_sweep".into(),
            "decoupled".into(),
            r.k.to_string(),
            fmt_f64(r.gamma),
            spec.seed.to_string(),
            r.cell.to_string(),
            fmt_f64(r.lambda),
            (r.lambda >= TOYGAN_WEAK_REGIME_LAMBDA).to_string(),
            "min_grad_norm".into(),
            fmt_f64(r.mean_min_grad),
            (!r.mean_min_grad.is_finite()).to_string(),
        ]);
    }
    table
}

// ---------------------------------------------------------------------------
// Unbalanced-noise sweep
// ---------------------------------------------------------------------------

/// Which quantity the noise sweep varies.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseProtocol {
    /// Vary the coupling norm with fixed unbalanced variances.
    CouplingNorm {
        lo: f64,
        hi: f64,
        cells: usize,
        off_diag_sigma2: f64,
    },
    /// Vary the off-diagonal variance linearly with a fixed game.
    OffDiagonal {
        lo: f64,
        hi: f64,
        cells: usize,
        c_norm: f64,
    },
}

/// Lowest-gradient-norm comparison of the decoupled method against the
/// two-oracle local SGDA baseline under unbalanced oracle noise.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseSweepSpec {
    pub protocol: NoiseProtocol,
    /// Per-block dimension.
    pub dim: usize,
    pub eig_lo: f64,
    pub eig_hi: f64,
    /// Own-block variance (std squared), constant across the sweep.
    pub diag_sigma2: f64,
    pub k: usize,
    pub rounds: usize,
    pub trials: usize,
    pub gamma: f64,
    pub seed: u64,
}

impl Default for NoiseSweepSpec {
    fn default() -> Self {
        Self {
            protocol: NoiseProtocol::OffDiagonal {
                lo: 1.0,
                hi: 10.0,
                cells: 10,
                c_norm: 1.0,
            },
            dim: 4,
            eig_lo: 0.5,
            eig_hi: 2.0,
            diag_sigma2: 1.0,
            k: 40,
            rounds: 100,
            trials: 5,
            gamma: 0.008,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NoiseCellRow {
    pub cell: usize,
    /// The swept parameter: coupling norm or off-diagonal variance.
    pub cell_param: f64,
    pub method: &'static str,
    pub mean_min_grad: f64,
}

/// Run the sweep; two rows (decoupled, local SGDA) per cell.
pub fn noise_sweep(spec: &NoiseSweepSpec, parallel: bool) -> Result<Vec<NoiseCellRow>> {
    validate_trials(spec.trials)?;
    match spec.protocol {
        NoiseProtocol::CouplingNorm { cells, .. } | NoiseProtocol::OffDiagonal { cells, .. } => {
            validate_cells(cells)?
        }
    }
    let dims = [spec.dim, spec.dim];
    let ns = NormSpec::euclidean(&dims);
    let (params, cells) = match &spec.protocol {
        NoiseProtocol::CouplingNorm { lo, hi, cells, .. } => (log_spaced(*lo, *hi, *cells), *cells),
        NoiseProtocol::OffDiagonal { lo, hi, cells, .. } => (lin_spaced(*lo, *hi, *cells), *cells),
    };

    let per_cell = map_cells(cells, parallel, |cell| -> Result<Vec<NoiseCellRow>> {
        let (game, off_sigma2) = match &spec.protocol {
            NoiseProtocol::CouplingNorm {
                off_diag_sigma2, ..
            } => {
                let mut rng = stream_rng(spec.seed, STREAM_NOISE + cell as u64, 0);
                (
                    sample::random_quadratic_game(
                        spec.dim,
                        spec.dim,
                        spec.eig_lo,
                        spec.eig_hi,
                        params[cell],
                        &mut rng,
                    ),
                    *off_diag_sigma2,
                )
            }
            NoiseProtocol::OffDiagonal { c_norm, .. } => {
                // Same game in every cell; only the variance moves.
                let mut rng = stream_rng(spec.seed, STREAM_NOISE, 0);
                (
                    sample::random_quadratic_game(
                        spec.dim,
                        spec.dim,
                        spec.eig_lo,
                        spec.eig_hi,
                        *c_norm,
                        &mut rng,
                    ),
                    params[cell],
                )
            }
        };
        let mut cell_rng = stream_rng(spec.seed, STREAM_NOISE + 500 + cell as u64, 0);
        let init = sample::random_unit_point(&dims, &mut cell_rng);

        let mut dec_total = 0.0;
        let mut loc_total = 0.0;
        for trial in 0..spec.trials {
            let base = STREAM_NOISE + 1000 + (cell as u64) * 64 + (trial as u64) * 2;
            let noise = NoiseModel::unbalanced(
                spec.diag_sigma2.sqrt(),
                off_sigma2.sqrt(),
                spec.seed,
                base,
            )?;
            let cfg = RunConfig {
                method: Method::Decoupled,
                gamma: spec.gamma,
                local_steps: spec.k,
                rounds: spec.rounds,
                norms: ns.clone(),
                noise: Some(noise),
                init: init.clone(),
                stop: None,
            };
            dec_total += min_grad_of_run(&game, &cfg);

            let noise = NoiseModel::unbalanced(
                spec.diag_sigma2.sqrt(),
                off_sigma2.sqrt(),
                spec.seed,
                base + 1,
            )?;
            let local = crate::federated::two_oracle_local_sgda(
                &game,
                &ns,
                &init,
                spec.gamma,
                spec.k,
                spec.rounds,
                &noise,
            );
            loc_total += match local {
                Ok(trace) => trace
                    .records
                    .iter()
                    .map(|r| r.grad_norm)
                    .fold(f64::INFINITY, f64::min),
                Err(_) => f64::INFINITY,
            };
        }
        Ok(vec![
            NoiseCellRow {
                cell,
                cell_param: params[cell],
                method: "decoupled",
                mean_min_grad: dec_total / spec.trials as f64,
            },
            NoiseCellRow {
                cell,
                cell_param: params[cell],
                method: "local_sgda",
                mean_min_grad: loc_total / spec.trials as f64,
            },
        ])
    });

    let mut rows = Vec::new();
    for cell_rows in per_cell {
        rows.extend(cell_rows?);
    }
    Ok(rows)
}

pub fn noise_sweep_csv(rows: &[NoiseCellRow], spec: &NoiseSweepSpec) -> CsvTable {
    let param_name = match spec.protocol {
        NoiseProtocol::CouplingNorm { .. } => "lambda_max_c",
        NoiseProtocol::OffDiagonal { .. } => "off_diag_sigma2",
    };
    let mut table = CsvTable::new(&[
        "experiment",
        "method",
        "K",
        "gamma",
        "seed",
        "cell",
        "param_name",
        "param_value",
        "metric_name",
        "metric_value",
        "censored",
    ]);
    for r in rows {
        table.push(vec![
            "noise_sweep".into(),
            r.method.into(),
            spec.k.to_string(),
            fmt_f64(spec.gamma),
            spec.seed.to_string(),
            r.cell.to_string(),
            param_name.into(),
            fmt_f64(r.cell_param),
            "min_grad_norm".into(),
            fmt_f64(r.mean_min_grad),
            (!r.mean_min_grad.is_finite()).to_string(),
        ]);
    }
    table
}

// ---------------------------------------------------------------------------
// Ghost comparison
// ---------------------------------------------------------------------------

/// Rounds-to-accuracy of the ghost extrapolation against plain decoupled
/// rounds on the scalar family with coupling `c`, at the stepsize that is
/// best for the plain method.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GhostCompareSpec {
    pub a: f64,
    pub b: f64,
    pub c_values: Vec<f64>,
    pub k: usize,
    pub gamma_grid: GammaGrid,
    pub epsilon: f64,
    pub budget: usize,
}

impl Default for GhostCompareSpec {
    fn default() -> Self {
        Self {
            a: 1.0,
            b: 1.0,
            c_values: vec![25.0, 15.0, 5.0, 0.1],
            k: 5,
            gamma_grid: GammaGrid::log(1e-5, 0.5, 40),
            epsilon: 1e-6,
            budget: 200_000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GhostCompareRow {
    pub c: f64,
    pub gamma: f64,
    pub plain: CellOutcome,
    pub ghost: CellOutcome,
}

pub fn ghost_comparison(spec: &GhostCompareSpec) -> Result<Vec<GhostCompareRow>> {
    spec.gamma_grid.validate()?;
    let ns = NormSpec::euclidean(&[1, 1]);
    let init = JointPoint::scalar(1.0, -1.0);
    let mut rows = Vec::new();
    for &c in &spec.c_values {
        let game = QuadraticGame::scalar(spec.a, spec.b, c)?;
        let template = RunConfig {
            method: Method::Decoupled,
            gamma: 0.1,
            local_steps: spec.k,
            rounds: spec.budget,
            norms: ns.clone(),
            noise: None,
            init: init.clone(),
            stop: None,
        };
        let search = grid_search_gamma(
            &game,
            &template,
            &spec.gamma_grid.values(),
            TargetMetric::Distance,
            spec.epsilon,
            spec.budget,
        )?;
        let mut ghost_cfg = template.clone();
        ghost_cfg.method = Method::Ghost;
        ghost_cfg.gamma = search.gamma;
        let ghost = rounds_to_epsilon(
            &game,
            &ghost_cfg,
            TargetMetric::Distance,
            spec.epsilon,
            spec.budget,
        )?;
        rows.push(GhostCompareRow {
            c,
            gamma: search.gamma,
            plain: search.outcome,
            ghost,
        });
    }
    Ok(rows)
}
