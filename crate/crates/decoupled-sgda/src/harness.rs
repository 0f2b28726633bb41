//! Experiment harness: rounds-to-accuracy measurement, stepsize grid search
//! and deterministic CSV emission.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::TwoPlayerGame;
use crate::solvers::{run, RunConfig, RunStatus, SolverError, StopRule};

/// Version tag carried in every CSV row.
pub const CSV_SCHEMA_VERSION: &str = "1";

/// Rounds evaluated per chunk between stall checks on noiseless runs.
const STALL_CHUNK: usize = 500;

/// Distances above this square are treated as divergence even while finite.
const EXPLOSION_DIST_SQ: f64 = 1e120;

/// Outcome of one rounds-to-accuracy measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CellOutcome {
    /// First 1-based round index whose end-of-round point met the target.
    Converged {
        rounds: usize,
    },
    /// Budget exhausted (or progress stalled) before reaching the target;
    /// reported as `rounds = budget` with the censored flag, never as a
    /// fake round count. Carries the best metric value reached so that
    /// best-effort stepsize selection stays possible.
    Censored {
        budget: usize,
        best: f64,
    },
    Diverged,
}

impl CellOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            CellOutcome::Converged { .. } => "converged",
            CellOutcome::Censored { .. } => "censored",
            CellOutcome::Diverged => "diverged",
        }
    }

    pub fn rounds(&self) -> Option<usize> {
        match self {
            CellOutcome::Converged { rounds } => Some(*rounds),
            _ => None,
        }
    }

    pub fn is_censored(&self) -> bool {
        matches!(self, CellOutcome::Censored { .. })
    }

    /// Round count as emitted to CSV: the budget for censored cells.
    pub fn reported_rounds(&self, budget: usize) -> usize {
        match self {
            CellOutcome::Converged { rounds } => *rounds,
            _ => budget,
        }
    }
}

/// Target metric for rounds-to-accuracy runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetMetric {
    /// `||x - x*|| <= eps`; needs a known equilibrium.
    Distance,
    /// `||F(x)||_* <= eps`.
    GradNorm,
}

/// First round at which the run meets `eps`, within `budget` rounds.
///
/// Noiseless runs are evaluated in chunks with a stall check: when a whole
/// chunk fails to improve on the previous chunk's best value, the cell is
/// censored early (linear round maps that have stopped improving will not
/// reach the target later). Noisy runs always consume the full budget.
pub fn rounds_to_epsilon<G: TwoPlayerGame + ?Sized>(
    game: &G,
    cfg: &RunConfig,
    metric: TargetMetric,
    eps: f64,
    budget: usize,
) -> Result<CellOutcome> {
    if eps <= 0.0 || eps.is_nan() {
        return Err(Error::InvalidParameter {
            name: "eps".into(),
            message: format!("accuracy target must be positive, got {eps}"),
        });
    }
    let stop = match metric {
        TargetMetric::Distance => StopRule::DistanceBelow(eps),
        TargetMetric::GradNorm => StopRule::GradNormBelow(eps),
    };
    let noisy = cfg.noise.as_ref().map(|n| !n.is_zero()).unwrap_or(false);
    // Chunking would reset the cross-round state these methods carry
    // (previous operator value, previous round start), so they run whole.
    let stateful = matches!(
        cfg.method,
        crate::solvers::Method::Ogda | crate::solvers::Method::Ghost
    );

    if noisy || stateful {
        let mut cfg = cfg.clone();
        cfg.rounds = budget;
        cfg.stop = Some(stop);
        return match run(game, &cfg) {
            Ok(trace) => Ok(match trace.status {
                RunStatus::Converged => CellOutcome::Converged {
                    rounds: trace.rounds_run(),
                },
                RunStatus::BudgetExhausted => CellOutcome::Censored {
                    budget,
                    best: best_metric(&trace, metric),
                },
            }),
            Err(SolverError::Diverged { .. }) => Ok(CellOutcome::Diverged),
            Err(SolverError::Config(e)) => Err(e),
        };
    }

    let mut done = 0usize;
    let mut x = cfg.init.clone();
    let mut prev_best = f64::INFINITY;
    while done < budget {
        let chunk = STALL_CHUNK.min(budget - done);
        let mut chunk_cfg = cfg.clone();
        chunk_cfg.init = x;
        chunk_cfg.rounds = chunk;
        chunk_cfg.stop = Some(stop);
        let trace = match run(game, &chunk_cfg) {
            Ok(t) => t,
            Err(SolverError::Diverged { .. }) => return Ok(CellOutcome::Diverged),
            Err(SolverError::Config(e)) => return Err(e),
        };
        if trace.status == RunStatus::Converged {
            return Ok(CellOutcome::Converged {
                rounds: done + trace.rounds_run(),
            });
        }
        let best = best_metric(&trace, metric);
        if best * best > EXPLOSION_DIST_SQ {
            return Ok(CellOutcome::Diverged);
        }
        if best >= prev_best {
            return Ok(CellOutcome::Censored { budget, best });
        }
        prev_best = best;
        x = trace.final_point().clone();
        done += chunk;
    }
    Ok(CellOutcome::Censored {
        budget,
        best: prev_best,
    })
}

/// Smallest target-metric value over a trace's rounds.
fn best_metric(trace: &crate::solvers::RunTrace, metric: TargetMetric) -> f64 {
    trace
        .records
        .iter()
        .map(|r| match metric {
            TargetMetric::Distance => r.dist_sq.unwrap_or(f64::INFINITY).sqrt(),
            TargetMetric::GradNorm => r.grad_norm,
        })
        .fold(f64::INFINITY, f64::min)
}

// ---------------------------------------------------------------------------
// Stepsize grids and grid search
// ---------------------------------------------------------------------------

/// A one-dimensional stepsize grid, uniformly or logarithmically spaced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub log_spaced: bool,
}

impl GammaGrid {
    pub fn validate(&self) -> crate::error::Result<()> {
        if self.points == 0 || self.lo <= 0.0 || self.hi < self.lo || !self.hi.is_finite() {
            return Err(Error::InvalidParameter {
                name: "gamma_grid".into(),
                message: format!(
                    "need points >= 1 and 0 < lo <= hi finite, got lo {}, hi {}, points {}",
                    self.lo, self.hi, self.points
                ),
            });
        }
        Ok(())
    }

    pub fn uniform(lo: f64, hi: f64, points: usize) -> Self {
        Self {
            lo,
            hi,
            points,
            log_spaced: false,
        }
    }

    pub fn log(lo: f64, hi: f64, points: usize) -> Self {
        Self {
            lo,
            hi,
            points,
            log_spaced: true,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        assert!(self.points >= 1 && self.lo > 0.0 && self.hi >= self.lo);
        if self.points == 1 {
            return vec![self.lo];
        }
        (0..self.points)
            .map(|i| {
                let t = i as f64 / (self.points - 1) as f64;
                if self.log_spaced {
                    self.lo * (self.hi / self.lo).powf(t)
                } else {
                    self.lo + (self.hi - self.lo) * t
                }
            })
            .collect()
    }
}

/// Winning stepsize of a grid search.
#[derive(Debug, Clone, Serialize)]
pub struct GridSearchResult {
    pub gamma: f64,
    pub outcome: CellOutcome,
}

/// Pick the stepsize with the fewest rounds to `eps`; ties break toward the
/// smaller stepsize and divergent cells are excluded. If nothing converges,
/// the censored stepsize that made the most progress (smallest best metric,
/// ties toward smaller gamma) is returned. Fails only when every stepsize
/// diverges.
pub fn grid_search_gamma<G: TwoPlayerGame + ?Sized>(
    game: &G,
    cfg_template: &RunConfig,
    grid: &[f64],
    metric: TargetMetric,
    eps: f64,
    budget: usize,
) -> Result<GridSearchResult> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "grid".into(),
            message: "stepsize grid is empty".into(),
        });
    }
    let mut gammas = grid.to_vec();
    gammas.sort_by(|a, b| a.partial_cmp(b).expect("finite stepsizes"));
    let mut best: Option<GridSearchResult> = None;
    let mut censored_fallback: Option<GridSearchResult> = None;
    for &gamma in &gammas {
        let mut cfg = cfg_template.clone();
        cfg.gamma = gamma;
        match rounds_to_epsilon(game, &cfg, metric, eps, budget)? {
            CellOutcome::Diverged => continue,
            outcome @ CellOutcome::Censored { best: reached, .. } => {
                let better = match &censored_fallback {
                    None => true,
                    Some(f) => match f.outcome {
                        CellOutcome::Censored { best: prev, .. } => reached < prev,
                        _ => false,
                    },
                };
                if better {
                    censored_fallback = Some(GridSearchResult { gamma, outcome });
                }
            }
            outcome @ CellOutcome::Converged { rounds } => {
                let better = match &best {
                    None => true,
                    Some(b) => rounds < b.outcome.rounds().expect("best converged"),
                };
                if better {
                    best = Some(GridSearchResult { gamma, outcome });
                }
            }
        }
    }
    best.or(censored_fallback)
        .ok_or(Error::AllStepsizesDiverged {
            cells: gammas.len(),
        })
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

/// Deterministic CSV builder; floats are rendered in scientific notation so
/// identical inputs produce byte-identical files.
#[derive(Debug, Clone)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    /// Header gains the leading `schema_version` column automatically.
    pub fn new(columns: &[&str]) -> Self {
        let mut header = vec!["schema_version".to_string()];
        header.extend(columns.iter().map(|c| c.to_string()));
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len() + 1, self.header.len(), "row arity mismatch");
        let mut row = vec![CSV_SCHEMA_VERSION.to_string()];
        row.extend(cells);
        self.rows.push(row);
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}
