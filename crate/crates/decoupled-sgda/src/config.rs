//! JSON descriptions of games, norms, runs and sweeps.
//!
//! Matrices are dense row-major (`[[row0...], [row1...]]`). See the README
//! for worked examples of every schema.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{
    EigenSweepSpec, GhostCompareSpec, NoiseSweepSpec, ToyGanSweepSpec, TrajectorySpec,
};
use crate::federated::{FederatedProblem, QuadraticClient};
use crate::games::{QuadraticGame, ToyGanGame, TwoPlayerGame};
use crate::noise::NoiseModel;
use crate::norms::NormSpec;
use crate::nplayer::QuadraticNPlayer;
use crate::point::JointPoint;
use crate::solvers::{Method, RunConfig, StopRule};

/// Dense row-major matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDesc(pub Vec<Vec<f64>>);

impl MatrixDesc {
    pub fn to_matrix(&self, name: &str) -> Result<DMatrix<f64>> {
        let rows = self.0.len();
        if rows == 0 {
            return Err(Error::InvalidParameter {
                name: name.into(),
                message: "matrix has no rows".into(),
            });
        }
        let cols = self.0[0].len();
        if cols == 0 || self.0.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter {
                name: name.into(),
                message: "rows must be non-empty and of equal length".into(),
            });
        }
        Ok(DMatrix::from_fn(rows, cols, |i, j| self.0[i][j]))
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        Self(
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
                .collect(),
        )
    }
}

/// A two-player game description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GameDesc {
    Quadratic {
        a: MatrixDesc,
        b: MatrixDesc,
        c: MatrixDesc,
    },
    ToyGan {
        sigma: MatrixDesc,
        lambda1: f64,
        lambda2: f64,
    },
}

/// Either concrete game, behind one enum for the CLI.
pub enum BuiltGame {
    Quadratic(QuadraticGame),
    ToyGan(ToyGanGame),
}

impl BuiltGame {
    pub fn as_two_player(&self) -> &dyn crate::games::TwoPlayerGame {
        match self {
            BuiltGame::Quadratic(g) => g,
            BuiltGame::ToyGan(g) => g,
        }
    }

    pub fn quadratic(&self) -> Result<&QuadraticGame> {
        match self {
            BuiltGame::Quadratic(g) => Ok(g),
            BuiltGame::ToyGan(_) => Err(Error::Unsupported(
                "this operation needs a quadratic game".into(),
            )),
        }
    }
}

impl GameDesc {
    pub fn build(&self) -> Result<BuiltGame> {
        match self {
            GameDesc::Quadratic { a, b, c } => Ok(BuiltGame::Quadratic(QuadraticGame::new(
                a.to_matrix("A")?,
                b.to_matrix("B")?,
                c.to_matrix("C")?,
            )?)),
            GameDesc::ToyGan {
                sigma,
                lambda1,
                lambda2,
            } => Ok(BuiltGame::ToyGan(ToyGanGame::new(
                sigma.to_matrix("Sigma")?,
                *lambda1,
                *lambda2,
            )?)),
        }
    }
}

/// Norm weights; omitted block matrices default to the identity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormDesc {
    pub alphas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ps: Option<Vec<MatrixDesc>>,
}

impl NormDesc {
    pub fn build(&self, dims: &[usize]) -> Result<NormSpec> {
        match &self.ps {
            Some(ps) => {
                let mats = ps
                    .iter()
                    .enumerate()
                    .map(|(i, m)| m.to_matrix(&format!("P_{i}")))
                    .collect::<Result<Vec<_>>>()?;
                NormSpec::new(self.alphas.clone(), mats)
            }
            None => NormSpec::weighted_euclidean(self.alphas.clone(), dims),
        }
    }
}

/// Oracle noise description; all stds default to zero.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct NoiseDesc {
    #[serde(default)]
    pub sigma_uu: f64,
    #[serde(default)]
    pub sigma_uv: f64,
    #[serde(default)]
    pub sigma_vu: f64,
    #[serde(default)]
    pub sigma_vv: f64,
    #[serde(default)]
    pub sigma_bar: f64,
}

impl NoiseDesc {
    pub fn build(&self, seed: u64, stream: u64) -> Result<NoiseModel> {
        NoiseModel::new(
            self.sigma_uu,
            self.sigma_uv,
            self.sigma_vu,
            self.sigma_vv,
            self.sigma_bar,
            seed,
            stream,
        )
    }
}

/// One cross-coupling block of an N-player game.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossDesc {
    pub row: usize,
    pub col: usize,
    pub c: MatrixDesc,
}

/// Quadratic N-player game description: own blocks plus sparse couplings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NPlayerDesc {
    pub blocks: Vec<MatrixDesc>,
    #[serde(default)]
    pub cross: Vec<CrossDesc>,
}

impl NPlayerDesc {
    pub fn build(&self) -> Result<QuadraticNPlayer> {
        let own = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, m)| m.to_matrix(&format!("A_{i}")))
            .collect::<Result<Vec<_>>>()?;
        let n = own.len();
        let mut cross = vec![vec![None; n]; n];
        for cd in &self.cross {
            if cd.row >= n || cd.col >= n {
                return Err(Error::InvalidParameter {
                    name: format!("cross[{},{}]", cd.row, cd.col),
                    message: format!("player index out of range (N = {n})"),
                });
            }
            cross[cd.row][cd.col] = Some(cd.c.to_matrix(&format!("C_{}{}", cd.row, cd.col))?);
        }
        QuadraticNPlayer::new(own, cross)
    }
}

/// One federated client: a quadratic game plus optional linear terms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClientDesc {
    pub a: MatrixDesc,
    pub b: MatrixDesc,
    pub c: MatrixDesc,
    #[serde(default)]
    pub lin_u: Option<Vec<f64>>,
    #[serde(default)]
    pub lin_v: Option<Vec<f64>>,
}

/// Federated problem description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FederatedDesc {
    pub clients: Vec<ClientDesc>,
    #[serde(default)]
    pub noise_own: f64,
    #[serde(default)]
    pub noise_cross: f64,
}

impl FederatedDesc {
    pub fn build(&self, seed: u64, stream: u64) -> Result<FederatedProblem> {
        let clients = self
            .clients
            .iter()
            .map(|c| {
                let game = QuadraticGame::new(
                    c.a.to_matrix("A")?,
                    c.b.to_matrix("B")?,
                    c.c.to_matrix("C")?,
                )?;
                let [du, dv] = game.dims();
                QuadraticClient::new(
                    game,
                    DVector::from_vec(c.lin_u.clone().unwrap_or_else(|| vec![0.0; du])),
                    DVector::from_vec(c.lin_v.clone().unwrap_or_else(|| vec![0.0; dv])),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        FederatedProblem::new(clients, self.noise_own, self.noise_cross, seed, stream)
    }
}

/// Stop criterion description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopDesc {
    Distance(f64),
    GradNorm(f64),
}

impl StopDesc {
    pub fn build(&self) -> StopRule {
        match self {
            StopDesc::Distance(e) => StopRule::DistanceBelow(*e),
            StopDesc::GradNorm(e) => StopRule::GradNormBelow(*e),
        }
    }
}

/// A two-player run description for the `run` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoPlayerRunDesc {
    pub game: GameDesc,
    #[serde(default)]
    pub norms: Option<NormDesc>,
    pub method: Method,
    pub gamma: f64,
    #[serde(default = "one")]
    pub k: usize,
    pub rounds: usize,
    #[serde(default)]
    pub noise: Option<NoiseDesc>,
    /// Initial blocks; defaults to all-ones `u`, all-minus-ones `v`.
    #[serde(default)]
    pub init: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub stop: Option<StopDesc>,
}

fn one() -> usize {
    1
}

pub fn init_from_desc(init: &Option<Vec<Vec<f64>>>, dims: &[usize]) -> Result<JointPoint> {
    match init {
        Some(blocks) => {
            let p = JointPoint::new(
                blocks
                    .iter()
                    .map(|b| DVector::from_vec(b.clone()))
                    .collect(),
            );
            p.check_dims(dims)?;
            Ok(p)
        }
        None => Ok(JointPoint::new(
            dims.iter()
                .enumerate()
                .map(|(i, &d)| DVector::from_element(d, if i == 0 { 1.0 } else { -1.0 }))
                .collect(),
        )),
    }
}

impl TwoPlayerRunDesc {
    pub fn build(&self, seed: u64) -> Result<(BuiltGame, RunConfig)> {
        let game = self.game.build()?;
        let dims = match &game {
            BuiltGame::Quadratic(g) => g.dims(),
            BuiltGame::ToyGan(g) => g.dims(),
        };
        let norms = match &self.norms {
            Some(n) => n.build(&dims)?,
            None => NormSpec::euclidean(&dims),
        };
        let noise = self.noise.as_ref().map(|n| n.build(seed, 0)).transpose()?;
        let cfg = RunConfig {
            method: self.method,
            gamma: self.gamma,
            local_steps: self.k,
            rounds: self.rounds,
            norms,
            noise,
            init: init_from_desc(&self.init, &dims)?,
            stop: self.stop.as_ref().map(StopDesc::build),
        };
        Ok((game, cfg))
    }
}

/// An N-player run description (`run` with `setup = n_player`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NPlayerRunDesc {
    pub game: NPlayerDesc,
    #[serde(default)]
    pub alphas: Option<Vec<f64>>,
    pub gamma: f64,
    #[serde(default = "one")]
    pub k: usize,
    pub rounds: usize,
    #[serde(default)]
    pub sigma_bar: f64,
    #[serde(default)]
    pub init: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub stop: Option<StopDesc>,
}

/// A federated run description (`run` with `setup = federated`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FederatedRunDesc {
    pub problem: FederatedDesc,
    /// `federated_decoupled` or `local_sgda`.
    pub method: String,
    pub gamma: f64,
    #[serde(default = "one")]
    pub k: usize,
    pub rounds: usize,
    #[serde(default)]
    pub init: Option<Vec<Vec<f64>>>,
}

/// Top-level `run` configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "setup", rename_all = "snake_case")]
pub enum RunDesc {
    TwoPlayer(TwoPlayerRunDesc),
    NPlayer(NPlayerRunDesc),
    Federated(FederatedRunDesc),
}

/// Top-level `sweep` configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum SweepDesc {
    Trajectories(TrajectorySpec),
    EigenSweep(EigenSweepSpec),
    ToyganSweep(ToyGanSweepSpec),
    NoiseSweep(NoiseSweepSpec),
    GhostCompare(GhostCompareSpec),
}
