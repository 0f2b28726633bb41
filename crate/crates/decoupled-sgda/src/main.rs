//! Thin command-line front end over the library. Configuration comes from
//! JSON files (schemas in the README); results go to stdout or `--out` as
//! CSV/JSON. Exit code 0 on success; failures print a JSON error object to
//! stderr and exit nonzero.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use decoupled_sgda::config::{BuiltGame, GameDesc, NormDesc, RunDesc, SweepDesc};
use decoupled_sgda::error::Error;
use decoupled_sgda::experiments::{
    eigen_sweep, eigen_sweep_csv, ghost_comparison, noise_sweep, noise_sweep_csv, toygan_sweep,
    toygan_sweep_csv, trajectory_experiment,
};
use decoupled_sgda::federated::{
    federated_decoupled_run, local_sgda_mclient, trace_to_csv_with_clients,
};
use decoupled_sgda::harness::{fmt_f64, CsvTable};
use decoupled_sgda::nplayer::decoupled_sgd_run;
use decoupled_sgda::solvers::{run as run_two_player, Method, RunConfig};
use decoupled_sgda::spectra;
use decoupled_sgda::{closed_form, config, NoiseModel, NormSpec, TwoPlayerGame};

#[derive(Parser)]
#[command(
    name = "dsgda",
    about = "Decoupled SGDA solvers and regime analysis for games with intermittent strategy communication"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one run described by a JSON config and emit its round trace.
    Run {
        /// JSON run description (two-player, N-player or federated).
        #[arg(long)]
        config: PathBuf,
        /// Write the trace CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for the oracle noise streams.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Expected player count; rejects configs with a different one.
        #[arg(long)]
        players: Option<usize>,
    },
    /// Execute a sweep experiment described by a JSON spec and emit CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the spec's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the spec's trial count (where the experiment has one).
        #[arg(long)]
        trials: Option<usize>,
        /// Run sweep cells on all cores.
        #[arg(long, default_value_t = false)]
        parallel: bool,
    },
    /// Classify a quadratic game's coupling regime (JSON report).
    Classify {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        norms: Option<PathBuf>,
    },
    /// Evaluate the convergence bounds for a quadratic game (JSON report).
    Bound {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        norms: Option<PathBuf>,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        rounds: usize,
        /// Initial distance to the saddle.
        #[arg(long, default_value_t = 1.0)]
        dist: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma_bar: f64,
    },
    /// Evaluate the communication-complexity comparison (JSON).
    ComplexityTable {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        norms: Option<PathBuf>,
        #[arg(long)]
        epsilon: f64,
    },
    /// Check the loop engine against the closed-form round iterates.
    VerifyClosedForm {
        #[arg(long, default_value_t = 500)]
        games: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(Error::from),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_game(path: &PathBuf, norms: &Option<PathBuf>) -> Result<(BuiltGame, NormSpec), Error> {
    let desc: GameDesc = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let game = desc.build()?;
    let dims = match &game {
        BuiltGame::Quadratic(g) => g.dims(),
        BuiltGame::ToyGan(g) => g.dims(),
    };
    let ns = match norms {
        Some(p) => {
            let nd: NormDesc = serde_json::from_str(&std::fs::read_to_string(p)?)?;
            nd.build(&dims)?
        }
        None => NormSpec::euclidean(&dims),
    };
    Ok((game, ns))
}

fn run_command(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Run {
            config,
            out,
            seed,
            players,
        } => {
            let desc: RunDesc = serde_json::from_str(&std::fs::read_to_string(&config)?)?;
            let check_players = |found: usize| -> Result<(), Error> {
                match players {
                    Some(want) if want != found => Err(Error::InvalidParameter {
                        name: "players".into(),
                        message: format!(
                            "config describes {found} players, --players asked for {want}"
                        ),
                    }),
                    _ => Ok(()),
                }
            };
            match desc {
                RunDesc::TwoPlayer(d) => {
                    check_players(2)?;
                    let (game, cfg) = d.build(seed)?;
                    let trace = run_two_player(game.as_two_player(), &cfg).map_err(Error::from)?;
                    let csv = trace.to_csv(cfg.method, cfg.effective_k(), cfg.gamma, seed);
                    emit(&out, &csv)
                }
                RunDesc::NPlayer(d) => {
                    let game = d.game.build()?;
                    use decoupled_sgda::nplayer::NPlayerGame;
                    check_players(game.num_players())?;
                    let dims = game.block_dims();
                    let norms = match &d.alphas {
                        Some(a) => NormSpec::weighted_euclidean(a.clone(), &dims)?,
                        None => NormSpec::euclidean(&dims),
                    };
                    let cfg = RunConfig {
                        method: Method::Decoupled,
                        gamma: d.gamma,
                        local_steps: d.k,
                        rounds: d.rounds,
                        norms,
                        noise: (d.sigma_bar > 0.0)
                            .then(|| NoiseModel::decoupled_only(d.sigma_bar, seed, 0))
                            .transpose()?,
                        init: config::init_from_desc(&d.init, &dims)?,
                        stop: d.stop.as_ref().map(|s| s.build()),
                    };
                    let trace = decoupled_sgd_run(&game, &cfg)?;
                    let csv = trace.to_csv(Method::Decoupled, d.k, d.gamma, seed);
                    emit(&out, &csv)
                }
                RunDesc::Federated(d) => {
                    check_players(2)?;
                    let p = d.problem.build(seed, 0)?;
                    let init = config::init_from_desc(&d.init, &p.dims())?;
                    let trace = match d.method.as_str() {
                        "federated_decoupled" => {
                            federated_decoupled_run(&p, &init, d.gamma, d.k, d.rounds)?
                        }
                        "local_sgda" => local_sgda_mclient(&p, &init, d.gamma, d.k, d.rounds)?,
                        other => {
                            return Err(Error::InvalidParameter {
                                name: "method".into(),
                                message: format!(
                                    "unknown federated method `{other}` (expected federated_decoupled or local_sgda)"
                                ),
                            })
                        }
                    };
                    let csv = trace_to_csv_with_clients(
                        &trace,
                        &d.method,
                        d.k,
                        d.gamma,
                        seed,
                        p.num_clients(),
                    );
                    emit(&out, &csv)
                }
            }
        }
        Command::Sweep {
            config,
            out,
            seed,
            trials,
            parallel,
        } => {
            let desc: SweepDesc = serde_json::from_str(&std::fs::read_to_string(&config)?)?;
            let csv: CsvTable = match desc {
                SweepDesc::Trajectories(mut spec) => {
                    if let Some(s) = seed {
                        spec.seed = s;
                    }
                    trajectory_experiment(&spec)?
                }
                SweepDesc::EigenSweep(mut spec) => {
                    if let Some(s) = seed {
                        spec.seed = s;
                    }
                    let rows = eigen_sweep(&spec, parallel)?;
                    eigen_sweep_csv(&rows, &spec)
                }
                SweepDesc::ToyganSweep(mut spec) => {
                    if let Some(s) = seed {
                        spec.seed = s;
                    }
                    if let Some(t) = trials {
                        spec.trials = t;
                    }
                    let rows = toygan_sweep(&spec, parallel)?;
                    toygan_sweep_csv(&rows, &spec)
                }
                SweepDesc::NoiseSweep(mut spec) => {
                    if let Some(s) = seed {
                        spec.seed = s;
                    }
                    if let Some(t) = trials {
                        spec.trials = t;
                    }
                    let rows = noise_sweep(&spec, parallel)?;
                    noise_sweep_csv(&rows, &spec)
                }
                SweepDesc::GhostCompare(spec) => {
                    let rows = ghost_comparison(&spec)?;
                    let mut table = CsvTable::new(&[
                        "experiment",
                        "method",
                        "K",
                        "gamma",
                        "seed",
                        "c",
                        "metric_name",
                        "metric_value",
                        "censored",
                    ]);
                    for r in &rows {
                        for (method, outcome) in [("decoupled", &r.plain), ("ghost", &r.ghost)] {
                            table.push(vec![
                                "ghost_compare".into(),
                                method.into(),
                                spec.k.to_string(),
                                fmt_f64(r.gamma),
                                "0".into(),
                                fmt_f64(r.c),
                                "rounds_to_eps".into(),
                                outcome.reported_rounds(spec.budget).to_string(),
                                outcome.is_censored().to_string(),
                            ]);
                        }
                    }
                    table
                }
            };
            emit(&out, &csv.render())
        }
        Command::Classify { game, norms } => {
            let (game, ns) = load_game(&game, &norms)?;
            let constants = spectra::analyze(game.quadratic()?, &ns)?;
            let report = spectra::classify(&constants);
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(())
        }
        Command::Bound {
            game,
            norms,
            gamma,
            k,
            rounds,
            dist,
            sigma_bar,
        } => {
            let (game, ns) = load_game(&game, &norms)?;
            let q = game.quadratic()?;
            let constants = spectra::analyze(q, &ns)?;
            let bound = spectra::theoretical_bound(&constants, rounds, k, gamma, dist, sigma_bar);
            let quad = closed_form::quadratic_rate_bound(q, &ns, gamma, k, rounds, dist)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "operator_bound": bound,
                    "quadratic_round_bound": quad,
                }))?
            );
            Ok(())
        }
        Command::ComplexityTable {
            game,
            norms,
            epsilon,
        } => {
            let (game, ns) = load_game(&game, &norms)?;
            let constants = spectra::analyze(game.quadratic()?, &ns)?;
            let table = spectra::complexity_table_row(&constants, epsilon)?;
            println!("{}", serde_json::to_string_pretty(&table)?);
            Ok(())
        }
        Command::VerifyClosedForm { games, seed } => {
            let report = closed_form::verify_equivalence(games, seed);
            println!("{}", serde_json::to_string_pretty(&report)?);
            if report.pass {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name: "closed_form".into(),
                    message: format!(
                        "max deviation {:.3e} above tolerance {:.1e}",
                        report.max_abs_error, report.tolerance
                    ),
                })
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_command(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = match &e {
                Error::Divergence { .. } => "divergence",
                Error::DimensionMismatch { .. } => "dimension_mismatch",
                Error::NotSymmetric { .. } | Error::NotPositiveDefinite { .. } => "bad_matrix",
                Error::AllStepsizesDiverged { .. } => "all_stepsizes_diverged",
                Error::InvalidParameter { .. } => "invalid_parameter",
                Error::Unsupported(_) => "unsupported",
                Error::Io(_) => "io",
                Error::Json(_) => "json",
            };
            eprintln!("{}", json!({ "error": e.to_string(), "kind": kind }));
            ExitCode::FAILURE
        }
    }
}
