//! Decoupled SGD on an N-player quadratic game: three players with weak
//! pairwise couplings each run local steps on their own block and exchange
//! strategies once per round.
//!
//!     cargo run --release --example n_player

use decoupled_sgda::nplayer::{decoupled_sgd_run, NPlayerGame, QuadraticNPlayer};
use decoupled_sgda::solvers::{Method, RunConfig, StopRule};
use decoupled_sgda::{JointPoint, NormSpec};
use nalgebra::DMatrix;

fn main() -> decoupled_sgda::Result<()> {
    let own = vec![
        DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]),
        DMatrix::from_row_slice(1, 1, &[0.8]),
        DMatrix::from_row_slice(2, 2, &[1.5, -0.2, -0.2, 1.2]),
    ];
    let mut cross = vec![vec![None; 3], vec![None; 3], vec![None; 3]];
    cross[0][1] = Some(DMatrix::from_row_slice(2, 1, &[0.1, -0.05]));
    cross[1][2] = Some(DMatrix::from_row_slice(1, 2, &[0.08, 0.02]));
    cross[2][0] = Some(DMatrix::from_row_slice(2, 2, &[0.05, 0.0, 0.0, 0.05]));
    let game = QuadraticNPlayer::new(own, cross)?;

    let dims = game.block_dims();
    let ns = NormSpec::euclidean(&dims);
    println!(
        "3-player game, blocks {:?}: mu_bar = {:.3}, L_c = {:.3}, kappa_c = {:.3}",
        dims,
        game.mu_bar(&ns),
        game.l_c(&ns),
        game.l_c(&ns) / game.mu_bar(&ns)
    );

    let cfg = RunConfig {
        method: Method::Decoupled,
        gamma: 0.2,
        local_steps: 10,
        rounds: 40,
        norms: ns,
        noise: None,
        init: JointPoint::new(
            dims.iter()
                .map(|&d| nalgebra::DVector::from_element(d, 1.0))
                .collect(),
        ),
        stop: Some(StopRule::DistanceBelow(1e-10)),
    };
    let trace = decoupled_sgd_run(&game, &cfg)?;
    for rec in trace.records.iter().step_by(4) {
        println!(
            "round {:>3}: dist {:.3e}  ||F||_* {:.3e}",
            rec.round,
            rec.dist_sq.unwrap().sqrt(),
            rec.grad_norm
        );
    }
    println!(
        "{:?} after {} rounds ({} oracle calls)",
        trace.status,
        trace.rounds_run(),
        trace.records.last().unwrap().oracle_calls
    );
    Ok(())
}
