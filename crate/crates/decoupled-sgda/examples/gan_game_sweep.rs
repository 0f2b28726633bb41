//! Lowest gradient norm reached in 100 communication rounds on the
//! non-convex GAN-like game, sweeping the regularization strength lambda
//! log-uniformly and the local steps K from 1 to 5, with stochastic
//! decoupled oracles (5 trials per cell).
//!
//! Large lambda plays the role of the weakly coupled regime: local steps
//! buy accuracy per round. The CSV carries a `weak_regime` marker column at
//! the lambda = 50 transition.
//!
//!     cargo run --release --example gan_game_sweep [out.csv]

use decoupled_sgda::experiments::{toygan_sweep, toygan_sweep_csv, ToyGanSweepSpec};

fn main() -> decoupled_sgda::Result<()> {
    let spec = ToyGanSweepSpec::default();
    let rows = toygan_sweep(&spec, true)?;
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "gan_game_sweep.csv".into());
    std::fs::write(&out, toygan_sweep_csv(&rows, &spec).render())?;

    println!(
        "{:>12} {:>4} {:>12} {:>10}",
        "lambda", "K", "min ||F||", "gamma"
    );
    for r in &rows {
        println!(
            "{:>12.5} {:>4} {:>12.6} {:>10.5}",
            r.lambda, r.k, r.mean_min_grad, r.gamma
        );
    }
    println!("full table in {out}");
    Ok(())
}
