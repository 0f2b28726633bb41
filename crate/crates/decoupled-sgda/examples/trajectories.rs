//! Trajectories of decoupled GDA on the scalar game family
//! `f(u, v) = a/2 u^2 - b/2 v^2 + c u v` for decreasing coupling
//! `c in {10, 3.5, 2.7, 0}`, local steps K in {1, 2, 5} (K = 1 is GDA),
//! 31 rounds from (1, -1), stepsize grid-searched per cell.
//!
//! Writes per-step points and per-round distances as CSV.
//!
//!     cargo run --release --example trajectories [out.csv]

use decoupled_sgda::experiments::{trajectory_experiment, TrajectorySpec};

fn main() -> decoupled_sgda::Result<()> {
    let spec = TrajectorySpec::default();
    let table = trajectory_experiment(&spec)?;
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "trajectories.csv".into());
    std::fs::write(&out, table.render())?;
    println!(
        "wrote {} rows for {} games x K in {:?} to {out}",
        table.num_rows(),
        spec.games.len(),
        spec.k_values
    );
    Ok(())
}
