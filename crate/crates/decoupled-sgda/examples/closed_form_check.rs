//! The loop engine against the exact round map: one noiseless decoupled
//! round on a quadratic game is the linear map `Q^K + E`, so the engine can
//! be validated to near machine precision, and the map's operator norm
//! bounds the per-round contraction.
//!
//!     cargo run --release --example closed_form_check

use decoupled_sgda::closed_form::{round_matrix, verify_equivalence};
use decoupled_sgda::games::QuadraticGame;
use decoupled_sgda::NormSpec;

fn main() -> decoupled_sgda::Result<()> {
    let report = verify_equivalence(500, 1);
    println!(
        "loop vs closed form on {} random games: max |error| = {:.3e} (tolerance {:.0e}) -> {}",
        report.games,
        report.max_abs_error,
        report.tolerance,
        if report.pass { "ok" } else { "MISMATCH" }
    );

    let ns = NormSpec::euclidean(&[1, 1]);
    println!("\nper-round contraction norms, scalar game a = 1, b = 10, gamma = 0.08:");
    println!(
        "{:>6} {:>6} {:>12} {:>12}",
        "c", "K", "||Q^K + E||", "norm bound"
    );
    for c in [0.0, 0.1, 0.5, 2.0] {
        let game = QuadraticGame::scalar(1.0, 10.0, c)?;
        for k in [1usize, 5, 25] {
            let rm = round_matrix(&game, &ns, 0.08, k)?;
            println!(
                "{:>6.1} {:>6} {:>12.6} {:>12.6}",
                c, k, rm.contraction_norm, rm.lemma_bound
            );
        }
    }
    Ok(())
}
