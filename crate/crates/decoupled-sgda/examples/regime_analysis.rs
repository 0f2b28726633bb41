//! Exact regime analysis of quadratic games: spectral constants, coupling
//! degree, regime classification, prescribed hyperparameters, convergence
//! bounds and the communication-complexity comparison.
//!
//!     cargo run --release --example regime_analysis

use decoupled_sgda::games::QuadraticGame;
use decoupled_sgda::spectra::{
    analyze, classify, complexity_table_row, prescribed_hyperparams, theoretical_bound,
    PrescriptionTarget, Regime,
};
use decoupled_sgda::NormSpec;

fn main() -> decoupled_sgda::Result<()> {
    let ns = NormSpec::euclidean(&[1, 1]);
    for (a, b, c) in [(1.0, 10.0, 0.0), (1.0, 10.0, 0.2), (1.0, 10.0, 2.7)] {
        let game = QuadraticGame::scalar(a, b, c)?;
        let constants = analyze(&game, &ns)?;
        let report = classify(&constants);
        println!("== game (a, b, c) = ({a}, {b}, {c})");
        println!(
            "   mu_bar {:.3}  L_bar {:.3}  L_c {:.3}  kappa_c {:.3}  regime {:?}",
            constants.mu_bar, constants.l_bar, constants.l_c, constants.kappa_c, report.regime
        );
        println!(
            "   beats-optimal-method condition: {}  quadratic-variant weakly coupled: {}",
            report.foam_condition_holds, report.weakly_coupled_quad
        );

        let target = if report.regime == Regime::General {
            PrescriptionTarget::General
        } else {
            PrescriptionTarget::Weakly
        };
        let p = prescribed_hyperparams(&constants, target, 10);
        println!(
            "   prescribed gamma {:.4}, K {}{}",
            p.gamma,
            p.k,
            if p.fully_decoupled {
                " (fully decoupled: one round suffices)"
            } else {
                ""
            }
        );

        let bound = theoretical_bound(&constants, 20, p.k, p.gamma, 1.0, 0.0);
        println!(
            "   20-round distance^2 bound: {:.3e} ({:?} branch, hypotheses ok: {})",
            bound.value, bound.branch, bound.hypotheses_satisfied
        );

        let table = complexity_table_row(&constants, 1e-6)?;
        print!("   rounds to 1e-6 (up to constants):");
        for e in &table.entries {
            print!(" {} {:.1}", e.method, e.rounds);
        }
        println!(
            "{}",
            if table.zero_communication {
                "  [no communication needed]"
            } else {
                ""
            }
        );
        println!();
    }
    Ok(())
}
