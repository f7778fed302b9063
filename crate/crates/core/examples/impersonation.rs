//! Eve runs the protocol separately with Alice and with Bob. Errors in the
//! key and in the analyzing detector give her away, whichever screening
//! angle she bets on.

use screenqkd::adversary::{GuessRule, Impersonation};
use screenqkd::analysis::{Counts, TrialMetrics};
use screenqkd::protocol::{run_session, ProtocolParams};

fn main() -> screenqkd::Result<()> {
    let params = ProtocolParams {
        n: 3,
        rounds: 50_000,
        p_a: 0.3,
        t: 0.9,
        seed: 5,
        ..Default::default()
    };
    let rules = [
        ("uniform guess", GuessRule::Uniform),
        ("always α_1", GuessRule::Fixed { index: 1 }),
        ("always α_3", GuessRule::Fixed { index: 3 }),
    ];
    for (name, rule) in rules {
        let mut eve = Impersonation::new(params.n, 1.0, rule)?;
        let outcome = run_session(&params, 0, Some(&mut eve))?;
        let c = Counts::from_session(&outcome)?;
        let row = TrialMetrics::from_session(&outcome, "impersonation")?;
        println!(
            "{name:<14} qber {:.4}  detector violations {:.4}  eve accuracy {:.4}  verdict {}",
            c.qber().unwrap_or(0.0),
            c.ad_violation_rate().unwrap_or(0.0),
            c.eve_accuracy().unwrap_or(0.0),
            row.verdict.label()
        );
    }

    // acting on a fraction of rounds dilutes the errors but never removes them
    for p in [0.05, 0.2, 0.5] {
        let mut eve = Impersonation::new(params.n, p, GuessRule::Uniform)?;
        let c = Counts::from_session(&run_session(&params, 0, Some(&mut eve))?)?;
        println!("attack probability {p:<4} qber {:.4}", c.qber().unwrap_or(0.0));
    }
    Ok(())
}
