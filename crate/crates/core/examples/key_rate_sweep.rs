//! Matched fraction against the number of screening angles.

use screenqkd::analysis::Theory;
use screenqkd::experiment::{run_experiment, ExperimentConfig};

fn main() -> screenqkd::Result<()> {
    let config = ExperimentConfig {
        sweep_n: Some(vec![1, 2, 3, 4, 5, 8, 10, 16]),
        rounds: 50_000,
        seed: 3,
        ..Default::default()
    };
    let report = run_experiment(&config)?;
    println!(
        "{:>3}  {:>9}  {:>9}  {:>8}  {:>7}",
        "N", "measured", "1/N", "rate·N", "ie_sum"
    );
    for s in &report.summaries {
        let theory = Theory::for_n(s.n)?;
        println!(
            "{:>3}  {:>9.5}  {:>9.5}  {:>8.4}  {:>7.3}",
            s.n,
            s.sift_rate,
            theory.matching_prob,
            s.sift_rate * s.n as f64,
            theory.ie_sum
        );
    }
    Ok(())
}
