//! Config-driven run written to disk: structured report, flat table, the
//! security curve for a sweep, and per-session transcripts. Pass a directory
//! as the first argument, or a temporary one is used.

use std::path::PathBuf;

use screenqkd::adversary::{AttackConfig, AttackKind};
use screenqkd::analysis::load_report;
use screenqkd::experiment::{run_experiment_with_transcripts, write_outputs, ExperimentConfig};

fn main() -> screenqkd::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("screenqkd-example"));

    let config: ExperimentConfig = toml::from_str(
        r#"
        sweep_n = [2, 3, 5]
        rounds = 10000
        trials = 2
        seed = 99
        "#,
    )
    .map_err(|e| screenqkd::Error::Config(e.to_string()))?;
    let config = ExperimentConfig {
        attack: AttackConfig::new(AttackKind::Impersonation),
        ..config
    };

    let run = run_experiment_with_transcripts(&config, true)?;
    for path in write_outputs(&run, &dir, "impersonation")? {
        println!("wrote {}", path.display());
    }
    for check in &run.report.checks {
        println!("{} {}", if check.passed { "PASS" } else { "FAIL" }, check.name);
    }

    let back = load_report(&dir.join("impersonation.json"))?;
    println!("reloaded report equal: {}", back == run.report);
    Ok(())
}
