mod common;

use screenqkd::adversary::{AttackConfig, AttackKind, GuessRule};
use screenqkd::analysis::Summary;
use screenqkd::experiment::{run_experiment, run_experiment_with_transcripts, ExperimentConfig, SourceMode};
use screenqkd::protocol::Verdict;

fn config(kind: AttackKind) -> ExperimentConfig {
    ExperimentConfig {
        rounds: 40_000,
        seed: 11,
        attack: AttackConfig::new(kind),
        ..Default::default()
    }
}

fn summary(c: &ExperimentConfig) -> Summary {
    run_experiment(c).unwrap().summaries.remove(0)
}

#[test]
fn impersonation_error_rate_matches_enumeration() {
    for n in [1, 2, 3] {
        let oracle = common::impersonation_qber(n);
        assert!((oracle - 0.5).abs() < 1e-12, "N={n}: oracle {oracle}");
        let c = ExperimentConfig {
            n,
            t: 1.0,
            ..config(AttackKind::Impersonation)
        };
        let s = summary(&c);
        let q = s.qber.unwrap();
        let band = 4.0 * common::sigma(oracle, s.totals.sifted_bits);
        assert!((q - oracle).abs() < band, "N={n}: qber {q} vs {oracle} ± {band}");
        assert_eq!(s.verdicts.get(&Verdict::Accepted), None);
    }
}

#[test]
fn impersonation_with_the_right_guess_still_shows_errors() {
    // guessing α_a right every time lets Eve read k, but Bob's copy lands on α_b
    let c = ExperimentConfig {
        n: 2,
        attack: AttackConfig {
            guess: GuessRule::Fixed { index: 1 },
            ..AttackConfig::new(AttackKind::Impersonation)
        },
        ..config(AttackKind::Impersonation)
    };
    let s = summary(&c);
    assert!(s.qber.unwrap() > 0.3);
    assert!(s.ad_violation_rate.unwrap() > 0.3);
}

#[test]
fn impersonation_is_rejected_in_pulse_mode() {
    let c = ExperimentConfig {
        mode: Some(SourceMode::Pulse),
        ..config(AttackKind::Impersonation)
    };
    assert!(run_experiment(&c).is_err());
}

#[test]
fn idle_adversary_leaves_the_transcript_unchanged() {
    let honest = run_experiment_with_transcripts(&config(AttackKind::None), true).unwrap();
    for kind in [AttackKind::Impersonation, AttackKind::Cai, AttackKind::SimpleTrojan] {
        let mut c = config(kind);
        c.attack.probability = 0.0;
        let idle = run_experiment_with_transcripts(&c, true).unwrap();
        assert_eq!(idle.transcripts[0].rounds, honest.transcripts[0].rounds, "{kind:?}");
        assert_eq!(idle.transcripts[0].sift, honest.transcripts[0].sift, "{kind:?}");
    }
    let mut pulse_honest = config(AttackKind::None);
    pulse_honest.mode = Some(SourceMode::Pulse);
    let honest = run_experiment_with_transcripts(&pulse_honest, true).unwrap();
    for kind in [
        AttackKind::PulseBeamsplit,
        AttackKind::PassivePns,
        AttackKind::PnsTrojan,
    ] {
        let mut c = config(kind);
        c.attack.probability = 0.0;
        let idle = run_experiment_with_transcripts(&c, true).unwrap();
        assert_eq!(idle.transcripts[0].rounds, honest.transcripts[0].rounds, "{kind:?}");
    }
}

#[test]
fn composite_attack_is_invisible_to_bob_but_not_to_the_detector() {
    let c = ExperimentConfig {
        mu: 2.0,
        p_a: 0.5,
        trials: 2,
        ..config(AttackKind::PnsTrojan)
    };
    let s = summary(&c);
    assert_eq!(s.totals.bit_errors, 0);
    assert_eq!(s.eve_accuracy, Some(1.0));
    let oracle = common::composite_violation_per_probe(2);
    let probe = s.probe_violation_rate.unwrap();
    let band = 4.0 * common::sigma(oracle, s.totals.probe_clicks);
    assert!((probe - oracle).abs() < band, "{probe} vs {oracle} ± {band}");
    let seen = oracle * common::composite_probe_fraction(2.0);
    let ad = s.ad_violation_rate.unwrap();
    let band = 4.0 * common::sigma(seen, s.totals.ad_clicks);
    assert!((ad - seen).abs() < band, "{ad} vs {seen} ± {band}");
}

#[test]
fn composite_worked_case() {
    assert!((common::composite_violation_case() - 0.75).abs() < 1e-12);
    assert!((common::composite_violation_per_probe(2) - 0.5).abs() < 1e-12);
}

#[test]
fn standard_state_probe_gains_nothing() {
    let c = ExperimentConfig {
        t: 0.5,
        p_a: 0.5,
        ..config(AttackKind::Cai)
    };
    let s = summary(&c);
    assert_eq!(s.totals.bit_errors, 0);
    let v = common::uniform_theta_violation(2, 0.0);
    let a = common::uniform_theta_accuracy(2, 0.0);
    assert!((v - 0.5).abs() < 1e-9 && (a - 0.5).abs() < 1e-9);
    let pv = s.probe_violation_rate.unwrap();
    assert!((pv - v).abs() < 4.0 * common::sigma(v, s.totals.probe_clicks), "{pv}");
    let acc = s.eve_accuracy.unwrap();
    assert!((acc - a).abs() < 4.0 * common::sigma(a, s.totals.eve_guesses), "{acc}");
}

#[test]
fn simple_trojan_gains_nothing_at_any_angle() {
    for eta in [0.3, 1.1, 2.9] {
        let mut c = config(AttackKind::SimpleTrojan);
        c.attack.eta = eta;
        let s = summary(&c);
        let a = common::uniform_theta_accuracy(2, eta);
        let acc = s.eve_accuracy.unwrap();
        assert!(
            (acc - a).abs() < 4.0 * common::sigma(a, s.totals.eve_guesses),
            "η={eta}: {acc}"
        );
    }
}

#[test]
fn passive_splitting_reads_only_analyzing_rounds() {
    let c = ExperimentConfig {
        mu: 2.0,
        p_a: 0.5,
        ..config(AttackKind::PassivePns)
    };
    let s = summary(&c);
    assert_eq!(s.totals.bit_errors, 0);
    assert_eq!(s.totals.ad_violations, 0);
    assert_eq!(s.eve_accuracy_analyzing, Some(1.0));
    let acc = s.eve_accuracy.unwrap();
    assert!(
        (acc - 0.5).abs() < 4.0 * common::sigma(0.5, s.totals.eve_guesses),
        "{acc}"
    );
}

#[test]
fn beamsplit_conclusive_rate_matches_poisson_split() {
    for (n, mu) in [(2, 2.0), (2, 4.0), (3, 4.0)] {
        let c = ExperimentConfig {
            n,
            mu,
            t: 1.0,
            ..config(AttackKind::PulseBeamsplit)
        };
        let s = summary(&c);
        let oracle = common::beamsplit_conclusive_rate(n, mu);
        let r = s.conclusive_rate.unwrap();
        let band = 4.0 * common::sigma(oracle, s.totals.conclusive_attempts);
        assert!((r - oracle).abs() < band, "N={n} μ={mu}: {r} vs {oracle} ± {band}");
    }
}

#[test]
fn no_attack_gains_information_unseen() {
    let kinds = [
        AttackKind::Impersonation,
        AttackKind::PulseBeamsplit,
        AttackKind::PassivePns,
        AttackKind::PnsTrojan,
        AttackKind::Cai,
        AttackKind::SimpleTrojan,
    ];
    for kind in kinds {
        let report = run_experiment(&config(kind)).unwrap();
        let check = report
            .checks
            .iter()
            .find(|c| c.name.starts_with("attack_visible"))
            .unwrap();
        assert!(check.passed, "{kind:?}: {}", check.detail);
    }
}

#[test]
fn passive_splitting_finds_nothing_in_single_photon_mode() {
    let c = ExperimentConfig {
        mode: Some(SourceMode::Single),
        ..config(AttackKind::PassivePns)
    };
    let s = summary(&c);
    assert_eq!(s.totals.eve_guesses + s.totals.eve_guesses_analyzing, 0);
    assert_eq!(s.totals.bit_errors, 0);
}

#[test]
fn composite_reads_every_key_round_without_the_detector() {
    let c = ExperimentConfig {
        mu: 2.0,
        t: 1.0,
        ..config(AttackKind::PnsTrojan)
    };
    let s = summary(&c);
    assert_eq!(s.totals.ad_clicks, 0);
    assert_eq!(s.totals.bit_errors, 0);
    assert!(s.totals.eve_guesses > 1000);
    assert_eq!(s.eve_accuracy, Some(1.0));
    assert_eq!(s.verdicts.get(&Verdict::Accepted), Some(&1));
}
