use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::photonics::Origin;
use crate::protocol::{integrity_bit, ScreeningSet, SessionOutcome, SiftOutcome, Verdict};

/// Additive counters for one or more sessions. Every rate in a report is a
/// ratio of two of these, so aggregation is an order-independent sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub rounds: u64,
    pub matched: u64,
    pub sifted_bits: u64,
    pub bit_errors: u64,
    /// Analyzing-detector clicks on matched analyzing rounds.
    pub ad_clicks: u64,
    pub ad_violations: u64,
    /// The subset of `ad_clicks` caused by adversary photons (diagnostic).
    pub probe_clicks: u64,
    pub probe_violations: u64,
    /// Eve's guesses on matched non-analyzing rounds.
    pub eve_guesses: u64,
    pub eve_correct: u64,
    /// Eve's guesses on matched analyzing rounds.
    pub eve_guesses_analyzing: u64,
    pub eve_correct_analyzing: u64,
    pub conclusive_attempts: u64,
    pub conclusive: u64,
}

impl Add for Counts {
    type Output = Counts;

    fn add(mut self, o: Counts) -> Counts {
        self += o;
        self
    }
}

impl AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        self.rounds += o.rounds;
        self.matched += o.matched;
        self.sifted_bits += o.sifted_bits;
        self.bit_errors += o.bit_errors;
        self.ad_clicks += o.ad_clicks;
        self.ad_violations += o.ad_violations;
        self.probe_clicks += o.probe_clicks;
        self.probe_violations += o.probe_violations;
        self.eve_guesses += o.eve_guesses;
        self.eve_correct += o.eve_correct;
        self.eve_guesses_analyzing += o.eve_guesses_analyzing;
        self.eve_correct_analyzing += o.eve_correct_analyzing;
        self.conclusive_attempts += o.conclusive_attempts;
        self.conclusive += o.conclusive;
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

impl Counts {
    /// Fraction of rounds satisfying the matching condition.
    pub fn sift_rate(&self) -> f64 {
        ratio(self.matched, self.rounds).unwrap_or(0.0)
    }

    /// Fraction of sifted key bits on which Alice and Bob disagree.
    pub fn qber(&self) -> Option<f64> {
        ratio(self.bit_errors, self.sifted_bits)
    }

    /// Fraction of analyzing-detector clicks on matched analyzing rounds that
    /// break the integrity condition. This is what Alice observes.
    pub fn ad_violation_rate(&self) -> Option<f64> {
        ratio(self.ad_violations, self.ad_clicks)
    }

    /// Integrity-violation probability per tapped adversary photon.
    pub fn probe_violation_rate(&self) -> Option<f64> {
        ratio(self.probe_violations, self.probe_clicks)
    }

    pub fn eve_accuracy(&self) -> Option<f64> {
        ratio(self.eve_correct, self.eve_guesses)
    }

    pub fn eve_accuracy_analyzing(&self) -> Option<f64> {
        ratio(self.eve_correct_analyzing, self.eve_guesses_analyzing)
    }

    pub fn conclusive_rate(&self) -> Option<f64> {
        ratio(self.conclusive, self.conclusive_attempts)
    }

    pub fn from_session(outcome: &SessionOutcome) -> Result<Self> {
        let t = &outcome.transcript;
        let set = ScreeningSet::new(t.params.n)?;
        let mut c = Counts {
            rounds: t.rounds.len() as u64,
            sifted_bits: t.sift.alice_key.len() as u64,
            bit_errors: t
                .sift
                .alice_key
                .iter()
                .zip(&t.sift.bob_key)
                .filter(|(a, b)| a != b)
                .count() as u64,
            ..Default::default()
        };
        let guesses = outcome.eve.as_ref().map(|e| e.guesses.as_slice()).unwrap_or(&[]);
        for r in &t.rounds {
            if !set.matched(r.a_index, r.b_index) {
                continue;
            }
            c.matched += 1;
            let guess = guesses.get(r.round_id as usize).copied().flatten();
            match r.phi_star {
                Some(ps) => {
                    let expected = integrity_bit(r.k, ps);
                    for click in &r.ad_clicks {
                        let bad = click.bit != expected;
                        c.ad_clicks += 1;
                        c.ad_violations += u64::from(bad);
                        if click.origin != Origin::Legitimate {
                            c.probe_clicks += 1;
                            c.probe_violations += u64::from(bad);
                        }
                    }
                    if let Some(g) = guess {
                        c.eve_guesses_analyzing += 1;
                        c.eve_correct_analyzing += u64::from(g == r.k);
                    }
                }
                None => {
                    if let Some(g) = guess {
                        c.eve_guesses += 1;
                        c.eve_correct += u64::from(g == r.k);
                    }
                }
            }
        }
        if let Some(e) = &outcome.eve {
            c.conclusive_attempts = e.conclusive_attempts;
            c.conclusive = e.conclusive;
        }
        Ok(c)
    }
}

/// Bit error rate of a sifted key; `None` when no bits were sifted.
pub fn qber(sift: &SiftOutcome) -> Option<f64> {
    let errors = sift.alice_key.iter().zip(&sift.bob_key).filter(|(a, b)| a != b).count();
    ratio(errors as u64, sift.alice_key.len() as u64)
}

/// One row of the flat table: one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub trial: u64,
    pub n: usize,
    pub mode: String,
    pub attack: String,
    pub verdict: Verdict,
    pub counts: Counts,
}

impl TrialMetrics {
    pub fn from_session(outcome: &SessionOutcome, attack: &str) -> Result<Self> {
        let t = &outcome.transcript;
        Ok(Self {
            trial: t.trial,
            n: t.params.n,
            mode: t.params.source.label().to_string(),
            attack: attack.to_string(),
            verdict: t.sift.verdict,
            counts: Counts::from_session(outcome)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{run_session, ProtocolParams};
    use proptest::prelude::*;

    #[test]
    fn honest_session_has_zero_error_rates() {
        let params = ProtocolParams {
            rounds: 5_000,
            seed: 3,
            ..Default::default()
        };
        let out = run_session(&params, 0, None).unwrap();
        let c = Counts::from_session(&out).unwrap();
        assert_eq!(c.qber(), Some(0.0));
        assert_eq!(c.ad_violation_rate(), Some(0.0));
        assert_eq!(c.eve_accuracy(), None);
        assert_eq!(qber(&out.transcript.sift), Some(0.0));
        assert!(c.sifted_bits <= c.matched && c.matched <= c.rounds);
    }

    #[test]
    fn empty_key_has_no_qber() {
        let params = ProtocolParams {
            rounds: 3,
            n: 10,
            p_a: 1.0,
            ..Default::default()
        };
        let out = run_session(&params, 0, None).unwrap();
        assert_eq!(qber(&out.transcript.sift), None);
    }

    fn arb_counts() -> impl Strategy<Value = Counts> {
        proptest::collection::vec(0u64..1000, 14).prop_map(|v| Counts {
            rounds: v[0],
            matched: v[1],
            sifted_bits: v[2],
            bit_errors: v[3],
            ad_clicks: v[4],
            ad_violations: v[5],
            probe_clicks: v[6],
            probe_violations: v[7],
            eve_guesses: v[8],
            eve_correct: v[9],
            eve_guesses_analyzing: v[10],
            eve_correct_analyzing: v[11],
            conclusive_attempts: v[12],
            conclusive: v[13],
        })
    }

    proptest! {
        #[test]
        fn aggregation_is_order_independent(xs in proptest::collection::vec(arb_counts(), 0..8)) {
            let fwd = xs.iter().fold(Counts::default(), |a, &b| a + b);
            let rev = xs.iter().rev().fold(Counts::default(), |a, &b| a + b);
            prop_assert_eq!(fwd, rev);
        }
    }
}
