use std::f64::consts::{FRAC_PI_4, PI};

use super::{EveStorage, GuessRule};
use crate::channel::{EveReport, Interceptor, Leg};
use crate::error::{Error, Result};
use crate::photonics::{measure, MeasurementBasis, Origin, Photon, PolarizationAngle, Pulse};
use crate::protocol::{Announcement, ScreeningSet};
use crate::rng::RandomSource;

fn key_phase(bit: u8) -> f64 {
    if bit == 0 {
        FRAC_PI_4
    } else {
        -FRAC_PI_4
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::param(
            "attack.probability",
            format!("must lie in [0, 1], got {p}"),
        ))
    }
}

/// Legs 1 and 2 shared by both impersonation variants: Eve keeps Alice's
/// pulse, plays Alice towards Bob with her own photon at `θ′`, then hands
/// Alice's untouched pulse back to her and keeps Bob's `|φ + α_b⟩`.
#[derive(Debug, Default)]
struct RelayState {
    round_id: u64,
    active: bool,
    theta_prime: f64,
    alice_pulse: Option<Pulse>,
    bob_pulse: Option<Pulse>,
}

impl RelayState {
    fn leg1(&mut self, round_id: u64, pulse: Pulse, probability: f64, rng: &mut RandomSource) -> Pulse {
        *self = RelayState {
            round_id,
            active: rng.bernoulli(probability),
            ..Default::default()
        };
        if !self.active {
            return pulse;
        }
        self.theta_prime = rng.uniform() * PI;
        self.alice_pulse = Some(pulse);
        let fake = Photon::new(PolarizationAngle::new(self.theta_prime), Origin::EveReplayed);
        Pulse::from_photons(round_id, vec![fake])
    }

    fn leg2(&mut self, round_id: u64, mut pulse: Pulse) -> Pulse {
        if !self.active || self.round_id != round_id {
            return pulse;
        }
        pulse.rotate(-self.theta_prime);
        self.bob_pulse = Some(pulse);
        self.alice_pulse.take().unwrap_or_else(|| Pulse::vacuum(round_id))
    }

    fn engaged(&self, round_id: u64) -> bool {
        self.active && self.round_id == round_id
    }

    /// Bob's stored pulse, re-encoded by `delta`, for forwarding to Bob.
    fn relay(&mut self, round_id: u64, delta: f64) -> Pulse {
        let mut p = self.bob_pulse.take().unwrap_or_else(|| Pulse::vacuum(round_id));
        p.rotate(delta);
        p
    }
}

/// Single-photon impersonation. On leg 3 Eve guesses `α_a`, measures the
/// returning photon along `α_guess + π/4`, and writes `(−1)^{O_e} π/4` onto
/// the photon she kept from Bob.
#[derive(Debug)]
pub struct Impersonation {
    set: ScreeningSet,
    probability: f64,
    guess: GuessRule,
    relay: RelayState,
    storage: EveStorage,
}

impl Impersonation {
    pub fn new(n: usize, probability: f64, guess: GuessRule) -> Result<Self> {
        check_probability(probability)?;
        Ok(Self {
            set: ScreeningSet::new(n)?,
            probability,
            guess,
            relay: RelayState::default(),
            storage: EveStorage::default(),
        })
    }
}

impl Interceptor for Impersonation {
    fn intercept(&mut self, leg: Leg, round_id: u64, pulse: Pulse, rng: &mut RandomSource) -> Pulse {
        match leg {
            Leg::AliceToBob => self.relay.leg1(round_id, pulse, self.probability, rng),
            Leg::BobToAlice => self.relay.leg2(round_id, pulse),
            Leg::AliceToBobEncoded => {
                if !self.relay.engaged(round_id) {
                    return pulse;
                }
                let Some(photon) = pulse.into_photons().into_iter().next() else {
                    self.relay.bob_pulse = None;
                    return Pulse::vacuum(round_id);
                };
                let alpha = self.set.angle(self.guess.pick(self.set.len(), rng));
                let basis = MeasurementBasis::new(PolarizationAngle::new(alpha.radians() + FRAC_PI_4));
                let read = measure(photon, basis, rng);
                self.storage.record_guess(round_id, read);
                self.relay.relay(round_id, key_phase(read))
            }
        }
    }

    fn observe(&mut self, announcement: &Announcement, _rng: &mut RandomSource) {
        self.storage.pad_guesses(announcement.len());
    }

    fn report(&self) -> EveReport {
        EveReport {
            guesses: self.storage.guesses.clone(),
            ..Default::default()
        }
    }
}

/// What one sub-pulse told Eve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubPulseReading {
    Empty,
    /// Every photon gave this outcome.
    Uniform(u8),
    Mixed,
}

impl SubPulseReading {
    fn read(photons: Vec<Photon>, basis: MeasurementBasis, rng: &mut RandomSource) -> Self {
        let mut out = SubPulseReading::Empty;
        for p in photons {
            let b = measure(p, basis, rng);
            out = match out {
                SubPulseReading::Empty => SubPulseReading::Uniform(b),
                SubPulseReading::Uniform(prev) if prev == b => out,
                _ => SubPulseReading::Mixed,
            };
        }
        out
    }

    /// Key bits consistent with this reading under the hypothesis that the
    /// sub-pulse's basis matches `α_a`.
    fn consistent_bits(self) -> &'static [u8] {
        match self {
            SubPulseReading::Empty => &[0, 1],
            SubPulseReading::Uniform(0) => &[0],
            SubPulseReading::Uniform(_) => &[1],
            SubPulseReading::Mixed => &[],
        }
    }
}

#[derive(Debug, Clone)]
struct SplitRecord {
    readings: Vec<SubPulseReading>,
    relayed_bit: u8,
}

/// Pulse-mode impersonation. Eve splits the encoded pulse into `N` parts,
/// measures part `i` along `α_i + π/4` and keeps every hypothesis
/// `(α_j, k)` under which all outcomes have nonzero probability. Basis `j`
/// decides `k` deterministically and other bases never do, so hypothesis
/// `(α_j, k)` survives iff part `j` is empty or read `k` on every photon.
/// With one survivor she relays the exact state; otherwise she relays a
/// uniformly chosen survivor.
#[derive(Debug)]
pub struct PulseBeamSplit {
    set: ScreeningSet,
    probability: f64,
    relay: RelayState,
    records: Vec<Option<SplitRecord>>,
    storage: EveStorage,
    attempts: u64,
    conclusive: u64,
}

impl PulseBeamSplit {
    pub fn new(n: usize, probability: f64) -> Result<Self> {
        check_probability(probability)?;
        Ok(Self {
            set: ScreeningSet::new(n)?,
            probability,
            relay: RelayState::default(),
            records: Vec::new(),
            storage: EveStorage::default(),
            attempts: 0,
            conclusive: 0,
        })
    }
}

impl Interceptor for PulseBeamSplit {
    fn intercept(&mut self, leg: Leg, round_id: u64, pulse: Pulse, rng: &mut RandomSource) -> Pulse {
        match leg {
            Leg::AliceToBob => self.relay.leg1(round_id, pulse, self.probability, rng),
            Leg::BobToAlice => self.relay.leg2(round_id, pulse),
            Leg::AliceToBobEncoded => {
                if !self.relay.engaged(round_id) {
                    return pulse;
                }
                if pulse.is_empty() {
                    self.relay.bob_pulse = None;
                    return pulse;
                }
                self.attempts += 1;
                let parts = pulse.split_uniform(self.set.len(), rng);
                let readings: Vec<SubPulseReading> = parts
                    .into_iter()
                    .enumerate()
                    .map(|(j, part)| {
                        let axis = PolarizationAngle::new(self.set.angles()[j].radians() + FRAC_PI_4);
                        SubPulseReading::read(part.into_photons(), MeasurementBasis::new(axis), rng)
                    })
                    .collect();
                let hypotheses: Vec<(usize, u8)> = readings
                    .iter()
                    .enumerate()
                    .flat_map(|(j, r)| r.consistent_bits().iter().map(move |&k| (j + 1, k)))
                    .collect();
                if hypotheses.len() == 1 {
                    self.conclusive += 1;
                }
                // the true hypothesis always survives, so the set is nonempty
                let (a_hat, k_hat) = hypotheses[rng.index(hypotheses.len())];
                let i = round_id as usize;
                if self.records.len() <= i {
                    self.records.resize(i + 1, None);
                }
                self.records[i] = Some(SplitRecord {
                    readings,
                    relayed_bit: k_hat,
                });
                self.relay
                    .relay(round_id, key_phase(k_hat) + self.set.angle(a_hat).radians())
            }
        }
    }

    fn observe(&mut self, announcement: &Announcement, _rng: &mut RandomSource) {
        for (i, rec) in self.records.iter().enumerate() {
            let Some(rec) = rec else { continue };
            let Some(&a) = announcement.a_indices.get(i) else {
                continue;
            };
            let bit = match rec.readings[a - 1] {
                SubPulseReading::Uniform(b) => b,
                _ => rec.relayed_bit,
            };
            self.storage.record_guess(i as u64, bit);
        }
        self.storage.pad_guesses(announcement.len());
    }

    fn report(&self) -> EveReport {
        EveReport {
            guesses: self.storage.guesses.clone(),
            conclusive_attempts: self.attempts,
            conclusive: self.conclusive,
        }
    }
}
