use super::{estimate_probe_bit, EveStorage};
use crate::channel::{EveReport, Interceptor, Leg};
use crate::error::{Error, Result};
use crate::photonics::{Origin, Photon, PolarizationAngle, Pulse};
use crate::protocol::{Announcement, ScreeningSet};
use crate::rng::RandomSource;

/// Where the leg-2 probe comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeKind {
    /// A photon split off Alice's leg-1 pulse, so it carries `θ` and Alice's
    /// own rotation cancels it.
    PnsComposite,
    /// The standard state `|0⟩`.
    StandardState,
    /// A probe at a fixed angle `η`.
    Fixed(PolarizationAngle),
}

/// Trojan-horse family: inject a probe into Bob's returning pulse, let
/// Alice's encoder rotate it, then pull it back out on leg 3 and read it once
/// `α_a` is announced.
#[derive(Debug)]
pub struct ProbeAttack {
    kind: ProbeKind,
    set: ScreeningSet,
    probability: f64,
    eve_tap: f64,
    round_id: u64,
    active: bool,
    storage: EveStorage,
}

impl ProbeAttack {
    pub fn new(kind: ProbeKind, n: usize, probability: f64, eve_tap: f64) -> Result<Self> {
        for (field, v) in [("attack.probability", probability), ("attack.eve_tap", eve_tap)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::param(field, format!("must lie in [0, 1], got {v}")));
            }
        }
        Ok(Self {
            kind,
            set: ScreeningSet::new(n)?,
            probability,
            eve_tap,
            round_id: 0,
            active: false,
            storage: EveStorage::default(),
        })
    }

    /// Part of the probe's angle Eve can account for when reading it.
    fn offset(&self) -> f64 {
        match self.kind {
            ProbeKind::PnsComposite | ProbeKind::StandardState => 0.0,
            ProbeKind::Fixed(eta) => eta.radians(),
        }
    }

    pub fn storage(&self) -> &EveStorage {
        &self.storage
    }
}

impl Interceptor for ProbeAttack {
    fn intercept(&mut self, leg: Leg, round_id: u64, mut pulse: Pulse, rng: &mut RandomSource) -> Pulse {
        match leg {
            Leg::AliceToBob => {
                self.round_id = round_id;
                self.active = rng.bernoulli(self.probability);
                // photon-number measurement; split only multi-photon pulses
                if self.active && self.kind == ProbeKind::PnsComposite && pulse.len() >= 2 {
                    if let Some(p) = pulse.split_off_one() {
                        EveStorage::keep(&mut self.storage.e1, round_id, p);
                    }
                }
                pulse
            }
            Leg::BobToAlice => {
                if !self.active || self.round_id != round_id {
                    return pulse;
                }
                let probe = match self.kind {
                    ProbeKind::PnsComposite => self
                        .storage
                        .e1
                        .remove(&round_id)
                        .and_then(|mut v| v.pop())
                        .map(|p| p.with_origin(Origin::TrojanInjected)),
                    ProbeKind::StandardState => Some(Photon::new(PolarizationAngle::ZERO, Origin::TrojanInjected)),
                    ProbeKind::Fixed(eta) => Some(Photon::new(eta, Origin::TrojanInjected)),
                };
                if let Some(p) = probe {
                    pulse.push(p);
                }
                pulse
            }
            Leg::AliceToBobEncoded => {
                if !self.active || self.round_id != round_id {
                    return pulse;
                }
                for p in pulse.extract_origin(Origin::TrojanInjected, self.eve_tap, rng) {
                    EveStorage::keep(&mut self.storage.e2, round_id, p);
                }
                pulse
            }
        }
    }

    fn observe(&mut self, announcement: &Announcement, rng: &mut RandomSource) {
        let offset = self.offset();
        let captured = std::mem::take(&mut self.storage.e2);
        for (round_id, photons) in captured {
            let Some(&a) = announcement.a_indices.get(round_id as usize) else {
                continue;
            };
            let alpha_a = self.set.angle(a);
            // one probe per round; any extra photon would be read the same way
            if let Some(p) = photons.into_iter().next() {
                let bit = estimate_probe_bit(p, alpha_a, offset, rng);
                self.storage.record_guess(round_id, bit);
            }
        }
        self.storage.pad_guesses(announcement.len());
    }

    fn report(&self) -> EveReport {
        EveReport {
            guesses: self.storage.guesses.clone(),
            ..Default::default()
        }
    }
}
