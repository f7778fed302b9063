use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use super::EveStorage;
use crate::channel::{EveReport, Interceptor, Leg};
use crate::error::{Error, Result};
use crate::photonics::{measure, MeasurementBasis, Photon, PolarizationAngle, Pulse};
use crate::protocol::{Announcement, ScreeningSet};
use crate::rng::RandomSource;

/// Passive photon-number splitting: one photon is kept from every
/// multi-photon pulse on each leg and nothing is ever injected.
///
/// Only the leg-3 photon `|φ + (−1)^k π/4 + α_a + α_b⟩` depends on `k`. Once
/// the screening angles are public Eve reads it along
/// `φ̂ + α_a + α_b + π/4`, with `φ̂ = φ*` on analyzing rounds and `φ̂ = 0`
/// otherwise. The leg-1 and leg-2 photons are kept but carry no key bit.
#[derive(Debug)]
pub struct PassivePns {
    set: ScreeningSet,
    probability: f64,
    round_id: u64,
    active: bool,
    storage: EveStorage,
    leg3: BTreeMap<u64, Vec<Photon>>,
    leg3_kept: usize,
}

impl PassivePns {
    pub fn new(n: usize, probability: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&probability) {
            return Err(Error::param(
                "attack.probability",
                format!("must lie in [0, 1], got {probability}"),
            ));
        }
        Ok(Self {
            set: ScreeningSet::new(n)?,
            probability,
            round_id: 0,
            active: false,
            storage: EveStorage::default(),
            leg3: BTreeMap::new(),
            leg3_kept: 0,
        })
    }

    /// Rounds in which a photon was kept on leg 1, leg 2 and leg 3.
    pub fn split_counts(&self) -> [usize; 3] {
        [self.storage.e1.len(), self.storage.e2.len(), self.leg3_kept]
    }
}

impl Interceptor for PassivePns {
    fn intercept(&mut self, leg: Leg, round_id: u64, mut pulse: Pulse, rng: &mut RandomSource) -> Pulse {
        if leg == Leg::AliceToBob {
            self.round_id = round_id;
            self.active = rng.bernoulli(self.probability);
        }
        if !self.active || self.round_id != round_id || pulse.len() < 2 {
            return pulse;
        }
        if let Some(p) = pulse.split_off_one() {
            let slot = match leg {
                Leg::AliceToBob => &mut self.storage.e1,
                Leg::BobToAlice => &mut self.storage.e2,
                Leg::AliceToBobEncoded => {
                    self.leg3_kept += 1;
                    &mut self.leg3
                }
            };
            EveStorage::keep(slot, round_id, p);
        }
        pulse
    }

    fn observe(&mut self, announcement: &Announcement, rng: &mut RandomSource) {
        let captured = std::mem::take(&mut self.leg3);
        for (round_id, photons) in captured {
            let i = round_id as usize;
            let (Some(&a), Some(&b)) = (announcement.a_indices.get(i), announcement.b_indices.get(i)) else {
                continue;
            };
            let phi_hat = announcement.phi_star_values[i].map_or(0.0, |p| p.radians());
            let axis = phi_hat + self.set.angle(a).radians() + self.set.angle(b).radians() + FRAC_PI_4;
            if let Some(p) = photons.into_iter().next() {
                let bit = measure(p, MeasurementBasis::new(PolarizationAngle::new(axis)), rng);
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
