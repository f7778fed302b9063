//! The quantum channel's three legs with an interception hook per leg, and
//! the public classical channel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::photonics::{beam_split, Pulse};
use crate::protocol::Announcement;
use crate::rng::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Leg {
    /// Alice's fresh pulse on its way to Bob.
    AliceToBob,
    /// Bob's randomized pulse returning to Alice.
    BobToAlice,
    /// Alice's encoded pulse on its way to Bob.
    AliceToBobEncoded,
}

impl Leg {
    pub const ALL: [Leg; 3] = [Leg::AliceToBob, Leg::BobToAlice, Leg::AliceToBobEncoded];

    pub fn number(self) -> u8 {
        match self {
            Leg::AliceToBob => 1,
            Leg::BobToAlice => 2,
            Leg::AliceToBobEncoded => 3,
        }
    }
}

/// What the adversary concluded once the announcement was public.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EveReport {
    /// Per-round guess of Alice's key bit, indexed by round id.
    pub guesses: Vec<Option<u8>>,
    /// Rounds in which Eve attempted to discriminate the encoding.
    pub conclusive_attempts: u64,
    /// Attempts that left exactly one hypothesis standing.
    pub conclusive: u64,
}

/// An adversary sitting on the quantum channel.
///
/// The interface is the whole of what Eve can learn: the photons that pass
/// her, which leg and round they belong to, and the public announcement.
/// Nothing here exposes `θ`, `φ`, `k` or a screening choice before it is
/// published.
pub trait Interceptor: Send {
    fn intercept(&mut self, leg: Leg, round_id: u64, pulse: Pulse, rng: &mut RandomSource) -> Pulse;

    /// Called exactly once, after the session's announcement is published.
    fn observe(&mut self, announcement: &Announcement, rng: &mut RandomSource);

    fn report(&self) -> EveReport;
}

/// Forwards every pulse untouched.
#[derive(Debug, Default)]
pub struct Passthrough;

impl Interceptor for Passthrough {
    fn intercept(&mut self, _leg: Leg, _round_id: u64, pulse: Pulse, _rng: &mut RandomSource) -> Pulse {
        pulse
    }

    fn observe(&mut self, _announcement: &Announcement, _rng: &mut RandomSource) {}

    fn report(&self) -> EveReport {
        EveReport::default()
    }
}

/// Applies the interceptor (if any) and then independent per-photon loss.
pub fn transmit(
    pulse: Pulse,
    leg: Leg,
    interceptor: Option<&mut (dyn Interceptor + '_)>,
    loss: f64,
    eve_rng: &mut RandomSource,
    loss_rng: &mut RandomSource,
) -> Result<Pulse> {
    let round_id = pulse.round_id;
    let pulse = match interceptor {
        Some(eve) => eve.intercept(leg, round_id, pulse, eve_rng),
        None => pulse,
    };
    let (_lost, kept) = beam_split(pulse, loss, loss_rng)
        .map_err(|_| Error::param("channel_loss", format!("must lie in [0, 1], got {loss}")))?;
    Ok(kept)
}

/// One session's channel pair: three ordered quantum legs per round and a
/// write-once public board.
pub struct Channel<'a> {
    loss: f64,
    interceptor: Option<&'a mut dyn Interceptor>,
    next_leg: usize,
    round: Option<u64>,
    published: Option<Announcement>,
}

impl<'a> Channel<'a> {
    pub fn new(loss: f64, interceptor: Option<&'a mut dyn Interceptor>) -> Result<Self> {
        if !(0.0..=1.0).contains(&loss) {
            return Err(Error::param("channel_loss", format!("must lie in [0, 1], got {loss}")));
        }
        Ok(Self {
            loss,
            interceptor,
            next_leg: 0,
            round: None,
            published: None,
        })
    }

    pub fn transmit(
        &mut self,
        pulse: Pulse,
        leg: Leg,
        eve_rng: &mut RandomSource,
        loss_rng: &mut RandomSource,
    ) -> Result<Pulse> {
        if self.published.is_some() {
            return Err(Error::Protocol("quantum transmission after announcement".into()));
        }
        if leg == Leg::AliceToBob {
            self.next_leg = 0;
            self.round = Some(pulse.round_id);
        }
        if Leg::ALL[self.next_leg % 3] != leg || self.round != Some(pulse.round_id) {
            return Err(Error::Protocol(format!(
                "leg {} of round {} out of order",
                leg.number(),
                pulse.round_id
            )));
        }
        self.next_leg += 1;
        transmit(
            pulse,
            leg,
            self.interceptor.as_deref_mut(),
            self.loss,
            eve_rng,
            loss_rng,
        )
    }

    /// Publishes the announcement and lets the adversary observe it.
    pub fn publish(&mut self, announcement: Announcement, eve_rng: &mut RandomSource) -> Result<()> {
        if self.published.is_some() {
            return Err(Error::Protocol("announcement already published".into()));
        }
        if let Some(eve) = self.interceptor.as_deref_mut() {
            eve.observe(&announcement, eve_rng);
        }
        self.published = Some(announcement);
        Ok(())
    }

    pub fn read_public(&self) -> Option<&Announcement> {
        self.published.as_ref()
    }

    pub fn eve_report(&self) -> Option<EveReport> {
        self.interceptor.as_ref().map(|e| e.report())
    }
}
