use super::sift::{sift_and_verify, Announcement, RoundRecord, SessionTranscript};
use super::{alice_encode, alice_prepare, bob_decode, bob_transform, ProtocolParams, ScreeningSet};
use crate::channel::{Channel, EveReport, Interceptor, Leg};
use crate::error::Result;
use crate::rng::{stream, RandomSource};

/// A finished session and what the adversary (if any) concluded.
#[derive(Debug, Clone)]
pub struct SessionOutcome {
    pub transcript: SessionTranscript,
    pub eve: Option<EveReport>,
}

const ANNOUNCE_LABEL: u64 = u64::MAX;

/// Runs `params.rounds` rounds followed by announcement and sifting.
///
/// Randomness for round `i` of trial `trial` is derived from
/// `(params.seed, params.n, trial, i)` with separate streams for Alice, Bob,
/// the channel and Eve, so an interceptor that never acts leaves the
/// transcript bit-identical to a session without one.
pub fn run_session(
    params: &ProtocolParams,
    trial: u64,
    interceptor: Option<&mut dyn Interceptor>,
) -> Result<SessionOutcome> {
    params.validate()?;
    let set = ScreeningSet::new(params.n)?;
    let root = RandomSource::from_seed(params.seed).fork(params.n as u64).fork(trial);
    let mut channel = Channel::new(params.channel_loss, interceptor)?;
    let mut rounds = Vec::with_capacity(params.rounds);

    for i in 0..params.rounds as u64 {
        let r = root.fork(i);
        let mut alice = r.fork(stream::ALICE);
        let mut bob = r.fork(stream::BOB);
        let mut line = r.fork(stream::CHANNEL);
        let mut eve = r.fork(stream::EVE);

        let (theta, pulse) = alice_prepare(params, i, &mut alice)?;
        let pulse = channel.transmit(pulse, Leg::AliceToBob, &mut eve, &mut line)?;

        let (pulse, choice) = bob_transform(params, &set, pulse, &mut bob);
        let pulse = channel.transmit(pulse, Leg::BobToAlice, &mut eve, &mut line)?;

        let k = alice.bit();
        let a_index = 1 + alice.index(set.len());
        let (pulse, ad_clicks) = alice_encode(params, &set, pulse, theta, k, a_index, &mut alice)?;
        let pulse = channel.transmit(pulse, Leg::AliceToBobEncoded, &mut eve, &mut line)?;

        let (bob_det, received) = bob_decode(pulse, choice.phi, &mut bob);
        rounds.push(RoundRecord {
            round_id: i,
            theta,
            phi: choice.phi,
            phi_star: choice.phi_star,
            a_index,
            b_index: choice.b_index,
            k,
            ad_clicks,
            bob_received_photons: received,
            bob: bob_det,
        });
    }

    let announcement = Announcement::from_rounds(&rounds);
    channel.publish(announcement.clone(), &mut root.fork(ANNOUNCE_LABEL).fork(stream::EVE))?;
    let announcement = channel.read_public().cloned().unwrap_or(announcement);
    let sift = sift_and_verify(params, &rounds, &announcement)?;
    let eve = channel.eve_report();
    Ok(SessionOutcome {
        transcript: SessionTranscript {
            params: params.clone(),
            trial,
            rounds,
            announcement,
            sift,
        },
        eve,
    })
}
