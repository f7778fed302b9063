//! Writing an adversary against the channel hook. This one measures every
//! encoded photon on the diagonal and resends what it saw, without knowing
//! the screening angles.

use std::f64::consts::FRAC_PI_4;

use screenqkd::analysis::Counts;
use screenqkd::channel::{EveReport, Interceptor, Leg};
use screenqkd::photonics::{measure, MeasurementBasis, Origin, Photon, PolarizationAngle, Pulse};
use screenqkd::protocol::{run_session, Announcement, ProtocolParams};
use screenqkd::RandomSource;

#[derive(Default)]
struct DiagonalResend {
    guesses: Vec<Option<u8>>,
}

impl Interceptor for DiagonalResend {
    fn intercept(&mut self, leg: Leg, round_id: u64, pulse: Pulse, rng: &mut RandomSource) -> Pulse {
        if leg != Leg::AliceToBobEncoded {
            return pulse;
        }
        let Some(photon) = pulse.into_photons().into_iter().next() else {
            return Pulse::vacuum(round_id);
        };
        let bit = measure(photon, MeasurementBasis::diagonal(), rng);
        let i = round_id as usize;
        if self.guesses.len() <= i {
            self.guesses.resize(i + 1, None);
        }
        self.guesses[i] = Some(bit);
        let angle = if bit == 0 { FRAC_PI_4 } else { -FRAC_PI_4 };
        Pulse::from_photons(
            round_id,
            vec![Photon::new(PolarizationAngle::new(angle), Origin::EveReplayed)],
        )
    }

    fn observe(&mut self, announcement: &Announcement, _rng: &mut RandomSource) {
        self.guesses.resize(announcement.len(), None);
    }

    fn report(&self) -> EveReport {
        EveReport {
            guesses: self.guesses.clone(),
            ..Default::default()
        }
    }
}

fn main() -> screenqkd::Result<()> {
    let params = ProtocolParams {
        rounds: 50_000,
        seed: 21,
        ..Default::default()
    };
    let mut eve = DiagonalResend::default();
    let outcome = run_session(&params, 0, Some(&mut eve))?;
    let c = Counts::from_session(&outcome)?;
    println!("qber          {:.4}", c.qber().unwrap_or(0.0));
    println!("eve accuracy  {:.4}", c.eve_accuracy().unwrap_or(0.0));
    println!("verdict       {}", outcome.transcript.sift.verdict.label());
    Ok(())
}
