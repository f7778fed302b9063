//! Eve only siphons photons off multi-photon pulses and never sends any.
//! The leg-3 photon still carries Bob's random angle, so she reads the key
//! only on analyzing rounds, where that angle is announced, and those never
//! become key.

use screenqkd::adversary::PassivePns;
use screenqkd::analysis::Counts;
use screenqkd::protocol::{run_session, PhotonSource, ProtocolParams};

fn main() -> screenqkd::Result<()> {
    for mu in [0.5, 1.0, 2.0, 4.0] {
        let params = ProtocolParams {
            n: 2,
            rounds: 100_000,
            p_a: 0.3,
            source: PhotonSource::Pulse { mean_photons: mu },
            seed: 17,
            ..Default::default()
        };
        let mut eve = PassivePns::new(params.n, 1.0)?;
        let outcome = run_session(&params, 0, Some(&mut eve))?;
        let c = Counts::from_session(&outcome)?;
        let [l1, l2, l3] = eve.split_counts();
        println!(
            "μ={mu:<3} photons kept per leg {l1}/{l2}/{l3}  qber {:.4}  key-round accuracy {:.4} ({} guesses)  analyzing-round accuracy {:.4}",
            c.qber().unwrap_or(0.0),
            c.eve_accuracy().unwrap_or(0.0),
            c.eve_guesses,
            c.eve_accuracy_analyzing().unwrap_or(0.0)
        );
    }
    Ok(())
}
