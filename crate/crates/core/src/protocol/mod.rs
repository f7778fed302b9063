//! The honest three-way protocol: screening-set announcement, Alice's
//! preparation and encoding with the analyzing-detector tap, Bob's
//! randomization and decoding, and sifting with hash verification.

mod party;
mod session;
mod sift;

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::photonics::PolarizationAngle;

pub use party::{alice_encode, alice_prepare, bob_decode, bob_transform, AdClick, BobChoice};
pub use session::{run_session, SessionOutcome};
pub use sift::{
    digest_key, pack_bits, sift_and_verify, Announcement, Detection, DigestAlgorithm, RoundRecord, SessionTranscript,
    SiftOutcome, Verdict,
};

/// Returns the screening set `α_i = iπ / 2(N+1)` for `i = 1..=N`.
pub fn screening_angles(n: usize) -> Result<Vec<PolarizationAngle>> {
    if n < 1 {
        return Err(Error::param("N", "screening set needs at least one angle"));
    }
    let step = PI / (2.0 * (n as f64 + 1.0));
    Ok((1..=n).map(|i| PolarizationAngle::new(i as f64 * step)).collect())
}

/// The public screening set with 1-based indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreeningSet {
    angles: Vec<PolarizationAngle>,
}

impl ScreeningSet {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self {
            angles: screening_angles(n)?,
        })
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Angle for a 1-based index.
    pub fn angle(&self, index: usize) -> PolarizationAngle {
        self.angles[index - 1]
    }

    pub fn angles(&self) -> &[PolarizationAngle] {
        &self.angles
    }

    /// `α_a + α_b = π/2`, which under the equally spaced set is `a + b = N + 1`.
    pub fn matched(&self, a_index: usize, b_index: usize) -> bool {
        a_index + b_index == self.angles.len() + 1
    }
}

/// One of Bob's two analyzing angles `φ* ∈ {0, π/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyzingAngle {
    Zero,
    HalfPi,
}

impl AnalyzingAngle {
    pub fn radians(self) -> f64 {
        match self {
            AnalyzingAngle::Zero => 0.0,
            AnalyzingAngle::HalfPi => FRAC_PI_2,
        }
    }

    /// `2φ*/π` as a bit.
    pub fn bit(self) -> u8 {
        match self {
            AnalyzingAngle::Zero => 0,
            AnalyzingAngle::HalfPi => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            AnalyzingAngle::Zero
        } else {
            AnalyzingAngle::HalfPi
        }
    }
}

/// The analyzing-detector outcome Alice expects on a matched analyzing round:
/// `O_a = k ⊕ (2φ*/π) ⊕ 1`.
pub fn integrity_bit(k: u8, phi_star: AnalyzingAngle) -> u8 {
    k ^ phi_star.bit() ^ 1
}

/// How Alice's source populates a pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhotonSource {
    SinglePhoton,
    Pulse { mean_photons: f64 },
}

impl PhotonSource {
    pub fn label(&self) -> &'static str {
        match self {
            PhotonSource::SinglePhoton => "single",
            PhotonSource::Pulse { .. } => "pulse",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    /// Size of the screening set.
    pub n: usize,
    /// Rounds per session.
    pub rounds: usize,
    /// Probability that Bob substitutes an analyzing angle for `φ`.
    pub p_a: f64,
    /// Transmission of Alice's tap; `1 − t` goes to the analyzing detector.
    pub t: f64,
    pub source: PhotonSource,
    /// Per-photon loss on every channel leg.
    pub channel_loss: f64,
    pub digest: DigestAlgorithm,
    pub seed: u64,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        Self {
            n: 2,
            rounds: 10_000,
            p_a: 0.2,
            t: 0.9,
            source: PhotonSource::SinglePhoton,
            channel_loss: 0.0,
            digest: DigestAlgorithm::default(),
            seed: 0,
        }
    }
}

fn check_unit(field: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::param(field, format!("must lie in [0, 1], got {v}")))
    }
}

impl ProtocolParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::param("N", "must be >= 1"));
        }
        if self.rounds < 1 {
            return Err(Error::param("rounds", "must be >= 1"));
        }
        check_unit("p_a", self.p_a)?;
        check_unit("t", self.t)?;
        check_unit("channel_loss", self.channel_loss)?;
        if let PhotonSource::Pulse { mean_photons } = self.source {
            if !(mean_photons >= 0.0 && mean_photons.is_finite()) {
                return Err(Error::param(
                    "mu",
                    format!("must be finite and >= 0, got {mean_photons}"),
                ));
            }
        }
        Ok(())
    }
}
