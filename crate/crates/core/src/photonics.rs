//! Linear-polarization photon states, rotations, projective measurement,
//! Poissonian pulses and beam splitting.
//!
//! Polarization is axis-like: `θ` and `θ + π` are the same state, so every
//! angle is kept in `[0, π)`. A multi-photon pulse is a product state of
//! independent photons; no entanglement is modelled.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Absolute tolerance for comparing canonical angles.
pub const ANGLE_TOLERANCE: f64 = 1e-9;

/// A linear polarization direction, canonicalized into `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolarizationAngle(f64);

fn canon(x: f64) -> f64 {
    let r = x.rem_euclid(PI);
    // rem_euclid can round up to exactly π for tiny negative inputs
    if r >= PI {
        0.0
    } else {
        r
    }
}

impl PolarizationAngle {
    pub const ZERO: PolarizationAngle = PolarizationAngle(0.0);
    pub const DIAGONAL: PolarizationAngle = PolarizationAngle(FRAC_PI_4);
    pub const ANTI_DIAGONAL: PolarizationAngle = PolarizationAngle(3.0 * FRAC_PI_4);

    pub fn new(radians: f64) -> Self {
        PolarizationAngle(canon(radians))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// Distance on the mod-π circle, in `[0, π/2]`.
    pub fn distance(self, other: PolarizationAngle) -> f64 {
        let d = canon(self.0 - other.0);
        d.min(PI - d)
    }

    pub fn approx_eq(self, other: PolarizationAngle) -> bool {
        self.distance(other) < ANGLE_TOLERANCE
    }
}

impl std::fmt::Display for PolarizationAngle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.6}", self.0)
    }
}

/// Applies the polarization rotator `U(delta)`.
pub fn rotate(state: PolarizationAngle, delta: f64) -> PolarizationAngle {
    PolarizationAngle::new(state.0 + delta)
}

/// Who put a photon on the wire. Bookkeeping for diagnostics and for the
/// adversary's own marking; Alice and Bob never branch on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Legitimate,
    TrojanInjected,
    EveReplayed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Photon {
    polarization: PolarizationAngle,
    origin: Origin,
}

impl Photon {
    pub fn new(polarization: PolarizationAngle, origin: Origin) -> Self {
        Self { polarization, origin }
    }

    /// True polarization of the photon. Only the simulation harness and its
    /// diagnostics may read this; parties learn about a photon solely through
    /// [`measure`].
    pub fn polarization(&self) -> PolarizationAngle {
        self.polarization
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn rotate(&mut self, delta: f64) {
        self.polarization = rotate(self.polarization, delta);
    }

    /// Re-tags the photon without touching its state.
    pub fn with_origin(self, origin: Origin) -> Self {
        Self { origin, ..self }
    }
}

/// A two-outcome projective measurement. Outcome `0` collapses onto `axis`,
/// outcome `1` onto `axis + π/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementBasis {
    pub axis: PolarizationAngle,
}

impl MeasurementBasis {
    pub fn new(axis: PolarizationAngle) -> Self {
        Self { axis }
    }

    /// The `(+π/4, −π/4)` basis used by Bob and by Alice's analyzing detector.
    pub fn diagonal() -> Self {
        Self::new(PolarizationAngle::DIAGONAL)
    }

    pub fn outcome_axis(self, bit: u8) -> PolarizationAngle {
        if bit == 0 {
            self.axis
        } else {
            rotate(self.axis, FRAC_PI_2)
        }
    }

    /// Born probability of outcome `0`. States within [`ANGLE_TOLERANCE`] of
    /// either outcome axis are treated as exact eigenstates.
    pub fn prob_zero(self, state: PolarizationAngle) -> f64 {
        let d = state.distance(self.axis);
        if d < ANGLE_TOLERANCE {
            1.0
        } else if FRAC_PI_2 - d < ANGLE_TOLERANCE {
            0.0
        } else {
            d.cos().powi(2)
        }
    }
}

/// Projectively measures `photon`, consuming it.
pub fn measure(photon: Photon, basis: MeasurementBasis, rng: &mut RandomSource) -> u8 {
    let p0 = basis.prob_zero(photon.polarization);
    if rng.bernoulli(p0) {
        0
    } else {
        1
    }
}

/// The unit carried by the quantum channel. An empty pulse is vacuum.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Pulse {
    photons: Vec<Photon>,
    pub round_id: u64,
}

impl Pulse {
    pub fn vacuum(round_id: u64) -> Self {
        Self {
            photons: Vec::new(),
            round_id,
        }
    }

    pub fn from_photons(round_id: u64, photons: Vec<Photon>) -> Self {
        Self { photons, round_id }
    }

    pub fn single(polarization: PolarizationAngle, round_id: u64) -> Self {
        Self::from_photons(round_id, vec![Photon::new(polarization, Origin::Legitimate)])
    }

    pub fn photons(&self) -> &[Photon] {
        &self.photons
    }

    pub fn into_photons(self) -> Vec<Photon> {
        self.photons
    }

    pub fn len(&self) -> usize {
        self.photons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.photons.is_empty()
    }

    pub fn push(&mut self, photon: Photon) {
        self.photons.push(photon);
    }

    /// Removes one photon, if any. Models an ideal photon-number-splitting tap.
    pub fn split_off_one(&mut self) -> Option<Photon> {
        self.photons.pop()
    }

    pub fn rotate(&mut self, delta: f64) {
        for p in &mut self.photons {
            p.rotate(delta);
        }
    }

    pub fn count_origin(&self, origin: Origin) -> usize {
        self.photons.iter().filter(|p| p.origin == origin).count()
    }

    /// Moves every photon of `origin` out of the pulse with probability `prob`
    /// each. This is an adversary's separation of the photons it marked.
    pub fn extract_origin(&mut self, origin: Origin, prob: f64, rng: &mut RandomSource) -> Vec<Photon> {
        let mut taken = Vec::new();
        let mut kept = Vec::with_capacity(self.photons.len());
        for p in self.photons.drain(..) {
            if p.origin == origin && rng.bernoulli(prob) {
                taken.push(p);
            } else {
                kept.push(p);
            }
        }
        self.photons = kept;
        taken
    }

    /// Routes each photon independently to one of `parts` output ports.
    pub fn split_uniform(self, parts: usize, rng: &mut RandomSource) -> Vec<Pulse> {
        let mut out: Vec<Pulse> = (0..parts).map(|_| Pulse::vacuum(self.round_id)).collect();
        for p in self.photons {
            let i = rng.index(parts);
            out[i].photons.push(p);
        }
        out
    }
}

/// Prepares a coherent pulse whose photon count is Poisson(`mean_photons`).
pub fn make_pulse(
    polarization: PolarizationAngle,
    mean_photons: f64,
    round_id: u64,
    rng: &mut RandomSource,
) -> Result<Pulse> {
    if !mean_photons.is_finite() || mean_photons < 0.0 {
        return Err(Error::param(
            "mean_photons",
            format!("must be finite and >= 0, got {mean_photons}"),
        ));
    }
    let count = if mean_photons == 0.0 {
        0
    } else {
        let d = Poisson::new(mean_photons).map_err(|e| Error::param("mean_photons", e.to_string()))?;
        d.sample(rng) as usize
    };
    let photons = (0..count)
        .map(|_| Photon::new(polarization, Origin::Legitimate))
        .collect();
    Ok(Pulse::from_photons(round_id, photons))
}

/// Sends each photon to the tapped port with probability `tap_fraction`,
/// otherwise to the passed port. Blind to polarization and origin.
pub fn beam_split(pulse: Pulse, tap_fraction: f64, rng: &mut RandomSource) -> Result<(Pulse, Pulse)> {
    if !(0.0..=1.0).contains(&tap_fraction) {
        return Err(Error::param(
            "tap_fraction",
            format!("must lie in [0, 1], got {tap_fraction}"),
        ));
    }
    let round_id = pulse.round_id;
    let mut tapped = Pulse::vacuum(round_id);
    let mut passed = Pulse::vacuum(round_id);
    for p in pulse.photons {
        if rng.bernoulli(tap_fraction) {
            tapped.photons.push(p);
        } else {
            passed.photons.push(p);
        }
    }
    Ok((tapped, passed))
}
