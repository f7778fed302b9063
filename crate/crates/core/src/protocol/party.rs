use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use super::{AnalyzingAngle, PhotonSource, ProtocolParams, ScreeningSet};
use crate::error::Result;
use crate::photonics::{beam_split, make_pulse, measure, MeasurementBasis, Origin, PolarizationAngle, Pulse};
use crate::protocol::sift::Detection;
use crate::rng::RandomSource;

/// `(−1)^k · π/4`.
pub(crate) fn key_phase(k: u8) -> f64 {
    if k == 0 {
        FRAC_PI_4
    } else {
        -FRAC_PI_4
    }
}

/// Alice draws `θ` uniformly on `[0, π)` and prepares a pulse polarized at `θ`.
pub fn alice_prepare(
    params: &ProtocolParams,
    round_id: u64,
    rng: &mut RandomSource,
) -> Result<(PolarizationAngle, Pulse)> {
    let theta = PolarizationAngle::new(rng.uniform() * PI);
    let pulse = match params.source {
        PhotonSource::SinglePhoton => Pulse::single(theta, round_id),
        PhotonSource::Pulse { mean_photons } => make_pulse(theta, mean_photons, round_id, rng)?,
    };
    Ok((theta, pulse))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BobChoice {
    pub phi: PolarizationAngle,
    pub b_index: usize,
    pub phi_star: Option<AnalyzingAngle>,
}

/// Bob picks `φ` (an analyzing angle with probability `p_a`) and a screening
/// index, then applies `U(φ + α_b)` to every photon.
pub fn bob_transform(
    params: &ProtocolParams,
    set: &ScreeningSet,
    mut pulse: Pulse,
    rng: &mut RandomSource,
) -> (Pulse, BobChoice) {
    let phi_star = rng.bernoulli(params.p_a).then(|| AnalyzingAngle::from_bit(rng.bit()));
    let phi = match phi_star {
        Some(a) => PolarizationAngle::new(a.radians()),
        None => PolarizationAngle::new(rng.uniform() * PI),
    };
    let b_index = 1 + rng.index(set.len());
    pulse.rotate(phi.radians() + set.angle(b_index).radians());
    (pulse, BobChoice { phi, b_index, phi_star })
}

/// One click of Alice's analyzing detector. `origin` is recorded for
/// diagnostics only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdClick {
    pub bit: u8,
    pub origin: Origin,
}

/// Alice applies `U(−θ + (−1)^k π/4 + α_a)` to every photon in the returning
/// pulse, diverts a fraction `1 − t` to the analyzing detector and measures
/// those photons in the diagonal basis.
pub fn alice_encode(
    params: &ProtocolParams,
    set: &ScreeningSet,
    mut pulse: Pulse,
    theta: PolarizationAngle,
    k: u8,
    a_index: usize,
    rng: &mut RandomSource,
) -> Result<(Pulse, Vec<AdClick>)> {
    pulse.rotate(-theta.radians() + key_phase(k) + set.angle(a_index).radians());
    let (tapped, to_bob) = beam_split(pulse, 1.0 - params.t, rng)?;
    let basis = MeasurementBasis::diagonal();
    let clicks = tapped
        .into_photons()
        .into_iter()
        .map(|p| {
            let origin = p.origin();
            AdClick {
                bit: measure(p, basis, rng),
                origin,
            }
        })
        .collect();
    Ok((to_bob, clicks))
}

/// Bob undoes `φ` and measures each photon in the diagonal basis. Disagreeing
/// outcomes within one pulse are reported as a double click.
pub fn bob_decode(mut pulse: Pulse, phi: PolarizationAngle, rng: &mut RandomSource) -> (Detection, usize) {
    let received = pulse.len();
    if received == 0 {
        return (Detection::Vacuum, 0);
    }
    pulse.rotate(-phi.radians());
    let basis = MeasurementBasis::diagonal();
    let mut outcomes = pulse.into_photons().into_iter().map(|p| measure(p, basis, rng));
    let first = outcomes.next().unwrap_or(0);
    // consume every photon so the draw count does not depend on early exit
    let agree = outcomes.fold(true, |acc, b| acc & (b == first));
    let det = if agree {
        Detection::Click(first)
    } else {
        Detection::DoubleClick
    };
    (det, received)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photonics::{rotate, Photon};
    use crate::protocol::integrity_bit;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn params(t: f64, p_a: f64) -> ProtocolParams {
        ProtocolParams {
            t,
            p_a,
            ..Default::default()
        }
    }

    #[test]
    fn single_photon_preparation() {
        let p = params(0.9, 0.2);
        let mut rng = RandomSource::from_seed(3);
        let (theta, pulse) = alice_prepare(&p, 5, &mut rng).unwrap();
        assert_eq!(pulse.len(), 1);
        assert_eq!(pulse.photons()[0].polarization(), theta);
        assert_eq!(pulse.round_id, 5);
        let (theta2, _) = alice_prepare(&p, 6, &mut rng).unwrap();
        assert_ne!(theta, theta2);
    }

    #[test]
    fn theta_uniform_kolmogorov_smirnov() {
        let p = params(0.9, 0.2);
        let mut rng = RandomSource::from_seed(4);
        let n = 100_000;
        let mut xs: Vec<f64> = (0..n)
            .map(|i| alice_prepare(&p, i, &mut rng).unwrap().0.radians() / PI)
            .collect();
        xs.sort_by(f64::total_cmp);
        let nf = n as f64;
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| ((i as f64 + 1.0) / nf - x).max(x - i as f64 / nf))
            .fold(0.0, f64::max);
        // asymptotic 1% critical value
        assert!(d < 1.628 / nf.sqrt(), "KS D = {d}");
    }

    #[test]
    fn bob_rotation_arithmetic() {
        let set = ScreeningSet::new(2).unwrap();
        let theta = PolarizationAngle::new(0.4);
        let mut rng = RandomSource::from_seed(5);
        for _ in 0..200 {
            let (out, c) = bob_transform(&params(0.9, 0.3), &set, Pulse::single(theta, 0), &mut rng);
            let expect = rotate(theta, c.phi.radians() + set.angle(c.b_index).radians());
            assert!(out.photons()[0].polarization().approx_eq(expect));
            if let Some(a) = c.phi_star {
                assert_eq!(c.phi.radians(), a.radians());
            }
        }
        // the worked example from the protocol description
        let mut p = Pulse::single(theta, 0);
        p.rotate(1.1 + FRAC_PI_3);
        assert!(p.photons()[0]
            .polarization()
            .approx_eq(PolarizationAngle::new(0.4 + 1.1 + FRAC_PI_3)));
    }

    #[test]
    fn analyzing_probability_edges() {
        let set = ScreeningSet::new(3).unwrap();
        let mut rng = RandomSource::from_seed(6);
        for _ in 0..500 {
            let (_, c) = bob_transform(&params(0.9, 0.0), &set, Pulse::vacuum(0), &mut rng);
            assert!(c.phi_star.is_none());
            let (_, c) = bob_transform(&params(0.9, 1.0), &set, Pulse::vacuum(0), &mut rng);
            let r = c.phi.radians();
            assert!(r == 0.0 || r == FRAC_PI_2);
            assert!((1..=3).contains(&c.b_index));
        }
    }

    #[test]
    fn encode_produces_state_after_both_rotations() {
        let set = ScreeningSet::new(2).unwrap();
        let theta = PolarizationAngle::new(2.2);
        let phi = 0.7;
        let mut rng = RandomSource::from_seed(7);
        for k in [0u8, 1] {
            for a in 1..=2 {
                for b in 1..=2 {
                    let mut pulse = Pulse::single(theta, 0);
                    pulse.rotate(phi + set.angle(b).radians());
                    let (out, clicks) = alice_encode(&params(1.0, 0.0), &set, pulse, theta, k, a, &mut rng).unwrap();
                    assert!(clicks.is_empty());
                    let expect =
                        PolarizationAngle::new(phi + key_phase(k) + set.angle(a).radians() + set.angle(b).radians());
                    assert!(out.photons()[0].polarization().approx_eq(expect));
                }
            }
        }
    }

    #[test]
    fn analyzing_detector_satisfies_integrity_in_all_cases() {
        let set = ScreeningSet::new(2).unwrap();
        let mut rng = RandomSource::from_seed(8);
        for k in [0u8, 1] {
            for phi_star in [AnalyzingAngle::Zero, AnalyzingAngle::HalfPi] {
                for (a, b) in [(1, 2), (2, 1)] {
                    let theta = PolarizationAngle::new(rng.uniform() * PI);
                    let photons = (0..50).map(|_| Photon::new(theta, Origin::Legitimate)).collect();
                    let mut pulse = Pulse::from_photons(0, photons);
                    pulse.rotate(phi_star.radians() + set.angle(b).radians());
                    let (_, clicks) = alice_encode(&params(0.0, 1.0), &set, pulse, theta, k, a, &mut rng).unwrap();
                    assert_eq!(clicks.len(), 50);
                    let expect = integrity_bit(k, phi_star);
                    assert!(clicks.iter().all(|c| c.bit == expect), "k={k} {phi_star:?}");
                }
            }
        }
        // the named case: φ* = 0, k = 1 gives AD bit 0
        assert_eq!(integrity_bit(1, AnalyzingAngle::Zero), 0);
    }

    #[test]
    fn bob_outcome_is_key_complement_on_matched_rounds() {
        let mut rng = RandomSource::from_seed(9);
        // state π/4 for k = 1, 3π/4 for k = 0, before Bob's −φ
        let phi = PolarizationAngle::new(1.3);
        for (k, state) in [(1u8, FRAC_PI_4), (0u8, 3.0 * FRAC_PI_4)] {
            for _ in 0..100 {
                let pulse = Pulse::single(PolarizationAngle::new(state + phi.radians()), 0);
                let (det, n) = bob_decode(pulse, phi, &mut rng);
                assert_eq!(n, 1);
                assert_eq!(det, Detection::Click(k ^ 1));
            }
        }
        assert_eq!(bob_decode(Pulse::vacuum(0), phi, &mut rng), (Detection::Vacuum, 0));
    }

    #[test]
    fn disagreeing_photons_are_a_double_click() {
        let mut rng = RandomSource::from_seed(10);
        let pulse = Pulse::from_photons(
            0,
            vec![
                Photon::new(PolarizationAngle::new(FRAC_PI_4), Origin::Legitimate),
                Photon::new(PolarizationAngle::new(3.0 * FRAC_PI_4), Origin::Legitimate),
            ],
        );
        assert_eq!(
            bob_decode(pulse, PolarizationAngle::ZERO, &mut rng),
            (Detection::DoubleClick, 2)
        );
    }
}
