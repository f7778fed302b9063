//! Reference values computed from scratch, without the simulator.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

pub fn alphas(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 * PI / (2.0 * (n as f64 + 1.0))).collect()
}

fn cos2(x: f64) -> f64 {
    x.cos().powi(2)
}

fn sin2(x: f64) -> f64 {
    x.sin().powi(2)
}

/// Impersonation error rate on sifted bits, by enumeration.
///
/// Alice's photon leaves her as `α_a + s_k` (`s_0 = π/4`, `s_1 = −π/4`).
/// Eve reads it along `α_g + π/4`. She then writes `s_e` onto Bob's photon,
/// which reaches his final measurement at `α_b + s_e` instead of `π/2 + s_k`.
/// Sums over matched `a`, Eve's uniform guess `g`, `k`, Eve's outcome and
/// Bob's outcome.
pub fn impersonation_qber(n: usize) -> f64 {
    let al = alphas(n);
    let s = |bit: u8| if bit == 0 { FRAC_PI_4 } else { -FRAC_PI_4 };
    let mut total = 0.0;
    for a in 0..n {
        let b = n - 1 - a;
        for g in 0..n {
            for k in [0u8, 1] {
                let leaving = al[a] + s(k);
                for e in [0u8, 1] {
                    // Eve's outcome 0 is the axis α_g + π/4
                    let p_e0 = cos2(leaving - (al[g] + FRAC_PI_4));
                    let p_e = if e == 0 { p_e0 } else { 1.0 - p_e0 };
                    // Bob's key bit j means collapse onto π/2 + s_j
                    let arrival = al[b] + s(e);
                    for j in [0u8, 1] {
                        let p_j = cos2(arrival - (FRAC_PI_2 + s(j)));
                        if j != k {
                            total += p_e * p_j;
                        }
                    }
                }
            }
        }
    }
    total / (n * n * 2) as f64
}

/// Alice-observable violation probability for a photon leaving her encoder
/// at `angle` on an analyzing round. The honest photon sits at
/// `φ* + π/2 + s_k`, and the detector is read on the diagonal axis.
fn violation_at(angle: f64, k: u8, phi_star: f64) -> f64 {
    let s = if k == 0 { FRAC_PI_4 } else { -FRAC_PI_4 };
    let honest = phi_star + FRAC_PI_2 + s;
    sin2(angle - honest)
}

/// A Trojan photon carrying Alice's `θ` reaches the analyzing detector at
/// `α_a + s_k`. Averages the violation probability over `a`, `k`, `φ*`.
pub fn composite_violation_per_probe(n: usize) -> f64 {
    let al = alphas(n);
    let mut total = 0.0;
    let mut cases = 0.0;
    for &a in &al {
        for k in [0u8, 1] {
            let s = if k == 0 { FRAC_PI_4 } else { -FRAC_PI_4 };
            for phi_star in [0.0, FRAC_PI_2] {
                total += violation_at(a + s, k, phi_star);
                cases += 1.0;
            }
        }
    }
    total / cases
}

/// The single case worked out by hand: `k = 0`, `φ* = 0`, `α_a = π/6`.
pub fn composite_violation_case() -> f64 {
    violation_at(PI / 6.0 + FRAC_PI_4, 0, 0.0)
}

/// Fraction of returning photons that are Eve's in the composite attack:
/// one per pulse with at least two photons, over the mean photon number.
pub fn composite_probe_fraction(mu: f64) -> f64 {
    (1.0 - (-mu).exp() * (1.0 + mu)) / mu
}

/// Violation probability per probe when the probe's angle picks up
/// Alice's uniform `−θ`, as a numerical integral over `θ`.
pub fn uniform_theta_violation(n: usize, probe: f64) -> f64 {
    let al = alphas(n);
    let steps = 20_000;
    let mut total = 0.0;
    let mut cases = 0.0;
    for &a in &al {
        for k in [0u8, 1] {
            let s = if k == 0 { FRAC_PI_4 } else { -FRAC_PI_4 };
            for phi_star in [0.0, FRAC_PI_2] {
                let mut acc = 0.0;
                for i in 0..steps {
                    let theta = (i as f64 + 0.5) * PI / steps as f64;
                    acc += violation_at(probe - theta + a + s, k, phi_star);
                }
                total += acc / steps as f64;
                cases += 1.0;
            }
        }
    }
    total / cases
}

/// Eve's accuracy reading such a probe along `α_a + π/4`, integrated over `θ`.
pub fn uniform_theta_accuracy(n: usize, probe: f64) -> f64 {
    let al = alphas(n);
    let steps = 20_000;
    let mut total = 0.0;
    for &a in &al {
        let mut acc = 0.0;
        for i in 0..steps {
            let theta = (i as f64 + 0.5) * PI / steps as f64;
            // k = 0 leaves at a + π/4; outcome 0 along a + π/4 is correct
            acc += cos2(probe - theta + a + FRAC_PI_4 - (a + FRAC_PI_4));
        }
        total += acc / steps as f64;
    }
    total / al.len() as f64
}

/// Conclusive fraction of non-vacuum split attempts.
///
/// A Poisson(`μ`) pulse split evenly over `N` parts gives independent
/// Poisson(`μ/N`) parts. One hypothesis survives iff the true part is
/// nonempty and every other part is nonempty with mixed outcomes.
pub fn beamsplit_conclusive_rate(n: usize, mu: f64) -> f64 {
    let al = alphas(n);
    let lam = mu / n as f64;
    let mixed = |p: f64| 1.0 - (-lam * (1.0 - p)).exp() - (-lam * p).exp() + (-lam).exp();
    let nonempty = 1.0 - (-lam).exp();
    let mut total = 0.0;
    for a in 0..n {
        let mut prod = nonempty;
        for j in 0..n {
            if j != a {
                // part j reads a k = 0 photon as 0 with probability cos²(α_a − α_j)
                prod *= mixed(cos2(al[a] - al[j]));
            }
        }
        total += prod;
    }
    total / n as f64 / (1.0 - (-mu).exp())
}

/// Standard deviation of a binomial proportion.
pub fn sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}
