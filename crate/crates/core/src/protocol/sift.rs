use std::io::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256, Sha512_256};

use super::{integrity_bit, AdClick, AnalyzingAngle, ProtocolParams, ScreeningSet};
use crate::error::{Error, Result};
use crate::photonics::PolarizationAngle;

/// What Bob's detector pair reported for one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detection {
    Vacuum,
    Click(u8),
    /// Photons of one pulse gave different outcomes; the round is discarded.
    DoubleClick,
}

impl Detection {
    pub fn bit(self) -> Option<u8> {
        match self {
            Detection::Click(b) => Some(b),
            _ => None,
        }
    }
}

/// Full private transcript of one round, for both parties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round_id: u64,
    pub theta: PolarizationAngle,
    pub phi: PolarizationAngle,
    /// `Some(φ*)` when Bob used an analyzing angle; then `phi == φ*`.
    pub phi_star: Option<AnalyzingAngle>,
    pub a_index: usize,
    pub b_index: usize,
    pub k: u8,
    pub ad_clicks: Vec<AdClick>,
    pub bob_received_photons: usize,
    pub bob: Detection,
}

impl RoundRecord {
    pub fn is_analyzing(&self) -> bool {
        self.phi_star.is_some()
    }

    pub fn bob_outcome(&self) -> Option<u8> {
        self.bob.bit()
    }
}

/// Public disclosure made after all rounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Announcement {
    pub a_indices: Vec<usize>,
    pub b_indices: Vec<usize>,
    pub analyzing_flags: Vec<bool>,
    pub phi_star_values: Vec<Option<AnalyzingAngle>>,
}

impl Announcement {
    pub fn from_rounds(rounds: &[RoundRecord]) -> Self {
        Self {
            a_indices: rounds.iter().map(|r| r.a_index).collect(),
            b_indices: rounds.iter().map(|r| r.b_index).collect(),
            analyzing_flags: rounds.iter().map(RoundRecord::is_analyzing).collect(),
            phi_star_values: rounds.iter().map(|r| r.phi_star).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.a_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a_indices.is_empty()
    }

    pub fn check_lengths(&self, rounds: usize) -> Result<()> {
        let lens = [
            self.a_indices.len(),
            self.b_indices.len(),
            self.analyzing_flags.len(),
            self.phi_star_values.len(),
        ];
        if lens.iter().any(|&l| l != rounds) {
            return Err(Error::Protocol(format!(
                "announcement lengths {lens:?} do not match {rounds} rounds"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DigestAlgorithm {
    #[default]
    Sha256,
    Sha512_256,
}

/// Packs bits big-endian into bytes, zero-padding the final byte.
pub fn pack_bits(bits: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b != 0 {
            out[i / 8] |= 0x80 >> (i % 8);
        }
    }
    out
}

/// 256-bit digest over the packed key.
pub fn digest_key(alg: DigestAlgorithm, bits: &[u8]) -> [u8; 32] {
    let packed = pack_bits(bits);
    let mut out = [0u8; 32];
    match alg {
        DigestAlgorithm::Sha256 => out.copy_from_slice(&Sha256::digest(&packed)),
        DigestAlgorithm::Sha512_256 => out.copy_from_slice(&Sha512_256::digest(&packed)),
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accepted,
    HashMismatch,
    IntegrityViolation,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Accepted => "accepted",
            Verdict::HashMismatch => "hash_mismatch",
            Verdict::IntegrityViolation => "integrity_violation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiftOutcome {
    pub alice_key: Vec<u8>,
    pub bob_key: Vec<u8>,
    /// Round ids contributing to the key, in key order.
    pub key_rounds: Vec<u64>,
    pub alice_hash: [u8; 32],
    pub bob_hash: [u8; 32],
    pub integrity_checks: u64,
    pub integrity_violations: u64,
    pub verdict: Verdict,
}

/// Sifts the key from matched non-analyzing rounds with a Bob click, checks
/// the integrity condition on every analyzing-detector click of matched
/// analyzing rounds, and compares key digests.
///
/// Matching and analyzing status come from the public announcement; key bits,
/// `k` and detector clicks come from each party's private round data.
pub fn sift_and_verify(
    params: &ProtocolParams,
    rounds: &[RoundRecord],
    announcement: &Announcement,
) -> Result<SiftOutcome> {
    announcement.check_lengths(rounds.len())?;
    let set = ScreeningSet::new(params.n)?;
    let mut alice_key = Vec::new();
    let mut bob_key = Vec::new();
    let mut key_rounds = Vec::new();
    let mut checks = 0u64;
    let mut violations = 0u64;

    for (i, r) in rounds.iter().enumerate() {
        if !set.matched(announcement.a_indices[i], announcement.b_indices[i]) {
            continue;
        }
        if announcement.analyzing_flags[i] {
            let phi_star = announcement.phi_star_values[i]
                .ok_or_else(|| Error::Protocol(format!("round {i} flagged analyzing without a φ* value")))?;
            let expected = integrity_bit(r.k, phi_star);
            for c in &r.ad_clicks {
                checks += 1;
                if c.bit != expected {
                    violations += 1;
                }
            }
        } else if let Some(ob) = r.bob_outcome() {
            alice_key.push(r.k);
            bob_key.push(ob ^ 1);
            key_rounds.push(r.round_id);
        }
    }

    let alice_hash = digest_key(params.digest, &alice_key);
    let bob_hash = digest_key(params.digest, &bob_key);
    let verdict = if violations > 0 {
        Verdict::IntegrityViolation
    } else if alice_hash != bob_hash {
        Verdict::HashMismatch
    } else {
        Verdict::Accepted
    };
    Ok(SiftOutcome {
        alice_key,
        bob_key,
        key_rounds,
        alice_hash,
        bob_hash,
        integrity_checks: checks,
        integrity_violations: violations,
        verdict,
    })
}

/// Everything both parties recorded in one session, plus the sifting result.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionTranscript {
    pub params: ProtocolParams,
    pub trial: u64,
    pub rounds: Vec<RoundRecord>,
    pub announcement: Announcement,
    pub sift: SiftOutcome,
}

#[derive(Serialize)]
struct TranscriptHeader<'a> {
    kind: &'static str,
    trial: u64,
    params: &'a ProtocolParams,
    verdict: Verdict,
    key_length: usize,
    alice_key: String,
    bob_key: String,
    alice_hash: String,
    bob_hash: String,
    integrity_checks: u64,
    integrity_violations: u64,
}

fn bit_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl SessionTranscript {
    pub fn verdict(&self) -> Verdict {
        self.sift.verdict
    }

    /// Writes a JSON-lines audit log: one header line, then one line per round.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header = TranscriptHeader {
            kind: "session",
            trial: self.trial,
            params: &self.params,
            verdict: self.sift.verdict,
            key_length: self.sift.alice_key.len(),
            alice_key: bit_string(&self.sift.alice_key),
            bob_key: bit_string(&self.sift.bob_key),
            alice_hash: hex(&self.sift.alice_hash),
            bob_hash: hex(&self.sift.bob_hash),
            integrity_checks: self.sift.integrity_checks,
            integrity_violations: self.sift.integrity_violations,
        };
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for r in &self.rounds {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}
