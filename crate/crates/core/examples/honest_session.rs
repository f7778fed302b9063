//! One honest session: Alice and Bob end up with the same key and the
//! analyzing detector never fires out of turn.

use screenqkd::protocol::{run_session, PhotonSource, ProtocolParams};

fn main() -> screenqkd::Result<()> {
    let params = ProtocolParams {
        n: 2,
        rounds: 20_000,
        p_a: 0.2,
        t: 0.9,
        source: PhotonSource::SinglePhoton,
        seed: 1,
        ..Default::default()
    };
    let outcome = run_session(&params, 0, None)?;
    let t = &outcome.transcript;
    let s = &t.sift;

    let preview: String = s.alice_key.iter().take(32).map(|b| char::from(b'0' + b)).collect();
    println!("rounds           {}", t.rounds.len());
    println!("key bits         {}", s.alice_key.len());
    println!("first bits       {preview}");
    println!("keys equal       {}", s.alice_key == s.bob_key);
    println!(
        "integrity checks {} ({} violations)",
        s.integrity_checks, s.integrity_violations
    );
    println!("alice hash       {}", hex(&s.alice_hash));
    println!("bob hash         {}", hex(&s.bob_hash));
    println!("verdict          {}", s.verdict.label());

    // a pulsed source works the same way; multi-photon rounds can double-click
    let pulsed = ProtocolParams {
        source: PhotonSource::Pulse { mean_photons: 0.5 },
        ..params
    };
    let s = run_session(&pulsed, 0, None)?.transcript.sift;
    println!(
        "pulsed source: {} key bits, verdict {}",
        s.alice_key.len(),
        s.verdict.label()
    );
    Ok(())
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
