//! Key-space sizes of the pixel cipher against the Tanaka baseline, plus an
//! exhaustive brute-force search on a two-pixel ciphertext.
//!
//! ```bash
//! cargo run -p pixcrypt --example keyspace_report
//! ```

use pixcrypt::keyspace::{crossover_pixels, pixel_count, proposed_keyspace_with_digits, tanaka_keyspace, toy_brute_force};
use pixcrypt::pixel::encrypt;
use pixcrypt::{CipherConfig, KeySet, PlanarImage};

fn main() -> pixcrypt::Result<()> {
    for (w, h) in [(32, 32), (96, 96)] {
        let report = proposed_keyspace_with_digits(pixel_count(w, h), true);
        println!("{w}x{h}\n{report}");
    }
    println!("tanaka: {:.2} bits", tanaka_keyspace());
    println!("smallest image exceeding tanaka: {} pixels\n", crossover_pixels());

    let plain = PlanarImage::from_interleaved(2, 1, &[12, 200, 77, 90, 90, 3])?;
    let keys = KeySet::from_master_seed(5, true);
    let cipher = encrypt(&plain, &keys, CipherConfig::WITH_SHUFFLE)?;
    let all = toy_brute_force(&cipher, true, |_| true)?;
    let hits = toy_brute_force(&cipher, true, |cand| *cand == plain)?;
    println!("2-pixel brute force: {all} candidates, {hits} reproduce the plaintext");
    Ok(())
}
