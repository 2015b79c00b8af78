//! Augments ciphertexts directly. For the pixel cipher the augmented
//! ciphertext equals the encryption of the augmented plaintext under
//! correspondingly moved keystream planes; for the Tanaka baseline a
//! one-pixel shift produces blocks that no Tanaka key can explain.
//!
//! ```bash
//! cargo run -p pixcrypt --example encrypted_augmentation
//! ```

use pixcrypt::augment::{Augmentation, ShiftSpec};
use pixcrypt::block::{tanaka_block_signatures, tanaka_encrypt, TanakaKey};
use pixcrypt::keying::SplitMix64;
use pixcrypt::pixel::{encrypt, encrypt_with_planes};
use pixcrypt::{CipherConfig, KeySet, KeystreamPlanes, PlanarImage};

fn noise(w: usize, h: usize, seed: u64) -> PlanarImage {
    let mut rng = SplitMix64::new(seed);
    let rgb: Vec<u8> = (0..3 * w * h).map(|_| rng.next_u64() as u8).collect();
    PlanarImage::from_interleaved(w, h, &rgb).expect("consistent size")
}

fn main() -> pixcrypt::Result<()> {
    let keys = KeySet::from_master_seed(1, true);
    let cfg = CipherConfig::WITH_SHUFFLE;
    let img = noise(32, 32, 5);
    let planes = KeystreamPlanes::materialize(&keys, 32, 32)?;
    let cipher = encrypt(&img, &keys, cfg)?;

    for aug in [
        Augmentation::HFlip,
        Augmentation::VFlip,
        Augmentation::Shift(ShiftSpec::new(3, -2)),
        "padcrop:1,6".parse()?,
    ] {
        let lhs = aug.apply(&cipher)?;
        let rhs = encrypt_with_planes(&aug.apply(&img)?, &aug.remap_planes(&planes)?, cfg)?;
        println!("pixel cipher, {aug:<12} commutes: {}", lhs == rhs);
    }

    // 8 wide, 4 high: two Tanaka blocks side by side.
    let small = noise(8, 4, 9);
    let key = TanakaKey::from_seed(2);
    let shift = Augmentation::Shift(ShiftSpec::new(1, 0));
    let augmented_cipher = shift.apply(&tanaka_encrypt(&small, &key)?)?;
    let augmented_plain = shift.apply(&small)?;
    let reachable = tanaka_block_signatures(&augmented_plain)?;
    let observed = tanaka_block_signatures(&augmented_cipher)?;
    let broken: Vec<usize> = (0..observed.len()).filter(|&b| observed[b] != reachable[b]).collect();
    println!(
        "tanaka, shift:1,0: blocks {broken:?} of the shifted ciphertext are unreachable by any Tanaka key"
    );
    Ok(())
}
