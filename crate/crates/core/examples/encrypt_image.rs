//! Encrypts a synthetic image with the pixel cipher, with and without color
//! shuffling, writes the results as PPM files and checks decryption.
//!
//! ```bash
//! cargo run -p pixcrypt --example encrypt_image [OUT_DIR]
//! ```

use std::path::PathBuf;

use pixcrypt::imageio::write_ppm;
use pixcrypt::pixel::{decrypt, encrypt};
use pixcrypt::{CipherConfig, KeySet, PlanarImage};

/// A smooth color gradient with a bright disc, so structure is easy to see.
fn test_card(size: usize) -> PlanarImage {
    let mut rgb = Vec::with_capacity(3 * size * size);
    let c = size as f64 / 2.0;
    for y in 0..size {
        for x in 0..size {
            let r = (((x as f64 - c).powi(2) + (y as f64 - c).powi(2)).sqrt()) < size as f64 / 4.0;
            let v = |t: usize| (t * 255 / (size - 1)) as u8;
            if r {
                rgb.extend([250, 240, 60]);
            } else {
                rgb.extend([v(x), v(y), 255 - v(x)]);
            }
        }
    }
    PlanarImage::from_interleaved(size, size, &rgb).expect("consistent size")
}

fn main() -> pixcrypt::Result<()> {
    let out_dir = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("pixcrypt-encrypt-image"), PathBuf::from);
    std::fs::create_dir_all(&out_dir)?;

    let img = test_card(96);
    let keys = KeySet::from_master_seed(7, true);
    println!("key file:\n{}", keys.to_key_file());

    std::fs::write(out_dir.join("plain.ppm"), write_ppm(&img))?;
    for (name, cfg) in [
        ("negpos", CipherConfig::NEGPOS_ONLY),
        ("negpos_shuffle", CipherConfig::WITH_SHUFFLE),
    ] {
        let enc = encrypt(&img, &keys, cfg)?;
        assert_eq!((enc.width(), enc.height()), (img.width(), img.height()));
        assert_eq!(decrypt(&enc, &keys, cfg)?, img);
        let path = out_dir.join(format!("{name}.ppm"));
        std::fs::write(&path, write_ppm(&enc))?;
        let changed = img
            .to_interleaved()
            .iter()
            .zip(enc.to_interleaved())
            .filter(|(a, b)| **a != *b)
            .count();
        println!(
            "{name}: wrote {} ({changed} of {} samples changed), decrypts exactly",
            path.display(),
            3 * img.pixel_count()
        );
    }
    Ok(())
}
