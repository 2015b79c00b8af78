//! Builds a small synthetic CIFAR-10 batch, encrypts it in the encrypted
//! domain with cloud-side horizontal-flip augmentation appended, and reads
//! the result back in the unmodified CIFAR-10 record layout.
//!
//! ```bash
//! cargo run -p pixcrypt --example cifar_pipeline [OUT_DIR]
//! ```

use std::path::PathBuf;

use pixcrypt::augment::Augmentation;
use pixcrypt::cli::encrypt_batch;
use pixcrypt::imageio::{read_cifar_batch, write_cifar_batch, DatasetBatch, Record, CIFAR_RECORD_BYTES};
use pixcrypt::keying::SplitMix64;
use pixcrypt::{KeySet, PlanarImage, Scheme};

fn main() -> pixcrypt::Result<()> {
    let out_dir = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("pixcrypt-cifar"), PathBuf::from);
    std::fs::create_dir_all(&out_dir)?;

    let mut rng = SplitMix64::new(10);
    let records = (0..100)
        .map(|i| {
            let rgb: Vec<u8> = (0..3 * 1024).map(|_| rng.next_u64() as u8).collect();
            Ok(Record {
                label: (i % 10) as u8,
                image: PlanarImage::from_interleaved(32, 32, &rgb)?,
            })
        })
        .collect::<pixcrypt::Result<Vec<_>>>()?;
    let batch = DatasetBatch { records };
    let plain_path = out_dir.join("plain_batch.bin");
    std::fs::write(&plain_path, write_cifar_batch(&batch)?)?;

    let keys = KeySet::from_master_seed(99, true);
    for scheme in Scheme::ALL {
        let out = encrypt_batch(&batch, &keys, scheme, Some(Augmentation::HFlip), true)?;
        let bytes = write_cifar_batch(&out)?;
        assert_eq!(bytes.len(), 200 * CIFAR_RECORD_BYTES);
        let reread = read_cifar_batch(&bytes)?;
        assert_eq!(reread, out);
        let path = out_dir.join(format!("{}_batch.bin", scheme.name().replace('+', "_")));
        std::fs::write(&path, bytes)?;
        println!("{scheme:<14} {} records -> {}", reread.len(), path.display());
    }
    Ok(())
}
