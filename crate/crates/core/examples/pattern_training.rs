//! Trains the adaptation stack plus a linear head to recognize which of the
//! 48 per-pixel encryption patterns produced each encrypted pixel.
//!
//! ```bash
//! cargo run --release -p pixcrypt --example pattern_training
//! ```

use pixcrypt::adaptnet::{toy_train, PatternDataset, TrainConfig};
use pixcrypt::KeySet;

fn main() -> pixcrypt::Result<()> {
    let keys = KeySet::from_master_seed(2024, true);
    let train = PatternDataset::generate(&keys, 32, 32, 4096, 1)?;
    let test = PatternDataset::generate(&keys, 32, 32, 1024, 2)?;

    for seed in 0..3 {
        let cfg = TrainConfig {
            epochs: 10,
            seed,
            ..TrainConfig::default()
        };
        let result = toy_train(&train, &cfg)?;
        let losses: Vec<String> = result.loss_history.iter().map(|l| format!("{l:.3}")).collect();
        println!("seed={seed} loss=[{}]", losses.join(", "));
        println!("seed={seed} held_out_accuracy={:.3}", result.accuracy(&test)?);
    }
    Ok(())
}
