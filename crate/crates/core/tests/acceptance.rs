//! Acceptance suite. Prints one PASS/FAIL line per criterion, then fails if
//! any criterion failed. Run with `--nocapture` to see the lines.

use std::time::{Duration, Instant};

use pixcrypt::adaptnet::gradcheck::TOLERANCE;
use pixcrypt::adaptnet::run_gradcheck;
use pixcrypt::adaptnet::toy::{toy_train, PatternDataset};
use pixcrypt::adaptnet::TrainConfig;
use pixcrypt::augment::{Augmentation, ShiftSpec};
use pixcrypt::block::{tanaka_block_signatures, tanaka_encrypt, TanakaKey};
use pixcrypt::cli::{cmd_dataset, EXIT_OK};
use pixcrypt::imageio::{read_cifar_batch, read_ppm, write_cifar_batch, write_ppm, DatasetBatch, Record};
use pixcrypt::keying::{np_bit, SplitMix64};
use pixcrypt::keyspace::{proposed_keyspace, tanaka_keyspace};
use pixcrypt::pixel::{encrypt_with_planes, encrypt};
use pixcrypt::{CipherConfig, KeySet, KeystreamPlanes, PlanarImage, Scheme};

const ROUND_TRIP_TRIPLES: usize = 1000;
const ROUND_TRIP_BUDGET: Duration = Duration::from_secs(10);
const BALANCE_INDICES: u64 = 100_000;
const BALANCE_RANGE: (f64, f64) = (0.49, 0.51);
const KEYSPACE_TOL_BITS: f64 = 1e-6;
/// Independent oracles, computed with exact rational arithmetic:
/// 1024 * log2(48) and log2(96!) + 96.
const LOG2_48_POW_1024: f64 = 5719.001_600_738_464;
const LOG2_TANAKA: f64 = 594.277_157_793_903;
const COMMUTATION_IMAGES: usize = 200;
const GRADCHECK_CASES: usize = 20;
const TOY_SEEDS: [u64; 3] = [0, 1, 2];
const TOY_BUDGET: Duration = Duration::from_secs(60);
const DATASET_RECORDS: usize = 50_000;
const DATASET_BUDGET: Duration = Duration::from_secs(60);

struct Verdicts(Vec<(&'static str, bool, String)>);

impl Verdicts {
    fn record(&mut self, name: &'static str, pass: bool, detail: String) {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        self.0.push((name, pass, detail));
    }
}

fn random_image(rng: &mut SplitMix64, w: usize, h: usize) -> PlanarImage {
    let rgb: Vec<u8> = (0..3 * w * h).map(|_| rng.next_u64() as u8).collect();
    PlanarImage::from_interleaved(w, h, &rgb).unwrap()
}

fn random_keys(rng: &mut SplitMix64) -> KeySet {
    KeySet::new(rng.next_u64(), rng.next_u64(), rng.next_u64(), Some(rng.next_u64()))
}

fn round_trip() -> (bool, String) {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0xACCE);
    let mut failures = 0;
    for scheme in Scheme::ALL {
        for _ in 0..ROUND_TRIP_TRIPLES {
            let (w, h) = if scheme.is_block() {
                (4 * (1 + rng.below(16) as usize), 4 * (1 + rng.below(16) as usize))
            } else {
                (1 + rng.below(64) as usize, 1 + rng.below(64) as usize)
            };
            let img = random_image(&mut rng, w, h);
            let keys = random_keys(&mut rng);
            let enc = scheme.encrypt(&img, &keys).unwrap();
            if scheme.decrypt(&enc, &keys).unwrap() != img {
                failures += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    (
        failures == 0 && elapsed < ROUND_TRIP_BUDGET,
        format!(
            "{} triples x 4 schemes, {failures} mismatches, {:.2} s (limit {} s)",
            ROUND_TRIP_TRIPLES,
            elapsed.as_secs_f64(),
            ROUND_TRIP_BUDGET.as_secs()
        ),
    )
}

fn balance() -> (bool, String) {
    let keys = KeySet::from_master_seed(2024, true);
    let fractions: Vec<f64> = keys
        .channel_seeds()
        .iter()
        .map(|&seed| {
            let ones: u64 = (0..BALANCE_INDICES).map(|i| u64::from(np_bit(seed, i))).sum();
            ones as f64 / BALANCE_INDICES as f64
        })
        .collect();
    let pass = fractions.iter().all(|f| (BALANCE_RANGE.0..=BALANCE_RANGE.1).contains(f));
    (pass, format!("fractions R,G,B = {fractions:.4?} over {BALANCE_INDICES} indices"))
}

fn keyspace() -> (bool, String) {
    let proposed = proposed_keyspace(1024, true).log2_total;
    let tanaka = tanaka_keyspace();
    let dp = (proposed - LOG2_48_POW_1024).abs();
    let dt = (tanaka - LOG2_TANAKA).abs();
    (
        dp <= KEYSPACE_TOL_BITS && dt <= KEYSPACE_TOL_BITS && proposed > tanaka,
        format!("proposed(1024) = {proposed:.9} (err {dp:.1e}), tanaka = {tanaka:.9} (err {dt:.1e})"),
    )
}

fn transforms() -> Vec<Augmentation> {
    let mut ts = vec![Augmentation::HFlip, Augmentation::VFlip];
    for d in (1..=4isize).flat_map(|d| [d, -d]) {
        for (dx, dy) in [(d, 0), (0, d), (d, d)] {
            ts.push(Augmentation::Shift(ShiftSpec::new(dx, dy)));
        }
    }
    ts
}

/// Shifting a Tanaka ciphertext by one pixel on an 8-wide, 4-high image.
/// Every Tanaka key preserves each block's folded-nibble signature, so if
/// the augmented ciphertext's signatures differ from those of the augmented
/// plaintext, no key maps `T(I)` to `T(E_K(I))`.
fn tanaka_witness() -> (bool, String) {
    let mut rng = SplitMix64::new(77);
    let img = random_image(&mut rng, 8, 4);
    let key = TanakaKey::from_seed(rng.next_u64());
    let t = Augmentation::Shift(ShiftSpec::new(1, 0));
    let lhs = t.apply(&tanaka_encrypt(&img, &key).unwrap()).unwrap();
    let plain = t.apply(&img).unwrap();
    let reachable = tanaka_block_signatures(&plain).unwrap();
    // Sanity check of the invariant itself on a few keys.
    let invariant = (0..16).all(|s| tanaka_block_signatures(&tanaka_encrypt(&plain, &TanakaKey::from_seed(s)).unwrap()).unwrap() == reachable);
    let distinct = tanaka_block_signatures(&lhs).unwrap() != reachable;
    (invariant && distinct, format!("signature invariant holds: {invariant}, shifted ciphertext unreachable: {distinct}"))
}

fn commutation() -> (bool, String) {
    let ts = transforms();
    let mut rng = SplitMix64::new(0xC0);
    let mut checked = 0;
    let mut mismatches = 0;
    for k in 0..COMMUTATION_IMAGES {
        // Sides of at least 5 keep every shift of up to 4 in range.
        let (w, h) = (5 + rng.below(36) as usize, 5 + rng.below(36) as usize);
        let img = random_image(&mut rng, w, h);
        let keys = random_keys(&mut rng);
        let cfg = CipherConfig { with_shuffle: k % 2 == 0 };
        let planes = KeystreamPlanes::materialize(&keys, w, h).unwrap();
        let cipher = encrypt(&img, &keys, cfg).unwrap();
        for t in &ts {
            let lhs = t.apply(&cipher).unwrap();
            let rhs = encrypt_with_planes(&t.apply(&img).unwrap(), &t.remap_planes(&planes).unwrap(), cfg).unwrap();
            checked += 1;
            if lhs != rhs {
                mismatches += 1;
            }
        }
    }
    let (witness, witness_detail) = tanaka_witness();
    (
        mismatches == 0 && witness,
        format!(
            "{checked} (image, transform) pairs over {} transforms, {mismatches} mismatches; tanaka shift:1,0 {witness_detail}",
            ts.len()
        ),
    )
}

fn gradcheck() -> (bool, String) {
    let report = run_gradcheck(0, GRADCHECK_CASES).unwrap();
    let errs: Vec<String> = report
        .ops()
        .iter()
        .map(|op| format!("{op} {:.2e}", report.max_error(op)))
        .collect();
    (
        report.passed(TOLERANCE),
        format!("{GRADCHECK_CASES} cases per op, max rel err: {} (limit {TOLERANCE:e})", errs.join(", ")),
    )
}

fn toy_training() -> (bool, String) {
    let start = Instant::now();
    let mut decreasing = 0;
    let mut details = Vec::new();
    for seed in TOY_SEEDS {
        let keys = KeySet::from_master_seed(100 + seed, true);
        let data = PatternDataset::generate(&keys, 32, 32, 4096, seed).unwrap();
        let cfg = TrainConfig {
            epochs: 10,
            seed,
            ..Default::default()
        };
        let h = toy_train(&data, &cfg).unwrap().loss_history;
        if h[9] < h[0] {
            decreasing += 1;
        }
        details.push(format!("seed {seed}: {:.3} -> {:.3}", h[0], h[9]));
    }
    let elapsed = start.elapsed();
    (
        decreasing == TOY_SEEDS.len() && elapsed < TOY_BUDGET,
        format!(
            "{decreasing}/{} seeds decrease ({}), {:.2} s (limit {} s)",
            TOY_SEEDS.len(),
            details.join("; "),
            elapsed.as_secs_f64(),
            TOY_BUDGET.as_secs()
        ),
    )
}

fn format_fidelity() -> (bool, String) {
    let mut rng = SplitMix64::new(5);
    let mut ppm_ok = true;
    for _ in 0..50 {
        let (w, h) = (1 + rng.below(64) as usize, 1 + rng.below(64) as usize);
        let img = random_image(&mut rng, w, h);
        let bytes = write_ppm(&img);
        let back = read_ppm(&bytes).unwrap();
        ppm_ok &= back == img && write_ppm(&back) == bytes;
    }

    let records: Vec<Record> = (0..DATASET_RECORDS)
        .map(|i| Record {
            label: (i % 10) as u8,
            image: random_image(&mut rng, 32, 32),
        })
        .collect();
    let bytes = write_cifar_batch(&DatasetBatch { records }).unwrap();
    let cifar_ok = write_cifar_batch(&read_cifar_batch(&bytes).unwrap()).unwrap() == bytes;

    let dir = tempfile::tempdir().unwrap();
    let (input, key, output) = (dir.path().join("in.bin"), dir.path().join("k.txt"), dir.path().join("out.bin"));
    std::fs::write(&input, &bytes).unwrap();
    std::fs::write(&key, KeySet::from_master_seed(9, true).to_key_file()).unwrap();
    let start = Instant::now();
    let outcome = cmd_dataset(&input, &key, Scheme::PixelShuffle, &output, None, false);
    let elapsed = start.elapsed();
    let out_len = std::fs::metadata(&output).map(|m| m.len()).unwrap_or(0);
    let dataset_ok = outcome.exit_code == EXIT_OK && out_len == bytes.len() as u64 && elapsed < DATASET_BUDGET;
    (
        ppm_ok && cifar_ok && dataset_ok,
        format!(
            "ppm round trip: {ppm_ok}, cifar round trip: {cifar_ok}, {DATASET_RECORDS}-record cmd_dataset exit {} in {:.2} s (limit {} s)",
            outcome.exit_code,
            elapsed.as_secs_f64(),
            DATASET_BUDGET.as_secs()
        ),
    )
}

#[test]
fn acceptance() {
    let mut v = Verdicts(Vec::new());
    println!();
    let criteria: [(&'static str, fn() -> (bool, String)); 7] = [
        ("round-trip exactness", round_trip),
        ("keystream balance", balance),
        ("key-space math", keyspace),
        ("commutation", commutation),
        ("gradient checks", gradcheck),
        ("pattern-learning surrogate", toy_training),
        ("format fidelity", format_fidelity),
    ];
    for (name, check) in criteria {
        let (pass, detail) = check();
        v.record(name, pass, detail);
    }
    let failed: Vec<&str> = v.0.iter().filter(|c| !c.1).map(|c| c.0).collect();
    println!("{}/{} criteria passed", v.0.len() - failed.len(), v.0.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
