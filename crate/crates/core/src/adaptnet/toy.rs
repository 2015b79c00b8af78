//! Desk-scale pattern-learning task.
//!
//! Samples are single encrypted pixels. Each comes from a random position of
//! one key set's keystream planes, so its label is the composite pattern
//! (`0..48`) at that position. Plaintext pixels are drawn from disjoint
//! per-channel value bands (R in `[0, 40)`, G in `[44, 84)`, B in `[88, 128)`),
//! which makes the pattern recoverable from the ciphertext alone. The model
//! is the adaptation stack followed by a 1x1 linear head with softmax
//! cross-entropy.

use super::{
    build_adaptation, conv1x1_backward, conv1x1_forward, sgd_step, AdaptationNet, Conv1x1Layer, Tensor4,
    TrainConfig, DEFAULT_M1, DEFAULT_M2,
};
use crate::error::{Error, Result};
use crate::keying::{KeySet, KeystreamPlanes, SplitMix64};
use crate::pixel::apply_pattern;

pub const PATTERNS: usize = 48;
const BANDS: [(u8, u8); 3] = [(0, 40), (44, 84), (88, 128)];

#[derive(Debug, Clone, PartialEq)]
pub struct PatternDataset {
    /// Encrypted pixels.
    pub pixels: Vec<[u8; 3]>,
    pub labels: Vec<u8>,
}

impl PatternDataset {
    /// `samples` pixels drawn at random positions of a `width`x`height` image
    /// encrypted under `keys` (which must include KS).
    pub fn generate(keys: &KeySet, width: usize, height: usize, samples: usize, seed: u64) -> Result<Self> {
        if keys.k_s.is_none() {
            return Err(Error::MissingShuffleKey);
        }
        let planes = KeystreamPlanes::materialize(keys, width, height)?;
        let mut rng = SplitMix64::new(seed);
        let mut pixels = Vec::with_capacity(samples);
        let mut labels = Vec::with_capacity(samples);
        for _ in 0..samples {
            let pos = rng.below((width * height) as u64) as usize;
            let pattern = planes.pattern_at(pos);
            let plain = BANDS.map(|(lo, hi)| lo + rng.below(u64::from(hi - lo)) as u8);
            pixels.push(apply_pattern(plain, pattern));
            labels.push(pattern);
        }
        Ok(Self { pixels, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `N x 3 x 1 x 1` tensor of the selected samples, scaled to `[-1, 1]`.
    fn batch(&self, idx: &[usize]) -> Tensor4 {
        let data = idx
            .iter()
            .flat_map(|&i| self.pixels[i].map(|s| f64::from(s) / 127.5 - 1.0))
            .collect();
        Tensor4::new([idx.len(), 3, 1, 1], data).expect("finite inputs")
    }
}

#[derive(Debug, Clone)]
pub struct ToyTrainResult {
    /// Mean training loss per epoch.
    pub loss_history: Vec<f64>,
    pub adaptation: AdaptationNet,
    pub head: Conv1x1Layer,
}

impl ToyTrainResult {
    /// Fraction of `data` classified correctly.
    pub fn accuracy(&self, data: &PatternDataset) -> Result<f64> {
        let idx: Vec<usize> = (0..data.len()).collect();
        let (feat, _) = self.adaptation.forward(&data.batch(&idx))?;
        let logits = conv1x1_forward(&feat, &self.head)?;
        let correct = idx
            .iter()
            .filter(|&&i| {
                let row = &logits.data()[i * PATTERNS..][..PATTERNS];
                let best = row
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(k, _)| k)
                    .unwrap_or(0);
                best == data.labels[i] as usize
            })
            .count();
        Ok(correct as f64 / data.len() as f64)
    }
}

/// Softmax cross-entropy per sample and the gradient of the batch mean.
fn softmax_xent(logits: &Tensor4, labels: &[u8]) -> (Vec<f64>, Tensor4) {
    let n = labels.len();
    let mut losses = Vec::with_capacity(n);
    let mut grad = Tensor4::zeros(logits.dims());
    for (i, &label) in labels.iter().enumerate() {
        let row = &logits.data()[i * PATTERNS..][..PATTERNS];
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = row.iter().map(|v| (v - max).exp()).collect();
        let sum: f64 = exps.iter().sum();
        losses.push(sum.ln() + max - row[label as usize]);
        let g = &mut grad.data_mut()[i * PATTERNS..][..PATTERNS];
        for (k, e) in exps.iter().enumerate() {
            let target = if k == label as usize { 1.0 } else { 0.0 };
            g[k] = (e / sum - target) / n as f64;
        }
    }
    (losses, grad)
}

struct Velocity(Vec<(Vec<f64>, Vec<f64>)>);

pub fn toy_train(data: &PatternDataset, cfg: &TrainConfig) -> Result<ToyTrainResult> {
    if data.is_empty() {
        return Err(Error::Training("empty dataset".into()));
    }
    cfg.validate()?;
    let mut init = SplitMix64::new(cfg.seed);
    let mut adaptation = build_adaptation(DEFAULT_M1, DEFAULT_M2, init.next_u64())?;
    let mut head = Conv1x1Layer::init_uniform(DEFAULT_M2, PATTERNS, &mut init)?;
    let mut order_rng = SplitMix64::new(init.next_u64());

    let zeros = |l: &Conv1x1Layer| (vec![0.0; l.weight.len()], vec![0.0; l.bias.len()]);
    let mut vel = Velocity(adaptation.layers.iter().chain([&head]).map(zeros).collect());

    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut per_sample = vec![0.0; data.len()];
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let lr = cfg.lr_at(epoch);
        order_rng.shuffle(&mut order);
        for idx in order.chunks(cfg.batch_size) {
            let x = data.batch(idx);
            let labels: Vec<u8> = idx.iter().map(|&i| data.labels[i]).collect();
            let (feat, cache) = adaptation.forward(&x)?;
            let logits = conv1x1_forward(&feat, &head)?;
            let (losses, grad_logits) = softmax_xent(&logits, &labels);
            for (&i, l) in idx.iter().zip(losses) {
                per_sample[i] = l;
            }
            let head_grads = conv1x1_backward(&feat, &head, &grad_logits)?;
            let net_grads = adaptation.backward(&cache, &head_grads.grad_x)?;

            let last = vel.0.len() - 1;
            let (vw, vb) = &mut vel.0[last];
            sgd_step(&mut head.weight, &head_grads.grad_w, vw, lr, cfg)?;
            sgd_step(&mut head.bias, &head_grads.grad_b, vb, lr, cfg)?;
            for ((layer, (gw, gb)), (vw, vb)) in adaptation
                .layers
                .iter_mut()
                .zip(&net_grads.layers)
                .zip(vel.0.iter_mut())
            {
                sgd_step(&mut layer.weight, gw, vw, lr, cfg)?;
                sgd_step(&mut layer.bias, gb, vb, lr, cfg)?;
            }
        }
        // Summed in sample order so the value does not depend on batching.
        history.push(per_sample.iter().sum::<f64>() / data.len() as f64);
    }
    Ok(ToyTrainResult {
        loss_history: history,
        adaptation,
        head,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> PatternDataset {
        PatternDataset::generate(&KeySet::from_master_seed(1, true), 32, 32, 2048, 7).unwrap()
    }

    #[test]
    fn labels_match_patterns() {
        let d = data();
        assert_eq!(d.len(), 2048);
        assert!(d.labels.iter().all(|&l| (l as usize) < PATTERNS));
        let no_ks = KeySet::new(1, 2, 3, None);
        assert!(PatternDataset::generate(&no_ks, 4, 4, 10, 0).is_err());
    }

    #[test]
    fn history_length_and_determinism() {
        let cfg = TrainConfig {
            epochs: 3,
            ..Default::default()
        };
        let a = toy_train(&data(), &cfg).unwrap();
        let b = toy_train(&data(), &cfg).unwrap();
        assert_eq!(a.loss_history.len(), 3);
        assert_eq!(a.loss_history, b.loss_history);
    }

    #[test]
    fn zero_lr_freezes_loss() {
        let cfg = TrainConfig {
            lr: 0.0,
            epochs: 4,
            ..Default::default()
        };
        let h = toy_train(&data(), &cfg).unwrap().loss_history;
        assert!(h.windows(2).all(|w| w[0] == w[1]), "{h:?}");
    }

    #[test]
    fn empty_dataset_rejected() {
        let empty = PatternDataset {
            pixels: vec![],
            labels: vec![],
        };
        assert!(matches!(
            toy_train(&empty, &TrainConfig::default()),
            Err(Error::Training(_))
        ));
    }

    #[test]
    fn softmax_gradient_sums_to_zero() {
        let logits = Tensor4::new([1, PATTERNS, 1, 1], (0..PATTERNS).map(|k| k as f64 * 0.1).collect()).unwrap();
        let (loss, grad) = softmax_xent(&logits, &[3]);
        assert!(loss[0] > 0.0);
        assert!(grad.data().iter().sum::<f64>().abs() < 1e-12);
    }
}
