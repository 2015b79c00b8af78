//! Numeric core of the adaptation network: 1x1 convolutions, ReLU, SGD with
//! momentum, and a two-layer stack `Conv(3->M1) ReLU Conv(M1->M2) ReLU`.
//!
//! All arithmetic is `f64` over NCHW tensors. A 1x1 convolution mixes
//! channels at each spatial position independently, so it commutes with any
//! positional transform of its input.

pub mod gradcheck;
pub mod toy;

use crate::error::{Error, Result};
use crate::keying::SplitMix64;

pub use gradcheck::{run_gradcheck, run_gradcheck_with, GradcheckReport, OpCheck};
pub use toy::{toy_train, PatternDataset, ToyTrainResult};

pub const DEFAULT_M1: usize = 8;
pub const DEFAULT_M2: usize = 32;

/// Dense `N x C x H x W` tensor, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    dims: [usize; 4],
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn new(dims: [usize; 4], data: Vec<f64>) -> Result<Self> {
        let len: usize = dims.iter().product();
        if data.len() != len {
            return Err(Error::Shape(format!(
                "{dims:?} needs {len} values, got {}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Shape("tensor values must be finite".into()));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: [usize; 4]) -> Self {
        Self {
            dims,
            data: vec![0.0; dims.iter().product()],
        }
    }

    /// Values uniform in `[lo, hi)` from the given generator.
    pub fn random(dims: [usize; 4], lo: f64, hi: f64, rng: &mut SplitMix64) -> Self {
        let data = (0..dims.iter().product::<usize>())
            .map(|_| lo + (hi - lo) * rng.next_f64())
            .collect();
        Self { dims, data }
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    pub fn batch(&self) -> usize {
        self.dims[0]
    }

    pub fn channels(&self) -> usize {
        self.dims[1]
    }

    fn spatial(&self) -> usize {
        self.dims[2] * self.dims[3]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn index(&self, n: usize, c: usize, h: usize, w: usize) -> usize {
        ((n * self.dims[1] + c) * self.dims[2] + h) * self.dims[3] + w
    }

    pub fn get(&self, n: usize, c: usize, h: usize, w: usize) -> f64 {
        self.data[self.index(n, c, h, w)]
    }

    fn same_shape(&self, other: &Tensor4, what: &str) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::Shape(format!(
                "{what}: {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }
}

/// Weights `c_out x c_in` (row-major) and biases `c_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct Conv1x1Layer {
    c_in: usize,
    c_out: usize,
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Conv1x1Grads {
    pub grad_x: Tensor4,
    pub grad_w: Vec<f64>,
    pub grad_b: Vec<f64>,
}

impl Conv1x1Layer {
    pub fn new(c_in: usize, c_out: usize, weight: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if c_in == 0 || c_out == 0 {
            return Err(Error::Shape("layer channels must be >= 1".into()));
        }
        if weight.len() != c_in * c_out || bias.len() != c_out {
            return Err(Error::Shape(format!(
                "layer {c_in}->{c_out} needs {} weights and {c_out} biases",
                c_in * c_out
            )));
        }
        if weight.iter().chain(&bias).any(|v| !v.is_finite()) {
            return Err(Error::Shape("layer parameters must be finite".into()));
        }
        Ok(Self {
            c_in,
            c_out,
            weight,
            bias,
        })
    }

    /// Uniform init in `[-a, a]` with `a = 1 / sqrt(c_in)`, weights then biases.
    pub fn init_uniform(c_in: usize, c_out: usize, rng: &mut SplitMix64) -> Result<Self> {
        let a = 1.0 / (c_in as f64).sqrt();
        let mut draw = || -a + 2.0 * a * rng.next_f64();
        let weight = (0..c_in * c_out).map(|_| draw()).collect();
        let bias = (0..c_out).map(|_| draw()).collect();
        Self::new(c_in, c_out, weight, bias)
    }

    /// Identity weights and zero bias (`c_in == c_out`).
    pub fn identity(channels: usize) -> Result<Self> {
        let mut weight = vec![0.0; channels * channels];
        for i in 0..channels {
            weight[i * channels + i] = 1.0;
        }
        Self::new(channels, channels, weight, vec![0.0; channels])
    }

    pub fn c_in(&self) -> usize {
        self.c_in
    }

    pub fn c_out(&self) -> usize {
        self.c_out
    }

    pub fn param_count(&self) -> usize {
        self.weight.len() + self.bias.len()
    }

    fn w(&self, o: usize, i: usize) -> f64 {
        self.weight[o * self.c_in + i]
    }

    /// Checkpoint encoding: `c_out`, `c_in` as little-endian u64, then weights
    /// and biases as little-endian f64.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 8 * self.param_count());
        out.extend((self.c_out as u64).to_le_bytes());
        out.extend((self.c_in as u64).to_le_bytes());
        for v in self.weight.iter().chain(&self.bias) {
            out.extend(v.to_le_bytes());
        }
        out
    }

    /// Decodes one layer, returning it and the number of bytes consumed.
    pub fn from_bytes(bytes: &[u8]) -> Result<(Self, usize)> {
        let mut r = Reader { bytes, pos: 0 };
        let c_out = r.dim()?;
        let c_in = r.dim()?;
        let count = c_out
            .checked_mul(c_in)
            .ok_or_else(|| Error::Checkpoint("dims overflow".into()))?;
        let weight = (0..count).map(|_| r.f64()).collect::<Result<_>>()?;
        let bias = (0..c_out).map(|_| r.f64()).collect::<Result<_>>()?;
        let layer = Self::new(c_in, c_out, weight, bias).map_err(|e| Error::Checkpoint(e.to_string()))?;
        Ok((layer, r.pos))
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take8(&mut self) -> Result<[u8; 8]> {
        let chunk = self
            .bytes
            .get(self.pos..self.pos + 8)
            .ok_or_else(|| Error::Checkpoint("truncated".into()))?;
        self.pos += 8;
        Ok(chunk.try_into().expect("8 bytes"))
    }

    fn dim(&mut self) -> Result<usize> {
        usize::try_from(u64::from_le_bytes(self.take8()?))
            .map_err(|_| Error::Checkpoint("dimension too large".into()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take8()?))
    }
}

pub fn conv1x1_forward(x: &Tensor4, layer: &Conv1x1Layer) -> Result<Tensor4> {
    if x.channels() != layer.c_in {
        return Err(Error::Shape(format!(
            "input has {} channels, layer expects {}",
            x.channels(),
            layer.c_in
        )));
    }
    let [n, _, h, w] = x.dims;
    let hw = x.spatial();
    let mut y = Tensor4::zeros([n, layer.c_out, h, w]);
    for b in 0..n {
        for o in 0..layer.c_out {
            let out = &mut y.data[(b * layer.c_out + o) * hw..][..hw];
            out.fill(layer.bias[o]);
            for i in 0..layer.c_in {
                let wt = layer.w(o, i);
                let inp = &x.data[(b * layer.c_in + i) * hw..][..hw];
                for (acc, &v) in out.iter_mut().zip(inp) {
                    *acc += wt * v;
                }
            }
        }
    }
    Ok(y)
}

pub fn conv1x1_backward(x: &Tensor4, layer: &Conv1x1Layer, grad_y: &Tensor4) -> Result<Conv1x1Grads> {
    let [n, c_in, h, w] = x.dims;
    if c_in != layer.c_in || grad_y.dims != [n, layer.c_out, h, w] {
        return Err(Error::Shape(format!(
            "backward: input {:?}, grad {:?}, layer {}->{}",
            x.dims, grad_y.dims, layer.c_in, layer.c_out
        )));
    }
    let hw = x.spatial();
    let mut grad_x = Tensor4::zeros(x.dims);
    let mut grad_w = vec![0.0; layer.weight.len()];
    let mut grad_b = vec![0.0; layer.c_out];
    for b in 0..n {
        for o in 0..layer.c_out {
            let gy = &grad_y.data[(b * layer.c_out + o) * hw..][..hw];
            grad_b[o] += gy.iter().sum::<f64>();
            for i in 0..c_in {
                let xs = &x.data[(b * c_in + i) * hw..][..hw];
                grad_w[o * c_in + i] += gy.iter().zip(xs).map(|(g, v)| g * v).sum::<f64>();
                let wt = layer.w(o, i);
                let gx = &mut grad_x.data[(b * c_in + i) * hw..][..hw];
                for (acc, &g) in gx.iter_mut().zip(gy) {
                    *acc += wt * g;
                }
            }
        }
    }
    Ok(Conv1x1Grads {
        grad_x,
        grad_w,
        grad_b,
    })
}

pub fn relu_forward(x: &Tensor4) -> Tensor4 {
    Tensor4 {
        dims: x.dims,
        data: x.data.iter().map(|&v| v.max(0.0)).collect(),
    }
}

pub fn relu_backward(x: &Tensor4, grad_y: &Tensor4) -> Result<Tensor4> {
    x.same_shape(grad_y, "relu backward")?;
    Ok(Tensor4 {
        dims: x.dims,
        data: x
            .data
            .iter()
            .zip(&grad_y.data)
            .map(|(&v, &g)| if v > 0.0 { g } else { 0.0 })
            .collect(),
    })
}

/// The backward passes used by [`AdaptationNet::backward_with`]; swapped out
/// by the gradient checker's fault-injection tests.
pub trait BackwardOps: Sync {
    fn conv1x1_backward(&self, x: &Tensor4, layer: &Conv1x1Layer, grad_y: &Tensor4) -> Result<Conv1x1Grads>;
    fn relu_backward(&self, x: &Tensor4, grad_y: &Tensor4) -> Result<Tensor4>;
}

/// The real analytic gradients.
#[derive(Debug, Clone, Copy, Default)]
pub struct Analytic;

impl BackwardOps for Analytic {
    fn conv1x1_backward(&self, x: &Tensor4, layer: &Conv1x1Layer, grad_y: &Tensor4) -> Result<Conv1x1Grads> {
        conv1x1_backward(x, layer, grad_y)
    }

    fn relu_backward(&self, x: &Tensor4, grad_y: &Tensor4) -> Result<Tensor4> {
        relu_backward(x, grad_y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub lr: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Epoch indices (0-based) at which the learning rate is divided by 10.
    pub lr_drop_epochs: Vec<usize>,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr: 0.1,
            momentum: 0.9,
            weight_decay: 0.0005,
            batch_size: 128,
            epochs: 10,
            lr_drop_epochs: Vec::new(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        // lr = 0 is allowed as a frozen-parameter control.
        if !(self.lr >= 0.0) || !self.lr.is_finite() {
            return Err(Error::Training(format!("lr must be >= 0, got {}", self.lr)));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Training(format!("momentum must be in [0, 1), got {}", self.momentum)));
        }
        if self.batch_size == 0 {
            return Err(Error::Training("batch size must be >= 1".into()));
        }
        Ok(())
    }

    pub fn lr_at(&self, epoch: usize) -> f64 {
        let drops = self.lr_drop_epochs.iter().filter(|&&d| epoch >= d).count();
        self.lr * 0.1f64.powi(drops as i32)
    }
}

/// Classic momentum with L2 folded into the gradient:
/// `v <- momentum * v + (g + wd * p)`, `p <- p - lr * v`.
pub fn sgd_step(params: &mut [f64], grads: &[f64], velocity: &mut [f64], lr: f64, cfg: &TrainConfig) -> Result<()> {
    if params.len() != grads.len() || params.len() != velocity.len() {
        return Err(Error::Shape(format!(
            "sgd: {} params, {} grads, {} velocity",
            params.len(),
            grads.len(),
            velocity.len()
        )));
    }
    for ((p, &g), v) in params.iter_mut().zip(grads).zip(velocity.iter_mut()) {
        *v = cfg.momentum * *v + (g + cfg.weight_decay * *p);
        *p -= lr * *v;
    }
    Ok(())
}

/// A stack of 1x1 convolutions, each followed by ReLU.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptationNet {
    pub layers: Vec<Conv1x1Layer>,
}

/// Activations kept for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// `inputs[k]` feeds layer `k`; `pre[k]` is its pre-activation.
    inputs: Vec<Tensor4>,
    pre: Vec<Tensor4>,
}

#[derive(Debug, Clone)]
pub struct NetGrads {
    pub grad_x: Tensor4,
    /// Per layer: (weight grads, bias grads).
    pub layers: Vec<(Vec<f64>, Vec<f64>)>,
}

/// `Conv(3->m1) ReLU Conv(m1->m2) ReLU`, initialized from `seed`.
pub fn build_adaptation(m1: usize, m2: usize, seed: u64) -> Result<AdaptationNet> {
    let mut rng = SplitMix64::new(seed);
    Ok(AdaptationNet {
        layers: vec![
            Conv1x1Layer::init_uniform(3, m1, &mut rng)?,
            Conv1x1Layer::init_uniform(m1, m2, &mut rng)?,
        ],
    })
}

impl AdaptationNet {
    pub fn new(layers: Vec<Conv1x1Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Shape("stack needs at least one layer".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].c_out != pair[1].c_in {
                return Err(Error::Shape(format!(
                    "layer outputs {} channels but next expects {}",
                    pair[0].c_out, pair[1].c_in
                )));
            }
        }
        Ok(Self { layers })
    }

    pub fn in_channels(&self) -> usize {
        self.layers[0].c_in
    }

    pub fn out_channels(&self) -> usize {
        self.layers.last().expect("non-empty").c_out
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Conv1x1Layer::param_count).sum()
    }

    pub fn forward(&self, x: &Tensor4) -> Result<(Tensor4, ForwardCache)> {
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut cur = x.clone();
        for layer in &self.layers {
            let z = conv1x1_forward(&cur, layer)?;
            let a = relu_forward(&z);
            inputs.push(cur);
            pre.push(z);
            cur = a;
        }
        Ok((cur, ForwardCache { inputs, pre }))
    }

    pub fn backward(&self, cache: &ForwardCache, grad_out: &Tensor4) -> Result<NetGrads> {
        self.backward_with(&Analytic, cache, grad_out)
    }

    pub fn backward_with(&self, ops: &dyn BackwardOps, cache: &ForwardCache, grad_out: &Tensor4) -> Result<NetGrads> {
        let mut grad = grad_out.clone();
        let mut layers = vec![(Vec::new(), Vec::new()); self.layers.len()];
        for k in (0..self.layers.len()).rev() {
            let gz = ops.relu_backward(&cache.pre[k], &grad)?;
            let g = ops.conv1x1_backward(&cache.inputs[k], &self.layers[k], &gz)?;
            layers[k] = (g.grad_w, g.grad_b);
            grad = g.grad_x;
        }
        Ok(NetGrads { grad_x: grad, layers })
    }

    /// Smallest `|pre-activation|` seen in a forward pass.
    pub fn min_preactivation_margin(cache: &ForwardCache) -> f64 {
        cache
            .pre
            .iter()
            .flat_map(|t| t.data.iter())
            .fold(f64::INFINITY, |m, v| m.min(v.abs()))
    }

    /// Layer count (u64 LE) followed by each layer's checkpoint encoding.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = (self.layers.len() as u64).to_le_bytes().to_vec();
        for layer in &self.layers {
            out.extend(layer.to_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        let count = r.dim()?;
        let mut pos = r.pos;
        let mut layers = Vec::new();
        for _ in 0..count {
            let (layer, used) = Conv1x1Layer::from_bytes(&bytes[pos..])?;
            layers.push(layer);
            pos += used;
        }
        if pos != bytes.len() {
            return Err(Error::Checkpoint(format!("{} trailing bytes", bytes.len() - pos)));
        }
        Self::new(layers).map_err(|e| Error::Checkpoint(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(dims: [usize; 4], seed: u64) -> Tensor4 {
        Tensor4::random(dims, -1.0, 1.0, &mut SplitMix64::new(seed))
    }

    #[test]
    fn identity_layer_passes_input() {
        let x = t([2, 3, 2, 2], 1);
        let y = conv1x1_forward(&x, &Conv1x1Layer::identity(3).unwrap()).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn scalar_forward_and_backward() {
        let layer = Conv1x1Layer::new(1, 1, vec![2.0], vec![1.0]).unwrap();
        let x = Tensor4::new([1, 1, 1, 1], vec![3.0]).unwrap();
        assert_eq!(conv1x1_forward(&x, &layer).unwrap().data(), &[7.0]);
        let gy = Tensor4::new([1, 1, 1, 1], vec![0.5]).unwrap();
        let g = conv1x1_backward(&x, &layer, &gy).unwrap();
        assert_eq!(g.grad_x.data(), &[1.0]);
        assert_eq!(g.grad_w, vec![1.5]);
        assert_eq!(g.grad_b, vec![0.5]);
    }

    #[test]
    fn zero_upstream_gives_zero_grads() {
        let x = t([2, 3, 2, 2], 2);
        let layer = Conv1x1Layer::init_uniform(3, 4, &mut SplitMix64::new(3)).unwrap();
        let g = conv1x1_backward(&x, &layer, &Tensor4::zeros([2, 4, 2, 2])).unwrap();
        assert!(g.grad_x.data().iter().chain(&g.grad_w).chain(&g.grad_b).all(|&v| v == 0.0));
    }

    #[test]
    fn channel_mismatch() {
        let x = t([1, 2, 2, 2], 4);
        let layer = Conv1x1Layer::identity(3).unwrap();
        assert!(conv1x1_forward(&x, &layer).is_err());
        assert!(conv1x1_backward(&x, &layer, &Tensor4::zeros([1, 3, 2, 2])).is_err());
    }

    #[test]
    fn spatial_positions_are_independent() {
        // Permute the four positions of a 2x2 map; output permutes identically.
        let x = t([1, 3, 2, 2], 5);
        let layer = Conv1x1Layer::init_uniform(3, 2, &mut SplitMix64::new(6)).unwrap();
        let y = conv1x1_forward(&x, &layer).unwrap();
        let perm = [(1, 1), (0, 0), (1, 0), (0, 1)];
        let permute = |src: &Tensor4| {
            let [n, c, h, w] = src.dims();
            let mut out = Tensor4::zeros([n, c, h, w]);
            for ch in 0..c {
                for (k, &(sh, sw)) in perm.iter().enumerate() {
                    let i = out.index(0, ch, k / 2, k % 2);
                    out.data_mut()[i] = src.get(0, ch, sh, sw);
                }
            }
            out
        };
        assert_eq!(conv1x1_forward(&permute(&x), &layer).unwrap(), permute(&y));
    }

    #[test]
    fn linear_without_bias() {
        let mut layer = Conv1x1Layer::init_uniform(3, 4, &mut SplitMix64::new(7)).unwrap();
        layer.bias.fill(0.0);
        let (x, z) = (t([2, 3, 3, 2], 8), t([2, 3, 3, 2], 9));
        let (a, b) = (0.7, -1.3);
        let mix = Tensor4::new(
            x.dims(),
            x.data().iter().zip(z.data()).map(|(p, q)| a * p + b * q).collect(),
        )
        .unwrap();
        let lhs = conv1x1_forward(&mix, &layer).unwrap();
        let (fx, fz) = (conv1x1_forward(&x, &layer).unwrap(), conv1x1_forward(&z, &layer).unwrap());
        for ((l, p), q) in lhs.data().iter().zip(fx.data()).zip(fz.data()) {
            assert!((l - (a * p + b * q)).abs() < 1e-12);
        }
    }

    #[test]
    fn relu_cases() {
        let neg = Tensor4::new([1, 1, 1, 3], vec![-1.0, -2.0, -0.5]).unwrap();
        assert!(relu_forward(&neg).data().iter().all(|&v| v == 0.0));
        let pos = Tensor4::new([1, 1, 1, 3], vec![1.0, 2.0, 0.5]).unwrap();
        assert_eq!(relu_forward(&pos), pos);
        let g = Tensor4::new([1, 1, 1, 3], vec![3.0, 4.0, 5.0]).unwrap();
        let mixed = Tensor4::new([1, 1, 1, 3], vec![1.0, -1.0, 0.0]).unwrap();
        assert_eq!(relu_backward(&mixed, &g).unwrap().data(), &[3.0, 0.0, 0.0]);
    }

    #[test]
    fn sgd_plain_and_frozen() {
        let cfg = TrainConfig {
            momentum: 0.0,
            weight_decay: 0.0,
            ..Default::default()
        };
        let mut p = vec![1.0, -2.0];
        let mut v = vec![0.0; 2];
        sgd_step(&mut p, &[0.5, 1.0], &mut v, 0.1, &cfg).unwrap();
        assert_eq!(p, vec![1.0 - 0.05, -2.0 - 0.1]);

        let cfg = TrainConfig {
            weight_decay: 0.0,
            ..Default::default()
        };
        let mut p = vec![3.0];
        let mut v = vec![0.0];
        sgd_step(&mut p, &[0.0], &mut v, 0.1, &cfg).unwrap();
        assert_eq!(p, vec![3.0]);
        assert!(sgd_step(&mut p, &[0.0, 1.0], &mut v, 0.1, &cfg).is_err());
    }

    #[test]
    fn sgd_two_steps_on_quadratic() {
        // f(p) = p^2 / 2, grad = p. Hand recurrence with lr=0.1, mu=0.9, wd=0.01, p0=1:
        // v1 = 0 + (1 + 0.01) = 1.01;        p1 = 1 - 0.101 = 0.899
        // v2 = 0.909 + 0.899 * 1.01 = 1.81699; p2 = 0.899 - 0.181699 = 0.717301
        let cfg = TrainConfig {
            lr: 0.1,
            momentum: 0.9,
            weight_decay: 0.01,
            ..Default::default()
        };
        let mut p = vec![1.0];
        let mut v = vec![0.0];
        for _ in 0..2 {
            let g = vec![p[0]];
            sgd_step(&mut p, &g, &mut v, cfg.lr, &cfg).unwrap();
        }
        assert!((p[0] - 0.717301).abs() < 1e-12);
        assert!((v[0] - 1.81699).abs() < 1e-12);
    }

    #[test]
    fn lr_schedule() {
        let cfg = TrainConfig {
            lr_drop_epochs: vec![150, 225],
            ..Default::default()
        };
        assert_eq!(cfg.lr_at(0), 0.1);
        assert!((cfg.lr_at(150) - 0.01).abs() < 1e-15);
        assert!((cfg.lr_at(299) - 0.001).abs() < 1e-15);
    }

    #[test]
    fn default_stack_shape_and_params() {
        let net = build_adaptation(DEFAULT_M1, DEFAULT_M2, 0).unwrap();
        assert_eq!(net.out_channels(), 32);
        // 3*8 + 8 + 8*32 + 32
        assert_eq!(net.param_count(), 320);
        let (y, _) = net.forward(&t([2, 3, 4, 4], 1)).unwrap();
        assert_eq!(y.dims(), [2, 32, 4, 4]);
    }

    #[test]
    fn identity_stack_reproduces_nonnegative_input() {
        let net = AdaptationNet::new(vec![
            Conv1x1Layer::identity(3).unwrap(),
            Conv1x1Layer::identity(3).unwrap(),
        ])
        .unwrap();
        let x = Tensor4::random([1, 3, 4, 4], 0.0, 1.0, &mut SplitMix64::new(2));
        assert_eq!(net.forward(&x).unwrap().0, x);
    }

    #[test]
    fn init_bounds() {
        let layer = Conv1x1Layer::init_uniform(4, 16, &mut SplitMix64::new(3)).unwrap();
        assert!(layer.weight.iter().chain(&layer.bias).all(|v| v.abs() <= 0.5));
    }

    #[test]
    fn checkpoint_round_trip() {
        let net = build_adaptation(8, 32, 9).unwrap();
        let bytes = net.to_bytes();
        assert_eq!(bytes.len(), 8 + 2 * 16 + 8 * 320);
        assert_eq!(&bytes[..8], &2u64.to_le_bytes());
        assert_eq!(&bytes[8..16], &8u64.to_le_bytes());
        assert_eq!(&bytes[16..24], &3u64.to_le_bytes());
        assert_eq!(AdaptationNet::from_bytes(&bytes).unwrap(), net);
        assert!(AdaptationNet::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn stack_rejects_mismatched_layers() {
        let a = Conv1x1Layer::identity(3).unwrap();
        let b = Conv1x1Layer::identity(4).unwrap();
        assert!(AdaptationNet::new(vec![a, b]).is_err());
        assert!(AdaptationNet::new(vec![]).is_err());
    }
}
