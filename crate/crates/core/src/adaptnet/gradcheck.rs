//! Central finite-difference checks of the analytic backward passes.
//!
//! Each check uses the scalar objective `L = sum(proj * output)` for a random
//! projection `proj`, so `dL/doutput = proj`. Every input and parameter
//! element is perturbed by `+-EPS`.

use std::fmt;

use super::{
    conv1x1_forward, relu_forward, AdaptationNet, BackwardOps, Conv1x1Layer, Tensor4,
};
use crate::error::{Error, Result};
use crate::keying::SplitMix64;

pub const EPS: f64 = 1e-5;
pub const TOLERANCE: f64 = 1e-4;
/// Inputs to ReLU are kept at least this far from the kink.
const KINK_MARGIN: f64 = 1e-3;
const MAX_RESAMPLES: usize = 10_000;

/// `|a - n| / max(|a|, |n|)`, with the denominator floored at 1e-6 so that
/// vanishing gradients are compared absolutely.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

fn max_rel(analytic: &[f64], numeric: &[f64]) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .map(|(&a, &n)| relative_error(a, n))
        .fold(0.0, f64::max)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Central differences of `f` with respect to every element of `values`.
fn numeric_grad(values: &mut [f64], mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    (0..values.len())
        .map(|k| {
            let orig = values[k];
            values[k] = orig + EPS;
            let plus = f(values);
            values[k] = orig - EPS;
            let minus = f(values);
            values[k] = orig;
            (plus - minus) / (2.0 * EPS)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpCheck {
    pub op: &'static str,
    pub case: usize,
    /// Input shape `N x C x H x W`.
    pub shape: [usize; 4],
    /// Output channels of each layer involved.
    pub widths: Vec<usize>,
    pub max_rel_error: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GradcheckReport {
    pub seed: u64,
    pub checks: Vec<OpCheck>,
}

impl GradcheckReport {
    pub fn max_error(&self, op: &str) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.op == op)
            .map(|c| c.max_rel_error)
            .fold(0.0, f64::max)
    }

    pub fn ops(&self) -> Vec<&'static str> {
        let mut ops: Vec<&'static str> = Vec::new();
        for c in &self.checks {
            if !ops.contains(&c.op) {
                ops.push(c.op);
            }
        }
        ops
    }

    /// Checks whose error exceeds `tol` (or is NaN).
    pub fn failures(&self, tol: f64) -> Vec<&OpCheck> {
        self.checks
            .iter()
            .filter(|c| !(c.max_rel_error <= tol))
            .collect()
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.failures(tol).is_empty()
    }
}

impl fmt::Display for GradcheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed={}", self.seed)?;
        writeln!(f, "cases={}", self.checks.len())?;
        for op in self.ops() {
            writeln!(f, "op={op} max_rel_err={:.3e}", self.max_error(op))?;
        }
        Ok(())
    }
}

fn random_dims(rng: &mut SplitMix64) -> [usize; 4] {
    [
        1 + rng.below(3) as usize,
        1 + rng.below(4) as usize,
        1 + rng.below(4) as usize,
        1 + rng.below(4) as usize,
    ]
}

fn check_conv(ops: &dyn BackwardOps, case: usize, rng: &mut SplitMix64) -> Result<OpCheck> {
    // The first case is pinned to 2x3x4x4 -> 5 channels.
    let (dims, c_out) = if case == 0 {
        ([2, 3, 4, 4], 5)
    } else {
        (random_dims(rng), 1 + rng.below(4) as usize)
    };
    let mut x = Tensor4::random(dims, -1.0, 1.0, rng);
    let mut layer = Conv1x1Layer::init_uniform(dims[1], c_out, rng)?;
    let out_dims = [dims[0], c_out, dims[2], dims[3]];
    let proj = Tensor4::random(out_dims, -1.0, 1.0, rng);

    let g = ops.conv1x1_backward(&x, &layer, &proj)?;

    let num_x = {
        let l = layer.clone();
        numeric_grad(x.data_mut(), |v| {
            let t = Tensor4::new(dims, v.to_vec()).expect("shape");
            dot(conv1x1_forward(&t, &l).expect("shape").data(), proj.data())
        })
    };
    let x_fixed = x.clone();
    let (c_in, bias) = (layer.c_in(), layer.bias.clone());
    let num_w = numeric_grad(&mut layer.weight, |w| {
        let l = Conv1x1Layer::new(c_in, c_out, w.to_vec(), bias.clone()).expect("shape");
        dot(conv1x1_forward(&x_fixed, &l).expect("shape").data(), proj.data())
    });
    let weight = layer.weight.clone();
    let num_b = numeric_grad(&mut layer.bias, |b| {
        let l = Conv1x1Layer::new(c_in, c_out, weight.clone(), b.to_vec()).expect("shape");
        dot(conv1x1_forward(&x_fixed, &l).expect("shape").data(), proj.data())
    });

    let err = max_rel(g.grad_x.data(), &num_x)
        .max(max_rel(&g.grad_w, &num_w))
        .max(max_rel(&g.grad_b, &num_b));
    Ok(OpCheck {
        op: "conv1x1",
        case,
        shape: dims,
        widths: vec![c_out],
        max_rel_error: err,
    })
}

fn check_relu(ops: &dyn BackwardOps, case: usize, rng: &mut SplitMix64) -> Result<OpCheck> {
    let dims = random_dims(rng);
    let mut data: Vec<f64> = Vec::with_capacity(dims.iter().product());
    while data.len() < data.capacity() {
        let v = -1.0 + 2.0 * rng.next_f64();
        if v.abs() >= 0.05 {
            data.push(v);
        }
    }
    let mut x = Tensor4::new(dims, data)?;
    let proj = Tensor4::random(dims, -1.0, 1.0, rng);
    let g = ops.relu_backward(&x, &proj)?;
    let num = numeric_grad(x.data_mut(), |v| {
        let t = Tensor4::new(dims, v.to_vec()).expect("shape");
        dot(relu_forward(&t).data(), proj.data())
    });
    Ok(OpCheck {
        op: "relu",
        case,
        shape: dims,
        widths: vec![dims[1]],
        max_rel_error: max_rel(g.data(), &num),
    })
}

fn check_stack(ops: &dyn BackwardOps, case: usize, rng: &mut SplitMix64) -> Result<OpCheck> {
    let mut dims = random_dims(rng);
    dims[1] = 3;
    let (m1, m2) = (1 + rng.below(8) as usize, 1 + rng.below(8) as usize);
    let net = super::build_adaptation(m1, m2, rng.next_u64())?;
    // Resample inputs until every pre-activation clears the kink margin.
    let mut tries = 0;
    let (mut x, cache) = loop {
        let x = Tensor4::random(dims, -1.0, 1.0, rng);
        let (_, cache) = net.forward(&x)?;
        if AdaptationNet::min_preactivation_margin(&cache) >= KINK_MARGIN {
            break (x, cache);
        }
        tries += 1;
        if tries == MAX_RESAMPLES {
            return Err(Error::Shape(format!(
                "no input for {dims:?} -> [{m1}, {m2}] clears the ReLU kink margin"
            )));
        }
    };
    let out_dims = [dims[0], m2, dims[2], dims[3]];
    let proj = Tensor4::random(out_dims, -1.0, 1.0, rng);
    let grads = net.backward_with(ops, &cache, &proj)?;

    let objective = |n: &AdaptationNet, t: &Tensor4| dot(n.forward(t).expect("shape").0.data(), proj.data());

    let mut err = max_rel(grads.grad_x.data(), &{
        let n = net.clone();
        numeric_grad(x.data_mut(), |v| objective(&n, &Tensor4::new(dims, v.to_vec()).expect("shape")))
    });
    for (k, (gw, gb)) in grads.layers.iter().enumerate() {
        let mut w = net.layers[k].weight.clone();
        let num_w = numeric_grad(&mut w, |v| {
            let mut n = net.clone();
            n.layers[k].weight.copy_from_slice(v);
            objective(&n, &x)
        });
        let mut b = net.layers[k].bias.clone();
        let num_b = numeric_grad(&mut b, |v| {
            let mut n = net.clone();
            n.layers[k].bias.copy_from_slice(v);
            objective(&n, &x)
        });
        err = err.max(max_rel(gw, &num_w)).max(max_rel(gb, &num_b));
    }
    Ok(OpCheck {
        op: "adaptation_stack",
        case,
        shape: dims,
        widths: vec![m1, m2],
        max_rel_error: err,
    })
}

/// Runs `cases` randomized checks of each op with the given backward passes.
pub fn run_gradcheck_with(ops: &dyn BackwardOps, seed: u64, cases: usize) -> Result<GradcheckReport> {
    let mut checks = Vec::with_capacity(3 * cases);
    for case in 0..cases {
        let mut rng = SplitMix64::new(seed.wrapping_add(case as u64));
        checks.push(check_conv(ops, case, &mut rng)?);
        checks.push(check_relu(ops, case, &mut rng)?);
        checks.push(check_stack(ops, case, &mut rng)?);
    }
    Ok(GradcheckReport { seed, checks })
}

pub fn run_gradcheck(seed: u64, cases: usize) -> Result<GradcheckReport> {
    run_gradcheck_with(&super::Analytic, seed, cases)
}
