//! Fully connected tanh networks with hand-written backpropagation.
//!
//! All weights and biases live in one flat vector so optimizers and gradient checks
//! can treat a network as a point in `R^p`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq)]
struct LayerShape {
    inputs: usize,
    outputs: usize,
    /// Offset of the `outputs × inputs` weight block (row-major); biases follow it.
    offset: usize,
}

impl LayerShape {
    fn n_params(&self) -> usize {
        self.outputs * (self.inputs + 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layers: Vec<LayerShape>,
    params: Vec<f64>,
}

/// Activations recorded during a forward pass, input first.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    activations: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.activations.last().expect("non-empty cache")
    }
}

impl Mlp {
    /// `sizes = [input, hidden…, output]`. Hidden layers use scaled orthogonal weights
    /// with gain √2; the output layer uses gain `output_gain`. Biases start at zero.
    pub fn new(sizes: &[usize], output_gain: f64, init_seed: u64) -> Self {
        assert!(sizes.len() >= 2, "a network needs input and output sizes");
        let mut layers = Vec::with_capacity(sizes.len() - 1);
        let mut offset = 0;
        for w in sizes.windows(2) {
            let shape = LayerShape { inputs: w[0], outputs: w[1], offset };
            offset += shape.n_params();
            layers.push(shape);
        }
        let mut params = vec![0.0; offset];
        let mut rng = seed::rng(init_seed);
        let last = layers.len() - 1;
        for (k, shape) in layers.iter().enumerate() {
            let gain = if k == last { output_gain } else { std::f64::consts::SQRT_2 };
            let block = orthogonal(shape.outputs, shape.inputs, gain, &mut rng);
            params[shape.offset..shape.offset + block.len()].copy_from_slice(&block);
        }
        Mlp { layers, params }
    }

    pub fn input_size(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn output_size(&self) -> usize {
        self.layers.last().unwrap().outputs
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    /// Zeroes the output layer, making the network constant.
    pub fn zero_output_layer(&mut self) {
        let shape = *self.layers.last().unwrap();
        self.params[shape.offset..shape.offset + shape.n_params()].fill(0.0);
    }

    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        let mut x = input.to_vec();
        for (k, shape) in self.layers.iter().enumerate() {
            x = self.affine(shape, &x);
            if k + 1 < self.layers.len() {
                x.iter_mut().for_each(|v| *v = v.tanh());
            }
        }
        x
    }

    pub fn forward_cached(&self, input: &[f64]) -> ForwardCache {
        let mut activations = vec![input.to_vec()];
        for (k, shape) in self.layers.iter().enumerate() {
            let mut z = self.affine(shape, activations.last().unwrap());
            if k + 1 < self.layers.len() {
                z.iter_mut().for_each(|v| *v = v.tanh());
            }
            activations.push(z);
        }
        ForwardCache { activations }
    }

    fn affine(&self, shape: &LayerShape, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), shape.inputs);
        let w = &self.params[shape.offset..shape.offset + shape.outputs * shape.inputs];
        let b = &self.params[shape.offset + shape.outputs * shape.inputs..shape.offset + shape.n_params()];
        w.chunks_exact(shape.inputs)
            .zip(b)
            .map(|(row, bias)| bias + row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>())
            .collect()
    }

    /// Adds `∂L/∂params` to `grad` given `∂L/∂output` for the pass recorded in `cache`.
    pub fn backward(&self, cache: &ForwardCache, grad_output: &[f64], grad: &mut [f64]) {
        let mut delta = grad_output.to_vec();
        for k in (0..self.layers.len()).rev() {
            let shape = self.layers[k];
            let input = &cache.activations[k];
            let n_w = shape.outputs * shape.inputs;
            {
                let (gw, gb) = grad[shape.offset..shape.offset + shape.n_params()].split_at_mut(n_w);
                for (o, &d) in delta.iter().enumerate() {
                    if d == 0.0 {
                        continue;
                    }
                    gb[o] += d;
                    for (g, &x) in gw[o * shape.inputs..(o + 1) * shape.inputs].iter_mut().zip(input) {
                        *g += d * x;
                    }
                }
            }
            if k == 0 {
                break;
            }
            let w = &self.params[shape.offset..shape.offset + n_w];
            let mut prev = vec![0.0; shape.inputs];
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                for (p, &wv) in prev.iter_mut().zip(&w[o * shape.inputs..(o + 1) * shape.inputs]) {
                    *p += d * wv;
                }
            }
            // tanh'(z) = 1 − tanh²(z), and the cached activation is tanh(z)
            for (p, &a) in prev.iter_mut().zip(input) {
                *p *= 1.0 - a * a;
            }
            delta = prev;
        }
    }
}

/// `rows × cols` matrix with orthonormal rows (or columns, whichever is shorter), times `gain`.
fn orthogonal(rows: usize, cols: usize, gain: f64, rng: &mut impl Rng) -> Vec<f64> {
    let (count, len) = if rows <= cols { (rows, cols) } else { (cols, rows) };
    let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(count);
    while vecs.len() < count {
        let mut v: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
        for u in &vecs {
            let p: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= p * b);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm < 1e-10 {
            continue;
        }
        v.iter_mut().for_each(|a| *a /= norm);
        vecs.push(v);
    }
    let mut out = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            out[r * cols + c] = gain * if rows <= cols { vecs[r][c] } else { vecs[c][r] };
        }
    }
    out
}

/// Adam with bias correction.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(n_params: usize, lr: f64) -> Self {
        Adam { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8, m: vec![0.0; n_params], v: vec![0.0; n_params], t: 0 }
    }

    /// One descent step on `params` along `grad`.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}
