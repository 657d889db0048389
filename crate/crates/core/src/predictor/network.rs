//! One-hidden-layer ReLU network with a scalar linear head.

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub inputs: usize,
    pub hidden: usize,
    /// Hidden weights, row-major `hidden x inputs`.
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

/// Gradient with the same shape as [`Network`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl Gradient {
    fn zeros(net: &Network) -> Self {
        Gradient {
            w1: vec![0.0; net.w1.len()],
            b1: vec![0.0; net.b1.len()],
            w2: vec![0.0; net.w2.len()],
            b2: 0.0,
        }
    }

    /// Flattened in the order w1, b1, w2, b2.
    pub fn flatten(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.w1.len() + self.b1.len() + self.w2.len() + 1);
        v.extend(&self.w1);
        v.extend(&self.b1);
        v.extend(&self.w2);
        v.push(self.b2);
        v
    }
}

impl Network {
    /// Glorot-uniform weights and zero hidden biases. The output bias starts
    /// at `output_bias`.
    pub fn init(inputs: usize, hidden: usize, output_bias: f64, rng: &mut impl Rng) -> Self {
        let bound1 = (6.0 / (inputs + hidden) as f64).sqrt();
        let bound2 = (6.0 / (hidden + 1) as f64).sqrt();
        let w1 = (0..inputs * hidden).map(|_| rng.gen_range(-bound1..bound1)).collect();
        let w2 = (0..hidden).map(|_| rng.gen_range(-bound2..bound2)).collect();
        Network { inputs, hidden, w1, b1: vec![0.0; hidden], w2, b2: output_bias }
    }

    pub fn parameter_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + 1
    }

    pub fn parameter(&self, i: usize) -> f64 {
        let (n1, nb) = (self.w1.len(), self.b1.len());
        if i < n1 {
            self.w1[i]
        } else if i < n1 + nb {
            self.b1[i - n1]
        } else if i < n1 + nb + self.w2.len() {
            self.w2[i - n1 - nb]
        } else {
            self.b2
        }
    }

    pub fn parameter_mut(&mut self, i: usize) -> &mut f64 {
        let (n1, nb, n2) = (self.w1.len(), self.b1.len(), self.w2.len());
        if i < n1 {
            &mut self.w1[i]
        } else if i < n1 + nb {
            &mut self.b1[i - n1]
        } else if i < n1 + nb + n2 {
            &mut self.w2[i - n1 - nb]
        } else {
            &mut self.b2
        }
    }

    pub fn is_finite(&self) -> bool {
        self.w1.iter().chain(&self.b1).chain(&self.w2).all(|v| v.is_finite()) && self.b2.is_finite()
    }

    fn hidden_activations(&self, x: &[f64], out: &mut [f64]) {
        for (h, act) in out.iter_mut().enumerate() {
            let row = &self.w1[h * self.inputs..(h + 1) * self.inputs];
            let pre = self.b1[h] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
            *act = pre.max(0.0);
        }
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        let mut act = vec![0.0; self.hidden];
        self.hidden_activations(x, &mut act);
        self.b2 + act.iter().zip(&self.w2).map(|(a, w)| a * w).sum::<f64>()
    }

    /// Loss `1/(2n) Σ (f(x) - y)² + α/(2n) (‖W1‖² + ‖W2‖²)` and its gradient.
    /// Biases are not penalized.
    pub fn loss_and_gradient(&self, xs: &[&[f64]], ys: &[f64], alpha: f64) -> (f64, Gradient) {
        let n = xs.len() as f64;
        let mut grad = Gradient::zeros(self);
        let mut act = vec![0.0; self.hidden];
        let mut data_loss = 0.0;
        for (x, y) in xs.iter().zip(ys) {
            self.hidden_activations(x, &mut act);
            let out = self.b2 + act.iter().zip(&self.w2).map(|(a, w)| a * w).sum::<f64>();
            let err = out - y;
            data_loss += err * err;
            let d_out = err / n;
            grad.b2 += d_out;
            for h in 0..self.hidden {
                grad.w2[h] += d_out * act[h];
                if act[h] > 0.0 {
                    let d_pre = d_out * self.w2[h];
                    grad.b1[h] += d_pre;
                    let row = &mut grad.w1[h * self.inputs..(h + 1) * self.inputs];
                    for (g, v) in row.iter_mut().zip(x.iter()) {
                        *g += d_pre * v;
                    }
                }
            }
        }
        let penalty: f64 = self.w1.iter().chain(&self.w2).map(|w| w * w).sum();
        for (g, w) in grad.w1.iter_mut().zip(&self.w1) {
            *g += alpha * w / n;
        }
        for (g, w) in grad.w2.iter_mut().zip(&self.w2) {
            *g += alpha * w / n;
        }
        let loss = data_loss / (2.0 * n) + alpha * penalty / (2.0 * n);
        (loss, grad)
    }
}

/// Adam optimizer state over a flattened parameter vector.
pub(crate) struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    step: i32,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub(crate) fn new(params: usize, lr: f64) -> Self {
        Adam { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8, step: 0, m: vec![0.0; params], v: vec![0.0; params] }
    }

    pub(crate) fn update(&mut self, net: &mut Network, grad: &Gradient) {
        self.step += 1;
        let c1 = 1.0 - self.beta1.powi(self.step);
        let c2 = 1.0 - self.beta2.powi(self.step);
        let step_size = self.lr * c2.sqrt() / c1;
        for (i, g) in grad.flatten().into_iter().enumerate() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            *net.parameter_mut(i) -= step_size * self.m[i] / (self.v[i].sqrt() + self.eps);
        }
    }
}
