//! One-input, five-unit tansig hidden layer, linear output.

use crate::mc::StreamRng;

pub const HIDDEN: usize = 5;
/// Weights and biases stored by the network.
pub const STORED_PARAMS: usize = 3 * HIDDEN + 1;
/// Parameter count charged against chi-square degrees of freedom by default.
pub const DEFAULT_REPORTED_PARAMS: usize = 11;

/// `tansig(n) = 2 / (1 + exp(-2n)) - 1`.
pub fn tansig(n: f64) -> f64 {
    2.0 / (1.0 + (-2.0 * n).exp()) - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MlpParams {
    pub hidden_weights: [f64; HIDDEN],
    pub hidden_biases: [f64; HIDDEN],
    pub output_weights: [f64; HIDDEN],
    pub output_bias: f64,
    pub reported_param_count: usize,
}

impl Default for MlpParams {
    fn default() -> Self {
        Self {
            hidden_weights: [0.0; HIDDEN],
            hidden_biases: [0.0; HIDDEN],
            output_weights: [0.0; HIDDEN],
            output_bias: 0.0,
            reported_param_count: DEFAULT_REPORTED_PARAMS,
        }
    }
}

impl MlpParams {
    /// Hidden units centred across `[-2, 2]` with seeded slopes; small output weights.
    pub fn seeded(seed: u64) -> Self {
        let mut rng = StreamRng::new(seed, 0x4e4e);
        let mut p = Self::default();
        for j in 0..HIDDEN {
            let slope = (0.5 + 1.5 * rng.uniform()) * if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
            let centre = -2.0 + j as f64 + 0.5 * (rng.uniform() - 0.5);
            p.hidden_weights[j] = slope;
            p.hidden_biases[j] = -slope * centre;
            p.output_weights[j] = rng.uniform() - 0.5;
        }
        p
    }

    /// Layout `[hidden weights, hidden biases, output weights, output bias]`.
    pub fn to_vec(&self) -> [f64; STORED_PARAMS] {
        let mut v = [0.0; STORED_PARAMS];
        v[..HIDDEN].copy_from_slice(&self.hidden_weights);
        v[HIDDEN..2 * HIDDEN].copy_from_slice(&self.hidden_biases);
        v[2 * HIDDEN..3 * HIDDEN].copy_from_slice(&self.output_weights);
        v[3 * HIDDEN] = self.output_bias;
        v
    }

    pub fn from_vec(v: &[f64; STORED_PARAMS], reported_param_count: usize) -> Self {
        let mut p = Self {
            reported_param_count,
            ..Self::default()
        };
        p.hidden_weights.copy_from_slice(&v[..HIDDEN]);
        p.hidden_biases.copy_from_slice(&v[HIDDEN..2 * HIDDEN]);
        p.output_weights.copy_from_slice(&v[2 * HIDDEN..3 * HIDDEN]);
        p.output_bias = v[3 * HIDDEN];
        p
    }

    pub fn is_finite(&self) -> bool {
        self.to_vec().iter().all(|v| v.is_finite())
    }

    pub fn forward(&self, x: f64) -> f64 {
        let mut out = self.output_bias;
        for j in 0..HIDDEN {
            out += self.output_weights[j] * tansig(self.hidden_weights[j] * x + self.hidden_biases[j]);
        }
        out
    }

    /// Output and its gradient with respect to every stored parameter.
    pub fn forward_with_gradient(&self, x: f64) -> (f64, [f64; STORED_PARAMS]) {
        let mut grad = [0.0; STORED_PARAMS];
        let mut out = self.output_bias;
        for j in 0..HIDDEN {
            let h = tansig(self.hidden_weights[j] * x + self.hidden_biases[j]);
            out += self.output_weights[j] * h;
            let back = self.output_weights[j] * (1.0 - h * h);
            grad[j] = back * x;
            grad[HIDDEN + j] = back;
            grad[2 * HIDDEN + j] = h;
        }
        grad[3 * HIDDEN] = 1.0;
        (out, grad)
    }

    /// Same function of `x` after the input map `x -> (x - shift) / scale`
    /// and the output map `y -> scale_out * y + shift_out` are absorbed.
    pub fn fold_affine(&self, shift: f64, scale: f64, shift_out: f64, scale_out: f64) -> Self {
        let mut p = *self;
        for j in 0..HIDDEN {
            p.hidden_weights[j] = self.hidden_weights[j] / scale;
            p.hidden_biases[j] = self.hidden_biases[j] - self.hidden_weights[j] * shift / scale;
            p.output_weights[j] = scale_out * self.output_weights[j];
        }
        p.output_bias = scale_out * self.output_bias + shift_out;
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_network() {
        let p = MlpParams::default();
        assert_eq!(p.forward(3.7), 0.0);
        assert_eq!(tansig(0.0), 0.0);
        assert_eq!(STORED_PARAMS, 16);
    }

    #[test]
    fn single_unit_saturates() {
        let mut p = MlpParams::default();
        p.hidden_weights[0] = 1.0;
        p.output_weights[0] = 1.0;
        assert_eq!(p.forward(0.0), 0.0);
        assert_eq!(p.forward(1e3), 1.0);
        assert_eq!(p.forward(-1e3), -1.0);
    }

    #[test]
    fn matches_hand_composition() {
        let p = MlpParams::seeded(11);
        for &x in &[-1.3, 0.0, 0.4, 2.2] {
            let mut want = p.output_bias;
            for j in 0..HIDDEN {
                want += p.output_weights[j] * libm::tanh(p.hidden_weights[j] * x + p.hidden_biases[j]);
            }
            assert!((p.forward(x) - want).abs() < 1e-14);
        }
    }

    pub(crate) fn max_gradient_error(seed: u64) -> f64 {
        let p = MlpParams::seeded(seed);
        let mut rng = StreamRng::new(seed, 77);
        let x = 4.0 * rng.uniform() - 2.0;
        let (_, g) = p.forward_with_gradient(x);
        let v = p.to_vec();
        let mut worst = 0.0f64;
        for i in 0..STORED_PARAMS {
            let h = 1e-5 * (1.0 + v[i].abs());
            let mut up = v;
            let mut dn = v;
            up[i] += h;
            dn[i] -= h;
            let fd = (MlpParams::from_vec(&up, 11).forward(x) - MlpParams::from_vec(&dn, 11).forward(x)) / (2.0 * h);
            let err = (fd - g[i]).abs() / g[i].abs().max(1e-3);
            worst = worst.max(err);
        }
        worst
    }

    #[test]
    fn gradients_match_central_differences() {
        for seed in 0..100 {
            let e = max_gradient_error(seed);
            assert!(e < 1e-6, "seed {seed}: {e}");
        }
    }

    proptest! {
        #[test]
        fn folding_preserves_function(seed in 0u64..1000, shift in -1.0f64..1.0, scale in 0.01f64..3.0, so in -5.0f64..5.0, sc in 0.1f64..4.0, x in -3.0f64..3.0) {
            let p = MlpParams::seeded(seed);
            let folded = p.fold_affine(shift, scale, so, sc);
            let want = sc * p.forward((x - shift) / scale) + so;
            prop_assert!((folded.forward(x) - want).abs() < 1e-10 * (1.0 + want.abs()));
        }

        #[test]
        fn round_trip_vec(seed in 0u64..1000) {
            let p = MlpParams::seeded(seed);
            prop_assert_eq!(MlpParams::from_vec(&p.to_vec(), p.reported_param_count), p);
        }
    }
}
