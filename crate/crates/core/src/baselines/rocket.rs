//! Random convolutional kernel transform for multivariate series.

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const KERNEL_LENGTHS: [usize; 3] = [7, 9, 11];
pub const DEFAULT_KERNELS: usize = 1_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocketKernel {
    pub length: usize,
    /// Channels the kernel reads, ascending.
    pub channels: Vec<usize>,
    /// `weights[i]` applies to `channels[i]`; each row sums to zero.
    pub weights: Vec<Vec<f64>>,
    pub bias: f64,
    pub dilation: usize,
    /// Zero padding added to each end of the series.
    pub padding: usize,
}

impl RocketKernel {
    /// Extent of the dilated kernel in samples.
    pub fn span(&self) -> usize {
        (self.length - 1) * self.dilation + 1
    }

    pub fn fits(&self, series_len: usize) -> bool {
        self.span() <= series_len + 2 * self.padding
    }

    pub fn output_len(&self, series_len: usize) -> usize {
        (series_len + 2 * self.padding + 1).saturating_sub(self.span())
    }

    /// Raw convolution output (bias included) over `channels[c][t]`.
    pub fn convolve(&self, channels: &[Vec<f64>]) -> Result<Vec<f64>> {
        let t = channels.first().map_or(0, Vec::len);
        if !self.fits(t) {
            return Err(Error::arg(format!("kernel span {} exceeds padded length {}", self.span(), t + 2 * self.padding)));
        }
        if let Some(&c) = self.channels.iter().find(|&&c| c >= channels.len()) {
            return Err(Error::arg(format!("kernel reads channel {c} of {}", channels.len())));
        }
        let out_len = self.output_len(t);
        let mut out = vec![self.bias; out_len];
        for (ch, w) in self.channels.iter().zip(&self.weights) {
            let x = &channels[*ch];
            for (i, o) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, wj) in w.iter().enumerate() {
                    let pos = (i + j * self.dilation) as isize - self.padding as isize;
                    if pos >= 0 && (pos as usize) < t {
                        acc += wj * x[pos as usize];
                    }
                }
                *o += acc;
            }
        }
        Ok(out)
    }

    /// Proportion of positive outputs and maximum output.
    pub fn pooled(&self, channels: &[Vec<f64>]) -> Result<(f64, f64)> {
        let out = self.convolve(channels)?;
        let ppv = out.iter().filter(|v| **v > 0.0).count() as f64 / out.len() as f64;
        let max = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok((ppv, max))
    }
}

/// Draws `count` kernels valid for series of `series_len` steps over
/// `n_channels` channels.
pub fn generate_kernels(n_channels: usize, series_len: usize, count: usize, seed: u64) -> Result<Vec<RocketKernel>> {
    if n_channels == 0 || series_len == 0 {
        return Err(Error::arg("kernels need at least one channel and one step"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kernels = Vec::with_capacity(count);
    for _ in 0..count {
        let length = KERNEL_LENGTHS[rng.random_range(0..KERNEL_LENGTHS.len())];
        let max_channels = ((n_channels.min(length) + 1) as f64).log2();
        let n_sel = (2f64.powf(rng.random_range(0.0..max_channels)).floor() as usize).clamp(1, n_channels);
        let mut channels = sample_indices(&mut rng, n_channels, n_sel).into_vec();
        channels.sort_unstable();
        let weights = channels
            .iter()
            .map(|_| {
                let raw: Vec<f64> = (0..length).map(|_| StandardNormal.sample(&mut rng)).collect();
                let mean = raw.iter().sum::<f64>() / length as f64;
                raw.into_iter().map(|v| v - mean).collect()
            })
            .collect();
        let bias = rng.random_range(-1.0..1.0);
        let max_exponent = if series_len > length {
            ((series_len - 1) as f64 / (length - 1) as f64).log2().max(0.0)
        } else {
            0.0
        };
        let dilation = if max_exponent > 0.0 {
            2f64.powf(rng.random_range(0.0..max_exponent)).floor() as usize
        } else {
            1
        };
        let padded = rng.random_bool(0.5);
        let mut kernel = RocketKernel {
            length,
            channels,
            weights,
            bias,
            dilation,
            padding: if padded { (length - 1) * dilation / 2 } else { 0 },
        };
        if !kernel.fits(series_len) {
            kernel.padding = (length - 1) * dilation / 2;
        }
        if !kernel.fits(series_len) {
            return Err(Error::arg(format!(
                "kernel span {} exceeds padded length {}",
                kernel.span(),
                series_len + 2 * kernel.padding
            )));
        }
        kernels.push(kernel);
    }
    Ok(kernels)
}

/// Two features (PPV, max) per kernel.
pub fn rocket_features(channels: &[Vec<f64>], kernels: &[RocketKernel]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * kernels.len());
    for k in kernels {
        let (ppv, max) = k.pooled(channels)?;
        out.push(ppv);
        out.push(max);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_input_with_negative_bias() {
        let k = RocketKernel {
            length: 9,
            channels: vec![0, 2],
            weights: vec![vec![0.5; 9], vec![-1.0; 9]],
            bias: -0.3,
            dilation: 2,
            padding: 8,
        };
        let x = vec![vec![0.0; 30]; 3];
        assert_eq!(k.pooled(&x).unwrap(), (0.0, -0.3));
    }

    #[test]
    fn hand_kernel_matches_direct_convolution() {
        let w = vec![1.0, -2.0, 0.5, 0.0, 3.0, -1.0, -1.5];
        let k = RocketKernel {
            length: 7,
            channels: vec![0],
            weights: vec![w.clone()],
            bias: 0.25,
            dilation: 1,
            padding: 0,
        };
        let x: Vec<f64> = (0..10).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        let out = k.convolve(&[x.clone()]).unwrap();
        assert_eq!(out.len(), 4);
        for (i, o) in out.iter().enumerate() {
            let direct: f64 = 0.25 + (0..7).map(|j| w[j] * x[i + j]).sum::<f64>();
            assert!((o - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn generated_kernels_are_valid() {
        for len in [1, 5, 7, 20, 100] {
            let ks = generate_kernels(8, len, 200, 3).unwrap();
            for k in &ks {
                assert!(KERNEL_LENGTHS.contains(&k.length));
                assert!(k.fits(len));
                assert!(!k.channels.is_empty() && k.channels.len() <= 8);
                assert!((-1.0..1.0).contains(&k.bias));
                for row in &k.weights {
                    assert!(row.iter().sum::<f64>().abs() < 1e-12);
                }
            }
        }
        assert_eq!(generate_kernels(8, 100, 10, 1).unwrap(), generate_kernels(8, 100, 10, 1).unwrap());
    }

    #[test]
    fn hand_built_oversized_kernel_is_rejected() {
        let k = RocketKernel {
            length: 11,
            channels: vec![0],
            weights: vec![vec![0.0; 11]],
            bias: 0.0,
            dilation: 4,
            padding: 0,
        };
        assert!(k.convolve(&[vec![1.0; 20]]).is_err());
    }
}
