//! Hardware-style weight nonideality transforms.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{Provenance, WeightError, WeightMatrix};

/// Default steepness of the stochastic binarisation sigmoid.
pub const DEFAULT_BINARIZE_BETA: f64 = 2.0;

fn require(w: &WeightMatrix, expected: &'static [Provenance]) -> Result<(), WeightError> {
    if expected.contains(&w.provenance()) {
        Ok(())
    } else {
        Err(WeightError::WrongProvenance {
            expected: match expected {
                [Provenance::Ideal] => "ideal",
                [Provenance::Binarized] => "binarized",
                _ => "ideal or binarized",
            },
            got: w.provenance(),
        })
    }
}

/// Stochastic binarisation: each entry becomes 1 with probability
/// `sigmoid(β(w − ⟨w⟩)/σ_w)`, else 0, with the statistics taken over all
/// N² entries.
pub fn binarize_stochastic(
    w: &WeightMatrix,
    beta: f64,
    rng: &mut impl Rng,
) -> Result<WeightMatrix, WeightError> {
    require(w, &[Provenance::Ideal])?;
    let mean = w.mean();
    let std = w.std();
    let data = w.data.map(|&x| {
        let p = if std > 0.0 {
            1.0 / (1.0 + (-beta * (x - mean) / std).exp())
        } else {
            0.5
        };
        if rng.gen::<f64>() < p {
            1.0
        } else {
            0.0
        }
    });
    Ok(WeightMatrix::new(
        data,
        w.block_len(),
        Provenance::Binarized,
        w.f_used(),
    ))
}

/// Additive folded Gaussian noise: `w → |w + χ|`, `χ ~ N(0, σ²)` i.i.d.
pub fn add_weight_noise(
    w: &WeightMatrix,
    sigma: f64,
    rng: &mut impl Rng,
) -> Result<WeightMatrix, WeightError> {
    require(w, &[Provenance::Ideal, Provenance::Binarized])?;
    let data = if sigma == 0.0 {
        w.data.map(|&x| x.abs())
    } else {
        let normal = Normal::new(0.0, sigma).expect("sigma must be non-negative");
        w.data.map(|&x| (x + normal.sample(rng)).abs())
    };
    Ok(WeightMatrix::new(
        data,
        w.block_len(),
        Provenance::Noisy,
        w.f_used(),
    ))
}

/// Two-threshold ternarisation to the normalised levels {0, 0.5, 1}:
/// below `t_lo` → 0, in `[t_lo, t_hi]` → 0.5, above `t_hi` → 1.
pub fn quantize_ternary(
    w: &WeightMatrix,
    t_lo: f64,
    t_hi: f64,
) -> Result<WeightMatrix, WeightError> {
    require(w, &[Provenance::Ideal])?;
    assert!(t_lo <= t_hi, "thresholds must satisfy t_lo <= t_hi");
    let data = w.data.map(|&x| {
        if x < t_lo {
            0.0
        } else if x > t_hi {
            1.0
        } else {
            0.5
        }
    });
    Ok(WeightMatrix::new(
        data,
        w.block_len(),
        Provenance::Ternary,
        w.f_used(),
    ))
}

/// 8-bit signed quantisation: clamp to the 4σ range around the mean, map
/// it linearly onto [−254, 254], and round to the nearest even integer.
pub fn quantize_fixed_point(w: &WeightMatrix) -> Result<WeightMatrix, WeightError> {
    require(w, &[Provenance::Ideal])?;
    let mean = w.mean();
    let std = w.std();
    let data = w.data.map(|&x| {
        if std == 0.0 {
            return 0.0;
        }
        let y = ((x - mean) / (4.0 * std)).clamp(-1.0, 1.0) * 254.0;
        2.0 * (y / 2.0).round()
    });
    Ok(WeightMatrix::new(
        data,
        w.block_len(),
        Provenance::FixedPoint,
        w.f_used(),
    ))
}

/// Ternarisation thresholds for [`TransformPipeline`].
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TernaryMode {
    #[default]
    Off,
    /// `t_lo = −0.5σ_w`, `t_hi = +0.5σ_w`, from the matrix statistics.
    HalfSigma,
    Thresholds {
        lo: f64,
        hi: f64,
    },
}

/// Declarative nonideality chain, applied in the fixed order
/// binarise → noise → ternarise → fixed-point.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformPipeline {
    pub binarize_beta: Option<f64>,
    pub noise_sigma: Option<f64>,
    pub ternary: TernaryMode,
    pub fixed_point: bool,
}

impl TransformPipeline {
    pub fn is_identity(&self) -> bool {
        self == &TransformPipeline::default()
    }

    pub fn apply(
        &self,
        w: &WeightMatrix,
        rng: &mut impl Rng,
    ) -> Result<WeightMatrix, WeightError> {
        let mut out = w.clone();
        if let Some(beta) = self.binarize_beta {
            out = binarize_stochastic(&out, beta, rng)?;
        }
        if let Some(sigma) = self.noise_sigma {
            out = add_weight_noise(&out, sigma, rng)?;
        }
        match self.ternary {
            TernaryMode::Off => {}
            TernaryMode::HalfSigma => {
                let s = out.std();
                out = quantize_ternary(&out, -0.5 * s, 0.5 * s)?;
            }
            TernaryMode::Thresholds { lo, hi } => {
                out = quantize_ternary(&out, lo, hi)?;
            }
        }
        if self.fixed_point {
            out = quantize_fixed_point(&out)?;
        }
        Ok(out)
    }
}

/// Zero every coupling between neurons of the same block (including the
/// diagonal). Within a block, competition is the WTA circuit's job; the
/// crossbar programs these devices to the lowest level for the same
/// reason. Provenance is preserved.
pub fn zero_intra_block(w: &WeightMatrix) -> WeightMatrix {
    let l = w.block_len();
    let mut data = w.data.clone();
    for ((i, j), value) in data.indexed_iter_mut() {
        if i / l == j / l {
            *value = 0.0;
        }
    }
    WeightMatrix::new(data, l, w.provenance(), w.f_used())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use ndarray::Array2;

    fn matrix_from(data: Array2<f64>) -> WeightMatrix {
        let l = data.nrows() / 2;
        WeightMatrix::new(data, l.max(1), Provenance::Ideal, 0.125)
    }

    #[test]
    fn binarize_set_fraction_matches_sigmoid() {
        // entries at ⟨w⟩ + σ_w are set with probability sigmoid(β) at β=2
        let n = 128;
        let data = Array2::from_shape_fn((n, n), |(i, j)| {
            if (i * n + j) % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        });
        let w = matrix_from(data);
        assert_eq!(w.mean(), 0.0);
        assert_eq!(w.std(), 1.0);
        let mut rng = substream(77, "bin");
        let binary = binarize_stochastic(&w, 2.0, &mut rng).unwrap();
        assert_eq!(binary.provenance(), Provenance::Binarized);
        let mut set = 0usize;
        let mut total = 0usize;
        for ((i, j), &v) in binary.data.indexed_iter() {
            if w.data[(i, j)] == 1.0 {
                total += 1;
                if v == 1.0 {
                    set += 1;
                }
            }
            assert!(v == 0.0 || v == 1.0);
        }
        let frac = set as f64 / total as f64;
        let sigmoid2 = 1.0 / (1.0 + (-2.0f64).exp());
        assert!((frac - sigmoid2).abs() < 0.02, "frac {frac} vs {sigmoid2}");
    }

    #[test]
    fn binarize_requires_ideal() {
        let w = matrix_from(Array2::zeros((4, 4)));
        let mut rng = substream(1, "b");
        let b = binarize_stochastic(&w, 2.0, &mut rng).unwrap();
        assert!(binarize_stochastic(&b, 2.0, &mut rng).is_err());
    }

    #[test]
    fn noise_zero_sigma_is_abs_identity() {
        let data = Array2::from_shape_fn((4, 4), |(i, j)| i as f64 - j as f64);
        let w = matrix_from(data.clone());
        let mut rng = substream(2, "n");
        let noisy = add_weight_noise(&w, 0.0, &mut rng).unwrap();
        assert_eq!(noisy.data, data.map(|&x| x.abs()));
        assert_eq!(noisy.provenance(), Provenance::Noisy);
    }

    #[test]
    fn noise_outputs_nonnegative_with_folded_mean() {
        // zero weights with σ=0.5: mean |χ| = σ√(2/π) ≈ 0.3989
        let w = matrix_from(Array2::zeros((128, 128)));
        let mut rng = substream(3, "n2");
        let noisy = add_weight_noise(&w, 0.5, &mut rng).unwrap();
        assert!(noisy.data.iter().all(|&x| x >= 0.0));
        let mean = noisy.data.sum() / (128.0 * 128.0);
        let expect = 0.5 * (2.0 / std::f64::consts::PI).sqrt();
        assert!((mean - expect).abs() < 0.02, "mean {mean} vs {expect}");
    }

    #[test]
    fn ternary_levels_and_boundaries() {
        let data = Array2::from_shape_vec(
            (2, 2),
            vec![-1.0, 0.0, 0.2, 1.5],
        )
        .unwrap();
        let w = WeightMatrix::new(data, 1, Provenance::Ideal, 0.0);
        // t_lo = t_hi = 0: negatives → 0, exact zeros → middle, positives → 1
        let t = quantize_ternary(&w, 0.0, 0.0).unwrap();
        assert_eq!(
            t.data.iter().copied().collect::<Vec<_>>(),
            vec![0.0, 0.5, 1.0, 1.0]
        );
        assert_eq!(t.provenance(), Provenance::Ternary);

        let zeros = WeightMatrix::new(Array2::zeros((4, 4)), 2, Provenance::Ideal, 0.0);
        let t = quantize_ternary(&zeros, -0.5, 0.5).unwrap();
        assert!(t.data.iter().all(|&x| x == 0.5));
    }

    #[test]
    fn ternary_half_sigma_terciles_on_gaussian() {
        let mut rng = substream(4, "tern");
        let normal = Normal::new(0.0, 1.0).unwrap();
        let data = Array2::from_shape_fn((128, 128), |_| normal.sample(&mut rng));
        let w = matrix_from(data);
        let s = w.std();
        let t = quantize_ternary(&w, -0.5 * s, 0.5 * s).unwrap();
        let count = |level: f64| t.data.iter().filter(|&&x| x == level).count() as f64;
        let total = (128 * 128) as f64;
        // Φ(−0.5) ≈ 0.3085 low and high, 0.3829 middle
        assert!((count(0.0) / total - 0.3085).abs() < 0.02);
        assert!((count(0.5) / total - 0.3829).abs() < 0.02);
        assert!((count(1.0) / total - 0.3085).abs() < 0.02);
    }

    #[test]
    fn fixed_point_endpoints_midpoint_and_clamp() {
        // values engineered around mean 0: ±4σ hit ±254, mean hits 0,
        // outliers clamp
        let mut rng = substream(5, "fp");
        let normal = Normal::new(0.0, 1.0).unwrap();
        let mut data = Array2::from_shape_fn((64, 64), |_| normal.sample(&mut rng));
        // symmetrise so the mean is exactly 0
        let flipped = data.t().map(|&x| -x);
        data = (&data + &flipped) / 2.0;
        let w = matrix_from(data);
        let mean = w.mean();
        let std = w.std();
        let fp = quantize_fixed_point(&w).unwrap();
        assert_eq!(fp.provenance(), Provenance::FixedPoint);
        for ((i, j), &v) in fp.data.indexed_iter() {
            assert!(v >= -254.0 && v <= 254.0);
            assert_eq!(v % 2.0, 0.0, "odd level {v}");
            let x = w.data[(i, j)];
            if x >= mean + 4.0 * std {
                assert_eq!(v, 254.0);
            }
            if (x - mean).abs() < 1e-12 {
                assert_eq!(v, 0.0);
            }
        }
        // an outlier far beyond 4σ of the rest is clamped to the endpoint
        let mut data = Array2::from_shape_fn((64, 64), |(i, j)| {
            if (i * 64 + j) % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        });
        data[(0, 0)] = 10.0;
        let w = WeightMatrix::new(data, 1, Provenance::Ideal, 0.0);
        assert!(10.0 > w.mean() + 4.0 * w.std());
        let fp = quantize_fixed_point(&w).unwrap();
        assert_eq!(fp.data[(0, 0)], 254.0);
    }

    #[test]
    fn zero_intra_block_only_touches_blocks() {
        let data = Array2::ones((8, 8));
        let w = WeightMatrix::new(data, 4, Provenance::Ideal, 0.25);
        let z = zero_intra_block(&w);
        for ((i, j), &v) in z.data.indexed_iter() {
            if i / 4 == j / 4 {
                assert_eq!(v, 0.0);
            } else {
                assert_eq!(v, 1.0);
            }
        }
        assert_eq!(z.provenance(), Provenance::Ideal);
    }
}
