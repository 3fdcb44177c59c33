//! Analytic collision bound for randomly generated SBC codebooks.
//!
//! With `M = N/L` blocks, the probability that the similarity of one
//! independent pair deviates from its mean `f = 1/L` by at least `θ` is
//! bounded by `exp(−2Mθ²)` (Hoeffding). A union bound over all pairs of a
//! codebook of size `K` stays below the failure budget `δ` as long as
//! `K ≤ √(2δ)·exp(Mθ²)`.

use super::VsaError;

/// Result of the collision bound, reported in log space alongside a
/// saturating integer (the exponential overflows `u128` for large `N/L`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionCapacity {
    /// log₁₀ of the codebook size bound.
    pub log10_count: f64,
    /// ⌊√(2δ)·exp(Mθ²)⌋, saturating at `u128::MAX`.
    pub count: u128,
}

/// Largest codebook size whose pairwise-similarity excess stays below
/// `theta` with probability at least `1 − delta`.
pub fn collision_capacity(
    n: usize,
    l: usize,
    theta: f64,
    delta: f64,
) -> Result<CollisionCapacity, VsaError> {
    if l == 0 || n == 0 || n % l != 0 {
        return Err(VsaError::BadBlockShape { n, l });
    }
    assert!(theta > 0.0 && theta < 1.0, "theta must be in (0, 1)");
    assert!(delta > 0.0 && delta < 1.0, "delta must be in (0, 1)");
    let m = (n / l) as f64;
    let ln_k = 0.5 * (2.0 * delta).ln() + m * theta * theta;
    let log10_count = ln_k / std::f64::consts::LN_10;
    // u128::MAX ≈ 3.4e38; stay clear of the edge before exponentiating
    let count = if ln_k >= 88.0 {
        u128::MAX
    } else {
        ln_k.exp().floor() as u128
    };
    Ok(CollisionCapacity { log10_count, count })
}

/// Empirical tail of the pairwise-similarity distribution against the
/// analytic bound.
#[derive(Debug, Clone, Copy)]
pub struct ExceedanceReport {
    pub pairs: usize,
    pub exceedances: usize,
    /// Fraction of pairs with `sim − f ≥ theta`.
    pub rate: f64,
    /// `exp(−2Mθ²)`.
    pub bound: f64,
}

/// Sample independent SBC pairs and count how often the similarity excess
/// reaches `theta`.
pub fn exceedance_rate(
    n: usize,
    l: usize,
    theta: f64,
    pairs: usize,
    seed: u64,
) -> Result<ExceedanceReport, VsaError> {
    use super::{similarity_sbc, SbcVector};
    let mut rng = crate::rng::substream(seed, "exceedance");
    let f = 1.0 / l as f64;
    let m = (n / l) as f64;
    let mut exceedances = 0usize;
    for _ in 0..pairs {
        let a = SbcVector::random(n, l, &mut rng)?;
        let b = SbcVector::random(n, l, &mut rng)?;
        if similarity_sbc(&a, &b)? - f >= theta {
            exceedances += 1;
        }
    }
    Ok(ExceedanceReport {
        pairs,
        exceedances,
        rate: exceedances as f64 / pairs as f64,
        bound: (-2.0 * m * theta * theta).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_closed_form() {
        // N=1000, L=8, θ=(1−f)/2, δ=1e−4:
        // K = √(2e−4)·exp(125·0.4375²) = 3.4777e8
        let f = 1.0 / 8.0;
        let theta = (1.0 - f) / 2.0;
        let got = collision_capacity(1000, 8, theta, 1e-4).unwrap();
        let expect = (2.0e-4_f64).sqrt() * (125.0 * theta * theta).exp();
        assert!(
            (got.count as f64 - expect).abs() / expect < 1e-6,
            "count {} vs {expect}",
            got.count
        );
        assert!((got.log10_count - expect.log10()).abs() < 1e-9);
    }

    #[test]
    fn vanishing_delta_gives_zero() {
        let got = collision_capacity(64, 8, 0.4, 1e-300).unwrap();
        assert_eq!(got.count, 0);
    }

    #[test]
    fn saturates_instead_of_overflowing() {
        let got = collision_capacity(100_000, 4, 0.375, 0.01).unwrap();
        assert_eq!(got.count, u128::MAX);
        assert!(got.log10_count > 38.0);
    }
}
