//! Closed-form mean and fluctuation statistics of the postsynaptic drive
//! `h = W·z`, for a network sitting in a stored state with or without an
//! input mask.
//!
//! The forms assume randomly generated codebooks (pseudo-orthogonal
//! cross-talk with variances combining linearly); orthogonal codebooks are
//! refused. `Q`, `S`, `E` are the state, input, and non-loop edge counts.

use super::build::{bridge_symbol_sets, BridgeInputs};
use super::{CodebookMode, EmbeddingCodebook, WeightError};
use crate::dfa::Dfa;

/// Network condition the prediction refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveCondition {
    /// Sitting in a stored state, no input.
    AtState,
    /// Sitting in a stored state, masked by the input of a valid outgoing
    /// edge; the drive then points at the target's bridge vector.
    AtStateMasked,
}

/// Predicted per-component statistics of the drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HStats {
    /// Mean drive of components active in the attracting pattern.
    pub active_mean: f64,
    /// Mean drive of the remaining components.
    pub inactive_mean: f64,
    /// `active_mean − inactive_mean`: `M(1−f)` without input, halved under
    /// a mask.
    pub signal_gap: f64,
    /// Aggregate cross-talk standard deviation per component.
    pub noise_std: f64,
    /// Contribution of the attractor terms alone (zero for one pattern).
    pub attractor_std: f64,
    pub bridge_std: f64,
    pub transition_std: f64,
}

/// Predict drive statistics for `dfa` embedded under `cb`.
pub fn predict_h_stats(
    dfa: &Dfa,
    cb: &EmbeddingCodebook,
    condition: DriveCondition,
) -> Result<HStats, WeightError> {
    predict_h_stats_with(dfa, cb, condition, BridgeInputs::AllSymbols)
}

/// [`predict_h_stats`] for an explicit bridge-input policy (the policy
/// must match the one used to build the weights).
pub fn predict_h_stats_with(
    dfa: &Dfa,
    cb: &EmbeddingCodebook,
    condition: DriveCondition,
    policy: BridgeInputs,
) -> Result<HStats, WeightError> {
    if cb.mode() == CodebookMode::Orthogonal {
        return Err(WeightError::OrthogonalPrediction);
    }
    let m = cb.num_blocks() as f64;
    let f = cb.f_used();
    let q = dfa.num_states() as f64;
    let s = dfa.num_inputs() as f64;
    let e = dfa.non_loop_edges().len() as f64;
    // total bound bridge terms: Q·S for the conservative policy
    let s_total: f64 = bridge_symbol_sets(dfa, policy)
        .iter()
        .map(|set| set.len() as f64)
        .sum();

    let (amplitude, attr_var, bridge_var, trans_var) = match condition {
        DriveCondition::AtState => (
            m * (1.0 - f),
            f * f * (q - 1.0) * m,
            f * f * m * (q + 2.0 * s_total),
            2.0 * f * f * m * e + 2.0 * m * f * s,
        ),
        DriveCondition::AtStateMasked => (
            0.5 * m * (1.0 - f),
            f * f * (q - 1.0) * m / 2.0,
            f * f * m * (q + 2.0 * s_total) / 2.0,
            m * (f * f * e + f * (s - 1.0).max(0.0)),
        ),
    };
    Ok(HStats {
        active_mean: amplitude * (1.0 - f),
        inactive_mean: -amplitude * f,
        signal_gap: amplitude,
        noise_std: (attr_var + bridge_var + trans_var).sqrt(),
        attractor_std: attr_var.sqrt(),
        bridge_std: bridge_var.sqrt(),
        transition_std: trans_var.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::EmbeddingCodebook;

    #[test]
    fn moddiv23_signal_amplitude() {
        // N=2048, L=8: M(1−f) = 256·0.875 = 224
        let dfa = Dfa::moddiv(23).unwrap();
        let cb = EmbeddingCodebook::generate(&dfa, 2048, 8, CodebookMode::Random, 1).unwrap();
        let stats = predict_h_stats(&dfa, &cb, DriveCondition::AtState).unwrap();
        assert_eq!(stats.signal_gap, 224.0);
        assert_eq!(stats.active_mean - stats.inactive_mean, stats.signal_gap);
        let masked = predict_h_stats(&dfa, &cb, DriveCondition::AtStateMasked).unwrap();
        assert_eq!(masked.signal_gap, 112.0);
        assert!(masked.noise_std < stats.noise_std);
    }

    #[test]
    fn single_pattern_has_no_attractor_cross_talk() {
        let dfa = Dfa::new(
            vec!["q0".to_string()],
            vec![],
            vec![vec![]],
            0,
            vec![false],
        )
        .unwrap();
        let cb = EmbeddingCodebook::generate(&dfa, 256, 8, CodebookMode::Random, 1).unwrap();
        let stats = predict_h_stats(&dfa, &cb, DriveCondition::AtState).unwrap();
        assert_eq!(stats.attractor_std, 0.0);
        assert_eq!(stats.transition_std, 0.0);
        // the lone bridge still contributes
        assert!(stats.bridge_std > 0.0);
    }

    #[test]
    fn orthogonal_codebook_is_refused() {
        let dfa = Dfa::moddiv(4).unwrap();
        let cb = EmbeddingCodebook::generate(&dfa, 64, 8, CodebookMode::Orthogonal, 0).unwrap();
        assert!(matches!(
            predict_h_stats(&dfa, &cb, DriveCondition::AtState),
            Err(WeightError::OrthogonalPrediction)
        ));
    }
}
