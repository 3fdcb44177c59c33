//! Weight-matrix construction from outer-product factor pairs.
//!
//! Every term of the superposition is a rank-1 outer product `u·vᵀ`; the
//! full matrix is assembled as one `U·Vᵀ` product over the stacked factor
//! columns. With block lengths that are powers of two all factor entries
//! are dyadic rationals, so the result is exact and independent of
//! accumulation order.

use ndarray::Array2;

use super::{EmbeddingCodebook, Provenance, WeightError, WeightMatrix};
use crate::dfa::Dfa;
use crate::vsa::{BmapVector, SbcVector};

/// Which input symbols contribute bound bridge terms for each state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BridgeInputs {
    /// Every input symbol, for every state (conservative default).
    #[default]
    AllSymbols,
    /// Only the inputs of edges arriving at the state. Reduces cross-talk
    /// for machines with many inputs that each reach few states.
    IncomingOnly,
}

/// Inputs that can land on each state, per [`BridgeInputs`].
pub(super) fn bridge_symbol_sets(dfa: &Dfa, policy: BridgeInputs) -> Vec<Vec<usize>> {
    match policy {
        BridgeInputs::AllSymbols => {
            vec![(0..dfa.num_inputs()).collect(); dfa.num_states()]
        }
        BridgeInputs::IncomingOnly => {
            let mut sets = vec![Vec::new(); dfa.num_states()];
            for (_, s, target) in dfa.non_loop_edges() {
                if !sets[target].contains(&s) {
                    sets[target].push(s);
                }
            }
            sets
        }
    }
}

fn shifted(v: &SbcVector, f: f64) -> Vec<f64> {
    let mut out = vec![-f; v.n()];
    for i in v.active_components() {
        out[i] = 1.0 - f;
    }
    out
}

fn difference(a: &SbcVector, b: &SbcVector) -> Vec<f64> {
    let mut out = vec![0.0; a.n()];
    for i in a.active_components() {
        out[i] += 1.0;
    }
    for i in b.active_components() {
        out[i] -= 1.0;
    }
    out
}

fn bound_shifted(v: &SbcVector, f: f64, s: &BmapVector) -> Vec<f64> {
    let l = v.block_len();
    let mut out = Vec::with_capacity(v.n());
    for (block, &sign) in s.signs().iter().enumerate() {
        let active = v.active()[block] as usize;
        for i in 0..l {
            let value = if i == active { 1.0 - f } else { -f };
            out.push(value * sign as f64);
        }
    }
    out
}

pub(super) struct FactorStack {
    n: usize,
    left: Vec<f64>,
    right: Vec<f64>,
    count: usize,
}

impl FactorStack {
    fn new(n: usize) -> Self {
        Self {
            n,
            left: Vec::new(),
            right: Vec::new(),
            count: 0,
        }
    }

    fn push(&mut self, u: Vec<f64>, v: Vec<f64>) {
        debug_assert_eq!(u.len(), self.n);
        debug_assert_eq!(v.len(), self.n);
        self.left.extend(u);
        self.right.extend(v);
        self.count += 1;
    }

    /// `Σ_k u_k·v_kᵀ` as a dense N×N matrix.
    fn multiply(self) -> Array2<f64> {
        let n = self.n;
        if self.count == 0 {
            return Array2::zeros((n, n));
        }
        // factors were appended row-wise as (count, n); W = UᵀV' with
        // U' = (count, n) stacks of u rows, so W = U_rows.t() · V_rows
        let u = Array2::from_shape_vec((self.count, n), self.left).expect("factor shape");
        let v = Array2::from_shape_vec((self.count, n), self.right).expect("factor shape");
        u.t().dot(&v)
    }
}

fn attractor_stack(cb: &EmbeddingCodebook) -> FactorStack {
    let f = cb.f_used();
    let mut stack = FactorStack::new(cb.n());
    for q in cb.state_vecs() {
        let u = shifted(q, f);
        stack.push(u.clone(), u);
    }
    stack
}

fn bridge_stack(dfa: &Dfa, cb: &EmbeddingCodebook, policy: BridgeInputs) -> FactorStack {
    let f = cb.f_used();
    let symbol_sets = bridge_symbol_sets(dfa, policy);
    let mut stack = FactorStack::new(cb.n());
    for state in 0..dfa.num_states() {
        let q = cb.state_vec(state);
        let b = cb.bridge_vec(state);
        stack.push(shifted(q, f), shifted(b, f));
        for &s in &symbol_sets[state] {
            stack.push(difference(b, q), bound_shifted(b, f, cb.input_vec(s)));
        }
    }
    stack
}

fn transition_stack(dfa: &Dfa, cb: &EmbeddingCodebook) -> FactorStack {
    let f = cb.f_used();
    let mut stack = FactorStack::new(cb.n());
    for (source, symbol, target) in dfa.non_loop_edges() {
        let q = cb.state_vec(source);
        let b_target = cb.bridge_vec(target);
        stack.push(
            difference(b_target, q),
            bound_shifted(q, f, cb.input_vec(symbol)),
        );
    }
    stack
}

/// Compile the full recurrent weight matrix for `dfa` under `cb`.
pub fn build_weights(dfa: &Dfa, cb: &EmbeddingCodebook) -> Result<WeightMatrix, WeightError> {
    build_weights_with(dfa, cb, BridgeInputs::default())
}

/// All three factor families stacked in construction order.
pub(super) fn full_stack(
    dfa: &Dfa,
    cb: &EmbeddingCodebook,
    policy: BridgeInputs,
) -> Result<FactorStack, WeightError> {
    cb.covers(dfa)?;
    let mut stack = attractor_stack(cb);
    let bridge = bridge_stack(dfa, cb, policy);
    let transition = transition_stack(dfa, cb);
    stack.count += bridge.count + transition.count;
    stack.left.extend(bridge.left);
    stack.left.extend(transition.left);
    stack.right.extend(bridge.right);
    stack.right.extend(transition.right);
    Ok(stack)
}

/// [`build_weights`] with an explicit bridge-input policy.
pub fn build_weights_with(
    dfa: &Dfa,
    cb: &EmbeddingCodebook,
    policy: BridgeInputs,
) -> Result<WeightMatrix, WeightError> {
    let stack = full_stack(dfa, cb, policy)?;
    Ok(WeightMatrix::new(
        stack.multiply(),
        cb.block_len(),
        Provenance::Ideal,
        cb.f_used(),
    ))
}

/// The three superposed families as separate matrices (their sum equals
/// [`build_weights`] exactly).
pub struct WeightComponents {
    pub attractor: WeightMatrix,
    pub bridge: WeightMatrix,
    pub transition: WeightMatrix,
}

pub fn build_weight_components(
    dfa: &Dfa,
    cb: &EmbeddingCodebook,
    policy: BridgeInputs,
) -> Result<WeightComponents, WeightError> {
    cb.covers(dfa)?;
    let l = cb.block_len();
    let f = cb.f_used();
    let wrap = |m: Array2<f64>| WeightMatrix::new(m, l, Provenance::Ideal, f);
    Ok(WeightComponents {
        attractor: wrap(attractor_stack(cb).multiply()),
        bridge: wrap(bridge_stack(dfa, cb, policy).multiply()),
        transition: wrap(transition_stack(dfa, cb).multiply()),
    })
}

/// Pure autoassociative matrix `Σ (p−f)(p−f)ᵀ` over arbitrary stored
/// patterns (no DFA structure).
pub fn build_attractor_matrix(patterns: &[SbcVector], f: f64) -> WeightMatrix {
    assert!(!patterns.is_empty(), "at least one pattern required");
    let n = patterns[0].n();
    let l = patterns[0].block_len();
    let mut stack = FactorStack::new(n);
    for p in patterns {
        assert_eq!(p.n(), n);
        assert_eq!(p.block_len(), l);
        let u = shifted(p, f);
        stack.push(u.clone(), u);
    }
    WeightMatrix::new(stack.multiply(), l, Provenance::Ideal, f)
}
