//! Deterministic finite automata: construction, symbolic execution, a
//! line-oriented text format, and a regex frontend.
//!
//! [`Dfa::walk`] is the brute-force oracle that every network engine is
//! judged against.

mod regex;
mod text;

pub use regex::{random_pattern, regex_match, regex_to_dfa, RegexError};
pub use text::MissingPolicy;

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DfaError {
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(usize),
    #[error("duplicate state id {0:?}")]
    DuplicateState(String),
    #[error("duplicate input id {0:?}")]
    DuplicateInput(String),
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("unknown input {0:?}")]
    UnknownInput(String),
    #[error("unknown symbol {0:?} in word")]
    UnknownSymbol(String),
    #[error("transition function is not total: missing F({state}, {input})")]
    NonTotal { state: String, input: String },
    #[error("duplicate edge for ({state}, {input})")]
    DuplicateEdge { state: String, input: String },
    #[error("line {line}, col {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("DFA has no states")]
    Empty,
}

/// A deterministic finite automaton with a total transition function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    states: Vec<String>,
    inputs: Vec<String>,
    /// transition[state][input] → state
    transition: Vec<Vec<usize>>,
    initial: usize,
    accepting: Vec<bool>,
    state_index: HashMap<String, usize>,
    input_index: HashMap<String, usize>,
}

impl Dfa {
    /// Build a DFA from id lists and a complete transition table.
    pub fn new(
        states: Vec<String>,
        inputs: Vec<String>,
        transition: Vec<Vec<usize>>,
        initial: usize,
        accepting: Vec<bool>,
    ) -> Result<Self, DfaError> {
        if states.is_empty() {
            return Err(DfaError::Empty);
        }
        let mut state_index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if state_index.insert(s.clone(), i).is_some() {
                return Err(DfaError::DuplicateState(s.clone()));
            }
        }
        let mut input_index = HashMap::new();
        for (i, s) in inputs.iter().enumerate() {
            if input_index.insert(s.clone(), i).is_some() {
                return Err(DfaError::DuplicateInput(s.clone()));
            }
        }
        assert_eq!(transition.len(), states.len());
        assert!(transition.iter().all(|row| row.len() == inputs.len()));
        assert!(initial < states.len());
        assert_eq!(accepting.len(), states.len());
        Ok(Self {
            states,
            inputs,
            transition,
            initial,
            accepting,
            state_index,
            input_index,
        })
    }

    /// Modular-division machine: `p` states over inputs `s0`, `s1` with
    /// `F(q_n, s0) = q_{2n mod p}` and `F(q_n, s1) = q_{2n+1 mod p}`.
    ///
    /// Feeding an integer's binary expansion most-significant-bit first
    /// halts in the state indexed by the integer mod `p`.
    pub fn moddiv(p: usize) -> Result<Self, DfaError> {
        if p < 2 {
            return Err(DfaError::BadModulus(p));
        }
        let states: Vec<String> = (0..p).map(|n| format!("q{n}")).collect();
        let inputs = vec!["s0".to_string(), "s1".to_string()];
        let transition = (0..p)
            .map(|n| vec![(2 * n) % p, (2 * n + 1) % p])
            .collect();
        let mut accepting = vec![false; p];
        accepting[0] = true;
        Self::new(states, inputs, transition, 0, accepting)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn state_name(&self, idx: usize) -> &str {
        &self.states[idx]
    }

    pub fn input_name(&self, idx: usize) -> &str {
        &self.inputs[idx]
    }

    pub fn state_index(&self, name: &str) -> Result<usize, DfaError> {
        self.state_index
            .get(name)
            .copied()
            .ok_or_else(|| DfaError::UnknownState(name.to_string()))
    }

    pub fn input_index(&self, name: &str) -> Result<usize, DfaError> {
        self.input_index
            .get(name)
            .copied()
            .ok_or_else(|| DfaError::UnknownInput(name.to_string()))
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    pub fn next(&self, state: usize, input: usize) -> usize {
        self.transition[state][input]
    }

    /// Non-loop transitions `(source, input, target)` with `target ≠ source`.
    pub fn non_loop_edges(&self) -> Vec<(usize, usize, usize)> {
        let mut edges = Vec::new();
        for q in 0..self.num_states() {
            for s in 0..self.num_inputs() {
                let q2 = self.transition[q][s];
                if q2 != q {
                    edges.push((q, s, q2));
                }
            }
        }
        edges
    }

    /// Fold the transition function over `word`, starting from the initial
    /// state. The empty word stays at the initial state.
    pub fn walk(&self, word: &[usize]) -> usize {
        word.iter().fold(self.initial, |q, &s| {
            assert!(s < self.num_inputs(), "symbol index {s} out of range");
            self.transition[q][s]
        })
    }

    /// Parse a word given as one character per symbol. A character `c`
    /// matches the input named `c` if present, else the input named `s{c}`
    /// (so digit strings address the moddiv machines directly).
    pub fn parse_word(&self, text: &str) -> Result<Vec<usize>, DfaError> {
        text.chars()
            .map(|c| {
                let direct = self.input_index.get(&c.to_string());
                let prefixed = self.input_index.get(&format!("s{c}"));
                direct
                    .or(prefixed)
                    .copied()
                    .ok_or_else(|| DfaError::UnknownSymbol(c.to_string()))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moddiv_transitions() {
        let d = Dfa::moddiv(23).unwrap();
        // 2·5+1 = 11
        assert_eq!(d.next(5, 1), 11);
        // 44 mod 23 = 21
        assert_eq!(d.next(22, 0), 21);
        assert_eq!(d.num_states(), 23);
        assert_eq!(d.num_inputs(), 2);
        assert!(d.is_accepting(0));
    }

    #[test]
    fn moddiv_two_has_self_loop_excluded_from_edges() {
        let d = Dfa::moddiv(2).unwrap();
        assert_eq!(d.next(0, 0), 0); // self-loop
        assert!(!d.non_loop_edges().contains(&(0, 0, 0)));
    }

    #[test]
    fn moddiv_rejects_small_modulus() {
        assert_eq!(Dfa::moddiv(1), Err(DfaError::BadModulus(1)));
    }

    #[test]
    fn walk_matches_modular_arithmetic() {
        let d = Dfa::moddiv(23).unwrap();
        // 68 = 1000100₂, 68 mod 23 = 22
        let w = d.parse_word("1000100").unwrap();
        assert_eq!(d.walk(&w), 22);
        // 92 = 1011100₂, divisible by 23
        let w = d.parse_word("1011100").unwrap();
        assert_eq!(d.walk(&w), 0);
        // empty word stays at q0
        assert_eq!(d.walk(&[]), 0);
    }

    #[test]
    fn walk_exhaustive_small_and_sampled_large() {
        for p in [2, 3, 5, 23, 97] {
            let d = Dfa::moddiv(p).unwrap();
            for value in 0..1024u32 {
                let word: Vec<usize> = (0..10)
                    .rev()
                    .map(|b| ((value >> b) & 1) as usize)
                    .collect();
                assert_eq!(d.walk(&word), (value as usize) % p, "value {value} mod {p}");
            }
        }
        // spot-check wider values
        let d = Dfa::moddiv(23).unwrap();
        for value in [1u64 << 15, 40_000, 65_535] {
            let bits = 16;
            let word: Vec<usize> = (0..bits).rev().map(|b| ((value >> b) & 1) as usize).collect();
            assert_eq!(d.walk(&word), (value % 23) as usize);
        }
    }

    #[test]
    fn unknown_symbol_is_rejected() {
        let d = Dfa::moddiv(5).unwrap();
        assert!(matches!(d.parse_word("10x"), Err(DfaError::UnknownSymbol(_))));
    }
}
