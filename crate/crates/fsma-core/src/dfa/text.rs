//! Line-oriented DFA text format.
//!
//! ```text
//! states: q0 q1 q2 q3
//! inputs: s
//! initial: q0
//! accepting: q0
//! missing: self-loop
//! edge: q0 s q1
//! edge: q1 s q2
//! ...
//! ```
//!
//! Sections must appear in that order; `missing:` is optional (default
//! `error`) and controls whether an incomplete transition table is rejected
//! or completed with self-loops. Blank lines and `#` comments are ignored.

use std::collections::HashMap;

use super::{Dfa, DfaError};

/// How to totalise a partial transition table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    /// Reject with a diagnostic naming the first missing `(state, input)`.
    #[default]
    Error,
    /// Complete every missing pair as a self-loop.
    SelfLoop,
}

impl Dfa {
    /// Parse the line-oriented text format.
    pub fn parse_text(text: &str) -> Result<Self, DfaError> {
        let mut states: Option<Vec<String>> = None;
        let mut inputs: Option<Vec<String>> = None;
        let mut initial: Option<String> = None;
        let mut accepting: Vec<String> = Vec::new();
        let mut saw_accepting = false;
        let mut missing = MissingPolicy::Error;
        let mut edges: Vec<(String, String, String, usize)> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, rest) = trimmed.split_once(':').ok_or(DfaError::Syntax {
                line,
                col: 1,
                msg: "expected `key: value`".to_string(),
            })?;
            let col = key.len() + 2;
            let fields: Vec<&str> = rest.split_whitespace().collect();
            match key.trim() {
                "states" => {
                    if fields.is_empty() {
                        return Err(DfaError::Syntax {
                            line,
                            col,
                            msg: "at least one state required".to_string(),
                        });
                    }
                    states = Some(fields.iter().map(|s| s.to_string()).collect());
                }
                "inputs" => {
                    inputs = Some(fields.iter().map(|s| s.to_string()).collect());
                }
                "initial" => {
                    if fields.len() != 1 {
                        return Err(DfaError::Syntax {
                            line,
                            col,
                            msg: "exactly one initial state required".to_string(),
                        });
                    }
                    initial = Some(fields[0].to_string());
                }
                "accepting" => {
                    saw_accepting = true;
                    accepting = fields.iter().map(|s| s.to_string()).collect();
                }
                "missing" => match fields.as_slice() {
                    ["self-loop"] => missing = MissingPolicy::SelfLoop,
                    ["error"] => missing = MissingPolicy::Error,
                    _ => {
                        return Err(DfaError::Syntax {
                            line,
                            col,
                            msg: "missing policy must be `self-loop` or `error`".to_string(),
                        })
                    }
                },
                "edge" => {
                    if fields.len() != 3 {
                        return Err(DfaError::Syntax {
                            line,
                            col,
                            msg: "edge needs `source input target`".to_string(),
                        });
                    }
                    edges.push((
                        fields[0].to_string(),
                        fields[1].to_string(),
                        fields[2].to_string(),
                        line,
                    ));
                }
                other => {
                    return Err(DfaError::Syntax {
                        line,
                        col: 1,
                        msg: format!("unknown section {other:?}"),
                    })
                }
            }
        }

        let states = states.ok_or(DfaError::Syntax {
            line: 0,
            col: 0,
            msg: "missing `states:` line".to_string(),
        })?;
        let inputs = inputs.ok_or(DfaError::Syntax {
            line: 0,
            col: 0,
            msg: "missing `inputs:` line".to_string(),
        })?;
        let initial = initial.ok_or(DfaError::Syntax {
            line: 0,
            col: 0,
            msg: "missing `initial:` line".to_string(),
        })?;
        if !saw_accepting {
            return Err(DfaError::Syntax {
                line: 0,
                col: 0,
                msg: "missing `accepting:` line".to_string(),
            });
        }

        let state_idx: HashMap<&str, usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        if state_idx.len() != states.len() {
            let dup = states
                .iter()
                .find(|s| states.iter().filter(|t| t == s).count() > 1)
                .unwrap();
            return Err(DfaError::DuplicateState(dup.clone()));
        }
        let input_idx: HashMap<&str, usize> = inputs
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        if input_idx.len() != inputs.len() {
            let dup = inputs
                .iter()
                .find(|s| inputs.iter().filter(|t| t == s).count() > 1)
                .unwrap();
            return Err(DfaError::DuplicateInput(dup.clone()));
        }

        let lookup_state = |name: &str| -> Result<usize, DfaError> {
            state_idx
                .get(name)
                .copied()
                .ok_or_else(|| DfaError::UnknownState(name.to_string()))
        };
        let lookup_input = |name: &str| -> Result<usize, DfaError> {
            input_idx
                .get(name)
                .copied()
                .ok_or_else(|| DfaError::UnknownInput(name.to_string()))
        };

        let initial = lookup_state(&initial)?;
        let mut acc = vec![false; states.len()];
        for name in &accepting {
            acc[lookup_state(name)?] = true;
        }

        let mut transition: Vec<Vec<Option<usize>>> =
            vec![vec![None; inputs.len()]; states.len()];
        for (src, inp, dst, _line) in &edges {
            let q = lookup_state(src)?;
            let s = lookup_input(inp)?;
            let q2 = lookup_state(dst)?;
            if transition[q][s].is_some() {
                return Err(DfaError::DuplicateEdge {
                    state: src.clone(),
                    input: inp.clone(),
                });
            }
            transition[q][s] = Some(q2);
        }

        let transition: Vec<Vec<usize>> = transition
            .into_iter()
            .enumerate()
            .map(|(q, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(s, t)| match (t, missing) {
                        (Some(t), _) => Ok(t),
                        (None, MissingPolicy::SelfLoop) => Ok(q),
                        (None, MissingPolicy::Error) => Err(DfaError::NonTotal {
                            state: states[q].clone(),
                            input: inputs[s].clone(),
                        }),
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;

        Dfa::new(states, inputs, transition, initial, acc)
    }

    /// Serialise to the text format. Parsing the output reproduces the same
    /// DFA value; states and inputs keep declaration order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("states:");
        for s in &self.states {
            out.push(' ');
            out.push_str(s);
        }
        out.push_str("\ninputs:");
        for s in &self.inputs {
            out.push(' ');
            out.push_str(s);
        }
        out.push_str("\ninitial: ");
        out.push_str(&self.states[self.initial]);
        out.push_str("\naccepting:");
        for (i, s) in self.states.iter().enumerate() {
            if self.accepting[i] {
                out.push(' ');
                out.push_str(s);
            }
        }
        out.push('\n');
        for q in 0..self.num_states() {
            for s in 0..self.num_inputs() {
                out.push_str(&format!(
                    "edge: {} {} {}\n",
                    self.states[q],
                    self.inputs[s],
                    self.states[self.transition[q][s]]
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const COUNTER: &str = "\
states: q0 q1 q2 q3
inputs: s
initial: q0
accepting: q0
edge: q0 s q1
edge: q1 s q2
edge: q2 s q3
edge: q3 s q0
";

    #[test]
    fn parses_four_state_counter() {
        let d = Dfa::parse_text(COUNTER).unwrap();
        assert_eq!(d.num_states(), 4);
        assert_eq!(d.num_inputs(), 1);
        let w = d.parse_word("ssss").unwrap();
        assert_eq!(d.walk(&w), 0);
        assert_eq!(d.walk(&w[..2]), 2);
    }

    #[test]
    fn self_loop_policy_completes_partial_tables() {
        // two-input machine drawn with only its forward edges
        let text = "\
states: q0 q1 q2 q3
inputs: a b
initial: q0
accepting: q0
missing: self-loop
edge: q0 a q1
edge: q1 a q2
edge: q2 b q3
edge: q3 b q0
";
        let d = Dfa::parse_text(text).unwrap();
        let w = d.parse_word("aabb").unwrap();
        assert_eq!(d.walk(&w), 0);
        // unused symbols self-loop
        assert_eq!(d.next(0, 1), 0);
        assert_eq!(d.next(2, 0), 2);
    }

    #[test]
    fn partial_table_rejected_by_default() {
        let text = "\
states: q0 q1
inputs: a b
initial: q0
accepting:
edge: q0 a q1
edge: q0 b q0
edge: q1 a q0
";
        let err = Dfa::parse_text(text).unwrap_err();
        assert_eq!(
            err,
            DfaError::NonTotal {
                state: "q1".to_string(),
                input: "b".to_string()
            }
        );
    }

    #[test]
    fn syntax_errors_carry_location() {
        let err = Dfa::parse_text("states q0\n").unwrap_err();
        assert!(matches!(err, DfaError::Syntax { line: 1, .. }));
        let err = Dfa::parse_text("states: q0\ninputs: a\ninitial: q0 q1\n').").unwrap_err();
        assert!(matches!(err, DfaError::Syntax { line: 3, .. }));
    }

    #[test]
    fn unknown_state_reference() {
        let text = "\
states: q0
inputs: a
initial: q0
accepting:
edge: q0 a q9
";
        assert_eq!(
            Dfa::parse_text(text).unwrap_err(),
            DfaError::UnknownState("q9".to_string())
        );
    }

    #[test]
    fn roundtrip_is_identity() {
        let d = Dfa::moddiv(7).unwrap();
        let text = d.to_text();
        let back = Dfa::parse_text(&text).unwrap();
        assert_eq!(d, back);

        let d = Dfa::parse_text(COUNTER).unwrap();
        assert_eq!(Dfa::parse_text(&d.to_text()).unwrap(), d);
    }
}
