//! Regex frontend: patterns over a declared alphabet compile to minimal
//! total DFAs (Thompson construction, subset construction, Hopcroft
//! minimisation, dead state added for totality).
//!
//! [`regex_match`] is an independent Brzozowski-derivative matcher over the
//! same syntax tree, used as the oracle when testing the compiled automata.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use thiserror::Error;

use super::{Dfa, DfaError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegexError {
    #[error("position {pos}: {msg}")]
    Malformed { pos: usize, msg: String },
    #[error("literal {0:?} is not in the declared alphabet")]
    OutsideAlphabet(char),
    #[error("alphabet must not be empty or contain metacharacters")]
    BadAlphabet,
    #[error(transparent)]
    Dfa(#[from] DfaError),
}

/// Supported syntax: literals from the alphabet, concatenation,
/// alternation `|`, Kleene star `*`, grouping `( )`. The empty pattern
/// matches only the empty word.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Ast {
    Epsilon,
    Literal(char),
    Concat(Box<Ast>, Box<Ast>),
    Alt(Box<Ast>, Box<Ast>),
    Star(Box<Ast>),
}

// ── Parser ───────────────────────────────────────────────────────────

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    alphabet: &'a [char],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn parse_alt(&mut self) -> Result<Ast, RegexError> {
        let mut node = self.parse_concat()?;
        while self.peek() == Some('|') {
            self.pos += 1;
            let rhs = self.parse_concat()?;
            node = Ast::Alt(Box::new(node), Box::new(rhs));
        }
        Ok(node)
    }

    fn parse_concat(&mut self) -> Result<Ast, RegexError> {
        let mut node: Option<Ast> = None;
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            let rep = self.parse_repeat()?;
            node = Some(match node {
                None => rep,
                Some(lhs) => Ast::Concat(Box::new(lhs), Box::new(rep)),
            });
        }
        Ok(node.unwrap_or(Ast::Epsilon))
    }

    fn parse_repeat(&mut self) -> Result<Ast, RegexError> {
        let mut node = self.parse_atom()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            node = Ast::Star(Box::new(node));
        }
        Ok(node)
    }

    fn parse_atom(&mut self) -> Result<Ast, RegexError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.parse_alt()?;
                if self.peek() != Some(')') {
                    return Err(RegexError::Malformed {
                        pos: self.pos,
                        msg: "unclosed group".to_string(),
                    });
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('*') => Err(RegexError::Malformed {
                pos: self.pos,
                msg: "star with nothing to repeat".to_string(),
            }),
            Some(c) => {
                if !self.alphabet.contains(&c) {
                    return Err(RegexError::OutsideAlphabet(c));
                }
                self.pos += 1;
                Ok(Ast::Literal(c))
            }
            None => Err(RegexError::Malformed {
                pos: self.pos,
                msg: "unexpected end of pattern".to_string(),
            }),
        }
    }
}

fn parse(pattern: &str, alphabet: &[char]) -> Result<Ast, RegexError> {
    if alphabet.is_empty() || alphabet.iter().any(|c| "|*()".contains(*c)) {
        return Err(RegexError::BadAlphabet);
    }
    let mut p = Parser {
        chars: pattern.chars().collect(),
        pos: 0,
        alphabet,
    };
    let ast = p.parse_alt()?;
    if p.pos != p.chars.len() {
        return Err(RegexError::Malformed {
            pos: p.pos,
            msg: "trailing input (unbalanced `)`?)".to_string(),
        });
    }
    Ok(ast)
}

// ── Brzozowski-derivative matcher (oracle) ───────────────────────────

fn nullable(ast: &Ast) -> bool {
    match ast {
        Ast::Epsilon | Ast::Star(_) => true,
        Ast::Literal(_) => false,
        Ast::Concat(a, b) => nullable(a) && nullable(b),
        Ast::Alt(a, b) => nullable(a) || nullable(b),
    }
}

/// Derivative of the language with respect to `c`; `None` is the empty
/// language (no continuation matches).
fn derivative(ast: &Ast, c: char) -> Option<Ast> {
    match ast {
        Ast::Epsilon => None,
        Ast::Literal(l) => (*l == c).then_some(Ast::Epsilon),
        Ast::Alt(a, b) => match (derivative(a, c), derivative(b, c)) {
            (None, d) | (d, None) => d,
            (Some(da), Some(db)) => Some(Ast::Alt(Box::new(da), Box::new(db))),
        },
        Ast::Concat(a, b) => {
            let left = derivative(a, c).map(|da| Ast::Concat(Box::new(da), Box::new((**b).clone())));
            let right = if nullable(a) { derivative(b, c) } else { None };
            match (left, right) {
                (None, d) | (d, None) => d,
                (Some(x), Some(y)) => Some(Ast::Alt(Box::new(x), Box::new(y))),
            }
        }
        Ast::Star(a) => derivative(a, c)
            .map(|da| Ast::Concat(Box::new(da), Box::new(Ast::Star(a.clone())))),
    }
}

/// Direct matcher: does `word` belong to the pattern's language?
pub fn regex_match(pattern: &str, alphabet: &[char], word: &str) -> Result<bool, RegexError> {
    let mut ast = parse(pattern, alphabet)?;
    for c in word.chars() {
        if !alphabet.contains(&c) {
            return Ok(false);
        }
        match derivative(&ast, c) {
            Some(next) => ast = next,
            None => return Ok(false),
        }
    }
    Ok(nullable(&ast))
}

// ── Thompson construction ────────────────────────────────────────────

#[derive(Default)]
struct Nfa {
    /// eps[i] = ε-successors of state i
    eps: Vec<Vec<usize>>,
    /// step[i] = labelled successors (symbol index, target)
    step: Vec<Vec<(usize, usize)>>,
}

impl Nfa {
    fn add_state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.step.push(Vec::new());
        self.eps.len() - 1
    }

    fn build(&mut self, ast: &Ast, alphabet: &[char]) -> (usize, usize) {
        match ast {
            Ast::Epsilon => {
                let s = self.add_state();
                let t = self.add_state();
                self.eps[s].push(t);
                (s, t)
            }
            Ast::Literal(c) => {
                let sym = alphabet.iter().position(|a| a == c).expect("validated");
                let s = self.add_state();
                let t = self.add_state();
                self.step[s].push((sym, t));
                (s, t)
            }
            Ast::Concat(a, b) => {
                let (sa, ta) = self.build(a, alphabet);
                let (sb, tb) = self.build(b, alphabet);
                self.eps[ta].push(sb);
                (sa, tb)
            }
            Ast::Alt(a, b) => {
                let s = self.add_state();
                let (sa, ta) = self.build(a, alphabet);
                let (sb, tb) = self.build(b, alphabet);
                let t = self.add_state();
                self.eps[s].push(sa);
                self.eps[s].push(sb);
                self.eps[ta].push(t);
                self.eps[tb].push(t);
                (s, t)
            }
            Ast::Star(a) => {
                let s = self.add_state();
                let (sa, ta) = self.build(a, alphabet);
                let t = self.add_state();
                self.eps[s].push(sa);
                self.eps[s].push(t);
                self.eps[ta].push(sa);
                self.eps[ta].push(t);
                (s, t)
            }
        }
    }

    fn closure(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut out = set.clone();
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &t in &self.eps[q] {
                if out.insert(t) {
                    stack.push(t);
                }
            }
        }
        out
    }
}

// ── Subset construction + Hopcroft minimisation ──────────────────────

struct RawDfa {
    trans: Vec<Vec<usize>>,
    accepting: Vec<bool>,
    initial: usize,
}

fn subset_construct(nfa: &Nfa, start: usize, accept: usize, num_syms: usize) -> RawDfa {
    let mut index: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
    let mut trans: Vec<Vec<usize>> = Vec::new();
    let mut accepting: Vec<bool> = Vec::new();
    let mut queue: VecDeque<BTreeSet<usize>> = VecDeque::new();

    let start_set = nfa.closure(&BTreeSet::from([start]));
    index.insert(start_set.clone(), 0);
    trans.push(vec![usize::MAX; num_syms]);
    accepting.push(start_set.contains(&accept));
    queue.push_back(start_set);

    while let Some(set) = queue.pop_front() {
        let id = index[&set];
        for sym in 0..num_syms {
            let mut next = BTreeSet::new();
            for &q in &set {
                for &(s, t) in &nfa.step[q] {
                    if s == sym {
                        next.insert(t);
                    }
                }
            }
            // the empty subset is the dead state and is kept, so the
            // resulting transition table is total by construction
            let next = nfa.closure(&next);
            let next_id = match index.get(&next) {
                Some(&i) => i,
                None => {
                    let i = trans.len();
                    index.insert(next.clone(), i);
                    trans.push(vec![usize::MAX; num_syms]);
                    accepting.push(next.contains(&accept));
                    queue.push_back(next);
                    i
                }
            };
            trans[id][sym] = next_id;
        }
    }
    RawDfa {
        trans,
        accepting,
        initial: 0,
    }
}

fn hopcroft(dfa: &RawDfa, num_syms: usize) -> Vec<usize> {
    let n = dfa.trans.len();
    let accepting: BTreeSet<usize> = (0..n).filter(|&q| dfa.accepting[q]).collect();
    let rejecting: BTreeSet<usize> = (0..n).filter(|&q| !dfa.accepting[q]).collect();

    let mut partition: Vec<BTreeSet<usize>> = Vec::new();
    let mut work: VecDeque<BTreeSet<usize>> = VecDeque::new();
    for group in [accepting, rejecting] {
        if !group.is_empty() {
            partition.push(group.clone());
            work.push_back(group);
        }
    }

    while let Some(splitter) = work.pop_front() {
        for sym in 0..num_syms {
            let preimage: BTreeSet<usize> = (0..n)
                .filter(|&q| splitter.contains(&dfa.trans[q][sym]))
                .collect();
            let mut next_partition = Vec::with_capacity(partition.len());
            for group in partition.drain(..) {
                let inside: BTreeSet<usize> =
                    group.intersection(&preimage).copied().collect();
                if inside.is_empty() || inside.len() == group.len() {
                    next_partition.push(group);
                    continue;
                }
                let outside: BTreeSet<usize> = group.difference(&preimage).copied().collect();
                // keep the worklist consistent with the refinement
                if let Some(pos) = work.iter().position(|w| *w == group) {
                    work.remove(pos);
                    work.push_back(inside.clone());
                    work.push_back(outside.clone());
                } else if inside.len() <= outside.len() {
                    work.push_back(inside.clone());
                } else {
                    work.push_back(outside.clone());
                }
                next_partition.push(inside);
                next_partition.push(outside);
            }
            partition = next_partition;
        }
    }

    let mut class_of = vec![0usize; n];
    for (c, group) in partition.iter().enumerate() {
        for &q in group {
            class_of[q] = c;
        }
    }
    class_of
}

/// Compile `pattern` over `alphabet` into a minimal total DFA.
///
/// States are named `d0, d1, ...` in breadth-first order from the initial
/// state; inputs are the alphabet characters in declaration order.
pub fn regex_to_dfa(pattern: &str, alphabet: &[char]) -> Result<Dfa, RegexError> {
    let ast = parse(pattern, alphabet)?;
    let mut nfa = Nfa::default();
    let (start, accept) = nfa.build(&ast, alphabet);
    let raw = subset_construct(&nfa, start, accept, alphabet.len());
    let class_of = hopcroft(&raw, alphabet.len());

    // canonical breadth-first numbering of the classes
    let initial_class = class_of[raw.initial];
    let mut order: Vec<usize> = Vec::new();
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut queue = VecDeque::from([initial_class]);
    seen.insert(initial_class);
    let rep: BTreeMap<usize, usize> = {
        // lowest raw state of each class serves as representative
        let mut rep = BTreeMap::new();
        for (q, &c) in class_of.iter().enumerate() {
            rep.entry(c).or_insert(q);
        }
        rep
    };
    while let Some(c) = queue.pop_front() {
        order.push(c);
        let q = rep[&c];
        for sym in 0..alphabet.len() {
            let t = class_of[raw.trans[q][sym]];
            if seen.insert(t) {
                queue.push_back(t);
            }
        }
    }

    let renumber: BTreeMap<usize, usize> =
        order.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let states: Vec<String> = (0..order.len()).map(|i| format!("d{i}")).collect();
    let inputs: Vec<String> = alphabet.iter().map(|c| c.to_string()).collect();
    let transition: Vec<Vec<usize>> = order
        .iter()
        .map(|&c| {
            let q = rep[&c];
            (0..alphabet.len())
                .map(|sym| renumber[&class_of[raw.trans[q][sym]]])
                .collect()
        })
        .collect();
    let accepting: Vec<bool> = order.iter().map(|&c| raw.accepting[rep[&c]]).collect();
    Ok(Dfa::new(states, inputs, transition, 0, accepting)?)
}

/// Random pattern over `alphabet` for fuzz-style comparisons.
pub fn random_pattern(rng: &mut impl Rng, alphabet: &[char], max_depth: usize) -> String {
    fn gen(rng: &mut impl Rng, alphabet: &[char], depth: usize) -> Ast {
        if depth == 0 {
            return Ast::Literal(alphabet[rng.gen_range(0..alphabet.len())]);
        }
        match rng.gen_range(0..10u8) {
            0..=2 => Ast::Literal(alphabet[rng.gen_range(0..alphabet.len())]),
            3..=5 => Ast::Concat(
                Box::new(gen(rng, alphabet, depth - 1)),
                Box::new(gen(rng, alphabet, depth - 1)),
            ),
            6..=7 => Ast::Alt(
                Box::new(gen(rng, alphabet, depth - 1)),
                Box::new(gen(rng, alphabet, depth - 1)),
            ),
            _ => Ast::Star(Box::new(gen(rng, alphabet, depth - 1))),
        }
    }
    fn render(ast: &Ast) -> String {
        match ast {
            Ast::Epsilon => String::new(),
            Ast::Literal(c) => c.to_string(),
            Ast::Concat(a, b) => {
                let wrap = |x: &Ast| match x {
                    Ast::Alt(..) => format!("({})", render(x)),
                    _ => render(x),
                };
                format!("{}{}", wrap(a), wrap(b))
            }
            Ast::Alt(a, b) => format!("{}|{}", render(a), render(b)),
            Ast::Star(a) => match **a {
                Ast::Literal(_) => format!("{}*", render(a)),
                _ => format!("({})*", render(a)),
            },
        }
    }
    render(&gen(rng, alphabet, max_depth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn all_words(alphabet: &[char], max_len: usize) -> Vec<String> {
        let mut words = vec![String::new()];
        let mut layer = vec![String::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                for &c in alphabet {
                    let mut w2 = w.clone();
                    w2.push(c);
                    next.push(w2);
                }
            }
            words.extend(next.iter().cloned());
            layer = next;
        }
        words
    }

    fn dfa_accepts(dfa: &Dfa, word: &str) -> bool {
        let symbols: Vec<usize> = word
            .chars()
            .map(|c| dfa.input_index(&c.to_string()).unwrap())
            .collect();
        dfa.is_accepting(dfa.walk(&symbols))
    }

    #[test]
    fn binary_strings_ending_in_zero() {
        let alphabet = ['0', '1'];
        let dfa = regex_to_dfa("(0|1)*0", &alphabet).unwrap();
        for w in all_words(&alphabet, 6) {
            let expect = !w.is_empty() && w.ends_with('0');
            assert_eq!(dfa_accepts(&dfa, &w), expect, "word {w:?}");
            assert_eq!(regex_match("(0|1)*0", &alphabet, &w).unwrap(), expect);
        }
    }

    #[test]
    fn single_literal_has_three_minimal_states() {
        // q0 → accept → dead over a one-letter alphabet
        let dfa = regex_to_dfa("a", &['a']).unwrap();
        assert_eq!(dfa.num_states(), 3);
        assert!(dfa_accepts(&dfa, "a"));
        assert!(!dfa_accepts(&dfa, ""));
        assert!(!dfa_accepts(&dfa, "aa"));
    }

    #[test]
    fn empty_pattern_accepts_only_empty_word() {
        let dfa = regex_to_dfa("", &['a', 'b']).unwrap();
        assert_eq!(dfa.num_states(), 2);
        assert!(dfa_accepts(&dfa, ""));
        assert!(!dfa_accepts(&dfa, "a"));
        assert!(!dfa_accepts(&dfa, "ba"));
    }

    #[test]
    fn star_collapses_to_single_accepting_state() {
        let dfa = regex_to_dfa("(0|1)*", &['0', '1']).unwrap();
        assert_eq!(dfa.num_states(), 1);
        assert!(dfa_accepts(&dfa, ""));
        assert!(dfa_accepts(&dfa, "0110"));
    }

    #[test]
    fn malformed_patterns_rejected() {
        assert!(matches!(
            regex_to_dfa("(01", &['0', '1']),
            Err(RegexError::Malformed { .. })
        ));
        assert!(matches!(
            regex_to_dfa("*0", &['0', '1']),
            Err(RegexError::Malformed { .. })
        ));
        assert!(matches!(
            regex_to_dfa("0)1", &['0', '1']),
            Err(RegexError::Malformed { .. })
        ));
        assert_eq!(
            regex_to_dfa("a2", &['a']),
            Err(RegexError::OutsideAlphabet('2'))
        );
    }

    #[test]
    fn compiled_dfa_agrees_with_derivative_matcher() {
        // exhaustive up to length 8 over {0,1} for seeded random patterns
        let alphabet = ['0', '1'];
        let words = all_words(&alphabet, 8);
        let mut rng = substream(2024, "regex-fuzz");
        for _ in 0..10 {
            let pattern = random_pattern(&mut rng, &alphabet, 4);
            let dfa = regex_to_dfa(&pattern, &alphabet).unwrap();
            for w in &words {
                assert_eq!(
                    dfa_accepts(&dfa, w),
                    regex_match(&pattern, &alphabet, w).unwrap(),
                    "pattern {pattern:?}, word {w:?}"
                );
            }
        }
    }

    #[test]
    fn minimization_is_canonical_for_equivalent_patterns() {
        let alphabet = ['0', '1'];
        let a = regex_to_dfa("0|1", &alphabet).unwrap();
        let b = regex_to_dfa("1|0", &alphabet).unwrap();
        assert_eq!(a, b);
    }
}
