//! Finite state machines executed by block-sparse attractor networks.
//!
//! The toolkit compiles a deterministic finite automaton (DFA) into the
//! recurrent weight matrix of an attractor network whose activity is
//! constrained to sparse block codes, then verifies the embedded machine
//! under several execution backends:
//!
//! - [`vsa`] — hypervector types (SBC / bMAP / pSBC), binding algebra,
//!   similarity, and collision-capacity bounds
//! - [`dfa`] — DFA construction, a line-oriented text format, a regex
//!   frontend, and the symbolic walk oracle
//! - [`weights`] — the weight compiler: attractor / bridge / transition
//!   outer-product terms, nonideality transforms, analytic drive statistics,
//!   and the attractor energy function
//! - [`rnn`] — discrete-time block-WTA recurrent engine and capacity sweeps
//! - [`snn`] — spiking LIF engine with second-order synapses, block-WTA via
//!   forced refractoriness, and firing-rate readout
//! - [`crossbar`] — software emulation of a 1T1R memristive crossbar driven
//!   in closed loop by the spiking engine
//!
//! All stochastic operations take explicit seeded generators; see [`rng`]
//! for the named-substream scheme that keeps experiments bit-reproducible.

pub mod crossbar;
pub mod dfa;
pub mod rng;
pub mod rnn;
pub mod schedule;
pub mod snn;
pub mod vsa;
pub mod weights;
