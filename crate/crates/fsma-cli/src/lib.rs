//! Experiment harness for the fsma toolkit: configuration schema,
//! experiment runners with CSV/JSON/SVG artifacts, and the acceptance
//! criteria used by both `fsma verify-golden` and the test suite.

pub mod config;
pub mod criteria;
pub mod experiments;
pub mod output;
pub mod plot;
