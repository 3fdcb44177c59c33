//! Input schedules: timed sequences of symbol masks with gaps in between.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// One schedule segment: a symbol mask held for `duration`, or a gap with
/// no input (`symbol = None`). Durations are time steps for the discrete
/// engine and milliseconds for the spiking engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub symbol: Option<usize>,
    pub duration: f64,
}

/// Piecewise-constant input schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSchedule {
    segments: Vec<Segment>,
}

impl InputSchedule {
    pub fn new(segments: Vec<Segment>) -> Self {
        assert!(
            segments.iter().all(|s| s.duration >= 1.0),
            "segment durations must be at least 1"
        );
        Self { segments }
    }

    /// Leading settle gap, then each word symbol held for `on` followed by
    /// a gap of `off`.
    pub fn regular(word: &[usize], settle: f64, on: f64, off: f64) -> Self {
        let mut segments = vec![Segment {
            symbol: None,
            duration: settle,
        }];
        for &s in word {
            segments.push(Segment {
                symbol: Some(s),
                duration: on,
            });
            segments.push(Segment {
                symbol: None,
                duration: off,
            });
        }
        Self::new(segments)
    }

    /// Like [`Self::regular`] but with every on/off duration drawn
    /// uniformly from `[lo, hi]`.
    pub fn irregular(
        word: &[usize],
        settle: f64,
        lo: f64,
        hi: f64,
        rng: &mut impl Rng,
    ) -> Self {
        let mut segments = vec![Segment {
            symbol: None,
            duration: settle,
        }];
        for &s in word {
            segments.push(Segment {
                symbol: Some(s),
                duration: rng.gen_range(lo..=hi),
            });
            segments.push(Segment {
                symbol: None,
                duration: rng.gen_range(lo..=hi),
            });
        }
        Self::new(segments)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Symbol in effect at time `t` (None in gaps or past the end).
    pub fn symbol_at(&self, t: f64) -> Option<usize> {
        let mut acc = 0.0;
        for seg in &self.segments {
            acc += seg.duration;
            if t < acc {
                return seg.symbol;
            }
        }
        None
    }
}
