use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TIME_EPS: f64 = 1e-9;

/// One linear piece of an input-current protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start_ms: f64,
    pub end_ms: f64,
    /// Amplitude at `start_ms`.
    pub from: f64,
    /// Amplitude approached at `end_ms`.
    pub to: f64,
}

impl Segment {
    pub fn hold(start_ms: f64, end_ms: f64, amplitude: f64) -> Self {
        Self {
            start_ms,
            end_ms,
            from: amplitude,
            to: amplitude,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.from == self.to
    }

    fn value_at(&self, t: f64) -> f64 {
        if self.is_constant() {
            return self.from;
        }
        let frac = ((t - self.start_ms) / (self.end_ms - self.start_ms)).clamp(0.0, 1.0);
        self.from + frac * (self.to - self.from)
    }
}

/// Piecewise-linear input current `I(t)` covering `[0, duration]`.
///
/// Inside each segment the amplitude is interpolated linearly; at a segment
/// boundary the later segment wins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProtocol", into = "RawProtocol")]
pub struct StimulusProtocol {
    segments: Vec<Segment>,
}

#[derive(Serialize, Deserialize)]
struct RawProtocol {
    segments: Vec<Segment>,
}

impl TryFrom<RawProtocol> for StimulusProtocol {
    type Error = Error;

    fn try_from(raw: RawProtocol) -> Result<Self> {
        StimulusProtocol::new(raw.segments)
    }
}

impl From<StimulusProtocol> for RawProtocol {
    fn from(p: StimulusProtocol) -> Self {
        RawProtocol {
            segments: p.segments,
        }
    }
}

impl StimulusProtocol {
    /// Validates that segments are sorted, contiguous, non-empty and start
    /// at zero.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let Some(first) = segments.first() else {
            return Err(Error::invalid("stimulus protocol has no segments"));
        };
        if first.start_ms.abs() > TIME_EPS {
            return Err(Error::invalid(format!(
                "stimulus protocol must start at 0 ms, starts at {}",
                first.start_ms
            )));
        }
        let mut prev_end = 0.0;
        for (i, seg) in segments.iter().enumerate() {
            if ![seg.start_ms, seg.end_ms, seg.from, seg.to]
                .iter()
                .all(|x| x.is_finite())
            {
                return Err(Error::invalid(format!("segment {i} has non-finite fields")));
            }
            if seg.end_ms <= seg.start_ms {
                return Err(Error::invalid(format!(
                    "segment {i} has non-positive length ({} .. {})",
                    seg.start_ms, seg.end_ms
                )));
            }
            if (seg.start_ms - prev_end).abs() > TIME_EPS {
                return Err(Error::invalid(format!(
                    "segment {i} starts at {} but previous segment ends at {prev_end}",
                    seg.start_ms
                )));
            }
            prev_end = seg.end_ms;
        }
        Ok(Self { segments })
    }

    pub fn constant(amplitude: f64, duration_ms: f64) -> Result<Self> {
        Self::new(vec![Segment::hold(0.0, duration_ms, amplitude)])
    }

    /// Baseline `baseline` until `onset_ms`, then `amplitude` until `end_ms`.
    pub fn step(baseline: f64, amplitude: f64, onset_ms: f64, end_ms: f64) -> Result<Self> {
        ProtocolBuilder::new()
            .hold(baseline, onset_ms)
            .hold(amplitude, end_ms)
            .build()
    }

    pub fn builder() -> ProtocolBuilder {
        ProtocolBuilder::new()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn duration_ms(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.end_ms)
    }

    /// Current at time `t` (ms). Times past the end hold the final value.
    pub fn current_at(&self, t: f64) -> f64 {
        let idx = self.segments.partition_point(|s| s.start_ms <= t);
        let seg = &self.segments[idx.saturating_sub(1)];
        if t >= seg.end_ms {
            return seg.to;
        }
        seg.value_at(t)
    }

    /// The same protocol with the final amplitude held until `duration_ms`.
    pub fn extended_to(&self, duration_ms: f64) -> Self {
        let mut segments = self.segments.clone();
        let end = self.duration_ms();
        if duration_ms > end + TIME_EPS {
            let last = segments.last().copied().expect("protocol is non-empty");
            segments.push(Segment::hold(end, duration_ms, last.to));
        }
        Self { segments }
    }

    /// Amplitude at time zero, used as the reference level for epochs.
    pub fn baseline(&self) -> f64 {
        self.segments[0].from
    }

    /// Maximal runs of segments at a common constant amplitude. Ramps form
    /// their own epochs and are characterised by their mean amplitude.
    pub fn epochs(&self) -> Vec<Epoch> {
        let baseline = self.baseline();
        let mut out: Vec<Epoch> = Vec::new();
        for seg in &self.segments {
            let amplitude = 0.5 * (seg.from + seg.to);
            if let Some(last) = out.last_mut() {
                if seg.is_constant() && last.constant && last.amplitude == amplitude {
                    last.end_ms = seg.end_ms;
                    continue;
                }
            }
            let kind = if amplitude > baseline {
                EpochKind::Excitatory
            } else if amplitude < baseline {
                EpochKind::Inhibitory
            } else {
                EpochKind::Baseline
            };
            out.push(Epoch {
                start_ms: seg.start_ms,
                end_ms: seg.end_ms,
                amplitude,
                constant: seg.is_constant(),
                kind,
            });
        }
        out
    }
}

/// Sign of an epoch relative to the protocol baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpochKind {
    Baseline,
    Excitatory,
    Inhibitory,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Epoch {
    pub start_ms: f64,
    pub end_ms: f64,
    pub amplitude: f64,
    pub constant: bool,
    pub kind: EpochKind,
}

impl Epoch {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.start_ms && t < self.end_ms
    }
}

/// Incremental construction of a protocol from consecutive pieces.
#[derive(Debug, Clone, Default)]
pub struct ProtocolBuilder {
    segments: Vec<Segment>,
}

impl ProtocolBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn cursor(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.end_ms)
    }

    /// Hold `amplitude` until absolute time `until_ms`.
    pub fn hold(mut self, amplitude: f64, until_ms: f64) -> Self {
        let start = self.cursor();
        if until_ms > start {
            self.segments.push(Segment::hold(start, until_ms, amplitude));
        }
        self
    }

    /// Ramp linearly from `from` to `to`, ending at absolute time `until_ms`.
    pub fn ramp(mut self, from: f64, to: f64, until_ms: f64) -> Self {
        let start = self.cursor();
        if until_ms > start {
            self.segments.push(Segment {
                start_ms: start,
                end_ms: until_ms,
                from,
                to,
            });
        }
        self
    }

    pub fn build(self) -> Result<StimulusProtocol> {
        StimulusProtocol::new(self.segments)
    }
}
