use serde::Serialize;

use crate::operators::Vector;

/// Agents are numbered `1..=n` around the ring.
pub type AgentId = usize;

/// Direction of a channel relative to the sender: downstream goes to
/// `i + 1 (mod n)`, upstream to `i - 1 (mod n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Downstream,
    Upstream,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    XValue(Vector),
    ZValue(Vector),
    /// `λ(B_{i-1}(x_i) - B_{i-1}(x_{i-1}))`, sent by agent `i` to `i + 1`.
    ReflectedTerm(Vector),
    ResidualPartial(f64),
    Halt,
}

impl Payload {
    pub fn tag(&self) -> &'static str {
        match self {
            Payload::XValue(_) => "x_value",
            Payload::ZValue(_) => "z_value",
            Payload::ReflectedTerm(_) => "reflected_term",
            Payload::ResidualPartial(_) => "residual_partial",
            Payload::Halt => "halt",
        }
    }

    /// Euclidean norm of a vector payload, the value of a residual partial,
    /// zero for `Halt`.
    pub fn norm(&self) -> f64 {
        match self {
            Payload::XValue(v) | Payload::ZValue(v) | Payload::ReflectedTerm(v) => v.norm(),
            Payload::ResidualPartial(r) => *r,
            Payload::Halt => 0.0,
        }
    }

    pub fn is_data(&self) -> bool {
        matches!(self, Payload::XValue(_) | Payload::ZValue(_) | Payload::ReflectedTerm(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Message {
    pub from: AgentId,
    pub to: AgentId,
    /// Index of the iterate the payload belongs to.
    pub round: u64,
    pub payload: Payload,
}

/// One line of the message log.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogRecord {
    pub round: u64,
    pub from: AgentId,
    pub to: AgentId,
    pub payload_tag: &'static str,
    pub norm: f64,
}

impl From<&Message> for LogRecord {
    fn from(m: &Message) -> Self {
        Self {
            round: m.round,
            from: m.from,
            to: m.to,
            payload_tag: m.payload.tag(),
            norm: m.payload.norm(),
        }
    }
}

/// Messages sent while executing one round (iteration plus any residual
/// sweep and halt that follow it).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RoundCounts {
    pub round: u64,
    /// `XValue` and `ZValue` messages.
    pub data: usize,
    pub reflected: usize,
    pub residual: usize,
    pub halt: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LogSummary {
    /// `ZValue` messages distributing `z⁰` before the first round.
    pub init: usize,
    pub rounds: Vec<RoundCounts>,
}

impl LogSummary {
    pub fn total(&self) -> usize {
        self.init
            + self
                .rounds
                .iter()
                .map(|r| r.data + r.reflected + r.residual + r.halt)
                .sum::<usize>()
    }
}
