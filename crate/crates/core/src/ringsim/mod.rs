//! Message-passing simulation of the decentralised protocol on a ring of `n`
//! agents.
//!
//! Per iteration `k`:
//! - agent 1 computes `x_1 = J_{λA_1}(z_1)` and sends it to agents 2 and `n`;
//! - agent `i ∈ 2..n-1` receives `x_{i-1}` and `z_i`, computes `x_i` and
//!   `z_{i-1}^{k+1}`, sends `x_i` downstream and `z_{i-1}^{k+1}` upstream, and
//!   in Lipschitz or mixed mode also sends `λ(B_{i-1}(x_i) - B_{i-1}(x_{i-1}))`
//!   downstream (a zero vector in mixed mode when `B_{i-1}` is cocoercive);
//! - agent `n` computes `x_n` and `z_{n-1}^{k+1}` and sends the latter upstream.
//!
//! Every agent runs the same floating-point operations as the sequential
//! sweep, so the two executions agree bit for bit.

mod agent;
mod message;
mod network;

pub use agent::AgentState;
pub use message::{AgentId, Direction, LogRecord, LogSummary, Message, Payload, RoundCounts};
pub use network::{neighbour, spawn_ring, RingNetwork, RingRun};
