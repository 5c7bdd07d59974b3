use std::collections::{BTreeMap, VecDeque};
use std::io::Write;
use std::time::Instant;

use super::agent::AgentState;
use super::message::{AgentId, Direction, LogRecord, LogSummary, Message, Payload, RoundCounts};
use crate::error::{Error, Result};
use crate::operators::Vector;
use crate::splitting::{consensus_gap, local, Mode, ProblemInstance, Status, StepParams, StopRule, Trace, TraceRecord};

/// Destination of a message sent by `from` in direction `dir` on a ring of `n`.
pub fn neighbour(n: usize, from: AgentId, dir: Direction) -> AgentId {
    match dir {
        Direction::Downstream => from % n + 1,
        Direction::Upstream => (from + n - 2) % n + 1,
    }
}

#[derive(Debug)]
struct Channels {
    n: usize,
    queues: BTreeMap<(AgentId, Direction), VecDeque<Message>>,
    log: Option<Vec<LogRecord>>,
    summary: LogSummary,
}

impl Channels {
    fn new(n: usize) -> Self {
        let mut queues = BTreeMap::new();
        for id in 1..=n {
            for dir in [Direction::Downstream, Direction::Upstream] {
                queues.insert((id, dir), VecDeque::new());
            }
        }
        Self {
            n,
            queues,
            log: None,
            summary: LogSummary::default(),
        }
    }

    fn push(&mut self, from: AgentId, dir: Direction, message: Message) {
        if let Some(log) = &mut self.log {
            log.push(LogRecord::from(&message));
        }
        self.queues.get_mut(&(from, dir)).expect("channel exists").push_back(message);
    }

    fn send(&mut self, from: AgentId, dir: Direction, round: u64, payload: Payload) {
        match self.summary.rounds.last_mut() {
            None => self.summary.init += 1,
            Some(c) => match payload {
                Payload::XValue(_) | Payload::ZValue(_) => c.data += 1,
                Payload::ReflectedTerm(_) => c.reflected += 1,
                Payload::ResidualPartial(_) => c.residual += 1,
                Payload::Halt => c.halt += 1,
            },
        }
        let to = neighbour(self.n, from, dir);
        self.push(from, dir, Message { from, to, round, payload });
    }

    fn recv(&mut self, from: AgentId, dir: Direction, round: u64, expected: &'static str) -> Result<Payload> {
        let to = neighbour(self.n, from, dir);
        let queue = self.queues.get_mut(&(from, dir)).expect("channel exists");
        let Some(msg) = queue.pop_front() else {
            return Err(Error::Protocol {
                from,
                to,
                round,
                detail: format!("missing {expected}"),
            });
        };
        if msg.round != round || msg.payload.tag() != expected || msg.to != to || msg.from != from {
            return Err(Error::Protocol {
                from,
                to,
                round,
                detail: format!(
                    "expected {expected} for round {round}, found {} for round {}",
                    msg.payload.tag(),
                    msg.round
                ),
            });
        }
        Ok(msg.payload)
    }

    /// Everything still queued after round `round` must be a `ZValue` for
    /// round `round + 1`.
    fn check_drained(&self, round: u64) -> Result<()> {
        for ((from, dir), queue) in &self.queues {
            let mut z_seen = 0;
            for msg in queue {
                let legit = matches!(msg.payload, Payload::ZValue(_)) && msg.round == round + 1 && *dir == Direction::Upstream;
                if legit {
                    z_seen += 1;
                }
                if !legit || z_seen > 1 {
                    return Err(Error::Protocol {
                        from: *from,
                        to: neighbour(self.n, *from, *dir),
                        round,
                        detail: format!("unconsumed {} for round {}", msg.payload.tag(), msg.round),
                    });
                }
            }
        }
        Ok(())
    }
}

fn expect_vector(p: Payload) -> Vector {
    match p {
        Payload::XValue(v) | Payload::ZValue(v) | Payload::ReflectedTerm(v) => v,
        _ => unreachable!("payload tag checked on receipt"),
    }
}

fn expect_scalar(p: Payload) -> f64 {
    match p {
        Payload::ResidualPartial(r) => r,
        _ => unreachable!("payload tag checked on receipt"),
    }
}

/// Outcome of [`RingNetwork::run_until_residual`].
#[derive(Clone, Debug, PartialEq)]
pub struct RingRun {
    pub z: Vec<Vector>,
    pub x: Vec<Vector>,
    pub trace: Trace,
    pub status: Status,
    pub summary: LogSummary,
}

/// Round-synchronous simulation of the ring protocol. Each agent only holds
/// its own operators and variables and only exchanges messages with its two
/// neighbours, over one FIFO channel per (sender, direction).
#[derive(Debug)]
pub struct RingNetwork {
    agents: Vec<AgentState>,
    channels: Channels,
    lambda: f64,
    gamma: f64,
    mode: Mode,
    dim: usize,
    /// Rounds executed so far; also the index of the next iterate.
    round: u64,
}

pub fn spawn_ring(problem: &ProblemInstance, params: &StepParams, z0: &[Vector]) -> Result<RingNetwork> {
    RingNetwork::spawn(problem, params, z0)
}

impl RingNetwork {
    /// Places each operator with its owner and distributes `z⁰`: agent `i`
    /// sends `z_{i-1}⁰` to agent `i - 1`.
    pub fn spawn(problem: &ProblemInstance, params: &StepParams, z0: &[Vector]) -> Result<Self> {
        let checked = StepParams::new(problem, params.lambda, params.gamma)?;
        if checked.mode != params.mode {
            return Err(Error::InvalidProblem("parameter mode does not match the problem".into()));
        }
        let n = problem.n();
        if z0.len() != n - 1 {
            return Err(Error::InvalidProblem(format!(
                "governing variable has {} blocks, expected {}",
                z0.len(),
                n - 1
            )));
        }
        for block in z0 {
            block.ensure_dim(problem.dim())?;
            block.ensure_finite("governing variable")?;
        }
        let agents = (1..=n)
            .map(|id| AgentState {
                id,
                resolvent: problem.resolvents()[id - 1].clone(),
                forward: problem.forward(id - 1).cloned(),
                uses_reflection: problem.reflects_into(id),
                sends_reflection: problem.sends_reflection(id),
                z: (id >= 2).then(|| z0[id - 2].clone()),
                x: None,
                forward_value: None,
                local_residual_sq: 0.0,
                known_residual_sq: None,
                rounds_done: 0,
                halted: false,
            })
            .collect::<Vec<_>>();
        let mut net = Self {
            agents,
            channels: Channels::new(n),
            lambda: params.lambda,
            gamma: params.gamma,
            mode: problem.mode(),
            dim: problem.dim(),
            round: 0,
        };
        for id in 2..=n {
            let z = net.agents[id - 1].z.clone().expect("agent owns a block");
            net.channels.send(id, Direction::Upstream, 0, Payload::ZValue(z));
        }
        Ok(net)
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn agents(&self) -> &[AgentState] {
        &self.agents
    }

    /// Agent `id` (1-based).
    pub fn agent(&self, id: AgentId) -> &AgentState {
        &self.agents[id - 1]
    }

    pub fn channel_count(&self) -> usize {
        self.channels.queues.len()
    }

    pub fn rounds_done(&self) -> u64 {
        self.round
    }

    pub fn set_logging(&mut self, on: bool) {
        match (on, self.channels.log.is_some()) {
            (true, false) => self.channels.log = Some(Vec::new()),
            (false, true) => self.channels.log = None,
            _ => {}
        }
    }

    /// Logged messages, empty unless logging is enabled.
    pub fn log(&self) -> &[LogRecord] {
        self.channels.log.as_deref().unwrap_or(&[])
    }

    pub fn write_log_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for rec in self.log() {
            serde_json::to_writer(&mut out, rec)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn summary(&self) -> &LogSummary {
        &self.channels.summary
    }

    /// Current governing variable, gathered from the owning agents.
    pub fn z(&self) -> Vec<Vector> {
        self.agents[1..].iter().map(|a| a.z.clone().expect("agent owns a block")).collect()
    }

    /// Shadow point from the latest round.
    pub fn x(&self) -> Option<Vec<Vector>> {
        self.agents.iter().map(|a| a.x.clone()).collect()
    }

    /// `B_i(x_i)` from the latest round, gathered from the owners.
    pub fn forward_values(&self) -> Vec<Vector> {
        self.agents.iter().filter_map(|a| a.forward_value.clone()).collect()
    }

    /// Test hook: enqueue an arbitrary message on the sender's channel.
    pub fn inject(&mut self, dir: Direction, message: Message) {
        let from = message.from;
        self.channels.push(from, dir, message);
    }

    /// Test hook: drop the oldest message on a channel.
    pub fn discard(&mut self, from: AgentId, dir: Direction) -> Option<Message> {
        self.channels.queues.get_mut(&(from, dir))?.pop_front()
    }

    /// Executes iteration `k = rounds_done()`: computes `x^k` and `z^{k+1}`.
    pub fn step_round(&mut self) -> Result<()> {
        let n = self.n();
        let r = self.round;
        if let Some(a) = self.agents.iter().find(|a| a.halted) {
            return Err(Error::Protocol {
                from: a.id,
                to: a.id,
                round: r,
                detail: "agent has halted".into(),
            });
        }
        self.channels.summary.rounds.push(RoundCounts {
            round: r,
            ..Default::default()
        });
        let (lambda, gamma) = (self.lambda, self.gamma);
        let ch = &mut self.channels;

        // Agent 1.
        let z1 = expect_vector(ch.recv(2, Direction::Upstream, r, "z_value")?);
        let x1 = self.agents[0].resolvent.resolve(lambda, &z1)?;
        ch.send(1, Direction::Downstream, r, Payload::XValue(x1.clone()));
        if n > 2 {
            ch.send(1, Direction::Upstream, r, Payload::XValue(x1.clone()));
        }
        self.agents[0].x = Some(x1);
        self.agents[0].rounds_done = r + 1;

        // Agents 2..n in dataflow order.
        for id in 2..=n {
            let x_prev = expect_vector(ch.recv(id - 1, Direction::Downstream, r, "x_value")?);
            let incoming_reflection = if self.agents[id - 2].sends_reflection {
                Some(expect_vector(ch.recv(id - 1, Direction::Downstream, r, "reflected_term")?))
            } else {
                None
            };
            let first = if id < n {
                expect_vector(ch.recv(id + 1, Direction::Upstream, r, "z_value")?)
            } else if n == 2 {
                x_prev.clone()
            } else {
                expect_vector(ch.recv(1, Direction::Upstream, r, "x_value")?)
            };
            let agent = &mut self.agents[id - 1];
            let z_own = agent.z.take().expect("agent owns a block");
            let forward_value = agent.forward.as_ref().map(|b| b.eval(&x_prev)).transpose()?;
            let reflection = if agent.uses_reflection { incoming_reflection.as_ref() } else { None };
            let arg = local::argument(&first, &x_prev, &z_own, forward_value.as_ref(), reflection, lambda);
            let x = agent.resolvent.resolve(lambda, &arg)?;
            let z_next = local::z_step(&z_own, &x, &x_prev, gamma);
            z_next.ensure_finite("governing update")?;
            agent.local_residual_sq = z_next.sub(&z_own).norm_sq();

            if id < n {
                ch.send(id, Direction::Downstream, r, Payload::XValue(x.clone()));
            }
            if agent.sends_reflection {
                let term = match (&agent.forward, &forward_value) {
                    (Some(b), Some(at_prev)) if self.mode == Mode::Lipschitz || b.regularity() == crate::operators::Regularity::LipschitzMonotone => {
                        local::reflected(&b.eval(&x)?, at_prev, lambda)
                    }
                    _ => Vector::zeros(self.dim),
                };
                ch.send(id, Direction::Downstream, r, Payload::ReflectedTerm(term));
            }
            ch.send(id, Direction::Upstream, r + 1, Payload::ZValue(z_next.clone()));
            agent.z = Some(z_next);
            agent.x = Some(x);
            agent.forward_value = forward_value;
            agent.rounds_done = r + 1;
        }
        self.round = r + 1;
        self.channels.check_drained(r)
    }

    /// Distributed `‖z^{k+1} - z^k‖²` for the latest round: partial sums travel
    /// from agent 2 to agent `n`, then agent `n` broadcasts the total around
    /// the full ring back to itself. Uses `2(n-1)` messages.
    pub fn aggregate_residual(&mut self) -> Result<f64> {
        let n = self.n();
        let r = self.round.checked_sub(1).ok_or_else(|| Error::Protocol {
            from: 2,
            to: neighbour(n, 2, Direction::Downstream),
            round: 0,
            detail: "no round completed".into(),
        })?;
        let ch = &mut self.channels;
        let mut acc = 0.0;
        for id in 2..=n {
            if id > 2 {
                acc = expect_scalar(ch.recv(id - 1, Direction::Downstream, r, "residual_partial")?);
            }
            acc += self.agents[id - 1].local_residual_sq;
            if id < n {
                ch.send(id, Direction::Downstream, r, Payload::ResidualPartial(acc));
            }
        }
        self.agents[n - 1].known_residual_sq = Some(acc);
        ch.send(n, Direction::Downstream, r, Payload::ResidualPartial(acc));
        for id in 1..=n {
            let total = expect_scalar(ch.recv(neighbour(n, id, Direction::Upstream), Direction::Downstream, r, "residual_partial")?);
            self.agents[id - 1].known_residual_sq = Some(total);
            if id < n {
                ch.send(id, Direction::Downstream, r, Payload::ResidualPartial(total));
            }
        }
        Ok(acc)
    }

    /// Agent `n` stops the ring: `Halt` travels `n → 1 → … → n-1`.
    pub fn broadcast_halt(&mut self) -> Result<()> {
        let n = self.n();
        let r = self.round.saturating_sub(1);
        let ch = &mut self.channels;
        self.agents[n - 1].halted = true;
        ch.send(n, Direction::Downstream, r, Payload::Halt);
        for id in 1..n {
            ch.recv(neighbour(n, id, Direction::Upstream), Direction::Downstream, r, "halt")?;
            self.agents[id - 1].halted = true;
            if id + 1 < n {
                ch.send(id, Direction::Downstream, r, Payload::Halt);
            }
        }
        Ok(())
    }

    /// Runs rounds until the distributed residual test passes or the budget
    /// is exhausted. The trace matches the sequential driver's record for
    /// record (apart from wall-clock times).
    pub fn run_until_residual(&mut self, stop: StopRule, record_duals: bool) -> Result<RingRun> {
        stop.validate()?;
        let start = Instant::now();
        let mut trace = Trace::default();
        loop {
            self.step_round()?;
            let k = self.round;
            let mut status = None;
            if stop.is_check(k) {
                let residual_sq = self.aggregate_residual()?;
                let x = self.x().expect("round completed");
                trace.records.push(TraceRecord {
                    k,
                    residual_sq,
                    consensus_gap: consensus_gap(&x),
                    dual_values: record_duals.then(|| self.forward_values()),
                    wall_time: start.elapsed().as_secs_f64(),
                });
                if residual_sq <= stop.tol_residual_sq {
                    self.broadcast_halt()?;
                    status = Some(Status::Converged);
                }
            }
            if status.is_none() && k >= stop.max_iters {
                status = Some(Status::MaxIters);
            }
            if let Some(status) = status {
                return Ok(RingRun {
                    z: self.z(),
                    x: self.x().expect("round completed"),
                    trace,
                    status,
                    summary: self.channels.summary.clone(),
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{ForwardOp, ResolventOp};

    fn zero_problem(n: usize) -> ProblemInstance {
        ProblemInstance::from_ops(Mode::Cocoercive, vec![ResolventOp::zero(2); n], vec![ForwardOp::zero(2); n - 1]).unwrap()
    }

    #[test]
    fn neighbours_wrap() {
        assert_eq!(neighbour(4, 4, Direction::Downstream), 1);
        assert_eq!(neighbour(4, 1, Direction::Upstream), 4);
        assert_eq!(neighbour(2, 1, Direction::Downstream), 2);
        assert_eq!(neighbour(2, 1, Direction::Upstream), 2);
        assert_eq!(neighbour(2, 2, Direction::Downstream), 1);
    }

    #[test]
    fn channel_counts() {
        for (n, expected) in [(2, 4), (3, 6), (5, 10)] {
            let p = zero_problem(n);
            let net = RingNetwork::spawn(&p, &StepParams::defaults(&p), &vec![Vector::zeros(2); n - 1]).unwrap();
            assert_eq!(net.channel_count(), expected);
            assert_eq!(net.summary().init, n - 1);
        }
    }

    #[test]
    fn two_agent_round_is_identity_for_zero_operators() {
        let p = zero_problem(2);
        let z0 = vec![Vector::new(vec![3.0, -1.0]).unwrap()];
        let mut net = RingNetwork::spawn(&p, &StepParams::defaults(&p), &z0).unwrap();
        net.step_round().unwrap();
        assert_eq!(net.z(), z0);
        assert_eq!(net.summary().rounds[0].data, 2);
    }

    #[test]
    fn missing_message_names_edge_and_round() {
        let p = zero_problem(3);
        let mut net = RingNetwork::spawn(&p, &StepParams::defaults(&p), &vec![Vector::zeros(2); 2]).unwrap();
        net.discard(2, Direction::Upstream).unwrap();
        match net.step_round() {
            Err(Error::Protocol { from, to, round, detail }) => {
                assert_eq!((from, to, round), (2, 1, 0));
                assert!(detail.contains("missing z_value"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
