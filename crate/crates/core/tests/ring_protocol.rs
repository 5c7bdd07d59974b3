use ringsplit::operators::Vector;
use ringsplit::problems::{make_certified, make_quadratic_consensus};
use ringsplit::ringsim::{Direction, LogRecord, Message, Payload, RingNetwork};
use ringsplit::splitting::{apply_t, zero_start, Mode, ProblemInstance, Status, StepParams, StopRule};
use ringsplit::Error;

fn certified(mode: Mode, n: usize) -> ProblemInstance {
    make_certified(mode, n, 2, 5).unwrap().spec.build().unwrap()
}

fn edges(log: &[LogRecord], tag: &str) -> Vec<(usize, usize)> {
    log.iter().filter(|r| r.payload_tag == tag).map(|r| (r.from, r.to)).collect()
}

#[test]
fn agents_hold_only_their_operators() {
    let p = certified(Mode::Cocoercive, 4);
    let net = RingNetwork::spawn(&p, &StepParams::defaults(&p), &zero_start(&p)).unwrap();
    assert!(net.agent(1).forward().is_none());
    assert!(net.agent(1).z().is_none());
    for i in 2..=4 {
        assert!(std::sync::Arc::ptr_eq(net.agent(i).forward().unwrap(), &p.forwards()[i - 2]));
        assert!(std::sync::Arc::ptr_eq(net.agent(i).resolvent(), &p.resolvents()[i - 1]));
        assert!(net.agent(i).z().is_some());
    }
    let q = certified(Mode::Lipschitz, 4);
    let net = RingNetwork::spawn(&q, &StepParams::defaults(&q), &zero_start(&q)).unwrap();
    assert!(net.agent(4).forward().is_none());
}

#[test]
fn first_round_equals_operator() {
    let spec = make_quadratic_consensus(4, 5, 7).unwrap();
    let p = spec.build().unwrap();
    let params = StepParams::defaults(&p);
    let z0: Vec<Vector> = (0..3).map(|i| Vector::from_fn(5, |j| (i * 5 + j) as f64 * 0.1 - 0.7)).collect();
    let mut net = RingNetwork::spawn(&p, &params, &z0).unwrap();
    net.step_round().unwrap();
    assert_eq!(net.z(), apply_t(&p, &params, &z0).unwrap().z_next);
}

#[test]
fn reflected_terms_only_on_inner_edges() {
    let p = certified(Mode::Lipschitz, 4);
    let mut net = RingNetwork::spawn(&p, &StepParams::defaults(&p), &zero_start(&p)).unwrap();
    net.set_logging(true);
    net.step_round().unwrap();
    assert_eq!(edges(net.log(), "reflected_term"), vec![(2, 3), (3, 4)]);
    assert_eq!(edges(net.log(), "x_value"), vec![(1, 2), (1, 4), (2, 3), (3, 4)]);
    assert_eq!(edges(net.log(), "z_value"), vec![(2, 1), (3, 2), (4, 3)]);
}

#[test]
fn two_agents_send_one_x_message() {
    let p = certified(Mode::Cocoercive, 2);
    let mut net = RingNetwork::spawn(&p, &StepParams::defaults(&p), &zero_start(&p)).unwrap();
    net.set_logging(true);
    net.step_round().unwrap();
    assert_eq!(edges(net.log(), "x_value"), vec![(1, 2)]);
    assert_eq!(edges(net.log(), "z_value"), vec![(2, 1)]);
}

#[test]
fn residual_sweep_order_and_count() {
    let p = certified(Mode::Cocoercive, 5);
    let mut net = RingNetwork::spawn(&p, &StepParams::defaults(&p), &zero_start(&p)).unwrap();
    net.step_round().unwrap();
    net.set_logging(true);
    let total = net.aggregate_residual().unwrap();
    assert_eq!(
        edges(net.log(), "residual_partial"),
        vec![(2, 3), (3, 4), (4, 5), (5, 1), (1, 2), (2, 3), (3, 4), (4, 5)]
    );
    // partial sums are nondecreasing along the accumulate pass, then constant
    let values: Vec<f64> = net.log().iter().map(|r| r.norm).collect();
    assert!(values[..3].windows(2).all(|w| w[0] <= w[1]));
    assert!(values[3..].iter().all(|&v| v == total));
    assert!(net.agents().iter().all(|a| a.known_residual_sq() == Some(total)));
}

#[test]
fn converged_state_has_zero_residual_and_halts_in_one_lap() {
    let c = make_certified(Mode::Cocoercive, 4, 2, 9).unwrap();
    let p = c.spec.build().unwrap();
    let params = StepParams::defaults(&p);
    let zb = ringsplit::splitting::build_fixed_point(&p, &params, &c.x_star, &c.v).unwrap();
    let mut net = RingNetwork::spawn(&p, &params, &zb).unwrap();
    net.set_logging(true);
    let stop = StopRule {
        tol_residual_sq: 1e-24,
        ..StopRule::default()
    };
    let run = net.run_until_residual(stop, false).unwrap();
    assert_eq!(run.status, Status::Converged);
    assert!(run.trace.records[0].residual_sq <= 1e-24);
    assert_eq!(edges(net.log(), "halt"), vec![(4, 1), (1, 2), (2, 3)]);
    assert!(net.agents().iter().all(|a| a.halted()));
    assert!(matches!(net.step_round(), Err(Error::Protocol { .. })));
}

#[test]
fn zero_operators_two_agents_identity() {
    let p = ProblemInstance::from_ops(
        Mode::Cocoercive,
        vec![ringsplit::ResolventOp::zero(3); 2],
        vec![ringsplit::ForwardOp::zero(3)],
    )
    .unwrap();
    let z0 = vec![Vector::new(vec![1.0, 2.0, 3.0]).unwrap()];
    let mut net = RingNetwork::spawn(&p, &StepParams::defaults(&p), &z0).unwrap();
    for _ in 0..3 {
        net.step_round().unwrap();
        assert_eq!(net.z(), z0);
    }
}

#[test]
fn duplicate_message_is_reported() {
    let p = certified(Mode::Cocoercive, 3);
    let mut net = RingNetwork::spawn(&p, &StepParams::defaults(&p), &zero_start(&p)).unwrap();
    net.inject(
        Direction::Downstream,
        Message {
            from: 1,
            to: 2,
            round: 0,
            payload: Payload::XValue(Vector::zeros(2)),
        },
    );
    match net.step_round() {
        Err(Error::Protocol { from, to, round, detail }) => {
            assert_eq!((from, to, round), (1, 2, 0));
            assert!(detail.contains("unconsumed x_value"), "{detail}");
        }
        other => panic!("expected protocol error, got {other:?}"),
    }
}

#[test]
fn wrong_round_is_reported() {
    let p = certified(Mode::Lipschitz, 3);
    let mut net = RingNetwork::spawn(&p, &StepParams::defaults(&p), &zero_start(&p)).unwrap();
    let stale = net.discard(3, Direction::Upstream).unwrap();
    net.inject(Direction::Upstream, Message { round: 4, ..stale });
    match net.step_round() {
        Err(Error::Protocol { from, to, round, detail }) => {
            assert_eq!((from, to, round), (3, 2, 0));
            assert!(detail.contains("round 4"), "{detail}");
        }
        other => panic!("expected protocol error, got {other:?}"),
    }
}

#[test]
fn summary_counts_rounds() {
    let p = certified(Mode::Mixed, 5);
    let mut net = RingNetwork::spawn(&p, &StepParams::defaults(&p), &zero_start(&p)).unwrap();
    let stop = StopRule {
        tol_residual_sq: 0.0,
        max_iters: 6,
        check_period: 3,
    };
    let run = net.run_until_residual(stop, false).unwrap();
    assert_eq!(run.status, Status::MaxIters);
    assert_eq!(run.summary.init, 4);
    assert_eq!(run.summary.rounds.len(), 6);
    for r in &run.summary.rounds {
        assert_eq!((r.data, r.reflected, r.halt), (9, 3, 0));
        assert_eq!(r.residual, if (r.round + 1) % 3 == 0 { 8 } else { 0 });
    }
    assert_eq!(run.summary.total(), 4 + 6 * 12 + 2 * 8);
}

#[test]
fn log_lines_are_json_records() {
    let p = certified(Mode::Cocoercive, 3);
    let mut net = RingNetwork::spawn(&p, &StepParams::defaults(&p), &zero_start(&p)).unwrap();
    net.set_logging(true);
    net.step_round().unwrap();
    let mut buf = Vec::new();
    net.write_log_jsonl(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    for key in ["round", "from", "to", "payload_tag", "norm"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
    assert_eq!(text.lines().count(), 5);
}
