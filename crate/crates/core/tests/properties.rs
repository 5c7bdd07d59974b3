//! Randomised invariants of the fixed-point operators and the ring protocol.

use proptest::prelude::*;

use ringsplit::operators::Vector;
use ringsplit::problems::make_certified;
use ringsplit::ringsim::{neighbour, Direction, RingNetwork};
use ringsplit::rng::{seeded, uniform_vector};
use ringsplit::splitting::{
    apply, averagedness_slack, build_fixed_point, extract_solution, iterate, quasi_nonexpansive_slack, two_operator_slack,
    Mode, ProblemInstance, Status, StepParams, StopRule,
};

fn blocks(seed: u64, count: usize, dim: usize, radius: f64) -> Vec<Vector> {
    let mut rng = seeded(seed);
    (0..count).map(|_| uniform_vector(&mut rng, dim, radius)).collect()
}

fn dist_sq(a: &[Vector], b: &[Vector]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u.sub(v).norm_sq()).sum()
}

fn mode_strategy() -> impl Strategy<Value = Mode> {
    prop_oneof![Just(Mode::Cocoercive), Just(Mode::Lipschitz), Just(Mode::Mixed)]
}

fn instance(mode: Mode, n: usize, seed: u64) -> (ProblemInstance, ringsplit::problems::Certified) {
    let n = n.max(mode.min_operators());
    let c = make_certified(mode, n, 2, seed).unwrap();
    (c.spec.build().unwrap(), c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fixed_point_roundtrip(mode in mode_strategy(), n in 2usize..7, seed in 0u64..10_000) {
        let (p, c) = instance(mode, n, seed);
        let params = StepParams::defaults(&p);
        let zb = build_fixed_point(&p, &params, &c.x_star, &c.v).unwrap();
        let step = apply(&p, &params, &zb).unwrap();
        prop_assert!(dist_sq(&step.z_next, &zb).sqrt() <= 1e-10);
        let ext = extract_solution(&p, &params, &zb).unwrap();
        prop_assert!(ext.x.dist(&c.x_star) <= 1e-10);
        prop_assert!(ext.max_deviation <= 1e-10);
    }

    #[test]
    fn averagedness_holds(n in 2usize..6, seed in 0u64..10_000, s in 0.01f64..0.99, t in 0.01f64..0.99) {
        let (p, _) = instance(Mode::Cocoercive, n, seed);
        let l = p.lipschitz();
        let lambda = s * 2.0 / l;
        let params = StepParams::new(&p, lambda, t * (1.0 - lambda * l / 2.0)).unwrap();
        let z = blocks(seed, p.n() - 1, 2, 4.0);
        let zb = blocks(seed + 1, p.n() - 1, 2, 4.0);
        let slack = averagedness_slack(&p, &params, &z, &zb).unwrap();
        prop_assert!(slack >= -1e-9 * dist_sq(&z, &zb));
    }

    #[test]
    fn two_operator_inequality_holds(seed in 0u64..10_000, s in 0.01f64..0.99, t in 0.01f64..0.99) {
        let (p, _) = instance(Mode::Cocoercive, 2, seed);
        let l = p.lipschitz();
        let lambda = s * 4.0 / l;
        let params = StepParams::new(&p, lambda, t * (2.0 - lambda * l / 2.0)).unwrap();
        let z = blocks(seed, 1, 2, 4.0);
        let zb = blocks(seed + 1, 1, 2, 4.0);
        prop_assert!(two_operator_slack(&p, &params, &z, &zb).unwrap() >= -1e-9 * dist_sq(&z, &zb));
    }

    #[test]
    fn strong_quasi_nonexpansiveness_holds(n in 3usize..7, seed in 0u64..10_000, s in 0.01f64..0.99, t in 0.01f64..0.99) {
        let (p, c) = instance(Mode::Lipschitz, n, seed);
        let l = p.lipschitz();
        let lambda = s / (2.0 * l);
        let params = StepParams::new(&p, lambda, t * (1.0 - 2.0 * lambda * l)).unwrap();
        let zb = build_fixed_point(&p, &params, &c.x_star, &c.v).unwrap();
        let z = blocks(seed, p.n() - 1, 2, 4.0);
        prop_assert!(quasi_nonexpansive_slack(&p, &params, &z, &zb).unwrap() >= -1e-9 * dist_sq(&z, &zb));
    }

    #[test]
    fn residual_identity(mode in mode_strategy(), n in 2usize..7, seed in 0u64..10_000) {
        let (p, _) = instance(mode, n, seed);
        let params = StepParams::defaults(&p);
        let z = blocks(seed, p.n() - 1, 2, 3.0);
        let step = apply(&p, &params, &z).unwrap();
        let lhs = step.residual_sq(&z);
        let x = step.x();
        let rhs: f64 = params.gamma * params.gamma * x.windows(2).map(|w| w[1].sub(&w[0]).norm_sq()).sum::<f64>();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
    }

    #[test]
    fn consensus_gap_vanishes(mode in mode_strategy(), n in 2usize..6, seed in 0u64..10_000) {
        let (p, _) = instance(mode, n, seed);
        let params = StepParams::defaults(&p);
        let stop = StopRule { tol_residual_sq: 1e-16, max_iters: 200_000, check_period: 1 };
        let run = iterate(&p, &params, blocks(seed, p.n() - 1, 2, 2.0), stop, false).unwrap();
        prop_assert_eq!(run.status, Status::Converged);
        let last = run.trace.last().unwrap();
        prop_assert!(last.consensus_gap <= stop.tol_residual_sq.sqrt() / params.gamma * (1.0 + 1e-9));
        prop_assert!(run.trace.records.windows(2).all(|w| w[0].k < w[1].k));
    }

    #[test]
    fn ring_matches_sequential(mode in mode_strategy(), n in 2usize..7, seed in 0u64..10_000, period in 1u64..4) {
        let (p, _) = instance(mode, n, seed);
        let params = StepParams::defaults(&p);
        let z0 = blocks(seed, p.n() - 1, 2, 3.0);
        let stop = StopRule { tol_residual_sq: 1e-14, max_iters: 60, check_period: period };
        let seq = iterate(&p, &params, z0.clone(), stop, true).unwrap();
        let mut net = RingNetwork::spawn(&p, &params, &z0).unwrap();
        let ring = net.run_until_residual(stop, true).unwrap();
        prop_assert_eq!(&ring.z, &seq.state.z);
        prop_assert_eq!(ring.status, seq.status);
        prop_assert_eq!(ring.trace.without_timing(), seq.trace.without_timing());
    }

    #[test]
    fn ring_log_is_local_and_deterministic(mode in mode_strategy(), n in 2usize..7, seed in 0u64..10_000) {
        let (p, _) = instance(mode, n, seed);
        let params = StepParams::defaults(&p);
        let z0 = blocks(seed, p.n() - 1, 2, 3.0);
        let stop = StopRule { tol_residual_sq: 0.0, max_iters: 5, check_period: 2 };
        let mut logs = Vec::new();
        for _ in 0..2 {
            let mut net = RingNetwork::spawn(&p, &params, &z0).unwrap();
            net.set_logging(true);
            net.run_until_residual(stop, false).unwrap();
            let mut buf = Vec::new();
            net.write_log_jsonl(&mut buf).unwrap();
            for rec in net.log() {
                let adjacent = rec.to == neighbour(p.n(), rec.from, Direction::Downstream)
                    || rec.to == neighbour(p.n(), rec.from, Direction::Upstream);
                prop_assert!(adjacent, "{:?}", rec);
            }
            logs.push(buf);
        }
        prop_assert_eq!(&logs[0], &logs[1]);
    }
}
