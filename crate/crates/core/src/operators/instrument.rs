//! Call-counting wrappers used to audit per-iteration operator cost.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use super::{Forward, Regularity, Resolvent, Vector};
use crate::error::Result;

#[derive(Debug, Default)]
pub struct CallCounter(AtomicUsize);

impl CallCounter {
    pub fn get(&self) -> usize {
        self.0.load(Ordering::SeqCst)
    }

    pub fn reset(&self) {
        self.0.store(0, Ordering::SeqCst);
    }

    fn bump(&self) {
        self.0.fetch_add(1, Ordering::SeqCst);
    }
}

#[derive(Debug)]
pub struct CountingResolvent {
    inner: Arc<dyn Resolvent>,
    calls: Arc<CallCounter>,
}

impl CountingResolvent {
    pub fn wrap(inner: Arc<dyn Resolvent>) -> (Arc<dyn Resolvent>, Arc<CallCounter>) {
        let calls = Arc::new(CallCounter::default());
        let op = Arc::new(Self {
            inner,
            calls: calls.clone(),
        });
        (op, calls)
    }
}

impl Resolvent for CountingResolvent {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn resolve(&self, lambda: f64, u: &Vector) -> Result<Vector> {
        self.calls.bump();
        self.inner.resolve(lambda, u)
    }
}

#[derive(Debug)]
pub struct CountingForward {
    inner: Arc<dyn Forward>,
    calls: Arc<CallCounter>,
}

impl CountingForward {
    pub fn wrap(inner: Arc<dyn Forward>) -> (Arc<dyn Forward>, Arc<CallCounter>) {
        let calls = Arc::new(CallCounter::default());
        let op = Arc::new(Self {
            inner,
            calls: calls.clone(),
        });
        (op, calls)
    }
}

impl Forward for CountingForward {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn regularity(&self) -> Regularity {
        self.inner.regularity()
    }

    fn lipschitz(&self) -> f64 {
        self.inner.lipschitz()
    }

    fn eval(&self, x: &Vector) -> Result<Vector> {
        self.calls.bump();
        self.inner.eval(x)
    }
}
