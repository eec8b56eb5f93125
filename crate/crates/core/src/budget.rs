//! Search budgets for anytime solvers.

/// Polled by anytime solvers before each unit of work; once it reports
/// exhaustion the solver returns its incumbent.
pub trait Budget {
    fn exhausted(&mut self) -> bool;
}

/// Never runs out.
#[derive(Debug, Clone, Copy, Default)]
pub struct Unlimited;

impl Budget for Unlimited {
    fn exhausted(&mut self) -> bool {
        false
    }
}

/// Allows a fixed number of polls. `NodeLimit(0)` is exhausted immediately.
#[derive(Debug, Clone, Copy)]
pub struct NodeLimit(pub u64);

impl Budget for NodeLimit {
    fn exhausted(&mut self) -> bool {
        if self.0 == 0 {
            return true;
        }
        self.0 -= 1;
        false
    }
}

impl<F: FnMut() -> bool> Budget for F {
    fn exhausted(&mut self) -> bool {
        self()
    }
}
