//! Time source used for soft and hard limits.

use core::time::Duration;

/// Monotonic elapsed time since some fixed origin.
pub trait Clock {
    fn now(&self) -> Duration;
}

/// A clock that never advances; limits never expire.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> Duration {
        Duration::ZERO
    }
}

impl<C: Clock + ?Sized> Clock for &C {
    fn now(&self) -> Duration {
        (**self).now()
    }
}

/// A point after which work should stop.
#[derive(Debug, Clone, Copy)]
pub struct Deadline {
    at: Option<Duration>,
}

impl Deadline {
    pub fn never() -> Self {
        Self { at: None }
    }

    pub fn after(clock: &dyn Clock, limit: Option<Duration>) -> Self {
        Self {
            at: limit.map(|l| clock.now().saturating_add(l)),
        }
    }

    pub fn expired(&self, clock: &dyn Clock) -> bool {
        self.at.is_some_and(|at| clock.now() >= at)
    }
}
