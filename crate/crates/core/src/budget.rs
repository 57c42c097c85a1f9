//! Resource limits shared by all constructions.

use std::time::{Duration, Instant};

use thiserror::Error;

/// Default bound on the number of states any single construction may create.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ResourceError {
    #[error("timeout")]
    Timeout,
    #[error("size cap of {0} states exceeded")]
    SizeCap(usize),
}

/// Wall-clock deadline plus a per-construction state cap.
///
/// Constructions call [`Budget::check`] once per expanded state, which makes
/// them interruptible at state-expansion granularity.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub deadline: Option<Instant>,
    pub state_cap: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            deadline: None,
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget {
            deadline: None,
            state_cap: usize::MAX,
        }
    }

    pub fn with_timeout(timeout: Duration) -> Self {
        Budget {
            deadline: Some(Instant::now() + timeout),
            ..Budget::default()
        }
    }

    pub fn with_cap(self, state_cap: usize) -> Self {
        Budget { state_cap, ..self }
    }

    pub fn check(&self, states: usize) -> Result<(), ResourceError> {
        if states > self.state_cap {
            return Err(ResourceError::SizeCap(self.state_cap));
        }
        if let Some(d) = self.deadline {
            if Instant::now() >= d {
                return Err(ResourceError::Timeout);
            }
        }
        Ok(())
    }

    pub fn remaining(&self) -> Option<Duration> {
        self.deadline.map(|d| d.saturating_duration_since(Instant::now()))
    }
}
