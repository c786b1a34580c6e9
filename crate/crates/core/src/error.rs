//! Error type and resource limits shared across the crate.

use thiserror::Error;

/// Everything that can go wrong in the library.
///
/// `ResourceLimit` is deliberately separate from the other variants: hitting
/// a cap is never a verdict, and callers (in particular the CLI) translate
/// it to a distinct exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Text did not conform to the grammar. `pos` is a byte offset.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// A precondition on an operation was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configurable cap was exceeded before a verdict was reached.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn limit(msg: impl Into<String>) -> Self {
        Error::ResourceLimit(msg.into())
    }
}

/// Resource caps for the search procedures.
///
/// All caps are explicit errors when exceeded, never silent truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Tableau budget: counts formula insertions and world allocations.
    pub node_cap: u64,
    /// Decomposition budget: counts `+i`/`-i` actions.
    pub step_cap: u64,
    /// Support-set search budget: counts candidate sets examined.
    pub subset_cap: u64,
    /// Largest variable count a reduced normal form may use.
    pub var_cap: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            node_cap: 1_000_000,
            step_cap: 10_000,
            subset_cap: 1_000_000,
            var_cap: 6,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_carries_position() {
        let e = Error::Parse {
            pos: 7,
            msg: "unexpected ')'".into(),
        };
        assert_eq!(e.to_string(), "parse error at byte 7: unexpected ')'");
    }

    #[test]
    fn default_caps() {
        let l = Limits::default();
        assert_eq!(l.node_cap, 1_000_000);
        assert_eq!(l.step_cap, 10_000);
        assert_eq!(l.subset_cap, 1_000_000);
        assert_eq!(l.var_cap, 6);
    }
}
