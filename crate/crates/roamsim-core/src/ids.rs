//! Identifier newtypes shared across the simulation.

use alloc::string::String;
use core::fmt;

/// Simulation time in ticks (one tick = one mobility step).
pub type Tick = u64;

/// Opaque access-point identifier.
///
/// Ids are compared lexicographically; the ordering is used for
/// deterministic tie-breaks and sorted exports.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ApId(String);

impl ApId {
    pub fn new(id: impl Into<String>) -> Self {
        ApId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ApId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ApId {
    fn from(s: &str) -> Self {
        ApId::new(s)
    }
}

/// Mobile-node identifier. Nodes are numbered in spawn order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MnId(pub u32);

impl fmt::Display for MnId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mn{}", self.0)
    }
}
