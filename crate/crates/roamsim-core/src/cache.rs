//! Per-AP context cache.
//!
//! Each AP keeps at most one context record per mobile node. Inserts are
//! version-ordered so a late-delivered stale copy can never clobber a newer
//! one, and entries can expire after a configurable TTL (infinite by
//! default).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::ids::{ApId, MnId, Tick};

/// The per-client state a scheme propagates between APs: an opaque payload
/// standing in for session, QoS, and security context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MobileContext {
    pub mn_id: MnId,
    pub payload: Vec<u8>,
    /// AP that created this version of the context.
    pub origin_ap: ApId,
    /// Strictly increases every time the serving AP mints a new copy after
    /// a (re)association.
    pub version: u64,
}

/// Cache entry lifetime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheTtl {
    Infinite,
    Ticks(u64),
}

impl CacheTtl {
    fn expired(&self, inserted_at: Tick, now: Tick) -> bool {
        match self {
            CacheTtl::Infinite => false,
            CacheTtl::Ticks(ttl) => now.saturating_sub(inserted_at) > *ttl,
        }
    }
}

/// What an insert did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    /// No previous entry for the node.
    Inserted,
    /// Replaced an entry of equal or lower version.
    Replaced,
    /// Dropped: the stored version is newer.
    Stale,
}

/// Local lookup counters, one pair per cache.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub tries: u64,
    pub hits: u64,
}

#[derive(Debug, Clone)]
struct Entry {
    ctx: MobileContext,
    inserted_at: Tick,
}

/// The context cache maintained at one AP.
#[derive(Debug, Clone)]
pub struct ApCache {
    owner: ApId,
    entries: BTreeMap<MnId, Entry>,
    ttl: CacheTtl,
    stats: CacheStats,
}

impl ApCache {
    pub fn new(owner: ApId, ttl: CacheTtl) -> Self {
        ApCache {
            owner,
            entries: BTreeMap::new(),
            ttl,
            stats: CacheStats::default(),
        }
    }

    pub fn owner(&self) -> &ApId {
        &self.owner
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn stats(&self) -> CacheStats {
        self.stats
    }

    /// Stores `ctx` unless a newer version is already present. Expired
    /// entries count as absent.
    pub fn insert(&mut self, ctx: MobileContext, now: Tick) -> InsertOutcome {
        match self.entries.get(&ctx.mn_id) {
            Some(old) if !self.ttl.expired(old.inserted_at, now) => {
                if ctx.version >= old.ctx.version {
                    self.entries.insert(
                        ctx.mn_id,
                        Entry {
                            ctx,
                            inserted_at: now,
                        },
                    );
                    InsertOutcome::Replaced
                } else {
                    InsertOutcome::Stale
                }
            }
            _ => {
                self.entries.insert(
                    ctx.mn_id,
                    Entry {
                        ctx,
                        inserted_at: now,
                    },
                );
                InsertOutcome::Inserted
            }
        }
    }

    /// Counted lookup: bumps the try counter, and the hit counter on a live
    /// entry. Expired entries are evicted on the way through.
    pub fn lookup(&mut self, mn_id: MnId, now: Tick) -> Option<&MobileContext> {
        self.stats.tries += 1;
        self.evict_if_expired(mn_id, now);
        let hit = self.entries.get(&mn_id);
        if hit.is_some() {
            self.stats.hits += 1;
        }
        hit.map(|e| &e.ctx)
    }

    /// Uncounted internal accessor for bookkeeping reads (serving an
    /// obtain request, tests). Applies the same expiry rule as `lookup`.
    pub fn peek(&mut self, mn_id: MnId, now: Tick) -> Option<&MobileContext> {
        self.evict_if_expired(mn_id, now);
        self.entries.get(&mn_id).map(|e| &e.ctx)
    }

    /// Removes the node's entry. Returns whether one existed.
    pub fn invalidate(&mut self, mn_id: MnId) -> bool {
        self.entries.remove(&mn_id).is_some()
    }

    fn evict_if_expired(&mut self, mn_id: MnId, now: Tick) {
        let expired = self
            .entries
            .get(&mn_id)
            .map(|e| self.ttl.expired(e.inserted_at, now))
            .unwrap_or(false);
        if expired {
            self.entries.remove(&mn_id);
        }
    }
}
