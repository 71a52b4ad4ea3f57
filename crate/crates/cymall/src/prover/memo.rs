//! Verdict caches keyed by canonical rotation class.
//!
//! Each engine keeps one table that outlives individual queries (owned by
//! the prover value) plus one per-query table.  A verdict goes to the
//! persistent table only when the state is small (few leaves, so likely to
//! recur across queries), the table has room, and the state is not the
//! query root itself — roots are each seen once by the caller, so caching
//! them would only grow the table without ever producing a hit.

use std::collections::HashMap;

use super::arena::{canonical_key, Arena, NodeId};

pub(crate) struct MemoTables<'a> {
    global: &'a mut HashMap<Box<[u8]>, bool>,
    local: HashMap<Box<[u8]>, bool>,
    leaf_cap: u32,
    max_entries: usize,
    root_key: Option<Box<[u8]>>,
}

impl<'a> MemoTables<'a> {
    pub fn new(
        global: &'a mut HashMap<Box<[u8]>, bool>,
        leaf_cap: u32,
        max_entries: usize,
        root_key: Option<Box<[u8]>>,
    ) -> MemoTables<'a> {
        MemoTables {
            global,
            local: HashMap::new(),
            leaf_cap,
            max_entries,
            root_key,
        }
    }

    pub fn lookup(&self, key: &[u8]) -> Option<bool> {
        self.local
            .get(key)
            .or_else(|| self.global.get(key))
            .copied()
    }

    pub fn store(&mut self, key: Box<[u8]>, leaves: u32, verdict: bool) {
        let is_root = self.root_key.as_deref() == Some(&key[..]);
        if !is_root && leaves <= self.leaf_cap && self.global.len() < self.max_entries {
            self.global.insert(key, verdict);
        } else {
            self.local.insert(key, verdict);
        }
    }
}

/// The canonical key of a state as an owned allocation.
pub(crate) fn owned_key(arena: &Arena, items: &[NodeId]) -> Box<[u8]> {
    let mut buf = Vec::new();
    canonical_key(arena, items, &mut buf);
    buf.into_boxed_slice()
}
