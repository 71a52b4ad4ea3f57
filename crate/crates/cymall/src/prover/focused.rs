//! The focused search engine.
//!
//! Search alternates two phases.  The *decomposition* phase applies the
//! invertible rules: it scans the state left to right and unfolds the first
//! item whose root is `|`, `bot` or `&` (or closes outright on `top`).
//! These rules lose no provability, so no alternative is ever retried.
//! Once no invertible item remains, the *focused* phase enumerates the
//! committing choices: closing rules, a `+` component, or a `*` split, each
//! tried at every rotation of the ring.
//!
//! On top of focusing the engine can cut off states whose most general
//! type is not square — for inputs free of `top`/`0` such states can head
//! no proof — and optionally states whose variable occurrences are not
//! sign-balanced, a cheaper necessary condition that only applies to
//! additive-free states.  Verdicts are cached per canonical rotation class.

use std::collections::HashMap;

use super::arena::{
    canonical_key, Arena, BalanceScratch, Items, NodeId, SquareScratch, Tag,
};
use super::memo::{owned_key, MemoTables};
use super::{ProofNode, ProverError, Rule, SearchConfig, SearchStats};
use crate::logic::Sequent;

/// A reusable focused prover.  The verdict cache persists across calls, so
/// reuse one value when deciding many related states.
pub struct FocusedProver {
    memo: HashMap<Box<[u8]>, bool>,
    leaf_cap: u32,
    max_entries: usize,
    balance_filter: bool,
}

impl Default for FocusedProver {
    fn default() -> FocusedProver {
        FocusedProver::new()
    }
}

impl FocusedProver {
    pub fn new() -> FocusedProver {
        FocusedProver::with_options(16, 1 << 22, false)
    }

    /// Tunes the persistent cache and the balance filter.
    ///
    /// Verdicts for states with more than `leaf_cap` leaves, or arriving
    /// once the cache holds `max_entries` verdicts, are only cached for
    /// the duration of the query that produced them.  `balance_filter`
    /// additionally rejects additive-free states whose variables do not
    /// occur equally often positively and negatively; it changes no
    /// verdict, only the amount of work, and is off by default so that
    /// reported node counts reflect the plain search.
    pub fn with_options(leaf_cap: u32, max_entries: usize, balance_filter: bool) -> FocusedProver {
        FocusedProver {
            memo: HashMap::new(),
            leaf_cap,
            max_entries,
            balance_filter,
        }
    }

    /// Pre-sizes the persistent cache for about `n` verdicts, avoiding
    /// rehash spikes in long enumeration runs.
    pub fn reserve_memo(&mut self, n: usize) {
        self.memo.reserve(n.saturating_sub(self.memo.len()));
    }

    /// Number of verdicts currently held by the persistent cache.
    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// Decides provability of `seq`.
    pub fn decide(
        &mut self,
        seq: &Sequent,
        cfg: &SearchConfig,
    ) -> Result<(bool, SearchStats), ProverError> {
        match self.prepare(seq, cfg)? {
            Prepared::Pruned(stats) => Ok((false, stats)),
            Prepared::Go(mut run, items) => {
                let verdict = run.decide(&items)?;
                Ok((verdict, run.stats))
            }
        }
    }

    /// Decides provability and reconstructs a proof on success.
    pub fn prove(
        &mut self,
        seq: &Sequent,
        cfg: &SearchConfig,
    ) -> Result<(Option<ProofNode>, SearchStats), ProverError> {
        match self.prepare(seq, cfg)? {
            Prepared::Pruned(stats) => Ok((None, stats)),
            Prepared::Go(mut run, items) => {
                let proof = run.prove(&items)?;
                Ok((proof, run.stats))
            }
        }
    }

    fn prepare<'a>(
        &'a mut self,
        seq: &Sequent,
        cfg: &SearchConfig,
    ) -> Result<Prepared<'a>, ProverError> {
        if cfg.prune && seq.has_additive_constant() {
            return Err(ProverError::PruneUnsound);
        }
        let mut arena = Arena::new();
        let items = arena.intern_sequent(seq);
        let mut square = SquareScratch::new();
        let mut stats = SearchStats::default();
        if cfg.prune && !square.is_square(&arena, &items) {
            stats.prune_hits = 1;
            stats.pruned_at_root = true;
            return Ok(Prepared::Pruned(stats));
        }
        let root_key = cfg.memo.then(|| owned_key(&arena, &items));
        let run = Run {
            arena,
            memo: MemoTables::new(&mut self.memo, self.leaf_cap, self.max_entries, root_key),
            use_memo: cfg.memo,
            prune: cfg.prune,
            balance_filter: self.balance_filter,
            budget: cfg.node_budget,
            stats,
            square,
            balance: BalanceScratch::new(),
            keybuf: Vec::new(),
        };
        Ok(Prepared::Go(run, items))
    }
}

enum Prepared<'a> {
    /// The input itself failed the square cutoff.
    Pruned(SearchStats),
    Go(Run<'a>, Items),
}

/// Per-query state of the focused search.
struct Run<'a> {
    arena: Arena,
    memo: MemoTables<'a>,
    use_memo: bool,
    prune: bool,
    balance_filter: bool,
    budget: Option<u64>,
    stats: SearchStats,
    square: SquareScratch,
    balance: BalanceScratch,
    keybuf: Vec<u8>,
}

/// The state with item `i` removed, read around the ring starting after
/// `i`: `items[i+1..], items[..i]`.
fn rest_after(items: &[NodeId], i: usize) -> Items {
    let mut out = Items::new();
    out.extend_from_slice(&items[i + 1..]);
    out.extend_from_slice(&items[..i]);
    out
}

/// The state rotated so that item `i` is first.
fn rotated(items: &[NodeId], i: usize) -> Items {
    let mut out = Items::new();
    out.extend_from_slice(&items[i..]);
    out.extend_from_slice(&items[..i]);
    out
}

impl Run<'_> {
    fn tick(&mut self) -> Result<(), ProverError> {
        self.stats.nodes_expanded += 1;
        if let Some(b) = self.budget {
            if self.stats.nodes_expanded > b {
                return Err(ProverError::BudgetExceeded { stats: self.stats });
            }
        }
        Ok(())
    }

    // ------------------------------------------------------------------
    // Decision mode.
    // ------------------------------------------------------------------

    fn decide(&mut self, items: &Items) -> Result<bool, ProverError> {
        self.tick()?;
        for i in 0..items.len() {
            let node = *self.arena.node(items[i]);
            match node.tag {
                Tag::Top => return Ok(true),
                Tag::Bot => {
                    let next = rest_after(items, i);
                    return self.decide(&next);
                }
                Tag::Par => {
                    let mut next = Items::new();
                    next.push(node.a);
                    next.push(node.b);
                    next.extend(rest_after(items, i));
                    return self.decide(&next);
                }
                Tag::With => {
                    let rest = rest_after(items, i);
                    let mut prem = Items::new();
                    prem.push(node.a);
                    prem.extend(rest.iter().copied());
                    if !self.decide(&prem)? {
                        return Ok(false);
                    }
                    prem.clear();
                    prem.push(node.b);
                    prem.extend(rest.iter().copied());
                    return self.decide(&prem);
                }
                _ => {}
            }
        }
        self.sync(items)
    }

    fn sync(&mut self, items: &Items) -> Result<bool, ProverError> {
        if self.balance_filter
            && !self.arena.any_additive(items)
            && !self.balance.balanced(&self.arena, items)
        {
            return Ok(false);
        }
        if self.prune && !self.square.is_square(&self.arena, items) {
            self.stats.prune_hits += 1;
            return Ok(false);
        }
        let mut key = None;
        if self.use_memo {
            let mut buf = std::mem::take(&mut self.keybuf);
            canonical_key(&self.arena, items, &mut buf);
            let hit = self.memo.lookup(&buf);
            if let Some(v) = hit {
                self.stats.memo_hits += 1;
                self.keybuf = buf;
                return Ok(v);
            }
            key = Some(Box::<[u8]>::from(&buf[..]));
            self.keybuf = buf;
        }
        let verdict = self.sync_rules(items)?;
        if let Some(k) = key {
            self.memo.store(k, self.arena.total_leaves(items), verdict);
        }
        Ok(verdict)
    }

    fn sync_rules(&mut self, items: &Items) -> Result<bool, ProverError> {
        let n = items.len();
        for k in 0..n {
            let head = *self.arena.node(items[k]);
            if n == 1 && head.tag == Tag::One {
                return Ok(true);
            }
            if n == 2 && head.tag == Tag::Dual {
                let other = *self.arena.node(items[(k + 1) % n]);
                if other.tag == Tag::Atom && other.a == head.a {
                    return Ok(true);
                }
            }
            if head.tag == Tag::Plus {
                let rest = rest_after(items, k);
                for side in [head.a, head.b] {
                    let mut prem = Items::new();
                    prem.push(side);
                    prem.extend(rest.iter().copied());
                    if self.decide(&prem)? {
                        return Ok(true);
                    }
                }
            }
            for p in 0..n {
                let idx = (k + p) % n;
                let node = *self.arena.node(items[idx]);
                if node.tag != Tag::Tensor {
                    continue;
                }
                let mut left = Items::new();
                for q in 0..p {
                    left.push(items[(k + q) % n]);
                }
                left.push(node.a);
                let mut right = Items::new();
                right.push(node.b);
                for q in p + 1..n {
                    right.push(items[(k + q) % n]);
                }
                if self.decide(&left)? && self.decide(&right)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    // ------------------------------------------------------------------
    // Proof mode.  Same traversal, but materialises the tree, threading
    // explicit rotation steps so every node acts on the head of its
    // conclusion (`*` excepted).  Only negative verdicts are cached: a
    // cached "provable" could not be turned back into a tree.
    // ------------------------------------------------------------------

    fn seq_of(&self, items: &[NodeId]) -> Sequent {
        self.arena.to_sequent(items)
    }

    /// Wraps `inner` (which concludes the rotation of `items` by `i`) in
    /// `i` rotation steps so the result concludes `items` itself.
    fn wrap_rotations(&self, items: &[NodeId], i: usize, inner: ProofNode) -> ProofNode {
        let mut proof = inner;
        for j in (0..i).rev() {
            proof = ProofNode {
                rule: Rule::Exchange,
                principal: 0,
                conclusion: self.seq_of(&rotated(items, j)),
                premises: vec![proof],
            };
        }
        proof
    }

    fn prove(&mut self, items: &Items) -> Result<Option<ProofNode>, ProverError> {
        self.tick()?;
        for i in 0..items.len() {
            let node = *self.arena.node(items[i]);
            match node.tag {
                Tag::Top => {
                    let inner = ProofNode {
                        rule: Rule::Top,
                        principal: 0,
                        conclusion: self.seq_of(&rotated(items, i)),
                        premises: Vec::new(),
                    };
                    return Ok(Some(self.wrap_rotations(items, i, inner)));
                }
                Tag::Bot => {
                    let next = rest_after(items, i);
                    let Some(sub) = self.prove(&next)? else {
                        return Ok(None);
                    };
                    let inner = ProofNode {
                        rule: Rule::Bot,
                        principal: 0,
                        conclusion: self.seq_of(&rotated(items, i)),
                        premises: vec![sub],
                    };
                    return Ok(Some(self.wrap_rotations(items, i, inner)));
                }
                Tag::Par => {
                    let mut next = Items::new();
                    next.push(node.a);
                    next.push(node.b);
                    next.extend(rest_after(items, i));
                    let Some(sub) = self.prove(&next)? else {
                        return Ok(None);
                    };
                    let inner = ProofNode {
                        rule: Rule::Par,
                        principal: 0,
                        conclusion: self.seq_of(&rotated(items, i)),
                        premises: vec![sub],
                    };
                    return Ok(Some(self.wrap_rotations(items, i, inner)));
                }
                Tag::With => {
                    let rest = rest_after(items, i);
                    let mut subs = Vec::with_capacity(2);
                    for side in [node.a, node.b] {
                        let mut prem = Items::new();
                        prem.push(side);
                        prem.extend(rest.iter().copied());
                        match self.prove(&prem)? {
                            Some(sub) => subs.push(sub),
                            None => return Ok(None),
                        }
                    }
                    let inner = ProofNode {
                        rule: Rule::With,
                        principal: 0,
                        conclusion: self.seq_of(&rotated(items, i)),
                        premises: subs,
                    };
                    return Ok(Some(self.wrap_rotations(items, i, inner)));
                }
                _ => {}
            }
        }
        self.sync_prove(items)
    }

    fn sync_prove(&mut self, items: &Items) -> Result<Option<ProofNode>, ProverError> {
        if self.balance_filter
            && !self.arena.any_additive(items)
            && !self.balance.balanced(&self.arena, items)
        {
            return Ok(None);
        }
        if self.prune && !self.square.is_square(&self.arena, items) {
            self.stats.prune_hits += 1;
            return Ok(None);
        }
        let mut key = None;
        if self.use_memo {
            let mut buf = std::mem::take(&mut self.keybuf);
            canonical_key(&self.arena, items, &mut buf);
            if let Some(false) = self.memo.lookup(&buf) {
                self.stats.memo_hits += 1;
                self.keybuf = buf;
                return Ok(None);
            }
            key = Some(Box::<[u8]>::from(&buf[..]));
            self.keybuf = buf;
        }
        let proof = self.sync_prove_rules(items)?;
        if proof.is_none() {
            if let Some(k) = key {
                self.memo.store(k, self.arena.total_leaves(items), false);
            }
        }
        Ok(proof)
    }

    fn sync_prove_rules(&mut self, items: &Items) -> Result<Option<ProofNode>, ProverError> {
        let n = items.len();
        for k in 0..n {
            let head = *self.arena.node(items[k]);
            if n == 1 && head.tag == Tag::One {
                return Ok(Some(ProofNode {
                    rule: Rule::One,
                    principal: 0,
                    conclusion: self.seq_of(items),
                    premises: Vec::new(),
                }));
            }
            if n == 2 && head.tag == Tag::Dual {
                let other = *self.arena.node(items[(k + 1) % n]);
                if other.tag == Tag::Atom && other.a == head.a {
                    let inner = ProofNode {
                        rule: Rule::Axiom,
                        principal: 0,
                        conclusion: self.seq_of(&rotated(items, k)),
                        premises: Vec::new(),
                    };
                    return Ok(Some(self.wrap_rotations(items, k, inner)));
                }
            }
            if head.tag == Tag::Plus {
                let rest = rest_after(items, k);
                for (side, rule) in [(head.a, Rule::PlusL), (head.b, Rule::PlusR)] {
                    let mut prem = Items::new();
                    prem.push(side);
                    prem.extend(rest.iter().copied());
                    if let Some(sub) = self.prove(&prem)? {
                        let inner = ProofNode {
                            rule,
                            principal: 0,
                            conclusion: self.seq_of(&rotated(items, k)),
                            premises: vec![sub],
                        };
                        return Ok(Some(self.wrap_rotations(items, k, inner)));
                    }
                }
            }
            for p in 0..n {
                let idx = (k + p) % n;
                let node = *self.arena.node(items[idx]);
                if node.tag != Tag::Tensor {
                    continue;
                }
                let mut left = Items::new();
                for q in 0..p {
                    left.push(items[(k + q) % n]);
                }
                left.push(node.a);
                let mut right = Items::new();
                right.push(node.b);
                for q in p + 1..n {
                    right.push(items[(k + q) % n]);
                }
                let Some(lp) = self.prove(&left)? else { continue };
                let Some(rp) = self.prove(&right)? else { continue };
                let inner = ProofNode {
                    rule: Rule::Tensor,
                    principal: p,
                    conclusion: self.seq_of(&rotated(items, k)),
                    premises: vec![lp, rp],
                };
                return Ok(Some(self.wrap_rotations(items, k, inner)));
            }
        }
        Ok(None)
    }
}
