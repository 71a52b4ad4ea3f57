//! The naive reference engine.
//!
//! At every state this engine tries every rule at every rotation: closing
//! rules, head decompositions, and every tensor split.  It applies no
//! admissibility reasoning — no invertibility shortcuts, no typing cutoff,
//! no balance filter — so its verdicts depend only on the bare rules.
//! Verdicts are cached per canonical rotation class, which is sound
//! because provability is rotation-invariant (rotation is itself a rule),
//! and necessary to keep the search finite-time on overlapping subproblems.
//! Termination needs no cycle detection: every premise of every
//! non-rotation rule is strictly smaller (fewer connectives or fewer
//! leaves), and rotations are enumerated within one state rather than
//! recursed into.
//!
//! Use this engine as an oracle to validate the focused one; it is far too
//! slow for real queries.

use std::collections::HashMap;

use super::arena::{canonical_key, Arena, Items, NodeId, Tag};
use super::memo::{owned_key, MemoTables};
use super::{ProofNode, ProverError, Rule, SearchConfig, SearchStats};
use crate::logic::Sequent;

/// A reusable naive prover.  The verdict cache persists across calls.
pub struct NaiveProver {
    memo: HashMap<Box<[u8]>, bool>,
    leaf_cap: u32,
    max_entries: usize,
}

impl Default for NaiveProver {
    fn default() -> NaiveProver {
        NaiveProver::new()
    }
}

impl NaiveProver {
    pub fn new() -> NaiveProver {
        NaiveProver::with_options(16, 1 << 22)
    }

    /// Tunes the persistent cache; see
    /// [`FocusedProver::with_options`](super::FocusedProver::with_options).
    pub fn with_options(leaf_cap: u32, max_entries: usize) -> NaiveProver {
        NaiveProver {
            memo: HashMap::new(),
            leaf_cap,
            max_entries,
        }
    }

    /// Pre-sizes the persistent cache for about `n` verdicts.
    pub fn reserve_memo(&mut self, n: usize) {
        self.memo.reserve(n.saturating_sub(self.memo.len()));
    }

    /// Number of verdicts currently held by the persistent cache.
    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// Decides provability of `seq`.  `cfg.prune` is ignored: the oracle
    /// never cuts anything off, so its verdicts stay independent of the
    /// typing machinery it is meant to validate.
    pub fn decide(
        &mut self,
        seq: &Sequent,
        cfg: &SearchConfig,
    ) -> Result<(bool, SearchStats), ProverError> {
        let (mut run, items) = self.prepare(seq, cfg);
        let verdict = run.decide(&items)?;
        Ok((verdict, run.stats))
    }

    /// Decides provability and reconstructs a proof on success.
    pub fn prove(
        &mut self,
        seq: &Sequent,
        cfg: &SearchConfig,
    ) -> Result<(Option<ProofNode>, SearchStats), ProverError> {
        let (mut run, items) = self.prepare(seq, cfg);
        let proof = run.prove(&items)?;
        Ok((proof, run.stats))
    }

    fn prepare(&mut self, seq: &Sequent, cfg: &SearchConfig) -> (Run<'_>, Items) {
        let mut arena = Arena::new();
        let items = arena.intern_sequent(seq);
        let root_key = cfg.memo.then(|| owned_key(&arena, &items));
        let run = Run {
            arena,
            memo: MemoTables::new(&mut self.memo, self.leaf_cap, self.max_entries, root_key),
            use_memo: cfg.memo,
            budget: cfg.node_budget,
            stats: SearchStats::default(),
            keybuf: Vec::new(),
        };
        (run, items)
    }
}

struct Run<'a> {
    arena: Arena,
    memo: MemoTables<'a>,
    use_memo: bool,
    budget: Option<u64>,
    stats: SearchStats,
    keybuf: Vec<u8>,
}

fn rest_after(items: &[NodeId], i: usize) -> Items {
    let mut out = Items::new();
    out.extend_from_slice(&items[i + 1..]);
    out.extend_from_slice(&items[..i]);
    out
}

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

    fn decide(&mut self, items: &Items) -> Result<bool, ProverError> {
        self.tick()?;
        let mut key = None;
        if self.use_memo {
            let mut buf = std::mem::take(&mut self.keybuf);
            canonical_key(&self.arena, items, &mut buf);
            if let Some(v) = self.memo.lookup(&buf) {
                self.stats.memo_hits += 1;
                self.keybuf = buf;
                return Ok(v);
            }
            key = Some(Box::<[u8]>::from(&buf[..]));
            self.keybuf = buf;
        }
        let verdict = self.rules(items)?;
        if let Some(k) = key {
            self.memo.store(k, self.arena.total_leaves(items), verdict);
        }
        Ok(verdict)
    }

    /// Tries every rule instance at every rotation, in a fixed order.
    fn rules(&mut self, items: &Items) -> Result<bool, ProverError> {
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
            match head.tag {
                Tag::Top => return Ok(true),
                Tag::Bot => {
                    let next = rest_after(items, k);
                    if self.decide(&next)? {
                        return Ok(true);
                    }
                }
                Tag::Par => {
                    let mut next = Items::new();
                    next.push(head.a);
                    next.push(head.b);
                    next.extend(rest_after(items, k));
                    if self.decide(&next)? {
                        return Ok(true);
                    }
                }
                Tag::Plus => {
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
                Tag::With => {
                    let rest = rest_after(items, k);
                    let mut both = true;
                    for side in [head.a, head.b] {
                        let mut prem = Items::new();
                        prem.push(side);
                        prem.extend(rest.iter().copied());
                        if !self.decide(&prem)? {
                            both = false;
                            break;
                        }
                    }
                    if both {
                        return Ok(true);
                    }
                }
                _ => {}
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
    // Proof mode: the same enumeration, materialising trees.  Only
    // negative verdicts are cached.
    // ------------------------------------------------------------------

    fn seq_of(&self, items: &[NodeId]) -> Sequent {
        self.arena.to_sequent(items)
    }

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
        let proof = self.prove_rules(items)?;
        if proof.is_none() {
            if let Some(k) = key {
                self.memo.store(k, self.arena.total_leaves(items), false);
            }
        }
        Ok(proof)
    }

    fn prove_rules(&mut self, items: &Items) -> Result<Option<ProofNode>, ProverError> {
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
            let close = |run: &Run<'_>, rule, premises| ProofNode {
                rule,
                principal: 0,
                conclusion: run.seq_of(&rotated(items, k)),
                premises,
            };
            match head.tag {
                Tag::Top => {
                    let inner = close(self, Rule::Top, Vec::new());
                    return Ok(Some(self.wrap_rotations(items, k, inner)));
                }
                Tag::Bot => {
                    let next = rest_after(items, k);
                    if let Some(sub) = self.prove(&next)? {
                        let inner = close(self, Rule::Bot, vec![sub]);
                        return Ok(Some(self.wrap_rotations(items, k, inner)));
                    }
                }
                Tag::Par => {
                    let mut next = Items::new();
                    next.push(head.a);
                    next.push(head.b);
                    next.extend(rest_after(items, k));
                    if let Some(sub) = self.prove(&next)? {
                        let inner = close(self, Rule::Par, vec![sub]);
                        return Ok(Some(self.wrap_rotations(items, k, inner)));
                    }
                }
                Tag::Plus => {
                    let rest = rest_after(items, k);
                    for (side, rule) in [(head.a, Rule::PlusL), (head.b, Rule::PlusR)] {
                        let mut prem = Items::new();
                        prem.push(side);
                        prem.extend(rest.iter().copied());
                        if let Some(sub) = self.prove(&prem)? {
                            let inner = close(self, rule, vec![sub]);
                            return Ok(Some(self.wrap_rotations(items, k, inner)));
                        }
                    }
                }
                Tag::With => {
                    let rest = rest_after(items, k);
                    let mut subs = Vec::with_capacity(2);
                    for side in [head.a, head.b] {
                        let mut prem = Items::new();
                        prem.push(side);
                        prem.extend(rest.iter().copied());
                        match self.prove(&prem)? {
                            Some(sub) => subs.push(sub),
                            None => break,
                        }
                    }
                    if subs.len() == 2 {
                        let inner = close(self, Rule::With, subs);
                        return Ok(Some(self.wrap_rotations(items, k, inner)));
                    }
                }
                _ => {}
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prover::check_proof;
    use crate::syntax::parse_sequent;

    fn seq(src: &str) -> Sequent {
        parse_sequent(src).unwrap()
    }

    #[test]
    fn verdicts_match_the_focused_engine_on_samples() {
        let cfg = SearchConfig {
            prune: false,
            ..SearchConfig::default()
        };
        for src in [
            "~x, x",
            "x, ~x",
            "~x, y",
            "1",
            "1, 1",
            "bot, 1",
            "~y | bot | ~x, ((x * y) | ~y) * y",
            "~x, x * y, ~y",
            "~x, y * x, ~y",
            "x + y, ~x",
            "x & y, ~x",
            "(x & y) + x, ~x",
            "~x * top, ~y, top * x",
            "x | ~x",
            "x * ~x",
            "1 | bot",
            "(x * y) | (~y * ~x)",
        ] {
            let naive = NaiveProver::new().decide(&seq(src), &cfg).unwrap().0;
            let focused = super::super::FocusedProver::new()
                .decide(&seq(src), &cfg)
                .unwrap()
                .0;
            assert_eq!(naive, focused, "engines disagree on {src}");
        }
    }

    #[test]
    fn prune_flag_is_ignored_and_stats_stay_clean() {
        let cfg = SearchConfig::default();
        assert!(cfg.prune);
        // Provable thanks to `top`; a pruning engine would refuse it.
        let (v, stats) = NaiveProver::new()
            .decide(&seq("~x * top, ~y, top * x"), &cfg)
            .unwrap();
        assert!(v);
        assert_eq!(stats.prune_hits, 0);
        assert!(!stats.pruned_at_root);
    }

    #[test]
    fn proofs_pass_the_checker() {
        let cfg = SearchConfig {
            prune: false,
            ..SearchConfig::default()
        };
        for src in ["x, ~x", "~x, x * y, ~y", "x + y, ~x", "bot, 1", "top, x"] {
            let (proof, _) = NaiveProver::new().prove(&seq(src), &cfg).unwrap();
            let proof = proof.unwrap_or_else(|| panic!("expected a proof for {src}"));
            assert_eq!(proof.conclusion, seq(src));
            check_proof(&proof).unwrap_or_else(|e| panic!("bad proof for {src}: {e}"));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let cfg = SearchConfig {
            prune: false,
            node_budget: Some(2),
            ..SearchConfig::default()
        };
        let err = NaiveProver::new()
            .decide(&seq("~x | ~y, y * x, 1 * 1"), &cfg)
            .unwrap_err();
        assert!(matches!(err, ProverError::BudgetExceeded { .. }));
    }
}
