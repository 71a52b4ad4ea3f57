//! Proof search for the cyclic sequent calculus.
//!
//! Two engines decide the same judgement.  [`FocusedProver`] alternates an
//! invertible decomposition phase with a focused synchronous phase and can
//! cut off states whose most general type is not square; it is the engine
//! meant for real use.  [`NaiveProver`] enumerates every applicable rule at
//! every rotation with no admissibility shortcuts beyond memoisation; it is
//! deliberately boring so it can serve as an independent oracle for the
//! focused engine.
//!
//! Both engines produce [`ProofNode`] trees checkable by [`check_proof`],
//! and [`decorate`] re-types a finished proof over a chosen object
//! assignment, exhibiting how typed judgements embed into the untyped
//! calculus.

mod arena;
mod decorate;
mod focused;
mod memo;
mod naive;
mod rm;

pub use decorate::{decorate, DecorateError, TypedNode, TypedProof};
pub use focused::FocusedProver;
pub use naive::NaiveProver;
pub use rm::{prove_rm, prove_rm_via_mll};

use thiserror::Error;

use crate::logic::{rotate, Formula, Sequent};
use crate::typecheck::TypeEnv;

/// The inference rules that can label a proof node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Closes `1` alone.
    One,
    /// Drops a head `bot`.
    Bot,
    /// Splits the state around a `*` at the principal position.
    Tensor,
    /// Unfolds a head `|` into its two components.
    Par,
    /// Closes `~x, x`.
    Axiom,
    /// Rotates the first item to the back.
    Exchange,
    /// Replaces a head `+` by its left component.
    PlusL,
    /// Replaces a head `+` by its right component.
    PlusR,
    /// Forks on a head `&`, sharing the rest of the state.
    With,
    /// Closes any state headed by `top`.
    Top,
}

impl Rule {
    /// Number of premises the rule takes.
    pub fn arity(self) -> usize {
        match self {
            Rule::One | Rule::Axiom | Rule::Top => 0,
            Rule::Bot | Rule::Par | Rule::Exchange | Rule::PlusL | Rule::PlusR => 1,
            Rule::Tensor | Rule::With => 2,
        }
    }

    /// Stable lower-case label used in rendered proofs.
    pub fn label(self) -> &'static str {
        match self {
            Rule::One => "one",
            Rule::Bot => "bot",
            Rule::Tensor => "tensor",
            Rule::Par => "par",
            Rule::Axiom => "axiom",
            Rule::Exchange => "exchange",
            Rule::PlusL => "plus-l",
            Rule::PlusR => "plus-r",
            Rule::With => "with",
            Rule::Top => "top",
        }
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// One node of a proof tree.  `conclusion` is the full state the node
/// proves and `principal` the index of the item the rule acts on (always 0
/// except for [`Rule::Tensor`], which may act anywhere in the list).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofNode {
    pub rule: Rule,
    pub principal: usize,
    pub conclusion: Sequent,
    pub premises: Vec<ProofNode>,
}

impl ProofNode {
    /// Total number of nodes in the tree.
    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(ProofNode::node_count).sum::<usize>()
    }

    fn render(&self, f: &mut std::fmt::Formatter<'_>, depth: usize) -> std::fmt::Result {
        for _ in 0..depth {
            f.write_str("  ")?;
        }
        writeln!(f, "{} @{}: {}", self.rule, self.principal, self.conclusion)?;
        for p in &self.premises {
            p.render(f, depth + 1)?;
        }
        Ok(())
    }
}

/// Indented rule-per-line rendering, premises nested under their
/// conclusion.  The format is stable and used by golden tests.
impl std::fmt::Display for ProofNode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.render(f, 0)
    }
}

/// Options shared by both search engines.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Cut off synchronous states whose most general type is not square.
    /// Sound only for inputs free of `top` and `0`; attempting a pruned
    /// search on such inputs is rejected up front.  The focused engine
    /// honours this flag; the naive oracle never prunes.
    pub prune: bool,
    /// Cache verdicts per canonical rotation class.
    pub memo: bool,
    /// Endpoint assignment carried along for callers that want to type the
    /// result afterwards.  The search itself is untyped: pruning always
    /// measures the most general (polymorphic) type, because committing to
    /// an ambient assignment can misclassify provable states reached mid
    /// search.
    pub env: TypeEnv,
    /// Abort with [`ProverError::BudgetExceeded`] after this many expanded
    /// states.
    pub node_budget: Option<u64>,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            prune: true,
            memo: true,
            env: TypeEnv::new(),
            node_budget: None,
        }
    }
}

/// Counters reported by a search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// States entered (after memo hits, before rule enumeration).
    pub nodes_expanded: u64,
    /// States rejected by the square-type cutoff.  Zero when pruning is
    /// off.
    pub prune_hits: u64,
    /// States answered from a memo table.
    pub memo_hits: u64,
    /// Whether the input itself was rejected by the cutoff before any
    /// search.
    pub pruned_at_root: bool,
}

/// Failures of a search run.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ProverError {
    /// The input contains `top` or `0`, for which the square-type cutoff
    /// is not a complete filter; rerun without pruning.
    #[error("square-type pruning is unsound for inputs containing `top` or `0`; rerun without pruning")]
    PruneUnsound,
    /// The node budget ran out before a verdict was reached.
    #[error("node budget exhausted after {} expanded states", .stats.nodes_expanded)]
    BudgetExceeded { stats: SearchStats },
}

/// Decides and, on success, reconstructs a proof with the focused engine.
/// Fresh engine per call; reuse a [`FocusedProver`] to share its memo table
/// across calls.
pub fn prove(
    seq: &Sequent,
    cfg: &SearchConfig,
) -> Result<(Option<ProofNode>, SearchStats), ProverError> {
    FocusedProver::new().prove(seq, cfg)
}

/// Decides and, on success, reconstructs a proof with the naive oracle
/// engine.  Ignores `cfg.prune`.
pub fn prove_naive(
    seq: &Sequent,
    cfg: &SearchConfig,
) -> Result<(Option<ProofNode>, SearchStats), ProverError> {
    NaiveProver::new().prove(seq, cfg)
}

/// A structural defect found in a claimed proof.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("malformed {rule} node concluding `{conclusion}`: {detail}")]
pub struct ProofCheckError {
    pub rule: Rule,
    pub conclusion: Sequent,
    pub detail: String,
}

fn bad(node: &ProofNode, detail: impl Into<String>) -> ProofCheckError {
    ProofCheckError {
        rule: node.rule,
        conclusion: node.conclusion.clone(),
        detail: detail.into(),
    }
}

/// Verifies a proof tree bottom-up against the rules, independently of how
/// it was produced: arities, principal positions, and the exact premise
/// states demanded by each rule.
pub fn check_proof(p: &ProofNode) -> Result<(), ProofCheckError> {
    if p.premises.len() != p.rule.arity() {
        return Err(bad(
            p,
            format!("expected {} premises, found {}", p.rule.arity(), p.premises.len()),
        ));
    }
    let items = p.conclusion.items();
    if p.rule != Rule::Tensor && p.principal != 0 {
        return Err(bad(p, "principal position must be 0"));
    }
    match p.rule {
        Rule::One => {
            if items != [Formula::One] {
                return Err(bad(p, "closes exactly the singleton `1`"));
            }
        }
        Rule::Axiom => {
            let ok = matches!(items, [Formula::Dual(x), Formula::Atom(y)] if x == y);
            if !ok {
                return Err(bad(p, "closes exactly `~x, x` for one variable"));
            }
        }
        Rule::Top => {
            if !matches!(items.first(), Some(Formula::Top)) {
                return Err(bad(p, "requires `top` at the head"));
            }
        }
        Rule::Bot => {
            if !matches!(items.first(), Some(Formula::Bot)) {
                return Err(bad(p, "requires `bot` at the head"));
            }
            if p.premises[0].conclusion.items() != &items[1..] {
                return Err(bad(p, "premise must drop the head `bot`"));
            }
        }
        Rule::Par => {
            let Some(Formula::Par(a, b)) = items.first() else {
                return Err(bad(p, "requires `|` at the head"));
            };
            let mut want = vec![(**a).clone(), (**b).clone()];
            want.extend_from_slice(&items[1..]);
            if p.premises[0].conclusion.items() != &want[..] {
                return Err(bad(p, "premise must unfold the head `|` in place"));
            }
        }
        Rule::PlusL | Rule::PlusR => {
            let Some(Formula::Plus(a, b)) = items.first() else {
                return Err(bad(p, "requires `+` at the head"));
            };
            let chosen = if p.rule == Rule::PlusL { a } else { b };
            let mut want = vec![(**chosen).clone()];
            want.extend_from_slice(&items[1..]);
            if p.premises[0].conclusion.items() != &want[..] {
                return Err(bad(p, "premise must keep the chosen component at the head"));
            }
        }
        Rule::With => {
            let Some(Formula::With(a, b)) = items.first() else {
                return Err(bad(p, "requires `&` at the head"));
            };
            for (prem, side) in p.premises.iter().zip([a, b]) {
                let mut want = vec![(**side).clone()];
                want.extend_from_slice(&items[1..]);
                if prem.conclusion.items() != &want[..] {
                    return Err(bad(p, "each premise must keep one component at the head"));
                }
            }
        }
        Rule::Tensor => {
            if p.principal >= items.len() {
                return Err(bad(p, "principal position out of range"));
            }
            let Formula::Tensor(a, b) = &items[p.principal] else {
                return Err(bad(p, "requires `*` at the principal position"));
            };
            let mut left = items[..p.principal].to_vec();
            left.push((**a).clone());
            let mut right = vec![(**b).clone()];
            right.extend_from_slice(&items[p.principal + 1..]);
            if p.premises[0].conclusion.items() != &left[..] {
                return Err(bad(p, "first premise must end with the left component"));
            }
            if p.premises[1].conclusion.items() != &right[..] {
                return Err(bad(p, "second premise must start with the right component"));
            }
        }
        Rule::Exchange => {
            if items.is_empty() {
                return Err(bad(p, "cannot rotate an empty state"));
            }
            if p.premises[0].conclusion != rotate(&p.conclusion, 1) {
                return Err(bad(p, "premise must be the conclusion rotated by one"));
            }
        }
    }
    for prem in &p.premises {
        check_proof(prem)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_sequent;

    fn seq(src: &str) -> Sequent {
        parse_sequent(src).unwrap()
    }

    fn leaf(rule: Rule, conclusion: &str) -> ProofNode {
        ProofNode {
            rule,
            principal: 0,
            conclusion: seq(conclusion),
            premises: Vec::new(),
        }
    }

    #[test]
    fn axiom_and_one_shapes_are_enforced() {
        assert!(check_proof(&leaf(Rule::Axiom, "~x, x")).is_ok());
        assert!(check_proof(&leaf(Rule::Axiom, "x, ~x")).is_err());
        assert!(check_proof(&leaf(Rule::Axiom, "~x, y")).is_err());
        assert!(check_proof(&leaf(Rule::One, "1")).is_ok());
        assert!(check_proof(&leaf(Rule::One, "1, 1")).is_err());
        assert!(check_proof(&leaf(Rule::Top, "top, x")).is_ok());
        assert!(check_proof(&leaf(Rule::Top, "x, top")).is_err());
    }

    #[test]
    fn compound_shapes_are_enforced() {
        let good = ProofNode {
            rule: Rule::Tensor,
            principal: 1,
            conclusion: seq("~x, x * y, ~y"),
            premises: vec![leaf(Rule::Axiom, "~x, x"), leaf(Rule::Axiom, "y, ~y")],
        };
        // The second premise itself is malformed (wrong orientation), but
        // the tensor split is checked first at the root and accepted.
        let err = check_proof(&good).unwrap_err();
        assert_eq!(err.rule, Rule::Axiom);

        let wrong_split = ProofNode {
            rule: Rule::Tensor,
            principal: 1,
            conclusion: seq("~x, x * y, ~y"),
            premises: vec![leaf(Rule::Axiom, "~x, y"), leaf(Rule::Axiom, "~y, x")],
        };
        let err = check_proof(&wrong_split).unwrap_err();
        assert_eq!(err.rule, Rule::Tensor);
    }

    #[test]
    fn exchange_premise_is_the_rotation() {
        let node = ProofNode {
            rule: Rule::Exchange,
            principal: 0,
            conclusion: seq("x, ~x"),
            premises: vec![leaf(Rule::Axiom, "~x, x")],
        };
        assert!(check_proof(&node).is_ok());
        let wrong = ProofNode {
            rule: Rule::Exchange,
            principal: 0,
            conclusion: seq("x, ~x"),
            premises: vec![leaf(Rule::Axiom, "x, ~x")],
        };
        assert!(check_proof(&wrong).is_err());
    }

    #[test]
    fn rendering_is_indented_and_stable() {
        let node = ProofNode {
            rule: Rule::Exchange,
            principal: 0,
            conclusion: seq("x, ~x"),
            premises: vec![leaf(Rule::Axiom, "~x, x")],
        };
        assert_eq!(node.to_string(), "exchange @0: x, ~x\n  axiom @0: ~x, x\n");
    }
}
