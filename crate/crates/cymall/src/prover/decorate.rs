//! Re-typing finished proofs over a chosen object assignment.
//!
//! In the typed reading of the calculus a state is a ring of items
//! separated by boundary objects, with the ring closing on the judgement's
//! annotation object.  Every rule relates the boundaries of its conclusion
//! to those of its premises in a fixed way — a `*` split shares the object
//! at the cut, a rotation step re-closes the ring one item later, and so
//! on.  Decoration walks a finished untyped proof once, threads these
//! boundary chains through a single unification session together with the
//! endpoint constraints of every item, and reads back the objects.
//!
//! Success yields the proof re-typed at the requested annotation.  Failure
//! pinpoints the first node (in preorder) whose constraints clash; this is
//! not a defect of the proof as an untyped derivation, it means that this
//! particular derivation does not exist at those objects.  Inputs whose
//! items avoid `top` and `0` never fail when the requested typing is
//! consistent with the conclusion's most general one; with `top` in play
//! failure is possible and meaningful.

use thiserror::Error;

use crate::logic::Sequent;
use crate::typecheck::{ObjectTerm, Session, TypeEnv};

use super::{check_proof, ProofCheckError, ProofNode, Rule};

/// The typing mirror of one proof node: the annotation object the node's
/// ring closes on and the boundary objects between its items
/// (`boundaries[0]` and the last boundary are the annotation itself).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedNode {
    pub annotation: ObjectTerm,
    pub boundaries: Vec<ObjectTerm>,
    pub premises: Vec<TypedNode>,
}

/// A proof paired with a consistent typing of every node.
#[derive(Debug, Clone)]
pub struct TypedProof {
    pub proof: ProofNode,
    pub typing: TypedNode,
}

/// Why decoration did not produce a typing.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DecorateError {
    /// The input is not a well-formed proof at all.
    #[error("not a well-formed proof: {0}")]
    Malformed(#[from] ProofCheckError),
    /// The proof is fine untyped, but this derivation admits no object
    /// assignment extending the requested one.
    #[error("no consistent object assignment at a `{rule}` node concluding `{conclusion}`")]
    Failed { rule: Rule, conclusion: Sequent },
}

/// Skeleton of the typing tree while boundary nodes are still raw
/// unification ids.
struct RawNode {
    bounds: Vec<u32>,
    premises: Vec<RawNode>,
}

struct Walk<'e> {
    session: Session,
    env: &'e TypeEnv,
}

impl Walk<'_> {
    fn go(&mut self, node: &ProofNode, bounds: Vec<u32>) -> Result<RawNode, DecorateError> {
        let items = node.conclusion.items();
        let k = items.len();
        debug_assert_eq!(bounds.len(), k + 1);
        // The ring closes on the annotation.
        self.session.unify(bounds[0], bounds[k]);
        for (i, f) in items.iter().enumerate() {
            self.session.constrain_formula(f, bounds[i], bounds[i + 1], self.env);
        }
        if !self.session.is_consistent() {
            return Err(DecorateError::Failed {
                rule: node.rule,
                conclusion: node.conclusion.clone(),
            });
        }
        let premise_bounds: Vec<Vec<u32>> = match node.rule {
            Rule::One | Rule::Axiom | Rule::Top => Vec::new(),
            Rule::Bot => vec![bounds[1..].to_vec()],
            Rule::Par => {
                // The unfolded components split the head interval at a
                // fresh midpoint.
                let mut b = vec![bounds[0], self.session.fresh()];
                b.extend_from_slice(&bounds[1..]);
                vec![b]
            }
            Rule::PlusL | Rule::PlusR => vec![bounds.clone()],
            Rule::With => vec![bounds.clone(), bounds.clone()],
            Rule::Tensor => {
                // Each premise ring closes at the cut; unifying the fresh
                // closers with the component endpoints happens through the
                // premises' own ring-closure and item constraints.
                let p = node.principal;
                let mut left = bounds[..=p].to_vec();
                left.push(self.session.fresh());
                let mut right = vec![self.session.fresh()];
                right.extend_from_slice(&bounds[p + 1..]);
                vec![left, right]
            }
            Rule::Exchange => {
                // The premise ring closes one item later.
                let mut b = bounds[1..].to_vec();
                b.push(self.session.fresh());
                vec![b]
            }
        };
        let mut premises = Vec::with_capacity(node.premises.len());
        for (prem, b) in node.premises.iter().zip(premise_bounds) {
            premises.push(self.go(prem, b)?);
        }
        Ok(RawNode { bounds, premises })
    }
}

fn collect_ids(raw: &RawNode, out: &mut Vec<u32>) {
    out.push(raw.bounds[0]);
    out.extend_from_slice(&raw.bounds);
    for p in &raw.premises {
        collect_ids(p, out);
    }
}

fn build(raw: &RawNode, resolved: &[ObjectTerm], cursor: &mut usize) -> TypedNode {
    let annotation = resolved[*cursor].clone();
    *cursor += 1;
    let boundaries = resolved[*cursor..*cursor + raw.bounds.len()].to_vec();
    *cursor += raw.bounds.len();
    let premises = raw
        .premises
        .iter()
        .map(|p| build(p, resolved, cursor))
        .collect();
    TypedNode {
        annotation,
        boundaries,
        premises,
    }
}

/// Types the proof `p` at annotation object `at`, with variable endpoints
/// drawn from `env` (variables absent from `env` stay polymorphic).  On
/// failure reports the first node, in preorder, whose constraints are
/// unsatisfiable.
pub fn decorate(
    p: &ProofNode,
    env: &TypeEnv,
    at: &ObjectTerm,
) -> Result<TypedProof, DecorateError> {
    check_proof(p)?;
    let mut walk = Walk {
        session: Session::new(),
        env,
    };
    let root = walk.session.node_for(at);
    let k = p.conclusion.len();
    let mut bounds = Vec::with_capacity(k + 1);
    bounds.push(root);
    if k > 0 {
        for _ in 0..k - 1 {
            bounds.push(walk.session.fresh());
        }
        bounds.push(root);
    }
    let raw = walk.go(p, bounds)?;
    let mut ids = Vec::new();
    collect_ids(&raw, &mut ids);
    let resolved = walk.session.resolve_nodes(&ids);
    let mut cursor = 0;
    let typing = build(&raw, &resolved, &mut cursor);
    Ok(TypedProof {
        proof: p.clone(),
        typing,
    })
}

impl TypedProof {
    fn render(
        f: &mut std::fmt::Formatter<'_>,
        proof: &ProofNode,
        typing: &TypedNode,
        depth: usize,
    ) -> std::fmt::Result {
        for _ in 0..depth {
            f.write_str("  ")?;
        }
        write!(f, "{} @{} [{}]:", proof.rule, proof.principal, typing.annotation)?;
        let items = proof.conclusion.items();
        for (i, item) in items.iter().enumerate() {
            write!(f, " {item}")?;
            if i + 1 < items.len() {
                write!(f, " [{}]", typing.boundaries[i + 1])?;
            }
        }
        writeln!(f)?;
        for (p, t) in proof.premises.iter().zip(&typing.premises) {
            TypedProof::render(f, p, t, depth + 1)?;
        }
        Ok(())
    }
}

/// Like the untyped proof rendering, with the annotation after the rule
/// and the boundary objects interleaved between the items.
impl std::fmt::Display for TypedProof {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        TypedProof::render(f, &self.proof, &self.typing, 0)
    }
}
