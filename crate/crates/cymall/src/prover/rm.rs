//! Deciding ordered-monoid judgements, natively and via encoding.
//!
//! A judgement `x1, ..., xk |- a` asks whether the ordered product of the
//! hypotheses is below `a` in every monoid ordered compatibly and equipped
//! with the residuals `\` and `/`.  [`prove_rm`] decides the `.`/`\`/`/`
//! fragment by exhaustive backward search over a small cut-free rule set;
//! every rule's premises are strictly smaller (counting term nodes across
//! the whole judgement), so the search terminates without memoisation.
//!
//! [`prove_rm_via_mll`] instead translates the judgement into the cyclic
//! sequent calculus — hypotheses reversed and negated, goal appended — and
//! runs the focused engine.  On the `.`/`\`/`/` fragment both routes agree;
//! the translation also accepts the lattice operations and `top`/`0`,
//! where the sequent calculus is strictly more liberal than the
//! order-theoretic reading (see the relational model for the gap).

use crate::logic::{encode_rm, negate_list, RmTerm, Sequent};

use super::{FocusedProver, ProverError, SearchConfig, SearchStats};

/// Decides `hyps |- goal` in the `.`/`\`/`/` fragment.  Terms containing
/// the lattice operations, `top` or `0` match no rule and simply fail;
/// gate callers on [`RmTerm::is_monoid_fragment`] when that matters.
pub fn prove_rm(hyps: &[RmTerm], goal: &RmTerm) -> bool {
    derivable(hyps, goal)
}

fn derivable(l: &[RmTerm], a: &RmTerm) -> bool {
    // A single variable proves itself.
    if l.len() == 1 {
        if let RmTerm::Var(_) = a {
            if l[0] == *a {
                return true;
            }
        }
    }
    // Goal-side rules.
    match a {
        RmTerm::Unit if l.is_empty() => return true,
        RmTerm::Dot(c, d) => {
            for cut in 0..=l.len() {
                if derivable(&l[..cut], c) && derivable(&l[cut..], d) {
                    return true;
                }
            }
        }
        // `c / b`: prove `c` with `b` appended to the hypotheses.
        RmTerm::RDiv(c, b) => {
            let mut ext = l.to_vec();
            ext.push((**b).clone());
            if derivable(&ext, c) {
                return true;
            }
        }
        // `b \ c`: prove `c` with `b` prepended to the hypotheses.
        RmTerm::LDiv(b, c) => {
            let mut ext = Vec::with_capacity(l.len() + 1);
            ext.push((**b).clone());
            ext.extend_from_slice(l);
            if derivable(&ext, c) {
                return true;
            }
        }
        _ => {}
    }
    // Hypothesis-side rules.
    for i in 0..l.len() {
        match &l[i] {
            RmTerm::Unit => {
                let mut next = l.to_vec();
                next.remove(i);
                if derivable(&next, a) {
                    return true;
                }
            }
            RmTerm::Dot(b, c) => {
                let mut next = l.to_vec();
                next[i] = (**b).clone();
                next.insert(i + 1, (**c).clone());
                if derivable(&next, a) {
                    return true;
                }
            }
            // `c / b` swallows a segment proving `b` immediately to its
            // right and leaves `c`.
            RmTerm::RDiv(c, b) => {
                for j in 0..l.len() - i {
                    if derivable(&l[i + 1..i + 1 + j], b) {
                        let mut next = Vec::with_capacity(l.len() - j);
                        next.extend_from_slice(&l[..i]);
                        next.push((**c).clone());
                        next.extend_from_slice(&l[i + 1 + j..]);
                        if derivable(&next, a) {
                            return true;
                        }
                    }
                }
            }
            // `b \ c` swallows a segment proving `b` immediately to its
            // left and leaves `c`.
            RmTerm::LDiv(b, c) => {
                for j in 0..=i {
                    if derivable(&l[i - j..i], b) {
                        let mut next = Vec::with_capacity(l.len() - j);
                        next.extend_from_slice(&l[..i - j]);
                        next.push((**c).clone());
                        next.extend_from_slice(&l[i + 1..]);
                        if derivable(&next, a) {
                            return true;
                        }
                    }
                }
            }
            _ => {}
        }
    }
    false
}

/// Decides the same judgement by translating it into the cyclic sequent
/// calculus: the hypotheses are reversed and negated, the goal appended,
/// and the focused engine run on the result.  Remember that translations
/// of terms containing `top` or `0` contain additive constants, so such
/// judgements need `cfg.prune` off.
pub fn prove_rm_via_mll(
    hyps: &[RmTerm],
    goal: &RmTerm,
    cfg: &SearchConfig,
) -> Result<(bool, SearchStats), ProverError> {
    let encoded: Vec<_> = hyps.iter().map(encode_rm).collect();
    let mut items = negate_list(&encoded);
    items.push(encode_rm(goal));
    FocusedProver::new().decide(&Sequent(items), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_rm_judgement, parse_rm_term};

    fn holds(src: &str) -> bool {
        let (hyps, goal) = parse_rm_judgement(src).unwrap();
        prove_rm(&hyps, &goal)
    }

    #[test]
    fn monoid_judgements() {
        for (src, want) in [
            ("x |- x", true),
            ("|- 1", true),
            ("x |- y", false),
            ("x, y |- x . y", true),
            ("x, y |- y . x", false),
            ("x . y |- x . y", true),
            ("x . (y . z) |- (x . y) . z", true),
            ("(x . y) . z |- x . (y . z)", true),
            ("1, x, 1 |- x", true),
            ("x, x \\ y |- y", true),
            ("x \\ y, x |- y", false),
            ("x / y, y |- x", true),
            ("x |- (x . y) / y", true),
            ("x |- y \\ (y . x)", true),
            ("|- x \\ x", true),
            ("|- x / x", true),
            ("x \\ y, y \\ z |- x \\ z", true),
            ("|- (x . y) \\ (x . y)", true),
            ("y / x |- y / x", true),
            ("x |- 1", false),
            ("|- x", false),
        ] {
            assert_eq!(holds(src), want, "judgement mismatch on {src}");
        }
    }

    #[test]
    fn translation_agrees_on_monoid_samples() {
        let cfg = SearchConfig::default();
        for src in [
            "x |- x",
            "|- 1",
            "x |- y",
            "x, y |- x . y",
            "x, y |- y . x",
            "x, x \\ y |- y",
            "x \\ y, x |- y",
            "x |- (x . y) / y",
            "|- x \\ x",
            "x \\ y, y \\ z |- x \\ z",
        ] {
            let (hyps, goal) = parse_rm_judgement(src).unwrap();
            let native = prove_rm(&hyps, &goal);
            let (encoded, _) = prove_rm_via_mll(&hyps, &goal, &cfg).unwrap();
            assert_eq!(native, encoded, "translation mismatch on {src}");
        }
    }

    #[test]
    fn top_widens_the_translation_beyond_the_monoid_rules() {
        // With `top` involved the sequent calculus proves strictly more
        // than the order-theoretic monoid reading: this judgement fails in
        // some models with an empty carrier, yet its translation is
        // provable (pruning must be off, since the translation contains
        // additive constants).
        let hyp = parse_rm_term("y . (top \\ x)").unwrap();
        let goal = parse_rm_term("top . x").unwrap();
        assert!(!prove_rm(&[hyp.clone()], &goal));
        let cfg = SearchConfig {
            prune: false,
            ..SearchConfig::default()
        };
        let (v, _) = prove_rm_via_mll(&[hyp.clone()], &goal, &cfg).unwrap();
        assert!(v);
        let strict = SearchConfig::default();
        assert_eq!(
            prove_rm_via_mll(&[hyp], &goal, &strict).unwrap_err(),
            ProverError::PruneUnsound
        );
    }
}
