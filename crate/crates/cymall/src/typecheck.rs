//! Most-general-type inference.
//!
//! Formulas and terms can be typed over an arbitrary collection of
//! "objects": a variable is assigned a pair of endpoint objects `n -> m`,
//! and every connective chains or shares endpoints in a fixed way (for
//! instance `a * b : n -> p` requires `a : n -> m` and `b : m -> p` for
//! some midpoint `m`).  A cyclic sequent is typed like a composite whose
//! boundary endpoints are read around the ring.
//!
//! Inference computes the *most general* such typing by unification over
//! endpoint metavariables: the result, an [`Mgu`], is a partition of the
//! endpoint terms into classes, where a class may be pinned to a constant
//! object by a [`TypeEnv`] binding.  Unifying two distinct constants does
//! not abort inference; it just marks the result inconsistent, so callers
//! can still inspect the partition.
//!
//! The central predicate downstream is [`is_square`]: a sequent whose most
//! general type has equal start and end endpoints.  Provable sequents are
//! always square, which is what makes square-type pruning in the prover
//! sound (on sequents without `top`/`0`).

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::kleene::{is_strict, KaTerm};
use crate::logic::{Formula, RmTerm, Sequent};

/// An endpoint object: a named constant, or an inference metavariable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObjectTerm {
    Constant(String),
    MetaVar(u32),
}

impl ObjectTerm {
    /// Convenience constructor for a named constant.
    pub fn constant(name: &str) -> ObjectTerm {
        ObjectTerm::Constant(name.to_string())
    }
}

impl fmt::Display for ObjectTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectTerm::Constant(name) => write!(f, "{name}"),
            ObjectTerm::MetaVar(k) => write!(f, "?{k}"),
        }
    }
}

/// Errors from the checking entry points.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypecheckError {
    #[error("variable '{0}' is not bound in the environment")]
    UnboundVariable(String),
}

/// A typing environment: variable name to endpoint pair.
///
/// Environments may be partial — variables without a binding receive
/// fresh metavariable endpoints during inference — and bindings may
/// themselves mention metavariables, which lets callers link the
/// endpoints of different variables without pinning them to constants.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeEnv {
    bindings: BTreeMap<String, (ObjectTerm, ObjectTerm)>,
}

impl TypeEnv {
    pub fn new() -> TypeEnv {
        TypeEnv::default()
    }

    /// Bind `name : dom -> cod`, replacing any previous binding.
    pub fn bind(&mut self, name: &str, dom: ObjectTerm, cod: ObjectTerm) {
        self.bindings.insert(name.to_string(), (dom, cod));
    }

    pub fn get(&self, name: &str) -> Option<(&ObjectTerm, &ObjectTerm)> {
        self.bindings.get(name).map(|(d, c)| (d, c))
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    /// Bindings in variable-name order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &ObjectTerm, &ObjectTerm)> {
        self.bindings.iter().map(|(k, (d, c))| (k.as_str(), d, c))
    }
}

// ---------------------------------------------------------------------------
// Unification session
// ---------------------------------------------------------------------------

/// A union-find over endpoint nodes.  Each class may carry at most one
/// constant; merging classes with two different constants marks the whole
/// session inconsistent (and keeps going, so the partition stays usable).
#[derive(Debug, Clone)]
pub(crate) struct Session {
    parent: Vec<u32>,
    rank: Vec<u8>,
    /// Per node, `Some(constant id)` if the node is a root whose class
    /// contains that constant.
    cons: Vec<Option<u32>>,
    const_names: Vec<String>,
    const_nodes: BTreeMap<String, u32>,
    /// Nodes already created for external `ObjectTerm::MetaVar`s.
    env_metas: BTreeMap<u32, u32>,
    /// Per variable name, its endpoint nodes.
    vars: BTreeMap<String, (u32, u32)>,
    consistent: bool,
}

impl Session {
    pub(crate) fn new() -> Session {
        Session {
            parent: Vec::new(),
            rank: Vec::new(),
            cons: Vec::new(),
            const_names: Vec::new(),
            const_nodes: BTreeMap::new(),
            env_metas: BTreeMap::new(),
            vars: BTreeMap::new(),
            consistent: true,
        }
    }

    pub(crate) fn fresh(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        self.rank.push(0);
        self.cons.push(None);
        id
    }

    /// The node representing an external object term, creating it on first
    /// use.
    pub(crate) fn node_for(&mut self, t: &ObjectTerm) -> u32 {
        match t {
            ObjectTerm::Constant(name) => {
                if let Some(&n) = self.const_nodes.get(name) {
                    return n;
                }
                let node = self.fresh();
                let id = self.const_names.len() as u32;
                self.const_names.push(name.clone());
                self.cons[node as usize] = Some(id);
                self.const_nodes.insert(name.clone(), node);
                node
            }
            ObjectTerm::MetaVar(k) => {
                if let Some(&n) = self.env_metas.get(k) {
                    return n;
                }
                let node = self.fresh();
                self.env_metas.insert(*k, node);
                node
            }
        }
    }

    pub(crate) fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        // Path compression.
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    /// Merge the classes of `a` and `b`.  Returns the session's
    /// consistency after the merge.
    pub(crate) fn unify(&mut self, a: u32, b: u32) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return self.consistent;
        }
        let (hi, lo) = if self.rank[ra as usize] >= self.rank[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        // Keep constants on the surviving root; two different constants in
        // one class is the (only) source of inconsistency.
        match (self.cons[hi as usize], self.cons[lo as usize]) {
            (Some(x), Some(y)) if x != y => {
                self.consistent = false;
                // Deterministically keep the smaller constant id.
                if y < x {
                    self.cons[hi as usize] = Some(y);
                }
            }
            (None, Some(y)) => self.cons[hi as usize] = Some(y),
            _ => {}
        }
        if self.rank[hi as usize] == self.rank[lo as usize] {
            self.rank[hi as usize] += 1;
        }
        self.parent[lo as usize] = hi;
        self.consistent
    }

    pub(crate) fn is_consistent(&self) -> bool {
        self.consistent
    }

    /// Resolves each node to the object term of its class: the class
    /// constant where one exists, otherwise a metavariable numbered by
    /// first appearance in `nodes`.
    pub(crate) fn resolve_nodes(&mut self, nodes: &[u32]) -> Vec<ObjectTerm> {
        let mut pretty: BTreeMap<u32, u32> = BTreeMap::new();
        let mut out = Vec::with_capacity(nodes.len());
        for &node in nodes {
            let root = self.find(node);
            let term = match self.cons[root as usize] {
                Some(c) => ObjectTerm::Constant(self.const_names[c as usize].clone()),
                None => {
                    let next = pretty.len() as u32;
                    ObjectTerm::MetaVar(*pretty.entry(root).or_insert(next))
                }
            };
            out.push(term);
        }
        out
    }

    /// Endpoint nodes of a variable, looking the variable up in `env` on
    /// first use and allocating fresh metavariables otherwise.
    pub(crate) fn var_nodes(&mut self, name: &str, env: &TypeEnv) -> (u32, u32) {
        if let Some(&p) = self.vars.get(name) {
            return p;
        }
        let p = match env.get(name) {
            Some((d, c)) => {
                let (d, c) = (d.clone(), c.clone());
                (self.node_for(&d), self.node_for(&c))
            }
            None => (self.fresh(), self.fresh()),
        };
        self.vars.insert(name.to_string(), p);
        p
    }

    // -- constraint emission ------------------------------------------------

    pub(crate) fn constrain_formula(&mut self, f: &Formula, s: u32, e: u32, env: &TypeEnv) {
        match f {
            Formula::Atom(x) => {
                let (n, m) = self.var_nodes(x, env);
                self.unify(s, n);
                self.unify(e, m);
            }
            Formula::Dual(x) => {
                let (n, m) = self.var_nodes(x, env);
                self.unify(s, m);
                self.unify(e, n);
            }
            Formula::One | Formula::Bot => {
                self.unify(s, e);
            }
            Formula::Zero | Formula::Top => {}
            Formula::Tensor(a, b) | Formula::Par(a, b) => {
                let t = self.fresh();
                self.constrain_formula(a, s, t, env);
                self.constrain_formula(b, t, e, env);
            }
            Formula::Plus(a, b) | Formula::With(a, b) => {
                self.constrain_formula(a, s, e, env);
                self.constrain_formula(b, s, e, env);
            }
        }
    }

    pub(crate) fn constrain_ka(&mut self, t: &KaTerm, s: u32, e: u32, env: &TypeEnv) {
        match t {
            KaTerm::Var(x) => {
                let (n, m) = self.var_nodes(x, env);
                self.unify(s, n);
                self.unify(e, m);
            }
            KaTerm::One => {
                self.unify(s, e);
            }
            KaTerm::Zero => {}
            KaTerm::Dot(a, b) => {
                let mid = self.fresh();
                self.constrain_ka(a, s, mid, env);
                self.constrain_ka(b, mid, e, env);
            }
            KaTerm::Plus(a, b) => {
                self.constrain_ka(a, s, e, env);
                self.constrain_ka(b, s, e, env);
            }
            KaTerm::Star(a) => {
                self.unify(s, e);
                self.constrain_ka(a, s, e, env);
            }
        }
    }

    pub(crate) fn constrain_rm(&mut self, t: &RmTerm, s: u32, e: u32, env: &TypeEnv) {
        match t {
            RmTerm::Var(x) => {
                let (n, m) = self.var_nodes(x, env);
                self.unify(s, n);
                self.unify(e, m);
            }
            RmTerm::Unit => {
                self.unify(s, e);
            }
            RmTerm::Top | RmTerm::Zero => {}
            RmTerm::Dot(a, b) => {
                let mid = self.fresh();
                self.constrain_rm(a, s, mid, env);
                self.constrain_rm(b, mid, e, env);
            }
            // a \ b : s -> e needs a : p -> s and b : p -> e.
            RmTerm::LDiv(a, b) => {
                let p = self.fresh();
                self.constrain_rm(a, p, s, env);
                self.constrain_rm(b, p, e, env);
            }
            // a / b : s -> e needs a : s -> q and b : e -> q.
            RmTerm::RDiv(a, b) => {
                let q = self.fresh();
                self.constrain_rm(a, s, q, env);
                self.constrain_rm(b, e, q, env);
            }
            RmTerm::Join(a, b) | RmTerm::Meet(a, b) => {
                self.constrain_rm(a, s, e, env);
                self.constrain_rm(b, s, e, env);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Mgu
// ---------------------------------------------------------------------------

/// The result of inference: a partition of endpoint nodes, the designated
/// start/end classes of the inferred thing, the endpoint classes of each
/// variable, and a consistency flag.
///
/// Classes are reported as [`ObjectTerm`]s: the class constant where one
/// exists, otherwise a metavariable numbered by first appearance (start,
/// end, boundaries left to right, then variables in name order), so the
/// rendering of an `Mgu` is deterministic.
#[derive(Debug, Clone)]
pub struct Mgu {
    session: Session,
    start: u32,
    end: u32,
    boundaries: Vec<u32>,
    pretty: BTreeMap<u32, u32>,
}

impl Mgu {
    fn freeze(mut session: Session, start: u32, end: u32, boundaries: Vec<u32>) -> Mgu {
        let mut pretty = BTreeMap::new();
        let mut next = 0u32;
        let mut visit = |session: &mut Session, pretty: &mut BTreeMap<u32, u32>, node: u32| {
            let root = session.find(node);
            if session.cons[root as usize].is_none() && !pretty.contains_key(&root) {
                pretty.insert(root, next);
                next += 1;
            }
        };
        visit(&mut session, &mut pretty, start);
        visit(&mut session, &mut pretty, end);
        for &b in &boundaries {
            visit(&mut session, &mut pretty, b);
        }
        let var_nodes: Vec<(u32, u32)> = session.vars.values().copied().collect();
        for (d, c) in var_nodes {
            visit(&mut session, &mut pretty, d);
            visit(&mut session, &mut pretty, c);
        }
        Mgu { session, start, end, boundaries, pretty }
    }

    fn resolve_node(&self, node: u32) -> ObjectTerm {
        // Paths were compressed while freezing, but a plain walk keeps this
        // correct even for nodes never touched there.
        let mut root = node;
        while self.session.parent[root as usize] != root {
            root = self.session.parent[root as usize];
        }
        match self.session.cons[root as usize] {
            Some(c) => ObjectTerm::Constant(self.session.const_names[c as usize].clone()),
            None => match self.pretty.get(&root) {
                Some(&k) => ObjectTerm::MetaVar(k),
                None => ObjectTerm::MetaVar(u32::MAX), // unreachable for reported nodes
            },
        }
    }

    fn root(&self, node: u32) -> u32 {
        let mut root = node;
        while self.session.parent[root as usize] != root {
            root = self.session.parent[root as usize];
        }
        root
    }

    /// Did every unification succeed (no two distinct constants merged)?
    pub fn is_consistent(&self) -> bool {
        self.session.consistent
    }

    /// The class of the start endpoint.
    pub fn start(&self) -> ObjectTerm {
        self.resolve_node(self.start)
    }

    /// The class of the end endpoint.
    pub fn end(&self) -> ObjectTerm {
        self.resolve_node(self.end)
    }

    /// Number of boundary endpoints (sequent items + 1; 2 for terms).
    pub fn boundary_count(&self) -> usize {
        self.boundaries.len()
    }

    /// The class of the `i`-th boundary endpoint.
    pub fn boundary(&self, i: usize) -> ObjectTerm {
        self.resolve_node(self.boundaries[i])
    }

    /// The endpoint classes of a variable seen during inference.
    pub fn var_endpoints(&self, name: &str) -> Option<(ObjectTerm, ObjectTerm)> {
        let &(d, c) = self.session.vars.get(name)?;
        Some((self.resolve_node(d), self.resolve_node(c)))
    }

    /// All variables seen during inference, in name order, with their
    /// endpoint classes.
    pub fn variables(&self) -> impl Iterator<Item = (&str, ObjectTerm, ObjectTerm)> {
        self.session
            .vars
            .iter()
            .map(|(name, &(d, c))| (name.as_str(), self.resolve_node(d), self.resolve_node(c)))
    }

    /// Do the start and end endpoints fall in the same class?
    pub fn square(&self) -> bool {
        self.root(self.start) == self.root(self.end)
    }
}

/// Is the inferred most-general type square — consistent, with one class
/// containing both the start and the end endpoint?
pub fn is_square(mgu: &Mgu) -> bool {
    mgu.is_consistent() && mgu.square()
}

// ---------------------------------------------------------------------------
// Inference entry points
// ---------------------------------------------------------------------------

/// Infer the most general type of a cyclic sequent read as a composite:
/// boundaries `b0 .. bk`, item `i` typed `b_i -> b_{i+1}`, the sequent
/// typed `b0 -> bk`.
///
/// The empty sequent has a single boundary, so its type is square by
/// construction.
pub fn infer_sequent(seq: &Sequent, env: &TypeEnv) -> Mgu {
    let mut session = Session::new();
    let mut boundaries = Vec::with_capacity(seq.len() + 1);
    boundaries.push(session.fresh());
    for (i, item) in seq.items().iter().enumerate() {
        let next = session.fresh();
        let s = boundaries[i];
        session.constrain_formula(item, s, next, env);
        boundaries.push(next);
    }
    let start = boundaries[0];
    let end = *boundaries.last().unwrap();
    Mgu::freeze(session, start, end, boundaries)
}

/// Infer the most general type of a Kleene algebra term.
pub fn infer_ka(t: &KaTerm, env: &TypeEnv) -> Mgu {
    let mut session = Session::new();
    let s = session.fresh();
    let e = session.fresh();
    session.constrain_ka(t, s, e, env);
    Mgu::freeze(session, s, e, vec![s, e])
}

/// Infer the most general type of a residuated term.
pub fn infer_rm(t: &RmTerm, env: &TypeEnv) -> Mgu {
    let mut session = Session::new();
    let s = session.fresh();
    let e = session.fresh();
    session.constrain_rm(t, s, e, env);
    Mgu::freeze(session, s, e, vec![s, e])
}

/// Check a formula against a concrete type `n -> m` under `env`.
///
/// `env` must bind every variable of `f`; the result is whether the
/// typing constraints are consistent once the formula's endpoints are
/// pinned to `n` and `m`.  Agrees with [`infer_sequent`] on the singleton
/// sequent `[f]` after unifying its endpoints with `n` and `m`.
pub fn check_formula(
    f: &Formula,
    env: &TypeEnv,
    n: &ObjectTerm,
    m: &ObjectTerm,
) -> Result<bool, TypecheckError> {
    let mut unbound = None;
    f.for_each_var(&mut |x| {
        if unbound.is_none() && env.get(x).is_none() {
            unbound = Some(x.to_string());
        }
    });
    if let Some(x) = unbound {
        return Err(TypecheckError::UnboundVariable(x));
    }
    let mut session = Session::new();
    let s = session.fresh();
    let e = session.fresh();
    let ns = session.node_for(n);
    let ms = session.node_for(m);
    session.unify(s, ns);
    session.unify(e, ms);
    session.constrain_formula(f, s, e, env);
    Ok(session.is_consistent())
}

/// Check a Kleene algebra term against a concrete type `n -> m` under
/// `env`.  Variables without a binding stay polymorphic.
pub fn check_ka(t: &KaTerm, env: &TypeEnv, n: &ObjectTerm, m: &ObjectTerm) -> bool {
    let mut session = Session::new();
    let s = session.fresh();
    let e = session.fresh();
    let ns = session.node_for(n);
    let ms = session.node_for(m);
    session.unify(s, ns);
    session.unify(e, ms);
    session.constrain_ka(t, s, e, env);
    session.is_consistent()
}

/// Check a residuated term against a concrete type `n -> m` under `env`.
pub fn check_rm(t: &RmTerm, env: &TypeEnv, n: &ObjectTerm, m: &ObjectTerm) -> bool {
    let mut session = Session::new();
    let s = session.fresh();
    let e = session.fresh();
    let ns = session.node_for(n);
    let ms = session.node_for(m);
    session.unify(s, ns);
    session.unify(e, ms);
    session.constrain_rm(t, s, e, env);
    session.is_consistent()
}

/// The most general endpoints of a *strict* term — one that does not
/// collapse to `0` under [`crate::kleene::clean`].
///
/// Returns `None` for non-strict terms and for terms whose constraints
/// are inconsistent under `env`.
pub fn type_of_strict(t: &KaTerm, env: &TypeEnv) -> Option<(ObjectTerm, ObjectTerm)> {
    if !is_strict(t) {
        return None;
    }
    let mgu = infer_ka(t, env);
    if !mgu.is_consistent() {
        return None;
    }
    Some((mgu.start(), mgu.end()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Formula as F;

    fn env_xy() -> TypeEnv {
        let mut env = TypeEnv::new();
        env.bind("x", ObjectTerm::constant("n"), ObjectTerm::constant("m"));
        env.bind("y", ObjectTerm::constant("m"), ObjectTerm::constant("n"));
        env
    }

    #[test]
    fn axiom_sequent_is_square() {
        let seq = Sequent(vec![F::dual("x"), F::atom("x")]);
        let mgu = infer_sequent(&seq, &TypeEnv::new());
        assert!(mgu.is_consistent());
        assert!(is_square(&mgu));
        // Start and end both sit at x's codomain class.
        let (_, cod) = mgu.var_endpoints("x").unwrap();
        assert_eq!(mgu.start(), cod);
    }

    #[test]
    fn single_variable_is_not_square() {
        let mgu = infer_sequent(&Sequent(vec![F::atom("x")]), &TypeEnv::new());
        assert!(mgu.is_consistent());
        assert!(!is_square(&mgu));
        assert_ne!(mgu.start(), mgu.end());
    }

    #[test]
    fn empty_sequent_is_square_by_construction() {
        let mgu = infer_sequent(&Sequent::new(), &TypeEnv::new());
        assert!(is_square(&mgu));
        assert_eq!(mgu.boundary_count(), 1);
    }

    #[test]
    fn environment_constants_pin_classes() {
        let seq = Sequent(vec![F::atom("x"), F::atom("y")]);
        let mgu = infer_sequent(&seq, &env_xy());
        assert!(mgu.is_consistent());
        assert!(is_square(&mgu));
        assert_eq!(mgu.start(), ObjectTerm::constant("n"));
        assert_eq!(mgu.end(), ObjectTerm::constant("n"));
        assert_eq!(mgu.boundary(1), ObjectTerm::constant("m"));

        // An incompatible environment turns the same sequent inconsistent.
        let mut bad = TypeEnv::new();
        bad.bind("x", ObjectTerm::constant("n"), ObjectTerm::constant("m"));
        bad.bind("y", ObjectTerm::constant("p"), ObjectTerm::constant("q"));
        let mgu = infer_sequent(&seq, &bad);
        assert!(!mgu.is_consistent());
        assert!(!is_square(&mgu));
    }

    #[test]
    fn units_bend_the_ring_together() {
        // x, 1, ~x : the unit forces x's codomain boundary to meet itself.
        let seq = Sequent(vec![F::atom("x"), F::One, F::dual("x")]);
        let mgu = infer_sequent(&seq, &TypeEnv::new());
        assert!(is_square(&mgu));
    }

    #[test]
    fn additive_constants_leave_endpoints_free() {
        // ~x * top, ~y, top * x — square even though y floats free.
        let seq = Sequent(vec![
            F::tensor(F::dual("x"), F::Top),
            F::dual("y"),
            F::tensor(F::Top, F::atom("x")),
        ]);
        let mgu = infer_sequent(&seq, &TypeEnv::new());
        assert!(mgu.is_consistent());
        assert!(is_square(&mgu), "start {:?} end {:?}", mgu.start(), mgu.end());
        // y's endpoints stay unconstrained metavariables.
        let (d, c) = mgu.var_endpoints("y").unwrap();
        assert!(matches!(d, ObjectTerm::MetaVar(_)));
        assert!(matches!(c, ObjectTerm::MetaVar(_)));
        assert_ne!(d, c);
    }

    #[test]
    fn metavariable_bindings_link_variables() {
        let mut env = TypeEnv::new();
        env.bind("x", ObjectTerm::MetaVar(0), ObjectTerm::MetaVar(1));
        env.bind("y", ObjectTerm::MetaVar(1), ObjectTerm::MetaVar(0));
        let seq = Sequent(vec![F::atom("x"), F::atom("y")]);
        let mgu = infer_sequent(&seq, &env);
        assert!(is_square(&mgu));
    }

    #[test]
    fn ka_star_forces_square() {
        let t = KaTerm::star(KaTerm::dot(KaTerm::Var("x".into()), KaTerm::Var("y".into())));
        let mgu = infer_ka(&t, &env_xy());
        assert!(mgu.is_consistent());
        assert!(is_square(&mgu));
        assert_eq!(mgu.start(), ObjectTerm::constant("n"));

        // x.x at n->m with n != m is inconsistent.
        let t = KaTerm::dot(KaTerm::Var("x".into()), KaTerm::Var("x".into()));
        let mgu = infer_ka(&t, &env_xy());
        assert!(!mgu.is_consistent());
    }

    #[test]
    fn ka_zero_is_unconstrained() {
        let mgu = infer_ka(&KaTerm::Zero, &TypeEnv::new());
        assert!(mgu.is_consistent());
        assert!(!is_square(&mgu));
    }

    #[test]
    fn rm_division_typing() {
        // top \ x : with x : n -> m the division is typed ? -> m... more
        // precisely a \ b : p -> m where a : q -> p, b : q -> m.
        let mut env = TypeEnv::new();
        env.bind("x", ObjectTerm::constant("n"), ObjectTerm::constant("m"));
        let t = RmTerm::ldiv(RmTerm::var("x"), RmTerm::var("x"));
        let mgu = infer_rm(&t, &env);
        assert!(mgu.is_consistent());
        // x \ x : m -> m.
        assert_eq!(mgu.start(), ObjectTerm::constant("m"));
        assert_eq!(mgu.end(), ObjectTerm::constant("m"));
        assert!(is_square(&mgu));

        let t = RmTerm::rdiv(RmTerm::var("x"), RmTerm::var("x"));
        let mgu = infer_rm(&t, &env);
        // x / x : n -> n.
        assert_eq!(mgu.start(), ObjectTerm::constant("n"));
        assert!(is_square(&mgu));
    }

    #[test]
    fn check_formula_agrees_with_infer_on_singletons() {
        let env = env_xy();
        let n = ObjectTerm::constant("n");
        let m = ObjectTerm::constant("m");
        let f = F::tensor(F::atom("x"), F::atom("y"));
        // x * y : n -> n, so checking at n -> n succeeds and n -> m fails.
        assert_eq!(check_formula(&f, &env, &n, &n), Ok(true));
        assert_eq!(check_formula(&f, &env, &n, &m), Ok(false));
        assert_eq!(
            check_formula(&F::atom("z"), &env, &n, &m),
            Err(TypecheckError::UnboundVariable("z".into()))
        );
    }

    #[test]
    fn check_ka_polymorphic_variables() {
        let n = ObjectTerm::constant("n");
        let m = ObjectTerm::constant("m");
        // Unbound x can be typed anywhere...
        assert!(check_ka(&KaTerm::Var("x".into()), &TypeEnv::new(), &n, &m));
        // ...but x.x at n -> m still fails: the midpoint can't be both.
        let t = KaTerm::dot(KaTerm::Var("x".into()), KaTerm::Var("x".into()));
        assert!(!check_ka(&t, &TypeEnv::new(), &n, &m));
        assert!(check_ka(&t, &TypeEnv::new(), &n, &n));
    }

    #[test]
    fn type_of_strict_examples() {
        let env = env_xy();
        // x.0.x is not strict.
        let t = KaTerm::dot(
            KaTerm::Var("x".into()),
            KaTerm::dot(KaTerm::Zero, KaTerm::Var("x".into())),
        );
        assert_eq!(type_of_strict(&t, &env), None);
        // x is strict with endpoints n -> m.
        assert_eq!(
            type_of_strict(&KaTerm::Var("x".into()), &env),
            Some((ObjectTerm::constant("n"), ObjectTerm::constant("m")))
        );
        // x.x is strict but inconsistent under this environment.
        let t = KaTerm::dot(KaTerm::Var("x".into()), KaTerm::Var("x".into()));
        assert_eq!(type_of_strict(&t, &env), None);
        // Without an environment the endpoints are metavariables, numbered
        // deterministically.
        let got = type_of_strict(&KaTerm::Var("x".into()), &TypeEnv::new()).unwrap();
        assert_eq!(got, (ObjectTerm::MetaVar(0), ObjectTerm::MetaVar(1)));
    }

    #[test]
    fn inference_is_deterministic() {
        let seq = Sequent(vec![
            F::par(F::atom("a"), F::dual("b")),
            F::tensor(F::atom("b"), F::Top),
            F::atom("c"),
        ]);
        let a = infer_sequent(&seq, &TypeEnv::new());
        let b = infer_sequent(&seq, &TypeEnv::new());
        assert_eq!(format!("{:?}", a.start()), format!("{:?}", b.start()));
        let render = |m: &Mgu| {
            m.variables()
                .map(|(x, d, c)| format!("{x}:{d}->{c}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        assert_eq!(render(&a), render(&b));
    }
}
