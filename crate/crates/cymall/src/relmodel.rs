//! Finite heterogeneous relational models.
//!
//! A model assigns every object a finite carrier and every variable a
//! relation between two carriers.  Terms then denote relations: `.` is
//! relational composition, `1` the identity, `top`/`0` the full and empty
//! relations, `\/`/`/\` union and intersection, and the divisions are the
//! residuals — `a \ b` is the largest `c` with `a . c <= b`, `a / b` the
//! largest `c` with `c . b <= a`.  Iteration `*` is reflexive-transitive
//! closure.
//!
//! Evaluation is type-directed.  Constants like `1` and `top` do not
//! determine their own carriers, so the evaluator first computes the most
//! general endpoint classes of the whole term (jointly with the
//! valuation's endpoint assignment) and requires the classes to resolve to
//! named carriers; only then does it fold the term bottom-up.  A class
//! left free is reported as a [`ModelError::TypeMismatch`] naming the
//! subterm — except in the iteration language, where an *interior* free
//! class can only be fenced off by `0`-denoting subterms, making the
//! result independent of the carrier chosen for it; such classes evaluate
//! over a reserved empty carrier instead of failing.  Division terms have
//! no such luck: `top` makes the choice observable (composing through an
//! empty middle carrier kills a relation that a nonempty one would keep),
//! so there the evaluator stays strict.
//!
//! [`search_counterexample`] enumerates valuations exhaustively, in a
//! documented deterministic order, looking for one where a containment
//! fails — including, when asked, valuations with *empty* carriers, which
//! is exactly where some containments provable in the sequent calculus
//! stop holding.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::kleene::KaTerm;
use crate::logic::RmTerm;
use crate::typecheck::{ObjectTerm, Session, TypeEnv};

/// A named finite carrier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Carrier {
    pub name: String,
    pub size: usize,
}

impl Carrier {
    pub fn new(name: &str, size: usize) -> Carrier {
        Carrier {
            name: name.to_string(),
            size,
        }
    }
}

/// Ways a model construction or evaluation can fail.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ModelError {
    /// Carriers are represented as bit rows; 64 elements is the ceiling.
    #[error("carrier `{name}` has {size} elements; at most 64 are supported")]
    CarrierTooLarge { name: String, size: usize },
    /// A relation literal mentioned a pair outside its carriers.
    #[error("pair ({i}, {j}) lies outside {dom} x {cod}")]
    PairOutOfRange {
        i: usize,
        j: usize,
        dom: String,
        cod: String,
    },
    /// A carrier or relation was registered twice, inconsistently.
    #[error("`{name}` is already defined with different carriers or size")]
    CarrierMismatch { name: String },
    /// A term variable has no relation in the valuation.
    #[error("variable `{name}` has no relation in the valuation")]
    UnboundVariable { name: String },
    /// An endpoint object is not a carrier of the valuation.
    #[error("object `{name}` has no carrier in the valuation")]
    UnknownObject { name: String },
    /// The term (or containment) does not admit a concrete typing over
    /// the valuation's carriers; the offending subterm is quoted.
    #[error("`{subterm}` has no concrete type under the valuation")]
    TypeMismatch { subterm: String },
    /// Exhaustive search enumerates each relation as a bit counter and
    /// supports at most 63 bits per relation.
    #[error("relation for `{var}` would need {bits} bits; the search supports at most 63")]
    SearchSpaceTooLarge { var: String, bits: usize },
}

fn row_mask(width: usize) -> u64 {
    match width {
        0 => 0,
        64 => !0,
        w => (1u64 << w) - 1,
    }
}

/// A relation between two carriers, one bit row per domain element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rel {
    dom: Carrier,
    cod: Carrier,
    rows: Vec<u64>,
}

impl Rel {
    fn check(c: &Carrier) -> Result<(), ModelError> {
        if c.size > 64 {
            return Err(ModelError::CarrierTooLarge {
                name: c.name.clone(),
                size: c.size,
            });
        }
        Ok(())
    }

    /// The empty relation.
    pub fn empty(dom: Carrier, cod: Carrier) -> Result<Rel, ModelError> {
        Rel::check(&dom)?;
        Rel::check(&cod)?;
        let rows = vec![0; dom.size];
        Ok(Rel { dom, cod, rows })
    }

    /// The full relation.
    pub fn full(dom: Carrier, cod: Carrier) -> Result<Rel, ModelError> {
        let mut r = Rel::empty(dom, cod)?;
        let mask = row_mask(r.cod.size);
        for row in &mut r.rows {
            *row = mask;
        }
        Ok(r)
    }

    /// The identity relation on one carrier.
    pub fn identity(c: Carrier) -> Result<Rel, ModelError> {
        let mut r = Rel::empty(c.clone(), c)?;
        for (i, row) in r.rows.iter_mut().enumerate() {
            *row = 1u64 << i;
        }
        Ok(r)
    }

    /// A relation from an explicit pair list.
    pub fn from_pairs(
        dom: Carrier,
        cod: Carrier,
        pairs: &[(usize, usize)],
    ) -> Result<Rel, ModelError> {
        let mut r = Rel::empty(dom, cod)?;
        for &(i, j) in pairs {
            if i >= r.dom.size || j >= r.cod.size {
                return Err(ModelError::PairOutOfRange {
                    i,
                    j,
                    dom: r.dom.name.clone(),
                    cod: r.cod.name.clone(),
                });
            }
            r.rows[i] |= 1u64 << j;
        }
        Ok(r)
    }

    pub fn dom(&self) -> &Carrier {
        &self.dom
    }

    pub fn cod(&self) -> &Carrier {
        &self.cod
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i < self.dom.size && j < self.cod.size && self.rows[i] >> j & 1 == 1
    }

    /// All pairs in row-major order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, &row) in self.rows.iter().enumerate() {
            let mut bits = row;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                out.push((i, j));
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    /// Relational composition.  Panics if the middle carriers differ;
    /// type-directed evaluation guarantees they do not.
    pub fn compose(&self, other: &Rel) -> Rel {
        assert_eq!(self.cod, other.dom, "compose: middle carriers differ");
        let mut out = Rel {
            dom: self.dom.clone(),
            cod: other.cod.clone(),
            rows: vec![0; self.dom.size],
        };
        for (i, &row) in self.rows.iter().enumerate() {
            let mut bits = row;
            while bits != 0 {
                let k = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                out.rows[i] |= other.rows[k];
            }
        }
        out
    }

    /// Pointwise union.  Panics if the carriers differ.
    pub fn union(&self, other: &Rel) -> Rel {
        assert_eq!((&self.dom, &self.cod), (&other.dom, &other.cod));
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a | b)
            .collect();
        Rel {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            rows,
        }
    }

    /// Pointwise intersection.  Panics if the carriers differ.
    pub fn intersect(&self, other: &Rel) -> Rel {
        assert_eq!((&self.dom, &self.cod), (&other.dom, &other.cod));
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a & b)
            .collect();
        Rel {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            rows,
        }
    }

    /// Left residual `self \ other`: the largest `c` with
    /// `self . c <= other`.  Both relations must share their domain;
    /// `(i, j)` is in the result iff every `k` related to `i` by `self`
    /// is related to `j` by `other`.  When the shared domain is empty the
    /// condition is vacuous and the result is full.
    pub fn ldiv(&self, other: &Rel) -> Rel {
        assert_eq!(self.dom, other.dom, "ldiv: domains differ");
        let mut out = Rel {
            dom: self.cod.clone(),
            cod: other.cod.clone(),
            rows: vec![row_mask(other.cod.size); self.cod.size],
        };
        for (k, &row) in self.rows.iter().enumerate() {
            let mut bits = row;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                out.rows[i] &= other.rows[k];
            }
        }
        out
    }

    /// Right residual `self / other`: the largest `c` with
    /// `c . other <= self`.  Both relations must share their codomain;
    /// `(i, j)` is in the result iff everything `j` reaches through
    /// `other` is reached by `i` through `self`.
    pub fn rdiv(&self, other: &Rel) -> Rel {
        assert_eq!(self.cod, other.cod, "rdiv: codomains differ");
        let mut out = Rel {
            dom: self.dom.clone(),
            cod: other.dom.clone(),
            rows: vec![0; self.dom.size],
        };
        for i in 0..self.dom.size {
            for j in 0..other.dom.size {
                if other.rows[j] & !self.rows[i] == 0 {
                    out.rows[i] |= 1u64 << j;
                }
            }
        }
        out
    }

    /// Reflexive-transitive closure of a square relation, by iterated
    /// squaring of `identity ∪ self`.
    pub fn star(&self) -> Rel {
        assert_eq!(self.dom, self.cod, "star: relation is not square");
        let mut s = self.clone();
        for (i, row) in s.rows.iter_mut().enumerate() {
            *row |= 1u64 << i;
        }
        loop {
            let next = s.compose(&s);
            if next == s {
                return s;
            }
            s = next;
        }
    }

    /// Containment.  Panics if the carriers differ.
    pub fn le(&self, other: &Rel) -> bool {
        assert_eq!((&self.dom, &self.cod), (&other.dom, &other.cod));
        self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }
}

/// Renders as the pair set, row-major: `{(0,0), (1,2)}`.
impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, (i, j)) in self.pairs().into_iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({i},{j})")?;
        }
        f.write_str("}")
    }
}

/// Carriers plus one relation per variable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation {
    carriers: BTreeMap<String, usize>,
    rels: BTreeMap<String, Rel>,
}

impl Valuation {
    pub fn new() -> Valuation {
        Valuation::default()
    }

    /// Registers a carrier.  Re-registering is fine if the size agrees.
    pub fn set_carrier(&mut self, name: &str, size: usize) -> Result<(), ModelError> {
        Rel::check(&Carrier::new(name, size))?;
        match self.carriers.get(name) {
            Some(&old) if old != size => Err(ModelError::CarrierMismatch {
                name: name.to_string(),
            }),
            _ => {
                self.carriers.insert(name.to_string(), size);
                Ok(())
            }
        }
    }

    /// Assigns a relation to a variable, registering its carriers.
    /// Reassigning a variable or contradicting a known carrier fails.
    pub fn set_rel(&mut self, var: &str, rel: Rel) -> Result<(), ModelError> {
        if self.rels.contains_key(var) {
            return Err(ModelError::CarrierMismatch {
                name: var.to_string(),
            });
        }
        self.set_carrier(&rel.dom.name, rel.dom.size)?;
        self.set_carrier(&rel.cod.name, rel.cod.size)?;
        self.rels.insert(var.to_string(), rel);
        Ok(())
    }

    pub fn carrier(&self, name: &str) -> Option<Carrier> {
        self.carriers.get(name).map(|&size| Carrier {
            name: name.to_string(),
            size,
        })
    }

    pub fn rel(&self, var: &str) -> Option<&Rel> {
        self.rels.get(var)
    }

    pub fn carriers(&self) -> impl Iterator<Item = Carrier> + '_ {
        self.carriers.iter().map(|(name, &size)| Carrier {
            name: name.clone(),
            size,
        })
    }

    pub fn rels(&self) -> impl Iterator<Item = (&str, &Rel)> {
        self.rels.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// The endpoint assignment induced by the relations: each variable is
    /// typed by the carrier names of its relation.
    pub fn type_env(&self) -> TypeEnv {
        let mut env = TypeEnv::new();
        for (var, rel) in &self.rels {
            env.bind(
                var,
                ObjectTerm::constant(&rel.dom.name),
                ObjectTerm::constant(&rel.cod.name),
            );
        }
        env
    }
}

/// Renders carriers then relations, each on one line, sorted by name.
impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, size) in &self.carriers {
            writeln!(f, "carrier {name} = {size}")?;
        }
        for (var, rel) in &self.rels {
            writeln!(f, "rel {var} : {} -> {} = {rel}", rel.dom.name, rel.cod.name)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------
// Type-directed evaluation.
// ---------------------------------------------------------------------

/// A term shape generic over the two term languages, so the annotation
/// and evaluation walks can be written once.
enum Shape<'t, T> {
    Var(&'t str),
    /// `1` in both languages: the identity at a square type.
    Unit,
    /// `top` — full relation, any type.
    Top,
    /// `0` — empty relation, any type.
    Zero,
    Dot(&'t T, &'t T),
    LDiv(&'t T, &'t T),
    RDiv(&'t T, &'t T),
    Join(&'t T, &'t T),
    Meet(&'t T, &'t T),
    Star(&'t T),
}

trait ModelTerm: Sized + fmt::Display {
    fn shape(&self) -> Shape<'_, Self>;

    /// Whether a free interior endpoint class is harmless.  True only when
    /// the language cannot observe the carrier chosen for such a class:
    /// without `top`, every span bordering a free class denotes the empty
    /// relation (see the module docs), so any choice — in particular the
    /// empty carrier — yields the same result.  Root endpoints are always
    /// required to resolve, since they type the result itself.
    const FREE_INTERIOR_IS_INERT: bool;
}

impl ModelTerm for RmTerm {
    const FREE_INTERIOR_IS_INERT: bool = false;

    fn shape(&self) -> Shape<'_, RmTerm> {
        match self {
            RmTerm::Var(x) => Shape::Var(x),
            RmTerm::Unit => Shape::Unit,
            RmTerm::Top => Shape::Top,
            RmTerm::Zero => Shape::Zero,
            RmTerm::Dot(a, b) => Shape::Dot(a, b),
            RmTerm::LDiv(a, b) => Shape::LDiv(a, b),
            RmTerm::RDiv(a, b) => Shape::RDiv(a, b),
            RmTerm::Join(a, b) => Shape::Join(a, b),
            RmTerm::Meet(a, b) => Shape::Meet(a, b),
        }
    }
}

impl ModelTerm for KaTerm {
    const FREE_INTERIOR_IS_INERT: bool = true;

    fn shape(&self) -> Shape<'_, KaTerm> {
        match self {
            KaTerm::Var(x) => Shape::Var(x),
            KaTerm::One => Shape::Unit,
            KaTerm::Zero => Shape::Zero,
            KaTerm::Dot(a, b) => Shape::Dot(a, b),
            KaTerm::Plus(a, b) => Shape::Join(a, b),
            KaTerm::Star(a) => Shape::Star(a),
        }
    }
}

/// One annotated subterm: the term and its endpoint nodes, in preorder.
struct Span<'t, T> {
    term: &'t T,
    s: u32,
    e: u32,
}

/// Emits the endpoint constraints of `t` at `(s, e)` into the session,
/// mirroring the type inference module, and records each subterm's
/// endpoint nodes in preorder.  The first subterm whose own constraints
/// break consistency is recorded in `broken`.
fn annotate<'t, T: ModelTerm>(
    t: &'t T,
    s: u32,
    e: u32,
    session: &mut Session,
    env: &TypeEnv,
    spans: &mut Vec<Span<'t, T>>,
    broken: &mut Option<String>,
) {
    spans.push(Span { term: t, s, e });
    match t.shape() {
        Shape::Var(x) => {
            let (vs, ve) = session.var_nodes(x, env);
            session.unify(s, vs);
            session.unify(e, ve);
        }
        Shape::Unit => {
            session.unify(s, e);
        }
        Shape::Top | Shape::Zero => {}
        Shape::Dot(a, b) => {
            let m = session.fresh();
            annotate(a, s, m, session, env, spans, broken);
            annotate(b, m, e, session, env, spans, broken);
            return;
        }
        Shape::LDiv(a, b) => {
            // `a \ b` at `(s, e)`: `a` runs from a shared pivot to `s`,
            // `b` from the pivot to `e`.
            let p = session.fresh();
            annotate(a, p, s, session, env, spans, broken);
            annotate(b, p, e, session, env, spans, broken);
            return;
        }
        Shape::RDiv(a, b) => {
            // `a / b` at `(s, e)`: `a` from `s` to a shared pivot, `b`
            // from `e` to the pivot.
            let q = session.fresh();
            annotate(a, s, q, session, env, spans, broken);
            annotate(b, e, q, session, env, spans, broken);
            return;
        }
        Shape::Join(a, b) | Shape::Meet(a, b) => {
            annotate(a, s, e, session, env, spans, broken);
            annotate(b, s, e, session, env, spans, broken);
            return;
        }
        Shape::Star(a) => {
            session.unify(s, e);
            if broken.is_none() && !session.is_consistent() {
                *broken = Some(t.to_string());
            }
            annotate(a, s, e, session, env, spans, broken);
            return;
        }
    }
    if broken.is_none() && !session.is_consistent() {
        *broken = Some(t.to_string());
    }
}

/// A resolved span endpoint: a named object, or a free interior class in a
/// language where that is inert (see [`ModelTerm::FREE_INTERIOR_IS_INERT`]).
#[derive(Clone)]
enum Endpoint {
    Named(String),
    Inert,
}

/// Endpoint carriers per subterm, aligned with the `annotate` preorder.
struct ResolvedSpans<'t, T> {
    terms: Vec<&'t T>,
    carriers: Vec<(Endpoint, Endpoint)>,
}

/// Resolves annotated spans to concrete carriers; errors on the first
/// subterm with a free endpoint class, unless the language declares free
/// interior classes inert.  The root span (preorder index 0) types the
/// overall result, so its endpoints must resolve in every language.
fn resolve_spans<'t, T: ModelTerm>(
    session: &mut Session,
    spans: Vec<Span<'t, T>>,
    broken: Option<String>,
) -> Result<ResolvedSpans<'t, T>, ModelError> {
    if let Some(subterm) = broken {
        return Err(ModelError::TypeMismatch { subterm });
    }
    if !session.is_consistent() {
        // Inconsistency introduced by cross-term unification (e.g. the two
        // sides of a containment): attribute it to the first span.
        let subterm = spans
            .first()
            .map(|sp| sp.term.to_string())
            .unwrap_or_default();
        return Err(ModelError::TypeMismatch { subterm });
    }
    let mut ids = Vec::with_capacity(spans.len() * 2);
    for sp in &spans {
        ids.push(sp.s);
        ids.push(sp.e);
    }
    let resolved = session.resolve_nodes(&ids);
    let mut terms = Vec::with_capacity(spans.len());
    let mut carriers = Vec::with_capacity(spans.len());
    for (n, sp) in spans.iter().enumerate() {
        let endpoint = |t: &ObjectTerm| match t {
            ObjectTerm::Constant(name) => Ok(Endpoint::Named(name.clone())),
            ObjectTerm::MetaVar(_) if T::FREE_INTERIOR_IS_INERT && n > 0 => Ok(Endpoint::Inert),
            ObjectTerm::MetaVar(_) => Err(ModelError::TypeMismatch {
                subterm: sp.term.to_string(),
            }),
        };
        terms.push(sp.term);
        carriers.push((endpoint(&resolved[2 * n])?, endpoint(&resolved[2 * n + 1])?));
    }
    Ok(ResolvedSpans { terms, carriers })
}

/// Folds a term bottom-up, reading each subterm's carriers from the
/// resolved spans (advancing `idx` in the same preorder).
fn eval_spanned<T: ModelTerm>(
    spans: &ResolvedSpans<'_, T>,
    idx: &mut usize,
    v: &Valuation,
) -> Result<Rel, ModelError> {
    let term = spans.terms[*idx];
    let (dom_ep, cod_ep) = spans.carriers[*idx].clone();
    *idx += 1;
    let carrier = |ep: &Endpoint| match ep {
        Endpoint::Named(name) => v.carrier(name).ok_or_else(|| ModelError::UnknownObject {
            name: name.clone(),
        }),
        // A free interior class: any carrier gives the same result (the
        // spans beside it all denote empty relations), so use the least.
        Endpoint::Inert => Ok(Carrier::new("∅", 0)),
    };
    match term.shape() {
        Shape::Var(x) => {
            let rel = v.rel(x).ok_or_else(|| ModelError::UnboundVariable {
                name: x.to_string(),
            })?;
            Ok(rel.clone())
        }
        Shape::Unit => Rel::identity(carrier(&dom_ep)?),
        Shape::Top => Rel::full(carrier(&dom_ep)?, carrier(&cod_ep)?),
        Shape::Zero => Rel::empty(carrier(&dom_ep)?, carrier(&cod_ep)?),
        Shape::Dot(_, _) => {
            let a = eval_spanned(spans, idx, v)?;
            let b = eval_spanned(spans, idx, v)?;
            Ok(a.compose(&b))
        }
        Shape::LDiv(_, _) => {
            let a = eval_spanned(spans, idx, v)?;
            let b = eval_spanned(spans, idx, v)?;
            Ok(a.ldiv(&b))
        }
        Shape::RDiv(_, _) => {
            let a = eval_spanned(spans, idx, v)?;
            let b = eval_spanned(spans, idx, v)?;
            Ok(a.rdiv(&b))
        }
        Shape::Join(_, _) => {
            let a = eval_spanned(spans, idx, v)?;
            let b = eval_spanned(spans, idx, v)?;
            Ok(a.union(&b))
        }
        Shape::Meet(_, _) => {
            let a = eval_spanned(spans, idx, v)?;
            let b = eval_spanned(spans, idx, v)?;
            Ok(a.intersect(&b))
        }
        Shape::Star(_) => {
            let a = eval_spanned(spans, idx, v)?;
            Ok(a.star())
        }
    }
}

fn eval_term<T: ModelTerm>(
    t: &T,
    v: &Valuation,
    at: Option<(&ObjectTerm, &ObjectTerm)>,
) -> Result<Rel, ModelError> {
    let env = v.type_env();
    let mut session = Session::new();
    let (s, e) = match at {
        Some((n, m)) => (session.node_for(n), session.node_for(m)),
        None => (session.fresh(), session.fresh()),
    };
    let mut spans = Vec::new();
    let mut broken = None;
    annotate(t, s, e, &mut session, &env, &mut spans, &mut broken);
    let resolved = resolve_spans(&mut session, spans, broken)?;
    let mut idx = 0;
    eval_spanned(&resolved, &mut idx, v)
}

/// Evaluates a term whose endpoints are determined by its variables.
pub fn eval_rm(t: &RmTerm, v: &Valuation) -> Result<Rel, ModelError> {
    eval_term(t, v, None)
}

/// Evaluates a term at explicitly given endpoint objects — needed when the
/// term alone does not pin them (e.g. `top` or `0` at the root).
pub fn eval_rm_at(
    t: &RmTerm,
    v: &Valuation,
    n: &ObjectTerm,
    m: &ObjectTerm,
) -> Result<Rel, ModelError> {
    eval_term(t, v, Some((n, m)))
}

/// Evaluates an iteration-language term; see [`eval_rm`].
pub fn eval_ka(t: &KaTerm, v: &Valuation) -> Result<Rel, ModelError> {
    eval_term(t, v, None)
}

/// Evaluates an iteration-language term at explicit endpoints; see
/// [`eval_rm_at`].
pub fn eval_ka_at(
    t: &KaTerm,
    v: &Valuation,
    n: &ObjectTerm,
    m: &ObjectTerm,
) -> Result<Rel, ModelError> {
    eval_term(t, v, Some((n, m)))
}

/// Evaluates both sides of a containment under one joint typing — the two
/// sides share their start and end classes, so a side whose endpoints are
/// pinned only through the other (`top . R` against `S . (top \ R)`, say)
/// still evaluates.  Returns the two relations, which live over the same
/// carriers.
pub fn eval_le(lhs: &RmTerm, rhs: &RmTerm, v: &Valuation) -> Result<(Rel, Rel), ModelError> {
    let env = v.type_env();
    let mut session = Session::new();
    let s = session.fresh();
    let e = session.fresh();
    let mut spans = Vec::new();
    let mut broken = None;
    annotate(lhs, s, e, &mut session, &env, &mut spans, &mut broken);
    let lhs_spans = spans.len();
    annotate(rhs, s, e, &mut session, &env, &mut spans, &mut broken);
    let resolved = resolve_spans(&mut session, spans, broken)?;
    let left = ResolvedSpans {
        terms: resolved.terms[..lhs_spans].to_vec(),
        carriers: resolved.carriers[..lhs_spans].to_vec(),
    };
    let right = ResolvedSpans {
        terms: resolved.terms[lhs_spans..].to_vec(),
        carriers: resolved.carriers[lhs_spans..].to_vec(),
    };
    let mut idx = 0;
    let lv = eval_spanned(&left, &mut idx, v)?;
    let mut idx = 0;
    let rv = eval_spanned(&right, &mut idx, v)?;
    Ok((lv, rv))
}

/// Decides the containment `lhs <= rhs` in the model, typing both sides
/// jointly so constants shared between them agree.
pub fn check_le(lhs: &RmTerm, rhs: &RmTerm, v: &Valuation) -> Result<bool, ModelError> {
    let (lv, rv) = eval_le(lhs, rhs, v)?;
    Ok(lv.le(&rv))
}

// ---------------------------------------------------------------------
// Exhaustive counterexample search.
// ---------------------------------------------------------------------

/// Searches all valuations up to `max_size` for one where `lhs <= rhs`
/// fails, and returns the first one found.
///
/// The two sides are typed jointly under `shape` (which may be empty, or
/// may pin some variables to named objects); endpoint classes that stay
/// free are given synthesized object names `o0`, `o1`, … in order of first
/// appearance.  The enumeration order is deterministic and exhaustive:
///
/// * carrier size tuples over the objects in ascending name order, each
///   size ranging from 0 (with `allow_empty`) or 1 up to `max_size`, in
///   lexicographic order with the *last* object varying fastest;
/// * for each size tuple, relation tuples over the variables in ascending
///   name order, again last-fastest, each relation counted as a binary
///   number where bit `i * |cod| + j` is pair `(i, j)`, from empty
///   upwards.
///
/// So the returned witness is the least counterexample in this order.
pub fn search_counterexample(
    lhs: &RmTerm,
    rhs: &RmTerm,
    shape: &TypeEnv,
    max_size: usize,
    allow_empty: bool,
) -> Result<Option<Valuation>, ModelError> {
    let mut session = Session::new();
    let s = session.fresh();
    let e = session.fresh();
    let mut spans = Vec::new();
    let mut broken = None;
    annotate(lhs, s, e, &mut session, shape, &mut spans, &mut broken);
    let lhs_spans = spans.len();
    annotate(rhs, s, e, &mut session, shape, &mut spans, &mut broken);
    if broken.is_some() || !session.is_consistent() {
        let subterm = broken.unwrap_or_else(|| lhs.to_string());
        return Err(ModelError::TypeMismatch { subterm });
    }

    // Resolve every endpoint class, synthesizing names for free classes.
    let mut ids = Vec::with_capacity(spans.len() * 2);
    for sp in &spans {
        ids.push(sp.s);
        ids.push(sp.e);
    }
    let resolved = session.resolve_nodes(&ids);
    let taken: BTreeSet<String> = resolved
        .iter()
        .filter_map(|t| match t {
            ObjectTerm::Constant(name) => Some(name.clone()),
            ObjectTerm::MetaVar(_) => None,
        })
        .collect();
    let mut synth: BTreeMap<u32, String> = BTreeMap::new();
    let mut next_synth = 0usize;
    let mut names = Vec::with_capacity(resolved.len());
    for t in &resolved {
        let name = match t {
            ObjectTerm::Constant(name) => name.clone(),
            ObjectTerm::MetaVar(k) => synth
                .entry(*k)
                .or_insert_with(|| loop {
                    let cand = format!("o{next_synth}");
                    next_synth += 1;
                    if !taken.contains(&cand) {
                        break cand;
                    }
                })
                .clone(),
        };
        names.push(name);
    }

    // The objects to size, and the variables to assign.
    let objects: Vec<String> = names.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let mut vars: BTreeMap<String, (String, String)> = BTreeMap::new();
    for (n, sp) in spans.iter().enumerate() {
        if let Shape::Var(x) = sp.term.shape() {
            vars.entry(x.to_string())
                .or_insert_with(|| (names[2 * n].clone(), names[2 * n + 1].clone()));
        }
    }

    let carriers_of = |term_idx: usize| {
        (
            Endpoint::Named(names[2 * term_idx].clone()),
            Endpoint::Named(names[2 * term_idx + 1].clone()),
        )
    };
    let left = ResolvedSpans {
        terms: spans[..lhs_spans].iter().map(|sp| sp.term).collect(),
        carriers: (0..lhs_spans).map(carriers_of).collect(),
    };
    let right = ResolvedSpans {
        terms: spans[lhs_spans..].iter().map(|sp| sp.term).collect(),
        carriers: (lhs_spans..spans.len()).map(carriers_of).collect(),
    };

    let lo = usize::from(!allow_empty);
    let mut sizes = vec![lo; objects.len()];
    if objects.is_empty() || lo > max_size {
        return Ok(None);
    }
    loop {
        let size_of = |name: &str| {
            let i = objects.binary_search_by(|o| o.as_str().cmp(name)).unwrap();
            sizes[i]
        };
        // Bit widths of each variable's relation under these sizes.
        let mut widths = Vec::with_capacity(vars.len());
        for (var, (d, c)) in &vars {
            let bits = size_of(d) * size_of(c);
            if bits > 63 {
                return Err(ModelError::SearchSpaceTooLarge {
                    var: var.clone(),
                    bits,
                });
            }
            widths.push(bits);
        }
        let mut counters = vec![0u64; vars.len()];
        'rels: loop {
            let mut val = Valuation::new();
            for (i, obj) in objects.iter().enumerate() {
                val.set_carrier(obj, sizes[i])?;
            }
            for ((var, (d, c)), &counter) in vars.iter().zip(&counters) {
                let dom = Carrier::new(d, size_of(d));
                let cod = Carrier::new(c, size_of(c));
                let mut rel = Rel::empty(dom, cod)?;
                let mut bits = counter;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    rel.rows[b / rel.cod.size] |= 1u64 << (b % rel.cod.size);
                }
                val.set_rel(var, rel)?;
            }
            let mut idx = 0;
            let lv = eval_spanned(&left, &mut idx, &val)?;
            let mut idx = 0;
            let rv = eval_spanned(&right, &mut idx, &val)?;
            if !lv.le(&rv) {
                return Ok(Some(val));
            }
            // Advance the relation odometer, last variable fastest.
            let mut i = counters.len();
            loop {
                if i == 0 {
                    break 'rels;
                }
                i -= 1;
                counters[i] += 1;
                if counters[i] < 1u64 << widths[i] {
                    break;
                }
                counters[i] = 0;
            }
        }
        // Advance the size odometer, last object fastest.
        let mut i = sizes.len();
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            sizes[i] += 1;
            if sizes[i] <= max_size {
                break;
            }
            sizes[i] = lo;
        }
    }
}
