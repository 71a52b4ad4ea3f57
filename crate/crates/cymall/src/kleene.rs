//! Kleene algebra terms and decision of their equalities.
//!
//! Equality of terms is decided through regular languages: two terms are
//! equal in all Kleene algebras exactly when they denote the same
//! language.  The decision procedure builds a nondeterministic automaton
//! whose states are terms — the transitions are *partial derivatives*, a
//! set-valued refinement of word differentiation — determinises it on the
//! fly, and checks bisimilarity of the two start states with a union-find
//! (merge the pair, propagate along every letter, fail on a nullability
//! mismatch).
//!
//! Typed equality reuses the untyped decision: if both sides typecheck at
//! the same endpoints, the typed equality holds exactly when the untyped
//! one does, so [`decide_typed`] is typechecking plus [`decide_untyped`].
//! The only wrinkle is `0`-annihilation: [`clean`] normalises away the
//! subterms that `0` swallows, and a term is *strict* when it does not
//! collapse to `0` outright.

use std::collections::{BTreeSet, HashMap};

use crate::typecheck::{check_ka, ObjectTerm, TypeEnv};

/// A Kleene algebra term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KaTerm {
    /// A variable.
    Var(String),
    /// The empty sum `0`.
    Zero,
    /// The empty product `1`.
    One,
    /// Composition `a.b`.
    Dot(Box<KaTerm>, Box<KaTerm>),
    /// Sum `a + b`.
    Plus(Box<KaTerm>, Box<KaTerm>),
    /// Iteration `a*`.
    Star(Box<KaTerm>),
}

impl KaTerm {
    pub fn var(name: &str) -> KaTerm {
        KaTerm::Var(name.to_string())
    }

    pub fn dot(a: KaTerm, b: KaTerm) -> KaTerm {
        KaTerm::Dot(Box::new(a), Box::new(b))
    }

    pub fn plus(a: KaTerm, b: KaTerm) -> KaTerm {
        KaTerm::Plus(Box::new(a), Box::new(b))
    }

    pub fn star(a: KaTerm) -> KaTerm {
        KaTerm::Star(Box::new(a))
    }

    /// Number of leaves: variables and constants.
    pub fn leaf_count(&self) -> usize {
        match self {
            KaTerm::Var(_) | KaTerm::Zero | KaTerm::One => 1,
            KaTerm::Dot(a, b) | KaTerm::Plus(a, b) => a.leaf_count() + b.leaf_count(),
            KaTerm::Star(a) => a.leaf_count(),
        }
    }

    /// Call `f` on every variable name occurring in the term.
    pub fn for_each_var(&self, f: &mut impl FnMut(&str)) {
        match self {
            KaTerm::Var(x) => f(x),
            KaTerm::Zero | KaTerm::One => {}
            KaTerm::Dot(a, b) | KaTerm::Plus(a, b) => {
                a.for_each_var(f);
                b.for_each_var(f);
            }
            KaTerm::Star(a) => a.for_each_var(f),
        }
    }

    /// Does the empty word belong to the term's language?
    pub fn nullable(&self) -> bool {
        match self {
            KaTerm::Var(_) | KaTerm::Zero => false,
            KaTerm::One | KaTerm::Star(_) => true,
            KaTerm::Dot(a, b) => a.nullable() && b.nullable(),
            KaTerm::Plus(a, b) => a.nullable() || b.nullable(),
        }
    }
}

/// Normalise a term for the annihilation and unit laws of `0`:
/// `a+0 = 0+a = a`, `0.a = a.0 = 0`, `0* = 1`, applied innermost until
/// no rule applies.
///
/// The result either is literally `0` or contains no `0` at all, and it
/// denotes the same value in every Kleene algebra.  One bottom-up pass
/// suffices: the rules cannot re-create a redex above a normal subterm.
pub fn clean(t: &KaTerm) -> KaTerm {
    match t {
        KaTerm::Var(_) | KaTerm::Zero | KaTerm::One => t.clone(),
        KaTerm::Dot(a, b) => {
            let a = clean(a);
            if a == KaTerm::Zero {
                return KaTerm::Zero;
            }
            let b = clean(b);
            if b == KaTerm::Zero {
                return KaTerm::Zero;
            }
            KaTerm::dot(a, b)
        }
        KaTerm::Plus(a, b) => {
            let a = clean(a);
            let b = clean(b);
            if a == KaTerm::Zero {
                b
            } else if b == KaTerm::Zero {
                a
            } else {
                KaTerm::plus(a, b)
            }
        }
        KaTerm::Star(a) => {
            let a = clean(a);
            if a == KaTerm::Zero {
                KaTerm::One
            } else {
                KaTerm::star(a)
            }
        }
    }
}

/// Is the term strict, i.e. does it *not* collapse to `0` under
/// [`clean`]?
pub fn is_strict(t: &KaTerm) -> bool {
    clean(t) != KaTerm::Zero
}

// ---------------------------------------------------------------------------
// Partial-derivative automaton
// ---------------------------------------------------------------------------

/// State index into a [`TermNfa`].
pub type StateId = u32;

/// The nondeterministic automaton of partial derivatives of one or more
/// terms.
///
/// States are terms (interned, so equal terms share a state); the
/// transition on letter `x` from state `t` is the set of partial
/// derivatives of `t` by `x`; a state accepts when its term is nullable.
/// The state space is finite — linear in the number of variable
/// occurrences — and fully explored at construction.
#[derive(Debug, Clone)]
pub struct TermNfa {
    alphabet: Vec<String>,
    terms: Vec<KaTerm>,
    nullable: Vec<bool>,
    /// `trans[s][l]` = sorted successor states of state `s` on letter `l`.
    trans: Vec<Vec<Vec<StateId>>>,
}

impl TermNfa {
    /// Build the automaton for `roots` over the union of their variables,
    /// returning it together with the start state of each root.
    pub fn build(roots: &[&KaTerm]) -> (TermNfa, Vec<StateId>) {
        let mut letters = BTreeSet::new();
        for t in roots {
            t.for_each_var(&mut |x| {
                letters.insert(x.to_string());
            });
        }
        let alphabet: Vec<String> = letters.into_iter().collect();

        let mut nfa = TermNfa { alphabet, terms: Vec::new(), nullable: Vec::new(), trans: Vec::new() };
        let mut index: HashMap<KaTerm, StateId> = HashMap::new();
        let mut todo: Vec<StateId> = Vec::new();

        let intern = |nfa: &mut TermNfa,
                          index: &mut HashMap<KaTerm, StateId>,
                          todo: &mut Vec<StateId>,
                          t: KaTerm| {
            if let Some(&s) = index.get(&t) {
                return s;
            }
            let s = nfa.terms.len() as StateId;
            nfa.nullable.push(t.nullable());
            nfa.terms.push(t.clone());
            nfa.trans.push(Vec::new());
            index.insert(t, s);
            todo.push(s);
            s
        };

        let starts: Vec<StateId> = roots
            .iter()
            .map(|t| intern(&mut nfa, &mut index, &mut todo, (*t).clone()))
            .collect();

        while let Some(s) = todo.pop() {
            let term = nfa.terms[s as usize].clone();
            let mut rows = Vec::with_capacity(nfa.alphabet.len());
            for l in 0..nfa.alphabet.len() {
                let letter = nfa.alphabet[l].clone();
                let mut set = BTreeSet::new();
                partial_derivative(&term, &letter, &mut set);
                let row: Vec<StateId> = {
                    let mut ids: Vec<StateId> = set
                        .into_iter()
                        .map(|d| intern(&mut nfa, &mut index, &mut todo, d))
                        .collect();
                    ids.sort_unstable();
                    ids.dedup();
                    ids
                };
                rows.push(row);
            }
            nfa.trans[s as usize] = rows;
        }
        (nfa, starts)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.terms.len()
    }

    pub fn term(&self, s: StateId) -> &KaTerm {
        &self.terms[s as usize]
    }

    pub fn is_nullable(&self, s: StateId) -> bool {
        self.nullable[s as usize]
    }

    /// Successors of `s` on the `l`-th alphabet letter, sorted.
    pub fn step(&self, s: StateId, l: usize) -> &[StateId] {
        &self.trans[s as usize][l]
    }
}

/// Accumulate the partial derivatives of `t` by `letter` into `out`.
///
/// Terms denoting the empty language are dropped along the way; this only
/// shrinks the automaton, never changes the accepted language.
fn partial_derivative(t: &KaTerm, letter: &str, out: &mut BTreeSet<KaTerm>) {
    match t {
        KaTerm::Var(x) => {
            if x == letter {
                out.insert(KaTerm::One);
            }
        }
        KaTerm::Zero | KaTerm::One => {}
        KaTerm::Plus(a, b) => {
            partial_derivative(a, letter, out);
            partial_derivative(b, letter, out);
        }
        KaTerm::Dot(a, b) => {
            if **b != KaTerm::Zero {
                let mut da = BTreeSet::new();
                partial_derivative(a, letter, &mut da);
                for d in da {
                    out.insert(seq_after(d, b));
                }
            }
            if a.nullable() {
                partial_derivative(b, letter, out);
            }
        }
        KaTerm::Star(a) => {
            let mut da = BTreeSet::new();
            partial_derivative(a, letter, &mut da);
            for d in da {
                out.insert(seq_after(d, &KaTerm::Star(a.clone())));
            }
        }
    }
}

/// `d.b`, simplifying the unit so derivative terms stay small.
fn seq_after(d: KaTerm, b: &KaTerm) -> KaTerm {
    if d == KaTerm::One {
        b.clone()
    } else {
        KaTerm::dot(d, b.clone())
    }
}

// ---------------------------------------------------------------------------
// Equivalence
// ---------------------------------------------------------------------------

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new() -> UnionFind {
        UnionFind { parent: Vec::new() }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[rb as usize] = ra;
        }
    }
}

/// Decide whether two terms are equal in all Kleene algebras (equivalently,
/// whether they denote the same language).
///
/// Works over the union of the two variable sets; always terminates — the
/// determinised automaton explored on the fly is finite.
pub fn decide_untyped(a: &KaTerm, b: &KaTerm) -> bool {
    let (nfa, starts) = TermNfa::build(&[a, b]);
    let letters = nfa.alphabet().len();

    // Determinised states are sorted sets of NFA states, interned.
    let mut det_index: HashMap<Vec<StateId>, u32> = HashMap::new();
    let mut det_states: Vec<Vec<StateId>> = Vec::new();
    let mut uf = UnionFind::new();
    let intern = |det_index: &mut HashMap<Vec<StateId>, u32>,
                      det_states: &mut Vec<Vec<StateId>>,
                      uf: &mut UnionFind,
                      s: Vec<StateId>| {
        if let Some(&id) = det_index.get(&s) {
            return id;
        }
        let id = uf.make();
        det_index.insert(s.clone(), id);
        det_states.push(s);
        id
    };

    let da = intern(&mut det_index, &mut det_states, &mut uf, vec![starts[0]]);
    let db = intern(&mut det_index, &mut det_states, &mut uf, vec![starts[1]]);

    let nullable = |nfa: &TermNfa, s: &[StateId]| s.iter().any(|&q| nfa.is_nullable(q));

    let mut todo = vec![(da, db)];
    while let Some((x, y)) = todo.pop() {
        let (rx, ry) = (uf.find(x), uf.find(y));
        if rx == ry {
            continue;
        }
        if nullable(&nfa, &det_states[x as usize]) != nullable(&nfa, &det_states[y as usize]) {
            return false;
        }
        uf.union(rx, ry);
        for l in 0..letters {
            let step = |src: u32| -> Vec<StateId> {
                let mut next: Vec<StateId> = det_states[src as usize]
                    .iter()
                    .flat_map(|&q| nfa.step(q, l).iter().copied())
                    .collect();
                next.sort_unstable();
                next.dedup();
                next
            };
            let nx = step(x);
            let ny = step(y);
            let ix = intern(&mut det_index, &mut det_states, &mut uf, nx);
            let iy = intern(&mut det_index, &mut det_states, &mut uf, ny);
            todo.push((ix, iy));
        }
    }
    true
}

/// Which side of a typed equality query failed to typecheck.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Verdict of [`decide_typed`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KaVerdict {
    Equal,
    NotEqual,
    /// The named side does not typecheck at the requested endpoints
    /// (checked left first).
    IllTyped(Side),
}

/// Decide a typed equality `a = b` at type `n -> m` under `env`.
///
/// Both sides must typecheck at `n -> m`; variables not bound in `env`
/// stay polymorphic.  For well-typed sides the typed equality agrees with
/// the untyped one, so the verdict is [`decide_untyped`]'s.
pub fn decide_typed(
    a: &KaTerm,
    b: &KaTerm,
    env: &TypeEnv,
    n: &ObjectTerm,
    m: &ObjectTerm,
) -> KaVerdict {
    if !check_ka(a, env, n, m) {
        return KaVerdict::IllTyped(Side::Left);
    }
    if !check_ka(b, env, n, m) {
        return KaVerdict::IllTyped(Side::Right);
    }
    if decide_untyped(a, b) {
        KaVerdict::Equal
    } else {
        KaVerdict::NotEqual
    }
}
