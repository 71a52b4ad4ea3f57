//! Per-call formula arena and scratch structures shared by the provers.
//!
//! Search states are rings of formulas.  To make state handling cheap the
//! provers intern every formula into an arena of hash-consed nodes and then
//! manipulate plain `u32` ids: rotating a state, splitting it around a
//! tensor, or comparing two states never touches a heap-allocated tree.
//! Each node carries its leaf count, additive flags, and a serialised byte
//! form (used for memo keys) computed once at interning time.

use smallvec::SmallVec;
use std::collections::HashMap;

use crate::logic::{Formula, Sequent};

pub(crate) type NodeId = u32;

/// A search state: the ring of formulas, as arena ids, in list order.
pub(crate) type Items = SmallVec<[NodeId; 8]>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Tag {
    Atom,
    Dual,
    One,
    Bot,
    Zero,
    Top,
    Tensor,
    Par,
    Plus,
    With,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Node {
    pub tag: Tag,
    /// Left child for binary nodes, name index for `Atom`/`Dual`, unused
    /// (zero) for constants.
    pub a: u32,
    /// Right child for binary nodes, unused otherwise.
    pub b: u32,
    pub leaves: u32,
    /// Whether `+`, `&`, `top` or `0` occurs anywhere in the subtree.
    pub has_additive: bool,
    /// Whether `top` or `0` occurs anywhere in the subtree.
    pub has_additive_constant: bool,
}

pub(crate) struct Arena {
    nodes: Vec<Node>,
    /// Serialised form of each node, matching [`Formula::write_bytes`].
    bytes: Vec<Box<[u8]>>,
    names: Vec<String>,
    name_ids: HashMap<String, u32>,
    cons: HashMap<(Tag, u32, u32), NodeId>,
}

impl Arena {
    pub fn new() -> Arena {
        Arena {
            nodes: Vec::new(),
            bytes: Vec::new(),
            names: Vec::new(),
            name_ids: HashMap::new(),
            cons: HashMap::new(),
        }
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn bytes(&self, id: NodeId) -> &[u8] {
        &self.bytes[id as usize]
    }

    fn name_id(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.name_ids.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.name_ids.insert(name.to_string(), id);
        id
    }

    fn make(&mut self, tag: Tag, a: u32, b: u32) -> NodeId {
        if let Some(&id) = self.cons.get(&(tag, a, b)) {
            return id;
        }
        let (leaves, has_additive, has_additive_constant) = match tag {
            Tag::Atom | Tag::Dual | Tag::One | Tag::Bot => (1, false, false),
            Tag::Zero | Tag::Top => (1, true, true),
            Tag::Tensor | Tag::Par | Tag::Plus | Tag::With => {
                let (na, nb) = (self.nodes[a as usize], self.nodes[b as usize]);
                (
                    na.leaves + nb.leaves,
                    matches!(tag, Tag::Plus | Tag::With) || na.has_additive || nb.has_additive,
                    na.has_additive_constant || nb.has_additive_constant,
                )
            }
        };
        let mut buf = Vec::new();
        match tag {
            Tag::One => buf.push(0),
            Tag::Bot => buf.push(1),
            Tag::Zero => buf.push(2),
            Tag::Top => buf.push(3),
            Tag::Atom | Tag::Dual => {
                buf.push(if tag == Tag::Atom { 4 } else { 5 });
                buf.extend_from_slice(self.names[a as usize].as_bytes());
                buf.push(0);
            }
            Tag::Tensor | Tag::Par | Tag::Plus | Tag::With => {
                buf.push(match tag {
                    Tag::Tensor => 6,
                    Tag::Par => 7,
                    Tag::Plus => 8,
                    _ => 9,
                });
                buf.extend_from_slice(&self.bytes[a as usize]);
                buf.extend_from_slice(&self.bytes[b as usize]);
            }
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(Node {
            tag,
            a,
            b,
            leaves,
            has_additive,
            has_additive_constant,
        });
        self.bytes.push(buf.into_boxed_slice());
        self.cons.insert((tag, a, b), id);
        id
    }

    pub fn intern(&mut self, f: &Formula) -> NodeId {
        match f {
            Formula::Atom(x) => {
                let n = self.name_id(x);
                self.make(Tag::Atom, n, 0)
            }
            Formula::Dual(x) => {
                let n = self.name_id(x);
                self.make(Tag::Dual, n, 0)
            }
            Formula::One => self.make(Tag::One, 0, 0),
            Formula::Bot => self.make(Tag::Bot, 0, 0),
            Formula::Zero => self.make(Tag::Zero, 0, 0),
            Formula::Top => self.make(Tag::Top, 0, 0),
            Formula::Tensor(a, b) => {
                let (a, b) = (self.intern(a), self.intern(b));
                self.make(Tag::Tensor, a, b)
            }
            Formula::Par(a, b) => {
                let (a, b) = (self.intern(a), self.intern(b));
                self.make(Tag::Par, a, b)
            }
            Formula::Plus(a, b) => {
                let (a, b) = (self.intern(a), self.intern(b));
                self.make(Tag::Plus, a, b)
            }
            Formula::With(a, b) => {
                let (a, b) = (self.intern(a), self.intern(b));
                self.make(Tag::With, a, b)
            }
        }
    }

    pub fn intern_sequent(&mut self, s: &Sequent) -> Items {
        s.items().iter().map(|f| self.intern(f)).collect()
    }

    pub fn to_formula(&self, id: NodeId) -> Formula {
        let n = self.nodes[id as usize];
        match n.tag {
            Tag::Atom => Formula::Atom(self.names[n.a as usize].clone()),
            Tag::Dual => Formula::Dual(self.names[n.a as usize].clone()),
            Tag::One => Formula::One,
            Tag::Bot => Formula::Bot,
            Tag::Zero => Formula::Zero,
            Tag::Top => Formula::Top,
            Tag::Tensor => Formula::tensor(self.to_formula(n.a), self.to_formula(n.b)),
            Tag::Par => Formula::par(self.to_formula(n.a), self.to_formula(n.b)),
            Tag::Plus => Formula::plus(self.to_formula(n.a), self.to_formula(n.b)),
            Tag::With => Formula::with(self.to_formula(n.a), self.to_formula(n.b)),
        }
    }

    pub fn to_sequent(&self, items: &[NodeId]) -> Sequent {
        Sequent(items.iter().map(|&id| self.to_formula(id)).collect())
    }

    pub fn total_leaves(&self, items: &[NodeId]) -> u32 {
        items.iter().map(|&id| self.node(id).leaves).sum()
    }

    pub fn any_additive(&self, items: &[NodeId]) -> bool {
        items.iter().any(|&id| self.node(id).has_additive)
    }
}

/// Union-find plus per-variable endpoint registry used for the fast
/// square-shape test on arena states.
///
/// The test mirrors the constraint generation of the type inference module:
/// a variable occurring twice forces its occurrences to share endpoints,
/// units identify their own endpoints, binary multiplicatives introduce a
/// midpoint, additive pairs type both components alike, and `top`/`0`
/// constrain nothing.  A state is square when the first and last boundary
/// of the ring are identified.
pub(crate) struct SquareScratch {
    parent: Vec<u32>,
    /// `var_nodes[name_id]` is the (start, end) pair for the variable, or
    /// `u32::MAX` when the variable has not occurred yet in this check.
    var_nodes: Vec<(u32, u32)>,
    touched: Vec<u32>,
}

impl SquareScratch {
    pub fn new() -> SquareScratch {
        SquareScratch {
            parent: Vec::new(),
            var_nodes: Vec::new(),
            touched: Vec::new(),
        }
    }

    fn fresh(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra as usize] = rb;
        }
    }

    fn var(&mut self, name_id: u32) -> (u32, u32) {
        if self.var_nodes.len() <= name_id as usize {
            self.var_nodes.resize(name_id as usize + 1, (u32::MAX, u32::MAX));
        }
        if self.var_nodes[name_id as usize].0 == u32::MAX {
            let (s, e) = (self.fresh(), self.fresh());
            self.var_nodes[name_id as usize] = (s, e);
            self.touched.push(name_id);
        }
        self.var_nodes[name_id as usize]
    }

    fn constrain(&mut self, arena: &Arena, id: NodeId, s: u32, e: u32) {
        let n = *arena.node(id);
        match n.tag {
            Tag::Atom => {
                let (vs, ve) = self.var(n.a);
                self.union(s, vs);
                self.union(e, ve);
            }
            Tag::Dual => {
                // The dual of a variable runs in the opposite direction.
                let (vs, ve) = self.var(n.a);
                self.union(s, ve);
                self.union(e, vs);
            }
            Tag::One | Tag::Bot => self.union(s, e),
            Tag::Zero | Tag::Top => {}
            Tag::Tensor | Tag::Par => {
                let m = self.fresh();
                self.constrain(arena, n.a, s, m);
                self.constrain(arena, n.b, m, e);
            }
            Tag::Plus | Tag::With => {
                self.constrain(arena, n.a, s, e);
                self.constrain(arena, n.b, s, e);
            }
        }
    }

    /// Whether the most general type of the state is square (both ends of
    /// the boundary chain in one class).  Variables are treated
    /// polymorphically: no ambient endpoint assignment is consulted.
    pub fn is_square(&mut self, arena: &Arena, items: &[NodeId]) -> bool {
        self.parent.clear();
        for &t in &self.touched {
            self.var_nodes[t as usize] = (u32::MAX, u32::MAX);
        }
        self.touched.clear();
        let first = self.fresh();
        let mut cur = first;
        for &id in items {
            let next = self.fresh();
            self.constrain(arena, id, cur, next);
            cur = next;
        }
        self.find(first) == self.find(cur)
    }
}

/// Scratch counters for the leaf-balance filter.
///
/// In the additive-free fragment every axiom closes on one positive and one
/// negative occurrence of the same variable, and every rule preserves the
/// multiset of variable leaves across its premises, so a provable
/// additive-free state must contain each variable positively and negatively
/// equally often.  The filter is an inexpensive necessary condition; it says
/// nothing about states containing additives and is skipped for them.
pub(crate) struct BalanceScratch {
    counts: Vec<i32>,
    touched: Vec<u32>,
}

impl BalanceScratch {
    pub fn new() -> BalanceScratch {
        BalanceScratch {
            counts: Vec::new(),
            touched: Vec::new(),
        }
    }

    fn add(&mut self, name_id: u32, delta: i32) {
        if self.counts.len() <= name_id as usize {
            self.counts.resize(name_id as usize + 1, 0);
        }
        if self.counts[name_id as usize] == 0 {
            self.touched.push(name_id);
        }
        self.counts[name_id as usize] += delta;
    }

    fn walk(&mut self, arena: &Arena, id: NodeId) {
        let n = *arena.node(id);
        match n.tag {
            Tag::Atom => self.add(n.a, 1),
            Tag::Dual => self.add(n.a, -1),
            Tag::One | Tag::Bot | Tag::Zero | Tag::Top => {}
            Tag::Tensor | Tag::Par | Tag::Plus | Tag::With => {
                self.walk(arena, n.a);
                self.walk(arena, n.b);
            }
        }
    }

    /// Whether every variable occurs as often positively as negatively.
    /// Only meaningful for additive-free states.
    pub fn balanced(&mut self, arena: &Arena, items: &[NodeId]) -> bool {
        for &t in self.touched.iter() {
            self.counts[t as usize] = 0;
        }
        self.touched.clear();
        for &id in items {
            self.walk(arena, id);
        }
        let mut ok = true;
        for &t in &self.touched {
            if self.counts[t as usize] != 0 {
                ok = false;
            }
        }
        ok
    }
}

/// Builds the canonical memo key of a state into `buf`: the
/// lexicographically least rotation of the concatenation of the items'
/// serialised bytes, with a `0xFF` separator after each item.  `0xFF`
/// never occurs inside the UTF-8 of a variable name, so the separator is
/// unambiguous.  Rotation-invariance of the key matches
/// rotation-invariance of provability.
pub(crate) fn canonical_key(arena: &Arena, items: &[NodeId], buf: &mut Vec<u8>) {
    buf.clear();
    let n = items.len();
    if n == 0 {
        return;
    }
    let mut best = 0usize;
    for cand in 1..n {
        if cmp_rotation(arena, items, cand, best) == std::cmp::Ordering::Less {
            best = cand;
        }
    }
    for i in 0..n {
        buf.extend_from_slice(arena.bytes(items[(best + i) % n]));
        buf.push(0xFF);
    }
}

/// Compares the joined byte streams of two rotations of the same state.
fn cmp_rotation(arena: &Arena, items: &[NodeId], i: usize, j: usize) -> std::cmp::Ordering {
    let n = items.len();
    let stream = |start: usize, k: usize| -> &[u8] { arena.bytes(items[(start + k) % n]) };
    // Compare item-by-item; within a rotation the items' byte strings are
    // self-delimiting because every item is followed by the separator.
    for k in 0..n {
        let (a, b) = (stream(i, k), stream(j, k));
        let ord = a.cmp(b);
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    std::cmp::Ordering::Equal
}
