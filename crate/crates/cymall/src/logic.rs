//! Formulas of cyclic multiplicative–additive linear logic, cyclic
//! sequents, linear negation, polarity, and the encoding of residuated
//! terms as formulas.
//!
//! Sequents are *cyclic*: a sequent is a list of formulas read around a
//! ring, and the exchange rule only rotates the list.  Consequently many
//! operations here are rotation-aware: [`rotate`] rotates a sequent,
//! [`canonical_rotation`] picks a distinguished representative of the
//! rotation class (used as a memoisation key by the prover).
//!
//! Negation is an involution defined on *all* formulas; it reverses the
//! arguments of binary connectives, matching the cyclic reading where a
//! formula's two ends attach to its neighbours.

use thiserror::Error;

/// A formula of multiplicative–additive linear logic.
///
/// Negation is not a constructor: it is the defined involution [`negate`],
/// and only variables carry an explicit dual form ([`Formula::Dual`]).
/// This keeps every formula in negation normal form by construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    /// A propositional variable `x`.
    Atom(String),
    /// A dualised variable `~x`.
    Dual(String),
    /// Multiplicative unit `1`.
    One,
    /// Multiplicative zero `bot`, the dual of `1`.
    Bot,
    /// Additive zero `0`.
    Zero,
    /// Additive unit `top`, the dual of `0`.
    Top,
    /// Multiplicative conjunction `a * b`.
    Tensor(Box<Formula>, Box<Formula>),
    /// Multiplicative disjunction `a | b`.
    Par(Box<Formula>, Box<Formula>),
    /// Additive disjunction `a + b`.
    Plus(Box<Formula>, Box<Formula>),
    /// Additive conjunction `a & b`.
    With(Box<Formula>, Box<Formula>),
}

impl Formula {
    /// Convenience constructor for `a * b`.
    pub fn tensor(a: Formula, b: Formula) -> Formula {
        Formula::Tensor(Box::new(a), Box::new(b))
    }

    /// Convenience constructor for `a | b`.
    pub fn par(a: Formula, b: Formula) -> Formula {
        Formula::Par(Box::new(a), Box::new(b))
    }

    /// Convenience constructor for `a + b`.
    pub fn plus(a: Formula, b: Formula) -> Formula {
        Formula::Plus(Box::new(a), Box::new(b))
    }

    /// Convenience constructor for `a & b`.
    pub fn with(a: Formula, b: Formula) -> Formula {
        Formula::With(Box::new(a), Box::new(b))
    }

    /// Convenience constructor for a variable.
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    /// Convenience constructor for a dualised variable.
    pub fn dual(name: &str) -> Formula {
        Formula::Dual(name.to_string())
    }

    /// Number of leaves: variables, dual variables and constants.
    pub fn leaf_count(&self) -> usize {
        match self {
            Formula::Atom(_)
            | Formula::Dual(_)
            | Formula::One
            | Formula::Bot
            | Formula::Zero
            | Formula::Top => 1,
            Formula::Tensor(a, b)
            | Formula::Par(a, b)
            | Formula::Plus(a, b)
            | Formula::With(a, b) => a.leaf_count() + b.leaf_count(),
        }
    }

    /// Does the formula contain an additive constant (`top` or `0`)?
    ///
    /// Square-type pruning is only sound on sequents without additive
    /// constants, so the prover asks this before pruning.
    pub fn has_additive_constant(&self) -> bool {
        match self {
            Formula::Top | Formula::Zero => true,
            Formula::Atom(_) | Formula::Dual(_) | Formula::One | Formula::Bot => false,
            Formula::Tensor(a, b)
            | Formula::Par(a, b)
            | Formula::Plus(a, b)
            | Formula::With(a, b) => a.has_additive_constant() || b.has_additive_constant(),
        }
    }

    /// Does the formula contain an additive connective or constant?
    ///
    /// Used to reject additives when a caller restricts itself to the
    /// multiplicative fragment.
    pub fn has_additive(&self) -> bool {
        match self {
            Formula::Top | Formula::Zero => true,
            Formula::Atom(_) | Formula::Dual(_) | Formula::One | Formula::Bot => false,
            Formula::Plus(_, _) | Formula::With(_, _) => true,
            Formula::Tensor(a, b) | Formula::Par(a, b) => a.has_additive() || b.has_additive(),
        }
    }

    /// Call `f` on every variable name occurring in the formula.
    pub fn for_each_var(&self, f: &mut impl FnMut(&str)) {
        match self {
            Formula::Atom(x) | Formula::Dual(x) => f(x),
            Formula::One | Formula::Bot | Formula::Zero | Formula::Top => {}
            Formula::Tensor(a, b)
            | Formula::Par(a, b)
            | Formula::Plus(a, b)
            | Formula::With(a, b) => {
                a.for_each_var(f);
                b.for_each_var(f);
            }
        }
    }

    /// Append the fixed byte serialisation of the formula to `out`.
    ///
    /// The serialisation is injective and determines the total order used
    /// by [`canonical_rotation`]: one tag byte per constructor (in the
    /// order `1`, `bot`, `0`, `top`, variable, dual, `*`, `|`, `+`, `&`),
    /// children left to right, variable names as their bytes followed by a
    /// `0` terminator.
    pub fn write_bytes(&self, out: &mut Vec<u8>) {
        match self {
            Formula::One => out.push(0),
            Formula::Bot => out.push(1),
            Formula::Zero => out.push(2),
            Formula::Top => out.push(3),
            Formula::Atom(x) => {
                out.push(4);
                out.extend_from_slice(x.as_bytes());
                out.push(0);
            }
            Formula::Dual(x) => {
                out.push(5);
                out.extend_from_slice(x.as_bytes());
                out.push(0);
            }
            Formula::Tensor(a, b) => {
                out.push(6);
                a.write_bytes(out);
                b.write_bytes(out);
            }
            Formula::Par(a, b) => {
                out.push(7);
                a.write_bytes(out);
                b.write_bytes(out);
            }
            Formula::Plus(a, b) => {
                out.push(8);
                a.write_bytes(out);
                b.write_bytes(out);
            }
            Formula::With(a, b) => {
                out.push(9);
                a.write_bytes(out);
                b.write_bytes(out);
            }
        }
    }
}

/// A cyclic sequent: a list of formulas read around a ring.
///
/// The list order matters (the logic is non-commutative); only rotation is
/// a symmetry, and even that is mediated by an explicit proof rule.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequent(pub Vec<Formula>);

impl Sequent {
    /// The empty sequent.
    pub fn new() -> Sequent {
        Sequent(Vec::new())
    }

    /// The formulas, in ring order.
    pub fn items(&self) -> &[Formula] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total number of leaves across all formulas.
    pub fn leaf_count(&self) -> usize {
        self.0.iter().map(Formula::leaf_count).sum()
    }

    /// Does any formula contain `top` or `0`?
    pub fn has_additive_constant(&self) -> bool {
        self.0.iter().any(Formula::has_additive_constant)
    }
}

impl From<Vec<Formula>> for Sequent {
    fn from(items: Vec<Formula>) -> Sequent {
        Sequent(items)
    }
}

impl FromIterator<Formula> for Sequent {
    fn from_iter<I: IntoIterator<Item = Formula>>(iter: I) -> Sequent {
        Sequent(iter.into_iter().collect())
    }
}

/// Linear negation.  An involution: `negate(negate(a)) == a`.
///
/// Binary connectives swap their arguments under negation — in the cyclic
/// reading a formula is a path between two endpoints, and negation
/// reverses the path:
///
/// * `(a * b)~ = b~ | a~` and dually,
/// * `(a + b)~ = b~ & a~` and dually,
/// * `1~ = bot`, `0~ = top`, and both ways round,
/// * `x~ = ~x`, `(~x)~ = x`.
pub fn negate(f: &Formula) -> Formula {
    match f {
        Formula::Atom(x) => Formula::Dual(x.clone()),
        Formula::Dual(x) => Formula::Atom(x.clone()),
        Formula::One => Formula::Bot,
        Formula::Bot => Formula::One,
        Formula::Zero => Formula::Top,
        Formula::Top => Formula::Zero,
        Formula::Tensor(a, b) => Formula::par(negate(b), negate(a)),
        Formula::Par(a, b) => Formula::tensor(negate(b), negate(a)),
        Formula::Plus(a, b) => Formula::with(negate(b), negate(a)),
        Formula::With(a, b) => Formula::plus(negate(b), negate(a)),
    }
}

/// Negate a list of formulas: reverse the list and negate each element.
///
/// This matches [`negate`] on binary connectives — a list denotes the
/// composite of its elements, and negation reverses composites.
pub fn negate_list(l: &[Formula]) -> Vec<Formula> {
    l.iter().rev().map(negate).collect()
}

/// Rotate a sequent, moving its first `k` formulas to the end.
///
/// `k` is taken modulo the length; rotating the empty sequent is a no-op.
pub fn rotate(l: &Sequent, k: usize) -> Sequent {
    let n = l.0.len();
    if n == 0 {
        return l.clone();
    }
    let k = k % n;
    let mut items = Vec::with_capacity(n);
    items.extend_from_slice(&l.0[k..]);
    items.extend_from_slice(&l.0[..k]);
    Sequent(items)
}

/// Least starting index of the lexicographically smallest rotation of `s`,
/// by Booth's algorithm (linearly many comparisons).
fn booth_least_rotation<K: Ord>(s: &[K]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let at = |i: usize| &s[i % n];
    // Failure function over the doubled sequence.
    let mut f: Vec<isize> = vec![-1; 2 * n];
    let mut k: usize = 0;
    for j in 1..2 * n {
        let sj = at(j);
        let mut i = f[j - k - 1];
        while i != -1 && sj != at(k + i as usize + 1) {
            if sj < at(k + i as usize + 1) {
                k = j - i as usize - 1;
            }
            i = f[i as usize];
        }
        if i == -1 && sj != at(k) {
            if sj < at(k) {
                k = j;
            }
            f[j - k] = -1;
        } else {
            f[j - k] = i + 1;
        }
    }
    k % n
}

/// The canonical representative of a sequent's rotation class, and the
/// rotation amount that reaches it: `canonical_rotation(l).0 == rotate(l,
/// canonical_rotation(l).1)`.
///
/// The representative is the least rotation, comparing formulas by the
/// fixed byte serialisation of [`Formula::write_bytes`].  Every rotation of
/// `l` maps to the same representative, which is what makes this usable as
/// a memoisation key for proof search.
pub fn canonical_rotation(l: &Sequent) -> (Sequent, usize) {
    if l.0.len() <= 1 {
        return (l.clone(), 0);
    }
    let keys: Vec<Vec<u8>> = l
        .0
        .iter()
        .map(|f| {
            let mut buf = Vec::new();
            f.write_bytes(&mut buf);
            buf
        })
        .collect();
    let shift = booth_least_rotation(&keys);
    (rotate(l, shift), shift)
}

/// Polarity of a formula: the input/output classification that underlies
/// the translation back from formulas to residuated terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    /// Encodes a term (`x`, `1`, `o * o`, `i | o`, `o | i`, `o + o`,
    /// `o & o`).
    Output,
    /// The dual of an output formula.
    Input,
    /// Neither — such formulas do not arise from encoding terms.
    Neither,
}

/// Classify a formula as input, output, or neither.
///
/// Outputs are generated by `x`, `1`, `o * o`, `i | o`, `o | i`, `o + o`,
/// `o & o`; inputs dually by `~x`, `bot`, `i | i`, `i * o`, `o * i`,
/// `i + i`, `i & i`.  Additive constants, and any mixture that fits
/// neither grammar (for instance `1 | 1`), are [`Polarity::Neither`].
pub fn polarity(f: &Formula) -> Polarity {
    use Polarity::*;
    match f {
        Formula::Atom(_) | Formula::One => Output,
        Formula::Dual(_) | Formula::Bot => Input,
        Formula::Zero | Formula::Top => Neither,
        Formula::Tensor(a, b) => match (polarity(a), polarity(b)) {
            (Output, Output) => Output,
            (Input, Output) | (Output, Input) => Input,
            _ => Neither,
        },
        Formula::Par(a, b) => match (polarity(a), polarity(b)) {
            (Input, Input) => Input,
            (Input, Output) | (Output, Input) => Output,
            _ => Neither,
        },
        Formula::Plus(a, b) | Formula::With(a, b) => match (polarity(a), polarity(b)) {
            (Output, Output) => Output,
            (Input, Input) => Input,
            _ => Neither,
        },
    }
}

/// A term over the signature of residuated lattice-ordered monoids:
/// composition and its two residuals, unit, binary joins and meets, and
/// the lattice bounds.
///
/// The monoid fragment (`·`, `1`, `\`, `/`) is what the Gentzen-style
/// decision procedure in [`crate::prover`] handles; the full signature is
/// interpreted by [`crate::relmodel`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RmTerm {
    /// A variable.
    Var(String),
    /// The monoid unit `1`.
    Unit,
    /// Lattice top `top`.
    Top,
    /// Lattice bottom `0`.
    Zero,
    /// Composition `a . b`.
    Dot(Box<RmTerm>, Box<RmTerm>),
    /// Left residual `a \ b`: the largest `c` with `a . c <= b`.
    LDiv(Box<RmTerm>, Box<RmTerm>),
    /// Right residual `a / b`: the largest `c` with `c . b <= a`.
    RDiv(Box<RmTerm>, Box<RmTerm>),
    /// Join `a \/ b`.
    Join(Box<RmTerm>, Box<RmTerm>),
    /// Meet `a /\ b`.
    Meet(Box<RmTerm>, Box<RmTerm>),
}

impl RmTerm {
    pub fn var(name: &str) -> RmTerm {
        RmTerm::Var(name.to_string())
    }

    pub fn dot(a: RmTerm, b: RmTerm) -> RmTerm {
        RmTerm::Dot(Box::new(a), Box::new(b))
    }

    pub fn ldiv(a: RmTerm, b: RmTerm) -> RmTerm {
        RmTerm::LDiv(Box::new(a), Box::new(b))
    }

    pub fn rdiv(a: RmTerm, b: RmTerm) -> RmTerm {
        RmTerm::RDiv(Box::new(a), Box::new(b))
    }

    pub fn join(a: RmTerm, b: RmTerm) -> RmTerm {
        RmTerm::Join(Box::new(a), Box::new(b))
    }

    pub fn meet(a: RmTerm, b: RmTerm) -> RmTerm {
        RmTerm::Meet(Box::new(a), Box::new(b))
    }

    /// Number of leaves: variables and constants.
    pub fn leaf_count(&self) -> usize {
        match self {
            RmTerm::Var(_) | RmTerm::Unit | RmTerm::Top | RmTerm::Zero => 1,
            RmTerm::Dot(a, b)
            | RmTerm::LDiv(a, b)
            | RmTerm::RDiv(a, b)
            | RmTerm::Join(a, b)
            | RmTerm::Meet(a, b) => a.leaf_count() + b.leaf_count(),
        }
    }

    /// Is the term in the monoid fragment (`·`, `1`, `\`, `/`, variables)?
    pub fn is_monoid_fragment(&self) -> bool {
        match self {
            RmTerm::Var(_) | RmTerm::Unit => true,
            RmTerm::Top | RmTerm::Zero => false,
            RmTerm::Join(_, _) | RmTerm::Meet(_, _) => false,
            RmTerm::Dot(a, b) | RmTerm::LDiv(a, b) | RmTerm::RDiv(a, b) => {
                a.is_monoid_fragment() && b.is_monoid_fragment()
            }
        }
    }
}

/// Encode a residuated term as a formula.
///
/// * `x` becomes `x`, `1` becomes `1`;
/// * `a . b` becomes `<a> * <b>`;
/// * `a \ b` becomes `<a>~ | <b>` and `a / b` becomes `<a> | <b>~`;
/// * `a \/ b` becomes `<a> + <b>`, `a /\ b` becomes `<a> & <b>`;
/// * `top` becomes `top` (so its negation is `0`), `0` becomes `0`.
///
/// For terms without `top`/`0` the result is an output formula and
/// [`decode_output`] inverts the encoding.
pub fn encode_rm(t: &RmTerm) -> Formula {
    match t {
        RmTerm::Var(x) => Formula::Atom(x.clone()),
        RmTerm::Unit => Formula::One,
        RmTerm::Top => Formula::Top,
        RmTerm::Zero => Formula::Zero,
        RmTerm::Dot(a, b) => Formula::tensor(encode_rm(a), encode_rm(b)),
        RmTerm::LDiv(a, b) => Formula::par(negate(&encode_rm(a)), encode_rm(b)),
        RmTerm::RDiv(a, b) => Formula::par(encode_rm(a), negate(&encode_rm(b))),
        RmTerm::Join(a, b) => Formula::plus(encode_rm(a), encode_rm(b)),
        RmTerm::Meet(a, b) => Formula::with(encode_rm(a), encode_rm(b)),
    }
}

/// Error returned by [`decode_output`] on formulas outside the image of
/// the encoding.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("formula is not an output formula: {0}")]
pub struct NotOutput(pub Formula);

/// Decode an output formula back to the residuated term it encodes.
///
/// Inverse to [`encode_rm`] on terms without `top`/`0`:
/// `decode_output(&encode_rm(t)) == Ok(t)` for such terms.  Fails with
/// [`NotOutput`] if the formula is not an output formula (additive
/// constants included — they have no polarity).
pub fn decode_output(f: &Formula) -> Result<RmTerm, NotOutput> {
    use Polarity::*;
    let fail = || NotOutput(f.clone());
    match f {
        Formula::Atom(x) => Ok(RmTerm::Var(x.clone())),
        Formula::One => Ok(RmTerm::Unit),
        Formula::Tensor(a, b) => match (polarity(a), polarity(b)) {
            (Output, Output) => Ok(RmTerm::dot(decode_output(a)?, decode_output(b)?)),
            _ => Err(fail()),
        },
        Formula::Par(a, b) => match (polarity(a), polarity(b)) {
            // <a \ b> = <a>~ | <b>: recover a by negating the input half.
            (Input, Output) => Ok(RmTerm::ldiv(
                decode_output(&negate(a))?,
                decode_output(b)?,
            )),
            // <a / b> = <a> | <b>~.
            (Output, Input) => Ok(RmTerm::rdiv(
                decode_output(a)?,
                decode_output(&negate(b))?,
            )),
            _ => Err(fail()),
        },
        Formula::Plus(a, b) => match (polarity(a), polarity(b)) {
            (Output, Output) => Ok(RmTerm::join(decode_output(a)?, decode_output(b)?)),
            _ => Err(fail()),
        },
        Formula::With(a, b) => match (polarity(a), polarity(b)) {
            (Output, Output) => Ok(RmTerm::meet(decode_output(a)?, decode_output(b)?)),
            _ => Err(fail()),
        },
        Formula::Dual(_) | Formula::Bot | Formula::Zero | Formula::Top => Err(fail()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Formula {
        Formula::atom("x")
    }

    fn y() -> Formula {
        Formula::atom("y")
    }

    #[test]
    fn negation_tables() {
        assert_eq!(negate(&Formula::One), Formula::Bot);
        assert_eq!(negate(&Formula::Bot), Formula::One);
        assert_eq!(negate(&Formula::Zero), Formula::Top);
        assert_eq!(negate(&Formula::Top), Formula::Zero);
        assert_eq!(negate(&x()), Formula::dual("x"));
        assert_eq!(
            negate(&Formula::tensor(x(), y())),
            Formula::par(Formula::dual("y"), Formula::dual("x"))
        );
        assert_eq!(
            negate(&Formula::plus(x(), y())),
            Formula::with(Formula::dual("y"), Formula::dual("x"))
        );
    }

    #[test]
    fn negation_is_an_involution() {
        let f = Formula::par(
            Formula::tensor(x(), Formula::with(y(), Formula::Top)),
            Formula::plus(Formula::dual("x"), Formula::Bot),
        );
        assert_eq!(negate(&negate(&f)), f);
    }

    #[test]
    fn negate_list_reverses() {
        let l = vec![x(), y(), Formula::One];
        assert_eq!(
            negate_list(&l),
            vec![Formula::Bot, Formula::dual("y"), Formula::dual("x")]
        );
        // Involution on lists too.
        assert_eq!(negate_list(&negate_list(&l)), l);
    }

    #[test]
    fn rotate_moves_prefix_to_end() {
        let s = Sequent(vec![x(), y(), Formula::One]);
        assert_eq!(rotate(&s, 1), Sequent(vec![y(), Formula::One, x()]));
        assert_eq!(rotate(&s, 3), s);
        assert_eq!(rotate(&s, 4), rotate(&s, 1));
        assert_eq!(rotate(&Sequent::new(), 5), Sequent::new());
    }

    #[test]
    fn canonical_rotation_picks_least() {
        // One is serialised before atoms, so the canonical form starts at 1.
        let s = Sequent(vec![y(), Formula::One, x()]);
        let (canon, shift) = canonical_rotation(&s);
        assert_eq!(canon, Sequent(vec![Formula::One, x(), y()]));
        assert_eq!(shift, 1);
        assert_eq!(canon, rotate(&s, shift));
    }

    #[test]
    fn canonical_rotation_is_rotation_invariant() {
        let s = Sequent(vec![
            Formula::tensor(x(), y()),
            Formula::dual("x"),
            Formula::One,
            Formula::dual("x"),
        ]);
        let (canon, _) = canonical_rotation(&s);
        for k in 0..s.len() {
            let (c, shift) = canonical_rotation(&rotate(&s, k));
            assert_eq!(c, canon);
            assert_eq!(c, rotate(&rotate(&s, k), shift));
        }
    }

    #[test]
    fn canonical_rotation_on_periodic_sequents() {
        let s = Sequent(vec![x(), x()]);
        let (canon, shift) = canonical_rotation(&s);
        assert_eq!(canon, s);
        assert!(shift < 2);
    }

    #[test]
    fn polarity_classification() {
        use Polarity::*;
        assert_eq!(polarity(&x()), Output);
        assert_eq!(polarity(&Formula::dual("x")), Input);
        assert_eq!(polarity(&Formula::One), Output);
        assert_eq!(polarity(&Formula::Bot), Input);
        assert_eq!(polarity(&Formula::Top), Neither);
        assert_eq!(polarity(&Formula::Zero), Neither);
        // o * o is an output, i * o an input, i * i neither.
        assert_eq!(polarity(&Formula::tensor(x(), y())), Output);
        assert_eq!(polarity(&Formula::tensor(Formula::dual("x"), y())), Input);
        assert_eq!(
            polarity(&Formula::tensor(Formula::dual("x"), Formula::dual("y"))),
            Neither
        );
        // 1 | 1 fits neither grammar.
        assert_eq!(polarity(&Formula::par(Formula::One, Formula::One)), Neither);
        // Negation swaps input and output.
        let f = Formula::par(Formula::dual("x"), Formula::tensor(x(), Formula::One));
        assert_eq!(polarity(&f), Polarity::Output);
        assert_eq!(polarity(&negate(&f)), Polarity::Input);
    }

    #[test]
    fn encode_examples() {
        // y . (top \ x)  ~~>  y * (0 | x)
        let t = RmTerm::dot(RmTerm::var("y"), RmTerm::ldiv(RmTerm::Top, RmTerm::var("x")));
        assert_eq!(
            encode_rm(&t),
            Formula::tensor(Formula::atom("y"), Formula::par(Formula::Zero, Formula::atom("x")))
        );
        // a \ b  ~~>  ~a | b for variables.
        let d = RmTerm::ldiv(RmTerm::var("x"), RmTerm::var("y"));
        assert_eq!(encode_rm(&d), Formula::par(Formula::dual("x"), y()));
        // a / b  ~~>  a | ~b.
        let d = RmTerm::rdiv(RmTerm::var("x"), RmTerm::var("y"));
        assert_eq!(encode_rm(&d), Formula::par(x(), Formula::dual("y")));
    }

    #[test]
    fn decode_inverts_encode_without_lattice_constants() {
        let terms = vec![
            RmTerm::var("x"),
            RmTerm::Unit,
            RmTerm::dot(RmTerm::var("x"), RmTerm::Unit),
            RmTerm::ldiv(RmTerm::dot(RmTerm::var("x"), RmTerm::var("y")), RmTerm::var("y")),
            RmTerm::rdiv(RmTerm::var("x"), RmTerm::ldiv(RmTerm::var("y"), RmTerm::var("x"))),
            RmTerm::join(RmTerm::var("x"), RmTerm::meet(RmTerm::var("y"), RmTerm::Unit)),
        ];
        for t in terms {
            assert_eq!(decode_output(&encode_rm(&t)), Ok(t.clone()), "term {t:?}");
        }
    }

    #[test]
    fn decode_rejects_non_outputs() {
        assert!(decode_output(&Formula::dual("x")).is_err());
        assert!(decode_output(&Formula::Top).is_err());
        assert!(decode_output(&Formula::par(Formula::One, Formula::One)).is_err());
        // top's encoding is not decodable: its polarity is Neither.
        assert!(decode_output(&encode_rm(&RmTerm::Top)).is_err());
    }

    #[test]
    fn leaf_counts() {
        let f = Formula::tensor(x(), Formula::par(Formula::One, Formula::dual("y")));
        assert_eq!(f.leaf_count(), 3);
        assert_eq!(Sequent(vec![f, Formula::Top]).leaf_count(), 4);
    }
}
