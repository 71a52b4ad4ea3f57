//! A workbench for cyclic multiplicative–additive linear logic (MALL) and
//! the ordered algebras it models.
//!
//! The crate provides, roughly in dependency order:
//!
//! * [`logic`] — formulas, cyclic sequents, linear negation, polarity
//!   classification, and the encoding of residuated-monoid terms into
//!   formulas;
//! * [`syntax`] — parsers and printers for the ASCII surface syntax of
//!   formulas, sequents, Kleene algebra terms, residuated judgements and
//!   type-environment files;
//! * [`typecheck`] — most-general-type inference for sequents and terms over
//!   a free "object" signature, by unification;
//! * [`prover`] — focused proof search for cyclic MALL with square-type
//!   pruning, an unfocused reference prover, proof checking, proof
//!   decoration with type annotations, and a Gentzen-style decision
//!   procedure for residuated monoids together with its translation into
//!   linear logic;
//! * [`kleene`] — Kleene algebra terms, the `clean` normal form for the
//!   annihilator laws, and decision of (typed) equality via partial
//!   derivatives and bisimulation;
//! * [`relmodel`] — finite heterogeneous relations as bitset matrices, the
//!   evaluation of terms in such models, and exhaustive counterexample
//!   search over small carriers (empty carriers included);
//! * [`bench`] — a reproducible random-sequent benchmark measuring the
//!   effect of square-type pruning, with CSV output.
//!
//! Everything is synchronous and deterministic: given the same inputs (and
//! seeds), every function returns identical results, byte for byte.

pub mod bench;
pub mod kleene;
pub mod logic;
pub mod prover;
pub mod relmodel;
pub mod syntax;
pub mod typecheck;

pub use bench::{
    gen_sequent, rejection_rate, run_bench, summarize, write_csv, BenchError, BenchRecord,
    Fragment, GenParams, SplitMix64,
};
pub use kleene::{clean, decide_typed, decide_untyped, is_strict, KaTerm, KaVerdict, Side, StateId, TermNfa};
pub use logic::{
    canonical_rotation, decode_output, encode_rm, negate, negate_list, polarity, rotate, Formula,
    NotOutput, Polarity, RmTerm, Sequent,
};
pub use prover::{
    check_proof, decorate, prove, prove_naive, prove_rm, prove_rm_via_mll, DecorateError,
    FocusedProver, NaiveProver, ProofCheckError, ProofNode, ProverError, Rule, SearchConfig,
    SearchStats, TypedNode, TypedProof,
};
pub use relmodel::{
    check_le, eval_ka, eval_ka_at, eval_le, eval_rm, eval_rm_at, search_counterexample, Carrier,
    ModelError, Rel, Valuation,
};
pub use syntax::{
    parse_env, parse_formula, parse_ka_term, parse_rm_judgement, parse_rm_term, parse_sequent,
    EnvError, ParseError, SourceSpan,
};
pub use typecheck::{
    check_formula, check_ka, check_rm, infer_ka, infer_rm, infer_sequent, is_square,
    type_of_strict, Mgu, ObjectTerm, TypeEnv, TypecheckError,
};
