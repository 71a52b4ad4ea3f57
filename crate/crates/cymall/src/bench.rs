//! Reproducible random-sequent generation and the pruning benchmark.
//!
//! The generator draws sequents with an exact total leaf count: the item
//! count is uniform in `[1, leaves]`, the leaf budget is split by a
//! uniformly random composition, tree shapes are uniform over binary
//! trees of each item's budget (Catalan-weighted split sampling), and
//! leaves come from a fixed pool of variables, dualised variables, `1`
//! and `bot`.  The additive constants `top` and `0` are never generated,
//! so square-type pruning stays sound on every output.  Outputs are in
//! normal form for the multiplicative units: no `1` directly under `*`
//! and no `bot` directly under `|` — the offending leaf draw simply uses
//! the reduced pool, which gives the same distribution as rejection
//! sampling without the retry loop.
//!
//! [`run_bench`] times the focused prover on each generated sequent with
//! pruning off and on (fresh prover, fresh memo for each run), recording
//! verdicts, node counts, and wall times; [`write_csv`] and [`summarize`]
//! render the records.  Everything is driven by an explicit [`SplitMix64`]
//! stream, so a (seed, parameters) pair pins the whole experiment.

use std::collections::HashMap;
use std::io;
use std::time::Instant;

use thiserror::Error;

use crate::logic::{Formula, Sequent};
use crate::prover::{FocusedProver, ProverError, SearchConfig};
use crate::typecheck::TypeEnv;

/// Errors from the reporting helpers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("no records to summarize")]
    EmptyInput,
}

/// The SplitMix64 generator: 64 bits of state, one addition and two
/// xor-multiply mixes per output.  Tiny, seedable, and plenty for
/// benchmark workloads.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, n)` by the multiply-shift reduction (the bias for
    /// the `n` used here is far below anything observable).
    pub fn next_below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }
}

/// Which connectives the generator may use as internal nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fragment {
    /// `*` and `|` only.
    Mll,
    /// `*`, `|`, `+`, and `&`.
    Mall,
}

/// Generation parameters.  `leaves` is the exact total leaf count of
/// every generated sequent (1..=64); `var_pool` is the number of distinct
/// variables `x0..` available (at least 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenParams {
    pub leaves: u32,
    pub var_pool: u32,
    pub fragment: Fragment,
    pub seed: u64,
}

/// Which unit a leaf draw must avoid, to keep multiplicative units in
/// normal form directly under their own connective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Forbid {
    Nothing,
    One,
    Bot,
}

/// Numbers of binary trees by leaf count: `t[1] = 1`,
/// `t[n] = sum t[i] * t[n - i]`.  Fits u128 comfortably for n <= 64.
fn tree_counts(n: usize) -> Vec<u128> {
    let mut t = vec![0u128; n + 1];
    if n >= 1 {
        t[1] = 1;
    }
    for m in 2..=n {
        t[m] = (1..m).map(|i| t[i] * t[m - i]).sum();
    }
    t
}

fn gen_leaf(rng: &mut SplitMix64, var_pool: u32, forbid: Forbid) -> Formula {
    let units: &[Formula] = match forbid {
        Forbid::Nothing => &[Formula::One, Formula::Bot],
        Forbid::One => &[Formula::Bot],
        Forbid::Bot => &[Formula::One],
    };
    let v = var_pool as u64;
    let u = rng.next_below(2 * v + units.len() as u64);
    if u < v {
        Formula::atom(&format!("x{u}"))
    } else if u < 2 * v {
        Formula::dual(&format!("x{}", u - v))
    } else {
        units[(u - 2 * v) as usize].clone()
    }
}

fn gen_formula(
    rng: &mut SplitMix64,
    n: usize,
    p: &GenParams,
    forbid: Forbid,
    t: &[u128],
) -> Formula {
    if n == 1 {
        return gen_leaf(rng, p.var_pool, forbid);
    }
    let op = match p.fragment {
        Fragment::Mll => rng.next_below(2),
        Fragment::Mall => rng.next_below(4),
    };
    // Split the budget with weight t[i] * t[n - i] on (i, n - i), so the
    // resulting tree shape is uniform.  The weights sum to exactly t[n];
    // a 128-bit draw keeps the modulo bias negligible.
    let total = t[n];
    let hi = rng.next_u64() as u128;
    let lo = rng.next_u64() as u128;
    let r = (hi << 64 | lo) % total;
    let mut acc = 0u128;
    let mut split = 1;
    for i in 1..n {
        acc += t[i] * t[n - i];
        if r < acc {
            split = i;
            break;
        }
    }
    let kid_forbid = match op {
        0 => Forbid::One,
        1 => Forbid::Bot,
        _ => Forbid::Nothing,
    };
    let a = gen_formula(rng, split, p, kid_forbid, t);
    let b = gen_formula(rng, n - split, p, kid_forbid, t);
    match op {
        0 => Formula::tensor(a, b),
        1 => Formula::par(a, b),
        2 => Formula::plus(a, b),
        _ => Formula::with(a, b),
    }
}

/// Generates one random sequent with exactly `p.leaves` leaves, advancing
/// `rng`.  Deterministic in (parameters, stream position).
pub fn gen_sequent(p: &GenParams, rng: &mut SplitMix64) -> Sequent {
    assert!(
        (1..=64).contains(&p.leaves),
        "leaf budget must be in 1..=64"
    );
    assert!(p.var_pool >= 1, "variable pool must be nonempty");
    let leaves = p.leaves as u64;
    let t = tree_counts(p.leaves as usize);

    // Item count, then a uniform composition of the budget into that many
    // positive parts: choose k - 1 distinct cut gaps out of leaves - 1 by
    // a partial Fisher-Yates shuffle (sparse, via the swap map).
    let k = 1 + rng.next_below(leaves);
    let gaps = leaves - 1;
    let mut swap: HashMap<u64, u64> = HashMap::new();
    let mut cuts: Vec<u64> = Vec::with_capacity((k - 1) as usize);
    for i in 0..k - 1 {
        let j = i + rng.next_below(gaps - i);
        let vi = *swap.get(&i).unwrap_or(&i);
        let vj = *swap.get(&j).unwrap_or(&j);
        swap.insert(j, vi);
        cuts.push(vj);
    }
    cuts.sort_unstable();

    let mut bounds = Vec::with_capacity(cuts.len() + 2);
    bounds.push(0);
    bounds.extend(cuts.iter().map(|c| c + 1));
    bounds.push(leaves);
    let items = bounds
        .windows(2)
        .map(|w| gen_formula(rng, (w[1] - w[0]) as usize, p, Forbid::Nothing, &t))
        .collect();
    Sequent(items)
}

/// One benchmarked sequent: the same input decided twice, pruning off and
/// on, with a fresh prover (and so a fresh memo table) each time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRecord {
    /// The stream seed the whole run was generated from.
    pub seed: u64,
    /// Position of this sequent in the stream.
    pub index: usize,
    /// The sequent, rendered.
    pub sequent: String,
    /// Did the pruned run reject the input before any search?
    pub pruned_at_root: bool,
    /// The verdict; `None` when either run exceeded the budget.
    pub provable: Option<bool>,
    pub time_unpruned_ns: u128,
    pub time_pruned_ns: u128,
    pub nodes_unpruned: u64,
    pub nodes_pruned: u64,
    /// Did either run exceed the node budget?
    pub budget_exceeded: bool,
    /// Did the two runs disagree?  Always false unless the prover is
    /// broken; kept out of the CSV and asserted on in tests.
    pub verdict_mismatch: bool,
}

/// Generates `count` sequents from `p` and decides each twice (pruning
/// off, then on; memoisation on; `budget` nodes per run).
pub fn run_bench(p: &GenParams, count: usize, budget: u64) -> Vec<BenchRecord> {
    let mut rng = SplitMix64::new(p.seed);
    let mut out = Vec::with_capacity(count);
    for index in 0..count {
        let seq = gen_sequent(p, &mut rng);
        let run = |prune: bool| {
            let mut prover = FocusedProver::new();
            let cfg = SearchConfig {
                prune,
                memo: true,
                env: TypeEnv::new(),
                node_budget: Some(budget),
            };
            let start = Instant::now();
            let outcome = prover.decide(&seq, &cfg);
            let elapsed = start.elapsed().as_nanos();
            match outcome {
                Ok((verdict, stats)) => (Some(verdict), stats, elapsed),
                Err(ProverError::BudgetExceeded { stats }) => (None, stats, elapsed),
                // The generator never emits `top` or `0`.
                Err(ProverError::PruneUnsound) => {
                    unreachable!("generated sequents contain no additive constants")
                }
            }
        };
        let (verdict_u, stats_u, time_u) = run(false);
        let (verdict_p, stats_p, time_p) = run(true);
        let budget_exceeded = verdict_u.is_none() || verdict_p.is_none();
        out.push(BenchRecord {
            seed: p.seed,
            index,
            sequent: seq.to_string(),
            pruned_at_root: stats_p.pruned_at_root,
            provable: if budget_exceeded { None } else { verdict_u },
            time_unpruned_ns: time_u,
            time_pruned_ns: time_p,
            nodes_unpruned: stats_u.nodes_expanded,
            nodes_pruned: stats_p.nodes_expanded,
            budget_exceeded,
            verdict_mismatch: match (verdict_u, verdict_p) {
                (Some(a), Some(b)) => a != b,
                _ => false,
            },
        });
    }
    out
}

/// Writes records as CSV.  `provable` is left empty on budget-exceeded
/// rows; the sequent field is quoted as needed by the writer.
pub fn write_csv<W: io::Write>(records: &[BenchRecord], w: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        "seed",
        "index",
        "sequent",
        "pruned_at_root",
        "provable",
        "time_unpruned_ns",
        "time_pruned_ns",
        "nodes_unpruned",
        "nodes_pruned",
        "budget_exceeded",
    ])?;
    for r in records {
        wtr.write_record(&[
            r.seed.to_string(),
            r.index.to_string(),
            r.sequent.clone(),
            r.pruned_at_root.to_string(),
            r.provable.map(|b| b.to_string()).unwrap_or_default(),
            r.time_unpruned_ns.to_string(),
            r.time_pruned_ns.to_string(),
            r.nodes_unpruned.to_string(),
            r.nodes_pruned.to_string(),
            r.budget_exceeded.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Cumulative solved-fraction per log-spaced time bucket (1e-6 s up to
/// 1e2 s), for both configurations, as CSV.  Records that exceeded the
/// budget in *either* configuration are excluded from both columns, so
/// the two share one denominator.
pub fn summarize(records: &[BenchRecord]) -> Result<String, BenchError> {
    if records.is_empty() {
        return Err(BenchError::EmptyInput);
    }
    let kept: Vec<&BenchRecord> = records.iter().filter(|r| !r.budget_exceeded).collect();
    let total = kept.len();
    let mut out = String::from(
        "le_seconds,solved_unpruned,solved_pruned,fraction_unpruned,fraction_pruned,total\n",
    );
    for exp in -6i32..=2 {
        let edge_ns = 10u128.pow((exp + 9) as u32);
        let su = kept.iter().filter(|r| r.time_unpruned_ns <= edge_ns).count();
        let sp = kept.iter().filter(|r| r.time_pruned_ns <= edge_ns).count();
        let (fu, fp) = if total == 0 {
            (0.0, 0.0)
        } else {
            (su as f64 / total as f64, sp as f64 / total as f64)
        };
        out.push_str(&format!("1e{exp},{su},{sp},{fu},{fp},{total}\n"));
    }
    Ok(out)
}

/// Fraction of (non-budget-exceeded) records rejected before any search;
/// `None` when every record exceeded the budget or `records` is empty.
pub fn rejection_rate(records: &[BenchRecord]) -> Option<f64> {
    let mut n = 0usize;
    let mut rejected = 0usize;
    for r in records.iter().filter(|r| !r.budget_exceeded) {
        n += 1;
        rejected += r.pruned_at_root as usize;
    }
    (n > 0).then(|| rejected as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Formula as F;

    #[test]
    fn splitmix_matches_the_reference_vector() {
        let mut r = SplitMix64::new(0);
        assert_eq!(r.next_u64(), 0xE220A8397B1DCDAF);
        assert_eq!(r.next_u64(), 0x6E789E6AA1B965F4);
        assert_eq!(r.next_u64(), 0x06C45D188009454F);
        let mut r = SplitMix64::new(0xDEADBEEF);
        assert_eq!(r.next_u64(), 0x4ADFB90F68C9EB9B);
        assert_eq!(r.next_u64(), 0xDE586A3141A10922);
        // next_below stays in range at the extremes.
        let mut r = SplitMix64::new(1);
        for _ in 0..100 {
            assert!(r.next_below(1) == 0);
            assert!(r.next_below(7) < 7);
        }
    }

    #[test]
    fn generation_is_deterministic_with_frozen_outputs() {
        let p = GenParams {
            leaves: 3,
            var_pool: 2,
            fragment: Fragment::Mll,
            seed: 42,
        };
        let got = gen_sequent(&p, &mut SplitMix64::new(p.seed));
        assert_eq!(
            got,
            Sequent(vec![F::dual("x0"), F::atom("x0"), F::Bot]),
            "rendered: {got}"
        );
        let again = gen_sequent(&p, &mut SplitMix64::new(p.seed));
        assert_eq!(got, again);

        let p = GenParams {
            leaves: 6,
            var_pool: 2,
            fragment: Fragment::Mall,
            seed: 7,
        };
        let got = gen_sequent(&p, &mut SplitMix64::new(p.seed));
        assert_eq!(
            got,
            Sequent(vec![
                F::dual("x1"),
                F::par(F::par(F::tensor(F::Bot, F::Bot), F::dual("x0")), F::One),
                F::atom("x1"),
            ]),
            "rendered: {got}"
        );
    }

    fn leaf_count(f: &F) -> u32 {
        match f {
            F::Atom(_) | F::Dual(_) | F::One | F::Bot | F::Top | F::Zero => 1,
            F::Tensor(a, b) | F::Par(a, b) | F::Plus(a, b) | F::With(a, b) => {
                leaf_count(a) + leaf_count(b)
            }
        }
    }

    fn multiplicative_units_in_normal_form(f: &F) -> bool {
        match f {
            F::Tensor(a, b) => {
                !matches!(**a, F::One)
                    && !matches!(**b, F::One)
                    && multiplicative_units_in_normal_form(a)
                    && multiplicative_units_in_normal_form(b)
            }
            F::Par(a, b) => {
                !matches!(**a, F::Bot)
                    && !matches!(**b, F::Bot)
                    && multiplicative_units_in_normal_form(a)
                    && multiplicative_units_in_normal_form(b)
            }
            F::Plus(a, b) | F::With(a, b) => {
                multiplicative_units_in_normal_form(a) && multiplicative_units_in_normal_form(b)
            }
            _ => true,
        }
    }

    fn multiplicative_only(f: &F) -> bool {
        match f {
            F::Plus(_, _) | F::With(_, _) => false,
            F::Tensor(a, b) | F::Par(a, b) => multiplicative_only(a) && multiplicative_only(b),
            _ => true,
        }
    }

    #[test]
    fn generated_sequents_respect_the_contract() {
        for &fragment in &[Fragment::Mll, Fragment::Mall] {
            for &leaves in &[1u32, 2, 3, 5, 8, 13, 30] {
                for seed in 0..20 {
                    let p = GenParams {
                        leaves,
                        var_pool: 3,
                        fragment,
                        seed,
                    };
                    let seq = gen_sequent(&p, &mut SplitMix64::new(seed));
                    assert!(!seq.0.is_empty() && seq.0.len() <= leaves as usize);
                    let total: u32 = seq.0.iter().map(leaf_count).sum();
                    assert_eq!(total, leaves, "{seq}");
                    assert!(!seq.has_additive_constant(), "{seq}");
                    assert!(
                        seq.0.iter().all(multiplicative_units_in_normal_form),
                        "{seq}"
                    );
                    if fragment == Fragment::Mll {
                        assert!(seq.0.iter().all(multiplicative_only), "{seq}");
                    }
                }
            }
        }
    }

    #[test]
    fn bench_records_are_internally_consistent() {
        let p = GenParams {
            leaves: 6,
            var_pool: 2,
            fragment: Fragment::Mall,
            seed: 11,
        };
        let records = run_bench(&p, 30, 200_000);
        assert_eq!(records.len(), 30);
        for (i, r) in records.iter().enumerate() {
            assert_eq!(r.index, i);
            assert_eq!(r.seed, 11);
            assert!(!r.verdict_mismatch, "verdicts diverged on {}", r.sequent);
            if !r.budget_exceeded {
                assert!(r.provable.is_some());
                assert!(
                    r.nodes_pruned <= r.nodes_unpruned,
                    "pruning did extra work on {}",
                    r.sequent
                );
                if r.pruned_at_root {
                    assert_eq!(r.provable, Some(false));
                    assert_eq!(r.nodes_pruned, 0);
                }
            } else {
                assert_eq!(r.provable, None);
            }
        }
        let rate = rejection_rate(&records).unwrap();
        assert!((0.0..=1.0).contains(&rate));
    }

    #[test]
    fn csv_output_has_the_fixed_header_and_quotes_sequents() {
        let p = GenParams {
            leaves: 4,
            var_pool: 2,
            fragment: Fragment::Mll,
            seed: 3,
        };
        let records = run_bench(&p, 5, 100_000);
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "seed,index,sequent,pruned_at_root,provable,time_unpruned_ns,\
             time_pruned_ns,nodes_unpruned,nodes_pruned,budget_exceeded"
        );
        assert_eq!(text.lines().count(), 6);
        // Multi-item sequents contain ", ", so their field must be quoted.
        let multi = records.iter().find(|r| r.sequent.contains(','));
        if let Some(r) = multi {
            assert!(text.contains(&format!("\"{}\"", r.sequent)));
        }
        // And the file parses back to the same number of rows.
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(rdr.records().count(), records.len());
    }

    #[test]
    fn summaries_are_cumulative_and_share_a_denominator() {
        let p = GenParams {
            leaves: 5,
            var_pool: 2,
            fragment: Fragment::Mall,
            seed: 5,
        };
        let records = run_bench(&p, 20, 100_000);
        let table = summarize(&records).unwrap();
        let mut prev = (0.0f64, 0.0f64);
        let mut rows = 0;
        for line in table.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols.len(), 6);
            let fu: f64 = cols[3].parse().unwrap();
            let fp: f64 = cols[4].parse().unwrap();
            assert!(fu >= prev.0 && fp >= prev.1, "fractions must not drop");
            prev = (fu, fp);
            rows += 1;
        }
        assert_eq!(rows, 9);
        // Everything at 6 leaves finishes far inside 100 s.
        assert_eq!(prev, (1.0, 1.0));

        assert_eq!(summarize(&[]), Err(BenchError::EmptyInput));
    }
}
