//! Pair scans over an enumerated ball.
//!
//! Ball elements are in shortlex order, so for `i < j` the pair `{g_i, g_j}`
//! first appears in `ball(|g_j|)`. Pairs are sharded by `j`; shard tables are
//! merged with `min`, which keeps the result independent of scheduling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};

use super::{accumulate, min_opt, AuditConfig, MinTable};
use crate::error::{Error, Result};
use crate::metric::GeneratingSet;
use crate::morphism::Endomorphism;
use crate::word::{ball, common_prefix_len, Word};

const SAMPLE_SHARDS: u64 = 64;

type Levels = Vec<Vec<Option<i64>>>;

fn empty_levels(rmax: usize, width: usize) -> Levels {
    vec![vec![None; width]; rmax + 1]
}

fn merge(mut a: Levels, b: Levels) -> Levels {
    for (ra, rb) in a.iter_mut().zip(b) {
        for (x, y) in ra.iter_mut().zip(rb) {
            *x = min_opt(*x, y);
        }
    }
    a
}

fn record(levels: &mut Levels, level: usize, (x, y): (i64, i64)) {
    let slot = &mut levels[level][x as usize];
    *slot = min_opt(*slot, Some(y));
}

/// Number of elements of the ball of each radius, from the sorted lengths.
fn prefix_counts(lens: &[usize], rmax: usize) -> Vec<usize> {
    (0..=rmax)
        .map(|r| lens.partition_point(|&l| l <= r))
        .collect()
}

fn pairs(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Scans all pairs of the largest ball that fits `cfg.pair_budget`
/// exhaustively, and `cfg.pair_budget` seeded random pairs of the rest.
fn scan<F>(
    lens: &[usize],
    rmax: usize,
    width: usize,
    scale: i64,
    cfg: &AuditConfig,
    f: F,
) -> MinTable
where
    F: Fn(usize, usize) -> (i64, i64) + Sync,
{
    let counts = prefix_counts(lens, rmax);
    let exact_radius = (0..=rmax)
        .rev()
        .find(|&r| pairs(counts[r]) <= cfg.pair_budget)
        .unwrap_or(0);
    let m = counts[exact_radius];
    let n = lens.len();

    let exact = (1..m)
        .into_par_iter()
        .fold(
            || empty_levels(rmax, width),
            |mut acc, j| {
                for i in 0..j {
                    record(&mut acc, lens[j], f(i, j));
                }
                acc
            },
        )
        .reduce(|| empty_levels(rmax, width), merge);

    let levels = if m < n {
        let per_shard = cfg.pair_budget.div_ceil(SAMPLE_SHARDS);
        let sampled = (0..SAMPLE_SHARDS)
            .into_par_iter()
            .map(|shard| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(shard);
                let mut acc = empty_levels(rmax, width);
                for _ in 0..per_shard {
                    let j = rng.gen_range(m..n);
                    let i = rng.gen_range(0..j);
                    record(&mut acc, lens[j], f(i, j));
                }
                acc
            })
            .reduce(|| empty_levels(rmax, width), merge);
        merge(exact, sampled)
    } else {
        exact
    };
    MinTable {
        by_radius: accumulate(levels),
        scale,
        exact_radius,
    }
}

pub(super) fn gromov_table(
    phi: &Endomorphism,
    p: &Word,
    rmax: usize,
    cfg: &AuditConfig,
) -> Result<MinTable> {
    let elems = ball(phi.rank(), rmax);
    let pinv = p.inverse();
    let src: Vec<Word> = elems.iter().map(|g| &pinv * g).collect();
    let img: Vec<Word> = elems
        .iter()
        .map(|g| &pinv * &phi.apply_unchecked(g))
        .collect();
    let lens: Vec<usize> = elems.iter().map(Word::len).collect();
    let width = 2 * (rmax + p.len()) + 1;
    let table = scan(&lens, rmax, width, 2, cfg, |i, j| {
        let x = common_prefix_len(src[i].letters(), src[j].letters());
        let y = common_prefix_len(img[i].letters(), img[j].letters());
        (2 * x as i64, 2 * y as i64)
    });
    Ok(table)
}

pub(super) fn word_metric_table(
    phi: &Endomorphism,
    rmax: usize,
    cfg: &AuditConfig,
) -> Result<MinTable> {
    let elems = ball(phi.rank(), rmax);
    let img: Vec<Word> = elems.iter().map(|g| phi.apply_unchecked(g)).collect();
    let lens: Vec<usize> = elems.iter().map(Word::len).collect();
    let dist = |a: &Word, b: &Word| {
        (a.len() + b.len() - 2 * common_prefix_len(a.letters(), b.letters())) as i64
    };
    let table = scan(&lens, rmax, 2 * rmax + 1, 1, cfg, |i, j| {
        (dist(&elems[i], &elems[j]), dist(&img[i], &img[j]))
    });
    Ok(table)
}

/// Exact lengths of `words` over `s`, computed in parallel.
fn lengths(s: &GeneratingSet, words: &[Word], budget: u64) -> Result<FxHashMap<Word, i64>> {
    let values = words
        .par_iter()
        .map(|w| s.length(w, budget).map(|d| d as i64))
        .collect::<Result<Vec<i64>>>()?;
    Ok(words.iter().cloned().zip(values).collect())
}

pub(super) fn metric_equiv_table(
    a: &GeneratingSet,
    a2: &GeneratingSet,
    rmax: usize,
    cfg: &AuditConfig,
) -> Result<MinTable> {
    let elems = ball(a.ambient_basis().rank(), rmax);
    if pairs(elems.len()) > cfg.pair_budget {
        return Err(Error::BudgetExceeded {
            budget: cfg.pair_budget,
        });
    }
    let inv: Vec<Word> = elems.iter().map(Word::inverse).collect();
    let mut needed: FxHashSet<Word> = elems.iter().cloned().collect();
    for (j, h) in elems.iter().enumerate() {
        for g in &inv[..j] {
            needed.insert(g * h);
        }
    }
    let mut needed: Vec<Word> = needed.into_iter().collect();
    needed.sort();
    let da = lengths(a, &needed, cfg.search_budget)?;
    let db = lengths(a2, &needed, cfg.search_budget)?;

    let lens: Vec<usize> = elems.iter().map(Word::len).collect();
    let base_a: Vec<i64> = elems.iter().map(|g| da[g]).collect();
    let base_b: Vec<i64> = elems.iter().map(|g| db[g]).collect();
    let width = 2 * base_a.iter().copied().max().unwrap_or(0) as usize + 1;
    let table = scan(&lens, rmax, width, 2, cfg, |i, j| {
        let u = &inv[i] * &elems[j];
        (
            base_a[i] + base_a[j] - da[&u],
            base_b[i] + base_b[j] - db[&u],
        )
    });
    Ok(table)
}
