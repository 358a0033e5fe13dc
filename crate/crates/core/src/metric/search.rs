//! Exact shortest factorizations by bidirectional breadth-first search.
//!
//! Vertices of the Cayley graph are reduced words; both directions expand by
//! right multiplication with the symmetric step set, since the graph is
//! undirected. Whole layers are expanded at a time, always on the side with
//! the smaller frontier, and the search stops at the end of the first layer
//! that produces a meeting point. Visited sets store words packed into a
//! `u128` while they fit, falling back to boxed slices otherwise.

use std::hash::Hash;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::word::{push_reduced, Letter, Word};

/// Default cap on node expansions for one distance query.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

trait Codec {
    type Key: Hash + Eq + Clone;

    fn encode(&self, w: &[Letter]) -> Option<Self::Key>;
    fn decode(&self, key: &Self::Key, out: &mut Vec<Letter>);
}

/// `bits` per letter above an 8-bit length field.
struct Packed {
    bits: u32,
    capacity: usize,
}

impl Packed {
    fn for_rank(rank: usize) -> Packed {
        let bits = usize::BITS - (2 * rank - 1).leading_zeros();
        let bits = bits.max(1);
        Packed {
            bits,
            capacity: ((128 - 8) / bits as usize).min(255),
        }
    }
}

impl Codec for Packed {
    type Key = u128;

    fn encode(&self, w: &[Letter]) -> Option<u128> {
        if w.len() > self.capacity {
            return None;
        }
        let mut key = w.len() as u128;
        for (i, l) in w.iter().enumerate() {
            key |= (l.index() as u128) << (8 + i as u32 * self.bits);
        }
        Some(key)
    }

    fn decode(&self, key: &u128, out: &mut Vec<Letter>) {
        out.clear();
        let len = (key & 0xff) as usize;
        let mask = (1u128 << self.bits) - 1;
        for i in 0..len {
            let idx = (key >> (8 + i as u32 * self.bits)) & mask;
            out.push(Letter::from_index(idx as usize));
        }
    }
}

struct Boxed;

impl Codec for Boxed {
    type Key = Box<[Letter]>;

    fn encode(&self, w: &[Letter]) -> Option<Box<[Letter]>> {
        Some(w.into())
    }

    fn decode(&self, key: &Box<[Letter]>, out: &mut Vec<Letter>) {
        out.clear();
        out.extend_from_slice(key);
    }
}

enum Abort {
    Budget,
    TooLong,
}

/// Minimal number of factors from `steps` whose product is `target`.
///
/// `steps` must be closed under inversion and generate a group containing
/// `target`; otherwise the search runs until the budget is exhausted.
pub(crate) fn factorization_length(
    rank: usize,
    target: &Word,
    steps: &[Word],
    budget: u64,
) -> Result<u64> {
    if target.is_empty() {
        return Ok(0);
    }
    let packed = Packed::for_rank(rank);
    let outcome = match bidirectional(&packed, target, steps, budget) {
        Err(Abort::TooLong) => bidirectional(&Boxed, target, steps, budget),
        other => other,
    };
    match outcome {
        Ok(d) => Ok(d),
        Err(_) => Err(Error::BudgetExceeded { budget }),
    }
}

fn bidirectional<C: Codec>(
    codec: &C,
    target: &Word,
    steps: &[Word],
    budget: u64,
) -> std::result::Result<u64, Abort> {
    let start = codec.encode(&[]).ok_or(Abort::TooLong)?;
    let goal = codec.encode(target.letters()).ok_or(Abort::TooLong)?;

    let mut seen: [FxHashMap<C::Key, u32>; 2] = [FxHashMap::default(), FxHashMap::default()];
    seen[0].insert(start.clone(), 0);
    seen[1].insert(goal.clone(), 0);
    let mut frontier = [vec![start], vec![goal]];
    let mut depth = [0u32; 2];
    let mut expanded = 0u64;
    let mut buf = Vec::new();
    let mut next_word = Vec::new();

    loop {
        if frontier[0].is_empty() || frontier[1].is_empty() {
            // A finite component: only possible if `steps` generate a
            // subgroup missing the target.
            return Err(Abort::Budget);
        }
        let side = usize::from(frontier[1].len() < frontier[0].len());
        let other = 1 - side;
        let layer = std::mem::take(&mut frontier[side]);
        let mut next = Vec::with_capacity(layer.len() * steps.len());
        let mut best: Option<u32> = None;
        let d = depth[side] + 1;
        for key in &layer {
            expanded += 1;
            if expanded > budget {
                return Err(Abort::Budget);
            }
            codec.decode(key, &mut buf);
            for s in steps {
                next_word.clear();
                next_word.extend_from_slice(&buf);
                push_reduced(&mut next_word, s.letters().iter().copied());
                let k = codec.encode(&next_word).ok_or(Abort::TooLong)?;
                if seen[side].contains_key(&k) {
                    continue;
                }
                if let Some(&od) = seen[other].get(&k) {
                    let total = d + od;
                    best = Some(best.map_or(total, |b| b.min(total)));
                }
                seen[side].insert(k.clone(), d);
                next.push(k);
            }
        }
        if let Some(b) = best {
            return Ok(b as u64);
        }
        depth[side] = d;
        frontier[side] = next;
    }
}
