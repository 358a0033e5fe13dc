//! Whitehead automorphisms and greedy cyclic-length minimization.
//!
//! A type II Whitehead automorphism is given by a multiplier letter `m` and a
//! set `S ⊆ Ã \ {m, m⁻¹}`; it fixes `m` and sends every other letter `x` to
//! `[m⁻¹ if x⁻¹ ∈ S] · x · [m if x ∈ S]`. Permutation automorphisms (type I)
//! never change cyclic length, so only type II moves matter for descent.

use crate::word::{push_reduced, Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WhiteheadMove {
    pub multiplier: Letter,
    /// Bitmask over letter indices.
    pub set: u64,
}

impl WhiteheadMove {
    fn in_set(&self, l: Letter) -> bool {
        self.set >> l.index() & 1 == 1
    }

    /// Image of a word (freely reduced, not cyclically reduced).
    pub fn apply(&self, w: &Word) -> Word {
        let m = self.multiplier;
        let mut out = Vec::with_capacity(w.len() * 2);
        for &x in w.letters() {
            if x == m || x == m.inverse() {
                push_reduced(&mut out, [x]);
                continue;
            }
            if self.in_set(x.inverse()) {
                push_reduced(&mut out, [m.inverse()]);
            }
            push_reduced(&mut out, [x]);
            if self.in_set(x) {
                push_reduced(&mut out, [m]);
            }
        }
        Word::from_reduced(out)
    }
}

/// All type II Whitehead automorphisms of `F_rank`, in a fixed order.
///
/// Panics for ranks above 16 (the set would not fit the bitmask and the
/// enumeration is exponential anyway).
pub fn whitehead_moves(rank: usize) -> impl Iterator<Item = WhiteheadMove> {
    assert!(rank <= 16, "Whitehead enumeration limited to rank 16");
    Letter::all(rank).flat_map(move |m| {
        let others: Vec<Letter> = Letter::all(rank)
            .filter(|&l| l.generator() != m.generator())
            .collect();
        (0u64..1 << others.len()).map(move |mask| {
            let mut set = 0u64;
            for (bit, l) in others.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    set |= 1 << l.index();
                }
            }
            WhiteheadMove { multiplier: m, set }
        })
    })
}

/// Greedily applies cyclic-length-reducing Whitehead moves to the cyclic
/// core of `u`; returns a cyclic word of minimal length in its orbit.
pub fn minimize_cyclic(u: &Word, rank: usize) -> Word {
    let (mut core, _) = u.cyclic_reduce();
    loop {
        let len = core.len();
        if len <= 1 {
            return core;
        }
        let better = whitehead_moves(rank)
            .map(|mv| mv.apply(&core))
            .find(|img| img.cyclic_length() < len);
        match better {
            Some(img) => core = img.cyclic_reduce().0,
            None => return core,
        }
    }
}

/// `u` belongs to some basis of `F_rank`.
pub fn is_primitive(u: &Word, rank: usize) -> bool {
    minimize_cyclic(u, rank).len() == 1
}
