//! Gromov-product minima at basepoint 1 by a single walk over the ball.
//!
//! With `p = 1`, `(g|h) = |c|` where `c = g ∧ h`, so pairs are grouped by
//! their branch point `c`. Writing `L_R(c)` for the least `(gφ|cφ)` over
//! `g` in the subtree of `c` inside `ball(R)`, the tree structure of the
//! target gives exactly
//!
//! * `L_R(c) = min(|cφ|, min_l min(L_R(cl), λ_l))` with `λ_l = (cφ|(cl)φ)`,
//! * pairs `{c, g}` with `g` below `cl`: `min(L_R(cl), λ_l)`,
//! * pairs across children `l ≠ l'`: `min(L_R(cl), L_R(cl'), ((cl)φ|(cl')φ))`.
//!
//! Each identity holds because `(x|z) ≥ min((x|y), (y|z))` in a tree, with
//! equality whenever the two terms on the right differ.

use rayon::prelude::*;

use super::MinTable;
use crate::morphism::Endomorphism;
use crate::word::{common_prefix_len, push_reduced, sphere, Letter, Word};

const MAX_RADIUS: usize = 24;
const MAX_CHILDREN: usize = 8;

type Column = [u32; MAX_RADIUS + 1];

const UNSET: u32 = u32::MAX;

pub(super) fn supports(rank: usize, radius: usize) -> bool {
    radius <= MAX_RADIUS && 2 * rank <= MAX_CHILDREN
}

/// `t[d][R]`: least `(gφ|hφ)` over pairs of `ball(R)` branching at depth `d`.
struct Walk<'a> {
    phi: &'a Endomorphism,
    rank: usize,
    rmax: usize,
    t: Vec<Column>,
    /// `images[d][slot]`: images of the children currently open at depth `d`.
    images: Vec<Vec<Vec<Letter>>>,
    /// `cols[d][i]`: `L_R` of the `i`-th child of the open node at depth `d`.
    cols: Vec<Vec<Column>>,
}

impl<'a> Walk<'a> {
    fn new(phi: &'a Endomorphism, rmax: usize) -> Walk<'a> {
        let rank = phi.rank();
        Walk {
            phi,
            rank,
            rmax,
            t: vec![[UNSET; MAX_RADIUS + 1]; rmax + 1],
            images: vec![vec![Vec::new(); 2 * rank]; rmax + 2],
            cols: vec![vec![[UNSET; MAX_RADIUS + 1]; 2 * rank]; rmax + 1],
        }
    }

    /// Walks the subtree whose root image is `images[d][slot]`; returns `L_R`.
    fn visit(&mut self, d: usize, slot: usize, last: Option<Letter>) -> Column {
        let own_len = self.images[d][slot].len() as u32;
        let mut own = [UNSET; MAX_RADIUS + 1];
        own[d..=self.rmax].fill(own_len);
        if d == self.rmax {
            return own;
        }

        let mut kids = [Letter::positive(0); MAX_CHILDREN];
        let mut lam = [0u32; MAX_CHILDREN];
        let mut n = 0;
        {
            let (lo, hi) = self.images.split_at_mut(d + 1);
            let parent = &lo[d][slot];
            for l in Letter::all(self.rank) {
                if Some(l.inverse()) == last {
                    continue;
                }
                let buf = &mut hi[0][l.index()];
                buf.clear();
                buf.extend_from_slice(parent);
                self.phi.apply_into(&[l], buf);
                lam[n] = common_prefix_len(parent, buf) as u32;
                kids[n] = l;
                n += 1;
            }
        }
        let mut cross = [[0u32; MAX_CHILDREN]; MAX_CHILDREN];
        for i in 0..n {
            for j in i + 1..n {
                let level = &self.images[d + 1];
                cross[i][j] =
                    common_prefix_len(&level[kids[i].index()], &level[kids[j].index()]) as u32;
            }
        }
        for (i, &kid) in kids[..n].iter().enumerate() {
            let col = self.visit(d + 1, kid.index(), Some(kid));
            self.cols[d][i] = col;
        }
        combine(
            d,
            self.rmax,
            &mut own,
            &self.cols[d][..n],
            &lam[..n],
            &cross,
            &mut self.t[d],
        );
        own
    }
}

fn combine(
    d: usize,
    rmax: usize,
    own: &mut Column,
    cols: &[Column],
    lam: &[u32],
    cross: &[[u32; MAX_CHILDREN]; MAX_CHILDREN],
    t: &mut Column,
) {
    let n = cols.len();
    for r in d + 1..=rmax {
        let mut ymin = UNSET;
        for i in 0..n {
            let v = cols[i][r].min(lam[i]);
            own[r] = own[r].min(v);
            ymin = ymin.min(v);
            for j in i + 1..n {
                ymin = ymin.min(cols[i][r].min(cols[j][r]).min(cross[i][j]));
            }
        }
        t[r] = t[r].min(ymin);
    }
}

/// Depth at which the walk is split into parallel tasks.
fn split_depth(rank: usize, rmax: usize) -> usize {
    let mut d = 0;
    while d < rmax && sphere_count(rank, d) < 64 {
        d += 1;
    }
    d
}

fn sphere_count(rank: usize, d: usize) -> u128 {
    if d == 0 {
        1
    } else {
        2 * rank as u128 * (2 * rank as u128 - 1).pow(d as u32 - 1)
    }
}

pub(super) fn gromov_table(phi: &Endomorphism, rmax: usize) -> MinTable {
    let rank = phi.rank();
    let s = split_depth(rank, rmax);
    let roots = sphere(rank, s);
    let results: Vec<(Column, Vec<Column>)> = roots
        .par_iter()
        .map(|c| {
            let mut walk = Walk::new(phi, rmax);
            walk.images[s][0] = phi.apply_unchecked(c).into_letters();
            let col = walk.visit(s, 0, c.last());
            (col, walk.t)
        })
        .collect();

    let mut t = vec![[UNSET; MAX_RADIUS + 1]; rmax + 1];
    for (_, sub) in &results {
        for (dst, src) in t.iter_mut().zip(sub) {
            for r in 0..=rmax {
                dst[r] = dst[r].min(src[r]);
            }
        }
    }
    let cols: Vec<Column> = results.into_iter().map(|(c, _)| c).collect();
    let mut next = 0;
    upper(phi, &Word::identity(), s, rmax, &cols, &mut next, &mut t);
    debug_assert_eq!(next, cols.len());

    let by_radius = (0..=rmax)
        .map(|r| {
            let mut row = vec![None; 2 * r + 1];
            for (d, col) in t.iter().enumerate().take(r) {
                if col[r] != UNSET {
                    row[2 * d] = Some(2 * col[r] as i64);
                }
            }
            row
        })
        .collect();
    MinTable {
        by_radius,
        scale: 2,
        exact_radius: rmax,
    }
}

/// Nodes above the split depth, visited in the same order as `sphere`, so
/// the `next` counter walks the parallel results in order.
fn upper(
    phi: &Endomorphism,
    c: &Word,
    s: usize,
    rmax: usize,
    below: &[Column],
    next: &mut usize,
    t: &mut [Column],
) -> Column {
    let d = c.len();
    if d == s {
        *next += 1;
        return below[*next - 1];
    }
    let image = phi.apply_unchecked(c);
    let mut own = [UNSET; MAX_RADIUS + 1];
    own[d..=rmax].fill(image.len() as u32);
    let kids: Vec<Letter> = Letter::all(phi.rank())
        .filter(|&l| Some(l.inverse()) != c.last())
        .collect();
    let kid_images: Vec<Vec<Letter>> = kids
        .iter()
        .map(|&l| {
            let mut buf = image.letters().to_vec();
            push_reduced(
                &mut buf,
                phi.apply_unchecked(&Word::letter(l)).into_letters(),
            );
            buf
        })
        .collect();
    let lam: Vec<u32> = kid_images
        .iter()
        .map(|k| common_prefix_len(image.letters(), k) as u32)
        .collect();
    let mut cross = [[0u32; MAX_CHILDREN]; MAX_CHILDREN];
    for i in 0..kids.len() {
        for j in i + 1..kids.len() {
            cross[i][j] = common_prefix_len(&kid_images[i], &kid_images[j]) as u32;
        }
    }
    let cols: Vec<Column> = kids
        .iter()
        .map(|&l| upper(phi, &(c * &Word::letter(l)), s, rmax, below, next, t))
        .collect();
    combine(d, rmax, &mut own, &cols, &lam, &cross, &mut t[d]);
    own
}
