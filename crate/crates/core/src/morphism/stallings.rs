//! Folded core graphs of finitely generated subgroups.

use crate::word::{Letter, Word};

const NONE: u32 = u32::MAX;

/// Folded, core, connected graph with edges labeled by generators and a
/// distinguished base vertex (always vertex 0).
///
/// Adjacency is stored per vertex as one slot per letter of `Ã`; an edge
/// `v --a--> w` fills slot `a` of `v` and slot `a⁻¹` of `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StallingsGraph {
    rank: usize,
    slots: Vec<u32>,
}

impl StallingsGraph {
    /// Folds the petal graph of `generators` and prunes it to its core.
    pub fn new<'a, I>(rank: usize, generators: I) -> StallingsGraph
    where
        I: IntoIterator<Item = &'a Word>,
    {
        let mut folder = Folder::new(rank);
        for w in generators {
            folder.add_loop(w);
        }
        folder.finish()
    }

    pub fn rank_of_ambient(&self) -> usize {
        self.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.slots.len() / (2 * self.rank)
    }

    pub fn edge_count(&self) -> usize {
        self.slots.iter().filter(|&&s| s != NONE).count() / 2
    }

    /// Rank of the subgroup: `E - V + 1`.
    pub fn rank(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    pub fn target(&self, vertex: usize, letter: Letter) -> Option<usize> {
        if letter.generator() >= self.rank {
            return None;
        }
        match self.slots[vertex * 2 * self.rank + letter.index()] {
            NONE => None,
            t => Some(t as usize),
        }
    }

    /// True iff `w` reads a closed path at the base vertex.
    pub fn contains(&self, w: &Word) -> bool {
        let mut v = 0;
        for &l in w.letters() {
            match self.target(v, l) {
                Some(t) => v = t,
                None => return false,
            }
        }
        v == 0
    }

    /// True iff the subgroup is the whole free group (the graph is a rose).
    pub fn is_whole_group(&self) -> bool {
        self.vertex_count() == 1 && self.edge_count() == self.rank
    }

    /// Edges `(from, letter, to)` with positive labels.
    pub fn edges(&self) -> Vec<(usize, Letter, usize)> {
        let mut out = Vec::new();
        for v in 0..self.vertex_count() {
            for g in 0..self.rank {
                let l = Letter::positive(g);
                if let Some(t) = self.target(v, l) {
                    out.push((v, l, t));
                }
            }
        }
        out
    }
}

struct Folder {
    rank: usize,
    slots: Vec<u32>,
    parent: Vec<u32>,
    pending: Vec<(u32, u32)>,
}

impl Folder {
    fn new(rank: usize) -> Folder {
        let mut f = Folder {
            rank,
            slots: Vec::new(),
            parent: Vec::new(),
            pending: Vec::new(),
        };
        f.add_vertex();
        f
    }

    fn add_vertex(&mut self) -> u32 {
        let v = self.parent.len() as u32;
        self.parent.push(v);
        self.slots.extend(std::iter::repeat_n(NONE, 2 * self.rank));
        v
    }

    fn find(&mut self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            let p = self.parent[v as usize];
            self.parent[v as usize] = self.parent[p as usize];
            v = p;
        }
        v
    }

    fn slot(&self, v: u32, l: usize) -> usize {
        v as usize * 2 * self.rank + l
    }

    fn add_loop(&mut self, w: &Word) {
        let n = w.len();
        let mut from = 0;
        for (i, &l) in w.letters().iter().enumerate() {
            let to = if i + 1 == n { 0 } else { self.add_vertex() };
            self.add_edge(from, l, to);
            from = to;
        }
    }

    fn attach(&mut self, u: u32, l: usize, v: u32) {
        let s = self.slot(u, l);
        match self.slots[s] {
            NONE => self.slots[s] = v,
            t => self.pending.push((t, v)),
        }
    }

    fn add_edge(&mut self, u: u32, l: Letter, v: u32) {
        let u = self.find(u);
        let v = self.find(v);
        self.attach(u, l.index(), v);
        self.attach(v, l.inverse().index(), u);
        self.fold();
    }

    fn fold(&mut self) {
        while let Some((x, y)) = self.pending.pop() {
            let x = self.find(x);
            let y = self.find(y);
            if x == y {
                continue;
            }
            // keep the smaller id so the base vertex 0 survives
            let (keep, drop) = if x < y { (x, y) } else { (y, x) };
            self.parent[drop as usize] = keep;
            for l in 0..2 * self.rank {
                let s = self.slot(drop, l);
                let t = std::mem::replace(&mut self.slots[s], NONE);
                if t != NONE {
                    self.attach(keep, l, t);
                }
            }
        }
    }

    fn finish(mut self) -> StallingsGraph {
        let width = 2 * self.rank;
        let count = self.parent.len();
        let mut alive: Vec<bool> = (0..count as u32).map(|v| self.find(v) == v).collect();
        for v in (0..count).filter(|&v| alive[v]) {
            for l in 0..width {
                let s = v * width + l;
                if self.slots[s] != NONE {
                    self.slots[s] = self.find(self.slots[s]);
                }
            }
        }

        // Prune hanging trees.
        let degree = |slots: &[u32], v: usize| {
            slots[v * width..(v + 1) * width]
                .iter()
                .filter(|&&s| s != NONE)
                .count()
        };
        let mut stack: Vec<usize> = (1..count)
            .filter(|&v| alive[v] && degree(&self.slots, v) <= 1)
            .collect();
        while let Some(v) = stack.pop() {
            if !alive[v] || degree(&self.slots, v) > 1 {
                continue;
            }
            alive[v] = false;
            for l in 0..width {
                let t = std::mem::replace(&mut self.slots[v * width + l], NONE);
                if t != NONE {
                    let back = Letter::from_index(l).inverse().index();
                    self.slots[t as usize * width + back] = NONE;
                    if t != 0 && degree(&self.slots, t as usize) <= 1 {
                        stack.push(t as usize);
                    }
                }
            }
        }

        let mut relabel = vec![NONE; count];
        let mut next = 0u32;
        for v in 0..count {
            if alive[v] {
                relabel[v] = next;
                next += 1;
            }
        }
        let mut slots = Vec::with_capacity(next as usize * width);
        for v in (0..count).filter(|&v| alive[v]) {
            slots.extend(self.slots[v * width..(v + 1) * width].iter().map(|&t| {
                if t == NONE {
                    NONE
                } else {
                    relabel[t as usize]
                }
            }));
        }
        StallingsGraph {
            rank: self.rank,
            slots,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Basis;

    fn words(list: &[&str]) -> Vec<Word> {
        let b = Basis::standard(2);
        list.iter().map(|s| b.parse_word(s).unwrap()).collect()
    }

    #[test]
    fn ranks() {
        assert_eq!(StallingsGraph::new(2, &words(&["a^2", "a b"])).rank(), 2);
        assert_eq!(StallingsGraph::new(2, &words(&["a b a^-1"])).rank(), 1);
        assert_eq!(StallingsGraph::new(2, &words(&["a", "a^-1"])).rank(), 1);
        assert_eq!(StallingsGraph::new(2, &words(&["1"])).rank(), 0);
        assert_eq!(StallingsGraph::new(2, &words(&["a", "b", "a b"])).rank(), 2);
    }

    #[test]
    fn membership() {
        let g = StallingsGraph::new(2, &words(&["a^2", "b^2"]));
        assert!(g.contains(&words(&["a^2 b^2"])[0]));
        assert!(!g.contains(&words(&["a"])[0]));
        assert!(g.contains(&Word::identity()));
        assert!(!g.is_whole_group());
    }

    #[test]
    fn conjugated_generator_graph_is_core() {
        // the base vertex keeps its hanging edge
        let g = StallingsGraph::new(2, &words(&["a b a^-1"]));
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 2);
        assert!(g.contains(&words(&["a b^-3 a^-1"])[0]));
        assert!(!g.contains(&words(&["b"])[0]));
    }

    #[test]
    fn whole_group() {
        let g = StallingsGraph::new(2, &words(&["a b", "b"]));
        assert!(g.is_whole_group());
        let g = StallingsGraph::new(2, &words(&["a b", "a b^-1"]));
        assert!(!g.is_whole_group());
        assert_eq!(g.rank(), 2);
    }
}
