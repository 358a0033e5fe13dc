//! Endomorphisms of free groups.
//!
//! Composition follows right-action notation: `phi.compose(&psi)` applies
//! `phi` first, so `g(φψ) = (gφ)ψ`.

mod stallings;
mod whitehead;

use std::collections::{HashSet, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::word::{push_reduced, Basis, Letter, Word};

pub use stallings::StallingsGraph;
pub use whitehead::{is_primitive, minimize_cyclic, whitehead_moves, WhiteheadMove};

/// A permutation of `Ã` commuting with inversion: `(a⁻¹)π = (aπ)⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedPermutation {
    images: Vec<Letter>,
}

impl SignedPermutation {
    /// From the images of the positive letters.
    pub fn new(images: Vec<Letter>) -> Result<SignedPermutation> {
        let n = images.len();
        let mut seen = vec![false; n];
        for l in &images {
            let g = l.generator();
            if g >= n || seen[g] {
                return Err(Error::InvalidArgument(
                    "signed permutation must permute the generators".into(),
                ));
            }
            seen[g] = true;
        }
        Ok(SignedPermutation { images })
    }

    /// From a full table over `Ã`, checking bijectivity and equivariance.
    pub fn from_table(rank: usize, table: &[(Letter, Letter)]) -> Result<SignedPermutation> {
        let mut map = vec![None; 2 * rank];
        for &(from, to) in table {
            if from.generator() >= rank || to.generator() >= rank {
                return Err(Error::GeneratorOutOfRange {
                    index: from.generator().max(to.generator()),
                    rank,
                });
            }
            if map[from.index()].replace(to).is_some_and(|prev| prev != to) {
                return Err(Error::InvalidArgument(
                    "letter mapped twice in permutation table".into(),
                ));
            }
        }
        let mut images = Vec::with_capacity(rank);
        for g in 0..rank {
            let pos = map[Letter::positive(g).index()];
            let neg = map[Letter::negative(g).index()];
            match (pos, neg) {
                (Some(p), Some(q)) if q == p.inverse() => images.push(p),
                (Some(p), None) => images.push(p),
                (None, Some(q)) => images.push(q.inverse()),
                (None, None) => {
                    return Err(Error::InvalidArgument(format!(
                        "generator {g} missing from permutation table"
                    )))
                }
                _ => {
                    return Err(Error::InvalidArgument(
                        "permutation table does not commute with inversion".into(),
                    ))
                }
            }
        }
        SignedPermutation::new(images)
    }

    pub fn identity(rank: usize) -> SignedPermutation {
        SignedPermutation {
            images: (0..rank).map(Letter::positive).collect(),
        }
    }

    /// `a ↦ a⁻¹` for every generator.
    pub fn epsilon(rank: usize) -> SignedPermutation {
        SignedPermutation {
            images: (0..rank).map(Letter::negative).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(rank: usize, rng: &mut R) -> SignedPermutation {
        let mut gens: Vec<usize> = (0..rank).collect();
        gens.shuffle(rng);
        SignedPermutation {
            images: gens
                .into_iter()
                .map(|g| Letter::new(g, rng.gen()))
                .collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, l: Letter) -> Letter {
        let img = self.images[l.generator()];
        if l.is_inverse() {
            img.inverse()
        } else {
            img
        }
    }

    pub fn images(&self) -> &[Letter] {
        &self.images
    }

    /// `a->b a^-1->b^-1 ...` over all of `Ã`.
    pub fn format(&self, basis: &Basis) -> String {
        let letter = |l: Letter| {
            let name = basis.name(l.generator());
            if l.is_inverse() {
                format!("{name}^-1")
            } else {
                name.to_string()
            }
        };
        Letter::all(self.rank())
            .map(|l| format!("{}->{}", letter(l), letter(self.apply(l))))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// An endomorphism of `F_A`, given by the image of each generator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Endomorphism {
    basis: Basis,
    images: Vec<Word>,
    max_image_len: usize,
}

impl fmt::Debug for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}

impl Endomorphism {
    pub fn new(basis: Basis, images: Vec<Word>) -> Result<Endomorphism> {
        if images.len() != basis.rank() {
            return Err(Error::InvalidArgument(format!(
                "expected {} images, got {}",
                basis.rank(),
                images.len()
            )));
        }
        for w in &images {
            basis.check(w)?;
        }
        let max_image_len = images.iter().map(Word::len).max().unwrap_or(0);
        Ok(Endomorphism {
            basis,
            images,
            max_image_len,
        })
    }

    pub fn identity(basis: &Basis) -> Endomorphism {
        let images = (0..basis.rank()).map(|g| basis.gen(g)).collect();
        Endomorphism::new(basis.clone(), images).expect("identity is valid")
    }

    /// The inner automorphism `λ_x : g ↦ x⁻¹ g x`.
    pub fn inner(basis: &Basis, x: &Word) -> Result<Endomorphism> {
        basis.check(x)?;
        let images = (0..basis.rank())
            .map(|g| basis.gen(g).conjugate_by(x))
            .collect();
        Endomorphism::new(basis.clone(), images)
    }

    pub fn from_permutation(basis: &Basis, pi: &SignedPermutation) -> Result<Endomorphism> {
        if pi.rank() != basis.rank() {
            return Err(Error::BasisMismatch);
        }
        let images = pi.images.iter().map(|&l| Word::letter(l)).collect();
        Endomorphism::new(basis.clone(), images)
    }

    /// `ε^A : a ↦ a⁻¹`.
    pub fn epsilon(basis: &Basis) -> Endomorphism {
        Endomorphism::from_permutation(basis, &SignedPermutation::epsilon(basis.rank()))
            .expect("epsilon is valid")
    }

    /// `μ_{u,v}` on a rank-2 basis: `a ↦ u`, `b ↦ v`.
    pub fn mu(basis: &Basis, u: &Word, v: &Word) -> Result<Endomorphism> {
        if basis.rank() != 2 {
            return Err(Error::InvalidArgument(
                "μ_{u,v} needs a rank-2 basis".into(),
            ));
        }
        Endomorphism::new(basis.clone(), vec![u.clone(), v.clone()])
    }

    /// The Nielsen transformations `μ_{b,a}`, `μ_{a⁻¹,b}`, `μ_{ab,b}`.
    pub fn nielsen_generators(basis: &Basis) -> Result<[Endomorphism; 3]> {
        if basis.rank() != 2 {
            return Err(Error::InvalidArgument(
                "Nielsen generators are defined for rank 2".into(),
            ));
        }
        let a = basis.gen(0);
        let b = basis.gen(1);
        Ok([
            Endomorphism::mu(basis, &b, &a)?,
            Endomorphism::mu(basis, &a.inverse(), &b)?,
            Endomorphism::mu(basis, &(&a * &b), &b)?,
        ])
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image_of(&self, generator: usize) -> &Word {
        &self.images[generator]
    }

    /// `M_φ = max |aφ|`.
    pub fn max_image_len(&self) -> usize {
        self.max_image_len
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        self.basis.check(w)?;
        Ok(self.apply_unchecked(w))
    }

    pub(crate) fn apply_unchecked(&self, w: &Word) -> Word {
        let mut out = Vec::with_capacity(w.len() * self.max_image_len);
        self.apply_into(w.letters(), &mut out);
        Word::from_reduced(out)
    }

    /// Appends the image of `letters` to a reduced buffer.
    pub(crate) fn apply_into(&self, letters: &[Letter], out: &mut Vec<Letter>) {
        for &l in letters {
            let img = &self.images[l.generator()];
            if l.is_inverse() {
                push_reduced(out, img.letters().iter().rev().map(|x| x.inverse()));
            } else {
                push_reduced(out, img.letters().iter().copied());
            }
        }
    }

    /// `self` first, then `other`.
    pub fn compose(&self, other: &Endomorphism) -> Result<Endomorphism> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch);
        }
        let images = self
            .images
            .iter()
            .map(|w| other.apply_unchecked(w))
            .collect();
        Endomorphism::new(self.basis.clone(), images)
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(g, w)| w.letters() == [Letter::positive(g)])
    }

    /// Folded core graph of the image subgroup `⟨aφ : a ∈ A⟩`.
    pub fn image_graph(&self) -> StallingsGraph {
        StallingsGraph::new(self.rank(), &self.images)
    }

    /// Injective iff the image subgroup has rank `|A|` (free groups are
    /// Hopfian, so `F_A ↠ ⟨Aφ⟩ ≅ F_{|A|}` is then an isomorphism).
    pub fn is_injective(&self) -> bool {
        self.image_graph().rank() == self.rank()
    }

    pub fn is_automorphism(&self) -> bool {
        let graph = self.image_graph();
        graph.rank() == self.rank() && graph.is_whole_group()
    }

    /// True when every letter maps to a letter and the letter map is a
    /// signed permutation.
    pub fn as_permutation(&self) -> Option<SignedPermutation> {
        let images = self
            .images
            .iter()
            .map(|w| (w.len() == 1).then(|| w.letters()[0]))
            .collect::<Option<Vec<_>>>()?;
        SignedPermutation::new(images).ok()
    }

    /// Inverse automorphism, via Nielsen reduction of the image tuple while
    /// recording the moves.
    pub fn invert(&self) -> Result<Endomorphism> {
        if !self.is_automorphism() {
            return Err(Error::NotAutomorphism);
        }
        let mut state = NielsenState {
            tuple: self.images.clone(),
            memory: (0..self.rank()).map(|g| self.basis.gen(g)).collect(),
        };
        while !state.tuple.iter().all(|w| w.len() == 1) {
            if let Some(mv) = state.first_reducing_move() {
                state.apply(mv);
            } else {
                state = state.escape_plateau();
            }
        }
        let mut inverse = vec![Word::identity(); self.rank()];
        for (t, e) in state.tuple.iter().zip(&state.memory) {
            let l = t.letters()[0];
            inverse[l.generator()] = if l.is_inverse() {
                e.inverse()
            } else {
                e.clone()
            };
        }
        let inv = Endomorphism::new(self.basis.clone(), inverse)?;
        debug_assert!(self.compose(&inv)?.is_identity());
        Ok(inv)
    }

    /// Whether `|gφ| = |g|` for every `g` in the basis ball of `radius`;
    /// returns the first counterexample otherwise.
    pub fn length_change_within(&self, radius: usize) -> Option<(Word, Word)> {
        crate::word::ball(self.rank(), radius)
            .into_iter()
            .map(|g| {
                let img = self.apply_unchecked(&g);
                (g, img)
            })
            .find(|(g, img)| g.len() != img.len())
    }

    /// `a -> a b, b -> b`.
    pub fn format(&self) -> String {
        self.images
            .iter()
            .enumerate()
            .map(|(g, w)| format!("{} -> {}", self.basis.name(g), self.basis.format_word(w)))
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Parses `{"basis": ["a","b"], "images": {"a": "a b", "b": "b"}}`.
    pub fn from_json(text: &str) -> Result<Endomorphism> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let names = v
            .get("basis")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Format("missing `basis` array".into()))?
            .iter()
            .map(|n| {
                n.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::Format("basis entries must be strings".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let basis = Basis::new(names)?;
        let table = v
            .get("images")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Format("missing `images` object".into()))?;
        for key in table.keys() {
            if basis.index_of(key).is_none() {
                return Err(Error::UnknownGenerator(key.clone()));
            }
        }
        let images = basis
            .names()
            .iter()
            .map(|name| {
                let text = table
                    .get(name)
                    .ok_or_else(|| Error::Format(format!("no image for `{name}`")))?
                    .as_str()
                    .ok_or_else(|| Error::Format(format!("image of `{name}` must be a string")))?;
                basis.parse_word(text)
            })
            .collect::<Result<Vec<_>>>()?;
        Endomorphism::new(basis, images)
    }

    /// Inverse of [`Endomorphism::from_json`]; images are listed in basis order.
    pub fn to_json(&self) -> String {
        let quote = |s: &str| Value::String(s.to_string()).to_string();
        let basis = self
            .basis
            .names()
            .iter()
            .map(|n| quote(n))
            .collect::<Vec<_>>()
            .join(", ");
        let images = self
            .images
            .iter()
            .enumerate()
            .map(|(g, w)| {
                format!(
                    "{}: {}",
                    quote(self.basis.name(g)),
                    quote(&self.basis.format_word(w))
                )
            })
            .collect::<Vec<_>>()
            .join(", ");
        format!("{{\"basis\": [{basis}], \"images\": {{{images}}}}}")
    }
}

#[derive(Debug, Clone, Copy)]
struct NielsenMove {
    target: usize,
    other: usize,
    invert_other: bool,
    left: bool,
}

#[derive(Clone)]
struct NielsenState {
    tuple: Vec<Word>,
    /// `tuple[i] = memory[i]φ` throughout.
    memory: Vec<Word>,
}

impl NielsenState {
    fn moves(n: usize) -> impl Iterator<Item = NielsenMove> {
        (0..n).flat_map(move |target| {
            (0..n).filter(move |&o| o != target).flat_map(move |other| {
                [(false, false), (true, false), (false, true), (true, true)]
                    .into_iter()
                    .map(move |(invert_other, left)| NielsenMove {
                        target,
                        other,
                        invert_other,
                        left,
                    })
            })
        })
    }

    fn combine(words: &[Word], mv: NielsenMove) -> Word {
        let o = if mv.invert_other {
            words[mv.other].inverse()
        } else {
            words[mv.other].clone()
        };
        if mv.left {
            o.multiply(&words[mv.target])
        } else {
            words[mv.target].multiply(&o)
        }
    }

    fn first_reducing_move(&self) -> Option<NielsenMove> {
        NielsenState::moves(self.tuple.len())
            .find(|&mv| NielsenState::combine(&self.tuple, mv).len() < self.tuple[mv.target].len())
    }

    fn apply(&mut self, mv: NielsenMove) {
        self.tuple[mv.target] = NielsenState::combine(&self.tuple, mv);
        self.memory[mv.target] = NielsenState::combine(&self.memory, mv);
    }

    /// Breadth-first search through length-preserving moves until a state
    /// admitting a strictly reducing move is found.
    fn escape_plateau(self) -> NielsenState {
        let mut seen = HashSet::new();
        seen.insert(self.tuple.clone());
        let mut queue = VecDeque::from([self]);
        while let Some(state) = queue.pop_front() {
            for mv in NielsenState::moves(state.tuple.len()) {
                let len = NielsenState::combine(&state.tuple, mv).len();
                let old = state.tuple[mv.target].len();
                if len > old {
                    continue;
                }
                let mut next = state.clone();
                next.apply(mv);
                if len < old {
                    return next;
                }
                if seen.insert(next.tuple.clone()) {
                    queue.push_back(next);
                }
            }
        }
        unreachable!("a basis always Nielsen-reduces to letters")
    }
}
