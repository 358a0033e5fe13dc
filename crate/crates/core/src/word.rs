//! Freely reduced words over a finite basis.
//!
//! A [`Word`] is a flat buffer of [`Letter`]s that is always freely reduced.
//! Words carry no reference to their basis: generator indices are checked
//! against a [`Basis`] at the boundaries (parsing, endomorphisms, generating
//! sets), which keeps the letter buffer compact enough for words with tens of
//! millions of letters.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A generator or its inverse, i.e. an element of `A ∪ A⁻¹`.
///
/// Stored as `±(id + 1)`; the total order is by generator id, then positive
/// before inverse.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(i16);

impl Letter {
    pub const MAX_GENERATORS: usize = i16::MAX as usize;

    pub fn new(generator: usize, inverse: bool) -> Letter {
        assert!(
            generator < Self::MAX_GENERATORS,
            "generator index {generator} too large"
        );
        let v = generator as i16 + 1;
        Letter(if inverse { -v } else { v })
    }

    pub fn positive(generator: usize) -> Letter {
        Letter::new(generator, false)
    }

    pub fn negative(generator: usize) -> Letter {
        Letter::new(generator, true)
    }

    pub fn generator(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    /// `+1` or `-1`.
    pub fn sign(self) -> i8 {
        if self.0 < 0 {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    /// Dense index into `Ã`: `2 * generator + (1 if inverse)`.
    pub fn index(self) -> usize {
        2 * self.generator() + usize::from(self.is_inverse())
    }

    pub fn from_index(index: usize) -> Letter {
        Letter::new(index / 2, index % 2 == 1)
    }

    /// All `2 * rank` letters in index order.
    pub fn all(rank: usize) -> impl Iterator<Item = Letter> + Clone {
        (0..2 * rank).map(Letter::from_index)
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.index().cmp(&other.index())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inverse() {
            write!(f, "x{}^-1", self.generator())
        } else {
            write!(f, "x{}", self.generator())
        }
    }
}

/// A freely reduced word; the empty word is the identity.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
        let mut out = Vec::new();
        push_reduced(&mut out, raw);
        Word(out)
    }

    /// Wraps a buffer the caller guarantees to be reduced.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Word {
        debug_assert!(is_reduced(&letters));
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// Largest generator index occurring in the word.
    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.generator()).max()
    }

    /// Fails if the word mentions a generator outside `0..rank`.
    pub fn check_rank(&self, rank: usize) -> Result<()> {
        match self.max_generator() {
            Some(index) if index >= rank => Err(Error::GeneratorOutOfRange { index, rank }),
            _ => Ok(()),
        }
    }

    pub fn multiply(&self, other: &Word) -> Word {
        let mut out = Vec::with_capacity(self.len() + other.len());
        out.extend_from_slice(&self.0);
        push_reduced(&mut out, other.0.iter().copied());
        Word(out)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// `x⁻¹ · self · x`.
    pub fn conjugate_by(&self, x: &Word) -> Word {
        x.inverse().multiply(self).multiply(x)
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let (core, conj) = base.cyclic_reduce();
        let k = n.unsigned_abs() as usize;
        if k == 0 || base.is_empty() {
            return Word::identity();
        }
        // conj⁻¹ core^k conj is reduced because core is cyclically reduced.
        let mut out = Vec::with_capacity(2 * conj.len() + k * core.len());
        out.extend(conj.0.iter().rev().map(|l| l.inverse()));
        for _ in 0..k {
            out.extend_from_slice(&core.0);
        }
        out.extend_from_slice(&conj.0);
        Word(out)
    }

    /// Letters in reverse order, each keeping its sign.
    pub fn reversal(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(f), Some(l)) => self.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }

    /// Splits `self = conj⁻¹ · core · conj` with `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.0[k] == self.0[n - 1 - k].inverse() {
            k += 1;
        }
        (
            Word(self.0[k..n - k].to_vec()),
            Word(self.0[n - k..].to_vec()),
        )
    }

    /// Length of a cyclically reduced conjugate.
    pub fn cyclic_length(&self) -> usize {
        let n = self.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.0[k] == self.0[n - 1 - k].inverse() {
            k += 1;
        }
        n - 2 * k
    }

    pub fn common_prefix_len(&self, other: &Word) -> usize {
        common_prefix_len(&self.0, &other.0)
    }

    /// The longest common prefix `u ∧ v`.
    pub fn common_prefix(&self, other: &Word) -> Word {
        Word(self.0[..self.common_prefix_len(other)].to_vec())
    }

    /// Canonical representative of the conjugacy class: the least rotation
    /// of the cyclic core.
    pub fn conjugacy_key(&self) -> Word {
        let (core, _) = self.cyclic_reduce();
        let start = least_rotation(&core.0);
        let mut out = Vec::with_capacity(core.len());
        out.extend_from_slice(&core.0[start..]);
        out.extend_from_slice(&core.0[..start]);
        Word(out)
    }

    pub fn is_conjugate(&self, other: &Word) -> bool {
        self.cyclic_length() == other.cyclic_length()
            && self.conjugacy_key() == other.conjugacy_key()
    }

    /// True when `other` is a cyclic rotation of `self` (as letter sequences).
    pub fn is_rotation_of(&self, other: &Word) -> bool {
        if self.len() != other.len() {
            return false;
        }
        if self.is_empty() {
            return true;
        }
        let n = self.len();
        (0..n).any(|s| (0..n).all(|i| self.0[(s + i) % n] == other.0[i]))
    }

    /// Shortlex comparison: length first, then letter order.
    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l:?}")?;
        }
        Ok(())
    }
}

impl Mul for &Word {
    type Output = Word;

    fn mul(self, rhs: &Word) -> Word {
        self.multiply(rhs)
    }
}

impl Mul for Word {
    type Output = Word;

    fn mul(self, rhs: Word) -> Word {
        self.multiply(&rhs)
    }
}

/// Appends `raw` to an already reduced buffer, cancelling as it goes.
pub(crate) fn push_reduced<I: IntoIterator<Item = Letter>>(buf: &mut Vec<Letter>, raw: I) {
    for l in raw {
        if buf.last() == Some(&l.inverse()) {
            buf.pop();
        } else {
            buf.push(l);
        }
    }
}

pub(crate) fn is_reduced(letters: &[Letter]) -> bool {
    letters.windows(2).all(|w| w[0] != w[1].inverse())
}

pub(crate) fn common_prefix_len(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Booth's algorithm: start index of the lexicographically least rotation.
fn least_rotation(s: &[Letter]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let at = |i: isize| s[i as usize % n];
    let mut failure = vec![-1isize; 2 * n];
    let mut k: isize = 0;
    for j in 1..2 * n as isize {
        let sj = at(j);
        let mut i = failure[(j - k - 1) as usize];
        while i != -1 && sj != at(k + i + 1) {
            if sj < at(k + i + 1) {
                k = j - i - 1;
            }
            i = failure[i as usize];
        }
        if sj != at(k + i + 1) {
            // i == -1 here
            if sj < at(k) {
                k = j;
            }
            failure[(j - k) as usize] = -1;
        } else {
            failure[(j - k) as usize] = i + 1;
        }
    }
    k as usize % n
}

/// A named generator of a [`Basis`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub id: usize,
    pub name: String,
}

/// An ordered list of generator names; free group `F_A` on these names.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Basis {
    names: Arc<[String]>,
}

impl fmt::Debug for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names.iter()).finish()
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| matches!(c, 'a'..='z' | '0'..='9' | '_'))
}

impl Basis {
    pub fn new<I, S>(names: I) -> Result<Basis>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::InvalidBasis("basis must not be empty".into()));
        }
        if names.len() > Letter::MAX_GENERATORS {
            return Err(Error::InvalidBasis("too many generators".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if !valid_name(n) {
                return Err(Error::InvalidBasis(format!(
                    "`{n}` is not a valid generator name"
                )));
            }
            if names[..i].contains(n) {
                return Err(Error::InvalidBasis(format!("duplicate generator `{n}`")));
            }
        }
        Ok(Basis {
            names: names.into(),
        })
    }

    /// `a, b, c, ...` for small ranks, `x0, x1, ...` otherwise.
    pub fn standard(rank: usize) -> Basis {
        let names: Vec<String> = if rank <= 26 {
            (0..rank)
                .map(|i| ((b'a' + i as u8) as char).to_string())
                .collect()
        } else {
            (0..rank).map(|i| format!("x{i}")).collect()
        };
        Basis::new(names).expect("standard basis is valid")
    }

    /// Parses `a,b,c`.
    pub fn parse_list(text: &str) -> Result<Basis> {
        Basis::new(
            text.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty()),
        )
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, id: usize) -> &str {
        &self.names[id]
    }

    pub fn generators(&self) -> Vec<Generator> {
        self.names
            .iter()
            .enumerate()
            .map(|(id, name)| Generator {
                id,
                name: name.clone(),
            })
            .collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The generator `a_id` as a word.
    pub fn gen(&self, id: usize) -> Word {
        assert!(id < self.rank());
        Word::letter(Letter::positive(id))
    }

    /// Reduces a raw letter sequence, rejecting generators outside the basis.
    pub fn reduce(&self, raw: &[Letter]) -> Result<Word> {
        if let Some(l) = raw.iter().find(|l| l.generator() >= self.rank()) {
            return Err(Error::GeneratorOutOfRange {
                index: l.generator(),
                rank: self.rank(),
            });
        }
        Ok(Word::reduce(raw.iter().copied()))
    }

    pub fn check(&self, w: &Word) -> Result<()> {
        w.check_rank(self.rank())
    }

    /// Parses the word grammar: whitespace- or `*`-separated tokens, each a
    /// generator name optionally raised to an integer power; `1` is the
    /// identity.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut buf = Vec::new();
        for token in text
            .split(|c: char| c == '*' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            if token == "1" {
                continue;
            }
            let (name, power) = match token.split_once('^') {
                Some((name, exp)) => {
                    let p: i64 = exp
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent `{exp}` in `{token}`")))?;
                    (name, p)
                }
                None => (token, 1),
            };
            let id = self
                .index_of(name)
                .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
            let l = Letter::new(id, power < 0);
            push_reduced(
                &mut buf,
                std::iter::repeat_n(l, power.unsigned_abs() as usize),
            );
        }
        Ok(Word(buf))
    }

    /// Inverse of [`Basis::parse_word`]; runs of equal letters are written
    /// as powers.
    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let mut out = String::new();
        let letters = w.letters();
        let mut i = 0;
        while i < letters.len() {
            let l = letters[i];
            let mut j = i;
            while j < letters.len() && letters[j] == l {
                j += 1;
            }
            let run = (j - i) as i64;
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(self.name(l.generator()));
            let exp = if l.is_inverse() { -run } else { run };
            if exp != 1 {
                out.push('^');
                out.push_str(&exp.to_string());
            }
            i = j;
        }
        out
    }
}

/// A uniformly random reduced word of exactly `len` letters.
pub fn random_word<R: rand::Rng + ?Sized>(rank: usize, len: usize, rng: &mut R) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(len);
    while out.len() < len {
        let l = Letter::from_index(rng.gen_range(0..2 * rank));
        if out.last() != Some(&l.inverse()) {
            out.push(l);
        }
    }
    Word(out)
}

/// All reduced words of length exactly `radius` over a basis of rank `rank`,
/// in lexicographic order.
pub fn sphere(rank: usize, radius: usize) -> Vec<Word> {
    let mut layer = vec![Word::identity()];
    for _ in 0..radius {
        layer = extend_layer(rank, &layer);
    }
    layer
}

/// All reduced words of length at most `radius`, shortlex ordered.
pub fn ball(rank: usize, radius: usize) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    let mut layer = vec![Word::identity()];
    for _ in 0..radius {
        layer = extend_layer(rank, &layer);
        out.extend(layer.iter().cloned());
    }
    out
}

/// Number of elements in the ball of the given radius.
pub fn ball_size(rank: usize, radius: usize) -> u128 {
    let mut total = 1u128;
    let mut sphere = 2 * rank as u128;
    for _ in 0..radius {
        total += sphere;
        sphere *= (2 * rank - 1) as u128;
    }
    total
}

fn extend_layer(rank: usize, layer: &[Word]) -> Vec<Word> {
    let mut next = Vec::with_capacity(layer.len() * (2 * rank).max(1));
    for w in layer {
        for l in Letter::all(rank) {
            if w.last() == Some(l.inverse()) {
                continue;
            }
            let mut v = w.0.clone();
            v.push(l);
            next.push(Word(v));
        }
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Basis {
        Basis::standard(2)
    }

    fn w(s: &str) -> Word {
        f2().parse_word(s).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let a = Letter::positive(0);
        let b = Letter::positive(1);
        assert_eq!(Word::reduce([a, a.inverse(), b]), w("b"));
        assert_eq!(Word::reduce([]), Word::identity());
        assert_eq!(Word::reduce([a, b, b.inverse(), a]), w("a a"));
    }

    #[test]
    fn reduce_rejects_foreign_generator() {
        let err = f2().reduce(&[Letter::positive(3)]).unwrap_err();
        assert_eq!(err, Error::GeneratorOutOfRange { index: 3, rank: 2 });
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(w("a b") * w("b^-1 a"), w("a^2"));
        assert_eq!(w("a") * w("a^-1"), Word::identity());
        assert_eq!(w("a b") * w("b a"), w("a b b a"));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(w("a b").inverse(), w("b^-1 a^-1"));
        assert_eq!(Word::identity().inverse(), Word::identity());
        assert_eq!(w("a b^-1").inverse(), w("b a^-1"));
    }

    #[test]
    fn reversal_examples() {
        assert_eq!(w("a b a^2 b^2").reversal(), w("b^2 a^2 b a"));
        assert_eq!(w("a").reversal(), w("a"));
        assert_eq!(w("a b^-1").reversal(), w("b^-1 a"));
    }

    #[test]
    fn cyclic_reduce_examples() {
        assert_eq!(w("a b a^-1").cyclic_reduce(), (w("b"), w("a^-1")));
        assert_eq!(w("a b").cyclic_reduce(), (w("a b"), Word::identity()));
        let u = w("a b a b^-1 a^-1");
        let (core, conj) = u.cyclic_reduce();
        assert_eq!(core, w("a"));
        assert_eq!(conj, w("b^-1 a^-1"));
        // multiplication oracle
        assert_eq!(conj.inverse() * core * conj, u);
    }

    #[test]
    fn cyclic_length_examples() {
        assert_eq!(w("a b a^-1").cyclic_length(), 1);
        assert_eq!(w("a b").cyclic_length(), 2);
        let x = w("a^2 b");
        assert_eq!(w("b").conjugate_by(&x).cyclic_length(), 1);
    }

    #[test]
    fn common_prefix_examples() {
        assert_eq!(w("a b a b").common_prefix(&w("a b a^-1")), w("a b"));
        let u = w("a b^-1 a");
        assert_eq!(u.common_prefix(&u), u);
        assert_eq!(w("a").common_prefix(&w("b")), Word::identity());
    }

    #[test]
    fn conjugacy_examples() {
        assert!(w("a b").is_conjugate(&w("b a")));
        assert!(!w("a").is_conjugate(&w("b")));
        let u = w("a b a^2 b^2");
        assert!(!u.is_conjugate(&u.reversal()));
    }

    #[test]
    fn least_rotation_matches_naive() {
        for u in ball(2, 6) {
            let n = u.len();
            let naive = (0..n.max(1))
                .map(|s| {
                    let mut v = u.0[s.min(n)..].to_vec();
                    v.extend_from_slice(&u.0[..s.min(n)]);
                    v
                })
                .min()
                .unwrap();
            let s = least_rotation(&u.0);
            let mut got = u.0[s..].to_vec();
            got.extend_from_slice(&u.0[..s]);
            assert_eq!(got, naive, "{u:?}");
        }
    }

    #[test]
    fn pow_and_parse_powers() {
        assert_eq!(f2().parse_word("a^-3").unwrap(), w("a^-1 a^-1 a^-1"));
        assert_eq!(w("a b a^-1").pow(3), w("a b^3 a^-1"));
        assert_eq!(w("a b").pow(-2), w("b^-1 a^-1 b^-1 a^-1"));
        assert_eq!(w("a b").pow(0), Word::identity());
        assert_eq!(f2().parse_word("a*b * 1 b^-1").unwrap(), w("a"));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            f2().parse_word("a c"),
            Err(Error::UnknownGenerator(n)) if n == "c"
        ));
        assert!(matches!(f2().parse_word("a^x"), Err(Error::Parse(_))));
    }

    #[test]
    fn format_round_trips() {
        let b = f2();
        for u in ball(2, 5) {
            assert_eq!(b.parse_word(&b.format_word(&u)).unwrap(), u);
        }
        assert_eq!(b.format_word(&w("a a b^-1 a")), "a^2 b^-1 a");
        assert_eq!(b.format_word(&Word::identity()), "1");
    }

    #[test]
    fn basis_validation() {
        assert!(Basis::new(Vec::<String>::new()).is_err());
        assert!(Basis::new(["a", "a"]).is_err());
        assert!(Basis::new(["A"]).is_err());
        assert!(Basis::new(["1x"]).is_err());
        assert!(Basis::new(["x_1", "t"]).is_ok());
        assert_eq!(Basis::new(["a"]).unwrap().rank(), 1);
    }

    #[test]
    fn ball_sizes() {
        assert_eq!(ball(2, 4).len(), 161);
        assert_eq!(ball_size(2, 8), 13121);
        assert_eq!(ball(2, 8).len(), 13121);
        assert_eq!(sphere(3, 2).len(), 30);
        assert_eq!(ball(1, 3).len(), 7);
    }
}
