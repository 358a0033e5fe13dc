//! Exact reproductions of the concrete computations behind the theory:
//! a uniformly continuous map with no Hölder condition, a permutation
//! automorphism that stretches a non-basis word metric, an exponentially
//! distorted free subgroup, and reversal of primitive words.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::{GeneratingSet, Rational};
use crate::morphism::{is_primitive, Endomorphism};
use crate::word::{ball, common_prefix_len, is_reduced, Basis, Letter, Word};

/// Outcome of one case: named computed values and a pass bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseReport {
    pub id: String,
    pub fields: Vec<(String, String)>,
    pub pass: bool,
}

impl CaseReport {
    fn new(id: &str) -> CaseReport {
        CaseReport {
            id: id.to_string(),
            fields: Vec::new(),
            pass: true,
        }
    }

    fn field(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    fn require(&mut self, ok: bool) -> &mut Self {
        self.pass &= ok;
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for CaseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case={}", self.id)?;
        for (k, v) in &self.fields {
            write!(f, " {k}={v}")?;
        }
        write!(f, " pass={}", self.pass)
    }
}

// ---------------------------------------------------------------------------
// The square-root map on F_{a}

/// `a^n ↦ a^⌊√n⌋` for `n ≥ 0`, `a^n ↦ a^n` otherwise. A set map, not a
/// homomorphism.
pub fn noten_apply(n: i64) -> Word {
    let a = Word::letter(Letter::positive(0));
    if n >= 0 {
        a.pow(n.isqrt())
    } else {
        a.pow(n)
    }
}

fn power(n: i64) -> Word {
    Word::letter(Letter::positive(0)).pow(n)
}

/// Exponent `k` with `d(u, v) = 2^-k` in the prefix metric; `None` for `u = v`.
fn prefix_exponent(u: &Word, v: &Word) -> Option<u64> {
    (u != v).then(|| common_prefix_len(u.letters(), v.letters()) as u64)
}

/// `2^(e/q) > K` for `K = kn/kd > 0`, i.e. `2^e · kd^q > kn^q`.
fn dyadic_root_exceeds(e: i64, q: u32, k: Rational) -> bool {
    let kn = BigUint::from(*k.numer() as u64).pow(q);
    let kd = BigUint::from(*k.denom() as u64).pow(q);
    if e >= 0 {
        (kd << e as usize) > kn
    } else {
        kd > (kn << (-e) as usize)
    }
}

/// Witness `(m, n)` against the Hölder condition of exponent `r` and
/// constant `K`: `d(a^mφ, a^nφ) > K·d(a^m, a^n)^r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotenViolation {
    pub m: i64,
    pub n: i64,
    /// `d(a^mφ, a^nφ) = 2^-image_exponent`.
    pub image_exponent: u64,
    /// `d(a^m, a^n) = 2^-source_exponent`.
    pub source_exponent: u64,
    pub verified: bool,
}

/// Smallest `m ≥ 0` with `rm − ⌊√m⌋ > log₂K`, and `n = ⌊(√m+1)²⌋ + 1`.
pub fn noten_violation(r: Rational, k: Rational) -> Result<NotenViolation> {
    if r <= Rational::zero() || k <= Rational::zero() {
        return Err(Error::InvalidArgument("r and K must be positive".into()));
    }
    let (p, q) = (*r.numer(), *r.denom());
    let q32 = u32::try_from(q)
        .map_err(|_| Error::InvalidArgument("denominator of r too large".into()))?;
    let mut m: i64 = 0;
    while !dyadic_root_exceeds(p * m - q * m.isqrt(), q32, k) {
        m += 1;
    }
    // ⌊(√m + 1)²⌋ = m + 1 + ⌊2√m⌋
    let n = m + 2 + (4 * m).isqrt();

    let image_exponent =
        prefix_exponent(&noten_apply(m), &noten_apply(n)).expect("⌊√n⌋ > ⌊√m⌋ by the choice of n");
    let source_exponent = prefix_exponent(&power(m), &power(n)).expect("m < n");
    // 2^-ie > K·2^(-r·se)  ⟺  2^((p·se − q·ie)/q) > K
    let verified = dyadic_root_exceeds(
        p * source_exponent as i64 - q * image_exponent as i64,
        q32,
        k,
    );
    Ok(NotenViolation {
        m,
        n,
        image_exponent,
        source_exponent,
        verified,
    })
}

/// Checks `d(a^m,a^n) < δ ⇒ d(a^mφ,a^nφ) < ε` for all `|m|, |n| ≤ bound`,
/// where `ε = 2^-k` and `δ = min(1/2, ½ε^(2−log₂ε)) = 2^-max(1, (k+1)²)`.
/// Returns the first violating pair, if any.
pub fn noten_uc_scan(k: i32, bound: i64) -> Option<(i64, i64)> {
    let k = k as i64;
    let delta_exp = ((k + 1) * (k + 1)).max(1);
    let images: Vec<Word> = (-bound..=bound).map(noten_apply).collect();
    let words: Vec<Word> = (-bound..=bound).map(power).collect();
    for (i, m) in (-bound..=bound).enumerate() {
        for (j, n) in (-bound..=bound).enumerate() {
            // d < 2^-delta_exp  ⟺  equal, or common prefix longer than delta_exp
            let close = prefix_exponent(&words[i], &words[j]).is_none_or(|e| e as i64 > delta_exp);
            if !close {
                continue;
            }
            let image_close = prefix_exponent(&images[i], &images[j]).is_none_or(|e| e as i64 > k);
            if !image_close {
                return Some((m, n));
            }
        }
    }
    None
}

/// `ε = 2^-k` from a positive dyadic rational.
pub fn dyadic_exponent(eps: Rational) -> Result<i32> {
    let (n, d) = (*eps.numer(), *eps.denom());
    let bad = || Error::InvalidArgument(format!("epsilon {eps} is not a power of two"));
    if n <= 0 {
        return Err(bad());
    }
    match (n, d) {
        (1, d) if d.count_ones() == 1 => Ok(d.trailing_zeros() as i32),
        (n, 1) if n.count_ones() == 1 => Ok(-(n.trailing_zeros() as i32)),
        _ => Err(bad()),
    }
}

// ---------------------------------------------------------------------------
// A permutation automorphism that is not an isometry of d_{A'}

pub fn fauind_generating_set() -> GeneratingSet {
    GeneratingSet::parse_members(&Basis::standard(2), "a, b, a^2 b, a^3 b").expect("generates")
}

pub fn fauind_word() -> Word {
    Basis::standard(2)
        .parse_word("a^-2 b^-1 a^-3 b^-1 a b")
        .expect("valid word")
}

/// `d_{A′}(1, wⁿ) = 5n` by exact search, against the explicit
/// factorization `wⁿε = (u v a⁻¹ b⁻¹)ⁿ` of length `4n`.
pub fn fauind_case(n: u32, budget: u64) -> Result<CaseReport> {
    let basis = Basis::standard(2);
    let s = fauind_generating_set();
    let w = fauind_word();
    let wn = w.pow(n as i64);
    let d = s.length(&wn, budget)?;

    let eps = Endomorphism::epsilon(&basis);
    let image = eps.apply(&wn)?;
    let factors: Vec<Word> = ["a^2 b", "a^3 b", "a^-1", "b^-1"]
        .iter()
        .map(|f| basis.parse_word(f).expect("valid word"))
        .collect();
    let mut product = Word::identity();
    for _ in 0..n {
        for f in &factors {
            product = &product * f;
        }
    }
    let factored = product == image;
    let factorization_len = 4 * n as u64;
    let all_steps = factors.iter().all(|f| s.symmetric().contains(f));
    let image_d = s.length(&image, budget)?;

    let mut report = CaseReport::new("fauind");
    report
        .field("n", n)
        .field("d", d)
        .field("expected_d", 5 * n)
        .field("image_d", image_d)
        .field("factorization_len", factorization_len)
        .field("bound", 4 * n)
        .require(d == 5 * n as u64)
        .require(factored && all_steps)
        .require(image_d <= factorization_len);
    Ok(report)
}

// ---------------------------------------------------------------------------
// Distortion of ⟨a, b⟩ in ⟨a, b, t | t⁻¹atu, t⁻¹btv⟩

/// `u = a b a b² … a b^20`.
pub fn hnn_u() -> Word {
    let (a, b) = (Letter::positive(0), Letter::positive(1));
    Word::reduce((1..=20).flat_map(|k| std::iter::once(a).chain(std::iter::repeat_n(b, k))))
}

/// `v = b a b a² … b a^20`.
pub fn hnn_v() -> Word {
    let (a, b) = (Letter::positive(0), Letter::positive(1));
    Word::reduce((1..=20).flat_map(|k| std::iter::once(b).chain(std::iter::repeat_n(a, k))))
}

/// The reduced form of `t⁻ⁿatⁿ` over `{a, b}`: `n` rounds of the
/// substitution `a ↦ u`, `b ↦ v` starting from `a`. Returns the letters and
/// whether every block boundary was free of cancellation.
pub fn hnn_expand(n: u32) -> (Vec<Letter>, bool) {
    let u = hnn_u();
    let v = hnn_v();
    let blocks: [Vec<Letter>; 4] = [
        u.letters().to_vec(),
        u.inverse().into_letters(),
        v.letters().to_vec(),
        v.inverse().into_letters(),
    ];
    let mut cur = vec![Letter::positive(0)];
    let mut clean = true;
    for _ in 0..n {
        let mut next = Vec::with_capacity(cur.len() * u.len());
        for &c in &cur {
            let block = &blocks[c.index()];
            if let (Some(&last), Some(&first)) = (next.last(), block.first()) {
                clean &= last != Letter::inverse(first);
            }
            next.extend_from_slice(block);
        }
        cur = next;
    }
    (cur, clean)
}

/// Longest piece among the cyclic conjugates of `t⁻¹atu`, `t⁻¹btv` and
/// their inverses, and the common relator length.
pub fn hnn_pieces() -> (usize, usize) {
    let t = Word::letter(Letter::positive(2));
    let a = Word::letter(Letter::positive(0));
    let b = Word::letter(Letter::positive(1));
    let r1 = &(&(&t.inverse() * &a) * &t) * &hnn_u();
    let r2 = &(&(&t.inverse() * &b) * &t) * &hnn_v();
    let len = r1.len();
    debug_assert_eq!(len, r2.len());

    let mut conjugates: Vec<Vec<Letter>> = Vec::new();
    for r in [r1.clone(), r1.inverse(), r2.clone(), r2.inverse()] {
        let l = r.letters();
        for i in 0..l.len() {
            let rot: Vec<Letter> = l[i..].iter().chain(&l[..i]).copied().collect();
            if !conjugates.contains(&rot) {
                conjugates.push(rot);
            }
        }
    }
    let longest = (0..conjugates.len())
        .into_par_iter()
        .map(|i| {
            conjugates[i + 1..]
                .iter()
                .map(|c| common_prefix_len(&conjugates[i], c))
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0);
    (longest, len)
}

pub fn hnn_distortion(n: u32, extended: bool) -> Result<CaseReport> {
    let cap = if extended { 3 } else { 2 };
    if n > cap {
        return Err(Error::InvalidArgument(format!(
            "hnn expansion is limited to n <= {cap}{}",
            if extended { "" } else { " without --extended" }
        )));
    }
    let (letters, clean) = hnn_expand(n);
    let expected = 230u64.pow(n);
    let reduced = is_reduced(&letters);
    let literal = match n {
        1 => letters == hnn_u().letters(),
        _ => true,
    };
    let (piece, relator) = hnn_pieces();

    let mut report = CaseReport::new("hnn");
    report
        .field("n", n)
        .field("length", letters.len())
        .field("expected_length", expected)
        .field("cancellation_free", clean && reduced)
        .field("piece", piece)
        .field("relator", relator)
        .field("small_cancellation", format!("{piece}<{relator}/6"))
        .require(letters.len() as u64 == expected)
        .require(clean && reduced && literal)
        .require(piece == 38 && relator == 233 && 6 * piece < relator);
    Ok(report)
}

// ---------------------------------------------------------------------------
// Reversal of primitive words

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevconScan {
    pub words: usize,
    pub primitives: usize,
    /// Primitive words not conjugate to their reversal.
    pub violations: Vec<Word>,
    /// Cyclically reduced primitives whose reversal is not a rotation.
    pub rotation_violations: Vec<Word>,
}

pub fn revcon_words(maxlen: usize) -> RevconScan {
    let words = ball(2, maxlen);
    let flags: Vec<(bool, bool, bool)> = words
        .par_iter()
        .map(|u| {
            if !is_primitive(u, 2) {
                return (false, false, false);
            }
            let rev = u.reversal();
            let conj = u.is_conjugate(&rev);
            let rot = !u.is_cyclically_reduced() || u.is_rotation_of(&rev);
            (true, !conj, !rot)
        })
        .collect();
    let pick = |f: fn(&(bool, bool, bool)) -> bool| -> Vec<Word> {
        words
            .iter()
            .zip(&flags)
            .filter(|(_, fl)| f(fl))
            .map(|(w, _)| w.clone())
            .collect()
    };
    RevconScan {
        words: words.len(),
        primitives: flags.iter().filter(|f| f.0).count(),
        violations: pick(|f| f.1),
        rotation_violations: pick(|f| f.2),
    }
}

pub fn revcon_scan(maxlen: usize) -> CaseReport {
    let scan = revcon_words(maxlen);
    let f3 = Basis::standard(3);
    let abc = f3.parse_word("a b c").expect("valid word");
    let abc_fails = !abc.is_conjugate(&abc.reversal());
    let f2 = Basis::standard(2);
    let nonprim = f2.parse_word("a b a^2 b^2").expect("valid word");
    let nonprim_fails = !nonprim.is_conjugate(&nonprim.reversal()) && !is_primitive(&nonprim, 2);

    let mut report = CaseReport::new("revcon");
    report
        .field("maxlen", maxlen)
        .field("words", scan.words)
        .field("primitives", scan.primitives)
        .field("violations", scan.violations.len())
        .field("rotation_violations", scan.rotation_violations.len())
        .field("abc_f3_violates", abc_fails)
        .field("aba2b2_violates", nonprim_fails)
        .require(scan.violations.is_empty() && scan.rotation_violations.is_empty())
        .require(abc_fails && nonprim_fails);
    report
}

// ---------------------------------------------------------------------------

pub const CASE_IDS: [&str; 5] = ["noten-violation", "noten-uc", "fauind", "hnn", "revcon"];

pub fn noten_violation_case(r: Rational, k: Rational) -> Result<CaseReport> {
    let v = noten_violation(r, k)?;
    let mut report = CaseReport::new("noten-violation");
    report
        .field("r", r)
        .field("K", k)
        .field("m", v.m)
        .field("n", v.n)
        .field("image_distance", format!("2^-{}", v.image_exponent))
        .field("source_distance", format!("2^-{}", v.source_exponent))
        .require(v.verified);
    Ok(report)
}

pub fn noten_uc_case(k: i32, bound: i64) -> CaseReport {
    let found = noten_uc_scan(k, bound);
    let mut report = CaseReport::new("noten-uc");
    report
        .field("epsilon", format!("2^-{k}"))
        .field("bound", bound)
        .field(
            "violation",
            found.map_or("none".to_string(), |(m, n)| format!("({m},{n})")),
        )
        .require(found.is_none());
    report
}

/// Selection and sizes for a casebook run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CasebookOptions {
    pub case: Option<String>,
    /// Overrides the largest `n` for `fauind` and `hnn`.
    pub n: Option<u32>,
    pub extended: bool,
    pub budget: u64,
}

impl Default for CasebookOptions {
    fn default() -> Self {
        CasebookOptions {
            case: None,
            n: None,
            extended: false,
            budget: crate::metric::DEFAULT_BUDGET,
        }
    }
}

/// Runs the selected cases in a fixed order.
pub fn run_casebook(opts: &CasebookOptions) -> Result<Vec<CaseReport>> {
    if let Some(c) = &opts.case {
        if !CASE_IDS.contains(&c.as_str()) {
            return Err(Error::InvalidArgument(format!(
                "unknown case `{c}` (expected one of {})",
                CASE_IDS.join(", ")
            )));
        }
    }
    let wanted = |id: &str| opts.case.as_deref().is_none_or(|c| c == id);
    let top = opts.n.unwrap_or(if opts.extended { 3 } else { 2 });
    let single = opts.n.is_some();
    let sizes = |from: u32| -> Vec<u32> {
        if single {
            vec![top]
        } else {
            (from..=top).collect()
        }
    };
    let mut out = Vec::new();
    if wanted("noten-violation") {
        out.push(noten_violation_case(
            Rational::from_integer(1),
            Rational::from_integer(4),
        )?);
    }
    if wanted("noten-uc") {
        for k in 0..=3 {
            out.push(noten_uc_case(k, 200));
        }
    }
    if wanted("fauind") {
        if top > 2 && !opts.extended {
            return Err(Error::InvalidArgument(
                "fauind with n > 2 needs --extended".into(),
            ));
        }
        for n in sizes(0) {
            out.push(fauind_case(n, opts.budget)?);
        }
    }
    if wanted("hnn") {
        for n in sizes(0) {
            out.push(hnn_distortion(n, opts.extended)?);
        }
    }
    if wanted("revcon") {
        out.push(revcon_scan(8));
    }
    Ok(out)
}
