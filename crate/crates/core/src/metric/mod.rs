//! Word metrics over finite generating sets, Gromov products and the visual
//! metrics built from them.

mod search;

use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::morphism::StallingsGraph;
use crate::word::{common_prefix_len, Basis, Word};

pub use search::DEFAULT_BUDGET;

/// Exact rationals used for Gromov products and audit constants.
pub type Rational = Ratio<i64>;

/// `|g⁻¹h|` in the word metric of the basis.
pub fn dist_basis(g: &Word, h: &Word) -> u64 {
    let k = common_prefix_len(g.letters(), h.letters());
    (g.len() + h.len() - 2 * k) as u64
}

/// A finite generating set `A′` of a free group, given as words over a basis.
#[derive(Clone, PartialEq, Eq)]
pub struct GeneratingSet {
    basis: Basis,
    members: Vec<Word>,
    steps: Vec<Word>,
    is_basis: bool,
}

impl fmt::Debug for GeneratingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self
            .members
            .iter()
            .map(|w| self.basis.format_word(w))
            .collect();
        write!(f, "{{{}}}", words.join(", "))
    }
}

impl GeneratingSet {
    /// Validates that `members` are nontrivial, distinct, and generate the
    /// whole free group on `basis`.
    pub fn new(basis: Basis, members: Vec<Word>) -> Result<GeneratingSet> {
        if members.is_empty() {
            return Err(Error::InvalidGeneratingSet("no members".into()));
        }
        for (i, w) in members.iter().enumerate() {
            basis.check(w)?;
            if w.is_empty() {
                return Err(Error::InvalidGeneratingSet(
                    "the identity is not allowed".into(),
                ));
            }
            if members[..i].contains(w) {
                return Err(Error::InvalidGeneratingSet(format!(
                    "duplicate member {}",
                    basis.format_word(w)
                )));
            }
        }
        if !StallingsGraph::new(basis.rank(), &members).is_whole_group() {
            return Err(Error::DoesNotGenerate);
        }

        let mut steps: Vec<Word> = Vec::with_capacity(2 * members.len());
        for w in &members {
            for s in [w.clone(), w.inverse()] {
                if !steps.contains(&s) {
                    steps.push(s);
                }
            }
        }
        steps.sort_by(|a, b| a.shortlex_cmp(b));
        let is_basis = steps.len() == 2 * basis.rank() && steps.iter().all(|s| s.len() == 1);
        Ok(GeneratingSet {
            basis,
            members,
            steps,
            is_basis,
        })
    }

    /// The basis itself.
    pub fn basis(basis: &Basis) -> GeneratingSet {
        let members = (0..basis.rank()).map(|g| basis.gen(g)).collect();
        GeneratingSet::new(basis.clone(), members).expect("a basis generates")
    }

    /// Words listed over `basis`, separated by commas or newlines.
    pub fn parse_members(basis: &Basis, text: &str) -> Result<GeneratingSet> {
        let members = text
            .split([',', '\n'])
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| basis.parse_word(t))
            .collect::<Result<Vec<_>>>()?;
        GeneratingSet::new(basis.clone(), members)
    }

    /// Reads the file format: a `basis: a b ...` line, then one word per
    /// line. Blank lines and lines starting with `#` are ignored.
    pub fn from_text(text: &str) -> Result<GeneratingSet> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty generating set file".into()))?;
        let names = header
            .strip_prefix("basis:")
            .ok_or_else(|| Error::Format("first line must be `basis: ...`".into()))?;
        let basis = Basis::new(names.split_whitespace())?;
        let members = lines
            .map(|l| basis.parse_word(l))
            .collect::<Result<Vec<_>>>()?;
        GeneratingSet::new(basis, members)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("basis: {}\n", self.basis.names().join(" "));
        for w in &self.members {
            out.push_str(&self.basis.format_word(w));
            out.push('\n');
        }
        out
    }

    pub fn ambient_basis(&self) -> &Basis {
        &self.basis
    }

    pub fn members(&self) -> &[Word] {
        &self.members
    }

    /// `S ∪ S⁻¹`, deduplicated, in shortlex order.
    pub fn symmetric(&self) -> &[Word] {
        &self.steps
    }

    /// True when `S ∪ S⁻¹ = Ã`, so the metric is the basis word metric.
    pub fn is_basis(&self) -> bool {
        self.is_basis
    }

    /// `d_S(1, g)`.
    pub fn length(&self, g: &Word, budget: u64) -> Result<u64> {
        self.basis.check(g)?;
        if self.is_basis {
            return Ok(g.len() as u64);
        }
        search::factorization_length(self.basis.rank(), g, &self.steps, budget)
    }

    /// `d_S(g, h) = d_S(1, g⁻¹h)`.
    pub fn dist(&self, g: &Word, h: &Word, budget: u64) -> Result<u64> {
        self.basis.check(g)?;
        self.basis.check(h)?;
        if self.is_basis {
            return Ok(dist_basis(g, h));
        }
        self.length(&g.inverse().multiply(h), budget)
    }
}

/// `d_S(g, h)` with the default budget.
pub fn dist_genset(s: &GeneratingSet, g: &Word, h: &Word) -> Result<u64> {
    s.dist(g, h, DEFAULT_BUDGET)
}

/// `N_{A,A′}`: the largest length of a member of either set in the other
/// set's metric.
pub fn mutual_bound_n(a: &GeneratingSet, a2: &GeneratingSet, budget: u64) -> Result<u64> {
    if a.basis != a2.basis {
        return Err(Error::BasisMismatch);
    }
    let mut n = 0;
    for x in &a.members {
        n = n.max(a2.length(x, budget)?);
    }
    for x in &a2.members {
        n = n.max(a.length(x, budget)?);
    }
    Ok(n)
}

/// The parameter `γ` of a visual metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma {
    Ln2,
    Value(f64),
}

impl Gamma {
    pub fn parse(text: &str) -> Result<Gamma> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("ln2") {
            return Ok(Gamma::Ln2);
        }
        let bad = || Error::InvalidArgument(format!("gamma `{t}` is not a number or ln2"));
        let v: f64 = match t.split_once('/') {
            Some((n, d)) => {
                let n: f64 = n.trim().parse().map_err(|_| bad())?;
                let d: f64 = d.trim().parse().map_err(|_| bad())?;
                n / d
            }
            None => t.parse().map_err(|_| bad())?,
        };
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidArgument("gamma must be positive".into()));
        }
        Ok(Gamma::Value(v))
    }

    pub fn value(self) -> f64 {
        match self {
            Gamma::Ln2 => std::f64::consts::LN_2,
            Gamma::Value(v) => v,
        }
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gamma::Ln2 => f.write_str("ln2"),
            Gamma::Value(v) => write!(f, "{v}"),
        }
    }
}

/// Parameters `(A′, p, γ, T)` of a family of visual metrics.
#[derive(Debug, Clone)]
pub struct VisualMetricSpec {
    pub genset: GeneratingSet,
    pub basepoint: Word,
    pub gamma: Gamma,
    pub t: f64,
    /// Node-expansion cap for each distance query over a non-basis set.
    pub budget: u64,
}

impl VisualMetricSpec {
    pub fn new(genset: GeneratingSet, basepoint: Word, gamma: Gamma, t: f64) -> Result<Self> {
        genset.basis.check(&basepoint)?;
        if !(gamma.value().is_finite() && gamma.value() > 0.0) {
            return Err(Error::InvalidArgument("gamma must be positive".into()));
        }
        if t.is_nan() || t < 1.0 {
            return Err(Error::InvalidArgument("T must be at least 1".into()));
        }
        Ok(VisualMetricSpec {
            genset,
            basepoint,
            gamma,
            t,
            budget: DEFAULT_BUDGET,
        })
    }

    /// Basis generating set, `p = 1`, `γ = ln 2`, `T = 4`.
    pub fn standard(basis: &Basis) -> VisualMetricSpec {
        VisualMetricSpec::new(
            GeneratingSet::basis(basis),
            Word::identity(),
            Gamma::Ln2,
            4.0,
        )
        .expect("defaults are valid")
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    fn dist(&self, g: &Word, h: &Word) -> Result<u64> {
        self.genset.dist(g, h, self.budget)
    }

    fn dist_from_base(&self, g: &Word) -> Result<u64> {
        self.dist(&self.basepoint, g)
    }
}

/// `(g|h)_p = ½(d(p,g) + d(p,h) − d(g,h))`, exactly.
pub fn gromov_product(spec: &VisualMetricSpec, g: &Word, h: &Word) -> Result<Rational> {
    let doubled = doubled_product(spec, g, h)?;
    Ok(Rational::new(doubled, 2))
}

fn doubled_product(spec: &VisualMetricSpec, g: &Word, h: &Word) -> Result<i64> {
    let dg = spec.dist_from_base(g)? as i64;
    let dh = spec.dist_from_base(h)? as i64;
    let d = spec.dist(g, h)? as i64;
    Ok(dg + dh - d)
}

/// `e^{−γ·x}` for an exact exponent `x`, or zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VisualValue {
    Zero,
    Exp { gamma: Gamma, product: Rational },
}

impl VisualValue {
    pub fn value(&self) -> f64 {
        match *self {
            VisualValue::Zero => 0.0,
            VisualValue::Exp {
                gamma: Gamma::Ln2,
                product,
            } => (-(*product.numer() as f64) / *product.denom() as f64).exp2(),
            VisualValue::Exp { gamma, product } => {
                (-gamma.value() * *product.numer() as f64 / *product.denom() as f64).exp()
            }
        }
    }

    /// The exponent `k` when the value is exactly `2^-k`.
    pub fn dyadic_exponent(&self) -> Option<Rational> {
        match *self {
            VisualValue::Exp {
                gamma: Gamma::Ln2,
                product,
            } => Some(product),
            _ => None,
        }
    }
}

impl fmt::Display for VisualValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_significant(self.value(), 12))?;
        if let Some(k) = self.dyadic_exponent() {
            write!(f, " (2^-{k})")?;
        }
        Ok(())
    }
}

/// Decimal rendering with `digits` significant digits.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit
    let sig = s
        .chars()
        .filter(|c| c.is_ascii_digit())
        .skip_while(|&c| c == '0')
        .count();
    if sig > digits && decimals > 0 {
        let decimals = decimals - 1;
        return format!("{x:.decimals$}");
    }
    s
}

/// `ρ(g,h) = e^{−γ(g|h)_p}` for `g ≠ h`, and 0 on the diagonal.
pub fn rho(spec: &VisualMetricSpec, g: &Word, h: &Word) -> Result<VisualValue> {
    if g == h {
        return Ok(VisualValue::Zero);
    }
    Ok(VisualValue::Exp {
        gamma: spec.gamma,
        product: gromov_product(spec, g, h)?,
    })
}

/// `σ(g,h)`: exact over a basis, where `ρ` is already an ultrametric;
/// otherwise only the certified bracket `ρ/4 ≤ σ ≤ ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sigma {
    Exact(VisualValue),
    Bounds { rho: VisualValue },
}

impl Sigma {
    pub fn lower(&self) -> f64 {
        match self {
            Sigma::Exact(v) => v.value(),
            Sigma::Bounds { rho } => rho.value() / 4.0,
        }
    }

    pub fn upper(&self) -> f64 {
        match self {
            Sigma::Exact(v) | Sigma::Bounds { rho: v } => v.value(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Sigma::Exact(_))
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sigma::Exact(v) => write!(f, "{v} exact"),
            Sigma::Bounds { rho } => write!(
                f,
                "[{}, {}] bounds (rho/4 <= sigma <= rho, rho = {rho})",
                format_significant(self.lower(), 12),
                format_significant(self.upper(), 12),
            ),
        }
    }
}

pub fn sigma(spec: &VisualMetricSpec, g: &Word, h: &Word) -> Result<Sigma> {
    let r = rho(spec, g, h)?;
    Ok(if spec.genset.is_basis() {
        Sigma::Exact(r)
    } else {
        Sigma::Bounds { rho: r }
    })
}

/// Smallest `δ ≥ 0` such that `(g0|g2) ≥ min((g0|g1), (g1|g2)) − δ` over all
/// ordered triples of `sample`.
pub fn four_point_deficiency(spec: &VisualMetricSpec, sample: &[Word]) -> Result<Rational> {
    let n = sample.len();
    if n < 3 {
        return Ok(Rational::from_integer(0));
    }
    let base: Vec<i64> = sample
        .iter()
        .map(|g| spec.dist_from_base(g).map(|d| d as i64))
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<i64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| Ok(base[i] + base[j] - spec.dist(&sample[i], &sample[j])? as i64))
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<_>>()?;
    let worst = (0..n)
        .into_par_iter()
        .map(|i0| {
            let r0 = &rows[i0];
            let mut worst = 0i64;
            for (i1, r1) in rows.iter().enumerate() {
                let a = r0[i1];
                for (i2, &c) in r0.iter().enumerate() {
                    worst = worst.max(a.min(r1[i2]) - c);
                }
            }
            worst
        })
        .max()
        .unwrap_or(0);
    Ok(Rational::new(worst, 2))
}

/// `(λ, K)` making a `(P, Q)`-controlled `L`-local path a quasigeodesic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiGeodesicConstants {
    pub lambda: f64,
    pub k: f64,
}

pub fn quasigeodesic_constants(p: f64, q: f64, l: f64) -> Result<QuasiGeodesicConstants> {
    if !(p > 0.0 && l > 0.0) {
        return Err(Error::InvalidArgument("P and L must be positive".into()));
    }
    if q.is_nan() || q < 0.0 {
        return Err(Error::InvalidArgument("Q must be non-negative".into()));
    }
    Ok(QuasiGeodesicConstants {
        lambda: (l * p).max(1.0),
        k: (2.0 * l).max((q + 1.0) / p + l),
    })
}
