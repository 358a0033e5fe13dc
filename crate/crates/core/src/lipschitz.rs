//! Deciding membership in `Per·Inn`, the automorphisms that are Lipschitz
//! for the visual metrics of a basis, and the constants attached to them.

use std::fmt;

use crate::error::{Error, Result};
use crate::metric::dist_basis;
use crate::morphism::{Endomorphism, SignedPermutation};
use crate::word::{ball, Basis, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Obstruction {
    NotAutomorphism,
    /// `|aφ|_c ≠ 1` for the generator `a`.
    CyclicLength {
        generator: usize,
        image: Word,
        cyclic_length: usize,
    },
    /// No `z` conjugates every cyclic core back to its image; `generator`
    /// is the first one whose constraint could not be met together with
    /// those before it.
    NoCommonConjugator {
        generator: usize,
    },
    /// The cyclic cores `a ↦ b_a` do not form a signed permutation.
    NotPermutation {
        cores: Vec<Letter>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    /// `φ = π·λ_z`, i.e. `aφ = z⁻¹(aπ)z`.
    InPerInn {
        pi: SignedPermutation,
        z: Word,
        verified: bool,
    },
    NotInPerInn(Obstruction),
}

impl Classification {
    pub fn is_in_per_inn(&self) -> bool {
        matches!(self, Classification::InPerInn { .. })
    }

    /// Structured `key: value` lines.
    pub fn render(&self, basis: &Basis) -> String {
        match self {
            Classification::InPerInn { pi, z, verified } => format!(
                "verdict: InPerInn\npi: {}\nz: {}\nverified: {verified}\n",
                pi.format(basis),
                basis.format_word(z)
            ),
            Classification::NotInPerInn(o) => {
                let mut out = String::from("verdict: NotInPerInn\n");
                match o {
                    Obstruction::NotAutomorphism => out.push_str("reason: NotAutomorphism\n"),
                    Obstruction::CyclicLength {
                        generator,
                        image,
                        cyclic_length,
                    } => out.push_str(&format!(
                        "reason: CyclicLengthObstruction\nwitness: {}\nimage: {}\ncyclic_length: {cyclic_length}\n",
                        basis.name(*generator),
                        basis.format_word(image)
                    )),
                    Obstruction::NoCommonConjugator { generator } => out.push_str(&format!(
                        "reason: NoCommonConjugator\nwitness: {}\n",
                        basis.name(*generator)
                    )),
                    Obstruction::NotPermutation { cores } => {
                        let cores: Vec<String> = cores
                            .iter()
                            .map(|&l| basis.format_word(&Word::letter(l)))
                            .collect();
                        out.push_str(&format!(
                            "reason: NotPermutation\ncores: {}\n",
                            cores.join(" ")
                        ));
                    }
                }
                out
            }
        }
    }
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obstruction::NotAutomorphism => f.write_str("NotAutomorphism"),
            Obstruction::CyclicLength { .. } => f.write_str("CyclicLengthObstruction"),
            Obstruction::NoCommonConjugator { .. } => f.write_str("NoCommonConjugator"),
            Obstruction::NotPermutation { .. } => f.write_str("NotPermutation"),
        }
    }
}

/// `w` is a power of the letter `b`.
fn in_cyclic_letter_group(w: &Word, b: Letter) -> bool {
    w.letters().iter().all(|&l| l == b) || w.letters().iter().all(|&l| l == b.inverse())
}

/// Decides whether `φ ∈ Per·Inn`, returning a checked factorization or the
/// first obstruction met.
pub fn classify_per_inn(phi: &Endomorphism) -> Classification {
    use Classification::NotInPerInn;

    if !phi.is_automorphism() {
        return NotInPerInn(Obstruction::NotAutomorphism);
    }
    // aφ = w⁻¹ b w with b a single letter
    let mut cores = Vec::with_capacity(phi.rank());
    let mut conjugators = Vec::with_capacity(phi.rank());
    for (g, img) in phi.images().iter().enumerate() {
        let (core, conj) = img.cyclic_reduce();
        if core.len() != 1 {
            return NotInPerInn(Obstruction::CyclicLength {
                generator: g,
                image: img.clone(),
                cyclic_length: core.len(),
            });
        }
        cores.push(core.letters()[0]);
        conjugators.push(conj);
    }

    // z ∈ ⟨b_a⟩w_a for every a; write z = b₁^k w₁ and scan k.
    let b1 = Word::letter(cores[0]);
    let w1 = &conjugators[0];
    let offsets: Vec<Word> = conjugators.iter().map(|w| w1 * &w.inverse()).collect();
    let bound = offsets.iter().map(Word::len).max().unwrap_or(0) + w1.len() + 2;
    let bound = bound as i64;
    let mut best: Option<(usize, i64, Word)> = None;
    let mut failing = 0;
    for k in -bound..=bound {
        let head = b1.pow(k);
        let ok = offsets
            .iter()
            .zip(&cores)
            .position(|(c, &b)| !in_cyclic_letter_group(&(&head * c), b));
        match ok {
            None => {
                let z = &head * w1;
                if best.as_ref().is_none_or(|(len, _, _)| z.len() < *len) {
                    best = Some((z.len(), k, z));
                }
            }
            Some(i) => failing = failing.max(i),
        }
    }
    let Some((_, _, z)) = best else {
        return NotInPerInn(Obstruction::NoCommonConjugator { generator: failing });
    };

    let Ok(pi) = SignedPermutation::new(cores.clone()) else {
        return NotInPerInn(Obstruction::NotPermutation { cores });
    };
    let verified = Endomorphism::from_permutation(phi.basis(), &pi)
        .and_then(|p| p.compose(&Endomorphism::inner(phi.basis(), &z)?))
        .is_ok_and(|f| &f == phi);
    Classification::InPerInn { pi, z, verified }
}

/// `Q = 2|x| + d(p, xp)`: `(gλ_x | hλ_x)_p + Q ≥ (g|h)_p` in the basis metric.
pub fn inner_lipschitz_q(x: &Word, p: &Word) -> u64 {
    2 * x.len() as u64 + dist_basis(p, &(x * p))
}

/// `Q = d(p, pφ)` for an isometry `φ` of the basis word metric.
pub fn isometry_lipschitz_q(phi: &Endomorphism, p: &Word) -> Result<u64> {
    let basis = phi.basis();
    basis.check(p)?;
    if let Some((g, img)) = phi.length_change_within(3) {
        return Err(Error::NotIsometry {
            word: basis.format_word(&g),
            image_len: img.len(),
        });
    }
    Ok(dist_basis(p, &phi.apply(p)?))
}

/// First `g` (in ball order) of length at most `radius` whose cyclic length
/// strictly drops under `φ`. Such a `g` rules out any Lipschitz condition.
pub fn fexp_counterexample(phi: &Endomorphism, radius: usize) -> Option<Word> {
    ball(phi.rank(), radius)
        .into_iter()
        .find(|g| phi.apply_unchecked(g).cyclic_length() < g.cyclic_length())
}

/// First `g` of length at most `radius` with `|gφ|_c ≠ |g|_c`.
pub fn cyclic_length_change(phi: &Endomorphism, radius: usize) -> Option<Word> {
    ball(phi.rank(), radius)
        .into_iter()
        .find(|g| phi.apply_unchecked(g).cyclic_length() != g.cyclic_length())
}

/// The conjugates of `ε` by the three Nielsen generators of `Aut(F_2)`:
/// `μ⁻¹εμ` equals `ε` for `μ_{b,a}` and `μ_{a⁻¹,b}`, and `ε·λ_b` for `μ_{ab,b}`.
pub fn twobasis_relations(basis: &Basis) -> Result<[bool; 3]> {
    let eps = Endomorphism::epsilon(basis);
    let [swap, flip, mult] = Endomorphism::nielsen_generators(basis)?;
    let conj =
        |mu: &Endomorphism| -> Result<Endomorphism> { mu.invert()?.compose(&eps)?.compose(mu) };
    let eps_lambda_b = eps.compose(&Endomorphism::inner(basis, &basis.gen(1))?)?;
    Ok([
        conj(&swap)? == eps,
        conj(&flip)? == eps,
        conj(&mult)? == eps_lambda_b,
    ])
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
    fn inner_is_identity_times_inner() {
        for x in ["1", "a", "a b", "b^-2 a b a"] {
            let phi = Endomorphism::inner(&f2(), &w(x)).unwrap();
            assert_eq!(
                classify_per_inn(&phi),
                Classification::InPerInn {
                    pi: SignedPermutation::identity(2),
                    z: w(x),
                    verified: true
                }
            );
        }
    }

    #[test]
    fn epsilon_times_inner() {
        let b = f2();
        let phi = Endomorphism::epsilon(&b)
            .compose(&Endomorphism::inner(&b, &w("a b")).unwrap())
            .unwrap();
        assert_eq!(phi.image_of(0), &w("b^-1 a^-1 b"));
        assert_eq!(
            classify_per_inn(&phi),
            Classification::InPerInn {
                pi: SignedPermutation::epsilon(2),
                z: w("a b"),
                verified: true
            }
        );
    }

    #[test]
    fn nielsen_multiplication_is_obstructed() {
        let phi = Endomorphism::mu(&f2(), &w("a b"), &w("b")).unwrap();
        let c = classify_per_inn(&phi);
        assert_eq!(
            c,
            Classification::NotInPerInn(Obstruction::CyclicLength {
                generator: 0,
                image: w("a b"),
                cyclic_length: 2
            })
        );
        assert!(c
            .render(&f2())
            .contains("reason: CyclicLengthObstruction\nwitness: a\n"));
    }

    #[test]
    fn non_automorphisms() {
        let phi = Endomorphism::mu(&f2(), &w("a"), &w("a")).unwrap();
        assert_eq!(
            classify_per_inn(&phi),
            Classification::NotInPerInn(Obstruction::NotAutomorphism)
        );
    }

    #[test]
    fn rank_one() {
        let b = Basis::standard(1);
        let inv = Endomorphism::epsilon(&b);
        assert_eq!(
            classify_per_inn(&inv),
            Classification::InPerInn {
                pi: SignedPermutation::epsilon(1),
                z: Word::identity(),
                verified: true
            }
        );
    }

    #[test]
    fn rendering() {
        let b = f2();
        let phi = Endomorphism::inner(&b, &w("a")).unwrap();
        assert_eq!(
            classify_per_inn(&phi).render(&b),
            "verdict: InPerInn\npi: a->a a^-1->a^-1 b->b b^-1->b^-1\nz: a\nverified: true\n"
        );
    }

    #[test]
    fn hil_constants() {
        assert_eq!(inner_lipschitz_q(&w("a b"), &Word::identity()), 6);
        assert_eq!(inner_lipschitz_q(&Word::identity(), &w("a b^-1")), 0);
        assert_eq!(inner_lipschitz_q(&w("a"), &w("b")), 5);
    }

    #[test]
    fn haq_constants() {
        let b = f2();
        let eps = Endomorphism::epsilon(&b);
        assert_eq!(isometry_lipschitz_q(&eps, &w("a b")).unwrap(), 4);
        assert_eq!(isometry_lipschitz_q(&eps, &Word::identity()).unwrap(), 0);
        let swap = Endomorphism::mu(&b, &w("b"), &w("a")).unwrap();
        assert_eq!(isometry_lipschitz_q(&swap, &Word::identity()).unwrap(), 0);
        let mult = Endomorphism::mu(&b, &w("a b"), &w("b")).unwrap();
        assert!(matches!(
            isometry_lipschitz_q(&mult, &Word::identity()),
            Err(Error::NotIsometry { .. })
        ));
    }

    #[test]
    fn fexp_examples() {
        let b = f2();
        let mult = Endomorphism::mu(&b, &w("a b"), &w("b")).unwrap();
        assert_eq!(fexp_counterexample(&mult, 2), Some(w("a b^-1")));
        let inner = Endomorphism::inner(&b, &w("a b^-1 a")).unwrap();
        assert_eq!(fexp_counterexample(&inner, 4), None);
        assert_eq!(cyclic_length_change(&inner, 4), None);
        assert_eq!(fexp_counterexample(&Endomorphism::epsilon(&b), 4), None);
    }

    #[test]
    fn twobasis() {
        assert_eq!(twobasis_relations(&f2()).unwrap(), [true; 3]);
        assert!(twobasis_relations(&Basis::standard(3)).is_err());
    }
}
