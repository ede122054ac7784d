//! ξ-factorization of split polynomials with constant term 1, and the
//! resonance, general-position, and regularity predicates on them.
//!
//! A split polynomial is presented by its multiset of inverse roots
//! (`f = ∏ (1 - a u)` ranges over the multiset).  Its ξ-factorization
//! regroups the roots into *quantum strings* `f_{a,r}`, whose roots form a
//! geometric `ξ_i²`-progression centered at `a`, and — at a root of unity
//! of order `l` — *Frobenius factors* `(1 - b u^l)`, the images of full
//! strings of length `l`.  The factorization is unique once one demands
//! the string separation condition: the ratio of two string centers never
//! lies on `ξ^{±(r_k+r_j-2p)}` with `0 ≤ p < min(r_k, r_j)`.
//!
//! The algorithm used here is a run decomposition.  Within one
//! interaction class (same base symbol, ξ-exponents congruent mod `2d`),
//! roots sit on a line (or a cycle, at finite order) with consecutive
//! positions `ξ_i²` apart, and the strings of the unique valid
//! factorization are exactly the maximal constant-height runs of the
//! multiplicity histogram.  Full cycles become Frobenius factors.  A
//! validation pass re-checks every pairwise constraint afterwards and
//! panics loudly if the invariant ever fails.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ground::{
    param_shift, ratio_xi_power, GroundField, SpectralParam,
};

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum QFactorError {
    #[error("factorizations are over different ground fields or steps")]
    FieldMismatch,
}

/// A finite multiset of inverse roots.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RootMultiset(BTreeMap<SpectralParam, u32>);

impl RootMultiset {
    pub fn new() -> Self {
        RootMultiset(BTreeMap::new())
    }

    pub fn from_iter(params: impl IntoIterator<Item = SpectralParam>) -> Self {
        let mut m = RootMultiset::new();
        for p in params {
            m.add(p, 1);
        }
        m
    }

    pub fn add(&mut self, p: SpectralParam, mult: u32) {
        if mult > 0 {
            *self.0.entry(p).or_insert(0) += mult;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.values().map(|&m| m as usize).sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&SpectralParam, u32)> {
        self.0.iter().map(|(p, &m)| (p, m))
    }
}

/// The strength of the resonance condition: `Strict` quantifies the
/// exponent window by the left factor's length, `Weak` by the minimum of
/// the two lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strength {
    Strict,
    Weak,
}

/// A ξ-factorization: quantum strings plus Frobenius factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QFactorization {
    field: GroundField,
    /// The shift step `d_i` (the factorization is taken with respect to
    /// `ξ_i = ξ^{d_i}`).
    step: i64,
    /// Sorted list of `(a, r)` for quantum strings `f_{a,r}`, with
    /// multiplicity given by repetition.
    quantum: Vec<(SpectralParam, u32)>,
    /// Frobenius factors `(1 - b u^l)` with multiplicities.
    frobenius: BTreeMap<SpectralParam, u32>,
}

impl QFactorization {
    pub fn field(&self) -> &GroundField {
        &self.field
    }

    pub fn step(&self) -> i64 {
        self.step
    }

    pub fn quantum(&self) -> &[(SpectralParam, u32)] {
        &self.quantum
    }

    pub fn frobenius(&self) -> &BTreeMap<SpectralParam, u32> {
        &self.frobenius
    }

    pub fn is_trivial(&self) -> bool {
        self.quantum.is_empty() && self.frobenius.is_empty()
    }

    /// Total degree of the underlying polynomial.
    pub fn degree(&self) -> i64 {
        let q: i64 = self.quantum.iter().map(|&(_, r)| r as i64).sum();
        let f: i64 = self.frobenius.values().map(|&m| m as i64).sum();
        q + f * self.field.l() as i64
    }
}

impl fmt::Display for QFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (a, r) in &self.quantum {
            parts.push(format!("f[{a};{r}]"));
        }
        for (b, m) in &self.frobenius {
            if *m == 1 {
                parts.push(format!("Fr[{b}]"));
            } else {
                parts.push(format!("Fr[{b}]^{m}"));
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Expand a factorization back into its quantum-root multiset; Frobenius
/// factors pass through untouched (they have no root decomposition over a
/// formal base).
pub fn expand(f: &QFactorization) -> (RootMultiset, BTreeMap<SpectralParam, u32>) {
    let mut roots = RootMultiset::new();
    for (a, r) in &f.quantum {
        for j in 0..*r as i64 {
            let shift = f.step * (*r as i64 - 1 - 2 * j);
            roots.add(param_shift(&f.field, a, shift), 1);
        }
    }
    (roots, f.frobenius.clone())
}

/// The roots of the string `f_{a,r}` at step `d`.
pub fn string_roots(
    field: &GroundField,
    a: &SpectralParam,
    r: u32,
    step: i64,
) -> Vec<SpectralParam> {
    (0..r as i64)
        .map(|j| param_shift(field, a, step * (r as i64 - 1 - 2 * j)))
        .collect()
}

fn mod_inverse(a: i64, l: i64) -> i64 {
    // l is small and odd; brute force is fine
    (1..l).find(|&x| (a * x).rem_euclid(l) == 1).expect("unit mod l")
}

/// Decompose a linear multiplicity histogram into maximal constant-height
/// runs: returns `(start, len, copies)` triples.
fn linear_runs(heights: &[u32]) -> Vec<(usize, usize, u32)> {
    fn rec(h: &[u32], offset: usize, base: u32, out: &mut Vec<(usize, usize, u32)>) {
        if h.is_empty() {
            return;
        }
        let m = *h.iter().min().unwrap();
        if m > base {
            out.push((offset, h.len(), m - base));
        }
        // split at minima and recurse
        let mut start = 0usize;
        for i in 0..=h.len() {
            if i == h.len() || h[i] == m {
                if i > start {
                    rec(&h[start..i], offset + start, m, out);
                }
                start = i + 1;
            }
        }
    }
    let mut out = Vec::new();
    // strip outer zeros by splitting on them
    let mut start = 0usize;
    for i in 0..=heights.len() {
        if i == heights.len() || heights[i] == 0 {
            if i > start {
                rec(&heights[start..i], start, 0, &mut out);
            }
            start = i + 1;
        }
    }
    out
}

/// The unique ξ-factorization of a root multiset (with optional
/// pre-existing Frobenius content, whose multiplicities add).
pub fn xi_factorize(
    roots: &RootMultiset,
    frob_in: &BTreeMap<SpectralParam, u32>,
    field: &GroundField,
    step: i64,
) -> QFactorization {
    let mut quantum: Vec<(SpectralParam, u32)> = Vec::new();
    let mut frobenius: BTreeMap<SpectralParam, u32> = frob_in
        .iter()
        .filter(|(_, &m)| m > 0)
        .map(|(p, &m)| (p.clone(), m))
        .collect();

    match field.finite_order() {
        None => {
            // generic: interaction classes are (base, xi_exp mod 2*step)
            let mut classes: BTreeMap<(crate::ground::BaseVec, i64), Vec<(i64, u32)>> =
                BTreeMap::new();
            for (p, m) in roots.entries() {
                let key = (p.base().clone(), p.xi_exp().rem_euclid(2 * step));
                classes.entry(key).or_default().push((p.xi_exp(), m));
            }
            for ((base, _), mut exps) in classes {
                exps.sort();
                let lo = exps[0].0;
                let hi = exps[exps.len() - 1].0;
                let npos = ((hi - lo) / (2 * step) + 1) as usize;
                let mut heights = vec![0u32; npos];
                for (e, m) in exps {
                    heights[((e - lo) / (2 * step)) as usize] += m;
                }
                for (start, len, copies) in linear_runs(&heights) {
                    // run occupies exponents lo+2*step*start .. step 2*step,
                    // length len; string center sits at top - step*(len-1)
                    let top = lo + 2 * step * (start + len - 1) as i64;
                    let center = top - step * (len as i64 - 1);
                    let a = field.param(base.clone(), center);
                    for _ in 0..copies {
                        quantum.push((a.clone(), len as u32));
                    }
                }
            }
        }
        Some(l) => {
            let l = l as i64;
            // finite order: one cycle per base; positions are residues
            // re-ordered so that consecutive positions differ by ξ^{2*step}
            let inv = if l == 1 { 0 } else { mod_inverse((2 * step).rem_euclid(l), l) };
            let mut classes: BTreeMap<crate::ground::BaseVec, Vec<u32>> = BTreeMap::new();
            for (p, m) in roots.entries() {
                let heights = classes.entry(p.base().clone()).or_insert_with(|| vec![0; l as usize]);
                let pos = (p.xi_exp() * inv).rem_euclid(l) as usize;
                heights[pos] += m;
            }
            for (base, mut heights) in classes {
                let full = *heights.iter().min().unwrap();
                if full > 0 {
                    // full cycles collapse to Frobenius factors with base the
                    // product of the l roots: base^l (the ξ-exponents sum to
                    // l(l-1)/2 ≡ 0 for odd l)
                    let block = field.param(base.pow(l), 0);
                    *frobenius.entry(block).or_insert(0) += full;
                    for h in heights.iter_mut() {
                        *h -= full;
                    }
                }
                if heights.iter().all(|&h| h == 0) {
                    continue;
                }
                // cut the cycle at a zero position and decompose linearly
                let cut = heights.iter().position(|&h| h == 0).expect("cycle has a gap");
                let rotated: Vec<u32> =
                    (0..l as usize).map(|k| heights[(cut + 1 + k) % l as usize]).collect();
                for (start, len, copies) in linear_runs(&rotated) {
                    // position index back on the cycle, then to an exponent
                    let bottom_pos = (cut as i64 + 1 + start as i64).rem_euclid(l);
                    let bottom_exp = (bottom_pos * 2 * step).rem_euclid(l);
                    let center = bottom_exp + step * (len as i64 - 1);
                    let a = field.param(base.clone(), center);
                    for _ in 0..copies {
                        quantum.push((a.clone(), len as u32));
                    }
                }
            }
        }
    }

    quantum.sort();
    let out = QFactorization { field: *field, step, quantum, frobenius };
    validate(&out);
    out
}

/// Defensive re-check of the factorization invariants.
fn validate(f: &QFactorization) {
    if let Some(l) = f.field.finite_order() {
        for (_, r) in &f.quantum {
            assert!(
                (*r as i64) < l as i64 || !f.field.is_root_of_unity(),
                "string length must satisfy 0 < r < l"
            );
            if f.field.is_one() {
                unreachable!("no quantum strings at ξ = 1");
            }
        }
    }
    for (k, (a, r)) in f.quantum.iter().enumerate() {
        for (aj, rj) in f.quantum.iter().skip(k + 1) {
            let set = ratio_xi_power(&f.field, a, aj).expect("validated params");
            if let Some(set) = set {
                let min = (*r).min(*rj) as i64;
                for p in 0..min {
                    let v = f.step * (*r as i64 + *rj as i64 - 2 * p);
                    assert!(
                        !set.contains(v) && !set.contains(-v),
                        "separation condition violated between {a} (r={r}) and {aj} (r={rj})"
                    );
                }
            }
        }
    }
}

/// The ordered-pair resonance predicate on factorizations.
pub fn pair_resonant(
    f: &QFactorization,
    g: &QFactorization,
    strength: Strength,
) -> Result<bool, QFactorError> {
    Ok(pair_violation(f, g, strength)?.is_none())
}

/// Like [`pair_resonant`] but reporting the first violated constraint.
pub fn pair_violation(
    f: &QFactorization,
    g: &QFactorization,
    strength: Strength,
) -> Result<Option<String>, QFactorError> {
    if f.field != g.field || f.step != g.step {
        return Err(QFactorError::FieldMismatch);
    }
    for b in f.frobenius.keys() {
        if g.frobenius.contains_key(b) {
            return Ok(Some(format!("shared Frobenius base {b}")));
        }
    }
    for (a, r) in &f.quantum {
        for (aj, rj) in &g.quantum {
            let Some(set) = ratio_xi_power(&f.field, a, aj).map_err(|_| QFactorError::FieldMismatch)?
            else {
                continue;
            };
            let p_max = match strength {
                Strength::Strict => *r as i64,
                Strength::Weak => (*r).min(*rj) as i64,
            };
            for p in 0..p_max {
                let v = -f.step * (*r as i64 + *rj as i64 - 2 * p);
                if set.contains(v) {
                    return Ok(Some(format!(
                        "ratio {a}/{aj} hits xi^({v}) with (r,r',p)=({r},{rj},{p})"
                    )));
                }
            }
        }
    }
    Ok(None)
}

/// General position: weak resonance in both orders.
pub fn general_position(f: &QFactorization, g: &QFactorization) -> Result<bool, QFactorError> {
    Ok(pair_resonant(f, g, Strength::Weak)? && pair_resonant(g, f, Strength::Weak)?)
}

/// An ordered tuple is resonant when every ordered pair `j < k` is.
pub fn tuple_resonant(fs: &[&QFactorization], strength: Strength) -> Result<bool, QFactorError> {
    for j in 0..fs.len() {
        for k in j + 1..fs.len() {
            if !pair_resonant(fs[j], fs[k], strength)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// ξ-regularity: no Frobenius factors (multiplicity-free at ξ = 1).
pub fn poly_regular(f: &QFactorization) -> bool {
    if f.field.is_one() {
        f.frobenius.values().all(|&m| m <= 1)
    } else {
        f.frobenius.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::BaseVec;

    fn q() -> GroundField {
        GroundField::generic(1)
    }

    fn sym(field: &GroundField, s: &str, e: i64) -> SpectralParam {
        field.param(BaseVec::symbol(s), e)
    }

    fn factor(field: &GroundField, roots: &[SpectralParam]) -> QFactorization {
        xi_factorize(
            &RootMultiset::from_iter(roots.iter().cloned()),
            &BTreeMap::new(),
            field,
            1,
        )
    }

    #[test]
    fn expand_examples() {
        let f = q();
        let a = sym(&f, "a", 0);
        let one_string = QFactorization {
            field: f,
            step: 1,
            quantum: vec![(a.clone(), 3)],
            frobenius: BTreeMap::new(),
        };
        let (roots, _) = expand(&one_string);
        let expect =
            RootMultiset::from_iter([sym(&f, "a", 2), sym(&f, "a", 0), sym(&f, "a", -2)]);
        assert_eq!(roots, expect);
    }

    #[test]
    fn factorize_one_string() {
        let f = q();
        let fact = factor(&f, &[sym(&f, "a", 1), sym(&f, "a", -1)]);
        assert_eq!(fact.quantum(), &[(sym(&f, "a", 0), 2)]);
        assert!(fact.frobenius().is_empty());
    }

    #[test]
    fn factorize_full_orbit_is_frobenius() {
        let z3 = GroundField::root_of_unity(3, 1).unwrap();
        let fact = factor(&z3, &[sym(&z3, "a", 0), sym(&z3, "a", 1), sym(&z3, "a", 2)]);
        assert!(fact.quantum().is_empty());
        let block = z3.param(BaseVec::symbol("a").pow(3), 0);
        assert_eq!(fact.frobenius().get(&block), Some(&1));
    }

    #[test]
    fn factorize_separated_singletons() {
        let f = q();
        let fact = factor(&f, &[sym(&f, "a", 0), sym(&f, "a", 4)]);
        assert_eq!(
            fact.quantum(),
            &[(sym(&f, "a", 0), 1), (sym(&f, "a", 4), 1)]
        );
    }

    #[test]
    fn factorize_adjacent_merge() {
        let f = q();
        // {a, aξ^2} is a single string centered at aξ
        let fact = factor(&f, &[sym(&f, "a", 0), sym(&f, "a", 2)]);
        assert_eq!(fact.quantum(), &[(sym(&f, "a", 1), 2)]);
    }

    #[test]
    fn factorize_nested() {
        let f = q();
        // {a, a, aξ^2}: a length-2 string over a length-1 string
        let fact = factor(&f, &[sym(&f, "a", 0), sym(&f, "a", 0), sym(&f, "a", 2)]);
        assert_eq!(
            fact.quantum(),
            &[(sym(&f, "a", 0), 1), (sym(&f, "a", 1), 2)]
        );
    }

    #[test]
    fn finite_mode_wraps() {
        let z3 = GroundField::root_of_unity(3, 1).unwrap();
        // {a, aζ}: 1 ≡ -2 mod 3, so the pair is a single string
        let fact = factor(&z3, &[sym(&z3, "a", 0), sym(&z3, "a", 1)]);
        assert_eq!(fact.quantum().len(), 1);
        assert_eq!(fact.quantum()[0].1, 2);
        let (roots, _) = expand(&fact);
        assert_eq!(
            roots,
            RootMultiset::from_iter([sym(&z3, "a", 0), sym(&z3, "a", 1)])
        );
    }

    #[test]
    fn one_mode_all_frobenius() {
        let one = GroundField::one(1);
        let fact = factor(&one, &[sym(&one, "a", 0), sym(&one, "a", 0), sym(&one, "b", 0)]);
        assert!(fact.quantum().is_empty());
        assert_eq!(fact.frobenius().get(&sym(&one, "a", 0)), Some(&2));
        assert_eq!(fact.frobenius().get(&sym(&one, "b", 0)), Some(&1));
        assert!(!poly_regular(&fact));
        let fact2 = factor(&one, &[sym(&one, "a", 0), sym(&one, "b", 0)]);
        assert!(poly_regular(&fact2));
    }

    #[test]
    fn resonance_examples() {
        let f = q();
        // (f_{aξ^{-2},1}, f_{a,1}) strict: the ratio aξ^{-2}/a = ξ^{-2}
        // hits ξ^{-(1+1-0)}, so that order fails; the other order is fine
        let fa = factor(&f, &[sym(&f, "a", 0)]);
        let fb = factor(&f, &[sym(&f, "a", -2)]);
        assert!(!pair_resonant(&fb, &fa, Strength::Strict).unwrap());
        assert!(pair_resonant(&fa, &fb, Strength::Strict).unwrap());
        // distinct bases
        let fc = factor(&f, &[sym(&f, "b", 0)]);
        assert!(pair_resonant(&fa, &fc, Strength::Strict).unwrap());
        // for ξ of infinite or odd finite order, equal length-1 strings are
        // in general position (their ratio is ξ^0, never ξ^{-(2-2p)});
        // at ξ = 1 the shared root makes the pair collide
        assert!(general_position(&fa, &fa).unwrap());
        let one = GroundField::one(1);
        let ga = factor(&one, &[sym(&one, "a", 0)]);
        assert!(!general_position(&ga, &ga).unwrap());
        // singleton tuple
        assert!(tuple_resonant(&[&fa], Strength::Strict).unwrap());
    }

    #[test]
    fn resonance_finite_pair() {
        let z5 = GroundField::root_of_unity(5, 1).unwrap();
        let fa = factor(&z5, &[sym(&z5, "a", 1), sym(&z5, "a", 4)]);
        assert_eq!(fa.quantum(), &[(sym(&z5, "a", 0), 2)]);
        let fb = factor(&z5, &[sym(&z5, "a", 4), sym(&z5, "a", 2)]);
        assert_eq!(fb.quantum(), &[(sym(&z5, "a", 3), 2)]);
        // forbidden exponents -(2+2-2p), p in {0,1}: residues 1 and 3;
        // the ratio a/(aζ^3) has residue 2, so the pair is resonant
        assert!(pair_resonant(&fa, &fb, Strength::Strict).unwrap());
        // shifting g by one more power lands on a violation
        let fc = factor(&z5, &[sym(&z5, "a", 0), sym(&z5, "a", 3)]);
        assert_eq!(fc.quantum(), &[(sym(&z5, "a", 4), 2)]);
        assert!(!pair_resonant(&fa, &fc, Strength::Strict).unwrap());
    }

    #[test]
    fn regular_examples() {
        let z3 = GroundField::root_of_unity(3, 1).unwrap();
        let fact = factor(&z3, &[sym(&z3, "a", 0), sym(&z3, "a", 1), sym(&z3, "a", 2)]);
        assert!(!poly_regular(&fact));
        let f = q();
        assert!(poly_regular(&factor(&f, &[sym(&f, "a", 0), sym(&f, "a", 0)])));
    }


    #[test]
    fn regular_iff_some_permutation_resonant() {
        // products of degree-1 factors: some ordering is strictly resonant
        // exactly when the product polynomial is regular (exhaustive over
        // all orderings of up to 4 factors)
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        let fields = [
            q(),
            GroundField::root_of_unity(3, 1).unwrap(),
            GroundField::root_of_unity(5, 1).unwrap(),
            GroundField::one(1),
        ];
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for k in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(k, n - 1);
                    out.push(q);
                }
            }
            out
        }
        for field in fields {
            for _ in 0..40 {
                let m = rng.gen_range(1..=4usize);
                let roots: Vec<SpectralParam> = (0..m)
                    .map(|_| sym(&field, "a", field.reduce_exp(rng.gen_range(0..6))))
                    .collect();
                let singles: Vec<QFactorization> =
                    roots.iter().map(|r| factor(&field, &[r.clone()])).collect();
                let exists = perms(m).into_iter().any(|p| {
                    let ordered: Vec<&QFactorization> = p.iter().map(|&i| &singles[i]).collect();
                    tuple_resonant(&ordered, Strength::Strict).unwrap()
                });
                let product = factor(&field, &roots);
                assert_eq!(exists, poly_regular(&product), "{roots:?} over {field}");
            }
        }
    }

    #[test]
    fn round_trip_random() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let fields = [
            q(),
            GroundField::root_of_unity(3, 1).unwrap(),
            GroundField::root_of_unity(5, 1).unwrap(),
            GroundField::one(1),
        ];
        for field in fields {
            for step in [1i64, 2] {
                for _ in 0..60 {
                    let n = rng.gen_range(0..7);
                    let mut roots = RootMultiset::new();
                    for _ in 0..n {
                        let s = if rng.gen_bool(0.8) { "a" } else { "b" };
                        let e = field.reduce_exp(rng.gen_range(-6..10));
                        roots.add(field.param(BaseVec::symbol(s), e), 1);
                    }
                    let fact = xi_factorize(&roots, &BTreeMap::new(), &field, step);
                    let (expanded, frob) = expand(&fact);
                    // expansion together with frobenius blocks accounts for
                    // the whole degree
                    assert_eq!(
                        expanded.len() as i64
                            + frob.values().map(|&m| m as i64).sum::<i64>() * field.l() as i64,
                        roots.len() as i64
                    );
                    if frob.is_empty() {
                        assert_eq!(expanded, roots);
                    }
                    // re-factorizing the expansion reproduces the factorization
                    let again = xi_factorize(&expanded, &frob, &field, step);
                    assert_eq!(again, fact);
                }
            }
        }
    }
}
