//! q-characters: finite multisets of ℓ-weights with positive integer
//! multiplicities, and the computations the crate supports on them.
//!
//! Three sources of q-characters are implemented exactly:
//!
//! - the closed sl₂ ladder for Weyl modules, produced by two independent
//!   routes (string cancellation and simple-ℓ-root descents) that are
//!   checked against each other and anchored at the dual lowest ℓ-weight;
//! - a braid-invariance frontier for fundamental modules in classical
//!   types: orbit propagation over minimal coset representatives plus
//!   string-top descents, which yields a certified lower bound with a
//!   saturation flag;
//! - the closed form for the node-2 fundamental module in type `D_n`,
//!   generically and at roots of unity, where the interesting collisions
//!   and the dropped zero-weight term appear.
//!
//! Specialization (the bar map) pushes a generic q-character term by term
//! to a finite-order one, merging colliding ℓ-weights.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::braid;
use crate::cartan::{CartanData, TypeLetter, Weight};
use crate::ground::{param_shift, GroundField, SpectralParam};
use crate::lweight::{simple_lroot, LWeight, LWeightError};
use crate::qfactor::{self, QFactorization};

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum QCharError {
    #[error("operation requires type A_1")]
    NotSl2,
    #[error("operation requires a classical type (A, B, C, or D)")]
    NotClassical,
    #[error("operation requires type D_n with n >= 4")]
    NotDn,
    #[error(transparent)]
    LWeight(#[from] LWeightError),
    #[error("fundamental character table has no entry for node {0}")]
    MissingTableEntry(usize),
}

/// A q-character: ℓ-weights with positive multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QCharacter {
    terms: BTreeMap<LWeight, u64>,
}

impl QCharacter {
    pub fn new() -> Self {
        QCharacter { terms: BTreeMap::new() }
    }

    pub fn single(lam: LWeight) -> Self {
        let mut c = QCharacter::new();
        c.add(lam, 1);
        c
    }

    pub fn add(&mut self, lam: LWeight, mult: u64) {
        if mult > 0 {
            *self.terms.entry(lam).or_insert(0) += mult;
        }
    }

    /// Raise the multiplicity of a term to at least `bound`.
    pub fn raise(&mut self, lam: LWeight, bound: u64) -> bool {
        let slot = self.terms.entry(lam).or_insert(0);
        if *slot < bound {
            *slot = bound;
            true
        } else {
            false
        }
    }

    pub fn mult(&self, lam: &LWeight) -> u64 {
        self.terms.get(lam).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LWeight, u64)> {
        self.terms.iter().map(|(l, &m)| (l, m))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn dimension(&self) -> u64 {
        self.terms.values().sum()
    }

    /// Pointwise order on multiplicity functions.
    pub fn le(&self, other: &QCharacter) -> bool {
        self.terms.iter().all(|(l, &m)| other.mult(l) >= m)
    }
}

impl fmt::Display for QCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(l, m)| if *m == 1 { format!("{l}") } else { format!("{m}*({l})") })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Convolution product in the group ring of the ℓ-weight lattice.
pub fn qchar_mul(a: &QCharacter, b: &QCharacter) -> QCharacter {
    let mut out = QCharacter::new();
    for (la, ma) in a.terms() {
        for (lb, mb) in b.terms() {
            out.add(la.mul(lb), ma * mb);
        }
    }
    out
}

/// The sl₂ Weyl-module q-character with highest ℓ-weight `ω_{1,a,r}`.
///
/// Both closed forms are computed — the string form
/// `ω_{1,aξ^{-k},r-k} · ω_{1,aξ^{r-k+2},k}^{-1}` and the descent form
/// `ω_{1,a,r} · ∏_{j=1}^k α_{1,aξ^{r-2j+1}}^{-1}` — and must agree; the
/// `k = r` term is the inverse dual `(λ*)^{-1}`, which pins the shift
/// convention.
pub fn sl2_weyl_qchar(
    cartan: &CartanData,
    field: GroundField,
    a: &SpectralParam,
    r: u32,
) -> Result<QCharacter, QCharError> {
    if cartan.letter() != TypeLetter::A || cartan.rank() != 1 {
        return Err(QCharError::NotSl2);
    }
    let mut omega_form = QCharacter::new();
    for k in 0..=r {
        let pos =
            LWeight::omega_string(cartan, field, 0, &param_shift(&field, a, -(k as i64)), r - k)?;
        let neg = LWeight::omega_string(
            cartan,
            field,
            0,
            &param_shift(&field, a, r as i64 - k as i64 + 2),
            k,
        )?;
        omega_form.add(pos.mul(&neg.inv()), 1);
    }
    let mut alpha_form = QCharacter::new();
    let top = LWeight::omega_string(cartan, field, 0, a, r)?;
    let mut term = top;
    alpha_form.add(term.clone(), 1);
    for j in 1..=r as i64 {
        let alpha =
            simple_lroot(cartan, field, 0, &param_shift(&field, a, r as i64 - 2 * j + 1));
        term = term.mul(&alpha.inv());
        alpha_form.add(term.clone(), 1);
    }
    assert_eq!(omega_form, alpha_form, "the two closed forms must coincide");
    Ok(omega_form)
}

/// Push a generic q-character through the bar map, merging collisions.
pub fn specialize_qchar(chi: &QCharacter, target: GroundField) -> Result<QCharacter, QCharError> {
    let mut out = QCharacter::new();
    for (lam, m) in chi.terms() {
        out.add(lam.specialize(target)?, m);
    }
    Ok(out)
}

/// The Frobenius tensor decomposition of a simple module's highest
/// ℓ-weight, with its interpretation data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobFactorization {
    /// ξ-regular part `λ'`.
    pub prime: LWeight,
    /// The one-layer-down weight `λ''`.
    pub second: LWeight,
    /// `φ_l(λ'')`, the Frobenius-block factor of `λ`.
    pub phi_second: LWeight,
    /// For sl₂ only: whether all evaluation factors of the two parts are
    /// pairwise in general position (so the full evaluation tensor is
    /// irreducible).
    pub sl2_general_position: Option<bool>,
}

/// `frobenius_split` annotated with the tensor interpretation
/// `V(λ) ≅ V(λ') ⊗ V(φ_l(λ''))`.
pub fn frobenius_simple_factor(
    cartan: &CartanData,
    field: GroundField,
    lam: &LWeight,
) -> Result<FrobFactorization, QCharError> {
    let (prime, second) = lam.frobenius_split(cartan)?;
    let phi_second = second.phi_l(field);
    let sl2_general_position = if cartan.letter() == TypeLetter::A && cartan.rank() == 1 {
        let fact = prime.node_factorization(cartan, 0).expect("dominant");
        let mut parts: Vec<QFactorization> = Vec::new();
        for (s, r) in fact.quantum() {
            let mut roots = qfactor::RootMultiset::new();
            for root in qfactor::string_roots(&field, s, *r, 1) {
                roots.add(root, 1);
            }
            parts.push(qfactor::xi_factorize(&roots, &BTreeMap::new(), &field, 1));
        }
        for (n, b, e) in lam.frob_entries().chain(phi_second.frob_entries()) {
            debug_assert_eq!(n, 0);
            let mut blocks = BTreeMap::new();
            blocks.insert(b.clone(), e as u32);
            parts.push(qfactor::xi_factorize(
                &qfactor::RootMultiset::new(),
                &blocks,
                &field,
                1,
            ));
        }
        let mut all = true;
        for x in 0..parts.len() {
            for y in x + 1..parts.len() {
                if !qfactor::general_position(&parts[x], &parts[y]).expect("same field") {
                    all = false;
                }
            }
        }
        Some(all)
    } else {
        None
    };
    Ok(FrobFactorization { prime, second, phi_second, sl2_general_position })
}

/// The ℓ-weight-level Frobenius pullback of a one-layer-down q-character.
pub fn frobenius_pullback_qchar(chi: &QCharacter, ambient: GroundField) -> QCharacter {
    let mut out = QCharacter::new();
    for (lam, m) in chi.terms() {
        out.add(lam.phi_l(ambient), m);
    }
    out
}

/// Configuration for the braid-invariance frontier.
#[derive(Debug, Clone, Copy)]
pub struct BgInvConfig {
    /// Maximum number of multiplicity updates before giving up.
    pub max_steps: usize,
}

impl Default for BgInvConfig {
    fn default() -> Self {
        BgInvConfig { max_steps: 100_000 }
    }
}

/// A certified lower bound for the q-character of the fundamental module
/// `V(ω_{i,a})` in classical type, with a saturation flag.
///
/// Frontier rules, iterated to a fixed point:
/// 1. a member with dominant weight propagates with equal multiplicity
///    over the braid images along the minimal coset representatives of
///    its weight;
/// 2. a member with polynomial node-`j` content descends, per quantum
///    string `ω_{j,b,m}` of its ξ_j-factorization, to the member times
///    `α_{j, b ξ_j^{m-1}}^{-1}`, with multiplicity bound the number of
///    strings sharing the base `b`.
///
/// Bounds merge by maximum.
pub fn bginv_lower_bound(
    cartan: &CartanData,
    field: GroundField,
    node: usize,
    a: &SpectralParam,
    config: BgInvConfig,
) -> Result<(QCharacter, bool), QCharError> {
    if !matches!(
        cartan.letter(),
        TypeLetter::A | TypeLetter::B | TypeLetter::C | TypeLetter::D
    ) {
        return Err(QCharError::NotClassical);
    }
    let mut chi = QCharacter::single(LWeight::omega(field, node, a.clone()));
    let mut steps = 0usize;
    let mut saturated = false;
    'outer: loop {
        let snapshot: Vec<(LWeight, u64)> = chi.terms().map(|(l, m)| (l.clone(), m)).collect();
        let mut changed = false;
        for (lam, mult) in &snapshot {
            let wt = lam.wt(cartan.rank());
            if wt.is_dominant() {
                for w in cartan.min_coset_reps(&wt).expect("dominant") {
                    let img = braid::braid_tw(cartan, &w, lam);
                    if chi.raise(img, *mult) {
                        changed = true;
                        steps += 1;
                        if steps > config.max_steps {
                            break 'outer;
                        }
                    }
                }
            }
            for j in 0..cartan.rank() {
                let Some(fact) = lam.node_factorization(cartan, j) else { continue };
                if fact.quantum().is_empty() {
                    continue;
                }
                let d = cartan.d(j);
                for (b, len) in fact.quantum() {
                    let same_base =
                        fact.quantum().iter().filter(|(b2, _)| b2 == b).count() as u64;
                    let top = param_shift(&field, b, d * (*len as i64 - 1));
                    let target = lam.mul(&simple_lroot(cartan, field, j, &top).inv());
                    if chi.raise(target, same_base) {
                        changed = true;
                        steps += 1;
                        if steps > config.max_steps {
                            break 'outer;
                        }
                    }
                }
            }
        }
        if !changed {
            saturated = true;
            break;
        }
    }
    Ok((chi, saturated))
}

/// The μ-terms of the node-2 fundamental q-character in type `D_n`
/// (1-based index `j = 1, …, n`), over the generic field.
fn dn_mu_term(
    field: GroundField,
    n: usize,
    a: &SpectralParam,
    j: usize,
) -> LWeight {
    let sh = |e: i64| param_shift(&field, a, e);
    let mut w = LWeight::identity(field);
    let n_i = n as i64;
    if (1..=n - 2).contains(&j) {
        let j_i = j as i64;
        if j >= 2 {
            w.mul_omega(j - 2, sh(j_i + 1), -1);
            w.mul_omega(j - 2, sh(2 * n_i - j_i - 3), 1);
        }
        w.mul_omega(j - 1, sh(j_i), 1);
        w.mul_omega(j - 1, sh(2 * n_i - j_i - 2), -1);
    } else {
        w.mul_omega(j - 1, sh(n_i - 3), 1);
        w.mul_omega(j - 1, sh(n_i + 1), -1);
    }
    w
}

/// The q-character of the node-2 fundamental module in type `D_n`:
/// generically the orbit sum plus the μ-terms with the `j = n-2` term
/// doubled; at a root of unity the specialization of that closed form,
/// with the `j = 1` term dropped when `l` divides `n-2`.
pub fn dn_node2_qchar(
    cartan: &CartanData,
    field: GroundField,
    a: &SpectralParam,
) -> Result<QCharacter, QCharError> {
    let n = cartan.rank();
    if cartan.letter() != TypeLetter::D || n < 4 {
        return Err(QCharError::NotDn);
    }
    let generic = GroundField::generic(cartan.lacing());
    let a_generic = generic.param(a.base().clone(), a.xi_exp());
    let top = LWeight::omega(generic, 1, a_generic.clone());
    let mut chi = QCharacter::new();
    for w in cartan.min_coset_reps(&Weight::fundamental(n, 1)).expect("dominant") {
        chi.add(braid::braid_tw(cartan, &w, &top), 1);
    }
    let mu = |j: usize| dn_mu_term(generic, n, &a_generic, j);
    match field.finite_order() {
        None => {
            for j in 1..=n {
                chi.add(mu(j), if j == n - 2 { 2 } else { 1 });
            }
            Ok(chi)
        }
        Some(l) => {
            if field.is_one() {
                return Err(QCharError::LWeight(LWeightError::WrongFieldMode));
            }
            let drop_mu1 = (n as i64 - 2).rem_euclid(l as i64) == 0;
            let mut bar = specialize_qchar(&chi, field)?;
            for j in 1..=n {
                if drop_mu1 && j == 1 {
                    continue;
                }
                bar.add(mu(j).specialize(field)?, if j == n - 2 { 2 } else { 1 });
            }
            Ok(bar)
        }
    }
}

/// Certify that the specialized support of a generic q-character contains
/// no dominant ℓ-weight other than the given one (hence the specialized
/// module stays simple).
pub fn no_dominant_other(
    lam_bar: &LWeight,
    chi: &QCharacter,
    target: GroundField,
) -> Result<bool, QCharError> {
    for (term, _) in chi.terms() {
        let bar = term.specialize(target)?;
        if bar.is_dominant() && bar != *lam_bar {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A classical (weight-graded) character.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClassicalChar {
    terms: BTreeMap<Weight, u64>,
}

impl ClassicalChar {
    pub fn trivial(rank: usize) -> Self {
        let mut c = ClassicalChar::default();
        c.add(Weight::zero(rank), 1);
        c
    }

    pub fn add(&mut self, w: Weight, m: u64) {
        if m > 0 {
            *self.terms.entry(w).or_insert(0) += m;
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Weight, u64)> {
        self.terms.iter().map(|(w, &m)| (w, m))
    }

    pub fn dimension(&self) -> u64 {
        self.terms.values().sum()
    }

    pub fn mul(&self, other: &ClassicalChar) -> ClassicalChar {
        let mut out = ClassicalChar::default();
        for (wa, ma) in self.terms() {
            for (wb, mb) in other.terms() {
                out.add(wa.add(wb), ma * mb);
            }
        }
        out
    }
}

/// Classical characters of the generic fundamental modules, per node.
#[derive(Debug, Clone, Default)]
pub struct FundCharTable {
    entries: BTreeMap<usize, ClassicalChar>,
}

impl FundCharTable {
    pub fn insert(&mut self, node: usize, ch: ClassicalChar) {
        self.entries.insert(node, ch);
    }

    pub fn get(&self, node: usize) -> Option<&ClassicalChar> {
        self.entries.get(&node)
    }

    /// Built-in entries: the pure Weyl-orbit characters of the minuscule
    /// nodes (every node in type A; the vector and the two spin nodes in
    /// type D).  Everything else must be supplied externally.
    pub fn builtin(cartan: &CartanData) -> FundCharTable {
        let mut table = FundCharTable::default();
        let minuscule: Vec<usize> = match cartan.letter() {
            TypeLetter::A => (0..cartan.rank()).collect(),
            TypeLetter::D => vec![0, cartan.rank() - 2, cartan.rank() - 1],
            _ => vec![],
        };
        for i in minuscule {
            let lam = Weight::fundamental(cartan.rank(), i);
            let mut ch = ClassicalChar::default();
            for w in cartan.min_coset_reps(&lam).expect("dominant") {
                ch.add(cartan.weyl_act(&w, &lam).expect("valid"), 1);
            }
            table.insert(i, ch);
        }
        table
    }

    /// Parse lines of the form `c1 c2 ... cn : mult` into one character.
    pub fn parse_char(rank: usize, text: &str) -> Result<ClassicalChar, String> {
        let mut ch = ClassicalChar::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (coords, mult) = line
                .split_once(':')
                .ok_or_else(|| format!("line {}: expected `coords : mult`", lineno + 1))?;
            let coords: Result<Vec<i64>, _> =
                coords.split_whitespace().map(|t| t.parse::<i64>()).collect();
            let coords = coords.map_err(|e| format!("line {}: {e}", lineno + 1))?;
            if coords.len() != rank {
                return Err(format!("line {}: expected {rank} coordinates", lineno + 1));
            }
            let mult: u64 =
                mult.trim().parse().map_err(|e| format!("line {}: {e}", lineno + 1))?;
            ch.add(Weight::from_coords(coords), mult);
        }
        Ok(ch)
    }
}

/// The classical character of the Weyl module with highest ℓ-weight `λ`:
/// the product over nodes of the generic fundamental characters, with
/// node multiplicities `wt(λ)(h_i)`.
pub fn weyl_top_character(
    cartan: &CartanData,
    lam: &LWeight,
    table: &FundCharTable,
) -> Result<ClassicalChar, QCharError> {
    let wt = lam.wt(cartan.rank());
    let mut out = ClassicalChar::trivial(cartan.rank());
    for (i, &s) in wt.coords().iter().enumerate() {
        if s <= 0 {
            continue;
        }
        let ch = table.get(i).ok_or(QCharError::MissingTableEntry(i))?;
        for _ in 0..s {
            out = out.mul(ch);
        }
    }
    Ok(out)
}
