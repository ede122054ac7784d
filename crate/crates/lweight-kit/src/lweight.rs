//! The ℓ-weight lattice: Laurent monomials in fundamental ℓ-weights
//! `ω_{i,a}`, together with Frobenius blocks at finite order.
//!
//! An [`LWeight`] is stored as two exponent maps.  The `omega` map sends
//! `(node, parameter)` to the exponent of `ω_{i,a}`.  The `frob` map holds
//! Frobenius blocks `(1 - b u^l)` in the node-`i` component; a block whose
//! base is an exact `l`-th power in the symbol group is expanded eagerly
//! into the full ω-orbit it equals, so that group equality stays
//! structural.  Blocks with formally irreducible bases remain independent
//! generators.
//!
//! The simple ℓ-roots are computed from their defining equation
//! `α_{i,a} = ω_{i,a} (T_i ω_{i,a})^{-1}` through the braid action; see
//! the guide, chapter 5, for why the defining equation rather than any
//! expanded display is the safe normal form.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::braid;
use crate::cartan::{CartanData, Weight};
use crate::ground::{param_shift, specialize_param, GroundField, SpectralParam};
use crate::intlin;
use crate::qfactor::{self, QFactorization, RootMultiset};

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum LWeightError {
    #[error("operation requires a dominant l-weight")]
    NotDominant,
    #[error("operation requires the root-of-unity ground field")]
    WrongFieldMode,
    #[error("operation requires the generic formal ground field")]
    NotGeneric,
    #[error("node {0} out of range")]
    NodeOutOfRange(usize),
}

/// A Laurent monomial in fundamental ℓ-weights and Frobenius blocks.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LWeight {
    field: GroundField,
    omega: BTreeMap<(usize, SpectralParam), i64>,
    frob: BTreeMap<(usize, SpectralParam), i64>,
}

impl LWeight {
    pub fn identity(field: GroundField) -> Self {
        LWeight { field, omega: BTreeMap::new(), frob: BTreeMap::new() }
    }

    /// The fundamental ℓ-weight `ω_{i,a}`.
    pub fn omega(field: GroundField, node: usize, a: SpectralParam) -> Self {
        let mut w = LWeight::identity(field);
        w.mul_omega(node, a, 1);
        w
    }

    /// The string `ω_{i,a,r} = ∏_j ω_{i, a ξ_i^{r-1-2j}}` (shifts use
    /// `ξ_i = ξ^{d_i}`).
    pub fn omega_string(
        cartan: &CartanData,
        field: GroundField,
        node: usize,
        a: &SpectralParam,
        r: u32,
    ) -> Result<Self, LWeightError> {
        if node >= cartan.rank() {
            return Err(LWeightError::NodeOutOfRange(node));
        }
        let d = cartan.d(node);
        let mut w = LWeight::identity(field);
        for j in 0..r as i64 {
            w.mul_omega(node, param_shift(&field, a, d * (r as i64 - 1 - 2 * j)), 1);
        }
        Ok(w)
    }

    /// `ω_{λ,a} = ∏_i ω_{i,a}^{λ(h_i)}`.
    pub fn omega_lambda(field: GroundField, lambda: &Weight, a: &SpectralParam) -> Self {
        let mut w = LWeight::identity(field);
        for (i, &e) in lambda.coords().iter().enumerate() {
            w.mul_omega(i, a.clone(), e);
        }
        w
    }

    /// A Frobenius block `(1 - b u^l)` in the node-`i` component.
    pub fn frob_block(field: GroundField, node: usize, base: SpectralParam) -> Self {
        let mut w = LWeight::identity(field);
        w.mul_frob(node, base, 1);
        w
    }

    pub fn field(&self) -> &GroundField {
        &self.field
    }

    pub fn is_identity(&self) -> bool {
        self.omega.is_empty() && self.frob.is_empty()
    }

    pub fn omega_entries(&self) -> impl Iterator<Item = (usize, &SpectralParam, i64)> {
        self.omega.iter().map(|((n, p), &e)| (*n, p, e))
    }

    pub fn frob_entries(&self) -> impl Iterator<Item = (usize, &SpectralParam, i64)> {
        self.frob.iter().map(|((n, p), &e)| (*n, p, e))
    }

    pub fn has_frob(&self) -> bool {
        !self.frob.is_empty()
    }

    /// Multiply in `ω_{node,a}^e`, keeping the map canonical.
    pub fn mul_omega(&mut self, node: usize, a: SpectralParam, e: i64) {
        if e == 0 {
            return;
        }
        let key = (node, a);
        let slot = self.omega.entry(key).or_insert(0);
        *slot += e;
        if *slot == 0 {
            let key = self
                .omega
                .iter()
                .find(|(_, &v)| v == 0)
                .map(|(k, _)| k.clone())
                .unwrap();
            self.omega.remove(&key);
        }
    }

    /// Multiply in a Frobenius block; blocks with an `l`-th-power base are
    /// expanded into the ω-orbit they equal.
    pub fn mul_frob(&mut self, node: usize, base: SpectralParam, e: i64) {
        if e == 0 {
            return;
        }
        if self.field.is_root_of_unity() {
            let l = self.field.l() as i64;
            if base.xi_exp() == 0 {
                if let Some(root) = base.base().nth_root(l) {
                    for m in 0..l {
                        self.mul_omega(node, self.field.param(root.clone(), m), e);
                    }
                    return;
                }
            }
        }
        let key = (node, base);
        let slot = self.frob.entry(key).or_insert(0);
        *slot += e;
        if *slot == 0 {
            let key = self
                .frob
                .iter()
                .find(|(_, &v)| v == 0)
                .map(|(k, _)| k.clone())
                .unwrap();
            self.frob.remove(&key);
        }
    }

    pub fn mul(&self, other: &LWeight) -> LWeight {
        debug_assert_eq!(self.field, other.field);
        let mut out = self.clone();
        for (n, p, e) in other.omega_entries() {
            out.mul_omega(n, p.clone(), e);
        }
        for (n, p, e) in other.frob_entries() {
            out.mul_frob(n, p.clone(), e);
        }
        out
    }

    pub fn inv(&self) -> LWeight {
        LWeight {
            field: self.field,
            omega: self.omega.iter().map(|(k, &e)| (k.clone(), -e)).collect(),
            frob: self.frob.iter().map(|(k, &e)| (k.clone(), -e)).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> LWeight {
        if k == 0 {
            return LWeight::identity(self.field);
        }
        LWeight {
            field: self.field,
            omega: self.omega.iter().map(|(key, &e)| (key.clone(), e * k)).collect(),
            frob: self.frob.iter().map(|(key, &e)| (key.clone(), e * k)).collect(),
        }
    }

    /// Dominance: every exponent nonnegative (an `n`-tuple of polynomials).
    pub fn is_dominant(&self) -> bool {
        self.omega.values().all(|&e| e >= 0) && self.frob.values().all(|&e| e >= 0)
    }

    /// The weight map: `wt(ω_{i,a}) = ω_i`, with a Frobenius block at node
    /// `i` contributing `l·ω_i`.
    pub fn wt(&self, rank: usize) -> Weight {
        let mut v = vec![0i64; rank];
        for (n, _, e) in self.omega_entries() {
            v[n] += e;
        }
        let l = self.field.l() as i64;
        for (n, _, e) in self.frob_entries() {
            v[n] += l * e;
        }
        Weight::from_coords(v)
    }

    /// The node-`i` content as a root multiset plus Frobenius blocks, when
    /// polynomial (no negative exponents at node `i`).
    pub fn node_polynomial(
        &self,
        node: usize,
    ) -> Option<(RootMultiset, BTreeMap<SpectralParam, u32>)> {
        let mut roots = RootMultiset::new();
        let mut blocks = BTreeMap::new();
        for (n, p, e) in self.omega_entries() {
            if n == node {
                if e < 0 {
                    return None;
                }
                roots.add(p.clone(), e as u32);
            }
        }
        for (n, p, e) in self.frob_entries() {
            if n == node {
                if e < 0 {
                    return None;
                }
                blocks.insert(p.clone(), e as u32);
            }
        }
        Some((roots, blocks))
    }

    /// The ξ_i-factorization of the node-`i` content of a dominant
    /// ℓ-weight.
    pub fn node_factorization(
        &self,
        cartan: &CartanData,
        node: usize,
    ) -> Option<QFactorization> {
        let (roots, blocks) = self.node_polynomial(node)?;
        Some(qfactor::xi_factorize(&roots, &blocks, &self.field, cartan.d(node)))
    }

    /// The dual `λ*`: node `i` receives the node-`w_0·i` content with every
    /// parameter multiplied by `ξ^{r∨h∨}`.
    pub fn dual_star(&self, cartan: &CartanData) -> Result<LWeight, LWeightError> {
        if !self.is_dominant() {
            return Err(LWeightError::NotDominant);
        }
        let shift = cartan.rh();
        let mut out = LWeight::identity(self.field);
        for (n, p, e) in self.omega_entries() {
            out.mul_omega(cartan.w0_node(n), param_shift(&self.field, p, shift), e);
        }
        for (n, p, e) in self.frob_entries() {
            // a block base shifts by ξ^{l·r∨h∨} ≡ 1
            out.mul_frob(cartan.w0_node(n), p.clone(), e);
        }
        Ok(out)
    }

    /// The Frobenius decomposition `λ = λ' φ_l(λ'')` of a dominant
    /// ℓ-weight: `λ'` is ξ_i-regular at every node, `λ''` collects the
    /// Frobenius bases.
    pub fn frobenius_split(
        &self,
        cartan: &CartanData,
    ) -> Result<(LWeight, LWeight), LWeightError> {
        if !self.field.is_root_of_unity() {
            return Err(LWeightError::WrongFieldMode);
        }
        if !self.is_dominant() {
            return Err(LWeightError::NotDominant);
        }
        let mut prime = LWeight::identity(self.field);
        let mut second = LWeight::identity(self.field);
        for node in 0..cartan.rank() {
            let fact = self.node_factorization(cartan, node).expect("dominant");
            for (a, r) in fact.quantum() {
                for root in qfactor::string_roots(&self.field, a, *r, cartan.d(node)) {
                    prime.mul_omega(node, root, 1);
                }
            }
            for (b, m) in fact.frobenius() {
                // λ'' lives one Frobenius layer down: plain ω at the base
                second.omega_insert_raw(node, b.clone(), *m as i64);
            }
        }
        Ok((prime, second))
    }

    // Insert without Frobenius expansion (for λ''-layer weights whose keys
    // are block bases, not ambient parameters).
    fn omega_insert_raw(&mut self, node: usize, p: SpectralParam, e: i64) {
        self.mul_omega(node, p, e);
    }

    /// The `l`-th power substitution on ℓ-weights: every `ω_{i,b}` becomes
    /// the Frobenius block at `(i, b)`.  The input must be ω-supported.
    pub fn phi_l(&self, ambient: GroundField) -> LWeight {
        assert!(
            self.frob.is_empty(),
            "phi_l input must be a plain omega monomial"
        );
        assert!(ambient.is_root_of_unity());
        let mut out = LWeight::identity(ambient);
        for (n, p, e) in self.omega_entries() {
            out.mul_frob(n, ambient.param(p.base().clone(), p.xi_exp()), e);
        }
        out
    }

    /// Evaluate the formal parameter at the target field (the bar map on
    /// ℓ-weights); colliding keys merge by adding exponents.
    pub fn specialize(&self, target: GroundField) -> Result<LWeight, LWeightError> {
        if !self.field.is_generic() {
            return Err(LWeightError::NotGeneric);
        }
        debug_assert!(self.frob.is_empty(), "generic l-weights are omega-supported");
        let mut out = LWeight::identity(target);
        for (n, p, e) in self.omega_entries() {
            let q = specialize_param(&self.field, p, &target)
                .map_err(|_| LWeightError::NotGeneric)?;
            out.mul_omega(n, q, e);
        }
        Ok(out)
    }
}

impl fmt::Display for LWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (n, p, e) in self.omega_entries() {
            let head = format!("w[{}]({})", n + 1, p);
            parts.push(if e == 1 { head } else { format!("{head}^{e}") });
        }
        for (n, p, e) in self.frob_entries() {
            let head = format!("F[{}]({})", n + 1, p);
            parts.push(if e == 1 { head } else { format!("{head}^{e}") });
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// The simple ℓ-root `α_{i,a} = ω_{i,a} (T_i ω_{i,a})^{-1}`.
pub fn simple_lroot(
    cartan: &CartanData,
    field: GroundField,
    node: usize,
    a: &SpectralParam,
) -> LWeight {
    let om = LWeight::omega(field, node, a.clone());
    om.mul(&braid::braid_t(cartan, node, &om).inv())
}

/// A witnessed expression of a lattice element as a product of simple
/// ℓ-roots `∏ α_{i,c}^{e}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LRootCertificate(pub Vec<(usize, SpectralParam, i64)>);

impl LRootCertificate {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Re-expand the certificate to the lattice element it witnesses.
    pub fn expand(&self, cartan: &CartanData, field: GroundField) -> LWeight {
        let mut out = LWeight::identity(field);
        for (node, c, e) in &self.0 {
            out = out.mul(&simple_lroot(cartan, field, *node, c).pow(*e));
        }
        out
    }
}

/// Answer of the dominance-cone search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeAnswer {
    Member(LRootCertificate),
    NoWithinWindow,
}

/// Answer of the signed lattice-membership search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignedAnswer {
    Member(LRootCertificate),
    /// Certified impossible (weight or Frobenius obstruction).
    No,
    /// The bounded window was exhausted without a verdict.
    Unknown,
}

fn coset_split(nu: &LWeight) -> BTreeMap<crate::ground::BaseVec, BTreeMap<(usize, i64), i64>> {
    let mut out: BTreeMap<crate::ground::BaseVec, BTreeMap<(usize, i64), i64>> = BTreeMap::new();
    for (n, p, e) in nu.omega_entries() {
        *out.entry(p.base().clone()).or_default().entry((n, p.xi_exp())).or_insert(0) += e;
    }
    out
}

/// Per-node α-counts forced by the weight map, when they exist.
fn forced_counts(cartan: &CartanData, nu_wt: &Weight) -> Option<Vec<i64>> {
    let counts = cartan.to_root_coords(nu_wt)?;
    if counts.iter().all(|&c| c >= 0) {
        Some(counts)
    } else {
        None
    }
}

/// The exponent map of `α_{i, base·ξ^c}` restricted to one coset, as
/// `(node, exponent) -> coefficient` (exponents unreduced; callers reduce).
pub(crate) fn alpha_entries_shape(cartan: &CartanData, i: usize, c: i64) -> Vec<((usize, i64), i64)> {
    let d = cartan.d(i);
    let mut out = vec![((i, c), 1), ((i, c + 2 * d), 1)];
    for j in cartan.neighbors(i) {
        let m = cartan.c(j, i).abs();
        for k in 1..=m {
            out.push(((j, c + d + m + 1 - 2 * k), -1));
        }
    }
    out
}

/// Decide `μ ≤ λ` in the ℓ-dominance order, producing a certificate
/// `λ μ^{-1} = ∏ α_{i,c}^{n}` with all `n ≥ 0`.
///
/// In generic mode the search is exact (a forced top-down elimination); at
/// finite order it is a bounded exact-cover search over the `l` residues.
pub fn cone_member(
    cartan: &CartanData,
    field: &GroundField,
    lambda: &LWeight,
    mu: &LWeight,
) -> ConeAnswer {
    let nu = lambda.mul(&mu.inv());
    if nu.is_identity() {
        return ConeAnswer::Member(LRootCertificate::default());
    }
    if nu.has_frob() {
        return ConeAnswer::NoWithinWindow;
    }
    if forced_counts(cartan, &nu.wt(cartan.rank())).is_none() {
        return ConeAnswer::NoWithinWindow;
    }

    let mut cert = Vec::new();
    for (base, keys) in coset_split(&nu) {
        let coset_wt = {
            let mut v = vec![0i64; cartan.rank()];
            for (&(n, _), &e) in &keys {
                v[n] += e;
            }
            Weight::from_coords(v)
        };
        let Some(budgets) = forced_counts(cartan, &coset_wt) else {
            return ConeAnswer::NoWithinWindow;
        };
        match field.finite_order() {
            None => {
                let Some(part) = cone_solve_generic(cartan, keys, budgets) else {
                    return ConeAnswer::NoWithinWindow;
                };
                for (i, c, n) in part {
                    cert.push((i, field.param(base.clone(), c), n));
                }
            }
            Some(l) => {
                let Some(part) = cone_solve_finite(cartan, field, keys, budgets, l as i64)
                else {
                    return ConeAnswer::NoWithinWindow;
                };
                for (i, c, n) in part {
                    cert.push((i, field.param(base.clone(), c), n));
                }
            }
        }
    }
    let cert = LRootCertificate(cert);
    debug_assert_eq!(cert.expand(cartan, *field), nu);
    ConeAnswer::Member(cert)
}

/// Exact forced elimination in generic mode: the strictly largest key of
/// every candidate α is its node-`i` top `(i, c + 2 d_i)`, so processing
/// keys from the top down leaves no choices.
fn cone_solve_generic(
    cartan: &CartanData,
    mut keys: BTreeMap<(usize, i64), i64>,
    mut budgets: Vec<i64>,
) -> Option<Vec<(usize, i64, i64)>> {
    let mut used = Vec::new();
    loop {
        keys.retain(|_, e| *e != 0);
        let Some((&(node, exp), &coeff)) = keys
            .iter()
            .max_by_key(|(&(node, exp), _)| (exp, std::cmp::Reverse(node)))
        else {
            break;
        };
        if coeff < 0 {
            return None;
        }
        let c = exp - 2 * cartan.d(node);
        if budgets[node] < coeff {
            return None;
        }
        budgets[node] -= coeff;
        for ((n2, e2), v) in alpha_entries_shape(cartan, node, c) {
            *keys.entry((n2, e2)).or_insert(0) -= coeff * v;
        }
        used.push((node, c, coeff));
    }
    if budgets.iter().any(|&b| b != 0) {
        return None;
    }
    Some(used)
}

/// Bounded exact-cover search at finite order: candidates are the `l`
/// residues per node, with per-node totals forced by the weight map.
fn cone_solve_finite(
    cartan: &CartanData,
    field: &GroundField,
    keys: BTreeMap<(usize, i64), i64>,
    budgets: Vec<i64>,
    l: i64,
) -> Option<Vec<(usize, i64, i64)>> {
    // candidate vectors, reduced mod l
    let mut cands: Vec<(usize, i64, BTreeMap<(usize, i64), i64>)> = Vec::new();
    for i in 0..cartan.rank() {
        if budgets[i] == 0 {
            continue;
        }
        for c in 0..l {
            let mut map = BTreeMap::new();
            for ((n, e), v) in alpha_entries_shape(cartan, i, c) {
                *map.entry((n, field.reduce_exp(e))).or_insert(0) += v;
            }
            map.retain(|_, v| *v != 0);
            cands.push((i, c, map));
        }
    }
    let mut target = keys;
    target.retain(|_, e| *e != 0);

    fn dfs(
        cands: &[(usize, i64, BTreeMap<(usize, i64), i64>)],
        idx: usize,
        target: &mut BTreeMap<(usize, i64), i64>,
        budgets: &mut [i64],
        used: &mut Vec<(usize, i64, i64)>,
    ) -> bool {
        if idx == cands.len() {
            return target.values().all(|&e| e == 0) && budgets.iter().all(|&b| b == 0);
        }
        let (node, c, ref shape) = cands[idx];
        // last candidate for this node must consume the remaining budget
        let last_for_node = cands[idx + 1..].iter().all(|&(n2, _, _)| n2 != node);
        let max = budgets[node];
        let range: Vec<i64> = if last_for_node { vec![max] } else { (0..=max).collect() };
        for n in range {
            if n > 0 {
                budgets[node] -= n;
                for (k, v) in shape {
                    *target.entry(k.clone()).or_insert(0) -= n * v;
                }
                used.push((node, c, n));
            }
            if dfs(cands, idx + 1, target, budgets, used) {
                return true;
            }
            if n > 0 {
                used.pop();
                for (k, v) in shape {
                    *target.entry(k.clone()).or_insert(0) += n * v;
                }
                budgets[node] += n;
            }
        }
        false
    }

    let mut budgets = budgets;
    let mut used = Vec::new();
    if dfs(&cands, 0, &mut target, &mut budgets, &mut used) {
        Some(used)
    } else {
        None
    }
}

/// Decide `ν ∈ Q_ξ` with arbitrary-sign exponents, by integer linear
/// algebra over a growing exponent window.
///
/// `No` is returned only on certified obstructions (weight lattice or
/// Frobenius content); a definitive negative for pure lattice reasons
/// must come from the block-group normal form (see
/// [`crate::blocks::signed_member_certified`]).
pub fn signed_lattice_member(
    cartan: &CartanData,
    field: &GroundField,
    nu: &LWeight,
) -> SignedAnswer {
    if nu.is_identity() {
        return SignedAnswer::Member(LRootCertificate::default());
    }
    if nu.has_frob() {
        return SignedAnswer::No;
    }
    if cartan.to_root_coords(&nu.wt(cartan.rank())).is_none() {
        return SignedAnswer::No;
    }

    let mut cert = Vec::new();
    for (base, keys) in coset_split(nu) {
        let exps: Vec<i64> = keys.keys().map(|&(_, e)| e).collect();
        let (lo, hi) = (
            *exps.iter().min().unwrap(),
            *exps.iter().max().unwrap(),
        );
        let solved = match field.finite_order() {
            Some(l) => signed_solve_window(cartan, field, &keys, 0, l as i64 - 1),
            None => {
                let mut pad = cartan.rh().max(2);
                let mut found = None;
                for _ in 0..=4 {
                    if let Some(x) = signed_solve_window(cartan, field, &keys, lo - pad, hi + pad)
                    {
                        found = Some(x);
                        break;
                    }
                    pad *= 2;
                }
                found
            }
        };
        match solved {
            None => return SignedAnswer::Unknown,
            Some(part) => {
                for (i, c, n) in part {
                    cert.push((i, field.param(base.clone(), c), n));
                }
            }
        }
    }
    let cert = LRootCertificate(cert);
    debug_assert_eq!(cert.expand(cartan, *field), *nu);
    SignedAnswer::Member(cert)
}

fn signed_solve_window(
    cartan: &CartanData,
    field: &GroundField,
    keys: &BTreeMap<(usize, i64), i64>,
    lo: i64,
    hi: i64,
) -> Option<Vec<(usize, i64, i64)>> {
    // candidates: α_{i, ξ^c} for c in [lo, hi]
    let mut cands: Vec<(usize, i64, BTreeMap<(usize, i64), i64>)> = Vec::new();
    for i in 0..cartan.rank() {
        for c in lo..=hi {
            let mut map = BTreeMap::new();
            for ((n, e), v) in alpha_entries_shape(cartan, i, c) {
                *map.entry((n, field.reduce_exp(e))).or_insert(0) += v;
            }
            map.retain(|_, v| *v != 0);
            cands.push((i, c, map));
        }
    }
    // assemble the row index set
    let mut rows: std::collections::BTreeSet<(usize, i64)> = keys.keys().cloned().collect();
    for (_, _, map) in &cands {
        rows.extend(map.keys().cloned());
    }
    let rows: Vec<(usize, i64)> = rows.into_iter().collect();
    let a: Vec<Vec<i64>> = rows
        .iter()
        .map(|k| cands.iter().map(|(_, _, m)| *m.get(k).unwrap_or(&0)).collect())
        .collect();
    let b: Vec<i64> = rows.iter().map(|k| *keys.get(k).unwrap_or(&0)).collect();
    let x = intlin::solve_integer(&a, &b)?;
    Some(
        cands
            .iter()
            .zip(&x)
            .filter(|(_, &n)| n != 0)
            .map(|((i, c, _), &n)| (*i, *c, n))
            .collect(),
    )
}
