//! A desk-scale exact oracle for sl₂ at a root of unity: cyclotomic
//! arithmetic, evaluation-module matrix coefficients, and the first-level
//! generation rank test for tensor products of highest-weight vectors.
//!
//! All arithmetic happens in `Q(ζ_l) = Q[q]/(Φ_l(q))` with exact rational
//! coefficients.  The rank test builds the `m × m` matrix expressing the
//! vectors `x^-_r (v_1 ⊗ ⋯ ⊗ v_m)`, `r = 0..m-1`, over the basis of the
//! first weight-drop level, using the triangular part of the coproduct:
//! on a tensor of highest-weight vectors only the terms
//! `1 ⊗ ⋯ ⊗ x^-_{r-J} ⊗ ψ^+-chain` survive, and the ψ-eigenvalues are
//! closed-form geometric data of the Drinfeld polynomials.  Full rank is
//! exactly first-level generation, which is the failure direction
//! that decides the highest-ℓ-weight property for fundamental factors.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use thiserror::Error;

use crate::cartan::{CartanData, TypeLetter, Weight};
use crate::ground::{param_shift, GroundField, SpectralParam};
use crate::lweight::LWeight;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum OracleError {
    #[error("order of the root of unity must be an odd integer >= 3, got {0}")]
    BadOrder(u32),
    #[error("basis index out of range")]
    IndexOutOfRange,
    #[error("psi acts diagonally on the highest-weight vector only")]
    NotHighestVector,
    #[error("element is not invertible")]
    NotInvertible,
    #[error("evaluation Drinfeld polynomials require type A")]
    NotTypeA,
}

/// An element of `Q(ζ_l)`, stored as a rational coefficient vector of
/// length `deg Φ_l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycElt(Vec<BigRational>);

impl CycElt {
    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    /// True when every coefficient is an integer (the element lies in the
    /// ring of cyclotomic integers in this basis).
    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.is_integer())
    }
}

/// The cyclotomic polynomial `Φ_n` with integer coefficients.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
        let mut rem = num.to_vec();
        let dd = den.len() - 1;
        let lead = den[dd];
        let mut quot = vec![0i64; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd] / lead;
            quot[k] = c;
            for (j, &dj) in den.iter().enumerate() {
                rem[k + j] -= c * dj;
            }
        }
        assert!(rem.iter().all(|&x| x == 0), "exact division");
        quot
    }
    fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    let mut den = vec![1i64];
    for d in 1..n {
        if n % d == 0 {
            den = poly_mul(&den, &cyclotomic_polynomial(d));
        }
    }
    poly_div_exact(&num, &den)
}

/// The field `Q(ζ_l)` for odd `l >= 3`.
#[derive(Debug, Clone)]
pub struct CycRing {
    l: u32,
    phi: Vec<BigRational>,
}

impl CycRing {
    pub fn new(l: u32) -> Result<Self, OracleError> {
        if l < 3 || l % 2 == 0 {
            return Err(OracleError::BadOrder(l));
        }
        let phi = cyclotomic_polynomial(l)
            .into_iter()
            .map(|c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        Ok(CycRing { l, phi })
    }

    pub fn order(&self) -> u32 {
        self.l
    }

    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn zero(&self) -> CycElt {
        CycElt(vec![BigRational::zero(); self.degree()])
    }

    pub fn one(&self) -> CycElt {
        self.zeta_pow(0)
    }

    /// `ζ^k` for any integer `k`.
    pub fn zeta_pow(&self, k: i64) -> CycElt {
        let k = k.rem_euclid(self.l as i64) as usize;
        // reduce q^k modulo Φ_l
        let mut c = vec![BigRational::zero(); k + 1];
        c[k] = BigRational::one();
        self.reduce(c)
    }

    fn reduce(&self, mut c: Vec<BigRational>) -> CycElt {
        let d = self.degree();
        while c.len() > d {
            let top = c.pop().unwrap();
            if !top.is_zero() {
                let e = c.len() - d;
                for j in 0..d {
                    let delta = &top * &self.phi[j];
                    c[e + j] -= delta;
                }
            }
        }
        c.resize(d, BigRational::zero());
        CycElt(c)
    }

    pub fn add(&self, a: &CycElt, b: &CycElt) -> CycElt {
        CycElt(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &CycElt, b: &CycElt) -> CycElt {
        CycElt(a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self, a: &CycElt) -> CycElt {
        CycElt(a.0.iter().map(|x| -x).collect())
    }

    pub fn mul(&self, a: &CycElt, b: &CycElt) -> CycElt {
        let mut c = vec![BigRational::zero(); a.0.len() + b.0.len() - 1];
        for (i, x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                let delta = x * y;
                c[i + j] += delta;
            }
        }
        self.reduce(c)
    }

    pub fn from_int(&self, n: i64) -> CycElt {
        let mut z = self.zero();
        z.0[0] = BigRational::from_integer(BigInt::from(n));
        z
    }

    pub fn pow(&self, a: &CycElt, k: i64) -> Result<CycElt, OracleError> {
        if k < 0 {
            let inv = self.inv(a)?;
            return self.pow(&inv, -k);
        }
        let mut out = self.one();
        for _ in 0..k {
            out = self.mul(&out, a);
        }
        Ok(out)
    }

    /// Inverse via the extended Euclidean algorithm in `Q[q]` modulo the
    /// irreducible `Φ_l`.
    pub fn inv(&self, a: &CycElt) -> Result<CycElt, OracleError> {
        if a.is_zero() {
            return Err(OracleError::NotInvertible);
        }
        type Poly = Vec<BigRational>;
        fn deg(p: &Poly) -> Option<usize> {
            p.iter().rposition(|c| !c.is_zero())
        }
        fn divmod(num: &Poly, den: &Poly) -> (Poly, Poly) {
            let dd = deg(den).expect("nonzero divisor");
            let lead = den[dd].clone();
            let mut rem = num.clone();
            let nd = match deg(&rem) {
                Some(n) if n >= dd => n,
                _ => return (vec![BigRational::zero()], rem),
            };
            let mut quot = vec![BigRational::zero(); nd - dd + 1];
            for k in (0..quot.len()).rev() {
                let c = &rem[k + dd] / &lead;
                quot[k] = c.clone();
                for (j, dj) in den.iter().enumerate().take(dd + 1) {
                    let delta = &c * dj;
                    rem[k + j] -= delta;
                }
            }
            (quot, rem)
        }
        fn poly_mul(a: &Poly, b: &Poly) -> Poly {
            let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    let delta = x * y;
                    out[i + j] += delta;
                }
            }
            out
        }
        fn poly_sub(a: &Poly, b: &Poly) -> Poly {
            let n = a.len().max(b.len());
            (0..n)
                .map(|i| {
                    let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
                    let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
                    x - y
                })
                .collect()
        }
        // r0 = Φ, r1 = a; maintain r = s·Φ + t·a
        let mut r0: Poly = self.phi.clone();
        let mut r1: Poly = a.0.clone();
        let mut t0: Poly = vec![BigRational::zero()];
        let mut t1: Poly = vec![BigRational::one()];
        while deg(&r1).is_some() {
            let (q, r) = divmod(&r0, &r1);
            let t = poly_sub(&t0, &poly_mul(&q, &t1));
            r0 = r1;
            r1 = r;
            t0 = t1;
            t1 = t;
        }
        let d = deg(&r0).ok_or(OracleError::NotInvertible)?;
        if d != 0 {
            return Err(OracleError::NotInvertible);
        }
        let scale = r0[0].clone();
        let normalized: Poly = t0.iter().map(|c| c / &scale).collect();
        Ok(self.reduce(normalized))
    }

    /// The quantum integer `[m] = (ζ^m - ζ^{-m}) / (ζ - ζ^{-1})`, written
    /// as the geometric sum `Σ_j ζ^{m-1-2j}` (and `[-m] = -[m]`).
    pub fn quantum_int(&self, m: i64) -> CycElt {
        if m == 0 {
            return self.zero();
        }
        if m < 0 {
            return self.neg(&self.quantum_int(-m));
        }
        let mut out = self.zero();
        for j in 0..m {
            out = self.add(&out, &self.zeta_pow(m - 1 - 2 * j));
        }
        out
    }
}

/// A Laurent polynomial over `Z`, the generic-mode value domain of the
/// same quantities.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentInt(BTreeMap<i64, i64>);

impl LaurentInt {
    pub fn zero() -> Self {
        LaurentInt(BTreeMap::new())
    }

    pub fn q_pow(k: i64) -> Self {
        let mut m = BTreeMap::new();
        m.insert(k, 1);
        LaurentInt(m)
    }

    pub fn add(&self, other: &LaurentInt) -> LaurentInt {
        let mut out = self.0.clone();
        for (&e, &c) in &other.0 {
            let slot = out.entry(e).or_insert(0);
            *slot += c;
            if *slot == 0 {
                out.remove(&e);
            }
        }
        LaurentInt(out)
    }

    pub fn mul(&self, other: &LaurentInt) -> LaurentInt {
        let mut out = LaurentInt::zero();
        for (&e1, &c1) in &self.0 {
            for (&e2, &c2) in &other.0 {
                let mut t = BTreeMap::new();
                t.insert(e1 + e2, c1 * c2);
                out = out.add(&LaurentInt(t));
            }
        }
        out
    }

    /// `[m]_q` as a Laurent polynomial.
    pub fn quantum_int(m: i64) -> LaurentInt {
        let mut out = LaurentInt::zero();
        let (sign, m) = if m < 0 { (-1, -m) } else { (1, m) };
        for j in 0..m {
            let mut t = BTreeMap::new();
            t.insert(m - 1 - 2 * j, sign);
            out = out.add(&LaurentInt(t));
        }
        out
    }
}

/// An evaluation module datum: the string length `λ(h)` and the concrete
/// spectral parameter (a unit of the cyclotomic field).
#[derive(Debug, Clone)]
pub struct EvalModule {
    pub lambda_h: u32,
    pub a: CycElt,
}

/// Loop generators whose matrix coefficients the oracle exposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalGen {
    XPlus(i64),
    XMinus(i64),
    PsiPlus(i64),
}

/// The matrix coefficient of a generator on the basis vector `v_k`,
/// together with the index of the target vector (`None` when the image
/// vanishes or stays on `v_k`).
pub fn eval_action(
    ring: &CycRing,
    module: &EvalModule,
    gen: EvalGen,
    k: usize,
) -> Result<(CycElt, Option<usize>), OracleError> {
    let n = module.lambda_h as i64;
    if k as i64 > n {
        return Err(OracleError::IndexOutOfRange);
    }
    let k_i = k as i64;
    match gen {
        EvalGen::XPlus(r) => {
            if k == 0 {
                return Ok((ring.zero(), None));
            }
            let base = ring.mul(&module.a, &ring.zeta_pow(n - 2 * k_i + 2));
            let coeff = ring.mul(&ring.pow(&base, r)?, &ring.quantum_int(n - k_i + 1));
            Ok((coeff, Some(k - 1)))
        }
        EvalGen::XMinus(r) => {
            if k_i == n {
                return Ok((ring.zero(), None));
            }
            let base = ring.mul(&module.a, &ring.zeta_pow(n - 2 * k_i));
            let coeff = ring.mul(&ring.pow(&base, r)?, &ring.quantum_int(k_i + 1));
            Ok((coeff, Some(k + 1)))
        }
        EvalGen::PsiPlus(s) => {
            if s <= 0 {
                return Err(OracleError::IndexOutOfRange);
            }
            if k != 0 {
                return Err(OracleError::NotHighestVector);
            }
            let unit = ring.sub(&ring.zeta_pow(1), &ring.zeta_pow(-1));
            let base = ring.mul(&module.a, &ring.zeta_pow(n));
            let coeff =
                ring.mul(&ring.mul(&unit, &ring.pow(&base, s)?), &ring.quantum_int(n));
            Ok((coeff, Some(0)))
        }
    }
}

/// The ψ⁺-eigenvalue series of a highest-weight vector with Drinfeld
/// polynomial `ω_{a, n}`, truncated to `len` coefficients:
/// `ζ^n, (aζ^n)^s (ζ - ζ^{-1}) [n]` for `s ≥ 1`.
fn psi_series(ring: &CycRing, n: i64, a: &CycElt, len: usize) -> Vec<CycElt> {
    let mut out = Vec::with_capacity(len);
    out.push(ring.zeta_pow(n));
    let unit = ring.sub(&ring.zeta_pow(1), &ring.zeta_pow(-1));
    let qn = ring.quantum_int(n);
    let base = ring.mul(a, &ring.zeta_pow(n));
    let mut pow = ring.one();
    for _ in 1..len {
        pow = ring.mul(&pow, &base);
        out.push(ring.mul(&ring.mul(&pow, &unit), &qn));
    }
    out
}

fn series_mul(ring: &CycRing, a: &[CycElt], b: &[CycElt], len: usize) -> Vec<CycElt> {
    let mut out = vec![ring.zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        for (j, y) in b.iter().enumerate().take(len - i) {
            let t = ring.mul(x, y);
            out[i + j] = ring.add(&out[i + j], &t);
        }
    }
    out
}

/// The rank of the `m × m` matrix expressing `x^-_r (v_1 ⊗ ⋯ ⊗ v_m)`,
/// `r = 0..m-1`, over the first weight-drop level.
pub fn tensor_first_level_rank(ring: &CycRing, factors: &[(u32, CycElt)]) -> usize {
    let m = factors.len();
    if m == 0 {
        return 0;
    }
    // ψ-series and k^{-1}-eigenvalue products of the tail after each slot
    let mut tails: Vec<Vec<CycElt>> = vec![Vec::new(); m];
    let mut kinv: Vec<CycElt> = vec![ring.one(); m];
    for s in (0..m).rev() {
        if s == m - 1 {
            tails[s] = {
                let mut v = vec![ring.zero(); m];
                v[0] = ring.one();
                v
            };
            kinv[s] = ring.one();
        } else {
            let (n, a) = &factors[s + 1];
            let psi = psi_series(ring, *n as i64, a, m);
            tails[s] = series_mul(ring, &tails[s + 1], &psi, m);
            kinv[s] = ring.mul(&kinv[s + 1], &ring.zeta_pow(-(*n as i64)));
        }
    }
    let mut matrix: Vec<Vec<CycElt>> = Vec::with_capacity(m);
    for r in 0..m as i64 {
        let mut row = Vec::with_capacity(m);
        for s in 0..m {
            let (n, a) = &factors[s];
            let base = ring.mul(a, &ring.zeta_pow(*n as i64));
            let entry = if r == 0 {
                kinv[s].clone()
            } else {
                let mut acc = ring.zero();
                for j in 0..r {
                    let t = ring.mul(
                        &ring.pow(&base, r - j).expect("unit base"),
                        &tails[s][j as usize],
                    );
                    acc = ring.add(&acc, &t);
                }
                acc
            };
            row.push(entry);
        }
        matrix.push(row);
    }
    // Gaussian elimination over the field
    let mut rank = 0usize;
    let mut col = 0usize;
    let mut mat = matrix;
    while rank < m && col < m {
        let piv = (rank..m).find(|&r| !mat[r][col].is_zero());
        let Some(piv) = piv else {
            col += 1;
            continue;
        };
        mat.swap(rank, piv);
        let inv = ring.inv(&mat[rank][col].clone()).expect("nonzero pivot");
        for c in 0..m {
            mat[rank][c] = ring.mul(&mat[rank][c], &inv);
        }
        for r in 0..m {
            if r != rank && !mat[r][col].is_zero() {
                let f = mat[r][col].clone();
                for c in 0..m {
                    let t = ring.mul(&f, &mat[rank][c]);
                    mat[r][c] = ring.sub(&mat[r][c], &t);
                }
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

/// The Drinfeld polynomial of a type-A evaluation module (`m(λ)`
/// normalized to 0): the product of node strings `ω_{i, a_i, λ(h_i)}`
/// with `a_{i+1}/a_i = ξ^{±(λ(h_i)+λ(h_{i+1})+1)}`, anchored at the first
/// node (or at the last node for the dual version).
pub fn ev_drinfeld(
    cartan: &CartanData,
    field: GroundField,
    lambda: &Weight,
    a: &SpectralParam,
    dual: bool,
) -> Result<LWeight, OracleError> {
    if cartan.letter() != TypeLetter::A {
        return Err(OracleError::NotTypeA);
    }
    let n = cartan.rank();
    let mut params = vec![a.clone(); n];
    if !dual {
        for i in 0..n - 1 {
            let step = lambda.eval(i) + lambda.eval(i + 1) + 1;
            params[i + 1] = param_shift(&field, &params[i], step);
        }
    } else {
        for i in (0..n - 1).rev() {
            let step = lambda.eval(i) + lambda.eval(i + 1) + 1;
            params[i] = param_shift(&field, &params[i + 1], step);
        }
    }
    let mut out = LWeight::identity(field);
    for i in 0..n {
        let r = lambda.eval(i);
        if r > 0 {
            out = out.mul(
                &LWeight::omega_string(cartan, field, i, &params[i], r as u32)
                    .expect("valid node"),
            );
        }
    }
    Ok(out)
}
