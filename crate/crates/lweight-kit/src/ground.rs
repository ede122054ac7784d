//! The ground parameter ξ and exact arithmetic on spectral parameters.
//!
//! Every spectral shift in this crate lives in the abelian group
//! `S × ξ^Z`, where `S` is a free abelian group on user-declared base
//! symbols and ξ is the ground parameter: the formal variable `q`, a
//! primitive root of unity ζ of odd order `l` coprime to the lacing
//! number, or `1`.  A [`SpectralParam`] is one element of that group,
//! stored exactly as a base exponent vector together with the ξ-exponent.
//!
//! In `RootOfUnity(l)` mode the ξ-exponent is kept reduced into `[0, l)`,
//! so equality and hashing are structural.  In `One` mode all ξ-shifts
//! collapse and the exponent is identically zero.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum GroundError {
    #[error("order of a root of unity must be an odd integer >= 3, got {0}")]
    BadOrder(u32),
    #[error("order {l} is not coprime to the lacing number {lacing}")]
    OrderNotCoprime { l: u32, lacing: u32 },
    #[error("spectral parameter is not reduced for this ground field")]
    FieldMismatch,
    #[error("specialization source must be the generic formal field")]
    NotGeneric,
    #[error("specialization target must be a root of unity or one")]
    BadTarget,
}

/// Which value the ground parameter ξ takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldMode {
    /// ξ = q, a formal variable (infinite order).
    GenericFormal,
    /// ξ = ζ, a primitive root of unity of the given odd order.
    RootOfUnity(u32),
    /// ξ = 1.
    One,
}

/// The ground field: a [`FieldMode`] validated against the lacing number
/// of the ambient algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundField {
    mode: FieldMode,
    lacing: u32,
}

impl GroundField {
    pub fn generic(lacing: u32) -> Self {
        GroundField { mode: FieldMode::GenericFormal, lacing }
    }

    pub fn one(lacing: u32) -> Self {
        GroundField { mode: FieldMode::One, lacing }
    }

    /// A root of unity of odd order `l >= 3` with `gcd(l, lacing) = 1`.
    pub fn root_of_unity(l: u32, lacing: u32) -> Result<Self, GroundError> {
        if l < 3 || l % 2 == 0 {
            return Err(GroundError::BadOrder(l));
        }
        if gcd(l, lacing) != 1 {
            return Err(GroundError::OrderNotCoprime { l, lacing });
        }
        Ok(GroundField { mode: FieldMode::RootOfUnity(l), lacing })
    }

    pub fn mode(&self) -> FieldMode {
        self.mode
    }

    pub fn lacing(&self) -> u32 {
        self.lacing
    }

    /// The notational constant `l`: the order in `RootOfUnity` mode and 1
    /// otherwise.
    pub fn l(&self) -> u32 {
        match self.mode {
            FieldMode::RootOfUnity(l) => l,
            _ => 1,
        }
    }

    /// The cycle length for ξ-exponents, when finite: `l` at a root of
    /// unity, 1 at ξ = 1, none in generic mode.
    pub fn finite_order(&self) -> Option<u32> {
        match self.mode {
            FieldMode::GenericFormal => None,
            FieldMode::RootOfUnity(l) => Some(l),
            FieldMode::One => Some(1),
        }
    }

    pub fn is_generic(&self) -> bool {
        self.mode == FieldMode::GenericFormal
    }

    pub fn is_root_of_unity(&self) -> bool {
        matches!(self.mode, FieldMode::RootOfUnity(_))
    }

    pub fn is_one(&self) -> bool {
        self.mode == FieldMode::One
    }

    /// Reduce a ξ-exponent into the canonical range for this field.
    pub fn reduce_exp(&self, e: i64) -> i64 {
        match self.mode {
            FieldMode::GenericFormal => e,
            FieldMode::RootOfUnity(l) => e.rem_euclid(l as i64),
            FieldMode::One => 0,
        }
    }

    /// Build a parameter from a base vector and a ξ-exponent, reducing the
    /// exponent per the field mode.
    pub fn param(&self, base: BaseVec, xi_exp: i64) -> SpectralParam {
        SpectralParam { base, xi_exp: self.reduce_exp(xi_exp) }
    }

    /// A pure power of ξ.
    pub fn xi_pow(&self, e: i64) -> SpectralParam {
        self.param(BaseVec::one(), e)
    }

    /// A declared symbol as a parameter.
    pub fn symbol(&self, name: &str) -> SpectralParam {
        self.param(BaseVec::symbol(name), 0)
    }
}

impl fmt::Display for GroundField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            FieldMode::GenericFormal => write!(f, "q"),
            FieldMode::RootOfUnity(l) => write!(f, "zeta:{l}"),
            FieldMode::One => write!(f, "one"),
        }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// An element of the free abelian group on base symbols, written as a
/// symbol-to-exponent map.  The empty map is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BaseVec(BTreeMap<String, i64>);

impl BaseVec {
    pub fn one() -> Self {
        BaseVec(BTreeMap::new())
    }

    pub fn symbol(name: &str) -> Self {
        let mut m = BTreeMap::new();
        m.insert(name.to_string(), 1);
        BaseVec(m)
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (String, i64)>) -> Self {
        let mut v = BaseVec::one();
        for (s, e) in entries {
            v.add(&s, e);
        }
        v
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, i64)> {
        self.0.iter().map(|(s, &e)| (s.as_str(), e))
    }

    fn add(&mut self, sym: &str, e: i64) {
        if e == 0 {
            return;
        }
        let slot = self.0.entry(sym.to_string()).or_insert(0);
        *slot += e;
        if *slot == 0 {
            self.0.remove(sym);
        }
    }

    pub fn mul(&self, other: &BaseVec) -> BaseVec {
        let mut out = self.clone();
        for (s, e) in other.entries() {
            out.add(s, e);
        }
        out
    }

    pub fn inv(&self) -> BaseVec {
        BaseVec(self.0.iter().map(|(s, e)| (s.clone(), -e)).collect())
    }

    pub fn pow(&self, k: i64) -> BaseVec {
        if k == 0 {
            return BaseVec::one();
        }
        BaseVec(self.0.iter().map(|(s, e)| (s.clone(), e * k)).collect())
    }

    /// The exact `l`-th root, when every exponent is divisible by `l`.
    pub fn nth_root(&self, l: i64) -> Option<BaseVec> {
        let mut m = BTreeMap::new();
        for (s, e) in self.entries() {
            if e % l != 0 {
                return None;
            }
            m.insert(s.to_string(), e / l);
        }
        Some(BaseVec(m))
    }
}

/// An element of `S × ξ^Z`: a base vector times `ξ^xi_exp`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpectralParam {
    base: BaseVec,
    xi_exp: i64,
}

impl SpectralParam {
    pub fn base(&self) -> &BaseVec {
        &self.base
    }

    pub fn xi_exp(&self) -> i64 {
        self.xi_exp
    }

    pub fn is_identity(&self) -> bool {
        self.base.is_one() && self.xi_exp == 0
    }

    /// Check that the stored exponent is reduced for `field`.
    pub fn validate(&self, field: &GroundField) -> Result<(), GroundError> {
        if field.reduce_exp(self.xi_exp) == self.xi_exp {
            Ok(())
        } else {
            Err(GroundError::FieldMismatch)
        }
    }
}

impl fmt::Display for SpectralParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (s, e) in self.base.entries() {
            if e == 1 {
                parts.push(s.to_string());
            } else {
                parts.push(format!("{s}^{e}"));
            }
        }
        match self.xi_exp {
            0 => {}
            1 => parts.push("x".to_string()),
            e => parts.push(format!("x^{e}")),
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// The group law on spectral parameters.
pub fn param_mul(
    field: &GroundField,
    a: &SpectralParam,
    b: &SpectralParam,
) -> Result<SpectralParam, GroundError> {
    a.validate(field)?;
    b.validate(field)?;
    Ok(field.param(a.base.mul(&b.base), a.xi_exp + b.xi_exp))
}

pub fn param_inv(field: &GroundField, a: &SpectralParam) -> SpectralParam {
    field.param(a.base.inv(), -a.xi_exp)
}

pub fn param_pow(field: &GroundField, a: &SpectralParam, k: i64) -> SpectralParam {
    field.param(a.base.pow(k), a.xi_exp.saturating_mul(k))
}

/// Multiply a parameter by `ξ^e`.
pub fn param_shift(field: &GroundField, a: &SpectralParam, e: i64) -> SpectralParam {
    field.param(a.base.clone(), a.xi_exp + e)
}

/// The set of integers `m` with `a/b = ξ^m`, when `a/b` is a ξ-power at all.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum XiPowerSet {
    /// Generic mode: exactly one exponent.
    Single(i64),
    /// Finite order: a congruence class mod `l`.
    ModClass { residue: i64, l: u32 },
    /// ξ = 1: every integer.
    All,
}

impl XiPowerSet {
    pub fn contains(&self, m: i64) -> bool {
        match self {
            XiPowerSet::Single(k) => *k == m,
            XiPowerSet::ModClass { residue, l } => m.rem_euclid(*l as i64) == *residue,
            XiPowerSet::All => true,
        }
    }
}

/// Decide membership of `a/b` in `ξ^Z` and return the exponent set.
pub fn ratio_xi_power(
    field: &GroundField,
    a: &SpectralParam,
    b: &SpectralParam,
) -> Result<Option<XiPowerSet>, GroundError> {
    a.validate(field)?;
    b.validate(field)?;
    if a.base != b.base {
        return Ok(None);
    }
    let d = a.xi_exp - b.xi_exp;
    Ok(Some(match field.mode() {
        FieldMode::GenericFormal => XiPowerSet::Single(d),
        FieldMode::RootOfUnity(l) => XiPowerSet::ModClass { residue: d.rem_euclid(l as i64), l },
        FieldMode::One => XiPowerSet::All,
    }))
}

/// Evaluate a generic parameter at the target field (the bar map on
/// parameters): the base vector is kept and the ξ-exponent reduced.
pub fn specialize_param(
    source: &GroundField,
    p: &SpectralParam,
    target: &GroundField,
) -> Result<SpectralParam, GroundError> {
    if !source.is_generic() {
        return Err(GroundError::NotGeneric);
    }
    if target.is_generic() {
        return Err(GroundError::BadTarget);
    }
    Ok(target.param(p.base.clone(), p.xi_exp))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> GroundField {
        GroundField::generic(1)
    }

    #[test]
    fn field_validation() {
        assert!(GroundField::root_of_unity(3, 1).is_ok());
        assert!(GroundField::root_of_unity(9, 3).is_err());
        assert!(GroundField::root_of_unity(4, 1).is_err());
        assert!(GroundField::root_of_unity(1, 1).is_err());
        assert_eq!(GroundField::root_of_unity(5, 2).unwrap().l(), 5);
        assert_eq!(q().l(), 1);
        assert_eq!(GroundField::one(2).l(), 1);
    }

    #[test]
    fn mul_examples() {
        let f = q();
        // (a·ξ^2)·(a^{-1}·ξ^1) = ξ^3
        let a = f.param(BaseVec::symbol("a"), 2);
        let ainv = f.param(BaseVec::symbol("a").inv(), 1);
        assert_eq!(param_mul(&f, &a, &ainv).unwrap(), f.xi_pow(3));

        // in RootOfUnity(3): (a·ξ^2)·(ξ^2) = a·ξ^1
        let z3 = GroundField::root_of_unity(3, 1).unwrap();
        let a2 = z3.param(BaseVec::symbol("a"), 2);
        let x2 = z3.xi_pow(2);
        assert_eq!(param_mul(&z3, &a2, &x2).unwrap(), z3.param(BaseVec::symbol("a"), 1));

        // in One mode: (a·ξ^5)·b = a·b
        let one = GroundField::one(1);
        let a5 = one.param(BaseVec::symbol("a"), 5);
        assert_eq!(a5.xi_exp(), 0);
        let b = one.symbol("b");
        let ab = param_mul(&one, &a5, &b).unwrap();
        assert_eq!(ab, one.param(BaseVec::symbol("a").mul(&BaseVec::symbol("b")), 0));
    }

    #[test]
    fn ratio_examples() {
        let f = q();
        let a4 = f.param(BaseVec::symbol("a"), 4);
        let a1 = f.param(BaseVec::symbol("a"), 1);
        assert_eq!(ratio_xi_power(&f, &a4, &a1).unwrap(), Some(XiPowerSet::Single(3)));

        let z5 = GroundField::root_of_unity(5, 1).unwrap();
        let a4 = z5.param(BaseVec::symbol("a"), 4);
        let a1 = z5.param(BaseVec::symbol("a"), 1);
        let set = ratio_xi_power(&z5, &a4, &a1).unwrap().unwrap();
        assert_eq!(set, XiPowerSet::ModClass { residue: 3, l: 5 });
        assert!(set.contains(3));
        assert!(set.contains(-2));
        assert!(!set.contains(4));

        let b = f.symbol("b");
        assert_eq!(ratio_xi_power(&f, &a4, &b).unwrap(), None);
    }

    #[test]
    fn specialize_examples() {
        let f = q();
        let z3 = GroundField::root_of_unity(3, 1).unwrap();
        let one = GroundField::one(1);
        let a7 = f.param(BaseVec::symbol("a"), 7);
        assert_eq!(
            specialize_param(&f, &a7, &z3).unwrap(),
            z3.param(BaseVec::symbol("a"), 1)
        );
        let a3 = f.param(BaseVec::symbol("a"), 3);
        assert_eq!(specialize_param(&f, &a3, &z3).unwrap(), z3.symbol("a"));
        assert_eq!(specialize_param(&f, &a7, &one).unwrap(), one.symbol("a"));
        assert!(specialize_param(&z3, &a7, &one).is_err());
        assert!(specialize_param(&f, &a7, &f).is_err());
    }

    #[test]
    fn ratio_self_contains_zero() {
        for field in [q(), GroundField::root_of_unity(5, 1).unwrap(), GroundField::one(1)] {
            let p = field.param(BaseVec::symbol("a"), 2);
            assert!(ratio_xi_power(&field, &p, &p).unwrap().unwrap().contains(0));
        }
    }

    #[test]
    fn specialize_is_homomorphism() {
        let f = q();
        let z5 = GroundField::root_of_unity(5, 1).unwrap();
        let pairs = [
            (f.param(BaseVec::symbol("a"), 13), f.param(BaseVec::symbol("b"), -4)),
            (f.param(BaseVec::symbol("a").inv(), 2), f.param(BaseVec::symbol("a"), 9)),
            (f.xi_pow(-7), f.param(BaseVec::symbol("c"), 0)),
        ];
        for (a, b) in pairs {
            let lhs = specialize_param(&f, &param_mul(&f, &a, &b).unwrap(), &z5).unwrap();
            let rhs = param_mul(
                &z5,
                &specialize_param(&f, &a, &z5).unwrap(),
                &specialize_param(&f, &b, &z5).unwrap(),
            )
            .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    proptest::proptest! {
        #[test]
        fn param_group_laws(
            mode in 0..3usize,
            ea in -10..10i64, eb in -10..10i64, ec in -10..10i64,
            sa in 0..3usize, sb in 0..3usize, sc in 0..3usize,
        ) {
            let field = [
                GroundField::generic(1),
                GroundField::root_of_unity(5, 1).unwrap(),
                GroundField::one(1),
            ][mode];
            let names = ["a", "b", "c"];
            let p = |s: usize, e: i64| field.param(BaseVec::symbol(names[s]), e);
            let (a, b, c) = (p(sa, ea), p(sb, eb), p(sc, ec));
            // commutative, associative, identity
            proptest::prop_assert_eq!(
                param_mul(&field, &a, &b).unwrap(),
                param_mul(&field, &b, &a).unwrap()
            );
            let ab_c = param_mul(&field, &param_mul(&field, &a, &b).unwrap(), &c).unwrap();
            let a_bc = param_mul(&field, &a, &param_mul(&field, &b, &c).unwrap()).unwrap();
            proptest::prop_assert_eq!(ab_c, a_bc);
            let one = field.xi_pow(0);
            proptest::prop_assert_eq!(param_mul(&field, &a, &one).unwrap(), a.clone());
            proptest::prop_assert_eq!(
                param_mul(&field, &a, &param_inv(&field, &a)).unwrap(),
                one
            );
        }

        #[test]
        fn specialize_hom_property(ea in -12..12i64, eb in -12..12i64, l in 0..2usize) {
            let q = GroundField::generic(1);
            let target = [
                GroundField::root_of_unity(3, 1).unwrap(),
                GroundField::one(1),
            ][l];
            let a = q.param(BaseVec::symbol("a"), ea);
            let b = q.param(BaseVec::symbol("b"), eb);
            let lhs = specialize_param(&q, &param_mul(&q, &a, &b).unwrap(), &target).unwrap();
            let rhs = param_mul(
                &target,
                &specialize_param(&q, &a, &target).unwrap(),
                &specialize_param(&q, &b, &target).unwrap(),
            )
            .unwrap();
            proptest::prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn display_grammar() {
        let f = q();
        let p = f.param(
            BaseVec::symbol("a").mul(&BaseVec::symbol("b").inv()),
            5,
        );
        assert_eq!(p.to_string(), "a*b^-1*x^5");
        assert_eq!(f.xi_pow(-2).to_string(), "x^-2");
        assert_eq!(f.symbol("a").to_string(), "a");
        assert_eq!(f.xi_pow(0).to_string(), "1");
    }
}
