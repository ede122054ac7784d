//! Session configuration and the command implementations behind the `lwk`
//! binary: every command parses its textual inputs, runs the library
//! operation, and renders a deterministic JSON value plus an exit code
//! (0 success, 1 error, 2 unknown verdict).

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use crate::blocks;
use crate::cartan::{build_cartan, CartanData, TypeLetter};
use crate::ground::GroundField;
use crate::lweight::{LWeight, SignedAnswer};
use crate::parse;
use crate::qchar::{self, BgInvConfig, QCharacter};
use crate::qfactor::{self, Strength};
use crate::resonance::{self, CondKind, HlwVerdict, VerdictStatus, WeylFundVerdict};
use crate::sl2oracle;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;

/// One configured run: the algebra, the ground field, the declared
/// symbols (None = permissive), and search budgets.
pub struct Session {
    pub cartan: CartanData,
    pub field: GroundField,
    pub symbols: Option<BTreeSet<String>>,
    pub word_budget: usize,
}

#[derive(Debug)]
pub struct CmdError(pub String);

impl<E: std::fmt::Display> From<E> for CmdError {
    fn from(e: E) -> Self {
        CmdError(e.to_string())
    }
}

type CmdResult = Result<(Value, i32), CmdError>;

/// Parse a field flag: `q`, `zeta:L`, or `one`.
pub fn parse_field(spec: &str, lacing: u32) -> Result<GroundField, CmdError> {
    match spec {
        "q" => Ok(GroundField::generic(lacing)),
        "one" => Ok(GroundField::one(lacing)),
        other => {
            let l = other
                .strip_prefix("zeta:")
                .and_then(|s| s.parse::<u32>().ok())
                .ok_or_else(|| CmdError(format!("bad field spec `{other}` (q | zeta:L | one)")))?;
            Ok(GroundField::root_of_unity(l, lacing)?)
        }
    }
}

pub fn parse_type(letter: &str) -> Result<TypeLetter, CmdError> {
    match letter {
        "A" | "a" => Ok(TypeLetter::A),
        "B" | "b" => Ok(TypeLetter::B),
        "C" | "c" => Ok(TypeLetter::C),
        "D" | "d" => Ok(TypeLetter::D),
        "E" | "e" => Ok(TypeLetter::E),
        "F" | "f" => Ok(TypeLetter::F),
        "G" | "g" => Ok(TypeLetter::G),
        other => Err(CmdError(format!("unknown type letter `{other}`"))),
    }
}

impl Session {
    pub fn new(
        letter: &str,
        rank: usize,
        field_spec: &str,
        symbols: Option<Vec<String>>,
        word_budget: usize,
    ) -> Result<Session, CmdError> {
        let cartan = build_cartan(parse_type(letter)?, rank)?;
        let field = parse_field(field_spec, cartan.lacing())?;
        Ok(Session {
            cartan,
            field,
            symbols: symbols.map(|v| v.into_iter().collect()),
            word_budget,
        })
    }

    fn lweight(&self, text: &str) -> Result<LWeight, CmdError> {
        Ok(parse::parse_lweight(&self.cartan, &self.field, text, self.symbols.as_ref())?)
    }

    fn lweights(&self, text: &str) -> Result<Vec<LWeight>, CmdError> {
        text.split(';').map(|t| self.lweight(t.trim())).collect()
    }

    pub fn cmd_factor(&self, roots: &str, frob: &str, step: i64) -> CmdResult {
        let roots = parse::parse_roots(&self.field, roots, self.symbols.as_ref())?;
        let frob = parse::parse_roots(&self.field, frob, self.symbols.as_ref())?;
        let mut multiset = qfactor::RootMultiset::new();
        for r in roots {
            multiset.add(r, 1);
        }
        let mut blocks_in = BTreeMap::new();
        for b in frob {
            *blocks_in.entry(b).or_insert(0u32) += 1;
        }
        let fact = qfactor::xi_factorize(&multiset, &blocks_in, &self.field, step);
        let quantum: Vec<Value> = fact
            .quantum()
            .iter()
            .map(|(a, r)| json!({"a": a.to_string(), "r": r}))
            .collect();
        let frobenius: Vec<Value> = fact
            .frobenius()
            .iter()
            .map(|(b, m)| json!({"base": b.to_string(), "mult": m}))
            .collect();
        Ok((
            json!({
                "quantum": quantum,
                "frobenius": frobenius,
                "regular": qfactor::poly_regular(&fact),
            }),
            EXIT_OK,
        ))
    }

    pub fn cmd_braid(&self, word: &str, lweight: &str) -> CmdResult {
        let word = parse::parse_word(&self.cartan, word)?;
        let lam = self.lweight(lweight)?;
        let img = crate::braid::braid_tw(&self.cartan, &word, &lam);
        Ok((json!({"result": img.to_string()}), EXIT_OK))
    }

    pub fn cmd_alpha(&self, node: usize, param: &str) -> CmdResult {
        if node == 0 || node > self.cartan.rank() {
            return Err(CmdError(format!("node {node} out of range")));
        }
        let p = parse::parse_param(&self.field, param, self.symbols.as_ref())?;
        let alpha = crate::lweight::simple_lroot(&self.cartan, self.field, node - 1, &p);
        Ok((json!({"alpha": alpha.to_string()}), EXIT_OK))
    }

    fn verdict_json(&self, v: &resonance::ResonanceVerdict) -> (Value, i32, &'static str) {
        let violations: Vec<Value> = v
            .violations
            .iter()
            .map(|viol| {
                json!({
                    "condition": match viol.condition {
                        CondKind::A => "a",
                        CondKind::B => "b",
                        CondKind::C => "c",
                    },
                    "node": viol.node + 1,
                    "detail": viol.detail,
                })
            })
            .collect();
        match &v.status {
            VerdictStatus::Proven { pair_words, permutation } => {
                let witnesses: Vec<Value> = pair_words
                    .iter()
                    .map(|(j, k, w)| json!({"pair": [j, k], "word": w.to_string()}))
                    .collect();
                (
                    json!({
                        "status": "proven",
                        "witnesses": witnesses,
                        "permutation": permutation,
                        "violations": violations,
                    }),
                    EXIT_OK,
                    "proven",
                )
            }
            VerdictStatus::RefutedForAllTested => (
                json!({"status": "refuted", "violations": violations}),
                EXIT_OK,
                "refuted",
            ),
            VerdictStatus::Unknown => (
                json!({"status": "unknown", "violations": violations}),
                EXIT_UNKNOWN,
                "unknown",
            ),
        }
    }

    pub fn cmd_resonant(&self, tuple: &str, strength: &str) -> CmdResult {
        let lams = self.lweights(tuple)?;
        let strength = match strength {
            "strict" => Strength::Strict,
            "weak" => Strength::Weak,
            other => return Err(CmdError(format!("bad strength `{other}`"))),
        };
        let verdict =
            resonance::lw_tuple_resonant(&self.cartan, &lams, strength, self.word_budget)?;
        let (value, code, _) = self.verdict_json(&verdict);
        Ok((value, code))
    }

    pub fn cmd_regular(&self, lweight: &str) -> CmdResult {
        let lam = self.lweight(lweight)?;
        let verdict = resonance::lw_regular(&self.cartan, &lam, self.word_budget)?;
        let (value, code, _) = self.verdict_json(&verdict);
        Ok((value, code))
    }

    pub fn cmd_hlw_check(&self, tuple: &str) -> CmdResult {
        let lams = self.lweights(tuple)?;
        let verdict = resonance::hlw_tensor_verdict(&self.cartan, &lams, self.word_budget)?;
        Ok(match verdict {
            HlwVerdict::GuaranteedHighestLWeight(v) => {
                let (inner, _, _) = self.verdict_json(&v);
                (json!({"verdict": "guaranteed", "resonance": inner}), EXIT_OK)
            }
            HlwVerdict::No { pair } => (
                json!({"verdict": "no", "pair": [pair.0, pair.1]}),
                EXIT_OK,
            ),
            HlwVerdict::Unknown(v) => {
                let (inner, _, _) = self.verdict_json(&v);
                (json!({"verdict": "unknown", "resonance": inner}), EXIT_UNKNOWN)
            }
        })
    }

    pub fn cmd_weyl_fund(&self, lweight: &str, flags: &str) -> CmdResult {
        let lam = self.lweight(lweight)?;
        let mut irr = BTreeMap::new();
        for part in flags.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| CmdError(format!("bad flag `{part}`, expected w[i](a)=bool")))?;
            let w = self.lweight(key.trim())?;
            let entries: Vec<_> = w.omega_entries().collect();
            if entries.len() != 1 || entries[0].2 != 1 {
                return Err(CmdError(format!("flag key `{key}` is not a fundamental")));
            }
            let flag: bool = value.trim().parse().map_err(|_| {
                CmdError(format!("bad flag value `{value}`, expected true/false"))
            })?;
            irr.insert((entries[0].0, entries[0].1.clone()), flag);
        }
        let verdict =
            resonance::weyl_is_fundamental_tensor(&self.cartan, &lam, &irr, self.word_budget)?;
        Ok(match verdict {
            WeylFundVerdict::Yes { permutation } => {
                (json!({"verdict": "yes", "permutation": permutation}), EXIT_OK)
            }
            WeylFundVerdict::No { reason } => {
                (json!({"verdict": "no", "reason": reason}), EXIT_OK)
            }
            WeylFundVerdict::Unknown { reason } => {
                (json!({"verdict": "unknown", "reason": reason}), EXIT_UNKNOWN)
            }
        })
    }

    pub fn cmd_block_eq(&self, lhs: &str, rhs: &str) -> CmdResult {
        let l = self.lweight(lhs)?;
        let r = self.lweight(rhs)?;
        let cl = blocks::elliptic_char(&self.cartan, &self.field, &l)?;
        let cr = blocks::elliptic_char(&self.cartan, &self.field, &r)?;
        Ok((
            json!({
                "equal": cl == cr,
                "lhs_class": cl.to_string(),
                "rhs_class": cr.to_string(),
            }),
            EXIT_OK,
        ))
    }

    pub fn cmd_block_link(&self, lhs: &str, rhs: &str) -> CmdResult {
        let l = self.lweight(lhs)?;
        let r = self.lweight(rhs)?;
        let chain = blocks::linking_sequence(&self.cartan, &self.field, &l, &r)?;
        let moves: Vec<Value> = chain
            .moves
            .iter()
            .map(|(k, a, eps)| json!({"k": k, "a": a.to_string(), "sign": eps}))
            .collect();
        Ok((
            json!({"chain": moves, "dominant_chain": chain.dominant_chain}),
            EXIT_OK,
        ))
    }

    pub fn cmd_lattice_member(&self, lweight: &str) -> CmdResult {
        let lam = self.lweight(lweight)?;
        let answer = blocks::signed_member_certified(&self.cartan, &self.field, &lam)?;
        Ok(match answer {
            SignedAnswer::Member(cert) => {
                let moves: Vec<Value> = cert
                    .0
                    .iter()
                    .map(|(i, c, e)| json!({"node": i + 1, "a": c.to_string(), "exp": e}))
                    .collect();
                (json!({"member": true, "certificate": moves}), EXIT_OK)
            }
            SignedAnswer::No => (json!({"member": false}), EXIT_OK),
            SignedAnswer::Unknown => (json!({"member": "unknown"}), EXIT_UNKNOWN),
        })
    }

    fn qchar_json(chi: &QCharacter, extra: Value) -> Value {
        let terms: Vec<Value> = chi
            .terms()
            .map(|(l, m)| json!({"lweight": l.to_string(), "mult": m}))
            .collect();
        let mut obj = json!({
            "terms": terms,
            "dimension": chi.dimension(),
        });
        if let (Some(map), Value::Object(extra)) = (obj.as_object_mut(), extra) {
            map.extend(extra);
        }
        obj
    }

    pub fn cmd_qchar_sl2(&self, a: &str, r: u32) -> CmdResult {
        let p = parse::parse_param(&self.field, a, self.symbols.as_ref())?;
        let chi = qchar::sl2_weyl_qchar(&self.cartan, self.field, &p, r)?;
        Ok((Self::qchar_json(&chi, json!({})), EXIT_OK))
    }

    pub fn cmd_qchar_fund(&self, node: usize, a: &str, max_steps: usize) -> CmdResult {
        if node == 0 || node > self.cartan.rank() {
            return Err(CmdError(format!("node {node} out of range")));
        }
        let p = parse::parse_param(&self.field, a, self.symbols.as_ref())?;
        let (chi, saturated) = qchar::bginv_lower_bound(
            &self.cartan,
            self.field,
            node - 1,
            &p,
            BgInvConfig { max_steps },
        )?;
        let code = if saturated { EXIT_OK } else { EXIT_UNKNOWN };
        Ok((Self::qchar_json(&chi, json!({"saturated": saturated})), code))
    }

    pub fn cmd_qchar_dn2(&self, n: usize, l: Option<u32>, a: &str) -> CmdResult {
        let cartan = build_cartan(TypeLetter::D, n)?;
        let field = match l {
            Some(l) => GroundField::root_of_unity(l, cartan.lacing())?,
            None => self.field,
        };
        let p = parse::parse_param(&field, a, self.symbols.as_ref())?;
        let chi = qchar::dn_node2_qchar(&cartan, field, &p)?;
        Ok((Self::qchar_json(&chi, json!({})), EXIT_OK))
    }

    pub fn cmd_specialize(&self, lweight: &str) -> CmdResult {
        if self.field.is_generic() {
            return Err(CmdError(
                "specialize needs a finite-order session field (zeta:L or one)".into(),
            ));
        }
        let generic = GroundField::generic(self.cartan.lacing());
        let lam = parse::parse_lweight(&self.cartan, &generic, lweight, self.symbols.as_ref())?;
        let bar = lam.specialize(self.field)?;
        Ok((json!({"result": bar.to_string()}), EXIT_OK))
    }

    pub fn cmd_oracle_sl2(&self, l: u32, factors: &str) -> CmdResult {
        let ring = sl2oracle::CycRing::new(l)?;
        let mut parsed = Vec::new();
        for part in factors.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (len, exp) = part
                .split_once('@')
                .ok_or_else(|| CmdError(format!("bad factor `{part}`, expected len@exp")))?;
            let len: u32 = len.parse().map_err(|_| CmdError(format!("bad length `{len}`")))?;
            let exp: i64 = exp.parse().map_err(|_| CmdError(format!("bad exponent `{exp}`")))?;
            parsed.push((len, ring.zeta_pow(exp)));
        }
        let rank = sl2oracle::tensor_first_level_rank(&ring, &parsed);
        Ok((
            json!({"rank": rank, "full": rank == parsed.len()}),
            EXIT_OK,
        ))
    }
}

/// Render an error as the standard JSON error envelope.
pub fn error_value(e: &CmdError) -> Value {
    json!({"error": e.0})
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session(letter: &str, rank: usize, field: &str) -> Session {
        Session::new(letter, rank, field, None, 8).unwrap()
    }

    #[test]
    fn factor_command() {
        let s = session("A", 1, "q");
        let (v, code) = s.cmd_factor("a*x^1,a*x^-1,b", "", 1).unwrap();
        assert_eq!(code, EXIT_OK);
        assert_eq!(v["quantum"].as_array().unwrap().len(), 2);
        assert_eq!(v["frobenius"].as_array().unwrap().len(), 0);
        assert_eq!(v["regular"], true);
    }

    #[test]
    fn braid_and_alpha_commands() {
        let s = session("A", 2, "q");
        let (v, _) = s.cmd_braid("1", "w[1](a)").unwrap();
        assert_eq!(v["result"], "w[1](a*x^2)^-1*w[2](a*x)");
        let (v, _) = s.cmd_alpha(1, "a").unwrap();
        assert_eq!(v["alpha"], "w[1](a)*w[1](a*x^2)*w[2](a*x)^-1");
    }

    #[test]
    fn verdict_exit_codes() {
        let s = session("A", 1, "q");
        let (v, code) = s.cmd_resonant("w[1](a) ; w[1](a*x^-2)", "strict").unwrap();
        assert_eq!(code, EXIT_OK);
        assert_eq!(v["status"], "proven");
        let (v, code) = s.cmd_hlw_check("w[1](a*x^-2) ; w[1](a)").unwrap();
        assert_eq!(code, EXIT_OK);
        assert_eq!(v["verdict"], "no");
        // malformed input is an error
        assert!(s.cmd_resonant("w[1](a", "strict").is_err());
        assert!(s.cmd_resonant("w[1](a)", "sideways").is_err());
    }

    #[test]
    fn block_commands() {
        let s = session("A", 1, "zeta:5");
        let (v, _) = s.cmd_block_eq("w[1](a)", "w[1](a*x)").unwrap();
        assert_eq!(v["equal"], true);
        let (v, _) = s.cmd_block_link("w[1](a)", "w[1](a*x)").unwrap();
        assert!(!v["chain"].as_array().unwrap().is_empty());
    }

    #[test]
    fn qchar_and_oracle_commands() {
        let s = session("A", 1, "q");
        let (v, _) = s.cmd_qchar_sl2("a", 3).unwrap();
        assert_eq!(v["dimension"], 4);
        let (v, code) = s.cmd_qchar_fund(1, "a", 1000).unwrap();
        assert_eq!(code, EXIT_OK);
        assert_eq!(v["saturated"], true);
        assert_eq!(v["dimension"], 2);
        let (v, _) = s.cmd_oracle_sl2(5, "1@0,1@3").unwrap();
        assert_eq!(v["rank"], 2);
        assert_eq!(v["full"], true);
        let (v, _) = s.cmd_oracle_sl2(5, "1@0,1@2").unwrap();
        assert_eq!(v["full"], false);
    }

    #[test]
    fn specialize_command() {
        let s = session("A", 1, "zeta:3");
        let (v, _) = s.cmd_specialize("w[1](a*x^4)").unwrap();
        assert_eq!(v["result"], "w[1](a*x)");
        let sq = session("A", 1, "q");
        assert!(sq.cmd_specialize("w[1](a)").is_err());
    }

    #[test]
    fn unknown_exit_codes() {
        // an exhausted frontier budget surfaces as exit code 2
        let s = session("A", 2, "q");
        let (v, code) = s.cmd_qchar_fund(1, "a", 1).unwrap();
        assert_eq!(code, EXIT_UNKNOWN);
        assert_eq!(v["saturated"], false);
        // a missing irreducibility flag in general type is unknown
        let d = session("D", 4, "q");
        let (v, code) = d.cmd_weyl_fund("w[2](a)", "").unwrap();
        assert_eq!(code, EXIT_UNKNOWN);
        assert_eq!(v["verdict"], "unknown");
    }

    #[test]
    fn deterministic_output() {
        let s = session("D", 4, "q");
        let (v1, _) = s.cmd_qchar_dn2(4, None, "a").unwrap();
        let (v2, _) = s.cmd_qchar_dn2(4, None, "a").unwrap();
        assert_eq!(
            serde_json::to_string(&v1).unwrap(),
            serde_json::to_string(&v2).unwrap()
        );
    }
}
