//! The textual grammar for spectral parameters, ℓ-weights, root lists,
//! and Weyl words.
//!
//! ```text
//! param   := "1" | term ("*" term)*
//! term    := ("x" | symbol) ("^" int)?
//! symbol  := [a-z][a-z0-9_]*        ("x" is reserved for ξ)
//! lweight := "1" | factor ("*" factor)*
//! factor  := ("w" | "F") "[" nat "]" "(" param ")" ("^" int)?
//! roots   := param ("," param)*
//! word    := nat (" " nat)*        (1-based node indices)
//! ```
//!
//! Parse errors carry the byte offset of the offending token.  The
//! printers in [`crate::ground`] and [`crate::lweight`] emit exactly this
//! grammar, so parsing round-trips with display.

use std::collections::BTreeSet;
use std::fmt;

use crate::cartan::{CartanData, WeylWord};
use crate::ground::{BaseVec, GroundField, SpectralParam};
use crate::lweight::LWeight;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.pos, self.msg)
    }
}

impl std::error::Error for ParseError {}

struct Cursor<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { text: text.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(got) if got == c => {
                self.pos += 1;
                Ok(())
            }
            got => Err(self.err(format!(
                "expected '{}', found {}",
                c as char,
                got.map(|g| format!("'{}'", g as char)).unwrap_or_else(|| "end of input".into())
            ))),
        }
    }

    fn err(&self, msg: String) -> ParseError {
        ParseError { pos: self.pos, msg }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.text.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.text[start..self.pos]).unwrap();
        s.parse().map_err(|_| ParseError { pos: start, msg: "expected an integer".into() })
    }

    fn nat(&mut self) -> Result<usize, ParseError> {
        let start = self.pos;
        let v = self.int()?;
        usize::try_from(v)
            .map_err(|_| ParseError { pos: start, msg: "expected a nonnegative integer".into() })
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.text.get(self.pos) {
            Some(c) if c.is_ascii_lowercase() => self.pos += 1,
            _ => return Err(self.err("expected a symbol".into())),
        }
        while let Some(c) = self.text.get(self.pos) {
            if c.is_ascii_lowercase() || c.is_ascii_digit() || *c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(std::str::from_utf8(&self.text[start..self.pos]).unwrap().to_string())
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }
}

fn check_symbol(
    name: &str,
    pos: usize,
    symbols: Option<&BTreeSet<String>>,
) -> Result<(), ParseError> {
    if let Some(set) = symbols {
        if !set.contains(name) {
            return Err(ParseError { pos, msg: format!("unknown symbol `{name}`") });
        }
    }
    Ok(())
}

fn param_body(
    cur: &mut Cursor<'_>,
    field: &GroundField,
    symbols: Option<&BTreeSet<String>>,
) -> Result<SpectralParam, ParseError> {
    if cur.peek() == Some(b'1') {
        cur.bump();
        return Ok(field.xi_pow(0));
    }
    let mut base = BaseVec::one();
    let mut xi = 0i64;
    loop {
        let start = cur.pos;
        let name = cur.ident()?;
        let exp = if cur.peek() == Some(b'^') {
            cur.bump();
            cur.int()?
        } else {
            1
        };
        if name == "x" {
            xi += exp;
        } else {
            check_symbol(&name, start, symbols)?;
            base = base.mul(&BaseVec::from_entries([(name, exp)]));
        }
        if cur.peek() == Some(b'*') {
            cur.bump();
        } else {
            break;
        }
    }
    Ok(field.param(base, xi))
}

/// Parse one spectral parameter.
pub fn parse_param(
    field: &GroundField,
    text: &str,
    symbols: Option<&BTreeSet<String>>,
) -> Result<SpectralParam, ParseError> {
    let mut cur = Cursor::new(text);
    let p = param_body(&mut cur, field, symbols)?;
    if !cur.at_end() {
        return Err(cur.err("trailing input".into()));
    }
    Ok(p)
}

/// Parse a comma-separated list of parameters (an inverse-root multiset).
pub fn parse_roots(
    field: &GroundField,
    text: &str,
    symbols: Option<&BTreeSet<String>>,
) -> Result<Vec<SpectralParam>, ParseError> {
    let mut out = Vec::new();
    let mut cur = Cursor::new(text);
    if cur.at_end() {
        return Ok(out);
    }
    loop {
        out.push(param_body(&mut cur, field, symbols)?);
        if cur.peek() == Some(b',') {
            cur.bump();
        } else {
            break;
        }
    }
    if !cur.at_end() {
        return Err(cur.err("trailing input".into()));
    }
    Ok(out)
}

/// Parse an ℓ-weight in the `w[i](param)^e * F[i](param)^e` grammar.
pub fn parse_lweight(
    cartan: &CartanData,
    field: &GroundField,
    text: &str,
    symbols: Option<&BTreeSet<String>>,
) -> Result<LWeight, ParseError> {
    let mut cur = Cursor::new(text);
    let mut out = LWeight::identity(*field);
    if cur.peek() == Some(b'1') {
        cur.bump();
        if !cur.at_end() {
            return Err(cur.err("trailing input".into()));
        }
        return Ok(out);
    }
    loop {
        let kind = match cur.peek() {
            Some(b'w') => 'w',
            Some(b'F') => 'F',
            _ => return Err(cur.err("expected 'w[..](..)' or 'F[..](..)'".into())),
        };
        cur.bump();
        cur.expect(b'[')?;
        let node_pos = cur.pos;
        let node = cur.nat()?;
        if node == 0 || node > cartan.rank() {
            return Err(ParseError {
                pos: node_pos,
                msg: format!("node {node} out of range 1..={}", cartan.rank()),
            });
        }
        cur.expect(b']')?;
        cur.expect(b'(')?;
        let param = param_body(&mut cur, field, symbols)?;
        cur.expect(b')')?;
        let exp = if cur.peek() == Some(b'^') {
            cur.bump();
            cur.int()?
        } else {
            1
        };
        if kind == 'w' {
            out.mul_omega(node - 1, param, exp);
        } else {
            out.mul_frob(node - 1, param, exp);
        }
        if cur.peek() == Some(b'*') {
            cur.bump();
        } else {
            break;
        }
    }
    if !cur.at_end() {
        return Err(cur.err("trailing input".into()));
    }
    Ok(out)
}

/// Parse a space-separated Weyl word of 1-based node indices.
pub fn parse_word(cartan: &CartanData, text: &str) -> Result<WeylWord, ParseError> {
    let mut out = Vec::new();
    for (off, token) in
        text.split_whitespace().map(|t| (t.as_ptr() as usize - text.as_ptr() as usize, t))
    {
        let n: usize = token
            .parse()
            .map_err(|_| ParseError { pos: off, msg: format!("bad node index `{token}`") })?;
        if n == 0 || n > cartan.rank() {
            return Err(ParseError {
                pos: off,
                msg: format!("node {n} out of range 1..={}", cartan.rank()),
            });
        }
        out.push(n - 1);
    }
    Ok(WeylWord(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{build_cartan, TypeLetter};

    fn q() -> GroundField {
        GroundField::generic(1)
    }

    #[test]
    fn param_round_trip() {
        let f = q();
        for text in ["a", "a*x^3", "x^-2", "a*b^-1*x^5", "1"] {
            let p = parse_param(&f, text, None).unwrap();
            assert_eq!(p.to_string(), text);
        }
    }

    #[test]
    fn lweight_round_trip() {
        let c = build_cartan(TypeLetter::A, 2).unwrap();
        let f = q();
        for text in ["w[1](a)", "w[1](a*x^3)^2*w[2](b)^-1", "1"] {
            let w = parse_lweight(&c, &f, text, None).unwrap();
            assert_eq!(w.to_string(), text);
        }
        // frobenius blocks need a finite-order field
        let z3 = GroundField::root_of_unity(3, 1).unwrap();
        let w = parse_lweight(&c, &z3, "w[2](a)^2*F[1](c)", None).unwrap();
        assert_eq!(w.to_string(), "w[2](a)^2*F[1](c)");
    }

    #[test]
    fn errors() {
        let c = build_cartan(TypeLetter::A, 2).unwrap();
        let f = q();
        // node out of range
        assert!(parse_lweight(&c, &f, "w[9](a)", None).is_err());
        // unknown symbol under a declared set
        let mut symbols = BTreeSet::new();
        symbols.insert("a".to_string());
        assert!(parse_param(&f, "b", Some(&symbols)).is_err());
        assert!(parse_param(&f, "a", Some(&symbols)).is_ok());
        // malformed input reports a position
        let e = parse_lweight(&c, &f, "w[1](a", None).unwrap_err();
        assert_eq!(e.pos, 6);
        assert!(parse_param(&f, "a**b", None).is_err());
        assert!(parse_word(&c, "1 5").is_err());
        assert_eq!(parse_word(&c, "1 2 1").unwrap().0, vec![0, 1, 0]);
    }

    proptest::proptest! {
        #[test]
        fn param_round_trip_property(
            ea in -9..9i64, eb in -9..9i64, xi in -9..9i64, mode in 0..2usize,
        ) {
            let field = [q(), GroundField::root_of_unity(7, 1).unwrap()][mode];
            let base = crate::ground::BaseVec::from_entries([
                ("a".to_string(), ea),
                ("b".to_string(), eb),
            ]);
            let p = field.param(base, xi);
            let back = parse_param(&field, &p.to_string(), None).unwrap();
            proptest::prop_assert_eq!(back, p);
        }
    }

    #[test]
    fn random_round_trip() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let c = build_cartan(TypeLetter::B, 3).unwrap();
        for field in [q(), GroundField::root_of_unity(5, 2).unwrap()] {
            for _ in 0..500 {
                let w = crate::braid::tests::random_lweight(&c, &field, &mut rng);
                let text = w.to_string();
                let back = parse_lweight(&c, &field, &text, None).unwrap();
                assert_eq!(back, w, "{text}");
            }
        }
    }
}
