//! Recursive-descent parsers for algebra elements and group words.
//!
//! Elements:
//!
//! ```text
//! elem := ['-'] term (('+' | '-') term)*
//! term := [rational '*'] atom | '0'
//! atom := h1 | h2 | e(-1) | f(-1) | e(l,j,k) | f(l,j,k) | '[' elem ',' elem ']'
//! ```
//!
//! Words: symbols `X(-1;u)`, `X(l,j,k;u)`, `Y(..)`, `H1(s)`, `H2(s)`,
//! `w(-1;s)`, `w(l,j,k;s)`; juxtaposition multiplies, `^-1` inverts,
//! parentheses group, `(a,b)` is the commutator `a b a^-1 b^-1`, and `1` is
//! the empty word.

use monster_core::freelie::Truncated;
use monster_core::index::ExtIndex;
use monster_core::monster::{Monster, MonsterElt};
use monster_core::presentation::{GenSymbol, GroupWord, SymKind};
use monster_core::Q;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("at {pos}: {source}")]
    Eval {
        pos: usize,
        #[source]
        source: monster_core::Error,
    },
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { s: text.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn eat_str(&mut self, t: &str) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(t.as_bytes()) {
            self.pos += t.len();
            true
        } else {
            false
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.s.len() && (self.s[self.pos] == b'-' || self.s[self.pos] == b'+') {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits {
            self.pos = start;
            return self.err("expected an integer");
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
        Ok(text.parse().expect("digits"))
    }

    fn rational(&mut self) -> Result<Q, ParseError> {
        let n = self.integer()?;
        if self.eat(b'/') {
            let pos = self.pos;
            let d = self.integer()?;
            if d.is_zero() {
                return Err(ParseError::Syntax { pos, msg: "zero denominator".into() });
            }
            Ok(Q::new(n, d))
        } else {
            Ok(Q::from_integer(n))
        }
    }

    fn small(&mut self) -> Result<u64, ParseError> {
        let pos = self.pos;
        let n = self.integer()?;
        u64::try_from(n).map_err(|_| ParseError::Syntax { pos, msg: "expected a non-negative index".into() })
    }

    /// `-1` or `l,j,k`; the caller has consumed `(`.
    fn index(&mut self) -> Result<Option<ExtIndex>, ParseError> {
        let pos = self.pos;
        if self.eat_str("-1") {
            return Ok(None);
        }
        let l = self.small()?;
        self.expect(b',')?;
        let j = self.small()?;
        self.expect(b',')?;
        let k = self.small()?;
        let (l, j) = (u32::try_from(l), u32::try_from(j));
        match (l, j) {
            (Ok(l), Ok(j)) => ExtIndex::new(l, j, k)
                .map(Some)
                .map_err(|e| ParseError::Eval { pos, source: e }),
            _ => Err(ParseError::Syntax { pos, msg: "index out of range".into() }),
        }
    }
}

/// Parses and evaluates an element; brackets use the engine's window.
pub fn parse_elem(text: &str, m: &Monster) -> Result<Truncated<MonsterElt>, ParseError> {
    let mut c = Cursor::new(text);
    let out = elem(&mut c, m)?;
    if !c.at_end() {
        return c.err("unexpected trailing input");
    }
    Ok(out)
}

fn elem(c: &mut Cursor, m: &Monster) -> Result<Truncated<MonsterElt>, ParseError> {
    let mut sign = if c.eat(b'-') { -Q::one() } else { Q::one() };
    let mut acc = MonsterElt::zero();
    let mut truncated = false;
    loop {
        let t = term(c, m)?;
        truncated |= t.truncated;
        acc.add_scaled(&t.value, &sign);
        if c.eat(b'+') {
            sign = Q::one();
        } else if c.eat(b'-') {
            sign = -Q::one();
        } else {
            return Ok(Truncated { value: acc, truncated });
        }
    }
}

fn term(c: &mut Cursor, m: &Monster) -> Result<Truncated<MonsterElt>, ParseError> {
    let coeff = match c.peek() {
        Some(b) if b.is_ascii_digit() => {
            let r = c.rational()?;
            // a bare `0` is how the zero element prints
            if r.is_zero() && !matches!(c.peek(), Some(b'*')) {
                return Ok(Truncated { value: MonsterElt::zero(), truncated: false });
            }
            c.expect(b'*')?;
            r
        }
        _ => Q::one(),
    };
    let a = atom(c, m)?;
    Ok(Truncated { value: a.value.scale(&coeff), truncated: a.truncated })
}

fn atom(c: &mut Cursor, m: &Monster) -> Result<Truncated<MonsterElt>, ParseError> {
    let pos = c.pos;
    let exact = |value| Ok(Truncated { value, truncated: false });
    if c.eat(b'[') {
        let a = elem(c, m)?;
        c.expect(b',')?;
        let b = elem(c, m)?;
        c.expect(b']')?;
        let r = m.bracket(&a.value, &b.value).map_err(|e| ParseError::Eval { pos, source: e })?;
        return Ok(Truncated { value: r.value, truncated: r.truncated || a.truncated || b.truncated });
    }
    if c.eat_str("h1") {
        return exact(MonsterElt::h1());
    }
    if c.eat_str("h2") {
        return exact(MonsterElt::h2());
    }
    let positive = if c.eat_str("e(") {
        true
    } else if c.eat_str("f(") {
        false
    } else {
        return c.err("expected h1, h2, e(..), f(..) or '['");
    };
    let idx = c.index()?;
    c.expect(b')')?;
    let v = match (idx, positive) {
        (None, true) => MonsterElt::e_real(),
        (None, false) => MonsterElt::f_real(),
        (Some(x), true) => MonsterElt::e(x),
        (Some(x), false) => MonsterElt::f(x),
    };
    m.check_support(&v).map_err(|e| ParseError::Eval { pos, source: e })?;
    if v.max_degree().is_some_and(|d| d.abs() > m.cfg().degree_bound)
        || v.min_degree().is_some_and(|d| d.abs() > m.cfg().degree_bound)
    {
        return Err(ParseError::Eval {
            pos,
            source: monster_core::Error::InvalidArgument("generator lies outside the degree window".into()),
        });
    }
    exact(v)
}

/// Parses a group word (no evaluation).
pub fn parse_word(text: &str) -> Result<GroupWord, ParseError> {
    let mut c = Cursor::new(text);
    let w = product(&mut c)?;
    if !c.at_end() {
        return c.err("unexpected trailing input");
    }
    Ok(w)
}

fn product(c: &mut Cursor) -> Result<GroupWord, ParseError> {
    let mut w = GroupWord::one();
    while let Some(b) = c.peek() {
        if b == b')' || b == b',' {
            break;
        }
        let f = factor(c)?;
        w = w.mul(&f);
    }
    Ok(w)
}

fn factor(c: &mut Cursor) -> Result<GroupWord, ParseError> {
    let mut base = primary(c)?;
    while c.eat_str("^-1") {
        base = base.inverse();
    }
    Ok(base)
}

fn primary(c: &mut Cursor) -> Result<GroupWord, ParseError> {
    let pos = c.pos;
    if c.eat(b'(') {
        let a = product(c)?;
        if c.eat(b',') {
            let b = product(c)?;
            c.expect(b')')?;
            return Ok(GroupWord::commutator(&a, &b));
        }
        c.expect(b')')?;
        return Ok(a);
    }
    if c.eat_str("H1(") {
        return torus(c, SymKind::H1, pos);
    }
    if c.eat_str("H2(") {
        return torus(c, SymKind::H2, pos);
    }
    let kind = if c.eat_str("X(") {
        SymKind::X
    } else if c.eat_str("Y(") {
        SymKind::Y
    } else if c.eat_str("w(") {
        SymKind::W
    } else if c.eat(b'1') {
        return Ok(GroupWord::one());
    } else {
        return c.err("expected a generator symbol, '(' or 1");
    };
    let idx = c.index()?;
    c.expect(b';')?;
    let p = c.rational()?;
    c.expect(b')')?;
    let s = GenSymbol::new(kind, idx, p).map_err(|e| ParseError::Eval { pos, source: e })?;
    Ok(GroupWord::gen(s))
}

fn torus(c: &mut Cursor, kind: SymKind, pos: usize) -> Result<GroupWord, ParseError> {
    let p = c.rational()?;
    c.expect(b')')?;
    let s = GenSymbol::new(kind, None, p).map_err(|e| ParseError::Eval { pos, source: e })?;
    Ok(GroupWord::gen(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use monster_core::index::SupportConfig;
    use monster_core::rational::{frac, q};

    fn engine() -> Monster {
        Monster::new(SupportConfig::new(8, [(1, 2), (2, 1)]).unwrap())
    }

    #[test]
    fn elements() {
        let m = engine();
        assert_eq!(parse_elem("[e(-1),f(-1)]", &m).unwrap().value, MonsterElt::h1().sub(&MonsterElt::h2()));
        assert!(parse_elem("[e(0,1,1),e(0,1,1)]", &m).unwrap().value.is_zero());
        // the string of e_{2,1} has length 2, so two raisings vanish
        assert!(parse_elem("1/2*[e(-1),[e(-1),e(0,2,1)]]", &m).unwrap().value.is_zero());
        assert_eq!(
            parse_elem("[e(-1),e(0,2,1)]", &m).unwrap().value,
            MonsterElt::e(ExtIndex::at(1, 2, 1))
        );
        assert_eq!(parse_elem("-2*h1 + 1/3*h2 - h1", &m).unwrap().value, MonsterElt::cartan(q(-3), frac(1, 3)));
    }

    #[test]
    fn element_errors_carry_positions() {
        let m = engine();
        assert!(matches!(parse_elem("[e(-1),", &m), Err(ParseError::Syntax { pos: 7, .. })));
        assert!(matches!(parse_elem("e(0,1,3)", &m), Err(ParseError::Eval { pos: 0, .. })));
        assert!(matches!(parse_elem("e(2,2,1)", &m), Err(ParseError::Eval { .. })));
        assert!(matches!(parse_elem("1/0*h1", &m), Err(ParseError::Syntax { .. })));
        assert!(parse_elem("h1 h2", &m).is_err());
    }

    #[test]
    fn display_roundtrip() {
        let m = engine();
        for t in ["[e(0,1,1),e(0,1,2)]", "[[e(0,1,1),e(0,1,2)],f(0,2,1)]", "[f(0,1,1),e(0,1,1)]", "0", "3/2*e(-1) - f(0,1,2)"] {
            let v = parse_elem(t, &m).unwrap().value;
            let again = parse_elem(&v.to_string(), &m).unwrap().value;
            assert_eq!(again, v, "{t}");
            assert_eq!(again.to_string(), v.to_string());
        }
    }

    #[test]
    fn words() {
        let w = parse_word("X(-1;1)X(-1;2)").unwrap();
        assert_eq!(w.len(), 2);
        let c = parse_word("(X(0,1,1;1),X(0,2,1;1))").unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c.to_string(), "X(0,1,1;1) X(0,2,1;1) X(0,1,1;1)^-1 X(0,2,1;1)^-1");
        assert_eq!(parse_word(&c.to_string()).unwrap(), c);
        let g = parse_word("(H1(2) w(-1;-1/2))^-1 1").unwrap();
        assert_eq!(g.to_string(), "w(-1;-1/2)^-1 H1(2)^-1");
        assert!(parse_word("").unwrap().is_empty());
        assert!(matches!(parse_word("H1(0)"), Err(ParseError::Eval { .. })));
        assert!(matches!(parse_word("X(0,1,1;1"), Err(ParseError::Syntax { .. })));
        assert!(parse_word("Z(1)").is_err());
    }
}
