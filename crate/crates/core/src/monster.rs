//! The monster Lie algebra at finite truncation.
//!
//! Elements live in `u- + gl2 + u+`, with `u+` free on the letters
//! `e_{l,jk}` and `u-` free on `f_{l,jk}`, both in the Lyndon basis. Brackets
//! inside one free part go through [`FreeLie`]; everything crossing the
//! triangular decomposition is reduced to the generating relations by the
//! recursion in [`Monster::cross_bracket`].

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::freelie::{FreeLie, FreeLieElt, LyndonWord, Truncated};
use crate::index::{ExtIndex, Root, SimpleIndex, SupportConfig};
use crate::rational::{fmt_q, q, Q};
use crate::{Error, Result};

pub type Word = LyndonWord<ExtIndex>;
pub type Free = FreeLieElt<ExtIndex>;

/// A canonical basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    H1,
    H2,
    /// `e_{-1}`
    E,
    /// `f_{-1}`
    F,
    Pos(Word),
    Neg(Word),
}

impl Basis {
    pub fn root(&self) -> Root {
        match self {
            Basis::H1 | Basis::H2 => Root::ZERO,
            Basis::E => Root::REAL,
            Basis::F => -Root::REAL,
            Basis::Pos(w) => w.root(),
            Basis::Neg(w) => -w.root(),
        }
    }

    pub fn degree(&self) -> i64 {
        self.root().degree()
    }

    pub fn element(&self) -> MonsterElt {
        MonsterElt::basis(self.clone(), Q::one())
    }

    pub fn omega(&self) -> Basis {
        match self {
            Basis::H1 => Basis::H1,
            Basis::H2 => Basis::H2,
            Basis::E => Basis::F,
            Basis::F => Basis::E,
            Basis::Pos(w) => Basis::Neg(w.clone()),
            Basis::Neg(w) => Basis::Pos(w.clone()),
        }
    }
}

fn fmt_word(f: &mut fmt::Formatter<'_>, w: &Word, e: char) -> fmt::Result {
    match w.std_factorize() {
        Err(_) => write!(f, "{e}({})", w.letters()[0]),
        Ok((u, v)) => {
            write!(f, "[")?;
            fmt_word(f, &u, e)?;
            write!(f, ",")?;
            fmt_word(f, &v, e)?;
            write!(f, "]")
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::H1 => write!(f, "h1"),
            Basis::H2 => write!(f, "h2"),
            Basis::E => write!(f, "e(-1)"),
            Basis::F => write!(f, "f(-1)"),
            Basis::Pos(w) => fmt_word(f, w, 'e'),
            Basis::Neg(w) => fmt_word(f, w, 'f'),
        }
    }
}

/// Element of the algebra: finite combination of basis vectors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MonsterElt {
    /// Coefficients of `h1`, `h2`.
    pub cartan: [Q; 2],
    /// Coefficients of `e_{-1}`, `f_{-1}`.
    pub real: [Q; 2],
    pub pos: Free,
    pub neg: Free,
}

impl Default for MonsterElt {
    fn default() -> Self {
        MonsterElt { cartan: [Q::zero(), Q::zero()], real: [Q::zero(), Q::zero()], pos: Free::zero(), neg: Free::zero() }
    }
}

impl MonsterElt {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(b: Basis, c: Q) -> Self {
        let mut e = Self::zero();
        e.add_term(b, c);
        e
    }

    pub fn h1() -> Self {
        Self::basis(Basis::H1, Q::one())
    }

    pub fn h2() -> Self {
        Self::basis(Basis::H2, Q::one())
    }

    pub fn e_real() -> Self {
        Self::basis(Basis::E, Q::one())
    }

    pub fn f_real() -> Self {
        Self::basis(Basis::F, Q::one())
    }

    pub fn e(x: ExtIndex) -> Self {
        Self::basis(Basis::Pos(Word::letter(x)), Q::one())
    }

    pub fn f(x: ExtIndex) -> Self {
        Self::basis(Basis::Neg(Word::letter(x)), Q::one())
    }

    pub fn cartan(c1: Q, c2: Q) -> Self {
        let mut e = Self::zero();
        e.cartan = [c1, c2];
        e
    }

    pub fn from_pos(pos: Free) -> Self {
        MonsterElt { pos, ..Self::zero() }
    }

    pub fn from_neg(neg: Free) -> Self {
        MonsterElt { neg, ..Self::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.cartan.iter().all(Zero::is_zero)
            && self.real.iter().all(Zero::is_zero)
            && self.pos.is_zero()
            && self.neg.is_zero()
    }

    pub fn add_term(&mut self, b: Basis, c: Q) {
        match b {
            Basis::H1 => self.cartan[0] += c,
            Basis::H2 => self.cartan[1] += c,
            Basis::E => self.real[0] += c,
            Basis::F => self.real[1] += c,
            Basis::Pos(w) => self.pos.add_term(w, c),
            Basis::Neg(w) => self.neg.add_term(w, c),
        }
    }

    pub fn coeff(&self, b: &Basis) -> Q {
        match b {
            Basis::H1 => self.cartan[0].clone(),
            Basis::H2 => self.cartan[1].clone(),
            Basis::E => self.real[0].clone(),
            Basis::F => self.real[1].clone(),
            Basis::Pos(w) => self.pos.coeff(w),
            Basis::Neg(w) => self.neg.coeff(w),
        }
    }

    /// Nonzero terms in the fixed display order.
    pub fn terms(&self) -> Vec<(Basis, Q)> {
        let mut out = Vec::new();
        for (b, c) in [(Basis::H1, &self.cartan[0]), (Basis::H2, &self.cartan[1]), (Basis::E, &self.real[0]), (Basis::F, &self.real[1])] {
            if !c.is_zero() {
                out.push((b, c.clone()));
            }
        }
        out.extend(self.pos.iter().map(|(w, c)| (Basis::Pos(w.clone()), c.clone())));
        out.extend(self.neg.iter().map(|(w, c)| (Basis::Neg(w.clone()), c.clone())));
        out
    }

    pub fn num_terms(&self) -> usize {
        self.cartan.iter().chain(&self.real).filter(|c| !c.is_zero()).count() + self.pos.len() + self.neg.len()
    }

    pub fn add_scaled(&mut self, o: &MonsterElt, c: &Q) {
        if c.is_zero() {
            return;
        }
        for i in 0..2 {
            self.cartan[i] += &o.cartan[i] * c;
            self.real[i] += &o.real[i] * c;
        }
        self.pos.add_scaled(&o.pos, c);
        self.neg.add_scaled(&o.neg, c);
    }

    pub fn add_assign(&mut self, o: &MonsterElt) {
        self.add_scaled(o, &Q::one());
    }

    pub fn add(&self, o: &MonsterElt) -> MonsterElt {
        let mut out = self.clone();
        out.add_assign(o);
        out
    }

    pub fn sub(&self, o: &MonsterElt) -> MonsterElt {
        let mut out = self.clone();
        out.add_scaled(o, &-Q::one());
        out
    }

    pub fn scale(&self, c: &Q) -> MonsterElt {
        let mut out = MonsterElt::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn neg(&self) -> MonsterElt {
        self.scale(&-Q::one())
    }

    /// Keeps the terms whose degree satisfies `keep`; reports whether any were dropped.
    pub fn retain_degrees(&mut self, keep: impl Fn(i64) -> bool) -> bool {
        let mut dropped = false;
        if !keep(0) && self.cartan.iter().any(|c| !c.is_zero()) {
            self.cartan = [Q::zero(), Q::zero()];
            dropped = true;
        }
        if !keep(1) && !self.real[0].is_zero() {
            self.real[0] = Q::zero();
            dropped = true;
        }
        if !keep(-1) && !self.real[1].is_zero() {
            self.real[1] = Q::zero();
            dropped = true;
        }
        dropped |= self.pos.retain_degrees(&keep);
        dropped |= self.neg.retain_degrees(|d| keep(-d));
        dropped
    }

    pub fn restricted(&self, keep: impl Fn(i64) -> bool) -> MonsterElt {
        let mut out = self.clone();
        out.retain_degrees(keep);
        out
    }

    /// Homogeneous component of degree `d`.
    pub fn degree_part(&self, d: i64) -> MonsterElt {
        self.restricted(|e| e == d)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.terms().into_iter().map(|(b, _)| b.degree()).collect::<Vec<_>>().into_iter()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.degrees().min()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.degrees().max()
    }

    /// Letters used on either side.
    pub fn letters(&self) -> Vec<ExtIndex> {
        let mut v: Vec<ExtIndex> = self.pos.letters().into_iter().chain(self.neg.letters()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// True when only `u+` terms are present.
    pub fn is_positive_sector(&self) -> bool {
        self.cartan.iter().chain(&self.real).all(Zero::is_zero) && self.neg.is_zero()
    }

    /// Mirror involution: `e <-> f`, `h -> -h`.
    pub fn omega(&self) -> MonsterElt {
        MonsterElt {
            cartan: [-&self.cartan[0], -&self.cartan[1]],
            real: [self.real[1].clone(), self.real[0].clone()],
            pos: self.neg.clone(),
            neg: self.pos.clone(),
        }
    }

    /// Applies an injective relabelling of letters on both sides.
    pub fn map_letters(&self, lie: &FreeLie<ExtIndex>, f: &impl Fn(&ExtIndex) -> ExtIndex) -> MonsterElt {
        MonsterElt {
            cartan: self.cartan.clone(),
            real: self.real.clone(),
            pos: self.pos.map_letters(lie, f),
            neg: self.neg.map_letters(lie, f),
        }
    }
}

impl fmt::Display for MonsterElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (b, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = if neg { -c } else { c.clone() };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write!(f, "{}*{}", fmt_q(&mag), b)?;
        }
        Ok(())
    }
}

impl fmt::Debug for MonsterElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Degree window `[lo, hi]`; bracket terms outside are dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub const ALL: Window = Window { lo: i64::MIN, hi: i64::MAX };

    pub fn symmetric(n: i64) -> Window {
        Window { lo: -n, hi: n }
    }

    /// Only the positive side is bounded.
    pub fn upper(n: i64) -> Window {
        Window { lo: i64::MIN, hi: n }
    }

    pub fn contains(&self, d: i64) -> bool {
        self.lo <= d && d <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RealGen {
    E,
    F,
}

/// The sl2 string action of `e_{-1}` / `f_{-1}` on one letter. `positive`
/// selects e-letters; f-letters carry the mirrored formulas.
pub fn real_on_letter(which: RealGen, positive: bool, x: ExtIndex) -> Option<(Q, ExtIndex)> {
    let (l, j) = (x.l, x.j);
    let raise = (which == RealGen::E) == positive;
    if raise {
        (l + 1 < j).then(|| (q(l as i64 + 1), x.with_l(l + 1)))
    } else {
        (l > 0).then(|| (q(j as i64 - l as i64), x.with_l(l - 1)))
    }
}

/// Bracket engine bound to one support configuration.
pub struct Monster {
    cfg: SupportConfig,
    free: FreeLie<ExtIndex>,
    cross_memo: Mutex<HashMap<(Word, Word), MonsterElt>>,
    real_memo: Mutex<HashMap<(RealGen, bool, Word), Free>>,
}

impl Monster {
    pub fn new(cfg: SupportConfig) -> Monster {
        Monster { cfg, free: FreeLie::new(), cross_memo: Mutex::new(HashMap::new()), real_memo: Mutex::new(HashMap::new()) }
    }

    pub fn cfg(&self) -> &SupportConfig {
        &self.cfg
    }

    pub fn free(&self) -> &FreeLie<ExtIndex> {
        &self.free
    }

    /// Letters must be within the caps and terms within `|degree| <= N`.
    pub fn check_support(&self, a: &MonsterElt) -> Result<()> {
        for x in a.letters() {
            if !self.cfg.supports(x) {
                return Err(Error::InvalidArgument(format!("letter ({x}) is not supported by the caps")));
            }
        }
        for (b, _) in a.terms() {
            if b.degree().abs() > self.cfg.degree_bound {
                return Err(Error::InvalidArgument(format!(
                    "term {b} of degree {} exceeds the bound {}",
                    b.degree(),
                    self.cfg.degree_bound
                )));
            }
        }
        Ok(())
    }

    /// Bracket truncated to `|degree| <= N`.
    pub fn bracket(&self, a: &MonsterElt, b: &MonsterElt) -> Result<Truncated<MonsterElt>> {
        self.check_support(a)?;
        self.check_support(b)?;
        Ok(self.bracket_window(a, b, Window::symmetric(self.cfg.degree_bound)))
    }

    /// Bracket with terms outside the window dropped (flagged).
    pub fn bracket_window(&self, a: &MonsterElt, b: &MonsterElt, w: Window) -> Truncated<MonsterElt> {
        let mut out = MonsterElt::zero();
        let mut truncated = false;
        let tb = b.terms();
        for (x, cx) in a.terms() {
            let dx = x.degree();
            for (y, cy) in &tb {
                if !w.contains(dx + y.degree()) {
                    truncated = true;
                    continue;
                }
                let r = self.bracket_basis(&x, y);
                out.add_scaled(&r, &(&cx * cy));
            }
        }
        Truncated { value: out, truncated }
    }

    pub fn bracket_exact(&self, a: &MonsterElt, b: &MonsterElt) -> MonsterElt {
        self.bracket_window(a, b, Window::ALL).value
    }

    /// Exact bracket of two basis vectors.
    pub fn bracket_basis(&self, x: &Basis, y: &Basis) -> MonsterElt {
        self.bb(x, y, 0).expect("cross bracket recursion is well founded")
    }

    fn budget(x: &Basis, y: &Basis) -> usize {
        let weight = |b: &Basis| match b {
            Basis::Pos(w) | Basis::Neg(w) => w.letters().iter().map(|l| 2 + l.l as usize).sum(),
            _ => 1,
        };
        64 + 8 * (weight(x) + weight(y))
    }

    fn bb(&self, x: &Basis, y: &Basis, depth: usize) -> Result<MonsterElt> {
        use Basis::*;
        if depth > Self::budget(x, y) + 256 {
            return Err(Error::RecursionBudget(format!("[{x}, {y}]")));
        }
        let weight_act = |h: usize, z: &Basis, sign: i64| -> MonsterElt {
            let r = z.root();
            let wt = if h == 0 { r.a } else { r.b };
            MonsterElt::basis(z.clone(), q(sign * wt))
        };
        Ok(match (x, y) {
            (H1 | H2, H1 | H2) => MonsterElt::zero(),
            (H1, z) => weight_act(0, z, 1),
            (H2, z) => weight_act(1, z, 1),
            (z, H1) => weight_act(0, z, -1),
            (z, H2) => weight_act(1, z, -1),
            (E, E) | (F, F) => MonsterElt::zero(),
            (E, F) => MonsterElt::cartan(q(1), q(-1)),
            (F, E) => MonsterElt::cartan(q(-1), q(1)),
            (E, Pos(w)) => MonsterElt::from_pos(self.real_on_word(RealGen::E, true, w)),
            (F, Pos(w)) => MonsterElt::from_pos(self.real_on_word(RealGen::F, true, w)),
            (E, Neg(w)) => MonsterElt::from_neg(self.real_on_word(RealGen::E, false, w)),
            (F, Neg(w)) => MonsterElt::from_neg(self.real_on_word(RealGen::F, false, w)),
            (Pos(_) | Neg(_), E | F) => self.bb(y, x, depth + 1)?.neg(),
            (Pos(u), Pos(v)) => MonsterElt::from_pos(self.free.bracket_words(u, v)),
            (Neg(u), Neg(v)) => MonsterElt::from_neg(self.free.bracket_words(u, v)),
            (Pos(u), Neg(v)) => self.cross(u, v, depth + 1)?,
            (Neg(u), Pos(v)) => self.cross(v, u, depth + 1)?.neg(),
        })
    }

    fn bracket_basis_elt(&self, x: &Basis, z: &MonsterElt, depth: usize) -> Result<MonsterElt> {
        let mut out = MonsterElt::zero();
        for (y, c) in z.terms() {
            out.add_scaled(&self.bb(x, &y, depth + 1)?, &c);
        }
        Ok(out)
    }

    /// `[e_{-1}, P_w]` or `[f_{-1}, P_w]` for `w` over e-letters (`positive`)
    /// or f-letters. Both act by derivations preserving each free part.
    pub fn real_on_word(&self, which: RealGen, positive: bool, w: &Word) -> Free {
        let key = (which, positive, w.clone());
        if let Some(hit) = self.real_memo.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let out = self.free.derivation(w, &|x: &ExtIndex| match real_on_letter(which, positive, *x) {
            Some((c, y)) => Free::term(Word::letter(y), c),
            None => Free::zero(),
        });
        self.real_memo.lock().unwrap().insert(key, out.clone());
        out
    }

    /// `[e_{-1}, e_x]` etc. on a single letter, as an element.
    pub fn ad_real(&self, which: RealGen, x: ExtIndex, positive: bool) -> MonsterElt {
        let w = Word::letter(x);
        if positive {
            MonsterElt::from_pos(self.real_on_word(which, true, &w))
        } else {
            MonsterElt::from_neg(self.real_on_word(which, false, &w))
        }
    }

    /// `[P_u, P_v]` for `u` over e-letters and `v` over f-letters.
    pub fn cross_bracket(&self, u: &Word, v: &Word) -> Result<MonsterElt> {
        for x in u.letters().iter().chain(v.letters()) {
            if !self.cfg.supports(*x) {
                return Err(Error::InvalidArgument(format!("letter ({x}) is not supported by the caps")));
            }
        }
        self.cross(u, v, 0)
    }

    // Letter-letter: lower l on the e-side through e_l = [e_{-1}, e_{l-1}] / l,
    // then m on the f-side through f_m = [f_{-1}, f_{m-1}] / m (using
    // [e_{0}, f_{-1}] = 0), down to the generating relation at l = m = 0.
    // Words: standard factorization and Jacobi, the total length drops.
    fn cross(&self, u: &Word, v: &Word, depth: usize) -> Result<MonsterElt> {
        let key = (u.clone(), v.clone());
        if let Some(hit) = self.cross_memo.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let out = match (u.as_letter(), v.as_letter()) {
            (Some(&x), Some(&y)) => self.cross_letters(x, y, depth)?,
            (None, _) => {
                let (u1, u2) = u.std_factorize()?;
                // [[u1,u2],Y] = [u1,[u2,Y]] - [u2,[u1,Y]]
                let a = self.bracket_basis_elt(&Basis::Pos(u1.clone()), &self.cross(&u2, v, depth + 1)?, depth)?;
                let b = self.bracket_basis_elt(&Basis::Pos(u2), &self.cross(&u1, v, depth + 1)?, depth)?;
                a.sub(&b)
            }
            (Some(_), None) => {
                let (v1, v2) = v.std_factorize()?;
                // [X,[v1,v2]] = [[X,v1],v2] + [v1,[X,v2]]
                let a = self.cross(u, &v1, depth + 1)?;
                let a = self.bracket_basis_elt(&Basis::Neg(v2.clone()), &a, depth)?.neg();
                let b = self.bracket_basis_elt(&Basis::Neg(v1), &self.cross(u, &v2, depth + 1)?, depth)?;
                a.add(&b)
            }
        };
        self.cross_memo.lock().unwrap().insert(key, out.clone());
        Ok(out)
    }

    fn cross_letters(&self, x: ExtIndex, y: ExtIndex, depth: usize) -> Result<MonsterElt> {
        if x.l > 0 {
            let lower = x.with_l(x.l - 1);
            let inner = self.cross(&Word::letter(lower), &Word::letter(y), depth + 1)?;
            let mut out = self.bracket_basis_elt(&Basis::E, &inner, depth)?;
            if let Some((c, y1)) = real_on_letter(RealGen::E, false, y) {
                let t = self.cross(&Word::letter(lower), &Word::letter(y1), depth + 1)?;
                out.add_scaled(&t, &-c);
            }
            return Ok(out.scale(&Q::new(BigInt::one(), BigInt::from(x.l))));
        }
        if y.l > 0 {
            let inner = self.cross(&Word::letter(x), &Word::letter(y.with_l(y.l - 1)), depth + 1)?;
            let out = self.bracket_basis_elt(&Basis::F, &inner, depth)?;
            return Ok(out.scale(&Q::new(BigInt::one(), BigInt::from(y.l))));
        }
        if (x.j, x.k) == (y.j, y.k) {
            Ok(MonsterElt::cartan(q(-(x.j as i64)), q(-1)))
        } else {
            Ok(MonsterElt::zero())
        }
    }

    /// `[e_{l,jk}, f_{l,jk}]`, a Cartan element.
    pub fn h_pair(&self, x: ExtIndex) -> Result<MonsterElt> {
        self.cross_bracket(&Word::letter(x), &Word::letter(x))
    }

    /// Half the eigenvalue of `h_pair(x)` on `e_x`: the scalar `c` for which
    /// `(e_x, f_x / c)` spans a standard sl2 with the 2x2 normalization
    /// `e -> E12`, `f -> c E21`.
    pub fn h_pair_scalar(&self, x: ExtIndex) -> Result<Q> {
        let h = self.h_pair(x)?;
        let r = x.root();
        Ok((&h.cartan[0] * q(r.a) + &h.cartan[1] * q(r.b)) / q(2))
    }

    pub fn cache_sizes(&self) -> (usize, usize, usize) {
        (self.free.cache_len(), self.cross_memo.lock().unwrap().len(), self.real_memo.lock().unwrap().len())
    }
}

/// An algebra generator: `h1, h2, e_{-1}, f_{-1}, e_{jk}, f_{jk}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    H1,
    H2,
    E,
    F,
    Ejk(SimpleIndex),
    Fjk(SimpleIndex),
}

impl Generator {
    pub fn element(self) -> MonsterElt {
        match self {
            Generator::H1 => MonsterElt::h1(),
            Generator::H2 => MonsterElt::h2(),
            Generator::E => MonsterElt::e_real(),
            Generator::F => MonsterElt::f_real(),
            Generator::Ejk(s) => MonsterElt::e(ExtIndex::at(0, s.j, s.k)),
            Generator::Fjk(s) => MonsterElt::f(ExtIndex::at(0, s.j, s.k)),
        }
    }

    pub fn degree(self) -> i64 {
        match self {
            Generator::H1 | Generator::H2 => 0,
            Generator::E => 1,
            Generator::F => -1,
            Generator::Ejk(s) => s.degree(),
            Generator::Fjk(s) => -s.degree(),
        }
    }

    pub fn omega(self) -> Generator {
        match self {
            Generator::E => Generator::F,
            Generator::F => Generator::E,
            Generator::Ejk(s) => Generator::Fjk(s),
            Generator::Fjk(s) => Generator::Ejk(s),
            g => g,
        }
    }

    /// The generators whose degree lies within `|d| <= bound` under the caps.
    pub fn all_within(cfg: &SupportConfig, bound: i64) -> Vec<Generator> {
        let mut out = vec![Generator::H1, Generator::H2];
        if bound >= 1 {
            out.push(Generator::E);
            out.push(Generator::F);
        }
        for s in cfg.simple_within(bound) {
            out.push(Generator::Ejk(s));
            out.push(Generator::Fjk(s));
        }
        out.sort();
        out
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::H1 => write!(f, "h1"),
            Generator::H2 => write!(f, "h2"),
            Generator::E => write!(f, "e(-1)"),
            Generator::F => write!(f, "f(-1)"),
            Generator::Ejk(s) => write!(f, "e({},{})", s.j, s.k),
            Generator::Fjk(s) => write!(f, "f({},{})", s.j, s.k),
        }
    }
}

/// Outcome of one family of checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationCheck {
    pub id: String,
    pub statement: String,
    pub instances: usize,
    pub witnesses: Vec<String>,
}

impl RelationCheck {
    pub fn new(id: &str, statement: &str) -> Self {
        RelationCheck { id: id.into(), statement: statement.into(), instances: 0, witnesses: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.witnesses.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RelationReport {
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(RelationCheck::passed)
    }

    pub fn instances(&self) -> usize {
        self.checks.iter().map(|c| c.instances).sum()
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

type Lin = Vec<(Generator, Q)>;

/// Checks the generating relations on every supported index (simple
/// generators of degree `<= N`).
pub fn verify_defining_relations(m: &Monster) -> RelationReport {
    verify_relations_with(m.cfg(), &|g: &Generator| g.element(), &|a, b| m.bracket_exact(a, b))
}

/// Relation sweep for an arbitrary assignment `image` of the generators and
/// an arbitrary bracket. With the identity assignment this validates the
/// bracket; with a fixed bracket it checks that `image` extends to a
/// homomorphism.
pub fn verify_relations_with(
    cfg: &SupportConfig,
    image: &dyn Fn(&Generator) -> MonsterElt,
    bracket: &dyn Fn(&MonsterElt, &MonsterElt) -> MonsterElt,
) -> RelationReport {
    use Generator::*;
    let simple = cfg.simple_within(cfg.degree_bound);
    let one = Q::one;
    let lin = |t: &Lin| {
        let mut out = MonsterElt::zero();
        for (g, c) in t {
            out.add_scaled(&image(g), c);
        }
        out
    };
    let mut checks = Vec::new();
    let mut check = |id: &str, stmt: &str, cases: Vec<(Generator, Generator, Lin)>| {
        let mut rc = RelationCheck::new(id, stmt);
        for (a, b, rhs) in cases {
            rc.instances += 1;
            let got = bracket(&image(&a), &image(&b));
            let want = lin(&rhs);
            if got != want {
                rc.witnesses.push(format!("[{a},{b}]: got {got}, want {want}"));
            }
        }
        checks.push(rc);
    };
    check("D1", "[h1,h2] = 0", vec![(H1, H2, vec![])]);
    check("D2", "[h1,e(-1)] = e(-1)", vec![(H1, E, vec![(E, one())])]);
    check("D3", "[h2,e(-1)] = -e(-1)", vec![(H2, E, vec![(E, -one())])]);
    check("D4", "[h1,e_jk] = e_jk", simple.iter().map(|&s| (H1, Ejk(s), vec![(Ejk(s), one())])).collect());
    check("D5", "[h2,e_jk] = j e_jk", simple.iter().map(|&s| (H2, Ejk(s), vec![(Ejk(s), q(s.j as i64))])).collect());
    check("D6", "[h1,f(-1)] = -f(-1)", vec![(H1, F, vec![(F, -one())])]);
    check("D7", "[h2,f(-1)] = f(-1)", vec![(H2, F, vec![(F, one())])]);
    check("D8", "[h1,f_jk] = -f_jk", simple.iter().map(|&s| (H1, Fjk(s), vec![(Fjk(s), -one())])).collect());
    check("D9", "[h2,f_jk] = -j f_jk", simple.iter().map(|&s| (H2, Fjk(s), vec![(Fjk(s), q(-(s.j as i64)))])).collect());
    check("D10", "[e(-1),f(-1)] = h1 - h2", vec![(E, F, vec![(H1, one()), (H2, -one())])]);
    check("D11", "[e(-1),f_jk] = 0", simple.iter().map(|&s| (E, Fjk(s), vec![])).collect());
    check("D12", "[e_jk,f(-1)] = 0", simple.iter().map(|&s| (Ejk(s), F, vec![])).collect());
    let mut diag = Vec::new();
    for &s in &simple {
        for &t in &simple {
            let rhs = if s == t { vec![(H1, q(-(s.j as i64))), (H2, -one())] } else { vec![] };
            diag.push((Ejk(s), Fjk(t), rhs));
        }
    }
    check("D13", "[e_jk,f_pq] = -delta (j h1 + h2)", diag);
    for (id, stmt, x, y) in [("D14", "(ad e(-1))^j e_jk = 0", E, true), ("D15", "(ad f(-1))^j f_jk = 0", F, false)] {
        let mut rc = RelationCheck::new(id, stmt);
        for &s in &simple {
            rc.instances += 1;
            let mut v = image(&if y { Ejk(s) } else { Fjk(s) });
            let a = image(&x);
            for _ in 0..s.j {
                v = bracket(&a, &v);
            }
            if !v.is_zero() {
                rc.witnesses.push(format!("j = {}, k = {}: got {v}", s.j, s.k));
            }
        }
        checks.push(rc);
    }
    RelationReport { checks }
}
