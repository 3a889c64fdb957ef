//! The presented group: symbols, words, the relation catalog and the
//! validators.
//!
//! Two realizations are available. The adjoint one sends `X_{-1}(u)`,
//! `X_{l,jk}(u)`, `Y_{-1}(u)`, `H_1(s)`, `H_2(t)` to `exp(u ad e_{-1})`,
//! `exp(u ad e_{l,jk})`, `exp(u ad f_{-1})` and torus maps on the completion;
//! `Y_{l,jk}` has no such image. The 2x2 model handles a single string:
//! with `p = l+1`, `q = j-l` and `c = c_{lj}` (`p = 1`, `q = -1`, `c = 1` for
//! the real root), `X(u) = [[1,u],[0,1]]`, `Y(v) = [[1,0],[c v,1]]`,
//! `H_1(s) = diag(s^p, 1)`, `H_2(s) = diag(1, s^-q)`. Those exponents are
//! what the torus relations force.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::completion::TruncAut;
use crate::index::{ExtIndex, SupportConfig};
use crate::monster::{Monster, MonsterElt};
use crate::rational::{fmt_q, q, qpow, Q};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymKind {
    X,
    Y,
    H1,
    H2,
    /// `w~(s) = X(s) Y(-1/(c s)) X(s)`
    W,
}

/// One parametrized symbol. `index` is `None` for the real root (and for
/// `H_1`, `H_2`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenSymbol {
    pub kind: SymKind,
    pub index: Option<ExtIndex>,
    pub param: Q,
}

impl GenSymbol {
    pub fn new(kind: SymKind, index: Option<ExtIndex>, param: Q) -> Result<GenSymbol> {
        if matches!(kind, SymKind::H1 | SymKind::H2 | SymKind::W) && param.is_zero() {
            return Err(Error::InvalidArgument(format!("{kind:?} needs a nonzero parameter")));
        }
        if matches!(kind, SymKind::H1 | SymKind::H2) && index.is_some() {
            return Err(Error::InvalidArgument("torus symbols carry no index".into()));
        }
        Ok(GenSymbol { kind, index, param })
    }

    pub fn x_real(u: Q) -> GenSymbol {
        GenSymbol { kind: SymKind::X, index: None, param: u }
    }

    pub fn y_real(u: Q) -> GenSymbol {
        GenSymbol { kind: SymKind::Y, index: None, param: u }
    }

    pub fn x(i: ExtIndex, u: Q) -> GenSymbol {
        GenSymbol { kind: SymKind::X, index: Some(i), param: u }
    }

    pub fn y(i: ExtIndex, u: Q) -> GenSymbol {
        GenSymbol { kind: SymKind::Y, index: Some(i), param: u }
    }

    pub fn h1(s: Q) -> GenSymbol {
        GenSymbol { kind: SymKind::H1, index: None, param: s }
    }

    pub fn h2(s: Q) -> GenSymbol {
        GenSymbol { kind: SymKind::H2, index: None, param: s }
    }

    pub fn w(i: Option<ExtIndex>, s: Q) -> GenSymbol {
        GenSymbol { kind: SymKind::W, index: i, param: s }
    }
}

impl fmt::Display for GenSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = fmt_q(&self.param);
        let idx = match self.index {
            None => "-1".to_string(),
            Some(i) => i.to_string(),
        };
        match self.kind {
            SymKind::X => write!(f, "X({idx};{p})"),
            SymKind::Y => write!(f, "Y({idx};{p})"),
            SymKind::W => write!(f, "w({idx};{p})"),
            SymKind::H1 => write!(f, "H1({p})"),
            SymKind::H2 => write!(f, "H2({p})"),
        }
    }
}

/// Element of the free group on the symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupWord {
    letters: Vec<(GenSymbol, i8)>,
}

impl GroupWord {
    pub fn one() -> GroupWord {
        GroupWord::default()
    }

    pub fn gen(s: GenSymbol) -> GroupWord {
        GroupWord { letters: vec![(s, 1)] }
    }

    pub fn from_letters(letters: Vec<(GenSymbol, i8)>) -> Result<GroupWord> {
        if letters.iter().any(|(_, e)| *e != 1 && *e != -1) {
            return Err(Error::InvalidArgument("exponents must be +1 or -1".into()));
        }
        Ok(GroupWord { letters })
    }

    pub fn letters(&self) -> &[(GenSymbol, i8)] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn mul(&self, o: &GroupWord) -> GroupWord {
        let mut letters = self.letters.clone();
        letters.extend(o.letters.iter().cloned());
        GroupWord { letters }
    }

    pub fn product(words: &[GroupWord]) -> GroupWord {
        words.iter().fold(GroupWord::one(), |a, b| a.mul(b))
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord { letters: self.letters.iter().rev().map(|(s, e)| (s.clone(), -e)).collect() }
    }

    /// `(a, b) = a b a^-1 b^-1`.
    pub fn commutator(a: &GroupWord, b: &GroupWord) -> GroupWord {
        GroupWord::product(&[a.clone(), b.clone(), a.inverse(), b.inverse()])
    }

    /// Cancels adjacent `s s^-1` pairs.
    pub fn reduced(&self) -> GroupWord {
        let mut out: Vec<(GenSymbol, i8)> = Vec::with_capacity(self.letters.len());
        for (s, e) in &self.letters {
            if let Some((t, f)) = out.last() {
                if t == s && *f == -e {
                    out.pop();
                    continue;
                }
            }
            out.push((s.clone(), *e));
        }
        GroupWord { letters: out }
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced().len() == self.len()
    }

    /// Replaces every `w~` by its defining product.
    pub fn expand_w(&self) -> GroupWord {
        let mut out = GroupWord::one();
        for (s, e) in &self.letters {
            let piece = if s.kind == SymKind::W { w_expansion(s.index, &s.param) } else { GroupWord::gen(s.clone()) };
            out = out.mul(&if *e == 1 { piece } else { piece.inverse() });
        }
        out
    }

    /// Whether every symbol has an adjoint image.
    pub fn is_realizable(&self) -> bool {
        self.letters.iter().all(|(s, _)| !matches!((s.kind, s.index), (SymKind::Y | SymKind::W, Some(_))))
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, (s, e)) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{s}")?;
            if *e == -1 {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

/// `c_{lj} = (-1)^(l+1) binom(j-1, l) (l+1)(j-l)`.
pub fn c_const(l: u32, j: u32) -> Result<Q> {
    if l >= j {
        return Err(Error::InvalidArgument(format!("need 0 <= l < j, got l = {l}, j = {j}")));
    }
    let (l, j) = (l as i64, j as i64);
    let mut binom = num_bigint::BigInt::one();
    for i in 0..l {
        binom = binom * (j - 1 - i) / (i + 1);
    }
    let sign = if l % 2 == 0 { -1 } else { 1 };
    Ok(Q::from_integer(binom) * q(sign * (l + 1) * (j - l)))
}

fn string_constant(index: Option<ExtIndex>) -> Q {
    match index {
        None => Q::one(),
        Some(i) => c_const(i.l, i.j).expect("valid extended index"),
    }
}

fn w_expansion(index: Option<ExtIndex>, s: &Q) -> GroupWord {
    let c = string_constant(index);
    let (x, y): (fn(Option<ExtIndex>, Q) -> GenSymbol, fn(Option<ExtIndex>, Q) -> GenSymbol) = (
        |i, u| GenSymbol { kind: SymKind::X, index: i, param: u },
        |i, u| GenSymbol { kind: SymKind::Y, index: i, param: u },
    );
    GroupWord::product(&[
        GroupWord::gen(x(index, s.clone())),
        GroupWord::gen(y(index, -(s * &c).recip())),
        GroupWord::gen(x(index, s.clone())),
    ])
}

/// Adjoint image of a word: a product of exponentials and torus maps.
pub fn realize(word: &GroupWord, engine: Arc<Monster>, n: i64) -> Result<TruncAut> {
    let word = word.expand_w();
    let mut ops = Vec::new();
    for (s, e) in word.letters() {
        let g = match (s.kind, s.index) {
            (SymKind::X, None) => TruncAut::exp_ad(engine.clone(), &MonsterElt::e_real().scale(&s.param), n)?,
            (SymKind::Y, None) => TruncAut::exp_ad(engine.clone(), &MonsterElt::f_real().scale(&s.param), n)?,
            (SymKind::X, Some(i)) => TruncAut::exp_ad(engine.clone(), &MonsterElt::e(i).scale(&s.param), n)?,
            (SymKind::H1, _) => TruncAut::torus(engine.clone(), &s.param, &Q::one(), n)?,
            (SymKind::H2, _) => TruncAut::torus(engine.clone(), &Q::one(), &s.param, n)?,
            _ => return Err(Error::Unrealizable(format!("{s} has no adjoint realization"))),
        };
        let g = if *e == 1 { g } else { g.invert() };
        ops.extend(g.ops().iter().cloned());
    }
    TruncAut::from_ops(engine, n, ops)
}

/// Validation class of a relation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelClass {
    Adjoint,
    Mirror,
    Sl2,
    Unvalidated,
}

impl RelClass {
    pub fn name(self) -> &'static str {
        match self {
            RelClass::Adjoint => "ADJOINT",
            RelClass::Mirror => "MIRROR",
            RelClass::Sl2 => "SL2",
            RelClass::Unvalidated => "UNVALIDATED",
        }
    }
}

/// Which letters a template ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexSig {
    None,
    /// One letter `(l, j, k)`.
    One,
    /// One letter, only at the bottom of its string (`l = 0`).
    Bottom,
    /// One letter, only at the top of its string (`l = j - 1`).
    Top,
    /// Two letters.
    Two,
}

type Builder = fn(&[Q], &[ExtIndex]) -> (GroupWord, GroupWord);

pub struct RelationTemplate {
    pub id: &'static str,
    pub class: RelClass,
    pub block: &'static str,
    /// Parameter names; `s`, `t`, `sigma` range over nonzero values.
    pub params: &'static [&'static str],
    pub indices: IndexSig,
    pub lhs: &'static str,
    pub rhs: &'static str,
    /// Substitution that makes fractional powers integral, if any.
    pub restriction: Option<&'static str>,
    build: Builder,
}

impl RelationTemplate {
    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "class": self.class.name(),
            "block": self.block,
            "params": self.params,
            "indices": format!("{:?}", self.indices),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "restriction": self.restriction,
        })
    }

    pub fn instantiate(&self, params: &[Q], indices: &[ExtIndex]) -> Result<RelationInstance> {
        if params.len() != self.params.len() {
            return Err(Error::InvalidArgument(format!("{} takes {} parameters", self.id, self.params.len())));
        }
        for (name, v) in self.params.iter().zip(params) {
            if *name != "u" && *name != "v" && v.is_zero() {
                return Err(Error::InvalidArgument(format!("{}: parameter {name} must be nonzero", self.id)));
            }
        }
        let need = match self.indices {
            IndexSig::None => 0,
            IndexSig::Two => 2,
            _ => 1,
        };
        if indices.len() != need {
            return Err(Error::InvalidArgument(format!("{} takes {need} indices", self.id)));
        }
        match (self.indices, indices.first()) {
            (IndexSig::Bottom, Some(i)) if i.l != 0 => {
                return Err(Error::InvalidArgument(format!("{} needs l = 0", self.id)))
            }
            (IndexSig::Top, Some(i)) if i.l + 1 != i.j => {
                return Err(Error::InvalidArgument(format!("{} needs l = j - 1", self.id)))
            }
            _ => {}
        }
        let (lhs, rhs) = (self.build)(params, indices);
        Ok(RelationInstance {
            id: self.id.to_string(),
            class: self.class,
            params: params.to_vec(),
            indices: indices.to_vec(),
            lhs,
            rhs,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationInstance {
    pub id: String,
    pub class: RelClass,
    pub params: Vec<Q>,
    pub indices: Vec<ExtIndex>,
    pub lhs: GroupWord,
    pub rhs: GroupWord,
}

impl fmt::Display for RelationInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} = {}", self.id, self.lhs, self.rhs)
    }
}

fn g(s: GenSymbol) -> GroupWord {
    GroupWord::gen(s)
}

fn prod(ws: &[GroupWord]) -> GroupWord {
    GroupWord::product(ws)
}

fn conj(a: &GroupWord, b: &GroupWord) -> GroupWord {
    prod(&[a.clone(), b.clone(), a.inverse()])
}

fn xr(u: Q) -> GroupWord {
    g(GenSymbol::x_real(u))
}

fn yr(u: Q) -> GroupWord {
    g(GenSymbol::y_real(u))
}

fn h1(s: Q) -> GroupWord {
    g(GenSymbol::h1(s))
}

fn h2(s: Q) -> GroupWord {
    g(GenSymbol::h2(s))
}

fn wr(s: Q) -> GroupWord {
    g(GenSymbol::w(None, s))
}

fn xi(i: ExtIndex, u: Q) -> GroupWord {
    g(GenSymbol::x(i, u))
}

fn yi(i: ExtIndex, u: Q) -> GroupWord {
    g(GenSymbol::y(i, u))
}

fn wi(i: ExtIndex, s: Q) -> GroupWord {
    g(GenSymbol::w(Some(i), s))
}

fn pq(i: ExtIndex) -> (i64, i64) {
    (i.l as i64 + 1, i.j as i64 - i.l as i64)
}

fn cc(i: ExtIndex) -> Q {
    string_constant(Some(i))
}

fn mirror_sign(i: ExtIndex) -> Q {
    if (i.j - i.l - 1) % 2 == 0 {
        q(1)
    } else {
        q(-1)
    }
}

fn mirror_index(i: ExtIndex) -> ExtIndex {
    i.with_l(i.j - 1 - i.l)
}

/// The full catalog, in display order.
pub fn relations_catalog() -> Vec<RelationTemplate> {
    use IndexSig as I;
    use RelClass::*;
    const REAL: &str = "real GL2";
    const MIXED: &str = "real and imaginary";
    const WREAL: &str = "action of w~(-1)";
    const IMAG: &str = "imaginary GL2";
    vec![
        RelationTemplate {
            id: "R1", class: Adjoint, block: REAL, params: &["u", "v"], indices: I::None,
            lhs: "X(-1;u) X(-1;v)", rhs: "X(-1;u+v)", restriction: None,
            build: |p, _| (prod(&[xr(p[0].clone()), xr(p[1].clone())]), xr(&p[0] + &p[1])),
        },
        RelationTemplate {
            id: "R2", class: Adjoint, block: REAL, params: &["u", "v"], indices: I::None,
            lhs: "Y(-1;u) Y(-1;v)", rhs: "Y(-1;u+v)", restriction: None,
            build: |p, _| (prod(&[yr(p[0].clone()), yr(p[1].clone())]), yr(&p[0] + &p[1])),
        },
        RelationTemplate {
            id: "R3", class: Adjoint, block: REAL, params: &["s", "t"], indices: I::None,
            lhs: "H1(s) H1(t)", rhs: "H1(st)", restriction: None,
            build: |p, _| (prod(&[h1(p[0].clone()), h1(p[1].clone())]), h1(&p[0] * &p[1])),
        },
        RelationTemplate {
            id: "R4", class: Adjoint, block: REAL, params: &["s", "t"], indices: I::None,
            lhs: "H2(s) H2(t)", rhs: "H2(st)", restriction: None,
            build: |p, _| (prod(&[h2(p[0].clone()), h2(p[1].clone())]), h2(&p[0] * &p[1])),
        },
        RelationTemplate {
            id: "R5", class: Adjoint, block: REAL, params: &["s", "t"], indices: I::None,
            lhs: "H1(s) H2(t)", rhs: "H2(t) H1(s)", restriction: None,
            build: |p, _| (prod(&[h1(p[0].clone()), h2(p[1].clone())]), prod(&[h2(p[1].clone()), h1(p[0].clone())])),
        },
        RelationTemplate {
            id: "R6", class: Adjoint, block: REAL, params: &["u"], indices: I::None,
            lhs: "w(-1;1) X(-1;u) w(-1;1)^-1", rhs: "Y(-1;-u)", restriction: None,
            build: |p, _| (conj(&wr(Q::one()), &xr(p[0].clone())), yr(-&p[0])),
        },
        RelationTemplate {
            id: "R7", class: Adjoint, block: REAL, params: &["u"], indices: I::None,
            lhs: "w(-1;1) Y(-1;u) w(-1;1)^-1", rhs: "X(-1;-u)", restriction: None,
            build: |p, _| (conj(&wr(Q::one()), &yr(p[0].clone())), xr(-&p[0])),
        },
        RelationTemplate {
            id: "R8", class: Adjoint, block: REAL, params: &["s", "t"], indices: I::None,
            lhs: "Y(-1;-t) X(-1;s) Y(-1;t)", rhs: "X(-1;-1/t) Y(-1;-t^2 s) X(-1;1/t)", restriction: None,
            build: |p, _| {
                let (s, t) = (&p[0], &p[1]);
                (
                    prod(&[yr(-t), xr(s.clone()), yr(t.clone())]),
                    prod(&[xr(-t.recip()), yr(-(t * t * s)), xr(t.recip())]),
                )
            },
        },
        RelationTemplate {
            id: "R9", class: Adjoint, block: REAL, params: &["s"], indices: I::None,
            lhs: "w(-1;s) w(-1;1)", rhs: "H1(-s) H2(-1/s)", restriction: None,
            build: |p, _| (prod(&[wr(p[0].clone()), wr(Q::one())]), prod(&[h1(-&p[0]), h2(-p[0].recip())])),
        },
        RelationTemplate {
            id: "R10", class: Adjoint, block: REAL, params: &["s"], indices: I::None,
            lhs: "w(-1;1) H1(s) w(-1;1)^-1", rhs: "H2(s)", restriction: None,
            build: |p, _| (conj(&wr(Q::one()), &h1(p[0].clone())), h2(p[0].clone())),
        },
        RelationTemplate {
            id: "R11", class: Adjoint, block: REAL, params: &["s"], indices: I::None,
            lhs: "w(-1;1) H2(s) w(-1;1)^-1", rhs: "H1(s)", restriction: None,
            build: |p, _| (conj(&wr(Q::one()), &h2(p[0].clone())), h1(p[0].clone())),
        },
        RelationTemplate {
            id: "R12", class: Adjoint, block: REAL, params: &["s", "u"], indices: I::None,
            lhs: "H1(s) X(-1;u) H1(s)^-1", rhs: "X(-1;su)", restriction: None,
            build: |p, _| (conj(&h1(p[0].clone()), &xr(p[1].clone())), xr(&p[0] * &p[1])),
        },
        RelationTemplate {
            id: "R13", class: Adjoint, block: REAL, params: &["s", "u"], indices: I::None,
            lhs: "H2(s) X(-1;u) H2(s)^-1", rhs: "X(-1;u/s)", restriction: None,
            build: |p, _| (conj(&h2(p[0].clone()), &xr(p[1].clone())), xr(&p[1] / &p[0])),
        },
        RelationTemplate {
            id: "R14", class: Adjoint, block: REAL, params: &["s", "u"], indices: I::None,
            lhs: "H1(s) Y(-1;u) H1(s)^-1", rhs: "Y(-1;u/s)", restriction: None,
            build: |p, _| (conj(&h1(p[0].clone()), &yr(p[1].clone())), yr(&p[1] / &p[0])),
        },
        RelationTemplate {
            id: "R15", class: Adjoint, block: REAL, params: &["s", "u"], indices: I::None,
            lhs: "H2(s) Y(-1;u) H2(s)^-1", rhs: "Y(-1;su)", restriction: None,
            build: |p, _| (conj(&h2(p[0].clone()), &yr(p[1].clone())), yr(&p[0] * &p[1])),
        },
        RelationTemplate {
            id: "R16", class: Unvalidated, block: MIXED, params: &["u", "v"], indices: I::Two,
            lhs: "(X(l,j,k;u), Y(m,p,q;v))", rhs: "1", restriction: Some("j != p, or k != q, or |l - m| > 1"),
            build: |p, i| (GroupWord::commutator(&xi(i[0], p[0].clone()), &yi(i[1], p[1].clone())), GroupWord::one()),
        },
        RelationTemplate {
            id: "R17", class: Adjoint, block: MIXED, params: &["u", "v"], indices: I::One,
            lhs: "X(l,j,k;u+v)", rhs: "X(l,j,k;u) X(l,j,k;v)", restriction: None,
            build: |p, i| (xi(i[0], &p[0] + &p[1]), prod(&[xi(i[0], p[0].clone()), xi(i[0], p[1].clone())])),
        },
        RelationTemplate {
            id: "R18", class: Mirror, block: MIXED, params: &["u", "v"], indices: I::One,
            lhs: "Y(l,j,k;u+v)", rhs: "Y(l,j,k;u) Y(l,j,k;v)", restriction: None,
            build: |p, i| (yi(i[0], &p[0] + &p[1]), prod(&[yi(i[0], p[0].clone()), yi(i[0], p[1].clone())])),
        },
        RelationTemplate {
            id: "R19", class: Adjoint, block: MIXED, params: &["s", "t"], indices: I::Top,
            lhs: "(X(-1;s), X(j-1,j,k;t))", rhs: "1", restriction: None,
            build: |p, i| (GroupWord::commutator(&xr(p[0].clone()), &xi(i[0], p[1].clone())), GroupWord::one()),
        },
        RelationTemplate {
            id: "R20", class: Adjoint, block: MIXED, params: &["s", "t"], indices: I::Bottom,
            lhs: "(Y(-1;s), X(0,j,k;t))", rhs: "1", restriction: None,
            build: |p, i| (GroupWord::commutator(&yr(p[0].clone()), &xi(i[0], p[1].clone())), GroupWord::one()),
        },
        RelationTemplate {
            id: "R21", class: Mirror, block: MIXED, params: &["s", "t"], indices: I::Bottom,
            lhs: "(X(-1;s), Y(0,j,k;t))", rhs: "1", restriction: None,
            build: |p, i| (GroupWord::commutator(&xr(p[0].clone()), &yi(i[0], p[1].clone())), GroupWord::one()),
        },
        RelationTemplate {
            id: "R22", class: Mirror, block: MIXED, params: &["s", "t"], indices: I::Top,
            lhs: "(Y(-1;s), Y(j-1,j,k;t))", rhs: "1", restriction: None,
            build: |p, i| (GroupWord::commutator(&yr(p[0].clone()), &yi(i[0], p[1].clone())), GroupWord::one()),
        },
        RelationTemplate {
            id: "R23", class: Adjoint, block: WREAL, params: &["u"], indices: I::One,
            lhs: "w(-1;1) X(l,j,k;u) w(-1;1)^-1", rhs: "X(j-1-l,j,k;(-1)^(j-l-1) u)", restriction: None,
            build: |p, i| {
                (conj(&wr(Q::one()), &xi(i[0], p[0].clone())), xi(mirror_index(i[0]), mirror_sign(i[0]) * &p[0]))
            },
        },
        RelationTemplate {
            id: "R24", class: Mirror, block: WREAL, params: &["u"], indices: I::One,
            lhs: "w(-1;1) Y(l,j,k;u) w(-1;1)^-1", rhs: "Y(j-1-l,j,k;(-1)^(j-l-1) u)", restriction: None,
            build: |p, i| {
                (conj(&wr(Q::one()), &yi(i[0], p[0].clone())), yi(mirror_index(i[0]), mirror_sign(i[0]) * &p[0]))
            },
        },
        RelationTemplate {
            id: "R25", class: Adjoint, block: IMAG, params: &["s", "u"], indices: I::One,
            lhs: "H1(s) X(l,j,k;u) H1(s)^-1", rhs: "X(l,j,k;s^(l+1) u)", restriction: None,
            build: |p, i| {
                (conj(&h1(p[0].clone()), &xi(i[0], p[1].clone())), xi(i[0], qpow(&p[0], pq(i[0]).0) * &p[1]))
            },
        },
        RelationTemplate {
            id: "R26", class: Mirror, block: IMAG, params: &["s", "u"], indices: I::One,
            lhs: "H1(s) Y(l,j,k;u) H1(s)^-1", rhs: "Y(l,j,k;s^-(l+1) u)", restriction: None,
            build: |p, i| {
                (conj(&h1(p[0].clone()), &yi(i[0], p[1].clone())), yi(i[0], qpow(&p[0], -pq(i[0]).0) * &p[1]))
            },
        },
        RelationTemplate {
            id: "R27", class: Adjoint, block: IMAG, params: &["s", "u"], indices: I::One,
            lhs: "H2(s) X(l,j,k;u) H2(s)^-1", rhs: "X(l,j,k;s^(j-l) u)", restriction: None,
            build: |p, i| {
                (conj(&h2(p[0].clone()), &xi(i[0], p[1].clone())), xi(i[0], qpow(&p[0], pq(i[0]).1) * &p[1]))
            },
        },
        RelationTemplate {
            id: "R28", class: Mirror, block: IMAG, params: &["s", "u"], indices: I::One,
            lhs: "H2(s) Y(l,j,k;u) H2(s)^-1", rhs: "Y(l,j,k;s^-(j-l) u)", restriction: None,
            build: |p, i| {
                (conj(&h2(p[0].clone()), &yi(i[0], p[1].clone())), yi(i[0], qpow(&p[0], -pq(i[0]).1) * &p[1]))
            },
        },
        RelationTemplate {
            id: "R29", class: Sl2, block: IMAG, params: &["sigma"], indices: I::One,
            lhs: "w(l,j,k;s) w(l,j,k;1)", rhs: "H1((-s)^(1/(l+1))) H2((-s)^(1/(j-l)))",
            restriction: Some("s = -(-sigma)^((l+1)(j-l)); roots taken as (-sigma)^(j-l), (-sigma)^(l+1)"),
            build: |p, i| {
                let (a, b) = pq(i[0]);
                let ms = -&p[0];
                let s = -qpow(&ms, a * b);
                (prod(&[wi(i[0], s), wi(i[0], Q::one())]), prod(&[h1(qpow(&ms, b)), h2(qpow(&ms, a))]))
            },
        },
        RelationTemplate {
            id: "R30", class: Sl2, block: IMAG, params: &["s", "t"], indices: I::One,
            lhs: "Y(l,j,k;-t) X(l,j,k;s) Y(l,j,k;t)",
            rhs: "X(l,j,k;-1/(c t)) Y(l,j,k;-c t^2 s) X(l,j,k;1/(c t))", restriction: None,
            build: |p, i| {
                let (s, t, c) = (&p[0], &p[1], cc(i[0]));
                (
                    prod(&[yi(i[0], -t), xi(i[0], s.clone()), yi(i[0], t.clone())]),
                    prod(&[xi(i[0], -(&c * t).recip()), yi(i[0], -(&c * t * t * s)), xi(i[0], (&c * t).recip())]),
                )
            },
        },
        RelationTemplate {
            id: "R31", class: Sl2, block: IMAG, params: &["sigma"], indices: I::One,
            lhs: "w(l,j,k;1) H1(s) w(l,j,k;1)^-1", rhs: "H2(s^(-(l+1)/(j-l)))",
            restriction: Some("s = sigma^(j-l); the power is sigma^-(l+1)"),
            build: |p, i| {
                let (a, b) = pq(i[0]);
                (conj(&wi(i[0], Q::one()), &h1(qpow(&p[0], b))), h2(qpow(&p[0], -a)))
            },
        },
        RelationTemplate {
            id: "R32", class: Sl2, block: IMAG, params: &["sigma"], indices: I::One,
            lhs: "w(l,j,k;1) H2(s) w(l,j,k;1)^-1", rhs: "H1(s^(-(j-l)/(l+1)))",
            restriction: Some("s = sigma^(l+1); the power is sigma^-(j-l)"),
            build: |p, i| {
                let (a, b) = pq(i[0]);
                (conj(&wi(i[0], Q::one()), &h2(qpow(&p[0], a))), h1(qpow(&p[0], -b)))
            },
        },
        RelationTemplate {
            id: "R33", class: Sl2, block: IMAG, params: &["u"], indices: I::One,
            lhs: "w(l,j,k;1) X(l,j,k;u) w(l,j,k;1)^-1", rhs: "Y(l,j,k;-u/c)", restriction: None,
            build: |p, i| (conj(&wi(i[0], Q::one()), &xi(i[0], p[0].clone())), yi(i[0], -&p[0] / cc(i[0]))),
        },
        RelationTemplate {
            id: "R34", class: Sl2, block: IMAG, params: &["u"], indices: I::One,
            lhs: "w(l,j,k;1) Y(l,j,k;u) w(l,j,k;1)^-1", rhs: "X(l,j,k;-c u)", restriction: None,
            build: |p, i| (conj(&wi(i[0], Q::one()), &yi(i[0], p[0].clone())), xi(i[0], -cc(i[0]) * &p[0])),
        },
        RelationTemplate {
            id: "R35", class: Sl2, block: IMAG, params: &["sigma"], indices: I::One,
            lhs: "Y(l,j,k;s)",
            rhs: "X(l,j,k;1/(c s)) H1((-c s)^(-1/(l+1))) H2((-c s)^(-1/(j-l))) w(l,j,k;1) X(l,j,k;1/(c s))",
            restriction: Some("-c s = sigma^((l+1)(j-l)); the powers are sigma^-(j-l), sigma^-(l+1)"),
            build: |p, i| {
                let (a, b) = pq(i[0]);
                let c = cc(i[0]);
                let s = -qpow(&p[0], a * b) / &c;
                let x = (&c * &s).recip();
                (
                    yi(i[0], s),
                    prod(&[
                        xi(i[0], x.clone()),
                        h1(qpow(&p[0], -b)),
                        h2(qpow(&p[0], -a)),
                        wi(i[0], Q::one()),
                        xi(i[0], x),
                    ]),
                )
            },
        },
    ]
}

/// Catalog as JSON (an array in display order).
pub fn catalog_json() -> Value {
    Value::Array(relations_catalog().iter().map(RelationTemplate::to_json).collect())
}

/// All instances of a template over the sampled parameters and the
/// supported letters of degree `<= n`.
pub fn instances(t: &RelationTemplate, samples: &[Q], cfg: &SupportConfig, n: i64) -> Vec<RelationInstance> {
    let letters = cfg.letters_within(n);
    let mut params: Vec<Vec<Q>> = vec![vec![]];
    for name in t.params {
        let vals: Vec<Q> = samples.iter().filter(|v| !(v.is_zero() && *name != "u" && *name != "v")).cloned().collect();
        params = params.into_iter().flat_map(|p| vals.iter().map(move |v| [p.clone(), vec![v.clone()]].concat())).collect();
    }
    let index_sets: Vec<Vec<ExtIndex>> = match t.indices {
        IndexSig::None => vec![vec![]],
        IndexSig::One => letters.iter().map(|&i| vec![i]).collect(),
        IndexSig::Bottom => letters.iter().filter(|i| i.l == 0).map(|&i| vec![i]).collect(),
        IndexSig::Top => letters.iter().filter(|i| i.l + 1 == i.j).map(|&i| vec![i]).collect(),
        IndexSig::Two => letters.iter().flat_map(|&a| letters.iter().map(move |&b| vec![a, b])).collect(),
    };
    let mut out = Vec::new();
    for ix in &index_sets {
        for p in &params {
            if let Ok(inst) = t.instantiate(p, ix) {
                out.push(inst);
            }
        }
    }
    out
}

/// Image of an instance under the mirror involution: `X <-> Y` and
/// `H_i(s) -> H_i(1/s)`, after expanding `w~`.
pub fn mirror_relation(inst: &RelationInstance) -> Result<RelationInstance> {
    if inst.class != RelClass::Mirror {
        return Err(Error::Classification(format!("{} is not in the MIRROR class", inst.id)));
    }
    let mirror_word = |w: &GroupWord| -> GroupWord {
        let letters = w
            .expand_w()
            .letters()
            .iter()
            .map(|(s, e)| {
                let t = match s.kind {
                    SymKind::X => GenSymbol { kind: SymKind::Y, ..s.clone() },
                    SymKind::Y => GenSymbol { kind: SymKind::X, ..s.clone() },
                    SymKind::H1 | SymKind::H2 => GenSymbol { param: s.param.recip(), ..s.clone() },
                    SymKind::W => unreachable!("expanded"),
                };
                (t, *e)
            })
            .collect();
        GroupWord { letters }
    };
    Ok(RelationInstance {
        id: inst.id.clone(),
        class: RelClass::Adjoint,
        params: inst.params.clone(),
        indices: inst.indices.clone(),
        lhs: mirror_word(&inst.lhs),
        rhs: mirror_word(&inst.rhs),
    })
}

/// Outcome of validating one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceResult {
    pub instance: String,
    pub passed: bool,
    pub detail: Option<String>,
}

/// Adjoint validation: both sides as automorphisms, compared on generators
/// modulo degree `> n`.
pub fn validate_adjoint(inst: &RelationInstance, engine: Arc<Monster>, n: i64) -> Result<InstanceResult> {
    let concrete = match inst.class {
        RelClass::Adjoint => inst.clone(),
        RelClass::Mirror => mirror_relation(inst)?,
        c => return Err(Error::Classification(format!("{} is {} and has no adjoint validation", inst.id, c.name()))),
    };
    let a = realize(&concrete.lhs, engine.clone(), n)?;
    let b = realize(&concrete.rhs, engine, n)?;
    let passed = a.equal(&b)?;
    let detail = (!passed).then(|| first_difference(&a, &b)).flatten();
    Ok(InstanceResult { instance: inst.to_string(), passed, detail })
}

fn first_difference(a: &TruncAut, b: &TruncAut) -> Option<String> {
    let (ia, ib) = (a.images().ok()?, b.images().ok()?);
    let n = a.n();
    ia.iter().find_map(|(g, v)| {
        let (x, y) = (v.upto(n), ib[g].upto(n));
        (x != y).then(|| format!("on {g}: {x} vs {y}"))
    })
}

type Mat = [[Q; 2]; 2];

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn mat_inv(a: &Mat) -> Mat {
    let det = &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0];
    [[&a[1][1] / &det, -&a[0][1] / &det], [-&a[1][0] / &det, &a[0][0] / &det]]
}

fn mat_id() -> Mat {
    [[q(1), q(0)], [q(0), q(1)]]
}

/// Evaluates a word in the 2x2 model of one string (`None` for the real
/// root). Symbols from other strings are rejected.
pub fn sl2_matrix(word: &GroupWord, index: Option<ExtIndex>) -> Result<Mat> {
    let word = word.expand_w();
    if let Some((s, _)) = word.letters().iter().find(|(s, _)| matches!(s.kind, SymKind::X | SymKind::Y) && s.index != index) {
        return Err(Error::Classification(format!("{s} lies outside the string of the model")));
    }
    let (p, qq) = index.map_or((1, -1), pq);
    let c = string_constant(index);
    let mut acc = mat_id();
    for (s, e) in word.letters() {
        let m: Mat = match s.kind {
            SymKind::X => [[q(1), s.param.clone()], [q(0), q(1)]],
            SymKind::Y => [[q(1), q(0)], [&c * &s.param, q(1)]],
            SymKind::H1 => [[qpow(&s.param, p), q(0)], [q(0), q(1)]],
            SymKind::H2 => [[q(1), q(0)], [q(0), qpow(&s.param, -qq)]],
            SymKind::W => unreachable!("expanded"),
        };
        let m = if *e == 1 { m } else { mat_inv(&m) };
        acc = mat_mul(&acc, &m);
    }
    Ok(acc)
}

/// Validation in the 2x2 model of the string the instance lives on.
pub fn validate_sl2(inst: &RelationInstance) -> Result<InstanceResult> {
    let index = match inst.indices.as_slice() {
        [] => None,
        [i] => Some(*i),
        _ => return Err(Error::Classification(format!("{} involves several strings", inst.id))),
    };
    let a = sl2_matrix(&inst.lhs, index)?;
    let b = sl2_matrix(&inst.rhs, index)?;
    let passed = a == b;
    let show = |m: &Mat| format!("[[{},{}],[{},{}]]", fmt_q(&m[0][0]), fmt_q(&m[0][1]), fmt_q(&m[1][0]), fmt_q(&m[1][1]));
    let detail = (!passed).then(|| format!("{} vs {}", show(&a), show(&b)));
    Ok(InstanceResult { instance: inst.to_string(), passed, detail })
}

/// Lie-level evidence for the cross-string commutation family: the
/// relation predicts `[e_a, f_b] = 0` whenever it applies.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CommutationShadow {
    /// Pairs where the relation applies under the disjunctive reading.
    pub applicable: usize,
    /// Applicable pairs with `[e_a, f_b] != 0`.
    pub contradictions: Vec<String>,
    /// Pairs where the disjunctive and conjunctive readings disagree.
    pub readings_differ: Vec<String>,
    /// Same-string neighbours (`|l - m| = 1`), left open by the relation,
    /// with their nonzero brackets.
    pub open_neighbours: Vec<String>,
}

impl CommutationShadow {
    pub fn supported(&self) -> bool {
        self.contradictions.is_empty()
    }
}

pub fn commutation_shadow(m: &Monster, n: i64) -> CommutationShadow {
    let letters = m.cfg().letters_within(n);
    let mut out = CommutationShadow::default();
    for &a in &letters {
        for &b in &letters {
            let far = (a.l as i64 - b.l as i64).abs() > 1;
            let disj = a.j != b.j || a.k != b.k || far;
            let conj = (a.j != b.j && a.k != b.k) || far;
            let r = m.bracket_exact(&MonsterElt::e(a), &MonsterElt::f(b));
            if disj != conj {
                out.readings_differ.push(format!("({a}), ({b})"));
            }
            if disj {
                out.applicable += 1;
                if !r.is_zero() {
                    out.contradictions.push(format!("[e({a}), f({b})] = {r}"));
                }
            } else if a.l != b.l {
                out.open_neighbours.push(format!("[e({a}), f({b})] = {r}"));
            }
        }
    }
    out
}

/// Pairs of words with the same truncated action.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SeparationReport {
    pub words: usize,
    pub collisions: Vec<(String, String)>,
}

impl SeparationReport {
    pub fn separated(&self) -> bool {
        self.collisions.is_empty()
    }
}

/// Realizes each word and reports pairs acting identically modulo degree `> n`.
pub fn free_separation_test(words: &[GroupWord], engine: Arc<Monster>, n: i64) -> Result<SeparationReport> {
    let mut seen: HashMap<String, String> = HashMap::new();
    let mut rep = SeparationReport { words: words.len(), collisions: Vec::new() };
    for w in words {
        let t = realize(w, engine.clone(), n)?;
        let key = serde_json::to_string(&t.to_json()?["images"]).expect("serializable");
        match seen.get(&key) {
            Some(prev) => rep.collisions.push((prev.clone(), w.to_string())),
            None => {
                seen.insert(key, w.to_string());
            }
        }
    }
    Ok(rep)
}

/// All freely reduced words of length `<= max_len` over the symbols and
/// their inverses.
pub fn reduced_words(symbols: &[GenSymbol], max_len: usize) -> Vec<GroupWord> {
    let mut out = vec![GroupWord::one()];
    let mut frontier = vec![GroupWord::one()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for s in symbols {
                for e in [1i8, -1] {
                    if let Some((t, f)) = w.letters.last() {
                        if t == s && *f == -e {
                            continue;
                        }
                    }
                    let mut v = w.clone();
                    v.letters.push((s.clone(), e));
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Results of a suite run, grouped by relation id in catalog order.
#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    pub by_id: BTreeMap<(usize, String), Vec<InstanceResult>>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.by_id.values().flatten().all(|r| r.passed)
    }

    pub fn counts(&self) -> (usize, usize) {
        let all: Vec<&InstanceResult> = self.by_id.values().flatten().collect();
        (all.iter().filter(|r| r.passed).count(), all.len())
    }
}

/// Runs every ADJOINT and MIRROR template through the adjoint validator on
/// `threads` workers (all cores when `None`).
pub fn run_adjoint_suite(engine: Arc<Monster>, n: i64, samples: &[Q], threads: Option<usize>) -> Result<SuiteReport> {
    let mut rep = SuiteReport::default();
    for (pos, t) in relations_catalog().iter().enumerate() {
        if !matches!(t.class, RelClass::Adjoint | RelClass::Mirror) {
            continue;
        }
        let insts = instances(t, samples, engine.cfg(), n);
        let results = parallel_map(&insts, threads, |inst| validate_adjoint(inst, engine.clone(), n))?;
        rep.by_id.insert((pos, t.id.to_string()), results);
    }
    Ok(rep)
}

/// Runs the SL2 templates, plus the real block (`c = 1`), in the 2x2 model.
pub fn run_sl2_suite(cfg: &SupportConfig, n: i64, samples: &[Q]) -> Result<SuiteReport> {
    let mut rep = SuiteReport::default();
    for (pos, t) in relations_catalog().iter().enumerate() {
        let real_block = t.block == "real GL2";
        if t.class != RelClass::Sl2 && !real_block {
            continue;
        }
        let mut results = Vec::new();
        for inst in instances(t, samples, cfg, n) {
            results.push(validate_sl2(&inst)?);
        }
        rep.by_id.insert((pos, t.id.to_string()), results);
    }
    Ok(rep)
}

/// Order-preserving map over scoped worker threads.
pub fn parallel_map<T: Sync, R: Send>(
    items: &[T],
    threads: Option<usize>,
    f: impl Fn(&T) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let workers = threads.unwrap_or(cores).max(1).min(items.len().max(1));
    let chunk = items.len().div_ceil(workers).max(1);
    let parts: Vec<Result<Vec<R>>> = std::thread::scope(|sc| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| sc.spawn(|| c.iter().map(&f).collect::<Result<Vec<R>>>())).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(items.len());
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn x(l: u32, j: u32, k: u64) -> ExtIndex {
        ExtIndex::at(l, j, k)
    }

    #[test]
    fn c_const_values() {
        assert_eq!(c_const(0, 1).unwrap(), q(-1));
        for j in 1..8 {
            assert_eq!(c_const(0, j).unwrap(), q(-(j as i64)));
        }
        assert_eq!(c_const(1, 2).unwrap(), q(2));
        assert!(c_const(2, 2).is_err());
    }

    #[test]
    fn catalog_shape() {
        let cat = relations_catalog();
        assert_eq!(cat.len(), 35);
        for (i, t) in cat.iter().enumerate() {
            assert_eq!(t.id, format!("R{}", i + 1));
        }
        assert_eq!(cat[0].class, RelClass::Adjoint);
        assert_eq!(cat[20].class, RelClass::Mirror);
        assert_eq!(cat[32].class, RelClass::Sl2);
        assert_eq!(cat[15].class, RelClass::Unvalidated);
    }

    #[test]
    fn frozen_catalog_matches() {
        let frozen: Value = serde_json::from_str(include_str!("../data/relations.json")).unwrap();
        assert_eq!(frozen, catalog_json());
    }

    #[test]
    fn reduction_and_display() {
        let a = GroupWord::gen(GenSymbol::x(x(0, 1, 1), q(1)));
        let w = a.mul(&a.inverse());
        assert!(!w.is_reduced());
        assert!(w.reduced().is_empty());
        assert_eq!(a.mul(&GroupWord::gen(GenSymbol::h1(frac(1, 2)))).inverse().to_string(), "H1(1/2)^-1 X(0,1,1;1)^-1");
        assert_eq!(GroupWord::gen(GenSymbol::w(None, q(2))).to_string(), "w(-1;2)");
    }

    #[test]
    fn matrix_model_examples() {
        let w = GroupWord::gen(GenSymbol::w(Some(x(0, 2, 1)), q(3)));
        let m = sl2_matrix(&w, Some(x(0, 2, 1))).unwrap();
        assert_eq!(m, [[q(0), q(3)], [frac(-1, 3), q(0)]]);
        let ww = w.mul(&GroupWord::gen(GenSymbol::w(Some(x(0, 2, 1)), q(1))));
        assert_eq!(sl2_matrix(&ww, Some(x(0, 2, 1))).unwrap(), [[q(-3), q(0)], [q(0), frac(-1, 3)]]);
        let lhs = prod(&[yr(q(-1)), xr(q(1)), yr(q(1))]);
        assert_eq!(sl2_matrix(&lhs, None).unwrap(), [[q(2), q(1)], [q(-1), q(0)]]);
        let mixed = prod(&[xi(x(0, 1, 1), q(1)), xi(x(0, 2, 1), q(1))]);
        assert!(sl2_matrix(&mixed, Some(x(0, 1, 1))).is_err());
    }

    #[test]
    fn mirror_examples() {
        let cat = relations_catalog();
        let i = x(0, 2, 1);
        let r21 = cat[20].instantiate(&[q(1), q(2)], &[i]).unwrap();
        let m = mirror_relation(&r21).unwrap();
        assert_eq!(m.lhs, GroupWord::commutator(&yr(q(1)), &xi(i, q(2))));
        let r18 = cat[17].instantiate(&[q(1), q(2)], &[i]).unwrap();
        assert_eq!(mirror_relation(&r18).unwrap().lhs, xi(i, q(3)));
        let r22 = cat[21].instantiate(&[q(1), q(2)], &[x(1, 2, 1)]).unwrap();
        assert_eq!(mirror_relation(&r22).unwrap().lhs, GroupWord::commutator(&xr(q(1)), &xi(x(1, 2, 1), q(2))));
        assert!(mirror_relation(&cat[0].instantiate(&[q(1), q(1)], &[]).unwrap()).is_err());
    }

    #[test]
    fn adjoint_examples() {
        let m = Arc::new(Monster::new(SupportConfig::new(8, [(1, 1), (2, 1)]).unwrap()));
        let cat = relations_catalog();
        let r12 = cat[11].instantiate(&[q(3), q(2)], &[]).unwrap();
        assert!(validate_adjoint(&r12, m.clone(), 8).unwrap().passed);
        let r19 = cat[18].instantiate(&[q(1), q(1)], &[x(0, 1, 1)]).unwrap();
        assert!(validate_adjoint(&r19, m.clone(), 8).unwrap().passed);
        let r30 = cat[29].instantiate(&[q(1), q(1)], &[x(0, 1, 1)]).unwrap();
        assert!(matches!(validate_adjoint(&r30, m, 8), Err(Error::Classification(_))));
    }
}
