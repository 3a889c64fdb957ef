//! The positive completion modulo degree `> N` and the automorphisms acting
//! on it.
//!
//! A [`TruncAut`] is stored as a word of elementary operations (exponentials
//! of `ad`, torus maps, letter relabellings, raw generator maps). Generator
//! images are computed on demand with explicit precision: every
//! intermediate [`Approx`] knows up to which degree it is exact. The
//! positive side is cut at an internal window `W >= N` that grows until the
//! images are exact through degree `N`; the negative side is never cut.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Map, Value};

use crate::freelie::lyndon_basis;
use crate::index::ExtIndex;
use crate::monster::{Basis, Generator, Monster, MonsterElt, Window};
use crate::presentation::{GenSymbol, GroupWord};
use crate::rational::{factorial, fmt_q, q, qpow, Q};
use crate::{Error, Result};

/// Precision of an exact value.
pub const EXACT: i64 = i64::MAX;

/// A value known exactly in every degree `<= prec`. Terms above `prec`
/// are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct Approx {
    pub value: MonsterElt,
    pub prec: i64,
}

impl fmt::Debug for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.prec == EXACT {
            write!(f, "{}", self.value)
        } else {
            write!(f, "{} + O(deg > {})", self.value, self.prec)
        }
    }
}

impl Approx {
    pub fn exact(value: MonsterElt) -> Approx {
        Approx { value, prec: EXACT }
    }

    pub fn new(mut value: MonsterElt, prec: i64) -> Approx {
        if prec != EXACT {
            value.retain_degrees(|d| d <= prec);
        }
        Approx { value, prec }
    }

    pub fn zero() -> Approx {
        Approx::exact(MonsterElt::zero())
    }

    /// Lowest degree that may carry a nonzero term, counting the unknown tail.
    fn floor(&self) -> i64 {
        let tail = self.prec.saturating_add(1);
        self.value.min_degree().map_or(tail, |d| d.min(tail))
    }

    pub fn add_scaled(&mut self, o: &Approx, c: &Q) {
        self.prec = self.prec.min(o.prec);
        self.value.add_scaled(&o.value, c);
        if self.prec != EXACT {
            self.value.retain_degrees(|d| d <= self.prec);
        }
    }

    pub fn sub(&self, o: &Approx) -> Approx {
        let mut out = self.clone();
        out.add_scaled(o, &-Q::one());
        out
    }

    pub fn scale(&self, c: &Q) -> Approx {
        Approx { value: self.value.scale(c), prec: self.prec }
    }

    /// The value modulo degree `> n`.
    pub fn upto(&self, n: i64) -> MonsterElt {
        self.value.restricted(|d| d <= n)
    }
}

/// `[a, b]` with the positive side cut above `w`. Exact through
/// `min(Pa + floor(b), Pb + floor(a))`, and through `w` when anything was cut.
pub fn bracket_approx(m: &Monster, a: &Approx, b: &Approx, w: i64) -> Approx {
    let rule = a.prec.saturating_add(b.floor()).min(b.prec.saturating_add(a.floor()));
    let cut = rule.min(w);
    let r = m.bracket_window(&a.value, &b.value, Window::upper(cut));
    let prec = if r.truncated { cut } else { rule };
    Approx::new(r.value, prec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ExpKind {
    Zero,
    /// Every term of positive degree (`e_{-1}` and `u+`).
    Positive,
    /// A multiple of `e_{-1}` alone.
    RealE,
    /// A multiple of `f_{-1}` alone.
    RealF,
}

fn classify_exp(x: &MonsterElt) -> Result<ExpKind> {
    if x.is_zero() {
        return Ok(ExpKind::Zero);
    }
    if x.cartan.iter().any(|c| !c.is_zero()) {
        return Err(Error::Sector("Cartan elements act semisimply; use a torus map".into()));
    }
    if !x.neg.is_zero() {
        return Err(Error::Sector("exp(ad f_{l,jk}) is not an automorphism of the positive completion".into()));
    }
    let has_e = !x.real[0].is_zero();
    let has_f = !x.real[1].is_zero();
    match (has_e, has_f, x.pos.is_zero()) {
        (true, false, true) => Ok(ExpKind::RealE),
        (false, true, true) => Ok(ExpKind::RealF),
        (_, false, _) => Ok(ExpKind::Positive),
        (_, true, _) => Err(Error::Sector("f(-1) mixed with positive terms has no pro-summable exponential".into())),
    }
}

pub type ImageMap = BTreeMap<Generator, MonsterElt>;

/// One elementary automorphism.
#[derive(Clone, PartialEq, Eq)]
pub enum Op {
    /// `exp(ad x)` for `x` in the positive part or a multiple of `f_{-1}`.
    Exp(MonsterElt),
    /// Acts by `s^a t^b` on root `(a, b)`.
    Torus(Q, Q),
    /// `e_{l,jk} -> e_{l,j,map(k)}` and the same on f-letters, at one level `j`.
    Relabel { j: u32, map: BTreeMap<u64, u64> },
    /// The automorphism with the given (exact) generator images.
    Images(Arc<ImageMap>),
    /// Inverse of a unipotent generator map, by the Neumann series.
    InverseImages(Arc<ImageMap>),
}

impl Op {
    pub fn inverse(&self) -> Op {
        match self {
            Op::Exp(x) => Op::Exp(x.neg()),
            Op::Torus(s, t) => Op::Torus(s.recip(), t.recip()),
            Op::Relabel { j, map } => Op::Relabel { j: *j, map: map.iter().map(|(a, b)| (*b, *a)).collect() },
            Op::Images(m) => Op::InverseImages(m.clone()),
            Op::InverseImages(m) => Op::Images(m.clone()),
        }
    }

    fn json(&self) -> Value {
        match self {
            Op::Exp(x) => json!({"exp_ad": x.to_string()}),
            Op::Torus(s, t) => json!({"torus": [fmt_q(s), fmt_q(t)]}),
            Op::Relabel { j, map } => {
                let m: Map<String, Value> = map.iter().map(|(a, b)| (a.to_string(), Value::String(b.to_string()))).collect();
                json!({"relabel": {"level": j, "map": m}})
            }
            Op::Images(_) => json!("images"),
            Op::InverseImages(_) => json!("images^-1"),
        }
    }
}

impl fmt::Debug for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.json())
    }
}

/// Lowest degree reachable by `(ad f_{-1})^n` from an unknown term of degree `d`.
fn f_floor(d: i64, max_level: u32) -> i64 {
    if d <= 2 {
        return d - 2;
    }
    let jj = max_level as i64;
    let by_letters = (d - 3) / 2;
    let by_levels = if jj >= 1 { d * (jj - 1) / (2 * jj + 1) } else { 0 };
    d - by_letters.min(by_levels).max(0)
}

fn exp_series(m: &Monster, x: &MonsterElt, kind: ExpKind, y: &Approx, w: i64) -> Approx {
    let p = y.prec;
    let cut = match kind {
        ExpKind::Positive => w.min(p),
        _ => EXACT,
    };
    let mut sum = y.value.clone();
    let mut term = y.value.clone();
    let mut truncated = false;
    let mut n = 1i64;
    loop {
        let r = m.bracket_window(x, &term, Window::upper(cut));
        truncated |= r.truncated;
        term = r.value.scale(&Q::new(BigInt::one(), BigInt::from(n)));
        if term.is_zero() {
            break;
        }
        sum.add_assign(&term);
        n += 1;
    }
    let prec = match kind {
        ExpKind::Zero | ExpKind::RealE => p,
        ExpKind::Positive => {
            if truncated {
                cut
            } else {
                p
            }
        }
        ExpKind::RealF => {
            if p == EXACT {
                EXACT
            } else {
                p.min(f_floor(p + 1, m.cfg().max_level()) - 1)
            }
        }
    };
    Approx::new(sum, prec)
}

fn torus_apply(s: &Q, t: &Q, y: &MonsterElt) -> MonsterElt {
    let mut out = MonsterElt::zero();
    for (b, c) in y.terms() {
        let r = b.root();
        out.add_term(b, c * qpow(s, r.a) * qpow(t, r.b));
    }
    out
}

fn relabel_apply(m: &Monster, j: u32, map: &BTreeMap<u64, u64>, y: &MonsterElt) -> MonsterElt {
    let f = |x: &ExtIndex| if x.j == j { x.with_k(map.get(&x.k).copied().unwrap_or(x.k)) } else { *x };
    y.map_letters(m.free(), &f)
}

struct ImageEval<'a> {
    m: &'a Monster,
    map: &'a ImageMap,
    w: i64,
    memo: HashMap<Basis, Approx>,
}

impl ImageEval<'_> {
    fn gen(&self, g: Generator) -> Result<Approx> {
        self.map
            .get(&g)
            .map(|v| Approx::exact(v.clone()))
            .ok_or_else(|| Error::InvalidArgument(format!("no image for generator {g}")))
    }

    fn basis(&mut self, b: &Basis) -> Result<Approx> {
        if let Some(hit) = self.memo.get(b) {
            return Ok(hit.clone());
        }
        let out = match b {
            Basis::H1 => self.gen(Generator::H1)?,
            Basis::H2 => self.gen(Generator::H2)?,
            Basis::E => self.gen(Generator::E)?,
            Basis::F => self.gen(Generator::F)?,
            Basis::Pos(w) | Basis::Neg(w) => {
                let pos = matches!(b, Basis::Pos(_));
                match w.std_factorize() {
                    Err(_) => {
                        let x = w.letters()[0];
                        let s = x.simple();
                        let (g, real) =
                            if pos { (Generator::Ejk(s), Generator::E) } else { (Generator::Fjk(s), Generator::F) };
                        let mut v = self.gen(g)?;
                        let r = self.gen(real)?;
                        for _ in 0..x.l {
                            v = bracket_approx(self.m, &r, &v, self.w);
                        }
                        v.scale(&factorial(x.l as u64).recip())
                    }
                    Ok((u, v)) => {
                        let wrap = |w| if pos { Basis::Pos(w) } else { Basis::Neg(w) };
                        let a = self.basis(&wrap(u))?;
                        let c = self.basis(&wrap(v))?;
                        bracket_approx(self.m, &a, &c, self.w)
                    }
                }
            }
        };
        self.memo.insert(b.clone(), out.clone());
        Ok(out)
    }

    fn apply(&mut self, y: &Approx) -> Result<Approx> {
        let mut out = Approx::exact(MonsterElt::zero());
        for (b, c) in y.value.terms() {
            let v = self.basis(&b)?;
            out.add_scaled(&v, &c);
        }
        if y.prec != EXACT {
            out.prec = out.prec.min(self.tail_floor(y.prec.saturating_add(1)) - 1);
            let p = out.prec;
            out.value.retain_degrees(|d| d <= p);
        }
        Ok(out)
    }

    // The unknown tail of the input sits in positive degrees `>= from`. Every
    // positive basis vector of degree `D` is a bracket of letters built from
    // `e_{-1}` and the `e_{jk}`, so its image has degree at least `rho * D`
    // where `rho` is the least ratio (lowest image degree / degree) over
    // those generators.
    fn tail_floor(&self, from: i64) -> i64 {
        let rho = self
            .map
            .iter()
            .filter(|(g, _)| g.degree() > 0)
            .filter_map(|(g, v)| v.min_degree().map(|d| Q::new(BigInt::from(d), BigInt::from(g.degree()))))
            .min();
        match rho {
            None => EXACT,
            Some(r) if !r.is_positive() => i64::MIN,
            Some(r) => {
                let f = (r * q(from)).ceil().to_integer();
                i64::try_from(f).unwrap_or(EXACT)
            }
        }
    }
}

fn apply_op(m: &Monster, op: &Op, y: &Approx, w: i64) -> Result<Approx> {
    Ok(match op {
        Op::Exp(x) => exp_series(m, x, classify_exp(x)?, y, w),
        Op::Torus(s, t) => Approx { value: torus_apply(s, t, &y.value), prec: y.prec },
        Op::Relabel { j, map } => Approx { value: relabel_apply(m, *j, map, &y.value), prec: y.prec },
        Op::Images(map) => ImageEval { m, map, w, memo: HashMap::new() }.apply(y)?,
        Op::InverseImages(map) => {
            let mut ev = ImageEval { m, map, w, memo: HashMap::new() };
            // g^-1 = sum_n (id - g)^n
            let mut sum = y.clone();
            let mut z = y.clone();
            let budget = (w.saturating_sub(z.floor())).clamp(0, 10_000) + 2;
            let mut steps = 0;
            while !z.value.is_zero() {
                let gz = ev.apply(&z)?;
                z = z.sub(&gz);
                z = Approx::new(z.value.restricted(|d| d <= w), z.prec.min(w));
                sum.add_scaled(&z, &Q::one());
                steps += 1;
                if steps > budget {
                    return Err(Error::NotUnipotent("Neumann series does not terminate".into()));
                }
            }
            sum
        }
    })
}

/// Automorphism of the completion known modulo degree `> N`.
#[derive(Clone)]
pub struct TruncAut {
    n: i64,
    engine: Arc<Monster>,
    /// Rightmost acts first.
    ops: Vec<Op>,
    images: OnceLock<std::result::Result<Arc<Images>, Error>>,
}

pub type Images = BTreeMap<Generator, Approx>;

impl fmt::Debug for TruncAut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruncAut").field("n", &self.n).field("ops", &self.ops).finish()
    }
}

/// Filtration level of an automorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Level {
    pub level: i64,
    /// The bound comes from the window rather than from a visible term.
    pub window_limited: bool,
}

impl TruncAut {
    fn with_ops(engine: Arc<Monster>, n: i64, ops: Vec<Op>) -> Result<TruncAut> {
        if n < 1 {
            return Err(Error::InvalidArgument(format!("window must be >= 1, got {n}")));
        }
        Ok(TruncAut { n, engine, ops, images: OnceLock::new() })
    }

    pub(crate) fn from_ops(engine: Arc<Monster>, n: i64, ops: Vec<Op>) -> Result<TruncAut> {
        Self::with_ops(engine, n, ops)
    }

    pub fn identity(engine: Arc<Monster>, n: i64) -> Result<TruncAut> {
        Self::with_ops(engine, n, Vec::new())
    }

    /// `exp(ad x)`. Accepts `x` in `n+` (pro-summable) or a multiple of `f_{-1}`
    /// (locally nilpotent).
    pub fn exp_ad(engine: Arc<Monster>, x: &MonsterElt, n: i64) -> Result<TruncAut> {
        let kind = classify_exp(x)?;
        for l in x.letters() {
            if !engine.cfg().supports(l) {
                return Err(Error::InvalidArgument(format!("letter ({l}) is not supported by the caps")));
            }
        }
        let ops = if kind == ExpKind::Zero { vec![] } else { vec![Op::Exp(x.clone())] };
        Self::with_ops(engine, n, ops)
    }

    pub fn torus(engine: Arc<Monster>, s: &Q, t: &Q, n: i64) -> Result<TruncAut> {
        if s.is_zero() || t.is_zero() {
            return Err(Error::InvalidArgument("torus parameters must be nonzero".into()));
        }
        Self::with_ops(engine, n, vec![Op::Torus(s.clone(), t.clone())])
    }

    /// Relabelling of the k-index at one level; `map` must be a bijection of
    /// its support within the caps.
    pub fn relabel(engine: Arc<Monster>, j: u32, map: BTreeMap<u64, u64>, n: i64) -> Result<TruncAut> {
        let mut image: Vec<u64> = map.values().copied().collect();
        image.sort();
        let keys: Vec<u64> = map.keys().copied().collect();
        if image != keys {
            return Err(Error::InvalidArgument("relabelling is not a bijection of its support".into()));
        }
        if let Some(&k) = keys.iter().find(|&&k| k == 0 || k > engine.cfg().cap(j)) {
            return Err(Error::InvalidArgument(format!("index {k} at level {j} exceeds the cap")));
        }
        let map: BTreeMap<u64, u64> = map.into_iter().filter(|(a, b)| a != b).collect();
        let ops = if map.is_empty() { vec![] } else { vec![Op::Relabel { j, map }] };
        Self::with_ops(engine, n, ops)
    }

    /// Automorphism given directly by generator images (taken as exact).
    pub fn from_images(engine: Arc<Monster>, n: i64, images: ImageMap) -> Result<TruncAut> {
        for g in Generator::all_within(engine.cfg(), n) {
            if !images.contains_key(&g) {
                return Err(Error::InvalidArgument(format!("missing image of {g}")));
            }
        }
        Self::with_ops(engine, n, vec![Op::Images(Arc::new(images))])
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn engine(&self) -> &Arc<Monster> {
        &self.engine
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    /// Largest `|degree|` of a negative generator in the window.
    pub fn margin(&self) -> i64 {
        Generator::all_within(self.engine.cfg(), self.n).iter().map(|g| -g.degree()).max().unwrap_or(0).max(1)
    }

    fn check_compatible(&self, o: &TruncAut) -> Result<()> {
        if self.n != o.n {
            return Err(Error::WindowMismatch(self.n, o.n));
        }
        if self.engine.cfg() != o.engine.cfg() {
            return Err(Error::InvalidArgument("automorphisms use different support configurations".into()));
        }
        Ok(())
    }

    /// `self o other`.
    pub fn compose(&self, o: &TruncAut) -> Result<TruncAut> {
        self.check_compatible(o)?;
        let mut ops = self.ops.clone();
        ops.extend(o.ops.iter().cloned());
        Self::with_ops(self.engine.clone(), self.n, ops)
    }

    pub fn invert(&self) -> TruncAut {
        let ops = self.ops.iter().rev().map(Op::inverse).collect();
        TruncAut { n: self.n, engine: self.engine.clone(), ops, images: OnceLock::new() }
    }

    /// Applies the automorphism to an approximate input at internal window `w`.
    pub fn apply_at(&self, y: &Approx, w: i64) -> Result<Approx> {
        let mut v = y.clone();
        for op in self.ops.iter().rev() {
            v = apply_op(&self.engine, op, &v, w)?;
        }
        Ok(v)
    }

    /// `self(y)` exact through degree `target`.
    pub fn apply(&self, y: &MonsterElt, target: i64) -> Result<Approx> {
        adaptive(target, |w| {
            let r = self.apply_at(&Approx::exact(y.clone()), w)?;
            let p = r.prec;
            Ok((r, p))
        })
    }

    /// Images of all generators of degree `<= N`, exact through degree `N`.
    pub fn images(&self) -> Result<Arc<Images>> {
        self.images
            .get_or_init(|| {
                let mut out = Images::new();
                for g in Generator::all_within(self.engine.cfg(), self.n) {
                    let v = self.apply(&g.element(), self.n)?;
                    out.insert(g, Approx::new(v.value, self.n));
                }
                Ok(Arc::new(out))
            })
            .clone()
    }

    /// Agreement of all generator images modulo degree `> N`.
    pub fn equal(&self, o: &TruncAut) -> Result<bool> {
        self.check_compatible(o)?;
        let (a, b) = (self.images()?, o.images()?);
        Ok(a.iter().all(|(g, v)| v.upto(self.n) == b[g].upto(self.n)))
    }

    pub fn is_identity(&self) -> Result<bool> {
        Ok(self.images()?.iter().all(|(g, v)| v.upto(self.n) == g.element().restricted(|d| d <= self.n)))
    }

    /// Largest `i` with `g(y) - y` in degrees `>= deg(y) + i` for every
    /// generator `y`, as far as the window shows it.
    pub fn filtration_level(&self) -> Result<Level> {
        let mut visible = i64::MAX;
        let mut hidden = i64::MAX;
        for (g, v) in self.images()?.iter() {
            let k = g.degree();
            let diff = v.upto(self.n).sub(&g.element().restricted(|d| d <= self.n));
            match diff.min_degree() {
                Some(d) => visible = visible.min(d - k),
                None => hidden = hidden.min(self.n - k + 1),
            }
        }
        let level = visible.min(hidden).min(self.n);
        Ok(Level { level, window_limited: visible > level })
    }

    /// Membership in `U_i` as far as the window shows.
    pub fn in_level(&self, i: i64) -> Result<bool> {
        for (g, v) in self.images()?.iter() {
            let k = g.degree();
            let diff = v.upto(self.n).sub(&g.element().restricted(|d| d <= self.n));
            if diff.min_degree().is_some_and(|d| d < k + i) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Logarithm exact through degree `target`.
    pub fn log_upto(&self, target: i64) -> Result<MonsterElt> {
        if !self.in_level(1)? {
            return Err(Error::NotUnipotent("automorphism does not lie in U_1".into()));
        }
        let h1 = MonsterElt::h1();
        let d = adaptive(target, |w| {
            // D(h1) = sum (-1)^(n+1)/n (g - id)^n h1
            let mut z = self.apply_at(&Approx::exact(h1.clone()), w)?.sub(&Approx::exact(h1.clone()));
            let mut sum = Approx::zero();
            let mut n = 1i64;
            while !z.value.is_zero() {
                let sign = if n % 2 == 1 { q(1) } else { q(-1) };
                sum.add_scaled(&z, &(sign / q(n)));
                let gz = self.apply_at(&z, w)?;
                z = gz.sub(&z);
                n += 1;
                if n > w.saturating_add(64) {
                    return Err(Error::NotUnipotent("logarithm series does not terminate".into()));
                }
            }
            let p = sum.prec;
            Ok((sum, p))
        })?;
        let mut x = MonsterElt::zero();
        for (b, c) in d.upto(target).terms() {
            let a = b.root().a;
            if a < 1 {
                return Err(Error::NotUnipotent(format!("logarithm has a component {b} outside n+")));
            }
            x.add_term(b, -c / q(a));
        }
        Ok(x)
    }

    /// `log g` in `n+`, returned through degree `N + M` (`M` the margin) so
    /// that `exp_ad` of the result reproduces `g` in the window.
    pub fn log_unipotent(&self) -> Result<MonsterElt> {
        self.log_upto(self.n + self.margin())
    }

    /// Adjoint action on `n+`, through degree `N + M`.
    #[allow(non_snake_case)]
    pub fn Ad(&self, x: &MonsterElt) -> Result<MonsterElt> {
        if !x.cartan.iter().all(Zero::is_zero) || !x.real[1].is_zero() || !x.neg.is_zero() {
            return Err(Error::Sector("Ad is defined on the positive part".into()));
        }
        let t = self.n + self.margin();
        Ok(self.apply(x, t)?.upto(t))
    }

    /// Checks `g[a,b] = [ga, gb]` modulo degree `> N` on pairs whose bracket
    /// is exact in the window.
    pub fn aut_check(&self, pairs: &[(MonsterElt, MonsterElt)]) -> Result<AutCheckReport> {
        let m = &self.engine;
        let n = self.n;
        let mut rep = AutCheckReport::default();
        for (a, b) in pairs {
            let ab = m.bracket_window(a, b, Window::symmetric(n));
            if ab.truncated {
                rep.skipped += 1;
                continue;
            }
            rep.checked += 1;
            let lhs = self.apply(&ab.value, n)?.upto(n);
            let ga0 = self.apply(a, n)?;
            let gb0 = self.apply(b, n)?;
            let la = ga0.floor().min(0);
            let lb = gb0.floor().min(0);
            let ga = self.apply(a, n - lb)?;
            let gb = self.apply(b, n - la)?;
            let r = bracket_approx(m, &ga, &gb, n);
            if r.prec < n {
                return Err(Error::Precision { got: r.prec, want: n });
            }
            let rhs = r.upto(n);
            if lhs != rhs {
                rep.failures.push(format!("[{a}, {b}]: g[a,b] = {lhs}, [ga,gb] = {rhs}"));
            }
        }
        Ok(rep)
    }

    /// Deterministic JSON: sorted keys, rationals as strings.
    pub fn to_json(&self) -> Result<Value> {
        let images = self.images()?;
        let mut im = Map::new();
        for (g, v) in images.iter() {
            im.insert(g.to_string(), elt_json(&v.upto(self.n)));
        }
        let caps: Map<String, Value> =
            self.engine.cfg().caps().iter().map(|(j, k)| (j.to_string(), Value::from(*k))).collect();
        Ok(json!({
            "degree_bound": self.n,
            "caps": caps,
            "word": self.ops.iter().map(Op::json).collect::<Vec<_>>(),
            "images": im,
        }))
    }
}

/// Element as a JSON object `basis term -> "p/q"`.
pub fn elt_json(e: &MonsterElt) -> Value {
    let m: Map<String, Value> = e.terms().into_iter().map(|(b, c)| (b.to_string(), Value::String(fmt_q(&c)))).collect();
    Value::Object(m)
}

/// Grows the internal window until `f` reports precision `>= target`.
fn adaptive<T>(target: i64, f: impl Fn(i64) -> Result<(T, i64)>) -> Result<T> {
    let mut w = target;
    let limit = target.saturating_mul(3).saturating_add(24);
    loop {
        let (v, p) = f(w)?;
        if p >= target {
            return Ok(v);
        }
        if w >= limit {
            return Err(Error::Precision { got: p, want: target });
        }
        w = (w + (target - p).max(2)).min(limit);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AutCheckReport {
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
}

impl AutCheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Basis vectors of `|degree| <= n` built from the supported letters:
/// generators of `gl2`, every letter, and Lyndon words up to `max_len` letters.
pub fn sample_basis(m: &Monster, n: i64, max_len: usize) -> Vec<MonsterElt> {
    let letters = m.cfg().letters_within(n);
    let mut out = vec![MonsterElt::h1(), MonsterElt::h2(), MonsterElt::e_real(), MonsterElt::f_real()];
    for d in 1..=n {
        for w in lyndon_basis(&letters, d) {
            if w.len() <= max_len {
                out.push(Basis::Pos(w.clone()).element());
                out.push(Basis::Neg(w).element());
            }
        }
    }
    out
}

/// Random pairs of basis vectors whose bracket stays in `|degree| <= n`.
pub fn sample_pairs(m: &Monster, n: i64, count: usize, rng: &mut impl Rng) -> Vec<(MonsterElt, MonsterElt)> {
    let basis = sample_basis(m, n, 3);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count && tries < 100 * count + 100 {
        tries += 1;
        let a = basis.choose(rng).unwrap();
        let b = basis.choose(rng).unwrap();
        let d = a.min_degree().unwrap() + b.min_degree().unwrap();
        if d.abs() <= n {
            out.push((a.clone(), b.clone()));
        }
    }
    out
}

/// Word in `X_{-1}(u)`, `X_{l,jk}(u)` and group commutators that agrees with
/// `g` modulo `U_{i+1}`.
///
/// Degree by degree: with `h = word^-1 g` in `U_d`, the degree-`d` part of
/// `log h` is read off `(h - id) h1`. Each Lyndon term `c P_w` is realized by
/// `G(w, c)`: the letter exponential for a letter, and the group commutator
/// `(G(u, 1), G(v, c))` for `w = uv` in standard factorization, which agrees
/// with `exp(c ad P_w)` modulo the next filtration step.
pub fn approximate_by_generators(g: &TruncAut, i: i64) -> Result<GroupWord> {
    if i > g.n {
        return Err(Error::InvalidArgument(format!("level {i} exceeds the window {}", g.n)));
    }
    if !g.in_level(1)? {
        return Err(Error::NotUnipotent("automorphism does not lie in U_1".into()));
    }
    let engine = g.engine.clone();
    let mut word = GroupWord::one();
    for d in 1..=i {
        let w = crate::presentation::realize(&word, engine.clone(), g.n)?;
        let h = w.invert().compose(g)?;
        let x = h.log_upto(d)?.degree_part(d);
        for (b, c) in x.terms() {
            match b {
                Basis::E => word = word.mul(&GroupWord::gen(GenSymbol::x_real(c))),
                Basis::Pos(w) => word = word.mul(&commutator_word(&w, &c)),
                _ => return Err(Error::NotUnipotent(format!("unexpected component {b} in the logarithm"))),
            }
        }
    }
    Ok(word)
}

fn commutator_word(w: &crate::monster::Word, c: &Q) -> GroupWord {
    match w.std_factorize() {
        Err(_) => GroupWord::gen(GenSymbol::x(w.letters()[0], c.clone())),
        Ok((u, v)) => GroupWord::commutator(&commutator_word(&u, &Q::one()), &commutator_word(&v, c)),
    }
}

/// Random element of `U_1` as a product of letter exponentials `X(u)`.
pub fn random_unipotent_word(m: &Monster, n: i64, len: usize, rng: &mut impl Rng) -> GroupWord {
    let mut letters: Vec<Option<ExtIndex>> = m.cfg().letters_within(n).into_iter().map(Some).collect();
    letters.push(None);
    let mut word = GroupWord::one();
    for _ in 0..len {
        let x = *letters.choose(rng).unwrap();
        let mut u = 0;
        while u == 0 {
            u = rng.gen_range(-3i64..=3);
        }
        let sym = match x {
            None => GenSymbol::x_real(q(u)),
            Some(x) => GenSymbol::x(x, q(u)),
        };
        word = word.mul(&GroupWord::gen(sym));
    }
    word
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::SupportConfig;
    use crate::rational::frac;

    fn engine(n: i64, caps: &[(u32, u64)]) -> Arc<Monster> {
        Arc::new(Monster::new(SupportConfig::new(n, caps.iter().copied()).unwrap()))
    }

    fn x(l: u32, j: u32, k: u64) -> ExtIndex {
        ExtIndex::at(l, j, k)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let m = engine(8, &[(1, 2), (2, 1)]);
        let g = TruncAut::exp_ad(m.clone(), &MonsterElt::zero(), 8).unwrap();
        assert!(g.is_identity().unwrap());
        assert!(g.equal(&TruncAut::identity(m, 8).unwrap()).unwrap());
    }

    #[test]
    fn nilpotent_real_series() {
        let m = engine(8, &[(1, 1)]);
        let u = q(3);
        let g = TruncAut::exp_ad(m, &MonsterElt::e_real().scale(&u), 8).unwrap();
        let im = g.apply(&MonsterElt::f_real(), 8).unwrap();
        assert_eq!(im.prec, EXACT);
        let mut want = MonsterElt::f_real();
        want.add_assign(&MonsterElt::cartan(u.clone(), -u.clone()));
        want.add_assign(&MonsterElt::e_real().scale(&-(&u * &u)));
        assert_eq!(im.value, want);
    }

    #[test]
    fn imaginary_letter_commutes_with_real_root_vector() {
        let m = engine(8, &[(1, 2)]);
        let g = TruncAut::exp_ad(m, &MonsterElt::e(x(0, 1, 1)).scale(&q(5)), 8).unwrap();
        assert_eq!(g.images().unwrap()[&Generator::E].value, MonsterElt::e_real());
    }

    #[test]
    fn sector_errors() {
        let m = engine(8, &[(1, 1)]);
        assert!(matches!(TruncAut::exp_ad(m.clone(), &MonsterElt::f(x(0, 1, 1)), 8), Err(Error::Sector(_))));
        assert!(matches!(TruncAut::exp_ad(m.clone(), &MonsterElt::h1(), 8), Err(Error::Sector(_))));
        let mixed = MonsterElt::f_real().add(&MonsterElt::e(x(0, 1, 1)));
        assert!(matches!(TruncAut::exp_ad(m.clone(), &mixed, 8), Err(Error::Sector(_))));
        assert!(TruncAut::exp_ad(m, &MonsterElt::e(x(0, 2, 1)), 8).is_err());
    }

    #[test]
    fn torus_examples() {
        let m = engine(8, &[(1, 1), (2, 1), (3, 1)]);
        let id = TruncAut::torus(m.clone(), &q(1), &q(1), 8).unwrap();
        assert!(id.is_identity().unwrap());
        let s = q(3);
        let g = TruncAut::torus(m.clone(), &s, &q(1), 8).unwrap();
        for l in 0..3 {
            let v = g.apply(&MonsterElt::e(x(l, 3, 1)), 8).unwrap().value;
            assert_eq!(v, MonsterElt::e(x(l, 3, 1)).scale(&qpow(&s, l as i64 + 1)));
        }
        let t = frac(2, 5);
        let g = TruncAut::torus(m.clone(), &q(1), &t, 8).unwrap();
        let v = g.apply(&MonsterElt::f(x(0, 2, 1)), 8).unwrap().value;
        assert_eq!(v, MonsterElt::f(x(0, 2, 1)).scale(&qpow(&t, -2)));
        assert!(TruncAut::torus(m, &q(0), &q(1), 8).is_err());
    }

    #[test]
    fn compose_and_invert() {
        let m = engine(8, &[(1, 2), (2, 1)]);
        let a = TruncAut::exp_ad(m.clone(), &MonsterElt::e(x(0, 1, 1)), 8).unwrap();
        let b = TruncAut::exp_ad(m.clone(), &MonsterElt::e_real().scale(&q(2)), 8).unwrap();
        let g = a.compose(&b).unwrap();
        assert!(g.compose(&g.invert()).unwrap().is_identity().unwrap());
        let u = TruncAut::exp_ad(m.clone(), &MonsterElt::e_real().scale(&q(1)), 8).unwrap();
        let v = TruncAut::exp_ad(m.clone(), &MonsterElt::e_real().scale(&q(2)), 8).unwrap();
        let uv = TruncAut::exp_ad(m.clone(), &MonsterElt::e_real().scale(&q(3)), 8).unwrap();
        assert!(u.compose(&v).unwrap().equal(&uv).unwrap());
        let other = TruncAut::identity(m, 9).unwrap();
        assert_eq!(g.compose(&other).unwrap_err(), Error::WindowMismatch(8, 9));
    }

    #[test]
    fn filtration_examples() {
        let m = engine(9, &[(1, 2), (2, 2), (3, 1)]);
        let id = TruncAut::identity(m.clone(), 9).unwrap();
        assert!(id.filtration_level().unwrap().window_limited);
        let g = TruncAut::exp_ad(m.clone(), &MonsterElt::e(x(0, 1, 1)), 9).unwrap();
        assert_eq!(g.filtration_level().unwrap(), Level { level: 3, window_limited: false });
        let h = TruncAut::exp_ad(m, &MonsterElt::e(x(1, 2, 1)), 9).unwrap();
        assert_eq!(h.filtration_level().unwrap().level, 5);
        assert!(h.in_level(5).unwrap() && !h.in_level(6).unwrap());
    }

    #[test]
    fn log_examples() {
        let m = engine(8, &[(1, 2), (2, 1)]);
        let id = TruncAut::identity(m.clone(), 8).unwrap();
        assert!(id.log_unipotent().unwrap().is_zero());
        let xe = MonsterElt::e(x(1, 2, 1)).scale(&frac(3, 2));
        let g = TruncAut::exp_ad(m.clone(), &xe, 8).unwrap();
        assert_eq!(g.log_unipotent().unwrap(), xe);
        let t = TruncAut::torus(m, &q(2), &q(1), 8).unwrap();
        assert!(matches!(t.log_unipotent(), Err(Error::NotUnipotent(_))));
    }

    #[test]
    fn images_without_provenance() {
        let m = engine(8, &[(1, 2)]);
        // raw images are taken as exact, so they have to be supplied through
        // N + margin for the bracket test to see every contribution
        let wide = TruncAut::exp_ad(m.clone(), &MonsterElt::e(x(0, 1, 1)), 11).unwrap();
        let im: ImageMap = wide.images().unwrap().iter().map(|(k, v)| (*k, v.value.clone())).collect();
        let g = TruncAut::exp_ad(m.clone(), &MonsterElt::e(x(0, 1, 1)), 8).unwrap();
        let raw = TruncAut::from_images(m.clone(), 8, im.clone()).unwrap();
        assert!(raw.equal(&g).unwrap());
        assert!(raw.invert().compose(&g).unwrap().is_identity().unwrap());
        let mut rng = rand::thread_rng();
        let pairs = sample_pairs(&m, 8, 40, &mut rng);
        let rep = raw.aut_check(&pairs).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        // a corrupted image is caught
        let mut bad = im;
        let e = bad.get_mut(&Generator::Ejk(crate::index::SimpleIndex::new(1, 1))).unwrap();
        *e = e.scale(&q(2));
        let bad = TruncAut::from_images(m.clone(), 8, bad).unwrap();
        let pairs: Vec<_> = [Generator::Ejk(crate::index::SimpleIndex::new(1, 1))]
            .iter()
            .map(|g| (g.element(), Generator::Fjk(crate::index::SimpleIndex::new(1, 1)).element()))
            .collect();
        assert!(!bad.aut_check(&pairs).unwrap().passed());
    }

    #[test]
    fn json_is_deterministic() {
        let m = engine(6, &[(1, 1)]);
        let g = TruncAut::exp_ad(m.clone(), &MonsterElt::e(x(0, 1, 1)).scale(&frac(1, 2)), 6).unwrap();
        let a = serde_json::to_string(&g.to_json().unwrap()).unwrap();
        let g2 = TruncAut::exp_ad(m, &MonsterElt::e(x(0, 1, 1)).scale(&frac(1, 2)), 6).unwrap();
        assert_eq!(a, serde_json::to_string(&g2.to_json().unwrap()).unwrap());
        assert!(a.contains("\"-1/2\""));
    }

    #[test]
    fn f_floor_bounds() {
        // a j=2 string top e_{1,2} (degree 5) drops to e_{0,2} (degree 4)
        assert!(f_floor(5, 2) <= 4);
        // a word of two j=3 string tops, degree 14, can reach degree 10
        assert!(f_floor(14, 3) <= 10);
        assert_eq!(f_floor(3, 1), 3);
    }
}
