//! Free Lie algebras on a graded, totally ordered alphabet, in the Lyndon
//! basis.
//!
//! A Lyndon word `w` stands for the bracketing obtained from its standard
//! factorization `w = uv` (`v` the longest proper Lyndon suffix):
//! `P_w = [P_u, P_v]`, and `P_x = x` for a letter.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::Hash;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::index::{ExtIndex, Root};
use crate::rational::{fmt_q, Q};
use crate::{Error, Result};

/// A letter of a graded alphabet.
pub trait Letter: Clone + Ord + Hash + fmt::Debug + Send + Sync {
    fn degree(&self) -> i64;
    fn root(&self) -> Root;
}

impl Letter for ExtIndex {
    fn degree(&self) -> i64 {
        ExtIndex::degree(*self)
    }

    fn root(&self) -> Root {
        ExtIndex::root(*self)
    }
}

/// Nonempty and strictly smaller than each of its proper suffixes.
pub fn is_lyndon<L: Ord>(w: &[L]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w < &w[i..])
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LyndonWord<L> {
    letters: Vec<L>,
}

impl<L: Letter> LyndonWord<L> {
    pub fn new(letters: Vec<L>) -> Result<Self> {
        if !is_lyndon(&letters) {
            return Err(Error::InvalidArgument(format!("{letters:?} is not a Lyndon word")));
        }
        Ok(LyndonWord { letters })
    }

    pub fn letter(x: L) -> Self {
        LyndonWord { letters: vec![x] }
    }

    pub(crate) fn from_vec_unchecked(letters: Vec<L>) -> Self {
        debug_assert!(is_lyndon(&letters));
        LyndonWord { letters }
    }

    pub fn letters(&self) -> &[L] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn as_letter(&self) -> Option<&L> {
        match self.letters.as_slice() {
            [x] => Some(x),
            _ => None,
        }
    }

    pub fn degree(&self) -> i64 {
        self.letters.iter().map(Letter::degree).sum()
    }

    pub fn root(&self) -> Root {
        self.letters.iter().fold(Root::ZERO, |r, x| r + x.root())
    }

    /// `(u, v)` with `v` the longest proper Lyndon suffix.
    pub fn std_factorize(&self) -> Result<(Self, Self)> {
        if self.letters.len() < 2 {
            return Err(Error::WordTooShort);
        }
        let i = (1..self.letters.len())
            .find(|&i| is_lyndon(&self.letters[i..]))
            .expect("the last letter is always a Lyndon suffix");
        Ok((
            LyndonWord::from_vec_unchecked(self.letters[..i].to_vec()),
            LyndonWord::from_vec_unchecked(self.letters[i..].to_vec()),
        ))
    }
}

impl<L: fmt::Debug> fmt::Debug for LyndonWord<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.letters).finish()
    }
}

/// A finite linear combination of Lyndon basis elements.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FreeLieElt<L> {
    terms: BTreeMap<LyndonWord<L>, Q>,
}

impl<L: Letter> Default for FreeLieElt<L> {
    fn default() -> Self {
        FreeLieElt { terms: BTreeMap::new() }
    }
}

impl<L: Letter> FreeLieElt<L> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn word(w: LyndonWord<L>) -> Self {
        Self::term(w, Q::one())
    }

    pub fn letter(x: L) -> Self {
        Self::word(LyndonWord::letter(x))
    }

    pub fn term(w: LyndonWord<L>, c: Q) -> Self {
        let mut e = Self::zero();
        e.add_term(w, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<LyndonWord<L>, Q> {
        &self.terms
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LyndonWord<L>, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &LyndonWord<L>) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, w: LyndonWord<L>, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (w, a) in &other.terms {
            self.add_term(w.clone(), a * c);
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.add_scaled(other, &Q::one());
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        FreeLieElt { terms: self.terms.iter().map(|(w, a)| (w.clone(), a * c)).collect() }
    }

    pub fn neg(&self) -> Self {
        FreeLieElt { terms: self.terms.iter().map(|(w, a)| (w.clone(), -a)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-Q::one());
        out
    }

    /// Keep only terms whose degree satisfies `keep`.
    pub fn retain_degrees(&mut self, keep: impl Fn(i64) -> bool) -> bool {
        let before = self.terms.len();
        self.terms.retain(|w, _| keep(w.degree()));
        before != self.terms.len()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().map(LyndonWord::degree).max()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().map(LyndonWord::degree).min()
    }

    pub fn letters(&self) -> BTreeSet<L> {
        self.terms.keys().flat_map(|w| w.letters.iter().cloned()).collect()
    }

    /// Substitutes letters (injectively) and re-expands in the Lyndon basis.
    pub fn map_letters(&self, lie: &FreeLie<L>, f: &impl Fn(&L) -> L) -> Self {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            out.add_scaled(&lie.substitute(w, f), c);
        }
        out
    }
}

impl<L: Letter> fmt::Debug for FreeLieElt<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*{:?}", fmt_q(c), w)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Result of a bracket computed under a degree bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Truncated<T> {
    pub value: T,
    /// Terms were discarded by the bound.
    pub truncated: bool,
}

type PairMemo<L> = Mutex<HashMap<(LyndonWord<L>, LyndonWord<L>), FreeLieElt<L>>>;

/// Bracket engine for one alphabet. The memo table is internally
/// synchronized so one engine can serve parallel callers.
pub struct FreeLie<L: Letter> {
    alphabet: Option<BTreeSet<L>>,
    memo: PairMemo<L>,
}

impl<L: Letter> Default for FreeLie<L> {
    fn default() -> Self {
        FreeLie { alphabet: None, memo: Mutex::new(HashMap::new()) }
    }
}

impl<L: Letter> FreeLie<L> {
    /// Engine accepting any letter of type `L`.
    pub fn new() -> Self {
        Self::default()
    }

    /// Engine restricted to a finite alphabet.
    pub fn with_alphabet(alphabet: impl IntoIterator<Item = L>) -> Self {
        FreeLie { alphabet: Some(alphabet.into_iter().collect()), memo: Mutex::new(HashMap::new()) }
    }

    pub fn cache_len(&self) -> usize {
        self.memo.lock().unwrap().len()
    }

    fn check_alphabet(&self, e: &FreeLieElt<L>) -> Result<()> {
        if let Some(alpha) = &self.alphabet {
            for x in e.letters() {
                if !alpha.contains(&x) {
                    return Err(Error::AlphabetMismatch(format!("{x:?}")));
                }
            }
        }
        Ok(())
    }

    /// `[P_u, P_v]` in the Lyndon basis.
    ///
    /// Straightening: for `u < v` either `uv` is Lyndon with standard
    /// factorization `(u, v)`, or `u = u1 u2` with `u2 < v`, and
    /// `[[u1, u2], v] = [u1, [u2, v]] - [u2, [u1, v]]`. Both recursive calls
    /// pair a strictly shorter left factor with words of the same total
    /// degree whose left member is larger in the lexicographic order, so
    /// recursion on (total degree, length of the left factor) terminates.
    pub fn bracket_words(&self, u: &LyndonWord<L>, v: &LyndonWord<L>) -> FreeLieElt<L> {
        use std::cmp::Ordering::*;
        match u.cmp(v) {
            Equal => return FreeLieElt::zero(),
            Greater => return self.bracket_words(v, u).neg(),
            Less => {}
        }
        let key = (u.clone(), v.clone());
        if let Some(hit) = self.memo.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let out = match u.std_factorize() {
            Err(_) => {
                let mut w = u.letters.clone();
                w.extend(v.letters.iter().cloned());
                FreeLieElt::word(LyndonWord::from_vec_unchecked(w))
            }
            Ok((_, ref u2)) if u2 >= v => {
                let mut w = u.letters.clone();
                w.extend(v.letters.iter().cloned());
                FreeLieElt::word(LyndonWord::from_vec_unchecked(w))
            }
            Ok((u1, u2)) => {
                let left = self.bracket_word_elt(&u1, &self.bracket_words(&u2, v));
                let right = self.bracket_word_elt(&u2, &self.bracket_words(&u1, v));
                left.sub(&right)
            }
        };
        self.memo.lock().unwrap().insert(key, out.clone());
        out
    }

    pub fn bracket_word_elt(&self, u: &LyndonWord<L>, b: &FreeLieElt<L>) -> FreeLieElt<L> {
        let mut out = FreeLieElt::zero();
        for (w, c) in b.iter() {
            out.add_scaled(&self.bracket_words(u, w), c);
        }
        out
    }

    /// Exact bilinear bracket.
    pub fn bracket(&self, a: &FreeLieElt<L>, b: &FreeLieElt<L>) -> FreeLieElt<L> {
        self.bracket_bounded(a, b, i64::MAX).value
    }

    fn bracket_bounded(&self, a: &FreeLieElt<L>, b: &FreeLieElt<L>, n: i64) -> Truncated<FreeLieElt<L>> {
        let mut out = FreeLieElt::zero();
        let mut truncated = false;
        for (u, x) in a.iter() {
            let du = u.degree();
            for (v, y) in b.iter() {
                if du.saturating_add(v.degree()) > n {
                    truncated = true;
                    continue;
                }
                out.add_scaled(&self.bracket_words(u, v), &(x * y));
            }
        }
        Truncated { value: out, truncated }
    }

    /// Bracket with terms of degree above `n` dropped.
    pub fn bracket_free(&self, a: &FreeLieElt<L>, b: &FreeLieElt<L>, n: i64) -> Result<Truncated<FreeLieElt<L>>> {
        self.check_alphabet(a)?;
        self.check_alphabet(b)?;
        Ok(self.bracket_bounded(a, b, n))
    }

    /// Image of `P_w` under a letter substitution, re-expanded.
    pub fn substitute(&self, w: &LyndonWord<L>, f: &impl Fn(&L) -> L) -> FreeLieElt<L> {
        match w.std_factorize() {
            Err(_) => FreeLieElt::letter(f(&w.letters[0])),
            Ok((u, v)) => self.bracket(&self.substitute(&u, f), &self.substitute(&v, f)),
        }
    }

    /// Extends a linear map on letters to the derivation of the free Lie
    /// algebra it determines, and applies it to `P_w`.
    pub fn derivation(&self, w: &LyndonWord<L>, on_letter: &impl Fn(&L) -> FreeLieElt<L>) -> FreeLieElt<L> {
        match w.std_factorize() {
            Err(_) => on_letter(&w.letters[0]),
            Ok((u, v)) => {
                let pu = FreeLieElt::word(u.clone());
                let pv = FreeLieElt::word(v.clone());
                let mut out = self.bracket(&self.derivation(&u, on_letter), &pv);
                out.add_assign(&self.bracket(&pu, &self.derivation(&v, on_letter)));
                out
            }
        }
    }
}

/// All Lyndon words of total degree exactly `d`, sorted.
pub fn lyndon_basis<L: Letter>(alphabet: &[L], d: i64) -> Vec<LyndonWord<L>> {
    let mut letters: Vec<L> = alphabet.to_vec();
    letters.sort();
    letters.dedup();
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    fn go<L: Letter>(letters: &[L], left: i64, prefix: &mut Vec<L>, out: &mut Vec<LyndonWord<L>>) {
        if left == 0 {
            if is_lyndon(prefix) {
                out.push(LyndonWord::from_vec_unchecked(prefix.clone()));
            }
            return;
        }
        for x in letters {
            let dx = x.degree();
            if dx <= 0 || dx > left {
                continue;
            }
            // a Lyndon word starts with its smallest letter
            if let Some(first) = prefix.first() {
                if x < first {
                    continue;
                }
            }
            prefix.push(x.clone());
            go(letters, left - dx, prefix, out);
            prefix.pop();
        }
    }
    go(&letters, d, &mut prefix, &mut out);
    out.sort();
    out
}

/// Graded dimensions `L_d`, `1 <= d <= bound`, of the free Lie algebra on
/// `a_d` generators in degree `d`: the unique solution of
/// `prod_d (1 - q^d)^(-L_d) = (1 - sum_d a_d q^d)^(-1)`.
pub fn witt_dimensions(degree_counts: &BTreeMap<i64, BigInt>, bound: i64) -> Result<BTreeMap<i64, BigInt>> {
    let by_root: BTreeMap<Root, BigInt> = degree_counts
        .iter()
        .filter(|(&d, _)| d >= 1)
        .map(|(&d, a)| (Root::new(0, d), a.clone()))
        .collect();
    if degree_counts.keys().any(|&d| d < 1) {
        return Err(Error::InvalidArgument("generator degrees must be positive".into()));
    }
    let dims = witt_dimensions_by_root(&by_root, bound)?;
    Ok((1..=bound).map(|d| (d, dims.get(&Root::new(0, d)).cloned().unwrap_or_default())).collect())
}

/// Multigraded version: generator counts per root, dimensions of every
/// root space of degree at most `bound`. Roots must have positive degree.
pub fn witt_dimensions_by_root(counts: &BTreeMap<Root, BigInt>, bound: i64) -> Result<BTreeMap<Root, BigInt>> {
    for (r, a) in counts {
        if r.degree() < 1 {
            return Err(Error::InvalidArgument(format!("root {r} has non-positive degree")));
        }
        if a.is_negative() {
            return Err(Error::InvalidArgument(format!("negative generator count at {r}")));
        }
    }
    let gens: BTreeMap<Root, BigInt> =
        counts.iter().filter(|(r, a)| r.degree() <= bound && !a.is_zero()).map(|(r, a)| (*r, a.clone())).collect();
    // -log(1 - A) = sum_n A^n / n, coefficientwise
    let mut log: BTreeMap<Root, Q> = BTreeMap::new();
    let mut power: BTreeMap<Root, BigInt> = gens.clone();
    let mut n = 1i64;
    while !power.is_empty() {
        for (r, c) in &power {
            *log.entry(*r).or_insert_with(Q::zero) += Q::new(c.clone(), BigInt::from(n));
        }
        let mut next: BTreeMap<Root, BigInt> = BTreeMap::new();
        for (r, c) in &power {
            for (s, d) in &gens {
                let t = *r + *s;
                if t.degree() <= bound {
                    *next.entry(t).or_default() += c * d;
                }
            }
        }
        next.retain(|_, c| !c.is_zero());
        power = next;
        n += 1;
    }
    // log = sum_r L_r sum_m x^{m r} / m; peel off in increasing degree
    let mut roots: Vec<Root> = log.keys().copied().collect();
    roots.sort_by_key(|r| (r.degree(), *r));
    let mut dims: BTreeMap<Root, BigInt> = BTreeMap::new();
    for r in roots {
        let mut val = log[&r].clone();
        for m in 2..=r.degree() {
            if r.a % m == 0 && r.b % m == 0 {
                let s = Root::new(r.a / m, r.b / m);
                if let Some(ls) = dims.get(&s) {
                    val -= Q::new(ls.clone(), BigInt::from(m));
                }
            }
        }
        if !val.is_integer() || val.is_negative() {
            return Err(Error::Inconsistent(format!("non-integral dimension {} at {r}", fmt_q(&val))));
        }
        if !val.is_zero() {
            dims.insert(r, val.to_integer());
        }
    }
    Ok(dims)
}
