//! Index sets, roots and the integer grading.
//!
//! A root `(a, b)` lives in the rank-2 lattice spanned by the weights of
//! `h1` and `h2`: `e_{-1}` has root `(1, -1)` and `e_{l,jk}` has root
//! `(l + 1, j - l)`. The grading is `deg(a, b) = 2a + b`, so `e_{-1}` sits
//! in degree 1 and `e_{l,jk}` in degree `j + l + 2`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;

use crate::{jfun, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Root {
    pub a: i64,
    pub b: i64,
}

impl Root {
    pub const ZERO: Root = Root { a: 0, b: 0 };
    pub const REAL: Root = Root { a: 1, b: -1 };

    pub fn new(a: i64, b: i64) -> Root {
        Root { a, b }
    }

    pub fn degree(self) -> i64 {
        degree(self)
    }

    pub fn is_positive(self) -> bool {
        self.a >= 1
    }
}

impl Add for Root {
    type Output = Root;
    fn add(self, o: Root) -> Root {
        Root::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for Root {
    type Output = Root;
    fn sub(self, o: Root) -> Root {
        Root::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for Root {
    type Output = Root;
    fn neg(self) -> Root {
        Root::new(-self.a, -self.b)
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// The grading `Q -> Z`, `(a, b) |-> 2a + b`.
pub fn degree(r: Root) -> i64 {
    2 * r.a + r.b
}

/// Eigenvalues of `(h1, h2)` on any vector of root `r`.
pub fn weights(r: Root) -> (i64, i64) {
    (r.a, r.b)
}

/// Inverse of [`weights`].
pub fn root_of_weights(w: (i64, i64)) -> Root {
    Root::new(w.0, w.1)
}

/// An imaginary simple index `(j, k)` with `1 <= k <= c(j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimpleIndex {
    pub j: u32,
    pub k: u64,
}

impl SimpleIndex {
    pub fn new(j: u32, k: u64) -> SimpleIndex {
        SimpleIndex { j, k }
    }

    pub fn root(self) -> Root {
        Root::new(1, self.j as i64)
    }

    pub fn degree(self) -> i64 {
        self.j as i64 + 2
    }
}

/// Extended index `(l, j, k)` with `0 <= l < j`. Letters of the free
/// generating sets of the positive and negative parts.
///
/// Ordered by `(j, k, l)` so that whole strings stay contiguous.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtIndex {
    pub l: u32,
    pub j: u32,
    pub k: u64,
}

impl ExtIndex {
    pub fn new(l: u32, j: u32, k: u64) -> Result<ExtIndex> {
        if j == 0 || k == 0 || l >= j {
            return Err(Error::InvalidArgument(format!("({l},{j},{k}) is not an extended index")));
        }
        Ok(ExtIndex { l, j, k })
    }

    /// Infallible constructor for indices known to be valid.
    pub const fn at(l: u32, j: u32, k: u64) -> ExtIndex {
        ExtIndex { l, j, k }
    }

    pub fn simple(self) -> SimpleIndex {
        SimpleIndex::new(self.j, self.k)
    }

    pub fn root(self) -> Root {
        Root::new(self.l as i64 + 1, self.j as i64 - self.l as i64)
    }

    pub fn degree(self) -> i64 {
        self.j as i64 + self.l as i64 + 2
    }

    pub fn with_l(self, l: u32) -> ExtIndex {
        ExtIndex { l, ..self }
    }

    pub fn with_k(self, k: u64) -> ExtIndex {
        ExtIndex { k, ..self }
    }
}

impl Ord for ExtIndex {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.j, self.k, self.l).cmp(&(o.j, o.k, o.l))
    }
}

impl PartialOrd for ExtIndex {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for ExtIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.l, self.j, self.k)
    }
}

/// Degree bound and per-level caps `K_j` on the `k` index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupportConfig {
    pub degree_bound: i64,
    caps: BTreeMap<u32, u64>,
}

impl SupportConfig {
    /// Caps must satisfy `K_j <= c(j)`; zero caps are dropped.
    pub fn new(degree_bound: i64, caps: impl IntoIterator<Item = (u32, u64)>) -> Result<SupportConfig> {
        if degree_bound < 1 {
            return Err(Error::InvalidArgument(format!("degree bound must be >= 1, got {degree_bound}")));
        }
        let caps: BTreeMap<u32, u64> = caps.into_iter().filter(|&(_, k)| k > 0).collect();
        if let Some(&jmax) = caps.keys().next_back() {
            if caps.contains_key(&0) {
                return Err(Error::InvalidArgument("level j = 0 carries no generators".into()));
            }
            let c = jfun::j_coefficients(jmax as i64)?;
            for (&j, &k) in &caps {
                if BigInt::from(k) > c[&(j as i64)] {
                    return Err(Error::InvalidArgument(format!("cap K_{j} = {k} exceeds c({j})")));
                }
            }
        }
        Ok(SupportConfig { degree_bound, caps })
    }

    pub fn cap(&self, j: u32) -> u64 {
        self.caps.get(&j).copied().unwrap_or(0)
    }

    pub fn caps(&self) -> &BTreeMap<u32, u64> {
        &self.caps
    }

    /// Largest level with a nonzero cap.
    pub fn max_level(&self) -> u32 {
        self.caps.keys().next_back().copied().unwrap_or(0)
    }

    pub fn with_degree_bound(&self, n: i64) -> SupportConfig {
        SupportConfig { degree_bound: n, caps: self.caps.clone() }
    }

    /// Whether the letter exists in the capped algebra (degree not checked).
    pub fn supports(&self, x: ExtIndex) -> bool {
        x.l < x.j && x.k >= 1 && x.k <= self.cap(x.j)
    }

    pub fn supports_simple(&self, s: SimpleIndex) -> bool {
        s.k >= 1 && s.k <= self.cap(s.j)
    }

    /// All supported letters of degree at most `bound`, in letter order.
    pub fn letters_within(&self, bound: i64) -> Vec<ExtIndex> {
        let mut out = Vec::new();
        for (&j, &kmax) in &self.caps {
            for k in 1..=kmax {
                for l in 0..j {
                    let x = ExtIndex::at(l, j, k);
                    if x.degree() <= bound {
                        out.push(x);
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Supported simple indices `(j, k)` with `j + 2 <= bound`.
    pub fn simple_within(&self, bound: i64) -> Vec<SimpleIndex> {
        let mut out = Vec::new();
        for (&j, &kmax) in &self.caps {
            for k in 1..=kmax {
                let s = SimpleIndex::new(j, k);
                if s.degree() <= bound {
                    out.push(s);
                }
            }
        }
        out
    }
}

/// The letters `(l, j, k)` with `j + l + 2 <= N` and `k <= K_j`, ascending in `(j, k, l)`.
pub fn letters_up_to(cfg: &SupportConfig) -> Vec<ExtIndex> {
    cfg.letters_within(cfg.degree_bound)
}

/// Positive roots of the given degree with both coordinates at least 1,
/// the region every root of the free positive part lives in.
pub fn free_roots_of_degree(d: i64) -> Vec<Root> {
    (1..=d).filter_map(|a| {
        let b = d - 2 * a;
        (b >= 1).then_some(Root::new(a, b))
    }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: i64, caps: &[(u32, u64)]) -> SupportConfig {
        SupportConfig::new(n, caps.iter().copied()).unwrap()
    }

    #[test]
    fn degrees_of_generators() {
        assert_eq!(degree(Root::REAL), 1);
        for j in 1..6 {
            assert_eq!(SimpleIndex::new(j, 1).root().degree(), j as i64 + 2);
            for l in 0..j {
                assert_eq!(ExtIndex::at(l, j, 1).root().degree(), (j + l) as i64 + 2);
                assert_eq!(ExtIndex::at(l, j, 1).degree(), (j + l) as i64 + 2);
            }
        }
    }

    #[test]
    fn letter_enumeration() {
        assert_eq!(letters_up_to(&cfg(3, &[(1, 2)])), vec![ExtIndex::at(0, 1, 1), ExtIndex::at(0, 1, 2)]);
        assert!(letters_up_to(&cfg(2, &[(1, 5), (2, 5)])).is_empty());
        assert_eq!(
            letters_up_to(&cfg(5, &[(1, 1), (2, 1), (3, 1)])),
            vec![ExtIndex::at(0, 1, 1), ExtIndex::at(0, 2, 1), ExtIndex::at(1, 2, 1), ExtIndex::at(0, 3, 1)]
        );
    }

    #[test]
    fn weights_examples() {
        assert_eq!(weights(SimpleIndex::new(4, 1).root()), (1, 4));
        assert_eq!(weights(Root::REAL), (1, -1));
        let x = ExtIndex::at(2, 5, 1);
        assert_eq!(weights(-x.root()), (-3, -3));
    }

    #[test]
    fn invalid_inputs() {
        assert!(ExtIndex::new(2, 2, 1).is_err());
        assert!(ExtIndex::new(0, 0, 1).is_err());
        assert!(SupportConfig::new(0, []).is_err());
        assert!(SupportConfig::new(5, [(1, 196885)]).is_err());
        assert!(SupportConfig::new(5, [(1, 196884)]).is_ok());
    }

    #[test]
    fn finitely_many_roots_per_degree() {
        // every root reachable by letters has a >= 1, b >= 1; enumerate and compare
        for d in 1..30 {
            let roots = free_roots_of_degree(d);
            assert!(roots.len() as i64 <= d);
            for r in roots {
                assert_eq!(r.degree(), d);
            }
        }
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn degree_is_additive(a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50) {
                let r = Root::new(a, b);
                let s = Root::new(c, d);
                prop_assert_eq!(degree(r + s), degree(r) + degree(s));
            }

            #[test]
            fn weights_are_injective(a in -50i64..50, b in -50i64..50) {
                let r = Root::new(a, b);
                prop_assert_eq!(root_of_weights(weights(r)), r);
            }
        }
    }
}
