//! Index permutations of the imaginary simple roots and the numerology
//! around them.
//!
//! A permutation acts at one level `j`, on the `k` index of every letter of
//! the string `(j, k)`, on `e` and `f` alike. The Cartan part and the real
//! `sl_2` are fixed.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Value};

use crate::completion::TruncAut;
use crate::index::SimpleIndex;
use crate::monster::{verify_relations_with, Generator, Monster, RelationReport};
use crate::{jfun, Error, Result};

/// Finitely supported permutation of `{1, ..., c(j)}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparsePerm {
    level: u32,
    moved: BTreeMap<BigUint, BigUint>,
}

impl SparsePerm {
    pub fn identity(level: u32) -> SparsePerm {
        SparsePerm { level, moved: BTreeMap::new() }
    }

    /// Fixed points in `map` are dropped; the rest must be a bijection of its
    /// support inside `{1, ..., c(j)}`.
    pub fn new(level: u32, map: BTreeMap<BigUint, BigUint>) -> Result<SparsePerm> {
        if level == 0 {
            return Err(Error::InvalidArgument("level 0 has no simple roots".into()));
        }
        let moved: BTreeMap<BigUint, BigUint> = map.into_iter().filter(|(a, b)| a != b).collect();
        let mut image: Vec<&BigUint> = moved.values().collect();
        image.sort();
        if !image.iter().copied().eq(moved.keys()) {
            return Err(Error::InvalidArgument("not a bijection of its support".into()));
        }
        if let Some(top) = moved.keys().next_back() {
            let c = jfun::c(level as i64)?.to_biguint().expect("positive");
            let bottom = moved.keys().next().expect("nonempty");
            if bottom < &BigUint::one() || top > &c {
                return Err(Error::InvalidArgument(format!("indices must lie in 1..={c} at level {level}")));
            }
        }
        Ok(SparsePerm { level, moved })
    }

    /// Cycle notation, e.g. `(1 2)(3 4 5)`; the empty string is the identity.
    pub fn parse_cycles(level: u32, text: &str) -> Result<SparsePerm> {
        let bad = |m: &str| Error::InvalidArgument(format!("cycle notation: {m}"));
        let mut map = BTreeMap::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
            let close = body.find(')').ok_or_else(|| bad("unclosed cycle"))?;
            let pts: Vec<BigUint> = body[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<BigUint>().map_err(|_| bad(&format!("bad point '{s}'"))))
                .collect::<Result<_>>()?;
            // cycles compose right to left, as permutations do
            let mut cyc = BTreeMap::new();
            for (i, p) in pts.iter().enumerate() {
                if cyc.insert(p.clone(), pts[(i + 1) % pts.len()].clone()).is_some() {
                    return Err(bad(&format!("point {p} repeated in a cycle")));
                }
            }
            let prev = SparsePerm { level, moved: map };
            let c = SparsePerm { level, moved: cyc.into_iter().filter(|(a, b)| a != b).collect() };
            map = prev.compose(&c)?.moved;
            rest = body[close + 1..].trim_start();
        }
        SparsePerm::new(level, map)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn moved(&self) -> &BTreeMap<BigUint, BigUint> {
        &self.moved
    }

    pub fn is_identity(&self) -> bool {
        self.moved.is_empty()
    }

    pub fn apply(&self, k: &BigUint) -> BigUint {
        self.moved.get(k).cloned().unwrap_or_else(|| k.clone())
    }

    /// `self o other` (other acts first).
    pub fn compose(&self, o: &SparsePerm) -> Result<SparsePerm> {
        if self.level != o.level {
            return Err(Error::InvalidArgument(format!("levels differ: {} and {}", self.level, o.level)));
        }
        let mut moved = BTreeMap::new();
        for k in self.moved.keys().chain(o.moved.keys()) {
            let v = self.apply(&o.apply(k));
            if &v != k {
                moved.insert(k.clone(), v);
            }
        }
        Ok(SparsePerm { level: self.level, moved })
    }

    pub fn inverse(&self) -> SparsePerm {
        SparsePerm { level: self.level, moved: self.moved.iter().map(|(a, b)| (b.clone(), a.clone())).collect() }
    }

    /// The moved points as `u64`, after checking them against a cap.
    pub fn small_map(&self, cap: u64) -> Result<BTreeMap<u64, u64>> {
        self.moved
            .iter()
            .map(|(a, b)| match (a.to_u64(), b.to_u64()) {
                (Some(a), Some(b)) if a <= cap && b <= cap => Ok((a, b)),
                _ => Err(Error::InvalidArgument(format!(
                    "permutation moves {a} at level {}, beyond the cap {cap}",
                    self.level
                ))),
            })
            .collect()
    }

    /// Disjoint cycles, smallest point first.
    pub fn cycles(&self) -> Vec<Vec<BigUint>> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for start in self.moved.keys() {
            if seen.contains(start) {
                continue;
            }
            let mut cyc = vec![start.clone()];
            seen.insert(start.clone());
            let mut k = self.apply(start);
            while &k != start {
                seen.insert(k.clone());
                cyc.push(k.clone());
                k = self.apply(&k);
            }
            out.push(cyc);
        }
        out
    }
}

impl fmt::Display for SparsePerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moved.is_empty() {
            return write!(f, "()");
        }
        for c in self.cycles() {
            let pts: Vec<String> = c.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", pts.join(" "))?;
        }
        Ok(())
    }
}

/// The automorphism induced by `sigma`, on the completion truncated at `n`.
pub fn perm_aut(sigma: &SparsePerm, engine: Arc<Monster>, n: i64) -> Result<TruncAut> {
    let map = sigma.small_map(engine.cfg().cap(sigma.level))?;
    TruncAut::relabel(engine, sigma.level, map, n)
}

/// Generator map of `sigma`.
pub fn perm_generator(sigma: &SparsePerm, map: &BTreeMap<u64, u64>, g: Generator) -> Generator {
    let relabel = |s: SimpleIndex| {
        if s.j == sigma.level {
            SimpleIndex::new(s.j, map.get(&s.k).copied().unwrap_or(s.k))
        } else {
            s
        }
    };
    match g {
        Generator::Ejk(s) => Generator::Ejk(relabel(s)),
        Generator::Fjk(s) => Generator::Fjk(relabel(s)),
        other => other,
    }
}

/// Checks that the generator map of `sigma` respects every defining relation
/// on the supported indices.
pub fn verify_perm_relations(sigma: &SparsePerm, m: &Monster) -> Result<RelationReport> {
    let map = sigma.small_map(m.cfg().cap(sigma.level))?;
    Ok(verify_relations_with(
        m.cfg(),
        &|g: &Generator| perm_generator(sigma, &map, *g).element(),
        &|a, b| m.bracket_exact(a, b),
    ))
}

/// Working assumptions behind the permutation action, echoed in reports.
pub const PERM_ASSUMPTIONS: [&str; 2] = [
    "f-generators are permuted exactly like the e-generators",
    "the permutation acts uniformly on every l of a string (j, k)",
];

pub fn perm_report(sigma: &SparsePerm, m: &Monster) -> Result<Value> {
    let rep = verify_perm_relations(sigma, m)?;
    Ok(json!({
        "level": sigma.level,
        "cycles": sigma.to_string(),
        "assumptions": PERM_ASSUMPTIONS,
        "relations": {
            "instances": rep.instances(),
            "all_pass": rep.all_pass(),
            "failures": rep.checks.iter().filter(|c| !c.passed()).map(|c| json!({"id": c.id, "witnesses": c.witnesses})).collect::<Vec<_>>(),
        },
        "passed": rep.all_pass(),
    }))
}

/// Order of the monster group, with the usual factorization.
pub const MONSTER_ORDER: &str = "97239461142009186000";
pub const MONSTER_ORDER_FACTORS: [(u64, u32); 10] =
    [(2, 4), (3, 7), (5, 3), (7, 4), (11, 1), (13, 2), (29, 1), (41, 1), (59, 1), (71, 1)];
pub const C15: &str = "126142916465781843075";
pub const C15_FACTORS: [(u64, u32); 5] = [(3, 6), (5, 2), (7, 1), (1483, 1), (666739430527, 1)];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumerologyReport {
    pub d: BigUint,
    pub d_product: BigUint,
    pub c15_stated: BigUint,
    pub c15_product: BigUint,
    pub c15_computed: BigUint,
    pub d_le_c15: bool,
}

impl NumerologyReport {
    pub fn checks(&self) -> Vec<(&'static str, bool)> {
        vec![
            ("d equals the product of its factors", self.d_product == self.d),
            ("c(15) equals the product of its factors", self.c15_product == self.c15_stated),
            ("c(15) agrees with the computed coefficient", self.c15_computed == self.c15_stated),
            ("d <= c(15)", self.d_le_c15),
        ]
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.1)
    }

    pub fn to_json(&self) -> Value {
        let fac = |f: &[(u64, u32)]| f.iter().map(|(p, e)| json!([p.to_string(), e])).collect::<Vec<_>>();
        json!({
            "d": self.d.to_string(),
            "d_factors": fac(&MONSTER_ORDER_FACTORS),
            "d_product": self.d_product.to_string(),
            "c15": self.c15_stated.to_string(),
            "c15_factors": fac(&C15_FACTORS),
            "c15_product": self.c15_product.to_string(),
            "c15_computed": self.c15_computed.to_string(),
            "checks": self.checks().iter().map(|(n, ok)| json!({"check": n, "passed": ok})).collect::<Vec<_>>(),
            "passed": self.passed(),
        })
    }
}

fn factor_product(f: &[(u64, u32)]) -> BigUint {
    f.iter().fold(BigUint::one(), |acc, &(p, e)| acc * BigUint::from(p).pow(e))
}

pub fn numerology_check() -> Result<NumerologyReport> {
    let d: BigUint = MONSTER_ORDER.parse().expect("literal");
    let c15_stated: BigUint = C15.parse().expect("literal");
    let c15_computed = jfun::c(15)?.to_biguint().ok_or_else(|| Error::Inconsistent("c(15) is negative".into()))?;
    Ok(NumerologyReport {
        d_product: factor_product(&MONSTER_ORDER_FACTORS),
        c15_product: factor_product(&C15_FACTORS),
        d_le_c15: d <= c15_computed,
        d,
        c15_stated,
        c15_computed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::SupportConfig;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn cycle_parsing() {
        let s = SparsePerm::parse_cycles(1, "(1 2)(3 4 5)").unwrap();
        assert_eq!(s.apply(&big(1)), big(2));
        assert_eq!(s.apply(&big(5)), big(3));
        assert_eq!(s.apply(&big(9)), big(9));
        assert_eq!(s.to_string(), "(1 2)(3 4 5)");
        assert!(SparsePerm::parse_cycles(1, "").unwrap().is_identity());
        // overlapping cycles compose right to left
        let t = SparsePerm::parse_cycles(1, "(1 2)(2 3)").unwrap();
        assert_eq!(t.apply(&big(2)), big(3));
        assert_eq!(t.apply(&big(3)), big(1));
        assert!(SparsePerm::parse_cycles(1, "(1 196885)").is_err());
        assert!(SparsePerm::parse_cycles(1, "(0 1)").is_err());
        assert!(SparsePerm::parse_cycles(1, "(1 2").is_err());
        assert!(SparsePerm::parse_cycles(1, "(1 1)").is_err());
        // c(15) exceeds u64, and indices near it are accepted
        let top = SparsePerm::parse_cycles(15, "(1 126142916465781843075)").unwrap();
        assert_eq!(top.cycles().len(), 1);
    }

    #[test]
    fn composition_and_inverse() {
        let s = SparsePerm::parse_cycles(2, "(1 2 3)").unwrap();
        let t = SparsePerm::parse_cycles(2, "(1 2)").unwrap();
        let st = s.compose(&t).unwrap();
        assert_eq!(st.apply(&big(1)), big(3));
        assert!(s.compose(&s.inverse()).unwrap().is_identity());
        assert!(s.compose(&SparsePerm::identity(3)).is_err());
    }

    #[test]
    fn numerology() {
        let r = numerology_check().unwrap();
        assert!(r.passed(), "{:?}", r.checks());
        assert_eq!(r.d_product.to_string(), MONSTER_ORDER);
        assert_eq!(r.c15_computed.to_string(), C15);
    }

    #[test]
    fn transposition_preserves_relations() {
        let m = Monster::new(SupportConfig::new(7, [(1, 2), (2, 1)]).unwrap());
        let s = SparsePerm::parse_cycles(1, "(1 2)").unwrap();
        assert!(verify_perm_relations(&s, &m).unwrap().all_pass());
        let out = SparsePerm::parse_cycles(1, "(1 3)").unwrap();
        assert!(verify_perm_relations(&out, &m).is_err());
    }
}
