//! Subcommand bodies. Each returns a JSON report and whether every check in
//! it passed; errors are usage or configuration problems.

use std::collections::BTreeMap;
use std::sync::Arc;

use monster_core::completion::{approximate_by_generators, elt_json};
use monster_core::freelie::witt_dimensions_by_root;
use monster_core::index::Root;
use monster_core::monster::Monster;
use monster_core::permaut::{numerology_check, perm_aut, perm_report, SparsePerm};
use monster_core::presentation::{
    catalog_json, commutation_shadow, realize, relations_catalog, run_adjoint_suite, run_sl2_suite, GroupWord,
    SuiteReport,
};
use monster_core::jfun;
use num_bigint::BigInt;
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{Config, ConfigError};
use crate::parse::{parse_elem, parse_word, ParseError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Core(#[from] monster_core::Error),
    #[error("{0}")]
    Usage(String),
}

/// A finished report.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub passed: bool,
}

impl Outcome {
    fn ok(report: Value) -> Outcome {
        Outcome { report, passed: true }
    }
}

fn engine(cfg: &Config) -> Result<Arc<Monster>, CliError> {
    Ok(Arc::new(Monster::new(cfg.support()?)))
}

pub fn jcoef(nmax: i64) -> Result<Outcome, CliError> {
    let c = jfun::j_coefficients(nmax)?;
    let rows: Vec<Value> = c.iter().map(|(n, v)| json!({"n": n, "c": v.to_string()})).collect();
    Ok(Outcome::ok(json!({"nmax": nmax, "coefficients": rows})))
}

/// Letter multiplicities by root: `c(j)` (symbolic) or the cap `K_j`.
pub fn letter_counts(cfg: &Config, degree: i64, symbolic: bool) -> Result<BTreeMap<Root, BigInt>, CliError> {
    let jmax = (degree - 2).max(0);
    let c = if symbolic { Some(jfun::j_coefficients(jmax)?) } else { None };
    let mut counts: BTreeMap<Root, BigInt> = BTreeMap::new();
    for j in 1..=jmax {
        let mult = match &c {
            Some(c) => c[&j].clone(),
            None => BigInt::from(cfg.caps.get(&(j as u32)).copied().unwrap_or(0)),
        };
        if mult == BigInt::from(0) {
            continue;
        }
        for l in 0..j {
            if j + l + 2 <= degree {
                *counts.entry(Root::new(l + 1, j - l)).or_default() += &mult;
            }
        }
    }
    Ok(counts)
}

pub fn dims(cfg: &Config, degree: i64, symbolic: bool) -> Result<Outcome, CliError> {
    if degree < 1 {
        return Err(CliError::Usage("degree must be >= 1".into()));
    }
    let counts = letter_counts(cfg, degree, symbolic)?;
    let by_root = witt_dimensions_by_root(&counts, degree)?;
    let mut by_degree: BTreeMap<i64, BigInt> = BTreeMap::new();
    let roots: Vec<Value> = by_root
        .iter()
        .map(|(r, d)| {
            *by_degree.entry(r.degree()).or_default() += d;
            json!({"root": [r.a, r.b], "degree": r.degree(), "dim": d.to_string()})
        })
        .collect();
    let degrees: Vec<Value> = by_degree.iter().map(|(d, v)| json!({"degree": d, "dim": v.to_string()})).collect();
    let regime = if symbolic { "symbolic" } else { "capped" };
    let mut report = json!({"regime": regime, "degree": degree, "roots": roots, "by_degree": degrees});
    if !symbolic {
        report["config"] = cfg.to_json();
    }
    Ok(Outcome::ok(report))
}

pub fn bracket(cfg: &Config, expr: &str) -> Result<Outcome, CliError> {
    let m = engine(cfg)?;
    let r = parse_elem(expr, &m)?;
    Ok(Outcome::ok(json!({
        "expr": expr,
        "result": elt_json(&r.value),
        "text": r.value.to_string(),
        "exact": !r.truncated,
    })))
}

/// Operations of the `aut` subcommand.
#[derive(Debug, Clone)]
pub enum AutAction {
    /// Generator images of the word.
    Images { word: String },
    Apply { word: String, expr: String },
    Compose { left: String, right: String },
    Log { word: String },
    Level { word: String },
    Approx { word: String, level: i64 },
}

pub fn aut(cfg: &Config, action: &AutAction) -> Result<Outcome, CliError> {
    let m = engine(cfg)?;
    let n = cfg.n;
    let build = |w: &str| -> Result<(GroupWord, monster_core::completion::TruncAut), CliError> {
        let word = parse_word(w)?;
        let g = realize(&word, m.clone(), n)?;
        Ok((word, g))
    };
    let report = match action {
        AutAction::Images { word } => {
            let (w, g) = build(word)?;
            json!({"word": w.to_string(), "automorphism": g.to_json()?})
        }
        AutAction::Apply { word, expr } => {
            let (w, g) = build(word)?;
            let y = parse_elem(expr, &m)?;
            if y.truncated {
                return Err(CliError::Usage("the element was cut by the window".into()));
            }
            let v = g.apply(&y.value, n)?.upto(n);
            json!({"word": w.to_string(), "expr": expr, "result": elt_json(&v), "text": v.to_string()})
        }
        AutAction::Compose { left, right } => {
            let (a, ga) = build(left)?;
            let (b, gb) = build(right)?;
            let c = ga.compose(&gb)?;
            json!({"word": a.mul(&b).to_string(), "automorphism": c.to_json()?})
        }
        AutAction::Log { word } => {
            let (w, g) = build(word)?;
            let x = g.log_unipotent()?;
            json!({"word": w.to_string(), "log": elt_json(&x), "text": x.to_string(), "through_degree": n + g.margin()})
        }
        AutAction::Level { word } => {
            let (w, g) = build(word)?;
            let lv = g.filtration_level()?;
            json!({"word": w.to_string(), "level": lv.level, "window_limited": lv.window_limited})
        }
        AutAction::Approx { word, level } => {
            let (w, g) = build(word)?;
            let a = approximate_by_generators(&g, *level)?;
            let residual = realize(&a, m.clone(), n)?.invert().compose(&g)?;
            let agrees = residual.in_level(level + 1)?;
            return Ok(Outcome {
                report: json!({
                    "word": w.to_string(),
                    "level": level,
                    "approximation": a.to_string(),
                    "agrees_modulo_next_level": agrees,
                }),
                passed: agrees,
            });
        }
    };
    Ok(Outcome::ok(report))
}

fn suite_json(rep: &SuiteReport, restrictions: bool) -> Value {
    let cat = relations_catalog();
    let families: Vec<Value> = rep
        .by_id
        .iter()
        .map(|((pos, id), rs)| {
            let failures: Vec<Value> = rs
                .iter()
                .filter(|r| !r.passed)
                .take(20)
                .map(|r| json!({"instance": r.instance, "detail": r.detail}))
                .collect();
            let mut f = json!({
                "id": id,
                "class": cat[*pos].class.name(),
                "instances": rs.len(),
                "passed": rs.iter().filter(|r| r.passed).count(),
                "failures": failures,
            });
            if restrictions {
                f["restriction"] = json!(cat[*pos].restriction);
            }
            f
        })
        .collect();
    let (ok, total) = rep.counts();
    json!({"families": families, "instances": total, "passed_instances": ok, "passed": rep.all_pass()})
}

/// Checks an exported catalog against the built-in one.
pub fn check_catalog(text: &str) -> Result<(), CliError> {
    let given: Value = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("catalog: {e}")))?;
    if given != catalog_json() {
        return Err(CliError::Usage("catalog file differs from the built-in relation catalog".into()));
    }
    Ok(())
}

pub fn relcheck(cfg: &Config) -> Result<Outcome, CliError> {
    let m = engine(cfg)?;
    let n = cfg.n;
    let suite = cfg.suite.as_str();
    let mut report = json!({"config": cfg.to_json(), "suite": suite});
    let mut passed = true;
    if suite == "adjoint" || suite == "all" {
        let rep = run_adjoint_suite(m.clone(), n, &cfg.samples, cfg.threads)?;
        passed &= rep.all_pass();
        report["adjoint"] = suite_json(&rep, false);
    }
    if suite == "sl2" || suite == "all" {
        let rep = run_sl2_suite(m.cfg(), n, &cfg.samples)?;
        passed &= rep.all_pass();
        report["sl2"] = suite_json(&rep, true);
    }
    if suite == "shadow" || suite == "all" {
        let sh = commutation_shadow(&m, n);
        passed &= sh.supported();
        report["shadow"] = json!({
            "id": "R16",
            "status": if sh.supported() { "supported" } else { "contradicted" },
            "reading": "j != p, or k != q, or |l - m| > 1",
            "applicable": sh.applicable,
            "contradictions": sh.contradictions,
            "readings_differ": sh.readings_differ,
            "open_neighbours": sh.open_neighbours,
        });
    }
    report["passed"] = json!(passed);
    Ok(Outcome { report, passed })
}

pub fn permaut(cfg: &Config, level: u32, cycles: &str, verify: bool) -> Result<Outcome, CliError> {
    let m = engine(cfg)?;
    let sigma = SparsePerm::parse_cycles(level, cycles)?;
    let g = perm_aut(&sigma, m.clone(), cfg.n)?;
    if !verify {
        return Ok(Outcome::ok(json!({
            "level": level,
            "cycles": sigma.to_string(),
            "automorphism": g.to_json()?,
        })));
    }
    let mut report = perm_report(&sigma, &m)?;
    report["automorphism"] = g.to_json()?;
    let passed = report["passed"] == json!(true);
    Ok(Outcome { report, passed })
}

pub fn numerology() -> Result<Outcome, CliError> {
    let r = numerology_check()?;
    Ok(Outcome { report: r.to_json(), passed: r.passed() })
}

pub fn catalog() -> Outcome {
    Outcome::ok(catalog_json())
}

/// Exit status for a finished run.
pub fn exit_code(result: &Result<Outcome, CliError>) -> i32 {
    match result {
        Ok(o) if o.passed => 0,
        Ok(_) => 1,
        Err(_) => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_examples() {
        let cfg = Config::default();
        let r = bracket(&cfg, "[e(0,1,1),f(0,1,1)]").unwrap();
        assert_eq!(r.report["text"], "-1*h1 - 1*h2");
        assert_eq!(r.report["exact"], true);
        assert!(bracket(&cfg, "[e(0,1,9),f(0,1,1)]").is_err());
    }

    #[test]
    fn capped_dimensions_count_free_lie_words() {
        let cfg = Config { caps: [(1, 2)].into_iter().collect(), ..Config::default() };
        let r = dims(&cfg, 9, false).unwrap();
        // two letters of root (1,1): necklace counts 2, 1, 2 in lengths 1..3
        let d: Vec<String> = r.report["by_degree"].as_array().unwrap().iter().map(|v| v["dim"].as_str().unwrap().to_string()).collect();
        assert_eq!(d, ["2", "1", "2"]);
    }

    #[test]
    fn aut_actions() {
        let cfg = Config::default();
        let a = aut(&cfg, &AutAction::Images { word: "X(-1;1)X(-1;2)".into() }).unwrap();
        let b = aut(&cfg, &AutAction::Images { word: "X(-1;3)".into() }).unwrap();
        assert_eq!(a.report["automorphism"]["images"], b.report["automorphism"]["images"]);
        let l = aut(&cfg, &AutAction::Level { word: "X(0,1,1;2)".into() }).unwrap();
        assert_eq!(l.report["level"], 3);
        let y = aut(&cfg, &AutAction::Images { word: "Y(0,1,1;1)".into() });
        assert!(matches!(y, Err(CliError::Core(monster_core::Error::Unrealizable(_)))));
        let ap = aut(&cfg, &AutAction::Approx { word: "X(0,1,1;1)X(0,1,2;1)".into(), level: 7 }).unwrap();
        assert!(ap.passed);
    }

    #[test]
    fn weyl_element_squares_to_minus_one_torus() {
        let cfg = Config::default();
        let sq = aut(&cfg, &AutAction::Images { word: "w(-1;1) w(-1;1)".into() }).unwrap();
        let t = aut(&cfg, &AutAction::Images { word: "H1(-1) H2(-1)".into() }).unwrap();
        assert_eq!(sq.report["automorphism"]["images"], t.report["automorphism"]["images"]);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&numerology()), 0);
        assert_eq!(exit_code(&Ok(Outcome { report: json!({}), passed: false })), 1);
        assert_eq!(exit_code(&Err(CliError::Usage("x".into()))), 2);
    }
}
