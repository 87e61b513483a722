//! Decidable hypotheses and theorem-backed verdicts for Burger–Mozes groups
//! `U_c(F')` and Le Boudec's restricted groups `G_c(F, F')`, plus surveys
//! over the subgroup classes of `Sym(d)`.
//!
//! Verdicts about the infinite groups are inferences: the tool certifies the
//! finite hypotheses and cites the equivalence that turns them into a
//! conclusion.

use num_bigint::BigUint;
use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::localaction::ball_stabilizer_order;
use crate::permgroup::{enumerate_subgroups_up_to_conjugacy, GroupSpec, PermGroup};
use crate::series::{p_part, prime_divisors, PrimeSet};
use crate::tree::{build_ball, CenterKind};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Facts {
    #[serde(rename = "F_transitive")]
    pub f_transitive: bool,
    #[serde(rename = "F_free")]
    pub f_free: bool,
    #[serde(rename = "Fp_transitive")]
    pub fp_transitive: bool,
    #[serde(rename = "Fp_free")]
    pub fp_free: bool,
    #[serde(rename = "Fp_gen_by_stabs")]
    pub fp_gen_by_stabs: bool,
    #[serde(rename = "F_le_Fp")]
    pub f_le_fp: bool,
    #[serde(rename = "Fp_le_young_F")]
    pub fp_le_young_f: bool,
}

impl Facts {
    pub fn compute(f: &PermGroup, f_prime: &PermGroup) -> Result<Facts> {
        if f.degree() != f_prime.degree() {
            return Err(Error::DegreeMismatch {
                left: f.degree(),
                right: f_prime.degree(),
            });
        }
        Ok(Facts {
            f_transitive: f.is_transitive(),
            f_free: f.acts_freely(),
            fp_transitive: f_prime.is_transitive(),
            fp_free: f_prime.acts_freely(),
            fp_gen_by_stabs: f_prime.generated_by_point_stabilizers(),
            f_le_fp: f.is_subgroup_of(f_prime),
            fp_le_young_f: f_prime.is_subgroup_of(&f.young_group()),
        })
    }

    pub fn sandwich(&self) -> bool {
        self.f_le_fp && self.fp_le_young_f
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub name: &'static str,
    /// `None` when the hypotheses of the cited statement are not met.
    pub value: Option<bool>,
    pub cite: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
}

const CITE_BM: &str = "theorem-backed inference (Burger-Mozes): for d > 2, a legal coloring and \
F' not acting freely, U_c(F') is virtually in S iff F' is transitive and generated by its point \
stabilizers, and then [U_c(F'):U_c(F')^+] = 2";
const CITE_VS: &str =
    "theorem-backed inference: for d > 2, a legal coloring, F' not acting freely \
and F <= F' <= young(F), G_c(F,F') is virtually simple iff F' is transitive and generated by its \
point stabilizers; this holds even when F acts freely";
const CITE_ND: &str = "G_c(F,F') is non-discrete exactly when F does not act freely on [d]";
const CITE_R: &str = "theorem-backed inference: for d > 2, a legal coloring, F <= F' <= young(F) \
and F not acting freely, G_c(F,F') is in R iff F' is transitive and generated by its point \
stabilizers; when F acts freely G_c(F,F') is discrete and so not in R";

/// Verdicts as a pure function of `d` and the facts.
pub fn verdicts(d: usize, facts: &Facts) -> Vec<Verdict> {
    let big = d > 2;
    let sandwich = facts.sandwich();
    let fp_good = facts.fp_transitive && facts.fp_gen_by_stabs;
    let nondiscrete = !facts.f_free;
    vec![
        Verdict {
            name: "Uc_Fp_virtually_in_S",
            value: (big && !facts.fp_free).then_some(fp_good),
            cite: CITE_BM,
            note: (big && !facts.fp_free && fp_good)
                .then_some("the simple subgroup U_c(F')^+ has index 2"),
        },
        Verdict {
            name: "Gc_virtually_simple",
            value: (big && sandwich && !facts.fp_free).then_some(fp_good),
            cite: CITE_VS,
            note: (big && sandwich && facts.f_free && !facts.fp_free)
                .then_some("F acts freely, so G_c(F,F') is discrete"),
        },
        Verdict {
            name: "Gc_nondiscrete",
            value: (big && facts.f_le_fp).then_some(nondiscrete),
            cite: CITE_ND,
            note: None,
        },
        Verdict {
            name: "Gc_in_R",
            value: (big && sandwich).then_some(nondiscrete && fp_good),
            cite: CITE_R,
            note: None,
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Inputs {
    pub d: usize,
    #[serde(rename = "F")]
    pub f: String,
    #[serde(rename = "Fprime")]
    pub f_prime: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EtaEstimate {
    pub depth: usize,
    pub primes: PrimeSet,
    /// Vertex-ball stabilizer orders at radius `depth - 1` and `depth`.
    pub orders: [String; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub tool_version: &'static str,
    pub caps: Caps,
    pub seed: Option<u64>,
    /// Omitted (null) unless timing was requested, to keep output byte-stable.
    pub wall_time_ms: Option<u64>,
}

impl Provenance {
    pub fn new(caps: &Caps, seed: Option<u64>) -> Provenance {
        Provenance {
            tool_version: TOOL_VERSION,
            caps: caps.clone(),
            seed,
            wall_time_ms: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionReport {
    pub inputs: Inputs,
    pub facts: Facts,
    /// `d > 2` and `F <= F' <= young(F)`: the main hypotheses hold.
    pub applicable: bool,
    pub verdicts: Vec<Verdict>,
    pub eta: Option<EtaEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl CriterionReport {
    pub fn verdict(&self, name: &str) -> Option<bool> {
        self.verdicts
            .iter()
            .find(|v| v.name == name)
            .and_then(|v| v.value)
    }
}

/// Evaluates the criteria for `(d, F, F')`. The η estimate uses `F`, whose
/// Burger–Mozes group is open in `G_c(F, F')`.
pub fn evaluate(
    d: usize,
    f: &GroupSpec,
    f_prime: &GroupSpec,
    eta_depth: Option<usize>,
    caps: &Caps,
) -> Result<CriterionReport> {
    let fg = f.resolve()?;
    let fpg = f_prime.resolve()?;
    evaluate_groups(
        d,
        &fg,
        &fpg,
        f.to_string(),
        f_prime.to_string(),
        eta_depth,
        caps,
    )
}

pub fn evaluate_groups(
    d: usize,
    f: &PermGroup,
    f_prime: &PermGroup,
    f_label: String,
    fp_label: String,
    eta_depth: Option<usize>,
    caps: &Caps,
) -> Result<CriterionReport> {
    for g in [f, f_prime] {
        if g.degree() != d {
            return Err(Error::DegreeMismatch {
                left: d,
                right: g.degree(),
            });
        }
    }
    let facts = Facts::compute(f, f_prime)?;
    let eta = match eta_depth {
        Some(depth) if d > 2 => Some(eta_estimate(f, depth, caps)?),
        _ => None,
    };
    Ok(CriterionReport {
        inputs: Inputs {
            d,
            f: f_label,
            f_prime: fp_label,
        },
        applicable: d > 2 && facts.sandwich(),
        verdicts: verdicts(d, &facts),
        facts,
        eta,
        provenance: None,
    })
}

/// Primes whose part of the vertex-ball stabilizer order grows from radius
/// `depth - 1` to `depth`.
pub fn eta_estimate(f: &PermGroup, depth: usize, caps: &Caps) -> Result<EtaEstimate> {
    if depth == 0 {
        return Err(Error::Input("η estimate needs depth >= 1".into()));
    }
    let d = f.degree();
    let order_at = |r: usize| -> Result<BigUint> {
        let ball = build_ball(d, r, CenterKind::Vertex, caps)?.legal_coloring();
        ball_stabilizer_order(&ball, f, caps)
    };
    let lower = order_at(depth - 1)?;
    let upper = order_at(depth)?;
    let primes = prime_divisors(&upper)
        .into_iter()
        .filter(|&p| p_part(&upper, p).1 > p_part(&lower, p).1);
    Ok(EtaEstimate {
        depth,
        primes: PrimeSet::new(primes)?,
        orders: [lower.to_string(), upper.to_string()],
    })
}

/// A short structural name for small permutation groups.
pub fn describe(g: &PermGroup, caps: &Caps) -> String {
    let n = g.degree();
    let order = g.order().clone();
    let factorial: BigUint = (1..=n as u64).product();
    if order == factorial {
        return format!("Sym({n})");
    }
    let Ok(elements) = g.elements(caps) else {
        return format!("G{order}");
    };
    let size = elements.len() as u64;
    let max_order = elements.iter().map(|e| e.order()).max().unwrap_or(1);
    if max_order == size {
        return format!("C{size}");
    }
    if order.clone() * 2u32 == factorial && g.is_subgroup_of(&PermGroup::alternating(n)) {
        return format!("Alt({n})");
    }
    if n == 5 && size == 20 {
        return "F20".into();
    }
    if size == 4 {
        return "V4".into();
    }
    if size.is_multiple_of(2) && size >= 6 && max_order == size / 2 {
        let x = elements
            .iter()
            .find(|e| e.order() == size / 2)
            .expect("exists");
        let rotations: Vec<_> = (0..size / 2).map(|k| x.pow(k)).collect();
        if elements
            .iter()
            .filter(|e| !rotations.contains(e))
            .all(|e| e.order() == 2)
        {
            return format!("D{}", size / 2);
        }
    }
    format!("G{size}")
}

#[derive(Debug, Clone, Serialize)]
pub struct SurveyRow {
    pub index: usize,
    #[serde(rename = "F_name")]
    pub f_name: String,
    #[serde(rename = "Fprime_name")]
    pub fp_name: String,
    #[serde(rename = "Fprime_order")]
    pub fp_order: String,
    pub report: CriterionReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct Survey {
    pub d: usize,
    pub transitive_only: bool,
    pub pairs: bool,
    pub rows: Vec<SurveyRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

/// One row per conjugacy class of `F' ≤ Sym(d)` with `F = F'`, or, with
/// `pairs`, one row per class of `F ≤ F'` (up to conjugacy in `F'`) inside
/// the sandwich `F ≤ F' ≤ young(F)`.
pub fn survey(
    d: usize,
    transitive_only: bool,
    pairs: bool,
    eta_depth: Option<usize>,
    caps: &Caps,
) -> Result<Survey> {
    if d == 0 {
        return Err(Error::Input("d must be positive".into()));
    }
    let classes = enumerate_subgroups_up_to_conjugacy(&PermGroup::symmetric(d), caps)?;
    let mut rows = Vec::new();
    for fp in classes {
        if transitive_only && !fp.is_transitive() {
            continue;
        }
        let fp_name = describe(&fp, caps);
        let inner = if pairs {
            enumerate_subgroups_up_to_conjugacy(&fp, caps)?
                .into_iter()
                .filter(|f| fp.is_subgroup_of(&f.young_group()))
                .collect()
        } else {
            vec![fp.clone()]
        };
        for f in inner {
            let f_name = describe(&f, caps);
            let report = evaluate_groups(
                d,
                &f,
                &fp,
                GroupSpec::from_group(&f).to_string(),
                GroupSpec::from_group(&fp).to_string(),
                eta_depth,
                caps,
            )?;
            rows.push(SurveyRow {
                index: rows.len() + 1,
                f_name,
                fp_name: fp_name.clone(),
                fp_order: fp.order().to_string(),
                report,
            });
        }
    }
    Ok(Survey {
        d,
        transitive_only,
        pairs,
        rows,
        provenance: None,
    })
}

fn flag(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "yes",
        Some(false) => "no",
        None => "n/a",
    }
}

/// Aligned text table rendered from the survey rows.
pub fn render_survey_text(s: &Survey) -> String {
    let header = [
        "#",
        "F",
        "F'",
        "|F'|",
        "trans",
        "free",
        "genstab",
        "sandwich",
        "virt-S",
        "virt-simple",
        "nondiscrete",
        "in-R",
        "eta",
    ];
    let mut table: Vec<Vec<String>> = vec![header.iter().map(|h| h.to_string()).collect()];
    for row in &s.rows {
        let r = &row.report;
        let yn = |b: bool| flag(Some(b)).to_string();
        table.push(vec![
            row.index.to_string(),
            row.f_name.clone(),
            row.fp_name.clone(),
            row.fp_order.clone(),
            yn(r.facts.fp_transitive),
            yn(r.facts.f_free),
            yn(r.facts.fp_gen_by_stabs),
            yn(r.facts.sandwich()),
            flag(r.verdict("Uc_Fp_virtually_in_S")).into(),
            flag(r.verdict("Gc_virtually_simple")).into(),
            flag(r.verdict("Gc_nondiscrete")).into(),
            flag(r.verdict("Gc_in_R")).into(),
            r.eta
                .as_ref()
                .map(|e| e.primes.to_string())
                .unwrap_or_else(|| "-".into()),
        ]);
    }
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            table
                .iter()
                .map(|row| row[c].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in table {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> GroupSpec {
        GroupSpec::parse(s).unwrap()
    }

    #[test]
    fn alt5_in_sym5() {
        let caps = Caps::default();
        let r = evaluate(5, &spec("Alt(5)"), &spec("Sym(5)"), Some(3), &caps).unwrap();
        let f = r.facts;
        assert!(
            f.f_transitive && f.fp_transitive && f.fp_gen_by_stabs && f.f_le_fp && f.fp_le_young_f
        );
        assert!(!f.f_free);
        assert!(r.applicable);
        for name in [
            "Gc_nondiscrete",
            "Gc_virtually_simple",
            "Gc_in_R",
            "Uc_Fp_virtually_in_S",
        ] {
            assert_eq!(r.verdict(name), Some(true), "{name}");
        }
        assert_eq!(r.eta.unwrap().primes, PrimeSet::new([2, 3]).unwrap());
    }

    #[test]
    fn cyclic_is_discrete() {
        let caps = Caps::default();
        let r = evaluate(5, &spec("Cyc(5)"), &spec("Cyc(5)"), Some(2), &caps).unwrap();
        assert!(r.facts.fp_transitive && !r.facts.fp_gen_by_stabs && r.facts.f_free);
        assert_eq!(r.verdict("Gc_nondiscrete"), Some(false));
        assert_eq!(r.verdict("Gc_in_R"), Some(false));
        assert!(r.eta.unwrap().primes.is_empty());
    }

    #[test]
    fn sym3_and_sandwich() {
        let caps = Caps::default();
        let r = evaluate(3, &spec("Sym(3)"), &spec("Sym(3)"), Some(2), &caps).unwrap();
        assert_eq!(r.verdict("Gc_in_R"), Some(true));
        assert_eq!(r.verdict("Uc_Fp_virtually_in_S"), Some(true));
        assert_eq!(r.eta.unwrap().primes, PrimeSet::new([2]).unwrap());
        let bad = evaluate(3, &spec("Sym(3)"), &spec("Cyc(3)"), None, &caps).unwrap();
        assert!(!bad.applicable);
        assert_eq!(bad.verdict("Gc_in_R"), None);
        assert!(evaluate(4, &spec("Sym(3)"), &spec("Sym(3)"), None, &caps).is_err());
    }

    #[test]
    fn surveys() {
        let caps = Caps::default();
        let s = survey(5, true, false, None, &caps).unwrap();
        assert_eq!(s.rows.len(), 5);
        let good: Vec<&str> = s
            .rows
            .iter()
            .filter(|r| r.report.facts.fp_gen_by_stabs)
            .map(|r| r.fp_name.as_str())
            .collect();
        assert_eq!(good, vec!["D5", "F20", "Alt(5)", "Sym(5)"]);
        let s = survey(3, true, false, None, &caps).unwrap();
        let names: Vec<&str> = s.rows.iter().map(|r| r.fp_name.as_str()).collect();
        assert_eq!(names, vec!["C3", "Sym(3)"]);
        let s = survey(1, false, false, Some(2), &caps).unwrap();
        assert_eq!(s.rows.len(), 1);
        assert!(s.rows[0].report.facts.fp_transitive);
        let text = render_survey_text(&survey(4, true, true, Some(2), &caps).unwrap());
        assert!(text.lines().count() > 6);
    }
}
