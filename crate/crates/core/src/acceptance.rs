//! The acceptance suite: twelve numbered checks, each with a time limit,
//! shared by the `selftest` subcommand and the `acceptance` test target.

use std::collections::HashSet;
use std::fmt;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::caps::Caps;
use crate::criteria::{eta_estimate, evaluate, survey, verdicts};
use crate::error::Result;
use crate::lattice::{cone_family, lattice_checks};
use crate::localaction::{
    ball_group, ball_stabilizer_group, cocycle_holds, edge_ball_group, no_cocompact_instance,
};
use crate::oracle;
use crate::permgroup::{enumerate_subgroups_up_to_conjugacy, GroupSpec, NamedFamily, PermGroup};
use crate::series::{p_part, p_residual, prime_divisors, sylow_subgroup, tate_check, PrimeSet};
use crate::tree::{build_ball, CenterKind, TreeBall};
use crate::wreath::{sylow_tower, wreath_order_formula, wreath_tower};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
    pub limit_s: Option<u64>,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let limit = self
            .limit_s
            .map(|s| format!(", limit {s} s"))
            .unwrap_or_default();
        write!(
            f,
            "criterion {:>2} [{}] {}: {} ({:.2} s{limit})",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.detail,
            self.elapsed_ms as f64 / 1000.0
        )
    }
}

pub const TITLES: [(&str, Option<u64>); 12] = [
    ("Tate sweep over Sym(5) subgroup classes", Some(60)),
    ("O^p series against p'-element closure", Some(60)),
    ("Sylow subgroups of the Sym(<=6) corpus", Some(120)),
    ("Wreath Sylow tower for Alt(4), p = 2", Some(30)),
    ("Wreath order law", None),
    ("Local-action cocycle identity", None),
    ("Ball-order formula against brute force", Some(60)),
    ("Edge-ball product decomposition", None),
    ("Criteria survey for d = 5", Some(120)),
    ("Normal closures in G = RU", None),
    ("Rigid-stabilizer lattice identities", None),
    ("Local prime content estimate", None),
];

/// Runs criterion `id` (1 to 12).
pub fn run(id: u8, seed: u64) -> Outcome {
    let (title, limit_s) = TITLES[(id - 1) as usize];
    let start = Instant::now();
    let result = match id {
        1 => tate_sweep(),
        2 => residual_oracle(),
        3 => sylow_corpus(),
        4 => wreath_sylow(),
        5 => wreath_orders(),
        6 => cocycle(seed),
        7 => ball_orders(),
        8 => edge_balls(),
        9 => survey_d5(),
        10 => no_cocompact(seed),
        11 => lattice(),
        12 => eta(),
        _ => unreachable!("criteria are numbered 1 to 12"),
    };
    let elapsed_ms = start.elapsed().as_millis();
    let (ok, detail) = match result {
        Ok(pair) => pair,
        Err(e) => (false, format!("error: {e}")),
    };
    let in_time = limit_s.is_none_or(|s| elapsed_ms <= u128::from(s) * 1000);
    Outcome {
        id,
        title,
        passed: ok && in_time,
        detail: if in_time {
            detail
        } else {
            format!("{detail}; over the time limit")
        },
        elapsed_ms,
        limit_s,
    }
}

pub fn run_all(seed: u64) -> Vec<Outcome> {
    (1..=12).map(|id| run(id, seed)).collect()
}

type Check = Result<(bool, String)>;

fn caps() -> Caps {
    Caps::default()
}

fn classes(n: usize) -> Result<Vec<PermGroup>> {
    enumerate_subgroups_up_to_conjugacy(&PermGroup::symmetric(n), &caps())
}

/// Every subgroup, by conjugating class representatives.
fn all_subgroups(n: usize) -> Result<Vec<PermGroup>> {
    let sym = PermGroup::symmetric(n);
    let elements = sym.elements(&caps())?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for rep in classes(n)? {
        for x in &elements {
            let gens: Vec<_> = rep.generators().iter().map(|g| x.conjugate(g)).collect();
            let h = PermGroup::new(n, gens)?;
            let mut key = h.elements(&caps())?;
            key.sort();
            if seen.insert(key) {
                out.push(h);
            }
        }
    }
    Ok(out)
}

fn tate_sweep() -> Check {
    let mut checks = 0;
    let mut applicable = 0;
    let mut violations = 0;
    for h in classes(5)? {
        for p in prime_divisors(h.order()) {
            let r = tate_check(&h, p, &caps())?;
            checks += 1;
            if r.hypothesis_holds {
                applicable += 1;
            }
            if !r.consistent() {
                violations += 1;
            }
        }
    }
    Ok((
        violations == 0,
        format!("{checks} (class, prime) pairs, hypothesis held in {applicable}, {violations} violations"),
    ))
}

fn residual_oracle() -> Check {
    let subgroups = all_subgroups(5)?;
    let mut pairs = 0;
    let mut mismatches = 0;
    for h in &subgroups {
        let elements = h.elements(&caps())?;
        for p in [2, 3, 5] {
            let series = p_residual(h, p)?;
            let brute = oracle::p_residual_order(&elements, 5, p, &caps())?;
            pairs += 1;
            if series.order() != &BigUint::from(brute) || !series.is_subgroup_of(h) {
                mismatches += 1;
            }
        }
    }
    Ok((
        mismatches == 0,
        format!(
            "{} subgroups, {pairs} (subgroup, prime) pairs, {mismatches} mismatches",
            subgroups.len()
        ),
    ))
}

fn sylow_corpus() -> Check {
    let mut pairs = 0;
    let mut failures = 0;
    let mut groups = 0;
    for n in 1..=6 {
        for g in classes(n)? {
            groups += 1;
            for p in prime_divisors(g.order()) {
                let s = sylow_subgroup(&g, p, &caps())?;
                let brute = oracle::closure(n, s.generators(), &caps())?.len();
                let index = g.order() / s.order();
                let ok = s.is_subgroup_of(&g)
                    && s.order() == &p_part(g.order(), p).0
                    && BigUint::from(brute) == *s.order()
                    && p_part(&index, p).0.is_one();
                pairs += 1;
                if !ok {
                    failures += 1;
                }
            }
        }
    }
    Ok((
        failures == 0,
        format!("{groups} groups, {pairs} (group, prime) pairs, {failures} failures"),
    ))
}

fn wreath_sylow() -> Check {
    let alt4 = PermGroup::alternating(4);
    let klein = NamedFamily::Klein4.group()?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (depth, small, big, index) in [(1, 4u64, 12u64, 3u64), (2, 1024, 248_832, 243)] {
        let t = sylow_tower(&alt4, 2, depth, &caps())?;
        let v = wreath_tower(&klein, depth, &caps())?;
        let good = t.certified()
            && t.tower.group().same_group(v.group())
            && v.group().is_subgroup_of(t.ambient.group())
            && t.tower.order() == &BigUint::from(small)
            && t.ambient.order() == &BigUint::from(big)
            && t.index == BigUint::from(index)
            && index % 2 == 1;
        ok &= good;
        parts.push(format!(
            "depth {depth}: {} in {}, index {}",
            t.tower.order(),
            t.ambient.order(),
            t.index
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn wreath_orders() -> Check {
    let bases = [
        ("Sym(2)", PermGroup::symmetric(2)),
        ("Sym(3)", PermGroup::symmetric(3)),
        ("Klein4", NamedFamily::Klein4.group()?),
        ("Alt(4)", PermGroup::alternating(4)),
    ];
    let mut towers = 0;
    let mut mismatches = 0;
    for (_, f) in &bases {
        for n in 0..=3 {
            let t = wreath_tower(f, n, &caps())?;
            let generic = PermGroup::new(t.leaf_count(), t.group().generators().to_vec())?;
            towers += 1;
            if t.order() != &wreath_order_formula(f.order(), f.degree(), n)
                || generic.order() != t.order()
            {
                mismatches += 1;
            }
        }
    }
    Ok((
        mismatches == 0,
        format!("{towers} towers up to depth 3, tree chain and Schreier-Sims both checked, {mismatches} order mismatches"),
    ))
}

fn legal_ball(d: usize, r: usize, center: CenterKind) -> Result<TreeBall> {
    Ok(build_ball(d, r, center, &caps())?.legal_coloring())
}

fn cocycle(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evaluations = 0;
    let mut violations = 0;
    let mut configs = 0;
    for d in [3, 4] {
        for r in [1, 2] {
            for f in [PermGroup::symmetric(d), PermGroup::alternating(d)] {
                let ball = legal_ball(d, r, CenterKind::Vertex)?;
                let b = ball_group(&ball, &f, &caps())?;
                configs += 1;
                for _ in 0..1000 {
                    let g = b.random_element(&mut rng);
                    let h = b.random_element(&mut rng);
                    for v in ball.interior_vertices() {
                        evaluations += 1;
                        if !cocycle_holds(&ball, &g, &h, v)? {
                            violations += 1;
                        }
                    }
                }
            }
        }
    }
    Ok((
        violations == 0,
        format!("{configs} configurations x 1000 pairs, {evaluations} vertex checks, {violations} violations"),
    ))
}

fn ball_orders() -> Check {
    let cases: Vec<(usize, usize, &str)> = vec![
        (3, 1, "Sym(3)"),
        (3, 2, "Sym(3)"),
        (3, 1, "Cyc(3)"),
        (3, 2, "Cyc(3)"),
        (4, 1, "Sym(4)"),
        (4, 1, "Alt(4)"),
        (4, 1, "Dih(4)"),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, r, spec) in cases {
        let f = GroupSpec::parse(spec)?.resolve()?;
        let ball = legal_ball(d, r, CenterKind::Vertex)?;
        let b = ball_stabilizer_group(&ball, &f, &caps())?;
        let local = f.elements(&caps())?;
        let brute = oracle::ball_group_elements(&ball, &local).len();
        let good = Some(b.order()) == b.formula_order()
            && b.order() == &BigUint::from(brute)
            && b.order() == b.graft_count();
        ok &= good;
        parts.push(format!("d={d} r={r} {spec}: {}", b.order()));
    }
    Ok((ok, parts.join(", ")))
}

fn edge_balls() -> Check {
    let f = PermGroup::symmetric(3);
    let mut ok = true;
    let mut parts = Vec::new();
    for (r, expected) in [(1, 4u32), (2, 64)] {
        let ball = legal_ball(3, r, CenterKind::Edge)?;
        let b = edge_ball_group(&ball, &f, &caps())?;
        let report = b.tits_report(&caps())?;
        let brute = oracle::ball_group_elements(&ball, &f.elements(&caps())?).len();
        let good = report.holds()
            && report.halves_match_wreath
            && report.endpoint_fixing_order == expected.to_string()
            && b.order() == &BigUint::from(brute);
        ok &= good;
        parts.push(format!(
            "r={r}: endpoint-fixing {} = {} x {}",
            report.endpoint_fixing_order, report.half_orders[0], report.half_orders[1]
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn survey_d5() -> Check {
    let c = caps();
    let s = survey(5, true, false, None, &c)?;
    let good_orders: Vec<String> = s
        .rows
        .iter()
        .filter(|r| r.report.facts.fp_gen_by_stabs)
        .map(|r| r.fp_order.clone())
        .collect();
    let mut ok = s.rows.len() == 5 && good_orders == ["10", "20", "60", "120"];

    let alt = GroupSpec::parse("Alt(5)")?;
    let sym = GroupSpec::parse("Sym(5)")?;
    let pair = evaluate(5, &alt, &sym, None, &c)?;
    ok &= ["Gc_nondiscrete", "Gc_virtually_simple", "Gc_in_R"]
        .iter()
        .all(|v| pair.verdict(v) == Some(true));
    let brute = oracle::facts(
        &alt.resolve()?.elements(&c)?,
        &sym.resolve()?.elements(&c)?,
        5,
        &c,
    )?;
    ok &= brute == pair.facts;

    let mut rows = 0;
    let mut mismatches = 0;
    for d in 1..=5 {
        for row in survey(d, false, d <= 4, None, &c)?.rows {
            let f = GroupSpec::parse(&row.report.inputs.f)?.resolve()?;
            let fp = GroupSpec::parse(&row.report.inputs.f_prime)?.resolve()?;
            let facts = oracle::facts(&f.elements(&c)?, &fp.elements(&c)?, d, &c)?;
            rows += 1;
            if facts != row.report.facts || verdicts(d, &facts) != row.report.verdicts {
                mismatches += 1;
            }
        }
    }
    ok &= mismatches == 0;
    Ok((
        ok,
        format!(
            "5 transitive classes, gen-by-stabs on orders {}; {rows} survey rows re-derived by brute force, {mismatches} mismatches",
            good_orders.join("/")
        ),
    ))
}

fn no_cocompact(seed: u64) -> Check {
    let c = caps();
    let mut corpus = vec![
        PermGroup::symmetric(4),
        PermGroup::symmetric(5),
        PermGroup::alternating(5),
        NamedFamily::Frobenius20.group()?,
    ];
    for (d, r, f) in [
        (3, 1, PermGroup::symmetric(3)),
        (3, 2, PermGroup::symmetric(3)),
        (3, 2, PermGroup::cyclic(3)),
        (4, 1, PermGroup::alternating(4)),
    ] {
        corpus.push(
            ball_group(&legal_ball(d, r, CenterKind::Vertex)?, &f, &c)?
                .group()
                .clone(),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 10);
    let mut violations = 0;
    let mut nontrivial = 0;
    for i in 0..1000 {
        let g = &corpus[i % corpus.len()];
        let moved: Vec<usize> = (0..g.degree())
            .filter(|&x| g.generators().iter().any(|s| !s.fixes(x)))
            .collect();
        let x = moved[rng.gen_range(0..moved.len())];
        let u = g.point_stabilizer(x)?;
        let inst = no_cocompact_instance(g, &u, &mut rng, &c)?;
        if !inst.k.is_trivial() {
            nontrivial += 1;
        }
        if !inst.holds || !inst.k.is_normal_in(&inst.r) || !inst.k.is_subgroup_of(&u) {
            violations += 1;
        }
    }
    Ok((
        violations == 0,
        format!("1000 instances ({nontrivial} with K nontrivial), {violations} violations"),
    ))
}

fn lattice() -> Check {
    let c = caps();
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, f) in [
        ("Sym(2)", PermGroup::symmetric(2)),
        ("Klein4", NamedFamily::Klein4.group()?),
    ] {
        for n in 1..=3 {
            let t = wreath_tower(&f, n, &c)?;
            let report = lattice_checks(t.group(), &cone_family(&t), 5_000, &c)?;
            ok &= report.holds();
            parts.push(format!("W_{n}({name}) {} pairs", report.pairs.len()));
        }
    }
    Ok((ok, parts.join(", ")))
}

fn eta() -> Check {
    let c = caps();
    let mut ok = true;
    let mut groups = 0;
    for d in 3..=5 {
        for f in classes(d)? {
            if !f.is_transitive() {
                continue;
            }
            groups += 1;
            let e2 = eta_estimate(&f, 2, &c)?;
            let e3 = eta_estimate(&f, 3, &c)?;
            let expected = PrimeSet::dividing(f.point_stabilizer(0)?.order());
            ok &= e2.primes == e3.primes && e2.primes == expected;
        }
    }
    let alt5 = eta_estimate(&PermGroup::alternating(5), 3, &c)?;
    ok &= alt5.primes == PrimeSet::new([2, 3])?;
    Ok((
        ok,
        format!(
            "{groups} transitive groups stable from depth 2 to 3; Alt(5), d=5 gives {}",
            alt5.primes
        ),
    ))
}
