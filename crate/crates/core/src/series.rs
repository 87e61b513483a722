//! Sylow subgroups, π-cores, p-residuals, Frattini-quotient ranks and the
//! normal p-complement check of Tate.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::permgroup::{PermGroup, Permutation};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Largest power of `p` dividing `n`, and its exponent.
pub fn p_part(n: &BigUint, p: u64) -> (BigUint, u32) {
    let p = BigUint::from(p);
    let mut n = n.clone();
    let mut part = BigUint::one();
    let mut e = 0;
    if n.is_zero() {
        return (part, 0);
    }
    while (&n % &p).is_zero() {
        n /= &p;
        part *= &p;
        e += 1;
    }
    (part, e)
}

/// Prime divisors of `n`, ascending. `n` must have no prime factor above 2^32.
pub fn prime_divisors(n: &BigUint) -> Vec<u64> {
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut d = 2u64;
    while !n.is_one() && !n.is_zero() {
        let bd = BigUint::from(d);
        if &bd * &bd > n {
            out.push(n.to_u64().expect("prime factor fits in u64"));
            break;
        }
        if (&n % &bd).is_zero() {
            out.push(d);
            while (&n % &bd).is_zero() {
                n /= &bd;
            }
        }
        d += 1;
    }
    out
}

fn is_pi_number(n: &BigUint, primes: &PrimeSet) -> bool {
    let mut n = n.clone();
    for &p in &primes.0 {
        let (part, _) = p_part(&n, p);
        n /= part;
    }
    n.is_one()
}

/// A finite set of primes, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct PrimeSet(Vec<u64>);

impl PrimeSet {
    pub fn new(primes: impl IntoIterator<Item = u64>) -> Result<PrimeSet> {
        let mut v: Vec<u64> = primes.into_iter().collect();
        for &p in &v {
            require_prime(p)?;
        }
        v.sort_unstable();
        v.dedup();
        Ok(PrimeSet(v))
    }

    pub fn dividing(n: &BigUint) -> PrimeSet {
        PrimeSet(prime_divisors(n))
    }

    pub fn primes(&self) -> &[u64] {
        &self.0
    }

    pub fn contains(&self, p: u64) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Primes dividing `n` that are not in `self`.
    pub fn complement_in(&self, n: &BigUint) -> PrimeSet {
        PrimeSet(
            prime_divisors(n)
                .into_iter()
                .filter(|p| !self.contains(*p))
                .collect(),
        )
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    Sylow,
    PiCore,
    PResidual,
    FrattiniRank,
}

/// Audit trail of a series computation. Every claim can be re-checked
/// against the groups with [`SeriesCertificate::verify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesCertificate {
    pub kind: SeriesKind,
    pub primes: Vec<u64>,
    pub group_order: String,
    pub subgroup_order: String,
    pub index: String,
    /// Orders along the computed series, top first.
    pub series: Vec<String>,
    pub subgroup_generators: Vec<String>,
    /// Generator conjugates sift back into the subgroup.
    pub normal: bool,
    pub rank: Option<u32>,
}

impl SeriesCertificate {
    fn new(kind: SeriesKind, primes: Vec<u64>, g: &PermGroup, h: &PermGroup) -> Self {
        SeriesCertificate {
            kind,
            primes,
            group_order: g.order().to_string(),
            subgroup_order: h.order().to_string(),
            index: (g.order() / h.order()).to_string(),
            series: vec![g.order().to_string(), h.order().to_string()],
            subgroup_generators: h.generators().iter().map(|x| x.to_string()).collect(),
            normal: h.is_normal_in(g),
            rank: None,
        }
    }

    /// Re-checks orders, index arithmetic, normality and the kind-specific
    /// order condition against `g` and the certified subgroup `h`.
    pub fn verify(&self, g: &PermGroup, h: &PermGroup) -> bool {
        let orders_ok = self.group_order == g.order().to_string()
            && self.subgroup_order == h.order().to_string()
            && (g.order() % h.order()).is_zero()
            && self.index == (g.order() / h.order()).to_string()
            && h.is_subgroup_of(g);
        let normal_ok = self.normal == h.is_normal_in(g);
        let index = g.order() / h.order();
        let kind_ok = match self.kind {
            SeriesKind::Sylow => {
                let p = self.primes[0];
                h.order() == &p_part(g.order(), p).0 && p_part(&index, p).1 == 0
            }
            SeriesKind::PiCore => {
                let pi = PrimeSet(self.primes.clone());
                self.normal && is_pi_number(h.order(), &pi)
            }
            SeriesKind::PResidual => {
                let p = self.primes[0];
                self.normal && is_pi_number(&index, &PrimeSet(vec![p]))
            }
            SeriesKind::FrattiniRank => {
                let p = self.primes[0];
                self.normal
                    && self
                        .rank
                        .map(|r| index == BigUint::from(p).pow(r))
                        .unwrap_or(false)
            }
        };
        orders_ok && normal_ok && kind_ok
    }
}

/// A Sylow p-subgroup. Starts from a p-element of largest order and keeps
/// adjoining p-elements that normalize the current p-subgroup.
pub fn sylow_subgroup(g: &PermGroup, p: u64, caps: &Caps) -> Result<PermGroup> {
    Ok(sylow_with_certificate(g, p, caps)?.0)
}

pub fn sylow_with_certificate(
    g: &PermGroup,
    p: u64,
    caps: &Caps,
) -> Result<(PermGroup, SeriesCertificate)> {
    require_prime(p)?;
    let (target, _) = p_part(g.order(), p);
    if target.is_one() {
        let t = PermGroup::trivial(g.degree());
        let cert = SeriesCertificate::new(SeriesKind::Sylow, vec![p], g, &t);
        return Ok((t, cert));
    }
    let elements = g.elements(caps)?;
    let p_elements: Vec<&Permutation> = elements
        .iter()
        .filter(|x| !x.is_identity() && is_p_power(x.order(), p))
        .collect();
    let start = p_elements
        .iter()
        .max_by_key(|x| (x.order(), std::cmp::Reverse(*x)))
        .expect("p divides |G| so a p-element exists");
    let mut s = PermGroup::new(g.degree(), vec![(*start).clone()])?;
    let mut series = vec![s.order().to_string()];
    while s.order() != &target {
        let next = p_elements
            .iter()
            .find(|x| !s.contains(x) && s.generators().iter().all(|y| s.contains(&x.conjugate(y))))
            .expect("a proper p-subgroup is properly contained in its normalizer's p-part");
        s = s.extended([(*next).clone()]);
        series.push(s.order().to_string());
    }
    let mut cert = SeriesCertificate::new(SeriesKind::Sylow, vec![p], g, &s);
    cert.series = series;
    Ok((s, cert))
}

fn is_p_power(mut n: u64, p: u64) -> bool {
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

/// `O_π(G)`: the largest normal subgroup whose order is a π-number.
pub fn pi_core(g: &PermGroup, pi: &PrimeSet, caps: &Caps) -> Result<PermGroup> {
    Ok(pi_core_with_certificate(g, pi, caps)?.0)
}

pub fn pi_core_with_certificate(
    g: &PermGroup,
    pi: &PrimeSet,
    caps: &Caps,
) -> Result<(PermGroup, SeriesCertificate)> {
    let elements = g.elements(caps)?;
    let mut core = PermGroup::trivial(g.degree());
    let mut series = vec![core.order().to_string()];
    let mut done: HashSet<Permutation> = HashSet::new();
    for x in &elements {
        if done.contains(x) || core.contains(x) {
            continue;
        }
        for c in conjugacy_class(g, x) {
            done.insert(c);
        }
        if !is_pi_number(&BigUint::from(x.order()), pi) {
            continue;
        }
        // x lies in O_π iff the normal closure of core ∪ {x} is still a π-group.
        let mut seeds = core.generators().to_vec();
        seeds.push(x.clone());
        let candidate = g.normal_closure_of(seeds);
        if is_pi_number(candidate.order(), pi) {
            core = candidate;
            series.push(core.order().to_string());
        }
    }
    let mut cert = SeriesCertificate::new(SeriesKind::PiCore, pi.primes().to_vec(), g, &core);
    series.push(g.order().to_string());
    series.reverse();
    cert.series = series;
    Ok((core, cert))
}

fn conjugacy_class(g: &PermGroup, x: &Permutation) -> Vec<Permutation> {
    let mut seen: HashSet<Permutation> = HashSet::new();
    seen.insert(x.clone());
    let mut class = vec![x.clone()];
    let mut i = 0;
    while i < class.len() {
        let y = class[i].clone();
        for s in g.generators() {
            let z = s.conjugate(&y);
            if seen.insert(z.clone()) {
                class.push(z);
            }
        }
        i += 1;
    }
    class
}

/// `G^p [G, G]`: the normal closure of `s^p` and `[s, t]` over generators.
pub fn elementary_abelian_kernel(g: &PermGroup, p: u64) -> PermGroup {
    let gens = g.generators();
    let mut seeds = Vec::new();
    for (i, s) in gens.iter().enumerate() {
        seeds.push(s.pow(p));
        for t in &gens[i + 1..] {
            seeds.push(s.commutator(t).expect("same degree"));
        }
    }
    seeds.retain(|x| !x.is_identity());
    g.normal_closure_of(seeds)
}

/// `O^p(G)` via the series `N_{i+1} = N_i^p [N_i, N_i]` until it stabilizes.
pub fn p_residual(g: &PermGroup, p: u64) -> Result<PermGroup> {
    Ok(p_residual_with_certificate(g, p)?.0)
}

pub fn p_residual_with_certificate(
    g: &PermGroup,
    p: u64,
) -> Result<(PermGroup, SeriesCertificate)> {
    require_prime(p)?;
    let mut n = g.clone();
    let mut series = vec![n.order().to_string()];
    loop {
        let next = elementary_abelian_kernel(&n, p);
        if next.order() == n.order() {
            break;
        }
        n = next;
        series.push(n.order().to_string());
    }
    let mut cert = SeriesCertificate::new(SeriesKind::PResidual, vec![p], g, &n);
    cert.series = series;
    Ok((n, cert))
}

/// Rank of `G / G^p[G,G]` as an elementary abelian p-group.
pub fn frattini_quotient_rank(g: &PermGroup, p: u64) -> Result<u32> {
    Ok(frattini_with_certificate(g, p)?.0)
}

pub fn frattini_with_certificate(g: &PermGroup, p: u64) -> Result<(u32, SeriesCertificate)> {
    require_prime(p)?;
    let k = elementary_abelian_kernel(g, p);
    let index = g.order() / k.order();
    let (part, rank) = p_part(&index, p);
    debug_assert_eq!(part, index);
    let mut cert = SeriesCertificate::new(SeriesKind::FrattiniRank, vec![p], g, &k);
    cert.rank = Some(rank);
    Ok((rank, cert))
}

/// Outcome of checking Tate's normal p-complement criterion on `G`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TateReport {
    pub prime: u64,
    pub group_order: String,
    pub sylow_order: String,
    pub sylow_rank: u32,
    pub group_rank: u32,
    pub residual_order: String,
    pub intersection_order: String,
    /// `S/S^p[S,S] ≅ G/G^p[G,G]`, decided by equal ranks.
    pub hypothesis_holds: bool,
    /// `S ∩ O^p(G) = 1`.
    pub conclusion_holds: bool,
    pub certificates: Vec<SeriesCertificate>,
}

impl TateReport {
    /// The implication the theorem asserts.
    pub fn consistent(&self) -> bool {
        !self.hypothesis_holds || self.conclusion_holds
    }
}

pub fn tate_check(g: &PermGroup, p: u64, caps: &Caps) -> Result<TateReport> {
    let (s, sylow_cert) = sylow_with_certificate(g, p, caps)?;
    let (sylow_rank, _) = frattini_with_certificate(&s, p)?;
    let (group_rank, rank_cert) = frattini_with_certificate(g, p)?;
    let (residual, residual_cert) = p_residual_with_certificate(g, p)?;
    let meet = s.intersection(&residual, caps)?;
    Ok(TateReport {
        prime: p,
        group_order: g.order().to_string(),
        sylow_order: s.order().to_string(),
        sylow_rank,
        group_rank,
        residual_order: residual.order().to_string(),
        intersection_order: meet.order().to_string(),
        hypothesis_holds: sylow_rank == group_rank,
        conclusion_holds: meet.is_trivial(),
        certificates: vec![sylow_cert, rank_cert, residual_cert],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::NamedFamily;

    fn caps() -> Caps {
        Caps::default()
    }

    fn named(f: NamedFamily) -> PermGroup {
        f.group().unwrap()
    }

    #[test]
    fn sylow_examples() {
        let s3 = PermGroup::symmetric(3);
        assert_eq!(
            sylow_subgroup(&s3, 2, &caps()).unwrap().order_u64(),
            Some(2)
        );
        let (s, cert) = sylow_with_certificate(&PermGroup::symmetric(4), 2, &caps()).unwrap();
        assert_eq!(s.order_u64(), Some(8));
        assert_eq!(cert.index, "3");
        assert!(cert.verify(&PermGroup::symmetric(4), &s));
        assert!(sylow_subgroup(&PermGroup::trivial(1), 3, &caps())
            .unwrap()
            .is_trivial());
        assert!(sylow_subgroup(&PermGroup::cyclic(5), 2, &caps())
            .unwrap()
            .is_trivial());
        assert_eq!(
            sylow_subgroup(&s3, 4, &caps()).unwrap_err(),
            Error::NotPrime(4)
        );
    }

    #[test]
    fn pi_core_examples() {
        let s4 = PermGroup::symmetric(4);
        let two = PrimeSet::new([2]).unwrap();
        let (core, cert) = pi_core_with_certificate(&s4, &two, &caps()).unwrap();
        assert_eq!(core.order_u64(), Some(4));
        assert!(cert.verify(&s4, &core));
        assert!(pi_core(&s4, &PrimeSet::new([3]).unwrap(), &caps())
            .unwrap()
            .is_trivial());
        let all = PrimeSet::dividing(s4.order());
        assert!(pi_core(&s4, &all, &caps()).unwrap().same_group(&s4));
    }

    #[test]
    fn residual_examples() {
        let (r, cert) = p_residual_with_certificate(&PermGroup::symmetric(4), 2).unwrap();
        assert_eq!(r.order_u64(), Some(12));
        assert!(cert.verify(&PermGroup::symmetric(4), &r));
        assert_eq!(
            p_residual(&PermGroup::symmetric(3), 2).unwrap().order_u64(),
            Some(3)
        );
        assert!(p_residual(&named(NamedFamily::Dihedral(4)), 2)
            .unwrap()
            .is_trivial());
    }

    #[test]
    fn frattini_rank_examples() {
        assert_eq!(
            frattini_quotient_rank(&named(NamedFamily::Dihedral(4)), 2).unwrap(),
            2
        );
        assert_eq!(
            frattini_quotient_rank(&PermGroup::symmetric(4), 2).unwrap(),
            1
        );
        assert_eq!(frattini_quotient_rank(&PermGroup::cyclic(5), 2).unwrap(), 0);
        assert_eq!(
            frattini_quotient_rank(&named(NamedFamily::Klein4), 2).unwrap(),
            2
        );
    }

    #[test]
    fn tate_examples() {
        let r = tate_check(&PermGroup::symmetric(3), 2, &caps()).unwrap();
        assert!(r.hypothesis_holds && r.conclusion_holds);
        let r = tate_check(&PermGroup::symmetric(4), 2, &caps()).unwrap();
        assert_eq!((r.sylow_rank, r.group_rank), (2, 1));
        assert!(!r.hypothesis_holds);
        assert!(!r.conclusion_holds);
        assert_eq!(r.intersection_order, "4");
        let r = tate_check(&named(NamedFamily::Dihedral(4)), 2, &caps()).unwrap();
        assert!(r.hypothesis_holds && r.conclusion_holds);
    }

    #[test]
    fn prime_helpers() {
        assert_eq!(prime_divisors(&BigUint::from(360u32)), vec![2, 3, 5]);
        assert_eq!(prime_divisors(&BigUint::from(1u32)), Vec::<u64>::new());
        assert_eq!(
            p_part(&BigUint::from(248832u32), 2),
            (BigUint::from(1024u32), 10)
        );
        assert!(PrimeSet::new([4]).is_err());
        let s = PrimeSet::new([3, 2, 3]).unwrap();
        assert_eq!(s.to_string(), "{2,3}");
        assert_eq!(s.complement_in(&BigUint::from(60u32)).primes(), &[5]);
    }
}
