//! Permutation groups backed by a base and strong generating set.

mod bsgs;
mod perm;
mod spec;
mod subgroups;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng;

use crate::caps::Caps;
use crate::error::{Error, Result};

pub(crate) use bsgs::Gen;
use bsgs::StabChain;
pub(crate) use perm::parse_cycle_list;
pub use perm::Permutation;
pub use spec::{GroupSpec, NamedFamily};
pub use subgroups::enumerate_subgroups_up_to_conjugacy;

/// A finitely generated permutation group. The stabilizer chain is built
/// eagerly, so a `PermGroup` is immutable and can be shared across threads.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: StabChain,
    order: BigUint,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<PermGroup> {
        if degree == 0 {
            return Err(Error::Input("degree must be positive".into()));
        }
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    left: degree,
                    right: g.degree(),
                });
            }
        }
        Ok(PermGroup::build(degree, generators, &[]))
    }

    fn build(degree: usize, generators: Vec<Permutation>, prefix: &[usize]) -> PermGroup {
        let chain = StabChain::build(degree, &generators, prefix);
        let order = chain.order();
        PermGroup {
            degree,
            generators,
            chain,
            order,
        }
    }

    /// A group whose stabilizer chain is already known; see
    /// [`StabChain::from_levels`].
    pub(crate) fn from_levels(
        degree: usize,
        generators: Vec<Permutation>,
        levels: Vec<(usize, Vec<std::sync::Arc<Gen>>)>,
    ) -> PermGroup {
        let chain = StabChain::from_levels(degree, levels);
        let order = chain.order();
        PermGroup {
            degree,
            generators,
            chain,
            order,
        }
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup::build(degree.max(1), Vec::new(), &[])
    }

    pub fn symmetric(n: usize) -> PermGroup {
        NamedFamily::Symmetric(n).group().expect("valid family")
    }

    pub fn alternating(n: usize) -> PermGroup {
        NamedFamily::Alternating(n).group().expect("valid family")
    }

    pub fn cyclic(n: usize) -> PermGroup {
        NamedFamily::Cyclic(n).group().expect("valid family")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// The order as a `u64`, if it fits.
    pub fn order_u64(&self) -> Option<u64> {
        self.order.to_u64()
    }

    pub fn is_trivial(&self) -> bool {
        self.order.is_one()
    }

    pub fn base(&self) -> Vec<usize> {
        self.chain.base()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.chain.contains(p)
    }

    /// `self ≤ other` (every generator of `self` lies in `other`).
    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.generators.iter().all(|g| other.contains(g))
    }

    pub fn same_group(&self, other: &PermGroup) -> bool {
        self.order == other.order && self.is_subgroup_of(other)
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.degree)
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        self.chain.random_element(rng)
    }

    pub fn for_each_element(&self, f: impl FnMut(&Permutation)) {
        self.chain.for_each_element(f)
    }

    /// All elements, refusing groups above the element cap.
    pub fn elements(&self, caps: &Caps) -> Result<Vec<Permutation>> {
        caps.check_elements(&self.order)?;
        let mut out = Vec::with_capacity(self.order_u64().unwrap_or(0) as usize);
        self.for_each_element(|g| out.push(g.clone()));
        Ok(out)
    }

    fn check_point(&self, a: usize) -> Result<()> {
        if a >= self.degree {
            return Err(Error::PointOutOfRange {
                point: a,
                degree: self.degree,
            });
        }
        Ok(())
    }

    fn check_degree(&self, other: &PermGroup) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        Ok(())
    }

    fn require_subgroup(&self, sub: &PermGroup, what: &str) -> Result<()> {
        self.check_degree(sub)?;
        if let Some(g) = sub.generators.iter().find(|g| !self.contains(g)) {
            return Err(Error::NotSubgroup(format!(
                "{what} generator {g} is not in the ambient group"
            )));
        }
        Ok(())
    }

    /// The orbit of `a`, sorted.
    pub fn orbit(&self, a: usize) -> Result<Vec<usize>> {
        self.check_point(a)?;
        let mut seen = vec![false; self.degree];
        let mut orbit = vec![a];
        seen[a] = true;
        let mut i = 0;
        while i < orbit.len() {
            let x = orbit[i];
            for g in &self.generators {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                }
            }
            i += 1;
        }
        orbit.sort_unstable();
        Ok(orbit)
    }

    /// The orbit partition, each orbit sorted, orbits ordered by least point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for a in 0..self.degree {
            if seen[a] {
                continue;
            }
            let orbit = self.orbit(a).expect("in range");
            for &x in &orbit {
                seen[x] = true;
            }
            out.push(orbit);
        }
        out
    }

    pub fn point_stabilizer(&self, a: usize) -> Result<PermGroup> {
        self.check_point(a)?;
        self.pointwise_stabilizer(&[a])
    }

    /// Elements fixing every point of `points`.
    pub fn pointwise_stabilizer(&self, points: &[usize]) -> Result<PermGroup> {
        for &a in points {
            self.check_point(a)?;
        }
        let mut prefix = Vec::new();
        let mut seen = HashSet::new();
        for &a in points {
            if seen.insert(a) {
                prefix.push(a);
            }
        }
        let chain = StabChain::build(self.degree, &self.generators, &prefix);
        Ok(PermGroup::build(
            self.degree,
            chain.stabilizer_gens(prefix.len()),
            &[],
        ))
    }

    /// Elements mapping the point set onto itself.
    pub fn setwise_stabilizer(&self, points: &[usize], caps: &Caps) -> Result<PermGroup> {
        let set: BTreeSet<usize> = points.iter().copied().collect();
        self.subgroup_by_filter(caps, |g| set.iter().all(|&x| set.contains(&g.apply(x))))
    }

    /// Subgroup of elements satisfying a predicate that is closed under the
    /// group law. Exhaustive, capped.
    pub(crate) fn subgroup_by_filter(
        &self,
        caps: &Caps,
        mut keep: impl FnMut(&Permutation) -> bool,
    ) -> Result<PermGroup> {
        caps.check_elements(&self.order)?;
        let mut kept = Vec::new();
        self.for_each_element(|g| {
            if !g.is_identity() && keep(g) {
                kept.push(g.clone());
            }
        });
        Ok(PermGroup::generated_greedily(self.degree, kept))
    }

    /// Group generated by `elements`, using only those that enlarge it.
    pub(crate) fn generated_greedily(degree: usize, elements: Vec<Permutation>) -> PermGroup {
        let mut gens: Vec<Permutation> = Vec::new();
        let mut current = PermGroup::trivial(degree);
        for e in elements {
            if !current.contains(&e) {
                gens.push(e);
                current = PermGroup::build(degree, gens.clone(), &[]);
            }
        }
        current
    }

    /// Adds generators, keeping the existing ones first.
    pub fn extended(&self, extra: impl IntoIterator<Item = Permutation>) -> PermGroup {
        let mut gens = self.generators.clone();
        let mut changed = false;
        let mut current = self.clone();
        for e in extra {
            if !current.contains(&e) {
                gens.push(e);
                current = PermGroup::build(self.degree, gens.clone(), &[]);
                changed = true;
            }
        }
        if changed {
            current
        } else {
            self.clone()
        }
    }

    pub fn normal_closure(&self, k: &PermGroup) -> Result<PermGroup> {
        self.require_subgroup(k, "normal closure input")?;
        Ok(self.normal_closure_of(k.generators.clone()))
    }

    /// Smallest normal subgroup containing the given elements (assumed in `self`).
    pub(crate) fn normal_closure_of(&self, seeds: Vec<Permutation>) -> PermGroup {
        let mut n = PermGroup::generated_greedily(self.degree, seeds);
        loop {
            let mut added = Vec::new();
            for x in n.generators() {
                for g in &self.generators {
                    let y = g.conjugate(x);
                    if !n.contains(&y) && !added.contains(&y) {
                        added.push(y);
                    }
                }
            }
            if added.is_empty() {
                return n;
            }
            n = n.extended(added);
        }
    }

    /// Largest normal subgroup of `self` inside `u`.
    pub fn normal_core(&self, u: &PermGroup, caps: &Caps) -> Result<PermGroup> {
        self.require_subgroup(u, "normal core input")?;
        let mut core = u.clone();
        loop {
            let mut shrunk = false;
            for g in &self.generators {
                if core
                    .generators
                    .iter()
                    .all(|x| core.contains(&g.conjugate(x)))
                {
                    continue;
                }
                let conj = PermGroup::build(
                    self.degree,
                    core.generators.iter().map(|x| g.conjugate(x)).collect(),
                    &[],
                );
                core = core.intersection(&conj, caps)?;
                shrunk = true;
            }
            if !shrunk {
                return Ok(core);
            }
        }
    }

    pub fn is_normal_in(&self, g: &PermGroup) -> bool {
        self.is_subgroup_of(g)
            && self
                .generators
                .iter()
                .all(|x| g.generators.iter().all(|h| self.contains(&h.conjugate(x))))
    }

    pub fn derived_subgroup(&self) -> PermGroup {
        let mut seeds = Vec::new();
        for (i, a) in self.generators.iter().enumerate() {
            for b in &self.generators[i + 1..] {
                let c = a.commutator(b).expect("same degree");
                if !c.is_identity() {
                    seeds.push(c);
                }
            }
        }
        self.normal_closure_of(seeds)
    }

    /// `C_self(h)`: elements of `self` commuting with every generator of `h`.
    pub fn centralizer(&self, h: &PermGroup, caps: &Caps) -> Result<PermGroup> {
        self.check_degree(h)?;
        let hg = h.generators.clone();
        self.subgroup_by_filter(caps, |g| hg.iter().all(|x| g.commutes_with(x)))
    }

    pub fn center(&self, caps: &Caps) -> Result<PermGroup> {
        self.centralizer(self, caps)
    }

    pub fn normalizer(&self, h: &PermGroup, caps: &Caps) -> Result<PermGroup> {
        self.check_degree(h)?;
        self.subgroup_by_filter(caps, |g| {
            h.generators.iter().all(|x| h.contains(&g.conjugate(x)))
        })
    }

    /// Enumerates the smaller group and keeps members of the other.
    pub fn intersection(&self, other: &PermGroup, caps: &Caps) -> Result<PermGroup> {
        self.check_degree(other)?;
        let (small, big) = if self.order <= other.order {
            (self, other)
        } else {
            (other, self)
        };
        if small.is_subgroup_of(big) {
            return Ok(small.clone());
        }
        small.subgroup_by_filter(caps, |g| big.contains(g))
    }

    pub fn is_transitive(&self) -> bool {
        self.orbit(0)
            .map(|o| o.len() == self.degree)
            .unwrap_or(false)
    }

    /// Every point stabilizer is trivial.
    pub fn acts_freely(&self) -> bool {
        self.orbits()
            .iter()
            .all(|o| BigUint::from(o.len()) == self.order)
    }

    pub fn subgroup_generated_by_point_stabilizers(&self) -> PermGroup {
        let mut gens = Vec::new();
        for a in 0..self.degree {
            gens.extend(self.point_stabilizer(a).expect("in range").generators);
        }
        PermGroup::generated_greedily(self.degree, gens)
    }

    pub fn generated_by_point_stabilizers(&self) -> bool {
        self.subgroup_generated_by_point_stabilizers().order == self.order
    }

    /// All permutations preserving each orbit setwise.
    pub fn young_group(&self) -> PermGroup {
        let mut gens = Vec::new();
        for orbit in self.orbits() {
            if orbit.len() < 2 {
                continue;
            }
            gens.push(
                Permutation::from_cycles(self.degree, &[vec![orbit[0], orbit[1]]]).expect("valid"),
            );
            if orbit.len() > 2 {
                gens.push(
                    Permutation::from_cycles(self.degree, std::slice::from_ref(&orbit))
                        .expect("valid"),
                );
            }
        }
        PermGroup::build(self.degree, gens, &[])
    }

    /// Restriction to an invariant point set, relabelled in the given order.
    pub fn restrict(&self, points: &[usize]) -> Result<PermGroup> {
        let gens = self
            .generators
            .iter()
            .map(|g| g.restrict(points))
            .collect::<Result<Vec<_>>>()?;
        PermGroup::new(
            points.len().max(1),
            if points.is_empty() { vec![] } else { gens },
        )
    }

    /// `self × other` acting on the disjoint union of the two domains.
    pub fn direct_product(&self, other: &PermGroup) -> PermGroup {
        let total = self.degree + other.degree;
        let mut gens: Vec<Permutation> =
            self.generators.iter().map(|g| g.embed(total, 0)).collect();
        gens.extend(other.generators.iter().map(|g| g.embed(total, self.degree)));
        PermGroup {
            degree: total,
            generators: gens,
            chain: self.chain.direct_product(&other.chain),
            order: &self.order * &other.order,
        }
    }
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PermGroup(degree {}, order {}, gens [",
            self.degree, self.order
        )?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "])")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(deg: usize, s: &str) -> Permutation {
        Permutation::parse_cycles(deg, s).unwrap()
    }

    fn group(deg: usize, gens: &[&str]) -> PermGroup {
        PermGroup::new(deg, gens.iter().map(|s| p(deg, s)).collect()).unwrap()
    }

    fn f20() -> PermGroup {
        group(5, &["(1 2 3 4 5)", "(2 3 5 4)"])
    }

    #[test]
    fn orders_and_membership() {
        assert_eq!(PermGroup::symmetric(5).order_u64(), Some(120));
        assert_eq!(f20().order_u64(), Some(20));
        assert!(!PermGroup::alternating(4).contains(&p(4, "(1 2)")));
        assert!(PermGroup::alternating(4).contains(&p(4, "(1 2)(3 4)")));
        assert!(!PermGroup::symmetric(4).contains(&Permutation::identity(5)));
    }

    #[test]
    fn orbits_and_stabilizers() {
        let g = group(4, &["(1 2)"]);
        assert_eq!(g.orbits(), vec![vec![0, 1], vec![2], vec![3]]);
        let s = PermGroup::symmetric(4).point_stabilizer(3).unwrap();
        assert_eq!(s.order_u64(), Some(6));
        assert!(s.generators().iter().all(|x| x.fixes(3)));
        assert_eq!(f20().point_stabilizer(0).unwrap().order_u64(), Some(4));
        assert!(matches!(
            f20().point_stabilizer(5),
            Err(Error::PointOutOfRange {
                point: 5,
                degree: 5
            })
        ));
    }

    #[test]
    fn closures_and_cores() {
        let s4 = PermGroup::symmetric(4);
        let c3 = group(4, &["(1 2 3)"]);
        let n = s4.normal_closure(&c3).unwrap();
        assert_eq!(n.order_u64(), Some(12));
        assert!(n.is_normal_in(&s4));
        let d8 = group(4, &["(1 2 3 4)", "(1 3)"]);
        let core = s4.normal_core(&d8, &Caps::default()).unwrap();
        assert_eq!(core.order_u64(), Some(4));
        assert!(core.is_normal_in(&s4));
        assert!(s4
            .normal_core(&s4, &Caps::default())
            .unwrap()
            .same_group(&s4));
        let outside = group(4, &["(1 2)"]);
        let a4 = PermGroup::alternating(4);
        assert!(matches!(
            a4.normal_closure(&outside),
            Err(Error::NotSubgroup(_))
        ));
    }

    #[test]
    fn derived_center_centralizer() {
        let caps = Caps::default();
        assert_eq!(
            PermGroup::symmetric(4).derived_subgroup().order_u64(),
            Some(12)
        );
        assert!(PermGroup::symmetric(3).center(&caps).unwrap().is_trivial());
        let v = group(4, &["(1 2)(3 4)", "(1 3)(2 4)"]);
        let c = PermGroup::symmetric(4).centralizer(&v, &caps).unwrap();
        assert_eq!(c.order_u64(), Some(4));
        assert!(c.same_group(&v));
    }

    #[test]
    fn intersection_respects_cap() {
        let tiny = Caps {
            elements: 10,
            ..Caps::default()
        };
        let s5 = PermGroup::symmetric(5);
        let a = f20();
        let b = PermGroup::alternating(5);
        match a.intersection(&b, &tiny) {
            Err(Error::Resource(e)) => {
                assert_eq!(e.limit, "10");
                assert_eq!(e.requested, "20");
                assert_eq!(e.flag, "--element-cap");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            s5.intersection(&b, &Caps::default()).unwrap().order_u64(),
            Some(60)
        );
        assert_eq!(
            a.intersection(&b, &Caps::default()).unwrap().order_u64(),
            Some(10)
        );
    }

    #[test]
    fn predicates_and_young_group() {
        let c5 = PermGroup::cyclic(5);
        assert!(c5.is_transitive());
        assert!(c5.acts_freely());
        assert!(!c5.generated_by_point_stabilizers());
        assert!(PermGroup::symmetric(5).generated_by_point_stabilizers());
        assert!(f20().generated_by_point_stabilizers());
        let t = group(4, &["(1 2)"]);
        assert_eq!(t.young_group().order_u64(), Some(2));
        assert_eq!(
            PermGroup::alternating(5).young_group().order_u64(),
            Some(120)
        );
        let triv = PermGroup::trivial(1);
        assert!(triv.is_transitive());
        assert!(triv.acts_freely());
    }

    #[test]
    fn pointwise_stabilizer_of_a_set() {
        let s5 = PermGroup::symmetric(5);
        let st = s5.pointwise_stabilizer(&[0, 1]).unwrap();
        assert_eq!(st.order_u64(), Some(6));
        assert!(st.generators().iter().all(|g| g.fixes(0) && g.fixes(1)));
    }
}
