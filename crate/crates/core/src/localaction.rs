//! Color-aware automorphisms of tree balls and the groups they form when
//! every local action is drawn from a prescribed permutation group.
//!
//! The local action of `g` at an interior vertex `v` is the color permutation
//! `c_{g(v)} ∘ g ∘ c_v^{-1}`. Ball groups are generated by grafting: a panel
//! is chosen at the center and then, level by level, at every interior vertex
//! among the permutations compatible with where its parent edge went.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::permgroup::{PermGroup, Permutation};
use crate::tree::{CenterKind, TreeBall};
use crate::wreath::wreath_tower;

/// A vertex permutation of a ball that is a graph automorphism preserving
/// the center (an edge center may be flipped).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BallAutomorphism {
    perm: Permutation,
}

impl BallAutomorphism {
    pub fn new(ball: &TreeBall, perm: Permutation) -> Result<BallAutomorphism> {
        if perm.degree() != ball.vertex_count() {
            return Err(Error::DegreeMismatch {
                left: ball.vertex_count(),
                right: perm.degree(),
            });
        }
        let center_ok = match ball.center() {
            CenterKind::Vertex => perm.apply(0) == 0,
            CenterKind::Edge => perm.apply(0) < 2 && perm.apply(1) < 2,
        };
        if !center_ok {
            return Err(Error::Input(
                "automorphism does not preserve the center".into(),
            ));
        }
        for e in ball.edges() {
            if ball
                .edge_between(perm.apply(e.origin), perm.apply(e.target))
                .is_none()
            {
                return Err(Error::Input(format!(
                    "vertex map breaks the edge {} -> {}",
                    e.origin + 1,
                    e.target + 1
                )));
            }
        }
        Ok(BallAutomorphism { perm })
    }

    pub fn identity(ball: &TreeBall) -> BallAutomorphism {
        BallAutomorphism {
            perm: Permutation::identity(ball.vertex_count()),
        }
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn apply(&self, v: usize) -> usize {
        self.perm.apply(v)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &BallAutomorphism) -> Result<BallAutomorphism> {
        Ok(BallAutomorphism {
            perm: self.perm.compose(&other.perm)?,
        })
    }

    pub fn inverse(&self) -> BallAutomorphism {
        BallAutomorphism {
            perm: self.perm.inverse(),
        }
    }

    pub fn edge_image(&self, ball: &TreeBall, e: usize) -> usize {
        let edge = ball.edge(e);
        ball.edge_between(self.apply(edge.origin), self.apply(edge.target))
            .expect("automorphisms map edges to edges")
    }
}

fn require_colored(ball: &TreeBall) -> Result<()> {
    if !ball.is_valid_coloring() {
        return Err(Error::Input(
            "ball needs a valid coloring (bijective at every vertex)".into(),
        ));
    }
    Ok(())
}

/// `σ_c(g, v)` as a permutation of the colors `0..d`.
pub fn local_action(ball: &TreeBall, g: &BallAutomorphism, v: usize) -> Result<Permutation> {
    require_colored(ball)?;
    if v >= ball.vertex_count() {
        return Err(Error::PointOutOfRange {
            point: v,
            degree: ball.vertex_count(),
        });
    }
    if !ball.is_interior(v) || !ball.is_interior(g.apply(v)) {
        return Err(Error::Input(format!(
            "vertex {} is on the boundary; local actions need all {} colors",
            v + 1,
            ball.d()
        )));
    }
    let images = (0..ball.d())
        .map(|i| {
            let e = ball.edge_with_color(v, i).expect("valid coloring");
            ball.color(g.edge_image(ball, e)).expect("colored")
        })
        .collect();
    Permutation::from_images(images)
}

/// Local actions at every interior vertex.
pub fn panel(ball: &TreeBall, g: &BallAutomorphism) -> Result<BTreeMap<usize, Permutation>> {
    ball.interior_vertices()
        .into_iter()
        .map(|v| Ok((v, local_action(ball, g, v)?)))
        .collect()
}

/// `σ_c(gh, v) = σ_c(g, h(v)) ∘ σ_c(h, v)`.
pub fn cocycle_holds(
    ball: &TreeBall,
    g: &BallAutomorphism,
    h: &BallAutomorphism,
    v: usize,
) -> Result<bool> {
    let lhs = local_action(ball, &g.compose(h)?, v)?;
    let rhs = local_action(ball, g, h.apply(v))?.compose(&local_action(ball, h, v)?)?;
    Ok(lhs == rhs)
}

fn check_local_group(ball: &TreeBall, f: &PermGroup) -> Result<()> {
    if f.degree() != ball.d() {
        return Err(Error::DegreeMismatch {
            left: ball.d(),
            right: f.degree(),
        });
    }
    Ok(())
}

/// Every interior local action lies in `f`.
pub fn in_uc(ball: &TreeBall, g: &BallAutomorphism, f: &PermGroup) -> Result<bool> {
    check_local_group(ball, f)?;
    Ok(panel(ball, g)?.values().all(|s| f.contains(s)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DefectReport {
    /// Interior vertices whose local action is in `F' \ F` (1-based).
    pub defects: Vec<usize>,
    /// Interior vertices whose local action is outside `F'` (1-based).
    pub violations: Vec<usize>,
    /// No violations: the element is a ball element of `G_c(F, F')`.
    pub admissible: bool,
    pub in_uc_f: bool,
}

pub fn defect_set(
    ball: &TreeBall,
    g: &BallAutomorphism,
    f: &PermGroup,
    f_prime: &PermGroup,
) -> Result<DefectReport> {
    check_local_group(ball, f)?;
    check_local_group(ball, f_prime)?;
    let mut defects = Vec::new();
    let mut violations = Vec::new();
    for (v, s) in panel(ball, g)? {
        if !f_prime.contains(&s) {
            violations.push(v + 1);
        } else if !f.contains(&s) {
            defects.push(v + 1);
        }
    }
    Ok(DefectReport {
        admissible: violations.is_empty(),
        in_uc_f: violations.is_empty() && defects.is_empty(),
        defects,
        violations,
    })
}

/// Elements of a local group sorted, and indexed by where they send a color.
#[derive(Debug, Clone)]
pub struct LocalGroup {
    group: PermGroup,
    elements: Vec<Permutation>,
    /// `by_pair[a * d + b]`: indices of elements with `σ(a) = b`.
    by_pair: Vec<Vec<usize>>,
}

impl LocalGroup {
    pub fn new(group: &PermGroup, caps: &Caps) -> Result<LocalGroup> {
        let mut elements = group.elements(caps)?;
        elements.sort();
        let d = group.degree();
        let mut by_pair = vec![Vec::new(); d * d];
        for (k, s) in elements.iter().enumerate() {
            for a in 0..d {
                by_pair[a * d + s.apply(a)].push(k);
            }
        }
        Ok(LocalGroup {
            group: group.clone(),
            elements,
            by_pair,
        })
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    fn d(&self) -> usize {
        self.group.degree()
    }

    fn with_pair(&self, a: usize, b: usize) -> impl Iterator<Item = &Permutation> + '_ {
        self.by_pair[a * self.d() + b]
            .iter()
            .map(|&k| &self.elements[k])
    }

    /// Identity when `a == b`, else the least element sending `a` to `b`.
    pub fn transporter(&self, a: usize, b: usize) -> Option<&Permutation> {
        if a == b {
            return self.elements.iter().find(|s| s.is_identity());
        }
        self.with_pair(a, b).next()
    }
}

fn parent_color(ball: &TreeBall, v: usize) -> Option<usize> {
    let p = ball.parent(v)?;
    ball.color(ball.edge_between(v, p)?)
}

/// Builds the automorphism with the given panels, filling every other interior
/// vertex with the canonical transporter of `completion`. Returns `None` when
/// some transporter does not exist.
pub fn graft(
    ball: &TreeBall,
    flip: bool,
    prescribed: &BTreeMap<usize, Permutation>,
    completion: &LocalGroup,
) -> Result<Option<BallAutomorphism>> {
    require_colored(ball)?;
    check_local_group(ball, completion.group())?;
    if flip && ball.center() == CenterKind::Vertex {
        return Err(Error::Input(
            "only edge-centered balls can flip the center".into(),
        ));
    }
    let n = ball.vertex_count();
    let mut images = vec![usize::MAX; n];
    match ball.center() {
        CenterKind::Vertex => images[0] = 0,
        CenterKind::Edge => {
            images[0] = usize::from(flip);
            images[1] = usize::from(!flip);
        }
    }
    for v in 0..n {
        if !ball.is_interior(v) {
            continue;
        }
        let w = images[v];
        let sigma = match (ball.parent(v), prescribed.get(&v)) {
            (None, Some(s)) => s.clone(),
            (None, None) => Permutation::identity(ball.d()),
            (Some(p), pres) => {
                let a = parent_color(ball, v).expect("colored");
                let b = ball
                    .color(ball.edge_between(w, images[p]).expect("parent edge maps"))
                    .expect("colored");
                match pres {
                    Some(s) if s.apply(a) == b => s.clone(),
                    Some(_) => {
                        return Err(Error::Input(format!(
                            "prescribed local action at vertex {} must send color {} to {}",
                            v + 1,
                            a + 1,
                            b + 1
                        )))
                    }
                    None => match completion.transporter(a, b) {
                        Some(s) => s.clone(),
                        None => return Ok(None),
                    },
                }
            }
        };
        for &e in ball.out_edges(v) {
            let t = ball.edge(e).target;
            if Some(t) == ball.parent(v) {
                continue;
            }
            let c = sigma.apply(ball.color(e).expect("colored"));
            let e2 = ball.edge_with_color(w, c).expect("valid coloring");
            images[t] = ball.edge(e2).target;
        }
    }
    let perm = Permutation::from_images(images)?;
    Ok(Some(BallAutomorphism::new(ball, perm)?))
}

/// Counts grafts exactly without listing them.
struct GraftCounter<'a> {
    ball: &'a TreeBall,
    local: &'a LocalGroup,
    memo: HashMap<(usize, usize), BigUint>,
}

impl GraftCounter<'_> {
    /// Extensions to the subtree below `v` given `v -> w` and parent -> parent image.
    fn count(&mut self, v: usize, w: usize) -> BigUint {
        if !self.ball.is_interior(v) {
            return BigUint::one();
        }
        if let Some(n) = self.memo.get(&(v, w)) {
            return n.clone();
        }
        let ball = self.ball;
        let candidates: Vec<Permutation> = match (parent_color(ball, v), parent_color(ball, w)) {
            (Some(a), Some(b)) => self.local.with_pair(a, b).cloned().collect(),
            _ => self.local.elements.clone(),
        };
        let kids: Vec<(usize, usize)> = ball
            .children(v)
            .map(|x| (x, parent_color(ball, x).expect("colored")))
            .collect();
        let mut total = BigUint::zero();
        for s in candidates {
            let mut prod = BigUint::one();
            for &(x, _) in &kids {
                let e = ball.edge_between(v, x).expect("child edge");
                let c = s.apply(ball.color(e).expect("colored"));
                let y = ball.edge(ball.edge_with_color(w, c).expect("valid")).target;
                prod *= self.count(x, y);
                if prod.is_zero() {
                    break;
                }
            }
            total += prod;
        }
        self.memo.insert((v, w), total.clone());
        total
    }
}

/// Number of center-preserving automorphisms with every interior local action
/// in the local group.
pub fn graft_count(ball: &TreeBall, local: &LocalGroup) -> Result<BigUint> {
    require_colored(ball)?;
    check_local_group(ball, local.group())?;
    let mut counter = GraftCounter {
        ball,
        local,
        memo: HashMap::new(),
    };
    Ok(match ball.center() {
        CenterKind::Vertex => counter.count(0, 0),
        CenterKind::Edge => {
            counter.count(0, 0) * counter.count(1, 1) + counter.count(0, 1) * counter.count(1, 0)
        }
    })
}

/// Lists every graft, depth first. Used when generator-based construction
/// falls short, and by tests.
pub fn all_grafts(
    ball: &TreeBall,
    local: &LocalGroup,
    caps: &Caps,
) -> Result<Vec<BallAutomorphism>> {
    let count = graft_count(ball, local)?;
    caps.check_ball_order(&count)?;
    let mut out = Vec::new();
    let n = ball.vertex_count();
    let flips: &[bool] = match ball.center() {
        CenterKind::Vertex => &[false],
        CenterKind::Edge => &[false, true],
    };
    let interior = ball.interior_vertices();
    for &flip in flips {
        let mut images = vec![usize::MAX; n];
        match ball.center() {
            CenterKind::Vertex => images[0] = 0,
            CenterKind::Edge => {
                images[0] = usize::from(flip);
                images[1] = usize::from(!flip);
            }
        }
        extend_grafts(ball, local, &interior, 0, &mut images, &mut out)?;
    }
    Ok(out)
}

fn extend_grafts(
    ball: &TreeBall,
    local: &LocalGroup,
    interior: &[usize],
    k: usize,
    images: &mut Vec<usize>,
    out: &mut Vec<BallAutomorphism>,
) -> Result<()> {
    let Some(&v) = interior.get(k) else {
        out.push(BallAutomorphism {
            perm: Permutation::from_images(images.clone())?,
        });
        return Ok(());
    };
    let w = images[v];
    let candidates: Vec<&Permutation> = match (parent_color(ball, v), parent_color(ball, w)) {
        (Some(a), Some(b)) => local.with_pair(a, b).collect(),
        _ => local.elements.iter().collect(),
    };
    let kids: Vec<(usize, usize)> = ball
        .children(v)
        .map(|x| (x, ball.edge_between(v, x).expect("child edge")))
        .collect();
    for s in candidates {
        for &(x, e) in &kids {
            let c = s.apply(ball.color(e).expect("colored"));
            images[x] = ball.edge(ball.edge_with_color(w, c).expect("valid")).target;
        }
        extend_grafts(ball, local, interior, k + 1, images, out)?;
    }
    Ok(())
}

/// The group of center-preserving ball automorphisms whose interior local
/// actions all lie in `F`.
#[derive(Debug, Clone)]
pub struct BallGroup {
    ball: TreeBall,
    local: PermGroup,
    group: PermGroup,
    graft_count: BigUint,
    formula_order: Option<BigUint>,
    augmented: bool,
}

impl BallGroup {
    pub fn ball(&self) -> &TreeBall {
        &self.ball
    }

    pub fn local_group(&self) -> &PermGroup {
        &self.local
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn order(&self) -> &BigUint {
        self.group.order()
    }

    /// Independent count from the graft recursion.
    pub fn graft_count(&self) -> &BigUint {
        &self.graft_count
    }

    /// `|F| |F_a|^m` (vertex balls) or `2 |F_a|^m` (edge balls) for transitive
    /// `F` on a legally colored ball; `None` otherwise.
    pub fn formula_order(&self) -> Option<&BigUint> {
        self.formula_order.as_ref()
    }

    /// Whether generators from canonical grafts fell short and the group was
    /// completed from the full graft list.
    pub fn augmented(&self) -> bool {
        self.augmented
    }

    pub fn contains(&self, g: &BallAutomorphism) -> bool {
        self.group.contains(g.perm())
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> BallAutomorphism {
        BallAutomorphism {
            perm: self.group.random_element(rng),
        }
    }

    /// Elements fixing both endpoints (the whole group for vertex balls).
    pub fn type_preserving_subgroup(&self) -> PermGroup {
        match self.ball.center() {
            CenterKind::Vertex => self.group.clone(),
            CenterKind::Edge => self.group.point_stabilizer(0).expect("vertex 0 exists"),
        }
    }

    /// Rigid stabilizers of the two half-balls of an edge-centered ball.
    pub fn half_ball_rigid_stabilizers(&self) -> Result<(PermGroup, PermGroup)> {
        if self.ball.center() != CenterKind::Edge {
            return Err(Error::Input("half-balls need an edge-centered ball".into()));
        }
        let tp = self.type_preserving_subgroup();
        let side = |s: usize| -> Vec<usize> {
            (0..self.ball.vertex_count())
                .filter(|&v| self.ball.side(v) == s)
                .collect()
        };
        Ok((
            tp.pointwise_stabilizer(&side(1))?,
            tp.pointwise_stabilizer(&side(0))?,
        ))
    }

    /// Checks that the endpoint-fixing subgroup is the internal direct product
    /// of the two half-ball rigid stabilizers.
    pub fn tits_report(&self, caps: &Caps) -> Result<TitsReport> {
        let (r0, r1) = self.half_ball_rigid_stabilizers()?;
        let tp = self.type_preserving_subgroup();
        let commute = r0
            .generators()
            .iter()
            .all(|x| r1.generators().iter().all(|y| x.commutes_with(y)));
        let meet = r0.pointwise_stabilizer(
            &(0..self.ball.vertex_count())
                .filter(|&v| self.ball.side(v) == 0)
                .collect::<Vec<_>>(),
        )?;
        let d = self.ball.d();
        let a = self.ball.color(0).expect("colored");
        let others: Vec<usize> = (0..d).filter(|&c| c != a).collect();
        let stab = self.local.point_stabilizer(a)?.restrict(&others)?;
        let tower = wreath_tower(&stab, self.ball.radius(), caps)?;
        let product = r0.order() * r1.order();
        Ok(TitsReport {
            endpoint_fixing_order: tp.order().to_string(),
            half_orders: [r0.order().to_string(), r1.order().to_string()],
            wreath_order: tower.order().to_string(),
            product_matches: &product == tp.order(),
            intersection_trivial: meet.is_trivial(),
            commute,
            halves_match_wreath: r0.order() == tower.order() && r1.order() == tower.order(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TitsReport {
    pub endpoint_fixing_order: String,
    pub half_orders: [String; 2],
    pub wreath_order: String,
    pub product_matches: bool,
    pub intersection_trivial: bool,
    pub commute: bool,
    pub halves_match_wreath: bool,
}

impl TitsReport {
    pub fn holds(&self) -> bool {
        self.product_matches && self.intersection_trivial && self.commute
    }
}

/// Builds the ball group for `F` from canonical grafts and certifies its
/// order against the graft count.
pub fn ball_group(ball: &TreeBall, f: &PermGroup, caps: &Caps) -> Result<BallGroup> {
    require_colored(ball)?;
    check_local_group(ball, f)?;
    let local = LocalGroup::new(f, caps)?;
    let count = graft_count(ball, &local)?;
    caps.check_ball_order(&count)?;

    let mut gens = Vec::new();
    let none = BTreeMap::new();
    match ball.center() {
        CenterKind::Vertex => {
            if ball.is_interior(0) {
                for s in f.generators() {
                    let pres = BTreeMap::from([(0, s.clone())]);
                    gens.extend(graft(ball, false, &pres, &local)?);
                }
            }
        }
        CenterKind::Edge => gens.extend(graft(ball, true, &none, &local)?),
    }
    for v in ball.interior_vertices() {
        let Some(a) = parent_color(ball, v) else {
            continue;
        };
        for s in f.point_stabilizer(a)?.generators() {
            let pres = BTreeMap::from([(v, s.clone())]);
            gens.extend(graft(ball, false, &pres, &local)?);
        }
    }
    let gens: Vec<Permutation> = gens
        .into_iter()
        .map(|g| g.perm)
        .filter(|p| !p.is_identity())
        .collect();
    let mut group = PermGroup::new(ball.vertex_count(), gens)?;
    let mut augmented = false;
    if group.order() != &count {
        augmented = true;
        let all = all_grafts(ball, &local, caps)?;
        group = group.extended(all.into_iter().map(|g| g.perm));
        if group.order() != &count {
            return Err(Error::Input(format!(
                "graft count {count} disagrees with the generated order {}",
                group.order()
            )));
        }
    }
    Ok(BallGroup {
        ball: ball.clone(),
        local: f.clone(),
        formula_order: formula_order(ball, f),
        group,
        graft_count: count,
        augmented,
    })
}

fn formula_order(ball: &TreeBall, f: &PermGroup) -> Option<BigUint> {
    if !f.is_transitive() || !ball.is_legal() {
        return None;
    }
    let stab = f.point_stabilizer(0).ok()?;
    let interior = ball.interior_vertices();
    let power = |m: usize| num_traits::pow(stab.order().clone(), m);
    Some(match ball.center() {
        CenterKind::Vertex if interior.is_empty() => BigUint::one(),
        CenterKind::Vertex => f.order() * power(interior.len() - 1),
        CenterKind::Edge => BigUint::from(2u32) * power(interior.len()),
    })
}

/// `ball_group` restricted to vertex-centered balls.
pub fn ball_stabilizer_group(ball: &TreeBall, f: &PermGroup, caps: &Caps) -> Result<BallGroup> {
    if ball.center() != CenterKind::Vertex {
        return Err(Error::Input("expected a vertex-centered ball".into()));
    }
    ball_group(ball, f, caps)
}

/// `ball_group` restricted to edge-centered balls.
pub fn edge_ball_group(ball: &TreeBall, f: &PermGroup, caps: &Caps) -> Result<BallGroup> {
    if ball.center() != CenterKind::Edge {
        return Err(Error::Input("expected an edge-centered ball".into()));
    }
    ball_group(ball, f, caps)
}

/// Order of the vertex-ball stabilizer from the graft recursion alone, with
/// no cap on the order.
pub fn ball_stabilizer_order(ball: &TreeBall, f: &PermGroup, caps: &Caps) -> Result<BigUint> {
    graft_count(ball, &LocalGroup::new(f, caps)?)
}

/// One instance of the normal-closure lemma: `G = RU`, `K ≤ R ∩ U` normal in
/// `R`; the lemma says the normal closure of `K` in `G` stays inside `U`.
#[derive(Debug, Clone)]
pub struct NoCocompactInstance {
    pub r: PermGroup,
    pub k: PermGroup,
    pub closure: PermGroup,
    pub holds: bool,
}

/// Draws `R` by adding random elements of `G` until `RU = G`, and `K` as the
/// normal closure in `R` of a random element of the core of `R ∩ U` in `R`.
pub fn no_cocompact_instance<R: Rng + ?Sized>(
    g: &PermGroup,
    u: &PermGroup,
    rng: &mut R,
    caps: &Caps,
) -> Result<NoCocompactInstance> {
    if !u.is_subgroup_of(g) {
        return Err(Error::NotSubgroup("U is not a subgroup of G".into()));
    }
    let mut r = PermGroup::trivial(g.degree());
    loop {
        let meet = r.intersection(u, caps)?;
        if r.order() * u.order() == g.order() * meet.order() {
            let core = r.normal_core(&meet, caps)?;
            let x = core.random_element(rng);
            let k = r.normal_closure(&PermGroup::new(g.degree(), vec![x])?)?;
            let closure = g.normal_closure(&k)?;
            let holds = closure.is_subgroup_of(u);
            return Ok(NoCocompactInstance {
                r,
                k,
                closure,
                holds,
            });
        }
        r = r.extended([g.random_element(rng)]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::NamedFamily;
    use crate::tree::build_ball;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn legal(d: usize, r: usize, c: CenterKind) -> TreeBall {
        build_ball(d, r, c, &Caps::default())
            .unwrap()
            .legal_coloring()
    }

    fn order(b: &BallGroup) -> u64 {
        b.order().try_into().unwrap()
    }

    #[test]
    fn vertex_ball_orders() {
        let caps = Caps::default();
        let b = ball_stabilizer_group(
            &legal(3, 2, CenterKind::Vertex),
            &PermGroup::symmetric(3),
            &caps,
        )
        .unwrap();
        assert_eq!(order(&b), 48);
        assert_eq!(b.formula_order(), Some(&BigUint::from(48u32)));
        assert!(!b.augmented());
        let b = ball_stabilizer_group(
            &legal(3, 1, CenterKind::Vertex),
            &PermGroup::cyclic(3),
            &caps,
        )
        .unwrap();
        assert_eq!(order(&b), 3);
        let b = ball_stabilizer_group(
            &legal(4, 2, CenterKind::Vertex),
            &PermGroup::trivial(4),
            &caps,
        )
        .unwrap();
        assert_eq!(order(&b), 1);
        let klein = NamedFamily::Klein4.group().unwrap();
        let b = ball_stabilizer_group(&legal(4, 2, CenterKind::Vertex), &klein, &caps).unwrap();
        assert_eq!(order(&b), 4);
    }

    #[test]
    fn edge_ball_and_tits_decomposition() {
        let caps = Caps::default();
        for (r, half) in [(1, 2u32), (2, 8)] {
            let b = edge_ball_group(
                &legal(3, r, CenterKind::Edge),
                &PermGroup::symmetric(3),
                &caps,
            )
            .unwrap();
            let tp = b.type_preserving_subgroup();
            assert_eq!(tp.order(), &BigUint::from(half * half));
            assert_eq!(b.order(), &(BigUint::from(2u32) * tp.order()));
            let report = b.tits_report(&caps).unwrap();
            assert!(report.holds() && report.halves_match_wreath, "{report:?}");
        }
    }

    #[test]
    fn mirror_has_identity_panels() {
        let caps = Caps::default();
        let ball = legal(4, 2, CenterKind::Edge);
        let local = LocalGroup::new(&PermGroup::trivial(4), &caps).unwrap();
        let mirror = graft(&ball, true, &BTreeMap::new(), &local)
            .unwrap()
            .unwrap();
        assert!(panel(&ball, &mirror)
            .unwrap()
            .values()
            .all(Permutation::is_identity));
        assert!(in_uc(&ball, &mirror, &PermGroup::trivial(4)).unwrap());
        let id = BallAutomorphism::identity(&ball);
        assert!(
            defect_set(&ball, &id, &PermGroup::trivial(4), &PermGroup::symmetric(4))
                .unwrap()
                .defects
                .is_empty()
        );
    }

    #[test]
    fn single_defect() {
        let caps = Caps::default();
        let ball = legal(5, 2, CenterKind::Vertex);
        let alt = PermGroup::alternating(5);
        let local = LocalGroup::new(&alt, &caps).unwrap();
        let v = 1;
        let a = ball.color(ball.edge_between(v, 0).unwrap()).unwrap();
        let others: Vec<usize> = (0..5).filter(|&c| c != a).collect();
        let odd = Permutation::from_cycles(5, &[vec![others[0], others[1]]]).unwrap();
        let g = graft(&ball, false, &BTreeMap::from([(v, odd)]), &local)
            .unwrap()
            .unwrap();
        let report = defect_set(&ball, &g, &alt, &PermGroup::symmetric(5)).unwrap();
        assert_eq!(report.defects, vec![v + 1]);
        assert!(report.admissible && !report.in_uc_f);
        let report = defect_set(&ball, &g, &alt, &alt).unwrap();
        assert_eq!(report.violations, vec![v + 1]);
    }

    #[test]
    fn cocycle_on_random_pairs() {
        let caps = Caps::default();
        let ball = legal(4, 2, CenterKind::Vertex);
        let b = ball_group(&ball, &PermGroup::symmetric(4), &caps).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let g = b.random_element(&mut rng);
            let h = b.random_element(&mut rng);
            for v in ball.interior_vertices() {
                assert!(cocycle_holds(&ball, &g, &h, v).unwrap());
            }
        }
    }

    #[test]
    fn grafts_match_count_and_monotone() {
        let caps = Caps::default();
        let ball = legal(3, 2, CenterKind::Edge);
        let local = LocalGroup::new(&PermGroup::symmetric(3), &caps).unwrap();
        let all = all_grafts(&ball, &local, &caps).unwrap();
        assert_eq!(
            BigUint::from(all.len()),
            graft_count(&ball, &local).unwrap()
        );
        let small = ball_group(&ball, &PermGroup::cyclic(3), &caps).unwrap();
        let big = ball_group(&ball, &PermGroup::symmetric(3), &caps).unwrap();
        assert!(small.group().is_subgroup_of(big.group()));
    }

    #[test]
    fn illegal_coloring_is_still_handled() {
        let caps = Caps::default();
        let ball = legal(3, 2, CenterKind::Vertex);
        // swap two child colors at vertex 1 only: valid but not legal
        let (e1, e2) = (ball.out_edges(1)[1], ball.out_edges(1)[2]);
        let bad = ball
            .with_color(e1, ball.color(e2).unwrap())
            .unwrap()
            .with_color(e2, ball.color(e1).unwrap())
            .unwrap();
        assert!(bad.is_valid_coloring() && !bad.is_legal());
        for f in [PermGroup::symmetric(3), PermGroup::cyclic(3)] {
            let b = ball_group(&bad, &f, &caps).unwrap();
            assert_eq!(b.order(), b.graft_count());
            assert!(b.formula_order().is_none());
        }
    }

    #[test]
    fn order_cap_refuses() {
        let caps = Caps {
            ball_order: 100,
            ..Caps::default()
        };
        let ball = legal(4, 2, CenterKind::Vertex);
        assert!(matches!(
            ball_group(&ball, &PermGroup::symmetric(4), &caps),
            Err(Error::Resource(_))
        ));
        assert_eq!(
            ball_stabilizer_order(&ball, &PermGroup::symmetric(4), &caps).unwrap(),
            BigUint::from(24u32 * 6u32.pow(4))
        );
    }

    #[test]
    fn no_cocompact_examples() {
        let caps = Caps::default();
        let ball = legal(3, 2, CenterKind::Vertex);
        let b = ball_group(&ball, &PermGroup::symmetric(3), &caps).unwrap();
        let u = b.group().point_stabilizer(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let inst = no_cocompact_instance(b.group(), &u, &mut rng, &caps).unwrap();
            assert!(inst.holds);
            assert!(inst.k.is_normal_in(&inst.r));
        }
    }
}
