//! Iterated permutational wreath products on the rooted `d`-ary tree.
//!
//! Leaves are ordered lexicographically by their root-to-leaf words, so the
//! leaves below a vertex form a contiguous block.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::permgroup::{Gen, PermGroup, Permutation};
use crate::series::{p_part, sylow_subgroup};

/// A rooted-tree automorphism given by its label at every vertex.
///
/// A portrait sends the word `x w` to `root(x) child[x](w)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Portrait {
    depth: usize,
    arity: usize,
    root: Permutation,
    children: Vec<Portrait>,
}

impl Portrait {
    pub fn identity(arity: usize, depth: usize) -> Portrait {
        Portrait {
            depth,
            arity,
            root: Permutation::identity(arity),
            children: if depth == 0 {
                Vec::new()
            } else {
                (0..arity)
                    .map(|_| Portrait::identity(arity, depth - 1))
                    .collect()
            },
        }
    }

    pub fn new(root: Permutation, children: Vec<Portrait>) -> Result<Portrait> {
        let arity = root.degree();
        if children.len() != arity {
            return Err(Error::Input(format!(
                "portrait root has degree {arity} but {} children",
                children.len()
            )));
        }
        let depth = children[0].depth + 1;
        if children
            .iter()
            .any(|c| c.depth != depth - 1 || c.arity != arity)
        {
            return Err(Error::Input("children must share depth and arity".into()));
        }
        Ok(Portrait {
            depth,
            arity,
            root,
            children,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn root(&self) -> &Permutation {
        &self.root
    }

    pub fn children(&self) -> &[Portrait] {
        &self.children
    }

    /// The identity except for `label` at `vertex` (a word of child indices).
    pub fn with_label_at(
        arity: usize,
        depth: usize,
        vertex: &[usize],
        label: Permutation,
    ) -> Result<Portrait> {
        if label.degree() != arity {
            return Err(Error::DegreeMismatch {
                left: arity,
                right: label.degree(),
            });
        }
        if vertex.len() >= depth {
            return Err(Error::Input(format!(
                "vertex at depth {} carries no label in a depth-{depth} portrait",
                vertex.len()
            )));
        }
        let mut p = Portrait::identity(arity, depth);
        let mut node = &mut p;
        for &x in vertex {
            if x >= arity {
                return Err(Error::PointOutOfRange {
                    point: x,
                    degree: arity,
                });
            }
            node = &mut node.children[x];
        }
        node.root = label;
        Ok(p)
    }

    /// A portrait with every label drawn uniformly from `labels`.
    pub fn random<R: Rng + ?Sized>(
        arity: usize,
        depth: usize,
        labels: &[Permutation],
        rng: &mut R,
    ) -> Portrait {
        if depth == 0 {
            return Portrait::identity(arity, 0);
        }
        Portrait {
            depth,
            arity,
            root: labels[rng.gen_range(0..labels.len())].clone(),
            children: (0..arity)
                .map(|_| Portrait::random(arity, depth - 1, labels, rng))
                .collect(),
        }
    }

    fn check_shape(&self, other: &Portrait) -> Result<()> {
        if self.depth != other.depth || self.arity != other.arity {
            return Err(Error::Input(format!(
                "portrait shape mismatch: (d {}, depth {}) vs (d {}, depth {})",
                self.arity, self.depth, other.arity, other.depth
            )));
        }
        Ok(())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Portrait) -> Result<Portrait> {
        self.check_shape(other)?;
        Ok(self.compose_unchecked(other))
    }

    fn compose_unchecked(&self, other: &Portrait) -> Portrait {
        if self.depth == 0 {
            return self.clone();
        }
        let children = (0..self.arity)
            .map(|x| self.children[other.root.apply(x)].compose_unchecked(&other.children[x]))
            .collect();
        Portrait {
            depth: self.depth,
            arity: self.arity,
            root: &self.root * &other.root,
            children,
        }
    }

    pub fn inverse(&self) -> Portrait {
        if self.depth == 0 {
            return self.clone();
        }
        let root_inv = self.root.inverse();
        let children = (0..self.arity)
            .map(|y| self.children[root_inv.apply(y)].inverse())
            .collect();
        Portrait {
            depth: self.depth,
            arity: self.arity,
            root: root_inv,
            children,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.root.is_identity() && self.children.iter().all(Portrait::is_identity)
    }

    pub fn leaf_count(&self) -> usize {
        self.arity.pow(self.depth as u32)
    }

    /// The action on leaves, numbered lexicographically.
    pub fn flatten(&self) -> Permutation {
        let mut images = vec![0usize; self.leaf_count()];
        self.flatten_into(&mut images, 0);
        Permutation::from_images(images).expect("portrait acts bijectively")
    }

    fn flatten_into(&self, out: &mut [usize], offset: usize) {
        if self.depth == 0 {
            out[0] = offset;
            return;
        }
        let block = self.arity.pow(self.depth as u32 - 1);
        for x in 0..self.arity {
            let target = offset + self.root.apply(x) * block;
            self.children[x].flatten_into(&mut out[x * block..(x + 1) * block], target);
        }
    }

    /// Labels in level order, paired with their vertex words.
    pub fn labels(&self) -> Vec<(Vec<usize>, Permutation)> {
        let mut out = Vec::new();
        let mut frontier: Vec<(Vec<usize>, &Portrait)> = vec![(Vec::new(), self)];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for (word, p) in frontier {
                if p.depth == 0 {
                    continue;
                }
                out.push((word.clone(), p.root.clone()));
                for (x, c) in p.children.iter().enumerate() {
                    let mut w = word.clone();
                    w.push(x);
                    next.push((w, c));
                }
            }
            frontier = next;
        }
        out
    }
}

/// Number of vertices of depth `< depth` in the rooted `arity`-ary tree.
pub fn internal_vertex_count(arity: usize, depth: usize) -> u128 {
    (0..depth as u32).map(|k| (arity as u128).pow(k)).sum()
}

/// `|F|^((d^n - 1)/(d - 1))`.
pub fn wreath_order_formula(base_order: &BigUint, arity: usize, depth: usize) -> BigUint {
    let exponent = internal_vertex_count(arity, depth);
    num_traits::pow(base_order.clone(), exponent as usize)
}

/// All vertex words of depth `< depth`, in level order.
pub fn internal_vertices(arity: usize, depth: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &level {
            for x in 0..arity {
                let mut v = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        out.append(&mut level);
        level = next;
    }
    out
}

/// The flattened portrait with label `f` at the internal vertex `vertex`
/// and the identity elsewhere.
pub fn label_permutation(
    arity: usize,
    depth: usize,
    vertex: &[usize],
    f: &Permutation,
) -> Permutation {
    let block = arity.pow((depth - vertex.len() - 1) as u32);
    let cone = block * arity;
    let start = vertex.iter().fold(0, |acc, &x| acc * arity + x) * cone;
    let mut images: Vec<usize> = (0..arity.pow(depth as u32)).collect();
    for offset in 0..cone {
        images[start + offset] = start + f.apply(offset / block) * block + offset % block;
    }
    Permutation::from_images(images).expect("labels act bijectively")
}

/// Portraits labelled from `base` at the internal vertices below `top` and
/// trivially elsewhere.
///
/// The stabilizer chain is read off the tree instead of running
/// Schreier–Sims. Leaves are fixed depth first, visiting the children of
/// each vertex in the order of the base of `F`; after some leaves are fixed
/// the stabilizer is again a labelled group, with the label at each vertex
/// confined to the stabilizer in `F` of the children already used.
fn labelled_subtree_group(base: &PermGroup, depth: usize, top: &[usize]) -> Result<PermGroup> {
    let d = base.degree();
    let leaves = d.pow(depth as u32);
    let vertices: Vec<Vec<usize>> = internal_vertices(d, depth)
        .into_iter()
        .filter(|v| v.starts_with(top))
        .collect();
    let index: HashMap<&[usize], usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_slice(), i))
        .collect();
    let generators: Vec<Permutation> = vertices
        .iter()
        .flat_map(|v| {
            base.generators()
                .iter()
                .filter(|f| !f.is_identity())
                .map(move |f| label_permutation(d, depth, v, f))
        })
        .collect();

    let f_base = base.base();
    let k = f_base.len();
    let stab_gens: Vec<Vec<Permutation>> = (0..=k)
        .map(|j| {
            base.pointwise_stabilizer(&f_base[..j])
                .map(|g| g.generators().to_vec())
        })
        .collect::<Result<_>>()?;
    let mut child_order = f_base.clone();
    child_order.extend((0..d).filter(|x| !f_base.contains(x)));
    let position: Vec<usize> = {
        let mut pos = vec![0; d];
        for (i, &c) in child_order.iter().enumerate() {
            pos[c] = i;
        }
        pos
    };

    // labels[u][j]: shared generators of F^(j) placed at vertex u
    let mut labels: Vec<Vec<Option<Vec<Arc<Gen>>>>> = vec![vec![None; k + 1]; vertices.len()];
    let mut used = vec![0usize; vertices.len()];
    let mut levels = Vec::new();

    let mut stack: Vec<Vec<usize>> = vec![top.to_vec()];
    while let Some(word) = stack.pop() {
        if word.len() < depth {
            for &c in child_order.iter().rev() {
                let mut w = word.clone();
                w.push(c);
                stack.push(w);
            }
            continue;
        }
        let leaf = word.iter().fold(0, |acc, &x| acc * d + x);
        let mut gens: Vec<Arc<Gen>> = Vec::new();
        for (u, v) in vertices.iter().enumerate() {
            let j = used[u].min(k);
            let slot = labels[u][j].get_or_insert_with(|| {
                stab_gens[j]
                    .iter()
                    .map(|f| Gen::shared(label_permutation(d, depth, v, f)))
                    .collect()
            });
            gens.extend(slot.iter().cloned());
        }
        if gens.iter().any(|g| !g.perm.fixes(leaf)) {
            levels.push((leaf, gens));
        }
        for t in top.len()..depth {
            let u = index[&word[..t]];
            if position[word[t]] == used[u] {
                used[u] += 1;
            }
        }
    }
    Ok(PermGroup::from_levels(leaves, generators, levels))
}

/// `W_n(F)`: the base group copied at every vertex above the leaves.
#[derive(Debug, Clone)]
pub struct WreathTower {
    base: PermGroup,
    depth: usize,
    /// `(vertex, label)` for each vertex of depth `< n` and generator of `F`.
    structured: Vec<(Vec<usize>, Permutation)>,
    group: PermGroup,
    formula_order: BigUint,
}

impl WreathTower {
    pub fn base(&self) -> &PermGroup {
        &self.base
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn arity(&self) -> usize {
        self.base.degree()
    }

    pub fn leaf_count(&self) -> usize {
        self.group.degree()
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn structured_generators(&self) -> &[(Vec<usize>, Permutation)] {
        &self.structured
    }

    /// The `i`-th structured generator as a portrait.
    pub fn generator_portrait(&self, i: usize) -> Result<Portrait> {
        let (v, f) = self
            .structured
            .get(i)
            .ok_or_else(|| Error::Input(format!("no structured generator {i}")))?;
        Portrait::with_label_at(self.arity(), self.depth, v, f.clone())
    }

    pub fn order(&self) -> &BigUint {
        self.group.order()
    }

    pub fn formula_order(&self) -> &BigUint {
        &self.formula_order
    }

    pub fn order_matches_formula(&self) -> bool {
        self.order() == &self.formula_order
    }

    /// Leaves below `vertex`, as a range of leaf indices.
    pub fn cone(&self, vertex: &[usize]) -> Result<std::ops::Range<usize>> {
        self.check_vertex(vertex)?;
        let d = self.arity();
        let below = d.pow((self.depth - vertex.len()) as u32);
        let start = vertex.iter().fold(0, |acc, &x| acc * d + x) * below;
        Ok(start..start + below)
    }

    fn check_vertex(&self, vertex: &[usize]) -> Result<()> {
        if vertex.len() > self.depth {
            return Err(Error::Input(format!(
                "vertex at depth {} is below the leaves of a depth-{} tower",
                vertex.len(),
                self.depth
            )));
        }
        if let Some(&x) = vertex.iter().find(|&&x| x >= self.arity()) {
            return Err(Error::PointOutOfRange {
                point: x,
                degree: self.arity(),
            });
        }
        Ok(())
    }

    /// Elements supported on the cone below `vertex`; a copy of `W_{n-k}(F)`.
    pub fn rigid_stabilizer(&self, vertex: &[usize]) -> Result<PermGroup> {
        self.check_vertex(vertex)?;
        labelled_subtree_group(&self.base, self.depth, vertex)
    }
}

pub fn wreath_tower(base: &PermGroup, depth: usize, caps: &Caps) -> Result<WreathTower> {
    let d = base.degree();
    let leaves = (d as u128).checked_pow(depth as u32).unwrap_or(u128::MAX);
    caps.check_leaves(leaves)?;
    let structured = internal_vertices(d, depth)
        .into_iter()
        .flat_map(|v| {
            base.generators()
                .iter()
                .map(move |f| (v.clone(), f.clone()))
        })
        .collect();
    Ok(WreathTower {
        base: base.clone(),
        depth,
        structured,
        group: labelled_subtree_group(base, depth, &[])?,
        formula_order: wreath_order_formula(base.order(), d, depth),
    })
}

/// `W_n(P)` for a Sylow p-subgroup `P` of the base, with its certificate.
#[derive(Debug, Clone)]
pub struct SylowTower {
    pub prime: u64,
    pub tower: WreathTower,
    pub ambient: WreathTower,
    /// Every flattened generator of `W_n(P)` lies in `W_n(F)`.
    pub contained: bool,
    /// `|W_n(P)|` is the p-part of `|W_n(F)|`.
    pub order_is_p_part: bool,
    pub index: BigUint,
}

impl SylowTower {
    pub fn certified(&self) -> bool {
        self.contained && self.order_is_p_part && self.tower.order_matches_formula()
    }

    pub fn index_coprime_to_p(&self) -> bool {
        p_part(&self.index, self.prime).0.is_one()
    }
}

pub fn sylow_tower(base: &PermGroup, p: u64, depth: usize, caps: &Caps) -> Result<SylowTower> {
    let sylow = sylow_subgroup(base, p, caps)?;
    let ambient = wreath_tower(base, depth, caps)?;
    let tower = wreath_tower(&sylow, depth, caps)?;
    let contained = tower
        .group()
        .generators()
        .iter()
        .all(|g| ambient.group().contains(g));
    let order_is_p_part = tower.order() == &p_part(ambient.order(), p).0;
    let index = ambient.order() / tower.order();
    Ok(SylowTower {
        prime: p,
        tower,
        ambient,
        contained,
        order_is_p_part,
        index,
    })
}

/// `T × T` on two disjoint copies of the leaves.
pub fn direct_square(tower: &WreathTower, caps: &Caps) -> Result<PermGroup> {
    caps.check_leaves(2 * tower.leaf_count() as u128)?;
    Ok(tower.group().direct_product(tower.group()))
}

/// Summary used by reports.
#[derive(Debug, Clone, Serialize)]
pub struct TowerSummary {
    pub base_degree: usize,
    pub base_order: String,
    pub depth: usize,
    pub leaves: usize,
    pub order: String,
    pub formula_order: String,
    pub generator_count: usize,
    pub order_matches_formula: bool,
}

impl From<&WreathTower> for TowerSummary {
    fn from(t: &WreathTower) -> Self {
        TowerSummary {
            base_degree: t.arity(),
            base_order: t.base().order().to_string(),
            depth: t.depth(),
            leaves: t.leaf_count(),
            order: t.order().to_string(),
            formula_order: t.formula_order().to_string(),
            generator_count: t.structured_generators().len(),
            order_matches_formula: t.order_matches_formula(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::NamedFamily;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn klein() -> PermGroup {
        NamedFamily::Klein4.group().unwrap()
    }

    #[test]
    fn tree_chain_agrees_with_schreier_sims() {
        let caps = Caps::default();
        let intransitive =
            PermGroup::new(3, vec![Permutation::parse_cycles(3, "(1 2)").unwrap()]).unwrap();
        let f20 = NamedFamily::Frobenius20.group().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (base, max_depth) in [
            (PermGroup::symmetric(2), 4),
            (PermGroup::symmetric(3), 3),
            (klein(), 3),
            (PermGroup::alternating(4), 2),
            (intransitive, 3),
            (f20, 2),
        ] {
            for depth in 0..=max_depth {
                let t = wreath_tower(&base, depth, &caps).unwrap();
                let generic =
                    PermGroup::new(t.leaf_count(), t.group().generators().to_vec()).unwrap();
                assert_eq!(t.order(), generic.order());
                assert_eq!(t.order(), t.formula_order());
                for _ in 0..20 {
                    let g = generic.random_element(&mut rng);
                    assert!(t.group().contains(&g));
                    assert!(generic.contains(&t.group().random_element(&mut rng)));
                }
                if depth > 0 {
                    let rist = t.rigid_stabilizer(&[1]).unwrap();
                    let gens: Vec<Permutation> = t
                        .structured_generators()
                        .iter()
                        .filter(|(v, _)| v.starts_with(&[1]))
                        .map(|(v, f)| label_permutation(base.degree(), depth, v, f))
                        .collect();
                    let generic = PermGroup::new(t.leaf_count(), gens).unwrap();
                    assert!(rist.same_group(&generic));
                }
            }
        }
    }

    #[test]
    fn label_permutation_matches_portrait() {
        let f = Permutation::parse_cycles(3, "(1 2 3)").unwrap();
        for v in internal_vertices(3, 3) {
            let p = Portrait::with_label_at(3, 3, &v, f.clone()).unwrap();
            assert_eq!(p.flatten(), label_permutation(3, 3, &v, &f));
        }
    }

    #[test]
    fn flatten_examples() {
        assert!(Portrait::identity(2, 2).flatten().is_identity());
        assert_eq!(Portrait::identity(2, 2).flatten().degree(), 4);
        let swap = Permutation::parse_cycles(2, "(1 2)").unwrap();
        let p = Portrait::with_label_at(2, 2, &[], swap.clone()).unwrap();
        assert_eq!(
            p.flatten(),
            Permutation::parse_cycles(4, "(1 3)(2 4)").unwrap()
        );
        let q = Portrait::with_label_at(2, 2, &[1], swap).unwrap();
        assert_eq!(q.flatten(), Permutation::parse_cycles(4, "(3 4)").unwrap());
    }

    #[test]
    fn inverse_and_shape_errors() {
        let labels = PermGroup::symmetric(3).elements(&Caps::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = Portrait::random(3, 3, &labels, &mut rng);
        assert!(p.compose(&p.inverse()).unwrap().is_identity());
        assert!(p.compose(&Portrait::identity(3, 2)).is_err());
        assert!(Portrait::with_label_at(2, 2, &[0, 1], Permutation::identity(2)).is_err());
    }

    #[test]
    fn tower_orders() {
        let caps = Caps::default();
        let t = wreath_tower(&klein(), 2, &caps).unwrap();
        assert_eq!(t.order(), &BigUint::from(1024u32));
        assert!(t.order_matches_formula());
        let t = wreath_tower(&PermGroup::alternating(4), 2, &caps).unwrap();
        assert_eq!(t.order(), &BigUint::from(248832u32));
        let t0 = wreath_tower(&PermGroup::symmetric(3), 0, &caps).unwrap();
        assert_eq!(t0.leaf_count(), 1);
        assert!(t0.group().is_trivial());
    }

    #[test]
    fn leaf_cap_is_enforced() {
        let caps = Caps {
            leaves: 16,
            ..Caps::default()
        };
        match wreath_tower(&PermGroup::symmetric(2), 5, &caps) {
            Err(Error::Resource(e)) => assert_eq!(e.requested, "32"),
            other => panic!("unexpected {other:?}"),
        }
        let t = wreath_tower(&PermGroup::symmetric(2), 4, &caps).unwrap();
        assert!(direct_square(&t, &caps).is_err());
    }

    #[test]
    fn sylow_towers() {
        let caps = Caps::default();
        let s = sylow_tower(&PermGroup::alternating(4), 2, 1, &caps).unwrap();
        assert!(s.certified());
        assert_eq!(s.tower.order(), &BigUint::from(4u32));
        assert_eq!(s.index, BigUint::from(3u32));
        let s = sylow_tower(&PermGroup::alternating(4), 2, 2, &caps).unwrap();
        assert!(s.certified());
        assert_eq!(s.tower.order(), &BigUint::from(1024u32));
        assert_eq!(s.index, BigUint::from(243u32));
        assert!(s.index_coprime_to_p());
        let s = sylow_tower(&PermGroup::cyclic(3), 2, 2, &caps).unwrap();
        assert!(s.tower.group().is_trivial());
    }

    #[test]
    fn squares_and_rigid_stabilizers() {
        let caps = Caps::default();
        let k1 = wreath_tower(&klein(), 1, &caps).unwrap();
        assert_eq!(direct_square(&k1, &caps).unwrap().order_u64(), Some(16));
        let s2 = wreath_tower(&PermGroup::symmetric(2), 2, &caps).unwrap();
        assert_eq!(direct_square(&s2, &caps).unwrap().order_u64(), Some(64));
        let triv = wreath_tower(&PermGroup::trivial(3), 2, &caps).unwrap();
        assert!(direct_square(&triv, &caps).unwrap().is_trivial());

        assert_eq!(s2.rigid_stabilizer(&[1]).unwrap().order_u64(), Some(2));
        assert!(s2.rigid_stabilizer(&[]).unwrap().same_group(s2.group()));
        let k2 = wreath_tower(&klein(), 2, &caps).unwrap();
        assert_eq!(k2.rigid_stabilizer(&[2]).unwrap().order_u64(), Some(4));
        assert!(k2.rigid_stabilizer(&[2, 1, 0]).is_err());
        assert!(k2.rigid_stabilizer(&[4]).is_err());
        assert_eq!(k2.cone(&[2]).unwrap(), 8..12);
    }
}
