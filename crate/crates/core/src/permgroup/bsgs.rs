//! Deterministic Schreier–Sims.
//!
//! Orbits are stored as Schreier vectors, so transversal elements are
//! rebuilt by tracing back to the base point instead of being stored.
//! Strong generators are shared between the levels that contain them.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use rand::Rng;

use super::perm::Permutation;

const NOT_IN_ORBIT: u32 = u32::MAX;
const BASE_POINT: u32 = u32::MAX - 1;

/// A strong generator with its inverse.
#[derive(Debug)]
pub(crate) struct Gen {
    pub perm: Permutation,
    inv: Permutation,
}

impl Gen {
    pub fn shared(perm: Permutation) -> Arc<Gen> {
        let inv = perm.inverse();
        Arc::new(Gen { perm, inv })
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Level {
    pub base_point: usize,
    /// Strong generators fixing every earlier base point.
    pub gens: Vec<Arc<Gen>>,
    pub orbit: Vec<usize>,
    /// For an orbit point `b`, the index `k` with `b = gens[k](prev)`.
    label: Vec<u32>,
}

impl Level {
    fn new(base_point: usize, degree: usize) -> Self {
        Level::with_gens(base_point, degree, Vec::new())
    }

    fn with_gens(base_point: usize, degree: usize, gens: Vec<Arc<Gen>>) -> Self {
        let mut level = Level {
            base_point,
            gens,
            orbit: Vec::new(),
            label: vec![NOT_IN_ORBIT; degree],
        };
        level.rebuild_orbit();
        level
    }

    fn push_gen(&mut self, g: Arc<Gen>) {
        self.gens.push(g);
        self.rebuild_orbit();
    }

    fn rebuild_orbit(&mut self) {
        self.label.iter_mut().for_each(|l| *l = NOT_IN_ORBIT);
        self.label[self.base_point] = BASE_POINT;
        self.orbit.clear();
        self.orbit.push(self.base_point);
        let mut i = 0;
        while i < self.orbit.len() {
            let b = self.orbit[i];
            for (k, g) in self.gens.iter().enumerate() {
                let c = g.perm.apply(b);
                if self.label[c] == NOT_IN_ORBIT {
                    self.label[c] = k as u32;
                    self.orbit.push(c);
                }
            }
            i += 1;
        }
    }

    #[inline]
    pub fn contains_point(&self, b: usize) -> bool {
        self.label[b] != NOT_IN_ORBIT
    }

    /// `u_b⁻¹ * g` where `u_b` maps the base point to `b`.
    fn strip_by(&self, mut b: usize, mut g: Permutation) -> Permutation {
        while self.label[b] != BASE_POINT {
            let k = self.label[b] as usize;
            g = &self.gens[k].inv * &g;
            b = self.gens[k].inv.apply(b);
        }
        g
    }

    /// The transversal element mapping the base point to `b`.
    pub fn transversal(&self, mut b: usize) -> Permutation {
        let mut u = Permutation::identity(self.label.len());
        // u = s_k1 * s_k2 * ... built from the far end.
        let mut word = Vec::new();
        while self.label[b] != BASE_POINT {
            let k = self.label[b] as usize;
            word.push(k);
            b = self.gens[k].inv.apply(b);
        }
        for &k in word.iter().rev() {
            u = &self.gens[k].perm * &u;
        }
        u
    }
}

#[derive(Debug, Clone)]
pub(crate) struct StabChain {
    pub degree: usize,
    pub levels: Vec<Level>,
}

impl StabChain {
    /// Runs Schreier–Sims on `gens`. The base starts with `prefix`; further
    /// base points are the smallest points moved by the element that needs them.
    pub fn build(degree: usize, gens: &[Permutation], prefix: &[usize]) -> StabChain {
        let gens: Vec<Arc<Gen>> = gens
            .iter()
            .filter(|g| !g.is_identity())
            .map(|g| Gen::shared(g.clone()))
            .collect();
        let mut base: Vec<usize> = prefix.to_vec();
        for g in &gens {
            if base.iter().all(|&b| g.perm.fixes(b)) {
                base.push(g.perm.smallest_moved_point().expect("non-identity"));
            }
        }
        let mut levels: Vec<Level> = base.iter().map(|&b| Level::new(b, degree)).collect();
        for g in &gens {
            for (i, level) in levels.iter_mut().enumerate() {
                if base[..i].iter().all(|&b| g.perm.fixes(b)) {
                    level.gens.push(g.clone());
                } else {
                    break;
                }
            }
        }
        for level in &mut levels {
            level.rebuild_orbit();
        }
        let mut chain = StabChain { degree, levels };
        chain.complete();
        chain
    }

    fn complete(&mut self) {
        let mut i = self.levels.len();
        'outer: while i > 0 {
            let li = i - 1;
            let n_orbit = self.levels[li].orbit.len();
            let n_gens = self.levels[li].gens.len();
            for oi in 0..n_orbit {
                let beta = self.levels[li].orbit[oi];
                let u_beta = self.levels[li].transversal(beta);
                for k in 0..n_gens {
                    let s = &self.levels[li].gens[k].perm;
                    let su = s * &u_beta;
                    let gamma = s.apply(beta);
                    let h = self.levels[li].strip_by(gamma, su);
                    if h.is_identity() {
                        continue;
                    }
                    let (residue, j) = self.strip_from(h, li + 1);
                    if residue.is_identity() {
                        continue;
                    }
                    if j == self.levels.len() {
                        let b = residue.smallest_moved_point().expect("non-identity");
                        self.levels.push(Level::new(b, self.degree));
                    }
                    let shared = Gen::shared(residue);
                    for l in (li + 1)..=j {
                        self.levels[l].push_gen(shared.clone());
                    }
                    i = j + 1;
                    continue 'outer;
                }
            }
            i -= 1;
        }
    }

    /// Sifts `g` starting at `start`. Returns the residue and the level where
    /// sifting stopped (`levels.len()` if it went through).
    pub fn strip_from(&self, mut g: Permutation, start: usize) -> (Permutation, usize) {
        for (l, level) in self.levels.iter().enumerate().skip(start) {
            let b = g.apply(level.base_point);
            if !level.contains_point(b) {
                return (g, l);
            }
            if b != level.base_point {
                g = level.strip_by(b, g);
            }
        }
        (g, self.levels.len())
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && self.strip_from(g.clone(), 0).0.is_identity()
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::from(1u32), |acc, l| {
            acc * BigUint::from(l.orbit.len())
        })
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base_point).collect()
    }

    /// Generators of the pointwise stabilizer of the first `depth` base points.
    pub fn stabilizer_gens(&self, depth: usize) -> Vec<Permutation> {
        self.levels
            .get(depth)
            .map(|l| l.gens.iter().map(|g| g.perm.clone()).collect())
            .unwrap_or_default()
    }

    /// A chain from known levels: each entry is a base point and generators
    /// of the stabilizer of all earlier base points. The caller vouches that
    /// the levels form a stabilizer chain.
    pub fn from_levels(degree: usize, levels: Vec<(usize, Vec<Arc<Gen>>)>) -> StabChain {
        StabChain {
            degree,
            levels: levels
                .into_iter()
                .map(|(b, gens)| Level::with_gens(b, degree, gens))
                .collect(),
        }
    }

    /// The chain of `self × other` acting on `degree + other.degree` points.
    pub fn direct_product(&self, other: &StabChain) -> StabChain {
        let total = self.degree + other.degree;
        let embed = |chain: &StabChain, offset: usize| {
            let mut seen: HashMap<*const Gen, Arc<Gen>> = HashMap::new();
            chain
                .levels
                .iter()
                .map(|l| {
                    let gens: Vec<Arc<Gen>> = l
                        .gens
                        .iter()
                        .map(|g| {
                            seen.entry(Arc::as_ptr(g))
                                .or_insert_with(|| Gen::shared(g.perm.embed(total, offset)))
                                .clone()
                        })
                        .collect();
                    (l.base_point + offset, gens)
                })
                .collect::<Vec<_>>()
        };
        let left = embed(self, 0);
        let right = embed(other, self.degree);
        let right_top: Vec<Arc<Gen>> = right.first().map(|(_, g)| g.clone()).unwrap_or_default();
        let levels = left
            .into_iter()
            .map(|(b, mut gens)| {
                gens.extend(right_top.iter().cloned());
                (b, gens)
            })
            .chain(right)
            .collect();
        StabChain::from_levels(total, levels)
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        let mut g = Permutation::identity(self.degree);
        for level in self.levels.iter().rev() {
            let b = level.orbit[rng.gen_range(0..level.orbit.len())];
            g = &level.transversal(b) * &g;
        }
        g
    }

    /// Calls `f` once for every group element.
    pub fn for_each_element(&self, mut f: impl FnMut(&Permutation)) {
        let transversals: Vec<Vec<Permutation>> = self
            .levels
            .iter()
            .map(|l| l.orbit.iter().map(|&b| l.transversal(b)).collect())
            .collect();
        fn rec(
            transversals: &[Vec<Permutation>],
            depth: usize,
            acc: &Permutation,
            f: &mut dyn FnMut(&Permutation),
        ) {
            if depth == transversals.len() {
                f(acc);
                return;
            }
            for u in &transversals[depth] {
                rec(transversals, depth + 1, &(acc * u), f);
            }
        }
        rec(
            &transversals,
            0,
            &Permutation::identity(self.degree),
            &mut f,
        );
    }
}
