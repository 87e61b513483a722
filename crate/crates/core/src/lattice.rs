//! Subsets of a finite ground set (leaves of a tower, vertices of a ball)
//! under a permutation group: rigid stabilizers and their lattice identities.
//!
//! This is a finite model: a subset of leaves stands in for a clopen set and
//! the rigid stabilizer of a cone union for a locally normal subgroup.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::permgroup::{PermGroup, Permutation};
use crate::wreath::WreathTower;

pub const MODEL_NOTE: &str = "finite model: subsets of the ground set stand in for clopen sets, \
rigid stabilizers of cone unions for locally normal subgroups";

/// A subset of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(FixedBitSet);

impl Subset {
    pub fn empty(n: usize) -> Subset {
        Subset(FixedBitSet::with_capacity(n))
    }

    pub fn full(n: usize) -> Subset {
        let mut s = FixedBitSet::with_capacity(n);
        s.insert_range(..);
        Subset(s)
    }

    pub fn from_points(n: usize, points: impl IntoIterator<Item = usize>) -> Result<Subset> {
        let mut s = FixedBitSet::with_capacity(n);
        for p in points {
            if p >= n {
                return Err(Error::PointOutOfRange {
                    point: p,
                    degree: n,
                });
            }
            s.insert(p);
        }
        Ok(Subset(s))
    }

    pub fn ground_size(&self) -> usize {
        self.0.len()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.contains(x)
    }

    pub fn points(&self) -> Vec<usize> {
        self.0.ones().collect()
    }

    pub fn meet(&self, other: &Subset) -> Subset {
        Subset(&self.0 & &other.0)
    }

    pub fn join(&self, other: &Subset) -> Subset {
        Subset(&self.0 | &other.0)
    }

    pub fn complement(&self) -> Subset {
        let mut s = self.0.clone();
        s.toggle_range(..);
        Subset(s)
    }

    pub fn is_subset(&self, other: &Subset) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &Subset) -> bool {
        self.0.is_disjoint(&other.0)
    }

    /// Image under `g`.
    pub fn act(&self, g: &Permutation) -> Subset {
        let mut s = FixedBitSet::with_capacity(self.ground_size());
        for x in self.0.ones() {
            s.insert(g.apply(x));
        }
        Subset(s)
    }
}

/// Elements of `g` acting trivially outside `alpha`.
pub fn rist(g: &PermGroup, alpha: &Subset) -> Result<PermGroup> {
    if alpha.ground_size() != g.degree() {
        return Err(Error::DegreeMismatch {
            left: g.degree(),
            right: alpha.ground_size(),
        });
    }
    g.pointwise_stabilizer(&alpha.complement().points())
}

/// All `g`-invariant subsets, i.e. unions of orbits, smallest first.
pub fn fixed_elements(g: &PermGroup, caps: &Caps) -> Result<Vec<Subset>> {
    let orbits = g.orbits();
    caps.check_fixed_orbits(orbits.len())?;
    let n = g.degree();
    let mut out: Vec<Subset> = (0u64..1 << orbits.len())
        .map(|mask| {
            let points = orbits
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .flat_map(|(_, o)| o.iter().copied());
            Subset::from_points(n, points).expect("orbit points are in range")
        })
        .collect();
    out.sort_by_key(|a| (a.len(), a.points()));
    Ok(out)
}

/// Only the empty set and the whole ground are invariant.
pub fn is_topologically_transitive_analog(g: &PermGroup) -> bool {
    g.orbits().len() == 1
}

/// A labelled subset in a sweep.
#[derive(Debug, Clone)]
pub struct NamedSubset {
    pub label: String,
    pub subset: Subset,
}

fn word_label(w: &[usize]) -> String {
    if w.is_empty() {
        "root".into()
    } else {
        w.iter()
            .map(|x| (x + 1).to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// Leaves below a vertex word (0-based letters).
pub fn cone(tower: &WreathTower, vertex: &[usize]) -> Result<Subset> {
    Subset::from_points(tower.leaf_count(), tower.cone(vertex)?)
}

/// `none`, `all`, or comma-separated vertex words such as `1.2,3` (letters
/// 1-based, `root` for the whole tree).
pub fn parse_cone_spec(tower: &WreathTower, spec: &str) -> Result<Subset> {
    let n = tower.leaf_count();
    let spec = spec.trim();
    match spec {
        "none" | "" => return Ok(Subset::empty(n)),
        "all" => return Ok(Subset::full(n)),
        _ => {}
    }
    let mut out = Subset::empty(n);
    for part in spec.split(',') {
        let part = part.trim();
        let word: Vec<usize> = if part == "root" {
            Vec::new()
        } else {
            part.split('.')
                .map(|x| match x.trim().parse::<usize>() {
                    Ok(k) if k >= 1 => Ok(k - 1),
                    _ => Err(Error::Input(format!(
                        "bad cone `{part}`: letters are 1-based child indices"
                    ))),
                })
                .collect::<Result<_>>()?
        };
        out = out.join(&cone(tower, &word)?);
    }
    Ok(out)
}

/// `∅`, the ground, and the cone below every non-root vertex.
pub fn cone_family(tower: &WreathTower) -> Vec<NamedSubset> {
    let n = tower.leaf_count();
    let mut out = vec![
        NamedSubset {
            label: "none".into(),
            subset: Subset::empty(n),
        },
        NamedSubset {
            label: "all".into(),
            subset: Subset::full(n),
        },
    ];
    let d = tower.arity();
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..tower.depth() {
        level = level
            .iter()
            .flat_map(|w| {
                (0..d).map(move |x| {
                    let mut v = w.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
        for w in &level {
            out.push(NamedSubset {
                label: word_label(w),
                subset: cone(tower, w).expect("word in range"),
            });
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SubsetCheck {
    pub label: String,
    pub size: usize,
    pub rist_order: String,
    /// `rist(αᶜ)` centralizes `rist(α)`.
    pub complement_centralizes: bool,
    /// `C_G(rist(α)) = rist(αᶜ)`; `None` when the centralizer was not computed.
    pub centralizer_equal: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairCheck {
    pub alpha: String,
    pub beta: String,
    pub meet_order: String,
    /// `rist(α ∩ β) = rist(α) ∩ rist(β)`.
    pub meet_identity: bool,
    pub disjoint: bool,
    /// For disjoint supports, generators commute.
    pub commute: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticeReport {
    pub model: &'static str,
    pub group_order: String,
    pub ground_size: usize,
    pub subsets: Vec<SubsetCheck>,
    pub pairs: Vec<PairCheck>,
    pub pairs_total: usize,
    pub truncated: bool,
    pub meet_identity_holds: bool,
    pub disjoint_commute_holds: bool,
    pub complement_centralizes_holds: bool,
    pub monotone_holds: bool,
    pub centralizer_equal_observed: usize,
    pub centralizer_equal_failed: usize,
}

impl LatticeReport {
    /// The asserted identities; centralizer equality is only observed.
    pub fn holds(&self) -> bool {
        self.meet_identity_holds
            && self.disjoint_commute_holds
            && self.complement_centralizes_holds
            && self.monotone_holds
    }
}

fn generators_commute(a: &PermGroup, b: &PermGroup) -> bool {
    a.generators()
        .iter()
        .all(|x| b.generators().iter().all(|y| x.commutes_with(y)))
}

/// Checks the rigid-stabilizer identities over unordered pairs (including
/// `α = β`) of the given subsets, stopping after `max_pairs` pairs.
pub fn lattice_checks(
    g: &PermGroup,
    subsets: &[NamedSubset],
    max_pairs: usize,
    caps: &Caps,
) -> Result<LatticeReport> {
    let mut cache: HashMap<Subset, PermGroup> = HashMap::new();
    let mut rist_of = |s: &Subset| -> Result<PermGroup> {
        if let Some(r) = cache.get(s) {
            return Ok(r.clone());
        }
        let r = rist(g, s)?;
        cache.insert(s.clone(), r.clone());
        Ok(r)
    };
    let centralizers_feasible = caps.check_elements(g.order()).is_ok();

    let mut subset_checks = Vec::new();
    for ns in subsets {
        let r = rist_of(&ns.subset)?;
        let rc = rist_of(&ns.subset.complement())?;
        let centralizer_equal = if centralizers_feasible {
            Some(g.centralizer(&r, caps)?.same_group(&rc))
        } else {
            None
        };
        subset_checks.push(SubsetCheck {
            label: ns.label.clone(),
            size: ns.subset.len(),
            rist_order: r.order().to_string(),
            complement_centralizes: generators_commute(&r, &rc),
            centralizer_equal,
        });
    }

    let pairs_total = subsets.len() * (subsets.len() + 1) / 2;
    let mut pairs = Vec::new();
    let mut monotone = true;
    'outer: for (i, a) in subsets.iter().enumerate() {
        for b in &subsets[i..] {
            if pairs.len() >= max_pairs {
                break 'outer;
            }
            let ra = rist_of(&a.subset)?;
            let rb = rist_of(&b.subset)?;
            let meet = rist_of(&a.subset.meet(&b.subset))?;
            // rist(α) ∩ rist(β), computed inside rist(α) rather than from G
            let both = ra.pointwise_stabilizer(&b.subset.complement().points())?;
            let disjoint = a.subset.is_disjoint(&b.subset);
            if a.subset.is_subset(&b.subset) && !ra.is_subgroup_of(&rb) {
                monotone = false;
            }
            if b.subset.is_subset(&a.subset) && !rb.is_subgroup_of(&ra) {
                monotone = false;
            }
            pairs.push(PairCheck {
                alpha: a.label.clone(),
                beta: b.label.clone(),
                meet_order: meet.order().to_string(),
                meet_identity: meet.same_group(&both),
                disjoint,
                commute: disjoint.then(|| generators_commute(&ra, &rb)),
            });
        }
    }

    Ok(LatticeReport {
        model: MODEL_NOTE,
        group_order: g.order().to_string(),
        ground_size: g.degree(),
        meet_identity_holds: pairs.iter().all(|p| p.meet_identity),
        disjoint_commute_holds: pairs.iter().all(|p| p.commute != Some(false)),
        complement_centralizes_holds: subset_checks.iter().all(|s| s.complement_centralizes),
        monotone_holds: monotone,
        centralizer_equal_observed: subset_checks
            .iter()
            .filter(|s| s.centralizer_equal == Some(true))
            .count(),
        centralizer_equal_failed: subset_checks
            .iter()
            .filter(|s| s.centralizer_equal == Some(false))
            .count(),
        truncated: pairs.len() < pairs_total,
        pairs_total,
        subsets: subset_checks,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::NamedFamily;
    use crate::wreath::wreath_tower;

    #[test]
    fn rist_examples() {
        let caps = Caps::default();
        let t = wreath_tower(&PermGroup::symmetric(2), 2, &caps).unwrap();
        let c = parse_cone_spec(&t, "1").unwrap();
        assert_eq!(c.points(), vec![0, 1]);
        assert_eq!(rist(t.group(), &c).unwrap().order_u64(), Some(2));
        assert!(rist(t.group(), &Subset::empty(4)).unwrap().is_trivial());
        assert!(rist(t.group(), &Subset::full(4))
            .unwrap()
            .same_group(t.group()));
        let s4 = PermGroup::symmetric(4);
        let r = rist(&s4, &Subset::from_points(4, [0, 1]).unwrap()).unwrap();
        assert_eq!(r.order_u64(), Some(2));
        assert!(r.contains(&Permutation::parse_cycles(4, "(1 2)").unwrap()));
    }

    #[test]
    fn algebra_ops() {
        let a = Subset::from_points(6, [0, 1, 2]).unwrap();
        let b = Subset::from_points(6, [2, 3]).unwrap();
        assert_eq!(a.meet(&b).points(), vec![2]);
        assert_eq!(a.join(&b).points(), vec![0, 1, 2, 3]);
        assert_eq!(a.complement().points(), vec![3, 4, 5]);
        let g = Permutation::parse_cycles(6, "(1 4)(2 5)(3 6)").unwrap();
        assert_eq!(a.act(&g), a.complement());
        assert_eq!(a.meet(&b).act(&g), a.act(&g).meet(&b.act(&g)));
        assert!(Subset::from_points(3, [3]).is_err());
    }

    #[test]
    fn sweeps() {
        let caps = Caps::default();
        let t = wreath_tower(&NamedFamily::Klein4.group().unwrap(), 2, &caps).unwrap();
        let report = lattice_checks(t.group(), &cone_family(&t), 10_000, &caps).unwrap();
        assert!(report.holds());
        assert!(!report.truncated);
        let p = report
            .pairs
            .iter()
            .find(|p| p.alpha == "1" && p.beta == "2")
            .unwrap();
        assert_eq!(p.commute, Some(true));
        assert_eq!(p.meet_order, "1");

        let t = wreath_tower(&PermGroup::symmetric(2), 2, &caps).unwrap();
        let report = lattice_checks(t.group(), &cone_family(&t), 10_000, &caps).unwrap();
        let one = report.subsets.iter().find(|s| s.label == "1").unwrap();
        assert!(one.complement_centralizes);
        assert_eq!(one.rist_order, "2");
        let capped = lattice_checks(t.group(), &cone_family(&t), 3, &caps).unwrap();
        assert!(capped.truncated && capped.pairs.len() == 3);
    }

    #[test]
    fn invariant_subsets() {
        let caps = Caps::default();
        let t = wreath_tower(&PermGroup::symmetric(3), 2, &caps).unwrap();
        assert_eq!(fixed_elements(t.group(), &caps).unwrap().len(), 2);
        assert!(is_topologically_transitive_analog(t.group()));
        assert_eq!(
            fixed_elements(&PermGroup::trivial(4), &caps).unwrap().len(),
            16
        );
        let intransitive =
            PermGroup::new(3, vec![Permutation::parse_cycles(3, "(1 2)").unwrap()]).unwrap();
        let t = wreath_tower(&intransitive, 2, &caps).unwrap();
        let fixed = fixed_elements(t.group(), &caps).unwrap();
        let block = parse_cone_spec(&t, "1,2").unwrap();
        assert!(fixed.contains(&block));
        assert!(!is_topologically_transitive_analog(t.group()));
        let tight = Caps {
            fixed_orbits: 3,
            ..Caps::default()
        };
        assert!(fixed_elements(&PermGroup::trivial(4), &tight).is_err());
    }
}
