use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treegroups::wreath::{wreath_tower, Portrait};
use treegroups::{Caps, PermGroup};

fn labels(base: &PermGroup) -> Vec<treegroups::Permutation> {
    base.elements(&Caps::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn flatten_is_a_homomorphism(seed in any::<u64>(), which in 0usize..3, depth in 1usize..=3) {
        let base = match which {
            0 => PermGroup::symmetric(2),
            1 => PermGroup::symmetric(3),
            _ => PermGroup::alternating(4),
        };
        let depth = if which == 2 { depth.min(2) } else { depth };
        let ls = labels(&base);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = Portrait::random(base.degree(), depth, &ls, &mut rng);
        let q = Portrait::random(base.degree(), depth, &ls, &mut rng);
        let pq = p.compose(&q).unwrap();
        prop_assert_eq!(pq.flatten(), &p.flatten() * &q.flatten());
        prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
        prop_assert_eq!(p.inverse().flatten(), p.flatten().inverse());
    }
}

#[test]
fn flattened_portraits_lie_in_the_tower() {
    let caps = Caps::default();
    let base = PermGroup::symmetric(3);
    let tower = wreath_tower(&base, 3, &caps).unwrap();
    let ls = labels(&base);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let p = Portrait::random(3, 3, &ls, &mut rng);
        assert!(tower.group().contains(&p.flatten()));
    }
}

#[test]
fn same_depth_rigid_stabilizers_commute() {
    let caps = Caps::default();
    for base in [PermGroup::symmetric(2), PermGroup::symmetric(3)] {
        let tower = wreath_tower(&base, 3, &caps).unwrap();
        let d = base.degree();
        for depth in 1..3 {
            let words: Vec<Vec<usize>> = treegroups::wreath::internal_vertices(d, 3)
                .into_iter()
                .filter(|w| w.len() == depth)
                .collect();
            for (i, a) in words.iter().enumerate() {
                let ra = tower.rigid_stabilizer(a).unwrap();
                assert!(!ra.is_trivial());
                for b in &words[i + 1..] {
                    let rb = tower.rigid_stabilizer(b).unwrap();
                    for x in ra.generators() {
                        for y in rb.generators() {
                            assert!(x.commutes_with(y), "{a:?} {b:?}");
                        }
                    }
                }
            }
        }
    }
}
