//! Brute-force reference computations that never touch a stabilizer chain:
//! element closures, subgroup facts from element lists, and ball
//! automorphisms found by backtracking over the bare graph.

use std::collections::HashSet;

use crate::caps::Caps;
use crate::criteria::Facts;
use crate::error::Result;
use crate::permgroup::Permutation;
use crate::tree::{CenterKind, TreeBall};

/// Every product of the generators, by breadth-first search.
pub fn closure(degree: usize, gens: &[Permutation], caps: &Caps) -> Result<Vec<Permutation>> {
    let id = Permutation::identity(degree);
    let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
    let mut out = vec![id];
    let mut i = 0;
    while i < out.len() {
        for s in gens {
            let y = &out[i] * s;
            if seen.insert(y.clone()) {
                out.push(y);
                caps.check_elements(out.len())?;
            }
        }
        i += 1;
    }
    Ok(out)
}

fn orbit_of(elements: &[Permutation], a: usize) -> HashSet<usize> {
    elements.iter().map(|g| g.apply(a)).collect()
}

/// The criteria facts, recomputed from element lists.
pub fn facts(
    f: &[Permutation],
    f_prime: &[Permutation],
    degree: usize,
    caps: &Caps,
) -> Result<Facts> {
    let fp_set: HashSet<&Permutation> = f_prime.iter().collect();
    let transitive = |els: &[Permutation]| orbit_of(els, 0).len() == degree;
    let free = |els: &[Permutation]| {
        els.iter()
            .all(|g| g.is_identity() || (0..degree).all(|x| g.apply(x) != x))
    };
    let stabilizing: Vec<Permutation> = f_prime
        .iter()
        .filter(|g| (0..degree).any(|x| g.apply(x) == x))
        .cloned()
        .collect();
    let gen_by_stabs = closure(degree, &stabilizing, caps)?.len() == f_prime.len();
    let f_orbits: Vec<HashSet<usize>> = (0..degree).map(|a| orbit_of(f, a)).collect();
    Ok(Facts {
        f_transitive: transitive(f),
        f_free: free(f),
        fp_transitive: transitive(f_prime),
        fp_free: free(f_prime),
        fp_gen_by_stabs: gen_by_stabs,
        f_le_fp: f.iter().all(|g| fp_set.contains(g)),
        fp_le_young_f: f_prime
            .iter()
            .all(|g| (0..degree).all(|x| f_orbits[x].contains(&g.apply(x)))),
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `O^p(G)` as the subgroup generated by the elements of order prime to `p`.
pub fn p_residual_order(
    elements: &[Permutation],
    degree: usize,
    p: u64,
    caps: &Caps,
) -> Result<usize> {
    let coprime: Vec<Permutation> = elements
        .iter()
        .filter(|g| gcd(g.order(), p) == 1)
        .cloned()
        .collect();
    Ok(closure(degree, &coprime, caps)?.len())
}

/// Center-preserving automorphisms of the ball's underlying graph, found by
/// extending partial maps along adjacency.
pub fn ball_graph_automorphisms(ball: &TreeBall) -> Vec<Permutation> {
    let n = ball.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for e in ball.edges() {
        adj[e.origin].push(e.target);
    }
    // search order: breadth first from the center, so each vertex after the
    // first has an already-mapped neighbour
    let starts: Vec<usize> = match ball.center() {
        CenterKind::Vertex => vec![0],
        CenterKind::Edge => vec![0, 1],
    };
    let mut order = starts.clone();
    let mut placed = vec![false; n];
    for &s in &starts {
        placed[s] = true;
    }
    let mut i = 0;
    while i < order.len() {
        for &t in &adj[order[i]] {
            if !placed[t] {
                placed[t] = true;
                order.push(t);
            }
        }
        i += 1;
    }
    let seeds: Vec<Vec<usize>> = match ball.center() {
        CenterKind::Vertex => vec![vec![0]],
        CenterKind::Edge => vec![vec![0, 1], vec![1, 0]],
    };
    let mut out = Vec::new();
    for seed in seeds {
        let mut images = vec![usize::MAX; n];
        let mut used = vec![false; n];
        for (k, &s) in starts.iter().enumerate() {
            images[s] = seed[k];
            used[seed[k]] = true;
        }
        search(&adj, &order, starts.len(), &mut images, &mut used, &mut out);
    }
    out
}

fn search(
    adj: &[Vec<usize>],
    order: &[usize],
    k: usize,
    images: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Permutation>,
) {
    let Some(&v) = order.get(k) else {
        out.push(Permutation::from_images(images.clone()).expect("bijective"));
        return;
    };
    for w in 0..adj.len() {
        if used[w] || adj[w].len() != adj[v].len() {
            continue;
        }
        let consistent = adj[v]
            .iter()
            .filter(|&&x| images[x] != usize::MAX)
            .all(|&x| adj[w].contains(&images[x]));
        if !consistent {
            continue;
        }
        images[v] = w;
        used[w] = true;
        search(adj, order, k + 1, images, used, out);
        images[v] = usize::MAX;
        used[w] = false;
    }
}

/// Graph automorphisms whose local action at every interior vertex lies in
/// the given element list.
pub fn ball_group_elements(ball: &TreeBall, local: &[Permutation]) -> Vec<Permutation> {
    let allowed: HashSet<Vec<usize>> = local.iter().map(|s| s.images()).collect();
    let d = ball.d();
    let interior: Vec<usize> = (0..ball.vertex_count())
        .filter(|&v| ball.out_edges(v).len() == d)
        .collect();
    ball_graph_automorphisms(ball)
        .into_iter()
        .filter(|g| {
            interior.iter().all(|&v| {
                let mut sigma = vec![usize::MAX; d];
                for &e in ball.out_edges(v) {
                    let edge = ball.edge(e);
                    let image = ball
                        .out_edges(g.apply(v))
                        .iter()
                        .copied()
                        .find(|&f| ball.edge(f).target == g.apply(edge.target))
                        .expect("automorphism");
                    sigma[ball.color(e).expect("colored")] = ball.color(image).expect("colored");
                }
                allowed.contains(&sigma)
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::PermGroup;
    use crate::tree::build_ball;

    #[test]
    fn closure_orders() {
        let caps = Caps::default();
        let s5 = PermGroup::symmetric(5);
        assert_eq!(closure(5, s5.generators(), &caps).unwrap().len(), 120);
        assert!(closure(
            5,
            s5.generators(),
            &Caps {
                elements: 50,
                ..caps
            }
        )
        .is_err());
    }

    #[test]
    fn ball_automorphism_counts() {
        let caps = Caps::default();
        let ball = build_ball(3, 2, CenterKind::Vertex, &caps)
            .unwrap()
            .legal_coloring();
        assert_eq!(ball_graph_automorphisms(&ball).len(), 48);
        let c3 = closure(3, PermGroup::cyclic(3).generators(), &caps).unwrap();
        assert_eq!(ball_group_elements(&ball, &c3).len(), 3);
        let edge = build_ball(3, 1, CenterKind::Edge, &caps)
            .unwrap()
            .legal_coloring();
        assert_eq!(ball_graph_automorphisms(&edge).len(), 8);
    }
}
