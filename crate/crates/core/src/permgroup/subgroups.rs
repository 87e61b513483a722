//! Subgroup classes up to conjugacy, by repeated one-element extension.
//!
//! Every subgroup is reached from the trivial group by adjoining one
//! element at a time, and conjugating a chain gives a chain, so extending
//! only class representatives is complete. Classes are deduplicated by the
//! sorted element sets of all conjugates.

use std::collections::{HashMap, HashSet};

use super::{PermGroup, Permutation};
use crate::caps::Caps;
use crate::error::Result;

type Bits = Vec<u64>;

struct Table {
    elements: Vec<Permutation>,
    mul: Vec<u32>,
    inv: Vec<u32>,
    identity: usize,
}

impl Table {
    fn new(g: &PermGroup, caps: &Caps) -> Result<Table> {
        let mut elements = g.elements(caps)?;
        elements.sort();
        let index: HashMap<&Permutation, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e, i as u32))
            .collect();
        let n = elements.len();
        let mut mul = vec![0u32; n * n];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                mul[i * n + j] = index[&(a * b)];
            }
        }
        let inv = elements.iter().map(|e| index[&e.inverse()]).collect();
        let identity = index[&g.identity()] as usize;
        Ok(Table {
            elements,
            mul,
            inv,
            identity,
        })
    }

    fn n(&self) -> usize {
        self.elements.len()
    }

    #[inline]
    fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n() + b] as usize
    }

    fn empty(&self) -> Bits {
        vec![0; self.n().div_ceil(64)]
    }

    fn closure(&self, gens: &[usize]) -> Bits {
        let mut bits = self.empty();
        set(&mut bits, self.identity);
        let mut members = vec![self.identity];
        let mut i = 0;
        while i < members.len() {
            let x = members[i];
            for &s in gens {
                let y = self.mul(x, s);
                if !get(&bits, y) {
                    set(&mut bits, y);
                    members.push(y);
                }
            }
            i += 1;
        }
        bits
    }

    fn conjugate(&self, bits: &Bits, x: usize) -> Bits {
        let xi = self.inv[x] as usize;
        let mut out = self.empty();
        for k in members(bits) {
            set(&mut out, self.mul(self.mul(x, k), xi));
        }
        out
    }

    /// Greedy generating set: smallest elements that enlarge the closure.
    fn generators(&self, bits: &Bits) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut current = self.closure(&gens);
        for k in members(bits) {
            if !get(&current, k) {
                gens.push(k);
                current = self.closure(&gens);
            }
        }
        gens
    }
}

fn get(bits: &Bits, i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

fn set(bits: &mut Bits, i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn members(bits: &Bits) -> impl Iterator<Item = usize> + '_ {
    bits.iter().enumerate().flat_map(|(w, &word)| {
        (0..64)
            .filter(move |b| word >> b & 1 == 1)
            .map(move |b| w * 64 + b)
    })
}

struct Class {
    rep: Bits,
    order: usize,
    key: Vec<usize>,
}

/// One representative per conjugacy class of subgroups of `g`, sorted by
/// order and then by the sorted element list of the representative.
pub fn enumerate_subgroups_up_to_conjugacy(g: &PermGroup, caps: &Caps) -> Result<Vec<PermGroup>> {
    caps.check_subgroup_order(g.order())?;
    let table = Table::new(g, caps)?;
    let n = table.n();
    let mut seen: HashSet<Bits> = HashSet::new();
    let mut classes: Vec<Class> = Vec::new();
    let mut queue: Vec<(Bits, Vec<usize>)> = Vec::new();

    let add_class = |bits: Bits, seen: &mut HashSet<Bits>, classes: &mut Vec<Class>| {
        let mut best: Option<Vec<usize>> = None;
        let mut best_bits = bits.clone();
        for x in 0..n {
            let c = table.conjugate(&bits, x);
            if seen.insert(c.clone()) {
                let key: Vec<usize> = members(&c).collect();
                if best.as_ref().is_none_or(|b| key < *b) {
                    best = Some(key);
                    best_bits = c;
                }
            }
        }
        let key = best.expect("class has at least one member");
        classes.push(Class {
            order: key.len(),
            rep: best_bits.clone(),
            key,
        });
        best_bits
    };

    let trivial = table.closure(&[]);
    let rep = add_class(trivial, &mut seen, &mut classes);
    queue.push((rep.clone(), table.generators(&rep)));
    let mut head = 0;
    while head < queue.len() {
        let (bits, gens) = queue[head].clone();
        head += 1;
        for x in 0..n {
            if get(&bits, x) {
                continue;
            }
            let mut ext = gens.clone();
            ext.push(x);
            let k = table.closure(&ext);
            if seen.contains(&k) {
                continue;
            }
            let rep = add_class(k, &mut seen, &mut classes);
            let rep_gens = table.generators(&rep);
            queue.push((rep, rep_gens));
        }
    }

    classes.sort_by(|a, b| (a.order, &a.key).cmp(&(b.order, &b.key)));
    classes
        .into_iter()
        .map(|c| {
            let gens = table
                .generators(&c.rep)
                .into_iter()
                .map(|i| table.elements[i].clone())
                .collect();
            PermGroup::new(g.degree(), gens)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count_transitive(n: usize) -> usize {
        enumerate_subgroups_up_to_conjugacy(&PermGroup::symmetric(n), &Caps::default())
            .unwrap()
            .iter()
            .filter(|h| h.is_transitive())
            .count()
    }

    #[test]
    fn small_symmetric_groups() {
        let s3 = enumerate_subgroups_up_to_conjugacy(&PermGroup::symmetric(3), &Caps::default())
            .unwrap();
        let orders: Vec<u64> = s3.iter().map(|h| h.order_u64().unwrap()).collect();
        assert_eq!(orders, vec![1, 2, 3, 6]);
        assert_eq!(count_transitive(4), 5);
        assert_eq!(count_transitive(5), 5);
    }

    #[test]
    fn class_counts() {
        let caps = Caps::default();
        let count = |n| {
            enumerate_subgroups_up_to_conjugacy(&PermGroup::symmetric(n), &caps)
                .unwrap()
                .len()
        };
        assert_eq!(count(1), 1);
        assert_eq!(count(4), 11);
        assert_eq!(count(5), 19);
    }

    #[test]
    fn cap_is_enforced() {
        let caps = Caps {
            subgroup_order: 100,
            ..Caps::default()
        };
        assert!(enumerate_subgroups_up_to_conjugacy(&PermGroup::symmetric(5), &caps).is_err());
    }
}
