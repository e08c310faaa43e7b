//! Finite groups as multiplication tables, with permutation-generator
//! construction, subgroup enumeration, and a deterministic generating set.
//!
//! Elements are indices 0..n; index 0 is always the identity.

use crate::error::{Error, Result};
use std::collections::{BTreeSet, HashMap};

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u32>, // row-major: table[a * order + b] = a·b
    inv: Vec<u32>,
    gens: Vec<usize>,
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteGroup(order {})", self.order)
    }
}

impl FiniteGroup {
    /// Build from a multiplication table; validates group axioms exhaustively
    /// for orders up to 256 and reindexes so the identity is element 0.
    pub fn from_table(raw: Vec<Vec<u32>>) -> Result<FiniteGroup> {
        let n = raw.len();
        if n == 0 || raw.iter().any(|r| r.len() != n) {
            return Err(Error::structure("multiplication table must be square"));
        }
        if raw
            .iter()
            .any(|r| r.iter().any(|&x| x as usize >= n))
        {
            return Err(Error::structure("table entry out of range"));
        }
        // locate identity
        let id = (0..n)
            .find(|&e| (0..n).all(|a| raw[e][a] as usize == a && raw[a][e] as usize == a))
            .ok_or_else(|| Error::structure("no identity element"))?;
        // reindex: identity first, rest in original order
        let mut perm: Vec<usize> = Vec::with_capacity(n);
        perm.push(id);
        perm.extend((0..n).filter(|&x| x != id));
        let mut pos = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            pos[old] = new;
        }
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                table[pos[a] * n + pos[b]] = pos[raw[a][b] as usize] as u32;
            }
        }
        let g = FiniteGroup {
            order: n,
            table,
            inv: vec![0; n],
            gens: vec![],
        };
        g.finish()
    }

    fn finish(mut self) -> Result<FiniteGroup> {
        let n = self.order;
        // inverses
        let mut inv = vec![u32::MAX; n];
        for a in 0..n {
            for b in 0..n {
                if self.table[a * n + b] == 0 {
                    inv[a] = b as u32;
                }
            }
        }
        if inv.iter().any(|&x| x == u32::MAX) {
            return Err(Error::structure("an element has no inverse"));
        }
        self.inv = inv;
        // associativity, exhaustive for |G| <= 256
        if n <= 256 {
            for a in 0..n {
                for b in 0..n {
                    let ab = self.table[a * n + b] as usize;
                    for c in 0..n {
                        let bc = self.table[b * n + c] as usize;
                        if self.table[ab * n + c] != self.table[a * n + bc] {
                            return Err(Error::structure("multiplication is not associative"));
                        }
                    }
                }
            }
        }
        // deterministic generating set: smallest elements that grow the closure
        let mut gens = Vec::new();
        let mut closed: BTreeSet<usize> = BTreeSet::new();
        closed.insert(0);
        while closed.len() < n {
            let next = (0..n).find(|x| !closed.contains(x)).unwrap();
            gens.push(next);
            // close
            let mut frontier: Vec<usize> = closed.iter().copied().chain([next]).collect();
            closed.insert(next);
            while let Some(x) = frontier.pop() {
                for &g in closed.clone().iter() {
                    for y in [self.table[x * n + g] as usize, self.table[g * n + x] as usize] {
                        if closed.insert(y) {
                            frontier.push(y);
                        }
                    }
                }
            }
        }
        self.gens = gens;
        Ok(self)
    }

    /// Closure of permutation generators acting on 0..degree.
    pub fn from_permutations(degree: usize, gens: &[Vec<usize>]) -> Result<FiniteGroup> {
        for g in gens {
            if g.len() != degree {
                return Err(Error::structure("permutation degree mismatch"));
            }
            let mut seen = vec![false; degree];
            for &x in g {
                if x >= degree || seen[x] {
                    return Err(Error::structure("not a permutation"));
                }
                seen[x] = true;
            }
        }
        let id: Vec<usize> = (0..degree).collect();
        let mut elems: Vec<Vec<usize>> = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        index.insert(id, 0);
        let mut frontier = vec![0usize];
        while let Some(i) = frontier.pop() {
            for g in gens {
                // compose: (x ∘ g)(k) = x[g[k]]
                let x = elems[i].clone();
                let y: Vec<usize> = (0..degree).map(|k| x[g[k]]).collect();
                if !index.contains_key(&y) {
                    let idx = elems.len();
                    if idx > 4096 {
                        return Err(Error::budget("permutation closure exceeds 4096 elements"));
                    }
                    index.insert(y.clone(), idx);
                    elems.push(y);
                    frontier.push(idx);
                }
            }
        }
        let n = elems.len();
        let mut raw = vec![vec![0u32; n]; n];
        for a in 0..n {
            for b in 0..n {
                let prod: Vec<usize> = (0..degree).map(|k| elems[a][elems[b][k]]).collect();
                raw[a][b] = index[&prod] as u32;
            }
        }
        FiniteGroup::from_table(raw)
    }

    pub fn trivial() -> FiniteGroup {
        FiniteGroup::from_table(vec![vec![0]]).unwrap()
    }

    pub fn cyclic(n: usize) -> FiniteGroup {
        let raw = (0..n)
            .map(|a| (0..n).map(|b| ((a + b) % n) as u32).collect())
            .collect();
        FiniteGroup::from_table(raw).unwrap()
    }

    pub fn product(g: &FiniteGroup, h: &FiniteGroup) -> FiniteGroup {
        let n = g.order * h.order;
        let idx = |a: usize, b: usize| a * h.order + b;
        let mut raw = vec![vec![0u32; n]; n];
        for a1 in 0..g.order {
            for b1 in 0..h.order {
                for a2 in 0..g.order {
                    for b2 in 0..h.order {
                        raw[idx(a1, b1)][idx(a2, b2)] =
                            idx(g.mul(a1, a2), h.mul(b1, b2)) as u32;
                    }
                }
            }
        }
        FiniteGroup::from_table(raw).unwrap()
    }

    pub fn symmetric3() -> FiniteGroup {
        FiniteGroup::from_permutations(3, &[vec![1, 0, 2], vec![1, 2, 0]]).unwrap()
    }

    pub fn dihedral(n: usize) -> FiniteGroup {
        // rotation + reflection on n points
        let rot: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        let refl: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
        FiniteGroup::from_permutations(n, &[rot, refl]).unwrap()
    }

    pub fn quaternion8() -> FiniteGroup {
        // regular representation indices: 1, i, j, k, -1, -i, -j, -k
        let mul = |a: usize, b: usize| -> usize {
            // encode a = (sign, unit) with unit in 0..4 = {1,i,j,k}
            let (sa, ua) = (a / 4, a % 4);
            let (sb, ub) = (b / 4, b % 4);
            let (s, u) = match (ua, ub) {
                (0, x) => (0, x),
                (x, 0) => (0, x),
                (1, 1) | (2, 2) | (3, 3) => (1, 0),
                (1, 2) => (0, 3),
                (2, 1) => (1, 3),
                (2, 3) => (0, 1),
                (3, 2) => (1, 1),
                (3, 1) => (0, 2),
                (1, 3) => (1, 2),
                _ => unreachable!(),
            };
            ((sa + sb + s) % 2) * 4 + u
        };
        let raw = (0..8)
            .map(|a| (0..8).map(|b| mul(a, b) as u32).collect())
            .collect();
        FiniteGroup::from_table(raw).unwrap()
    }

    pub fn alternating4() -> FiniteGroup {
        FiniteGroup::from_permutations(4, &[vec![1, 0, 3, 2], vec![1, 2, 0, 3]]).unwrap()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn id(&self) -> usize {
        0
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> {
        0..self.order
    }

    /// A deterministic generating set (empty for the trivial group).
    pub fn generators(&self) -> &[usize] {
        &self.gens
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn power(&self, a: usize, e: usize) -> usize {
        let mut x = 0;
        for _ in 0..e {
            x = self.mul(x, a);
        }
        x
    }

    /// All subgroups, each as a sorted element list (identity-first lattice).
    pub fn subgroups(&self) -> Vec<Vec<usize>> {
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        found.insert(vec![0]);
        let mut frontier: Vec<Vec<usize>> = vec![vec![0]];
        while let Some(h) = frontier.pop() {
            for x in 1..self.order {
                if h.binary_search(&x).is_ok() {
                    continue;
                }
                let ext = self.close(&h, x);
                if found.insert(ext.clone()) {
                    frontier.push(ext);
                }
            }
        }
        found.into_iter().collect()
    }

    fn close(&self, h: &[usize], x: usize) -> Vec<usize> {
        let mut set: BTreeSet<usize> = h.iter().copied().collect();
        set.insert(x);
        loop {
            let mut grew = false;
            let cur: Vec<usize> = set.iter().copied().collect();
            for &a in &cur {
                for &b in &cur {
                    if set.insert(self.mul(a, b)) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        set.into_iter().collect()
    }

    /// Quotient by a normal subgroup: returns the quotient group and the
    /// projection map (element → quotient element index).
    pub fn quotient(&self, normal: &[usize]) -> Result<(FiniteGroup, Vec<usize>)> {
        if !self.is_subgroup(normal) {
            return Err(Error::structure("not a subgroup"));
        }
        let nset: BTreeSet<usize> = normal.iter().copied().collect();
        for &h in normal {
            for g in 0..self.order {
                if !nset.contains(&self.mul(self.mul(g, h), self.inv(g))) {
                    return Err(Error::structure("subgroup is not normal"));
                }
            }
        }
        // cosets
        let mut coset_of = vec![usize::MAX; self.order];
        let mut reps = Vec::new();
        for g in 0..self.order {
            if coset_of[g] != usize::MAX {
                continue;
            }
            let idx = reps.len();
            reps.push(g);
            for &h in normal {
                coset_of[self.mul(g, h)] = idx;
            }
        }
        let k = reps.len();
        let raw: Vec<Vec<u32>> = (0..k)
            .map(|a| {
                (0..k)
                    .map(|b| coset_of[self.mul(reps[a], reps[b])] as u32)
                    .collect()
            })
            .collect();
        // from_table reindexes so the identity is 0; compose the relabeling
        let q = FiniteGroup::from_table(raw)?;
        // recover the relabeling: identity coset moves to 0, others keep order
        let id_coset = coset_of[0];
        let relabel = |c: usize| -> usize {
            if c == id_coset {
                0
            } else if c < id_coset {
                c + 1
            } else {
                c
            }
        };
        let proj: Vec<usize> = (0..self.order).map(|g| relabel(coset_of[g])).collect();
        // sanity: proj is a homomorphism
        for a in 0..self.order {
            for b in 0..self.order {
                debug_assert_eq!(proj[self.mul(a, b)], q.mul(proj[a], proj[b]));
            }
        }
        Ok((q, proj))
    }

    pub fn is_subgroup(&self, h: &[usize]) -> bool {
        let set: BTreeSet<usize> = h.iter().copied().collect();
        set.contains(&0)
            && h.iter()
                .all(|&a| h.iter().all(|&b| set.contains(&self.mul(a, b))))
    }

    /// Left-coset representatives of h in the group (identity coset first).
    pub fn left_transversal(&self, h: &[usize]) -> Vec<usize> {
        let set: BTreeSet<usize> = h.iter().copied().collect();
        let mut covered = vec![false; self.order];
        let mut reps = Vec::new();
        for g in 0..self.order {
            if covered[g] {
                continue;
            }
            reps.push(g);
            for &x in &set {
                covered[self.mul(g, x)] = true;
            }
        }
        reps
    }

    /// Decompose g = rep·h for the left transversal: returns (rep index, h).
    pub fn left_coset_decompose(&self, reps: &[usize], hset: &BTreeSet<usize>, g: usize) -> (usize, usize) {
        for (i, &r) in reps.iter().enumerate() {
            let h = self.mul(self.inv(r), g);
            if hset.contains(&h) {
                return (i, h);
            }
        }
        unreachable!("transversal does not cover the group")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_and_product_groups() {
        let c6 = FiniteGroup::cyclic(6);
        assert_eq!(c6.order(), 6);
        assert_eq!(c6.element_order(1), 6);
        let v4 = FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
        assert_eq!(v4.order(), 4);
        assert!(v4.is_abelian());
        assert!(v4.elements().all(|a| v4.mul(a, a) == 0));
    }

    #[test]
    fn s3_and_q8() {
        let s3 = FiniteGroup::symmetric3();
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        let q8 = FiniteGroup::quaternion8();
        assert_eq!(q8.order(), 8);
        assert!(!q8.is_abelian());
        // exactly one element of order 2 in Q8
        assert_eq!(
            q8.elements().filter(|&a| q8.element_order(a) == 2).count(),
            1
        );
        let a4 = FiniteGroup::alternating4();
        assert_eq!(a4.order(), 12);
    }

    #[test]
    fn subgroup_lattice_counts() {
        // Z/6 has subgroups of orders 1, 2, 3, 6
        let c6 = FiniteGroup::cyclic(6);
        let subs = c6.subgroups();
        let mut orders: Vec<usize> = subs.iter().map(|s| s.len()).collect();
        orders.sort();
        assert_eq!(orders, vec![1, 2, 3, 6]);
        // S3 has 6 subgroups: 1, three of order 2, one of order 3, S3
        let s3 = FiniteGroup::symmetric3();
        assert_eq!(s3.subgroups().len(), 6);
        // V4 has 5 subgroups
        let v4 = FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
        assert_eq!(v4.subgroups().len(), 5);
    }

    #[test]
    fn transversal_decomposition() {
        let s3 = FiniteGroup::symmetric3();
        for h in s3.subgroups() {
            let reps = s3.left_transversal(&h);
            assert_eq!(reps.len() * h.len(), s3.order());
            let hset: BTreeSet<usize> = h.iter().copied().collect();
            for g in s3.elements() {
                let (i, hh) = s3.left_coset_decompose(&reps, &hset, g);
                assert_eq!(s3.mul(reps[i], hh), g);
            }
        }
    }

    #[test]
    fn generators_generate() {
        for g in [
            FiniteGroup::cyclic(8),
            FiniteGroup::symmetric3(),
            FiniteGroup::quaternion8(),
            FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(4)),
        ] {
            let gens = g.generators().to_vec();
            let closed = if gens.is_empty() {
                vec![0]
            } else {
                let mut c = vec![0];
                for &x in &gens {
                    c = g.close(&c, x);
                }
                c
            };
            assert_eq!(closed.len(), g.order());
        }
    }

    #[test]
    fn rejects_non_groups() {
        // 2x2 table with no identity
        assert!(FiniteGroup::from_table(vec![vec![1, 1], vec![1, 1]]).is_err());
        // non-associative magma with identity: modify a 3-element table
        let bad = vec![vec![0, 1, 2], vec![1, 2, 2], vec![2, 2, 1]];
        assert!(FiniteGroup::from_table(bad).is_err());
    }
}
