//! Independent oracles used to cross-check the main computation paths: the
//! two-term periodic resolution for cyclic groups, and bounded exhaustive
//! searches. These deliberately avoid the bar-resolution code path.

use crate::cohomology::GModule;
use crate::error::{Error, Result};
use crate::matrix::{Mat, Subquotient};
use crate::ring::Ring;

/// Invariant factors of H^n(G, M) for cyclic G via the resolution
/// … → M --N--> M --(t−1)--> M, with N the norm Σ t^k.
pub fn cyclic_resolution_invariants(m: &GModule, degree: usize) -> Result<Vec<u32>> {
    let e = m
        .homocyclic_exp()
        .ok_or_else(|| Error::unsupported("cyclic oracle needs a homocyclic module"))?;
    let n = m.group.order();
    // find a generator
    let gen = m
        .group
        .elements()
        .find(|&g| m.group.element_order(g) == n)
        .ok_or_else(|| Error::unsupported("group is not cyclic"))?;
    let ring = Ring::zmod(m.p.pow(e));
    let rank = m.rank();
    let t = Mat::from_int_rows(
        &ring,
        &(0..rank)
            .map(|i| (0..rank).map(|j| m.act[gen][i][j]).collect())
            .collect::<Vec<_>>(),
    );
    let id = Mat::identity(&ring, rank);
    let t_minus_1 = t.sub(&id);
    let mut norm = Mat::zeros(&ring, rank, rank);
    let mut pw = id.clone();
    for _ in 0..n {
        norm = norm.add(&pw);
        pw = pw.matmul(&t);
    }
    let zero_in = Mat::zeros(&ring, rank, 0);
    let sq = match degree {
        0 => Subquotient::new(&t_minus_1, &zero_in)?,
        d if d % 2 == 1 => Subquotient::new(&norm, &t_minus_1)?,
        _ => Subquotient::new(&t_minus_1, &norm)?,
    };
    Ok(sq.invariants())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::{fp_cohomology_dim, CohomologyGroup};
    use crate::group::FiniteGroup;

    #[test]
    fn cyclic_oracle_matches_bar_resolution_fp() {
        for p in [2u64, 3] {
            for m_ord in 2..=9usize {
                let g = FiniteGroup::cyclic(m_ord);
                let module = GModule::trivial(&g, p, vec![1]);
                for n in 0..=2usize {
                    let oracle = cyclic_resolution_invariants(&module, n).unwrap().len();
                    let bar = fp_cohomology_dim(&module, n, 1 << 22).unwrap();
                    assert_eq!(oracle, bar, "Z/{m_ord}, p = {p}, n = {n}");
                }
            }
        }
    }

    #[test]
    fn cyclic_oracle_matches_bar_resolution_p2() {
        // over Z/p² with a unipotent action of Z/4 on rank 2
        let g = FiniteGroup::cyclic(4);
        let p = 2u64;
        let shear = vec![vec![1u64, 1], vec![0, 1]];
        let mut acts = Vec::new();
        let mut cur = vec![vec![1u64, 0], vec![0, 1]];
        for _ in 0..4 {
            acts.push(cur.clone());
            // cur ← cur·shear mod 4
            let mut next = vec![vec![0u64; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        next[i][j] = (next[i][j] + cur[i][k] * shear[k][j]) % 4;
                    }
                }
            }
            cur = next;
        }
        let module = GModule {
            group: g.clone(),
            p,
            exps: vec![2, 2],
            act: acts,
        };
        module.validate().unwrap();
        for n in 0..=2usize {
            let mut oracle = cyclic_resolution_invariants(&module, n).unwrap();
            let mut bar = CohomologyGroup::compute(&module, n, 1 << 22)
                .unwrap()
                .invariants();
            oracle.sort();
            bar.sort();
            assert_eq!(oracle, bar, "n = {n}");
        }
    }
}
