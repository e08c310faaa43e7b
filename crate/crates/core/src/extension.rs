//! Explicit short exact sequences of semilinear modules with the Yoneda
//! operations: extension classes as 1-cocycles in Hom(quotient, kernel),
//! Baer sum, pushforward and pullback.

use crate::cohomology::{restrict_scalars, restrict_vector, Cochain, CohomologyGroup, GModule};
use crate::error::{Error, Result};
use crate::matrix::{kernel_gens, smith, solve, Mat};
use crate::ring::Ring;
use crate::semilinear::SemilinearModule;

#[derive(Clone, Debug)]
pub struct ExtensionData {
    pub sub: SemilinearModule,
    pub total: SemilinearModule,
    pub quot: SemilinearModule,
    /// total ← sub
    pub incl: Mat,
    /// quot ← total
    pub proj: Mat,
}

impl ExtensionData {
    pub fn new(
        sub: SemilinearModule,
        total: SemilinearModule,
        quot: SemilinearModule,
        incl: Mat,
        proj: Mat,
    ) -> Result<ExtensionData> {
        let e = ExtensionData {
            sub,
            total,
            quot,
            incl,
            proj,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn ring(&self) -> &Ring {
        &self.total.ring
    }

    pub fn validate(&self) -> Result<()> {
        let ring = self.ring();
        if self.total.rank != self.sub.rank + self.quot.rank {
            return Err(Error::structure("ranks do not add up"));
        }
        if self.incl.rows != self.total.rank || self.incl.cols != self.sub.rank {
            return Err(Error::structure("inclusion shape mismatch"));
        }
        if self.proj.rows != self.quot.rank || self.proj.cols != self.total.rank {
            return Err(Error::structure("projection shape mismatch"));
        }
        if !self.proj.matmul(&self.incl).is_zero() {
            return Err(Error::structure("proj ∘ incl ≠ 0"));
        }
        // split injectivity / surjectivity over the chain ring
        let si = smith(&self.incl)?;
        if si.vals.iter().take(self.sub.rank).any(|&v| v != 0) {
            return Err(Error::structure("inclusion is not split injective"));
        }
        let sp = smith(&self.proj)?;
        if sp.vals.iter().take(self.quot.rank).any(|&v| v != 0) {
            return Err(Error::structure("projection is not surjective"));
        }
        // exactness in the middle: kernel generators of proj lie in im(incl)
        for k in kernel_gens(&self.proj)? {
            if solve(&self.incl, &k)?.is_none() {
                return Err(Error::structure("ker(proj) ⊄ im(incl)"));
            }
        }
        // equivariance
        for g in self.total.group.elements() {
            let lhs = self.total.mats[g].matmul(&self.total.action.apply_mat(g, &self.incl));
            let rhs = self.incl.matmul(&self.sub.mats[g]);
            if lhs != rhs {
                return Err(Error::structure("inclusion not equivariant"));
            }
            let lhs = self.quot.mats[g].matmul(&self.quot.action.apply_mat(g, &self.proj));
            let rhs = self.proj.matmul(&self.total.mats[g]);
            if lhs != rhs {
                return Err(Error::structure("projection not equivariant"));
            }
        }
        let _ = ring;
        Ok(())
    }

    pub fn split(sub: &SemilinearModule, quot: &SemilinearModule) -> Result<ExtensionData> {
        let z = vec![Mat::zeros(&sub.ring, sub.rank, quot.rank); sub.group.order()];
        ExtensionData::from_cocycle(sub, quot, &z)
    }

    /// Build the extension with total matrices [[A_g, Z_g], [0, B_g]].
    /// The Z_g must satisfy Z_{gh} = A_g σ_g(Z_h) + Z_g σ_g(B_h), which is
    /// validated by module closure.
    pub fn from_cocycle(
        sub: &SemilinearModule,
        quot: &SemilinearModule,
        z: &[Mat],
    ) -> Result<ExtensionData> {
        if z.len() != sub.group.order() {
            return Err(Error::structure("one cocycle matrix per group element"));
        }
        let ring = &sub.ring;
        let n = sub.rank + quot.rank;
        let mats: Vec<Mat> = sub
            .group
            .elements()
            .map(|g| {
                let mut m = Mat::zeros(ring, n, n);
                for i in 0..sub.rank {
                    for j in 0..sub.rank {
                        m[(i, j)] = sub.mats[g][(i, j)].clone();
                    }
                    for j in 0..quot.rank {
                        m[(i, sub.rank + j)] = z[g][(i, j)].clone();
                    }
                }
                for i in 0..quot.rank {
                    for j in 0..quot.rank {
                        m[(sub.rank + i, sub.rank + j)] = quot.mats[g][(i, j)].clone();
                    }
                }
                m
            })
            .collect();
        let total = SemilinearModule::new(ring, &sub.group, &sub.action, mats)?;
        let mut incl = Mat::zeros(ring, n, sub.rank);
        for i in 0..sub.rank {
            incl[(i, i)] = ring.one();
        }
        let mut proj = Mat::zeros(ring, quot.rank, n);
        for i in 0..quot.rank {
            proj[(i, sub.rank + i)] = ring.one();
        }
        ExtensionData::new(sub.clone(), total, quot.clone(), incl, proj)
    }

    /// The Hom(quot, sub) coefficients of the class, as a GModule.
    pub fn hom_gmodule(&self) -> Result<GModule> {
        restrict_scalars(&self.quot.hom(&self.sub))
    }

    /// A linear (non-equivariant) section of proj.
    pub fn section(&self) -> Result<Mat> {
        let ring = self.ring();
        let mut s = Mat::zeros(ring, self.total.rank, self.quot.rank);
        for j in 0..self.quot.rank {
            let mut e = vec![ring.zero(); self.quot.rank];
            e[j] = ring.one();
            let col = solve(&self.proj, &e)?
                .ok_or_else(|| Error::structure("projection not surjective"))?;
            for i in 0..self.total.rank {
                s[(i, j)] = col[i].clone();
            }
        }
        Ok(s)
    }

    /// A linear retraction r with r ∘ incl = id.
    pub fn retraction(&self) -> Result<Mat> {
        let ring = self.ring();
        let it = self.incl.transpose();
        let mut rt = Mat::zeros(ring, self.total.rank, self.sub.rank);
        for j in 0..self.sub.rank {
            let mut e = vec![ring.zero(); self.sub.rank];
            e[j] = ring.one();
            let col = solve(&it, &e)?
                .ok_or_else(|| Error::structure("inclusion not split"))?;
            for i in 0..self.total.rank {
                rt[(i, j)] = col[i].clone();
            }
        }
        Ok(rt.transpose())
    }

    /// Deviation 1-cocycle of a linear section: θ(g) = r∘((g·s) − s), valued
    /// in the restricted Hom(quot, sub) module. Its class classifies the
    /// extension.
    pub fn class_cocycle(&self) -> Result<Cochain> {
        let s = self.section()?;
        let r = self.retraction()?;
        let group = &self.total.group;
        let hom = self.hom_gmodule()?;
        let mut values = Vec::with_capacity(group.order());
        for g in group.elements() {
            // (g·s) = M^E_g · σ_g(s) · σ_g(M^B_{g^{-1}})
            let gs = self.total.mats[g]
                .matmul(&self.total.action.apply_mat(g, &s))
                .matmul(
                    &self
                        .total
                        .action
                        .apply_mat(g, &self.quot.mats[group.inv(g)]),
                );
            let theta = r.matmul(&gs.sub(&s));
            let vec = SemilinearModule::vectorize_hom(&theta);
            values.push(restrict_vector(self.ring(), &vec)?);
        }
        let c = Cochain { degree: 1, values };
        debug_assert!(crate::cohomology::is_cocycle(&hom, &c));
        Ok(c)
    }

    /// The H¹ group in which this extension's class lives.
    pub fn class_group(&self, budget: usize) -> Result<CohomologyGroup> {
        CohomologyGroup::compute(&self.hom_gmodule()?, 1, budget)
    }

    pub fn is_split(&self, budget: usize) -> Result<bool> {
        let h1 = self.class_group(budget)?;
        h1.is_zero_class(&self.class_cocycle()?)
    }

    pub fn classes_equal(&self, other: &ExtensionData, budget: usize) -> Result<bool> {
        if self.sub != other.sub || self.quot != other.quot {
            return Err(Error::structure("extensions have different ends"));
        }
        let h1 = self.class_group(budget)?;
        h1.classes_equal(&self.class_cocycle()?, &other.class_cocycle()?)
    }

    /// Pushforward along an equivariant map f: sub → new_sub.
    pub fn pushforward(
        &self,
        f: &Mat,
        new_sub: &SemilinearModule,
    ) -> Result<ExtensionData> {
        let ring = self.ring();
        if f.rows != new_sub.rank || f.cols != self.sub.rank {
            return Err(Error::structure("pushforward map shape mismatch"));
        }
        // E' = (new_sub ⊕ total) / graph(−f, incl)
        let big = new_sub.direct_sum(&self.total);
        let mut graph = Mat::zeros(ring, big.rank, self.sub.rank);
        for j in 0..self.sub.rank {
            for i in 0..new_sub.rank {
                graph[(i, j)] = ring.neg(&f[(i, j)]);
            }
            for i in 0..self.total.rank {
                graph[(new_sub.rank + i, j)] = self.incl[(i, j)].clone();
            }
        }
        let (quotient, proj_q, sect_q) = quotient_by_summand(&big, &graph)?;
        // incl': new_sub → E'
        let mut emb = Mat::zeros(ring, big.rank, new_sub.rank);
        for i in 0..new_sub.rank {
            emb[(i, i)] = ring.one();
        }
        let incl2 = proj_q.matmul(&emb);
        // proj': E' → quot via a section of the quotient map
        let mut pr = Mat::zeros(ring, self.quot.rank, big.rank);
        for i in 0..self.quot.rank {
            for j in 0..self.total.rank {
                pr[(i, new_sub.rank + j)] = self.proj[(i, j)].clone();
            }
        }
        let proj2 = pr.matmul(&sect_q);
        ExtensionData::new(new_sub.clone(), quotient, self.quot.clone(), incl2, proj2)
    }

    /// Pullback along an equivariant map g: new_quot → quot.
    pub fn pullback(
        &self,
        gmap: &Mat,
        new_quot: &SemilinearModule,
    ) -> Result<ExtensionData> {
        let ring = self.ring();
        if gmap.rows != self.quot.rank || gmap.cols != new_quot.rank {
            return Err(Error::structure("pullback map shape mismatch"));
        }
        // E'' = ker( (proj, −g): total ⊕ new_quot → quot )
        let big = self.total.direct_sum(new_quot);
        let mut surj = Mat::zeros(ring, self.quot.rank, big.rank);
        for i in 0..self.quot.rank {
            for j in 0..self.total.rank {
                surj[(i, j)] = self.proj[(i, j)].clone();
            }
            for j in 0..new_quot.rank {
                surj[(i, self.total.rank + j)] = ring.neg(&gmap[(i, j)]);
            }
        }
        let (kernel, incl_k) = kernel_submodule(&big, &surj)?;
        // incl'': sub → E'': (incl, 0) factors through the kernel
        let mut cols = Mat::zeros(ring, big.rank, self.sub.rank);
        for i in 0..self.total.rank {
            for j in 0..self.sub.rank {
                cols[(i, j)] = self.incl[(i, j)].clone();
            }
        }
        let mut incl2 = Mat::zeros(ring, kernel.rank, self.sub.rank);
        for j in 0..self.sub.rank {
            let x = solve(&incl_k, &cols.col(j))?
                .ok_or_else(|| Error::structure("inclusion does not factor through kernel"))?;
            for i in 0..kernel.rank {
                incl2[(i, j)] = x[i].clone();
            }
        }
        // proj'': E'' → new_quot
        let mut pr = Mat::zeros(ring, new_quot.rank, big.rank);
        for i in 0..new_quot.rank {
            pr[(i, self.total.rank + i)] = ring.one();
        }
        let proj2 = pr.matmul(&incl_k);
        ExtensionData::new(self.sub.clone(), kernel, new_quot.clone(), incl2, proj2)
    }

    /// Baer sum: ∇_* Δ^* (E₁ ⊕ E₂).
    pub fn baer_sum(&self, other: &ExtensionData) -> Result<ExtensionData> {
        if self.sub != other.sub || self.quot != other.quot {
            return Err(Error::structure("Baer sum needs matching ends"));
        }
        let ring = self.ring();
        // direct sum extension
        let dsub = self.sub.direct_sum(&other.sub);
        let dtot = self.total.direct_sum(&other.total);
        let dquot = self.quot.direct_sum(&other.quot);
        let dincl = pad_block_diag(ring, &self.incl, &other.incl);
        let dproj = pad_block_diag(ring, &self.proj, &other.proj);
        let dsum = ExtensionData::new(dsub.clone(), dtot, dquot.clone(), dincl, dproj)?;
        // Δ: quot → quot ⊕ quot
        let mut delta = Mat::zeros(ring, 2 * self.quot.rank, self.quot.rank);
        for i in 0..self.quot.rank {
            delta[(i, i)] = ring.one();
            delta[(self.quot.rank + i, i)] = ring.one();
        }
        let pulled = dsum.pullback(&delta, &self.quot)?;
        // ∇: sub ⊕ sub → sub
        let mut nabla = Mat::zeros(ring, self.sub.rank, 2 * self.sub.rank);
        for i in 0..self.sub.rank {
            nabla[(i, i)] = ring.one();
            nabla[(i, self.sub.rank + i)] = ring.one();
        }
        pulled.pushforward(&nabla, &self.sub)
    }
}

fn pad_block_diag(ring: &Ring, a: &Mat, b: &Mat) -> Mat {
    let _ = ring;
    a.direct_sum(b)
}

/// Quotient of a module by the span of split-injective columns; returns the
/// quotient module with projection and section matrices.
pub fn quotient_by_summand(
    module: &SemilinearModule,
    cols: &Mat,
) -> Result<(SemilinearModule, Mat, Mat)> {
    let ring = &module.ring;
    let k = cols.cols;
    let n = module.rank;
    let s = smith(cols)?;
    if s.vals.iter().take(k).any(|&v| v != 0) {
        return Err(Error::structure("columns do not span a free direct summand"));
    }
    // im(cols) = U·(first k coordinates); quotient = last n−k coordinates of U^{-1}
    let proj = s.uinv.submatrix(k..n, 0..n);
    let sect = s.u.submatrix(0..n, k..n);
    // quotient action (validated): Mq_g = proj · M_g · σ_g(sect)
    let mats: Vec<Mat> = module
        .group
        .elements()
        .map(|g| {
            proj.matmul(&module.mats[g])
                .matmul(&module.action.apply_mat(g, &sect))
        })
        .collect();
    // stability check: M_g · σ_g(cols) must land in im(cols)
    for g in module.group.elements() {
        let image = proj
            .matmul(&module.mats[g])
            .matmul(&module.action.apply_mat(g, cols));
        if !image.is_zero() {
            return Err(Error::structure("summand is not G-stable"));
        }
    }
    let quotient = SemilinearModule::new(ring, &module.group, &module.action, mats)?;
    Ok((quotient, proj, sect))
}

/// Kernel of a split-surjective equivariant map as a module with inclusion.
pub fn kernel_submodule(
    module: &SemilinearModule,
    surj: &Mat,
) -> Result<(SemilinearModule, Mat)> {
    let ring = &module.ring;
    let s = smith(surj)?;
    if s.vals.iter().take(surj.rows).any(|&v| v != 0) {
        return Err(Error::structure("map is not split surjective"));
    }
    let gens = kernel_gens(surj)?;
    let k = gens.len();
    if k != module.rank - surj.rows {
        return Err(Error::structure("kernel is not free of the expected rank"));
    }
    let incl = Mat::from_cols(ring, gens);
    // restricted action: K·X_g = M_g · σ_g(K)
    let mats: Result<Vec<Mat>> = module
        .group
        .elements()
        .map(|g| {
            let target = module.mats[g].matmul(&module.action.apply_mat(g, &incl));
            let mut x = Mat::zeros(ring, k, k);
            for j in 0..k {
                let col = solve(&incl, &target.col(j))?
                    .ok_or_else(|| Error::structure("kernel is not G-stable"))?;
                for i in 0..k {
                    x[(i, j)] = col[i].clone();
                }
            }
            Ok(x)
        })
        .collect();
    let kernel = SemilinearModule::new(ring, &module.group, &module.action, mats?)?;
    Ok((kernel, incl))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const BUDGET: usize = 1 << 22;

    fn random_cocycle_ext(
        ring: &Ring,
        g: &FiniteGroup,
        sub_rank: usize,
        quot_rank: usize,
        rng: &mut ChaCha8Rng,
    ) -> ExtensionData {
        let sub = SemilinearModule::trivial_module(ring, g, sub_rank);
        let quot = SemilinearModule::trivial_module(ring, g, quot_rank);
        // a cocycle for trivial modules is an additive map G → Hom(quot, sub)
        loop {
            let gens: Vec<(usize, Mat)> = g
                .generators()
                .iter()
                .map(|&x| {
                    let mut m = Mat::zeros(ring, sub_rank, quot_rank);
                    for i in 0..sub_rank {
                        for j in 0..quot_rank {
                            m[(i, j)] = ring.random(rng);
                        }
                    }
                    (x, m)
                })
                .collect();
            // close over the group: z(gh) = z(g) + z(h) for trivial actions
            let mut z: Vec<Option<Mat>> = vec![None; g.order()];
            z[g.id()] = Some(Mat::zeros(ring, sub_rank, quot_rank));
            for _ in 0..g.order() {
                for a in g.elements() {
                    let Some(za) = z[a].clone() else { continue };
                    for (x, zx) in &gens {
                        let target = g.mul(a, *x);
                        let val = za.add(zx);
                        if z[target].is_none() {
                            z[target] = Some(val);
                        }
                    }
                }
            }
            if z.iter().all(|m| m.is_some()) {
                let z: Vec<Mat> = z.into_iter().map(|m| m.unwrap()).collect();
                if let Ok(e) = ExtensionData::from_cocycle(&sub, &quot, &z) {
                    return e;
                }
            }
        }
    }

    #[test]
    fn split_plus_e_equals_e() {
        let ring = Ring::zmod(4);
        let g = FiniteGroup::cyclic(2);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let e = random_cocycle_ext(&ring, &g, 1, 1, &mut rng);
        let split = ExtensionData::split(&e.sub, &e.quot).unwrap();
        let sum = e.baer_sum(&split).unwrap();
        assert!(sum.classes_equal(&e, BUDGET).unwrap());
        assert!(split.is_split(BUDGET).unwrap());
    }

    #[test]
    fn baer_sum_adds_classes() {
        let ring = Ring::zmod(3);
        let g = FiniteGroup::cyclic(3);
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let e1 = random_cocycle_ext(&ring, &g, 1, 1, &mut rng);
        let e2 = random_cocycle_ext(&ring, &g, 1, 1, &mut rng);
        let sum = e1.baer_sum(&e2).unwrap();
        let h1 = e1.class_group(BUDGET).unwrap();
        let c1 = h1.class_coords(&e1.class_cocycle().unwrap()).unwrap();
        let c2 = h1.class_coords(&e2.class_cocycle().unwrap()).unwrap();
        let cs = h1.class_coords(&sum.class_cocycle().unwrap()).unwrap();
        let expect: Vec<u64> = c1
            .iter()
            .zip(c2.iter())
            .zip(h1.invariants().iter())
            .map(|((&a, &b), &w)| (a + b) % 3u64.pow(w))
            .collect();
        assert_eq!(cs, expect);
    }

    #[test]
    fn pushforward_pullback_commute_and_identity() {
        let ring = Ring::zmod(2);
        let g = FiniteGroup::cyclic(2);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..5 {
            let e = random_cocycle_ext(&ring, &g, 2, 2, &mut rng);
            // identity pushforward preserves the class
            let idm = Mat::identity(&ring, 2);
            let pushed = e.pushforward(&idm, &e.sub).unwrap();
            assert!(pushed.classes_equal(&e, BUDGET).unwrap());
            // random equivariant maps on trivial modules: any matrices
            let mut f = Mat::zeros(&ring, 2, 2);
            let mut gm = Mat::zeros(&ring, 2, 2);
            for i in 0..2 {
                for j in 0..2 {
                    f[(i, j)] = ring.from_u64(rng.gen_range(0..2));
                    gm[(i, j)] = ring.from_u64(rng.gen_range(0..2));
                }
            }
            let fg = e.pullback(&gm, &e.quot).unwrap().pushforward(&f, &e.sub).unwrap();
            let gf = e.pushforward(&f, &e.sub).unwrap().pullback(&gm, &e.quot).unwrap();
            assert!(fg.classes_equal(&gf, BUDGET).unwrap());
        }
    }

    #[test]
    fn class_cocycle_matches_construction() {
        // from_cocycle followed by class_cocycle must land in the same class
        let ring = Ring::zmod(9);
        let g = FiniteGroup::cyclic(3);
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let e = random_cocycle_ext(&ring, &g, 1, 2, &mut rng);
        let hom = e.hom_gmodule().unwrap();
        let h1 = CohomologyGroup::compute(&hom, 1, BUDGET).unwrap();
        // the construction cocycle: z(g) read from the total matrices
        let mut zvals = Vec::new();
        for x in g.elements() {
            let mut theta = Mat::zeros(&ring, e.sub.rank, e.quot.rank);
            for i in 0..e.sub.rank {
                for j in 0..e.quot.rank {
                    theta[(i, j)] = e.total.mats[x][(i, e.sub.rank + j)].clone();
                }
            }
            // z(g) as a Hom-valued cochain needs right-composition with B_g^{-1}
            let theta = theta.matmul(&e.quot.mats[g.inv(x)]);
            zvals.push(
                restrict_vector(&ring, &SemilinearModule::vectorize_hom(&theta)).unwrap(),
            );
        }
        let zc = Cochain {
            degree: 1,
            values: zvals,
        };
        let dev = e.class_cocycle().unwrap();
        assert!(h1.classes_equal(&zc, &dev).unwrap());
    }

    #[test]
    fn nontrivial_extension_detected() {
        // Z/p² as extension of Z/p by Z/p over the trivial group is split as
        // modules... use G = Z/p acting trivially: the extension of trivial
        // modules with cocycle z(g) = g is non-split (it is the Bockstein rep)
        let p = 3u64;
        let ring = Ring::zmod(p);
        let g = FiniteGroup::cyclic(p as usize);
        let sub = SemilinearModule::trivial_module(&ring, &g, 1);
        let quot = SemilinearModule::trivial_module(&ring, &g, 1);
        let z: Vec<Mat> = g
            .elements()
            .map(|x| {
                let mut m = Mat::zeros(&ring, 1, 1);
                m[(0, 0)] = ring.from_u64(x as u64);
                m
            })
            .collect();
        let e = ExtensionData::from_cocycle(&sub, &quot, &z).unwrap();
        assert!(!e.is_split(BUDGET).unwrap());
    }
}
