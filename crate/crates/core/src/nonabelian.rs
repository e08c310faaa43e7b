//! Nonabelian H¹ with coefficients in B_d, U_d or GL_d over Z/p, Z/p² or
//! W_2(F_q): exhaustive cocycle enumeration, twisted-conjugation classes, the
//! reduction map between levels, and fiber search for lifts of a fixed
//! mod-p cocycle.

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::matrix::Mat;
use crate::ring::Ring;
use crate::semilinear::{LevelPair, RingAction};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixShape {
    Borel,
    Unipotent,
    GeneralLinear,
}

#[derive(Clone, Debug)]
pub struct NonabelianContext {
    pub group: FiniteGroup,
    pub ring: Ring,
    pub action: RingAction,
    pub d: usize,
    pub shape: MatrixShape,
}

impl NonabelianContext {
    pub fn new(
        group: &FiniteGroup,
        ring: &Ring,
        action: &RingAction,
        d: usize,
        shape: MatrixShape,
    ) -> NonabelianContext {
        NonabelianContext {
            group: group.clone(),
            ring: ring.clone(),
            action: action.clone(),
            d,
            shape,
        }
    }

    fn entry_positions(&self) -> Vec<(usize, usize, bool)> {
        // (i, j, is_diagonal) of free entries
        let mut out = Vec::new();
        for i in 0..self.d {
            for j in 0..self.d {
                match self.shape {
                    MatrixShape::Borel => {
                        if i < j {
                            out.push((i, j, false));
                        } else if i == j {
                            out.push((i, j, true));
                        }
                    }
                    MatrixShape::Unipotent => {
                        if i < j {
                            out.push((i, j, false));
                        }
                    }
                    MatrixShape::GeneralLinear => out.push((i, j, false)),
                }
            }
        }
        out
    }

    /// All matrices of the shape (unit diagonals for Borel, invertible for GL).
    pub fn shape_elements(&self, budget: u128) -> Result<Vec<Mat>> {
        let ring = &self.ring;
        let positions = self.entry_positions();
        let order = ring.order();
        let count = order.pow(positions.len() as u32);
        if count > budget {
            return Err(Error::budget(format!(
                "shape space of size {count} exceeds budget {budget}"
            )));
        }
        let mut out = Vec::new();
        let mut idx = vec![0u128; positions.len()];
        loop {
            let mut m = Mat::identity(ring, self.d);
            let mut ok = true;
            for (k, &(i, j, diag)) in positions.iter().enumerate() {
                let e = ring.elem_from_index(idx[k]);
                if diag && !ring.is_unit(&e) {
                    ok = false;
                    break;
                }
                m[(i, j)] = e;
            }
            if ok {
                if self.shape == MatrixShape::GeneralLinear {
                    if invertible(ring, &m) {
                        out.push(m);
                    }
                } else {
                    out.push(m);
                }
            }
            // increment
            let mut k = 0;
            loop {
                if k == positions.len() {
                    return Ok(out);
                }
                idx[k] += 1;
                if idx[k] < order {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    pub fn matches_shape(&self, m: &Mat) -> bool {
        let ring = &self.ring;
        for i in 0..self.d {
            for j in 0..self.d {
                let e = &m[(i, j)];
                match self.shape {
                    MatrixShape::Borel => {
                        if i > j && !ring.is_zero(e) {
                            return false;
                        }
                        if i == j && !ring.is_unit(e) {
                            return false;
                        }
                    }
                    MatrixShape::Unipotent => {
                        if i > j && !ring.is_zero(e) {
                            return false;
                        }
                        if i == j && *e != ring.one() {
                            return false;
                        }
                    }
                    MatrixShape::GeneralLinear => {}
                }
            }
        }
        if self.shape == MatrixShape::GeneralLinear {
            invertible(ring, m)
        } else {
            true
        }
    }

    /// Close generator values into a full cocycle c(gh) = c(g)·σ_g(c(h));
    /// None when the values are inconsistent.
    pub fn close_cocycle(&self, gen_vals: &[(usize, Mat)]) -> Option<Vec<Mat>> {
        let n = self.group.order();
        let mut vals: Vec<Option<Mat>> = vec![None; n];
        vals[self.group.id()] = Some(Mat::identity(&self.ring, self.d));
        for _round in 0..n {
            let mut progressed = false;
            for a in 0..n {
                let Some(ca) = vals[a].clone() else { continue };
                for (g, cg) in gen_vals {
                    let target = self.group.mul(a, *g);
                    let prod = ca.matmul(&self.action.apply_mat(a, cg));
                    match &vals[target] {
                        None => {
                            vals[target] = Some(prod);
                            progressed = true;
                        }
                        Some(existing) => {
                            if *existing != prod {
                                return None;
                            }
                        }
                    }
                }
            }
            if !progressed {
                break;
            }
        }
        if vals.iter().any(|v| v.is_none()) {
            return None;
        }
        let out: Vec<Mat> = vals.into_iter().map(|v| v.unwrap()).collect();
        // full validation over all pairs
        for a in 0..n {
            for b in 0..n {
                let prod = out[a].matmul(&self.action.apply_mat(a, &out[b]));
                if prod != out[self.group.mul(a, b)] {
                    return None;
                }
            }
        }
        Some(out)
    }

    /// Exhaustively enumerate all cocycles.
    pub fn enumerate_cocycles(&self, budget: u128) -> Result<Vec<Vec<Mat>>> {
        let gens = self.group.generators().to_vec();
        if gens.is_empty() {
            return Ok(vec![vec![Mat::identity(&self.ring, self.d)]]);
        }
        let shape = self.shape_elements(budget)?;
        let total = (shape.len() as u128).pow(gens.len() as u32);
        if total > budget {
            return Err(Error::budget(format!(
                "cocycle space of size {total} exceeds budget {budget}"
            )));
        }
        let mut out = Vec::new();
        let mut idx = vec![0usize; gens.len()];
        loop {
            let gen_vals: Vec<(usize, Mat)> = gens
                .iter()
                .zip(idx.iter())
                .map(|(&g, &i)| (g, shape[i].clone()))
                .collect();
            if let Some(c) = self.close_cocycle(&gen_vals) {
                if c.iter().all(|m| self.matches_shape(m)) {
                    out.push(c);
                }
            }
            let mut k = 0;
            loop {
                if k == gens.len() {
                    return Ok(out);
                }
                idx[k] += 1;
                if idx[k] < shape.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    /// Twisted-conjugation orbit representatives: c ~ c' iff
    /// c'(g) = b^{-1}·c(g)·σ_g(b) for some b of the shape.
    pub fn classes(&self, budget: u128) -> Result<Vec<Vec<Mat>>> {
        let cocycles = self.enumerate_cocycles(budget)?;
        let twists = self.shape_elements(budget)?;
        let key = |c: &Vec<Mat>| format!("{c:?}");
        let mut seen = std::collections::HashSet::new();
        let mut reps = Vec::new();
        for c in &cocycles {
            if seen.contains(&key(c)) {
                continue;
            }
            reps.push(c.clone());
            for b in &twists {
                let Some(binv) = invert(&self.ring, b) else { continue };
                let twisted: Vec<Mat> = self
                    .group
                    .elements()
                    .map(|g| binv.matmul(&c[g]).matmul(&self.action.apply_mat(g, b)))
                    .collect();
                seen.insert(key(&twisted));
            }
        }
        Ok(reps)
    }

    /// Entrywise reduction of a cocycle over the level pair.
    pub fn reduce_cocycle(&self, pair: &LevelPair, c: &[Mat]) -> Vec<Mat> {
        c.iter().map(|m| pair.reduce_mat(m)).collect()
    }

    /// Search the reduction fiber over a fixed low cocycle for a high cocycle:
    /// per-generator enumeration of p-corrections with closure early-abort.
    pub fn lift_fiber_search(
        &self,
        pair: &LevelPair,
        low: &[Mat],
        budget: u128,
    ) -> Result<Option<Vec<Mat>>> {
        assert_eq!(self.ring, pair.high);
        let gens = self.group.generators().to_vec();
        if gens.is_empty() {
            return Ok(Some(vec![Mat::identity(&self.ring, self.d)]));
        }
        // fiber entries per generator: free strictly-upper + (Borel: free
        // diagonal corrections; Unipotent: none; GL: all entries)
        let positions: Vec<(usize, usize)> = self
            .entry_positions()
            .iter()
            .filter(|&&(i, j, _diag)| match self.shape {
                MatrixShape::Unipotent => i < j,
                _ => {
                    let _ = (i, j);
                    true
                }
            })
            .map(|&(i, j, _)| (i, j))
            .collect();
        let low_order = pair.low.order();
        let fiber_size = low_order.pow(positions.len() as u32);
        let total = fiber_size.pow(gens.len() as u32);
        if total > budget {
            return Err(Error::budget(format!(
                "fiber search of size {total} exceeds budget {budget}"
            )));
        }
        let base_lifts: Vec<Mat> = gens.iter().map(|&g| pair.lift_mat(&low[g])).collect();
        let mut idx = vec![0u128; gens.len()];
        loop {
            let gen_vals: Vec<(usize, Mat)> = gens
                .iter()
                .enumerate()
                .map(|(k, &g)| {
                    let mut m = base_lifts[k].clone();
                    let mut rest = idx[k];
                    for &(i, j) in &positions {
                        let e = pair.low.elem_from_index(rest % low_order);
                        rest /= low_order;
                        m[(i, j)] = self.ring.add(&m[(i, j)], &pair.v_embed(&e));
                    }
                    (g, m)
                })
                .collect();
            if gen_vals.iter().all(|(_, m)| self.matches_shape(m)) {
                if let Some(c) = self.close_cocycle(&gen_vals) {
                    if c.iter().all(|m| self.matches_shape(m))
                        && self.reduce_cocycle(pair, &c) == low.to_vec()
                    {
                        return Ok(Some(c));
                    }
                }
            }
            let mut k = 0;
            loop {
                if k == gens.len() {
                    return Ok(None);
                }
                idx[k] += 1;
                if idx[k] < fiber_size {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

fn invertible(ring: &Ring, m: &Mat) -> bool {
    invert(ring, m).is_some()
}

fn invert(ring: &Ring, m: &Mat) -> Option<Mat> {
    let n = m.rows;
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![ring.zero(); n];
        e[j] = ring.one();
        match crate::matrix::solve(m, &e) {
            Ok(Some(x)) => cols.push(x),
            _ => return None,
        }
    }
    let inv = Mat::from_cols(ring, cols);
    if m.matmul(&inv) == Mat::identity(ring, n) && inv.matmul(m) == Mat::identity(ring, n) {
        Some(inv)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl1_classes_over_f3() {
        // H^1(Z/2, GL_1(F_3)) = Hom(Z/2, {±1}) → 2 classes
        let g = FiniteGroup::cyclic(2);
        let ring = Ring::zmod(3);
        let act = RingAction::trivial(&g, &ring);
        let ctx = NonabelianContext::new(&g, &ring, &act, 1, MatrixShape::GeneralLinear);
        let classes = ctx.classes(1 << 20).unwrap();
        assert_eq!(classes.len(), 2);
    }

    #[test]
    fn u2_classes_count_is_p() {
        for p in [2u64, 3] {
            let g = FiniteGroup::cyclic(p as usize);
            let ring = Ring::zmod(p);
            let act = RingAction::trivial(&g, &ring);
            let ctx = NonabelianContext::new(&g, &ring, &act, 2, MatrixShape::Unipotent);
            let classes = ctx.classes(1 << 20).unwrap();
            assert_eq!(classes.len(), p as usize);
        }
    }

    #[test]
    fn trivial_group_single_class() {
        let g = FiniteGroup::trivial();
        let ring = Ring::zmod(4);
        let act = RingAction::trivial(&g, &ring);
        let ctx = NonabelianContext::new(&g, &ring, &act, 3, MatrixShape::Borel);
        assert_eq!(ctx.classes(1 << 20).unwrap().len(), 1);
    }

    #[test]
    fn reduction_commutes_with_abelianization_d1() {
        // GL_1 classes are Hom(G, R^×); reduction on classes matches the
        // reduction of characters
        let pair = LevelPair::zmod_p2(3);
        let g = FiniteGroup::cyclic(2);
        let act_hi = RingAction::trivial(&g, &pair.high);
        let act_lo = RingAction::trivial(&g, &pair.low);
        let hi = NonabelianContext::new(&g, &pair.high, &act_hi, 1, MatrixShape::GeneralLinear);
        let lo = NonabelianContext::new(&g, &pair.low, &act_lo, 1, MatrixShape::GeneralLinear);
        let hi_classes = hi.classes(1 << 20).unwrap();
        let lo_classes = lo.classes(1 << 20).unwrap();
        // every high class reduces to a low class; the map is surjective here
        let mut reduced = std::collections::HashSet::new();
        for c in &hi_classes {
            let r = hi.reduce_cocycle(&pair, c);
            let found = lo_classes.iter().position(|lc| {
                // compare up to twisted conjugation (abelian rank 1: equality)
                lc.iter().zip(r.iter()).all(|(a, b)| a == b)
            });
            assert!(found.is_some());
            reduced.insert(found.unwrap());
        }
        assert_eq!(reduced.len(), lo_classes.len());
    }

    #[test]
    fn fiber_search_finds_liftable_and_rejects_not() {
        // U_2 over Z/p: c(g) = [[1, g],[0,1]] lifts (any shear lifts);
        // over Z/4 the order-2 condition forces the lift entries to satisfy
        // 2x = 2·(entry): the identity-character shear lifts iff 2 | lift of 1
        let pair = LevelPair::zmod_p2(2);
        let g = FiniteGroup::cyclic(2);
        let act = RingAction::trivial(&g, &pair.high);
        let ctx = NonabelianContext::new(&g, &pair.high, &act, 2, MatrixShape::Unipotent);
        let low = vec![
            Mat::identity(&pair.low, 2),
            Mat::from_int_rows(&pair.low, &[vec![1, 1], vec![0, 1]]),
        ];
        // [[1,x],[0,1]] has order 4 over Z/4 unless 2x ≡ 0, i.e. x ∈ {0, 2};
        // lifts of 1 are {1, 3}: no lift exists
        let found = ctx.lift_fiber_search(&pair, &low, 1 << 20).unwrap();
        assert!(found.is_none());
        // the zero cocycle lifts
        let low0 = vec![Mat::identity(&pair.low, 2); 2];
        assert!(ctx.lift_fiber_search(&pair, &low0, 1 << 20).unwrap().is_some());
        // GL_2 lift of the shear exists: [[1,1],[0,3]] squares to I over Z/4
        let ctx_gl = NonabelianContext::new(&g, &pair.high, &act, 2, MatrixShape::GeneralLinear);
        let found_gl = ctx_gl.lift_fiber_search(&pair, &low, 1 << 22).unwrap();
        assert!(found_gl.is_some());
    }
}
