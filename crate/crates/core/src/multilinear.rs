//! Multilinear algebra of finite free modules: symmetric and divided powers,
//! Frobenius twists, the Frobenius/Verschiebung natural arrows, the perfect
//! pairing Γ^b × S^b → Det^b on rank-2 modules, and the base-p digit map
//! Γ^b(V) → ⊗ Γ^{a_i}(V^{(i)}).
//!
//! Monomial bases are ordered lexicographically by exponent sequence so that
//! every matrix here is deterministic.

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::ring::{Elem, Ring};
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeModule {
    pub ring: Ring,
    pub rank: usize,
    pub labels: Vec<String>,
}

impl FreeModule {
    pub fn new(ring: &Ring, rank: usize) -> FreeModule {
        FreeModule {
            ring: ring.clone(),
            rank,
            labels: (0..rank).map(|i| format!("e{}", i + 1)).collect(),
        }
    }

    pub fn with_labels(ring: &Ring, labels: Vec<String>) -> FreeModule {
        FreeModule {
            ring: ring.clone(),
            rank: labels.len(),
            labels,
        }
    }

    pub fn dual(&self) -> FreeModule {
        FreeModule {
            ring: self.ring.clone(),
            rank: self.rank,
            labels: self.labels.iter().map(|l| format!("{l}*")).collect(),
        }
    }

    /// Frobenius twist: same rank, marked labels.
    pub fn twist(&self, m: u32) -> FreeModule {
        FreeModule {
            ring: self.ring.clone(),
            rank: self.rank,
            labels: self
                .labels
                .iter()
                .map(|l| format!("{l}({m})"))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    pub domain: FreeModule,
    pub codomain: FreeModule,
    pub mat: Mat,
}

impl LinearMap {
    pub fn new(domain: FreeModule, codomain: FreeModule, mat: Mat) -> LinearMap {
        assert_eq!(mat.rows, codomain.rank);
        assert_eq!(mat.cols, domain.rank);
        LinearMap {
            domain,
            codomain,
            mat,
        }
    }

    pub fn compose(&self, inner: &LinearMap) -> LinearMap {
        assert_eq!(inner.codomain.rank, self.domain.rank);
        LinearMap::new(
            inner.domain.clone(),
            self.codomain.clone(),
            self.mat.matmul(&inner.mat),
        )
    }

    /// Entrywise Frobenius: the matrix of f^{(m)} between the twists.
    pub fn twist(&self, m: u32) -> Result<LinearMap> {
        let ring = self.mat.ring.clone();
        let mut mat = self.mat.clone();
        for _ in 0..m {
            mat = mat.map(|e| ring.frobenius(e).expect("twist needs characteristic p"));
        }
        Ok(LinearMap::new(
            self.domain.twist(m),
            self.codomain.twist(m),
            mat,
        ))
    }
}

/// Degree-a exponent vectors over d slots, in lexicographic order.
pub fn monomials(d: usize, a: u32) -> Vec<Vec<u32>> {
    fn rec(d: usize, a: u32, out: &mut Vec<Vec<u32>>, prefix: &mut Vec<u32>) {
        if d == 1 {
            prefix.push(a);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=a {
            prefix.push(first);
            rec(d - 1, a - first, out, prefix);
            prefix.pop();
        }
    }
    if d == 0 {
        return if a == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    rec(d, a, &mut out, &mut Vec::new());
    out
}

pub fn binomial_u(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut num: u128 = 1;
    for i in 0..k {
        num = num * (n - i) as u128 / (i + 1) as u128;
    }
    num as u64
}

pub fn sym_rank(d: usize, a: u32) -> usize {
    binomial_u(a as u64 + d as u64 - 1, d as u64 - 1) as usize
}

/// ⊗_i S^{a_i}(V^{(r_i)}), pure when a single factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricFunctor {
    pub factors: Vec<(u32, u32)>, // (exponent a_i, twist depth r_i)
}

impl SymmetricFunctor {
    pub fn new(factors: Vec<(u32, u32)>) -> Result<SymmetricFunctor> {
        for &(a, r) in &factors {
            if a == 0 && r == 0 {
                return Err(Error::structure("symmetric functor factor with a·p^r = 0"));
            }
        }
        Ok(SymmetricFunctor { factors })
    }

    pub fn pure(a: u32, r: u32) -> SymmetricFunctor {
        SymmetricFunctor {
            factors: vec![(a, r)],
        }
    }

    pub fn is_pure(&self) -> bool {
        self.factors.len() == 1
    }

    pub fn degree(&self, p: u64) -> u64 {
        self.factors
            .iter()
            .map(|&(a, r)| a as u64 * p.pow(r))
            .sum()
    }

    /// Rank of the functor applied to a rank-d module.
    pub fn rank_on(&self, d: usize) -> usize {
        self.factors.iter().map(|&(a, _)| sym_rank(d, a)).product()
    }
}

/// ⊗_i S^{a_i}(V^{(r_i)}) with the canonical (lex-product) monomial basis.
pub fn apply_functor(phi: &SymmetricFunctor, v: &FreeModule) -> Result<FreeModule> {
    if phi.factors.iter().any(|&(_, r)| r > 0) && !v.ring.has_char_p() {
        return Err(Error::unsupported(
            "Frobenius twists need a base of characteristic p",
        ));
    }
    let mut labels = vec![String::new()];
    for &(a, r) in &phi.factors {
        let mons = monomials(v.rank, a);
        let mut next = Vec::with_capacity(labels.len() * mons.len());
        for l in &labels {
            for m in &mons {
                let part: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        let base = if r > 0 {
                            format!("{}({r})", v.labels[i])
                        } else {
                            v.labels[i].clone()
                        };
                        if e > 1 {
                            format!("{base}^{e}")
                        } else {
                            base
                        }
                    })
                    .collect();
                let piece = if part.is_empty() {
                    "1".to_string()
                } else {
                    part.join("·")
                };
                next.push(if l.is_empty() {
                    piece
                } else {
                    format!("{l}⊗{piece}")
                });
            }
        }
        labels = next;
    }
    Ok(FreeModule::with_labels(&v.ring, labels))
}

/// Polynomial with monomial-exponent keys, used to expand symmetric powers.
type Poly = HashMap<Vec<u32>, Elem>;

fn poly_mul_linear(ring: &Ring, poly: &Poly, linear: &[Elem]) -> Poly {
    let mut out: Poly = HashMap::new();
    for (m, c) in poly {
        for (i, ci) in linear.iter().enumerate() {
            if ring.is_zero(ci) {
                continue;
            }
            let mut m2 = m.clone();
            m2[i] += 1;
            let term = ring.mul(c, ci);
            let entry = out.entry(m2).or_insert_with(|| ring.zero());
            *entry = ring.add(entry, &term);
        }
    }
    out
}

/// Matrix of S^a(f) on lexicographic monomial bases.
pub fn sym_power_map(f: &LinearMap, a: u32) -> LinearMap {
    let ring = f.mat.ring.clone();
    let d_dom = f.domain.rank;
    let d_cod = f.codomain.rank;
    let dom_mons = monomials(d_dom, a);
    let cod_mons = monomials(d_cod, a);
    let cod_index: HashMap<&Vec<u32>, usize> =
        cod_mons.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut mat = Mat::zeros(&ring, cod_mons.len(), dom_mons.len());
    for (j, alpha) in dom_mons.iter().enumerate() {
        // expand ∏_i (f e_i)^{alpha_i}
        let mut poly: Poly = HashMap::new();
        poly.insert(vec![0; d_cod], ring.one());
        for (i, &e) in alpha.iter().enumerate() {
            let col = f.mat.col(i);
            for _ in 0..e {
                poly = poly_mul_linear(&ring, &poly, &col);
            }
        }
        for (m, c) in poly {
            mat[(cod_index[&m], j)] = c;
        }
    }
    LinearMap::new(
        apply_functor(&SymmetricFunctor::pure(a, 0), &f.domain).unwrap(),
        apply_functor(&SymmetricFunctor::pure(a, 0), &f.codomain).unwrap(),
        mat,
    )
}

/// Matrix of Γ^a(f) = S^a(f^∨)^∨ on divided-power bases (dual to monomials).
pub fn divided_power_map(f: &LinearMap, a: u32) -> LinearMap {
    let dual = LinearMap::new(
        f.codomain.dual(),
        f.domain.dual(),
        f.mat.transpose(),
    );
    let s = sym_power_map(&dual, a);
    LinearMap::new(
        gamma_module(&f.domain, a),
        gamma_module(&f.codomain, a),
        s.mat.transpose(),
    )
}

pub fn gamma_module(v: &FreeModule, a: u32) -> FreeModule {
    let mons = monomials(v.rank, a);
    FreeModule::with_labels(
        &v.ring,
        mons.iter()
            .map(|m| {
                let parts: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| format!("{}[{e}]", v.labels[i]))
                    .collect();
                if parts.is_empty() {
                    "[1]".into()
                } else {
                    parts.join("·")
                }
            })
            .collect(),
    )
}

/// Frobenius arrow V^{(1)} → S^p(V), v⊗1 ↦ v^p. Injective; bijective iff
/// rank V = 1.
pub fn frobenius_arrow(v: &FreeModule) -> Result<LinearMap> {
    if !v.ring.has_char_p() {
        return Err(Error::unsupported("frobenius arrow needs characteristic p"));
    }
    let p = v.ring.prime().unwrap() as u32;
    let cod_mons = monomials(v.rank, p);
    let mut mat = Mat::zeros(&v.ring, cod_mons.len(), v.rank);
    for j in 0..v.rank {
        let target: Vec<u32> = (0..v.rank).map(|i| if i == j { p } else { 0 }).collect();
        let row = cod_mons.iter().position(|m| *m == target).unwrap();
        mat[(row, j)] = v.ring.one();
    }
    Ok(LinearMap::new(
        v.twist(1),
        apply_functor(&SymmetricFunctor::pure(p, 0), v)?,
        mat,
    ))
}

/// Verschiebung arrow Γ^p(V) → V^{(1)}, [v]_p ↦ v⊗1: the dual of the
/// Frobenius arrow of V^∨ under Γ^n = S^n(·^∨)^∨.
pub fn verschiebung_arrow(v: &FreeModule) -> Result<LinearMap> {
    let frob_dual = frobenius_arrow(&v.dual())?;
    let p = v.ring.prime().unwrap() as u32;
    Ok(LinearMap::new(
        gamma_module(v, p),
        v.twist(1),
        frob_dual.mat.transpose(),
    ))
}

/// Gram matrix of the pairing Γ^b(V) × S^b(V) → Det^b(V) on a rank-2 module:
/// <[v]_b, w_1…w_b> = (v∧w_1)…(v∧w_b). Rows are divided monomials, columns
/// plain monomials; values are the coefficients on (e1∧e2)^b.
///
/// Entries are derived by expanding the defining identity with v = x·e1 + y·e2
/// formally over ℤ[x, y].
pub fn gamma_sym_pairing(b: u32, v: &FreeModule) -> Result<Mat> {
    if v.rank != 2 {
        return Err(Error::unsupported("pairing needs a rank-2 module"));
    }
    let ring = &v.ring;
    let mons = monomials(2, b); // shared index set for α and β
    let mut gram = Mat::zeros(ring, mons.len(), mons.len());
    for (j, beta) in mons.iter().enumerate() {
        // ∏ (v ∧ w_i): w-factors are e1 (β1 times) and e2 (β2 times);
        // v∧e1 = -y·δ, v∧e2 = x·δ. Expand as bivariate polynomial in (x, y).
        // coefficient map: (i, k) exponents of x^i y^k
        let mut poly: HashMap<(u32, u32), Elem> = HashMap::new();
        poly.insert((0, 0), ring.one());
        for _ in 0..beta[0] {
            // multiply by (-y)
            let mut next = HashMap::new();
            for ((i, k), c) in &poly {
                next.insert((*i, k + 1), ring.neg(c));
            }
            poly = next;
        }
        for _ in 0..beta[1] {
            // multiply by x
            let mut next = HashMap::new();
            for ((i, k), c) in &poly {
                next.insert((i + 1, *k), c.clone());
            }
            poly = next;
        }
        for (i, alpha) in mons.iter().enumerate() {
            if let Some(c) = poly.get(&(alpha[0], alpha[1])) {
                gram[(i, j)] = c.clone();
            }
        }
    }
    Ok(gram)
}

/// θ: Γ^b(V) → ⊗_{i=0}^{s} Γ^{a_i}(V^{(i)}), [v]_b ↦ [v]_{a_0} ⊗ [v^{(1)}]_{a_1} ⊗ …
/// where b = Σ a_i p^i is the base-p expansion. Surjective; bijective iff
/// b+1 = ∏ (a_i + 1), i.e. iff b = p^s − 1.
pub fn theta_map(b: u32, p: u64, v: &FreeModule) -> Result<LinearMap> {
    if v.rank != 2 {
        return Err(Error::unsupported("theta map implemented for rank-2 modules"));
    }
    let mut digits = Vec::new();
    let mut n = b as u64;
    if n == 0 {
        digits.push(0u32);
    }
    while n > 0 {
        digits.push((n % p) as u32);
        n /= p;
    }
    let dom_mons = monomials(2, b);
    // target basis: tuples of divided monomials per digit
    let per_digit: Vec<Vec<Vec<u32>>> = digits.iter().map(|&a| monomials(2, a)).collect();
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for layer in &per_digit {
        let mut next = Vec::with_capacity(tuples.len() * layer.len());
        for t in &tuples {
            for i in 0..layer.len() {
                let mut t2 = t.clone();
                t2.push(i);
                next.push(t2);
            }
        }
        tuples = next;
    }
    let ring = &v.ring;
    let mut mat = Mat::zeros(ring, tuples.len(), dom_mons.len());
    for (row, t) in tuples.iter().enumerate() {
        // Σ_i p^i γ^i componentwise
        let mut total = vec![0u64; 2];
        for (i, &ti) in t.iter().enumerate() {
            let gamma = &per_digit[i][ti];
            let w = p.pow(i as u32);
            total[0] += gamma[0] as u64 * w;
            total[1] += gamma[1] as u64 * w;
        }
        if let Some(col) = dom_mons
            .iter()
            .position(|m| m[0] as u64 == total[0] && m[1] as u64 == total[1])
        {
            mat[(row, col)] = ring.one();
        }
    }
    let dom = gamma_module(v, b);
    let cod_labels: Vec<String> = tuples
        .iter()
        .map(|t| {
            t.iter()
                .enumerate()
                .map(|(i, &ti)| format!("γ{i}:{:?}", per_digit[i][ti]))
                .collect::<Vec<_>>()
                .join("⊗")
        })
        .collect();
    Ok(LinearMap::new(
        dom,
        FreeModule::with_labels(ring, cod_labels),
        mat,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::rank;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dimension_formulas() {
        for d in 1..=4usize {
            for n in 0..=6u32 {
                assert_eq!(monomials(d, n).len(), sym_rank(d, n));
            }
        }
        // S²(V) of rank 2 has rank 3; S²⊗S¹(V^{(1)}) of rank 2 over F_3 has rank 6
        let f3 = Ring::zmod(3);
        let v = FreeModule::new(&f3, 2);
        let phi = SymmetricFunctor::new(vec![(2, 0), (1, 1)]).unwrap();
        assert_eq!(apply_functor(&phi, &v).unwrap().rank, 6);
        assert_eq!(phi.degree(3), 5);
        let s1t = SymmetricFunctor::pure(1, 1);
        assert_eq!(apply_functor(&s1t, &v).unwrap().rank, v.rank);
    }

    #[test]
    fn frobenius_arrow_rank_and_naturality() {
        for p in [2u64, 3] {
            let ring = Ring::zmod(p);
            let v = FreeModule::new(&ring, 2);
            let frob = frobenius_arrow(&v).unwrap();
            assert_eq!(rank(&frob.mat).unwrap(), 2);
            assert!(rank(&frob.mat).unwrap() < frob.codomain.rank);
            // rank-1: bijective
            let l = FreeModule::new(&ring, 1);
            let fl = frobenius_arrow(&l).unwrap();
            assert_eq!(fl.mat.rows, 1);
            assert_eq!(rank(&fl.mat).unwrap(), 1);
            // naturality on random maps: S^p(f) ∘ Frob_V = Frob_W ∘ f^{(1)}
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            for _ in 0..10 {
                let mut m = Mat::zeros(&ring, 2, 2);
                for i in 0..2 {
                    for j in 0..2 {
                        m[(i, j)] = ring.random(&mut rng);
                    }
                }
                let f = LinearMap::new(v.clone(), v.clone(), m);
                let lhs = sym_power_map(&f, p as u32).mat.matmul(&frob.mat);
                let rhs = frob.mat.matmul(&f.twist(1).unwrap().mat);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn verschiebung_is_transpose_of_dual_frobenius_and_surjective() {
        for p in [2u64, 3] {
            let ring = Ring::zmod(p);
            let v = FreeModule::new(&ring, 2);
            let ver = verschiebung_arrow(&v).unwrap();
            let frob_dual = frobenius_arrow(&v.dual()).unwrap();
            assert_eq!(ver.mat, frob_dual.mat.transpose());
            assert_eq!(rank(&ver.mat).unwrap(), 2);
            // [e1]_p ↦ e1⊗1
            let p_u = p as u32;
            let mons = monomials(2, p_u);
            let col = mons.iter().position(|m| m[0] == p_u).unwrap();
            let image = ver.mat.col(col);
            assert_eq!(image[0], ring.one());
            assert!(ring.is_zero(&image[1]));
        }
    }

    #[test]
    fn pairing_is_perfect() {
        for p in [2u64, 3] {
            let ring = Ring::zmod(p);
            let v = FreeModule::new(&ring, 2);
            for b in 0..=8u32 {
                let gram = gamma_sym_pairing(b, &v).unwrap();
                assert_eq!(rank(&gram).unwrap(), b as usize + 1, "b = {b}, p = {p}");
            }
            // b = 1 is the wedge pairing with Gram rank 2
            let g1 = gamma_sym_pairing(1, &v).unwrap();
            assert_eq!(rank(&g1).unwrap(), 2);
        }
    }

    #[test]
    fn theta_bijective_exactly_at_p_power_minus_one() {
        for p in [2u64, 3] {
            let ring = Ring::zmod(p);
            let v = FreeModule::new(&ring, 2);
            for b in 0..=9u32 {
                let theta = theta_map(b, p, &v).unwrap();
                let r = rank(&theta.mat).unwrap();
                // surjective always
                assert_eq!(r, theta.codomain.rank, "theta not surjective at b = {b}");
                // bijective iff b+1 = ∏(a_i + 1) over the base-p digits a_i
                let expect_bij = {
                    let mut n = b as u64;
                    let mut prod = 1u64;
                    while n > 0 {
                        prod *= n % p + 1;
                        n /= p;
                    }
                    prod == b as u64 + 1
                };
                assert_eq!(
                    theta.domain.rank == theta.codomain.rank && r == theta.domain.rank,
                    expect_bij,
                    "b = {b}, p = {p}"
                );
            }
            // single digit: θ is the identity matrix on Γ^{p-1}
            let theta = theta_map(p as u32 - 1, p, &v).unwrap();
            assert_eq!(theta.mat, Mat::identity(&ring, p as usize));
        }
        // p = 2, b = 3: bijective with source and target rank 4
        let v = FreeModule::new(&Ring::zmod(2), 2);
        let t = theta_map(3, 2, &v).unwrap();
        assert_eq!(t.domain.rank, 4);
        assert_eq!(t.codomain.rank, 4);
        assert_eq!(rank(&t.mat).unwrap(), 4);
        // p = 2, b = 2: source rank 3, target rank 2
        let t2 = theta_map(2, 2, &v).unwrap();
        assert_eq!(t2.domain.rank, 3);
        assert_eq!(t2.codomain.rank, 2);
        assert_eq!(rank(&t2.mat).unwrap(), 2);
    }

    #[test]
    fn divided_power_dimension_is_dual_symmetric() {
        let ring = Ring::zmod(3);
        for d in 1..=4usize {
            let v = FreeModule::new(&ring, d);
            for n in 0..=6u32 {
                assert_eq!(gamma_module(&v, n).rank, sym_rank(d, n));
            }
        }
    }
}
