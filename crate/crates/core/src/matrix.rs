//! Dense matrices over a [`Ring`] and exact linear algebra over finite chain
//! rings (finite fields, Z/p^r, W_r of a finite field).
//!
//! Everything downstream (cohomology, obstruction classes, lift searches)
//! reduces to Smith decompositions here: A = U·diag·V with U, V invertible.

use crate::error::{Error, Result};
use crate::ring::{Elem, Ring};

#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    pub ring: Ring,
    pub rows: usize,
    pub cols: usize,
    data: Vec<Elem>, // row-major
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} over {}", self.rows, self.cols, self.ring.describe())?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{:?}", self[(i, j)].0)).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Elem;
    fn index(&self, (i, j): (usize, usize)) -> &Elem {
        assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Elem {
        assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mat {
    pub fn zeros(ring: &Ring, rows: usize, cols: usize) -> Mat {
        Mat {
            ring: ring.clone(),
            rows,
            cols,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: &Ring, n: usize) -> Mat {
        let mut m = Mat::zeros(ring, n, n);
        for i in 0..n {
            m[(i, i)] = ring.one();
        }
        m
    }

    pub fn from_rows(ring: &Ring, rows: Vec<Vec<Elem>>) -> Mat {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c));
        Mat {
            ring: ring.clone(),
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Entries given as integers, reduced through the ring's canonical map.
    pub fn from_int_rows(ring: &Ring, rows: &[Vec<u64>]) -> Mat {
        Mat::from_rows(
            ring,
            rows.iter()
                .map(|r| r.iter().map(|&k| ring.from_u64(k)).collect())
                .collect(),
        )
    }

    pub fn from_cols(ring: &Ring, cols: Vec<Vec<Elem>>) -> Mat {
        Mat::from_rows(ring, cols).transpose()
    }

    pub fn col(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Elem> {
        (0..self.cols).map(|j| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (a, b) in m.data.iter_mut().zip(other.data.iter()) {
            *a = self.ring.add(a, b);
        }
        m
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (a, b) in m.data.iter_mut().zip(other.data.iter()) {
            *a = self.ring.sub(a, b);
        }
        m
    }

    pub fn neg(&self) -> Mat {
        let mut m = self.clone();
        for a in m.data.iter_mut() {
            *a = self.ring.neg(a);
        }
        m
    }

    pub fn scale(&self, k: &Elem) -> Mat {
        let mut m = self.clone();
        for a in m.data.iter_mut() {
            *a = self.ring.mul(k, a);
        }
        m
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let r = &self.ring;
        let mut out = Mat::zeros(r, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if r.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = r.mul(a, &other[(k, j)]);
                    out[(i, j)] = r.add(&out[(i, j)], &prod);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(self.cols, v.len());
        let r = &self.ring;
        (0..self.rows)
            .map(|i| {
                let mut acc = r.zero();
                for j in 0..self.cols {
                    acc = r.add(&acc, &r.mul(&self[(i, j)], &v[j]));
                }
                acc
            })
            .collect()
    }

    pub fn map(&self, f: impl Fn(&Elem) -> Elem) -> Mat {
        let mut m = self.clone();
        for a in m.data.iter_mut() {
            *a = f(a);
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| self.ring.is_zero(a))
    }

    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let mut m = Mat::zeros(&self.ring, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        let mut rows = Vec::with_capacity(self.rows + other.rows);
        for i in 0..self.rows {
            rows.push(self.row(i));
        }
        for i in 0..other.rows {
            rows.push(other.row(i));
        }
        Mat::from_rows(&self.ring, rows)
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Mat) -> Mat {
        let mut m = Mat::zeros(&self.ring, self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Mat {
        let mut m = Mat::zeros(&self.ring, rows.len(), cols.len());
        for (ii, i) in rows.clone().enumerate() {
            for (jj, j) in cols.clone().enumerate() {
                m[(ii, jj)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Kronecker (tensor) product.
    pub fn kronecker(&self, other: &Mat) -> Mat {
        let r = &self.ring;
        let mut m = Mat::zeros(r, self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m[(i * other.rows + k, j * other.cols + l)] =
                            r.mul(&self[(i, j)], &other[(k, l)]);
                    }
                }
            }
        }
        m
    }
}

/// Smith decomposition a = u · diag · v over a finite chain ring, with the
/// inverses of the transforms carried along.
pub struct Smith {
    pub u: Mat,
    pub uinv: Mat,
    pub v: Mat,
    pub vinv: Mat,
    /// Diagonal entries, one per min(rows, cols); p-power times unit or zero.
    pub diag: Vec<Elem>,
    /// Valuation of each diagonal entry (chain length for zero entries),
    /// extended by chain-length entries up to the column count.
    pub vals: Vec<u32>,
}

pub fn smith(a: &Mat) -> Result<Smith> {
    let ring = a.ring.clone();
    let r_len = ring.chain_length()?;
    let mut s = a.clone();
    let mut u = Mat::identity(&ring, a.rows);
    let mut uinv = Mat::identity(&ring, a.rows);
    let mut v = Mat::identity(&ring, a.cols);
    let mut vinv = Mat::identity(&ring, a.cols);

    let n = a.rows.min(a.cols);
    for k in 0..n {
        // pivot: entry of minimal valuation in the trailing block
        let mut best: Option<(usize, usize, u32)> = None;
        for i in k..a.rows {
            for j in k..a.cols {
                if ring.is_zero(&s[(i, j)]) {
                    continue;
                }
                let (val, _) = ring.val_unit(&s[(i, j)])?;
                if best.map(|(_, _, bv)| val < bv).unwrap_or(true) {
                    best = Some((i, j, val));
                }
            }
        }
        let Some((pi, pj, pval)) = best else {
            break; // trailing block is zero
        };
        swap_rows(&mut s, &mut u, &mut uinv, k, pi, &ring);
        swap_cols(&mut s, &mut v, &mut vinv, k, pj, &ring);
        // normalize pivot to p^val
        let (_, unit) = ring.val_unit(&s[(k, k)])?;
        let unit_inv = ring
            .inv(&unit)
            .ok_or_else(|| Error::structure("chain-ring unit has no inverse"))?;
        scale_row(&mut s, &mut u, &mut uinv, k, &unit_inv, &unit, &ring);
        let p_to_val = ring.pow(&ring.from_u64(ring.prime().unwrap()), pval as u64);
        debug_assert_eq!(s[(k, k)], p_to_val);
        // clear the column
        for i in k + 1..a.rows {
            if ring.is_zero(&s[(i, k)]) {
                continue;
            }
            let (ival, iunit) = ring.val_unit(&s[(i, k)])?;
            debug_assert!(ival >= pval);
            let q = ring.mul(
                &ring.pow(&ring.from_u64(ring.prime().unwrap()), (ival - pval) as u64),
                &iunit,
            );
            add_row_multiple(&mut s, &mut u, &mut uinv, i, k, &ring.neg(&q), &ring);
        }
        // clear the row
        for j in k + 1..a.cols {
            if ring.is_zero(&s[(k, j)]) {
                continue;
            }
            let (jval, junit) = ring.val_unit(&s[(k, j)])?;
            debug_assert!(jval >= pval);
            let q = ring.mul(
                &ring.pow(&ring.from_u64(ring.prime().unwrap()), (jval - pval) as u64),
                &junit,
            );
            add_col_multiple(&mut s, &mut v, &mut vinv, j, k, &ring.neg(&q), &ring);
        }
    }
    let mut diag = Vec::with_capacity(n);
    let mut vals = Vec::with_capacity(a.cols);
    for k in 0..n {
        diag.push(s[(k, k)].clone());
        if ring.is_zero(&s[(k, k)]) {
            vals.push(r_len);
        } else {
            vals.push(ring.val_unit(&s[(k, k)])?.0);
        }
    }
    // sort is unnecessary for our uses; valuations suffice
    vals.resize(a.cols, r_len);
    Ok(Smith {
        u,
        uinv,
        v,
        vinv,
        diag,
        vals,
    })
}

fn swap_rows(s: &mut Mat, u: &mut Mat, uinv: &mut Mat, a: usize, b: usize, ring: &Ring) {
    if a == b {
        return;
    }
    let _ = ring;
    for j in 0..s.cols {
        let t = s[(a, j)].clone();
        s[(a, j)] = s[(b, j)].clone();
        s[(b, j)] = t;
    }
    // left op E: A ← E A;  U ← U E⁻¹ (swap is an involution)
    for i in 0..u.rows {
        let t = u[(i, a)].clone();
        u[(i, a)] = u[(i, b)].clone();
        u[(i, b)] = t;
    }
    for j in 0..uinv.cols {
        let t = uinv[(a, j)].clone();
        uinv[(a, j)] = uinv[(b, j)].clone();
        uinv[(b, j)] = t;
    }
}

fn swap_cols(s: &mut Mat, v: &mut Mat, vinv: &mut Mat, a: usize, b: usize, ring: &Ring) {
    if a == b {
        return;
    }
    let _ = ring;
    for i in 0..s.rows {
        let t = s[(i, a)].clone();
        s[(i, a)] = s[(i, b)].clone();
        s[(i, b)] = t;
    }
    // right op E: A ← A E;  V ← E⁻¹ V
    for j in 0..v.cols {
        let t = v[(a, j)].clone();
        v[(a, j)] = v[(b, j)].clone();
        v[(b, j)] = t;
    }
    for i in 0..vinv.rows {
        let t = vinv[(i, a)].clone();
        vinv[(i, a)] = vinv[(i, b)].clone();
        vinv[(i, b)] = t;
    }
}

fn scale_row(
    s: &mut Mat,
    u: &mut Mat,
    uinv: &mut Mat,
    i: usize,
    by: &Elem,
    by_inv: &Elem,
    ring: &Ring,
) {
    for j in 0..s.cols {
        s[(i, j)] = ring.mul(by, &s[(i, j)]);
    }
    for k in 0..u.rows {
        u[(k, i)] = ring.mul(&u[(k, i)], by_inv);
    }
    for j in 0..uinv.cols {
        uinv[(i, j)] = ring.mul(by, &uinv[(i, j)]);
    }
}

/// row_i ← row_i + q · row_k
fn add_row_multiple(
    s: &mut Mat,
    u: &mut Mat,
    uinv: &mut Mat,
    i: usize,
    k: usize,
    q: &Elem,
    ring: &Ring,
) {
    for j in 0..s.cols {
        let t = ring.mul(q, &s[(k, j)]);
        s[(i, j)] = ring.add(&s[(i, j)], &t);
    }
    // U ← U E⁻¹ where E⁻¹ subtracts: col_k of U gets -q · col_i
    let nq = ring.neg(q);
    for r in 0..u.rows {
        let t = ring.mul(&nq, &u[(r, i)]);
        u[(r, k)] = ring.add(&u[(r, k)], &t);
    }
    for j in 0..uinv.cols {
        let t = ring.mul(q, &uinv[(k, j)]);
        uinv[(i, j)] = ring.add(&uinv[(i, j)], &t);
    }
}

/// col_j ← col_j + q · col_k
fn add_col_multiple(
    s: &mut Mat,
    v: &mut Mat,
    vinv: &mut Mat,
    j: usize,
    k: usize,
    q: &Elem,
    ring: &Ring,
) {
    for i in 0..s.rows {
        let t = ring.mul(q, &s[(i, k)]);
        s[(i, j)] = ring.add(&s[(i, j)], &t);
    }
    // V ← E⁻¹ V: row_k of V gets -q · row_j
    let nq = ring.neg(q);
    for c in 0..v.cols {
        let t = ring.mul(&nq, &v[(j, c)]);
        v[(k, c)] = ring.add(&v[(k, c)], &t);
    }
    for i in 0..vinv.rows {
        let t = ring.mul(q, &vinv[(i, k)]);
        vinv[(i, j)] = ring.add(&vinv[(i, j)], &t);
    }
}

/// Rank of the matrix after reduction to the residue field = number of unit
/// pivots in the Smith form.
pub fn rank(a: &Mat) -> Result<usize> {
    let s = smith(a)?;
    Ok(s.vals.iter().take(a.rows.min(a.cols)).filter(|&&v| v == 0).count())
}

/// One solution of A x = b, if any.
pub fn solve(a: &Mat, b: &[Elem]) -> Result<Option<Vec<Elem>>> {
    let ring = a.ring.clone();
    let r_len = ring.chain_length()?;
    let p = ring.prime().unwrap();
    let s = smith(a)?;
    let c = s.uinv.mul_vec(b);
    let mut y = vec![ring.zero(); a.cols];
    for i in 0..a.rows {
        let di = if i < s.diag.len() {
            s.diag[i].clone()
        } else {
            ring.zero()
        };
        if ring.is_zero(&di) {
            if !ring.is_zero(&c[i]) {
                return Ok(None);
            }
            continue;
        }
        let (dval, dunit) = ring.val_unit(&di)?;
        if ring.is_zero(&c[i]) {
            continue;
        }
        let (cval, cunit) = ring.val_unit(&c[i])?;
        if cval < dval {
            return Ok(None);
        }
        let dunit_inv = ring.inv(&dunit).unwrap();
        let quotient = ring.mul(
            &ring.pow(&ring.from_u64(p), (cval - dval) as u64),
            &ring.mul(&cunit, &dunit_inv),
        );
        let _ = r_len;
        y[i] = quotient;
    }
    let x = s.vinv.mul_vec(&y);
    debug_assert_eq!(a.mul_vec(&x), b.to_vec(), "solve produced a non-solution");
    Ok(Some(x))
}

/// Generators of ker A as columns.
pub fn kernel_gens(a: &Mat) -> Result<Vec<Vec<Elem>>> {
    let ring = a.ring.clone();
    let r_len = ring.chain_length()?;
    let p = ring.prime().unwrap();
    let s = smith(a)?;
    let mut gens = Vec::new();
    for i in 0..a.cols {
        let v = s.vals[i];
        if v == 0 {
            continue; // unit pivot: no kernel in this coordinate
        }
        // p^{r-v} e_i in y-coordinates
        let mut y = vec![ring.zero(); a.cols];
        y[i] = ring.pow(&ring.from_u64(p), (r_len - v) as u64);
        let x = s.vinv.mul_vec(&y);
        if x.iter().any(|e| !ring.is_zero(e)) {
            gens.push(x);
        }
    }
    Ok(gens)
}

/// The subquotient ker A / im B of the middle term of a two-step complex
/// B: R^t → R^c, A: R^c → R^b with A·B = 0, as an abelian p-group with
/// canonical class coordinates.
pub struct Subquotient {
    ring: Ring,
    dim: usize,
    sm_a: Smith,
    /// Smith of the relation presentation [D | diag(p^{v_i})].
    sm_m: Smith,
    /// w_i = valuation of relation i: factor i ≅ Z/p^{w_i}.
    w: Vec<u32>,
}

impl Subquotient {
    pub fn new(a: &Mat, b: &Mat) -> Result<Subquotient> {
        let ring = a.ring.clone();
        let r_len = ring.chain_length()?;
        let p = ring.prime().unwrap();
        assert_eq!(a.cols, b.rows, "complex shape mismatch");
        debug_assert!(a.matmul(b).is_zero(), "not a complex: A·B != 0");
        let sm_a = smith(a)?;
        let c = a.cols;
        // image columns in y-coordinates, divided by p^{r-v_i}
        let yb = sm_a.v.matmul(b);
        let mut d = Mat::zeros(&ring, c, b.cols);
        for i in 0..c {
            let shift = r_len - sm_a.vals[i];
            for j in 0..b.cols {
                if ring.is_zero(&yb[(i, j)]) {
                    continue;
                }
                let (val, unit) = ring.val_unit(&yb[(i, j)])?;
                assert!(
                    val >= shift,
                    "image does not lie in the kernel (valuation {val} < {shift})"
                );
                d[(i, j)] = ring.mul(&ring.pow(&ring.from_u64(p), (val - shift) as u64), &unit);
            }
        }
        let mut diag = Mat::zeros(&ring, c, c);
        for i in 0..c {
            diag[(i, i)] = ring.pow(&ring.from_u64(p), sm_a.vals[i] as u64);
        }
        let m = d.hstack(&diag);
        let sm_m = smith(&m)?;
        let mut w = Vec::with_capacity(c);
        for i in 0..c {
            let entry = if i < sm_m.diag.len() {
                sm_m.diag[i].clone()
            } else {
                ring.zero()
            };
            if ring.is_zero(&entry) {
                w.push(r_len);
            } else {
                w.push(ring.val_unit(&entry)?.0);
            }
        }
        Ok(Subquotient {
            ring,
            dim: c,
            sm_a,
            sm_m,
            w,
        })
    }

    /// Orders of the nontrivial cyclic factors, as exponents: factor ≅ Z/p^{w}.
    pub fn invariants(&self) -> Vec<u32> {
        self.w.iter().copied().filter(|&w| w > 0).collect()
    }

    /// Dimension over F_p when every factor is Z/p (errors otherwise callers
    /// should use `invariants`).
    pub fn fp_dimension(&self) -> usize {
        self.invariants().len()
    }

    /// Total size log_p: Σ w_i.
    pub fn log_order(&self) -> u32 {
        self.w.iter().sum()
    }

    /// Element of ker A generating the i-th nontrivial factor.
    pub fn generator(&self, i: usize) -> Vec<Elem> {
        let idxs: Vec<usize> = (0..self.dim).filter(|&k| self.w[k] > 0).collect();
        let k = idxs[i];
        let p = self.ring.from_u64(self.ring.prime().unwrap());
        let r_len = self.ring.chain_length().unwrap();
        let gen_m = self.sm_m.u.col(k); // generator in the numerator presentation
        let mut y = vec![self.ring.zero(); self.dim];
        for j in 0..self.dim {
            let shift = r_len - self.sm_a.vals[j];
            y[j] = self.ring.mul(&self.ring.pow(&p, shift as u64), &gen_m[j]);
        }
        self.sm_a.vinv.mul_vec(&y)
    }

    /// Canonical coordinates of the class of a kernel element z: an entry per
    /// nontrivial factor, reduced mod p^{w_i}. Two kernel elements are in the
    /// same class iff their coordinates agree.
    pub fn class_coords(&self, z: &[Elem]) -> Result<Vec<Elem>> {
        assert_eq!(z.len(), self.dim);
        let ring = &self.ring;
        let p = ring.from_u64(ring.prime().unwrap());
        let r_len = ring.chain_length()?;
        let y = self.sm_a.v.mul_vec(z);
        let mut eta = vec![ring.zero(); self.dim];
        for i in 0..self.dim {
            if ring.is_zero(&y[i]) {
                continue;
            }
            let shift = r_len - self.sm_a.vals[i];
            let (val, unit) = ring.val_unit(&y[i])?;
            if val < shift {
                return Err(Error::structure("element is not in the kernel"));
            }
            eta[i] = ring.mul(&ring.pow(&p, (val - shift) as u64), &unit);
        }
        let zeta = self.sm_m.uinv.mul_vec(&eta);
        let mut coords = Vec::new();
        for i in 0..self.dim {
            if self.w[i] == 0 {
                continue;
            }
            // reduce mod p^{w_i}
            let modulus = ring.pow(&p, self.w[i] as u64);
            coords.push(reduce_mod_power(ring, &zeta[i], &modulus, self.w[i])?);
        }
        Ok(coords)
    }

    pub fn is_zero_class(&self, z: &[Elem]) -> Result<bool> {
        Ok(self.class_coords(z)?.iter().all(|c| self.ring.is_zero(c)))
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }
}

/// Canonical representative of x mod p^w in a chain ring: forces valuation-≥w
/// parts to zero.
fn reduce_mod_power(ring: &Ring, x: &Elem, _modulus: &Elem, w: u32) -> Result<Elem> {
    if ring.is_zero(x) {
        return Ok(ring.zero());
    }
    let (val, unit) = ring.val_unit(x)?;
    if val >= w {
        return Ok(ring.zero());
    }
    // canonicalize the unit part mod p^{w - val}: for Z/p^r and W_r(F_q) we
    // truncate the unit's residue expansion
    match canonical_unit_mod(ring, &unit, w - val)? {
        u => {
            let p = ring.from_u64(ring.prime().unwrap());
            Ok(ring.mul(&ring.pow(&p, val as u64), &u))
        }
    }
}

fn canonical_unit_mod(ring: &Ring, u: &Elem, k: u32) -> Result<Elem> {
    // represent u mod p^k: subtract off the valuation-≥k tail by reducing the
    // coordinate expansion; for Z/p^r this is u mod p^k, for Witt we truncate
    // coordinates past k.
    let r_len = ring.chain_length()?;
    if k >= r_len {
        return Ok(u.clone());
    }
    if ring.witt_base().is_some() {
        let coords = ring.witt_coords(u)?;
        let base = ring.witt_base().unwrap();
        let truncated: Vec<Elem> = coords
            .iter()
            .enumerate()
            .map(|(i, c)| if (i as u32) < k { c.clone() } else { base.zero() })
            .collect();
        ring.witt_from_coords(&truncated)
    } else {
        let p = ring.prime().unwrap();
        let modulus = p.pow(k);
        Ok(Elem(vec![u.0[0] % modulus]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_mat(ring: &Ring, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Mat {
        let mut m = Mat::zeros(ring, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = ring.random(rng);
            }
        }
        m
    }

    #[test]
    fn smith_reconstructs_over_chain_rings() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for ring in [
            Ring::zmod(5),
            Ring::zmod(9),
            Ring::zmod(8),
            Ring::f4(),
            Ring::witt(Ring::f4(), 2, 2).unwrap(),
        ] {
            for _ in 0..20 {
                let a = random_mat(&ring, 3, 4, &mut rng);
                let s = smith(&a).unwrap();
                let mut d = Mat::zeros(&ring, 3, 4);
                for i in 0..3 {
                    if i < s.diag.len() {
                        d[(i, i)] = s.diag[i].clone();
                    }
                }
                assert_eq!(s.u.matmul(&d).matmul(&s.v), a);
                assert_eq!(s.u.matmul(&s.uinv), Mat::identity(&ring, 3));
                assert_eq!(s.vinv.matmul(&s.v), Mat::identity(&ring, 4));
            }
        }
    }

    #[test]
    fn solve_and_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for ring in [Ring::zmod(4), Ring::zmod(3), Ring::witt(Ring::zmod(3), 2, 3).unwrap()] {
            for _ in 0..30 {
                let a = random_mat(&ring, 3, 3, &mut rng);
                let x0: Vec<Elem> = (0..3).map(|_| ring.random(&mut rng)).collect();
                let b = a.mul_vec(&x0);
                let x = solve(&a, &b).unwrap().expect("consistent system must solve");
                assert_eq!(a.mul_vec(&x), b);
                for k in kernel_gens(&a).unwrap() {
                    assert!(a.mul_vec(&k).iter().all(|e| ring.is_zero(e)));
                }
            }
        }
    }

    #[test]
    fn kernel_spans_kernel_exhaustively() {
        // over Z/4, check the generated kernel equals the true kernel by counting
        let ring = Ring::zmod(4);
        let a = Mat::from_int_rows(&ring, &[vec![2, 1], vec![0, 2]]);
        let gens = kernel_gens(&a).unwrap();
        let mut all = std::collections::HashSet::new();
        // enumerate combinations of generators with coefficients in 0..4
        let g = gens.len();
        for mask in 0..(4u64.pow(g as u32)) {
            let mut v = vec![ring.zero(); 2];
            let mut m = mask;
            for gen in &gens {
                let c = ring.from_u64(m % 4);
                m /= 4;
                for (vi, gi) in v.iter_mut().zip(gen.iter()) {
                    *vi = ring.add(vi, &ring.mul(&c, gi));
                }
            }
            all.insert(format!("{v:?}"));
        }
        let mut truth = 0;
        for x0 in 0..4u64 {
            for x1 in 0..4u64 {
                let v = vec![ring.from_u64(x0), ring.from_u64(x1)];
                if a.mul_vec(&v).iter().all(|e| ring.is_zero(e)) {
                    truth += 1;
                    assert!(all.contains(&format!("{v:?}")));
                }
            }
        }
        assert_eq!(all.len(), truth);
    }

    #[test]
    fn subquotient_invariants() {
        let ring = Ring::zmod(4);
        // B = [2]: R --2--> R;  A = [0]: R --0--> R.  H = ker 0 / im 2 = Z/2.
        let a = Mat::from_int_rows(&ring, &[vec![0]]);
        let b = Mat::from_int_rows(&ring, &[vec![2]]);
        let h = Subquotient::new(&a, &b).unwrap();
        assert_eq!(h.invariants(), vec![1]);
        // A = [2], B = [2]: ker = 2R, im = 2R, H = 0.
        let a2 = Mat::from_int_rows(&ring, &[vec![2]]);
        let h2 = Subquotient::new(&a2, &b).unwrap();
        assert!(h2.invariants().is_empty());
        // class coordinates: generator is nonzero, twice the generator is zero
        let g = h.generator(0);
        assert!(!h.is_zero_class(&g).unwrap());
        let twog: Vec<Elem> = g.iter().map(|e| ring.add(e, e)).collect();
        assert!(h2.invariants().is_empty());
        assert!(h.is_zero_class(&twog).unwrap());
    }

    #[test]
    fn rank_over_fields() {
        let ring = Ring::f4();
        let a = Mat::from_int_rows(&ring, &[vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 0]]);
        assert_eq!(rank(&a).unwrap(), 2);
    }
}
