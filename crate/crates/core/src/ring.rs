//! Finite base rings and truncated p-typical Witt vectors.
//!
//! A [`Ring`] is one of:
//!   * `Zmod(n)` — the ring ℤ/n,
//!   * `Quot` — a quotient F_p[x_1..x_k]/(x_i^{e_i} - t_i) with a terminating
//!     rewrite basis (pairwise-coprime leading monomials, so normal forms are
//!     unique),
//!   * `Witt` — W_r(A) over one of the above, with the ring laws given by the
//!     universal Witt polynomials.
//!
//! Elements are reduced coordinate vectors (`Elem`), flat `u64` sequences.
//! The length-2 laws are hard-coded in closed form; longer laws are generated
//! once by solving the ghost equations over ℤ and cached per (p, r).

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use once_cell::sync::OnceCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

/// A reduced coordinate vector in some [`Ring`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Elem(pub Vec<u64>);

#[derive(Clone)]
pub struct Ring(Arc<RingRepr>);

pub(crate) enum RingRepr {
    Zmod {
        n: u64,
        /// Set when n is a prime power p^r.
        prime_power: Option<(u64, u32)>,
    },
    Quot {
        p: u64,
        vars: Vec<String>,
        caps: Vec<u32>,
        /// Rewrite target for x_i^{caps[i]}, as a reduced coefficient vector.
        tails: Vec<Vec<u64>>,
        /// Monomial exponent vectors forming the residue basis, mixed-radix order.
        basis: Vec<Vec<u32>>,
        mul_table: OnceCell<Vec<Vec<u64>>>,
    },
    Witt {
        base: Ring,
        len: usize,
        p: u64,
    },
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.describe() == other.describe()
    }
}
impl Eq for Ring {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_power_decompose(n: u64) -> Option<(u64, u32)> {
    for p in 2..=n {
        if is_prime(p) && n % p == 0 {
            let mut m = n;
            let mut r = 0;
            while m % p == 0 {
                m /= p;
                r += 1;
            }
            return if m == 1 { Some((p, r)) } else { None };
        }
    }
    None
}

impl Ring {
    // ---------------------------------------------------------------- constructors

    pub fn zmod(n: u64) -> Ring {
        assert!(n >= 2, "zmod needs n >= 2");
        Ring(Arc::new(RingRepr::Zmod {
            n,
            prime_power: prime_power_decompose(n),
        }))
    }

    /// F_p[vars]/(x_i^{caps[i]} - tails[i]).
    ///
    /// Each tail is given as a list of (exponents, coefficient) monomials; all
    /// tail monomials must have total degree strictly below the corresponding
    /// cap so that rewriting terminates.
    pub fn quot(
        p: u64,
        vars: Vec<String>,
        caps: Vec<u32>,
        tails_raw: Vec<Vec<(Vec<u32>, u64)>>,
    ) -> Result<Ring> {
        if !is_prime(p) {
            return Err(Error::structure(format!("{p} is not prime")));
        }
        if vars.len() != caps.len() || vars.len() != tails_raw.len() {
            return Err(Error::structure("vars/caps/tails length mismatch"));
        }
        if caps.iter().any(|&c| c == 0) {
            return Err(Error::structure("caps must be positive"));
        }
        let k = vars.len();
        // Residue basis: all exponent vectors below the caps, mixed-radix order.
        let dim: u64 = caps.iter().map(|&c| c as u64).product();
        if dim > 4096 {
            return Err(Error::budget(format!("quotient ring dimension {dim} too large")));
        }
        let mut basis = Vec::with_capacity(dim as usize);
        let mut cur = vec![0u32; k];
        loop {
            basis.push(cur.clone());
            let mut i = 0;
            loop {
                if i == k {
                    break;
                }
                cur[i] += 1;
                if cur[i] < caps[i] {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
        }
        // Validate and pre-reduce the tails.
        let mut tails = Vec::with_capacity(k);
        for (i, t) in tails_raw.iter().enumerate() {
            for (exps, _) in t {
                if exps.len() != k {
                    return Err(Error::structure("tail monomial arity mismatch"));
                }
                let deg: u32 = exps.iter().sum();
                if deg >= caps[i] {
                    return Err(Error::structure(
                        "tail monomials must have total degree below the cap",
                    ));
                }
            }
            tails.push(t.clone());
        }
        let ring = Ring(Arc::new(RingRepr::Quot {
            p,
            vars,
            caps: caps.clone(),
            tails: vec![Vec::new(); k], // placeholder, replaced below
            basis,
            mul_table: OnceCell::new(),
        }));
        // Reduce each tail to a coefficient vector (tails have degree below the
        // cap, so reduction cannot recurse into the tail being defined).
        let reduced: Vec<Vec<u64>> = tails
            .iter()
            .map(|t| {
                let mut poly: HashMap<Vec<u32>, u64> = HashMap::new();
                for (e, c) in t {
                    *poly.entry(e.clone()).or_insert(0) = (poly.get(e).copied().unwrap_or(0) + c) % p;
                }
                ring.reduce_poly_with(&poly, &tails)
            })
            .collect();
        let repr = match Arc::try_unwrap(ring.0) {
            Ok(RingRepr::Quot {
                p,
                vars,
                caps,
                basis,
                mul_table,
                ..
            }) => RingRepr::Quot {
                p,
                vars,
                caps,
                tails: reduced,
                basis,
                mul_table,
            },
            _ => unreachable!(),
        };
        Ok(Ring(Arc::new(repr)))
    }

    /// F_{p^k} presented as F_p[x]/(f) with f monic of degree k.
    /// `modulus` lists the coefficients of f below the leading term, so
    /// x^k = -(modulus[0] + modulus[1] x + ...).
    pub fn fq(p: u64, modulus: &[u64]) -> Result<Ring> {
        let k = modulus.len() as u32;
        let tail: Vec<(Vec<u32>, u64)> = modulus
            .iter()
            .enumerate()
            .filter(|(_, &c)| c % p != 0)
            .map(|(i, &c)| (vec![i as u32], (p - c % p) % p))
            .collect();
        Ring::quot(p, vec!["x".into()], vec![k], vec![tail])
    }

    /// The field with four elements, F_2[x]/(x^2+x+1).
    pub fn f4() -> Ring {
        Ring::fq(2, &[1, 1]).unwrap()
    }
    /// F_8 = F_2[x]/(x^3+x+1).
    pub fn f8() -> Ring {
        Ring::fq(2, &[1, 1, 0]).unwrap()
    }
    /// F_9 = F_3[x]/(x^2-x-1).
    pub fn f9() -> Ring {
        Ring::fq(3, &[2, 2]).unwrap()
    }
    /// F_16 = F_2[x]/(x^4+x+1).
    pub fn f16() -> Ring {
        Ring::fq(2, &[1, 1, 0, 0]).unwrap()
    }

    /// W_r(A) for the prime p. p must divide the characteristic of A.
    pub fn witt(base: Ring, len: usize, p: u64) -> Result<Ring> {
        if len == 0 {
            return Err(Error::structure("witt length must be >= 1"));
        }
        if !is_prime(p) {
            return Err(Error::structure(format!("{p} is not prime")));
        }
        if base.characteristic() % p != 0 {
            return Err(Error::structure(format!(
                "p = {p} does not divide the characteristic {} of the base",
                base.characteristic()
            )));
        }
        Ok(Ring(Arc::new(RingRepr::Witt { base, len, p })))
    }

    // ---------------------------------------------------------------- descriptors

    pub fn describe(&self) -> String {
        match &*self.0 {
            RingRepr::Zmod { n, .. } => format!("Z/{n}"),
            RingRepr::Quot {
                p, vars, caps, tails, ..
            } => format!("F{p}[{}]/caps{:?}/tails{:?}", vars.join(","), caps, tails),
            RingRepr::Witt { base, len, p } => format!("W{len}(p={p};{})", base.describe()),
        }
    }

    pub fn is_witt(&self) -> bool {
        matches!(&*self.0, RingRepr::Witt { .. })
    }

    pub fn witt_base(&self) -> Option<&Ring> {
        match &*self.0 {
            RingRepr::Witt { base, .. } => Some(base),
            _ => None,
        }
    }

    pub fn witt_len(&self) -> usize {
        match &*self.0 {
            RingRepr::Witt { len, .. } => *len,
            _ => 1,
        }
    }

    /// Number of u64 coordinates per element.
    pub fn width(&self) -> usize {
        match &*self.0 {
            RingRepr::Zmod { .. } => 1,
            RingRepr::Quot { basis, .. } => basis.len(),
            RingRepr::Witt { base, len, .. } => base.width() * len,
        }
    }

    /// Radix of each coordinate slot.
    pub fn coord_radixes(&self) -> Vec<u64> {
        match &*self.0 {
            RingRepr::Zmod { n, .. } => vec![*n],
            RingRepr::Quot { p, basis, .. } => vec![*p; basis.len()],
            RingRepr::Witt { base, len, .. } => {
                let b = base.coord_radixes();
                b.iter().cycle().take(b.len() * len).copied().collect()
            }
        }
    }

    pub fn order(&self) -> u128 {
        self.coord_radixes().iter().map(|&r| r as u128).product()
    }

    /// Additive order of 1.
    pub fn characteristic(&self) -> u64 {
        match &*self.0 {
            RingRepr::Zmod { n, .. } => *n,
            RingRepr::Quot { p, .. } => *p,
            RingRepr::Witt { base, len, p } => {
                // char W_r(A) = p^(r-1) * char A  when A has characteristic p;
                // in general it is p^(r-1)*char(A) for our p | char(A) bases.
                let mut c = base.characteristic();
                for _ in 1..*len {
                    c *= p;
                }
                c
            }
        }
    }

    /// The prime p when this ring is of characteristic a power of p, or the
    /// Witt prime for W_r.
    pub fn prime(&self) -> Option<u64> {
        match &*self.0 {
            RingRepr::Zmod { prime_power, .. } => prime_power.map(|(p, _)| p),
            RingRepr::Quot { p, .. } => Some(*p),
            RingRepr::Witt { p, .. } => Some(*p),
        }
    }

    /// True when the ring is F_p-algebra-like: characteristic exactly p.
    pub fn has_char_p(&self) -> bool {
        match self.prime() {
            Some(p) => self.characteristic() == p,
            None => false,
        }
    }

    // ---------------------------------------------------------------- elements

    pub fn zero(&self) -> Elem {
        Elem(vec![0; self.width()])
    }

    pub fn one(&self) -> Elem {
        self.from_u64(1)
    }

    pub fn is_zero(&self, x: &Elem) -> bool {
        x.0.iter().all(|&c| c == 0)
    }

    pub fn from_u64(&self, k: u64) -> Elem {
        match &*self.0 {
            RingRepr::Zmod { n, .. } => Elem(vec![k % n]),
            RingRepr::Quot { p, basis, .. } => {
                let mut v = vec![0; basis.len()];
                v[0] = k % p;
                Elem(v)
            }
            RingRepr::Witt { .. } => {
                // double-and-add over the Witt addition law
                let mut acc = self.zero();
                let one = {
                    let mut o = self.zero();
                    // Teichmueller representative of 1 is the ring identity.
                    let base = self.witt_base().unwrap();
                    let bw = base.width();
                    o.0[..bw].copy_from_slice(&base.one().0);
                    o
                };
                let mut bit = 63 - k.leading_zeros().min(63);
                if k == 0 {
                    return acc;
                }
                loop {
                    acc = self.add(&acc, &acc);
                    if (k >> bit) & 1 == 1 {
                        acc = self.add(&acc, &one);
                    }
                    if bit == 0 {
                        break;
                    }
                    bit -= 1;
                }
                acc
            }
        }
    }

    pub fn from_bigint(&self, k: &BigInt) -> Elem {
        let c = BigInt::from(self.characteristic());
        let mut r = k % &c;
        if r.is_negative() {
            r += &c;
        }
        let (_, digits) = r.to_u64_digits();
        self.from_u64(digits.first().copied().unwrap_or(0))
    }

    pub fn elem_index(&self, x: &Elem) -> u128 {
        let radixes = self.coord_radixes();
        let mut idx: u128 = 0;
        for (c, r) in x.0.iter().zip(radixes.iter()).rev() {
            idx = idx * (*r as u128) + (*c as u128);
        }
        idx
    }

    pub fn elem_from_index(&self, mut idx: u128) -> Elem {
        let radixes = self.coord_radixes();
        let mut v = Vec::with_capacity(radixes.len());
        for r in &radixes {
            v.push((idx % (*r as u128)) as u64);
            idx /= *r as u128;
        }
        Elem(v)
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order()).map(move |i| self.elem_from_index(i))
    }

    pub fn random<R: rand::Rng>(&self, rng: &mut R) -> Elem {
        Elem(
            self.coord_radixes()
                .iter()
                .map(|&r| rng.gen_range(0..r))
                .collect(),
        )
    }

    // ---------------------------------------------------------------- arithmetic

    pub fn add(&self, x: &Elem, y: &Elem) -> Elem {
        self.check_width(x);
        self.check_width(y);
        match &*self.0 {
            RingRepr::Zmod { n, .. } => Elem(vec![(x.0[0] + y.0[0]) % n]),
            RingRepr::Quot { p, .. } => Elem(
                x.0.iter()
                    .zip(y.0.iter())
                    .map(|(a, b)| (a + b) % p)
                    .collect(),
            ),
            RingRepr::Witt { base, len, p } => witt_add(base, *len, *p, x, y),
        }
    }

    pub fn neg(&self, x: &Elem) -> Elem {
        self.check_width(x);
        match &*self.0 {
            RingRepr::Zmod { n, .. } => Elem(vec![(n - x.0[0]) % n]),
            RingRepr::Quot { p, .. } => Elem(x.0.iter().map(|a| (p - a) % p).collect()),
            RingRepr::Witt { base, len, p } => witt_neg(base, *len, *p, x),
        }
    }

    pub fn sub(&self, x: &Elem, y: &Elem) -> Elem {
        self.add(x, &self.neg(y))
    }

    pub fn mul(&self, x: &Elem, y: &Elem) -> Elem {
        self.check_width(x);
        self.check_width(y);
        match &*self.0 {
            RingRepr::Zmod { n, .. } => Elem(vec![mulmod(x.0[0], y.0[0], *n)]),
            RingRepr::Quot { .. } => self.quot_mul(x, y),
            RingRepr::Witt { base, len, p } => witt_mul(base, *len, *p, x, y),
        }
    }

    pub fn mul_u64(&self, k: u64, x: &Elem) -> Elem {
        self.mul(&self.from_u64(k), x)
    }

    pub fn pow(&self, x: &Elem, mut e: u64) -> Elem {
        let mut acc = self.one();
        let mut b = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, if x is a unit.
    pub fn inv(&self, x: &Elem) -> Option<Elem> {
        match &*self.0 {
            RingRepr::Zmod { n, .. } => inv_mod(x.0[0], *n).map(|v| Elem(vec![v])),
            RingRepr::Quot { .. } => {
                // desk scale: search; the ring is small by construction
                for y in self.elements() {
                    if self.mul(x, &y) == self.one() {
                        return Some(y);
                    }
                }
                None
            }
            RingRepr::Witt { base, len, .. } => {
                let bw = base.width();
                let a0 = Elem(x.0[..bw].to_vec());
                let inv0 = base.inv(&a0)?;
                // y0 = Teichmueller-style coordinate lift of the base inverse,
                // then a geometric series kills the V-torsion error.
                let mut y0 = self.zero();
                y0.0[..bw].copy_from_slice(&inv0.0);
                let e = self.sub(&self.one(), &self.mul(x, &y0));
                let mut series = self.one();
                let mut pw = e.clone();
                for _ in 1..*len {
                    series = self.add(&series, &pw);
                    pw = self.mul(&pw, &e);
                }
                let y = self.mul(&y0, &series);
                debug_assert_eq!(self.mul(x, &y), self.one());
                Some(y)
            }
        }
    }

    pub fn is_unit(&self, x: &Elem) -> bool {
        self.inv(x).is_some()
    }

    /// x ↦ x^p for char-p rings; coordinatewise base Frobenius on W_r(A).
    pub fn frobenius(&self, x: &Elem) -> Result<Elem> {
        match &*self.0 {
            RingRepr::Zmod { prime_power, n, .. } => match prime_power {
                Some((p, 1)) => Ok(self.pow(x, *p)),
                _ => Err(Error::unsupported(format!(
                    "frobenius needs characteristic p, Z/{n} given"
                ))),
            },
            RingRepr::Quot { p, .. } => Ok(self.pow(x, *p)),
            RingRepr::Witt { base, len, .. } => {
                if !base.has_char_p() {
                    return Err(Error::unsupported(
                        "witt frobenius needs a base of characteristic p",
                    ));
                }
                let bw = base.width();
                let mut out = Vec::with_capacity(x.0.len());
                for i in 0..*len {
                    let c = Elem(x.0[i * bw..(i + 1) * bw].to_vec());
                    out.extend(base.frobenius(&c)?.0);
                }
                Ok(Elem(out))
            }
        }
    }

    /// Inverse Frobenius on perfect char-p rings (finite fields, F_p).
    pub fn frobenius_inv(&self, x: &Elem) -> Result<Elem> {
        let p = self
            .prime()
            .ok_or_else(|| Error::unsupported("no prime for frobenius_inv"))?;
        if !self.has_char_p() && !self.is_witt() {
            return Err(Error::unsupported("frobenius_inv needs characteristic p"));
        }
        match &*self.0 {
            RingRepr::Witt { base, len, .. } => {
                let bw = base.width();
                let mut out = Vec::with_capacity(x.0.len());
                for i in 0..*len {
                    let c = Elem(x.0[i * bw..(i + 1) * bw].to_vec());
                    out.extend(base.frobenius_inv(&c)?.0);
                }
                Ok(Elem(out))
            }
            _ => {
                // |A| = p^f, Frobenius has order f; inverse is x ↦ x^{p^{f-1}}.
                let mut f = 0u32;
                let mut o = self.order();
                while o > 1 {
                    if o % (p as u128) != 0 {
                        return Err(Error::unsupported("frobenius_inv: order not a p-power"));
                    }
                    o /= p as u128;
                    f += 1;
                }
                let mut e: u64 = 1;
                for _ in 0..f.saturating_sub(1) {
                    e = e.saturating_mul(p);
                }
                Ok(self.pow(x, e))
            }
        }
    }

    fn check_width(&self, x: &Elem) {
        assert_eq!(
            x.0.len(),
            self.width(),
            "element width {} does not match ring {}",
            x.0.len(),
            self.describe()
        );
    }

    fn quot_mul(&self, x: &Elem, y: &Elem) -> Elem {
        let RingRepr::Quot {
            p,
            basis,
            mul_table,
            tails,
            ..
        } = &*self.0
        else {
            unreachable!()
        };
        let table = mul_table.get_or_init(|| {
            let mut t = Vec::with_capacity(basis.len() * basis.len());
            for bi in basis {
                for bj in basis {
                    let sum: Vec<u32> = bi.iter().zip(bj.iter()).map(|(a, b)| a + b).collect();
                    let mut poly = HashMap::new();
                    poly.insert(sum, 1u64);
                    t.push(self.reduce_poly_with(&poly, &tails_to_raw(basis, tails)));
                }
            }
            t
        });
        let dim = basis.len();
        let mut out = vec![0u64; dim];
        for i in 0..dim {
            if x.0[i] == 0 {
                continue;
            }
            for j in 0..dim {
                if y.0[j] == 0 {
                    continue;
                }
                let c = mulmod(x.0[i], y.0[j], *p);
                let prod = &table[i * dim + j];
                for (o, pc) in out.iter_mut().zip(prod.iter()) {
                    *o = (*o + mulmod(c, *pc, *p)) % p;
                }
            }
        }
        Elem(out)
    }

    /// Rewrite an exponent-map polynomial to the residue basis.
    fn reduce_poly_with(
        &self,
        poly: &HashMap<Vec<u32>, u64>,
        tails_raw: &[Vec<(Vec<u32>, u64)>],
    ) -> Vec<u64> {
        let RingRepr::Quot { p, caps, basis, .. } = &*self.0 else {
            unreachable!()
        };
        let k = caps.len();
        let mut work: HashMap<Vec<u32>, u64> = poly.clone();
        let mut out = vec![0u64; basis.len()];
        let index_of = |e: &[u32]| -> usize {
            let mut idx = 0usize;
            for i in (0..k).rev() {
                idx = idx * caps[i] as usize + e[i] as usize;
            }
            idx
        };
        while let Some((e, c)) = work.iter().map(|(e, c)| (e.clone(), *c)).next() {
            work.remove(&e);
            if c % p == 0 {
                continue;
            }
            match (0..k).find(|&i| e[i] >= caps[i]) {
                None => {
                    out[index_of(&e)] = (out[index_of(&e)] + c) % p;
                }
                Some(i) => {
                    let mut rest = e.clone();
                    rest[i] -= caps[i];
                    for (te, tc) in &tails_raw[i] {
                        let mut m: Vec<u32> =
                            rest.iter().zip(te.iter()).map(|(a, b)| a + b).collect();
                        if te.len() < k {
                            m = rest
                                .iter()
                                .enumerate()
                                .map(|(j, a)| a + te.get(j).copied().unwrap_or(0))
                                .collect();
                        }
                        let entry = work.entry(m).or_insert(0);
                        *entry = (*entry + mulmod(c, *tc, *p)) % p;
                    }
                }
            }
        }
        out
    }

    // ---------------------------------------------------------------- Witt structure

    /// Teichmüller lift (a, 0, …, 0) of a base element.
    pub fn teichmuller(&self, a: &Elem) -> Result<Elem> {
        let RingRepr::Witt { base, len, .. } = &*self.0 else {
            return Err(Error::unsupported("teichmuller needs a Witt ring"));
        };
        if a.0.len() != base.width() {
            return Err(Error::structure("teichmuller: element not in the base ring"));
        }
        let mut out = self.zero();
        out.0[..base.width()].copy_from_slice(&a.0);
        let _ = len;
        Ok(out)
    }

    /// Witt coordinates of x as base-ring elements.
    pub fn witt_coords(&self, x: &Elem) -> Result<Vec<Elem>> {
        let RingRepr::Witt { base, len, .. } = &*self.0 else {
            return Err(Error::unsupported("witt_coords needs a Witt ring"));
        };
        let bw = base.width();
        Ok((0..*len).map(|i| Elem(x.0[i * bw..(i + 1) * bw].to_vec())).collect())
    }

    pub fn witt_from_coords(&self, coords: &[Elem]) -> Result<Elem> {
        let RingRepr::Witt { base, len, .. } = &*self.0 else {
            return Err(Error::unsupported("witt_from_coords needs a Witt ring"));
        };
        if coords.len() != *len {
            return Err(Error::structure("wrong number of Witt coordinates"));
        }
        let mut v = Vec::with_capacity(self.width());
        for c in coords {
            if c.0.len() != base.width() {
                return Err(Error::structure("witt coordinate not in base ring"));
            }
            v.extend_from_slice(&c.0);
        }
        Ok(Elem(v))
    }

    /// The shift V(a_0, …, a_{r-1}) = (0, a_0, …, a_{r-2}).
    pub fn verschiebung(&self, x: &Elem) -> Result<Elem> {
        let RingRepr::Witt { base, len, .. } = &*self.0 else {
            return Err(Error::unsupported("verschiebung needs a Witt ring"));
        };
        let bw = base.width();
        let mut out = vec![0u64; self.width()];
        out[bw..bw * *len].copy_from_slice(&x.0[..bw * (*len - 1)]);
        Ok(Elem(out))
    }

    /// Coordinate truncation W_r(A) → W_s(A), s ≤ r, together with the target ring.
    pub fn witt_reduce(&self, x: &Elem, s: usize) -> Result<(Ring, Elem)> {
        let RingRepr::Witt { base, len, p } = &*self.0 else {
            return Err(Error::unsupported("witt_reduce needs a Witt ring"));
        };
        if s == 0 || s > *len {
            return Err(Error::structure("bad truncation length"));
        }
        let target = Ring::witt(base.clone(), s, *p)?;
        Ok((target, Elem(x.0[..base.width() * s].to_vec())))
    }

    /// Ghost components over ℤ, using the canonical integer lifts of a Z/n base.
    pub fn ghost(&self, x: &Elem) -> Result<Vec<BigInt>> {
        let RingRepr::Witt { base, len, p } = &*self.0 else {
            return Err(Error::unsupported("ghost needs a Witt ring"));
        };
        if base.width() != 1 {
            return Err(Error::unsupported(
                "ghost needs a base ring with a chosen integer lift (Z/n)",
            ));
        }
        let lifts: Vec<BigInt> = x.0.iter().map(|&c| BigInt::from(c)).collect();
        Ok(ghost_of_lifts(&lifts, *len, *p))
    }

    /// p-adic valuation and unit part in a finite chain ring:
    /// Z/p^r, a finite field, or W_r(finite field). Returns (r, zero-unit) for 0.
    pub fn val_unit(&self, x: &Elem) -> Result<(u32, Elem)> {
        match &*self.0 {
            RingRepr::Zmod { n, prime_power } => {
                let (p, r) = prime_power
                    .ok_or_else(|| Error::unsupported("val_unit: not a chain ring"))?;
                if x.0[0] == 0 {
                    return Ok((r, self.zero()));
                }
                let mut v = 0;
                let mut u = x.0[0];
                while u % p == 0 {
                    u /= p;
                    v += 1;
                }
                let _ = n;
                Ok((v, Elem(vec![u])))
            }
            RingRepr::Quot { .. } => {
                if self.is_zero(x) {
                    Ok((1, self.zero()))
                } else {
                    Ok((0, x.clone()))
                }
            }
            RingRepr::Witt { base, len, .. } => {
                let coords = self.witt_coords(x)?;
                let v = coords.iter().take_while(|c| base.is_zero(c)).count();
                if v == *len {
                    return Ok((*len as u32, self.zero()));
                }
                // x = p^v * u with u_i = F^{-v}(x_{i+v})
                let mut ucoords = Vec::with_capacity(*len);
                for i in v..*len {
                    let mut c = coords[i].clone();
                    for _ in 0..v {
                        c = base.frobenius_inv(&c)?;
                    }
                    ucoords.push(c);
                }
                ucoords.resize(*len, base.zero());
                Ok((v as u32, self.witt_from_coords(&ucoords)?))
            }
        }
    }

    /// Nilpotency degree of the maximal ideal of a chain ring (r for Z/p^r and
    /// W_r, 1 for fields).
    pub fn chain_length(&self) -> Result<u32> {
        match &*self.0 {
            RingRepr::Zmod { prime_power, .. } => prime_power
                .map(|(_, r)| r)
                .ok_or_else(|| Error::unsupported("not a chain ring")),
            RingRepr::Quot { .. } => Ok(1),
            RingRepr::Witt { len, .. } => Ok(*len as u32),
        }
    }

    // ---------------------------------------------------------------- validation

    /// Exhaustive ring-axiom check for rings with at most `budget` elements.
    /// Results are memoized per ring descriptor.
    pub fn validate_axioms(&self, budget: u128) -> Result<()> {
        static CHECKED: Mutex<Option<HashMap<String, bool>>> = Mutex::new(None);
        let key = self.describe();
        {
            let mut guard = CHECKED.lock().unwrap();
            let map = guard.get_or_insert_with(HashMap::new);
            if let Some(&ok) = map.get(&key) {
                return if ok {
                    Ok(())
                } else {
                    Err(Error::structure("ring axioms failed"))
                };
            }
        }
        let n = self.order();
        if n > budget {
            return Err(Error::budget(format!(
                "ring has {n} elements, above the axiom-check budget {budget}"
            )));
        }
        let n = n as usize;
        let elems: Vec<Elem> = self.elements().collect();
        let idx = |e: &Elem| self.elem_index(e) as usize;
        let mut addt = vec![0u32; n * n];
        let mut mult = vec![0u32; n * n];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                addt[i * n + j] = idx(&self.add(a, b)) as u32;
                mult[i * n + j] = idx(&self.mul(a, b)) as u32;
            }
        }
        let zero = idx(&self.zero());
        let one = idx(&self.one());
        let mut ok = true;
        'outer: for i in 0..n {
            if addt[i * n + zero] as usize != i
                || mult[i * n + one] as usize != i
                || mult[i * n + zero] as usize != zero
            {
                ok = false;
                break;
            }
            let neg = idx(&self.neg(&elems[i]));
            if addt[i * n + neg] as usize != zero {
                ok = false;
                break;
            }
            for j in 0..n {
                if addt[i * n + j] != addt[j * n + i] || mult[i * n + j] != mult[j * n + i] {
                    ok = false;
                    break 'outer;
                }
                for k in 0..n {
                    let aa = addt[addt[i * n + j] as usize * n + k];
                    let bb = addt[i * n + addt[j * n + k] as usize];
                    if aa != bb {
                        ok = false;
                        break 'outer;
                    }
                    let ma = mult[mult[i * n + j] as usize * n + k];
                    let mb = mult[i * n + mult[j * n + k] as usize];
                    if ma != mb {
                        ok = false;
                        break 'outer;
                    }
                    // distributivity: i*(j+k) = i*j + i*k
                    let d1 = mult[i * n + addt[j * n + k] as usize];
                    let d2 = addt[mult[i * n + j] as usize * n + mult[i * n + k] as usize];
                    if d1 != d2 {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        let mut guard = CHECKED.lock().unwrap();
        guard.get_or_insert_with(HashMap::new).insert(key, ok);
        if ok {
            Ok(())
        } else {
            Err(Error::structure("ring axioms failed"))
        }
    }
}

fn tails_to_raw(basis: &[Vec<u32>], tails: &[Vec<u64>]) -> Vec<Vec<(Vec<u32>, u64)>> {
    tails
        .iter()
        .map(|t| {
            t.iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (basis[i].clone(), c))
                .collect()
        })
        .collect()
}

fn mulmod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn inv_mod(a: u64, n: u64) -> Option<u64> {
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (n as i128, (a % n) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(((t % n as i128 + n as i128) % n as i128) as u64)
}

// ------------------------------------------------------------------ Witt laws

/// w_n(z) = Σ_{i≤n} p^i z_i^{p^{n-i}} evaluated on integer lifts.
pub fn ghost_of_lifts(lifts: &[BigInt], len: usize, p: u64) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(len);
    for n in 0..len {
        let mut w = BigInt::zero();
        let mut pi = BigInt::one();
        for i in 0..=n {
            let e = (p as u32).pow((n - i) as u32);
            w += &pi * lifts[i].pow(e);
            pi *= p;
        }
        out.push(w);
    }
    out
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut num = BigInt::one();
    for i in 0..k {
        num *= n - i;
    }
    let mut den = BigInt::one();
    for i in 1..=k {
        den *= i;
    }
    num / den
}

fn witt_add(base: &Ring, len: usize, p: u64, x: &Elem, y: &Elem) -> Elem {
    let bw = base.width();
    let xc: Vec<Elem> = (0..len).map(|i| Elem(x.0[i * bw..(i + 1) * bw].to_vec())).collect();
    let yc: Vec<Elem> = (0..len).map(|i| Elem(y.0[i * bw..(i + 1) * bw].to_vec())).collect();
    let out = match len {
        1 => vec![base.add(&xc[0], &yc[0])],
        2 => {
            let c0 = base.add(&xc[0], &yc[0]);
            // a1 + b1 - Σ_{i=1}^{p-1} (C(p,i)/p) a0^i b0^{p-i}
            let mut c1 = base.add(&xc[1], &yc[1]);
            for i in 1..p {
                let coeff = binomial(p, i) / p;
                let term = base.mul(&base.pow(&xc[0], i), &base.pow(&yc[0], p - i));
                c1 = base.sub(&c1, &base.mul(&base.from_bigint(&coeff), &term));
            }
            vec![c0, c1]
        }
        _ => eval_law(base, &witt_laws(p, len).add, &xc, &yc),
    };
    flatten(out)
}

fn witt_mul(base: &Ring, len: usize, p: u64, x: &Elem, y: &Elem) -> Elem {
    let bw = base.width();
    let xc: Vec<Elem> = (0..len).map(|i| Elem(x.0[i * bw..(i + 1) * bw].to_vec())).collect();
    let yc: Vec<Elem> = (0..len).map(|i| Elem(y.0[i * bw..(i + 1) * bw].to_vec())).collect();
    let out = match len {
        1 => vec![base.mul(&xc[0], &yc[0])],
        2 => {
            let c0 = base.mul(&xc[0], &yc[0]);
            // a0^p b1 + a1 b0^p + p a1 b1
            let t1 = base.mul(&base.pow(&xc[0], p), &yc[1]);
            let t2 = base.mul(&xc[1], &base.pow(&yc[0], p));
            let t3 = base.mul_u64(p, &base.mul(&xc[1], &yc[1]));
            vec![c0, base.add(&base.add(&t1, &t2), &t3)]
        }
        _ => eval_law(base, &witt_laws(p, len).mul, &xc, &yc),
    };
    flatten(out)
}

fn witt_neg(base: &Ring, len: usize, p: u64, x: &Elem) -> Elem {
    let bw = base.width();
    let xc: Vec<Elem> = (0..len).map(|i| Elem(x.0[i * bw..(i + 1) * bw].to_vec())).collect();
    let out = match len {
        1 => vec![base.neg(&xc[0])],
        2 if p == 2 => {
            // ghost-solved: N = (-a0, -a1 - a0^2)
            let n0 = base.neg(&xc[0]);
            let n1 = base.sub(&base.neg(&xc[1]), &base.mul(&xc[0], &xc[0]));
            vec![n0, n1]
        }
        2 => vec![base.neg(&xc[0]), base.neg(&xc[1])],
        _ => {
            let zero: Vec<Elem> = (0..len).map(|_| base.zero()).collect();
            eval_law(base, &witt_laws(p, len).neg, &xc, &zero)
        }
    };
    flatten(out)
}

fn flatten(coords: Vec<Elem>) -> Elem {
    let mut v = Vec::new();
    for c in coords {
        v.extend(c.0);
    }
    Elem(v)
}

/// Sparse polynomial over ℤ in 2r variables x_0..x_{r-1}, y_0..y_{r-1}.
#[derive(Clone, Debug, Default)]
struct IntPoly {
    terms: BTreeMap<Vec<u16>, BigInt>,
}

impl IntPoly {
    fn zero() -> Self {
        IntPoly::default()
    }
    fn var(idx: usize, nvars: usize) -> Self {
        let mut e = vec![0u16; nvars];
        e[idx] = 1;
        let mut t = BTreeMap::new();
        t.insert(e, BigInt::one());
        IntPoly { terms: t }
    }
    fn constant(c: BigInt, nvars: usize) -> Self {
        let mut t = BTreeMap::new();
        if !c.is_zero() {
            t.insert(vec![0u16; nvars], c);
        }
        IntPoly { terms: t }
    }
    fn add(&self, other: &Self) -> Self {
        let mut t = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = t.entry(e.clone()).or_insert_with(BigInt::zero);
            *entry += c;
            if entry.is_zero() {
                t.remove(e);
            }
        }
        IntPoly { terms: t }
    }
    fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&BigInt::from(-1)))
    }
    fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return IntPoly::zero();
        }
        IntPoly {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }
    fn mul(&self, other: &Self) -> Self {
        let mut t: BTreeMap<Vec<u16>, BigInt> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u16> = e1.iter().zip(e2.iter()).map(|(a, b)| a + b).collect();
                let entry = t.entry(e).or_insert_with(BigInt::zero);
                *entry += c1 * c2;
            }
        }
        t.retain(|_, c| !c.is_zero());
        IntPoly { terms: t }
    }
    fn pow(&self, e: u32) -> Self {
        let nvars = self.terms.keys().next().map(|k| k.len()).unwrap_or(0);
        let mut acc = IntPoly::constant(BigInt::one(), nvars.max(1));
        // fix arity of the constant if the poly is zero
        if self.terms.is_empty() {
            return if e == 0 { acc } else { IntPoly::zero() };
        }
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
    fn div_exact(&self, k: &BigInt) -> Self {
        IntPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let (q, r) = (c / k, c % k);
                    assert!(r.is_zero(), "inexact division in Witt law solver");
                    (e.clone(), q)
                })
                .collect(),
        }
    }
}

struct WittLaws {
    add: Vec<IntPoly>,
    mul: Vec<IntPoly>,
    neg: Vec<IntPoly>,
}

/// Solve the ghost equations for the universal sum/product/negation laws.
fn witt_laws(p: u64, r: usize) -> Arc<WittLaws> {
    static CACHE: Mutex<Option<HashMap<(u64, usize), Arc<WittLaws>>>> = Mutex::new(None);
    let mut guard = CACHE.lock().unwrap();
    let map = guard.get_or_insert_with(HashMap::new);
    if let Some(l) = map.get(&(p, r)) {
        return l.clone();
    }
    let nvars = 2 * r;
    let xs: Vec<IntPoly> = (0..r).map(|i| IntPoly::var(i, nvars)).collect();
    let ys: Vec<IntPoly> = (0..r).map(|i| IntPoly::var(r + i, nvars)).collect();
    let ghost = |zs: &[IntPoly], n: usize| -> IntPoly {
        let mut w = IntPoly::zero();
        let mut pi = BigInt::one();
        for i in 0..=n {
            let e = (p as u32).pow((n - i) as u32);
            w = w.add(&zs[i].pow(e).scale(&pi));
            pi *= p;
        }
        w
    };
    let solve = |target: &dyn Fn(usize) -> IntPoly| -> Vec<IntPoly> {
        let mut laws: Vec<IntPoly> = Vec::with_capacity(r);
        for n in 0..r {
            let mut rhs = target(n);
            let mut pi = BigInt::one();
            for (i, s) in laws.iter().enumerate().take(n) {
                let e = (p as u32).pow((n - i) as u32);
                rhs = rhs.sub(&s.pow(e).scale(&pi));
                pi *= p;
            }
            let pn = BigInt::from(p).pow(n as u32);
            laws.push(rhs.div_exact(&pn));
        }
        laws
    };
    let add = solve(&|n| ghost(&xs, n).add(&ghost(&ys, n)));
    let mul = solve(&|n| ghost(&xs, n).mul(&ghost(&ys, n)));
    let neg = solve(&|n| ghost(&xs, n).scale(&BigInt::from(-1)));
    let laws = Arc::new(WittLaws { add, mul, neg });
    map.insert((p, r), laws.clone());
    laws
}

fn eval_law(base: &Ring, polys: &[IntPoly], xc: &[Elem], yc: &[Elem]) -> Vec<Elem> {
    let r = xc.len();
    polys
        .iter()
        .map(|poly| {
            let mut acc = base.zero();
            for (e, c) in &poly.terms {
                let mut term = base.from_bigint(c);
                for (i, &exp) in e.iter().enumerate() {
                    if exp == 0 {
                        continue;
                    }
                    let v = if i < r { &xc[i] } else { &yc[i - r] };
                    term = base.mul(&term, &base.pow(v, exp as u64));
                }
                acc = base.add(&acc, &term);
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w2(p: u64) -> Ring {
        Ring::witt(Ring::zmod(p), 2, p).unwrap()
    }

    #[test]
    fn witt_add_matches_spec_examples() {
        let w3 = w2(3);
        let x = Elem(vec![1, 0]);
        assert_eq!(w3.add(&x, &x), Elem(vec![2, 1]));
        let w2f2 = w2(2);
        let y = Elem(vec![1, 0]);
        assert_eq!(w2f2.add(&y, &y), Elem(vec![0, 1]));
        // additive identity
        assert_eq!(w3.add(&x, &w3.zero()), x);
    }

    #[test]
    fn witt_mul_matches_spec_examples() {
        let w5 = w2(5);
        let t2 = w5.teichmuller(&Elem(vec![2])).unwrap();
        let t4 = w5.teichmuller(&Elem(vec![4])).unwrap();
        assert_eq!(w5.mul(&t2, &t2), t4);
        // multiplicative identity
        let x = Elem(vec![3, 2]);
        assert_eq!(w5.mul(&x, &w5.one()), x);
        // V(1)^2 = 0
        let v1 = Elem(vec![0, 1]);
        assert_eq!(w5.mul(&v1, &v1), w5.zero());
    }

    #[test]
    fn teichmuller_is_multiplicative() {
        for p in [2u64, 3, 5] {
            let w = w2(p);
            let base = Ring::zmod(p);
            for a in base.elements() {
                for b in base.elements() {
                    let ab = base.mul(&a, &b);
                    let lhs = w.teichmuller(&ab).unwrap();
                    let rhs = w.mul(&w.teichmuller(&a).unwrap(), &w.teichmuller(&b).unwrap());
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn frobenius_verschiebung_composite_is_p() {
        for p in [2u64, 3, 5] {
            let w = w2(p);
            for x in w.elements() {
                let fv = w.verschiebung(&w.frobenius(&x).unwrap()).unwrap();
                let px = w.mul_u64(p, &x);
                assert_eq!(fv, px, "p = {p}, x = {x:?}");
            }
        }
    }

    #[test]
    fn ghost_is_additive_and_multiplicative_mod_guard() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [2u64, 3, 5] {
            let w = w2(p);
            for _ in 0..100 {
                let x = w.random(&mut rng);
                let y = w.random(&mut rng);
                let gx = w.ghost(&x).unwrap();
                let gy = w.ghost(&y).unwrap();
                let gs = w.ghost(&w.add(&x, &y)).unwrap();
                let gm = w.ghost(&w.mul(&x, &y)).unwrap();
                for n in 0..2usize {
                    let m = BigInt::from(p).pow(n as u32 + 1);
                    assert!(((&gx[n] + &gy[n]) - &gs[n]) % &m == BigInt::from(0));
                    assert!(((&gx[n] * &gy[n]) - &gm[n]) % &m == BigInt::from(0));
                }
            }
        }
    }

    #[test]
    fn w2_fp_isomorphic_to_z_mod_p2() {
        for p in [2u64, 3, 5] {
            let w = w2(p);
            let z = Ring::zmod(p * p);
            // x ↦ w_1(x) mod p^2
            let phi = |x: &Elem| -> u64 {
                let g = w.ghost(x).unwrap();
                let m = BigInt::from(p * p);
                let r = ((&g[1] % &m) + &m) % &m;
                r.to_u64_digits().1.first().copied().unwrap_or(0)
            };
            let mut seen = std::collections::HashSet::new();
            for x in w.elements() {
                assert!(seen.insert(phi(&x)), "phi not injective");
                for y in w.elements() {
                    assert_eq!(phi(&w.add(&x, &y)), z.add(&Elem(vec![phi(&x)]), &Elem(vec![phi(&y)])).0[0]);
                    assert_eq!(phi(&w.mul(&x, &y)), z.mul(&Elem(vec![phi(&x)]), &Elem(vec![phi(&y)])).0[0]);
                }
            }
            assert_eq!(seen.len() as u128, w.order());
        }
    }

    #[test]
    fn witt_ring_axioms_small_bases() {
        for base in [Ring::zmod(2), Ring::zmod(3), Ring::f4()] {
            let p = base.prime().unwrap();
            let w = Ring::witt(base, 2, p).unwrap();
            w.validate_axioms(512).unwrap();
        }
    }

    #[test]
    fn witt_frobenius_identity_on_fp_and_hom_on_f4() {
        for p in [2u64, 3] {
            let w = w2(p);
            for x in w.elements() {
                assert_eq!(w.frobenius(&x).unwrap(), x);
            }
        }
        let w = Ring::witt(Ring::f4(), 2, 2).unwrap();
        for x in w.elements() {
            for y in w.elements() {
                let f = |z: &Elem| w.frobenius(z).unwrap();
                assert_eq!(f(&w.add(&x, &y)), w.add(&f(&x), &f(&y)));
                assert_eq!(f(&w.mul(&x, &y)), w.mul(&f(&x), &f(&y)));
            }
        }
        // Frob(α, 0) = (α², 0) on W2(F4)
        let f4 = Ring::f4();
        let alpha = Elem(vec![0, 1]);
        let t = w.teichmuller(&alpha).unwrap();
        let expect = w.teichmuller(&f4.mul(&alpha, &alpha)).unwrap();
        assert_eq!(w.frobenius(&t).unwrap(), expect);
    }

    #[test]
    fn verschiebung_examples() {
        let w = w2(3);
        assert_eq!(w.verschiebung(&Elem(vec![1, 0])).unwrap(), Elem(vec![0, 1]));
        assert_eq!(w.verschiebung(&w.zero()).unwrap(), w.zero());
        // p·(a0,a1) = (0, a0^p) over an F_p-algebra base
        for x in w.elements() {
            let px = w.mul_u64(3, &x);
            let c = w.witt_coords(&x).unwrap();
            let base = Ring::zmod(3);
            let expect = w
                .witt_from_coords(&[base.zero(), base.pow(&c[0], 3)])
                .unwrap();
            assert_eq!(px, expect);
        }
    }

    #[test]
    fn reduction_is_surjective_ring_hom() {
        let w3 = Ring::witt(Ring::zmod(2), 3, 2).unwrap();
        let mut images = std::collections::HashSet::new();
        for x in w3.elements() {
            let (w2r, rx) = w3.witt_reduce(&x, 2).unwrap();
            images.insert(rx.clone());
            for y in w3.elements() {
                let (_, ry) = w3.witt_reduce(&y, 2).unwrap();
                let (_, rsum) = w3.witt_reduce(&w3.add(&x, &y), 2).unwrap();
                let (_, rprod) = w3.witt_reduce(&w3.mul(&x, &y), 2).unwrap();
                assert_eq!(rsum, w2r.add(&rx, &ry));
                assert_eq!(rprod, w2r.mul(&rx, &ry));
            }
        }
        assert_eq!(images.len() as u128, Ring::witt(Ring::zmod(2), 2, 2).unwrap().order());
    }

    #[test]
    fn longer_witt_laws_solve_and_match_ghost() {
        let w3 = Ring::witt(Ring::zmod(2), 3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let x = w3.random(&mut rng);
            let y = w3.random(&mut rng);
            let gx = w3.ghost(&x).unwrap();
            let gy = w3.ghost(&y).unwrap();
            let gs = w3.ghost(&w3.add(&x, &y)).unwrap();
            for n in 0..3usize {
                let m = BigInt::from(2u64).pow(n as u32 + 1);
                assert!(((&gx[n] + &gy[n]) - &gs[n]) % &m == BigInt::from(0));
            }
        }
        w3.validate_axioms(512).unwrap();
    }

    #[test]
    fn inverse_in_witt_and_quot_rings() {
        let w = Ring::witt(Ring::f4(), 2, 2).unwrap();
        for x in w.elements() {
            let c = w.witt_coords(&x).unwrap();
            let unit = !Ring::f4().is_zero(&c[0]);
            assert_eq!(w.inv(&x).is_some(), unit);
        }
        let z9 = Ring::zmod(9);
        assert_eq!(z9.inv(&Elem(vec![2])), Some(Elem(vec![5])));
        assert_eq!(z9.inv(&Elem(vec![3])), None);
    }

    #[test]
    fn val_unit_decomposition() {
        let z9 = Ring::zmod(9);
        let (v, u) = z9.val_unit(&Elem(vec![6])).unwrap();
        assert_eq!(v, 1);
        assert_eq!(z9.mul(&z9.pow(&Elem(vec![3]), v as u64), &u), Elem(vec![6]));
        let w = Ring::witt(Ring::f4(), 2, 2).unwrap();
        for x in w.elements() {
            let (v, u) = w.val_unit(&x).unwrap();
            if w.is_zero(&x) {
                assert_eq!(v, 2);
                continue;
            }
            let p_to_v = w.pow(&w.from_u64(2), v as u64);
            assert_eq!(w.mul(&p_to_v, &u), x, "x = {x:?}, v = {v}, u = {u:?}");
            assert!(v == 0 && w.is_unit(&u) || v > 0);
        }
    }
}
