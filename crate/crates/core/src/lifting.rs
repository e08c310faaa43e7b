//! The flag-lifting pipeline: complete flags as upper-triangular semilinear
//! modules, lifting extensions with prescribed or free rank-1 kernel, the
//! glueing obstruction c₂ and its mod-p reduction c₁ with j_*(c₁) = c₂, and
//! the stepwise uplift of a mod-p flag to mod p².

use crate::cohomology::{
    cup11, is_cocycle, restrict_scalars, restrict_vector, unrestrict_vector, Cochain,
    CohomologyGroup, GMap, GModule, GPairing, ShortExact,
};
use crate::error::{Error, Result};
use crate::extension::{quotient_by_summand, ExtensionData};
use crate::group::FiniteGroup;
use crate::matrix::Mat;
use crate::ring::{Elem, Ring};
use crate::semilinear::{LevelPair, PermutationModule, RingAction, SemilinearModule};
use serde::Serialize;

/// A complete flag of semilinear modules: the module matrices are upper
/// triangular with unit diagonals, V_i = span(e_1..e_i).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagRep {
    pub module: SemilinearModule,
}

impl FlagRep {
    pub fn new(module: SemilinearModule) -> Result<FlagRep> {
        let ring = &module.ring;
        for g in module.group.elements() {
            let m = &module.mats[g];
            for i in 0..module.rank {
                for j in 0..i {
                    if !ring.is_zero(&m[(i, j)]) {
                        return Err(Error::structure("flag matrices must be upper triangular"));
                    }
                }
                if !ring.is_unit(&m[(i, i)]) {
                    return Err(Error::structure("graded pieces must act by units"));
                }
            }
        }
        Ok(FlagRep { module })
    }

    pub fn empty(ring: &Ring, group: &FiniteGroup, action: &RingAction) -> FlagRep {
        FlagRep {
            module: SemilinearModule::new(
                ring,
                group,
                action,
                vec![Mat::zeros(ring, 0, 0); group.order()],
            )
            .unwrap(),
        }
    }

    pub fn rank(&self) -> usize {
        self.module.rank
    }

    pub fn ring(&self) -> &Ring {
        &self.module.ring
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.module.group
    }

    /// Block module V_hi / V_lo (0-indexed boundaries, lo < hi ≤ rank).
    pub fn quotient_block(&self, lo: usize, hi: usize) -> SemilinearModule {
        let mats = self
            .module
            .mats
            .iter()
            .map(|m| m.submatrix(lo..hi, lo..hi))
            .collect();
        SemilinearModule::new(&self.module.ring, &self.module.group, &self.module.action, mats)
            .expect("upper-triangular blocks are closed")
    }

    pub fn submodule(&self, k: usize) -> SemilinearModule {
        self.quotient_block(0, k)
    }

    /// The graded line L_i (1-indexed).
    pub fn line(&self, i: usize) -> SemilinearModule {
        self.quotient_block(i - 1, i)
    }

    pub fn line_units(&self, i: usize) -> Vec<Elem> {
        self.module
            .mats
            .iter()
            .map(|m| m[(i - 1, i - 1)].clone())
            .collect()
    }

    pub fn truncate(&self, k: usize) -> FlagRep {
        FlagRep {
            module: self.submodule(k),
        }
    }

    pub fn reduce(&self, pair: &LevelPair) -> Result<FlagRep> {
        Ok(FlagRep {
            module: pair.reduce_module(&self.module)?,
        })
    }

    /// 0 → V_{k-1} → V_k → L_k → 0 (1-indexed k).
    pub fn sub_extension(&self, k: usize) -> Result<ExtensionData> {
        let ring = &self.module.ring;
        let sub = self.submodule(k - 1);
        let total = self.submodule(k);
        let quot = self.line(k);
        let mut incl = Mat::zeros(ring, k, k - 1);
        for i in 0..k - 1 {
            incl[(i, i)] = ring.one();
        }
        let mut proj = Mat::zeros(ring, 1, k);
        proj[(0, k - 1)] = ring.one();
        ExtensionData::new(sub, total, quot, incl, proj)
    }

    /// 0 → L_d → V_{d+1}/V_{d-1} → L_{d+1} → 0 (1-indexed d).
    pub fn nat_two_step(&self, d: usize) -> Result<ExtensionData> {
        let ring = &self.module.ring;
        let sub = self.line(d);
        let total = self.quotient_block(d - 1, d + 1);
        let quot = self.line(d + 1);
        let mut incl = Mat::zeros(ring, 2, 1);
        incl[(0, 0)] = ring.one();
        let mut proj = Mat::zeros(ring, 1, 2);
        proj[(0, 1)] = ring.one();
        ExtensionData::new(sub, total, quot, incl, proj)
    }

    /// The homomorphism G → B_d(R) as matrices (the module matrices).
    pub fn borel_cocycle(&self) -> Vec<Mat> {
        self.module.mats.clone()
    }
}

/// Tensor a module with the inverse of a rank-1 character (unit per element).
pub fn twist_by_inverse_units(m: &SemilinearModule, units: &[Elem]) -> SemilinearModule {
    let ring = &m.ring;
    let mats = m
        .mats
        .iter()
        .zip(units.iter())
        .map(|(mat, u)| {
            let uinv = ring.inv(u).expect("character values must be units");
            mat.scale(&uinv)
        })
        .collect();
    SemilinearModule::new(ring, &m.group, &m.action, mats).expect("character twist is a module")
}

// ------------------------------------------------------- affine F_p solver

/// Solve an affine system over the residue field by probing: `eval` maps a
/// correction vector (unknowns, as low-ring elements) to equation values in
/// the high ring; all values must be ≡ 0 mod p for solvability, and the map
/// must be affine in the corrections (true whenever corrections enter through
/// p-multiples, since p² = 0).
pub fn affine_probe_solve(
    pair: &LevelPair,
    num_unknowns: usize,
    eval: &dyn Fn(&[Elem]) -> Vec<Elem>,
) -> Result<Option<Vec<Elem>>> {
    let low = &pair.low;
    let fp = Ring::zmod(pair.p);
    let width = low.width();
    let zero_vec = vec![low.zero(); num_unknowns];
    let e0 = eval(&zero_vec);
    for v in &e0 {
        if !low.is_zero(&pair.reduce(v)) {
            return Ok(None);
        }
    }
    let extract = |vals: &[Elem]| -> Result<Vec<Elem>> {
        let mut out = Vec::with_capacity(vals.len() * width);
        for v in vals {
            let lowv = pair.v_extract(v)?;
            out.extend(restrict_vector(low, &[lowv])?.into_iter().map(|x| fp.from_u64(x)));
        }
        Ok(out)
    };
    let b0 = extract(&e0)?;
    let rows = b0.len();
    let cols = num_unknowns * width;
    let mut mat = Mat::zeros(&fp, rows, cols);
    for k in 0..num_unknowns {
        for w in 0..width {
            let mut probe = zero_vec.clone();
            let mut basis = low.zero();
            basis.0[w] = 1;
            probe[k] = basis;
            let ek = extract(&eval(&probe))?;
            for (i, (a, b)) in ek.iter().zip(b0.iter()).enumerate() {
                mat[(i, k * width + w)] = fp.sub(a, b);
            }
        }
    }
    let rhs: Vec<Elem> = b0.iter().map(|x| fp.neg(x)).collect();
    match crate::matrix::solve(&mat, &rhs)? {
        None => Ok(None),
        Some(x) => {
            // reassemble low-ring elements
            let mut out = Vec::with_capacity(num_unknowns);
            for k in 0..num_unknowns {
                let coords: Vec<u64> = (0..width).map(|w| x[k * width + w].0[0]).collect();
                out.push(unrestrict_vector(low, &coords)?[0].clone());
            }
            // validated: plug back in
            let check = eval(&out);
            if check.iter().any(|v| !pair.high.is_zero(v)) {
                return Err(Error::structure("affine solver produced a non-solution"));
            }
            Ok(Some(out))
        }
    }
}

// --------------------------------------------------- lifting extensions (§-level)

pub enum LiftOutcome {
    Lifted(ExtensionData),
    Obstructed(ObstructionClass),
}

/// A degree-1 or degree-2 obstruction class with its ambient group.
pub struct ObstructionClass {
    pub degree: usize,
    pub class_coords: Vec<u64>,
    pub cocycle: Cochain,
    pub coefficients: GModule,
}

impl ObstructionClass {
    pub fn vanishes(&self) -> bool {
        self.class_coords.iter().all(|&c| c == 0)
    }
}

fn check_reduction_matches(
    pair: &LevelPair,
    high: &SemilinearModule,
    low: &SemilinearModule,
    what: &str,
) -> Result<()> {
    if pair.reduce_module(high)? != *low {
        return Err(Error::precondition(format!(
            "reduction of the prescribed {what} does not match the mod-p data"
        )));
    }
    Ok(())
}

/// Lift an extension 0 → L → V → Q → 0 of low-level modules (rank-1 kernel L)
/// to the high level, with both the kernel lift and the ambient lift
/// prescribed. Returns the lifted extension or the obstruction class in
/// H¹(G, Hom(L₁, V₁)^{(1)}).
pub fn lift_extension_prescribed(
    pair: &LevelPair,
    e_low: &ExtensionData,
    v_high: &SemilinearModule,
    l_high: &SemilinearModule,
) -> Result<LiftOutcome> {
    if e_low.sub.rank != 1 {
        return Err(Error::precondition("kernel must have rank 1"));
    }
    check_reduction_matches(pair, v_high, &e_low.total, "ambient lift")?;
    check_reduction_matches(pair, l_high, &e_low.sub, "kernel lift")?;
    let group = e_low.total.group.clone();
    let gens = group.generators().to_vec();
    let n = v_high.rank;
    let lift0 = pair.lift_mat(&e_low.incl);
    // unknowns: one correction column X ∈ low^n; i = lift0 + V(X)
    let eval = |x: &[Elem]| -> Vec<Elem> {
        let mut i2 = lift0.clone();
        for r in 0..n {
            i2[(r, 0)] = pair.high.add(&i2[(r, 0)], &pair.v_embed(&x[r]));
        }
        let mut out = Vec::new();
        for &g in &gens {
            // M^V_g σ_g(i) − i·M^L_g
            let lhs = v_high.mats[g].matmul(&v_high.action.apply_mat(g, &i2));
            let rhs = i2.matmul(&l_high.mats[g]);
            let diff = lhs.sub(&rhs);
            for r in 0..n {
                out.push(diff[(r, 0)].clone());
            }
        }
        out
    };
    match affine_probe_solve(pair, n, &eval)? {
        Some(x) => {
            let mut incl2 = lift0.clone();
            for r in 0..n {
                incl2[(r, 0)] = pair.high.add(&incl2[(r, 0)], &pair.v_embed(&x[r]));
            }
            // the lift is automatically an embedding: build the quotient
            let (quot2, projq, _sect) = quotient_by_summand(v_high, &incl2)?;
            let e = ExtensionData::new(l_high.clone(), v_high.clone(), quot2, incl2, projq)?;
            Ok(LiftOutcome::Lifted(e))
        }
        None => {
            // deviation cocycle of the torsor of non-equivariant lifts, valued
            // in Hom(L₁, V₁)^{(1)}
            let hom_mod = e_low.sub.hom(&e_low.total).frobenius_twist(1)?;
            let coeff = restrict_scalars(&hom_mod)?;
            let mut values = Vec::with_capacity(group.order());
            for g in group.elements() {
                // (g·i0) − i0, divided by p
                let gi = v_high.mats[g]
                    .matmul(&v_high.action.apply_mat(g, &lift0))
                    .matmul(&pair.teich_mat(&Mat::identity(&pair.low, 1)))
                    .matmul(&invert_line(&pair.high, &l_high.mats[g]));
                let diff = gi.sub(&lift0);
                let mut lowcol = Vec::with_capacity(n);
                for r in 0..n {
                    lowcol.push(pair.v_extract(&diff[(r, 0)])?);
                }
                values.push(restrict_vector(&pair.low, &lowcol)?);
            }
            let c = Cochain { degree: 1, values };
            if !is_cocycle(&coeff, &c) {
                return Err(Error::structure("deviation is not a cocycle"));
            }
            let h1 = CohomologyGroup::compute(&coeff, 1, 1 << 22)?;
            let class_coords = h1.class_coords(&c)?;
            if class_coords.iter().all(|&x| x == 0) {
                return Err(Error::structure(
                    "obstruction vanishes but the linear solve failed",
                ));
            }
            Ok(LiftOutcome::Obstructed(ObstructionClass {
                degree: 1,
                class_coords,
                cocycle: c,
                coefficients: coeff,
            }))
        }
    }
}

fn invert_line(ring: &Ring, m: &Mat) -> Mat {
    let mut out = Mat::zeros(ring, 1, 1);
    out[(0, 0)] = ring.inv(&m[(0, 0)]).expect("line action must be a unit");
    out
}

/// Lift 0 → L → V → Q → 0 without prescribing the kernel lift: searches the
/// torsor under Hom(L₁, Q₁)^{(1)}. On success the returned extension carries
/// whatever kernel lift arises; `kernel_is_teichmuller` reports whether it is
/// the Teichmüller lift on the nose.
pub struct FreeLift {
    pub extension: ExtensionData,
    pub kernel_is_teichmuller: bool,
}

pub fn lift_extension_free(
    pair: &LevelPair,
    e_low: &ExtensionData,
    v_high: &SemilinearModule,
) -> Result<std::result::Result<FreeLift, ObstructionClass>> {
    if e_low.sub.rank != 1 {
        return Err(Error::precondition("kernel must have rank 1"));
    }
    check_reduction_matches(pair, v_high, &e_low.total, "ambient lift")?;
    let group = e_low.total.group.clone();
    let gens = group.generators().to_vec();
    let n = v_high.rank;
    let lift0 = pair.lift_mat(&e_low.incl);
    // kernel baseline: Teichmüller lift of the low line
    let beta: Vec<Elem> = group
        .elements()
        .map(|g| e_low.sub.mats[g][(0, 0)].clone())
        .collect();
    // unknowns: X ∈ low^n (column correction) and ζ_gen ∈ low per generator
    // (kernel unit correction); u(g_gen) = τ(β) + V(ζ)
    let eval = |x: &[Elem]| -> Vec<Elem> {
        let mut i2 = lift0.clone();
        for r in 0..n {
            i2[(r, 0)] = pair.high.add(&i2[(r, 0)], &pair.v_embed(&x[r]));
        }
        let mut out = Vec::new();
        for (k, &g) in gens.iter().enumerate() {
            let u = pair
                .high
                .add(&pair.teich(&beta[g]), &pair.v_embed(&x[n + k]));
            let lhs = v_high.mats[g].matmul(&v_high.action.apply_mat(g, &i2));
            let mut rhs = i2.clone();
            for r in 0..n {
                rhs[(r, 0)] = pair.high.mul(&rhs[(r, 0)], &u);
            }
            let diff = lhs.sub(&rhs);
            for r in 0..n {
                out.push(diff[(r, 0)].clone());
            }
        }
        out
    };
    match affine_probe_solve(pair, n + gens.len(), &eval)? {
        Some(x) => {
            let mut incl2 = lift0.clone();
            for r in 0..n {
                incl2[(r, 0)] = pair.high.add(&incl2[(r, 0)], &pair.v_embed(&x[r]));
            }
            // recover the full unit cocycle from the witness via a retraction
            let retr_col = {
                // a row vector r with r·incl2 = 1
                let it = incl2.transpose();
                let one = vec![pair.high.one()];
                crate::matrix::solve(&it, &one)?
                    .ok_or_else(|| Error::structure("lift is not split injective"))?
            };
            let units: Vec<Elem> = group
                .elements()
                .map(|g| {
                    let gi = v_high.mats[g].matmul(&v_high.action.apply_mat(g, &incl2));
                    // u(g) = r · (g·i)
                    let mut acc = pair.high.zero();
                    for r in 0..n {
                        acc = pair.high.add(&acc, &pair.high.mul(&retr_col[r], &gi[(r, 0)]));
                    }
                    acc
                })
                .collect();
            let l_high = SemilinearModule::new(
                &pair.high,
                &group,
                &v_high.action,
                units
                    .iter()
                    .map(|u| {
                        let mut m = Mat::zeros(&pair.high, 1, 1);
                        m[(0, 0)] = u.clone();
                        m
                    })
                    .collect(),
            )?;
            check_reduction_matches(pair, &l_high, &e_low.sub, "derived kernel")?;
            let teich = units
                .iter()
                .zip(beta.iter())
                .all(|(u, b)| *u == pair.teich(b));
            let (quot2, projq, _s) = quotient_by_summand(v_high, &incl2)?;
            let e = ExtensionData::new(l_high, v_high.clone(), quot2, incl2, projq)?;
            Ok(Ok(FreeLift {
                extension: e,
                kernel_is_teichmuller: teich,
            }))
        }
        None => {
            // obstruction in H¹(G, Hom(L₁, Q₁)^{(1)}): push the deviation along π
            let hom_mod = e_low.sub.hom(&e_low.quot).frobenius_twist(1)?;
            let coeff = restrict_scalars(&hom_mod)?;
            let q = e_low.quot.rank;
            let mut values = Vec::with_capacity(group.order());
            for g in group.elements() {
                let gi = v_high.mats[g]
                    .matmul(&v_high.action.apply_mat(g, &lift0))
                    .matmul(&invert_line(
                        &pair.high,
                        &pair.teich_mat(&e_low.sub.mats[g]),
                    ));
                let diff = gi.sub(&lift0);
                let mut lowcol = Vec::with_capacity(n);
                for r in 0..n {
                    lowcol.push(pair.v_extract(&diff[(r, 0)])?);
                }
                // push along proj: Q-valued column
                let proj_low = &e_low.proj;
                let mut qcol = Vec::with_capacity(q);
                for i in 0..q {
                    let mut acc = pair.low.zero();
                    for r in 0..n {
                        acc = pair
                            .low
                            .add(&acc, &pair.low.mul(&proj_low[(i, r)], &lowcol[r]));
                    }
                    // Frobenius twist bookkeeping: apply σ-free coordinate map;
                    // values land in Q₁^{(1)} which shares coordinates with Q₁
                    qcol.push(acc);
                }
                values.push(restrict_vector(&pair.low, &qcol)?);
            }
            let c = Cochain { degree: 1, values };
            if !is_cocycle(&coeff, &c) {
                return Err(Error::structure("free-lift deviation is not a cocycle"));
            }
            let h1 = CohomologyGroup::compute(&coeff, 1, 1 << 22)?;
            let class_coords = h1.class_coords(&c)?;
            if class_coords.iter().all(|&x| x == 0) {
                return Err(Error::structure(
                    "free-lift obstruction vanishes but the solve failed",
                ));
            }
            Ok(Err(ObstructionClass {
                degree: 1,
                class_coords,
                cocycle: c,
                coefficients: coeff,
            }))
        }
    }
}

// -------------------------------------------------------------- glueing (§-level)

pub struct GlueObstruction {
    pub h2: CohomologyGroup,
    pub c2: Cochain,
    pub class_coords: Vec<u64>,
}

impl GlueObstruction {
    pub fn vanishes(&self) -> bool {
        self.class_coords.iter().all(|&c| c == 0)
    }
}

/// Obstruction to glueing E: 0 → V_{d-1} → V_d → L_d → 0 with
/// P: 0 → L_d → P → L_{d+1} → 0: the cup product [E] ∪ [P] under composition.
pub fn glue_obstruction(
    e: &ExtensionData,
    p_ext: &ExtensionData,
    budget: usize,
) -> Result<GlueObstruction> {
    if e.quot != p_ext.sub {
        return Err(Error::structure("shared module mismatch: quot(E) ≠ sub(P)"));
    }
    if e.ring().width() != 1 {
        return Err(Error::unsupported(
            "glue obstruction implemented over Z/p^r coefficient rings",
        ));
    }
    let hom_e = restrict_scalars(&e.quot.hom(&e.sub))?;
    let hom_p = restrict_scalars(&p_ext.quot.hom(&p_ext.sub))?;
    let hom_t = restrict_scalars(&p_ext.quot.hom(&e.sub))?;
    let pairing = GPairing::composition(
        &hom_e,
        &hom_p,
        &hom_t,
        e.sub.rank,
        e.quot.rank,
        p_ext.quot.rank,
    )?;
    let a = e.class_cocycle()?;
    let b = p_ext.class_cocycle()?;
    let c2 = cup11(&pairing, &a, &b);
    let h2 = CohomologyGroup::compute(&hom_t, 2, budget)?;
    let class_coords = h2.class_coords(&c2)?;
    Ok(GlueObstruction {
        h2,
        c2,
        class_coords,
    })
}

/// Serializable obstruction summary for one pipeline stage.
#[derive(Clone, Debug, Serialize)]
pub struct ObstructionReport {
    pub stage: usize,
    pub verdict: String,
    pub ambient_rank: Option<usize>,
    pub c2_class: Option<Vec<u64>>,
    pub c2_vanishes: Option<bool>,
    pub c1_class: Option<Vec<u64>>,
    pub c1_vanishes: Option<bool>,
    /// dense cocycle table of c₁ (tuple-major), when computed
    pub c1_cocycle: Option<Vec<Vec<u64>>>,
    pub note: String,
}

impl ObstructionReport {
    fn empty(stage: usize) -> ObstructionReport {
        ObstructionReport {
            stage,
            verdict: String::new(),
            ambient_rank: None,
            c2_class: None,
            c2_vanishes: None,
            c1_class: None,
            c1_vanishes: None,
            c1_cocycle: None,
            note: String::new(),
        }
    }
}

pub enum UpliftStepOutcome {
    Lifted {
        flag: FlagRep,
        report: ObstructionReport,
    },
    Obstructed(ObstructionReport),
}

/// One viable way to extend the flag by a column: a line lift, a P-cochain
/// class representative, and the solved witness flag.
pub struct StepCandidate {
    pub flag: FlagRep,
    pub report: ObstructionReport,
}

/// Witness solver with the candidate pinned: the new line units and the
/// (d, d+1)-entry are fixed, the remaining column entries are solved over the
/// residue field. For d = 0 and d = 1 nothing (or only the pin) remains free.
fn solve_flag_column_pinned(
    pair: &LevelPair,
    flag_low: &FlagRep,
    flag_high_d: &FlagRep,
    l2_units: &[Elem],
    z_p: Option<&[Elem]>,
) -> Result<Option<FlagRep>> {
    let group = flag_low.group().clone();
    let d1 = flag_low.rank();
    let d = d1 - 1;
    let n = group.order();
    let free = if z_p.is_some() { d.saturating_sub(1) } else { d };
    let b_col: Vec<Vec<Elem>> = group
        .elements()
        .map(|g| {
            (0..d)
                .map(|i| flag_low.module.mats[g][(i, d)].clone())
                .collect()
        })
        .collect();
    let assemble = |x: &[Elem], g: usize| -> (Vec<Elem>, Elem) {
        let mut w: Vec<Elem> = (0..free)
            .map(|i| {
                pair.high.add(
                    &pair.lift_any(&b_col[g][i]),
                    &pair.v_embed(&x[g * free + i]),
                )
            })
            .collect();
        if let Some(zp) = z_p {
            w.push(zp[g].clone());
        }
        (w, l2_units[g].clone())
    };
    let eval = |x: &[Elem]| -> Vec<Elem> {
        let mut out = Vec::new();
        let (w_e, _) = assemble(x, group.id());
        for v in &w_e {
            out.push(v.clone());
        }
        let act = &flag_high_d.module.action;
        for g in group.elements() {
            for h in group.elements() {
                let gh = group.mul(g, h);
                let (w_g, _) = assemble(x, g);
                let (w_h, _) = assemble(x, h);
                let (w_gh, _) = assemble(x, gh);
                // w(gh) = C_g σ_g(w(h)) + w(g)·σ_g(u(h))
                let c_g = &flag_high_d.module.mats[g];
                let sw: Vec<Elem> = w_h.iter().map(|v| act.apply(g, v)).collect();
                let csw = c_g.mul_vec(&sw);
                let su = act.apply(g, &l2_units[h]);
                for i in 0..d {
                    let rhs = pair.high.add(&csw[i], &pair.high.mul(&w_g[i], &su));
                    out.push(pair.high.sub(&w_gh[i], &rhs));
                }
            }
        }
        out
    };
    // the pinned units must already form a cocycle
    let act = &flag_high_d.module.action;
    for g in group.elements() {
        for h in group.elements() {
            let lhs = l2_units[group.mul(g, h)].clone();
            let rhs = pair.high.mul(&l2_units[g], &act.apply(g, &l2_units[h]));
            if lhs != rhs {
                return Err(Error::structure("pinned line units are not a cocycle"));
            }
        }
    }
    let solution = if free * n == 0 {
        let probe = eval(&[]);
        if probe.iter().all(|v| pair.high.is_zero(v)) {
            Some(vec![])
        } else {
            None
        }
    } else {
        affine_probe_solve(pair, free * n, &eval)?
    };
    match solution {
        None => Ok(None),
        Some(x) => {
            let mats: Vec<Mat> = group
                .elements()
                .map(|g| {
                    let (w, u) = assemble(&x, g);
                    let mut m = Mat::zeros(&pair.high, d1, d1);
                    for i in 0..d {
                        for j in 0..d {
                            m[(i, j)] = flag_high_d.module.mats[g][(i, j)].clone();
                        }
                        m[(i, d)] = w[i].clone();
                    }
                    m[(d, d)] = u;
                    m
                })
                .collect();
            let module =
                SemilinearModule::new(&pair.high, &group, &flag_high_d.module.action, mats)?;
            let flag = FlagRep::new(module)?;
            // hard contract: bit-exact reductions
            assert_eq!(flag.reduce(pair)?, *flag_low);
            assert_eq!(flag.truncate(d), *flag_high_d);
            Ok(Some(flag))
        }
    }
}

/// The permutation-module ambient for the uplift step: the free module over
/// the skew algebra of G⁰ = G/ker(action), padded so its rank is ≥ d+2.
fn ambient_embedding(
    pair: &LevelPair,
    flag_low: &FlagRep,
    flag_high_d: &FlagRep,
) -> Result<(usize, PermutationModule)> {
    let group = flag_low.group();
    let d1 = flag_low.rank();
    let kernel: Vec<usize> = group
        .elements()
        .filter(|&g| {
            flag_low.module.mats[g] == Mat::identity(flag_low.ring(), d1)
                && flag_high_d.module.mats[g] == Mat::identity(&pair.high, flag_high_d.rank())
        })
        .filter(|&g| {
            flag_low
                .ring()
                .elements()
                .all(|x| flag_low.module.action.apply(g, &x) == x)
        })
        .collect();
    let (g0, _proj) = group.quotient(&kernel)?;
    let mut copies = d1;
    while copies * g0.order() < d1 + 1 {
        copies += 1;
    }
    let action = flag_low.module.action.transport(&pair.high);
    let amb = PermutationModule::free_over_group_algebra(&pair.high, group, &action, copies);
    Ok((copies * g0.order(), amb))
}

/// All P-cochain lifts of the two-step extension over a fixed line lift, one
/// representative per isomorphism class; `None` when no lift exists.
fn p_lift_class_reps(
    pair: &LevelPair,
    flag_low: &FlagRep,
    flag_high_d: &FlagRep,
    l2_units: &[Elem],
    class_budget: usize,
) -> Result<Option<Vec<Vec<Elem>>>> {
    let group = flag_low.group().clone();
    let d1 = flag_low.rank();
    let d = d1 - 1;
    let n = group.order();
    let ld2 = flag_high_d.line(d);
    let nat_low: Vec<Elem> = group
        .elements()
        .map(|g| flag_low.module.mats[g][(d - 1, d)].clone())
        .collect();
    let act = flag_high_d.module.action.clone();
    let assemble_z = |x: &[Elem]| -> Vec<Elem> {
        group
            .elements()
            .map(|g| {
                pair.high
                    .add(&pair.lift_any(&nat_low[g]), &pair.v_embed(&x[g]))
            })
            .collect()
    };
    let closure_defects = |z: &[Elem]| -> Vec<Elem> {
        let mut out = vec![z[group.id()].clone()];
        for g in group.elements() {
            for h in group.elements() {
                let rhs = pair.high.add(
                    &pair.high.mul(&ld2.mats[g][(0, 0)], &act.apply(g, &z[h])),
                    &pair.high.mul(&z[g], &act.apply(g, &l2_units[h])),
                );
                out.push(pair.high.sub(&z[group.mul(g, h)], &rhs));
            }
        }
        out
    };
    let eval = |x: &[Elem]| -> Vec<Elem> { closure_defects(&assemble_z(x)) };
    let Some(base) = affine_probe_solve(pair, n, &eval)? else {
        return Ok(None);
    };
    // kernel of the linearized system: the space of cocycle differences
    let fp = Ring::zmod(pair.p);
    let low = &pair.low;
    let width = low.width();
    let zero = vec![low.zero(); n];
    let extract_fp = |vals: &[Elem]| -> Result<Vec<Elem>> {
        let mut out = Vec::new();
        for v in vals {
            let lv = pair.v_extract(v)?;
            out.extend(restrict_vector(low, &[lv])?.into_iter().map(|c| fp.from_u64(c)));
        }
        Ok(out)
    };
    let e0 = extract_fp(&closure_defects(&assemble_z(&zero)))?;
    let rows = e0.len();
    let cols = n * width;
    let mut lin = Mat::zeros(&fp, rows, cols);
    for k in 0..n {
        for w in 0..width {
            let mut probe = zero.clone();
            let mut b = low.zero();
            b.0[w] = 1;
            probe[k] = b;
            let ek = extract_fp(&closure_defects(&assemble_z(&probe)))?;
            for i in 0..rows {
                lin[(i, k * width + w)] = fp.sub(&ek[i], &e0[i]);
            }
        }
    }
    let kernel = crate::matrix::kernel_gens(&lin)?;
    // coboundary subspace: s-conjugation z(g) ↦ z(g) + l_d(g)σ_g(s) − s·u(g)
    let mut cb_cols: Vec<Vec<Elem>> = Vec::new();
    for w in 0..width {
        let mut s_low = low.zero();
        s_low.0[w] = 1;
        let s = pair.v_embed(&s_low);
        let delta: Vec<Elem> = group
            .elements()
            .map(|g| {
                let t = pair.high.sub(
                    &pair.high.mul(&ld2.mats[g][(0, 0)], &act.apply(g, &s)),
                    &pair.high.mul(&s, &l2_units[g]),
                );
                pair.v_extract(&t).unwrap()
            })
            .collect();
        let mut col = Vec::with_capacity(cols);
        for dv in &delta {
            col.extend(restrict_vector(low, &[dv.clone()])?.into_iter().map(|c| fp.from_u64(c)));
        }
        cb_cols.push(col);
    }
    // quotient kernel / coboundaries: row-reduce the coboundaries, keep kernel
    // vectors independent of them
    let mut echelon: Vec<Vec<Elem>> = Vec::new();
    let reduce_against = |v: &mut Vec<Elem>, basis: &Vec<Vec<Elem>>| {
        for b in basis {
            let pivot = b.iter().position(|e| !fp.is_zero(e)).unwrap();
            if !fp.is_zero(&v[pivot]) {
                let c = fp.mul(&v[pivot], &fp.inv(&b[pivot]).unwrap());
                for (x, y) in v.iter_mut().zip(b.iter()) {
                    *x = fp.sub(x, &fp.mul(&c, y));
                }
            }
        }
    };
    for mut c in cb_cols {
        reduce_against(&mut c, &echelon);
        if c.iter().any(|e| !fp.is_zero(e)) {
            echelon.push(c);
        }
    }
    let mut class_dirs: Vec<Vec<Elem>> = Vec::new();
    for mut k in kernel {
        reduce_against(&mut k, &echelon);
        if k.iter().any(|e| !fp.is_zero(e)) {
            echelon.push(k.clone());
            class_dirs.push(k);
        }
    }
    let count = (pair.p as u128).pow(class_dirs.len() as u32);
    if count > class_budget as u128 {
        return Err(Error::budget(format!(
            "{count} P-lift classes exceed the candidate budget"
        )));
    }
    // enumerate representatives base + Σ λ_i dir_i
    let mut reps = Vec::with_capacity(count as usize);
    let mut lambda = vec![0u64; class_dirs.len()];
    loop {
        let mut x = base.clone();
        for (i, dir) in class_dirs.iter().enumerate() {
            if lambda[i] == 0 {
                continue;
            }
            for k in 0..n {
                let coords: Vec<u64> = (0..width)
                    .map(|w| {
                        let v = &dir[k * width + w];
                        (v.0[0] * lambda[i]) % pair.p
                    })
                    .collect();
                let dl = unrestrict_vector(low, &coords)?[0].clone();
                x[k] = low.add(&x[k], &dl);
            }
        }
        reps.push(assemble_z(&x));
        let mut i = 0;
        loop {
            if i == class_dirs.len() {
                return Ok(Some(reps));
            }
            lambda[i] += 1;
            if lambda[i] < pair.p {
                break;
            }
            lambda[i] = 0;
            i += 1;
        }
    }
}

/// Lifts of a G-line to the high ring form a torsor under
/// H¹(G, End(L)^{(1)}) = H¹(G, A) with the plain ring action (the line twist
/// cancels in its endomorphisms).
fn line_lift_torsor(
    pair: &LevelPair,
    flag_low: &FlagRep,
    budget: usize,
) -> Result<CohomologyGroup> {
    let group = flag_low.group();
    let coeff = SemilinearModule::new(
        &pair.low,
        group,
        &flag_low.module.action.transport(&pair.low),
        vec![Mat::identity(&pair.low, 1); group.order()],
    )?;
    CohomologyGroup::compute(&restrict_scalars(&coeff)?, 1, budget)
}

/// u(g) = τ(β_g)·(1 + V(t_g)) for a torsor class representative t.
fn line_units_from_class(
    pair: &LevelPair,
    beta: &[Elem],
    t_cand: &Cochain,
) -> Result<Vec<Elem>> {
    let p = pair.p;
    (0..beta.len())
        .map(|g| {
            let tv = unrestrict_vector(&pair.low, &t_cand.values[g])?[0].clone();
            let scaled = pair.low.mul(&pair.low.pow(&beta[g], p), &tv);
            Ok(pair
                .high
                .add(&pair.teich(&beta[g]), &pair.v_embed(&scaled)))
        })
        .collect()
}

/// Enumerate the viable column extensions for one uplift stage: line-lift
/// classes × P-lift classes, each evaluated through the glue/reduce/adjust
/// obstruction calculus and, when unobstructed, solved to a pinned witness.
pub fn uplift_step_candidates(
    pair: &LevelPair,
    flag_low: &FlagRep,
    flag_high_d: &FlagRep,
    budget: usize,
) -> Result<(Vec<StepCandidate>, ObstructionReport)> {
    let d1 = flag_low.rank();
    let d = d1 - 1;
    let group = flag_low.group().clone();
    let mut report = ObstructionReport::empty(d1);

    if d == 0 {
        // base case: all line lifts extend the empty flag; order the
        // Teichmüller lift first
        let beta = flag_low.line_units(1);
        let h1_line = line_lift_torsor(pair, flag_low, budget)?;
        let mut cands = Vec::new();
        for t_cand in h1_line.enumerate_classes() {
            let l2_units = line_units_from_class(pair, &beta, &t_cand)?;
            if let Some(flag) =
                solve_flag_column_pinned(pair, flag_low, flag_high_d, &l2_units, None)?
            {
                let mut r = ObstructionReport::empty(d1);
                r.verdict = "lifted".into();
                r.note = "line lift".into();
                cands.push(StepCandidate { flag, report: r });
            }
        }
        report.verdict = if cands.is_empty() { "obstructed" } else { "lifted" }.into();
        report.note = "Teichmüller lift of the line".into();
        return Ok((cands, report));
    }

    let (ambient_rank, _amb) = ambient_embedding(pair, flag_low, flag_high_d)?;
    report.ambient_rank = Some(ambient_rank);

    // candidate line lifts: torsor under H¹(G, End(L̄_{d+1})^{(1)}) = H¹(G, A^{(1)})
    let h1_line = line_lift_torsor(pair, flag_low, budget)?;
    let beta = flag_low.line_units(d1);
    let t_candidates = h1_line.enumerate_classes();

    let mut successes = Vec::new();
    let mut first_failure: Option<(Option<Vec<u64>>, Option<Vec<u64>>, Option<Vec<Vec<u64>>>, bool)> =
        None;
    let mut tried = 0usize;
    for t_cand in &t_candidates {
        let l2_units = line_units_from_class(pair, &beta, t_cand)?;
        let Some(p_reps) = p_lift_class_reps(pair, flag_low, flag_high_d, &l2_units, budget)?
        else {
            // the two-step extension does not lift over this line
            continue;
        };
        for z_p in &p_reps {
            tried += 1;
            let verdict = evaluate_candidate(
                pair,
                flag_low,
                flag_high_d,
                &l2_units,
                z_p,
                budget,
            )?;
            match verdict {
                CandidateVerdict::Works {
                    c2,
                    c1,
                    adjusted,
                    witness: flag,
                } => {
                    let mut r = ObstructionReport::empty(d1);
                    r.verdict = "lifted".into();
                    r.ambient_rank = Some(ambient_rank);
                    r.c2_vanishes = c2.as_ref().map(|c| c.iter().all(|&x| x == 0));
                    r.c2_class = c2;
                    r.c1_vanishes = c1.as_ref().map(|c| c.iter().all(|&x| x == 0));
                    r.c1_class = c1;
                    r.note = if adjusted {
                        format!("candidate {tried}: glued after an ext¹ adjustment")
                    } else {
                        format!("candidate {tried}: glued")
                    };
                    successes.push(StepCandidate { flag, report: r });
                }
                CandidateVerdict::Fails { c2, c1, cocycle, adjustable } => {
                    if first_failure.is_none() {
                        first_failure = Some((c2, c1, cocycle, adjustable));
                    }
                }
            }
        }
    }
    if successes.is_empty() {
        let (c2, c1, cocycle, adjustable) =
            first_failure.unwrap_or((None, None, None, false));
        report.verdict = "obstructed".into();
        report.c2_vanishes = c2.as_ref().map(|c| c.iter().all(|&x| x == 0));
        report.c2_class = c2;
        report.c1_vanishes = c1.as_ref().map(|c| c.iter().all(|&x| x == 0));
        report.c1_class = c1;
        report.c1_cocycle = cocycle;
        report.note = format!(
            "no glueing among {} candidates{}",
            tried,
            if adjustable { " (adjustment also failed)" } else { "" }
        );
    } else {
        report.verdict = "lifted".into();
        report.note = format!("{} of {} candidates glue", successes.len(), tried);
    }
    Ok((successes, report))
}

/// One step of the uplift: first viable candidate or the obstruction report.
pub fn uplift_step(
    pair: &LevelPair,
    flag_low: &FlagRep,
    flag_high_d: &FlagRep,
    budget: usize,
) -> Result<UpliftStepOutcome> {
    let d1 = flag_low.rank();
    if d1 == 0 {
        return Ok(UpliftStepOutcome::Lifted {
            flag: FlagRep::empty(
                &pair.high,
                flag_low.group(),
                &flag_low.module.action.transport(&pair.high),
            ),
            report: {
                let mut r = ObstructionReport::empty(0);
                r.verdict = "lifted".into();
                r.note = "empty flag".into();
                r
            },
        });
    }
    if flag_high_d.rank() + 1 != d1 {
        return Err(Error::precondition("flag ranks do not chain"));
    }
    if flag_high_d.reduce(pair)? != flag_low.truncate(d1 - 1) {
        return Err(Error::precondition(
            "mod-p² flag does not reduce to the truncation of the mod-p flag",
        ));
    }
    let (cands, report) = uplift_step_candidates(pair, flag_low, flag_high_d, budget)?;
    match cands.into_iter().next() {
        Some(c) => Ok(UpliftStepOutcome::Lifted {
            flag: c.flag,
            report: c.report,
        }),
        None => Ok(UpliftStepOutcome::Obstructed(report)),
    }
}

enum CandidateVerdict {
    Works {
        c2: Option<Vec<u64>>,
        c1: Option<Vec<u64>>,
        adjusted: bool,
        witness: FlagRep,
    },
    Fails {
        c2: Option<Vec<u64>>,
        c1: Option<Vec<u64>>,
        cocycle: Option<Vec<Vec<u64>>>,
        adjustable: bool,
    },
}

/// Evaluate one (line lift, P-lift) candidate through the obstruction
/// calculus: cup obstruction c₂, its reduction c₁ with j_*(c₁) = c₂ asserted,
/// and the ext¹ adjustment when c₁ ≠ 0.
fn evaluate_candidate(
    pair: &LevelPair,
    flag_low: &FlagRep,
    flag_high_d: &FlagRep,
    l2_units: &[Elem],
    z_p: &[Elem],
    budget: usize,
) -> Result<CandidateVerdict> {
    let group = flag_low.group().clone();
    let d1 = flag_low.rank();
    let d = d1 - 1;
    if d == 1 {
        // no glueing constraint: the pinned solve decides directly
        return Ok(
            match solve_flag_column_pinned(pair, flag_low, flag_high_d, l2_units, Some(z_p))? {
                Some(witness) => CandidateVerdict::Works {
                    c2: None,
                    c1: None,
                    adjusted: false,
                    witness,
                },
                None => CandidateVerdict::Fails {
                    c2: None,
                    c1: None,
                    cocycle: None,
                    adjustable: false,
                },
            },
        );
    }
    let ld2 = flag_high_d.line(d);
    let l2 = SemilinearModule::new(
        &pair.high,
        &group,
        &flag_high_d.module.action,
        l2_units
            .iter()
            .map(|u| {
                let mut m = Mat::zeros(&pair.high, 1, 1);
                m[(0, 0)] = u.clone();
                m
            })
            .collect(),
    )?;
    let p_ext = {
        let zmats: Vec<Mat> = group
            .elements()
            .map(|g| {
                let mut m = Mat::zeros(&pair.high, 1, 1);
                m[(0, 0)] = z_p[g].clone();
                m
            })
            .collect();
        ExtensionData::from_cocycle(&ld2, &l2, &zmats)?
    };
    let e_ext = flag_high_d.sub_extension(d)?;
    let glue = glue_obstruction(&e_ext, &p_ext, budget)?;
    let reduced = reduce_glue_obstruction(pair, flag_low, flag_high_d, l2_units, z_p, budget)?;
    assert_yoneda_compat(pair, flag_low, flag_high_d, l2_units, &glue, &reduced, budget)?;
    let c2_coords = Some(glue.class_coords.clone());
    if reduced.vanishes() {
        let witness = solve_flag_column_pinned(pair, flag_low, flag_high_d, l2_units, Some(z_p))?
            .ok_or_else(|| {
                Error::structure("c₁ vanishes but the pinned glueing solve failed")
            })?;
        return Ok(CandidateVerdict::Works {
            c2: c2_coords,
            c1: Some(reduced.class_coords),
            adjusted: false,
            witness,
        });
    }
    // Step-8 adjustment: ε with β(ε) = c₁ moves the line lift by −π_*(ε) and
    // the P-data by the kernel component of ε.
    if let Some(eps) = try_adjustment(pair, flag_low, &reduced, budget)? {
        let (l2_adj, zp_adj) = apply_adjustment(pair, flag_low, l2_units, z_p, &eps)?;
        let re = reduce_glue_obstruction(pair, flag_low, flag_high_d, &l2_adj, &zp_adj, budget)?;
        if re.vanishes() {
            if let Some(witness) =
                solve_flag_column_pinned(pair, flag_low, flag_high_d, &l2_adj, Some(&zp_adj))?
            {
                return Ok(CandidateVerdict::Works {
                    c2: c2_coords,
                    c1: Some(vec![0; reduced.class_coords.len()]),
                    adjusted: true,
                    witness,
                });
            }
        }
    }
    Ok(CandidateVerdict::Fails {
        c2: c2_coords,
        c1: Some(reduced.class_coords),
        cocycle: Some(reduced.cocycle.values.clone()),
        adjustable: true,
    })
}

/// Realize the Step-8 adjustment on candidate data: ε is a 1-cocycle valued in
/// the quotient-trivialized (V_{d+1}/V_{d-1})'^{(1)}; its quotient component
/// moves the line lift, its kernel component moves the P-cochain.
fn apply_adjustment(
    pair: &LevelPair,
    flag_low: &FlagRep,
    l2_units: &[Elem],
    z_p: &[Elem],
    eps: &Cochain,
) -> Result<(Vec<Elem>, Vec<Elem>)> {
    let group = flag_low.group().clone();
    let d1 = flag_low.rank();
    let beta = flag_low.line_units(d1);
    let mut new_units = Vec::with_capacity(group.order());
    let mut new_zp = Vec::with_capacity(group.order());
    let p = pair.p;
    for g in group.elements() {
        let vals = unrestrict_vector(&pair.low, &eps.values[g])?;
        // untwist: ε lives in ⊗L̄^{∨(1)} coordinates, so the conversion back
        // to raw p-part corrections carries the twisted factor β^p
        let betap = pair.low.pow(&beta[g], p);
        let eps_d = pair.low.mul(&vals[0], &betap);
        let eps_d1 = pair.low.mul(&vals[1], &betap);
        new_zp.push(pair.high.add(&z_p[g], &pair.v_embed(&eps_d)));
        new_units.push(pair.high.sub(&l2_units[g], &pair.v_embed(&eps_d1)));
    }
    Ok((new_units, new_zp))
}
pub struct ReducedObstruction {
    pub coefficients: GModule,
    pub cocycle: Cochain,
    pub class_coords: Vec<u64>,
}

impl ReducedObstruction {
    pub fn vanishes(&self) -> bool {
        self.class_coords.iter().all(|&c| c == 0)
    }
}

/// The mod-p reduction c₁ of the glueing obstruction, at cochain level, in
/// the quotient-trivialized coordinates: c₁ ∈ H²(G, (L^∨_{d+1} ⊗ V_{d-1,1})^{(1)}).
pub fn reduce_glue_obstruction(
    pair: &LevelPair,
    flag_low: &FlagRep,
    flag_high_d: &FlagRep,
    l2_units: &[Elem],
    z_p: &[Elem],
    budget: usize,
) -> Result<ReducedObstruction> {
    let group = flag_low.group().clone();
    let d1 = flag_low.rank();
    let d = d1 - 1;
    let beta_low = flag_low.line_units(d1);
    // φ₁ compatibility: the P data must reduce to the Nat column exactly
    for g in group.elements() {
        if pair.reduce(&z_p[g]) != flag_low.module.mats[g][(d - 1, d)] {
            return Err(Error::precondition(
                "mod-p glueing does not match the P reduction",
            ));
        }
        if pair.reduce(&l2_units[g]) != beta_low[g] {
            return Err(Error::precondition("line lift does not reduce to the flag line"));
        }
    }
    // twisted (quotient-trivialized) data
    let v_d2_tw = twist_by_inverse_units(&flag_high_d.module, l2_units);
    let act = &flag_high_d.module.action;
    // ē(g) = b(g)·β(g)^{-1} over the low ring; v(g) ∈ V'_{d,2} with
    // reduction ē(g) and last coordinate z̄_P(g)
    let v_cochain: Vec<Vec<Elem>> = group
        .elements()
        .map(|g| {
            let beta_inv = pair.low.inv(&beta_low[g]).unwrap();
            let mut col: Vec<Elem> = (0..d)
                .map(|i| {
                    let e = pair
                        .low
                        .mul(&flag_low.module.mats[g][(i, d)], &beta_inv);
                    pair.lift_any(&e)
                })
                .collect();
            // z̄_P(g) = z_P(g)·u(g)^{-1}
            let uinv = pair.high.inv(&l2_units[g]).unwrap();
            col[d - 1] = pair.high.mul(&z_p[g], &uinv);
            col
        })
        .collect();
    // c₁(g,h) = κ^{-1}( g·v(h) − v(gh) + v(g) ), coordinates 1..d-1
    let coeff_mod = {
        let v_dm1_low = flag_low.truncate(d - 1).module;
        let beta_units: Vec<Elem> = beta_low.clone();
        let tw = twist_by_inverse_units(&v_dm1_low, &beta_units);
        restrict_scalars(&tw.frobenius_twist(1)?)?
    };
    let mut values = Vec::with_capacity(group.order() * group.order());
    for g in group.elements() {
        for h in group.elements() {
            let gh = group.mul(g, h);
            let sv: Vec<Elem> = v_cochain[h].iter().map(|x| act.apply(g, x)).collect();
            let gv = v_d2_tw.mats[g].mul_vec(&sv);
            let mut dv: Vec<Elem> = (0..d)
                .map(|i| {
                    pair.high.add(
                        &pair.high.sub(&gv[i], &v_cochain[gh][i]),
                        &v_cochain[g][i],
                    )
                })
                .collect();
            // the d-th coordinate must vanish and the rest must be p-multiples
            if !pair.high.is_zero(&dv[d - 1]) {
                return Err(Error::structure(
                    "reduced obstruction: quotient coordinate did not cancel",
                ));
            }
            dv.truncate(d - 1);
            let mut low_parts = Vec::with_capacity(d - 1);
            for x in &dv {
                low_parts.push(pair.v_extract(x)?);
            }
            values.push(restrict_vector(&pair.low, &low_parts)?);
        }
    }
    let c1 = Cochain { degree: 2, values };
    if !is_cocycle(&coeff_mod, &c1) {
        return Err(Error::structure("c₁ is not a cocycle"));
    }
    let h2 = CohomologyGroup::compute(&coeff_mod, 2, budget)?;
    let class_coords = h2.class_coords(&c1)?;
    Ok(ReducedObstruction {
        coefficients: coeff_mod,
        cocycle: c1,
        class_coords,
    })
}

/// Hard assertion c₂ = j_*(c₁) in H²(G, V'_{d-1,2}): both classes are pushed
/// into the same twisted coefficients and compared.
fn assert_yoneda_compat(
    pair: &LevelPair,
    flag_low: &FlagRep,
    flag_high_d: &FlagRep,
    l2_units: &[Elem],
    glue: &GlueObstruction,
    reduced: &ReducedObstruction,
    budget: usize,
) -> Result<()> {
    let d1 = flag_low.rank();
    let d = d1 - 1;
    // target coefficients: V'_{d-1,2} = V_{d-1,2} ⊗ L₂^∨, restricted
    let v_dm1_tw = twist_by_inverse_units(&flag_high_d.truncate(d - 1).module, l2_units);
    let target = restrict_scalars(&v_dm1_tw)?;
    // j: (V'_{d-1,1})^{(1)} → V'_{d-1,2}, multiplication by p on coordinates
    let j = GMap::new(&reduced.coefficients, &target, {
        let rank = target.rank();
        let mut m = vec![vec![0u64; reduced.coefficients.rank()]; rank];
        for i in 0..rank.min(reduced.coefficients.rank()) {
            m[i][i] = pair.p;
        }
        m
    })?;
    let jc1 = reduced.cocycle.map(&j);
    // c₂ currently lives in Hom(L₂, V_{d-1,2}) restricted — for rank-1 L₂ the
    // twisted coordinates agree entrywise with V'_{d-1,2}
    let h2t = CohomologyGroup::compute(&target, 2, budget)?;
    let c2_t = Cochain {
        degree: 2,
        values: glue.c2.values.clone(),
    };
    if !h2t.classes_equal(&jc1, &c2_t)? {
        return Err(Error::structure("hard invariant violated: j_*(c₁) ≠ c₂"));
    }
    Ok(())
}

/// Step-8 style adjustment: find ε in ext¹ of the two-step quotient with
/// β(ε) = c₁, where β is the connecting map of
/// 0 → V'^{(1)}_{d-1,1} → V'^{(1)}_{d+1,1} → (V_{d+1}/V_{d-1})'^{(1)} → 0.
/// Returns the ε cochain when one exists.
fn try_adjustment(
    pair: &LevelPair,
    flag_low: &FlagRep,
    c1: &ReducedObstruction,
    budget: usize,
) -> Result<Option<Cochain>> {
    let d1 = flag_low.rank();
    let d = d1 - 1;
    let beta = flag_low.line_units(d1);
    let tw = |m: &SemilinearModule| twist_by_inverse_units(m, &beta);
    let a = restrict_scalars(&tw(&flag_low.truncate(d - 1).module).frobenius_twist(1)?)?;
    let b = restrict_scalars(&tw(&flag_low.module).frobenius_twist(1)?)?;
    let c = restrict_scalars(&tw(&flag_low.quotient_block(d - 1, d1)).frobenius_twist(1)?)?;
    let ra = a.rank();
    let rb = b.rank();
    let rc = c.rank();
    let mut incl = vec![vec![0u64; ra]; rb];
    for i in 0..ra {
        incl[i][i] = 1;
    }
    let mut proj = vec![vec![0u64; rb]; rc];
    for i in 0..rc {
        proj[i][ra + i] = 1;
    }
    let seq = ShortExact::new(GMap::new(&a, &b, incl)?, GMap::new(&b, &c, proj)?, 1 << 24)?;
    let h1w = CohomologyGroup::compute(&c, 1, budget)?;
    let h2a = CohomologyGroup::compute(&a, 2, budget)?;
    let basis = h1w.reps();
    if basis.is_empty() {
        return Ok(None);
    }
    // solve Σ λ_i β(b_i) = [c₁] over F_p
    let fp = Ring::zmod(pair.p);
    let target = h2a.class_coords(&c1.cocycle)?;
    let rows = target.len();
    let mut mat = Mat::zeros(&fp, rows, basis.len());
    for (k, bk) in basis.iter().enumerate() {
        let beta_bk = seq.connecting(bk)?;
        let coords = h2a.class_coords(&beta_bk)?;
        for i in 0..rows {
            mat[(i, k)] = fp.from_u64(coords[i]);
        }
    }
    let rhs: Vec<Elem> = target.iter().map(|&x| fp.from_u64(x)).collect();
    match crate::matrix::solve(&mat, &rhs)? {
        None => Ok(None),
        Some(lambda) => {
            let mut eps = Cochain::zero(&c, 1);
            for (k, bk) in basis.iter().enumerate() {
                eps = eps.add(&c, &bk.scale(&c, lambda[k].0[0]));
            }
            Ok(Some(eps))
        }
    }
}

/// Depth-first search over stage candidates: succeeds exactly when some full
/// lift of the flag exists, matching the exhaustive B_d search.
pub fn uplift_flag(
    pair: &LevelPair,
    flag_low: &FlagRep,
    budget: usize,
) -> Result<std::result::Result<(FlagRep, Vec<ObstructionReport>), Vec<ObstructionReport>>> {
    fn dfs(
        pair: &LevelPair,
        flag_low: &FlagRep,
        current: FlagRep,
        stage: usize,
        budget: usize,
        trail: &mut Vec<ObstructionReport>,
        best_failure: &mut Vec<ObstructionReport>,
    ) -> Result<Option<(FlagRep, Vec<ObstructionReport>)>> {
        if stage > flag_low.rank() {
            return Ok(Some((current, trail.clone())));
        }
        let partial_low = flag_low.truncate(stage);
        let (cands, stage_report) =
            uplift_step_candidates(pair, &partial_low, &current, budget)?;
        if cands.is_empty() {
            let mut failed = trail.clone();
            failed.push(stage_report);
            if failed.len() > best_failure.len() {
                *best_failure = failed;
            }
            return Ok(None);
        }
        for cand in cands {
            trail.push(cand.report.clone());
            if let Some(found) = dfs(
                pair,
                flag_low,
                cand.flag,
                stage + 1,
                budget,
                trail,
                best_failure,
            )? {
                return Ok(Some(found));
            }
            trail.pop();
        }
        Ok(None)
    }

    let start = FlagRep::empty(
        &pair.high,
        flag_low.group(),
        &flag_low.module.action.transport(&pair.high),
    );
    let mut trail = Vec::new();
    let mut best_failure = Vec::new();
    match dfs(pair, flag_low, start, 1, budget, &mut trail, &mut best_failure)? {
        Some((flag, reports)) => {
            // final contract: a homomorphism G → B_d(high) reducing to the input
            let b = flag.borel_cocycle();
            let g = flag_low.group();
            for x in g.elements() {
                for y in g.elements() {
                    let prod = b[x].matmul(&flag.module.action.apply_mat(x, &b[y]));
                    assert_eq!(prod, b[g.mul(x, y)]);
                }
            }
            assert_eq!(flag.reduce(pair)?, *flag_low);
            Ok(Ok((flag, reports)))
        }
        None => Ok(Err(best_failure)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flag_from_gen(ring: &Ring, group: &FiniteGroup, gen_mats: &[(usize, Mat)], rank: usize) -> FlagRep {
        let action = RingAction::trivial(group, ring);
        FlagRep::new(
            SemilinearModule::from_generators(ring, group, &action, rank, gen_mats).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn rank_one_uplift_is_teichmuller() {
        let pair = LevelPair::zmod_p2(3);
        let g = FiniteGroup::cyclic(2);
        // character g ↦ 2 over F_3
        let m = Mat::from_int_rows(&pair.low, &[vec![2]]);
        let flag = flag_from_gen(&pair.low, &g, &[(1, m)], 1);
        let out = uplift_flag(&pair, &flag, 1 << 22).unwrap().unwrap();
        let (lifted, reports) = out;
        assert_eq!(reports.len(), 1);
        // Teichmüller lift of 2 mod 9 is 8 (= 2^3 mod 9)
        assert_eq!(lifted.module.mats[1][(0, 0)], pair.high.from_u64(8));
    }

    #[test]
    fn diagonal_flags_lift_componentwise() {
        let pair = LevelPair::zmod_p2(3);
        let g = FiniteGroup::cyclic(2);
        let m = Mat::from_int_rows(&pair.low, &[vec![2, 0], vec![0, 1]]);
        let flag = flag_from_gen(&pair.low, &g, &[(1, m)], 2);
        let (lifted, _) = uplift_flag(&pair, &flag, 1 << 22).unwrap().unwrap();
        assert_eq!(lifted.module.mats[1][(0, 0)], pair.high.from_u64(8));
        assert_eq!(lifted.module.mats[1][(1, 1)], pair.high.from_u64(1));
        assert!(pair.high.is_zero(&lifted.module.mats[1][(0, 1)]));
    }

    #[test]
    fn shear_over_z2_does_not_lift_but_z3_does() {
        // the order-2 shear over F_2 cannot lift to B_2(Z/4) with unipotent
        // diagonal... it CAN lift with diagonal (1, 3): check the pipeline
        // agrees with the column solver either way.
        let pair = LevelPair::zmod_p2(2);
        let g = FiniteGroup::cyclic(2);
        let m = Mat::from_int_rows(&pair.low, &[vec![1, 1], vec![0, 1]]);
        let flag = flag_from_gen(&pair.low, &g, &[(1, m)], 2);
        let result = uplift_flag(&pair, &flag, 1 << 22).unwrap();
        // B_2 allows diagonal corrections: [[1,1],[0,3]] squares to identity
        assert!(result.is_ok());
        let (lifted, _) = result.unwrap();
        let sq = lifted.module.mats[1].matmul(&lifted.module.mats[1]);
        assert_eq!(sq, Mat::identity(&pair.high, 2));
    }

    #[test]
    fn lift_extension_prescribed_split_case() {
        let pair = LevelPair::zmod_p2(3);
        let g = FiniteGroup::cyclic(3);
        let sub = SemilinearModule::trivial_module(&pair.low, &g, 1);
        let quot = SemilinearModule::trivial_module(&pair.low, &g, 1);
        let e = ExtensionData::split(&sub, &quot).unwrap();
        let v_high = SemilinearModule::trivial_module(&pair.high, &g, 2);
        let l_high = SemilinearModule::trivial_module(&pair.high, &g, 1);
        match lift_extension_prescribed(&pair, &e, &v_high, &l_high).unwrap() {
            LiftOutcome::Lifted(e2) => {
                assert_eq!(pair.reduce_mat(&e2.incl), e.incl);
            }
            LiftOutcome::Obstructed(_) => panic!("split case must lift"),
        }
    }

    #[test]
    fn lift_extension_free_vs_prescribed() {
        // the Bockstein extension over Z/p: 0 → F_p → E → F_p → 0 with
        // z(g) = g; prescribed Teichmüller kernel fails on the shear (p = 2)
        // but the free lift succeeds with a non-Teichmüller kernel
        let pair = LevelPair::zmod_p2(2);
        let g = FiniteGroup::cyclic(2);
        let sub = SemilinearModule::trivial_module(&pair.low, &g, 1);
        let quot = SemilinearModule::trivial_module(&pair.low, &g, 1);
        let z: Vec<Mat> = g
            .elements()
            .map(|x| Mat::from_int_rows(&pair.low, &[vec![x as u64]]))
            .collect();
        let e = ExtensionData::from_cocycle(&sub, &quot, &z).unwrap();
        // ambient lift: the regular-ish module [[1,1],[0,-1]]-span: use the
        // full shear lift with diagonal -1 — as a plain module lift of E rank 2
        // take the trivial lift of the total module? the total has the shear
        // action; lift it as [[1,1],[0,3]]
        let m_high = Mat::from_int_rows(&pair.high, &[vec![1, 1], vec![0, 3]]);
        let action = RingAction::trivial(&g, &pair.high);
        let v_high =
            SemilinearModule::from_generators(&pair.high, &g, &action, 2, &[(1, m_high)])
                .unwrap();
        let l_high = SemilinearModule::trivial_module(&pair.high, &g, 1);
        match lift_extension_prescribed(&pair, &e, &v_high, &l_high).unwrap() {
            LiftOutcome::Lifted(_) => {} // prescribed with trivial kernel lift works here
            LiftOutcome::Obstructed(o) => {
                assert!(!o.vanishes());
            }
        }
        match lift_extension_free(&pair, &e, &v_high).unwrap() {
            Ok(free) => {
                // kernel reduction equals the mod-p kernel (contract check)
                assert_eq!(
                    pair.reduce_module(&free.extension.sub).unwrap(),
                    e.sub
                );
            }
            Err(_) => panic!("free lift must exist for this ambient"),
        }
    }
}
