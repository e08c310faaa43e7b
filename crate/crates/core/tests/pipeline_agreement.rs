//! The uplift pipeline must agree with exhaustive lift search: a mod-p flag
//! lifts through the obstruction calculus iff an exhaustive search over
//! B_d(Z/p²) finds a lift of the corresponding Borel cocycle.

use uplift_core::group::FiniteGroup;
use uplift_core::lifting::{uplift_flag, FlagRep};
use uplift_core::matrix::Mat;
use uplift_core::nonabelian::{MatrixShape, NonabelianContext};
use uplift_core::ring::Ring;
use uplift_core::semilinear::{LevelPair, RingAction, SemilinearModule};

const BUDGET: usize = 1 << 22;

fn low_flags(pair: &LevelPair, group: &FiniteGroup, d: usize, cap: usize) -> Vec<FlagRep> {
    let act = RingAction::trivial(group, &pair.low);
    let ctx = NonabelianContext::new(group, &pair.low, &act, d, MatrixShape::Borel);
    let cocycles = ctx.enumerate_cocycles(1 << 24).expect("enumeration in budget");
    cocycles
        .into_iter()
        .take(cap)
        .map(|mats| {
            FlagRep::new(SemilinearModule::new(&pair.low, group, &act, mats).unwrap()).unwrap()
        })
        .collect()
}

fn agreement_for(group: &FiniteGroup, p: u64, d: usize, cap: usize) -> (usize, usize, usize) {
    let pair = LevelPair::zmod_p2(p);
    let act_high = RingAction::trivial(group, &pair.high);
    let ctx_high = NonabelianContext::new(group, &pair.high, &act_high, d, MatrixShape::Borel);
    let flags = low_flags(&pair, group, d, cap);
    let mut lifted = 0;
    let mut obstructed = 0;
    for flag in &flags {
        let pipeline = uplift_flag(&pair, flag, BUDGET).unwrap();
        let brute = ctx_high
            .lift_fiber_search(&pair, &flag.borel_cocycle(), 1 << 26)
            .unwrap();
        match (&pipeline, &brute) {
            (Ok(_), Some(_)) => lifted += 1,
            (Err(_), None) => obstructed += 1,
            (Ok(_), None) => panic!(
                "pipeline lifted but brute force found nothing (|G|={}, p={p}, d={d})",
                group.order()
            ),
            (Err(reports), Some(found)) => panic!(
                "brute force lifted but pipeline obstructed (|G|={}, p={p}, d={d}): {:?} vs witness {:?}",
                group.order(),
                reports.last().map(|r| &r.note),
                found[1]
            ),
        }
        if let Ok((f, _)) = pipeline {
            // contract: reduction is bit-exact
            assert_eq!(&f.reduce(&pair).unwrap(), flag);
        }
    }
    (flags.len(), lifted, obstructed)
}

#[test]
fn rank2_agreement_small_groups() {
    for p in [2u64, 3] {
        for group in [
            FiniteGroup::cyclic(2),
            FiniteGroup::cyclic(3),
            FiniteGroup::cyclic(4),
            FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2)),
        ] {
            let (total, lifted, obstructed) = agreement_for(&group, p, 2, 64);
            assert_eq!(total, lifted + obstructed);
        }
    }
}

#[test]
fn rank3_agreement_z2_z4() {
    // d = 3 exercises the glue/reduce/adjust machinery
    for p in [2u64, 3] {
        for group in [FiniteGroup::cyclic(2), FiniteGroup::cyclic(4)] {
            let (total, lifted, obstructed) = agreement_for(&group, p, 3, 40);
            assert_eq!(total, lifted + obstructed);
        }
    }
}

#[test]
fn rank3_agreement_d4_has_obstructions() {
    // the dihedral family contains genuinely obstructed rank-3 flags
    let (total, lifted, obstructed) = agreement_for(&FiniteGroup::dihedral(4), 2, 3, 36);
    assert_eq!(total, lifted + obstructed);
    assert!(obstructed > 0, "expected obstructed D4 instances");
}

#[test]
fn nontrivial_obstruction_exists_somewhere() {
    // sanity: the full shear of Z/4 at rank 3 is genuinely obstructed, so the
    // agreement tests are not vacuous
    let g = FiniteGroup::cyclic(4);
    let pair = LevelPair::zmod_p2(2);
    let act = RingAction::trivial(&g, &pair.low);
    let shear = Mat::from_int_rows(
        &pair.low,
        &[vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]],
    );
    let module = SemilinearModule::from_generators(&pair.low, &g, &act, 3, &[(1, shear)]).unwrap();
    let flag = FlagRep::new(module).unwrap();
    let result = uplift_flag(&pair, &flag, BUDGET).unwrap();
    assert!(result.is_err(), "the Z/4 rank-3 shear must be obstructed");
    let reports = result.unwrap_err();
    let last = reports.last().unwrap();
    assert_eq!(last.verdict, "obstructed");
    // the brute force agrees
    let act_high = RingAction::trivial(&g, &pair.high);
    let ctx = NonabelianContext::new(&g, &pair.high, &act_high, 3, MatrixShape::Borel);
    assert!(ctx
        .lift_fiber_search(&pair, &flag.borel_cocycle(), 1 << 26)
        .unwrap()
        .is_none());
}

#[test]
fn s3_rank2_agreement() {
    let g = FiniteGroup::symmetric3();
    for p in [2u64, 3] {
        let (total, lifted, obstructed) = agreement_for(&g, p, 2, 48);
        assert_eq!(total, lifted + obstructed);
    }
}

#[test]
fn obstructed_uplift_reports_carry_classes() {
    // find an obstructed rank-3 instance and check the report shape
    let pair = LevelPair::zmod_p2(2);
    let g = FiniteGroup::cyclic(4);
    let act = RingAction::trivial(&g, &pair.low);
    // the Bockstein-like shear column forces obstructions for some flags
    let m = Mat::from_int_rows(&pair.low, &[vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]]);
    if let Ok(module) = SemilinearModule::from_generators(&pair.low, &g, &act, 3, &[(1, m)]) {
        let flag = FlagRep::new(module).unwrap();
        match uplift_flag(&pair, &flag, BUDGET).unwrap() {
            Ok((lifted, _)) => {
                assert_eq!(lifted.reduce(&pair).unwrap(), flag);
            }
            Err(reports) => {
                let last = reports.last().unwrap();
                assert_eq!(last.verdict, "obstructed");
            }
        }
    }
}
