mod common;

use std::sync::Arc;

use cech_core::bundle::{build_bundle, flat_holonomy, section_exists, BuildOutcome, Bundle, BundleSpec, SectionVerdict};
use cech_core::cochain::{check_cocycle, delta0, gauge_transform, solve_coboundary, Cochain0, Cochain1, Convention};
use cech_core::cover::Cover;
use cech_core::groups::{GroupElement, GroupSpec, Sign};
use cech_core::nerve::build_nerve;
use common::gen::{random_explicit_cover, random_points, rng};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn spec_for(which: usize) -> GroupSpec {
    [GroupSpec::t(), GroupSpec::sign(), GroupSpec::unit_quaternion(), GroupSpec::gl(2).unwrap()][which]
}

fn convention(gba: bool) -> Convention {
    if gba {
        Convention::Gba
    } else {
        Convention::Abg
    }
}

fn random_cover(rng: &mut ChaCha8Rng) -> Arc<Cover> {
    let space = random_points(rng, 12);
    Arc::new(random_explicit_cover(rng, &space, 6, 0.35))
}

/// A gauge-transformed cochain that is the identity on every edge lying in
/// a triangle and random elsewhere, hence a cocycle.
fn random_transitions(rng: &mut ChaCha8Rng, cover: &Cover, spec: GroupSpec, conv: Convention) -> Cochain1 {
    let nerve = Arc::new(build_nerve(cover, 2).unwrap());
    let mut base = Cochain1::identity(nerve.clone(), spec);
    for &[a, b] in nerve.edges() {
        let free = !nerve.triangles().iter().any(|t| t.contains(&a) && t.contains(&b));
        if free && rng.random_bool(0.5) {
            base.set(a, b, spec.random_element(rng)).unwrap();
        }
    }
    let t = Cochain0::random(nerve, spec, rng);
    gauge_transform(&base, &t, conv).unwrap()
}

fn valid(cover: &Arc<Cover>, r: Cochain1, conv: Convention) -> Bundle {
    match build_bundle(BundleSpec::new(cover.clone(), r, conv).unwrap()).unwrap() {
        BuildOutcome::Valid(b) => b,
        BuildOutcome::Rejected { triangle, .. } => panic!("cocycle rejected on {triangle:?}"),
    }
}

proptest! {
    #[test]
    fn section_verdict_is_gauge_invariant(seed in any::<u64>(), which in 0usize..4, gba in any::<bool>()) {
        let mut rng = rng(seed);
        let (spec, conv) = (spec_for(which), convention(gba));
        let cover = random_cover(&mut rng);
        let r = random_transitions(&mut rng, &cover, spec, conv);
        let t = Cochain0::random(r.nerve().clone(), spec, &mut rng);
        let twisted = gauge_transform(&r, &t, conv).unwrap();
        let before = section_exists(&valid(&cover, r, conv)).unwrap();
        let after = section_exists(&valid(&cover, twisted, conv)).unwrap();
        prop_assert_eq!(before.exists(), after.exists());
    }

    #[test]
    fn holonomy_changes_by_conjugation(seed in any::<u64>(), which in 0usize..4, gba in any::<bool>()) {
        let mut rng = rng(seed);
        let (spec, conv) = (spec_for(which), convention(gba));
        let cover = random_cover(&mut rng);
        let r = random_transitions(&mut rng, &cover, spec, conv);
        let nerve = r.nerve().clone();
        let t = Cochain0::random(nerve.clone(), spec, &mut rng);
        let twisted = gauge_transform(&r, &t, conv).unwrap();
        let forest = nerve.spanning_forest();
        let before = flat_holonomy(&valid(&cover, r, conv)).unwrap();
        let after = flat_holonomy(&valid(&cover, twisted, conv)).unwrap();
        for ((cycle, h), (_, h2)) in before.iter().zip(&after) {
            let g = t.get(forest.root[cycle.vertices[0]]);
            let expected = match conv {
                Convention::Abg => spec.op(&spec.inv_op(g, h).unwrap(), g).unwrap(),
                Convention::Gba => spec.op_inv(&spec.op(g, h).unwrap(), g).unwrap(),
            };
            prop_assert!(spec.distance(&expected, h2).unwrap() <= 1e-7);
            prop_assert_eq!(spec.is_identity(h), spec.is_identity(h2));
        }
    }

    #[test]
    fn cocycles_always_build(seed in any::<u64>(), which in 0usize..4, gba in any::<bool>()) {
        let mut rng = rng(seed);
        let (spec, conv) = (spec_for(which), convention(gba));
        let cover = random_cover(&mut rng);
        let nerve = Arc::new(build_nerve(&cover, 2).unwrap());
        let r = if rng.random_bool(0.5) {
            Cochain1::random(nerve, spec, &mut rng)
        } else {
            random_transitions(&mut rng, &cover, spec, conv)
        };
        let cocycle = check_cocycle(&r, conv).unwrap().is_ok();
        let outcome = build_bundle(BundleSpec::new(cover.clone(), r, conv).unwrap()).unwrap();
        match outcome {
            BuildOutcome::Valid(_) => prop_assert!(cocycle),
            BuildOutcome::Rejected { point, .. } => {
                prop_assert!(!cocycle);
                prop_assert!(point.is_none());
            }
        }
    }

    #[test]
    fn circle_sections_match_coboundary_solver(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let cover = random_cover(&mut rng);
        let r = random_transitions(&mut rng, &cover, GroupSpec::t(), Convention::Abg);
        let solvable = solve_coboundary(&r, Convention::Abg).unwrap().is_solved();
        match section_exists(&valid(&cover, r.clone(), Convention::Abg)).unwrap() {
            SectionVerdict::Section { fibers, winding } => {
                prop_assert!(solvable);
                prop_assert!(delta0(&fibers, Convention::Abg).unwrap().approx_eq(&r));
                prop_assert_eq!(winding.unwrap().len(), r.nerve().fundamental_cycles().len());
            }
            SectionVerdict::Obstructed { holonomy, .. } => {
                prop_assert!(!solvable);
                prop_assert!(!GroupSpec::t().is_identity(&holonomy));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Sign bundles: a section exists iff some choice of vertex signs
    /// reproduces the transitions.
    #[test]
    fn sign_sections_match_enumeration(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let cover = random_cover(&mut rng);
        let spec = GroupSpec::sign();
        let r = random_transitions(&mut rng, &cover, spec, Convention::Abg);
        let nerve = r.nerve().clone();
        let v = nerve.vertex_count();
        let target: Vec<bool> = r.values().iter().map(|g| *g == GroupElement::Sign(Sign::Minus)).collect();
        let brute = (0u32..1 << v).any(|mask| {
            nerve.edges().iter().zip(&target).all(|(&[a, b], &minus)| (((mask >> a) ^ (mask >> b)) & 1 == 1) == minus)
        });
        prop_assert_eq!(section_exists(&valid(&cover, r, Convention::Abg)).unwrap().exists(), brute);
    }
}
