//! Property tests over randomly generated Reedy categories, functors, and
//! diagrams. Each property pins an algebraic law of the library: dualities,
//! idempotence, agreement between independent constructions, and the
//! equivalence between index-map injectivity and the fibering verdict.

use proptest::prelude::*;

use reedy_core::catalog::{random_diagram, random_reedy, random_reedy_functor, SizeBounds};
use reedy_core::counterexample::{build_s, collapse_t, collapse_t_via_colimit, index_map};
use reedy_core::fincat::{find_isomorphism, pi0, validate_functor, RawFunctor};
use reedy_core::quillen::{
    anchor_pairs, factorization_via_comma, inverse_factorizations, is_cofibering, is_fibering,
    Side,
};
use reedy_core::reedy::{latching_category, matching_category, truncate};
use reedy_core::setdiag::{
    colimit, colimit_corestriction_map, limit, limit_restriction_map, validate_diagram,
};

fn bounds() -> SizeBounds {
    SizeBounds::default()
}

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cases(24))]

    /// A functor is fibering exactly when its opposite is cofibering, and
    /// the failing anchors agree under the duality.
    #[test]
    fn fibering_cofibering_duality(seed in any::<u32>()) {
        let g = random_reedy_functor(seed as u64, &bounds()).unwrap();
        let op = g.opposite();

        let fib = is_fibering(&g).unwrap();
        let op_cofib = is_cofibering(&op).unwrap();
        prop_assert_eq!(fib.holds, op_cofib.holds);
        let fib_anchors: Vec<(&str, &str, &str)> = fib
            .witnesses
            .iter()
            .map(|w| (w.alpha.as_str(), w.beta.as_str(), w.sigma.as_str()))
            .collect();
        let op_anchors: Vec<(&str, &str, &str)> = op_cofib
            .witnesses
            .iter()
            .map(|w| (w.alpha.as_str(), w.beta.as_str(), w.sigma.as_str()))
            .collect();
        prop_assert_eq!(fib_anchors, op_anchors);

        let cofib = is_cofibering(&g).unwrap();
        let op_fib = is_fibering(&op).unwrap();
        prop_assert_eq!(cofib.holds, op_fib.holds);
        prop_assert_eq!(cofib.witnesses.len(), op_fib.witnesses.len());
    }

    /// The direct construction of the inverse factorization category agrees
    /// with the comma-category construction, up to isomorphism, on every
    /// anchor.
    #[test]
    fn factorizations_match_comma_oracle(seed in any::<u32>()) {
        let g = random_reedy_functor(seed as u64, &bounds()).unwrap();
        for (alpha, sigma) in anchor_pairs(&g, Side::Inverse) {
            let direct = inverse_factorizations(&g, &alpha, &sigma).unwrap();
            let comma = factorization_via_comma(&g, &alpha, &sigma).unwrap();
            prop_assert!(
                find_isomorphism(&direct.category, &comma.category).is_some(),
                "anchor ({alpha}, {sigma})"
            );
        }
    }

    /// The index map at every anchor is injective exactly when the functor
    /// is fibering.
    #[test]
    fn index_injectivity_iff_fibering(seed in any::<u32>()) {
        let g = random_reedy_functor(seed as u64, &bounds()).unwrap();
        let mut all_injective = true;
        for alpha in g.source().base().objects() {
            for beta in g.target().base().objects() {
                let s = build_s(&g, alpha, beta).unwrap();
                let t = collapse_t(&g, &s).unwrap();
                let report = index_map(&g, &s, &t).unwrap();
                all_injective &= report.injective;
            }
        }
        prop_assert_eq!(all_injective, is_fibering(&g).unwrap().holds);
    }

    /// Collapsing the index set by transport equals the colimit of the
    /// inverse-hom diagram over the opposite matching category.
    #[test]
    fn index_collapse_matches_colimit(seed in any::<u32>()) {
        let g = random_reedy_functor(seed as u64, &bounds()).unwrap();
        for alpha in g.source().base().objects() {
            for beta in g.target().base().objects() {
                let s = build_s(&g, alpha, beta).unwrap();
                let t = collapse_t(&g, &s).unwrap();
                let colim = collapse_t_via_colimit(&g, alpha, beta).unwrap();
                let direct: Vec<Vec<String>> = t
                    .classes
                    .iter()
                    .map(|class| {
                        let mut labels: Vec<String> =
                            class.iter().map(|&e| s.label(e)).collect();
                        labels.sort();
                        labels
                    })
                    .collect();
                let mut via: Vec<Vec<String>> = colim
                    .classes
                    .iter()
                    .map(|class| {
                        let mut labels: Vec<String> =
                            class.iter().map(|&(o, e)| colimit_label(&s, o, e)).collect();
                        labels.sort();
                        labels
                    })
                    .collect();
                let mut direct_sorted = direct;
                direct_sorted.sort();
                via.sort();
                prop_assert_eq!(direct_sorted, via);
            }
        }
    }

    /// Truncating twice is truncating once at the smaller bound.
    #[test]
    fn truncate_min_law(seed in any::<u32>(), n in 0u32..5, m in 0u32..5) {
        let r = random_reedy(seed as u64, &bounds()).unwrap();
        let (first, _) = truncate(&r, n).unwrap();
        let (twice, _) = truncate(&first, m).unwrap();
        let (once, _) = truncate(&r, n.min(m)).unwrap();
        prop_assert_eq!(twice.base().to_raw(), once.base().to_raw());
        prop_assert_eq!(twice.to_raw_reedy(), once.to_raw_reedy());
    }

    /// The opposite is an involution, and matching/latching categories swap
    /// under it.
    #[test]
    fn opposite_involution_and_duality(seed in any::<u32>()) {
        let r = random_reedy(seed as u64, &bounds()).unwrap();
        let double = r.opposite().opposite();
        prop_assert_eq!(double.base().to_raw(), r.base().to_raw());
        prop_assert_eq!(double.to_raw_reedy(), r.to_raw_reedy());

        let op = r.opposite();
        for alpha in r.base().objects() {
            let latch = latching_category(&r, alpha).unwrap();
            let match_op = matching_category(&op, alpha).unwrap();
            prop_assert!(
                find_isomorphism(&latch.category.opposite(), &match_op.category).is_some(),
                "object {alpha}"
            );
        }

        prop_assert_eq!(pi0(r.base()).count(), pi0(&r.base().opposite()).count());
    }

    /// Re-factoring the two factors of a morphism hands back trivial
    /// factorizations, and the factors compose to the original morphism.
    #[test]
    fn factorization_idempotence(seed in any::<u32>()) {
        let r = random_reedy(seed as u64, &bounds()).unwrap();
        let base = r.base();
        for g in 0..base.morphism_count() {
            let (inv, dir) = r.factor(g);
            prop_assert_eq!(base.compose(inv, dir).unwrap(), g);
            prop_assert!(r.is_inverse_or_id(inv));
            prop_assert!(r.is_direct_or_id(dir));
            prop_assert_eq!(r.factor(inv), (inv, base.identity_of(base.dst(inv))));
            prop_assert_eq!(r.factor(dir), (base.identity_of(base.src(dir)), dir));
        }
    }

    /// Generation is deterministic in the seed.
    #[test]
    fn generators_are_deterministic(seed in any::<u32>()) {
        let a = random_reedy_functor(seed as u64, &bounds()).unwrap();
        let b = random_reedy_functor(seed as u64, &bounds()).unwrap();
        prop_assert_eq!(a.functor().to_raw(), b.functor().to_raw());
        prop_assert_eq!(a.source().to_raw_reedy(), b.source().to_raw_reedy());
        prop_assert_eq!(a.target().to_raw_reedy(), b.target().to_raw_reedy());
    }
}

proptest! {
    #![proptest_config(cases(16))]

    /// Restriction along the identity functor does not change limits or
    /// colimits, and random diagrams survive a raw round-trip.
    #[test]
    fn identity_restriction_is_bijective(seed in any::<u32>()) {
        let r = random_reedy(seed as u64, &bounds()).unwrap();
        let shape = r.base();
        let x = random_diagram(seed as u64, shape, 3, 2).unwrap();

        let round = validate_diagram(shape, &x.to_raw()).unwrap();
        prop_assert_eq!(round.to_raw(), x.to_raw());

        let id = reedy_core::fincat::identity_functor(shape);
        let into = limit_restriction_map(&id, &x).unwrap();
        prop_assert!(into.is_bijective());
        prop_assert_eq!(into.domain.len(), limit(&x).unwrap().names.len());
        let out = colimit_corestriction_map(&id, &x).unwrap();
        prop_assert!(out.is_bijective());
        prop_assert_eq!(out.domain.len(), colimit(&x).unwrap().names.len());
    }

    /// A functor validated from its own raw form is the same functor.
    #[test]
    fn functor_raw_round_trip(seed in any::<u32>()) {
        let g = random_reedy_functor(seed as u64, &bounds()).unwrap();
        let raw: RawFunctor = g.functor().to_raw();
        let again = validate_functor(
            g.source().base(),
            g.target().base(),
            &raw,
        ).unwrap();
        prop_assert_eq!(again.to_raw(), raw);
    }
}

/// Label of element `e` of the colimit diagram at matching object `o`. The
/// diagram lists the μ's in the enumeration order of S, so the e-th element
/// over ν is the e-th element of S with that ν.
fn colimit_label(s: &reedy_core::counterexample::IndexSet, o: usize, e: u32) -> String {
    let nu = &s.matching().object_arrows[o];
    let mu = s
        .elements
        .iter()
        .filter(|el| &el.nu == nu)
        .nth(e as usize)
        .expect("colimit element indexes into S");
    format!("({}|{})", mu.nu, mu.mu)
}
