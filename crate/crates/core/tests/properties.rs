use proptest::prelude::*;
use qmlab::grid::{halmos_split, interpolate, CellSet, GridRegion, Kind, Point, DEFAULT_SPLIT_DEPTH};
use qmlab::measures::{component_majority, linear_combination, maj3, point_mass, windowed_area, Fun};
use qmlab::value::rat;
use qmlab::variations::{search_cells, Oracle, VariationConfig, VariationKind};

fn pt(a: i64, b: i64) -> Point {
    Point::new(rat(a, 3), rat(b, 3))
}

fn majority() -> Fun {
    maj3(pt(1, 1), pt(7, 1), pt(1, 7)).unwrap()
}

fn gallery() -> Vec<Fun> {
    let delta = point_mass(pt(1, 1), rat(1, 1)).unwrap();
    let mu = linear_combination(&[rat(1, 1), rat(-1, 2)], &[majority(), delta.clone()]).unwrap();
    let cm = component_majority(vec![pt(1, 1), pt(7, 1), pt(1, 7)], 2).unwrap();
    let lambda = linear_combination(&[rat(1, 1), rat(-1, 2)], &[cm, majority()]).unwrap();
    vec![delta, windowed_area(qmlab::grid::BoundingBox::new(0, 0, 0, 3, 3)), majority(), mu, lambda]
}

/// Cells of a 3×3 window at level 0, from a 9-bit mask.
fn cells(mask: u16) -> Vec<(i64, i64)> {
    (0..9).filter(|i| mask >> i & 1 == 1).map(|i| (i % 3, i / 3)).collect()
}

fn region(mask: u16, open: bool, cofinite: bool) -> GridRegion {
    let set = CellSet::finite(0, cells(mask));
    let set = if cofinite { set.complement() } else { set };
    GridRegion::new(set, if open { Kind::Open } else { Kind::Closed })
}

fn any_region() -> impl Strategy<Value = GridRegion> {
    (0u16..512, any::<bool>(), any::<bool>()).prop_map(|(m, o, c)| region(m, o, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn complement_is_an_involution(r in any_region()) {
        prop_assert_eq!(r.complement().complement(), r.clone());
        prop_assert!(r.is_disjoint(&r.complement()));
    }

    #[test]
    fn values_ignore_refinement(r in any_region(), steps in 1u32..3) {
        for f in gallery() {
            let fine = r.refine(steps);
            prop_assert_eq!(f.eval(&r).unwrap(), f.eval(&fine).unwrap(), "{}", f.meta().name);
        }
    }

    #[test]
    fn split_covers_and_respects_the_opens(mask in 1u16..512, cut in 0i64..4) {
        // two overlapping vertical bands around the window
        let c = region(mask, false, false);
        let u = GridRegion::open(CellSet::block(0, -1, -1, cut + 1, 4));
        let v = GridRegion::open(CellSet::block(0, cut - 1, -1, 5, 4));
        let (k, d) = halmos_split(&c, &u, &v, DEFAULT_SPLIT_DEPTH).unwrap();
        prop_assert!(k.is_compact() && d.is_compact());
        prop_assert!(k.is_subset(&u) && d.is_subset(&v));
        let joined = CellSet::align(k.cells(), d.cells());
        prop_assert!(GridRegion::closed(joined.0.union(&joined.1)).same_set(&c));
    }

    #[test]
    fn interpolation_sits_between(mask in 1u16..512) {
        let k = region(mask, false, false);
        let u = GridRegion::open(CellSet::block(0, -1, -1, 4, 4));
        let v = interpolate(&k, &u).unwrap();
        prop_assert!(v.is_open() && v.is_bounded());
        prop_assert!(k.is_subset(&v));
        prop_assert!(v.closure().is_subset(&u));
    }

    #[test]
    fn branch_and_bound_matches_enumeration(mask in 1u16..512, which in 0usize..4) {
        let f = gallery()[which].clone();
        let cs = cells(mask);
        let cfg = VariationConfig::default();
        for kind in [VariationKind::Plus, VariationKind::Minus, VariationKind::Total] {
            let exact = search_cells(&f, kind, 0, &cs, &cfg.clone().with_oracle(Oracle::Exhaustive)).unwrap();
            let bounded = search_cells(&f, kind, 0, &cs, &cfg.clone().with_oracle(Oracle::BranchBound)).unwrap();
            prop_assert_eq!(exact.value, bounded.value, "{} {}", f.meta().name, kind);
        }
    }

    #[test]
    fn grouped_total_matches_naive(mask in 1u16..512) {
        for f in gallery() {
            let cs = cells(mask);
            let cfg = VariationConfig::default();
            let grouped = search_cells(&f, VariationKind::Total, 0, &cs, &cfg.clone().with_oracle(Oracle::Grouped)).unwrap();
            let naive = search_cells(&f, VariationKind::Total, 0, &cs, &cfg.clone().with_oracle(Oracle::Naive)).unwrap();
            prop_assert_eq!(grouped.value, naive.value, "{}", f.meta().name);
        }
    }
}
