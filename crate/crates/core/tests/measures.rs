use qmlab::grid::{BoundingBox, CellSet, GridRegion, Point};
use qmlab::measures::{
    component_majority, linear_combination, maj3, norms, point_mass, unbounded_area,
    windowed_area, zero, Class, Fun, NaiveMajority,
};
use qmlab::value::{rat, ExtendedValue};
use qmlab::variations::VariationConfig;
use qmlab::Error;

fn pt(x: (i64, i64), y: (i64, i64)) -> Point {
    Point::new(rat(x.0, x.1), rat(y.0, y.1))
}

fn points() -> [Point; 3] {
    [pt((1, 3), (1, 3)), pt((7, 3), (1, 3)), pt((1, 3), (7, 3))]
}

fn majority() -> Fun {
    let [a, b, c] = points();
    maj3(a, b, c).unwrap()
}

fn closed(cells: &[(i64, i64)]) -> GridRegion {
    GridRegion::closed(CellSet::finite(0, cells.iter().copied()))
}

fn value(f: &Fun, r: &GridRegion) -> ExtendedValue {
    f.eval(r).unwrap()
}

fn v(n: i64, d: i64) -> ExtendedValue {
    ExtendedValue::finite(rat(n, d))
}

#[test]
fn point_mass_values_and_dyadic_rejection() {
    let d = point_mass(pt((1, 3), (1, 3)), rat(1, 1)).unwrap();
    assert_eq!(value(&d, &GridRegion::whole()), v(1, 1));
    assert_eq!(value(&d, &closed(&[(0, 0)])), v(1, 1));
    assert_eq!(value(&d, &closed(&[(1, 0)])), v(0, 1));
    assert!(matches!(point_mass(pt((1, 2), (1, 3)), rat(1, 1)), Err(Error::DyadicPoint(_))));
}

#[test]
fn area_of_cells() {
    let a = windowed_area(BoundingBox::new(0, 0, 0, 3, 3));
    assert_eq!(value(&a, &GridRegion::empty()), v(0, 1));
    assert_eq!(value(&a, &closed(&[(1, 1)])), v(1, 1));
    let child = GridRegion::closed(CellSet::finite(1, [(2, 2)]));
    assert_eq!(value(&a, &child), v(1, 4));
    assert_eq!(value(&a, &GridRegion::whole()), v(9, 1));
}

#[test]
fn unbounded_area_values() {
    let a = unbounded_area();
    assert_eq!(value(&a, &GridRegion::whole()), ExtendedValue::PosInf);
    assert_eq!(value(&a, &closed(&[(0, 0), (4, 4)])), v(2, 1));
    let u = GridRegion::open(CellSet::block(1, 0, 0, 3, 1));
    assert_eq!(value(&a, &u), v(3, 4));
}

#[test]
fn majority_on_solid_blocks() {
    let f = majority();
    assert_eq!(f.meta().claimed_class, Class::Tm);
    assert_eq!(value(&f, &GridRegion::closed(CellSet::block(0, 0, 0, 3, 1))), v(1, 1));
    assert_eq!(value(&f, &closed(&[(0, 0), (1, 0)])), v(0, 1));
    assert_eq!(value(&f, &GridRegion::whole()), v(1, 1));
    assert_eq!(value(&f, &GridRegion::empty()), v(0, 1));
}

#[test]
fn majority_lobes() {
    let f = majority();
    let open = |x0, y0, x1, y1| GridRegion::open(CellSet::block(0, x0, y0, x1, y1));
    assert_eq!(value(&f, &open(-1, -1, 2, 2)), v(0, 1));
    assert_eq!(value(&f, &open(1, -1, 4, 2)), v(0, 1));
    assert_eq!(value(&f, &open(-1, -1, 4, 2)), v(1, 1));
}

#[test]
fn majority_takes_only_zero_and_one() {
    let f = majority();
    let probe = qmlab::checkers::ProbeFamily::unit3(200, 5);
    for r in probe.regions() {
        let x = value(&f, &r);
        assert!(x == v(0, 1) || x == v(1, 1), "{r}: {x}");
    }
}

#[test]
fn naive_majority_is_not_additive() {
    let [a, b, c] = points();
    let naive = NaiveMajority::new(vec![a, b, c], 2).unwrap();
    let left = closed(&[(0, 0)]);
    let right = closed(&[(2, 0)]);
    let both = left.disjoint_union(&right).unwrap();
    assert_eq!(value(&naive, &both), v(1, 1));
    assert_eq!(value(&naive, &left), v(0, 1));
    assert_eq!(value(&naive, &right), v(0, 1));
    // the extended version splits into components instead
    assert_eq!(value(&majority(), &both), v(0, 1));
}

#[test]
fn component_majority_needs_one_component() {
    let f = component_majority(points().to_vec(), 2).unwrap();
    let strip = GridRegion::open(CellSet::block(0, 0, 0, 3, 1));
    assert_eq!(value(&f, &strip), v(1, 1));
    assert_eq!(value(&f, &closed(&[(0, 0), (2, 0)])), v(0, 1));
}

#[test]
fn combinations() {
    let [a, ..] = points();
    let delta = point_mass(a, rat(1, 1)).unwrap();
    let mu = linear_combination(&[rat(1, 1), rat(-1, 2)], &[majority(), delta.clone()]).unwrap();
    let two_points = GridRegion::closed(CellSet::block(0, 0, 0, 3, 1));
    assert_eq!(value(&mu, &two_points), v(1, 2));
    let same = linear_combination(&[rat(1, 1), rat(0, 1)], &[majority(), mu.clone()]).unwrap();
    let gone = linear_combination(&[rat(1, 1), rat(-1, 1)], &[delta.clone(), delta]).unwrap();
    for r in qmlab::checkers::ProbeFamily::unit3(50, 6).regions() {
        assert_eq!(value(&same, &r), value(&majority(), &r));
        assert!(value(&gone, &r).is_zero());
    }
    let conflict = linear_combination(&[rat(1, 1), rat(-1, 1)], &[unbounded_area(), unbounded_area()]);
    assert_eq!(conflict.err(), Some(Error::InfConflict));
    assert!(value(&zero(), &GridRegion::whole()).is_zero());
}

#[test]
fn norm_values() {
    let cfg = VariationConfig::default().with_level_cap(1);
    let [a, ..] = points();
    let delta = point_mass(a, rat(1, 1)).unwrap();
    let n = norms(&delta, &cfg).unwrap();
    assert_eq!((n.norm1, n.norm2), (v(1, 1), v(1, 1)));
    let mu = linear_combination(&[rat(1, 1), rat(-1, 2)], &[majority(), delta]).unwrap();
    let n = norms(&mu, &cfg).unwrap();
    assert_eq!((n.norm1, n.norm2), (v(1, 1), v(3, 2)));
    // |μ(K)| = 1 on a solid block through the other two points that avoids the atom
    let hook = closed(&[(2, 0), (2, 1), (2, 2), (1, 2), (0, 2)]);
    assert_eq!(value(&mu, &hook), v(1, 1));
}
