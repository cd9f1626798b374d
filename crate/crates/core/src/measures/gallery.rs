//! Concrete set functions: point masses, area measures, the majority quasi-measure and
//! linear combinations.

use std::sync::Arc;

use num_traits::{Signed, Zero as _};

use super::set_function::{Class, Fun, InfinitySign, Meta, SetFunction};
use crate::error::{Error, Result};
use crate::grid::{components, BoundingBox, GridRegion, Point};
use crate::solid_extension::{extend_solid, Majority};
use crate::value::{ExtendedValue, Rational};

fn cell_window(p: &Point) -> BoundingBox {
    let (x, y) = p.cell_at(0);
    BoundingBox::new(0, x, y, x + 1, y + 1)
}

fn check_point(p: &Point) -> Result<()> {
    if p.is_non_dyadic() {
        Ok(())
    } else {
        Err(Error::DyadicPoint(p.to_string()))
    }
}

#[derive(Debug)]
pub struct PointMass {
    point: Point,
    weight: Rational,
    meta: Meta,
}

impl PointMass {
    pub fn point(&self) -> Point {
        self.point
    }
}

/// `w·δ_p`. The point must not lie on any dyadic grid line.
pub fn point_mass(p: Point, w: Rational) -> Result<Fun> {
    check_point(&p)?;
    let class = if w.is_negative() { Class::Stm } else { Class::Measure };
    Ok(Arc::new(PointMass {
        point: p,
        weight: w,
        meta: Meta {
            name: format!("{}*delta({p})", crate::value::format_rational(&w)),
            claimed_class: class,
            support_window: cell_window(&p),
            infinity_sign: InfinitySign::None,
        },
    }))
}

impl SetFunction for PointMass {
    fn eval(&self, r: &GridRegion) -> Result<ExtendedValue> {
        // interior point: a single incident cell at every level, for either kind
        let inside = r.cells().contains(self.point.cell_at(r.level()));
        Ok(if inside { self.weight.into() } else { ExtendedValue::ZERO })
    }

    fn meta(&self) -> &Meta {
        &self.meta
    }

    fn is_monotone(&self) -> bool {
        !self.weight.is_negative()
    }

    fn atoms(&self) -> Vec<Point> {
        vec![self.point]
    }
}

/// Lebesgue area of the part of a region inside a window.
#[derive(Debug)]
pub struct WindowedArea {
    meta: Meta,
}

pub fn windowed_area(w: BoundingBox) -> Fun {
    Arc::new(WindowedArea {
        meta: Meta {
            name: format!("area[{},{}..{},{}@{}]", w.x0, w.y0, w.x1, w.y1, w.level),
            claimed_class: Class::Measure,
            support_window: w,
            infinity_sign: InfinitySign::None,
        },
    })
}

fn area_in_window(r: &GridRegion, w: &BoundingBox) -> Rational {
    let level = r.level().max(w.level);
    let cells = r.cells().refine_to(level).intersection(&w.cells_at(level));
    GridRegion::closed(cells).area().unwrap_or_default()
}

impl SetFunction for WindowedArea {
    fn eval(&self, r: &GridRegion) -> Result<ExtendedValue> {
        Ok(area_in_window(r, &self.meta.support_window).into())
    }

    fn meta(&self) -> &Meta {
        &self.meta
    }

    fn is_monotone(&self) -> bool {
        true
    }

    fn diffuse_weight(&self) -> Rational {
        Rational::from_integer(1)
    }
}

/// Area of the whole plane: finite on bounded regions, `+∞` on unbounded ones.
#[derive(Debug)]
pub struct UnboundedArea {
    meta: Meta,
}

pub fn unbounded_area() -> Fun {
    Arc::new(UnboundedArea {
        meta: Meta {
            name: "area".into(),
            claimed_class: Class::Measure,
            support_window: BoundingBox::new(0, 0, 0, 1, 1),
            infinity_sign: InfinitySign::Pos,
        },
    })
}

impl SetFunction for UnboundedArea {
    fn eval(&self, r: &GridRegion) -> Result<ExtendedValue> {
        Ok(match r.area() {
            Some(a) => a.into(),
            None => ExtendedValue::PosInf,
        })
    }

    fn meta(&self) -> &Meta {
        &self.meta
    }

    fn is_monotone(&self) -> bool {
        true
    }

    fn diffuse_weight(&self) -> Rational {
        Rational::from_integer(1)
    }
}

/// The constant zero function.
#[derive(Debug)]
pub struct Zero {
    meta: Meta,
}

pub fn zero() -> Fun {
    Arc::new(Zero {
        meta: Meta {
            name: "zero".into(),
            claimed_class: Class::Measure,
            support_window: BoundingBox::new(0, 0, 0, 1, 1),
            infinity_sign: InfinitySign::None,
        },
    })
}

impl SetFunction for Zero {
    fn eval(&self, _: &GridRegion) -> Result<ExtendedValue> {
        Ok(ExtendedValue::ZERO)
    }

    fn meta(&self) -> &Meta {
        &self.meta
    }

    fn is_monotone(&self) -> bool {
        true
    }
}

/// The "at least `threshold` of the points" rule applied directly to every region,
/// without solid-set extension. Not additive on compacts; kept as a counterexample.
#[derive(Debug)]
pub struct NaiveMajority {
    points: Vec<Point>,
    threshold: usize,
    meta: Meta,
}

impl NaiveMajority {
    pub fn new(points: Vec<Point>, threshold: usize) -> Result<Fun> {
        for p in &points {
            check_point(p)?;
        }
        let window = points
            .iter()
            .map(cell_window)
            .reduce(|a, b| a.hull(&b))
            .unwrap_or(BoundingBox::new(0, 0, 0, 1, 1));
        Ok(Arc::new(NaiveMajority {
            points,
            threshold,
            meta: Meta {
                name: "naive-majority".into(),
                claimed_class: Class::Unknown,
                support_window: window,
                infinity_sign: InfinitySign::None,
            },
        }))
    }
}

impl SetFunction for NaiveMajority {
    fn eval(&self, r: &GridRegion) -> Result<ExtendedValue> {
        let n = self.points.iter().filter(|p| r.contains_point(p)).count();
        Ok(ExtendedValue::from_int(i64::from(n >= self.threshold)))
    }

    fn meta(&self) -> &Meta {
        &self.meta
    }

    fn is_monotone(&self) -> bool {
        true
    }

    fn atoms(&self) -> Vec<Point> {
        self.points.clone()
    }
}

/// The simple topological measure on the plane that is 1 on solid sets containing at
/// least two of three points and has total mass 1, built by solid-set extension.
pub fn maj3(p1: Point, p2: Point, p3: Point) -> Result<Fun> {
    let pts = [p1, p2, p3];
    for p in &pts {
        check_point(p)?;
    }
    for i in 0..3 {
        for j in i + 1..3 {
            if pts[i].cell_at(0) == pts[j].cell_at(0) {
                return Err(Error::Precondition(format!(
                    "maj3 points {} and {} share a level-0 cell",
                    pts[i], pts[j]
                )));
            }
        }
    }
    let window = margin(
        pts.iter().map(cell_window).reduce(|a, b| a.hull(&b)).expect("three points"),
    );
    let q = Majority::new(pts.to_vec(), 2, Rational::from_integer(1));
    extend_solid(Arc::new(q), "maj3", Class::Tm, window)
}

/// Grow a window by one cell on every side, so that connecting paths and enclosing rings
/// around the points fit inside it.
fn margin(w: BoundingBox) -> BoundingBox {
    BoundingBox::new(w.level, w.x0 - 1, w.y0 - 1, w.x1 + 1, w.y1 + 1)
}

/// `1` on regions with a single connected component containing at least `threshold` of the
/// points, `0` otherwise.
///
/// Additive on disjoint compacts and regular, so a deficient topological measure; a compact
/// ring around one point inside a connected open set holding two points shows it is not a
/// topological measure.
#[derive(Debug)]
pub struct ComponentMajority {
    points: Vec<Point>,
    threshold: usize,
    meta: Meta,
}

pub fn component_majority(points: Vec<Point>, threshold: usize) -> Result<Fun> {
    for p in &points {
        check_point(p)?;
    }
    if threshold == 0 || 2 * threshold <= points.len() {
        return Err(Error::Precondition(
            "component_majority needs a strict-majority threshold".into(),
        ));
    }
    let window = margin(
        points
            .iter()
            .map(cell_window)
            .reduce(|a, b| a.hull(&b))
            .unwrap_or(BoundingBox::new(0, 0, 0, 1, 1)),
    );
    Ok(Arc::new(ComponentMajority {
        points,
        threshold,
        meta: Meta {
            name: "component-majority".into(),
            claimed_class: Class::Dtm,
            support_window: window,
            infinity_sign: InfinitySign::None,
        },
    }))
}

impl SetFunction for ComponentMajority {
    fn eval(&self, r: &GridRegion) -> Result<ExtendedValue> {
        let inside: Vec<&Point> = self.points.iter().filter(|p| r.contains_point(p)).collect();
        if inside.len() < self.threshold {
            return Ok(ExtendedValue::ZERO);
        }
        let hit = components(r).iter().any(|c| {
            inside.iter().filter(|p| c.region.contains_point(p)).count() >= self.threshold
        });
        Ok(ExtendedValue::from_int(i64::from(hit)))
    }

    fn meta(&self) -> &Meta {
        &self.meta
    }

    fn is_monotone(&self) -> bool {
        true
    }

    fn atoms(&self) -> Vec<Point> {
        self.points.clone()
    }
}

#[derive(Debug)]
pub struct LinearCombination {
    parts: Vec<(Rational, Fun)>,
    meta: Meta,
}

/// Pointwise `Σ cᵢ·fᵢ`. Opposite infinities after scaling are rejected.
pub fn linear_combination(coeffs: &[Rational], fns: &[Fun]) -> Result<Fun> {
    if coeffs.len() != fns.len() || fns.is_empty() {
        return Err(Error::Precondition(
            "linear_combination needs matching, non-empty coefficient and function lists".into(),
        ));
    }
    let mut sign = InfinitySign::None;
    for (c, f) in coeffs.iter().zip(fns) {
        if c.is_zero() {
            continue;
        }
        let s = match (f.meta().infinity_sign, c.is_positive()) {
            (InfinitySign::None, _) => continue,
            (InfinitySign::Pos, true) | (InfinitySign::Neg, false) => InfinitySign::Pos,
            _ => InfinitySign::Neg,
        };
        if sign != InfinitySign::None && sign != s {
            return Err(Error::InfConflict);
        }
        sign = s;
    }
    let window = fns
        .iter()
        .map(|f| f.meta().support_window)
        .reduce(|a, b| a.hull(&b))
        .expect("non-empty");
    let name = coeffs
        .iter()
        .zip(fns)
        .map(|(c, f)| format!("{}*({})", crate::value::format_rational(c), f.meta().name))
        .collect::<Vec<_>>()
        .join(" + ");
    Ok(Arc::new(LinearCombination {
        parts: coeffs.iter().copied().zip(fns.iter().cloned()).collect(),
        meta: Meta {
            name,
            claimed_class: Class::Unknown,
            support_window: window,
            infinity_sign: sign,
        },
    }))
}

/// `c·f`.
pub fn scaled(c: Rational, f: &Fun) -> Result<Fun> {
    linear_combination(&[c], std::slice::from_ref(f))
}

impl SetFunction for LinearCombination {
    fn eval(&self, r: &GridRegion) -> Result<ExtendedValue> {
        let mut acc = ExtendedValue::ZERO;
        for (c, f) in &self.parts {
            if c.is_zero() {
                continue;
            }
            acc = acc.checked_add(f.eval(r)?.scale(*c))?;
        }
        Ok(acc)
    }

    fn meta(&self) -> &Meta {
        &self.meta
    }

    fn linear_parts(&self) -> Option<Vec<(Rational, Fun)>> {
        Some(self.parts.clone())
    }

    fn settled(&self, r: &GridRegion) -> Result<bool> {
        for (c, f) in &self.parts {
            if !c.is_zero() && !f.settled(r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn atoms(&self) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        for (_, f) in &self.parts {
            for p in f.atoms() {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }

    fn diffuse_weight(&self) -> Rational {
        self.parts
            .iter()
            .map(|(c, f)| c.abs() * f.diffuse_weight())
            .sum()
    }
}
