//! Solid-set functions, their extension to every grid region, restriction of a deficient
//! measure to solid sets around a base point, and the two-measure decomposition of a
//! signed topological measure.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use parking_lot::Mutex;

use crate::error::{Error, Result};
use crate::grid::{bounded_holes, components, solid_hull, BoundingBox, GridRegion, Point};
use crate::measures::{Class, Fun, InfinitySign, Meta, SetFunction};
use crate::value::{format_rational, ExtendedValue, Rational};
use crate::variations::{VariationConfig, VariationFn, VariationKind};

/// A function defined on compact solid and bounded open solid regions, with the value it
/// assigns to the whole plane.
pub trait SolidSetFunction: Send + Sync + fmt::Debug {
    fn value(&self, solid: &GridRegion) -> Result<Rational>;
    fn total(&self) -> Rational;
    /// Points the function is sensitive to, forwarded to the extension's metadata.
    fn atoms(&self) -> Vec<Point> {
        Vec::new()
    }
}

/// `total` on solids containing at least `threshold` of the points, zero otherwise.
#[derive(Debug, Clone)]
pub struct Majority {
    points: Vec<Point>,
    threshold: usize,
    total: Rational,
}

impl Majority {
    pub fn new(points: Vec<Point>, threshold: usize, total: Rational) -> Self {
        Majority { points, threshold, total }
    }
}

impl SolidSetFunction for Majority {
    fn value(&self, solid: &GridRegion) -> Result<Rational> {
        let n = self.points.iter().filter(|p| solid.contains_point(p)).count();
        Ok(if n >= self.threshold { self.total } else { Rational::zero() })
    }

    fn total(&self) -> Rational {
        self.total
    }

    fn atoms(&self) -> Vec<Point> {
        self.points.clone()
    }
}

/// `A ↦ f(A)` when the base point is outside `A`, else `f(X) − f(X ∖ A)`.
#[derive(Debug)]
pub struct Restricted {
    f: Fun,
    point: Point,
    total: Rational,
}

impl Restricted {
    pub fn point(&self) -> Point {
        self.point
    }
}

fn finite(v: ExtendedValue, what: &GridRegion) -> Result<Rational> {
    v.as_finite().ok_or_else(|| {
        Error::Precondition(format!("infinite value on {what} during solid restriction"))
    })
}

pub fn restrict_to_solid(f: &Fun, p: Point) -> Result<Restricted> {
    if !p.is_non_dyadic() {
        return Err(Error::DyadicPoint(p.to_string()));
    }
    let total = f.eval(&GridRegion::whole())?.as_finite().ok_or(Error::InfiniteTotal)?;
    Ok(Restricted { f: f.clone(), point: p, total })
}

impl SolidSetFunction for Restricted {
    fn value(&self, solid: &GridRegion) -> Result<Rational> {
        if solid.contains_point(&self.point) {
            let rest = solid.complement();
            Ok(self.total - finite(self.f.eval(&rest)?, &rest)?)
        } else {
            finite(self.f.eval(solid)?, solid)
        }
    }

    fn total(&self) -> Rational {
        self.total
    }

    fn atoms(&self) -> Vec<Point> {
        let mut a = self.f.atoms();
        if !a.contains(&self.point) {
            a.push(self.point);
        }
        a
    }
}

/// Cached values kept per function before the cache is flushed; searches visit far more
/// regions than they revisit.
pub(crate) const MEMO_LIMIT: usize = 1 << 15;

/// Extension of a solid-set function to all grid regions.
///
/// Evaluation recurses on components, solid hulls and complements; results are memoized by
/// canonical region.
pub struct ExtendedFn {
    q: Arc<dyn SolidSetFunction>,
    meta: Meta,
    monotone: bool,
    memo: Mutex<HashMap<GridRegion, Rational>>,
}

impl fmt::Debug for ExtendedFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtendedFn").field("q", &self.q).field("meta", &self.meta).finish()
    }
}

/// Extend `q` with the given name, claimed class and support window. The claimed class
/// only affects metadata; a `Tm` claim also enables monotone-bound search.
pub fn extend_solid(
    q: Arc<dyn SolidSetFunction>,
    name: &str,
    class: Class,
    window: BoundingBox,
) -> Result<Fun> {
    if q.total() < Rational::zero() {
        return Err(Error::NegativeValue {
            region: GridRegion::whole(),
            value: format_rational(&q.total()),
            total: format_rational(&q.total()),
        });
    }
    Ok(Arc::new(ExtendedFn {
        q,
        meta: Meta {
            name: name.to_string(),
            claimed_class: class,
            support_window: window,
            infinity_sign: InfinitySign::None,
        },
        monotone: class == Class::Tm || class == Class::Measure,
        memo: Mutex::new(HashMap::new()),
    }))
}

impl ExtendedFn {
    fn value(&self, r: &GridRegion) -> Result<Rational> {
        let r = r.canonical();
        if r.is_empty() {
            return Ok(Rational::zero());
        }
        let total = self.q.total();
        if r.is_whole() {
            return Ok(total);
        }
        if let Some(v) = self.memo.lock().get(&r) {
            return Ok(*v);
        }
        let v = if r.is_bounded() {
            let comps = components(&r);
            if comps.len() > 1 {
                let mut sum = Rational::zero();
                for c in &comps {
                    sum += self.value(&c.region)?;
                }
                sum
            } else {
                let holes = bounded_holes(&r);
                if holes.is_empty() {
                    self.q.value(&r)?
                } else {
                    let mut v = self.q.value(&solid_hull(&r)?)?;
                    for h in &holes {
                        v -= self.value(h)?;
                    }
                    v
                }
            }
        } else {
            total - self.value(&r.complement())?
        };
        if v < Rational::zero() || v > total {
            return Err(Error::NegativeValue {
                region: r,
                value: format_rational(&v),
                total: format_rational(&total),
            });
        }
        let mut memo = self.memo.lock();
        if memo.len() >= MEMO_LIMIT {
            memo.clear();
        }
        memo.insert(r, v);
        Ok(v)
    }
}

impl SetFunction for ExtendedFn {
    fn eval(&self, r: &GridRegion) -> Result<ExtendedValue> {
        self.value(r).map(ExtendedValue::Finite)
    }

    fn meta(&self) -> &Meta {
        &self.meta
    }

    fn is_monotone(&self) -> bool {
        self.monotone
    }

    fn atoms(&self) -> Vec<Point> {
        self.q.atoms()
    }
}

/// Check the solid-set function invariants `0 ≤ q(A) ≤ total` on the given solids.
pub fn validate_solid(q: &dyn SolidSetFunction, solids: &[GridRegion]) -> Result<()> {
    let total = q.total();
    for s in solids {
        let v = q.value(s)?;
        if v < Rational::zero() || v > total {
            return Err(Error::NegativeValue {
                region: s.clone(),
                value: format_rational(&v),
                total: format_rational(&total),
            });
        }
    }
    Ok(())
}

/// Write a signed topological measure as `ν₁ − ν₂` with both topological measures, by
/// extending the restrictions of its positive and negative variations around `p`.
pub fn decompose_stm(mu: &Fun, p: Point, cfg: &VariationConfig) -> Result<(Fun, Fun)> {
    let window = mu.meta().support_window;
    let mut out = Vec::with_capacity(2);
    for kind in [VariationKind::Plus, VariationKind::Minus] {
        let var: Fun = Arc::new(VariationFn::new(mu.clone(), kind, cfg.clone()).strict());
        let q = restrict_to_solid(&var, p)?;
        let name = format!("{}_{}[{}]", kind.symbol(), mu.meta().name, p);
        out.push(extend_solid(Arc::new(q), &name, Class::Unknown, window)?);
    }
    let minus = out.pop().expect("two parts");
    let plus = out.pop().expect("two parts");
    Ok((plus, minus))
}
