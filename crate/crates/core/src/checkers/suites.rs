//! Axiom and theorem checks over probe families.

use num_traits::{Signed, Zero};

use super::probes::ProbeFamily;
use super::report::{sample, CheckReport, Tally, Verdict, Witness};
use crate::error::{Error, Result};
use crate::grid::{components, is_solid, solid_hull, CellSet, GridRegion, Kind, Pos};
use crate::measures::Fun;
use crate::value::{ExtendedValue, Rational};
use crate::variations::{total_variation, VariationConfig};

pub(crate) enum Outcome {
    Holds,
    Skip,
    Violation(Witness),
    Unsettled(Witness),
}

impl Outcome {
    fn record(self, tally: &mut Tally) {
        match self {
            Outcome::Holds => tally.probe(),
            Outcome::Skip => {}
            Outcome::Violation(w) => {
                tally.probe();
                tally.fail(w);
            }
            Outcome::Unsettled(w) => {
                tally.probe();
                tally.unsettled(w);
            }
        }
    }
}

/// `f(A₁ ⊔ … ⊔ Aₙ) = Σ f(Aᵢ)` whenever the disjoint union is an open or closed region.
pub(crate) fn additivity_instance(f: &Fun, parts: &[GridRegion]) -> Result<Outcome> {
    let mut union = GridRegion::empty();
    for p in parts {
        union = match union.disjoint_union(p) {
            Ok(u) => u,
            Err(Error::Reject) | Err(Error::Precondition(_)) => return Ok(Outcome::Skip),
            Err(e) => return Err(e),
        };
    }
    let Some((whole, mut settled)) = sample(f, &union)? else {
        return Ok(Outcome::Unsettled(Witness { regions: parts.to_vec(), values: vec![] }));
    };
    let mut values = vec![whole];
    let mut sum = ExtendedValue::ZERO;
    for p in parts {
        let Some((v, s)) = sample(f, p)? else {
            return Ok(Outcome::Unsettled(Witness { regions: parts.to_vec(), values }));
        };
        settled &= s;
        values.push(v);
        sum = match sum.checked_add(v) {
            Ok(s) => s,
            Err(Error::InfConflict) => return Ok(Outcome::Skip),
            Err(e) => return Err(e),
        };
    }
    if sum == whole {
        return Ok(Outcome::Holds);
    }
    let w = Witness { regions: parts.to_vec(), values };
    Ok(if settled { Outcome::Violation(w) } else { Outcome::Unsettled(w) })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PairShapes {
    Compacts,
    Opens,
    All,
}

fn labeled_pairs(f: &Fun, probe: &ProbeFamily, shapes: PairShapes, tally: &mut Tally) -> Result<()> {
    let kinds: &[(Kind, Kind)] = match shapes {
        PairShapes::Compacts => &[(Kind::Closed, Kind::Closed)],
        PairShapes::Opens => &[(Kind::Open, Kind::Open)],
        PairShapes::All => &[
            (Kind::Closed, Kind::Closed),
            (Kind::Open, Kind::Open),
            (Kind::Closed, Kind::Open),
            (Kind::Open, Kind::Closed),
        ],
    };
    for lab in probe.labelings() {
        if shapes == PairShapes::Compacts && lab.background != 0 {
            continue;
        }
        let (a, b) = (lab.cells(1), lab.cells(2));
        if a.is_empty() || b.is_empty() {
            continue;
        }
        for &(ka, kb) in kinds {
            let ra = GridRegion::new(a.clone(), ka);
            let rb = GridRegion::new(b.clone(), kb);
            if !ra.is_disjoint(&rb) {
                continue;
            }
            additivity_instance(f, &[ra, rb])?.record(tally);
        }
    }
    Ok(())
}

/// Additivity on disjoint compacts: labelled pairs plus random separated families of up
/// to four compacts.
pub fn check_additivity_compacts(f: &Fun, probe: &ProbeFamily) -> Result<CheckReport> {
    let mut tally = Tally::new("additivity_compacts", 0);
    labeled_pairs(f, probe, PairShapes::Compacts, &mut tally)?;
    for fam in probe.separated_families() {
        let fam: Vec<GridRegion> = fam.into_iter().filter(|k| !k.is_empty()).collect();
        if fam.len() >= 2 {
            additivity_instance(f, &fam)?.record(&mut tally);
        }
    }
    Ok(tally.finish())
}

/// Additivity on disjoint open sets whose union is open.
pub fn check_open_additivity(f: &Fun, probe: &ProbeFamily) -> Result<CheckReport> {
    let mut tally = Tally::new("additivity_open", 0);
    labeled_pairs(f, probe, PairShapes::Opens, &mut tally)?;
    Ok(tally.finish())
}

/// Additivity on every disjoint pair of open or closed regions whose union is again open
/// or closed, including `U = K ⊔ (U ∖ K)` for compacts inside opens.
pub fn check_tm1(f: &Fun, probe: &ProbeFamily) -> Result<CheckReport> {
    let mut tally = Tally::new("tm1", 0);
    labeled_pairs(f, probe, PairShapes::All, &mut tally)?;
    let atoms = f.atoms();
    for (i, u) in probe.opens().iter().enumerate() {
        if u.is_empty() {
            continue;
        }
        for k in probe.inner_compacts(u, &atoms, i as u64) {
            if k.is_empty() {
                continue;
            }
            let rest = u.set_minus_compact(&k)?;
            additivity_instance(f, &[k, rest])?.record(&mut tally);
        }
    }
    Ok(tally.finish())
}

/// `f ≥ 0` on every probe region.
pub fn check_nonnegativity(f: &Fun, probe: &ProbeFamily) -> Result<CheckReport> {
    let mut tally = Tally::new("nonnegativity", 0);
    for r in probe.regions() {
        nonnegativity_instance(f, &r)?.record(&mut tally);
    }
    Ok(tally.finish())
}

pub(crate) fn nonnegativity_instance(f: &Fun, r: &GridRegion) -> Result<Outcome> {
    let Some((v, settled)) = sample(f, r)? else {
        return Ok(Outcome::Unsettled(Witness { regions: vec![r.clone()], values: vec![] }));
    };
    if v >= ExtendedValue::ZERO {
        return Ok(Outcome::Holds);
    }
    let w = Witness { regions: vec![r.clone()], values: vec![v] };
    Ok(if settled { Outcome::Violation(w) } else { Outcome::Unsettled(w) })
}

/// Values only in `{0, 1}`.
pub fn check_simple(f: &Fun, probe: &ProbeFamily) -> Result<CheckReport> {
    let mut tally = Tally::new("simple", 0);
    for r in probe.regions() {
        simple_instance(f, &r)?.record(&mut tally);
    }
    Ok(tally.finish())
}

pub(crate) fn simple_instance(f: &Fun, r: &GridRegion) -> Result<Outcome> {
    let v = f.eval(r)?;
    if v == ExtendedValue::ZERO || v == ExtendedValue::from_int(1) {
        Ok(Outcome::Holds)
    } else {
        Ok(Outcome::Violation(Witness { regions: vec![r.clone()], values: vec![v] }))
    }
}

/// Direction of a limit: compacts (or opens) increasing to the target, or opens (or
/// compacts) decreasing to it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Approach {
    Below,
    Above,
}

fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(1i64 << e)
    } else {
        Rational::new(1, 1i64 << (-e))
    }
}

/// Largest possible area gap after `m` refinement steps of a margin-one erosion (below) or
/// dilation (above) of a region with `area` made of cells of the target's level.
fn area_slack(approach: Approach, area: Rational, m: u32) -> Rational {
    let step = pow2(1 - m as i64);
    let one = Rational::from_integer(1);
    let factor = match approach {
        Approach::Below => {
            let inner = (one - step).max(Rational::zero());
            one - inner * inner
        }
        Approach::Above => (one + step) * (one + step) - one,
    };
    area * factor
}

fn target_area(f: &Fun, target: &GridRegion) -> Option<Rational> {
    if target.is_bounded() {
        return target.area();
    }
    let w = f.meta().support_window;
    let wide = crate::grid::BoundingBox::new(w.level, w.x0 - 1, w.y0 - 1, w.x1 + 1, w.y1 + 1);
    GridRegion::closed(target.cells().refine_to(target.level().max(w.level)).intersection(
        &wide.cells_at(target.level().max(w.level)),
    ))
    .area()
}

/// Decide convergence of `f(approxₘ) → f(target)` from the last two chain members.
///
/// Exact functions must hit the target; functions with a diffuse part may stay within the
/// rigorous area slack of the chain.
pub(crate) fn limit_instance(
    f: &Fun,
    target: &GridRegion,
    tail: &[(u32, GridRegion)],
    approach: Approach,
) -> Result<Outcome> {
    let mut regions = vec![target.clone()];
    regions.extend(tail.iter().map(|(_, r)| r.clone()));
    let Some((t, mut settled)) = sample(f, target)? else {
        return Ok(Outcome::Unsettled(Witness { regions, values: vec![] }));
    };
    if !t.is_finite() {
        return Ok(Outcome::Skip);
    }
    let t = t.as_finite().expect("finite");
    let weight = f.diffuse_weight();
    let area = if weight.is_zero() { Some(Rational::zero()) } else { target_area(f, target) };
    let Some(area) = area else {
        return Ok(Outcome::Skip);
    };
    let mut values = vec![ExtendedValue::Finite(t)];
    let mut within = true;
    let mut wrong_side = false;
    for (m, r) in tail {
        let Some((v, s)) = sample(f, r)? else {
            return Ok(Outcome::Unsettled(Witness { regions, values }));
        };
        settled &= s;
        values.push(v);
        let Some(v) = v.as_finite() else {
            within = false;
            continue;
        };
        if f.is_monotone() {
            wrong_side |= match approach {
                Approach::Below => v > t,
                Approach::Above => v < t,
            };
        }
        within &= (t - v).abs() <= weight * area_slack(approach, area, *m);
    }
    if within && !wrong_side {
        return Ok(Outcome::Holds);
    }
    let stalled = values.len() >= 3 && values[values.len() - 1] == values[values.len() - 2];
    let w = Witness { regions, values };
    if !settled {
        Ok(Outcome::Unsettled(w))
    } else if wrong_side || stalled || !weight.is_zero() {
        Ok(Outcome::Violation(w))
    } else {
        Ok(Outcome::Unsettled(w))
    }
}

/// The last two members (`m = depth − 1, depth`) of the compacts increasing to an open
/// region: erosions of its refinements, clipped to a box growing with `m` when unbounded.
pub(crate) fn erosion_chain(f: &Fun, u: &GridRegion, depth: u32) -> Vec<(u32, GridRegion)> {
    let w = f.meta().support_window;
    (depth.saturating_sub(1)..=depth)
        .map(|m| {
            let level = u.level() + m;
            let mut cells = u.cells().refine(m).erode8();
            if cells.is_cofinite() {
                let grow = i64::from(m) + 1;
                let lw = level.max(w.level);
                let boxed = crate::grid::BoundingBox::new(
                    w.level,
                    w.x0 - grow,
                    w.y0 - grow,
                    w.x1 + grow,
                    w.y1 + grow,
                );
                cells = cells.refine_to(lw).intersection(&boxed.cells_at(lw));
            }
            (m, GridRegion::closed(cells))
        })
        .collect()
}

/// The last two members of the regions decreasing to a closed region: dilations of its
/// refinements.
pub(crate) fn dilation_chain(k: &GridRegion, depth: u32, kind: Kind) -> Vec<(u32, GridRegion)> {
    (depth.saturating_sub(1)..=depth)
        .map(|m| (m, GridRegion::new(k.cells().refine(m).dilate8(), kind)))
        .collect()
}

fn tail(chain: Vec<(u32, GridRegion)>) -> Vec<(u32, GridRegion)> {
    let n = chain.len();
    chain.into_iter().skip(n.saturating_sub(2)).collect()
}

/// Inner regularity on opens (compact erosions converge up) and outer regularity on
/// closed regions (open dilations converge down).
pub fn check_regularity(f: &Fun, probe: &ProbeFamily) -> Result<CheckReport> {
    let depth = probe.refinement_depth;
    let mut tally = Tally::new("regularity", depth);
    for r in probe.regions() {
        regularity_instance(f, &r, depth)?.record(&mut tally);
    }
    Ok(tally.finish())
}

pub(crate) fn regularity_instance(f: &Fun, r: &GridRegion, depth: u32) -> Result<Outcome> {
    if r.is_empty() || r.is_whole() {
        return Ok(Outcome::Skip);
    }
    if r.is_open() {
        limit_instance(f, r, &tail(erosion_chain(f, r, depth)), Approach::Below)
    } else {
        if !r.is_bounded() && !f.diffuse_weight().is_zero() {
            return Ok(Outcome::Skip);
        }
        limit_instance(f, r, &tail(dilation_chain(r, depth, Kind::Open)), Approach::Above)
    }
}

/// Continuity along monotone chains: erosion and randomized increasing open chains, and
/// decreasing compact dilation chains.
pub fn check_tau_smooth(f: &Fun, probe: &ProbeFamily) -> Result<CheckReport> {
    let depth = probe.refinement_depth;
    let mut tally = Tally::new("tau_smooth", depth);
    for (i, r) in probe.regions().iter().enumerate() {
        if r.is_empty() || r.is_whole() {
            continue;
        }
        if r.is_open() {
            let eroded: Vec<(u32, GridRegion)> = erosion_chain(f, r, depth)
                .into_iter()
                .map(|(m, k)| (m, GridRegion::open(k.cells().clone())))
                .collect();
            let randomized = randomized_chain(&eroded, r, i as u64 ^ probe.random_seed);
            limit_instance(f, r, &tail(eroded), Approach::Below)?.record(&mut tally);
            limit_instance(f, r, &tail(randomized), Approach::Below)?.record(&mut tally);
        } else if r.is_compact() {
            let chain = dilation_chain(r, depth, Kind::Closed);
            limit_instance(f, r, &tail(chain), Approach::Above)?.record(&mut tally);
        }
    }
    Ok(tally.finish())
}

/// An increasing open chain squeezed between the erosion chain and the target.
fn randomized_chain(eroded: &[(u32, GridRegion)], u: &GridRegion, seed: u64) -> Vec<(u32, GridRegion)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut prev: Option<CellSet> = None;
    let mut out = Vec::new();
    for (m, e) in eroded {
        let level = e.level();
        let room = u.cells().refine_to(level).erode8();
        let mut cells = e.cells().clone();
        if let Some(p) = &prev {
            cells = cells.union(&p.refine_to(level));
        }
        if room.is_finite() {
            let extra = room.members().iter().copied().filter(|_| rng.gen_bool(0.3));
            cells = cells.union(&CellSet::finite(level, extra));
        }
        prev = Some(cells.clone());
        out.push((*m, GridRegion::open(cells)));
    }
    out
}

/// Union of two bounded opens when it is itself a grid region `U(T ∪ T′)`.
pub(crate) fn open_union(u: &GridRegion, v: &GridRegion) -> Option<GridRegion> {
    if !u.is_open() || !v.is_open() || !u.is_bounded() || !v.is_bounded() {
        return None;
    }
    let level = u.level().max(v.level());
    let (a, b) = (u.cells().refine_to(level), v.cells().refine_to(level));
    let all = a.union(&b);
    let same_side = |cells: &[Pos]| {
        cells.iter().all(|&c| a.contains(c)) || cells.iter().all(|&c| b.contains(c))
    };
    for &(x, y) in all.members() {
        for group in [
            vec![(x, y), (x + 1, y)],
            vec![(x, y), (x, y + 1)],
            vec![(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)],
        ] {
            if group.iter().all(|&c| all.contains(c)) && !same_side(&group) {
                return None;
            }
        }
    }
    Some(GridRegion::open(all))
}

pub(crate) fn subadditivity_instance(f: &Fun, u: &GridRegion, v: &GridRegion) -> Result<Outcome> {
    let Some(uv) = open_union(u, v) else {
        return Ok(Outcome::Skip);
    };
    let regions = vec![u.clone(), v.clone()];
    let mut values = Vec::new();
    // values on opens only grow with resolution, so an unsettled union value is still a
    // valid lower bound; the two parts must be exact
    let mut settled = true;
    for (i, r) in [&uv, u, v].into_iter().enumerate() {
        let Some((x, s)) = sample(f, r)? else {
            return Ok(Outcome::Unsettled(Witness { regions, values }));
        };
        settled &= s || (i == 0 && f.is_monotone());
        values.push(x);
    }
    let sum = values[1].checked_add(values[2])?;
    if values[0] <= sum {
        return Ok(Outcome::Holds);
    }
    let w = Witness { regions, values };
    Ok(if settled { Outcome::Violation(w) } else { Outcome::Unsettled(w) })
}

/// `f(U ∪ V) ≤ f(U) + f(V)` over pairs of random rectangles and exhaustive opens.
pub fn check_subadditivity(f: &Fun, probe: &ProbeFamily, name: &str) -> Result<CheckReport> {
    let mut tally = Tally::new(name, 0);
    let mut opens = probe.rectangles();
    opens.truncate(64);
    for i in 0..opens.len() {
        for j in i + 1..opens.len() {
            subadditivity_instance(f, &opens[i], &opens[j])?.record(&mut tally);
            if tally.has_fail() {
                return Ok(tally.finish());
            }
        }
    }
    Ok(tally.finish())
}

/// The biconditional "additive on disjoint compacts ⇔ additive on disjoint opens".
pub fn check_additivity_equivalence(f: &Fun, probe: &ProbeFamily) -> Result<CheckReport> {
    let compact = check_additivity_compacts(f, probe)?;
    let open = check_open_additivity(f, probe)?;
    let probes = compact.stats.probes + open.stats.probes;
    let (verdict, witnesses) = match (compact.verdict, open.verdict) {
        (a, b) if a == b && a != Verdict::Inconclusive => (Verdict::Pass, Vec::new()),
        (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => {
            (Verdict::Inconclusive, [compact.witnesses, open.witnesses].concat())
        }
        _ => (Verdict::Fail, [compact.witnesses, open.witnesses].concat()),
    };
    Ok(CheckReport {
        check: "additivity_equivalence".into(),
        verdict,
        witnesses,
        stats: super::report::Stats { probes, depth: 0 },
    })
}

/// Limits over solid compacts: inside bounded open solids, and exhausting the plane.
pub fn check_solid_limits(f: &Fun, probe: &ProbeFamily) -> Result<CheckReport> {
    let depth = probe.refinement_depth;
    let mut tally = Tally::new("solid_limits", depth);
    for u in probe.bounded_opens() {
        if u.is_empty() || !is_solid(&u)? {
            continue;
        }
        let chain: Vec<(u32, GridRegion)> = erosion_chain(f, &u, depth)
            .into_iter()
            .filter(|(_, k)| !k.is_empty() && components(k).len() == 1)
            .map(|(m, k)| Ok((m, solid_hull(&k)?)))
            .collect::<Result<_>>()?;
        if chain.len() >= 2 {
            limit_instance(f, &u, &tail(chain), Approach::Below)?.record(&mut tally);
        }
    }
    let w = f.meta().support_window;
    let squares: Vec<(u32, GridRegion)> = (0..=depth)
        .map(|m| {
            let g = i64::from(m);
            let b = crate::grid::BoundingBox::new(w.level, w.x0 - g, w.y0 - g, w.x1 + g, w.y1 + g);
            (m, GridRegion::closed(b.cells()))
        })
        .collect();
    let whole = GridRegion::whole();
    let exact: Vec<(u32, GridRegion)> = tail(squares);
    match sample(f, &whole)? {
        Some((t, _)) if t.is_finite() => {
            let mut values = vec![t];
            let mut settled = true;
            let mut ok = true;
            for (_, k) in &exact {
                match sample(f, k)? {
                    Some((v, s)) => {
                        settled &= s;
                        ok &= v == t;
                        values.push(v);
                    }
                    None => settled = false,
                }
            }
            let mut regions = vec![whole];
            regions.extend(exact.into_iter().map(|(_, k)| k));
            let w = Witness { regions, values };
            let outcome = if ok {
                Outcome::Holds
            } else if settled {
                Outcome::Violation(w)
            } else {
                Outcome::Unsettled(w)
            };
            outcome.record(&mut tally);
        }
        _ => {}
    }
    Ok(tally.finish())
}

/// Small-set property: inside each probe open `U` some compact `C` leaves `|f|(U ∖ C)`
/// below `eps`, and `|f(A) − f(B)| < eps` for sampled `C ⊆ A ⊆ B ⊆ U`.
pub fn check_small_sets(f: &Fun, probe: &ProbeFamily, eps: Rational, cfg: &VariationConfig) -> Result<CheckReport> {
    use rand::{Rng, SeedableRng};
    let depth = probe.refinement_depth + 2;
    let mut tally = Tally::new("small_sets", depth);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(probe.random_seed ^ 0x5e7);
    let opens: Vec<GridRegion> =
        probe.bounded_opens().into_iter().filter(|u| !u.is_empty()).collect();
    let stride = (opens.len() / 32).max(1);
    for u in opens.iter().step_by(stride) {
        let mut found = false;
        let mut unsettled = false;
        let mut last = None;
        for m in 0..=depth {
            let room_set = u.cells().refine(m).erode8();
            let core = room_set.erode8();
            if core.is_empty() {
                continue;
            }
            let c = GridRegion::closed(core.clone());
            let rest = u.set_minus_compact(&c)?;
            let tv = total_variation(f, &rest, cfg)?;
            last = Some(c.clone());
            if !tv.stabilized {
                unsettled = true;
            }
            if tv.value >= ExtendedValue::Finite(eps) {
                continue;
            }
            let level = c.level();
            let room: Vec<Pos> = room_set.members().to_vec();
            let mut ok = true;
            for _ in 0..4 {
                let a_cells = CellSet::finite(level, room.iter().copied().filter(|_| rng.gen_bool(0.5)));
                let a_cells = a_cells.union(&core);
                let b_cells = a_cells.union(&CellSet::finite(
                    level,
                    room.iter().copied().filter(|_| rng.gen_bool(0.5)),
                ));
                let a = GridRegion::closed(a_cells);
                let b = GridRegion::open(b_cells.dilate8());
                if !c.is_subset(&a) || !a.is_subset(&b) || !b.is_subset(u) {
                    continue;
                }
                let diff = f.eval(&a)?.checked_sub(f.eval(&b)?)?;
                ok &= diff.abs() < ExtendedValue::Finite(eps);
            }
            if ok {
                found = true;
                break;
            }
        }
        let w = || Witness { regions: vec![u.clone()].into_iter().chain(last.clone()).collect(), values: vec![] };
        if found {
            tally.probe();
        } else if unsettled {
            Outcome::Unsettled(w()).record(&mut tally);
        } else {
            Outcome::Violation(w()).record(&mut tally);
        }
    }
    Ok(tally.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::windowed_area;
    use crate::value::rat;

    #[test]
    fn erosions_of_an_open_block_fill_it_from_inside() {
        let f = windowed_area(crate::grid::BoundingBox::new(0, -1, -1, 3, 3));
        let u = GridRegion::open(CellSet::block(0, 0, 0, 2, 2));
        let areas: Vec<_> = (0..=3)
            .map(|m| erosion_chain(&f, &u, m).last().unwrap().1.area().unwrap())
            .collect();
        assert_eq!(areas, vec![rat(0, 1), rat(1, 1), rat(9, 4), rat(49, 16)]);
    }

    #[test]
    fn dilations_shrink_to_a_closed_block() {
        let k = GridRegion::closed(CellSet::block(0, 0, 0, 1, 1));
        let areas: Vec<_> = (0..=2)
            .map(|m| dilation_chain(&k, m, Kind::Open).last().unwrap().1.area().unwrap())
            .collect();
        assert_eq!(areas, vec![rat(9, 1), rat(4, 1), rat(9, 4)]);
    }
}
