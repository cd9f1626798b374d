//! Acceptance criteria, run by a custom harness that prints one `criterion N: PASS|FAIL`
//! line per criterion in order and exits non-zero when any of them fails. Pass criterion
//! numbers as arguments to run a subset.

use std::cell::RefCell;
use std::panic::{self, AssertUnwindSafe};
use std::sync::{Arc, Mutex};

use qmlab::checkers::{
    check_tau_smooth, classify, replay_witness, run_suite, ProbeFamily, Suite, Verdict,
};
use qmlab::grid::{
    halmos_split, interpolate, BoundingBox, CellSet, GridRegion, Kind, Point, DEFAULT_SPLIT_DEPTH,
};
use qmlab::measures::{
    component_majority, linear_combination, maj3, norms, point_mass, windowed_area, Class, Fun,
};
use qmlab::scenario::{decompose, distinctness_check, replay_run, Scenario};
use qmlab::solid_extension::{extend_solid, restrict_to_solid};
use qmlab::value::{rat, ExtendedValue, Rational};
use qmlab::variations::{
    jordan_check, search_cells, total_variation, variation_minus, variation_plus, Oracle,
    VariationConfig, VariationKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

thread_local! {
    static OUTCOME: RefCell<Option<(bool, String)>> = const { RefCell::new(None) };
}

fn verdict_line(n: u32, ok: bool, detail: &str) {
    let line = format!("criterion {n}: {} {detail}", if ok { "PASS" } else { "FAIL" });
    OUTCOME.with(|o| *o.borrow_mut() = Some((ok, line)));
}

fn pt(x: (i64, i64), y: (i64, i64)) -> Point {
    Point::new(rat(x.0, x.1), rat(y.0, y.1))
}

fn p1() -> Point {
    pt((1, 3), (1, 3))
}

fn p2() -> Point {
    pt((7, 3), (1, 3))
}

fn p3() -> Point {
    pt((1, 3), (7, 3))
}

fn majority() -> Fun {
    maj3(p1(), p2(), p3()).unwrap()
}

fn delta(p: Point, w: Rational) -> Fun {
    point_mass(p, w).unwrap()
}

fn combo(coeffs: &[Rational], parts: &[Fun]) -> Fun {
    linear_combination(coeffs, parts).unwrap()
}

/// maj3 − ½δ at the first majority point.
fn mu() -> Fun {
    combo(&[rat(1, 1), rat(-1, 2)], &[majority(), delta(p1(), rat(1, 1))])
}

fn dipole() -> Fun {
    combo(&[rat(1, 1), rat(-1, 1)], &[delta(p1(), rat(1, 1)), delta(pt((7, 3), (7, 3)), rat(1, 1))])
}

fn lambda() -> Fun {
    let cm = component_majority(vec![p1(), p2(), p3()], 2).unwrap();
    combo(&[rat(1, 1), rat(-1, 2)], &[cm, majority()])
}

fn cap(level: u32) -> VariationConfig {
    VariationConfig::default().with_level_cap(level)
}

/// Point-membership oracle written directly from the geometry of closed unit squares.
mod oracle {
    use super::*;

    fn in_closed_cell(px: Rational, py: Rational, level: u32, (x, y): (i64, i64)) -> bool {
        let s = Rational::from_integer(1i64 << level);
        let (lx, ly) = (Rational::from_integer(x) / s, Rational::from_integer(y) / s);
        let side = Rational::from_integer(1) / s;
        lx <= px && px <= lx + side && ly <= py && py <= ly + side
    }

    fn in_closure_union(r: &GridRegion, px: Rational, py: Rational) -> bool {
        let s = Rational::from_integer(1i64 << r.level());
        let (cx, cy) = ((px * s).floor().to_integer(), (py * s).floor().to_integer());
        (cx - 1..=cx).any(|x| {
            (cy - 1..=cy).any(|y| r.cells().contains((x, y)) && in_closed_cell(px, py, r.level(), (x, y)))
        })
    }

    /// Membership of a point, for either kind. Open regions are interiors of the closed
    /// union, probed with four diagonal neighbours closer than any lattice spacing.
    pub fn contains(r: &GridRegion, px: Rational, py: Rational, eps: Rational) -> bool {
        match r.kind() {
            Kind::Closed => in_closure_union(r, px, py),
            Kind::Open => [(1, 1), (1, -1), (-1, 1), (-1, -1)].iter().all(|&(sx, sy)| {
                in_closure_union(r, px + eps * Rational::from_integer(sx), py + eps * Rational::from_integer(sy))
            }),
        }
    }

    /// Membership bits on the lattice of spacing `2^-step` over `[lo, hi]²`.
    pub fn bits(r: &GridRegion, step: u32, lo: i64, hi: i64) -> Vec<bool> {
        let n = 1i64 << step;
        let eps = Rational::new(1, 1i64 << (step + 2));
        let mut out = Vec::new();
        for i in lo * n..=hi * n {
            for j in lo * n..=hi * n {
                out.push(contains(r, Rational::new(i, n), Rational::new(j, n), eps));
            }
        }
        out
    }
}

fn subset(a: &[bool], b: &[bool]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| !x || y)
}

fn unit_regions() -> Vec<GridRegion> {
    let probe = ProbeFamily::unit3(0, 0);
    probe
        .exhaustive_sets()
        .into_iter()
        .flat_map(|s| [GridRegion::closed(s.clone()), GridRegion::open(s)])
        .collect()
}

fn criterion_01_region_algebra() {
    let regions = unit_regions();
    let bits: Vec<Vec<bool>> = regions.iter().map(|r| oracle::bits(r, 2, -2, 5)).collect();
    let mut mismatches = 0usize;
    let mut unions = 0usize;
    for (i, a) in regions.iter().enumerate() {
        let comp = oracle::bits(&a.complement(), 2, -2, 5);
        if comp.iter().zip(&bits[i]).any(|(&c, &x)| c == x) {
            mismatches += 1;
        }
        for (j, b) in regions.iter().enumerate() {
            let (ba, bb) = (&bits[i], &bits[j]);
            if a.is_subset(b) != subset(ba, bb) {
                mismatches += 1;
            }
            let disjoint = ba.iter().zip(bb).all(|(&x, &y)| !(x && y));
            if a.is_disjoint(b) != disjoint {
                mismatches += 1;
            }
            if !disjoint || i > j {
                continue;
            }
            unions += 1;
            let joined: Vec<bool> = ba.iter().zip(bb).map(|(&x, &y)| x || y).collect();
            let cells = a.cells().union(b.cells());
            let representable = [GridRegion::closed(cells.clone()), GridRegion::open(cells)]
                .iter()
                .any(|r| oracle::bits(r, 2, -2, 5) == joined);
            match a.disjoint_union(b) {
                Ok(u) => mismatches += usize::from(oracle::bits(&u, 2, -2, 5) != joined),
                Err(qmlab::Error::Reject) => mismatches += usize::from(representable),
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }
    verdict_line(
        1,
        mismatches == 0,
        &format!("{} regions, {} disjoint unions, {mismatches} mismatches", regions.len(), unions),
    );
}

fn random_open(rng: &mut ChaCha8Rng, level: u32, window: BoundingBox, density: f64) -> GridRegion {
    let cells = window.cells_at(level);
    GridRegion::open(CellSet::finite(
        level,
        cells.members().iter().copied().filter(|_| rng.gen_bool(density)),
    ))
}

/// Level-`level` cells whose closed square lies in the union of `covers`, by the oracle.
fn covered_cells(covers: &[&GridRegion], level: u32, window: BoundingBox) -> Vec<(i64, i64)> {
    let fine = level + 1;
    let eps = Rational::new(1, 1i64 << (fine + 2));
    let n = 1i64 << fine;
    window
        .cells_at(level)
        .members()
        .iter()
        .copied()
        .filter(|&(x, y)| {
            (2 * x..=2 * x + 2).all(|i| {
                (2 * y..=2 * y + 2).all(|j| {
                    let (px, py) = (Rational::new(i, n), Rational::new(j, n));
                    covers.iter().any(|u| oracle::contains(u, px, py, eps))
                })
            })
        })
        .collect()
}

fn criterion_02_splitting_and_interpolation() {
    let window = BoundingBox::new(0, 0, 0, 3, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut splits, mut interps, mut bad) = (0, 0, 0);
    while splits < 500 {
        let u = random_open(&mut rng, 1, window, 0.7);
        let v = random_open(&mut rng, 1, window, 0.7);
        let level = rng.gen_range(1..=2);
        let room = covered_cells(&[&u, &v], level, window);
        let c = GridRegion::closed(CellSet::finite(level, room.into_iter().filter(|_| rng.gen_bool(0.6))));
        if c.is_empty() {
            continue;
        }
        splits += 1;
        let (k, d) = halmos_split(&c, &u, &v, DEFAULT_SPLIT_DEPTH).unwrap();
        let step = k.level().max(d.level()) + 1;
        let bk = oracle::bits(&k, step, -1, 4);
        let bd = oracle::bits(&d, step, -1, 4);
        let bc = oracle::bits(&c, step, -1, 4);
        let joined: Vec<bool> = bk.iter().zip(&bd).map(|(&x, &y)| x || y).collect();
        let ok = k.is_compact()
            && d.is_compact()
            && subset(&bk, &oracle::bits(&u, step, -1, 4))
            && subset(&bd, &oracle::bits(&v, step, -1, 4))
            && joined == bc;
        bad += usize::from(!ok);
    }
    while interps < 500 {
        let u = random_open(&mut rng, 1, window, 0.7);
        let level = rng.gen_range(1..=2);
        let room = covered_cells(&[&u], level, window);
        let k = GridRegion::closed(CellSet::finite(level, room.into_iter().filter(|_| rng.gen_bool(0.5))));
        if k.is_empty() {
            continue;
        }
        interps += 1;
        let v = interpolate(&k, &u).unwrap();
        let step = v.level() + 1;
        let ok = v.is_open()
            && v.is_bounded()
            && subset(&oracle::bits(&k, step, -1, 4), &oracle::bits(&v, step, -1, 4))
            && subset(&oracle::bits(&v.closure(), step, -1, 4), &oracle::bits(&u, step, -1, 4));
        bad += usize::from(!ok);
    }
    verdict_line(2, bad == 0, &format!("{splits} splits, {interps} interpolations, {bad} bad"));
}

fn criterion_03_majority_is_a_topological_measure() {
    let f = majority();
    let cfg = cap(3);
    let small = ProbeFamily::unit3(0, 3);
    let wide = ProbeFamily::new(BoundingBox::new(0, -1, -1, 5, 5), 2000, 3);
    let mut failing = Vec::new();
    for probe in [&small, &wide] {
        for r in run_suite(Suite::Tm, &f, probe, &cfg).unwrap() {
            if !r.passed() {
                failing.push(format!("{} {}", r.check, r.verdict));
            }
        }
    }
    let c = classify(&f, &wide, &cfg).unwrap();
    let sub = c.report("subadditivity").expect("subadditivity report");
    let one = ExtendedValue::from_int(1);
    let zero = ExtendedValue::from_int(0);
    let witness = sub.witnesses.iter().find(|w| w.values == [one, zero, zero]);
    let replays = witness
        .map(|w| replay_witness("subadditivity", &f, w, 0, &cfg).unwrap())
        .unwrap_or(false);
    let ok = failing.is_empty() && c.class == Class::Tm && replays;
    verdict_line(
        3,
        ok,
        &format!("class {:?}, failing checks {failing:?}, witness 1 vs 0+0 replayed: {replays}", c.class),
    );
}

fn criterion_04_jordan_identities() {
    let cfg = cap(3);
    let probe = ProbeFamily::unit3(100, 4);
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, f) in [("mu", mu()), ("dipole", dipole())] {
        let r = jordan_check(&f, &probe, &cfg).unwrap();
        ok &= r.verdict != Verdict::Fail;
        notes.push(format!("{name}: {} over {} probes", r.verdict, r.stats.probes));
    }
    verdict_line(4, ok, &notes.join(", "));
}

fn lobes() -> (GridRegion, GridRegion, GridRegion) {
    let open = |x0, y0, x1, y1| GridRegion::open(CellSet::block(0, x0, y0, x1, y1));
    (open(-1, -1, 2, 2), open(1, -1, 4, 2), open(-1, -1, 4, 2))
}

fn criterion_05_positive_variation_is_not_subadditive() {
    let f = mu();
    let cfg = cap(3);
    let (u, v, uv) = lobes();
    let plus = |r: &GridRegion| variation_plus(&f, r, &cfg).unwrap();
    let (a, b, c) = (plus(&u), plus(&v), plus(&uv));
    let half = ExtendedValue::finite(rat(1, 2));
    let ok = a.value.is_zero()
        && b.value.is_zero()
        && c.value >= half
        && a.stabilized
        && b.stabilized
        && c.stabilized;
    verdict_line(5, ok, &format!("plus(U) = {}, plus(V) = {}, plus(U ∪ V) = {}", a.value, b.value, c.value));
}

fn signed_gallery() -> Vec<(&'static str, Fun)> {
    let area = windowed_area(BoundingBox::new(0, 0, 0, 3, 3));
    let sm = combo(&[rat(1, 1), rat(-1, 18)], &[delta(p1(), rat(1, 1)), area.clone()]);
    vec![
        ("delta", delta(p1(), rat(1, 1))),
        ("area", area),
        ("maj3", majority()),
        ("mu", mu()),
        ("dipole", dipole()),
        ("lambda", lambda()),
        ("delta_minus_area", sm),
    ]
}

fn criterion_06_norm_equivalence() {
    let mut bad = Vec::new();
    let mut checked = 0;
    let probe = ProbeFamily::unit3(0, 6);
    let opens = probe.opens();
    // the connectivity-driven member has no useful search bounds; it is covered elsewhere
    for (name, f) in signed_gallery().into_iter().filter(|(n, _)| *n != "lambda") {
        let n = norms(&f, &cap(1)).unwrap();
        if !(n.norm1 <= n.norm2 && n.norm2 <= n.norm1.scale(rat(2, 1))) {
            bad.push(format!("{name}: norms {} {}", n.norm1, n.norm2));
        }
        let cfg = cap(1);
        for u in &opens {
            let p = variation_plus(&f, u, &cfg).unwrap().value;
            let m = variation_minus(&f, u, &cfg).unwrap().value;
            let t = total_variation(&f, u, &cfg).unwrap().value;
            let hat = p.max(m);
            checked += 1;
            if !(hat <= t && t <= hat.scale(rat(2, 1))) {
                bad.push(format!("{name} on {u}: {p} {m} {t}"));
            }
        }
    }
    verdict_line(6, bad.is_empty(), &format!("{checked} open probes, violations {bad:?}"));
}

fn criterion_07_tau_smoothness() {
    let probe = ProbeFamily::unit3(100, 7).with_depth(4);
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, f) in signed_gallery().into_iter().filter(|(n, _)| *n != "delta_minus_area") {
        let r = check_tau_smooth(&f, &probe).unwrap();
        ok &= r.passed() && r.stats.probes >= 200;
        notes.push(format!("{name}: {} on {} chains", r.verdict, r.stats.probes));
    }
    verdict_line(7, ok, &notes.join(", "));
}

fn bundled_scenario() -> Scenario {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/inclusions.json");
    Scenario::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn criterion_08_strict_inclusions() {
    let s = bundled_scenario();
    let mut notes = Vec::new();
    let mut ok = s.runs.len() == 3;
    for run in s.plan(None) {
        let r = s.execute(&run).unwrap();
        let f = s.function(&run.function).unwrap();
        let excluded = r.reports.iter().filter(|c| c.failed()).count();
        let replays = replay_run(&r, f, &s.config).unwrap();
        ok &= r.verdict == Verdict::Pass && r.class == run.expect && excluded > 0 && replays;
        notes.push(format!("{} as {:?} ({} excluding witnesses)", run.function, r.class.unwrap(), excluded));
    }
    verdict_line(8, ok, &notes.join(", "));
}

fn criterion_09_decomposition() {
    let f = mu();
    let cfg = cap(4);
    let probe = ProbeFamily::unit3(60, 9).with_depth(2);
    let mut notes = Vec::new();
    let mut ok = true;
    let mut halves = Vec::new();
    for base in [p1(), p2()] {
        let d = decompose(&f, base, &probe, &cfg).unwrap();
        // holes finer than the search grid leave some probes unsettled; only refutations count
        let failing: Vec<&str> = d.reports.iter().filter(|r| r.verdict == Verdict::Fail).map(|r| r.check.as_str()).collect();
        let unsettled = d.reports.iter().filter(|r| r.verdict == Verdict::Inconclusive).count();
        ok &= failing.is_empty();
        notes.push(format!("base {base}: failing {failing:?}, {unsettled} inconclusive"));
        halves.push(d.positive);
    }
    let (distinct, at) = distinctness_check(&halves[0], &halves[1], &probe.regions()).unwrap();
    notes.push(match at {
        Some((r, a, b)) => format!("halves differ on {r}: {a} vs {b}"),
        None => "both bases give the same decomposition on every probe".into(),
    });
    ok &= distinct;
    verdict_line(9, ok, &notes.join("; "));
}

fn criterion_10_grouped_matches_naive() {
    let probe = ProbeFamily::unit3(0, 10);
    let grouped = VariationConfig::default().with_oracle(Oracle::Grouped);
    let naive = VariationConfig::default().with_oracle(Oracle::Naive);
    let mut mismatches = 0;
    let mut count = 0;
    for (_, f) in [("mu", mu()), ("dipole", dipole()), ("lambda", lambda())] {
        for s in probe.exhaustive_sets() {
            count += 1;
            let a = search_cells(&f, VariationKind::Total, 0, s.members(), &grouped).unwrap();
            let b = search_cells(&f, VariationKind::Total, 0, s.members(), &naive).unwrap();
            mismatches += usize::from(a.value != b.value);
        }
    }
    verdict_line(10, mismatches == 0, &format!("{count} opens, {mismatches} mismatches"));
}

fn criterion_11_solid_round_trip() {
    let probe = ProbeFamily::unit3(500, 11);
    let regions = probe.regions();
    let mut bad = 0;
    let gallery = [("delta", delta(pt((4, 3), (5, 3)), rat(1, 1))), ("maj3", majority())];
    for (name, f) in &gallery {
        let q = restrict_to_solid(f, p2()).unwrap();
        let g = extend_solid(Arc::new(q), name, Class::Tm, f.meta().support_window).unwrap();
        bad += regions.iter().filter(|r| g.eval(r).unwrap() != f.eval(r).unwrap()).count();
    }
    verdict_line(11, bad == 0, &format!("{} regions per function, {bad} disagreements", regions.len()));
}

const CRITERIA: [(u32, fn()); 11] = [
    (1, criterion_01_region_algebra),
    (2, criterion_02_splitting_and_interpolation),
    (3, criterion_03_majority_is_a_topological_measure),
    (4, criterion_04_jordan_identities),
    (5, criterion_05_positive_variation_is_not_subadditive),
    (6, criterion_06_norm_equivalence),
    (7, criterion_07_tau_smoothness),
    (8, criterion_08_strict_inclusions),
    (9, criterion_09_decomposition),
    (10, criterion_10_grouped_matches_naive),
    (11, criterion_11_solid_round_trip),
];

fn run_one(n: u32, criterion: fn()) -> (bool, String) {
    OUTCOME.with(|o| *o.borrow_mut() = None);
    match panic::catch_unwind(AssertUnwindSafe(criterion)) {
        Ok(()) => OUTCOME
            .with(|o| o.borrow_mut().take())
            .unwrap_or_else(|| (false, format!("criterion {n}: FAIL no verdict recorded"))),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("criterion {n}: FAIL panicked: {msg}"))
        }
    }
}

fn main() {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let jobs: Vec<(u32, fn())> =
        CRITERIA.into_iter().filter(|(n, _)| wanted.is_empty() || wanted.contains(n)).collect();
    panic::set_hook(Box::new(|_| {}));
    let queue = Mutex::new(jobs.clone());
    let results = Mutex::new(Vec::new());
    let workers = std::thread::available_parallelism().map_or(2, |n| n.get()).min(4);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let Some((n, criterion)) = queue.lock().unwrap().pop() else { break };
                let outcome = run_one(n, criterion);
                results.lock().unwrap().push((n, outcome));
            });
        }
    });
    let mut results = results.into_inner().unwrap();
    results.sort_by_key(|(n, _)| *n);
    let failed = results.iter().filter(|(_, (ok, _))| !ok).count();
    for (_, (_, line)) in &results {
        println!("{line}");
    }
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
