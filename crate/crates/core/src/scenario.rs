//! JSON scenarios: named set functions, a probe family, variation settings and the checks
//! to run on them.
//!
//! Rationals are written as integers, `"p/q"` strings or `[num, den]` pairs; points as a
//! pair of rationals or a `"x,y"` string. Unknown keys anywhere are rejected.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::checkers::{
    check_additivity_equivalence, check_solid_limits, check_tau_smooth, classify, overall,
    replay_witness, run_suite, CheckReport, ProbeFamily, Suite, Tally, Verdict, Witness,
};
use crate::error::{Error, Result};
use crate::grid::{BoundingBox, GridRegion, Point};
use crate::measures::{
    component_majority, linear_combination, maj3, point_mass, unbounded_area, windowed_area,
    zero, Class, Fun, NaiveMajority,
};
use crate::solid_extension::decompose_stm;
use crate::value::{parse_rational, rat, ExtendedValue, Rational};
use crate::variations::{jordan_check, Oracle, VariationConfig, VariationFn, VariationKind};

/// What a run asks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunKind {
    Sdtm,
    Stm,
    Dtm,
    Tm,
    Classify,
    Jordan,
    TauSmooth,
    SolidLimits,
    AdditivityEquivalence,
}

impl FromStr for RunKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sdtm" => RunKind::Sdtm,
            "stm" => RunKind::Stm,
            "dtm" => RunKind::Dtm,
            "tm" => RunKind::Tm,
            "classify" => RunKind::Classify,
            "jordan" => RunKind::Jordan,
            "tau_smooth" => RunKind::TauSmooth,
            "solid_limits" => RunKind::SolidLimits,
            "additivity_equivalence" => RunKind::AdditivityEquivalence,
            _ => return Err(Error::parse("suite", format!("unknown suite `{s}`"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct Run {
    pub kind: RunKind,
    pub function: String,
    /// For `classify`: the class the function must land in.
    pub expect: Option<Class>,
}

#[derive(Clone)]
pub struct Scenario {
    pub functions: BTreeMap<String, Fun>,
    pub probe: ProbeFamily,
    pub config: VariationConfig,
    pub runs: Vec<Run>,
}

/// Outcome of one run, as written to reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub suite: RunKind,
    #[serde(rename = "fn")]
    pub function: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<Class>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<Class>,
    pub reports: Vec<CheckReport>,
}

fn keys(obj: &Map<String, Value>, loc: &str, allowed: &[&str]) -> Result<()> {
    for k in obj.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::parse(format!("{loc}/{k}"), "unknown field"));
        }
    }
    Ok(())
}

fn object<'a>(v: &'a Value, loc: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::parse(loc, "expected an object"))
}

fn field<'a>(obj: &'a Map<String, Value>, loc: &str, name: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| Error::parse(loc, format!("missing field `{name}`")))
}

fn int(v: &Value, loc: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| Error::parse(loc, "expected an integer"))
}

fn uint(v: &Value, loc: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| Error::parse(loc, "expected a nonnegative integer"))
}

fn string<'a>(v: &'a Value, loc: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| Error::parse(loc, "expected a string"))
}

pub fn rational(v: &Value, loc: &str) -> Result<Rational> {
    match v {
        Value::Number(_) => Ok(Rational::from_integer(int(v, loc)?)),
        Value::String(s) => parse_rational(s).map_err(|_| Error::parse(loc, format!("bad rational `{s}`"))),
        Value::Array(a) if a.len() == 2 => {
            let d = int(&a[1], &format!("{loc}/1"))?;
            if d == 0 {
                return Err(Error::parse(loc, "zero denominator"));
            }
            Ok(rat(int(&a[0], &format!("{loc}/0"))?, d))
        }
        _ => Err(Error::parse(loc, "expected a rational: integer, \"p/q\" or [num, den]")),
    }
}

/// A point given as `"x,y"` or as a two-element array of rationals.
pub fn point(v: &Value, loc: &str) -> Result<Point> {
    match v {
        Value::String(s) => parse_point(s).map_err(|_| Error::parse(loc, format!("bad point `{s}`"))),
        Value::Array(a) if a.len() == 2 => Ok(Point::new(
            rational(&a[0], &format!("{loc}/0"))?,
            rational(&a[1], &format!("{loc}/1"))?,
        )),
        _ => Err(Error::parse(loc, "expected a point: [x, y] or \"x,y\"")),
    }
}

/// Parse `"x,y"` with rational coordinates.
pub fn parse_point(s: &str) -> Result<Point> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| Error::parse("point", format!("expected `x,y`, got `{s}`")))?;
    Ok(Point::new(parse_rational(x.trim())?, parse_rational(y.trim())?))
}

fn window(v: &Value, loc: &str) -> Result<BoundingBox> {
    let o = object(v, loc)?;
    keys(o, loc, &["level", "x0", "y0", "x1", "y1"])?;
    let get = |k: &str| int(field(o, loc, k)?, &format!("{loc}/{k}"));
    let level = match o.get("level") {
        Some(l) => uint(l, &format!("{loc}/level"))? as u32,
        None => 0,
    };
    let b = BoundingBox::new(level, get("x0")?, get("y0")?, get("x1")?, get("y1")?);
    if b.width() <= 0 || b.height() <= 0 {
        return Err(Error::parse(loc, "empty window"));
    }
    Ok(b)
}

fn points(v: &Value, loc: &str) -> Result<Vec<Point>> {
    v.as_array()
        .ok_or_else(|| Error::parse(loc, "expected an array of points"))?
        .iter()
        .enumerate()
        .map(|(i, p)| point(p, &format!("{loc}/{i}")))
        .collect()
}

/// Build a set function from its JSON description. `{"fn": "ref", "name": ..}` looks up an
/// earlier entry of `named`.
pub fn build_function(v: &Value, loc: &str, named: &BTreeMap<String, Fun>) -> Result<Fun> {
    let o = object(v, loc)?;
    let tag = string(field(o, loc, "fn")?, &format!("{loc}/fn"))?;
    let sub = |k: &str| format!("{loc}/{k}");
    match tag {
        "delta" | "point_mass" => {
            keys(o, loc, &["fn", "p", "w"])?;
            let w = match o.get("w") {
                Some(w) => rational(w, &sub("w"))?,
                None => Rational::from_integer(1),
            };
            point_mass(point(field(o, loc, "p")?, &sub("p"))?, w)
        }
        "area" => {
            keys(o, loc, &["fn", "window"])?;
            Ok(windowed_area(window(field(o, loc, "window")?, &sub("window"))?))
        }
        "unbounded_area" => {
            keys(o, loc, &["fn"])?;
            Ok(unbounded_area())
        }
        "zero" => {
            keys(o, loc, &["fn"])?;
            Ok(zero())
        }
        "maj3" => {
            keys(o, loc, &["fn", "p1", "p2", "p3"])?;
            let p = |k: &str| point(field(o, loc, k)?, &sub(k));
            maj3(p("p1")?, p("p2")?, p("p3")?)
        }
        "component_majority" | "naive_majority" => {
            keys(o, loc, &["fn", "points", "threshold"])?;
            let pts = points(field(o, loc, "points")?, &sub("points"))?;
            let threshold = uint(field(o, loc, "threshold")?, &sub("threshold"))? as usize;
            if tag == "naive_majority" {
                NaiveMajority::new(pts, threshold)
            } else {
                component_majority(pts, threshold)
            }
        }
        "lincomb" => {
            keys(o, loc, &["fn", "coeffs", "parts"])?;
            let coeffs: Vec<Rational> = field(o, loc, "coeffs")?
                .as_array()
                .ok_or_else(|| Error::parse(sub("coeffs"), "expected an array"))?
                .iter()
                .enumerate()
                .map(|(i, c)| rational(c, &format!("{loc}/coeffs/{i}")))
                .collect::<Result<_>>()?;
            let parts: Vec<Fun> = field(o, loc, "parts")?
                .as_array()
                .ok_or_else(|| Error::parse(sub("parts"), "expected an array"))?
                .iter()
                .enumerate()
                .map(|(i, p)| build_function(p, &format!("{loc}/parts/{i}"), named))
                .collect::<Result<_>>()?;
            if coeffs.len() != parts.len() {
                return Err(Error::parse(loc, "coeffs and parts differ in length"));
            }
            linear_combination(&coeffs, &parts)
        }
        "variation" => {
            keys(o, loc, &["fn", "kind", "of", "level_cap"])?;
            let kind = match string(field(o, loc, "kind")?, &sub("kind"))? {
                "plus" => VariationKind::Plus,
                "minus" => VariationKind::Minus,
                "total" => VariationKind::Total,
                k => return Err(Error::parse(sub("kind"), format!("unknown variation `{k}`"))),
            };
            let base = build_function(field(o, loc, "of")?, &sub("of"), named)?;
            let mut cfg = VariationConfig::default();
            if let Some(c) = o.get("level_cap") {
                cfg.level_cap = uint(c, &sub("level_cap"))? as u32;
            }
            Ok(VariationFn::new(base, kind, cfg).shared())
        }
        "ref" => {
            keys(o, loc, &["fn", "name"])?;
            let name = string(field(o, loc, "name")?, &sub("name"))?;
            named
                .get(name)
                .cloned()
                .ok_or_else(|| Error::UnknownFunction(name.to_string()))
        }
        other => Err(Error::UnknownFunction(other.to_string())),
    }
}

fn parse_probe(v: &Value) -> Result<ProbeFamily> {
    let loc = "/probe";
    let o = object(v, loc)?;
    keys(
        o,
        loc,
        &["window", "exhaustive_level", "random_count", "random_seed", "refinement_depth", "random_levels"],
    )?;
    let mut p = ProbeFamily::new(window(field(o, loc, "window")?, "/probe/window")?, 200, 0);
    let get = |k: &str| o.get(k).map(|v| uint(v, &format!("{loc}/{k}"))).transpose();
    if let Some(x) = get("exhaustive_level")? {
        p.exhaustive_level = x as u32;
    }
    if let Some(x) = get("random_count")? {
        p.random_count = x as usize;
    }
    if let Some(x) = get("random_seed")? {
        p.random_seed = x;
    }
    if let Some(x) = get("refinement_depth")? {
        p.refinement_depth = x as u32;
    }
    if let Some(x) = get("random_levels")? {
        p.random_levels = x as u32;
    }
    Ok(p)
}

fn parse_config(v: &Value) -> Result<VariationConfig> {
    let loc = "/variation";
    let o = object(v, loc)?;
    keys(o, loc, &["level_cap", "budget", "closed_dilations", "oracle"])?;
    let mut cfg = VariationConfig::default();
    let get = |k: &str| o.get(k).map(|v| uint(v, &format!("{loc}/{k}"))).transpose();
    if let Some(x) = get("level_cap")? {
        cfg.level_cap = x as u32;
    }
    if let Some(x) = get("budget")? {
        cfg.budget = x as usize;
    }
    if let Some(x) = get("closed_dilations")? {
        cfg.closed_dilations = x as u32;
    }
    if let Some(x) = o.get("oracle") {
        cfg.oracle = Oracle::from_str(string(x, "/variation/oracle")?)
            .map_err(|_| Error::parse("/variation/oracle", "unknown oracle"))?;
    }
    Ok(cfg)
}

pub fn parse_class(s: &str, loc: &str) -> Result<Class> {
    Ok(match s.to_ascii_uppercase().as_str() {
        "MEASURE" => Class::Measure,
        "SM" => Class::Sm,
        "TM" => Class::Tm,
        "DTM" => Class::Dtm,
        "STM" => Class::Stm,
        "SDTM" => Class::Sdtm,
        "UNKNOWN" => Class::Unknown,
        _ => return Err(Error::parse(loc, format!("unknown class `{s}`"))),
    })
}

fn default_probe() -> ProbeFamily {
    ProbeFamily::unit3(200, 0)
}

impl Scenario {
    /// Parse a scenario document. A bare function description (an object with an `fn` key)
    /// is accepted as a one-function scenario named `f` with default settings.
    pub fn from_json(text: &str) -> Result<Scenario> {
        let v: Value = serde_json::from_str(text).map_err(|e| {
            Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
        })?;
        let o = object(&v, "")?;
        if o.contains_key("fn") {
            let mut functions = BTreeMap::new();
            let f = build_function(&v, "", &functions)?;
            functions.insert("f".to_string(), f);
            return Ok(Scenario {
                functions,
                probe: default_probe(),
                config: VariationConfig::default(),
                runs: Vec::new(),
            });
        }
        keys(o, "", &["functions", "probe", "variation", "runs"])?;
        let fo = object(field(o, "", "functions")?, "/functions")?;
        let mut functions = BTreeMap::new();
        // later entries may refer to earlier ones, so resolve references until stable
        let mut pending: Vec<(&String, &Value)> = fo.iter().collect();
        while !pending.is_empty() {
            let before = pending.len();
            let mut still = Vec::new();
            let mut last_err = None;
            for (name, desc) in pending {
                match build_function(desc, &format!("/functions/{name}"), &functions) {
                    Ok(f) => {
                        functions.insert(name.clone(), f);
                    }
                    Err(Error::UnknownFunction(n)) if fo.contains_key(&n) => {
                        last_err = Some(Error::UnknownFunction(n));
                        still.push((name, desc));
                    }
                    Err(e) => return Err(e),
                }
            }
            if still.len() == before {
                return Err(last_err.unwrap_or(Error::parse("/functions", "cyclic references")));
            }
            pending = still;
        }
        let probe = o.get("probe").map(parse_probe).transpose()?.unwrap_or_else(default_probe);
        let config = o.get("variation").map(parse_config).transpose()?.unwrap_or_default();
        let mut runs = Vec::new();
        if let Some(rs) = o.get("runs") {
            let rs = rs.as_array().ok_or_else(|| Error::parse("/runs", "expected an array"))?;
            for (i, r) in rs.iter().enumerate() {
                let loc = format!("/runs/{i}");
                let ro = object(r, &loc)?;
                keys(ro, &loc, &["suite", "fn", "expect"])?;
                let kind = RunKind::from_str(string(field(ro, &loc, "suite")?, &loc)?)
                    .map_err(|_| Error::parse(format!("{loc}/suite"), "unknown suite"))?;
                let function = string(field(ro, &loc, "fn")?, &loc)?.to_string();
                if !functions.contains_key(&function) {
                    return Err(Error::UnknownFunction(function));
                }
                let expect = ro
                    .get("expect")
                    .map(|e| parse_class(string(e, &loc)?, &format!("{loc}/expect")))
                    .transpose()?;
                runs.push(Run { kind, function, expect });
            }
        }
        Ok(Scenario { functions, probe, config, runs })
    }

    pub fn function(&self, name: &str) -> Result<&Fun> {
        self.functions
            .get(name)
            .ok_or_else(|| Error::UnknownFunction(name.to_string()))
    }

    /// Runs of the scenario, or `kind` applied to every function when given.
    pub fn plan(&self, kind: Option<RunKind>) -> Vec<Run> {
        match kind {
            Some(kind) => self
                .functions
                .keys()
                .map(|name| Run { kind, function: name.clone(), expect: None })
                .collect(),
            None => self.runs.clone(),
        }
    }

    pub fn execute(&self, run: &Run) -> Result<RunReport> {
        let f = self.function(&run.function)?;
        let (probe, cfg) = (&self.probe, &self.config);
        let suite = |s: Suite| run_suite(s, f, probe, cfg);
        let mut class = None;
        let reports = match run.kind {
            RunKind::Sdtm => suite(Suite::Sdtm)?,
            RunKind::Stm => suite(Suite::Stm)?,
            RunKind::Dtm => suite(Suite::Dtm)?,
            RunKind::Tm => suite(Suite::Tm)?,
            RunKind::Classify => {
                let c = classify(f, probe, cfg)?;
                class = Some(c.class);
                c.reports
            }
            RunKind::Jordan => vec![jordan_check(f, probe, cfg)?],
            RunKind::TauSmooth => vec![check_tau_smooth(f, probe)?],
            RunKind::SolidLimits => vec![check_solid_limits(f, probe)?],
            RunKind::AdditivityEquivalence => vec![check_additivity_equivalence(f, probe)?],
        };
        let verdict = match class {
            Some(c) => self.classification_verdict(f, c, run.expect, &reports)?,
            None => overall(&reports),
        };
        Ok(RunReport {
            suite: run.kind,
            function: run.function.clone(),
            verdict,
            class,
            expected: run.expect,
            reports,
        })
    }

    /// A classification passes when it hits the expected class and every witness that
    /// excludes a stronger class replays.
    fn classification_verdict(
        &self,
        f: &Fun,
        class: Class,
        expect: Option<Class>,
        reports: &[CheckReport],
    ) -> Result<Verdict> {
        for r in reports.iter().filter(|r| r.failed()) {
            for w in &r.witnesses {
                if !replay_witness(&r.check, f, w, r.stats.depth, &self.config)? {
                    return Ok(Verdict::Fail);
                }
            }
        }
        Ok(match expect {
            Some(e) if e != class => {
                if reports.iter().any(|r| r.verdict == Verdict::Inconclusive) {
                    Verdict::Inconclusive
                } else {
                    Verdict::Fail
                }
            }
            _ => Verdict::Pass,
        })
    }

    pub fn run_all(&self, kind: Option<RunKind>) -> Result<Vec<RunReport>> {
        self.plan(kind).iter().map(|r| self.execute(r)).collect()
    }
}

/// Replay every failing witness of a run; true when all of them reproduce.
pub fn replay_run(report: &RunReport, f: &Fun, cfg: &VariationConfig) -> Result<bool> {
    for r in report.reports.iter().filter(|r| r.failed()) {
        for w in &r.witnesses {
            if !replay_witness(&r.check, f, w, r.stats.depth, cfg)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The two halves of a decomposition, with their checks.
pub struct Decomposition {
    pub positive: Fun,
    pub negative: Fun,
    pub reports: Vec<CheckReport>,
}

/// Decompose a signed topological measure at base point `p`, check that both halves are
/// topological measures and that their difference reproduces `mu` on the probes.
pub fn decompose(mu: &Fun, p: Point, probe: &ProbeFamily, cfg: &VariationConfig) -> Result<Decomposition> {
    let (positive, negative) = decompose_stm(mu, p, cfg)?;
    let mut reports = Vec::new();
    for (name, half) in [("positive", &positive), ("negative", &negative)] {
        for mut r in run_suite(Suite::Tm, half, probe, cfg)? {
            r.check = format!("{name}_{}", r.check);
            reports.push(r);
        }
    }
    reports.push(difference_check(mu, &positive, &negative, probe)?);
    Ok(Decomposition { positive, negative, reports })
}

fn difference_check(mu: &Fun, positive: &Fun, negative: &Fun, probe: &ProbeFamily) -> Result<CheckReport> {
    let mut tally = Tally::new("difference", 0);
    for r in probe.regions() {
        tally.probe();
        let m = mu.eval(&r)?;
        let pair = positive.eval(&r).and_then(|a| Ok((a, negative.eval(&r)?)));
        let (a, b) = match pair {
            Ok(x) => x,
            Err(Error::VariationUnstable(_)) => {
                tally.unsettled(Witness { regions: vec![r], values: vec![m] });
                continue;
            }
            Err(e) => return Err(e),
        };
        if a.checked_sub(b)? != m {
            tally.fail(Witness { regions: vec![r], values: vec![m, a, b] });
        }
    }
    Ok(tally.finish())
}

/// Regions where two set functions differ, as a check that passes when there are some.
pub fn distinctness_check(f: &Fun, g: &Fun, regions: &[GridRegion]) -> Result<(bool, Option<(GridRegion, ExtendedValue, ExtendedValue)>)> {
    for r in regions {
        let (a, b) = match (f.eval(r), g.eval(r)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(Error::VariationUnstable(_)), _) | (_, Err(Error::VariationUnstable(_))) => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        if a != b {
            return Ok((true, Some((r.clone(), a, b))));
        }
    }
    Ok((false, None))
}

/// `(m, f(K_m))` along the compacts `K_m = K(erode₈(refineᵐ T))` increasing to a bounded
/// open `U(T)`, for convergence plots.
pub fn convergence_rows(f: &Fun, u: &GridRegion, depth: u32) -> Result<Vec<(u32, ExtendedValue)>> {
    if !u.is_open() || !u.is_bounded() {
        return Err(Error::Precondition("convergence rows need a bounded open region".into()));
    }
    (0..=depth)
        .map(|m| {
            let k = GridRegion::closed(u.cells().refine(m).erode8());
            Ok((m, f.eval(&k)?))
        })
        .collect()
}
