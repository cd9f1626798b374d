use qmlab::grid::{CellSet, GridRegion};
use qmlab::measures::Class;
use qmlab::scenario::{parse_point, rational, RunKind, Scenario};
use qmlab::value::{rat, ExtendedValue};
use qmlab::Error;
use serde_json::json;

fn parse_error(text: &str) -> Error {
    Scenario::from_json(text).err().expect("should not parse")
}

#[test]
fn rational_forms() {
    assert_eq!(rational(&json!([3, 6]), "x").unwrap(), rat(1, 2));
    assert_eq!(rational(&json!("-2/4"), "x").unwrap(), rat(-1, 2));
    assert_eq!(rational(&json!(5), "x").unwrap(), rat(5, 1));
    assert!(matches!(rational(&json!([1, 0]), "x"), Err(Error::Parse { .. })));
    assert!(matches!(rational(&json!(0.5), "x"), Err(Error::Parse { .. })));
    assert_eq!(parse_point("1/3,2/3").unwrap().x, rat(1, 3));
}

#[test]
fn bare_function_document() {
    let s = Scenario::from_json(r#"{"fn": "delta", "p": [[1, 3], "1/3"]}"#).unwrap();
    let f = s.function("f").unwrap();
    assert_eq!(f.eval(&GridRegion::whole()).unwrap(), ExtendedValue::finite(rat(1, 1)));
    assert!(s.runs.is_empty());
}

#[test]
fn unknown_fields_are_rejected() {
    let e = parse_error(r#"{"fn": "delta", "p": ["1/3", "1/3"], "weight": 2}"#);
    assert!(matches!(e, Error::Parse { ref location, .. } if location.ends_with("weight")), "{e}");
    let e = parse_error(r#"{"functions": {}, "extra": 1}"#);
    assert!(matches!(e, Error::Parse { .. }));
    let e = parse_error(r#"{"functions": {"z": {"fn": "zero"}}, "runs": [{"suite": "tm", "fn": "z", "seed": 1}]}"#);
    assert!(matches!(e, Error::Parse { .. }));
}

#[test]
fn unknown_and_missing_functions() {
    assert_eq!(parse_error(r#"{"fn": "wobble"}"#), Error::UnknownFunction("wobble".into()));
    let e = parse_error(r#"{"functions": {"a": {"fn": "ref", "name": "nowhere"}}}"#);
    assert_eq!(e, Error::UnknownFunction("nowhere".into()));
    let e = parse_error(r#"{"functions": {"z": {"fn": "zero"}}, "runs": [{"suite": "tm", "fn": "y"}]}"#);
    assert_eq!(e, Error::UnknownFunction("y".into()));
}

#[test]
fn references_resolve_in_any_order() {
    let s = Scenario::from_json(
        r#"{"functions": {
            "a_sum": {"fn": "lincomb", "coeffs": [1, 1], "parts": [{"fn": "ref", "name": "z_one"}, {"fn": "ref", "name": "z_one"}]},
            "z_one": {"fn": "delta", "p": ["1/3", "1/3"]}
        }}"#,
    )
    .unwrap();
    let cell = GridRegion::closed(CellSet::finite(0, [(0, 0)]));
    assert_eq!(s.function("a_sum").unwrap().eval(&cell).unwrap(), ExtendedValue::finite(rat(2, 1)));
}

#[test]
fn bundled_scenario_parses() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/inclusions.json")).unwrap();
    let s = Scenario::from_json(&text).unwrap();
    assert_eq!(s.runs.len(), 3);
    assert!(s.runs.iter().all(|r| r.kind == RunKind::Classify));
    let expected: Vec<_> = s.runs.iter().map(|r| r.expect.unwrap()).collect();
    assert_eq!(expected, [Class::Sm, Class::Stm, Class::Sdtm]);
    assert_eq!(s.plan(Some(RunKind::Tm)).len(), s.functions.len());
}
