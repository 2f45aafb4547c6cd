mod common;

use std::fs;
use std::path::Path;

use common::violations;
use serde_json::json;

#[test]
fn checked_in_schemas_match_the_generated_ones() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas");
    let all = demoseg::schema::all();
    assert_eq!(fs::read_dir(&dir).unwrap().count(), all.len());
    for (name, schema) in all {
        let text = fs::read_to_string(dir.join(format!("{name}.json"))).unwrap();
        assert_eq!(text, demoseg::formats::to_json_string(&schema), "schemas/{name}.json is stale");
    }
}

#[test]
fn schemas_are_valid_draft_2020_12() {
    for (name, schema) in demoseg::schema::all() {
        assert_eq!(schema["$schema"], "https://json-schema.org/draft/2020-12/schema");
        assert!(jsonschema::meta::is_valid(&schema), "{name}");
    }
}

#[test]
fn schemas_reject_malformed_documents() {
    assert!(violations("segments", &json!([{"start_s": 0.0, "end_s": 1.0}])).is_empty());
    assert!(!violations("segments", &json!([{"start_s": 0.0}])).is_empty());
    assert!(!violations("segments", &json!([{"start_s": 0.0, "end_s": 1.0, "extra": 2}])).is_empty());
    assert!(!violations("captions", &json!([{"start_s": 0.0, "end_s": 1.0, "text": ""}])).is_empty());
    assert!(!violations("truth", &json!({"change_points_s": [1.0]})).is_empty());

    let prismatic = json!({
        "kind": "prismatic", "origin": [0, 0, 0], "direction": [1, 0, 0], "range_m": 0.3,
        "rms_residual_m": 0.001, "line_rms_residual_m": 0.001, "circle_rms_residual_m": null, "extent_m": 0.3
    });
    assert!(violations("articulation", &prismatic).is_empty(), "{:?}", violations("articulation", &prismatic));
    let mut wrong = prismatic.clone();
    wrong["kind"] = json!("revolute");
    assert!(!violations("articulation", &wrong).is_empty());
    let mut short = prismatic;
    short["direction"] = json!([1, 0]);
    assert!(!violations("articulation", &short).is_empty());
}
