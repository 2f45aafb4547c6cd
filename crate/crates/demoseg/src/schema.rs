//! JSON schemas (draft 2020-12) of every document the CLI reads or writes.
//! `demoseg schema <name>` prints one; copies live in `schemas/`.

use serde_json::{json, Value};

const DRAFT: &str = "https://json-schema.org/draft/2020-12/schema";

fn num() -> Value {
    json!({"type": "number"})
}

fn nonneg() -> Value {
    json!({"type": "number", "minimum": 0})
}

fn unit() -> Value {
    json!({"type": "number", "minimum": 0, "maximum": 1})
}

fn count() -> Value {
    json!({"type": "integer", "minimum": 0})
}

fn vec3() -> Value {
    json!({"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3})
}

fn indices() -> Value {
    json!({"type": "array", "items": count()})
}

fn object(props: Value, required: &[&str]) -> Value {
    json!({
        "type": "object",
        "properties": props,
        "required": required,
        "additionalProperties": false
    })
}

fn document(title: &str, body: Value) -> Value {
    let mut v = json!({"$schema": DRAFT, "title": title});
    for (k, x) in body.as_object().expect("schema body is an object") {
        v[k] = x.clone();
    }
    v
}

fn segment() -> Value {
    object(json!({"start_s": num(), "end_s": num()}), &["start_s", "end_s"])
}

fn caption() -> Value {
    object(
        json!({"start_s": num(), "end_s": num(), "text": {"type": "string", "minLength": 1}}),
        &["start_s", "end_s", "text"],
    )
}

fn cp_score() -> Value {
    object(
        json!({"recall": unit(), "false_positive_rate": unit(), "n_cr": count(), "n_cp": count(), "n_al": count()}),
        &["recall", "false_positive_rate", "n_cr", "n_cp", "n_al"],
    )
}

fn ap_list() -> Value {
    json!({"type": "array", "items": object(json!({"iou_threshold": unit(), "ap": unit()}), &["iou_threshold", "ap"])})
}

fn match_score() -> Value {
    object(
        json!({
            "ap_at": ap_list(),
            "per_instruction_iou": {"type": "array", "items": unit()},
            "error": {"type": "string"}
        }),
        &["ap_at", "per_instruction_iou"],
    )
}

fn mean_cp_score() -> Value {
    object(
        json!({"recall": unit(), "false_positive_rate": unit(), "pooled": cp_score()}),
        &["recall", "false_positive_rate", "pooled"],
    )
}

fn articulation_model() -> Value {
    let base = json!({
        "kind": {"enum": ["prismatic", "revolute"]},
        "direction": vec3(),
        "origin": vec3(),
        "range_m": nonneg(),
        "axis": vec3(),
        "center": vec3(),
        "radius": {"type": "number", "exclusiveMinimum": 0},
        "swept_angle_rad": nonneg(),
        "rms_residual_m": nonneg(),
        "line_rms_residual_m": nonneg(),
        "circle_rms_residual_m": {"type": ["number", "null"], "minimum": 0},
        "extent_m": nonneg()
    });
    let mut v = object(
        base,
        &["kind", "rms_residual_m", "line_rms_residual_m", "circle_rms_residual_m", "extent_m"],
    );
    v["oneOf"] = json!([
        {
            "properties": {"kind": {"const": "prismatic"}},
            "required": ["direction", "origin", "range_m"],
            "not": {"anyOf": [{"required": ["axis"]}, {"required": ["center"]}, {"required": ["radius"]}, {"required": ["swept_angle_rad"]}]}
        },
        {
            "properties": {"kind": {"const": "revolute"}},
            "required": ["axis", "center", "radius", "swept_angle_rad"],
            "not": {"anyOf": [{"required": ["direction"]}, {"required": ["origin"]}, {"required": ["range_m"]}]}
        }
    ]);
    v
}

pub fn segments() -> Value {
    document("segments", json!({"type": "array", "items": segment(), "minItems": 1}))
}

pub fn captions() -> Value {
    document("captions", json!({"type": "array", "items": caption()}))
}

pub fn truth() -> Value {
    document(
        "truth",
        object(
            json!({
                "change_points_s": {"type": "array", "items": num()},
                "instructions": {"type": "array", "items": caption(), "minItems": 1}
            }),
            &["change_points_s", "instructions"],
        ),
    )
}

pub fn assignment() -> Value {
    let terms = object(json!({"skip": nonneg(), "dist": nonneg(), "group": nonneg()}), &["skip", "dist", "group"]);
    let instruction = object(
        json!({
            "index": count(),
            "text": {"type": "string"},
            "start_s": num(),
            "end_s": num(),
            "segment_indices": {"type": "array", "items": count(), "minItems": 1},
            "skipped_before": indices(),
            "cost": nonneg(),
            "cost_terms": terms
        }),
        &["index", "text", "start_s", "end_s", "segment_indices", "skipped_before", "cost", "cost_terms"],
    );
    document(
        "assignment",
        object(
            json!({
                "instructions": {"type": "array", "items": instruction, "minItems": 1},
                "skipped_segments": indices(),
                "trailing_skip_cost": nonneg(),
                "total_cost": nonneg(),
                "segments": {"type": "array", "items": caption()},
                "distances": {"type": "array", "items": {"type": "array", "items": nonneg()}}
            }),
            &["instructions", "skipped_segments", "trailing_skip_cost", "total_cost"],
        ),
    )
}

pub fn articulation() -> Value {
    document("articulation", articulation_model())
}

pub fn articulation_report() -> Value {
    let entry = object(
        json!({
            "instruction_index": count(),
            "text": {"type": "string"},
            "keyword": {"type": "string"},
            "start_s": num(),
            "end_s": num(),
            "samples": count(),
            "model": articulation_model(),
            "error": {"type": "string"}
        }),
        &["instruction_index", "text", "keyword", "start_s", "end_s", "samples"],
    );
    document(
        "articulation_report",
        object(json!({"articulations": {"type": "array", "items": entry}}), &["articulations"]),
    )
}

fn split_eval_body() -> Value {
    let period = |score: Value| object(json!({"period_s": {"type": "number", "exclusiveMinimum": 0}, "score": score}), &["period_s", "score"]);
    let video = object(
        json!({
            "name": {"type": "string"},
            "velocity": cp_score(),
            "uniform": {"type": "array", "items": period(cp_score())}
        }),
        &["name", "velocity", "uniform"],
    );
    object(
        json!({
            "margin_s": {"type": "number", "exclusiveMinimum": 0},
            "smoothing_window": {"type": "integer", "minimum": 1},
            "videos": {"type": "array", "items": video, "minItems": 1},
            "mean": object(
                json!({"velocity": mean_cp_score(), "uniform": {"type": "array", "items": period(mean_cp_score())}}),
                &["velocity", "uniform"]
            )
        }),
        &["margin_s", "smoothing_window", "videos", "mean"],
    )
}

fn match_eval_body() -> Value {
    let video = object(
        json!({"name": {"type": "string"}, "velocity": match_score(), "uniform": match_score()}),
        &["name", "velocity"],
    );
    object(
        json!({
            "iou_thresholds": {"type": "array", "items": unit()},
            "uniform_period_s": {"type": "number", "exclusiveMinimum": 0},
            "caption_provider": {"enum": ["file", "mock"]},
            "error_rate": unit(),
            "videos": {"type": "array", "items": video, "minItems": 1},
            "mean": object(json!({"velocity": ap_list(), "uniform": ap_list()}), &["velocity"])
        }),
        &["iou_thresholds", "caption_provider", "error_rate", "videos", "mean"],
    )
}

pub fn split_eval() -> Value {
    document("split_eval", split_eval_body())
}

pub fn match_eval() -> Value {
    document("match_eval", match_eval_body())
}

pub fn eval() -> Value {
    document(
        "eval",
        object(json!({"change_points": split_eval_body(), "matching": match_eval_body()}), &["change_points", "matching"]),
    )
}

pub fn manifest() -> Value {
    let pair = |item: Value| json!({"type": "array", "items": item, "minItems": 2, "maxItems": 2});
    document(
        "manifest",
        object(
            json!({
                "count": count(),
                "seed": count(),
                "sigma_m": nonneg(),
                "waypoints": pair(count()),
                "reach_duration_s": pair(nonneg()),
                "reach_distance_m": pair(nonneg()),
                "dwells": count(),
                "dwell_duration_s": pair(nonneg()),
                "embedding_dim": {"type": "integer", "minimum": 1},
                "embeddings": {"type": "string"},
                "videos": {"type": "array", "items": {"type": "string"}}
            }),
            &[
                "count", "seed", "sigma_m", "waypoints", "reach_duration_s", "reach_distance_m", "dwells",
                "dwell_duration_s", "embedding_dim", "embeddings", "videos",
            ],
        ),
    )
}

/// Every schema by name.
pub fn all() -> Vec<(&'static str, Value)> {
    vec![
        ("segments", segments()),
        ("captions", captions()),
        ("truth", truth()),
        ("assignment", assignment()),
        ("articulation", articulation()),
        ("articulation_report", articulation_report()),
        ("split_eval", split_eval()),
        ("match_eval", match_eval()),
        ("eval", eval()),
        ("manifest", manifest()),
    ]
}

pub fn get(name: &str) -> Option<Value> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, v)| v)
}
