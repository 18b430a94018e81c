use std::path::{Path, PathBuf};

use pattern_forge::spec::{parse_spec, to_canonical_json};
use serde_json::{json, Value};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn validator() -> jsonschema::Validator {
    let text = std::fs::read_to_string(root().join("schema/pattern-spec.schema.json")).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

fn gallery_specs() -> Vec<(PathBuf, Value)> {
    let dir = root().join("gallery/specs");
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .map(|p| {
            let v = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
            (p, v)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

#[test]
fn gallery_specs_validate_against_schema() {
    let v = validator();
    let specs = gallery_specs();
    assert!(specs.len() > 30);
    for (path, doc) in specs {
        let errors: Vec<String> = v.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{}: {errors:?}", path.display());
        parse_spec(serde_json::to_string(&doc).unwrap().as_bytes()).unwrap();
    }
}

#[test]
fn canonical_output_validates() {
    let v = validator();
    for (path, doc) in gallery_specs() {
        let spec = parse_spec(serde_json::to_string(&doc).unwrap().as_bytes()).unwrap();
        let canon: Value = serde_json::from_str(&to_canonical_json(&spec)).unwrap();
        assert!(v.is_valid(&canon), "{}", path.display());
    }
}

#[test]
fn schema_and_parser_agree_on_rejections() {
    let v = validator();
    let base = json!({
        "spec_version": 1,
        "arrangement": {"kind": "lattice", "lattice": {"cell": {"shape": "square", "a": 10}}},
        "groups": [{"shape": "circle", "size": 4}]
    });
    assert!(v.is_valid(&base));
    let bad = [
        json!({"arrangement": base["arrangement"], "groups": base["groups"]}),
        json!({"spec_version": 2, "arrangement": base["arrangement"], "groups": base["groups"]}),
        json!({"spec_version": 1, "arrangement": base["arrangement"], "groups": []}),
        json!({"spec_version": 1, "arrangement": base["arrangement"], "groups": [{"shape": "blob", "size": 4}]}),
        json!({"spec_version": 1, "arrangement": base["arrangement"], "groups": [{"shape": "circle", "size": -1}]}),
        json!({"spec_version": 1, "arrangement": base["arrangement"], "groups": base["groups"], "extra": true}),
        json!({"spec_version": 1, "arrangement": {"kind": "lattice", "lattice": {"cell": {"shape": "square", "a": 0}}}, "groups": base["groups"]}),
        json!({"spec_version": 1, "arrangement": base["arrangement"], "groups": base["groups"], "fit": {"mode": "crop"}}),
    ];
    for doc in bad {
        assert!(!v.is_valid(&doc), "schema accepted {doc}");
        assert!(parse_spec(doc.to_string().as_bytes()).is_err(), "parser accepted {doc}");
    }
}
