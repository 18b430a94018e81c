use pattern_forge_cli::serve::handle;
use serde_json::{json, Value};

fn grid() -> Value {
    json!({
        "spec_version": 1,
        "arrangement": {"kind": "lattice", "lattice": {"cell": {"shape": "square", "a": 10}}},
        "groups": [{"shape": "circle", "size": 4}]
    })
}

#[test]
fn render_returns_svg() {
    let body = json!({"spec": grid(), "host": "rect:100x100"}).to_string();
    let r = handle("POST", "/render", body.as_bytes(), None);
    assert_eq!(r.status, 200);
    assert_eq!(r.content_type, "image/svg+xml");
    let text = String::from_utf8(r.body).unwrap();
    assert!(text.starts_with("<?xml"));
    assert_eq!(text.matches("<circle").count(), 121);
}

#[test]
fn render_matches_cli_library_path() {
    let body = json!({"spec": grid(), "host": {"kind": "area", "polygon": [[0,0],[50,0],[50,50],[0,50]]}, "precision": 2}).to_string();
    let r = handle("POST", "/render", body.as_bytes(), None);
    let spec = pattern_forge::parse_spec(grid().to_string().as_bytes()).unwrap();
    let host = pattern_forge::HostSymbol::rect(50.0, 50.0).unwrap();
    let opts = pattern_forge::RenderOptions { precision: 2, ..Default::default() };
    let direct = pattern_forge_cli::render(&spec, &host, None, &opts).unwrap();
    assert_eq!(String::from_utf8(r.body).unwrap(), direct);
}

#[test]
fn metrics_returns_json() {
    let body = json!({"spec": grid(), "host": "rect:100x100", "supersample": 8}).to_string();
    let r = handle("POST", "/metrics", body.as_bytes(), None);
    assert_eq!(r.status, 200);
    assert_eq!(r.content_type, "application/json");
    let m: Value = serde_json::from_slice(&r.body).unwrap();
    assert!((m["ink_ratio"].as_f64().unwrap() - 0.12566).abs() < 2e-3);
    assert_eq!(m["resolution"], 8);
    assert_eq!(m["solid_fill"], false);
    assert!(m["regional_shade"]["l"].is_number());
}

#[test]
fn schema_is_served() {
    let r = handle("GET", "/schema", b"", None);
    assert_eq!(r.status, 200);
    let s: Value = serde_json::from_slice(&r.body).unwrap();
    assert_eq!(s["$defs"]["pattern"]["properties"]["spec_version"]["const"], 1);
}

#[test]
fn bad_spec_is_400_with_path() {
    let mut spec = grid();
    spec["groups"][0]["size"] = json!(-4);
    let body = json!({"spec": spec, "host": "rect:100x100"}).to_string();
    let r = handle("POST", "/render", body.as_bytes(), None);
    assert_eq!(r.status, 400);
    let e: Value = serde_json::from_slice(&r.body).unwrap();
    assert!(e["path"].as_str().unwrap().starts_with("/spec/groups/0"));

    let r = handle("POST", "/metrics", b"not json", None);
    assert_eq!(r.status, 400);
}

#[test]
fn unknown_routes() {
    assert_eq!(handle("GET", "/nope", b"", None).status, 404);
    assert_eq!(handle("GET", "/render", b"", None).status, 405);
}

#[test]
fn request_seed_beats_server_seed() {
    let mut spec = grid();
    spec["arrangement"]["lattice"]["positional_regularity"] = json!({"range": 3});
    let req = |seed: Option<u64>, server: Option<u64>| {
        let mut body = json!({"spec": spec, "host": "rect:100x100"});
        if let Some(s) = seed {
            body["seed"] = json!(s);
        }
        handle("POST", "/render", body.to_string().as_bytes(), server).body
    };
    assert_eq!(req(Some(4), Some(9)), req(Some(4), None));
    assert_ne!(req(None, Some(9)), req(None, None));
}
