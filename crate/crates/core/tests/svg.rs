use pattern_forge::gallery::{bundled_manifest, bundled_spec, SpecRef};
use pattern_forge::spec::parse_spec;
use pattern_forge::{compile, render_svg, CompileOptions, HostSymbol, RenderOptions};

fn depth(node: roxmltree::Node, name: &str) -> usize {
    let own = usize::from(node.has_tag_name(name) && node.attribute("class") == Some("nested"));
    own + node.children().map(|c| depth(c, name)).max().unwrap_or(0)
}

#[test]
fn every_gallery_svg_is_well_formed() {
    let manifest = bundled_manifest();
    for entry in &manifest.entries {
        for sref in &entry.specs {
            let spec = parse_spec(bundled_spec(sref.path()).unwrap().as_bytes()).unwrap();
            let host = match sref {
                SpecRef::Path(_) => entry.host.resolve().unwrap(),
                SpecRef::WithHost { host, .. } => host.resolve().unwrap(),
            };
            let p = compile(&spec, &host, &CompileOptions::default()).unwrap();
            let doc = render_svg(&p, &RenderOptions::default());
            let xml = roxmltree::Document::parse(&doc.text).unwrap_or_else(|e| panic!("{}: {e}", sref.path()));
            let root = xml.root_element();
            assert!(root.has_tag_name("svg"));
            let first = root.children().find(|n| n.is_element()).unwrap();
            assert_eq!(first.attribute("class"), Some("host"), "{}", sref.path());
            let groups = root
                .children()
                .filter(|n| n.has_tag_name("g") && n.attribute("class") == Some("group"))
                .count();
            assert_eq!(groups, p.group_count, "{}", sref.path());
        }
    }
}

#[test]
fn flat_element_count_is_primitives_plus_host_plus_groups() {
    let spec = parse_spec(
        br#"{"spec_version":1,"arrangement":{"kind":"lattice","lattice":{"cell":{"shape":"hexagonal","a":8}}},
        "grouping":{"ratios":[1,2,1]},
        "groups":[{"shape":"circle","size":3},{"shape":"square","size":3},{"shape":"line-segment","size":[5,1]}],
        "fit":{"mode":"omit-incomplete"}}"#,
    )
    .unwrap();
    let p = compile(&spec, &HostSymbol::rect(120.0, 90.0).unwrap(), &CompileOptions::default()).unwrap();
    let doc = render_svg(&p, &RenderOptions::default());
    let xml = roxmltree::Document::parse(&doc.text).unwrap();
    let elements = xml.root_element().descendants().filter(|n| n.is_element()).count() - 1;
    assert_eq!(elements, p.primitives.len() + 1 + 3);
}

#[test]
fn nested_depth_two_nests_one_container() {
    let text = bundled_spec("specs/nest_lattice_lattice.json").unwrap();
    let p = compile(&parse_spec(text.as_bytes()).unwrap(), &HostSymbol::rect(100.0, 100.0).unwrap(), &CompileOptions::default()).unwrap();
    let doc = render_svg(&p, &RenderOptions::default());
    let xml = roxmltree::Document::parse(&doc.text).unwrap();
    assert_eq!(depth(xml.root_element(), "g"), 1);
    assert!(doc.stats.nested_patterns > 0);
}

#[test]
fn precision_controls_digits() {
    let spec = parse_spec(
        br#"{"spec_version":1,"arrangement":{"kind":"lattice","lattice":{"cell":{"shape":"square","a":3.3333333}}},
        "groups":[{"shape":"circle","size":1}],"fit":{"mode":"overflow"}}"#,
    )
    .unwrap();
    let p = compile(&spec, &HostSymbol::rect(10.0, 10.0).unwrap(), &CompileOptions::default()).unwrap();
    let doc = render_svg(&p, &RenderOptions { precision: 1, ..RenderOptions::default() });
    assert!(!doc.text.contains(".33"));
    assert!(doc.text.contains(".3\""));
}
