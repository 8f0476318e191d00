//! Golden values and structure of the bundled example models.

use resha_core::cutset::{minimal_cut_sets, software_cut_sets, SoftwareFilter};
use resha_core::tree::ConstructionStep;
use resha_core::treebuilder::{build_declared, unify_ccf};
use resha_core::{analyze, export_exchange, export_graph, export_object, fixtures, render_text, AnalysisOptions, SystemModel};

fn counts(m: &SystemModel, top: &str) -> (usize, usize) {
    let t = unify_ccf(&build_declared(m, top).unwrap(), m);
    let all = minimal_cut_sets(&t, None).unwrap();
    (all.len(), software_cut_sets(&all, SoftwareFilter::AllSoftware).len())
}

#[test]
fn golden_cut_set_counts() {
    assert_eq!(counts(&fixtures::pressurizer(), "over_pressurization"), (10, 3));
    assert_eq!(counts(&fixtures::vcu_sensor(), "drone_crash"), (16, 4));
    assert_eq!(counts(&fixtures::qiasp_hsi(), "reactor_fails_to_trip"), (80, 15));
}

#[test]
fn fixtures_validate_cleanly() {
    for (name, _) in fixtures::ALL {
        let m = match name {
            "pressurizer.dicm" => fixtures::pressurizer(),
            "vcu_sensor.dicm" => fixtures::vcu_sensor(),
            _ => fixtures::qiasp_hsi(),
        };
        let v = resha_core::validate(&m);
        assert!(v.is_ok(), "{name}: {:?}", v.errors);
    }
}

#[test]
fn vcu_unification_is_identity() {
    let m = fixtures::vcu_sensor();
    let t = build_declared(&m, "drone_crash").unwrap();
    assert_eq!(unify_ccf(&t, &m), t);
}

#[test]
fn qiasp_unification_merges_twelve_pairs() {
    let m = fixtures::qiasp_hsi();
    let t = unify_ccf(&build_declared(&m, "reactor_fails_to_trip").unwrap(), &m);
    let merged = t.provenance.values().filter(|s| **s == ConstructionStep::CcfUnification).count();
    assert_eq!(merged, 12);
    let xml = export_exchange(&t);
    assert!(xml.contains(r#"divisions="A,B""#));
}

#[test]
fn operator_has_procedural_branch() {
    let m = fixtures::qiasp_hsi();
    let t = build_declared(&m, "reactor_fails_to_trip").unwrap();
    assert!(t.nodes["g-operator-sw"].label.contains("procedural failure"));
}

#[test]
fn graph_groups_nodes_by_component() {
    let m = fixtures::vcu_sensor();
    let t = build_declared(&m, "drone_crash").unwrap();
    let dot = export_graph(&t);
    assert!(dot.starts_with("digraph"));
    for c in ["ms4525do", "adc", "stm32fm407", "altitude_controller"] {
        assert!(dot.contains(&format!("subgraph \"cluster_{c}\"")), "{c}");
    }
}

#[test]
fn canonical_fragment_graph_has_seven_nodes() {
    let dot = export_graph(&fixtures::canonical_fragment());
    let nodes = dot.lines().filter(|l| l.trim_start().starts_with('"') && !l.contains("->")).count();
    assert_eq!(nodes, 7);
    assert_eq!(dot.matches("->").count(), 6);
}

#[test]
fn report_sections_for_qiasp() {
    let a = analyze(&fixtures::qiasp_hsi(), &AnalysisOptions::default()).unwrap();
    let text = render_text(&a.report);
    assert!(text.contains("Division A&B HJTC ADC provide lower than real digital core temperature conversion from analog signal (UIF-D)"));
    assert!(text.contains("hjtc_adc_a (division A): closure size 9"));
    let json: serde_json::Value = serde_json::from_str(&export_object(&a.report)).unwrap();
    assert_eq!(json["top_events"][0]["software_cut_sets"]["cut_sets"].as_array().unwrap().len(), 15);
    assert_eq!(json["ccf"]["inter_division"].as_array().unwrap().len(), 12);
}

#[test]
fn vcu_reports_redundancy_notes() {
    let a = analyze(&fixtures::vcu_sensor(), &AnalysisOptions::default()).unwrap();
    assert!(!a.report.recommendations.is_empty());
}
