//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::{BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use resha_core::cutset::{brute_force_cut_sets, minimal_cut_sets, software_cut_sets, SoftwareFilter, ORACLE_MAX_EVENTS};
use resha_core::fixtures;
use resha_core::model::validate;
use resha_core::parser::{parse, serialize};
use resha_core::taxonomy::{candidate_uifs, trace_uif, CandidateOptions, Flavor};
use resha_core::tree::ConstructionStep;
use resha_core::treebuilder::{build_alternative_config, build_declared, unify_ccf};
use resha_core::{
    analyze, dependency_closure, export_exchange, export_graph, export_object, import_exchange, render_text,
    AnalysisOptions, BasicEventKind, ComponentKind, FaultTree, SystemModel, UcaType, UifType,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("configuration equivalence", configuration_equivalence),
        ("oracle agreement", oracle_agreement),
        ("VCU tree structure", vcu_structure),
        ("QIAS-P shared CCF cut sets", qiasp_shared_ccf),
        ("intra-division closure", intra_division_closure),
        ("taxonomy rules", taxonomy_rules),
        ("determinism and round-trips", determinism_and_round_trips),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn elapsed_within(start: Instant, limit: Duration) -> Outcome {
    let t = start.elapsed();
    if t < limit {
        Ok(format!("{:.2}s", t.as_secs_f64()))
    } else {
        Err(format!("took {:.2}s, limit {}s", t.as_secs_f64(), limit.as_secs()))
    }
}

fn fixture_trees(unified: bool) -> Vec<(SystemModel, FaultTree)> {
    let mut out = Vec::new();
    for m in [fixtures::pressurizer(), fixtures::vcu_sensor(), fixtures::qiasp_hsi()] {
        for te in &m.top_events {
            let mut t = build_declared(&m, &te.id).expect("fixture builds");
            if unified {
                t = unify_ccf(&t, &m);
            }
            out.push((m.clone(), t));
        }
    }
    out
}

fn same_cut_sets(a: &FaultTree, b: &FaultTree) -> Result<usize, String> {
    let x = minimal_cut_sets(a, None).map_err(|e| e.to_string())?;
    let y = minimal_cut_sets(b, None).map_err(|e| e.to_string())?;
    if x.as_sets() == y.as_sets() {
        Ok(x.len())
    } else {
        Err(format!("`{}` and `{}` differ: {:?} vs {:?}", a.name, b.name, x.as_sets(), y.as_sets()))
    }
}

fn configuration_equivalence() -> Outcome {
    let start = Instant::now();
    let canonical = fixtures::canonical_fragment();
    let left = build_alternative_config(&canonical).map_err(|e| e.to_string())?;
    ensure!(same_cut_sets(&canonical, &left)? == 4, "canonical fragment should have four singleton cut sets");
    for uca in ["sw-uca_a0", "sw-uca_b1"] {
        let kids = left.nodes[&format!("alt-{uca}")].children();
        ensure!(
            kids.contains(&"sw-uif_a0".to_string()) && kids.contains(&"sw-uif_b1".to_string()),
            "both UIFs should sit under {uca}"
        );
    }

    let mut rng = common::rng(0xF164);
    let mut checked = 0;
    for _ in 0..200 {
        let ucas: Vec<UcaType> = (0..rng.gen_range(1..=4)).map(|_| *UcaType::ALL.choose(&mut rng).unwrap()).collect();
        let uifs: Vec<UifType> = (0..rng.gen_range(0..=4)).map(|_| *UifType::ALL.choose(&mut rng).unwrap()).collect();
        let right = fixtures::controller_fragment(&ucas, &uifs);
        let left = build_alternative_config(&right).map_err(|e| e.to_string())?;
        same_cut_sets(&right, &left)?;
        checked += 1;
    }

    // controller fragments cut from built trees of random models
    let mut from_models = 0;
    for seed in 0..150 {
        let mut r = common::rng(seed);
        let m = common::random_model(&mut r, seed % 3 == 0);
        let Ok(tree) = build_declared(&m, "loss") else { continue };
        for c in m.components.iter().filter(|c| c.kind == ComponentKind::Controller) {
            let gid = format!("g-{}", c.id);
            if !tree.nodes.contains_key(&gid) {
                continue;
            }
            let frag = tree.subtree(&gid);
            match build_alternative_config(&frag) {
                Ok(left) => {
                    same_cut_sets(&frag, &left)?;
                    from_models += 1;
                }
                Err(_) => continue,
            }
        }
    }
    ensure!(from_models >= 20, "only {from_models} model fragments had UCAs");
    let time = elapsed_within(start, Duration::from_secs(5))?;
    Ok(format!("canonical + {checked} random + {from_models} model fragments, {time}"))
}

fn oracle_agreement() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(22);
    let mut trees = 0;
    let mut max_events = 0;
    while trees < 500 {
        let t = common::random_tree(&mut rng, ORACLE_MAX_EVENTS, 6);
        ensure!(common::depth(&t) <= 6, "generator produced depth {}", common::depth(&t));
        let n = t.basic_events().len();
        max_events = max_events.max(n);
        let fast = minimal_cut_sets(&t, None).map_err(|e| e.to_string())?;
        let slow = brute_force_cut_sets(&t).map_err(|e| e.to_string())?;
        ensure!(fast == slow, "random tree {trees} disagrees: {:?} vs {:?}", fast.as_sets(), slow.as_sets());
        trees += 1;
    }

    let mut subtrees = 0;
    let mut restricted = 0;
    let mut sampled = 0;
    for unified in [false, true] {
        for (_, tree) in fixture_trees(unified) {
            let mut seen = BTreeSet::new();
            for (id, node) in &tree.nodes {
                if !node.is_gate() {
                    continue;
                }
                let sub = tree.subtree(id);
                if sub.basic_events().len() > ORACLE_MAX_EVENTS || !seen.insert(id.clone()) {
                    continue;
                }
                let fast = minimal_cut_sets(&sub, None).map_err(|e| e.to_string())?;
                let slow = brute_force_cut_sets(&sub).map_err(|e| e.to_string())?;
                ensure!(fast == slow, "fixture subtree `{id}` disagrees");
                subtrees += 1;
            }

            let sw = common::software_restriction(&tree);
            if sw.basic_events().len() <= ORACLE_MAX_EVENTS {
                let all = minimal_cut_sets(&tree, None).map_err(|e| e.to_string())?;
                let expect = software_cut_sets(&all, SoftwareFilter::AllSoftware);
                let slow = brute_force_cut_sets(&sw).map_err(|e| e.to_string())?;
                ensure!(expect.as_sets() == slow.as_sets(), "software cut sets of `{}` disagree with the oracle", tree.name);
                restricted += 1;
            }

            // Whole trees are too large to enumerate; check soundness and
            // sample completeness instead.
            let all = minimal_cut_sets(&tree, None).map_err(|e| e.to_string())?;
            for cs in &all.cut_sets {
                let on: HashSet<&str> = cs.events.iter().map(String::as_str).collect();
                ensure!(tree.evaluate(&on).unwrap(), "cut set {:?} does not fail `{}`", cs.events, tree.name);
                for drop in &cs.events {
                    let mut less = on.clone();
                    less.remove(drop.as_str());
                    ensure!(!tree.evaluate(&less).unwrap(), "cut set {:?} of `{}` is not minimal", cs.events, tree.name);
                }
            }
            let events: Vec<String> = tree.basic_events().iter().map(|n| n.id.clone()).collect();
            for _ in 0..200 {
                let on = common::random_assignment(&mut rng, &events, 0.05);
                let covered = all.cut_sets.iter().any(|c| c.events.iter().all(|e| on.contains(e.as_str())));
                ensure!(tree.evaluate(&on).unwrap() == covered, "sampled assignment disagrees on `{}`", tree.name);
                sampled += 1;
            }
        }
    }
    let time = elapsed_within(start, Duration::from_secs(60))?;
    Ok(format!(
        "{trees} random trees (up to {max_events} events), {subtrees} fixture subtrees, {restricted} software restrictions, {sampled} sampled assignments, {time}"
    ))
}

fn vcu_structure() -> Outcome {
    let m = fixtures::vcu_sensor();
    let t = build_declared(&m, "drone_crash").map_err(|e| e.to_string())?;

    let mut uif_d_owners = BTreeSet::new();
    for n in t.basic_events() {
        if let Some(BasicEventKind::SoftwareInternal { record }) = n.basic() {
            if let Flavor::Uif { uif_type: UifType::D, signal } = &record.flavor {
                uif_d_owners.insert((record.owner.clone(), signal.clone()));
            }
        }
    }
    for (owner, signal) in [("ms4525do", "ms4525do_i2c"), ("adc", "adc_digital"), ("stm32fm407", "stm32_uart")] {
        ensure!(uif_d_owners.contains(&(owner.into(), signal.into())), "no UIF-D event for {owner} on {signal}");
    }

    for analog in ["mp3h6115a", "mp3v5004dp"] {
        let gid = format!("g-{analog}");
        ensure!(t.nodes.contains_key(&gid), "{analog} has no subtree");
        ensure!(!t.nodes.contains_key(&format!("{gid}-sw")), "{analog} has a software branch");
        let sub = t.subtree(&gid);
        let kinds: Vec<&BasicEventKind> = sub.basic_events().iter().filter_map(|n| n.basic()).collect();
        ensure!(
            !kinds.is_empty() && kinds.iter().all(|k| matches!(k, BasicEventKind::HardwareFailure)),
            "{analog} subtree is not hardware-only"
        );
    }

    let dep = "g-stm32fm407-dep";
    ensure!(t.provenance.get(dep) == Some(&ConstructionStep::DependencyBranch), "STM32FM407 has no dependency branch");
    let below = t.descendants(dep);
    for d in ["ms4525do", "adc", "mp3h6115a", "mp3v5004dp"] {
        ensure!(below.contains(&format!("g-{d}")), "dependency branch does not reach {d}");
    }
    let direct = t.nodes[dep].children();
    Ok(format!(
        "UIF-D on 3 digital outputs, 2 hardware-only analog subtrees, dependency branch children {}",
        direct.join(", ")
    ))
}

const SHARED_LABELS: [&str; 3] = [
    "Division A&B HJTC calculators provide lower than real core temperature measurements under abnormal conditions (UIF-D)",
    "Division A&B CET alarm does not trigger when coolant exit temperature exceeds acceptable margin (UIF-A)",
    "Division A&B HJTC ADC provide lower than real digital core temperature conversion from analog signal (UIF-D)",
];

/// Software cut-set count of the bundled QIAS-P model, fixed from the
/// exhaustive oracle.
const QIASP_SOFTWARE_CUT_SETS: usize = 15;

fn qiasp_shared_ccf() -> Outcome {
    let m = fixtures::qiasp_hsi();
    let t = unify_ccf(&build_declared(&m, "reactor_fails_to_trip").map_err(|e| e.to_string())?, &m);
    let all = minimal_cut_sets(&t, None).map_err(|e| e.to_string())?;
    let sw = software_cut_sets(&all, SoftwareFilter::AllSoftware);
    for label in SHARED_LABELS {
        let hit = sw.cut_sets.iter().any(|c| {
            c.order == 1
                && c.ccf_bearing
                && matches!(t.nodes[&c.events[0]].basic(), Some(BasicEventKind::SharedCcf { .. }))
                && t.nodes[&c.events[0]].label == label
        });
        ensure!(hit, "no order-1 shared CCF cut set labelled {label:?}");
    }
    let oracle = brute_force_cut_sets(&common::software_restriction(&t)).map_err(|e| e.to_string())?;
    ensure!(oracle.len() == sw.len(), "oracle finds {} software cut sets, engine {}", oracle.len(), sw.len());
    ensure!(
        sw.len() == QIASP_SOFTWARE_CUT_SETS,
        "software cut-set count changed: {} (golden {QIASP_SOFTWARE_CUT_SETS})",
        sw.len()
    );
    Ok(format!("3 labelled shared CCF sets among {} software cut sets ({} total)", sw.len(), all.len()))
}

fn intra_division_closure() -> Outcome {
    let m = fixtures::qiasp_hsi();
    let mut sizes = Vec::new();
    for adc in ["hjtc_adc_a", "hjtc_adc_b"] {
        let c = dependency_closure(&m, adc).map_err(|e| e.to_string())?;
        ensure!(c.len() == 9, "closure of {adc} has {} members: {c:?}", c.len());
        sizes.push(c.len());
    }
    let report = analyze(&m, &AnalysisOptions::default()).map_err(|e| e.to_string())?.report;
    let listed = report
        .ccf
        .intra_division
        .iter()
        .any(|f| f.component == "hjtc_adc_a" && f.closure_size == 9 && f.division.as_deref() == Some("A"));
    ensure!(listed, "report does not list hjtc_adc_a with closure size 9");
    Ok(format!("HJTC ADC closure sizes {sizes:?}, listed in report"))
}

fn taxonomy_rules() -> Outcome {
    let mut models = 0;
    let mut uif_events = 0;
    for seed in 0..300u64 {
        let mut r = common::rng(1000 + seed);
        let m = common::random_model(&mut r, seed % 4 == 0);
        let v = validate(&m);
        ensure!(v.is_ok(), "random model {seed} invalid: {:?}", v.errors);
        for c in &m.components {
            let opts = CandidateOptions::default();
            for cand in candidate_uifs(&m, &c.id, opts).map_err(|e| e.to_string())? {
                let s = m.signal(&cand.signal).unwrap();
                ensure!(UifType::applicable(s.continuity).contains(&cand.uif_type), "{} on {:?} signal", cand.uif_type, s.continuity);
                ensure!(c.has_software, "candidate on software-free {}", c.id);
            }
        }
        let t = unify_ccf(&build_declared(&m, "loss").map_err(|e| e.to_string())?, &m);
        for n in t.basic_events() {
            let ev = n.basic().unwrap();
            if let BasicEventKind::SoftwareInternal { record } | BasicEventKind::SharedCcf { record, .. } = ev {
                let owner = m.component(&record.owner).unwrap();
                ensure!(owner.has_software, "software event {} on software-free {}", n.id, owner.id);
            }
            if let BasicEventKind::ProceduralFailure { record } = ev {
                ensure!(m.component(&record.owner).unwrap().kind == ComponentKind::HumanOperator, "procedural event off an operator");
            }
            if let BasicEventKind::SharedCcf { merged, .. } = ev {
                for id in merged {
                    let rec = m.declared_records().find(|r| &r.id == id).unwrap();
                    ensure!(m.component(&rec.owner).unwrap().has_software, "merged record {id} on software-free owner");
                }
            }
            if let Some(rec) = ev.record() {
                if rec.flavor.is_uif() {
                    let records: Vec<_> = match ev {
                        BasicEventKind::SharedCcf { merged, .. } => {
                            m.declared_records().filter(|r| merged.contains(&r.id)).cloned().collect()
                        }
                        _ => vec![rec.clone()],
                    };
                    for r in records {
                        let paths = trace_uif(&m, &r).map_err(|e| e.to_string())?;
                        ensure!(!paths.is_empty(), "tree UIF {} has no trace", r.id);
                    }
                    uif_events += 1;
                }
            }
        }
        models += 1;
    }

    // a monitoring system that informs nobody
    let monitoring = parse(
        r#"
system "monitor" {}
component probe { kind: sensor hardware_failure_modes: ["dead"] outputs: [raw] }
component logger { kind: intermediate_processor has_software: true outputs: [log] }
component display { kind: actuator hardware_failure_modes: ["blank"] }
signal raw { source: probe destinations: [logger] direction: feedback }
signal log { source: logger destinations: [display] direction: feedback }
top_event unseen { description: "reading lost" hazard_components: [display] }
uif log_low { owner: logger signal: log type: D context: "logger records low values" }
"#,
    )
    .map_err(|e| format!("{e:?}"))?;
    let v = validate(&monitoring);
    ensure!(
        v.warnings.iter().any(|w| w.message.starts_with("UIF modeling pointless")),
        "no pointless-UIF warning: {:?}",
        v.warnings
    );
    let t = build_declared(&monitoring, "unseen").map_err(|e| e.to_string())?;
    let sw_branches = t.provenance.values().filter(|s| **s == ConstructionStep::SoftwareBranch).count();
    ensure!(sw_branches == 0, "monitoring model has {sw_branches} software branches");
    Ok(format!("{models} random models, {uif_events} tree UIF events traced, monitoring model warned"))
}

fn determinism_and_round_trips() -> Outcome {
    let mut files = 0;
    for (name, text) in fixtures::ALL {
        let m = parse(text).map_err(|e| format!("{name}: {e:?}"))?;
        let s = serialize(&m);
        let back = parse(&s).map_err(|e| format!("{name} reparse: {e:?}"))?;
        ensure!(back == m, "{name}: parse(serialize(m)) != m");
        ensure!(serialize(&back) == s, "{name}: serialization not byte-stable");
        files += 1;
    }

    let mut artifacts = 0;
    for m in [fixtures::pressurizer(), fixtures::vcu_sensor(), fixtures::qiasp_hsi()] {
        let run = || {
            let a = analyze(&m, &AnalysisOptions::default()).unwrap();
            let mut out = vec![render_text(&a.report), export_object(&a.report)];
            for t in &a.trees {
                out.push(export_graph(t));
                out.push(export_exchange(t));
            }
            (out, a.trees)
        };
        let (first, trees) = run();
        let (second, _) = run();
        ensure!(first == second, "{}: outputs differ between runs", m.name);
        artifacts += first.len();

        for t in &trees {
            let xml = export_exchange(t);
            let back = import_exchange(&xml).map_err(|e| e.to_string())?;
            same_cut_sets(t, &back)?;
            ensure!(export_exchange(&back) == xml, "{}: re-export differs", t.name);
        }
    }
    Ok(format!("{files} fixtures round-trip, {artifacts} artifacts stable, exchange re-import equivalent"))
}
