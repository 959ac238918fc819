mod common;

use common::{check_golden, corpus, corpus_listing};
use jetcalc_core::exprio::{expr_to_json, print_chi, print_expr};
use jetcalc_core::ns::{ns_build, Viscosity};
use jetcalc_core::reducedcomplex::{kernel_search, AnsatzSpec, DEFAULT_UNKNOWN_CAP};
use jetcalc_core::ReductionContext;
use std::sync::Arc;

fn presets(dim: usize) -> String {
    let ns = ns_build(dim, Viscosity::Symbolic).unwrap();
    ns.presets()
        .iter()
        .map(|(n, e)| format!("{n}: {}\n", print_expr(e)))
        .collect()
}

#[test]
fn ns_first_component() {
    let ns = ns_build(3, Viscosity::Symbolic).unwrap();
    let text = format!("{}\n", print_expr(&ns.evolution[0]));
    check_golden("ns_e1_m3.txt", &text).unwrap();
}

#[test]
fn ns_first_component_structured() {
    let ns = ns_build(3, Viscosity::Symbolic).unwrap();
    let text = serde_json::to_string_pretty(&expr_to_json(&ns.evolution[0])).unwrap() + "\n";
    check_golden("ns_e1_m3.json", &text).unwrap();
}

#[test]
fn ns_presets_listing() {
    check_golden("ns_presets_m3.txt", &presets(3)).unwrap();
    check_golden("ns_presets_m2.txt", &presets(2)).unwrap();
}

#[test]
fn io_corpus() {
    let items = corpus();
    assert_eq!(items.len(), 50);
    check_golden("io_corpus.txt", &corpus_listing(&items)).unwrap();
}

#[test]
fn cpe_kernel_listing() {
    let ctx = Arc::new(ReductionContext::cpe(3).unwrap());
    let basis = kernel_search(&ctx, &AnsatzSpec::new(1, 1, 1), DEFAULT_UNKNOWN_CAP).unwrap();
    let text: String = basis.iter().map(|c| format!("{}\n", print_chi(c))).collect();
    check_golden("kernel_cpe_r1_d1_x1.txt", &text).unwrap();
}

#[test]
fn outputs_are_deterministic() {
    assert_eq!(presets(3), presets(3));
    assert_eq!(corpus_listing(&corpus()), corpus_listing(&corpus()));
}
