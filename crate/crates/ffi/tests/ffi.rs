use std::ffi::{c_char, CStr, CString};
use std::ptr;

use causal_reduce_ffi::*;

const MOTIVATING: &str = include_str!("../../core/fixtures/motivating.graph");
const REDUCED: &str = include_str!("../../core/fixtures/motivating_reduced.graph");

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    cr_string_free(s);
    out
}

unsafe fn parse(text: &str) -> *mut CrGraph {
    let c = CString::new(text).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(cr_graph_parse(c.as_ptr(), &mut g), CrStatus::Ok);
    g
}

#[test]
fn reduce_round_trip() {
    unsafe {
        let g = parse(MOTIVATING);
        let mut r = ptr::null_mut();
        assert_eq!(cr_reduce(g, &mut r), CrStatus::Ok);
        assert_eq!(cr_report_removed_count(r), 3);
        let mut out = ptr::null_mut();
        assert_eq!(cr_report_output(r, &mut out), CrStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(cr_graph_to_text(out, &mut text), CrStatus::Ok);
        let got = causal_reduce::parse_graph(&take(text)).unwrap();
        assert_eq!(got, causal_reduce::parse_graph(REDUCED).unwrap());
        assert_eq!(cr_graph_vertex_count(out), 5);
        assert_eq!(cr_graph_edge_count(out), 7);
        let mut json = ptr::null_mut();
        assert_eq!(cr_report_json(r, &mut json), CrStatus::Ok);
        assert!(take(json).contains("W-criterion"));
        cr_graph_free(out);
        cr_report_free(r);
        cr_graph_free(g);
    }
}

#[test]
fn formula_and_taxonomy() {
    unsafe {
        let g = parse(REDUCED);
        let mut s = ptr::null_mut();
        assert_eq!(cr_gformula(g, CrFormat::Text, &mut s), CrStatus::Ok);
        assert_eq!(take(s), "sum_{y,o1,w2,w3} y * p(y|a,o1) * p(o1|w2,w3) * p(w2) * p(w3)");
        assert_eq!(cr_taxonomy_json(g, &mut s), CrStatus::Ok);
        assert!(take(s).contains(r#""O":["O1"]"#));
        cr_graph_free(g);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut g = ptr::null_mut();
        let bad = CString::new("!treatment A\n!outcome Y\nA -> -> Y\n").unwrap();
        assert_eq!(cr_graph_parse(bad.as_ptr(), &mut g), CrStatus::Parse);
        assert!(g.is_null());
        assert!(take(cr_last_error()).starts_with("line 3"));

        let backwards = parse("!treatment A\n!outcome Y\nY -> A\n");
        let mut r = ptr::null_mut();
        assert_eq!(cr_reduce(backwards, &mut r), CrStatus::AssumptionViolation);
        cr_graph_free(backwards);

        assert_eq!(cr_graph_parse(ptr::null(), &mut g), CrStatus::NullPointer);
        assert_eq!(cr_reduce(ptr::null(), &mut r), CrStatus::NullPointer);
        assert_eq!(cr_graph_vertex_count(ptr::null()), 0);
        cr_graph_free(ptr::null_mut());
        cr_report_free(ptr::null_mut());
        cr_string_free(ptr::null_mut());
    }
}

#[test]
fn network_functionals() {
    let json = r#"{"graph": {"vertices": ["A", "Y"], "edges": [["A", "Y"]],
        "treatment": "A", "outcome": "Y"},
        "cards": {"A": 2, "Y": 2},
        "cpts": {"A": {"parents": [], "table": [[0.5, 0.5]]},
                 "Y": {"parents": ["A"], "table": [[0.6, 0.4], [0.3, 0.7]]}}}"#;
    unsafe {
        let c = CString::new(json).unwrap();
        let mut bn = ptr::null_mut();
        assert_eq!(cr_network_parse(c.as_ptr(), &mut bn), CrStatus::Ok);
        let mut v = 0.0;
        assert_eq!(cr_g_functional(bn, 1, &mut v), CrStatus::Ok);
        assert!((v - 0.7).abs() < 1e-15);
        // Var(I(A=1)(Y - 0.7)/0.5) = 0.5 * 0.21 / 0.25
        assert_eq!(cr_eif_variance(bn, 1, &mut v), CrStatus::Ok);
        assert!((v - 0.42).abs() < 1e-12);
        cr_network_free(bn);

        let bad = CString::new(json.replace("0.3, 0.7", "0.3, 0.8")).unwrap();
        assert_eq!(cr_network_parse(bad.as_ptr(), &mut bn), CrStatus::InvalidNetwork);
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/causal_reduce.h");
    let src = include_str!("../src/lib.rs");
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15);
    for f in exports {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
}
