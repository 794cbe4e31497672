mod common;

use common::*;
use gradus::artinian::ArtinianDual;
use gradus::cli::{emit_report, from_json, Format};
use gradus::harness::*;
use gradus::invariants::InvariantConfig;

fn cfg() -> InvariantConfig {
    InvariantConfig::default()
}

fn totals(r: &VerificationReport, table: &str) -> Vec<usize> {
    r.table(table).unwrap().rows.iter().map(|row| row.total).collect()
}

#[test]
fn prop21_line_has_colon_dimensions_n() {
    let m = module("vars x; rels;");
    let r = verify_prop21(&m, &m.ring().vars(), 4, &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Verified);
    assert_eq!(totals(&r, "0:_H(x_1^n..x_1^n), i=1"), vec![1, 2, 3, 4]);
    assert!(r.squares.iter().all(|s| s.equal));
}

#[test]
fn prop21_partial_sequence_on_the_plane() {
    let m = plane();
    let r = verify_prop21(&m, &seq(&m, "x"), 3, &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Verified, "{:#?}", r.checks);
    assert_eq!(r.twists[0].twist, Some(0));
}

#[test]
fn cor22_space_boxes() {
    let m = space();
    let r = verify_cor22(&m, &m.ring().vars(), 2, &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Verified);
    assert_eq!(totals(&r, "M/(x^n)M"), vec![1, 8]);
    assert_eq!(totals(&r, "0:_H(x^n)"), vec![1, 8]);
}

#[test]
fn cor22_node_two_pipelines_agree() {
    let m = node();
    let r = verify_cor22(&m, &seq(&m, "x + y"), 4, &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Verified);
    assert_eq!(totals(&r, "M/(x^n)M"), vec![2, 4, 6, 8]);
    assert_eq!(totals(&r, "M/(x^n)M"), totals(&r, "0:_H(x^n)"));
}

#[test]
fn prop23_radical_invariance() {
    let m = plane();
    let r = verify_prop23(&m, &seq(&m, "x^2, y^3"), &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Verified);
    let by_m = verify_prop23(&m, &m.ring().vars(), &cfg()).unwrap();
    assert_eq!(by_m.verdict, Verdict::Verified);
    assert!(r.check("N.dim H^d_I(M) <= d").unwrap().detail.starts_with("N.dim 2"));
}

#[test]
fn prop23_residue_field() {
    let m = residue_field();
    let r = verify_prop23(&m, &m.ring().vars(), &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Verified);
    assert!(r.check("N.dim H^d_I(M) <= d").unwrap().detail.starts_with("N.dim 0"));
}

#[test]
fn prop24_line() {
    let m = module("vars x; rels;");
    let r = verify_prop24(&m, &m.ring().vars(), &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Verified);
    assert!(r.check("width H^d_I(M) >= min(2, d)").unwrap().detail.contains("Finite(1)"));
}

#[test]
fn prop24_vanishing_top_cohomology_is_a_hypothesis_failure() {
    let m = plane();
    let r = verify_prop24(&m, &seq(&m, "x"), &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::InconclusiveHypothesis);
}

#[test]
fn cocm_node() {
    let m = node();
    let r = verify_cocm(&m, &m.ring().vars(), &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Verified);
    assert!(r.check("H^d_m(M) is co-Cohen-Macaulay of N.dim d").unwrap().passed);
}

#[test]
fn thm31_conic_matches_the_module() {
    let m = conic();
    let r = verify_thm31(&m, &seq(&m, "x"), &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Verified);
    assert_eq!(
        r.table("H_d^x(H^d_m(M))").unwrap().rows[0].values,
        r.table("M").unwrap().rows[0].values
    );
    assert_eq!(r.table("M").unwrap().rows[0].values, vec![0, 1, 2, 2, 2]);
}

#[test]
fn unstabilized_limits_never_verify() {
    let m = plane();
    let short = InvariantConfig {
        levels: 4,
        max_levels: 4,
        ..cfg()
    };
    let r = verify_thm31(&m, &m.ring().vars(), &short).unwrap();
    assert_eq!(r.verdict, Verdict::InconclusiveWindow);
    assert!(r.stabilization.iter().any(|s| !s.all_stable));
}

#[test]
fn cor32_principal_annihilator() {
    let m = module("vars x y; rels x^2 + x*y;");
    let r = verify_cor32(&m, 3, &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Verified);
    assert_eq!(r.check("annihilators agree in degree 1").unwrap().detail, "dims 0 and 0");
    assert_eq!(r.check("annihilators agree in degree 2").unwrap().detail, "dims 1 and 1");
    assert_eq!(r.check("annihilators agree in degree 3").unwrap().detail, "dims 2 and 2");
}

#[test]
fn cor32_residue_field() {
    let m = residue_field();
    let r = verify_cor32(&m, 3, &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Verified);
    assert_eq!(r.check("annihilators agree in degree 1").unwrap().detail, "dims 2 and 2");
}

#[test]
fn thm34_residue_field_round_trip() {
    let x = ArtinianDual::graded_dual(residue_field());
    let r = verify_lemma33_thm34(&x, &[], &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Verified, "{:#?}", r.checks);
}

#[test]
fn thm34_rejects_non_co_cohen_macaulay() {
    let x = ArtinianDual::graded_dual(embedded_point());
    let r = verify_lemma33_thm34(&x, &seq(x.dual_of(), "y"), &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::InconclusiveHypothesis);
}

#[test]
fn report_json_round_trips() {
    let m = plane();
    let r = verify_cor22(&m, &m.ring().vars(), 2, &cfg()).unwrap();
    let json = emit_report(std::slice::from_ref(&r), Format::Json);
    let back = from_json(&json).unwrap();
    assert_eq!(back.reports, vec![r]);
    let keys: Vec<usize> = ["\"statement\"", "\"fixture\"", "\"tables\"", "\"squares\"", "\"verdict\""]
        .iter()
        .map(|k| json.find(k).unwrap())
        .collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
}
