//! Acceptance gate. Prints one PASS/FAIL line per criterion; all equalities
//! are exact, runtime limits are wall-clock seconds on a single run.

mod common;

use std::time::{Duration, Instant};

use common::*;
use gradus::artinian::{ArtinianDual, Width};
use gradus::cli::{emit_report, from_json, to_json, Envelope, Format};
use gradus::exactla::Matrix;
use gradus::graded::{PresentedModule, Window};
use gradus::harness::{self, Verdict, VerificationReport};
use gradus::invariants::InvariantConfig;
use gradus::koszul::{transition, Direction, KoszulComplex};
use gradus::limits::local_cohomology;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn verified(r: &VerificationReport) -> bool {
    r.verdict == Verdict::Verified
}

fn totals(r: &VerificationReport, table: &str) -> Vec<usize> {
    r.table(table).map(|t| t.rows.iter().map(|row| row.total).collect()).unwrap_or_default()
}

fn check_passed(r: &VerificationReport, name: &str) -> bool {
    r.check(name).is_some_and(|c| c.passed)
}

fn inverse_polynomial_modules() -> Outcome {
    let cfg = InvariantConfig::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for n in 1..=3 {
        let r = ring(n);
        let k = ArtinianDual::inverse_polynomial_module(r.clone());
        let width = k.width(&cfg).unwrap().width;
        let ndim = k.ndim(&cfg).unwrap().ndim;
        let socle = k.annihilator_submodule(&r.vars()).unwrap().finite_length(&cfg).unwrap();
        ok &= width == Width::Finite(n) && ndim == n as i64 && socle == Some(1);
        detail.push(format!("n={n}: width {width:?} N.dim {ndim} socle {socle:?}"));
    }
    outcome(ok, detail.join("; "))
}

fn cor22_plane() -> Outcome {
    let m = plane();
    let rep = harness::verify_cor22(&m, &m.ring().vars(), 4, &InvariantConfig::default()).unwrap();
    let boxes = vec![1, 4, 9, 16];
    let left = totals(&rep, "M/(x^n)M");
    let right = totals(&rep, "0:_H(x^n)");
    let squares = !rep.squares.is_empty() && rep.squares.iter().all(|s| s.equal);
    outcome(
        verified(&rep) && left == boxes && right == boxes && squares,
        format!(
            "verdict {} M/(x^n)M {left:?} 0:_H(x^n) {right:?} squares {}",
            rep.verdict.as_str(),
            rep.squares.len()
        ),
    )
}

fn thm31_report(m: &PresentedModule, sop: &str) -> VerificationReport {
    let cfg = InvariantConfig {
        levels: 4,
        ..InvariantConfig::default()
    };
    harness::verify_thm31(m, &seq(m, sop), &cfg).unwrap()
}

fn thm31() -> Outcome {
    let plane = thm31_report(&plane(), "x, y");
    let top = plane.table("H_d^x(H^d_m(M))").unwrap();
    let shape: Vec<usize> = top
        .window
        .degrees()
        .zip(&top.rows[0].values)
        .filter(|(j, _)| *j >= 0)
        .map(|(_, &v)| v)
        .collect();
    let expected: Vec<usize> = (1..=shape.len()).collect();
    let same_as_m = check_passed(&plane, "H_d^x(H^d_m(M)) has the Hilbert function of M");
    let stab = plane
        .stabilization
        .iter()
        .find(|s| s.system == "H_2^x(H^2_m(M))")
        .and_then(|s| s.stabilization_level);
    let vanish = (0..=2)
        .flat_map(|i| (0..=2).map(move |j| (i, j)))
        .filter(|&p| p != (2, 2))
        .all(|(i, j)| check_passed(&plane, &format!("H_{i}^x(H^{j}_m(M)) vanishes")));
    let levels = totals(&plane, "0:_H(x^n)");
    let conic = thm31_report(&conic(), "x");
    let ok = verified(&plane)
        && shape == expected
        && same_as_m
        && vanish
        && stab.is_some_and(|l| l <= 4)
        && levels == vec![1, 4, 9, 16]
        && verified(&conic);
    outcome(
        ok,
        format!(
            "plane {} H_2(H^2) {shape:?} stable by level {stab:?} levels {levels:?}; conic {}",
            plane.verdict.as_str(),
            conic.verdict.as_str()
        ),
    )
}

fn top_cohomology_bounds() -> Outcome {
    let cfg = InvariantConfig::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, m) in [
        ("plane", plane()),
        ("node", node()),
        ("space", space()),
        ("residue field", residue_field()),
    ] {
        let vars = m.ring().vars();
        let p23 = harness::verify_prop23(&m, &vars, &cfg).unwrap();
        let p24 = harness::verify_prop24(&m, &vars, &cfg).unwrap();
        let cc = harness::verify_cocm(&m, &vars, &cfg).unwrap();
        let prop26 = check_passed(&cc, "H^d_m(M) is co-Cohen-Macaulay of N.dim d");
        ok &= verified(&p23) && verified(&p24) && verified(&cc) && prop26;
        detail.push(format!(
            "{name}: {} / {} / {}",
            p23.verdict.as_str(),
            p24.verdict.as_str(),
            cc.verdict.as_str()
        ));
    }
    outcome(ok, detail.join("; "))
}

fn thm34() -> Outcome {
    let cfg = InvariantConfig::default();
    let k = ArtinianDual::inverse_polynomial_module(ring(2));
    let node = node();
    let kr = harness::verify_lemma33_thm34(&k, &k.ring().vars(), &cfg).unwrap();
    let nr = harness::verify_lemma33_thm34(&ArtinianDual::graded_dual(node.clone()), &seq(&node, "x + y"), &cfg).unwrap();
    let levels_ok = |r: &VerificationReport| {
        totals(r, "Y/(x^n)Y").len() == 3
            && check_passed(r, "beta_n: Hilbert functions agree up to a constant twist")
            && r.squares.iter().all(|s| s.equal)
    };
    outcome(
        verified(&kr) && verified(&nr) && levels_ok(&kr) && levels_ok(&nr),
        format!(
            "K: {} levels {:?}; dual of node: {} levels {:?}",
            kr.verdict.as_str(),
            totals(&kr, "Y/(x^n)Y"),
            nr.verdict.as_str(),
            totals(&nr, "Y/(x^n)Y")
        ),
    )
}

fn cor32() -> Outcome {
    let cfg = InvariantConfig::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, m) in [
        ("plane", plane()),
        ("x^2+xy", module("vars x y; gens 0; rels x^2 + x*y;")),
        ("residue field", residue_field()),
    ] {
        let rep = harness::verify_cor32(&m, 3, &cfg).unwrap();
        let degrees = (0..=3).all(|e| check_passed(&rep, &format!("annihilators agree in degree {e}")));
        ok &= verified(&rep) && degrees;
        detail.push(format!("{name}: {}", rep.verdict.as_str()));
    }
    outcome(ok, detail.join("; "))
}

fn koszul_fixtures(rng: &mut ChaCha8Rng) -> (usize, bool) {
    let mut ok = true;
    for _ in 0..50 {
        let m = random_module(rng);
        let f = random_sequence(m.ring(), rng);
        let w = Window::new(0, 4).unwrap();
        let total: i32 = f.iter().map(|p| p.homogeneous_degree().unwrap() as i32).sum();
        let base = m.realize(Window::new(-2 * total, 4 + 2 * total).unwrap()).unwrap();
        let c1 = KoszulComplex::build(&base, &f, 1, w).unwrap();
        let c2 = KoszulComplex::build(&base, &f, 2, w).unwrap();
        let c2up = KoszulComplex::build(&base, &f, 2, w.shifted(total)).unwrap();
        ok &= c1.check_square_zero().is_ok() && c2.check_square_zero().is_ok();
        let down = transition(&c2, &c1, Direction::Homological).unwrap();
        ok &= down.check_commutes(&c2, &c1).is_ok();
        let up = transition(&c1, &c2up, Direction::Cohomological).unwrap();
        ok &= up.check_commutes(&c1, &c2up).is_ok();
    }
    (50, ok)
}

fn random_matrices(rng: &mut ChaCha8Rng) -> (usize, bool) {
    let field = gradus::exactla::PrimeField::default();
    let p = field.modulus();
    let mut ok = true;
    for _ in 0..200 {
        let rows = rng.gen_range(1..=9);
        let cols = rng.gen_range(1..=9);
        let sparse = rng.gen_bool(0.5);
        let data: Vec<u32> = (0..rows * cols)
            .map(|_| if sparse && rng.gen_bool(0.6) { 0 } else { rng.gen_range(0..p) })
            .collect();
        let a = Matrix::from_data(field, rows, cols, data).unwrap();
        let kernel = a.kernel_basis();
        ok &= a.rank() + kernel.len() == cols;
        ok &= kernel.iter().all(|v| a.mul_vec(v).unwrap().iter().all(|&x| x == 0));
        let v: Vec<u32> = (0..cols).map(|_| rng.gen_range(0..p)).collect();
        let b = a.mul_vec(&v).unwrap();
        ok &= matches!(a.solve(&b).unwrap(), Some(x) if a.mul_vec(&x).unwrap() == b);
    }
    (200, ok)
}

fn artinian_fixtures() -> Vec<ArtinianDual> {
    let mut out: Vec<ArtinianDual> = (1..=3).map(|n| ArtinianDual::inverse_polynomial_module(ring(n))).collect();
    for m in [node(), residue_field(), embedded_point(), conic()] {
        out.push(ArtinianDual::graded_dual(m));
    }
    let m = plane();
    let (_, lim) = local_cohomology(&m, &m.ring().vars(), 2, Window::new(-10, 0).unwrap(), &Default::default()).unwrap();
    out.push(ArtinianDual::from_degreewise(&lim.module, m.ring()).unwrap());
    out
}

fn duality_and_width() -> (usize, bool) {
    let cfg = InvariantConfig::default();
    let fixtures = artinian_fixtures();
    let mut ok = true;
    for x in &fixtures {
        let w = x.known_window().unwrap_or(Window::new(-6, 2).unwrap());
        let real = x.realize(w).unwrap();
        ok &= real.dual().dual() == real;
        let width = x.width(&cfg).unwrap().width.finite().map(|v| v as i64);
        ok &= width.is_some_and(|v| v <= x.ndim(&cfg).unwrap().ndim);
    }
    (fixtures.len(), ok)
}

fn extreme_homology(rng: &mut ChaCha8Rng) -> (usize, bool) {
    let mut ok = true;
    for _ in 0..20 {
        let m = random_module(rng);
        let f = random_sequence(m.ring(), rng);
        let r = f.len();
        let total: i32 = f.iter().map(|p| p.homogeneous_degree().unwrap() as i32).sum();
        let w = Window::new(0, 5).unwrap();
        let emax = f.iter().map(|p| p.homogeneous_degree().unwrap() as i32).max().unwrap();
        let c = KoszulComplex::from_presented(&m, &f, 1, w).unwrap();
        let h0 = c.homology(0).unwrap().module().hilbert().to_vec();
        ok &= h0 == m.quotient_by_elements(&f).unwrap().hilbert_function(w);
        let htop = c.homology(r).unwrap().module().hilbert().to_vec();
        let ext = m.realize(Window::new(-total, 5 - total + emax).unwrap()).unwrap();
        let colon = ext.colon(&f).unwrap().restrict(Window::new(-total, 5 - total).unwrap()).unwrap();
        ok &= htop == colon.hilbert();
    }
    (20, ok)
}

fn negative_control() -> bool {
    let m = embedded_point();
    let cfg = InvariantConfig::default();
    let y = seq(&m, "y");
    let gates = [
        harness::verify_prop21(&m, &y, 2, &cfg).unwrap().verdict,
        harness::verify_cor22(&m, &y, 2, &cfg).unwrap().verdict,
        harness::verify_thm31(&m, &y, &cfg).unwrap().verdict,
    ];
    let dual = ArtinianDual::graded_dual(m);
    gates.iter().all(|&v| v == Verdict::InconclusiveHypothesis) && !dual.is_co_cohen_macaulay(&cfg).unwrap()
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (a_n, a) = koszul_fixtures(&mut rng);
    let (b_n, b) = random_matrices(&mut rng);
    let (c_n, c) = duality_and_width();
    let (d_n, d) = extreme_homology(&mut rng);
    let e = negative_control();
    outcome(
        a && b && c && d && e,
        format!(
            "(a) {a_n} Koszul fixtures {a} (b) {b_n} matrices {b} (c) {c_n} Artinian fixtures {c} (d) {d_n} modules {d} (e) negative control {e}"
        ),
    )
}

fn determinism() -> Outcome {
    let render = || {
        let rep = thm31_report(&plane(), "x, y");
        emit_report(&[rep], Format::Json)
    };
    let first = render();
    let second = render();
    let parsed: Envelope = from_json(&first).unwrap();
    let again = to_json(&parsed);
    outcome(
        first == second && again == first,
        format!("{} bytes, reserialization identical {}", first.len(), again == first),
    )
}

#[test]
fn acceptance() {
    type Criterion = (u32, &'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        (1, "inverse polynomial modules: width = N.dim = n, socle length 1", 5, inverse_polynomial_modules),
        (2, "M/(x^n)M against 0:_H(x^n) on F_p[x,y]", 30, cor22_plane),
        (3, "local homology of local cohomology", 120, thm31),
        (4, "N.dim, width and co-Cohen-Macaulayness of top local cohomology", 120, top_cohomology_bounds),
        (5, "local cohomology of local homology round trip", 120, thm34),
        (6, "annihilators of top local cohomology", 30, cor32),
        (7, "property suites", 180, property_suites),
        (8, "byte-identical JSON reports", 240, determinism),
    ];
    let mut failures = Vec::new();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let pass = out.passed && in_time;
        println!(
            "criterion {id}: {} {name} ({:.2}s, limit {limit}s) {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            out.detail
        );
        if !pass {
            failures.push(id);
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
