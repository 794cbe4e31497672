#![allow(dead_code)]

use gradus::exactla::PrimeField;
use gradus::graded::PresentedModule;
use gradus::modfile::{parse_module_file, parse_sequence};
use gradus::poly::{monomials_of_degree, Polynomial, RingSpec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn ring(n: usize) -> RingSpec {
    RingSpec::standard(PrimeField::default(), n)
}

pub fn module(text: &str) -> PresentedModule {
    parse_module_file(text).unwrap()
}

pub fn seq(m: &PresentedModule, text: &str) -> Vec<Polynomial> {
    parse_sequence(text, m.ring()).unwrap()
}

pub fn plane() -> PresentedModule {
    module("vars x y; gens 0; rels;")
}

pub fn space() -> PresentedModule {
    module("vars x y z; gens 0; rels;")
}

pub fn node() -> PresentedModule {
    module("vars x y; gens 0; rels x*y;")
}

pub fn residue_field() -> PresentedModule {
    module("vars x y; gens 0; rels x, y;")
}

pub fn conic() -> PresentedModule {
    module("vars x y; gens 0; rels x^2 + y^2;")
}

pub fn embedded_point() -> PresentedModule {
    module("vars x y; gens 0; rels x^2, x*y;")
}

/// A form of degree `deg` with random coefficients; may be zero.
pub fn random_form(ring: &RingSpec, deg: u32, rng: &mut ChaCha8Rng) -> Polynomial {
    let p = ring.field().modulus();
    let terms = monomials_of_degree(ring.nvars(), deg)
        .into_iter()
        .map(|m| (m, if rng.gen_bool(0.6) { rng.gen_range(0..p) } else { 0 }));
    Polynomial::from_terms(ring.field(), ring.nvars(), terms)
}

/// A small module: 2 or 3 variables, one or two generators, up to two relations.
pub fn random_module(rng: &mut ChaCha8Rng) -> PresentedModule {
    let r = ring(rng.gen_range(2..=3));
    let twists: Vec<i32> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(0..=1)).collect();
    let top = *twists.iter().max().unwrap();
    let mut cols = Vec::new();
    for _ in 0..rng.gen_range(0..=2) {
        let d = top + rng.gen_range(1..=2);
        cols.push(twists.iter().map(|&a| random_form(&r, (d - a) as u32, rng)).collect::<Vec<_>>());
    }
    PresentedModule::new(r, twists, cols).unwrap()
}

/// One to three nonzero forms of degree 1 or 2.
pub fn random_sequence(ring: &RingSpec, rng: &mut ChaCha8Rng) -> Vec<Polynomial> {
    let len = rng.gen_range(1..=ring.nvars().min(3));
    let mut out = Vec::new();
    while out.len() < len {
        let f = random_form(ring, rng.gen_range(1..=2), rng);
        if !f.is_zero() {
            out.push(f);
        }
    }
    out
}
