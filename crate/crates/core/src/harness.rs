//! Fixture-level verification of the structural statements about top local
//! cohomology and local homology.
//!
//! Isomorphisms are checked through their graded shadow: Hilbert functions
//! agree up to one constant twist per family, and commuting squares are
//! compared by the ranks of their two paths.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::artinian::ArtinianDual;
use crate::error::{Error, Result};
use crate::exactla::Matrix;
use crate::graded::{DegreewiseModule, PresentedModule, Window};
use crate::invariants::{is_cohen_macaulay, is_regular_sequence, krull_dimension, InvariantConfig};
use crate::koszul::{depth_via_koszul, sequence_degrees};
use crate::limits::{adaptive_limit, local_cohomology, local_homology, Limit, LevelSystem, LimitConfig, LimitResult};
use crate::modfile::describe;
use crate::poly::{monomials_of_degree, Polynomial, RingSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "verified")]
    Verified,
    #[serde(rename = "refuted-on-fixture")]
    Refuted,
    #[serde(rename = "inconclusive(window)")]
    InconclusiveWindow,
    #[serde(rename = "inconclusive(hypothesis)")]
    InconclusiveHypothesis,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Verified => "verified",
            Verdict::Refuted => "refuted-on-fixture",
            Verdict::InconclusiveWindow => "inconclusive(window)",
            Verdict::InconclusiveHypothesis => "inconclusive(hypothesis)",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    pub values: Vec<usize>,
    pub total: usize,
}

/// Dimensions per degree, one row per level (or per object).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub window: Window,
    pub rows: Vec<TableRow>,
}

/// One commuting square, compared by the ranks of its two paths in one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareCheck {
    pub family: String,
    pub level: u32,
    pub degree: i32,
    pub left_rank: usize,
    pub right_rank: usize,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Constant degree offset `c` with `left(j) = right(j + c)`, if one exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistRecord {
    pub family: String,
    pub twist: Option<i32>,
}

/// Stabilization flags of one limit, restricted to the degrees a check relies on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationRecord {
    pub system: String,
    pub levels: u32,
    pub window: Window,
    pub all_stable: bool,
    pub stabilization_level: Option<u32>,
    pub unstable_degrees: Vec<i32>,
    pub stable_after: Vec<Option<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub statement: String,
    pub fixture: String,
    pub tables: Vec<Table>,
    pub squares: Vec<SquareCheck>,
    pub checks: Vec<Check>,
    pub twists: Vec<TwistRecord>,
    pub stabilization: Vec<StabilizationRecord>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

struct Builder {
    report: VerificationReport,
    hypothesis_failed: bool,
    window_failed: bool,
}

impl Builder {
    fn new(statement: &str, fixture: String) -> Self {
        Self {
            report: VerificationReport {
                statement: statement.into(),
                fixture,
                tables: Vec::new(),
                squares: Vec::new(),
                checks: Vec::new(),
                twists: Vec::new(),
                stabilization: Vec::new(),
                verdict: Verdict::Verified,
                notes: Vec::new(),
            },
            hypothesis_failed: false,
            window_failed: false,
        }
    }

    fn hypothesis(&mut self, name: &str, ok: bool, detail: String) -> bool {
        self.report.checks.push(Check {
            name: format!("hypothesis: {name}"),
            passed: ok,
            detail,
        });
        if !ok {
            self.hypothesis_failed = true;
        }
        ok
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: String) {
        self.report.checks.push(Check {
            name: name.into(),
            passed,
            detail,
        });
    }

    fn note(&mut self, s: impl Into<String>) {
        self.report.notes.push(s.into());
    }

    fn table(&mut self, name: impl Into<String>, window: Window, rows: &[Vec<usize>], label: &str) {
        let rows = rows
            .iter()
            .enumerate()
            .map(|(k, v)| TableRow {
                label: format!("{label}{}", k + 1),
                values: v.clone(),
                total: v.iter().sum(),
            })
            .collect();
        self.report.tables.push(Table {
            name: name.into(),
            window,
            rows,
        });
    }

    fn square(&mut self, family: &str, level: u32, degree: i32, left_rank: usize, right_rank: usize) {
        self.report.squares.push(SquareCheck {
            family: family.into(),
            level,
            degree,
            left_rank,
            right_rank,
            equal: left_rank == right_rank,
        });
    }

    fn twist(&mut self, family: impl Into<String>, twist: Option<i32>) {
        self.report.twists.push(TwistRecord {
            family: family.into(),
            twist,
        });
    }

    fn stabilization(&mut self, system: impl Into<String>, r: &LimitResult, within: Window) {
        let degrees: Vec<_> = r.degrees.iter().filter(|d| within.contains(d.degree)).collect();
        let stable_after: Vec<Option<u32>> = degrees.iter().map(|d| d.stable_after).collect();
        self.report.stabilization.push(StabilizationRecord {
            system: system.into(),
            levels: r.levels,
            window: within,
            all_stable: degrees.iter().all(|d| d.stable),
            stabilization_level: stable_after.iter().try_fold(1, |acc, s| s.map(|s| acc.max(s))),
            unstable_degrees: degrees.iter().filter(|d| !d.stable).map(|d| d.degree).collect(),
            stable_after,
        });
    }

    fn finish(mut self) -> VerificationReport {
        let r = &mut self.report;
        let unstable = r.stabilization.iter().any(|s| !s.all_stable);
        let failed = r.checks.iter().any(|c| !c.passed) || r.squares.iter().any(|s| !s.equal);
        r.verdict = if self.hypothesis_failed {
            Verdict::InconclusiveHypothesis
        } else if unstable || self.window_failed {
            Verdict::InconclusiveWindow
        } else if failed {
            Verdict::Refuted
        } else {
            Verdict::Verified
        };
        self.report
    }
}

/// Runs `body`; window exhaustion becomes an inconclusive verdict, other errors propagate.
fn drive(statement: &str, fixture: String, body: impl FnOnce(&mut Builder) -> Result<()>) -> Result<VerificationReport> {
    let mut b = Builder::new(statement, fixture);
    match body(&mut b) {
        Ok(()) => {}
        Err(e @ (Error::WindowOverflow { .. } | Error::OutOfWindow { .. })) => {
            b.window_failed = true;
            b.note(format!("window exhausted: {e}"));
        }
        Err(e) => return Err(e),
    }
    Ok(b.finish())
}

fn show_seq(ring: &RingSpec, seq: &[Polynomial]) -> String {
    let v: Vec<String> = seq.iter().map(|f| ring.show(f)).collect();
    format!("({})", v.join(", "))
}

fn fixture(m: &PresentedModule, label: &str, seq: &[Polynomial]) -> String {
    format!("{} | {label} {}", describe(m), show_seq(m.ring(), seq))
}

fn fixture_dual(x: &ArtinianDual, seq: &[Polynomial]) -> String {
    let known = match x.known_window() {
        Some(w) => format!(" known on [{}, {}]", w.lo, w.hi),
        None => String::new(),
    };
    format!("dual of {{{}}}{known} | x {}", describe(x.dual_of()), show_seq(x.ring(), seq))
}

fn invariant_cfg(cfg: &InvariantConfig) -> InvariantConfig {
    InvariantConfig { window: None, ..*cfg }
}

fn powers(seq: &[Polynomial], ring: &RingSpec, n: u32) -> Vec<Polynomial> {
    seq.iter().map(|f| f.pow(ring.field(), n)).collect()
}

fn degree_sum(seq: &[Polynomial]) -> Result<i32> {
    Ok(sequence_degrees(seq)?.iter().sum())
}

/// Smallest `|c|` (preferring `c >= 0`) with `left[n][j] == right[n][j + c]`
/// on every overlapping degree of every level, with some nonzero entry
/// compared. Two identically zero families agree with twist 0.
pub fn discover_twist(left: &[Vec<usize>], lw: Window, right: &[Vec<usize>], rw: Window) -> Option<i32> {
    let all_zero = |t: &[Vec<usize>]| t.iter().all(|row| row.iter().all(|&v| v == 0));
    if all_zero(left) && all_zero(right) {
        return Some(0);
    }
    let bound = (lw.len() + rw.len()) as i32;
    let candidates = std::iter::once(0).chain((1..=bound).flat_map(|c| [c, -c]));
    for c in candidates {
        let mut nonzero = false;
        let mut ok = true;
        'rows: for (l, r) in left.iter().zip(right) {
            for j in lw.degrees() {
                let k = j + c;
                if !rw.contains(k) {
                    continue;
                }
                let a = l[(j - lw.lo) as usize];
                let b = r[(k - rw.lo) as usize];
                if a != b {
                    ok = false;
                    break 'rows;
                }
                nonzero |= a != 0;
            }
        }
        if ok && nonzero {
            return Some(c);
        }
    }
    None
}

/// Gates shared by several statements: `M != 0` and Cohen-Macaulay. Returns `dim M`.
fn gate_cm(b: &mut Builder, m: &PresentedModule, cfg: &InvariantConfig) -> Result<Option<usize>> {
    if !b.hypothesis("M is nonzero", !m.is_zero(), String::new()) {
        return Ok(None);
    }
    let dim = krull_dimension(m, cfg)?;
    let depth = depth_via_koszul(m, None)?;
    let cm = is_cohen_macaulay(m, cfg)?;
    let ok = b.hypothesis(
        "M is Cohen-Macaulay",
        cm,
        format!("depth {} dim {}", depth.depth, dim.dim),
    );
    Ok(ok.then_some(dim.dim as usize))
}

fn gate_sop(b: &mut Builder, m: &PresentedModule, sop: &[Polynomial], d: usize) -> Result<bool> {
    let q = m.quotient_by_elements(sop)?;
    let finite = q.first_vanishing_degree(q.top_bound() + 1).is_some();
    Ok(b.hypothesis(
        "sequence is a system of parameters",
        sop.len() == d && finite,
        format!("length {} dim {d} finite quotient {finite}", sop.len()),
    ))
}

/// Upper end of comparison windows involving `M/(x^n)M`.
fn quotient_top(m: &PresentedModule, seq: &[Polynomial], n: u32) -> Result<i32> {
    Ok(m.quotient_by_elements(&powers(seq, m.ring(), n))?.top_bound().max(m.top_bound()))
}

fn ranks(mats: &[Matrix]) -> Vec<usize> {
    mats.iter().map(Matrix::rank).collect()
}

/// `H^i_I(M)` on a window ending just above its top nonzero degree, long
/// enough for Hilbert-polynomial fits on its dual.
fn top_cohomology(
    m: &PresentedModule,
    ideal: &[Polynomial],
    i: usize,
    cfg: &InvariantConfig,
) -> Result<(Limit, Window)> {
    let lcfg = cfg.limit();
    if let Some(w) = cfg.window {
        let (_, lim) = local_cohomology(m, ideal, i, w, &lcfg)?;
        return Ok((lim, w));
    }
    let top = m.top_bound();
    let span = cfg.hilbert_fit_span as i32;
    let mut a = None;
    for k in 0..4 {
        let w = Window {
            lo: top - 6 * (k + 1) + 1,
            hi: top - 6 * k,
        };
        let (_, lim) = local_cohomology(m, ideal, i, w, &lcfg)?;
        if let Some(j) = lim.result.degrees.iter().rev().find(|d| d.dim > 0) {
            a = Some(j.degree);
            break;
        }
    }
    let w = match a {
        Some(a) => Window {
            lo: a - span - 1,
            hi: a + 1,
        },
        None => Window {
            lo: top - span - 5,
            hi: top,
        },
    };
    let (_, lim) = local_cohomology(m, ideal, i, w, &lcfg)?;
    Ok((lim, w))
}

/// Sequence `seq` regular on a Cohen-Macaulay `M`: it is coregular on
/// `H^d_m(M)`, `H^{d-i}_m(M/(x_1^n..x_i^n)M)` and `0 :_{H^d_m(M)} (x_1^n..x_i^n)`
/// have equal Hilbert functions up to a twist, and the natural maps between
/// consecutive levels have the same ranks as multiplication by `x_1⋯x_i`.
pub fn verify_prop21(
    m: &PresentedModule,
    seq: &[Polynomial],
    n_max: u32,
    cfg: &InvariantConfig,
) -> Result<VerificationReport> {
    let icfg = invariant_cfg(cfg);
    let lcfg = cfg.limit();
    let ring = m.ring().clone();
    drive("Prop2.1", fixture(m, "seq", seq), |b| {
        if n_max == 0 {
            return Err(Error::Input("n_max must be at least 1".into()));
        }
        let Some(d) = gate_cm(b, m, &icfg)? else { return Ok(()) };
        let reg = is_regular_sequence(m, seq, &icfg)?;
        if !b.hypothesis(
            "sequence is regular on M",
            reg.regular && !seq.is_empty(),
            format!("failed at {:?}", reg.failed_at),
        ) {
            return Ok(());
        }
        let vars = ring.vars();
        let degs = sequence_degrees(seq)?;
        let s_all: i32 = degs.iter().sum();
        let wc = cfg.window.unwrap_or(Window {
            lo: m.min_twist() - 2,
            hi: quotient_top(m, seq, n_max)?,
        });
        let wx = Window {
            lo: wc.lo - n_max as i32 * s_all,
            hi: wc.hi.max(m.top_bound()),
        };
        let (_, h) = local_cohomology(m, &vars, d, wx, &lcfg)?;
        b.stabilization("H^d_m(M)", &h.result, wx);
        let x = ArtinianDual::from_degreewise(&h.module, &ring)?;
        let co = x.is_coregular(seq, wx)?;
        b.check(
            "sequence is coregular on H^d_m(M)",
            co.coregular,
            format!("steps {:?}", co.steps),
        );
        for i in 1..=seq.len() {
            let prefix = &seq[..i];
            let s_i: i32 = degs[..i].iter().sum();
            let hb = h.module.restrict(Window {
                lo: wc.lo - n_max as i32 * s_i,
                hi: wc.hi,
            })?;
            let right = LevelSystem::homology(&hb, prefix, i, n_max, wc)?;
            let quots = (1..=n_max)
                .map(|n| m.quotient_by_elements(&powers(prefix, &ring, n)))
                .collect::<Result<Vec<_>>>()?;
            let lefts = quots
                .par_iter()
                .map(|q| local_cohomology(q, &vars, d - i, wc, &lcfg))
                .collect::<Result<Vec<_>>>()?;
            for (n, (_, l)) in lefts.iter().enumerate() {
                b.stabilization(format!("H^{}_m(M/(x^{})M), i={i}", d - i, n + 1), &l.result, wc);
            }
            let left_dims: Vec<Vec<usize>> = lefts.iter().map(|(_, l)| l.result.hilbert()).collect();
            let right_dims = right.level_dims();
            b.table(format!("H^{}_m(M/(x_1^n..x_{i}^n)M)", d - i), wc, &left_dims, "n=");
            b.table(format!("0:_H(x_1^n..x_{i}^n), i={i}"), wc, &right_dims, "n=");
            let family = format!("alpha i={i}");
            let twist = discover_twist(&left_dims, wc, &right_dims, wc);
            b.twist(family.clone(), twist);
            b.check(
                format!("{family}: Hilbert functions agree up to a constant twist"),
                twist.is_some(),
                format!("twist {twist:?}"),
            );
            let Some(c) = twist else { continue };
            if n_max < 2 {
                continue;
            }
            let lv = lefts.iter().map(|(s, _)| s.levels()).max().unwrap_or(1);
            let base_w = LevelSystem::cohomology_base_window(&vars, lv, wc)?;
            let systems = quots
                .par_iter()
                .zip(&lefts)
                .map(|(q, (s, _))| {
                    if s.levels() == lv {
                        Ok(s.clone())
                    } else {
                        LevelSystem::cohomology(&q.realize(base_w)?, &vars, d - i, lv, wc)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let square_family = format!("nu_n vs x_1..x_{i}");
            for n in 1..n_max {
                let k = n as usize;
                let proj = quots[k].natural_projection(&quots[k - 1], base_w)?;
                let nu = systems[k].induced_level_map(&systems[k - 1], lv, &|j| proj.at(j).cloned())?;
                let nu_ranks = ranks(&nu);
                for j in wc.degrees() {
                    if !wc.contains(j + c) {
                        continue;
                    }
                    let rr = right.transition(n, j + c)?.rank();
                    b.square(&square_family, n, j, nu_ranks[(j - wc.lo) as usize], rr);
                }
            }
        }
        Ok(())
    })
}

/// The case `i = d` with a full system of parameters: `M/(x^n)M` against
/// `0 :_{H^d_m(M)} (x^n)`.
pub fn verify_cor22(
    m: &PresentedModule,
    sop: &[Polynomial],
    n_max: u32,
    cfg: &InvariantConfig,
) -> Result<VerificationReport> {
    let icfg = invariant_cfg(cfg);
    let lcfg = cfg.limit();
    let ring = m.ring().clone();
    drive("Cor2.2", fixture(m, "sop", sop), |b| {
        if n_max == 0 {
            return Err(Error::Input("n_max must be at least 1".into()));
        }
        let Some(d) = gate_cm(b, m, &icfg)? else { return Ok(()) };
        if !gate_sop(b, m, sop, d)? {
            return Ok(());
        }
        let s = degree_sum(sop)?;
        let wc = cfg.window.unwrap_or(Window {
            lo: m.min_twist() - 1,
            hi: quotient_top(m, sop, n_max)?,
        });
        let wx = Window {
            lo: wc.lo - n_max as i32 * s,
            hi: wc.hi.max(m.top_bound()),
        };
        let (_, h) = local_cohomology(m, &ring.vars(), d, wx, &lcfg)?;
        b.stabilization("H^d_m(M)", &h.result, wx);
        let right = LevelSystem::homology(&h.module, sop, d, n_max, wc)?;
        let quots = (1..=n_max)
            .map(|n| m.quotient_by_elements(&powers(sop, &ring, n)))
            .collect::<Result<Vec<_>>>()?;
        let left_dims: Vec<Vec<usize>> = quots.par_iter().map(|q| q.hilbert_function(wc)).collect();
        let right_dims = right.level_dims();
        b.table("M/(x^n)M", wc, &left_dims, "n=");
        b.table("0:_H(x^n)", wc, &right_dims, "n=");
        let twist = discover_twist(&left_dims, wc, &right_dims, wc);
        b.twist("alpha_n", twist);
        b.check(
            "alpha_n: Hilbert functions agree up to a constant twist",
            twist.is_some(),
            format!("twist {twist:?}"),
        );
        let Some(c) = twist else { return Ok(()) };
        for n in 1..n_max {
            let k = n as usize;
            let proj = quots[k].natural_projection(&quots[k - 1], wc)?;
            for j in wc.degrees() {
                if !wc.contains(j + c) {
                    continue;
                }
                let lr = proj.at(j)?.rank();
                let rr = right.transition(n, j + c)?.rank();
                b.square("nu_n vs x_1..x_d", n, j, lr, rr);
            }
        }
        Ok(())
    })
}

/// `H^d_I(M)` with `d = dim M`, realized on a window below its top degree.
fn top_of(b: &mut Builder, m: &PresentedModule, ideal: &[Polynomial], d: usize, cfg: &InvariantConfig) -> Result<(DegreewiseModule, Window)> {
    let (lim, w) = top_cohomology(m, ideal, d, cfg)?;
    b.stabilization(format!("H^{d}_I(M)"), &lim.result, w);
    b.table(format!("H^{d}_I(M)"), w, &[lim.result.hilbert()], "limit");
    Ok((lim.module, w))
}

fn nonzero_and_dim(b: &mut Builder, m: &PresentedModule, cfg: &InvariantConfig) -> Result<Option<usize>> {
    if !b.hypothesis("M is nonzero", !m.is_zero(), String::new()) {
        return Ok(None);
    }
    Ok(Some(krull_dimension(m, cfg)?.dim as usize))
}

/// `N.dim H^d_I(M) <= dim M`.
pub fn verify_prop23(m: &PresentedModule, ideal: &[Polynomial], cfg: &InvariantConfig) -> Result<VerificationReport> {
    let icfg = invariant_cfg(cfg);
    drive("Prop2.3", fixture(m, "I", ideal), |b| {
        let Some(d) = nonzero_and_dim(b, m, &icfg)? else { return Ok(()) };
        let (h, _) = top_of(b, m, ideal, d, cfg)?;
        if h.is_zero() {
            b.check("N.dim H^d_I(M) <= d", true, format!("H^{d}_I(M) vanishes on the window"));
            return Ok(());
        }
        let x = ArtinianDual::from_degreewise(&h, m.ring())?;
        let nd = x.ndim(&icfg)?;
        if !nd.fit_exact {
            b.note("N.dim read from random annihilators; the Hilbert fit of the dual was inexact");
        }
        b.check(
            "N.dim H^d_I(M) <= d",
            nd.ndim <= d as i64,
            format!("N.dim {} d {d} cross-check {:?}", nd.ndim, nd.cross_check),
        );
        Ok(())
    })
}

/// `width H^d_I(M) >= min(2, d)` when `H^d_I(M) != 0`.
pub fn verify_prop24(m: &PresentedModule, ideal: &[Polynomial], cfg: &InvariantConfig) -> Result<VerificationReport> {
    let icfg = invariant_cfg(cfg);
    drive("Prop2.4", fixture(m, "I", ideal), |b| {
        let Some(d) = nonzero_and_dim(b, m, &icfg)? else { return Ok(()) };
        let (h, _) = top_of(b, m, ideal, d, cfg)?;
        if !b.hypothesis("H^d_I(M) is nonzero", !h.is_zero(), "checked on the window".into()) {
            return Ok(());
        }
        let x = ArtinianDual::from_degreewise(&h, m.ring())?;
        let w = x.width(&icfg)?;
        let width = w.width.finite().unwrap_or(usize::MAX);
        b.check(
            "width H^d_I(M) >= min(2, d)",
            width >= d.min(2),
            format!("width {:?} d {d} greedy {:?}", w.width, w.cross_check),
        );
        Ok(())
    })
}

/// Co-Cohen-Macaulayness of top local cohomology: for `d <= 2` with
/// `H^d_I(M) != 0`, and for Cohen-Macaulay `M` with `I = m` (then of N.dim `d`).
pub fn verify_cocm(m: &PresentedModule, ideal: &[Polynomial], cfg: &InvariantConfig) -> Result<VerificationReport> {
    let icfg = invariant_cfg(cfg);
    let ring = m.ring().clone();
    drive("Cor2.5+Prop2.6", fixture(m, "I", ideal), |b| {
        let Some(d) = nonzero_and_dim(b, m, &icfg)? else { return Ok(()) };
        let (h, _) = top_of(b, m, ideal, d, cfg)?;
        let small = d <= 2 && !h.is_zero();
        let cm = is_cohen_macaulay(m, &icfg)?;
        b.check(
            "applicability: d <= 2 and H^d_I(M) != 0",
            true,
            format!("{small} (d {d})"),
        );
        b.check("applicability: M Cohen-Macaulay", true, format!("{cm}"));
        if small {
            let x = ArtinianDual::from_degreewise(&h, &ring)?;
            let w = x.width(&icfg)?;
            let nd = x.ndim(&icfg)?;
            b.check(
                "H^d_I(M) is co-Cohen-Macaulay",
                w.width.finite().map(|v| v as i64) == Some(nd.ndim),
                format!("width {:?} N.dim {}", w.width, nd.ndim),
            );
        }
        if cm {
            let vars = ring.vars();
            let hm = if ideal == vars.as_slice() {
                h.clone()
            } else {
                let (lim, w) = top_cohomology(m, &vars, d, cfg)?;
                b.stabilization(format!("H^{d}_m(M)"), &lim.result, w);
                lim.module
            };
            let x = ArtinianDual::from_degreewise(&hm, &ring)?;
            let w = x.width(&icfg)?;
            let nd = x.ndim(&icfg)?;
            b.check(
                "H^d_m(M) is co-Cohen-Macaulay of N.dim d",
                w.width.finite().map(|v| v as i64) == Some(nd.ndim) && nd.ndim == d as i64,
                format!("width {:?} N.dim {} d {d}", w.width, nd.ndim),
            );
        }
        if !small && !cm {
            b.hypothesis(
                "d <= 2 with H^d_I(M) != 0, or M Cohen-Macaulay",
                false,
                format!("d {d}"),
            );
        }
        Ok(())
    })
}

/// For Cohen-Macaulay `M` with system of parameters `x`: `H_i^x(H^j_m(M))`
/// vanishes unless `i = j = d`, `H_d^x(H^d_m(M))` has the Hilbert function of
/// `M`, and the inverse systems `0 :_H (x^n)` and `M/(x^n)M` match level by level.
pub fn verify_thm31(m: &PresentedModule, sop: &[Polynomial], cfg: &InvariantConfig) -> Result<VerificationReport> {
    let icfg = invariant_cfg(cfg);
    let lcfg = cfg.limit();
    let ring = m.ring().clone();
    drive("Thm3.1", fixture(m, "sop", sop), |b| {
        let Some(d) = gate_cm(b, m, &icfg)? else { return Ok(()) };
        if !gate_sop(b, m, sop, d)? {
            return Ok(());
        }
        let vars = ring.vars();
        let s = degree_sum(sop)?;
        let lt = cfg.levels.max(1);
        let g0 = m.min_twist();
        let wh = cfg.window.unwrap_or(Window { lo: g0 - 1, hi: g0 + 3 });
        let wt = Window {
            lo: wh.lo,
            hi: wh.hi.max(quotient_top(m, sop, lt)?),
        };
        let mut levels = cfg.levels.max(2 * cfg.streak);
        let (hs, lhs) = loop {
            let wx = Window {
                lo: wt.lo - levels as i32 * s,
                hi: wt.hi,
            };
            let hs = (0..=d)
                .map(|j| Ok((wx, local_cohomology(m, &vars, j, wx, &lcfg)?.1)))
                .collect::<Result<Vec<_>>>()?;
            let lhs = hs
                .iter()
                .map(|(_, h)| {
                    (0..=d)
                        .into_par_iter()
                        .map(|i| {
                            let sys = LevelSystem::homology(&h.module, sop, i, levels, wt)?;
                            let lim = sys.limit(cfg.streak)?;
                            Ok((sys, lim))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let top = &lhs[d][d].1.result;
            let stable = top.degrees.iter().filter(|x| wh.contains(x.degree)).all(|x| x.stable);
            if stable || levels >= cfg.max_levels {
                break (hs, lhs);
            }
            levels = (levels + 4).min(cfg.max_levels);
        };
        for (j, (wx, h)) in hs.iter().enumerate() {
            b.stabilization(format!("H^{j}_m(M)"), &h.result, *wx);
        }
        for (j, row) in lhs.iter().enumerate() {
            for (i, (_, lim)) in row.iter().enumerate() {
                b.stabilization(format!("H_{i}^x(H^{j}_m(M))"), &lim.result, wh);
                let dims: Vec<usize> = lim
                    .result
                    .degrees
                    .iter()
                    .filter(|x| wh.contains(x.degree))
                    .map(|x| x.dim)
                    .collect();
                if i == d && j == d {
                    let target = m.hilbert_function(wh);
                    b.table("H_d^x(H^d_m(M))", wh, std::slice::from_ref(&dims), "limit");
                    b.table("M", wh, std::slice::from_ref(&target), "module");
                    b.check(
                        "H_d^x(H^d_m(M)) has the Hilbert function of M",
                        dims == target,
                        format!("{dims:?} vs {target:?}"),
                    );
                } else {
                    b.check(
                        format!("H_{i}^x(H^{j}_m(M)) vanishes"),
                        dims.iter().all(|&v| v == 0),
                        format!("{dims:?}"),
                    );
                }
            }
        }
        let sys = &lhs[d][d].0;
        let left_dims: Vec<Vec<usize>> = (1..=lt).map(|n| sys.module(n).hilbert().to_vec()).collect();
        let quots = (1..=lt)
            .map(|n| m.quotient_by_elements(&powers(sop, &ring, n)))
            .collect::<Result<Vec<_>>>()?;
        let right_dims: Vec<Vec<usize>> = quots.par_iter().map(|q| q.hilbert_function(wt)).collect();
        b.table("0:_H(x^n)", wt, &left_dims, "n=");
        b.table("M/(x^n)M", wt, &right_dims, "n=");
        let twist = discover_twist(&left_dims, wt, &right_dims, wt);
        b.twist("inverse systems", twist);
        b.check(
            "inverse systems have equal level dimensions up to a constant twist",
            twist.is_some(),
            format!("twist {twist:?}"),
        );
        if let Some(c) = twist {
            for n in 1..lt {
                let k = n as usize;
                let psi = quots[k].natural_projection(&quots[k - 1], wt)?;
                for j in wt.degrees() {
                    if !wt.contains(j + c) {
                        continue;
                    }
                    let lr = sys.transition(n, j)?.rank();
                    let rr = psi.at(j + c)?.rank();
                    b.square("phi_n vs psi_n", n, j, lr, rr);
                }
            }
        }
        Ok(())
    })
}

/// Span equality of two lists of degree-`e` forms.
fn same_span(ring: &RingSpec, e: u32, a: &[Polynomial], b: &[Polynomial]) -> bool {
    let monos = monomials_of_degree(ring.nvars(), e);
    let mat = |ps: &[&Polynomial]| {
        let cols: Vec<Vec<u32>> = ps.iter().map(|p| monos.iter().map(|m| p.coefficient(m)).collect()).collect();
        Matrix::from_columns(ring.field(), monos.len(), &cols)
    };
    let ra = mat(&a.iter().collect::<Vec<_>>()).rank();
    let rb = mat(&b.iter().collect::<Vec<_>>()).rank();
    let rab = mat(&a.iter().chain(b).collect::<Vec<_>>()).rank();
    ra == rab && rb == rab
}

/// Windowed annihilator pieces of `H^d_m(M)` and of `M` agree up to `maxdeg`.
pub fn verify_cor32(m: &PresentedModule, maxdeg: u32, cfg: &InvariantConfig) -> Result<VerificationReport> {
    let icfg = invariant_cfg(cfg);
    let ring = m.ring().clone();
    drive("Cor3.2", describe(m), |b| {
        let Some(d) = gate_cm(b, m, &icfg)? else { return Ok(()) };
        let (h, hw) = top_of(b, m, &ring.vars(), d, cfg)?;
        let mw = Window {
            lo: m.min_twist(),
            hi: m.min_twist() + hw.len() as i32 + maxdeg as i32,
        };
        let ann_m = m.annihilator_pieces(maxdeg, mw)?;
        let ann_h = h.annihilator_pieces(&ring, maxdeg)?;
        b.note(format!(
            "annihilators are windowed: M on [{}, {}], H^d_m(M) on [{}, {}]",
            mw.lo, mw.hi, hw.lo, hw.hi
        ));
        for (pm, ph) in ann_m.iter().zip(&ann_h) {
            let e = pm.degree;
            b.check(
                format!("annihilators agree in degree {e}"),
                same_span(&ring, e, &pm.basis, &ph.basis),
                format!("dims {} and {}", pm.basis.len(), ph.basis.len()),
            );
        }
        Ok(())
    })
}

/// For a co-Cohen-Macaulay `X` of N.dim `d` and `x` with `0 :_X (x)` of finite
/// length: `Y = H_d^x(X)` satisfies `Y/(x^n)Y ~ 0 :_X (x^n)` compatibly with
/// the transitions, and `H^d_x(Y)` has the Hilbert function of `X`.
pub fn verify_lemma33_thm34(x: &ArtinianDual, xs: &[Polynomial], cfg: &InvariantConfig) -> Result<VerificationReport> {
    let icfg = invariant_cfg(cfg);
    let lcfg = cfg.limit();
    drive("Lemma3.3+Thm3.4", fixture_dual(x, xs), |b| {
        if !b.hypothesis("X is nonzero", !x.is_zero(), String::new()) {
            return Ok(());
        }
        let w = x.width(&icfg)?;
        let nd = x.ndim(&icfg)?;
        let cocm = w.width.finite().map(|v| v as i64) == Some(nd.ndim);
        if !b.hypothesis(
            "X is co-Cohen-Macaulay",
            cocm,
            format!("width {:?} N.dim {}", w.width, nd.ndim),
        ) {
            return Ok(());
        }
        let d = nd.ndim as usize;
        if !b.hypothesis(
            "sequence length equals N.dim X",
            xs.len() == d,
            format!("length {} N.dim {d}", xs.len()),
        ) {
            return Ok(());
        }
        let fl = x.annihilator_submodule(xs)?.finite_length(&icfg)?;
        if !b.hypothesis("0:_X(x) has finite length", fl.is_some(), format!("length {fl:?}")) {
            return Ok(());
        }
        let s = degree_sum(xs)?;
        let maxdeg = sequence_degrees(xs)?.into_iter().max().unwrap_or(0);
        let xtop = -x.dual_of().min_twist();
        let wt = cfg.window.unwrap_or(Window {
            lo: xtop - 4,
            hi: xtop + 1,
        });
        let lc_levels = cfg.levels.max(2 * cfg.streak);
        let wy = Window {
            lo: wt.lo,
            hi: wt.hi + lc_levels as i32 * s,
        };
        let (_, ylim) = local_homology(&|w| x.realize(w), xs, d, wy, &lcfg)?;
        b.stabilization("H_d^x(X)", &ylim.result, wy);
        let y = ylim.module;
        b.table("H_d^x(X)", wy, &[y.hilbert().to_vec()], "limit");
        let fixed = LimitConfig {
            levels: lc_levels,
            ..lcfg
        };
        let (sys, lim) = adaptive_limit(&fixed, &|levels| {
            let bw = LevelSystem::cohomology_base_window(xs, levels, wt)?;
            LevelSystem::cohomology(&y.restrict(bw)?, xs, d, levels, wt)
        })?;
        b.stabilization("H^d_x(H_d^x(X))", &lim.result, wt);
        let round = lim.result.hilbert();
        let target = x.hilbert_function(wt)?;
        b.table("H^d_x(H_d^x(X))", wt, std::slice::from_ref(&round), "limit");
        b.table("X", wt, std::slice::from_ref(&target), "module");
        b.check(
            "H^d_x(H_d^x(X)) has the Hilbert function of X",
            round == target,
            format!("{round:?} vs {target:?}"),
        );

        let nl = sys.levels().min(3);
        let left_dims: Vec<Vec<usize>> = (1..=nl).map(|n| sys.module(n).hilbert().to_vec()).collect();
        let right_dims = (1..=nl)
            .map(|n| {
                if xs.is_empty() {
                    return x.hilbert_function(wt);
                }
                let ext = x.realize(Window {
                    lo: wt.lo,
                    hi: wt.hi + n as i32 * maxdeg,
                })?;
                Ok(ext.colon(&powers(xs, x.ring(), n))?.hilbert().to_vec())
            })
            .collect::<Result<Vec<_>>>()?;
        b.table("Y/(x^n)Y", wt, &left_dims, "n=");
        b.table("0:_X(x^n)", wt, &right_dims, "n=");
        let twist = discover_twist(&left_dims, wt, &right_dims, wt);
        b.twist("beta_n", twist);
        b.check(
            "beta_n: Hilbert functions agree up to a constant twist",
            twist.is_some(),
            format!("twist {twist:?}"),
        );
        if let Some(c) = twist {
            for n in 1..nl {
                for j in wt.degrees() {
                    if !wt.contains(j + c) {
                        continue;
                    }
                    let lr = sys.transition(n, j)?.rank();
                    let rr = right_dims[n as usize - 1][(j + c - wt.lo) as usize];
                    b.square("x_1..x_d vs i_n", n, j, lr, rr);
                }
            }
        }

        let mut regular = true;
        for k in 0..xs.len() {
            let cur = if k == 0 { y.clone() } else { y.quotient_by(&xs[..k])? };
            let e = sequence_degrees(&xs[k..=k])?[0];
            let cw = cur.window();
            for j in cw.lo..=cw.hi - e {
                let map = cur.poly_map(&xs[k], j)?;
                regular &= map.rank() == map.cols();
            }
        }
        let q = y.quotient_by(xs)?;
        let qh = q.hilbert();
        let finite = qh.last() == Some(&0);
        b.check(
            "x is regular on H_d^x(X) and the quotient is nonzero of finite length",
            regular && !q.is_zero() && finite,
            format!("regular {regular} quotient {qh:?}"),
        );
        b.note("finite generation of H_d^x(X) is not asserted; the quotient check is windowed");
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::PrimeField;

    fn ring(n: usize) -> RingSpec {
        RingSpec::standard(PrimeField::default(), n)
    }

    #[test]
    fn twist_discovery() {
        let w = Window { lo: 0, hi: 3 };
        let left = vec![vec![0, 1, 2, 0]];
        let right = vec![vec![1, 2, 0, 0]];
        assert_eq!(discover_twist(&left, w, &right, w), Some(-1));
        assert_eq!(discover_twist(&left, w, &left, w), Some(0));
        assert_eq!(discover_twist(&[vec![0; 4]], w, &[vec![0; 4]], w), Some(0));
        assert_eq!(discover_twist(&[vec![5, 5, 5, 5]], w, &[vec![1, 1, 1, 1]], w), None);
    }

    #[test]
    fn prop21_plane() {
        let r = ring(2);
        let m = PresentedModule::free(r.clone(), vec![0]);
        let rep = verify_prop21(&m, &r.vars(), 3, &InvariantConfig::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Verified, "{rep:#?}");
        let t = rep.table("0:_H(x_1^n..x_2^n), i=2").unwrap();
        let totals: Vec<usize> = t.rows.iter().map(|r| r.total).collect();
        assert_eq!(totals, vec![1, 4, 9]);
    }

    #[test]
    fn prop21_line() {
        let r = ring(1);
        let m = PresentedModule::free(r.clone(), vec![0]);
        let rep = verify_prop21(&m, &r.vars(), 3, &InvariantConfig::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Verified, "{rep:#?}");
        let t = rep.table("0:_H(x_1^n..x_1^n), i=1").unwrap();
        let totals: Vec<usize> = t.rows.iter().map(|r| r.total).collect();
        assert_eq!(totals, vec![1, 2, 3]);
    }

    #[test]
    fn non_cm_gate() {
        let r = ring(2);
        let (x, y) = (r.var(0), r.var(1));
        let k = r.field();
        let m = PresentedModule::cyclic(r.clone(), &[x.mul(k, &x), x.mul(k, &y)]).unwrap();
        let cfg = InvariantConfig::default();
        assert_eq!(verify_prop21(&m, std::slice::from_ref(&y), 2, &cfg).unwrap().verdict, Verdict::InconclusiveHypothesis);
        assert_eq!(verify_cor22(&m, std::slice::from_ref(&y), 2, &cfg).unwrap().verdict, Verdict::InconclusiveHypothesis);
        assert_eq!(verify_thm31(&m, &[y], &cfg).unwrap().verdict, Verdict::InconclusiveHypothesis);
    }
}
