//! Command layer shared by the `gradus` binary and tests: configuration,
//! dispatch of verbs, and report rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::artinian::ArtinianDual;
use crate::error::{Error, Result};
use crate::graded::{PresentedModule, Window};
use crate::harness::{self, Verdict, VerificationReport};
use crate::invariants::{self, InvariantConfig};
use crate::koszul::KoszulComplex;
use crate::limits::{local_cohomology, local_homology, LimitResult};
use crate::modfile::{describe, parse_module_file, parse_sequence};
use crate::poly::Polynomial;

/// Version of the JSON envelope.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(Error::Input(format!("unknown format '{s}' (expected text or json)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statement {
    Prop21,
    Cor22,
    Prop23,
    Prop24,
    Cocm,
    Thm31,
    Cor32,
    Thm34,
}

impl FromStr for Statement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "prop21" => Statement::Prop21,
            "cor22" => Statement::Cor22,
            "prop23" => Statement::Prop23,
            "prop24" => Statement::Prop24,
            "cocm" => Statement::Cocm,
            "thm31" => Statement::Thm31,
            "cor32" => Statement::Cor32,
            "thm34" => Statement::Thm34,
            _ => {
                return Err(Error::Input(format!(
                    "unknown statement '{s}' (expected prop21, cor22, prop23, prop24, cocm, thm31, cor32 or thm34)"
                )))
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verb {
    Hilbert,
    Dim,
    Depth,
    Cm,
    Sop,
    Koszul,
    Lc,
    Lh,
    Ndim,
    Width,
    Cocm,
    Verify(Statement),
}

impl Verb {
    pub fn parse(verb: &str, statement: Option<&str>) -> Result<Self> {
        let v = match verb {
            "hilbert" => Verb::Hilbert,
            "dim" => Verb::Dim,
            "depth" => Verb::Depth,
            "cm" => Verb::Cm,
            "sop" => Verb::Sop,
            "koszul" => Verb::Koszul,
            "lc" => Verb::Lc,
            "lh" => Verb::Lh,
            "ndim" => Verb::Ndim,
            "width" => Verb::Width,
            "cocm" => Verb::Cocm,
            "verify" => {
                let s = statement.ok_or_else(|| Error::Input("verify needs a statement name".into()))?;
                return Ok(Verb::Verify(s.parse()?));
            }
            _ => return Err(Error::Input(format!("unknown verb '{verb}'"))),
        };
        if statement.is_some() {
            return Err(Error::Input(format!("'{verb}' takes no statement argument")));
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandConfig {
    pub verb: Verb,
    pub module: Option<PathBuf>,
    /// Generators of the ideal for `lc`, `prop23`, `prop24`, `cocm`; defaults to the variables.
    pub ideal: Option<String>,
    /// Sequence for `koszul`, `lh`, `prop21`, `cor22`, `thm31`, `thm34`.
    pub sop: Option<String>,
    pub window: Option<Window>,
    pub levels: Option<u32>,
    pub streak: u32,
    pub seed: u64,
    pub trials: u32,
    /// Homological or cohomological index for `koszul`, `lc`, `lh`.
    pub index: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl CommandConfig {
    pub fn new(verb: Verb) -> Self {
        let d = InvariantConfig::default();
        Self {
            verb,
            module: None,
            ideal: None,
            sop: None,
            window: None,
            levels: None,
            streak: d.streak,
            seed: d.seed,
            trials: d.trials,
            index: None,
            format: Format::Text,
            out: None,
        }
    }

    pub fn invariant_config(&self) -> InvariantConfig {
        let d = InvariantConfig::default();
        let levels = self.levels.unwrap_or(d.levels);
        InvariantConfig {
            window: self.window,
            levels,
            streak: self.streak,
            max_levels: d.max_levels.max(levels),
            trials: self.trials,
            seed: self.seed,
            hilbert_fit_span: d.hilbert_fit_span,
        }
    }
}

/// `lo..hi`, inclusive on both ends.
pub fn parse_window(s: &str) -> Result<Window> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| Error::Input(format!("window '{s}' is not of the form lo..hi")))?;
    let lo = a.trim().parse().map_err(|_| Error::Input(format!("bad window start '{a}'")))?;
    let hi = b.trim().parse().map_err(|_| Error::Input(format!("bad window end '{b}'")))?;
    Window::new(lo, hi)
}

/// Result of a non-verification verb.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Computation {
    pub verb: String,
    pub fixture: String,
    pub values: BTreeMap<String, Value>,
}

/// Everything one invocation produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub schema: u32,
    pub reports: Vec<VerificationReport>,
    pub computations: Vec<Computation>,
}

impl Envelope {
    pub fn empty() -> Self {
        Self {
            schema: SCHEMA_VERSION,
            reports: Vec::new(),
            computations: Vec::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub envelope: Envelope,
}

pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Verified => 0,
        Verdict::Refuted => 2,
        Verdict::InconclusiveWindow | Verdict::InconclusiveHypothesis => 3,
    }
}

fn load_module(cfg: &CommandConfig) -> Result<PresentedModule> {
    let path = cfg
        .module
        .as_ref()
        .ok_or_else(|| Error::Input("this verb needs --module".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_module_file(&text)
}

fn sequence_or(m: &PresentedModule, text: Option<&String>, default: impl FnOnce() -> Result<Vec<Polynomial>>) -> Result<Vec<Polynomial>> {
    match text {
        Some(t) => parse_sequence(t, m.ring()),
        None => default(),
    }
}

fn show(m: &PresentedModule, seq: &[Polynomial]) -> Vec<String> {
    seq.iter().map(|f| m.ring().show(f)).collect()
}

/// `[-(N·d + g + 2), g + N·d + 2]` with `g` the largest generator or relation
/// degree and `d` the sum of the sequence degrees.
pub fn default_window(m: &PresentedModule, seq: &[Polynomial], levels: u32) -> Window {
    let d: i32 = seq.iter().filter_map(Polynomial::homogeneous_degree).map(|e| e as i32).sum();
    let g = m.max_degree();
    let reach = levels as i32 * d + g + 2;
    Window { lo: -reach, hi: reach }
}

fn limit_values(r: &LimitResult) -> BTreeMap<String, Value> {
    let mut v = BTreeMap::new();
    v.insert("window".into(), json!([r.window.lo, r.window.hi]));
    v.insert("levels".into(), json!(r.levels));
    v.insert("index".into(), json!(r.index));
    v.insert("degrees".into(), json!(r.degrees.iter().map(|d| d.degree).collect::<Vec<_>>()));
    v.insert("dims".into(), json!(r.hilbert()));
    v.insert(
        "stable_after".into(),
        json!(r.degrees.iter().map(|d| d.stable_after).collect::<Vec<_>>()),
    );
    v.insert("all_stable".into(), json!(r.all_stable()));
    v.insert("unstable_degrees".into(), json!(r.unstable_degrees()));
    v
}

fn compute(cfg: &CommandConfig) -> Result<(Envelope, i32)> {
    let icfg = cfg.invariant_config();
    let m = load_module(cfg)?;
    let mut env = Envelope::empty();
    let fixture = describe(&m);
    let mut values = BTreeMap::new();
    let mut code = 0;
    let verb_name = match cfg.verb {
        Verb::Verify(s) => {
            let vars = m.ring().vars();
            let report = match s {
                Statement::Prop21 => {
                    let seq = sequence_or(&m, cfg.sop.as_ref(), || Ok(vars.clone()))?;
                    harness::verify_prop21(&m, &seq, cfg.levels.unwrap_or(3), &icfg)?
                }
                Statement::Cor22 => {
                    let sop = sequence_or(&m, cfg.sop.as_ref(), || invariants::find_sop(&m, &icfg))?;
                    harness::verify_cor22(&m, &sop, cfg.levels.unwrap_or(4), &icfg)?
                }
                Statement::Prop23 | Statement::Prop24 | Statement::Cocm => {
                    let ideal = sequence_or(&m, cfg.ideal.as_ref(), || Ok(vars.clone()))?;
                    match s {
                        Statement::Prop23 => harness::verify_prop23(&m, &ideal, &icfg)?,
                        Statement::Prop24 => harness::verify_prop24(&m, &ideal, &icfg)?,
                        _ => harness::verify_cocm(&m, &ideal, &icfg)?,
                    }
                }
                Statement::Thm31 => {
                    let sop = sequence_or(&m, cfg.sop.as_ref(), || invariants::find_sop(&m, &icfg))?;
                    harness::verify_thm31(&m, &sop, &icfg)?
                }
                Statement::Cor32 => harness::verify_cor32(&m, 3, &icfg)?,
                Statement::Thm34 => {
                    let x = ArtinianDual::graded_dual(m.clone());
                    let seq = sequence_or(&m, cfg.sop.as_ref(), || invariants::find_sop(&m, &icfg))?;
                    harness::verify_lemma33_thm34(&x, &seq, &icfg)?
                }
            };
            let code = exit_code(report.verdict);
            env.reports.push(report);
            return Ok((env, code));
        }
        Verb::Hilbert => {
            let w = cfg.window.unwrap_or(Window {
                lo: m.min_twist(),
                hi: m.min_twist() + 10,
            });
            values.insert("window".into(), json!([w.lo, w.hi]));
            values.insert("dims".into(), json!(m.hilbert_function(w)));
            "hilbert"
        }
        Verb::Dim => {
            let d = invariants::krull_dimension(&m, &icfg)?;
            values.insert("dim".into(), json!(d.dim));
            values.insert("fit_exact".into(), json!(d.fit_exact));
            values.insert("cross_check".into(), json!(d.cross_check));
            "dim"
        }
        Verb::Depth => {
            let d = invariants::depth(&m, &icfg)?;
            values.insert("depth".into(), json!(d.depth));
            values.insert("window_dependent".into(), json!(d.window_dependent));
            "depth"
        }
        Verb::Cm => {
            values.insert("cohen_macaulay".into(), json!(invariants::is_cohen_macaulay(&m, &icfg)?));
            "cm"
        }
        Verb::Sop => {
            let sop = invariants::find_sop(&m, &icfg)?;
            values.insert("sop".into(), json!(show(&m, &sop)));
            "sop"
        }
        Verb::Koszul => {
            let seq = sequence_or(&m, cfg.sop.as_ref(), || Ok(m.ring().vars()))?;
            let level = cfg.levels.unwrap_or(1);
            let w = cfg.window.unwrap_or_else(|| default_window(&m, &seq, level));
            let c = KoszulComplex::from_presented(&m, &seq, level, w)?;
            c.check_square_zero()?;
            let indices: Vec<usize> = match cfg.index {
                Some(i) if i > seq.len() => {
                    return Err(Error::Input(format!("index {i} exceeds the sequence length {}", seq.len())))
                }
                Some(i) => vec![i],
                None => (0..=seq.len()).collect(),
            };
            let mut hs = BTreeMap::new();
            for i in indices {
                hs.insert(format!("H_{i}"), json!(c.homology(i)?.module().hilbert()));
            }
            values.insert("sequence".into(), json!(show(&m, &seq)));
            values.insert("level".into(), json!(level));
            values.insert("window".into(), json!([w.lo, w.hi]));
            values.insert("homology".into(), json!(hs));
            "koszul"
        }
        Verb::Lc => {
            let ideal = sequence_or(&m, cfg.ideal.as_ref(), || Ok(m.ring().vars()))?;
            let i = match cfg.index {
                Some(i) => i,
                None => invariants::krull_dimension(&m, &InvariantConfig { window: None, ..icfg })?.dim.max(0) as usize,
            };
            let w = cfg.window.unwrap_or_else(|| default_window(&m, &ideal, icfg.levels));
            let (_, lim) = local_cohomology(&m, &ideal, i, w, &icfg.limit())?;
            if !lim.result.all_stable() {
                code = 3;
            }
            values = limit_values(&lim.result);
            values.insert("ideal".into(), json!(show(&m, &ideal)));
            "lc"
        }
        Verb::Lh => {
            let x = ArtinianDual::graded_dual(m.clone());
            let seq = sequence_or(&m, cfg.sop.as_ref(), || Ok(m.ring().vars()))?;
            let i = cfg.index.unwrap_or(seq.len());
            let w = cfg.window.unwrap_or(Window {
                lo: -m.max_twist() - 2,
                hi: -m.min_twist() + 6,
            });
            let (_, lim) = local_homology(&|w| x.realize(w), &seq, i, w, &icfg.limit())?;
            if !lim.result.all_stable() {
                code = 3;
            }
            values = limit_values(&lim.result);
            values.insert("sequence".into(), json!(show(&m, &seq)));
            "lh"
        }
        Verb::Ndim | Verb::Width | Verb::Cocm => {
            let x = ArtinianDual::graded_dual(m.clone());
            let icfg = InvariantConfig { window: None, ..icfg };
            match cfg.verb {
                Verb::Ndim => {
                    let r = x.ndim(&icfg)?;
                    values.insert("ndim".into(), json!(r.ndim));
                    values.insert("cross_check".into(), json!(r.cross_check));
                    values.insert("fit_exact".into(), json!(r.fit_exact));
                    "ndim"
                }
                Verb::Width => {
                    let r = x.width(&icfg)?;
                    values.insert("width".into(), json!(r.width.finite()));
                    values.insert("cross_check".into(), json!(r.cross_check));
                    values.insert("window_dependent".into(), json!(r.window_dependent));
                    "width"
                }
                _ => {
                    values.insert("co_cohen_macaulay".into(), json!(x.is_co_cohen_macaulay(&icfg)?));
                    "cocm"
                }
            }
        }
    };
    env.computations.push(Computation {
        verb: verb_name.into(),
        fixture,
        values,
    });
    Ok((env, code))
}

/// Executes one command. Errors become exit code 1 with the message on `Err`.
pub fn run(cfg: &CommandConfig) -> Result<RunOutcome> {
    let (envelope, exit_code) = compute(cfg)?;
    Ok(RunOutcome { exit_code, envelope })
}

pub fn to_json(env: &Envelope) -> String {
    let mut s = serde_json::to_string_pretty(env).expect("envelope serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<Envelope> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("bad report JSON: {e}")))
}

/// Renders reports in the requested format.
pub fn emit_report(reports: &[VerificationReport], format: Format) -> String {
    let env = Envelope {
        reports: reports.to_vec(),
        ..Envelope::empty()
    };
    emit(&env, format)
}

pub fn emit(env: &Envelope, format: Format) -> String {
    match format {
        Format::Json => to_json(env),
        Format::Text => {
            let mut s = String::new();
            for r in &env.reports {
                render_report(&mut s, r);
            }
            for c in &env.computations {
                let _ = writeln!(s, "{}  {}", c.verb, c.fixture);
                for (k, v) in &c.values {
                    let _ = writeln!(s, "  {k:<18} {v}");
                }
            }
            if env.reports.is_empty() && env.computations.is_empty() {
                s.push_str("no reports\n");
            }
            s
        }
    }
}

fn render_report(s: &mut String, r: &VerificationReport) {
    let _ = writeln!(s, "statement  {}", r.statement);
    let _ = writeln!(s, "fixture    {}", r.fixture);
    let _ = writeln!(s, "verdict    {}", r.verdict.as_str());
    if !r.checks.is_empty() {
        let _ = writeln!(s, "checks");
        for c in &r.checks {
            let mark = if c.passed { "pass" } else { "FAIL" };
            let _ = writeln!(s, "  [{mark}] {}  {}", c.name, c.detail);
        }
    }
    for t in &r.tables {
        let _ = writeln!(s, "table {}  [{}, {}]", t.name, t.window.lo, t.window.hi);
        let mut head = format!("  {:<8}", "degree");
        for j in t.window.degrees() {
            let _ = write!(head, "{j:>5}");
        }
        let _ = writeln!(s, "{head}  total");
        for row in &t.rows {
            let mut line = format!("  {:<8}", row.label);
            for v in &row.values {
                let _ = write!(line, "{v:>5}");
            }
            let _ = writeln!(s, "{line}  {}", row.total);
        }
    }
    for t in &r.twists {
        let tw = t.twist.map_or("none".to_string(), |c| c.to_string());
        let _ = writeln!(s, "twist {}  {tw}", t.family);
    }
    for st in &r.stabilization {
        let by = st.stabilization_level.map_or("-".to_string(), |l| l.to_string());
        let _ = writeln!(
            s,
            "limit {}  levels {} window [{}, {}] stable {} by level {by} unstable {:?}",
            st.system, st.levels, st.window.lo, st.window.hi, st.all_stable, st.unstable_degrees
        );
    }
    if !r.squares.is_empty() {
        let bad: Vec<_> = r.squares.iter().filter(|q| !q.equal).collect();
        let _ = writeln!(s, "squares    {} compared, {} unequal", r.squares.len(), bad.len());
        for q in bad {
            let _ = writeln!(
                s,
                "  {} level {} degree {}: ranks {} vs {}",
                q.family, q.level, q.degree, q.left_rank, q.right_rank
            );
        }
    }
    for n in &r.notes {
        let _ = writeln!(s, "note       {n}");
    }
    s.push('\n');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_and_verbs() {
        assert_eq!(parse_window("-3..4").unwrap(), Window { lo: -3, hi: 4 });
        assert!(parse_window("4..-3").is_err());
        assert!(parse_window("3").is_err());
        assert_eq!(Verb::parse("verify", Some("thm31")).unwrap(), Verb::Verify(Statement::Thm31));
        assert!(Verb::parse("verify", None).is_err());
        assert!(Verb::parse("frobnicate", None).is_err());
        assert!(Verb::parse("dim", Some("x")).is_err());
    }

    #[test]
    fn empty_report_set() {
        let json = emit_report(&[], Format::Json);
        let env = from_json(&json).unwrap();
        assert!(env.reports.is_empty());
        assert_eq!(env.schema, SCHEMA_VERSION);
        assert_eq!(emit_report(&[], Format::Text), "no reports\n");
    }
}
