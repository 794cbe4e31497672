//! Krull dimension, depth, Cohen-Macaulayness, regular sequences and systems
//! of parameters for presented graded modules.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::{PresentedModule, Window};
use crate::koszul::{depth_via_koszul, DepthResult};
use crate::limits::LimitConfig;
use crate::poly::{Polynomial, RingSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantConfig {
    /// Overrides the automatically chosen degree window.
    pub window: Option<Window>,
    pub levels: u32,
    pub streak: u32,
    pub max_levels: u32,
    pub trials: u32,
    pub seed: u64,
    pub hilbert_fit_span: u32,
}

impl Default for InvariantConfig {
    fn default() -> Self {
        let lim = LimitConfig::default();
        Self {
            window: None,
            levels: lim.levels,
            streak: lim.streak,
            max_levels: lim.max_levels,
            trials: 20,
            seed: 1,
            hilbert_fit_span: 6,
        }
    }
}

impl InvariantConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Input("trials must be at least 1".into()));
        }
        if self.streak == 0 || self.levels == 0 {
            return Err(Error::Input("levels and streak must be positive".into()));
        }
        if let Some(w) = self.window {
            if w.len() < self.hilbert_fit_span as usize + 2 {
                return Err(Error::Input(format!(
                    "window [{}, {}] is shorter than the Hilbert fit span plus 2",
                    w.lo, w.hi
                )));
            }
        }
        Ok(())
    }

    pub fn limit(&self) -> LimitConfig {
        LimitConfig {
            levels: self.levels,
            streak: self.streak,
            max_levels: self.max_levels.max(self.levels),
        }
    }

    /// PRNG for random trial `trial`; seeds are `seed + trial`.
    pub fn rng(&self, trial: u32) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(trial as u64))
    }

    /// The configured window, or one reaching past the expected regularity of `m`.
    pub fn window_for(&self, m: &PresentedModule) -> Window {
        self.window.unwrap_or_else(|| {
            let n = m.nvars() as i32;
            let span = (m.max_degree() - m.min_twist()).max(1);
            Window {
                lo: m.min_twist(),
                hi: m.max_twist() + n * span + self.hilbert_fit_span as i32 + 2,
            }
        })
    }
}

/// `count` random linear forms drawn from `rng`.
pub fn random_linear_forms(ring: &RingSpec, count: usize, rng: &mut ChaCha8Rng) -> Vec<Polynomial> {
    let p = ring.field().modulus();
    (0..count)
        .map(|_| {
            let coeffs: Vec<u32> = (0..ring.nvars()).map(|_| rng.gen_range(0..p)).collect();
            ring.linear_form(&coeffs)
        })
        .collect()
}

/// Krull dimension together with how it was certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionResult {
    /// `-1` for the zero module.
    pub dim: i64,
    /// The Hilbert polynomial fit was exact on the trailing span.
    pub fit_exact: bool,
    /// Least number of random linear forms with a finite-length quotient.
    pub cross_check: Option<i64>,
    pub zero_module: bool,
}

/// Degree of the polynomial through `tail`, if successive differences vanish
/// with at least one residual check; `None` for the all-zero tail.
fn fitted_degree(tail: &[i64]) -> std::result::Result<Option<usize>, ()> {
    if tail.iter().all(|&v| v == 0) {
        return Ok(None);
    }
    let mut diff = tail.to_vec();
    for k in 0..tail.len() {
        let next: Vec<i64> = diff.windows(2).map(|w| w[1] - w[0]).collect();
        if next.is_empty() {
            break;
        }
        if next.iter().all(|&v| v == 0) {
            return Ok(Some(k));
        }
        diff = next;
    }
    Err(())
}

/// True iff `M/(seq)M` vanishes in some degree `>= max twist` up to `hi`.
fn quotient_has_finite_length(m: &PresentedModule, seq: &[Polynomial], hi: i32) -> Result<bool> {
    let q = m.quotient_by_elements(seq)?;
    Ok(q.first_vanishing_degree(hi.max(q.max_twist())).is_some())
}

/// Least `r <= n` such that some tried `r`-tuple of random forms gives a finite-length quotient.
fn random_forms_dimension(m: &PresentedModule, cfg: &InvariantConfig, hi: i32) -> Result<Option<i64>> {
    let n = m.nvars();
    for r in 0..=n {
        for trial in 0..cfg.trials {
            let forms = random_linear_forms(m.ring(), r, &mut cfg.rng(trial));
            if quotient_has_finite_length(m, &forms, hi)? {
                return Ok(Some(r as i64));
            }
            if r == 0 {
                break;
            }
        }
    }
    Ok(None)
}

pub fn krull_dimension(m: &PresentedModule, cfg: &InvariantConfig) -> Result<DimensionResult> {
    cfg.validate()?;
    if m.is_zero() {
        return Ok(DimensionResult {
            dim: -1,
            fit_exact: true,
            cross_check: Some(-1),
            zero_module: true,
        });
    }
    let window = cfg.window_for(m);
    let h: Vec<i64> = m.hilbert_function(window).into_iter().map(|v| v as i64).collect();
    let span = (cfg.hilbert_fit_span as usize).min(h.len()).max(2);
    let tail = &h[h.len() - span..];
    let fit = fitted_degree(tail);
    let cross = random_forms_dimension(m, cfg, window.hi)?;
    let (dim, fit_exact) = match fit {
        Ok(None) => (0, true),
        Ok(Some(k)) => (k as i64 + 1, true),
        Err(()) => (cross.unwrap_or(m.nvars() as i64), false),
    };
    if fit_exact && cross.is_some_and(|c| c != dim) {
        return Err(Error::Diagnostic(format!(
            "Hilbert fit gives dimension {dim} but random forms give {}",
            cross.unwrap_or(-1)
        )));
    }
    Ok(DimensionResult {
        dim,
        fit_exact,
        cross_check: cross,
        zero_module: false,
    })
}

pub fn depth(m: &PresentedModule, cfg: &InvariantConfig) -> Result<DepthResult> {
    cfg.validate()?;
    depth_via_koszul(m, None)
}

pub fn is_cohen_macaulay(m: &PresentedModule, cfg: &InvariantConfig) -> Result<bool> {
    if m.is_zero() {
        return Err(Error::Domain("Cohen-Macaulayness of the zero module".into()));
    }
    Ok(depth(m, cfg)?.depth as i64 == krull_dimension(m, cfg)?.dim)
}

/// Per-step regularity verdict; every step is an injectivity test on a finite window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityResult {
    pub regular: bool,
    /// Index of the first element that fails (zero divisor or unit quotient).
    pub failed_at: Option<usize>,
    pub window: Window,
    pub window_dependent: bool,
}

pub fn is_regular_sequence(m: &PresentedModule, seq: &[Polynomial], cfg: &InvariantConfig) -> Result<RegularityResult> {
    let window = cfg.window_for(m);
    let mut cur = m.clone();
    for (k, f) in seq.iter().enumerate() {
        let e = f
            .homogeneous_degree()
            .ok_or_else(|| Error::Input(format!("sequence element {k} is zero or not homogeneous")))? as i32;
        if e == 0 {
            return Err(Error::Input(format!("sequence element {k} is a unit, not in the maximal ideal")));
        }
        let dm = cur.realize(window)?;
        for j in window.lo..=window.hi - e {
            let map = dm.poly_map(f, j)?;
            if map.rank() < map.cols() {
                return Ok(RegularityResult {
                    regular: false,
                    failed_at: Some(k),
                    window,
                    window_dependent: false,
                });
            }
        }
        cur = cur.quotient_by_elements(std::slice::from_ref(f))?;
        if cur.is_zero() {
            return Ok(RegularityResult {
                regular: false,
                failed_at: Some(k),
                window,
                window_dependent: false,
            });
        }
    }
    Ok(RegularityResult {
        regular: true,
        failed_at: None,
        window,
        window_dependent: !seq.is_empty(),
    })
}

/// `d = dim M` linear forms with `M/(forms)M` of finite length; coordinate
/// subsets are tried before random forms.
pub fn find_sop(m: &PresentedModule, cfg: &InvariantConfig) -> Result<Vec<Polynomial>> {
    let dim = krull_dimension(m, cfg)?;
    if dim.dim < 0 {
        return Err(Error::Domain("the zero module has no system of parameters".into()));
    }
    let d = dim.dim as usize;
    if d == 0 {
        return Ok(Vec::new());
    }
    let hi = cfg.window_for(m).hi;
    let vars = m.ring().vars();
    for subset in crate::koszul::subsets(m.nvars(), d) {
        let forms: Vec<Polynomial> = subset.iter().map(|&t| vars[t].clone()).collect();
        if quotient_has_finite_length(m, &forms, hi)? {
            return Ok(forms);
        }
    }
    for trial in 0..cfg.trials {
        let forms = random_linear_forms(m.ring(), d, &mut cfg.rng(trial));
        if quotient_has_finite_length(m, &forms, hi)? {
            return Ok(forms);
        }
    }
    Err(Error::SearchFailure(format!(
        "no system of parameters among {} random trials; try more trials or a larger prime",
        cfg.trials
    )))
}
