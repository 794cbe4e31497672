//! Artinian graded modules represented as graded duals `X = D(N)` of
//! finitely generated modules, with `X_j = (N_{-j})^*` and transposed actions.
//!
//! `0 :_X (f)` is the dual of `N/(f)N`, surjectivity on `X` is injectivity on
//! `N`, so width and N.dimension of `X` are read off depth and Krull dimension
//! of `N`; direct searches on `X` serve as cross-checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::{DegreewiseModule, PresentedModule, Window};
use crate::invariants::{krull_dimension, random_linear_forms, InvariantConfig};
use crate::koszul::depth_via_koszul;
use crate::poly::{Polynomial, RingSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArtinianDual {
    dual_of: PresentedModule,
    /// Degrees of `N` on which the presentation is known to be exact; `None`
    /// when it is exact everywhere.
    certified: Option<Window>,
}

/// Width of an Artinian module; the zero module has infinite width.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Width {
    Finite(usize),
    Infinite,
}

impl Width {
    pub fn finite(self) -> Option<usize> {
        match self {
            Width::Finite(w) => Some(w),
            Width::Infinite => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WidthResult {
    pub width: Width,
    /// Length of a greedily built coregular sequence of random linear forms.
    pub cross_check: Option<usize>,
    pub window_dependent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NdimResult {
    /// `-1` for the zero module.
    pub ndim: i64,
    /// Least `r` with `0 :_X (r random forms)` of finite length.
    pub cross_check: Option<i64>,
    pub fit_exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoregularResult {
    pub coregular: bool,
    /// Per element: was multiplication surjective on the previous annihilator.
    pub steps: Vec<bool>,
    pub window: Window,
}

impl ArtinianDual {
    pub fn graded_dual(n: PresentedModule) -> Self {
        Self {
            dual_of: n,
            certified: None,
        }
    }

    /// `k[x_1^{-1}, ..., x_n^{-1}]`, the dual of the polynomial ring, with socle in degree 0.
    pub fn inverse_polynomial_module(ring: RingSpec) -> Self {
        Self::graded_dual(PresentedModule::free(ring, vec![0]))
    }

    /// Wraps a module known on a window whose top degree vanishes (e.g. a
    /// computed local cohomology module); the dual presentation is exact on the
    /// reflected window only.
    pub fn from_degreewise(x: &DegreewiseModule, ring: &RingSpec) -> Result<Self> {
        let w = x.window();
        if x.dim(w.hi)? != 0 {
            return Err(Error::Precondition(format!(
                "module does not vanish at the top degree {} of its window",
                w.hi
            )));
        }
        let n = x.dual().present(ring)?;
        Ok(Self {
            dual_of: n,
            certified: Some(Window { lo: -w.hi, hi: -w.lo }),
        })
    }

    pub fn dual_of(&self) -> &PresentedModule {
        &self.dual_of
    }

    pub fn ring(&self) -> &RingSpec {
        self.dual_of.ring()
    }

    pub fn certified(&self) -> Option<Window> {
        self.certified
    }

    /// Window of `X` degrees on which it is known.
    pub fn known_window(&self) -> Option<Window> {
        self.certified.map(|w| Window { lo: -w.hi, hi: -w.lo })
    }

    pub fn is_zero(&self) -> bool {
        self.dual_of.is_zero()
    }

    pub fn realize(&self, window: Window) -> Result<DegreewiseModule> {
        let reflected = Window {
            lo: -window.hi,
            hi: -window.lo,
        };
        if let Some(c) = self.certified {
            if !c.contains_window(&reflected) {
                return Err(Error::WindowOverflow {
                    need_lo: window.lo,
                    need_hi: window.hi,
                    lo: -c.hi,
                    hi: -c.lo,
                });
            }
        }
        Ok(self.dual_of.realize(reflected)?.dual())
    }

    pub fn hilbert_function(&self, window: Window) -> Result<Vec<usize>> {
        Ok(self.realize(window)?.hilbert().to_vec())
    }

    /// `0 :_X (f)`, as the dual of `N/(f)N`.
    pub fn annihilator_submodule(&self, f: &[Polynomial]) -> Result<Self> {
        Ok(Self {
            dual_of: self.dual_of.quotient_by_elements(f)?,
            certified: self.certified,
        })
    }

    /// Configuration whose window is the part of `N` that is known exactly.
    fn dual_config(&self, cfg: &InvariantConfig) -> InvariantConfig {
        let mut out = *cfg;
        if let Some(c) = self.certified {
            let auto = cfg.window_for(&self.dual_of);
            let lo = auto.lo.max(c.lo);
            let hi = auto.hi.min(c.hi).max(lo + cfg.hilbert_fit_span as i32 + 1);
            out.window = Some(Window { lo, hi: hi.min(c.hi) });
        }
        out
    }

    /// Default `X` window for direct checks: the reflection of the `N` window.
    pub fn default_window(&self, cfg: &InvariantConfig) -> Window {
        let w = self.dual_config(cfg).window_for(&self.dual_of);
        Window { lo: -w.hi, hi: -w.lo }
    }

    /// Checks that each `x_k` maps `0 :_X (x_1..x_{k-1})` onto itself in every
    /// window degree, and independently that `x_k` is injective on
    /// `N/(x_1..x_{k-1})N` in the reflected degrees; the two must agree.
    pub fn is_coregular(&self, seq: &[Polynomial], window: Window) -> Result<CoregularResult> {
        // Colons lose top degrees; realize above the window so they still cover it.
        let mut reach = 0;
        for (k, f) in seq.iter().enumerate() {
            reach += f
                .homogeneous_degree()
                .ok_or_else(|| Error::Input(format!("sequence element {k} is zero or not homogeneous")))?
                as i32;
        }
        let mut top = window.hi + reach;
        if let Some(known) = self.known_window() {
            top = top.min(known.hi).max(window.hi);
        }
        let x = self.realize(Window { lo: window.lo, hi: top })?;
        let mut steps = Vec::with_capacity(seq.len());
        let mut quotient = self.dual_of.clone();
        for (k, f) in seq.iter().enumerate() {
            let e = f
                .homogeneous_degree()
                .ok_or_else(|| Error::Input(format!("sequence element {k} is zero or not homogeneous")))?
                as i32;
            let prefix = &seq[..k];
            let sub = if prefix.is_empty() { x.clone() } else { x.colon(prefix)? };
            let sw = sub.window();
            let nq = quotient.realize(Window {
                lo: -sw.hi,
                hi: -sw.lo,
            })?;
            let mut direct = true;
            let mut dual = true;
            for t in sw.lo + e..=sw.hi {
                let onto = sub.poly_map(f, t - e)?;
                direct &= onto.rank() == onto.rows();
                let into = nq.poly_map(f, -t)?;
                dual &= into.rank() == into.cols();
            }
            if direct != dual {
                return Err(Error::Diagnostic(format!(
                    "surjectivity on X and injectivity on its dual disagree at step {k}"
                )));
            }
            steps.push(direct);
            if !direct {
                break;
            }
            quotient = quotient.quotient_by_elements(std::slice::from_ref(f))?;
        }
        Ok(CoregularResult {
            coregular: steps.len() == seq.len() && steps.iter().all(|&s| s),
            steps,
            window,
        })
    }

    /// Width via `depth N`, cross-checked by a greedy random coregular sequence.
    pub fn width(&self, cfg: &InvariantConfig) -> Result<WidthResult> {
        if self.is_zero() {
            return Ok(WidthResult {
                width: Width::Infinite,
                cross_check: None,
                window_dependent: false,
            });
        }
        let dcfg = self.dual_config(cfg);
        let depth = depth_via_koszul(&self.dual_of, self.certified.map(|_| dcfg.window_for(&self.dual_of)))?;
        let window = self.default_window(cfg);
        let mut seq: Vec<Polynomial> = Vec::new();
        let mut trial = 0;
        'grow: while seq.len() < self.ring().nvars() {
            for _ in 0..cfg.trials {
                let mut rng = cfg.rng(trial);
                trial += 1;
                let form = random_linear_forms(self.ring(), 1, &mut rng).remove(0);
                if form.is_zero() {
                    continue;
                }
                let mut cand = seq.clone();
                cand.push(form);
                if self.is_coregular(&cand, window)?.coregular {
                    seq = cand;
                    continue 'grow;
                }
            }
            break;
        }
        if seq.len() != depth.depth {
            return Err(Error::Diagnostic(format!(
                "width from dual depth is {} but the greedy coregular search found {}",
                depth.depth,
                seq.len()
            )));
        }
        Ok(WidthResult {
            width: Width::Finite(depth.depth),
            cross_check: Some(seq.len()),
            window_dependent: depth.window_dependent,
        })
    }

    /// N.dimension via `dim N`, cross-checked by random annihilators of finite length.
    pub fn ndim(&self, cfg: &InvariantConfig) -> Result<NdimResult> {
        if self.is_zero() {
            return Ok(NdimResult {
                ndim: -1,
                cross_check: Some(-1),
                fit_exact: true,
            });
        }
        let dcfg = self.dual_config(cfg);
        let dim = krull_dimension(&self.dual_of, &dcfg)?;
        let mut cross = None;
        'outer: for r in 0..=self.ring().nvars() {
            for trial in 0..cfg.trials {
                let forms = random_linear_forms(self.ring(), r, &mut cfg.rng(trial));
                if self.annihilator_submodule(&forms)?.finite_length(cfg)?.is_some() {
                    cross = Some(r as i64);
                    break 'outer;
                }
                if r == 0 {
                    break;
                }
            }
        }
        if dim.fit_exact && cross.is_some_and(|c| c != dim.dim) {
            return Err(Error::Diagnostic(format!(
                "N.dim from the dual is {} but random annihilators give {}",
                dim.dim,
                cross.unwrap_or(-1)
            )));
        }
        Ok(NdimResult {
            ndim: dim.dim,
            cross_check: cross,
            fit_exact: dim.fit_exact,
        })
    }

    pub fn is_co_cohen_macaulay(&self, cfg: &InvariantConfig) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::Domain("co-Cohen-Macaulayness of the zero module".into()));
        }
        let width = self.width(cfg)?.width;
        let ndim = self.ndim(cfg)?.ndim;
        Ok(width.finite().map(|w| w as i64) == Some(ndim))
    }

    /// Total length when `N` has a vanishing certificate inside the known window.
    pub fn finite_length(&self, cfg: &InvariantConfig) -> Result<Option<usize>> {
        let w = self.dual_config(cfg).window_for(&self.dual_of);
        match self.dual_of.first_vanishing_degree(w.hi) {
            None => Ok(None),
            Some(j0) => {
                let lo = self.dual_of.min_twist();
                if j0 <= lo {
                    return Ok(Some(0));
                }
                Ok(Some(self.dual_of.hilbert_function(Window { lo, hi: j0 }).iter().sum()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::PrimeField;
    use crate::poly::Monomial;

    fn ring(n: usize) -> RingSpec {
        RingSpec::standard(PrimeField::default(), n)
    }

    fn w(lo: i32, hi: i32) -> Window {
        Window::new(lo, hi).unwrap()
    }

    fn mono(r: &RingSpec, e: &[u32]) -> Polynomial {
        Polynomial::monomial(r.field(), Monomial(e.to_vec()), 1)
    }

    #[test]
    fn duals_reflect_hilbert_functions() {
        let r = ring(2);
        let k = ArtinianDual::graded_dual(PresentedModule::residue_field(r.clone()));
        assert_eq!(k.hilbert_function(w(-2, 2)).unwrap(), vec![0, 0, 1, 0, 0]);
        let kk = ArtinianDual::inverse_polynomial_module(r.clone());
        assert_eq!(kk.hilbert_function(w(-3, 1)).unwrap(), vec![4, 3, 2, 1, 0]);
        let ci = PresentedModule::cyclic(r.clone(), &[mono(&r, &[2, 0]), mono(&r, &[0, 2])]).unwrap();
        let x = ArtinianDual::graded_dual(ci);
        assert_eq!(x.hilbert_function(w(-4, 0)).unwrap().iter().sum::<usize>(), 4);
        let one = ArtinianDual::inverse_polynomial_module(ring(1));
        assert_eq!(one.hilbert_function(w(-5, 0)).unwrap(), vec![1; 6]);
    }

    #[test]
    fn socle_of_inverse_polynomials() {
        let r = ring(2);
        let kk = ArtinianDual::inverse_polynomial_module(r.clone());
        let soc = kk.annihilator_submodule(&r.vars()).unwrap();
        assert_eq!(soc.finite_length(&InvariantConfig::default()).unwrap(), Some(1));
        assert_eq!(kk.annihilator_submodule(&[]).unwrap(), kk);
        for n in 1..=3u32 {
            let f: Vec<Polynomial> = r.vars().iter().map(|v| v.pow(r.field(), n)).collect();
            let x = kk.annihilator_submodule(&f).unwrap();
            assert_eq!(x.finite_length(&InvariantConfig::default()).unwrap(), Some((n * n) as usize));
        }
    }

    #[test]
    fn coregular_examples() {
        let r = ring(2);
        let kk = ArtinianDual::inverse_polynomial_module(r.clone());
        assert!(kk.is_coregular(&r.vars(), w(-8, 0)).unwrap().coregular);
        let k = ArtinianDual::graded_dual(PresentedModule::residue_field(r.clone()));
        assert!(!k.is_coregular(&[r.var(0)], w(-4, 0)).unwrap().coregular);
        let line = ArtinianDual::graded_dual(PresentedModule::cyclic(r.clone(), &[r.var(0)]).unwrap());
        assert!(!line.is_coregular(&[r.var(0)], w(-6, 0)).unwrap().coregular);
        assert!(line.is_coregular(&[r.var(1)], w(-6, 0)).unwrap().coregular);
    }

    #[test]
    fn width_and_ndim_examples() {
        let cfg = InvariantConfig::default();
        for n in 1..=3 {
            let kk = ArtinianDual::inverse_polynomial_module(ring(n));
            assert_eq!(kk.width(&cfg).unwrap().width, Width::Finite(n));
            assert_eq!(kk.ndim(&cfg).unwrap().ndim, n as i64);
            assert!(kk.is_co_cohen_macaulay(&cfg).unwrap());
            assert_eq!(kk.finite_length(&cfg).unwrap(), None);
        }
        let r = ring(2);
        let k = ArtinianDual::graded_dual(PresentedModule::residue_field(r.clone()));
        assert_eq!(k.width(&cfg).unwrap().width, Width::Finite(0));
        assert_eq!(k.ndim(&cfg).unwrap().ndim, 0);
        assert!(k.is_co_cohen_macaulay(&cfg).unwrap());
        let noncm = PresentedModule::cyclic(r.clone(), &[mono(&r, &[2, 0]), mono(&r, &[1, 1])]).unwrap();
        let x = ArtinianDual::graded_dual(noncm);
        assert_eq!(x.width(&cfg).unwrap().width, Width::Finite(0));
        assert_eq!(x.ndim(&cfg).unwrap().ndim, 1);
        assert!(!x.is_co_cohen_macaulay(&cfg).unwrap());
        let zero = ArtinianDual::graded_dual(PresentedModule::zero(r));
        assert_eq!(zero.ndim(&cfg).unwrap().ndim, -1);
        assert_eq!(zero.width(&cfg).unwrap().width, Width::Infinite);
        assert!(zero.is_co_cohen_macaulay(&cfg).is_err());
    }

    #[test]
    fn coregular_element_lowers_ndim_and_width() {
        let cfg = InvariantConfig::default();
        let r = ring(2);
        let node = PresentedModule::cyclic(r.clone(), &[mono(&r, &[1, 1])]).unwrap();
        let x = ArtinianDual::graded_dual(node);
        let l = r.var(0).add(r.field(), &r.var(1));
        assert!(x.is_coregular(std::slice::from_ref(&l), w(-8, 0)).unwrap().coregular);
        let y = x.annihilator_submodule(&[l]).unwrap();
        assert_eq!(y.ndim(&cfg).unwrap().ndim, x.ndim(&cfg).unwrap().ndim - 1);
        assert_eq!(
            y.width(&cfg).unwrap().width.finite().unwrap(),
            x.width(&cfg).unwrap().width.finite().unwrap() - 1
        );
    }

    #[test]
    fn from_degreewise_round_trip() {
        let r = ring(2);
        let kk = ArtinianDual::inverse_polynomial_module(r.clone());
        let x = kk.realize(w(-10, 1)).unwrap();
        let back = ArtinianDual::from_degreewise(&x, &r).unwrap();
        assert_eq!(back.realize(w(-10, 1)).unwrap(), x);
        assert!(back.realize(w(-11, 1)).is_err());
        let cfg = InvariantConfig::default();
        assert_eq!(back.width(&cfg).unwrap().width, Width::Finite(2));
        assert_eq!(back.ndim(&cfg).unwrap().ndim, 2);
    }
}
