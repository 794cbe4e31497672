//! Level systems of Koszul (co)homology and their stabilized limits.
//!
//! The direct system `n -> H_{r-i}(f^n; M)` realizes local cohomology
//! `H^i_{(f)}(M)`; it is regraded by `j' = j - n·Σ e_t` so its transitions
//! preserve degree. The inverse system `n+1 -> n` on `H_i(x^n; X)` realizes
//! local homology `H_i^x(X)`. Limits are taken degree by degree and every
//! degree carries a stabilization flag.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::Matrix;
use crate::graded::{DegreewiseModule, PresentedModule, Subquotient, Window};
use crate::koszul::{chain_map_from_base, sequence_degrees, transition, Direction, KoszulComplex, KoszulHomology};
use crate::poly::Polynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitConfig {
    /// Number of levels built on the first attempt (`N_max`).
    pub levels: u32,
    /// Consecutive agreeing steps required before a degree counts as stable.
    pub streak: u32,
    /// Upper bound for adaptive level growth.
    pub max_levels: u32,
}

impl Default for LimitConfig {
    fn default() -> Self {
        Self {
            levels: 8,
            streak: 2,
            max_levels: 24,
        }
    }
}

/// Stabilization data of one degree of a limit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeStatus {
    pub degree: i32,
    pub dim: usize,
    pub stable: bool,
    /// Earliest level from which the system is constant in this degree.
    pub stable_after: Option<u32>,
}

/// Per-degree outcome of a (co)limit computation, plus the level tables it was read from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitResult {
    pub direction: Direction,
    pub index: usize,
    pub levels: u32,
    pub streak: u32,
    pub window: Window,
    pub degrees: Vec<DegreeStatus>,
    /// `level_dims[n-1][j-lo]`.
    pub level_dims: Vec<Vec<usize>>,
    /// Ranks of the one-step transitions, `transition_ranks[n-1][j-lo]` for the map between levels `n` and `n+1`.
    pub transition_ranks: Vec<Vec<usize>>,
    /// Inverse systems only: dimensions of stable images at the certified levels.
    pub stable_image_dims: Vec<Vec<usize>>,
}

impl LimitResult {
    pub fn all_stable(&self) -> bool {
        self.degrees.iter().all(|d| d.stable)
    }

    pub fn unstable_degrees(&self) -> Vec<i32> {
        self.degrees.iter().filter(|d| !d.stable).map(|d| d.degree).collect()
    }

    pub fn hilbert(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.dim).collect()
    }

    /// Largest `stable_after` over all degrees, if every degree is stable.
    pub fn stabilization_level(&self) -> Option<u32> {
        self.degrees.iter().map(|d| d.stable_after).try_fold(1, |acc, s| s.map(|s| acc.max(s)))
    }
}

/// A limit: the realized module together with its stabilization report.
#[derive(Clone, Debug)]
pub struct Limit {
    pub module: DegreewiseModule,
    pub result: LimitResult,
    /// Level whose pieces carry the limit (the top level for colimits, the
    /// stable-image level for inverse limits).
    pub carrier_level: u32,
    /// Inverse limits: basis of the stable image inside the carrier level, per degree.
    stable_images: Vec<Matrix>,
}

impl Limit {
    pub fn stable_image(&self, j: i32) -> Result<&Matrix> {
        self.module.dim(j)?;
        Ok(&self.stable_images[(j - self.module.window().lo) as usize])
    }
}

/// Koszul homology modules at levels `1..=N` with their transition maps.
#[derive(Clone, Debug)]
pub struct LevelSystem {
    direction: Direction,
    index: usize,
    window: Window,
    complexes: Vec<KoszulComplex>,
    homologies: Vec<KoszulHomology>,
    modules: Vec<DegreewiseModule>,
    /// `maps[n-1][j-lo]`: direct `V_n -> V_{n+1}`, inverse `V_{n+1} -> V_n`.
    maps: Vec<Vec<Matrix>>,
}

impl LevelSystem {
    /// Base degrees needed for the direct system on `window`.
    pub fn cohomology_base_window(f: &[Polynomial], levels: u32, window: Window) -> Result<Window> {
        let total: i32 = sequence_degrees(f)?.iter().sum();
        Ok(Window {
            lo: window.lo,
            hi: window.hi + levels as i32 * total,
        })
    }

    /// Base degrees needed for the inverse system on `window`.
    pub fn homology_base_window(x: &[Polynomial], levels: u32, window: Window) -> Result<Window> {
        let total: i32 = sequence_degrees(x)?.iter().sum();
        Ok(Window {
            lo: window.lo - levels as i32 * total,
            hi: window.hi,
        })
    }

    /// Direct system `H_{r-i}(f^n; base)` regraded to cohomological degrees.
    pub fn cohomology(base: &DegreewiseModule, f: &[Polynomial], i: usize, levels: u32, window: Window) -> Result<Self> {
        if levels == 0 {
            return Err(Error::Input("a level system needs at least one level".into()));
        }
        let r = f.len();
        let total: i32 = sequence_degrees(f)?.iter().sum();
        if i > r {
            let zero = DegreewiseModule::zero(base.field(), base.nvars(), window);
            return Ok(Self {
                direction: Direction::Cohomological,
                index: i,
                window,
                complexes: Vec::new(),
                homologies: Vec::new(),
                modules: vec![zero; levels as usize],
                maps: vec![vec![Matrix::zeros(base.field(), 0, 0); window.len()]; levels as usize - 1],
            });
        }
        let spot = r - i;
        let complexes = (1..=levels)
            .into_par_iter()
            .map(|n| KoszulComplex::build(base, f, n, window.shifted(n as i32 * total)))
            .collect::<Result<Vec<_>>>()?;
        let homologies = complexes
            .par_iter()
            .map(|c| c.homology(spot))
            .collect::<Result<Vec<_>>>()?;
        let modules = homologies
            .iter()
            .enumerate()
            .map(|(k, h)| h.module().shifted(-((k as i32 + 1) * total)))
            .collect();
        let maps = (0..levels as usize - 1)
            .into_par_iter()
            .map(|k| {
                let cm = transition(&complexes[k], &complexes[k + 1], Direction::Cohomological)?;
                cm.on_homology(&homologies[k], &homologies[k + 1])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            direction: Direction::Cohomological,
            index: i,
            window,
            complexes,
            homologies,
            modules,
            maps,
        })
    }

    /// Inverse system `H_i(x^n; base)` with transitions `n+1 -> n`.
    pub fn homology(base: &DegreewiseModule, x: &[Polynomial], i: usize, levels: u32, window: Window) -> Result<Self> {
        if levels == 0 {
            return Err(Error::Input("a level system needs at least one level".into()));
        }
        if i > x.len() {
            return Err(Error::Input(format!("homology index {i} exceeds the sequence length {}", x.len())));
        }
        let complexes = (1..=levels)
            .into_par_iter()
            .map(|n| KoszulComplex::build(base, x, n, window))
            .collect::<Result<Vec<_>>>()?;
        let homologies = complexes
            .par_iter()
            .map(|c| c.homology(i))
            .collect::<Result<Vec<_>>>()?;
        let modules = homologies.iter().map(|h| h.module().clone()).collect();
        let maps = (0..levels as usize - 1)
            .into_par_iter()
            .map(|k| {
                let cm = transition(&complexes[k + 1], &complexes[k], Direction::Homological)?;
                cm.on_homology(&homologies[k + 1], &homologies[k])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            direction: Direction::Homological,
            index: i,
            window,
            complexes,
            homologies,
            modules,
            maps,
        })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn levels(&self) -> u32 {
        self.modules.len() as u32
    }

    /// The level-`n` module (`1 <= n <= N`).
    pub fn module(&self, n: u32) -> &DegreewiseModule {
        &self.modules[n as usize - 1]
    }

    /// The one-step transition between levels `n` and `n + 1` in degree `j`.
    pub fn transition(&self, n: u32, j: i32) -> Result<&Matrix> {
        if n == 0 || n >= self.levels() {
            return Err(Error::Input(format!("no transition at level {n}")));
        }
        self.module(n).dim(j)?;
        Ok(&self.maps[n as usize - 1][(j - self.window.lo) as usize])
    }

    /// Composite transition between levels `a` and `b` in degree `j`, in the
    /// system's own direction (direct: `a <= b`, inverse: `a >= b`).
    pub fn composite(&self, a: u32, b: u32, j: i32) -> Result<Matrix> {
        let field = self.module(a).field();
        let mut cur = Matrix::identity(field, self.module(a).dim(j)?);
        match self.direction {
            Direction::Cohomological => {
                for n in a..b {
                    cur = self.transition(n, j)?.mul(&cur)?;
                }
            }
            Direction::Homological => {
                for n in (b..a).rev() {
                    cur = self.transition(n, j)?.mul(&cur)?;
                }
            }
        }
        Ok(cur)
    }

    pub fn level_dims(&self) -> Vec<Vec<usize>> {
        self.modules.iter().map(|m| m.hilbert().to_vec()).collect()
    }

    fn transition_ranks(&self) -> Vec<Vec<usize>> {
        self.maps.iter().map(|ms| ms.iter().map(Matrix::rank).collect()).collect()
    }

    pub fn limit(&self, streak: u32) -> Result<Limit> {
        match self.direction {
            Direction::Cohomological => self.colimit(streak),
            Direction::Homological => self.inverse_limit(streak),
        }
    }

    /// Colimit read off the top level once the last `streak` transitions are isomorphisms.
    pub fn colimit(&self, streak: u32) -> Result<Limit> {
        let big_n = self.levels();
        let ranks = self.transition_ranks();
        let dims = self.level_dims();
        let degrees = self
            .window
            .degrees()
            .enumerate()
            .map(|(idx, degree)| {
                let iso: Vec<bool> = (0..big_n as usize - 1)
                    .map(|k| dims[k][idx] == dims[k + 1][idx] && ranks[k][idx] == dims[k][idx])
                    .collect();
                let stable = streak >= 1 && iso.len() >= streak as usize && iso.iter().rev().take(streak as usize).all(|&b| b);
                let stable_after = stable.then(|| {
                    let tail = iso.iter().rev().take_while(|&&b| b).count();
                    big_n - tail as u32
                });
                DegreeStatus {
                    degree,
                    dim: dims[big_n as usize - 1][idx],
                    stable,
                    stable_after,
                }
            })
            .collect();
        let module = self.module(big_n).clone();
        let stable_images = self
            .window
            .degrees()
            .map(|j| Ok(Matrix::identity(module.field(), module.dim(j)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Limit {
            module,
            result: LimitResult {
                direction: self.direction,
                index: self.index,
                levels: big_n,
                streak,
                window: self.window,
                degrees,
                level_dims: dims,
                transition_ranks: ranks,
                stable_image_dims: Vec::new(),
            },
            carrier_level: big_n,
            stable_images,
        })
    }

    /// Inverse limit via stable images of composite transitions (Mittag-Leffler).
    pub fn inverse_limit(&self, streak: u32) -> Result<Limit> {
        let big_n = self.levels();
        if streak == 0 || big_n < 2 * streak {
            return Err(Error::Input(format!(
                "an inverse limit with streak {streak} needs at least {} levels",
                2 * streak.max(1)
            )));
        }
        let n_star = big_n - streak;
        let degs: Vec<i32> = self.window.degrees().collect();
        // images[idx][n-1][k-1] = rank of the composite V_{n+k} -> V_n
        let per_degree = degs
            .par_iter()
            .map(|&j| {
                let mut table: Vec<Vec<usize>> = Vec::with_capacity(big_n as usize);
                let mut carrier = None;
                for n in 1..big_n {
                    let mut row = Vec::new();
                    let mut cur = self.transition(n, j)?.clone();
                    row.push(cur.rank());
                    for m in n + 1..big_n {
                        cur = cur.mul(self.transition(m, j)?)?;
                        row.push(cur.rank());
                    }
                    if n == n_star {
                        carrier = Some(cur.column_space());
                    }
                    table.push(row);
                }
                Ok((table, carrier.expect("carrier level exists")))
            })
            .collect::<Result<Vec<_>>>()?;

        let certified = |table: &Vec<Vec<usize>>, n: u32| -> bool {
            let row = &table[n as usize - 1];
            let k = row.len();
            k >= streak as usize && row[k - streak as usize..].windows(2).all(|w| w[0] == w[1])
        };
        let first_checked = n_star.saturating_sub(streak - 1).max(1);
        let mut degrees = Vec::with_capacity(degs.len());
        let mut si_dims = vec![Vec::with_capacity(degs.len()); n_star as usize];
        for (idx, &degree) in degs.iter().enumerate() {
            let table = &per_degree[idx].0;
            let si = |n: u32| *table[n as usize - 1].last().expect("nonempty row");
            for n in 1..=n_star {
                si_dims[n as usize - 1].push(si(n));
            }
            let dim = si(n_star);
            let stable = (first_checked..=n_star).all(|n| certified(table, n) && si(n) == dim)
                && n_star + 1 - first_checked >= streak;
            let stable_after = stable.then(|| {
                let mut n0 = n_star;
                while n0 > 1 && si(n0 - 1) == dim {
                    n0 -= 1;
                }
                n0
            });
            degrees.push(DegreeStatus {
                degree,
                dim,
                stable,
                stable_after,
            });
        }

        let carrier = self.module(n_star);
        let stable_images: Vec<Matrix> = per_degree.into_iter().map(|(_, c)| c).collect();
        for j in self.window.lo..self.window.hi {
            let idx = (j - self.window.lo) as usize;
            for t in 0..carrier.nvars() {
                let moved = carrier.action(t, j)?.mul(&stable_images[idx])?;
                let next = &stable_images[idx + 1];
                if next.hstack(&moved)?.rank() != next.cols() {
                    return Err(Error::Diagnostic(format!(
                        "stable image is not closed under x{t} in degree {j}"
                    )));
                }
            }
        }
        let subq = stable_images
            .iter()
            .map(Subquotient::subspace)
            .collect::<Result<Vec<_>>>()?;
        let module = carrier.from_subquotients(self.window, &subq)?;
        Ok(Limit {
            module,
            result: LimitResult {
                direction: self.direction,
                index: self.index,
                levels: big_n,
                streak,
                window: self.window,
                degrees,
                level_dims: self.level_dims(),
                transition_ranks: self.transition_ranks(),
                stable_image_dims: si_dims,
            },
            carrier_level: n_star,
            stable_images,
        })
    }

    /// Map between the level-`n` pieces of two direct systems on the same
    /// sequence and window, induced by a degree-preserving map of their bases.
    pub fn induced_level_map(
        &self,
        target: &LevelSystem,
        n: u32,
        base_map: &dyn Fn(i32) -> Result<Matrix>,
    ) -> Result<Vec<Matrix>> {
        if self.levels() != target.levels() || self.window != target.window || self.index != target.index {
            return Err(Error::Input("induced maps need matching level systems".into()));
        }
        if self.complexes.is_empty() {
            let field = self.module(n).field();
            return self
                .window
                .degrees()
                .map(|j| Ok(Matrix::zeros(field, target.module(n).dim(j)?, self.module(n).dim(j)?)))
                .collect();
        }
        let k = n as usize - 1;
        let cm = chain_map_from_base(&self.complexes[k], &target.complexes[k], base_map)?;
        cm.on_homology(&self.homologies[k], &target.homologies[k])
    }
}

/// Runs `build` with `cfg.levels` levels and keeps adding four levels while
/// some degree is unstable, up to `cfg.max_levels`. A window overflow while
/// growing ends the search with the last complete result.
pub fn adaptive_limit(cfg: &LimitConfig, build: &dyn Fn(u32) -> Result<LevelSystem>) -> Result<(LevelSystem, Limit)> {
    let mut levels = cfg.levels.max(2 * cfg.streak);
    let mut sys = build(levels)?;
    let mut lim = sys.limit(cfg.streak)?;
    while !lim.result.all_stable() && levels < cfg.max_levels {
        levels = (levels + 4).min(cfg.max_levels);
        match build(levels) {
            Ok(next) => {
                lim = next.limit(cfg.streak)?;
                sys = next;
            }
            Err(Error::WindowOverflow { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok((sys, lim))
}

/// `H^i_{(f)}(M)` on `window` (cohomological degrees).
pub fn local_cohomology(
    m: &PresentedModule,
    f: &[Polynomial],
    i: usize,
    window: Window,
    cfg: &LimitConfig,
) -> Result<(LevelSystem, Limit)> {
    adaptive_limit(cfg, &|levels| {
        let base = m.realize(LevelSystem::cohomology_base_window(f, levels, window)?)?;
        LevelSystem::cohomology(&base, f, i, levels, window)
    })
}

/// `H_i^x(X)` on `window`; `realize` must produce `X` on any requested window
/// (or fail with a window overflow).
pub fn local_homology(
    realize: &dyn Fn(Window) -> Result<DegreewiseModule>,
    x: &[Polynomial],
    i: usize,
    window: Window,
    cfg: &LimitConfig,
) -> Result<(LevelSystem, Limit)> {
    adaptive_limit(cfg, &|levels| {
        let base = realize(LevelSystem::homology_base_window(x, levels, window)?)?;
        LevelSystem::homology(&base, x, i, levels, window)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::PrimeField;
    use crate::poly::RingSpec;

    fn ring(n: usize) -> RingSpec {
        RingSpec::standard(PrimeField::default(), n)
    }

    fn w(lo: i32, hi: i32) -> Window {
        Window::new(lo, hi).unwrap()
    }

    #[test]
    fn top_cohomology_levels_are_boxes() {
        let r = ring(2);
        let m = PresentedModule::free(r.clone(), vec![0]);
        let window = w(-8, 0);
        let levels = 4;
        let base = m.realize(LevelSystem::cohomology_base_window(&r.vars(), levels, window).unwrap()).unwrap();
        let sys = LevelSystem::cohomology(&base, &r.vars(), 2, levels, window).unwrap();
        for n in 1..=levels {
            assert_eq!(sys.module(n).total_dim(), (n * n) as usize);
        }
    }

    #[test]
    fn single_variable_transitions_are_injective() {
        let r = ring(1);
        let m = PresentedModule::free(r.clone(), vec![0]);
        let window = w(-6, 0);
        let base = m.realize(LevelSystem::cohomology_base_window(&r.vars(), 5, window).unwrap()).unwrap();
        let sys = LevelSystem::cohomology(&base, &r.vars(), 1, 5, window).unwrap();
        for n in 1..5 {
            for j in window.degrees() {
                let t = sys.transition(n, j).unwrap();
                assert_eq!(t.rank(), t.cols());
            }
        }
    }

    #[test]
    fn local_cohomology_of_the_plane() {
        let r = ring(2);
        let m = PresentedModule::free(r.clone(), vec![0]);
        let cfg = LimitConfig::default();
        let (_, top) = local_cohomology(&m, &r.vars(), 2, w(-6, 1), &cfg).unwrap();
        assert!(top.result.all_stable());
        // degrees -6..=1: dims of k[x^-1, y^-1] shifted by -2
        assert_eq!(top.result.hilbert(), vec![5, 4, 3, 2, 1, 0, 0, 0]);
        for i in [0, 1, 3] {
            let (_, lc) = local_cohomology(&m, &r.vars(), i, w(-6, 1), &cfg).unwrap();
            assert!(lc.module.is_zero(), "H^{i} should vanish");
        }
    }

    #[test]
    fn three_level_functoriality() {
        let r = ring(2);
        let m = PresentedModule::free(r.clone(), vec![0]);
        let f = r.vars();
        let base = m.realize(w(-6, 14)).unwrap();
        let c1 = KoszulComplex::build(&base, &f, 1, w(-4, 2)).unwrap();
        let c2 = KoszulComplex::build(&base, &f, 2, w(-2, 4)).unwrap();
        let c3 = KoszulComplex::build(&base, &f, 3, w(0, 6)).unwrap();
        let a = transition(&c1, &c2, Direction::Cohomological).unwrap();
        let b = transition(&c2, &c3, Direction::Cohomological).unwrap();
        let ab = transition(&c1, &c3, Direction::Cohomological).unwrap();
        for i in 0..=2 {
            for j in ab.domain().degrees() {
                let two = b.at(i, j + 2).unwrap().mul(a.at(i, j).unwrap()).unwrap();
                assert_eq!(&two, ab.at(i, j).unwrap());
            }
        }
        let h3 = KoszulComplex::build(&base, &f, 3, w(0, 2)).unwrap();
        let h2 = KoszulComplex::build(&base, &f, 2, w(0, 2)).unwrap();
        let h1 = KoszulComplex::build(&base, &f, 1, w(0, 2)).unwrap();
        let x = transition(&h3, &h2, Direction::Homological).unwrap();
        let y = transition(&h2, &h1, Direction::Homological).unwrap();
        let xy = transition(&h3, &h1, Direction::Homological).unwrap();
        for i in 0..=2 {
            for j in 0..=2 {
                let two = y.at(i, j).unwrap().mul(x.at(i, j).unwrap()).unwrap();
                assert_eq!(&two, xy.at(i, j).unwrap());
            }
        }
    }

    #[test]
    fn residue_field_inverse_system_is_constant() {
        let r = ring(2);
        let k = PresentedModule::residue_field(r.clone());
        let x = r.vars();
        let realize = |win: Window| k.realize(win);
        let (sys, lim) = local_homology(&realize, &x, 0, w(-1, 2), &LimitConfig::default()).unwrap();
        for n in 1..sys.levels() {
            let t = sys.transition(n, 0).unwrap();
            assert_eq!(*t, Matrix::identity(r.field(), 1));
        }
        assert_eq!(lim.result.hilbert(), vec![0, 1, 0, 0]);
        assert!(lim.result.all_stable());
        assert_eq!(lim.result.stabilization_level(), Some(1));
    }

    #[test]
    fn unstable_degrees_are_flagged() {
        let r = ring(1);
        let m = PresentedModule::free(r.clone(), vec![0]);
        let window = w(-1, 0);
        let base = m.realize(LevelSystem::cohomology_base_window(&r.vars(), 2, window).unwrap()).unwrap();
        // with only two levels and streak 2 no degree can be certified
        let sys = LevelSystem::cohomology(&base, &r.vars(), 1, 2, window).unwrap();
        let lim = sys.colimit(2).unwrap();
        assert!(!lim.result.all_stable());
        assert!(sys.inverse_limit(2).is_err());
    }
}
