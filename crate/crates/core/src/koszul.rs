//! Koszul complexes `K.(f_1^n, ..., f_r^n; M)` over a degreewise base module,
//! their homology, and the chain maps between levels.
//!
//! Wedge basis elements `e_S` are indexed by ascending subsets `S`, listed in
//! lex order. In internal degree `j` the slot `S` holds `M_{j - n·Σ_{t∈S} e_t}`
//! and `d(e_S) = Σ_k (-1)^{k+1} f_{t_k}^n e_{S \ t_k}`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::Matrix;
use crate::graded::{DegreewiseModule, PresentedModule, Subquotient, Window};
use crate::poly::Polynomial;

/// All `i`-element subsets of `0..r`, ascending, in lex order.
pub fn subsets(r: usize, i: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, r: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for t in start..=r - left {
            cur.push(t);
            go(t + 1, r, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if i <= r {
        go(0, r, i, &mut Vec::new(), &mut out);
    }
    out
}

/// Which way a level transition runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Level `n + k -> n`; slot `S` is multiplied by `Π_{t∈S} f_t^k`.
    Homological,
    /// Level `n -> n + k`; slot `T` is multiplied by `Π_{t∉T} f_t^k` and
    /// internal degrees move up by `k·Σ e_t`.
    Cohomological,
}

pub(crate) fn sequence_degrees(seq: &[Polynomial]) -> Result<Vec<i32>> {
    seq.iter()
        .enumerate()
        .map(|(t, f)| {
            f.homogeneous_degree()
                .map(|d| d as i32)
                .ok_or_else(|| Error::Input(format!("sequence element {t} is zero or not homogeneous")))
        })
        .collect()
}

/// Base degrees needed to build the level-`n` complex on `window`.
pub fn required_base_window(degs: &[i32], level: u32, window: Window) -> Window {
    let total: i32 = degs.iter().sum();
    Window {
        lo: window.lo - level as i32 * total,
        hi: window.hi,
    }
}

#[derive(Clone, Debug)]
pub struct KoszulComplex {
    base: DegreewiseModule,
    seq: Vec<Polynomial>,
    degs: Vec<i32>,
    level: u32,
    window: Window,
    slots: Vec<Vec<Vec<usize>>>,
    spots: Vec<DegreewiseModule>,
    diffs: Vec<Vec<Matrix>>,
}

impl KoszulComplex {
    pub fn build(base: &DegreewiseModule, seq: &[Polynomial], level: u32, window: Window) -> Result<Self> {
        if level == 0 {
            return Err(Error::Input("Koszul level must be at least 1".into()));
        }
        if seq.iter().any(|f| f.nvars() != base.nvars()) {
            return Err(Error::Input("sequence lives in a different ring".into()));
        }
        let degs = sequence_degrees(seq)?;
        let need = required_base_window(&degs, level, window);
        let have = base.window();
        if !have.contains_window(&need) {
            return Err(Error::WindowOverflow {
                need_lo: need.lo,
                need_hi: need.hi,
                lo: have.lo,
                hi: have.hi,
            });
        }
        let r = seq.len();
        let slots: Vec<Vec<Vec<usize>>> = (0..=r).map(|i| subsets(r, i)).collect();
        let field = base.field();
        let n = level as i32;
        let shift = |s: &[usize]| -> i32 { n * s.iter().map(|&t| degs[t]).sum::<i32>() };

        // f_t^n : M_b -> M_{b + n e_t} for every base degree that can occur
        let keys: Vec<(usize, i32)> = (0..r)
            .flat_map(|t| (need.lo..=need.hi - n * degs[t]).map(move |b| (t, b)))
            .collect();
        let powers: HashMap<(usize, i32), Matrix> = keys
            .into_par_iter()
            .map(|(t, b)| base.power_map(&seq[t], level, b).map(|m| ((t, b), m)))
            .collect::<Result<_>>()?;

        let mut spots = Vec::with_capacity(r + 1);
        for slot_list in &slots {
            let dims = window
                .degrees()
                .map(|j| slot_list.iter().map(|s| base.dim(j - shift(s))).sum::<Result<usize>>())
                .collect::<Result<Vec<_>>>()?;
            let actions = (window.lo..window.hi)
                .map(|j| {
                    (0..base.nvars())
                        .map(|t| {
                            let blocks = slot_list
                                .iter()
                                .map(|s| base.action(t, j - shift(s)).cloned())
                                .collect::<Result<Vec<_>>>()?;
                            Ok(Matrix::block_diag(field, &blocks))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            spots.push(DegreewiseModule::new(field, base.nvars(), window, dims, actions)?);
        }

        let mut diffs = vec![Vec::new()];
        for i in 1..=r {
            let target_index: HashMap<&Vec<usize>, usize> =
                slots[i - 1].iter().enumerate().map(|(k, s)| (s, k)).collect();
            let mats = window
                .degrees()
                .map(|j| {
                    let src_off = offsets(base, &slots[i], j, &shift)?;
                    let tgt_off = offsets(base, &slots[i - 1], j, &shift)?;
                    let mut d = Matrix::zeros(field, spots[i - 1].dim(j)?, spots[i].dim(j)?);
                    for (s_idx, s) in slots[i].iter().enumerate() {
                        let b = j - shift(s);
                        for (k, &t) in s.iter().enumerate() {
                            let mut rest = s.clone();
                            rest.remove(k);
                            let block = &powers[&(t, b)];
                            let block = if k % 2 == 0 { block.clone() } else { block.scale(field.neg(1)) };
                            d.set_block(tgt_off[target_index[&rest]], src_off[s_idx], &block);
                        }
                    }
                    Ok(d)
                })
                .collect::<Result<Vec<_>>>()?;
            diffs.push(mats);
        }

        Ok(Self {
            base: base.clone(),
            seq: seq.to_vec(),
            degs,
            level,
            window,
            slots,
            spots,
            diffs,
        })
    }

    /// Realizes `M` on the base window the complex needs, then builds it.
    pub fn from_presented(m: &PresentedModule, seq: &[Polynomial], level: u32, window: Window) -> Result<Self> {
        let degs = sequence_degrees(seq)?;
        let base = m.realize(required_base_window(&degs, level, window))?;
        Self::build(&base, seq, level, window)
    }

    pub fn length(&self) -> usize {
        self.seq.len()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn base(&self) -> &DegreewiseModule {
        &self.base
    }

    pub fn sequence(&self) -> &[Polynomial] {
        &self.seq
    }

    /// `n · Σ_t e_t`.
    pub fn total_shift(&self) -> i32 {
        self.level as i32 * self.degs.iter().sum::<i32>()
    }

    pub fn slots(&self, i: usize) -> &[Vec<usize>] {
        &self.slots[i]
    }

    fn slot_shift(&self, s: &[usize]) -> i32 {
        self.level as i32 * s.iter().map(|&t| self.degs[t]).sum::<i32>()
    }

    /// Offsets of each slot inside `K_i(j)`.
    pub fn slot_offsets(&self, i: usize, j: i32) -> Result<Vec<usize>> {
        offsets(&self.base, &self.slots[i], j, &|s: &[usize]| self.slot_shift(s))
    }

    pub fn spot(&self, i: usize) -> &DegreewiseModule {
        &self.spots[i]
    }

    /// `d_i : K_i(j) -> K_{i-1}(j)` for `1 <= i <= r`.
    pub fn differential(&self, i: usize, j: i32) -> Result<&Matrix> {
        if i == 0 || i > self.length() {
            return Err(Error::Input(format!("no differential d_{i} on a length-{} complex", self.length())));
        }
        let idx = (j - self.window.lo) as usize;
        self.spots[i].dim(j)?;
        Ok(&self.diffs[i][idx])
    }

    /// Checks `d_{i-1} ∘ d_i = 0` in every degree.
    pub fn check_square_zero(&self) -> Result<()> {
        for i in 2..=self.length() {
            for j in self.window.degrees() {
                let dd = self.differential(i - 1, j)?.mul(self.differential(i, j)?)?;
                if !dd.is_zero() {
                    return Err(Error::Diagnostic(format!("d_{} d_{i} is nonzero in degree {j}", i - 1)));
                }
            }
        }
        Ok(())
    }

    /// `H_i = ker d_i / im d_{i+1}` with induced variable actions.
    pub fn homology(&self, i: usize) -> Result<KoszulHomology> {
        let r = self.length();
        if i > r {
            return Err(Error::Input(format!("homology index {i} exceeds the length {r}")));
        }
        let subq = self
            .window
            .degrees()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|j| {
                let dim = self.spots[i].dim(j)?;
                let field = self.base.field();
                let cycles = if i == 0 {
                    Matrix::identity(field, dim)
                } else {
                    self.differential(i, j)?.kernel_matrix()
                };
                let boundaries = if i == r {
                    Matrix::zeros(field, dim, 0)
                } else {
                    self.differential(i + 1, j)?.clone()
                };
                Subquotient::new(&cycles, &boundaries)
            })
            .collect::<Result<Vec<_>>>()?;
        let module = self.spots[i].from_subquotients(self.window, &subq)?;
        Ok(KoszulHomology {
            index: i,
            level: self.level,
            module,
            subq,
        })
    }
}

fn offsets(
    base: &DegreewiseModule,
    slot_list: &[Vec<usize>],
    j: i32,
    shift: &dyn Fn(&[usize]) -> i32,
) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(slot_list.len());
    let mut acc = 0;
    for s in slot_list {
        out.push(acc);
        acc += base.dim(j - shift(s))?;
    }
    Ok(out)
}

/// `H_i` of a Koszul complex together with the cycle/boundary data needed to
/// push chain maps down to homology.
#[derive(Clone, Debug)]
pub struct KoszulHomology {
    pub index: usize,
    pub level: u32,
    module: DegreewiseModule,
    subq: Vec<Subquotient>,
}

impl KoszulHomology {
    pub fn module(&self) -> &DegreewiseModule {
        &self.module
    }

    pub fn into_module(self) -> DegreewiseModule {
        self.module
    }

    pub fn window(&self) -> Window {
        self.module.window()
    }

    pub fn subquotient(&self, j: i32) -> Result<&Subquotient> {
        self.module.dim(j)?;
        Ok(&self.subq[(j - self.window().lo) as usize])
    }
}

/// A map between Koszul complexes on the same base and sequence at two
/// levels. Degree `j` of the source maps to degree `j + shift` of the target.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub direction: Direction,
    pub shift: i32,
    domain: Window,
    mats: Vec<Vec<Matrix>>,
}

fn same_setting(a: &KoszulComplex, b: &KoszulComplex) -> bool {
    a.seq == b.seq && a.base.field() == b.base.field() && a.base.nvars() == b.base.nvars()
}

impl ChainMap {
    pub fn domain(&self) -> Window {
        self.domain
    }

    pub fn at(&self, i: usize, j: i32) -> Result<&Matrix> {
        if !self.domain.contains(j) {
            return Err(Error::OutOfWindow {
                degree: j,
                lo: self.domain.lo,
                hi: self.domain.hi,
            });
        }
        Ok(&self.mats[i][(j - self.domain.lo) as usize])
    }

    /// Checks `d ∘ φ = φ ∘ d` on every spot and degree of the domain.
    pub fn check_commutes(&self, src: &KoszulComplex, tgt: &KoszulComplex) -> Result<()> {
        for i in 1..=src.length() {
            for j in self.domain.degrees() {
                let left = tgt.differential(i, j + self.shift)?.mul(self.at(i, j)?)?;
                let right = self.at(i - 1, j)?.mul(src.differential(i, j)?)?;
                if left != right {
                    return Err(Error::Diagnostic(format!(
                        "chain map fails to commute with d_{i} in degree {j}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Induced maps `H_i(src)_j -> H_i(tgt)_{j+shift}` for `j` in the domain.
    pub fn on_homology(&self, src: &KoszulHomology, tgt: &KoszulHomology) -> Result<Vec<Matrix>> {
        let i = src.index;
        self.domain
            .degrees()
            .map(|j| src.subquotient(j)?.induced(self.at(i, j)?, tgt.subquotient(j + self.shift)?))
            .collect()
    }
}

/// The level transition between `src` and `tgt` in the given direction.
pub fn transition(src: &KoszulComplex, tgt: &KoszulComplex, direction: Direction) -> Result<ChainMap> {
    if !same_setting(src, tgt) {
        return Err(Error::Input("transition needs complexes on one base and sequence".into()));
    }
    let k = match direction {
        Direction::Homological if src.level > tgt.level => src.level - tgt.level,
        Direction::Cohomological if tgt.level > src.level => tgt.level - src.level,
        _ => {
            return Err(Error::Input(format!(
                "{direction:?} transition cannot run from level {} to level {}",
                src.level, tgt.level
            )))
        }
    };
    let total: i32 = src.degs.iter().sum();
    let shift = match direction {
        Direction::Homological => 0,
        Direction::Cohomological => k as i32 * total,
    };
    let lo = src.window.lo.max(tgt.window.lo - shift);
    let hi = src.window.hi.min(tgt.window.hi - shift);
    let domain = Window::new(lo, hi)?;
    let field = src.base.field();
    let base = &src.base;
    let r = src.length();
    let mats = (0..=r)
        .map(|i| {
            domain
                .degrees()
                .map(|j| {
                    let blocks = src.slots[i]
                        .iter()
                        .map(|s| {
                            let b = j - src.slot_shift(s);
                            let factors: Vec<usize> = match direction {
                                Direction::Homological => s.clone(),
                                Direction::Cohomological => (0..r).filter(|t| !s.contains(t)).collect(),
                            };
                            let mut cur = Matrix::identity(field, base.dim(b)?);
                            let mut deg = b;
                            for t in factors {
                                cur = base.power_map(&src.seq[t], k, deg)?.mul(&cur)?;
                                deg += k as i32 * src.degs[t];
                            }
                            Ok(cur)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Matrix::block_diag(field, &blocks))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChainMap {
        direction,
        shift,
        domain,
        mats,
    })
}

/// The chain map induced slotwise by a degree-preserving map of base modules;
/// `base_map(b)` is the matrix in base degree `b`.
pub fn chain_map_from_base(
    src: &KoszulComplex,
    tgt: &KoszulComplex,
    base_map: &dyn Fn(i32) -> Result<Matrix>,
) -> Result<ChainMap> {
    if src.seq != tgt.seq || src.level != tgt.level || src.window != tgt.window {
        return Err(Error::Input("base-induced chain maps need matching complexes".into()));
    }
    let field = src.base.field();
    let mats = (0..=src.length())
        .map(|i| {
            src.window
                .degrees()
                .map(|j| {
                    let blocks = src.slots[i]
                        .iter()
                        .map(|s| base_map(j - src.slot_shift(s)))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Matrix::block_diag(field, &blocks))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChainMap {
        direction: Direction::Homological,
        shift: 0,
        domain: src.window,
        mats,
    })
}

/// Koszul homology `H_i(f^n; M)` of a presented module on `window`.
pub fn homology(m: &PresentedModule, seq: &[Polynomial], level: u32, i: usize, window: Window) -> Result<DegreewiseModule> {
    Ok(KoszulComplex::from_presented(m, seq, level, window)?.homology(i)?.into_module())
}

/// Depth read off Koszul homology on the variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthResult {
    pub depth: usize,
    /// True when the answer relies on homology vanishing inside a finite window.
    pub window_dependent: bool,
}

/// Koszul degree window used to detect `H_i(x; M) != 0`.
pub fn depth_window(m: &PresentedModule) -> Window {
    let n = m.nvars() as i32;
    Window {
        lo: m.min_twist(),
        hi: m.top_bound() + n,
    }
}

/// `depth M = n - max{i : H_i(x_1, ..., x_n; M) != 0}`.
pub fn depth_via_koszul(m: &PresentedModule, window: Option<Window>) -> Result<DepthResult> {
    if m.is_zero() {
        return Err(Error::Domain("depth of the zero module".into()));
    }
    let n = m.nvars();
    let window = window.unwrap_or_else(|| depth_window(m));
    let complex = KoszulComplex::from_presented(m, &m.ring().vars(), 1, window)?;
    for i in (0..=n).rev() {
        if !complex.homology(i)?.module().is_zero() {
            return Ok(DepthResult {
                depth: n - i,
                window_dependent: i < n,
            });
        }
    }
    Err(Error::Diagnostic(
        "all Koszul homology vanished on the window, but H_0 of a nonzero module cannot".into(),
    ))
}
