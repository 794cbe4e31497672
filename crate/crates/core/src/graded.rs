//! Finitely generated graded modules and their degreewise realizations.
//!
//! A [`PresentedModule`] is `coker(F_1 -> F_0)` with `F_0 = ⊕ R(-a_i)`. Realizing
//! it on a [`Window`] produces a [`DegreewiseModule`]: one finite-dimensional
//! vector space per degree plus the matrices of multiplication by each
//! variable. Every later construction (Koszul homology, limits, duals) consumes
//! and produces `DegreewiseModule`s.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{Matrix, PrimeField};
use crate::poly::{monomial_count, monomials_of_degree, Monomial, Polynomial, RingSpec};

/// A finite interval of degrees `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub lo: i32,
    pub hi: i32,
}

impl Window {
    pub fn new(lo: i32, hi: i32) -> Result<Self> {
        if lo > hi {
            return Err(Error::Input(format!("empty window [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, j: i32) -> bool {
        self.lo <= j && j <= self.hi
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn degrees(&self) -> impl DoubleEndedIterator<Item = i32> + Clone {
        self.lo..=self.hi
    }

    pub fn shifted(&self, s: i32) -> Window {
        Window {
            lo: self.lo + s,
            hi: self.hi + s,
        }
    }

    fn index(&self, j: i32) -> Result<usize> {
        if self.contains(j) {
            Ok((j - self.lo) as usize)
        } else {
            Err(Error::OutOfWindow {
                degree: j,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }
}

/// One column of a presentation matrix, homogeneous of degree `degree`:
/// entry `i` has degree `degree - a_i` or is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationColumn {
    pub degree: i32,
    pub entries: Vec<Polynomial>,
}

/// `M = coker(relations)` as a quotient of `⊕ R(-a_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentedModule {
    ring: RingSpec,
    twists: Vec<i32>,
    relations: Vec<RelationColumn>,
}

impl PresentedModule {
    /// Builds a module from relation columns, inferring each column's degree.
    /// All-zero columns are dropped.
    pub fn new(ring: RingSpec, twists: Vec<i32>, columns: Vec<Vec<Polynomial>>) -> Result<Self> {
        let mut rels = Vec::with_capacity(columns.len());
        for (c, col) in columns.into_iter().enumerate() {
            if col.len() != twists.len() {
                return Err(Error::Input(format!(
                    "relation {c} has {} entries for {} generators",
                    col.len(),
                    twists.len()
                )));
            }
            let degree = col.iter().zip(&twists).find_map(|(f, &a)| {
                if f.is_zero() {
                    None
                } else {
                    Some(f.homogeneous_degree().map(|d| d as i32 + a))
                }
            });
            match degree {
                None => continue,
                Some(None) => {
                    return Err(Error::Input(format!("relation {c} is not homogeneous")))
                }
                Some(Some(degree)) => rels.push(RelationColumn {
                    degree,
                    entries: col,
                }),
            }
        }
        Self::with_degrees(ring, twists, rels)
    }

    pub fn with_degrees(ring: RingSpec, twists: Vec<i32>, relations: Vec<RelationColumn>) -> Result<Self> {
        for (c, col) in relations.iter().enumerate() {
            if col.entries.len() != twists.len() {
                return Err(Error::Input(format!("relation {c} has the wrong length")));
            }
            for (i, (f, &a)) in col.entries.iter().zip(&twists).enumerate() {
                if f.nvars() != ring.nvars() {
                    return Err(Error::Input(format!("relation {c} entry {i} has the wrong arity")));
                }
                if f.is_zero() {
                    continue;
                }
                match f.homogeneous_degree() {
                    Some(d) if d as i32 == col.degree - a => {}
                    Some(d) => {
                        return Err(Error::Input(format!(
                            "relation {c} entry {i} has degree {d}, expected {}",
                            col.degree - a
                        )))
                    }
                    None => {
                        return Err(Error::Input(format!(
                            "relation {c} entry {i} is not homogeneous"
                        )))
                    }
                }
            }
        }
        Ok(Self {
            ring,
            twists,
            relations,
        })
    }

    /// The free module `⊕ R(-a_i)`.
    pub fn free(ring: RingSpec, twists: Vec<i32>) -> Self {
        Self {
            ring,
            twists,
            relations: Vec::new(),
        }
    }

    /// The cyclic module `R/(f_1, ..., f_k)`.
    pub fn cyclic(ring: RingSpec, rels: &[Polynomial]) -> Result<Self> {
        Self::new(ring, vec![0], rels.iter().map(|f| vec![f.clone()]).collect())
    }

    /// The residue field `k = R/m`.
    pub fn residue_field(ring: RingSpec) -> Self {
        let vars = ring.vars();
        Self::cyclic(ring, &vars).expect("variables are homogeneous")
    }

    /// The zero module, presented as the identity on `R`.
    pub fn zero(ring: RingSpec) -> Self {
        let one = Polynomial::constant(ring.field(), ring.nvars(), 1);
        Self::new(ring, vec![0], vec![vec![one]]).expect("constant relation is homogeneous")
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn field(&self) -> PrimeField {
        self.ring.field()
    }

    pub fn nvars(&self) -> usize {
        self.ring.nvars()
    }

    pub fn twists(&self) -> &[i32] {
        &self.twists
    }

    pub fn relations(&self) -> &[RelationColumn] {
        &self.relations
    }

    pub fn min_twist(&self) -> i32 {
        self.twists.iter().copied().min().unwrap_or(0)
    }

    pub fn max_twist(&self) -> i32 {
        self.twists.iter().copied().max().unwrap_or(0)
    }

    /// Exact zero test: a module vanishes iff it vanishes in its generator degrees.
    pub fn is_zero(&self) -> bool {
        self.twists.iter().all(|&a| self.piece(a).dim() == 0)
    }

    /// Largest generator or relation degree.
    pub fn max_degree(&self) -> i32 {
        self.relations
            .iter()
            .map(|c| c.degree)
            .chain(self.twists.iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// A degree above which local cohomology of fixtures at desk scale is
    /// expected to vanish: `max_twist + n * (max relation span) + 1`.
    pub fn top_bound(&self) -> i32 {
        let span = (self.max_degree() - self.min_twist()).max(0);
        self.max_twist() + self.nvars() as i32 * span + 1
    }

    /// Appends the relations `f_t * e_i` for every generator, presenting `M/(f)M`.
    pub fn quotient_by_elements(&self, f: &[Polynomial]) -> Result<Self> {
        let mut rels = self.relations.clone();
        for (t, ft) in f.iter().enumerate() {
            if ft.is_zero() {
                continue;
            }
            let e = ft.homogeneous_degree().ok_or_else(|| {
                Error::Input(format!("element {t} of the quotient sequence is not homogeneous"))
            })? as i32;
            for (i, &a) in self.twists.iter().enumerate() {
                let mut entries = vec![Polynomial::zero(self.nvars()); self.twists.len()];
                entries[i] = ft.clone();
                rels.push(RelationColumn {
                    degree: a + e,
                    entries,
                });
            }
        }
        Self::with_degrees(self.ring.clone(), self.twists.clone(), rels)
    }

    fn piece(&self, j: i32) -> Piece {
        Piece::compute(self, j)
    }

    /// Degreewise realization with normal-form data kept for further maps.
    pub fn realization(&self, window: Window) -> Realization {
        let pieces: Vec<Piece> = window.degrees().collect::<Vec<_>>().into_par_iter().map(|j| self.piece(j)).collect();
        Realization {
            field: self.field(),
            nvars: self.nvars(),
            window,
            pieces,
        }
    }

    pub fn realize(&self, window: Window) -> Result<DegreewiseModule> {
        self.realization(window).to_module()
    }

    pub fn hilbert_function(&self, window: Window) -> Vec<usize> {
        window
            .degrees()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|j| self.piece(j).dim())
            .collect()
    }

    /// True iff `M_{j0} = 0`; with `j0` at or above every generator degree this
    /// certifies `M_j = 0` for all `j >= j0`.
    pub fn vanishing_certificate(&self, j0: i32) -> Result<bool> {
        if j0 < self.max_twist() {
            return Err(Error::Precondition(format!(
                "certificate degree {j0} below the top generator degree {}",
                self.max_twist()
            )));
        }
        Ok(self.piece(j0).dim() == 0)
    }

    /// Smallest `j0 >= max_twist` with `M_{j0} = 0`, searching up to `limit`.
    pub fn first_vanishing_degree(&self, limit: i32) -> Option<i32> {
        (self.max_twist()..=limit).find(|&j| self.piece(j).dim() == 0)
    }

    pub fn annihilator_pieces(&self, maxdeg: u32, window: Window) -> Result<Vec<AnnihilatorPiece>> {
        self.realize(window)?.annihilator_pieces(&self.ring, maxdeg)
    }

    /// The natural surjection `self -> target` when `target` has the same
    /// generators and a superset of the relations.
    pub fn natural_projection(&self, target: &PresentedModule, window: Window) -> Result<ModuleMap> {
        if self.twists != target.twists || self.ring != target.ring {
            return Err(Error::Input("projection needs matching generators".into()));
        }
        let src = self.realization(window);
        let tgt = target.realization(window);
        let mats = src
            .pieces
            .iter()
            .zip(&tgt.pieces)
            .map(|(s, t)| {
                let cols: Vec<Vec<u32>> = s.basis.iter().map(|&fc| t.unit_normal_form(fc)).collect();
                Matrix::from_columns(self.field(), t.dim(), &cols)
            })
            .collect();
        ModuleMap::new(window, mats)
    }
}

/// Degree-`j` slice of a presented module: the free cover basis, the row-reduced
/// relation image, and the standard (non-pivot) basis of the quotient.
#[derive(Clone, Debug)]
struct Piece {
    free: Vec<(usize, Monomial)>,
    index: HashMap<(usize, Monomial), usize>,
    reduced: Matrix,
    pivots: Vec<usize>,
    basis: Vec<usize>,
    position: Vec<Option<usize>>,
}

impl Piece {
    fn compute(m: &PresentedModule, j: i32) -> Piece {
        let field = m.field();
        let n = m.nvars();
        let mut free = Vec::new();
        for (i, &a) in m.twists.iter().enumerate() {
            if j >= a {
                for mono in monomials_of_degree(n, (j - a) as u32) {
                    free.push((i, mono));
                }
            }
        }
        let index: HashMap<(usize, Monomial), usize> =
            free.iter().cloned().enumerate().map(|(k, key)| (key, k)).collect();
        let width = free.len();
        let mut rows: Vec<u32> = Vec::new();
        let mut nrows = 0;
        for col in &m.relations {
            if j < col.degree {
                continue;
            }
            for mu in monomials_of_degree(n, (j - col.degree) as u32) {
                let mut row = vec![0u32; width];
                for (i, f) in col.entries.iter().enumerate() {
                    for (nu, c) in f.terms() {
                        let k = index[&(i, mu.mul(nu))];
                        row[k] = field.add(row[k], c);
                    }
                }
                rows.extend(row);
                nrows += 1;
            }
        }
        let rel = Matrix::from_data(field, nrows, width, rows).expect("shape is consistent");
        let rr = rel.rref();
        let reduced = rr.reduced.select_rows(&(0..rr.rank).collect::<Vec<_>>());
        let mut position = vec![None; width];
        let mut is_pivot = vec![false; width];
        for &c in &rr.pivots {
            is_pivot[c] = true;
        }
        let basis: Vec<usize> = (0..width).filter(|&c| !is_pivot[c]).collect();
        for (k, &c) in basis.iter().enumerate() {
            position[c] = Some(k);
        }
        Piece {
            free,
            index,
            reduced,
            pivots: rr.pivots,
            basis,
            position,
        }
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Quotient coordinates of the free basis vector `fc`.
    fn unit_normal_form(&self, fc: usize) -> Vec<u32> {
        let mut out = vec![0u32; self.dim()];
        if let Some(k) = self.position[fc] {
            out[k] = 1;
            return out;
        }
        let r = self.pivots.iter().position(|&p| p == fc).expect("pivot column");
        let field = self.reduced.field();
        for (k, &c) in self.basis.iter().enumerate() {
            out[k] = field.neg(self.reduced.get(r, c));
        }
        out
    }

    /// Quotient coordinates of an arbitrary free-cover vector.
    fn normal_form(&self, v: &[u32]) -> Vec<u32> {
        let field = self.reduced.field();
        let mut out: Vec<u32> = self.basis.iter().map(|&c| v[c]).collect();
        for (r, &p) in self.pivots.iter().enumerate() {
            let coef = v[p];
            if coef == 0 {
                continue;
            }
            for (k, &c) in self.basis.iter().enumerate() {
                let e = self.reduced.get(r, c);
                if e != 0 {
                    out[k] = field.sub(out[k], field.mul(coef, e));
                }
            }
        }
        out
    }
}

/// A presented module realized on a window, keeping normal-form data.
#[derive(Clone, Debug)]
pub struct Realization {
    field: PrimeField,
    nvars: usize,
    window: Window,
    pieces: Vec<Piece>,
}

impl Realization {
    pub fn window(&self) -> Window {
        self.window
    }

    pub fn dims(&self) -> Vec<usize> {
        self.pieces.iter().map(Piece::dim).collect()
    }

    /// Generator index and monomial of the `k`-th standard basis element in degree `j`.
    pub fn basis_element(&self, j: i32, k: usize) -> Result<(usize, &Monomial)> {
        let p = &self.pieces[self.window.index(j)?];
        let (i, m) = &p.free[p.basis[k]];
        Ok((*i, m))
    }

    /// Coordinates in `M_j` of the element `sum_i f_i e_i` of the free cover.
    pub fn coordinates(&self, j: i32, entries: &[Polynomial]) -> Result<Vec<u32>> {
        let p = &self.pieces[self.window.index(j)?];
        let mut v = vec![0u32; p.free.len()];
        for (i, f) in entries.iter().enumerate() {
            for (m, c) in f.terms() {
                let k = *p.index.get(&(i, m.clone())).ok_or_else(|| {
                    Error::Input(format!("term of degree {} does not live in degree {j}", m.degree()))
                })?;
                v[k] = self.field.add(v[k], c);
            }
        }
        Ok(p.normal_form(&v))
    }

    pub fn to_module(&self) -> Result<DegreewiseModule> {
        let w = self.window;
        let dims = self.dims();
        let actions: Vec<Vec<Matrix>> = (0..w.len().saturating_sub(1))
            .into_par_iter()
            .map(|idx| {
                let (src, tgt) = (&self.pieces[idx], &self.pieces[idx + 1]);
                (0..self.nvars)
                    .map(|t| {
                        let cols: Vec<Vec<u32>> = src
                            .basis
                            .iter()
                            .map(|&fc| {
                                let (i, m) = &src.free[fc];
                                tgt.unit_normal_form(tgt.index[&(*i, m.times_var(t))])
                            })
                            .collect();
                        Matrix::from_columns(self.field, tgt.dim(), &cols)
                    })
                    .collect()
            })
            .collect();
        DegreewiseModule::new(self.field, self.nvars, w, dims, actions)
    }
}

/// A degree-preserving linear map between two degreewise modules on a common window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap {
    window: Window,
    mats: Vec<Matrix>,
}

impl ModuleMap {
    pub fn new(window: Window, mats: Vec<Matrix>) -> Result<Self> {
        if mats.len() != window.len() {
            return Err(Error::DimensionMismatch("one matrix per degree expected".into()));
        }
        Ok(Self { window, mats })
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn at(&self, j: i32) -> Result<&Matrix> {
        Ok(&self.mats[self.window.index(j)?])
    }
}

/// `Z/B` for subspaces `B ⊆ Z` of an ambient `F_p^m`: representatives of a
/// basis and a coordinate map that is valid on vectors of `Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subquotient {
    reps: Matrix,
    coords: Matrix,
}

impl Subquotient {
    /// `sub` and `rel` are spanning sets given as matrix columns; `rel ⊆ sub` is assumed.
    pub fn new(sub: &Matrix, rel: &Matrix) -> Result<Self> {
        let (_, nf) = normal_form_map(rel, sub.rows());
        let image = nf.mul(sub)?;
        let piv = image.column_basis_indices();
        let reps = sub.select_columns(&piv);
        let selected = image.select_columns(&piv);
        let coords = if piv.is_empty() {
            Matrix::zeros(sub.field(), 0, sub.rows())
        } else {
            selected.left_inverse()?.mul(&nf)?
        };
        Ok(Self { reps, coords })
    }

    /// The whole ambient space modulo `rel`.
    pub fn quotient(field: PrimeField, ambient: usize, rel: &Matrix) -> Result<Self> {
        if rel.field() != field {
            return Err(Error::Input("field mismatch".into()));
        }
        let (free, coords) = normal_form_map(rel, ambient);
        let mut reps = Matrix::zeros(field, ambient, free.len());
        for (k, &c) in free.iter().enumerate() {
            reps.set(c, k, 1);
        }
        Ok(Self { reps, coords })
    }

    /// The subspace spanned by `sub`.
    pub fn subspace(sub: &Matrix) -> Result<Self> {
        Self::new(sub, &Matrix::zeros(sub.field(), sub.rows(), 0))
    }

    pub fn dim(&self) -> usize {
        self.reps.cols()
    }

    pub fn ambient(&self) -> usize {
        self.reps.rows()
    }

    pub fn reps(&self) -> &Matrix {
        &self.reps
    }

    pub fn coords(&self) -> &Matrix {
        &self.coords
    }

    /// Matrix of the map induced by `f : ambient -> other.ambient`.
    pub fn induced(&self, f: &Matrix, other: &Subquotient) -> Result<Matrix> {
        other.coords.mul(&f.mul(&self.reps)?)
    }
}

/// Normal form modulo the column span of `rel`: the non-pivot coordinates of
/// the row-reduced `rel^T`, and the matrix sending a vector to its reduced
/// non-pivot coordinates (its class in `ambient / span(rel)`).
fn normal_form_map(rel: &Matrix, ambient: usize) -> (Vec<usize>, Matrix) {
    let field = rel.field();
    let rr = rel.transpose().rref();
    let mut is_pivot = vec![false; ambient];
    for &p in &rr.pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..ambient).filter(|&c| !is_pivot[c]).collect();
    let mut nf = Matrix::zeros(field, free.len(), ambient);
    for (k, &c) in free.iter().enumerate() {
        nf.set(k, c, 1);
        for (r, &p) in rr.pivots.iter().enumerate() {
            let e = rr.reduced.get(r, c);
            if e != 0 {
                nf.set(k, p, field.neg(e));
            }
        }
    }
    (free, nf)
}

/// A graded module known degree by degree on a finite window, with the
/// action of each variable `x_t : M_j -> M_{j+1}` for `lo <= j < hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreewiseModule {
    field: PrimeField,
    nvars: usize,
    window: Window,
    dims: Vec<usize>,
    actions: Vec<Vec<Matrix>>,
}

/// Basis of the degree-`degree` part of a (windowed) annihilator ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnihilatorPiece {
    pub degree: u32,
    pub basis: Vec<Polynomial>,
}

impl DegreewiseModule {
    pub fn new(
        field: PrimeField,
        nvars: usize,
        window: Window,
        dims: Vec<usize>,
        actions: Vec<Vec<Matrix>>,
    ) -> Result<Self> {
        if dims.len() != window.len() || actions.len() + 1 != window.len() {
            return Err(Error::DimensionMismatch("window and piece counts disagree".into()));
        }
        for (idx, acts) in actions.iter().enumerate() {
            if acts.len() != nvars {
                return Err(Error::DimensionMismatch("one action per variable expected".into()));
            }
            for a in acts {
                if a.rows() != dims[idx + 1] || a.cols() != dims[idx] {
                    return Err(Error::DimensionMismatch(format!(
                        "action at degree {} has shape {}x{}, expected {}x{}",
                        window.lo + idx as i32,
                        a.rows(),
                        a.cols(),
                        dims[idx + 1],
                        dims[idx]
                    )));
                }
            }
        }
        Ok(Self {
            field,
            nvars,
            window,
            dims,
            actions,
        })
    }

    pub fn zero(field: PrimeField, nvars: usize, window: Window) -> Self {
        let actions = (0..window.len() - 1)
            .map(|_| vec![Matrix::zeros(field, 0, 0); nvars])
            .collect();
        Self {
            field,
            nvars,
            window,
            dims: vec![0; window.len()],
            actions,
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn dim(&self, j: i32) -> Result<usize> {
        Ok(self.dims[self.window.index(j)?])
    }

    pub fn hilbert(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    /// Multiplication by `x_t` from degree `j` to `j + 1`.
    pub fn action(&self, t: usize, j: i32) -> Result<&Matrix> {
        if j == self.window.hi {
            return Err(Error::OutOfWindow {
                degree: j + 1,
                lo: self.window.lo,
                hi: self.window.hi,
            });
        }
        Ok(&self.actions[self.window.index(j)?][t])
    }

    pub fn monomial_map(&self, m: &Monomial, j: i32) -> Result<Matrix> {
        let mut cur = Matrix::identity(self.field, self.dim(j)?);
        for (deg, t) in (j..).zip(m.factors()) {
            cur = self.action(t, deg)?.mul(&cur)?;
        }
        Ok(cur)
    }

    /// Multiplication by a nonzero homogeneous polynomial, `M_j -> M_{j+e}`.
    pub fn poly_map(&self, f: &Polynomial, j: i32) -> Result<Matrix> {
        let e = f
            .homogeneous_degree()
            .ok_or_else(|| Error::Input("multiplier must be nonzero and homogeneous".into()))?
            as i32;
        let mut acc = Matrix::zeros(self.field, self.dim(j + e)?, self.dim(j)?);
        for (m, c) in f.terms() {
            acc = acc.add(&self.monomial_map(m, j)?.scale(c))?;
        }
        Ok(acc)
    }

    /// Multiplication by `f^n`, composed from `n` applications of `f`.
    pub fn power_map(&self, f: &Polynomial, n: u32, j: i32) -> Result<Matrix> {
        let e = f
            .homogeneous_degree()
            .ok_or_else(|| Error::Input("multiplier must be nonzero and homogeneous".into()))?
            as i32;
        let mut cur = Matrix::identity(self.field, self.dim(j)?);
        let mut deg = j;
        for _ in 0..n {
            cur = self.poly_map(f, deg)?.mul(&cur)?;
            deg += e;
        }
        Ok(cur)
    }

    /// Relabels degrees: the piece in degree `j` moves to degree `j + s`.
    pub fn shifted(&self, s: i32) -> Self {
        Self {
            window: self.window.shifted(s),
            ..self.clone()
        }
    }

    pub fn restrict(&self, window: Window) -> Result<Self> {
        if !self.window.contains_window(&window) {
            return Err(Error::WindowOverflow {
                need_lo: window.lo,
                need_hi: window.hi,
                lo: self.window.lo,
                hi: self.window.hi,
            });
        }
        let a = (window.lo - self.window.lo) as usize;
        Ok(Self {
            field: self.field,
            nvars: self.nvars,
            window,
            dims: self.dims[a..a + window.len()].to_vec(),
            actions: self.actions[a..a + window.len() - 1].to_vec(),
        })
    }

    /// Graded vector-space dual: degree `j` holds the dual of degree `-j`, and
    /// the variables act by transposes.
    pub fn dual(&self) -> Self {
        let window = Window {
            lo: -self.window.hi,
            hi: -self.window.lo,
        };
        let dims: Vec<usize> = self.dims.iter().rev().copied().collect();
        let actions: Vec<Vec<Matrix>> = self
            .actions
            .iter()
            .rev()
            .map(|acts| acts.iter().map(Matrix::transpose).collect())
            .collect();
        Self {
            field: self.field,
            nvars: self.nvars,
            window,
            dims,
            actions,
        }
    }

    /// Checks `x_t x_u = x_u x_t` exactly on every pair of adjacent degrees.
    pub fn check_commutativity(&self) -> Result<()> {
        for j in self.window.lo..self.window.hi - 1 {
            for t in 0..self.nvars {
                for u in t + 1..self.nvars {
                    let tu = self.action(t, j + 1)?.mul(self.action(u, j)?)?;
                    let ut = self.action(u, j + 1)?.mul(self.action(t, j)?)?;
                    if tu != ut {
                        return Err(Error::Diagnostic(format!(
                            "x{t} and x{u} do not commute at degree {j}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Submodule/quotient construction: per degree a [`Subquotient`] of the
    /// ambient piece; actions are induced from the ambient actions.
    pub fn from_subquotients(&self, window: Window, subq: &[Subquotient]) -> Result<Self> {
        let dims = subq.iter().map(Subquotient::dim).collect();
        let mut actions = Vec::with_capacity(window.len().saturating_sub(1));
        for j in window.lo..window.hi {
            let idx = (j - window.lo) as usize;
            let acts = (0..self.nvars)
                .map(|t| subq[idx].induced(self.action(t, j)?, &subq[idx + 1]))
                .collect::<Result<Vec<_>>>()?;
            actions.push(acts);
        }
        Self::new(self.field, self.nvars, window, dims, actions)
    }

    fn max_degree_of(seq: &[Polynomial]) -> Result<i32> {
        seq.iter()
            .map(|f| {
                f.homogeneous_degree()
                    .map(|d| d as i32)
                    .ok_or_else(|| Error::Input("sequence elements must be nonzero and homogeneous".into()))
            })
            .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
    }

    /// Basis (as columns) of `{m in M_j : f m = 0 for all f in seq}`.
    pub fn annihilated_subspace(&self, seq: &[Polynomial], j: i32) -> Result<Matrix> {
        let d = self.dim(j)?;
        let mut stacked = Matrix::zeros(self.field, 0, d);
        for f in seq {
            stacked = stacked.vstack(&self.poly_map(f, j)?)?;
        }
        Ok(stacked.kernel_matrix())
    }

    /// The submodule `0 :_M (seq)` on the window `[lo, hi - max deg]`.
    pub fn colon(&self, seq: &[Polynomial]) -> Result<Self> {
        let e = Self::max_degree_of(seq)?;
        let window = Window::new(self.window.lo, self.window.hi - e)?;
        let subq = window
            .degrees()
            .map(|j| Subquotient::subspace(&self.annihilated_subspace(seq, j)?))
            .collect::<Result<Vec<_>>>()?;
        self.from_subquotients(window, &subq)
    }

    /// The quotient `M / (seq) M` on the window `[lo + max deg, hi]`.
    pub fn quotient_by(&self, seq: &[Polynomial]) -> Result<Self> {
        let e = Self::max_degree_of(seq)?;
        let window = Window::new(self.window.lo + e, self.window.hi)?;
        let subq = window
            .degrees()
            .map(|j| {
                let d = self.dim(j)?;
                let mut image = Matrix::zeros(self.field, d, 0);
                for f in seq {
                    let fe = f.homogeneous_degree().unwrap_or(0) as i32;
                    image = image.hstack(&self.poly_map(f, j - fe)?)?;
                }
                Subquotient::quotient(self.field, d, &image)
            })
            .collect::<Result<Vec<_>>>()?;
        self.from_subquotients(window, &subq)
    }

    /// Pieces of the windowed annihilator: `r in R_e` with `r M_j = 0` for every
    /// `j` with `j, j + e` in the window, for `e = 0..=maxdeg`.
    pub fn annihilator_pieces(&self, ring: &RingSpec, maxdeg: u32) -> Result<Vec<AnnihilatorPiece>> {
        let n = self.nvars;
        (0..=maxdeg)
            .map(|e| {
                let monos = monomials_of_degree(n, e);
                let mut cols: Vec<Vec<u32>> = vec![Vec::new(); monos.len()];
                for j in self.window.lo..=self.window.hi - e as i32 {
                    for (k, m) in monos.iter().enumerate() {
                        cols[k].extend_from_slice(self.monomial_map(m, j)?.data());
                    }
                }
                let rows = cols.first().map_or(0, Vec::len);
                let conditions = Matrix::from_columns(self.field, rows, &cols);
                let basis = conditions
                    .kernel_basis()
                    .into_iter()
                    .map(|v| {
                        Polynomial::from_terms(
                            ring.field(),
                            n,
                            monos.iter().cloned().zip(v),
                        )
                    })
                    .collect();
                Ok(AnnihilatorPiece { degree: e, basis })
            })
            .collect()
    }

    /// A presentation agreeing with this module on its window, built degree by
    /// degree from the bottom: new generators span cokernels of the action
    /// from lower degrees, new relations span the kernel of the free cover
    /// modulo consequences of earlier relations.
    pub fn present(&self, ring: &RingSpec) -> Result<PresentedModule> {
        if ring.nvars() != self.nvars || ring.field() != self.field {
            return Err(Error::Input("ring does not match the module".into()));
        }
        let field = self.field;
        let n = self.nvars;
        let mut twists: Vec<i32> = Vec::new();
        let mut gen_vectors: Vec<Vec<u32>> = Vec::new();
        let mut relations: Vec<RelationColumn> = Vec::new();
        let mut prev_images: HashMap<(usize, Monomial), Vec<u32>> = HashMap::new();

        for j in self.window.degrees() {
            let d = self.dim(j)?;
            let mut free: Vec<(usize, Monomial)> = Vec::new();
            let mut images: HashMap<(usize, Monomial), Vec<u32>> = HashMap::new();
            for (i, &a) in twists.iter().enumerate() {
                for mono in monomials_of_degree(n, (j - a) as u32) {
                    let img = if a == j {
                        gen_vectors[i].clone()
                    } else {
                        let t = mono.0.iter().position(|&e| e > 0).expect("positive degree");
                        let mut lower = mono.clone();
                        lower.0[t] -= 1;
                        self.action(t, j - 1)?.mul_vec(&prev_images[&(i, lower)])?
                    };
                    images.insert((i, mono.clone()), img);
                    free.push((i, mono));
                }
            }
            let index: HashMap<(usize, Monomial), usize> =
                free.iter().cloned().enumerate().map(|(k, key)| (key, k)).collect();
            let pi = Matrix::from_columns(field, d, &free.iter().map(|key| images[key].clone()).collect::<Vec<_>>());

            // relations: kernel of pi modulo the span of earlier relations
            let mut old: Vec<Vec<u32>> = Vec::new();
            for col in &relations {
                for mu in monomials_of_degree(n, (j - col.degree) as u32) {
                    let mut v = vec![0u32; free.len()];
                    for (i, f) in col.entries.iter().enumerate() {
                        for (nu, c) in f.terms() {
                            let k = index[&(i, mu.mul(nu))];
                            v[k] = field.add(v[k], c);
                        }
                    }
                    old.push(v);
                }
            }
            let old_m = Matrix::from_columns(field, free.len(), &old);
            let kernel = pi.kernel_matrix();
            let joined = old_m.hstack(&kernel)?;
            for c in joined.column_basis_indices() {
                if c < old_m.cols() {
                    continue;
                }
                let v = joined.column(c);
                let mut entries = vec![Polynomial::zero(n); twists.len()];
                for (k, (i, mono)) in free.iter().enumerate() {
                    if v[k] != 0 {
                        entries[*i] = entries[*i].add(field, &Polynomial::monomial(field, mono.clone(), v[k] as i64));
                    }
                }
                relations.push(RelationColumn { degree: j, entries });
            }

            // generators: complement of the image of lower degrees
            let joined = pi.hstack(&Matrix::identity(field, d))?;
            for c in joined.column_basis_indices() {
                if c < pi.cols() {
                    continue;
                }
                let mut v = vec![0u32; d];
                v[c - pi.cols()] = 1;
                let i = twists.len();
                twists.push(j);
                for col in relations.iter_mut() {
                    col.entries.push(Polynomial::zero(n));
                }
                images.insert((i, Monomial::one(n)), v.clone());
                gen_vectors.push(v);
            }
            prev_images = images;
        }
        PresentedModule::with_degrees(ring.clone(), twists, relations)
    }
}

/// Hilbert function of `M` on `window`.
pub fn hilbert_function(m: &PresentedModule, window: Window) -> Vec<usize> {
    m.hilbert_function(window)
}

/// `dim R_j` for the free module `R^s` with all twists zero.
pub fn free_rank_in_degree(nvars: usize, s: usize, j: i32) -> usize {
    monomial_count(nvars, j as i64) * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Monomial;

    fn ring(n: usize) -> RingSpec {
        RingSpec::standard(PrimeField::default(), n)
    }

    fn w(lo: i32, hi: i32) -> Window {
        Window::new(lo, hi).unwrap()
    }

    fn mono(field: PrimeField, e: &[u32]) -> Polynomial {
        Polynomial::monomial(field, Monomial(e.to_vec()), 1)
    }

    #[test]
    fn free_module_dims() {
        let r = ring(2);
        let m = PresentedModule::free(r, vec![0]);
        assert_eq!(m.hilbert_function(w(0, 3)), vec![1, 2, 3, 4]);
        let r3 = ring(3);
        assert_eq!(PresentedModule::free(r3, vec![0]).hilbert_function(w(0, 2)), vec![1, 3, 6]);
    }

    #[test]
    fn truncated_quotient_dims() {
        let r = ring(2);
        let k = r.field();
        let m = PresentedModule::cyclic(r, &[mono(k, &[2, 0]), mono(k, &[1, 1]), mono(k, &[0, 2])]).unwrap();
        assert_eq!(m.hilbert_function(w(0, 2)), vec![1, 2, 0]);
        assert!(m.vanishing_certificate(2).unwrap());
    }

    #[test]
    fn direct_sum_with_twist_matches_enumeration() {
        let r = ring(1);
        let m = PresentedModule::free(r, vec![1, 0]);
        // oracle: count monomials x^k with k = j - a for each summand
        let oracle: Vec<usize> = (0..=2)
            .map(|j: i32| [1, 0].iter().filter(|&&a| j - a >= 0).count())
            .collect();
        assert_eq!(oracle, vec![1, 2, 2]);
        assert_eq!(m.hilbert_function(w(0, 2)), oracle);
    }

    #[test]
    fn complete_intersection_against_box_count() {
        let r = ring(2);
        let k = r.field();
        let m = PresentedModule::cyclic(r, &[mono(k, &[2, 0]), mono(k, &[0, 2])]).unwrap();
        // standard monomials x^a y^b with a, b < 2, grouped by degree
        let mut oracle = vec![0usize; 5];
        for a in 0..2 {
            for b in 0..2 {
                oracle[a + b] += 1;
            }
        }
        assert_eq!(m.hilbert_function(w(0, 4)), oracle);
    }

    #[test]
    fn zero_module_and_residue_field() {
        let r = ring(2);
        assert_eq!(PresentedModule::zero(r.clone()).hilbert_function(w(-1, 3)), vec![0; 5]);
        let k = PresentedModule::residue_field(r.clone());
        assert_eq!(k.hilbert_function(w(0, 2)), vec![1, 0, 0]);
        assert!(k.vanishing_certificate(1).unwrap());
        let rr = PresentedModule::free(r, vec![0]);
        assert!(!rr.vanishing_certificate(5).unwrap());
        let twisted = PresentedModule::free(ring(1), vec![3]);
        assert!(twisted.vanishing_certificate(2).is_err());
    }

    #[test]
    fn quotient_by_powers_has_square_length() {
        let r = ring(2);
        let k = r.field();
        let m = PresentedModule::free(r.clone(), vec![0]);
        let q = m.quotient_by_elements(&r.vars()).unwrap();
        assert_eq!(q.hilbert_function(w(0, 3)), vec![1, 0, 0, 0]);
        for n in 1..=4u32 {
            let q = m
                .quotient_by_elements(&[r.var(0).pow(k, n), r.var(1).pow(k, n)])
                .unwrap();
            let total: usize = q.hilbert_function(w(0, 2 * n as i32)).iter().sum();
            assert_eq!(total, (n * n) as usize);
        }
        assert_eq!(m.quotient_by_elements(&[]).unwrap(), m);
    }

    #[test]
    fn non_homogeneous_rejected() {
        let r = ring(2);
        let k = r.field();
        let bad = r.var(0).add(k, &mono(k, &[2, 0]));
        assert!(PresentedModule::cyclic(r.clone(), std::slice::from_ref(&bad)).is_err());
        let m = PresentedModule::free(r, vec![0]);
        assert!(m.quotient_by_elements(&[bad]).is_err());
    }

    #[test]
    fn actions_commute_and_out_of_window_errors() {
        let r = ring(3);
        let k = r.field();
        let f = r.var(0).mul(k, &r.var(1)).add(k, &r.var(2).pow(k, 2));
        let m = PresentedModule::cyclic(r, &[f]).unwrap();
        let dm = m.realize(w(0, 5)).unwrap();
        dm.check_commutativity().unwrap();
        assert!(dm.dim(6).is_err());
        assert!(dm.action(0, 5).is_err());
    }

    #[test]
    fn annihilator_examples() {
        let r = ring(2);
        let k = r.field();
        let free = PresentedModule::free(r.clone(), vec![0]);
        for piece in free.annihilator_pieces(3, w(0, 6)).unwrap() {
            assert!(piece.basis.is_empty());
        }
        let f = mono(k, &[2, 0]).add(k, &mono(k, &[0, 2]));
        let m = PresentedModule::cyclic(r.clone(), std::slice::from_ref(&f)).unwrap();
        let pieces = m.annihilator_pieces(2, w(0, 6)).unwrap();
        assert!(pieces[0].basis.is_empty() && pieces[1].basis.is_empty());
        assert_eq!(pieces[2].basis.len(), 1);
        // the single generator is a nonzero multiple of f
        let g = &pieces[2].basis[0];
        let c = g.coefficient(&Monomial(vec![2, 0]));
        assert_eq!(*g, f.scale(k, c));
        let res = PresentedModule::residue_field(r);
        let pieces = res.annihilator_pieces(1, w(0, 3)).unwrap();
        assert!(pieces[0].basis.is_empty());
        assert_eq!(pieces[1].basis.len(), 2);
    }

    #[test]
    fn dual_is_an_involution() {
        let r = ring(2);
        let k = r.field();
        let m = PresentedModule::cyclic(r, &[mono(k, &[1, 1])]).unwrap();
        let dm = m.realize(w(-1, 4)).unwrap();
        assert_eq!(dm.dual().dual(), dm);
        assert_eq!(dm.dual().hilbert(), &[2, 2, 2, 2, 1, 0]);
    }

    #[test]
    fn presentation_reproduces_the_module() {
        let r = ring(2);
        let k = r.field();
        let m = PresentedModule::cyclic(r.clone(), &[mono(k, &[2, 0]), mono(k, &[1, 1])]).unwrap();
        let dm = m.realize(w(0, 6)).unwrap();
        let p = dm.present(&r).unwrap();
        assert_eq!(p.twists(), &[0]);
        assert_eq!(p.relations().len(), 2);
        assert_eq!(p.realize(w(0, 6)).unwrap(), dm);

        let two = PresentedModule::free(r.clone(), vec![1, 3]);
        let dm = two.realize(w(-1, 5)).unwrap();
        let p = dm.present(&r).unwrap();
        assert_eq!(p.twists(), &[1, 3]);
        assert!(p.relations().is_empty());
    }

    #[test]
    fn colon_and_quotient_submodules() {
        let r = ring(2);
        let k = r.field();
        let m = PresentedModule::cyclic(r.clone(), &[mono(k, &[2, 0]), mono(k, &[1, 1])]).unwrap();
        let dm = m.realize(w(0, 5)).unwrap();
        // x kills x and every y^j with j >= 1
        let colon = dm.colon(&[r.var(0)]).unwrap();
        assert_eq!(colon.hilbert(), &[0, 2, 1, 1, 1]);
        let quot = dm.quotient_by(&[r.var(1)]).unwrap();
        assert_eq!(quot.hilbert(), &[1, 0, 0, 0, 0]);
    }

    #[test]
    fn natural_projection_is_onto() {
        let r = ring(2);
        let k = r.field();
        let m = PresentedModule::free(r.clone(), vec![0]);
        let a = m.quotient_by_elements(&[r.var(0).pow(k, 3), r.var(1).pow(k, 3)]).unwrap();
        let b = m.quotient_by_elements(&[r.var(0).pow(k, 2), r.var(1).pow(k, 2)]).unwrap();
        let pr = a.natural_projection(&b, w(0, 4)).unwrap();
        let hb = b.hilbert_function(w(0, 4));
        for (idx, j) in (0..=4).enumerate() {
            assert_eq!(pr.at(j).unwrap().rank(), hb[idx]);
        }
    }
}
