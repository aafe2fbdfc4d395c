//! Linear and semilinear subsets of `Z^n`.
//!
//! A linear set `L(b; a_1, ..., a_k)` is `{ b + n_1 a_1 + ... + n_k a_k : n_j >= 0 }`.
//! It is unambiguous when every member has exactly one coefficient tuple.
//! A semilinear set is a finite union of linear sets of the same dimension.
//!
//! Membership, representation counts and box enumeration are exact. The
//! disjoint-unambiguous decomposition is a restricted greedy search whose
//! result is always checked by [`validate_decomposition`] before it is
//! returned as certified.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;

/// Node budget for a single representation search.
pub const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000;

/// Point budget for certification boxes.
pub const DEFAULT_BOX_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemilinearError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("search budget of {0} exceeded")]
    BudgetExceeded(u64),
    #[error("axis {axis} is out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("period {period:?} has projection {value} <= 0 on axis {axis}; slices are not finite")]
    SliceNotFinite {
        axis: usize,
        period: Vec<i64>,
        value: i64,
    },
    #[error("base {base:?} has negative projection on axis {axis}")]
    NegativeBase { axis: usize, base: Vec<i64> },
    #[error("box lower corner exceeds upper corner")]
    EmptyBox,
    #[error("no disjoint unambiguous decomposition found: {0}")]
    DecompositionNotFound(String),
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub budget: u64,
    /// Sign, congruence and cone-relaxation pruning. Results never depend
    /// on this flag; only the amount of work does.
    pub pruning: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: DEFAULT_SEARCH_BUDGET,
            pruning: true,
        }
    }
}

/// Outcome of [`LinearSet::check_unambiguous`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ambiguity {
    Unambiguous,
    AmbiguousWitness(Vec<i64>),
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LinearSetRepr", into = "LinearSetRepr")]
pub struct LinearSet {
    base: Vec<i64>,
    periods: Vec<Vec<i64>>,
    /// Zero or repeated periods removed at construction, in input order.
    stripped: Vec<Vec<i64>>,
    independent: bool,
}

#[derive(Serialize, Deserialize)]
struct LinearSetRepr {
    base: Vec<i64>,
    periods: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    stripped: Vec<Vec<i64>>,
}

impl TryFrom<LinearSetRepr> for LinearSet {
    type Error = SemilinearError;
    fn try_from(r: LinearSetRepr) -> Result<Self, Self::Error> {
        let mut l = LinearSet::new(r.base, r.periods)?;
        let mut stripped = r.stripped;
        stripped.append(&mut l.stripped);
        l.stripped = stripped;
        Ok(l)
    }
}

impl From<LinearSet> for LinearSetRepr {
    fn from(l: LinearSet) -> Self {
        LinearSetRepr {
            base: l.base,
            periods: l.periods,
            stripped: l.stripped,
        }
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn check_dim(expected: usize, v: &[i64]) -> Result<(), SemilinearError> {
    if v.len() != expected {
        return Err(SemilinearError::DimensionMismatch {
            expected,
            got: v.len(),
        });
    }
    Ok(())
}

impl LinearSet {
    /// Zero periods and repeated periods are stripped (and recorded).
    pub fn new(base: Vec<i64>, periods: Vec<Vec<i64>>) -> Result<Self, SemilinearError> {
        let n = base.len();
        let mut kept: Vec<Vec<i64>> = Vec::new();
        let mut stripped = Vec::new();
        for p in periods {
            check_dim(n, &p)?;
            if p.iter().all(|&x| x == 0) || kept.contains(&p) {
                stripped.push(p);
            } else {
                kept.push(p);
            }
        }
        let independent = linalg::rank(&kept) == kept.len();
        Ok(LinearSet {
            base,
            periods: kept,
            stripped,
            independent,
        })
    }

    /// `L(base)` with no periods.
    pub fn point(base: Vec<i64>) -> Self {
        LinearSet {
            base,
            periods: Vec::new(),
            stripped: Vec::new(),
            independent: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &[i64] {
        &self.base
    }

    pub fn periods(&self) -> &[Vec<i64>] {
        &self.periods
    }

    pub fn stripped(&self) -> &[Vec<i64>] {
        &self.stripped
    }

    /// Periods linearly independent over the rationals.
    pub fn has_independent_periods(&self) -> bool {
        self.independent
    }

    pub fn count_representations(&self, v: &[i64], budget: u64) -> Result<u64, SemilinearError> {
        self.count_representations_with(
            v,
            SearchOptions {
                budget,
                pruning: true,
            },
        )
    }

    /// Exact number of tuples `n` with `base + sum n_j a_j = v`.
    pub fn count_representations_with(
        &self,
        v: &[i64],
        opts: SearchOptions,
    ) -> Result<u64, SemilinearError> {
        check_dim(self.dim(), v)?;
        RepSearch::new(&self.periods, self.dim(), opts, u64::MAX).run(&self.diff(v))
    }

    fn diff(&self, v: &[i64]) -> Vec<i64> {
        v.iter().zip(&self.base).map(|(a, b)| a - b).collect()
    }

    /// Membership; uses an exact linear solve when the periods are independent.
    pub fn contains(&self, v: &[i64]) -> Result<bool, SemilinearError> {
        self.contains_with(v, SearchOptions::default())
    }

    pub fn contains_with(&self, v: &[i64], opts: SearchOptions) -> Result<bool, SemilinearError> {
        check_dim(self.dim(), v)?;
        let d = self.diff(v);
        if self.periods.is_empty() {
            return Ok(d.iter().all(|&x| x == 0));
        }
        if self.independent {
            return Ok(match linalg::express(&self.periods, &d) {
                Some(sol) => sol.iter().all(|q| q.is_integer() && !q.is_negative()),
                None => false,
            });
        }
        Ok(RepSearch::new(&self.periods, self.dim(), opts, 1).run(&d)? >= 1)
    }

    /// `L(self) ⊆ L(other)`, proven by membership of the base and of every
    /// period in the monoid generated by `other`'s periods. `false` means
    /// "not proven", not "not contained".
    pub fn provably_within(&self, other: &LinearSet, opts: SearchOptions) -> Result<bool, SemilinearError> {
        if self.dim() != other.dim() {
            return Ok(false);
        }
        if !other.contains_with(&self.base, opts)? {
            return Ok(false);
        }
        let cone = LinearSet {
            base: vec![0; other.dim()],
            periods: other.periods.clone(),
            stripped: Vec::new(),
            independent: other.independent,
        };
        for p in &self.periods {
            if !other.periods.contains(p) && !cone.contains_with(p, opts)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn enumerate_in_box(&self, lo: &[i64], hi: &[i64]) -> Result<BTreeSet<Vec<i64>>, SemilinearError> {
        check_dim(self.dim(), lo)?;
        check_dim(self.dim(), hi)?;
        let Some(grid) = Grid::new(lo, hi) else {
            return Ok(BTreeSet::new());
        };
        Ok(self.enumerate_on(&grid).into_iter().map(|i| grid.point(i)).collect())
    }

    /// Indices of the grid points that belong to this set, ascending.
    pub(crate) fn enumerate_on(&self, grid: &Grid) -> Vec<usize> {
        if self.periods.is_empty() {
            return grid.index(&self.base).into_iter().collect();
        }
        if self.independent {
            let gens: Vec<&[i64]> = self.periods.iter().map(Vec::as_slice).collect();
            if let Some(w) = linalg::positive_functional(&gens, self.dim()) {
                let mut out = Vec::new();
                let limit: i64 = (0..self.dim())
                    .map(|c| (w[c] * grid.lo[c]).max(w[c] * grid.hi[c]))
                    .sum::<i64>()
                    - dot(&w, &self.base);
                let steps: Vec<i64> = self.periods.iter().map(|p| dot(&w, p)).collect();
                let mut point = self.base.clone();
                self.tuples(0, limit, &steps, &mut point, grid, &mut out);
                out.sort_unstable();
                return out;
            }
        }
        self.closure_on(grid)
    }

    fn tuples(
        &self,
        j: usize,
        room: i64,
        steps: &[i64],
        point: &mut Vec<i64>,
        grid: &Grid,
        out: &mut Vec<usize>,
    ) {
        if room < 0 {
            return;
        }
        if j == self.periods.len() {
            if let Some(i) = grid.index(point) {
                out.push(i);
            }
            return;
        }
        let p = &self.periods[j];
        let mut used = 0;
        let mut room = room;
        while room >= 0 {
            self.tuples(j + 1, room, steps, point, grid, out);
            for (x, d) in point.iter_mut().zip(p) {
                *x += d;
            }
            used += 1;
            room -= steps[j];
        }
        for (x, d) in point.iter_mut().zip(p) {
            *x -= d * used;
        }
    }

    /// Reachability closure from the base inside an enlarged box. Along a
    /// coordinate where all periods share a sign, partial sums are monotone;
    /// along mixed coordinates a Steinitz-type margin of `2 q M` (q mixed
    /// coordinates, M their largest period entry) admits an ordering of the
    /// summands that never leaves the enlarged box.
    fn closure_on(&self, grid: &Grid) -> Vec<usize> {
        let n = self.dim();
        let mixed: Vec<bool> = (0..n)
            .map(|c| {
                self.periods.iter().any(|p| p[c] > 0) && self.periods.iter().any(|p| p[c] < 0)
            })
            .collect();
        let q = mixed.iter().filter(|&&m| m).count() as i64;
        let big = self
            .periods
            .iter()
            .flat_map(|p| p.iter().enumerate().filter(|(c, _)| mixed[*c]).map(|(_, x)| x.abs()))
            .max()
            .unwrap_or(0);
        let margin = 2 * q * big;
        let mut lo = Vec::with_capacity(n);
        let mut hi = Vec::with_capacity(n);
        for c in 0..n {
            let b = self.base[c];
            let (l, h) = if mixed[c] {
                (grid.lo[c].min(b) - margin, grid.hi[c].max(b) + margin)
            } else if self.periods.iter().all(|p| p[c] >= 0) {
                (b, grid.hi[c])
            } else {
                (grid.lo[c], b)
            };
            if l > h {
                return Vec::new();
            }
            lo.push(l);
            hi.push(h);
        }
        let wide = Grid::new(&lo, &hi).expect("nonempty enlarged box");
        let mut seen = vec![false; wide.len()];
        let start = wide.index(&self.base).expect("base inside enlarged box");
        seen[start] = true;
        let mut stack = vec![self.base.clone()];
        let mut out = Vec::new();
        while let Some(x) = stack.pop() {
            if let Some(i) = grid.index(&x) {
                out.push(i);
            }
            for p in &self.periods {
                let y: Vec<i64> = x.iter().zip(p).map(|(a, b)| a + b).collect();
                if let Some(i) = wide.index(&y) {
                    if !seen[i] {
                        seen[i] = true;
                        stack.push(y);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Decides unambiguity: independent periods are unambiguous outright;
    /// otherwise points within `box_radius` of the base are searched for a
    /// second representation, nearest first (l1 distance, then lexicographic).
    pub fn check_unambiguous(&self, box_radius: i64, budget: u64) -> Ambiguity {
        if self.independent {
            return Ambiguity::Unambiguous;
        }
        let lo: Vec<i64> = self.base.iter().map(|b| b - box_radius).collect();
        let hi: Vec<i64> = self.base.iter().map(|b| b + box_radius).collect();
        let Some(grid) = Grid::new(&lo, &hi) else {
            return Ambiguity::Unknown;
        };
        let mut points: Vec<Vec<i64>> = self.enumerate_on(&grid).into_iter().map(|i| grid.point(i)).collect();
        let l1 = |v: &Vec<i64>| -> i64 { v.iter().zip(&self.base).map(|(a, b)| (a - b).abs()).sum() };
        points.sort_by(|a, b| l1(a).cmp(&l1(b)).then_with(|| a.cmp(b)));
        let mut left = budget;
        for v in points {
            let mut search = RepSearch::new(
                &self.periods,
                self.dim(),
                SearchOptions {
                    budget: left,
                    pruning: true,
                },
                2,
            );
            match search.run(&self.diff(&v)) {
                Ok(c) if c >= 2 => return Ambiguity::AmbiguousWitness(v),
                Ok(_) => left = left.saturating_sub(search.nodes),
                Err(_) => return Ambiguity::Unknown,
            }
            if left == 0 {
                return Ambiguity::Unknown;
            }
        }
        Ambiguity::Unknown
    }

    /// Default certification radius: four times the largest coordinate
    /// magnitude among the base and periods.
    pub fn default_radius(&self) -> i64 {
        4 * self
            .periods
            .iter()
            .flatten()
            .chain(&self.base)
            .map(|x| x.abs())
            .max()
            .unwrap_or(0)
            .max(1)
    }
}

struct Suffix {
    functional: Option<Vec<i64>>,
    nonneg: Vec<bool>,
    nonpos: Vec<bool>,
    gcd: Vec<i64>,
}

/// Depth-first search over coefficient tuples in lexicographic order.
struct RepSearch<'a> {
    periods: &'a [Vec<i64>],
    suffix: Vec<Suffix>,
    pruning: bool,
    budget: u64,
    nodes: u64,
    count: u64,
    stop_at: u64,
}

impl<'a> RepSearch<'a> {
    fn new(periods: &'a [Vec<i64>], dim: usize, opts: SearchOptions, stop_at: u64) -> Self {
        let k = periods.len();
        let suffix = (0..=k)
            .map(|j| {
                let tail = &periods[j..];
                let gens: Vec<&[i64]> = tail.iter().map(Vec::as_slice).collect();
                Suffix {
                    functional: linalg::positive_functional(&gens, dim),
                    nonneg: (0..dim).map(|c| tail.iter().all(|p| p[c] >= 0)).collect(),
                    nonpos: (0..dim).map(|c| tail.iter().all(|p| p[c] <= 0)).collect(),
                    gcd: (0..dim).map(|c| tail.iter().fold(0, |g, p| gcd(g, p[c]))).collect(),
                }
            })
            .collect();
        RepSearch {
            periods,
            suffix,
            pruning: opts.pruning,
            budget: opts.budget,
            nodes: 0,
            count: 0,
            stop_at,
        }
    }

    fn run(&mut self, target: &[i64]) -> Result<u64, SemilinearError> {
        if self.pruning && self.periods.len() >= 2 {
            let gens: Vec<&[i64]> = self.periods.iter().map(Vec::as_slice).collect();
            if !linalg::cone_contains(&gens, target) {
                return Ok(0);
            }
        }
        self.go(0, target)?;
        Ok(self.count)
    }

    fn tick(&mut self) -> Result<(), SemilinearError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(SemilinearError::BudgetExceeded(self.budget));
        }
        Ok(())
    }

    fn go(&mut self, j: usize, r: &[i64]) -> Result<(), SemilinearError> {
        self.tick()?;
        let k = self.periods.len();
        if j == k {
            if r.iter().all(|&x| x == 0) {
                self.count += 1;
            }
            return Ok(());
        }
        if self.pruning {
            let s = &self.suffix[j];
            for (c, &x) in r.iter().enumerate() {
                if (s.nonneg[c] && x < 0) || (s.nonpos[c] && x > 0) {
                    return Ok(());
                }
                match s.gcd[c] {
                    0 if x != 0 => return Ok(()),
                    0 => {}
                    g if x % g != 0 => return Ok(()),
                    _ => {}
                }
            }
            if j + 1 == k {
                // r must be an exact nonnegative multiple of the last period
                let p = &self.periods[j];
                let c = p.iter().position(|&x| x != 0).expect("nonzero period");
                if r[c] % p[c] == 0 && r[c] / p[c] >= 0 {
                    let n = r[c] / p[c];
                    if r.iter().zip(p).all(|(a, b)| *a == n * b) {
                        self.count += 1;
                    }
                }
                return Ok(());
            }
            if k - j >= 3 && j > 0 {
                let gens: Vec<&[i64]> = self.periods[j..].iter().map(Vec::as_slice).collect();
                if !linalg::cone_contains(&gens, r) {
                    return Ok(());
                }
            }
        }
        let p = &self.periods[j];
        let mut rr = r.to_vec();
        match self.suffix[j].functional.clone() {
            Some(w) => {
                let wr = dot(&w, r);
                if wr < 0 {
                    return Ok(());
                }
                let max_n = wr / dot(&w, p);
                for _ in 0..=max_n {
                    self.go(j + 1, &rr)?;
                    if self.count >= self.stop_at {
                        return Ok(());
                    }
                    for (x, d) in rr.iter_mut().zip(p) {
                        *x -= d;
                    }
                }
            }
            None => {
                // no pointed bound: walk while the residual stays in the cone,
                // which is monotone in the multiplicity
                let gens: Vec<&[i64]> = self.periods[j..].iter().map(Vec::as_slice).collect();
                while linalg::cone_contains(&gens, &rr) {
                    self.go(j + 1, &rr)?;
                    if self.count >= self.stop_at {
                        return Ok(());
                    }
                    for (x, d) in rr.iter_mut().zip(p) {
                        *x -= d;
                    }
                    self.tick()?;
                }
            }
        }
        Ok(())
    }
}

/// Axis-aligned box of lattice points, indexed in lexicographic order.
#[derive(Clone, Debug)]
pub(crate) struct Grid {
    lo: Vec<i64>,
    hi: Vec<i64>,
    strides: Vec<usize>,
    len: usize,
}

impl Grid {
    pub(crate) fn new(lo: &[i64], hi: &[i64]) -> Option<Grid> {
        if lo.iter().zip(hi).any(|(l, h)| l > h) {
            return None;
        }
        let n = lo.len();
        let mut strides = vec![1usize; n];
        let mut len = 1usize;
        for c in (0..n).rev() {
            strides[c] = len;
            len = len.checked_mul((hi[c] - lo[c] + 1) as usize)?;
        }
        Some(Grid {
            lo: lo.to_vec(),
            hi: hi.to_vec(),
            strides,
            len,
        })
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    pub(crate) fn index(&self, p: &[i64]) -> Option<usize> {
        let mut i = 0;
        for (c, &x) in p.iter().enumerate() {
            if x < self.lo[c] || x > self.hi[c] {
                return None;
            }
            i += (x - self.lo[c]) as usize * self.strides[c];
        }
        Some(i)
    }

    pub(crate) fn point(&self, mut i: usize) -> Vec<i64> {
        let mut p = Vec::with_capacity(self.lo.len());
        for c in 0..self.lo.len() {
            p.push(self.lo[c] + (i / self.strides[c]) as i64);
            i %= self.strides[c];
        }
        p
    }
}

/// A finite union of linear sets of one dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "SemilinearRepr", into = "SemilinearRepr")]
pub struct SemilinearSet {
    dim: usize,
    parts: Vec<LinearSet>,
    certified: bool,
}

#[derive(Serialize, Deserialize)]
struct SemilinearRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    parts: Vec<LinearSet>,
    #[serde(default)]
    certified: bool,
}

impl From<SemilinearRepr> for SemilinearSet {
    // the certified flag is never trusted from input
    fn from(r: SemilinearRepr) -> Self {
        let dim = r.dim.or_else(|| r.parts.first().map(LinearSet::dim)).unwrap_or(0);
        SemilinearSet {
            dim,
            parts: r.parts,
            certified: false,
        }
    }
}

impl From<SemilinearSet> for SemilinearRepr {
    fn from(s: SemilinearSet) -> Self {
        SemilinearRepr {
            dim: s.parts.is_empty().then_some(s.dim),
            parts: s.parts,
            certified: s.certified,
        }
    }
}

impl SemilinearSet {
    pub fn new(dim: usize, parts: Vec<LinearSet>) -> Result<Self, SemilinearError> {
        for p in &parts {
            if p.dim() != dim {
                return Err(SemilinearError::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
        }
        Ok(SemilinearSet {
            dim,
            parts,
            certified: false,
        })
    }

    /// Checks that parts agree on dimension after deserialization.
    pub fn validated(self) -> Result<Self, SemilinearError> {
        SemilinearSet::new(self.dim, self.parts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parts(&self) -> &[LinearSet] {
        &self.parts
    }

    /// Parts are pairwise disjoint and unambiguous, as verified by
    /// [`validate_decomposition`].
    pub fn is_certified(&self) -> bool {
        self.certified
    }

    pub fn member(&self, v: &[i64]) -> Result<bool, SemilinearError> {
        check_dim(self.dim, v)?;
        for p in &self.parts {
            if p.contains(v)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn enumerate_in_box(&self, lo: &[i64], hi: &[i64]) -> Result<BTreeSet<Vec<i64>>, SemilinearError> {
        check_dim(self.dim, lo)?;
        check_dim(self.dim, hi)?;
        let Some(grid) = Grid::new(lo, hi) else {
            return Ok(BTreeSet::new());
        };
        let mut hit = vec![false; grid.len()];
        for p in &self.parts {
            for i in p.enumerate_on(&grid) {
                hit[i] = true;
            }
        }
        Ok(hit
            .iter()
            .enumerate()
            .filter(|(_, &h)| h)
            .map(|(i, _)| grid.point(i))
            .collect())
    }

    fn check_slice_condition(&self, axis: usize) -> Result<(), SemilinearError> {
        if axis >= self.dim {
            return Err(SemilinearError::AxisOutOfRange { axis, dim: self.dim });
        }
        for part in &self.parts {
            if part.base[axis] < 0 {
                return Err(SemilinearError::NegativeBase {
                    axis,
                    base: part.base.clone(),
                });
            }
            if let Some(p) = part.periods.iter().find(|p| p[axis] <= 0) {
                return Err(SemilinearError::SliceNotFinite {
                    axis,
                    period: p.clone(),
                    value: p[axis],
                });
            }
        }
        Ok(())
    }

    /// `out[y]` = number of members whose coordinate `axis` equals `y`,
    /// for `y = 0..=y_max`. Requires every period to be strictly positive on
    /// `axis` so that each slice is finite.
    pub fn slice_counts(&self, axis: usize, y_max: usize) -> Result<Vec<u64>, SemilinearError> {
        self.check_slice_condition(axis)?;
        let y_max = y_max as i64;
        let mut all: HashSet<Vec<i64>> = HashSet::new();
        for part in &self.parts {
            if part.base[axis] > y_max {
                continue;
            }
            let mut seen: HashSet<Vec<i64>> = HashSet::new();
            seen.insert(part.base.clone());
            let mut stack = vec![part.base.clone()];
            while let Some(x) = stack.pop() {
                for p in &part.periods {
                    if x[axis] + p[axis] > y_max {
                        continue;
                    }
                    let y: Vec<i64> = x.iter().zip(p).map(|(a, b)| a + b).collect();
                    if !seen.contains(&y) {
                        seen.insert(y.clone());
                        stack.push(y);
                    }
                }
            }
            all.extend(seen);
        }
        let mut out = vec![0u64; y_max as usize + 1];
        for x in all {
            out[x[axis] as usize] += 1;
        }
        Ok(out)
    }

    /// Default certification box `[-R, R]^n`, `R` four times the largest
    /// coordinate magnitude among bases and periods.
    pub fn default_box(&self) -> (Vec<i64>, Vec<i64>) {
        let r = self.parts.iter().map(LinearSet::default_radius).max().unwrap_or(4);
        (vec![-r; self.dim], vec![r; self.dim])
    }

    pub fn disambiguate(&self, box_radius: i64, budget: u64) -> Result<SemilinearSet, SemilinearError> {
        let lo = vec![-box_radius; self.dim];
        let hi = vec![box_radius; self.dim];
        self.disambiguate_in_box(&lo, &hi, budget)
    }

    /// Greedy disjoint-unambiguous decomposition over a verification box.
    ///
    /// Members of the box are visited in increasing order of a functional
    /// that is positive on all periods (then lexicographically). Each member
    /// not yet covered becomes the base of a new part `L(x; Q)`, where `Q`
    /// is a linearly independent subset of the periods of some original part
    /// containing `x` (so the new part is contained in that original part).
    /// Among candidates disjoint from what is already covered, the largest
    /// rank wins, then the most points covered in the box, then the most
    /// original periods inside the real cone of `Q`.
    pub fn disambiguate_in_box(
        &self,
        lo: &[i64],
        hi: &[i64],
        budget: u64,
    ) -> Result<SemilinearSet, SemilinearError> {
        check_dim(self.dim, lo)?;
        check_dim(self.dim, hi)?;
        let grid = Grid::new(lo, hi).ok_or(SemilinearError::EmptyBox)?;
        if grid.len() as u64 > budget {
            return Err(SemilinearError::BudgetExceeded(budget));
        }
        let part_hits: Vec<Vec<usize>> = self.parts.iter().map(|p| p.enumerate_on(&grid)).collect();
        let mut owners: HashMap<usize, Vec<usize>> = HashMap::new();
        for (j, hits) in part_hits.iter().enumerate() {
            for &i in hits {
                owners.entry(i).or_default().push(j);
            }
        }
        let all_periods: Vec<&[i64]> = self
            .parts
            .iter()
            .flat_map(|p| p.periods.iter().map(Vec::as_slice))
            .collect();
        let order_w = linalg::positive_functional(&all_periods, self.dim).unwrap_or_else(|| vec![0; self.dim]);
        let mut order: Vec<(i64, usize)> = owners.keys().map(|&i| (dot(&order_w, &grid.point(i)), i)).collect();
        order.sort_unstable();

        let mut covered = vec![false; grid.len()];
        let mut chosen: Vec<LinearSet> = Vec::new();
        let mut subset_cache: HashMap<Vec<Vec<i64>>, Vec<Vec<Vec<i64>>>> = HashMap::new();
        for &(_, idx) in &order {
            if covered[idx] {
                continue;
            }
            let x = grid.point(idx);
            let mut candidates: BTreeSet<Vec<Vec<i64>>> = BTreeSet::new();
            let mut pool: BTreeSet<&[i64]> = BTreeSet::new();
            for &j in &owners[&idx] {
                let ps = &self.parts[j].periods;
                pool.extend(ps.iter().map(Vec::as_slice));
                let subsets = subset_cache
                    .entry(ps.clone())
                    .or_insert_with(|| independent_subsets(ps));
                candidates.extend(subsets.iter().cloned());
            }
            let mut by_size: Vec<&Vec<Vec<i64>>> = candidates.iter().collect();
            by_size.sort_by_key(|q| std::cmp::Reverse(q.len()));

            let mut best: Option<(Score, LinearSet, Vec<usize>)> = None;
            for q in by_size {
                if best.as_ref().is_some_and(|(s, _, _)| s.0 > q.len()) {
                    break;
                }
                let blocked = q.iter().any(|p| {
                    let y: Vec<i64> = x.iter().zip(p).map(|(a, b)| a + b).collect();
                    grid.index(&y).is_some_and(|i| covered[i])
                });
                if blocked {
                    continue;
                }
                let cand = LinearSet::new(x.clone(), q.clone())?;
                let hits = cand.enumerate_on(&grid);
                if hits.iter().any(|&i| covered[i]) {
                    continue;
                }
                let in_cone = pool
                    .iter()
                    .filter(|p| match linalg::express(q, p) {
                        Some(sol) => sol.iter().all(|c| !c.is_negative()),
                        None => false,
                    })
                    .count();
                let score = (q.len(), hits.len(), in_cone);
                if best.as_ref().is_none_or(|(s, _, _)| score > *s) {
                    best = Some((score, cand, hits));
                }
            }
            let (_, part, hits) = best.expect("the singleton candidate is always available");
            for i in hits {
                covered[i] = true;
            }
            chosen.push(part);
        }
        let mut result = SemilinearSet::new(self.dim, chosen)?;
        if !validate_decomposition(self, &result, lo, hi, budget)? {
            return Err(SemilinearError::DecompositionNotFound(
                "greedy cover failed verification".into(),
            ));
        }
        result.certified = true;
        Ok(result)
    }

    /// Sets the certified flag if `validate_decomposition` accepts `self`
    /// as a decomposition of `original` over the box.
    pub fn certify_against(
        mut self,
        original: &SemilinearSet,
        lo: &[i64],
        hi: &[i64],
        budget: u64,
    ) -> Result<SemilinearSet, SemilinearError> {
        if validate_decomposition(original, &self, lo, hi, budget)? {
            self.certified = true;
            Ok(self)
        } else {
            Err(SemilinearError::DecompositionNotFound(
                "candidate failed verification".into(),
            ))
        }
    }
}

/// Greedy ranking: (rank, box points covered, original periods in the cone).
type Score = (usize, usize, usize);

/// All linearly independent subsets (including the empty one), each in the
/// order of `periods`.
fn independent_subsets(periods: &[Vec<i64>]) -> Vec<Vec<Vec<i64>>> {
    fn go(periods: &[Vec<i64>], start: usize, cur: &mut Vec<Vec<i64>>, out: &mut Vec<Vec<Vec<i64>>>) {
        out.push(cur.clone());
        for i in start..periods.len() {
            cur.push(periods[i].clone());
            if linalg::rank(cur) == cur.len() {
                go(periods, i + 1, cur, out);
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(periods, 0, &mut Vec::new(), &mut out);
    out
}

/// Box-restricted check that `candidate` is a disjoint unambiguous
/// decomposition of `original`: same members in the box, pairwise disjoint
/// parts there, and exactly one representation for every box point of
/// every part.
pub fn validate_decomposition(
    original: &SemilinearSet,
    candidate: &SemilinearSet,
    lo: &[i64],
    hi: &[i64],
    budget: u64,
) -> Result<bool, SemilinearError> {
    if original.dim != candidate.dim {
        return Err(SemilinearError::DimensionMismatch {
            expected: original.dim,
            got: candidate.dim,
        });
    }
    check_dim(original.dim, lo)?;
    check_dim(original.dim, hi)?;
    let Some(grid) = Grid::new(lo, hi) else {
        return Ok(true);
    };
    let mut want = vec![false; grid.len()];
    for p in &original.parts {
        for i in p.enumerate_on(&grid) {
            want[i] = true;
        }
    }
    let mut have = vec![false; grid.len()];
    let opts = SearchOptions {
        budget,
        pruning: true,
    };
    for part in &candidate.parts {
        for i in part.enumerate_on(&grid) {
            if have[i] || !want[i] {
                return Ok(false);
            }
            have[i] = true;
            let reps = if part.independent {
                1
            } else {
                part.count_representations_with(&grid.point(i), opts)?
            };
            if reps != 1 {
                return Ok(false);
            }
        }
    }
    Ok(want == have)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ls(base: &[i64], periods: &[&[i64]]) -> LinearSet {
        LinearSet::new(base.to_vec(), periods.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    fn a2() -> LinearSet {
        ls(&[2, 2], &[&[2, 0], &[1, 1], &[0, 2]])
    }

    fn set_a() -> SemilinearSet {
        SemilinearSet::new(2, vec![LinearSet::point(vec![0, 0]), a2()]).unwrap()
    }

    #[test]
    fn representation_counts() {
        assert_eq!(a2().count_representations(&[4, 4], 1000).unwrap(), 2);
        assert_eq!(a2().count_representations(&[2, 2], 1000).unwrap(), 1);
        assert_eq!(a2().count_representations(&[3, 2], 1000).unwrap(), 0);
        let l = ls(&[0], &[&[2], &[3]]);
        assert_eq!(l.count_representations(&[6], 1000).unwrap(), 2);
        assert_eq!(l.count_representations(&[1], 1000).unwrap(), 0);
    }

    #[test]
    fn unbounded_representations_hit_budget() {
        let l = ls(&[0], &[&[1], &[-1]]);
        assert_eq!(
            l.count_representations(&[0], 500),
            Err(SemilinearError::BudgetExceeded(500))
        );
        assert!(l.contains(&[7]).unwrap());
    }

    #[test]
    fn strips_zero_and_duplicate_periods() {
        let l = ls(&[0, 0], &[&[1, 0], &[0, 0], &[1, 0]]);
        assert_eq!(l.periods(), &[vec![1, 0]]);
        assert_eq!(l.stripped(), &[vec![0, 0], vec![1, 0]]);
        let json = serde_json::to_string(&l).unwrap();
        let back: LinearSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn membership_in_set_a() {
        let a = set_a();
        assert!(a.member(&[0, 0]).unwrap());
        assert!(!a.member(&[1, 1]).unwrap());
        assert!(a.member(&[4, 4]).unwrap());
        assert!(a.member(&[3, 5]).unwrap());
        assert!(!a.member(&[2, 3]).unwrap());
        assert!(a.member(&[1]).is_err());
    }

    #[test]
    fn box_enumeration() {
        let pts = a2().enumerate_in_box(&[0, 0], &[4, 4]).unwrap();
        let want: BTreeSet<Vec<i64>> = [[2, 2], [2, 4], [4, 2], [4, 4], [3, 3]]
            .iter()
            .map(|p| p.to_vec())
            .collect();
        assert_eq!(pts, want);
        assert_eq!(
            LinearSet::point(vec![0, 0]).enumerate_in_box(&[0, 0], &[4, 4]).unwrap(),
            [vec![0, 0]].into_iter().collect()
        );
        assert!(a2().enumerate_in_box(&[0, 0], &[1, 1]).unwrap().is_empty());
    }

    #[test]
    fn closure_handles_mixed_signs() {
        // reaching (0, 10) needs partial sums outside [-1, 1] x [0, 10] unless
        // the summands are interleaved
        let l = ls(&[0, 0], &[&[3, 1], &[-3, 1]]);
        let pts = l.enumerate_in_box(&[-1, 0], &[1, 10]).unwrap();
        let want: BTreeSet<Vec<i64>> = (0..=5).map(|k| vec![0, 2 * k]).collect();
        assert_eq!(pts, want);
    }

    #[test]
    fn slices() {
        let l = SemilinearSet::new(1, vec![ls(&[0], &[&[2], &[3]])]).unwrap();
        assert_eq!(l.slice_counts(0, 6).unwrap(), vec![1, 0, 1, 1, 1, 1, 1]);
        let l = SemilinearSet::new(3, vec![ls(&[2, 2, 0], &[&[0, 0, 1]])]).unwrap();
        assert_eq!(l.slice_counts(2, 3).unwrap(), vec![1, 1, 1, 1]);
        let bad = SemilinearSet::new(2, vec![ls(&[0, 0], &[&[1, 0]])]).unwrap();
        assert!(matches!(bad.slice_counts(1, 3), Err(SemilinearError::SliceNotFinite { .. })));
        let neg = SemilinearSet::new(1, vec![ls(&[-1], &[&[1]])]).unwrap();
        assert!(matches!(neg.slice_counts(0, 3), Err(SemilinearError::NegativeBase { .. })));
    }

    #[test]
    fn ambiguity_certificates() {
        assert_eq!(ls(&[0, 0], &[&[1, 0], &[0, 1]]).check_unambiguous(8, 10_000), Ambiguity::Unambiguous);
        assert_eq!(a2().check_unambiguous(8, 100_000), Ambiguity::AmbiguousWitness(vec![4, 4]));
        assert_eq!(ls(&[0], &[&[2], &[3]]).check_unambiguous(12, 100_000), Ambiguity::AmbiguousWitness(vec![6]));
        assert_eq!(ls(&[0], &[&[2], &[3]]).check_unambiguous(3, 100_000), Ambiguity::Unknown);
    }

    #[test]
    fn validates_two_part_decomposition() {
        let orig = SemilinearSet::new(2, vec![a2()]).unwrap();
        let good = SemilinearSet::new(
            2,
            vec![ls(&[2, 2], &[&[2, 0], &[0, 2]]), ls(&[3, 3], &[&[2, 0], &[0, 2]])],
        )
        .unwrap();
        assert!(validate_decomposition(&orig, &good, &[0, 0], &[20, 20], 100_000).unwrap());
        let overlapping = SemilinearSet::new(
            2,
            vec![ls(&[2, 2], &[&[2, 0], &[0, 2]]), ls(&[2, 2], &[&[1, 1]])],
        )
        .unwrap();
        assert!(!validate_decomposition(&orig, &overlapping, &[0, 0], &[20, 20], 100_000).unwrap());
        let missing = SemilinearSet::new(2, vec![ls(&[2, 2], &[&[2, 0], &[0, 2]])]).unwrap();
        assert!(!validate_decomposition(&orig, &missing, &[0, 0], &[20, 20], 100_000).unwrap());
    }

    #[test]
    fn disambiguates_a2() {
        let orig = SemilinearSet::new(2, vec![a2()]).unwrap();
        let (lo, hi) = orig.default_box();
        let d = orig.disambiguate_in_box(&lo, &hi, DEFAULT_BOX_BUDGET).unwrap();
        assert!(d.is_certified());
        assert_eq!(
            d.parts(),
            &[ls(&[2, 2], &[&[2, 0], &[0, 2]]), ls(&[3, 3], &[&[2, 0], &[0, 2]])]
        );
    }

    #[test]
    fn disambiguates_numerical_semigroup() {
        let orig = SemilinearSet::new(1, vec![ls(&[0], &[&[2], &[3]])]).unwrap();
        let d = orig.disambiguate(12, DEFAULT_BOX_BUDGET).unwrap();
        assert!(d.is_certified());
        assert!(validate_decomposition(&orig, &d, &[-50], &[50], 100_000).unwrap());
        let expected = SemilinearSet::new(
            1,
            vec![LinearSet::point(vec![0]), ls(&[2], &[&[2]]), ls(&[3], &[&[2]])],
        )
        .unwrap();
        assert_eq!(
            d.enumerate_in_box(&[0], &[50]).unwrap(),
            expected.enumerate_in_box(&[0], &[50]).unwrap()
        );
    }

    #[test]
    fn already_unambiguous_is_kept() {
        let orig = SemilinearSet::new(2, vec![ls(&[0, 0], &[&[1, 0], &[0, 1]])]).unwrap();
        let d = orig.disambiguate(4, DEFAULT_BOX_BUDGET).unwrap();
        assert_eq!(d.parts(), orig.parts());
        assert!(d.is_certified());
    }

    #[test]
    fn certified_flag_not_trusted_from_json() {
        let s: SemilinearSet =
            serde_json::from_str(r#"{"parts":[{"base":[0],"periods":[[1]]}],"certified":true}"#).unwrap();
        assert!(!s.is_certified());
        assert_eq!(s.dim(), 1);
    }
}
