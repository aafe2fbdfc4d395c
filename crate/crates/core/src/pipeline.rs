//! End-to-end coordination generating functions.
//!
//! Two independent routes lead from a periodic graph to the generating
//! function of its coordination sequence:
//!
//! * **symbolic**: for every target orbit build the coordination automaton,
//!   take its Parikh image, split it into disjoint unambiguous parts, sum
//!   the slice formulas of the parts on the length axis, add the orbits up
//!   and multiply by `1 - z` (cumulative counts to exact counts);
//! * **fit**: breadth-first search on the cover followed by an exact
//!   recurrence fit whose last terms are predicted rather than fitted.
//!
//! Both are compared against the BFS sequence and against each other.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automaton::{AutomatonError, VectorNfa};
use crate::genfunc::{self, GfError, RationalGF};
use crate::periodic_graph::{CoordinationSequence, GraphError, PeriodicGraph};
use crate::semilinear::{self, SemilinearError, SemilinearSet};

pub const DEFAULT_DEPTH: usize = 40;
pub const DEFAULT_FIT_WINDOW: usize = 5;
/// Run length up to which the brute-force Parikh oracle is consulted.
pub const ORACLE_DEPTH: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Symbolic,
    Fit,
    Both,
}

impl Method {
    fn symbolic(self) -> bool {
        matches!(self, Method::Symbolic | Method::Both)
    }

    fn fit(self) -> bool {
        matches!(self, Method::Fit | Method::Both)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolicStatus {
    Ok,
    DecompositionFailed,
    BudgetExceeded,
    /// The symbolic path was not requested.
    Skipped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitStatus {
    Ok,
    NoFit,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agreement {
    pub pair: String,
    pub ok: bool,
    pub first_mismatch: Option<usize>,
    /// Coefficients `0..=depth` were compared.
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub graph_id: String,
    pub origin: usize,
    pub sequence: CoordinationSequence,
    pub gf_fit: Option<RationalGF>,
    pub fit_status: FitStatus,
    pub gf_symbolic: Option<RationalGF>,
    pub symbolic_status: SymbolicStatus,
    pub agreement: Vec<Agreement>,
}

impl PipelineReport {
    pub fn all_agree(&self) -> bool {
        self.agreement.iter().all(|a| a.ok)
    }

    /// Some generating function was produced.
    pub fn has_gf(&self) -> bool {
        self.gf_fit.is_some() || self.gf_symbolic.is_some()
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub graph_id: String,
    pub method: Method,
    pub depth: usize,
    pub fit_window: usize,
    /// Largest denominator degree the fit may use; `None` uses as much as
    /// the prefix allows.
    pub max_order: Option<usize>,
    /// Height of the slab in which decompositions are built and checked;
    /// `None` picks one from the Parikh image.
    pub slab_height: Option<i64>,
    /// Point budget for decomposition boxes and representation searches.
    pub box_budget: u64,
    /// Test hook: applied to the symbolic GF before comparison.
    pub tamper_symbolic: Option<fn(&RationalGF) -> RationalGF>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            graph_id: String::new(),
            method: Method::Both,
            depth: DEFAULT_DEPTH,
            fit_window: DEFAULT_FIT_WINDOW,
            max_order: None,
            slab_height: None,
            box_budget: semilinear::DEFAULT_BOX_BUDGET,
            tamper_symbolic: None,
        }
    }
}

#[derive(Debug, Error)]
enum SymbolicFailure {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Semilinear(#[from] SemilinearError),
    #[error(transparent)]
    Gf(#[from] GfError),
}

impl SymbolicFailure {
    fn status(&self) -> SymbolicStatus {
        match self {
            SymbolicFailure::Automaton(AutomatonError::BudgetExceeded(_))
            | SymbolicFailure::Automaton(AutomatonError::TooManyCycles(_))
            | SymbolicFailure::Automaton(AutomatonError::TooManyTransitions(_))
            | SymbolicFailure::Automaton(AutomatonError::Semilinear(SemilinearError::BudgetExceeded(_)))
            | SymbolicFailure::Semilinear(SemilinearError::BudgetExceeded(_)) => SymbolicStatus::BudgetExceeded,
            _ => SymbolicStatus::DecompositionFailed,
        }
    }
}

/// Box `x in [-yM, yM]^d, y in [0, Y]` holding every point of the
/// coordination Parikh image with length coordinate at most `Y`, where `M`
/// bounds the offsets of the edge orbits.
fn slab(g: &PeriodicGraph, height: i64) -> (Vec<i64>, Vec<i64>) {
    let m = g
        .edge_orbits()
        .iter()
        .flat_map(|e| e.offset.iter().map(|x| x.abs()))
        .max()
        .unwrap_or(0);
    let mut lo = vec![-height * m; g.dim()];
    let mut hi = vec![height * m; g.dim()];
    lo.push(0);
    hi.push(height);
    (lo, hi)
}

/// Disjoint unambiguous decomposition of `s`, built in a slab and checked
/// again in a slab twice as high. When the larger check fails the build is
/// retried there.
fn decompose(
    g: &PeriodicGraph,
    s: &SemilinearSet,
    opts: &PipelineOptions,
) -> Result<SemilinearSet, SymbolicFailure> {
    let axis = g.dim();
    let reach = s
        .parts()
        .iter()
        .map(|p| p.base()[axis] + p.periods().iter().map(|q| q[axis]).max().unwrap_or(0))
        .max()
        .unwrap_or(0);
    let mut height = opts.slab_height.unwrap_or((2 * reach).max(6));
    for _ in 0..3 {
        let (lo, hi) = slab(g, height);
        let d = s.disambiguate_in_box(&lo, &hi, opts.box_budget)?;
        let (lo2, hi2) = slab(g, 2 * height);
        if semilinear::validate_decomposition(s, &d, &lo2, &hi2, opts.box_budget)? {
            return Ok(d);
        }
        height *= 2;
    }
    Err(SemilinearError::DecompositionNotFound("decomposition does not extend beyond its slab".into()).into())
}

fn symbolic_gf(g: &PeriodicGraph, origin: usize, opts: &PipelineOptions) -> Result<RationalGF, SymbolicFailure> {
    let mut cumulative = RationalGF::zero();
    for target in 1..=g.num_orbits() {
        let nfa = VectorNfa::coordination(g, origin, target)?;
        let image = nfa.parikh_image()?;
        let d = decompose(g, &image, opts)?;
        cumulative = &cumulative + &genfunc::gf_semilinear_slice(&d, g.dim())?;
    }
    Ok(cumulative.cumulative_to_exact())
}

fn compare(pair: &str, a: &[num_bigint::BigInt], b: &[num_bigint::BigInt]) -> Agreement {
    let n = a.len().min(b.len());
    let first_mismatch = (0..n).find(|&k| a[k] != b[k]);
    Agreement {
        pair: pair.to_string(),
        ok: first_mismatch.is_none(),
        first_mismatch,
        depth: n.saturating_sub(1),
    }
}

pub fn pipeline_coordination_gf(
    g: &PeriodicGraph,
    origin_orbit: usize,
    opts: &PipelineOptions,
) -> Result<PipelineReport, PipelineError> {
    let sequence = g.bfs_coordination(origin_orbit, opts.depth)?;
    let bfs: Vec<num_bigint::BigInt> = sequence.values().iter().map(|&v| v.into()).collect();

    let (gf_fit, fit_status) = if opts.method.fit() {
        let room = bfs.len().saturating_sub(opts.fit_window) / 2;
        let order = opts.max_order.unwrap_or(room);
        match genfunc::fit_rational(&bfs, order, opts.fit_window) {
            Ok(q) => (Some(q), FitStatus::Ok),
            Err(_) => (None, FitStatus::NoFit),
        }
    } else {
        (None, FitStatus::Skipped)
    };

    let (gf_symbolic, symbolic_status) = if opts.method.symbolic() {
        match symbolic_gf(g, origin_orbit, opts) {
            Ok(q) => {
                let q = match opts.tamper_symbolic {
                    Some(f) => f(&q),
                    None => q,
                };
                (Some(q), SymbolicStatus::Ok)
            }
            Err(e) => (None, e.status()),
        }
    } else {
        (None, SymbolicStatus::Skipped)
    };

    let n = opts.depth;
    let mut agreement = Vec::new();
    let fit_series = gf_fit.as_ref().map(|q| q.series_coeffs(n));
    let sym_series = gf_symbolic.as_ref().map(|q| q.series_coeffs(n));
    if let Some(f) = &fit_series {
        agreement.push(compare("bfs~fit", &bfs, f));
    }
    if let Some(s) = &sym_series {
        agreement.push(compare("bfs~symbolic", &bfs, s));
    }
    if let (Some(f), Some(s)) = (&fit_series, &sym_series) {
        agreement.push(compare("fit~symbolic", f, s));
    }

    Ok(PipelineReport {
        graph_id: opts.graph_id.clone(),
        origin: origin_orbit,
        sequence,
        gf_fit,
        fit_status,
        gf_symbolic,
        symbolic_status,
        agreement,
    })
}

/// Cumulative counts `0..=max_len` over all target orbits, read off the
/// brute-force run enumeration of the coordination automata.
pub fn oracle_cumulative_counts(
    g: &PeriodicGraph,
    origin_orbit: usize,
    max_len: usize,
) -> Result<Vec<u64>, AutomatonError> {
    let mut out = vec![0u64; max_len + 1];
    for target in 1..=g.num_orbits() {
        let nfa = VectorNfa::coordination(g, origin_orbit, target)?;
        for v in nfa.run_parikh_oracle(max_len)? {
            out[*v.last().expect("length coordinate") as usize] += 1;
        }
    }
    Ok(out)
}

/// Both paths plus the run-enumeration oracle at small depth.
pub fn cross_verify(
    g: &PeriodicGraph,
    origin_orbit: usize,
    opts: &PipelineOptions,
) -> Result<PipelineReport, PipelineError> {
    let opts = PipelineOptions {
        method: Method::Both,
        ..opts.clone()
    };
    let mut report = pipeline_coordination_gf(g, origin_orbit, &opts)?;
    let l = opts.depth.min(ORACLE_DEPTH);
    let bfs_cum: Vec<num_bigint::BigInt> = report.sequence.cumulative_counts()[..=l]
        .iter()
        .map(|&v| v.into())
        .collect();
    let entry = match oracle_cumulative_counts(g, origin_orbit, l) {
        Ok(cum) => {
            let cum: Vec<num_bigint::BigInt> = cum.into_iter().map(Into::into).collect();
            compare("bfs~oracle", &bfs_cum, &cum)
        }
        Err(_) => Agreement {
            pair: "bfs~oracle".into(),
            ok: false,
            first_mismatch: Some(0),
            depth: l,
        },
    };
    report.agreement.push(entry);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periodic_graph::nets;

    fn opts(method: Method, depth: usize) -> PipelineOptions {
        PipelineOptions {
            method,
            depth,
            ..Default::default()
        }
    }

    #[test]
    fn square_both_paths() {
        let r = pipeline_coordination_gf(&nets::square(), 1, &opts(Method::Both, 40)).unwrap();
        let want = RationalGF::from_i64s(&[1, 2, 1], &[1, -2, 1]).unwrap();
        assert_eq!(r.gf_fit.as_ref(), Some(&want));
        assert_eq!(r.gf_symbolic.as_ref(), Some(&want));
        assert_eq!(r.symbolic_status, SymbolicStatus::Ok);
        assert!(r.all_agree());
        assert_eq!(r.agreement.len(), 3);
    }

    #[test]
    fn honeycomb_fit() {
        let r = pipeline_coordination_gf(&nets::honeycomb(), 1, &opts(Method::Fit, 40)).unwrap();
        assert_eq!(r.gf_fit, Some(RationalGF::from_i64s(&[1, 1, 1], &[1, -2, 1]).unwrap()));
        assert_eq!(r.symbolic_status, SymbolicStatus::Skipped);
        assert!(r.all_agree());
    }

    #[test]
    fn edgeless_is_one() {
        let r = pipeline_coordination_gf(&nets::edgeless(), 1, &opts(Method::Both, 10)).unwrap();
        assert_eq!(r.gf_fit, Some(RationalGF::one()));
        assert_eq!(r.gf_symbolic, Some(RationalGF::one()));
    }

    #[test]
    fn tampered_symbolic_is_flagged() {
        let mut o = opts(Method::Both, 20);
        o.tamper_symbolic = Some(|q| q + &RationalGF::polynomial(crate::poly::ZPoly::monomial(1.into(), 7)));
        let r = cross_verify(&nets::square(), 1, &o).unwrap();
        let bad: Vec<_> = r.agreement.iter().filter(|a| !a.ok).collect();
        assert_eq!(bad.len(), 2);
        assert!(bad.iter().all(|a| a.first_mismatch == Some(7)));
    }

    #[test]
    fn oracle_matches_bfs_cumulative() {
        for (_, g) in nets::corpus() {
            let bfs = g.bfs_coordination(1, 6).unwrap().cumulative_counts();
            assert_eq!(oracle_cumulative_counts(&g, 1, 6).unwrap(), bfs);
        }
    }
}
