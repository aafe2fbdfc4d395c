//! Finite automata whose transitions output integer vectors.
//!
//! The Parikh image of a run is the sum of its outputs, and the Parikh image
//! of an automaton is the set of Parikh images of its accepting runs
//! (including the empty run when some initial state is final).
//!
//! [`VectorNfa::parikh_image`] computes that set as an explicit semilinear
//! set. For every set `T` of distinct transitions it enumerates the runs
//! that use exactly the transitions of `T`, up to length `|Q| (|T| + 1)`,
//! and attaches the outputs of the simple cycles inside `T` as periods.
//! Any run with support `T` reduces to one of those short runs by deleting
//! simple cycles all of whose transitions occur at least twice (the
//! remaining multiset stays connected and balanced, hence is still a run),
//! and a reduced run decomposes into one simple path plus at most `|T|`
//! simple cycles, which bounds its length. Conversely every cycle of `T`
//! can be spliced into a run with support `T`, since that run visits every
//! state of `T`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::periodic_graph::PeriodicGraph;
use crate::semilinear::{LinearSet, SearchOptions, SemilinearError, SemilinearSet};

/// Cap on simple cycles enumerated by [`VectorNfa::simple_cycles`].
pub const DEFAULT_CYCLE_CAP: usize = 100_000;

/// Cap on transition-count vectors examined by [`VectorNfa::parikh_image`].
pub const DEFAULT_PARIKH_WORK: u64 = 20_000_000;

/// Cap on `(state, vector)` pairs held by [`VectorNfa::run_parikh_oracle`].
pub const DEFAULT_ORACLE_BUDGET: usize = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("state {0} out of range 1..={1}")]
    StateOutOfRange(usize, usize),
    #[error("output has {got} coordinates, expected {expected}")]
    OutputArity { expected: usize, got: usize },
    #[error("automaton needs at least one state and one output coordinate")]
    Degenerate,
    #[error("more than {0} simple cycles")]
    TooManyCycles(usize),
    #[error("{0} distinct transitions is too many for the support enumeration")]
    TooManyTransitions(usize),
    #[error("work budget of {0} exceeded")]
    BudgetExceeded(u64),
    #[error(transparent)]
    Semilinear(#[from] SemilinearError),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub source: usize,
    pub output: Vec<i64>,
    pub target: usize,
}

impl Transition {
    pub fn new(source: usize, output: Vec<i64>, target: usize) -> Self {
        Transition {
            source,
            output,
            target,
        }
    }
}

/// States are numbered `1..=num_states`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorNfa {
    out_dim: usize,
    num_states: usize,
    initial: BTreeSet<usize>,
    #[serde(rename = "final")]
    accepting: BTreeSet<usize>,
    transitions: Vec<Transition>,
}

/// A simple cycle: distinct transitions (indices into
/// [`VectorNfa::distinct_transitions`]) and their summed output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub transitions: Vec<usize>,
    pub output: Vec<i64>,
}

#[derive(Clone, Copy, Debug)]
pub struct ParikhOptions {
    pub cycle_cap: usize,
    pub work_budget: u64,
    pub search: SearchOptions,
}

impl Default for ParikhOptions {
    fn default() -> Self {
        ParikhOptions {
            cycle_cap: DEFAULT_CYCLE_CAP,
            work_budget: DEFAULT_PARIKH_WORK,
            search: SearchOptions::default(),
        }
    }
}

fn add_into(acc: &mut [i64], v: &[i64], times: i64) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b * times;
    }
}

impl VectorNfa {
    pub fn new(
        out_dim: usize,
        num_states: usize,
        initial: impl IntoIterator<Item = usize>,
        accepting: impl IntoIterator<Item = usize>,
        transitions: Vec<Transition>,
    ) -> Result<Self, AutomatonError> {
        if out_dim == 0 || num_states == 0 {
            return Err(AutomatonError::Degenerate);
        }
        let nfa = VectorNfa {
            out_dim,
            num_states,
            initial: initial.into_iter().collect(),
            accepting: accepting.into_iter().collect(),
            transitions,
        };
        nfa.validate()?;
        Ok(nfa)
    }

    /// Re-checks invariants, e.g. after deserialization.
    pub fn validate(&self) -> Result<(), AutomatonError> {
        let check = |s: usize| {
            if s == 0 || s > self.num_states {
                Err(AutomatonError::StateOutOfRange(s, self.num_states))
            } else {
                Ok(())
            }
        };
        for &s in self.initial.iter().chain(&self.accepting) {
            check(s)?;
        }
        for t in &self.transitions {
            check(t.source)?;
            check(t.target)?;
            if t.output.len() != self.out_dim {
                return Err(AutomatonError::OutputArity {
                    expected: self.out_dim,
                    got: t.output.len(),
                });
            }
        }
        Ok(())
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial(&self) -> &BTreeSet<usize> {
        &self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// The transition set with repeats removed, in sorted order.
    pub fn distinct_transitions(&self) -> Vec<Transition> {
        let set: BTreeSet<Transition> = self.transitions.iter().cloned().collect();
        set.into_iter().collect()
    }

    /// Same automaton with an extra output coordinate that is 1 on every
    /// transition, so that the last coordinate of a Parikh vector is the
    /// length of its run.
    pub fn with_length_coordinate(&self) -> VectorNfa {
        VectorNfa {
            out_dim: self.out_dim + 1,
            num_states: self.num_states,
            initial: self.initial.clone(),
            accepting: self.accepting.clone(),
            transitions: self
                .transitions
                .iter()
                .map(|t| {
                    let mut output = t.output.clone();
                    output.push(1);
                    Transition::new(t.source, output, t.target)
                })
                .collect(),
        }
    }

    /// Automaton whose Parikh image is the set of `(x, y)` such that the
    /// cover vertex `x . v_target` is within distance `y` of `0 . v_origin`.
    ///
    /// States are the vertex orbits. Each edge orbit `(s, t, x)` yields
    /// `s -> t` with output `(x, 1)` and `t -> s` with output `(-x, 1)`,
    /// and every state has a self-loop with output `(0, ..., 0, 1)`.
    pub fn coordination(
        g: &PeriodicGraph,
        origin_orbit: usize,
        target_orbit: usize,
    ) -> Result<VectorNfa, AutomatonError> {
        let m = g.num_orbits();
        for o in [origin_orbit, target_orbit] {
            if o == 0 || o > m {
                return Err(AutomatonError::StateOutOfRange(o, m));
            }
        }
        let d = g.dim();
        let mut transitions = Vec::new();
        for e in g.edge_orbits() {
            let mut fwd = e.offset.clone();
            fwd.push(1);
            let mut back: Vec<i64> = e.offset.iter().map(|x| -x).collect();
            back.push(1);
            transitions.push(Transition::new(e.source, fwd, e.target));
            transitions.push(Transition::new(e.target, back, e.source));
        }
        for s in 1..=m {
            let mut idle = vec![0; d];
            idle.push(1);
            transitions.push(Transition::new(s, idle, s));
        }
        VectorNfa::new(d + 1, m, [origin_orbit], [target_orbit], transitions)
    }

    pub fn run_parikh_oracle(&self, max_len: usize) -> Result<BTreeSet<Vec<i64>>, AutomatonError> {
        self.run_parikh_oracle_with_budget(max_len, DEFAULT_ORACLE_BUDGET)
    }

    /// Parikh images of all accepting runs of length at most `max_len`, by
    /// exhaustive forward search over `(state, accumulated output)` pairs.
    /// Two prefixes of equal length reaching the same pair have the same
    /// set of completions, so merging them leaves the result unchanged.
    pub fn run_parikh_oracle_with_budget(
        &self,
        max_len: usize,
        budget: usize,
    ) -> Result<BTreeSet<Vec<i64>>, AutomatonError> {
        let mut layer: BTreeSet<(usize, Vec<i64>)> =
            self.initial.iter().map(|&s| (s, vec![0; self.out_dim])).collect();
        let mut out = BTreeSet::new();
        let mut held = layer.len();
        for step in 0..=max_len {
            for (s, v) in &layer {
                if self.accepting.contains(s) {
                    out.insert(v.clone());
                }
            }
            if step == max_len {
                break;
            }
            let mut next = BTreeSet::new();
            for (s, v) in &layer {
                for t in self.transitions.iter().filter(|t| t.source == *s) {
                    let mut w = v.clone();
                    add_into(&mut w, &t.output, 1);
                    next.insert((t.target, w));
                }
            }
            held += next.len();
            if held > budget {
                return Err(AutomatonError::BudgetExceeded(budget as u64));
            }
            layer = next;
        }
        Ok(out)
    }

    /// Elementary circuits over the distinct transitions. Each circuit is
    /// reported once, rooted at its smallest state; parallel transitions
    /// give distinct circuits.
    pub fn simple_cycles(&self, cap: usize) -> Result<Vec<Cycle>, AutomatonError> {
        let ts = self.distinct_transitions();
        let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, t) in ts.iter().enumerate() {
            by_source.entry(t.source).or_default().push(i);
        }
        let mut out = Vec::new();
        let mut on_path = vec![false; self.num_states + 1];
        let mut path = Vec::new();
        for root in 1..=self.num_states {
            on_path[root] = true;
            self.circuits_from(root, root, &ts, &by_source, &mut on_path, &mut path, &mut out, cap)?;
            on_path[root] = false;
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn circuits_from(
        &self,
        root: usize,
        at: usize,
        ts: &[Transition],
        by_source: &BTreeMap<usize, Vec<usize>>,
        on_path: &mut [bool],
        path: &mut Vec<usize>,
        out: &mut Vec<Cycle>,
        cap: usize,
    ) -> Result<(), AutomatonError> {
        let Some(edges) = by_source.get(&at) else {
            return Ok(());
        };
        for &i in edges {
            let t = &ts[i];
            if t.target == root {
                path.push(i);
                let mut output = vec![0; self.out_dim];
                for &j in path.iter() {
                    add_into(&mut output, &ts[j].output, 1);
                }
                out.push(Cycle {
                    transitions: path.clone(),
                    output,
                });
                path.pop();
                if out.len() > cap {
                    return Err(AutomatonError::TooManyCycles(cap));
                }
            } else if t.target > root && !on_path[t.target] {
                on_path[t.target] = true;
                path.push(i);
                self.circuits_from(root, t.target, ts, by_source, on_path, path, out, cap)?;
                path.pop();
                on_path[t.target] = false;
            }
        }
        Ok(())
    }

    pub fn parikh_image(&self) -> Result<SemilinearSet, AutomatonError> {
        self.parikh_image_with(&ParikhOptions::default())
    }

    pub fn parikh_image_with(&self, opts: &ParikhOptions) -> Result<SemilinearSet, AutomatonError> {
        let ts = self.distinct_transitions();
        let n = ts.len();
        if n > 24 {
            return Err(AutomatonError::TooManyTransitions(n));
        }
        let cycles = self.simple_cycles(opts.cycle_cap)?;
        let cycle_masks: Vec<u64> = cycles
            .iter()
            .map(|c| c.transitions.iter().fold(0u64, |m, &i| m | (1 << i)))
            .collect();

        let mut parts: Vec<LinearSet> = Vec::new();
        if self.initial.iter().any(|s| self.accepting.contains(s)) {
            parts.push(LinearSet::point(vec![0; self.out_dim]));
        }
        let mut work = 0u64;
        for mask in 1u64..(1u64 << n) {
            let support: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            if !self.connected(&ts, &support) {
                continue;
            }
            let inner: Vec<usize> = (0..cycles.len())
                .filter(|&c| cycle_masks[c] & !mask == 0)
                .collect();
            let periods: Vec<Vec<i64>> = inner.iter().map(|&c| cycles[c].output.clone()).collect();
            let bound = self.num_states * (support.len() + 1);
            let mut bases = BTreeSet::new();
            let mut counts = vec![1i64; support.len()];
            self.count_vectors(
                &ts,
                &support,
                &inner.iter().map(|&c| &cycles[c]).collect::<Vec<_>>(),
                0,
                bound - support.len(),
                &mut counts,
                &mut bases,
                &mut work,
                opts.work_budget,
            )?;
            if bases.is_empty() {
                continue;
            }
            let template = LinearSet::new(vec![0; self.out_dim], periods)?;
            let mut kept: Vec<LinearSet> = Vec::new();
            for b in bases {
                let cand = LinearSet::new(b, template.periods().to_vec())?;
                let mut covered = false;
                for k in &kept {
                    if k.contains_with(cand.base(), opts.search)? {
                        covered = true;
                        break;
                    }
                }
                if covered {
                    continue;
                }
                let mut keep = Vec::with_capacity(kept.len());
                for k in kept {
                    if !cand.contains_with(k.base(), opts.search)? {
                        keep.push(k);
                    }
                }
                kept = keep;
                kept.push(cand);
            }
            parts.extend(kept);
        }
        Ok(SemilinearSet::new(self.out_dim, prune_contained(parts, opts.search)?)?)
    }

    /// Whether the transitions of `support` form one weakly connected piece.
    fn connected(&self, ts: &[Transition], support: &[usize]) -> bool {
        let mut parent: Vec<usize> = (0..=self.num_states).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for &i in support {
            let a = find(&mut parent, ts[i].source);
            let b = find(&mut parent, ts[i].target);
            parent[a] = b;
        }
        let root = find(&mut parent, ts[support[0]].source);
        support.iter().all(|&i| find(&mut parent, ts[i].source) == root)
    }

    /// Enumerates multiplicity vectors over `support` (each at least 1,
    /// `extra` spare units) and records the output of every one that is the
    /// transition multiset of an accepting run. Vectors in which some simple
    /// cycle occurs twice over are skipped: their output is the output of a
    /// shorter enumerated vector plus that cycle.
    #[allow(clippy::too_many_arguments)]
    fn count_vectors(
        &self,
        ts: &[Transition],
        support: &[usize],
        inner: &[&Cycle],
        pos: usize,
        extra: usize,
        counts: &mut Vec<i64>,
        bases: &mut BTreeSet<Vec<i64>>,
        work: &mut u64,
        budget: u64,
    ) -> Result<(), AutomatonError> {
        if pos == support.len() {
            *work += 1;
            if *work > budget {
                return Err(AutomatonError::BudgetExceeded(budget));
            }
            let reducible = inner.iter().any(|c| {
                c.transitions.iter().all(|t| {
                    let k = support.binary_search(t).expect("cycle inside support");
                    counts[k] >= 2
                })
            });
            if reducible || !self.balanced(ts, support, counts) {
                return Ok(());
            }
            let mut out = vec![0; self.out_dim];
            for (k, &i) in support.iter().enumerate() {
                add_into(&mut out, &ts[i].output, counts[k]);
            }
            bases.insert(out);
            return Ok(());
        }
        for add in 0..=extra {
            counts[pos] = 1 + add as i64;
            self.count_vectors(ts, support, inner, pos + 1, extra - add, counts, bases, work, budget)?;
        }
        counts[pos] = 1;
        Ok(())
    }

    /// Euler condition: out-degree minus in-degree is `e_i - e_f` for some
    /// initial `i` and final `f` (zero when `i = f`).
    fn balanced(&self, ts: &[Transition], support: &[usize], counts: &[i64]) -> bool {
        let mut net = vec![0i64; self.num_states + 1];
        for (k, &i) in support.iter().enumerate() {
            net[ts[i].source] += counts[k];
            net[ts[i].target] -= counts[k];
        }
        let touched = |s: usize| support.iter().any(|&i| ts[i].source == s || ts[i].target == s);
        let plus: Vec<usize> = (1..=self.num_states).filter(|&s| net[s] > 0).collect();
        let minus: Vec<usize> = (1..=self.num_states).filter(|&s| net[s] < 0).collect();
        match (plus.as_slice(), minus.as_slice()) {
            ([], []) => self
                .initial
                .iter()
                .any(|&s| self.accepting.contains(&s) && touched(s)),
            ([i], [f]) => {
                net[*i] == 1 && net[*f] == -1 && self.initial.contains(i) && self.accepting.contains(f)
            }
            _ => false,
        }
    }
}

/// Drops parts provably contained in another part: the kept part has every
/// period of the dropped one and contains its base.
fn prune_contained(mut parts: Vec<LinearSet>, opts: SearchOptions) -> Result<Vec<LinearSet>, SemilinearError> {
    parts.sort_by(|a, b| {
        b.periods()
            .len()
            .cmp(&a.periods().len())
            .then_with(|| a.base().cmp(b.base()))
            .then_with(|| a.periods().cmp(b.periods()))
    });
    parts.dedup();
    let within = |small: &LinearSet, big: &LinearSet| -> Result<bool, SemilinearError> {
        if !small.periods().iter().all(|p| big.periods().contains(p)) {
            return Ok(false);
        }
        big.contains_with(small.base(), opts)
    };
    let mut kept: Vec<LinearSet> = Vec::new();
    for part in parts {
        let mut covered = false;
        for k in &kept {
            if within(&part, k)? {
                covered = true;
                break;
            }
        }
        if covered {
            continue;
        }
        let mut keep = Vec::with_capacity(kept.len() + 1);
        for k in kept {
            if !within(&k, &part)? {
                keep.push(k);
            }
        }
        kept = keep;
        kept.push(part);
    }
    Ok(kept)
}

/// Small automata exercised by the oracle-equivalence checks: at most three
/// states, at most eight transitions, output dimension at most three.
pub fn test_automata() -> Vec<(&'static str, VectorNfa)> {
    use crate::periodic_graph::nets;
    let t = |s: usize, o: &[i64], d: usize| Transition::new(s, o.to_vec(), d);
    let mut v = vec![
        (
            "loop",
            VectorNfa::new(2, 1, [1], [1], vec![t(1, &[0, 1], 1)]).unwrap(),
        ),
        (
            "single_step",
            VectorNfa::new(3, 2, [1], [2], vec![t(1, &[1, 0, 1], 2)]).unwrap(),
        ),
        (
            "two_state_cycle",
            VectorNfa::new(
                2,
                2,
                [1],
                [2],
                vec![t(1, &[1, 0], 2), t(2, &[0, 1], 1), t(2, &[1, 1], 2)],
            )
            .unwrap(),
        ),
        (
            "parallel_edges",
            VectorNfa::new(
                2,
                2,
                [1],
                [1, 2],
                vec![t(1, &[1, 0], 2), t(1, &[2, 0], 2), t(2, &[0, 1], 1), t(2, &[0, 3], 1)],
            )
            .unwrap(),
        ),
        (
            "three_ring",
            VectorNfa::new(
                2,
                3,
                [1],
                [3],
                vec![
                    t(1, &[1, 0], 2),
                    t(2, &[0, 1], 3),
                    t(3, &[-1, 0], 1),
                    t(2, &[2, -1], 2),
                    t(1, &[0, 0], 3),
                ],
            )
            .unwrap(),
        ),
        (
            "multi_initial",
            VectorNfa::new(
                1,
                3,
                [1, 2],
                [2, 3],
                vec![t(1, &[2], 3), t(2, &[3], 3), t(3, &[5], 3), t(3, &[1], 2)],
            )
            .unwrap(),
        ),
        (
            "dead_end",
            VectorNfa::new(2, 3, [1], [2], vec![t(1, &[1, 1], 3), t(3, &[1, 0], 3), t(1, &[0, 2], 1)])
                .unwrap(),
        ),
    ];
    v.push((
        "square_coordination",
        VectorNfa::coordination(&nets::square(), 1, 1).unwrap(),
    ));
    v.push((
        "honeycomb_coordination",
        VectorNfa::coordination(&nets::honeycomb(), 1, 2).unwrap(),
    ));
    v.push((
        "ladder_coordination",
        VectorNfa::coordination(&nets::ladder(), 1, 2).unwrap(),
    ));
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periodic_graph::nets;

    fn set(vs: &[&[i64]]) -> BTreeSet<Vec<i64>> {
        vs.iter().map(|v| v.to_vec()).collect()
    }

    #[test]
    fn square_coordination_automaton() {
        let a = VectorNfa::coordination(&nets::square(), 1, 1).unwrap();
        assert_eq!(a.num_states(), 1);
        assert_eq!(a.out_dim(), 3);
        let outs: BTreeSet<Vec<i64>> = a.transitions().iter().map(|t| t.output.clone()).collect();
        assert_eq!(
            outs,
            set(&[&[1, 0, 1], &[-1, 0, 1], &[0, 1, 1], &[0, -1, 1], &[0, 0, 1]])
        );
        assert_eq!(a.transitions().len(), 5);
        assert_eq!(a.initial(), &[1].into());
        assert_eq!(a.accepting(), &[1].into());
    }

    #[test]
    fn honeycomb_coordination_automaton() {
        let a = VectorNfa::coordination(&nets::honeycomb(), 1, 2).unwrap();
        assert_eq!(a.num_states(), 2);
        assert_eq!(a.transitions().len(), 8);
        assert_eq!(a.initial(), &[1].into());
        assert_eq!(a.accepting(), &[2].into());
        assert!(VectorNfa::coordination(&nets::honeycomb(), 1, 3).is_err());
    }

    #[test]
    fn edgeless_coordination_automaton() {
        let a = VectorNfa::coordination(&nets::edgeless(), 1, 1).unwrap();
        assert_eq!(a.transitions(), &[Transition::new(1, vec![0, 0, 1], 1)]);
    }

    #[test]
    fn oracle_small_cases() {
        let a = VectorNfa::new(2, 1, [1], [1], vec![Transition::new(1, vec![0, 1], 1)]).unwrap();
        assert_eq!(a.run_parikh_oracle(2).unwrap(), set(&[&[0, 0], &[0, 1], &[0, 2]]));
        let b = VectorNfa::new(3, 2, [1], [2], vec![Transition::new(1, vec![1, 0, 1], 2)]).unwrap();
        assert_eq!(b.run_parikh_oracle(3).unwrap(), set(&[&[1, 0, 1]]));
    }

    #[test]
    fn oracle_square_lattice() {
        let a = VectorNfa::coordination(&nets::square(), 1, 1).unwrap();
        let got = a.run_parikh_oracle(2).unwrap();
        let mut want = BTreeSet::new();
        for x in -2i64..=2 {
            for y in -2i64..=2 {
                for z in 0..=2 {
                    if x.abs() + y.abs() <= z {
                        want.insert(vec![x, y, z]);
                    }
                }
            }
        }
        assert_eq!(got, want);
    }

    #[test]
    fn cycles_of_honeycomb() {
        let a = VectorNfa::coordination(&nets::honeycomb(), 1, 2).unwrap();
        let cs = a.simple_cycles(DEFAULT_CYCLE_CAP).unwrap();
        // 9 two-cycles through both states plus the two idle loops
        assert_eq!(cs.len(), 11);
        assert!(cs.iter().all(|c| *c.output.last().unwrap() >= 1));
        assert_eq!(a.simple_cycles(3), Err(AutomatonError::TooManyCycles(3)));
    }

    #[test]
    fn parikh_of_trivial_automata() {
        let a = VectorNfa::new(2, 1, [1], [1], vec![Transition::new(1, vec![0, 1], 1)]).unwrap();
        let s = a.parikh_image().unwrap();
        let want = LinearSet::new(vec![0, 0], vec![vec![0, 1]]).unwrap();
        assert_eq!(
            s.enumerate_in_box(&[-3, -3], &[3, 3]).unwrap(),
            want.enumerate_in_box(&[-3, -3], &[3, 3]).unwrap()
        );
        let b = VectorNfa::new(2, 2, [1], [2], vec![Transition::new(1, vec![1, 1], 2)]).unwrap();
        let s = b.parikh_image().unwrap();
        assert_eq!(s.parts(), &[LinearSet::point(vec![1, 1])]);
    }

    #[test]
    fn parikh_square_slices() {
        let a = VectorNfa::coordination(&nets::square(), 1, 1).unwrap();
        let s = a.parikh_image().unwrap();
        assert_eq!(s.slice_counts(2, 6).unwrap(), vec![1, 5, 13, 25, 41, 61, 85]);
        assert!(s.parts().iter().flat_map(|p| p.periods()).all(|p| p[2] >= 1));
    }

    #[test]
    fn rejects_bad_automata() {
        assert_eq!(
            VectorNfa::new(2, 1, [2], [1], vec![]),
            Err(AutomatonError::StateOutOfRange(2, 1))
        );
        assert!(matches!(
            VectorNfa::new(2, 1, [1], [1], vec![Transition::new(1, vec![1], 1)]),
            Err(AutomatonError::OutputArity { .. })
        ));
    }

    #[test]
    fn json_uses_final_key() {
        let a = VectorNfa::new(1, 1, [1], [1], vec![Transition::new(1, vec![1], 1)]).unwrap();
        let j = serde_json::to_value(&a).unwrap();
        assert_eq!(j["final"], serde_json::json!([1]));
        let back: VectorNfa = serde_json::from_value(j).unwrap();
        assert_eq!(back, a);
    }
}
