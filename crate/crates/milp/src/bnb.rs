//! Branch-and-bound over binary variables.
//!
//! Nodes are LP relaxations solved by the dual simplex, warm started from
//! whatever basis the worker's engine holds (bound changes keep the basis
//! dual feasible). Branching picks the most fractional binary, ties going to
//! the lowest variable id. Node selection is best-bound with depth-first
//! plunging: after branching, the child on the rounding side of the
//! fractional value is processed next and its sibling goes to the open-node
//! heap.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use crate::error::SolverError;
use crate::lp::{prepare, DualSimplex, EngineStatus, Prepared, Tolerances};
use crate::model::MilpModel;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Relative gap `|obj - bound| / max(1, |obj|)` at which the search stops.
    pub gap_tolerance: f64,
    pub integrality_tolerance: f64,
    pub feasibility_tolerance: f64,
    pub node_limit: Option<usize>,
    pub time_limit: Option<Duration>,
    pub workers: usize,
    pub branching: Branching,
}

/// How the branching variable is chosen among fractional binaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branching {
    /// Value closest to 0.5, lowest variable id on ties.
    #[default]
    MostFractional,
    /// Pseudo-costs learned from earlier branchings, initialized by strong
    /// branching on candidates without history. Pays off on models with
    /// many binaries whose value does not move the bound.
    Reliability,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            gap_tolerance: 1e-6,
            integrality_tolerance: 1e-6,
            feasibility_tolerance: 1e-7,
            node_limit: None,
            time_limit: None,
            workers: 1,
            branching: Branching::MostFractional,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<(), SolverError> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.gap_tolerance)
            || !positive(self.integrality_tolerance)
            || !positive(self.feasibility_tolerance)
        {
            return Err(SolverError::Options("tolerances must be positive and finite".into()));
        }
        if self.integrality_tolerance >= 0.5 {
            return Err(SolverError::Options("integrality tolerance must be below 0.5".into()));
        }
        if self.workers == 0 {
            return Err(SolverError::Options("at least one worker is required".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    Optimal,
    /// An incumbent exists but some subtree could not be resolved numerically.
    Feasible,
    Infeasible,
    Unbounded,
    LimitReached,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    pub status: MilpStatus,
    /// Incumbent, one value per model variable, binaries exactly 0 or 1.
    pub values: Option<Vec<f64>>,
    /// Incumbent objective in the model's sense (constant included).
    pub objective: Option<f64>,
    pub best_bound: f64,
    pub gap: f64,
    pub nodes: usize,
    pub lp_iterations: usize,
    pub wall_time: Duration,
    /// Global bound after each processed node, in the model's sense.
    pub bound_trace: Vec<f64>,
}

impl MilpSolution {
    pub fn relative_gap(objective: f64, bound: f64) -> f64 {
        (objective - bound).abs() / objective.abs().max(1.0)
    }
}

/// Solves `model` with the built-in branch-and-bound.
pub fn solve_milp(model: &MilpModel, options: &SolveOptions) -> Result<MilpSolution, SolverError> {
    model.validate()?;
    options.validate()?;
    Search::new(model, options).run()
}

#[derive(Debug, Clone)]
struct Node {
    id: u64,
    depth: usize,
    /// Lower bound (internal minimization sense) inherited from the parent.
    bound: f64,
    /// (binary position, value) fixings from the root.
    fixings: Vec<(u32, bool)>,
    origin: Option<Origin>,
}

/// The branching that created a node, kept to learn pseudo-costs.
#[derive(Debug, Clone, Copy)]
struct Origin {
    position: u32,
    up: bool,
    /// Distance the branching moved the variable.
    distance: f64,
    parent_objective: f64,
}

/// Bound change per unit of variable movement, [down, up] as (sum, count).
type PseudoCost = [(f64, u32); 2];

const STRONG_CANDIDATES: usize = 8;

struct OpenNode(Node);

impl PartialEq for OpenNode {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for OpenNode {}
impl PartialOrd for OpenNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OpenNode {
    /// Max-heap order: smallest bound first, then smallest id.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .bound
            .total_cmp(&self.0.bound)
            .then_with(|| other.0.id.cmp(&self.0.id))
    }
}

/// Per-worker LP engine with the binary fixings currently applied.
#[derive(Clone)]
struct NodeSolver {
    engine: DualSimplex,
    applied: Vec<Option<bool>>,
}

enum NodeOutcome {
    Infeasible,
    Failed,
    Unbounded,
    Solved { objective: f64, values: Vec<f64> },
}

struct Search<'a> {
    options: &'a SolveOptions,
    prepared: Prepared,
    binaries: Vec<usize>,
    root_bounds: Vec<(f64, f64)>,
    tolerances: Tolerances,
    start: Instant,
}

struct Incumbent {
    objective: f64,
    values: Vec<f64>,
}

struct Shared {
    heap: BinaryHeap<OpenNode>,
    incumbent: Option<Incumbent>,
    nodes: usize,
    lp_iterations: usize,
    next_id: u64,
    in_flight: Vec<Option<f64>>,
    active: usize,
    failures: usize,
    limit_hit: bool,
    unbounded: bool,
    done: bool,
    last_bound: f64,
    bound_trace: Vec<f64>,
    pseudo: Vec<PseudoCost>,
}

impl<'a> Search<'a> {
    fn new(model: &'a MilpModel, options: &'a SolveOptions) -> Self {
        let prepared = prepare(model, true);
        let binaries: Vec<usize> = model.binaries().map(|v| v.0).collect();
        let root_bounds = binaries
            .iter()
            .map(|&j| (prepared.lower[j], prepared.upper[j]))
            .collect();
        Search {
            options,
            binaries,
            root_bounds,
            tolerances: Tolerances {
                primal: options.feasibility_tolerance,
                ..Tolerances::default()
            },
            prepared,
            start: Instant::now(),
        }
    }

    fn fresh_solver(&self) -> NodeSolver {
        NodeSolver {
            engine: DualSimplex::new(
                self.prepared.data.clone(),
                self.prepared.lower.clone(),
                self.prepared.upper.clone(),
                self.tolerances,
            ),
            applied: vec![None; self.binaries.len()],
        }
    }

    /// Reported (model-sense) value of an internal minimization value.
    fn report(&self, internal: f64) -> f64 {
        self.prepared.sign * internal + self.prepared.constant
    }

    fn cutoff_reached(&self, bound: f64, incumbent: Option<&Incumbent>) -> bool {
        match incumbent {
            Some(inc) => {
                let scale = self.report(inc.objective).abs().max(1.0);
                bound >= inc.objective - self.options.gap_tolerance * scale
            }
            None => false,
        }
    }

    fn apply(&self, solver: &mut NodeSolver, fixings: &[(u32, bool)]) {
        let mut target: Vec<Option<bool>> = vec![None; self.binaries.len()];
        for &(k, v) in fixings {
            target[k as usize] = Some(v);
        }
        for (k, want) in target.into_iter().enumerate() {
            if solver.applied[k] != want {
                let j = self.binaries[k];
                let (lo, hi) = match want {
                    Some(true) => (1.0, 1.0),
                    Some(false) => (0.0, 0.0),
                    None => self.root_bounds[k],
                };
                solver.engine.set_bounds(j, lo, hi);
                solver.applied[k] = want;
            }
        }
    }

    fn solve_node(&self, solver: &mut NodeSolver, fixings: &[(u32, bool)]) -> (NodeOutcome, usize) {
        // A fixing outside the root bounds of the binary is infeasible.
        for &(k, v) in fixings {
            let (lo, hi) = self.root_bounds[k as usize];
            let val = if v { 1.0 } else { 0.0 };
            if val < lo - 1e-12 || val > hi + 1e-12 {
                return (NodeOutcome::Infeasible, 0);
            }
        }
        self.apply(solver, fixings);
        let before = solver.engine.iterations;
        let mut status = solver.engine.solve();
        let mut iterations = solver.engine.iterations - before;
        if matches!(status, EngineStatus::IterationLimit | EngineStatus::Singular) {
            log::debug!("node LP failed ({status:?}); retrying from a slack basis");
            *solver = self.fresh_solver();
            self.apply(solver, fixings);
            status = solver.engine.solve();
            iterations += solver.engine.iterations;
        }
        let outcome = match status {
            EngineStatus::Optimal => NodeOutcome::Solved {
                objective: solver.engine.objective(),
                values: solver.engine.values().to_vec(),
            },
            EngineStatus::Infeasible => NodeOutcome::Infeasible,
            EngineStatus::Unbounded => NodeOutcome::Unbounded,
            EngineStatus::IterationLimit | EngineStatus::Singular => NodeOutcome::Failed,
        };
        (outcome, iterations)
    }

    /// Most fractional binary (position in `binaries`), lowest id on ties.
    fn branching_candidate(&self, values: &[f64]) -> Option<(u32, f64)> {
        let mut best: Option<(u32, f64, f64)> = None;
        for (k, &j) in self.binaries.iter().enumerate() {
            let x = values[j];
            let frac = (x - x.round()).abs();
            if frac <= self.options.integrality_tolerance {
                continue;
            }
            let score = (x - x.floor() - 0.5).abs();
            match best {
                Some((_, _, s)) if score >= s => {}
                _ => best = Some((k as u32, x, score)),
            }
        }
        best.map(|(k, x, _)| (k, x))
    }

    /// Solves the current node with one more binary fixed, on a copy of the
    /// engine. `None` when that child is infeasible.
    fn probe(&self, solver: &NodeSolver, k: u32, value: bool) -> (Option<f64>, usize) {
        let mut engine = solver.engine.clone();
        let v = if value { 1.0 } else { 0.0 };
        let (lo, hi) = self.root_bounds[k as usize];
        if v < lo || v > hi {
            return (None, 0);
        }
        engine.set_bounds(self.binaries[k as usize], v, v);
        let before = engine.iterations;
        let status = engine.solve();
        let iterations = engine.iterations - before;
        match status {
            EngineStatus::Optimal => (Some(engine.objective()), iterations),
            EngineStatus::Infeasible => (None, iterations),
            // Unknown outcome: report no bound change.
            _ => (Some(f64::NEG_INFINITY), iterations),
        }
    }

    /// Reliability branching: strong branching on fractional binaries
    /// without pseudo-cost history, then the best product score. Returns the
    /// probed child bounds when the chosen variable was strong branched.
    fn reliable_candidate(
        &self,
        shared: &Mutex<Shared>,
        solver: &NodeSolver,
        values: &[f64],
        objective: f64,
    ) -> Option<(u32, f64, Option<[f64; 2]>)> {
        let mut candidates: Vec<(u32, f64)> = Vec::new();
        for (k, &j) in self.binaries.iter().enumerate() {
            let x = values[j];
            if (x - x.round()).abs() > self.options.integrality_tolerance {
                candidates.push((k as u32, x));
            }
        }
        if candidates.is_empty() {
            return None;
        }
        let mut pseudo: Vec<PseudoCost> = shared.lock().unwrap().pseudo.clone();
        let mut order = candidates.clone();
        order.sort_by(|a, b| {
            let fa = (a.1 - a.1.floor() - 0.5).abs();
            let fb = (b.1 - b.1.floor() - 0.5).abs();
            fa.total_cmp(&fb).then(a.0.cmp(&b.0))
        });
        let mut probed: Vec<Option<[f64; 2]>> = vec![None; self.binaries.len()];
        let mut iterations = 0;
        let mut learned = Vec::new();
        let unreliable = order
            .iter()
            .filter(|(k, _)| pseudo[*k as usize].iter().any(|e| e.1 == 0))
            .take(STRONG_CANDIDATES)
            .copied()
            .collect::<Vec<_>>();
        let mut forced = None;
        for (k, x) in unreliable {
            let frac = x - x.floor();
            let (down, it_down) = self.probe(solver, k, false);
            let (up, it_up) = self.probe(solver, k, true);
            iterations += it_down + it_up;
            let (Some(down), Some(up)) = (down, up) else {
                // One side is infeasible: branching here prunes it at once.
                let child = |b: Option<f64>| b.unwrap_or(f64::INFINITY);
                forced = Some((k, x, Some([child(down), child(up)])));
                break;
            };
            for (side, obj, dist) in [(0, down, frac), (1, up, 1.0 - frac)] {
                if obj.is_finite() {
                    let gain = (obj - objective).max(0.0) / dist;
                    pseudo[k as usize][side].0 += gain;
                    pseudo[k as usize][side].1 += 1;
                    learned.push((k, side, gain));
                }
            }
            probed[k as usize] = Some([down, up]);
        }
        {
            let mut guard = shared.lock().unwrap();
            guard.lp_iterations += iterations;
            for &(k, side, gain) in &learned {
                let entry = &mut guard.pseudo[k as usize][side];
                entry.0 += gain;
                entry.1 += 1;
            }
        }
        if forced.is_some() {
            return forced;
        }
        let mean = |side: usize| {
            let (sum, count) = pseudo
                .iter()
                .filter(|p| p[side].1 > 0)
                .fold((0.0, 0), |(s, c), p| (s + p[side].0 / p[side].1 as f64, c + 1));
            if count > 0 {
                sum / count as f64
            } else {
                1.0
            }
        };
        let means = [mean(0), mean(1)];
        let estimate = |k: u32, side: usize| {
            let (sum, count) = pseudo[k as usize][side];
            if count > 0 {
                sum / count as f64
            } else {
                means[side]
            }
        };
        let mut best: Option<(u32, f64, f64)> = None;
        for &(k, x) in &candidates {
            let frac = x - x.floor();
            let down = (estimate(k, 0) * frac).max(1e-6);
            let up = (estimate(k, 1) * (1.0 - frac)).max(1e-6);
            let score = down * up;
            match best {
                Some((_, _, s)) if score <= s => {}
                _ => best = Some((k, x, score)),
            }
        }
        best.map(|(k, x, _)| (k, x, probed[k as usize].filter(|b| b.iter().all(|v| v.is_finite()))))
    }

    /// Re-solves with every binary fixed at its rounded value so the incumbent
    /// is an exact LP point for an integral commitment.
    fn polish(&self, solver: &mut NodeSolver, values: &[f64]) -> Option<(f64, Vec<f64>)> {
        let fixings: Vec<(u32, bool)> = self
            .binaries
            .iter()
            .enumerate()
            .map(|(k, &j)| (k as u32, values[j] > 0.5))
            .collect();
        match self.solve_node(solver, &fixings).0 {
            NodeOutcome::Solved { objective, mut values } => {
                for &j in &self.binaries {
                    values[j] = values[j].round();
                }
                Some((objective, values))
            }
            _ => None,
        }
    }

    fn global_bound(&self, shared: &Shared) -> f64 {
        let mut bound = f64::INFINITY;
        if let Some(top) = shared.heap.peek() {
            bound = bound.min(top.0.bound);
        }
        for b in shared.in_flight.iter().flatten() {
            bound = bound.min(*b);
        }
        if let Some(inc) = &shared.incumbent {
            bound = bound.min(inc.objective);
        }
        bound
    }

    /// Records the bound trace and decides whether the search may stop.
    fn after_node(&self, shared: &mut Shared) {
        let bound = self.global_bound(shared).max(shared.last_bound);
        shared.last_bound = bound;
        if bound.is_finite() {
            shared.bound_trace.push(self.report(bound));
        }
        if let Some(inc) = &shared.incumbent {
            let gap = MilpSolution::relative_gap(self.report(inc.objective), self.report(bound));
            if gap <= self.options.gap_tolerance {
                shared.done = true;
            }
        }
        if let Some(limit) = self.options.node_limit {
            if shared.nodes >= limit {
                shared.limit_hit = true;
                shared.done = true;
            }
        }
        if let Some(limit) = self.options.time_limit {
            if self.start.elapsed() >= limit {
                shared.limit_hit = true;
                shared.done = true;
            }
        }
    }

    fn run(self) -> Result<MilpSolution, SolverError> {
        if self.prepared.infeasible {
            return Ok(MilpSolution {
                status: MilpStatus::Infeasible,
                values: None,
                objective: None,
                best_bound: self.report(f64::INFINITY),
                gap: f64::INFINITY,
                nodes: 0,
                lp_iterations: 0,
                wall_time: self.start.elapsed(),
                bound_trace: Vec::new(),
            });
        }
        let mut solver = self.fresh_solver();
        let root = Node {
            id: 0,
            depth: 0,
            bound: f64::NEG_INFINITY,
            fixings: Vec::new(),
            origin: None,
        };
        let shared = Mutex::new(Shared {
            heap: BinaryHeap::new(),
            incumbent: None,
            nodes: 0,
            lp_iterations: 0,
            next_id: 1,
            in_flight: vec![None; self.options.workers],
            active: 0,
            failures: 0,
            limit_hit: false,
            unbounded: false,
            done: false,
            last_bound: f64::NEG_INFINITY,
            bound_trace: Vec::new(),
            pseudo: vec![[(0.0, 0); 2]; self.binaries.len()],
        });

        // The root is always processed by a single worker; its solved engine
        // seeds the other workers.
        {
            let mut guard = shared.lock().unwrap();
            guard.in_flight[0] = Some(root.bound);
            guard.active = 1;
        }
        self.plunge(&shared, &mut solver, root, 0);
        let needs_pool = {
            let guard = shared.lock().unwrap();
            self.options.workers > 1 && !guard.done && !guard.heap.is_empty()
        };
        if needs_pool {
            let wakeup = Condvar::new();
            std::thread::scope(|scope| {
                for w in 0..self.options.workers {
                    let mut own = solver.clone();
                    let shared = &shared;
                    let wakeup = &wakeup;
                    let this = &self;
                    scope.spawn(move || this.worker(shared, wakeup, &mut own, w));
                }
            });
        } else {
            loop {
                let next = {
                    let mut guard = shared.lock().unwrap();
                    if guard.done {
                        None
                    } else {
                        let node = self.pop_open(&mut guard);
                        if let Some(node) = &node {
                            guard.in_flight[0] = Some(node.bound);
                            guard.active = 1;
                        }
                        node
                    }
                };
                match next {
                    Some(node) => self.plunge(&shared, &mut solver, node, 0),
                    None => break,
                }
            }
        }
        Ok(self.finish(shared.into_inner().unwrap()))
    }

    fn pop_open(&self, shared: &mut Shared) -> Option<Node> {
        while let Some(OpenNode(node)) = shared.heap.pop() {
            if self.cutoff_reached(node.bound, shared.incumbent.as_ref()) {
                continue;
            }
            return Some(node);
        }
        None
    }

    fn worker(&self, shared: &Mutex<Shared>, wakeup: &Condvar, solver: &mut NodeSolver, slot: usize) {
        loop {
            let node = {
                let mut guard = shared.lock().unwrap();
                loop {
                    if guard.done {
                        wakeup.notify_all();
                        return;
                    }
                    if let Some(node) = self.pop_open(&mut guard) {
                        guard.in_flight[slot] = Some(node.bound);
                        guard.active += 1;
                        break node;
                    }
                    if guard.active == 0 {
                        guard.done = true;
                        wakeup.notify_all();
                        return;
                    }
                    guard = wakeup.wait(guard).unwrap();
                }
            };
            self.plunge(shared, solver, node, slot);
            wakeup.notify_all();
        }
    }

    /// Processes `node` and keeps diving into one child until the dive ends.
    fn plunge(&self, shared: &Mutex<Shared>, solver: &mut NodeSolver, node: Node, slot: usize) {
        let mut current = Some(node);
        while let Some(node) = current.take() {
            {
                let guard = shared.lock().unwrap();
                if guard.done || self.cutoff_reached(node.bound, guard.incumbent.as_ref()) {
                    drop(guard);
                    break;
                }
            }
            let (outcome, iterations) = self.solve_node(solver, &node.fixings);
            let mut guard = shared.lock().unwrap();
            guard.nodes += 1;
            guard.lp_iterations += iterations;
            if let (Some(origin), NodeOutcome::Solved { objective, .. }) = (node.origin, &outcome) {
                let gain = (objective - origin.parent_objective).max(0.0) / origin.distance;
                let entry = &mut guard.pseudo[origin.position as usize][origin.up as usize];
                entry.0 += gain;
                entry.1 += 1;
            }
            match outcome {
                NodeOutcome::Infeasible => {}
                NodeOutcome::Failed => guard.failures += 1,
                NodeOutcome::Unbounded => {
                    guard.unbounded = true;
                    guard.done = true;
                }
                NodeOutcome::Solved { objective, values } => {
                    let bound = objective.max(node.bound);
                    if !self.cutoff_reached(bound, guard.incumbent.as_ref()) {
                        let choice = match self.options.branching {
                            Branching::MostFractional => self.branching_candidate(&values).map(|(k, x)| (k, x, None)),
                            Branching::Reliability => {
                                drop(guard);
                                let choice = self.reliable_candidate(shared, solver, &values, objective);
                                guard = shared.lock().unwrap();
                                choice
                            }
                        };
                        match choice {
                            None => {
                                drop(guard);
                                let polished = self.polish(solver, &values);
                                guard = shared.lock().unwrap();
                                if let Some((obj, vals)) = polished {
                                    let better = guard
                                        .incumbent
                                        .as_ref()
                                        .is_none_or(|inc| obj < inc.objective);
                                    if better {
                                        log::trace!("incumbent {} at node {}", self.report(obj), guard.nodes);
                                        guard.incumbent = Some(Incumbent {
                                            objective: obj,
                                            values: vals,
                                        });
                                    }
                                } else {
                                    guard.failures += 1;
                                }
                            }
                            Some((k, x, probed)) => {
                                let frac = x - x.floor();
                                let up_first = frac >= 0.5;
                                let mut children = [false, true].map(|v| {
                                    let mut fixings = node.fixings.clone();
                                    fixings.push((k, v));
                                    let id = guard.next_id;
                                    guard.next_id += 1;
                                    let child_bound = probed.map_or(bound, |b: [f64; 2]| b[v as usize].max(bound));
                                    Node {
                                        id,
                                        depth: node.depth + 1,
                                        bound: child_bound,
                                        fixings,
                                        origin: Some(Origin {
                                            position: k,
                                            up: v,
                                            distance: if v { 1.0 - frac } else { frac },
                                            parent_objective: objective,
                                        }),
                                    }
                                });
                                if up_first {
                                    children.swap(0, 1);
                                }
                                let [first, second] = children;
                                guard.heap.push(OpenNode(second));
                                guard.in_flight[slot] = Some(first.bound);
                                current = Some(first);
                            }
                        }
                    }
                }
            }
            if current.is_none() {
                guard.in_flight[slot] = None;
                guard.active -= 1;
            }
            self.after_node(&mut guard);
            if guard.done && current.is_some() {
                guard.in_flight[slot] = None;
                guard.active -= 1;
                current = None;
            }
        }
        // A dive cut short by the pre-solve check still has to release its slot.
        let mut guard = shared.lock().unwrap();
        if guard.in_flight[slot].is_some() {
            guard.in_flight[slot] = None;
            guard.active -= 1;
        }
    }

    fn finish(&self, shared: Shared) -> MilpSolution {
        let wall_time = self.start.elapsed();
        let (status, best_bound, objective, values) = if shared.unbounded {
            (MilpStatus::Unbounded, self.report(f64::NEG_INFINITY), None, None)
        } else if let Some(inc) = shared.incumbent {
            let objective = self.report(inc.objective);
            let best_bound = self.report(shared.last_bound.min(inc.objective));
            let status = if shared.limit_hit
                && MilpSolution::relative_gap(objective, best_bound) > self.options.gap_tolerance
            {
                MilpStatus::LimitReached
            } else if shared.failures > 0 {
                MilpStatus::Feasible
            } else {
                MilpStatus::Optimal
            };
            (status, best_bound, Some(objective), Some(inc.values))
        } else if shared.limit_hit || shared.failures > 0 {
            (MilpStatus::LimitReached, self.report(shared.last_bound), None, None)
        } else {
            (MilpStatus::Infeasible, self.report(f64::INFINITY), None, None)
        };
        let gap = match objective {
            Some(obj) if best_bound.is_finite() => MilpSolution::relative_gap(obj, best_bound),
            _ => f64::INFINITY,
        };
        MilpSolution {
            status,
            values,
            objective,
            best_bound,
            gap,
            nodes: shared.nodes,
            lp_iterations: shared.lp_iterations,
            wall_time,
            bound_trace: shared.bound_trace,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ObjSense, RowSense};

    #[test]
    fn unconstrained_binary_minimum() {
        let mut m = MilpModel::new();
        let x = m.add_binary("x");
        m.set_objective(ObjSense::Minimize, [(x, 1.0)], 0.0);
        let s = solve_milp(&m, &SolveOptions::default()).unwrap();
        assert_eq!(s.status, MilpStatus::Optimal);
        assert_eq!(s.objective, Some(0.0));
    }

    #[test]
    fn knapsack_matches_enumeration() {
        // All eight assignments: the best feasible one is x = y = 1, z = 0 → 9.
        let mut m = MilpModel::new();
        let x = m.add_binary("x");
        let y = m.add_binary("y");
        let z = m.add_binary("z");
        m.add_constraint([(x, 2.0), (y, 3.0), (z, 4.0)], RowSense::Le, 5.0, "cap");
        m.set_objective(ObjSense::Maximize, [(x, 5.0), (y, 4.0), (z, 3.0)], 0.0);
        let s = solve_milp(&m, &SolveOptions::default()).unwrap();
        assert_eq!(s.status, MilpStatus::Optimal);
        assert!((s.objective.unwrap() - 9.0).abs() < 1e-9);
        assert_eq!(s.values.unwrap(), vec![1.0, 1.0, 0.0]);
        assert!(s.gap <= 1e-6);
    }

    #[test]
    fn infeasible_integer_program() {
        let mut m = MilpModel::new();
        let x = m.add_binary("x");
        let y = m.add_binary("y");
        m.add_constraint([(x, 2.0), (y, 2.0)], RowSense::Eq, 1.0, "odd");
        m.set_objective(ObjSense::Minimize, [(x, 1.0)], 0.0);
        let s = solve_milp(&m, &SolveOptions::default()).unwrap();
        assert_eq!(s.status, MilpStatus::Infeasible);
        assert!(s.values.is_none());
    }

    #[test]
    fn node_limit_reports_limit() {
        let mut m = MilpModel::new();
        let vars: Vec<_> = (0..12).map(|i| m.add_binary(format!("b{i}"))).collect();
        m.add_constraint(vars.iter().map(|&v| (v, 2.0)), RowSense::Eq, 11.0, "odd");
        m.set_objective(ObjSense::Minimize, vars.iter().map(|&v| (v, 1.0)), 0.0);
        let opts = SolveOptions {
            node_limit: Some(5),
            ..SolveOptions::default()
        };
        let s = solve_milp(&m, &opts).unwrap();
        assert_eq!(s.status, MilpStatus::LimitReached);
        assert_eq!(s.nodes, 5);
    }

    #[test]
    fn rejects_non_positive_tolerance() {
        let m = MilpModel::new();
        let opts = SolveOptions {
            gap_tolerance: 0.0,
            ..SolveOptions::default()
        };
        assert!(matches!(solve_milp(&m, &opts), Err(SolverError::Options(_))));
    }
}
