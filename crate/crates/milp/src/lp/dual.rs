//! Bounded-variable dual revised simplex.
//!
//! Computational form: structural columns `x_0..x_{n-1}` and one logical per
//! row, `s_i = -a_i·x`, so the constraint system is `[A | I] z = 0` with box
//! bounds on every entry of `z`. Infinite bounds are replaced by an
//! artificial box so that every nonbasic variable sits at a finite bound and
//! the slack basis is dual feasible for any cost vector.

use std::sync::Arc;

use super::factor::EtaFile;

const NONBASIC: usize = usize::MAX;
const REFACTOR_EVERY: usize = 100;
const PIVOT_TOL: f64 = 1e-9;
const BLAND_AFTER: usize = 1000;
const INITIAL_BOX: f64 = 1e7;
const BOX_GROWTH: f64 = 1e3;
const MAX_BOX_ESCALATIONS: usize = 3;

/// Column-major constraint data shared between engine copies.
#[derive(Debug, Clone)]
pub(crate) struct LpData {
    pub n: usize,
    pub m: usize,
    pub col_start: Vec<usize>,
    pub col_row: Vec<usize>,
    pub col_val: Vec<f64>,
    /// Minimization costs of the structural columns.
    pub cost: Vec<f64>,
}

impl LpData {
    fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.col_start[j]..self.col_start[j + 1];
        self.col_row[range.clone()]
            .iter()
            .copied()
            .zip(self.col_val[range].iter().copied())
    }

    fn nnz(&self, j: usize) -> usize {
        self.col_start[j + 1] - self.col_start[j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum EngineStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    Singular,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerances {
    pub primal: f64,
    pub dual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            primal: 1e-7,
            dual: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct DualSimplex {
    data: Arc<LpData>,
    tol: Tolerances,
    /// True bounds over all `n + m` variables.
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// Working bounds (true bounds with infinities boxed).
    lo: Vec<f64>,
    hi: Vec<f64>,
    big: f64,
    head: Vec<usize>,
    pos: Vec<usize>,
    at_upper: Vec<bool>,
    x: Vec<f64>,
    d: Vec<f64>,
    eta: EtaFile,
    updates: usize,
    fresh: bool,
    primal_dirty: bool,
    duals_dirty: bool,
    bland: bool,
    degenerate_run: usize,
    pub iterations: usize,
    pub iteration_limit: usize,
    rho: Vec<f64>,
    col: Vec<f64>,
    alpha: Vec<f64>,
    candidates: Vec<usize>,
}

impl DualSimplex {
    /// Slack basis engine. `lower`/`upper` cover structurals then logicals.
    pub fn new(data: Arc<LpData>, lower: Vec<f64>, upper: Vec<f64>, tol: Tolerances) -> Self {
        let n = data.n;
        let m = data.m;
        let total = n + m;
        debug_assert_eq!(lower.len(), total);
        let mut engine = DualSimplex {
            tol,
            lo: vec![0.0; total],
            hi: vec![0.0; total],
            big: INITIAL_BOX,
            head: (n..total).collect(),
            pos: (0..total).map(|j| if j < n { NONBASIC } else { j - n }).collect(),
            at_upper: vec![false; total],
            x: vec![0.0; total],
            d: vec![0.0; total],
            eta: EtaFile::new(),
            updates: REFACTOR_EVERY,
            fresh: false,
            primal_dirty: true,
            duals_dirty: true,
            bland: false,
            degenerate_run: 0,
            iterations: 0,
            iteration_limit: 50 * (n + m) + 10_000,
            rho: vec![0.0; m],
            col: vec![0.0; m],
            alpha: vec![0.0; total],
            candidates: Vec::with_capacity(total),
            lower,
            upper,
            data,
        };
        engine.apply_box();
        for j in 0..n {
            engine.d[j] = engine.data.cost[j];
            engine.at_upper[j] = engine.data.cost[j] < 0.0;
        }
        engine.place_nonbasic();
        engine
    }

    fn total(&self) -> usize {
        self.data.n + self.data.m
    }

    fn apply_box(&mut self) {
        for j in 0..self.total() {
            self.lo[j] = if self.lower[j] == f64::NEG_INFINITY {
                -self.big
            } else {
                self.lower[j]
            };
            self.hi[j] = if self.upper[j] == f64::INFINITY {
                self.big
            } else {
                self.upper[j]
            };
        }
    }

    fn place_nonbasic(&mut self) {
        for j in 0..self.total() {
            if self.pos[j] == NONBASIC {
                self.x[j] = if self.at_upper[j] { self.hi[j] } else { self.lo[j] };
            }
        }
        self.fresh = false;
        self.primal_dirty = true;
    }

    /// Changes the true bounds of variable `j`. Nonbasic variables move to
    /// the corresponding new bound; dual feasibility is unaffected.
    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.lower[j] = lower;
        self.upper[j] = upper;
        self.lo[j] = if lower == f64::NEG_INFINITY { -self.big } else { lower };
        self.hi[j] = if upper == f64::INFINITY { self.big } else { upper };
        if self.pos[j] == NONBASIC {
            self.x[j] = if self.at_upper[j] { self.hi[j] } else { self.lo[j] };
        }
        self.fresh = false;
        self.primal_dirty = true;
        self.duals_dirty = true;
    }

    pub fn values(&self) -> &[f64] {
        &self.x[..self.data.n]
    }

    pub fn objective(&self) -> f64 {
        (0..self.data.n).map(|j| self.data.cost[j] * self.x[j]).sum()
    }

    // ---- factorization -------------------------------------------------

    fn load_column(&self, j: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        if j < self.data.n {
            for (i, v) in self.data.column(j) {
                out[i] = v;
            }
        } else {
            out[j - self.data.n] = 1.0;
        }
    }

    /// Rebuilds the eta file from the current basis. Structural columns that
    /// turn out dependent are swapped for logicals.
    fn reinvert(&mut self) -> bool {
        let n = self.data.n;
        let m = self.data.m;
        self.eta.clear();
        let mut taken = vec![false; m];
        let mut new_head = vec![NONBASIC; m];
        let mut structurals = Vec::new();
        for &b in &self.head {
            if b >= n {
                taken[b - n] = true;
                new_head[b - n] = b;
            } else {
                structurals.push(b);
            }
        }
        structurals.sort_by_key(|&j| (self.data.nnz(j), j));
        let mut col = std::mem::take(&mut self.col);
        let mut dropped = Vec::new();
        for &j in &structurals {
            self.load_column(j, &mut col);
            self.eta.ftran(&mut col);
            let mut best = NONBASIC;
            let mut best_abs = 0.0;
            for (i, &v) in col.iter().enumerate() {
                if !taken[i] && v.abs() > best_abs {
                    best_abs = v.abs();
                    best = i;
                }
            }
            if best == NONBASIC || best_abs < PIVOT_TOL {
                dropped.push(j);
                continue;
            }
            self.eta.push(best, &col);
            taken[best] = true;
            new_head[best] = j;
        }
        self.col = col;
        for j in &dropped {
            self.pos[*j] = NONBASIC;
            let x = self.x[*j];
            self.at_upper[*j] = (self.hi[*j] - x).abs() < (x - self.lo[*j]).abs();
        }
        for (i, slot) in new_head.iter_mut().enumerate() {
            if *slot == NONBASIC {
                *slot = n + i;
            }
        }
        for (i, &b) in new_head.iter().enumerate() {
            self.pos[b] = i;
        }
        self.head = new_head;
        self.updates = 0;
        if !dropped.is_empty() {
            log::debug!("basis repair replaced {} dependent columns", dropped.len());
            self.place_nonbasic();
        }
        dropped.is_empty()
    }

    fn recompute_duals(&mut self) {
        let n = self.data.n;
        let m = self.data.m;
        let mut y = std::mem::take(&mut self.rho);
        for i in 0..m {
            let b = self.head[i];
            y[i] = if b < n { self.data.cost[b] } else { 0.0 };
        }
        self.eta.btran(&mut y);
        for j in 0..n {
            if self.pos[j] != NONBASIC {
                self.d[j] = 0.0;
                continue;
            }
            let mut s = self.data.cost[j];
            for (i, v) in self.data.column(j) {
                s -= y[i] * v;
            }
            self.d[j] = s;
        }
        for i in 0..m {
            let j = n + i;
            self.d[j] = if self.pos[j] == NONBASIC { -y[i] } else { 0.0 };
        }
        self.rho = y;
        // Restore dual feasibility by bound flips.
        let mut flipped = false;
        for j in 0..self.total() {
            if self.pos[j] != NONBASIC || self.lo[j] == self.hi[j] {
                continue;
            }
            if !self.at_upper[j] && self.d[j] < -self.tol.dual {
                self.at_upper[j] = true;
                flipped = true;
            } else if self.at_upper[j] && self.d[j] > self.tol.dual {
                self.at_upper[j] = false;
                flipped = true;
            }
        }
        if flipped {
            self.place_nonbasic();
        }
    }

    fn recompute_primal(&mut self) {
        let n = self.data.n;
        let m = self.data.m;
        let mut r = std::mem::take(&mut self.col);
        r.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..n {
            if self.pos[j] == NONBASIC {
                let xj = self.x[j];
                if xj != 0.0 {
                    for (i, v) in self.data.column(j) {
                        r[i] -= v * xj;
                    }
                }
            }
        }
        for i in 0..m {
            let j = n + i;
            if self.pos[j] == NONBASIC {
                r[i] -= self.x[j];
            }
        }
        self.eta.ftran(&mut r);
        for i in 0..m {
            self.x[self.head[i]] = r[i];
        }
        self.col = r;
    }

    fn refresh_values(&mut self) {
        self.recompute_duals();
        self.recompute_primal();
        self.primal_dirty = false;
        self.duals_dirty = false;
        self.fresh = true;
    }

    fn refactor(&mut self) -> bool {
        let ok = self.reinvert();
        self.refresh_values();
        ok
    }

    // ---- iterations ----------------------------------------------------

    fn primal_infeasibility(&self, b: usize) -> f64 {
        let x = self.x[b];
        if x < self.lo[b] - self.tol.primal {
            self.lo[b] - x
        } else if x > self.hi[b] + self.tol.primal {
            x - self.hi[b]
        } else {
            0.0
        }
    }

    fn choose_leaving(&self) -> Option<usize> {
        let mut best = None;
        let mut best_val = 0.0;
        for (i, &b) in self.head.iter().enumerate() {
            let infeas = self.primal_infeasibility(b);
            if infeas <= 0.0 {
                continue;
            }
            if self.bland {
                match best {
                    Some(r) if self.head[r] <= b => {}
                    _ => best = Some(i),
                }
            } else if infeas > best_val {
                best_val = infeas;
                best = Some(i);
            }
        }
        best
    }

    fn compute_pivot_row(&mut self, r: usize) {
        let n = self.data.n;
        let m = self.data.m;
        let rho = &mut self.rho;
        rho.iter_mut().for_each(|v| *v = 0.0);
        rho[r] = 1.0;
        self.eta.btran(rho);
        self.candidates.clear();
        for j in 0..n {
            if self.pos[j] != NONBASIC || self.lo[j] == self.hi[j] {
                continue;
            }
            let mut s = 0.0;
            for (i, v) in self.data.column(j) {
                s += rho[i] * v;
            }
            self.alpha[j] = s;
            if s.abs() > PIVOT_TOL {
                self.candidates.push(j);
            }
        }
        for i in 0..m {
            let j = n + i;
            if self.pos[j] != NONBASIC || self.lo[j] == self.hi[j] {
                continue;
            }
            let s = rho[i];
            self.alpha[j] = s;
            if s.abs() > PIVOT_TOL {
                self.candidates.push(j);
            }
        }
    }

    /// Harris two-pass ratio test. `dir` is +1 when the leaving variable
    /// decreases to its upper bound and -1 when it rises to its lower bound.
    fn ratio_test(&self, dir: f64) -> Option<usize> {
        let eligible = |j: usize| -> Option<f64> {
            let t = dir * self.alpha[j];
            if (!self.at_upper[j] && t > PIVOT_TOL) || (self.at_upper[j] && t < -PIVOT_TOL) {
                Some(t)
            } else {
                None
            }
        };
        if self.bland {
            let mut best: Option<(usize, f64)> = None;
            for &j in &self.candidates {
                if let Some(t) = eligible(j) {
                    let ratio = (self.d[j] / t).max(0.0);
                    match best {
                        Some((_, r)) if ratio >= r - 1e-12 => {}
                        _ => best = Some((j, ratio)),
                    }
                }
            }
            return best.map(|(j, _)| j);
        }
        let mut theta_max = f64::INFINITY;
        for &j in &self.candidates {
            if let Some(t) = eligible(j) {
                let slack = if t > 0.0 { self.tol.dual } else { -self.tol.dual };
                let bound = (self.d[j] + slack) / t;
                if bound < theta_max {
                    theta_max = bound;
                }
            }
        }
        if theta_max == f64::INFINITY {
            return None;
        }
        let mut best = None;
        let mut best_abs = 0.0;
        for &j in &self.candidates {
            if let Some(t) = eligible(j) {
                let ratio = self.d[j] / t;
                if ratio <= theta_max && t.abs() > best_abs {
                    best_abs = t.abs();
                    best = Some(j);
                }
            }
        }
        best
    }

    /// Runs dual simplex iterations until optimality, infeasibility or a limit.
    pub fn solve(&mut self) -> EngineStatus {
        self.bland = false;
        self.degenerate_run = 0;
        let start = self.iterations;
        let mut escalations = 0;
        let mut singular_repairs = 0;
        loop {
            if self.iterations - start > self.iteration_limit {
                return EngineStatus::IterationLimit;
            }
            if self.updates >= REFACTOR_EVERY && !self.refactor() {
                singular_repairs += 1;
                if singular_repairs > 20 {
                    return EngineStatus::Singular;
                }
            }
            if self.duals_dirty {
                self.recompute_duals();
                self.duals_dirty = false;
            }
            if self.primal_dirty {
                self.recompute_primal();
                self.primal_dirty = false;
            }
            let Some(r) = self.choose_leaving() else {
                if !self.fresh {
                    self.refresh_values();
                    continue;
                }
                match self.check_artificial_box() {
                    BoxCheck::Clear => return EngineStatus::Optimal,
                    BoxCheck::Ray => return EngineStatus::Unbounded,
                    BoxCheck::Blocked => {
                        escalations += 1;
                        if escalations > MAX_BOX_ESCALATIONS {
                            return EngineStatus::Unbounded;
                        }
                        self.big *= BOX_GROWTH;
                        self.apply_box();
                        self.place_nonbasic();
                        self.primal_dirty = true;
                        continue;
                    }
                }
            };
            let leaving = self.head[r];
            let to_lower = self.x[leaving] < self.lo[leaving];
            let dir = if to_lower { -1.0 } else { 1.0 };
            self.compute_pivot_row(r);
            let Some(q) = self.ratio_test(dir) else {
                if self.updates > 0 || !self.fresh {
                    self.refactor();
                    continue;
                }
                return EngineStatus::Infeasible;
            };

            let mut col = std::mem::take(&mut self.col);
            self.load_column(q, &mut col);
            self.eta.ftran(&mut col);
            let pivot = col[r];
            let alpha_q = self.alpha[q];
            if (pivot - alpha_q).abs() > 1e-7 * (1.0 + pivot.abs()) || pivot.abs() < PIVOT_TOL {
                if self.updates > 0 || !self.fresh {
                    self.col = col;
                    self.refactor();
                    continue;
                }
                if pivot.abs() < PIVOT_TOL {
                    self.col = col;
                    return EngineStatus::Singular;
                }
            }

            // Dual update.
            let theta_d = self.d[q] / alpha_q;
            if theta_d.abs() <= 1e-12 {
                self.degenerate_run += 1;
                if self.degenerate_run >= BLAND_AFTER && !self.bland {
                    log::debug!("switching to Bland's rule after {BLAND_AFTER} degenerate pivots");
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }
            if theta_d != 0.0 {
                for &j in &self.candidates {
                    self.d[j] -= theta_d * self.alpha[j];
                }
            }
            self.d[q] = 0.0;
            self.d[leaving] = -theta_d;

            // Primal update.
            let target = if to_lower { self.lo[leaving] } else { self.hi[leaving] };
            let step = (self.x[leaving] - target) / pivot;
            if step != 0.0 {
                for (i, &v) in col.iter().enumerate() {
                    if v != 0.0 {
                        self.x[self.head[i]] -= v * step;
                    }
                }
            }
            self.x[q] += step;
            self.x[leaving] = target;
            self.at_upper[leaving] = !to_lower;

            self.eta.push(r, &col);
            self.col = col;
            self.head[r] = q;
            self.pos[q] = r;
            self.pos[leaving] = NONBASIC;
            self.updates += 1;
            self.fresh = false;
            self.iterations += 1;
        }
    }

    fn check_artificial_box(&mut self) -> BoxCheck {
        let n = self.data.n;
        let m = self.data.m;
        let mut any = false;
        let mut improve = 0.0;
        let mut dx = vec![0.0; m];
        for j in 0..self.total() {
            if self.pos[j] != NONBASIC {
                continue;
            }
            let at_art_upper = self.at_upper[j] && self.upper[j] == f64::INFINITY;
            let at_art_lower = !self.at_upper[j] && self.lower[j] == f64::NEG_INFINITY;
            if !(at_art_upper || at_art_lower) || self.d[j].abs() <= self.tol.dual {
                continue;
            }
            any = true;
            let dir = if at_art_upper { 1.0 } else { -1.0 };
            improve += self.d[j] * dir;
            if j < n {
                for (i, v) in self.data.column(j) {
                    dx[i] += v * dir;
                }
            } else {
                dx[j - n] += dir;
            }
        }
        if !any {
            return BoxCheck::Clear;
        }
        if improve >= 0.0 {
            return BoxCheck::Blocked;
        }
        // Basic variables move by -B⁻¹(Σ a_j dir_j).
        self.eta.ftran(&mut dx);
        for i in 0..m {
            let b = self.head[i];
            let delta = -dx[i];
            if delta > 1e-9 && self.upper[b] != f64::INFINITY {
                return BoxCheck::Blocked;
            }
            if delta < -1e-9 && self.lower[b] != f64::NEG_INFINITY {
                return BoxCheck::Blocked;
            }
        }
        BoxCheck::Ray
    }
}

enum BoxCheck {
    Clear,
    Ray,
    Blocked,
}
