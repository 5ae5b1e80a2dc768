//! Dense bounded-variable primal simplex.
//!
//! Every row `a·x (<=|=|>=) b` gets a slack `s` with `a·x + s = b`, where the slack's bounds
//! encode the sense. Rows whose slack cannot absorb the initial residual get an artificial
//! column; phase one minimizes the artificial sum, phase two pins artificials to zero and
//! minimizes the real objective. Nonbasic columns sit at a finite bound (or at zero when
//! free), so bound flips replace the explicit upper-bound rows of the textbook method.
//!
//! Pricing is Dantzig's largest reduced cost, falling back to Bland's rule after a run of
//! degenerate pivots. The tableau is rebuilt from the original matrix periodically to keep
//! drift in check.

use serde::{Deserialize, Serialize};

use super::program::{MixedIntegerProgram, Sense};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free column resting at zero.
    Free,
    /// Column with equal bounds, substituted out before solving.
    Fixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexResult {
    pub status: LpStatus,
    pub objective: f64,
    pub x: Vec<f64>,
    pub basis: Vec<BasisStatus>,
    /// Reduced cost of every structural column at the final basis.
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
    /// Largest bound or row violation of `x` (only meaningful when optimal).
    pub max_residual: f64,
}

#[derive(Clone, Debug)]
pub struct SimplexOptions {
    pub optimality_tol: f64,
    pub feasibility_tol: f64,
    pub pivot_tol: f64,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub stall_threshold: usize,
    pub refactor_interval: usize,
    /// Residual above which the result is rejected as numerically unstable.
    pub instability_residual: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            optimality_tol: 1e-9,
            feasibility_tol: 1e-7,
            pivot_tol: 1e-9,
            stall_threshold: 50,
            refactor_interval: 100,
            instability_residual: 1e-5,
        }
    }
}

/// Solves the LP relaxation of `program` (integrality ignored).
pub fn solve_lp(program: &MixedIntegerProgram) -> Result<SimplexResult> {
    solve_lp_bounded(program, &program.lower_bounds(), &program.upper_bounds(), &SimplexOptions::default())
}

/// Solves the LP relaxation with column bounds overridden by `lower`/`upper`.
pub fn solve_lp_bounded(
    program: &MixedIntegerProgram,
    lower: &[f64],
    upper: &[f64],
    options: &SimplexOptions,
) -> Result<SimplexResult> {
    let n = program.num_columns();
    if lower.len() != n || upper.len() != n {
        return Err(Error::Dimension(format!("bounds for {} columns, program has {n}", lower.len())));
    }
    let mut fixed_value = vec![None; n];
    for j in 0..n {
        if lower[j] > upper[j] + options.feasibility_tol {
            return Ok(infeasible(n));
        }
        if upper[j] - lower[j] <= 0.0 || (upper[j] - lower[j]).abs() <= 1e-12 {
            fixed_value[j] = Some(lower[j]);
        }
    }
    let mut lp = Tableau::build(program, lower, upper, &fixed_value, options);
    let outcome = lp.run()?;
    checked(lp.finish(program, lower, upper, &fixed_value, outcome), options)
}

fn infeasible(n: usize) -> SimplexResult {
    SimplexResult {
        status: LpStatus::Infeasible,
        objective: f64::INFINITY,
        x: vec![0.0; n],
        basis: vec![BasisStatus::AtLower; n],
        reduced_costs: vec![0.0; n],
        iterations: 0,
        max_residual: f64::INFINITY,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum State {
    Basic(usize),
    Lower,
    Upper,
    Zero,
}

#[derive(Debug, PartialEq)]
enum Outcome {
    Optimal,
    Infeasible,
    Unbounded,
}

struct Tableau<'o> {
    opts: &'o SimplexOptions,
    m: usize,
    /// Total variables: active structurals, then one slack per row, then artificials.
    nv: usize,
    n_struct: usize,
    first_artificial: usize,
    /// Original program column for each active structural.
    active: Vec<usize>,
    /// Original constraint matrix over all variables, row-major.
    mat: Vec<f64>,
    rhs: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    cost: Vec<f64>,
    phase_cost: Vec<f64>,
    tab: Vec<f64>,
    xb: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<State>,
    d: Vec<f64>,
    iterations: usize,
    since_refactor: usize,
}

impl<'o> Tableau<'o> {
    fn build(
        program: &MixedIntegerProgram,
        lower: &[f64],
        upper: &[f64],
        fixed: &[Option<f64>],
        opts: &'o SimplexOptions,
    ) -> Self {
        let m = program.num_rows();
        let active: Vec<usize> = (0..program.num_columns()).filter(|&j| fixed[j].is_none()).collect();
        let mut position = vec![usize::MAX; program.num_columns()];
        for (p, &j) in active.iter().enumerate() {
            position[j] = p;
        }
        let n_struct = active.len();

        let mut lb: Vec<f64> = active.iter().map(|&j| lower[j]).collect();
        let mut ub: Vec<f64> = active.iter().map(|&j| upper[j]).collect();
        let mut cost: Vec<f64> = active.iter().map(|&j| program.columns[j].cost).collect();
        let mut state: Vec<State> = (0..n_struct)
            .map(|p| {
                if lb[p].is_finite() {
                    State::Lower
                } else if ub[p].is_finite() {
                    State::Upper
                } else {
                    State::Zero
                }
            })
            .collect();

        // Residuals with structurals at their starting values decide slack vs artificial.
        let mut rhs = Vec::with_capacity(m);
        let mut residual = Vec::with_capacity(m);
        for row in &program.rows {
            let mut b = row.rhs;
            let mut act = 0.0;
            for &(j, a) in &row.coeffs {
                match fixed[j] {
                    Some(v) => b -= a * v,
                    None => {
                        let p = position[j];
                        act += a * value_of(state[p], lb[p], ub[p]);
                    }
                }
            }
            rhs.push(b);
            residual.push(b - act);
        }

        let mut needs_art = Vec::new();
        for (r, row) in program.rows.iter().enumerate() {
            let (slo, shi) = slack_bounds(row.sense);
            lb.push(slo);
            ub.push(shi);
            cost.push(0.0);
            let res = residual[r];
            if res >= slo - opts.feasibility_tol * 0.0 && res <= shi {
                state.push(State::Basic(r));
            } else {
                state.push(if slo.is_finite() { State::Lower } else { State::Upper });
                needs_art.push(r);
            }
        }
        let first_artificial = n_struct + m;
        for _ in &needs_art {
            lb.push(0.0);
            ub.push(f64::INFINITY);
            cost.push(0.0);
        }
        let nv = first_artificial + needs_art.len();

        let mut mat = vec![0.0; m * nv];
        for (r, row) in program.rows.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                if fixed[j].is_none() {
                    mat[r * nv + position[j]] += a;
                }
            }
            mat[r * nv + n_struct + r] = 1.0;
        }
        let mut basis = vec![0; m];
        for r in 0..m {
            if let State::Basic(_) = state[n_struct + r] {
                basis[r] = n_struct + r;
            }
        }
        for (a, &r) in needs_art.iter().enumerate() {
            let v = first_artificial + a;
            mat[r * nv + v] = if residual[r] >= 0.0 { 1.0 } else { -1.0 };
            state.push(State::Basic(r));
            basis[r] = v;
        }

        let mut phase_cost = vec![0.0; nv];
        for v in first_artificial..nv {
            phase_cost[v] = 1.0;
        }

        let mut t = Tableau {
            opts,
            m,
            nv,
            n_struct,
            first_artificial,
            active,
            mat,
            rhs,
            lb,
            ub,
            cost,
            phase_cost,
            tab: Vec::new(),
            xb: vec![0.0; m],
            basis,
            state,
            d: vec![0.0; nv],
            iterations: 0,
            since_refactor: 0,
        };
        t.refactor().expect("slack/artificial basis is nonsingular");
        t
    }

    fn value(&self, v: usize) -> f64 {
        match self.state[v] {
            State::Basic(r) => self.xb[r],
            s => value_of(s, self.lb[v], self.ub[v]),
        }
    }

    /// Rebuilds tableau, basic values and reduced costs from the original matrix.
    fn refactor(&mut self) -> Result<()> {
        let (m, nv) = (self.m, self.nv);
        let mut tab = self.mat.clone();
        let mut b = self.rhs.clone();
        for v in 0..nv {
            if !matches!(self.state[v], State::Basic(_)) {
                let x = value_of(self.state[v], self.lb[v], self.ub[v]);
                if x != 0.0 {
                    for r in 0..m {
                        b[r] -= tab[r * nv + v] * x;
                    }
                }
            }
        }
        let order: Vec<usize> = self.basis.clone();
        let mut new_basis = vec![usize::MAX; m];
        for (k, &var) in order.iter().enumerate() {
            // Partial pivoting among rows not yet assigned.
            let mut best = k;
            let mut best_abs = -1.0;
            for r in k..m {
                let a = tab[r * nv + var].abs();
                if a > best_abs {
                    best_abs = a;
                    best = r;
                }
            }
            if best_abs < 1e-11 {
                return Err(Error::NumericalInstability { residual: f64::NAN });
            }
            if best != k {
                for c in 0..nv {
                    tab.swap(k * nv + c, best * nv + c);
                }
                b.swap(k, best);
            }
            let piv = tab[k * nv + var];
            let inv = 1.0 / piv;
            for c in 0..nv {
                tab[k * nv + c] *= inv;
            }
            b[k] *= inv;
            let (head, rest) = tab.split_at_mut(k * nv);
            let (pivot_row, tail) = rest.split_at_mut(nv);
            for (r, row) in head.chunks_exact_mut(nv).chain(tail.chunks_exact_mut(nv)).enumerate() {
                let r = if r < k { r } else { r + 1 };
                let f = row[var];
                if f != 0.0 {
                    for (x, &p) in row.iter_mut().zip(pivot_row.iter()) {
                        *x -= f * p;
                    }
                    row[var] = 0.0;
                    b[r] -= f * b[k];
                }
            }
            new_basis[k] = var;
        }
        for (r, &var) in new_basis.iter().enumerate() {
            self.state[var] = State::Basic(r);
        }
        self.basis = new_basis;
        self.tab = tab;
        self.xb = b;
        self.since_refactor = 0;
        self.recompute_reduced_costs();
        Ok(())
    }

    fn recompute_reduced_costs(&mut self) {
        let nv = self.nv;
        let mut d = self.phase_cost.clone();
        for r in 0..self.m {
            let cb = self.phase_cost[self.basis[r]];
            if cb != 0.0 {
                for (dj, &t) in d.iter_mut().zip(&self.tab[r * nv..(r + 1) * nv]) {
                    *dj -= cb * t;
                }
            }
        }
        for r in 0..self.m {
            d[self.basis[r]] = 0.0;
        }
        self.d = d;
    }

    fn run(&mut self) -> Result<Outcome> {
        if self.first_artificial < self.nv {
            let outcome = self.iterate()?;
            debug_assert_eq!(outcome, Outcome::Optimal);
            let infeas: f64 = (self.first_artificial..self.nv).map(|v| self.value(v)).sum();
            if infeas > self.opts.feasibility_tol {
                return Ok(Outcome::Infeasible);
            }
            for v in self.first_artificial..self.nv {
                self.ub[v] = 0.0;
                if !matches!(self.state[v], State::Basic(_)) {
                    self.state[v] = State::Lower;
                }
            }
        }
        self.phase_cost = self.cost.clone();
        self.recompute_reduced_costs();
        let mut outcome = self.iterate()?;
        // Confirm optimality on a fresh factorization; drift can hide improving columns.
        for _ in 0..3 {
            if outcome != Outcome::Optimal {
                break;
            }
            self.refactor()?;
            if self.pick_entering(false).is_none() {
                break;
            }
            outcome = self.iterate()?;
        }
        Ok(outcome)
    }

    fn eligible(&self, v: usize) -> Option<f64> {
        if v >= self.first_artificial && self.ub[v] == 0.0 {
            return None;
        }
        let tol = self.opts.optimality_tol;
        let dj = self.d[v];
        match self.state[v] {
            State::Basic(_) => None,
            State::Lower if dj < -tol && self.ub[v] > self.lb[v] => Some(1.0),
            State::Upper if dj > tol && self.ub[v] > self.lb[v] => Some(-1.0),
            State::Zero if dj.abs() > tol => Some(-dj.signum()),
            _ => None,
        }
    }

    fn pick_entering(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for v in 0..self.nv {
            if let Some(dir) = self.eligible(v) {
                if bland {
                    return Some((v, dir));
                }
                let score = self.d[v].abs();
                if score > best_score {
                    best_score = score;
                    best = Some((v, dir));
                }
            }
        }
        best
    }

    fn iterate(&mut self) -> Result<Outcome> {
        let max_iter = 50_000 + 50 * (self.m + self.nv);
        let mut degenerate_run = 0usize;
        let mut bland = false;
        loop {
            if self.iterations > max_iter {
                return Err(Error::IterationLimit(max_iter));
            }
            if self.since_refactor >= self.opts.refactor_interval {
                self.refactor()?;
            }
            let Some((q, dir)) = self.pick_entering(bland) else {
                return Ok(Outcome::Optimal);
            };
            let nv = self.nv;

            // Ratio test.
            let mut theta = if self.lb[q].is_finite() && self.ub[q].is_finite() {
                self.ub[q] - self.lb[q]
            } else {
                f64::INFINITY
            };
            let mut leave: Option<(usize, bool)> = None;
            let mut leave_mag = 0.0;
            for r in 0..self.m {
                let a = self.tab[r * nv + q] * dir;
                if a.abs() <= self.opts.pivot_tol {
                    continue;
                }
                let bv = self.basis[r];
                let (limit, to_upper) = if a > 0.0 {
                    if !self.lb[bv].is_finite() {
                        continue;
                    }
                    (((self.xb[r] - self.lb[bv]).max(0.0)) / a, false)
                } else {
                    if !self.ub[bv].is_finite() {
                        continue;
                    }
                    (((self.ub[bv] - self.xb[r]).max(0.0)) / -a, true)
                };
                let better = match leave {
                    _ if limit < theta - 1e-12 => true,
                    None => false,
                    Some((lr, _)) if (limit - theta).abs() <= 1e-12 => {
                        if bland {
                            bv < self.basis[lr]
                        } else {
                            a.abs() > leave_mag
                        }
                    }
                    _ => false,
                };
                if better {
                    theta = limit.min(theta);
                    leave = Some((r, to_upper));
                    leave_mag = a.abs();
                }
            }
            if theta.is_infinite() {
                return Ok(Outcome::Unbounded);
            }

            self.iterations += 1;
            self.since_refactor += 1;
            if theta <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run >= self.opts.stall_threshold {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }

            let entering_value = self.value(q) + dir * theta;
            if theta != 0.0 {
                for r in 0..self.m {
                    let a = self.tab[r * nv + q];
                    if a != 0.0 {
                        self.xb[r] -= dir * theta * a;
                    }
                }
            }
            match leave {
                None => {
                    // Bound flip.
                    self.state[q] = if dir > 0.0 { State::Upper } else { State::Lower };
                }
                Some((r, to_upper)) => {
                    let out = self.basis[r];
                    self.state[out] = if to_upper && self.ub[out] > self.lb[out] {
                        State::Upper
                    } else {
                        State::Lower
                    };
                    self.xb[r] = entering_value;
                    self.basis[r] = q;
                    self.state[q] = State::Basic(r);
                    self.pivot(r, q);
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let nv = self.nv;
        let inv = 1.0 / self.tab[r * nv + q];
        for x in &mut self.tab[r * nv..(r + 1) * nv] {
            *x *= inv;
        }
        self.tab[r * nv + q] = 1.0;
        let (head, rest) = self.tab.split_at_mut(r * nv);
        let (pivot_row, tail) = rest.split_at_mut(nv);
        for row in head.chunks_exact_mut(nv).chain(tail.chunks_exact_mut(nv)) {
            let f = row[q];
            if f != 0.0 {
                for (x, &p) in row.iter_mut().zip(pivot_row.iter()) {
                    *x -= f * p;
                }
                row[q] = 0.0;
            }
        }
        let f = self.d[q];
        if f != 0.0 {
            for (dj, &p) in self.d.iter_mut().zip(pivot_row.iter()) {
                *dj -= f * p;
            }
            self.d[q] = 0.0;
        }
    }

    fn finish(
        &self,
        program: &MixedIntegerProgram,
        lower: &[f64],
        upper: &[f64],
        fixed: &[Option<f64>],
        outcome: Outcome,
    ) -> SimplexResult {
        let n = program.num_columns();
        if outcome == Outcome::Infeasible {
            let mut res = infeasible(n);
            res.iterations = self.iterations;
            return res;
        }
        let mut x = vec![0.0; n];
        let mut basis = vec![BasisStatus::Fixed; n];
        let mut reduced = vec![0.0; n];
        for j in 0..n {
            if let Some(v) = fixed[j] {
                x[j] = v;
            }
        }
        for (p, &j) in self.active.iter().enumerate() {
            let v = self.value(p);
            // Snap tiny drift back onto the bounds.
            x[j] = if (v - lower[j]).abs() <= 1e-11 {
                lower[j]
            } else if (v - upper[j]).abs() <= 1e-11 {
                upper[j]
            } else {
                v
            };
            basis[j] = match self.state[p] {
                State::Basic(_) => BasisStatus::Basic,
                State::Lower => BasisStatus::AtLower,
                State::Upper => BasisStatus::AtUpper,
                State::Zero => BasisStatus::Free,
            };
            reduced[j] = self.d[p];
        }
        // Duals from slack reduced costs price the substituted columns: y_r = -d(slack_r).
        for j in 0..n {
            if fixed[j].is_some() {
                let mut dj = program.columns[j].cost;
                for (r, row) in program.rows.iter().enumerate() {
                    if let Some(&(_, a)) = row.coeffs.iter().find(|(c, _)| *c == j) {
                        dj += self.d[self.n_struct + r] * a;
                    }
                }
                reduced[j] = dj;
            }
        }
        let status = match outcome {
            Outcome::Optimal => LpStatus::Optimal,
            Outcome::Unbounded => LpStatus::Unbounded,
            Outcome::Infeasible => unreachable!(),
        };
        let objective = match status {
            LpStatus::Optimal => program.objective(&x),
            _ => f64::NEG_INFINITY,
        };
        let mut bounded = program.clone();
        for (c, (&l, &u)) in bounded.columns.iter_mut().zip(lower.iter().zip(upper)) {
            c.lower = l;
            c.upper = u;
        }
        let max_residual = bounded.max_violation(&x);
        SimplexResult {
            status,
            objective,
            x,
            basis,
            reduced_costs: reduced,
            iterations: self.iterations,
            max_residual,
        }
    }
}

fn value_of(state: State, lb: f64, ub: f64) -> f64 {
    match state {
        State::Lower => lb,
        State::Upper => ub,
        State::Zero | State::Basic(_) => 0.0,
    }
}

fn slack_bounds(sense: Sense) -> (f64, f64) {
    match sense {
        Sense::Le => (0.0, f64::INFINITY),
        Sense::Ge => (f64::NEG_INFINITY, 0.0),
        Sense::Eq => (0.0, 0.0),
    }
}

/// Rejects optimal results whose residual exceeds the instability threshold.
fn checked(result: SimplexResult, options: &SimplexOptions) -> Result<SimplexResult> {
    if result.status == LpStatus::Optimal && result.max_residual > options.instability_residual {
        return Err(Error::NumericalInstability {
            residual: result.max_residual,
        });
    }
    Ok(result)
}
