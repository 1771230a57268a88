//! Dense two-phase simplex with Bland's rule.
//!
//! The programs solved here are small (at most a few hundred columns and a
//! few dozen rows, or a few thousand columns for fitting), so the solver keeps
//! a full tableau and favours determinism over speed. It is generic over
//! [`Scalar`]: with `f64` every comparison uses `1e-9`, with
//! [`Rational`](crate::Rational) all decisions are exact.
//!
//! Infeasible programs come back with a Farkas certificate expressed in the
//! caller's rows, see [`LinearProgram::check_farkas`].

use log::trace;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

/// `minimize c·x` subject to row constraints and per-variable bounds.
///
/// Variables default to `x >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram<T> {
    objective: Vec<T>,
    constraints: Vec<Constraint<T>>,
    lower: Vec<Option<T>>,
    upper: Vec<Option<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    /// Primal values (meaningful when optimal).
    pub x: Vec<T>,
    pub objective: T,
    /// Row multipliers `y` with `c - Aᵀy` dual feasible, one per constraint
    /// (when optimal).
    pub duals: Vec<T>,
    /// One multiplier per constraint proving infeasibility (when infeasible).
    pub farkas: Option<Vec<T>>,
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(num_vars: usize) -> Self {
        Self {
            objective: vec![T::zero(); num_vars],
            constraints: Vec::new(),
            lower: vec![Some(T::zero()); num_vars],
            upper: vec![None; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constraints(&self) -> &[Constraint<T>] {
        &self.constraints
    }

    pub fn objective(&self) -> &[T] {
        &self.objective
    }

    pub fn set_objective(&mut self, c: Vec<T>) -> &mut Self {
        self.objective = c;
        self
    }

    pub fn set_objective_coeff(&mut self, j: usize, c: T) -> &mut Self {
        self.objective[j] = c;
        self
    }

    pub fn add_constraint(&mut self, coeffs: Vec<T>, relation: Relation, rhs: T) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn set_bounds(&mut self, j: usize, lower: Option<T>, upper: Option<T>) -> &mut Self {
        self.lower[j] = lower;
        self.upper[j] = upper;
        self
    }

    pub fn set_free(&mut self, j: usize) -> &mut Self {
        self.set_bounds(j, None, None)
    }

    pub fn bounds(&self, j: usize) -> (Option<&T>, Option<&T>) {
        (self.lower[j].as_ref(), self.upper[j].as_ref())
    }

    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.lower.len(),
            });
        }
        for c in &self.constraints {
            if c.coeffs.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.coeffs.len(),
                });
            }
        }
        for j in 0..n {
            if let (Some(l), Some(u)) = (&self.lower[j], &self.upper[j]) {
                if l > u {
                    return Err(Error::InvalidArgument(format!(
                        "variable {j} has lower bound {l} above upper bound {u}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks that `y` proves this program infeasible.
    ///
    /// Each row multiplier must have the sign matching its relation
    /// (`y_r <= 0` for `<=`, `y_r >= 0` for `>=`, free for `=`), so that
    /// `yᵀA x >= yᵀb` for every feasible `x`. The certificate is valid when
    /// the supremum of `yᵀA x` over the variable bounds is finite and strictly
    /// below `yᵀb`.
    pub fn check_farkas(&self, y: &[T]) -> bool {
        if y.len() != self.constraints.len() {
            return false;
        }
        for (c, yr) in self.constraints.iter().zip(y) {
            let ok = match c.relation {
                Relation::Le => !yr.is_pos(),
                Relation::Ge => !yr.is_neg(),
                Relation::Eq => true,
            };
            if !ok {
                return false;
            }
        }
        let n = self.num_vars();
        let mut sup = T::zero();
        let mut rhs = T::zero();
        for (c, yr) in self.constraints.iter().zip(y) {
            rhs = rhs + yr.clone() * c.rhs.clone();
        }
        let scale = T::max_of(T::one(), rhs.abs());
        for j in 0..n {
            let g = self
                .constraints
                .iter()
                .zip(y)
                .fold(T::zero(), |acc, (c, yr)| {
                    acc + yr.clone() * c.coeffs[j].clone()
                });
            if (g.clone() / scale.clone()).near_zero() {
                continue;
            }
            let bound = if g.is_pos() {
                &self.upper[j]
            } else {
                &self.lower[j]
            };
            match bound {
                Some(b) => sup = sup + g * b.clone(),
                None => return false,
            }
        }
        ((rhs - sup) / scale).is_pos()
    }

    /// Solves with the scalar type's own arithmetic.
    pub fn solve(&self) -> Result<LpSolution<T>> {
        self.validate()?;
        let std = StandardForm::build(self);
        let raw = std.tableau_solve()?;
        Ok(std.recover(self, raw))
    }
}

/// Floating-point solve.
pub fn solve(lp: &LinearProgram<f64>) -> Result<LpSolution<f64>> {
    lp.solve()
}

/// Exact rational solve; status decisions carry no tolerance.
pub fn solve_exact(lp: &LinearProgram<Rational>) -> Result<LpSolution<Rational>> {
    lp.solve()
}

// How a user variable is expressed through non-negative standard columns.
#[derive(Clone, Debug)]
enum VarMap<T> {
    // x = offset + s
    Shift { col: usize, offset: T },
    // x = offset - s
    Mirror { col: usize, offset: T },
    // x = s⁺ - s⁻
    Split { pos: usize, neg: usize },
}

struct StandardForm<T> {
    a: Vec<Vec<T>>,
    b: Vec<T>,
    c: Vec<T>,
    vars: Vec<VarMap<T>>,
    // +1 / -1 multiplier applied to each standard row to make b >= 0
    flips: Vec<bool>,
    user_rows: usize,
    obj_offset: T,
}

struct RawSolution<T> {
    status: LpStatus,
    x: Vec<T>,
    y: Vec<T>,
}

impl<T: Scalar> StandardForm<T> {
    fn build(lp: &LinearProgram<T>) -> Self {
        let n = lp.num_vars();
        let mut vars = Vec::with_capacity(n);
        let mut ncols = 0;
        // extra rows s <= u - l for doubly bounded variables
        let mut bound_rows: Vec<(usize, T)> = Vec::new();
        for j in 0..n {
            match (&lp.lower[j], &lp.upper[j]) {
                (Some(l), u) => {
                    vars.push(VarMap::Shift {
                        col: ncols,
                        offset: l.clone(),
                    });
                    if let Some(u) = u {
                        bound_rows.push((ncols, u.clone() - l.clone()));
                    }
                    ncols += 1;
                }
                (None, Some(u)) => {
                    vars.push(VarMap::Mirror {
                        col: ncols,
                        offset: u.clone(),
                    });
                    ncols += 1;
                }
                (None, None) => {
                    vars.push(VarMap::Split {
                        pos: ncols,
                        neg: ncols + 1,
                    });
                    ncols += 2;
                }
            }
        }
        let structural = ncols;
        let slack_count = lp
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count()
            + bound_rows.len();
        let total = structural + slack_count;

        let mut c = vec![T::zero(); total];
        let mut obj_offset = T::zero();
        for (j, map) in vars.iter().enumerate() {
            let cj = lp.objective[j].clone();
            match map {
                VarMap::Shift { col, offset } => {
                    c[*col] = cj.clone();
                    obj_offset = obj_offset + cj * offset.clone();
                }
                VarMap::Mirror { col, offset } => {
                    c[*col] = -cj.clone();
                    obj_offset = obj_offset + cj * offset.clone();
                }
                VarMap::Split { pos, neg } => {
                    c[*pos] = cj.clone();
                    c[*neg] = -cj;
                }
            }
        }

        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut slack = structural;
        for con in &lp.constraints {
            let mut row = vec![T::zero(); total];
            let mut rhs = con.rhs.clone();
            for (j, map) in vars.iter().enumerate() {
                let aj = con.coeffs[j].clone();
                if aj.is_zero() {
                    continue;
                }
                match map {
                    VarMap::Shift { col, offset } => {
                        row[*col] = aj.clone();
                        rhs = rhs - aj * offset.clone();
                    }
                    VarMap::Mirror { col, offset } => {
                        row[*col] = -aj.clone();
                        rhs = rhs - aj * offset.clone();
                    }
                    VarMap::Split { pos, neg } => {
                        row[*pos] = aj.clone();
                        row[*neg] = -aj;
                    }
                }
            }
            match con.relation {
                Relation::Le => {
                    row[slack] = T::one();
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -T::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            a.push(row);
            b.push(rhs);
        }
        for (col, width) in bound_rows {
            let mut row = vec![T::zero(); total];
            row[col] = T::one();
            row[slack] = T::one();
            slack += 1;
            a.push(row);
            b.push(width);
        }
        let mut flips = Vec::with_capacity(b.len());
        for (row, rhs) in a.iter_mut().zip(b.iter_mut()) {
            let flip = *rhs < T::zero();
            if flip {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
                *rhs = -rhs.clone();
            }
            flips.push(flip);
        }
        Self {
            a,
            b,
            c,
            vars,
            flips,
            user_rows: lp.constraints.len(),
            obj_offset,
        }
    }

    fn tableau_solve(&self) -> Result<RawSolution<T>> {
        let mut t = Tableau::new(&self.a, &self.b);
        let rows = self.a.len();
        let ncols = self.c.len();

        // phase 1: minimize the sum of artificials
        let mut phase1_cost = vec![T::zero(); ncols + rows];
        for cost in phase1_cost.iter_mut().skip(ncols) {
            *cost = T::one();
        }
        t.set_costs(&phase1_cost);
        t.run(ncols + rows)?;
        let infeasibility = t.objective_value(&phase1_cost);
        if infeasibility.is_pos() {
            let y = t.duals(&phase1_cost);
            return Ok(RawSolution {
                status: LpStatus::Infeasible,
                x: Vec::new(),
                y,
            });
        }
        t.drive_out_artificials(ncols);

        // phase 2: artificial columns may not re-enter
        let mut cost = self.c.clone();
        cost.extend(std::iter::repeat_n(T::zero(), rows));
        t.set_costs(&cost);
        let bounded = t.run(ncols)?;
        let x = t.primal(ncols);
        let y = t.duals(&cost);
        let status = if bounded {
            LpStatus::Optimal
        } else {
            LpStatus::Unbounded
        };
        Ok(RawSolution { status, x, y })
    }

    fn recover(&self, lp: &LinearProgram<T>, raw: RawSolution<T>) -> LpSolution<T> {
        let unflip = |y: &[T]| -> Vec<T> {
            y.iter()
                .zip(&self.flips)
                .take(self.user_rows)
                .map(|(v, &f)| if f { -v.clone() } else { v.clone() })
                .collect()
        };
        match raw.status {
            LpStatus::Infeasible => LpSolution {
                status: LpStatus::Infeasible,
                x: Vec::new(),
                objective: T::zero(),
                duals: Vec::new(),
                farkas: Some(unflip(&raw.y)),
            },
            LpStatus::Unbounded => LpSolution {
                status: LpStatus::Unbounded,
                x: Vec::new(),
                objective: T::zero(),
                duals: Vec::new(),
                farkas: None,
            },
            LpStatus::Optimal => {
                let x: Vec<T> = self
                    .vars
                    .iter()
                    .map(|m| match m {
                        VarMap::Shift { col, offset } => offset.clone() + raw.x[*col].clone(),
                        VarMap::Mirror { col, offset } => offset.clone() - raw.x[*col].clone(),
                        VarMap::Split { pos, neg } => raw.x[*pos].clone() - raw.x[*neg].clone(),
                    })
                    .collect();
                let objective = lp
                    .objective
                    .iter()
                    .zip(&x)
                    .fold(T::zero(), |acc, (c, v)| acc + c.clone() * v.clone());
                debug_assert!({
                    let std_obj = self
                        .c
                        .iter()
                        .zip(&raw.x)
                        .fold(self.obj_offset.clone(), |acc, (c, v)| {
                            acc + c.clone() * v.clone()
                        });
                    (std_obj - objective.clone()).abs()
                        <= T::from_f64(1e-6) * T::max_of(T::one(), objective.abs())
                });
                LpSolution {
                    status: LpStatus::Optimal,
                    x,
                    objective,
                    duals: unflip(&raw.y),
                    farkas: None,
                }
            }
        }
    }
}

struct Tableau<T> {
    // rows × (ncols + artificials + 1); last column is the right-hand side
    m: Vec<Vec<T>>,
    basis: Vec<usize>,
    reduced: Vec<T>,
    width: usize,
}

impl<T: Scalar> Tableau<T> {
    fn new(a: &[Vec<T>], b: &[T]) -> Self {
        let rows = a.len();
        let ncols = a.first().map_or(0, Vec::len);
        let width = ncols + rows;
        let m = a
            .iter()
            .zip(b)
            .enumerate()
            .map(|(i, (row, rhs))| {
                let mut r = row.clone();
                r.extend((0..rows).map(|k| if k == i { T::one() } else { T::zero() }));
                r.push(rhs.clone());
                r
            })
            .collect();
        Self {
            m,
            basis: (ncols..ncols + rows).collect(),
            reduced: Vec::new(),
            width,
        }
    }

    fn set_costs(&mut self, cost: &[T]) {
        let mut d = cost.to_vec();
        for (i, row) in self.m.iter().enumerate() {
            let cb = cost[self.basis[i]].clone();
            if cb.is_zero() {
                continue;
            }
            for j in 0..self.width {
                d[j] = d[j].clone() - cb.clone() * row[j].clone();
            }
        }
        self.reduced = d;
    }

    fn objective_value(&self, cost: &[T]) -> T {
        self.m
            .iter()
            .zip(&self.basis)
            .fold(T::zero(), |acc, (row, &bj)| {
                acc + cost[bj].clone() * row[self.width].clone()
            })
    }

    /// Simplex multipliers `c_Bᵀ B⁻¹`, read from the artificial columns.
    fn duals(&self, cost: &[T]) -> Vec<T> {
        let ncols = self.width - self.m.len();
        (0..self.m.len())
            .map(|k| {
                self.m
                    .iter()
                    .zip(&self.basis)
                    .fold(T::zero(), |acc, (row, &bj)| {
                        acc + cost[bj].clone() * row[ncols + k].clone()
                    })
            })
            .collect()
    }

    fn primal(&self, ncols: usize) -> Vec<T> {
        let mut x = vec![T::zero(); ncols];
        for (row, &bj) in self.m.iter().zip(&self.basis) {
            if bj < ncols {
                x[bj] = row[self.width].clone();
            }
        }
        x
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let w = self.width;
        let inv = T::one() / self.m[r][col].clone();
        for v in self.m[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        let pivot_row = self.m[r].clone();
        for (i, row) in self.m.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for j in 0..=w {
                if !pivot_row[j].is_zero() {
                    row[j] = row[j].clone() - f.clone() * pivot_row[j].clone();
                }
            }
            if !T::EXACT {
                row[col] = T::zero();
            }
        }
        let f = self.reduced[col].clone();
        if !f.is_zero() {
            for j in 0..w {
                if !pivot_row[j].is_zero() {
                    self.reduced[j] = self.reduced[j].clone() - f.clone() * pivot_row[j].clone();
                }
            }
            if !T::EXACT {
                self.reduced[col] = T::zero();
            }
        }
        self.basis[r] = col;
    }

    /// Bland's rule iterations over columns `< allowed`. Returns `false` when
    /// the objective is unbounded below.
    fn run(&mut self, allowed: usize) -> Result<bool> {
        let limit = 50_000 + 200 * (self.width + self.m.len());
        for iter in 0..limit {
            let Some(col) = (0..allowed).find(|&j| self.reduced[j].is_neg()) else {
                trace!("simplex converged after {iter} pivots");
                return Ok(true);
            };
            let mut leave: Option<(usize, T)> = None;
            for (i, row) in self.m.iter().enumerate() {
                if !row[col].is_pos() {
                    continue;
                }
                let ratio = row[self.width].clone() / row[col].clone();
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, best)) => {
                        let tie_tol = if T::EXACT {
                            T::zero()
                        } else {
                            T::eps() * T::max_of(T::one(), best.abs())
                        };
                        // Bland: smallest basic index among ties
                        let tied = (ratio.clone() - best.clone()).abs() <= tie_tol;
                        if ratio < best.clone() - tie_tol
                            || (tied && self.basis[i] < self.basis[bi])
                        {
                            Some((i, ratio))
                        } else {
                            Some((bi, best))
                        }
                    }
                };
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, col),
            }
        }
        Err(Error::Lp(format!(
            "simplex iteration limit {limit} reached ({} rows, {} columns)",
            self.m.len(),
            self.width
        )))
    }

    /// Pivots zero-level artificials out of the basis where possible; rows
    /// where that fails are redundant and keep their artificial at zero.
    fn drive_out_artificials(&mut self, ncols: usize) {
        for r in 0..self.m.len() {
            if self.basis[r] < ncols {
                continue;
            }
            let best = (0..ncols)
                .filter(|&j| !self.m[r][j].near_zero())
                .max_by(|&a, &b| {
                    self.m[r][a]
                        .abs()
                        .partial_cmp(&self.m[r][b].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
            if let Some(col) = best {
                self.pivot(r, col);
            }
        }
    }
}
