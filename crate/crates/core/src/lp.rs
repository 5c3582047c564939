//! Dense two-phase simplex.
//!
//! Problems here are tiny (tens of variables), so the kernel keeps a full
//! tableau and uses Bland's rule throughout. Every program is converted to
//! `min c'x, Ax = b, x >= 0, b >= 0` before phase one.

use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

/// `maximize objective . x` subject to equality rows, `row . x >= rhs` rows,
/// and per-variable lower bounds (`None` leaves the variable free).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T> {
    pub objective: Vec<T>,
    pub equalities: Vec<(Vec<T>, T)>,
    pub inequalities: Vec<(Vec<T>, T)>,
    pub lower_bounds: Vec<Option<T>>,
}

impl<T: Scalar> LinearProgram<T> {
    /// `n` free variables, zero objective, no constraints.
    pub fn new(n: usize) -> Self {
        Self {
            objective: vec![T::zero(); n],
            equalities: Vec::new(),
            inequalities: Vec::new(),
            lower_bounds: vec![None; n],
        }
    }

    /// `n` nonnegative variables.
    pub fn nonneg(n: usize) -> Self {
        let mut p = Self::new(n);
        p.lower_bounds = vec![Some(T::zero()); n];
        p
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn maximize(mut self, objective: Vec<T>) -> Self {
        self.objective = objective;
        self
    }

    pub fn eq(mut self, row: Vec<T>, rhs: T) -> Self {
        self.equalities.push((row, rhs));
        self
    }

    pub fn ge(mut self, row: Vec<T>, rhs: T) -> Self {
        self.inequalities.push((row, rhs));
        self
    }

    pub fn le(mut self, row: Vec<T>, rhs: T) -> Self {
        let row = row.into_iter().map(|v| -v).collect();
        self.inequalities.push((row, -rhs));
        self
    }

    pub fn lower_bound(mut self, var: usize, bound: Option<T>) -> Self {
        self.lower_bounds[var] = bound;
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower_bounds.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} lower bounds for {} variables",
                self.lower_bounds.len(),
                n
            )));
        }
        let rows = self.equalities.iter().chain(&self.inequalities);
        for (k, (row, rhs)) in rows.enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "constraint {k} has {} coefficients, expected {n}",
                    row.len()
                )));
            }
            if !rhs.is_finite_value() || row.iter().any(|v| !v.is_finite_value()) {
                return Err(Error::NonFinite(format!("constraint {k}")));
            }
        }
        if self.objective.iter().any(|v| !v.is_finite_value()) {
            return Err(Error::NonFinite("objective".into()));
        }
        if self
            .lower_bounds
            .iter()
            .flatten()
            .any(|v| !v.is_finite_value())
        {
            return Err(Error::NonFinite("lower bounds".into()));
        }
        Ok(())
    }

    /// Checks every constraint at `x` within `tol`.
    pub fn is_feasible_point(&self, x: &[T], tol: &T) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let eq_ok = self
            .equalities
            .iter()
            .all(|(row, rhs)| (dot(row, x) - rhs.clone()).abs() <= *tol);
        let ge_ok = self
            .inequalities
            .iter()
            .all(|(row, rhs)| dot(row, x) >= rhs.clone() - tol.clone());
        let lb_ok = self
            .lower_bounds
            .iter()
            .zip(x)
            .all(|(lb, v)| lb.as_ref().is_none_or(|l| *v >= l.clone() - tol.clone()));
        eq_ok && ge_ok && lb_ok
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOptions<T> {
    pub tolerance: T,
    pub max_iterations: usize,
}

impl<T: Scalar> Default for LpOptions<T> {
    fn default() -> Self {
        Self {
            tolerance: T::default_tolerance(),
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome<T> {
    Optimal { value: T, point: Vec<T> },
    Unbounded,
    Infeasible,
}

impl<T> Outcome<T> {
    pub fn is_optimal(&self) -> bool {
        matches!(self, Outcome::Optimal { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility<T> {
    pub feasible: bool,
    pub point: Option<Vec<T>>,
    /// Optimal sum of artificial variables; positive iff infeasible.
    pub phase_one_value: T,
}

pub fn lp_feasible<T: Scalar>(prog: &LinearProgram<T>) -> Result<Feasibility<T>> {
    lp_feasible_with(prog, &LpOptions::default())
}

pub fn lp_feasible_with<T: Scalar>(
    prog: &LinearProgram<T>,
    opts: &LpOptions<T>,
) -> Result<Feasibility<T>> {
    prog.validate()?;
    let mut solver = Standardized::build(prog, opts);
    let phase_one_value = solver.phase_one()?;
    if phase_one_value > opts.tolerance {
        return Ok(Feasibility {
            feasible: false,
            point: None,
            phase_one_value,
        });
    }
    Ok(Feasibility {
        feasible: true,
        point: Some(solver.recover()),
        phase_one_value,
    })
}

pub fn lp_maximize<T: Scalar>(prog: &LinearProgram<T>) -> Result<Outcome<T>> {
    lp_maximize_with(prog, &LpOptions::default())
}

pub fn lp_maximize_with<T: Scalar>(
    prog: &LinearProgram<T>,
    opts: &LpOptions<T>,
) -> Result<Outcome<T>> {
    prog.validate()?;
    let mut solver = Standardized::build(prog, opts);
    let phase_one_value = solver.phase_one()?;
    if phase_one_value > opts.tolerance {
        return Ok(Outcome::Infeasible);
    }
    solver.drop_artificials();
    if !solver.phase_two()? {
        return Ok(Outcome::Unbounded);
    }
    let point = solver.recover();
    let value = dot(&prog.objective, &point);
    Ok(Outcome::Optimal { value, point })
}

#[derive(Debug, Clone)]
enum ColumnMap<T> {
    Shifted { col: usize, lower: T },
    Split { pos: usize, neg: usize },
}

struct Standardized<'a, T> {
    opts: &'a LpOptions<T>,
    map: Vec<ColumnMap<T>>,
    /// Phase-two costs (minimization) of the structural columns.
    cost: Vec<T>,
    n_struct: usize,
    /// Rows of length `n_struct + n_rows + 1`; last entry is the rhs.
    tab: Vec<Vec<T>>,
    basis: Vec<usize>,
    iterations: usize,
}

impl<'a, T: Scalar> Standardized<'a, T> {
    fn build(prog: &LinearProgram<T>, opts: &'a LpOptions<T>) -> Self {
        let mut map = Vec::with_capacity(prog.num_vars());
        let mut n_cols = 0;
        for lb in &prog.lower_bounds {
            match lb {
                Some(l) => {
                    map.push(ColumnMap::Shifted {
                        col: n_cols,
                        lower: l.clone(),
                    });
                    n_cols += 1;
                }
                None => {
                    map.push(ColumnMap::Split {
                        pos: n_cols,
                        neg: n_cols + 1,
                    });
                    n_cols += 2;
                }
            }
        }
        let n_var_cols = n_cols;
        let n_surplus = prog.inequalities.len();
        let n_struct = n_var_cols + n_surplus;
        let n_rows = prog.equalities.len() + prog.inequalities.len();
        let width = n_struct + n_rows + 1;

        let mut cost = vec![T::zero(); n_struct];
        for (j, m) in map.iter().enumerate() {
            let c = prog.objective[j].clone();
            match m {
                ColumnMap::Shifted { col, .. } => cost[*col] = -c,
                ColumnMap::Split { pos, neg } => {
                    cost[*pos] = -c.clone();
                    cost[*neg] = c;
                }
            }
        }

        let mut tab = Vec::with_capacity(n_rows);
        let rows = prog
            .equalities
            .iter()
            .map(|r| (r, None))
            .chain(prog.inequalities.iter().enumerate().map(|(k, r)| (r, Some(k))));
        for (i, ((coeffs, rhs), surplus)) in rows.enumerate() {
            let mut row = vec![T::zero(); width];
            let mut b = rhs.clone();
            for (j, m) in map.iter().enumerate() {
                let a = coeffs[j].clone();
                match m {
                    ColumnMap::Shifted { col, lower } => {
                        b = b - a.clone() * lower.clone();
                        row[*col] = a;
                    }
                    ColumnMap::Split { pos, neg } => {
                        row[*neg] = -a.clone();
                        row[*pos] = a;
                    }
                }
            }
            if let Some(k) = surplus {
                row[n_var_cols + k] = -T::one();
            }
            if b < T::zero() {
                for v in row.iter_mut().take(n_struct) {
                    *v = -v.clone();
                }
                b = -b;
            }
            row[n_struct + i] = T::one();
            row[width - 1] = b;
            tab.push(row);
        }
        let basis = (0..n_rows).map(|i| n_struct + i).collect();
        Self {
            opts,
            map,
            cost,
            n_struct,
            tab,
            basis,
            iterations: 0,
        }
    }

    fn width(&self) -> usize {
        self.n_struct + self.basis.len() + 1
    }

    fn rhs(&self, i: usize) -> &T {
        self.tab[i].last().expect("tableau row has rhs")
    }

    fn phase_one(&mut self) -> Result<T> {
        let width = self.width();
        let mut cost = vec![T::zero(); width - 1];
        for c in cost.iter_mut().skip(self.n_struct) {
            *c = T::one();
        }
        let active = vec![true; width - 1];
        let bounded = self.simplex(&cost, &active)?;
        debug_assert!(bounded, "phase one is bounded below by zero");
        let value = (0..self.basis.len())
            .filter(|&i| self.basis[i] >= self.n_struct)
            .fold(T::zero(), |acc, i| acc + self.rhs(i).clone());
        Ok(value)
    }

    /// Pivots zero-level artificials out of the basis and deletes rows that
    /// turn out to be redundant.
    fn drop_artificials(&mut self) {
        let tol = self.opts.tolerance.clone();
        let mut redundant = Vec::new();
        for i in 0..self.basis.len() {
            if self.basis[i] < self.n_struct {
                continue;
            }
            let col = (0..self.n_struct).find(|&j| self.tab[i][j].abs() > tol);
            match col {
                Some(j) => self.pivot(i, j),
                None => redundant.push(i),
            }
        }
        for &i in redundant.iter().rev() {
            self.tab.remove(i);
            self.basis.remove(i);
        }
    }

    fn phase_two(&mut self) -> Result<bool> {
        let width = self.tab.first().map_or(self.n_struct + 1, Vec::len);
        let mut cost = vec![T::zero(); width - 1];
        cost[..self.n_struct].clone_from_slice(&self.cost);
        let active: Vec<bool> = (0..width - 1).map(|j| j < self.n_struct).collect();
        self.simplex(&cost, &active)
    }

    /// Minimizes `cost` over active columns. Returns `false` if unbounded.
    fn simplex(&mut self, cost: &[T], active: &[bool]) -> Result<bool> {
        let tol = self.opts.tolerance.clone();
        let n_cols = cost.len();
        loop {
            let mut is_basic = vec![false; n_cols];
            for &b in &self.basis {
                is_basic[b] = true;
            }
            // Bland: lowest-index improving column.
            let entering = (0..n_cols).find(|&j| {
                if !active[j] || is_basic[j] {
                    return false;
                }
                let reduced = self
                    .basis
                    .iter()
                    .enumerate()
                    .fold(cost[j].clone(), |acc, (i, &b)| {
                        acc - cost[b].clone() * self.tab[i][j].clone()
                    });
                reduced < -tol.clone()
            });
            let Some(col) = entering else {
                return Ok(true);
            };

            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.basis.len() {
                let a = &self.tab[i][col];
                if *a <= tol {
                    continue;
                }
                let ratio = self.rhs(i).clone() / a.clone();
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, best)) => {
                        let diff = ratio.clone() - best.clone();
                        if diff < -tol.clone()
                            || (diff.abs() <= tol && self.basis[i] < self.basis[bi])
                        {
                            Some((i, ratio))
                        } else {
                            Some((bi, best))
                        }
                    }
                };
            }
            let Some((row, _)) = leave else {
                return Ok(false);
            };
            self.pivot(row, col);
            self.iterations += 1;
            if self.iterations > self.opts.max_iterations {
                return Err(Error::IterationCap(self.opts.max_iterations));
            }
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.tab[row][col].clone();
        for v in self.tab[row].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = self.tab[row].clone();
        let chop = if T::EXACT {
            None
        } else {
            Some(self.opts.tolerance.clone() * T::from_ratio(1, 1000))
        };
        for (i, r) in self.tab.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col].clone();
            if f.is_zero() {
                continue;
            }
            for (v, pv) in r.iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * pv.clone();
                if let Some(c) = &chop {
                    if v.abs() < *c {
                        *v = T::zero();
                    }
                }
            }
        }
        self.basis[row] = col;
    }

    fn recover(&self) -> Vec<T> {
        let mut std = vec![T::zero(); self.n_struct];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_struct {
                std[b] = self.rhs(i).clone();
            }
        }
        self.map
            .iter()
            .map(|m| match m {
                ColumnMap::Shifted { col, lower } => lower.clone() + std[*col].clone(),
                ColumnMap::Split { pos, neg } => std[*pos].clone() - std[*neg].clone(),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn simplex_vertex_is_feasible() {
        let p = LinearProgram::<f64>::nonneg(2).eq(vec![1.0, 1.0], 1.0);
        let f = lp_feasible(&p).unwrap();
        assert!(f.feasible);
        assert!(p.is_feasible_point(f.point.as_ref().unwrap(), &1e-9));
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let p = LinearProgram::<f64>::nonneg(1).eq(vec![1.0], -1.0);
        let f = lp_feasible(&p).unwrap();
        assert!(!f.feasible);
        assert!(f.phase_one_value > 0.0);
        assert_eq!(lp_maximize(&p).unwrap(), Outcome::Infeasible);
    }

    #[test]
    fn unique_solution_recovered() {
        let p = LinearProgram::<Rational>::nonneg(2)
            .eq(vec![r(1, 1), r(-1, 1)], r(0, 1))
            .eq(vec![r(1, 1), r(1, 1)], r(2, 1));
        let f = lp_feasible(&p).unwrap();
        assert_eq!(f.point.unwrap(), vec![r(1, 1), r(1, 1)]);
    }

    #[test]
    fn single_bound_optimum() {
        let p = LinearProgram::<f64>::new(1).maximize(vec![1.0]).le(vec![1.0], 1.0);
        match lp_maximize(&p).unwrap() {
            Outcome::Optimal { value, point } => {
                assert!((value - 1.0).abs() < 1e-12);
                assert!((point[0] - 1.0).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn free_unconstrained_is_unbounded() {
        let p = LinearProgram::<f64>::new(1).maximize(vec![1.0]);
        assert_eq!(lp_maximize(&p).unwrap(), Outcome::Unbounded);
    }

    #[test]
    fn simplex_vertex_optimum() {
        let p = LinearProgram::<Rational>::nonneg(2)
            .maximize(vec![r(1, 1), r(0, 1)])
            .eq(vec![r(1, 1), r(1, 1)], r(1, 1));
        assert_eq!(
            lp_maximize(&p).unwrap(),
            Outcome::Optimal {
                value: r(1, 1),
                point: vec![r(1, 1), r(0, 1)]
            }
        );
    }

    #[test]
    fn shifted_lower_bounds() {
        // max -x s.t. x >= 3 (as a bound) -> x = 3.
        let p = LinearProgram::<Rational>::new(1)
            .maximize(vec![r(-1, 1)])
            .lower_bound(0, Some(r(3, 1)));
        assert_eq!(
            lp_maximize(&p).unwrap(),
            Outcome::Optimal {
                value: r(-3, 1),
                point: vec![r(3, 1)]
            }
        );
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let p = LinearProgram::<Rational>::nonneg(2)
            .maximize(vec![r(1, 1), r(2, 1)])
            .eq(vec![r(1, 1), r(1, 1)], r(1, 1))
            .eq(vec![r(2, 1), r(2, 1)], r(2, 1));
        assert_eq!(
            lp_maximize(&p).unwrap(),
            Outcome::Optimal {
                value: r(2, 1),
                point: vec![r(0, 1), r(1, 1)]
            }
        );
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let p = LinearProgram::<f64>::nonneg(2).eq(vec![1.0], 1.0);
        assert!(matches!(lp_feasible(&p), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn nan_is_rejected() {
        let p = LinearProgram::<f64>::nonneg(1).eq(vec![f64::NAN], 1.0);
        assert!(matches!(lp_maximize(&p), Err(Error::NonFinite(_))));
    }

    #[test]
    fn iteration_cap_is_an_error() {
        let p = LinearProgram::<f64>::nonneg(3)
            .maximize(vec![1.0, 1.0, 1.0])
            .le(vec![1.0, 0.0, 0.0], 1.0)
            .le(vec![0.0, 1.0, 0.0], 1.0)
            .le(vec![0.0, 0.0, 1.0], 1.0);
        let opts = LpOptions {
            tolerance: 1e-9,
            max_iterations: 1,
        };
        assert_eq!(lp_maximize_with(&p, &opts), Err(Error::IterationCap(1)));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's classic cycling example under the textbook largest-coefficient rule.
        let p = LinearProgram::<Rational>::nonneg(4)
            .maximize(vec![r(3, 4), r(-150, 1), r(1, 50), r(-6, 1)])
            .le(vec![r(1, 4), r(-60, 1), r(-1, 25), r(9, 1)], r(0, 1))
            .le(vec![r(1, 2), r(-90, 1), r(-1, 50), r(3, 1)], r(0, 1))
            .le(vec![r(0, 1), r(0, 1), r(1, 1), r(0, 1)], r(1, 1));
        match lp_maximize(&p).unwrap() {
            Outcome::Optimal { value, .. } => assert_eq!(value, r(1, 20)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
