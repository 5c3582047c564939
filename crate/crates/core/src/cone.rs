//! Polyhedral ordering cones `K = {y : A y >= 0}` with a fixed interior
//! direction `e`.
//!
//! Every epsilon-shifted comparison between two points reduces to the scalar
//! [`Cone::margin`]: with `mu = min_j a_j.(to - from) / a_j.e`,
//!
//! * `from <_K to - eps e`  iff `eps < mu`
//! * `from <=_K to - eps e` iff `eps <= mu`

use crate::error::{Error, Result};
use crate::lp::{lp_feasible, LinearProgram};
use crate::scalar::{dot, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Cone<T> {
    rows: Vec<Vec<T>>,
    e: Vec<T>,
    /// `a_j . e`, strictly positive.
    row_dot_e: Vec<T>,
}

/// Cone relation between two points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    /// `y1 <=_K y2`
    Weak,
    /// `y1 <_K y2` (difference in the interior)
    Strict,
    /// `y1 <=_K y2` and `y1 != y2`
    Strong,
}

impl<T: Scalar> Cone<T> {
    /// Validates pointedness (full column rank), solidness witnessed by
    /// `A e > 0`, and nonzero rows.
    pub fn new(rows: Vec<Vec<T>>, e: Vec<T>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyCone);
        }
        let m = e.len();
        if m == 0 {
            return Err(Error::DimensionMismatch("interior direction is empty".into()));
        }
        for (j, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::DimMismatch {
                    field: format!("cone.rows[{j}]"),
                    expected: m,
                    found: row.len(),
                });
            }
            if row.iter().chain(&e).any(|v| !v.is_finite_value()) {
                return Err(Error::NonFinite(format!("cone row {j}")));
            }
        }
        let tol = T::default_tolerance();
        for (j, row) in rows.iter().enumerate() {
            if row.iter().all(|v| v.abs() <= tol) {
                return Err(Error::ZeroRow { row: j });
            }
        }
        let rank = matrix_rank(&rows, &tol);
        if rank < m {
            return Err(Error::NotPointed { rank, dim: m });
        }
        let mut row_dot_e = Vec::with_capacity(rows.len());
        for (j, row) in rows.iter().enumerate() {
            let v = dot(row, &e);
            if v <= tol {
                return Err(Error::NotInterior { row: j });
            }
            row_dot_e.push(v);
        }
        Ok(Self { rows, e, row_dot_e })
    }

    /// `R^m_+` with `e = (1, ..., 1)`.
    pub fn orthant(m: usize) -> Self {
        let rows = (0..m)
            .map(|i| (0..m).map(|j| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
        Self::new(rows, vec![T::one(); m]).expect("orthant is a valid cone")
    }

    pub fn dim(&self) -> usize {
        self.e.len()
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn e(&self) -> &[T] {
        &self.e
    }

    pub fn row_dot_e(&self) -> &[T] {
        &self.row_dot_e
    }

    /// `min_j a_j.(to - from) / a_j.e`.
    pub fn margin(&self, from: &[T], to: &[T]) -> T {
        self.rows
            .iter()
            .zip(&self.row_dot_e)
            .map(|(a, ae)| {
                let s = a
                    .iter()
                    .zip(from.iter().zip(to))
                    .fold(T::zero(), |acc, (aj, (f, t))| {
                        acc + aj.clone() * (t.clone() - f.clone())
                    });
                s / ae.clone()
            })
            .reduce(|a, b| if b < a { b } else { a })
            .expect("cone has rows")
    }

    /// `y - eps e`.
    pub fn shift(&self, y: &[T], eps: &T) -> Vec<T> {
        y.iter()
            .zip(&self.e)
            .map(|(v, e)| v.clone() - eps.clone() * e.clone())
            .collect()
    }

    /// Direct test of `from ⋄ (to - eps e)` for the chosen relation.
    pub fn compare(&self, from: &[T], to: &[T], eps: &T, order: Order) -> bool {
        let tol = T::default_tolerance();
        let mu = self.margin(from, to);
        match order {
            Order::Weak => crate::scalar::le_tol(eps, &mu, &tol),
            Order::Strict => crate::scalar::lt_tol(eps, &mu, &tol),
            Order::Strong => {
                crate::scalar::le_tol(eps, &mu, &tol)
                    && !crate::scalar::points_eq(from, &self.shift(to, eps), &tol)
            }
        }
    }

    /// `y in K` via the rows directly.
    pub fn contains(&self, y: &[T]) -> bool {
        let tol = T::default_tolerance();
        self.rows.iter().all(|a| dot(a, y) >= -tol.clone())
    }

    /// `y in int K`.
    pub fn contains_interior(&self, y: &[T]) -> bool {
        let tol = T::default_tolerance();
        self.rows.iter().all(|a| dot(a, y) > tol)
    }

    /// Squared radius `r^2` with `r = gamma * eps * min_j a_j.e / |a_j|`, so
    /// that the closed ball `eps e + r B` lies inside `int K`. Exact for
    /// rational scalars.
    pub fn r_epsilon_squared(&self, eps: &T, gamma: &T) -> Result<T> {
        if *eps <= T::zero() {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        if *gamma <= T::zero() || *gamma >= T::one() {
            return Err(Error::InvalidParameter("gamma must lie in (0, 1)".into()));
        }
        let ratio = self
            .rows
            .iter()
            .zip(&self.row_dot_e)
            .map(|(a, ae)| ae.clone() * ae.clone() / dot(a, a))
            .reduce(|a, b| if b < a { b } else { a })
            .expect("cone has rows");
        let g = gamma.clone() * eps.clone();
        Ok(g.clone() * g * ratio)
    }

    pub fn r_epsilon(&self, eps: &T, gamma: &T) -> Result<T> {
        Ok(self.r_epsilon_squared(eps, gamma)?.sqrt_value())
    }

    /// `v in K*` iff `v = A^T lambda` for some `lambda >= 0`.
    pub fn in_dual_cone(&self, v: &[T]) -> Result<bool> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for cone of dimension {}",
                v.len(),
                self.dim()
            )));
        }
        let j = self.rows.len();
        let mut prog = LinearProgram::nonneg(j);
        for (i, vi) in v.iter().enumerate() {
            let row = self.rows.iter().map(|a| a[i].clone()).collect();
            prog = prog.eq(row, vi.clone());
        }
        Ok(lp_feasible(&prog)?.feasible)
    }
}

/// Row-echelon rank with partial pivoting.
pub(crate) fn matrix_rank<T: Scalar>(rows: &[Vec<T>], tol: &T) -> usize {
    let mut m: Vec<Vec<T>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        if rank == m.len() {
            break;
        }
        let pivot = (rank..m.len())
            .filter(|&r| m[r][col].abs() > *tol)
            .max_by(|&a, &b| {
                m[a][col]
                    .abs()
                    .partial_cmp(&m[b][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
        let Some(p) = pivot else { continue };
        m.swap(rank, p);
        let (top, rest) = m.split_at_mut(rank + 1);
        let pivot = &top[rank];
        for row in rest {
            let f = row[col].clone() / pivot[col].clone();
            if f.is_zero() {
                continue;
            }
            for (dst, src) in row[col..ncols].iter_mut().zip(&pivot[col..ncols]) {
                *dst = dst.clone() - f.clone() * src.clone();
            }
        }
        rank += 1;
    }
    rank
}
