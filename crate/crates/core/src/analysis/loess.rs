//! Locally weighted polynomial regression with the tricube kernel.
//!
//! For each evaluation point the `ceil(span * n)` nearest observations are
//! weighted by `(1 - (d / d_max)^3)^3`, where `d_max` is the largest distance
//! in the neighborhood, and a weighted least-squares polynomial is fit and
//! evaluated at that point. No robustness iterations.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

pub const DEFAULT_SPAN: f64 = 0.5;
pub const DEFAULT_DEGREE: usize = 2;
pub const DEFAULT_GRID_POINTS: usize = 101;
const TIE_JITTER: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LoessError {
    #[error("span must lie in (0, 1], got {0}")]
    InvalidSpan(f64),
    #[error("degree must be 1 or 2, got {0}")]
    InvalidDegree(usize),
    #[error("grid needs at least 2 points, got {0}")]
    InvalidGrid(usize),
    #[error("need at least {needed} points, got {found}")]
    InsufficientPoints { needed: usize, found: usize },
    #[error("non-finite input point")]
    NonFinite,
    #[error("neighborhood around x = {0} cannot support the local fit")]
    DegenerateNeighborhood(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoessParams {
    pub span: f64,
    pub degree: usize,
    pub grid_points: usize,
}

impl Default for LoessParams {
    fn default() -> Self {
        LoessParams {
            span: DEFAULT_SPAN,
            degree: DEFAULT_DEGREE,
            grid_points: DEFAULT_GRID_POINTS,
        }
    }
}

impl LoessParams {
    pub fn check(&self) -> Result<(), LoessError> {
        if !(self.span > 0.0 && self.span <= 1.0) {
            return Err(LoessError::InvalidSpan(self.span));
        }
        if !(1..=2).contains(&self.degree) {
            return Err(LoessError::InvalidDegree(self.degree));
        }
        if self.grid_points < 2 {
            return Err(LoessError::InvalidGrid(self.grid_points));
        }
        Ok(())
    }

    fn neighborhood_size(&self, n: usize) -> usize {
        let k = (self.span * n as f64 - 1e-9).ceil() as usize;
        k.max(self.degree + 2).min(n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoessFit<T> {
    pub points: Vec<(T, T)>,
    pub span: T,
    pub degree: usize,
    pub fitted: Vec<(T, T)>,
}

/// Tricube kernel: 1 at `d = 0`, 0 at and beyond `d = d_max`.
pub fn tricube<T: Scalar>(d: T, d_max: T) -> T {
    if !(d_max > T::zero()) {
        return if d == T::zero() { T::one() } else { T::zero() };
    }
    let u = (d / d_max).abs();
    if u >= T::one() {
        return T::zero();
    }
    let t = T::one() - u * u * u;
    t * t * t
}

/// Selection coordinates: ties get `1e-12 * rank` added, where rank counts
/// earlier points (in input order) with the same x.
fn jittered<T: Scalar>(points: &[(T, T)]) -> Vec<T> {
    let jitter = T::of(TIE_JITTER);
    points
        .iter()
        .enumerate()
        .map(|(i, &(x, _))| {
            let rank = points[..i].iter().filter(|p| p.0 == x).count();
            x + jitter * T::from_usize(rank).unwrap()
        })
        .collect()
}

fn validate<T: Scalar>(points: &[(T, T)], params: &LoessParams) -> Result<(), LoessError> {
    params.check()?;
    let needed = params.degree + 2;
    if points.len() < needed {
        return Err(LoessError::InsufficientPoints {
            needed,
            found: points.len(),
        });
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(LoessError::NonFinite);
    }
    Ok(())
}

/// Solves the small dense system in place by Gaussian elimination with
/// partial pivoting. `None` when a pivot is negligible.
fn solve<T: Scalar>(mut m: Vec<Vec<T>>, mut rhs: Vec<T>) -> Option<Vec<T>> {
    let p = rhs.len();
    let scale = m
        .iter()
        .enumerate()
        .map(|(i, r)| r[i].abs())
        .fold(T::zero(), T::max);
    let tiny = scale * T::epsilon() * T::of(1e4);
    for col in 0..p {
        let piv = (col..p).max_by(|&a, &b| {
            m[a][col]
                .abs()
                .partial_cmp(&m[b][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if !(m[piv][col].abs() > tiny) {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..p {
            let f = m[row][col] / m[col][col];
            for k in col..p {
                let v = m[col][k];
                m[row][k] = m[row][k] - f * v;
            }
            rhs[row] = rhs[row] - f * rhs[col];
        }
    }
    let mut out = vec![T::zero(); p];
    for row in (0..p).rev() {
        let mut acc = rhs[row];
        for k in row + 1..p {
            acc = acc - m[row][k] * out[k];
        }
        out[row] = acc / m[row][row];
    }
    Some(out)
}

fn fit_at<T: Scalar>(points: &[(T, T)], select_x: &[T], x0: T, params: &LoessParams) -> Result<T, LoessError> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        (select_x[a] - x0)
            .abs()
            .partial_cmp(&(select_x[b] - x0).abs())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    // A neighborhood whose positively weighted points cannot determine the
    // polynomial (e.g. symmetric ties at d_max) grows one point at a time.
    for k in params.neighborhood_size(points.len())..=points.len() {
        if let Some(y) = local_fit(points, &order[..k], x0, params.degree) {
            return Ok(y);
        }
    }
    Err(LoessError::DegenerateNeighborhood(x0.to_f64_lossy()))
}

fn local_fit<T: Scalar>(points: &[(T, T)], hood: &[usize], x0: T, degree: usize) -> Option<T> {
    let d_max = hood
        .iter()
        .map(|&i| (points[i].0 - x0).abs())
        .fold(T::zero(), T::max);
    if !(d_max > T::zero()) {
        return None;
    }

    // centered, scaled design: the intercept is the fitted value at x0.
    // Responses are offset by the nearest point's y so constant data yields
    // a zero right-hand side and comes back exactly.
    let y_ref = points[hood[0]].1;
    let p = degree + 1;
    let mut normal = vec![vec![T::zero(); p]; p];
    let mut rhs = vec![T::zero(); p];
    let mut basis = vec![T::one(); p];
    for &i in hood {
        let (x, y) = points[i];
        let w = tricube((x - x0).abs(), d_max);
        if w == T::zero() {
            continue;
        }
        let u = (x - x0) / d_max;
        for j in 1..p {
            basis[j] = basis[j - 1] * u;
        }
        for r in 0..p {
            rhs[r] = rhs[r] + w * basis[r] * (y - y_ref);
            for c in 0..p {
                normal[r][c] = normal[r][c] + w * basis[r] * basis[c];
            }
        }
    }
    let y_hat = y_ref + solve(normal, rhs)?[0];
    y_hat.is_finite().then_some(y_hat)
}

/// Fitted value at a single point.
pub fn loess_at<T: Scalar>(points: &[(T, T)], x0: T, params: &LoessParams) -> Result<T, LoessError> {
    validate(points, params)?;
    fit_at(points, &jittered(points), x0, params)
}

/// Fit over an evenly spaced grid spanning `[min x, max x]`.
pub fn loess_fit_with<T: Scalar>(points: &[(T, T)], params: &LoessParams) -> Result<LoessFit<T>, LoessError> {
    validate(points, params)?;
    let select_x = jittered(points);
    let lo = points.iter().map(|p| p.0).fold(T::infinity(), T::min);
    let hi = points.iter().map(|p| p.0).fold(T::neg_infinity(), T::max);
    if !(hi > lo) {
        return Err(LoessError::DegenerateNeighborhood(lo.to_f64_lossy()));
    }
    let steps = T::from_usize(params.grid_points - 1).unwrap();
    let fitted = (0..params.grid_points)
        .map(|i| {
            let x0 = if i + 1 == params.grid_points {
                hi
            } else {
                lo + (hi - lo) * T::from_usize(i).unwrap() / steps
            };
            fit_at(points, &select_x, x0, params).map(|y| (x0, y))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LoessFit {
        points: points.to_vec(),
        span: T::of(params.span),
        degree: params.degree,
        fitted,
    })
}

/// Fit with the default 101-point grid.
pub fn loess_fit<T: Scalar>(points: &[(T, T)], span: f64, degree: usize) -> Result<LoessFit<T>, LoessError> {
    loess_fit_with(
        points,
        &LoessParams {
            span,
            degree,
            grid_points: DEFAULT_GRID_POINTS,
        },
    )
}
