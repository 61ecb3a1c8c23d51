//! Bernstein basis, Bezier curves and tensor-product Bezier surfaces.
//!
//! De Casteljau is the evaluator; the direct Bernstein sums are kept as an
//! independent route for checking it.

use thiserror::Error;

use crate::mesh::{Point, Vector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BezierError {
    #[error("basis index {i} out of range for degree {n}")]
    IndexOutOfRange { n: usize, i: usize },
    #[error("parameter {0} outside [0, 1]")]
    Domain(f64),
    #[error("a Bezier curve needs at least two control points, got {0}")]
    TooFewControlPoints(usize),
    #[error("control net must be rectangular with at least 2x2 points")]
    BadNet,
}

/// Binomial coefficient by the multiplicative formula.
pub fn binomial(n: usize, i: usize) -> f64 {
    let k = i.min(n - i);
    let mut c = 1.0;
    for j in 0..k {
        c = c * (n - j) as f64 / (j + 1) as f64;
    }
    c
}

/// `C(n, i) t^i (1 - t)^(n - i)`.
pub fn bernstein(n: usize, i: usize, t: f64) -> Result<f64, BezierError> {
    if i > n {
        return Err(BezierError::IndexOutOfRange { n, i });
    }
    Ok(binomial(n, i) * t.powi(i as i32) * (1.0 - t).powi((n - i) as i32))
}

fn check_unit(t: f64) -> Result<(), BezierError> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(BezierError::Domain(t))
    }
}

fn de_casteljau(points: &[Point], t: f64) -> Point {
    let mut work: Vec<Vector> = points.iter().map(|p| p.coords).collect();
    let n = work.len();
    for level in 1..n {
        for k in 0..(n - level) {
            work[k] = work[k] * (1.0 - t) + work[k + 1] * t;
        }
    }
    Point::from(work[0])
}

#[derive(Debug, Clone, PartialEq)]
pub struct BezierCurve {
    control_points: Vec<Point>,
}

impl BezierCurve {
    pub fn new(control_points: Vec<Point>) -> Result<Self, BezierError> {
        if control_points.len() < 2 {
            return Err(BezierError::TooFewControlPoints(control_points.len()));
        }
        Ok(BezierCurve { control_points })
    }

    pub fn degree(&self) -> usize {
        self.control_points.len() - 1
    }

    pub fn control_points(&self) -> &[Point] {
        &self.control_points
    }

    pub fn eval(&self, t: f64) -> Result<Point, BezierError> {
        check_unit(t)?;
        Ok(de_casteljau(&self.control_points, t))
    }

    /// Direct Bernstein sum.
    pub fn eval_bernstein(&self, t: f64) -> Result<Point, BezierError> {
        check_unit(t)?;
        let n = self.degree();
        let mut acc = Vector::zeros();
        for (i, p) in self.control_points.iter().enumerate() {
            acc += p.coords * bernstein(n, i, t)?;
        }
        Ok(Point::from(acc))
    }
}

/// Tensor-product surface over an `(n+1) x (m+1)` net; `net[i][j]` pairs
/// `u`-index `i` with `w`-index `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BezierSurface {
    net: Vec<Vec<Point>>,
}

impl BezierSurface {
    pub fn new(net: Vec<Vec<Point>>) -> Result<Self, BezierError> {
        if net.len() < 2 {
            return Err(BezierError::BadNet);
        }
        let cols = net[0].len();
        if cols < 2 || net.iter().any(|row| row.len() != cols) {
            return Err(BezierError::BadNet);
        }
        Ok(BezierSurface { net })
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.net.len() - 1, self.net[0].len() - 1)
    }

    pub fn net(&self) -> &[Vec<Point>] {
        &self.net
    }

    pub fn eval(&self, u: f64, w: f64) -> Result<Point, BezierError> {
        check_unit(u)?;
        check_unit(w)?;
        let along_w: Vec<Point> = self.net.iter().map(|row| de_casteljau(row, w)).collect();
        Ok(de_casteljau(&along_w, u))
    }

    /// Direct double Bernstein sum.
    pub fn eval_bernstein(&self, u: f64, w: f64) -> Result<Point, BezierError> {
        check_unit(u)?;
        check_unit(w)?;
        let (n, m) = self.degrees();
        let mut acc = Vector::zeros();
        for (i, row) in self.net.iter().enumerate() {
            let ju = bernstein(n, i, u)?;
            for (j, p) in row.iter().enumerate() {
                acc += p.coords * (ju * bernstein(m, j, w)?);
            }
        }
        Ok(Point::from(acc))
    }
}
