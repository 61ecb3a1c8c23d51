//! Height fields over a hole's frame plane, fitted to the surrounding surface.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::analysis::{normal_angle_cos, Hole, LocalFrame, RingVertex};
use crate::bezier::BezierSurface;
use crate::geom2d::Vec2;
use crate::mesh::{Point, TriangleMesh};

/// How new interior points get their height before smoothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum HeightModel {
    /// Keep the height of the ring point each new point came from.
    Inherit,
    /// Least-squares quadric fitted to the hole rim and its 1-ring.
    #[default]
    Quadric,
    /// Least-squares biquadratic Bezier patch over the same data.
    Bezier,
}

impl std::str::FromStr for HeightModel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inherit" => Ok(HeightModel::Inherit),
            "quadric" => Ok(HeightModel::Quadric),
            "bezier" => Ok(HeightModel::Bezier),
            other => Err(format!("unknown height model '{other}'")),
        }
    }
}

impl std::fmt::Display for HeightModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            HeightModel::Inherit => "inherit",
            HeightModel::Quadric => "quadric",
            HeightModel::Bezier => "bezier",
        })
    }
}

/// A fitted height function `h(x, y)` in frame coordinates.
#[derive(Debug, Clone)]
pub enum HeightField {
    /// Polynomial in scaled coordinates `(x / scale, y / scale)`:
    /// `c0 + c1 x + c2 y + c3 x^2 + c4 xy + c5 y^2` (trailing terms may be zero).
    Polynomial { coeffs: [f64; 6], scale: f64 },
    /// Bezier patch whose control points sit on a uniform grid over `[lo, hi]`.
    Bezier {
        surface: BezierSurface,
        lo: Vec2,
        hi: Vec2,
    },
}

impl HeightField {
    pub fn eval(&self, xy: Vec2) -> f64 {
        match self {
            HeightField::Polynomial { coeffs: c, scale } => {
                let (x, y) = (xy.x / scale, xy.y / scale);
                c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y
            }
            HeightField::Bezier { surface, lo, hi } => {
                let u = ((xy.x - lo.x) / (hi.x - lo.x)).clamp(0.0, 1.0);
                let w = ((xy.y - lo.y) / (hi.y - lo.y)).clamp(0.0, 1.0);
                surface.eval(u, w).map(|p| p.z).unwrap_or(0.0)
            }
        }
    }
}

/// Rim samples for fitting: the ring itself plus mesh neighbours of ring
/// vertices whose normals face the same way as the hole (cosine at least
/// `min_cos` against the frame normal).
pub fn rim_samples(mesh: &TriangleMesh, hole: &Hole, min_cos: f64) -> Vec<(Vec2, f64)> {
    let frame = &hole.frame;
    let mut out: Vec<(Vec2, f64)> = hole.points.iter().map(|p| frame.to_local(p)).collect();
    let ring_ids: BTreeSet<usize> = hole
        .ring
        .iter()
        .filter_map(|r| match r {
            RingVertex::Mesh(v) => Some(*v),
            RingVertex::Segment { .. } => None,
        })
        .collect();
    let mut extra = BTreeSet::new();
    for &v in &ring_ids {
        for w in mesh.vertex_neighbors(v) {
            if ring_ids.contains(&w) || extra.contains(&w) {
                continue;
            }
            let Ok(n) = mesh.vertex_normal(w) else { continue };
            if normal_angle_cos(&n, &frame.n).unwrap_or(-1.0) >= min_cos {
                extra.insert(w);
            }
        }
    }
    out.extend(extra.iter().map(|&w| frame.to_local(&mesh.vertex(w))));
    out
}

fn solve_least_squares(rows: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let k = rows.first()?.len();
    if rows.len() < k {
        return None;
    }
    let a = DMatrix::from_fn(rows.len(), k, |r, c| rows[r][c]);
    let b = DVector::from_column_slice(rhs);
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smax > 0.0) || smin / smax < 1e-9 {
        return None;
    }
    let x = svd.solve(&b, 0.0).ok()?;
    Some(x.iter().copied().collect())
}

fn fit_polynomial(samples: &[(Vec2, f64)], terms: usize, scale: f64) -> Option<HeightField> {
    let rows: Vec<Vec<f64>> = samples
        .iter()
        .map(|(p, _)| {
            let (x, y) = (p.x / scale, p.y / scale);
            [1.0, x, y, x * x, x * y, y * y][..terms].to_vec()
        })
        .collect();
    let rhs: Vec<f64> = samples.iter().map(|(_, h)| *h).collect();
    let sol = solve_least_squares(&rows, &rhs)?;
    let mut coeffs = [0.0; 6];
    coeffs[..terms].copy_from_slice(&sol);
    Some(HeightField::Polynomial { coeffs, scale })
}

fn fit_bezier(samples: &[(Vec2, f64)], degree: usize) -> Option<HeightField> {
    let mut lo = samples[0].0;
    let mut hi = samples[0].0;
    for (p, _) in samples {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    if hi.x - lo.x <= 0.0 || hi.y - lo.y <= 0.0 {
        return None;
    }
    let basis = |n: usize, i: usize, t: f64| crate::bezier::bernstein(n, i, t).unwrap_or(0.0);
    let k = (degree + 1) * (degree + 1);
    let rows: Vec<Vec<f64>> = samples
        .iter()
        .map(|(p, _)| {
            let u = (p.x - lo.x) / (hi.x - lo.x);
            let w = (p.y - lo.y) / (hi.y - lo.y);
            let mut row = Vec::with_capacity(k);
            for i in 0..=degree {
                for j in 0..=degree {
                    row.push(basis(degree, i, u) * basis(degree, j, w));
                }
            }
            row
        })
        .collect();
    let rhs: Vec<f64> = samples.iter().map(|(_, h)| *h).collect();
    let sol = solve_least_squares(&rows, &rhs)?;
    let net: Vec<Vec<Point>> = (0..=degree)
        .map(|i| {
            (0..=degree)
                .map(|j| {
                    let x = lo.x + (hi.x - lo.x) * i as f64 / degree as f64;
                    let y = lo.y + (hi.y - lo.y) * j as f64 / degree as f64;
                    Point::new(x, y, sol[i * (degree + 1) + j])
                })
                .collect()
        })
        .collect();
    let surface = BezierSurface::new(net).ok()?;
    Some(HeightField::Bezier { surface, lo, hi })
}

/// Fits the requested model, degrading to a plane when the data cannot
/// pin down a quadric. Returns `None` for [`HeightModel::Inherit`] or when
/// nothing can be fitted.
pub fn fit_height_field(model: HeightModel, samples: &[(Vec2, f64)]) -> Option<HeightField> {
    if samples.len() < 3 {
        return None;
    }
    let scale = samples
        .iter()
        .map(|(p, _)| p.norm())
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    match model {
        HeightModel::Inherit => None,
        HeightModel::Quadric => {
            fit_polynomial(samples, 6, scale).or_else(|| fit_polynomial(samples, 3, scale))
        }
        HeightModel::Bezier => fit_bezier(samples, 2).or_else(|| fit_polynomial(samples, 3, scale)),
    }
}

/// Height of `p` above the fitted field.
pub fn residual(field: &HeightField, frame: &LocalFrame, p: &Point) -> f64 {
    let (xy, h) = frame.to_local(p);
    h - field.eval(xy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples_of(f: impl Fn(f64, f64) -> f64) -> Vec<(Vec2, f64)> {
        let mut out = Vec::new();
        for i in 0..24 {
            let a = i as f64 * std::f64::consts::TAU / 24.0;
            for r in [1.0, 1.3] {
                let p = Vec2::new(r * a.cos(), r * a.sin());
                out.push((p, f(p.x, p.y)));
            }
        }
        out
    }

    #[test]
    fn quadric_reproduces_quadratic_data() {
        let f = |x: f64, y: f64| 0.3 - 0.2 * x + 0.1 * y - 0.5 * x * x + 0.25 * x * y + 0.7 * y * y;
        let field = fit_height_field(HeightModel::Quadric, &samples_of(f)).unwrap();
        for (x, y) in [(0.0, 0.0), (0.4, -0.2), (-0.5, 0.5)] {
            assert!((field.eval(Vec2::new(x, y)) - f(x, y)).abs() < 1e-10);
        }
    }

    #[test]
    fn bezier_reproduces_plane() {
        let f = |x: f64, y: f64| 1.0 + 2.0 * x - y;
        let field = fit_height_field(HeightModel::Bezier, &samples_of(f)).unwrap();
        for (x, y) in [(0.0, 0.0), (0.4, -0.2), (-0.5, 0.5)] {
            assert!((field.eval(Vec2::new(x, y)) - f(x, y)).abs() < 1e-10);
        }
    }

    #[test]
    fn single_circle_degrades_to_plane() {
        // points on one circle cannot separate x^2 + y^2 from the constant
        let mut s = samples_of(|_, _| 0.5);
        s.retain(|(p, _)| (p.norm() - 1.0).abs() < 1e-9);
        let field = fit_height_field(HeightModel::Quadric, &s).unwrap();
        match field {
            HeightField::Polynomial { coeffs, .. } => assert_eq!(coeffs[3..], [0.0, 0.0, 0.0]),
            _ => panic!("expected polynomial"),
        }
        assert!((field.eval(Vec2::new(0.0, 0.0)) - 0.5).abs() < 1e-12);
        assert!(fit_height_field(HeightModel::Inherit, &s).is_none());
    }
}
