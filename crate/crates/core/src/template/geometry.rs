//! Plane geometry for template construction: points, similitudes and the
//! essential fixed points of a family of contractions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn polar(radius: f64, angle: f64) -> Self {
        Point2::new(radius * angle.cos(), radius * angle.sin())
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn scale(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }

    pub fn add(self, other: Point2) -> Point2 {
        Point2::new(self.x + other.x, self.y + other.y)
    }

    pub fn sub(self, other: Point2) -> Point2 {
        Point2::new(self.x - other.x, self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// A 2x2 real matrix, row major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Mat2([[c, -s], [s, c]])
    }

    /// Reflection across the line through the origin at angle `axis`.
    pub fn reflection(axis: f64) -> Self {
        let (s, c) = (2.0 * axis).sin_cos();
        Mat2([[c, s], [s, -c]])
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        let m = &self.0;
        Point2::new(m[0][0] * p.x + m[0][1] * p.y, m[1][0] * p.x + m[1][1] * p.y)
    }

    pub fn mul(&self, other: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &other.0);
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d.abs() < 1e-300 {
            return None;
        }
        let m = &self.0;
        Some(Mat2([
            [m[1][1] / d, -m[0][1] / d],
            [-m[1][0] / d, m[0][0] / d],
        ]))
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        worst
    }
}

/// `x ↦ ratio · R(rotation) · F(x) + translation`, where `F` reflects across
/// the x-axis when `reflected` is set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Similitude {
    pub ratio: f64,
    pub rotation: f64,
    pub reflected: bool,
    pub translation: Point2,
}

impl Similitude {
    pub fn homothety(ratio: f64, translation: Point2) -> Self {
        Similitude {
            ratio,
            rotation: 0.0,
            reflected: false,
            translation,
        }
    }

    /// Orthogonal part `R(rotation) · F`.
    pub fn orthogonal(&self) -> Mat2 {
        let rot = Mat2::rotation(self.rotation);
        if self.reflected {
            rot.mul(&Mat2::reflection(0.0))
        } else {
            rot
        }
    }

    pub fn linear(&self) -> Mat2 {
        self.orthogonal().scale(self.ratio)
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        self.linear().apply(p).add(self.translation)
    }

    pub fn apply_inverse(&self, p: Point2) -> Point2 {
        let inv = self
            .linear()
            .inverse()
            .expect("similitude ratio is positive");
        inv.apply(p.sub(self.translation))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::InvalidTemplate(format!(
                "similitude ratio {} is not in (0,1)",
                self.ratio
            )));
        }
        if !self.translation.is_finite() || !self.rotation.is_finite() {
            return Err(Error::InvalidTemplate(
                "similitude has non-finite parameters".into(),
            ));
        }
        Ok(())
    }

    /// Unique fixed point `q = L q + t`, i.e. `(I - L) q = t`.
    pub fn fixed_point(&self) -> Result<Point2> {
        self.validate()?;
        let l = self.linear().0;
        let m = Mat2([[1.0 - l[0][0], -l[0][1]], [-l[1][0], 1.0 - l[1][1]]]);
        let inv = m
            .inverse()
            .ok_or_else(|| Error::InvalidTemplate("similitude has no unique fixed point".into()))?;
        Ok(inv.apply(self.translation))
    }
}

/// Fixed points `q` of the maps for which some pair of maps sends `q` and a
/// different fixed point `y` to the same location.
pub fn essential_fixed_points(similitudes: &[Similitude], tolerance: f64) -> Result<Vec<Point2>> {
    let fixed: Vec<Point2> = similitudes
        .iter()
        .map(Similitude::fixed_point)
        .collect::<Result<_>>()?;
    let mut out: Vec<Point2> = Vec::new();
    for (xi, &x) in fixed.iter().enumerate() {
        let essential = fixed.iter().enumerate().any(|(yi, &y)| {
            yi != xi
                && x.dist(y) >= tolerance
                && similitudes.iter().any(|si| {
                    let sx = si.apply(x);
                    similitudes
                        .iter()
                        .any(|sj| sx.dist(sj.apply(y)) < tolerance)
                })
        });
        if essential && out.iter().all(|p| p.dist(x) >= tolerance) {
            out.push(x);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn triangle() -> Vec<Point2> {
        (0..3)
            .map(|k| Point2::polar(1.0, PI / 2.0 + 2.0 * PI * k as f64 / 3.0))
            .collect()
    }

    #[test]
    fn similitude_contracts_distances() {
        let s = Similitude {
            ratio: 0.25,
            rotation: 0.7,
            reflected: true,
            translation: Point2::new(0.3, -0.1),
        };
        let (a, b) = (Point2::new(0.1, 0.9), Point2::new(-0.4, 0.2));
        assert!((s.apply(a).dist(s.apply(b)) - 0.25 * a.dist(b)).abs() < 1e-12);
        let back = s.apply_inverse(s.apply(a));
        assert!(back.dist(a) < 1e-12);
    }

    #[test]
    fn fixed_point_solves_affine_equation() {
        let s = Similitude {
            ratio: 0.5,
            rotation: 1.1,
            reflected: false,
            translation: Point2::new(0.2, 0.4),
        };
        let q = s.fixed_point().unwrap();
        assert!(s.apply(q).dist(q) < 1e-12);
    }

    #[test]
    fn degenerate_ratio_is_rejected() {
        let s = Similitude::homothety(1.0, Point2::ORIGIN);
        assert!(matches!(s.fixed_point(), Err(Error::InvalidTemplate(_))));
        assert!(essential_fixed_points(&[s], 1e-9).is_err());
    }

    #[test]
    fn gasket_corners_are_essential() {
        let corners = triangle();
        let maps: Vec<_> = corners
            .iter()
            .map(|&v| Similitude::homothety(0.5, v.scale(0.5)))
            .collect();
        let f0 = essential_fixed_points(&maps, 1e-9).unwrap();
        assert_eq!(f0.len(), 3);
        for v in corners {
            assert!(f0.iter().any(|p| p.dist(v) < 1e-12));
        }
    }

    #[test]
    fn single_map_has_no_essential_points() {
        let maps = [Similitude::homothety(0.5, Point2::new(0.1, 0.0))];
        assert!(essential_fixed_points(&maps, 1e-9).unwrap().is_empty());
    }

    #[test]
    fn vicsek_center_is_not_essential() {
        let corners: Vec<_> = (0..4)
            .map(|k| Point2::polar(1.0, PI / 4.0 + PI / 2.0 * k as f64))
            .collect();
        let mut maps: Vec<_> = corners
            .iter()
            .map(|&v| Similitude::homothety(1.0 / 3.0, v.scale(2.0 / 3.0)))
            .collect();
        maps.push(Similitude::homothety(1.0 / 3.0, Point2::ORIGIN));
        // brute force: which fixed points have a coincident image partner
        let f0 = essential_fixed_points(&maps, 1e-9).unwrap();
        assert_eq!(f0.len(), 4);
        assert!(f0.iter().all(|p| p.dist(Point2::ORIGIN) > 0.5));
    }
}
