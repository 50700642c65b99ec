//! Closed-form kernel for the homogeneous random Sierpinski gasket family.
//!
//! The family mixes two IFSs on the unit equilateral triangle: `G` (three
//! maps of ratio 1/2) with probability `p` and `H` (six maps of ratio 1/3)
//! with probability `1 - p`. This module provides the model builder, the
//! Steiner and intersection formulas of its parallel sets, the piecewise
//! integrands, and the closed-form mean fractal curvatures.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::{Point, Polygon};
use crate::grid_geometry::CurvatureVector;
use crate::ifs_core::{IfsAtom, RandomIfsModel, Similarity};
use crate::renewal::ScalingData;

/// Inradius of the unit equilateral triangle; the integrand domain length.
pub const GASKET_L: f64 = 0.288_675_134_594_812_9; // sqrt(3)/6

/// Mixing parameter of the gasket family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasketParams {
    pub p: f64,
}

impl GasketParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidModel(format!("gasket parameter p={p} outside [0, 1]")));
        }
        Ok(Self { p })
    }
}

/// The unit equilateral triangle used as the basic open set.
pub fn unit_triangle() -> Polygon {
    Polygon::new(vec![
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(0.5, 3f64.sqrt() / 2.0),
    ])
}

fn gasket_atom_g() -> IfsAtom {
    IfsAtom::new(vec![
        Similarity::scaling(0.5, Point::new(0.0, 0.0)),
        Similarity::scaling(0.5, Point::new(0.5, 0.0)),
        Similarity::scaling(0.5, Point::new(0.25, 3f64.sqrt() / 4.0)),
    ])
    .expect("static atom")
}

fn gasket_atom_h() -> IfsAtom {
    let s3 = 3f64.sqrt();
    IfsAtom::new(vec![
        Similarity::scaling(1.0 / 3.0, Point::new(0.0, 0.0)),
        Similarity::scaling(1.0 / 3.0, Point::new(1.0 / 3.0, 0.0)),
        Similarity::scaling(1.0 / 3.0, Point::new(2.0 / 3.0, 0.0)),
        Similarity::scaling(1.0 / 3.0, Point::new(1.0 / 6.0, s3 / 6.0)),
        Similarity::scaling(1.0 / 3.0, Point::new(0.5, s3 / 6.0)),
        Similarity::scaling(1.0 / 3.0, Point::new(1.0 / 3.0, s3 / 3.0)),
    ])
    .expect("static atom")
}

/// Builds the gasket-family model: `G` with probability `p`, `H` with
/// probability `1 - p` (zero-mass atoms are dropped), open set the interior
/// of the unit triangle, `R = 3/2`.
pub fn gasket_model(p: f64) -> Result<RandomIfsModel> {
    let params = GasketParams::new(p)?;
    let mut atoms = Vec::new();
    if params.p > 0.0 {
        atoms.push((gasket_atom_g(), params.p));
    }
    if params.p < 1.0 {
        atoms.push((gasket_atom_h(), 1.0 - params.p));
    }
    RandomIfsModel::new(atoms, unit_triangle(), Some(1.5))
}

/// Steiner formula of the unit triangle's parallel set:
/// `(1, 3/2 + pi r, sqrt(3)/4 + 3r + pi r^2)`.
pub fn steiner_triangle(r: f64) -> CurvatureVector {
    assert!(r >= 0.0);
    CurvatureVector {
        c0: 1,
        c1: 1.5 + PI * r,
        c2: 3f64.sqrt() / 4.0 + 3.0 * r + PI * r * r,
    }
}

/// Which first-level pieces intersect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntersectionKind {
    /// Two corner-touching triangles.
    Pair,
    /// Three triangles meeting in one point.
    Triple,
}

/// Half boundary length of the intersection of dilated first-level pieces:
/// `(2 pi / 3 + sqrt(3)) r` for a pair, `pi r` (a full disk) for a triple.
/// The corresponding Euler characteristic is 1 in both cases.
pub fn intersection_c1(kind: IntersectionKind, r: f64) -> f64 {
    assert!(r > 0.0);
    match kind {
        IntersectionKind::Pair => (2.0 * PI / 3.0 + 3f64.sqrt()) * r,
        IntersectionKind::Triple => PI * r,
    }
}

/// Linear coefficient of the innermost piece of the order-1 integrand.
pub fn c_p(p: f64) -> f64 {
    3.0 * p * (PI + 2.0 * 3f64.sqrt()) - (9.0 * 3f64.sqrt() + 5.0 * PI)
}

/// Linear coefficient of the middle piece of the order-1 integrand.
pub fn c_tilde_p(p: f64) -> f64 {
    PI - 3.0 * p * (PI + 3f64.sqrt())
}

/// A piecewise-polynomial curve on `(0, L)`: breakpoints
/// `0 = b_0 < ... < b_m = L` with ascending-power coefficients per piece.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseCurve {
    breakpoints: Vec<f64>,
    pieces: Vec<Vec<f64>>,
}

impl PiecewiseCurve {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Vec<f64>>) -> Self {
        assert!(breakpoints.len() == pieces.len() + 1);
        assert!(breakpoints[0] == 0.0);
        assert!(breakpoints.windows(2).all(|w| w[0] < w[1]));
        Self { breakpoints, pieces }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Vec<f64>] {
        &self.pieces
    }

    pub fn domain_end(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// Value at `r` in `(0, L)`; the piece with `b_{i-1} <= r < b_i` applies.
    pub fn try_eval(&self, r: f64) -> Option<f64> {
        if !(r > 0.0 && r < self.domain_end()) {
            return None;
        }
        let i = self.breakpoints.partition_point(|&b| b <= r) - 1;
        Some(poly_eval(&self.pieces[i], r))
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.try_eval(r)
            .unwrap_or_else(|| panic!("r = {r} outside the curve domain (0, {})", self.domain_end()))
    }
}

fn poly_eval(coeffs: &[f64], r: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c)
}

/// The integrand `R_k` of the gasket family on `(0, L)`, `L = sqrt(3)/6`.
///
/// Order 0 is piecewise constant `(5p - 8, 1 - 4p, 1)`; order 1 is
/// `(c_p r, 3(1-p)/2 + c~_p r, 3/2 + pi r)` on the pieces split at `L/3`
/// and `L/2`. Order 2 has no published piecewise form and is reached
/// through the order-1 relation instead.
pub fn r_curve(k: u8, params: GasketParams) -> Result<PiecewiseCurve> {
    let p = params.p;
    let l = GASKET_L;
    let breaks = vec![0.0, l / 3.0, l / 2.0, l];
    match k {
        0 => Ok(PiecewiseCurve::new(
            breaks,
            vec![vec![5.0 * p - 8.0], vec![1.0 - 4.0 * p], vec![1.0]],
        )),
        1 => Ok(PiecewiseCurve::new(
            breaks,
            vec![
                vec![0.0, c_p(p)],
                vec![1.5 * (1.0 - p), c_tilde_p(p)],
                vec![1.5, PI],
            ],
        )),
        other => Err(Error::UnsupportedOrder(other)),
    }
}

/// Closed-form mean fractal curvature of order `k` for the gasket family.
///
/// Orders 0 and 1 evaluate the family's explicit expressions; order 2 uses
/// the relation `C_2 = 2 / (2 - D) * C_1`. For `p` in `{0, 1}` the same
/// expressions are the averaged (Cesaro) limits.
pub fn closed_form_frac(k: u8, params: GasketParams, scaling: &ScalingData) -> Result<f64> {
    let p = params.p;
    let d = scaling.minkowski_dim;
    let eta = scaling.eta;
    let l = GASKET_L;
    if (d - 1.0).abs() < 1e-12 {
        return Err(Error::Divergence("scaling dimension D = 1 degenerates the k = 1 term".into()));
    }
    match k {
        0 => Ok(l.powf(d) / (d * eta)
            * (1.0 - (1.0 - p) * 3f64.powf(2.0 - d) - p * 2f64.powf(2.0 - d))),
        1 => {
            let cp = c_p(p);
            let ctp = c_tilde_p(p);
            let first = l.powf(d) / (d * eta)
                * (3f64.powf(-d) * (cp - ctp) + 2f64.powf(-d) * (ctp - PI) + PI);
            let second = 3.0 * l.powf(d - 1.0) / (2.0 * (d - 1.0) * eta)
                * (1.0 - (1.0 - p) * 3f64.powf(1.0 - d) - p * 2f64.powf(1.0 - d));
            Ok(first + second)
        }
        2 => {
            if (2.0 - d).abs() < 1e-12 {
                return Err(Error::Divergence("D = 2 degenerates the order-2 relation".into()));
            }
            Ok(2.0 / (2.0 - d) * closed_form_frac(1, params, scaling)?)
        }
        other => Err(Error::UnsupportedOrder(other)),
    }
}
