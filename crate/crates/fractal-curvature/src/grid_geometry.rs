//! Grid measurement of parallel sets: rasterization, exact Euclidean
//! distance transform, area, iso-contour length, Euler characteristic and
//! the regularity probe.
//!
//! Distances are kept as exact integer squared cell distances; everything
//! downstream derives from them deterministically.

use crate::error::{Error, Result};
use crate::geom::{distance_to_hull, Bounds, Point, Polygon};

/// Grids larger than this per side would overflow the i32 squared-distance
/// representation.
const MAX_DIM: usize = 30_000;

/// A rectangular cell grid. Cell `(i, j)` has center
/// `origin + ((i + 1/2) h, (j + 1/2) h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub origin: Point,
    pub h: f64,
    pub width: usize,
    pub height: usize,
}

impl GridSpec {
    pub fn new(origin: Point, h: f64, width: usize, height: usize) -> Self {
        assert!(h > 0.0 && width > 0 && height > 0);
        assert!(width <= MAX_DIM && height <= MAX_DIM, "grid too large");
        Self { origin, h, width, height }
    }

    /// Smallest grid covering `bounds` dilated by `padding`, with the origin
    /// snapped to the global `h`-lattice. Snapping keeps separately built
    /// grids sampling the plane at identical points, so measurements of a
    /// set and of its subsets agree cell for cell.
    pub fn covering(bounds: Bounds, h: f64, padding: f64) -> Self {
        let lo_x = ((bounds.min.x - padding) / h).floor() * h;
        let lo_y = ((bounds.min.y - padding) / h).floor() * h;
        let width = ((bounds.max.x + padding - lo_x) / h).ceil() as usize + 1;
        let height = ((bounds.max.y + padding - lo_y) / h).ceil() as usize + 1;
        Self::new(Point::new(lo_x, lo_y), h, width, height)
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn center(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.origin.x + (i as f64 + 0.5) * self.h,
            self.origin.y + (j as f64 + 0.5) * self.h,
        )
    }

    fn contains_bounds(&self, b: Bounds) -> bool {
        let tol = 1e-9 * self.h;
        b.min.x >= self.origin.x - tol
            && b.min.y >= self.origin.y - tol
            && b.max.x <= self.origin.x + self.width as f64 * self.h + tol
            && b.max.y <= self.origin.y + self.height as f64 * self.h + tol
    }
}

/// A boolean raster on a grid.
#[derive(Debug, Clone)]
pub struct BitMask {
    pub grid: GridSpec,
    bits: Vec<bool>,
}

impl BitMask {
    pub fn empty(grid: GridSpec) -> Self {
        Self { grid, bits: vec![false; grid.len()] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[j * self.grid.width + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.bits[j * self.grid.width + i] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Portable bitmap (P1) serialization for debugging dumps.
    pub fn to_pbm(&self) -> String {
        let mut out = String::with_capacity(self.grid.len() * 2 + 32);
        out.push_str(&format!("P1\n{} {}\n", self.grid.width, self.grid.height));
        for j in 0..self.grid.height {
            for i in 0..self.grid.width {
                out.push(if self.get(i, j) { '1' } else { '0' });
                out.push(if i + 1 == self.grid.width { '\n' } else { ' ' });
            }
        }
        out
    }
}

/// Rasterizes closed convex polygons: a cell is foreground iff its center
/// lies in some polygon.
pub fn rasterize_polygons(polys: &[Polygon], grid: GridSpec) -> Result<BitMask> {
    let mut mask = BitMask::empty(grid);
    for poly in polys {
        rasterize_into(&mut mask, poly)?;
    }
    Ok(mask)
}

/// Streaming variant of [`rasterize_polygons`] for large piece collections.
pub fn rasterize_iter<I>(polys: I, grid: GridSpec) -> Result<BitMask>
where
    I: IntoIterator<Item = Polygon>,
{
    let mut mask = BitMask::empty(grid);
    for poly in polys {
        rasterize_into(&mut mask, &poly)?;
    }
    Ok(mask)
}

fn rasterize_into(mask: &mut BitMask, poly: &Polygon) -> Result<()> {
    let grid = mask.grid;
    let b = poly.bounds();
    if !grid.contains_bounds(b) {
        return Err(Error::OutOfGrid(format!(
            "bbox [{:.4},{:.4}]x[{:.4},{:.4}]",
            b.min.x, b.max.x, b.min.y, b.max.y
        )));
    }
    let i0 = (((b.min.x - grid.origin.x) / grid.h - 0.5).floor().max(0.0)) as usize;
    let j0 = (((b.min.y - grid.origin.y) / grid.h - 0.5).floor().max(0.0)) as usize;
    let i1 = ((((b.max.x - grid.origin.x) / grid.h - 0.5).ceil()) as usize).min(grid.width - 1);
    let j1 = ((((b.max.y - grid.origin.y) / grid.h - 0.5).ceil()) as usize).min(grid.height - 1);
    for j in j0..=j1 {
        for i in i0..=i1 {
            if !mask.get(i, j) && poly.contains(grid.center(i, j), 0.0) {
                mask.set(i, j, true);
            }
        }
    }
    Ok(())
}

/// Exact Euclidean distances from every cell center to the nearest
/// foreground cell center, stored as integer squared distances in cell
/// units.
#[derive(Debug, Clone)]
pub struct DistanceField {
    pub grid: GridSpec,
    sq: Vec<i32>,
}

impl DistanceField {
    #[inline]
    pub fn sq_at(&self, i: usize, j: usize) -> i32 {
        self.sq[j * self.grid.width + i]
    }

    /// Distance in model units.
    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.grid.h * (self.sq_at(i, j) as f64).sqrt()
    }

    pub fn squared_cells(&self) -> &[i32] {
        &self.sq
    }

    pub fn max_value(&self) -> f64 {
        self.grid.h * (*self.sq.iter().max().expect("nonempty") as f64).sqrt()
    }

    /// CSV dump (one row per grid row, distances in model units).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for j in 0..self.grid.height {
            for i in 0..self.grid.width {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{}", self.value(i, j)));
            }
            out.push('\n');
        }
        out
    }
}

const SENTINEL: i64 = i32::MAX as i64;

/// Exact two-pass squared Euclidean distance transform.
///
/// Column sweeps give 1D distances to the nearest seed in each column; a
/// row-wise lower envelope of parabolas then minimizes
/// `(x - x')^2 + g(x')^2` exactly in integer arithmetic.
pub fn distance_field(seeds: &BitMask) -> Result<DistanceField> {
    let grid = seeds.grid;
    let (w, h) = (grid.width, grid.height);
    if seeds.bits.iter().all(|&b| !b) {
        return Err(Error::EmptySeeds);
    }

    // Column pass: squared distance to the nearest seed in the same column.
    let mut g: Vec<i64> = vec![SENTINEL; w * h];
    for i in 0..w {
        let mut last: Option<usize> = None;
        for j in 0..h {
            if seeds.get(i, j) {
                last = Some(j);
            }
            if let Some(s) = last {
                let d = (j - s) as i64;
                g[j * w + i] = d * d;
            }
        }
        last = None;
        for j in (0..h).rev() {
            if seeds.get(i, j) {
                last = Some(j);
            }
            if let Some(s) = last {
                let d = (s - j) as i64;
                let cand = d * d;
                let cell = &mut g[j * w + i];
                if cand < *cell {
                    *cell = cand;
                }
            }
        }
    }

    // Row pass: lower envelope of the parabolas q -> (x - q)^2 + g[q].
    let mut sq = vec![0i32; w * h];
    let mut v = vec![0usize; w];
    let mut z = vec![0f64; w + 1];
    let mut row_min = vec![0i64; w];
    for j in 0..h {
        let row = &g[j * w..(j + 1) * w];
        let mut k = 0usize;
        v[0] = 0;
        z[0] = f64::NEG_INFINITY;
        z[1] = f64::INFINITY;
        for q in 1..w {
            let fq = row[q] + (q * q) as i64;
            // z[0] = -inf, so the pop loop always stops before k underflows.
            let s = loop {
                let p = v[k];
                let fp = row[p] + (p * p) as i64;
                let s = (fq - fp) as f64 / (2.0 * (q as f64 - p as f64));
                if s <= z[k] {
                    k -= 1;
                } else {
                    break s;
                }
            };
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
        }
        let mut kk = 0usize;
        for q in 0..w {
            while z[kk + 1] < q as f64 {
                kk += 1;
            }
            let p = v[kk];
            let dx = q as i64 - p as i64;
            row_min[q] = dx * dx + row[p];
        }
        for q in 0..w {
            debug_assert!(row_min[q] < SENTINEL);
            sq[j * w + q] = row_min[q] as i32;
        }
    }

    Ok(DistanceField { grid, sq })
}

/// Thresholds the distance field: foreground iff distance <= r.
pub fn parallel_mask(field: &DistanceField, r: f64) -> BitMask {
    assert!(r >= 0.0, "parallel radius must be nonnegative");
    let h2 = field.grid.h * field.grid.h;
    let r2 = r * r;
    BitMask {
        grid: field.grid,
        bits: field.sq.iter().map(|&s| s as f64 * h2 <= r2).collect(),
    }
}

/// Lebesgue measure of the raster: foreground count times cell area.
pub fn area(mask: &BitMask) -> f64 {
    mask.count() as f64 * mask.grid.h * mask.grid.h
}

/// Euler characteristic of the union of closed unit cells over the
/// foreground, via V - E + F on the cubical complex. Diagonally touching
/// cells share a vertex and therefore connect.
pub fn euler_char(mask: &BitMask) -> i64 {
    let (w, h) = (mask.grid.width, mask.grid.height);
    let fg = |i: isize, j: isize| -> bool {
        i >= 0 && j >= 0 && (i as usize) < w && (j as usize) < h && mask.get(i as usize, j as usize)
    };
    let mut faces = 0i64;
    let mut edges = 0i64;
    let mut vertices = 0i64;
    for j in 0..=h as isize {
        for i in 0..=w as isize {
            if fg(i, j) {
                faces += 1;
            }
            // Horizontal edge (i,j)-(i+1,j): shared by cells (i, j-1), (i, j).
            if i < w as isize && (fg(i, j - 1) || fg(i, j)) {
                edges += 1;
            }
            // Vertical edge (i,j)-(i,j+1): shared by cells (i-1, j), (i, j).
            if j < h as isize && (fg(i - 1, j) || fg(i, j)) {
                edges += 1;
            }
            if fg(i - 1, j - 1) || fg(i, j - 1) || fg(i - 1, j) || fg(i, j) {
                vertices += 1;
            }
        }
    }
    vertices - edges + faces
}

/// Iso-contour length of `{distance = r}` with a flag for an empty level
/// set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourLength {
    pub length: f64,
    pub empty_level_set: bool,
}

/// Total length of the marching-squares contour of the distance field at
/// level `r`, with linear interpolation along lattice edges. Ambiguous
/// saddle cells are resolved by comparing the cell-center average value to
/// the level.
pub fn boundary_length(field: &DistanceField, r: f64) -> ContourLength {
    let (w, h) = (field.grid.width, field.grid.height);
    let step = field.grid.h;
    let mut total = 0.0f64;
    let mut any = false;

    // Corner values v = d - r on the dual lattice of cell centers.
    let val = |i: usize, j: usize| field.value(i, j) - r;

    for j in 0..h.saturating_sub(1) {
        for i in 0..w.saturating_sub(1) {
            let va = val(i, j);
            let vb = val(i + 1, j);
            let vc = val(i + 1, j + 1);
            let vd = val(i, j + 1);
            let idx = (usize::from(va <= 0.0))
                | (usize::from(vb <= 0.0) << 1)
                | (usize::from(vc <= 0.0) << 2)
                | (usize::from(vd <= 0.0) << 3);
            if idx == 0 || idx == 15 {
                continue;
            }
            any = true;

            // Crossing points on the four cell edges, in unit-cell coords.
            let cross = |p: f64, q: f64| p / (p - q);
            let e0 = Point::new(cross(va, vb), 0.0); // bottom: A-B
            let e1 = Point::new(1.0, cross(vb, vc)); // right:  B-C
            let e2 = Point::new(cross(vd, vc), 1.0); // top:    D-C
            let e3 = Point::new(0.0, cross(va, vd)); // left:   A-D

            let mut add = |a: Point, b: Point| total += a.dist(b) * step;
            match idx {
                1 => add(e0, e3),
                2 => add(e0, e1),
                4 => add(e1, e2),
                8 => add(e2, e3),
                3 => add(e3, e1),
                6 => add(e0, e2),
                12 => add(e1, e3),
                9 => add(e0, e2),
                7 => add(e3, e2),
                11 => add(e1, e2),
                13 => add(e0, e1),
                14 => add(e0, e3),
                5 => {
                    // A and C inside; connectivity decided by the center.
                    if (va + vb + vc + vd) * 0.25 <= 0.0 {
                        add(e0, e1);
                        add(e2, e3);
                    } else {
                        add(e0, e3);
                        add(e1, e2);
                    }
                }
                10 => {
                    // B and D inside.
                    if (va + vb + vc + vd) * 0.25 <= 0.0 {
                        add(e0, e3);
                        add(e1, e2);
                    } else {
                        add(e0, e1);
                        add(e2, e3);
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    ContourLength { length: total, empty_level_set: !any }
}

/// The three total curvatures of one parallel set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureVector {
    /// Euler characteristic.
    pub c0: i64,
    /// Half the boundary length.
    pub c1: f64,
    /// Area.
    pub c2: f64,
}

/// Measures `(chi, half boundary length, area)` of the parallel set at
/// radius `r`. Requires `r >= 2h` so the dilation is resolved.
pub fn curvature_vector(field: &DistanceField, r: f64) -> Result<CurvatureVector> {
    let floor = 2.0 * field.grid.h;
    if r < floor {
        return Err(Error::Resolution { radius: r, floor });
    }
    let mask = parallel_mask(field, r);
    let c0 = euler_char(&mask);
    let c1 = boundary_length(field, r).length / 2.0;
    let c2 = area(&mask);
    Ok(CurvatureVector { c0, c1, c2 })
}

/// Distance from `x` to the convex hull of its near-minimizers in `seeds`:
/// the set of seed points within `d(x, seeds) + tol` of `x`. A value of 0
/// flags `x` as (approximately) a critical point of the distance function.
pub fn regularity_probe(seeds: &[Point], x: Point, tol: f64) -> f64 {
    assert!(!seeds.is_empty(), "probe needs seeds");
    assert!(tol >= 0.0);
    let d = seeds.iter().map(|&a| x.dist(a)).fold(f64::INFINITY, f64::min);
    let near: Vec<Point> = seeds.iter().copied().filter(|&a| x.dist(a) <= d + tol).collect();
    distance_to_hull(x, &near)
}

/// Points on the marching-squares contour at level `r` (segment midpoints in
/// model coordinates). Used to sample the level set for the probe.
pub fn level_set_samples(field: &DistanceField, r: f64) -> Vec<Point> {
    let (w, h) = (field.grid.width, field.grid.height);
    let grid = field.grid;
    let mut out = Vec::new();
    let val = |i: usize, j: usize| field.value(i, j) - r;
    for j in 0..h.saturating_sub(1) {
        for i in 0..w.saturating_sub(1) {
            let va = val(i, j);
            let vb = val(i + 1, j);
            let vc = val(i + 1, j + 1);
            let vd = val(i, j + 1);
            let inside =
                usize::from(va <= 0.0) + usize::from(vb <= 0.0) + usize::from(vc <= 0.0)
                    + usize::from(vd <= 0.0);
            if inside == 0 || inside == 4 {
                continue;
            }
            let base = grid.center(i, j);
            out.push(Point::new(base.x + 0.5 * grid.h, base.y + 0.5 * grid.h));
        }
    }
    out
}

/// Foreground cell centers (EDT seed points) of a mask.
pub fn mask_points(mask: &BitMask) -> Vec<Point> {
    let mut out = Vec::new();
    for j in 0..mask.grid.height {
        for i in 0..mask.grid.width {
            if mask.get(i, j) {
                out.push(mask.grid.center(i, j));
            }
        }
    }
    out
}
