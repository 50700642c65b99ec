//! Random iterated function systems and their code trees.
//!
//! A model is a finitely supported distribution over IFSs sharing one open
//! set. An environment realizes one IFS per construction level from a seed;
//! code words address nodes of the resulting tree and carry the composed
//! similarity. Stopping sets, boundary codes and prefractal pieces are
//! antichain walks over that tree.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::{Affine, Point, Polygon};

/// Default number of realized construction levels.
///
/// With contraction ratios at most 0.99 this resolves any radius down to
/// 1e-6 at unit model scale.
pub const DEFAULT_DEPTH: u32 = 64;

const UOSC_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Seed mixing
// ---------------------------------------------------------------------------

/// 64-bit avalanche mix (splitmix64 finalizer). This function is part of the
/// reproducibility contract: level draws, replica seeds and node draws are
/// all derived through it, so streams are stable across runs and platforms.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes two words into one; used as `mix_pair(seed, counter)`.
pub fn mix_pair(a: u64, b: u64) -> u64 {
    mix64(a ^ mix64(b))
}

/// Maps 64 random bits to a uniform value in `[0, 1)`.
pub fn unit_from_bits(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

// ---------------------------------------------------------------------------
// Similarities and IFS atoms
// ---------------------------------------------------------------------------

/// A contracting similarity `x -> scale * Q * x + translation`, where `Q` is
/// the rotation by `rotation` radians composed with an optional reflection
/// across the x-axis (applied first).
///
/// Model maps must have `scale` in `(0, 1)`; composed code-word maps may
/// carry any positive scale (the empty word composes to the identity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub scale: f64,
    pub rotation: f64,
    pub reflect: bool,
    pub translation: Point,
}

impl Similarity {
    pub fn new(scale: f64, rotation: f64, reflect: bool, translation: Point) -> Self {
        Self { scale, rotation, reflect, translation }
    }

    /// Pure scaling plus translation.
    pub fn scaling(scale: f64, translation: Point) -> Self {
        Self::new(scale, 0.0, false, translation)
    }

    pub fn identity() -> Self {
        Self::new(1.0, 0.0, false, Point::new(0.0, 0.0))
    }

    pub fn apply(&self, p: Point) -> Point {
        let p = if self.reflect { Point::new(p.x, -p.y) } else { p };
        let (s, c) = self.rotation.sin_cos();
        Point::new(
            self.scale * (c * p.x - s * p.y) + self.translation.x,
            self.scale * (s * p.x + c * p.y) + self.translation.y,
        )
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &Similarity) -> Similarity {
        Similarity {
            scale: self.scale * other.scale,
            rotation: self.rotation
                + if self.reflect { -other.rotation } else { other.rotation },
            reflect: self.reflect != other.reflect,
            translation: self.apply(other.translation),
        }
    }

    pub fn to_affine(&self) -> Affine {
        let (s, c) = self.rotation.sin_cos();
        let r = if self.reflect { -1.0 } else { 1.0 };
        Affine {
            m: [
                [self.scale * c, -self.scale * s * r],
                [self.scale * s, self.scale * c * r],
            ],
            t: self.translation,
        }
    }
}

/// One iterated function system: an ordered family of at least two
/// contracting similarities.
#[derive(Debug, Clone, PartialEq)]
pub struct IfsAtom {
    maps: Vec<Similarity>,
}

impl IfsAtom {
    pub fn new(maps: Vec<Similarity>) -> Result<Self> {
        if maps.len() < 2 {
            return Err(Error::InvalidModel(format!(
                "an IFS needs at least 2 maps, got {}",
                maps.len()
            )));
        }
        for (i, m) in maps.iter().enumerate() {
            if !(m.scale > 0.0 && m.scale < 1.0) {
                return Err(Error::InvalidModel(format!(
                    "map {} has contraction ratio {} outside (0, 1)",
                    i + 1,
                    m.scale
                )));
            }
            if !(m.rotation.is_finite()
                && m.translation.x.is_finite()
                && m.translation.y.is_finite())
            {
                return Err(Error::InvalidModel(format!("map {} has non-finite parameters", i + 1)));
            }
        }
        Ok(Self { maps })
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn maps(&self) -> &[Similarity] {
        &self.maps
    }
}

// ---------------------------------------------------------------------------
// Random IFS model
// ---------------------------------------------------------------------------

/// A finitely supported distribution over IFS atoms with a shared convex
/// open set and the stopping constant `R`.
#[derive(Debug, Clone)]
pub struct RandomIfsModel {
    atoms: Vec<IfsAtom>,
    probs: Vec<f64>,
    open_set: Polygon,
    big_r: f64,
    r_min: f64,
    r_max: f64,
    warnings: Vec<String>,
}

impl RandomIfsModel {
    /// Validates and builds a model. `big_r` defaults to `1.5 * diam(O)`.
    ///
    /// Atoms must carry strictly positive probabilities summing to 1 within
    /// 1e-12. The open-set condition is checked numerically on the polygon
    /// images with tolerance 1e-9; touching closures only produce warnings.
    pub fn new(
        atoms: Vec<(IfsAtom, f64)>,
        open_set: Polygon,
        big_r: Option<f64>,
    ) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidModel("no atoms".into()));
        }
        let total: f64 = atoms.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidModel(format!(
                "atom probabilities sum to {total}, expected 1 within 1e-12"
            )));
        }
        for (_, p) in &atoms {
            if !(*p > 0.0) {
                return Err(Error::InvalidModel(format!("non-positive atom probability {p}")));
            }
        }

        let diam = open_set.diameter();
        let big_r = big_r.unwrap_or(1.5 * diam);
        if !(big_r > std::f64::consts::SQRT_2 * diam) {
            return Err(Error::InvalidModel(format!(
                "R = {big_r} must exceed sqrt(2) * diam(O) = {}",
                std::f64::consts::SQRT_2 * diam
            )));
        }

        let mut warnings = Vec::new();
        for (ai, (atom, _)) in atoms.iter().enumerate() {
            let images: Vec<Polygon> =
                atom.maps().iter().map(|m| open_set.transform(&m.to_affine())).collect();
            for (i, img) in images.iter().enumerate() {
                let depth = img
                    .vertices()
                    .iter()
                    .map(|&v| open_set.interior_depth(v))
                    .fold(f64::INFINITY, f64::min);
                if depth < -UOSC_TOL {
                    return Err(Error::InvalidModel(format!(
                        "atom {}: image of map {} leaves the open set by {:.3e}",
                        ai + 1,
                        i + 1,
                        -depth
                    )));
                }
                if depth <= UOSC_TOL {
                    warnings.push(format!(
                        "atom {}: image of map {} touches the open-set boundary",
                        ai + 1,
                        i + 1
                    ));
                }
            }
            for i in 0..images.len() {
                for j in i + 1..images.len() {
                    let sep = images[i].separation(&images[j]);
                    if sep < -UOSC_TOL {
                        return Err(Error::InvalidModel(format!(
                            "atom {}: images of maps {} and {} overlap by {:.3e}",
                            ai + 1,
                            i + 1,
                            j + 1,
                            -sep
                        )));
                    }
                    if sep <= UOSC_TOL {
                        warnings.push(format!(
                            "atom {}: images of maps {} and {} have touching closures",
                            ai + 1,
                            i + 1,
                            j + 1
                        ));
                    }
                }
            }
        }

        let mut r_min = f64::INFINITY;
        let mut r_max = 0.0f64;
        for (atom, _) in &atoms {
            for m in atom.maps() {
                r_min = r_min.min(m.scale);
                r_max = r_max.max(m.scale);
            }
        }

        let (atoms, probs) = atoms.into_iter().unzip();
        Ok(Self { atoms, probs, open_set, big_r, r_min, r_max, warnings })
    }

    pub fn atoms(&self) -> &[IfsAtom] {
        &self.atoms
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn open_set(&self) -> &Polygon {
        &self.open_set
    }

    pub fn big_r(&self) -> f64 {
        self.big_r
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Open-set-condition near-tangency notes collected at load time.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Inverse-CDF draw of an atom index from a uniform variate.
    pub fn draw_atom(&self, u: f64) -> usize {
        let mut cum = 0.0;
        for (i, p) in self.probs.iter().enumerate() {
            cum += p;
            if u < cum {
                return i;
            }
        }
        self.probs.len() - 1
    }
}

// ---------------------------------------------------------------------------
// Atom sources: who decides which IFS expands a node
// ---------------------------------------------------------------------------

/// Assignment of IFS atoms to code-tree nodes.
///
/// `atom_index(path)` names the atom whose maps expand the children of the
/// node addressed by `path` (1-based entries, root = empty path). The
/// homogeneous model depends only on `path.len()`; the random recursive
/// model draws per node.
pub trait AtomSource {
    fn model(&self) -> &RandomIfsModel;

    /// 0-based index into `model().atoms()`.
    fn atom_index(&self, path: &[u32]) -> usize;

    /// Number of levels this source can expand.
    fn max_depth(&self) -> u32;

    fn atom_at(&self, path: &[u32]) -> &IfsAtom {
        &self.model().atoms()[self.atom_index(path)]
    }
}

/// A realized homogeneous environment: one sampled IFS per level.
///
/// Level draws are pure functions of `(master_seed, level)`, so extending
/// the prefix never changes earlier entries and equal seeds reproduce equal
/// environments.
#[derive(Debug, Clone)]
pub struct Environment {
    model: Arc<RandomIfsModel>,
    master_seed: u64,
    levels: Vec<u32>,
}

impl Environment {
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn depth(&self) -> u32 {
        self.levels.len() as u32
    }

    /// Atom index realized at `level` (1-based).
    pub fn level_atom(&self, level: u32) -> usize {
        self.levels[(level - 1) as usize] as usize
    }

    /// Drops the first `k` levels (the shift operator on environments).
    pub fn shift(&self, k: u32) -> Environment {
        Environment {
            model: Arc::clone(&self.model),
            master_seed: self.master_seed,
            levels: self.levels[(k as usize).min(self.levels.len())..].to_vec(),
        }
    }
}

impl AtomSource for Environment {
    fn model(&self) -> &RandomIfsModel {
        &self.model
    }

    fn atom_index(&self, path: &[u32]) -> usize {
        self.levels[path.len()] as usize
    }

    fn max_depth(&self) -> u32 {
        self.levels.len() as u32
    }
}

/// Samples an environment of `depth` levels. Level `n` is drawn by inverse
/// CDF from `unit_from_bits(mix_pair(master_seed, n))`.
pub fn sample_environment(
    model: &Arc<RandomIfsModel>,
    master_seed: u64,
    depth: u32,
) -> Environment {
    let levels = (1..=depth as u64)
        .map(|n| model.draw_atom(unit_from_bits(mix_pair(master_seed, n))) as u32)
        .collect();
    Environment { model: Arc::clone(model), master_seed, levels }
}

// ---------------------------------------------------------------------------
// Code words
// ---------------------------------------------------------------------------

/// A finite word in the code tree with its composed map and ratio product.
/// Entries are 1-based map indices, one per level.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeWord {
    pub entries: Vec<u32>,
    pub ratio: f64,
    pub map: Similarity,
}

impl CodeWord {
    pub fn empty() -> Self {
        Self { entries: Vec::new(), ratio: 1.0, map: Similarity::identity() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The image of the closed basic set under this word's map.
    pub fn piece(&self, model: &RandomIfsModel) -> Polygon {
        model.open_set().transform(&self.map.to_affine())
    }
}

/// Composes the word with the given 1-based entries against `source`.
pub fn compose_word(source: &(impl AtomSource + ?Sized), entries: &[u32]) -> Result<CodeWord> {
    let mut word = CodeWord::empty();
    for (i, &e) in entries.iter().enumerate() {
        let atom = source.atom_at(&entries[..i]);
        if e == 0 || e as usize > atom.len() {
            return Err(Error::InvalidCode {
                level: (i + 1) as u32,
                entry: e,
                len: atom.len(),
            });
        }
        let map = &atom.maps()[(e - 1) as usize];
        word.ratio *= map.scale;
        word.map = word.map.compose(map);
        word.entries.push(e);
    }
    Ok(word)
}

// ---------------------------------------------------------------------------
// Tree walks
// ---------------------------------------------------------------------------

fn walk_antichain<F>(source: &(impl AtomSource + ?Sized), mut stop: F) -> Result<Vec<CodeWord>>
where
    F: FnMut(&CodeWord) -> bool,
{
    let mut out = Vec::new();
    let mut stack = vec![CodeWord::empty()];
    while let Some(word) = stack.pop() {
        let level = word.len() as u32 + 1;
        if level > source.max_depth() {
            return Err(Error::DepthLimit { required: level, max: source.max_depth() });
        }
        let atom = source.atom_at(&word.entries);
        for (i, map) in atom.maps().iter().enumerate() {
            let mut child = CodeWord {
                entries: Vec::with_capacity(word.entries.len() + 1),
                ratio: word.ratio * map.scale,
                map: word.map.compose(map),
            };
            child.entries.extend_from_slice(&word.entries);
            child.entries.push((i + 1) as u32);
            if stop(&child) {
                out.push(child);
            } else {
                stack.push(child);
            }
        }
    }
    Ok(out)
}

/// The stopping set: the antichain of words whose ratio first drops to
/// `r / R`. For `r >= R` this is the singleton empty word.
pub fn stopping_set(source: &(impl AtomSource + ?Sized), r: f64) -> Result<Vec<CodeWord>> {
    if !(r > 0.0) {
        return Err(Error::BadRadius { got: r, requirement: "r > 0" });
    }
    let big_r = source.model().big_r();
    if r >= big_r {
        return Ok(vec![CodeWord::empty()]);
    }
    // A child is emitted exactly when R * r_child <= r; its parent satisfied
    // R * r_parent > r, so the defining window holds by construction.
    walk_antichain(source, |w| big_r * w.ratio <= r)
}

/// Boundary codes: stopping-set words whose piece polygon comes within `2r`
/// of the complement of the first-level image union `f(O)`.
///
/// The piece `F_sigma` is bounded from above by the convex polygon
/// `f_sigma(closure(O))`, which makes the selection a conservative superset.
pub fn boundary_codes(source: &(impl AtomSource + ?Sized), r: f64) -> Result<Vec<CodeWord>> {
    let words = stopping_set(source, r)?;
    let model = source.model();
    let first_atom = source.atom_at(&[]);
    // Depth inside f_{sigma_1}(closure(O)) equals the distance to the
    // complement of the whole union f(O): distinct first-level images are
    // disjoint open sets, so their boundaries belong to the complement.
    let first_polys: Vec<Polygon> = first_atom
        .maps()
        .iter()
        .map(|m| model.open_set().transform(&m.to_affine()))
        .collect();
    Ok(words
        .into_iter()
        .filter(|w| {
            let Some(&first) = w.entries.first() else {
                // The empty word: F(r) always meets the complement dilation.
                return true;
            };
            let q = &first_polys[(first - 1) as usize];
            let piece = w.piece(model);
            // Depth is concave on q, so its minimum over the convex piece is
            // attained at a piece vertex.
            let depth = piece
                .vertices()
                .iter()
                .map(|&v| q.interior_depth(v).max(0.0))
                .fold(f64::INFINITY, f64::min);
            depth <= 2.0 * r
        })
        .collect())
}

/// Pieces of the prefractal: the antichain of words whose image of
/// `closure(O)` first has diameter at most `diameter_bound`, returned as
/// `(first_entry, composed map)` pairs. The union of the corresponding
/// polygons contains the fractal and lies within Hausdorff distance
/// `diameter_bound` of it.
pub fn prefractal_pieces(
    source: &(impl AtomSource + ?Sized),
    diameter_bound: f64,
) -> Result<Vec<(u32, Similarity)>> {
    if !(diameter_bound > 0.0) {
        return Err(Error::BadRadius { got: diameter_bound, requirement: "diameter_bound > 0" });
    }
    let diam = source.model().open_set().diameter();
    if diam <= diameter_bound {
        return Ok(vec![(0, Similarity::identity())]);
    }
    let words = walk_antichain(source, |w| w.ratio * diam <= diameter_bound)?;
    Ok(words.into_iter().map(|w| (w.entries[0], w.map)).collect())
}

/// The prefractal piece polygons themselves.
pub fn prefractal_polygons(
    source: &(impl AtomSource + ?Sized),
    diameter_bound: f64,
) -> Result<Vec<Polygon>> {
    let open_set = source.model().open_set();
    Ok(prefractal_pieces(source, diameter_bound)?
        .into_iter()
        .map(|(_, map)| open_set.transform(&map.to_affine()))
        .collect())
}

/// The overlap constant: `kappa_2 * 4^2 * R^2 / (r_min^2 * area(O))`.
pub fn gamma_bound(model: &RandomIfsModel) -> f64 {
    std::f64::consts::PI * 16.0 * model.big_r().powi(2)
        / (model.r_min().powi(2) * model.open_set().area())
}

/// Maximum, over stopping-set words, of the number of stopping-set pieces
/// within distance `2r` (the word itself included).
pub fn neighbor_overlap_count(source: &(impl AtomSource + ?Sized), r: f64) -> Result<usize> {
    let words = stopping_set(source, r)?;
    let model = source.model();
    let polys: Vec<Polygon> = words.iter().map(|w| w.piece(model)).collect();
    Ok(max_overlap_count(&polys, r))
}

/// Shared kernel for the overlap audit: max over pieces of how many pieces
/// come within `2r`. Uses a uniform spatial hash on centroids to prune.
pub(crate) fn max_overlap_count(polys: &[Polygon], r: f64) -> usize {
    if polys.len() <= 1 {
        return polys.len();
    }
    let centroids: Vec<Point> = polys
        .iter()
        .map(|p| {
            let v = p.vertices();
            let mut c = Point::new(0.0, 0.0);
            for &q in v {
                c = c + q;
            }
            c * (1.0 / v.len() as f64)
        })
        .collect();
    let radii: Vec<f64> = polys
        .iter()
        .zip(&centroids)
        .map(|(p, &c)| p.vertices().iter().map(|&v| v.dist(c)).fold(0.0, f64::max))
        .collect();
    let max_rad = radii.iter().fold(0.0f64, |a, &b| a.max(b));
    // Any pair within polygon distance 2r has centroid distance at most
    // 2r + rad_a + rad_b <= cell, so 3x3 neighborhoods suffice.
    let cell = 2.0 * r + 2.0 * max_rad;

    use std::collections::HashMap;
    let key = |p: Point| ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
    let mut bins: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, &c) in centroids.iter().enumerate() {
        bins.entry(key(c)).or_default().push(i);
    }

    let mut best = 0usize;
    for i in 0..polys.len() {
        let (bx, by) = key(centroids[i]);
        let mut count = 0usize;
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(cands) = bins.get(&(bx + dx, by + dy)) else { continue };
                for &j in cands {
                    let reach = 2.0 * r + radii[i] + radii[j];
                    if centroids[i].dist(centroids[j]) > reach {
                        continue;
                    }
                    if polys[i].distance(&polys[j]) <= 2.0 * r {
                        count += 1;
                    }
                }
            }
        }
        best = best.max(count);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_gasket::gasket_model;

    fn env(p: f64, seed: u64) -> Environment {
        sample_environment(&Arc::new(gasket_model(p).unwrap()), seed, DEFAULT_DEPTH)
    }

    #[test]
    fn mixing_is_stable() {
        // Frozen stream values: the reproducibility contract.
        assert_eq!(mix_pair(1, 1), mix_pair(1, 1));
        assert_ne!(mix_pair(1, 1), mix_pair(1, 2));
        assert_ne!(mix_pair(1, 1), mix_pair(2, 1));
        let u = unit_from_bits(mix_pair(0xdead_beef, 7));
        assert!((0.0..1.0).contains(&u));
    }

    #[test]
    fn similarity_composition_matches_affine_product() {
        // Oracle: direct 2x2 affine composition.
        let a = Similarity::new(0.7, 0.3, true, Point::new(0.2, -0.1));
        let b = Similarity::new(0.5, -1.1, false, Point::new(-0.4, 0.9));
        let ab = a.compose(&b);
        let (fa, fb, fab) = (a.to_affine(), b.to_affine(), ab.to_affine());
        for p in [Point::new(0.0, 0.0), Point::new(1.0, 2.0), Point::new(-0.3, 0.7)] {
            let via_pair = fa.apply(fb.apply(p));
            let via_comp = fab.apply(p);
            assert!(via_pair.dist(via_comp) < 1e-12);
            assert!(ab.apply(p).dist(via_pair) < 1e-12);
        }
    }

    #[test]
    fn compose_word_gasket_examples() {
        // |sigma| = 1, sigma = (2): the map x -> x/2 + (1/2, 0).
        let e = env(1.0, 11);
        let w = compose_word(&e, &[2]).unwrap();
        assert!((w.ratio - 0.5).abs() < 1e-15);
        assert!(w.map.apply(Point::new(0.0, 0.0)).dist(Point::new(0.5, 0.0)) < 1e-15);
        assert!(w.map.apply(Point::new(1.0, 0.0)).dist(Point::new(1.0, 0.0)) < 1e-15);

        // omega = (G, G), sigma = (1, 2): composite scale 1/4, translation (1/4, 0).
        let w = compose_word(&e, &[1, 2]).unwrap();
        assert!((w.ratio - 0.25).abs() < 1e-15);
        let origin_image = w.map.apply(Point::new(0.0, 0.0));
        assert!(origin_image.dist(Point::new(0.25, 0.0)) < 1e-15);
        assert!((w.map.scale - 0.25).abs() < 1e-15);
    }

    #[test]
    fn compose_word_mixed_ratio() {
        // omega = (G, H), sigma = (1, 1): ratio (1/2)(1/3) = 1/6.
        // Force the (G, H) prefix by searching seeds of the p = 0.5 model.
        let model = Arc::new(gasket_model(0.5).unwrap());
        let e = (0..1000u64)
            .map(|s| sample_environment(&model, s, 4))
            .find(|e| e.level_atom(1) == 0 && e.level_atom(2) == 1)
            .expect("some seed realizes (G, H)");
        let w = compose_word(&e, &[1, 1]).unwrap();
        assert!((w.ratio - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn compose_word_rejects_bad_entry() {
        let e = env(1.0, 1);
        match compose_word(&e, &[4]) {
            Err(Error::InvalidCode { level: 1, entry: 4, len: 3 }) => {}
            other => panic!("expected invalid-code error, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_distributions_realize_single_atom() {
        let e1 = env(1.0, 99);
        assert!((1..=e1.depth()).all(|l| e1.level_atom(l) == 0));
        let e0 = env(0.0, 99);
        assert!((1..=e0.depth()).all(|l| e0.level_atom(l) == 0));
        assert_eq!(e0.model().atoms()[0].len(), 6, "p = 0 model is the six-map IFS");
    }

    #[test]
    fn environment_is_reproducible_and_prefix_stable() {
        let model = Arc::new(gasket_model(0.5).unwrap());
        let a = sample_environment(&model, 42, 32);
        let b = sample_environment(&model, 42, 32);
        assert_eq!(a.levels, b.levels);
        let longer = sample_environment(&model, 42, 64);
        assert_eq!(&longer.levels[..32], &a.levels[..]);
        let other = sample_environment(&model, 43, 32);
        assert_ne!(a.levels, other.levels);
    }

    #[test]
    fn stopping_set_large_radius_is_root() {
        let e = env(0.5, 3);
        let words = stopping_set(&e, e.model().big_r()).unwrap();
        assert_eq!(words.len(), 1);
        assert!(words[0].is_empty());
    }

    #[test]
    fn stopping_set_gasket_examples() {
        // p = 1, R = 3/2, r = 1/2: all 9 words of length 2 (ratio 1/4).
        let words = stopping_set(&env(1.0, 5), 0.5).unwrap();
        assert_eq!(words.len(), 9);
        assert!(words.iter().all(|w| w.len() == 2 && (w.ratio - 0.25).abs() < 1e-15));

        // p = 0, R = 3/2, r = 1/2: the 6 words of length 1 (ratio 1/3).
        let words = stopping_set(&env(0.0, 5), 0.5).unwrap();
        assert_eq!(words.len(), 6);
        assert!(words.iter().all(|w| w.len() == 1 && (w.ratio - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn stopping_set_rejects_nonpositive_radius() {
        assert!(matches!(stopping_set(&env(1.0, 5), 0.0), Err(Error::BadRadius { .. })));
    }

    /// Brute-force oracle: enumerate every word up to `depth` and apply the
    /// defining window directly.
    fn stopping_oracle(e: &Environment, r: f64, depth: u32) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut frontier: Vec<(Vec<u32>, f64)> = vec![(vec![], 1.0)];
        let big_r = e.model().big_r();
        for _ in 0..depth {
            let mut next = Vec::new();
            for (word, ratio) in frontier {
                let atom = e.atom_at(&word);
                for (i, m) in atom.maps().iter().enumerate() {
                    let mut w = word.clone();
                    w.push((i + 1) as u32);
                    let rc = ratio * m.scale;
                    let parent_ratio = ratio;
                    if big_r * rc <= r && r < big_r * parent_ratio {
                        out.push(w.clone());
                    }
                    next.push((w, rc));
                }
            }
            frontier = next;
        }
        out.sort();
        out
    }

    #[test]
    fn stopping_set_matches_enumeration_oracle() {
        for (p, seed, r) in [(0.5, 7, 0.3), (0.5, 8, 0.11), (1.0, 1, 0.2), (0.0, 2, 0.45)] {
            let e = env(p, seed);
            let mut got: Vec<Vec<u32>> =
                stopping_set(&e, r).unwrap().into_iter().map(|w| w.entries).collect();
            got.sort();
            assert_eq!(got, stopping_oracle(&e, r, 8), "p={p} seed={seed} r={r}");
        }
    }

    #[test]
    fn stopping_set_ratio_window_and_antichain() {
        for seed in 0..8u64 {
            let e = env(0.5, seed);
            let r = 0.07 + 0.05 * seed as f64;
            let words = stopping_set(&e, r).unwrap();
            let model = e.model();
            for w in &words {
                assert!(w.ratio <= r / model.big_r() + 1e-15);
                assert!(w.ratio > r * model.r_min() / model.big_r() - 1e-15);
            }
            let mut sorted: Vec<&Vec<u32>> = words.iter().map(|w| &w.entries).collect();
            sorted.sort();
            for pair in sorted.windows(2) {
                assert!(!pair[1].starts_with(pair[0]), "prefix pair in stopping set");
            }
        }
    }

    #[test]
    fn stopping_set_covers_deep_level() {
        // Every word of length ceil(ln(r/R)/ln(r_max)) + 1 has exactly one
        // prefix in the stopping set.
        let e = env(0.5, 13);
        let r = 0.19;
        let model = e.model();
        let need =
            ((r / model.big_r()).ln() / model.r_max().ln()).ceil() as usize + 1;
        let words = stopping_set(&e, r).unwrap();
        let mut frontier: Vec<Vec<u32>> = vec![vec![]];
        for _ in 0..need {
            let mut next = Vec::new();
            for w in frontier {
                let atom = e.atom_at(&w);
                for i in 1..=atom.len() as u32 {
                    let mut c = w.clone();
                    c.push(i);
                    next.push(c);
                }
            }
            frontier = next;
        }
        for deep in frontier {
            let prefixes =
                words.iter().filter(|w| deep.starts_with(&w.entries)).count();
            assert_eq!(prefixes, 1, "word {deep:?} has {prefixes} stopping prefixes");
        }
    }

    #[test]
    fn boundary_codes_everything_when_radius_large() {
        let e = env(1.0, 4);
        // 2r exceeds diam(O) = 1: every stopping piece qualifies.
        let r = 0.6;
        let sigma = stopping_set(&e, r).unwrap();
        let b = boundary_codes(&e, r).unwrap();
        assert_eq!(b.len(), sigma.len());
    }

    #[test]
    fn boundary_codes_degenerate_root() {
        let e = env(0.5, 4);
        let b = boundary_codes(&e, e.model().big_r() * 2.0).unwrap();
        assert_eq!(b.len(), 1);
        assert!(b[0].is_empty());
    }

    #[test]
    fn boundary_codes_match_polygon_depth_oracle() {
        // Oracle: sample the piece polygon densely (vertices, edge points,
        // interior barycentric grid) and take the minimal depth inside the
        // first-level image polygon.
        let e = env(1.0, 6);
        let r = 0.125;
        let model = e.model();
        let sigma = stopping_set(&e, r).unwrap();
        let selected: std::collections::HashSet<Vec<u32>> =
            boundary_codes(&e, r).unwrap().into_iter().map(|w| w.entries).collect();
        let first_atom = e.atom_at(&[]);
        for w in &sigma {
            let q = model.open_set().transform(
                &first_atom.maps()[(w.entries[0] - 1) as usize].to_affine(),
            );
            let piece = w.piece(model);
            let verts = piece.vertices();
            let mut min_depth = f64::INFINITY;
            let n = 12;
            for a in 0..=n {
                for b in 0..=(n - a) {
                    let c = n - a - b;
                    let p = verts[0] * (a as f64 / n as f64)
                        + verts[1] * (b as f64 / n as f64)
                        + verts[2] * (c as f64 / n as f64);
                    min_depth = min_depth.min(q.interior_depth(p).max(0.0));
                }
            }
            let expect = min_depth <= 2.0 * r;
            // Skip knife-edge cases the oracle's sampling cannot decide.
            if (min_depth - 2.0 * r).abs() > 1e-6 {
                assert_eq!(selected.contains(&w.entries), expect, "word {:?}", w.entries);
            }
        }
        // At this radius the gasket has both kinds.
        assert!(selected.len() < sigma.len());
        assert!(!selected.is_empty());
    }

    #[test]
    fn prefractal_depth_rule() {
        let e = env(1.0, 2);
        // bound >= diam(O): the closed basic set alone.
        let polys = prefractal_polygons(&e, 1.0).unwrap();
        assert_eq!(polys.len(), 1);
        assert!((polys[0].area() - e.model().open_set().area()).abs() < 1e-12);

        // p = 1, bound 1/4: 9 triangles of side 1/4.
        let polys = prefractal_polygons(&e, 0.25).unwrap();
        assert_eq!(polys.len(), 9);
        for p in &polys {
            assert!((p.diameter() - 0.25).abs() < 1e-12);
        }

        // p = 0, bound 1/3: 6 triangles of side 1/3.
        let polys = prefractal_polygons(&env(0.0, 2), 1.0 / 3.0).unwrap();
        assert_eq!(polys.len(), 6);
        for p in &polys {
            assert!((p.diameter() - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn prefractal_refinement_is_nested() {
        let e = env(0.5, 21);
        let coarse = prefractal_polygons(&e, 0.2).unwrap();
        let fine = prefractal_polygons(&e, 0.05).unwrap();
        assert!(fine.len() > coarse.len());
        for piece in &fine {
            let inside_some = coarse.iter().any(|big| {
                piece.vertices().iter().all(|&v| big.contains(v, 1e-9))
            });
            assert!(inside_some, "fine piece escapes the coarse union");
        }
    }

    #[test]
    fn prefractal_depth_limit_error() {
        let model = Arc::new(gasket_model(1.0).unwrap());
        let shallow = sample_environment(&model, 1, 3);
        match prefractal_polygons(&shallow, 1e-3) {
            Err(Error::DepthLimit { required, max: 3 }) => assert_eq!(required, 4),
            other => panic!("expected depth-limit error, got {other:?}"),
        }
    }

    #[test]
    fn gamma_bound_gasket_value() {
        // kappa_2 * 16 * R^2 / (r_min^2 * area) = 1296 pi / sqrt(3).
        let model = gasket_model(0.5).unwrap();
        let expect = 1296.0 * std::f64::consts::PI / 3f64.sqrt();
        assert!((gamma_bound(&model) - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn gamma_bound_r_squared_homogeneity() {
        let base = gasket_model(1.0).unwrap();
        let doubled = RandomIfsModel::new(
            vec![(base.atoms()[0].clone(), 1.0)],
            base.open_set().clone(),
            Some(2.0 * base.big_r()),
        )
        .unwrap();
        let ratio = gamma_bound(&doubled) / gamma_bound(&base);
        assert!((ratio - 4.0).abs() < 1e-12);
    }

    #[test]
    fn neighbor_overlap_examples() {
        // Single word: self only.
        let e = env(1.0, 3);
        assert_eq!(neighbor_overlap_count(&e, e.model().big_r()).unwrap(), 1);

        // p = 1, r = 1/2: 9 pieces of side 1/4, all pairwise within 2r = 1.
        assert_eq!(neighbor_overlap_count(&e, 0.5).unwrap(), 9);
    }

    #[test]
    fn neighbor_overlap_matches_quadratic_oracle() {
        let e = env(0.5, 17);
        let r = 0.21;
        let words = stopping_set(&e, r).unwrap();
        let polys: Vec<Polygon> = words.iter().map(|w| w.piece(e.model())).collect();
        let mut oracle = 0usize;
        for i in 0..polys.len() {
            let count = (0..polys.len())
                .filter(|&j| polys[i].distance(&polys[j]) <= 2.0 * r)
                .count();
            oracle = oracle.max(count);
        }
        assert_eq!(neighbor_overlap_count(&e, r).unwrap(), oracle);
    }

    #[test]
    fn neighbor_overlap_below_gamma() {
        for seed in 0..4u64 {
            let e = env(0.5, seed);
            let bound = gamma_bound(e.model());
            for r in [0.5, 0.2, 0.08] {
                let count = neighbor_overlap_count(&e, r).unwrap();
                assert!((count as f64) <= bound, "count {count} exceeds bound {bound}");
            }
        }
    }

    #[test]
    fn model_validation_rejects_bad_probabilities() {
        let g = gasket_model(1.0).unwrap().atoms()[0].clone();
        let tri = gasket_model(1.0).unwrap().open_set().clone();
        assert!(matches!(
            RandomIfsModel::new(vec![(g.clone(), 0.5)], tri.clone(), None),
            Err(Error::InvalidModel(_))
        ));
        assert!(matches!(
            RandomIfsModel::new(vec![(g, 1.0)], tri, Some(1.0)),
            Err(Error::InvalidModel(_)) // R below sqrt(2) diam
        ));
    }

    #[test]
    fn model_validation_flags_overlap() {
        // Two maps with heavily overlapping images must be rejected.
        let tri = gasket_model(1.0).unwrap().open_set().clone();
        let overlapping = IfsAtom::new(vec![
            Similarity::scaling(0.6, Point::new(0.0, 0.0)),
            Similarity::scaling(0.6, Point::new(0.1, 0.0)),
        ])
        .unwrap();
        assert!(matches!(
            RandomIfsModel::new(vec![(overlapping, 1.0)], tri, None),
            Err(Error::InvalidModel(_))
        ));
    }

    #[test]
    fn gasket_model_touching_closures_warn_only() {
        let model = gasket_model(0.5).unwrap();
        assert!(!model.warnings().is_empty(), "gasket images touch; expect warnings");
    }
}
