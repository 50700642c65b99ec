//! Independent reference implementations used to validate the fast paths.
//!
//! These stay deliberately naive: the brute-force nearest-seed scan checks
//! the distance transform, and flood-fill component counting checks the
//! cubical Euler characteristic through chi = #components - #holes.

use crate::grid_geometry::BitMask;

/// O(cells x seeds) nearest-seed scan; exact integer squared distances.
pub fn brute_force_squared_distances(mask: &BitMask) -> Vec<i32> {
    let (w, h) = (mask.grid.width, mask.grid.height);
    let mut seeds = Vec::new();
    for j in 0..h {
        for i in 0..w {
            if mask.get(i, j) {
                seeds.push((i as i64, j as i64));
            }
        }
    }
    assert!(!seeds.is_empty(), "oracle needs at least one seed");
    let mut out = vec![0i32; w * h];
    for j in 0..h {
        for i in 0..w {
            let mut best = i64::MAX;
            for &(si, sj) in &seeds {
                let dx = i as i64 - si;
                let dy = j as i64 - sj;
                let d = dx * dx + dy * dy;
                if d < best {
                    best = d;
                }
            }
            out[j * w + i] = best as i32;
        }
    }
    out
}

/// Counts `(foreground components, bounded background components)` by flood
/// fill. Foreground uses 8-connectivity (closed cells connect through shared
/// vertices), background the dual 4-connectivity; background touching the
/// frame is the unbounded outside and is not counted.
pub fn flood_fill_components(mask: &BitMask) -> (usize, usize) {
    let (w, h) = (mask.grid.width, mask.grid.height);
    let idx = |i: usize, j: usize| j * w + i;
    let mut seen = vec![false; w * h];
    let mut stack: Vec<(usize, usize)> = Vec::new();

    let mut fg = 0usize;
    for j in 0..h {
        for i in 0..w {
            if !mask.get(i, j) || seen[idx(i, j)] {
                continue;
            }
            fg += 1;
            seen[idx(i, j)] = true;
            stack.push((i, j));
            while let Some((x, y)) = stack.pop() {
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let nx = x as i64 + dx;
                        let ny = y as i64 + dy;
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let (nx, ny) = (nx as usize, ny as usize);
                        if mask.get(nx, ny) && !seen[idx(nx, ny)] {
                            seen[idx(nx, ny)] = true;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
        }
    }

    let mut seen_bg = vec![false; w * h];
    let mut bounded = 0usize;
    for j in 0..h {
        for i in 0..w {
            if mask.get(i, j) || seen_bg[idx(i, j)] {
                continue;
            }
            let mut touches_frame = false;
            let mut component = Vec::new();
            seen_bg[idx(i, j)] = true;
            stack.push((i, j));
            while let Some((x, y)) = stack.pop() {
                if x == 0 || y == 0 || x + 1 == w || y + 1 == h {
                    touches_frame = true;
                }
                component.push((x, y));
                for (dx, dy) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                    let nx = x as i64 + dx;
                    let ny = y as i64 + dy;
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let (nx, ny) = (nx as usize, ny as usize);
                    if !mask.get(nx, ny) && !seen_bg[idx(nx, ny)] {
                        seen_bg[idx(nx, ny)] = true;
                        stack.push((nx, ny));
                    }
                }
            }
            if !touches_frame {
                bounded += 1;
            }
        }
    }
    (fg, bounded)
}
