//! Grid construction and local refinement shared by the bound sweeps.
//!
//! Grids are exact rational sequences; refinement shrinks a window around
//! the incumbent by a fixed zoom factor per round, clamped to the global
//! bounds, so every refined grid point is still an exact rational.

use crate::geom2d::{rat_i, Rat};

/// Inclusive linear grid with `count` points from `lo` to `hi`.
#[derive(Clone, Debug)]
pub struct Linspace {
    pub lo: Rat,
    pub hi: Rat,
    pub count: usize,
}

impl Linspace {
    pub fn new(lo: Rat, hi: Rat, count: usize) -> Self {
        Linspace { lo, hi, count }
    }

    pub fn values(&self) -> Vec<Rat> {
        linspace(&self.lo, &self.hi, self.count)
    }

    pub fn step(&self) -> Rat {
        if self.count <= 1 {
            rat_i(0)
        } else {
            (&self.hi - &self.lo) / rat_i(self.count as i64 - 1)
        }
    }
}

pub fn linspace(lo: &Rat, hi: &Rat, count: usize) -> Vec<Rat> {
    if count == 0 {
        return Vec::new();
    }
    if count == 1 {
        return vec![lo.clone()];
    }
    let step = (hi - lo) / rat_i(count as i64 - 1);
    (0..count).map(|k| lo + &step * rat_i(k as i64)).collect()
}

/// start, start*ratio, ..., start*ratio^(count-1); exact for rational ratio.
pub fn geomseq(start: &Rat, ratio: &Rat, count: usize) -> Vec<Rat> {
    let mut out = Vec::with_capacity(count);
    let mut cur = start.clone();
    for _ in 0..count {
        out.push(cur.clone());
        cur *= ratio;
    }
    out
}

/// Linear window of `count` points centered on `center` with the given
/// half-width, clamped to [lo, hi]. The center stays on the grid when it
/// is interior and `count` is odd.
pub fn zoom_window(center: &Rat, halfwidth: &Rat, lo: &Rat, hi: &Rat, count: usize) -> Vec<Rat> {
    let mut a = center - halfwidth;
    let mut b = center + halfwidth;
    if &a < lo {
        a = lo.clone();
    }
    if &b > hi {
        b = hi.clone();
    }
    if a > b {
        return vec![center.clone()];
    }
    let mut vals = linspace(&a, &b, count);
    if !vals.contains(center) && center >= &a && center <= &b {
        vals.push(center.clone());
        vals.sort();
    }
    vals
}

/// Multiplicative window for log-scaled axes: count points spanning
/// [center/factor, center*factor] linearly, clamped.
pub fn zoom_window_mul(center: &Rat, factor: &Rat, lo: &Rat, hi: &Rat, count: usize) -> Vec<Rat> {
    let a = center / factor;
    let b = center * factor;
    zoom_window(center, &((&b - &a) / rat_i(2)), lo, hi, count).into_iter()
        .filter(|v| v >= lo && v <= hi)
        .collect::<Vec<_>>()
        .tap_nonempty(center)
}

trait TapNonempty {
    fn tap_nonempty(self, fallback: &Rat) -> Vec<Rat>;
}

impl TapNonempty for Vec<Rat> {
    fn tap_nonempty(self, fallback: &Rat) -> Vec<Rat> {
        if self.is_empty() {
            vec![fallback.clone()]
        } else {
            self
        }
    }
}
