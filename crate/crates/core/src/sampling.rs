//! Sampling schemes: frequency points, the region `Z_K` they are meant to cover,
//! the density `δ = sup_{v∈Z_K} min_m |v - ω_m|_1` and the Voronoi weights `μ_m`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Region `Z_K` covered by a scheme.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Region {
    Interval { lo: f64, hi: f64 },
    Rect { lo: [f64; 2], hi: [f64; 2] },
    Disk { radius: f64 },
}

impl Region {
    pub fn measure(&self) -> f64 {
        match *self {
            Region::Interval { lo, hi } => hi - lo,
            Region::Rect { lo, hi } => (hi[0] - lo[0]) * (hi[1] - lo[1]),
            Region::Disk { radius } => std::f64::consts::PI * radius * radius,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Interval { .. } => 1,
            _ => 2,
        }
    }

    fn contains(&self, p: &[f64]) -> bool {
        let tol = 1e-9;
        match *self {
            Region::Interval { lo, hi } => p[0] >= lo - tol && p[0] <= hi + tol,
            Region::Rect { lo, hi } => (0..2).all(|i| p[i] >= lo[i] - tol && p[i] <= hi[i] + tol),
            Region::Disk { radius } => (p[0] * p[0] + p[1] * p[1]).sqrt() <= radius + tol,
        }
    }

    fn bbox(&self) -> ([f64; 2], [f64; 2]) {
        match *self {
            Region::Interval { lo, hi } => ([lo, 0.0], [hi, 0.0]),
            Region::Rect { lo, hi } => (lo, hi),
            Region::Disk { radius } => ([-radius; 2], [radius; 2]),
        }
    }

    /// Closest point of the region (2D).
    fn project(&self, x: f64, y: f64) -> (f64, f64) {
        match *self {
            Region::Rect { lo, hi } => (x.clamp(lo[0], hi[0]), y.clamp(lo[1], hi[1])),
            Region::Disk { radius } => {
                let r = (x * x + y * y).sqrt();
                if r <= radius { (x, y) } else { (x * radius / r, y * radius / r) }
            }
            Region::Interval { lo, hi } => (x.clamp(lo, hi), y),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SchemeKind {
    Equispaced1d { eps: f64, m: usize },
    Jittered1d { eps: f64, jitter: f64, m: usize, seed: u64 },
    Log1d { bandwidth: f64, target: f64 },
    Uniform2d { eps: [f64; 2], m: usize },
    Radial2d { bandwidth: f64, lines: usize, spacing: f64 },
    Spiral2d { bandwidth: f64, pitch: f64, step: f64 },
    Custom,
}

/// A finite set of distinct frequency points with weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingScheme {
    pub dim: usize,
    /// `coords[i][m]` is coordinate `i` of `ω_m`.
    pub coords: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub region: Region,
    pub kind: SchemeKind,
    /// 2D grid step used for the weights, if they were grid-counted.
    pub weight_step: Option<f64>,
}

/// Default 2D grid resolution: step `K/1024` per axis.
pub const DEFAULT_GRID_DIVISIONS: usize = 1024;

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("spacing {eps} outside (0, 1]")))
    }
}

/// Hull of sorted 1D points extended by half of the outermost gaps.
fn hull_region(sorted: &[f64]) -> Result<Region> {
    if sorted.len() < 2 {
        return Err(Error::InvalidParameter("a single point needs an explicit region".into()));
    }
    let n = sorted.len();
    let gl = sorted[1] - sorted[0];
    let gr = sorted[n - 1] - sorted[n - 2];
    Ok(Region::Interval { lo: sorted[0] - gl / 2.0, hi: sorted[n - 1] + gr / 2.0 })
}

impl SamplingScheme {
    /// 1D scheme from points, with the region either given or the half-gap extended hull.
    pub fn from_points_1d(points: Vec<f64>, region: Option<Region>, kind: SchemeKind) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("empty scheme".into()));
        }
        if let Some(bad) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite point {bad}")));
        }
        let mut sorted = points.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("points must be distinct".into()));
        }
        let region = match region {
            Some(r @ Region::Interval { .. }) => r,
            Some(_) => return Err(Error::InvalidParameter("1D scheme needs an interval region".into())),
            None => hull_region(&sorted)?,
        };
        if let Some(p) = points.iter().find(|p| !region.contains(&[**p])) {
            return Err(Error::InvalidParameter(format!("point {p} outside region")));
        }
        let weights = voronoi_1d(&points, &region);
        Ok(Self { dim: 1, coords: vec![points], weights, region, kind, weight_step: None })
    }

    /// 2D scheme from points; weights by ℓ¹ grid counting at step `measure/divisions`.
    pub fn from_points_2d(x: Vec<f64>, y: Vec<f64>, region: Region, kind: SchemeKind, divisions: usize) -> Result<Self> {
        if x.len() != y.len() || x.is_empty() {
            return Err(Error::InvalidParameter("coordinate vectors must be nonempty and equally long".into()));
        }
        if region.dim() != 2 {
            return Err(Error::InvalidParameter("2D scheme needs a 2D region".into()));
        }
        for m in 0..x.len() {
            if !x[m].is_finite() || !y[m].is_finite() {
                return Err(Error::InvalidParameter("non-finite point".into()));
            }
            if !region.contains(&[x[m], y[m]]) {
                return Err(Error::InvalidParameter(format!("point ({}, {}) outside region", x[m], y[m])));
            }
        }
        let index = NearestL1::new(&x, &y);
        if index.has_duplicates() {
            return Err(Error::InvalidParameter("points must be distinct".into()));
        }
        let (weights, step) = voronoi_2d(&index, &region, divisions);
        Ok(Self { dim: 2, coords: vec![x, y], weights, region, kind, weight_step: Some(step) })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Coordinates along axis `i`.
    pub fn axis(&self, i: usize) -> &[f64] {
        &self.coords[i]
    }

    /// `K = max_m |ω_m|_∞`.
    pub fn bandwidth(&self) -> f64 {
        (0..self.len())
            .map(|m| self.coords.iter().map(|c| c[m].abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    pub fn point(&self, m: usize) -> Vec<f64> {
        self.coords.iter().map(|c| c[m]).collect()
    }

    /// For an exact tensor grid, the per-axis spacings and side length.
    pub fn tensor_grid(&self) -> Option<([f64; 2], usize)> {
        match self.kind {
            SchemeKind::Uniform2d { eps, m } => Some((eps, m)),
            _ => None,
        }
    }

    /// Density `δ` and the location where it is attained.
    pub fn density(&self) -> Density {
        density(self)
    }

    /// Fails with the worst location if `δ ≥ bound`.
    pub fn check_density(&self, bound: f64) -> Result<Density> {
        let d = self.density();
        if d.delta >= bound {
            return Err(Error::DensityViolation { delta: d.delta, location: format!("{:?}", d.location) });
        }
        Ok(d)
    }

    /// Stable content hash used for table caches and sidecars.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        for c in &self.coords {
            for v in c {
                h.update(v.to_le_bytes());
            }
        }
        for w in &self.weights {
            h.update(w.to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

fn voronoi_1d(points: &[f64], region: &Region) -> Vec<f64> {
    let Region::Interval { lo, hi } = *region else { unreachable!("checked by caller") };
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].partial_cmp(&points[b]).expect("finite"));
    let mut w = vec![0.0; points.len()];
    for (i, &m) in order.iter().enumerate() {
        let left = if i == 0 { lo } else { 0.5 * (points[order[i - 1]] + points[m]) };
        let right = if i + 1 == order.len() { hi } else { 0.5 * (points[m] + points[order[i + 1]]) };
        w[m] = right.max(lo).min(hi) - left.max(lo).min(hi);
    }
    w
}

/// Points `εk`, `k = -⌈M/2⌉ .. -⌈M/2⌉+M-1`; weights `ε`.
pub fn make_equispaced_1d(eps: f64, m: usize) -> Result<SamplingScheme> {
    check_eps(eps)?;
    if m < 2 {
        return Err(Error::InvalidParameter("need at least two points".into()));
    }
    let start = -(m.div_ceil(2) as i64);
    let pts: Vec<f64> = (0..m as i64).map(|i| eps * (start + i) as f64).collect();
    SamplingScheme::from_points_1d(pts, None, SchemeKind::Equispaced1d { eps, m })
}

/// Number of jittered points covering `[-K, K]` at spacing `ε`.
pub fn jittered_count(bandwidth: f64, eps: f64) -> usize {
    2 * (bandwidth / eps).ceil() as usize
}

/// `εk + u_k` with `u_k ~ U[-η, η]` on the equispaced index set; rejects
/// results with `δ ≥ 1/2`.
pub fn make_jittered_1d(eps: f64, jitter: f64, m: usize, seed: u64) -> Result<SamplingScheme> {
    check_eps(eps)?;
    if !(0.0..eps / 2.0).contains(&jitter) {
        return Err(Error::InvalidParameter(format!("jitter {jitter} must lie in [0, ε/2)")));
    }
    if m < 2 {
        return Err(Error::InvalidParameter("need at least two points".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = -(m.div_ceil(2) as i64);
    let pts: Vec<f64> = (0..m as i64)
        .map(|i| {
            let u = if jitter > 0.0 { rng.random_range(-jitter..=jitter) } else { 0.0 };
            eps * (start + i) as f64 + u
        })
        .collect();
    let s = SamplingScheme::from_points_1d(pts, None, SchemeKind::Jittered1d { eps, jitter, m, seed })?;
    s.check_density(0.5)?;
    Ok(s)
}

/// Symmetric logarithmic points on `[-K, K]` with all consecutive gaps `≤ target`:
/// `±(target/2)·q^i`, `i = 0..=n`, plus 0, with `q` chosen so the outermost gap
/// is at most `target`. `max_points` bounds the size.
pub fn make_log_1d(bandwidth: f64, target: f64, max_points: usize) -> Result<SamplingScheme> {
    if !(target > 0.0 && target < 1.0) || !(bandwidth > 0.0) {
        return Err(Error::InvalidParameter(format!("log scheme needs 0 < target < 1 and K > 0 (got {target}, {bandwidth})")));
    }
    let first = target / 2.0;
    let mut pts = vec![0.0];
    if bandwidth <= first {
        pts.extend([-bandwidth, bandwidth]);
    } else {
        let ratio = bandwidth / first;
        let n = if bandwidth <= target {
            1
        } else {
            (ratio.ln() / (bandwidth / (bandwidth - target)).ln()).ceil().max(1.0) as usize
        };
        let q = ratio.powf(1.0 / n as f64);
        for i in 0..=n {
            let p = if i == n { bandwidth } else { first * q.powi(i as i32) };
            pts.push(p);
            pts.push(-p);
        }
    }
    if pts.len() > max_points {
        return Err(Error::Unreachable(format!("log scheme needs {} points, limit {max_points}", pts.len())));
    }
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    SamplingScheme::from_points_1d(pts, None, SchemeKind::Log1d { bandwidth, target })
}

/// Tensor grid `(ε₁k₁, ε₂k₂)`, `k_i` as in [`make_equispaced_1d`], ordered
/// row-major in `(k₁, k₂)`; weights `ε₁ε₂`.
pub fn make_uniform_2d(eps1: f64, eps2: f64, m: usize) -> Result<SamplingScheme> {
    check_eps(eps1)?;
    check_eps(eps2)?;
    if m < 2 {
        return Err(Error::InvalidParameter("need at least two points per axis".into()));
    }
    let start = -(m.div_ceil(2) as i64);
    let ax = |e: f64| -> Vec<f64> { (0..m as i64).map(|i| e * (start + i) as f64).collect() };
    let (a1, a2) = (ax(eps1), ax(eps2));
    let mut x = Vec::with_capacity(m * m);
    let mut y = Vec::with_capacity(m * m);
    for &u in &a1 {
        for &v in &a2 {
            x.push(u);
            y.push(v);
        }
    }
    let lo = [a1[0] - eps1 / 2.0, a2[0] - eps2 / 2.0];
    let hi = [a1[m - 1] + eps1 / 2.0, a2[m - 1] + eps2 / 2.0];
    Ok(SamplingScheme {
        dim: 2,
        coords: vec![x, y],
        weights: vec![eps1 * eps2; m * m],
        region: Region::Rect { lo, hi },
        kind: SchemeKind::Uniform2d { eps: [eps1, eps2], m },
        weight_step: None,
    })
}

/// Remove points within `1e-9` of an earlier one.
fn dedup(x: Vec<f64>, y: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let mut seen = std::collections::HashSet::new();
    let mut ox = Vec::with_capacity(x.len());
    let mut oy = Vec::with_capacity(y.len());
    for (a, b) in x.into_iter().zip(y) {
        let key = ((a * 1e9).round() as i64, (b * 1e9).round() as i64);
        if seen.insert(key) {
            ox.push(a);
            oy.push(b);
        }
    }
    (ox, oy)
}

fn clean(v: f64) -> f64 {
    if v.abs() < 1e-12 { 0.0 } else { v }
}

/// `lines` equiangular diameters of the disk of radius `K`, points at multiples
/// of `spacing` along each, origin kept once.
pub fn make_radial_2d(bandwidth: f64, lines: usize, spacing: f64) -> Result<SamplingScheme> {
    make_radial_2d_with(bandwidth, lines, spacing, DEFAULT_GRID_DIVISIONS)
}

pub fn make_radial_2d_with(bandwidth: f64, lines: usize, spacing: f64, divisions: usize) -> Result<SamplingScheme> {
    if lines == 0 || !(spacing > 0.0) || !(bandwidth > 0.0) {
        return Err(Error::InvalidParameter("radial scheme needs lines > 0, spacing > 0, K > 0".into()));
    }
    let steps = (bandwidth / spacing + 1e-9).floor() as i64;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for l in 0..lines {
        let th = std::f64::consts::PI * l as f64 / lines as f64;
        let (s, c) = th.sin_cos();
        for j in -steps..=steps {
            let r = j as f64 * spacing;
            x.push(clean(r * c));
            y.push(clean(r * s));
        }
    }
    let (x, y) = dedup(x, y);
    SamplingScheme::from_points_2d(
        x,
        y,
        Region::Disk { radius: bandwidth },
        SchemeKind::Radial2d { bandwidth, lines, spacing },
        divisions,
    )
}

/// Radial scheme with the fewest lines (found by bisection) whose density is below `bound`.
pub fn radial_meeting_density(bandwidth: f64, spacing: f64, bound: f64, divisions: usize) -> Result<SamplingScheme> {
    let ok = |n: usize| -> Result<Option<SamplingScheme>> {
        let s = make_radial_2d_with(bandwidth, n, spacing, divisions)?;
        Ok((s.density().delta < bound).then_some(s))
    };
    let mut lo = 1usize;
    let mut hi = 4usize;
    let mut best = loop {
        if let Some(s) = ok(hi)? {
            break s;
        }
        lo = hi;
        hi *= 2;
        if hi > 1 << 16 {
            return Err(Error::Unreachable(format!("radial density {bound} not reached")));
        }
    };
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match ok(mid)? {
            Some(s) => {
                hi = mid;
                best = s;
            }
            None => lo = mid,
        }
    }
    Ok(best)
}

/// Archimedean spiral `r = pitch·θ/(2π)` (one turn per `pitch` of radius),
/// sampled every `step` of arc length until `r > K`, plus the mirrored arm.
pub fn make_spiral_2d(bandwidth: f64, pitch: f64, step: f64) -> Result<SamplingScheme> {
    if !(pitch > 0.0 && step > 0.0 && bandwidth > 0.0) {
        return Err(Error::InvalidParameter("spiral needs positive K, pitch and step".into()));
    }
    let c = pitch / (2.0 * std::f64::consts::PI);
    let mut x = vec![0.0];
    let mut y = vec![0.0];
    let mut th = 0.0f64;
    let limit = 50_000_000usize;
    loop {
        // dθ from ds = c·sqrt(1 + θ²) dθ
        th += step / (c * (1.0 + th * th).sqrt());
        let r = c * th;
        if r > bandwidth {
            break;
        }
        let (s, co) = th.sin_cos();
        x.extend([r * co, -r * co]);
        y.extend([r * s, -r * s]);
        if x.len() > limit {
            return Err(Error::Unreachable("spiral too dense".into()));
        }
    }
    let (x, y) = dedup(x, y);
    SamplingScheme::from_points_2d(
        x,
        y,
        Region::Disk { radius: bandwidth },
        SchemeKind::Spiral2d { bandwidth, pitch, step },
        DEFAULT_GRID_DIVISIONS,
    )
}

/// Bucketed ℓ¹ nearest-neighbour search.
pub struct NearestL1<'a> {
    x: &'a [f64],
    y: &'a [f64],
    lo: [f64; 2],
    cell: f64,
    dims: [usize; 2],
    start: Vec<usize>,
    items: Vec<usize>,
}

impl<'a> NearestL1<'a> {
    pub fn new(x: &'a [f64], y: &'a [f64]) -> Self {
        let n = x.len();
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for m in 0..n {
            lo[0] = lo[0].min(x[m]);
            lo[1] = lo[1].min(y[m]);
            hi[0] = hi[0].max(x[m]);
            hi[1] = hi[1].max(y[m]);
        }
        let ext = [(hi[0] - lo[0]).max(1e-12), (hi[1] - lo[1]).max(1e-12)];
        let cell = ((ext[0] * ext[1] / n as f64).sqrt() * 1.5).max(ext[0].max(ext[1]) / 4096.0).max(1e-9);
        let dims = [(ext[0] / cell).floor() as usize + 1, (ext[1] / cell).floor() as usize + 1];
        let mut counts = vec![0usize; dims[0] * dims[1] + 1];
        let key = |m: usize| -> usize {
            let i = (((x[m] - lo[0]) / cell) as usize).min(dims[0] - 1);
            let j = (((y[m] - lo[1]) / cell) as usize).min(dims[1] - 1);
            i * dims[1] + j
        };
        for m in 0..n {
            counts[key(m) + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut fill = counts.clone();
        let mut items = vec![0; n];
        for m in 0..n {
            let k = key(m);
            items[fill[k]] = m;
            fill[k] += 1;
        }
        Self { x, y, lo, cell, dims, start: counts, items }
    }

    fn has_duplicates(&self) -> bool {
        (0..self.x.len()).any(|m| {
            let mut found = false;
            self.visit_within(self.x[m], self.y[m], 1e-12, |k, _| {
                if k != m {
                    found = true;
                }
            });
            found
        })
    }

    fn visit_within(&self, px: f64, py: f64, radius: f64, mut f: impl FnMut(usize, f64)) {
        let ci = |v: f64, o: f64, d: usize| -> i64 { (((v - o) / self.cell).floor() as i64).clamp(0, d as i64 - 1) };
        let (i0, i1) = (ci(px - radius, self.lo[0], self.dims[0]), ci(px + radius, self.lo[0], self.dims[0]));
        let (j0, j1) = (ci(py - radius, self.lo[1], self.dims[1]), ci(py + radius, self.lo[1], self.dims[1]));
        for i in i0..=i1 {
            for j in j0..=j1 {
                let b = i as usize * self.dims[1] + j as usize;
                for &m in &self.items[self.start[b]..self.start[b + 1]] {
                    let d = (self.x[m] - px).abs() + (self.y[m] - py).abs();
                    if d <= radius {
                        f(m, d);
                    }
                }
            }
        }
    }

    /// Nearest point in ℓ¹ and its distance.
    pub fn nearest(&self, px: f64, py: f64) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        self.nearest_ties(px, py, 0.0, |m, d| {
            if d < best.1 {
                best = (m, d);
            }
        });
        best
    }

    /// Visit every point within `tie` of the minimal ℓ¹ distance; returns that distance.
    pub fn nearest_ties(&self, px: f64, py: f64, tie: f64, mut f: impl FnMut(usize, f64)) -> f64 {
        // distance from the query to the bucket grid, so the search starts where points are
        let gx = (self.lo[0] - px).max(px - (self.lo[0] + self.cell * self.dims[0] as f64)).max(0.0);
        let gy = (self.lo[1] - py).max(py - (self.lo[1] + self.cell * self.dims[1] as f64)).max(0.0);
        let mut radius = self.cell + gx + gy;
        loop {
            let mut best = f64::INFINITY;
            self.visit_within(px, py, radius, |_, d| best = best.min(d));
            if best.is_finite() {
                self.visit_within(px, py, best + tie, |m, d| f(m, d));
                return best;
            }
            radius *= 2.0;
        }
    }
}

fn voronoi_2d(index: &NearestL1<'_>, region: &Region, divisions: usize) -> (Vec<f64>, f64) {
    let (lo, hi) = region.bbox();
    let scale = (hi[0] - lo[0]).max(hi[1] - lo[1]) / 2.0;
    let h = scale / divisions.max(1) as f64;
    let nx = ((hi[0] - lo[0]) / h).round().max(1.0) as usize;
    let ny = ((hi[1] - lo[1]) / h).round().max(1.0) as usize;
    let (hx, hy) = ((hi[0] - lo[0]) / nx as f64, (hi[1] - lo[1]) / ny as f64);
    let mut w = vec![0.0; index.x.len()];
    let mut ties = Vec::with_capacity(4);
    let mut total = 0.0;
    for i in 0..nx {
        let px = lo[0] + (i as f64 + 0.5) * hx;
        for j in 0..ny {
            let py = lo[1] + (j as f64 + 0.5) * hy;
            if !region.contains(&[px, py]) {
                continue;
            }
            ties.clear();
            index.nearest_ties(px, py, 1e-12 * scale.max(1.0), |m, _| ties.push(m));
            let share = hx * hy / ties.len() as f64;
            for &m in &ties {
                w[m] += share;
            }
            total += hx * hy;
        }
    }
    // grid counting misses the curved boundary of a disk; rescale to the exact measure
    let fix = region.measure() / total;
    w.iter_mut().for_each(|v| *v *= fix);
    (w, hx.max(hy))
}

/// Density value with the maximising location and, in 2D, the final scan step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Density {
    pub delta: f64,
    pub location: Vec<f64>,
    pub step: Option<f64>,
}

impl Density {
    /// `2δ`, the quantity quoted as "density" in some figure captions.
    pub fn doubled(&self) -> f64 {
        2.0 * self.delta
    }
}

/// Finest scan step of the 2D branch-and-bound search.
pub const DENSITY_STEP: f64 = 1.0 / 64.0;

pub fn density(s: &SamplingScheme) -> Density {
    match s.region {
        Region::Interval { lo, hi } => {
            let mut p = s.coords[0].clone();
            p.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            let mut best = (p[0] - lo, lo);
            if hi - p[p.len() - 1] > best.0 {
                best = (hi - p[p.len() - 1], hi);
            }
            for w in p.windows(2) {
                let g = (w[1] - w[0]) / 2.0;
                if g > best.0 {
                    best = (g, 0.5 * (w[0] + w[1]));
                }
            }
            Density { delta: best.0, location: vec![best.1], step: None }
        }
        _ => density_2d(s, DENSITY_STEP),
    }
}

/// Branch and bound over square cells: `d(c) ≤ δ_cell ≤ d(c) + h` for a cell of
/// side `h` centred at `c` (ℓ¹ distance is 1-Lipschitz and every point of the
/// cell is within `h` of its centre; `2h` for cells cut by the boundary). Cells whose upper bound cannot beat the
/// current best lower bound are dropped.
pub fn density_2d(s: &SamplingScheme, min_step: f64) -> Density {
    let index = NearestL1::new(&s.coords[0], &s.coords[1]);
    let region = &s.region;
    let (lo, hi) = region.bbox();
    let side = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let mut h = side / 256.0;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let n0 = ((hi[0] - lo[0]) / h).ceil() as usize;
    let n1 = ((hi[1] - lo[1]) / h).ceil() as usize;
    for i in 0..n0 {
        for j in 0..n1 {
            cells.push((lo[0] + (i as f64 + 0.5) * h, lo[1] + (j as f64 + 0.5) * h));
        }
    }
    let mut best = (f64::NEG_INFINITY, vec![0.0, 0.0]);
    loop {
        let mut scored = Vec::with_capacity(cells.len());
        for &(cx, cy) in &cells {
            // skip cells that do not meet the region
            let (qx, qy) = region.project(cx, cy);
            if (qx - cx).abs() > h / 2.0 + 1e-12 || (qy - cy).abs() > h / 2.0 + 1e-12 {
                continue;
            }
            let (_, d) = index.nearest(qx, qy);
            if d > best.0 {
                best = (d, vec![qx, qy]);
            }
            // ℓ¹ radius of the cell about the evaluated point
            let slack = if qx == cx && qy == cy { h } else { 2.0 * h };
            scored.push((cx, cy, d + slack));
        }
        if h <= min_step {
            break;
        }
        let floor = best.0;
        let hh = h / 2.0;
        cells = scored
            .into_iter()
            .filter(|&(_, _, upper)| upper > floor)
            .flat_map(|(cx, cy, _)| {
                let q = hh / 2.0;
                [(cx - q, cy - q), (cx - q, cy + q), (cx + q, cy - q), (cx + q, cy + q)]
            })
            .collect();
        h = hh;
    }
    Density { delta: best.0, location: best.1, step: Some(h) }
}
