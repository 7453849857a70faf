//! Ringnets: indexed vertex families around a single extraordinary vertex
//! (primal) or face (dual), together with the frame, ordering and norm
//! machinery used by the spectral analysis.
//!
//! A primal net stores a center vertex plus, per segment `l` and ring
//! `r >= 1`, the vertices `g_ij^l` it owns (`i >= 1`, `0 <= j`, `max(i,j) = r`).
//! The shared spoke vertex `g_0j^l = g_j0^{l+1}` is stored once, owned by
//! segment `l+1`. A dual net stores `h_ij^l` with `i, j >= 1` and ring
//! `max(i,j) - 1`.

use std::collections::BTreeMap;

use nalgebra::Complex;

use crate::scalar::Avg;

pub type C64 = Complex<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetKind {
    Primal,
    Dual,
}

impl NetKind {
    /// Primal nets pair with odd degrees, dual nets with even degrees.
    pub fn matches_degree(self, n: usize) -> bool {
        match self {
            NetKind::Primal => n % 2 == 1,
            NetKind::Dual => n % 2 == 0,
        }
    }

    pub fn for_degree(n: usize) -> NetKind {
        if n % 2 == 1 {
            NetKind::Primal
        } else {
            NetKind::Dual
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RingnetError {
    #[error("valence must be at least 3, got {0}")]
    BadValence(usize),
    #[error("frequency must lie in 1..={max}, got {f}")]
    BadFrequency { f: usize, max: usize },
    #[error("ring count must be at least 1")]
    NoRings,
    #[error("net kind {kind:?} does not match degree {n}")]
    ParityMismatch { kind: NetKind, n: usize },
    #[error("net has {have} rings but degree {n} needs at least {need}")]
    TooFewRings { have: usize, need: usize, n: usize },
    #[error("segment angle must lie in (0, 2*pi), got {0}")]
    AngleOutOfRange(f64),
    #[error("ringnets have different topology")]
    TopologyMismatch,
}

/// Largest ring index of the core mesh: `omega = floor((n-1)/2)`.
pub fn omega(n: usize) -> usize {
    (n - 1) / 2
}

/// Ring index of the net controlling one spline difference ring:
/// `rho = ceil(3(n-1)/2)`.
pub fn rho(n: usize) -> usize {
    (3 * n - 3).div_ceil(2)
}

/// Band of output rings influenced by input ring `i` under one subdivision
/// step of degree `n`: `2i - floor((n+1)/2) <= j <= 2i + ceil((n+1)/2)`,
/// clamped below at 0.
pub fn influence_range(n: usize, i: usize, kind: NetKind) -> Result<(usize, usize), RingnetError> {
    if !kind.matches_degree(n) {
        return Err(RingnetError::ParityMismatch { kind, n });
    }
    let lo = (2 * i as i64 - ((n as i64 + 1) / 2)).max(0) as usize;
    let hi = 2 * i + (n + 1).div_ceil(2);
    Ok((lo, hi))
}

/// A ringnet with values of type `V` (complex points for geometry, exact
/// rationals or linear forms for matrix work).
#[derive(Debug, Clone, PartialEq)]
pub struct Net<V> {
    pub m: usize,
    pub kind: NetKind,
    /// Largest ring index `j`; the net stores rings `0..=j`.
    pub jmax: usize,
    pub freq: Option<usize>,
    vals: Vec<V>,
}

/// Vertex label `(l, i, j)` in grid-mesh indexing.
pub type Label = (usize, usize, usize);

impl<V> Net<V> {
    pub fn ring_count(&self) -> usize {
        self.jmax + 1
    }

    /// Number of stored vertices.
    pub fn len(&self) -> usize {
        dim(self.kind, self.m, self.jmax)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[V] {
        &self.vals
    }

    pub fn values_mut(&mut self) -> &mut [V] {
        &mut self.vals
    }

    pub fn into_values(self) -> Vec<V> {
        self.vals
    }

    /// Vertices owned by one segment in ring `r`, in canonical order.
    pub fn owned_in_ring(kind: NetKind, r: usize) -> Vec<(usize, usize)> {
        owned_in_ring(kind, r)
    }

    /// Canonical labels aligned with `values()`.
    pub fn labels(&self) -> Vec<Label> {
        labels(self.kind, self.m, self.jmax)
    }

    /// Flat index of vertex `(l, i, j)`, resolving the primal spoke
    /// identification `g_0j^l = g_j0^{l+1}`. Returns `None` beyond `jmax`.
    pub fn index_of(&self, l: usize, i: usize, j: usize) -> Option<usize> {
        index_of(self.kind, self.m, self.jmax, l, i, j)
    }
}

fn owned_in_ring(kind: NetKind, r: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    match kind {
        NetKind::Primal => {
            // ring r = max(i,j); owned means i >= 1
            for j in 0..=r {
                out.push((r, j));
            }
            for i in (1..r).rev() {
                out.push((i, r));
            }
        }
        NetKind::Dual => {
            // ring r holds h_ij with max(i,j) = r + 1
            let s = r + 1;
            for j in 1..=s {
                out.push((s, j));
            }
            for i in (1..s).rev() {
                out.push((i, s));
            }
        }
    }
    out
}

fn per_segment_ring_len(kind: NetKind, r: usize) -> usize {
    match kind {
        NetKind::Primal => 2 * r,
        NetKind::Dual => 2 * r + 1,
    }
}

/// Total stored vertices of a `jmax`-net.
pub fn dim(kind: NetKind, m: usize, jmax: usize) -> usize {
    match kind {
        NetKind::Primal => 1 + m * jmax * (jmax + 1),
        NetKind::Dual => m * (jmax + 1) * (jmax + 1),
    }
}

fn ring_start(kind: NetKind, m: usize, r: usize) -> usize {
    match kind {
        NetKind::Primal => {
            if r == 0 {
                0
            } else {
                1 + m * r * (r - 1)
            }
        }
        NetKind::Dual => m * r * r,
    }
}

fn labels(kind: NetKind, m: usize, jmax: usize) -> Vec<Label> {
    let mut out = Vec::with_capacity(dim(kind, m, jmax));
    if kind == NetKind::Primal {
        out.push((0, 0, 0));
    }
    let r0 = if kind == NetKind::Primal { 1 } else { 0 };
    for r in r0..=jmax {
        let owned = owned_in_ring(kind, r);
        for l in 0..m {
            for &(i, j) in &owned {
                out.push((l, i, j));
            }
        }
    }
    out
}

fn index_of(
    kind: NetKind,
    m: usize,
    jmax: usize,
    l: usize,
    i: usize,
    j: usize,
) -> Option<usize> {
    match kind {
        NetKind::Primal => {
            if i == 0 && j == 0 {
                return Some(0);
            }
            // resolve the spoke identification
            let (l, i, j) = if i == 0 { ((l + 1) % m, j, 0) } else { (l, i, j) };
            let r = i.max(j);
            if r > jmax {
                return None;
            }
            let pos = if i == r { j } else { r + (r - i) };
            Some(ring_start(kind, m, r) + (l % m) * per_segment_ring_len(kind, r) + pos)
        }
        NetKind::Dual => {
            debug_assert!(i >= 1 && j >= 1);
            let r = i.max(j) - 1;
            if r > jmax {
                return None;
            }
            let s = r + 1;
            let pos = if i == s { j - 1 } else { 2 * s - 1 - i };
            Some(ring_start(kind, m, r) + (l % m) * per_segment_ring_len(kind, r) + pos)
        }
    }
}

impl<V: Avg> Net<V> {
    pub fn from_values(
        kind: NetKind,
        m: usize,
        jmax: usize,
        vals: Vec<V>,
    ) -> Result<Self, RingnetError> {
        if m < 3 {
            return Err(RingnetError::BadValence(m));
        }
        if vals.len() != dim(kind, m, jmax) {
            return Err(RingnetError::TopologyMismatch);
        }
        Ok(Net {
            m,
            kind,
            jmax,
            freq: None,
            vals,
        })
    }

    pub fn zeros(kind: NetKind, m: usize, jmax: usize) -> Self {
        Net {
            m,
            kind,
            jmax,
            freq: None,
            vals: vec![V::zero(); dim(kind, m, jmax)],
        }
    }

    /// Vertex value, treating rings beyond `jmax` as zero.
    pub fn get(&self, l: usize, i: usize, j: usize) -> V {
        match self.index_of(l % self.m, i, j) {
            Some(ix) => self.vals[ix].clone(),
            None => V::zero(),
        }
    }

    fn get_wrap(&self, l: i64, i: usize, j: usize) -> V {
        let m = self.m as i64;
        self.get(l.rem_euclid(m) as usize, i, j)
    }

    /// Keep only rings `0..=jmax`.
    pub fn truncate(mut self, jmax: usize) -> Self {
        assert!(jmax <= self.jmax);
        self.vals.truncate(dim(self.kind, self.m, jmax));
        self.jmax = jmax;
        self
    }

    pub fn map<W: Avg>(&self, f: impl Fn(&V) -> W) -> Net<W> {
        Net {
            m: self.m,
            kind: self.kind,
            jmax: self.jmax,
            freq: self.freq,
            vals: self.vals.iter().map(f).collect(),
        }
    }
}

/// One topological refinement step `R`. The output is a primal net at twice
/// the index resolution, with rings `0..=out_jmax` (reads beyond the stored
/// input rings contribute zero).
pub fn refine_step<V: Avg>(net: &Net<V>, out_jmax: usize) -> Net<V> {
    let m = net.m;
    let mut out = Net::<V>::zeros(NetKind::Primal, m, out_jmax);
    out.freq = net.freq;
    // center
    let center = match net.kind {
        NetKind::Primal => net.get(0, 0, 0),
        NetKind::Dual => {
            let gon: Vec<V> = (0..m).map(|l| net.get(l, 1, 1)).collect();
            let refs: Vec<&V> = gon.iter().collect();
            V::mean(&refs)
        }
    };
    let c_ix = out.index_of(0, 0, 0).unwrap();
    out.vals[c_ix] = center;

    for r in 1..=out_jmax {
        for l in 0..m {
            for (a, b) in owned_in_ring(NetKind::Primal, r) {
                let v = match net.kind {
                    NetKind::Primal => refine_primal_vertex(net, l, a, b),
                    NetKind::Dual => refine_dual_vertex(net, l, a, b),
                };
                let ix = out.index_of(l, a, b).unwrap();
                out.vals[ix] = v;
            }
        }
    }
    out
}

fn refine_primal_vertex<V: Avg>(net: &Net<V>, l: usize, a: usize, b: usize) -> V {
    match (a % 2, b % 2) {
        (0, 0) => net.get(l, a / 2, b / 2),
        (1, 1) => {
            let (i, j) = ((a - 1) / 2, (b - 1) / 2);
            V::mean(&[
                &net.get(l, i, j),
                &net.get(l, i + 1, j),
                &net.get(l, i, j + 1),
                &net.get(l, i + 1, j + 1),
            ])
        }
        (1, 0) => {
            let (i, j) = ((a - 1) / 2, b / 2);
            V::mean(&[&net.get(l, i, j), &net.get(l, i + 1, j)])
        }
        (0, 1) => {
            let (i, j) = (a / 2, (b - 1) / 2);
            V::mean(&[&net.get(l, i, j), &net.get(l, i, j + 1)])
        }
        _ => unreachable!(),
    }
}

fn refine_dual_vertex<V: Avg>(net: &Net<V>, l: usize, a: usize, b: usize) -> V {
    let li = l as i64;
    match (a % 2, b % 2) {
        // surviving dual vertex
        (1, 1) => net.get(l, (a + 1) / 2, (b + 1) / 2),
        // center of the dual face around primal position (a/2, b/2)
        (0, 0) => dual_face_center(net, li, a / 2, b / 2),
        (1, 0) => {
            let i = (a + 1) / 2;
            if b == 0 {
                // edge crossing spoke S_l
                V::mean(&[&net.get(l, i, 1), &net.get_wrap(li - 1, 1, i)])
            } else {
                V::mean(&[&net.get(l, i, b / 2), &net.get(l, i, b / 2 + 1)])
            }
        }
        (0, 1) => {
            let j = (b + 1) / 2;
            V::mean(&[&net.get(l, a / 2, j), &net.get(l, a / 2 + 1, j)])
        }
        _ => unreachable!(),
    }
}

/// Center of the dual-mesh face around primal position `(i, j)`, `i >= 1`.
fn dual_face_center<V: Avg>(net: &Net<V>, l: i64, i: usize, j: usize) -> V {
    if j >= 1 {
        V::mean(&[
            &net.get_wrap(l, i, j),
            &net.get_wrap(l, i + 1, j),
            &net.get_wrap(l, i, j + 1),
            &net.get_wrap(l, i + 1, j + 1),
        ])
    } else {
        // face around the spoke vertex g_i0^l
        V::mean(&[
            &net.get_wrap(l, i, 1),
            &net.get_wrap(l, i + 1, 1),
            &net.get_wrap(l - 1, 1, i),
            &net.get_wrap(l - 1, 1, i + 1),
        ])
    }
}

/// One averaging step `A`: replaces the net by the net of face centers,
/// flipping between primal and dual.
pub fn average_step<V: Avg>(net: &Net<V>, out_jmax: usize) -> Net<V> {
    let m = net.m;
    match net.kind {
        NetKind::Primal => {
            let mut out = Net::<V>::zeros(NetKind::Dual, m, out_jmax);
            out.freq = net.freq;
            for r in 0..=out_jmax {
                for l in 0..m {
                    for (i, j) in owned_in_ring(NetKind::Dual, r) {
                        let v = V::mean(&[
                            &net.get(l, i - 1, j - 1),
                            &net.get(l, i, j - 1),
                            &net.get(l, i - 1, j),
                            &net.get(l, i, j),
                        ]);
                        let ix = out.index_of(l, i, j).unwrap();
                        out.vals[ix] = v;
                    }
                }
            }
            out
        }
        NetKind::Dual => {
            let mut out = Net::<V>::zeros(NetKind::Primal, m, out_jmax);
            out.freq = net.freq;
            let gon: Vec<V> = (0..m).map(|l| net.get(l, 1, 1)).collect();
            let refs: Vec<&V> = gon.iter().collect();
            let c_ix = out.index_of(0, 0, 0).unwrap();
            out.vals[c_ix] = V::mean(&refs);
            for r in 1..=out_jmax {
                for l in 0..m {
                    for (i, j) in owned_in_ring(NetKind::Primal, r) {
                        let v = dual_face_center(net, l as i64, i, j);
                        let ix = out.index_of(l, i, j).unwrap();
                        out.vals[ix] = v;
                    }
                }
            }
            out
        }
    }
}

/// Subdivide a `j`-net by `M_n = A^(n-1) R` and keep rings `0..=j`.
///
/// Rings beyond `j` never influence the result for `j >= omega(n)`, so the
/// chain runs with implicit zero padding and the final truncation is exact.
pub fn subdivide_ringnet<V: Avg>(net: &Net<V>, n: usize) -> Result<Net<V>, RingnetError> {
    if n < 1 {
        return Err(RingnetError::ParityMismatch { kind: net.kind, n });
    }
    if !net.kind.matches_degree(n) {
        return Err(RingnetError::ParityMismatch { kind: net.kind, n });
    }
    let j = net.jmax;
    if j < omega(n) {
        return Err(RingnetError::TooFewRings {
            have: net.ring_count(),
            need: omega(n) + 1,
            n,
        });
    }
    let mut cur = refine_step(net, j + n);
    for _ in 0..n - 1 {
        let next_jmax = cur.jmax - 1;
        cur = average_step(&cur, next_jmax);
    }
    Ok(cur.truncate(j))
}

/// Rings `0..=omega(n)` of a net: the core mesh.
pub fn core_mesh<V: Avg>(net: &Net<V>, n: usize) -> Result<Net<V>, RingnetError> {
    let w = omega(n);
    if net.jmax < w {
        return Err(RingnetError::TooFewRings {
            have: net.ring_count(),
            need: w + 1,
            n,
        });
    }
    Ok(net.clone().truncate(w))
}

/// Grid mesh of Definition "grid mesh": `g_ij^l = i e^(i 2 pi l f / m) +
/// j e^(i 2 pi (l+1) f / m)`, dual vertices as quarter averages.
pub fn make_grid_mesh(
    m: usize,
    f: usize,
    kind: NetKind,
    rings: usize,
) -> Result<Net<C64>, RingnetError> {
    if m < 3 {
        return Err(RingnetError::BadValence(m));
    }
    if f < 1 || f > m - 1 {
        return Err(RingnetError::BadFrequency { f, max: m - 1 });
    }
    if rings < 1 {
        return Err(RingnetError::NoRings);
    }
    let jmax = rings - 1;
    let u = |t: usize| -> C64 {
        let ang = 2.0 * std::f64::consts::PI * (t as f64) * (f as f64) / m as f64;
        C64::new(ang.cos(), ang.sin())
    };
    let g = |l: usize, i: usize, j: usize| -> C64 { u(l) * i as f64 + u(l + 1) * j as f64 };
    let mut net = Net::<C64>::zeros(kind, m, jmax);
    net.freq = Some(f);
    for (ix, (l, i, j)) in net.labels().into_iter().enumerate() {
        net.vals[ix] = match kind {
            NetKind::Primal => g(l, i, j),
            NetKind::Dual => {
                (g(l, i - 1, j - 1) + g(l, i, j - 1) + g(l, i - 1, j) + g(l, i, j)) * 0.25
            }
        };
    }
    Ok(net)
}

/// Segment angle of a frequency-`f` net of valence `m`.
pub fn segment_angle(m: usize, f: usize) -> f64 {
    2.0 * std::f64::consts::PI * f as f64 / m as f64
}

/// The coordinate frame with axes orthogonal to the spokes `S_0.5` and `S_0`.
#[derive(Debug, Clone, Copy)]
pub struct FrameK {
    pub phi: f64,
    pub theta: f64,
}

impl FrameK {
    pub fn new(phi: f64) -> Result<FrameK, RingnetError> {
        if !(phi > 0.0 && phi < 2.0 * std::f64::consts::PI) {
            return Err(RingnetError::AngleOutOfRange(phi));
        }
        Ok(FrameK {
            phi,
            theta: phi / 2.0 - std::f64::consts::FRAC_PI_2,
        })
    }

    /// Basis vectors `[cos theta, sin theta]` and `[0, 1]`.
    pub fn basis(&self) -> ([f64; 2], [f64; 2]) {
        ([self.theta.cos(), self.theta.sin()], [0.0, 1.0])
    }

    /// Coordinates of a complex point in this frame.
    pub fn coords(&self, p: C64) -> (f64, f64) {
        let x = p.re / self.theta.cos();
        (x, p.im - x * self.theta.sin())
    }
}

/// Labels of the first half segment `H`: `l = 0`, `i >= j`, `(i,j) != (0,0)`,
/// in `(i, j)`-lexicographic order.
pub fn half_segment_labels(kind: NetKind, jmax: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    match kind {
        NetKind::Primal => {
            for i in 1..=jmax {
                for j in 0..=i {
                    out.push((i, j));
                }
            }
        }
        NetKind::Dual => {
            for i in 1..=jmax + 1 {
                for j in 1..=i {
                    out.push((i, j));
                }
            }
        }
    }
    out
}

/// Values of the first half segment, aligned with `half_segment_labels`.
pub fn half_segment(net: &Net<C64>) -> Vec<C64> {
    half_segment_labels(net.kind, net.jmax)
        .into_iter()
        .map(|(i, j)| net.get(0, i, j))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetryFlags {
    pub rotation: bool,
    pub reflection: bool,
}

/// Check rotation symmetry with frequency `f` and reflection symmetry
/// against the conjugate permuted net.
pub fn symmetry_check(net: &Net<C64>, f: usize) -> SymmetryFlags {
    let m = net.m;
    let scale = net
        .values()
        .iter()
        .map(|v| v.norm())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let tol = 1e-12 * scale;
    let rot = C64::new(0.0, segment_angle(m, f)).exp();
    let mut rotation = true;
    let mut reflection = true;
    for (l, i, j) in net.labels() {
        let p = net.get(l, i, j);
        if (net.get((l + 1) % m, i, j) - p * rot).norm() > tol {
            rotation = false;
        }
        let permuted = match net.kind {
            NetKind::Primal => net.get((m - 1 + m - l % m) % m, j.max(0), i).conj(),
            NetKind::Dual => net.get((m - 1 + m - l % m) % m, j, i).conj(),
        };
        // p~_ij^l = p_ji^{(m-1)-l}; compare conj(p~) with p
        if (permuted - p).norm() > tol {
            reflection = false;
        }
    }
    SymmetryFlags {
        rotation,
        reflection,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetOrder {
    Less,
    LessEq,
    Equal,
    GreaterEq,
    Greater,
    Incomparable,
}

pub const ORDER_TOL: f64 = 1e-12;

/// Pointwise comparison of two symmetric ringnets over `H` in a shared frame.
pub fn compare_nets(a: &Net<C64>, b: &Net<C64>, frame: &FrameK) -> Result<NetOrder, RingnetError> {
    if a.m != b.m || a.kind != b.kind || a.jmax != b.jmax {
        return Err(RingnetError::TopologyMismatch);
    }
    let mut pos = 0usize;
    let mut neg = 0usize;
    let mut zero = 0usize;
    for (i, j) in half_segment_labels(a.kind, a.jmax) {
        let (ax, ay) = frame.coords(a.get(0, i, j));
        let (bx, by) = frame.coords(b.get(0, i, j));
        for d in [ax - bx, ay - by] {
            if d > ORDER_TOL {
                pos += 1;
            } else if d < -ORDER_TOL {
                neg += 1;
            } else {
                zero += 1;
            }
        }
    }
    Ok(match (pos, neg, zero) {
        (0, 0, _) => NetOrder::Equal,
        (_, 0, 0) => NetOrder::Greater,
        (_, 0, _) => NetOrder::GreaterEq,
        (0, _, 0) => NetOrder::Less,
        (0, _, _) => NetOrder::LessEq,
        _ => NetOrder::Incomparable,
    })
}

/// Per-vertex norm `max(|x|, |y|)` in the frame; MIN and MAX over `H`.
pub fn min_max_norm(net: &Net<C64>, frame: &FrameK) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = 0.0f64;
    for (i, j) in half_segment_labels(net.kind, net.jmax) {
        let (x, y) = frame.coords(net.get(0, i, j));
        let n = x.abs().max(y.abs());
        min = min.min(n);
        max = max.max(n);
    }
    (min, max)
}

/// True if every `H`-vertex lies in the cone spanned by the spokes `S_0`
/// and `S_0.5` (angles `[0, phi/2]`), within an angular tolerance.
pub fn h_in_cone(net: &Net<C64>, phi: f64, tol: f64) -> bool {
    half_segment(net).iter().all(|p| {
        if p.norm() <= tol {
            return true;
        }
        let ang = p.im.atan2(p.re);
        ang >= -tol && ang <= phi / 2.0 + tol
    })
}

/// Project a net onto the exactly rotation- and reflection-symmetric nets
/// of frequency `f` (orbit-wise DFT component, then reflection averaging).
pub fn symmetrize(net: &Net<C64>, f: usize) -> Net<C64> {
    let m = net.m;
    let w = C64::new(0.0, segment_angle(m, f)).exp();
    let mut out = Net::<C64>::zeros(net.kind, m, net.jmax);
    out.freq = Some(f);
    let r0 = if net.kind == NetKind::Primal { 1 } else { 0 };
    // frequency-f component per segment-0 representative
    let mut comp: BTreeMap<(usize, usize), C64> = BTreeMap::new();
    for r in r0..=net.jmax {
        for (i, j) in owned_in_ring(net.kind, r) {
            let mut q = C64::new(0.0, 0.0);
            for l in 0..m {
                q += net.get(l, i, j) * w.powi(-(l as i32));
            }
            comp.insert((i, j), q / m as f64);
        }
    }
    // reflection symmetry requires q_ji = w * conj(q_ij); spoke vertices
    // (their own partners through the segment identification) must be real
    let keys: Vec<_> = comp.keys().copied().collect();
    for (i, j) in keys {
        let q = comp[&(i, j)];
        if j == 0 {
            // the spoke identification makes these their own reflection
            // partners; the constraint collapses to q being real
            comp.insert((i, j), C64::new(q.re, 0.0));
        } else if i == j {
            comp.insert((i, j), (q + w * q.conj()) * 0.5);
        } else if i > j {
            let p = comp[&(j, i)];
            let avg = (q + w * p.conj()) * 0.5;
            comp.insert((i, j), avg);
            comp.insert((j, i), w * avg.conj());
        }
    }
    for (ix, (l, i, j)) in out.labels().into_iter().enumerate() {
        if net.kind == NetKind::Primal && (i, j) == (0, 0) {
            // the center is rotation-invariant, so it survives only at f = 0,
            // and reflection (conjugation) forces it to be real
            out.vals[ix] = if f == 0 {
                C64::new(net.get(0, 0, 0).re, 0.0)
            } else {
                C64::new(0.0, 0.0)
            };
        } else {
            out.vals[ix] = comp[&(i, j)] * w.powi(l as i32);
        }
    }
    out
}

impl Net<C64> {
    pub fn scale(&self, s: C64) -> Net<C64> {
        self.map(|v| v * s)
    }

    pub fn max_abs_diff(&self, other: &Net<C64>) -> f64 {
        self.vals
            .iter()
            .zip(&other.vals)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
