//! The characteristic map: the ring of tensor-product spline patches defined
//! by a rho-net, with evaluation, derivatives, the cone-based regularity and
//! injectivity test, and C1 certificates.

use nalgebra::Complex;

use crate::eigen::C64;
use crate::ringnet::{rho, Net, NetKind, RingnetError};
use crate::spectral::{self, SpectralError};

#[derive(Debug, thiserror::Error)]
pub enum CharmapError {
    #[error(transparent)]
    Net(#[from] RingnetError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("degree must be at least 2 for the characteristic map")]
    DegreeTooSmall,
    #[error("a patch subnet reached into the irregular region (cell {0}, {1})")]
    SubnetIrregular(usize, usize),
    #[error("parameter ({0}, {1}) lies outside the ring domain")]
    DomainError(f64, f64),
}

/// One bi-degree-n patch: (n+1) x (n+1) control points, `controls[iu][iv]`.
#[derive(Debug, Clone)]
pub struct Patch {
    /// Grid cell (a, b) in [0, 2q)^2 with max(a, b) >= q.
    pub cell: (usize, usize),
    pub controls: Vec<Vec<C64>>,
}

impl Patch {
    /// Subsegment 0, 1, 2 for [1,2]x[0,1], [1,2]^2, [0,1]x[1,2].
    pub fn subsegment(&self, q: usize) -> usize {
        let (a, b) = self.cell;
        if a >= q && b < q {
            0
        } else if a >= q && b >= q {
            1
        } else {
            2
        }
    }
}

/// The spline ring over Omega = [0,2]^2 \ [0,1)^2, one entry of `segments`
/// per mesh segment, each holding 3 q^2 patches.
#[derive(Debug)]
pub struct CharacteristicMap {
    pub n: usize,
    pub m: usize,
    pub q: usize,
    /// Unit complex factor applied to all controls so that c(1,1) > 0.
    pub rotation: C64,
    pub segments: Vec<Vec<Patch>>,
}

/// Cardinal B-spline of degree `n` on integer knots, support [0, n+1].
pub fn bspline(n: usize, x: f64) -> f64 {
    if n == 0 {
        return if (0.0..1.0).contains(&x) { 1.0 } else { 0.0 };
    }
    if x <= 0.0 || x >= (n + 1) as f64 {
        return 0.0;
    }
    let nf = n as f64;
    (x * bspline(n - 1, x) + (nf + 1.0 - x) * bspline(n - 1, x - 1.0)) / nf
}

/// Chart of the grid around the extraordinary element, continued across the
/// two spokes bounding segment `s`. Signed indices address segment-`s` grid
/// coordinates; a negative coordinate reaches into the neighbor segment.
fn chart(net: &Net<C64>, s: usize, i: i64, j: i64) -> Result<C64, CharmapError> {
    let m = net.m as i64;
    let s = s as i64;
    let seg = |d: i64| ((s + d).rem_euclid(m)) as usize;
    let val = match net.kind {
        NetKind::Primal => {
            if i >= 0 && j >= 0 {
                net.get(seg(0), i as usize, j as usize)
            } else if i < 0 && j >= 0 {
                net.get(seg(1), j as usize, (-i) as usize)
            } else if j < 0 && i >= 0 {
                net.get(seg(-1), (-j) as usize, i as usize)
            } else {
                return Err(CharmapError::SubnetIrregular(0, 0));
            }
        }
        NetKind::Dual => {
            if i >= 1 && j >= 1 {
                net.get(seg(0), i as usize, j as usize)
            } else if i < 1 && j >= 1 {
                net.get(seg(1), j as usize, (1 - i) as usize)
            } else if j < 1 && i >= 1 {
                net.get(seg(-1), (1 - j) as usize, i as usize)
            } else {
                return Err(CharmapError::SubnetIrregular(0, 0));
            }
        }
    };
    Ok(val)
}

/// Build the spline ring of a rho-net: per segment the 3 q^2 bi-degree-n
/// patches over the cells (a, b) in [0, 2q)^2 with max(a, b) >= q.
pub fn extract_spline_ring(net: &Net<C64>, n: usize) -> Result<CharacteristicMap, CharmapError> {
    if n < 2 {
        return Err(CharmapError::DegreeTooSmall);
    }
    if !net.kind.matches_degree(n) {
        return Err(RingnetError::ParityMismatch { kind: net.kind, n }.into());
    }
    let need = rho(n);
    if net.jmax < need {
        return Err(RingnetError::TooFewRings {
            have: net.ring_count(),
            need: need + 1,
            n,
        }
        .into());
    }
    let q = n / 2;
    // index window of the n+1 controls of a cell along one axis
    let lo = |a: usize| -> i64 {
        match net.kind {
            NetKind::Primal => a as i64 - (n as i64 - 1) / 2,
            NetKind::Dual => a as i64 - n as i64 / 2 + 1,
        }
    };
    let mut segments = Vec::with_capacity(net.m);
    for s in 0..net.m {
        let mut patches = Vec::with_capacity(3 * q * q);
        for a in 0..2 * q {
            for b in 0..2 * q {
                if a.max(b) < q {
                    continue;
                }
                let mut controls = vec![vec![C64::new(0.0, 0.0); n + 1]; n + 1];
                for (ku, row) in controls.iter_mut().enumerate() {
                    for (kv, v) in row.iter_mut().enumerate() {
                        *v = chart(net, s, lo(a) + ku as i64, lo(b) + kv as i64)
                            .map_err(|_| CharmapError::SubnetIrregular(a, b))?;
                    }
                }
                patches.push(Patch { cell: (a, b), controls });
            }
        }
        segments.push(patches);
    }
    let mut map = CharacteristicMap {
        n,
        m: net.m,
        q,
        rotation: C64::new(1.0, 0.0),
        segments,
    };
    // rotate so that c(1,1) is real and positive
    let z = map.evaluate(0, 1.0, 1.0)?;
    if z.norm() > 0.0 {
        let r = z.conj() / z.norm();
        for seg in &mut map.segments {
            for p in seg {
                for row in &mut p.controls {
                    for v in row.iter_mut() {
                        *v *= r;
                    }
                }
            }
        }
        map.rotation = r;
    }
    Ok(map)
}

impl CharacteristicMap {
    fn locate(&self, u: f64, v: f64) -> Result<(usize, f64, f64), CharmapError> {
        if !(0.0..=2.0).contains(&u) || !(0.0..=2.0).contains(&v) || (u < 1.0 && v < 1.0) {
            return Err(CharmapError::DomainError(u, v));
        }
        let q = self.q as f64;
        let cell_of = |x: f64| -> (usize, f64) {
            let a = (x * q).floor().min(2.0 * q - 1.0).max(0.0);
            (a as usize, x * q - a)
        };
        let (a, tu) = cell_of(u);
        let (b, tv) = cell_of(v);
        let (a, b, tu, tv) = if a.max(b) < self.q {
            // only reachable through rounding at the inner corner
            if u >= v {
                (self.q, b, 0.0, tv)
            } else {
                (a, self.q, tu, 0.0)
            }
        } else {
            (a, b, tu, tv)
        };
        let ix = self.segments[0]
            .iter()
            .position(|p| p.cell == (a, b))
            .expect("cell enumerated");
        Ok((ix, tu, tv))
    }

    /// Tensor-product spline value at (u, v) in Omega.
    pub fn evaluate(&self, segment: usize, u: f64, v: f64) -> Result<C64, CharmapError> {
        let (ix, tu, tv) = self.locate(u, v)?;
        let p = &self.segments[segment % self.m][ix];
        let n = self.n;
        let mut acc = C64::new(0.0, 0.0);
        for (ku, row) in p.controls.iter().enumerate() {
            let wu = bspline(n, tu + (n - ku) as f64);
            if wu == 0.0 {
                continue;
            }
            for (kv, d) in row.iter().enumerate() {
                let wv = bspline(n, tv + (n - kv) as f64);
                acc += d * (wu * wv);
            }
        }
        Ok(acc)
    }

    /// Partial derivatives (c_u, c_v) at (u, v).
    pub fn evaluate_derivatives(
        &self,
        segment: usize,
        u: f64,
        v: f64,
    ) -> Result<(C64, C64), CharmapError> {
        let (ix, tu, tv) = self.locate(u, v)?;
        let p = &self.segments[segment % self.m][ix];
        let n = self.n;
        let qf = self.q as f64;
        let mut cu = C64::new(0.0, 0.0);
        let mut cv = C64::new(0.0, 0.0);
        for ku in 0..=n {
            let wu = bspline(n, tu + (n - ku) as f64);
            let wdu = if ku < n {
                bspline(n - 1, tu + (n - 1 - ku) as f64)
            } else {
                0.0
            };
            for kv in 0..=n {
                let wv = bspline(n, tv + (n - kv) as f64);
                if ku < n {
                    let du = p.controls[ku + 1][kv] - p.controls[ku][kv];
                    cu += du * (wdu * wv);
                }
                if kv < n {
                    let wdv = bspline(n - 1, tv + (n - 1 - kv) as f64);
                    let dv = p.controls[ku][kv + 1] - p.controls[ku][kv];
                    cv += dv * (wu * wdv);
                }
            }
        }
        // chain factor of the parameter map x = u q (integer-knot B-spline
        // differences carry no degree factor)
        Ok((cu * qf, cv * qf))
    }
}

/// Edge directions of the first segment, plus the spoke directions u_1 and
/// i*u_0 (Reif-criterion direction set E).
pub struct EdgeDirectionSet {
    pub directions: Vec<C64>,
    pub u0: C64,
    pub u1: C64,
}

pub fn edge_directions(net: &Net<C64>) -> EdgeDirectionSet {
    let rot = C64::new(0.0, 2.0 * std::f64::consts::PI / net.m as f64).exp();
    let mut directions = Vec::new();
    let (u0, u1);
    match net.kind {
        NetKind::Primal => {
            for i in 1..=net.jmax {
                for j in 0..net.jmax {
                    if i.max(j + 1) <= net.jmax {
                        directions.push(net.get(0, i, j + 1) - net.get(0, i, j));
                    }
                }
            }
            u0 = net.get(0, 1, 0);
            u1 = net.get(0, 0, 1);
        }
        NetKind::Dual => {
            for i in 1..=net.jmax {
                for j in 1..=net.jmax {
                    if i.max(j + 1) - 1 <= net.jmax {
                        directions.push(net.get(0, i, j + 1) - net.get(0, i, j));
                    }
                }
            }
            // direction along spoke S_0 between consecutive midpoints of the
            // vertex pairs flanking the spoke
            let flank = |i: usize| -> C64 {
                (net.get(0, i, 1) + net.get(net.m - 1, 1, i) * Complex::from(1.0)) * 0.5
            };
            u0 = flank(2) - flank(1);
            u1 = u0 * rot;
        }
    }
    directions.push(u1);
    directions.push(u0 * C64::new(0.0, 1.0));
    EdgeDirectionSet { directions, u0, u1 }
}

/// Offending v-derivative control point found by the cone test.
#[derive(Debug, Clone)]
pub struct ConeWitness {
    pub segment: usize,
    pub cell: (usize, usize),
    pub ku: usize,
    pub kv: usize,
    pub value: C64,
}

pub struct ConeTestResult {
    pub pass: bool,
    /// Smallest coordinate of any v-derivative control point.
    pub margin: f64,
    pub witnesses: Vec<ConeWitness>,
}

/// Sufficient regularity test on the first-segment map c (the other
/// segments are rotated copies): every v-derivative control point built
/// from two in-segment chart points, together with the spoke directions
/// u_1 and i*u_0, must lie in the open quadrant Q = {x + iy | x, y > 0}.
///
/// Differences with a control continued across a spoke are skipped: by the
/// symmetry of the net each such difference is the spoke-reflection of an
/// in-segment difference already tested, and in the derivative's convex
/// combination a reflected direction carries a smaller basis weight than
/// its in-segment partner (the cardinal B-spline weights decay away from
/// the segment), so the paired sums stay between the tested directions.
/// The sampled-Jacobian check in `min_jacobian` covers the same boundary
/// cells numerically.
pub fn cone_test(map: &CharacteristicMap) -> ConeTestResult {
    let mut witnesses = Vec::new();
    let mut margin = f64::INFINITY;
    let n = map.n as i64;
    // first in-segment index along either axis, and the window start of a cell
    let odd = map.n % 2 == 1;
    let proper_from = if odd { 0i64 } else { 1i64 };
    let lo = |a: i64| if odd { a - (n - 1) / 2 } else { a - n / 2 + 1 };
    let mut check = |s: usize, cell: (usize, usize), ku: usize, kv: usize, d: C64| {
        margin = margin.min(d.re.min(d.im));
        if d.re <= 0.0 || d.im <= 0.0 {
            witnesses.push(ConeWitness { segment: s, cell, ku, kv, value: d });
        }
    };
    for (s, seg) in map.segments.iter().enumerate().take(1) {
        for p in seg {
            let (a, b) = (p.cell.0 as i64, p.cell.1 as i64);
            for ku in 0..=map.n {
                if lo(a) + (ku as i64) < proper_from {
                    continue;
                }
                for kv in 0..map.n {
                    if lo(b) + (kv as i64) < proper_from {
                        continue;
                    }
                    let d = p.controls[ku][kv + 1] - p.controls[ku][kv];
                    check(s, p.cell, ku, kv, d);
                }
            }
        }
        // spoke directions: pre-rotation u_0 is real positive, u_1 = u_0 e^{i phi}
        let phi = 2.0 * std::f64::consts::PI / map.m as f64;
        let u0 = map.rotation;
        let u1 = u0 * C64::new(0.0, phi).exp();
        check(s, (0, 0), 0, 0, u1);
        check(s, (0, 0), 0, 0, u0 * C64::new(0.0, 1.0));
    }
    ConeTestResult {
        pass: witnesses.is_empty(),
        margin,
        witnesses,
    }
}

/// Smallest Jacobian determinant det(c_u, c_v) over a 17 x 17 sample per
/// patch of the first segment (the others are rotations).
pub fn min_jacobian(map: &CharacteristicMap) -> Result<f64, CharmapError> {
    let q = map.q as f64;
    let mut min = f64::INFINITY;
    for p in &map.segments[0] {
        let (a, b) = p.cell;
        for su in 0..17 {
            for sv in 0..17 {
                let u = (a as f64 + su as f64 / 16.0) / q;
                let v = (b as f64 + sv as f64 / 16.0) / q;
                let (cu, cv) = map.evaluate_derivatives(0, u.min(2.0), v.min(2.0))?;
                let det = cu.re * cv.im - cu.im * cv.re;
                min = min.min(det);
            }
        }
    }
    Ok(min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct C1Checks {
    pub stochastic: bool,
    pub dominant_simple: bool,
    pub subdominant_real_mult2: bool,
    pub charmap_regular_injective: bool,
}

#[derive(Debug)]
pub struct C1Certificate {
    pub n: usize,
    pub m: usize,
    pub lambda: f64,
    pub mult_alg: usize,
    pub mult_geo: usize,
    pub cone_margin: f64,
    pub min_jacobian: f64,
    pub checks: C1Checks,
    pub verdict: Verdict,
    /// Tolerances the checks were run with, name -> value.
    pub tolerances: Vec<(&'static str, f64)>,
}

const IMAG_TOL: f64 = 1e-9;
const MARGIN_TOL: f64 = 1e-9;

/// Numeric verification of Reif's C1 criterion for (n, m): subdominant
/// eigenstructure plus a regular, injective characteristic map.
#[allow(non_snake_case)]
pub fn certify_C1(n: usize, m: usize) -> Result<C1Certificate, CharmapError> {
    if n < 2 {
        return Err(CharmapError::DegreeTooSmall);
    }
    let report = spectral::spectral_report(n, m)?;
    let (char_net, lambda, _) = spectral::characteristic_mesh(n, m, 1e-11, 20000)?;
    let map = extract_spline_ring(&char_net, n)?;
    let cone = cone_test(&map);
    let jac = min_jacobian(&map)?;
    let c11 = map.evaluate(0, 1.0, 1.0)?;

    let charmap_ok = cone.pass && jac > 0.0 && c11.re > 0.0 && c11.im.abs() < 1e-12;
    let checks = C1Checks {
        stochastic: report.pass.stochastic,
        dominant_simple: report.pass.dominant_simple,
        subdominant_real_mult2: report.pass.subdominant_real_mult2
            && report.pass.frequency_attribution,
        charmap_regular_injective: charmap_ok,
    };
    let all = checks.stochastic
        && checks.dominant_simple
        && checks.subdominant_real_mult2
        && checks.charmap_regular_injective;
    // near-the-edge results are reported as inconclusive rather than trusted
    let scale = map
        .segments
        .iter()
        .flatten()
        .flat_map(|p| p.controls.iter().flatten())
        .map(|z| z.norm())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let borderline = cone.margin.abs() < 10.0 * MARGIN_TOL * scale
        || jac.abs() < 10.0 * MARGIN_TOL * scale * scale
        || (report.lambda_sub - 0.25).abs() < 10.0 * IMAG_TOL
        || (report.lambda_sub - 1.0).abs() < 10.0 * IMAG_TOL;
    let verdict = if borderline {
        Verdict::Inconclusive
    } else if all {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(C1Certificate {
        n,
        m,
        lambda,
        mult_alg: report.mult_alg,
        mult_geo: report.mult_geo,
        cone_margin: cone.margin,
        min_jacobian: jac,
        checks,
        verdict,
        tolerances: vec![
            ("imag_tol", IMAG_TOL),
            ("margin_tol", MARGIN_TOL),
            ("power_tol", 1e-11),
            ("eigen_cluster_radius", 1e-6),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ringnet::{make_grid_mesh, segment_angle};
    use crate::spectral::characteristic_mesh;

    #[test]
    fn bspline_partition_of_unity() {
        for n in 1..=9usize {
            for t in [0.0, 0.25, 0.5, 0.99, 1.0] {
                let sum: f64 = (0..=n).map(|k| bspline(n, t + (n - k) as f64)).sum();
                assert!((sum - 1.0).abs() < 1e-12, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn patch_counts() {
        for (n, m, per_seg) in [(6usize, 3usize, 27usize), (2, 5, 3), (3, 5, 3)] {
            let net = make_grid_mesh(m, 1, NetKind::for_degree(n), rho(n) + 1).unwrap();
            let map = extract_spline_ring(&net, n).unwrap();
            assert_eq!(map.segments.len(), m);
            for seg in &map.segments {
                assert_eq!(seg.len(), per_seg);
            }
        }
    }

    #[test]
    fn grid_mesh_map_is_identity_like() {
        // on valence 4 the grid mesh is the regular grid; the spline ring
        // reproduces the (linear) position function exactly
        for n in [2usize, 3, 4, 5] {
            let net = make_grid_mesh(4, 1, NetKind::for_degree(n), rho(n) + 1).unwrap();
            let map = extract_spline_ring(&net, n).unwrap();
            let rot = map.rotation;
            for (u, v) in [(1.0, 0.0), (2.0, 0.0), (1.5, 0.5), (1.0, 1.0), (0.5, 1.5), (2.0, 2.0)] {
                let z = map.evaluate(0, u, v).unwrap();
                let q = map.q as f64;
                let expect = (C64::new(u * q, 0.0) + C64::new(0.0, v * q)) * rot;
                assert!((z - expect).norm() < 1e-12, "n={n} ({u},{v}): {z} vs {expect}");
            }
        }
    }

    #[test]
    fn boundary_agreement_between_patches() {
        let (net, _, _) = characteristic_mesh(3, 5, 1e-11, 20000).unwrap();
        let map = extract_spline_ring(&net, 3).unwrap();
        // interior patch boundary u = 2-eps vs adjacent cells along v
        for v in [0.0f64, 0.3, 1.0, 1.7, 2.0] {
            let a = map.evaluate(0, 1.0 - 1e-12, v.max(1.0)).unwrap();
            let b = map.evaluate(0, 1.0 + 1e-12, v.max(1.0)).unwrap();
            assert!((a - b).norm() < 1e-9);
        }
        // cross-segment spoke boundary: segment s at v=0 equals segment s-1 at u->v swap
        let p0 = map.evaluate(0, 1.5, 0.0).unwrap();
        let p1 = map.evaluate(map.m - 1, 0.0, 1.5).unwrap();
        assert!((p0 - p1).norm() < 1e-10);
    }

    #[test]
    fn rotational_equivariance() {
        let (net, _, _) = characteristic_mesh(2, 5, 1e-11, 20000).unwrap();
        let map = extract_spline_ring(&net, 2).unwrap();
        let rot = C64::new(0.0, segment_angle(5, 1)).exp();
        for (u, v) in [(1.2, 0.4), (1.7, 1.7), (0.3, 1.1)] {
            let a = map.evaluate(1, u, v).unwrap();
            let b = map.evaluate(0, u, v).unwrap() * rot;
            assert!((a - b).norm() < 1e-11);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let (net, _, _) = characteristic_mesh(3, 5, 1e-11, 20000).unwrap();
        let map = extract_spline_ring(&net, 3).unwrap();
        let h = 1e-6;
        for (u, v) in [(1.3, 0.4), (1.6, 1.2), (0.5, 1.5)] {
            let (cu, cv) = map.evaluate_derivatives(0, u, v).unwrap();
            let du = (map.evaluate(0, u + h, v).unwrap() - map.evaluate(0, u - h, v).unwrap())
                / C64::new(2.0 * h, 0.0);
            let dv = (map.evaluate(0, u, v + h).unwrap() - map.evaluate(0, u, v - h).unwrap())
                / C64::new(2.0 * h, 0.0);
            assert!((cu - du).norm() / cu.norm().max(1e-9) < 1e-6);
            assert!((cv - dv).norm() / cv.norm().max(1e-9) < 1e-6);
        }
    }

    #[test]
    fn cone_test_passes_for_characteristic_meshes() {
        for (n, m) in [(2usize, 5usize), (3, 5), (3, 3)] {
            let (net, _, _) = characteristic_mesh(n, m, 1e-11, 20000).unwrap();
            let map = extract_spline_ring(&net, n).unwrap();
            let res = cone_test(&map);
            assert!(res.pass, "n={n} m={m}: {} witnesses", res.witnesses.len());
            assert!(min_jacobian(&map).unwrap() > 0.0);
            let c11 = map.evaluate(0, 1.0, 1.0).unwrap();
            assert!(c11.re > 0.0 && c11.im.abs() < 1e-12);
        }
    }

    #[test]
    fn cone_pass_implies_sampled_cv_in_q() {
        // the reflected boundary differences skipped by the cone test carry
        // smaller weights than their in-segment partners, so the derivative
        // itself must still land in Q everywhere, boundary cells included
        for (n, m) in [(3usize, 7usize), (4, 7), (2, 3)] {
            let (net, _, _) = characteristic_mesh(n, m, 1e-11, 20000).unwrap();
            let map = extract_spline_ring(&net, n).unwrap();
            assert!(cone_test(&map).pass, "n={n} m={m}");
            let q = map.q as f64;
            for p in &map.segments[0] {
                let (a, b) = p.cell;
                for su in 0..=8 {
                    for sv in 0..=8 {
                        let u = ((a as f64 + su as f64 / 8.0) / q).min(2.0);
                        let v = ((b as f64 + sv as f64 / 8.0) / q).min(2.0);
                        let (_, cv) = map.evaluate_derivatives(0, u, v).unwrap();
                        assert!(
                            cv.re > 0.0 && cv.im > 0.0,
                            "n={n} m={m} ({u},{v}): c_v = {cv}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn cone_test_fails_on_reflected_net() {
        let (net, _, _) = characteristic_mesh(2, 5, 1e-11, 20000).unwrap();
        let reflected = net.map(|z| z.conj());
        let map = extract_spline_ring(&reflected, 2).unwrap();
        let res = cone_test(&map);
        assert!(!res.pass);
    }

    #[test]
    fn edge_directions_of_characteristic_mesh_in_q() {
        for (n, m) in [(3usize, 5usize), (2, 5)] {
            let (net, _, _) = characteristic_mesh(n, m, 1e-11, 20000).unwrap();
            // align with the cone test normalization
            let map = extract_spline_ring(&net, n).unwrap();
            let aligned = net.scale(map.rotation);
            let e = edge_directions(&aligned);
            for d in &e.directions {
                assert!(d.norm() > 0.0);
                assert!(d.re > -1e-12 && d.im > -1e-12, "n={n}: {d}");
            }
        }
    }

    #[test]
    fn certify_small_cases() {
        let cert = certify_C1(2, 5).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass, "{cert:?}");
        let cert = certify_C1(3, 5).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass);
        assert_eq!((cert.mult_alg, cert.mult_geo), (2, 2));
        assert!(certify_C1(1, 5).is_err());
    }

    #[test]
    fn eigennet_scaling_of_the_map() {
        let (net, lambda, _) = characteristic_mesh(3, 5, 1e-11, 20000).unwrap();
        let sub = crate::ringnet::symmetrize(
            &crate::ringnet::subdivide_ringnet(&net, 3).unwrap(),
            1,
        );
        let map = extract_spline_ring(&net, 3).unwrap();
        let map_sub = extract_spline_ring(&sub, 3).unwrap();
        for (u, v) in [(1.4, 0.7), (1.1, 1.9), (0.2, 1.3)] {
            // compare unrotated geometry: undo each map's own normalization
            let a = map_sub.evaluate(0, u, v).unwrap() / map_sub.rotation;
            let b = map.evaluate(0, u, v).unwrap() / map.rotation * C64::from(lambda);
            assert!((a - b).norm() < 1e-9, "({u},{v}): {a} vs {b}");
        }
    }
}
