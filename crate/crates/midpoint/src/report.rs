//! Deterministic JSON/CSV/OBJ serialization of analysis results: fixed field
//! order and fixed `%.15e` float formatting so identical runs produce
//! byte-identical files.

use std::fmt::Write as _;

use crate::charmap::{C1Certificate, CharacteristicMap, CharmapError, Verdict};
use crate::eigen::C64;
use crate::ringnet::{FrameK, Net, NetKind};
use crate::spectral::SpectralReport;

/// C-style `%.15e` rendering: 15 fractional digits, sign and at least two
/// digits in the exponent.
pub fn fmt_float(x: f64) -> String {
    let s = format!("{x:.15e}");
    let (mant, exp) = s.split_once('e').expect("exponential format");
    let (sign, digits) = match exp.strip_prefix('-') {
        Some(d) => ('-', d),
        None => ('+', exp),
    };
    format!("{mant}e{sign}{digits:0>2}")
}

fn kind_name(kind: NetKind) -> &'static str {
    match kind {
        NetKind::Primal => "primal",
        NetKind::Dual => "dual",
    }
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Inconclusive => "inconclusive",
    }
}

/// Spectral report as JSON: `{n, m, j, frequencies, lambda_sub, mult_alg,
/// mult_geo, normB, normC, pass_flags}`.
pub fn spectral_report_json(r: &SpectralReport) -> String {
    let mut out = String::new();
    write!(out, "{{\"n\":{},\"m\":{},\"j\":{},\"frequencies\":[", r.n, r.m, r.j).unwrap();
    for (ix, fr) in r.frequencies.iter().enumerate() {
        if ix > 0 {
            out.push(',');
        }
        write!(out, "{{\"f\":{},\"eigenvalues\":[", fr.f).unwrap();
        for (k, ev) in fr.eigenvalue_moduli.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            write!(out, "\"{}\"", fmt_float(*ev)).unwrap();
        }
        out.push_str("]}");
    }
    write!(
        out,
        "],\"lambda_sub\":\"{}\",\"mult_alg\":{},\"mult_geo\":{},\"normB\":\"{}\",\"normC\":\"{}\"",
        fmt_float(r.lambda_sub),
        r.mult_alg,
        r.mult_geo,
        fmt_float(r.norm_b),
        fmt_float(r.norm_c)
    )
    .unwrap();
    write!(
        out,
        ",\"pass_flags\":{{\"stochastic\":{},\"dominant_simple\":{},\"subdominant_real_mult2\":{},\"frequency_attribution\":{},\"norm_bounds\":{},\"spectrum_union\":{}}}}}",
        r.pass.stochastic,
        r.pass.dominant_simple,
        r.pass.subdominant_real_mult2,
        r.pass.frequency_attribution,
        r.pass.norm_bounds,
        r.pass.spectrum_union
    )
    .unwrap();
    out
}

/// Ringnet as JSON: `{m, kind, rings, f?, vertices: [{l,i,j,re,im}]}`.
pub fn ringnet_json(net: &Net<C64>) -> String {
    let mut out = String::new();
    write!(
        out,
        "{{\"m\":{},\"kind\":\"{}\",\"rings\":{}",
        net.m,
        kind_name(net.kind),
        net.ring_count()
    )
    .unwrap();
    if let Some(f) = net.freq {
        write!(out, ",\"f\":{f}").unwrap();
    }
    out.push_str(",\"vertices\":[");
    for (ix, (l, i, j)) in net.labels().into_iter().enumerate() {
        if ix > 0 {
            out.push(',');
        }
        let z = net.get(l, i, j);
        write!(
            out,
            "{{\"l\":{l},\"i\":{i},\"j\":{j},\"re\":\"{}\",\"im\":\"{}\"}}",
            fmt_float(z.re),
            fmt_float(z.im)
        )
        .unwrap();
    }
    out.push_str("]}");
    out
}

/// C1 certificate as JSON. The timestamp is passed in by the caller so that
/// batch runs can pin it for reproducible output.
pub fn certificate_json(c: &C1Certificate, timestamp: &str) -> String {
    let mut out = String::new();
    write!(
        out,
        "{{\"n\":{},\"m\":{},\"lambda\":\"{}\",\"mult_alg\":{},\"mult_geo\":{},\"cone_margin\":\"{}\",\"min_jacobian\":\"{}\"",
        c.n,
        c.m,
        fmt_float(c.lambda),
        c.mult_alg,
        c.mult_geo,
        fmt_float(c.cone_margin),
        fmt_float(c.min_jacobian)
    )
    .unwrap();
    write!(
        out,
        ",\"checks\":{{\"stochastic\":{},\"dominant_simple\":{},\"subdominant_real_mult2\":{},\"charmap_regular_injective\":{}}}",
        c.checks.stochastic,
        c.checks.dominant_simple,
        c.checks.subdominant_real_mult2,
        c.checks.charmap_regular_injective
    )
    .unwrap();
    write!(out, ",\"verdict\":\"{}\",\"tolerances\":{{", verdict_name(c.verdict)).unwrap();
    for (ix, (name, tol)) in c.tolerances.iter().enumerate() {
        if ix > 0 {
            out.push(',');
        }
        write!(out, "\"{name}\":\"{}\"", fmt_float(*tol)).unwrap();
    }
    write!(out, "}},\"timestamp\":\"{timestamp}\"}}").unwrap();
    out
}

/// Eigenvalue table CSV: one row per (frequency, eigenvalue index).
pub fn eigenvalue_csv(r: &SpectralReport) -> String {
    let mut out = String::from("n,m,f,index,modulus\n");
    for fr in &r.frequencies {
        for (ix, ev) in fr.eigenvalue_moduli.iter().enumerate() {
            writeln!(out, "{},{},{},{},{}", r.n, r.m, fr.f, ix, fmt_float(*ev)).unwrap();
        }
    }
    out
}

/// Half-segment coordinates of a net in the frame K, one row per vertex.
pub fn h_coords_csv(net: &Net<C64>, frame: &FrameK) -> String {
    let mut out = String::from("i,j,x,y\n");
    for (i, j) in crate::ringnet::half_segment_labels(net.kind, net.jmax) {
        let (x, y) = frame.coords(net.get(0, i, j));
        writeln!(out, "{i},{j},{},{}", fmt_float(x), fmt_float(y)).unwrap();
    }
    out
}

/// Certification summary CSV, one row per (n, m) case.
pub fn summary_csv(certs: &[C1Certificate]) -> String {
    let mut out = String::from("n,m,lambda,mult_alg,mult_geo,verdict\n");
    for c in certs {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            c.n,
            c.m,
            fmt_float(c.lambda),
            c.mult_alg,
            c.mult_geo,
            verdict_name(c.verdict)
        )
        .unwrap();
    }
    out
}

/// Characteristic-map samples as CSV `u,v,segment,re,im`, `res`+1 samples per
/// cell edge.
pub fn charmap_samples_csv(map: &CharacteristicMap, res: usize) -> Result<String, CharmapError> {
    let mut out = String::from("u,v,segment,re,im\n");
    let q = map.q as f64;
    for s in 0..map.m {
        for p in &map.segments[s] {
            let (a, b) = p.cell;
            for su in 0..=res {
                for sv in 0..=res {
                    let u = ((a as f64 + su as f64 / res as f64) / q).min(2.0);
                    let v = ((b as f64 + sv as f64 / res as f64) / q).min(2.0);
                    let z = map.evaluate(s, u, v)?;
                    writeln!(
                        out,
                        "{},{},{s},{},{}",
                        fmt_float(u),
                        fmt_float(v),
                        fmt_float(z.re),
                        fmt_float(z.im)
                    )
                    .unwrap();
                }
            }
        }
    }
    Ok(out)
}

/// Characteristic-map samples as an OBJ of quads, `res` quads per cell edge,
/// for external plotting. The planar map is embedded at z = 0.
pub fn charmap_obj(map: &CharacteristicMap, res: usize) -> Result<String, CharmapError> {
    let mut verts = String::new();
    let mut faces = String::new();
    let q = map.q as f64;
    let mut count = 0usize;
    for s in 0..map.m {
        for p in &map.segments[s] {
            let (a, b) = p.cell;
            let base = count;
            for su in 0..=res {
                for sv in 0..=res {
                    let u = ((a as f64 + su as f64 / res as f64) / q).min(2.0);
                    let v = ((b as f64 + sv as f64 / res as f64) / q).min(2.0);
                    let z = map.evaluate(s, u, v)?;
                    writeln!(
                        verts,
                        "v {} {} {}",
                        fmt_float(z.re),
                        fmt_float(z.im),
                        fmt_float(0.0)
                    )
                    .unwrap();
                    count += 1;
                }
            }
            let stride = res + 1;
            for su in 0..res {
                for sv in 0..res {
                    let i00 = base + su * stride + sv + 1;
                    writeln!(faces, "f {} {} {} {}", i00, i00 + stride, i00 + stride + 1, i00 + 1)
                        .unwrap();
                }
            }
        }
    }
    Ok(verts + &faces)
}
