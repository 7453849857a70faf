//! The subdivision matrix on j-nets: assembly, block partition, frequency
//! decomposition, eigen analysis, and the characteristic mesh.

use std::collections::BTreeMap;
use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use num::rational::BigRational;
use num::{BigInt, One, Signed, Zero};

use crate::eigen::{self, C64};
use crate::ringnet::{
    dim, make_grid_mesh, min_max_norm, omega, rho, segment_angle, subdivide_ringnet, FrameK,
    Label, Net, NetKind, RingnetError,
};
use crate::scalar::LinForm;

#[derive(Debug, thiserror::Error)]
pub enum SpectralError {
    #[error(transparent)]
    Net(#[from] RingnetError),
    #[error("matrix entry at ({row}, {col}) = {value} violates the block ordering")]
    OrderingViolation { row: usize, col: usize, value: f64 },
    #[error("partition requires j >= omega + 1")]
    TooFewRingsForPartition,
    #[error("segment orbits are inconsistent")]
    OrbitMismatch,
    #[error(transparent)]
    Eigen(#[from] eigen::EigenError),
    #[error("power iteration did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("characteristic mesh has a non-positive half-segment vertex")]
    PositivityViolation,
    #[error("eigenvalue cluster around {lambda} is ambiguous at radius {radius}")]
    IllConditioned { lambda: f64, radius: f64 },
}

/// Dense real matrix of M_n restricted to j-nets, rows/columns in the
/// canonical ring-major label order.
#[derive(Debug, Clone)]
pub struct SubdivisionMatrix {
    pub n: usize,
    pub m: usize,
    pub kind: NetKind,
    pub j: usize,
    pub dense: DMatrix<f64>,
    pub labels: Vec<Label>,
}

/// Index ranges of the block ordering [core | b | c | outer]. `b` and `c`
/// interleave inside the ring omega+1 span, so they are kept as index lists.
#[derive(Debug, Clone)]
pub struct Partition {
    pub core: Range<usize>,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
    pub outer: Range<usize>,
}

impl SubdivisionMatrix {
    /// Column k = subdivide_ringnet applied to the unit net e_k.
    pub fn assemble(n: usize, m: usize, j: usize) -> Result<Self, RingnetError> {
        let kind = NetKind::for_degree(n);
        let d = dim(kind, m, j);
        let mut dense = DMatrix::<f64>::zeros(d, d);
        for k in 0..d {
            let mut unit = Net::<f64>::zeros(kind, m, j);
            unit.values_mut()[k] = 1.0;
            let col = subdivide_ringnet(&unit, n)?;
            for (r, v) in col.values().iter().enumerate() {
                dense[(r, k)] = *v;
            }
        }
        let labels = Net::<f64>::zeros(kind, m, j).labels();
        Ok(SubdivisionMatrix {
            n,
            m,
            kind,
            j,
            dense,
            labels,
        })
    }

    pub fn dim(&self) -> usize {
        self.dense.nrows()
    }

    /// Exact rational rows via a single symbolic pass: subdividing the net
    /// of unit linear forms makes each output value its own matrix row.
    pub fn exact_rows(&self) -> Vec<BTreeMap<usize, BigRational>> {
        let d = self.dim();
        let mut sym = Net::<LinForm<usize>>::zeros(self.kind, self.m, self.j);
        for k in 0..d {
            sym.values_mut()[k] = LinForm::unit(k);
        }
        let out = subdivide_ringnet(&sym, self.n).expect("same preconditions as assemble");
        out.into_values().into_iter().map(|form| form.terms).collect()
    }

    /// Apply the matrix to a complex net (real matrix, complex data).
    pub fn apply_net(&self, net: &Net<C64>) -> Net<C64> {
        let re = DVector::from_iterator(self.dim(), net.values().iter().map(|z| z.re));
        let im = DVector::from_iterator(self.dim(), net.values().iter().map(|z| z.im));
        let ore = &self.dense * re;
        let oim = &self.dense * im;
        let mut out = net.clone();
        for (k, v) in out.values_mut().iter_mut().enumerate() {
            *v = C64::new(ore[k], oim[k]);
        }
        out
    }

    /// The [core | b | c | outer] split; `c` holds the per-segment corner
    /// vertices of ring omega+1.
    pub fn partition(&self) -> Result<Partition, SpectralError> {
        let w = omega(self.n);
        if self.j < w + 1 {
            return Err(SpectralError::TooFewRingsForPartition);
        }
        let core_end = dim(self.kind, self.m, w);
        let ring_end = dim(self.kind, self.m, w + 1);
        let mut b = Vec::new();
        let mut c = Vec::new();
        for ix in core_end..ring_end {
            let (_, i, jj) = self.labels[ix];
            if i == jj {
                c.push(ix);
            } else {
                b.push(ix);
            }
        }
        Ok(Partition {
            core: 0..core_end,
            b,
            c,
            outer: ring_end..self.dim(),
        })
    }

    fn ring_of_index(&self, ix: usize) -> usize {
        let (_, i, jj) = self.labels[ix];
        match self.kind {
            NetKind::Primal => i.max(jj),
            NetKind::Dual => i.max(jj) - 1,
        }
    }

    /// Verify the lower-triangular block structure and return the diagonal
    /// blocks (core A, B, C) as dense matrices.
    pub fn block_partition(&self) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>), SpectralError> {
        let p = self.partition()?;
        let group = |ix: usize| -> usize {
            if p.core.contains(&ix) {
                0
            } else if p.b.contains(&ix) {
                1
            } else if p.c.contains(&ix) {
                2
            } else {
                3
            }
        };
        for row in 0..self.dim() {
            for col in 0..self.dim() {
                let v = self.dense[(row, col)];
                if v.abs() <= 1e-14 {
                    continue;
                }
                let (gr, gc) = (group(row), group(col));
                let bad = gc > gr
                    // outer diagonal blocks: an outer row may not depend on
                    // its own or any larger ring
                    || (gr == 3 && gc == 3 && self.ring_of_index(col) >= self.ring_of_index(row));
                if bad {
                    return Err(SpectralError::OrderingViolation { row, col, value: v });
                }
            }
        }
        let sub = |ix: &[usize]| {
            DMatrix::from_fn(ix.len(), ix.len(), |r, c| self.dense[(ix[r], ix[c])])
        };
        let core: Vec<usize> = p.core.clone().collect();
        Ok((sub(&core), sub(&p.b), sub(&p.c)))
    }
}

/// Exact infinity norms of the diagonal blocks B and C, with the Lemma 7.1
/// comparisons `normB <= 2^-n`, `normC <= 4^-n` done in rationals.
pub struct BlockNormBounds {
    pub norm_b: BigRational,
    pub norm_c: BigRational,
    pub norm_b_f64: f64,
    pub norm_c_f64: f64,
    pub pass: bool,
}

pub fn block_norm_bounds(s: &SubdivisionMatrix) -> Result<BlockNormBounds, SpectralError> {
    let p = s.partition()?;
    let rows = s.exact_rows();
    let inf_norm = |ix: &[usize]| -> BigRational {
        let mut best: BigRational = Zero::zero();
        for &r in ix {
            let mut sum: BigRational = Zero::zero();
            for &c in ix {
                sum += rows[r].get(&c).map(|w| w.abs()).unwrap_or_else(Zero::zero);
            }
            if sum > best {
                best = sum;
            }
        }
        best
    };
    let norm_b = inf_norm(&p.b);
    let norm_c = inf_norm(&p.c);
    let pow = |base: u32| -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(base).pow(s.n as u32))
    };
    let pass = norm_b <= pow(2) && norm_c <= pow(4);
    let to_f64 = |r: &BigRational| -> f64 {
        let num: f64 = r.numer().to_string().parse().unwrap();
        let den: f64 = r.denom().to_string().parse().unwrap();
        num / den
    };
    Ok(BlockNormBounds {
        norm_b_f64: to_f64(&norm_b),
        norm_c_f64: to_f64(&norm_c),
        norm_b,
        norm_c,
        pass,
    })
}

/// One frequency block of the block-cyclic matrix.
pub struct FreqBlock {
    pub f: usize,
    /// Acts on segment-0 representatives; for f = 0 the first row/column is
    /// the primal center orbit when present.
    pub matrix: DMatrix<C64>,
    pub orbit_indices: Vec<usize>,
}

/// DFT similarity over the segment index: block f acts on frequency-f
/// rotationally symmetric nets.
pub fn frequency_blocks(s: &SubdivisionMatrix) -> Result<Vec<FreqBlock>, SpectralError> {
    let m = s.m;
    // orbit representatives: all segment-0 labels (plus the center)
    let mut reps = Vec::new();
    let mut center: Option<usize> = None;
    for (ix, &(l, i, jj)) in s.labels.iter().enumerate() {
        if s.kind == NetKind::Primal && (i, jj) == (0, 0) {
            center = Some(ix);
        } else if l == 0 {
            reps.push(ix);
        }
    }
    // index of the segment-l copy of a representative
    let seg_copy = |rep: usize, l: usize| -> Result<usize, SpectralError> {
        let (_, i, jj) = s.labels[rep];
        let net = Net::<f64>::zeros(s.kind, s.m, s.j);
        net.index_of(l, i, jj).ok_or(SpectralError::OrbitMismatch)
    };
    let mut blocks = Vec::new();
    for f in 0..m {
        let with_center = f == 0 && center.is_some();
        let k = reps.len() + usize::from(with_center);
        let mut mat = DMatrix::<C64>::zeros(k, k);
        let off = usize::from(with_center);
        let phase = |l: usize| -> C64 {
            C64::new(0.0, 2.0 * std::f64::consts::PI * (l * f) as f64 / m as f64).exp()
        };
        for (rr, &rrep) in reps.iter().enumerate() {
            for (cc, &crep) in reps.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for l in 0..m {
                    acc += C64::new(s.dense[(rrep, seg_copy(crep, l)?)], 0.0) * phase(l);
                }
                mat[(rr + off, cc + off)] = acc;
            }
        }
        if with_center {
            let cix = center.unwrap();
            mat[(0, 0)] = C64::new(s.dense[(cix, cix)], 0.0);
            for (cc, &crep) in reps.iter().enumerate() {
                let mut acc = 0.0;
                for l in 0..m {
                    acc += s.dense[(cix, seg_copy(crep, l)?)];
                }
                mat[(0, cc + 1)] = C64::new(acc, 0.0);
            }
            for (rr, &rrep) in reps.iter().enumerate() {
                mat[(rr + 1, 0)] = C64::new(s.dense[(rrep, cix)], 0.0);
            }
        }
        let mut orbit_indices = Vec::new();
        if with_center {
            orbit_indices.push(center.unwrap());
        }
        orbit_indices.extend(&reps);
        blocks.push(FreqBlock {
            f,
            matrix: mat,
            orbit_indices,
        });
    }
    Ok(blocks)
}

/// Eigenvalue moduli of one frequency block, descending.
pub fn block_moduli(block: &FreqBlock, m: usize) -> Vec<f64> {
    let is_real = block.f == 0 || 2 * block.f == m;
    if is_real {
        let k = block.matrix.nrows();
        let real = DMatrix::from_fn(k, k, |r, c| block.matrix[(r, c)].re);
        let mut v: Vec<f64> = eigen::real_eigenvalues(&real).iter().map(|z| z.norm()).collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    } else {
        eigen::moduli_of_block(&block.matrix)
    }
}

/// Largest-modulus eigenvalue of a frequency block with an eigenvector.
pub fn dominant_pair_per_frequency(block: &FreqBlock) -> Result<(C64, DVector<C64>), SpectralError> {
    Ok(eigen::dominant_eigenpair(&block.matrix)?)
}

#[derive(Debug, Clone, Copy)]
pub struct Multiplicity {
    pub algebraic: usize,
    pub geometric: usize,
    pub cluster_radius: f64,
}

/// Algebraic multiplicity by eigenvalue clustering, geometric by the numeric
/// null-space dimension of `S - lambda I`.
pub fn multiplicity(
    s: &SubdivisionMatrix,
    lambda: f64,
    tol: f64,
) -> Result<Multiplicity, SpectralError> {
    let eigs = eigen::real_eigenvalues(&s.dense);
    let radius = 1e-6 * lambda.abs().max(1.0);
    let inner = eigen::cluster_count(&eigs, C64::new(lambda, 0.0), radius);
    let fringe = eigen::cluster_count(&eigs, C64::new(lambda, 0.0), 2.0 * radius);
    if fringe != inner {
        return Err(SpectralError::IllConditioned { lambda, radius });
    }
    let geometric = eigen::real_nullity(&s.dense, lambda, tol);
    Ok(Multiplicity {
        algebraic: inner,
        geometric,
        cluster_radius: radius,
    })
}

/// Normalized power iteration toward the characteristic mesh.
pub fn characteristic_mesh(
    n: usize,
    m: usize,
    tol: f64,
    max_iter: usize,
) -> Result<(Net<C64>, f64, usize), SpectralError> {
    assert!(n >= 2, "characteristic mesh needs degree >= 2");
    let kind = NetKind::for_degree(n);
    let frame = FrameK::new(segment_angle(m, 1))?;
    let mut net = make_grid_mesh(m, 1, kind, rho(n) + 1)?;
    let (_, max0) = min_max_norm(&net, &frame);
    net = net.scale(C64::new(1.0 / max0, 0.0));
    let mut iterations = 0;
    loop {
        if iterations >= max_iter {
            return Err(SpectralError::NoConvergence(max_iter));
        }
        iterations += 1;
        // round-off injects components of other frequencies (notably the
        // dominant frequency-0 eigennet, which would take over); project
        // back onto the exactly symmetric frequency-1 nets each step
        let sub = crate::ringnet::symmetrize(&subdivide_ringnet(&net, n)?, 1);
        let (_, max) = min_max_norm(&sub, &frame);
        let next = sub.scale(C64::new(1.0 / max, 0.0));
        let diff = next.max_abs_diff(&net);
        net = next;
        if diff < tol {
            break;
        }
    }
    // lambda = MAX-norm of M applied to the normalized limit
    let sub = subdivide_ringnet(&net, n)?;
    let (_, lambda) = min_max_norm(&sub, &frame);
    // eigen residual in the infinity norm
    let residual = sub.max_abs_diff(&net.scale(C64::new(lambda, 0.0)));
    if residual >= 10.0 * tol {
        return Err(SpectralError::NoConvergence(iterations));
    }
    // strict positivity of H in frame K
    for p in crate::ringnet::half_segment(&net) {
        let (x, y) = frame.coords(p);
        if x <= 0.0 || y <= 0.0 {
            return Err(SpectralError::PositivityViolation);
        }
    }
    Ok((net, lambda, iterations))
}

#[derive(Debug, Clone)]
pub struct FrequencyReport {
    pub f: usize,
    pub eigenvalue_moduli: Vec<f64>,
    pub dominant: C64,
}

#[derive(Debug, Clone)]
pub struct PassFlags {
    pub stochastic: bool,
    pub dominant_simple: bool,
    pub subdominant_real_mult2: bool,
    pub frequency_attribution: bool,
    pub norm_bounds: bool,
    pub spectrum_union: bool,
}

impl PassFlags {
    pub fn all(&self) -> bool {
        self.stochastic
            && self.dominant_simple
            && self.subdominant_real_mult2
            && self.frequency_attribution
            && self.norm_bounds
            && self.spectrum_union
    }
}

#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub n: usize,
    pub m: usize,
    pub j: usize,
    pub frequencies: Vec<FrequencyReport>,
    pub lambda_sub: f64,
    pub mult_alg: usize,
    pub mult_geo: usize,
    pub norm_b: f64,
    pub norm_c: f64,
    pub norm_b_exact: String,
    pub norm_c_exact: String,
    pub pass: PassFlags,
    pub char_lambda: f64,
    pub char_iterations: usize,
}

/// Full spectral analysis over the rho-net.
pub fn spectral_report(n: usize, m: usize) -> Result<SpectralReport, SpectralError> {
    assert!(n >= 2 && m >= 3);
    let j = rho(n);
    let s = SubdivisionMatrix::assemble(n, m, j)?;

    // exact row sums
    let rows = s.exact_rows();
    let one: BigRational = One::one();
    let stochastic = rows.iter().all(|r| {
        let mut sum: BigRational = Zero::zero();
        let mut nonneg = true;
        for w in r.values() {
            nonneg &= !w.is_negative();
            sum += w;
        }
        nonneg && sum == one
    });

    let blocks = frequency_blocks(&s)?;
    let mut frequencies = Vec::new();
    for block in &blocks {
        let (dom, _) = dominant_pair_per_frequency(block)?;
        frequencies.push(FrequencyReport {
            f: block.f,
            eigenvalue_moduli: block_moduli(block, m),
            dominant: dom,
        });
    }

    // spectrum union check: blocks f and m-f are conjugate, so their joint
    // spectrum is the doubled spectrum of block f
    let mut union: Vec<f64> = Vec::new();
    for block in &blocks {
        if block.f == 0 || 2 * block.f == m {
            union.extend(block_moduli(block, m));
        } else if block.f < m - block.f {
            union.extend(
                eigen::spectrum_with_conjugate(&block.matrix)
                    .iter()
                    .map(|z| z.norm()),
            );
        }
    }
    let mut full: Vec<f64> = eigen::real_eigenvalues(&s.dense).iter().map(|z| z.norm()).collect();
    union.sort_by(|a, b| b.partial_cmp(a).unwrap());
    full.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let spectrum_union = union.len() == full.len()
        && union.iter().zip(&full).all(|(a, b)| (a - b).abs() < 1e-9);

    // dominant eigenvalue 1, simple
    let m1 = multiplicity(&s, 1.0, 1e-9)?;
    let dominant_simple = m1.algebraic == 1 && m1.geometric == 1;

    // subdominant = dominant of frequency 1
    let lam1 = frequencies[1].dominant;
    let lambda_sub = lam1.re;
    let sub_mult = multiplicity(&s, lambda_sub, 1e-9)?;
    let subdominant_real_mult2 = lam1.im.abs() < 1e-9
        && lambda_sub > 0.0
        && sub_mult.algebraic == 2
        && sub_mult.geometric == 2
        && frequencies
            .iter()
            .all(|fr| fr.f == 1 || fr.f == m - 1 || fr.f == 0 || fr.eigenvalue_moduli[0] < lambda_sub + 1e-9);

    // the two eigenvectors live in frequencies 1 and m-1
    let nullity_tol = 1e-9;
    let attr1 = eigen::block_nullity(&blocks[1].matrix, lambda_sub, nullity_tol);
    let attr2 = eigen::block_nullity(&blocks[m - 1].matrix, lambda_sub, nullity_tol);
    let frequency_attribution = attr1 >= 1 && attr2 >= 1;

    let bounds = block_norm_bounds(&s)?;
    let (char_net, char_lambda, char_iterations) = characteristic_mesh(n, m, 1e-11, 20000)?;
    let _ = char_net;

    let report = SpectralReport {
        n,
        m,
        j,
        frequencies,
        lambda_sub,
        mult_alg: sub_mult.algebraic,
        mult_geo: sub_mult.geometric,
        norm_b: bounds.norm_b_f64,
        norm_c: bounds.norm_c_f64,
        norm_b_exact: crate::scalar::rational_string(&bounds.norm_b),
        norm_c_exact: crate::scalar::rational_string(&bounds.norm_c),
        pass: PassFlags {
            stochastic,
            dominant_simple,
            subdominant_real_mult2,
            frequency_attribution,
            norm_bounds: bounds.pass,
            spectrum_union,
        },
        char_lambda,
        char_iterations,
    };
    Ok(report)
}
