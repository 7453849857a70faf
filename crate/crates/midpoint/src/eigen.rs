//! Dense eigenvalue helpers.
//!
//! Real matrices go through the real Schur decomposition. A complex matrix
//! `B = X + iY` is embedded as the real matrix `[[X, -Y], [Y, X]]`, whose
//! spectrum is the multiset union of the spectra of `B` and of `conj(B)`;
//! all uses below only need that union (the frequency blocks `f` and `m-f`
//! of a real block-cyclic matrix are conjugates) or the null-space dimension
//! at a real shift, which the embedding doubles exactly.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;

#[derive(Debug, thiserror::Error)]
pub enum EigenError {
    #[error("eigen iteration failed to converge after {0} steps")]
    ConvergenceFailure(usize),
}

/// Eigenvalues of a real matrix.
///
/// The QR iteration can stall on the highly degenerate spectra that arise
/// here (large nilpotent blocks), so the iteration count is bounded and on
/// failure the matrix is retried under a random orthogonal similarity,
/// which leaves the spectrum unchanged but breaks the degeneracy. If the
/// retries also stall the convergence tolerance is relaxed in steps; the
/// loosest step is still two orders below every decision tolerance used on
/// the resulting eigenvalues.
pub fn real_eigenvalues(a: &DMatrix<f64>) -> Vec<C64> {
    let k = a.nrows();
    let max_iter = 100 * k.max(10);
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    for eps in [1e-13, 1e-12, 1e-11, 1e-9] {
        if let Some(schur) = nalgebra::linalg::Schur::try_new(a.clone(), eps, max_iter) {
            return schur.complex_eigenvalues().iter().copied().collect();
        }
        for _ in 0..4 {
            let g = DMatrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..1.0));
            let q = g.qr().q();
            let sim = q.transpose() * a * &q;
            if let Some(schur) = nalgebra::linalg::Schur::try_new(sim, eps, max_iter) {
                return schur.complex_eigenvalues().iter().copied().collect();
            }
        }
    }
    panic!("eigenvalue computation failed to converge for a {k}x{k} matrix");
}

/// `[[X, -Y], [Y, X]]` for `B = X + iY`.
pub fn doubled_real(b: &DMatrix<C64>) -> DMatrix<f64> {
    let k = b.nrows();
    let mut d = DMatrix::<f64>::zeros(2 * k, 2 * k);
    for r in 0..k {
        for c in 0..k {
            let z = b[(r, c)];
            d[(r, c)] = z.re;
            d[(r, c + k)] = -z.im;
            d[(r + k, c)] = z.im;
            d[(r + k, c + k)] = z.re;
        }
    }
    d
}

/// Multiset union of the spectra of `B` and `conj(B)` (2k values).
pub fn spectrum_with_conjugate(b: &DMatrix<C64>) -> Vec<C64> {
    real_eigenvalues(&doubled_real(b))
}

/// Eigenvalue moduli of `B` itself, descending. The doubled spectrum is
/// conjugation-closed and the moduli of `B` and `conj(B)` agree, so halving
/// the sorted list of moduli pairs recovers them exactly.
pub fn moduli_of_block(b: &DMatrix<C64>) -> Vec<f64> {
    let mut all: Vec<f64> = spectrum_with_conjugate(b).iter().map(|z| z.norm()).collect();
    all.sort_by(|a, b| b.partial_cmp(a).unwrap());
    all.into_iter().step_by(2).collect()
}

/// Dominant eigenpair of a complex matrix by shifted inverse iteration,
/// with the shift placed just outside the dominant modulus from the doubled
/// spectrum and refined by Rayleigh quotients.
pub fn dominant_eigenpair(b: &DMatrix<C64>) -> Result<(C64, DVector<C64>), EigenError> {
    let k = b.nrows();
    assert!(k > 0);
    if k == 1 {
        return Ok((b[(0, 0)], DVector::from_element(1, C64::new(1.0, 0.0))));
    }
    let spectrum = spectrum_with_conjugate(b);
    // the dominant eigenvalue of B has the same modulus as that of conj(B);
    // try both conjugate representatives and keep the better residual
    let top = spectrum
        .iter()
        .cloned()
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
        .unwrap();
    let scale = b.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1.0);
    let mut best: Option<(C64, DVector<C64>, f64)> = None;
    for cand in [top, top.conj()] {
        if let Some((lam, v, res)) = inverse_iteration(b, cand, scale) {
            if best.as_ref().map_or(true, |(_, _, r)| res < *r) {
                best = Some((lam, v, res));
            }
        }
    }
    match best {
        Some((lam, v, res)) if res < 1e-8 * scale => Ok((lam, v)),
        _ => Err(EigenError::ConvergenceFailure(200)),
    }
}

fn inverse_iteration(
    b: &DMatrix<C64>,
    target: C64,
    scale: f64,
) -> Option<(C64, DVector<C64>, f64)> {
    let k = b.nrows();
    let mut shift = target + C64::new(1e-8 * scale, 1e-9 * scale);
    let mut v = DVector::from_fn(k, |i, _| {
        C64::new(1.0 + (i as f64 * 0.7).sin() * 0.3, (i as f64 * 1.3).cos() * 0.2)
    });
    v /= C64::new(v.norm(), 0.0);
    let mut lam = target;
    for step in 0..200 {
        let shifted = b - DMatrix::<C64>::identity(k, k) * shift;
        let lu = shifted.lu();
        let next = match lu.solve(&v) {
            Some(x) if x.norm().is_finite() && x.norm() > 0.0 => x,
            _ => {
                shift += C64::new(1e-7 * scale, 1e-8 * scale);
                continue;
            }
        };
        v = &next / C64::new(next.norm(), 0.0);
        let bv = b * &v;
        lam = v.dotc(&bv);
        let res = (&bv - &v * lam).norm();
        if res < 1e-12 * scale {
            return Some((lam, v, res));
        }
        if step % 8 == 7 {
            shift = lam + C64::new(1e-10 * scale, 1e-11 * scale);
        }
    }
    let bv = b * &v;
    let res = (&bv - &v * lam).norm();
    Some((lam, v, res))
}

/// Dimension of the numeric null space of the real matrix `A - lambda I`.
pub fn real_nullity(a: &DMatrix<f64>, lambda: f64, tol: f64) -> usize {
    let k = a.nrows();
    let shifted = a - DMatrix::<f64>::identity(k, k) * lambda;
    let sv = shifted.svd(false, false).singular_values;
    let norm = a.iter().map(|x| x.abs()).fold(0.0f64, f64::max).max(1.0);
    sv.iter().filter(|&&s| s < tol * norm).count()
}

/// Null-space dimension of `B - lambda I` for a complex block at a real
/// shift, via the doubled real embedding (which doubles the nullity).
pub fn block_nullity(b: &DMatrix<C64>, lambda: f64, tol: f64) -> usize {
    let d = doubled_real(b);
    let nd = real_nullity(&d, lambda, tol);
    debug_assert!(nd % 2 == 0);
    nd / 2
}

/// Count of eigenvalues within `radius` of `lambda` in the complex plane.
pub fn cluster_count(eigs: &[C64], lambda: C64, radius: f64) -> usize {
    eigs.iter().filter(|z| (*z - lambda).norm() <= radius).count()
}
