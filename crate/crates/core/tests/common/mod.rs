#![allow(dead_code)]

use modval::tensor::{tensor_kets, HilbertShape, Ket, Operator};
use modval::{PrePostEnsemble, C64};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed normalized ket.
pub fn random_ket(rng: &mut impl Rng, shape: &HilbertShape) -> Ket {
    let amps = (0..shape.total_dim()).map(|_| gaussian(rng)).collect();
    Ket::new(shape.clone(), amps).unwrap().normalized().unwrap()
}

/// Product of independent random single-factor kets.
pub fn random_product_ket(rng: &mut impl Rng, shape: &HilbertShape) -> Ket {
    let parts: Vec<Ket> = shape
        .dims()
        .iter()
        .map(|&d| random_ket(rng, &HilbertShape::new(vec![d]).unwrap()))
        .collect();
    tensor_kets(&parts).unwrap()
}

/// Random ensemble whose overlap clears `min_overlap`.
pub fn random_ensemble(rng: &mut impl Rng, shape: &HilbertShape, min_overlap: f64) -> PrePostEnsemble {
    loop {
        let (psi, phi) = (random_ket(rng, shape), random_ket(rng, shape));
        if let Ok(e) = PrePostEnsemble::with_options(psi, phi, true, min_overlap) {
            return e;
        }
    }
}

pub fn random_product_ensemble(rng: &mut impl Rng, shape: &HilbertShape, min_overlap: f64) -> PrePostEnsemble {
    loop {
        let (psi, phi) = (random_product_ket(rng, shape), random_product_ket(rng, shape));
        if let Ok(e) = PrePostEnsemble::with_options(psi, phi, true, min_overlap) {
            return e;
        }
    }
}

/// Haar unitary from the QR decomposition of a complex Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> DMatrix<C64> {
    let z = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// `V diag(eigs) V^dagger` for a Haar-random `V`, flagged Hermitian.
pub fn hermitian_with_eigs(rng: &mut impl Rng, shape: &HilbertShape, eigs: &[f64]) -> Operator {
    let n = shape.total_dim();
    assert_eq!(n, eigs.len());
    let v = random_unitary(rng, n);
    let d = DMatrix::from_fn(n, n, |i, j| if i == j { C64::new(eigs[i], 0.0) } else { C64::new(0.0, 0.0) });
    let m = &v * d * v.adjoint();
    let sym = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    Operator::hermitian(shape.clone(), sym).unwrap()
}

/// Eigenvalues uniform in `[-spread, spread]` with every gap above `min_gap`.
pub fn spread_eigs(rng: &mut impl Rng, n: usize, spread: f64, min_gap: f64) -> Vec<f64> {
    loop {
        let mut eigs: Vec<f64> = (0..n).map(|_| rng.random_range(-spread..spread)).collect();
        eigs.sort_by(f64::total_cmp);
        if eigs.windows(2).all(|w| w[1] - w[0] > min_gap) {
            return eigs;
        }
    }
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian(rng: &mut impl Rng, shape: &HilbertShape) -> Operator {
    let n = shape.total_dim();
    let z = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let h = (&z + z.adjoint()) * C64::new(0.5, 0.0);
    Operator::hermitian(shape.clone(), h).unwrap()
}

pub fn cdiff(a: C64, b: C64) -> f64 {
    (a - b).norm()
}
