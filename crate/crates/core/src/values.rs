//! Weak values, modular values and the operator exponential `e^{-igA}`.
//!
//! Sign convention: the coupling unitary is always `U = e^{-igA}`. Special
//! cases with the opposite phase are expressed by passing a negative `g`.
//!
//! For an observable with exactly two distinct eigenvalues `l1 != l2` the
//! exponential collapses to `e^{-igA} = aA + bI` with
//!
//! ```text
//! a = (e^{-ig l1} - e^{-ig l2}) / (l1 - l2)
//! b = -(l2 e^{-ig l1} - l1 e^{-ig l2}) / (l1 - l2)
//! ```
//!
//! so the modular value is the affine image `a <A>_w + b` of the weak value
//! and can be inverted whenever `a != 0`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{inner, HilbertShape, Ket, Operator, EIGENVALUE_TOL};

/// Minimum `|<phi|psi>|` accepted for an ensemble.
pub const EPS_OVERLAP: f64 = 1e-10;
/// Minimum separation between eigenvalues treated as distinct.
pub const EPS_DEGEN: f64 = 1e-8;
/// Minimum `|a|` for the modular -> weak conversion.
pub const EPS_A: f64 = 1e-10;

/// Per-call overrides for the numerical thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub overlap: f64,
    pub degen: f64,
    pub coeff: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            overlap: EPS_OVERLAP,
            degen: EPS_DEGEN,
            coeff: EPS_A,
        }
    }
}

/// Pre-selected `psi`, post-selected `phi`, and the cached overlap `<phi|psi>`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrePostEnsemble {
    psi: Ket,
    phi: Ket,
    overlap: C64,
}

impl PrePostEnsemble {
    /// Normalizes both kets and rejects `|<phi|psi>| <= EPS_OVERLAP`.
    pub fn new(psi: Ket, phi: Ket) -> Result<Self> {
        Self::with_options(psi, phi, true, EPS_OVERLAP)
    }

    pub fn with_options(psi: Ket, phi: Ket, normalize: bool, eps_overlap: f64) -> Result<Self> {
        let (psi, phi) = if normalize {
            (psi.normalized()?, phi.normalized()?)
        } else {
            (psi, phi)
        };
        let overlap = inner(&phi, &psi)?;
        if !(overlap.norm() > eps_overlap) {
            return Err(Error::OrthogonalPostSelection {
                overlap: overlap.norm(),
                threshold: eps_overlap,
            });
        }
        Ok(Self { psi, phi, overlap })
    }

    pub fn psi(&self) -> &Ket {
        &self.psi
    }

    pub fn phi(&self) -> &Ket {
        &self.phi
    }

    /// `<phi|psi>`
    pub fn overlap(&self) -> C64 {
        self.overlap
    }

    pub fn shape(&self) -> &HilbertShape {
        self.psi.shape()
    }

    /// `<phi|op|psi> / <phi|psi>`
    pub fn conditioned(&self, op: &Operator) -> Result<C64> {
        Ok(op.sandwich(&self.phi, &self.psi)? / self.overlap)
    }
}

/// Coupling constant `g` of `e^{-igA}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Coupling(f64);

impl Coupling {
    pub fn new(g: f64) -> Result<Self> {
        if g.is_finite() {
            Ok(Self(g))
        } else {
            Err(Error::NonFiniteCoupling(g))
        }
    }

    /// Controlled-rotation angle `theta` realizes `g = theta / 2`.
    pub fn from_theta(theta: f64) -> Result<Self> {
        Self::new(theta / 2.0)
    }

    pub fn g(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Coupling {
    type Error = Error;

    fn try_from(g: f64) -> Result<Self> {
        Self::new(g)
    }
}

impl From<Coupling> for f64 {
    fn from(c: Coupling) -> f64 {
        c.0
    }
}

/// Coefficients of `e^{-igA} = aA + bI` for a two-level spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelCoeffs {
    #[serde(with = "crate::json::complex")]
    pub a: C64,
    #[serde(with = "crate::json::complex")]
    pub b: C64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub g: f64,
}

/// `<A>_w = <phi|A|psi> / <phi|psi>`.
pub fn weak_value(op: &Operator, e: &PrePostEnsemble) -> Result<C64> {
    e.conditioned(op)
}

/// `V e^{-ig Lambda} V^dagger` from a Hermitian eigendecomposition.
pub fn exp_spectral(op: &Operator, c: Coupling) -> Result<Operator> {
    let spec = op.eigh()?;
    let g = c.g();
    let phases: Vec<C64> = spec.values.iter().map(|&l| C64::cis(-g * l)).collect();
    let v = &spec.vectors;
    let mut scaled = v.clone();
    for (mut col, ph) in scaled.column_iter_mut().zip(&phases) {
        col *= *ph;
    }
    Operator::new(op.shape().clone(), scaled * v.adjoint())
}

/// `e^{-igA}` as the Lagrange interpolation polynomial through the `n`
/// distinct eigenvalues `eigs` of the `n x n` matrix `A`.
pub fn exp_lagrange(op: &Operator, eigs: &[f64], c: Coupling) -> Result<Operator> {
    exp_lagrange_with_tol(op, eigs, c, EPS_DEGEN)
}

pub fn exp_lagrange_with_tol(
    op: &Operator,
    eigs: &[f64],
    c: Coupling,
    eps_degen: f64,
) -> Result<Operator> {
    let n = op.dim();
    if eigs.len() != n {
        return Err(Error::EigenvalueCount {
            expected: n,
            found: eigs.len(),
        });
    }
    let min_gap = min_pairwise_gap(eigs);
    if !(min_gap > eps_degen) {
        return Err(Error::DegenerateSpectrum {
            gap: min_gap,
            threshold: eps_degen,
        });
    }
    let a = op.matrix();
    let id = DMatrix::<C64>::identity(n, n);
    let g = c.g();
    let mut total = DMatrix::<C64>::zeros(n, n);
    for (k, &lk) in eigs.iter().enumerate() {
        let mut basis = id.clone();
        for (l, &ll) in eigs.iter().enumerate() {
            if l == k {
                continue;
            }
            let factor = (a - &id * C64::from(ll)) / C64::from(lk - ll);
            basis *= factor;
        }
        total += basis * C64::cis(-g * lk);
    }
    Operator::new(op.shape().clone(), total)
}

/// [`exp_lagrange`] with the eigenvalues computed from a Hermitian input.
pub fn exp_lagrange_hermitian(op: &Operator, c: Coupling) -> Result<Operator> {
    let spec = op.eigh()?;
    exp_lagrange(op, &spec.values, c)
}

fn min_pairwise_gap(xs: &[f64]) -> f64 {
    let mut gap = f64::INFINITY;
    for (i, a) in xs.iter().enumerate() {
        for b in &xs[i + 1..] {
            gap = gap.min((a - b).abs());
        }
    }
    gap
}

pub fn two_level_coeffs(lambda1: f64, lambda2: f64, c: Coupling) -> Result<TwoLevelCoeffs> {
    two_level_coeffs_with_tol(lambda1, lambda2, c, EPS_DEGEN)
}

pub fn two_level_coeffs_with_tol(
    lambda1: f64,
    lambda2: f64,
    c: Coupling,
    eps_degen: f64,
) -> Result<TwoLevelCoeffs> {
    let gap = (lambda1 - lambda2).abs();
    if !(gap > eps_degen) {
        return Err(Error::DegenerateSpectrum {
            gap,
            threshold: eps_degen,
        });
    }
    let g = c.g();
    let e1 = C64::cis(-g * lambda1);
    let e2 = C64::cis(-g * lambda2);
    let d = lambda1 - lambda2;
    Ok(TwoLevelCoeffs {
        a: (e1 - e2) / d,
        b: -(e1 * lambda2 - e2 * lambda1) / d,
        lambda1,
        lambda2,
        g,
    })
}

/// `(A)_mod = <phi|e^{-igA}|psi> / <phi|psi>`.
///
/// Without `eigs` the exponential comes from the spectral decomposition.
/// With `eigs = Some((l1, l2))` the closed form `a <A>_w + b` is used; this
/// requires `(A - l1)(A - l2) = 0`, i.e. `A` has exactly that spectrum,
/// which also covers two-level observables embedded in a larger space.
pub fn modular_value(
    op: &Operator,
    eigs: Option<(f64, f64)>,
    c: Coupling,
    e: &PrePostEnsemble,
) -> Result<C64> {
    match eigs {
        None => e.conditioned(&exp_spectral(op, c)?),
        Some((l1, l2)) => {
            if op.shape() != e.shape() {
                return Err(Error::ShapeMismatch {
                    left: op.shape().dims().to_vec(),
                    right: e.shape().dims().to_vec(),
                });
            }
            check_two_level_spectrum(op, l1, l2)?;
            let coeffs = two_level_coeffs(l1, l2, c)?;
            Ok(modular_from_weak(weak_value(op, e)?, &coeffs))
        }
    }
}

fn check_two_level_spectrum(op: &Operator, l1: f64, l2: f64) -> Result<()> {
    let n = op.dim();
    let id = DMatrix::<C64>::identity(n, n);
    let a = op.matrix();
    let prod = (a - &id * C64::from(l1)) * (a - &id * C64::from(l2));
    let residual = prod.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = 1.0 + l1.abs().max(l2.abs());
    if residual > EIGENVALUE_TOL * scale * scale {
        return Err(Error::EigenvalueMismatch {
            lambda1: l1,
            lambda2: l2,
            residual,
        });
    }
    Ok(())
}

/// `(A)_mod = a <A>_w + b`.
pub fn modular_from_weak(weak: C64, coeffs: &TwoLevelCoeffs) -> C64 {
    coeffs.a * weak + coeffs.b
}

/// `<A>_w = ((A)_mod - b) / a`, undefined when `|a| <= EPS_A`.
pub fn weak_from_modular(modular: C64, coeffs: &TwoLevelCoeffs) -> Result<C64> {
    weak_from_modular_with_tol(modular, coeffs, EPS_A)
}

pub fn weak_from_modular_with_tol(modular: C64, coeffs: &TwoLevelCoeffs, eps_a: f64) -> Result<C64> {
    let modulus = coeffs.a.norm();
    if !(modulus > eps_a) {
        return Err(Error::VanishingCoefficient {
            modulus,
            threshold: eps_a,
        });
    }
    Ok((modular - coeffs.b) / coeffs.a)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    use super::*;
    use crate::gates::{self, c};
    use crate::scenario;
    use crate::tensor::{embed, HilbertShape, SiteObservable};

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn g(x: f64) -> Coupling {
        Coupling::new(x).unwrap()
    }

    fn epr() -> PrePostEnsemble {
        let (psi, phi) = scenario::epr_states();
        PrePostEnsemble::new(psi, phi).unwrap()
    }

    fn x_on_site0() -> Operator {
        embed(
            &SiteObservable::new(0, gates::sigma_x()).unwrap(),
            &HilbertShape::qubits(2).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn ensemble_rejects_orthogonal_states() {
        let err = PrePostEnsemble::new(gates::ket0(), gates::ket1()).unwrap_err();
        assert!(matches!(err, Error::OrthogonalPostSelection { .. }));
        // a custom threshold lets near-orthogonal post-selection through
        let phi = Ket::qubit(c(1e-6, 0.), c(1., 0.));
        assert!(PrePostEnsemble::new(gates::ket0(), phi.clone()).is_ok());
        assert!(PrePostEnsemble::with_options(gates::ket0(), phi, true, 1e-3).is_err());
    }

    #[test]
    fn ensemble_normalizes_by_default() {
        let e = PrePostEnsemble::new(gates::ket0().scale(c(3., 0.)), gates::ket_plus_x()).unwrap();
        assert!(e.psi().is_normalized());
        let raw = PrePostEnsemble::with_options(
            gates::ket0().scale(c(3., 0.)),
            gates::ket_plus_x(),
            false,
            EPS_OVERLAP,
        )
        .unwrap();
        // ratios are scale-invariant
        let w1 = weak_value(&gates::sigma_x(), &e).unwrap();
        let w2 = weak_value(&gates::sigma_x(), &raw).unwrap();
        assert!(close(w1, w2, 1e-15));
    }

    #[test]
    fn coupling_must_be_finite() {
        assert!(Coupling::new(f64::NAN).is_err());
        assert!(Coupling::new(f64::INFINITY).is_err());
        assert_eq!(Coupling::from_theta(PI).unwrap().g(), FRAC_PI_2);
    }

    #[test]
    fn weak_value_examples() {
        assert!(close(weak_value(&x_on_site0(), &epr()).unwrap(), c(-1., 0.), 1e-12));

        let e = PrePostEnsemble::new(gates::ket_plus_y(), gates::ket_plus_y()).unwrap();
        assert!(close(weak_value(&gates::sigma_y(), &e).unwrap(), c(1., 0.), 1e-15));

        let (psi, phi) = scenario::crz_states();
        let e = PrePostEnsemble::new(psi, phi).unwrap();
        let w = weak_value(&gates::sigma_z(), &e).unwrap();
        assert!(close(w, c(1. + SQRT_2, 0.), 1e-12), "{w}");
        assert!((w.re - 2.414213562).abs() < 1e-9);
    }

    #[test]
    fn weak_value_shape_mismatch() {
        let e = PrePostEnsemble::new(gates::ket0(), gates::ket0()).unwrap();
        assert!(matches!(
            weak_value(&x_on_site0(), &e),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn exp_spectral_examples() {
        let u = exp_spectral(&gates::sigma_z(), g(0.37)).unwrap();
        assert!(close(u.matrix()[(0, 0)], C64::cis(-0.37), 1e-15));
        assert!(close(u.matrix()[(1, 1)], C64::cis(0.37), 1e-15));
        assert!(u.matrix()[(0, 1)].norm() < 1e-15);

        let i = exp_spectral(&x_on_site0(), g(0.0)).unwrap();
        assert!(i.max_abs_diff(&Operator::identity(HilbertShape::qubits(2).unwrap())) < 1e-15);

        let u = exp_spectral(&gates::sigma_x(), g(FRAC_PI_2)).unwrap();
        let expected = gates::sigma_x().scale(c(0., -1.));
        assert!(u.max_abs_diff(&expected) < 1e-15);

        let not_herm = Operator::new(gates::sigma_x().shape().clone(), gates::rz(0.3).matrix().clone()).unwrap();
        assert!(matches!(
            exp_spectral(&not_herm, g(1.0)),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn exp_lagrange_closed_forms() {
        for &gv in &[-2.1, -0.3, 0.0, 0.8, 3.0] {
            let u = exp_lagrange(&gates::sigma_x(), &[1.0, -1.0], g(gv)).unwrap();
            let expected = gates::identity2()
                .scale(c(gv.cos(), 0.))
                .add(&gates::sigma_x().scale(c(0., -gv.sin())))
                .unwrap();
            assert!(u.max_abs_diff(&expected) < 1e-15);

            let u = exp_lagrange(&gates::proj1(), &[1.0, 0.0], g(gv)).unwrap();
            let expected = gates::identity2()
                .add(&gates::proj1().scale(C64::cis(-gv) - 1.0))
                .unwrap();
            assert!(u.max_abs_diff(&expected) < 1e-15);
        }
        let big = x_on_site0().add(&embed(
            &SiteObservable::new(1, gates::sigma_z().scale(c(0.5, 0.))).unwrap(),
            &HilbertShape::qubits(2).unwrap(),
        ).unwrap()).unwrap();
        let u = exp_lagrange(&big, &[-1.5, -0.5, 0.5, 1.5], g(0.0)).unwrap();
        assert!(u.max_abs_diff(&Operator::identity(HilbertShape::qubits(2).unwrap())) < 1e-14);
    }

    #[test]
    fn exp_lagrange_rejects_bad_spectra() {
        assert!(matches!(
            exp_lagrange(&gates::sigma_x(), &[1.0, 1.0 + 1e-9], g(1.0)),
            Err(Error::DegenerateSpectrum { .. })
        ));
        assert!(matches!(
            exp_lagrange(&gates::sigma_x(), &[1.0], g(1.0)),
            Err(Error::EigenvalueCount { expected: 2, found: 1 })
        ));
        // sigma_x (x) I has only two distinct eigenvalues on a 4x4 matrix
        assert!(exp_lagrange_hermitian(&x_on_site0(), g(1.0)).is_err());
    }

    #[test]
    fn coefficient_examples() {
        let k = two_level_coeffs(1.0, -1.0, g(-FRAC_PI_2)).unwrap();
        assert!(close(k.a, c(0., 1.), 1e-15) && close(k.b, c(0., 0.), 1e-15));

        let k = two_level_coeffs(1.0, 0.0, g(-FRAC_PI_2)).unwrap();
        assert!(close(k.a, C64::cis(FRAC_PI_2) - 1.0, 1e-15));
        assert!(close(k.a, c(-1., 1.), 1e-15));
        assert!(close(k.b, c(1., 0.), 1e-15));

        let k = two_level_coeffs(2.5, -0.7, g(0.0)).unwrap();
        assert_eq!((k.a, k.b), (c(0., 0.), c(1., 0.)));

        assert!(matches!(
            two_level_coeffs(1.0, 1.0, g(1.0)),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn coefficients_match_lagrange_exponential() {
        let k = two_level_coeffs(1.0, 0.0, g(0.9)).unwrap();
        let via_coeffs = gates::proj1()
            .scale(k.a)
            .add(&gates::identity2().scale(k.b))
            .unwrap();
        let u = exp_spectral(&gates::proj1(), g(0.9)).unwrap();
        assert!(u.max_abs_diff(&via_coeffs) < 1e-15);
    }

    #[test]
    fn modular_value_examples() {
        let e = epr();
        let x = x_on_site0();
        for &gv in &[-1.0, 0.0, 0.4, 2.0] {
            let expected = c(f64::cos(gv), f64::sin(gv));
            let direct = modular_value(&x, None, g(gv), &e).unwrap();
            let closed = modular_value(&x, Some((1.0, -1.0)), g(gv), &e).unwrap();
            assert!(close(direct, expected, 1e-12), "{direct}");
            assert!(close(closed, expected, 1e-12));
        }

        let e = PrePostEnsemble::new(gates::ket1(), gates::ket1()).unwrap();
        let m = modular_value(&gates::sigma_z(), None, g(0.6), &e).unwrap();
        assert!(close(m, C64::cis(0.6), 1e-15));

        let (psi, phi) = scenario::hardy_states();
        let e = PrePostEnsemble::new(psi, phi).unwrap();
        let p = embed(
            &SiteObservable::new(0, gates::proj0()).unwrap(),
            &HilbertShape::qubits(2).unwrap(),
        )
        .unwrap();
        let m = modular_value(&p, None, g(0.7), &e).unwrap();
        assert!(close(m, C64::cis(-0.7), 1e-12));
    }

    #[test]
    fn closed_form_rejects_wrong_spectrum() {
        let e = epr();
        assert!(matches!(
            modular_value(&x_on_site0(), Some((1.0, 0.0)), g(0.3), &e),
            Err(Error::EigenvalueMismatch { .. })
        ));
    }

    #[test]
    fn conversion_examples() {
        for &gv in &[-1.3, 0.2, 1.1] {
            let k = two_level_coeffs(1.0, -1.0, g(gv)).unwrap();
            let m = modular_from_weak(c(-1., 0.), &k);
            assert!(close(m, c(gv.cos(), gv.sin()), 1e-15));
        }
        let k0 = two_level_coeffs(1.0, -1.0, g(0.0)).unwrap();
        assert_eq!(modular_from_weak(c(12.0, -3.0), &k0), c(1., 0.));

        let theta: f64 = 1.3;
        let k = two_level_coeffs(1.0, -1.0, g(theta / 2.0)).unwrap();
        let w = c(1.0 + SQRT_2, 0.);
        let m = modular_from_weak(w, &k);
        let h = theta / 2.0;
        assert!(close(m, c(h.cos(), -(1.0 + SQRT_2) * h.sin()), 1e-15));
        assert!((m.norm() - (h.cos().powi(2) + (1.0 + SQRT_2).powi(2) * h.sin().powi(2)).sqrt()).abs() < 1e-15);

        let k = two_level_coeffs(1.0, -1.0, g(-FRAC_PI_2)).unwrap();
        let w = c(0.3, -2.0);
        let back = weak_from_modular(c(0., 1.) * w, &k).unwrap();
        assert!(close(back, w, 1e-15));

        let k = two_level_coeffs(1.0, -1.0, g(PI)).unwrap();
        assert!(k.a.norm() < 1e-15);
        assert!(matches!(
            weak_from_modular(c(1., 0.), &k),
            Err(Error::VanishingCoefficient { .. })
        ));
    }

    #[test]
    fn small_coupling_limit_is_second_order() {
        let (psi, phi) = scenario::crz_states();
        let e = PrePostEnsemble::new(psi, phi).unwrap();
        let a = gates::sigma_z();
        let w = weak_value(&a, &e).unwrap();
        let a2 = weak_value(&a.matmul(&a).unwrap(), &e).unwrap();
        let slope = |h: f64| {
            let m = modular_value(&a, None, g(h), &e).unwrap();
            (C64::from(1.0) - m) / c(0., h)
        };
        for &h in &[1e-4, 1e-5] {
            let m = modular_value(&a, None, g(h), &e).unwrap();
            let resid = (m - (C64::from(1.0) - c(0., h) * w)).norm();
            assert!(resid <= 0.5 * a2.norm() * h * h * 1.01 + 1e-14, "{h}: {resid}");
        }
        // Richardson extrapolation removes the O(h) term of the slope estimate
        let (h1, h2) = (1e-4, 1e-5);
        let rich = (slope(h2) * h1 - slope(h1) * h2) / (h1 - h2);
        assert!(close(rich, w, 1e-8), "{rich} vs {w}");
    }
}
