//! Dense complex linear algebra over small tensor-product Hilbert spaces.
//!
//! Basis order is row-major over factors: for dims `(2, 2)` the basis is
//! `|00>, |01>, |10>, |11>`, i.e. the first factor is the most significant
//! digit. Every golden vector in the crate depends on this ordering.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported total dimension (12 qubits).
pub const MAX_TOTAL_DIM: usize = 4096;
/// Entrywise tolerance for the Hermitian check.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Norm tolerance for a ket to count as normalized.
pub const NORM_TOL: f64 = 1e-12;

/// Ordered factor dimensions of a tensor-product space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct HilbertShape {
    dims: Vec<usize>,
    total: usize,
}

impl HilbertShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidDimensions { dims });
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = match total.checked_mul(d) {
                Some(t) if t <= MAX_TOTAL_DIM => t,
                _ => {
                    return Err(Error::DimensionCap {
                        total: total.saturating_mul(d),
                        cap: MAX_TOTAL_DIM,
                    })
                }
            };
        }
        Ok(Self { dims, total })
    }

    /// `n` qubit factors.
    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn num_factors(&self) -> usize {
        self.dims.len()
    }

    /// Shape of `self` followed by `other`.
    pub fn concat(&self, other: &HilbertShape) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new(dims)
    }

    /// Single-factor shape of the factor at `site`.
    pub fn factor(&self, site: usize) -> Result<Self> {
        let d = *self.dims.get(site).ok_or(Error::SiteOutOfRange {
            site,
            factors: self.dims.len(),
        })?;
        Self::new(vec![d])
    }

    fn ensure_same(&self, other: &HilbertShape) -> Result<()> {
        if self.dims == other.dims {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                left: self.dims.clone(),
                right: other.dims.clone(),
            })
        }
    }
}

impl TryFrom<Vec<usize>> for HilbertShape {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<HilbertShape> for Vec<usize> {
    fn from(shape: HilbertShape) -> Self {
        shape.dims
    }
}

/// State vector over a [`HilbertShape`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KetJson", into = "KetJson")]
pub struct Ket {
    shape: HilbertShape,
    amps: DVector<C64>,
}

impl Ket {
    pub fn new(shape: HilbertShape, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != shape.total_dim() {
            return Err(Error::LengthMismatch {
                expected: shape.total_dim(),
                found: amplitudes.len(),
            });
        }
        Ok(Self {
            shape,
            amps: DVector::from_vec(amplitudes),
        })
    }

    /// Computational basis state `index`.
    pub fn basis(shape: HilbertShape, index: usize) -> Result<Self> {
        let n = shape.total_dim();
        if index >= n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: index + 1,
            });
        }
        let mut amps = DVector::zeros(n);
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { shape, amps })
    }

    /// Single qubit `alpha|0> + beta|1>`.
    pub fn qubit(alpha: C64, beta: C64) -> Self {
        Self {
            shape: HilbertShape::qubits(1).expect("one qubit"),
            amps: DVector::from_vec(vec![alpha, beta]),
        }
    }

    pub(crate) fn from_vector(shape: HilbertShape, amps: DVector<C64>) -> Self {
        debug_assert_eq!(amps.len(), shape.total_dim());
        Self { shape, amps }
    }

    pub fn shape(&self) -> &HilbertShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.amps.as_slice()
    }

    pub(crate) fn vector(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            shape: self.shape.clone(),
            amps: &self.amps * z,
        }
    }

    pub fn add(&self, other: &Ket) -> Result<Self> {
        self.shape.ensure_same(&other.shape)?;
        Ok(Self {
            shape: self.shape.clone(),
            amps: &self.amps + &other.amps,
        })
    }

    pub fn sub(&self, other: &Ket) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Largest entrywise distance to `other`; infinite when shapes differ.
    pub fn max_abs_diff(&self, other: &Ket) -> f64 {
        if self.shape != other.shape {
            return f64::INFINITY;
        }
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Dense operator with an asserted-and-checked Hermitian flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorJson", into = "OperatorJson")]
pub struct Operator {
    shape: HilbertShape,
    mat: DMatrix<C64>,
    hermitian: bool,
}

impl Operator {
    /// General (not flagged Hermitian) operator.
    pub fn new(shape: HilbertShape, matrix: DMatrix<C64>) -> Result<Self> {
        let n = shape.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                found: matrix.nrows() * matrix.ncols(),
            });
        }
        Ok(Self {
            shape,
            mat: matrix,
            hermitian: false,
        })
    }

    /// Operator asserted Hermitian; fails if `max|M - M^dagger| > HERMITIAN_TOL`.
    pub fn hermitian(shape: HilbertShape, matrix: DMatrix<C64>) -> Result<Self> {
        Self::new(shape, matrix)?.assert_hermitian()
    }

    /// Row-major entries.
    pub fn from_rows(shape: HilbertShape, entries: &[C64]) -> Result<Self> {
        let n = shape.total_dim();
        if entries.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        Self::new(shape, DMatrix::from_row_slice(n, n, entries))
    }

    pub fn identity(shape: HilbertShape) -> Self {
        let n = shape.total_dim();
        Self {
            shape,
            mat: DMatrix::identity(n, n),
            hermitian: true,
        }
    }

    /// Rank-one projector `|k><k| / <k|k>`.
    pub fn projector(ket: &Ket) -> Result<Self> {
        let k = ket.normalized()?;
        let mat = k.vector() * k.vector().adjoint();
        Ok(Self {
            shape: ket.shape.clone(),
            mat,
            hermitian: true,
        })
    }

    /// Set the Hermitian flag after checking it.
    pub fn assert_hermitian(mut self) -> Result<Self> {
        let dev = self.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        self.hermitian = true;
        Ok(self)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.mat.nrows();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn shape(&self) -> &HilbertShape {
        &self.shape
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn apply(&self, ket: &Ket) -> Result<Ket> {
        self.shape.ensure_same(&ket.shape)?;
        Ok(Ket::from_vector(self.shape.clone(), &self.mat * &ket.amps))
    }

    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        self.shape.ensure_same(&other.shape)?;
        Ok(Operator {
            shape: self.shape.clone(),
            mat: &self.mat * &other.mat,
            hermitian: false,
        })
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            shape: self.shape.clone(),
            mat: self.mat.adjoint(),
            hermitian: self.hermitian,
        }
    }

    pub fn scale(&self, z: C64) -> Operator {
        Operator {
            shape: self.shape.clone(),
            mat: &self.mat * z,
            hermitian: self.hermitian && z.im == 0.0,
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.shape.ensure_same(&other.shape)?;
        Ok(Operator {
            shape: self.shape.clone(),
            mat: &self.mat + &other.mat,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// `<bra| self |ket>`.
    pub fn sandwich(&self, bra: &Ket, ket: &Ket) -> Result<C64> {
        inner(bra, &self.apply(ket)?)
    }

    /// Eigendecomposition of a Hermitian operator, eigenvalues ascending.
    pub fn eigh(&self) -> Result<Spectrum> {
        if !self.hermitian {
            return Err(Error::NotHermitian {
                deviation: self.hermitian_deviation(),
            });
        }
        let eig = SymmetricEigen::new(self.mat.clone());
        let n = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(Spectrum { values, vectors })
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        if self.shape != other.shape {
            return f64::INFINITY;
        }
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Eigenvalues (ascending) and matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl Spectrum {
    /// Eigenvalues with clusters closer than `tol` merged (cluster mean).
    pub fn distinct(&self, tol: f64) -> Vec<f64> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &v in &self.values {
            match out.last_mut() {
                Some((sum, count)) if (v - *sum / *count as f64).abs() <= tol => {
                    *sum += v;
                    *count += 1;
                }
                _ => out.push((v, 1)),
            }
        }
        out.into_iter().map(|(s, c)| s / c as f64).collect()
    }
}

/// Local observable attached to one tensor factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteObservable {
    site: usize,
    local: Operator,
    eigenvalues: Option<(f64, f64)>,
}

/// Tolerance for declared two-level eigenvalues.
pub const EIGENVALUE_TOL: f64 = 1e-10;

impl SiteObservable {
    pub fn new(site: usize, local: Operator) -> Result<Self> {
        let factors = local.shape().num_factors();
        if factors != 1 {
            return Err(Error::NotSingleFactor { factors });
        }
        Ok(Self {
            site,
            local,
            eigenvalues: None,
        })
    }

    /// Two-level observable with its eigenvalue pair computed, larger first
    /// (so Pauli operators give `(1, -1)` and projectors `(1, 0)`).
    pub fn two_level(site: usize, local: Operator) -> Result<Self> {
        let obs = Self::new(site, local)?;
        let d = obs.local.dim();
        if d != 2 {
            return Err(Error::EigenvalueCount {
                expected: d,
                found: 2,
            });
        }
        let spec = obs.local.eigh()?;
        let pair = (spec.values[1], spec.values[0]);
        obs.with_eigenvalues(pair.0, pair.1)
    }

    /// Attach a declared eigenvalue pair, verified against the operator.
    pub fn with_eigenvalues(mut self, lambda1: f64, lambda2: f64) -> Result<Self> {
        let d = self.local.dim();
        if d != 2 {
            return Err(Error::EigenvalueCount {
                expected: d,
                found: 2,
            });
        }
        let spec = self.local.eigh()?;
        let (lo, hi) = if lambda1 <= lambda2 {
            (lambda1, lambda2)
        } else {
            (lambda2, lambda1)
        };
        let residual = (spec.values[0] - lo).abs().max((spec.values[1] - hi).abs());
        if residual > EIGENVALUE_TOL {
            return Err(Error::EigenvalueMismatch {
                lambda1,
                lambda2,
                residual,
            });
        }
        if (lambda1 - lambda2).abs() <= crate::values::EPS_DEGEN {
            return Err(Error::DegenerateSpectrum {
                gap: (lambda1 - lambda2).abs(),
                threshold: crate::values::EPS_DEGEN,
            });
        }
        self.eigenvalues = Some((lambda1, lambda2));
        Ok(self)
    }

    pub fn site(&self) -> usize {
        self.site
    }

    pub fn local(&self) -> &Operator {
        &self.local
    }

    pub fn eigenvalues(&self) -> Option<(f64, f64)> {
        self.eigenvalues
    }

    /// Same observable moved to another site.
    pub fn at_site(&self, site: usize) -> Self {
        Self {
            site,
            ..self.clone()
        }
    }
}

/// Kronecker product of kets in listed order.
pub fn tensor_kets(parts: &[Ket]) -> Result<Ket> {
    let (first, rest) = parts.split_first().ok_or(Error::EmptyProduct)?;
    let mut shape = first.shape.clone();
    let mut amps = first.amps.clone();
    for k in rest {
        shape = shape.concat(&k.shape)?;
        amps = amps.kronecker(&k.amps);
    }
    Ok(Ket { shape, amps })
}

/// Kronecker product of operators; Hermitian iff every part is.
pub fn tensor_ops(parts: &[Operator]) -> Result<Operator> {
    let (first, rest) = parts.split_first().ok_or(Error::EmptyProduct)?;
    let mut shape = first.shape.clone();
    let mut mat = first.mat.clone();
    let mut hermitian = first.hermitian;
    for op in rest {
        shape = shape.concat(&op.shape)?;
        mat = mat.kronecker(&op.mat);
        hermitian &= op.hermitian;
    }
    Ok(Operator {
        shape,
        mat,
        hermitian,
    })
}

/// Identity everywhere except `obs.local` at `obs.site`.
pub fn embed(obs: &SiteObservable, shape: &HilbertShape) -> Result<Operator> {
    embed_local(obs.site, &obs.local, shape)
}

pub(crate) fn embed_local(site: usize, local: &Operator, shape: &HilbertShape) -> Result<Operator> {
    let factors = shape.num_factors();
    if site >= factors {
        return Err(Error::SiteOutOfRange { site, factors });
    }
    let d = shape.dims()[site];
    if local.dim() != d {
        return Err(Error::SiteDimension {
            site,
            expected: d,
            found: local.dim(),
        });
    }
    let parts: Vec<Operator> = shape
        .dims()
        .iter()
        .enumerate()
        .map(|(j, &dj)| {
            if j == site {
                local.clone()
            } else {
                Operator::identity(HilbertShape::new(vec![dj]).expect("positive dim"))
            }
        })
        .collect();
    tensor_ops(&parts)
}

/// `<bra|ket>`, conjugate-linear in `bra`.
pub fn inner(bra: &Ket, ket: &Ket) -> Result<C64> {
    bra.shape.ensure_same(&ket.shape)?;
    Ok(bra.amps.dotc(&ket.amps))
}

#[derive(Serialize, Deserialize)]
struct KetJson {
    dims: Vec<usize>,
    amplitudes: Vec<f64>,
}

impl From<Ket> for KetJson {
    fn from(k: Ket) -> Self {
        Self {
            dims: k.shape.dims.clone(),
            amplitudes: interleave(k.amps.iter()),
        }
    }
}

impl TryFrom<KetJson> for Ket {
    type Error = Error;

    fn try_from(j: KetJson) -> Result<Self> {
        let shape = HilbertShape::new(j.dims)?;
        Ket::new(shape, deinterleave(&j.amplitudes)?)
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    dims: Vec<usize>,
    hermitian: bool,
    /// Row-major, interleaved re/im.
    matrix: Vec<f64>,
}

impl From<Operator> for OperatorJson {
    fn from(op: Operator) -> Self {
        let rows = op.mat.transpose();
        Self {
            dims: op.shape.dims.clone(),
            hermitian: op.hermitian,
            matrix: interleave(rows.iter()),
        }
    }
}

impl TryFrom<OperatorJson> for Operator {
    type Error = Error;

    fn try_from(j: OperatorJson) -> Result<Self> {
        let shape = HilbertShape::new(j.dims)?;
        let op = Operator::from_rows(shape, &deinterleave(&j.matrix)?)?;
        if j.hermitian {
            op.assert_hermitian()
        } else {
            Ok(op)
        }
    }
}

fn interleave<'a>(zs: impl Iterator<Item = &'a C64>) -> Vec<f64> {
    zs.flat_map(|z| [z.re, z.im]).collect()
}

fn deinterleave(xs: &[f64]) -> Result<Vec<C64>> {
    if !xs.len().is_multiple_of(2) {
        return Err(Error::LengthMismatch {
            expected: xs.len() + 1,
            found: xs.len(),
        });
    }
    Ok(xs.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect())
}
