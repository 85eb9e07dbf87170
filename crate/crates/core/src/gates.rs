//! Standard single-qubit kets and operators.
//!
//! Two-level factors use basis index 0 for `|0>`, `|up>`, `|H>`, `|L>`, `|O>`
//! and index 1 for `|1>`, `|dn>`, `|V>`, `|R>`, `|NO>`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use crate::tensor::{HilbertShape, Ket, Operator};

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn qubit_shape() -> HilbertShape {
    HilbertShape::qubits(1).expect("one qubit")
}

fn herm(entries: [C64; 4]) -> Operator {
    Operator::from_rows(qubit_shape(), &entries)
        .and_then(Operator::assert_hermitian)
        .expect("2x2 Hermitian")
}

pub fn ket0() -> Ket {
    Ket::qubit(c(1., 0.), c(0., 0.))
}

pub fn ket1() -> Ket {
    Ket::qubit(c(0., 0.), c(1., 0.))
}

/// `(|0> + |1>)/sqrt2`, the +1 eigenvector of sigma_x.
pub fn ket_plus_x() -> Ket {
    Ket::qubit(c(FRAC_1_SQRT_2, 0.), c(FRAC_1_SQRT_2, 0.))
}

/// `(|0> + i|1>)/sqrt2`, the +1 eigenvector of sigma_y.
pub fn ket_plus_y() -> Ket {
    Ket::qubit(c(FRAC_1_SQRT_2, 0.), c(0., FRAC_1_SQRT_2))
}

pub fn identity2() -> Operator {
    Operator::identity(qubit_shape())
}

pub fn sigma_x() -> Operator {
    herm([c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn sigma_y() -> Operator {
    herm([c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn sigma_z() -> Operator {
    herm([c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// `|0><0|`
pub fn proj0() -> Operator {
    herm([c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)])
}

/// `|1><1|`
pub fn proj1() -> Operator {
    herm([c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)])
}

/// Stokes operator `|H><H| - |V><V|` in the `(H, V)` basis.
pub fn stokes() -> Operator {
    sigma_z()
}

/// `R_z(theta) = diag(e^{-i theta/2}, e^{i theta/2})`.
pub fn rz(theta: f64) -> Operator {
    let h = theta / 2.0;
    Operator::from_rows(
        qubit_shape(),
        &[C64::cis(-h), c(0., 0.), c(0., 0.), C64::cis(h)],
    )
    .expect("2x2")
}

/// Hadamard.
pub fn hadamard() -> Operator {
    let s = FRAC_1_SQRT_2;
    herm([c(s, 0.), c(s, 0.), c(s, 0.), c(-s, 0.)])
}

/// `S^dagger = diag(1, -i)`.
pub fn phase_dagger() -> Operator {
    Operator::from_rows(qubit_shape(), &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., -1.)]).expect("2x2")
}
