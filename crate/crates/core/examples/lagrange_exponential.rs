//! exp(-igA) from eigenvalues alone, compared with the spectral route.

use modval::gates::c;
use modval::tensor::HilbertShape;
use modval::values::{exp_lagrange, exp_spectral};
use modval::{Coupling, Operator};

fn main() -> modval::Result<()> {
    #[rustfmt::skip]
    let entries = [
        c(0.5, 0.),  c(0.3, 0.4), c(0., 0.),
        c(0.3, -0.4), c(0.2, 0.), c(0.6, 0.),
        c(0., 0.),   c(0.6, 0.),  c(0.8, 0.),
    ];
    let a = Operator::from_rows(HilbertShape::new(vec![3])?, &entries)?.assert_hermitian()?;
    let eigs = a.eigh()?.values;
    let g = Coupling::new(0.8)?;
    let lagrange = exp_lagrange(&a, &eigs, g)?;
    let spectral = exp_spectral(&a, g)?;
    println!("eigenvalues: {eigs:.6?}");
    println!("max |Lagrange - spectral| = {:.3e}", lagrange.max_abs_diff(&spectral));
    Ok(())
}
