//! Controlled-Rz sweep of |(sz)_mod| as CSV on standard output.

use std::f64::consts::PI;

use modval::meter::{crz_sweep, write_sweep_csv, MeterPrep};
use modval::scenario::crz_states;
use modval::PrePostEnsemble;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (psi, phi) = crz_states();
    let e = PrePostEnsemble::new(psi, phi)?;
    let thetas: Vec<f64> = (0..=20).map(|k| 2.0 * PI * k as f64 / 20.0).collect();
    let rows = crz_sweep(&e, &MeterPrep::new(0.1)?, &thetas)?;
    write_sweep_csv(&rows, std::io::stdout().lock())?;
    Ok(())
}
