//! Two-level conversion between weak and modular values.

use modval::gates;
use modval::scenario::crz_states;
use modval::values::{modular_from_weak, modular_value, two_level_coeffs, weak_from_modular, weak_value};
use modval::{Coupling, PrePostEnsemble};

fn main() -> modval::Result<()> {
    let (psi, phi) = crz_states();
    let e = PrePostEnsemble::new(psi, phi)?;
    let sz = gates::sigma_z();
    let w = weak_value(&sz, &e)?;
    println!("<sz>_w = {w:.12}");
    for g in [0.1, 0.5, 1.0, std::f64::consts::FRAC_PI_2] {
        let c = Coupling::new(g)?;
        let k = two_level_coeffs(1.0, -1.0, c)?;
        let direct = modular_value(&sz, None, c, &e)?;
        let from_weak = modular_from_weak(w, &k);
        let back = weak_from_modular(direct, &k)?;
        println!(
            "g = {g:.4}: (sz)_mod = {direct:.6}, a<sz>_w + b = {from_weak:.6}, recovered weak = {back:.6}"
        );
    }
    Ok(())
}
