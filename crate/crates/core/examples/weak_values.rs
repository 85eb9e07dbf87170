//! Weak values of spin observables in the singlet with a spin post-selection.

use modval::composite::weak_joint;
use modval::scenario::epr_states;
use modval::tensor::embed;
use modval::values::weak_value;
use modval::{gates, PrePostEnsemble, SiteObservable};

fn main() -> modval::Result<()> {
    let (psi, phi) = epr_states();
    let e = PrePostEnsemble::new(psi, phi)?;
    let sx1 = SiteObservable::two_level(0, gates::sigma_x())?;
    let sy2 = SiteObservable::two_level(1, gates::sigma_y())?;

    println!("<phi|psi>        = {:.6}", e.overlap());
    println!("<sx(1)>_w        = {:.6}", weak_value(&embed(&sx1, e.shape())?, &e)?);
    println!("<sy(2)>_w        = {:.6}", weak_value(&embed(&sy2, e.shape())?, &e)?);
    println!("<sx(1) sy(2)>_w  = {:.6}", weak_joint(&sx1, &sy2, &e)?);
    Ok(())
}
