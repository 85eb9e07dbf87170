//! Modular value read from a meter qubit, exactly and from sampled shots.

use modval::meter::{estimate_modular_from_shots, run_single_meter, sample_meter, MeterPrep};
use modval::scenario::epr_states;
use modval::tensor::embed;
use modval::values::modular_value;
use modval::{gates, Coupling, PrePostEnsemble, SiteObservable};

fn main() -> modval::Result<()> {
    let (psi, phi) = epr_states();
    let e = PrePostEnsemble::new(psi, phi)?;
    let sx1 = embed(&SiteObservable::two_level(0, gates::sigma_x())?, e.shape())?;
    let c = Coupling::new(std::f64::consts::FRAC_PI_4)?;
    let prep = MeterPrep::new(0.5)?;

    let exact = modular_value(&sx1, None, c, &e)?;
    let outcome = run_single_meter(&sx1, c, &e, &prep)?;
    println!("exact           {exact:.6}");
    println!("meter amplitude {:.6}", outcome.extracted["1"]);

    let records = ["X", "Y", "Z"]
        .iter()
        .zip(7u64..)
        .map(|(b, seed)| sample_meter(&outcome, b, 100_000, seed))
        .collect::<modval::Result<Vec<_>>>()?;
    let est = estimate_modular_from_shots(&records, &prep)?;
    println!(
        "tomography      {:.6} +/- ({:.4}, {:.4})",
        est.value, est.std_error_re, est.std_error_im
    );
    Ok(())
}
