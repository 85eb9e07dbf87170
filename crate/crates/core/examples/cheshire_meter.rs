//! Entangled two-qubit meter on the Cheshire-cat ensemble.

use modval::meter::{run_two_qubit_meter, TwoQubitMeterPrep, LABEL_PATH, LABEL_POLARIZATION, LABEL_SUM};
use modval::scenario::cheshire_states;
use modval::tensor::embed;
use modval::values::modular_value;
use modval::{gates, Coupling, ObservableSum, PrePostEnsemble, SiteObservable};

fn main() -> modval::Result<()> {
    let (psi, phi) = cheshire_states();
    let e = PrePostEnsemble::new(psi, phi)?;
    let s = SiteObservable::two_level(0, gates::stokes())?;
    let prep = TwoQubitMeterPrep::new(0.1)?;
    let c = Coupling::new(0.5)?;

    for (name, local) in [("Pi_L", gates::proj0()), ("Pi_R", gates::proj1())] {
        let p = SiteObservable::two_level(1, local)?;
        let out = run_two_qubit_meter(&s, &p, c, &e, &prep)?;
        let sum = ObservableSum::new(e.shape().clone(), vec![s.clone(), p.clone()])?;
        println!("path projector {name}");
        println!("  (S)_mod    meter {:.6}  direct {:.6}", out.extracted[LABEL_POLARIZATION], modular_value(&embed(&s, e.shape())?, None, c, &e)?);
        println!("  (P)_mod    meter {:.6}  direct {:.6}", out.extracted[LABEL_PATH], modular_value(&embed(&p, e.shape())?, None, c, &e)?);
        println!("  (S+P)_mod  meter {:.6}  direct {:.6}", out.extracted[LABEL_SUM], modular_value(&sum.operator()?, None, c, &e)?);
    }
    Ok(())
}
