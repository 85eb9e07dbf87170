//! The modular value of a sum is not the sum of modular values.

use modval::composite::{check_product_implies_sum, sum_rule_report};
use modval::scenario::hardy_states;
use modval::{gates, Coupling, ObservableSum, PrePostEnsemble, SiteObservable};

fn main() -> modval::Result<()> {
    let (psi, phi) = hardy_states();
    let e = PrePostEnsemble::new(psi, phi)?;
    let p = SiteObservable::two_level(0, gates::proj0())?;
    let q = SiteObservable::two_level(1, gates::proj0())?;
    let sum = ObservableSum::new(e.shape().clone(), vec![p.clone(), q.clone()])?;

    for g in [0.3, 0.7, 1.5] {
        let r = sum_rule_report(&sum, Coupling::new(g)?, &e)?;
        println!(
            "g = {g}: (P+Q)_mod = {:.6}, (P)_mod + (Q)_mod = {:.6}, gap = {:.6}",
            r.mod_of_sum, r.sum_of_mods, r.gap
        );
    }
    let check = check_product_implies_sum(&p, &q, Coupling::new(0.7)?, &e)?;
    println!(
        "product rule gap {:.3}; four-term expansion residual {:.1e}",
        check.product_rule.gap, check.expansion_residual
    );
    Ok(())
}
