//! Every built-in scenario at one coupling, summarized.

use modval::scenario::Scenario;

fn main() -> modval::Result<()> {
    let g = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.7);
    for sc in Scenario::ALL {
        let r = sc.run(g)?;
        println!("== {} (g = {:.4}) overlap {:.6}", r.name, r.g, r.ensemble.overlap);
        for (k, v) in &r.weak_values {
            println!("  weak     {k:<22} {v:.6}");
        }
        for (k, v) in &r.modular_values {
            println!("  modular  {k:<22} {v:.6}");
        }
        if let Some(s) = &r.sum_rule {
            println!("  sum-rule gap {:.6}", s.gap);
        }
    }
    Ok(())
}
