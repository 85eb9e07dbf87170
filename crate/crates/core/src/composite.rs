//! Modular values of sums of subsystem observables, and the sum-rule and
//! product-rule diagnostics.
//!
//! Terms of an [`ObservableSum`] live on pairwise-distinct sites, so they
//! commute structurally and `e^{-ig sum_j A_j} = prod_j e^{-ig A_j}`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{embed, embed_local, tensor_ops, HilbertShape, Operator, SiteObservable};
use crate::values::{
    exp_spectral, modular_value, two_level_coeffs, weak_value, Coupling, PrePostEnsemble,
    TwoLevelCoeffs,
};

/// Product-rule gap below which `<AB>_w = <A>_w <B>_w` is taken to hold.
pub const PRODUCT_RULE_TOL: f64 = 1e-9;

/// Sum of local observables on distinct sites of a common shape.
#[derive(Debug, Clone)]
pub struct ObservableSum {
    shape: HilbertShape,
    terms: Vec<SiteObservable>,
}

impl ObservableSum {
    pub fn new(shape: HilbertShape, terms: Vec<SiteObservable>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptySum);
        }
        let mut seen = vec![false; shape.num_factors()];
        for t in &terms {
            // validates site range and local dimension
            embed(t, &shape)?;
            if std::mem::replace(&mut seen[t.site()], true) {
                return Err(Error::SharedSite { site: t.site() });
            }
        }
        Ok(Self { shape, terms })
    }

    pub fn shape(&self) -> &HilbertShape {
        &self.shape
    }

    pub fn terms(&self) -> &[SiteObservable] {
        &self.terms
    }

    /// Terms ordered by site.
    fn by_site(&self) -> Vec<&SiteObservable> {
        let mut t: Vec<_> = self.terms.iter().collect();
        t.sort_by_key(|o| o.site());
        t
    }

    /// The full operator `sum_j embed(A_j)`.
    pub fn operator(&self) -> Result<Operator> {
        let mut it = self.terms.iter();
        let first = embed(it.next().expect("nonempty"), &self.shape)?;
        it.try_fold(first, |acc, t| acc.add(&embed(t, &self.shape)?))
    }

    /// `prod_j e^{-ig A_j}` assembled as a Kronecker product of per-factor
    /// exponentials (identity on factors without a term).
    pub fn exponential(&self, c: Coupling) -> Result<Operator> {
        let mut parts = Vec::with_capacity(self.shape.num_factors());
        for (site, &d) in self.shape.dims().iter().enumerate() {
            let part = match self.terms.iter().find(|t| t.site() == site) {
                Some(t) => exp_spectral(t.local(), c)?,
                None => Operator::identity(HilbertShape::new(vec![d])?),
            };
            parts.push(part);
        }
        tensor_ops(&parts)
    }

    fn coeffs(&self, c: Coupling) -> Result<Vec<(usize, TwoLevelCoeffs)>> {
        self.by_site()
            .into_iter()
            .map(|t| {
                let (l1, l2) = match t.eigenvalues() {
                    Some(p) => p,
                    None => SiteObservable::two_level(t.site(), t.local().clone())?
                        .eigenvalues()
                        .expect("two_level sets eigenvalues"),
                };
                Ok((t.site(), two_level_coeffs(l1, l2, c)?))
            })
            .collect()
    }
}

fn check_shape(s: &ObservableSum, e: &PrePostEnsemble) -> Result<()> {
    if s.shape() != e.shape() {
        return Err(Error::ShapeMismatch {
            left: s.shape().dims().to_vec(),
            right: e.shape().dims().to_vec(),
        });
    }
    Ok(())
}

/// `(sum_j A_j)_mod` from the product of per-factor exponentials.
pub fn modular_of_sum(s: &ObservableSum, c: Coupling, e: &PrePostEnsemble) -> Result<C64> {
    check_shape(s, e)?;
    e.conditioned(&s.exponential(c)?)
}

/// `(sum_j A_j)_mod = <phi| prod_j (a_j A_j + b_j I) |psi> / <phi|psi>` for
/// two-level terms, multiplied in site order.
pub fn modular_of_sum_closed_form(
    s: &ObservableSum,
    c: Coupling,
    e: &PrePostEnsemble,
) -> Result<C64> {
    check_shape(s, e)?;
    let coeffs = s.coeffs(c)?;
    let mut product = Operator::identity(s.shape.clone());
    for (site, k) in coeffs {
        let t = s.terms.iter().find(|t| t.site() == site).expect("site");
        let d = t.local().dim();
        let local = t
            .local()
            .scale(k.a)
            .add(&Operator::identity(HilbertShape::new(vec![d])?).scale(k.b))?;
        product = product.matmul(&embed_local(site, &local, &s.shape)?)?;
    }
    e.conditioned(&product)
}

/// Weak and modular value of one term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermValues {
    pub site: usize,
    #[serde(with = "crate::json::complex")]
    pub weak: C64,
    #[serde(with = "crate::json::complex")]
    pub modular: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumRuleReport {
    pub g: f64,
    #[serde(with = "crate::json::complex")]
    pub mod_of_sum: C64,
    #[serde(with = "crate::json::complex")]
    pub sum_of_mods: C64,
    /// `mod_of_sum - sum_of_mods`, signed.
    #[serde(with = "crate::json::complex")]
    pub gap: C64,
    pub per_term: Vec<TermValues>,
}

impl SumRuleReport {
    pub fn sum_rule_holds(&self, tol: f64) -> bool {
        self.gap.norm() <= tol
    }

    /// For two-term sums: whether `(A)_mod (B)_mod = (A)_mod + (B)_mod`,
    /// the extra condition under which a product-rule ensemble also
    /// satisfies the sum rule. `None` for other term counts.
    pub fn mods_product_equals_sum(&self, tol: f64) -> Option<bool> {
        match self.per_term.as_slice() {
            [a, b] => Some((a.modular * b.modular - (a.modular + b.modular)).norm() <= tol),
            _ => None,
        }
    }
}

pub fn sum_rule_report(s: &ObservableSum, c: Coupling, e: &PrePostEnsemble) -> Result<SumRuleReport> {
    let mod_of_sum = modular_of_sum(s, c, e)?;
    let per_term = s
        .terms
        .iter()
        .map(|t| {
            let op = embed(t, &s.shape)?;
            Ok(TermValues {
                site: t.site(),
                weak: weak_value(&op, e)?,
                modular: modular_value(&op, None, c, e)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sum_of_mods: C64 = per_term.iter().map(|t| t.modular).sum();
    Ok(SumRuleReport {
        g: c.g(),
        mod_of_sum,
        sum_of_mods,
        gap: mod_of_sum - sum_of_mods,
        per_term,
    })
}

fn distinct_sites(a: &SiteObservable, b: &SiteObservable) -> Result<()> {
    if a.site() == b.site() {
        Err(Error::SharedSite { site: a.site() })
    } else {
        Ok(())
    }
}

/// `<A B>_w` for observables on distinct sites.
pub fn weak_joint(a: &SiteObservable, b: &SiteObservable, e: &PrePostEnsemble) -> Result<C64> {
    distinct_sites(a, b)?;
    let shape = e.shape();
    let ab = embed(a, shape)?.matmul(&embed(b, shape)?)?;
    weak_value(&ab, e)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductRuleReport {
    #[serde(with = "crate::json::complex")]
    pub weak_a: C64,
    #[serde(with = "crate::json::complex")]
    pub weak_b: C64,
    #[serde(with = "crate::json::complex")]
    pub joint_weak: C64,
    #[serde(with = "crate::json::complex")]
    pub product_of_weaks: C64,
    /// `joint_weak - product_of_weaks`, signed.
    #[serde(with = "crate::json::complex")]
    pub gap: C64,
}

impl ProductRuleReport {
    pub fn product_rule_holds(&self, tol: f64) -> bool {
        self.gap.norm() <= tol
    }
}

pub fn product_rule_report(
    a: &SiteObservable,
    b: &SiteObservable,
    e: &PrePostEnsemble,
) -> Result<ProductRuleReport> {
    let joint_weak = weak_joint(a, b, e)?;
    let weak_a = weak_value(&embed(a, e.shape())?, e)?;
    let weak_b = weak_value(&embed(b, e.shape())?, e)?;
    let product_of_weaks = weak_a * weak_b;
    Ok(ProductRuleReport {
        weak_a,
        weak_b,
        joint_weak,
        product_of_weaks,
        gap: joint_weak - product_of_weaks,
    })
}

/// Outcome of checking "product rule holds => modular value of the sum
/// factorizes".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductSumCheck {
    pub product_rule: ProductRuleReport,
    pub coeffs_a: TwoLevelCoeffs,
    pub coeffs_b: TwoLevelCoeffs,
    #[serde(with = "crate::json::complex")]
    pub mod_a: C64,
    #[serde(with = "crate::json::complex")]
    pub mod_b: C64,
    /// `(A+B)_mod` evaluated directly.
    #[serde(with = "crate::json::complex")]
    pub mod_sum: C64,
    /// `aa'<AB>_w + ab'<A>_w + a'b<B>_w + bb'`.
    #[serde(with = "crate::json::complex")]
    pub expansion: C64,
    pub expansion_residual: f64,
    pub premise_tol: f64,
    pub premise_holds: bool,
    /// `|(A+B)_mod - (A)_mod (B)_mod|`, only when the premise holds.
    pub factorization_residual: Option<f64>,
    pub holds: bool,
}

/// Tolerance for the expansion identity and, when the premise holds, the
/// factorization.
pub const IMPLICATION_TOL: f64 = 1e-9;

pub fn check_product_implies_sum(
    a: &SiteObservable,
    b: &SiteObservable,
    c: Coupling,
    e: &PrePostEnsemble,
) -> Result<ProductSumCheck> {
    distinct_sites(a, b)?;
    let sum = ObservableSum::new(e.shape().clone(), vec![a.clone(), b.clone()])?;
    let coeffs = sum.coeffs(c)?;
    let find = |site| coeffs.iter().find(|(s, _)| *s == site).expect("site").1;
    let (ka, kb) = (find(a.site()), find(b.site()));

    let product_rule = product_rule_report(a, b, e)?;
    let mod_a = modular_value(&embed(a, e.shape())?, None, c, e)?;
    let mod_b = modular_value(&embed(b, e.shape())?, None, c, e)?;
    let mod_sum = modular_of_sum(&sum, c, e)?;
    let expansion = ka.a * kb.a * product_rule.joint_weak
        + ka.a * kb.b * product_rule.weak_a
        + kb.a * ka.b * product_rule.weak_b
        + ka.b * kb.b;
    let expansion_residual = (expansion - mod_sum).norm();
    let premise_holds = product_rule.product_rule_holds(PRODUCT_RULE_TOL);
    let factorization_residual = premise_holds.then(|| (mod_sum - mod_a * mod_b).norm());
    let holds = expansion_residual <= IMPLICATION_TOL
        && factorization_residual.is_none_or(|r| r <= IMPLICATION_TOL);
    Ok(ProductSumCheck {
        product_rule,
        coeffs_a: ka,
        coeffs_b: kb,
        mod_a,
        mod_b,
        mod_sum,
        expansion,
        expansion_residual,
        premise_tol: PRODUCT_RULE_TOL,
        premise_holds,
        factorization_residual,
        holds,
    })
}
