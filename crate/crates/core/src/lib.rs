//! Weak and modular values of pre- and post-selected quantum ensembles.


pub mod cli;
pub mod composite;
pub mod error;
pub mod expr;
pub mod gates;
pub mod json;
pub mod meter;
pub mod scenario;
pub mod tensor;
pub mod values;

pub use num_complex::Complex64 as C64;

pub use composite::{ObservableSum, ProductRuleReport, SumRuleReport};
pub use error::{Error, Result};
pub use tensor::{HilbertShape, Ket, Operator, SiteObservable};
pub use values::{Coupling, PrePostEnsemble, TwoLevelCoeffs};
