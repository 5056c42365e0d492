//! Formal group algebras, Demazure operators and formal affine Demazure
//! algebras over root data, with exact arithmetic.
//!
//! ```
//! use demazure::{make_fgl, Bindings, FglKind, Gcm, Lattice, TwistedContext};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let law = make_fgl(FglKind::Hyperbolic, &Bindings::new(), 8)?;
//! let gcm = Gcm::new(vec![vec![2, -1], vec![-3, 2]])?;
//! let ctx = TwistedContext::new(&law, &Lattice::root_lattice(&gcm), 8, TwistedContext::margin_for(6))?;
//! let report = ctx.verify_braid(0, 1)?;
//! assert!(report.holds);
//! # Ok(())
//! # }
//! ```

pub mod fga;
pub mod hecke;
pub mod intmat;
pub mod rational;
pub mod roots;
pub mod scalars;
pub mod series;
pub mod twisted;

pub use fga::{custom_fgl, law_from_logarithm, make_fgl, FgaContext, FgaError, FglKind, FormalGroupLaw};
pub use rational::Q;
pub use roots::{CartanType, CoxeterOrder, Gcm, Lattice, RealRoot, RootError, WeylElement, WeylGroup};
pub use scalars::{Bindings, Param, Scalar, ScalarError};
pub use series::{Monomial, PowerSeries, SeriesError};
pub use twisted::{QFraction, RelationKind, RelationReport, TwistedContext, TwistedElement, TwistedError, XBasisExpansion};
pub use hecke::{phi_expression, psi_map, DemazureExpression, HeckeAlgebra, HeckeElement, HeckeError, HeckeMaps, HeckeReport};
