//! Noncommutative function theory on the open unit ball of `B(H)^n`:
//! free words, truncated Fock space, free series, free pluriharmonic
//! functions, the Poisson/Herglotz/Fantappie transforms, multi-Toeplitz
//! matrices and the Caratheodory interpolation problem.

pub mod acceptance;
pub mod caratheodory;
pub mod cmatrix;
pub mod error;
pub mod fock;
pub mod freeword;
pub mod pluriharmonic;
pub mod series;
pub mod testing;
pub mod toeplitz;
pub mod transforms;

pub use caratheodory::{CFProblem, CaratheodoryProblem, ExtendOptions, ExtensionResult};
pub use cmatrix::{CMatrix, C64};
pub use error::{Error, Result};
pub use fock::{FockTrunc, OperatorTuple};
pub use freeword::{GradedBasis, Word};
pub use pluriharmonic::PluriharmonicFn;
pub use series::{Direction, FreeSeries};
pub use toeplitz::MultiToeplitzMatrix;
pub use transforms::MomentFunctional;
