//! Benchmark objectives.

mod logreg;
mod nesterov_skokov;
mod quadratic;
mod rosenbrock;
mod simple3d;

pub use logreg::{LogRegData, LogisticRegression};
pub use nesterov_skokov::NesterovSkokov;
pub use quadratic::QuadraticDiag;
pub use rosenbrock::Rosenbrock;
pub use simple3d::Simple3D;
