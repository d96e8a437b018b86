pub mod apps;
pub mod baselines;
pub mod domain;
pub mod envelope1d;
pub mod envelope2d;
pub mod error;
pub mod linalg;
pub mod matfunc;
pub mod mesh;
pub mod result;

pub use domain::SearchBox;
pub use error::{Error, Result};
pub use result::{HistoryRow, OptResult, Status};

/// The guide's code samples, compiled and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/one_dimension.md")]
    mod one_dimension {}
    #[doc = include_str!("../../../book/src/eigenvalues.md")]
    mod eigenvalues {}
    #[doc = include_str!("../../../book/src/two_dimensions.md")]
    mod two_dimensions {}
    #[doc = include_str!("../../../book/src/gamma.md")]
    mod gamma {}
    #[doc = include_str!("../../../book/src/applications.md")]
    mod applications {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
