//! Decorated equational logic for states and exceptions: a proof kernel,
//! translators between the decorated, apparent and explicit views, the
//! duality between the two effects, and a finite-model oracle.

pub mod dsl;
pub mod error;
pub mod exceptions;
pub mod explicit;
pub mod kernel;
pub mod model;
pub mod saturate;
pub mod states;
pub mod suites;
pub mod syntax;
pub mod translate;

pub use error::Error;

// The guide's code blocks run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/decorations.md")]
    mod decorations {}
    #[doc = include_str!("../../../book/src/kernel.md")]
    mod kernel {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/exceptions.md")]
    mod exceptions {}
    #[doc = include_str!("../../../book/src/translations.md")]
    mod translations {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/scripts.md")]
    mod scripts {}
    #[doc = include_str!("../../../book/src/report.md")]
    mod report {}
}
