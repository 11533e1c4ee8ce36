use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::KernelError;
use crate::model::ModelError;
use crate::syntax::TypeError;

/// Errors raised while building theories, terms and lemma derivations.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum Error {
    #[error("location `{0}` listed twice")]
    DuplicateLocation(String),
    #[error("constructor `{0}` listed twice")]
    DuplicateConstructor(String),
    #[error("unknown constructor `{0}`")]
    UnknownConstructor(String),
    #[error("the pure side `{0}` is not pure")]
    PureSideNotPure(String),
    #[error("unknown lemma `{0}`")]
    UnknownLemma(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("a handler needs at least one clause or a catch-all")]
    EmptyHandler,
    #[error("handler codomain {found} differs from body codomain {expected}")]
    CodomainMismatch { expected: String, found: String },
    #[error("{0}")]
    Flavor(String),
    #[error("unknown suite `{0}`")]
    SuiteUnknown(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Type(#[from] TypeError),
}
