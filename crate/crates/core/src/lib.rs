//! Matrix ranges of operator tuples: membership, containment, extremal
//! structure, minimal and fully compressed models.

pub mod compactmodel;
pub mod error;
pub mod extremal;
mod lp;
pub mod minmax;
pub mod mrange;
pub mod numlin;
pub mod sdp;
pub mod structure;
pub mod suites;
pub mod tuples;

use serde::{Deserialize, Serialize};

pub use compactmodel::{CompactModel, ZeroSummand};
pub use error::{Error, Result};
pub use minmax::Polytope;
pub use sdp::ToleranceProfile;
pub use tuples::{Decomposition, MatrixTuple};

/// Three-valued verdict. `Indeterminate` means the numerics could not decide
/// within tolerance; it is never silently turned into `Yes` or `No`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Yes,
    No,
    Indeterminate,
}

impl Decision {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Decision::Yes
        } else {
            Decision::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == Decision::Yes
    }

    pub fn is_no(self) -> bool {
        self == Decision::No
    }
}
