pub mod error;
pub mod fgl;
pub mod obstruction;
pub mod powerop;
pub mod reduction;
pub mod ring;

pub use error::{Error, Result};
pub use fgl::FglContext;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/formal-groups.md")]
    mod formal_groups {}
    #[doc = include_str!("../../../book/src/power-operation.md")]
    mod power_operation {}
    #[doc = include_str!("../../../book/src/reduction.md")]
    mod reduction {}
    #[doc = include_str!("../../../book/src/obstructions.md")]
    mod obstructions {}
}
