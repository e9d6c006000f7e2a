pub mod error;
pub mod euler_local;
pub mod hecke_characters;
pub mod iwasawa_series;
pub mod lambda_hecke;
pub mod padic_core;
pub mod theta_families;
pub mod triple_product;
pub mod quadfield;
pub mod tate_curve;
pub mod cli_io;

pub use error::{Error, Result};

// Compile and run the book's code blocks as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/padic.md")]
    mod padic {}
    #[doc = include_str!("../../../book/src/characters.md")]
    mod characters {}
    #[doc = include_str!("../../../book/src/theta.md")]
    mod theta {}
    #[doc = include_str!("../../../book/src/ordinary.md")]
    mod ordinary {}
    #[doc = include_str!("../../../book/src/triple.md")]
    mod triple {}
    #[doc = include_str!("../../../book/src/euler.md")]
    mod euler {}
    #[doc = include_str!("../../../book/src/tate.md")]
    mod tate {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
