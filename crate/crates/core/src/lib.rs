//! Measures induced by words on finite groups and on SO(3).
//!
//! Substitute independent uniform elements into a word and record where the product
//! lands. For finite groups the distribution is enumerated exactly and, when the word
//! glues up to a closed surface, compared against a character formula. For rotations
//! the density at the identity is estimated by sampling.
//!
//! ```
//! use wordmeasure::{group::preset, measure::brute_force_distribution, word::parse_word};
//!
//! let s3 = preset("S3").unwrap();
//! let d = brute_force_distribution(&s3, &parse_word("[a,b]").unwrap()).unwrap();
//! assert_eq!(d.solutions(), 18);
//! ```

pub mod characters;
pub mod cli;
pub mod complex;
pub mod divisibility;
pub mod group;
pub mod measure;
pub mod so3;
pub mod word;
pub mod zeta;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/words.md")]
mod book_words {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/surfaces.md")]
mod book_surfaces {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/groups-characters.md")]
mod book_groups_characters {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/measures.md")]
mod book_measures {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/zeta.md")]
mod book_zeta {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/so3.md")]
mod book_so3 {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/divisibility.md")]
mod book_divisibility {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
