//! Finite fibred sites and the homotopy theory of presheaves of groupoids.
//!
//! Everything here works on explicit finite data: categories are stored with
//! full composition tables, presheaves with explicit action maps, simplicial
//! sets as truncated face/degeneracy tables. The crate is `no_std` and only
//! needs an allocator; parsing, file formats and the command line live in the
//! companion `fibsite` crate.
//!
//! Module map:
//!
//! * [`fincat`]: finite categories, functors, groupoids, comma categories,
//!   connected components, set-valued colimits and left Kan extensions.
//! * [`site`]: sieves, Grothendieck topologies, the sheaf condition and the
//!   plus construction.
//! * [`fibred`]: presheaves of categories, the Grothendieck construction and
//!   its induced topology, enriched diagrams and the functors between them.
//! * [`sset`]: truncated simplicial sets, nerves, bisimplicial diagonals,
//!   integer homology and weak-equivalence evidence.
//! * [`hocopb`]: the homotopy colimit / pullback adjunction over groupoids,
//!   both for a single groupoid and section by section.
//! * [`cohom`]: cochain complexes of finite categories with finitely generated
//!   abelian coefficients, stack cohomology, Čech cohomology and the
//!   invariance harness.
//! * [`random`]: seedable generators of finite instances.
#![no_std]

extern crate alloc;

pub mod cohom;
pub mod error;
pub mod fibred;
pub mod fincat;
pub mod hocopb;
pub mod random;
pub mod site;
pub mod sset;

mod util;

pub use error::{Error, Result};
