//! Standard position for (U₊, U₋), the representative V(b) and elements of its stabilizer.

pub mod generators;
pub mod layout;
pub mod normalize;

pub use generators::{is_sp_prime, sp_prime_form, sp_prime_transvection, RvContext, RvKind, TransvectionCase};
pub use layout::{precedes, Block, IndexLayout, EXCLUDED, PLUS_BLOCKS};
pub use normalize::{normalize_pair, representative, standard_pair, valid_b};
