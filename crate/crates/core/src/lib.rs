//! Quantum probabilities of separate, consecutive and composite events.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure numerical
//! code: a small dense complex linear-algebra kernel ([`linalg`]), the event
//! vocabulary ([`events`]), single-space measurement calculus ([`measure`]),
//! tensor-product composite events and prospects ([`composite`]), the
//! multichannel measurement pipeline ([`channels`]), the entanglement
//! production measure ([`entangle`]), the prisoner-dilemma quantum game
//! ([`game`]) and multimode Schrödinger dynamics ([`dynamics`]).
//!
//! All values are immutable after construction and all operations are pure
//! functions, so everything here is safe to share across threads.
#![no_std]

extern crate alloc;

pub mod channels;
pub mod composite;
pub mod dynamics;
pub mod entangle;
pub mod error;
pub mod events;
pub mod game;
pub mod linalg;
pub mod measure;
pub mod numeric;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector, C64};
