//! Combinatorial log geometry at desk scale.
//!
//! The crate is layered bottom-up: [`lattice`] provides exact integer linear
//! algebra, [`cone`] rational polyhedral cones, [`monoid`] fine and saturated
//! monoids with fs pushouts, [`conecomplex`] generalized cone complexes and
//! their subdivisions, [`logmodel`] small log smooth schemes described by
//! their Artin fan and log Hodge numbers, [`hkr`] the Hochschild calculators
//! built on top of them and [`orbifold`] firm finite group actions.

pub mod cone;
pub mod conecomplex;
pub mod hkr;
pub mod lattice;
pub mod logmodel;
pub mod monoid;
pub mod orbifold;
