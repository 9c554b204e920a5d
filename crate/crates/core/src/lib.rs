pub mod dyadic;
pub mod spreads;
pub mod reals;
pub mod fleeing;
pub mod drift;
pub mod logic;
pub mod derivation;
pub mod cli;
