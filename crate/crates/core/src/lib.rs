pub mod polyring;
pub mod invariants;
pub mod cremona;
pub mod multiplicity;
pub mod verify;
pub mod cli;
