pub mod check;
pub mod family;
pub mod lemma;
pub mod search;
pub mod verify;
