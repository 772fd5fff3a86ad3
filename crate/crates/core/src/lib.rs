pub mod biorder;
pub mod endo;
pub mod error;
pub mod group;
pub mod lemmas;
pub mod maxsub;
pub mod rees;
pub mod structure;
pub mod words;
