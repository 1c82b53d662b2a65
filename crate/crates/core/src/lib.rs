#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod graft;
pub mod hyp2;
pub mod lifts;
pub mod real;
pub mod spacetime;
pub mod surface;
pub mod thurston;
pub mod twist;
pub mod word;
