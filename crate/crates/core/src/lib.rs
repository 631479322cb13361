#![no_std]

extern crate alloc;

pub mod gauge;
pub mod localize;
pub mod models;
pub mod nctorus;
pub mod numerics;
pub mod report;
pub mod spectral;
pub mod staralg;
pub mod toric;
