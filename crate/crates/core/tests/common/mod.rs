#![allow(dead_code)]

pub mod bessel;
