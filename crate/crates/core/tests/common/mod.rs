#![allow(dead_code)]

pub mod exact;
