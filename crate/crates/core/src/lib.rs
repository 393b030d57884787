#![allow(clippy::should_implement_trait)]
pub mod corpus;
pub mod encoder;
pub mod eval;
pub mod fo;
pub mod tm;
pub mod translate;
