//! Translations around the functional machine calculus with values.
//!
//! * call-by-name and call-by-value translations of an effectful
//!   lambda-calculus;
//! * the free functor from the lambda-calculus with products and patterns
//!   into the sequential lambda-calculus, and its interpretation back;
//! * collapse of a memory onto the main stack, embedding at a location,
//!   and the isomorphisms `κ`, `κ⁻¹` between a memory and its collapse.

mod collapse;
pub mod lambda;
pub mod lgen;
mod slc;
mod strategy;

use fmc_term::Location;
use fmc_types::TypeError;
use thiserror::Error;

pub use collapse::{
    collapse, collapse_comp_type, collapse_derivation, collapse_memory, collapse_signature, collapse_value_type, embed,
    embed_comp_type, embed_memory, embed_value_type, higher_order_constants, kappa, kappa_at, kappa_inv, kappa_inv_at,
    kappa_type, LocationOrder,
};
pub use slc::{
    context_inputs, context_slots, free_functor, free_functor_type, interpret_slc, interpret_slc_with,
    lambda_signature, lambda_type, slc_signature, slots, stack_type,
};
pub use strategy::{
    cbn, cbn_comp_type, cbn_context, cbn_signature, cbn_type, cbv, cbv_comp_type, cbv_context, cbv_signature, cbv_type,
};

#[derive(Debug, Error, PartialEq)]
pub enum TranslateError {
    #[error("unsupported construct: {0}")]
    UnsupportedConstruct(String),
    #[error("ill-typed: {0}")]
    IllTyped(String),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("location {0} is not in the order")]
    UnknownLocation(Location),
    #[error("invalid location order: {0}")]
    InvalidOrder(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("out of fuel")]
    FuelExhausted,
}
