//! Turing machines over the alphabet `{0, 1, 3}` and their simulation by analytic
//! iterations on the radix-4 encoding `Gamma(w) = sum w_n 4^-(n+1)`.
//!
//! [`NextMap`] is one machine step on encoded configurations, [`exec_time`] and
//! [`exec_space`] iterate it as discrete ODEs, and the converters move between integers,
//! their digit encodings and real multiples ([`decode_int`], [`encode_mul`]).
//! [`barycentric_eval`] combines them into a real function evaluator.

mod bary;
mod convert;
mod machine;
pub mod machines;
mod next;

use thiserror::Error;

pub use bary::{
    barycentric_eval, barycentric_reference, identity_machine, int_config, BaryResult,
    DiscreteApproximator, MachineApproximator, ScaledIdentity, DEFAULT_GUARD,
};
pub use convert::{
    decode_ball, decode_enclosure, decode_int, digits_encode_dyadic, digits_encode_int,
    dyadic_blocks, encode_int_exact, encode_int_padded, encode_mul, encode_mul_bounded, int_blocks,
    product_exact, LAMBDA_BOUND,
};
pub use machine::{
    decode_word, encode_word, parse_word, reference_run, step_interpreter, word_to_string, Config,
    Deviation, EncodedConfig, Move, OracleError, Transition, TuringMachine, SYMBOLS,
};
pub use next::{
    exec_space, exec_space_trajectory, exec_time, exec_time_trajectory, ExecSystem, NextMap,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TuringError {
    #[error("symbol {0} is not in {{0, 1, 3}}")]
    InvalidSymbol(u8),
    #[error("character `{0}` is not a tape symbol (expected 0, 1 or 3)")]
    InvalidChar(char),
    #[error("machine needs at least one state")]
    NoStates,
    #[error("state {state} out of range 0..{states}")]
    StateOutOfRange { state: usize, states: usize },
    #[error("transition for ({state}, {symbol}) given twice")]
    DuplicateTransition { state: usize, symbol: u8 },
    #[error("no transition for ({state}, {symbol}); the transition function must be total")]
    MissingTransition { state: usize, symbol: u8 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("negative value {0} has no digit encoding")]
    NegativeValue(String),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("ftilde output has {bits} bits, more than the declared bound {bound}")]
    OutputTooLong { bits: u64, bound: u32 },
}
