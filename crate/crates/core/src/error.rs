use std::io;

use thiserror::Error;

/// Errors produced by the ciphers, codecs and numeric core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimensions must be non-zero, got {width}x{height}")]
    ZeroDimensions { width: usize, height: usize },

    #[error("dimension mismatch: expected {expected_w}x{expected_h}, got {got_w}x{got_h}")]
    DimensionMismatch {
        expected_w: usize,
        expected_h: usize,
        got_w: usize,
        got_h: usize,
    },

    #[error("image {width}x{height} is not divisible into {block_w}x{block_h} blocks")]
    NotBlockAligned {
        width: usize,
        height: usize,
        block_w: usize,
        block_h: usize,
    },

    #[error("channel plane has {got} samples, expected {expected}")]
    PlaneLength { expected: usize, got: usize },

    #[error("color shuffling requested but the keystream has no shuffle codes")]
    MissingShuffleCodes,

    #[error("color shuffling requested but the key set has no KS seed")]
    MissingShuffleKey,

    #[error("invalid keystream: {0}")]
    Keystream(String),

    #[error("invalid key file: {0}")]
    KeyFile(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid PPM: {0}")]
    Ppm(String),

    #[error("invalid CIFAR-10 batch: {0}")]
    Cifar(String),

    #[error("invalid augmentation: {0}")]
    Augment(String),

    #[error("brute-force domain of {candidates} candidates exceeds the limit of {limit}")]
    DomainTooLarge { candidates: u128, limit: u128 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid training setup: {0}")]
    Training(String),

    #[error("invalid checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
