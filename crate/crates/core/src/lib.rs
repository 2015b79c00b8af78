//! Pixel-based perceptual image encryption for privacy-preserving training.
//!
//! * [`keying`]: SplitMix64 keystreams, key sets and key files.
//! * [`pixel`]: negative-positive transformation and color shuffling.
//! * [`block`]: block-based baselines (Tanaka-style and EtC-style).
//! * [`augment`]: flips, shifts and pad-crop on plain or encrypted images.
//! * [`imageio`]: PPM and CIFAR-10 binary batch codecs.
//! * [`keyspace`]: key-space sizes and a toy brute-force enumerator.
//! * [`adaptnet`]: 1x1-convolution adaptation network, gradient checks and a
//!   pattern-learning surrogate.
//! * [`cli`]: the `pixcrypt` commands.

pub mod adaptnet;
pub mod augment;
pub mod block;
pub mod cli;
pub mod error;
pub mod image;
pub mod imageio;
pub mod keying;
pub mod keyspace;
pub mod pixel;
pub mod scheme;

pub use error::{Error, Result};
pub use image::PlanarImage;
pub use keying::{KeySet, KeystreamPlanes};
pub use pixel::CipherConfig;
pub use scheme::Scheme;
