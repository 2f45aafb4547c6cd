//! Segmentation and alignment of hand-demonstration trajectories.
//!
//! The pipeline runs in four stages, each in its own module:
//!
//! - [`trajectory`]: pose tracks, moving-average smoothing, speed profiles
//! - [`splitter`]: change points at local minima of hand speed, plus a
//!   uniform-period baseline
//! - [`lexdist`]: word embeddings and exact Word Mover's Distance between
//!   short sentences
//! - [`matcher`]: dynamic-programming alignment of segment descriptions to
//!   an ordered instruction script, with grouping and skipping
//!
//! [`geomfit`] recovers prismatic or revolute articulation parameters from
//! the hand path inside a matched interval, and [`evalkit`] holds the
//! change-point and IoU/AP scoring plus a synthetic demonstration generator.
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the CLI
//! live in the `demoseg` crate.

#![no_std]

extern crate alloc;

mod error;

pub mod evalkit;
pub mod geomfit;
pub mod lexdist;
pub mod matcher;
pub mod splitter;
pub mod trajectory;

pub use error::{Error, Result};

/// A point or direction in camera coordinates, meters.
pub type Vec3 = [f64; 3];

pub(crate) mod vec3 {
    use super::Vec3;

    #[inline]
    pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }

    #[inline]
    pub fn add(a: Vec3, b: Vec3) -> Vec3 {
        [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
    }

    #[inline]
    pub fn scale(a: Vec3, c: f64) -> Vec3 {
        [a[0] * c, a[1] * c, a[2] * c]
    }

    #[inline]
    pub fn dot(a: Vec3, b: Vec3) -> f64 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    #[inline]
    pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    #[inline]
    pub fn norm(a: Vec3) -> f64 {
        libm::sqrt(dot(a, a))
    }

    #[inline]
    pub fn is_finite(a: Vec3) -> bool {
        a.iter().all(|c| c.is_finite())
    }
}
