//! Exact combinatorics of Newton polygons of one-dimensional formal O-modules.
//!
//! The crate works entirely over exact rationals. It covers piecewise-linear
//! convex functions and their Legendre duals, Newton polygons of
//! multiplication by π with their Herbrand functions, the standard apartment
//! of the Bruhat–Tits building of PGL_n, a brute-force model of the torsion
//! module used as an oracle, Hecke operators on polygon space, the
//! piecewise-affine bijection between polygons and a quartier, the Iwahori
//! simplex, and ball components of ultrametric root data.
//!
//! Indices in the library API are 0-based; the text formats and the CLI use
//! 1-based indices wherever an index is written out.

pub mod building;
pub mod error;
pub mod field;
pub mod hecke;
pub mod iwahori;
pub mod linalg;
pub mod newton;
pub mod plconvex;
pub mod polyhedron;
pub mod random;
pub mod rational;
pub mod selftest;
pub mod skeleton;
pub mod svg;
pub mod torsion;
pub mod ultrametric;

pub use error::{Error, Result};
pub use rational::{ExtRational, Rational};
