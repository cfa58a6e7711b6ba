//! Exact-arithmetic engine for the wall-and-chamber structure of Bridgeland
//! stability parameters on the algebraic Mukai lattice of an abelian or K3
//! surface: lattice pairing and beta-frame algebra, central charges and
//! phases, wall enumeration, Fourier-Mukai actions on parameters, the large
//! volume (star) conditions, and q-weighted wall-crossing sums.
//!
//! Everything is computed over arbitrary-precision rationals; wall membership
//! is an equality test, so no floating point enters until SVG rendering.
//!
//! Module map:
//! * [`surface`], [`mukai`]: lattice data, pairing, beta frames (`mukai_core`)
//! * [`lattice_enum`]: short-vector enumeration in negative definite cosets
//! * [`charge`]: central charge, sigma bracket, phase order (`central_charge`)
//! * [`walls`]: walls for categories/stabilities, chambers (`wall_engine`)
//! * [`fm`]: Fourier-Mukai lattice isometries and parameter maps (`fm_action`)
//! * [`star`]: the numerical large-volume conditions (`star_conditions`)
//! * [`qpoly`], [`wallcross`]: q-polynomials and weighted crossing sums
//! * [`config`], [`svg`]: CLI-facing serialization and diagrams

pub mod charge;
pub mod config;
pub mod error;
pub mod fm;
pub mod lattice_enum;
pub mod mukai;
pub mod qpoly;
pub mod ratio;
pub mod star;
pub mod surface;
pub mod svg;
pub mod wallcross;
pub mod walls;

pub use error::{Error, Result};
pub use mukai::{BetaDecomposition, BetaFrame, MukaiVector};
pub use ratio::Rat;
pub use surface::{NSClass, SurfaceData, SurfaceKind};
