//! orbitforge: mapping class group orbits of totally elliptic representations
//! of punctured spheres, computed through hyperbolic triangle chains.
//!
//! The library is organised bottom-up:
//!
//! - [`hyperbolic`]: upper half-plane model, PSL(2,R) isometries, elliptic
//!   closed forms (rotation angle, fixed point), hyperbolic trigonometry.
//! - [`surface`]: sphere presentations, the pair-twist generating set,
//!   twist words and the sigma-to-tau rewriting.
//! - [`chains`]: angle vectors, the moment polytope, action-angle coordinates
//!   and the triangle-chain builder/extractor.
//! - [`representation`]: holonomy representations from chains, algebraic and
//!   geometric twist actions.
//! - [`orbits`]: breadth-first orbit enumeration, canonical point keys,
//!   golden-table verification and rational-angle membership reports.
//! - [`trigfields`]: trigonometric number fields Q(cos(pi/N)), exact
//!   membership of 2cos(pi p/q), angle lists, doubling orbits, and the
//!   discrete-triangle-group table.
//! - [`fricke`]: Fricke quartic coefficients, Okamoto transformations,
//!   trace-quadruple variants, the SL(2,R)-lifting criterion and the
//!   trace-to-angle-vector conversion.
//! - [`render`]: SVG rendering of chains in the half-plane and disk models.
//! - [`cli`]: the command-line front end (run configuration + subcommands).

pub mod chains;
pub mod cli;
pub mod fricke;
pub mod hyperbolic;
pub mod orbits;
pub mod render;
pub mod representation;
pub mod surface;
pub mod trigfields;

pub use chains::{ActionAngle, Angle, AngleVector, RationalAngle, TriangleChain};
pub use hyperbolic::{HPoint, Isometry, IsometryClass};
pub use representation::{Representation, TwistDirection};
pub use surface::{TwistGen, TwistWord};
