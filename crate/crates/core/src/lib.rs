//! Double-cone degenerations of hypersurfaces over finite fields:
//! polynomials with Laurent parameter coefficients, the base-case and
//! inductive constructions, irreducibility testing, torsion-order bounds,
//! and the chain-skeleton obstruction maps.

pub mod coeff;
pub mod poly;
pub mod factor;
pub mod report;
pub mod base_case;
pub mod double_cone;
pub mod bounds;
pub mod skeleton;
pub mod state_file;
