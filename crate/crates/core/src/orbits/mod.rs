//! Discriminant forms, lagrangian subgroups and double orbits of rational
//! isometries.

mod discriminant;
mod double_orbit;

pub use discriminant::{
    coprime_factor_pairs, discriminant_module, enumerate_lagrangians, lagrangian_from_pair,
    lagrangian_intersection_order, u_case_module, u_case_sublattice, Element, FiniteQuadraticModule,
    ModuleSubgroup, DEFAULT_CAP,
};
pub use double_orbit::{
    canonicalize_reduction, congruence_orbit_test, double_orbit_reduce, embedded_pair_isometry,
    same_double_orbit_witness, u_diagonal_isometry, u_double_orbit_canonical, u_double_orbit_decompose,
    u_integral_isometries, DoubleOrbitReduction, UCanonicalPair,
};
