//! Exact construction and verification of polar cylinders on Du Val del
//! Pezzo surfaces of degree at least three.
//!
//! Divisor classes live in Pic of the minimal resolution, written in the
//! blow-up basis e0, e1, ..., ek. Classes on the singular surface are the
//! root-orthogonal representatives obtained by Mumford pullback.

pub mod catalog;
pub mod cylinder;
pub mod error;
pub mod fibration;
pub mod lattice;
pub mod linalg;
pub mod linsys;
pub mod rational;
pub mod sample;
pub mod surface;
pub mod verify;

pub use catalog::{catalog, catalog_surface, regenerate_table, table_row, CatalogEntry};
pub use cylinder::{
    choose_epsilon, construct_cylinder, construct_cylinder_with, coords_of, d_rsprime, AmpleDivisor,
    CylinderCertificate, Options, Pattern, Planner,
};
pub use error::{Error, Result};
pub use fibration::{
    decompose_fibers, fiber_groups, find_fibrations, select_fibration, FiberKind, FibrationData,
    Signature, SingularFiber,
};
pub use lattice::{canonical_class, enumerate_classes, pair, DivisorClass};
pub use rational::Q;
pub use surface::{
    build_surface, dynkin_type, is_ample, mumford_pullback, ClassOnS, SurfaceModel, SurfaceSpec,
};
pub use verify::{verify_certificate, VerifyReport};
