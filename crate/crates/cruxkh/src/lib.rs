//! Universal Khovanov homology for singular link diagrams, computed with
//! exact arithmetic, together with the crux-complex reduction of the first
//! Vassiliev derivative.
//!
//! The pipeline: [`diagram`] describes oriented singular link diagrams,
//! [`smoothing`] resolves them into circle collections, [`frobenius`] carries
//! the rank-2 Frobenius algebra `C_{h,t} = k[x]/(x^2 - hx - t)` driving the
//! TQFT, [`mcomplex`] provides multi-fold complexes and their total
//! complexes, [`khovanov`] assembles the cube of smoothings, [`crux`] builds
//! the crux complex, the connecting map `Xi` and its mapping cone, and
//! [`jones`] handles Laurent-polynomial invariants. Homology itself is
//! Smith-normal-form based and lives in [`exactalg`].

pub mod corpus;
pub mod crux;
pub mod diagram;
pub mod exactalg;
pub mod frobenius;
pub mod jones;
pub mod khovanov;
pub mod mcomplex;
pub mod report;
pub mod smoothing;
