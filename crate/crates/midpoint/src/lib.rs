//! Midpoint subdivision of arbitrary degree on polygon meshes, with spectral
//! analysis of the subdivision operator around extraordinary vertices and a
//! numerical C1 certification of the limit surface.

pub mod charmap;
pub mod eigen;
pub mod io;
pub mod mesh;
pub mod report;
pub mod ringnet;
pub mod scalar;
pub mod spectral;
pub mod stencil;
