//! Intrinsic differential operators on triangle meshes by local tangential
//! lifting, and explicit solvers for diffusion and Turing reaction-diffusion
//! on closed surfaces.

pub mod mesh;
pub mod ltl;
pub mod dsl;
pub mod oracle;
pub mod solver;
