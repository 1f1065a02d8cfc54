//! The four families of point sets and the forms that cut them out.

pub mod elliptic;
pub mod genglynn;
pub mod glynn;
pub mod nrc;

pub use elliptic::{elliptic_forms, elliptic_points, EllipticForms, EllipticParams};
pub use genglynn::{gen_glynn, gen_glynn_points, GenGlynn, GenGlynnParams};
pub use glynn::{glynn_certificates, glynn_forms, glynn_solve, CertificateReport, GlynnParams};
pub use nrc::{nrc_forms, nrc_points, NrcParams};
