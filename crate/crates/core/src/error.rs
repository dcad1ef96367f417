use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Gradient vanished; only happens at a body's center.
    #[error("surface normal is zero (query at the body center)")]
    ZeroNormal,

    /// Obstacle and workspace normals are parallel (tangential contact).
    #[error("obstacle and workspace normals are parallel")]
    ParallelNormals,

    #[error("basis matrix is singular (|det| = {det:e})")]
    SingularBasis { det: f64 },

    #[error("matrix is rank deficient")]
    RankDeficient,

    /// Weight denominator collapsed: the point sits on the intersection line.
    #[error("weight denominator {denominator:e} below guard; intersection mode must govern")]
    NearIntersectionSingularity { denominator: f64 },

    #[error("point out of domain: {0}")]
    OutOfDomain(String),

    #[error("containment guard could not satisfy both constraints (gamma_w = {gamma_w}, gamma_o = {gamma_o})")]
    GuardConflict { gamma_w: f64, gamma_o: f64 },

    #[error("invalid start: {0}")]
    InvalidStart(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Short stable token used when an error ends a trajectory.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::ZeroNormal => "zero_normal",
            Error::ParallelNormals => "parallel_normals",
            Error::SingularBasis { .. } => "singular_basis",
            Error::RankDeficient => "rank_deficient",
            Error::NearIntersectionSingularity { .. } => "near_intersection",
            Error::OutOfDomain(_) => "out_of_domain",
            Error::GuardConflict { .. } => "guard_conflict",
            Error::InvalidStart(_) => "invalid_start",
            Error::Parse { .. } => "parse",
            Error::Validation { .. } => "validation",
            Error::Io(_) => "io",
        }
    }

    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
