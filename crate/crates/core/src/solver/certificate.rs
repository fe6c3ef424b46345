use serde::Serialize;

use crate::doublephase::ProblemInstance;
use crate::error::Result;
use crate::manifold::ScalarField;
use crate::orlicz::luxemburg_norm;

pub const NONNEGATIVITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate {
    pub min_u: f64,
    /// Luxemburg norm of `min(0, u)` in `L^{p(.)}`.
    pub negative_part_norm: f64,
    pub pass: bool,
}

pub fn nonnegativity_certificate(pb: &ProblemInstance, u: &ScalarField) -> Result<Certificate> {
    let neg = u.map(|v| v.min(0.0));
    let min_u = u.min();
    Ok(Certificate {
        min_u,
        negative_part_norm: luxemburg_norm(&neg, &pb.exps.p, &pb.metric)?,
        pass: min_u >= -NONNEGATIVITY_TOL,
    })
}
