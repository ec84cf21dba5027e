use crate::error::{Error, Result};

/// Repulsion strength `beta >= 0` shared by both walks.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RepulsionParams {
    beta: f64,
}

/// The bifurcation point: the center loses stability above it.
pub const CRITICAL_BETA: f64 = 2.0;

impl RepulsionParams {
    pub fn new(beta: f64) -> Result<Self> {
        if beta.is_finite() && beta >= 0.0 {
            Ok(Self { beta })
        } else {
            Err(Error::Domain {
                what: "beta",
                value: beta,
            })
        }
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_critical(&self) -> bool {
        self.beta == CRITICAL_BETA
    }

    pub fn is_supercritical(&self) -> bool {
        self.beta > CRITICAL_BETA
    }
}
