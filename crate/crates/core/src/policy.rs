//! Stochastic arrival of strong carbon policy.
//!
//! Each month the policy comes into force with probability
//! `p_max * exp(-lambda * u)`, where `u` is the fraction of investors not
//! (yet) convinced that it will. The probability stays negligible until
//! nearly everyone is convinced and then approaches `p_max`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub lambda: f64,
    pub p_max: f64,
    /// Use the unscaled `exp(-lambda * u)` (which tends to 1, not `p_max`).
    pub unscaled: bool,
}

impl Default for PolicyParams {
    fn default() -> Self {
        PolicyParams {
            lambda: 20.0,
            p_max: 0.1,
            unscaled: false,
        }
    }
}

impl PolicyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "policy.lambda must be > 0, got {}",
                self.lambda
            )));
        }
        if !(self.p_max > 0.0 && self.p_max <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "policy.p_max must be in (0, 1], got {}",
                self.p_max
            )));
        }
        Ok(())
    }

    /// Monthly implementation probability for unconvinced fraction `u`.
    pub fn probability(&self, unconvinced: f64) -> f64 {
        let scale = if self.unscaled { 1.0 } else { self.p_max };
        scale * (-self.lambda * unconvinced.clamp(0.0, 1.0)).exp()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyState {
    pub in_force: bool,
    pub implementation_month: Option<u32>,
}

impl PolicyState {
    /// Draw this month's implementation event. Returns true if the policy
    /// came into force just now.
    pub fn sample<R: Rng + ?Sized>(
        &mut self,
        month: u32,
        unconvinced: f64,
        params: &PolicyParams,
        rng: &mut R,
    ) -> bool {
        if self.in_force {
            return false;
        }
        if rng.gen_bool(params.probability(unconvinced)) {
            self.in_force = true;
            self.implementation_month = Some(month);
            return true;
        }
        false
    }
}
