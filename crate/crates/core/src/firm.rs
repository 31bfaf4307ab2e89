//! The representative fossil-fuel firm.
//!
//! The firm extracts `q` units per month from a reserve that is replenished
//! by exploration at `x` units per month. Every unit extracted is also
//! charged against a remaining carbon budget. The firm stops operating when
//! the reserve runs out, when a binding carbon policy meets an exhausted
//! budget, or when the engine delists it after a price collapse.
//!
//! Stock quantities are derived from the number of months operated rather
//! than accumulated step by step, so `budget + cce == b0` holds to the last
//! bit for any parameter choice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirmParams {
    /// Initial reserve, GtCO2-equivalent.
    pub r0: f64,
    /// Initial carbon budget, GtCO2.
    pub b0: f64,
    /// Extraction per month.
    pub q: f64,
    /// Exploration per month.
    pub x: f64,
    /// Net fuel price (market price minus extraction and exploration costs).
    pub net_price: f64,
    /// Shares issued.
    pub shares: f64,
    /// Monthly discount rate.
    pub discount: f64,
}

impl Default for FirmParams {
    fn default() -> Self {
        FirmParams {
            r0: 500.0,
            b0: 250.0,
            q: 2.5,
            x: 2.5,
            net_price: 10.0,
            shares: 1000.0,
            discount: 0.005,
        }
    }
}

impl FirmParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("firm.r0", self.r0),
            ("firm.b0", self.b0),
            ("firm.q", self.q),
            ("firm.net_price", self.net_price),
            ("firm.shares", self.shares),
            ("firm.discount", self.discount),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if !(self.x.is_finite() && self.x >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "firm.x must be finite and >= 0, got {}",
                self.x
            )));
        }
        Ok(())
    }

    /// Expected dividend per share, `q * p / N`.
    pub fn dividend_per_share(&self) -> f64 {
        self.q * self.net_price / self.shares
    }

    /// Discounted value of a share if `stock` units remain extractable.
    ///
    /// `DPS * (1 - exp(-r * stock / q)) / r`, zero for a nonpositive stock.
    /// Bounded above by the perpetuity value `DPS / r`.
    pub fn npv_of_stock(&self, stock: f64) -> f64 {
        if stock <= 0.0 {
            return 0.0;
        }
        let horizon = self.discount * stock / self.q;
        self.dividend_per_share() * -(-horizon).exp_m1() / self.discount
    }

    /// `DPS / r`, the value of an infinite reserve.
    pub fn perpetuity_value(&self) -> f64 {
        self.dividend_per_share() / self.discount
    }
}

/// Why the firm stopped extracting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shutdown {
    ReserveExhausted,
    BudgetEnforced,
    Delisted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirmState {
    pub reserve: f64,
    /// Remaining carbon budget; negative once overshot.
    pub budget: f64,
    /// Cumulative carbon emissions.
    pub cce: f64,
    pub operating: bool,
    pub delisted: bool,
    pub months_operated: u32,
    pub shutdown: Option<Shutdown>,
}

impl FirmState {
    pub fn new(params: &FirmParams) -> Self {
        FirmState {
            reserve: params.r0,
            budget: params.b0,
            cce: 0.0,
            operating: true,
            delisted: false,
            months_operated: 0,
            shutdown: None,
        }
    }

    /// Unconstrained share value, computed on the full reserve. Zero once the
    /// firm has stopped operating.
    pub fn npv_unconstrained(&self, params: &FirmParams) -> f64 {
        if !self.operating {
            return 0.0;
        }
        params.npv_of_stock(self.reserve)
    }

    /// Share value when only the remaining carbon budget can be burned.
    pub fn npv_constrained(&self, params: &FirmParams) -> f64 {
        if !self.operating {
            return 0.0;
        }
        params.npv_of_stock(self.budget)
    }

    /// One month of extraction and exploration.
    ///
    /// The full `q` is extracted in the month a stopping boundary is crossed.
    ///
    /// # Panics
    ///
    /// If the firm is not operating.
    pub fn step_extraction(&mut self, params: &FirmParams, policy_in_force: bool) {
        assert!(self.operating, "step_extraction on a firm that stopped operating");
        self.months_operated += 1;
        let t = f64::from(self.months_operated);
        self.cce = params.q * t;
        self.budget = params.b0 - self.cce;
        self.reserve = params.r0 + (params.x - params.q) * t;
        if self.reserve <= 0.0 {
            self.stop(Shutdown::ReserveExhausted);
        } else if policy_in_force && self.budget <= 0.0 {
            self.stop(Shutdown::BudgetEnforced);
        }
    }

    /// Stop for good once a binding policy meets an exhausted budget, without
    /// extracting further.
    pub fn enforce_policy(&mut self) {
        if self.operating && self.budget <= 0.0 {
            self.stop(Shutdown::BudgetEnforced);
        }
    }

    pub fn delist(&mut self) {
        self.delisted = true;
        if self.operating {
            self.stop(Shutdown::Delisted);
        }
    }

    fn stop(&mut self, why: Shutdown) {
        self.operating = false;
        self.shutdown = Some(why);
    }
}
