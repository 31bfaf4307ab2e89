//! Stock market for the fossil firm's shares.
//!
//! Investors hold their wealth either in the fossil firm or in an alternative
//! asset. Once a month a random subset of them re-evaluates the share against
//! its price and shifts everything into the preferred asset. A market maker
//! takes the other side of every trade and moves the price multiplicatively
//! in proportion to the net share flow.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Investor {
    pub id: usize,
    /// Socially responsible (divests unconditionally once convinced).
    pub responsible: bool,
    /// Convinced that strong carbon policy will come.
    pub convinced: bool,
    pub shares: f64,
    /// Wealth held in the alternative asset.
    pub cash: f64,
    pub last_income: f64,
}

impl Investor {
    pub fn wealth(&self, price: f64) -> f64 {
        self.shares * price + self.cash
    }

    /// Convinced responsible investors never hold the fossil share again and
    /// never lose their conviction.
    pub fn is_committed(&self) -> bool {
        self.responsible && self.convinced
    }

    /// Share value this investor believes in.
    pub fn assessed_value(&self, npv_unconstrained: f64, npv_constrained: f64) -> f64 {
        if self.convinced {
            npv_constrained
        } else {
            npv_unconstrained
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Fossil,
    Alternative,
}

/// Buy iff the assessed value strictly exceeds the price, unless the investor
/// is a convinced responsible one.
pub fn investment_decision(
    investor: &Investor,
    npv_unconstrained: f64,
    npv_constrained: f64,
    price: f64,
) -> Decision {
    if investor.is_committed() {
        return Decision::Alternative;
    }
    if investor.assessed_value(npv_unconstrained, npv_constrained) > price {
        Decision::Fossil
    } else {
        Decision::Alternative
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlternativeAsset {
    /// Mean monthly yield.
    pub mean_return: f64,
    /// Relative amplitude of the uniform yield noise.
    pub noise: f64,
}

impl Default for AlternativeAsset {
    fn default() -> Self {
        AlternativeAsset {
            mean_return: 0.0079,
            noise: 0.1,
        }
    }
}

impl AlternativeAsset {
    pub fn validate(&self) -> Result<()> {
        if !(self.mean_return.is_finite() && self.mean_return > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "alt.mean_return must be > 0, got {}",
                self.mean_return
            )));
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "alt.noise must be >= 0, got {}",
                self.noise
            )));
        }
        Ok(())
    }

    pub fn sample_yield<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.noise == 0.0 {
            return self.mean_return;
        }
        let u: f64 = rng.gen_range(-1.0..=1.0);
        self.mean_return * (1.0 + self.noise * u)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketState {
    pub price: f64,
    /// Shares held by investors; the market maker holds the rest.
    pub held: f64,
    pub issued: f64,
    /// Share flow not yet priced in, applied at the next trading round in
    /// lots of one investor's endowment.
    pub pending_flow: f64,
}

impl MarketState {
    pub fn maker_inventory(&self) -> f64 {
        (self.issued - self.held).max(0.0)
    }

    /// Multiplicative price impact: `price * (1 + mu * delta / N)`, floored
    /// at zero.
    pub fn update_price(&mut self, delta_shares: f64, mu: f64) {
        if delta_shares == 0.0 {
            return;
        }
        self.price = (self.price * (1.0 + mu * delta_shares / self.issued)).max(0.0);
    }
}

/// Shift an investor's whole position according to `decision`. Returns the
/// signed change in investor-held shares.
///
/// Purchases are limited by the market maker's inventory; wealth that cannot
/// be placed stays in the alternative asset.
pub fn execute_trade(investor: &mut Investor, decision: Decision, market: &mut MarketState) -> f64 {
    let delta = match decision {
        Decision::Fossil => {
            let inventory = market.maker_inventory();
            if investor.cash <= 0.0 || inventory <= 0.0 {
                return 0.0;
            }
            let wanted = if market.price > 0.0 {
                investor.cash / market.price
            } else {
                f64::INFINITY
            };
            if wanted <= inventory {
                investor.cash = 0.0;
                wanted
            } else {
                investor.cash -= inventory * market.price;
                if investor.cash < 0.0 {
                    investor.cash = 0.0;
                }
                inventory
            }
        }
        Decision::Alternative => {
            if investor.shares <= 0.0 {
                return 0.0;
            }
            investor.cash += investor.shares * market.price;
            -investor.shares
        }
    };
    investor.shares = if decision == Decision::Alternative {
        0.0
    } else {
        investor.shares + delta
    };
    market.held = (market.held + delta).clamp(0.0, market.issued);
    delta
}

/// Pay one month of dividends. Fossil dividends are zero for a firm that no
/// longer operates. Income is recorded; with `reinvest` it is also added to
/// the investor's alternative-asset account.
pub fn pay_dividends<R: Rng + ?Sized>(
    investors: &mut [Investor],
    dividend_per_share: f64,
    alt: &AlternativeAsset,
    reinvest: bool,
    rng: &mut R,
) {
    for inv in investors {
        let fossil = inv.shares * dividend_per_share;
        let alternative = if inv.cash > 0.0 {
            inv.cash * alt.sample_yield(rng)
        } else {
            0.0
        };
        inv.last_income = fossil + alternative;
        if reinvest {
            inv.cash += inv.last_income;
        }
    }
}

/// Inputs to a trading round that are fixed for its duration.
#[derive(Debug, Clone, Copy)]
pub struct TradingParams {
    pub rho: f64,
    pub mu: f64,
    pub npv_unconstrained: f64,
    pub npv_constrained: f64,
    /// Convinced responsible investors still holding shares trade every
    /// round, regardless of `rho`.
    pub immediate_divestment: bool,
}

/// One month of trading. Each investor is activated with probability `rho`;
/// activated investors trade in random order and every trade moves the price
/// before the next investor looks at it. Returns the number of trades that
/// changed a position.
pub fn trading_round<R: Rng + ?Sized>(
    investors: &mut [Investor],
    market: &mut MarketState,
    params: &TradingParams,
    rng: &mut R,
) -> usize {
    if market.pending_flow != 0.0 {
        // priced in as a sequence of trades the size of one investor's
        // endowment, not as one block that would wipe out the price
        let mut flow = std::mem::take(&mut market.pending_flow);
        let lot = market.issued / investors.len().max(1) as f64;
        while flow.abs() > 0.0 {
            let step = flow.clamp(-lot, lot);
            market.update_price(step, params.mu);
            flow -= step;
        }
    }
    let mut active: Vec<usize> = (0..investors.len())
        .filter(|&i| {
            let drawn = rng.gen_bool(params.rho);
            let inv = &investors[i];
            drawn || (params.immediate_divestment && inv.is_committed() && inv.shares > 0.0)
        })
        .collect();
    active.shuffle(rng);

    let mut trades = 0;
    for i in active {
        let inv = &mut investors[i];
        let decision = investment_decision(
            inv,
            params.npv_unconstrained,
            params.npv_constrained,
            market.price,
        );
        let delta = execute_trade(inv, decision, market);
        if delta != 0.0 {
            market.update_price(delta, params.mu);
            trades += 1;
        }
    }
    trades
}
