//! Monthly scheduler tying the firm, market, social network and policy
//! process together.
//!
//! A month runs, in order: dividends, social interaction, trading, the
//! delisting check, extraction, and the policy draw. The state at the end of
//! the month is appended to the run's trajectory.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis;
use crate::config::SimConfig;
use crate::error::Result;
use crate::firm::FirmState;
use crate::market::{self, Investor, MarketState, TradingParams};
use crate::policy::PolicyState;
use crate::social::{self, init_small_world, Network};

/// Snapshot of one month. Month 0 is the initial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonthRow {
    pub month: u32,
    pub price: f64,
    /// Fraction of convinced investors.
    pub fci: f64,
    pub cce: f64,
    pub reserve: f64,
    pub budget: f64,
    pub policy: bool,
    pub held_shares: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunEvents {
    pub first_crash_month: Option<u32>,
    pub policy_month: Option<u32>,
    pub delisting_month: Option<u32>,
    /// First month in which the remaining budget is used up (`<= 0`).
    pub budget_exceeded_month: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub initial: MonthRow,
    /// Months `1..=horizon`.
    pub months: Vec<MonthRow>,
    pub events: RunEvents,
    pub final_cce: f64,
}

impl RunRecord {
    /// Prices indexed by month, starting with the opening price.
    pub fn price_series(&self) -> Vec<f64> {
        std::iter::once(self.initial.price)
            .chain(self.months.iter().map(|r| r.price))
            .collect()
    }

    /// All rows including month 0.
    pub fn rows(&self) -> impl Iterator<Item = &MonthRow> {
        std::iter::once(&self.initial).chain(self.months.iter())
    }

    pub fn row(&self, month: u32) -> Option<&MonthRow> {
        if month == 0 {
            Some(&self.initial)
        } else {
            self.months.get(month as usize - 1)
        }
    }
}

/// Complete state of one simulation.
#[derive(Debug, Clone)]
pub struct World {
    pub config: SimConfig,
    pub investors: Vec<Investor>,
    pub network: Network,
    pub market: MarketState,
    pub firm: FirmState,
    pub policy: PolicyState,
    pub month: u32,
    pub opening_price: f64,
    pub rng: ChaCha8Rng,
    initial: MonthRow,
    months: Vec<MonthRow>,
    delisting_month: Option<u32>,
}

fn round_count(fraction: f64, n: usize) -> usize {
    ((fraction * n as f64).round() as usize).min(n)
}

impl World {
    /// Build the initial state.
    ///
    /// All shares start in investors' hands at the unconstrained value of the
    /// full reserve. Each investor owns `L * N * s0 / I` worth of wealth; any
    /// excess over the share position sits in the alternative asset. With
    /// `L < 1` investors can only hold `L * N` shares: the rest stays with the
    /// market maker and is priced in when trading opens.
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let n = config.investors;

        let responsible = sample(&mut rng, n, round_count(config.sri_share, n));
        let convinced = sample(&mut rng, n, round_count(config.init_convinced, n));
        let network = init_small_world(
            n,
            config.social.k_ring,
            config.social.p_rewire_init,
            &mut rng,
        )?;

        let firm = FirmState::new(&config.firm);
        let s0 = firm.npv_unconstrained(&config.firm);
        let issued = config.firm.shares;
        let placed = issued * config.liquidity.min(1.0);
        let shares_each = placed / n as f64;
        let cash_each = (config.liquidity - 1.0).max(0.0) * issued * s0 / n as f64;

        let mut investors: Vec<Investor> = (0..n)
            .map(|id| Investor {
                id,
                responsible: false,
                convinced: false,
                shares: shares_each,
                cash: cash_each,
                last_income: 0.0,
            })
            .collect();
        for i in responsible.iter() {
            investors[i].responsible = true;
        }
        for i in convinced.iter() {
            investors[i].convinced = true;
        }

        let market = MarketState {
            price: s0,
            held: placed,
            issued,
            pending_flow: placed - issued,
        };

        let mut world = World {
            config: config.clone(),
            investors,
            network,
            market,
            firm,
            policy: PolicyState::default(),
            month: 0,
            opening_price: s0,
            rng,
            initial: MonthRow {
                month: 0,
                price: 0.0,
                fci: 0.0,
                cce: 0.0,
                reserve: 0.0,
                budget: 0.0,
                policy: false,
                held_shares: 0.0,
            },
            months: Vec::with_capacity(config.horizon as usize),
            delisting_month: None,
        };
        world.initial = world.snapshot();
        Ok(world)
    }

    pub fn fci(&self) -> f64 {
        if self.investors.is_empty() {
            return 0.0;
        }
        self.investors.iter().filter(|i| i.convinced).count() as f64 / self.investors.len() as f64
    }

    pub fn snapshot(&self) -> MonthRow {
        MonthRow {
            month: self.month,
            price: self.market.price,
            fci: self.fci(),
            cce: self.firm.cce,
            reserve: self.firm.reserve,
            budget: self.firm.budget,
            policy: self.policy.in_force,
            held_shares: self.market.held,
        }
    }

    pub fn is_finished(&self) -> bool {
        self.month >= self.config.horizon
    }

    /// Advance one month.
    pub fn step_month(&mut self) {
        let cfg = &self.config;
        self.month += 1;

        // dividends
        let dps = if self.firm.operating {
            cfg.firm.dividend_per_share()
        } else {
            0.0
        };
        market::pay_dividends(
            &mut self.investors,
            dps,
            &cfg.alt,
            cfg.reinvest_dividends,
            &mut self.rng,
        );

        // beliefs
        social::social_round(
            &mut self.investors,
            &mut self.network,
            &cfg.social,
            self.market.price,
            &mut self.rng,
        );

        // trading and delisting
        if self.firm.operating {
            let params = TradingParams {
                rho: cfg.rho,
                mu: cfg.mu,
                npv_unconstrained: self.firm.npv_unconstrained(&cfg.firm),
                npv_constrained: self.firm.npv_constrained(&cfg.firm),
                immediate_divestment: cfg.immediate_divestment,
            };
            market::trading_round(&mut self.investors, &mut self.market, &params, &mut self.rng);
            if self.market.price <= cfg.delisting_fraction * self.opening_price
                || self.market.held <= 0.0
            {
                self.firm.delist();
            }
        }

        // extraction
        if self.firm.operating {
            self.firm.step_extraction(&cfg.firm, self.policy.in_force);
        }

        // policy; once in force nobody doubts it any more
        let unconvinced = 1.0 - self.fci();
        if self
            .policy
            .sample(self.month, unconvinced, &cfg.policy, &mut self.rng)
        {
            for inv in &mut self.investors {
                inv.convinced = true;
            }
            self.firm.enforce_policy();
        }

        if !self.firm.operating && self.delisting_month.is_none() {
            self.firm.delisted = true;
            self.delisting_month = Some(self.month);
            self.market.price = 0.0;
        }

        self.months.push(self.snapshot());
    }

    /// Run to the horizon and return the trajectory.
    pub fn run_to_end(mut self) -> RunRecord {
        while !self.is_finished() {
            self.step_month();
        }
        self.into_record()
    }

    /// Trajectory so far, with events derived from it.
    pub fn into_record(self) -> RunRecord {
        let final_cce = self.months.last().map_or(0.0, |r| r.cce);
        let mut record = RunRecord {
            seed: self.config.seed,
            initial: self.initial,
            months: self.months,
            events: RunEvents {
                policy_month: self.policy.implementation_month,
                delisting_month: self.delisting_month,
                ..RunEvents::default()
            },
            final_cce,
        };
        record.events.budget_exceeded_month = record
            .months
            .iter()
            .find(|r| r.budget <= 0.0)
            .map(|r| r.month);
        record.events.first_crash_month = analysis::detect_crash(
            &record.price_series(),
            self.config.analysis.crash_window,
            self.config.analysis.crash_drop,
        )
        .map(|m| m as u32);
        record
    }
}

/// Run one simulation to its horizon.
pub fn run(config: &SimConfig) -> Result<RunRecord> {
    Ok(World::new(config)?.run_to_end())
}
