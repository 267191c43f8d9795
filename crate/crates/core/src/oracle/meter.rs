use serde::Serialize;

use crate::error::{ensure, Error, Result};

/// Which half of a two-sided oracle a query went to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Identifier returned by [`QueryMeter::add_probe`].
pub type ProbeId = usize;

/// Accumulates `||Pi_S |psi_t>||^2` over the queries of one direction.
#[derive(Clone, Debug)]
pub struct MagnitudeProbe {
    pub direction: Direction,
    member: Vec<bool>,
    pub mass: f64,
}

impl MagnitudeProbe {
    pub fn contains(&self, v: u64) -> bool {
        self.member.get(v as usize).copied().unwrap_or(false)
    }
}

/// Query counter, budget and magnitude probes attached to one oracle.
#[derive(Clone, Debug, Default)]
pub struct QueryMeter {
    budget: Option<u64>,
    count: u64,
    forward_count: u64,
    probes: Vec<MagnitudeProbe>,
}

impl QueryMeter {
    pub fn new(budget: Option<u64>) -> Self {
        Self {
            budget,
            ..Self::default()
        }
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn set_budget(&mut self, budget: Option<u64>) {
        self.budget = budget;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn forward_count(&self) -> u64 {
        self.forward_count
    }

    pub fn inverse_count(&self) -> u64 {
        self.count - self.forward_count
    }

    /// Registers a probe on `subset` of the query-input domain (`domain_size`
    /// values). Probes must be in place before the first query.
    pub fn add_probe(
        &mut self,
        direction: Direction,
        subset: &[u64],
        domain_size: u64,
    ) -> Result<ProbeId> {
        ensure!(self.count == 0, "probes must be registered before any query");
        let mut member = vec![false; domain_size as usize];
        for &v in subset {
            ensure!(v < domain_size, "probe value {v} outside domain of size {domain_size}");
            member[v as usize] = true;
        }
        self.probes.push(MagnitudeProbe {
            direction,
            member,
            mass: 0.0,
        });
        Ok(self.probes.len() - 1)
    }

    pub fn probe(&self, id: ProbeId) -> Result<&MagnitudeProbe> {
        self.probes.get(id).ok_or(Error::UnknownProbe(id))
    }

    pub fn probes(&self) -> &[MagnitudeProbe] {
        &self.probes
    }

    /// Total query magnitude accumulated by probe `id`.
    pub fn total_query_magnitude(&self, id: ProbeId) -> Result<f64> {
        Ok(self.probe(id)?.mass)
    }

    pub fn has_probes(&self) -> bool {
        !self.probes.is_empty()
    }

    /// Charges one query whose input register has the marginal distribution
    /// `input` (value, probability). Fails without side effects when the
    /// budget is exhausted.
    pub fn record(&mut self, direction: Direction, input: &[(u64, f64)]) -> Result<()> {
        let attempted = self.count + 1;
        if let Some(budget) = self.budget {
            if attempted > budget {
                return Err(Error::BudgetExceeded { budget, attempted });
            }
        }
        self.count = attempted;
        if direction == Direction::Forward {
            self.forward_count += 1;
        }
        for probe in self.probes.iter_mut().filter(|p| p.direction == direction) {
            probe.mass += input
                .iter()
                .filter(|(v, _)| probe.contains(*v))
                .map(|(_, p)| p)
                .sum::<f64>();
        }
        Ok(())
    }
}
