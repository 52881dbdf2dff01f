//! Budget bookkeeping shared by the incremental strategies (log base 2 throughout).

use serde::{Deserialize, Serialize};

/// `Q`, `q = ⌊Q / log₂Q⌋` and the number of outer iterations `⌊log₂Q⌋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub total: u64,
    pub q: u64,
    pub iterations: u32,
}

impl Budget {
    /// Requires `total >= 2`; smaller budgets have no incremental schedule.
    pub fn new(total: u64) -> Self {
        assert!(total >= 2, "incremental schedules need Q >= 2");
        let iterations = 63 - total.leading_zeros();
        let q = (total as f64 / (total as f64).log2()).floor() as u64;
        Self { total, q, iterations }
    }

    /// Prototypes drawn by unifI in iteration `i` (1-based): `min(2^i, q)`.
    pub fn unif_i_prototypes(&self, i: u32) -> u64 {
        pow2(i).min(self.q)
    }

    /// Samples per prototype in unifI iteration `i`: `⌊q / n⌋`.
    pub fn unif_i_batch(&self, i: u32) -> u64 {
        self.q / self.unif_i_prototypes(i)
    }

    /// Worst-case unifI spend: `Σ_i n_i ⌊q/n_i⌋`.
    pub fn unif_i_total(&self) -> u64 {
        (1..=self.iterations).map(|i| self.unif_i_prototypes(i) * self.unif_i_batch(i)).sum()
    }
}

fn pow2(i: u32) -> u64 {
    1u64.checked_shl(i).unwrap_or(u64::MAX)
}

fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// One adaptI outer iteration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptIteration {
    pub iteration: u32,
    /// Prototypes drawn (`n`).
    pub prototypes: u64,
    /// Largest `k` with `k 2^k ≤ q` seen so far.
    pub k: u32,
    /// Halving rounds `⌈log₂ n⌉`.
    pub rounds: u32,
    /// Surviving prototypes `m` at the start of each round.
    pub survivors: Vec<u64>,
    /// Samples per surviving prototype in each round, `⌊q / (m ⌈log₂ n⌉)⌋`.
    pub batches: Vec<u64>,
}

impl AdaptIteration {
    /// Queries spent in this iteration when no violation stops it early.
    pub fn total(&self) -> u64 {
        self.survivors.iter().zip(&self.batches).map(|(m, b)| m * b).sum()
    }

    /// Samples accumulated by the final survivor.
    pub fn survivor_samples(&self) -> u64 {
        self.batches.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptSchedule {
    pub budget: Budget,
    pub iterations: Vec<AdaptIteration>,
}

impl AdaptSchedule {
    pub fn new(total: u64) -> Self {
        let budget = Budget::new(total);
        let q = budget.q;
        let mut k = 0u32;
        let mut iterations = Vec::with_capacity(budget.iterations as usize);
        for i in 1..=budget.iterations {
            let fits = (i as u64).checked_mul(pow2(i)).is_some_and(|v| v <= q);
            if fits {
                k = i;
            }
            let n = pow2(k).max(1);
            let rounds = ceil_log2(n);
            let mut m = n;
            let mut survivors = Vec::with_capacity(rounds as usize);
            let mut batches = Vec::with_capacity(rounds as usize);
            for _ in 0..rounds {
                survivors.push(m);
                batches.push(q / (m * rounds as u64));
                m = m.div_ceil(2);
            }
            iterations.push(AdaptIteration { iteration: i, prototypes: n, k, rounds, survivors, batches });
        }
        Self { budget, iterations }
    }

    pub fn total(&self) -> u64 {
        self.iterations.iter().map(AdaptIteration::total).sum()
    }
}
