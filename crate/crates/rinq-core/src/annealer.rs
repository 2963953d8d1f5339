//! Metropolis simulated annealing over QUBO instances, plus an exhaustive
//! brute-force oracle and the τ-cardinality filter.
//!
//! Reproducibility contract: one master seed derives an independent ChaCha8
//! substream per read, so serial and parallel execution produce identical
//! sample sets. Reads run in parallel with rayon and are merged in canonical
//! (energy, bitstring) order.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{Result, RinqError};
use crate::qubo::{qubo_energy, QuboMatrix};

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    Geometric,
    Linear,
}

impl Interpolation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Interpolation::Geometric => "geometric",
            Interpolation::Linear => "linear",
        }
    }
}

impl std::str::FromStr for Interpolation {
    type Err = RinqError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "geometric" => Ok(Interpolation::Geometric),
            "linear" => Ok(Interpolation::Linear),
            other => Err(RinqError::Usage(format!(
                "unknown interpolation {other:?} (expected geometric or linear)"
            ))),
        }
    }
}

/// β sweep plan for one annealing run.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealSchedule {
    pub beta_min: f64,
    pub beta_max: f64,
    pub sweeps: u32,
    pub reads: u32,
    pub interpolation: Interpolation,
    pub seed: u64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            beta_min: 0.1,
            beta_max: 4.0,
            sweeps: 1000,
            reads: 10_000,
            interpolation: Interpolation::Geometric,
            seed: DEFAULT_SEED,
        }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta_min > 0.0 && self.beta_min < self.beta_max) {
            return Err(RinqError::Usage(format!(
                "need 0 < beta_min < beta_max, got {} and {}",
                self.beta_min, self.beta_max
            )));
        }
        if self.sweeps < 1 || self.reads < 1 {
            return Err(RinqError::Usage(
                "sweeps and reads must both be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// β per sweep, nondecreasing from beta_min to beta_max.
    pub fn betas(&self) -> Vec<f64> {
        let s = self.sweeps as usize;
        (0..s)
            .map(|k| {
                let frac = if s == 1 { 0.0 } else { k as f64 / (s - 1) as f64 };
                match self.interpolation {
                    Interpolation::Geometric => {
                        (self.beta_min.ln() + frac * (self.beta_max.ln() - self.beta_min.ln()))
                            .exp()
                    }
                    Interpolation::Linear => {
                        self.beta_min + frac * (self.beta_max - self.beta_min)
                    }
                }
            })
            .collect()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "beta_min": self.beta_min,
            "beta_max": self.beta_max,
            "sweeps": self.sweeps,
            "reads": self.reads,
            "interpolation": self.interpolation.as_str(),
            "seed": self.seed,
        })
    }
}

/// One annealed state with its recomputed energy and multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub bits: Vec<u8>,
    pub energy: f64,
    pub occurrences: u64,
}

impl Sample {
    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn bitstring(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn selected_indices(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Annealed samples sorted ascending by energy (ties by the selection
/// order below), with duplicate bitstrings merged.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub samples: Vec<Sample>,
    pub schedule: AnnealSchedule,
    pub qubo_digest: String,
}

/// Tie order between equal-energy states: ascending lexicographic order of
/// the selected-index list, so {0,1} precedes {0,2} ("110000" before
/// "101000" in bit-index-0-first rendering).
pub(crate) fn cmp_selected(a: &[u8], b: &[u8]) -> Ordering {
    let sa = a.iter().enumerate().filter(|(_, &v)| v == 1).map(|(i, _)| i);
    let sb = b.iter().enumerate().filter(|(_, &v)| v == 1).map(|(i, _)| i);
    sa.cmp(sb)
}

struct CsrRows {
    /// (column, value) pairs per row, zeros skipped.
    rows: Vec<Vec<(usize, f64)>>,
    diag: Vec<f64>,
}

impl CsrRows {
    fn from_qubo(q: &QuboMatrix) -> Self {
        let n = q.n();
        let mut rows = Vec::with_capacity(n);
        let mut diag = vec![0.0; n];
        for (i, d) in diag.iter_mut().enumerate() {
            let mut row = Vec::new();
            for (j, &v) in q.entries.row(i).iter().enumerate() {
                if v != 0.0 {
                    if i == j {
                        *d = v;
                    } else {
                        row.push((j, v));
                    }
                }
            }
            rows.push(row);
        }
        CsrRows { rows, diag }
    }

    /// ΔE for flipping bit i of x, in O(row nonzeros).
    #[inline]
    fn flip_delta(&self, x: &[u8], i: usize) -> f64 {
        let mut coupling = 0.0;
        for &(j, v) in &self.rows[i] {
            if x[j] == 1 {
                coupling += v;
            }
        }
        if x[i] == 0 {
            self.diag[i] + 2.0 * coupling
        } else {
            -self.diag[i] - 2.0 * coupling
        }
    }
}

fn run_read(
    csr: &CsrRows,
    n: usize,
    betas: &[f64],
    seed: u64,
    read_index: u64,
    mut audit: Option<(&QuboMatrix, &mut f64)>,
) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(read_index);
    let mut x: Vec<u8> = (0..n).map(|_| rng.random::<bool>() as u8).collect();
    let mut order: Vec<usize> = (0..n).collect();
    for &beta in betas {
        order.shuffle(&mut rng);
        for &i in &order {
            let delta = csr.flip_delta(&x, i);
            let accept = delta <= 0.0 || rng.random::<f64>() < (-beta * delta).exp();
            if accept {
                if let Some((q, worst)) = audit.as_mut() {
                    let before = qubo_energy(q, &x).expect("audit energy");
                    x[i] ^= 1;
                    let after = qubo_energy(q, &x).expect("audit energy");
                    x[i] ^= 1;
                    let divergence = (delta - (after - before)).abs();
                    if divergence > **worst {
                        **worst = divergence;
                    }
                }
                x[i] ^= 1;
            }
        }
    }
    x
}

fn assemble(q: &QuboMatrix, schedule: &AnnealSchedule, finals: Vec<Vec<u8>>) -> Result<SampleSet> {
    let mut merged: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
    for bits in finals {
        *merged.entry(bits).or_insert(0) += 1;
    }
    let mut samples: Vec<Sample> = merged
        .into_iter()
        .map(|(bits, occurrences)| {
            let energy = qubo_energy(q, &bits)?;
            Ok(Sample {
                bits,
                energy,
                occurrences,
            })
        })
        .collect::<Result<_>>()?;
    samples.sort_by(|a, b| {
        a.energy
            .total_cmp(&b.energy)
            .then_with(|| cmp_selected(&a.bits, &b.bits))
    });
    Ok(SampleSet {
        samples,
        schedule: schedule.clone(),
        qubo_digest: q.digest(),
    })
}

/// Run the annealer: `reads` independent trajectories, each sweeping β from
/// beta_min to beta_max and proposing single-bit flips over a seeded random
/// permutation per sweep. Deterministic given (Q, schedule).
pub fn anneal(q: &QuboMatrix, schedule: &AnnealSchedule) -> Result<SampleSet> {
    schedule.validate()?;
    let csr = CsrRows::from_qubo(q);
    let betas = schedule.betas();
    let n = q.n();
    let finals: Vec<Vec<u8>> = (0..schedule.reads as u64)
        .into_par_iter()
        .map(|read| run_read(&csr, n, &betas, schedule.seed, read, None))
        .collect();
    assemble(q, schedule, finals)
}

/// Serial annealing run that also reports the worst divergence between the
/// incremental ΔE and a full energy re-evaluation across every accepted
/// move. The returned sample set is identical to [`anneal`]'s.
#[doc(hidden)]
pub fn anneal_with_delta_audit(
    q: &QuboMatrix,
    schedule: &AnnealSchedule,
) -> Result<(SampleSet, f64)> {
    schedule.validate()?;
    let csr = CsrRows::from_qubo(q);
    let betas = schedule.betas();
    let n = q.n();
    let mut worst = 0.0f64;
    let mut finals = Vec::with_capacity(schedule.reads as usize);
    for read in 0..schedule.reads as u64 {
        finals.push(run_read(&csr, n, &betas, schedule.seed, read, Some((q, &mut worst))));
    }
    Ok((assemble(q, schedule, finals)?, worst))
}

/// Lowest-energy sample with popcount exactly tau, if any.
pub fn filter_valid(set: &SampleSet, tau: usize) -> Option<Sample> {
    set.samples
        .iter()
        .find(|s| s.popcount() == tau)
        .cloned()
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Exhaustive minimum over all binary vectors (or all popcount-τ vectors).
/// Tie-break matches [`filter_valid`]: smallest selected-index list.
pub fn brute_force_solve(q: &QuboMatrix, tau: Option<usize>) -> Result<Sample> {
    let n = q.n();
    match tau {
        None => {
            if n > 24 {
                return Err(RinqError::InstanceTooLarge(format!(
                    "unconstrained enumeration is capped at n = 24, got n = {n}"
                )));
            }
            brute_force_unconstrained(q)
        }
        Some(t) => {
            if t < 1 || t > n {
                return Err(RinqError::Usage(format!(
                    "tau must be in 1..={n}, got {t}"
                )));
            }
            if binomial(n, t) > 10_000_000 {
                return Err(RinqError::InstanceTooLarge(format!(
                    "C({n},{t}) exceeds the 10^7 constrained enumeration cap"
                )));
            }
            brute_force_constrained(q, t)
        }
    }
}

fn better(candidate: (f64, &[u8]), best: (f64, &[u8])) -> bool {
    match candidate.0.total_cmp(&best.0) {
        Ordering::Less => true,
        Ordering::Equal => cmp_selected(candidate.1, best.1) == Ordering::Less,
        Ordering::Greater => false,
    }
}

fn brute_force_unconstrained(q: &QuboMatrix) -> Result<Sample> {
    let n = q.n();
    let csr = CsrRows::from_qubo(q);
    let mut x = vec![0u8; n];
    let mut energy = 0.0f64;
    let mut best_bits = x.clone();
    let mut best_energy = 0.0f64;
    // Gray-code walk: one flip per step keeps the energy update O(row).
    for counter in 1u64..(1u64 << n) {
        let bit = counter.trailing_zeros() as usize;
        energy += csr.flip_delta(&x, bit);
        x[bit] ^= 1;
        if energy <= best_energy + 1e-9 {
            // near-ties are re-evaluated exactly to keep the tie-break honest
            let exact = qubo_energy(q, &x)?;
            if better((exact, &x), (best_energy, &best_bits)) {
                best_energy = exact;
                best_bits = x.clone();
            }
            energy = exact;
        }
    }
    Ok(Sample {
        bits: best_bits,
        energy: best_energy,
        occurrences: 1,
    })
}

fn brute_force_constrained(q: &QuboMatrix, tau: usize) -> Result<Sample> {
    let n = q.n();
    struct Walker<'a> {
        q: &'a QuboMatrix,
        n: usize,
        tau: usize,
        bits: Vec<u8>,
        /// coupling[j] = 2·Σ_{i selected} Q_ij
        coupling: Vec<f64>,
        energy: f64,
        best_bits: Vec<u8>,
        best_energy: f64,
        has_best: bool,
    }
    impl Walker<'_> {
        fn descend(&mut self, next: usize, chosen: usize) {
            if chosen == self.tau {
                if !self.has_best
                    || better((self.energy, &self.bits), (self.best_energy, &self.best_bits))
                {
                    self.best_energy = self.energy;
                    self.best_bits = self.bits.clone();
                    self.has_best = true;
                }
                return;
            }
            let remaining = self.tau - chosen;
            for k in next..=(self.n - remaining) {
                let delta = self.q.entries.get(k, k) + self.coupling[k];
                self.bits[k] = 1;
                self.energy += delta;
                for j in 0..self.n {
                    self.coupling[j] += 2.0 * self.q.entries.get(k, j);
                }
                self.descend(k + 1, chosen + 1);
                for j in 0..self.n {
                    self.coupling[j] -= 2.0 * self.q.entries.get(k, j);
                }
                self.energy -= delta;
                self.bits[k] = 0;
            }
        }
    }
    let mut w = Walker {
        q,
        n,
        tau,
        bits: vec![0; n],
        coupling: vec![0.0; n],
        energy: 0.0,
        best_bits: vec![0; n],
        best_energy: f64::INFINITY,
        has_best: false,
    };
    w.descend(0, 0);
    // settle exact energy for the winner
    let energy = qubo_energy(q, &w.best_bits)?;
    Ok(Sample {
        bits: w.best_bits,
        energy,
        occurrences: 1,
    })
}

pub fn sample_set_to_json(set: &SampleSet) -> String {
    use serde_json::json;
    let samples: Vec<serde_json::Value> = set
        .samples
        .iter()
        .map(|s| {
            json!({
                "bits": s.bitstring(),
                "energy": s.energy,
                "occurrences": s.occurrences,
            })
        })
        .collect();
    let doc = json!({
        "qubo_digest": set.qubo_digest,
        "schedule": set.schedule.to_json_value(),
        "samples": samples,
    });
    serde_json::to_string_pretty(&doc).expect("sample set JSON serialization")
}
