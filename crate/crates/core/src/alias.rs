//! Walker/Vose alias tables for O(1) sampling from a fixed discrete
//! distribution.

use rand::Rng;

use crate::error::{Error, Result};

/// Fills `prob` and `alias` (both `weights.len()` long) with Vose's
/// construction. Weights must be positive with a finite sum.
pub(crate) fn build_into(weights: &[f64], prob: &mut [f64], alias: &mut [u32], small: &mut Vec<u32>, large: &mut Vec<u32>) {
    let n = weights.len();
    debug_assert!(n > 0 && prob.len() == n && alias.len() == n);
    let total: f64 = weights.iter().sum();
    let scale = n as f64 / total;

    small.clear();
    large.clear();
    for (i, &w) in weights.iter().enumerate() {
        prob[i] = w * scale;
        alias[i] = i as u32;
        if prob[i] < 1.0 {
            small.push(i as u32);
        } else {
            large.push(i as u32);
        }
    }

    while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
        small.pop();
        alias[s as usize] = l;
        let rest = prob[l as usize] + prob[s as usize] - 1.0;
        prob[l as usize] = rest;
        if rest < 1.0 {
            large.pop();
            small.push(l);
        }
    }
    // Leftovers are 1 up to rounding.
    for &i in large.iter().chain(small.iter()) {
        prob[i as usize] = 1.0;
    }
}

#[inline]
pub(crate) fn draw<R: Rng + ?Sized>(prob: &[f64], alias: &[u32], rng: &mut R) -> usize {
    let i = rng.random_range(0..prob.len());
    if rng.random::<f64>() < prob[i] {
        i
    } else {
        alias[i] as usize
    }
}

pub(crate) fn check_weight(w: f64) -> Result<()> {
    if w.is_finite() && w >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidWeights(format!("weight {w} is negative or not finite")))
    }
}

/// Alias table over `u32` outcomes.
///
/// Outcomes with zero weight are dropped from the support.
#[derive(Clone, Debug)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<u32>,
    support: Vec<u32>,
}

impl AliasTable {
    pub fn new<I>(weighted: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, f64)>,
    {
        let mut support = Vec::new();
        let mut weights = Vec::new();
        for (outcome, w) in weighted {
            check_weight(w)?;
            if w > 0.0 {
                support.push(outcome);
                weights.push(w);
            }
        }
        if support.is_empty() {
            return Err(Error::InvalidWeights("no outcome has positive weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if !total.is_finite() {
            return Err(Error::InvalidWeights("weights sum to infinity".into()));
        }
        let n = weights.len();
        let mut prob = vec![0.0; n];
        let mut alias = vec![0; n];
        build_into(&weights, &mut prob, &mut alias, &mut Vec::new(), &mut Vec::new());
        Ok(AliasTable { prob, alias, support })
    }

    /// Table over outcomes `0..weights.len()`.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        Self::new(weights.iter().enumerate().map(|(i, &w)| (i as u32, w)))
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        self.support[draw(&self.prob, &self.alias, rng)]
    }

    /// Outcomes with positive weight, in input order.
    pub fn support(&self) -> &[u32] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// The exact distribution encoded by the table, as `(outcome, probability)`.
    pub fn distribution(&self) -> Vec<(u32, f64)> {
        let n = self.prob.len() as f64;
        let mut mass: Vec<f64> = self.prob.iter().map(|p| p / n).collect();
        for (i, &p) in self.prob.iter().enumerate() {
            mass[self.alias[i] as usize] += (1.0 - p) / n;
        }
        self.support.iter().copied().zip(mass).collect()
    }
}
