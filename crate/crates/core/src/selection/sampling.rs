//! Class-stratified random subsets.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Smallest class size accepted for sampling.
pub const MIN_CLASS_SIZE: usize = 10;

fn class_name(positive: bool) -> &'static str {
    if positive {
        "cough"
    } else {
        "other"
    }
}

/// `draws` pairwise disjoint stratified subsets of `labels`.
///
/// Each class is shuffled once; draw `t` takes the `t`-th consecutive chunk
/// of `round(fraction * class size)` indices of every class. Indices in a
/// draw are sorted.
pub fn disjoint_stratified_samples(labels: &[bool], fraction: f64, draws: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "sampling fraction {fraction} outside (0, 1]"
        )));
    }
    if fraction * draws as f64 > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "{draws} disjoint draws of {fraction} exceed the data"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Vec::new(); draws];
    for positive in [true, false] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == positive).collect();
        if idx.len() < MIN_CLASS_SIZE {
            return Err(Error::ClassTooSmall {
                class: class_name(positive),
                count: idx.len(),
                required: MIN_CLASS_SIZE,
            });
        }
        let take = (fraction * idx.len() as f64).round() as usize;
        if take * draws > idx.len() {
            return Err(Error::ClassTooSmall {
                class: class_name(positive),
                count: idx.len(),
                required: take * draws,
            });
        }
        idx.shuffle(&mut rng);
        for (t, draw) in out.iter_mut().enumerate() {
            draw.extend_from_slice(&idx[t * take..(t + 1) * take]);
        }
    }
    for draw in &mut out {
        draw.sort_unstable();
    }
    Ok(out)
}

/// One stratified subset of `round(fraction * class size)` per class.
pub fn stratified_sample(labels: &[bool], fraction: f64, seed: u64) -> Result<Vec<usize>> {
    Ok(disjoint_stratified_samples(labels, fraction, 1, seed)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(pos: usize, neg: usize) -> Vec<bool> {
        (0..pos + neg).map(|i| i < pos).collect()
    }

    #[test]
    fn class_counts_are_rounded_shares() {
        let y = labels(100, 900);
        let s = stratified_sample(&y, 0.1, 7).unwrap();
        assert_eq!(s.iter().filter(|&&i| y[i]).count(), 10);
        assert_eq!(s.iter().filter(|&&i| !y[i]).count(), 90);
    }

    #[test]
    fn deterministic_under_seed() {
        let y = labels(100, 900);
        assert_eq!(
            stratified_sample(&y, 0.1, 3).unwrap(),
            stratified_sample(&y, 0.1, 3).unwrap()
        );
        assert_ne!(
            stratified_sample(&y, 0.1, 3).unwrap(),
            stratified_sample(&y, 0.1, 4).unwrap()
        );
    }

    #[test]
    fn five_draws_are_disjoint() {
        let y = labels(100, 900);
        let draws = disjoint_stratified_samples(&y, 0.1, 5, 11).unwrap();
        let mut all: Vec<usize> = draws.iter().flatten().copied().collect();
        assert_eq!(all.len(), 500);
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 500);
    }

    #[test]
    fn small_class_is_named() {
        let err = stratified_sample(&labels(5, 900), 0.1, 1).unwrap_err();
        assert!(err.to_string().contains("cough"), "{err}");
    }
}
