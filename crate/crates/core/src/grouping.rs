//! Group labels for placed primitives: apportionment by ratio and the four
//! distribution styles.

use rand::seq::SliceRandom;

use crate::rng::{self, Purpose};
use crate::spec::{DistributionStyle, GroupingSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAssignment {
    /// One label in `[0, k)` per primitive, in primitive order.
    pub labels: Vec<usize>,
    pub achieved_counts: Vec<usize>,
}

/// Largest-remainder apportionment of `n` over `ratios` (normalized here).
/// Remainder ties go to the lower group index.
pub fn target_counts(n: usize, ratios: &[f64]) -> Vec<usize> {
    let total: f64 = ratios.iter().sum();
    let quotas: Vec<f64> = ratios.iter().map(|r| r / total * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..ratios.len()).collect();
    // stable sort keeps lower indices first on equal remainders
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.partial_cmp(&ra).unwrap_or(std::cmp::Ordering::Equal)
    });
    for &g in order.iter().take(n.saturating_sub(assigned)) {
        counts[g] += 1;
    }
    counts
}

/// Labels `n` primitives given in spatial order.
pub fn assign_groups(n: usize, grouping: &GroupingSpec, seed: u64) -> GroupAssignment {
    let k = grouping.k();
    let targets = target_counts(n, &grouping.normalized_ratios());
    let labels = match grouping.distribution_style {
        DistributionStyle::Grouped => grouped(&targets),
        DistributionStyle::Interspersed => blocks(&targets, 1),
        DistributionStyle::Clustered => blocks(&targets, grouping.cluster_size.unwrap_or(1).max(1)),
        DistributionStyle::Dispersed => {
            let mut labels = grouped(&targets);
            let mut r = rng::stream(seed, Purpose::Dispersed, n as i64, k as i64);
            labels.shuffle(&mut r);
            labels
        }
    };
    let mut achieved_counts = vec![0; k];
    for &l in &labels {
        achieved_counts[l] += 1;
    }
    GroupAssignment {
        labels,
        achieved_counts,
    }
}

fn grouped(targets: &[usize]) -> Vec<usize> {
    targets
        .iter()
        .enumerate()
        .flat_map(|(g, &c)| std::iter::repeat_n(g, c))
        .collect()
}

/// Round-robin over groups in blocks of `size`; exhausted groups drop out
/// of the rotation and a final short block takes whatever quota is left.
fn blocks(targets: &[usize], size: usize) -> Vec<usize> {
    let n: usize = targets.iter().sum();
    let mut left = targets.to_vec();
    let mut labels = Vec::with_capacity(n);
    while labels.len() < n {
        for (g, rem) in left.iter_mut().enumerate() {
            let take = size.min(*rem);
            labels.extend(std::iter::repeat_n(g, take));
            *rem -= take;
        }
    }
    labels
}

/// Fraction of adjacent pairs that share a label, over the supplied pairs.
pub fn same_label_adjacency(labels: &[usize], pairs: &[(usize, usize)]) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    let same = pairs.iter().filter(|(a, b)| labels[*a] == labels[*b]).count();
    same as f64 / pairs.len() as f64
}
