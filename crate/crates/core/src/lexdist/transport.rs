//! Exact discrete optimal transport for small dense problems.
//!
//! Masses are integers so successive shortest augmenting paths terminate
//! after finitely many steps and the optimum is exact up to the rounding of
//! the ground costs. Callers scale rational weights to a common denominator.

use alloc::vec;
use alloc::vec::Vec;

/// Improvement below this is treated as no improvement, which keeps float
/// rounding from creating spurious negative cycles.
const RELAX_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    /// Row-major `supply.len() x demand.len()` integer flows.
    pub flow: Vec<u64>,
    /// Sum of flow times cost, not normalized.
    pub cost: f64,
}

#[derive(Clone, Copy)]
enum Pred {
    None,
    Source,
    /// Reached demand node through forward arc from supply node.
    Supply(usize),
    /// Reached supply node through a reverse arc from demand node.
    Demand(usize),
}

/// Minimum-cost transport of `supply` onto `demand` under row-major `cost`.
///
/// Total supply must equal total demand.
pub fn solve(supply: &[u64], demand: &[u64], cost: &[f64]) -> TransportPlan {
    let (n, m) = (supply.len(), demand.len());
    debug_assert_eq!(cost.len(), n * m);
    debug_assert_eq!(supply.iter().sum::<u64>(), demand.iter().sum::<u64>());

    let mut flow = vec![0u64; n * m];
    let mut supply_left = supply.to_vec();
    let mut demand_left = demand.to_vec();

    let mut dist_s = vec![f64::INFINITY; n];
    let mut dist_d = vec![f64::INFINITY; m];
    let mut pred_s = vec![Pred::None; n];
    let mut pred_d = vec![Pred::None; m];

    while supply_left.iter().any(|&s| s > 0) {
        dist_s.fill(f64::INFINITY);
        dist_d.fill(f64::INFINITY);
        pred_s.fill(Pred::None);
        pred_d.fill(Pred::None);
        for i in 0..n {
            if supply_left[i] > 0 {
                dist_s[i] = 0.0;
                pred_s[i] = Pred::Source;
            }
        }

        // Bellman-Ford over the bipartite residual graph
        for _ in 0..(n + m) {
            let mut changed = false;
            for i in 0..n {
                if !dist_s[i].is_finite() {
                    continue;
                }
                for j in 0..m {
                    let cand = dist_s[i] + cost[i * m + j];
                    if cand < dist_d[j] - RELAX_TOL {
                        dist_d[j] = cand;
                        pred_d[j] = Pred::Supply(i);
                        changed = true;
                    }
                }
            }
            for j in 0..m {
                if !dist_d[j].is_finite() {
                    continue;
                }
                for i in 0..n {
                    if flow[i * m + j] == 0 {
                        continue;
                    }
                    let cand = dist_d[j] - cost[i * m + j];
                    if cand < dist_s[i] - RELAX_TOL {
                        dist_s[i] = cand;
                        pred_s[i] = Pred::Demand(j);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }

        let Some(sink_side) = (0..m)
            .filter(|&j| demand_left[j] > 0 && dist_d[j].is_finite())
            .min_by(|&a, &b| dist_d[a].total_cmp(&dist_d[b]))
        else {
            // unreachable when totals balance
            break;
        };

        // walk back to the source, collecting the bottleneck
        let mut bottleneck = demand_left[sink_side];
        let mut path: Vec<(usize, usize, bool)> = Vec::new();
        let mut j = sink_side;
        let origin = loop {
            let Pred::Supply(i) = pred_d[j] else { unreachable!() };
            path.push((i, j, true));
            match pred_s[i] {
                Pred::Source => break i,
                Pred::Demand(prev_j) => {
                    bottleneck = bottleneck.min(flow[i * m + prev_j]);
                    path.push((i, prev_j, false));
                    j = prev_j;
                }
                _ => unreachable!(),
            }
            assert!(path.len() <= 2 * (n + m), "cycle in augmenting path");
        };
        bottleneck = bottleneck.min(supply_left[origin]);

        for &(i, j, forward) in &path {
            if forward {
                flow[i * m + j] += bottleneck;
            } else {
                flow[i * m + j] -= bottleneck;
            }
        }
        supply_left[origin] -= bottleneck;
        demand_left[sink_side] -= bottleneck;
    }

    let cost = flow
        .iter()
        .zip(cost)
        .filter(|(f, _)| **f > 0)
        .map(|(&f, &c)| f as f64 * c)
        .sum();
    TransportPlan { flow, cost }
}
