//! Brute-force reference implementations used to check the optimized code.
#![allow(dead_code)]

/// Per-instruction `(skip, group)` choices of one explicit assignment.
pub type Composition = Vec<(usize, usize)>;

/// Charges for grouped members after the first.
#[derive(Clone, Copy)]
pub enum Members<'a> {
    ToInstruction,
    Chain(&'a [f64]),
}

/// Cost of one explicit assignment, summed term by term from the front.
pub fn composition_cost(
    d: &[Vec<f64>],
    comp: &Composition,
    (c_dist, c_group, c_skip): (f64, f64, f64),
    members: Members<'_>,
) -> f64 {
    let m = d.len();
    let mut i = 0;
    let mut total = 0.0;
    for (j, &(k, g)) in comp.iter().enumerate() {
        total += c_skip * k as f64;
        let first = i + k;
        total += c_dist * d[first][j];
        for s in first + 1..first + g {
            total += c_group
                * match members {
                    Members::ToInstruction => d[s][j],
                    Members::Chain(c) => c[s - 1],
                };
        }
        i = first + g;
    }
    total + c_skip * (m - i) as f64
}

/// Every valid assignment of `m` segments to `n` instructions in order.
pub fn all_compositions(m: usize, n: usize) -> Vec<Composition> {
    fn rec(i: usize, j: usize, m: usize, n: usize, cur: &mut Composition, out: &mut Vec<Composition>) {
        if j == n {
            out.push(cur.clone());
            return;
        }
        let need_after = n - j - 1;
        for k in 0..m.saturating_sub(i) {
            for g in 1..=m.saturating_sub(i + k) {
                if i + k + g + need_after > m {
                    break;
                }
                cur.push((k, g));
                rec(i + k + g, j + 1, m, n, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(0, 0, m, n, &mut Vec::new(), &mut out);
    out
}

/// Minimum cost over all compositions, with the first composition reaching it.
pub fn brute_force_match(
    d: &[Vec<f64>],
    n: usize,
    costs: (f64, f64, f64),
    members: Members<'_>,
) -> Option<(f64, Composition)> {
    let mut best: Option<(f64, Composition)> = None;
    for comp in all_compositions(d.len(), n) {
        let c = composition_cost(d, &comp, costs, members);
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, comp));
        }
    }
    best
}

/// Minimum transport cost over the vertices of the transportation polytope
/// `{x >= 0 : row sums = a, column sums = b}`.
///
/// Every vertex is a basic solution supported on a spanning tree of the
/// complete bipartite graph, so all `(n + m - 1)`-cell trees are enumerated
/// and their unique flows recovered by peeling leaves.
pub fn transport_vertex_min(a: &[f64], b: &[f64], cost: &[f64]) -> f64 {
    let (n, m) = (a.len(), b.len());
    let cells = n * m;
    let basis = n + m - 1;
    let mut best = f64::INFINITY;
    let mut pick: Vec<usize> = (0..basis).collect();
    loop {
        if let Some(c) = tree_cost(a, b, cost, &pick) {
            best = best.min(c);
        }
        // next combination in lexicographic order
        let mut k = basis;
        while k > 0 && pick[k - 1] == cells - basis + k - 1 {
            k -= 1;
        }
        if k == 0 {
            break;
        }
        pick[k - 1] += 1;
        for t in k..basis {
            pick[t] = pick[t - 1] + 1;
        }
    }
    best
}

fn tree_cost(a: &[f64], b: &[f64], cost: &[f64], cells: &[usize]) -> Option<f64> {
    let (n, m) = (a.len(), b.len());
    let mut parent: Vec<usize> = (0..n + m).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &c in cells {
        let (r, s) = (find(&mut parent, c / m), find(&mut parent, n + c % m));
        if r == s {
            return None;
        }
        parent[r] = s;
    }

    let mut residual: Vec<f64> = a.iter().chain(b).copied().collect();
    let mut alive: Vec<bool> = vec![true; cells.len()];
    let mut total = 0.0;
    for _ in 0..cells.len() {
        let mut degree = vec![0usize; n + m];
        for (e, &c) in cells.iter().enumerate() {
            if alive[e] {
                degree[c / m] += 1;
                degree[n + c % m] += 1;
            }
        }
        let (e, leaf) = cells
            .iter()
            .enumerate()
            .filter(|(e, _)| alive[*e])
            .find_map(|(e, &c)| {
                let (r, s) = (c / m, n + c % m);
                if degree[r] == 1 {
                    Some((e, r))
                } else if degree[s] == 1 {
                    Some((e, s))
                } else {
                    None
                }
            })?;
        let c = cells[e];
        let other = if leaf == c / m { n + c % m } else { c / m };
        let flow = residual[leaf];
        if flow < -1e-12 {
            return None;
        }
        residual[leaf] = 0.0;
        residual[other] -= flow;
        alive[e] = false;
        total += flow * cost[c];
    }
    residual.iter().all(|r| r.abs() < 1e-9).then_some(total)
}
