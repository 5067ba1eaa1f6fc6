//! Test-only dense oracle for the stationary age equations.
//!
//! Independent of the production solvers on purpose: instead of the
//! rearranged backward recursions, this enumerates every concrete channel
//! of a scenario, applies the per-transition reset rule to each test
//! quantity, assembles the full linear system, and solves it by Gaussian
//! elimination. Agreement between the two routes checks both.

/// Mirror of the solver output shape.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    pub v_subset: Vec<f64>,
    pub v_captured: Option<f64>,
    pub v_subset_with_target: Option<Vec<f64>>,
    pub v_adversary: Option<f64>,
}

fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        assert!(a[col][col].abs() > 1e-14, "singular system");
        let pivot_row = a[col].clone();
        let pivot_b = b[col];
        for row in 0..n {
            if row != col && a[row][col] != 0.0 {
                let factor = a[row][col] / pivot_row[col];
                for (c, &pv) in pivot_row.iter().enumerate().skip(col) {
                    a[row][c] -= factor * pv;
                }
                b[row] -= factor * pivot_b;
            }
        }
    }
    (0..n).map(|i| b[i] / a[i][i]).collect()
}

/// Node-capture scenario in its thinned (always-accepted) form, which is
/// the exact event set the stationary equations describe.
pub fn dense_node_capture(n: usize, lambda: f64, p: f64, q: f64) -> DenseSolution {
    assert!(n >= 2);
    let m = n - 1;
    let unknowns = m + 1; // v_{S_1..S_{n-1}}, then v_n
    let mut a = vec![vec![0.0; unknowns]; unknowns];
    let b = vec![1.0; unknowns];

    // Concrete channels: (src, dst, rate); src 0 is the source.
    let mut chans: Vec<(usize, usize, f64)> = Vec::new();
    for j in 1..=n {
        chans.push((0, j, lambda / n as f64));
    }
    let gossip = lambda / (n as f64 - 1.0);
    for i in 1..n {
        for j in 1..n {
            if i != j {
                chans.push((i, j, gossip));
            }
        }
    }
    for i in 1..n {
        chans.push((i, n, (1.0 - q) * gossip));
        chans.push((n, i, p * gossip));
    }

    // Rows 0..m-1: age of the freshest-claiming node over S_k = {1..k}.
    for k in 1..=m {
        let row = k - 1;
        for &(src, dst, rate) in &chans {
            if rate == 0.0 {
                continue;
            }
            let dst_in_set = dst <= k;
            if src == 0 && dst_in_set {
                a[row][row] += rate; // reset to 0
            } else if (1..n).contains(&src) && src > k && dst_in_set {
                // A regular node outside the set gossips in: the set's
                // freshest claim now ranges over k+1 regular nodes.
                assert!(k < m, "no regular node lies outside S_(n-1)");
                a[row][row] += rate;
                a[row][k] -= rate; // v_{S_{k+1}}
            } else if src == n && dst_in_set {
                a[row][row] += rate;
                a[row][m] -= rate; // v_n
            }
        }
    }
    // Row m: the captured node's own age.
    for &(src, dst, rate) in &chans {
        if rate == 0.0 || dst != n {
            continue;
        }
        if src == 0 {
            a[m][m] += rate; // reset to 0
        } else {
            a[m][m] += rate;
            a[m][0] -= rate; // carries a regular node's age, v_1
        }
    }

    let v = gauss_solve(a, b);
    DenseSolution {
        v_subset: v[..m].to_vec(),
        v_captured: Some(v[m]),
        v_subset_with_target: None,
        v_adversary: None,
    }
}

/// MITM scenario: relay takes over node n's source feed and pushes its own
/// packet at rate lambda; all user nodes gossip honestly.
pub fn dense_mitm(n: usize, lambda: f64) -> DenseSolution {
    assert!(n >= 2);
    let m = n - 1;
    let unknowns = 2 * m + 1; // v_{S_k}, v_{S_k u {n}}, v_A
    let relay = n + 1;
    let mut a = vec![vec![0.0; unknowns]; unknowns];
    let b = vec![1.0; unknowns];

    let mut chans: Vec<(usize, usize, f64)> = Vec::new();
    for j in 1..n {
        chans.push((0, j, lambda / n as f64));
    }
    chans.push((0, relay, lambda / n as f64));
    chans.push((relay, n, lambda));
    let gossip = lambda / (n as f64 - 1.0);
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                chans.push((i, j, gossip));
            }
        }
    }

    for k in 1..=m {
        let in_set = |node: usize| node <= k;
        // Row k-1: freshest claim over S_k = {1..k}.
        let row = k - 1;
        for &(src, dst, rate) in &chans {
            if src == 0 && dst != relay && in_set(dst) {
                a[row][row] += rate;
            } else if (1..n).contains(&src) && !in_set(src) && dst != relay && in_set(dst) {
                assert!(k < m);
                a[row][row] += rate;
                a[row][k] -= rate; // v_{S_{k+1}}
            } else if src == n && in_set(dst) {
                a[row][row] += rate;
                a[row][m + k - 1] -= rate; // v_{S_k u {n}}
            }
        }
        // Row m+k-1: freshest claim over S_k plus the target node.
        let row = m + k - 1;
        for &(src, dst, rate) in &chans {
            if src == 0 && dst != relay && in_set(dst) {
                a[row][row] += rate;
            } else if src == relay {
                a[row][row] += rate;
                a[row][2 * m] -= rate; // v_A
            } else if (1..n).contains(&src) && !in_set(src) && (in_set(dst) || dst == n) {
                assert!(k < m);
                a[row][row] += rate;
                a[row][m + k] -= rate; // v_{S_{k+1} u {n}}
            }
        }
    }
    // Row 2m: the relay's age; only the source resets it.
    for &(src, dst, rate) in &chans {
        if src == 0 && dst == relay {
            a[2 * m][2 * m] += rate;
        }
    }

    let v = gauss_solve(a, b);
    DenseSolution {
        v_subset: v[..m].to_vec(),
        v_captured: None,
        v_subset_with_target: Some(v[m..2 * m].to_vec()),
        v_adversary: Some(v[2 * m]),
    }
}

/// Adversary-free fully connected network over all n user nodes.
pub fn dense_baseline(n: usize, lambda: f64) -> DenseSolution {
    assert!(n >= 1);
    let mut a = vec![vec![0.0; n]; n];
    let b = vec![1.0; n];
    let mut chans: Vec<(usize, usize, f64)> = Vec::new();
    for j in 1..=n {
        chans.push((0, j, lambda / n as f64));
    }
    if n > 1 {
        let gossip = lambda / (n as f64 - 1.0);
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    chans.push((i, j, gossip));
                }
            }
        }
    }
    for k in 1..=n {
        let row = k - 1;
        for &(src, dst, rate) in &chans {
            if src == 0 && dst <= k {
                a[row][row] += rate;
            } else if src != 0 && src > k && dst <= k {
                a[row][row] += rate;
                a[row][k] -= rate; // v_{S_{k+1}}
            }
        }
    }
    DenseSolution {
        v_subset: gauss_solve(a, b),
        v_captured: None,
        v_subset_with_target: None,
        v_adversary: None,
    }
}

/// Largest relative deviation between two value sequences.
pub fn max_rel_err(got: &[f64], want: &[f64]) -> f64 {
    assert_eq!(got.len(), want.len());
    got.iter()
        .zip(want)
        .map(|(g, w)| (g - w).abs() / w.abs())
        .fold(0.0, f64::max)
}
