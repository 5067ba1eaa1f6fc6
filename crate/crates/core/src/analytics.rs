//! Exact solvers for the long-term expected ages.
//!
//! The stationary balance equations of the event dynamics couple the
//! expected age of the freshest-claiming node over a k-subset of regular
//! nodes only to the (k+1)-subset value and to the adversary-side node.
//! Each solver therefore back-propagates an affine relation
//! `v_subset[k] = a_k + b_k · v_tail` from k = n−1 (where the (k+1)-term's
//! coefficient vanishes) down to k = 1, then closes the remaining scalar
//! equation — an O(n) solve with all coefficients in (0, 1], no matrix
//! assembly anywhere. The exact coefficients are used throughout; the
//! 1/(n−1) ≈ 1/n large-n shortcut appears only in [`asymptotics`].

use crate::{Error, Result};

/// Exact solver output: stationary expected ages per subset size and for
/// the special nodes a scenario has.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionSolution {
    /// Expected true age of the freshest-claiming node over any k regular
    /// nodes, indexed by k−1. Length n−1 with an adversary present, n
    /// without. Non-increasing in k.
    pub v_subset: Vec<f64>,
    /// Node-capture only: expected age at the captured node.
    pub v_captured: Option<f64>,
    /// MITM only: expected age of the freshest-claiming node over k regular
    /// nodes plus the target node, k = 1..n−1.
    pub v_subset_with_target: Option<Vec<f64>>,
    /// MITM only: expected age at the relay (adversary) node.
    pub v_adversary: Option<f64>,
}

impl RecursionSolution {
    /// Expected age at a single regular node.
    pub fn v1(&self) -> f64 {
        self.v_subset[0]
    }
}

fn check_inputs(n: usize, min_n: usize, lambda: f64) -> Result<()> {
    if n < min_n {
        return Err(Error::InvalidConfig(format!(
            "solver needs n >= {min_n}, got {n}"
        )));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    Ok(())
}

fn check_prob(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) || !v.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "probability {name} must lie in [0, 1], got {v}"
        )));
    }
    Ok(())
}

/// Harmonic number Σ_{k=1..m} 1/k, summed smallest terms first.
pub fn harmonic(m: usize) -> f64 {
    let mut sum = 0.0;
    for k in (1..=m).rev() {
        sum += 1.0 / k as f64;
    }
    sum
}

/// Exact stationary ages under the node-capture attack.
///
/// Outgoing packets from the captured node are accepted with probability
/// `p`; incoming ones with probability 1−q. Back-propagates
/// `v_subset[k] = a_k + b_k·v_captured`, then closes the captured node's own
/// balance equation. For q = 1 that closure degenerates to n/λ exactly.
pub fn solve_node_capture(n: usize, lambda: f64, p: f64, q: f64) -> Result<RecursionSolution> {
    check_inputs(n, 2, lambda)?;
    check_prob("p", p)?;
    check_prob("q", q)?;
    let nf = n as f64;
    let m = n - 1;
    let mut a = vec![0.0; m + 2];
    let mut b = vec![0.0; m + 2];
    for k in (1..=m).rev() {
        let kf = k as f64;
        let grow = (nf - kf - 1.0) / (nf - 1.0);
        let denom = 1.0 / nf + grow + p / (nf - 1.0);
        a[k] = (1.0 / (kf * lambda) + grow * a[k + 1]) / denom;
        b[k] = (p / (nf - 1.0) + grow * b[k + 1]) / denom;
    }
    let v_captured = if q >= 1.0 {
        nf / lambda
    } else {
        // Accepted inbound gossip arrives at total rate (1-q)λ carrying a
        // regular node's age; the source refreshes at λ/n.
        (1.0 / lambda + (1.0 - q) * a[1]) / (1.0 / nf + (1.0 - q) * (1.0 - b[1]))
    };
    let v_subset = (1..=m).map(|k| a[k] + b[k] * v_captured).collect();
    Ok(RecursionSolution {
        v_subset,
        v_captured: Some(v_captured),
        v_subset_with_target: None,
        v_adversary: None,
    })
}

/// Exact stationary ages under the MITM attack.
///
/// The relay only hears from the source (rate λ/n), so its age is n/λ; the
/// subsets-with-target family depends on it, and the plain subsets family
/// depends on that in turn — three back-substitutions in total.
pub fn solve_mitm(n: usize, lambda: f64) -> Result<RecursionSolution> {
    check_inputs(n, 2, lambda)?;
    let nf = n as f64;
    let m = n - 1;
    let v_adversary = nf / lambda;
    let mut with_target = vec![0.0; m + 2];
    for k in (1..=m).rev() {
        let kf = k as f64;
        let grow = (kf + 1.0) * (nf - 1.0 - kf) / (nf - 1.0);
        with_target[k] =
            (1.0 / lambda + grow * with_target[k + 1] + v_adversary) / (kf / nf + grow + 1.0);
    }
    let mut v = vec![0.0; m + 2];
    for k in (1..=m).rev() {
        let kf = k as f64;
        let grow = (nf - kf - 1.0) / (nf - 1.0);
        let denom = 1.0 / nf + grow + 1.0 / (nf - 1.0);
        v[k] = (1.0 / (kf * lambda) + grow * v[k + 1] + with_target[k] / (nf - 1.0)) / denom;
    }
    Ok(RecursionSolution {
        v_subset: v[1..=m].to_vec(),
        v_captured: None,
        v_subset_with_target: Some(with_target[1..=m].to_vec()),
        v_adversary: Some(v_adversary),
    })
}

/// Exact stationary ages of the adversary-free fully connected network.
/// The full-set value is 1/λ (any source delivery refreshes the set), and
/// smaller subsets build on it.
pub fn solve_baseline(n: usize, lambda: f64) -> Result<RecursionSolution> {
    check_inputs(n, 1, lambda)?;
    let nf = n as f64;
    let mut v = vec![0.0; n + 2];
    v[n] = 1.0 / lambda;
    for k in (1..n).rev() {
        let kf = k as f64;
        let grow = kf * (nf - kf) * lambda / (nf - 1.0);
        v[k] = (1.0 + grow * v[k + 1]) / (kf * lambda / nf + grow);
    }
    Ok(RecursionSolution {
        v_subset: v[1..=n].to_vec(),
        v_captured: None,
        v_subset_with_target: None,
        v_adversary: None,
    })
}

/// Large-n closed forms and the partial-attack bracket, with the harmonic
/// number standing in for every logarithmic term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgeAsymptotics {
    /// Regular-node age under the full attack (p = q = 1):
    /// (H_{n−1} − (n−1)/n)/λ + n/(2λ).
    pub v1_at_p1: f64,
    /// Regular-node age when the captured node never sends (p = 0): H_{n−1}/λ.
    pub v1_at_p0: f64,
    /// Partial-attack bracket around v1: H_{n−1}/λ + p·v_n/2.
    pub lower: f64,
    /// Partial-attack bracket around v1: H_{n−1}/λ + p·v_n.
    pub upper: f64,
}

/// Closed-form approximations for the node-capture attack with q = p; the
/// bracket uses the exact captured-node age from [`solve_node_capture`].
pub fn asymptotics(n: usize, lambda: f64, p: f64) -> Result<AgeAsymptotics> {
    check_inputs(n, 2, lambda)?;
    check_prob("p", p)?;
    let nf = n as f64;
    let h = harmonic(n - 1);
    let v_captured = solve_node_capture(n, lambda, p, p)?
        .v_captured
        .expect("node capture always solves the captured node");
    Ok(AgeAsymptotics {
        v1_at_p1: (h - (nf - 1.0) / nf) / lambda + nf / (2.0 * lambda),
        v1_at_p0: h / lambda,
        lower: h / lambda + p * v_captured / 2.0,
        upper: h / lambda + p * v_captured,
    })
}
