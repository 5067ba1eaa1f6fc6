//! Small replication-level statistics helpers.

/// Sample mean / standard-error pair for a replication-level estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    /// Standard error of the mean (sample std dev / sqrt(count)); zero for
    /// fewer than two samples.
    pub stderr: f64,
    pub count: usize,
}

impl Summary {
    pub fn from_samples(samples: &[f64]) -> Summary {
        let count = samples.len();
        if count == 0 {
            return Summary {
                mean: f64::NAN,
                stderr: 0.0,
                count,
            };
        }
        let mean = samples.iter().sum::<f64>() / count as f64;
        let stderr = if count < 2 {
            0.0
        } else {
            let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
                / (count as f64 - 1.0);
            (var / count as f64).sqrt()
        };
        Summary {
            mean,
            stderr,
            count,
        }
    }

    /// Normal-approximation 95% confidence interval.
    pub fn ci95(&self) -> (f64, f64) {
        (self.mean - 1.96 * self.stderr, self.mean + 1.96 * self.stderr)
    }

    pub fn ci_overlaps(&self, other: &Summary) -> bool {
        let (lo_a, hi_a) = self.ci95();
        let (lo_b, hi_b) = other.ci95();
        lo_a <= hi_b && lo_b <= hi_a
    }
}
