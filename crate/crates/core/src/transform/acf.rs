use crate::error::{HurstError, Result};

/// Sample autocorrelation `r[0..=max_lag]` with the biased (divisor n)
/// autocovariance, so `r[0] = 1`. A constant input has no variance and
/// yields `r[h] = 0` for every `h > 0`.
pub fn level_acf(values: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = values.len();
    if n <= max_lag + 1 {
        return Err(HurstError::SequenceTooShort { len: n, max_lag });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let c0: f64 = centered.iter().map(|v| v * v).sum();
    let mut out = Vec::with_capacity(max_lag + 1);
    out.push(1.0);
    for h in 1..=max_lag {
        if c0 == 0.0 {
            out.push(0.0);
            continue;
        }
        let ch: f64 = centered
            .iter()
            .zip(&centered[h..])
            .map(|(a, b)| a * b)
            .sum();
        out.push(ch / c0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_sequence() {
        let x = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        let r = level_acf(&x, 2).unwrap();
        assert_eq!(r[0], 1.0);
        assert!((r[1] + 7.0 / 8.0).abs() < 1e-15);
        assert!((r[2] - 6.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn too_short() {
        assert!(matches!(
            level_acf(&[1.0, 2.0, 3.0], 2),
            Err(HurstError::SequenceTooShort { len: 3, max_lag: 2 })
        ));
    }
}
