//! Five-number summaries with Tukey hinges and 1.5 IQR whiskers.

use alloc::vec::Vec;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxplotStats {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    /// Values outside the whiskers, ascending.
    pub outliers: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("boxplot of an empty value list")]
pub struct EmptyInput;

pub const WHISKER_IQR_FACTOR: f64 = 1.5;

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Hinges are the medians of the lower and upper halves; for odd counts
/// both halves include the median element.
pub fn boxplot_stats(values: &[f64]) -> Result<BoxplotStats, EmptyInput> {
    if values.is_empty() {
        return Err(EmptyInput);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let median = median_sorted(&v);
    let (q1, q3) = if n == 1 {
        (v[0], v[0])
    } else {
        let half = n.div_ceil(2);
        (median_sorted(&v[..half]), median_sorted(&v[n - half..]))
    };
    let iqr = q3 - q1;
    let low_fence = q1 - WHISKER_IQR_FACTOR * iqr;
    let high_fence = q3 + WHISKER_IQR_FACTOR * iqr;
    let inside = |x: &f64| *x >= low_fence && *x <= high_fence;
    // q1 and q3 lie between data points inside the fences, so both exist
    let whisker_low = v.iter().copied().find(inside).unwrap_or(q1);
    let whisker_high = v.iter().rev().copied().find(inside).unwrap_or(q3);
    let outliers = v.iter().copied().filter(|x| !inside(x)).collect();
    Ok(BoxplotStats {
        median,
        q1,
        q3,
        whisker_low,
        whisker_high,
        outliers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn one_to_five() {
        let s = boxplot_stats(&[5.0, 1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_eq!((s.median, s.q1, s.q3), (3.0, 2.0, 4.0));
        assert_eq!((s.whisker_low, s.whisker_high), (1.0, 5.0));
        assert!(s.outliers.is_empty());
    }

    #[test]
    fn single_value() {
        let s = boxplot_stats(&[7.0]).unwrap();
        assert_eq!(
            (s.median, s.q1, s.q3, s.whisker_low, s.whisker_high),
            (7.0, 7.0, 7.0, 7.0, 7.0)
        );
        assert!(s.outliers.is_empty());
    }

    #[test]
    fn zero_iqr_outlier() {
        let s = boxplot_stats(&[1.0, 1.0, 1.0, 1.0, 100.0]).unwrap();
        assert_eq!((s.q1, s.q3), (1.0, 1.0));
        assert_eq!(s.outliers, vec![100.0]);
        assert_eq!(s.whisker_high, 1.0);
    }

    #[test]
    fn even_count() {
        let s = boxplot_stats(&[3000.0, 5000.0]).unwrap();
        assert_eq!(s.median, 4000.0);
        assert_eq!((s.q1, s.q3), (3000.0, 5000.0));
    }

    #[test]
    fn empty() {
        assert_eq!(boxplot_stats(&[]), Err(EmptyInput));
    }
}
