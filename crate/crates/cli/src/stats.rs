use serde::{Deserialize, Serialize};

pub const MEDIAN_OF_MEANS_BUCKETS: usize = 10;

/// Summary of one metric over successful trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub failures: usize,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(count)`.
    pub std_error: f64,
    pub min: f64,
    pub max: f64,
    pub median_of_means: f64,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn std_error(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Median of the means of `buckets` contiguous blocks of nearly equal size.
pub fn median_of_means(xs: &[f64], buckets: usize) -> f64 {
    let k = buckets.clamp(1, xs.len().max(1));
    let n = xs.len();
    let mut means: Vec<f64> = (0..k)
        .map(|b| mean(&xs[b * n / k..(b + 1) * n / k]))
        .collect();
    means.sort_by(f64::total_cmp);
    if k % 2 == 1 {
        means[k / 2]
    } else {
        0.5 * (means[k / 2 - 1] + means[k / 2])
    }
}

pub fn summarize(values: &[f64], failures: usize) -> Summary {
    if values.is_empty() {
        return Summary {
            count: 0,
            failures,
            mean: f64::NAN,
            std_error: f64::NAN,
            min: f64::NAN,
            max: f64::NAN,
            median_of_means: f64::NAN,
        };
    }
    Summary {
        count: values.len(),
        failures,
        mean: mean(values),
        std_error: std_error(values),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        median_of_means: median_of_means(values, MEDIAN_OF_MEANS_BUCKETS),
    }
}
