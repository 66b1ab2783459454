use crate::error::{Error, Result};

/// Exactly observed event times `0 < τ_1 < τ_2 < … <= T` on `(0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EventHistory {
    times: Vec<f64>,
    horizon: f64,
}

impl EventHistory {
    pub fn new(times: Vec<f64>, horizon: f64) -> Result<Self> {
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(Error::data(format!("horizon must be finite and non-negative, got {horizon}")));
        }
        let mut prev = 0.0;
        for (i, &t) in times.iter().enumerate() {
            if !(t > prev) {
                return Err(Error::data(format!(
                    "event {} at {t} is not strictly after the previous time {prev}",
                    i + 1
                )));
            }
            prev = t;
        }
        if prev > horizon {
            return Err(Error::data(format!("event at {prev} lies beyond the horizon {horizon}")));
        }
        Ok(Self { times, horizon })
    }

    pub fn empty(horizon: f64) -> Self {
        Self {
            times: Vec::new(),
            horizon,
        }
    }

    pub(crate) fn from_sorted_unchecked(times: Vec<f64>, horizon: f64) -> Self {
        Self { times, horizon }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `N(t)`: number of events in `(0, t]`.
    pub fn count_up_to(&self, t: f64) -> usize {
        self.times.partition_point(|&s| s <= t)
    }

    pub fn into_times(self) -> Vec<f64> {
        self.times
    }
}

/// Interval counts `n_i = N(t_i) - N(t_{i-1})` on a grid `0 = t_0 < … < t_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountData {
    times: Vec<f64>,
    counts: Vec<u64>,
}

impl CountData {
    /// `times` holds the full grid including `t_0 = 0`, so it is one longer
    /// than `counts`.
    pub fn new(times: Vec<f64>, counts: Vec<u64>) -> Result<Self> {
        validate_grid(&times)?;
        if times.len() != counts.len() + 1 {
            return Err(Error::data(format!(
                "grid of {} points needs {} counts, got {}",
                times.len(),
                times.len() - 1,
                counts.len()
            )));
        }
        Ok(Self { times, counts })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of observation intervals `m`.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Final observation time `t_m`.
    pub fn end(&self) -> f64 {
        *self.times.last().expect("grid always holds t_0")
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `N_i` for `i = 1..=m`.
    pub fn cumulative(&self) -> Vec<u64> {
        self.counts
            .iter()
            .scan(0u64, |acc, &n| {
                *acc += n;
                Some(*acc)
            })
            .collect()
    }

    /// Interval `(t_{i-1}, t_i]` and its count, for `i = 1..=m`.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, u64)> + '_ {
        self.times
            .windows(2)
            .zip(&self.counts)
            .map(|(w, &n)| (w[0], w[1], n))
    }
}

/// Checks an observation grid: starts at zero, strictly increasing, finite.
pub fn validate_grid(times: &[f64]) -> Result<()> {
    match times.first() {
        None => return Err(Error::data("observation grid is empty")),
        Some(&t0) if t0 != 0.0 => return Err(Error::data(format!("grid must start at t_0 = 0, got {t0}"))),
        _ => {}
    }
    for (i, w) in times.windows(2).enumerate() {
        if !(w[1] > w[0]) || !w[1].is_finite() {
            return Err(Error::data(format!(
                "grid is not strictly increasing at t_{} = {} (previous {})",
                i + 1,
                w[1],
                w[0]
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn history_validation() {
        assert!(EventHistory::new(vec![0.5, 1.0], 1.0).is_ok());
        assert!(EventHistory::new(vec![0.0, 1.0], 1.0).is_err());
        assert!(EventHistory::new(vec![0.5, 0.5], 1.0).is_err());
        assert!(EventHistory::new(vec![0.5, 1.5], 1.0).is_err());
        assert!(EventHistory::new(vec![], 0.0).is_ok());
    }

    #[test]
    fn count_data_cumulative() {
        let d = CountData::new(vec![0.0, 1.0, 2.0, 3.0], vec![1, 0, 2]).unwrap();
        assert_eq!(d.cumulative(), vec![1, 1, 3]);
        assert_eq!(d.total(), 3);
        assert_eq!(d.end(), 3.0);
        let iv: Vec<_> = d.intervals().collect();
        assert_eq!(iv[2], (2.0, 3.0, 2));
    }

    #[test]
    fn count_data_validation() {
        assert!(CountData::new(vec![0.0, 1.0], vec![1, 2]).is_err());
        assert!(CountData::new(vec![0.5, 1.0], vec![1]).is_err());
        assert!(CountData::new(vec![0.0, 1.0, 1.0], vec![1, 1]).is_err());
        assert!(CountData::new(vec![0.0], vec![]).is_ok());
    }
}
