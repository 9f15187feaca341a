use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("series has {len} entries, need more than {needed}")]
    TooShort { len: usize, needed: usize },
    #[error("kick {0} is not in the series")]
    MissingKick(u64),
    #[error("window must be at least 1")]
    EmptyWindow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentEntry {
    pub t: u64,
    /// Mean momentum `J(t)`.
    pub current: f64,
    /// Standard error of the ensemble mean; absent for the quantum engine.
    pub stderr: Option<f64>,
}

/// Current `J(t)` after each kick, starting at `t = 0`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CurrentSeries {
    entries: Vec<CurrentEntry>,
}

impl CurrentSeries {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a series with `t = 0, 1, ...` from bare current values.
    pub fn from_currents(currents: &[f64]) -> Self {
        let entries = currents
            .iter()
            .enumerate()
            .map(|(t, &current)| CurrentEntry { t: t as u64, current, stderr: None })
            .collect();
        Self { entries }
    }

    /// Appends an entry. Panics if `t` does not follow the previous kick.
    pub fn push(&mut self, t: u64, current: f64, stderr: Option<f64>) {
        if let Some(last) = self.entries.last() {
            assert!(t > last.t, "kick index must increase: {} after {}", t, last.t);
        }
        self.entries.push(CurrentEntry { t, current, stderr });
    }

    pub fn entries(&self) -> &[CurrentEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn currents(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.current).collect()
    }

    pub fn last(&self) -> Option<&CurrentEntry> {
        self.entries.last()
    }

    pub fn at(&self, t: u64) -> Option<&CurrentEntry> {
        self.entries
            .binary_search_by_key(&t, |e| e.t)
            .ok()
            .map(|i| &self.entries[i])
    }

    /// Concatenates `other`, skipping entries at kicks already present.
    pub fn extend_from(&mut self, other: &CurrentSeries) {
        let last = self.entries.last().map(|e| e.t);
        self.entries
            .extend(other.entries.iter().filter(|e| last.is_none_or(|l| e.t > l)).copied());
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asymptote {
    pub j_inf: f64,
    /// First kick from which trailing-window means stay within tolerance.
    pub t_settle: Option<u64>,
}

/// Asymptotic current and settling time.
///
/// `J_inf` is the mean of the final `window` entries. The series has settled
/// at kick `t` when every trailing-window mean from the window starting at `t`
/// onward lies within `tol * |J_inf|` of `J_inf`, and that stretch covers at
/// least one window ahead of the final one.
pub fn detect_asymptote(
    series: &CurrentSeries,
    window: usize,
    tol: f64,
) -> Result<Asymptote, SeriesError> {
    if window == 0 {
        return Err(SeriesError::EmptyWindow);
    }
    let n = series.len();
    if n <= 2 * window {
        return Err(SeriesError::TooShort { len: n, needed: 2 * window });
    }
    let values = series.currents();
    let j_inf = mean(&values[n - window..]);
    let bound = tol * j_inf.abs();

    // Walk backward until a trailing mean leaves the band.
    let mut settled_start = n - window;
    let mut running: f64 = values[n - window..].iter().sum();
    for end in (window..n).rev() {
        // Window [end - window, end).
        running += values[end - window] - values[end];
        let m = running / window as f64;
        if (m - j_inf).abs() > bound {
            break;
        }
        settled_start = end - window;
    }
    let t_settle = (settled_start + window <= n - window).then(|| series.entries[settled_start].t);
    Ok(Asymptote { j_inf, t_settle })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransientPeak {
    pub t: u64,
    pub current: f64,
}

/// Fraction of `|J_inf|` a transient maximum must clear.
pub const DEFAULT_PEAK_PROMINENCE: f64 = 0.05;

/// Largest interior value of `J` over kicks `[t_start, t_end]`, reported only if
/// it exceeds both endpoint values by `prominence` (absolute units).
pub fn detect_transient_peak(
    series: &CurrentSeries,
    t_start: u64,
    t_end: u64,
    prominence: f64,
) -> Result<Option<TransientPeak>, SeriesError> {
    let first = series.at(t_start).ok_or(SeriesError::MissingKick(t_start))?;
    let last = series.at(t_end).ok_or(SeriesError::MissingKick(t_end))?;
    let interior = series
        .entries
        .iter()
        .filter(|e| e.t > t_start && e.t < t_end)
        .max_by(|a, b| a.current.total_cmp(&b.current));
    Ok(interior.and_then(|peak| {
        let floor = first.current.max(last.current) + prominence;
        (peak.current > floor).then_some(TransientPeak { t: peak.t, current: peak.current })
    }))
}

pub fn mean(values: &[f64]) -> f64 {
    let mut acc = NeumaierSum::default();
    for &v in values {
        acc.add(v);
    }
    acc.value() / values.len() as f64
}

/// Mean and blocked standard error of a correlated sequence.
///
/// Means of consecutive blocks of `block_len` values are treated as
/// independent samples; a trailing partial block is dropped. Falls back to the
/// plain standard error when fewer than two full blocks exist.
pub fn blocked_mean(values: &[f64], block_len: usize) -> (f64, f64) {
    let m = mean(values);
    let block_len = block_len.max(1);
    let blocks: Vec<f64> = values.chunks_exact(block_len).map(mean).collect();
    let samples = if blocks.len() >= 2 { &blocks[..] } else { values };
    if samples.len() < 2 {
        return (m, 0.0);
    }
    let sm = mean(samples);
    let var = samples.iter().map(|v| (v - sm).powi(2)).sum::<f64>() / (samples.len() - 1) as f64;
    (m, (var / samples.len() as f64).sqrt())
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}
