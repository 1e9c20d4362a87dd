//! Binned delay-time histograms and their text file format.
//!
//! Files are `#`-prefixed header lines followed by `bin_center_ns,counts`
//! rows. Header lines of the form `# key = value` are kept as metadata. A
//! non-numeric first row is read as column names; tables with more than two
//! columns contribute their `gamma_c` column (or the last one) as counts, so
//! model curves written by `eval` can be fitted directly.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Upper bound on the number of bins a window may be split into.
pub const MAX_BINS: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceHistogram {
    /// Ascending bin edges in seconds; one more than `counts`.
    pub bin_edges: Vec<f64>,
    /// Counts per bin. Simulated histograms hold integers; model curves may not.
    pub counts: Vec<f64>,
    /// Provenance as ordered key/value pairs.
    pub metadata: Vec<(String, String)>,
}

impl CoincidenceHistogram {
    /// Empty histogram of uniform bins covering `[lo, hi)`.
    pub fn uniform(lo: f64, hi: f64, bin_width: f64) -> Result<Self> {
        let n = uniform_bin_count(lo, hi, bin_width)?;
        let bin_edges = (0..=n).map(|i| lo + i as f64 * bin_width).collect();
        Ok(Self {
            bin_edges,
            counts: vec![0.0; n],
            metadata: Vec::new(),
        })
    }

    /// Builds uniform bins around equally spaced centres.
    pub fn from_centers(centers: &[f64], counts: Vec<f64>) -> Result<Self> {
        if centers.len() != counts.len() {
            return Err(Error::Binning(format!(
                "{} centres but {} counts",
                centers.len(),
                counts.len()
            )));
        }
        if centers.len() < 2 {
            return Err(Error::Binning("need at least two bins".into()));
        }
        let width = (centers[centers.len() - 1] - centers[0]) / (centers.len() - 1) as f64;
        if !width.is_finite() || width <= 0.0 {
            return Err(Error::Binning("bin centres must be ascending".into()));
        }
        for (i, pair) in centers.windows(2).enumerate() {
            let step = pair[1] - pair[0];
            if (step - width).abs() > 1e-3 * width {
                return Err(Error::Binning(format!(
                    "bin centres must be equally spaced (step {i} is {step}, expected {width})"
                )));
            }
        }
        if let Some(bad) = counts.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::Binning(format!(
                "counts must be finite and >= 0, got {bad}"
            )));
        }
        let lo = centers[0] - width / 2.0;
        let bin_edges = (0..=centers.len()).map(|i| lo + i as f64 * width).collect();
        Ok(Self {
            bin_edges,
            counts,
            metadata: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn lo(&self) -> f64 {
        self.bin_edges[0]
    }

    pub fn hi(&self) -> f64 {
        self.bin_edges[self.bin_edges.len() - 1]
    }

    pub fn bin_width(&self, i: usize) -> f64 {
        self.bin_edges[i + 1] - self.bin_edges[i]
    }

    pub fn centers(&self) -> Vec<f64> {
        self.bin_edges
            .windows(2)
            .map(|e| 0.5 * (e[0] + e[1]))
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    /// Index of the bin containing `tau` (half-open bins; `None` outside).
    pub fn bin_index(&self, tau: f64) -> Option<usize> {
        let lo = self.lo();
        let hi = self.hi();
        if !(tau >= lo && tau < hi) {
            return None;
        }
        let n = self.counts.len();
        let width = (hi - lo) / n as f64;
        let mut i = (((tau - lo) / width) as usize).min(n - 1);
        // uniform edges accumulate rounding; nudge to the bin whose edges bracket tau
        while i > 0 && tau < self.bin_edges[i] {
            i -= 1;
        }
        while i + 1 < n && tau >= self.bin_edges[i + 1] {
            i += 1;
        }
        Some(i)
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let key = key.into();
        let value = value.into();
        match self.metadata.iter_mut().find(|(k, _)| *k == key) {
            Some(entry) => entry.1 = value,
            None => self.metadata.push((key, value)),
        }
    }

    /// Serializes to the text format. Bin centres are printed in ns with six
    /// decimals, counts with their shortest round-trip representation.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("# coincidence histogram\n");
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out.push_str("bin_center_ns,counts\n");
        for (c, n) in self.centers().iter().zip(&self.counts) {
            let _ = writeln!(out, "{:.6},{}", c * 1e9, n);
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// Parses the text format; `path` is only used in error messages.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut metadata = Vec::new();
        let mut column: Option<usize> = None;
        let mut width: Option<usize> = None;
        let mut centers = Vec::new();
        let mut counts = Vec::new();
        let mut last_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((k, v)) = comment.split_once('=') {
                    metadata.push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() < 2 {
                return Err(err(
                    line_no,
                    format!("expected at least two comma-separated fields, got `{line}`"),
                ));
            }
            if centers.is_empty() && column.is_none() && fields[0].parse::<f64>().is_err() {
                column = Some(
                    fields
                        .iter()
                        .position(|f| *f == "gamma_c" || *f == "counts")
                        .unwrap_or(fields.len() - 1),
                );
                width = Some(fields.len());
                continue;
            }
            match width {
                Some(w) if w != fields.len() => {
                    return Err(err(
                        line_no,
                        format!("expected {w} fields, got {}", fields.len()),
                    ))
                }
                None => width = Some(fields.len()),
                _ => {}
            }
            let col = *column.get_or_insert(if fields.len() == 2 {
                1
            } else {
                fields.len() - 1
            });
            let center: f64 = fields[0]
                .parse()
                .map_err(|_| err(line_no, format!("bad bin centre `{}`", fields[0])))?;
            let count: f64 = fields[col]
                .parse()
                .map_err(|_| err(line_no, format!("bad count `{}`", fields[col])))?;
            if !center.is_finite() {
                return Err(err(
                    line_no,
                    format!("bin centre must be finite, got {center}"),
                ));
            }
            if !count.is_finite() || count < 0.0 {
                return Err(err(
                    line_no,
                    format!("count must be finite and >= 0, got {count}"),
                ));
            }
            centers.push(center * 1e-9);
            counts.push(count);
        }

        if centers.len() < 2 {
            return Err(err(
                last_line.max(1),
                format!("expected at least two data rows, found {}", centers.len()),
            ));
        }
        let mut hist =
            Self::from_centers(&centers, counts).map_err(|e| err(last_line, e.to_string()))?;
        hist.metadata = metadata;
        Ok(hist)
    }
}

/// Validates a uniform binning and returns the number of bins.
pub fn uniform_bin_count(lo: f64, hi: f64, bin_width: f64) -> Result<usize> {
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::Binning(format!(
            "window must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    if !bin_width.is_finite() || bin_width <= 0.0 {
        return Err(Error::Binning(format!(
            "bin width must be > 0, got {bin_width}"
        )));
    }
    let exact = (hi - lo) / bin_width;
    if exact > MAX_BINS as f64 {
        return Err(Error::Binning(format!(
            "{exact:.0} bins exceeds the limit of {MAX_BINS}"
        )));
    }
    let n = exact.round();
    if n < 1.0 || (exact - n).abs() > 1e-6 * n.max(1.0) {
        return Err(Error::Binning(format!(
            "window width {} is not a whole number of {bin_width} bins",
            hi - lo
        )));
    }
    Ok(n as usize)
}
