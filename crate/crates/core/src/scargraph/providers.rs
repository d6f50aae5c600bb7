//! Intensity threshold providers that stand in for learned t-link weights.

use std::fs;
use std::path::Path;

use crate::error::{CqError, Result};

/// Mean plus two population standard deviations; intensities above the
/// threshold are classified scar.
pub fn two_sd_threshold(intensities: &[f64]) -> Result<f64> {
    if intensities.len() < 2 {
        return Err(CqError::EmptyInput(format!(
            "2SD threshold needs at least 2 samples, got {}",
            intensities.len()
        )));
    }
    let n = intensities.len() as f64;
    let mean = intensities.iter().sum::<f64>() / n;
    let var = intensities
        .iter()
        .map(|&x| (x - mean) * (x - mean))
        .sum::<f64>()
        / n;
    Ok(mean + 2.0 * var.sqrt())
}

/// Otsu's threshold: histogram the samples over `[min, max]` with `bins`
/// bins and return the bin-edge threshold maximizing the between-class
/// variance of the split (ties resolved toward the lowest threshold).
pub fn otsu_threshold(intensities: &[f64], bins: usize) -> Result<f64> {
    if bins < 2 {
        return Err(CqError::InvalidArgument(format!(
            "need at least 2 bins, got {bins}"
        )));
    }
    if intensities.len() < 2 {
        return Err(CqError::EmptyInput(
            "Otsu threshold needs at least 2 samples".into(),
        ));
    }
    let lo = intensities.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = intensities.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() || hi <= lo {
        return Err(CqError::InvalidArgument(
            "all intensities identical; Otsu threshold is undefined".into(),
        ));
    }
    let width = (hi - lo) / bins as f64;
    let mut count = vec![0u64; bins];
    let mut sum = vec![0.0f64; bins];
    for &x in intensities {
        let mut b = ((x - lo) / width) as usize;
        if b >= bins {
            b = bins - 1; // x == hi lands in the last bin
        }
        count[b] += 1;
        sum[b] += x;
    }
    let total_n = intensities.len() as f64;
    let total_sum: f64 = sum.iter().sum();

    let mut best_var = f64::NEG_INFINITY;
    let mut best_threshold = lo + width;
    let mut n_lo = 0.0;
    let mut s_lo = 0.0;
    for split in 0..bins - 1 {
        n_lo += count[split] as f64;
        s_lo += sum[split];
        let n_hi = total_n - n_lo;
        if n_lo == 0.0 || n_hi == 0.0 {
            continue;
        }
        let m_lo = s_lo / n_lo;
        let m_hi = (total_sum - s_lo) / n_hi;
        let between = n_lo / total_n * (n_hi / total_n) * (m_lo - m_hi) * (m_lo - m_hi);
        if between > best_var {
            best_var = between;
            best_threshold = lo + (split + 1) as f64 * width;
        }
    }
    Ok(best_threshold)
}

/// Read an external per-node scar probability file: CSV with the header
/// `node_index,p_scar`, one row per node, covering every node exactly once.
pub fn read_probability_csv(path: &Path, node_count: usize) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CqError::Format(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "node_index,p_scar" => {}
        other => {
            return Err(CqError::Format(format!(
                "{}: expected header 'node_index,p_scar', got {other:?}",
                path.display()
            )))
        }
    }
    let mut probs = vec![f64::NAN; node_count];
    let mut filled = vec![false; node_count];
    for (lineno, line) in lines.enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut fields = trimmed.split(',');
        let bad = |msg: String| CqError::Format(format!("{} line {}: {msg}", path.display(), lineno + 2));
        let idx: usize = fields
            .next()
            .ok_or_else(|| bad("missing node_index".into()))?
            .trim()
            .parse()
            .map_err(|_| bad("bad node_index".into()))?;
        let p: f64 = fields
            .next()
            .ok_or_else(|| bad("missing p_scar".into()))?
            .trim()
            .parse()
            .map_err(|_| bad("bad p_scar".into()))?;
        if fields.next().is_some() {
            return Err(bad("too many fields".into()));
        }
        if idx >= node_count {
            return Err(CqError::Shape(format!(
                "{}: node_index {idx} out of range (node count {node_count})",
                path.display()
            )));
        }
        if filled[idx] {
            return Err(CqError::Format(format!(
                "{}: duplicate node_index {idx}",
                path.display()
            )));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(CqError::InvalidArgument(format!(
                "{}: p_scar {p} outside [0,1] at node {idx}",
                path.display()
            )));
        }
        probs[idx] = p;
        filled[idx] = true;
    }
    if let Some(missing) = filled.iter().position(|&f| !f) {
        return Err(CqError::Shape(format!(
            "{}: node {missing} has no probability row",
            path.display()
        )));
    }
    Ok(probs)
}

/// Write a labeling as CSV with the header `node_index,label`.
pub fn write_labeling_csv(path: &Path, labeling: &[u8]) -> Result<()> {
    let mut out = String::from("node_index,label\n");
    for (i, &l) in labeling.iter().enumerate() {
        out.push_str(&format!("{i},{l}\n"));
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn two_sd_closed_forms() {
        // mean 10, sigma 2 -> 14
        let samples = [8.0, 12.0, 8.0, 12.0];
        assert!((two_sd_threshold(&samples).unwrap() - 14.0).abs() < 1e-12);
        // constant samples -> mean itself
        assert_eq!(two_sd_threshold(&[7.0, 7.0, 7.0]).unwrap(), 7.0);
        // population sigma of [8,10,12] is sqrt(8/3)
        let got = two_sd_threshold(&[8.0, 10.0, 12.0]).unwrap();
        let expect = 10.0 + 2.0 * (8.0f64 / 3.0).sqrt();
        assert!((got - expect).abs() < 1e-12);
        assert!((got - 13.265986).abs() < 1e-6);
        assert!(two_sd_threshold(&[1.0]).is_err());
    }

    #[test]
    fn otsu_separates_two_masses() {
        let mut samples = vec![0.0; 50];
        samples.extend(vec![10.0; 50]);
        let t = otsu_threshold(&samples, 10).unwrap();
        assert!(t > 0.0 && t <= 10.0, "threshold {t}");
        // every separating edge ties; the lowest one wins
        assert!((t - 1.0).abs() < 1e-12);
        // it actually separates: all 0s below, all 10s above
        assert!(samples.iter().all(|&x| (x > t) == (x == 10.0)));
    }

    /// Independent exhaustive scan sharing only the candidate-edge rule:
    /// partitions the raw samples at every interior bin edge and recomputes
    /// the class statistics from scratch.
    fn otsu_bruteforce(samples: &[f64], bins: usize) -> (f64, f64) {
        let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let width = (hi - lo) / bins as f64;
        let mut best = (f64::NEG_INFINITY, lo + width);
        for k in 1..bins {
            let t = lo + k as f64 * width;
            // bin membership decides the side, as in the histogram scan
            let side = |x: f64| {
                let mut b = ((x - lo) / width) as usize;
                if b >= bins {
                    b = bins - 1;
                }
                b < k
            };
            let low: Vec<f64> = samples.iter().cloned().filter(|&x| side(x)).collect();
            let high: Vec<f64> = samples.iter().cloned().filter(|&x| !side(x)).collect();
            if low.is_empty() || high.is_empty() {
                continue;
            }
            let w0 = low.len() as f64 / samples.len() as f64;
            let w1 = high.len() as f64 / samples.len() as f64;
            let m0 = low.iter().sum::<f64>() / low.len() as f64;
            let m1 = high.iter().sum::<f64>() / high.len() as f64;
            let between = w0 * w1 * (m0 - m1) * (m0 - m1);
            if between > best.0 {
                best = (between, t);
            }
        }
        (best.1, best.0)
    }

    #[test]
    fn otsu_symmetric_bimodal_picks_the_midpoint_edge() {
        // mirror-symmetric counts, modes at the extremes, mass in between
        let counts = [5, 4, 3, 2, 1, 1, 2, 3, 4, 5];
        let mut samples = Vec::new();
        for (value, &c) in counts.iter().enumerate() {
            samples.extend(std::iter::repeat(value as f64).take(c));
        }
        let (oracle_t, oracle_var) = otsu_bruteforce(&samples, 10);
        assert!((oracle_t - 4.5).abs() < 1e-12, "oracle picked {oracle_t}");
        assert!(oracle_var > 0.0);
        let got = otsu_threshold(&samples, 10).unwrap();
        assert_eq!(got, oracle_t);
    }

    #[test]
    fn otsu_matches_exhaustive_scan_on_random_data() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(11);
        for _ in 0..25 {
            let n = rng.gen_range(5..60);
            let samples: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..9.0)).collect();
            let bins = rng.gen_range(2..24);
            let got = otsu_threshold(&samples, bins).unwrap();
            let (expect, _) = otsu_bruteforce(&samples, bins);
            assert_eq!(got, expect, "samples {samples:?} bins {bins}");
        }
    }

    #[test]
    fn otsu_rejects_degenerate_inputs() {
        assert!(otsu_threshold(&[5.0, 5.0, 5.0], 10).is_err());
        assert!(otsu_threshold(&[1.0, 2.0], 1).is_err());
        assert!(otsu_threshold(&[1.0], 4).is_err());
    }

    #[test]
    fn probability_csv_roundtrip_and_errors() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("probs.csv");
        std::fs::write(&p, "node_index,p_scar\n0,0.25\n2,1.0\n1,0.5\n").unwrap();
        let probs = read_probability_csv(&p, 3).unwrap();
        assert_eq!(probs, vec![0.25, 0.5, 1.0]);

        std::fs::write(&p, "0,0.25\n").unwrap();
        assert!(read_probability_csv(&p, 1).is_err()); // header required

        std::fs::write(&p, "node_index,p_scar\n0,0.25\n").unwrap();
        assert!(read_probability_csv(&p, 2).is_err()); // missing node

        std::fs::write(&p, "node_index,p_scar\n0,0.25\n0,0.5\n").unwrap();
        assert!(read_probability_csv(&p, 2).is_err()); // duplicate

        std::fs::write(&p, "node_index,p_scar\n5,0.25\n").unwrap();
        assert!(read_probability_csv(&p, 2).is_err()); // out of range
    }

    #[test]
    fn labeling_csv_format() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("labels.csv");
        write_labeling_csv(&p, &[1, 0, 1]).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, "node_index,label\n0,1\n1,0\n2,1\n");
    }
}
