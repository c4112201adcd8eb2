//! Kneading invariants, one-sided invariants, and long-term classification
//! (exact periodicity or Lempel-Ziv complexity) of binary symbol sequences.

use crate::integrate::{RunStatus, SymbolStream};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SymbolicError {
    #[error("window starts past sequence end (len {len}, window starts at {start})")]
    WindowPastEnd { len: usize, start: usize },
    #[error("empty symbol sequence")]
    EmptySequence,
    #[error("invalid window [{i}, {j}]")]
    InvalidWindow { i: usize, j: usize },
}

/// How a sweep cell's symbol sequence is reduced to a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodeMode {
    /// Weighted kneading sum over the window.
    Full,
    /// Count of leading 1s divided by the window end.
    OneSided,
    /// Long-term classification: periodicity or LZ complexity.
    Dcp,
}

/// Symbol-window and weighting configuration. Indices are 1-based and
/// inclusive, matching how sweep windows are quoted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KneadingConfig {
    pub i: usize,
    pub j: usize,
    /// Weight base, in (0,1) so the series converges.
    pub q: f64,
    pub mode: EncodeMode,
}

impl KneadingConfig {
    pub fn new(i: usize, j: usize, q: f64, mode: EncodeMode) -> Result<Self, SymbolicError> {
        if i == 0 || j < i {
            return Err(SymbolicError::InvalidWindow { i, j });
        }
        assert!(0.0 < q && q < 1.0, "weight base must lie in (0,1), got {q}");
        Ok(KneadingConfig { i, j, q, mode })
    }

    /// The long-window classification default, [601, 1000].
    pub fn dcp_default() -> Self {
        KneadingConfig {
            i: 601,
            j: 1000,
            q: 0.5,
            mode: EncodeMode::Dcp,
        }
    }
}

impl Default for KneadingConfig {
    fn default() -> Self {
        KneadingConfig {
            i: 1,
            j: 10,
            q: 0.5,
            mode: EncodeMode::Full,
        }
    }
}

/// A kneading value plus whether the window ran past the sequence end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KneadingValue {
    pub value: f64,
    pub truncated: bool,
}

/// K = Σ_{n=i}^{j} κₙ q^{j-n+1} over the 1-based window [i, j]; the last
/// window symbol carries weight q¹. At q = 1/2 this is the binary fraction
/// of the reversed window, so equal-length windows map to distinct dyadic
/// values.
///
/// A sequence that ended early at length L with i ≤ L < j contributes its
/// available symbols with exponents computed as if j were present (missing
/// symbols count 0) and the result is flagged truncated.
pub fn kneading_invariant(seq: &[u8], cfg: &KneadingConfig) -> Result<KneadingValue, SymbolicError> {
    if cfg.i == 0 || cfg.j < cfg.i {
        return Err(SymbolicError::InvalidWindow { i: cfg.i, j: cfg.j });
    }
    if seq.len() < cfg.i {
        return Err(SymbolicError::WindowPastEnd {
            len: seq.len(),
            start: cfg.i,
        });
    }
    let last = cfg.j.min(seq.len());
    // Sum smallest weights first for accuracy (and exactness at q = 1/2).
    let mut k = 0.0f64;
    for n in (cfg.i..=last).rev() {
        if seq[n - 1] != 0 {
            k += cfg.q.powi((cfg.j - n + 1) as i32);
        }
    }
    Ok(KneadingValue {
        value: k,
        truncated: last < cfg.j,
    })
}

/// One-sided invariant n/r where n counts the leading 1s before the first 0,
/// capped at r. A sequence starting with 0 scores 0.
pub fn one_sided_invariant(seq: &[u8], r: usize) -> Result<f64, SymbolicError> {
    if seq.is_empty() {
        return Err(SymbolicError::EmptySequence);
    }
    assert!(r >= 1, "cap must be at least 1");
    let n = seq
        .iter()
        .take(r)
        .take_while(|s| **s != 0)
        .count();
    Ok(n as f64 / r as f64)
}

/// Minimal period p ≤ len/2 with window[k] = window[k+p] for every valid k,
/// or None. The window need not be an integer number of periods long.
pub fn detect_period(window: &[u8]) -> Option<usize> {
    let n = window.len();
    for p in 1..=n / 2 {
        if (0..n - p).all(|k| window[k] == window[k + p]) {
            return Some(p);
        }
    }
    None
}

/// Classical LZ76 complexity: the number of phrases in the exhaustive
/// production parse of the window.
pub fn lz76_complexity(window: &[u8]) -> usize {
    let n = window.len();
    assert!(n > 0, "window must be nonempty");
    let s = window;
    let mut c = 1usize;
    let mut l = 1usize;
    let mut i = 0usize;
    let mut k = 1usize;
    let mut k_max = 1usize;
    loop {
        if s[i + k - 1] != s[l + k - 1] {
            if k > k_max {
                k_max = k;
            }
            i += 1;
            if i == l {
                c += 1;
                l += k_max;
                if l + 1 > n {
                    break;
                }
                i = 0;
                k = 1;
                k_max = 1;
            } else {
                k = 1;
            }
        } else {
            k += 1;
            if l + k > n {
                c += 1;
                break;
            }
        }
    }
    c
}

/// `complexity * log2(n) / n`, the scale on which random sequences sit
/// near 1 regardless of window length.
pub fn normalized_lz(complexity: usize, window_len: usize) -> f64 {
    complexity as f64 * (window_len as f64).log2() / window_len as f64
}

/// Long-term behaviour over the analysis window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LongTermClass {
    Periodic { period: usize },
    Chaotic { lz_complexity: usize, normalized: f64 },
    Escaped,
}

/// A classification plus whether the stream was too short to fill the
/// configured window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcpOutcome {
    pub class: LongTermClass,
    pub short_window: bool,
}

/// Classifies a stream over the window [cfg.i, cfg.j]: escaped streams are
/// Escaped; otherwise exact periodicity wins, else the LZ complexity is
/// reported. Streams shorter than the window are classified on the
/// available part and flagged short; a stream that never reaches the window
/// start is Chaotic(0) with the short flag.
pub fn classify_long_term(stream: &SymbolStream, cfg: &KneadingConfig) -> DcpOutcome {
    if let RunStatus::Escaped { .. } = stream.status {
        return DcpOutcome {
            class: LongTermClass::Escaped,
            short_window: false,
        };
    }
    let len = stream.symbols.len();
    if len < cfg.i {
        return DcpOutcome {
            class: LongTermClass::Chaotic {
                lz_complexity: 0,
                normalized: 0.0,
            },
            short_window: true,
        };
    }
    let window = &stream.symbols[cfg.i - 1..cfg.j.min(len)];
    let short_window = len < cfg.j;
    if window.len() >= 2 {
        if let Some(period) = detect_period(window) {
            return DcpOutcome {
                class: LongTermClass::Periodic { period },
                short_window,
            };
        }
    }
    let lz = lz76_complexity(window);
    DcpOutcome {
        class: LongTermClass::Chaotic {
            lz_complexity: lz,
            normalized: normalized_lz(lz, window.len()),
        },
        short_window,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(i: usize, j: usize) -> KneadingConfig {
        KneadingConfig::new(i, j, 0.5, EncodeMode::Full).unwrap()
    }

    #[test]
    fn kneading_worked_example() {
        let k = kneading_invariant(&[1, 0, 1], &cfg(1, 3)).unwrap();
        assert_eq!(k.value, 0.625);
        assert!(!k.truncated);
    }

    #[test]
    fn kneading_single_term_and_bounds() {
        for (i, sym) in [(1usize, 1u8), (2, 0), (3, 1)] {
            let k = kneading_invariant(&[1, 0, 1], &cfg(i, i)).unwrap();
            assert_eq!(k.value, 0.5 * sym as f64);
        }
        let ones = vec![1u8; 20];
        let k = kneading_invariant(&ones, &cfg(1, 20)).unwrap();
        assert_eq!(k.value, 1.0 - 0.5f64.powi(20));
        let zeros = vec![0u8; 20];
        assert_eq!(kneading_invariant(&zeros, &cfg(1, 20)).unwrap().value, 0.0);
    }

    #[test]
    fn kneading_truncation_keeps_exponents() {
        // Length-4 sequence on a [1,6] window: symbols keep the exponents
        // they would have had in the full window.
        let k = kneading_invariant(&[1, 1, 0, 1], &cfg(1, 6)).unwrap();
        assert!(k.truncated);
        let expect = 0.5f64.powi(6) + 0.5f64.powi(5) + 0.5f64.powi(3);
        assert_eq!(k.value, expect);
    }

    #[test]
    fn kneading_window_past_end_errors() {
        assert!(matches!(
            kneading_invariant(&[1, 0], &cfg(3, 5)),
            Err(SymbolicError::WindowPastEnd { .. })
        ));
    }

    #[test]
    fn one_sided_examples() {
        let mut seq = vec![1u8, 1, 1];
        seq.extend_from_slice(&[0; 7]);
        assert_eq!(one_sided_invariant(&seq, 10).unwrap(), 0.3);
        assert_eq!(one_sided_invariant(&[0, 1, 1], 10).unwrap(), 0.0);
        assert_eq!(one_sided_invariant(&[1; 10], 10).unwrap(), 1.0);
        assert_eq!(one_sided_invariant(&[1; 25], 10).unwrap(), 1.0);
        assert!(matches!(
            one_sided_invariant(&[], 10),
            Err(SymbolicError::EmptySequence)
        ));
    }

    #[test]
    fn period_detection_examples() {
        let alternating: Vec<u8> = (0..400).map(|k| (k % 2) as u8).collect();
        assert_eq!(detect_period(&alternating), Some(2));
        assert_eq!(detect_period(&[1; 100]), Some(1));
        assert_eq!(detect_period(&[1, 0, 0, 1, 0, 1]), None);
    }

    #[test]
    fn lz76_fixtures() {
        // Hand parse of 0001101001000101:
        //   0 | 001 | 10 | 100 | 1000 | 101  -> 6 phrases.
        let s: Vec<u8> = "0001101001000101".bytes().map(|b| b - b'0').collect();
        assert_eq!(lz76_complexity(&s), 6);
        assert_eq!(lz76_complexity(&[0; 64]), 2);
        assert_eq!(lz76_complexity(&[0; 7]), 2);
    }

    #[test]
    fn lz76_complement_invariance() {
        let s: Vec<u8> = "011010011001011010010110".bytes().map(|b| b - b'0').collect();
        let flipped: Vec<u8> = s.iter().map(|b| 1 - b).collect();
        assert_eq!(lz76_complexity(&s), lz76_complexity(&flipped));
    }

    #[test]
    fn classify_escaped_wins() {
        let stream = SymbolStream {
            symbols: vec![1, 1, 1],
            status: RunStatus::Escaped { at_symbol: 3 },
        };
        let out = classify_long_term(&stream, &KneadingConfig::dcp_default());
        assert_eq!(out.class, LongTermClass::Escaped);
    }

    #[test]
    fn classify_short_stream_flagged() {
        let stream = SymbolStream {
            symbols: vec![1, 0, 1, 0, 1, 0],
            status: RunStatus::TimedOut { symbols_emitted: 6 },
        };
        let cfg = KneadingConfig::new(3, 20, 0.5, EncodeMode::Dcp).unwrap();
        let out = classify_long_term(&stream, &cfg);
        assert!(out.short_window);
        assert_eq!(out.class, LongTermClass::Periodic { period: 2 });

        let never_reaches = SymbolStream {
            symbols: vec![1],
            status: RunStatus::TimedOut { symbols_emitted: 1 },
        };
        let out = classify_long_term(&never_reaches, &cfg);
        assert!(out.short_window);
        assert!(matches!(
            out.class,
            LongTermClass::Chaotic { lz_complexity: 0, .. }
        ));
    }
}
