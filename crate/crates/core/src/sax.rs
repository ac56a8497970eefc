//! Symbolic aggregate approximation: PAA frames, Gaussian breakpoints,
//! symbol words and the lower-bounding MINDIST.

use std::sync::OnceLock;

use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::ops::OpCounts;

pub const MIN_ALPHABET: usize = 3;
pub const MAX_ALPHABET: usize = 20;

/// The `a - 1` standard-normal quantiles at `i / a` and the `a x a` table
/// of symbol-pair distances derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakpointTable {
    alphabet: usize,
    betas: Vec<f64>,
    cells: Vec<f64>,
}

impl BreakpointTable {
    fn compute(alphabet: usize) -> Self {
        let normal = Normal::standard();
        let a = alphabet as f64;
        let mut betas = vec![0.0; alphabet - 1];
        // lower half from the quantile function, upper half mirrored so the
        // table is exactly antisymmetric
        for i in 1..=(alphabet - 1) / 2 {
            let p = i as f64 / a;
            let mut x = normal.inverse_cdf(p);
            for _ in 0..2 {
                x -= (normal.cdf(x) - p) / normal.pdf(x);
            }
            betas[i - 1] = x;
            betas[alphabet - 1 - i] = -x;
        }
        let mut cells = vec![0.0; alphabet * alphabet];
        for i in 0..alphabet {
            for j in 0..alphabet {
                let (lo, hi) = (i.min(j), i.max(j));
                if hi - lo > 1 {
                    cells[i * alphabet + j] = betas[hi - 1] - betas[lo];
                }
            }
        }
        Self {
            alphabet,
            betas,
            cells,
        }
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    /// Breakpoints in increasing order.
    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// Symbol whose interval `[beta_k, beta_{k+1})` contains `x`.
    pub fn symbol_of(&self, x: f64) -> u8 {
        self.locate(x).0
    }

    /// Binary search for the symbol of `x`, also returning the number of
    /// comparisons made.
    pub(crate) fn locate(&self, x: f64) -> (u8, u64) {
        let (mut lo, mut hi) = (0usize, self.betas.len());
        let mut probes = 0;
        while lo < hi {
            let mid = (lo + hi) / 2;
            probes += 1;
            if self.betas[mid] <= x {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        (lo as u8, probes)
    }

    #[inline]
    pub(crate) fn cell(&self, i: u8, j: u8) -> f64 {
        self.cells[i as usize * self.alphabet + j as usize]
    }
}

fn check_alphabet(a: usize) -> Result<()> {
    if (MIN_ALPHABET..=MAX_ALPHABET).contains(&a) {
        Ok(())
    } else {
        Err(Error::AlphabetSize(a))
    }
}

/// Breakpoint table for alphabet size `a`, computed once per process.
pub fn breakpoints(a: usize) -> Result<&'static BreakpointTable> {
    static TABLES: [OnceLock<BreakpointTable>; MAX_ALPHABET - MIN_ALPHABET + 1] =
        [const { OnceLock::new() }; MAX_ALPHABET - MIN_ALPHABET + 1];
    check_alphabet(a)?;
    Ok(TABLES[a - MIN_ALPHABET].get_or_init(|| BreakpointTable::compute(a)))
}

/// Frame means of a series.
#[derive(Debug, Clone, PartialEq)]
pub struct PaaVector {
    pub means: Vec<f64>,
    pub n: usize,
}

impl PaaVector {
    pub fn frames(&self) -> usize {
        self.means.len()
    }
}

pub(crate) fn check_frames(n: usize, frames: usize) -> Result<()> {
    if frames == 0 || frames > n || !n.is_multiple_of(frames) {
        return Err(Error::NotDivisor { n, frames });
    }
    Ok(())
}

pub fn paa(values: &[f64], frames: usize) -> Result<PaaVector> {
    let n = values.len();
    check_frames(n, frames)?;
    let width = n / frames;
    let means = values
        .chunks_exact(width)
        .map(|c| c.iter().sum::<f64>() / width as f64)
        .collect();
    Ok(PaaVector { means, n })
}

/// Operations spent by [`paa`]: one accumulation per point and one
/// division per frame.
pub fn paa_cost(n: usize, frames: usize) -> OpCounts {
    OpCounts {
        adds: n as u64,
        mults: frames as u64,
        ..OpCounts::ZERO
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SaxWord {
    pub symbols: Vec<u8>,
    pub alphabet: usize,
    pub n: usize,
}

impl SaxWord {
    pub fn frames(&self) -> usize {
        self.symbols.len()
    }

    /// Letter rendering, `a` for symbol 0.
    pub fn to_letters(&self) -> String {
        self.symbols.iter().map(|&s| (b'a' + s) as char).collect()
    }

    pub fn from_letters(letters: &str, alphabet: usize, n: usize) -> Result<Self> {
        check_alphabet(alphabet)?;
        let symbols = letters
            .bytes()
            .map(|b| {
                let s = b.wrapping_sub(b'a') as usize;
                if s < alphabet {
                    Ok(s as u8)
                } else {
                    Err(Error::SymbolRange {
                        symbol: s,
                        alphabet,
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            symbols,
            alphabet,
            n,
        })
    }
}

pub fn symbolize(p: &PaaVector, t: &BreakpointTable) -> SaxWord {
    SaxWord {
        symbols: p.means.iter().map(|&m| t.symbol_of(m)).collect(),
        alphabet: t.alphabet,
        n: p.n,
    }
}

/// PAA followed by symbolization.
pub fn sax_word(values: &[f64], frames: usize, t: &BreakpointTable) -> Result<SaxWord> {
    Ok(symbolize(&paa(values, frames)?, t))
}

/// Distance between two symbols: zero for equal or adjacent symbols,
/// otherwise the gap between the closest edges of their intervals.
pub fn cell_dist(i: usize, j: usize, t: &BreakpointTable) -> Result<f64> {
    for s in [i, j] {
        if s >= t.alphabet {
            return Err(Error::SymbolRange {
                symbol: s,
                alphabet: t.alphabet,
            });
        }
    }
    Ok(t.cell(i as u8, j as u8))
}

fn check_words(w1: &SaxWord, w2: &SaxWord, t: &BreakpointTable) -> Result<()> {
    if w1.frames() != w2.frames() || w1.n != w2.n {
        return Err(Error::Shape(format!(
            "words of {}/{} and {}/{} frames/points",
            w1.frames(),
            w1.n,
            w2.frames(),
            w2.n
        )));
    }
    if w1.alphabet != t.alphabet || w2.alphabet != t.alphabet {
        return Err(Error::Shape(format!(
            "alphabet sizes {} and {} against a table for {}",
            w1.alphabet, w2.alphabet, t.alphabet
        )));
    }
    Ok(())
}

pub fn mindist(w1: &SaxWord, w2: &SaxWord, t: &BreakpointTable) -> Result<f64> {
    check_words(w1, w2, t)?;
    Ok(mindist_unchecked(w1, w2, t))
}

pub(crate) fn mindist_unchecked(w1: &SaxWord, w2: &SaxWord, t: &BreakpointTable) -> f64 {
    let sum: f64 = w1
        .symbols
        .iter()
        .zip(&w2.symbols)
        .map(|(&a, &b)| {
            let c = t.cell(a, b);
            c * c
        })
        .sum();
    (w1.n as f64 / w1.frames() as f64).sqrt() * sum.sqrt()
}

/// Operations spent by [`mindist`] over `frames` symbols. The scale factor
/// `sqrt(n / N)` is a per-level constant and is not counted.
pub fn mindist_cost(frames: usize) -> OpCounts {
    let f = frames as u64;
    OpCounts {
        adds: f,
        mults: f + 1,
        sqrts: 1,
        lookups: f,
        ..OpCounts::ZERO
    }
}

pub fn paa_dist(p1: &PaaVector, p2: &PaaVector) -> Result<f64> {
    if p1.frames() != p2.frames() || p1.n != p2.n {
        return Err(Error::Shape(format!(
            "PAA vectors of {}/{} and {}/{} frames/points",
            p1.frames(),
            p1.n,
            p2.frames(),
            p2.n
        )));
    }
    let sum: f64 = p1
        .means
        .iter()
        .zip(&p2.means)
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok((p1.n as f64 / p1.frames() as f64).sqrt() * sum.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_range() {
        assert!(matches!(breakpoints(2), Err(Error::AlphabetSize(2))));
        assert!(matches!(breakpoints(21), Err(Error::AlphabetSize(21))));
        for a in 3..=20 {
            let t = breakpoints(a).unwrap();
            assert_eq!(t.betas().len(), a - 1);
            assert!(t.betas().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn table_is_cached() {
        assert!(std::ptr::eq(
            breakpoints(7).unwrap(),
            breakpoints(7).unwrap()
        ));
    }

    #[test]
    fn paa_examples() {
        let p = paa(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 3).unwrap();
        assert_eq!(p.means, vec![1.5, 3.5, 5.5]);
        let s = [0.3, -1.0, 2.0, 0.25];
        assert_eq!(paa(&s, 4).unwrap().means, s.to_vec());
        assert_eq!(paa(&[2.0; 8], 2).unwrap().means, vec![2.0, 2.0]);
        assert!(matches!(
            paa(&[0.0; 6], 4),
            Err(Error::NotDivisor { n: 6, frames: 4 })
        ));
        assert!(paa(&[0.0; 6], 0).is_err());
    }

    #[test]
    fn symbolize_examples() {
        let t3 = breakpoints(3).unwrap();
        let p = PaaVector {
            means: vec![-1.0, 0.0, 1.0],
            n: 3,
        };
        assert_eq!(symbolize(&p, t3).symbols, vec![0, 1, 2]);

        let t4 = breakpoints(4).unwrap();
        let zeros = PaaVector {
            means: vec![0.0; 4],
            n: 4,
        };
        assert_eq!(symbolize(&zeros, t4).symbols, vec![2; 4]);

        // a mean exactly on a breakpoint takes the upper interval
        for a in 3..=20 {
            let t = breakpoints(a).unwrap();
            for (k, &b) in t.betas().iter().enumerate() {
                assert_eq!(t.symbol_of(b) as usize, k + 1);
            }
        }
    }

    #[test]
    fn symbol_of_matches_linear_rule() {
        let t = breakpoints(11).unwrap();
        for i in -300..=300 {
            let x = i as f64 / 100.0;
            let linear = t.betas().iter().filter(|&&b| b <= x).count();
            assert_eq!(t.symbol_of(x) as usize, linear);
        }
    }

    #[test]
    fn cell_dist_examples() {
        let t = breakpoints(4).unwrap();
        for i in 0..4 {
            assert_eq!(cell_dist(i, i, t).unwrap(), 0.0);
        }
        assert_eq!(cell_dist(1, 2, t).unwrap(), 0.0);
        assert_eq!(cell_dist(3, 2, t).unwrap(), 0.0);
        let d = cell_dist(0, 2, t).unwrap();
        assert!((d - 0.6745).abs() < 1e-4);
        assert_eq!(d, cell_dist(2, 0, t).unwrap());
        assert!(matches!(
            cell_dist(4, 0, t),
            Err(Error::SymbolRange { symbol: 4, .. })
        ));
    }

    #[test]
    fn cell_dist_is_interval_gap() {
        for a in 3..=20 {
            let t = breakpoints(a).unwrap();
            let edge = |k: usize| -> (f64, f64) {
                let lo = if k == 0 {
                    f64::NEG_INFINITY
                } else {
                    t.betas()[k - 1]
                };
                let hi = if k == a - 1 {
                    f64::INFINITY
                } else {
                    t.betas()[k]
                };
                (lo, hi)
            };
            for i in 0..a {
                for j in 0..a {
                    let (ilo, ihi) = edge(i);
                    let (jlo, jhi) = edge(j);
                    let gap = (jlo - ihi).max(ilo - jhi).max(0.0);
                    assert!((cell_dist(i, j, t).unwrap() - gap).abs() < 1e-15);
                }
                // nondecreasing in |i - j|
                for j in i..a - 1 {
                    assert!(cell_dist(i, j + 1, t).unwrap() >= cell_dist(i, j, t).unwrap());
                }
            }
        }
    }

    #[test]
    fn mindist_examples() {
        let t = breakpoints(4).unwrap();
        let w = |s: Vec<u8>| SaxWord {
            symbols: s,
            alphabet: 4,
            n: 16,
        };
        let a = w(vec![0, 0, 2, 2]);
        let b = w(vec![2, 2, 0, 0]);
        assert_eq!(mindist(&a, &a, t).unwrap(), 0.0);
        let d = mindist(&a, &b, t).unwrap();
        let beta = t.betas()[2];
        assert!((d - 2.0 * (4.0 * beta * beta).sqrt()).abs() < 1e-12);
        assert!((d - 2.698).abs() < 1e-3);
        assert_eq!(
            mindist(&w(vec![0, 1, 2, 3]), &w(vec![1, 2, 3, 2]), t).unwrap(),
            0.0
        );

        let short = SaxWord {
            symbols: vec![0, 0],
            alphabet: 4,
            n: 16,
        };
        assert!(matches!(mindist(&a, &short, t), Err(Error::Shape(_))));
        assert!(mindist(&a, &a, breakpoints(5).unwrap()).is_err());
    }

    #[test]
    fn paa_dist_examples() {
        let p = PaaVector {
            means: vec![0.0, 0.0],
            n: 8,
        };
        let q = PaaVector {
            means: vec![3.0, 4.0],
            n: 8,
        };
        assert_eq!(paa_dist(&p, &p).unwrap(), 0.0);
        assert!((paa_dist(&p, &q).unwrap() - 10.0).abs() < 1e-12);
        let u = [0.5, -1.0, 2.0];
        let v = [1.0, 1.0, -0.5];
        let full = paa_dist(&paa(&u, 3).unwrap(), &paa(&v, 3).unwrap()).unwrap();
        assert!((full - crate::series::euclidean(&u, &v).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn letters_round_trip() {
        let w = SaxWord {
            symbols: vec![0, 19, 4],
            alphabet: 20,
            n: 9,
        };
        assert_eq!(w.to_letters(), "ate");
        assert_eq!(SaxWord::from_letters("ate", 20, 9).unwrap(), w);
        assert!(SaxWord::from_letters("aez", 20, 9).is_err());
        assert!(SaxWord::from_letters("aD", 20, 9).is_err());
    }
}
