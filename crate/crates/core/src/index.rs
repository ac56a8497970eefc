//! Offline phase: per-series, per-level residuals and SAX words, plus the
//! line-based persisted form.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pla::fit_residual;
use crate::sax::{self, breakpoints, SaxWord};
use crate::series::{Dataset, SeriesId};

const MAGIC: &str = "FASTSAX 1";

/// Frame counts of the representation levels, finest first, and the
/// alphabet size shared by all levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelConfig {
    levels: Vec<usize>,
    alphabet: usize,
}

impl LevelConfig {
    /// Levels may be given in any order; they are stored with the most
    /// frames first (level 0).
    pub fn new(mut levels: Vec<usize>, alphabet: usize) -> Result<Self> {
        breakpoints(alphabet)?;
        if levels.is_empty() {
            return Err(Error::Levels("at least one level is required".into()));
        }
        if levels.contains(&0) {
            return Err(Error::Levels("frame counts must be positive".into()));
        }
        levels.sort_unstable_by(|a, b| b.cmp(a));
        if let Some(w) = levels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Levels(format!("duplicate frame count {}", w[0])));
        }
        Ok(Self { levels, alphabet })
    }

    /// Default levels for length `n` with the given alphabet.
    pub fn default_for(n: usize, alphabet: usize) -> Result<Self> {
        Self::new(default_levels(n), alphabet)
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn with_alphabet(&self, alphabet: usize) -> Result<Self> {
        Self::new(self.levels.clone(), alphabet)
    }

    /// Checks that every frame count divides `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        for &frames in &self.levels {
            sax::check_frames(n, frames)?;
        }
        Ok(())
    }

    /// True when every coarser level's frames are unions of the next finer
    /// level's frames.
    pub fn is_nested(&self) -> bool {
        self.levels.windows(2).all(|w| w[0] % w[1] == 0)
    }

    pub fn levels_string(&self) -> String {
        join(&self.levels, ",")
    }
}

fn join(levels: &[usize], sep: &str) -> String {
    levels
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(sep)
}

/// Divisors of `n` closest to `n/4`, `n/8` and `n/16`, with at least two
/// frames, deduplicated and ordered finest first. Ties go to the larger
/// divisor.
pub fn default_levels(n: usize) -> Vec<usize> {
    let divisors: Vec<usize> = (2..=n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut out = Vec::new();
    for k in [4.0, 8.0, 16.0] {
        let target = n as f64 / k;
        let best = divisors.iter().copied().min_by(|&a, &b| {
            let da = (a as f64 - target).abs();
            let db = (b as f64 - target).abs();
            da.total_cmp(&db).then(b.cmp(&a))
        });
        if let Some(d) = best {
            if !out.contains(&d) {
                out.push(d);
            }
        }
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelEntry {
    /// Distance from the series to its piecewise-linear fit at this level.
    pub residual: f64,
    pub word: SaxWord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesEntry {
    pub id: SeriesId,
    pub levels: Vec<LevelEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiLevelIndex {
    pub config: LevelConfig,
    pub n: usize,
    pub entries: Vec<SeriesEntry>,
    pub fingerprint: String,
}

/// Residual and word of one series at every level.
pub fn represent(values: &[f64], cfg: &LevelConfig) -> Result<Vec<LevelEntry>> {
    let table = breakpoints(cfg.alphabet)?;
    cfg.levels
        .iter()
        .map(|&frames| {
            Ok(LevelEntry {
                residual: fit_residual(values, frames)?,
                word: sax::sax_word(values, frames, table)?,
            })
        })
        .collect()
}

/// Builds the index. A dataset not yet normalized is normalized first; the
/// fingerprint always describes the normalized series.
pub fn build_index(d: &Dataset, cfg: &LevelConfig) -> Result<MultiLevelIndex> {
    cfg.validate(d.n())?;
    let normalized;
    let d = if d.is_normalized() {
        d
    } else {
        normalized = d.clone().normalize()?;
        &normalized
    };
    let entries = d
        .series()
        .par_iter()
        .map(|s| {
            Ok(SeriesEntry {
                id: s.id,
                levels: represent(&s.values, cfg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MultiLevelIndex {
        config: cfg.clone(),
        n: d.n(),
        entries,
        fingerprint: d.fingerprint(),
    })
}

impl MultiLevelIndex {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn check_dataset(&self, d: &Dataset) -> Result<()> {
        let fp = d.fingerprint();
        if fp != self.fingerprint {
            return Err(Error::Fingerprint {
                index: self.fingerprint.clone(),
                dataset: fp,
            });
        }
        Ok(())
    }

    /// Recomputes every entry from the normalized dataset and lists the
    /// disagreements. Residuals are compared with an absolute tolerance of
    /// 1e-9, words exactly.
    pub fn recompute_mismatches(&self, d: &Dataset) -> Result<Vec<String>> {
        self.check_dataset(d)?;
        let mut bad = Vec::new();
        for (entry, s) in self.entries.iter().zip(d.series()) {
            if entry.id != s.id {
                bad.push(format!("series {} stored in place of {}", entry.id, s.id));
                continue;
            }
            let fresh = represent(&s.values, &self.config)?;
            for (level, (stored, fresh)) in entry.levels.iter().zip(&fresh).enumerate() {
                if (stored.residual - fresh.residual).abs() > 1e-9 {
                    bad.push(format!(
                        "series {} level {level}: residual {} != {}",
                        s.id, stored.residual, fresh.residual
                    ));
                }
                if stored.word != fresh.word {
                    bad.push(format!(
                        "series {} level {level}: word {} != {}",
                        s.id,
                        stored.word.to_letters(),
                        fresh.word.to_letters()
                    ));
                }
            }
        }
        Ok(bad)
    }

    /// Persisted text form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(MAGIC);
        out.push('\n');
        let _ = writeln!(
            out,
            "n={} a={} levels={} count={}",
            self.n,
            self.config.alphabet,
            self.config.levels_string(),
            self.entries.len()
        );
        let _ = writeln!(out, "fingerprint={}", self.fingerprint);
        for e in &self.entries {
            for (level, le) in e.levels.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{} {} {:.16e} {}",
                    e.id,
                    level,
                    le.residual,
                    le.word.to_letters()
                );
            }
        }
        let digest = hex::encode(Sha256::digest(out.as_bytes()));
        let _ = writeln!(out, "checksum={digest}");
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let first = text.split('\n').next().unwrap_or("");
        if first != MAGIC {
            return Err(Error::Version(first.chars().take(40).collect()));
        }
        let body = text
            .strip_suffix('\n')
            .ok_or_else(|| Error::Format("truncated: missing final newline".into()))?;
        let split = body
            .rfind('\n')
            .ok_or_else(|| Error::Format("truncated: no checksum line".into()))?;
        let (covered, last) = (&text[..split + 1], &body[split + 1..]);
        let stored = last
            .strip_prefix("checksum=")
            .ok_or_else(|| Error::Format("truncated: last line is not a checksum".into()))?;
        let computed = hex::encode(Sha256::digest(covered.as_bytes()));
        if stored != computed {
            return Err(Error::Checksum {
                stored: stored.to_string(),
                computed,
            });
        }
        parse_body(covered)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let bytes = fs::read(path)?;
        let text = String::from_utf8(bytes)
            .map_err(|_| Error::Format("index file is not valid UTF-8".into()))?;
        Self::from_text(&text)
    }
}

pub fn save_index(idx: &MultiLevelIndex, path: impl AsRef<Path>) -> Result<()> {
    idx.save(path)
}

pub fn load_index(path: impl AsRef<Path>) -> Result<MultiLevelIndex> {
    MultiLevelIndex::load(path)
}

fn field<'a>(token: Option<&'a str>, key: &str) -> Result<&'a str> {
    token
        .and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| Error::Format(format!("expected `{key}=` in header")))
}

fn number<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Format(format!("bad {what}: {s:?}")))
}

fn parse_body(text: &str) -> Result<MultiLevelIndex> {
    let mut lines = text.lines();
    lines.next();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("missing header line".into()))?;
    let mut tokens = header.split(' ');
    let n: usize = number(field(tokens.next(), "n")?, "n")?;
    let alphabet: usize = number(field(tokens.next(), "a")?, "alphabet size")?;
    let levels = field(tokens.next(), "levels")?
        .split(',')
        .map(|s| number(s, "level"))
        .collect::<Result<Vec<usize>>>()?;
    let count: usize = number(field(tokens.next(), "count")?, "count")?;
    if tokens.next().is_some() {
        return Err(Error::Format("trailing header fields".into()));
    }
    let config = LevelConfig::new(levels.clone(), alphabet)?;
    if config.levels != levels {
        return Err(Error::Format("levels not in descending order".into()));
    }
    config.validate(n)?;
    let fingerprint = field(lines.next(), "fingerprint")?.to_string();

    let mut entries = Vec::with_capacity(count);
    for _ in 0..count {
        let mut id = None;
        let mut per_level = Vec::with_capacity(config.len());
        for (level, &frames) in config.levels.iter().enumerate() {
            let line = lines
                .next()
                .ok_or_else(|| Error::Format("fewer series lines than count".into()))?;
            let parts: Vec<&str> = line.split(' ').collect();
            let [sid, lvl, res, word] = parts[..] else {
                return Err(Error::Format(format!("malformed entry line {line:?}")));
            };
            let sid = SeriesId(number(sid, "series id")?);
            match id {
                None => id = Some(sid),
                Some(prev) if prev != sid => {
                    return Err(Error::Format(format!(
                        "series {prev} has {level} levels, expected {}",
                        config.len()
                    )))
                }
                Some(_) => {}
            }
            if number::<usize>(lvl, "level index")? != level {
                return Err(Error::Format(format!("unexpected level index in {line:?}")));
            }
            let residual: f64 = number(res, "residual")?;
            if !(residual.is_finite() && residual >= 0.0) {
                return Err(Error::Format(format!("invalid residual {res:?}")));
            }
            let word = SaxWord::from_letters(word, alphabet, n)?;
            if word.frames() != frames {
                return Err(Error::Format(format!(
                    "word of {} symbols at a level of {frames} frames",
                    word.frames()
                )));
            }
            per_level.push(LevelEntry { residual, word });
        }
        entries.push(SeriesEntry {
            id: id.expect("at least one level"),
            levels: per_level,
        });
    }
    if lines.next().is_some() {
        return Err(Error::Format("more series lines than count".into()));
    }
    Ok(MultiLevelIndex {
        config,
        n,
        entries,
        fingerprint,
    })
}
