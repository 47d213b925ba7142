//! Append-only on-disk cache of certified point decisions.
//!
//! One JSON object per line, keyed by the exact rational coordinates and an
//! algorithm version. Lines that fail to parse, carry another version, or
//! hold a cycle that does not verify are skipped.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{cycle_canonicalize, verify_cycle};
use crate::param::{parse_rational, ParamVector, Rational};
use crate::regions::Verdict;

/// Bumped whenever a change could alter a certified verdict.
pub const ALGORITHM_VERSION: &str = "srs-lab-certified/1";

#[derive(Serialize, Deserialize)]
struct Record {
    version: String,
    r0: String,
    r1: String,
    verdict: Verdict,
}

#[derive(Debug)]
pub struct DecisionCache {
    path: PathBuf,
    version: String,
    entries: HashMap<(Rational, Rational), Verdict>,
    skipped: usize,
}

impl DecisionCache {
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        Self::open_with_version(path, ALGORITHM_VERSION)
    }

    /// Loads every valid record of `version`; a missing file is an empty
    /// cache.
    pub fn open_with_version(path: impl AsRef<Path>, version: &str) -> io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut cache = Self {
            path: path.clone(),
            version: version.to_string(),
            entries: HashMap::new(),
            skipped: 0,
        };
        let file = match File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(e),
        };
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match cache.parse_line(&line) {
                Ok(Some((key, verdict))) => {
                    cache.entries.insert(key, verdict);
                }
                Ok(None) => {}
                Err(reason) => {
                    log::warn!("{}:{}: skipping cache entry: {reason}", path.display(), lineno + 1);
                    cache.skipped += 1;
                }
            }
        }
        Ok(cache)
    }

    fn parse_line(&self, line: &str) -> Result<Option<((Rational, Rational), Verdict)>, String> {
        let rec: Record = serde_json::from_str(line).map_err(|e| e.to_string())?;
        if rec.version != self.version {
            return Ok(None);
        }
        let r0 = parse_rational(&rec.r0).map_err(|e| e.to_string())?;
        let r1 = parse_rational(&rec.r1).map_err(|e| e.to_string())?;
        if let Verdict::NotInDStar { cycle, .. } = &rec.verdict {
            let canonical = cycle_canonicalize(cycle.entries()).map_err(|e| e.to_string())?;
            let r = ParamVector::from_rationals(&[r0, r1]).map_err(|e| e.to_string())?;
            if &canonical != cycle || !verify_cycle(&r, cycle) {
                return Err(format!("cycle {cycle} does not verify"));
            }
        }
        Ok(Some(((r0, r1), rec.verdict)))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of corrupt lines skipped on load.
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    pub fn lookup(&self, r0: &Rational, r1: &Rational) -> Option<&Verdict> {
        self.entries.get(&(*r0, *r1))
    }

    pub fn store(&mut self, r0: &Rational, r1: &Rational, verdict: &Verdict) -> io::Result<()> {
        self.store_all(std::iter::once((*r0, *r1, verdict)))
    }

    /// Appends several records with one open of the file.
    pub fn store_all<'a>(
        &mut self,
        records: impl IntoIterator<Item = (Rational, Rational, &'a Verdict)>,
    ) -> io::Result<()> {
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        let mut buf = Vec::new();
        for (r0, r1, verdict) in records {
            let rec = Record {
                version: self.version.clone(),
                r0: r0.to_string(),
                r1: r1.to_string(),
                verdict: verdict.clone(),
            };
            serde_json::to_writer(&mut buf, &rec)?;
            buf.push(b'\n');
            self.entries.insert((r0, r1), verdict.clone());
        }
        file.write_all(&buf)?;
        file.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::Rule;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn round_trip_and_version_bump() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let v = Verdict::InDStar {
            rule: Rule::Certified,
        };
        let mut c = DecisionCache::open(&path).unwrap();
        assert!(c.lookup(&q(3, 2), &q(0, 1)).is_none());
        c.store(&q(3, 2), &q(0, 1), &v).unwrap();

        let c = DecisionCache::open(&path).unwrap();
        assert_eq!(c.lookup(&q(3, 2), &q(0, 1)), Some(&v));
        assert!(c.lookup(&q(3, 2), &q(1, 1)).is_none());

        let c = DecisionCache::open_with_version(&path, "other").unwrap();
        assert!(c.lookup(&q(3, 2), &q(0, 1)).is_none());
    }

    #[test]
    fn corrupt_and_false_entries_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let good = format!(
            r#"{{"version":"{ALGORITHM_VERSION}","r0":"6/5","r1":"-3/2","verdict":{{"status":"NotInDStar","cycle":[1],"rule":"Certified"}}}}"#
        );
        let wrong = format!(
            r#"{{"version":"{ALGORITHM_VERSION}","r0":"3/2","r1":"0","verdict":{{"status":"NotInDStar","cycle":[1],"rule":"Certified"}}}}"#
        );
        std::fs::write(&path, format!("{good}\nnot json\n{wrong}\n{{\"version\":1}}\n")).unwrap();
        let c = DecisionCache::open(&path).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.skipped(), 3);
        assert!(c.lookup(&q(6, 5), &q(-3, 2)).is_some());
    }
}
