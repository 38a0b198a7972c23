//! Versioned CSV caches of enumerated families.
//!
//! Every cache starts with a line
//! `# arithstat-cache <format-version> kind=<kind> config=<json>`;
//! readers refuse files written under another format version.

use crate::error::{Error, Result};
use crate::family::{FamilyStats, SymbolIndex};
use crate::lowlying::ln_bigint;
use crate::monicfamily::{cache_header, cache_line, parse_cache_header, parse_cache_line, FamilyRecord, FORMAT_VERSION};
use crate::polyfactor::SplittingSymbol;
use std::io::{BufRead, Write};

pub const CACHE_MAGIC: &str = "# arithstat-cache";

/// Parsed first line of a cache file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheMeta {
    pub version: String,
    pub kind: String,
    /// Configuration of the run that wrote the cache, as JSON text.
    pub config: String,
}

pub fn version_line(kind: &str, config_json: &str) -> String {
    format!("{CACHE_MAGIC} {FORMAT_VERSION} kind={kind} config={config_json}")
}

pub fn parse_version_line(line: &str) -> Result<CacheMeta> {
    let rest = line
        .strip_prefix(CACHE_MAGIC)
        .ok_or_else(|| Error::MalformedCache("missing version line".into()))?
        .trim_start();
    let (version, rest) = rest.split_once(' ').unwrap_or((rest, ""));
    if version != FORMAT_VERSION {
        return Err(Error::CacheVersion { found: version.into(), expected: FORMAT_VERSION.into() });
    }
    let (kind, config) = rest.split_once(' ').unwrap_or((rest, ""));
    let kind = kind.strip_prefix("kind=").ok_or_else(|| Error::MalformedCache("missing kind".into()))?;
    let config = config.strip_prefix("config=").unwrap_or("{}");
    Ok(CacheMeta { version: version.into(), kind: kind.into(), config: config.into() })
}

fn next_line<R: BufRead>(r: &mut R, buf: &mut String) -> Result<bool> {
    buf.clear();
    if r.read_line(buf)? == 0 {
        return Ok(false);
    }
    while buf.ends_with('\n') || buf.ends_with('\r') {
        buf.pop();
    }
    Ok(true)
}

/// Reads the version line of any cache.
pub fn read_meta<R: BufRead>(r: &mut R) -> Result<CacheMeta> {
    let mut line = String::new();
    if !next_line(r, &mut line)? {
        return Err(Error::MalformedCache("empty file".into()));
    }
    parse_version_line(&line)
}

/// Writer for monic-family caches.
pub struct MonicCacheWriter<W: Write> {
    out: W,
}

impl<W: Write> MonicCacheWriter<W> {
    pub fn new(mut out: W, config_json: &str, n: u32, primes: &[u64]) -> Result<Self> {
        writeln!(out, "{}", version_line("monic", config_json))?;
        writeln!(out, "{}", cache_header(n, primes))?;
        Ok(MonicCacheWriter { out })
    }

    pub fn write(&mut self, r: &FamilyRecord) -> Result<()> {
        writeln!(self.out, "{}", cache_line(r))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

/// Streaming reader for monic-family caches, positioned after the version line.
pub struct MonicCacheReader<R: BufRead> {
    input: R,
    pub n: u32,
    pub primes: Vec<u64>,
    buf: String,
}

impl<R: BufRead> MonicCacheReader<R> {
    pub fn new(mut input: R) -> Result<Self> {
        let mut buf = String::new();
        if !next_line(&mut input, &mut buf)? {
            return Err(Error::MalformedCache("missing header".into()));
        }
        let (n, primes) = parse_cache_header(&buf)?;
        Ok(MonicCacheReader { input, n, primes, buf })
    }
}

impl<R: BufRead> Iterator for MonicCacheReader<R> {
    type Item = Result<FamilyRecord>;
    fn next(&mut self) -> Option<Self::Item> {
        match next_line(&mut self.input, &mut self.buf) {
            Ok(false) => None,
            Ok(true) => Some(parse_cache_line(&self.buf, self.n, &self.primes)),
            Err(e) => Some(Err(e)),
        }
    }
}

/// Family statistics from the records of a monic cache.
pub fn monic_cache_stats<R: BufRead>(reader: MonicCacheReader<R>) -> Result<FamilyStats> {
    let index = SymbolIndex::new(reader.n);
    let mut stats = FamilyStats::new(&index, reader.primes.clone());
    let mut codes = vec![0u8; reader.primes.len()];
    for rec in reader {
        let rec = rec?;
        for (slot, s) in codes.iter_mut().zip(rec.splitting.values()) {
            *slot = index.code(s);
        }
        stats.add(&codes, ln_bigint(&rec.conductor)?);
    }
    Ok(stats)
}

/// Family statistics from a cubic-field cache (`a,b,c,d,disc,ntr,resolvent_disc,p2,...`),
/// positioned after the version line; the conductor is `|disc|`.
pub fn cubic_cache_stats<R: BufRead>(mut input: R) -> Result<FamilyStats> {
    let mut buf = String::new();
    if !next_line(&mut input, &mut buf)? {
        return Err(Error::MalformedCache("missing header".into()));
    }
    let cols: Vec<&str> = buf.split(',').collect();
    if cols.len() < 7 || cols[..7] != ["a", "b", "c", "d", "disc", "ntr", "resolvent_disc"] {
        return Err(Error::MalformedCache(format!("unexpected header: {buf}")));
    }
    let bad = |l: &str| Error::MalformedCache(l.chars().take(80).collect());
    let primes = cols[7..]
        .iter()
        .map(|c| c.strip_prefix('p').and_then(|v| v.parse().ok()).ok_or_else(|| bad(&buf)))
        .collect::<Result<Vec<u64>>>()?;
    let index = SymbolIndex::new(3);
    let mut stats = FamilyStats::new(&index, primes.clone());
    let mut codes = vec![0u8; primes.len()];
    while next_line(&mut input, &mut buf)? {
        let f: Vec<&str> = buf.split(',').collect();
        if f.len() != 7 + primes.len() {
            return Err(bad(&buf));
        }
        let disc: i64 = f[4].parse().map_err(|_| bad(&buf))?;
        for (slot, v) in codes.iter_mut().zip(&f[7..]) {
            let s: SplittingSymbol = v.parse()?;
            if s.degree() != 3 {
                return Err(bad(&buf));
            }
            *slot = index.code(&s);
        }
        stats.add(&codes, (disc.unsigned_abs() as f64).ln());
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monicfamily::{run_monic, MonicRunConfig};

    #[test]
    fn version_line_roundtrip() {
        let l = version_line("monic", "{\"x\":100}");
        let m = parse_version_line(&l).unwrap();
        assert_eq!((m.kind.as_str(), m.config.as_str()), ("monic", "{\"x\":100}"));
        let old = l.replace(FORMAT_VERSION, "arithstat-0");
        assert!(matches!(parse_version_line(&old), Err(Error::CacheVersion { .. })));
        assert!(matches!(parse_version_line("id,n,a1"), Err(Error::MalformedCache(_))));
    }

    #[test]
    fn monic_cache_roundtrip() {
        let cfg = MonicRunConfig::new(3, 3000, 30);
        let mut records = Vec::new();
        let mut sink = |r: FamilyRecord| records.push(r);
        run_monic(&cfg, Some(&mut sink)).unwrap();
        assert!(records.len() > 100);
        let mut w = MonicCacheWriter::new(Vec::new(), "{}", 3, &cfg.primes).unwrap();
        for r in &records {
            w.write(r).unwrap();
        }
        let bytes = w.finish().unwrap();
        let mut input = std::io::BufReader::new(&bytes[..]);
        let meta = read_meta(&mut input).unwrap();
        assert_eq!(meta.kind, "monic");
        let back: Vec<FamilyRecord> = MonicCacheReader::new(input).unwrap().map(|r| r.unwrap()).collect();
        assert_eq!(back, records);
    }
}
