//! Zero-table file formats: plain ordinate lists for ingest, and a
//! checksummed CSV cache whose float fields round-trip bit-exactly.
//!
//! Ingest accepts one ordinate per line, '#' comments and blank lines
//! allowed, strictly ascending; S and the phase are recomputed from theta.
//! The cache stores every entry field verbatim (gamma at 20 significant
//! digits, the rest at 18, both beyond the 17 needed for exact f64
//! round-trip) and ends with an FNV-1a-64 checksum over all prior bytes,
//! so loading never re-derives anything and corruption is detected before
//! any value is trusted.

use crate::zeros::{make_entry, TableSource, ZeroEntry, ZeroTable};
use crate::{Error, Result};
use num_complex::Complex64;
use std::path::Path;

const CACHE_MAGIC: &str = "ZPD-CACHE v1";

pub fn ingest_zero_table(path: &Path) -> Result<ZeroTable> {
    let text = std::fs::read_to_string(path)?;
    let mut gammas: Vec<f64> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let g: f64 = body.parse().map_err(|e| Error::Parse {
            line,
            msg: format!("bad ordinate {body:?}: {e}"),
        })?;
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::Parse {
                line,
                msg: format!("ordinate must be positive and finite, got {g}"),
            });
        }
        if let Some(&prev) = gammas.last() {
            if g <= prev {
                return Err(Error::Parse {
                    line,
                    msg: format!("ordinates must be strictly ascending: {g} after {prev}"),
                });
            }
        }
        gammas.push(g);
    }
    let height_max = gammas.last().copied().unwrap_or(0.0);
    let entries = gammas
        .iter()
        .enumerate()
        .map(|(i, &g)| make_entry(i as u64 + 1, g))
        .collect();
    Ok(ZeroTable {
        entries,
        height_max,
        source: TableSource::Ingested,
    })
}

pub fn cache_store(table: &ZeroTable, path: &Path) -> Result<()> {
    use std::fmt::Write as _;
    let source = match table.source {
        TableSource::Computed => "computed",
        TableSource::Ingested => "ingested",
    };
    let mut buf = String::new();
    writeln!(buf, "{CACHE_MAGIC} height={:.19e} source={source}", table.height_max).unwrap();
    for e in &table.entries {
        writeln!(
            buf,
            "{},{:.19e},{:.17e},{:.17e},{:.17e}",
            e.index, e.gamma, e.s_at_gamma, e.phase.re, e.phase.im
        )
        .unwrap();
    }
    let sum = fnv1a64(buf.as_bytes());
    writeln!(buf, "CHECKSUM {sum:016x}").unwrap();
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn cache_load(path: &Path) -> Result<ZeroTable> {
    let text = std::fs::read_to_string(path)?;
    if !text.starts_with(CACHE_MAGIC) {
        return Err(Error::CacheFormat(format!(
            "missing {CACHE_MAGIC} header in {}",
            path.display()
        )));
    }
    let tail = text.rfind("CHECKSUM ").ok_or_else(|| {
        Error::CacheFormat("missing CHECKSUM trailer".into())
    })?;
    if tail > 0 && text.as_bytes()[tail - 1] != b'\n' {
        return Err(Error::CacheFormat("CHECKSUM not at line start".into()));
    }
    let stored = text[tail + "CHECKSUM ".len()..].trim().to_string();
    let computed = format!("{:016x}", fnv1a64(text[..tail].as_bytes()));
    if stored != computed {
        return Err(Error::ChecksumMismatch { stored, computed });
    }

    let mut lines = text[..tail].lines();
    let header = lines.next().unwrap_or("");
    let rest = header[CACHE_MAGIC.len()..].trim();
    let mut height_max = None;
    let mut source = None;
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("height=") {
            height_max = v.parse::<f64>().ok();
        } else if let Some(v) = tok.strip_prefix("source=") {
            source = match v {
                "computed" => Some(TableSource::Computed),
                "ingested" => Some(TableSource::Ingested),
                _ => None,
            };
        }
    }
    let (height_max, source) = match (height_max, source) {
        (Some(h), Some(s)) => (h, s),
        _ => return Err(Error::CacheFormat(format!("unreadable header {header:?}"))),
    };

    let mut entries: Vec<ZeroEntry> = Vec::new();
    for row in lines {
        let cols: Vec<&str> = row.split(',').collect();
        if cols.len() != 5 {
            return Err(Error::CacheFormat(format!(
                "expected 5 comma-separated fields, got {} in {row:?}",
                cols.len()
            )));
        }
        let bad = |what: &str| Error::CacheFormat(format!("bad {what} in {row:?}"));
        let index: u64 = cols[0].parse().map_err(|_| bad("index"))?;
        let gamma: f64 = cols[1].parse().map_err(|_| bad("gamma"))?;
        let s_at_gamma: f64 = cols[2].parse().map_err(|_| bad("s value"))?;
        let re: f64 = cols[3].parse().map_err(|_| bad("phase re"))?;
        let im: f64 = cols[4].parse().map_err(|_| bad("phase im"))?;
        entries.push(ZeroEntry {
            index,
            gamma,
            s_at_gamma,
            phase: Complex64::new(re, im),
            multiplicity: 1,
        });
    }
    Ok(ZeroTable {
        entries,
        height_max,
        source,
    })
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    const REF_PATH: &str = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/data/zeros_ref_120.txt"
    );

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn ingest_reads_plain_ordinates() {
        let f = write_temp("14.134725141734693790\n21.022039638771554993\n");
        let t = ingest_zero_table(f.path()).unwrap();
        assert_eq!(t.entries.len(), 2);
        assert_eq!(t.source, TableSource::Ingested);
        assert_eq!(t.entries[0].index, 1);
        assert_eq!(t.entries[1].index, 2);
        assert!((t.entries[0].gamma - 14.134725141734694).abs() < 1e-14);
        assert_eq!(t.height_max, t.entries[1].gamma);
        for e in &t.entries {
            assert!((e.phase.norm() - 1.0).abs() <= 1e-12);
            assert!(e.s_at_gamma.abs() < 1.5);
        }
    }

    #[test]
    fn ingest_skips_comments_and_blank_lines() {
        let f = write_temp("# table header\n\n14.1347 # first\n\n# mid\n21.0220\n");
        let t = ingest_zero_table(f.path()).unwrap();
        assert_eq!(t.entries.len(), 2);
        assert_eq!(t.height_max, 21.0220);
    }

    #[test]
    fn ingest_empty_gives_zero_height() {
        let f = write_temp("# nothing here\n\n");
        let t = ingest_zero_table(f.path()).unwrap();
        assert!(t.entries.is_empty());
        assert_eq!(t.height_max, 0.0);
    }

    #[test]
    fn ingest_rejects_disorder_with_line_number() {
        let f = write_temp("14.13\n13.00\n");
        match ingest_zero_table(f.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn ingest_rejects_garbage_with_physical_line_number() {
        let f = write_temp("# comment\n14.13\nnot-a-number\n");
        match ingest_zero_table(f.path()) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("not-a-number"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let f = write_temp("14.13\n-2.0\n");
        assert!(matches!(
            ingest_zero_table(f.path()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn reference_file_ingests_cleanly() {
        let t = ingest_zero_table(Path::new(REF_PATH)).unwrap();
        assert_eq!(t.entries.len(), 120);
        assert!((t.entries[0].gamma - 14.134725141734694).abs() < 1e-14);
        assert!((t.height_max - 269.9704490239976).abs() < 1e-12);
        for w in t.entries.windows(2) {
            assert!(w[0].gamma < w[1].gamma);
        }
    }

    #[test]
    fn cache_roundtrip_is_bitwise() {
        let t = ingest_zero_table(Path::new(REF_PATH)).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        cache_store(&t, f.path()).unwrap();
        let back = cache_load(f.path()).unwrap();
        assert_eq!(back.source, TableSource::Ingested);
        assert_eq!(back.height_max.to_bits(), t.height_max.to_bits());
        assert_eq!(back.entries.len(), t.entries.len());
        for (a, b) in t.entries.iter().zip(&back.entries) {
            assert_eq!(a.index, b.index);
            assert_eq!(a.gamma.to_bits(), b.gamma.to_bits());
            assert_eq!(a.s_at_gamma.to_bits(), b.s_at_gamma.to_bits());
            assert_eq!(a.phase.re.to_bits(), b.phase.re.to_bits());
            assert_eq!(a.phase.im.to_bits(), b.phase.im.to_bits());
            assert_eq!(b.multiplicity, 1);
        }
    }

    #[test]
    fn cache_detects_corruption() {
        let t = ingest_zero_table(Path::new(REF_PATH)).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        cache_store(&t, f.path()).unwrap();
        let text = std::fs::read_to_string(f.path()).unwrap();
        // flip one digit in the middle of the data section
        let mut bytes = text.clone().into_bytes();
        let pos = (bytes.len() / 2..bytes.len())
            .find(|&i| bytes[i].is_ascii_digit())
            .unwrap();
        bytes[pos] = if bytes[pos] == b'5' { b'6' } else { b'5' };
        let g = write_temp(&String::from_utf8(bytes).unwrap());
        match cache_load(g.path()) {
            Err(Error::ChecksumMismatch { stored, computed }) => {
                assert_ne!(stored, computed);
                assert_eq!(stored.len(), 16);
            }
            other => panic!("expected checksum mismatch, got {other:?}"),
        }
        // dropping a full row is also caught
        let text = std::fs::read_to_string(f.path()).unwrap();
        let mut lines: Vec<&str> = text.lines().collect();
        lines.remove(40);
        let g = write_temp(&(lines.join("\n") + "\n"));
        assert!(matches!(
            cache_load(g.path()),
            Err(Error::ChecksumMismatch { .. })
        ));
    }

    #[test]
    fn cache_rejects_foreign_files() {
        let f = write_temp("14.13\n21.02\n");
        assert!(matches!(cache_load(f.path()), Err(Error::CacheFormat(_))));
        let f = write_temp("ZPD-CACHE v2 height=1 source=computed\nCHECKSUM 0\n");
        assert!(matches!(cache_load(f.path()), Err(Error::CacheFormat(_))));
        assert!(matches!(
            cache_load(Path::new("/nonexistent/zpd.cache")),
            Err(Error::Io(_))
        ));
    }

    #[test]
    fn cache_header_records_source_kind() {
        let t = ZeroTable {
            entries: vec![],
            height_max: 10.0,
            source: TableSource::Computed,
        };
        let f = tempfile::NamedTempFile::new().unwrap();
        cache_store(&t, f.path()).unwrap();
        let text = std::fs::read_to_string(f.path()).unwrap();
        assert!(text.starts_with("ZPD-CACHE v1 "));
        assert!(text.contains("source=computed"));
        let back = cache_load(f.path()).unwrap();
        assert_eq!(back.source, TableSource::Computed);
        assert!(back.entries.is_empty());
        assert_eq!(back.height_max, 10.0);
    }
}
