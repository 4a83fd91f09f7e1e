//! Line-delimited JSON storage for sampled chains.
//!
//! A chain file starts with one header line naming the format, format
//! version, item count, and coordinate count, followed by one JSON record
//! per stored state. Line-delimited records let a run checkpoint by
//! appending, and let a reader stream a long chain.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::num_params;
use crate::sampler::ChainRecord;
use crate::scalar::Scalar;
use crate::{Error, Result};

pub const CHAIN_FORMAT: &str = "itemnet-chain";
pub const CHAIN_VERSION: u32 = 1;

/// First line of a chain file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainFileHeader {
    pub format: String,
    pub version: u32,
    /// Item count.
    pub p: usize,
    /// Coordinate count `p + p(p-1)/2`.
    pub q: usize,
}

impl ChainFileHeader {
    pub fn new(p: usize) -> Self {
        Self {
            format: CHAIN_FORMAT.to_string(),
            version: CHAIN_VERSION,
            p,
            q: num_params(p),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.format != CHAIN_FORMAT {
            return Err(Error::BadChainFile(format!(
                "format is {:?}, expected {CHAIN_FORMAT:?}",
                self.format
            )));
        }
        if self.version != CHAIN_VERSION {
            return Err(Error::BadChainFile(format!(
                "version {} unsupported, this build reads version {CHAIN_VERSION}",
                self.version
            )));
        }
        if self.q != num_params(self.p) {
            return Err(Error::BadChainFile(format!(
                "header says p = {} but q = {}, expected q = {}",
                self.p,
                self.q,
                num_params(self.p)
            )));
        }
        Ok(())
    }
}

/// Incremental chain writer; used for checkpointing during a run.
pub struct ChainWriter<W: Write> {
    inner: W,
}

impl ChainWriter<BufWriter<File>> {
    /// Create (truncate) a chain file and write its header.
    pub fn create(path: &Path, p: usize) -> Result<Self> {
        let file = File::create(path)?;
        Self::new(BufWriter::new(file), p)
    }
}

impl<W: Write> ChainWriter<W> {
    pub fn new(mut inner: W, p: usize) -> Result<Self> {
        serde_json::to_writer(&mut inner, &ChainFileHeader::new(p))?;
        inner.write_all(b"\n")?;
        Ok(Self { inner })
    }

    pub fn append<F: Scalar>(&mut self, record: &ChainRecord<F>) -> Result<()> {
        serde_json::to_writer(&mut self.inner, record)?;
        self.inner.write_all(b"\n")?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

/// Write a complete chain in one call.
pub fn write_chain_file<F: Scalar>(
    path: &Path,
    p: usize,
    records: &[ChainRecord<F>],
) -> Result<()> {
    let mut writer = ChainWriter::create(path, p)?;
    for record in records {
        writer.append(record)?;
    }
    writer.flush()
}

/// Read a chain file back, validating the header and every record's shape.
pub fn read_chain_file<F: Scalar>(path: &Path) -> Result<(ChainFileHeader, Vec<ChainRecord<F>>)> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::BadChainFile("file is empty, expected a header line".into()))??;
    let header: ChainFileHeader = serde_json::from_str(&header_line)
        .map_err(|e| Error::BadChainFile(format!("unreadable header: {e}")))?;
    header.validate()?;

    let mut records: Vec<ChainRecord<F>> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ChainRecord<F> = serde_json::from_str(&line)
            .map_err(|e| Error::BadChainFile(format!("record on line {}: {e}", lineno + 2)))?;
        if record.theta.p() != header.p || record.theta.len() != header.q {
            return Err(Error::BadChainFile(format!(
                "record on line {} covers {} items, header says {}",
                lineno + 2,
                record.theta.p(),
                header.p
            )));
        }
        if record.selection.lambda.len() != header.q {
            return Err(Error::BadChainFile(format!(
                "record on line {} has {} selection bits, expected {}",
                lineno + 2,
                record.selection.lambda.len(),
                header.q
            )));
        }
        records.push(record);
    }
    Ok((header, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ParamVector;
    use crate::sampler::SelectionState;

    fn toy_record(iter: usize) -> ChainRecord<f64> {
        ChainRecord {
            iter,
            theta: ParamVector::from_parts(vec![0.1, -0.2], vec![0.5 + iter as f64]).unwrap(),
            selection: SelectionState {
                lambda: vec![1, 0, 1],
                sigma2: 0.1,
                omega: 3.0,
            },
        }
    }

    #[test]
    fn chain_roundtrips_through_a_file() {
        let dir = std::env::temp_dir().join("itemnet-chain-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("roundtrip.jsonl");
        let records: Vec<_> = (0..5).map(toy_record).collect();
        write_chain_file(&path, 2, &records).unwrap();
        let (header, back) = read_chain_file::<f64>(&path).unwrap();
        assert_eq!(header, ChainFileHeader::new(2));
        assert_eq!(back, records);
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn bad_headers_are_rejected() {
        let dir = std::env::temp_dir().join("itemnet-chain-io-test");
        std::fs::create_dir_all(&dir).unwrap();

        let path = dir.join("bad-format.jsonl");
        std::fs::write(
            &path,
            "{\"format\":\"other\",\"version\":1,\"p\":2,\"q\":3}\n",
        )
        .unwrap();
        assert!(matches!(
            read_chain_file::<f64>(&path),
            Err(Error::BadChainFile(_))
        ));

        let path = dir.join("bad-q.jsonl");
        std::fs::write(
            &path,
            "{\"format\":\"itemnet-chain\",\"version\":1,\"p\":2,\"q\":9}\n",
        )
        .unwrap();
        assert!(matches!(
            read_chain_file::<f64>(&path),
            Err(Error::BadChainFile(_))
        ));

        let path = dir.join("empty.jsonl");
        std::fs::write(&path, "").unwrap();
        assert!(matches!(
            read_chain_file::<f64>(&path),
            Err(Error::BadChainFile(_))
        ));
    }

    #[test]
    fn record_shape_mismatch_is_reported_with_line() {
        let dir = std::env::temp_dir().join("itemnet-chain-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad-record.jsonl");
        let record = toy_record(0);
        let mut text = serde_json::to_string(&ChainFileHeader::new(3)).unwrap();
        text.push('\n');
        text.push_str(&serde_json::to_string(&record).unwrap());
        text.push('\n');
        std::fs::write(&path, text).unwrap();
        let err = read_chain_file::<f64>(&path).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }
}
