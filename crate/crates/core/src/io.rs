//! CSV formats.
//!
//! * triplets: `close1,close2,outlier` per line, optional header line;
//! * clusterings: `item,cluster` per line with a positive integer cluster,
//!   written with an `item,cluster` header that the reader skips;
//! * signed graphs: `u,v,sign[,weight]` with sign `+` or `-`.
//!
//! Item labels are kept verbatim; dense indices never appear in files.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::model::{CcInstance, Clustering, ItemUniverse, Sign, Triplet, TripletSet};

/// Non-blank lines of `input` split into trimmed fields, with 1-based
/// physical line numbers. Lines containing quotes go through the CSV parser.
fn records<R: Read>(mut input: R, has_header: bool) -> Result<Vec<(u64, Vec<String>)>> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut out = Vec::new();
    let mut header_pending = has_header;
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if std::mem::take(&mut header_pending) {
            continue;
        }
        let fields = if line.contains('"') {
            let mut rdr = csv::ReaderBuilder::new()
                .has_headers(false)
                .flexible(true)
                .trim(csv::Trim::All)
                .from_reader(line.as_bytes());
            let mut record = csv::StringRecord::new();
            rdr.read_record(&mut record)?;
            record.iter().map(str::to_owned).collect()
        } else {
            line.split(',').map(|f| f.trim().to_owned()).collect()
        };
        out.push((k as u64 + 1, fields));
    }
    Ok(out)
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Reads a triplet file, interning labels in order of first appearance.
pub fn read_triplets<R: Read>(input: R, has_header: bool) -> Result<(ItemUniverse, TripletSet)> {
    let mut universe = ItemUniverse::new();
    let mut triplets = Vec::new();
    for (line, record) in records(input, has_header)? {
        if record.len() != 3 {
            return Err(parse_err(
                line,
                format!("expected 3 fields (close1,close2,outlier), found {}", record.len()),
            ));
        }
        if record.iter().any(|f| f.is_empty()) {
            return Err(parse_err(line, "empty item label"));
        }
        let [a, b, c] = [0, 1, 2].map(|k| universe.intern(&record[k]));
        let t = Triplet::new(a, b, c)
            .map_err(|_| parse_err(line, "triplet items must be pairwise distinct"))?;
        triplets.push(t);
    }
    let set = TripletSet::new(universe.len(), triplets)?;
    Ok((universe, set))
}

pub fn write_triplets<W: Write>(out: W, universe: &ItemUniverse, triplets: &TripletSet) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for t in triplets.triplets() {
        let (i, j) = t.close();
        let name = |x: usize| {
            universe
                .label(x)
                .ok_or(Error::UniverseMismatch { item: x, n: universe.len() })
        };
        w.write_record([name(i)?, name(j)?, name(t.outlier())?])?;
    }
    w.flush()?;
    Ok(())
}

/// A clustering file: labels in file order with their clusters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledClustering {
    pub universe: ItemUniverse,
    pub clustering: Clustering,
}

impl LabeledClustering {
    /// Reorders onto `universe`, which must hold exactly the same labels.
    pub fn aligned_to(&self, universe: &ItemUniverse) -> Result<Clustering> {
        if universe.len() != self.universe.len() {
            return Err(Error::UniverseSizeMismatch {
                left: universe.len(),
                right: self.universe.len(),
            });
        }
        let labels = universe
            .labels()
            .iter()
            .map(|name| {
                let idx = self.universe.index_of(name).ok_or_else(|| {
                    Error::InvalidConfig(format!("item {name:?} missing from clustering"))
                })?;
                Ok(self.clustering.labels()[idx])
            })
            .collect::<Result<Vec<_>>>()?;
        Clustering::new(labels)
    }
}

pub fn read_clustering<R: Read>(input: R) -> Result<LabeledClustering> {
    let mut universe = ItemUniverse::new();
    let mut labels = Vec::new();
    for (row, (line, record)) in records(input, false)?.into_iter().enumerate() {
        if record.len() != 2 {
            return Err(parse_err(
                line,
                format!("expected 2 fields (item,cluster), found {}", record.len()),
            ));
        }
        let cluster = match record[1].parse::<usize>() {
            Ok(c) if c > 0 => c,
            _ if row == 0 && record[0] == "item" && record[1] == "cluster" => continue,
            _ => return Err(parse_err(line, format!("invalid cluster {:?}", record[1]))),
        };
        if universe.index_of(&record[0]).is_some() {
            return Err(parse_err(line, format!("item {:?} listed twice", record[0])));
        }
        universe.intern(&record[0]);
        labels.push(cluster);
    }
    Ok(LabeledClustering {
        universe,
        clustering: Clustering::new(labels)?,
    })
}

pub fn write_clustering<W: Write>(out: W, universe: &ItemUniverse, clustering: &Clustering) -> Result<()> {
    if universe.len() != clustering.len() {
        return Err(Error::UniverseSizeMismatch {
            left: universe.len(),
            right: clustering.len(),
        });
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["item", "cluster"])?;
    for (name, label) in universe.labels().iter().zip(clustering.labels()) {
        w.write_record([name.as_str(), &label.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a signed graph. Vertices are interned in order of appearance.
pub fn read_cc_instance<R: Read>(input: R, has_header: bool) -> Result<(ItemUniverse, CcInstance)> {
    let mut universe = ItemUniverse::new();
    let mut edges = Vec::new();
    for (line, record) in records(input, has_header)? {
        if !(3..=4).contains(&record.len()) {
            return Err(parse_err(
                line,
                format!("expected u,v,sign[,weight], found {} fields", record.len()),
            ));
        }
        let sign = match record[2].as_str() {
            "+" => Sign::Plus,
            "-" => Sign::Minus,
            other => return Err(parse_err(line, format!("sign must be + or -, got {other:?}"))),
        };
        let weight = match record.get(3).map(String::as_str) {
            None => 1,
            Some(w) => w
                .parse::<u64>()
                .map_err(|_| parse_err(line, format!("invalid weight {w:?}")))?,
        };
        let u = universe.intern(&record[0]);
        let v = universe.intern(&record[1]);
        edges.push((line, u, v, sign, weight));
    }
    let mut graph = CcInstance::new(universe.len());
    for (line, u, v, sign, weight) in edges {
        graph
            .add_edge(u, v, sign, weight)
            .map_err(|e| parse_err(line, e.to_string()))?;
    }
    Ok((universe, graph))
}
