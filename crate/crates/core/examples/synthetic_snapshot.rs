//! Write a synthetic snapshot: `synthetic_snapshot [models] [seed] > out.ndjson`

use std::io::{stdout, BufWriter};

use lineage::ingest::write_snapshot;
use lineage::synthetic::{synthetic_snapshot, SyntheticConfig};

fn main() -> lineage::Result<()> {
    let mut args = std::env::args().skip(1);
    let models = args.next().map_or(Ok(500), |a| a.parse()).expect("model count");
    let seed = args.next().map_or(Ok(1), |a| a.parse()).expect("seed");
    let records = synthetic_snapshot(&SyntheticConfig { models, seed, ..Default::default() });
    write_snapshot(&records, BufWriter::new(stdout().lock()))
}
