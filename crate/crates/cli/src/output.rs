use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::Context;
use npa_core::io::{write_degree_counts_csv, write_edd_csv, write_json, write_vdd_csv};
use npa_core::{DegreeDistribution, EdgeDegreeMatrix};
use serde::Serialize;

use crate::args::Format;

/// Writes result files into one directory.
pub struct Output {
    dir: PathBuf,
    csv: bool,
    json: bool,
}

impl Output {
    pub fn new(dir: &Path, formats: &[Format]) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            csv: formats.contains(&Format::Csv),
            json: formats.contains(&Format::Json),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn create(&self, name: &str) -> anyhow::Result<BufWriter<File>> {
        let path = self.path(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok(BufWriter::new(file))
    }

    /// Always written, whatever the table formats.
    pub fn report<T: Serialize>(&self, name: &str, value: &T) -> anyhow::Result<()> {
        write_json(value, &self.path(name)).with_context(|| format!("writing {name}"))
    }

    pub fn vdd(&self, stem: &str, q: &DegreeDistribution) -> anyhow::Result<()> {
        if self.csv {
            write_vdd_csv(q, self.create(&format!("{stem}.csv"))?)?;
        }
        if self.json {
            self.report(&format!("{stem}.json"), q)?;
        }
        Ok(())
    }

    pub fn degree_counts(&self, stem: &str, degrees: &[usize]) -> anyhow::Result<()> {
        if self.csv {
            write_degree_counts_csv(degrees, self.create(&format!("{stem}.csv"))?)?;
        }
        if self.json {
            self.report(&format!("{stem}.json"), &DegreeHistogram::new(degrees))?;
        }
        Ok(())
    }

    pub fn edd(&self, stem: &str, theta: &EdgeDegreeMatrix) -> anyhow::Result<()> {
        if self.csv {
            write_edd_csv(theta, self.create(&format!("{stem}.csv"))?)?;
        }
        if self.json {
            self.report(&format!("{stem}.json"), theta)?;
        }
        Ok(())
    }

    /// A CSV table with the given header, written regardless of formats.
    pub fn table(&self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_writer(self.create(name)?);
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Raw bytes, e.g. an edge list.
    pub fn writer(&self, name: &str) -> anyhow::Result<BufWriter<File>> {
        self.create(name)
    }
}

#[derive(Serialize)]
struct DegreeHistogram {
    degree: Vec<usize>,
    count: Vec<u64>,
}

impl DegreeHistogram {
    fn new(degrees: &[usize]) -> Self {
        let hi = degrees.iter().copied().max().unwrap_or(0);
        let mut counts = vec![0u64; hi + 1];
        for &d in degrees {
            counts[d] += 1;
        }
        let (degree, count) = counts.into_iter().enumerate().filter(|&(_, c)| c > 0).unzip();
        Self { degree, count }
    }
}
