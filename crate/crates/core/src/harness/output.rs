use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read};
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;

use super::{ExperimentConfig, ExperimentReport, Timing, REPORT_FILE};
use crate::error::{Error, Result};
use crate::overlaps::{write_overlaps_csv, OverlapRecord};
use crate::rng::derive_seed;
use crate::stats::{Histogram, SymmetryReport, TailFit};

/// One row of a samples file.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRow {
    pub index: u64,
    pub re: f64,
    pub im: f64,
    pub aux: Vec<f64>,
}

impl SampleRow {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Writes `index,re,im,<aux...>`.
pub fn write_samples_csv(path: &Path, values: &[Complex64], aux: &[(&str, &[f64])]) -> Result<()> {
    for (name, col) in aux {
        if col.len() != values.len() {
            return Err(Error::Config(format!(
                "aux column {name} has {} rows, expected {}",
                col.len(),
                values.len()
            )));
        }
    }
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    let mut header = vec!["index".to_string(), "re".into(), "im".into()];
    header.extend(aux.iter().map(|(n, _)| n.to_string()));
    w.write_record(&header)?;
    for (i, v) in values.iter().enumerate() {
        let mut row = vec![i.to_string(), format!("{:e}", v.re), format!("{:e}", v.im)];
        row.extend(aux.iter().map(|(_, col)| format!("{:e}", col[i])));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`write_samples_csv`].
pub fn read_samples_csv<R: Read>(r: R) -> Result<Vec<SampleRow>> {
    let mut rd = csv::Reader::from_reader(r);
    let headers = rd.headers()?.clone();
    if headers.len() < 3 || &headers[0] != "index" || &headers[1] != "re" || &headers[2] != "im" {
        return Err(Error::Parse(format!(
            "samples file must start with columns index,re,im; got {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    let mut rows = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec?;
        let field = |k: usize| -> Result<f64> {
            rec[k]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {}: column {}: {e}", line + 1, &headers[k])))
        };
        let index = rec[0]
            .trim()
            .parse::<u64>()
            .map_err(|e| Error::Parse(format!("row {}: index: {e}", line + 1)))?;
        let aux = (3..rec.len()).map(field).collect::<Result<Vec<_>>>()?;
        rows.push(SampleRow {
            index,
            re: field(1)?,
            im: field(2)?,
            aux,
        });
    }
    Ok(rows)
}

/// Accumulates an experiment's outputs.
pub(crate) struct Context<'a> {
    pub config: &'a ExperimentConfig,
    pub estimates: BTreeMap<String, f64>,
    pub complex_estimates: BTreeMap<String, Complex64>,
    pub ks: BTreeMap<String, f64>,
    pub tail_fit: Option<TailFit>,
    pub symmetry: Option<SymmetryReport>,
    pub rejections: usize,
    notes: Vec<String>,
    files: Vec<String>,
    stages: BTreeMap<String, f64>,
}

impl<'a> Context<'a> {
    pub fn new(config: &'a ExperimentConfig) -> Result<Self> {
        std::fs::create_dir_all(&config.output_dir)?;
        Ok(Self {
            config,
            estimates: BTreeMap::new(),
            complex_estimates: BTreeMap::new(),
            ks: BTreeMap::new(),
            tail_fit: None,
            symmetry: None,
            rejections: 0,
            notes: Vec::new(),
            files: Vec::new(),
            stages: BTreeMap::new(),
        })
    }

    /// Base seed of an independent stream.
    pub fn stream(&self, k: u64) -> u64 {
        derive_seed(self.config.seed, k)
    }

    pub fn estimate(&mut self, key: impl Into<String>, v: f64) {
        self.estimates.insert(key.into(), v);
    }

    pub fn ks(&mut self, key: impl Into<String>, v: f64) {
        self.ks.insert(key.into(), v);
    }

    /// Keeps the run going when a statistic lacks data; the reason lands in
    /// the report's notes.
    pub fn soft<T>(&mut self, what: &str, r: Result<T>) -> Result<Option<T>> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(e @ (Error::InsufficientData(_) | Error::EmptySelection(_))) => {
                log::warn!("{what} skipped: {e}");
                self.notes.push(format!("{what} skipped: {e}"));
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }

    pub fn timed<T>(&mut self, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let out = f();
        *self.stages.entry(stage.to_string()).or_insert(0.0) += t.elapsed().as_secs_f64();
        out
    }

    fn record(&mut self, name: &str) -> std::path::PathBuf {
        self.files.push(name.to_string());
        self.config.output_dir.join(name)
    }

    pub fn samples(
        &mut self,
        name: &str,
        values: &[Complex64],
        aux: &[(&str, &[f64])],
    ) -> Result<()> {
        let path = self.record(name);
        write_samples_csv(&path, values, aux)
    }

    pub fn real_samples(
        &mut self,
        name: &str,
        values: &[f64],
        aux: &[(&str, &[f64])],
    ) -> Result<()> {
        let complex: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.samples(name, &complex, aux)
    }

    pub fn histogram(&mut self, name: &str, hist: &Histogram) -> Result<()> {
        let path = self.record(name);
        hist.write_csv(BufWriter::new(File::create(path)?))
    }

    pub fn overlaps(&mut self, name: &str, records: &[OverlapRecord]) -> Result<()> {
        let path = self.record(name);
        write_overlaps_csv(BufWriter::new(File::create(path)?), records)
    }

    pub fn finish(mut self, total_seconds: f64) -> Result<ExperimentReport> {
        self.files.push(REPORT_FILE.to_string());
        let report = ExperimentReport {
            experiment: self.config.experiment,
            config: self.config.clone(),
            estimates: self.estimates,
            complex_estimates: self.complex_estimates,
            ks: self.ks,
            tail_fit: self.tail_fit,
            symmetry: self.symmetry,
            rejections: self.rejections,
            notes: self.notes,
            files: self.files,
            timing: Timing {
                total_seconds,
                stages: self.stages,
            },
        };
        let json = serde_json::to_string_pretty(&report)?;
        std::fs::write(self.config.output_dir.join(REPORT_FILE), json)?;
        Ok(report)
    }
}
