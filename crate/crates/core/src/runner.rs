//! Full analysis of a template: every equivalence class goes through
//! equations, simplification and the Jacobian count, checked against the
//! rank count, and the results are merged into a histogram.

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equations::b2_system;
use crate::error::{Error, Result};
use crate::orbits::{class_key, equivalence_classes, ClassKey, OrbitRecord};
use crate::simplify::simplify_equations;
use crate::solve::{free_parameters_ift, free_parameters_rank, SolveMethod};
use crate::template::FractalTemplate;
use crate::wordspace::Assignment;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassResult {
    pub class_key: ClassKey,
    pub representative: String,
    pub orbit_size: usize,
    pub free_parameters: usize,
    pub method: SolveMethod,
    pub warning: bool,
}

/// One checkpoint line.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct CheckpointRecord {
    class_key: String,
    representative: String,
    orbit_size: usize,
    free_parameters: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResultTable {
    pub schema: u32,
    pub template: String,
    /// Free parameters to number of IFS.
    pub histogram: BTreeMap<usize, u64>,
    /// Free parameters to number of classes.
    pub class_histogram: BTreeMap<usize, u64>,
    pub class_count: usize,
    pub total_ifs: u64,
    pub equation_count: usize,
    pub warnings: usize,
}

/// Counts the free parameters of one class, failing if the two methods
/// disagree.
pub fn analyze_class(
    template: &FractalTemplate,
    representative: &Assignment,
    orbit_size: usize,
) -> Result<ClassResult> {
    let system = b2_system(template, representative)?;
    let state = simplify_equations(&system)?;
    let ift = free_parameters_ift(&state, &system);
    let rank = free_parameters_rank(&system);
    if ift.count != rank {
        return Err(Error::OracleDisagreement {
            representative: representative.encode(template),
            ift: ift.count,
            rank,
        });
    }
    Ok(ClassResult {
        class_key: class_key(template, representative),
        representative: representative.encode(template),
        orbit_size,
        free_parameters: ift.count,
        method: ift.method,
        warning: ift.warning,
    })
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    if jobs == 0 {
        return Err(Error::InvalidParameter("jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start {jobs} workers: {e}")))
}

fn read_checkpoint(path: &Path) -> Result<HashMap<String, CheckpointRecord>> {
    let mut done = HashMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(done),
        Err(e) => return Err(e.into()),
    };
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CheckpointRecord>(&line) {
            Ok(r) => {
                done.insert(r.class_key.clone(), r);
            }
            Err(e) => log::warn!(
                "{}:{}: skipping corrupt checkpoint line ({e})",
                path.display(),
                lineno + 1
            ),
        }
    }
    Ok(done)
}

/// Analyzes the given classes on `jobs` workers. With a checkpoint path,
/// classes already recorded there are not recomputed and new results are
/// appended one line at a time.
pub fn analyze_classes(
    template: &FractalTemplate,
    classes: &[OrbitRecord],
    jobs: usize,
    checkpoint: Option<&Path>,
) -> Result<Vec<ClassResult>> {
    let pool = thread_pool(jobs)?;
    let done = match checkpoint {
        Some(p) => read_checkpoint(p)?,
        None => HashMap::new(),
    };
    let writer = match checkpoint {
        Some(p) => Some(Mutex::new(
            OpenOptions::new().create(true).append(true).open(p)?,
        )),
        None => None,
    };
    if !done.is_empty() {
        log::info!("resuming: {} classes already in checkpoint", done.len());
    }
    pool.install(|| {
        classes
            .par_iter()
            .map(|rec| {
                let key = class_key(template, &rec.representative);
                if let Some(r) = done.get(&key.0) {
                    if r.orbit_size == rec.size && r.free_parameters < template.n() {
                        return Ok(ClassResult {
                            class_key: key,
                            representative: rec.representative.encode(template),
                            orbit_size: rec.size,
                            free_parameters: r.free_parameters,
                            method: SolveMethod::Ift,
                            warning: false,
                        });
                    }
                    log::warn!("checkpoint record for {key} does not match; recomputing");
                }
                let result = analyze_class(template, &rec.representative, rec.size)?;
                if let Some(w) = &writer {
                    let line = serde_json::to_string(&CheckpointRecord {
                        class_key: result.class_key.0.clone(),
                        representative: result.representative.clone(),
                        orbit_size: result.orbit_size,
                        free_parameters: result.free_parameters,
                    })?;
                    let mut f = w.lock().expect("checkpoint lock");
                    writeln!(f, "{line}")?;
                    f.flush()?;
                }
                Ok(result)
            })
            .collect()
    })
}

pub fn summarize(template: &FractalTemplate, results: &[ClassResult]) -> ResultTable {
    let mut histogram = BTreeMap::new();
    let mut class_histogram = BTreeMap::new();
    for r in results {
        *histogram.entry(r.free_parameters).or_insert(0) += r.orbit_size as u64;
        *class_histogram.entry(r.free_parameters).or_insert(0) += 1;
    }
    ResultTable {
        schema: 1,
        template: template.name.clone(),
        total_ifs: histogram.values().sum(),
        histogram,
        class_histogram,
        class_count: results.len(),
        equation_count: template.equation_count(),
        warnings: results.iter().filter(|r| r.warning).count(),
    }
}

/// Every class of `template`, analyzed and aggregated.
pub fn analyze_all(
    template: &FractalTemplate,
    jobs: usize,
    checkpoint: Option<&Path>,
) -> Result<ResultTable> {
    if let Some(p) = checkpoint {
        // fail before the long part if the file cannot be written
        OpenOptions::new().create(true).append(true).open(p)?;
    }
    let classes = thread_pool(jobs)?.install(|| equivalence_classes(template));
    log::info!("{}: {} classes", template.name, classes.len());
    let results = analyze_classes(template, &classes, jobs, checkpoint)?;
    Ok(summarize(template, &results))
}

impl ResultTable {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("template,free_parameters,ifs_count,class_count\n");
        for (k, v) in &self.histogram {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.template,
                k,
                v,
                self.class_histogram.get(k).copied().unwrap_or(0)
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::template::builtin_template;

    #[test]
    fn sg_table() {
        let t = builtin_template("sg").unwrap();
        let table = analyze_all(&t, 2, None).unwrap();
        assert_eq!(table.class_count, 44);
        assert_eq!(table.total_ifs, 216);
        assert_eq!(table.histogram, BTreeMap::from([(0, 194), (1, 21), (2, 1)]));
        assert_eq!(table.warnings, 0);
        assert!(table
            .to_csv()
            .starts_with("template,free_parameters,ifs_count,class_count\nsg,0,194,"));
    }

    #[test]
    fn single_class_counts() {
        let t = builtin_template("sg").unwrap();
        let r = analyze_class(&t, &t.canonical_assignment(), 1).unwrap();
        assert_eq!(r.free_parameters, 2);
        assert_eq!(r.class_key.0, "[[11,12,13],[21,22,23],[31,32,33]]");
    }
}
