//! Batch evaluation of an endpoint over a set of instances.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;

use super::endpoint::{CompletionRequest, Endpoint};
use super::{assess, stable_hash, EvalError, EvalRecord};
use crate::problems::Instance;
use crate::tai::{encode, render_prompt, DEFAULT_FEATURE_K};

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    /// Completions per request (the N of Best-of-N).
    pub n_samples: usize,
    /// Independent repetitions of the whole request, best result kept.
    /// 1 disables repeat-best.
    pub repeats: usize,
    /// Base seed; each instance derives its own from this and its id.
    pub seed: u64,
    /// Instances evaluated concurrently.
    pub max_parallel: usize,
    pub feature_k: usize,
    /// JSON-lines file that finished records are appended to and resumed from.
    pub results_path: Option<PathBuf>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { n_samples: 1, repeats: 1, seed: 0, max_parallel: 4, feature_k: DEFAULT_FEATURE_K, results_path: None }
    }
}

impl EvalOptions {
    pub fn validate(&self) -> Result<(), EvalError> {
        if self.n_samples == 0 || self.repeats == 0 || self.max_parallel == 0 {
            return Err(EvalError::InvalidConfig("samples, repeats and parallelism must be positive".into()));
        }
        Ok(())
    }
}

/// Reads previously persisted records. Unreadable lines (for example a
/// record cut short by a crash) are skipped with a warning; when an id
/// occurs more than once the last occurrence wins.
pub fn load_records(path: &Path) -> Result<Vec<EvalRecord>, EvalError> {
    let mut by_id = BTreeMap::new();
    for (no, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<EvalRecord>(&line) {
            Ok(rec) => {
                by_id.insert(rec.instance_id.clone(), rec);
            }
            Err(e) => log::warn!("{}:{}: skipping unreadable record ({e})", path.display(), no + 1),
        }
    }
    Ok(by_id.into_values().collect())
}

/// Opens `path` for appending, terminating a partial last line first.
fn open_append(path: &Path) -> Result<File, EvalError> {
    let mut file = OpenOptions::new().create(true).read(true).append(true).open(path)?;
    let len = file.metadata()?.len();
    if len > 0 {
        file.seek(SeekFrom::Start(len - 1))?;
        let mut last = [0u8; 1];
        file.read_exact(&mut last)?;
        if last[0] != b'\n' {
            file.write_all(b"\n")?;
        }
    }
    Ok(file)
}

fn evaluate_one(endpoint: &dyn Endpoint, inst: &Instance, reference: f64, opts: &EvalOptions) -> EvalRecord {
    let start = Instant::now();
    let prompt = render_prompt(&encode(inst, opts.feature_k));
    let base = stable_hash(&inst.id).wrapping_add(opts.seed);
    let mut candidates = Vec::with_capacity(opts.n_samples * opts.repeats);
    let mut errors = Vec::new();
    for rep in 0..opts.repeats {
        let req = CompletionRequest {
            instance_id: inst.id.clone(),
            prompt: prompt.clone(),
            n: opts.n_samples,
            seed: base.wrapping_add((rep * opts.n_samples) as u64),
        };
        match endpoint.complete(&req) {
            Ok(texts) => candidates.extend(texts.iter().map(|t| assess(inst, t))),
            Err(e) => errors.push(e.to_string()),
        }
    }
    let wall_ms = start.elapsed().as_millis() as u64;
    if candidates.is_empty() && !errors.is_empty() {
        log::warn!("{}: {}", inst.id, errors[0]);
        return EvalRecord::failed(inst, reference, errors.join("; "), wall_ms);
    }
    let mut rec = EvalRecord::new(inst, reference, candidates, wall_ms);
    if !errors.is_empty() {
        rec.error = Some(errors.join("; "));
    }
    rec
}

/// Samples, parses, verifies and selects for every instance.
///
/// Endpoint failures never abort the batch: they yield a record with no
/// candidates and the error message. With `results_path`, each finished
/// record is appended immediately and records already present are reused
/// (records carrying an endpoint error are retried), so an interrupted run
/// resumes where it stopped and a finished run is left unchanged. The
/// result is ordered by instance id.
pub fn evaluate(
    endpoint: &dyn Endpoint,
    instances: &[Instance],
    references: &BTreeMap<String, f64>,
    opts: &EvalOptions,
) -> Result<Vec<EvalRecord>, EvalError> {
    opts.validate()?;
    let mut ids = BTreeSet::new();
    for inst in instances {
        if !ids.insert(inst.id.as_str()) {
            return Err(EvalError::InvalidConfig(format!("duplicate instance id `{}`", inst.id)));
        }
        match references.get(&inst.id) {
            Some(r) if r.is_finite() => {}
            _ => return Err(EvalError::MissingReference(inst.id.clone())),
        }
    }

    let mut done: BTreeMap<String, EvalRecord> = BTreeMap::new();
    let sink = match &opts.results_path {
        Some(path) => {
            if path.exists() {
                for rec in load_records(path)? {
                    if ids.contains(rec.instance_id.as_str()) && rec.error.is_none() {
                        done.insert(rec.instance_id.clone(), rec);
                    }
                }
            }
            Some(Mutex::new(open_append(path)?))
        }
        None => None,
    };

    let todo: Vec<&Instance> = instances.iter().filter(|i| !done.contains_key(&i.id)).collect();
    if !done.is_empty() {
        log::info!("resuming: {} records reused, {} to evaluate", done.len(), todo.len());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.max_parallel)
        .build()
        .map_err(|e| EvalError::InvalidConfig(e.to_string()))?;
    let fresh: Vec<Result<EvalRecord, EvalError>> = pool.install(|| {
        todo.par_iter()
            .map(|inst| {
                let rec = evaluate_one(endpoint, inst, references[&inst.id], opts);
                if let Some(sink) = &sink {
                    let mut line = serde_json::to_string(&rec)?;
                    line.push('\n');
                    let mut file = sink.lock().expect("results file lock");
                    file.write_all(line.as_bytes())?;
                    file.flush()?;
                }
                Ok(rec)
            })
            .collect()
    });
    for rec in fresh {
        let rec = rec?;
        done.insert(rec.instance_id.clone(), rec);
    }
    Ok(done.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::endpoint::EndpointError;
    use crate::eval::{metrics, MockEndpoint, MockPolicyConfig};
    use crate::heuristics::{solve, HeuristicMethod};
    use crate::problems::{gen_instance, GenConfig, ProblemKind, Solution};
    use crate::verify::objective;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn batch(count: u64) -> (Vec<(Instance, Solution)>, BTreeMap<String, f64>) {
        let mut pairs = Vec::new();
        let mut refs = BTreeMap::new();
        for seed in 0..count {
            let kind = ProblemKind::ALL[seed as usize % ProblemKind::ALL.len()];
            let inst = gen_instance(kind, &GenConfig::default_for(kind, seed).with_size(8, 12).with_machines(3, 4)).unwrap();
            let sol = solve(&inst, HeuristicMethod::all_for(kind)[0], seed).unwrap();
            refs.insert(inst.id.clone(), objective(&inst, &sol).unwrap().value);
            pairs.push((inst, sol));
        }
        (pairs, refs)
    }

    #[test]
    fn echo_gives_full_feasibility_and_zero_gap() {
        let (pairs, refs) = batch(14);
        let instances: Vec<Instance> = pairs.iter().map(|p| p.0.clone()).collect();
        let mock = MockEndpoint::new(MockPolicyConfig::echo(), pairs).unwrap();
        let records = evaluate(&mock, &instances, &refs, &EvalOptions::default()).unwrap();
        let m = metrics(&records);
        assert_eq!(m.feasibility_rate, 1.0);
        assert_eq!(m.mean_gap, Some(0.0));
        assert!(records.windows(2).all(|w| w[0].instance_id < w[1].instance_id));
    }

    struct Prose;
    impl Endpoint for Prose {
        fn complete(&self, req: &CompletionRequest) -> Result<Vec<String>, EndpointError> {
            Ok(vec!["Let me think about it.".to_string(); req.n])
        }
    }

    #[test]
    fn prose_is_never_feasible() {
        let (pairs, refs) = batch(7);
        let instances: Vec<Instance> = pairs.into_iter().map(|p| p.0).collect();
        let opts = EvalOptions { n_samples: 3, ..EvalOptions::default() };
        let records = evaluate(&Prose, &instances, &refs, &opts).unwrap();
        assert!(records.iter().all(|r| r.candidates.len() == 3 && r.candidates.iter().all(|c| !c.report.zeta)));
        assert_eq!(metrics(&records).feasibility_rate, 0.0);
    }

    struct Down(AtomicUsize);
    impl Endpoint for Down {
        fn complete(&self, _: &CompletionRequest) -> Result<Vec<String>, EndpointError> {
            self.0.fetch_add(1, Ordering::SeqCst);
            Err(EndpointError::Transport("connection refused".into()))
        }
    }

    #[test]
    fn failures_become_empty_records() {
        let (pairs, refs) = batch(3);
        let instances: Vec<Instance> = pairs.into_iter().map(|p| p.0).collect();
        let records = evaluate(&Down(AtomicUsize::new(0)), &instances, &refs, &EvalOptions::default()).unwrap();
        assert_eq!(records.len(), 3);
        assert!(records.iter().all(|r| r.candidates.is_empty() && r.error.is_some() && r.selected.is_none()));
    }

    #[test]
    fn missing_reference_is_an_error() {
        let (pairs, mut refs) = batch(2);
        let instances: Vec<Instance> = pairs.into_iter().map(|p| p.0).collect();
        refs.remove(&instances[1].id);
        assert!(matches!(
            evaluate(&Prose, &instances, &refs, &EvalOptions::default()),
            Err(EvalError::MissingReference(_))
        ));
    }

    #[test]
    fn resume_is_idempotent_and_skips_finished_work() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.jsonl");
        let (pairs, refs) = batch(10);
        let instances: Vec<Instance> = pairs.iter().map(|p| p.0.clone()).collect();
        let cfg = MockPolicyConfig { infeasible_prob: 0.3, swap_count: 2, format_fail_prob: 0.1, seed: 3 };
        let mock = MockEndpoint::new(cfg, pairs).unwrap();
        let opts = EvalOptions { n_samples: 2, results_path: Some(path.clone()), ..EvalOptions::default() };

        // Interrupted run: only the first half was evaluated, last line torn.
        let first = evaluate(&mock, &instances[..5], &refs, &opts).unwrap();
        let mut text = std::fs::read_to_string(&path).unwrap();
        text.push_str("{\"instance_id\": \"trunc");
        std::fs::write(&path, text).unwrap();

        let full = evaluate(&mock, &instances, &refs, &opts).unwrap();
        assert_eq!(full.len(), 10);
        for rec in &first {
            assert_eq!(full.iter().find(|r| r.instance_id == rec.instance_id), Some(rec));
        }
        let before = std::fs::read_to_string(&path).unwrap();
        let again = evaluate(&mock, &instances, &refs, &opts).unwrap();
        assert_eq!(again, full);
        assert_eq!(std::fs::read_to_string(&path).unwrap(), before);
        assert_eq!(load_records(&path).unwrap(), full);
    }

    #[test]
    fn repeats_multiply_candidates() {
        let (pairs, refs) = batch(2);
        let instances: Vec<Instance> = pairs.iter().map(|p| p.0.clone()).collect();
        let mock = MockEndpoint::new(MockPolicyConfig::echo(), pairs).unwrap();
        let opts = EvalOptions { n_samples: 2, repeats: 3, ..EvalOptions::default() };
        let records = evaluate(&mock, &instances, &refs, &opts).unwrap();
        assert!(records.iter().all(|r| r.candidates.len() == 6));
    }
}
