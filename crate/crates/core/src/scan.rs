//! Per-surface Weil pipeline for nodal double covers and family scans with
//! checkpointed, order-independent aggregation.

use std::collections::{BTreeMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Mutex;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{big_pow, is_prime_u64};
use crate::counter::singular::require_nodal;
use crate::counter::{padic_count_candidates, CountBound, ModelKind, PadicOptions, VarietyModel};
use crate::error::{domain_err, Error, Result};
use crate::families::{FamilyPreset, Specialization};
use crate::weil::{
    diagnose, exceptional_factor, reconstruct, CompletionOptions, Diagnostics, EndoField, WeilPolynomial, K3_DEGREE,
};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, Default)]
pub struct AnalysisOptions {
    /// Number of counts; `None` starts at the minimum and adds counts while
    /// the Weil polynomial is not determined.
    pub n: Option<u32>,
    pub completion: CompletionOptions,
    pub padic: PadicOptions,
}

/// Weil data of one nodal double cover `W^2 = f` over `F_p`.
#[derive(Clone, Debug)]
pub struct SurfaceAnalysis {
    pub p: u64,
    pub orbits: Vec<u32>,
    /// Degree of the Weil polynomial of the part of `H^2` orthogonal to the
    /// exceptional curves.
    pub reduced_degree: usize,
    /// `#X(F_{p^i})` of the singular model.
    pub counts: Vec<BigInt>,
    /// Candidates for the reduced polynomial. More than one means the
    /// counts did not decide between them.
    pub reduced: Vec<WeilPolynomial>,
    /// The full `chi_2`, one per candidate.
    pub chi2: Vec<WeilPolynomial>,
    pub diagnostics: Vec<Diagnostics>,
}

impl SurfaceAnalysis {
    pub fn ambiguous(&self) -> bool {
        self.chi2.len() > 1
    }

    /// Largest bound over the candidates, so it bounds the true rank.
    pub fn picard_upper(&self) -> u32 {
        self.diagnostics.iter().map(|d| d.picard_upper).max().unwrap_or(0)
    }

    /// Point counts of the resolved surface: each node fixed by `Frob^i`
    /// is replaced by a line.
    pub fn counts_resolved(&self) -> Vec<BigInt> {
        self.counts
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let i = k as u32 + 1;
                let fixed: u32 = self.orbits.iter().filter(|&&s| i.is_multiple_of(s)).sum();
                c + big_pow(self.p, i as u64) * fixed
            })
            .collect()
    }

    pub fn ordinary(&self) -> bool {
        self.diagnostics.first().is_some_and(|d| d.ordinary)
    }
}

/// Counts, reconstruction and diagnostics for a double cover whose branch
/// curve has only nodes.
pub fn analyze_double_cover(
    model: &VarietyModel,
    orbits: &[u32],
    field: Option<&EndoField>,
    opts: &AnalysisOptions,
) -> Result<SurfaceAnalysis> {
    if model.kind() != ModelKind::DoubleCover || !model.is_k3() {
        return Err(Error::Unsupported("expected a double cover of P^2 branched along a sextic".into()));
    }
    let p = model.p();
    let r: u32 = orbits.iter().sum();
    if r as usize >= K3_DEGREE {
        return Err(Error::Unsupported(format!("{r} nodes leave no transcendental part")));
    }
    let d = K3_DEGREE - r as usize;
    let padic = PadicOptions { bound: CountBound::K3Weil { w: d as u32 }, ..opts.padic.clone() };
    // fewer than ceil(d/2) counts never fix the sign of the functional equation
    let n_min = d.div_ceil(2).max(1) as u32;
    let n_max = d as u32;
    let mut n = opts.n.unwrap_or(n_min);
    loop {
        let cands = padic_count_candidates(model, n, &padic)?;
        let escalate = opts.n.is_none() && n < n_max;
        let outcome = resolve(&cands.iter().map(|c| c.candidates.clone()).collect::<Vec<_>>(), p, d, opts.completion);
        match outcome {
            Ok((_, reduced)) if reduced.len() > 1 && escalate => n += 1,
            Err(Error::Precision(_)) if escalate => n += 1,
            Ok((counts, reduced)) => {
                let n1 = &counts[0];
                let ex = exceptional_factor(p, orbits);
                let chi2 = reduced.iter().map(|w| w.mul(&ex)).collect();
                let diagnostics = reduced.iter().map(|w| diagnose(w, orbits, n1, field)).collect();
                return Ok(SurfaceAnalysis {
                    p,
                    orbits: orbits.to_vec(),
                    reduced_degree: d,
                    counts,
                    reduced,
                    chi2,
                    diagnostics,
                });
            }
            Err(e) => return Err(e),
        }
    }
}

/// Most count combinations tried when residues leave several candidates.
pub const MAX_COUNT_COMBINATIONS: usize = 64;

/// Reconstructs from every combination of candidate counts and keeps the
/// Weil polynomials that survive. Returns the counts of the first surviving
/// combination.
fn resolve(
    cands: &[Vec<BigInt>],
    q: u64,
    d: usize,
    opts: CompletionOptions,
) -> Result<(Vec<BigInt>, Vec<WeilPolynomial>)> {
    let total = cands.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.len())).unwrap_or(usize::MAX);
    if total == 0 {
        return Err(Error::Inconsistent("a residue has no representative in the count interval".into()));
    }
    if total > MAX_COUNT_COMBINATIONS {
        return Err(Error::Precision(format!("{total} combinations of candidate counts")));
    }
    let mut first: Option<Vec<BigInt>> = None;
    let mut found: Vec<WeilPolynomial> = Vec::new();
    let mut last_err = None;
    for idx in 0..total {
        let mut rest = idx;
        let counts: Vec<BigInt> = cands
            .iter()
            .map(|c| {
                let v = c[rest % c.len()].clone();
                rest /= c.len();
                v
            })
            .collect();
        match reconstruct(&counts, q, d, opts) {
            Ok(ws) => {
                first.get_or_insert(counts);
                found.extend(ws);
            }
            Err(e) => {
                if !matches!(last_err, Some(Error::Precision(_))) {
                    last_err = Some(e);
                }
            }
        }
    }
    match first {
        Some(counts) => {
            found.sort();
            found.dedup();
            Ok((counts, found))
        }
        None => Err(last_err.expect("at least one combination")),
    }
}

/// As [`analyze_double_cover`], finding the nodes first.
pub fn analyze_sextic(
    model: &VarietyModel,
    field: Option<&EndoField>,
    opts: &AnalysisOptions,
) -> Result<SurfaceAnalysis> {
    let orbits = require_nodal(model.f())?;
    analyze_double_cover(model, &orbits, field, opts)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ParamSelection {
    All,
    Sample(usize),
    Explicit(Vec<Vec<i64>>),
}

impl FromStr for ParamSelection {
    type Err = Error;

    /// `all`, `sample:<k>`, or `values:<tuple>;<tuple>` with comma-separated
    /// entries.
    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(ParamSelection::All);
        }
        if let Some(k) = s.strip_prefix("sample:") {
            return k.parse().map(ParamSelection::Sample).map_err(|_| Error::Parse(format!("bad sample size '{k}'")));
        }
        if let Some(v) = s.strip_prefix("values:") {
            let tuples = v
                .split(';')
                .map(|t| {
                    if t.is_empty() {
                        return Ok(Vec::new());
                    }
                    t.split(',')
                        .map(|x| x.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad parameter '{x}'"))))
                        .collect()
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(ParamSelection::Explicit(tuples));
        }
        Err(Error::Parse(format!("expected all, sample:<k> or values:<tuples>, got '{s}'")))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Excluded,
    Failed,
}

/// One surface of a scan.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SurfaceRow {
    pub family: String,
    pub p: u64,
    pub params: Vec<i64>,
    pub status: RowStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default)]
    pub nodes: Vec<u32>,
    #[serde(default)]
    pub counts: Vec<String>,
    /// Coefficients of each `chi_2` candidate, `c_0` first.
    #[serde(default)]
    pub chi2: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub picard_upper: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordinary: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rm_class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cm_pattern: Option<String>,
}

impl SurfaceRow {
    fn bare(family: &str, p: u64, params: &[i64], status: RowStatus, reason: Option<String>) -> Self {
        SurfaceRow {
            family: family.to_string(),
            p,
            params: params.to_vec(),
            status,
            reason,
            nodes: Vec::new(),
            counts: Vec::new(),
            chi2: Vec::new(),
            picard_upper: None,
            ordinary: None,
            rm_class: None,
            cm_pattern: None,
        }
    }

    fn key(&self) -> (String, u64, Vec<i64>) {
        (self.family.clone(), self.p, self.params.clone())
    }
}

/// Runs the pipeline on one specialisation, recording failures in the row.
pub fn scan_surface(preset: &FamilyPreset, p: u64, params: &[i64], opts: &AnalysisOptions) -> SurfaceRow {
    let fail = |e: Error| SurfaceRow::bare(preset.key, p, params, RowStatus::Failed, Some(e.to_string()));
    let spec = match preset.specialize(p, params) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let s = match spec {
        Specialization::Model(s) => s,
        Specialization::Excluded(why, detail) => {
            return SurfaceRow::bare(preset.key, p, params, RowStatus::Excluded, Some(format!("{why}: {detail}")))
        }
    };
    let a = match analyze_double_cover(&s.model, &s.orbits, Some(&preset.field), opts) {
        Ok(a) => a,
        Err(e) => return fail(e),
    };
    let first = &a.diagnostics[0];
    let agree = |f: &dyn Fn(&Diagnostics) -> String| {
        let v = f(first);
        if a.diagnostics.iter().all(|d| f(d) == v) {
            v
        } else {
            "ambiguous".to_string()
        }
    };
    SurfaceRow {
        nodes: a.orbits.clone(),
        counts: a.counts.iter().map(|c| c.to_string()).collect(),
        chi2: a.chi2.iter().map(|w| w.coeffs().iter().map(|c| c.to_string()).collect()).collect(),
        picard_upper: Some(a.picard_upper()),
        ordinary: Some(a.ordinary()),
        rm_class: Some(agree(&|d| d.rm_class.name())),
        cm_pattern: Some(agree(&|d| d.cm_pattern.map_or("none".to_string(), |c| format!("{c:?}")))),
        ..SurfaceRow::bare(preset.key, p, params, RowStatus::Ok, a.ambiguous().then(|| "ambiguous".to_string()))
    }
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct PrimeSummary {
    pub p: u64,
    pub splitting: String,
    pub tried: usize,
    /// Specialisations that went through the pipeline.
    pub smooth: usize,
    pub failed: usize,
    pub rank_histogram: BTreeMap<u32, usize>,
    /// Percentage of `smooth` with `picard_upper = 22`.
    pub freq22: f64,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct ClassSummary {
    pub splitting: String,
    pub primes: usize,
    pub min: f64,
    pub avg: f64,
    pub max: f64,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct ScanReport {
    pub schema: u32,
    pub family: String,
    pub primes: Vec<u64>,
    /// Primes dropped because the family has bad reduction there.
    pub skipped_primes: Vec<u64>,
    pub rows: Vec<SurfaceRow>,
    pub per_prime: Vec<PrimeSummary>,
    pub classes: Vec<ClassSummary>,
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub params: ParamSelection,
    pub jobs: usize,
    pub checkpoint: Option<PathBuf>,
    pub analysis: AnalysisOptions,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { params: ParamSelection::All, jobs: 1, checkpoint: None, analysis: AnalysisOptions::default() }
    }
}

/// Odd primes in `[lo, hi]`.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi).filter(|&p| is_prime_u64(p)).collect()
}

/// Parses `a..b` (inclusive) or a single prime.
pub fn parse_prime_range(s: &str) -> Result<Vec<u64>> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad prime bound '{t}'")));
    match s.split_once("..") {
        Some((a, b)) => Ok(primes_in(num(a)?, num(b.trim_start_matches('='))?)),
        None => {
            let p = num(s)?;
            if p < 3 || !is_prime_u64(p) {
                return Err(domain_err!("{p} is not an odd prime"));
            }
            Ok(vec![p])
        }
    }
}

fn load_checkpoint(path: &PathBuf) -> Result<Vec<SurfaceRow>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(Error::Resource(format!("cannot read {}: {e}", path.display()))),
    };
    let mut rows = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::Resource(format!("cannot read {}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        // a torn final line from an interrupted run is dropped and recomputed
        if let Ok(row) = serde_json::from_str::<SurfaceRow>(&line) {
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Runs the pipeline over every selected specialisation at every prime.
pub fn family_scan(preset: &FamilyPreset, primes: &[u64], opts: &ScanOptions) -> Result<ScanReport> {
    let bad = preset.bad_denominator_primes();
    let (skipped, primes): (Vec<u64>, Vec<u64>) = primes.iter().partition(|p| bad.contains(p) || **p == 2);
    let mut tasks = Vec::new();
    for &p in &primes {
        let tuples = match &opts.params {
            ParamSelection::All => preset.parameter_space(p)?,
            ParamSelection::Sample(k) => preset.sample_parameters(p, *k)?,
            ParamSelection::Explicit(t) => {
                if let Some(bad) = t.iter().find(|t| t.len() != preset.arity()) {
                    return Err(domain_err!("{} takes {} parameters, got {:?}", preset.name, preset.arity(), bad));
                }
                t.clone()
            }
        };
        tasks.extend(tuples.into_iter().map(|t| (p, t)));
    }

    let mut done: BTreeMap<(String, u64, Vec<i64>), SurfaceRow> = BTreeMap::new();
    let mut log = None;
    if let Some(path) = &opts.checkpoint {
        for row in load_checkpoint(path)? {
            done.insert(row.key(), row);
        }
        let f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::Resource(format!("cannot open {}: {e}", path.display())))?;
        log = Some(Mutex::new(f));
    }
    let pending: Vec<(u64, Vec<i64>)> = {
        let mut seen = HashSet::new();
        tasks
            .iter()
            .filter(|(p, t)| {
                !done.contains_key(&(preset.key.to_string(), *p, t.clone())) && seen.insert((*p, t.clone()))
            })
            .cloned()
            .collect()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| Error::Resource(format!("cannot start workers: {e}")))?;
    let fresh: Vec<SurfaceRow> = pool.install(|| {
        pending
            .par_iter()
            .map(|(p, t)| {
                let row = scan_surface(preset, *p, t, &opts.analysis);
                if let Some(log) = &log {
                    let line = serde_json::to_string(&row).expect("rows serialize");
                    let mut f = log.lock().expect("checkpoint lock");
                    // losing a checkpoint line only costs a recomputation
                    let _ = writeln!(f, "{line}").and_then(|_| f.flush());
                }
                row
            })
            .collect()
    });
    for row in fresh {
        done.insert(row.key(), row);
    }
    let wanted: HashSet<(u64, Vec<i64>)> = tasks.into_iter().collect();
    let rows: Vec<SurfaceRow> = done.into_values().filter(|r| wanted.contains(&(r.p, r.params.clone()))).collect();
    Ok(aggregate(preset, primes, skipped, rows))
}

fn aggregate(preset: &FamilyPreset, primes: Vec<u64>, skipped: Vec<u64>, rows: Vec<SurfaceRow>) -> ScanReport {
    let mut per_prime = Vec::new();
    for &p in &primes {
        let mine: Vec<&SurfaceRow> = rows.iter().filter(|r| r.p == p).collect();
        let mut hist = BTreeMap::new();
        for r in &mine {
            if let Some(rk) = r.picard_upper {
                *hist.entry(rk).or_insert(0) += 1;
            }
        }
        let smooth = mine.iter().filter(|r| r.status == RowStatus::Ok).count();
        let n22 = hist.get(&22).copied().unwrap_or(0);
        per_prime.push(PrimeSummary {
            p,
            splitting: preset.splitting_class(p).name().to_string(),
            tried: mine.len(),
            smooth,
            failed: mine.iter().filter(|r| r.status == RowStatus::Failed).count(),
            rank_histogram: hist,
            freq22: if smooth == 0 { 0.0 } else { 100.0 * n22 as f64 / smooth as f64 },
        });
    }
    let mut classes = Vec::new();
    for class in ["inert", "split", "ramified"] {
        let f: Vec<f64> = per_prime.iter().filter(|s| s.splitting == class && s.smooth > 0).map(|s| s.freq22).collect();
        if f.is_empty() {
            continue;
        }
        classes.push(ClassSummary {
            splitting: class.to_string(),
            primes: f.len(),
            min: f.iter().copied().fold(f64::INFINITY, f64::min),
            avg: f.iter().sum::<f64>() / f.len() as f64,
            max: f.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        });
    }
    ScanReport {
        schema: SCHEMA,
        family: preset.key.to_string(),
        primes,
        skipped_primes: skipped,
        rows,
        per_prime,
        classes,
    }
}

impl ScanReport {
    /// Per-prime summary as CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("family,p,splitting,tried,smooth,failed,rank16,rank18,rank20,rank22,freq22\n");
        for s in &self.per_prime {
            let h = |k: u32| s.rank_histogram.get(&k).copied().unwrap_or(0);
            out += &format!(
                "{},{},{},{},{},{},{},{},{},{},{:.2}\n",
                self.family,
                s.p,
                s.splitting,
                s.tried,
                s.smooth,
                s.failed,
                h(16),
                h(18),
                h(20),
                h(22),
                s.freq22
            );
        }
        out
    }

    /// Rank-22 frequencies by splitting class: min, average, max.
    pub fn summary_table(&self) -> String {
        let mut out = format!("{:<10} {:>6} {:>8} {:>8} {:>8}\n", "class", "primes", "min", "avg", "max");
        for c in &self.classes {
            out += &format!("{:<10} {:>6} {:>8.2} {:>8.2} {:>8.2}\n", c.splitting, c.primes, c.min, c.avg, c.max);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::preset;

    #[test]
    fn selections_parse() {
        assert_eq!("all".parse::<ParamSelection>().unwrap(), ParamSelection::All);
        assert_eq!("sample:3".parse::<ParamSelection>().unwrap(), ParamSelection::Sample(3));
        assert_eq!(
            "values:1,2;3,4".parse::<ParamSelection>().unwrap(),
            ParamSelection::Explicit(vec![vec![1, 2], vec![3, 4]])
        );
        assert!("some".parse::<ParamSelection>().is_err());
        assert_eq!(parse_prime_range("10..20").unwrap(), vec![11, 13, 17, 19]);
        assert_eq!(parse_prime_range("2..7").unwrap(), vec![3, 5, 7]);
        assert!(parse_prime_range("9").is_err());
    }

    #[test]
    fn empty_prime_list() {
        let r = family_scan(preset("v2a").unwrap(), &[], &ScanOptions::default()).unwrap();
        assert!(r.rows.is_empty() && r.per_prime.is_empty() && r.classes.is_empty());
        assert_eq!(r.schema, 1);
    }

    #[test]
    fn excluded_rows_do_not_abort() {
        let opts = ScanOptions { params: ParamSelection::Explicit(vec![vec![0, 0]]), ..Default::default() };
        let r = family_scan(preset("v2ab").unwrap(), &[13], &opts).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].status, RowStatus::Excluded);
        assert_eq!(r.per_prime[0].smooth, 0);
        assert_eq!(r.per_prime[0].freq22, 0.0);
        let r = family_scan(
            preset("v5a").unwrap(),
            &[5, 7],
            &ScanOptions { params: ParamSelection::Sample(0), ..Default::default() },
        )
        .unwrap();
        assert_eq!(r.skipped_primes, vec![5]);
    }

    #[test]
    fn cm_surface_at_thirteen() {
        let row = scan_surface(preset("mu9").unwrap(), 13, &[], &AnalysisOptions::default());
        assert_eq!(row.status, RowStatus::Ok, "{row:?}");
        assert_eq!(row.picard_upper, Some(16), "{row:?}");
    }
}
