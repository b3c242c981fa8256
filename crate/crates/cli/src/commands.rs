//! Subcommand implementations. Each returns the text to print and an exit code.

use std::io::Write;
use std::path::{Path, PathBuf};

use mmcodes::params::{affordable_weight, combined_search, logical_space, syndrome_space, weight_stats, CycleSpace};
use mmcodes::{
    analyze, confinement_profile, logical_count, AnalysisOptions, Budget, CodeReport,
    ConfinementMode, ConfinementProfile, DistanceBound, MCssCode, PauliType, RandomizedOptions, SearchConfig,
};
use serde::Serialize;

use crate::config::{BuildConfig, Expected};
use crate::error::{exit, CliError, CliResult};
use crate::manifest::{audit_bundle, make_manifest, Manifest, MatrixFormat, MANIFEST_FILE, SCHEMA_VERSION};

pub struct Output {
    pub text: String,
    pub exit: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, exit: exit::OK }
    }
}

/// A config file, a bundle directory, or a bundle manifest.
pub struct Input {
    pub config: BuildConfig,
    pub bundle: Option<(PathBuf, Manifest)>,
}

impl Input {
    pub fn load(path: &Path) -> CliResult<Self> {
        let manifest_path = if path.is_dir() {
            Some(path.join(MANIFEST_FILE))
        } else if path.extension().is_some_and(|e| e == "json") {
            Some(path.to_path_buf())
        } else {
            None
        };
        match manifest_path {
            Some(mp) => {
                let m = Manifest::load(&mp)?;
                let dir = mp.parent().map(Path::to_path_buf).unwrap_or_default();
                Ok(Self {
                    config: m.to_config(),
                    bundle: Some((dir, m)),
                })
            }
            None => Ok(Self {
                config: BuildConfig::load(path)?,
                bundle: None,
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TextFormat {
    Json,
    Text,
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn build(cfg: &BuildConfig, out: &Path, formats: &[MatrixFormat]) -> CliResult<Output> {
    let code = cfg.build()?;
    std::fs::create_dir_all(out).map_err(CliError::io(out))?;
    let manifest = make_manifest(cfg, &code, formats, Some(out))?;
    let text = to_json(&manifest);
    let mp = out.join(MANIFEST_FILE);
    std::fs::write(&mp, &text).map_err(CliError::io(mp))?;
    let exit = if manifest.checks.all_pass() { exit::OK } else { exit::VERIFICATION };
    Ok(Output { text, exit })
}

pub fn export(input: &Input, format: &str, out: Option<&Path>) -> CliResult<Output> {
    let code = input.config.build()?;
    let formats = match format {
        "alist" => vec![MatrixFormat::Alist],
        "mtx" => vec![MatrixFormat::Mtx],
        "json" => vec![],
        other => return Err(CliError::Usage(format!("unknown export format {other:?} (alist, mtx, json)"))),
    };
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    let manifest = make_manifest(&input.config, &code, &formats, out)?;
    if formats.is_empty() {
        return Ok(Output::ok(to_json(&manifest)));
    }
    match out {
        Some(dir) => {
            let listing: Vec<String> = manifest
                .matrices
                .iter()
                .flat_map(|m| m.files.iter().map(|f| format!("{}\n", dir.join(&f.path).display())))
                .collect();
            Ok(Output::ok(listing.concat()))
        }
        // single stream: P_X only
        None => Ok(Output::ok(formats[0].render(&code.p_x))),
    }
}

#[derive(Serialize)]
struct VerifyReport {
    name: String,
    n: usize,
    k: usize,
    checks: crate::manifest::Checks,
    problems: Vec<String>,
    ok: bool,
}

pub fn verify(input: &Input) -> CliResult<Output> {
    let code = match input.config.build() {
        Ok(c) => c,
        Err(CliError::Verification(msg)) => {
            return Ok(Output {
                text: format!("{msg}\n"),
                exit: exit::VERIFICATION,
            })
        }
        Err(e) => return Err(e),
    };
    let checks = crate::manifest::compute_checks(&code)?;
    let problems = match &input.bundle {
        Some((dir, m)) => audit_bundle(dir, m, &code),
        None => Vec::new(),
    };
    let ok = checks.all_pass() && problems.is_empty();
    let report = VerifyReport {
        name: input.config.name.clone(),
        n: code.n,
        k: logical_count(&code),
        checks,
        problems,
        ok,
    };
    Ok(Output {
        text: to_json(&report),
        exit: if ok { exit::OK } else { exit::VERIFICATION },
    })
}

/// Effort flags shared by the analysis commands.
#[derive(Clone, Debug)]
pub struct Effort {
    pub w_exhaustive: usize,
    pub iterations: usize,
    pub seed: u64,
    pub workers: usize,
    pub budget: Budget,
}

impl Effort {
    fn randomized(&self, stop_at: Option<usize>) -> RandomizedOptions {
        RandomizedOptions {
            iterations: self.iterations,
            seed: self.seed,
            streams: self.workers.max(1),
            stop_at,
        }
    }
}

#[derive(Serialize)]
struct ParamsOutput<'a> {
    schema_version: u32,
    name: &'a str,
    orders: &'a [usize],
    generators: &'a [String],
    t: usize,
    q: usize,
    seed: u64,
    workers: usize,
    report: &'a CodeReport,
}

fn fmt_bound(d: &DistanceBound) -> String {
    match d.upper {
        Some(u) if u == d.lower => format!("{u} (exact)"),
        Some(u) => format!("{}..={u}", d.lower),
        None => format!(">= {}", d.lower),
    }
}

fn fmt_profile(p: &ConfinementProfile) -> String {
    let vals: Vec<String> = p
        .entries
        .iter()
        .map(|e| e.min_syndrome_weight.map_or("-".into(), |v| v.to_string()))
        .collect();
    let kind = p.entries.first().map_or("", |e| match e.kind {
        mmcodes::params::EntryKind::Exact => "exact",
        mmcodes::params::EntryKind::UpperBound => "upper bound",
        mmcodes::params::EntryKind::Heuristic => "heuristic",
    });
    format!("{} ({kind})", vals.join(","))
}

pub fn params(
    input: &Input,
    effort: &Effort,
    confinement_w: Option<usize>,
    mode: ConfinementMode,
    single_shot_w: Option<usize>,
    format: TextFormat,
) -> CliResult<Output> {
    let code = input.config.build()?;
    let opts = AnalysisOptions {
        w_exhaustive: effort.w_exhaustive,
        iterations: effort.iterations,
        seed: effort.seed,
        workers: effort.workers,
        confinement_w,
        confinement_mode: mode,
        single_shot_w,
        budget: effort.budget,
    };
    let report = analyze(&code, &opts)?;
    let text = match format {
        TextFormat::Json => to_json(&ParamsOutput {
            schema_version: SCHEMA_VERSION,
            name: &input.config.name,
            orders: &input.config.orders,
            generators: &input.config.generators,
            t: code.t,
            q: code.q,
            seed: effort.seed,
            workers: effort.workers,
            report: &report,
        }),
        TextFormat::Text => {
            let mut s = format!("{}: [[{}, {}, {}]]\n", input.config.name, report.n, report.k, fmt_bound(&report.distance()));
            s += &format!("d_x = {}\nd_z = {}\n", fmt_bound(&report.d_x), fmt_bound(&report.d_z));
            for (name, d) in [("d_ss_x", &report.d_ss_x), ("d_ss_z", &report.d_ss_z)] {
                if let Some(d) = d {
                    s += &format!("{name} = {}\n", fmt_bound(d));
                }
            }
            for (name, p) in [("Z-confinement", &report.confinement_z), ("X-confinement", &report.confinement_x)] {
                if let Some(p) = p {
                    s += &format!("{name}: {}\n", fmt_profile(p));
                }
            }
            if let Some(d) = report.d_s {
                s += &format!("d_S = {d}\n");
            }
            s += &format!(
                "w_med = ({}, {}), w_max = ({}, {})\n",
                report.w_med_x, report.w_med_z, report.w_max_x, report.w_max_z
            );
            for n in &report.notes {
                s += &format!("note: {n}\n");
            }
            s
        }
    };
    Ok(Output::ok(text))
}

fn kinds(which: &str) -> CliResult<Vec<PauliType>> {
    match which {
        "both" => Ok(vec![PauliType::X, PauliType::Z]),
        other => Ok(vec![other.parse().map_err(|_| CliError::Usage(format!("--type must be x, z or both, not {other:?}")))?]),
    }
}

#[derive(Serialize)]
struct BoundsOutput {
    name: String,
    kind: &'static str,
    seed: u64,
    workers: usize,
    bounds: Vec<(PauliType, DistanceBound)>,
}

fn bounds(
    input: &Input,
    which: &str,
    effort: &Effort,
    kind: &'static str,
    space: impl Fn(&MCssCode, PauliType) -> mmcodes::Result<CycleSpace>,
) -> CliResult<Output> {
    let code = input.config.build()?;
    let mut out = Vec::new();
    for k in kinds(which)? {
        let s = space(&code, k)?;
        let b = mmcodes::par::with_workers(effort.workers, || {
            combined_search(&s, effort.w_exhaustive, &effort.randomized(None), &effort.budget)
        })?;
        out.push((k, b));
    }
    Ok(Output::ok(to_json(&BoundsOutput {
        name: input.config.name.clone(),
        kind,
        seed: effort.seed,
        workers: effort.workers,
        bounds: out,
    })))
}

pub fn distance(input: &Input, which: &str, effort: &Effort) -> CliResult<Output> {
    bounds(input, which, effort, "distance", logical_space)
}

pub fn ssdist(input: &Input, which: &str, effort: &Effort) -> CliResult<Output> {
    bounds(input, which, effort, "single_shot_distance", syndrome_space)
}

#[derive(Serialize)]
struct ConfineOutput {
    name: String,
    profiles: Vec<(PauliType, ConfinementProfile)>,
    d_s: Option<usize>,
}

pub fn confine(input: &Input, which: &str, w: usize, mode: ConfinementMode, workers: usize, budget: &Budget) -> CliResult<Output> {
    let code = input.config.build()?;
    let mut profiles = Vec::new();
    for k in kinds(which)? {
        let p = mmcodes::par::with_workers(workers, || confinement_profile(&code, k, w, mode, budget))?;
        profiles.push((k, p));
    }
    let d_s = profiles.iter().filter_map(|(_, p)| p.min()).min();
    Ok(Output::ok(to_json(&ConfineOutput {
        name: input.config.name.clone(),
        profiles,
        d_s,
    })))
}

pub fn load_search_config(path: &Path) -> CliResult<SearchConfig> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    toml::from_str(&text).map_err(|e| CliError::Config {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn search(config: &SearchConfig, out: &mut dyn Write) -> CliResult<Output> {
    let summary = mmcodes::run_search(config, out)?;
    Ok(Output::ok(format!(
        "sampled {}, evaluated {}, accepted {}, duplicates {}, rejected by stage {:?}\n",
        summary.sampled, summary.evaluated, summary.accepted, summary.duplicates, summary.rejected_by_stage
    )))
}

/// One recomputed code zoo entry.
#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub row: usize,
    pub name: String,
    pub orders: Vec<usize>,
    pub expected: Expected,
    pub n: usize,
    pub k: usize,
    pub d: DistanceBound,
    /// Median over the rows of both check matrices.
    pub w_med: f64,
    pub w_max: usize,
    pub status: RowStatus,
    pub mismatches: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Match,
    UpperBoundOnly,
    Mismatch,
}

/// Median and maximum over the rows of `P_X` and `P_Z` together.
pub fn combined_weights(code: &MCssCode) -> (f64, usize) {
    let mut w = code.p_x.row_weights();
    w.extend(code.p_z.row_weights());
    weight_stats(w)
}

/// Recomputes one entry: exact `n`, `k` and check weights, and distance
/// bounds from an exhaustive search (capped by the budget) followed by a
/// randomized search that stops once it reaches the published distance.
pub fn table_row(row: usize, cfg: &BuildConfig, effort: &Effort) -> CliResult<TableRow> {
    let code = cfg.build()?;
    let expected = cfg.expected.clone().unwrap_or_default();
    let k = logical_count(&code);
    let w = affordable_weight(code.n, effort.w_exhaustive, &effort.budget);
    let mut d: Option<DistanceBound> = None;
    for kind in [PauliType::X, PauliType::Z] {
        let space = logical_space(&code, kind)?;
        let b = mmcodes::par::with_workers(effort.workers, || {
            combined_search(&space, w, &effort.randomized(expected.d), &effort.budget)
        })?;
        d = Some(match d {
            None => b,
            Some(prev) => min_bound(&prev, &b),
        });
    }
    let d = d.expect("two types");
    let (w_med, w_max) = combined_weights(&code);

    let mut mismatches = Vec::new();
    if let Some(want) = expected.w_med {
        if w_med != want as f64 {
            mismatches.push(format!("w_med: expected {want}, got {w_med}"));
        }
    }
    let mut check = |what: &str, got: usize, want: Option<usize>| {
        if let Some(want) = want {
            if got != want {
                mismatches.push(format!("{what}: expected {want}, got {got}"));
            }
        }
    };
    check("n", code.n, expected.n);
    check("k", k, expected.k);
    check("w_max", w_max, expected.w_max);
    let mut upper_only = false;
    if let Some(want) = expected.d {
        if d.lower > want {
            mismatches.push(format!("d: no logical of weight < {} but expected {want}", d.lower));
        } else if d.upper.is_some_and(|u| u < want) {
            mismatches.push(format!("d: found a logical of weight {} < expected {want}", d.upper.unwrap_or(0)));
        } else if !d.is_exact() {
            upper_only = true;
        }
    }
    let status = if !mismatches.is_empty() {
        RowStatus::Mismatch
    } else if upper_only {
        RowStatus::UpperBoundOnly
    } else {
        RowStatus::Match
    };
    Ok(TableRow {
        row,
        name: cfg.name.clone(),
        orders: cfg.orders.clone(),
        expected,
        n: code.n,
        k,
        d,
        w_med,
        w_max,
        status,
        mismatches,
    })
}

/// Bounds on `min(a, b)` given bounds on `a` and `b`.
fn min_bound(a: &DistanceBound, b: &DistanceBound) -> DistanceBound {
    let lower = a.lower.min(b.lower);
    match (a.upper, b.upper) {
        (Some(x), Some(y)) if y < x => DistanceBound { lower, upper: Some(y), witness: b.witness.clone() },
        (Some(x), _) => DistanceBound { lower, upper: Some(x), witness: a.witness.clone() },
        (None, Some(y)) => DistanceBound { lower, upper: Some(y), witness: b.witness.clone() },
        (None, None) => DistanceBound { lower, upper: None, witness: None },
    }
}

/// Parses row selectors such as `3`, `1-5` or `all`. Empty selects every row.
pub fn select_rows(selectors: &[String], total: usize) -> CliResult<Vec<usize>> {
    if selectors.is_empty() || selectors.iter().any(|s| s == "all") {
        return Ok((1..=total).collect());
    }
    let mut rows = Vec::new();
    for s in selectors {
        let bad = || CliError::Usage(format!("bad row selector {s:?} (use N, A-B or all; rows 1..={total})"));
        let (a, b) = match s.split_once('-') {
            Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => {
                let v: usize = s.trim().parse().map_err(|_| bad())?;
                (v, v)
            }
        };
        if a == 0 || b > total || a > b {
            return Err(bad());
        }
        rows.extend(a..=b);
    }
    rows.sort_unstable();
    rows.dedup();
    Ok(rows)
}

pub fn table2(selectors: &[String], effort: &Effort, format: TextFormat) -> CliResult<Output> {
    let zoo = crate::fixtures::zoo();
    let rows = select_rows(selectors, zoo.len())?;
    let mut out = Vec::new();
    for r in rows {
        out.push(table_row(r, &zoo[r - 1], effort)?);
    }
    let failed = out.iter().any(|r| r.status == RowStatus::Mismatch);
    let text = match format {
        TextFormat::Json => to_json(&out),
        TextFormat::Text => {
            let mut s = String::from("row  N     K   D         w_med w_max  status\n");
            for r in &out {
                let d = fmt_bound(&r.d);
                s += &format!(
                    "{:<4} {:<5} {:<3} {:<9} {:<5} {:<5}  {:?}{}\n",
                    r.row,
                    r.n,
                    r.k,
                    d,
                    r.w_med,
                    r.w_max,
                    r.status,
                    if r.mismatches.is_empty() { String::new() } else { format!(" ({})", r.mismatches.join("; ")) }
                );
            }
            s
        }
    };
    Ok(Output {
        text,
        exit: if failed { exit::VERIFICATION } else { exit::OK },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_selectors() {
        assert_eq!(select_rows(&[], 3).unwrap(), vec![1, 2, 3]);
        assert_eq!(select_rows(&["2-3".into(), "1".into(), "2".into()], 5).unwrap(), vec![1, 2, 3]);
        assert!(select_rows(&["0".into()], 5).is_err());
        assert!(select_rows(&["4-9".into()], 5).is_err());
        assert!(select_rows(&["x".into()], 5).is_err());
    }

    proptest::proptest! {
        #[test]
        fn selectors_give_the_sorted_union(ranges in proptest::collection::vec((1usize..=21, 0usize..5), 1..6)) {
            let sel: Vec<String> = ranges.iter().map(|&(a, len)| format!("{a}-{}", (a + len).min(21))).collect();
            let rows = select_rows(&sel, 21).unwrap();
            let mut want: Vec<usize> = ranges.iter().flat_map(|&(a, len)| a..=(a + len).min(21)).collect();
            want.sort_unstable();
            want.dedup();
            proptest::prop_assert_eq!(rows, want);
        }
    }

    #[test]
    fn min_of_bounds() {
        let a = DistanceBound { lower: 4, upper: None, witness: None };
        let b = DistanceBound { lower: 3, upper: Some(3), witness: Some(vec![0, 1, 2]) };
        assert_eq!(min_bound(&a, &b), b);
        let c = DistanceBound { lower: 5, upper: Some(9), witness: None };
        assert_eq!(min_bound(&a, &c), DistanceBound { lower: 4, upper: Some(9), witness: None });
    }
}
