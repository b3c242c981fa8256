//! Randomized search over generator polynomials.
//!
//! Candidate `i` is drawn from its own ChaCha stream `(seed, i)`, and the
//! randomized distance search inside its evaluation is seeded from the
//! candidate's canonical key. A candidate's report therefore depends only on
//! the candidate, and the output stream only on `(config, seed)`; the worker
//! count changes wall time, not results.

use std::io::Write;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::koszul::{verify_complex, MCssCode};
use crate::params::{analyze, AnalysisOptions, Budget, CodeReport, ConfinementMode};
use crate::par;
use crate::ring::{parse_poly_with, GroupSpec, RingElem, Variables};

/// Exhaustive and randomized effort per candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceBudget {
    pub w_exhaustive: usize,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    #[serde(default = "default_t")]
    pub t: usize,
    pub orders: Vec<GroupSpec>,
    #[serde(default = "default_term_range")]
    pub term_range: (usize, usize),
    #[serde(default = "default_k_min")]
    pub require_k_min: usize,
    /// Reject candidates with a logical operator lighter than this.
    #[serde(default = "default_min_distance")]
    pub min_distance: usize,
    #[serde(default = "default_distance_budget")]
    pub distance_budget: DistanceBudget,
    #[serde(default)]
    pub confinement_w_max: Option<usize>,
    #[serde(default = "default_max_candidates")]
    pub max_candidates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Polynomial templates such as `"(1+v_a)*(1+v_b*v_c)"`. Each placeholder
    /// `v_<letter>` is replaced by a distinct random variable.
    #[serde(default)]
    pub structured_families: Option<Vec<String>>,
    /// Candidates evaluated per batch.
    #[serde(default = "default_batch")]
    pub batch: usize,
}

fn default_t() -> usize {
    4
}
fn default_term_range() -> (usize, usize) {
    (2, 6)
}
fn default_k_min() -> usize {
    1
}
fn default_min_distance() -> usize {
    2
}
fn default_distance_budget() -> DistanceBudget {
    DistanceBudget {
        w_exhaustive: 3,
        iterations: 200,
    }
}
fn default_max_candidates() -> usize {
    100
}
fn default_workers() -> usize {
    1
}
fn default_batch() -> usize {
    16
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.t == 0 {
            return bad("t must be at least 1");
        }
        if self.orders.is_empty() {
            return bad("at least one group is required");
        }
        let (lo, hi) = self.term_range;
        if lo < 1 || hi < lo {
            return bad("term_range must satisfy 1 <= min <= max");
        }
        if let Some(templates) = &self.structured_families {
            if templates.is_empty() {
                return bad("structured_families must not be empty when given");
            }
            for spec in &self.orders {
                for t in templates {
                    let holes = placeholders(t);
                    if holes.len() > spec.dims() {
                        return Err(Error::InvalidArgument(format!(
                            "template {t:?} needs {} variables, group {spec} has {}",
                            holes.len(),
                            spec.dims()
                        )));
                    }
                }
            }
        } else if self.orders.iter().any(|s| s.order() < lo) {
            return bad("term_range minimum exceeds a group order");
        }
        Ok(())
    }

    fn analysis(&self) -> AnalysisOptions {
        AnalysisOptions {
            w_exhaustive: self.distance_budget.w_exhaustive,
            iterations: self.distance_budget.iterations,
            seed: 0,
            workers: 1,
            confinement_w: self.confinement_w_max,
            confinement_mode: ConfinementMode::Exact,
            single_shot_w: None,
            budget: Budget::from_env(),
        }
    }
}

/// Distinct placeholder letters of a template, in order of first use.
fn placeholders(template: &str) -> Vec<char> {
    let b: Vec<char> = template.chars().collect();
    let mut out = Vec::new();
    for w in b.windows(3) {
        if w[0] == 'v' && w[1] == '_' && w[2].is_ascii_lowercase() && !out.contains(&w[2]) {
            out.push(w[2]);
        }
    }
    out
}

/// Replaces each placeholder by the variable name assigned to it.
fn fill_template(template: &str, assignment: &[(char, String)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut chars = template.chars().peekable();
    while let Some(c) = chars.next() {
        if c == 'v' && chars.peek() == Some(&'_') {
            let mut look = chars.clone();
            look.next();
            if let Some((_, var)) = look.next().and_then(|h| assignment.iter().find(|(p, _)| *p == h)) {
                chars.next();
                chars.next();
                out.push_str(var);
                continue;
            }
        }
        out.push(c);
    }
    out
}

/// Draws `t` generators over `spec`.
pub fn sample_generators<R: Rng>(config: &SearchConfig, spec: &GroupSpec, rng: &mut R) -> Result<Vec<RingElem>> {
    let n = spec.order();
    (0..config.t)
        .map(|_| match &config.structured_families {
            Some(templates) => {
                let template = templates.choose(rng).expect("validated non-empty");
                let holes = placeholders(template);
                let vars = Variables::default_for(spec.dims());
                let mut picks: Vec<usize> = (0..spec.dims()).collect();
                picks.shuffle(rng);
                if picks.len() < holes.len() {
                    return Err(Error::InvalidArgument(format!("template {template:?} needs {} variables", holes.len())));
                }
                let assignment: Vec<(char, String)> = holes.into_iter().zip(picks).map(|(h, i)| (h, vars.name(i))).collect();
                Ok(parse_poly_with(&fill_template(template, &assignment), spec, &vars)?)
            }
            None => {
                let (lo, hi) = config.term_range;
                if lo > n {
                    return Err(Error::InvalidArgument(format!("{lo} terms requested from a group of order {n}")));
                }
                let count = rng.gen_range(lo..=hi.min(n));
                let terms = index::sample(rng, n, count).into_vec();
                Ok(RingElem::from_indices(spec, terms))
            }
        })
        .collect()
}

/// Canonical identity of a candidate: the group orders and each generator's
/// sorted monomial list, with the generator lists sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CandidateKey {
    pub orders: Vec<usize>,
    pub generators: Vec<Vec<usize>>,
}

impl CandidateKey {
    pub fn new(spec: &GroupSpec, gens: &[RingElem]) -> Self {
        let mut generators: Vec<Vec<usize>> = gens.iter().map(|g| g.terms().to_vec()).collect();
        generators.sort();
        Self {
            orders: spec.orders().to_vec(),
            generators,
        }
    }

    /// Stable 64-bit FNV-1a digest, used to seed per-candidate randomness.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        for &o in &self.orders {
            eat(o as u64);
        }
        for g in &self.generators {
            eat(u64::MAX);
            for &t in g {
                eat(t as u64);
            }
        }
        h
    }
}

/// Why a candidate was dropped. Stages: 1 build/verify, 2 logical count,
/// 3 exhaustive distance, 4 randomized distance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub stage: u8,
    pub reason: String,
}

fn reject(stage: u8, reason: impl Into<String>) -> Rejection {
    Rejection {
        stage,
        reason: reason.into(),
    }
}

/// Runs the staged filter on one candidate.
pub fn evaluate_candidate(gens: &[RingElem], spec: &GroupSpec, config: &SearchConfig) -> std::result::Result<CodeReport, Rejection> {
    let code = MCssCode::from_generators(spec, gens, None).map_err(|e| reject(1, e.to_string()))?;
    let maps = crate::koszul::instantiate(&crate::koszul::symbolic_boundaries(gens.len()).map_err(|e| reject(1, e.to_string()))?, gens, spec)
        .map_err(|e| reject(1, e.to_string()))?;
    if !verify_complex(&maps).map_err(|e| reject(1, e.to_string()))? {
        return Err(reject(1, "boundary maps do not compose to zero"));
    }
    let k = crate::params::logical_count(&code);
    if k < config.require_k_min {
        return Err(reject(2, format!("k = {k} < {}", config.require_k_min)));
    }
    let mut opts = config.analysis();
    opts.seed = CandidateKey::new(spec, gens).digest();
    // stage 3 alone first, so rejected candidates skip the randomized work
    let quick = AnalysisOptions {
        iterations: 0,
        confinement_w: None,
        ..opts.clone()
    };
    let pre = analyze(&code, &quick).map_err(|e| reject(3, e.to_string()))?;
    if let Some(d) = pre.distance().upper {
        if d < config.min_distance {
            return Err(reject(3, format!("logical of weight {d} < {}", config.min_distance)));
        }
    }
    let report = analyze(&code, &opts).map_err(|e| reject(4, e.to_string()))?;
    if let Some(d) = report.distance().upper {
        if d < config.min_distance {
            return Err(reject(4, format!("logical of weight {d} < {}", config.min_distance)));
        }
    }
    Ok(report)
}

/// One accepted candidate, as written to the output stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub index: usize,
    pub orders: Vec<usize>,
    pub generators: Vec<String>,
    pub key: CandidateKey,
    pub report: CodeReport,
}

/// Totals written after the last record.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub sampled: usize,
    pub evaluated: usize,
    pub accepted: usize,
    pub duplicates: usize,
    /// Rejections per stage, index 0 = stage 1.
    pub rejected_by_stage: [usize; 4],
    pub seed: u64,
    pub workers: usize,
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Line<'a> {
    Candidate(&'a SearchRecord),
    Summary(&'a SearchSummary),
}

fn candidate(config: &SearchConfig, index: usize) -> Result<(GroupSpec, Vec<RingElem>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let spec = config.orders.choose(&mut rng).expect("validated non-empty").clone();
    let gens = sample_generators(config, &spec, &mut rng)?;
    Ok((spec, gens))
}

/// Runs the search, writing one JSON line per accepted candidate and a final
/// summary line to `out`. Records appear in candidate order.
pub fn run_search(config: &SearchConfig, out: &mut dyn Write) -> Result<SearchSummary> {
    config.validate()?;
    let mut summary = SearchSummary {
        seed: config.seed,
        workers: config.workers,
        ..Default::default()
    };
    let mut seen: FxHashSet<CandidateKey> = FxHashSet::default();
    let batch = config.batch.max(1);
    let io = |e: std::io::Error| Error::InvalidArgument(format!("output: {e}"));
    let mut start = 0;
    while start < config.max_candidates {
        let end = (start + batch).min(config.max_candidates);
        let mut todo = Vec::new();
        for i in start..end {
            let (spec, gens) = candidate(config, i)?;
            summary.sampled += 1;
            let key = CandidateKey::new(&spec, &gens);
            if seen.insert(key.clone()) {
                todo.push((i, spec, gens, key));
            } else {
                summary.duplicates += 1;
            }
        }
        let results = par::with_workers(config.workers, || {
            par::map_collect(&todo, |(_, spec, gens, _)| evaluate_candidate(gens, spec, config))
        });
        for ((i, spec, gens, key), result) in todo.into_iter().zip(results) {
            summary.evaluated += 1;
            match result {
                Ok(report) => {
                    summary.accepted += 1;
                    let vars = Variables::default_for(spec.dims());
                    let record = SearchRecord {
                        index: i,
                        orders: spec.orders().to_vec(),
                        generators: gens.iter().map(|g| g.render(&vars)).collect(),
                        key,
                        report,
                    };
                    serde_json::to_writer(&mut *out, &Line::Candidate(&record)).map_err(|e| Error::InvalidArgument(e.to_string()))?;
                    writeln!(out).map_err(io)?;
                }
                Err(r) => summary.rejected_by_stage[usize::from(r.stage.clamp(1, 4)) - 1] += 1,
            }
        }
        start = end;
    }
    serde_json::to_writer(&mut *out, &Line::Summary(&summary)).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    writeln!(out).map_err(io)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_poly;

    fn config(orders: Vec<Vec<usize>>) -> SearchConfig {
        SearchConfig {
            t: 4,
            orders: orders.into_iter().map(|o| GroupSpec::new(o).unwrap()).collect(),
            term_range: (2, 3),
            require_k_min: 1,
            min_distance: 2,
            distance_budget: DistanceBudget {
                w_exhaustive: 2,
                iterations: 5,
            },
            confinement_w_max: None,
            max_candidates: 6,
            seed: 7,
            workers: 1,
            structured_families: None,
            batch: 4,
        }
    }

    fn gens(spec: &GroupSpec, g: &[&str]) -> Vec<RingElem> {
        g.iter().map(|g| parse_poly(g, spec).unwrap()).collect()
    }

    #[test]
    fn single_term_range_gives_monomials() {
        let mut c = config(vec![vec![2, 2, 2, 2]]);
        c.term_range = (1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = sample_generators(&c, &c.orders[0], &mut rng).unwrap();
        assert_eq!(g.len(), 4);
        assert!(g.iter().all(|g| g.weight() == 1));
    }

    #[test]
    fn templates_give_weight_four_products() {
        assert_eq!(placeholders("(1+v_a)*(1+v_b*v_c)"), vec!['a', 'b', 'c']);
        assert_eq!(fill_template("(1+v_a)*(1+v_b*v_c)", &[('a', "x".into()), ('b', "y".into()), ('c', "z".into())]), "(1+x)*(1+y*z)");
        let mut c = config(vec![vec![2, 2, 2, 2]]);
        c.structured_families = Some(vec!["(1+v_a)*(1+v_b*v_c)".into()]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            for g in sample_generators(&c, &c.orders[0], &mut rng).unwrap() {
                assert_eq!(g.weight(), 4);
            }
        }
        c.orders = vec![GroupSpec::new(vec![4, 4]).unwrap()];
        assert!(c.validate().is_err());
    }

    #[test]
    fn sampling_is_reproducible() {
        let c = config(vec![vec![3, 3, 3], vec![2, 2, 2, 2]]);
        for i in 0..5 {
            assert_eq!(candidate(&c, i).unwrap(), candidate(&c, i).unwrap());
        }
        assert_ne!(candidate(&c, 0).unwrap(), candidate(&c, 1).unwrap());
    }

    #[test]
    fn staged_rejections() {
        let s = GroupSpec::new(vec![2, 2, 2, 2]).unwrap();
        let c = config(vec![vec![2, 2, 2, 2]]);
        assert_eq!(evaluate_candidate(&gens(&s, &["1", "1", "1", "1"]), &s, &c).unwrap_err().stage, 2);

        let s3 = GroupSpec::new(vec![3]).unwrap();
        let mut c2 = config(vec![vec![3]]);
        c2.t = 2;
        c2.min_distance = 3;
        let r = evaluate_candidate(&gens(&s3, &["1 + x", "1 + x"]), &s3, &c2).unwrap_err();
        assert_eq!(r.stage, 3);

        let row1 = gens(&s, &["1 + w*x", "1 + x*y", "1 + y*z", "1 + w*z"]);
        let mut c3 = c.clone();
        c3.distance_budget.w_exhaustive = 4;
        let report = evaluate_candidate(&row1, &s, &c3).unwrap();
        assert_eq!((report.n, report.k, report.distance().upper), (96, 12, Some(4)));
    }

    #[test]
    fn empty_search_writes_summary_only() {
        let mut c = config(vec![vec![2, 2, 2, 2]]);
        c.max_candidates = 0;
        let mut out = Vec::new();
        let s = run_search(&c, &mut out).unwrap();
        assert_eq!(s.sampled, 0);
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("{\"type\":\"summary\""));
    }

    #[test]
    fn search_is_deterministic_and_deduplicated() {
        let mut c = config(vec![vec![2, 2, 2, 2]]);
        c.structured_families = Some(vec!["1 + v_a".into()]);
        c.max_candidates = 12;
        let mut a = Vec::new();
        let mut b = Vec::new();
        let sa = run_search(&c, &mut a).unwrap();
        c.workers = 2;
        c.batch = 5;
        let sb = run_search(&c, &mut b).unwrap();
        assert_eq!(sa.accepted, sb.accepted);
        let records = |v: &[u8]| -> Vec<String> {
            String::from_utf8(v.to_vec()).unwrap().lines().filter(|l| l.contains("\"candidate\"")).map(String::from).collect()
        };
        assert_eq!(records(&a), records(&b));
        // only 4!/|stabilizer| distinct generator sets exist, so most draws repeat
        assert!(sa.duplicates > 0);
        assert_eq!(sa.sampled, sa.evaluated + sa.duplicates);
        let keys: FxHashSet<String> = records(&a)
            .iter()
            .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["key"].to_string())
            .collect();
        assert_eq!(keys.len(), records(&a).len());
    }
}
