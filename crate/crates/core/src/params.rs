//! Code parameters: logical count, distances, single-shot distances,
//! confinement profiles and check-weight statistics.
//!
//! Every distance-like quantity is the minimum weight of a vector `v` with
//! `A v = 0` that is not in the row space of a second matrix `B` (with
//! `A B^T = 0`). [`CycleSpace`] packs each column `j` as the pair
//! `(A e_j, L e_j)` where the rows of `L` complete `rowspace(A)` to
//! `ker(B)`. A vector with `A v = 0` is then trivial exactly when `L v = 0`,
//! and two vectors lie in the same coset of `rowspace(B)` exactly when their
//! packed keys agree.

use std::ops::ControlFlow;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{dot, ones, popcount, words_for, xor_into, BitMatrix, BitVec, IncrementalBasis};
use crate::koszul::MCssCode;
use crate::par;

/// Default cap on `sum_{j <= w} C(n, j)` for exhaustive enumeration.
pub const DEFAULT_BUDGET: f64 = 1e9;

/// Default cap on the number of coset keys held in memory by exact confinement.
pub const DEFAULT_KEY_BUDGET: f64 = 2e7;

/// Environment variable that overrides [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "MMCODES_BUDGET";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    /// Maximum `sum_{j <= w} C(n, j)` for exhaustive searches.
    pub enumeration: f64,
    /// Maximum number of stored coset keys for exact confinement.
    pub keys: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            enumeration: DEFAULT_BUDGET,
            keys: DEFAULT_KEY_BUDGET,
        }
    }
}

impl Budget {
    /// Default budget, with the enumeration cap taken from `MMCODES_BUDGET` if set.
    pub fn from_env() -> Self {
        let mut b = Self::default();
        if let Some(v) = std::env::var(BUDGET_ENV).ok().and_then(|s| s.trim().parse::<f64>().ok()) {
            if v > 0.0 {
                b.enumeration = v;
            }
        }
        b
    }

    fn check(&self, needed: f64, budget: f64) -> Result<()> {
        if needed > budget {
            Err(Error::BudgetExceeded { needed, budget })
        } else {
            Ok(())
        }
    }
}

/// `sum_{j <= w} C(n, j)` as a float.
pub fn ball_size(n: usize, w: usize) -> f64 {
    let mut term = 1.0f64;
    let mut total = 1.0f64;
    for j in 1..=w.min(n) {
        term = term * (n + 1 - j) as f64 / j as f64;
        total += term;
    }
    total
}

/// Pauli type of an operator or error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliType {
    X,
    Z,
}

impl std::fmt::Display for PauliType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PauliType::X => "X",
            PauliType::Z => "Z",
        })
    }
}

impl std::str::FromStr for PauliType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(PauliType::X),
            "z" | "Z" => Ok(PauliType::Z),
            _ => Err(Error::InvalidArgument(format!("unknown Pauli type {s:?}"))),
        }
    }
}

/// Bounds on a minimum weight.
///
/// `lower` is certified: nothing nontrivial exists below it. `upper`, when
/// present, is the weight of `witness`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceBound {
    pub lower: usize,
    pub upper: Option<usize>,
    /// Support of a minimum-weight nontrivial vector found so far.
    pub witness: Option<Vec<usize>>,
}

impl DistanceBound {
    pub fn is_exact(&self) -> bool {
        self.upper == Some(self.lower)
    }

    /// Combines two bounds on the same quantity.
    pub fn merge(&self, other: &DistanceBound) -> DistanceBound {
        let lower = self.lower.max(other.lower);
        let (upper, witness) = match (self.upper, other.upper) {
            (Some(a), Some(b)) if b < a => (Some(b), other.witness.clone()),
            (Some(a), _) => (Some(a), self.witness.clone()),
            (None, b) => (b, other.witness.clone()),
        };
        DistanceBound { lower, upper, witness }
    }
}

/// Cycles of `A` modulo the row space of `B`.
#[derive(Clone, Debug)]
pub struct CycleSpace {
    n: usize,
    check: BitMatrix,
    logicals: BitMatrix,
    syn_words: usize,
    stride: usize,
    keys: Vec<u64>,
}

impl CycleSpace {
    /// `check` is `A`, `trivial` is `B`. Requires `A B^T = 0`.
    pub fn new(check: &BitMatrix, trivial: &BitMatrix) -> Result<Self> {
        let n = check.cols();
        if trivial.cols() != n {
            return Err(Error::ShapeMismatch {
                op: "cycle space",
                left: check.shape(),
                right: trivial.shape(),
            });
        }
        if !check.mul(&trivial.transpose())?.is_zero() {
            return Err(Error::Orthogonality("check * trivial^T != 0"));
        }
        // complete rowspace(A) to ker(B)
        let mut basis = IncrementalBasis::new(n);
        for i in 0..check.rows() {
            basis.insert(check.row_words(i));
        }
        let kernel = trivial.kernel_basis();
        let mut logical_rows = Vec::new();
        for i in 0..kernel.rows() {
            if basis.insert(kernel.row_words(i)) {
                logical_rows.push(kernel.row(i));
            }
        }
        let logicals = BitMatrix::from_bitvecs(&logical_rows, n);

        let syn_words = words_for(check.rows());
        let stride = syn_words + words_for(logicals.rows());
        let mut keys = vec![0u64; n * stride];
        let ct = check.transpose();
        let lt = logicals.transpose();
        for j in 0..n {
            let k = &mut keys[j * stride..(j + 1) * stride];
            k[..syn_words].copy_from_slice(ct.row_words(j));
            k[syn_words..].copy_from_slice(lt.row_words(j));
        }
        Ok(Self {
            n,
            check: check.clone(),
            logicals,
            syn_words,
            stride,
            keys,
        })
    }

    /// Number of independent nontrivial classes.
    pub fn dimension(&self) -> usize {
        self.logicals.rows()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Representatives of the nontrivial classes, one per row.
    pub fn logicals(&self) -> &BitMatrix {
        &self.logicals
    }

    #[inline]
    fn key(&self, j: usize) -> &[u64] {
        &self.keys[j * self.stride..(j + 1) * self.stride]
    }

    /// True iff `v` is a cycle of `A` outside the row space of `B`.
    pub fn is_nontrivial(&self, v: &BitVec) -> bool {
        self.check.mul_vec(v).map(|s| s.is_zero()).unwrap_or(false)
            && (0..self.logicals.rows()).any(|i| dot(self.logicals.row_words(i), v.words()))
    }

    /// Exhaustive search for the lightest nontrivial cycle of weight at most `w_max`.
    ///
    /// Weights are tried in increasing order and supports in lexicographic
    /// order, so the witness is the lexicographically smallest support of
    /// minimum weight. With nothing found, `lower = w_max + 1`.
    pub fn min_weight_exhaustive(&self, w_max: usize, budget: &Budget) -> Result<DistanceBound> {
        if w_max == 0 {
            return Err(Error::InvalidArgument("w_max must be at least 1".into()));
        }
        budget.check(ball_size(self.n, w_max), budget.enumeration)?;
        if self.dimension() == 0 {
            return Ok(DistanceBound {
                lower: w_max + 1,
                upper: None,
                witness: None,
            });
        }
        let mut by_syndrome: FxHashMap<&[u64], Vec<usize>> = FxHashMap::default();
        for j in 0..self.n {
            by_syndrome.entry(&self.key(j)[..self.syn_words]).or_default().push(j);
        }
        for w in 1..=w_max.min(self.n) {
            let hit = if w == 1 {
                (0..self.n)
                    .find(|&j| self.is_nontrivial_key(self.key(j)))
                    .map(|j| vec![j])
            } else {
                par::first_in_order(self.n + 1 - w, |first| self.first_hit_with_prefix_start(first, w, &by_syndrome))
            };
            if let Some(support) = hit {
                return Ok(DistanceBound {
                    lower: w,
                    upper: Some(w),
                    witness: Some(support),
                });
            }
        }
        Ok(DistanceBound {
            lower: w_max + 1,
            upper: None,
            witness: None,
        })
    }

    #[inline]
    fn is_nontrivial_key(&self, key: &[u64]) -> bool {
        key[..self.syn_words].iter().all(|&x| x == 0) && key[self.syn_words..].iter().any(|&x| x != 0)
    }

    fn first_hit_with_prefix_start(
        &self,
        first: usize,
        w: usize,
        by_syndrome: &FxHashMap<&[u64], Vec<usize>>,
    ) -> Option<Vec<usize>> {
        let mut found = None;
        let sw = self.syn_words;
        let _ = self.for_each_subset_from(first, w - 1, self.n - 2, &mut |support, acc| {
            let last = *support.last().expect("nonempty");
            if let Some(cols) = by_syndrome.get(&acc[..sw]) {
                for &c in cols {
                    if c <= last {
                        continue;
                    }
                    let lk = &self.key(c)[sw..];
                    if acc[sw..].iter().zip(lk).any(|(a, b)| a != b) {
                        let mut s = support.to_vec();
                        s.push(c);
                        found = Some(s);
                        return ControlFlow::Break(());
                    }
                }
            }
            ControlFlow::Continue(())
        });
        found
    }

    /// Visits every subset of `0..limit` of the given size whose smallest
    /// element is `first`, in lexicographic order, with its packed key.
    fn for_each_subset_from(
        &self,
        first: usize,
        size: usize,
        limit: usize,
        f: &mut dyn FnMut(&[usize], &[u64]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        debug_assert!(size >= 1);
        let s = self.stride;
        let mut support = Vec::with_capacity(size);
        let mut acc = vec![0u64; s * (size + 1)];
        support.push(first);
        acc[s..2 * s].copy_from_slice(self.key(first));
        self.extend(&mut support, &mut acc, size, limit, f)
    }

    fn extend(
        &self,
        support: &mut Vec<usize>,
        acc: &mut [u64],
        size: usize,
        limit: usize,
        f: &mut dyn FnMut(&[usize], &[u64]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let s = self.stride;
        let depth = support.len();
        if depth == size {
            return f(support, &acc[depth * s..(depth + 1) * s]);
        }
        let last = *support.last().expect("nonempty");
        let remaining = size - depth;
        if last + remaining > limit {
            return ControlFlow::Continue(());
        }
        for j in last + 1..=limit + 1 - remaining {
            let (head, tail) = acc.split_at_mut((depth + 1) * s);
            let dst = &mut tail[..s];
            dst.copy_from_slice(&head[depth * s..]);
            xor_into(dst, self.key(j));
            support.push(j);
            let flow = self.extend(support, acc, size, limit, f);
            support.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }

    /// Randomized information-set search for light nontrivial cycles.
    ///
    /// `streams` independent generators are derived from `seed`; stream `w`
    /// runs iterations `w, w + streams, ...`. Each iteration eliminates a
    /// basis of `ker A` with pivot columns in random order and inspects every
    /// reduced row and every pair of rows. Returns an upper bound only
    /// (`lower = 1`). The result depends on `(seed, streams)` but not on the
    /// thread count.
    pub fn min_weight_randomized(&self, opts: &RandomizedOptions) -> DistanceBound {
        let none = DistanceBound {
            lower: 1,
            upper: None,
            witness: None,
        };
        if self.dimension() == 0 || opts.iterations == 0 {
            return none;
        }
        let kernel = self.check.kernel_basis();
        let streams = opts.streams.max(1);
        let results = par::range_collect(streams, |w| {
            let count = opts.iterations / streams + usize::from(w < opts.iterations % streams);
            self.isd_stream(&kernel, opts.seed, w as u64, count, opts.stop_at)
        });
        match results.into_iter().flatten().min() {
            Some((weight, support)) => DistanceBound {
                lower: 1,
                upper: Some(weight),
                witness: Some(support),
            },
            None => none,
        }
    }

    fn isd_stream(
        &self,
        kernel: &BitMatrix,
        seed: u64,
        stream: u64,
        iterations: usize,
        stop_at: Option<usize>,
    ) -> Option<(usize, Vec<usize>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut order: Vec<usize> = (0..self.n).collect();
        let mut best: Option<(usize, Vec<usize>)> = None;
        let stride = words_for(self.n);
        let mut scratch = vec![0u64; stride];
        for _ in 0..iterations {
            order.shuffle(&mut rng);
            let reduced = kernel.rref_with_order(&order);
            let m = reduced.matrix();
            let rows = m.rows();
            let weights: Vec<usize> = (0..rows).map(|i| m.row_weight(i)).collect();
            let consider = |words: &[u64], weight: usize, best: &mut Option<(usize, Vec<usize>)>| {
                let bound = best.as_ref().map_or(usize::MAX, |b| b.0);
                if weight > bound || weight == 0 {
                    return;
                }
                if !(0..self.logicals.rows()).any(|i| dot(self.logicals.row_words(i), words)) {
                    return;
                }
                let support: Vec<usize> = ones(words).collect();
                let cand = (weight, support);
                if best.as_ref().map_or(true, |b| cand < *b) {
                    *best = Some(cand);
                }
            };
            for i in 0..rows {
                consider(m.row_words(i), weights[i], &mut best);
            }
            for i in 0..rows {
                let a = m.row_words(i);
                for j in i + 1..rows {
                    let bound = best.as_ref().map_or(usize::MAX, |b| b.0);
                    if weights[i].abs_diff(weights[j]) > bound {
                        continue;
                    }
                    let b = m.row_words(j);
                    let w: usize = a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones() as usize).sum();
                    if w <= bound {
                        scratch.copy_from_slice(a);
                        xor_into(&mut scratch, b);
                        consider(&scratch, w, &mut best);
                    }
                }
            }
            if let (Some(t), Some(b)) = (stop_at, &best) {
                if b.0 <= t {
                    break;
                }
            }
        }
        best
    }

    /// Exact confinement profile for weights `1..=w_max` by full enumeration.
    ///
    /// An error is irreducible when no lighter vector shares its coset key,
    /// so scanning weights in increasing order and remembering every key seen
    /// so far classifies each error exactly. Entry `w` is the least nonzero
    /// syndrome weight among irreducible errors of weight `w`.
    pub fn confinement_exact(&self, w_max: usize, budget: &Budget) -> Result<Vec<Option<usize>>> {
        if w_max == 0 {
            return Err(Error::InvalidArgument("w_max must be at least 1".into()));
        }
        let w_max = w_max.min(self.n);
        budget.check(ball_size(self.n, w_max), budget.enumeration)?;
        budget.check(ball_size(self.n, w_max - 1), budget.keys)?;
        let sw = self.syn_words;
        let mut seen: FxHashSet<Box<[u64]>> = FxHashSet::default();
        seen.insert(vec![0u64; self.stride].into_boxed_slice());
        let mut profile = Vec::with_capacity(w_max);
        for w in 1..=w_max {
            let keep = w < w_max;
            let seen_ref = &seen;
            let per_first = par::range_collect(self.n + 1 - w, |first| {
                let mut best: Option<usize> = None;
                let mut fresh: Vec<Box<[u64]>> = Vec::new();
                let _ = self.for_each_subset_from(first, w, self.n - 1, &mut |_, key| {
                    if !seen_ref.contains(key) {
                        let s = popcount(&key[..sw]);
                        if s > 0 && best.map_or(true, |b| s < b) {
                            best = Some(s);
                        }
                        if keep {
                            fresh.push(key.into());
                        }
                    }
                    ControlFlow::Continue(())
                });
                (best, fresh)
            });
            let mut level_best: Option<usize> = None;
            let mut fresh_all = Vec::new();
            for (b, fresh) in per_first {
                if let Some(b) = b {
                    level_best = Some(level_best.map_or(b, |x: usize| x.min(b)));
                }
                fresh_all.extend(fresh);
            }
            seen.extend(fresh_all);
            profile.push(level_best);
        }
        Ok(profile)
    }

    /// Connected-cluster confinement.
    ///
    /// Only errors whose support is connected in the Tanner graph of `A`
    /// (qubits adjacent when they share a check) are enumerated, growing
    /// clusters from each root in `roots`. `irreducible` decides whether an
    /// error of the given support and key is irreducible. Entries are upper
    /// bounds whenever the irreducibility test is exact.
    fn confinement_clusters(
        &self,
        w_max: usize,
        roots: &[usize],
        per_root_limit: usize,
        irreducible: &(dyn Fn(&[usize], &[u64]) -> bool + Sync),
    ) -> (Vec<Option<usize>>, bool) {
        let adjacency = self.tanner_adjacency();
        let sw = self.syn_words;
        let per_root = par::map_collect(roots, |&r| {
            let mut best = vec![None::<usize>; w_max];
            let mut visited = 0usize;
            let mut truncated = false;
            let mut visit = |support: &[usize], key: &[u64]| -> ControlFlow<()> {
                visited += 1;
                if visited > per_root_limit {
                    truncated = true;
                    return ControlFlow::Break(());
                }
                let s = popcount(&key[..sw]);
                let slot = &mut best[support.len() - 1];
                if s > 0 && slot.map_or(true, |b| s < b) && irreducible(support, key) {
                    *slot = Some(s);
                }
                ControlFlow::Continue(())
            };
            self.connected_from_root(r, w_max, &adjacency, &mut visit);
            (best, truncated)
        });
        let mut out = vec![None::<usize>; w_max];
        let mut truncated = false;
        for (best, t) in per_root {
            truncated |= t;
            for (o, b) in out.iter_mut().zip(best) {
                if let Some(b) = b {
                    *o = Some(o.map_or(b, |x| x.min(b)));
                }
            }
        }
        (out, truncated)
    }

    fn tanner_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj: Vec<FxHashSet<usize>> = vec![FxHashSet::default(); self.n];
        for i in 0..self.check.rows() {
            let row: Vec<usize> = ones(self.check.row_words(i)).collect();
            for &a in &row {
                for &b in &row {
                    if a != b {
                        adj[a].insert(b);
                    }
                }
            }
        }
        adj.into_iter()
            .map(|s| {
                let mut v: Vec<usize> = s.into_iter().collect();
                v.sort_unstable();
                v
            })
            .collect()
    }

    /// Enumerates each connected vertex set of size `<= w_max` containing
    /// `root` exactly once (ESU-style growth with `root` ranked first).
    fn connected_from_root(
        &self,
        root: usize,
        w_max: usize,
        adjacency: &[Vec<usize>],
        visit: &mut dyn FnMut(&[usize], &[u64]) -> ControlFlow<()>,
    ) {
        let mut sub = vec![root];
        let mut key = self.key(root).to_vec();
        let ext: Vec<usize> = adjacency[root].iter().copied().filter(|&u| u != root).collect();
        let mut in_closed = vec![false; self.n];
        in_closed[root] = true;
        for &u in &adjacency[root] {
            in_closed[u] = true;
        }
        let _ = self.esu(&mut sub, &mut key, ext, root, w_max, adjacency, &mut in_closed, visit);
    }

    #[allow(clippy::too_many_arguments)]
    fn esu(
        &self,
        sub: &mut Vec<usize>,
        key: &mut Vec<u64>,
        mut ext: Vec<usize>,
        root: usize,
        w_max: usize,
        adjacency: &[Vec<usize>],
        closed: &mut Vec<bool>,
        visit: &mut dyn FnMut(&[usize], &[u64]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let mut sorted = sub.clone();
        sorted.sort_unstable();
        visit(&sorted, key)?;
        if sub.len() == w_max {
            return ControlFlow::Continue(());
        }
        while let Some(w) = ext.pop() {
            // exclusive neighbours of w: not in sub and not adjacent to sub
            let added: Vec<usize> = adjacency[w].iter().copied().filter(|&u| u != root && !closed[u]).collect();
            for &u in &added {
                closed[u] = true;
            }
            let mut next = ext.clone();
            next.extend_from_slice(&added);
            sub.push(w);
            xor_into(key, self.key(w));
            let flow = self.esu(sub, key, next, root, w_max, adjacency, closed, visit);
            xor_into(key, self.key(w));
            sub.pop();
            for &u in &added {
                closed[u] = false;
            }
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Options for [`CycleSpace::min_weight_randomized`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomizedOptions {
    pub iterations: usize,
    pub seed: u64,
    /// Number of independent random streams.
    pub streams: usize,
    /// Stop a stream once it has found something this light.
    pub stop_at: Option<usize>,
}

impl RandomizedOptions {
    pub fn new(iterations: usize, seed: u64) -> Self {
        Self {
            iterations,
            seed,
            streams: 1,
            stop_at: None,
        }
    }
}

/// `n - rank(P_X) - rank(P_Z)`.
pub fn logical_count(code: &MCssCode) -> usize {
    code.n - code.p_x.rank() - code.p_z.rank()
}

/// Cycle space whose nontrivial elements are the logical operators of the given type.
pub fn logical_space(code: &MCssCode, kind: PauliType) -> Result<CycleSpace> {
    match kind {
        PauliType::Z => CycleSpace::new(&code.p_x, &code.p_z),
        PauliType::X => CycleSpace::new(&code.p_z, &code.p_x),
    }
}

/// Cycle space on the syndrome space of the given check type: cycles of the
/// metacheck that are not syndromes of any error.
pub fn syndrome_space(code: &MCssCode, kind: PauliType) -> Result<CycleSpace> {
    let (m, p, name) = match kind {
        PauliType::X => (&code.m_x, &code.p_x, "X"),
        PauliType::Z => (&code.m_z, &code.p_z, "Z"),
    };
    let m = m.as_ref().ok_or(Error::NoMetacheck(name))?;
    CycleSpace::new(m, &p.transpose())
}

pub fn distance_exhaustive(code: &MCssCode, kind: PauliType, w_max: usize, budget: &Budget) -> Result<DistanceBound> {
    logical_space(code, kind)?.min_weight_exhaustive(w_max, budget)
}

pub fn distance_randomized(code: &MCssCode, kind: PauliType, opts: &RandomizedOptions) -> Result<DistanceBound> {
    Ok(logical_space(code, kind)?.min_weight_randomized(opts))
}

/// Exhaustive search up to `w_max`, then randomized search for an upper bound
/// if nothing was found.
pub fn combined_search(space: &CycleSpace, w_max: usize, opts: &RandomizedOptions, budget: &Budget) -> Result<DistanceBound> {
    let exhaustive = if w_max > 0 {
        space.min_weight_exhaustive(w_max, budget)?
    } else {
        DistanceBound {
            lower: 1,
            upper: None,
            witness: None,
        }
    };
    if exhaustive.upper.is_some() || opts.iterations == 0 {
        return Ok(exhaustive);
    }
    Ok(exhaustive.merge(&space.min_weight_randomized(opts)))
}

pub fn single_shot_distance(
    code: &MCssCode,
    kind: PauliType,
    w_max: usize,
    opts: &RandomizedOptions,
    budget: &Budget,
) -> Result<DistanceBound> {
    combined_search(&syndrome_space(code, kind)?, w_max, opts, budget)
}

/// How a confinement entry was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    /// Minimum over all irreducible errors.
    Exact,
    /// Minimum over a subset of irreducible errors.
    UpperBound,
    /// Irreducibility was only checked locally.
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub weight: usize,
    /// `None` when no irreducible error of this weight has a nonzero syndrome.
    pub min_syndrome_weight: Option<usize>,
    pub kind: EntryKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfinementMode {
    Exact,
    Cluster,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfinementProfile {
    pub entries: Vec<ProfileEntry>,
    /// Set when exact mode was requested but the budget forced cluster mode.
    pub fell_back: bool,
    /// Set when cluster growth hit its per-root cap.
    pub truncated: bool,
}

impl ConfinementProfile {
    pub fn values(&self) -> Vec<Option<usize>> {
        self.entries.iter().map(|e| e.min_syndrome_weight).collect()
    }

    pub fn min(&self) -> Option<usize> {
        self.entries.iter().filter_map(|e| e.min_syndrome_weight).min()
    }
}

/// Cluster enumeration cap per root qubit.
pub const DEFAULT_CLUSTER_LIMIT: usize = 5_000_000;

/// Confinement profile of errors of the given type against the opposite checks.
///
/// Z errors are measured by `P_X` and reduced by Z stabilizers; X errors by
/// `P_Z` and X stabilizers.
pub fn confinement_profile(
    code: &MCssCode,
    kind: PauliType,
    w_max: usize,
    mode: ConfinementMode,
    budget: &Budget,
) -> Result<ConfinementProfile> {
    if w_max == 0 {
        return Err(Error::InvalidArgument("w_max must be at least 1".into()));
    }
    let space = logical_space(code, kind)?;
    let w_max = w_max.min(code.n);
    let exact_ok = budget.check(ball_size(code.n, w_max), budget.enumeration).is_ok()
        && budget.check(ball_size(code.n, w_max - 1), budget.keys).is_ok();
    if mode == ConfinementMode::Exact && exact_ok {
        let values = space.confinement_exact(w_max, budget)?;
        return Ok(ConfinementProfile {
            entries: values
                .into_iter()
                .enumerate()
                .map(|(i, v)| ProfileEntry {
                    weight: i + 1,
                    min_syndrome_weight: v,
                    kind: EntryKind::Exact,
                })
                .collect(),
            fell_back: false,
            truncated: false,
        });
    }

    // every generator-built code is invariant under the group acting on all
    // blocks at once, so one root per block reaches every cluster up to translation
    let block = code.spec.order();
    let roots: Vec<usize> = (0..code.n).step_by(block.max(1)).collect();
    let exact_keys = budget.check(ball_size(code.n, w_max - 1), budget.keys).is_ok()
        && budget.check(ball_size(code.n, w_max - 1), budget.enumeration).is_ok();
    let (values, truncated, kind_label) = if exact_keys {
        let lower = space.lower_weight_keys(w_max - 1);
        // irreducible iff no lighter vector shares the key
        let test = |support: &[usize], key: &[u64]| lower.get(key).map_or(true, |&m| m >= support.len());
        let (v, t) = space.confinement_clusters(w_max, &roots, DEFAULT_CLUSTER_LIMIT, &|s, k| test(s, k));
        (v, t, EntryKind::UpperBound)
    } else {
        let stabilizers = match kind {
            PauliType::Z => &code.p_z,
            PauliType::X => &code.p_x,
        };
        let gens: Vec<Vec<u64>> = (0..stabilizers.rows()).map(|i| stabilizers.row_words(i).to_vec()).collect();
        let n = code.n;
        let test = move |support: &[usize], _key: &[u64]| locally_irreducible(n, support, &gens);
        let (v, t) = space.confinement_clusters(w_max, &roots, DEFAULT_CLUSTER_LIMIT, &test);
        (v, t, EntryKind::Heuristic)
    };
    Ok(ConfinementProfile {
        entries: values
            .into_iter()
            .enumerate()
            .map(|(i, v)| ProfileEntry {
                weight: i + 1,
                min_syndrome_weight: v,
                kind: kind_label,
            })
            .collect(),
        fell_back: mode == ConfinementMode::Exact,
        truncated,
    })
}

impl CycleSpace {
    /// Map from coset key to the least weight at which it occurs, for all
    /// vectors of weight `<= w`.
    fn lower_weight_keys(&self, w: usize) -> FxHashMap<Box<[u64]>, usize> {
        let mut seen: FxHashMap<Box<[u64]>, usize> = FxHashMap::default();
        seen.insert(vec![0u64; self.stride].into_boxed_slice(), 0);
        for level in 1..=w.min(self.n) {
            let seen_ref = &seen;
            let fresh = par::range_collect(self.n + 1 - level, |first| {
                let mut out: Vec<Box<[u64]>> = Vec::new();
                let _ = self.for_each_subset_from(first, level, self.n - 1, &mut |_, key| {
                    if !seen_ref.contains_key(key) {
                        out.push(key.into());
                    }
                    ControlFlow::Continue(())
                });
                out
            });
            for k in fresh.into_iter().flatten() {
                seen.entry(k).or_insert(level);
            }
        }
        seen
    }
}

/// Greedy local test: reducible if adding one stabilizer generator lowers the weight.
fn locally_irreducible(n: usize, support: &[usize], gens: &[Vec<u64>]) -> bool {
    let e = BitVec::from_support(n, support);
    gens.iter().all(|g| {
        let overlap: usize = g.iter().zip(e.words()).map(|(a, b)| (a & b).count_ones() as usize).sum();
        // |e + g| = |e| + |g| - 2 overlap
        popcount(g) >= 2 * overlap
    })
}

/// Median and maximum row weights of `P_X` and `P_Z`. An even number of rows
/// takes the mean of the two middle weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckWeights {
    pub w_med_x: f64,
    pub w_med_z: f64,
    pub w_max_x: usize,
    pub w_max_z: usize,
}

/// Median and maximum of a list of weights; `(0.0, 0)` when empty.
pub fn weight_stats(mut w: Vec<usize>) -> (f64, usize) {
    w.sort_unstable();
    match w.len() {
        0 => (0.0, 0),
        n => ((w[(n - 1) / 2] + w[n / 2]) as f64 / 2.0, w[n - 1]),
    }
}

pub fn check_weight_stats(code: &MCssCode) -> CheckWeights {
    let (w_med_x, w_max_x) = weight_stats(code.p_x.row_weights());
    let (w_med_z, w_max_z) = weight_stats(code.p_z.row_weights());
    CheckWeights {
        w_med_x,
        w_med_z,
        w_max_x,
        w_max_z,
    }
}

/// Largest `w <= w` whose enumeration fits the budget.
pub fn affordable_weight(n: usize, w: usize, budget: &Budget) -> usize {
    (0..=w).rev().find(|&v| ball_size(n, v) <= budget.enumeration).unwrap_or(0)
}

/// What [`analyze`] computes and with which effort.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    /// Exhaustive distance search up to this weight.
    pub w_exhaustive: usize,
    /// Randomized iterations when the exhaustive search finds nothing.
    pub iterations: usize,
    pub seed: u64,
    /// Random streams for the randomized search; also the thread cap.
    pub workers: usize,
    /// Confinement profiles up to this weight, if any.
    pub confinement_w: Option<usize>,
    pub confinement_mode: ConfinementMode,
    /// Exhaustive single-shot search weight; `None` skips single-shot distances.
    pub single_shot_w: Option<usize>,
    pub budget: Budget,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            w_exhaustive: 4,
            iterations: 1000,
            seed: 0,
            workers: 1,
            confinement_w: None,
            confinement_mode: ConfinementMode::Exact,
            single_shot_w: None,
            budget: Budget::default(),
        }
    }
}

/// Computed parameters of a code.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeReport {
    pub n: usize,
    pub k: usize,
    pub d_x: DistanceBound,
    pub d_z: DistanceBound,
    pub d_ss_x: Option<DistanceBound>,
    pub d_ss_z: Option<DistanceBound>,
    pub confinement_x: Option<ConfinementProfile>,
    pub confinement_z: Option<ConfinementProfile>,
    pub d_s: Option<usize>,
    pub w_med_x: f64,
    pub w_med_z: f64,
    pub w_max_x: usize,
    pub w_max_z: usize,
    pub seed: u64,
    pub workers: usize,
    /// Budget reductions and other caveats, in the order they occurred.
    pub notes: Vec<String>,
}

impl CodeReport {
    /// Best known bounds on `min(d_x, d_z)`.
    pub fn distance(&self) -> DistanceBound {
        let lower = self.d_x.lower.min(self.d_z.lower);
        let (upper, witness) = match (self.d_x.upper, self.d_z.upper) {
            (Some(a), Some(b)) if b < a => (Some(b), self.d_z.witness.clone()),
            (Some(a), _) => (Some(a), self.d_x.witness.clone()),
            (None, b) => (b, self.d_z.witness.clone()),
        };
        DistanceBound { lower, upper, witness }
    }
}

fn search_with_budget(space: &CycleSpace, w: usize, opts: &AnalysisOptions, what: &str, notes: &mut Vec<String>) -> Result<DistanceBound> {
    let w_eff = affordable_weight(space.len(), w, &opts.budget);
    if w_eff < w {
        notes.push(format!("{what}: exhaustive weight reduced from {w} to {w_eff} by budget"));
    }
    let r = RandomizedOptions {
        iterations: opts.iterations,
        seed: opts.seed,
        streams: opts.workers.max(1),
        stop_at: None,
    };
    let mut bound = combined_search(space, w_eff, &r, &opts.budget)?;
    // randomized hit at the certified floor closes the gap
    if bound.upper.is_some_and(|u| u < bound.lower) {
        bound.lower = bound.upper.unwrap_or(bound.lower);
    }
    Ok(bound)
}

/// Computes a full [`CodeReport`].
pub fn analyze(code: &MCssCode, opts: &AnalysisOptions) -> Result<CodeReport> {
    par::with_workers(opts.workers, || analyze_inner(code, opts))
}

fn analyze_inner(code: &MCssCode, opts: &AnalysisOptions) -> Result<CodeReport> {
    let mut notes = Vec::new();
    let k = logical_count(code);
    let d_x = search_with_budget(&logical_space(code, PauliType::X)?, opts.w_exhaustive, opts, "d_x", &mut notes)?;
    let d_z = search_with_budget(&logical_space(code, PauliType::Z)?, opts.w_exhaustive, opts, "d_z", &mut notes)?;
    let mut single_shot = |kind: PauliType, name: &str| -> Result<Option<DistanceBound>> {
        let Some(w) = opts.single_shot_w else { return Ok(None) };
        match syndrome_space(code, kind) {
            Ok(space) => search_with_budget(&space, w, opts, name, &mut notes).map(Some),
            Err(Error::NoMetacheck(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let d_ss_x = single_shot(PauliType::X, "d_ss_x")?;
    let d_ss_z = single_shot(PauliType::Z, "d_ss_z")?;
    let (confinement_x, confinement_z) = match opts.confinement_w {
        Some(w) => {
            let cx = confinement_profile(code, PauliType::X, w, opts.confinement_mode, &opts.budget)?;
            let cz = confinement_profile(code, PauliType::Z, w, opts.confinement_mode, &opts.budget)?;
            for (p, name) in [(&cx, "confinement_x"), (&cz, "confinement_z")] {
                if p.fell_back {
                    notes.push(format!("{name}: exact mode over budget, used cluster mode"));
                }
                if p.truncated {
                    notes.push(format!("{name}: cluster growth truncated"));
                }
            }
            (Some(cx), Some(cz))
        }
        None => (None, None),
    };
    let d_s = [&confinement_x, &confinement_z].into_iter().flatten().filter_map(|p| p.min()).min();
    let cw = check_weight_stats(code);
    Ok(CodeReport {
        n: code.n,
        k,
        d_x,
        d_z,
        d_ss_x,
        d_ss_z,
        confinement_x,
        confinement_z,
        d_s,
        w_med_x: cw.w_med_x,
        w_med_z: cw.w_med_z,
        w_max_x: cw.w_max_x,
        w_max_z: cw.w_max_z,
        seed: opts.seed,
        workers: opts.workers,
        notes,
    })
}
