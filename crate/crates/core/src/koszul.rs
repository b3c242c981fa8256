//! Koszul complexes on `t` generators and the metacheck CSS codes they carry.
//!
//! Orientation: `d_k` maps degree-`k` chains to degree-`k-1` chains and acts
//! on column vectors, so it has `C(t,k-1)` block rows and `C(t,k)` block
//! columns. Basis elements of degree `k` are the `k`-subsets of the generator
//! indices in lexicographic order. Over GF(2) every sign in the differential
//! vanishes: block `(T, U)` of `d_k` holds generator `j` exactly when
//! `T = U \ {j}`.

use serde::{Deserialize, Serialize};

use crate::circulant::{first_non_commuting, poly_to_circulant};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::par;
use crate::ring::{GroupSpec, RingElem};

/// Binomial coefficient, exact for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `k`-subsets of `0..t` as bitmasks, in lexicographic order of their sorted elements.
pub fn subsets(t: usize, k: usize) -> Vec<u32> {
    fn rec(start: usize, t: usize, k: usize, mask: u32, out: &mut Vec<u32>) {
        if k == 0 {
            out.push(mask);
            return;
        }
        for i in start..=t - k {
            rec(i + 1, t, k - 1, mask | (1 << i), out);
        }
    }
    let mut out = Vec::with_capacity(binomial(t, k));
    if k <= t {
        rec(0, t, k, 0, &mut out);
    }
    out
}

/// One nonzero block of a symbolic boundary map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymbolicEntry {
    pub row: usize,
    pub col: usize,
    /// 0-based generator index.
    pub generator: usize,
}

/// Incidence pattern of one boundary map `d_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicMap {
    pub degree: usize,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<SymbolicEntry>,
}

impl SymbolicMap {
    /// Generator at block `(row, col)`, if any.
    pub fn get(&self, row: usize, col: usize) -> Option<usize> {
        self.entries
            .iter()
            .find(|e| e.row == row && e.col == col)
            .map(|e| e.generator)
    }

    /// Dense grid of 0-based generator indices, `None` for zero blocks.
    pub fn grid(&self) -> Vec<Vec<Option<usize>>> {
        let mut g = vec![vec![None; self.cols]; self.rows];
        for e in &self.entries {
            g[e.row][e.col] = Some(e.generator);
        }
        g
    }
}

/// The Koszul differentials on `t` formal generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicBoundary {
    t: usize,
    maps: Vec<SymbolicMap>,
}

impl SymbolicBoundary {
    pub fn t(&self) -> usize {
        self.t
    }

    /// `maps()[k-1]` is `d_k`.
    pub fn maps(&self) -> &[SymbolicMap] {
        &self.maps
    }

    pub fn map(&self, k: usize) -> &SymbolicMap {
        &self.maps[k - 1]
    }
}

pub fn symbolic_boundaries(t: usize) -> Result<SymbolicBoundary> {
    if t == 0 {
        return Err(Error::NoGenerators);
    }
    if t > 20 {
        return Err(Error::InvalidArgument(format!("t = {t} is too large")));
    }
    let mut maps = Vec::with_capacity(t);
    for k in 1..=t {
        let lower = subsets(t, k - 1);
        let upper = subsets(t, k);
        let row_of = |mask: u32| lower.binary_search_by(|m| subset_order(*m, mask)).expect("subset present");
        let mut entries = Vec::new();
        for (col, &u) in upper.iter().enumerate() {
            for j in 0..t {
                if u & (1 << j) != 0 {
                    entries.push(SymbolicEntry {
                        row: row_of(u & !(1 << j)),
                        col,
                        generator: j,
                    });
                }
            }
        }
        entries.sort_by_key(|e| (e.row, e.col));
        maps.push(SymbolicMap {
            degree: k,
            rows: lower.len(),
            cols: upper.len(),
            entries,
        });
    }
    Ok(SymbolicBoundary { t, maps })
}

/// Lexicographic comparison of equal-size subsets given as bitmasks.
fn subset_order(a: u32, b: u32) -> std::cmp::Ordering {
    let diff = a ^ b;
    if diff == 0 {
        return std::cmp::Ordering::Equal;
    }
    // the smallest differing element decides: whoever has it comes first
    let low = diff.trailing_zeros();
    if a & (1 << low) != 0 {
        std::cmp::Ordering::Less
    } else {
        std::cmp::Ordering::Greater
    }
}

/// Substitutes circulant blocks for the formal generators.
///
/// Returns `[d_1, ..., d_t]` as GF(2) matrices of shape
/// `C(t,k-1) n x C(t,k) n`.
pub fn instantiate(sym: &SymbolicBoundary, gens: &[RingElem], spec: &GroupSpec) -> Result<Vec<BitMatrix>> {
    if gens.len() != sym.t {
        return Err(Error::GeneratorCount {
            expected: sym.t,
            found: gens.len(),
        });
    }
    let circulants: Vec<BitMatrix> = par::map_collect(gens, |g| poly_to_circulant(g, spec)).into_iter().collect::<Result<_>>()?;
    if let Some((i, j)) = first_non_commuting(&circulants)? {
        return Err(Error::NotCommuting(i, j));
    }
    let n = spec.order();
    Ok(sym
        .maps
        .iter()
        .map(|m| {
            let mut out = BitMatrix::zeros(m.rows * n, m.cols * n);
            for e in &m.entries {
                out.set_block(e.row * n, e.col * n, &circulants[e.generator]);
            }
            out
        })
        .collect())
}

/// True iff consecutive maps compose to zero (`d_k d_{k+1} = 0`).
pub fn verify_complex(maps: &[BitMatrix]) -> Result<bool> {
    Ok(first_nonzero_composition(maps)?.is_none())
}

fn first_nonzero_composition(maps: &[BitMatrix]) -> Result<Option<usize>> {
    for k in 1..maps.len() {
        if !maps[k - 1].mul(&maps[k])?.is_zero() {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Free-form origin information carried with a code.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub name: String,
    #[serde(default)]
    pub source: String,
}

/// A CSS code with optional metachecks.
///
/// Rows of `p_x` are X checks and rows of `p_z` are Z checks; both have one
/// column per qubit. `m_x` has one column per X check and `m_z` one column
/// per Z check.
#[derive(Clone, Debug)]
pub struct MCssCode {
    pub n: usize,
    pub p_x: BitMatrix,
    pub p_z: BitMatrix,
    pub m_x: Option<BitMatrix>,
    pub m_z: Option<BitMatrix>,
    pub spec: GroupSpec,
    pub generators: Vec<RingElem>,
    pub t: usize,
    pub q: usize,
    /// Dimensions of the chain spaces `K_0 .. K_t` over GF(2).
    pub chain_dims: Vec<usize>,
    pub provenance: Provenance,
}

/// Picks the code out of the boundary maps `[d_1, ..., d_t]`.
///
/// `P_X = d_q`, `P_Z = d_{q+1}^T`, `M_X = d_{q-1}` when `q >= 2` and
/// `M_Z = d_{q+2}^T` when `q <= t-2`.
pub fn extract_mcss(maps: &[BitMatrix], t: usize, q_override: Option<usize>) -> Result<ExtractedChecks> {
    if maps.len() != t {
        return Err(Error::GeneratorCount {
            expected: t,
            found: maps.len(),
        });
    }
    if t < 2 {
        return Err(Error::QOutOfRange { q: q_override.unwrap_or(t / 2), t, max: t.saturating_sub(1) });
    }
    let q = q_override.unwrap_or(t / 2);
    if q < 1 || q > t - 1 {
        return Err(Error::QOutOfRange { q, t, max: t - 1 });
    }
    if let Some(k) = first_nonzero_composition(maps)? {
        return Err(Error::NotAComplex(k, k + 1));
    }
    let d = |k: usize| &maps[k - 1];
    let p_x = d(q).clone();
    let p_z = d(q + 1).transpose();
    let m_x = (q >= 2).then(|| d(q - 1).clone());
    let m_z = (q + 2 <= t).then(|| d(q + 2).transpose());

    if !p_x.mul(&p_z.transpose())?.is_zero() {
        return Err(Error::Orthogonality("P_X P_Z^T != 0"));
    }
    if let Some(m) = &m_x {
        if !m.mul(&p_x)?.is_zero() {
            return Err(Error::Orthogonality("M_X P_X != 0"));
        }
    }
    if let Some(m) = &m_z {
        if !m.mul(&p_z)?.is_zero() {
            return Err(Error::Orthogonality("M_Z P_Z != 0"));
        }
    }
    Ok(ExtractedChecks { p_x, p_z, m_x, m_z, q })
}

/// Output of [`extract_mcss`].
#[derive(Clone, Debug)]
pub struct ExtractedChecks {
    pub p_x: BitMatrix,
    pub p_z: BitMatrix,
    pub m_x: Option<BitMatrix>,
    pub m_z: Option<BitMatrix>,
    pub q: usize,
}

impl MCssCode {
    /// Builds the code on `K_q` of the Koszul complex of `gens`.
    pub fn from_generators(spec: &GroupSpec, gens: &[RingElem], q_override: Option<usize>) -> Result<Self> {
        let t = gens.len();
        if t == 0 {
            return Err(Error::NoGenerators);
        }
        let sym = symbolic_boundaries(t)?;
        let maps = instantiate(&sym, gens, spec)?;
        let checks = extract_mcss(&maps, t, q_override)?;
        let n_group = spec.order();
        Ok(MCssCode {
            n: checks.p_x.cols(),
            p_x: checks.p_x,
            p_z: checks.p_z,
            m_x: checks.m_x,
            m_z: checks.m_z,
            spec: spec.clone(),
            generators: gens.to_vec(),
            t,
            q: checks.q,
            chain_dims: (0..=t).map(|k| binomial(t, k) * n_group).collect(),
            provenance: Provenance::default(),
        })
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }
}
