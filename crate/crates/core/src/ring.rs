//! The quotient ring `F2[x1..xD] / <x1^l1 - 1, ..., xD^lD - 1>`, i.e. the group
//! algebra of `Z_l1 x ... x Z_lD`, and a parser for polynomial expressions.
//!
//! A monomial is identified with its mixed-radix index: exponent `e_1` is the
//! most significant digit and `e_D` the least significant, so
//! `index = (((e_1) * l_2 + e_2) * l_3 + ...) * l_D + e_D`. The same numbering
//! addresses rows and columns of circulant matrices.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};

/// Upper bound on the group order `n` accepted by [`GroupSpec::new`].
pub const MAX_GROUP_ORDER: usize = 1 << 14;

/// A finite abelian group `Z_l1 x ... x Z_lD` given by its cyclic orders.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct GroupSpec {
    orders: Vec<usize>,
}

impl GroupSpec {
    pub fn new(orders: Vec<usize>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::InvalidGroup {
                orders,
                reason: "at least one cyclic factor is required".into(),
            });
        }
        if orders.contains(&0) {
            return Err(Error::InvalidGroup {
                orders,
                reason: "cyclic orders must be at least 1".into(),
            });
        }
        let n = orders
            .iter()
            .try_fold(1usize, |acc, &l| acc.checked_mul(l))
            .filter(|&n| n <= MAX_GROUP_ORDER);
        if n.is_none() {
            return Err(Error::InvalidGroup {
                orders,
                reason: format!("group order exceeds the size budget {MAX_GROUP_ORDER}"),
            });
        }
        Ok(Self { orders })
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    /// Number of cyclic factors `D`.
    pub fn dims(&self) -> usize {
        self.orders.len()
    }

    /// Group order `n = l1 * ... * lD`.
    pub fn order(&self) -> usize {
        self.orders.iter().product()
    }

    /// Mixed-radix index of an exponent vector. Exponents are reduced first.
    pub fn index_of(&self, exps: &[usize]) -> usize {
        assert_eq!(exps.len(), self.dims());
        exps.iter()
            .zip(&self.orders)
            .fold(0, |acc, (&e, &l)| acc * l + e % l)
    }

    pub fn exponents_of(&self, mut index: usize) -> Vec<usize> {
        let mut e = vec![0; self.dims()];
        for k in (0..self.dims()).rev() {
            e[k] = index % self.orders[k];
            index /= self.orders[k];
        }
        e
    }

    /// Index of the product of two monomials.
    pub fn mul_index(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for &l in self.orders.iter().rev() {
            out += ((a % l + b % l) % l) * place;
            a /= l;
            b /= l;
            place *= l;
        }
        out
    }

    /// Index of the inverse monomial.
    pub fn inv_index(&self, a: usize) -> usize {
        let e = self.exponents_of(a);
        let inv: Vec<usize> = e.iter().zip(&self.orders).map(|(&e, &l)| (l - e) % l).collect();
        self.index_of(&inv)
    }
}

impl TryFrom<Vec<usize>> for GroupSpec {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<GroupSpec> for Vec<usize> {
    fn from(g: GroupSpec) -> Self {
        g.orders
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.orders.iter().map(|l| l.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Variable names used when parsing and rendering polynomials.
///
/// Single-letter names only. Indexed names `x1..xD` are always accepted in
/// addition to the letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variables {
    names: Vec<char>,
}

impl Variables {
    /// `x` for one variable, `x, y` for two, `x, y, z` for three and
    /// `w, x, y, z` for four. More than four variables have no letters.
    pub fn default_for(dims: usize) -> Self {
        let names = match dims {
            1 => vec!['x'],
            2 => vec!['x', 'y'],
            3 => vec!['x', 'y', 'z'],
            4 => vec!['w', 'x', 'y', 'z'],
            _ => Vec::new(),
        };
        Self { names }
    }

    pub fn new(names: &[String], dims: usize) -> Result<Self> {
        if names.len() != dims {
            return Err(Error::InvalidArgument(format!(
                "{} variable names given for {dims} cyclic factors",
                names.len()
            )));
        }
        let mut out = Vec::with_capacity(dims);
        for n in names {
            let mut chars = n.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) if c.is_ascii_alphabetic() => {
                    if out.contains(&c) {
                        return Err(Error::InvalidArgument(format!("duplicate variable name {c:?}")));
                    }
                    out.push(c);
                }
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "variable names must be single ASCII letters, got {n:?}"
                    )))
                }
            }
        }
        Ok(Self { names: out })
    }

    fn lookup(&self, c: char) -> Option<usize> {
        self.names.iter().position(|&n| n == c)
    }

    /// Display name of variable `i` (0-based): its letter, or `x{i+1}`.
    pub fn name(&self, i: usize) -> String {
        self.render(i)
    }

    fn render(&self, i: usize) -> String {
        match self.names.get(i) {
            Some(c) => c.to_string(),
            None => format!("x{}", i + 1),
        }
    }
}

/// An element of the group algebra, stored as its sorted set of monomial indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingElem {
    spec: GroupSpec,
    terms: Vec<usize>,
}

impl RingElem {
    pub fn zero(spec: &GroupSpec) -> Self {
        Self {
            spec: spec.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(spec: &GroupSpec) -> Self {
        Self {
            spec: spec.clone(),
            terms: vec![0],
        }
    }

    /// The generator `x_i` (0-based `i`).
    pub fn variable(spec: &GroupSpec, i: usize) -> Self {
        let mut e = vec![0; spec.dims()];
        e[i] = 1;
        Self::monomial(spec, &e)
    }

    pub fn monomial(spec: &GroupSpec, exps: &[usize]) -> Self {
        Self {
            spec: spec.clone(),
            terms: vec![spec.index_of(exps)],
        }
    }

    /// Sum of the given monomial indices; repeated indices cancel in pairs.
    pub fn from_indices(spec: &GroupSpec, indices: impl IntoIterator<Item = usize>) -> Self {
        let n = spec.order();
        let mut mark = vec![false; n];
        for i in indices {
            assert!(i < n, "monomial index {i} out of range for group order {n}");
            mark[i] ^= true;
        }
        Self {
            spec: spec.clone(),
            terms: mark.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i).collect(),
        }
    }

    pub fn from_exponents(spec: &GroupSpec, exps: &[Vec<usize>]) -> Self {
        Self::from_indices(spec, exps.iter().map(|e| spec.index_of(e)))
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// Monomial indices in ascending order.
    pub fn terms(&self) -> &[usize] {
        &self.terms
    }

    pub fn exponent_vectors(&self) -> Vec<Vec<usize>> {
        self.terms.iter().map(|&t| self.spec.exponents_of(t)).collect()
    }

    /// Number of monomials.
    pub fn weight(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_spec(&self, other: &RingElem) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch {
                left: self.spec.orders.clone(),
                right: other.spec.orders.clone(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &RingElem) -> Result<RingElem> {
        self.check_spec(other)?;
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Ok(RingElem {
            spec: self.spec.clone(),
            terms: out,
        })
    }

    pub fn mul(&self, other: &RingElem) -> Result<RingElem> {
        self.check_spec(other)?;
        let products = self
            .terms
            .iter()
            .flat_map(|&a| other.terms.iter().map(move |&b| (a, b)))
            .map(|(a, b)| self.spec.mul_index(a, b));
        Ok(RingElem::from_indices(&self.spec, products))
    }

    pub fn pow(&self, mut e: u64) -> RingElem {
        let mut base = self.clone();
        let mut acc = RingElem::one(&self.spec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same spec");
            }
            base = base.mul(&base).expect("same spec");
            e >>= 1;
        }
        acc
    }

    /// The image under `g -> g^-1`, which corresponds to transposing circulants.
    pub fn antipode(&self) -> RingElem {
        RingElem::from_indices(&self.spec, self.terms.iter().map(|&t| self.spec.inv_index(t)))
    }

    /// Canonical text form, parseable by [`parse_poly_with`] under the same names.
    pub fn render(&self, vars: &Variables) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|&t| {
                let e = self.spec.exponents_of(t);
                let factors: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| match k {
                        1 => vars.render(i),
                        _ => format!("{}^{k}", vars.render(i)),
                    })
                    .collect();
                if factors.is_empty() {
                    "1".to_string()
                } else {
                    factors.join("*")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&Variables::default_for(self.spec.dims())))
    }
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingElem({} over {})", self, self.spec)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown variable {name:?} at byte {offset}")]
    UnknownVariable { offset: usize, name: String },
    #[error("variable index {index} at byte {offset} exceeds the {dims} available variables")]
    VariableIndex { offset: usize, index: usize, dims: usize },
    #[error("coefficient {value} at byte {offset} is not 0 or 1")]
    Coefficient { offset: usize, value: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownVariable { offset, .. }
            | ParseError::VariableIndex { offset, .. }
            | ParseError::Coefficient { offset, .. } => *offset,
        }
    }
}

/// Parses with the default variable letters for the spec's dimension.
pub fn parse_poly(text: &str, spec: &GroupSpec) -> Result<RingElem> {
    parse_poly_with(text, spec, &Variables::default_for(spec.dims()))
}

/// Parses a polynomial expression and expands it in the quotient ring.
///
/// ```text
/// expr   := term ('+' term)*
/// term   := factor ('*'? factor)*
/// factor := '0' | '1' | var ('^' uint)? | '(' expr ')' ('^' uint)?
/// var    := letter | 'x' uint
/// ```
pub fn parse_poly_with(text: &str, spec: &GroupSpec, vars: &Variables) -> Result<RingElem> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        spec,
        vars,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax(format!("unexpected {:?}", p.src[p.pos] as char)).into());
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    spec: &'a GroupSpec,
    vars: &'a Variables,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn syntax(&self, message: String) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message,
        }
    }

    fn expr(&mut self) -> Result<RingElem, ParseError> {
        let mut acc = self.term()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            let t = self.term()?;
            acc = acc.add(&t).expect("same spec");
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RingElem, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                }
                Some(c) if c == b'(' || c.is_ascii_alphanumeric() => {}
                _ => break,
            }
            let f = self.factor()?;
            acc = acc.mul(&f).expect("same spec");
        }
        Ok(acc)
    }

    fn uint(&mut self) -> Result<(usize, String), ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected an unsigned integer".into()));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii").to_string();
        let value = digits.parse::<usize>().map_err(|_| ParseError::Syntax {
            offset: start,
            message: format!("integer {digits} is too large"),
        })?;
        Ok((value, digits))
    }

    fn exponent(&mut self) -> Result<Option<usize>, ParseError> {
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            Ok(Some(self.uint()?.0))
        } else {
            Ok(None)
        }
    }

    fn factor(&mut self) -> Result<RingElem, ParseError> {
        let Some(c) = self.peek() else {
            return Err(self.syntax("unexpected end of input".into()));
        };
        let start = self.pos;
        match c {
            b'(' => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.syntax("expected ')'".into()));
                }
                self.pos += 1;
                Ok(match self.exponent()? {
                    Some(e) => inner.pow(e as u64),
                    None => inner,
                })
            }
            b'0'..=b'9' => {
                let (value, digits) = self.uint()?;
                match value {
                    0 => Ok(RingElem::zero(self.spec)),
                    1 => Ok(RingElem::one(self.spec)),
                    _ => Err(ParseError::Coefficient { offset: start, value: digits }),
                }
            }
            c if c.is_ascii_alphabetic() => {
                self.pos += 1;
                let indexed = c == b'x' && self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit());
                let var = if indexed {
                    let (i, _) = self.uint()?;
                    if i == 0 || i > self.spec.dims() {
                        return Err(ParseError::VariableIndex {
                            offset: start,
                            index: i,
                            dims: self.spec.dims(),
                        });
                    }
                    i - 1
                } else {
                    self.vars.lookup(c as char).ok_or_else(|| ParseError::UnknownVariable {
                        offset: start,
                        name: (c as char).to_string(),
                    })?
                };
                let e = self.exponent()?.unwrap_or(1);
                let mut exps = vec![0; self.spec.dims()];
                exps[var] = e % self.spec.orders()[var];
                Ok(RingElem::monomial(self.spec, &exps))
            }
            other => Err(self.syntax(format!("unexpected {:?}", other as char))),
        }
    }
}
