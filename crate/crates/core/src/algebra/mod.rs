//! The bordered algebra `C(m,1)` and its polynomial extension `C(m,1)[t]`.
//!
//! `C(m,1)` is the path algebra of the quiver with vertices `[1]..[m-1]` and
//! arrows
//!
//! ```text
//! L_i: [i] -> [i-1],   R_i: [i-1] -> [i]   (2 <= i <= m-1)
//! U_1: [1] -> [1],     U_m: [m-1] -> [m-1]
//! ```
//!
//! divided out by the monomial ideal generated by `L_i L_{i-1}`, `R_{i-1} R_i`
//! (`3 <= i <= m-1`), `L_2 U_1`, `U_1 R_2`, `R_{m-1} U_m` and `U_m L_{m-1}`.
//! Words are read left to right as traversals of the quiver, so `a * b` is
//! non-zero only when the target of `a` is the source of `b`.
//!
//! Because the ideal is monomial, the non-zero paths that avoid every
//! forbidden factor form a basis, and a product of two basis paths is either
//! zero or a single basis path. All arithmetic here is exact over `Z`.

mod syntax;

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use syntax::ParseError;

/// A vertex `[x]` of the quiver, `1 <= x <= m-1`.
pub type Vertex = u8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("unsupported parameter m = {m}: the algebra C(m,1) is built for m >= 3")]
    UnsupportedParameter { m: usize },
    #[error("algebra elements belong to different contexts (m = {left} and m = {right})")]
    ContextMismatch { left: usize, right: usize },
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("the idempotent {0} has no factorization into pure paths")]
    IdempotentFactorization(BasisPath),
    #[error("{0} is not a generator of C({1},1)")]
    UnknownGenerator(Generator, usize),
    #[error("{0} is not a non-zero basis path")]
    NotABasisPath(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// An arrow of the quiver.
///
/// `U(k)` only occurs with `k = 1` or `k = m`; the interior `U_i` are sums of
/// two paths and are produced by [`AlgebraContext::u_element`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    U(u8),
    L(u8),
    R(u8),
}

impl Generator {
    pub fn source(self) -> Vertex {
        match self {
            Generator::U(1) => 1,
            Generator::U(k) => k - 1,
            Generator::L(i) => i,
            Generator::R(i) => i - 1,
        }
    }

    pub fn target(self) -> Vertex {
        match self {
            Generator::U(1) => 1,
            Generator::U(k) => k - 1,
            Generator::L(i) => i - 1,
            Generator::R(i) => i,
        }
    }

    /// Index of the shadow-grading component the generator lives in (1-based).
    pub fn index(self) -> u8 {
        match self {
            Generator::U(k) | Generator::L(k) | Generator::R(k) => k,
        }
    }

    /// Doubled total shadow grading: 2 for `U_1`/`U_m`, 1 for `L_i`/`R_i`.
    pub fn doubled_weight(self) -> u32 {
        match self {
            Generator::U(_) => 2,
            Generator::L(_) | Generator::R(_) => 1,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::U(k) => write!(f, "U{k}"),
            Generator::L(i) => write!(f, "L{i}"),
            Generator::R(i) => write!(f, "R{i}"),
        }
    }
}

/// `a * b` lies in the ideal. Assumes `a` and `b` are composable arrows of the
/// same quiver; for those pairs this agrees with the relation list.
pub(crate) fn forbidden_pair(a: Generator, b: Generator) -> bool {
    use Generator::*;
    match (a, b) {
        (L(i), L(j)) => j + 1 == i && i >= 3,
        (R(i), R(j)) => i + 1 == j && j >= 3,
        (L(2), U(1)) | (U(1), R(2)) => true,
        (R(i), U(k)) => k > 1 && i + 1 == k,
        (U(k), L(i)) => k > 1 && i + 1 == k,
        _ => false,
    }
}

/// A basis element of `C(m,1)`: either the idempotent `I_source` (empty word)
/// or a non-constant path avoiding every forbidden factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisPath {
    source: Vertex,
    word: Vec<Generator>,
}

impl BasisPath {
    pub fn idempotent(vertex: Vertex) -> Self {
        BasisPath {
            source: vertex,
            word: Vec::new(),
        }
    }

    /// Builds a path from a word, checking composability and the relations.
    /// Returns `None` when the word is zero in the algebra (or empty).
    pub fn from_word(word: &[Generator]) -> Option<Self> {
        let first = *word.first()?;
        for pair in word.windows(2) {
            if pair[0].target() != pair[1].source() || forbidden_pair(pair[0], pair[1]) {
                return None;
            }
        }
        Some(BasisPath {
            source: first.source(),
            word: word.to_vec(),
        })
    }

    pub fn generator(g: Generator) -> Self {
        BasisPath {
            source: g.source(),
            word: vec![g],
        }
    }

    pub fn source(&self) -> Vertex {
        self.source
    }

    pub fn target(&self) -> Vertex {
        self.word.last().map_or(self.source, |g| g.target())
    }

    pub fn word(&self) -> &[Generator] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// Pure paths are the non-constant ones.
    pub fn is_pure(&self) -> bool {
        !self.word.is_empty()
    }

    pub fn is_idempotent(&self) -> bool {
        self.word.is_empty()
    }

    /// Sum of the doubled shadow grading components.
    pub fn doubled_total(&self) -> u32 {
        self.word.iter().map(|g| g.doubled_weight()).sum()
    }

    /// Product in the algebra; `None` is zero.
    pub fn mul(&self, rhs: &BasisPath) -> Option<BasisPath> {
        if self.target() != rhs.source {
            return None;
        }
        if let (Some(&a), Some(&b)) = (self.word.last(), rhs.word.first()) {
            if forbidden_pair(a, b) {
                return None;
            }
        }
        let mut word = Vec::with_capacity(self.word.len() + rhs.word.len());
        word.extend_from_slice(&self.word);
        word.extend_from_slice(&rhs.word);
        Some(BasisPath {
            source: self.source,
            word,
        })
    }

    /// All splittings `self = a * b` with `a`, `b` both pure, ordered by the
    /// length of `a`.
    pub fn pure_splittings(&self) -> impl Iterator<Item = (BasisPath, BasisPath)> + '_ {
        (1..self.word.len()).map(move |j| {
            let (head, tail) = self.word.split_at(j);
            (
                BasisPath {
                    source: self.source,
                    word: head.to_vec(),
                },
                BasisPath {
                    source: head[j - 1].target(),
                    word: tail.to_vec(),
                },
            )
        })
    }
}

impl fmt::Display for BasisPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "I{}", self.source);
        }
        let mut first = true;
        let mut i = 0;
        while i < self.word.len() {
            let g = self.word[i];
            let run = self.word[i..].iter().take_while(|&&h| h == g).count();
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if run > 1 {
                write!(f, "{g}^{run}")?;
            } else {
                write!(f, "{g}")?;
            }
            i += run;
        }
        Ok(())
    }
}

/// Shadow grading, stored doubled so that every component is an integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GradingVector(pub Vec<u32>);

impl GradingVector {
    pub fn zero(m: usize) -> Self {
        GradingVector(vec![0; m])
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn of_path(m: usize, path: &BasisPath) -> Self {
        let mut v = GradingVector::zero(m);
        for g in path.word() {
            v.0[g.index() as usize - 1] += g.doubled_weight();
        }
        v
    }

    /// Grading of `t^k`, which is `k` times the all-ones vector.
    pub fn of_t_power(m: usize, k: u32) -> Self {
        GradingVector(vec![2 * k; m])
    }
}

impl Add for &GradingVector {
    type Output = GradingVector;

    fn add(self, rhs: &GradingVector) -> GradingVector {
        GradingVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl AddAssign<&GradingVector> for GradingVector {
    fn add_assign(&mut self, rhs: &GradingVector) {
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a += b;
        }
    }
}

impl fmt::Display for GradingVector {
    /// Prints the actual (halved) grading, e.g. `(1/2, 0, 1)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            if x % 2 == 0 {
                write!(f, "{}", x / 2)?;
            } else {
                write!(f, "{x}/2")?;
            }
        }
        f.write_str(")")
    }
}

/// A basis path times a power of `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub t: u32,
    pub path: BasisPath,
}

/// A finite integer combination of monomials in `C(m,1)[t]`.
///
/// Zero coefficients are never stored, so structural equality is equality in
/// the algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraElement {
    m: usize,
    terms: BTreeMap<Monomial, i64>,
}

impl AlgebraElement {
    pub fn zero(m: usize) -> Self {
        AlgebraElement {
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(m: usize, path: BasisPath, t: u32, coefficient: i64) -> Self {
        let mut e = AlgebraElement::zero(m);
        e.add_term(path, t, coefficient);
        e
    }

    pub fn from_path(m: usize, path: BasisPath) -> Self {
        AlgebraElement::monomial(m, path, 0, 1)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.terms.iter().map(|(k, &c)| (k, c))
    }

    pub fn coefficient(&self, path: &BasisPath, t: u32) -> i64 {
        self.terms
            .get(&Monomial {
                t,
                path: path.clone(),
            })
            .copied()
            .unwrap_or(0)
    }

    pub fn add_term(&mut self, path: BasisPath, t: u32, coefficient: i64) {
        if coefficient == 0 {
            return;
        }
        match self.terms.entry(Monomial { t, path }) {
            Entry::Vacant(slot) => {
                slot.insert(coefficient);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coefficient;
                if *slot.get() == 0 {
                    slot.remove();
                }
            }
        }
    }

    /// `self += coefficient * t^shift * other`.
    pub fn add_scaled(&mut self, other: &AlgebraElement, coefficient: i64, shift: u32) {
        for (mono, c) in other.terms() {
            self.add_term(mono.path.clone(), mono.t + shift, c * coefficient);
        }
    }

    pub fn scaled(&self, coefficient: i64) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.m);
        out.add_scaled(self, coefficient, 0);
        out
    }

    pub fn neg(&self) -> AlgebraElement {
        self.scaled(-1)
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        out.add_scaled(other, -1, 0);
        out
    }

    pub fn sum(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        out.add_scaled(other, 1, 0);
        out
    }

    /// The unique basis path when the element is `1 * path * t^0`.
    pub fn as_basis_path(&self) -> Option<&BasisPath> {
        match self.terms.iter().next() {
            Some((mono, 1)) if self.terms.len() == 1 && mono.t == 0 => Some(&mono.path),
            _ => None,
        }
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (mono, &c)) in self.terms.iter().enumerate() {
            let magnitude = c.unsigned_abs();
            if k == 0 {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else if c < 0 {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if magnitude != 1 {
                write!(f, "{magnitude}*")?;
            }
            match mono.t {
                0 => {}
                1 => f.write_str("t*")?,
                k => write!(f, "t^{k}*")?,
            }
            write!(f, "{}", mono.path)?;
        }
        Ok(())
    }
}

/// Result of asking for a common grading of all monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Grading<T> {
    /// The zero element has every grading.
    Zero,
    Homogeneous(T),
    Nonhomogeneous,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gradings {
    pub shadow: Grading<GradingVector>,
    pub gr: Grading<i64>,
}

/// The algebra `C(m,1)` for a fixed `m >= 3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraContext {
    m: usize,
    generators: Vec<Generator>,
    forbidden: BTreeSet<(Generator, Generator)>,
}

impl AlgebraContext {
    pub fn new(m: usize) -> Result<Self, AlgebraError> {
        if !(3..=250).contains(&m) {
            return Err(AlgebraError::UnsupportedParameter { m });
        }
        let mu = m as u8;
        let mut generators = vec![Generator::U(1)];
        for i in 2..mu {
            generators.push(Generator::L(i));
            generators.push(Generator::R(i));
        }
        generators.push(Generator::U(mu));

        let mut forbidden = BTreeSet::new();
        for i in 3..mu {
            forbidden.insert((Generator::L(i), Generator::L(i - 1)));
            forbidden.insert((Generator::R(i - 1), Generator::R(i)));
        }
        forbidden.insert((Generator::L(2), Generator::U(1)));
        forbidden.insert((Generator::U(1), Generator::R(2)));
        forbidden.insert((Generator::R(mu - 1), Generator::U(mu)));
        forbidden.insert((Generator::U(mu), Generator::L(mu - 1)));

        Ok(AlgebraContext {
            m,
            generators,
            forbidden,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..self.m as u8
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn forbidden_factors(&self) -> &BTreeSet<(Generator, Generator)> {
        &self.forbidden
    }

    pub fn contains_generator(&self, g: Generator) -> bool {
        let m = self.m as u8;
        match g {
            Generator::U(k) => k == 1 || k == m,
            Generator::L(i) | Generator::R(i) => (2..m).contains(&i),
        }
    }

    fn check_generator(&self, g: Generator) -> Result<(), AlgebraError> {
        if self.contains_generator(g) {
            Ok(())
        } else {
            Err(AlgebraError::UnknownGenerator(g, self.m))
        }
    }

    /// Checks that a path belongs to this algebra.
    pub fn check_path(&self, path: &BasisPath) -> Result<(), AlgebraError> {
        if !(1..self.m as u8).contains(&path.source) {
            return Err(AlgebraError::IndexOutOfRange {
                index: path.source as usize,
                max: self.m - 1,
            });
        }
        for &g in path.word() {
            self.check_generator(g)?;
        }
        Ok(())
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement::zero(self.m)
    }

    pub fn idempotent(&self, x: usize) -> Result<AlgebraElement, AlgebraError> {
        if x == 0 || x >= self.m {
            return Err(AlgebraError::IndexOutOfRange {
                index: x,
                max: self.m - 1,
            });
        }
        Ok(AlgebraElement::from_path(
            self.m,
            BasisPath::idempotent(x as u8),
        ))
    }

    /// The unit `I_1 + ... + I_{m-1}`.
    pub fn one(&self) -> AlgebraElement {
        let mut e = self.zero();
        for x in self.vertices() {
            e.add_term(BasisPath::idempotent(x), 0, 1);
        }
        e
    }

    /// `t` times the unit.
    pub fn t(&self) -> AlgebraElement {
        let mut e = self.zero();
        for x in self.vertices() {
            e.add_term(BasisPath::idempotent(x), 1, 1);
        }
        e
    }

    pub fn generator(&self, g: Generator) -> Result<AlgebraElement, AlgebraError> {
        self.check_generator(g)?;
        Ok(AlgebraElement::from_path(self.m, BasisPath::generator(g)))
    }

    /// `U_1`, `U_m`, or `R_i L_i + L_i R_i` for interior `i`.
    pub fn u_element(&self, i: usize) -> Result<AlgebraElement, AlgebraError> {
        if i == 0 || i > self.m {
            return Err(AlgebraError::IndexOutOfRange {
                index: i,
                max: self.m,
            });
        }
        let k = i as u8;
        if i == 1 || i == self.m {
            return self.generator(Generator::U(k));
        }
        let mut e = self.zero();
        for word in [
            [Generator::R(k), Generator::L(k)],
            [Generator::L(k), Generator::R(k)],
        ] {
            let path = BasisPath::from_word(&word).expect("R_i L_i and L_i R_i are non-zero");
            e.add_term(path, 0, 1);
        }
        Ok(e)
    }

    fn check_context(&self, x: &AlgebraElement) -> Result<(), AlgebraError> {
        if x.m != self.m {
            return Err(AlgebraError::ContextMismatch {
                left: self.m,
                right: x.m,
            });
        }
        Ok(())
    }

    pub fn multiply(
        &self,
        a: &AlgebraElement,
        b: &AlgebraElement,
    ) -> Result<AlgebraElement, AlgebraError> {
        self.check_context(a)?;
        self.check_context(b)?;
        let mut out = self.zero();
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                if let Some(p) = ma.path.mul(&mb.path) {
                    out.add_term(p, ma.t + mb.t, ca * cb);
                }
            }
        }
        Ok(out)
    }

    /// All pure basis paths whose doubled total shadow grading is at most
    /// `bound`, in sorted order.
    pub fn basis_paths_up_to(&self, bound: u32) -> Vec<BasisPath> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<BasisPath> = self
            .generators
            .iter()
            .filter(|g| g.doubled_weight() <= bound)
            .map(|&g| BasisPath::generator(g))
            .collect();
        while let Some(p) = stack.pop() {
            let weight = p.doubled_total();
            for &g in &self.generators {
                if weight + g.doubled_weight() > bound {
                    continue;
                }
                if let Some(q) = p.mul(&BasisPath::generator(g)) {
                    stack.push(q);
                }
            }
            out.insert(p);
        }
        out.into_iter().collect()
    }

    pub fn factorizations(
        &self,
        p: &BasisPath,
    ) -> Result<Vec<(BasisPath, BasisPath)>, AlgebraError> {
        if p.is_idempotent() {
            return Err(AlgebraError::IdempotentFactorization(p.clone()));
        }
        Ok(p.pure_splittings().collect())
    }

    pub fn shadow_of(&self, mono: &Monomial) -> GradingVector {
        let mut g = GradingVector::of_path(self.m, &mono.path);
        g += &GradingVector::of_t_power(self.m, mono.t);
        g
    }

    /// `gr` of a monomial: `t` has degree `2m - 4` and `C(m,1)` sits in degree 0.
    pub fn gr_of(&self, mono: &Monomial) -> i64 {
        i64::from(mono.t) * (2 * self.m as i64 - 4)
    }

    pub fn gradings(&self, x: &AlgebraElement) -> Gradings {
        fn common<T: PartialEq>(values: impl Iterator<Item = T>) -> Grading<T> {
            let mut result = Grading::Zero;
            for v in values {
                result = match result {
                    Grading::Zero => Grading::Homogeneous(v),
                    Grading::Homogeneous(u) if u == v => Grading::Homogeneous(u),
                    _ => return Grading::Nonhomogeneous,
                };
            }
            result
        }
        Gradings {
            shadow: common(x.terms().map(|(mono, _)| self.shadow_of(mono))),
            gr: common(x.terms().map(|(mono, _)| self.gr_of(mono))),
        }
    }

    /// Parses the textual element syntax, e.g. `R2*L2 + L2*R2` or `t^2*I1`.
    pub fn parse(&self, text: &str) -> Result<AlgebraElement, AlgebraError> {
        syntax::parse(self, text)
    }

    /// Parses a single pure or idempotent basis path such as `R2*L2` or `I1`.
    pub fn parse_path(&self, text: &str) -> Result<BasisPath, AlgebraError> {
        let e = self.parse(text)?;
        e.as_basis_path()
            .cloned()
            .ok_or_else(|| AlgebraError::NotABasisPath(text.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Generator::*;

    fn ctx(m: usize) -> AlgebraContext {
        AlgebraContext::new(m).unwrap()
    }

    fn path(word: &[Generator]) -> BasisPath {
        BasisPath::from_word(word).unwrap()
    }

    #[test]
    fn generators_for_m4() {
        let c = ctx(4);
        let gens: BTreeSet<String> = c.generators().iter().map(|g| g.to_string()).collect();
        let expected: BTreeSet<String> = ["U1", "L2", "R2", "L3", "R3", "U4"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(gens, expected);
        assert_eq!(c.vertices().collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn generators_for_m3() {
        let gens: Vec<String> = ctx(3).generators().iter().map(|g| g.to_string()).collect();
        assert_eq!(gens, vec!["U1", "L2", "R2", "U3"]);
    }

    #[test]
    fn m2_is_rejected() {
        assert_eq!(
            AlgebraContext::new(2),
            Err(AlgebraError::UnsupportedParameter { m: 2 })
        );
    }

    #[test]
    fn sources_and_targets() {
        assert_eq!((L(3).source(), L(3).target()), (3, 2));
        assert_eq!((R(3).source(), R(3).target()), (2, 3));
        assert_eq!((U(1).source(), U(1).target()), (1, 1));
        assert_eq!((U(4).source(), U(4).target()), (3, 3));
    }

    #[test]
    fn forbidden_list_matches_pair_predicate() {
        for m in 3..=7 {
            let c = ctx(m);
            for &a in c.generators() {
                for &b in c.generators() {
                    if a.target() != b.source() {
                        continue;
                    }
                    assert_eq!(
                        forbidden_pair(a, b),
                        c.forbidden_factors().contains(&(a, b)),
                        "m={m} {a}{b}"
                    );
                }
            }
        }
    }

    #[test]
    fn forbidden_factors_m4() {
        let c = ctx(4);
        let f: BTreeSet<(Generator, Generator)> = [
            (L(3), L(2)),
            (R(2), R(3)),
            (L(2), U(1)),
            (U(1), R(2)),
            (R(3), U(4)),
            (U(4), L(3)),
        ]
        .into_iter()
        .collect();
        assert_eq!(c.forbidden_factors(), &f);
    }

    #[test]
    fn products() {
        let c = ctx(4);
        let g = |x| c.generator(x).unwrap();
        let r2l2 = c.multiply(&g(R(2)), &g(L(2))).unwrap();
        assert_eq!(r2l2.as_basis_path(), Some(&path(&[R(2), L(2)])));
        assert_eq!(r2l2.as_basis_path().unwrap().source(), 1);
        assert!(c.multiply(&g(U(1)), &g(R(2))).unwrap().is_zero());
        assert!(c.multiply(&g(L(3)), &g(L(2))).unwrap().is_zero());
        let i1 = c.idempotent(1).unwrap();
        assert_eq!(c.multiply(&i1, &g(U(1))).unwrap(), g(U(1)));
        // non-composable
        assert!(c.multiply(&g(R(2)), &g(U(1))).unwrap().is_zero());
    }

    #[test]
    fn multiply_rejects_foreign_elements() {
        let c3 = ctx(3);
        let c4 = ctx(4);
        let a = c3.generator(U(1)).unwrap();
        let b = c4.generator(U(1)).unwrap();
        assert_eq!(
            c4.multiply(&a, &b),
            Err(AlgebraError::ContextMismatch { left: 4, right: 3 })
        );
    }

    #[test]
    fn u_elements() {
        let c = ctx(4);
        let u2 = c.u_element(2).unwrap();
        assert_eq!(u2.to_string(), "R2*L2 + L2*R2");
        assert_eq!(u2.coefficient(&path(&[R(2), L(2)]), 0), 1);
        assert_eq!(u2.coefficient(&path(&[L(2), R(2)]), 0), 1);
        assert_eq!(c.u_element(1).unwrap(), c.generator(U(1)).unwrap());
        assert_eq!(c.u_element(4).unwrap(), c.generator(U(4)).unwrap());
        assert!(c.u_element(0).is_err());
        assert!(c.u_element(5).is_err());
    }

    #[test]
    fn small_basis_sets() {
        let c = ctx(3);
        let b1: Vec<String> = c
            .basis_paths_up_to(1)
            .iter()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(b1, vec!["R2", "L2"]);
        assert!(c.basis_paths_up_to(0).is_empty());
    }

    #[test]
    fn factorizations_of_paths() {
        let c = ctx(4);
        let f = c.factorizations(&path(&[U(1), U(1)])).unwrap();
        assert_eq!(f, vec![(path(&[U(1)]), path(&[U(1)]))]);
        let f = c.factorizations(&path(&[R(2), L(2)])).unwrap();
        assert_eq!(f, vec![(path(&[R(2)]), path(&[L(2)]))]);
        assert!(c.factorizations(&path(&[U(1)])).unwrap().is_empty());
        assert!(c.factorizations(&BasisPath::idempotent(1)).is_err());
        let long = path(&[R(2), L(2), R(2), L(2)]);
        assert_eq!(c.factorizations(&long).unwrap().len(), 3);
    }

    #[test]
    fn gradings_of_elements() {
        let c = ctx(4);
        let ti1 = AlgebraElement::monomial(4, BasisPath::idempotent(1), 1, 1);
        let g = c.gradings(&ti1);
        assert_eq!(
            g.shadow,
            Grading::Homogeneous(GradingVector(vec![2, 2, 2, 2]))
        );
        assert_eq!(g.gr, Grading::Homogeneous(4));

        let u1 = c.generator(U(1)).unwrap();
        let g = c.gradings(&u1);
        assert_eq!(
            g.shadow,
            Grading::Homogeneous(GradingVector(vec![2, 0, 0, 0]))
        );
        assert_eq!(g.gr, Grading::Homogeneous(0));

        let mixed = u1.sum(&ti1);
        let g = c.gradings(&mixed);
        assert_eq!(g.shadow, Grading::Nonhomogeneous);
        assert_eq!(g.gr, Grading::Nonhomogeneous);
        assert_eq!(c.gradings(&c.zero()).shadow, Grading::Zero);
    }

    #[test]
    fn grading_display_is_halved() {
        assert_eq!(
            GradingVector(vec![1, 2, 0, 3]).to_string(),
            "(1/2, 1, 0, 3/2)"
        );
    }

    #[test]
    fn cancellation_removes_terms() {
        let c = ctx(3);
        let u1 = c.generator(U(1)).unwrap();
        let d = u1.sub(&u1);
        assert!(d.is_zero());
        assert_eq!(d.to_string(), "0");
    }

    #[test]
    fn display_compresses_runs() {
        let p = path(&[U(1), U(1), U(1)]);
        assert_eq!(p.to_string(), "U1^3");
        let e = AlgebraElement::monomial(4, p, 2, -3);
        assert_eq!(e.to_string(), "-3*t^2*U1^3");
    }
}
