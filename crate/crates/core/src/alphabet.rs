//! Finite alphabets with interned symbols.
//!
//! A flat alphabet is a list of display names; a symbol is the index of its
//! name. A product alphabet is a tuple alphabet over an ordered list of factor
//! alphabets. Its symbols are mixed-radix encodings of the factor symbols,
//! first factor most significant, so iterating symbols in id order enumerates
//! tuples in lexicographic order.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An interned symbol: an index into its alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol(pub u32);

impl Symbol {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for Symbol {
    fn from(value: usize) -> Self {
        Symbol(u32::try_from(value).expect("symbol index exceeds u32"))
    }
}

/// A word over some alphabet.
pub type Word = Vec<Symbol>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("alphabet must be nonempty")]
    Empty,
    #[error("duplicate symbol name `{0}`")]
    Duplicate(String),
    #[error(
        "invalid symbol name `{0}`: names must be nonempty and contain no whitespace or commas"
    )]
    InvalidName(String),
}

#[derive(Clone)]
pub struct Alphabet(Arc<Inner>);

enum Inner {
    Flat {
        names: Vec<String>,
        lookup: HashMap<String, Symbol>,
    },
    Product {
        factors: Vec<Alphabet>,
        /// strides[j] = product of the sizes of factors after j
        strides: Vec<u128>,
        size: u128,
    },
}

impl Alphabet {
    /// Builds a flat alphabet from display names, in order.
    pub fn flat<I, S>(names: I) -> Result<Self, AlphabetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(AlphabetError::Empty);
        }
        let mut lookup = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.contains(char::is_whitespace) || name.contains(',') {
                return Err(AlphabetError::InvalidName(name.clone()));
            }
            if lookup.insert(name.clone(), Symbol::from(i)).is_some() {
                return Err(AlphabetError::Duplicate(name.clone()));
            }
        }
        Ok(Alphabet(Arc::new(Inner::Flat { names, lookup })))
    }

    /// Product alphabet over `factors` in the given order. Zero factors give
    /// the one-element unit alphabet.
    pub fn product(factors: Vec<Alphabet>) -> Self {
        let mut strides = vec![1u128; factors.len()];
        let mut size: u128 = 1;
        for j in (0..factors.len()).rev() {
            strides[j] = size;
            size = size.saturating_mul(factors[j].cardinality());
        }
        Alphabet(Arc::new(Inner::Product {
            factors,
            strides,
            size,
        }))
    }

    /// Number of symbols, possibly too large to enumerate.
    pub fn cardinality(&self) -> u128 {
        match &*self.0 {
            Inner::Flat { names, .. } => names.len() as u128,
            Inner::Product { size, .. } => *size,
        }
    }

    /// Whether every symbol fits in a [`Symbol`] index.
    pub fn is_indexable(&self) -> bool {
        self.cardinality() <= u32::MAX as u128
    }

    /// Number of symbols.
    ///
    /// Panics if the alphabet is too large to be indexed by [`Symbol`]; use
    /// [`Alphabet::cardinality`] for such alphabets.
    pub fn len(&self) -> usize {
        assert!(self.is_indexable(), "alphabet too large to enumerate");
        self.cardinality() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.cardinality() == 0
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.len() as u32).map(Symbol)
    }

    pub fn contains(&self, s: Symbol) -> bool {
        (s.0 as u128) < self.cardinality()
    }

    pub fn is_product(&self) -> bool {
        matches!(&*self.0, Inner::Product { .. })
    }

    /// Factor alphabets of a product; empty for a flat alphabet.
    pub fn factors(&self) -> &[Alphabet] {
        match &*self.0 {
            Inner::Flat { .. } => &[],
            Inner::Product { factors, .. } => factors,
        }
    }

    pub fn arity(&self) -> usize {
        self.factors().len()
    }

    /// Encodes a tuple of factor symbols.
    pub fn encode(&self, parts: &[Symbol]) -> Symbol {
        match &*self.0 {
            Inner::Flat { .. } => {
                assert_eq!(parts.len(), 1, "flat alphabet encodes exactly one symbol");
                parts[0]
            }
            Inner::Product { strides, .. } => {
                assert_eq!(parts.len(), strides.len(), "tuple arity mismatch");
                let mut code: u128 = 0;
                for (p, s) in parts.iter().zip(strides) {
                    code += p.0 as u128 * s;
                }
                Symbol(u32::try_from(code).expect("product symbol exceeds u32"))
            }
        }
    }

    /// Decodes a product symbol into its factor symbols.
    pub fn decode(&self, s: Symbol) -> Vec<Symbol> {
        match &*self.0 {
            Inner::Flat { .. } => vec![s],
            Inner::Product {
                factors, strides, ..
            } => factors
                .iter()
                .zip(strides)
                .map(|(f, stride)| Symbol(((s.0 as u128 / stride) % f.cardinality()) as u32))
                .collect(),
        }
    }

    /// Projection of a product symbol onto factor `j`.
    pub fn project(&self, s: Symbol, j: usize) -> Symbol {
        match &*self.0 {
            Inner::Flat { .. } => {
                assert_eq!(j, 0);
                s
            }
            Inner::Product {
                factors, strides, ..
            } => Symbol(((s.0 as u128 / strides[j]) % factors[j].cardinality()) as u32),
        }
    }

    /// Display name: the flat name, or `(a,b,...)` for tuples.
    pub fn name(&self, s: Symbol) -> String {
        match &*self.0 {
            Inner::Flat { names, .. } => names[s.index()].clone(),
            Inner::Product { factors, .. } => {
                let parts: Vec<String> = self
                    .decode(s)
                    .into_iter()
                    .zip(factors)
                    .map(|(p, f)| f.name(p))
                    .collect();
                if parts.len() == 1 {
                    return parts.into_iter().next().unwrap();
                }
                format!("({})", parts.join(","))
            }
        }
    }

    /// Name usable as a single whitespace-free token in the text formats:
    /// flat names as is, tuples of flat factors as `a,b`.
    pub fn token(&self, s: Symbol) -> String {
        match &*self.0 {
            Inner::Flat { names, .. } => names[s.index()].clone(),
            Inner::Product { factors, .. } => self
                .decode(s)
                .into_iter()
                .zip(factors)
                .map(|(p, f)| f.token(p))
                .collect::<Vec<_>>()
                .join(","),
        }
    }

    /// Inverse of [`Alphabet::token`] for flat alphabets and products of
    /// flat alphabets.
    pub fn parse_token(&self, token: &str) -> Option<Symbol> {
        match &*self.0 {
            Inner::Flat { lookup, .. } => lookup.get(token).copied(),
            Inner::Product { factors, .. } => {
                if factors.is_empty() {
                    return (token == "()").then_some(Symbol(0));
                }
                let parts: Vec<&str> = token.split(',').collect();
                if parts.len() != factors.len() {
                    return None;
                }
                let mut syms = Vec::with_capacity(parts.len());
                for (p, f) in parts.iter().zip(factors) {
                    if f.is_product() {
                        return None;
                    }
                    syms.push(f.parse_token(p)?);
                }
                Some(self.encode(&syms))
            }
        }
    }

    /// Names of a flat alphabet, in symbol order.
    pub fn names(&self) -> Option<&[String]> {
        match &*self.0 {
            Inner::Flat { names, .. } => Some(names),
            Inner::Product { .. } => None,
        }
    }

    pub fn word_name(&self, w: &[Symbol]) -> String {
        if w.is_empty() {
            return "ε".to_string();
        }
        w.iter()
            .map(|&s| self.name(s))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (&*self.0, &*other.0) {
            (Inner::Flat { names: a, .. }, Inner::Flat { names: b, .. }) => a == b,
            (Inner::Product { factors: a, .. }, Inner::Product { factors: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Inner::Flat { names, .. } => write!(f, "{{{}}}", names.join(",")),
            Inner::Product { factors, .. } => {
                if factors.is_empty() {
                    return write!(f, "()");
                }
                let parts: Vec<String> = factors.iter().map(|a| format!("{a:?}")).collect();
                write!(f, "{}", parts.join(" x "))
            }
        }
    }
}
