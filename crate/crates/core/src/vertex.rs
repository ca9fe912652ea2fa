//! Hash-consed hereditary midpoint terms.
//!
//! A vertex is either a leaf `0..n0` or a formal midpoint `{a, b}` of two
//! distinct vertices. Every term lives in a [`VertexStore`], which interns
//! pairs so that structural equality is id equality.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Handle of an interned vertex. Only meaningful together with the store
/// that issued it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct VertexId(pub(crate) u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Term {
    Leaf(u32),
    /// Children in canonical order, `lo < hi`.
    Pair(VertexId, VertexId),
}

/// Interner for vertices over a fixed leaf set.
///
/// Ids handed out while the store grows in canonical order (which is what
/// level construction does) compare in O(1); anything interned out of order
/// falls back to a structural comparison of depth at most the vertex level.
#[derive(Clone, Debug)]
pub struct VertexStore {
    n0: u32,
    terms: Vec<Term>,
    levels: Vec<u32>,
    pairs: HashMap<(VertexId, VertexId), VertexId>,
    sorted_prefix: usize,
}

impl VertexStore {
    pub fn new(n0: u32) -> VertexStore {
        let terms: Vec<Term> = (0..n0).map(Term::Leaf).collect();
        VertexStore {
            n0,
            levels: vec![1; terms.len()],
            sorted_prefix: terms.len(),
            terms,
            pairs: HashMap::new(),
        }
    }

    pub fn n0(&self) -> u32 {
        self.n0
    }

    /// Number of interned vertices.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leaf(&self, label: u32) -> Option<VertexId> {
        (label < self.n0).then_some(VertexId(label))
    }

    pub fn leaves(&self) -> impl Iterator<Item = VertexId> {
        (0..self.n0).map(VertexId)
    }

    pub fn term(&self, v: VertexId) -> Term {
        self.terms[v.index()]
    }

    /// Minimal `n` with `v` in `V_n`.
    pub fn level(&self, v: VertexId) -> u32 {
        self.levels[v.index()]
    }

    /// Canonical total order: by level, leaves by label, pairs
    /// lexicographically on `(lo, hi)`.
    pub fn cmp(&self, a: VertexId, b: VertexId) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        if a.index() < self.sorted_prefix && b.index() < self.sorted_prefix {
            return a.cmp(&b);
        }
        self.level(a)
            .cmp(&self.level(b))
            .then_with(|| match (self.term(a), self.term(b)) {
                (Term::Leaf(x), Term::Leaf(y)) => x.cmp(&y),
                (Term::Pair(alo, ahi), Term::Pair(blo, bhi)) => {
                    self.cmp(alo, blo).then_with(|| self.cmp(ahi, bhi))
                }
                // unreachable: leaves have level 1, pairs level >= 2
                (Term::Leaf(_), Term::Pair(..)) => Ordering::Less,
                (Term::Pair(..), Term::Leaf(_)) => Ordering::Greater,
            })
    }

    fn ordered(&self, a: VertexId, b: VertexId) -> (VertexId, VertexId) {
        if self.cmp(a, b) == Ordering::Less {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Looks up `m(a, b)` without interning.
    pub fn find_midpoint(&self, a: VertexId, b: VertexId) -> Option<VertexId> {
        if a == b {
            return Some(a);
        }
        self.pairs.get(&self.ordered(a, b)).copied()
    }

    /// `m(a, b)`: `a` when `a == b`, otherwise the interned pair `{a, b}`.
    pub fn midpoint(&mut self, a: VertexId, b: VertexId) -> VertexId {
        if a == b {
            return a;
        }
        let key = self.ordered(a, b);
        if let Some(&v) = self.pairs.get(&key) {
            return v;
        }
        self.push_pair(key.0, key.1)
    }

    fn push_pair(&mut self, lo: VertexId, hi: VertexId) -> VertexId {
        let id = VertexId(u32::try_from(self.terms.len()).expect("vertex store overflow"));
        let level = self.level(lo).max(self.level(hi)) + 1;
        let in_order = self.sorted_prefix == self.terms.len();
        self.terms.push(Term::Pair(lo, hi));
        self.levels.push(level);
        self.pairs.insert((lo, hi), id);
        // `id` is not yet inside the prefix, so this comparison is structural
        if in_order && (id.0 == 0 || self.cmp(VertexId(id.0 - 1), id) == Ordering::Less) {
            self.sorted_prefix += 1;
        }
        id
    }

    /// Canonical nested-brace encoding, e.g. `{0,{0,1}}`.
    pub fn encode(&self, v: VertexId) -> String {
        let mut out = String::new();
        self.encode_into(v, &mut out);
        out
    }

    fn encode_into(&self, v: VertexId, out: &mut String) {
        match self.term(v) {
            Term::Leaf(label) => {
                let _ = write!(out, "{label}");
            }
            Term::Pair(lo, hi) => {
                out.push('{');
                self.encode_into(lo, out);
                out.push(',');
                self.encode_into(hi, out);
                out.push('}');
            }
        }
    }

    /// Parses a canonical encoding, interning any vertices it names.
    pub fn decode(&mut self, s: &str) -> Result<VertexId> {
        let parsed = Parser::new(s, self.n0).parse()?;
        self.intern_parsed(&parsed)
    }

    /// Parses a canonical encoding of an already interned vertex.
    pub fn lookup(&self, s: &str) -> Result<Option<VertexId>> {
        let parsed = Parser::new(s, self.n0).parse()?;
        self.find_parsed(&parsed)
    }

    fn intern_parsed(&mut self, p: &Parsed) -> Result<VertexId> {
        match p {
            Parsed::Leaf(label) => Ok(VertexId(*label)),
            Parsed::Pair(a, b, pos) => {
                let a = self.intern_parsed(a)?;
                let b = self.intern_parsed(b)?;
                self.check_canonical(a, b, *pos)?;
                Ok(self.midpoint(a, b))
            }
        }
    }

    fn find_parsed(&self, p: &Parsed) -> Result<Option<VertexId>> {
        match p {
            Parsed::Leaf(label) => Ok(Some(VertexId(*label))),
            Parsed::Pair(a, b, pos) => {
                let (Some(a), Some(b)) = (self.find_parsed(a)?, self.find_parsed(b)?)
                else {
                    return Ok(None);
                };
                self.check_canonical(a, b, *pos)?;
                Ok(self.find_midpoint(a, b))
            }
        }
    }

    fn check_canonical(&self, a: VertexId, b: VertexId, pos: usize) -> Result<()> {
        match self.cmp(a, b) {
            Ordering::Less => Ok(()),
            Ordering::Equal => Err(Error::Decode {
                pos,
                reason: "pair children are equal".into(),
            }),
            Ordering::Greater => Err(Error::Decode {
                pos,
                reason: "pair children are not in canonical order".into(),
            }),
        }
    }
}

enum Parsed {
    Leaf(u32),
    Pair(Box<Parsed>, Box<Parsed>, usize),
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    n0: u32,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str, n0: u32) -> Self {
        Parser {
            bytes: s.as_bytes(),
            pos: 0,
            n0,
        }
    }

    fn err<T>(&self, reason: impl Into<String>) -> Result<T> {
        Err(Error::Decode {
            pos: self.pos,
            reason: reason.into(),
        })
    }

    fn parse(mut self) -> Result<Parsed> {
        let v = self.term()?;
        if self.pos != self.bytes.len() {
            return self.err("trailing input");
        }
        Ok(v)
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.bytes.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn term(&mut self) -> Result<Parsed> {
        let start = self.pos;
        match self.bytes.get(self.pos) {
            Some(b'{') => {
                self.pos += 1;
                let a = self.term()?;
                self.expect(b',')?;
                let b = self.term()?;
                self.expect(b'}')?;
                Ok(Parsed::Pair(Box::new(a), Box::new(b), start))
            }
            Some(c) if c.is_ascii_digit() => {
                while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                if digits.len() > 1 && digits.starts_with('0') {
                    return self.err("leading zero in leaf label");
                }
                match digits.parse::<u32>() {
                    Ok(label) if label < self.n0 => Ok(Parsed::Leaf(label)),
                    _ => self.err(format!("leaf label {digits} out of range 0..{}", self.n0)),
                }
            }
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn midpoint_basics() {
        let mut s = VertexStore::new(2);
        let (a, b) = (s.leaf(0).unwrap(), s.leaf(1).unwrap());
        assert_eq!(s.midpoint(a, a), a);
        let ab = s.midpoint(a, b);
        assert_eq!(s.encode(ab), "{0,1}");
        assert_eq!(s.midpoint(b, a), ab);
        let x = s.midpoint(ab, a);
        assert_eq!(x, s.midpoint(a, ab));
        assert_eq!(s.encode(x), "{0,{0,1}}");
        assert_eq!(s.level(b), 1);
        assert_eq!(s.level(ab), 2);
        assert_eq!(s.level(x), 3);
    }

    #[test]
    fn decode_rejects_non_canonical() {
        let mut s = VertexStore::new(3);
        assert!(matches!(s.decode("{1,0}"), Err(Error::Decode { .. })));
        assert!(matches!(s.decode("{1,1}"), Err(Error::Decode { .. })));
        assert!(matches!(s.decode("{{0,1},0}"), Err(Error::Decode { .. })));
        assert!(matches!(s.decode("3"), Err(Error::Decode { .. })));
        assert!(matches!(s.decode("{0, 1}"), Err(Error::Decode { .. })));
        assert!(matches!(s.decode("{0,1"), Err(Error::Decode { .. })));
        assert!(matches!(s.decode("01"), Err(Error::Decode { .. })));
        assert_eq!(s.encode(s.leaf(0).unwrap()), "0");
        let v = s.decode("{0,{1,2}}").unwrap();
        assert_eq!(s.encode(v), "{0,{1,2}}");
        assert_eq!(s.lookup("{0,{1,2}}").unwrap(), Some(v));
        assert_eq!(s.lookup("{1,{0,2}}").unwrap(), None);
    }

    #[test]
    fn order_is_structural_even_when_interned_out_of_order() {
        let mut s = VertexStore::new(3);
        let l: Vec<_> = s.leaves().collect();
        let high = {
            let x = s.midpoint(l[1], l[2]);
            s.midpoint(l[0], x)
        };
        let low = s.midpoint(l[0], l[1]);
        assert_eq!(s.cmp(low, high), Ordering::Less);
        let mid = s.midpoint(l[0], l[2]);
        assert_eq!(s.cmp(mid, low), Ordering::Greater);
        assert_eq!(s.cmp(l[2], low), Ordering::Less);
    }

    fn random_vertex(s: &mut VertexStore, picks: &[(u8, u8)], max_level: u32) -> VertexId {
        let mut pool: Vec<VertexId> = s.leaves().collect();
        for &(i, j) in picks {
            let a = pool[i as usize % pool.len()];
            let b = pool[j as usize % pool.len()];
            let m = s.midpoint(a, b);
            if s.level(m) <= max_level {
                pool.push(m);
            }
        }
        *pool.last().unwrap()
    }

    proptest! {
        #[test]
        fn roundtrip_and_laws(n0 in 1u32..5, picks in proptest::collection::vec((any::<u8>(), any::<u8>()), 0..40),
                              other in proptest::collection::vec((any::<u8>(), any::<u8>()), 0..40)) {
            let mut s = VertexStore::new(n0);
            let v = random_vertex(&mut s, &picks, 6);
            let w = random_vertex(&mut s, &other, 6);
            let text = s.encode(v);
            let mut fresh = VertexStore::new(n0);
            let back = fresh.decode(&text).unwrap();
            prop_assert_eq!(fresh.encode(back), text);
            prop_assert_eq!(s.decode(&s.encode(v)).unwrap(), v);

            let m = s.midpoint(v, w);
            prop_assert_eq!(m, s.midpoint(w, v));
            prop_assert_eq!(s.midpoint(v, v), v);
            let expected = if v == w { s.level(v) } else { s.level(v).max(s.level(w)) + 1 };
            prop_assert_eq!(s.level(m), expected);
            prop_assert_eq!(s.cmp(v, w), s.cmp(w, v).reverse());
        }
    }
}
