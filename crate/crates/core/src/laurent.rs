//! Sparse multivariate Laurent polynomials with exact integer coefficients.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Subscript standing for a constituent: its label, its endpoint pair, or the
/// shared loop symbol used once constituent labels are forgotten.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sub {
    Id(String),
    Ends(String, String),
    Loop,
}

impl Sub {
    pub fn id(s: impl Into<String>) -> Sub {
        Sub::Id(s.into())
    }
}

impl fmt::Display for Sub {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sub::Id(s) => f.write_str(s),
            Sub::Ends(p, q) => write!(f, "({p},{q})"),
            Sub::Loop => f.write_str("(L)"),
        }
    }
}

/// Variable keys. The derived order is the canonical key order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    R(Sub, Sub),
    T(Sub),
    S(Sub),
    A(String),
    B(String),
    Lam(String, String),
    /// Canonical side of a pole bipartition: sorted, nonempty, never containing
    /// the smallest pole label.
    X(Vec<String>),
    XCount(u32),
    Y(Sub, String),
    Kauffman,
    Generic(String),
}

impl Var {
    pub fn lam(p: &str, q: &str) -> Var {
        if p <= q {
            Var::Lam(p.to_string(), q.to_string())
        } else {
            Var::Lam(q.to_string(), p.to_string())
        }
    }

    /// Bipartition key for the split `side | rest` of `poles`. Returns `None`
    /// for the trivial bipartition.
    pub fn x<'a>(side: impl IntoIterator<Item = &'a str>, poles: &[String]) -> Option<Var> {
        let side: BTreeSet<&str> = side.into_iter().collect();
        let min = poles.iter().map(|p| p.as_str()).min()?;
        let chosen: Vec<String> = if side.contains(min) {
            poles
                .iter()
                .filter(|p| !side.contains(p.as_str()))
                .cloned()
                .collect()
        } else {
            side.iter().map(|s| s.to_string()).collect()
        };
        if chosen.is_empty() {
            return None;
        }
        let mut chosen = chosen;
        chosen.sort();
        chosen.dedup();
        Some(Var::X(chosen))
    }

    pub fn generic(name: &str) -> Var {
        Var::Generic(name.to_string())
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::R(a, b) => write!(f, "r[{a},{b}]"),
            Var::T(e) => write!(f, "t[{e}]"),
            Var::S(e) => write!(f, "s[{e}]"),
            Var::A(q) => write!(f, "a[{q}]"),
            Var::B(q) => write!(f, "b[{q}]"),
            Var::Lam(p, q) => write!(f, "lam[{{{p},{q}}}]"),
            Var::X(s) => write!(f, "x[{{{}}}]", s.join(",")),
            Var::XCount(n) => write!(f, "x[{n}]"),
            Var::Y(e, p) => write!(f, "y[{e};{p}]"),
            Var::Kauffman => f.write_str("A"),
            Var::Generic(n) => f.write_str(n),
        }
    }
}

/// A monomial: sorted variable keys with nonzero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono(Vec<(Var, i64)>);

impl Mono {
    pub fn one() -> Mono {
        Mono(Vec::new())
    }

    pub fn var(v: Var, e: i64) -> Mono {
        if e == 0 {
            Mono::one()
        } else {
            Mono(vec![(v, e)])
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, i64)>) -> Mono {
        let mut m: BTreeMap<Var, i64> = BTreeMap::new();
        for (v, e) in pairs {
            *m.entry(v).or_insert(0) += e;
        }
        Mono(m.into_iter().filter(|(_, e)| *e != 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Var, i64)] {
        &self.0
    }

    pub fn exp(&self, v: &Var) -> i64 {
        match self.0.binary_search_by(|(k, _)| k.cmp(v)) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1.checked_add(b[j].1).expect("exponent overflow");
                    if e != 0 {
                        out.push((a[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Mono(out)
    }

    pub fn pow(&self, k: i64) -> Mono {
        if k == 0 {
            return Mono::one();
        }
        Mono(
            self.0
                .iter()
                .map(|(v, e)| (v.clone(), e.checked_mul(k).expect("exponent overflow")))
                .collect(),
        )
    }

    pub fn without(&self, v: &Var) -> Mono {
        Mono(self.0.iter().filter(|(k, _)| k != v).cloned().collect())
    }

    /// Display order: dense exponent vectors over the canonical key order,
    /// compared lexicographically, larger exponents first.
    pub fn display_cmp(&self, other: &Mono) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            let (ea, eb) = match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(x), None) => {
                    i += 1;
                    (x.1, 0)
                }
                (None, Some(y)) => {
                    j += 1;
                    (0, y.1)
                }
                (Some(x), Some(y)) => match x.0.cmp(&y.0) {
                    Ordering::Less => {
                        i += 1;
                        (x.1, 0)
                    }
                    Ordering::Greater => {
                        j += 1;
                        (0, y.1)
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        (x.1, y.1)
                    }
                },
            };
            if ea != eb {
                return eb.cmp(&ea);
            }
        }
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{v}")?;
            if *e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse Laurent polynomial. Zero coefficients are never stored, so derived
/// equality is exact mathematical equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Mono, BigInt>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Poly {
        Poly::term(c, Mono::one())
    }

    pub fn term(c: impl Into<BigInt>, m: Mono) -> Poly {
        let c = c.into();
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn var(v: Var) -> Poly {
        Poly::term(1, Mono::var(v, 1))
    }

    pub fn var_pow(v: Var, e: i64) -> Poly {
        Poly::term(1, Mono::var(v, e))
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

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &BigInt)> {
        self.terms.iter()
    }

    /// Terms in display order.
    pub fn sorted_terms(&self) -> Vec<(&Mono, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.display_cmp(b.0));
        v
    }

    pub fn add_term(&mut self, m: Mono, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add_assign(&mut self, other: &Poly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut p = self.clone();
        p.add_assign(other);
        p
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: impl Into<BigInt>) -> Poly {
        let k = k.into();
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * &k))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        out
    }

    pub fn mul_mono(&self, m: &Mono) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.mul(m), c.clone()))
                .collect(),
        }
    }

    /// If the polynomial is `±1` times a monomial, returns the pair.
    pub fn as_unit(&self) -> Option<(i64, &Mono)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        if c.is_one() {
            Some((1, m))
        } else if (-c).is_one() {
            Some((-1, m))
        } else {
            None
        }
    }

    /// Integer power; negative exponents need a unit.
    pub fn pow(&self, k: i64) -> Result<Poly> {
        if k < 0 {
            let (s, m) = self.as_unit().ok_or(Error::NonInvertible)?;
            let sign = if k % 2 == 0 { 1 } else { s };
            return Ok(Poly::term(sign, m.pow(k)));
        }
        if let Some((s, m)) = self.as_unit() {
            let sign = if k % 2 == 0 { 1 } else { s };
            return Ok(Poly::term(sign, m.pow(k)));
        }
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Ring homomorphism sending each mapped variable to its image.
    pub fn substitute(&self, map: &BTreeMap<Var, Poly>) -> Result<Poly> {
        let mut cache: BTreeMap<(Var, i64), Poly> = BTreeMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut acc = Poly::constant(c.clone());
            for (v, e) in m.pairs() {
                match map.get(v) {
                    None => kept.push((v.clone(), *e)),
                    Some(img) => {
                        let key = (v.clone(), *e);
                        if !cache.contains_key(&key) {
                            cache.insert(key.clone(), img.pow(*e)?);
                        }
                        acc = acc.mul(&cache[&key]);
                        if acc.is_zero() {
                            break;
                        }
                    }
                }
            }
            if !acc.is_zero() {
                out.add_assign(&acc.mul_mono(&Mono(kept)));
            }
        }
        Ok(out)
    }

    /// Monomials whose exponent of `v` is exactly `k`, with `v` removed.
    pub fn coefficient_at(&self, v: &Var, k: i64) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if m.exp(v) == k {
                out.add_term(m.without(v), c);
            }
        }
        out
    }

    pub fn coefficient_of(&self, v: &Var) -> Poly {
        self.coefficient_at(v, 1)
    }

    /// Largest total absolute exponent over `vars`; `None` stands for minus
    /// infinity (the zero polynomial).
    pub fn deg_subset(&self, vars: &BTreeSet<Var>) -> Option<i64> {
        self.terms
            .keys()
            .map(|m| {
                m.pairs()
                    .iter()
                    .filter(|(v, _)| vars.contains(v))
                    .map(|(_, e)| e.abs())
                    .sum::<i64>()
            })
            .max()
    }

    pub fn span(&self, v: &Var) -> Option<i64> {
        let exps: Vec<i64> = self.terms.keys().map(|m| m.exp(v)).collect();
        let max = exps.iter().max()?;
        let min = exps.iter().min()?;
        Some(max - min)
    }

    /// Renames variables; keys sent to `None` are dropped (set to 1) and keys
    /// sent to a common image have their exponents summed.
    pub fn reindex(&self, rule: impl Fn(&Var) -> Option<Var>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let nm = Mono::from_pairs(
                m.pairs()
                    .iter()
                    .filter_map(|(v, e)| rule(v).map(|w| (w, *e))),
            );
            out.add_term(nm, c);
        }
        out
    }

    /// Applies a monomial-wise transformation `v^e -> image(v)^(e * k)`.
    pub fn rename_signed(&self, rule: impl Fn(&Var) -> (Var, i64)) -> Poly {
        self.reindex_signed(rule)
    }

    fn reindex_signed(&self, rule: impl Fn(&Var) -> (Var, i64)) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let nm = Mono::from_pairs(m.pairs().iter().map(|(v, e)| {
                let (w, k) = rule(v);
                (w, e * k)
            }));
            out.add_term(nm, c);
        }
        out
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.pairs().iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct VarExp {
            var: String,
            exp: i64,
        }
        #[derive(Serialize)]
        struct Term {
            coeff: String,
            vars: Vec<VarExp>,
        }
        let terms: Vec<Term> = self
            .sorted_terms()
            .into_iter()
            .map(|(m, c)| Term {
                coeff: c.to_string(),
                vars: m
                    .pairs()
                    .iter()
                    .map(|(v, e)| VarExp {
                        var: v.to_string(),
                        exp: *e,
                    })
                    .collect(),
            })
            .collect();
        serde_json::json!({ "text": self.to_string(), "terms": terms })
    }

    /// Integer value when the polynomial is a constant.
    pub fn as_constant(&self) -> Option<BigInt> {
        if self.is_zero() {
            return Some(BigInt::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next()?;
            if m.is_one() {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.as_constant()?.to_i64()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Poly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Poly> {
        Parser::new(s).poly()
    }
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser { s: s.as_bytes(), i: 0 }
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("polynomial: {what} at byte {}", self.i))
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn poly(&mut self) -> Result<Poly> {
        let mut out = Poly::zero();
        self.ws();
        let mut neg = self.eat(b'-');
        self.ws();
        loop {
            let (c, m) = self.term()?;
            out.add_term(m, &if neg { -c } else { c });
            self.ws();
            match self.peek() {
                None => break,
                Some(b'+') => neg = false,
                Some(b'-') => neg = true,
                _ => return Err(self.err("expected '+' or '-'")),
            }
            self.i += 1;
            self.ws();
        }
        Ok(out)
    }

    fn int(&mut self) -> Result<BigInt> {
        let start = self.i;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.i += 1;
        }
        if start == self.i {
            return Err(self.err("expected integer"));
        }
        let txt = std::str::from_utf8(&self.s[start..self.i]).unwrap();
        Ok(txt.parse::<BigInt>().unwrap())
    }

    fn exp(&mut self) -> Result<i64> {
        if !self.eat(b'^') {
            return Ok(1);
        }
        let neg = self.eat(b'-');
        let v = self.int()?.to_i64().ok_or_else(|| self.err("exponent"))?;
        Ok(if neg { -v } else { v })
    }

    fn term(&mut self) -> Result<(BigInt, Mono)> {
        let mut coeff = BigInt::one();
        let mut pairs = Vec::new();
        if matches!(self.peek(), Some(b'0'..=b'9')) {
            coeff = self.int()?;
            if !self.eat(b'*') {
                return Ok((coeff, Mono::one()));
            }
        }
        loop {
            let v = self.var()?;
            let e = self.exp()?;
            pairs.push((v, e));
            if !self.eat(b'*') {
                break;
            }
        }
        Ok((coeff, Mono::from_pairs(pairs)))
    }

    fn ident(&mut self) -> Result<String> {
        let start = self.i;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' || c == b'.' || c == b'\'' {
                self.i += 1;
            } else {
                break;
            }
        }
        if start == self.i {
            return Err(self.err("expected identifier"));
        }
        Ok(String::from_utf8(self.s[start..self.i].to_vec()).unwrap())
    }

    fn sub(&mut self) -> Result<Sub> {
        if self.eat(b'(') {
            let p = self.ident()?;
            if p == "L" && self.eat(b')') {
                return Ok(Sub::Loop);
            }
            self.expect(b',')?;
            let q = self.ident()?;
            self.expect(b')')?;
            return Ok(Sub::Ends(p, q));
        }
        Ok(Sub::Id(self.ident()?))
    }

    fn set(&mut self) -> Result<Vec<String>> {
        self.expect(b'{')?;
        let mut v = vec![self.ident()?];
        while self.eat(b',') {
            v.push(self.ident()?);
        }
        self.expect(b'}')?;
        Ok(v)
    }

    fn var(&mut self) -> Result<Var> {
        let name = self.ident()?;
        if !self.eat(b'[') {
            return Ok(if name == "A" {
                Var::Kauffman
            } else {
                Var::Generic(name)
            });
        }
        let v = match name.as_str() {
            "r" => {
                let a = self.sub()?;
                self.expect(b',')?;
                Var::R(a, self.sub()?)
            }
            "t" => Var::T(self.sub()?),
            "s" => Var::S(self.sub()?),
            "a" => Var::A(self.ident()?),
            "b" => Var::B(self.ident()?),
            "x" => {
                if self.peek() == Some(b'{') {
                    let mut s = self.set()?;
                    s.sort();
                    Var::X(s)
                } else {
                    let n = self.int()?.to_u32().ok_or_else(|| self.err("count"))?;
                    Var::XCount(n)
                }
            }
            "y" => {
                let e = self.sub()?;
                self.expect(b';')?;
                Var::Y(e, self.ident()?)
            }
            "lam" => {
                let s = self.set()?;
                if s.len() != 2 {
                    return Err(self.err("lam takes a pole pair"));
                }
                Var::lam(&s[0], &s[1])
            }
            _ => return Err(self.err("unknown indexed variable")),
        };
        self.expect(b']')?;
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var(Var::generic("x"))
    }
    fn y() -> Poly {
        Poly::var(Var::generic("y"))
    }

    #[test]
    fn difference_of_squares() {
        let p = x().sub(&Poly::one()).mul(&x().add(&Poly::one()));
        assert_eq!(p.to_string(), "x^2 - 1");
    }

    #[test]
    fn unknot_bracket_text() {
        let a2 = Poly::var_pow(Var::Kauffman, 2);
        let am2 = Poly::var_pow(Var::Kauffman, -2);
        assert_eq!(a2.add(&am2).neg().to_string(), "-A^2 - A^-2");
    }

    #[test]
    fn substitution_examples() {
        let p: Poly = "3*x^2*y - x".parse().unwrap();
        let mut m = BTreeMap::new();
        m.insert(Var::generic("x"), Poly::one());
        assert_eq!(p.substitute(&m).unwrap().to_string(), "3*y - 1");

        let q: Poly = "x^2 + x^-1".parse().unwrap();
        let mut m = BTreeMap::new();
        m.insert(Var::generic("x"), Poly::var_pow(Var::generic("x"), -1));
        assert_eq!(q.substitute(&m).unwrap(), "x^-2 + x".parse().unwrap());

        let mut m = BTreeMap::new();
        m.insert(Var::generic("x"), Poly::zero());
        assert!(matches!(q.substitute(&m), Err(Error::NonInvertible)));
        let r: Poly = "x^2*y + y".parse().unwrap();
        assert_eq!(r.substitute(&m).unwrap(), y());
    }

    #[test]
    fn coefficient_degree_span() {
        let p: Poly = "3*x*y - x^2 + y".parse().unwrap();
        assert_eq!(p.coefficient_of(&Var::generic("x")), y().scale(3));
        let q: Poly = "x^2".parse().unwrap();
        assert!(q.coefficient_of(&Var::generic("x")).is_zero());

        let xs: BTreeSet<Var> = [Var::generic("x")].into();
        let p: Poly = "x^2*y + x^-3".parse().unwrap();
        assert_eq!(p.deg_subset(&xs), Some(3));
        assert_eq!(Poly::zero().deg_subset(&xs), None);
        let xy: BTreeSet<Var> = [Var::generic("x"), Var::generic("y")].into();
        let p: Poly = "x*y^-1 + y".parse().unwrap();
        assert_eq!(p.deg_subset(&xy), Some(2));

        let p: Poly = "x^2 + x^-1".parse().unwrap();
        assert_eq!(p.span(&Var::generic("x")), Some(3));
        assert_eq!(y().span(&Var::generic("x")), Some(0));
        assert_eq!(Poly::zero().span(&Var::generic("x")), None);
    }

    #[test]
    fn reindex_merges() {
        let p = Poly::term(
            1,
            Mono::from_pairs([(Var::T(Sub::id("e1")), 1), (Var::T(Sub::id("e2")), -1)]),
        );
        let q = p.reindex(|v| match v {
            Var::T(_) => Some(Var::generic("t")),
            w => Some(w.clone()),
        });
        assert_eq!(q, Poly::one());
    }

    #[test]
    fn x_key_is_canonical() {
        let poles: Vec<String> = ["P", "Q", "R", "S", "T"].iter().map(|s| s.to_string()).collect();
        let a = Var::x(["P", "Q"], &poles).unwrap();
        let b = Var::x(["R", "S", "T"], &poles).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "x[{R,S,T}]");
        assert!(Var::x([], &poles).is_none());
        assert!(Var::x(["P", "Q", "R", "S", "T"], &poles).is_none());
    }

    #[test]
    fn text_round_trip() {
        let src = "2*r[e1,e2]*t[(P,Q)]^-1*a[Q]^2 - lam[{P,Q}]*x[{R}]*y[e;Q]^-3*A^4 + y[(P,Q);R] + t[(L)] - x[2] + 7";
        let p: Poly = src.parse().unwrap();
        let back: Poly = p.to_string().parse().unwrap();
        assert_eq!(p, back);
    }
}
