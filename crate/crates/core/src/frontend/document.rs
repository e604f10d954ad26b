//! TOML system documents.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use toml::{Table, Value};

use crate::conservation::{Current, DESystem, Multiplier, Rule};
use crate::error::{Error, Result};
use crate::expr::{Atom, Expr, MultiIndex};
use crate::frontend::parser::{parse_expr, parse_expression, Syntax};
use crate::jet::{Characteristic, SystemSignature};
use crate::symbol::Symbol;

/// Expected parts of an embedding current: `scale·J = j + j_F~q + bar`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingExpectation {
    pub q: String,
    pub current: String,
    pub characteristic: String,
    pub params: Vec<Symbol>,
    pub scale: BigRational,
    pub bar: Option<Current>,
    pub j: Option<Current>,
    pub frozen: Option<Current>,
}

/// `δL = D_μ K^μ` with the expected Noether current.
#[derive(Clone, Debug, PartialEq)]
pub struct NoetherEntry {
    pub lagrangian: String,
    pub characteristic: String,
    pub k: String,
    pub current: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Entry {
    pub q: String,
    pub current: String,
    pub characteristic: String,
    pub product_only: bool,
}

/// A loaded, validated system document.
#[derive(Clone, Debug)]
pub struct Document {
    pub name: String,
    pub notes: String,
    pub system: DESystem,
    pub multipliers: BTreeMap<String, Multiplier>,
    pub currents: BTreeMap<String, Current>,
    pub characteristics: BTreeMap<String, Characteristic>,
    pub lagrangians: BTreeMap<String, Expr>,
    /// Constant values at which an object is valid, e.g. `q4 -> {p: 1}`.
    pub valid_at: BTreeMap<String, BTreeMap<Symbol, BigRational>>,
    /// Multiplier name -> current name.
    pub pairs: Vec<(String, String)>,
    pub euler_lagrange: Vec<(String, Symbol, String)>,
    pub theorem1: Vec<Theorem1Entry>,
    pub theorem2: Vec<EmbeddingExpectation>,
    pub noether: Vec<NoetherEntry>,
}

fn schema<T>(path: &str, msg: impl Into<String>) -> Result<T> {
    Err(Error::Schema { path: path.to_string(), msg: msg.into() })
}

fn in_path<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Schema { .. } => e,
        other => Error::Schema { path: path.to_string(), msg: other.to_string() },
    })
}

fn table<'a>(t: &'a Table, key: &str, path: &str) -> Result<Option<&'a Table>> {
    match t.get(key) {
        None => Ok(None),
        Some(Value::Table(x)) => Ok(Some(x)),
        Some(_) => schema(&join(path, key), "expected a table"),
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().map_or_else(|| schema(path, "expected a string"), Ok)
}

fn names(t: &Table, key: &str, path: &str) -> Result<Vec<Symbol>> {
    let p = join(path, key);
    match t.get(key) {
        None => Ok(Vec::new()),
        Some(Value::Array(a)) => a
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let s = string(v, &format!("{p}[{i}]"))?;
                match parse_expression(s) {
                    Ok(Syntax::Ident(..)) => Ok(Symbol::new(s.trim())),
                    _ => schema(&format!("{p}[{i}]"), format!("invalid name {s:?}")),
                }
            })
            .collect(),
        Some(_) => schema(&p, "expected an array of names"),
    }
}

fn rational(v: &Value, path: &str) -> Result<BigRational> {
    match v {
        Value::Integer(n) => Ok(BigRational::from_integer(BigInt::from(*n))),
        Value::String(s) => {
            parse_rational(s).ok_or_else(|| Error::Schema { path: path.into(), msg: format!("invalid rational {s:?}") })
        }
        _ => schema(path, "expected an integer or a rational string"),
    }
}

/// Splits at commas outside brackets and parentheses.
fn split_top_level(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in text.char_indices() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(text[start..].trim());
    out
}

fn assignments<'a>(parts: &[&'a str]) -> Result<Vec<(&'a str, &'a str)>> {
    parts
        .iter()
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Syntax { pos: 0, msg: format!("expected name=expr, found {p:?}") })
        })
        .collect()
}

/// Parses `3`, `-3/2` or `0.25`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(r) => (true, r.trim()),
        None => (false, s),
    };
    let v = if let Some((n, d)) = body.split_once('/') {
        let d: BigInt = d.trim().parse().ok()?;
        if d == BigInt::from(0) {
            return None;
        }
        BigRational::new(n.trim().parse().ok()?, d)
    } else if let Some((i, f)) = body.split_once('.') {
        let scale = BigInt::from(10).pow(f.len() as u32);
        let i: BigInt = if i.is_empty() { BigInt::from(0) } else { i.parse().ok()? };
        let f: BigInt = if f.is_empty() { BigInt::from(0) } else { f.parse().ok()? };
        BigRational::new(i * &scale + f, scale)
    } else {
        BigRational::from_integer(body.parse().ok()?)
    };
    Some(if neg { -v } else { v })
}

fn expr(v: &Value, sig: &SystemSignature, path: &str) -> Result<Expr> {
    match v {
        Value::Integer(n) => Ok(Expr::int(*n)),
        Value::String(s) => in_path(path, parse_expr(s, sig)),
        _ => schema(path, "expected an expression string"),
    }
}

fn current(v: &Value, sig: &SystemSignature, path: &str) -> Result<Current> {
    let Value::Array(a) = v else { return schema(path, "expected an array of components") };
    if a.len() != sig.dimension() {
        return schema(path, format!("expected {} components, found {}", sig.dimension(), a.len()));
    }
    Ok(Current(a.iter().enumerate().map(|(i, c)| expr(c, sig, &format!("{path}[{i}]"))).collect::<Result<_>>()?))
}

fn jet_key(s: &str, sig: &SystemSignature, path: &str) -> Result<(Symbol, MultiIndex)> {
    let e = in_path(path, parse_expr(s, sig))?;
    match e.as_single_term() {
        Some((m, c)) if c.is_one() && m.factors().len() == 1 && m.factors()[0].1.as_int() == Some(1) => {
            match &m.factors()[0].0 {
                Atom::Jet(f, j) if sig.is_field(f) => Ok((f.clone(), j.clone())),
                _ => schema(path, format!("{s} is not a field jet")),
            }
        }
        _ => schema(path, format!("{s} is not a single jet")),
    }
}

fn str_field(t: &Table, key: &str, path: &str) -> Result<String> {
    match t.get(key) {
        Some(v) => Ok(string(v, &join(path, key))?.to_string()),
        None => schema(&join(path, key), "missing key"),
    }
}

fn entries<'a>(root: &'a Table, key: &str) -> Result<Vec<(String, &'a Table)>> {
    match root.get(key) {
        None => Ok(Vec::new()),
        Some(Value::Array(a)) => a
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let p = format!("{key}[{i}]");
                match v {
                    Value::Table(t) => Ok((p, t)),
                    _ => schema(&p, "expected a table"),
                }
            })
            .collect(),
        Some(_) => schema(key, "expected an array of tables"),
    }
}

impl Document {
    pub fn load(path: &Path) -> Result<Document> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Document::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Document> {
        let root: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Schema { path: String::new(), msg: e.message().to_string() })?;
        let meta = table(&root, "meta", "")?;
        let name = match meta.and_then(|m| m.get("name")) {
            Some(v) => string(v, "meta.name")?.to_string(),
            None => String::new(),
        };
        let notes = match meta.and_then(|m| m.get("notes")) {
            Some(v) => string(v, "meta.notes")?.to_string(),
            None => String::new(),
        };

        let Some(st) = table(&root, "system", "")? else { return schema("system", "missing table") };
        let sig = SystemSignature {
            independents: names(st, "independents", "system")?,
            fields: names(st, "fields", "system")?,
            parameters: names(st, "parameters", "system")?,
            constants: names(st, "constants", "system")?,
            exponent_constants: names(st, "exponent_constants", "system")?,
            functions: names(st, "functions", "system")?,
        };
        for k in st.keys() {
            if !["independents", "fields", "parameters", "constants", "exponent_constants", "functions"]
                .contains(&k.as_str())
            {
                return schema(&join("system", k), "unknown key");
            }
        }
        in_path("system", sig.validate())?;

        let mut equations = Vec::new();
        let Some(eqs) = table(&root, "equations", "")? else { return schema("equations", "missing table") };
        for (l, v) in eqs {
            equations.push((Symbol::new(l), expr(v, &sig, &join("equations", l))?));
        }
        let mut system = DESystem::new(sig.clone(), equations)?;
        if let Some(sv) = table(&root, "solved", "")? {
            let mut rules = Vec::new();
            for (k, v) in sv {
                let p = join("solved", k);
                let (field, lhs) = jet_key(k, &sig, &p)?;
                rules.push(Rule { field, lhs, rhs: expr(v, &sig, &p)? });
            }
            system = system.with_solved(rules)?;
        }

        let labels: Vec<Symbol> = system.labels().cloned().collect();
        let mut multipliers = BTreeMap::new();
        if let Some(mt) = table(&root, "multipliers", "")? {
            for (n, v) in mt {
                let p = join("multipliers", n);
                let m = match v {
                    Value::Table(t) => {
                        let mut m = BTreeMap::new();
                        for (l, e) in t {
                            let lp = join(&p, l);
                            if !labels.iter().any(|x| x.as_str() == l) {
                                return schema(&lp, format!("unknown equation label {l}"));
                            }
                            m.insert(Symbol::new(l), expr(e, &sig, &lp)?);
                        }
                        Multiplier(m)
                    }
                    _ if labels.len() == 1 => Multiplier::single(&labels[0], expr(v, &sig, &p)?),
                    _ => return schema(&p, "a table keyed by equation label is required"),
                };
                multipliers.insert(n.clone(), m);
            }
        }
        let mut currents = BTreeMap::new();
        if let Some(ct) = table(&root, "currents", "")? {
            for (n, v) in ct {
                currents.insert(n.clone(), current(v, &sig, &join("currents", n))?);
            }
        }
        let mut characteristics = BTreeMap::new();
        if let Some(ct) = table(&root, "characteristics", "")? {
            for (n, v) in ct {
                let p = join("characteristics", n);
                let Value::Table(t) = v else { return schema(&p, "expected a table field -> expression") };
                let mut c = Characteristic::new();
                for (f, e) in t {
                    let fp = join(&p, f);
                    if !(sig.is_field(&Symbol::new(f)) || sig.is_parameter(&Symbol::new(f))) {
                        return schema(&fp, format!("{f} is not a field or parameter"));
                    }
                    c.insert(Symbol::new(f), expr(e, &sig, &fp)?);
                }
                characteristics.insert(n.clone(), c);
            }
        }
        let mut lagrangians = BTreeMap::new();
        if let Some(lt) = table(&root, "lagrangians", "")? {
            for (n, v) in lt {
                lagrangians.insert(n.clone(), expr(v, &sig, &join("lagrangians", n))?);
            }
        }
        let mut valid_at = BTreeMap::new();
        if let Some(vt) = table(&root, "valid_at", "")? {
            for (n, v) in vt {
                let p = join("valid_at", n);
                let Value::Table(t) = v else { return schema(&p, "expected a table constant -> value") };
                let mut vals = BTreeMap::new();
                for (c, x) in t {
                    if !(sig.constants.iter().chain(&sig.exponent_constants).any(|s| s.as_str() == c)) {
                        return schema(&join(&p, c), format!("{c} is not a constant"));
                    }
                    vals.insert(Symbol::new(c), rational(x, &join(&p, c))?);
                }
                valid_at.insert(n.clone(), vals);
            }
        }

        let mut doc = Document {
            name,
            notes,
            system,
            multipliers,
            currents,
            characteristics,
            lagrangians,
            valid_at,
            pairs: Vec::new(),
            euler_lagrange: Vec::new(),
            theorem1: Vec::new(),
            theorem2: Vec::new(),
            noether: Vec::new(),
        };
        if let Some(pt) = table(&root, "pairs", "")? {
            for (q, j) in pt {
                let p = join("pairs", q);
                let j = string(j, &p)?;
                doc.require_multiplier(q, &p)?;
                doc.require_current(j, &p)?;
                doc.pairs.push((q.clone(), j.to_string()));
            }
        }
        if let Some(et) = table(&root, "euler_lagrange", "")? {
            for (l, v) in et {
                let p = join("euler_lagrange", l);
                if !doc.lagrangians.contains_key(l) {
                    return schema(&p, format!("unknown lagrangian {l}"));
                }
                let Value::Table(t) = v else { return schema(&p, "expected a table field -> equation label") };
                for (f, eq) in t {
                    let label = string(eq, &join(&p, f))?;
                    if !labels.iter().any(|x| x.as_str() == label) {
                        return schema(&join(&p, f), format!("unknown equation label {label}"));
                    }
                    doc.euler_lagrange.push((l.clone(), Symbol::new(f), label.to_string()));
                }
            }
        }
        for (p, t) in entries(&root, "theorem1")? {
            let e = Theorem1Entry {
                q: str_field(t, "q", &p)?,
                current: str_field(t, "current", &p)?,
                characteristic: str_field(t, "char", &p)?,
                product_only: matches!(t.get("product_only"), Some(Value::Boolean(true))),
            };
            doc.require_multiplier(&e.q, &p)?;
            doc.require_current(&e.current, &p)?;
            doc.require_characteristic(&e.characteristic, &p)?;
            doc.theorem1.push(e);
        }
        for (p, t) in entries(&root, "theorem2")? {
            let sig = doc.system.sig.clone();
            let opt_current =
                |k: &str| -> Result<Option<Current>> { t.get(k).map(|v| current(v, &sig, &join(&p, k))).transpose() };
            let params = match t.get("params") {
                Some(_) => names(t, "params", &p)?,
                None => sig.parameters.clone(),
            };
            let e = EmbeddingExpectation {
                q: str_field(t, "q", &p)?,
                current: str_field(t, "current", &p)?,
                characteristic: str_field(t, "char", &p)?,
                params,
                scale: match t.get("scale") {
                    Some(v) => rational(v, &join(&p, "scale"))?,
                    None => BigRational::from_integer(1.into()),
                },
                bar: opt_current("bar")?,
                j: opt_current("j")?,
                frozen: opt_current("frozen")?,
            };
            doc.require_multiplier(&e.q, &p)?;
            doc.require_current(&e.current, &p)?;
            doc.require_characteristic(&e.characteristic, &p)?;
            doc.theorem2.push(e);
        }
        for (p, t) in entries(&root, "noether")? {
            let e = NoetherEntry {
                lagrangian: str_field(t, "lagrangian", &p)?,
                characteristic: str_field(t, "char", &p)?,
                k: str_field(t, "k", &p)?,
                current: t.get("current").map(|v| string(v, &join(&p, "current")).map(str::to_string)).transpose()?,
            };
            if !doc.lagrangians.contains_key(&e.lagrangian) {
                return schema(&p, format!("unknown lagrangian {}", e.lagrangian));
            }
            doc.require_characteristic(&e.characteristic, &p)?;
            doc.require_current(&e.k, &p)?;
            if let Some(c) = &e.current {
                doc.require_current(c, &p)?;
            }
            doc.noether.push(e);
        }
        Ok(doc)
    }

    fn require_multiplier(&self, n: &str, path: &str) -> Result<()> {
        if self.multipliers.contains_key(n) {
            Ok(())
        } else {
            schema(path, format!("unknown multiplier {n}"))
        }
    }

    fn require_current(&self, n: &str, path: &str) -> Result<()> {
        if self.currents.contains_key(n) {
            Ok(())
        } else {
            schema(path, format!("unknown current {n}"))
        }
    }

    fn require_characteristic(&self, n: &str, path: &str) -> Result<()> {
        if self.characteristics.contains_key(n) {
            Ok(())
        } else {
            schema(path, format!("unknown characteristic {n}"))
        }
    }

    pub fn multiplier(&self, n: &str) -> Result<&Multiplier> {
        self.multipliers.get(n).ok_or_else(|| Error::UnknownIdentifier(format!("multiplier {n}")))
    }

    pub fn current(&self, n: &str) -> Result<&Current> {
        self.currents.get(n).ok_or_else(|| Error::UnknownIdentifier(format!("current {n}")))
    }

    pub fn characteristic(&self, n: &str) -> Result<&Characteristic> {
        self.characteristics.get(n).ok_or_else(|| Error::UnknownIdentifier(format!("characteristic {n}")))
    }

    pub fn lagrangian(&self, n: &str) -> Result<&Expr> {
        self.lagrangians.get(n).ok_or_else(|| Error::UnknownIdentifier(format!("lagrangian {n}")))
    }

    /// A named multiplier, or inline text: one expression for a single
    /// equation, else `label=expr` entries separated by commas.
    pub fn resolve_multiplier(&self, text: &str) -> Result<Cow<'_, Multiplier>> {
        if let Some(m) = self.multipliers.get(text.trim()) {
            return Ok(Cow::Borrowed(m));
        }
        let parts = split_top_level(text);
        if parts.len() == 1 && !parts[0].contains('=') {
            let [(label, _)] = self.system.equations.as_slice() else {
                return Err(Error::Precondition(format!(
                    "{text:?}: name the equation of each component as label=expr"
                )));
            };
            return Ok(Cow::Owned(Multiplier::single(label, self.expr(parts[0])?)));
        }
        let mut m = BTreeMap::new();
        for (label, e) in assignments(&parts)? {
            let label = Symbol::new(label);
            if self.system.equation(&label).is_none() {
                return Err(Error::UnknownIdentifier(format!("equation {label}")));
            }
            m.insert(label, self.expr(e)?);
        }
        Ok(Cow::Owned(Multiplier(m)))
    }

    /// A named current, or its components separated by commas.
    pub fn resolve_current(&self, text: &str) -> Result<Cow<'_, Current>> {
        if let Some(j) = self.currents.get(text.trim()) {
            return Ok(Cow::Borrowed(j));
        }
        let parts = split_top_level(text);
        let dim = self.system.dim();
        if parts.len() != dim {
            if parts.len() == 1 {
                self.expr(parts[0])?;
            }
            return Err(Error::Precondition(format!("{text:?}: a current needs {dim} components")));
        }
        Ok(Cow::Owned(Current(parts.iter().map(|p| self.expr(p)).collect::<Result<_>>()?)))
    }

    /// A named characteristic, or `field=expr` entries separated by commas.
    pub fn resolve_characteristic(&self, text: &str) -> Result<Cow<'_, Characteristic>> {
        if let Some(c) = self.characteristics.get(text.trim()) {
            return Ok(Cow::Borrowed(c));
        }
        let parts = split_top_level(text);
        if parts.len() == 1 && !parts[0].contains('=') {
            return Err(Error::UnknownIdentifier(format!("characteristic {}", text.trim())));
        }
        let mut c = Characteristic::new();
        for (f, e) in assignments(&parts)? {
            let f = Symbol::new(f);
            if !(self.system.sig.is_field(&f) || self.system.sig.is_parameter(&f)) {
                return Err(Error::UnknownIdentifier(f.to_string()));
            }
            c.insert(f, self.expr(e)?);
        }
        Ok(Cow::Owned(c))
    }

    /// Parses an expression in this document's signature.
    pub fn expr(&self, text: &str) -> Result<Expr> {
        parse_expr(text, &self.system.sig)
    }

    /// Values declared in `[valid_at]` for the named objects, merged.
    pub fn validity(&self, objects: &[&str]) -> BTreeMap<Symbol, BigRational> {
        let mut out = BTreeMap::new();
        for o in objects {
            if let Some(v) = self.valid_at.get(*o) {
                out.extend(v.iter().map(|(k, x)| (k.clone(), x.clone())));
            }
        }
        out
    }

    /// Substitutes values for constants and for parameters (which are then
    /// removed from the signature) throughout the document.
    pub fn specialize(&self, values: &BTreeMap<Symbol, BigRational>) -> Result<Document> {
        if values.is_empty() {
            return Ok(self.clone());
        }
        let sig = &self.system.sig;
        let mut consts = BTreeMap::new();
        let mut params = BTreeMap::new();
        for (k, v) in values {
            if sig.is_parameter(k) {
                params.insert(
                    Atom::Jet(k.clone(), MultiIndex::empty()),
                    Expr::constant(crate::Coefficient::rational(v.clone())),
                );
            } else if sig.constants.contains(k) || sig.exponent_constants.contains(k) {
                consts.insert(k.clone(), v.clone());
            } else {
                return Err(Error::UnknownIdentifier(k.to_string()));
            }
        }
        let negative_ok = |a: &Atom| match a {
            Atom::Coordinate(_) => true,
            Atom::Jet(f, j) => j.is_empty() && sig.is_parameter(f),
            Atom::FunctionApp(..) => false,
        };
        let f = |e: &Expr| -> Result<Expr> { e.substitute(&params)?.specialize_constants(&consts, &negative_ok) };
        let mut new_sig = sig.clone();
        new_sig.parameters.retain(|p| !values.contains_key(p));

        let mut eqs = Vec::new();
        for (l, e) in &self.system.equations {
            eqs.push((l.clone(), f(e)?));
        }
        let mut system = DESystem::new(new_sig.clone(), eqs)?;
        if let Some(s) = &self.system.solved {
            let rules = s
                .rules()
                .iter()
                .map(|r| Ok(Rule { field: r.field.clone(), lhs: r.lhs.clone(), rhs: f(&r.rhs)? }))
                .collect::<Result<Vec<_>>>()?;
            system = system.with_solved(rules)?;
        }
        let mut doc = self.clone();
        doc.system = system;
        doc.multipliers =
            self.multipliers.iter().map(|(k, m)| Ok((k.clone(), m.try_map(f)?))).collect::<Result<_>>()?;
        doc.currents = self.currents.iter().map(|(k, c)| Ok((k.clone(), c.try_map(f)?))).collect::<Result<_>>()?;
        doc.characteristics = self
            .characteristics
            .iter()
            .map(|(k, c)| {
                let mut out = Characteristic::new();
                for (fld, e) in c.iter() {
                    if !values.contains_key(fld) {
                        out.insert(fld.clone(), f(e)?);
                    }
                }
                Ok((k.clone(), out))
            })
            .collect::<Result<_>>()?;
        doc.lagrangians = self.lagrangians.iter().map(|(k, e)| Ok((k.clone(), f(e)?))).collect::<Result<_>>()?;
        let specialized = |c: &Current| c.try_map(f);
        for t in &mut doc.theorem2 {
            t.params.retain(|p| !values.contains_key(p));
            t.bar = t.bar.as_ref().map(specialized).transpose()?;
            t.j = t.j.as_ref().map(specialized).transpose()?;
            t.frozen = t.frozen.as_ref().map(specialized).transpose()?;
        }
        Ok(doc)
    }
}
