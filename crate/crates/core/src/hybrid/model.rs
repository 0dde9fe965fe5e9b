use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::exactnum::{
    parse_rational, rat_to_string, splitting_field, splitting_field_over, Field, NfElem, NumberField, Rational, UPoly,
};
use crate::matalg::Matrix;
use crate::polyideal::{parse_poly, parse_poly_with, MPoly, Mono, MonoOrder, PolyIdeal, Ring};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Hybrid,
    Switching,
    Affine,
}

#[derive(Clone, Debug)]
pub struct Location {
    pub name: String,
    pub flow: Matrix<NfElem>,
    pub initial: PolyIdeal<NfElem>,
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub reset: Matrix<NfElem>,
}

/// A linear hybrid automaton without guards. In switching mode the edge
/// set (all pairs, identity resets) is implicit and `edges` is empty.
#[derive(Clone, Debug)]
pub struct HybridAutomaton {
    pub dim: usize,
    pub field: Arc<NumberField>,
    pub ring: Arc<Ring<NfElem>>,
    pub locations: Vec<Location>,
    pub edges: Vec<Edge>,
    pub mode: Mode,
}

impl HybridAutomaton {
    pub fn variables(&self) -> &[String] {
        &self.ring.vars
    }

    pub fn location_index(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l.name == name)
    }

    /// Edges with the implicit switching edges materialised.
    pub fn effective_edges(&self) -> Vec<Edge> {
        if self.mode != Mode::Switching {
            return self.edges.clone();
        }
        let n = self.locations.len();
        let id = Matrix::identity(&self.field, self.dim);
        let mut out = Vec::new();
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    out.push(Edge {
                        from: p,
                        to: q,
                        reset: id.clone(),
                    });
                }
            }
        }
        out
    }
}

/// A rational number or a number-field element in model files.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawEntry {
    Text(String),
    Number(serde_json::Number),
    Element(RawElement),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawElement {
    pub minpoly: MinPoly,
    /// Root index (see root isolation order) or an isolating box
    /// `[re_lo, re_hi, im_lo, im_hi]`.
    pub root: Value,
    /// Power-basis coordinates.
    pub coords: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawLocation {
    pub name: String,
    pub flow: Vec<Vec<RawEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affine: Option<Vec<RawEntry>>,
    #[serde(default)]
    pub initial: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEdge {
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reset: Option<Vec<Vec<RawEntry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affine: Option<Vec<RawEntry>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    pub variables: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, String>,
    pub locations: Vec<RawLocation>,
    #[serde(default)]
    pub edges: Vec<RawEdge>,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    /// Optional comment carried along untouched.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn default_mode() -> Mode {
    Mode::Hybrid
}

fn json_error(e: serde_json::Error) -> Error {
    let full = e.to_string();
    let tail = format!(" at line {} column {}", e.line(), e.column());
    Error::Parse {
        line: e.line(),
        col: e.column(),
        msg: full.strip_suffix(&tail).unwrap_or(&full).to_string(),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut c = s.chars();
    matches!(c.next(), Some(ch) if ch.is_ascii_alphabetic() || ch == '_')
        && c.all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
}

/// A minimal polynomial: a polynomial string in one variable, or its
/// coefficients with the constant term first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MinPoly {
    Text(String),
    Coeffs(Vec<String>),
}

impl MinPoly {
    pub fn to_upoly(&self) -> Result<UPoly<Rational>> {
        match self {
            MinPoly::Coeffs(c) => Ok(UPoly::from_rationals(
                c.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?,
            )),
            MinPoly::Text(s) => {
                let mut names: Vec<&str> = s
                    .split(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                    .filter(|t| is_identifier(t))
                    .collect();
                names.sort_unstable();
                names.dedup();
                if names.len() > 1 {
                    return Err(Error::Semantic(format!("minpoly '{s}' uses more than one variable")));
                }
                let ring =
                    Ring::<Rational>::with_vars(&(), names.iter().map(|n| n.to_string()).collect(), MonoOrder::Grevlex);
                let p = parse_poly(&ring, s)?;
                let deg = p.total_degree() as usize;
                let mut c = vec![Rational::from_integer(0.into()); deg + 1];
                for (m, q) in p.terms() {
                    c[m.deg() as usize] = q.clone();
                }
                Ok(UPoly::from_rationals(c))
            }
        }
    }
}

/// Field given by a minimal polynomial and a root designation.
pub fn field_from_spec(minpoly: &MinPoly, root: &Value) -> Result<Arc<NumberField>> {
    let m = minpoly.to_upoly()?;
    match root {
        Value::Number(n) => {
            let idx = n
                .as_u64()
                .ok_or_else(|| Error::Semantic("root index must be a non-negative integer".into()))?;
            NumberField::new(&m, idx as usize)
        }
        Value::Array(b) if b.len() == 4 => {
            let mut bx: Vec<Rational> = Vec::new();
            for v in b {
                match v {
                    Value::String(s) => bx.push(parse_rational(s)?),
                    Value::Number(n) if n.is_i64() => bx.push(Rational::from_integer(n.as_i64().unwrap().into())),
                    _ => return Err(Error::Semantic("root box entries must be rational strings".into())),
                }
            }
            let bx: [Rational; 4] = bx.try_into().unwrap();
            NumberField::from_box(&m, &bx)
        }
        _ => Err(Error::Semantic(
            "root must be an index or a box [re_lo, re_hi, im_lo, im_hi]".into(),
        )),
    }
}

/// `(minpoly, root box)` of a field in model-file notation.
pub fn field_spec(k: &NumberField) -> (MinPoly, Value) {
    let ring = Ring::<Rational>::with_vars(&(), vec!["x".to_string()], MonoOrder::Grevlex);
    let terms = k
        .minpoly()
        .coeffs()
        .iter()
        .enumerate()
        .map(|(e, c)| (Mono::var(1, 0, e as u16), c.clone()))
        .collect();
    let mp = MinPoly::Text(MPoly::from_terms(&ring, terms).to_string());
    let b = k.root_box();
    (
        mp,
        Value::Array(b.iter().map(|q| Value::String(rat_to_string(q))).collect()),
    )
}

/// Number-field element in model-file notation (plain string when rational).
pub fn entry_of(x: &NfElem) -> RawEntry {
    match x.to_rational() {
        Some(q) => RawEntry::Text(rat_to_string(&q)),
        None => {
            let (minpoly, root) = field_spec(x.field());
            RawEntry::Element(RawElement {
                minpoly,
                root,
                coords: x.coords().iter().map(rat_to_string).collect(),
            })
        }
    }
}

enum Val {
    Q(Rational),
    K(Vec<Rational>),
}

struct EntryReader<'a> {
    consts: &'a HashMap<String, Rational>,
    base: Option<(RawElement, Arc<NumberField>)>,
}

impl EntryReader<'_> {
    fn read(&mut self, e: &RawEntry, what: &str) -> Result<Val> {
        match e {
            RawEntry::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Val::Q(Rational::from_integer(i.into())))
                } else {
                    Err(Error::Semantic(format!(
                        "{what}: floating-point literal {n} is not algebraic input; write p/q"
                    )))
                }
            }
            RawEntry::Text(s) => {
                let ring = Ring::<Rational>::with_vars(&(), Vec::new(), MonoOrder::Grevlex);
                for tok in s.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_')) {
                    if is_identifier(tok) && !self.consts.contains_key(tok) {
                        return Err(Error::RequiresNumericConstant(format!("{what}: {tok}")));
                    }
                }
                let p = parse_poly_with(&ring, s, self.consts).map_err(|e| match e {
                    Error::Parse { col, msg, .. } => Error::Semantic(format!("{what}: column {col}: {msg}")),
                    other => other,
                })?;
                Ok(Val::Q(
                    p.terms()
                        .first()
                        .map_or_else(|| Rational::from_integer(0.into()), |t| t.1.clone()),
                ))
            }
            RawEntry::Element(el) => {
                let key = RawElement {
                    coords: Vec::new(),
                    ..el.clone()
                };
                match &self.base {
                    Some((k, _)) if *k == key => {}
                    Some((_, f0)) => {
                        let f = field_from_spec(&el.minpoly, &el.root)?;
                        if *f != **f0 {
                            return Err(Error::Semantic(format!(
                                "{what}: all field elements must share one minimal polynomial and root"
                            )));
                        }
                    }
                    None => {
                        let f = field_from_spec(&el.minpoly, &el.root)?;
                        self.base = Some((key, f));
                    }
                }
                let coords = el
                    .coords
                    .iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Val::K(coords))
            }
        }
    }
}

fn square(rows: &[Vec<RawEntry>], d: usize, what: &str) -> Result<()> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::Semantic(format!("{what}: expected a {d}x{d} matrix")));
    }
    Ok(())
}

fn to_elem(k: &Arc<NumberField>, v: &Val) -> NfElem {
    match v {
        Val::Q(q) => NfElem::from_rat(k, q),
        Val::K(c) => NfElem::new(k, c.clone()),
    }
}

impl RawModel {
    pub fn from_json(text: &str) -> Result<RawModel> {
        serde_json::from_str(text).map_err(json_error)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialises")
    }

    fn constants(&self) -> Result<HashMap<String, Rational>> {
        let mut out = HashMap::new();
        for (k, v) in &self.constants {
            if !is_identifier(k) {
                return Err(Error::Semantic(format!("constants: invalid name '{k}'")));
            }
            if self.variables.contains(k) {
                return Err(Error::Semantic(format!("constants: '{k}' is also a variable")));
            }
            let q = parse_rational(v)
                .map_err(|_| Error::Semantic(format!("constants.{k}: expected a rational p/q, got '{v}'")))?;
            out.insert(k.clone(), q);
        }
        Ok(out)
    }

    fn validate_shape(&self) -> Result<()> {
        if self.variables.is_empty() {
            return Err(Error::Semantic("variables: at least one variable is required".into()));
        }
        for (i, v) in self.variables.iter().enumerate() {
            if !is_identifier(v) || v == "theta" {
                return Err(Error::Semantic(format!("variables[{i}]: invalid name '{v}'")));
            }
            if self.variables[..i].contains(v) {
                return Err(Error::Semantic(format!("variables[{i}]: duplicate '{v}'")));
            }
        }
        if self.locations.is_empty() {
            return Err(Error::Semantic("locations: at least one location is required".into()));
        }
        for (i, l) in self.locations.iter().enumerate() {
            if self.locations[..i].iter().any(|m| m.name == l.name) {
                return Err(Error::Semantic(format!("locations[{i}].name: duplicate '{}'", l.name)));
            }
        }
        let d = self.variables.len();
        for (i, l) in self.locations.iter().enumerate() {
            square(&l.flow, d, &format!("locations[{i}].flow"))?;
            if let Some(a) = &l.affine {
                if a.len() != d {
                    return Err(Error::Semantic(format!("locations[{i}].affine: expected {d} entries")));
                }
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            for (end, name) in [("from", &e.from), ("to", &e.to)] {
                if !self.locations.iter().any(|l| &l.name == name) {
                    return Err(Error::Semantic(format!("edges[{i}].{end}: unknown location '{name}'")));
                }
            }
            if let Some(r) = &e.reset {
                square(r, d, &format!("edges[{i}].reset"))?;
            }
            if let Some(a) = &e.affine {
                if a.len() != d {
                    return Err(Error::Semantic(format!("edges[{i}].affine: expected {d} entries")));
                }
            }
        }
        if self.mode == Mode::Switching && !self.edges.is_empty() {
            return Err(Error::Semantic(
                "edges: switching mode has implicit edges; leave the list empty".into(),
            ));
        }
        Ok(())
    }

    fn has_affine(&self) -> bool {
        self.locations.iter().any(|l| l.affine.is_some()) || self.edges.iter().any(|e| e.affine.is_some())
    }

    /// Homogenise affine columns through an extra coordinate fixed to 1.
    pub fn homogenize(&self) -> Result<RawModel> {
        if !self.has_affine() {
            return Ok(self.clone());
        }
        if self.mode == Mode::Switching {
            return Err(Error::Semantic("switching mode does not admit affine terms".into()));
        }
        let mut w = "w".to_string();
        while self.variables.contains(&w) || self.constants.contains_key(&w) {
            w.push('_');
        }
        let d = self.variables.len();
        let zero = || RawEntry::Text("0".into());
        let extend = |rows: &[Vec<RawEntry>], aff: &Option<Vec<RawEntry>>, last: &str| {
            let mut out: Vec<Vec<RawEntry>> = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut r = r.clone();
                    r.push(aff.as_ref().map_or_else(zero, |a| a[i].clone()));
                    r
                })
                .collect();
            let mut lr: Vec<RawEntry> = (0..d).map(|_| zero()).collect();
            lr.push(RawEntry::Text(last.into()));
            out.push(lr);
            out
        };
        let mut out = self.clone();
        out.variables.push(w.clone());
        for l in &mut out.locations {
            l.flow = extend(&l.flow, &l.affine, "0");
            l.affine = None;
            l.initial.push(format!("{w} - 1"));
        }
        for e in &mut out.edges {
            let base = e.reset.clone().unwrap_or_else(|| {
                (0..d)
                    .map(|i| {
                        (0..d)
                            .map(|j| RawEntry::Text(if i == j { "1" } else { "0" }.into()))
                            .collect()
                    })
                    .collect()
            });
            e.reset = Some(extend(&base, &e.affine, "1"));
            e.affine = None;
        }
        Ok(out)
    }

    /// Validate, homogenise, and build the automaton over a field where
    /// every flow (and self-loop reset) splits.
    pub fn build(&self) -> Result<HybridAutomaton> {
        self.validate_shape()?;
        let consts = self.constants()?;
        let h = self.homogenize()?;
        let d = h.variables.len();
        let mut reader = EntryReader {
            consts: &consts,
            base: None,
        };
        let read_matrix = |reader: &mut EntryReader, rows: &[Vec<RawEntry>], what: &str| -> Result<Vec<Val>> {
            let mut out = Vec::with_capacity(d * d);
            for (i, r) in rows.iter().enumerate() {
                for (j, e) in r.iter().enumerate() {
                    out.push(reader.read(e, &format!("{what}[{i}][{j}]"))?);
                }
            }
            Ok(out)
        };
        let mut flows = Vec::new();
        for (i, l) in h.locations.iter().enumerate() {
            flows.push(read_matrix(&mut reader, &l.flow, &format!("locations[{i}].flow"))?);
        }
        let mut resets = Vec::new();
        for (i, e) in h.edges.iter().enumerate() {
            resets.push(match &e.reset {
                Some(r) => Some(read_matrix(&mut reader, r, &format!("edges[{i}].reset"))?),
                None => None,
            });
        }
        let base = reader
            .base
            .as_ref()
            .map_or_else(NumberField::rationals, |b| b.1.clone());

        let in_base = |vals: &[Val]| -> Result<Matrix<NfElem>> {
            Matrix::from_rows(
                &base,
                vals.chunks(d)
                    .map(|r| r.iter().map(|v| to_elem(&base, v)).collect())
                    .collect(),
            )
        };
        let flows0: Vec<Matrix<NfElem>> = flows.iter().map(|f| in_base(f)).collect::<Result<_>>()?;
        let resets0: Vec<Matrix<NfElem>> = resets
            .iter()
            .map(|r| match r {
                Some(r) => in_base(r),
                None => Ok(Matrix::identity(&base, d)),
            })
            .collect::<Result<_>>()?;

        let loc_idx = |n: &str| h.locations.iter().position(|l| l.name == n).unwrap();
        let mut split: Vec<&Matrix<NfElem>> = flows0.iter().collect();
        for (e, r) in h.edges.iter().zip(&resets0) {
            if e.from == e.to {
                split.push(r);
            }
        }
        let (field, img) = ambient_over(&base, &split)?;
        let lift = |m: &Matrix<NfElem>| m.map(&field, |x| x.map_theta(&img));

        let ring = Ring::with_vars(&field, h.variables.clone(), MonoOrder::Grevlex);
        let mut locations = Vec::new();
        for (i, l) in h.locations.iter().enumerate() {
            let mut gens = Vec::new();
            for (j, s) in l.initial.iter().enumerate() {
                let p = parse_initial(&ring, s, &consts)
                    .map_err(|e| Error::Semantic(format!("locations[{i}].initial[{j}]: {e}")))?;
                gens.push(p);
            }
            locations.push(Location {
                name: l.name.clone(),
                flow: lift(&flows0[i]),
                initial: PolyIdeal::new(&ring, gens),
            });
        }
        let edges = h
            .edges
            .iter()
            .zip(&resets0)
            .map(|(e, r)| Edge {
                from: loc_idx(&e.from),
                to: loc_idx(&e.to),
                reset: lift(r),
            })
            .collect();
        if h.mode == Mode::Affine && locations.iter().any(|l| !l.flow.is_zero()) {
            return Err(Error::Semantic("affine mode requires every flow to be zero".into()));
        }
        Ok(HybridAutomaton {
            dim: d,
            field,
            ring,
            locations,
            edges,
            mode: h.mode,
        })
    }
}

fn parse_initial(ring: &Arc<Ring<NfElem>>, s: &str, consts: &HashMap<String, Rational>) -> Result<MPoly<NfElem>> {
    let k = ring.ctx.clone();
    let c: HashMap<String, NfElem> = consts
        .iter()
        .map(|(n, q)| (n.clone(), NfElem::from_rat(&k, q)))
        .collect();
    parse_poly_with(ring, s, &c)
}

/// Field containing `base` in which every characteristic polynomial of
/// `mats` splits, closed under complex conjugation; with the image of the
/// generator of `base`.
pub fn ambient_over(base: &Arc<NumberField>, mats: &[&Matrix<NfElem>]) -> Result<(Arc<NumberField>, NfElem)> {
    let mut prod = UPoly::<NfElem>::one(base);
    for m in mats {
        let cp = m.charpoly();
        prod = prod.mul(&cp).squarefree_part();
    }
    if base.is_rationals() {
        let q = UPoly::from_rationals(prod.coeffs().iter().map(|c| c.to_rational().unwrap()).collect());
        let q = if q.deg() == 0 {
            UPoly::from_rationals(vec![Rational::from_integer(0.into()), Rational::from_integer(1.into())])
        } else {
            q
        };
        let sf = splitting_field(&q)?;
        let img = NfElem::zero(&sf.field);
        return Ok((sf.field, img));
    }
    let (sf, img) = splitting_field_over(&prod)?;
    Ok((sf.field, img))
}

/// Parse a model file.
pub fn parse_automaton(text: &str) -> Result<HybridAutomaton> {
    RawModel::from_json(text)?.build()
}

/// Ideals of a candidate or computed family in machine format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawFamily {
    pub variables: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<RawField>,
    pub locations: Vec<RawFamilyLocation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub real: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RawField {
    pub minpoly: MinPoly,
    pub root: Value,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawFamilyLocation {
    pub name: String,
    pub ideal: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<i64>,
}

impl RawFamily {
    pub fn from_json(text: &str) -> Result<RawFamily> {
        serde_json::from_str(text).map_err(json_error)
    }

    /// Polynomials per location, read in the automaton's field. When the
    /// family names a different field its generator is mapped into the
    /// automaton's field.
    pub fn ideals_in(&self, h: &HybridAutomaton) -> Result<Vec<PolyIdeal<NfElem>>> {
        if self.variables != h.ring.vars {
            return Err(Error::Semantic(format!(
                "candidate variables {:?} differ from the model's {:?}",
                self.variables, h.ring.vars
            )));
        }
        let theta = match &self.field {
            None => None,
            Some(f) => {
                let src = field_from_spec(&f.minpoly, &f.root)?;
                if *src == *h.field {
                    None
                } else {
                    let want = NfElem::theta(&src).approx();
                    let roots =
                        <NfElem as Field>::poly_roots(&src.minpoly().map(&h.field, |c| NfElem::from_rat(&h.field, c)))?;
                    let img = roots
                        .into_iter()
                        .min_by(|a, b| (a.approx() - want).norm().total_cmp(&(b.approx() - want).norm()))
                        .ok_or_else(|| Error::Semantic("candidate field does not embed in the model's field".into()))?;
                    Some(img)
                }
            }
        };
        let mut out = Vec::new();
        for l in &h.locations {
            let raw = self
                .locations
                .iter()
                .find(|r| r.name == l.name)
                .ok_or_else(|| Error::Semantic(format!("candidate has no location '{}'", l.name)))?;
            let mut gens = Vec::new();
            for (j, s) in raw.ideal.iter().enumerate() {
                let p = match &theta {
                    None => parse_poly(&h.ring, s),
                    Some(t) => {
                        let mut c = HashMap::new();
                        c.insert("theta".to_string(), t.clone());
                        parse_poly_with(&h.ring, s, &c)
                    }
                }
                .map_err(|e| Error::Semantic(format!("locations.{}.ideal[{j}]: {e}", l.name)))?;
                gens.push(p);
            }
            out.push(PolyIdeal::new(&h.ring, gens));
        }
        Ok(out)
    }
}

/// Read matrix files (row-major lists of entries) into one field in which
/// every characteristic polynomial splits.
pub fn parse_matrices(texts: &[&str]) -> Result<Vec<Matrix<NfElem>>> {
    let consts = HashMap::new();
    let mut reader = EntryReader {
        consts: &consts,
        base: None,
    };
    let mut vals = Vec::new();
    for (f, text) in texts.iter().enumerate() {
        let rows: Vec<Vec<RawEntry>> = serde_json::from_str(text).map_err(json_error)?;
        let d = rows.len();
        if d == 0 {
            return Err(Error::Semantic(format!("matrix {f}: empty matrix")));
        }
        square(&rows, d, &format!("matrix {f}"))?;
        let mut v = Vec::with_capacity(d * d);
        for (i, r) in rows.iter().enumerate() {
            for (j, e) in r.iter().enumerate() {
                v.push(reader.read(e, &format!("matrix {f}[{i}][{j}]"))?);
            }
        }
        vals.push((d, v));
    }
    let base = reader
        .base
        .as_ref()
        .map_or_else(NumberField::rationals, |b| b.1.clone());
    let mats: Vec<Matrix<NfElem>> = vals
        .iter()
        .map(|(d, v)| {
            Matrix::from_rows(
                &base,
                v.chunks(*d)
                    .map(|r| r.iter().map(|x| to_elem(&base, x)).collect())
                    .collect(),
            )
        })
        .collect::<Result<_>>()?;
    let (field, img) = ambient_over(&base, &mats.iter().collect::<Vec<_>>())?;
    Ok(mats.iter().map(|m| m.map(&field, |x| x.map_theta(&img))).collect())
}

pub fn parse_matrix(text: &str) -> Result<Matrix<NfElem>> {
    Ok(parse_matrices(&[text])?.remove(0))
}

fn raw_matrix(m: &Matrix<NfElem>) -> Vec<Vec<RawEntry>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(entry_of).collect()).collect()
}

impl HybridAutomaton {
    /// The automaton in model-file notation (already homogeneous).
    pub fn to_raw(&self) -> Result<RawModel> {
        let mut locations = Vec::new();
        for l in &self.locations {
            locations.push(RawLocation {
                name: l.name.clone(),
                flow: raw_matrix(&l.flow),
                affine: None,
                initial: l.initial.groebner_basis()?.iter().map(|g| g.to_string()).collect(),
            });
        }
        let edges = if self.mode == Mode::Switching {
            Vec::new()
        } else {
            self.edges
                .iter()
                .map(|e| RawEdge {
                    from: self.locations[e.from].name.clone(),
                    to: self.locations[e.to].name.clone(),
                    reset: Some(raw_matrix(&e.reset)),
                    affine: None,
                })
                .collect()
        };
        Ok(RawModel {
            variables: self.ring.vars.clone(),
            constants: BTreeMap::new(),
            locations,
            edges,
            mode: self.mode,
            note: None,
        })
    }
}
