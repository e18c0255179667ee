//! Descriptors of the irreducible symmetric spaces of noncompact type,
//! their restricted root data, the real-form/envelope pairs and the
//! classification table.
//!
//! Classical multiplicity rules live in code (they are cross-checked against
//! [`crate::matrix_oracle`]); exceptional data, display names, the pair list
//! and the table are versioned JSON files under `data/`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Deserialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exact::{q, Rational};
use crate::rootkit::{build_root_system, Family, RootSystem};

pub const SCHEMA_VERSION: u32 = 1;

const CATALOG_JSON: &str = include_str!("../data/catalog.json");
const JAFFEE_JSON: &str = include_str!("../data/jaffee_pairs.json");
const GOLDEN_JSON: &str = include_str!("../data/golden_table.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CartanLabel {
    AI,
    AII,
    AIII,
    BDI,
    DIII,
    CI,
    CII,
    EI,
    EII,
    EIII,
    EIV,
    EV,
    EVI,
    EVII,
    EVIII,
    EIX,
    FI,
    FII,
    G,
    CA,
    CB,
    CC,
    CD,
    CE6,
    CE7,
    CE8,
    CF4,
    CG2,
}

impl CartanLabel {
    pub const ALL: [CartanLabel; 28] = [
        CartanLabel::AI,
        CartanLabel::AII,
        CartanLabel::AIII,
        CartanLabel::BDI,
        CartanLabel::DIII,
        CartanLabel::CI,
        CartanLabel::CII,
        CartanLabel::EI,
        CartanLabel::EII,
        CartanLabel::EIII,
        CartanLabel::EIV,
        CartanLabel::EV,
        CartanLabel::EVI,
        CartanLabel::EVII,
        CartanLabel::EVIII,
        CartanLabel::EIX,
        CartanLabel::FI,
        CartanLabel::FII,
        CartanLabel::G,
        CartanLabel::CA,
        CartanLabel::CB,
        CartanLabel::CC,
        CartanLabel::CD,
        CartanLabel::CE6,
        CartanLabel::CE7,
        CartanLabel::CE8,
        CartanLabel::CF4,
        CartanLabel::CG2,
    ];

    pub fn as_str(self) -> &'static str {
        use CartanLabel::*;
        match self {
            AI => "AI",
            AII => "AII",
            AIII => "AIII",
            BDI => "BDI",
            DIII => "DIII",
            CI => "CI",
            CII => "CII",
            EI => "EI",
            EII => "EII",
            EIII => "EIII",
            EIV => "EIV",
            EV => "EV",
            EVI => "EVI",
            EVII => "EVII",
            EVIII => "EVIII",
            EIX => "EIX",
            FI => "FI",
            FII => "FII",
            G => "G",
            CA => "cA",
            CB => "cB",
            CC => "cC",
            CD => "cD",
            CE6 => "cE6",
            CE7 => "cE7",
            CE8 => "cE8",
            CF4 => "cF4",
            CG2 => "cG2",
        }
    }

    /// Parameter names in canonical order.
    pub fn param_names(self) -> &'static [char] {
        use CartanLabel::*;
        match self {
            AI | AII | DIII | CI | CA | CB | CC | CD => &['n'],
            AIII | BDI | CII => &['p', 'q'],
            _ => &[],
        }
    }

    pub fn is_classical(self) -> bool {
        !self.param_names().is_empty()
    }
}

impl fmt::Display for CartanLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CartanLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CartanLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::UnknownLabel {
                label: s.to_string(),
                suggestions: suggest(s),
            })
    }
}

/// Integer parameters keyed by name, in canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Params(Vec<(char, u32)>);

impl Params {
    pub fn new(entries: Vec<(char, u32)>) -> Self {
        Params(entries)
    }

    pub fn get(&self, name: char) -> Option<u32> {
        self.0.iter().find(|(c, _)| *c == name).map(|(_, v)| *v)
    }

    pub fn entries(&self) -> &[(char, u32)] {
        &self.0
    }
}

/// Whether a descriptor is an irreducible space or the product `M x conj(M)`
/// of a Hermitian space with its conjugate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    Irreducible,
    ConjugateSquare,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceDescriptor {
    pub cartan_label: CartanLabel,
    pub params: Params,
    pub display_name: String,
    pub rank: usize,
    pub dim: usize,
    pub hermitian: bool,
    pub kind: SpaceKind,
    pub root_family: Family,
    /// Multiplicity by squared root length in the family's frame.
    pub multiplicities: BTreeMap<Rational, u32>,
    /// Canonical label of an isomorphic space keyed by a different table row.
    pub isomorphic_to: Option<String>,
}

impl SpaceDescriptor {
    pub fn canonical_label(&self) -> String {
        let base = base_label(self.cartan_label, &self.params);
        match self.kind {
            SpaceKind::Irreducible => base,
            SpaceKind::ConjugateSquare => format!("prod({base})"),
        }
    }

    pub fn param(&self, name: char) -> Option<u32> {
        self.params.get(name)
    }

    /// `M x conj(M)` for Hermitian `M`.
    pub fn conjugate_square(&self) -> Result<SpaceDescriptor> {
        if !self.hermitian || self.kind != SpaceKind::Irreducible {
            return Err(Error::NotHermitian(self.canonical_label()));
        }
        Ok(SpaceDescriptor {
            display_name: format!("{0} x conj({0})", self.display_name),
            rank: 2 * self.rank,
            dim: 2 * self.dim,
            kind: SpaceKind::ConjugateSquare,
            isomorphic_to: None,
            ..self.clone()
        })
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        json!({
            "label": self.canonical_label(),
            "cartan_label": self.cartan_label.as_str(),
            "params": self.params.entries().iter().map(|(c, v)| (c.to_string(), *v)).collect::<BTreeMap<_, _>>(),
            "display_name": self.display_name,
            "rank": self.rank,
            "dim": self.dim,
            "hermitian": self.hermitian,
            "isomorphic_to": self.isomorphic_to,
        })
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_label())
    }
}

fn base_label(label: CartanLabel, params: &Params) -> String {
    if params.0.is_empty() {
        return label.to_string();
    }
    let ps: Vec<String> = params.0.iter().map(|(c, v)| format!("{c}={v}")).collect();
    format!("{}:{}", label, ps.join(","))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedRootDatum {
    pub space: SpaceDescriptor,
    pub root_system: RootSystem,
    /// `c` with `<H, H>_metric = c * |H|^2` in ambient coordinates.
    pub metric_scale: Rational,
}

impl RestrictedRootDatum {
    pub fn rank(&self) -> usize {
        self.root_system.rank
    }
}

pub fn restricted_datum(space: &SpaceDescriptor) -> RestrictedRootDatum {
    let base = build_root_system(space.root_family, match space.kind {
        SpaceKind::Irreducible => space.rank,
        SpaceKind::ConjugateSquare => space.rank / 2,
    })
    .expect("descriptor carries a valid family/rank pair")
    .with_multiplicities(|n2| space.multiplicities.get(&n2).copied().unwrap_or(0));
    let metric_scale = metric_scale_of(&base);
    let root_system = match space.kind {
        SpaceKind::Irreducible => base,
        SpaceKind::ConjugateSquare => base.direct_sum_with_self(),
    };
    RestrictedRootDatum {
        space: space.clone(),
        root_system,
        metric_scale,
    }
}

/// Rank one: the longest root has unit metric length. Higher rank: the
/// Killing form restricted to the root span, `sum_a m_a a(H)^2 = c |H|^2`.
fn metric_scale_of(rs: &RootSystem) -> Rational {
    let norms = rs.roots.iter().map(|r| r.vector.norm2());
    if rs.rank == 1 {
        norms.max().expect("nonempty root system")
    } else {
        rs.roots
            .iter()
            .map(|r| q(r.mult as i64) * r.vector.norm2())
            .sum::<Rational>()
            / q(rs.rank as i64)
    }
}

struct ClassicalShape {
    family: Family,
    rank: usize,
    mults: Vec<(i64, u32)>,
    hermitian: bool,
    params: Params,
    isomorphic_to: Option<&'static str>,
}

fn out_of_range(label: CartanLabel, reason: &str) -> Error {
    Error::ParameterOutOfRange {
        label: label.to_string(),
        reason: reason.to_string(),
    }
}

fn classical_shape(label: CartanLabel, params: &BTreeMap<char, u32>) -> Result<ClassicalShape> {
    use CartanLabel::*;
    let need = |c: char| {
        params.get(&c).copied().ok_or_else(|| out_of_range(label, &format!("missing parameter {c}")))
    };
    for c in params.keys() {
        if !label.param_names().contains(c) {
            return Err(out_of_range(label, &format!("unexpected parameter {c}")));
        }
    }
    let shape = |family, rank, mults: Vec<(i64, u32)>, hermitian, params: Vec<(char, u32)>| ClassicalShape {
        family,
        rank,
        mults,
        hermitian,
        params: Params(params),
        isomorphic_to: None,
    };
    // Multiplicity zero drops a root length: used for |p - q| = 0.
    let pq_shape = |p: u32, q: u32, long: u32, mid: u32, short_per: u32, hermitian| {
        let r = p.min(q) as usize;
        let d = p.abs_diff(q);
        let family = if d == 0 { Family::C } else { Family::BC };
        shape(family, r, vec![(1, short_per * d), (2, mid), (4, long)], hermitian, vec![('p', p), ('q', q)])
    };
    let mut out = match label {
        AI => {
            let n = need('n')?;
            if n < 2 {
                return Err(out_of_range(label, "needs n >= 2"));
            }
            shape(Family::A, n as usize - 1, vec![(2, 1)], n == 2, vec![('n', n)])
        }
        AII => {
            let n = need('n')?;
            if n < 2 {
                return Err(out_of_range(label, "needs n >= 2"));
            }
            let mut s = shape(Family::A, n as usize - 1, vec![(2, 4)], false, vec![('n', n)]);
            if n == 2 {
                s.isomorphic_to = Some("BDI:p=5,q=1");
            }
            s
        }
        AIII => {
            let (p, q) = (need('p')?, need('q')?);
            if p < 1 || q < 1 {
                return Err(out_of_range(label, "needs p, q >= 1"));
            }
            pq_shape(p, q, 1, 2, 2, true)
        }
        BDI => {
            let (a, b) = (need('p')?, need('q')?);
            let (p, q) = (a.max(b), a.min(b));
            if q < 1 || p + q < 3 {
                return Err(out_of_range(label, "needs p, q >= 1 and p + q >= 3"));
            }
            let hermitian = q == 2 || (p, q) == (2, 1);
            if p == q {
                shape(Family::D, q as usize, vec![(2, 1)], hermitian, vec![('p', p), ('q', q)])
            } else {
                shape(Family::B, q as usize, vec![(1, p - q), (2, 1)], hermitian, vec![('p', p), ('q', q)])
            }
        }
        DIII => {
            let n = need('n')?;
            if n < 3 {
                return Err(out_of_range(label, "needs n >= 3 (so*(4) is not simple)"));
            }
            let r = (n / 2) as usize;
            if n % 2 == 0 {
                shape(Family::C, r, vec![(2, 4), (4, 1)], true, vec![('n', n)])
            } else {
                shape(Family::BC, r, vec![(1, 4), (2, 4), (4, 1)], true, vec![('n', n)])
            }
        }
        CI => {
            let n = need('n')?;
            if n < 1 {
                return Err(out_of_range(label, "needs n >= 1"));
            }
            shape(Family::C, n as usize, vec![(2, 1), (4, 1)], true, vec![('n', n)])
        }
        CII => {
            let (p, q) = (need('p')?, need('q')?);
            if p < 1 || q < 1 {
                return Err(out_of_range(label, "needs p, q >= 1"));
            }
            pq_shape(p, q, 3, 4, 4, false)
        }
        CA => {
            let n = need('n')?;
            if n < 2 {
                return Err(out_of_range(label, "needs n >= 2"));
            }
            let mut s = shape(Family::A, n as usize - 1, vec![(2, 2)], false, vec![('n', n)]);
            if n == 2 {
                s.isomorphic_to = Some("BDI:p=3,q=1");
            }
            s
        }
        CB => {
            let n = need('n')?;
            if n < 3 || n % 2 == 0 {
                return Err(out_of_range(label, "needs odd n >= 3"));
            }
            let mut s = shape(Family::B, (n / 2) as usize, vec![(1, 2), (2, 2)], false, vec![('n', n)]);
            if n == 3 {
                s.isomorphic_to = Some("BDI:p=3,q=1");
            }
            s
        }
        CC => {
            let n = need('n')?;
            if n < 1 {
                return Err(out_of_range(label, "needs n >= 1"));
            }
            let mut s = shape(Family::C, n as usize, vec![(2, 2), (4, 2)], false, vec![('n', n)]);
            if n == 1 {
                s.isomorphic_to = Some("BDI:p=3,q=1");
            }
            s
        }
        CD => {
            let n = need('n')?;
            if n < 6 || n % 2 == 1 {
                return Err(out_of_range(label, "needs even n >= 6 (so(4,C) is not simple)"));
            }
            shape(Family::D, (n / 2) as usize, vec![(2, 2)], false, vec![('n', n)])
        }
        _ => unreachable!("exceptional labels carry static data"),
    };
    out.mults.retain(|&(_, m)| m > 0);
    Ok(out)
}

fn dim_from_roots(family: Family, rank: usize, mults: &BTreeMap<Rational, u32>) -> Result<usize> {
    let rs = build_root_system(family, rank)?.with_multiplicities(|n2| mults.get(&n2).copied().unwrap_or(0));
    Ok(rank + rs.positive_mult_total() as usize)
}

// ---------------------------------------------------------------------------
// Label templates: "BDI:p={p},q=1", "AIII:p={2p},q={2q}", "FII".

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Slot {
    Lit(u32),
    Var { coef: u32, var: char },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelTemplate {
    pub label: CartanLabel,
    pub params: Vec<(char, Slot)>,
}

pub type Bindings = BTreeMap<char, u32>;

impl FromStr for LabelTemplate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let malformed = || Error::MalformedLabel(s.to_string());
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        let label: CartanLabel = head.parse()?;
        let mut params = Vec::new();
        for part in rest.into_iter().flat_map(|r| r.split([',', ':'])) {
            let (name, val) = part.split_once('=').ok_or_else(malformed)?;
            let mut chars = name.chars();
            let name = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => return Err(malformed()),
            };
            let slot = if let Some(inner) = val.strip_prefix('{').and_then(|v| v.strip_suffix('}')) {
                let var = inner.chars().last().ok_or_else(malformed)?;
                let coef = &inner[..inner.len() - var.len_utf8()];
                let coef = if coef.is_empty() { 1 } else { coef.parse().map_err(|_| malformed())? };
                Slot::Var { coef, var }
            } else {
                Slot::Lit(val.parse().map_err(|_| malformed())?)
            };
            params.push((name, slot));
        }
        Ok(LabelTemplate { label, params })
    }
}

impl LabelTemplate {
    /// Binds the template variables against a descriptor's parameters.
    pub fn bind(&self, space: &SpaceDescriptor) -> Option<Bindings> {
        if space.cartan_label != self.label || space.kind != SpaceKind::Irreducible {
            return None;
        }
        let mut b = Bindings::new();
        for (name, slot) in &self.params {
            let v = space.param(*name)?;
            match slot {
                Slot::Lit(l) if *l == v => {}
                Slot::Lit(_) => return None,
                Slot::Var { coef, var } => {
                    if v % coef != 0 {
                        return None;
                    }
                    let x = v / coef;
                    if *b.entry(*var).or_insert(x) != x {
                        return None;
                    }
                }
            }
        }
        Some(b)
    }

    pub fn variables(&self) -> Vec<char> {
        let mut vs: Vec<char> = self
            .params
            .iter()
            .filter_map(|(_, s)| match s {
                Slot::Var { var, .. } => Some(*var),
                Slot::Lit(_) => None,
            })
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn instantiate_label(&self, b: &Bindings) -> Result<String> {
        let mut parts = Vec::new();
        for (name, slot) in &self.params {
            let v = match slot {
                Slot::Lit(l) => *l,
                Slot::Var { coef, var } => {
                    coef * b.get(var).ok_or_else(|| Error::MalformedLabel(format!("unbound {var}")))?
                }
            };
            parts.push(format!("{name}={v}"));
        }
        Ok(if parts.is_empty() {
            self.label.to_string()
        } else {
            format!("{}:{}", self.label, parts.join(","))
        })
    }
}

impl fmt::Display for LabelTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        for (i, (name, slot)) in self.params.iter().enumerate() {
            write!(f, "{}{name}=", if i == 0 { ':' } else { ',' })?;
            match slot {
                Slot::Lit(v) => write!(f, "{v}")?,
                Slot::Var { coef: 1, var } => write!(f, "{{{var}}}")?,
                Slot::Var { coef, var } => write!(f, "{{{coef}{var}}}")?,
            }
        }
        Ok(())
    }
}

/// Row condition such as `n>2` or `p>=q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Guard {
    pub var: char,
    pub op: GuardOp,
    pub rhs: GuardRhs,
    text: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GuardOp {
    Gt,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GuardRhs {
    Int(u32),
    Var(char),
}

impl FromStr for Guard {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let malformed = || Error::MalformedLabel(s.to_string());
        let (lhs, op, rhs) = if let Some((l, r)) = s.split_once(">=") {
            (l, GuardOp::Ge, r)
        } else if let Some((l, r)) = s.split_once('>') {
            (l, GuardOp::Gt, r)
        } else {
            return Err(malformed());
        };
        let var = lhs.trim().chars().next().ok_or_else(malformed)?;
        let rhs = rhs.trim();
        let rhs = match rhs.parse::<u32>() {
            Ok(v) => GuardRhs::Int(v),
            Err(_) => GuardRhs::Var(rhs.chars().next().ok_or_else(malformed)?),
        };
        Ok(Guard {
            var,
            op,
            rhs,
            text: s.to_string(),
        })
    }
}

impl Guard {
    pub fn holds(&self, b: &Bindings) -> bool {
        let Some(&l) = b.get(&self.var) else {
            return false;
        };
        let r = match self.rhs {
            GuardRhs::Int(v) => v,
            GuardRhs::Var(c) => match b.get(&c) {
                Some(&v) => v,
                None => return false,
            },
        };
        match self.op {
            GuardOp::Gt => l > r,
            GuardOp::Ge => l >= r,
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairSource {
    Primary,
    SecondarySource,
    Tautological,
}

impl PairSource {
    pub fn as_str(self) -> &'static str {
        match self {
            PairSource::Primary => "primary",
            PairSource::SecondarySource => "secondary-source",
            PairSource::Tautological => "tautological",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairTemplate {
    Forms { real_form: LabelTemplate, envelope: LabelTemplate },
    /// Every Hermitian `M` sits diagonally in `M x conj(M)`.
    HermitianSquare,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JaffeePair {
    pub template: PairTemplate,
    pub source: PairSource,
}

impl JaffeePair {
    pub fn describe(&self) -> String {
        match &self.template {
            PairTemplate::Forms { real_form, envelope } => format!("{real_form} -> {envelope}"),
            PairTemplate::HermitianSquare => "M -> M x conj(M)".to_string(),
        }
    }

    /// The envelope for `space`, if the pair applies to it.
    pub fn envelope_for(&self, catalog: &Catalog, space: &SpaceDescriptor) -> Option<Result<SpaceDescriptor>> {
        match &self.template {
            PairTemplate::Forms { real_form, envelope } => {
                let b = real_form.bind(space)?;
                Some(envelope.instantiate_label(&b).and_then(|l| catalog.lookup(&l)))
            }
            PairTemplate::HermitianSquare => {
                (space.hermitian && space.kind == SpaceKind::Irreducible).then(|| space.conjugate_square())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Rigid,
    Product,
    Envelope(LabelTemplate),
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Rigid => "rigid",
            Verdict::Product => "product",
            Verdict::Envelope(_) => "envelope",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldenTableRow {
    pub row: u32,
    /// Row heading as printed in the table (ASCII).
    pub space: String,
    pub templates: Vec<LabelTemplate>,
    pub guards: Vec<Guard>,
    pub verdict: Verdict,
    pub envelope_display: Option<String>,
}

impl GoldenTableRow {
    pub fn matches(&self, space: &SpaceDescriptor) -> Option<Bindings> {
        self.templates
            .iter()
            .filter_map(|t| t.bind(space))
            .find(|b| self.guards.iter().all(|g| g.holds(b)))
    }

    /// The verdict cell as printed: `rigid`, `product` or the envelope's name.
    pub fn verdict_text(&self) -> &str {
        match &self.verdict {
            Verdict::Envelope(_) => self.envelope_display.as_deref().unwrap_or("envelope"),
            v => v.kind(),
        }
    }

    /// Valid instances over `1..=max_pq` for `p, q` and `1..=max_n` for `n`.
    pub fn instances(&self, catalog: &Catalog, max_pq: u32, max_n: u32) -> Vec<(SpaceDescriptor, Bindings)> {
        let mut out = Vec::new();
        for t in &self.templates {
            let vars = t.variables();
            let mut grid: Vec<Bindings> = vec![Bindings::new()];
            for v in &vars {
                let hi = if *v == 'n' { max_n } else { max_pq };
                grid = grid
                    .into_iter()
                    .flat_map(|b| {
                        (1..=hi).map(move |x| {
                            let mut b = b.clone();
                            b.insert(*v, x);
                            b
                        })
                    })
                    .collect();
            }
            for b in grid {
                if !self.guards.iter().all(|g| g.holds(&b)) {
                    continue;
                }
                if let Ok(space) = t.instantiate_label(&b).and_then(|l| catalog.lookup(&l)) {
                    // Canonicalization can move parameters; keep only faithful instances.
                    if t.bind(&space).as_ref() == Some(&b) {
                        out.push((space, b));
                    }
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Data files.

#[derive(Deserialize)]
struct CatalogFile {
    schema_version: u32,
    spaces: Vec<SpaceEntry>,
}

#[derive(Deserialize)]
struct SpaceEntry {
    label: String,
    #[serde(default)]
    params: Vec<String>,
    display: String,
    family: Option<Family>,
    rank: Option<usize>,
    #[serde(default)]
    mult: BTreeMap<String, u32>,
    dim: Option<usize>,
    hermitian: Option<bool>,
}

#[derive(Deserialize)]
struct JaffeeFile {
    schema_version: u32,
    pairs: Vec<JaffeeEntry>,
}

#[derive(Deserialize)]
struct JaffeeEntry {
    real_form: String,
    envelope: String,
    source: String,
}

#[derive(Deserialize)]
struct GoldenFile {
    schema_version: u32,
    rows: Vec<GoldenEntry>,
}

#[derive(Deserialize)]
struct GoldenEntry {
    row: u32,
    space: String,
    templates: Vec<String>,
    guards: Vec<String>,
    verdict: String,
    envelope: Option<String>,
    envelope_display: Option<String>,
}

#[derive(Clone, Debug)]
struct Exceptional {
    family: Family,
    rank: usize,
    mults: BTreeMap<Rational, u32>,
    dim: usize,
    hermitian: bool,
}

#[derive(Clone, Debug)]
pub struct Catalog {
    display: BTreeMap<CartanLabel, String>,
    exceptional: BTreeMap<CartanLabel, Exceptional>,
    pairs: Vec<JaffeePair>,
    rows: Vec<GoldenTableRow>,
}

fn data_err(file: &str, reason: impl Into<String>) -> Error {
    Error::Data {
        file: file.to_string(),
        reason: reason.into(),
    }
}

fn check_version(file: &str, v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(data_err(file, format!("schema_version {v}, expected {SCHEMA_VERSION}")));
    }
    Ok(())
}

impl Catalog {
    /// The catalog compiled into the binary.
    pub fn builtin() -> &'static Catalog {
        static CATALOG: OnceLock<Catalog> = OnceLock::new();
        CATALOG.get_or_init(|| {
            Catalog::from_sources(CATALOG_JSON, JAFFEE_JSON, GOLDEN_JSON).expect("embedded data is valid")
        })
    }

    /// Loads `catalog.json`, `jaffee_pairs.json` and `golden_table.json` from `dir`.
    pub fn from_dir(dir: &Path) -> Result<Catalog> {
        let read = |name: &str| {
            std::fs::read_to_string(dir.join(name)).map_err(|e| data_err(name, e.to_string()))
        };
        Catalog::from_sources(&read("catalog.json")?, &read("jaffee_pairs.json")?, &read("golden_table.json")?)
    }

    pub fn from_sources(catalog: &str, jaffee: &str, golden: &str) -> Result<Catalog> {
        let cf: CatalogFile =
            serde_json::from_str(catalog).map_err(|e| data_err("catalog.json", e.to_string()))?;
        check_version("catalog.json", cf.schema_version)?;
        let mut display = BTreeMap::new();
        let mut exceptional = BTreeMap::new();
        for e in cf.spaces {
            let label: CartanLabel = e.label.parse()?;
            let expected: Vec<String> = label.param_names().iter().map(|c| c.to_string()).collect();
            if e.params != expected {
                return Err(data_err("catalog.json", format!("{label}: params {:?}", e.params)));
            }
            if !label.is_classical() {
                let (Some(family), Some(rank), Some(dim), Some(hermitian)) = (e.family, e.rank, e.dim, e.hermitian)
                else {
                    return Err(data_err("catalog.json", format!("{label}: incomplete exceptional entry")));
                };
                let mut mults = BTreeMap::new();
                for (k, m) in &e.mult {
                    let n2: i64 = k
                        .parse()
                        .map_err(|_| data_err("catalog.json", format!("{label}: bad length key {k}")))?;
                    mults.insert(q(n2), *m);
                }
                let computed = dim_from_roots(family, rank, &mults)?;
                if computed != dim {
                    return Err(data_err(
                        "catalog.json",
                        format!("{label}: dim {dim} but roots give {computed}"),
                    ));
                }
                exceptional.insert(label, Exceptional { family, rank, mults, dim, hermitian });
            }
            display.insert(label, e.display);
        }
        for l in CartanLabel::ALL {
            if !display.contains_key(&l) {
                return Err(data_err("catalog.json", format!("missing entry for {l}")));
            }
        }

        let jf: JaffeeFile =
            serde_json::from_str(jaffee).map_err(|e| data_err("jaffee_pairs.json", e.to_string()))?;
        check_version("jaffee_pairs.json", jf.schema_version)?;
        let mut pairs = Vec::new();
        for p in jf.pairs {
            let source = match p.source.as_str() {
                "primary" => PairSource::Primary,
                "secondary-source" => PairSource::SecondarySource,
                "tautological" => PairSource::Tautological,
                other => return Err(data_err("jaffee_pairs.json", format!("unknown source {other}"))),
            };
            let template = if p.real_form == "hermitian" && p.envelope == "product" {
                PairTemplate::HermitianSquare
            } else {
                let real_form: LabelTemplate = p.real_form.parse()?;
                let envelope: LabelTemplate = p.envelope.parse()?;
                let free: Vec<char> = real_form.variables();
                if envelope.variables().iter().any(|v| !free.contains(v)) {
                    return Err(data_err("jaffee_pairs.json", format!("unbound variable in {}", p.envelope)));
                }
                PairTemplate::Forms { real_form, envelope }
            };
            pairs.push(JaffeePair { template, source });
        }

        let gf: GoldenFile =
            serde_json::from_str(golden).map_err(|e| data_err("golden_table.json", e.to_string()))?;
        check_version("golden_table.json", gf.schema_version)?;
        let mut rows = Vec::new();
        for r in gf.rows {
            let verdict = match (r.verdict.as_str(), &r.envelope) {
                ("rigid", None) => Verdict::Rigid,
                ("product", None) => Verdict::Product,
                ("envelope", Some(e)) => Verdict::Envelope(e.parse()?),
                (v, _) => return Err(data_err("golden_table.json", format!("row {}: bad verdict {v}", r.row))),
            };
            rows.push(GoldenTableRow {
                row: r.row,
                space: r.space,
                templates: r.templates.iter().map(|t| t.parse()).collect::<Result<_>>()?,
                guards: r.guards.iter().map(|g| g.parse()).collect::<Result<_>>()?,
                verdict,
                envelope_display: r.envelope_display,
            });
        }

        let cat = Catalog { display, exceptional, pairs, rows };
        // Every exceptional entry must carry a dimension consistent with its roots;
        // checked above. Hermitian envelopes must be Hermitian.
        for p in &cat.pairs {
            if let PairTemplate::Forms { envelope, .. } = &p.template {
                if envelope.variables().is_empty() {
                    let env = cat.lookup(&envelope.instantiate_label(&Bindings::new())?)?;
                    if !env.hermitian {
                        return Err(data_err("jaffee_pairs.json", format!("{env} is not Hermitian")));
                    }
                }
            }
        }
        Ok(cat)
    }

    pub fn jaffee_pairs(&self) -> &[JaffeePair] {
        &self.pairs
    }

    pub fn paper_table(&self) -> &[GoldenTableRow] {
        &self.rows
    }

    pub fn display_template(&self, label: CartanLabel) -> &str {
        &self.display[&label]
    }

    /// Parses `LABEL(:param=val)*`, `prod(LABEL...)`, or a display name.
    pub fn lookup(&self, label: &str) -> Result<SpaceDescriptor> {
        let s = label.trim();
        if let Some(inner) = s.strip_prefix("prod(").and_then(|r| r.strip_suffix(')')) {
            return self.lookup(inner)?.conjugate_square();
        }
        let head = s.split(':').next().unwrap_or("");
        if let Ok(cartan) = head.parse::<CartanLabel>() {
            let mut params = BTreeMap::new();
            if let Some((_, rest)) = s.split_once(':') {
                for part in rest.split([',', ':']) {
                    let (k, v) = part
                        .split_once('=')
                        .ok_or_else(|| Error::MalformedLabel(s.to_string()))?;
                    let mut kc = k.trim().chars();
                    let name = match (kc.next(), kc.next()) {
                        (Some(c), None) => c,
                        _ => return Err(Error::MalformedLabel(s.to_string())),
                    };
                    let v: u32 = v.trim().parse().map_err(|_| Error::MalformedLabel(s.to_string()))?;
                    if params.insert(name, v).is_some() {
                        return Err(Error::MalformedLabel(s.to_string()));
                    }
                }
            }
            return self.build(cartan, &params);
        }
        self.lookup_display(s)
    }

    fn build(&self, cartan: CartanLabel, params: &BTreeMap<char, u32>) -> Result<SpaceDescriptor> {
        if let Some(ex) = self.exceptional.get(&cartan) {
            if !params.is_empty() {
                return Err(out_of_range(cartan, "takes no parameters"));
            }
            return Ok(SpaceDescriptor {
                cartan_label: cartan,
                params: Params::default(),
                display_name: self.display[&cartan].clone(),
                rank: ex.rank,
                dim: ex.dim,
                hermitian: ex.hermitian,
                kind: SpaceKind::Irreducible,
                root_family: ex.family,
                multiplicities: ex.mults.clone(),
                isomorphic_to: None,
            });
        }
        let shape = classical_shape(cartan, params)?;
        let mults: BTreeMap<Rational, u32> = shape.mults.iter().map(|&(n2, m)| (q(n2), m)).collect();
        let dim = dim_from_roots(shape.family, shape.rank, &mults)?;
        Ok(SpaceDescriptor {
            cartan_label: cartan,
            display_name: render_display(&self.display[&cartan], &shape.params),
            params: shape.params,
            rank: shape.rank,
            dim,
            hermitian: shape.hermitian,
            kind: SpaceKind::Irreducible,
            root_family: shape.family,
            multiplicities: mults,
            isomorphic_to: shape.isomorphic_to.map(str::to_string),
        })
    }

    fn lookup_display(&self, s: &str) -> Result<SpaceDescriptor> {
        let norm: String = s.chars().filter(|c| !c.is_whitespace() && *c != '_').map(|c| if c == '×' { 'x' } else { c }).collect();
        let mut first_err = None;
        for (label, template) in &self.display {
            let Some(b) = match_display(template, &norm) else {
                continue;
            };
            match self.build(*label, &b) {
                Ok(d) => return Ok(d),
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
        Err(first_err.unwrap_or_else(|| Error::UnknownLabel {
            label: s.to_string(),
            suggestions: suggest(s),
        }))
    }

    pub fn all_labels(&self) -> Vec<String> {
        self.display.keys().map(|l| l.to_string()).collect()
    }
}

pub fn lookup(label: &str) -> Result<SpaceDescriptor> {
    Catalog::builtin().lookup(label)
}

pub fn paper_table() -> &'static [GoldenTableRow] {
    Catalog::builtin().paper_table()
}

fn render_display(template: &str, params: &Params) -> String {
    let mut out = String::new();
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        out.push_str(&rest[..start]);
        let end = rest[start..].find('}').map(|e| start + e).unwrap_or(rest.len() - 1);
        let slot = &rest[start + 1..end];
        let var = slot.chars().last().unwrap_or('n');
        let coef: u32 = slot[..slot.len() - var.len_utf8()].parse().unwrap_or(1);
        out.push_str(&(coef * params.get(var).unwrap_or(0)).to_string());
        rest = &rest[end + 1..];
    }
    out.push_str(rest);
    out
}

/// Matches a display template such as `SU*({2n})/Sp({n})` against a
/// concrete name, binding each slot to the digit run at its position.
fn match_display(template: &str, name: &str) -> Option<BTreeMap<char, u32>> {
    let mut b = BTreeMap::new();
    let t: Vec<char> = template.chars().collect();
    let n: Vec<char> = name.chars().collect();
    let (mut i, mut j) = (0, 0);
    while i < t.len() {
        if t[i] == '{' {
            let close = t[i..].iter().position(|&c| c == '}')? + i;
            let slot: String = t[i + 1..close].iter().collect();
            let var = slot.chars().last()?;
            let coef: u32 = if slot.len() > 1 { slot[..slot.len() - 1].parse().ok()? } else { 1 };
            let start = j;
            while j < n.len() && n[j].is_ascii_digit() {
                j += 1;
            }
            let v: u32 = n[start..j].iter().collect::<String>().parse().ok()?;
            if !v.is_multiple_of(coef) || *b.entry(var).or_insert(v / coef) != v / coef {
                return None;
            }
            i = close + 1;
        } else {
            if j >= n.len() || n[j] != t[i] {
                return None;
            }
            i += 1;
            j += 1;
        }
    }
    (j == n.len()).then_some(b)
}

fn suggest(s: &str) -> Vec<String> {
    let head = s.split([':', '(']).next().unwrap_or(s);
    let mut scored: Vec<(usize, &str)> = CartanLabel::ALL
        .iter()
        .map(|l| (strsim::levenshtein(&head.to_lowercase(), &l.as_str().to_lowercase()), l.as_str()))
        .filter(|(d, _)| *d <= 2)
        .collect();
    scored.sort();
    scored.into_iter().take(5).map(|(_, l)| l.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ai3_descriptor() {
        let d = lookup("AI:n=3").unwrap();
        assert_eq!((d.rank, d.dim, d.hermitian), (2, 5, false));
        assert_eq!(d.root_family, Family::A);
        assert_eq!(d.display_name, "SL(3,R)/SO(3)");
    }

    #[test]
    fn display_alias_resolves() {
        assert_eq!(lookup("SL(3,R)/SO(3)").unwrap().canonical_label(), "AI:n=3");
        assert_eq!(lookup("Sp(1,2)/Sp(1)xSp(2)").unwrap().canonical_label(), "CII:p=1,q=2");
        assert_eq!(lookup("SU*(8)/Sp(4)").unwrap().canonical_label(), "AII:n=4");
        assert_eq!(lookup("SO(7,C)/SO(7)").unwrap().canonical_label(), "cB:n=7");
        assert_eq!(lookup("SO(8,C)/SO(8)").unwrap().canonical_label(), "cD:n=8");
        assert_eq!(lookup("F4(-20)/SO(9)").unwrap().canonical_label(), "FII");
    }

    #[test]
    fn separators_and_canonical_order() {
        assert_eq!(lookup("CII:p=1:q=2").unwrap().canonical_label(), "CII:p=1,q=2");
        assert_eq!(lookup("BDI:p=1,q=3").unwrap().canonical_label(), "BDI:p=3,q=1");
    }

    #[test]
    fn bad_labels() {
        assert!(matches!(lookup("AI:n=1"), Err(Error::ParameterOutOfRange { .. })));
        match lookup("AJ:n=3") {
            Err(Error::UnknownLabel { suggestions, .. }) => assert!(suggestions.contains(&"AI".to_string())),
            other => panic!("{other:?}"),
        }
        assert!(lookup("AI:m=3").is_err());
        assert!(lookup("EI:n=2").is_err());
    }

    #[test]
    fn rank_one_and_hermitian_flags() {
        let h = lookup("BDI:p=2,q=1").unwrap();
        assert_eq!((h.rank, h.dim), (1, 2));
        assert!(h.hermitian);
        assert!(lookup("CI:n=2").unwrap().hermitian);
        assert!(!lookup("BDI:p=3,q=3").unwrap().hermitian);
        assert!(lookup("BDI:p=5,q=2").unwrap().hermitian);
    }

    #[test]
    fn aiii_21_is_bc1() {
        let d = restricted_datum(&lookup("AIII:p=2,q=1").unwrap());
        let rs = &d.root_system;
        assert_eq!(rs.family, Family::BC);
        assert_eq!(rs.mult_of(&[q(1)]), Some(2));
        assert_eq!(rs.mult_of(&[q(2)]), Some(1));
        assert_eq!(d.metric_scale, q(4));
    }

    #[test]
    fn dim_identity_holds_everywhere() {
        let cat = Catalog::builtin();
        for row in cat.paper_table() {
            for (space, _) in row.instances(cat, 6, 8) {
                let d = restricted_datum(&space);
                assert_eq!(space.dim, space.rank + d.root_system.positive_mult_total() as usize, "{space}");
            }
        }
    }

    #[test]
    fn standard_dimensions() {
        for (l, dim) in [
            ("AI:n=4", 9),
            ("AII:n=3", 14),
            ("AIII:p=3,q=2", 12),
            ("BDI:p=4,q=2", 8),
            ("DIII:n=5", 20),
            ("CI:n=3", 12),
            ("CII:p=2,q=1", 8),
            ("cA:n=3", 8),
            ("cB:n=5", 10),
            ("cC:n=2", 10),
            ("cD:n=6", 15),
        ] {
            assert_eq!(lookup(l).unwrap().dim, dim, "{l}");
        }
    }

    #[test]
    fn table_has_17_rows() {
        let t = paper_table();
        assert_eq!(t.len(), 17);
        assert_eq!(t[9].verdict_text(), "SU(2p,2q)/S(U2pxU2q)");
        assert_eq!(t[1].verdict, Verdict::Rigid);
    }

    #[test]
    fn templates_round_trip() {
        for s in ["BDI:p={p},q=1", "AIII:p={2p},q={2q}", "FII"] {
            let t: LabelTemplate = s.parse().unwrap();
            assert_eq!(t.to_string(), s);
        }
        let t: LabelTemplate = "AIII:p={2p},q={2q}".parse().unwrap();
        let b = Bindings::from([('p', 1), ('q', 2)]);
        assert_eq!(t.instantiate_label(&b).unwrap(), "AIII:p=2,q=4");
    }

    #[test]
    fn schema_mismatch_rejected() {
        let bad = CATALOG_JSON.replacen("\"schema_version\": 1", "\"schema_version\": 2", 1);
        assert!(matches!(
            Catalog::from_sources(&bad, JAFFEE_JSON, GOLDEN_JSON),
            Err(Error::Data { .. })
        ));
    }

    #[test]
    fn low_rank_coincidences_point_at_table_rows() {
        assert_eq!(lookup("cA:n=2").unwrap().isomorphic_to.as_deref(), Some("BDI:p=3,q=1"));
        assert_eq!(lookup("AII:n=2").unwrap().isomorphic_to.as_deref(), Some("BDI:p=5,q=1"));
        assert!(lookup("cD:n=4").is_err());
        assert!(lookup("DIII:n=2").is_err());
    }
}
