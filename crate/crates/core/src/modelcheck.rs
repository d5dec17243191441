//! Finite-level structures over the j-line and their quantifier-free types.
//!
//! An H-point is a base point `τ` together with a [`TorsorLabel`] naming its
//! position in the level-`N` fiber. Points are stored with `τ` moved into the
//! fundamental domain, which makes labels of points over the same j-value
//! comparable. `Γ` acts as the deck transformation `(τ, σ) ↦ (γτ, γ̄σ)`, and
//! leaves every coordinate unchanged.
//!
//! The level-`M` coordinates of a point are the orbit values
//! `j(h_i τ)` over the coset representatives, reordered by the label:
//! coordinate `i` is the value at the representative whose kernel is
//! `σ·C_i`. A type records which coordinates are equal and which are
//! `Φ_M`-related, up to relabeling by `PSL2(Z/N)`, simultaneous on each
//! linked set of points.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cm;
use crate::error::{Error, Result};
use crate::fingal::{
    group_elements, subgroup_coset_bijection, FiniteGroupElement, Flavor, TorsorLabel,
};
use crate::gl2q::{coset_representatives, divisors, GroupElement};
use crate::halfplane::{apply, reduce_point, HalfPlanePoint};
use crate::hecke::{j_of_image, j_of_image_within, j_value, related_at_level};
use crate::modpoly::{phi, phi_eval, term_scale_log2};
use crate::value::{JValue, Truth};

/// Working precision of a structure unless chosen explicitly.
pub const DEFAULT_DIGITS: u32 = 40;
/// Largest `|D|` for which a point is recognized as special by default.
pub const DEFAULT_DISC_BOUND: u64 = 100;

const MAX_JSON_LEVEL: u64 = 64;
const MAX_JSON_DIGITS: u32 = 2000;
const MAX_JSON_POINTS: usize = 256;
const MAX_PSI_LEVEL: u64 = 24;

#[derive(Default)]
struct Interner {
    ids: HashMap<JValue, usize>,
    values: Vec<JValue>,
}

type OrbitKey = (HalfPlanePoint, u64, u32);

static VALUES: Mutex<Option<Interner>> = Mutex::new(None);
static RELATIONS: Mutex<Option<HashMap<(usize, usize, u64), Truth>>> = Mutex::new(None);
static ORBITS: Mutex<Option<HashMap<OrbitKey, Arc<Vec<usize>>>>> = Mutex::new(None);
static TWISTS: Mutex<Option<HashMap<u64, Arc<TwistTable>>>> = Mutex::new(None);

fn intern(v: JValue) -> usize {
    let mut guard = VALUES.lock().unwrap_or_else(|e| e.into_inner());
    let table = guard.get_or_insert_with(Interner::default);
    if let Some(&id) = table.ids.get(&v) {
        return id;
    }
    let id = table.values.len();
    table.values.push(v.clone());
    table.ids.insert(v, id);
    id
}

fn value(id: usize) -> JValue {
    VALUES
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .as_ref()
        .expect("interned value")
        .values[id]
        .clone()
}

/// Whether the values `a` and `b` are equal (`m = 1`) or `Φ_m`-related.
fn relation(a: usize, b: usize, m: u64) -> Result<Truth> {
    if m == 1 && a == b {
        return Ok(Truth::True);
    }
    let key = (a.min(b), a.max(b), m);
    if let Some(&t) = RELATIONS
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .get_or_insert_with(HashMap::new)
        .get(&key)
    {
        return Ok(t);
    }
    let (x, y) = (value(a), value(b));
    let t = if m == 1 {
        x.certified_equal(&y)
    } else {
        related_at_level(&x, &y, m)?
    };
    RELATIONS
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .get_or_insert_with(HashMap::new)
        .insert(key, t);
    Ok(t)
}

/// Interned `j(h_k τ)` over the level-`m` representatives.
fn orbit_ids(tau: &HalfPlanePoint, m: u64, digits: u32) -> Result<Arc<Vec<usize>>> {
    let key = (tau.clone(), m, digits);
    if let Some(ids) = ORBITS
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .get_or_insert_with(HashMap::new)
        .get(&key)
    {
        return Ok(ids.clone());
    }
    let values = orbit_values(tau, m, digits)?;
    let ids = Arc::new(values.into_iter().map(intern).collect::<Vec<_>>());
    ORBITS
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .get_or_insert_with(HashMap::new)
        .insert(key, ids.clone());
    Ok(ids)
}

/// `j(h_k τ)` over the level-`m` representatives, exact where possible. A
/// numeric `τ` counts as known to its stated digits, so a rounded
/// `Γ`-translate has the same values.
fn orbit_values(tau: &HalfPlanePoint, m: u64, digits: u32) -> Result<Vec<JValue>> {
    coset_representatives(m)
        .representatives()
        .par_iter()
        .map(|h| match tau {
            HalfPlanePoint::Exact(_) => j_value(&apply(h, tau), digits),
            HalfPlanePoint::Numeric(p) => Ok(JValue::Approx(j_of_image_within(
                h,
                tau,
                digits,
                Some(p.digits()),
            )?)),
        })
        .collect()
}

/// `perm[i]` = index of `σ·C_i` at level `m`; the identity at level 1.
fn label_permutation(sigma: &FiniteGroupElement, m: u64) -> Result<Vec<usize>> {
    if m == 1 {
        return Ok(vec![0]);
    }
    subgroup_coset_bijection(m)?.permutation(&sigma.reduce(m)?)
}

/// For each `ρ ∈ PSL2(Z/N)` in canonical order, where relabeling by `ρ`
/// sends each within-point coordinate offset.
struct TwistTable {
    moves: Vec<Vec<usize>>,
}

fn twist_table(n: u64) -> Result<Arc<TwistTable>> {
    if let Some(t) = TWISTS
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .get_or_insert_with(HashMap::new)
        .get(&n)
    {
        return Ok(t.clone());
    }
    let blocks = block_sizes(n);
    let moves = group_elements(n, Flavor::Psl)
        .iter()
        .map(|rho| {
            // new coordinate i is old coordinate perm[i]
            let mut moved = Vec::new();
            let mut offset = 0;
            for &(m, size) in &blocks {
                let perm = label_permutation(rho, m)?;
                let mut inverse = vec![0; size];
                for (i, &k) in perm.iter().enumerate() {
                    inverse[k] = offset + i;
                }
                moved.extend(inverse);
                offset += size;
            }
            Ok(moved)
        })
        .collect::<Result<Vec<_>>>()?;
    let t = Arc::new(TwistTable { moves });
    TWISTS
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .get_or_insert_with(HashMap::new)
        .insert(n, t.clone());
    Ok(t)
}

fn block_sizes(n: u64) -> Vec<(u64, usize)> {
    divisors(n)
        .into_iter()
        .map(|m| (m, crate::gl2q::psi(m) as usize))
        .collect()
}

/// An H-point: a base point in the fundamental domain and a fiber label.
#[derive(Clone, Debug)]
pub struct HPoint {
    tau: HalfPlanePoint,
    label: TorsorLabel,
    j: JValue,
    special: Option<BigInt>,
}

impl HPoint {
    pub fn tau(&self) -> &HalfPlanePoint {
        &self.tau
    }

    pub fn label(&self) -> &TorsorLabel {
        &self.label
    }

    pub fn j(&self) -> &JValue {
        &self.j
    }

    /// The discriminant of a special point.
    pub fn special(&self) -> Option<&BigInt> {
        self.special.as_ref()
    }
}

/// A finite set of H-points at level `N`. Structures are values; every
/// operation that changes one returns or mutates a copy owned by the caller.
#[derive(Clone, Debug)]
pub struct FiniteLevelStructure {
    level: u64,
    digits: u32,
    disc_bound: u64,
    points: Vec<HPoint>,
}

impl FiniteLevelStructure {
    pub fn new(level: u64) -> Result<Self> {
        Self::with_precision(level, DEFAULT_DIGITS, DEFAULT_DISC_BOUND)
    }

    /// An empty structure evaluating j-values to `digits` places and
    /// recognizing special points with `|D| ≤ disc_bound`.
    pub fn with_precision(level: u64, digits: u32, disc_bound: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::Domain("level must be positive".into()));
        }
        if digits == 0 {
            return Err(Error::PrecisionTooLow("digits must be positive".into()));
        }
        Ok(Self {
            level,
            digits,
            disc_bound,
            points: Vec::new(),
        })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn disc_bound(&self) -> u64 {
        self.disc_bound
    }

    pub fn points(&self) -> &[HPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> Option<&HPoint> {
        self.points.get(i)
    }

    /// Adds the H-point `(τ, σ)` and returns its index. It is stored as
    /// `(rτ, r̄σ)` with `rτ` in the fundamental domain.
    pub fn add_point(&mut self, tau: &HalfPlanePoint, label: TorsorLabel) -> Result<usize> {
        if label.level() != self.level {
            return Err(Error::LevelMismatch(self.level, label.level()));
        }
        let (r, base) = reduce_point(tau)?;
        let r_bar = FiniteGroupElement::from_gamma(&r, self.level, Flavor::Psl)?;
        let label = TorsorLabel::new(r_bar.multiply(label.element())?)?;
        let j = orbit_ids(&base, 1, self.digits).map(|ids| value(ids[0]))?;
        let special = cm::special_discriminant(&base, self.disc_bound);
        self.points.push(HPoint {
            tau: base,
            label,
            j,
            special,
        });
        Ok(self.points.len() - 1)
    }

    /// Adds `τ` with the identity label.
    pub fn add_standard_point(&mut self, tau: &HalfPlanePoint) -> Result<usize> {
        self.add_point(tau, TorsorLabel::identity(self.level))
    }

    /// Every label right-multiplied by `σ`.
    pub fn twisted(&self, sigma: &FiniteGroupElement) -> Result<Self> {
        let mut out = self.clone();
        for p in &mut out.points {
            p.label = p.label.act(sigma)?;
        }
        Ok(out)
    }

    /// The deck action of `γ ∈ Γ` on every point.
    pub fn translated(&self, gamma: &GroupElement) -> Result<Self> {
        let g_bar = FiniteGroupElement::from_gamma(gamma, self.level, Flavor::Psl)?;
        let mut out = Self {
            points: Vec::new(),
            ..self.clone()
        };
        for p in &self.points {
            let label = TorsorLabel::new(g_bar.multiply(p.label.element())?)?;
            out.add_point(&apply(gamma, &p.tau), label)?;
        }
        Ok(out)
    }

    /// The same points with labels reduced to the divisor level `m`.
    pub fn truncate(&self, m: u64) -> Result<Self> {
        let mut out = Self {
            level: m,
            points: Vec::new(),
            ..self.clone()
        };
        for p in &self.points {
            let label = crate::fingal::truncate(&p.label, m)?;
            out.points.push(HPoint { label, ..p.clone() });
        }
        Ok(out)
    }

    /// The level-`m` coordinates of point `p`, for `m` dividing the level.
    pub fn coordinates(&self, p: usize, m: u64) -> Result<Vec<JValue>> {
        Ok(self.coordinate_ids(p, m)?.into_iter().map(value).collect())
    }

    fn coordinate_ids(&self, p: usize, m: u64) -> Result<Vec<usize>> {
        if m == 0 || !self.level.is_multiple_of(m) {
            return Err(Error::NotADivisor {
                target: m,
                source_level: self.level,
            });
        }
        let point = self
            .points
            .get(p)
            .ok_or_else(|| out_of_range(p, self.len()))?;
        let base = orbit_ids(&point.tau, m, self.digits)?;
        let perm = label_permutation(point.label.element(), m)?;
        Ok(perm.into_iter().map(|i| base[i]).collect())
    }

    pub fn to_json(&self) -> String {
        let points = self
            .points
            .iter()
            .map(|p| {
                let e = p.label.element().entries();
                PointJson {
                    tau: p.tau.clone(),
                    label: [[e[0] as i64, e[1] as i64], [e[2] as i64, e[3] as i64]],
                    j: Some(p.j.to_string()),
                    exact: Some(p.j.is_exact()),
                    special: p.special.as_ref().map(|d| d.to_string()),
                }
            })
            .collect();
        let doc = StructureJson {
            level: self.level,
            digits: self.digits,
            disc_bound: Some(self.disc_bound),
            points,
        };
        serde_json::to_string_pretty(&doc).expect("structure serializes")
    }

    /// Rebuilds a structure from [`parse_structure_json`] output; j-values
    /// and special flags are recomputed.
    pub fn from_spec(spec: &StructureSpec) -> Result<Self> {
        let mut s = Self::with_precision(spec.level, spec.digits, spec.disc_bound)?;
        for (tau, label) in &spec.points {
            s.add_point(tau, *label)?;
        }
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_spec(&parse_structure_json(text)?)
    }
}

fn out_of_range(i: usize, len: usize) -> Error {
    Error::Precondition(format!("point index {i} out of range for {len} points"))
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    tau: HalfPlanePoint,
    label: [[i64; 2]; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    j: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exact: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    special: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct StructureJson {
    level: u64,
    digits: u32,
    #[serde(default)]
    disc_bound: Option<u64>,
    points: Vec<PointJson>,
}

/// A validated structure description: what JSON input determines before
/// any j-value is evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureSpec {
    pub level: u64,
    pub digits: u32,
    pub disc_bound: u64,
    pub points: Vec<(HalfPlanePoint, TorsorLabel)>,
}

/// Parses and validates the JSON structure form without evaluating it.
pub fn parse_structure_json(text: &str) -> Result<StructureSpec> {
    let doc: StructureJson = serde_json::from_str(text)?;
    if doc.level == 0 || doc.level > MAX_JSON_LEVEL {
        return Err(Error::Parse(format!(
            "level {} outside 1..={MAX_JSON_LEVEL}",
            doc.level
        )));
    }
    if doc.digits == 0 || doc.digits > MAX_JSON_DIGITS {
        return Err(Error::Parse(format!(
            "digits {} outside 1..={MAX_JSON_DIGITS}",
            doc.digits
        )));
    }
    if doc.points.len() > MAX_JSON_POINTS {
        return Err(Error::Parse(format!("more than {MAX_JSON_POINTS} points")));
    }
    let points = doc
        .points
        .into_iter()
        .map(|p| {
            let [[a, b], [c, d]] = p.label;
            let e = FiniteGroupElement::new(doc.level, [a, b, c, d], Flavor::Psl)
                .map_err(|e| Error::Parse(format!("bad label: {e}")))?;
            Ok((p.tau, TorsorLabel::new(e)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StructureSpec {
        level: doc.level,
        digits: doc.digits,
        disc_bound: doc.disc_bound.unwrap_or(DEFAULT_DISC_BOUND),
        points,
    })
}

/// The level-`N` quantifier-free type of a tuple of H-points.
///
/// Coordinates are numbered point by point, and within a point by divisor
/// `M` of `N` ascending, then by subgroup index. Points linked by some
/// equality or relation form a component; each component's pattern is
/// stored in its least form over simultaneous relabeling of its points by
/// `PSL2(Z/N)`. Unlinked components are relabeled independently.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteLevelType {
    level: u64,
    arity: usize,
    special: Vec<Option<BigInt>>,
    equal: Vec<(usize, usize)>,
    related: Vec<(usize, usize, u64)>,
}

impl FiniteLevelType {
    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Discriminants of the special points, `None` for the others.
    pub fn special(&self) -> &[Option<BigInt>] {
        &self.special
    }

    /// Coordinates per point.
    pub fn coordinates_per_point(&self) -> usize {
        block_sizes(self.level).iter().map(|b| b.1).sum()
    }

    /// The position of coordinate `i` of the level-`m` block of `point`.
    pub fn index(&self, point: usize, m: u64, i: usize) -> Option<usize> {
        let mut offset = point * self.coordinates_per_point();
        for (d, size) in block_sizes(self.level) {
            if d == m {
                return (point < self.arity && i < size).then_some(offset + i);
            }
            offset += size;
        }
        None
    }

    /// Pairs `a < b` of equal coordinates.
    pub fn equalities(&self) -> &[(usize, usize)] {
        &self.equal
    }

    /// Triples `(a, b, M)` with `a ≤ b`, `M > 1`, and `Φ_M` vanishing.
    pub fn relations(&self) -> &[(usize, usize, u64)] {
        &self.related
    }

    pub fn are_equal(&self, a: usize, b: usize) -> bool {
        a == b || self.equal.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    pub fn are_related(&self, a: usize, b: usize, m: u64) -> bool {
        self.related.binary_search(&(a.min(b), a.max(b), m)).is_ok()
    }

    /// The type at a divisor level: coordinates and relations of levels not
    /// dividing `m` are forgotten.
    pub fn truncate(&self, m: u64) -> Result<Self> {
        if m == 0 || !self.level.is_multiple_of(m) {
            return Err(Error::NotADivisor {
                target: m,
                source_level: self.level,
            });
        }
        let mut map = Vec::new();
        let mut next = 0;
        for _ in 0..self.arity {
            for (d, size) in block_sizes(self.level) {
                for _ in 0..size {
                    map.push(m.is_multiple_of(d).then(|| {
                        next += 1;
                        next - 1
                    }));
                }
            }
        }
        let equal = self
            .equal
            .iter()
            .filter_map(|&(a, b)| Some((map[a]?, map[b]?)))
            .collect();
        let related = self
            .related
            .iter()
            .filter(|r| m.is_multiple_of(r.2))
            .filter_map(|&(a, b, k)| Some((map[a]?, map[b]?, k)))
            .collect();
        canonical_type(m, self.arity, self.special.clone(), equal, related)
    }
}

impl fmt::Display for FiniteLevelType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "level {} arity {}", self.level, self.arity)?;
        for (p, s) in self.special.iter().enumerate() {
            if let Some(d) = s {
                write!(f, "; point {p} special D={d}")?;
            }
        }
        write!(
            f,
            "; {} equalities, {} relations",
            self.equal.len(),
            self.related.len()
        )
    }
}

fn canonical_type(
    level: u64,
    arity: usize,
    special: Vec<Option<BigInt>>,
    equal: Vec<(usize, usize)>,
    related: Vec<(usize, usize, u64)>,
) -> Result<FiniteLevelType> {
    let table = twist_table(level)?;
    let per = table.moves[0].len();
    let mut parent: Vec<usize> = (0..arity).collect();
    let links = equal
        .iter()
        .map(|&(a, b)| (a, b))
        .chain(related.iter().map(|&(a, b, _)| (a, b)));
    for (a, b) in links {
        let (ra, rb) = (find(&mut parent, a / per), find(&mut parent, b / per));
        parent[ra] = rb;
    }
    let roots: Vec<usize> = (0..arity).map(|p| find(&mut parent, p)).collect();
    let (mut out_equal, mut out_related) = (Vec::new(), Vec::new());
    let mut done = vec![false; arity];
    for p in 0..arity {
        if std::mem::replace(&mut done[roots[p]], true) {
            continue;
        }
        let inside = |c: usize| roots[c / per] == roots[p];
        let e: Vec<_> = equal.iter().copied().filter(|&(a, _)| inside(a)).collect();
        let r: Vec<_> = related
            .iter()
            .copied()
            .filter(|&(a, _, _)| inside(a))
            .collect();
        let mut best: Option<(Vec<(usize, usize)>, Vec<(usize, usize, u64)>)> = None;
        for moved in &table.moves {
            let to = |c: usize| (c / per) * per + moved[c % per];
            let pair = |a: usize, b: usize| (to(a).min(to(b)), to(a).max(to(b)));
            let mut e2: Vec<_> = e.iter().map(|&(a, b)| pair(a, b)).collect();
            let mut r2: Vec<_> = r
                .iter()
                .map(|&(a, b, m)| {
                    let (x, y) = pair(a, b);
                    (x, y, m)
                })
                .collect();
            e2.sort_unstable();
            r2.sort_unstable();
            if best.as_ref().is_none_or(|b| (&e2, &r2) < (&b.0, &b.1)) {
                best = Some((e2, r2));
            }
        }
        let (e, r) = best.expect("the group is nonempty");
        out_equal.extend(e);
        out_related.extend(r);
    }
    out_equal.sort_unstable();
    out_related.sort_unstable();
    Ok(FiniteLevelType {
        level,
        arity,
        special,
        equal: out_equal,
        related: out_related,
    })
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn undecided(what: &str, a: usize, b: usize) -> Error {
    Error::Indeterminate(format!("{what} between coordinates {a} and {b}"))
}

/// The level-`n` type of the points `tuple` of `s`. An undecidable numeric
/// comparison is an error, never a guess.
pub fn finite_type(s: &FiniteLevelStructure, tuple: &[usize], n: u64) -> Result<FiniteLevelType> {
    if n == 0 || !s.level.is_multiple_of(n) {
        return Err(Error::NotADivisor {
            target: n,
            source_level: s.level,
        });
    }
    let mut ids = Vec::new();
    let mut special = Vec::new();
    for &p in tuple {
        let point = s.points.get(p).ok_or_else(|| out_of_range(p, s.len()))?;
        special.push(point.special.clone());
        for m in divisors(n) {
            ids.extend(s.coordinate_ids(p, m)?);
        }
    }
    let levels: Vec<u64> = divisors(n).into_iter().filter(|&m| m > 1).collect();
    let mut equal = Vec::new();
    let mut related = Vec::new();
    for a in 0..ids.len() {
        for b in a..ids.len() {
            if a < b {
                match relation(ids[a], ids[b], 1)? {
                    Truth::True => equal.push((a, b)),
                    Truth::False => {}
                    Truth::Indeterminate => return Err(undecided("equality", a, b)),
                }
            }
            for &m in &levels {
                match relation(ids[a], ids[b], m)? {
                    Truth::True => related.push((a, b, m)),
                    Truth::False => {}
                    Truth::Indeterminate => return Err(undecided("relation", a, b)),
                }
            }
        }
    }
    canonical_type(n, tuple.len(), special, equal, related)
}

/// Result of a successful back-and-forth step.
#[derive(Clone, Debug)]
pub struct Extension {
    /// The target, with the image adjoined when it was not already present.
    pub target: FiniteLevelStructure,
    pub image: usize,
    /// The `σ` with image label equal to the new point's label times `σ`.
    pub twist: FiniteGroupElement,
    pub adjoined: bool,
}

/// Extends the partial map `partial` (source index, target index) to the
/// source point `new`, preserving the level-`N` type of the domain.
///
/// Candidates carry `new`'s label times some `σ ∈ PSL2(Z/N)`. They are
/// tried in this order: points already in the target (those over `new`'s
/// j-value first), a fresh point over `new`'s j-value, then fresh points
/// over Hecke neighbours of the image. Within each pass the identity is
/// tried first and the rest in canonical order.
/// Longest Hecke word tried when looking for an image off the new point's j-value.
const HECKE_DEPTH: usize = 3;

pub fn extend_partial_iso(
    source: &FiniteLevelStructure,
    target: &FiniteLevelStructure,
    partial: &[(usize, usize)],
    new: usize,
) -> Result<Option<Extension>> {
    if source.level != target.level {
        return Err(Error::LevelMismatch(source.level, target.level));
    }
    let n = source.level;
    let np = source
        .points
        .get(new)
        .ok_or_else(|| out_of_range(new, source.len()))?;
    if partial.iter().any(|&(s, _)| s == new) {
        return Err(Error::Precondition(format!(
            "point {new} is already in the domain"
        )));
    }
    let mut domain: Vec<usize> = partial.iter().map(|p| p.0).collect();
    let mut image: Vec<usize> = partial.iter().map(|p| p.1).collect();
    if let Some(&t) = image.iter().find(|&&t| t >= target.len()) {
        return Err(out_of_range(t, target.len()));
    }
    if finite_type(source, &domain, n)? != finite_type(target, &image, n)? {
        return Err(Error::Precondition(
            "the partial map does not preserve the type".into(),
        ));
    }
    domain.push(new);
    let wanted = finite_type(source, &domain, n)?;

    let identity = FiniteGroupElement::identity(n, Flavor::Psl);
    let twists: Vec<FiniteGroupElement> = std::iter::once(identity)
        .chain(
            group_elements(n, Flavor::Psl)
                .iter()
                .copied()
                .filter(|g| *g != identity),
        )
        .collect();

    let mut same_j = Vec::new();
    for (t, tp) in target.points.iter().enumerate() {
        match tp.j.certified_equal(&np.j) {
            Truth::True => same_j.push(t),
            Truth::False => {}
            Truth::Indeterminate => return Err(undecided("j-equality", new, t)),
        }
    }

    let mut existing = same_j.clone();
    existing.extend((0..target.len()).filter(|t| !same_j.contains(t) && !image.contains(t)));
    for sigma in &twists {
        let label = np.label.act(sigma)?;
        for &t in existing
            .iter()
            .filter(|&&t| target.points[t].label == label)
        {
            image.push(t);
            if finite_type(target, &image, n)? == wanted {
                return Ok(Some(Extension {
                    target: target.clone(),
                    image: t,
                    twist: *sigma,
                    adjoined: false,
                }));
            }
            image.pop();
        }
    }

    let tau = same_j.first().map_or(&np.tau, |&t| &target.points[t].tau);
    if let Some(e) = adjoin(np, target, &mut image, tau, &twists, &wanted)? {
        return Ok(Some(e));
    }

    // The image may sit over a different j-value: search the Hecke
    // neighbours of the image points, nearest first.
    let steps: Vec<GroupElement> = divisors(n)
        .into_iter()
        .filter(|&m| m > 1)
        .flat_map(|m| coset_representatives(m).representatives().to_vec())
        .collect();
    let mut seen: Vec<JValue> = target.points.iter().map(|p| p.j.clone()).collect();
    seen.push(np.j.clone());
    let mut layer: Vec<HalfPlanePoint> = image
        .iter()
        .map(|&p| target.points[p].tau.clone())
        .collect();
    for _ in 0..HECKE_DEPTH {
        let mut next = Vec::new();
        for tau in layer
            .iter()
            .flat_map(|tau| steps.iter().map(move |g| apply(g, tau)))
        {
            let j = j_value(&tau, target.digits)?;
            if seen.iter().any(|s| s.certified_equal(&j) != Truth::False) {
                continue;
            }
            seen.push(j);
            if let Some(e) = adjoin(np, target, &mut image, &tau, &twists, &wanted)? {
                return Ok(Some(e));
            }
            next.push(tau);
        }
        layer = next;
    }
    Ok(None)
}

/// Adjoins a point over `tau` with label `np.label * σ` for the first `σ`
/// that realises `wanted`.
fn adjoin(
    np: &HPoint,
    target: &FiniteLevelStructure,
    image: &mut Vec<usize>,
    tau: &HalfPlanePoint,
    twists: &[FiniteGroupElement],
    wanted: &FiniteLevelType,
) -> Result<Option<Extension>> {
    let n = target.level;
    for sigma in twists {
        let mut extended = target.clone();
        let t = extended.add_point(tau, np.label.act(sigma)?)?;
        image.push(t);
        if finite_type(&extended, image, n)? == *wanted {
            let twist = np.label.difference(&extended.points[t].label)?;
            return Ok(Some(Extension {
                target: extended,
                image: t,
                twist,
                adjoined: true,
            }));
        }
        image.pop();
    }
    Ok(None)
}

/// Pairs of points with equal j-value and distinct labels: the pairs the
/// standard-fibres condition forbids.
pub fn sf_violations(s: &FiniteLevelStructure) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for a in 0..s.len() {
        for b in a + 1..s.len() {
            match s.points[a].j.certified_equal(&s.points[b].j) {
                Truth::True if s.points[a].label != s.points[b].label => out.push((a, b)),
                Truth::Indeterminate => return Err(undecided("j-equality", a, b)),
                _ => {}
            }
        }
    }
    Ok(out)
}

pub fn satisfies_sf(s: &FiniteLevelStructure) -> Result<bool> {
    Ok(sf_violations(s)?.is_empty())
}

/// Identifies points with equal j-value and equal label, keeping the first.
pub fn sf_identify(s: &FiniteLevelStructure) -> Result<FiniteLevelStructure> {
    let mut out = FiniteLevelStructure {
        points: Vec::new(),
        ..s.clone()
    };
    for (a, p) in s.points.iter().enumerate() {
        let mut duplicate = false;
        for q in &out.points {
            match q.j.certified_equal(&p.j) {
                Truth::True if q.label == p.label => duplicate = true,
                Truth::Indeterminate => return Err(undecided("j-equality", a, a)),
                _ => {}
            }
        }
        if !duplicate {
            out.points.push(p.clone());
        }
    }
    Ok(out)
}

/// Two points over one generic j-value with labels `1` and `T = [[1,1],[0,1]]`:
/// realizable in the cover model, excluded by the standard-fibres condition.
pub fn nonstandard_fiber_witness(n: u64) -> Result<FiniteLevelStructure> {
    if n < 2 {
        return Err(Error::Domain("the witness needs level at least 2".into()));
    }
    let tau = HalfPlanePoint::parse_numeric("0.1234567890123", "1.2345678901234", DEFAULT_DIGITS)?;
    let t = FiniteGroupElement::new(n, [1, 1, 0, 1], Flavor::Psl)?;
    let mut s = FiniteLevelStructure::new(n)?;
    s.add_standard_point(&tau)?;
    s.add_point(&tau, TorsorLabel::new(t)?)?;
    Ok(s)
}

/// The j-value of `τ` with its orbit values at every level dividing `N`.
#[derive(Clone, Debug)]
pub struct OrbitData {
    level: u64,
    tau: HalfPlanePoint,
    orbits: BTreeMap<u64, Vec<JValue>>,
}

impl OrbitData {
    pub fn compute(tau: &HalfPlanePoint, level: u64, digits: u32) -> Result<Self> {
        if level == 0 {
            return Err(Error::Domain("level must be positive".into()));
        }
        let orbits = divisors(level)
            .into_iter()
            .map(|m| Ok((m, orbit_values(tau, m, digits)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            level,
            tau: tau.clone(),
            orbits,
        })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn tau(&self) -> &HalfPlanePoint {
        &self.tau
    }

    pub fn j(&self) -> &JValue {
        &self.orbits[&1][0]
    }

    /// Orbit values at a divisor level, in representative order.
    pub fn values(&self, m: u64) -> Option<&[JValue]> {
        self.orbits.get(&m).map(Vec::as_slice)
    }
}

/// Number of orbits of the subgroup generated by `acting` on the fiber over
/// the point, acting on labels by right multiplication.
pub fn count_types_over_point(data: &OrbitData, acting: &[FiniteGroupElement]) -> Result<usize> {
    let n = data.level;
    if let Some(g) = acting
        .iter()
        .find(|g| g.level() != n || g.flavor() != Flavor::Psl)
    {
        return Err(Error::LevelMismatch(n, g.level()));
    }
    let labels = group_elements(n, Flavor::Psl);
    let index: HashMap<FiniteGroupElement, usize> =
        labels.iter().enumerate().map(|(i, g)| (*g, i)).collect();
    let mut parent: Vec<usize> = (0..labels.len()).collect();
    let mut classes = labels.len();
    for (i, sigma) in labels.iter().enumerate() {
        for h in acting {
            let k = index[&sigma.multiply(h)?];
            let (ri, rk) = (find(&mut parent, i), find(&mut parent, k));
            if ri != rk {
                parent[ri] = rk;
                classes -= 1;
            }
        }
    }
    Ok(classes)
}

/// One failed pairwise relation.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiFailure {
    pub sample: usize,
    pub pair: (usize, usize),
    pub level: u64,
    pub residual_log10: f64,
}

/// Outcome of [`psi_axiom_check`]. Residuals are relative to the total size
/// of the terms of `Φ_L`, as log10.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiReport {
    pub samples: usize,
    pub pairs: usize,
    pub max_residual_log10: f64,
    pub passed: bool,
    pub failures: Vec<PsiFailure>,
}

impl fmt::Display for PsiReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} samples, {} pairs, max residual 10^{:.1}: {}",
            self.samples,
            self.pairs,
            self.max_residual_log10,
            if self.passed { "pass" } else { "FAIL" }
        )
    }
}

/// A fixed quasi-random point of the strip `|Re τ| < 1/2`, `0.9 < Im τ < 1.5`.
pub fn sample_point(k: usize, digits: u32) -> Result<HalfPlanePoint> {
    const SCALE: i64 = 1 << 40;
    let frac = |alpha: f64| ((k as f64 + 1.0) * alpha).fract();
    let re = ((frac(0.618_033_988_749_895) - 0.5) * SCALE as f64) as i64;
    let im = ((0.9 + 0.6 * frac(0.414_213_562_373_095)) * SCALE as f64) as i64;
    HalfPlanePoint::numeric(
        &BigRational::new(re.into(), SCALE.into()),
        &BigRational::new(im.into(), SCALE.into()),
        digits,
    )
}

/// Checks at `samples` points that `(j(g_1 τ), …, j(g_n τ))` satisfies
/// `Φ_L(x_i, x_k) = 0` for every pair, `L` the level of `g_i g_k⁻¹`.
/// A pair passes when its relative residual is below `10^(1 - digits)`.
pub fn psi_axiom_check(gs: &[GroupElement], samples: usize, digits: u32) -> Result<PsiReport> {
    if gs.is_empty() {
        return Err(Error::Precondition(
            "at least one group element is required".into(),
        ));
    }
    if digits == 0 {
        return Err(Error::PrecisionTooLow("digits must be positive".into()));
    }
    let mut pairs = Vec::new();
    for i in 0..gs.len() {
        for k in i + 1..gs.len() {
            let h = gs[i].multiply(&gs[k].inverse());
            let level = h
                .level_u64()
                .filter(|&l| l <= MAX_PSI_LEVEL)
                .ok_or_else(|| {
                    Error::Domain(format!("relative level of {h} exceeds {MAX_PSI_LEVEL}"))
                })?;
            pairs.push((i, k, phi(level)?, level));
        }
    }
    let work = digits + 10;
    let mut report = PsiReport {
        samples,
        pairs: pairs.len(),
        max_residual_log10: f64::NEG_INFINITY,
        passed: true,
        failures: Vec::new(),
    };
    for s in 0..samples {
        let tau = sample_point(s, work + 20)?;
        let js = gs
            .par_iter()
            .map(|g| Ok(JValue::Approx(j_of_image(g, &tau, work)?)))
            .collect::<Result<Vec<_>>>()?;
        for (i, k, p, level) in &pairs {
            let v = phi_eval(p, &js[*i], &js[*k]).to_ball(crate::ball::digits_to_bits(work));
            let residual =
                (v.mag_log2() - term_scale_log2(p, &js[*i], &js[*k])) * std::f64::consts::LOG10_2;
            report.max_residual_log10 = report.max_residual_log10.max(residual);
            if !(residual < 1.0 - digits as f64) {
                report.passed = false;
                report.failures.push(PsiFailure {
                    sample: s,
                    pair: (*i, *k),
                    level: *level,
                    residual_log10: residual,
                });
            }
        }
    }
    Ok(report)
}

/// The orbit-value pattern of a point as a sequence: used to compare the
/// fibers of two labels over one j-value.
pub fn level_coordinates_differ(
    s: &FiniteLevelStructure,
    a: usize,
    b: usize,
    m: u64,
) -> Result<Truth> {
    let (x, y) = (s.coordinate_ids(a, m)?, s.coordinate_ids(b, m)?);
    let mut all_equal = Truth::True;
    for (&u, &v) in x.iter().zip(&y) {
        all_equal = all_equal.and(relation(u, v, 1)?);
    }
    Ok(all_equal.not())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingal::psl_order;

    fn generic() -> HalfPlanePoint {
        HalfPlanePoint::parse_numeric("0.1234567890123", "1.2345678901234", DEFAULT_DIGITS).unwrap()
    }

    #[test]
    fn gamma_translate_has_equal_base_coordinate() {
        let mut s = FiniteLevelStructure::new(2).unwrap();
        let tau = generic();
        s.add_standard_point(&tau).unwrap();
        let g = GroupElement::from_i64(2, 1, 3, 2).unwrap();
        s.add_standard_point(&apply(&g, &tau)).unwrap();
        let t = finite_type(&s, &[0, 1], 1).unwrap();
        assert!(t.are_equal(t.index(0, 1, 0).unwrap(), t.index(1, 1, 0).unwrap()));
    }

    #[test]
    fn i_is_special() {
        let mut s = FiniteLevelStructure::new(2).unwrap();
        s.add_standard_point(&HalfPlanePoint::i()).unwrap();
        let t = finite_type(&s, &[0], 2).unwrap();
        assert_eq!(t.special(), &[Some(BigInt::from(-4))]);
    }

    #[test]
    fn two_i_and_four_i_are_two_isogenous() {
        let mut s = FiniteLevelStructure::new(2).unwrap();
        s.add_standard_point(&HalfPlanePoint::exact(1, 0, -16).unwrap())
            .unwrap();
        s.add_standard_point(&HalfPlanePoint::exact(1, 0, -64).unwrap())
            .unwrap();
        assert_eq!(s.points()[0].j(), &JValue::int(287496));
        let t = finite_type(&s, &[0, 1], 2).unwrap();
        let (a, b) = (t.index(0, 1, 0).unwrap(), t.index(1, 1, 0).unwrap());
        assert!(t.are_related(a, b, 2));
        assert!(!t.are_equal(a, b));
    }

    #[test]
    fn stored_point_is_reduced_and_keeps_coordinates() {
        let tau = generic();
        let g = GroupElement::from_i64(1, 2, 1, 3).unwrap();
        let mut s = FiniteLevelStructure::new(3).unwrap();
        s.add_standard_point(&tau).unwrap();
        let g_bar = FiniteGroupElement::from_gamma(&g, 3, Flavor::Psl).unwrap();
        s.add_point(&apply(&g, &tau), TorsorLabel::new(g_bar).unwrap())
            .unwrap();
        assert_eq!(s.points()[0].label(), s.points()[1].label());
        for m in [1, 3] {
            let (x, y) = (s.coordinates(0, m).unwrap(), s.coordinates(1, m).unwrap());
            for (u, v) in x.iter().zip(&y) {
                assert_eq!(u.certified_equal(v), Truth::True);
            }
        }
    }

    #[test]
    fn type_is_twist_invariant() {
        let mut s = FiniteLevelStructure::new(2).unwrap();
        s.add_standard_point(&generic()).unwrap();
        s.add_standard_point(&HalfPlanePoint::exact(1, 0, -16).unwrap())
            .unwrap();
        let base = finite_type(&s, &[0, 1], 2).unwrap();
        for sigma in group_elements(2, Flavor::Psl).iter() {
            assert_eq!(
                finite_type(&s.twisted(sigma).unwrap(), &[0, 1], 2).unwrap(),
                base
            );
        }
    }

    #[test]
    fn psi_checks() {
        let id = GroupElement::identity();
        let r = psi_axiom_check(std::slice::from_ref(&id), 3, 20).unwrap();
        assert!(r.passed && r.pairs == 0);
        let two = GroupElement::from_i64(2, 0, 0, 1).unwrap();
        let r = psi_axiom_check(&[id, two], 3, 20).unwrap();
        assert!(r.passed, "{r}");
        assert!(r.max_residual_log10 < -19.0);
        let reps = coset_representatives(2).representatives().to_vec();
        assert!(psi_axiom_check(&reps, 2, 20).unwrap().passed);
    }

    #[test]
    fn backforth_identity() {
        let mut s = FiniteLevelStructure::new(2).unwrap();
        s.add_standard_point(&generic()).unwrap();
        s.add_standard_point(&HalfPlanePoint::exact(1, 0, -16).unwrap())
            .unwrap();
        let e = extend_partial_iso(&s, &s, &[(0, 0)], 1).unwrap().unwrap();
        assert_eq!(e.image, 1);
        assert!(e.twist.is_identity() && !e.adjoined);
    }

    #[test]
    fn backforth_global_twist() {
        let mut s = FiniteLevelStructure::new(2).unwrap();
        s.add_standard_point(&generic()).unwrap();
        let tau2 = HalfPlanePoint::parse_numeric("-0.2", "1.1", DEFAULT_DIGITS).unwrap();
        s.add_standard_point(&tau2).unwrap();
        for sigma in group_elements(2, Flavor::Psl).iter() {
            let t = s.twisted(sigma).unwrap();
            let e = extend_partial_iso(&s, &t, &[(0, 0)], 1).unwrap().unwrap();
            assert!(!e.adjoined);
            assert_eq!(e.image, 1);
            assert_eq!(&e.twist, sigma);
        }
    }

    #[test]
    fn backforth_rejects_mismatched_partial() {
        let mut s = FiniteLevelStructure::new(2).unwrap();
        s.add_standard_point(&HalfPlanePoint::exact(1, 0, -16).unwrap())
            .unwrap();
        s.add_standard_point(&HalfPlanePoint::i()).unwrap();
        let err = extend_partial_iso(&s, &s, &[(0, 1)], 1).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn witness_violates_sf() {
        let w = nonstandard_fiber_witness(2).unwrap();
        assert_eq!(sf_violations(&w).unwrap(), vec![(0, 1)]);
        assert_eq!(sf_identify(&w).unwrap().len(), 2);
        let same = w
            .twisted(&FiniteGroupElement::identity(2, Flavor::Psl))
            .unwrap();
        let mut doubled = same.clone();
        doubled.points.push(same.points[0].clone());
        assert_eq!(sf_identify(&doubled).unwrap().len(), 2);
        let t = finite_type(&w, &[0, 1], 2).unwrap();
        assert!(t.are_equal(t.index(0, 1, 0).unwrap(), t.index(1, 1, 0).unwrap()));
        assert_eq!(level_coordinates_differ(&w, 0, 1, 2).unwrap(), Truth::True);
        assert!(nonstandard_fiber_witness(1).is_err());
    }

    #[test]
    fn type_counts() {
        let data = OrbitData::compute(&generic(), 2, 30).unwrap();
        assert_eq!(data.values(2).unwrap().len(), 3);
        let all = group_elements(2, Flavor::Psl).to_vec();
        assert_eq!(count_types_over_point(&data, &all).unwrap(), 1);
        assert_eq!(
            count_types_over_point(&data, &[]).unwrap(),
            psl_order(2) as usize
        );
        let t = FiniteGroupElement::new(2, [1, 1, 0, 1], Flavor::Psl).unwrap();
        assert_eq!(count_types_over_point(&data, &[t]).unwrap(), 3);
    }

    #[test]
    fn truncation_forgets() {
        let mut s = FiniteLevelStructure::new(4).unwrap();
        s.add_standard_point(&generic()).unwrap();
        s.add_standard_point(&HalfPlanePoint::exact(1, 0, -16).unwrap())
            .unwrap();
        let t4 = finite_type(&s, &[0, 1], 4).unwrap();
        assert_eq!(
            t4.truncate(2).unwrap(),
            finite_type(&s, &[0, 1], 2).unwrap()
        );
        assert_eq!(
            t4.truncate(1).unwrap(),
            finite_type(&s, &[0, 1], 1).unwrap()
        );
    }

    #[test]
    fn json_round_trip() {
        let w = nonstandard_fiber_witness(3).unwrap();
        let text = w.to_json();
        let back = FiniteLevelStructure::from_json(&text).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back.points()[1].label(), w.points()[1].label());
        assert!(parse_structure_json("{\"level\":0,\"digits\":5,\"points\":[]}").is_err());
        assert!(parse_structure_json("{\"level\":2,\"digits\":5,\"points\":[{\"tau\":{\"a\":1,\"b\":0,\"D\":-4},\"label\":[[1,0],[0,0]]}]}").is_err());
    }
}
