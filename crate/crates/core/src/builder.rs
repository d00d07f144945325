//! Construction and verification of tower data `(F_n, C_{n+1})`.
//!
//! A [`CfSequence`] holds finite sets F₀ ⊆ G, …, F_N and C₁, …, C_N subject
//! to the combinatorial conditions checked by the verifiers here:
//!
//! - basic1: identity ∈ F_n and #C_n > 1 (F₀ = {identity});
//! - basic2: F_n⁻¹F_nF_nC_{n+1} ⊊ F_{n+1} (strict);
//! - basic3: F_nc ∩ F_nc′ = ∅ for c ≠ c′ ∈ C_{n+1};
//! - growth: #F_n / (#C₁⋯#C_n) strictly increasing and diverging trendwise;
//! - triangle(g), for infinite-order g: some l > 0 with
//!   g^l F_n C_{n+1} ⊆ F_{n+1} ∖ F_nC_{n+1};
//! - square(g), for finite-order g: gF_n = F_n;
//! - mix-i: F_nF_n⁻¹F_nC_{n+1} ⊆ F_{n+1};
//! - mix-ii: the sets F_nc₁c₂⁻¹F_n⁻¹ over ordered pairs c₁ ≠ c₂, together
//!   with F_nF_n⁻¹, are pairwise disjoint;
//! - mix-iii: #C_n nondecreasing with a witnessed increase across the build.
//!
//! All checks use exact set arithmetic; a failing check always carries a
//! concrete witness. [`build_sequence`] runs a greedy level-by-level search:
//! C-candidates are spaced along a fixed direction (step forced odd) and
//! accepted only after the exact pairwise checks pass, then F_{n+1} is grown
//! to cover the required products plus displacement headroom for the
//! scheduled infinite-order elements.

use crate::group::{ElementOrder, Group, GroupDescriptor, GroupElement};
use crate::set::{FiniteSet, LatticeBox};
use crate::{ratio_from_biguint, Ratio};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("invalid build configuration: {0}")]
    InvalidConfig(String),
    #[error("greedy search exhausted at level {level} for condition {condition}")]
    SearchExhausted { level: usize, condition: String },
    #[error("explicit sets too large at level {level} (cardinality {cardinality})")]
    ScaleExceeded { level: usize, cardinality: u64 },
    #[error("built sequence failed verification at level {level}, condition {condition}")]
    Verification { level: usize, condition: String },
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("element order does not match this condition")]
    OrderMismatch,
    #[error("level {0} outside built depth")]
    LevelOutOfRange(usize),
}

#[derive(Debug, Error)]
pub enum SequenceError {
    #[error("malformed sequence: {0}")]
    Malformed(String),
}

/// Knobs for [`build_sequence`].
#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// How many enumerated elements to track for triangle/square discharge.
    pub schedule_elements: usize,
    /// Candidate index bound for the greedy C-selection.
    pub candidate_bound: u64,
    /// Exponent bound when scanning for displacement certificates.
    pub exponent_bound: u64,
    /// Box margin that enforces strictness of basic2.
    pub margin: i64,
    /// Required ratio r_last/r_first for the growth check.
    pub growth_threshold: u64,
    /// Cardinality guard for explicit-set levels.
    pub max_explicit: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            schedule_elements: 16,
            candidate_bound: 4096,
            exponent_bound: 1 << 45,
            margin: 1,
            growth_threshold: 4,
            max_explicit: 4_000_000,
        }
    }
}

/// Why an element's obligation is considered discharged at a level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// g^exponent F_n C_{n+1} ⊆ F_{n+1} ∖ F_nC_{n+1}.
    Displacement { exponent: u64 },
    /// gF_n = F_n.
    Stabilizer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub element: GroupElement,
    pub level: usize,
    pub certificate: Certificate,
}

/// The tower data, immutable once built.
#[derive(Debug, Clone)]
pub struct CfSequence {
    group: Group,
    f_sets: Vec<FiniteSet>,
    c_sets: Vec<FiniteSet>,
    c_elems: Vec<Vec<GroupElement>>,
    schedule: Vec<ScheduleEntry>,
    deferred: Vec<GroupElement>,
    growth_profile: Vec<usize>,
    // caches
    c_products: Vec<BigUint>,
    level_measures: Vec<Ratio>,
    f_cards: Vec<BigUint>,
}

impl CfSequence {
    /// Assemble a sequence from raw parts, validating shape (not the tower
    /// conditions — those are the verifiers' job).
    pub fn from_parts(
        group: Group,
        f_sets: Vec<FiniteSet>,
        c_sets: Vec<FiniteSet>,
        growth_profile: Vec<usize>,
    ) -> Result<CfSequence, SequenceError> {
        if f_sets.is_empty() {
            return Err(SequenceError::Malformed("no F levels".into()));
        }
        if c_sets.len() + 1 != f_sets.len() {
            return Err(SequenceError::Malformed(format!(
                "expected {} C sets for {} F levels, found {}",
                f_sets.len() - 1,
                f_sets.len(),
                c_sets.len()
            )));
        }
        let id_set = FiniteSet::singleton(group.identity());
        if !f_sets[0].set_eq(&group, &id_set) {
            return Err(SequenceError::Malformed("F_0 must be {identity}".into()));
        }
        let mut c_elems = Vec::with_capacity(c_sets.len());
        for (i, c) in c_sets.iter().enumerate() {
            let card = c.cardinality(&group);
            if card > BigUint::from(100_000u32) {
                return Err(SequenceError::Malformed(format!("C_{} too large", i + 1)));
            }
            let mut elems = c.expand_elements(&group);
            elems.sort();
            for e in &elems {
                group
                    .validate_element(e)
                    .map_err(|err| SequenceError::Malformed(format!("C_{}: {err}", i + 1)))?;
            }
            c_elems.push(elems);
        }
        let mut c_products = Vec::with_capacity(f_sets.len());
        let mut level_measures = Vec::with_capacity(f_sets.len());
        let mut acc = BigUint::one();
        c_products.push(acc.clone());
        level_measures.push(Ratio::one());
        for elems in &c_elems {
            acc *= BigUint::from(elems.len());
            c_products.push(acc.clone());
            level_measures.push(Ratio::one() / ratio_from_biguint(&acc));
        }
        let f_cards = f_sets.iter().map(|f| f.cardinality(&group)).collect();
        Ok(CfSequence {
            group,
            f_sets,
            c_sets,
            c_elems,
            schedule: Vec::new(),
            deferred: Vec::new(),
            growth_profile,
            c_products,
            level_measures,
            f_cards,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    /// Deepest built level N (levels are 0..=N).
    pub fn depth(&self) -> usize {
        self.f_sets.len() - 1
    }

    pub fn f_set(&self, n: usize) -> &FiniteSet {
        &self.f_sets[n]
    }

    /// C_n for 1 ≤ n ≤ depth.
    pub fn c_set(&self, n: usize) -> &FiniteSet {
        &self.c_sets[n - 1]
    }

    /// Explicit elements of C_n, sorted.
    pub fn c_elements(&self, n: usize) -> &[GroupElement] {
        &self.c_elems[n - 1]
    }

    pub fn c_count(&self, n: usize) -> usize {
        self.c_elems[n - 1].len()
    }

    /// μ([f]_n) = 1/(#C₁⋯#C_n), exact.
    pub fn level_measure(&self, n: usize) -> &Ratio {
        &self.level_measures[n]
    }

    /// #C₁⋯#C_n.
    pub fn c_product(&self, n: usize) -> &BigUint {
        &self.c_products[n]
    }

    pub fn f_cardinality(&self, n: usize) -> &BigUint {
        &self.f_cards[n]
    }

    /// μ(X_n) = #F_n/(#C₁⋯#C_n), exact.
    pub fn x_measure(&self, n: usize) -> Ratio {
        ratio_from_biguint(&self.f_cards[n]) * &self.level_measures[n]
    }

    pub fn schedule(&self) -> &[ScheduleEntry] {
        &self.schedule
    }

    pub fn deferred(&self) -> &[GroupElement] {
        &self.deferred
    }

    pub fn growth_profile(&self) -> &[usize] {
        &self.growth_profile
    }

    pub fn to_json(&self) -> String {
        let file = SequenceFile {
            schema_version: 1,
            group: self.group.descriptor().clone(),
            f: self.f_sets.clone(),
            c: self.c_sets.clone(),
            growth_profile: self.growth_profile.clone(),
            schedule: self.schedule.clone(),
            deferred: self.deferred.clone(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("sequence serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<CfSequence, SequenceError> {
        let file: SequenceFile =
            serde_json::from_str(text).map_err(|e| SequenceError::Malformed(e.to_string()))?;
        if file.schema_version != 1 {
            return Err(SequenceError::Malformed(format!(
                "unsupported schema_version {}",
                file.schema_version
            )));
        }
        let group = Group::new(file.group).map_err(|e| SequenceError::Malformed(e.to_string()))?;
        let mut seq = CfSequence::from_parts(group, file.f, file.c, file.growth_profile)?;
        seq.schedule = file.schedule;
        seq.deferred = file.deferred;
        Ok(seq)
    }
}

#[derive(Serialize, Deserialize)]
struct SequenceFile {
    schema_version: u32,
    group: GroupDescriptor,
    #[serde(rename = "F")]
    f: Vec<FiniteSet>,
    #[serde(rename = "C")]
    c: Vec<FiniteSet>,
    growth_profile: Vec<usize>,
    schedule: Vec<ScheduleEntry>,
    deferred: Vec<GroupElement>,
}

/// One exact check with a concrete witness on failure (or the found
/// exponent on displacement success).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub pass: bool,
    pub witness: Option<String>,
}

impl CheckOutcome {
    fn pass() -> Self {
        CheckOutcome { pass: true, witness: None }
    }
    fn pass_with(w: String) -> Self {
        CheckOutcome { pass: true, witness: Some(w) }
    }
    fn fail(w: String) -> Self {
        CheckOutcome { pass: false, witness: Some(w) }
    }
}

/// Per-level verification results keyed by condition name
/// (`basic1`, `basic2`, `basic3`, `mix-i`, `mix-ii`, `mix-iii`, …).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionReport {
    pub level: usize,
    pub checks: BTreeMap<String, CheckOutcome>,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|c| c.pass)
    }
}

/// Identity-membership, strict product containment, and translate
/// disjointness at level `n`; exact set arithmetic throughout.
pub fn verify_basic(seq: &CfSequence, n: usize) -> ConditionReport {
    let g = seq.group();
    let mut checks = BTreeMap::new();

    if n == 0 {
        let id_set = FiniteSet::singleton(g.identity());
        let ok = seq.f_set(0).set_eq(g, &id_set);
        checks.insert(
            "basic1".into(),
            if ok { CheckOutcome::pass() } else { CheckOutcome::fail("F_0 ≠ {identity}".into()) },
        );
    } else {
        let mut outcome = CheckOutcome::pass();
        if !seq.f_set(n).contains(g, &g.identity()) {
            outcome = CheckOutcome::fail(format!("identity ∉ F_{n}"));
        } else if seq.c_count(n) <= 1 {
            outcome = CheckOutcome::fail(format!("#C_{n} = {} ≤ 1", seq.c_count(n)));
        }
        checks.insert("basic1".into(), outcome);
    }

    if n + 1 <= seq.depth() {
        let f = seq.f_set(n);
        let f_next = seq.f_set(n + 1);
        let triple = f.inverse(g).product(g, f).product(g, f);
        let prod = triple.product(g, seq.c_set(n + 1));
        let outcome = match prod.element_outside(g, f_next) {
            Some(w) => CheckOutcome::fail(format!("element {w} of F⁻¹FFC escapes F_{}", n + 1)),
            None => {
                if prod.cardinality(g) < f_next.cardinality(g) {
                    CheckOutcome::pass()
                } else {
                    CheckOutcome::fail(format!("F⁻¹FFC equals F_{} (inclusion not strict)", n + 1))
                }
            }
        };
        checks.insert("basic2".into(), outcome);

        let cs = seq.c_elements(n + 1);
        let mut outcome = CheckOutcome::pass();
        'pairs: for (i, c1) in cs.iter().enumerate() {
            let t1 = f.translate_right(g, c1);
            for c2 in cs.iter().skip(i + 1) {
                let t2 = f.translate_right(g, c2);
                if let Some(w) = t1.common_element(g, &t2) {
                    outcome = CheckOutcome::fail(format!("(c={c1}, c'={c2}, overlap {w})"));
                    break 'pairs;
                }
            }
        }
        checks.insert("basic3".into(), outcome);
    }

    ConditionReport { level: n, checks }
}

/// The mixing spacing conditions at level `n` (needs level n+1 built):
/// (i) containment, (ii) pairwise disjoint difference sets, (iii) growth of
/// the #C_n sequence (finite-depth reading: nondecreasing, with an overall
/// increase witnessed once the last level is reached).
pub fn verify_mixing(seq: &CfSequence, n: usize) -> ConditionReport {
    let g = seq.group();
    let mut checks = BTreeMap::new();
    if n + 1 > seq.depth() {
        checks.insert("mix-i".into(), CheckOutcome::fail(format!("level {} not built", n + 1)));
        return ConditionReport { level: n, checks };
    }

    let f = seq.f_set(n);
    let f_inv = f.inverse(g);
    let f_next = seq.f_set(n + 1);

    // (i) F F⁻¹ F C ⊆ F_next — computed in this exact factor order, which
    // differs from basic2's F⁻¹FF in noncommutative groups
    let prod = f.product(g, &f_inv).product(g, f).product(g, seq.c_set(n + 1));
    let outcome = match prod.element_outside(g, f_next) {
        Some(w) => CheckOutcome::fail(format!("element {w} of FF⁻¹FC escapes F_{}", n + 1)),
        None => CheckOutcome::pass(),
    };
    checks.insert("mix-i".into(), outcome);

    // (ii) difference sets over ordered pairs plus FF⁻¹, pairwise disjoint
    let d = f.product(g, &f_inv);
    let cs = seq.c_elements(n + 1);
    let mut family: Vec<(String, FiniteSet)> = vec![("FF⁻¹".into(), d.clone())];
    let abelian = !matches!(g.descriptor(), GroupDescriptor::LamplighterZ { .. });
    for c1 in cs {
        for c2 in cs {
            if c1 == c2 {
                continue;
            }
            let delta = g.compose(c1, &g.inverse(c2)).expect("difference");
            let set = if abelian {
                d.translate_left(g, &delta)
            } else {
                f.translate_right(g, &delta).product(g, &f_inv)
            };
            family.push((format!("c1={c1},c2={c2}"), set));
        }
    }
    let mut outcome = CheckOutcome::pass();
    'outer: for i in 0..family.len() {
        for j in i + 1..family.len() {
            if let Some(w) = family[i].1.common_element(g, &family[j].1) {
                outcome = CheckOutcome::fail(format!(
                    "({}) ∩ ({}) ∋ {w}",
                    family[i].0, family[j].0
                ));
                break 'outer;
            }
        }
    }
    checks.insert("mix-ii".into(), outcome);

    // (iii)
    let mut outcome = CheckOutcome::pass_with(format!(
        "targets {:?}",
        seq.growth_profile()
    ));
    for m in 1..=n {
        if seq.c_count(m + 1) < seq.c_count(m) {
            outcome = CheckOutcome::fail(format!(
                "#C_{} = {} < #C_{} = {}",
                m + 1,
                seq.c_count(m + 1),
                m,
                seq.c_count(m)
            ));
        }
    }
    if outcome.pass && n + 1 == seq.depth() && seq.depth() >= 2 {
        let first = seq.c_count(1);
        let last = seq.c_count(seq.depth());
        if last <= first {
            outcome = CheckOutcome::fail(format!(
                "no growth witnessed: #C_1 = {first}, #C_{} = {last}",
                seq.depth()
            ));
        }
    }
    checks.insert("mix-iii".into(), outcome);

    ConditionReport { level: n, checks }
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub level: usize,
    pub f_cardinality: BigUint,
    pub c_product: BigUint,
    /// r_n = #F_n / (#C₁⋯#C_n), exact.
    pub ratio: Ratio,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    pub pass: bool,
    pub witness: Option<String>,
}

/// Exact ratio table r_n = #F_n/(#C₁⋯#C_n); passes when the ratios strictly
/// increase and the final ratio exceeds `threshold` times the first.
pub fn verify_growth(seq: &CfSequence, threshold: u64) -> GrowthReport {
    let mut rows = Vec::with_capacity(seq.depth() + 1);
    for n in 0..=seq.depth() {
        rows.push(GrowthRow {
            level: n,
            f_cardinality: seq.f_cardinality(n).clone(),
            c_product: seq.c_product(n).clone(),
            ratio: ratio_from_biguint(seq.f_cardinality(n)) / ratio_from_biguint(seq.c_product(n)),
        });
    }
    let mut pass = true;
    let mut witness = None;
    for w in rows.windows(2) {
        if w[1].ratio <= w[0].ratio {
            pass = false;
            witness = Some(format!(
                "r_{} = {} does not exceed r_{} = {}",
                w[1].level, w[1].ratio, w[0].level, w[0].ratio
            ));
            break;
        }
    }
    if pass && seq.depth() >= 1 {
        let needed = &rows[0].ratio * crate::ratio_u64(threshold);
        if rows[seq.depth()].ratio < needed {
            pass = false;
            witness = Some(format!(
                "final ratio {} below divergence threshold {needed}",
                rows[seq.depth()].ratio
            ));
        }
    }
    GrowthReport { rows, pass, witness }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TriangleOutcome {
    /// Least exponent in the scanned range satisfying the displacement
    /// condition at this level.
    Found { exponent: u64 },
    NotFound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SquareOutcome {
    Pass,
    /// Some element of gF_n △ F_n.
    Fail { witness: GroupElement },
}

/// Exact displacement predicate: g^l F_n C_{n+1} ⊆ F_{n+1} ∖ F_nC_{n+1}.
pub fn check_displacement(
    seq: &CfSequence,
    g_elem: &GroupElement,
    n: usize,
    exponent: u64,
) -> Result<bool, VerifyError> {
    if n + 1 > seq.depth() {
        return Err(VerifyError::LevelOutOfRange(n + 1));
    }
    let g = seq.group();
    let fc = seq.f_set(n).product(g, seq.c_set(n + 1));
    let power = g
        .power(g_elem, i64::try_from(exponent).map_err(|_| VerifyError::OrderMismatch)?)
        .map_err(|_| VerifyError::OrderMismatch)?;
    let displaced = fc.translate_left(g, &power);
    Ok(displaced.is_subset(g, seq.f_set(n + 1)) && displaced.is_disjoint(g, &fc))
}

/// Least l in [1, bound] with g^l F_nC_{n+1} ⊆ F_{n+1} ∖ (F_nC_{n+1}).
///
/// Box-represented levels are solved by exact interval arithmetic on box
/// faces (then re-checked by the exact set predicate); explicit levels scan.
pub fn verify_triangle(
    seq: &CfSequence,
    g_elem: &GroupElement,
    n: usize,
    bound: u64,
) -> Result<TriangleOutcome, VerifyError> {
    if seq.group().element_order(g_elem).is_finite() {
        return Err(VerifyError::OrderMismatch);
    }
    if n + 1 > seq.depth() {
        return Err(VerifyError::LevelOutOfRange(n + 1));
    }
    let g = seq.group();
    let fc = seq.f_set(n).product(g, seq.c_set(n + 1));

    if let (FiniteSet::BoxUnion(fc_boxes), FiniteSet::BoxUnion(next_boxes)) =
        (&fc, seq.f_set(n + 1))
    {
        if next_boxes.len() == 1 {
            if let GroupElement::Lattice(v) = g_elem {
                let found = least_displacement_boxes(fc_boxes, &next_boxes[0], v, bound);
                if let Some(l) = found {
                    debug_assert!(check_displacement(seq, g_elem, n, l).unwrap());
                    return Ok(TriangleOutcome::Found { exponent: l });
                }
                return Ok(TriangleOutcome::NotFound);
            }
        }
    }

    for l in 1..=bound {
        if check_displacement(seq, g_elem, n, l)? {
            return Ok(TriangleOutcome::Found { exponent: l });
        }
    }
    Ok(TriangleOutcome::NotFound)
}

/// Exact stabilizer test gF_n = F_n.
pub fn verify_square(
    seq: &CfSequence,
    g_elem: &GroupElement,
    n: usize,
) -> Result<SquareOutcome, VerifyError> {
    if !seq.group().element_order(g_elem).is_finite() {
        return Err(VerifyError::OrderMismatch);
    }
    if n > seq.depth() {
        return Err(VerifyError::LevelOutOfRange(n));
    }
    let g = seq.group();
    let translated = seq.f_set(n).translate_left(g, g_elem);
    if let Some(w) = translated.element_outside(g, seq.f_set(n)) {
        return Ok(SquareOutcome::Fail { witness: w });
    }
    if let Some(w) = seq.f_set(n).element_outside(g, &translated) {
        return Ok(SquareOutcome::Fail { witness: w });
    }
    Ok(SquareOutcome::Pass)
}

/// Run every per-level check plus the growth table. Returns the reports and
/// whether everything passed.
pub fn verify_all(seq: &CfSequence, growth_threshold: u64) -> (Vec<ConditionReport>, GrowthReport, bool) {
    let mut reports = Vec::new();
    let mut ok = true;
    for n in 0..=seq.depth() {
        let basic = verify_basic(seq, n);
        ok &= basic.all_pass();
        reports.push(basic);
        if n + 1 <= seq.depth() {
            let mixing = verify_mixing(seq, n);
            ok &= mixing.all_pass();
            reports.push(mixing);
        }
    }
    let growth = verify_growth(seq, growth_threshold);
    ok &= growth.pass;
    (reports, growth, ok)
}

/// Re-verify every schedule certificate against the exact predicates.
pub fn verify_schedule(seq: &CfSequence) -> Result<(), String> {
    for entry in seq.schedule() {
        match &entry.certificate {
            Certificate::Displacement { exponent } => {
                let ok = check_displacement(seq, &entry.element, entry.level, *exponent)
                    .map_err(|e| e.to_string())?;
                if !ok {
                    return Err(format!(
                        "displacement certificate fails: g = {}, level {}, exponent {}",
                        entry.element, entry.level, exponent
                    ));
                }
            }
            Certificate::Stabilizer => {
                match verify_square(seq, &entry.element, entry.level).map_err(|e| e.to_string())? {
                    SquareOutcome::Pass => {}
                    SquareOutcome::Fail { witness } => {
                        return Err(format!(
                            "stabilizer certificate fails: g = {}, level {}, witness {witness}",
                            entry.element, entry.level
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Greedy level-by-level construction. Every returned sequence passes
/// [`verify_all`]; tracked elements without any certificate are reported in
/// [`CfSequence::deferred`].
pub fn build_sequence(
    group: &Group,
    depth: usize,
    growth_profile: &[usize],
    opts: &BuildOptions,
) -> Result<CfSequence, BuildError> {
    if depth == 0 {
        return Err(BuildError::InvalidConfig("depth must be ≥ 1".into()));
    }
    if growth_profile.len() != depth {
        return Err(BuildError::InvalidConfig(format!(
            "growth profile has {} entries for depth {depth}",
            growth_profile.len()
        )));
    }
    if growth_profile.iter().any(|&q| q < 2) {
        return Err(BuildError::InvalidConfig("growth profile values must be ≥ 2".into()));
    }
    if growth_profile.windows(2).any(|w| w[1] < w[0]) {
        return Err(BuildError::InvalidConfig("growth profile must be nondecreasing".into()));
    }

    let tracked: Vec<GroupElement> = group
        .enumerate(opts.schedule_elements + 1)
        .into_iter()
        .filter(|e| !group.is_identity(e))
        .take(opts.schedule_elements)
        .collect();

    let (f_sets, c_sets) = match group.descriptor() {
        GroupDescriptor::IntegerLattice { .. } => {
            build_lattice_levels(group, depth, growth_profile, &tracked, opts)?
        }
        GroupDescriptor::FiniteSumGroup { .. } => {
            build_sum_levels(group, depth, growth_profile, &tracked, opts)?
        }
        GroupDescriptor::LamplighterZ { .. } => {
            build_lamp_levels(group, depth, growth_profile, &tracked, opts)?
        }
    };

    let mut seq = CfSequence::from_parts(group.clone(), f_sets, c_sets, growth_profile.to_vec())
        .map_err(|e| BuildError::InvalidConfig(e.to_string()))?;

    // discharge obligations with the public verifiers (so certificates are
    // re-verifiable by construction)
    let mut schedule = Vec::new();
    let mut deferred = Vec::new();
    for g_elem in &tracked {
        let mut any = false;
        match group.element_order(g_elem) {
            ElementOrder::Infinite => {
                for n in 0..seq.depth() {
                    if let TriangleOutcome::Found { exponent } =
                        verify_triangle(&seq, g_elem, n, opts.exponent_bound)
                            .expect("infinite order, level in range")
                    {
                        schedule.push(ScheduleEntry {
                            element: g_elem.clone(),
                            level: n,
                            certificate: Certificate::Displacement { exponent },
                        });
                        any = true;
                    }
                }
            }
            ElementOrder::Finite(_) => {
                for n in 1..=seq.depth() {
                    if verify_square(&seq, g_elem, n).expect("finite order, level in range")
                        == SquareOutcome::Pass
                    {
                        schedule.push(ScheduleEntry {
                            element: g_elem.clone(),
                            level: n,
                            certificate: Certificate::Stabilizer,
                        });
                        any = true;
                    }
                }
            }
        }
        if !any {
            deferred.push(g_elem.clone());
        }
    }
    seq.schedule = schedule;
    seq.deferred = deferred;

    let (reports, growth, ok) = verify_all(&seq, opts.growth_threshold);
    if !ok {
        let bad = reports
            .iter()
            .flat_map(|r| r.checks.iter().filter(|(_, c)| !c.pass).map(move |(k, _)| (r.level, k.clone())))
            .next();
        let (level, condition) = bad.unwrap_or((seq.depth(), if growth.pass { "?".into() } else { "growth".into() }));
        return Err(BuildError::Verification { level, condition });
    }
    Ok(seq)
}

// ---------------------------------------------------------------------------
// lattice levels: F-sets are single boxes, C-sets sit on the first axis

fn build_lattice_levels(
    group: &Group,
    depth: usize,
    profile: &[usize],
    tracked: &[GroupElement],
    opts: &BuildOptions,
) -> Result<(Vec<FiniteSet>, Vec<FiniteSet>), BuildError> {
    let dim = match group.descriptor() {
        GroupDescriptor::IntegerLattice { dim } => *dim,
        _ => unreachable!(),
    };
    let mut f_sets = vec![FiniteSet::boxes(vec![LatticeBox::point(&vec![0; dim])])];
    let mut c_sets: Vec<FiniteSet> = Vec::new();

    for (level, &q) in profile.iter().enumerate() {
        let f = &f_sets[level];
        let c = greedy_axis_candidates(group, f, q, dim, opts)
            .ok_or(BuildError::SearchExhausted { level, condition: "mix-ii".into() })?;

        // region that F_{level+1} must contain
        let f_inv = f.inverse(group);
        let triple = f_inv.product(group, f).product(group, f);
        let needed = triple.product(group, &c);
        let fc = f.product(group, &c);
        let fc_bb = fc.bounding_box().expect("nonempty");

        let mut boxes = match &needed {
            FiniteSet::BoxUnion(b) => b.clone(),
            _ => unreachable!(),
        };
        // headroom so each tracked infinite-order element has a displaced copy
        for t in tracked {
            let v = match t {
                GroupElement::Lattice(v) => v,
                _ => unreachable!(),
            };
            if v.iter().all(|&x| x == 0) {
                continue;
            }
            let axis = (0..dim).max_by_key(|&i| v[i].abs()).unwrap();
            let span = fc_bb.hi[axis] - fc_bb.lo[axis] + 1;
            let l = (span + v[axis].abs()) / v[axis].abs(); // ceil((span+1)/|v|) suffices
            let offset: Vec<i64> = v.iter().map(|&x| x * l).collect();
            boxes.push(fc_bb.translate(&offset));
        }
        let hull = FiniteSet::boxes(boxes);
        let bb = hull.bounding_box().expect("nonempty");
        let lo: Vec<i64> = bb.lo.iter().map(|x| x - opts.margin.max(1)).collect();
        let hi: Vec<i64> = bb.hi.iter().map(|x| x + opts.margin.max(1)).collect();
        f_sets.push(FiniteSet::boxes(vec![LatticeBox::new(lo, hi)]));
        c_sets.push(c);
    }
    Ok((f_sets, c_sets))
}

/// Greedy Sidon-type selection of q candidates k·Δ·e₀ under the exact
/// basic3/mix-ii pair checks. Δ is forced odd.
fn greedy_axis_candidates(
    group: &Group,
    f: &FiniteSet,
    q: usize,
    dim: usize,
    opts: &BuildOptions,
) -> Option<FiniteSet> {
    let d = f.product(group, &f.inverse(group));
    let bb = d.bounding_box().expect("nonempty");
    let span = bb.hi[0] - bb.lo[0] + 1;
    let mut step = span + 1;
    if step % 2 == 0 {
        step += 1;
    }
    let mut chosen: Vec<GroupElement> = Vec::new();
    let mut diff_sets: Vec<FiniteSet> = Vec::new();
    for k in 0..=opts.candidate_bound {
        if chosen.len() == q {
            break;
        }
        let mut coords = vec![0i64; dim];
        coords[0] = step * k as i64;
        let cand = GroupElement::Lattice(coords);
        // new difference sets induced by this candidate
        let mut new_sets = Vec::new();
        let mut ok = true;
        for prev in &chosen {
            for (a, b) in [(&cand, prev), (prev, &cand)] {
                let delta = group.compose(a, &group.inverse(b)).expect("difference");
                let set = d.translate_left(group, &delta);
                if !set.is_disjoint(group, &d) {
                    ok = false;
                    break;
                }
                for old in diff_sets.iter().chain(&new_sets) {
                    if !set.is_disjoint(group, old) {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    break;
                }
                new_sets.push(set);
            }
            if !ok {
                break;
            }
        }
        if ok {
            chosen.push(cand);
            diff_sets.extend(new_sets);
        }
    }
    if chosen.len() == q {
        Some(FiniteSet::from_elements(chosen))
    } else {
        None
    }
}

/// Exact least-l solver for box unions against a single target box.
fn least_displacement_boxes(
    fc: &[LatticeBox],
    target: &LatticeBox,
    v: &[i64],
    bound: u64,
) -> Option<u64> {
    let mut lmin: i128 = 1;
    let mut lmax: i128 = bound as i128;
    // containment constraints
    for b in fc {
        for i in 0..v.len() {
            let a = (target.lo[i] - b.lo[i]) as i128;
            let bq = (target.hi[i] - b.hi[i]) as i128;
            let vi = v[i] as i128;
            if vi == 0 {
                if a > 0 || bq < 0 {
                    return None;
                }
                continue;
            }
            // l·vi ∈ [a, bq]
            let (lo, hi) = if vi > 0 {
                (a.div_ceil(&vi), bq.div_floor(&vi))
            } else {
                (bq.div_ceil(&vi), a.div_floor(&vi))
            };
            lmin = lmin.max(lo);
            lmax = lmax.min(hi);
        }
    }
    if lmin > lmax {
        return None;
    }
    // forbidden intervals from overlap with fc itself
    let mut forbidden: Vec<(i128, i128)> = Vec::new();
    for b in fc {
        for b2 in fc {
            let mut lo = i128::MIN / 4;
            let mut hi = i128::MAX / 4;
            let mut never = false;
            for i in 0..v.len() {
                let a = (b2.lo[i] - b.hi[i]) as i128;
                let bq = (b2.hi[i] - b.lo[i]) as i128;
                let vi = v[i] as i128;
                if vi == 0 {
                    if a > 0 || bq < 0 {
                        never = true;
                        break;
                    }
                    continue;
                }
                let (l1, h1) = if vi > 0 {
                    (a.div_ceil(&vi), bq.div_floor(&vi))
                } else {
                    (bq.div_ceil(&vi), a.div_floor(&vi))
                };
                lo = lo.max(l1);
                hi = hi.min(h1);
            }
            if !never && lo <= hi {
                forbidden.push((lo, hi));
            }
        }
    }
    forbidden.sort();
    let mut l = lmin;
    for (a, b) in forbidden {
        if b < l {
            continue;
        }
        if a > l {
            break;
        }
        l = b + 1;
    }
    if l <= lmax {
        Some(l as u64)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// finite-sum levels: F-sets are prefix subgroups, C-sets sit in the quotient

fn build_sum_levels(
    group: &Group,
    depth: usize,
    profile: &[usize],
    tracked: &[GroupElement],
    opts: &BuildOptions,
) -> Result<(Vec<FiniteSet>, Vec<FiniteSet>), BuildError> {
    let max_support = tracked
        .iter()
        .map(|e| match e {
            GroupElement::SumResidues(rs) => rs.last().map(|&(i, _)| i + 1).unwrap_or(0),
            _ => unreachable!(),
        })
        .max()
        .unwrap_or(0);

    let mut f_sets = vec![FiniteSet::singleton(group.identity())];
    let mut c_sets: Vec<FiniteSet> = Vec::new();
    let mut prefix: u32 = 0;

    for (level, &q) in profile.iter().enumerate() {
        let mut k_next = prefix + 1;
        let chosen = loop {
            // quotient must at least have room for q cosets with strict slack
            let mut quotient_size = BigUint::one();
            for i in prefix..k_next {
                quotient_size *= BigUint::from(group.sum_order(i));
            }
            if quotient_size >= BigUint::from(2 * q as u64) {
                if let Some(c) = greedy_quotient_candidates(group, prefix, k_next, q) {
                    break c;
                }
            }
            k_next += 1;
            if k_next - prefix > 64 {
                return Err(BuildError::SearchExhausted { level, condition: "mix-ii".into() });
            }
        };
        // stabilizer coverage for tracked elements at every level
        let k_next = k_next.max(max_support);
        f_sets.push(FiniteSet::prefix_subgroup(group, k_next));
        c_sets.push(FiniteSet::from_elements(chosen));
        prefix = k_next;
    }
    let _ = opts;
    Ok((f_sets, c_sets))
}

/// Greedy Sidon selection in the quotient ⊕_{prefix ≤ i < k} ℤ/m_i: pairwise
/// coset differences must be distinct and nonzero.
fn greedy_quotient_candidates(
    group: &Group,
    prefix: u32,
    k: u32,
    q: usize,
) -> Option<Vec<GroupElement>> {
    let f = FiniteSet::prefix_subgroup(group, prefix);
    let d = f.product(group, &f.inverse(group));
    let candidates = enumerate_quotient(group, prefix, k);
    let mut chosen: Vec<GroupElement> = Vec::new();
    let mut diff_sets: Vec<FiniteSet> = Vec::new();
    for cand in candidates {
        if chosen.len() == q {
            break;
        }
        let mut new_sets = Vec::new();
        let mut ok = true;
        for prev in &chosen {
            for (a, b) in [(&cand, prev), (prev, &cand)] {
                let delta = group.compose(a, &group.inverse(b)).expect("difference");
                let set = d.translate_left(group, &delta);
                if !set.is_disjoint(group, &d) {
                    ok = false;
                    break;
                }
                for old in diff_sets.iter().chain(&new_sets) {
                    if !set.is_disjoint(group, old) {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    break;
                }
                new_sets.push(set);
            }
            if !ok {
                break;
            }
        }
        if ok {
            chosen.push(cand);
            diff_sets.extend(new_sets);
        }
    }
    if chosen.len() == q {
        Some(chosen)
    } else {
        None
    }
}

/// All elements supported on [prefix, k), identity first, mixed-radix order.
fn enumerate_quotient(group: &Group, prefix: u32, k: u32) -> Vec<GroupElement> {
    let mut out = vec![GroupElement::SumResidues(Vec::new())];
    for i in prefix..k {
        let m = group.sum_order(i);
        let mut next = Vec::with_capacity(out.len() * m as usize);
        for e in &out {
            let rs = match e {
                GroupElement::SumResidues(rs) => rs,
                _ => unreachable!(),
            };
            for v in 0..m {
                let mut r = rs.clone();
                if v != 0 {
                    r.push((i, v));
                }
                next.push(GroupElement::SumResidues(r));
            }
        }
        out = next;
    }
    out
}

// ---------------------------------------------------------------------------
// lamplighter levels: explicit sets throughout

fn build_lamp_levels(
    group: &Group,
    depth: usize,
    profile: &[usize],
    tracked: &[GroupElement],
    opts: &BuildOptions,
) -> Result<(Vec<FiniteSet>, Vec<FiniteSet>), BuildError> {
    let base = match group.descriptor() {
        GroupDescriptor::LamplighterZ { base } => *base,
        _ => unreachable!(),
    };
    let mut f_sets = vec![FiniteSet::singleton(group.identity())];
    let mut c_sets: Vec<FiniteSet> = Vec::new();

    for (level, &q) in profile.iter().enumerate() {
        let f = &f_sets[level];
        let card = f.cardinality(group);
        if card > BigUint::from(opts.max_explicit) {
            return Err(BuildError::ScaleExceeded {
                level,
                cardinality: u64::try_from(&card).unwrap_or(u64::MAX),
            });
        }

        // candidate stream: at the base level prefer small-ball elements so
        // F_1 can be a full ball (stabilizer certificates); afterwards use
        // odd-spaced pure shifts
        let candidates: Vec<GroupElement> = if level == 0 {
            group.enumerate(2048)
        } else {
            let d = f.product(group, &f.inverse(group));
            let span = lamp_shift_span(&d);
            let mut step = span + 1;
            if step % 2 == 0 {
                step += 1;
            }
            (0..=opts.candidate_bound as i64)
                .map(|k| GroupElement::Lamp { lamps: Vec::new(), shift: k * step })
                .collect()
        };

        let chosen = greedy_explicit_candidates(group, f, &candidates, q)
            .ok_or(BuildError::SearchExhausted { level, condition: "mix-ii".into() })?;
        let c = FiniteSet::from_elements(chosen);

        // contents F_{level+1} must cover
        let f_inv = f.inverse(group);
        let needed = f_inv
            .product(group, f)
            .product(group, f)
            .product(group, &c);
        let mixing_needed = f.product(group, &f_inv).product(group, f).product(group, &c);
        let fc = f.product(group, &c);

        let mut pieces: Vec<GroupElement> = needed.expand_elements(group);
        pieces.extend(mixing_needed.expand_elements(group));

        // ball component keeps the levels Følner-shaped and provides the
        // strictness margin
        let radius = lamp_radius(&pieces).max(1) + 1;
        pieces.extend(lamp_ball_elements(group, base, radius.min(3)));
        pieces.push(GroupElement::Lamp { lamps: Vec::new(), shift: lamp_max_shift(&pieces) + 1 });

        // displacement headroom for tracked infinite-order elements
        for t in tracked {
            if group.element_order(t).is_finite() {
                continue;
            }
            let fc_elems = fc.expand_elements(group);
            'scan: for l in 1..=512u64 {
                let p = group.power(t, l as i64).expect("power");
                let displaced: Vec<GroupElement> = fc_elems
                    .iter()
                    .map(|e| group.compose(&p, e).expect("translate"))
                    .collect();
                let dset = FiniteSet::from_elements(displaced.clone());
                if dset.is_disjoint(group, &fc) {
                    pieces.extend(displaced);
                    break 'scan;
                }
            }
        }

        f_sets.push(FiniteSet::from_elements(pieces));
        c_sets.push(c);
    }
    let _ = depth;
    Ok((f_sets, c_sets))
}

fn greedy_explicit_candidates(
    group: &Group,
    f: &FiniteSet,
    candidates: &[GroupElement],
    q: usize,
) -> Option<Vec<GroupElement>> {
    let f_inv = f.inverse(group);
    let d = f.product(group, &f_inv);
    let mut chosen: Vec<GroupElement> = Vec::new();
    let mut diff_sets: Vec<FiniteSet> = Vec::new();
    for cand in candidates {
        if chosen.len() == q {
            break;
        }
        let mut new_sets = Vec::new();
        let mut ok = true;
        'prev: for prev in &chosen {
            for (a, b) in [(cand, prev), (prev, cand)] {
                let delta = group.compose(a, &group.inverse(b)).expect("difference");
                let set = f.translate_right(group, &delta).product(group, &f_inv);
                if !set.is_disjoint(group, &d) {
                    ok = false;
                    break 'prev;
                }
                for old in diff_sets.iter().chain(&new_sets) {
                    if !set.is_disjoint(group, old) {
                        ok = false;
                        break 'prev;
                    }
                }
                new_sets.push(set);
            }
        }
        // basic3 needs F·c pairwise disjoint as well
        if ok {
            let tc = f.translate_right(group, cand);
            for prev in &chosen {
                if !tc.is_disjoint(group, &f.translate_right(group, prev)) {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            chosen.push(cand.clone());
            diff_sets.extend(new_sets);
        }
    }
    if chosen.len() == q {
        Some(chosen)
    } else {
        None
    }
}

fn lamp_shift_span(s: &FiniteSet) -> i64 {
    match s {
        FiniteSet::Elements(es) => {
            let shifts: Vec<i64> = es
                .iter()
                .map(|e| match e {
                    GroupElement::Lamp { shift, .. } => *shift,
                    _ => unreachable!(),
                })
                .collect();
            let lo = shifts.iter().min().copied().unwrap_or(0);
            let hi = shifts.iter().max().copied().unwrap_or(0);
            hi - lo + 1
        }
        _ => unreachable!(),
    }
}

fn lamp_radius(es: &[GroupElement]) -> i64 {
    es.iter()
        .map(|e| match e {
            GroupElement::Lamp { lamps, shift } => lamps
                .iter()
                .map(|&(p, _)| p.abs())
                .max()
                .unwrap_or(0)
                .max(shift.abs()),
            _ => unreachable!(),
        })
        .max()
        .unwrap_or(0)
}

fn lamp_max_shift(es: &[GroupElement]) -> i64 {
    es.iter()
        .map(|e| match e {
            GroupElement::Lamp { shift, .. } => *shift,
            _ => unreachable!(),
        })
        .max()
        .unwrap_or(0)
}

/// Elements with lamp support in [−r, r] and |shift| ≤ r.
fn lamp_ball_elements(group: &Group, base: u32, r: i64) -> Vec<GroupElement> {
    let positions: Vec<i64> = (-r..=r).collect();
    let n = positions.len();
    let mut out = Vec::new();
    let mut values = vec![0u32; n];
    loop {
        let lamps: Vec<(i64, u32)> = positions
            .iter()
            .zip(&values)
            .filter(|(_, &v)| v != 0)
            .map(|(&p, &v)| (p, v))
            .collect();
        for t in -r..=r {
            out.push(GroupElement::Lamp { lamps: lamps.clone(), shift: t });
        }
        let mut i = 0;
        loop {
            if i == n {
                let _ = group;
                return out;
            }
            if values[i] + 1 < base {
                values[i] += 1;
                break;
            }
            values[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval_set(a: i64, b: i64) -> FiniteSet {
        FiniteSet::boxes(vec![LatticeBox::new(vec![a], vec![b])])
    }

    fn z1_seq(f: Vec<(i64, i64)>, c: Vec<Vec<i64>>) -> CfSequence {
        let g = Group::lattice(1);
        let f_sets = f.into_iter().map(|(a, b)| interval_set(a, b)).collect();
        let c_sets = c
            .into_iter()
            .map(|v| {
                FiniteSet::from_elements(v.into_iter().map(|x| GroupElement::Lattice(vec![x])).collect())
            })
            .collect();
        let profile_len = |cs: &Vec<FiniteSet>| cs.len();
        let mut seq =
            CfSequence::from_parts(g, f_sets, c_sets, vec![]).expect("valid parts");
        seq.growth_profile = vec![2; profile_len(&seq.c_sets)];
        seq
    }

    #[test]
    fn basic2_passes_on_spec_style_example() {
        // F_1 = [0,10), C_2 = {0, 40}, F_2 = [-30, 80):
        // F⁻¹FFC ⊆ [-9,18] ∪ [31,58] ⊊ F_2
        let seq = z1_seq(vec![(0, 0), (0, 9), (-30, 79)], vec![vec![0, 40], vec![0, 40]]);
        let report = verify_basic(&seq, 1);
        assert!(report.checks["basic2"].pass, "{:?}", report.checks["basic2"]);
        assert!(report.checks["basic3"].pass);
    }

    #[test]
    fn basic3_fails_with_witness_on_overlap() {
        // C_2 = {0, 1} with F_1 = [0,10) overlaps: witness carries the tuple
        let seq = z1_seq(vec![(0, 0), (0, 9), (-30, 79)], vec![vec![0, 40], vec![0, 1]]);
        let report = verify_basic(&seq, 1);
        let basic3 = &report.checks["basic3"];
        assert!(!basic3.pass);
        let w = basic3.witness.as_ref().unwrap();
        assert!(w.contains("c=0") && w.contains("c'=1"), "witness: {w}");
    }

    #[test]
    fn level_zero_trivially_passes() {
        let seq = z1_seq(vec![(0, 0), (0, 9)], vec![vec![0, 40]]);
        let report = verify_basic(&seq, 0);
        assert!(report.checks["basic1"].pass);
    }

    #[test]
    fn triangle_least_exponent_on_spec_example() {
        // F_1 = [0,10), C_2 = {0,40}, F_2 = [-30,110).
        // FC = [0,9] ∪ [40,49]; the least valid l for g = 1 is 10
        // (computed by the exhaustive scan oracle below), and l = 60 also
        // satisfies the predicate.
        let seq = z1_seq(vec![(0, 0), (0, 9), (-30, 109)], vec![vec![0, 40], vec![0, 40]]);
        let g1 = GroupElement::Lattice(vec![1]);

        // independent oracle: exhaustive scan with the raw predicate
        let mut oracle = None;
        for l in 1..=200 {
            if check_displacement(&seq, &g1, 1, l).unwrap() {
                oracle = Some(l);
                break;
            }
        }
        assert_eq!(oracle, Some(10));

        match verify_triangle(&seq, &g1, 1, 200).unwrap() {
            TriangleOutcome::Found { exponent } => assert_eq!(exponent, 10),
            other => panic!("expected Found, got {other:?}"),
        }
        assert!(check_displacement(&seq, &g1, 1, 60).unwrap());
    }

    #[test]
    fn triangle_not_found_when_target_too_small() {
        // F_2 barely larger than FC leaves no room for a displaced copy
        let seq = z1_seq(vec![(0, 0), (0, 9), (-1, 50)], vec![vec![0, 40], vec![0, 40]]);
        let g1 = GroupElement::Lattice(vec![1]);
        assert_eq!(verify_triangle(&seq, &g1, 1, 200).unwrap(), TriangleOutcome::NotFound);
    }

    #[test]
    fn triangle_rejects_finite_order() {
        let g = Group::finite_sum(&[2]);
        let f_sets = vec![
            FiniteSet::singleton(g.identity()),
            FiniteSet::prefix_subgroup(&g, 2),
        ];
        let c_sets = vec![FiniteSet::from_elements(vec![
            GroupElement::SumResidues(vec![]),
            GroupElement::SumResidues(vec![(0, 1)]),
        ])];
        let seq = CfSequence::from_parts(g, f_sets, c_sets, vec![2]).unwrap();
        let torsion = GroupElement::SumResidues(vec![(0, 1)]);
        assert!(matches!(
            verify_triangle(&seq, &torsion, 0, 10),
            Err(VerifyError::OrderMismatch)
        ));
        let lat = Group::lattice(1);
        let _ = lat;
    }

    #[test]
    fn square_subgroup_invariance() {
        let g = Group::finite_sum(&[2, 2]);
        let f_sets = vec![
            FiniteSet::singleton(g.identity()),
            FiniteSet::prefix_subgroup(&g, 3),
        ];
        let c_sets = vec![FiniteSet::from_elements(vec![
            GroupElement::SumResidues(vec![]),
            GroupElement::SumResidues(vec![(1, 1)]),
        ])];
        let seq = CfSequence::from_parts(g.clone(), f_sets, c_sets, vec![2]).unwrap();

        // any g in the subgroup stabilizes it
        let inside = GroupElement::SumResidues(vec![(0, 1), (2, 1)]);
        assert_eq!(verify_square(&seq, &inside, 1).unwrap(), SquareOutcome::Pass);
        assert_eq!(verify_square(&seq, &g.identity(), 1).unwrap(), SquareOutcome::Pass);

        // an element outside moves the set, with a witness
        let outside = GroupElement::SumResidues(vec![(5, 1)]);
        match verify_square(&seq, &outside, 1).unwrap() {
            SquareOutcome::Fail { witness } => {
                let f1 = seq.f_set(1);
                let moved = f1.translate_left(seq.group(), &outside);
                assert!(moved.contains(seq.group(), &witness) != f1.contains(seq.group(), &witness));
            }
            SquareOutcome::Pass => panic!("expected failure"),
        }
    }

    #[test]
    fn growth_table_examples() {
        // #F_n = 2^n ∏#C_i → ratios 1, 2, 4: pass
        let g = Group::lattice(1);
        let f_sets = vec![interval_set(0, 0), interval_set(0, 3), interval_set(0, 15)];
        let c_sets = vec![
            FiniteSet::from_elements(vec![GroupElement::Lattice(vec![0]), GroupElement::Lattice(vec![100])]),
            FiniteSet::from_elements(vec![GroupElement::Lattice(vec![0]), GroupElement::Lattice(vec![1000])]),
        ];
        let seq = CfSequence::from_parts(g.clone(), f_sets, c_sets, vec![2, 2]).unwrap();
        let report = verify_growth(&seq, 4);
        assert!(report.pass, "{:?}", report.witness);
        assert_eq!(report.rows[2].ratio, crate::ratio_u64(4));

        // #F_n = ∏#C_i → ratios constant 1: fail (finite total measure)
        let f_sets = vec![interval_set(0, 0), interval_set(0, 1), interval_set(0, 3)];
        let c_sets = vec![
            FiniteSet::from_elements(vec![GroupElement::Lattice(vec![0]), GroupElement::Lattice(vec![100])]),
            FiniteSet::from_elements(vec![GroupElement::Lattice(vec![0]), GroupElement::Lattice(vec![1000])]),
        ];
        let seq = CfSequence::from_parts(g, f_sets, c_sets, vec![2, 2]).unwrap();
        let report = verify_growth(&seq, 4);
        assert!(!report.pass);
    }

    #[test]
    fn mixing_spacing_examples() {
        // spacing comfortably larger than the diameter of F passes (ii)
        let seq = z1_seq(
            vec![(0, 0), (0, 4), (-100, 400)],
            vec![vec![0, 11], vec![0, 21, 63]],
        );
        let report = verify_mixing(&seq, 1);
        assert!(report.checks["mix-ii"].pass, "{:?}", report.checks["mix-ii"]);

        // two C elements at distance < 2·diam(F) fail (ii) with a witness
        let seq = z1_seq(vec![(0, 0), (0, 4), (-100, 400)], vec![vec![0, 11], vec![0, 7]]);
        let report = verify_mixing(&seq, 1);
        let mix2 = &report.checks["mix-ii"];
        assert!(!mix2.pass);
        assert!(mix2.witness.is_some());
    }

    #[test]
    fn mix_ii_implies_basic3_cross_invariant() {
        let seqs = vec![
            z1_seq(vec![(0, 0), (0, 4), (-100, 400)], vec![vec![0, 11], vec![0, 21, 63]]),
            z1_seq(vec![(0, 0), (0, 9), (-30, 109)], vec![vec![0, 40], vec![0, 40]]),
        ];
        for seq in seqs {
            for n in 0..seq.depth() {
                let mixing = verify_mixing(&seq, n);
                let basic = verify_basic(&seq, n);
                if mixing.checks["mix-ii"].pass {
                    assert!(basic.checks["basic3"].pass, "level {n}");
                }
            }
        }
    }

    #[test]
    fn build_z1_depth3_passes_verify_all() {
        let g = Group::lattice(1);
        let seq = build_sequence(&g, 3, &[2, 3, 4], &BuildOptions::default()).unwrap();
        let (_, _, ok) = verify_all(&seq, 4);
        assert!(ok);
        assert!(verify_schedule(&seq).is_ok());
        assert!(seq.deferred().is_empty());
    }

    #[test]
    fn build_depth1_minimal() {
        for g in [Group::lattice(1), Group::finite_sum(&[2, 3]), Group::lamplighter(3)] {
            let seq = build_sequence(
                &g,
                1,
                &[2],
                &BuildOptions { schedule_elements: 2, ..BuildOptions::default() },
            )
            .unwrap();
            // F_0 = {identity}, and level 1 satisfies identity ∈ F_1, #C_1 > 1
            assert!(seq.f_set(0).set_eq(&g, &FiniteSet::singleton(g.identity())));
            assert!(seq.f_set(1).contains(&g, &g.identity()));
            assert!(seq.c_count(1) > 1);
        }
    }

    #[test]
    fn build_sum_group_levels_are_subgroups_with_square_certs() {
        let g = Group::finite_sum(&[2, 2]);
        let seq = build_sequence(&g, 3, &[2, 2, 3], &BuildOptions::default()).unwrap();
        // every enumerated torsion element is eventually certified
        assert!(seq.deferred().is_empty());
        for entry in seq.schedule() {
            assert!(matches!(entry.certificate, Certificate::Stabilizer));
        }
        // F levels are full subgroups: translating by any member fixes them
        for n in 1..=seq.depth() {
            if let FiniteSet::CosetUnion { prefix, .. } = seq.f_set(n) {
                assert!(*prefix > 0);
            } else {
                panic!("sum-group level should be a coset union");
            }
        }
    }

    #[test]
    fn build_rejects_bad_profiles() {
        let g = Group::lattice(1);
        assert!(matches!(
            build_sequence(&g, 2, &[1, 2], &BuildOptions::default()),
            Err(BuildError::InvalidConfig(_))
        ));
        assert!(matches!(
            build_sequence(&g, 2, &[3, 2], &BuildOptions::default()),
            Err(BuildError::InvalidConfig(_))
        ));
        assert!(matches!(
            build_sequence(&g, 2, &[2], &BuildOptions::default()),
            Err(BuildError::InvalidConfig(_))
        ));
    }

    #[test]
    fn sequence_json_roundtrip_is_lossless_and_stable() {
        let g = Group::lattice(1);
        let seq = build_sequence(&g, 2, &[2, 3], &BuildOptions::default()).unwrap();
        let json = seq.to_json();
        let back = CfSequence::from_json(&json).unwrap();
        assert_eq!(back.to_json(), json);
        assert_eq!(back.schedule(), seq.schedule());
        for n in 0..=seq.depth() {
            assert!(back.f_set(n).set_eq(&g, seq.f_set(n)));
        }
    }

    #[test]
    fn verifiers_are_deterministic() {
        let g = Group::lattice(1);
        let seq = build_sequence(&g, 2, &[2, 3], &BuildOptions::default()).unwrap();
        for n in 0..=seq.depth() {
            let a = format!("{:?}", verify_basic(&seq, n));
            let b = format!("{:?}", verify_basic(&seq, n));
            assert_eq!(a, b);
        }
    }
}
