//! Finite-depth structural signatures and exhaustive parameter sweeps.
//!
//! A signature records what the covers and certified intervals show near
//! every gap of the base-depth cover. The checks are necessary conditions
//! for each topological type: a mismatch refutes a classification, a match
//! only fails to refute it.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::classifier::{self, DiffSpec, SpecError, TopologicalType};
use crate::digits::{self, DigitError, DigitSet};
use crate::geometry::{CoverLimits, Gap, GeometryError, Grid};

pub const DEFAULT_BASE_DEPTH: u32 = 3;
pub const DEFAULT_PROBE_DEPTH: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("probe depth {probe} is below base depth {base}")]
    DepthOrder { base: u32, probe: u32 },
}

impl From<DigitError> for VerifyError {
    fn from(e: DigitError) -> Self {
        VerifyError::Geometry(e.into())
    }
}

/// What the probe depth shows on both sides of one base-depth gap.
///
/// "Nearby" means inside a window of width `1/p^(base-1)` next to the gap
/// endpoint; "adjacent" means a certified interval ends within `1/p^probe`
/// of the endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapRecord {
    pub gap: Gap,
    pub left_adjacent_certified: bool,
    pub right_adjacent_certified: bool,
    pub left_nearby_gap: bool,
    pub right_nearby_gap: bool,
    pub left_nearby_certified: bool,
    pub right_nearby_certified: bool,
}

impl GapRecord {
    fn mirrored(&self) -> GapRecord {
        GapRecord {
            gap: Gap { lo: -self.gap.hi.clone(), hi: -self.gap.lo.clone() },
            left_adjacent_certified: self.right_adjacent_certified,
            right_adjacent_certified: self.left_adjacent_certified,
            left_nearby_gap: self.right_nearby_gap,
            right_nearby_gap: self.left_nearby_gap,
            left_nearby_certified: self.right_nearby_certified,
            right_nearby_certified: self.left_nearby_certified,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub base_depth: u32,
    pub probe_depth: u32,
    pub is_full_hull: bool,
    pub gap_count: usize,
    pub has_certified_interval: bool,
    pub gaps: Vec<GapRecord>,
}

impl Signature {
    /// The signature expected for the negated digit set.
    pub fn mirrored(&self) -> Signature {
        Signature { gaps: self.gaps.iter().rev().map(GapRecord::mirrored).collect(), ..self.clone() }
    }
}

pub fn signature(a: &DigitSet, base_depth: u32, probe_depth: u32) -> Result<Signature, VerifyError> {
    signature_with(a, base_depth, probe_depth, &CoverLimits::default())
}

pub fn signature_with(
    a: &DigitSet,
    base_depth: u32,
    probe_depth: u32,
    limits: &CoverLimits,
) -> Result<Signature, VerifyError> {
    if probe_depth < base_depth {
        return Err(VerifyError::DepthOrder { base: base_depth, probe: probe_depth });
    }
    let g = Grid::new(a, limits)?;
    let base_cover = g.cover(base_depth)?;
    let pb = g.pow(base_depth)?;
    let is_full_hull = base_cover.ivs == [(g.min * pb, g.max * pb)];
    let base_gaps: Vec<(i128, i128)> = base_cover.ivs.windows(2).map(|w| (w[0].1, w[1].0)).collect();

    // Everything below is in cover units at the probe depth.
    let scale = g.pow(probe_depth - base_depth)?;
    let width = g.pow(probe_depth - base_depth + 1)? * g.q;
    let tol = g.q;
    let mut windows: Vec<(i128, i128)> = Vec::with_capacity(2 * base_gaps.len());
    for &(a0, b0) in &base_gaps {
        let (lo, hi) = (a0 * scale, b0 * scale);
        for w in [(lo - width, lo), (hi, hi + width)] {
            match windows.last_mut() {
                Some(last) if w.0 <= last.1 => last.1 = last.1.max(w.1),
                _ => windows.push(w),
            }
        }
    }
    let closure = g.has_closure_property();
    let (probe_gaps, certified) = if windows.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        let pts = g.points_in(probe_depth, Some(&windows))?;
        let cover = g.cover_from_points(&pts);
        let gaps: Vec<(i128, i128)> = cover.windows(2).map(|w| (w[0].1, w[1].0)).collect();
        let cert = if closure { g.certified_from_points(&pts) } else { Vec::new() };
        (gaps, cert)
    };

    // First entry starting at or after `x`; both lists are sorted in both coordinates.
    let first_from = |v: &[(i128, i128)], x: i128| v.get(v.partition_point(|e| e.0 < x)).copied();
    let last_ending_by = |v: &[(i128, i128)], x: i128| {
        let i = v.partition_point(|e| e.1 <= x);
        (i > 0).then(|| v[i - 1])
    };

    let mut gaps = Vec::with_capacity(base_gaps.len());
    for &(a0, b0) in &base_gaps {
        let (lo, hi) = (a0 * scale, b0 * scale);
        gaps.push(GapRecord {
            gap: Gap { lo: g.to_rational(a0, base_depth)?, hi: g.to_rational(b0, base_depth)? },
            left_adjacent_certified: last_ending_by(&certified, lo).is_some_and(|c| c.1 >= lo - tol),
            right_adjacent_certified: first_from(&certified, hi).is_some_and(|c| c.0 <= hi + tol),
            left_nearby_gap: first_from(&probe_gaps, lo - width + 1).is_some_and(|e| e.1 <= lo),
            right_nearby_gap: first_from(&probe_gaps, hi).is_some_and(|e| e.1 < hi + width),
            left_nearby_certified: first_from(&certified, lo - width).is_some_and(|c| c.1 <= lo),
            right_nearby_certified: first_from(&certified, hi).is_some_and(|c| c.1 <= hi + width),
        });
    }

    let has_certified_interval = closure && (!certified.is_empty() || any_bi_obtainable(&g, probe_depth)?);
    Ok(Signature {
        base_depth,
        probe_depth,
        is_full_hull,
        gap_count: base_gaps.len(),
        has_certified_interval,
        gaps,
    })
}

fn any_bi_obtainable(g: &Grid, depth: u32) -> Result<bool, GeometryError> {
    for n in 1..=depth {
        let pts = g.points(n, None)?;
        if pts.windows(2).any(|w| w[1] == w[0] + 1) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Necessary finite-depth conditions for `s` to come from a set of type `t`.
pub fn signature_matches(t: TopologicalType, s: &Signature) -> bool {
    use TopologicalType::*;
    let every = |f: fn(&GapRecord) -> bool| s.gaps.iter().all(f);
    match t {
        FullInterval => s.is_full_hull && s.gap_count == 0,
        CantorSet => {
            !s.has_certified_interval && s.gap_count > 0 && every(|r| r.left_nearby_gap && r.right_nearby_gap)
        }
        LCantorval => {
            s.has_certified_interval
                && s.gap_count > 0
                && every(|r| r.right_adjacent_certified && r.left_nearby_gap && r.left_nearby_certified)
        }
        RCantorval => {
            s.has_certified_interval
                && s.gap_count > 0
                && every(|r| r.left_adjacent_certified && r.right_nearby_gap && r.right_nearby_certified)
        }
        MCantorval => {
            s.has_certified_interval
                && s.gap_count > 0
                && every(|r| {
                    r.left_nearby_gap && r.right_nearby_gap && r.left_nearby_certified && r.right_nearby_certified
                })
        }
    }
}

/// Checks `{grid sums of (A-B)^n} = {ā_n - b̄_n : ā ∈ A^n, b̄ ∈ B^n}` by
/// exhaustive enumeration of both sides.
pub fn prop_dod_grid_check(a: &DigitSet, b: &DigitSet, n: u32) -> Result<bool, DigitError> {
    let diff = digits::minkowski_diff(a, b)?;
    let p = a.base() as i128;
    let words = |set: &[i64]| {
        let mut cur: BTreeSet<i128> = BTreeSet::from([0]);
        for _ in 0..n {
            cur = cur.iter().flat_map(|&k| set.iter().map(move |&d| k * p + d as i128)).collect();
        }
        cur
    };
    let left = words(diff.digits());
    let (wa, wb) = (words(a.digits()), words(b.digits()));
    let right: BTreeSet<i128> = wa.iter().flat_map(|&x| wb.iter().map(move |&y| x - y)).collect();
    Ok(left == right)
}

/// Outcome of one sweep row; serializes as `true`, `false` or `"skipped"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Consistency {
    Consistent,
    Inconsistent,
    Skipped,
}

impl Serialize for Consistency {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Consistency::Consistent => s.serialize_bool(true),
            Consistency::Inconsistent => s.serialize_bool(false),
            Consistency::Skipped => s.serialize_str("skipped"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub spec: DiffSpec,
    pub predicted: TopologicalType,
    pub signature: Option<Signature>,
    pub consistent: Consistency,
    /// Human-readable reasons for an inconsistent or skipped row.
    pub notes: Vec<String>,
}

/// One JSON Lines record.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRowJson {
    pub l1: u32,
    pub r1: u32,
    pub l2: u32,
    pub r2: u32,
    pub p: u32,
    #[serde(rename = "type")]
    pub kind: TopologicalType,
    pub consistent: Consistency,
}

impl SweepRow {
    pub fn to_json(&self) -> SweepRowJson {
        let DiffSpec { l1, r1, l2, r2, p } = self.spec;
        SweepRowJson { l1, r1, l2, r2, p, kind: self.predicted, consistent: self.consistent }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SweepSummary {
    pub rows: usize,
    pub consistent: usize,
    pub inconsistent: usize,
    pub skipped: usize,
    pub tallies: BTreeMap<TopologicalType, usize>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub base_depth: u32,
    pub probe_depth: u32,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn summary(&self) -> SweepSummary {
        let mut s = SweepSummary { rows: self.rows.len(), ..Default::default() };
        for t in TopologicalType::ALL {
            s.tallies.insert(t, 0);
        }
        for row in &self.rows {
            *s.tallies.entry(row.predicted).or_default() += 1;
            match row.consistent {
                Consistency::Consistent => s.consistent += 1,
                Consistency::Inconsistent => s.inconsistent += 1,
                Consistency::Skipped => s.skipped += 1,
            }
        }
        s
    }

    pub fn all_consistent(&self) -> bool {
        self.rows.iter().all(|r| r.consistent != Consistency::Inconsistent)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    pub base_depth: u32,
    pub probe_depth: u32,
    /// Also check the classifier's partition, mirror and interval-criterion
    /// invariants on every row.
    pub verify: bool,
    pub limits: CoverLimits,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            base_depth: DEFAULT_BASE_DEPTH,
            probe_depth: DEFAULT_PROBE_DEPTH,
            verify: false,
            limits: CoverLimits::default(),
        }
    }
}

/// Classifies every valid spec with `3 <= p <= p_max` and compares the
/// prediction with the signature of its difference digit set. Rows come
/// back ordered by `(p, l1, r1, l2, r2)`.
pub fn sweep(p_max: u32, opts: &SweepOptions) -> Result<SweepReport, VerifyError> {
    if opts.probe_depth < opts.base_depth {
        return Err(VerifyError::DepthOrder { base: opts.base_depth, probe: opts.probe_depth });
    }
    let specs = DiffSpec::enumerate(p_max);
    let mut sets: Vec<DigitSet> = Vec::new();
    let mut set_index: HashMap<(u32, Vec<i64>), usize> = HashMap::new();
    let mut row_set = Vec::with_capacity(specs.len());
    for spec in &specs {
        let d = spec.difference_digits()?;
        let id = *set_index.entry((d.base(), d.digits().to_vec())).or_insert_with(|| {
            sets.push(d.clone());
            sets.len() - 1
        });
        row_set.push(id);
    }
    let signatures: Vec<Result<Signature, VerifyError>> = sets
        .par_iter()
        .map(|d| signature_with(d, opts.base_depth, opts.probe_depth, &opts.limits))
        .collect();

    let rows = specs
        .par_iter()
        .zip(row_set.par_iter())
        .map(|(&spec, &id)| build_row(spec, &sets[id], &signatures[id], opts))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepReport { base_depth: opts.base_depth, probe_depth: opts.probe_depth, rows })
}

fn build_row(
    spec: DiffSpec,
    digits: &DigitSet,
    sig: &Result<Signature, VerifyError>,
    opts: &SweepOptions,
) -> Result<SweepRow, VerifyError> {
    let predicted = classifier::classify(spec)?;
    let mut notes = Vec::new();
    if opts.verify {
        let profile = classifier::conditions(spec)?;
        if profile.branches().iter().filter(|&&b| b).count() != 1 {
            notes.push("classification branches do not partition".to_string());
        }
        if classifier::mirror(classifier::classify(spec.swapped())?) != predicted {
            notes.push("mirror symmetry fails".to_string());
        }
        let full = predicted == TopologicalType::FullInterval;
        if (digits.delta()? <= 2) != full || digits::is_full_interval(digits)? != full {
            notes.push("interval criterion disagrees".to_string());
        }
    }
    let (signature, consistent) = match sig {
        Ok(s) => {
            if !signature_matches(predicted, s) {
                notes.push(format!("signature does not match {predicted}"));
            }
            let c = if notes.is_empty() { Consistency::Consistent } else { Consistency::Inconsistent };
            (Some(s.clone()), c)
        }
        Err(VerifyError::Geometry(e)) if e.is_resource_limit() => {
            notes.push(e.to_string());
            let c = if notes.len() == 1 { Consistency::Skipped } else { Consistency::Inconsistent };
            (None, c)
        }
        Err(e) => return Err(e.clone()),
    };
    Ok(SweepRow { spec, predicted, signature, consistent, notes })
}
