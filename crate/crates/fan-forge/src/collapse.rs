//! Collapse certificates: movers, chains, and uniformity refutation.
//!
//! A collapse chain walks from the glued endpoint of a spoke down to the
//! side's base point, alternating two kinds of steps. A `Move` applies a
//! group element that fixes a prescribed finite set and sweeps almost a
//! whole segment in one jump; a `Gap` hops across a marked point, which no
//! group element can cross. For any function whose oscillation under the
//! stabilizer movers is small, the triangle inequality over the chain pins
//! the endpoint value to the base value — the certified inequality
//! `|f(start) - f(end)| <= moves * mover_max + gap_total` is checked with
//! exact rationals.
//!
//! Running the chains on both sides of a fan bounds `|f(x) - f(y)|` for the
//! fan's base pair, which is the identification certificate. The refuter
//! searches a mover grid for an explicit witness that a concrete oracle is
//! not uniform.

use crate::group::{FanKey, FanLayerElement, TowerElement};
use crate::metric::dist;
use crate::ordermaps::PLOrderMap;
use crate::rat::Rat;
use crate::space::{canonicalize, segment_domain, PointAddress, Side, SpaceError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CollapseError {
    #[error(
        "offsets a={a}, b={b} do not fit segment {segment}: need a > 0, b > 0, lo + a < hi - b"
    )]
    InvalidOffsets { segment: u32, a: Rat, b: Rat },
    #[error("spoke {spoke} is below the convergence bound {bound} for the fixed set")]
    SpokeTooSmall { spoke: u32, bound: u32 },
    #[error("gap budget {0} must lie strictly between 0 and 1")]
    BudgetTooSmall(Rat),
    #[error("epsilon {0} must be positive")]
    InvalidEpsilon(Rat),
    #[error("oracle value {0} outside [0,1]")]
    OracleRange(Rat),
    #[error("invalid fan: {0}")]
    BadFan(String),
    #[error("invalid chain: {0}")]
    InvalidChain(String),
}

/// One fan of the construction: an ordered pair of distinct lower-level
/// points together with the level at which the fan was attached.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FanId {
    pub pair: (PointAddress, PointAddress),
    pub created_at: u32,
}

impl FanId {
    pub fn new(pair: (PointAddress, PointAddress), created_at: u32) -> Result<Self, SpaceError> {
        if pair.0 == pair.1 {
            return Err(SpaceError::DegeneratePair(pair.0));
        }
        for p in [&pair.0, &pair.1] {
            if p.level() >= created_at {
                return Err(SpaceError::LevelViolation {
                    point: p.clone(),
                    found: p.level(),
                    limit: created_at,
                });
            }
        }
        Ok(FanId { pair, created_at })
    }

    fn validate(&self) -> Result<(), CollapseError> {
        FanId::new(self.pair.clone(), self.created_at)
            .map(|_| ())
            .map_err(|e| CollapseError::BadFan(e.to_string()))
    }

    /// The canonical point at coordinate `t` on the given spoke and side.
    pub fn point(&self, t: Rat, spoke: u32, side: Side) -> PointAddress {
        canonicalize(t, spoke, side, self.pair.clone(), self.created_at)
            .expect("valid fan coordinates")
    }

    /// The base point the given side descends to.
    pub fn base(&self, side: Side) -> PointAddress {
        match side {
            Side::A => self.pair.0.clone(),
            Side::B => self.pair.1.clone(),
        }
    }
}

// ---------------------------------------------------------------------------
// Function oracles
// ---------------------------------------------------------------------------

/// A concrete [0,1]-valued function on point addresses that certificates are
/// evaluated against.
#[derive(Clone, Debug)]
pub enum FunctionOracle {
    /// Constant function.
    Const(Rat),
    /// `z -> dist(p, z) / 2`, the normalized distance to a point.
    NormDistTo(PointAddress),
    /// Finite table with a default value; the adversarial case.
    Table {
        entries: BTreeMap<PointAddress, Rat>,
        default: Rat,
    },
}

impl FunctionOracle {
    pub fn constant(value: Rat) -> Result<Self, CollapseError> {
        check_unit_range(&value)?;
        Ok(FunctionOracle::Const(value))
    }

    pub fn norm_dist_to(p: PointAddress) -> Self {
        FunctionOracle::NormDistTo(p)
    }

    pub fn table(
        entries: BTreeMap<PointAddress, Rat>,
        default: Rat,
    ) -> Result<Self, CollapseError> {
        check_unit_range(&default)?;
        for v in entries.values() {
            check_unit_range(v)?;
        }
        Ok(FunctionOracle::Table { entries, default })
    }

    pub fn eval(&self, z: &PointAddress) -> Rat {
        match self {
            FunctionOracle::Const(v) => v.clone(),
            FunctionOracle::NormDistTo(p) => dist(p, z) / Rat::two(),
            FunctionOracle::Table { entries, default } => {
                entries.get(z).cloned().unwrap_or_else(|| default.clone())
            }
        }
    }

    pub fn descriptor(&self) -> String {
        match self {
            FunctionOracle::Const(v) => format!("const:{}", v),
            FunctionOracle::NormDistTo(p) => format!("dist:{}", p),
            FunctionOracle::Table { entries, .. } => format!("table:{} entries", entries.len()),
        }
    }
}

fn check_unit_range(v: &Rat) -> Result<(), CollapseError> {
    if v.is_negative() || v > &Rat::one() {
        return Err(CollapseError::OracleRange(v.clone()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Movers
// ---------------------------------------------------------------------------

/// Builds the pure fan-layer element supported on a single segment whose map
/// sends `2^{-j-1} + a` to `2^{-j} - b` with three breakpoints. It fixes all
/// marked points and everything outside the segment.
pub fn build_mover(
    fan: &FanId,
    spoke: u32,
    side: Side,
    segment: u32,
    a: &Rat,
    b: &Rat,
) -> Result<TowerElement, CollapseError> {
    fan.validate()?;
    let (lo, hi) = segment_domain(segment);
    let from = &lo + a;
    let to = &hi - b;
    if !a.is_positive() || !b.is_positive() || from >= to {
        return Err(CollapseError::InvalidOffsets {
            segment,
            a: a.clone(),
            b: b.clone(),
        });
    }
    let map = PLOrderMap::new(vec![(lo.clone(), lo), (from, to), (hi.clone(), hi)])
        .expect("three increasing breakpoints fixing the endpoints");
    let layer = FanLayerElement::new(
        fan.created_at,
        [(
            FanKey {
                pair: fan.pair.clone(),
                spoke,
                side,
                segment,
            },
            map,
        )],
    )
    .expect("fan pair levels fit the layer level");
    Ok(TowerElement::pure_layer(layer))
}

/// The smallest spoke index N of the fan such that no point of the anchor
/// closure of the fixed set touches a spoke >= N. Every pure fan-layer
/// element supported only on spokes >= N of this fan fixes the set.
pub fn convergence_spoke_bound(fan: &FanId, fixed: &[PointAddress]) -> u32 {
    let mut max_touched = 0u32;
    for p in fixed {
        for q in p.anchor_closure() {
            if let Some(fp) = q.as_fan() {
                if fp.pair() == &fan.pair && fp.created_at() == fan.created_at {
                    max_touched = max_touched.max(fp.spoke());
                }
            }
        }
    }
    max_touched + 1
}

// ---------------------------------------------------------------------------
// Chains
// ---------------------------------------------------------------------------

/// One step of a collapse chain.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Step {
    Move {
        from: PointAddress,
        to: PointAddress,
        element: TowerElement,
    },
    Gap {
        from: PointAddress,
        to: PointAddress,
        width: Rat,
    },
}

impl Step {
    pub fn from_point(&self) -> &PointAddress {
        match self {
            Step::Move { from, .. } | Step::Gap { from, .. } => from,
        }
    }

    pub fn to_point(&self) -> &PointAddress {
        match self {
            Step::Move { to, .. } | Step::Gap { to, .. } => to,
        }
    }
}

/// A certificate connecting the glued endpoint of one spoke to the side's
/// base point through stabilizer moves and marked-point gaps.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CollapseChain {
    pub fan: FanId,
    pub spoke: u32,
    pub side: Side,
    pub fixed: Vec<PointAddress>,
    pub start: PointAddress,
    pub end: PointAddress,
    pub steps: Vec<Step>,
}

impl CollapseChain {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    /// Parses and fully validates a chain.
    pub fn from_json_str(text: &str) -> Result<Self, CollapseError> {
        let chain: CollapseChain =
            serde_json::from_str(text).map_err(|e| CollapseError::InvalidChain(e.to_string()))?;
        chain.validate()?;
        Ok(chain)
    }

    pub fn moves(&self) -> impl Iterator<Item = &Step> {
        self.steps.iter().filter(|s| matches!(s, Step::Move { .. }))
    }

    pub fn gap_width_total(&self) -> Rat {
        self.steps
            .iter()
            .filter_map(|s| match s {
                Step::Gap { width, .. } => Some(width.clone()),
                Step::Move { .. } => None,
            })
            .fold(Rat::zero(), |acc, w| acc + w)
    }

    /// Checks every chain invariant exactly: each move is realized by its
    /// element and fixes the fixed set, each gap width equals the distance
    /// and crosses or touches a marked point or base point, and consecutive
    /// steps share endpoints from start to end.
    pub fn validate(&self) -> Result<(), CollapseError> {
        let fail = |msg: String| Err(CollapseError::InvalidChain(msg));
        self.fan.validate()?;
        if self.steps.is_empty() {
            return fail("chain has no steps".into());
        }
        if self.steps[0].from_point() != &self.start {
            return fail(format!(
                "first step starts at {}, chain starts at {}",
                self.steps[0].from_point(),
                self.start
            ));
        }
        if self.steps[self.steps.len() - 1].to_point() != &self.end {
            return fail(format!(
                "last step ends at {}, chain ends at {}",
                self.steps[self.steps.len() - 1].to_point(),
                self.end
            ));
        }
        for w in self.steps.windows(2) {
            if w[0].to_point() != w[1].from_point() {
                return fail(format!(
                    "steps disconnect at {} vs {}",
                    w[0].to_point(),
                    w[1].from_point()
                ));
            }
        }
        for step in &self.steps {
            match step {
                Step::Move { from, to, element } => {
                    if &element.act(from) != to {
                        return fail(format!("move element does not send {} to {}", from, to));
                    }
                    if !element.fixes(self.fixed.iter()) {
                        return fail(format!("move element moves the fixed set near {}", from));
                    }
                }
                Step::Gap { from, to, width } => {
                    if &dist(from, to) != width {
                        return fail(format!(
                            "gap width {} differs from dist({}, {}) = {}",
                            width,
                            from,
                            to,
                            dist(from, to)
                        ));
                    }
                    if !self.gap_is_anchored(from, to) {
                        return fail(format!(
                            "gap {} -> {} has no marked point or base point at hand",
                            from, to
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// A gap must stay on one spoke side (the glued endpoint counts for both
    /// sides) and have a marked point or the base point between its ends or
    /// at an end.
    fn gap_is_anchored(&self, from: &PointAddress, to: &PointAddress) -> bool {
        let on_spoke = |p: &PointAddress| {
            p.as_fan().is_some_and(|fp| {
                fp.pair() == &self.fan.pair
                    && fp.created_at() == self.fan.created_at
                    && fp.spoke() == self.spoke
            })
        };
        let base = self.fan.base(self.side);
        for p in [from, to] {
            if p != &base && !on_spoke(p) {
                return false;
            }
        }
        if from == &base || to == &base || from.is_marked() || to.is_marked() {
            return true;
        }
        // both interior fan points: look for 2^{-k} between the coordinates
        let (tf, tt) = match (from.as_fan(), to.as_fan()) {
            (Some(a), Some(b)) => (a.t().clone(), b.t().clone()),
            _ => return false,
        };
        let (lo, hi) = if tf <= tt { (tf, tt) } else { (tt, tf) };
        let mut mark = Rat::one();
        while mark > lo {
            if mark <= hi {
                return true;
            }
            mark = mark / Rat::two();
        }
        false
    }
}

/// Builds the side-A collapse chain for one spoke. The spoke must be at
/// least the convergence bound so that every mover fixes the fixed set.
///
/// With K the smallest index with `2^{-K} <= gamma/2` and a dyadic offset
/// `delta <= gamma/(4K)`, the chain descends segment by segment: an inverse
/// mover sweeps `2^{-j} - delta` down to `2^{-j-1} + delta`, a gap of width
/// `2*delta` crosses each marked point, and a final gap of width under gamma
/// reaches the base point. The total gap width stays below 2*gamma.
pub fn collapse_chain(
    fan: &FanId,
    spoke: u32,
    gamma: &Rat,
    fixed: &[PointAddress],
) -> Result<CollapseChain, CollapseError> {
    chain_on_side(fan, spoke, Side::A, gamma, fixed)
}

/// Chain construction for either side; side B is the mirror image.
pub fn chain_on_side(
    fan: &FanId,
    spoke: u32,
    side: Side,
    gamma: &Rat,
    fixed: &[PointAddress],
) -> Result<CollapseChain, CollapseError> {
    fan.validate()?;
    let bound = convergence_spoke_bound(fan, fixed);
    if spoke < bound {
        return Err(CollapseError::SpokeTooSmall { spoke, bound });
    }
    if !gamma.is_positive() || gamma >= &Rat::one() {
        return Err(CollapseError::BudgetTooSmall(gamma.clone()));
    }
    // smallest K >= 1 with 2^{-K} <= gamma / 2
    let half_gamma = gamma / Rat::two();
    let mut k = 1u32;
    while Rat::pow2(-(k as i64)) > half_gamma {
        k += 1;
    }
    // dyadic offset: 2^{-m} <= gamma / (4K) and m >= K + 2 so that the
    // offsets fit inside every segment down to K - 1
    let offset_cap = gamma / Rat::from_int(4 * k as i64);
    let mut m = k + 2;
    while Rat::pow2(-(m as i64)) > offset_cap {
        m += 1;
    }
    let delta = Rat::pow2(-(m as i64));

    let at = |t: Rat| fan.point(t, spoke, side);
    let start = at(Rat::one());
    let end = fan.base(side);
    let mut steps = Vec::with_capacity(2 * k as usize + 1);
    // opening gap off the glued endpoint, which is itself marked
    let mut cursor = at(Rat::one() - &delta);
    steps.push(Step::Gap {
        from: start.clone(),
        to: cursor.clone(),
        width: delta.clone(),
    });
    for j in 0..k {
        let (seg_lo, seg_hi) = segment_domain(j);
        let sweep_from = at(&seg_hi - &delta);
        let sweep_to = at(&seg_lo + &delta);
        debug_assert_eq!(sweep_from, cursor, "segment sweeps are contiguous");
        let mover = build_mover(fan, spoke, side, j, &delta, &delta)?;
        steps.push(Step::Move {
            from: sweep_from,
            to: sweep_to.clone(),
            element: mover.inv(),
        });
        cursor = sweep_to;
        if j + 1 < k {
            // hop across the marked point 2^{-j-1}
            let next = at(&seg_lo - &delta);
            steps.push(Step::Gap {
                from: cursor.clone(),
                to: next.clone(),
                width: &delta + &delta,
            });
            cursor = next;
        } else {
            // final hop to the base point
            steps.push(Step::Gap {
                from: cursor.clone(),
                to: end.clone(),
                width: &seg_lo + &delta,
            });
        }
    }
    Ok(CollapseChain {
        fan: fan.clone(),
        spoke,
        side,
        fixed: fixed.to_vec(),
        start,
        end,
        steps,
    })
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Exact per-step oscillation of an oracle over a chain, together with the
/// certified triangle-inequality bound.
#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub oracle: String,
    pub moves: usize,
    pub move_deltas: Vec<Rat>,
    pub gap_deltas: Vec<Rat>,
    pub mover_max: Rat,
    pub gap_total: Rat,
    pub value_at_start: Rat,
    pub value_at_end: Rat,
    pub endpoint_gap: Rat,
    pub certified_bound: Rat,
    pub certified: bool,
}

pub fn evaluate_chain(oracle: &FunctionOracle, chain: &CollapseChain) -> ChainReport {
    let mut move_deltas = Vec::new();
    let mut gap_deltas = Vec::new();
    for step in &chain.steps {
        let delta = (oracle.eval(step.from_point()) - oracle.eval(step.to_point())).abs();
        match step {
            Step::Move { .. } => move_deltas.push(delta),
            Step::Gap { .. } => gap_deltas.push(delta),
        }
    }
    let mover_max = move_deltas.iter().cloned().max().unwrap_or_else(Rat::zero);
    let gap_total = gap_deltas
        .iter()
        .fold(Rat::zero(), |acc, d| acc + d.clone());
    let value_at_start = oracle.eval(&chain.start);
    let value_at_end = oracle.eval(&chain.end);
    let endpoint_gap = (&value_at_start - &value_at_end).abs();
    let certified_bound = Rat::from_int(move_deltas.len() as i64) * &mover_max + &gap_total;
    let certified = endpoint_gap <= certified_bound;
    ChainReport {
        oracle: oracle.descriptor(),
        moves: move_deltas.len(),
        move_deltas,
        gap_deltas,
        mover_max,
        gap_total,
        value_at_start,
        value_at_end,
        endpoint_gap,
        certified_bound,
        certified,
    }
}

/// Double-sided certificate: chains on both sides of a fan bound the
/// separation an oracle can achieve between the fan's two base points.
#[derive(Clone, Debug, Serialize)]
pub struct IdentificationReport {
    pub oracle: String,
    pub spoke: u32,
    pub base_separation: Rat,
    pub bound_a: Rat,
    pub bound_b: Rat,
    pub combined_bound: Rat,
    pub certified: bool,
    pub total_moves: usize,
    pub gap_total: Rat,
    pub implied_mover_floor: Rat,
    pub side_a: ChainReport,
    pub side_b: ChainReport,
    pub chain_a: CollapseChain,
    pub chain_b: CollapseChain,
}

impl IdentificationReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// Builds side-A and side-B chains on a common admissible spoke and reports
/// the combined inequality
/// `|f(x) - f(y)| <= bound_a + bound_b`.
pub fn certify_identification(
    fan: &FanId,
    fixed: &[PointAddress],
    oracle: &FunctionOracle,
    gamma: &Rat,
    spoke: Option<u32>,
) -> Result<IdentificationReport, CollapseError> {
    fan.validate()?;
    let spoke = spoke.unwrap_or_else(|| convergence_spoke_bound(fan, fixed));
    let chain_a = chain_on_side(fan, spoke, Side::A, gamma, fixed)?;
    let chain_b = chain_on_side(fan, spoke, Side::B, gamma, fixed)?;
    let side_a = evaluate_chain(oracle, &chain_a);
    let side_b = evaluate_chain(oracle, &chain_b);
    let base_separation = (oracle.eval(&fan.base(Side::A)) - oracle.eval(&fan.base(Side::B))).abs();
    let bound_a = side_a.certified_bound.clone();
    let bound_b = side_b.certified_bound.clone();
    let combined_bound = &bound_a + &bound_b;
    let certified = base_separation <= combined_bound;
    let total_moves = side_a.moves + side_b.moves;
    let gap_total = &side_a.gap_total + &side_b.gap_total;
    let implied_mover_floor = (&base_separation - &gap_total) / Rat::from_int(total_moves as i64);
    Ok(IdentificationReport {
        oracle: oracle.descriptor(),
        spoke,
        base_separation,
        bound_a,
        bound_b,
        combined_bound,
        certified,
        total_moves,
        gap_total,
        implied_mover_floor,
        side_a,
        side_b,
        chain_a,
        chain_b,
    })
}

// ---------------------------------------------------------------------------
// Uniformity refutation
// ---------------------------------------------------------------------------

/// Grid bounds for the refutation search.
#[derive(Clone, Debug, Serialize)]
pub struct RefuteSearch {
    pub max_spoke: u32,
    pub max_segment: u32,
    pub offset_grid: Rat,
}

impl Default for RefuteSearch {
    fn default() -> Self {
        RefuteSearch {
            max_spoke: 3,
            max_segment: 3,
            offset_grid: Rat::new(1, 32),
        }
    }
}

/// An explicit failure of uniformity: a stabilizer element and a point it
/// moves while changing the oracle value by at least the queried epsilon.
#[derive(Clone, Debug, Serialize)]
pub struct UniformityWitness {
    pub element: TowerElement,
    pub point: PointAddress,
    pub image: PointAddress,
    pub value_at_point: Rat,
    pub value_at_image: Rat,
    pub delta: Rat,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RefuteOutcome {
    Witness(UniformityWitness),
    NotFound {
        max_spoke: u32,
        max_segment: u32,
        offset_grid: Rat,
    },
}

impl RefuteOutcome {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// Searches grid movers in the stabilizer of the fixed set for a witness
/// with `|f(z) - f(vz)| >= eps`. Returns the first hit in deterministic
/// order (spoke, segment, side, grid position), or the searched bounds.
pub fn refute_uniformity(
    fan: &FanId,
    oracle: &FunctionOracle,
    eps: &Rat,
    fixed: &[PointAddress],
    search: &RefuteSearch,
) -> Result<RefuteOutcome, CollapseError> {
    fan.validate()?;
    if !eps.is_positive() {
        return Err(CollapseError::InvalidEpsilon(eps.clone()));
    }
    if !search.offset_grid.is_positive() || search.offset_grid >= Rat::one() {
        return Err(CollapseError::InvalidOffsets {
            segment: 0,
            a: search.offset_grid.clone(),
            b: search.offset_grid.clone(),
        });
    }
    let grid = &search.offset_grid;
    for spoke in 1..=search.max_spoke {
        for segment in 0..=search.max_segment {
            let (lo, hi) = segment_domain(segment);
            // offsets a = b = grid must leave room inside the segment
            if &lo + grid >= &hi - grid {
                continue;
            }
            for side in [Side::A, Side::B] {
                let mover = build_mover(fan, spoke, side, segment, grid, grid)?;
                if !mover.fixes(fixed.iter()) {
                    continue;
                }
                let mut t = &lo + grid;
                while t < hi {
                    let z = fan.point(t.clone(), spoke, side);
                    let image = mover.act(&z);
                    if image != z {
                        let value_at_point = oracle.eval(&z);
                        let value_at_image = oracle.eval(&image);
                        let delta = (&value_at_point - &value_at_image).abs();
                        if &delta >= eps {
                            return Ok(RefuteOutcome::Witness(UniformityWitness {
                                element: mover,
                                point: z,
                                image,
                                value_at_point,
                                value_at_image,
                                delta,
                            }));
                        }
                    }
                    t = t + grid;
                }
            }
        }
    }
    Ok(RefuteOutcome::NotFound {
        max_spoke: search.max_spoke,
        max_segment: search.max_segment,
        offset_grid: search.offset_grid.clone(),
    })
}
