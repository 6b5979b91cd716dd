//! Canonical addresses for points of the iterated double-fan space.
//!
//! The space starts from two base points at distance 2 and, at every level,
//! attaches a rational double fan to each ordered pair of distinct points
//! built so far. A point is either a base point or a fan coordinate
//! `(t, spoke, side, pair, created_at)` with `0 < t <= 1`. The gluing rules
//! are folded into canonicalization: `t = 0` collapses to the side's base
//! point and the shared endpoint `t = 1` is always stored with side `A`.
//!
//! Textual grammar (bit-exact):
//! `point := "b0" | "b1" | "fan(" rat ";" nat ";" ("A"|"B") ";" nat ";" point "," point ")"`.

use crate::rat::Rat;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("coordinate {0} outside [0,1]")]
    InvalidCoordinate(Rat),
    #[error("fan pair has equal components {0}")]
    DegeneratePair(PointAddress),
    #[error("pair component {point} has level {found}, needs level < {limit}")]
    LevelViolation {
        point: PointAddress,
        found: u32,
        limit: u32,
    },
    #[error("spoke index must be positive")]
    InvalidSpoke,
    #[error("invalid truncation bounds: {0}")]
    InvalidBounds(String),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

/// The two base points the whole construction grows from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseTag {
    B0,
    B1,
}

/// The two sides of a double fan. Side `A` climbs away from the first pair
/// component, side `B` from the second; they meet at the glued endpoint.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::A => write!(f, "A"),
            Side::B => write!(f, "B"),
        }
    }
}

/// Interior data of a fan point. Only built through [`canonicalize`], so the
/// canonical invariants always hold.
#[derive(Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FanPoint {
    t: Rat,
    spoke: u32,
    side: Side,
    pair: (PointAddress, PointAddress),
    created_at: u32,
}

impl FanPoint {
    pub fn t(&self) -> &Rat {
        &self.t
    }

    pub fn spoke(&self) -> u32 {
        self.spoke
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn pair(&self) -> &(PointAddress, PointAddress) {
        &self.pair
    }

    pub fn created_at(&self) -> u32 {
        self.created_at
    }
}

/// Canonical address of a point of the iterated space.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointAddress {
    Base(BaseTag),
    Fan(Arc<FanPoint>),
}

impl PointAddress {
    pub fn base0() -> Self {
        PointAddress::Base(BaseTag::B0)
    }

    pub fn base1() -> Self {
        PointAddress::Base(BaseTag::B1)
    }

    pub fn as_fan(&self) -> Option<&FanPoint> {
        match self {
            PointAddress::Base(_) => None,
            PointAddress::Fan(fp) => Some(fp),
        }
    }

    /// The least construction level containing this point: 0 for base points,
    /// `created_at` for fan points.
    pub fn level(&self) -> u32 {
        match self {
            PointAddress::Base(_) => 0,
            PointAddress::Fan(fp) => fp.created_at,
        }
    }

    /// True for fan points at coordinate 2^{-k}. These points are fixed by
    /// every group element.
    pub fn is_marked(&self) -> bool {
        match self {
            PointAddress::Base(_) => false,
            PointAddress::Fan(fp) => fp.t.is_pow2_reciprocal(),
        }
    }

    /// Exit costs of a point to its base pair: a base point anchors to itself
    /// at cost 0, a fan point to both pair components at costs `t` and `2-t`
    /// (swapped on side `B`).
    pub fn anchors(&self) -> Vec<(PointAddress, Rat)> {
        match self {
            PointAddress::Base(_) => vec![(self.clone(), Rat::zero())],
            PointAddress::Fan(fp) => {
                let near = fp.t.clone();
                let far = Rat::two() - &fp.t;
                match fp.side {
                    Side::A => vec![(fp.pair.0.clone(), near), (fp.pair.1.clone(), far)],
                    Side::B => vec![(fp.pair.0.clone(), far), (fp.pair.1.clone(), near)],
                }
            }
        }
    }

    /// The smallest set containing this point and closed under taking pair
    /// components of fan points.
    pub fn anchor_closure(&self) -> BTreeSet<PointAddress> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self.clone()];
        while let Some(p) = stack.pop() {
            if let PointAddress::Fan(fp) = &p {
                if !out.contains(&fp.pair.0) {
                    stack.push(fp.pair.0.clone());
                }
                if !out.contains(&fp.pair.1) {
                    stack.push(fp.pair.1.clone());
                }
            }
            out.insert(p);
        }
        out
    }
}

/// Builds the canonical address for a raw fan coordinate, applying the
/// identification rules: `t = 0` is the side's base point and `t = 1` is the
/// glued endpoint stored with side `A`.
pub fn canonicalize(
    t: Rat,
    spoke: u32,
    side: Side,
    pair: (PointAddress, PointAddress),
    created_at: u32,
) -> Result<PointAddress, SpaceError> {
    if spoke == 0 {
        return Err(SpaceError::InvalidSpoke);
    }
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
    if t.is_negative() || t > Rat::one() {
        return Err(SpaceError::InvalidCoordinate(t));
    }
    if t.is_zero() {
        return Ok(match side {
            Side::A => pair.0,
            Side::B => pair.1,
        });
    }
    let side = if t == Rat::one() { Side::A } else { side };
    Ok(PointAddress::Fan(Arc::new(FanPoint {
        t,
        spoke,
        side,
        pair,
        created_at,
    })))
}

/// The index `j >= 0` of the segment `(2^{-j-1}, 2^{-j}]` containing `t`.
/// Marked coordinates belong to the segment they bound from above.
pub fn segment_index(t: &Rat) -> Result<u32, SpaceError> {
    if !t.is_positive() || t > &Rat::one() {
        return Err(SpaceError::InvalidCoordinate(t.clone()));
    }
    let mut j = 0u32;
    while t <= &Rat::pow2(-(j as i64) - 1) {
        j += 1;
    }
    Ok(j)
}

/// The closed dyadic interval `[2^{-j-1}, 2^{-j}]` of segment `j`.
pub fn segment_domain(j: u32) -> (Rat, Rat) {
    (Rat::pow2(-(j as i64) - 1), Rat::pow2(-(j as i64)))
}

// ---------------------------------------------------------------------------
// Textual form
// ---------------------------------------------------------------------------

impl fmt::Display for PointAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointAddress::Base(BaseTag::B0) => write!(f, "b0"),
            PointAddress::Base(BaseTag::B1) => write!(f, "b1"),
            PointAddress::Fan(fp) => write!(
                f,
                "fan({};{};{};{};{},{})",
                fp.t, fp.spoke, fp.side, fp.created_at, fp.pair.0, fp.pair.1
            ),
        }
    }
}

impl fmt::Debug for PointAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: impl Into<String>) -> SpaceError {
        SpaceError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn eat(&mut self, token: &str) -> Result<(), SpaceError> {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", token)))
        }
    }

    fn digits(&mut self) -> Result<&'a str, SpaceError> {
        let rest = self.rest();
        let end = rest
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(rest.len());
        if end == 0 {
            return Err(self.error("expected digits"));
        }
        self.pos += end;
        Ok(&rest[..end])
    }

    fn nat(&mut self) -> Result<u32, SpaceError> {
        let at = self.pos;
        let digits = self.digits()?;
        digits.parse().map_err(|_| SpaceError::Syntax {
            pos: at,
            msg: "number too large".into(),
        })
    }

    fn rational(&mut self) -> Result<Rat, SpaceError> {
        let at = self.pos;
        let negative = self.rest().starts_with('-');
        if negative {
            self.pos += 1;
        }
        let numer = self.digits()?.to_string();
        let mut text = if negative { format!("-{numer}") } else { numer };
        if self.rest().starts_with('/') {
            self.pos += 1;
            text.push('/');
            text.push_str(self.digits()?);
        }
        text.parse().map_err(|_| SpaceError::Syntax {
            pos: at,
            msg: "bad rational".into(),
        })
    }

    fn point(&mut self) -> Result<PointAddress, SpaceError> {
        if self.rest().starts_with("b0") {
            self.pos += 2;
            return Ok(PointAddress::base0());
        }
        if self.rest().starts_with("b1") {
            self.pos += 2;
            return Ok(PointAddress::base1());
        }
        if self.rest().starts_with("fan(") {
            self.pos += 4;
            let t = self.rational()?;
            self.eat(";")?;
            let spoke = self.nat()?;
            self.eat(";")?;
            let side = if self.rest().starts_with('A') {
                self.pos += 1;
                Side::A
            } else if self.rest().starts_with('B') {
                self.pos += 1;
                Side::B
            } else {
                return Err(self.error("expected side `A` or `B`"));
            };
            self.eat(";")?;
            let created_at = self.nat()?;
            self.eat(";")?;
            let x = self.point()?;
            self.eat(",")?;
            let y = self.point()?;
            self.eat(")")?;
            let at = self.pos;
            return canonicalize(t, spoke, side, (x, y), created_at).map_err(|e| match e {
                SpaceError::Syntax { .. } => e,
                other => SpaceError::Syntax {
                    pos: at,
                    msg: other.to_string(),
                },
            });
        }
        Err(self.error("expected `b0`, `b1` or `fan(`"))
    }
}

/// Parses a point literal; the result is canonical.
pub fn parse_point(text: &str) -> Result<PointAddress, SpaceError> {
    let mut parser = Parser { src: text, pos: 0 };
    let point = parser.point()?;
    if parser.pos != text.len() {
        return Err(parser.error("trailing input"));
    }
    Ok(point)
}

impl FromStr for PointAddress {
    type Err = SpaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_point(s)
    }
}

impl serde::Serialize for PointAddress {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for PointAddress {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_point(&s).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Finite truncations
// ---------------------------------------------------------------------------

/// One undirected edge of a truncation graph with its exact length.
#[derive(Clone, Debug)]
pub struct TruncationEdge {
    pub a: PointAddress,
    pub b: PointAddress,
    pub length: Rat,
}

/// A finite approximation of the space: all fan points on a dyadic grid up
/// to a level, spoke and denominator bound, with spoke-adjacency edges. Used
/// by the shortest-path distance oracle and the DOT export.
pub struct Truncation {
    max_level: u32,
    max_spoke: u32,
    denominator_bound: u64,
    points: Vec<PointAddress>,
    edges: Vec<TruncationEdge>,
}

impl Truncation {
    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn max_spoke(&self) -> u32 {
        self.max_spoke
    }

    pub fn denominator_bound(&self) -> u64 {
        self.denominator_bound
    }

    pub fn points(&self) -> &[PointAddress] {
        &self.points
    }

    pub fn edges(&self) -> &[TruncationEdge] {
        &self.edges
    }

    pub fn contains(&self, p: &PointAddress) -> bool {
        self.points.iter().any(|q| q == p)
    }

    /// Graphviz DOT rendering: one node per point, one undirected edge per
    /// truncation edge labeled with its rational length.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph truncation {\n");
        for p in &self.points {
            out.push_str(&format!("  \"{}\";\n", p));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  \"{}\" -- \"{}\" [label=\"{}\"];\n",
                e.a, e.b, e.length
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Enumerates the truncation with levels `<= max_level`, spokes `<= max_spoke`
/// and grid coordinates `i/denom`. `denom` must be a power of two at least 2
/// so the grid passes exactly through the marked points down to `1/denom`.
pub fn enumerate_truncation(
    max_level: u32,
    max_spoke: u32,
    denom: u64,
) -> Result<Truncation, SpaceError> {
    if max_spoke == 0 {
        return Err(SpaceError::InvalidBounds("max_spoke must be >= 1".into()));
    }
    if denom < 2 || !denom.is_power_of_two() {
        return Err(SpaceError::InvalidBounds(format!(
            "denominator bound {} is not a power of two >= 2",
            denom
        )));
    }
    let grid = Rat::new(1, denom as i64);
    let mut points = vec![PointAddress::base0(), PointAddress::base1()];
    let mut edges = vec![TruncationEdge {
        a: PointAddress::base0(),
        b: PointAddress::base1(),
        length: Rat::two(),
    }];
    for level in 1..=max_level {
        let prev = points.clone();
        for x in &prev {
            for y in &prev {
                if x == y {
                    continue;
                }
                for spoke in 1..=max_spoke {
                    for side in [Side::A, Side::B] {
                        let anchor = match side {
                            Side::A => x.clone(),
                            Side::B => y.clone(),
                        };
                        let mut last = anchor;
                        for i in 1..=denom {
                            let t = Rat::new(i as i64, denom as i64);
                            let cur = canonicalize(t, spoke, side, (x.clone(), y.clone()), level)
                                .expect("grid point is canonicalizable");
                            edges.push(TruncationEdge {
                                a: last,
                                b: cur.clone(),
                                length: grid.clone(),
                            });
                            // The glued endpoint was already recorded while
                            // walking side A.
                            if !(side == Side::B && i == denom) {
                                points.push(cur.clone());
                            }
                            last = cur;
                        }
                    }
                }
            }
        }
    }
    Ok(Truncation {
        max_level,
        max_spoke,
        denominator_bound: denom,
        points,
        edges,
    })
}
