//! Piecewise-linear order bijections of a closed rational interval.
//!
//! A `PLOrderMap` fixes both endpoints of its interval, maps rationals to
//! rationals, and is strictly increasing, so it represents one computable
//! segment homeomorphism. The maps on a fixed interval form a group under
//! composition; composition normalizes the breakpoint list (collinear
//! interior points are dropped) so equal maps have equal representations.
//!
//! Textual form: `pl[lo,hi]{(i1,o1),(i2,o2),...}` with rationals as `p/q`.

use crate::rat::Rat;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlError {
    #[error("argument {arg} outside map domain [{lo},{hi}]")]
    OutOfDomain { arg: Rat, lo: Rat, hi: Rat },
    #[error("maps have different domains: [{0},{1}] vs [{2},{3}]")]
    DomainMismatch(Rat, Rat, Rat, Rat),
    #[error("invalid breakpoints: {0}")]
    InvalidBreakpoints(String),
    #[error("cannot parse map `{text}` at byte {pos}: {msg}")]
    Parse {
        text: String,
        pos: usize,
        msg: String,
    },
}

/// A piecewise-linear order bijection of `[lo,hi]` onto itself fixing the
/// endpoints, given by its breakpoint list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PLOrderMap {
    // Invariants: len >= 2, first = (lo,lo), last = (hi,hi), inputs and
    // outputs strictly increasing, no collinear interior points.
    breakpoints: Vec<(Rat, Rat)>,
}

impl PLOrderMap {
    pub fn new(breakpoints: Vec<(Rat, Rat)>) -> Result<Self, PlError> {
        if breakpoints.len() < 2 {
            return Err(PlError::InvalidBreakpoints(
                "need at least the two endpoint breakpoints".into(),
            ));
        }
        let first = &breakpoints[0];
        let last = &breakpoints[breakpoints.len() - 1];
        if first.0 != first.1 {
            return Err(PlError::InvalidBreakpoints(format!(
                "first breakpoint ({},{}) does not fix the left endpoint",
                first.0, first.1
            )));
        }
        if last.0 != last.1 {
            return Err(PlError::InvalidBreakpoints(format!(
                "last breakpoint ({},{}) does not fix the right endpoint",
                last.0, last.1
            )));
        }
        if first.0 >= last.0 {
            return Err(PlError::InvalidBreakpoints(format!(
                "domain [{},{}] is empty",
                first.0, last.0
            )));
        }
        for w in breakpoints.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(PlError::InvalidBreakpoints(format!(
                    "inputs not strictly increasing at {}",
                    w[1].0
                )));
            }
            if w[0].1 >= w[1].1 {
                return Err(PlError::InvalidBreakpoints(format!(
                    "outputs not strictly increasing at {}",
                    w[1].0
                )));
            }
        }
        Ok(PLOrderMap {
            breakpoints: normalize(breakpoints),
        })
    }

    pub fn identity(lo: Rat, hi: Rat) -> Result<Self, PlError> {
        PLOrderMap::new(vec![(lo.clone(), lo), (hi.clone(), hi)])
    }

    pub fn lo(&self) -> &Rat {
        &self.breakpoints[0].0
    }

    pub fn hi(&self) -> &Rat {
        &self.breakpoints[self.breakpoints.len() - 1].0
    }

    pub fn breakpoints(&self) -> &[(Rat, Rat)] {
        &self.breakpoints
    }

    pub fn is_identity(&self) -> bool {
        self.breakpoints.len() == 2
    }

    /// Evaluates the map at `t` by linear interpolation.
    pub fn eval(&self, t: &Rat) -> Result<Rat, PlError> {
        if t < self.lo() || t > self.hi() {
            return Err(PlError::OutOfDomain {
                arg: t.clone(),
                lo: self.lo().clone(),
                hi: self.hi().clone(),
            });
        }
        // Index of the last breakpoint with input <= t.
        let idx = self.breakpoints.partition_point(|(i, _)| i <= t) - 1;
        let (i0, o0) = &self.breakpoints[idx];
        if i0 == t {
            return Ok(o0.clone());
        }
        let (i1, o1) = &self.breakpoints[idx + 1];
        Ok(o0 + (t - i0) * (o1 - o0) / (i1 - i0))
    }

    /// Composition `self(other(t))`. Both maps must share the same domain.
    pub fn compose(&self, other: &Self) -> Result<Self, PlError> {
        if self.lo() != other.lo() || self.hi() != other.hi() {
            return Err(PlError::DomainMismatch(
                self.lo().clone(),
                self.hi().clone(),
                other.lo().clone(),
                other.hi().clone(),
            ));
        }
        // Breakpoints of the composition occur where `other` breaks or where
        // `other` hits a breakpoint input of `self`.
        let other_inv = other.invert();
        let mut inputs: Vec<Rat> = other.breakpoints.iter().map(|(i, _)| i.clone()).collect();
        for (i, _) in &self.breakpoints {
            inputs.push(other_inv.eval(i).expect("breakpoint input in domain"));
        }
        inputs.sort();
        inputs.dedup();
        let bps = inputs
            .into_iter()
            .map(|i| {
                let o = self
                    .eval(&other.eval(&i).expect("refined input in domain"))
                    .expect("intermediate value in domain");
                (i, o)
            })
            .collect();
        PLOrderMap::new(bps)
    }

    /// The inverse bijection: breakpoints with input and output swapped.
    pub fn invert(&self) -> Self {
        PLOrderMap {
            breakpoints: self
                .breakpoints
                .iter()
                .map(|(i, o)| (o.clone(), i.clone()))
                .collect(),
        }
    }
}

/// Drops interior breakpoints collinear with their neighbours.
fn normalize(bps: Vec<(Rat, Rat)>) -> Vec<(Rat, Rat)> {
    let mut out: Vec<(Rat, Rat)> = Vec::with_capacity(bps.len());
    for bp in bps {
        while out.len() >= 2 {
            let a = &out[out.len() - 2];
            let b = &out[out.len() - 1];
            // b lies on the segment from a to bp iff the slopes agree.
            let lhs = (&b.1 - &a.1) * (&bp.0 - &a.0);
            let rhs = (&bp.1 - &a.1) * (&b.0 - &a.0);
            if lhs == rhs {
                out.pop();
            } else {
                break;
            }
        }
        out.push(bp);
    }
    out
}

impl fmt::Display for PLOrderMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pl[{},{}]{{", self.lo(), self.hi())?;
        for (k, (i, o)) in self.breakpoints.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "({},{})", i, o)?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for PLOrderMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for PLOrderMap {
    type Err = PlError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |pos: usize, msg: &str| PlError::Parse {
            text: s.to_string(),
            pos,
            msg: msg.to_string(),
        };
        let rest = s
            .strip_prefix("pl[")
            .ok_or_else(|| err(0, "expected `pl[`"))?;
        let close = rest.find(']').ok_or_else(|| err(s.len(), "expected `]`"))?;
        let header = &rest[..close];
        let (lo_s, hi_s) = header
            .split_once(',')
            .ok_or_else(|| err(3, "expected `lo,hi`"))?;
        let lo: Rat = lo_s.parse().map_err(|_| err(3, "bad rational"))?;
        let hi: Rat = hi_s
            .parse()
            .map_err(|_| err(3 + lo_s.len() + 1, "bad rational"))?;
        let body = &rest[close + 1..];
        let body = body
            .strip_prefix('{')
            .and_then(|b| b.strip_suffix('}'))
            .ok_or_else(|| err(3 + close, "expected `{...}`"))?;
        let mut bps = Vec::new();
        let mut cursor = body;
        while !cursor.is_empty() {
            let inner = cursor
                .strip_prefix('(')
                .ok_or_else(|| err(s.len() - cursor.len(), "expected `(`"))?;
            let close = inner
                .find(')')
                .ok_or_else(|| err(s.len(), "expected `)`"))?;
            let pair = &inner[..close];
            let (i_s, o_s) = pair
                .split_once(',')
                .ok_or_else(|| err(s.len() - inner.len(), "expected `i,o`"))?;
            let i: Rat = i_s
                .parse()
                .map_err(|_| err(s.len() - inner.len(), "bad rational"))?;
            let o: Rat = o_s
                .parse()
                .map_err(|_| err(s.len() - inner.len(), "bad rational"))?;
            bps.push((i, o));
            cursor = &inner[close + 1..];
            if let Some(next) = cursor.strip_prefix(',') {
                cursor = next;
            } else if !cursor.is_empty() {
                return Err(err(s.len() - cursor.len(), "expected `,` or end"));
            }
        }
        let map = PLOrderMap::new(bps)?;
        if map.lo() != &lo || map.hi() != &hi {
            return Err(PlError::InvalidBreakpoints(
                "declared interval disagrees with breakpoints".into(),
            ));
        }
        Ok(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn sample_map() -> PLOrderMap {
        // (1/4,1/4),(5/16,7/16),(1/2,1/2)
        PLOrderMap::new(vec![
            (r(1, 4), r(1, 4)),
            (r(5, 16), r(7, 16)),
            (r(1, 2), r(1, 2)),
        ])
        .unwrap()
    }

    /// Independent interpolation: the convex-combination form, as opposed to
    /// the slope form used by `eval`.
    fn interpolate_convex(a: &(Rat, Rat), b: &(Rat, Rat), t: &Rat) -> Rat {
        (&a.1 * (&b.0 - t) + &b.1 * (t - &a.0)) / (&b.0 - &a.0)
    }

    #[test]
    fn identity_eval() {
        let id = PLOrderMap::identity(r(1, 2), r(1, 1)).unwrap();
        assert_eq!(id.eval(&r(3, 4)).unwrap(), r(3, 4));
    }

    #[test]
    fn breakpoint_lookup() {
        assert_eq!(sample_map().eval(&r(5, 16)).unwrap(), r(7, 16));
    }

    #[test]
    fn interpolated_value() {
        // Between (1/4,1/4) and (5/16,7/16) the slope is 3.
        let m = sample_map();
        let expected = interpolate_convex(&(r(1, 4), r(1, 4)), &(r(5, 16), r(7, 16)), &r(9, 32));
        assert_eq!(expected, r(11, 32));
        assert_eq!(m.eval(&r(9, 32)).unwrap(), r(11, 32));
    }

    #[test]
    fn eval_outside_domain_fails() {
        let m = sample_map();
        assert!(matches!(m.eval(&r(1, 8)), Err(PlError::OutOfDomain { .. })));
        assert!(matches!(m.eval(&r(3, 4)), Err(PlError::OutOfDomain { .. })));
    }

    #[test]
    fn endpoints_fixed() {
        let m = sample_map();
        assert_eq!(m.eval(&r(1, 4)).unwrap(), r(1, 4));
        assert_eq!(m.eval(&r(1, 2)).unwrap(), r(1, 2));
    }

    #[test]
    fn compose_with_identity() {
        let m = sample_map();
        let id = PLOrderMap::identity(r(1, 4), r(1, 2)).unwrap();
        assert_eq!(id.compose(&m).unwrap(), m);
        assert_eq!(m.compose(&id).unwrap(), m);
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let m = sample_map();
        let composed = m.compose(&m.invert()).unwrap();
        assert!(composed.is_identity());
        let composed = m.invert().compose(&m).unwrap();
        assert!(composed.is_identity());
    }

    #[test]
    fn compose_matches_sequential_eval_on_grid() {
        let m = sample_map();
        let mm = m.compose(&m).unwrap();
        let lo = r(1, 4);
        let width = r(1, 4);
        for k in 0..=50i64 {
            let t = &lo + &width * r(k, 50);
            let seq = m.eval(&m.eval(&t).unwrap()).unwrap();
            assert_eq!(mm.eval(&t).unwrap(), seq, "mismatch at t={}", t);
        }
        assert_eq!(mm.eval(&r(5, 16)).unwrap(), m.eval(&r(7, 16)).unwrap());
    }

    #[test]
    fn compose_domain_mismatch() {
        let m = sample_map();
        let id = PLOrderMap::identity(r(0, 1), r(1, 1)).unwrap();
        assert!(matches!(m.compose(&id), Err(PlError::DomainMismatch(..))));
    }

    #[test]
    fn invert_swaps_breakpoints() {
        let m = sample_map();
        let inv = m.invert();
        assert_eq!(
            inv.breakpoints(),
            &[(r(1, 4), r(1, 4)), (r(7, 16), r(5, 16)), (r(1, 2), r(1, 2))]
        );
        let id = PLOrderMap::identity(r(1, 4), r(1, 2)).unwrap();
        assert_eq!(id.invert(), id);
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(PLOrderMap::new(vec![(r(0, 1), r(0, 1))]).is_err());
        // endpoint not fixed
        assert!(PLOrderMap::new(vec![(r(0, 1), r(1, 8)), (r(1, 1), r(1, 1))]).is_err());
        // inputs not increasing
        assert!(PLOrderMap::new(vec![
            (r(0, 1), r(0, 1)),
            (r(1, 2), r(1, 4)),
            (r(1, 2), r(3, 4)),
            (r(1, 1), r(1, 1)),
        ])
        .is_err());
        // outputs not increasing
        assert!(PLOrderMap::new(vec![
            (r(0, 1), r(0, 1)),
            (r(1, 4), r(1, 2)),
            (r(1, 2), r(1, 4)),
            (r(1, 1), r(1, 1)),
        ])
        .is_err());
    }

    #[test]
    fn normalization_drops_collinear_points() {
        let m = PLOrderMap::new(vec![
            (r(0, 1), r(0, 1)),
            (r(1, 4), r(1, 4)),
            (r(1, 2), r(1, 2)),
            (r(1, 1), r(1, 1)),
        ])
        .unwrap();
        assert!(m.is_identity());
        assert_eq!(m, PLOrderMap::identity(r(0, 1), r(1, 1)).unwrap());
    }

    #[test]
    fn display_parse_round_trip() {
        let m = sample_map();
        assert_eq!(
            m.to_string(),
            "pl[1/4,1/2]{(1/4,1/4),(5/16,7/16),(1/2,1/2)}"
        );
        let back: PLOrderMap = m.to_string().parse().unwrap();
        assert_eq!(back, m);
        assert!("pl[0,1]{(0,0)}".parse::<PLOrderMap>().is_err());
        assert!("nonsense".parse::<PLOrderMap>().is_err());
    }

    /// Strategy: a valid map on [0,1] with up to 4 interior breakpoints with
    /// denominators up to 64.
    fn arb_unit_map() -> impl Strategy<Value = PLOrderMap> {
        let interior = proptest::collection::vec((1i64..64, 1i64..64), 0..4);
        (interior.clone(), interior).prop_map(|(ins, outs)| {
            let to_rats = |v: Vec<(i64, i64)>| {
                let mut rs: Vec<Rat> = v
                    .into_iter()
                    .map(|(n, d)| {
                        let (n, d) = if n < d { (n, d) } else { (d, n + 1) };
                        Rat::new(n.max(1), d.max(2))
                    })
                    .filter(|r| r.is_positive() && r < &Rat::one())
                    .collect();
                rs.sort();
                rs.dedup();
                rs
            };
            let mut ins = to_rats(ins);
            let mut outs = to_rats(outs);
            let n = ins.len().min(outs.len());
            ins.truncate(n);
            outs.truncate(n);
            let mut bps = vec![(Rat::zero(), Rat::zero())];
            bps.extend(ins.into_iter().zip(outs));
            bps.push((Rat::one(), Rat::one()));
            PLOrderMap::new(bps).unwrap()
        })
    }

    proptest! {
        #[test]
        fn eval_stays_in_range(m in arb_unit_map(), n in 0i64..=64) {
            let t = Rat::new(n, 64);
            let o = m.eval(&t).unwrap();
            prop_assert!(&o >= m.lo() && &o <= m.hi());
        }

        #[test]
        fn eval_strictly_monotone(m in arb_unit_map(), a in 0i64..64, b in 0i64..=64) {
            let (a, b) = if a < b { (a, b) } else { (b, a + 1) };
            let (ta, tb) = (Rat::new(a, 64), Rat::new(b, 64));
            prop_assert!(m.eval(&ta).unwrap() < m.eval(&tb).unwrap());
        }

        #[test]
        fn invert_round_trip(m in arb_unit_map(), n in 0i64..=64) {
            let t = Rat::new(n, 64);
            let inv = m.invert();
            prop_assert_eq!(inv.eval(&m.eval(&t).unwrap()).unwrap(), t.clone());
            prop_assert_eq!(m.eval(&inv.eval(&t).unwrap()).unwrap(), t);
        }

        #[test]
        fn compose_associative_pointwise(
            a in arb_unit_map(),
            b in arb_unit_map(),
            c in arb_unit_map(),
            n in 0i64..=64,
        ) {
            let t = Rat::new(n, 64);
            let left = a.compose(&b).unwrap().compose(&c).unwrap();
            let right = a.compose(&b.compose(&c).unwrap()).unwrap();
            prop_assert_eq!(left.eval(&t).unwrap(), right.eval(&t).unwrap());
            // canonical representations coincide as well
            prop_assert_eq!(left, right);
        }

        #[test]
        fn map_parser_never_panics(s in "\\PC*") {
            let _ = s.parse::<PLOrderMap>();
        }
    }
}
