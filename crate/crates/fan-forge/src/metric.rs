//! Exact evaluation of the capped path pseudometric, plus an independent
//! brute-force shortest-path oracle on finite truncations.
//!
//! The metric is defined recursively. Two distinct base points are at
//! distance 2. A fan point can move along its own spoke (each glued spoke is
//! an isometric copy of a length-2 segment joining the pair) or exit through
//! one of its two anchors; every other route factors through those exits.
//! The value is capped at 2 at every recursion level, so the whole space has
//! diameter 2 while each fan keeps its local geometry.

use crate::rat::Rat;
use crate::space::{PointAddress, Truncation};
use std::collections::{BinaryHeap, HashMap};
use std::sync::Mutex;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("{0} is not a fan point")]
    NotAFanPoint(PointAddress),
    #[error("point {0} is not in the truncation")]
    PointNotInTruncation(PointAddress),
}

/// Position of a fan point along its glued spoke, measured from the first
/// pair component: `t` on side `A`, `2 - t` on side `B`. The glued endpoint
/// sits at 1.
pub fn spoke_position(p: &PointAddress) -> Result<Rat, MetricError> {
    let fp = p
        .as_fan()
        .ok_or_else(|| MetricError::NotAFanPoint(p.clone()))?;
    Ok(match fp.side() {
        crate::space::Side::A => fp.t().clone(),
        crate::space::Side::B => Rat::two() - fp.t(),
    })
}

/// Exact distance between two canonical points.
pub fn dist(p: &PointAddress, q: &PointAddress) -> Rat {
    let mut memo = HashMap::new();
    dist_rec(p, q, &mut memo, true)
}

/// Minimum over the candidate routes without the top-level cap. Lower-level
/// distances inside the candidates stay capped. Crate-internal: the verify
/// suite uses it to confirm the pre-cap values never exceed 4.
pub(crate) fn dist_uncapped_top(p: &PointAddress, q: &PointAddress) -> Rat {
    let mut memo = HashMap::new();
    dist_rec(p, q, &mut memo, false)
}

fn dist_rec(
    p: &PointAddress,
    q: &PointAddress,
    memo: &mut HashMap<(PointAddress, PointAddress), Rat>,
    cap: bool,
) -> Rat {
    if p == q {
        return Rat::zero();
    }
    if p.as_fan().is_none() && q.as_fan().is_none() {
        // distinct base points
        return Rat::two();
    }
    if cap {
        if let Some(v) = memo.get(&(p.clone(), q.clone())) {
            return v.clone();
        }
    }
    let mut best: Option<Rat> = None;
    let mut consider = |cand: Rat| {
        if best.as_ref().is_none_or(|b| &cand < b) {
            best = Some(cand);
        }
    };
    // Direct route along a shared spoke.
    if let (Some(fp), Some(fq)) = (p.as_fan(), q.as_fan()) {
        if fp.pair() == fq.pair() && fp.created_at() == fq.created_at() && fp.spoke() == fq.spoke()
        {
            let pos_p = spoke_position(p).expect("fan point");
            let pos_q = spoke_position(q).expect("fan point");
            consider((pos_p - pos_q).abs());
        }
    }
    // Exit routes through anchors: the deeper point leaves its fan first.
    let (lp, lq) = (p.level(), q.level());
    if p.as_fan().is_some() && lp >= lq {
        for (u, cost) in p.anchors() {
            consider(cost + dist_rec(&u, q, memo, true));
        }
    }
    if q.as_fan().is_some() && lq >= lp {
        for (v, cost) in q.anchors() {
            consider(dist_rec(p, &v, memo, true) + cost);
        }
    }
    let mut value = best.expect("at least one candidate route exists");
    if cap && value > Rat::two() {
        value = Rat::two();
    }
    if cap {
        memo.insert((p.clone(), q.clone()), value.clone());
    }
    value
}

/// A shared memo table for distance queries. The cache is transparent:
/// results are identical with or without it, and it is safe to use from
/// several threads.
#[derive(Default)]
pub struct DistCache {
    map: Mutex<HashMap<(PointAddress, PointAddress), Rat>>,
}

impl DistCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dist(&self, p: &PointAddress, q: &PointAddress) -> Rat {
        let key = (p.clone(), q.clone());
        if let Some(v) = self.map.lock().unwrap().get(&key) {
            return v.clone();
        }
        let v = dist(p, q);
        self.map.lock().unwrap().insert(key, v.clone());
        v
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Exact shortest-path distance between two truncation points over the
/// truncation edges, capped at 2. Independent of [`dist`]: it only walks the
/// explicit finite graph.
pub fn dist_oracle(
    p: &PointAddress,
    q: &PointAddress,
    trunc: &Truncation,
) -> Result<Rat, MetricError> {
    TruncationGraph::new(trunc).shortest(p, q)
}

/// A truncation prepared for repeated shortest-path queries: the adjacency
/// is indexed once and edge lengths are scaled to exact integer multiples of
/// the grid step.
pub struct TruncationGraph<'t> {
    trunc: &'t Truncation,
    index: HashMap<&'t PointAddress, usize>,
    adjacency: Vec<Vec<(usize, u64)>>,
    // integer distance equal to the cap of 2
    limit: u64,
}

impl<'t> TruncationGraph<'t> {
    pub fn new(trunc: &'t Truncation) -> Self {
        let mut index: HashMap<&PointAddress, usize> = HashMap::with_capacity(trunc.points().len());
        for (i, pt) in trunc.points().iter().enumerate() {
            index.insert(pt, i);
        }
        let denom = Rat::from_int(trunc.denominator_bound() as i64);
        let scale = |len: &Rat| -> u64 {
            let scaled = len * &denom;
            assert!(
                scaled.is_integer() && scaled.is_positive(),
                "truncation edge lengths are positive multiples of the grid step"
            );
            u64::try_from(scaled.numer()).expect("edge length fits the scale")
        };
        let mut adjacency: Vec<Vec<(usize, u64)>> = vec![Vec::new(); trunc.points().len()];
        for e in trunc.edges() {
            let (a, b) = (index[&e.a], index[&e.b]);
            let w = scale(&e.length);
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
        }
        let limit = 2 * trunc.denominator_bound();
        TruncationGraph {
            trunc,
            index,
            adjacency,
            limit,
        }
    }

    fn index_of(&self, p: &PointAddress) -> Result<usize, MetricError> {
        self.index
            .get(p)
            .copied()
            .ok_or_else(|| MetricError::PointNotInTruncation(p.clone()))
    }

    fn to_rat(&self, units: u64) -> Rat {
        Rat::from_int(units as i64) / Rat::from_int(self.trunc.denominator_bound() as i64)
    }

    pub fn shortest(&self, p: &PointAddress, q: &PointAddress) -> Result<Rat, MetricError> {
        let values = self.shortest_many(p, std::slice::from_ref(q))?;
        Ok(values.into_iter().next().expect("one target"))
    }

    /// One source, many targets: a single traversal answers all of them.
    pub fn shortest_many(
        &self,
        p: &PointAddress,
        targets: &[PointAddress],
    ) -> Result<Vec<Rat>, MetricError> {
        let source = self.index_of(p)?;
        let target_ids = targets
            .iter()
            .map(|q| self.index_of(q))
            .collect::<Result<Vec<_>, _>>()?;
        // Paths longer than the cap all report as 2, so the frontier can
        // stop at twice the scale.
        let mut best: Vec<Option<u64>> = vec![None; self.adjacency.len()];
        let mut heap: BinaryHeap<std::cmp::Reverse<(u64, usize)>> = BinaryHeap::new();
        best[source] = Some(0);
        heap.push(std::cmp::Reverse((0, source)));
        let mut settled = 0usize;
        while let Some(std::cmp::Reverse((d, v))) = heap.pop() {
            if best[v] != Some(d) {
                continue;
            }
            settled += 1;
            if settled == self.adjacency.len() {
                break;
            }
            for &(w, len) in &self.adjacency[v] {
                let nd = d + len;
                if nd <= self.limit && best[w].is_none_or(|cur| nd < cur) {
                    best[w] = Some(nd);
                    heap.push(std::cmp::Reverse((nd, w)));
                }
            }
        }
        Ok(target_ids
            .into_iter()
            .map(|t| match best[t] {
                Some(units) if units <= self.limit => self.to_rat(units),
                _ => Rat::two(),
            })
            .collect())
    }
}
