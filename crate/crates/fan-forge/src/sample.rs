//! Seeded random generators for points, maps and tower elements.
//!
//! The verification suites and the acceptance tests draw their inputs from
//! here. Everything is driven by a ChaCha stream cipher, so a fixed seed
//! reproduces the exact same sample sequence on every platform.

use crate::group::{FanKey, FanLayerElement, TowerElement};
use crate::ordermaps::PLOrderMap;
use crate::rat::Rat;
use crate::space::{canonicalize, segment_domain, PointAddress, Side};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct Sampler {
    rng: ChaCha8Rng,
    pub max_spoke: u32,
    pub max_denom: u64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_spoke: 5,
            max_denom: 64,
        }
    }

    pub fn bool(&mut self) -> bool {
        self.rng.gen()
    }

    pub fn side(&mut self) -> Side {
        if self.bool() {
            Side::A
        } else {
            Side::B
        }
    }

    pub fn spoke(&mut self) -> u32 {
        self.rng.gen_range(1..=self.max_spoke)
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.rng.gen_range(0..len)
    }

    /// A coordinate in (0, 1] with denominator up to the bound.
    pub fn coordinate(&mut self) -> Rat {
        let d = self.rng.gen_range(1..=self.max_denom) as i64;
        let n = self.rng.gen_range(1..=d);
        Rat::new(n, d)
    }

    /// A marked coordinate 2^{-k}.
    pub fn marked_coordinate(&mut self) -> Rat {
        let max_k = self.max_denom.trailing_zeros().max(1) as i64;
        Rat::pow2(-self.rng.gen_range(0..=max_k))
    }

    /// A random canonical point of level at most `max_level`.
    pub fn point(&mut self, max_level: u32) -> PointAddress {
        if max_level == 0 || self.rng.gen_range(0..4) == 0 {
            return if self.bool() {
                PointAddress::base0()
            } else {
                PointAddress::base1()
            };
        }
        let level = self.rng.gen_range(1..=max_level);
        self.fan_point(level)
    }

    /// A random fan point created exactly at `level`.
    pub fn fan_point(&mut self, level: u32) -> PointAddress {
        assert!(level >= 1);
        let (x, y) = self.distinct_pair(level - 1);
        let t = self.coordinate();
        canonicalize(t, self.spoke(), self.side(), (x, y), level)
            .expect("sampled coordinates are canonicalizable")
    }

    /// A random marked fan point created exactly at `level`.
    pub fn marked_point(&mut self, level: u32) -> PointAddress {
        assert!(level >= 1);
        let (x, y) = self.distinct_pair(level - 1);
        let t = self.marked_coordinate();
        canonicalize(t, self.spoke(), self.side(), (x, y), level)
            .expect("sampled coordinates are canonicalizable")
    }

    /// Two distinct points of level at most `max_level`.
    pub fn distinct_pair(&mut self, max_level: u32) -> (PointAddress, PointAddress) {
        loop {
            let x = self.point(max_level);
            let y = self.point(max_level);
            if x != y {
                return (x, y);
            }
        }
    }

    /// A random order map on the given segment with up to two interior
    /// breakpoints, never the identity.
    pub fn segment_map(&mut self, segment: u32) -> PLOrderMap {
        let (lo, hi) = segment_domain(segment);
        let width = &hi - &lo;
        loop {
            let interior = self.rng.gen_range(1..=2usize);
            let mut fractions: Vec<(Rat, Rat)> = (0..interior)
                .map(|_| {
                    let d = 32i64;
                    let i = self.rng.gen_range(1..d);
                    let o = self.rng.gen_range(1..d);
                    (Rat::new(i, d), Rat::new(o, d))
                })
                .collect();
            fractions.sort();
            fractions.dedup_by(|a, b| a.0 == b.0 || a.1 == b.1);
            let mut bps = vec![(lo.clone(), lo.clone())];
            let mut last_out = Rat::zero();
            for (fi, fo) in fractions {
                if fo <= last_out {
                    continue;
                }
                last_out = fo.clone();
                bps.push((&lo + &width * fi, &lo + &width * fo));
            }
            bps.push((hi.clone(), hi.clone()));
            let map = PLOrderMap::new(bps).expect("sampled breakpoints are valid");
            if !map.is_identity() {
                return map;
            }
        }
    }

    /// A fan layer at `level` supported on up to `max_keys` keys whose pairs
    /// are drawn from the pool (falling back to fresh samples).
    pub fn fan_layer(
        &mut self,
        level: u32,
        max_keys: usize,
        pool: &[PointAddress],
    ) -> FanLayerElement {
        let mut layer = FanLayerElement::identity(level).expect("positive level");
        let keys = self.rng.gen_range(0..=max_keys);
        for _ in 0..keys {
            let (x, y) = self.pool_pair(level - 1, pool);
            let segment = self.rng.gen_range(0..4u32);
            let key = FanKey {
                pair: (x, y),
                spoke: self.spoke(),
                side: self.side(),
                segment,
            };
            let map = self.segment_map(segment);
            layer.insert(key, map).expect("sampled key is coherent");
        }
        layer
    }

    /// A tower element of exactly `level`, with supports biased towards the
    /// pool so that sampled actions collide with sampled points.
    pub fn tower(&mut self, level: u32, pool: &[PointAddress]) -> TowerElement {
        let layers = (1..=level)
            .map(|l| self.fan_layer(l, 2, pool))
            .collect::<Vec<_>>();
        TowerElement::from_layers(layers).expect("levels are coherent")
    }

    /// A pool of distinct sample points, always containing both base points.
    pub fn point_pool(&mut self, max_level: u32, extra: usize) -> Vec<PointAddress> {
        let mut pool = vec![PointAddress::base0(), PointAddress::base1()];
        for _ in 0..extra {
            let p = self.point(max_level);
            if !pool.contains(&p) {
                pool.push(p);
            }
        }
        pool
    }

    fn pool_pair(&mut self, max_level: u32, pool: &[PointAddress]) -> (PointAddress, PointAddress) {
        let eligible: Vec<&PointAddress> = pool.iter().filter(|p| p.level() <= max_level).collect();
        if eligible.len() < 2 {
            return self.distinct_pair(max_level);
        }
        loop {
            let x = eligible[self.index(eligible.len())];
            let y = eligible[self.index(eligible.len())];
            if x != y {
                return (x.clone(), y.clone());
            }
        }
    }
}
