//! Acceptance suite: one test per criterion, each printing a pass line with
//! its runtime. Run with `cargo test --test acceptance -- --nocapture` to see
//! the lines.

use fan_forge::collapse::{
    build_mover, certify_identification, collapse_chain, evaluate_chain, refute_uniformity, FanId,
    FunctionOracle, RefuteOutcome, RefuteSearch, Step,
};
use fan_forge::group::TowerElement;
use fan_forge::metric::{dist, DistCache, TruncationGraph};
use fan_forge::sample::Sampler;
use fan_forge::space::{canonicalize, enumerate_truncation, segment_index, PointAddress, Side};
use fan_forge::Rat;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

fn b0() -> PointAddress {
    PointAddress::base0()
}

fn b1() -> PointAddress {
    PointAddress::base1()
}

fn base_fan() -> FanId {
    FanId::new((b0(), b1()), 1).unwrap()
}

fn report(criterion: &str, start: Instant, budget: Duration) {
    let elapsed = start.elapsed();
    println!("criterion {criterion}: PASS in {elapsed:?}");
    assert!(
        elapsed < budget,
        "criterion {criterion} exceeded its {budget:?} budget: {elapsed:?}"
    );
}

#[test]
fn criterion_01_base_case_exact() {
    let (p, q) = (b0(), b1());
    let start = Instant::now();
    let d = dist(&p, &q);
    let elapsed = start.elapsed();
    assert_eq!(d, Rat::two());
    println!("criterion 01 (base case exact): PASS in {elapsed:?}");
    assert!(elapsed < Duration::from_millis(1), "took {elapsed:?}");
}

#[test]
fn criterion_02_metric_axioms() {
    let start = Instant::now();
    let mut s = Sampler::new(0x02);
    let cache = DistCache::new();
    for i in 0..10_000u32 {
        let p = s.point(3);
        let q = s.point(3);
        let r = s.point(3);
        let dpq = cache.dist(&p, &q);
        let dqp = cache.dist(&q, &p);
        assert_eq!(dpq, dqp, "symmetry failed for {p} {q}");
        assert!(dpq <= Rat::two(), "bound failed for {p} {q}");
        if p == q {
            assert!(dpq.is_zero());
        } else {
            assert!(dpq.is_positive(), "separation failed for {p} {q}");
        }
        assert!(cache.dist(&p, &p).is_zero());
        let dpr = cache.dist(&p, &r);
        let dqr = cache.dist(&q, &r);
        assert!(
            dpr <= &dpq + &dqr,
            "triangle failed for {p} {q} {r}: {dpr} > {dpq} + {dqr}"
        );
        if i % 100 == 0 {
            // the shared memo is transparent
            assert_eq!(dist(&p, &q), dpq);
        }
    }
    report(
        "02 (metric axioms, 10000 triples)",
        start,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_03_formula_reproduction() {
    let start = Instant::now();
    let mut s = Sampler::new(0x03);
    let base_metric = |a: &PointAddress, z: &PointAddress| {
        if a == z {
            Rat::zero()
        } else {
            Rat::two()
        }
    };
    for _ in 0..1_000 {
        // a fan point over a base-anchored pair, at any creation level
        let pair = if s.bool() { (b0(), b1()) } else { (b1(), b0()) };
        let level = 1 + s.index(3) as u32;
        let p = canonicalize(s.coordinate(), s.spoke(), s.side(), pair.clone(), level).unwrap();
        let Some(fp) = p.as_fan() else { continue };
        let (cost_x, cost_y) = match fp.side() {
            Side::A => (fp.t().clone(), Rat::two() - fp.t()),
            Side::B => (Rat::two() - fp.t(), fp.t().clone()),
        };
        for z in [b0(), b1()] {
            let expected = (&cost_x + base_metric(&pair.0, &z))
                .min(&cost_y + base_metric(&pair.1, &z))
                .min(Rat::two());
            assert_eq!(dist(&p, &z), expected, "formula failed for p={p} z={z}");
        }
    }
    report(
        "03 (anchor formula, 1000 points)",
        start,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_04_oracle_equivalence() {
    let start = Instant::now();
    let cache = DistCache::new();

    // every pair of the small truncation
    let small = enumerate_truncation(1, 2, 8).unwrap();
    let graph = TruncationGraph::new(&small);
    let points = small.points().to_vec();
    assert_eq!(points.len(), 62);
    for p in &points {
        let oracle_row = graph.shortest_many(p, &points).unwrap();
        for (q, oracle_value) in points.iter().zip(oracle_row) {
            assert_eq!(
                cache.dist(p, q),
                oracle_value,
                "oracle mismatch for {p} vs {q}"
            );
        }
    }

    // 500 sampled pairs of the level-2 truncation
    let big = enumerate_truncation(2, 2, 8).unwrap();
    let graph = TruncationGraph::new(&big);
    let mut s = Sampler::new(0x04);
    let n = big.points().len();
    for _ in 0..25 {
        let p = &big.points()[s.index(n)];
        let targets: Vec<PointAddress> =
            (0..20).map(|_| big.points()[s.index(n)].clone()).collect();
        let oracle_row = graph.shortest_many(p, &targets).unwrap();
        for (q, oracle_value) in targets.iter().zip(oracle_row) {
            assert_eq!(
                cache.dist(p, q),
                oracle_value,
                "oracle mismatch for {p} vs {q}"
            );
        }
    }
    report(
        "04 (oracle equivalence, 3844 + 500 pairs)",
        start,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_05_group_laws_and_action() {
    let start = Instant::now();
    let mut s = Sampler::new(0x05);
    let pool = s.point_pool(1, 10);
    for _ in 0..1_000 {
        let level = 1 + s.index(2) as u32;
        let g = s.tower(level, &pool);
        let h = s.tower(level, &pool);
        let p = s.point(level);
        let case = || format!("g={} h={} p={}", g.to_json_string(), h.to_json_string(), p);

        // action homomorphism
        assert_eq!(
            g.mul(&h).unwrap().act(&p),
            g.act(&h.act(&p)),
            "homomorphism failed: {}",
            case()
        );
        // identity and inverse laws
        let id = TowerElement::identity(level);
        assert_eq!(g.mul(&id).unwrap(), g, "right identity failed: {}", case());
        assert_eq!(id.mul(&g).unwrap(), g, "left identity failed: {}", case());
        assert!(
            g.mul(&g.inv()).unwrap().is_identity(),
            "inverse failed: {}",
            case()
        );
        assert_eq!(
            g.inv().act(&g.act(&p)),
            p,
            "inverse action failed: {}",
            case()
        );

        // conjugation: g h g^{-1} acts as the re-indexed layer
        let d = s.fan_layer(level + 1, 2, &pool);
        let lifted = g.lift(level + 1).unwrap();
        let pure = TowerElement::pure_layer(d.clone());
        let lhs = lifted.mul(&pure).unwrap().mul(&lifted.inv()).unwrap();
        let rhs = TowerElement::pure_layer(fan_forge::conj_action(&g, &d).unwrap());
        assert_eq!(lhs, rhs, "conjugation failed: {}", case());
        let w = s.point(level + 1);
        assert_eq!(
            lhs.act(&w),
            rhs.act(&w),
            "conjugation action failed: {}",
            case()
        );
    }
    report(
        "05 (group laws, 1000 samples)",
        start,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_06_marked_points_and_confinement() {
    let start = Instant::now();
    let mut s = Sampler::new(0x06);
    let pool = s.point_pool(1, 10);
    for _ in 0..1_000 {
        let level = 1 + s.index(2) as u32;
        let g = s.tower(level, &pool);
        let marked = s.marked_point(level);
        let image = g.act(&marked);
        assert!(
            image.is_marked(),
            "marked image lost: g on {marked} gave {image}"
        );
        let fp = marked.as_fan().unwrap();
        if g.fixes([&fp.pair().0, &fp.pair().1]) {
            assert_eq!(image, marked, "pair-fixing element moved marked {marked}");
        }

        // segment confinement for pair-fixing elements: act through a pure
        // layer on the point's own fan
        let q = s.fan_point(level);
        let qfp = q.as_fan().unwrap();
        let mut layer = s.fan_layer(level, 1, &pool);
        let seg = segment_index(qfp.t()).unwrap();
        layer
            .insert(
                fan_forge::FanKey {
                    pair: qfp.pair().clone(),
                    spoke: qfp.spoke(),
                    side: qfp.side(),
                    segment: seg,
                },
                s.segment_map(seg),
            )
            .unwrap();
        let h = TowerElement::pure_layer(layer);
        assert!(h.fixes([&qfp.pair().0, &qfp.pair().1]));
        let image = h.act(&q);
        let ifp = image.as_fan().unwrap();
        assert_eq!(
            segment_index(ifp.t()).unwrap(),
            seg,
            "segment changed: {q} became {image}"
        );
        let lo = qfp.t() / Rat::two();
        let hi = qfp.t() * Rat::two();
        assert!(
            ifp.t() > &lo && ifp.t() < &hi,
            "distortion out of (t/2, 2t): {q} became {image}"
        );
    }
    report(
        "06 (marked points and confinement, 1000 samples)",
        start,
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_07_ball_containment() {
    let start = Instant::now();
    let mut s = Sampler::new(0x07);
    let pool = s.point_pool(1, 8);
    for exp in 1..=3i64 {
        let eps = Rat::pow2(-exp);
        let half = &eps / Rat::two();
        let mut checked = 0;
        while checked < 500 {
            let z = s.point(2);
            let n = z.level() + 1;
            let other = if z == b0() { b1() } else { b0() };
            // a point within eps/2 of z, living on a fan anchored at z
            let frac = Rat::new(s.index(15) as i64 + 1, 32);
            let t = &eps * frac;
            let w = canonicalize(t, s.spoke(), Side::A, (z.clone(), other), n).unwrap();
            if dist(&z, &w) >= half {
                continue;
            }
            // a pure fan layer that genuinely moves w
            let mut layer = s.fan_layer(n, 1, &pool);
            let wfp = w.as_fan().unwrap();
            let seg = segment_index(wfp.t()).unwrap();
            layer
                .insert(
                    fan_forge::FanKey {
                        pair: wfp.pair().clone(),
                        spoke: wfp.spoke(),
                        side: wfp.side(),
                        segment: seg,
                    },
                    s.segment_map(seg),
                )
                .unwrap();
            let h = TowerElement::pure_layer(layer);
            let moved = h.act(&w);
            assert!(
                dist(&z, &moved) < eps,
                "ball containment failed: z={z} w={w} moved={moved} eps={eps}"
            );
            checked += 1;
        }
    }
    report(
        "07 (ball containment, 3x500 samples)",
        start,
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_08_collapse_chains() {
    let start = Instant::now();
    let fan = base_fan();
    let other_fan = FanId::new((b1(), b0()), 1).unwrap();
    let fixed_sets: [Vec<PointAddress>; 2] =
        [vec![], vec![other_fan.point(Rat::new(5, 16), 1, Side::A)]];
    let mut s = Sampler::new(0x08);
    for spoke in 1..=3u32 {
        for gamma in [Rat::new(1, 4), Rat::new(1, 8)] {
            for fixed in &fixed_sets {
                let chain = collapse_chain(&fan, spoke, &gamma, fixed).unwrap();
                chain.validate().unwrap_or_else(|e| {
                    panic!("chain invalid for spoke {spoke} gamma {gamma}: {e}")
                });
                for step in &chain.steps {
                    if let Step::Move { element, .. } = step {
                        assert!(element.fixes(fixed.iter()), "mover moved the fixed set");
                    }
                }
                assert!(chain.gap_width_total() < &gamma + &gamma);

                let mut entries = BTreeMap::new();
                for step in &chain.steps {
                    entries.insert(step.from_point().clone(), Rat::new(s.index(5) as i64, 4));
                    entries.insert(step.to_point().clone(), Rat::new(s.index(5) as i64, 4));
                }
                let oracles = [
                    FunctionOracle::constant(Rat::new(1, 2)).unwrap(),
                    FunctionOracle::norm_dist_to(b0()),
                    FunctionOracle::table(entries, Rat::new(1, 3)).unwrap(),
                ];
                for oracle in &oracles {
                    let rep = evaluate_chain(oracle, &chain);
                    assert!(
                        rep.certified,
                        "inequality failed: spoke {spoke} gamma {gamma} oracle {}",
                        oracle.descriptor()
                    );
                    assert!(
                        rep.endpoint_gap
                            <= Rat::from_int(rep.moves as i64) * &rep.mover_max + &rep.gap_total
                    );
                }
            }
        }
    }
    report(
        "08 (collapse chains, 12 configurations)",
        start,
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_09_identification_certificate() {
    let start = Instant::now();
    let fan = base_fan();
    let oracle = FunctionOracle::norm_dist_to(b0());
    let report_json = certify_identification(&fan, &[], &oracle, &Rat::new(1, 8), None).unwrap();
    assert_eq!(report_json.base_separation, Rat::one());
    assert!(report_json.certified);
    assert!(
        report_json.implied_mover_floor.is_positive(),
        "no positive mover bound: floor = {}",
        report_json.implied_mover_floor
    );
    let max_mover = report_json
        .side_a
        .mover_max
        .clone()
        .max(report_json.side_b.mover_max.clone());
    assert!(max_mover >= report_json.implied_mover_floor);
    report_json.chain_a.validate().unwrap();
    report_json.chain_b.validate().unwrap();
    report(
        "09 (identification certificate)",
        start,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_10_refuter_regression() {
    let start = Instant::now();
    let fan = base_fan();
    let oracle = FunctionOracle::norm_dist_to(b0());
    let fixed = [b0(), b1()];
    let search = RefuteSearch::default();

    // brute force over the same mover grid: the best achievable delta
    let mut best = Rat::zero();
    for spoke in 1..=search.max_spoke {
        for segment in 0..=search.max_segment {
            let (lo, hi) = fan_forge::segment_domain(segment);
            if &lo + &search.offset_grid >= &hi - &search.offset_grid {
                continue;
            }
            for side in [Side::A, Side::B] {
                let mover = build_mover(
                    &fan,
                    spoke,
                    side,
                    segment,
                    &search.offset_grid,
                    &search.offset_grid,
                )
                .unwrap();
                if !mover.fixes(fixed.iter()) {
                    continue;
                }
                let mut t = &lo + &search.offset_grid;
                while t < hi {
                    let z = fan.point(t.clone(), spoke, side);
                    let delta = (oracle.eval(&z) - oracle.eval(&mover.act(&z))).abs();
                    best = best.max(delta);
                    t = t + &search.offset_grid;
                }
            }
        }
    }
    // frozen regression value for the default 1/32 grid
    assert_eq!(best, Rat::new(7, 32), "grid optimum moved: {best}");

    let outcome = refute_uniformity(&fan, &oracle, &best, &fixed, &search).unwrap();
    match outcome {
        RefuteOutcome::Witness(w) => {
            assert_eq!(w.delta, Rat::new(7, 32));
            assert!(w.element.fixes(fixed.iter()));
            assert_eq!(w.image, w.element.act(&w.point));
        }
        other => panic!("expected witness at eps = {best}, got {other:?}"),
    }
    // just above the optimum nothing is found
    let above = &best + Rat::new(1, 64);
    assert!(matches!(
        refute_uniformity(&fan, &oracle, &above, &fixed, &search).unwrap(),
        RefuteOutcome::NotFound { .. }
    ));
    // constant oracles never yield a witness
    let constant = FunctionOracle::constant(Rat::new(1, 2)).unwrap();
    assert!(matches!(
        refute_uniformity(&fan, &constant, &Rat::new(1, 16), &fixed, &search).unwrap(),
        RefuteOutcome::NotFound { .. }
    ));
    report(
        "10 (refuter regression, eps = 7/32)",
        start,
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_11_no_isolated_points() {
    let start = Instant::now();
    let mut s = Sampler::new(0x0b);
    for _ in 0..200 {
        let p = s.point(3);
        for exp in 0..4i64 {
            let eps = Rat::pow2(-exp);
            let other = if p == b0() { b1() } else { b0() };
            let t = &eps / Rat::from_int(4);
            let q = canonicalize(t, 1, Side::A, (p.clone(), other), p.level() + 1).unwrap();
            assert_ne!(q, p);
            assert!(
                dist(&p, &q) < eps,
                "no neighbour within {eps} of {p}: candidate {q}"
            );
        }
    }
    report(
        "11 (no isolated points, 200x4 samples)",
        start,
        Duration::from_secs(10),
    );
}
