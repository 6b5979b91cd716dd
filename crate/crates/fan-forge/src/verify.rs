//! Seeded invariant suites.
//!
//! Each suite draws random inputs from [`crate::sample`] and checks the
//! exact invariants of one subsystem, collecting counterexamples instead of
//! panicking. The CLI `verify` command wraps these; the suites are also the
//! backbone of the acceptance tests.

use crate::collapse::{
    build_mover, certify_identification, chain_on_side, convergence_spoke_bound, evaluate_chain,
    refute_uniformity, FanId, FunctionOracle, RefuteOutcome, RefuteSearch, Step,
};
use crate::group::TowerElement;
use crate::metric::{dist, dist_uncapped_top, spoke_position, DistCache};
use crate::rat::Rat;
use crate::sample::Sampler;
use crate::space::{canonicalize, segment_index, PointAddress, Side};
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Metric,
    Group,
    Action,
    Collapse,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Metric => "metric",
            Suite::Group => "group",
            Suite::Action => "action",
            Suite::Collapse => "collapse",
        }
    }

    pub fn all() -> [Suite; 4] {
        [Suite::Metric, Suite::Group, Suite::Action, Suite::Collapse]
    }
}

#[derive(Clone, Debug)]
pub struct Failure {
    pub property: String,
    pub counterexample: String,
}

#[derive(Debug)]
pub struct VerifyReport {
    pub suite: &'static str,
    pub samples_run: u64,
    pub failures: Vec<Failure>,
    pub seed: u64,
    pub elapsed: Duration,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Checker {
    failures: Vec<Failure>,
}

impl Checker {
    fn new() -> Self {
        Checker {
            failures: Vec::new(),
        }
    }

    fn check(&mut self, property: &str, ok: bool, counterexample: impl Fn() -> String) {
        // keep the report compact: only the first few counterexamples per run
        if !ok && self.failures.len() < 16 {
            self.failures.push(Failure {
                property: property.to_string(),
                counterexample: counterexample(),
            });
        }
    }
}

pub fn run_suite(suite: Suite, samples: u64, seed: u64) -> VerifyReport {
    let start = Instant::now();
    let mut checker = Checker::new();
    match suite {
        Suite::Metric => metric_suite(&mut checker, samples, seed),
        Suite::Group => group_suite(&mut checker, samples, seed),
        Suite::Action => action_suite(&mut checker, samples, seed),
        Suite::Collapse => collapse_suite(&mut checker, samples, seed),
    }
    VerifyReport {
        suite: suite.name(),
        samples_run: samples,
        failures: checker.failures,
        seed,
        elapsed: start.elapsed(),
    }
}

fn metric_suite(c: &mut Checker, samples: u64, seed: u64) {
    let mut s = Sampler::new(seed);
    let cache = DistCache::new();
    for i in 0..samples {
        let p = s.point(3);
        let q = s.point(3);
        let r = s.point(3);
        let dpq = dist(&p, &q);
        let dqp = dist(&q, &p);
        let dpr = dist(&p, &r);
        let dqr = dist(&q, &r);
        let case = || format!("p={} q={} r={}", p, q, r);
        c.check("symmetry", dpq == dqp, case);
        c.check("self distance is zero", dist(&p, &p).is_zero(), case);
        c.check(
            "distinct points are separated",
            p == q || dpq.is_positive(),
            case,
        );
        c.check("triangle inequality", dpr <= &dpq + &dqr, case);
        c.check("global bound 2", dpq <= Rat::two(), case);
        if p.level() == q.level() {
            c.check(
                "pre-cap bound 4",
                dist_uncapped_top(&p, &q) <= Rat::from_int(4),
                case,
            );
        }
        if i % 16 == 0 {
            c.check("cache transparency", cache.dist(&p, &q) == dpq, case);
        }
        if i % 8 == 0 {
            // enlarging the candidate set with a second intermediate stop at
            // the same level never improves the minimum
            let w = s.fan_point(p.level().max(q.level()).max(1));
            let mut enlarged = &dist(&p, &w) + &dist(&w, &q);
            for (u, cu) in p.anchors() {
                for (v, cv) in q.anchors() {
                    let via = &cu + dist(&u, &w) + dist(&w, &v) + &cv;
                    if via < enlarged {
                        enlarged = via;
                    }
                }
            }
            c.check(
                "one anchor stop per level suffices",
                enlarged >= dpq,
                || format!("p={} q={} w={}", p, q, w),
            );
        }
        // closed-form distance from a fan point over the base pair to a base point
        let f = s.fan_point(1);
        if let Some(fp) = f.as_fan() {
            if fp.pair() == &(PointAddress::base0(), PointAddress::base1()) {
                for z in [PointAddress::base0(), PointAddress::base1()] {
                    let (cx, cy) = match fp.side() {
                        Side::A => (fp.t().clone(), Rat::two() - fp.t()),
                        Side::B => (Rat::two() - fp.t(), fp.t().clone()),
                    };
                    let dx = if z == fp.pair().0 {
                        Rat::zero()
                    } else {
                        Rat::two()
                    };
                    let dy = if z == fp.pair().1 {
                        Rat::zero()
                    } else {
                        Rat::two()
                    };
                    let expected = (cx + dx).min(cy + dy).min(Rat::two());
                    c.check("anchor formula", dist(&f, &z) == expected, || {
                        format!("p={} z={}", f, z)
                    });
                }
            }
        }
        // canonical form is a fixed point of canonicalization
        if let Some(fp) = p.as_fan() {
            let again = canonicalize(
                fp.t().clone(),
                fp.spoke(),
                fp.side(),
                fp.pair().clone(),
                fp.created_at(),
            );
            c.check(
                "canonicalization idempotent",
                again.as_ref() == Ok(&p),
                case,
            );
            let j = segment_index(fp.t()).expect("canonical coordinate");
            if fp.t().is_pow2_reciprocal() && fp.t() != &Rat::one() {
                let k = fp.t().denom().bits() - 1;
                c.check(
                    "marked coordinates bound their segment",
                    u64::from(j) == k,
                    case,
                );
            }
            let pos = spoke_position(&p).expect("fan point");
            c.check(
                "spoke position range",
                pos.is_positive() && pos < Rat::two(),
                case,
            );
        }
        // no isolated points: an explicit close neighbour at every radius
        for exp in 0..4i64 {
            let eps = Rat::pow2(-exp);
            let other = if p == PointAddress::base0() {
                PointAddress::base1()
            } else {
                PointAddress::base0()
            };
            let t = &eps / Rat::from_int(4);
            let w = canonicalize(t, 1, Side::A, (p.clone(), other), p.level() + 1)
                .expect("neighbour coordinates are canonical");
            c.check("no isolated points", w != p && dist(&p, &w) < eps, || {
                format!("p={} eps={}", p, eps)
            });
        }
    }
}

fn group_suite(c: &mut Checker, samples: u64, seed: u64) {
    let mut s = Sampler::new(seed);
    let pool = s.point_pool(1, 8);
    for _ in 0..samples {
        // segment map group laws, exact on a sampled coordinate
        let seg = s.index(3) as u32;
        let (lo, hi) = crate::space::segment_domain(seg);
        let a = s.segment_map(seg);
        let b = s.segment_map(seg);
        let m = s.segment_map(seg);
        let t = {
            let num = s.index(15) as i64 + 1;
            &lo + (&hi - &lo) * Rat::new(num, 16)
        };
        let case = || format!("a={} b={} m={} t={}", a, b, m, t);
        let id = crate::ordermaps::PLOrderMap::identity(lo.clone(), hi.clone()).unwrap();
        c.check(
            "segment identity is neutral",
            a.compose(&id).unwrap() == a && id.compose(&a).unwrap() == a,
            case,
        );
        c.check(
            "segment inverse cancels",
            a.compose(&a.invert()).unwrap().is_identity(),
            case,
        );
        let assoc_l = a.compose(&b).unwrap().compose(&m).unwrap();
        let assoc_r = a.compose(&b.compose(&m).unwrap()).unwrap();
        c.check(
            "segment composition associative",
            assoc_l == assoc_r && assoc_l.eval(&t) == assoc_r.eval(&t),
            case,
        );

        // tower laws
        let level = 1 + s.index(2) as u32;
        let g = s.tower(level, &pool);
        let h = s.tower(level, &pool);
        let k = s.tower(level, &pool);
        let p = s.point(level);
        let case = || format!("g={} h={} p={}", g.to_json_string(), h.to_json_string(), p);
        let id = TowerElement::identity(level);
        c.check(
            "tower identity is neutral",
            g.mul(&id).unwrap() == g && id.mul(&g).unwrap() == g,
            case,
        );
        c.check(
            "tower inverse cancels",
            g.mul(&g.inv()).unwrap().is_identity() && g.inv().mul(&g).unwrap().is_identity(),
            case,
        );
        c.check(
            "inverse action undoes the action",
            g.inv().act(&g.act(&p)) == p,
            case,
        );
        let gh_k = g.mul(&h).unwrap().mul(&k).unwrap();
        let g_hk = g.mul(&h.mul(&k).unwrap()).unwrap();
        c.check(
            "tower multiplication associative",
            gh_k == g_hk && gh_k.act(&p) == g_hk.act(&p),
            case,
        );
        let lifted = g.lift(level + 1).unwrap();
        c.check(
            "lift preserves the action",
            lifted.act(&p) == g.act(&p),
            case,
        );
        c.check(
            "element serialization round-trips",
            TowerElement::from_json_str(&g.to_json_string()).as_ref() == Ok(&g),
            case,
        );
    }
}

fn action_suite(c: &mut Checker, samples: u64, seed: u64) {
    let mut s = Sampler::new(seed);
    let pool = s.point_pool(1, 8);
    for _ in 0..samples {
        let level = 1 + s.index(2) as u32;
        let g = s.tower(level, &pool);
        let h = s.tower(level, &pool);
        let p = s.point(level + 1);
        let case = || format!("g={} h={} p={}", g.to_json_string(), h.to_json_string(), p);
        c.check(
            "action homomorphism",
            g.mul(&h).unwrap().act(&p) == g.act(&h.act(&p)),
            case,
        );

        // conjugation as re-indexing
        let d = s.fan_layer(level + 1, 2, &pool);
        let pure = TowerElement::pure_layer(d.clone());
        let lifted = g.lift(level + 1).unwrap();
        let lhs = lifted.mul(&pure).unwrap().mul(&lifted.inv()).unwrap();
        let rhs = TowerElement::pure_layer(crate::group::conj_action(&g, &d).unwrap());
        c.check("conjugation re-indexes the layer", lhs == rhs, || {
            format!("g={} d-level={}", g.to_json_string(), d.level())
        });
        c.check(
            "conjugation agrees on points",
            lhs.act(&p) == rhs.act(&p),
            case,
        );

        // marked points
        let marked = s.marked_point(level);
        let image = g.act(&marked);
        c.check("marked points stay marked", image.is_marked(), || {
            format!("g={} marked={}", g.to_json_string(), marked)
        });
        let mfp = marked.as_fan().expect("marked points are fan points");
        if g.fixes([&mfp.pair().0, &mfp.pair().1]) {
            c.check(
                "pair-fixing elements fix marked points",
                image == marked,
                || format!("g={} marked={}", g.to_json_string(), marked),
            );
        }

        // coordinate data survives the extension to higher levels
        let above = s.fan_point(level + 1);
        let afp = above.as_fan().unwrap();
        let moved = g.act(&above);
        let mfp = moved.as_fan().expect("images of fan points are fan points");
        c.check(
            "extension preserves coordinates",
            mfp.t() == afp.t() && mfp.spoke() == afp.spoke() && mfp.side() == afp.side(),
            || format!("g={} p={}", g.to_json_string(), above),
        );

        // segment confinement under pair-fixing elements
        let q = s.fan_point(level);
        let qfp = q.as_fan().unwrap();
        if g.fixes([&qfp.pair().0, &qfp.pair().1]) {
            let qi = g.act(&q);
            let qifp = qi.as_fan().expect("fan image");
            let j = segment_index(qfp.t()).unwrap();
            let ji = segment_index(qifp.t()).unwrap();
            let lo = qfp.t() / Rat::two();
            let hi = qfp.t() * Rat::two();
            c.check(
                "segment confinement bounds the distortion",
                j == ji && qifp.t() > &lo && qifp.t() < &hi,
                || format!("g={} q={}", g.to_json_string(), q),
            );
        }

        // ball containment around lower-level points
        let z = s.point(level);
        let n = z.level() + 1;
        let eps = Rat::pow2(-(1 + s.index(3) as i64));
        let other = if z == PointAddress::base0() {
            PointAddress::base1()
        } else {
            PointAddress::base0()
        };
        let frac = Rat::new(s.index(15) as i64 + 1, 32);
        let t = &eps * frac;
        let w = canonicalize(t, s.spoke(), Side::A, (z.clone(), other), n)
            .expect("near point is canonical");
        let mut layer = s.fan_layer(n, 1, &pool);
        if let Some(wfp) = w.as_fan() {
            let seg = segment_index(wfp.t()).unwrap();
            let key = crate::group::FanKey {
                pair: wfp.pair().clone(),
                spoke: wfp.spoke(),
                side: wfp.side(),
                segment: seg,
            };
            layer
                .insert(key, s.segment_map(seg))
                .expect("key is coherent");
        }
        let pure = TowerElement::pure_layer(layer);
        let half = &eps / Rat::two();
        if dist(&z, &w) < half {
            c.check(
                "stabilizer layers keep small balls small",
                dist(&z, &pure.act(&w)) < eps,
                || format!("z={} w={} eps={} h={}", z, w, eps, pure.to_json_string()),
            );
        }
    }
}

fn collapse_suite(c: &mut Checker, samples: u64, seed: u64) {
    let mut s = Sampler::new(seed);
    let base_fan = FanId::new((PointAddress::base0(), PointAddress::base1()), 1).unwrap();
    let other_fan = FanId::new((PointAddress::base1(), PointAddress::base0()), 1).unwrap();
    for i in 0..samples {
        let gamma = Rat::pow2(-(2 + s.index(3) as i64));
        let fixed = if s.bool() {
            vec![]
        } else {
            vec![other_fan.point(s.coordinate(), s.spoke(), s.side())]
        };
        let spoke = convergence_spoke_bound(&base_fan, &fixed) + s.index(3) as u32;
        let side = s.side();
        let chain = match chain_on_side(&base_fan, spoke, side, &gamma, &fixed) {
            Ok(chain) => chain,
            Err(e) => {
                c.check("chain construction succeeds", false, || {
                    format!("spoke={} gamma={} err={}", spoke, gamma, e)
                });
                continue;
            }
        };
        let case = || format!("spoke={} side={:?} gamma={}", spoke, side, gamma);
        c.check("chain invariants hold", chain.validate().is_ok(), || {
            format!(
                "{} err={:?}",
                case(),
                chain.validate().err().map(|e| e.to_string())
            )
        });
        c.check(
            "gap total stays below twice the budget",
            chain.gap_width_total() < &gamma + &gamma,
            case,
        );

        let oracles = [
            FunctionOracle::constant(Rat::new(1, 2)).unwrap(),
            FunctionOracle::norm_dist_to(PointAddress::base0()),
            adversarial_table(&chain.steps, &mut s),
        ];
        for oracle in &oracles {
            let report = evaluate_chain(oracle, &chain);
            c.check("chain inequality certifies", report.certified, || {
                format!("{} oracle={}", case(), oracle.descriptor())
            });
        }

        let report = certify_identification(&base_fan, &fixed, &oracles[1], &gamma, Some(spoke))
            .expect("certification succeeds on an admissible spoke");
        c.check(
            "identification certificate holds",
            report.certified && report.base_separation == Rat::one(),
            case,
        );

        // movers on admissible spokes fix the fixed set
        let seg = s.index(3) as u32;
        let (lo, hi) = crate::space::segment_domain(seg);
        let off = (&hi - &lo) / Rat::from_int(8);
        let mover = build_mover(&base_fan, spoke, s.side(), seg, &off, &off)
            .expect("offsets fit the segment");
        c.check(
            "admissible movers fix the set",
            mover.fixes(fixed.iter()),
            || format!("{} segment={}", case(), seg),
        );

        if i % 32 == 0 {
            let outcome = refute_uniformity(
                &base_fan,
                &oracles[0],
                &Rat::new(1, 8),
                &fixed,
                &RefuteSearch::default(),
            )
            .expect("search runs");
            c.check(
                "constant oracles yield no witness",
                matches!(outcome, RefuteOutcome::NotFound { .. }),
                case,
            );
        }
    }
}

fn adversarial_table(steps: &[Step], s: &mut Sampler) -> FunctionOracle {
    let mut entries = BTreeMap::new();
    for step in steps {
        let v = Rat::new(s.index(5) as i64, 4);
        entries.insert(step.from_point().clone(), v);
        let v = Rat::new(s.index(5) as i64, 4);
        entries.insert(step.to_point().clone(), v);
    }
    FunctionOracle::table(entries, Rat::new(1, 3)).expect("table values in range")
}
