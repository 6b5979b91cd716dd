//! Exact distance evaluation on the iterated double-fan space.
//!
//! ```bash
//! cargo run -p fan-forge --example exact_distances
//! ```

use fan_forge::{dist, parse_point, spoke_position, DistCache, PointAddress, Rat};

fn main() {
    let b0 = PointAddress::base0();
    let b1 = PointAddress::base1();
    println!("the two base points sit at distance {}", dist(&b0, &b1));

    // A fan point is addressed by coordinate, spoke, side, creation level and
    // the ordered pair the fan hangs on.
    let p = parse_point("fan(1/2;1;A;1;b0,b1)").unwrap();
    println!("{} -> b0 exits at cost {}", p, dist(&p, &b0));
    println!("{} -> b1 exits at cost {}", p, dist(&p, &b1));

    // Two sides of the same spoke connect through the glued endpoint.
    let a = parse_point("fan(3/4;1;A;1;b0,b1)").unwrap();
    let b = parse_point("fan(3/4;1;B;1;b0,b1)").unwrap();
    println!(
        "same spoke, opposite sides: positions {} and {}, distance {}",
        spoke_position(&a).unwrap(),
        spoke_position(&b).unwrap(),
        dist(&a, &b)
    );

    // Different spokes must route through the base pair.
    let c = parse_point("fan(1/2;2;B;1;b0,b1)").unwrap();
    println!("across spokes: dist({}, {}) = {}", p, c, dist(&p, &c));

    // Level-2 fans hang on pairs of earlier points; distances stay exact and
    // are capped at 2.
    let q = parse_point("fan(1/3;2;B;2;fan(1/2;1;A;1;b0,b1),b1)").unwrap();
    println!("a level-2 point: {}", q);
    println!("  level = {}, marked = {}", q.level(), q.is_marked());
    println!("  dist to its anchor {} = {}", p, dist(&q, &p));
    println!("  dist to b0 = {}", dist(&q, &b0));

    // A shared cache answers repeated queries without recomputing.
    let cache = DistCache::new();
    let mut total = Rat::zero();
    for point in [&b0, &b1, &p, &a, &b, &c] {
        total = total + cache.dist(&q, point);
    }
    println!("sum of six cached distances from {}: {}", q, total);
}
