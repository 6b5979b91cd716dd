//! Building tower elements and acting on the space.
//!
//! ```bash
//! cargo run -p fan-forge --example group_tower
//! ```

use fan_forge::group::{conj_action, FanKey, FanLayerElement, TowerElement};
use fan_forge::{parse_point, PLOrderMap, PointAddress, Rat, Side};

fn r(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

fn main() {
    let b0 = PointAddress::base0();
    let b1 = PointAddress::base1();

    // A segment map on [1/4, 1/2] sending 5/16 to 7/16. It fixes both
    // endpoints, so the marked points stay put.
    let map = PLOrderMap::new(vec![
        (r(1, 4), r(1, 4)),
        (r(5, 16), r(7, 16)),
        (r(1, 2), r(1, 2)),
    ])
    .unwrap();
    println!("segment map: {}", map);

    // Wrap it into a level-1 element supported on one key of the fan over
    // (b0, b1): spoke 1, side A, segment 1.
    let layer = FanLayerElement::new(
        1,
        [(
            FanKey {
                pair: (b0.clone(), b1.clone()),
                spoke: 1,
                side: Side::A,
                segment: 1,
            },
            map,
        )],
    )
    .unwrap();
    let g = TowerElement::pure_layer(layer);
    println!("element: {}", g.to_json_string());

    let p = parse_point("fan(5/16;1;A;1;b0,b1)").unwrap();
    println!("g({}) = {}", p, g.act(&p));

    let marked = parse_point("fan(1/4;1;A;1;b0,b1)").unwrap();
    println!(
        "g fixes the marked point {}: {}",
        marked,
        g.act(&marked) == marked
    );

    // Group algebra: inverses cancel, products act by composition.
    let gg = g.mul(&g).unwrap();
    println!("g*g({}) = {}", p, gg.act(&p));
    println!(
        "g * g^-1 is the identity: {}",
        g.mul(&g.inv()).unwrap().is_identity()
    );

    // The extension rule: higher-level fans are carried along by their pair.
    let above = parse_point("fan(1/2;3;A;2;fan(5/16;1;A;1;b0,b1),b1)").unwrap();
    println!("extension: g({}) =\n           {}", above, g.act(&above));

    // Conjugation re-indexes supports by the acting element.
    let seg0 = PLOrderMap::new(vec![
        (r(1, 2), r(1, 2)),
        (r(9, 16), r(3, 4)),
        (Rat::one(), Rat::one()),
    ])
    .unwrap();
    let d = FanLayerElement::new(
        2,
        [(
            FanKey {
                pair: (p.clone(), b1.clone()),
                spoke: 1,
                side: Side::A,
                segment: 0,
            },
            seg0,
        )],
    )
    .unwrap();
    let conj = conj_action(&g, &d).unwrap();
    let moved_key = conj.support().keys().next().unwrap();
    println!(
        "conjugating a layer supported at ({}, b1) moves the support to ({}, {})",
        p, moved_key.pair.0, moved_key.pair.1
    );

    // Elements round-trip through their JSON form.
    let back = TowerElement::from_json_str(&g.to_json_string()).unwrap();
    assert_eq!(back, g);
    println!("serialization round-trips");
}
