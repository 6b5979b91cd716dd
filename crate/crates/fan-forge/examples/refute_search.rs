//! Searching for an explicit uniformity witness against a concrete oracle.
//!
//! ```bash
//! cargo run -p fan-forge --example refute_search
//! ```

use fan_forge::collapse::{refute_uniformity, FanId, FunctionOracle, RefuteOutcome, RefuteSearch};
use fan_forge::{PointAddress, Rat};

fn main() {
    let b0 = PointAddress::base0();
    let b1 = PointAddress::base1();
    let fan = FanId::new((b0.clone(), b1.clone()), 1).unwrap();
    let fixed = [b0.clone(), b1.clone()];
    let search = RefuteSearch::default();
    println!(
        "searching spokes 1..={}, segments 0..={}, offset grid {}",
        search.max_spoke, search.max_segment, search.offset_grid
    );

    // The normalized distance to b0 oscillates under segment movers; on the
    // 1/32 grid the best mover shifts 17/32 to 31/32 for a delta of 7/32.
    let oracle = FunctionOracle::norm_dist_to(b0.clone());
    match refute_uniformity(&fan, &oracle, &Rat::new(7, 32), &fixed, &search).unwrap() {
        RefuteOutcome::Witness(w) => {
            println!("witness found:");
            println!("  point  {}", w.point);
            println!("  image  {}", w.image);
            println!("  values {} -> {}", w.value_at_point, w.value_at_image);
            println!("  delta  {}", w.delta);
            println!(
                "  element fixes {{b0, b1}}: {}",
                w.element.fixes(fixed.iter())
            );
        }
        RefuteOutcome::NotFound { .. } => unreachable!("the grid optimum is 7/32"),
    }

    // Ask for more than the grid can deliver and the search reports its
    // bounds instead.
    match refute_uniformity(&fan, &oracle, &Rat::new(1, 4), &fixed, &search).unwrap() {
        RefuteOutcome::NotFound {
            max_spoke,
            max_segment,
            offset_grid,
        } => println!(
            "eps = 1/4: no witness up to spoke {}, segment {}, grid {}",
            max_spoke, max_segment, offset_grid
        ),
        RefuteOutcome::Witness(w) => unreachable!("unexpected witness {:?}", w.delta),
    }

    // Constant functions are uniform; nothing is ever found.
    let constant = FunctionOracle::constant(Rat::new(1, 2)).unwrap();
    let outcome = refute_uniformity(&fan, &constant, &Rat::new(1, 64), &fixed, &search).unwrap();
    println!(
        "constant oracle refuted: {}",
        matches!(outcome, RefuteOutcome::Witness(_))
    );
}
