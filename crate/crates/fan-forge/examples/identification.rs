//! The double-sided certificate: chains on both sides of a fan force the
//! images of its two base points together.
//!
//! Any function separating b0 from b1 by a full unit must oscillate under
//! some stabilizer mover by an explicit positive amount — quantified here
//! with exact rationals.
//!
//! ```bash
//! cargo run -p fan-forge --example identification
//! ```

use fan_forge::collapse::{certify_identification, FanId, FunctionOracle};
use fan_forge::{PointAddress, Rat};

fn main() {
    let b0 = PointAddress::base0();
    let b1 = PointAddress::base1();
    let fan = FanId::new((b0.clone(), b1.clone()), 1).unwrap();

    let oracle = FunctionOracle::norm_dist_to(b0);
    let report = certify_identification(&fan, &[], &oracle, &Rat::new(1, 8), None).unwrap();

    println!("oracle: {}", report.oracle);
    println!("spoke:  {}", report.spoke);
    println!("|f(b0) - f(b1)| = {}", report.base_separation);
    println!(
        "side A: endpoint gap {}, {} moves, mover max {}, gap total {}",
        report.side_a.endpoint_gap,
        report.side_a.moves,
        report.side_a.mover_max,
        report.side_a.gap_total
    );
    println!(
        "side B: endpoint gap {}, {} moves, mover max {}, gap total {}",
        report.side_b.endpoint_gap,
        report.side_b.moves,
        report.side_b.mover_max,
        report.side_b.gap_total
    );
    println!(
        "certified: {} <= {} + {} ({})",
        report.base_separation, report.bound_a, report.bound_b, report.certified
    );
    println!(
        "hence some mover in the stabilizer oscillates f by at least {}",
        report.implied_mover_floor
    );

    // The same computation with a constant oracle shows zero everywhere.
    let constant = FunctionOracle::constant(Rat::new(2, 3)).unwrap();
    let report = certify_identification(&fan, &[], &constant, &Rat::new(1, 8), None).unwrap();
    println!(
        "constant oracle: separation {}, bounds {} + {}",
        report.base_separation, report.bound_a, report.bound_b
    );
}
