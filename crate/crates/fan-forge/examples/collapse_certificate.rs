//! Collapse chains: sweeping a glued endpoint down to its base point with
//! stabilizer moves, and the certified oscillation inequality.
//!
//! ```bash
//! cargo run -p fan-forge --example collapse_certificate
//! ```

use fan_forge::collapse::{collapse_chain, evaluate_chain, FanId, FunctionOracle, Step};
use fan_forge::{PointAddress, Rat};

fn main() {
    let fan = FanId::new((PointAddress::base0(), PointAddress::base1()), 1).unwrap();

    // No fixed set, spoke 1, gap budget 1/4.
    let chain = collapse_chain(&fan, 1, &Rat::new(1, 4), &[]).unwrap();
    chain.validate().unwrap();
    println!(
        "chain from {} down to {}: {} steps, total gap width {}",
        chain.start,
        chain.end,
        chain.steps.len(),
        chain.gap_width_total()
    );
    for step in &chain.steps {
        match step {
            Step::Move { from, to, .. } => println!("  move {} -> {}", from, to),
            Step::Gap { from, to, width } => {
                println!("  gap  {} -> {} (width {})", from, to, width)
            }
        }
    }

    // A constant function cannot oscillate at all.
    let constant = FunctionOracle::constant(Rat::new(1, 2)).unwrap();
    let report = evaluate_chain(&constant, &chain);
    println!(
        "constant oracle: endpoint gap {}, certified {}",
        report.endpoint_gap, report.certified
    );

    // The normalized distance to b0 separates the glued endpoint from the
    // base point by 1/2, so some single move must carry a large share of it.
    let oracle = FunctionOracle::norm_dist_to(PointAddress::base0());
    let report = evaluate_chain(&oracle, &chain);
    println!(
        "distance oracle: endpoint gap {}, {} moves, mover max {}, gap total {}",
        report.endpoint_gap, report.moves, report.mover_max, report.gap_total
    );
    println!(
        "certified: {} <= {} * {} + {} holds ({})",
        report.endpoint_gap, report.moves, report.mover_max, report.gap_total, report.certified
    );
    let floor = (&report.endpoint_gap - &report.gap_total) / Rat::from_int(report.moves as i64);
    println!(
        "so any uniformity neighbourhood admitting these movers tolerates an oscillation >= {}",
        floor
    );

    // The full chain serializes to JSON for external checking.
    println!("chain JSON:\n{}", chain.to_json_string());
}
