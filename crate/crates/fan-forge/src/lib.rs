//! fan-forge: exact computations on iterated rational double fans.
//!
//! Starting from two points at distance 2, every construction level attaches
//! a rational double fan — two fans of length-1 spokes glued along their
//! endpoints — to each ordered pair of distinct points built so far. The
//! library works with canonical addresses into that countable space and
//! keeps every number an exact rational:
//!
//! - [`space`] — point addresses, identification rules, finite truncations;
//! - [`metric`] — the capped path pseudometric and a shortest-path oracle;
//! - [`ordermaps`] — piecewise-linear order bijections of segments;
//! - [`group`] — the tower of semidirect products acting on the space;
//! - [`collapse`] — movers, collapse chains, identification certificates and
//!   uniformity refutation;
//! - [`verify`] — seeded invariant suites;
//! - [`cli`] — the `fan-forge` command-line front end.
//!
//! The `examples/` directory shows one runnable program per capability; see
//! the README for the command-line surface.
//!
//! ```
//! use fan_forge::{dist, parse_point, Rat};
//!
//! let p = parse_point("fan(1/2;1;A;1;b0,b1)")?;
//! assert_eq!(dist(&p, &parse_point("b0")?), Rat::new(1, 2));
//! assert_eq!(dist(&p, &parse_point("b1")?), Rat::new(3, 2));
//! # Ok::<(), fan_forge::space::SpaceError>(())
//! ```

// error enums carry the exact rationals involved; all error paths are cold
#![allow(clippy::result_large_err, clippy::large_enum_variant)]

pub mod cli;
pub mod collapse;
pub mod group;
pub mod metric;
pub mod ordermaps;
pub mod rat;
pub mod sample;
pub mod space;
pub mod verify;

pub use collapse::{
    build_mover, certify_identification, collapse_chain, convergence_spoke_bound, evaluate_chain,
    refute_uniformity, CollapseChain, FanId, FunctionOracle, RefuteOutcome, RefuteSearch,
};
pub use group::{conj_action, FanKey, FanLayerElement, TowerElement};
pub use metric::{dist, dist_oracle, spoke_position, DistCache, TruncationGraph};
pub use ordermaps::PLOrderMap;
pub use rat::Rat;
pub use space::{
    canonicalize, enumerate_truncation, parse_point, segment_domain, segment_index, PointAddress,
    Side, Truncation,
};
