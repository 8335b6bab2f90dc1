//! Construction, sparse simulation, and bounded analysis of d-dimensional
//! cellular automata over a finite alphabet with a distinguished background
//! symbol `0`.
//!
//! The crate is organized around a small number of concrete representations:
//!
//! * [`geometry`]: integer cell vectors under the max norm, finite cell
//!   sets, balls, and axis-aligned tower regions.
//! * [`config`]: configurations of four kinds: finite-support maps, tubes
//!   (periodic along one axis with finite quotient support), tori (periodic
//!   along every axis), and overlays of disjointly supported parts.
//! * [`automaton`]: local rules and global maps: stepping, dependence-cone
//!   evaluation, traces, rule powers, and dimension reduction by folding a
//!   periodic axis into the alphabet.
//! * [`subshift`]: finite-type constraints, transitive component
//!   decomposition and language extraction in one dimension, and labeled-graph
//!   (sofic) habitat membership.
//! * [`probe`]: horizon- and guard-bounded decision probes with uniform
//!   reporting: nilpotency within a step bound, backward preimage depth,
//!   uniform visit bounds, mortality, tower confinement, torus orbit analysis,
//!   disjoint evolution, and witness assembly from layered patterns.
//! * [`fixtures`]: named example automata with habitats and seed
//!   configurations, plus the one-point-compactification countdown system.
//!
//! Every analysis entry point is bounded: enumeration sizes, orbit lengths,
//! and per-level word counts are checked against caller-adjustable guards and
//! reported honestly as `Unknown` or as a guard error rather than silently
//! truncated.

pub mod automaton;
pub mod config;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod probe;
pub mod subshift;

mod textio;


pub use automaton::{fold, unfold, CellularAutomaton, LocalRule, Neighborhood, TraceReport};
pub use config::{
    sum, Alphabet, Config, FiniteConfig, OverlayConfig, Pattern, Symbol, TorusConfig, TubeConfig,
};
pub use error::{Error, Result};
pub use fixtures::{
    alexandroff_hitting_time, alexandroff_step, fixture, fixture_seed, AlexandroffState, Fixture,
    Seed, FIXTURE_NAMES,
};
pub use geometry::{ball_enumerate, CellSet, CellVector, TowerDescriptor};
pub use probe::{
    assemble_witness, check_disjoint_evolution, cycle_analysis, deep_preimage, mortality_probe,
    nilpotency_within, tower_confinement, uniform_visit_bound, Certificate, Guards, Layer,
    LayerSpec, ProbeReport, Verdict, VisitMode, Witness,
};
pub use subshift::{
    components_1d, language_1d, ComponentDecomposition, Sft, SoficPresentation,
};


