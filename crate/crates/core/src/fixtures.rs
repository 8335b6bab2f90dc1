//! Named, test-ready example systems: each fixture bundles an automaton with
//! seed configurations, an optional one-dimensional habitat presentation, and
//! a short account of the behavior it demonstrates. The registry also carries
//! a tiny non-symbolic companion system (a countdown with a point at
//! infinity) used to separate "every state eventually dies" from "all states
//! die by a common deadline".
//!
//! The fixtures are chosen to pin down distinct dynamical regimes at desk
//! scale: a shift with finite traces everywhere but no uniform death bound, a
//! particle-annihilation rule whose approaching pairs die in half their gap,
//! the standard life rule with a glider, a gun, and a spaceship for
//! two-dimensional escape and stream tests, plus two tiny controls (a
//! spreading xor and a two-step countdown).

use crate::automaton::{CellularAutomaton, LEFT_PARTICLE, RIGHT_PARTICLE};
use crate::config::{Alphabet, FiniteConfig};
use crate::error::{Error, Result};
use crate::geometry::CellVector;
use crate::subshift::SoficPresentation;

/// A named starting configuration with a one-line description.
#[derive(Debug, Clone)]
pub struct Seed {
    pub name: &'static str,
    pub config: FiniteConfig,
    pub note: &'static str,
}

/// One registry entry: an automaton, its seeds, and an optional habitat
/// (a presentation of the one-dimensional sofic shift the interesting
/// configurations live in). Every seed of a habitat-bearing fixture is a
/// member of that habitat.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub automaton: CellularAutomaton,
    pub habitat: Option<SoficPresentation>,
    pub seeds: Vec<Seed>,
    pub behavior: &'static str,
}

impl Fixture {
    /// Looks up a seed by name.
    pub fn seed(&self, name: &str) -> Result<&FiniteConfig> {
        self.seeds
            .iter()
            .find(|seed| seed.name == name)
            .map(|seed| &seed.config)
            .ok_or_else(|| Error::UnknownFixture {
                name: format!("{}:{name}", self.name),
            })
    }

    /// The first seed, used when a caller names only the fixture.
    pub fn default_seed(&self) -> &Seed {
        &self.seeds[0]
    }
}

/// Registry names, in presentation order.
pub const FIXTURE_NAMES: [&str; 5] = [
    "shift-single-one",
    "lr-annihilation",
    "game-of-life",
    "xor-pair",
    "countdown",
];

fn cell1(x: i64) -> CellVector {
    CellVector::new(vec![x]).expect("one coordinate")
}

fn cell2(x: i64, y: i64) -> CellVector {
    CellVector::new(vec![x, y]).expect("two coordinates")
}

fn seed1(name: &'static str, alphabet: Alphabet, cells: &[(i64, u32)], note: &'static str) -> Seed {
    Seed {
        name,
        config: FiniteConfig::from_cells(1, alphabet, cells.iter().map(|&(x, s)| (cell1(x), s)))
            .expect("valid seed cells"),
        note,
    }
}

fn seed2(name: &'static str, cells: &[(i64, i64)], note: &'static str) -> Seed {
    Seed {
        name,
        config: FiniteConfig::from_cells(
            2,
            Alphabet::new(2).expect("binary alphabet"),
            cells.iter().map(|&(x, y)| (cell2(x, y), 1)),
        )
        .expect("valid seed cells"),
        note,
    }
}

/// States of the spike habitat cover: `before` idles on 0, one spike crosses
/// to `after`, which idles on 0 forever.
fn one_spike_habitat() -> SoficPresentation {
    SoficPresentation::new(2, vec![(0, 0, 0), (0, 1, 1), (1, 0, 1)]).expect("two-state cover")
}

/// States of the particle habitat cover: particles strictly alternate along
/// the line, with arbitrary 0 runs between them. Either particle type may
/// come first, since both phases extend to bi-infinite walks by idling on
/// the 0 loops.
fn particle_habitat() -> SoficPresentation {
    SoficPresentation::new(
        2,
        vec![
            (0, 0, 0),
            (0, LEFT_PARTICLE, 1),
            (1, 0, 1),
            (1, RIGHT_PARTICLE, 0),
        ],
    )
    .expect("two-state cover")
}

/// Standard 36-cell glider gun, oriented to fire its stream toward
/// increasing x and decreasing y, one glider every 30 steps.
fn gun_cells() -> Vec<(i64, i64)> {
    let rows: [&[i64]; 9] = [
        &[24],
        &[22, 24],
        &[12, 13, 20, 21, 34, 35],
        &[11, 15, 20, 21, 34, 35],
        &[0, 1, 10, 16, 20, 21],
        &[0, 1, 10, 14, 16, 17, 22, 24],
        &[10, 16, 24],
        &[11, 15],
        &[12, 13],
    ];
    let mut cells = Vec::new();
    for (row, xs) in rows.iter().enumerate() {
        for &x in *xs {
            cells.push((x, -(row as i64)));
        }
    }
    cells
}

/// Looks up a fixture by name.
pub fn fixture(name: &str) -> Result<Fixture> {
    match name {
        "shift-single-one" => {
            let alphabet = Alphabet::new(2)?;
            Ok(Fixture {
                name: "shift-single-one",
                automaton: CellularAutomaton::shift_left(1, alphabet)?,
                habitat: Some(one_spike_habitat()),
                seeds: vec![seed1(
                    "spike",
                    alphabet,
                    &[(7, 1)],
                    "a single 1 at cell 7; the origin sees it exactly once, at step 7",
                )],
                behavior: "Left shift restricted to single-spike configurations: every \
                           cell sees the spike exactly once and is 0 ever after, so all \
                           traces are finite, yet the spike can start arbitrarily far \
                           away, so no common deadline kills every configuration.",
            })
        }
        "lr-annihilation" => {
            let alphabet = Alphabet::new(3)?;
            Ok(Fixture {
                name: "lr-annihilation",
                automaton: CellularAutomaton::lr_annihilation()?,
                habitat: Some(particle_habitat()),
                seeds: vec![
                    seed1(
                        "approach",
                        alphabet,
                        &[(0, RIGHT_PARTICLE), (7, LEFT_PARTICLE)],
                        "a right-mover at 0 and a left-mover at 7; they cancel at step 4",
                    ),
                    seed1(
                        "adjacent",
                        alphabet,
                        &[(0, RIGHT_PARTICLE), (1, LEFT_PARTICLE)],
                        "touching opposite movers; both cells are 0 one step later",
                    ),
                    seed1(
                        "headon",
                        alphabet,
                        &[(0, RIGHT_PARTICLE), (2, LEFT_PARTICLE)],
                        "opposite movers aimed at the same cell; all 0 one step later",
                    ),
                ],
                behavior: "Symbol 1 moves left, symbol 2 moves right, and an approaching \
                           2..1 pair with gap g annihilates at step ceil(g/2). Habitat \
                           configurations alternate particle types; arrangements whose \
                           particles all pair up die out, while an unpaired particle \
                           runs forever.",
            })
        }
        "game-of-life" => {
            let glider: &[(i64, i64)] = &[(1, 2), (0, 1), (0, 0), (1, 0), (2, 0)];
            let lwss: &[(i64, i64)] = &[
                (1, 0),
                (4, 0),
                (0, -1),
                (0, -2),
                (4, -2),
                (0, -3),
                (1, -3),
                (2, -3),
                (3, -3),
            ];
            Ok(Fixture {
                name: "game-of-life",
                automaton: CellularAutomaton::game_of_life()?,
                habitat: None,
                seeds: vec![
                    seed2(
                        "glider",
                        glider,
                        "5-cell spaceship; translates by (-1,-1) every 4 steps",
                    ),
                    seed2(
                        "gun",
                        &gun_cells(),
                        "36-cell gun; emits a glider toward (+x,-y) every 30 steps",
                    ),
                    seed2(
                        "lwss",
                        lwss,
                        "9-cell lightweight spaceship; translates by (-2,0) every 4 steps",
                    ),
                ],
                behavior: "The standard two-dimensional life rule. Not a dying system: \
                           it hosts spaceships that escape every fixed-width tower and \
                           a gun whose stream keeps distant cells active forever.",
            })
        }
        "xor-pair" => {
            let alphabet = Alphabet::new(2)?;
            Ok(Fixture {
                name: "xor-pair",
                automaton: CellularAutomaton::xor_pair()?,
                habitat: None,
                seeds: vec![seed1(
                    "spike",
                    alphabet,
                    &[(0, 1)],
                    "a single 1; the support spreads leftward without bound",
                )],
                behavior: "Each cell becomes the xor of itself and its right neighbor. \
                           Finite supports grow without dying, so mortality probes stay \
                           honestly unknown at any finite horizon.",
            })
        }
        "countdown" => {
            let alphabet = Alphabet::new(3)?;
            Ok(Fixture {
                name: "countdown",
                automaton: CellularAutomaton::countdown(1)?,
                habitat: None,
                seeds: vec![seed1(
                    "pair",
                    alphabet,
                    &[(0, 2), (3, 1)],
                    "symbols 2 and 1; everything reaches 0 within two steps",
                )],
                behavior: "Every nonzero symbol decrements independently, so the whole \
                           space is dead after two steps: the simplest positive control \
                           for the bounded probes.",
            })
        }
        _ => Err(Error::UnknownFixture { name: name.into() }),
    }
}

/// Parses `fixture` or `fixture:seed` into the fixture and a chosen seed.
pub fn fixture_seed(address: &str) -> Result<(Fixture, Seed)> {
    let (name, seed_name) = match address.split_once(':') {
        Some((name, seed)) => (name, Some(seed)),
        None => (address, None),
    };
    let entry = fixture(name)?;
    let seed = match seed_name {
        Some(seed) => entry
            .seeds
            .iter()
            .find(|s| s.name == seed)
            .cloned()
            .ok_or_else(|| Error::UnknownFixture {
                name: format!("{name}:{seed}"),
            })?,
        None => entry.default_seed().clone(),
    };
    Ok((entry, seed))
}

/// State of the countdown-with-infinity system: finite values step downward,
/// 0 jumps to the absorbing point at infinity, and infinity stays put.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlexandroffState {
    Finite(u64),
    Infinity,
}

/// One step of the countdown-with-infinity map.
pub fn alexandroff_step(state: AlexandroffState) -> AlexandroffState {
    match state {
        AlexandroffState::Finite(0) => AlexandroffState::Infinity,
        AlexandroffState::Finite(n) => AlexandroffState::Finite(n - 1),
        AlexandroffState::Infinity => AlexandroffState::Infinity,
    }
}

/// Number of steps until the state starting at `n` reaches infinity,
/// computed by actually iterating the map. The count comes out to `n + 1`:
/// every start arrives, but arbitrarily late, which is exactly the gap
/// between pointwise death and death by a common deadline.
pub fn alexandroff_hitting_time(n: u64) -> u64 {
    let mut state = AlexandroffState::Finite(n);
    let mut steps = 0;
    while state != AlexandroffState::Infinity {
        state = alexandroff_step(state);
        steps += 1;
    }
    steps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Config, Symbol};
    use crate::probe::mortality_probe;
    use crate::probe::Certificate;

    #[test]
    fn every_registered_fixture_resolves_and_unknown_names_fail() {
        for name in FIXTURE_NAMES {
            let entry = fixture(name).unwrap();
            assert_eq!(entry.name, name);
            assert!(!entry.seeds.is_empty());
            for seed in &entry.seeds {
                assert_eq!(seed.config.dim(), entry.automaton.dim());
                assert_eq!(
                    seed.config.alphabet().size(),
                    entry.automaton.alphabet().size()
                );
            }
        }
        assert!(matches!(
            fixture("fredkin"),
            Err(Error::UnknownFixture { .. })
        ));
        assert!(matches!(
            fixture("game-of-life").unwrap().seed("blinker"),
            Err(Error::UnknownFixture { .. })
        ));
    }

    #[test]
    fn seed_addressing_accepts_bare_and_qualified_names() {
        let (entry, seed) = fixture_seed("game-of-life:lwss").unwrap();
        assert_eq!(entry.name, "game-of-life");
        assert_eq!(seed.name, "lwss");
        assert_eq!(seed.config.support_len(), 9);

        let (_, default) = fixture_seed("lr-annihilation").unwrap();
        assert_eq!(default.name, "approach");

        assert!(matches!(
            fixture_seed("game-of-life:boat"),
            Err(Error::UnknownFixture { .. })
        ));
    }

    #[test]
    fn habitat_seeds_are_habitat_members() {
        for name in FIXTURE_NAMES {
            let entry = fixture(name).unwrap();
            if let Some(habitat) = &entry.habitat {
                for seed in &entry.seeds {
                    assert!(
                        habitat.contains(&seed.config).unwrap(),
                        "{}:{}",
                        entry.name,
                        seed.name
                    );
                }
            }
        }
    }

    #[test]
    fn spike_habitat_admits_one_spike_only() {
        let habitat = one_spike_habitat();
        let alphabet = Alphabet::new(2).unwrap();
        let one = FiniteConfig::from_cells(1, alphabet, [(cell1(-3), 1)]).unwrap();
        let two = FiniteConfig::from_cells(1, alphabet, [(cell1(0), 1), (cell1(5), 1)]).unwrap();
        assert!(habitat.contains(&one).unwrap());
        assert!(!habitat.contains(&two).unwrap());
    }

    #[test]
    fn adjacent_and_headon_pairs_die_in_one_step() {
        let entry = fixture("lr-annihilation").unwrap();
        for seed in ["adjacent", "headon"] {
            let next = entry
                .automaton
                .step_finite(entry.seed(seed).unwrap())
                .unwrap();
            assert!(next.is_empty(), "{seed}");
        }
    }

    #[test]
    fn approaching_pairs_die_in_half_their_gap() {
        let entry = fixture("lr-annihilation").unwrap();
        let alphabet = entry.automaton.alphabet();
        for gap in 1..=40 {
            let pair = FiniteConfig::from_cells(
                1,
                alphabet,
                [(cell1(0), RIGHT_PARTICLE), (cell1(gap), LEFT_PARTICLE)],
            )
            .unwrap();
            let report = mortality_probe(&entry.automaton, &Config::Finite(pair), 64).unwrap();
            let expected = (gap as u32).div_ceil(2);
            assert_eq!(
                report.certificate,
                Some(Certificate::DeathTime(expected)),
                "gap {gap}"
            );
        }
    }

    /// Independent particle-level model of the annihilation rule: particles
    /// move one cell toward their heading unless an approaching pair is
    /// within two cells, in which case both vanish. The local table must
    /// reproduce this on every habitat arrangement of width 3 and 4.
    fn particle_step(particles: &[(i64, Symbol)]) -> Vec<(i64, Symbol)> {
        let mut dead = vec![false; particles.len()];
        for i in 0..particles.len().saturating_sub(1) {
            let (p, t) = particles[i];
            let (q, u) = particles[i + 1];
            if t == RIGHT_PARTICLE && u == LEFT_PARTICLE && q - p <= 2 {
                dead[i] = true;
                dead[i + 1] = true;
            }
        }
        particles
            .iter()
            .zip(&dead)
            .filter(|(_, &gone)| !gone)
            .map(|(&(p, t), _)| {
                if t == LEFT_PARTICLE {
                    (p - 1, t)
                } else {
                    (p + 1, t)
                }
            })
            .collect()
    }

    #[test]
    fn local_table_matches_the_particle_model_on_habitat_windows() {
        let entry = fixture("lr-annihilation").unwrap();
        let alphabet = entry.automaton.alphabet();
        for width in [3usize, 4] {
            for code in 0..3u32.pow(width as u32) {
                let word: Vec<Symbol> = (0..width)
                    .map(|i| (code / 3u32.pow(i as u32)) % 3)
                    .collect();
                let particles: Vec<(i64, Symbol)> = word
                    .iter()
                    .enumerate()
                    .filter(|(_, &s)| s != 0)
                    .map(|(i, &s)| (i as i64, s))
                    .collect();
                let alternating = particles.windows(2).all(|w| w[0].1 != w[1].1);
                if !alternating {
                    continue;
                }
                let config = FiniteConfig::from_cells(
                    1,
                    alphabet,
                    word.iter()
                        .enumerate()
                        .map(|(i, &s)| (cell1(i as i64), s)),
                )
                .unwrap();
                let stepped = entry.automaton.step_finite(&config).unwrap();
                let expected = FiniteConfig::from_cells(
                    1,
                    alphabet,
                    particle_step(&particles)
                        .into_iter()
                        .map(|(p, t)| (cell1(p), t)),
                )
                .unwrap();
                assert_eq!(stepped, expected, "word {word:?}");
            }
        }
    }

    #[test]
    fn spike_traces_are_finite_everywhere_but_unboundedly_late() {
        let entry = fixture("shift-single-one").unwrap();
        let alphabet = entry.automaton.alphabet();
        for n in -50..=50i64 {
            let config = Config::Finite(
                FiniteConfig::from_cells(1, alphabet, [(cell1(n), 1)]).unwrap(),
            );
            let trace = entry
                .automaton
                .trace(&config, &cell1(0), 200)
                .unwrap();
            let expected: Vec<usize> = if n >= 0 { vec![n as usize] } else { vec![] };
            assert_eq!(trace.support, expected, "spike at {n}");
        }
    }

    #[test]
    fn glider_translates_diagonally_every_four_steps() {
        let entry = fixture("game-of-life").unwrap();
        let glider = entry.seed("glider").unwrap();
        let mut state = glider.clone();
        for _ in 0..4 {
            state = entry.automaton.step_finite(&state).unwrap();
        }
        let back = state.shift(&cell2(-1, -1)).unwrap();
        assert_eq!(&back, glider);
    }

    #[test]
    fn lwss_translates_horizontally_every_four_steps() {
        let entry = fixture("game-of-life").unwrap();
        let ship = entry.seed("lwss").unwrap();
        let mut state = ship.clone();
        for _ in 0..4 {
            state = entry.automaton.step_finite(&state).unwrap();
        }
        let back = state.shift(&cell2(-2, 0)).unwrap();
        assert_eq!(&back, ship);
    }

    #[test]
    fn gun_emits_a_glider_every_thirty_steps() {
        let entry = fixture("game-of-life").unwrap();
        let gun = entry.seed("gun").unwrap();
        assert_eq!(gun.support_len(), 36);
        let mut state = gun.clone();
        for _ in 0..30 {
            state = entry.automaton.step_finite(&state).unwrap();
        }
        assert_eq!(state.support_len(), 36 + 5);
        // The emitted glider sits strictly below the gun body and the gun
        // itself has returned to its starting phase.
        let recovered: Vec<_> = state
            .cells()
            .filter(|(cell, _)| cell.coord(1) >= -8)
            .map(|(cell, s)| (cell.clone(), s))
            .collect();
        let original = gun.clone();
        let body = FiniteConfig::from_cells(2, gun.alphabet(), recovered).unwrap();
        assert_eq!(body, original);
        for _ in 0..30 {
            state = entry.automaton.step_finite(&state).unwrap();
        }
        assert_eq!(state.support_len(), 36 + 10);
    }

    #[test]
    fn infinity_countdown_examples() {
        assert_eq!(
            alexandroff_step(AlexandroffState::Finite(5)),
            AlexandroffState::Finite(4)
        );
        assert_eq!(
            alexandroff_step(AlexandroffState::Finite(0)),
            AlexandroffState::Infinity
        );
        assert_eq!(
            alexandroff_step(AlexandroffState::Infinity),
            AlexandroffState::Infinity
        );
        assert_eq!(alexandroff_hitting_time(0), 1);
        assert_eq!(alexandroff_hitting_time(7), 8);
    }

    #[test]
    fn hitting_times_are_exact_and_strictly_increasing() {
        let mut previous = 0;
        for n in 0..=2000 {
            let time = alexandroff_hitting_time(n);
            assert_eq!(time, n + 1);
            assert!(time > previous || n == 0);
            // The state is still finite strictly before its hitting time.
            let mut state = AlexandroffState::Finite(n);
            for _ in 0..n {
                state = alexandroff_step(state);
                assert_ne!(state, AlexandroffState::Infinity);
            }
            previous = time;
        }
    }
}
