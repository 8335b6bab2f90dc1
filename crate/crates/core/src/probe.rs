//! Bounded decision probes over automata and configurations, each exact at
//! its stated horizon and honest past it.
//!
//! Every probe returns a [`ProbeReport`] with a three-way [`Verdict`]:
//! `Holds` and `Fails` are proven facts about the bounded question asked
//! (and `Fails` always carries a witness), while `Unknown` marks a horizon
//! or sample budget running out before a decision. No probe claims an
//! unbounded global property: one-dimensional nilpotency is undecidable in
//! general, so callers get window-exact statements like "every radius-`rn`
//! window dies in `n` steps" rather than "the automaton is nilpotent".
//!
//! Enumerations run in lexicographic order over symbol tuples and sampled
//! runs take an explicit seed, so a witness is a deterministic function of
//! the inputs: the first counterexample in enumeration order wins. Sizes
//! are capped by [`Guards`] and overruns surface as errors, never as a
//! silently truncated answer.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::CellularAutomaton;
use crate::config::{sum, Alphabet, Config, FiniteConfig, OverlayConfig, Pattern, Symbol, TorusConfig};
use crate::error::{Error, Result};
use crate::geometry::{ball_enumerate, CellSet, CellVector, TowerDescriptor};

/// What a probe established about its bounded question.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => write!(f, "Holds"),
            Verdict::Fails => write!(f, "Fails"),
            Verdict::Unknown => write!(f, "Unknown"),
        }
    }
}

/// The concrete object a failing probe exhibits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A window assignment (explicit zeros included).
    Window(Pattern),
    /// A cell observed at a time step.
    Cell { cell: CellVector, time: u32 },
    /// A one-dimensional word.
    Word(Vec<Symbol>),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Window(pattern) => write!(f, "window{pattern}"),
            Witness::Cell { cell, time } => write!(f, "cell{cell}@{time}"),
            Witness::Word(word) => {
                write!(f, "word[")?;
                for (i, s) in word.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// The positive fact a successful probe certifies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// Every window of the checked shape dies within this many steps.
    NilpotencyIndex(u32),
    /// Depth of the deepest preimage level reached.
    PreimageDepth(u32),
    /// Every checked window clears the observation ball by this step.
    VisitBound(u32),
    /// First step at which the configuration was entirely zero.
    DeathTime(u32),
    /// No support cell left the tower up to this step.
    ConfinedThrough(u32),
    /// Exact orbit shape on a finite phase space.
    Orbit {
        preperiod: u32,
        period: u32,
        cycle_all_zero: bool,
        cycle_hits_origin: bool,
    },
    /// The parts evolved independently through this step.
    DisjointThrough(u32),
    /// Per-layer trace words at the origin.
    LayerTraces(Vec<Vec<Symbol>>),
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::NilpotencyIndex(n) => write!(f, "nilpotency_index:{n}"),
            Certificate::PreimageDepth(n) => write!(f, "preimage_depth:{n}"),
            Certificate::VisitBound(n) => write!(f, "visit_bound:{n}"),
            Certificate::DeathTime(t) => write!(f, "death_time:{t}"),
            Certificate::ConfinedThrough(t) => write!(f, "confined_through:{t}"),
            Certificate::Orbit {
                preperiod,
                period,
                cycle_all_zero,
                cycle_hits_origin,
            } => write!(
                f,
                "orbit:preperiod={preperiod},period={period},all_zero={cycle_all_zero},hits_origin={cycle_hits_origin}"
            ),
            Certificate::DisjointThrough(t) => write!(f, "disjoint_through:{t}"),
            Certificate::LayerTraces(traces) => {
                write!(f, "layer_traces:")?;
                for (i, word) in traces.iter().enumerate() {
                    if i > 0 {
                        write!(f, "|")?;
                    }
                    for (j, s) in word.iter().enumerate() {
                        if j > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{s}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Uniform probe result. Displays as stable-ordered `key=value` lines:
/// `verdict`, `horizon`, then `witness` and `certificate` when present, then
/// `stats.*` sorted by key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeReport {
    pub verdict: Verdict,
    pub horizon: u32,
    pub witness: Option<Witness>,
    pub certificate: Option<Certificate>,
    pub stats: BTreeMap<String, u64>,
}

impl ProbeReport {
    fn new(verdict: Verdict, horizon: u32) -> ProbeReport {
        ProbeReport {
            verdict,
            horizon,
            witness: None,
            certificate: None,
            stats: BTreeMap::new(),
        }
    }

    fn with_witness(mut self, witness: Witness) -> ProbeReport {
        self.witness = Some(witness);
        self
    }

    fn with_certificate(mut self, certificate: Certificate) -> ProbeReport {
        self.certificate = Some(certificate);
        self
    }

    fn with_stat(mut self, key: &str, value: u64) -> ProbeReport {
        self.stats.insert(key.to_string(), value);
        self
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn fails(&self) -> bool {
        self.verdict == Verdict::Fails
    }
}

impl fmt::Display for ProbeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict={}", self.verdict)?;
        writeln!(f, "horizon={}", self.horizon)?;
        if let Some(witness) = &self.witness {
            writeln!(f, "witness={witness}")?;
        }
        if let Some(certificate) = &self.certificate {
            writeln!(f, "certificate={certificate}")?;
        }
        for (key, value) in &self.stats {
            writeln!(f, "stats.{key}={value}")?;
        }
        Ok(())
    }
}

/// Enumeration ceilings. Every field is overridable; the defaults keep any
/// single probe call at desk scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guards {
    /// Window assignments enumerated per probe.
    pub max_windows: u64,
    /// Torus phase-space cells for orbit analysis.
    pub max_torus_cells: u64,
    /// Deduplicated words per preimage level.
    pub max_level_words: u64,
    /// Orbit steps before cycle detection gives up.
    pub max_orbit_steps: u64,
}

impl Default for Guards {
    fn default() -> Guards {
        Guards {
            max_windows: 1 << 24,
            max_torus_cells: 1 << 20,
            max_level_words: 1 << 20,
            max_orbit_steps: 1 << 20,
        }
    }
}

/// How [`uniform_visit_bound`] explores the window space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VisitMode {
    Exhaustive,
    Sampled { seed: u64, trials: u64 },
}

/// Lexicographic sweep over all symbol assignments of a fixed cell domain.
/// The first assignment is all-zero; the final domain cell varies fastest,
/// so assignments come out in increasing lexicographic order as tuples.
struct WindowSweep {
    size: u32,
    domain: Vec<CellVector>,
    assignment: Vec<Symbol>,
    started: bool,
    done: bool,
    emitted: u64,
}

impl WindowSweep {
    fn new(alphabet: Alphabet, domain: Vec<CellVector>, guard: u64) -> Result<WindowSweep> {
        let mut total: u128 = 1;
        for _ in &domain {
            total = total.saturating_mul(alphabet.size() as u128);
            if total > guard as u128 {
                return Err(Error::GuardExceeded {
                    what: "window enumeration",
                    needed: total,
                    guard: guard as u128,
                });
            }
        }
        Ok(WindowSweep {
            size: alphabet.size(),
            assignment: vec![0; domain.len()],
            domain,
            started: false,
            done: false,
            emitted: 0,
        })
    }

    fn next(&mut self) -> Option<&[Symbol]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.emitted = 1;
            return Some(&self.assignment);
        }
        let mut slot = self.assignment.len();
        loop {
            if slot == 0 {
                self.done = true;
                return None;
            }
            slot -= 1;
            self.assignment[slot] += 1;
            if self.assignment[slot] < self.size {
                break;
            }
            self.assignment[slot] = 0;
        }
        self.emitted += 1;
        Some(&self.assignment)
    }

    fn window_config(
        &self,
        dim: usize,
        alphabet: Alphabet,
        assignment: &[Symbol],
    ) -> Result<FiniteConfig> {
        FiniteConfig::from_cells(
            dim,
            alphabet,
            self.domain
                .iter()
                .zip(assignment)
                .map(|(cell, &symbol)| (cell.clone(), symbol)),
        )
    }

    fn window_pattern(&self, dim: usize, assignment: &[Symbol]) -> Result<Pattern> {
        Pattern::from_cells(
            dim,
            self.domain
                .iter()
                .zip(assignment)
                .map(|(cell, &symbol)| (cell.clone(), symbol)),
        )
    }
}

fn origin_ball(radius: u32, dim: usize) -> Result<Vec<CellVector>> {
    let origin = CellSet::from_cells(dim, [CellVector::zero(dim)])?;
    Ok(ball_enumerate(radius, &origin)?.iter().cloned().collect())
}

/// Checks whether every window of shape `B_{rn}(0)` maps to 0 in `n` steps.
/// This is exact: the value of the `n`-step image at the origin depends on
/// exactly that window, so `Holds` proves every configuration whatsoever
/// clears the origin by step `n`, and a failing window extends (by zeros)
/// to a configuration alive at the origin at step `n`.
pub fn nilpotency_within(
    c: &CellularAutomaton,
    n: u32,
    guards: &Guards,
) -> Result<ProbeReport> {
    if n == 0 {
        return Err(Error::Unsupported(
            "nilpotency probes need at least one step".into(),
        ));
    }
    let dim = c.dim();
    let origin = CellVector::zero(dim);
    let domain = origin_ball(c.radius() * n, dim)?;
    let mut sweep = WindowSweep::new(c.alphabet(), domain, guards.max_windows)?;
    while let Some(assignment) = sweep.next() {
        let assignment = assignment.to_vec();
        let window = sweep.window_config(dim, c.alphabet(), &assignment)?;
        let value = c.cone_eval(&Config::Finite(window), &origin, n)?;
        if value != 0 {
            let pattern = sweep.window_pattern(dim, &assignment)?;
            return Ok(ProbeReport::new(Verdict::Fails, n)
                .with_witness(Witness::Window(pattern))
                .with_stat("windows", sweep.emitted));
        }
    }
    Ok(ProbeReport::new(Verdict::Holds, n)
        .with_certificate(Certificate::NilpotencyIndex(n))
        .with_stat("windows", sweep.emitted))
}

/// Depth-first enumeration of the words mapping to `target` in one step,
/// constraint-checked as each cell is placed.
fn preimage_words(
    c: &CellularAutomaton,
    target: &[Symbol],
    out: &mut BTreeSet<Vec<Symbol>>,
    guard: u64,
) -> Result<()> {
    let r = c.radius() as usize;
    let len = target.len() + 2 * r;
    fn place(
        c: &CellularAutomaton,
        target: &[Symbol],
        r: usize,
        len: usize,
        word: &mut Vec<Symbol>,
        out: &mut BTreeSet<Vec<Symbol>>,
        guard: u64,
    ) -> Result<()> {
        if word.len() == len {
            out.insert(word.clone());
            if out.len() as u64 > guard {
                return Err(Error::GuardExceeded {
                    what: "preimage words per level",
                    needed: out.len() as u128,
                    guard: guard as u128,
                });
            }
            return Ok(());
        }
        for symbol in c.alphabet().symbols() {
            word.push(symbol);
            let placed = word.len() - 1;
            let consistent = if placed >= 2 * r && placed - 2 * r < target.len() {
                let j = placed - 2 * r;
                let value = c.apply_local(&|offset: &CellVector| {
                    let index = (j + r) as i64 + offset.coord(0);
                    Ok(word[index as usize])
                })?;
                value == target[j]
            } else {
                true
            };
            if consistent {
                place(c, target, r, len, word, out, guard)?;
            }
            word.pop();
        }
        Ok(())
    }
    place(c, target, r, len, &mut Vec::with_capacity(len), out, guard)
}

/// Searches for a `depth`-long backward chain of word preimages above `w`.
/// `Holds` exhibits the chain's top word; `Fails` means the chain breaks at
/// some level, which for a single nonzero symbol is exactly the statement
/// that no window keeps that symbol alive this long.
pub fn deep_preimage(
    c: &CellularAutomaton,
    word: &[Symbol],
    depth: u32,
    guards: &Guards,
) -> Result<ProbeReport> {
    crate::geometry::check_dim(1, c.dim())?;
    if word.is_empty() {
        return Err(Error::Unsupported("preimage chains need a nonempty word".into()));
    }
    for &symbol in word {
        c.alphabet().check(symbol)?;
    }
    let mut level: BTreeSet<Vec<Symbol>> = BTreeSet::from([word.to_vec()]);
    let mut enumerated: u64 = 1;
    for reached in 1..=depth {
        let mut next = BTreeSet::new();
        for target in &level {
            preimage_words(c, target, &mut next, guards.max_level_words)?;
        }
        enumerated += next.len() as u64;
        if next.is_empty() {
            return Ok(ProbeReport::new(Verdict::Fails, depth)
                .with_witness(Witness::Word(word.to_vec()))
                .with_certificate(Certificate::PreimageDepth(reached - 1))
                .with_stat("words", enumerated)
                .with_stat("levels", (reached - 1) as u64));
        }
        level = next;
    }
    let top = level.iter().next().expect("nonempty level").clone();
    Ok(ProbeReport::new(Verdict::Holds, depth)
        .with_witness(Witness::Word(top))
        .with_certificate(Certificate::PreimageDepth(depth))
        .with_stat("words", enumerated)
        .with_stat("levels", depth as u64))
}

fn window_clears(
    c: &CellularAutomaton,
    window: FiniteConfig,
    observed: &[CellVector],
    n: u32,
) -> Result<bool> {
    let mut current = window;
    for j in 0..=n {
        let mut all_zero = true;
        for cell in observed {
            if current.get(cell)? != 0 {
                all_zero = false;
                break;
            }
        }
        if all_zero {
            return Ok(true);
        }
        if j < n {
            current = c.step_finite(&current)?;
        }
    }
    Ok(false)
}

/// Checks whether every window of shape `B_{k+rn}(0)` clears the whole
/// observation ball `B_k(0)` at some step `j <= n`. Exhaustive mode is
/// exact over all configurations (the observation ball through step `n`
/// depends on exactly that window); sampled mode can only refute, so a
/// counterexample-free run reports `Unknown`.
pub fn uniform_visit_bound(
    c: &CellularAutomaton,
    k: u32,
    n: u32,
    mode: VisitMode,
    guards: &Guards,
) -> Result<ProbeReport> {
    let dim = c.dim();
    let domain = origin_ball(k + c.radius() * n, dim)?;
    let observed = origin_ball(k, dim)?;
    match mode {
        VisitMode::Exhaustive => {
            let mut sweep = WindowSweep::new(c.alphabet(), domain, guards.max_windows)?;
            while let Some(assignment) = sweep.next() {
                let assignment = assignment.to_vec();
                let window = sweep.window_config(dim, c.alphabet(), &assignment)?;
                if !window_clears(c, window, &observed, n)? {
                    let pattern = sweep.window_pattern(dim, &assignment)?;
                    return Ok(ProbeReport::new(Verdict::Fails, n)
                        .with_witness(Witness::Window(pattern))
                        .with_stat("windows", sweep.emitted));
                }
            }
            Ok(ProbeReport::new(Verdict::Holds, n)
                .with_certificate(Certificate::VisitBound(n))
                .with_stat("windows", sweep.emitted))
        }
        VisitMode::Sampled { seed, trials } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let size = c.alphabet().size();
            for trial in 0..trials {
                let assignment: Vec<Symbol> =
                    (0..domain.len()).map(|_| rng.gen_range(0..size)).collect();
                let window = FiniteConfig::from_cells(
                    dim,
                    c.alphabet(),
                    domain.iter().zip(&assignment).map(|(cell, &s)| (cell.clone(), s)),
                )?;
                if !window_clears(c, window, &observed, n)? {
                    let pattern = Pattern::from_cells(
                        dim,
                        domain.iter().zip(&assignment).map(|(cell, &s)| (cell.clone(), s)),
                    )?;
                    return Ok(ProbeReport::new(Verdict::Fails, n)
                        .with_witness(Witness::Window(pattern))
                        .with_stat("trials", trial + 1));
                }
            }
            // Sampling cannot certify the bound, only fail to refute it.
            Ok(ProbeReport::new(Verdict::Unknown, n).with_stat("trials", trials))
        }
    }
}

type StateKey = Vec<(Vec<i64>, Symbol)>;

fn mortal_state_key(x: &Config) -> Result<StateKey> {
    match x {
        Config::Finite(c) => Ok(c.cells().map(|(v, s)| (v.coords().to_vec(), s)).collect()),
        Config::Tube(c) => Ok(c
            .quotient_cells()
            .map(|(v, s)| (v.coords().to_vec(), s))
            .collect()),
        _ => Err(Error::Unsupported(
            "mortality probes track finite or tube configurations".into(),
        )),
    }
}

fn state_pattern(dim: usize, key: &StateKey) -> Result<Pattern> {
    Pattern::from_cells(
        dim,
        key.iter()
            .map(|(coords, s)| (CellVector::new(coords.clone()).expect("stored dim"), *s)),
    )
}

/// Runs the configuration forward looking for death (empty support) or an
/// exact revisit. Death gives `Holds` with the death time; a revisited
/// nonzero state proves immortality (`Fails`); horizon exhaustion without
/// either is honestly `Unknown`, because a finite prefix of a growing orbit
/// certifies nothing.
pub fn mortality_probe(
    c: &CellularAutomaton,
    x: &Config,
    horizon: u32,
) -> Result<ProbeReport> {
    if horizon == 0 {
        return Err(Error::Unsupported("mortality probes need a horizon of at least 1".into()));
    }
    let mut seen: HashMap<StateKey, u32> = HashMap::new();
    let mut history: Vec<Config> = Vec::new();
    let mut current = x.clone();
    let mut support_max: u64 = 0;
    let origin = CellVector::zero(x.dim());
    for t in 0..=horizon {
        let key = mortal_state_key(&current)?;
        support_max = support_max.max(key.len() as u64);
        if key.is_empty() {
            return Ok(ProbeReport::new(Verdict::Holds, horizon)
                .with_certificate(Certificate::DeathTime(t))
                .with_stat("steps", t as u64)
                .with_stat("support_max", support_max));
        }
        if let Some(&entry) = seen.get(&key) {
            let period = t - entry;
            let mut hits_origin = false;
            for state in &history[entry as usize..t as usize] {
                if state.get(&origin)? != 0 {
                    hits_origin = true;
                    break;
                }
            }
            let witness = state_pattern(x.dim(), &mortal_state_key(&history[entry as usize])?)?;
            return Ok(ProbeReport::new(Verdict::Fails, horizon)
                .with_witness(Witness::Window(witness))
                .with_certificate(Certificate::Orbit {
                    preperiod: entry,
                    period,
                    cycle_all_zero: false,
                    cycle_hits_origin: hits_origin,
                })
                .with_stat("steps", t as u64)
                .with_stat("support_max", support_max));
        }
        seen.insert(key.clone(), t);
        history.push(current.clone());
        if t < horizon {
            current = c.step(&current)?;
        }
    }
    let final_support = mortal_state_key(&current)?.len() as u64;
    Ok(ProbeReport::new(Verdict::Unknown, horizon)
        .with_stat("steps", horizon as u64)
        .with_stat("support_final", final_support)
        .with_stat("support_max", support_max))
}

/// Watches whether the evolving support stays inside the tower of width `k`
/// along axis `j` erected over the initial support. An escaping cell is a
/// hard counterexample; staying inside only certifies confinement through
/// the horizon, so the non-failing verdict is `Unknown`.
pub fn tower_confinement(
    c: &CellularAutomaton,
    x: &FiniteConfig,
    axis: usize,
    k: u32,
    horizon: u32,
) -> Result<ProbeReport> {
    let tower = TowerDescriptor::new(axis, k, x.support()?)?;
    let mut current = x.clone();
    let mut checked: u64 = 0;
    for t in 0..=horizon {
        for (cell, _) in current.cells() {
            checked += 1;
            if !tower.contains(cell)? {
                return Ok(ProbeReport::new(Verdict::Fails, horizon)
                    .with_witness(Witness::Cell {
                        cell: cell.clone(),
                        time: t,
                    })
                    .with_stat("cells", checked)
                    .with_stat("steps", t as u64));
            }
        }
        if t < horizon {
            current = c.step_finite(&current)?;
        }
    }
    Ok(ProbeReport::new(Verdict::Unknown, horizon)
        .with_certificate(Certificate::ConfinedThrough(horizon))
        .with_stat("cells", checked)
        .with_stat("steps", horizon as u64))
}

/// Exact orbit analysis on a torus: every orbit enters a cycle, found here
/// by hashing states. `Holds` means the cycle is the all-zero fixed point,
/// so this orbit dies; otherwise the probe fails with a cell that stays
/// active forever.
pub fn cycle_analysis(
    c: &CellularAutomaton,
    x: &TorusConfig,
    guards: &Guards,
) -> Result<ProbeReport> {
    let volume = x.volume() as u64;
    if volume > guards.max_torus_cells {
        return Err(Error::GuardExceeded {
            what: "torus phase-space cells",
            needed: volume as u128,
            guard: guards.max_torus_cells as u128,
        });
    }
    let mut seen: HashMap<Vec<Symbol>, u32> = HashMap::new();
    let mut history: Vec<TorusConfig> = Vec::new();
    let mut current = x.clone();
    let mut t: u32 = 0;
    let (preperiod, period) = loop {
        let key = current.raw_cells().to_vec();
        if let Some(&entry) = seen.get(&key) {
            break (entry, t - entry);
        }
        if t as u64 >= guards.max_orbit_steps {
            return Err(Error::GuardExceeded {
                what: "orbit steps",
                needed: t as u128 + 1,
                guard: guards.max_orbit_steps as u128,
            });
        }
        seen.insert(key, t);
        history.push(current.clone());
        current = c.step_torus(&current)?;
        t += 1;
    };
    let cycle = &history[preperiod as usize..(preperiod + period) as usize];
    let cycle_all_zero = period == 1 && cycle[0].is_zero();
    let origin = CellVector::zero(x.dim());
    let cycle_hits_origin = cycle
        .iter()
        .map(|state| state.get(&origin))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .any(|&s| s != 0);
    let certificate = Certificate::Orbit {
        preperiod,
        period,
        cycle_all_zero,
        cycle_hits_origin,
    };
    let report = ProbeReport::new(
        if cycle_all_zero { Verdict::Holds } else { Verdict::Fails },
        t,
    )
    .with_certificate(certificate)
    .with_stat("steps", t as u64)
    .with_stat("volume", volume);
    if cycle_all_zero {
        return Ok(report);
    }
    // Exhibit a live cell inside the cycle.
    for (i, state) in cycle.iter().enumerate() {
        for cell in state.domain() {
            if state.get(&cell)? != 0 {
                return Ok(report.with_witness(Witness::Cell {
                    cell,
                    time: preperiod + i as u32,
                }));
            }
        }
    }
    unreachable!("a cycle that is not all-zero contains a nonzero cell");
}

/// How a pair of configurations is scanned for interaction cells.
enum PairScan {
    /// At least one part has finite support; candidates come from the
    /// finite side(s), since an interaction cell sits within the
    /// neighborhood radius of both supports.
    Finite { from_a: bool, from_b: bool },
    /// Both parts share the same periodic axis and period, so candidates
    /// live in the common quotient.
    Quotient { axis: usize, period: i64 },
}

fn pair_scan(a: &Config, b: &Config) -> Result<PairScan> {
    match (a, b) {
        (Config::Finite(_), Config::Finite(_)) => Ok(PairScan::Finite {
            from_a: true,
            from_b: true,
        }),
        (Config::Finite(_), Config::Tube(_)) => Ok(PairScan::Finite {
            from_a: true,
            from_b: false,
        }),
        (Config::Tube(_), Config::Finite(_)) => Ok(PairScan::Finite {
            from_a: false,
            from_b: true,
        }),
        (Config::Tube(p), Config::Tube(q)) if p.axis() == q.axis() && p.period() == q.period() => {
            Ok(PairScan::Quotient {
                axis: p.axis(),
                period: p.period(),
            })
        }
        _ => Err(Error::Unsupported(
            "disjoint evolution is tracked for finite parts, finite-tube pairs, and tubes sharing axis and period".into(),
        )),
    }
}

fn part_cells(x: &Config) -> Vec<CellVector> {
    match x {
        Config::Finite(c) => c.cells().map(|(v, _)| v.clone()).collect(),
        Config::Tube(c) => c.quotient_cells().map(|(v, _)| v.clone()).collect(),
        _ => Vec::new(),
    }
}

fn interaction_candidates(
    c: &CellularAutomaton,
    scan: &PairScan,
    a: &Config,
    b: &Config,
) -> Result<BTreeSet<CellVector>> {
    let mut sources = Vec::new();
    match scan {
        PairScan::Finite { from_a, from_b } => {
            if *from_a {
                sources.extend(part_cells(a));
            }
            if *from_b {
                sources.extend(part_cells(b));
            }
        }
        PairScan::Quotient { .. } => {
            sources.extend(part_cells(a));
            sources.extend(part_cells(b));
        }
    }
    let mut candidates = BTreeSet::new();
    for cell in sources {
        for offset in c.neighborhood().offsets() {
            let mut v = cell.sub(offset)?;
            if let PairScan::Quotient { axis, period } = scan {
                v = v.with_coord(*axis, v.coord(*axis).rem_euclid(*period))?;
            }
            candidates.insert(v);
        }
    }
    Ok(candidates)
}

fn window_touches(c: &CellularAutomaton, x: &Config, v: &CellVector) -> Result<bool> {
    for offset in c.neighborhood().offsets() {
        if x.get(&v.add(offset)?)? != 0 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Verifies step by step that the joint evolution of `a + b` equals the
/// independent evolutions summed: the check is restricted to interaction
/// cells (those whose neighborhood window touches both supports), since
/// everywhere else equality is automatic from locality and the quiescent
/// background. Fails at the first support collision or pointwise mismatch.
pub fn check_disjoint_evolution(
    c: &CellularAutomaton,
    a: &Config,
    b: &Config,
    horizon: u32,
) -> Result<ProbeReport> {
    let scan = pair_scan(a, b)?;
    let mut a_cur = a.clone();
    let mut b_cur = b.clone();
    // A collision at time zero violates the caller's precondition.
    let mut s_cur = sum(&a_cur, &b_cur)?;
    let mut interactions: u64 = 0;
    for j in 0..horizon {
        let a_next = c.step(&a_cur)?;
        let b_next = c.step(&b_cur)?;
        let s_next = match sum(&a_next, &b_next) {
            Ok(s) => s,
            Err(Error::SupportOverlap { cell }) => {
                return Ok(ProbeReport::new(Verdict::Fails, horizon)
                    .with_witness(Witness::Cell { cell, time: j + 1 })
                    .with_stat("interactions", interactions)
                    .with_stat("steps", j as u64));
            }
            Err(other) => return Err(other),
        };
        for v in interaction_candidates(c, &scan, &a_cur, &b_cur)? {
            if !(window_touches(c, &a_cur, &v)? && window_touches(c, &b_cur, &v)?) {
                continue;
            }
            interactions += 1;
            let joint = c.apply_local(&|offset: &CellVector| s_cur.get(&v.add(offset)?))?;
            let ra = a_next.get(&v)?;
            let rb = b_next.get(&v)?;
            if (ra != 0 && rb != 0) || joint != ra + rb {
                return Ok(ProbeReport::new(Verdict::Fails, horizon)
                    .with_witness(Witness::Cell { cell: v, time: j + 1 })
                    .with_stat("interactions", interactions)
                    .with_stat("steps", j as u64));
            }
        }
        a_cur = a_next;
        b_cur = b_next;
        s_cur = s_next;
    }
    Ok(ProbeReport::new(Verdict::Holds, horizon)
        .with_certificate(Certificate::DisjointThrough(horizon))
        .with_stat("interactions", interactions)
        .with_stat("steps", horizon as u64))
}

/// One building block of a layered configuration: a finite pattern placed
/// at an offset, optionally smeared periodically along one axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layer {
    pub pattern: FiniteConfig,
    pub offset: CellVector,
    pub period: Option<(usize, i64)>,
}

/// A nonempty list of layers over one dimension and alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerSpec {
    layers: Vec<Layer>,
}

impl LayerSpec {
    pub fn new(layers: Vec<Layer>) -> Result<LayerSpec> {
        let first = layers
            .first()
            .ok_or_else(|| Error::Unsupported("layer assembly needs at least one layer".into()))?;
        let dim = first.pattern.dim();
        let alphabet = first.pattern.alphabet();
        for layer in &layers {
            crate::geometry::check_dim(dim, layer.pattern.dim())?;
            crate::geometry::check_dim(dim, layer.offset.dim())?;
            if layer.pattern.alphabet().size() != alphabet.size() {
                return Err(Error::AlphabetMismatch {
                    expected: alphabet.size(),
                    found: layer.pattern.alphabet().size(),
                });
            }
        }
        Ok(LayerSpec { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    fn parts(&self) -> Result<Vec<Config>> {
        self.layers
            .iter()
            .map(|layer| {
                let placed = layer.pattern.shift(&layer.offset.scale(-1))?;
                Ok(match layer.period {
                    Some((axis, p)) => Config::Tube(placed.periodize(axis, p)?),
                    None => Config::Finite(placed),
                })
            })
            .collect()
    }
}

/// Builds the overlay of all layers, verifies pairwise disjoint evolution
/// through the horizon, and traces the overlay at the origin by two
/// independent routes: the engine's own trace of the overlay, and the
/// pointwise sum of per-layer traces. The two must agree whenever the
/// layers evolve disjointly; the certificate carries the per-layer words.
pub fn assemble_witness(
    c: &CellularAutomaton,
    layers: &LayerSpec,
    horizon: u32,
) -> Result<(OverlayConfig, ProbeReport)> {
    let parts = layers.parts()?;
    let overlay = OverlayConfig::new(parts.clone())?;
    let origin = CellVector::zero(c.dim());
    let trace_len = horizon as usize + 1;

    let layer_traces: Vec<Vec<Symbol>> = parts
        .iter()
        .map(|part| Ok(c.trace(part, &origin, trace_len)?.word))
        .collect::<Result<_>>()?;
    let overlay_trace = c.trace(&Config::Overlay(overlay.clone()), &origin, trace_len)?;

    let mut verdict = Verdict::Holds;
    let mut witness = None;
    'pairs: for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            let pair = check_disjoint_evolution(c, &parts[i], &parts[j], horizon)?;
            if pair.verdict != Verdict::Holds {
                verdict = pair.verdict;
                witness = pair.witness;
                break 'pairs;
            }
        }
    }

    if verdict == Verdict::Holds {
        // Disjointness proven, so the routes must agree; a mismatch would
        // expose an engine inconsistency rather than layer interaction.
        for t in 0..trace_len {
            let mut combined: Symbol = 0;
            let mut live_layers = 0;
            for word in &layer_traces {
                if word[t] != 0 {
                    live_layers += 1;
                    combined = word[t];
                }
            }
            if live_layers > 1 || combined != overlay_trace.word[t] {
                verdict = Verdict::Fails;
                witness = Some(Witness::Cell {
                    cell: origin.clone(),
                    time: t as u32,
                });
                break;
            }
        }
    }

    // A coarse but safe placement hint: offsets at least this far apart keep
    // radius-r parts from interacting within the horizon, since influence
    // travels at most r cells per step.
    let r = c.radius() as u64;
    let suggested = (r + 1) * horizon as u64 + 2 * r + 1;
    let mut report = ProbeReport::new(verdict, horizon)
        .with_certificate(Certificate::LayerTraces(layer_traces))
        .with_stat("layers", parts.len() as u64)
        .with_stat("suggested_separation", suggested)
        .with_stat("trace_support", overlay_trace.support.len() as u64);
    report.witness = witness;
    Ok((overlay, report))
}
