//! Local rules and the global maps they induce.
//!
//! A [`CellularAutomaton`] pairs a finite ordered [`Neighborhood`] with a
//! [`LocalRule`]. Four rule representations share one evaluator,
//! [`CellularAutomaton::apply_local`]: explicit tables, named builtin rules,
//! lazy rule powers, and lazy folded rules produced by
//! [`CellularAutomaton::reduce_dimension`]. Powers and folded rules close
//! over their base automaton instead of materializing tables, whose size
//! `|S|^|V|` grows out of reach almost immediately.
//!
//! Stepping is supported for finite, tube, and torus configurations (and for
//! overlays that flatten to one of those). Arbitrary overlays are evaluated
//! pointwise through the dependence cone instead: the value of the `n`-th
//! image at `v` only depends on input cells within max-norm distance `r·n`
//! of `v`, so [`CellularAutomaton::cone_eval`] recurses through that cone
//! with memoization keyed by (cell, steps remaining).

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::config::{self, check_alphabet, Alphabet, Config, FiniteConfig, Symbol, TorusConfig, TubeConfig};
use crate::error::{Error, Result};
use crate::geometry::{ball_enumerate, check_axis, check_dim, CellSet, CellVector};
use crate::textio::{self, Scanner};

/// Left-moving particle of the two-particle annihilation rule.
pub const LEFT_PARTICLE: Symbol = 1;
/// Right-moving particle of the two-particle annihilation rule.
pub const RIGHT_PARTICLE: Symbol = 2;

/// Largest number of entries an explicit rule table may hold.
const TABLE_GUARD: u64 = 1 << 24;
/// Largest neighborhood a derived rule power may declare.
const POWER_NEIGHBORHOOD_GUARD: u128 = 1 << 20;

/// The finite ordered set of offsets a local rule reads. The order is
/// significant: it fixes the tuple order of table rules and of the text
/// format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighborhood {
    offsets: Vec<CellVector>,
    radius: u32,
}

impl Neighborhood {
    pub fn new(offsets: Vec<CellVector>) -> Result<Neighborhood> {
        let first = offsets.first().ok_or(Error::EmptyCellSet)?;
        let dim = first.dim();
        let mut seen = BTreeSet::new();
        let mut radius: i64 = 0;
        for offset in &offsets {
            check_dim(dim, offset.dim())?;
            if !seen.insert(offset.clone()) {
                return Err(Error::Unsupported(format!(
                    "duplicate neighborhood offset {offset}"
                )));
            }
            radius = radius.max(offset.norm());
        }
        Ok(Neighborhood {
            offsets,
            radius: radius as u32,
        })
    }

    /// The full max-norm ball of the given radius, in sorted order.
    pub fn ball(radius: u32, dim: usize) -> Result<Neighborhood> {
        let origin = CellSet::from_cells(dim, [CellVector::zero(dim)])?;
        let cells = ball_enumerate(radius, &origin)?;
        Neighborhood::new(cells.iter().cloned().collect())
    }

    pub fn dim(&self) -> usize {
        self.offsets[0].dim()
    }

    /// Number of offsets, which is also the arity of a table rule.
    pub fn arity(&self) -> usize {
        self.offsets.len()
    }

    pub fn offsets(&self) -> impl Iterator<Item = &CellVector> {
        self.offsets.iter()
    }

    /// Max norm over the offsets, the interaction radius `r`.
    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn cell_set(&self) -> Result<CellSet> {
        CellSet::from_cells(self.dim(), self.offsets.iter().cloned())
    }
}

impl fmt::Display for Neighborhood {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, offset) in self.offsets.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{offset}")?;
        }
        Ok(())
    }
}

/// Named rules with hand-written evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinRule {
    /// `f(x)_v = x_{v + e_0}`: contents flow toward negative axis 0.
    ShiftLeft,
    /// Binary rule `f(x)_v = x_v ⊕ x_{v+1}` in one dimension.
    XorPair,
    /// Pointwise decrement toward 0 over the alphabet {0,1,2}.
    Countdown,
    /// The standard two-dimensional birth-3, survival-2-or-3 rule.
    GameOfLife,
    /// One-dimensional particle rule over {0,1,2}: symbol 2 walks right,
    /// symbol 1 walks left, and meeting or crossing particles annihilate.
    LrAnnihilation,
}

impl BuiltinRule {
    pub fn name(&self) -> &'static str {
        match self {
            BuiltinRule::ShiftLeft => "shift-left",
            BuiltinRule::XorPair => "xor-pair",
            BuiltinRule::Countdown => "countdown",
            BuiltinRule::GameOfLife => "game-of-life",
            BuiltinRule::LrAnnihilation => "lr-annihilation",
        }
    }

    pub fn from_name(name: &str) -> Option<BuiltinRule> {
        match name {
            "shift-left" => Some(BuiltinRule::ShiftLeft),
            "xor-pair" => Some(BuiltinRule::XorPair),
            "countdown" => Some(BuiltinRule::Countdown),
            "game-of-life" => Some(BuiltinRule::GameOfLife),
            "lr-annihilation" => Some(BuiltinRule::LrAnnihilation),
            _ => None,
        }
    }
}

/// A local rule in one of four representations. Tables and builtins are
/// self-contained; powers and folded rules delegate to a base automaton.
#[derive(Debug, Clone)]
pub enum LocalRule {
    /// Total mapping from neighborhood tuples to symbols. The entry for a
    /// tuple `(s_0, …, s_{k-1})` (in neighborhood order) lives at index
    /// `Σ s_i · |S|^i`.
    Table(Vec<Symbol>),
    Builtin(BuiltinRule),
    /// `exponent`-fold composition of `base`, evaluated through the
    /// dependence cone on demand.
    Power {
        base: Arc<CellularAutomaton>,
        exponent: u32,
    },
    /// Rule of the quotient automaton obtained by folding `axis` with the
    /// given period into the alphabet. Folded symbols are positional codes:
    /// column cell `i` contributes `value · |S|^i`, so the all-0 column is
    /// folded symbol 0.
    Folded {
        base: Arc<CellularAutomaton>,
        axis: usize,
        period: i64,
    },
}

/// A cellular automaton: dimension, alphabet, neighborhood, local rule.
#[derive(Debug, Clone)]
pub struct CellularAutomaton {
    dim: usize,
    alphabet: Alphabet,
    neighborhood: Neighborhood,
    rule: LocalRule,
}

/// The first `horizon` symbols a cell emits, with the nonzero times and a
/// truncation flag: the report is marked truncated when the final symbol is
/// nonzero or any nonzero time falls in the last quarter of the horizon,
/// since then the horizon plainly cuts the activity off.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceReport {
    pub cell: CellVector,
    pub horizon: usize,
    pub word: Vec<Symbol>,
    pub support: Vec<usize>,
    pub truncated: bool,
}

impl TraceReport {
    fn from_word(cell: CellVector, word: Vec<Symbol>) -> TraceReport {
        let horizon = word.len();
        let support: Vec<usize> = word
            .iter()
            .enumerate()
            .filter(|(_, &s)| s != 0)
            .map(|(n, _)| n)
            .collect();
        let tail_start = horizon - horizon / 4;
        let truncated = word.last().map_or(false, |&s| s != 0)
            || support.iter().any(|&n| n >= tail_start);
        TraceReport {
            cell,
            horizon,
            word,
            support,
            truncated,
        }
    }
}

fn table_size(alphabet: Alphabet, arity: usize) -> Result<usize> {
    let mut size: u64 = 1;
    for _ in 0..arity {
        size = size.saturating_mul(alphabet.size() as u64);
        if size > TABLE_GUARD {
            return Err(Error::GuardExceeded {
                what: "rule table size",
                needed: size as u128,
                guard: TABLE_GUARD as u128,
            });
        }
    }
    Ok(size as usize)
}

/// The alphabet `S^p` of a folded automaton, encoded as `0..|S|^p`.
fn folded_alphabet(base: Alphabet, period: i64) -> Result<Alphabet> {
    if base.size() == 1 {
        return Alphabet::new(1);
    }
    let mut size: u128 = 1;
    for _ in 0..period.min(33) {
        size *= base.size() as u128;
        if size > u32::MAX as u128 {
            return Err(Error::GuardExceeded {
                what: "folded alphabet size",
                needed: size,
                guard: u32::MAX as u128,
            });
        }
    }
    Alphabet::new(size as u32)
}

/// Digit `position` of a positional code over the given base.
fn symbol_digit(value: Symbol, position: u32, base: u32) -> Symbol {
    ((value as u64 / (base as u64).pow(position)) % base as u64) as Symbol
}

/// Memoized evaluation of `steps` rule applications at `cell`, reading input
/// symbols through `lookup`. Cells are interpreted in whatever frame the
/// lookup uses (absolute for configurations, relative for rule powers).
fn cone_rec(
    automaton: &CellularAutomaton,
    lookup: &dyn Fn(&CellVector) -> Result<Symbol>,
    memo: &RefCell<HashMap<(CellVector, u32), Symbol>>,
    cell: &CellVector,
    steps: u32,
) -> Result<Symbol> {
    if steps == 0 {
        return lookup(cell);
    }
    let key = (cell.clone(), steps);
    if let Some(&known) = memo.borrow().get(&key) {
        return Ok(known);
    }
    let value = automaton.apply_local(&|offset: &CellVector| {
        cone_rec(automaton, lookup, memo, &cell.add(offset)?, steps - 1)
    })?;
    memo.borrow_mut().insert(key, value);
    Ok(value)
}

impl CellularAutomaton {
    /// Builds a table automaton. The table must be total (`|S|^|V|` entries
    /// in little-endian tuple order) with outputs inside the alphabet.
    pub fn from_table(
        dim: usize,
        alphabet: Alphabet,
        neighborhood: Neighborhood,
        table: Vec<Symbol>,
    ) -> Result<CellularAutomaton> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        check_dim(dim, neighborhood.dim())?;
        let expected = table_size(alphabet, neighborhood.arity())?;
        if table.len() != expected {
            return Err(Error::Unsupported(format!(
                "rule table has {} entries, a total table needs {expected}",
                table.len()
            )));
        }
        for &symbol in &table {
            alphabet.check(symbol)?;
        }
        Ok(CellularAutomaton {
            dim,
            alphabet,
            neighborhood,
            rule: LocalRule::Table(table),
        })
    }

    /// Builds a table automaton by evaluating `f` on every neighborhood
    /// tuple (symbols passed in neighborhood order).
    pub fn from_fn<F>(
        dim: usize,
        alphabet: Alphabet,
        neighborhood: Neighborhood,
        f: F,
    ) -> Result<CellularAutomaton>
    where
        F: Fn(&[Symbol]) -> Symbol,
    {
        let entries = table_size(alphabet, neighborhood.arity())?;
        let mut tuple = vec![0u32; neighborhood.arity()];
        let mut table = Vec::with_capacity(entries);
        for index in 0..entries {
            let mut rest = index as u64;
            for digit in tuple.iter_mut() {
                *digit = (rest % alphabet.size() as u64) as Symbol;
                rest /= alphabet.size() as u64;
            }
            table.push(f(&tuple));
        }
        CellularAutomaton::from_table(dim, alphabet, neighborhood, table)
    }

    /// Builds a named builtin rule, checking that the requested dimension
    /// and alphabet fit it.
    pub fn builtin(
        rule: BuiltinRule,
        dim: usize,
        alphabet: Alphabet,
    ) -> Result<CellularAutomaton> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let expect_dim = |want: usize| -> Result<()> { check_dim(want, dim) };
        let expect_alphabet =
            |want: u32| -> Result<()> { check_alphabet(Alphabet::new(want)?, alphabet) };
        let neighborhood = match rule {
            BuiltinRule::ShiftLeft => Neighborhood::new(vec![CellVector::unit(dim, 0)?])?,
            BuiltinRule::XorPair => {
                expect_dim(1)?;
                expect_alphabet(2)?;
                Neighborhood::new(vec![CellVector::zero(1), CellVector::unit(1, 0)?])?
            }
            BuiltinRule::Countdown => {
                expect_alphabet(3)?;
                Neighborhood::new(vec![CellVector::zero(dim)])?
            }
            BuiltinRule::GameOfLife => {
                expect_dim(2)?;
                expect_alphabet(2)?;
                Neighborhood::ball(1, 2)?
            }
            BuiltinRule::LrAnnihilation => {
                expect_dim(1)?;
                expect_alphabet(3)?;
                Neighborhood::new(vec![
                    CellVector::new(vec![-1])?,
                    CellVector::zero(1),
                    CellVector::unit(1, 0)?,
                ])?
            }
        };
        Ok(CellularAutomaton {
            dim,
            alphabet,
            neighborhood,
            rule: LocalRule::Builtin(rule),
        })
    }

    pub fn shift_left(dim: usize, alphabet: Alphabet) -> Result<CellularAutomaton> {
        CellularAutomaton::builtin(BuiltinRule::ShiftLeft, dim, alphabet)
    }

    pub fn xor_pair() -> Result<CellularAutomaton> {
        CellularAutomaton::builtin(BuiltinRule::XorPair, 1, Alphabet::new(2)?)
    }

    pub fn countdown(dim: usize) -> Result<CellularAutomaton> {
        CellularAutomaton::builtin(BuiltinRule::Countdown, dim, Alphabet::new(3)?)
    }

    pub fn game_of_life() -> Result<CellularAutomaton> {
        CellularAutomaton::builtin(BuiltinRule::GameOfLife, 2, Alphabet::new(2)?)
    }

    pub fn lr_annihilation() -> Result<CellularAutomaton> {
        CellularAutomaton::builtin(BuiltinRule::LrAnnihilation, 1, Alphabet::new(3)?)
    }

    /// A uniformly random total table over the full radius ball, with the
    /// all-0 tuple pinned to 0 so the background is stable.
    pub fn random_table<R: Rng>(
        dim: usize,
        alphabet: Alphabet,
        radius: u32,
        rng: &mut R,
    ) -> Result<CellularAutomaton> {
        let neighborhood = Neighborhood::ball(radius, dim)?;
        let entries = table_size(alphabet, neighborhood.arity())?;
        let mut table: Vec<Symbol> =
            (0..entries).map(|_| rng.gen_range(0..alphabet.size())).collect();
        table[0] = 0;
        CellularAutomaton::from_table(dim, alphabet, neighborhood, table)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn neighborhood(&self) -> &Neighborhood {
        &self.neighborhood
    }

    pub fn rule(&self) -> &LocalRule {
        &self.rule
    }

    pub fn radius(&self) -> u32 {
        self.neighborhood.radius()
    }

    /// Applies the local rule once, reading the needed symbols through
    /// `lookup` (offsets are relative to the cell being computed).
    pub fn apply_local(
        &self,
        lookup: &dyn Fn(&CellVector) -> Result<Symbol>,
    ) -> Result<Symbol> {
        match &self.rule {
            LocalRule::Table(table) => {
                let size = self.alphabet.size() as u64;
                let mut index: u64 = 0;
                let mut scale: u64 = 1;
                for offset in self.neighborhood.offsets() {
                    let digit = lookup(offset)?;
                    self.alphabet.check(digit)?;
                    index += digit as u64 * scale;
                    scale *= size;
                }
                Ok(table[index as usize])
            }
            LocalRule::Builtin(builtin) => self.apply_builtin(*builtin, lookup),
            LocalRule::Power { base, exponent } => {
                let memo = RefCell::new(HashMap::new());
                cone_rec(base, lookup, &memo, &CellVector::zero(base.dim()), *exponent)
            }
            LocalRule::Folded { base, axis, period } => {
                let base_size = base.alphabet().size();
                let mut value: u64 = 0;
                for i in 0..*period {
                    let column_lookup = |offset: &CellVector| -> Result<Symbol> {
                        let position = (i + offset.coord(*axis)).rem_euclid(*period);
                        let folded_offset = offset.remove_coord(*axis)?;
                        let folded_symbol = lookup(&folded_offset)?;
                        Ok(symbol_digit(folded_symbol, position as u32, base_size))
                    };
                    let digit = base.apply_local(&column_lookup)?;
                    value += digit as u64 * (base_size as u64).pow(i as u32);
                }
                Ok(value as Symbol)
            }
        }
    }

    fn apply_builtin(
        &self,
        builtin: BuiltinRule,
        lookup: &dyn Fn(&CellVector) -> Result<Symbol>,
    ) -> Result<Symbol> {
        match builtin {
            BuiltinRule::ShiftLeft => lookup(&CellVector::unit(self.dim, 0)?),
            BuiltinRule::XorPair => {
                let here = lookup(&CellVector::zero(1))?;
                let next = lookup(&CellVector::unit(1, 0)?)?;
                Ok(here ^ next)
            }
            BuiltinRule::Countdown => Ok(lookup(&CellVector::zero(self.dim))?.saturating_sub(1)),
            BuiltinRule::GameOfLife => {
                let center = lookup(&CellVector::zero(2))?;
                let mut live = 0;
                for dx in -1..=1i64 {
                    for dy in -1..=1i64 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        live += lookup(&CellVector::new(vec![dx, dy])?)?;
                    }
                }
                Ok(u32::from(live == 3 || (center == 1 && live == 2)))
            }
            BuiltinRule::LrAnnihilation => {
                let left = lookup(&CellVector::new(vec![-1])?)?;
                let here = lookup(&CellVector::zero(1))?;
                let right = lookup(&CellVector::unit(1, 0)?)?;
                // A left-mover arrives from the right unless a right-mover is
                // on or just behind this cell; symmetrically for right-movers.
                // Meeting or crossing particles therefore cancel.
                if right == LEFT_PARTICLE && here != RIGHT_PARTICLE && left != RIGHT_PARTICLE {
                    Ok(LEFT_PARTICLE)
                } else if left == RIGHT_PARTICLE
                    && here != LEFT_PARTICLE
                    && right != LEFT_PARTICLE
                {
                    Ok(RIGHT_PARTICLE)
                } else {
                    Ok(0)
                }
            }
        }
    }

    /// The symbols `s` whose uniform configuration is a fixed point.
    pub fn quiescent_symbols(&self) -> Result<Vec<Symbol>> {
        let mut out = Vec::new();
        for s in self.alphabet.symbols() {
            if self.apply_local(&|_: &CellVector| Ok(s))? == s {
                out.push(s);
            }
        }
        Ok(out)
    }

    /// Whether the all-0 configuration is a fixed point, the precondition
    /// for stepping configurations with a 0 background.
    pub fn is_zero_quiescent(&self) -> Result<bool> {
        Ok(self.apply_local(&|_: &CellVector| Ok(0))? == 0)
    }

    fn require_zero_quiescent(&self) -> Result<()> {
        if self.is_zero_quiescent()? {
            Ok(())
        } else {
            Err(Error::BackgroundUnstable)
        }
    }

    /// One global step of a finite-support configuration. The new support is
    /// contained in the radius ball around the old one.
    pub fn step_finite(&self, x: &FiniteConfig) -> Result<FiniteConfig> {
        check_dim(self.dim, x.dim())?;
        check_alphabet(self.alphabet, x.alphabet())?;
        self.require_zero_quiescent()?;
        let mut candidates = BTreeSet::new();
        for (cell, _) in x.cells() {
            for offset in self.neighborhood.offsets() {
                candidates.insert(cell.sub(offset)?);
            }
        }
        let mut out = FiniteConfig::new(self.dim, self.alphabet)?;
        for cell in candidates {
            let value = self.apply_local(&|offset: &CellVector| x.get(&cell.add(offset)?))?;
            out.set(cell, value)?;
        }
        Ok(out)
    }

    /// One global step of a tube, computed on the quotient slab with the
    /// periodic axis wrapping. Periodicity is preserved for every period,
    /// including periods smaller than the rule diameter.
    pub fn step_tube(&self, x: &TubeConfig) -> Result<TubeConfig> {
        check_dim(self.dim, x.dim())?;
        check_alphabet(self.alphabet, x.alphabet())?;
        self.require_zero_quiescent()?;
        let axis = x.axis();
        let period = x.period();
        let mut candidates = BTreeSet::new();
        for (cell, _) in x.quotient_cells() {
            for offset in self.neighborhood.offsets() {
                let moved = cell.sub(offset)?;
                candidates.insert(moved.with_coord(axis, moved.coord(axis).rem_euclid(period))?);
            }
        }
        let mut out = TubeConfig::new(self.dim, self.alphabet, axis, period)?;
        for cell in candidates {
            let value = self.apply_local(&|offset: &CellVector| x.get(&cell.add(offset)?))?;
            out.set(cell, value)?;
        }
        Ok(out)
    }

    /// One global step of a torus; every axis wraps, so no quiescence is
    /// required.
    pub fn step_torus(&self, x: &TorusConfig) -> Result<TorusConfig> {
        check_dim(self.dim, x.dim())?;
        check_alphabet(self.alphabet, x.alphabet())?;
        let mut out = x.clone();
        for cell in x.domain() {
            let value = self.apply_local(&|offset: &CellVector| x.get(&cell.add(offset)?))?;
            out.set(&cell, value)?;
        }
        Ok(out)
    }

    /// One global step. Overlays are flattened first when their parts permit
    /// it; a genuinely mixed overlay cannot be stepped as a whole and should
    /// be evaluated pointwise with [`CellularAutomaton::cone_eval`].
    pub fn step(&self, x: &Config) -> Result<Config> {
        match x {
            Config::Finite(c) => Ok(Config::Finite(self.step_finite(c)?)),
            Config::Tube(c) => Ok(Config::Tube(self.step_tube(c)?)),
            Config::Torus(c) => Ok(Config::Torus(self.step_torus(c)?)),
            Config::Overlay(o) => {
                check_dim(self.dim, o.dim())?;
                check_alphabet(self.alphabet, o.alphabet())?;
                self.step(&config::flatten_overlay(o)?)
            }
        }
    }

    /// The symbol of the `steps`-fold image at `cell`, computed through the
    /// dependence cone without building any intermediate configuration. This
    /// works for every configuration kind, overlays included, and agrees
    /// with iterated stepping wherever stepping is defined.
    pub fn cone_eval(&self, x: &Config, cell: &CellVector, steps: u32) -> Result<Symbol> {
        check_dim(self.dim, x.dim())?;
        check_alphabet(self.alphabet, x.alphabet())?;
        check_dim(self.dim, cell.dim())?;
        let memo = RefCell::new(HashMap::new());
        cone_rec(self, &|c: &CellVector| x.get(c), &memo, cell, steps)
    }

    /// The first `horizon` symbols the cell emits under iteration. Steppable
    /// configurations are advanced globally; mixed overlays fall back to
    /// cone evaluation with a memo shared across the whole word.
    pub fn trace(&self, x: &Config, cell: &CellVector, horizon: usize) -> Result<TraceReport> {
        if horizon == 0 {
            return Err(Error::Unsupported("a trace needs a horizon of at least 1".into()));
        }
        check_dim(self.dim, cell.dim())?;
        match self.trace_by_stepping(x, cell, horizon) {
            Err(Error::UnsteppableOverlay) => self.trace_by_cone(x, cell, horizon),
            other => other,
        }
    }

    fn trace_by_stepping(
        &self,
        x: &Config,
        cell: &CellVector,
        horizon: usize,
    ) -> Result<TraceReport> {
        let mut current = x.clone();
        let mut word = Vec::with_capacity(horizon);
        for n in 0..horizon {
            word.push(current.get(cell)?);
            if n + 1 < horizon {
                current = self.step(&current)?;
            }
        }
        Ok(TraceReport::from_word(cell.clone(), word))
    }

    fn trace_by_cone(&self, x: &Config, cell: &CellVector, horizon: usize) -> Result<TraceReport> {
        check_dim(self.dim, x.dim())?;
        check_alphabet(self.alphabet, x.alphabet())?;
        let memo = RefCell::new(HashMap::new());
        let lookup = |c: &CellVector| x.get(c);
        let mut word = Vec::with_capacity(horizon);
        for n in 0..horizon {
            word.push(cone_rec(self, &lookup, &memo, cell, n as u32)?);
        }
        Ok(TraceReport::from_word(cell.clone(), word))
    }

    /// The `exponent`-fold composition as an automaton in its own right,
    /// with neighborhood `B_{r·exponent}(0)`. The composed rule is never
    /// tabulated; it is evaluated through the dependence cone on demand.
    pub fn power(&self, exponent: u32) -> Result<CellularAutomaton> {
        if exponent == 0 {
            return Err(Error::Unsupported("a rule power needs an exponent of at least 1".into()));
        }
        if exponent == 1 {
            return Ok(self.clone());
        }
        if let LocalRule::Power { base, exponent: inner } = &self.rule {
            return base.power(inner.saturating_mul(exponent));
        }
        let radius = self.radius() as u128 * exponent as u128;
        let cells = (2 * radius + 1).pow(self.dim as u32);
        if cells > POWER_NEIGHBORHOOD_GUARD {
            return Err(Error::GuardExceeded {
                what: "power neighborhood size",
                needed: cells,
                guard: POWER_NEIGHBORHOOD_GUARD,
            });
        }
        let neighborhood = Neighborhood::ball(radius as u32, self.dim)?;
        Ok(CellularAutomaton {
            dim: self.dim,
            alphabet: self.alphabet,
            neighborhood,
            rule: LocalRule::Power {
                base: Arc::new(self.clone()),
                exponent,
            },
        })
    }

    /// The quotient automaton on configurations periodic along `axis` with
    /// the given period: one dimension lower, alphabet `S^period`, acting on
    /// folded configurations exactly as this automaton acts on tubes. The
    /// folded neighborhood is the projection of the radius ball onto the
    /// remaining axes.
    pub fn reduce_dimension(&self, axis: usize, period: i64) -> Result<CellularAutomaton> {
        if self.dim < 2 {
            return Err(Error::Unsupported(
                "dimension reduction needs at least two dimensions".into(),
            ));
        }
        check_axis(axis, self.dim)?;
        if period < 1 {
            return Err(Error::NonPositivePeriod { period });
        }
        let alphabet = folded_alphabet(self.alphabet, period)?;
        let neighborhood = Neighborhood::ball(self.radius(), self.dim - 1)?;
        Ok(CellularAutomaton {
            dim: self.dim - 1,
            alphabet,
            neighborhood,
            rule: LocalRule::Folded {
                base: Arc::new(self.clone()),
                axis,
                period,
            },
        })
    }
}

/// Folds a tube into a finite configuration one dimension lower, encoding
/// each period-long column along the tube axis as one symbol of `S^p` (cell
/// `i` of the column contributes `value · |S|^i`).
pub fn fold(x: &TubeConfig) -> Result<FiniteConfig> {
    if x.dim() < 2 {
        return Err(Error::Unsupported(
            "folding a one-dimensional tube leaves no axes".into(),
        ));
    }
    let axis = x.axis();
    let period = x.period();
    let base_size = x.alphabet().size();
    let alphabet = folded_alphabet(x.alphabet(), period)?;
    let mut columns = BTreeSet::new();
    for (cell, _) in x.quotient_cells() {
        columns.insert(cell.remove_coord(axis)?);
    }
    let mut out = FiniteConfig::new(x.dim() - 1, alphabet)?;
    for column in columns {
        let mut value: u64 = 0;
        for i in 0..period {
            let symbol = x.get(&column.insert_coord(axis, i)?)?;
            value += symbol as u64 * (base_size as u64).pow(i as u32);
        }
        out.set(column, value as Symbol)?;
    }
    Ok(out)
}

/// Inverse of [`fold`]: expands each positional-code symbol back into a
/// column of the tube.
pub fn unfold(
    x: &FiniteConfig,
    axis: usize,
    period: i64,
    base: Alphabet,
) -> Result<TubeConfig> {
    let folded = folded_alphabet(base, period)?;
    check_alphabet(folded, x.alphabet())?;
    let dim = x.dim() + 1;
    check_axis(axis, dim)?;
    let mut out = TubeConfig::new(dim, base, axis, period)?;
    for (column, value) in x.cells() {
        for i in 0..period {
            let digit = symbol_digit(value, i as u32, base.size());
            if digit != 0 {
                out.set(column.insert_coord(axis, i)?, digit)?;
            }
        }
    }
    Ok(out)
}

const RULE_HEADER: &str = "%CA-RULE v1";

/// Parses the `%CA-RULE v1` text format.
pub fn parse_rule(text: &str) -> Result<CellularAutomaton> {
    let mut scanner = Scanner::new(text);
    scanner.expect_header(RULE_HEADER)?;
    let mut dim: Option<usize> = None;
    let mut alphabet: Option<u32> = None;
    let mut neighborhood: Option<(usize, Vec<CellVector>)> = None;
    let mut kind: Option<(usize, String)> = None;
    let mut name: Option<(usize, String)> = None;
    let mut map_lines: Vec<(usize, String)> = Vec::new();
    let mut in_map = false;

    while let Some((line_no, line)) = scanner.next_nonblank() {
        if in_map {
            map_lines.push((line_no, line.to_string()));
            continue;
        }
        let (key, value) = textio::key_value(line)
            .ok_or_else(|| Error::parse(line_no, format!("expected `key: value`, found `{line}`")))?;
        match key {
            "dim" => dim = Some(textio::parse_usize(line_no, value)?),
            "alphabet" => alphabet = Some(textio::parse_u32(line_no, value)?),
            "neighborhood" => {
                let mut offsets = Vec::new();
                for part in textio::split_outside_parens(value) {
                    let vector: CellVector = part
                        .parse()
                        .map_err(|e| textio::at_line(e, line_no))?;
                    offsets.push(vector);
                }
                neighborhood = Some((line_no, offsets));
            }
            "kind" => kind = Some((line_no, value.to_string())),
            "name" => name = Some((line_no, value.to_string())),
            "map" => in_map = true,
            other => return Err(Error::parse(line_no, format!("unknown key `{other}`"))),
        }
    }

    let end = scanner.last_line();
    let dim = dim.ok_or_else(|| Error::parse(end, "missing `dim`"))?;
    let alphabet = Alphabet::new(alphabet.ok_or_else(|| Error::parse(end, "missing `alphabet`"))?)?;
    let (kind_line, kind) = kind.ok_or_else(|| Error::parse(end, "missing `kind`"))?;

    match kind.as_str() {
        "table" => {
            let (nb_line, offsets) =
                neighborhood.ok_or_else(|| Error::parse(end, "table rule missing `neighborhood`"))?;
            let neighborhood = Neighborhood::new(offsets)
                .map_err(|e| Error::parse(nb_line, format!("bad neighborhood: {e}")))?;
            if neighborhood.dim() != dim {
                return Err(Error::parse(
                    nb_line,
                    format!("neighborhood dimension {} does not match dim {dim}", neighborhood.dim()),
                ));
            }
            let entries = table_size(alphabet, neighborhood.arity())?;
            let mut table: Vec<Option<Symbol>> = vec![None; entries];
            for (line_no, line) in &map_lines {
                let (tuple_text, value_text) = line.split_once('=').ok_or_else(|| {
                    Error::parse(*line_no, format!("expected `s0,s1,...=out`, found `{line}`"))
                })?;
                let digits: Vec<Symbol> = tuple_text
                    .split(',')
                    .map(|d| textio::parse_u32(*line_no, d.trim()))
                    .collect::<Result<_>>()?;
                if digits.len() != neighborhood.arity() {
                    return Err(Error::parse(
                        *line_no,
                        format!(
                            "tuple has {} symbols, neighborhood has {}",
                            digits.len(),
                            neighborhood.arity()
                        ),
                    ));
                }
                let mut index: u64 = 0;
                let mut scale: u64 = 1;
                for &digit in &digits {
                    if digit >= alphabet.size() {
                        return Err(Error::parse(*line_no, format!("symbol {digit} out of range")));
                    }
                    index += digit as u64 * scale;
                    scale *= alphabet.size() as u64;
                }
                let out = textio::parse_u32(*line_no, value_text.trim())?;
                if out >= alphabet.size() {
                    return Err(Error::parse(*line_no, format!("output {out} out of range")));
                }
                let slot = &mut table[index as usize];
                if slot.is_some() {
                    return Err(Error::parse(*line_no, format!("duplicate map entry `{tuple_text}`")));
                }
                *slot = Some(out);
            }
            if let Some(missing) = table.iter().position(|e| e.is_none()) {
                let mut rest = missing as u64;
                let mut tuple = Vec::new();
                for _ in 0..neighborhood.arity() {
                    tuple.push((rest % alphabet.size() as u64).to_string());
                    rest /= alphabet.size() as u64;
                }
                return Err(Error::parse(
                    end,
                    format!("map is not total: missing entry for `{}`", tuple.join(",")),
                ));
            }
            let table: Vec<Symbol> = table.into_iter().map(|e| e.expect("checked")).collect();
            CellularAutomaton::from_table(dim, alphabet, neighborhood, table)
        }
        "builtin" => {
            let (name_line, name) =
                name.ok_or_else(|| Error::parse(end, "builtin rule missing `name`"))?;
            let builtin = BuiltinRule::from_name(&name)
                .ok_or_else(|| Error::parse(name_line, format!("unknown builtin `{name}`")))?;
            let automaton = CellularAutomaton::builtin(builtin, dim, alphabet)
                .map_err(|e| Error::parse(name_line, format!("builtin `{name}`: {e}")))?;
            if let Some((nb_line, offsets)) = neighborhood {
                let given = Neighborhood::new(offsets)
                    .map_err(|e| Error::parse(nb_line, format!("bad neighborhood: {e}")))?;
                if given.cell_set()? != automaton.neighborhood().cell_set()? {
                    return Err(Error::parse(
                        nb_line,
                        format!("builtin `{name}` has neighborhood {}", automaton.neighborhood()),
                    ));
                }
            }
            Ok(automaton)
        }
        other => Err(Error::parse(kind_line, format!("unknown kind `{other}`"))),
    }
}

/// Writes the canonical `%CA-RULE v1` text for a table or builtin rule.
/// Derived rules (powers, folded rules) have no standalone text form.
pub fn write_rule(automaton: &CellularAutomaton) -> Result<String> {
    use fmt::Write;
    let mut out = String::new();
    writeln!(out, "{RULE_HEADER}").expect("string write");
    writeln!(out, "dim: {}", automaton.dim()).expect("string write");
    writeln!(out, "alphabet: {}", automaton.alphabet().size()).expect("string write");
    writeln!(out, "neighborhood: {}", automaton.neighborhood()).expect("string write");
    match automaton.rule() {
        LocalRule::Table(table) => {
            writeln!(out, "kind: table").expect("string write");
            writeln!(out, "map:").expect("string write");
            let size = automaton.alphabet().size() as u64;
            let arity = automaton.neighborhood().arity();
            let mut tuple = vec![0u64; arity];
            loop {
                let mut index: u64 = 0;
                let mut scale: u64 = 1;
                for &digit in &tuple {
                    index += digit * scale;
                    scale *= size;
                }
                let printed: Vec<String> = tuple.iter().map(|d| d.to_string()).collect();
                writeln!(out, "{}={}", printed.join(","), table[index as usize])
                    .expect("string write");
                // Advance the tuple in lexicographic order (last slot fastest).
                let mut slot = arity;
                loop {
                    if slot == 0 {
                        return Ok(out);
                    }
                    slot -= 1;
                    tuple[slot] += 1;
                    if tuple[slot] < size {
                        break;
                    }
                    tuple[slot] = 0;
                }
            }
        }
        LocalRule::Builtin(builtin) => {
            writeln!(out, "kind: builtin").expect("string write");
            writeln!(out, "name: {}", builtin.name()).expect("string write");
            Ok(out)
        }
        LocalRule::Power { .. } | LocalRule::Folded { .. } => Err(Error::Unsupported(
            "derived rules have no text form; write the base rule".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(coords: &[i64]) -> CellVector {
        CellVector::new(coords.to_vec()).unwrap()
    }

    fn alpha(n: u32) -> Alphabet {
        Alphabet::new(n).unwrap()
    }

    fn finite(dim: usize, size: u32, cells: &[(&[i64], Symbol)]) -> FiniteConfig {
        FiniteConfig::from_cells(dim, alpha(size), cells.iter().map(|(c, s)| (v(c), *s))).unwrap()
    }

    fn identity(dim: usize, size: u32) -> CellularAutomaton {
        let neighborhood = Neighborhood::new(vec![CellVector::zero(dim)]).unwrap();
        CellularAutomaton::from_table(dim, alpha(size), neighborhood, (0..size).collect()).unwrap()
    }

    fn glider() -> FiniteConfig {
        finite(
            2,
            2,
            &[(&[6, 7], 1), (&[5, 6], 1), (&[5, 5], 1), (&[6, 5], 1), (&[7, 5], 1)],
        )
    }

    #[test]
    fn quiescent_symbols_of_builtins_and_identity() {
        assert_eq!(CellularAutomaton::game_of_life().unwrap().quiescent_symbols().unwrap(), vec![0]);
        assert_eq!(CellularAutomaton::countdown(1).unwrap().quiescent_symbols().unwrap(), vec![0]);
        // Uniform particle seas flow into themselves, so both particle
        // symbols are quiescent alongside the background.
        assert_eq!(
            CellularAutomaton::lr_annihilation().unwrap().quiescent_symbols().unwrap(),
            vec![0, 1, 2]
        );
        assert_eq!(identity(2, 3).quiescent_symbols().unwrap(), vec![0, 1, 2]);
        assert!(CellularAutomaton::shift_left(1, alpha(4)).unwrap().is_zero_quiescent().unwrap());
    }

    #[test]
    fn step_decrements_countdown_and_shifts_particles() {
        let countdown = CellularAutomaton::countdown(2).unwrap();
        let x = finite(2, 3, &[(&[0, 0], 2)]);
        let stepped = countdown.step_finite(&x).unwrap();
        assert_eq!(stepped, finite(2, 3, &[(&[0, 0], 1)]));

        let shift = CellularAutomaton::shift_left(1, alpha(2)).unwrap();
        let x = finite(1, 2, &[(&[3], 1)]);
        assert_eq!(shift.step_finite(&x).unwrap(), finite(1, 2, &[(&[2], 1)]));
    }

    #[test]
    fn glider_translates_diagonally_every_four_steps() {
        let life = CellularAutomaton::game_of_life().unwrap();
        let mut current = glider();
        for _ in 0..4 {
            current = life.step_finite(&current).unwrap();
        }
        assert_eq!(current.support_len(), 5);
        let expected = glider().shift(&v(&[1, 1])).unwrap();
        assert_eq!(current, expected, "one diagonal hop toward the origin per period");

        for _ in 0..4 {
            current = life.step_finite(&current).unwrap();
        }
        assert_eq!(current, glider().shift(&v(&[2, 2])).unwrap());
    }

    #[test]
    fn step_rejects_unstable_background_on_finite_input() {
        let neighborhood = Neighborhood::new(vec![CellVector::zero(1)]).unwrap();
        let hot = CellularAutomaton::from_table(1, alpha(2), neighborhood, vec![1, 1]).unwrap();
        let x = finite(1, 2, &[(&[0], 1)]);
        assert!(matches!(hot.step_finite(&x), Err(Error::BackgroundUnstable)));
        let tube = x.periodize(0, 4).unwrap();
        assert!(matches!(hot.step_tube(&tube), Err(Error::BackgroundUnstable)));
        // A torus has no background, so the same rule steps fine there.
        let torus = TorusConfig::from_cells(alpha(2), vec![3], [(v(&[0]), 1)]).unwrap();
        let next = hot.step_torus(&torus).unwrap();
        assert!(next.raw_cells().iter().all(|&s| s == 1));
    }

    #[test]
    fn tube_step_matches_torus_step_in_one_dimension() {
        let xor = CellularAutomaton::xor_pair().unwrap();
        let mut tube = TubeConfig::from_cells(1, alpha(2), 0, 3, [(v(&[0]), 1)]).unwrap();
        let mut torus = TorusConfig::from_cells(alpha(2), vec![3], [(v(&[0]), 1)]).unwrap();
        for _ in 0..6 {
            tube = xor.step_tube(&tube).unwrap();
            torus = xor.step_torus(&torus).unwrap();
            for x in 0..3i64 {
                assert_eq!(tube.get(&v(&[x])).unwrap(), torus.get(&v(&[x])).unwrap());
            }
        }
    }

    #[test]
    fn xor_orbit_on_period_three_ring() {
        let xor = CellularAutomaton::xor_pair().unwrap();
        let mut ring = TorusConfig::new(alpha(2), vec![3], vec![1, 0, 0]).unwrap();
        let expected = [
            vec![1, 0, 1],
            vec![1, 1, 0],
            vec![0, 1, 1],
            vec![1, 0, 1],
        ];
        for want in expected {
            ring = xor.step_torus(&ring).unwrap();
            assert_eq!(ring.raw_cells(), want.as_slice());
        }
    }

    #[test]
    fn narrow_tube_wraps_neighborhood_reads() {
        // A vertical period of 1 makes every column uniform; each cell then
        // sees its own column three times and each side column three times.
        let life = CellularAutomaton::game_of_life().unwrap();
        let crowded =
            TubeConfig::from_cells(2, alpha(2), 1, 1, [(v(&[-1, 0]), 1), (v(&[0, 0]), 1)]).unwrap();
        let next = life.step_tube(&crowded).unwrap();
        // Live column with one live side column: 3 + 2 = 5 live neighbors.
        assert_eq!(next.get(&v(&[0, 0])).unwrap(), 0);
        let flanked =
            TubeConfig::from_cells(2, alpha(2), 1, 1, [(v(&[-1, 0]), 1), (v(&[1, 0]), 1)]).unwrap();
        let next = life.step_tube(&flanked).unwrap();
        // Dead column with two live side columns: 6 live neighbors, no birth.
        assert_eq!(next.get(&v(&[0, 0])).unwrap(), 0);
    }

    #[test]
    fn cone_eval_equals_iterated_stepping() {
        let shift = CellularAutomaton::shift_left(1, alpha(2)).unwrap();
        let x = Config::Finite(finite(1, 2, &[(&[4], 1)]));
        assert_eq!(shift.cone_eval(&x, &v(&[4]), 0).unwrap(), 1);
        assert_eq!(shift.cone_eval(&x, &v(&[0]), 4).unwrap(), 1);
        assert_eq!(shift.cone_eval(&x, &v(&[0]), 3).unwrap(), 0);

        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..10 {
            let rule = CellularAutomaton::random_table(2, alpha(3), 1, &mut rng).unwrap();
            let start = FiniteConfig::random(2, alpha(3), 3, 6, &mut rng).unwrap();
            let mut current = start.clone();
            for _ in 0..5 {
                current = rule.step_finite(&current).unwrap();
            }
            for _ in 0..6 {
                let cell = v(&[rng.gen_range(-5..=5), rng.gen_range(-5..=5)]);
                assert_eq!(
                    rule.cone_eval(&Config::Finite(start.clone()), &cell, 5).unwrap(),
                    current.get(&cell).unwrap()
                );
            }
        }
    }

    #[test]
    fn trace_reports_match_hand_runs() {
        let shift = CellularAutomaton::shift_left(1, alpha(2)).unwrap();
        let x = Config::Finite(finite(1, 2, &[(&[7], 1)]));
        let report = shift.trace(&x, &v(&[0]), 20).unwrap();
        assert_eq!(report.support, vec![7]);
        assert!(!report.truncated);

        let countdown = CellularAutomaton::countdown(1).unwrap();
        let x = Config::Finite(finite(1, 3, &[(&[0], 2)]));
        let report = countdown.trace(&x, &v(&[0]), 10).unwrap();
        assert_eq!(report.word[..3], [2, 1, 0]);
        assert_eq!(report.support, vec![0, 1]);
        assert!(!report.truncated);

        let lr = CellularAutomaton::lr_annihilation().unwrap();
        let x = Config::Finite(finite(1, 3, &[(&[-3], RIGHT_PARTICLE), (&[5], LEFT_PARTICLE)]));
        let report = lr.trace(&x, &v(&[0]), 20).unwrap();
        assert_eq!(report.support, vec![3]);
        assert_eq!(report.word[3], RIGHT_PARTICLE);
        assert!(!report.truncated);
    }

    #[test]
    fn trace_flags_activity_near_the_horizon() {
        let shift = CellularAutomaton::shift_left(1, alpha(2)).unwrap();
        let x = Config::Finite(finite(1, 2, &[(&[18], 1)]));
        assert!(shift.trace(&x, &v(&[0]), 20).unwrap().truncated);
        let x = Config::Finite(finite(1, 2, &[(&[19], 1)]));
        assert!(shift.trace(&x, &v(&[0]), 20).unwrap().truncated);
    }

    #[test]
    fn longer_traces_extend_shorter_ones() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let rule = CellularAutomaton::random_table(1, alpha(3), 1, &mut rng).unwrap();
            let x = Config::Finite(FiniteConfig::random(1, alpha(3), 5, 4, &mut rng).unwrap());
            let short = rule.trace(&x, &v(&[0]), 8).unwrap();
            let long = rule.trace(&x, &v(&[0]), 21).unwrap();
            assert_eq!(short.word[..], long.word[..8]);
        }
    }

    #[test]
    fn mixed_overlay_traces_fall_back_to_cone_evaluation() {
        let countdown = CellularAutomaton::countdown(2).unwrap();
        let finite_part = Config::Finite(finite(2, 3, &[(&[5, 4], 2)]));
        let torus_part = Config::Torus(
            TorusConfig::from_cells(alpha(3), vec![2, 2], [(v(&[0, 0]), 1), (v(&[1, 1]), 2)])
                .unwrap(),
        );
        let overlay = config::sum(&finite_part, &torus_part).unwrap();
        assert!(matches!(countdown.step(&overlay), Err(Error::UnsteppableOverlay)));

        let at_seed = countdown.trace(&overlay, &v(&[5, 4]), 6).unwrap();
        assert_eq!(at_seed.word[..3], [2, 1, 0]);
        assert_eq!(at_seed.support, vec![0, 1]);
        let on_ring = countdown.trace(&overlay, &v(&[2, 2]), 6).unwrap();
        assert_eq!(on_ring.word[..2], [1, 0]);
    }

    #[test]
    fn power_acts_like_repeated_stepping() {
        let countdown = CellularAutomaton::countdown(1).unwrap();
        let squared = countdown.power(2).unwrap();
        for s in 1..3u32 {
            let x = finite(1, 3, &[(&[0], s)]);
            let image = squared.step_finite(&x).unwrap();
            assert!(image.is_empty(), "two decrements kill symbol {s}");
        }

        let shift = CellularAutomaton::shift_left(1, alpha(2)).unwrap();
        let cubed = shift.power(3).unwrap();
        assert_eq!(cubed.radius(), 3);
        let x = finite(1, 2, &[(&[5], 1)]);
        assert_eq!(cubed.step_finite(&x).unwrap(), finite(1, 2, &[(&[2], 1)]));

        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10 {
            let rule = CellularAutomaton::random_table(1, alpha(2), 1, &mut rng).unwrap();
            let x = FiniteConfig::random(1, alpha(2), 4, 4, &mut rng).unwrap();
            let twice = rule.step_finite(&rule.step_finite(&x).unwrap()).unwrap();
            let squared = rule.power(2).unwrap().step_finite(&x).unwrap();
            assert_eq!(twice, squared);
        }

        // Powers of powers compose exponents instead of nesting cones.
        let quad = shift.power(2).unwrap().power(2).unwrap();
        let x = finite(1, 2, &[(&[4], 1)]);
        assert_eq!(quad.step_finite(&x).unwrap(), finite(1, 2, &[(&[0], 1)]));
    }

    #[test]
    fn reducing_the_identity_gives_the_identity_on_codes() {
        let reduced = identity(2, 2).reduce_dimension(1, 2).unwrap();
        assert_eq!(reduced.dim(), 1);
        assert_eq!(reduced.alphabet().size(), 4);
        for s in 0..4u32 {
            let x = FiniteConfig::from_cells(1, alpha(4), [(v(&[0]), s)]).unwrap();
            assert_eq!(reduced.step_finite(&x).unwrap(), x);
        }
    }

    #[test]
    fn folded_game_of_life_column_rule_values() {
        let life = CellularAutomaton::game_of_life().unwrap();
        let column_rule = life.reduce_dimension(1, 1).unwrap();
        assert_eq!(column_rule.dim(), 1);
        assert_eq!(column_rule.alphabet().size(), 2);
        let read = |l: Symbol, a: Symbol, r: Symbol| {
            column_rule
                .apply_local(&|w: &CellVector| {
                    Ok(match w.coord(0) {
                        -1 => l,
                        0 => a,
                        1 => r,
                        _ => 0,
                    })
                })
                .unwrap()
        };
        // One live side column and a live cell: five live neighbors, death.
        assert_eq!(read(1, 1, 0), 0);
        // Two live side columns and a dead cell: six live neighbors, no birth.
        assert_eq!(read(1, 0, 1), 0);
    }

    #[test]
    fn fold_encodes_columns_little_endian() {
        let tube = TubeConfig::from_cells(2, alpha(2), 1, 2, [(v(&[0, 0]), 1)]).unwrap();
        let folded = fold(&tube).unwrap();
        assert_eq!(folded.dim(), 1);
        assert_eq!(folded.alphabet().size(), 4);
        assert_eq!(folded.get(&v(&[0])).unwrap(), 1);

        let top = TubeConfig::from_cells(2, alpha(2), 1, 2, [(v(&[0, 1]), 1)]).unwrap();
        assert_eq!(fold(&top).unwrap().get(&v(&[0])).unwrap(), 2);
    }

    #[test]
    fn unfold_inverts_fold_on_random_tubes() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let period = rng.gen_range(1..=4i64);
            let axis = rng.gen_range(0..2usize);
            let mut tube = TubeConfig::new(2, alpha(3), axis, period).unwrap();
            for _ in 0..rng.gen_range(0..6) {
                let cell = v(&[rng.gen_range(-4..=4), rng.gen_range(-4..=4)]);
                tube.set(cell, rng.gen_range(0..3)).unwrap();
            }
            let folded = fold(&tube).unwrap();
            let back = unfold(&folded, axis, period, alpha(3)).unwrap();
            assert_eq!(back, tube);
        }
    }

    #[test]
    fn fold_commutes_with_transverse_shifts() {
        let tube =
            TubeConfig::from_cells(2, alpha(2), 1, 3, [(v(&[2, 0]), 1), (v(&[4, 2]), 1)]).unwrap();
        let shifted_then_folded = fold(&tube.shift(&v(&[1, 0])).unwrap()).unwrap();
        let folded_then_shifted = fold(&tube).unwrap().shift(&v(&[1])).unwrap();
        assert_eq!(shifted_then_folded, folded_then_shifted);
    }

    #[test]
    fn reduction_is_conjugate_to_tube_stepping() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let rule = CellularAutomaton::random_table(2, alpha(2), 1, &mut rng).unwrap();
            let period = rng.gen_range(1..=4i64);
            let mut tube = TubeConfig::new(2, alpha(2), 1, period).unwrap();
            for _ in 0..rng.gen_range(1..6) {
                let cell = v(&[rng.gen_range(-3..=3), rng.gen_range(-3..=3)]);
                tube.set(cell, rng.gen_range(0..2)).unwrap();
            }
            let reduced = rule.reduce_dimension(1, period).unwrap();
            let stepped_then_folded = fold(&rule.step_tube(&tube).unwrap()).unwrap();
            let folded_then_stepped = reduced.step_finite(&fold(&tube).unwrap()).unwrap();
            assert_eq!(stepped_then_folded, folded_then_stepped);
        }
    }

    #[test]
    fn stepping_commutes_with_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let dim = rng.gen_range(1..=2usize);
            let rule = CellularAutomaton::random_table(dim, alpha(2), 1, &mut rng).unwrap();
            let x = FiniteConfig::random(dim, alpha(2), 4, 5, &mut rng).unwrap();
            let shift_by = v(&(0..dim).map(|_| rng.gen_range(-3..=3i64)).collect::<Vec<_>>());
            let shifted_then_stepped = rule.step_finite(&x.shift(&shift_by).unwrap()).unwrap();
            let stepped_then_shifted = rule.step_finite(&x).unwrap().shift(&shift_by).unwrap();
            assert_eq!(shifted_then_stepped, stepped_then_shifted);
        }
    }

    #[test]
    fn stepped_support_stays_inside_the_radius_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            let rule = CellularAutomaton::random_table(2, alpha(3), 1, &mut rng).unwrap();
            let x = FiniteConfig::random(2, alpha(3), 5, 6, &mut rng).unwrap();
            let stepped = rule.step_finite(&x).unwrap();
            if x.is_empty() {
                assert!(stepped.is_empty());
                continue;
            }
            let bound = ball_enumerate(rule.radius(), &x.support().unwrap()).unwrap();
            assert!(stepped.support().unwrap().is_subset(&bound));
        }
    }

    #[test]
    fn rule_text_round_trips_bit_exactly() {
        let neighborhood =
            Neighborhood::new(vec![CellVector::zero(1), CellVector::unit(1, 0).unwrap()]).unwrap();
        let table =
            CellularAutomaton::from_table(1, alpha(2), neighborhood, vec![0, 0, 1, 1]).unwrap();
        let text = write_rule(&table).unwrap();
        let parsed = parse_rule(&text).unwrap();
        assert_eq!(write_rule(&parsed).unwrap(), text);
        // The parsed rule behaves like the original: it is the left shift.
        let x = finite(1, 2, &[(&[3], 1)]);
        assert_eq!(parsed.step_finite(&x).unwrap(), finite(1, 2, &[(&[2], 1)]));

        let life = CellularAutomaton::game_of_life().unwrap();
        let text = write_rule(&life).unwrap();
        let parsed = parse_rule(&text).unwrap();
        assert_eq!(write_rule(&parsed).unwrap(), text);
        assert!(matches!(parsed.rule(), LocalRule::Builtin(BuiltinRule::GameOfLife)));
    }

    #[test]
    fn rule_parser_rejects_malformed_tables() {
        let missing = "%CA-RULE v1\ndim: 1\nalphabet: 2\nneighborhood: (0),(1)\nkind: table\nmap:\n0,0=0\n0,1=1\n1,0=0\n";
        match parse_rule(missing) {
            Err(Error::Parse { message, .. }) => assert!(message.contains("not total")),
            other => panic!("wanted totality error, got {other:?}"),
        }

        let duplicate = "%CA-RULE v1\ndim: 1\nalphabet: 2\nneighborhood: (0),(1)\nkind: table\nmap:\n0,0=0\n0,0=1\n0,1=1\n1,0=0\n1,1=1\n";
        assert!(matches!(parse_rule(duplicate), Err(Error::Parse { line: 8, .. })));

        let arity = "%CA-RULE v1\ndim: 1\nalphabet: 2\nneighborhood: (0),(1)\nkind: table\nmap:\n0=0\n";
        assert!(matches!(parse_rule(arity), Err(Error::Parse { line: 7, .. })));

        let out_of_range = "%CA-RULE v1\ndim: 1\nalphabet: 2\nneighborhood: (0)\nkind: table\nmap:\n0=2\n1=0\n";
        assert!(matches!(parse_rule(out_of_range), Err(Error::Parse { line: 7, .. })));

        let unknown_builtin = "%CA-RULE v1\ndim: 1\nalphabet: 2\nkind: builtin\nname: banana\n";
        assert!(matches!(parse_rule(unknown_builtin), Err(Error::Parse { line: 5, .. })));

        let wrong_dim_builtin = "%CA-RULE v1\ndim: 3\nalphabet: 2\nkind: builtin\nname: game-of-life\n";
        assert!(parse_rule(wrong_dim_builtin).is_err());
    }

    #[test]
    fn neighborhoods_reject_duplicates_and_report_radius() {
        assert!(Neighborhood::new(vec![v(&[1]), v(&[1])]).is_err());
        assert!(Neighborhood::new(vec![]).is_err());
        let nb = Neighborhood::new(vec![v(&[-2, 0]), v(&[0, 1])]).unwrap();
        assert_eq!(nb.radius(), 2);
        assert_eq!(nb.arity(), 2);
        assert_eq!(Neighborhood::ball(1, 2).unwrap().arity(), 9);
    }
}
