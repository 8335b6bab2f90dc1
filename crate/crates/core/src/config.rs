//! Configurations: pointwise-queryable assignments `ℤ^d → S`.
//!
//! Four kinds are represented, each queryable at any cell:
//!
//! * [`FiniteConfig`]: finitely many nonzero cells over a `0` background;
//!   only nonzero cells are stored.
//! * [`TubeConfig`]: periodic along one axis with finitely many nonzero
//!   cells in the quotient; stores one fundamental slab, with the periodic
//!   axis coordinate reduced into `0..period`.
//! * [`TorusConfig`]: periodic along every axis; stores the full fundamental
//!   domain as a row-major array.
//! * [`OverlayConfig`]: an ordered list of parts with pairwise disjoint
//!   supports. Disjointness is verified eagerly where both supports can be
//!   enumerated and lazily (at query time) otherwise.
//!
//! Global equality of configurations is deliberately not defined; compare
//! windows with [`window_eq`] instead.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{check_axis, check_dim, CellSet, CellVector};
use crate::textio::{self, Scanner};

/// Symbols are small non-negative integers; `0` is the background.
pub type Symbol = u32;

/// The symbol range `0..size`. Symbol `0` is always the distinguished
/// background candidate; there is no renaming layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet {
    size: u32,
}

impl Alphabet {
    pub fn new(size: u32) -> Result<Alphabet> {
        if size == 0 {
            return Err(Error::SymbolOutOfRange {
                symbol: 0,
                alphabet: 0,
            });
        }
        Ok(Alphabet { size })
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        0..self.size
    }

    pub fn check(&self, symbol: Symbol) -> Result<()> {
        if symbol < self.size {
            Ok(())
        } else {
            Err(Error::SymbolOutOfRange {
                symbol,
                alphabet: self.size,
            })
        }
    }
}

pub(crate) fn check_alphabet(expected: Alphabet, found: Alphabet) -> Result<()> {
    if expected.size == found.size {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch {
            expected: expected.size,
            found: found.size,
        })
    }
}

/// A finite mapping from an explicit domain to symbols. Unlike a
/// configuration, a pattern records its zeros: the domain is part of the
/// value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    dim: usize,
    cells: BTreeMap<CellVector, Symbol>,
}

impl Pattern {
    pub fn new(dim: usize) -> Result<Pattern> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Pattern {
            dim,
            cells: BTreeMap::new(),
        })
    }

    pub fn from_cells<I>(dim: usize, cells: I) -> Result<Pattern>
    where
        I: IntoIterator<Item = (CellVector, Symbol)>,
    {
        let mut pattern = Pattern::new(dim)?;
        for (cell, symbol) in cells {
            pattern.set(cell, symbol)?;
        }
        Ok(pattern)
    }

    pub fn set(&mut self, cell: CellVector, symbol: Symbol) -> Result<()> {
        check_dim(self.dim, cell.dim())?;
        self.cells.insert(cell, symbol);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, cell: &CellVector) -> Option<Symbol> {
        self.cells.get(cell).copied()
    }

    pub fn cells(&self) -> impl Iterator<Item = (&CellVector, Symbol)> {
        self.cells.iter().map(|(c, s)| (c, *s))
    }

    pub fn domain(&self) -> Result<CellSet> {
        CellSet::from_cells(self.dim, self.cells.keys().cloned())
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// True when every stored symbol is 0.
    pub fn is_blank(&self) -> bool {
        self.cells.values().all(|&s| s == 0)
    }

    pub fn translate(&self, offset: &CellVector) -> Result<Pattern> {
        check_dim(self.dim, offset.dim())?;
        let mut out = Pattern::new(self.dim)?;
        for (cell, symbol) in &self.cells {
            out.cells.insert(cell.add(offset)?, *symbol);
        }
        Ok(out)
    }
}

impl fmt::Display for Pattern {
    /// Compact one-line form `{(0)=2,(1)=0}`, cells in sorted order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (cell, symbol)) in self.cells.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{cell}={symbol}")?;
        }
        write!(f, "}}")
    }
}

/// Finite-support configuration: a `0` background with finitely many nonzero
/// cells. Zero-valued insertions are dropped so the stored key set is exactly
/// the support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteConfig {
    dim: usize,
    alphabet: Alphabet,
    cells: BTreeMap<CellVector, Symbol>,
}

impl FiniteConfig {
    pub fn new(dim: usize, alphabet: Alphabet) -> Result<FiniteConfig> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(FiniteConfig {
            dim,
            alphabet,
            cells: BTreeMap::new(),
        })
    }

    pub fn from_cells<I>(dim: usize, alphabet: Alphabet, cells: I) -> Result<FiniteConfig>
    where
        I: IntoIterator<Item = (CellVector, Symbol)>,
    {
        let mut config = FiniteConfig::new(dim, alphabet)?;
        for (cell, symbol) in cells {
            config.set(cell, symbol)?;
        }
        Ok(config)
    }

    pub fn set(&mut self, cell: CellVector, symbol: Symbol) -> Result<()> {
        check_dim(self.dim, cell.dim())?;
        self.alphabet.check(symbol)?;
        if symbol == 0 {
            self.cells.remove(&cell);
        } else {
            self.cells.insert(cell, symbol);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn get(&self, cell: &CellVector) -> Result<Symbol> {
        check_dim(self.dim, cell.dim())?;
        Ok(self.cells.get(cell).copied().unwrap_or(0))
    }

    pub fn support(&self) -> Result<CellSet> {
        CellSet::from_cells(self.dim, self.cells.keys().cloned())
    }

    pub fn support_len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> impl Iterator<Item = (&CellVector, Symbol)> {
        self.cells.iter().map(|(c, s)| (c, *s))
    }

    pub fn shift(&self, v: &CellVector) -> Result<FiniteConfig> {
        check_dim(self.dim, v.dim())?;
        let mut out = FiniteConfig::new(self.dim, self.alphabet)?;
        for (cell, symbol) in &self.cells {
            out.cells.insert(cell.sub(v)?, *symbol);
        }
        Ok(out)
    }

    /// Tiles the configuration along `axis` with period `p`, producing the
    /// pointwise sum of all its `p·e_axis` translates. The copies are
    /// disjoint exactly when the support's axis extent is at most `p`.
    pub fn periodize(&self, axis: usize, p: i64) -> Result<TubeConfig> {
        check_axis(axis, self.dim)?;
        if p < 1 {
            return Err(Error::NonPositivePeriod { period: p });
        }
        if let Some((lo, hi)) = self.support()?.extent(axis)? {
            let extent = hi - lo + 1;
            if extent > p {
                return Err(Error::PeriodTooSmall { extent, period: p });
            }
        }
        let mut tube = TubeConfig::new(self.dim, self.alphabet, axis, p)?;
        for (cell, symbol) in &self.cells {
            tube.set(cell.clone(), *symbol)?;
        }
        Ok(tube)
    }

    /// A pseudorandom configuration for randomized checks: up to `max_cells`
    /// nonzero cells drawn inside the centred box of radius `box_radius`.
    pub fn random<R: Rng>(
        dim: usize,
        alphabet: Alphabet,
        box_radius: i64,
        max_cells: usize,
        rng: &mut R,
    ) -> Result<FiniteConfig> {
        let mut config = FiniteConfig::new(dim, alphabet)?;
        let cells = rng.gen_range(0..=max_cells);
        for _ in 0..cells {
            let coords: Vec<i64> = (0..dim)
                .map(|_| rng.gen_range(-box_radius..=box_radius))
                .collect();
            let symbol = rng.gen_range(0..alphabet.size());
            config.set(CellVector::new(coords)?, symbol)?;
        }
        Ok(config)
    }
}

/// Configuration periodic along a single axis, with finitely many nonzero
/// cells in the quotient. Stores one fundamental slab: stored keys have their
/// axis coordinate reduced into `0..period`, and the value at any cell `u`
/// equals the value at `u + period·e_axis`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TubeConfig {
    dim: usize,
    alphabet: Alphabet,
    axis: usize,
    period: i64,
    cells: BTreeMap<CellVector, Symbol>,
}

impl TubeConfig {
    pub fn new(dim: usize, alphabet: Alphabet, axis: usize, period: i64) -> Result<TubeConfig> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        check_axis(axis, dim)?;
        if period < 1 {
            return Err(Error::NonPositivePeriod { period });
        }
        Ok(TubeConfig {
            dim,
            alphabet,
            axis,
            period,
            cells: BTreeMap::new(),
        })
    }

    pub fn from_cells<I>(
        dim: usize,
        alphabet: Alphabet,
        axis: usize,
        period: i64,
        cells: I,
    ) -> Result<TubeConfig>
    where
        I: IntoIterator<Item = (CellVector, Symbol)>,
    {
        let mut tube = TubeConfig::new(dim, alphabet, axis, period)?;
        for (cell, symbol) in cells {
            tube.set(cell, symbol)?;
        }
        Ok(tube)
    }

    fn reduce(&self, cell: &CellVector) -> Result<CellVector> {
        check_dim(self.dim, cell.dim())?;
        cell.with_coord(self.axis, cell.coord(self.axis).rem_euclid(self.period))
    }

    pub fn set(&mut self, cell: CellVector, symbol: Symbol) -> Result<()> {
        self.alphabet.check(symbol)?;
        let key = self.reduce(&cell)?;
        if symbol == 0 {
            self.cells.remove(&key);
        } else {
            self.cells.insert(key, symbol);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn period(&self) -> i64 {
        self.period
    }

    pub fn get(&self, cell: &CellVector) -> Result<Symbol> {
        let key = self.reduce(cell)?;
        Ok(self.cells.get(&key).copied().unwrap_or(0))
    }

    /// Nonzero cells of the fundamental slab.
    pub fn quotient_support(&self) -> Result<CellSet> {
        CellSet::from_cells(self.dim, self.cells.keys().cloned())
    }

    pub fn quotient_cells(&self) -> impl Iterator<Item = (&CellVector, Symbol)> {
        self.cells.iter().map(|(c, s)| (c, *s))
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn shift(&self, v: &CellVector) -> Result<TubeConfig> {
        check_dim(self.dim, v.dim())?;
        let mut out = TubeConfig::new(self.dim, self.alphabet, self.axis, self.period)?;
        for (cell, symbol) in &self.cells {
            out.set(cell.sub(v)?, *symbol)?;
        }
        Ok(out)
    }
}

/// Configuration periodic along every axis: the full fundamental domain is
/// stored row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusConfig {
    dim: usize,
    alphabet: Alphabet,
    periods: Vec<i64>,
    cells: Vec<Symbol>,
}

impl TorusConfig {
    pub fn new(alphabet: Alphabet, periods: Vec<i64>, cells: Vec<Symbol>) -> Result<TorusConfig> {
        if periods.is_empty() {
            return Err(Error::ZeroDimension);
        }
        let mut volume: i64 = 1;
        for &p in &periods {
            if p < 1 {
                return Err(Error::NonPositivePeriod { period: p });
            }
            volume = volume.saturating_mul(p);
        }
        if cells.len() as i64 != volume {
            return Err(Error::Unsupported(format!(
                "torus cell array has {} entries, fundamental domain has {volume}",
                cells.len()
            )));
        }
        for &s in &cells {
            alphabet.check(s)?;
        }
        Ok(TorusConfig {
            dim: periods.len(),
            alphabet,
            periods,
            cells,
        })
    }

    /// Builds an all-0 torus and then applies the given cell assignments.
    pub fn from_cells<I>(alphabet: Alphabet, periods: Vec<i64>, assignments: I) -> Result<TorusConfig>
    where
        I: IntoIterator<Item = (CellVector, Symbol)>,
    {
        let volume: i64 = periods.iter().product();
        let mut torus = TorusConfig::new(alphabet, periods, vec![0; volume.max(0) as usize])?;
        for (cell, symbol) in assignments {
            torus.set(&cell, symbol)?;
        }
        Ok(torus)
    }

    fn index(&self, cell: &CellVector) -> Result<usize> {
        check_dim(self.dim, cell.dim())?;
        let mut index: i64 = 0;
        for (i, &p) in self.periods.iter().enumerate() {
            index = index * p + cell.coord(i).rem_euclid(p);
        }
        Ok(index as usize)
    }

    pub fn set(&mut self, cell: &CellVector, symbol: Symbol) -> Result<()> {
        self.alphabet.check(symbol)?;
        let index = self.index(cell)?;
        self.cells[index] = symbol;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn periods(&self) -> &[i64] {
        &self.periods
    }

    pub fn volume(&self) -> usize {
        self.cells.len()
    }

    pub fn raw_cells(&self) -> &[Symbol] {
        &self.cells
    }

    pub fn get(&self, cell: &CellVector) -> Result<Symbol> {
        Ok(self.cells[self.index(cell)?])
    }

    /// Every cell of the fundamental domain, in row-major order.
    pub fn domain(&self) -> Vec<CellVector> {
        let mut out = Vec::with_capacity(self.cells.len());
        let mut coords = vec![0i64; self.dim];
        loop {
            out.push(CellVector::new(coords.clone()).expect("dim >= 1"));
            let mut i = self.dim;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                coords[i] += 1;
                if coords[i] < self.periods[i] {
                    break;
                }
                coords[i] = 0;
            }
        }
    }

    /// Nonzero cells of the fundamental domain.
    pub fn support(&self) -> Result<CellSet> {
        let mut set = CellSet::new(self.dim)?;
        for cell in self.domain() {
            if self.get(&cell)? != 0 {
                set.insert(cell)?;
            }
        }
        Ok(set)
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(|&s| s == 0)
    }

    pub fn shift(&self, v: &CellVector) -> Result<TorusConfig> {
        check_dim(self.dim, v.dim())?;
        let mut out = self.clone();
        for cell in self.domain() {
            let value = self.get(&cell.add(v)?)?;
            out.set(&cell, value)?;
        }
        Ok(out)
    }
}

/// Ordered list of configurations with pairwise disjoint supports. Pairs
/// whose supports can both be enumerated are checked at construction; the
/// rest are checked lazily, at query time, by [`Config::get`].
#[derive(Debug, Clone, PartialEq)]
pub struct OverlayConfig {
    dim: usize,
    alphabet: Alphabet,
    parts: Vec<Config>,
}

impl OverlayConfig {
    pub fn new(parts: Vec<Config>) -> Result<OverlayConfig> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Unsupported("an overlay needs at least one part".into()))?;
        let dim = first.dim();
        let alphabet = first.alphabet();
        for part in &parts {
            check_dim(dim, part.dim())?;
            check_alphabet(alphabet, part.alphabet())?;
        }
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                if let OverlapCheck::OverlapAt(cell) = find_overlap(&parts[i], &parts[j])? {
                    return Err(Error::SupportOverlap { cell });
                }
            }
        }
        Ok(OverlayConfig {
            dim,
            alphabet,
            parts,
        })
    }

    pub fn parts(&self) -> &[Config] {
        &self.parts
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn get(&self, cell: &CellVector) -> Result<Symbol> {
        check_dim(self.dim, cell.dim())?;
        let mut value = 0;
        for part in &self.parts {
            let s = part.get(cell)?;
            if s != 0 {
                if value != 0 {
                    return Err(Error::SupportOverlap { cell: cell.clone() });
                }
                value = s;
            }
        }
        Ok(value)
    }

    pub fn shift(&self, v: &CellVector) -> Result<OverlayConfig> {
        let parts = self
            .parts
            .iter()
            .map(|p| p.shift(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(OverlayConfig {
            dim: self.dim,
            alphabet: self.alphabet,
            parts,
        })
    }
}

/// A configuration of any kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Config {
    Finite(FiniteConfig),
    Tube(TubeConfig),
    Torus(TorusConfig),
    Overlay(OverlayConfig),
}

impl Config {
    pub fn dim(&self) -> usize {
        match self {
            Config::Finite(c) => c.dim(),
            Config::Tube(c) => c.dim(),
            Config::Torus(c) => c.dim(),
            Config::Overlay(c) => c.dim(),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        match self {
            Config::Finite(c) => c.alphabet(),
            Config::Tube(c) => c.alphabet(),
            Config::Torus(c) => c.alphabet(),
            Config::Overlay(c) => c.alphabet(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Config::Finite(_) => "finite",
            Config::Tube(_) => "tube",
            Config::Torus(_) => "torus",
            Config::Overlay(_) => "overlay",
        }
    }

    /// Pointwise value. Errors only on dimension mismatch or on a lazily
    /// detected overlay disjointness violation at this cell.
    pub fn get(&self, cell: &CellVector) -> Result<Symbol> {
        match self {
            Config::Finite(c) => c.get(cell),
            Config::Tube(c) => c.get(cell),
            Config::Torus(c) => c.get(cell),
            Config::Overlay(c) => c.get(cell),
        }
    }

    /// Shift action: `get(shift(x, v), u) = get(x, u + v)`.
    pub fn shift(&self, v: &CellVector) -> Result<Config> {
        Ok(match self {
            Config::Finite(c) => Config::Finite(c.shift(v)?),
            Config::Tube(c) => Config::Tube(c.shift(v)?),
            Config::Torus(c) => Config::Torus(c.shift(v)?),
            Config::Overlay(c) => Config::Overlay(c.shift(v)?),
        })
    }

    /// Restriction to a finite domain, zeros included.
    pub fn window(&self, domain: &CellSet) -> Result<Pattern> {
        let mut pattern = Pattern::new(self.dim())?;
        for cell in domain {
            pattern.set(cell.clone(), self.get(cell)?)?;
        }
        Ok(pattern)
    }

    /// Exact support (finite kind) or quotient support (tube/torus). An
    /// overlay has no single finite support set to return.
    pub fn support(&self) -> Result<CellSet> {
        match self {
            Config::Finite(c) => c.support(),
            Config::Tube(c) => c.quotient_support(),
            Config::Torus(c) => c.support(),
            Config::Overlay(_) => Err(Error::Unsupported(
                "support of an overlay: query the parts instead".into(),
            )),
        }
    }
}

impl From<FiniteConfig> for Config {
    fn from(c: FiniteConfig) -> Config {
        Config::Finite(c)
    }
}

impl From<TubeConfig> for Config {
    fn from(c: TubeConfig) -> Config {
        Config::Tube(c)
    }
}

impl From<TorusConfig> for Config {
    fn from(c: TorusConfig) -> Config {
        Config::Torus(c)
    }
}

impl From<OverlayConfig> for Config {
    fn from(c: OverlayConfig) -> Config {
        Config::Overlay(c)
    }
}

pub(crate) enum OverlapCheck {
    Disjoint,
    OverlapAt(CellVector),
    Unknown,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

/// How many lifted quotient cells an eager tube check may probe before
/// falling back to lazy query-time verification.
const EAGER_CHECK_LIMIT: i64 = 1 << 16;

/// Decides support disjointness where it is cheaply decidable.
pub(crate) fn find_overlap(a: &Config, b: &Config) -> Result<OverlapCheck> {
    match (a, b) {
        (Config::Overlay(o), _) => {
            let mut all_disjoint = true;
            for part in o.parts() {
                match find_overlap(part, b)? {
                    OverlapCheck::OverlapAt(cell) => return Ok(OverlapCheck::OverlapAt(cell)),
                    OverlapCheck::Unknown => all_disjoint = false,
                    OverlapCheck::Disjoint => {}
                }
            }
            Ok(if all_disjoint {
                OverlapCheck::Disjoint
            } else {
                OverlapCheck::Unknown
            })
        }
        (_, Config::Overlay(_)) => find_overlap(b, a),
        (Config::Finite(f), other) => {
            for (cell, _) in f.cells() {
                if other.get(cell)? != 0 {
                    return Ok(OverlapCheck::OverlapAt(cell.clone()));
                }
            }
            Ok(OverlapCheck::Disjoint)
        }
        (_, Config::Finite(_)) => find_overlap(b, a),
        (Config::Tube(ta), Config::Tube(tb)) => {
            if ta.axis() == tb.axis() {
                let period = lcm(ta.period(), tb.period());
                let lifts = period / ta.period();
                if lifts * ta.cells.len() as i64 > EAGER_CHECK_LIMIT {
                    return Ok(OverlapCheck::Unknown);
                }
                for (cell, _) in ta.quotient_cells() {
                    for t in 0..lifts {
                        let lifted = cell.with_coord(
                            ta.axis(),
                            cell.coord(ta.axis()) + t * ta.period(),
                        )?;
                        if tb.get(&lifted)? != 0 {
                            return Ok(OverlapCheck::OverlapAt(lifted));
                        }
                    }
                }
                Ok(OverlapCheck::Disjoint)
            } else {
                // Distinct axes: a common nonzero cell is fully determined by
                // a quotient cell of each tube, so check all pairs.
                let (ja, jb) = (ta.axis(), tb.axis());
                for (qa, _) in ta.quotient_cells() {
                    for (qb, _) in tb.quotient_cells() {
                        let aligned = (0..ta.dim()).all(|i| {
                            if i == ja {
                                (qb.coord(ja) - qa.coord(ja)).rem_euclid(ta.period()) == 0
                            } else if i == jb {
                                (qa.coord(jb) - qb.coord(jb)).rem_euclid(tb.period()) == 0
                            } else {
                                qa.coord(i) == qb.coord(i)
                            }
                        });
                        if aligned {
                            let witness = qa.with_coord(ja, qb.coord(ja))?;
                            return Ok(OverlapCheck::OverlapAt(witness));
                        }
                    }
                }
                Ok(OverlapCheck::Disjoint)
            }
        }
        (Config::Torus(ta), Config::Torus(tb)) => {
            let mut volume: i64 = 1;
            for i in 0..ta.dim() {
                volume = volume.saturating_mul(lcm(ta.periods()[i], tb.periods()[i]));
            }
            if volume > EAGER_CHECK_LIMIT {
                return Ok(OverlapCheck::Unknown);
            }
            let periods: Vec<i64> = (0..ta.dim())
                .map(|i| lcm(ta.periods()[i], tb.periods()[i]))
                .collect();
            let probe = TorusConfig::new(
                ta.alphabet(),
                periods,
                vec![0; volume as usize],
            )?;
            for cell in probe.domain() {
                if ta.get(&cell)? != 0 && tb.get(&cell)? != 0 {
                    return Ok(OverlapCheck::OverlapAt(cell));
                }
            }
            Ok(OverlapCheck::Disjoint)
        }
        _ => Ok(OverlapCheck::Unknown),
    }
}

/// Rewrites an overlay as a single non-overlay configuration when its parts
/// are compatible: all finite, or all tubes sharing an axis and period.
/// Mixed overlays have no single-kind representation and cannot be stepped
/// directly; pointwise cone evaluation handles those.
pub(crate) fn flatten_overlay(overlay: &OverlayConfig) -> Result<Config> {
    let mut leaves: Vec<&Config> = Vec::new();
    let mut stack: Vec<&Config> = overlay.parts().iter().rev().collect();
    while let Some(part) = stack.pop() {
        match part {
            Config::Overlay(inner) => stack.extend(inner.parts().iter().rev()),
            leaf => leaves.push(leaf),
        }
    }
    if leaves.len() == 1 {
        return Ok(leaves[0].clone());
    }
    if leaves.iter().all(|p| matches!(p, Config::Finite(_))) {
        let mut merged = FiniteConfig::new(overlay.dim(), overlay.alphabet())?;
        for leaf in leaves {
            if let Config::Finite(f) = leaf {
                for (cell, symbol) in f.cells() {
                    merged.set(cell.clone(), symbol)?;
                }
            }
        }
        return Ok(Config::Finite(merged));
    }
    let tubes: Vec<&TubeConfig> = leaves
        .iter()
        .filter_map(|p| match p {
            Config::Tube(t) => Some(t),
            _ => None,
        })
        .collect();
    if tubes.len() == leaves.len()
        && tubes
            .iter()
            .all(|t| t.axis() == tubes[0].axis() && t.period() == tubes[0].period())
    {
        let mut merged = TubeConfig::new(
            overlay.dim(),
            overlay.alphabet(),
            tubes[0].axis(),
            tubes[0].period(),
        )?;
        for tube in tubes {
            for (cell, symbol) in tube.quotient_cells() {
                merged.set(cell.clone(), symbol)?;
            }
        }
        return Ok(Config::Tube(merged));
    }
    Err(Error::UnsteppableOverlay)
}

/// Disjoint sum: the configuration that agrees with `x` on `x`'s support,
/// with `y` on `y`'s support, and is 0 elsewhere; defined only when the two
/// supports are disjoint.
///
/// Finite + finite flattens to a [`FiniteConfig`]; any other combination
/// yields an overlay (nested overlays are spliced in flat).
pub fn sum(x: &Config, y: &Config) -> Result<Config> {
    check_dim(x.dim(), y.dim())?;
    check_alphabet(x.alphabet(), y.alphabet())?;
    if let (Config::Finite(a), Config::Finite(b)) = (x, y) {
        let mut out = a.clone();
        for (cell, symbol) in b.cells() {
            if out.get(cell)? != 0 {
                return Err(Error::SupportOverlap { cell: cell.clone() });
            }
            out.set(cell.clone(), symbol)?;
        }
        return Ok(Config::Finite(out));
    }
    let mut parts = Vec::new();
    for side in [x, y] {
        match side {
            Config::Overlay(o) => parts.extend(o.parts().iter().cloned()),
            other => parts.push(other.clone()),
        }
    }
    Ok(Config::Overlay(OverlayConfig::new(parts)?))
}

/// Pointwise comparison over a finite domain. This is the only notion of
/// configuration equality the crate defines.
pub fn window_eq(a: &Config, b: &Config, domain: &CellSet) -> Result<bool> {
    for cell in domain {
        if a.get(cell)? != b.get(cell)? {
            return Ok(false);
        }
    }
    Ok(true)
}

const CONFIG_HEADER: &str = "%CA-CONFIG v1";

/// Parses the `%CA-CONFIG v1` text format.
pub fn parse_config(text: &str) -> Result<Config> {
    let mut scanner = Scanner::new(text);
    scanner.expect_header(CONFIG_HEADER)?;
    let mut dim: Option<usize> = None;
    let mut alphabet: Option<u32> = None;
    let mut kind: Option<(usize, String)> = None;
    let mut axis: Option<usize> = None;
    let mut period: Option<i64> = None;
    let mut periods: Option<Vec<i64>> = None;
    let mut cells: Vec<(usize, CellVector, Symbol)> = Vec::new();
    let mut in_cells = false;

    while let Some((line_no, line)) = scanner.next_nonblank() {
        if in_cells {
            let (cell, symbol) = textio::cell_assignment(line_no, line)?;
            cells.push((line_no, cell, symbol));
            continue;
        }
        let (key, value) = textio::key_value(line)
            .ok_or_else(|| Error::parse(line_no, format!("expected `key: value`, found `{line}`")))?;
        match key {
            "dim" => dim = Some(textio::parse_usize(line_no, value)?),
            "alphabet" => alphabet = Some(textio::parse_u32(line_no, value)?),
            "kind" => kind = Some((line_no, value.to_string())),
            "axis" => axis = Some(textio::parse_usize(line_no, value)?),
            "period" => period = Some(textio::parse_i64(line_no, value)?),
            "periods" => {
                let mut list = Vec::new();
                for part in value.split(',') {
                    list.push(textio::parse_i64(line_no, part.trim())?);
                }
                periods = Some(list);
            }
            "cells" => in_cells = true,
            other => {
                return Err(Error::parse(line_no, format!("unknown key `{other}`")));
            }
        }
    }

    let end = scanner.last_line();
    let dim = dim.ok_or_else(|| Error::parse(end, "missing `dim`"))?;
    let alphabet = Alphabet::new(alphabet.ok_or_else(|| Error::parse(end, "missing `alphabet`"))?)?;
    let (kind_line, kind) = kind.ok_or_else(|| Error::parse(end, "missing `kind`"))?;

    let place = |target: &mut dyn FnMut(CellVector, Symbol) -> Result<()>| -> Result<()> {
        for (line_no, cell, symbol) in &cells {
            if cell.dim() != dim {
                return Err(Error::parse(
                    *line_no,
                    format!("cell {cell} has dimension {}, config has {dim}", cell.dim()),
                ));
            }
            alphabet
                .check(*symbol)
                .map_err(|_| Error::parse(*line_no, format!("symbol {symbol} out of range")))?;
            target(cell.clone(), *symbol).map_err(|e| match e {
                Error::SupportOverlap { cell } => {
                    Error::parse(*line_no, format!("duplicate cell {cell}"))
                }
                other => other,
            })?;
        }
        Ok(())
    };

    match kind.as_str() {
        "finite" => {
            let mut config = FiniteConfig::new(dim, alphabet)?;
            let mut seen = CellSet::new(dim)?;
            place(&mut |cell, symbol| {
                if !seen.insert(cell.clone())? {
                    return Err(Error::SupportOverlap { cell });
                }
                config.set(cell, symbol)
            })?;
            Ok(Config::Finite(config))
        }
        "tube" => {
            let axis = axis.ok_or_else(|| Error::parse(end, "tube config missing `axis`"))?;
            let period = period.ok_or_else(|| Error::parse(end, "tube config missing `period`"))?;
            let mut config = TubeConfig::new(dim, alphabet, axis, period)?;
            let mut seen = CellSet::new(dim)?;
            place(&mut |cell, symbol| {
                let key = config.reduce(&cell)?;
                if !seen.insert(key.clone())? {
                    return Err(Error::SupportOverlap { cell: key });
                }
                config.set(cell, symbol)
            })?;
            Ok(Config::Tube(config))
        }
        "torus" => {
            let periods = periods.ok_or_else(|| Error::parse(end, "torus config missing `periods`"))?;
            if periods.len() != dim {
                return Err(Error::parse(
                    kind_line,
                    format!("torus lists {} periods for dimension {dim}", periods.len()),
                ));
            }
            let volume: i64 = periods.iter().product();
            let mut config = TorusConfig::new(alphabet, periods, vec![0; volume.max(0) as usize])?;
            let mut seen = CellSet::new(dim)?;
            place(&mut |cell, symbol| {
                let key = CellVector::new(
                    (0..dim)
                        .map(|i| cell.coord(i).rem_euclid(config.periods()[i]))
                        .collect(),
                )?;
                if !seen.insert(key.clone())? {
                    return Err(Error::SupportOverlap { cell: key });
                }
                config.set(&cell, symbol)
            })?;
            Ok(Config::Torus(config))
        }
        other => Err(Error::parse(kind_line, format!("unknown kind `{other}`"))),
    }
}

/// Writes the canonical `%CA-CONFIG v1` text for a non-overlay configuration.
pub fn write_config(config: &Config) -> Result<String> {
    use fmt::Write;
    let mut out = String::new();
    let push_cells = |cells: Vec<(CellVector, Symbol)>, out: &mut String| {
        out.push_str("cells:\n");
        for (cell, symbol) in cells {
            writeln!(out, "{cell}={symbol}").expect("string write");
        }
    };
    writeln!(out, "{CONFIG_HEADER}").expect("string write");
    writeln!(out, "dim: {}", config.dim()).expect("string write");
    writeln!(out, "alphabet: {}", config.alphabet().size()).expect("string write");
    match config {
        Config::Finite(c) => {
            writeln!(out, "kind: finite").expect("string write");
            push_cells(c.cells().map(|(v, s)| (v.clone(), s)).collect(), &mut out);
        }
        Config::Tube(c) => {
            writeln!(out, "kind: tube").expect("string write");
            writeln!(out, "axis: {}", c.axis()).expect("string write");
            writeln!(out, "period: {}", c.period()).expect("string write");
            push_cells(
                c.quotient_cells().map(|(v, s)| (v.clone(), s)).collect(),
                &mut out,
            );
        }
        Config::Torus(c) => {
            writeln!(out, "kind: torus").expect("string write");
            let list: Vec<String> = c.periods().iter().map(|p| p.to_string()).collect();
            writeln!(out, "periods: {}", list.join(",")).expect("string write");
            let mut cells = Vec::new();
            for cell in c.domain() {
                let s = c.get(&cell)?;
                if s != 0 {
                    cells.push((cell, s));
                }
            }
            cells.sort();
            push_cells(cells, &mut out);
        }
        Config::Overlay(_) => {
            return Err(Error::Unsupported(
                "overlays have no single-file text form; write the parts".into(),
            ))
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::geometry::ball_enumerate;

    fn v(coords: &[i64]) -> CellVector {
        CellVector::new(coords.to_vec()).unwrap()
    }

    fn alpha(n: u32) -> Alphabet {
        Alphabet::new(n).unwrap()
    }

    fn finite(dim: usize, size: u32, cells: &[(&[i64], Symbol)]) -> FiniteConfig {
        FiniteConfig::from_cells(
            dim,
            alpha(size),
            cells.iter().map(|(c, s)| (v(c), *s)),
        )
        .unwrap()
    }

    #[test]
    fn finite_get_returns_stored_value_or_background() {
        let config = finite(2, 2, &[(&[2, 3], 1)]);
        assert_eq!(config.get(&v(&[2, 3])).unwrap(), 1);
        assert_eq!(config.get(&v(&[0, 0])).unwrap(), 0);
        assert!(config.get(&v(&[0])).is_err());
    }

    #[test]
    fn tube_get_reduces_along_its_axis() {
        let tube = TubeConfig::from_cells(2, alpha(3), 1, 3, [(v(&[0, 1]), 2)]).unwrap();
        assert_eq!(tube.get(&v(&[0, 7])).unwrap(), 2);
        assert_eq!(tube.get(&v(&[0, -2])).unwrap(), 2);
        assert_eq!(tube.get(&v(&[0, 0])).unwrap(), 0);
        assert_eq!(tube.get(&v(&[1, 1])).unwrap(), 0);
    }

    #[test]
    fn torus_get_reduces_along_every_axis() {
        let torus = TorusConfig::from_cells(alpha(2), vec![3, 4], [(v(&[1, 2]), 1)]).unwrap();
        assert_eq!(torus.get(&v(&[1, 2])).unwrap(), 1);
        assert_eq!(torus.get(&v(&[4, -2])).unwrap(), 1);
        assert_eq!(torus.get(&v(&[1, 1])).unwrap(), 0);
        assert_eq!(torus.volume(), 12);
    }

    #[test]
    fn shift_by_zero_is_identity_and_translation_moves_support() {
        let config = finite(2, 2, &[(&[5, 5], 1)]);
        let same = config.shift(&v(&[0, 0])).unwrap();
        assert_eq!(same, config);
        let moved = config.shift(&v(&[5, 5])).unwrap();
        assert_eq!(moved.get(&v(&[0, 0])).unwrap(), 1);
        assert_eq!(moved.support_len(), 1);
    }

    #[test]
    fn tube_shift_by_its_period_is_pointwise_identity() {
        let tube = TubeConfig::from_cells(2, alpha(2), 1, 2, [(v(&[0, 1]), 1)]).unwrap();
        let shifted = tube.shift(&v(&[0, 2])).unwrap();
        let domain = ball_enumerate(3, &CellSet::from_cells(2, [v(&[0, 0])]).unwrap()).unwrap();
        for cell in &domain {
            assert_eq!(tube.get(cell).unwrap(), shifted.get(cell).unwrap());
        }
    }

    #[test]
    fn shift_composition_law_holds_on_random_windows() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let dim = rng.gen_range(1..=3usize);
            let config = Config::Finite(
                FiniteConfig::random(dim, alpha(3), 6, 5, &mut rng).unwrap(),
            );
            let u = v(&(0..dim).map(|_| rng.gen_range(-4..=4i64)).collect::<Vec<_>>());
            let w = v(&(0..dim).map(|_| rng.gen_range(-4..=4i64)).collect::<Vec<_>>());
            let twice = config.shift(&u).unwrap().shift(&w).unwrap();
            let once = config.shift(&u.add(&w).unwrap()).unwrap();
            let domain =
                ball_enumerate(7, &CellSet::from_cells(dim, [CellVector::zero(dim)]).unwrap())
                    .unwrap();
            assert!(window_eq(&twice, &once, &domain).unwrap());
        }
    }

    #[test]
    fn sum_of_disjoint_finite_configs_flattens() {
        let a = Config::Finite(finite(2, 3, &[(&[0, 0], 1)]));
        let b = Config::Finite(finite(2, 3, &[(&[5, 0], 2)]));
        let both = sum(&a, &b).unwrap();
        match &both {
            Config::Finite(c) => {
                assert_eq!(c.support_len(), 2);
                assert_eq!(c.get(&v(&[0, 0])).unwrap(), 1);
                assert_eq!(c.get(&v(&[5, 0])).unwrap(), 2);
            }
            other => panic!("expected finite sum, got {}", other.kind_name()),
        }
    }

    #[test]
    fn sum_rejects_overlapping_supports() {
        let a = Config::Finite(finite(2, 3, &[(&[0, 0], 1)]));
        let b = Config::Finite(finite(2, 3, &[(&[0, 0], 2)]));
        assert!(matches!(
            sum(&a, &b),
            Err(Error::SupportOverlap { .. })
        ));
    }

    #[test]
    fn sum_with_empty_is_pointwise_identity() {
        let a = Config::Finite(finite(1, 2, &[(&[3], 1), (&[-1], 1)]));
        let empty = Config::Finite(FiniteConfig::new(1, alpha(2)).unwrap());
        let total = sum(&a, &empty).unwrap();
        let domain = ball_enumerate(5, &CellSet::from_cells(1, [v(&[0])]).unwrap()).unwrap();
        assert!(window_eq(&a, &total, &domain).unwrap());
    }

    #[test]
    fn sum_is_commutative_and_associative_on_disjoint_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let domain = ball_enumerate(10, &CellSet::from_cells(2, [v(&[0, 0])]).unwrap()).unwrap();
        for _ in 0..50 {
            let a = Config::Finite(
                FiniteConfig::from_cells(
                    2,
                    alpha(3),
                    (0..3).map(|i| (v(&[i, rng.gen_range(-2..=2)]), 1 + rng.gen_range(0..2))),
                )
                .unwrap(),
            );
            let b = Config::Finite(
                FiniteConfig::from_cells(
                    2,
                    alpha(3),
                    (4..6).map(|i| (v(&[i, rng.gen_range(-2..=2)]), 1 + rng.gen_range(0..2))),
                )
                .unwrap(),
            );
            let c = Config::Finite(
                FiniteConfig::from_cells(
                    2,
                    alpha(3),
                    (7..9).map(|i| (v(&[i, rng.gen_range(-2..=2)]), 1 + rng.gen_range(0..2))),
                )
                .unwrap(),
            );
            let ab_c = sum(&sum(&a, &b).unwrap(), &c).unwrap();
            let a_bc = sum(&a, &sum(&b, &c).unwrap()).unwrap();
            let ba = sum(&b, &a).unwrap();
            let ab = sum(&a, &b).unwrap();
            assert!(window_eq(&ab_c, &a_bc, &domain).unwrap());
            assert!(window_eq(&ab, &ba, &domain).unwrap());
        }
    }

    #[test]
    fn support_of_disjoint_sum_is_the_union() {
        let a = finite(2, 2, &[(&[0, 0], 1), (&[1, 1], 1)]);
        let b = finite(2, 2, &[(&[9, 9], 1)]);
        let total = sum(&Config::Finite(a.clone()), &Config::Finite(b.clone())).unwrap();
        let support = total.support().unwrap();
        assert_eq!(support.len(), 3);
        for (cell, _) in a.cells().chain(b.cells()) {
            assert!(support.contains(cell));
        }
    }

    #[test]
    fn periodize_single_cell_yields_a_column() {
        let config = finite(2, 2, &[(&[0, 0], 1)]);
        let tube = config.periodize(1, 1).unwrap();
        for y in [-5i64, 0, 3, 1000] {
            assert_eq!(tube.get(&v(&[0, y])).unwrap(), 1);
            assert_eq!(tube.get(&v(&[1, y])).unwrap(), 0);
        }
        assert_eq!(tube.quotient_support().unwrap().len(), 1);
    }

    #[test]
    fn periodize_preserves_one_fundamental_slab() {
        let config = finite(2, 3, &[(&[0, 0], 1), (&[1, 2], 2), (&[0, 1], 1)]);
        let tube = config.periodize(1, 5).unwrap();
        // Inside the slab y ∈ 0..5 the tube agrees with the original.
        for x in -1..=2i64 {
            for y in 0..5i64 {
                assert_eq!(
                    tube.get(&v(&[x, y])).unwrap(),
                    config.get(&v(&[x, y])).unwrap(),
                    "cell ({x},{y})"
                );
            }
        }
        // And every translate by the period matches.
        for x in -1..=2i64 {
            for y in -7..=12i64 {
                assert_eq!(
                    tube.get(&v(&[x, y])).unwrap(),
                    tube.get(&v(&[x, y + 5])).unwrap()
                );
            }
        }
        assert_eq!(tube.quotient_support().unwrap().len(), 3);
    }

    #[test]
    fn periodize_rejects_overlapping_copies() {
        let config = finite(2, 2, &[(&[0, 0], 1), (&[0, 2], 1)]);
        assert!(matches!(
            config.periodize(1, 2),
            Err(Error::PeriodTooSmall { extent: 3, period: 2 })
        ));
        assert!(config.periodize(1, 3).is_ok());
    }

    #[test]
    fn window_of_empty_domain_is_empty() {
        let config = Config::Finite(finite(2, 2, &[(&[1, 1], 1)]));
        let domain = CellSet::new(2).unwrap();
        assert!(config.window(&domain).unwrap().is_empty());
    }

    #[test]
    fn window_records_zeros_explicitly() {
        let config = Config::Finite(finite(2, 3, &[(&[1, 1], 2)]));
        let domain = ball_enumerate(1, &CellSet::from_cells(2, [v(&[1, 1])]).unwrap()).unwrap();
        let pattern = config.window(&domain).unwrap();
        assert_eq!(pattern.len(), 9);
        assert_eq!(pattern.get(&v(&[1, 1])), Some(2));
        assert_eq!(pattern.cells().filter(|(_, s)| *s == 0).count(), 8);
    }

    #[test]
    fn overlay_window_sees_only_the_covered_part() {
        let near = Config::Finite(finite(2, 2, &[(&[0, 0], 1)]));
        let far = Config::Finite(finite(2, 2, &[(&[100, 100], 1)]));
        let overlay = sum(&near, &far).unwrap();
        let domain = ball_enumerate(1, &CellSet::from_cells(2, [v(&[0, 0])]).unwrap()).unwrap();
        let pattern = overlay.window(&domain).unwrap();
        let oracle = near.window(&domain).unwrap();
        assert_eq!(pattern, oracle);
    }

    #[test]
    fn overlay_get_flags_lazy_disjointness_violations() {
        // A tube and a torus are never eagerly comparable; build an overlay
        // that is fine at some cells and in violation at others.
        let tube = Config::Tube(
            TubeConfig::from_cells(2, alpha(2), 1, 2, [(v(&[0, 0]), 1)]).unwrap(),
        );
        let torus = Config::Torus(
            TorusConfig::from_cells(alpha(2), vec![3, 3], [(v(&[0, 0]), 1)]).unwrap(),
        );
        let overlay = OverlayConfig::new(vec![tube, torus]).unwrap();
        assert_eq!(overlay.get(&v(&[1, 1])).unwrap(), 0);
        assert_eq!(overlay.get(&v(&[0, 1])).unwrap(), 0);
        // Cell (0,0): both parts nonzero.
        assert!(matches!(
            overlay.get(&v(&[0, 0])),
            Err(Error::SupportOverlap { .. })
        ));
        // Cell (0,6): torus wraps onto (0,0), tube wraps onto (0,0) as well.
        assert!(matches!(
            overlay.get(&v(&[0, 6])),
            Err(Error::SupportOverlap { .. })
        ));
    }

    #[test]
    fn eager_checks_catch_finite_against_tube_overlap() {
        let tube = Config::Tube(
            TubeConfig::from_cells(2, alpha(2), 1, 3, [(v(&[2, 1]), 1)]).unwrap(),
        );
        let hit = Config::Finite(finite(2, 2, &[(&[2, 7], 1)]));
        assert!(matches!(
            sum(&tube, &hit),
            Err(Error::SupportOverlap { .. })
        ));
        let miss = Config::Finite(finite(2, 2, &[(&[2, 6], 1)]));
        assert!(sum(&tube, &miss).is_ok());
    }

    #[test]
    fn eager_checks_catch_tube_against_tube_overlap() {
        let a = Config::Tube(TubeConfig::from_cells(2, alpha(2), 1, 2, [(v(&[0, 0]), 1)]).unwrap());
        let b = Config::Tube(TubeConfig::from_cells(2, alpha(2), 1, 3, [(v(&[0, 1]), 1)]).unwrap());
        // a is nonzero at (0, even), b at (0, 1 + 3k): 4 is even and ≡ 1 mod 3.
        assert!(matches!(sum(&a, &b), Err(Error::SupportOverlap { .. })));
        let c = Config::Tube(TubeConfig::from_cells(2, alpha(2), 1, 2, [(v(&[1, 1]), 1)]).unwrap());
        assert!(sum(&a, &c).is_ok());

        // Crossed axes: a vertical tube through x=0 meets a horizontal tube
        // through y=5 at (0,5) unless their columns/rows miss each other.
        let vert = Config::Tube(TubeConfig::from_cells(2, alpha(2), 1, 1, [(v(&[0, 0]), 1)]).unwrap());
        let horiz = Config::Tube(TubeConfig::from_cells(2, alpha(2), 0, 1, [(v(&[0, 5]), 1)]).unwrap());
        assert!(matches!(sum(&vert, &horiz), Err(Error::SupportOverlap { .. })));
    }

    #[test]
    fn flattened_overlay_of_finite_parts_matches_pointwise() {
        let parts = [
            finite(2, 3, &[(&[0, 0], 1), (&[1, 0], 2)]),
            finite(2, 3, &[(&[4, -2], 1)]),
            finite(2, 3, &[(&[-3, 5], 2)]),
        ];
        let overlay = Config::Overlay(
            OverlayConfig::new(parts.iter().cloned().map(Config::Finite).collect()).unwrap(),
        );
        let mut flat = FiniteConfig::new(2, alpha(3)).unwrap();
        for part in &parts {
            for (cell, symbol) in part.cells() {
                flat.set(cell.clone(), symbol).unwrap();
            }
        }
        let flat = Config::Finite(flat);
        let mut domain = CellSet::new(2).unwrap();
        for part in &parts {
            for cell in &ball_enumerate(1, &part.support().unwrap()).unwrap() {
                domain.insert(cell.clone()).unwrap();
            }
        }
        assert!(window_eq(&overlay, &flat, &domain).unwrap());
    }

    #[test]
    fn config_text_round_trips_for_all_kinds() {
        let finite_cfg = Config::Finite(finite(2, 3, &[(&[0, 0], 1), (&[2, 3], 2)]));
        let tube_cfg = Config::Tube(
            TubeConfig::from_cells(2, alpha(3), 1, 9, [(v(&[5, 5]), 1), (v(&[6, 7]), 2)]).unwrap(),
        );
        let torus_cfg = Config::Torus(
            TorusConfig::from_cells(alpha(2), vec![3, 4], [(v(&[0, 0]), 1), (v(&[2, 3]), 1)])
                .unwrap(),
        );
        for config in [finite_cfg, tube_cfg, torus_cfg] {
            let text = write_config(&config).unwrap();
            let back = parse_config(&text).unwrap();
            assert_eq!(back, config);
            // Canonical text is stable under a second round trip.
            assert_eq!(write_config(&back).unwrap(), text);
        }
    }

    #[test]
    fn config_parser_rejects_malformed_input() {
        let bad_header = "dim: 1\n";
        assert!(matches!(parse_config(bad_header), Err(Error::Parse { .. })));

        let out_of_range = "%CA-CONFIG v1\ndim: 1\nalphabet: 2\nkind: finite\ncells:\n(0)=5\n";
        match parse_config(out_of_range) {
            Err(Error::Parse { line: 6, .. }) => {}
            other => panic!("wanted line-6 symbol error, got {other:?}"),
        }

        let duplicate = "%CA-CONFIG v1\ndim: 1\nalphabet: 3\nkind: finite\ncells:\n(0)=1\n(0)=2\n";
        match parse_config(duplicate) {
            Err(Error::Parse { line: 7, .. }) => {}
            other => panic!("wanted line-7 duplicate error, got {other:?}"),
        }

        let unknown_kind = "%CA-CONFIG v1\ndim: 1\nalphabet: 2\nkind: banana\ncells:\n";
        assert!(matches!(parse_config(unknown_kind), Err(Error::Parse { line: 4, .. })));

        let missing_axis = "%CA-CONFIG v1\ndim: 2\nalphabet: 2\nkind: tube\nperiod: 3\ncells:\n";
        assert!(parse_config(missing_axis).is_err());

        // Duplicate detection happens after quotient reduction for tubes.
        let tube_dup =
            "%CA-CONFIG v1\ndim: 2\nalphabet: 2\nkind: tube\naxis: 1\nperiod: 3\ncells:\n(0,1)=1\n(0,4)=1\n";
        assert!(matches!(parse_config(tube_dup), Err(Error::Parse { line: 9, .. })));
    }

    #[test]
    fn config_parser_tolerates_comments_and_explicit_zeros() {
        let text = "\n# configuration\n%CA-CONFIG v1\ndim: 1 # one-dimensional\nalphabet: 2\nkind: finite\ncells:\n(4)=1\n(9)=0\n";
        let config = parse_config(text).unwrap();
        assert_eq!(config.get(&v(&[4])).unwrap(), 1);
        assert_eq!(config.support().unwrap().len(), 1);
    }
}
