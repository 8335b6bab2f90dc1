//! Integer-lattice geometry under the max norm.
//!
//! Cells live in `ℤ^d` and distances are measured by `|v| = max_i |v_i|`, so
//! the ball of radius `k` around a cell is the `(2k+1)^d` cube centred on it.
//! Finite sets of cells are materialized in sorted order; towers (the
//! `B_k`-widening of an axis-aligned line bundle) are infinite and exist only
//! as membership predicates.

use std::collections::btree_set;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A lattice cell: `d ≥ 1` signed integer coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellVector {
    coords: Vec<i64>,
}

impl CellVector {
    pub fn new(coords: Vec<i64>) -> Result<CellVector> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        Ok(CellVector { coords })
    }

    /// The origin of `ℤ^dim`.
    pub fn zero(dim: usize) -> CellVector {
        CellVector {
            coords: vec![0; dim.max(1)],
        }
    }

    /// The unit vector `e_axis` of `ℤ^dim`.
    pub fn unit(dim: usize, axis: usize) -> Result<CellVector> {
        check_axis(axis, dim)?;
        let mut coords = vec![0; dim];
        coords[axis] = 1;
        Ok(CellVector { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn coord(&self, axis: usize) -> i64 {
        self.coords[axis]
    }

    /// Max norm `max_i |v_i|`.
    pub fn norm(&self) -> i64 {
        self.coords.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &CellVector) -> Result<CellVector> {
        check_dim(self.dim(), other.dim())?;
        Ok(CellVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &CellVector) -> Result<CellVector> {
        check_dim(self.dim(), other.dim())?;
        Ok(CellVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, factor: i64) -> CellVector {
        CellVector {
            coords: self.coords.iter().map(|c| c * factor).collect(),
        }
    }

    /// Copy with the coordinate along `axis` replaced.
    pub fn with_coord(&self, axis: usize, value: i64) -> Result<CellVector> {
        check_axis(axis, self.dim())?;
        let mut coords = self.coords.clone();
        coords[axis] = value;
        Ok(CellVector { coords })
    }

    /// Insert a coordinate at position `axis`, raising the dimension by one.
    pub fn insert_coord(&self, axis: usize, value: i64) -> Result<CellVector> {
        if axis > self.dim() {
            return Err(Error::AxisOutOfRange {
                axis,
                dim: self.dim() + 1,
            });
        }
        let mut coords = self.coords.clone();
        coords.insert(axis, value);
        Ok(CellVector { coords })
    }

    /// Drop the coordinate at position `axis`, lowering the dimension by one.
    pub fn remove_coord(&self, axis: usize) -> Result<CellVector> {
        check_axis(axis, self.dim())?;
        if self.dim() == 1 {
            return Err(Error::ZeroDimension);
        }
        let mut coords = self.coords.clone();
        coords.remove(axis);
        Ok(CellVector { coords })
    }
}

impl fmt::Display for CellVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for CellVector {
    type Err = Error;

    /// Parses the `(3,-4)` form. Whitespace around coordinates is tolerated.
    fn from_str(s: &str) -> Result<CellVector> {
        let s = s.trim();
        let inner = s
            .strip_prefix('(')
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| bad_vector(s))?;
        let mut coords = Vec::new();
        for part in inner.split(',') {
            let part = part.trim();
            let value: i64 = part.parse().map_err(|_| bad_vector(s))?;
            coords.push(value);
        }
        CellVector::new(coords)
    }
}

fn bad_vector(s: &str) -> Error {
    Error::Parse {
        line: 0,
        message: format!("malformed cell vector `{s}`"),
    }
}

/// A finite set of equal-dimension cells, kept sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSet {
    dim: usize,
    cells: BTreeSet<CellVector>,
}

impl CellSet {
    pub fn new(dim: usize) -> Result<CellSet> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(CellSet {
            dim,
            cells: BTreeSet::new(),
        })
    }

    pub fn from_cells<I>(dim: usize, cells: I) -> Result<CellSet>
    where
        I: IntoIterator<Item = CellVector>,
    {
        let mut set = CellSet::new(dim)?;
        for cell in cells {
            set.insert(cell)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, cell: CellVector) -> Result<bool> {
        check_dim(self.dim, cell.dim())?;
        Ok(self.cells.insert(cell))
    }

    pub fn contains(&self, cell: &CellVector) -> bool {
        self.cells.contains(cell)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Iterates in lexicographic coordinate order.
    pub fn iter(&self) -> btree_set::Iter<'_, CellVector> {
        self.cells.iter()
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.cells.is_subset(&other.cells)
    }

    /// Smallest and largest coordinate along `axis`, or `None` when empty.
    pub fn extent(&self, axis: usize) -> Result<Option<(i64, i64)>> {
        check_axis(axis, self.dim)?;
        let mut range: Option<(i64, i64)> = None;
        for cell in &self.cells {
            let c = cell.coord(axis);
            range = Some(match range {
                None => (c, c),
                Some((lo, hi)) => (lo.min(c), hi.max(c)),
            });
        }
        Ok(range)
    }
}

impl<'a> IntoIterator for &'a CellSet {
    type Item = &'a CellVector;
    type IntoIter = btree_set::Iter<'a, CellVector>;

    fn into_iter(self) -> Self::IntoIter {
        self.cells.iter()
    }
}

/// Enumerates `B_k(V) = { u : ∃v∈V, |u − v| ≤ k }`, sorted lexicographically.
///
/// The base set must be nonempty: the union over an empty base is undefined
/// rather than empty, and asking for it is always a caller bug.
pub fn ball_enumerate(k: u32, base: &CellSet) -> Result<CellSet> {
    if base.is_empty() {
        return Err(Error::EmptyCellSet);
    }
    let dim = base.dim();
    let k = i64::from(k);
    let mut out = CellSet::new(dim)?;
    let mut offset = vec![-k; dim];
    loop {
        for v in base.iter() {
            let coords: Vec<i64> = v
                .coords()
                .iter()
                .zip(&offset)
                .map(|(c, o)| c + o)
                .collect();
            out.insert(CellVector { coords })?;
        }
        // Odometer over the cube [-k, k]^dim, last coordinate fastest.
        let mut i = dim;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if offset[i] < k {
                offset[i] += 1;
                break;
            }
            offset[i] = -k;
        }
    }
}

/// An infinite tower region: the `B_k`-widening of all axis-`j` lines through
/// the base cells. Represented by descriptor plus membership test only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerDescriptor {
    axis: usize,
    width: u32,
    base: CellSet,
}

impl TowerDescriptor {
    pub fn new(axis: usize, width: u32, base: CellSet) -> Result<TowerDescriptor> {
        check_axis(axis, base.dim())?;
        Ok(TowerDescriptor { axis, width, base })
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn base(&self) -> &CellSet {
        &self.base
    }

    /// Membership test: `u` is in the tower iff some base cell is within
    /// distance `width` of `u` in every coordinate other than the tower axis.
    /// The axis-`j` coordinate is unconstrained: widening a full line along
    /// `j` by `B_width` still spans all of `ℤ` in that direction.
    pub fn contains(&self, u: &CellVector) -> Result<bool> {
        check_dim(self.base.dim(), u.dim())?;
        let w = i64::from(self.width);
        Ok(self.base.iter().any(|v| {
            u.coords()
                .iter()
                .zip(v.coords())
                .enumerate()
                .all(|(i, (a, b))| i == self.axis || (a - b).abs() <= w)
        }))
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn check_axis(axis: usize, dim: usize) -> Result<()> {
    if axis < dim {
        Ok(())
    } else {
        Err(Error::AxisOutOfRange { axis, dim })
    }
}
