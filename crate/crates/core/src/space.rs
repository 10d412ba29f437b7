//! Finite measurable spaces, subsets as bitmasks, maps and their invariant sets.
//!
//! The σ-algebra is always the full power set of `{0, .., m-1}`. Everything
//! that quantifies over measurable sets enumerates `2^m` masks, so `m` is
//! capped at [`MAX_POINTS`]; brute-force paths are comfortable up to `m = 10`.

use std::fmt;

use crate::error::{Error, Result};
use crate::rational::lcm;

pub const MAX_POINTS: usize = 16;

/// A finite space `Ω = {0, .., size-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FiniteSpace {
    size: usize,
}

impl FiniteSpace {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || size > MAX_POINTS {
            return Err(Error::SpaceSize(size));
        }
        Ok(Self { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn empty(&self) -> SubsetMask {
        SubsetMask::empty(self.size)
    }

    pub fn full(&self) -> SubsetMask {
        SubsetMask::full(self.size)
    }

    /// All `2^m` subsets in increasing bit order.
    pub fn subsets(&self) -> impl Iterator<Item = SubsetMask> {
        subsets(self.size)
    }
}

/// All subsets of a space of `width` points in increasing bit order.
pub fn subsets(width: usize) -> impl Iterator<Item = SubsetMask> {
    let width_u8 = width as u8;
    (0..1u32 << width).map(move |bits| SubsetMask { bits, width: width_u8 })
}

/// A subset of a finite space, stored as a bit vector of the space's width.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask {
    bits: u32,
    width: u8,
}

impl SubsetMask {
    pub fn new(bits: u32, width: usize) -> Result<Self> {
        if width == 0 || width > MAX_POINTS {
            return Err(Error::SpaceSize(width));
        }
        if bits >> width != 0 {
            return Err(Error::MaskOutOfRange { bits, width });
        }
        Ok(Self { bits, width: width as u8 })
    }

    pub fn empty(width: usize) -> Self {
        assert!(width <= MAX_POINTS, "width {width} exceeds {MAX_POINTS}");
        Self { bits: 0, width: width as u8 }
    }

    pub fn full(width: usize) -> Self {
        assert!(width <= MAX_POINTS, "width {width} exceeds {MAX_POINTS}");
        Self { bits: ((1u64 << width) - 1) as u32, width: width as u8 }
    }

    pub fn singleton(width: usize, point: usize) -> Self {
        assert!(point < width, "point {point} outside width {width}");
        Self { bits: 1 << point, width: width as u8 }
    }

    pub fn from_points(width: usize, points: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = Self::new(0, width)?;
        for p in points {
            if p >= width {
                return Err(Error::PointOutOfRange { point: p, size: width });
            }
            mask.bits |= 1 << p;
        }
        Ok(mask)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Position of this subset in a `2^m` value table.
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn contains(&self, point: usize) -> bool {
        point < self.width() && self.bits >> point & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_full(&self) -> bool {
        *self == Self::full(self.width())
    }

    pub fn points(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.width()).filter(move |&p| self.contains(p))
    }

    pub fn min_point(&self) -> Option<usize> {
        (!self.is_empty()).then(|| self.bits.trailing_zeros() as usize)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.check_width(other);
        Self { bits: self.bits | other.bits, width: self.width }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.check_width(other);
        Self { bits: self.bits & other.bits, width: self.width }
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.check_width(other);
        Self { bits: self.bits & !other.bits, width: self.width }
    }

    pub fn complement(&self) -> Self {
        Self { bits: !self.bits & Self::full(self.width()).bits, width: self.width }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.check_width(other);
        self.bits & !other.bits == 0
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.check_width(other);
        self.bits & other.bits == 0
    }

    /// Subsets of `self`, including `∅` and `self`, in increasing bit order.
    pub fn subsets(&self) -> impl Iterator<Item = SubsetMask> + '_ {
        let width = self.width;
        let full = self.bits;
        // Walk submasks downward then reverse to get increasing order.
        let mut subs = Vec::with_capacity(1 << self.len());
        let mut sub = full;
        loop {
            subs.push(SubsetMask { bits: sub, width });
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & full;
        }
        subs.into_iter().rev()
    }

    fn check_width(&self, other: &Self) {
        assert_eq!(self.width, other.width, "subset widths differ");
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.points().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A map `T: Ω → Ω` given by its table, `table[ω] = Tω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transformation {
    table: Vec<usize>,
}

/// A periodic orbit of a map together with its cyclic order.
///
/// `points[0]` is the least point of the cycle and `points[k+1] = T(points[k])`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub mask: SubsetMask,
    pub points: Vec<usize>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Transformation {
    pub fn new(table: Vec<usize>) -> Result<Self> {
        let size = table.len();
        FiniteSpace::new(size)?;
        if let Some(&point) = table.iter().find(|&&p| p >= size) {
            return Err(Error::PointOutOfRange { point, size });
        }
        Ok(Self { table })
    }

    pub fn identity(size: usize) -> Result<Self> {
        Self::new((0..size).collect())
    }

    pub fn size(&self) -> usize {
        self.table.len()
    }

    pub fn space(&self) -> FiniteSpace {
        FiniteSpace { size: self.size() }
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, point: usize) -> usize {
        self.table[point]
    }

    /// `T^k ω`.
    pub fn iterate(&self, point: usize, k: usize) -> usize {
        (0..k).fold(point, |p, _| self.table[p])
    }

    /// `T^{-1}A = {ω : Tω ∈ A}`.
    pub fn preimage(&self, set: SubsetMask) -> SubsetMask {
        assert_eq!(set.width(), self.size(), "subset width differs from the space");
        let mut bits = 0u32;
        for (p, &image) in self.table.iter().enumerate() {
            if set.contains(image) {
                bits |= 1 << p;
            }
        }
        SubsetMask { bits, width: set.width }
    }

    /// `T(A) = {Tω : ω ∈ A}`.
    pub fn image(&self, set: SubsetMask) -> SubsetMask {
        assert_eq!(set.width(), self.size(), "subset width differs from the space");
        let mut bits = 0u32;
        for p in set.points() {
            bits |= 1 << self.table[p];
        }
        SubsetMask { bits, width: set.width }
    }

    pub fn is_invertible(&self) -> bool {
        let mut seen = vec![false; self.size()];
        for &p in &self.table {
            if std::mem::replace(&mut seen[p], true) {
                return false;
            }
        }
        true
    }

    /// Weakly connected components of the functional graph `ω → Tω`, ordered
    /// by least element.
    pub fn components(&self) -> Partition {
        let m = self.size();
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (p, &q) in self.table.iter().enumerate() {
            let (a, b) = (find(&mut parent, p), find(&mut parent, q));
            if a != b {
                // Keep the smaller root so roots are least elements.
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut cells: Vec<SubsetMask> = Vec::new();
        let mut cell_of_root = vec![usize::MAX; m];
        for p in 0..m {
            let root = find(&mut parent, p);
            if cell_of_root[root] == usize::MAX {
                cell_of_root[root] = cells.len();
                cells.push(SubsetMask::empty(m));
            }
            cells[cell_of_root[root]].bits |= 1 << p;
        }
        Partition { cells }
    }

    /// Every `A` with `T^{-1}A = A`: exactly the unions of components,
    /// sorted by bits.
    pub fn invariant_sets(&self) -> Vec<SubsetMask> {
        let components = self.components();
        let cells = components.cells();
        let mut sets: Vec<SubsetMask> = (0u32..1 << cells.len())
            .map(|choice| {
                cells
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| choice >> i & 1 == 1)
                    .fold(SubsetMask::empty(self.size()), |acc, (_, c)| acc.union(c))
            })
            .collect();
        sets.sort();
        debug_assert!(sets.iter().all(|&a| self.preimage(a) == a));
        sets
    }

    pub fn is_invariant_set(&self, set: SubsetMask) -> bool {
        self.preimage(set) == set
    }

    /// Periodic orbits, one per component and in component order.
    pub fn cycles(&self) -> Vec<Cycle> {
        let m = self.size();
        self.components()
            .cells()
            .iter()
            .map(|cell| {
                let start = cell.min_point().expect("components are nonempty");
                // After m steps every orbit sits on its cycle.
                let on_cycle = self.iterate(start, m);
                let mut points = vec![on_cycle];
                let mut p = self.apply(on_cycle);
                while p != on_cycle {
                    points.push(p);
                    p = self.apply(p);
                }
                let lead = points.iter().enumerate().min_by_key(|(_, &p)| p).map(|(i, _)| i).unwrap();
                points.rotate_left(lead);
                let mask = SubsetMask::from_points(m, points.iter().copied()).unwrap();
                Cycle { mask, points }
            })
            .collect()
    }

    /// Points lying on some cycle.
    pub fn cyclic_points(&self) -> SubsetMask {
        self.cycles().iter().fold(SubsetMask::empty(self.size()), |acc, c| acc.union(&c.mask))
    }

    /// Least common multiple of all cycle lengths; every eventually periodic
    /// sequence driven by `T` has a period dividing it.
    pub fn period(&self) -> usize {
        lcm(self.cycles().iter().map(Cycle::len))
    }

    /// `U ↦ U ∘ T`, composition of maps (`(self ∘ other)(ω) = self(other(ω))`).
    pub fn compose(&self, other: &Transformation) -> Transformation {
        assert_eq!(self.size(), other.size());
        Transformation { table: other.table.iter().map(|&p| self.table[p]).collect() }
    }
}

/// An ordered partition of `Ω` into nonempty, pairwise disjoint cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    cells: Vec<SubsetMask>,
}

impl Partition {
    pub fn new(cells: Vec<SubsetMask>) -> Result<Self> {
        let Some(first) = cells.first() else {
            return Err(Error::InvalidPartition("no cells".into()));
        };
        let width = first.width();
        let mut covered = SubsetMask::empty(width);
        for cell in &cells {
            if cell.width() != width {
                return Err(Error::InvalidPartition("cells of different widths".into()));
            }
            if cell.is_empty() {
                return Err(Error::InvalidPartition("empty cell".into()));
            }
            if !cell.is_disjoint(&covered) {
                return Err(Error::InvalidPartition(format!("cell {cell} overlaps an earlier cell")));
            }
            covered = covered.union(cell);
        }
        if !covered.is_full() {
            return Err(Error::InvalidPartition(format!("cells miss {}", covered.complement())));
        }
        Ok(Self { cells })
    }

    pub fn cells(&self) -> &[SubsetMask] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn width(&self) -> usize {
        self.cells[0].width()
    }

    pub fn cell_of(&self, point: usize) -> usize {
        self.cells.iter().position(|c| c.contains(point)).expect("partition covers the space")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(table: &[usize]) -> Transformation {
        Transformation::new(table.to_vec()).unwrap()
    }

    fn set(width: usize, points: &[usize]) -> SubsetMask {
        SubsetMask::from_points(width, points.iter().copied()).unwrap()
    }

    #[test]
    fn preimage_examples() {
        assert_eq!(map(&[1, 0, 3, 2]).preimage(set(4, &[0, 1])), set(4, &[0, 1]));
        assert_eq!(map(&[2, 2, 1, 0]).preimage(SubsetMask::full(4)), SubsetMask::full(4));
        assert_eq!(map(&[1, 2, 0, 0]).preimage(set(4, &[0])), set(4, &[2, 3]));
    }

    #[test]
    fn component_examples() {
        assert_eq!(map(&[1, 0, 3, 2]).components().cells(), &[set(4, &[0, 1]), set(4, &[2, 3])]);
        assert_eq!(map(&[1, 2, 3, 0]).components().cells(), &[SubsetMask::full(4)]);
        assert_eq!(map(&[0, 0, 3, 3]).components().cells(), &[set(4, &[0, 1]), set(4, &[2, 3])]);
        // Component order follows least elements even when roots are far apart.
        assert_eq!(map(&[3, 2, 1, 0]).components().cells(), &[set(4, &[0, 3]), set(4, &[1, 2])]);
    }

    #[test]
    fn invariant_set_examples() {
        assert_eq!(
            map(&[1, 0, 3, 2]).invariant_sets(),
            vec![set(4, &[]), set(4, &[0, 1]), set(4, &[2, 3]), set(4, &[0, 1, 2, 3])]
        );
        assert_eq!(map(&[1, 2, 3, 0]).invariant_sets(), vec![set(4, &[]), SubsetMask::full(4)]);
        assert_eq!(Transformation::identity(2).unwrap().invariant_sets().len(), 4);
    }

    #[test]
    fn cycle_examples() {
        let cycles = map(&[1, 0, 3, 2]).cycles();
        assert_eq!(cycles.iter().map(|c| c.points.clone()).collect::<Vec<_>>(), vec![vec![0, 1], vec![2, 3]]);
        let cycles = map(&[0, 0, 3, 3]).cycles();
        assert_eq!(cycles.iter().map(|c| c.points.clone()).collect::<Vec<_>>(), vec![vec![0], vec![3]]);
        let cycles = map(&[1, 2, 3, 0]).cycles();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].points, vec![0, 1, 2, 3]);
        // Cycle entered from a tail, listed from its least point.
        assert_eq!(map(&[1, 2, 3, 2]).cycles()[0].points, vec![2, 3]);
    }

    #[test]
    fn invertibility() {
        assert!(map(&[1, 0, 3, 2]).is_invertible());
        assert!(!map(&[0, 0, 3, 3]).is_invertible());
        assert!(map(&[1, 2, 3, 0]).is_invertible());
    }

    #[test]
    fn rejects_bad_tables() {
        assert_eq!(Transformation::new(vec![]), Err(Error::SpaceSize(0)));
        assert_eq!(Transformation::new(vec![0, 2]), Err(Error::PointOutOfRange { point: 2, size: 2 }));
        assert!(Transformation::new(vec![0; 17]).is_err());
        assert!(Transformation::new(vec![0; 16]).is_ok());
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![set(3, &[0]), set(3, &[1, 2])]).is_ok());
        assert!(Partition::new(vec![set(3, &[0, 1]), set(3, &[1, 2])]).is_err());
        assert!(Partition::new(vec![set(3, &[0])]).is_err());
        assert!(Partition::new(vec![set(3, &[0, 1, 2]), set(3, &[])]).is_err());
    }

    #[test]
    fn submask_enumeration() {
        let subs: Vec<_> = set(4, &[1, 3]).subsets().collect();
        assert_eq!(subs, vec![set(4, &[]), set(4, &[1]), set(4, &[3]), set(4, &[1, 3])]);
    }

    #[test]
    fn display() {
        assert_eq!(set(4, &[0, 2]).to_string(), "{0,2}");
        assert_eq!(SubsetMask::empty(3).to_string(), "{}");
    }
}
