//! Finite topological spaces and continuous maps between them.
//!
//! Opens are stored explicitly as bitsets in a fixed order; every other
//! module refers to an open by its index in that order. In a finite space
//! the intersection of all opens containing a point is itself open, and
//! this minimal neighbourhood plays the role that germs play for general
//! spaces.

use std::fmt;

use thiserror::Error;

/// Largest supported point count (points are bits of a `u64`).
pub const MAX_POINTS: usize = 64;

/// Subset of the points `0..n`, one bit per point.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PointSet(pub u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_POINTS);
        if n == MAX_POINTS {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(x: usize) -> Self {
        PointSet(1u64 << x)
    }

    pub fn from_points<I: IntoIterator<Item = usize>>(points: I) -> Self {
        PointSet(points.into_iter().fold(0u64, |acc, p| acc | (1u64 << p)))
    }

    pub fn contains(self, x: usize) -> bool {
        x < MAX_POINTS && self.0 & (1u64 << x) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: Self) -> Self {
        PointSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        PointSet(self.0 & other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Points in increasing order.
    pub fn points(self) -> impl Iterator<Item = usize> {
        (0..MAX_POINTS).filter(move |&i| self.0 & (1u64 << i) != 0)
    }

    /// Position of `x` among the points of `self`, in increasing order.
    pub fn rank_of(self, x: usize) -> Option<usize> {
        self.contains(x).then(|| (self.0 & ((1u64 << x) - 1)).count_ones() as usize)
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.points().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", pts.join(","))
    }
}

/// A violated topology axiom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologyViolation {
    PointOutOfRange { open: usize, point: usize },
    MissingEmpty,
    MissingFull,
    Duplicate { first: usize, second: usize },
    MissingUnion { a: usize, b: usize, union: PointSet },
    MissingIntersection { a: usize, b: usize, intersection: PointSet },
}

impl fmt::Display for TopologyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PointOutOfRange { open, point } => write!(f, "open #{open} contains point {point} outside the space"),
            Self::MissingEmpty => write!(f, "the empty set is not listed as open"),
            Self::MissingFull => write!(f, "the full point set is not listed as open"),
            Self::Duplicate { first, second } => write!(f, "opens #{first} and #{second} are equal"),
            Self::MissingUnion { a, b, union } => write!(f, "union of opens #{a} and #{b} ({union:?}) is not open"),
            Self::MissingIntersection { a, b, intersection } => {
                write!(f, "intersection of opens #{a} and #{b} ({intersection:?}) is not open")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TopologyReport {
    pub violations: Vec<TopologyViolation>,
}

impl TopologyReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("too many points: {0} (at most {MAX_POINTS})")]
    TooManyPoints(usize),
    #[error("not a topology: {}", .0.violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidTopology(TopologyReport),
    #[error("map has {found} values but the domain has {expected} points")]
    WrongLength { expected: usize, found: usize },
    #[error("map value {value} at point {point} is outside the codomain")]
    ValueOutOfRange { point: usize, value: usize },
    #[error("map is not continuous: preimage of open #{open} is not open")]
    NotContinuous { open: usize },
}

/// A finite topological space with an explicit list of opens.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteSpace {
    point_count: usize,
    opens: Vec<PointSet>,
}

impl fmt::Debug for FiniteSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteSpace({} points, opens {:?})", self.point_count, self.opens)
    }
}

/// Checks every topology axiom on a candidate open list.
pub fn check_topology(point_count: usize, opens: &[PointSet]) -> TopologyReport {
    let mut violations = Vec::new();
    let full = PointSet::full(point_count.min(MAX_POINTS));
    for (i, o) in opens.iter().enumerate() {
        if let Some(p) = o.points().find(|&p| p >= point_count) {
            violations.push(TopologyViolation::PointOutOfRange { open: i, point: p });
        }
    }
    if !opens.contains(&PointSet::EMPTY) {
        violations.push(TopologyViolation::MissingEmpty);
    }
    if !opens.contains(&full) {
        violations.push(TopologyViolation::MissingFull);
    }
    for i in 0..opens.len() {
        for j in i + 1..opens.len() {
            if opens[i] == opens[j] {
                violations.push(TopologyViolation::Duplicate { first: i, second: j });
            }
        }
    }
    for i in 0..opens.len() {
        for j in i + 1..opens.len() {
            let u = opens[i].union(opens[j]);
            if !opens.contains(&u) {
                violations.push(TopologyViolation::MissingUnion { a: i, b: j, union: u });
            }
            let n = opens[i].intersection(opens[j]);
            if !opens.contains(&n) {
                violations.push(TopologyViolation::MissingIntersection { a: i, b: j, intersection: n });
            }
        }
    }
    TopologyReport { violations }
}

impl FiniteSpace {
    pub fn new(point_count: usize, opens: Vec<PointSet>) -> Result<Self, SpaceError> {
        if point_count > MAX_POINTS {
            return Err(SpaceError::TooManyPoints(point_count));
        }
        let report = check_topology(point_count, &opens);
        if !report.is_valid() {
            return Err(SpaceError::InvalidTopology(report));
        }
        Ok(Self { point_count, opens })
    }

    pub fn from_point_lists(point_count: usize, opens: &[Vec<usize>]) -> Result<Self, SpaceError> {
        Self::new(point_count, opens.iter().map(|o| PointSet::from_points(o.iter().copied())).collect())
    }

    /// All subsets, indexed by their bitmask value.
    pub fn discrete(n: usize) -> Self {
        assert!(n < MAX_POINTS, "discrete space too large to enumerate");
        Self { point_count: n, opens: (0..(1u64 << n)).map(PointSet).collect() }
    }

    pub fn indiscrete(n: usize) -> Self {
        let opens = if n == 0 {
            vec![PointSet::EMPTY]
        } else {
            vec![PointSet::EMPTY, PointSet::full(n)]
        };
        Self { point_count: n, opens }
    }

    /// `{∅, {0}, {0,1}}`.
    pub fn sierpinski() -> Self {
        Self { point_count: 2, opens: vec![PointSet(0), PointSet(0b01), PointSet(0b11)] }
    }

    pub fn point() -> Self {
        Self::indiscrete(1)
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    pub fn open_count(&self) -> usize {
        self.opens.len()
    }

    pub fn open(&self, index: usize) -> PointSet {
        self.opens[index]
    }

    pub fn index_of(&self, set: PointSet) -> Option<usize> {
        self.opens.iter().position(|&o| o == set)
    }

    pub fn full_set(&self) -> PointSet {
        PointSet::full(self.point_count)
    }

    pub fn full_index(&self) -> usize {
        self.index_of(self.full_set()).expect("validated space has the full set")
    }

    pub fn empty_index(&self) -> usize {
        self.index_of(PointSet::EMPTY).expect("validated space has the empty set")
    }

    pub fn check(&self) -> TopologyReport {
        check_topology(self.point_count, &self.opens)
    }

    pub fn is_discrete(&self) -> bool {
        (0..self.point_count).all(|x| self.index_of(PointSet::singleton(x)).is_some())
    }

    /// Smallest open containing `x`.
    pub fn minimal_open(&self, x: usize) -> usize {
        assert!(x < self.point_count, "point out of range");
        self.minimal_open_superset(PointSet::singleton(x))
    }

    /// Smallest open containing `set`: the intersection of all opens ⊇ `set`.
    pub fn minimal_open_superset(&self, set: PointSet) -> usize {
        assert!(set.is_subset_of(self.full_set()), "subset has points outside the space");
        let meet = self
            .opens
            .iter()
            .filter(|o| set.is_subset_of(**o))
            .fold(self.full_set(), |acc, &o| acc.intersection(o));
        self.index_of(meet).expect("finite intersections of opens are open")
    }

    /// Pairs `(u, v)` of open indices with `opens[v] ⊆ opens[u]`.
    pub fn inclusions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.opens.len()).flat_map(move |u| {
            (0..self.opens.len())
                .filter(move |&v| self.opens[v].is_subset_of(self.opens[u]))
                .map(move |v| (u, v))
        })
    }

    /// Open indices ordered by decreasing size, ties by index.
    pub fn opens_by_decreasing_size(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.opens.len()).collect();
        idx.sort_by_key(|&i| (std::cmp::Reverse(self.opens[i].len()), i));
        idx
    }
}

/// Checks that every preimage of an open is open; on failure returns the
/// index of the offending open of `codomain`.
pub fn is_continuous(values: &[usize], domain: &FiniteSpace, codomain: &FiniteSpace) -> Result<(), SpaceError> {
    if values.len() != domain.point_count() {
        return Err(SpaceError::WrongLength { expected: domain.point_count(), found: values.len() });
    }
    if let Some((point, &value)) = values.iter().enumerate().find(|(_, &v)| v >= codomain.point_count()) {
        return Err(SpaceError::ValueOutOfRange { point, value });
    }
    for (i, &v) in codomain.opens().iter().enumerate() {
        if domain.index_of(preimage_set(values, v)).is_none() {
            return Err(SpaceError::NotContinuous { open: i });
        }
    }
    Ok(())
}

fn preimage_set(values: &[usize], set: PointSet) -> PointSet {
    PointSet::from_points(values.iter().enumerate().filter(|(_, &y)| set.contains(y)).map(|(x, _)| x))
}

/// A continuous map of finite spaces, validated on construction.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ContinuousMap {
    domain: FiniteSpace,
    codomain: FiniteSpace,
    values: Vec<usize>,
}

impl ContinuousMap {
    pub fn new(domain: FiniteSpace, codomain: FiniteSpace, values: Vec<usize>) -> Result<Self, SpaceError> {
        is_continuous(&values, &domain, &codomain)?;
        Ok(Self { domain, codomain, values })
    }

    pub fn identity(space: &FiniteSpace) -> Self {
        Self { domain: space.clone(), codomain: space.clone(), values: (0..space.point_count()).collect() }
    }

    /// Constant map at `c`; always continuous.
    pub fn constant(domain: &FiniteSpace, codomain: &FiniteSpace, c: usize) -> Self {
        assert!(c < codomain.point_count(), "constant value outside the codomain");
        Self { domain: domain.clone(), codomain: codomain.clone(), values: vec![c; domain.point_count()] }
    }

    pub fn domain(&self) -> &FiniteSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteSpace {
        &self.codomain
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, x: usize) -> usize {
        self.values[x]
    }

    pub fn image_of(&self, set: PointSet) -> PointSet {
        PointSet::from_points(set.points().map(|x| self.values[x]))
    }

    /// Index in the domain of the preimage of the codomain open `v`.
    pub fn preimage_open(&self, v: usize) -> usize {
        self.domain
            .index_of(preimage_set(&self.values, self.codomain.open(v)))
            .expect("continuous map has open preimages")
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ContinuousMap) -> ContinuousMap {
        assert_eq!(self.codomain, other.domain, "maps are not composable");
        ContinuousMap {
            domain: self.domain.clone(),
            codomain: other.codomain.clone(),
            values: self.values.iter().map(|&y| other.values[y]).collect(),
        }
    }
}

/// Every map `domain → codomain` in lexicographic order of value tables.
pub fn all_point_maps(domain_size: usize, codomain_size: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(domain_size)];
    for _ in 0..domain_size {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..codomain_size).map(move |y| {
                    let mut p = prefix.clone();
                    p.push(y);
                    p
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(points: &[usize]) -> PointSet {
        PointSet::from_points(points.iter().copied())
    }

    #[test]
    fn topology_examples() {
        assert!(FiniteSpace::discrete(2).check().is_valid());
        assert!(FiniteSpace::sierpinski().check().is_valid());
        let report = check_topology(2, &[set(&[]), set(&[0]), set(&[1])]);
        assert!(!report.is_valid());
        assert!(report.violations.contains(&TopologyViolation::MissingFull));
        assert!(report
            .violations
            .contains(&TopologyViolation::MissingUnion { a: 1, b: 2, union: set(&[0, 1]) }));
    }

    #[test]
    fn minimal_open_examples() {
        let d = FiniteSpace::discrete(2);
        assert_eq!(d.open(d.minimal_open(0)), set(&[0]));
        let s = FiniteSpace::sierpinski();
        assert_eq!(s.open(s.minimal_open(1)), set(&[0, 1]));
        let i = FiniteSpace::indiscrete(3);
        assert_eq!(i.open(i.minimal_open(2)), set(&[0, 1, 2]));
    }

    #[test]
    fn minimal_open_superset_examples() {
        let s = FiniteSpace::sierpinski();
        assert_eq!(s.minimal_open_superset(set(&[1])), s.minimal_open(1));
        assert_eq!(s.open(s.minimal_open_superset(PointSet::EMPTY)), PointSet::EMPTY);
        assert_eq!(s.open(s.minimal_open_superset(set(&[0, 1]))), set(&[0, 1]));
    }

    #[test]
    fn continuity_examples() {
        let d2 = FiniteSpace::discrete(2);
        let d3 = FiniteSpace::discrete(3);
        for f in all_point_maps(2, 3) {
            assert!(is_continuous(&f, &d2, &d3).is_ok());
        }
        let s = FiniteSpace::sierpinski();
        for c in 0..2 {
            assert!(is_continuous(&[c, c, c], &FiniteSpace::indiscrete(3), &s).is_ok());
        }
        let err = is_continuous(&[0, 1], &FiniteSpace::indiscrete(2), &d2).unwrap_err();
        let SpaceError::NotContinuous { open } = err else { panic!("expected discontinuity") };
        assert_eq!(d2.open(open), set(&[0]));
    }

    #[test]
    fn preimage_examples() {
        let x = FiniteSpace::discrete(2);
        let s = FiniteSpace::sierpinski();
        let c = ContinuousMap::constant(&x, &s, 0);
        let v = s.index_of(set(&[0])).unwrap();
        assert_eq!(x.open(c.preimage_open(v)), x.full_set());
        let c1 = ContinuousMap::constant(&x, &s, 1);
        assert_eq!(x.open(c1.preimage_open(v)), PointSet::EMPTY);
        let id = ContinuousMap::identity(&s);
        for v in 0..s.open_count() {
            assert_eq!(id.preimage_open(v), v);
        }
    }

    /// Random finite topologies: close a random family under union and intersection.
    fn random_space() -> impl Strategy<Value = FiniteSpace> {
        (1usize..5).prop_flat_map(|n| {
            proptest::collection::vec(0u64..(1u64 << n), 0..4).prop_map(move |gens| {
                let mut opens = vec![PointSet::EMPTY, PointSet::full(n)];
                for g in gens {
                    if !opens.contains(&PointSet(g)) {
                        opens.push(PointSet(g));
                    }
                }
                loop {
                    let mut added = false;
                    let snapshot = opens.clone();
                    for a in &snapshot {
                        for b in &snapshot {
                            for c in [a.union(*b), a.intersection(*b)] {
                                if !opens.contains(&c) {
                                    opens.push(c);
                                    added = true;
                                }
                            }
                        }
                    }
                    if !added {
                        break;
                    }
                }
                opens.sort();
                FiniteSpace::new(n, opens).expect("closed family")
            })
        })
    }

    proptest! {
        #[test]
        fn minimal_open_is_least(space in random_space()) {
            for x in 0..space.point_count() {
                let m = space.open(space.minimal_open(x));
                prop_assert!(m.contains(x));
                for o in space.opens() {
                    if o.contains(x) {
                        prop_assert!(m.is_subset_of(*o));
                    }
                }
            }
        }

        #[test]
        fn continuous_maps_are_monotone(space in random_space(), target in random_space(), seed in any::<u64>()) {
            let n = space.point_count();
            let m = target.point_count();
            let values: Vec<usize> = (0..n).map(|i| ((seed >> (i * 8)) as usize) % m).collect();
            if let Ok(f) = ContinuousMap::new(space.clone(), target.clone(), values) {
                for x in 0..n {
                    let img = f.image_of(space.open(space.minimal_open(x)));
                    prop_assert!(img.is_subset_of(target.open(target.minimal_open(f.apply(x)))));
                }
                for a in 0..target.open_count() {
                    for b in 0..target.open_count() {
                        let u = target.index_of(target.open(a).union(target.open(b))).unwrap();
                        let i = target.index_of(target.open(a).intersection(target.open(b))).unwrap();
                        let (pa, pb) = (space.open(f.preimage_open(a)), space.open(f.preimage_open(b)));
                        prop_assert_eq!(space.open(f.preimage_open(u)), pa.union(pb));
                        prop_assert_eq!(space.open(f.preimage_open(i)), pa.intersection(pb));
                    }
                }
            }
        }
    }
}
