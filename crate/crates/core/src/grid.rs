//! Multi-indexed mesh samples, time levels, stencils and mesh validity checks.

use std::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Integer label `(m, n)` of a mesh node: `m` counts space, `n` counts time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    pub m: i64,
    pub n: i64,
}

impl MultiIndex {
    pub const fn new(m: i64, n: i64) -> Self {
        Self { m, n }
    }
}

impl Add for MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: Self) -> Self {
        MultiIndex::new(self.m + rhs.m, self.n + rhs.n)
    }
}

/// Offsets used by every scheme and invariant: left, centre, right, next time.
pub const SCHEME_OFFSETS: [MultiIndex; 4] = [
    MultiIndex::new(-1, 0),
    MultiIndex::new(0, 0),
    MultiIndex::new(1, 0),
    MultiIndex::new(0, 1),
];

/// The triangle of offsets needed by the second order Taylor system.
pub const SECOND_ORDER_OFFSETS: [MultiIndex; 6] = [
    MultiIndex::new(0, 0),
    MultiIndex::new(1, 0),
    MultiIndex::new(0, 1),
    MultiIndex::new(2, 0),
    MultiIndex::new(1, 1),
    MultiIndex::new(0, 2),
];

/// Componentwise difference of two nodes, `(dx, dt, du)`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Triple<T> {
    pub x: T,
    pub t: T,
    pub u: T,
}

impl<T: Scalar> Triple<T> {
    pub fn new(x: T, t: T, u: T) -> Self {
        Self { x, t, u }
    }
}

impl<T: Scalar> Add for Triple<T> {
    type Output = Triple<T>;
    fn add(self, rhs: Self) -> Self {
        Triple::new(self.x + rhs.x, self.t + rhs.t, self.u + rhs.u)
    }
}

impl<T: Scalar> Sub for Triple<T> {
    type Output = Triple<T>;
    fn sub(self, rhs: Self) -> Self {
        Triple::new(self.x - rhs.x, self.t - rhs.t, self.u - rhs.u)
    }
}

/// One mesh sample `z = (x, t, u)` with its multi-index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node<T> {
    pub index: MultiIndex,
    pub x: T,
    pub t: T,
    pub u: T,
}

impl<T: Scalar> Node<T> {
    pub fn new(index: MultiIndex, x: T, t: T, u: T) -> Self {
        Self { index, x, t, u }
    }

    pub fn at(m: i64, n: i64, x: T, t: T, u: T) -> Self {
        Self::new(MultiIndex::new(m, n), x, t, u)
    }

    pub fn coords(&self) -> Triple<T> {
        Triple::new(self.x, self.t, self.u)
    }

    /// Same node with coordinates replaced.
    pub fn with_coords(&self, c: Triple<T>) -> Self {
        Self::new(self.index, c.x, c.t, c.u)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.t.is_finite() && self.u.is_finite()
    }
}

/// All nodes of one discrete time. Nodes share a single time value and are
/// ordered by `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeLevel<T> {
    n: i64,
    nodes: Vec<Node<T>>,
}

impl<T: Scalar> TimeLevel<T> {
    /// Builds a flat-time level at time `t` from abscissae and values.
    pub fn new(n: i64, t: T, xs: &[T], us: &[T]) -> Result<Self> {
        if xs.len() != us.len() {
            return Err(Error::misuse(format!(
                "level has {} abscissae but {} values",
                xs.len(),
                us.len()
            )));
        }
        if xs.is_empty() {
            return Err(Error::misuse("empty time level"));
        }
        let nodes = xs
            .iter()
            .zip(us)
            .enumerate()
            .map(|(m, (&x, &u))| Node::at(m as i64, n, x, t, u))
            .collect();
        Ok(Self { n, nodes })
    }

    /// Wraps arbitrary nodes without checking; run [`validate_level`] on the result.
    pub fn from_nodes(n: i64, nodes: Vec<Node<T>>) -> Self {
        Self { n, nodes }
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    /// Time of the level (time of the first node).
    pub fn t(&self) -> T {
        self.nodes[0].t
    }

    pub fn nodes(&self) -> &[Node<T>] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn xs(&self) -> Vec<T> {
        self.nodes.iter().map(|p| p.x).collect()
    }

    pub fn us(&self) -> Vec<T> {
        self.nodes.iter().map(|p| p.u).collect()
    }

    pub fn x_span(&self) -> T {
        match (self.nodes.first(), self.nodes.last()) {
            (Some(a), Some(b)) => b.x - a.x,
            _ => T::zero(),
        }
    }

    /// Smallest gap between neighbouring abscissae.
    pub fn min_spacing(&self) -> T {
        self.nodes
            .windows(2)
            .map(|w| w[1].x - w[0].x)
            .fold(T::infinity(), T::min)
    }

    /// Spacing `h` if the level is uniform to relative tolerance `rel_tol`.
    pub fn uniform_spacing(&self, rel_tol: T) -> Option<T> {
        if self.nodes.len() < 2 {
            return None;
        }
        let h = self.x_span() / T::of((self.nodes.len() - 1) as f64);
        let uniform = self
            .nodes
            .windows(2)
            .all(|w| ((w[1].x - w[0].x) - h).abs() <= rel_tol * h.abs());
        uniform.then_some(h)
    }
}

/// The evolving mesh: time levels in increasing time.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshHistory<T> {
    levels: Vec<TimeLevel<T>>,
}

impl<T: Scalar> MeshHistory<T> {
    pub fn new(initial: TimeLevel<T>) -> Self {
        Self { levels: vec![initial] }
    }

    pub fn push(&mut self, level: TimeLevel<T>) -> Result<()> {
        let last = self.last();
        if !(level.t() > last.t()) {
            return Err(Error::InvalidStep(format!(
                "level {} at t={} does not follow t={}",
                level.n(),
                level.t(),
                last.t()
            )));
        }
        self.levels.push(level);
        Ok(())
    }

    pub fn levels(&self) -> &[TimeLevel<T>] {
        &self.levels
    }

    pub fn first(&self) -> &TimeLevel<T> {
        &self.levels[0]
    }

    pub fn last(&self) -> &TimeLevel<T> {
        self.levels.last().expect("history is never empty")
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Local window of nodes keyed by their offset from the base node `(0, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Stencil<T> {
    entries: Vec<(MultiIndex, Node<T>)>,
}

impl<T: Scalar> Default for Stencil<T> {
    fn default() -> Self {
        Self { entries: Vec::new() }
    }
}

impl<T: Scalar> Stencil<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds or replaces the node at `offset`.
    pub fn with(mut self, offset: MultiIndex, node: Node<T>) -> Self {
        self.insert(offset, node);
        self
    }

    /// Adds a node at offset `(m, n)` with the given coordinates.
    pub fn with_point(self, m: i64, n: i64, x: T, t: T, u: T) -> Self {
        self.with(MultiIndex::new(m, n), Node::at(m, n, x, t, u))
    }

    pub fn insert(&mut self, offset: MultiIndex, node: Node<T>) {
        match self.entries.iter_mut().find(|(o, _)| *o == offset) {
            Some(slot) => slot.1 = node,
            None => self.entries.push((offset, node)),
        }
    }

    /// Node at `offset`, or an incomplete-stencil error.
    pub fn get(&self, offset: MultiIndex) -> Result<&Node<T>> {
        self.entries
            .iter()
            .find(|(o, _)| *o == offset)
            .map(|(_, p)| p)
            .ok_or(Error::IncompleteStencil(offset))
    }

    /// Shorthand for `get(MultiIndex::new(m, n))`.
    pub fn at(&self, m: i64, n: i64) -> Result<&Node<T>> {
        self.get(MultiIndex::new(m, n))
    }

    pub fn contains(&self, offset: MultiIndex) -> bool {
        self.entries.iter().any(|(o, _)| *o == offset)
    }

    pub fn require(&self, offsets: &[MultiIndex]) -> Result<()> {
        match offsets.iter().find(|o| !self.contains(**o)) {
            Some(&o) => Err(Error::IncompleteStencil(o)),
            None => Ok(()),
        }
    }

    pub fn entries(&self) -> &[(MultiIndex, Node<T>)] {
        &self.entries
    }

    /// Applies `f` to every node, keeping offsets.
    pub fn try_map<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&Node<T>) -> Result<Node<T>>,
    {
        let entries = self
            .entries
            .iter()
            .map(|(o, p)| Ok((*o, f(p)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }

    /// Every coordinate shifted by the constant `c`.
    pub fn shifted(&self, c: Triple<T>) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(o, p)| (*o, p.with_coords(p.coords() + c)))
            .collect();
        Self { entries }
    }

    /// Joint-product condition: no two nodes share the same `(x, t)`.
    pub fn has_distinct_points(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, (_, a))| {
            self.entries[i + 1..]
                .iter()
                .all(|(_, b)| a.x != b.x || a.t != b.t)
        })
    }

    /// Scheme stencil around node `m` of `level`, with `(0, 1)` taken from
    /// `next` when present. `m` must be an interior index.
    pub fn around(level: &TimeLevel<T>, m: usize, next: Option<&TimeLevel<T>>) -> Result<Self> {
        let nodes = level.nodes();
        if m == 0 || m + 1 >= nodes.len() {
            return Err(Error::misuse(format!(
                "node {m} is not interior to a level of {} nodes",
                nodes.len()
            )));
        }
        let mut st = Self::new()
            .with(MultiIndex::new(-1, 0), nodes[m - 1])
            .with(MultiIndex::new(0, 0), nodes[m])
            .with(MultiIndex::new(1, 0), nodes[m + 1]);
        if let Some(next) = next {
            let p = next.nodes().get(m).ok_or_else(|| {
                Error::misuse(format!("next level lacks node {m}"))
            })?;
            st.insert(MultiIndex::new(0, 1), *p);
        }
        Ok(st)
    }
}

/// Forward differences `Δz = z₁₀ − z₀₀` and `δz = z₀₁ − z₀₀`.
pub fn forward_diffs<T: Scalar>(st: &Stencil<T>) -> Result<(Triple<T>, Triple<T>)> {
    let base = st.at(0, 0)?.coords();
    let right = st.at(1, 0)?.coords();
    let up = st.at(0, 1)?.coords();
    Ok((right - base, up - base))
}

/// Problems found by [`validate_level`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LevelDiagnostics {
    /// Adjacent index pairs whose abscissae fail to increase by more than `eps`.
    pub tangled: Vec<(usize, usize)>,
    /// Nodes whose time differs from the first node's time.
    pub off_time: Vec<usize>,
    /// Nodes with a non-finite coordinate.
    pub non_finite: Vec<usize>,
}

impl LevelDiagnostics {
    pub fn is_clean(&self) -> bool {
        self.tangled.is_empty() && self.off_time.is_empty() && self.non_finite.is_empty()
    }
}

/// Scale-relative monotonicity tolerance, `1e-12 · (x_max − x_min)`.
pub fn default_eps<T: Scalar>(lv: &TimeLevel<T>) -> T {
    T::of(1e-12) * lv.x_span().abs()
}

/// Checks strict monotonicity in `x` and flat time, to tolerance `eps`.
pub fn validate_level<T: Scalar>(lv: &TimeLevel<T>, eps: T) -> Result<(), LevelDiagnostics> {
    let mut diag = LevelDiagnostics::default();
    let nodes = lv.nodes();
    for (i, p) in nodes.iter().enumerate() {
        if !p.is_finite() {
            diag.non_finite.push(i);
        }
    }
    for (i, w) in nodes.windows(2).enumerate() {
        if !(w[1].x - w[0].x > eps) {
            diag.tangled.push((i, i + 1));
        }
    }
    if let Some(first) = nodes.first() {
        for (i, p) in nodes.iter().enumerate() {
            if !((p.t - first.t).abs() <= eps) {
                diag.off_time.push(i);
            }
        }
    }
    if diag.is_clean() {
        Ok(())
    } else {
        Err(diag)
    }
}
