//! Permutations, tuples of permutations, set partitions, the non-crossing
//! order on permutations, and the Moebius function of the non-crossing lattice.
//!
//! Permutations act on `{1..n}`.  The public API speaks 1-based one-line
//! notation (`"2,3,1"` maps 1→2, 2→3, 3→1); internally images are stored
//! 0-based so that composition and orbit code is plain index arithmetic.
//! Composition follows the functional convention `(s∘t)(i) = s(t(i))`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::{catalan, ExactRational};

/// A bijection of `{1..n}`, `n ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from 1-based one-line images.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        if images.iter().any(|&v| v == 0) {
            return Err(Error::InvalidPermutation(format!("{images:?}: images are 1-based")));
        }
        Self::from_zero_based(images.into_iter().map(|v| v - 1).collect())
    }

    /// Builds a permutation from 0-based images.
    pub fn from_zero_based(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty image list".into()));
        }
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return Err(Error::InvalidPermutation(format!(
                    "{:?} is not a bijection of 1..{n}",
                    images.iter().map(|x| x + 1).collect::<Vec<_>>()
                )));
            }
            seen[v] = true;
        }
        Ok(Self { images })
    }

    pub(crate) fn from_zero_based_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(Self::from_zero_based(images.clone()).is_ok());
        Self { images }
    }

    /// The identity of `S_n`.
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "permutations need n >= 1");
        Self { images: (0..n).collect() }
    }

    /// The cycle `(1 2 … n)`.
    pub fn long_cycle(n: usize) -> Self {
        assert!(n >= 1, "permutations need n >= 1");
        Self { images: (0..n).map(|i| (i + 1) % n).collect() }
    }

    /// Builds a permutation of `{1..n}` from disjoint 1-based cycles; unlisted
    /// points are fixed.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPermutation("n must be at least 1".into()));
        }
        let mut images: Vec<Option<usize>> = vec![None; n];
        for cyc in cycles {
            for (k, &x) in cyc.iter().enumerate() {
                let y = cyc[(k + 1) % cyc.len()];
                if x == 0 || x > n || y == 0 || y > n {
                    return Err(Error::InvalidPermutation(format!("cycle {cyc:?} leaves 1..{n}")));
                }
                if images[x - 1].is_some() {
                    return Err(Error::InvalidPermutation(format!("point {x} repeated in cycles")));
                }
                images[x - 1] = Some(y - 1);
            }
        }
        Self::from_zero_based(images.iter().enumerate().map(|(i, v)| v.unwrap_or(i)).collect())
    }

    /// Size of the ground set.
    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// Image of `i` (1-based in, 1-based out).
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1] + 1
    }

    /// Image of the 0-based point `i`, 0-based.
    #[inline]
    pub fn at(&self, i: usize) -> usize {
        self.images[i]
    }

    /// 1-based one-line images.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|v| v + 1).collect()
    }

    /// 0-based one-line images.
    pub fn as_zero_based(&self) -> &[usize] {
        &self.images
    }

    /// `s∘t`, i.e. `i ↦ s(t(i))`.
    pub fn compose(&self, t: &Permutation) -> Result<Permutation> {
        check_same_n(self.n(), t.n())?;
        Ok(self.compose_unchecked(t))
    }

    pub(crate) fn compose_unchecked(&self, t: &Permutation) -> Permutation {
        Permutation { images: t.images.iter().map(|&j| self.images[j]).collect() }
    }

    /// `s∘t⁻¹` without materialising the inverse.
    pub(crate) fn compose_inverse_unchecked(&self, t: &Permutation) -> Permutation {
        let mut images = vec![0; self.n()];
        for (i, &ti) in t.images.iter().enumerate() {
            // (s t⁻¹)(t(i)) = s(i)
            images[ti] = self.images[i];
        }
        Permutation { images }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.n()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v] = i;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Position of `self` in [`Permutation::all`] (Lehmer code).
    pub fn lex_rank(&self) -> usize {
        let n = self.n();
        let mut rank = 0;
        for i in 0..n {
            let smaller = self.images[i + 1..].iter().filter(|&&v| v < self.images[i]).count();
            rank = rank * (n - i) + smaller;
        }
        rank
    }

    /// Number of disjoint cycles `#(s)` (fixed points included).
    pub fn cycle_count(&self) -> usize {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x];
            }
        }
        count
    }

    /// True when the permutation is a single cycle of length `n`.
    pub fn is_full_cycle(&self) -> bool {
        self.cycle_count() == 1
    }

    /// Cycles as 1-based lists, each starting at its minimum, ordered by minimum.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        self.cycles_zero_based()
            .into_iter()
            .map(|c| c.into_iter().map(|x| x + 1).collect())
            .collect()
    }

    pub(crate) fn cycles_zero_based(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cyc.push(x);
                x = self.images[x];
            }
            out.push(cyc);
        }
        out
    }

    /// Numbers `d_p` of cycles of each length `p`.
    pub fn cycle_type(&self) -> CycleType {
        let mut d = BTreeMap::new();
        for c in self.cycles_zero_based() {
            *d.entry(c.len()).or_insert(0) += 1;
        }
        CycleType { d }
    }

    /// The partition of `{1..n}` into cycles.
    pub fn cycle_partition(&self) -> SetPartition {
        SetPartition::from_zero_based_blocks_unchecked(self.n(), self.cycles_zero_based())
    }

    /// `ρ∘s∘ρ⁻¹`: the same cycle structure with points relabelled by `ρ`.
    pub fn conjugate_by(&self, rho: &Permutation) -> Result<Permutation> {
        check_same_n(self.n(), rho.n())?;
        let mut images = vec![0; self.n()];
        for i in 0..self.n() {
            images[rho.images[i]] = rho.images[self.images[i]];
        }
        Ok(Permutation { images })
    }

    /// Restriction to an invariant subset (1-based, any order), relabelled
    /// increasingly onto `{1..|subset|}`.
    pub fn restrict(&self, subset: &[usize]) -> Result<Permutation> {
        let zero: Vec<usize> = subset.iter().map(|&x| x.wrapping_sub(1)).collect();
        self.restrict_zero_based(&zero)
    }

    pub(crate) fn restrict_zero_based(&self, subset: &[usize]) -> Result<Permutation> {
        let n = self.n();
        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != subset.len() || sorted.iter().any(|&x| x >= n) || sorted.is_empty() {
            return Err(Error::InvalidArgument(format!("bad restriction subset {subset:?}")));
        }
        let mut pos = vec![usize::MAX; n];
        for (k, &x) in sorted.iter().enumerate() {
            pos[x] = k;
        }
        let mut images = Vec::with_capacity(sorted.len());
        for &x in &sorted {
            let y = self.images[x];
            if pos[y] == usize::MAX {
                return Err(Error::InvalidArgument(format!(
                    "subset {:?} is not invariant",
                    sorted.iter().map(|v| v + 1).collect::<Vec<_>>()
                )));
            }
            images.push(pos[y]);
        }
        Ok(Permutation { images })
    }

    /// All of `S_n` in lexicographic order of one-line images.
    pub fn all(n: usize) -> Vec<Permutation> {
        assert!(n >= 1, "permutations need n >= 1");
        let mut cur: Vec<usize> = (0..n).collect();
        let mut out = vec![Permutation { images: cur.clone() }];
        while next_lex_permutation(&mut cur) {
            out.push(Permutation { images: cur.clone() });
        }
        out
    }

    /// Cycle notation such as `(1 2 3)(4)`.
    pub fn to_cycle_string(&self) -> String {
        self.cycles()
            .iter()
            .map(|c| format!("({})", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")))
            .collect()
    }
}

fn next_lex_permutation(a: &mut [usize]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

pub(crate) fn check_same_n(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::SizeMismatch { expected, found });
    }
    Ok(())
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(|v| (v + 1).to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for Permutation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let images = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad permutation entry {p:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(images)
    }
}

/// Cycle type: `d[p]` is the number of `p`-cycles.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType {
    pub d: BTreeMap<usize, usize>,
}

impl CycleType {
    /// Number of cycles of length `p`.
    pub fn count(&self, p: usize) -> usize {
        self.d.get(&p).copied().unwrap_or(0)
    }

    /// Total number of cycles.
    pub fn cycles(&self) -> usize {
        self.d.values().sum()
    }

    /// Size of the ground set, `Σ p·d_p`.
    pub fn n(&self) -> usize {
        self.d.iter().map(|(p, d)| p * d).sum()
    }
}

/// A `D`-tuple of permutations of the same `{1..n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermTuple {
    perms: Vec<Permutation>,
}

impl PermTuple {
    pub fn new(perms: Vec<Permutation>) -> Result<Self> {
        let Some(first) = perms.first() else {
            return Err(Error::InvalidArgument("a tuple needs at least one permutation".into()));
        };
        let n = first.n();
        for p in &perms {
            check_same_n(n, p.n())?;
        }
        Ok(Self { perms })
    }

    pub(crate) fn new_unchecked(perms: Vec<Permutation>) -> Self {
        debug_assert!(Self::new(perms.clone()).is_ok());
        Self { perms }
    }

    /// `(id, …, id)` in `S_n^D`.
    pub fn identity(n: usize, d: usize) -> Self {
        assert!(d >= 1, "tuples need D >= 1");
        Self { perms: vec![Permutation::identity(n); d] }
    }

    /// `(p, …, p)` with `D` copies.
    pub fn uniform(p: &Permutation, d: usize) -> Self {
        assert!(d >= 1, "tuples need D >= 1");
        Self { perms: vec![p.clone(); d] }
    }

    /// Number of colors `D`.
    pub fn d(&self) -> usize {
        self.perms.len()
    }

    pub fn n(&self) -> usize {
        self.perms[0].n()
    }

    /// Member of color `c` (0-based color index).
    pub fn get(&self, c: usize) -> &Permutation {
        &self.perms[c]
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn is_identity(&self) -> bool {
        self.perms.iter().all(Permutation::is_identity)
    }

    /// Position of `self` in [`PermTuple::all`] (last color varies fastest).
    pub fn lex_rank(&self) -> usize {
        let fact: usize = (1..=self.n()).product();
        self.perms.iter().fold(0, |acc, p| acc * fact + p.lex_rank())
    }

    /// True when all members are equal.
    pub fn is_uniform(&self) -> bool {
        self.perms.iter().all(|p| p == &self.perms[0])
    }

    pub fn inverse(&self) -> PermTuple {
        PermTuple { perms: self.perms.iter().map(Permutation::inverse).collect() }
    }

    /// `Π(σ)`: orbits of the group generated by all members.
    pub fn orbit_partition(&self) -> SetPartition {
        let n = self.n();
        let mut uf = UnionFind::new(n);
        for p in &self.perms {
            for i in 0..n {
                uf.union(i, p.images[i]);
            }
        }
        uf.into_partition()
    }

    /// `Π(σ, τ)`: orbits of the group generated by the members of both tuples.
    pub fn joint_orbit_partition(&self, other: &PermTuple) -> Result<SetPartition> {
        self.check_shape(other)?;
        let n = self.n();
        let mut uf = UnionFind::new(n);
        for p in self.perms.iter().chain(other.perms.iter()) {
            for i in 0..n {
                uf.union(i, p.images[i]);
            }
        }
        Ok(uf.into_partition())
    }

    /// Number of orbits `|Π(σ)|` (cheaper than building the partition).
    pub fn orbit_count(&self) -> usize {
        let n = self.n();
        let mut uf = UnionFind::new(n);
        for p in &self.perms {
            for i in 0..n {
                uf.union(i, p.images[i]);
            }
        }
        uf.count()
    }

    /// True when `|Π(σ)| = 1`.
    pub fn is_connected(&self) -> bool {
        self.orbit_count() == 1
    }

    /// Componentwise `ν_c = σ_c τ_c⁻¹`.
    pub fn ratios(&self, other: &PermTuple) -> Result<Vec<Permutation>> {
        self.check_shape(other)?;
        Ok(self
            .perms
            .iter()
            .zip(&other.perms)
            .map(|(s, t)| s.compose_inverse_unchecked(t))
            .collect())
    }

    /// Simultaneous relabelling `σ_c ↦ ρσ_cρ⁻¹`.
    pub fn conjugate_by(&self, rho: &Permutation) -> Result<PermTuple> {
        Ok(PermTuple {
            perms: self.perms.iter().map(|p| p.conjugate_by(rho)).collect::<Result<_>>()?,
        })
    }

    /// Restriction of every member to an invariant subset (0-based), relabelled.
    pub(crate) fn restrict_zero_based(&self, subset: &[usize]) -> Result<PermTuple> {
        Ok(PermTuple {
            perms: self.perms.iter().map(|p| p.restrict_zero_based(subset)).collect::<Result<_>>()?,
        })
    }

    /// Restriction to an invariant subset (1-based).
    pub fn restrict(&self, subset: &[usize]) -> Result<PermTuple> {
        let zero: Vec<usize> = subset.iter().map(|&x| x.wrapping_sub(1)).collect();
        self.restrict_zero_based(&zero)
    }

    /// Reorders the colors: member `c` of the result is member `order[c]` of `self`.
    pub fn permute_colors(&self, order: &[usize]) -> Result<PermTuple> {
        check_same_n(self.d(), order.len())?;
        Ok(PermTuple { perms: order.iter().map(|&c| self.perms[c].clone()).collect() })
    }

    pub fn check_shape(&self, other: &PermTuple) -> Result<()> {
        check_same_n(self.d(), other.d())?;
        check_same_n(self.n(), other.n())
    }

    /// Iterator over all of `S_n^D` in lexicographic order.
    pub fn all(n: usize, d: usize) -> TupleIter {
        TupleIter::new(Permutation::all(n), d)
    }
}

impl fmt::Display for PermTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.perms.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(";"))
    }
}

impl FromStr for PermTuple {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PermTuple::new(s.split(';').map(str::parse).collect::<Result<Vec<Permutation>>>()?)
    }
}

/// Odometer over `D`-tuples drawn from a fixed list of permutations.
pub struct TupleIter {
    base: Vec<Permutation>,
    idx: Vec<usize>,
    done: bool,
}

impl TupleIter {
    fn new(base: Vec<Permutation>, d: usize) -> Self {
        assert!(d >= 1, "tuples need D >= 1");
        Self { done: base.is_empty(), base, idx: vec![0; d] }
    }
}

impl Iterator for TupleIter {
    type Item = PermTuple;
    fn next(&mut self) -> Option<PermTuple> {
        if self.done {
            return None;
        }
        let item = PermTuple { perms: self.idx.iter().map(|&i| self.base[i].clone()).collect() };
        let mut k = self.idx.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.idx[k] += 1;
            if self.idx[k] < self.base.len() {
                break;
            }
            self.idx[k] = 0;
        }
        Some(item)
    }
}

/// A partition of `{1..n}` kept in canonical form: blocks sorted by their
/// minimum, elements ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    n: usize,
    /// 0-based elements.
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Validates 1-based blocks and canonicalises them.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut zero = Vec::with_capacity(blocks.len());
        for b in blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            let mut zb = Vec::with_capacity(b.len());
            for x in b {
                if x == 0 || x > n || seen[x - 1] {
                    return Err(Error::InvalidPartition(format!("element {x} out of range or repeated")));
                }
                seen[x - 1] = true;
                zb.push(x - 1);
            }
            zero.push(zb);
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidPartition(format!("blocks do not cover 1..{n}")));
        }
        Ok(Self::from_zero_based_blocks_unchecked(n, zero))
    }

    pub(crate) fn from_zero_based_blocks_unchecked(n: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Self { n, blocks }
    }

    /// Builds the partition whose blocks are the level sets of `labels`
    /// (element `i` is 0-based and carries an arbitrary block id).
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &l) in labels.iter().enumerate() {
            map.entry(l).or_default().push(i);
        }
        Self::from_zero_based_blocks_unchecked(labels.len(), map.into_values().collect())
    }

    /// `{{1},…,{n}}`.
    pub fn discrete(n: usize) -> Self {
        Self { n, blocks: (0..n).map(|i| vec![i]).collect() }
    }

    /// `{{1,…,n}}`.
    pub fn single_block(n: usize) -> Self {
        Self { n, blocks: vec![(0..n).collect()] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of blocks `|π|`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Blocks as 1-based lists.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.iter().map(|x| x + 1).collect()).collect()
    }

    /// `labels[i]` = index of the block containing the 0-based element `i`.
    pub fn block_labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.n];
        for (k, b) in self.blocks.iter().enumerate() {
            for &x in b {
                labels[x] = k;
            }
        }
        labels
    }

    /// Finest partition coarser than both.
    pub fn join(&self, other: &SetPartition) -> Result<SetPartition> {
        check_same_n(self.n, other.n)?;
        let mut uf = UnionFind::new(self.n);
        for b in self.blocks.iter().chain(other.blocks.iter()) {
            for w in b.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        Ok(uf.into_partition())
    }

    /// Coarsest partition finer than both.
    pub fn meet(&self, other: &SetPartition) -> Result<SetPartition> {
        check_same_n(self.n, other.n)?;
        let a = self.block_labels();
        let b = other.block_labels();
        let labels: Vec<usize> = (0..self.n).map(|i| a[i] * self.n + b[i]).collect();
        Ok(SetPartition::from_labels(&labels))
    }

    /// `self ≤ other`: every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &SetPartition) -> bool {
        if self.n != other.n {
            return false;
        }
        let lab = other.block_labels();
        self.blocks.iter().all(|b| b.iter().all(|&x| lab[x] == lab[b[0]]))
    }
}

impl fmt::Display for SetPartition {
    /// Blocks separated by `|`, e.g. `1,2|3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}", parts.join("|"))
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    count: usize,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n], count: n }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when two distinct classes were merged.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.count -= 1;
        true
    }

    pub(crate) fn count(&self) -> usize {
        self.count
    }

    pub(crate) fn into_partition(mut self) -> SetPartition {
        let n = self.parent.len();
        let labels: Vec<usize> = (0..n).map(|i| self.find(i)).collect();
        SetPartition::from_labels(&labels)
    }
}

/// All set partitions of `{0..k-1}` as restricted-growth strings
/// (`rgs[i]` = block of `i`, blocks numbered by first occurrence).
pub fn restricted_growth_strings(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut cur = vec![0usize; k];
    fn rec(i: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=max + 1 {
            cur[i] = v;
            rec(i + 1, max.max(v), cur, out);
        }
    }
    // element 0 is always in block 0
    rec(1, 0, &mut cur, &mut out);
    out
}

/// True when the blocks given by `labels` over cyclically ordered positions
/// `0..len` are pairwise non-crossing.
fn labels_noncrossing(labels: &[usize]) -> bool {
    let m = labels.len();
    // a < b < c < d with labels[a] = labels[c] ≠ labels[b] = labels[d]
    for a in 0..m {
        for b in a + 1..m {
            if labels[b] == labels[a] {
                continue;
            }
            for c in b + 1..m {
                if labels[c] != labels[a] {
                    continue;
                }
                for d in c + 1..m {
                    if labels[d] == labels[b] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// `t ⪯ s`: each cycle of `t` lies inside a cycle of `s`, and on every cycle
/// of `s`, read in the cyclic order induced by `s`, the cycles of `t` form a
/// non-crossing partition whose blocks are traversed in that same cyclic order.
pub fn is_noncrossing_on(t: &Permutation, s: &Permutation) -> Result<bool> {
    check_same_n(s.n(), t.n())?;
    let n = s.n();
    // position of each point along its s-cycle, and which s-cycle it lies on
    let mut pos = vec![0usize; n];
    let mut cyc_of = vec![0usize; n];
    let s_cycles = s.cycles_zero_based();
    for (k, cyc) in s_cycles.iter().enumerate() {
        for (p, &x) in cyc.iter().enumerate() {
            pos[x] = p;
            cyc_of[x] = k;
        }
    }
    for x in 0..n {
        if cyc_of[t.images[x]] != cyc_of[x] {
            return Ok(false);
        }
    }
    let t_cycles = t.cycles_zero_based();
    // each t-cycle must advance through increasing positions, wrapping once
    for cyc in &t_cycles {
        let len = cyc.len();
        if len <= 2 {
            continue;
        }
        let descents = (0..len).filter(|&i| pos[cyc[(i + 1) % len]] < pos[cyc[i]]).count();
        if descents != 1 {
            return Ok(false);
        }
    }
    let mut t_label = vec![0usize; n];
    for (k, cyc) in t_cycles.iter().enumerate() {
        for &x in cyc {
            t_label[x] = k;
        }
    }
    for cyc in &s_cycles {
        let labels: Vec<usize> = cyc.iter().map(|&x| t_label[x]).collect();
        if !labels_noncrossing(&labels) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Non-crossing partitions of `{0..m-1}` (cyclic order), as label vectors.
pub(crate) fn noncrossing_label_vectors(m: usize) -> Vec<Vec<usize>> {
    restricted_growth_strings(m).into_iter().filter(|l| labels_noncrossing(l)).collect()
}

/// Every `t` with `t ⪯ s`, in lexicographic order.  The count is the product
/// of Catalan numbers over the cycle lengths of `s`.
pub fn noncrossing_on(s: &Permutation) -> Vec<Permutation> {
    let n = s.n();
    let cycles = s.cycles_zero_based();
    let options: Vec<Vec<Vec<usize>>> = cycles.iter().map(|c| noncrossing_label_vectors(c.len())).collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; cycles.len()];
    loop {
        let mut images = vec![0usize; n];
        for (k, cyc) in cycles.iter().enumerate() {
            let labels = &options[k][choice[k]];
            // within a block, map each point to the next point of the block
            // along the cyclic order of `cyc`
            let m = cyc.len();
            for p in 0..m {
                let mut q = (p + 1) % m;
                while labels[q] != labels[p] {
                    q = (q + 1) % m;
                }
                images[cyc[p]] = cyc[q];
            }
        }
        out.push(Permutation { images });
        let mut k = cycles.len();
        loop {
            if k == 0 {
                out.sort();
                return out;
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < options[k].len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

/// Moebius function of the non-crossing lattice evaluated on the cycle type
/// of `v`: `∏_p [(−1)^{p−1} Cat_{p−1}]^{d_p(v)}`.  Always an integer.
pub fn moebius(v: &Permutation) -> ExactRational {
    let mut acc = ExactRational::one();
    for cyc in v.cycles_zero_based() {
        let p = cyc.len();
        let mut f = ExactRational::from_biguint(catalan(p - 1));
        if p % 2 == 0 {
            f = -f;
        }
        acc *= &f;
    }
    acc
}

#[cfg(test)]
mod tests {
    #[test]
    fn lex_rank_matches_enumeration_order() {
        for (k, p) in super::Permutation::all(4).iter().enumerate() {
            assert_eq!(p.lex_rank(), k);
        }
        for (k, t) in super::PermTuple::all(3, 2).enumerate() {
            assert_eq!(t.lex_rank(), k);
        }
    }

    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn cyc(n: usize, cycles: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(n, &cycles.iter().map(|c| c.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn compose_examples() {
        let s = p("2,3,1");
        assert_eq!(s.compose(&Permutation::identity(3)).unwrap(), s);
        let t_inv = cyc(3, &[&[1, 2]]).inverse();
        let r = cyc(3, &[&[1, 2, 3]]).compose(&t_inv).unwrap();
        assert_eq!(r.images(), vec![3, 2, 1]);
        let tr = cyc(2, &[&[1, 2]]);
        assert!(tr.compose(&tr).unwrap().is_identity());
        assert!(s.compose(&Permutation::identity(2)).is_err());
    }

    #[test]
    fn compose_inverse_shortcut_matches() {
        for s in Permutation::all(4) {
            for t in Permutation::all(4) {
                assert_eq!(s.compose_inverse_unchecked(&t), s.compose(&t.inverse()).unwrap());
            }
        }
    }

    #[test]
    fn inverse_examples() {
        assert!(Permutation::identity(4).inverse().is_identity());
        assert_eq!(cyc(3, &[&[1, 2, 3]]).inverse(), cyc(3, &[&[1, 3, 2]]));
        let t = cyc(3, &[&[1, 2]]);
        assert_eq!(t.inverse(), t);
    }

    #[test]
    fn cycle_counts_and_types() {
        assert_eq!(Permutation::identity(3).cycle_count(), 3);
        assert_eq!(cyc(3, &[&[1, 2, 3]]).cycle_count(), 1);
        assert_eq!(cyc(3, &[&[1, 2]]).cycle_count(), 2);
        assert_eq!(Permutation::identity(3).cycle_type().d, BTreeMap::from([(1, 3)]));
        assert_eq!(cyc(3, &[&[1, 2, 3]]).cycle_type().d, BTreeMap::from([(3, 1)]));
        assert_eq!(cyc(3, &[&[1, 2]]).cycle_type().d, BTreeMap::from([(1, 1), (2, 1)]));
    }

    #[test]
    fn orbit_partition_examples() {
        let t = PermTuple::new(vec![cyc(2, &[&[1, 2]]), Permutation::identity(2)]).unwrap();
        assert_eq!(t.orbit_partition(), SetPartition::single_block(2));
        assert_eq!(PermTuple::identity(2, 2).orbit_partition(), SetPartition::discrete(2));
        let t = PermTuple::new(vec![cyc(3, &[&[1, 2]]), cyc(3, &[&[2, 3]])]).unwrap();
        assert_eq!(t.orbit_partition(), SetPartition::single_block(3));
    }

    #[test]
    fn join_examples() {
        let a = SetPartition::new(3, vec![vec![1, 2], vec![3]]).unwrap();
        let b = SetPartition::new(3, vec![vec![2, 3], vec![1]]).unwrap();
        assert_eq!(a.join(&a).unwrap(), a);
        assert_eq!(SetPartition::discrete(3).join(&a).unwrap(), a);
        assert_eq!(a.join(&b).unwrap(), SetPartition::single_block(3));
        assert!(a.join(&SetPartition::discrete(2)).is_err());
    }

    #[test]
    fn partition_validation_and_canonical_form() {
        let a = SetPartition::new(3, vec![vec![3], vec![2, 1]]).unwrap();
        assert_eq!(a.blocks(), vec![vec![1, 2], vec![3]]);
        assert_eq!(a.to_string(), "1,2|3");
        assert!(SetPartition::new(3, vec![vec![1, 2]]).is_err());
        assert!(SetPartition::new(3, vec![vec![1, 2], vec![2, 3]]).is_err());
        assert!(SetPartition::new(2, vec![vec![1], vec![]]).is_err());
    }

    #[test]
    fn noncrossing_examples() {
        let s = Permutation::long_cycle(4);
        assert!(is_noncrossing_on(&s, &s).unwrap());
        assert!(is_noncrossing_on(&cyc(4, &[&[1, 3]]), &s).unwrap());
        assert!(!is_noncrossing_on(&cyc(4, &[&[1, 3], &[2, 4]]), &s).unwrap());
        // cycle orientation must follow s
        assert!(!is_noncrossing_on(&cyc(4, &[&[1, 3, 2]]), &s).unwrap());
        assert!(is_noncrossing_on(&cyc(4, &[&[1, 2, 3]]), &s).unwrap());
        // refinement of the cycles of s is required
        let s2 = cyc(4, &[&[1, 2], &[3, 4]]);
        assert!(!is_noncrossing_on(&cyc(4, &[&[1, 3]]), &s2).unwrap());
    }

    #[test]
    fn noncrossing_counts_are_catalan() {
        for n in 1..=6 {
            let s = Permutation::long_cycle(n);
            let brute = Permutation::all(n).into_iter().filter(|t| is_noncrossing_on(t, &s).unwrap()).count();
            let expected: usize = catalan(n).try_into().unwrap();
            assert_eq!(brute, expected, "n = {n}");
            assert_eq!(noncrossing_on(&s).len(), expected);
        }
    }

    #[test]
    fn noncrossing_generator_matches_filter_on_all_s() {
        for n in 1..=5 {
            let all = Permutation::all(n);
            for s in &all {
                let gen = noncrossing_on(s);
                let filt: Vec<_> = all.iter().filter(|t| is_noncrossing_on(t, s).unwrap()).cloned().collect();
                assert_eq!(gen, filt, "s = {s}");
            }
        }
    }

    #[test]
    fn moebius_examples() {
        assert_eq!(moebius(&Permutation::identity(4)), ExactRational::one());
        assert_eq!(moebius(&cyc(2, &[&[1, 2]])), ExactRational::from_integer(-1));
        assert_eq!(moebius(&cyc(3, &[&[1, 2, 3]])), ExactRational::from_integer(2));
        assert_eq!(moebius(&Permutation::long_cycle(4)), ExactRational::from_integer(-5));
    }

    #[test]
    fn parse_and_display() {
        let t: PermTuple = "2,3,1;2,1,3".parse().unwrap();
        assert_eq!(t.d(), 2);
        assert_eq!(t.to_string(), "2,3,1;2,1,3");
        assert!("2,2,1".parse::<Permutation>().is_err());
        assert!("0,1".parse::<Permutation>().is_err());
        assert!("2,1;1,2,3".parse::<PermTuple>().is_err());
        assert_eq!(p("2,3,1").to_cycle_string(), "(1 2 3)");
    }

    #[test]
    fn restriction_relabels_invariant_subsets() {
        let s = cyc(4, &[&[1, 3], &[2, 4]]);
        assert_eq!(s.restrict(&[1, 3]).unwrap(), cyc(2, &[&[1, 2]]));
        assert!(s.restrict(&[1, 2]).is_err());
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(Permutation::all(4).len(), 24);
        assert_eq!(PermTuple::all(3, 2).count(), 36);
        assert_eq!(restricted_growth_strings(4).len(), 15);
        assert_eq!(restricted_growth_strings(0).len(), 1);
    }
}
