//! Edge-colored bipartite graphs attached to tuples of permutations and to
//! pairs of tuples, and the invariants controlling the large-N hierarchy:
//! face counts, degree, c-degree, genus, melonic tests, `Δ`, the incidence
//! graph `G_Δ`, the chain-quadrangle reduction and the `Box` quantities.
//!
//! Colors inside a [`ColoredGraph`] are 0-based.  For the graph of a tuple
//! `σ ∈ S_n^D` (see [`SigmaGraph`]) colors `0..D` carry `σ_1..σ_D` and color `D`
//! is the "thick" color joining white and black vertex of the same label.
//! For the graph of a pair (see [`PairGraph`]) color `0` is the dashed color,
//! colors `1..=D` carry the tuples and color `D+1` is thick.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::perm::{check_same_n, noncrossing_on, PermTuple, Permutation, UnionFind};

/// A half-integer stored as twice its value, so arithmetic stays exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    pub fn from_int(v: i64) -> Self {
        Self(2 * v)
    }

    /// The half-integer `doubled / 2`.
    pub fn from_doubled(doubled: i64) -> Self {
        Self(doubled)
    }

    pub fn doubled(self) -> i64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_integer(self) -> Option<i64> {
        self.is_integer().then_some(self.0 / 2)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

/// A bipartite graph with `n` white and `n` black vertices in which every
/// vertex carries exactly one edge of each of the `q` colors.  Color `c` is a
/// perfect matching, stored as the map white ↦ black.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColoredGraph {
    q: usize,
    matchings: Vec<Vec<usize>>,
}

/// Degree data of a colored graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeReport {
    pub omega: HalfInt,
    /// `omega_c[c]` is the c-degree.
    pub omega_c: Vec<HalfInt>,
    /// Face counts keyed by color pairs `(c1, c2)` with `c1 < c2`.
    pub faces: BTreeMap<(usize, usize), usize>,
    pub components: usize,
}

/// Outcome of iterated melon removal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MelonReduction {
    /// Removed melons as `(white vertex, external color)`, in removal order;
    /// white indices refer to the original graph.
    pub removed: Vec<(usize, usize)>,
    /// True when the process ended on the two-vertex graph.
    pub reduced_to_elementary: bool,
}

impl ColoredGraph {
    /// Builds a graph from one white→black perfect matching per color.
    pub fn new(matchings: Vec<Vec<usize>>) -> Result<Self> {
        let Some(first) = matchings.first() else {
            return Err(Error::InvalidArgument("a colored graph needs at least one color".into()));
        };
        let n = first.len();
        if n == 0 {
            return Err(Error::InvalidArgument("a colored graph needs vertices".into()));
        }
        for m in &matchings {
            check_same_n(n, m.len())?;
            Permutation::from_zero_based(m.clone())
                .map_err(|_| Error::InvalidArgument("a color class is not a perfect matching".into()))?;
        }
        Ok(Self { q: matchings.len(), matchings })
    }

    /// The graph with two vertices joined by `q` parallel edges.
    pub fn elementary(q: usize) -> Self {
        assert!(q >= 1);
        Self { q, matchings: vec![vec![0]; q] }
    }

    pub fn colors(&self) -> usize {
        self.q
    }

    /// Number of white (= number of black) vertices.
    pub fn half_vertex_count(&self) -> usize {
        self.matchings[0].len()
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.half_vertex_count()
    }

    /// Black partner of white vertex `w` along color `c`.
    pub fn partner(&self, w: usize, c: usize) -> usize {
        self.matchings[c][w]
    }

    /// All edges as `(white, black, color)`.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::with_capacity(self.q * self.half_vertex_count());
        for (c, m) in self.matchings.iter().enumerate() {
            for (w, &b) in m.iter().enumerate() {
                out.push((w, b, c));
            }
        }
        out
    }

    /// Component label of each white and each black vertex.
    fn union_find(&self) -> UnionFind {
        let n = self.half_vertex_count();
        let mut uf = UnionFind::new(2 * n);
        for m in &self.matchings {
            for (w, &b) in m.iter().enumerate() {
                uf.union(w, n + b);
            }
        }
        uf
    }

    /// Number of connected components `K`.
    pub fn components(&self) -> usize {
        self.union_find().count()
    }

    /// Faces (bicolored cycles) of colors `c1 ≠ c2`.
    pub fn faces(&self, c1: usize, c2: usize) -> usize {
        assert!(c1 != c2 && c1 < self.q && c2 < self.q);
        let n = self.half_vertex_count();
        let inv1 = invert(&self.matchings[c1]);
        // white w → black m2(w) → white m1⁻¹(m2(w))
        let step: Vec<usize> = (0..n).map(|w| inv1[self.matchings[c2][w]]).collect();
        Permutation::from_zero_based_unchecked(step).cycle_count()
    }

    /// Total number of faces `F`.
    pub fn face_count(&self) -> usize {
        let mut f = 0;
        for c1 in 0..self.q {
            for c2 in c1 + 1..self.q {
                f += self.faces(c1, c2);
            }
        }
        f
    }

    /// Faces containing color `c`, `F_c`.
    pub fn faces_with(&self, c: usize) -> usize {
        (0..self.q).filter(|&c2| c2 != c).map(|c2| self.faces(c, c2)).sum()
    }

    /// The graph with color `c` deleted (`G^ĉ`).
    pub fn without_color(&self, c: usize) -> Result<ColoredGraph> {
        if self.q < 2 || c >= self.q {
            return Err(Error::InvalidArgument(format!("cannot delete color {c} of a {}-colored graph", self.q)));
        }
        let mut matchings = self.matchings.clone();
        matchings.remove(c);
        Ok(ColoredGraph { q: self.q - 1, matchings })
    }

    /// Degree `ω = (q−1)K + (q−1)(q−2)V/4 − F`.
    pub fn degree(&self) -> HalfInt {
        let q = self.q as i64;
        let k = self.components() as i64;
        let v = self.vertex_count() as i64;
        let f = self.face_count() as i64;
        HalfInt::from_doubled(2 * (q - 1) * k + (q - 1) * (q - 2) * v / 2 - 2 * f)
    }

    /// c-degree `Ω_c = K + (q−2)V/2 − F_c`.
    pub fn c_degree(&self, c: usize) -> HalfInt {
        let q = self.q as i64;
        let k = self.components() as i64;
        let v = self.vertex_count() as i64;
        let fc = self.faces_with(c) as i64;
        HalfInt::from_doubled(2 * k + (q - 2) * v - 2 * fc)
    }

    pub fn degree_report(&self) -> DegreeReport {
        let mut faces = BTreeMap::new();
        for c1 in 0..self.q {
            for c2 in c1 + 1..self.q {
                faces.insert((c1, c2), self.faces(c1, c2));
            }
        }
        DegreeReport {
            omega: self.degree(),
            omega_c: (0..self.q).map(|c| self.c_degree(c)).collect(),
            faces,
            components: self.components(),
        }
    }

    /// Connected components as separate graphs (vertices renumbered in order).
    pub fn split_components(&self) -> Vec<ColoredGraph> {
        let n = self.half_vertex_count();
        let mut uf = self.union_find();
        let mut roots: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for w in 0..n {
            roots.entry(uf.find(w)).or_default().push(w);
        }
        let mut out = Vec::new();
        for whites in roots.values() {
            let mut blacks: Vec<usize> = whites.iter().map(|&w| self.matchings[0][w]).collect();
            blacks.sort_unstable();
            let bpos: BTreeMap<usize, usize> = blacks.iter().enumerate().map(|(k, &b)| (b, k)).collect();
            let matchings = self
                .matchings
                .iter()
                .map(|m| whites.iter().map(|&w| bpos[&m[w]]).collect())
                .collect();
            out.push(ColoredGraph { q: self.q, matchings });
        }
        out
    }

    /// Iteratively removes melons (a white and a black vertex joined by
    /// `q−1` parallel edges), reconnecting the two dangling edges of the
    /// remaining color, until none is left.
    pub fn melon_reduction(&self) -> Result<MelonReduction> {
        let k = self.components();
        if k != 1 {
            return Err(Error::Disconnected { components: k });
        }
        let n = self.half_vertex_count();
        let q = self.q;
        let mut m = self.matchings.clone();
        let mut inv: Vec<Vec<usize>> = m.iter().map(|x| invert(x)).collect();
        let mut alive = vec![true; n];
        let mut alive_count = n;
        let mut removed = Vec::new();
        'outer: loop {
            if alive_count == 1 {
                return Ok(MelonReduction { removed, reduced_to_elementary: true });
            }
            for w in 0..n {
                if !alive[w] {
                    continue;
                }
                // candidate black partners: a melon needs q−1 of the q colors to agree
                for &b in &[m[0][w], m[q.min(2) - 1][w]] {
                    let agree: Vec<bool> = (0..q).map(|c| m[c][w] == b).collect();
                    let hits = agree.iter().filter(|&&x| x).count();
                    if q >= 2 && hits == q - 1 {
                        let c = agree.iter().position(|&x| !x).unwrap();
                        let b_out = m[c][w];
                        let w_in = inv[c][b];
                        m[c][w_in] = b_out;
                        inv[c][b_out] = w_in;
                        alive[w] = false;
                        alive_count -= 1;
                        removed.push((w, c));
                        continue 'outer;
                    }
                }
            }
            return Ok(MelonReduction { removed, reduced_to_elementary: false });
        }
    }

    /// Melonic test for a connected graph.  For `q > 3` the graph is melonic
    /// iff melon removal reaches the two-vertex graph (equivalently, the
    /// degree vanishes); for `q ≤ 3` vanishing degree (planarity when `q = 3`)
    /// is used.
    pub fn is_melonic(&self) -> Result<bool> {
        let k = self.components();
        if k != 1 {
            return Err(Error::Disconnected { components: k });
        }
        if self.q <= 3 {
            return Ok(self.degree() == HalfInt::ZERO);
        }
        Ok(self.melon_reduction()?.reduced_to_elementary)
    }

    /// Graphviz rendering: white vertices `w{i}`, black vertices `b{i}`, edge
    /// colors as `color` attributes (numeric).
    pub fn to_dot(&self, name: &str) -> String {
        let n = self.half_vertex_count();
        let mut s = format!("graph {name} {{\n");
        for i in 0..n {
            s.push_str(&format!("  w{i} [label=\"{}\", shape=circle];\n", i + 1));
            s.push_str(&format!("  b{i} [label=\"{}\", shape=circle, style=filled, fillcolor=black, fontcolor=white];\n", i + 1));
        }
        for (w, b, c) in self.edges() {
            s.push_str(&format!("  w{w} -- b{b} [color_index={c}, label=\"{c}\"];\n"));
        }
        s.push_str("}\n");
        s
    }
}

fn invert(m: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; m.len()];
    for (i, &v) in m.iter().enumerate() {
        inv[v] = i;
    }
    inv
}

/// The `(D+1)`-colored graph of a tuple `σ ∈ S_n^D`: white vertex `s` is
/// joined to black vertex `σ_c(s)` by color `c` and to black vertex `s` by the
/// thick color `D`.
#[derive(Clone, Debug)]
pub struct SigmaGraph {
    pub tuple: PermTuple,
    pub graph: ColoredGraph,
}

impl SigmaGraph {
    pub fn new(tuple: &PermTuple) -> Self {
        let n = tuple.n();
        let mut matchings: Vec<Vec<usize>> = tuple.perms().iter().map(|p| p.as_zero_based().to_vec()).collect();
        matchings.push((0..n).collect());
        Self { tuple: tuple.clone(), graph: ColoredGraph { q: tuple.d() + 1, matchings } }
    }

    /// Index of the thick color.
    pub fn thick_color(&self) -> usize {
        self.tuple.d()
    }
}

/// The `(D+2)`-colored graph of a pair `(σ, τ)` with `4n` vertices: the graph
/// of `σ` on the "A" vertices, the graph of `τ⁻¹` on the "B" vertices, and
/// dashed edges (color 0) joining white A to black B and black A to white B of
/// equal labels.
///
/// White vertices `0..n` are the A whites, `n..2n` the B whites; likewise for
/// black vertices.
#[derive(Clone, Debug)]
pub struct PairGraph {
    pub sigma: PermTuple,
    pub tau: PermTuple,
    pub graph: ColoredGraph,
}

impl PairGraph {
    pub fn new(sigma: &PermTuple, tau: &PermTuple) -> Result<Self> {
        sigma.check_shape(tau)?;
        let n = sigma.n();
        let d = sigma.d();
        let mut matchings = Vec::with_capacity(d + 2);
        // dashed: A-white s → B-black s, B-white s → A-black s
        matchings.push((0..2 * n).map(|w| if w < n { n + w } else { w - n }).collect());
        for c in 0..d {
            let s = sigma.get(c);
            let ti = tau.get(c).inverse();
            matchings.push((0..2 * n).map(|w| if w < n { s.at(w) } else { n + ti.at(w - n) }).collect());
        }
        matchings.push((0..2 * n).collect());
        Ok(Self { sigma: sigma.clone(), tau: tau.clone(), graph: ColoredGraph { q: d + 2, matchings } })
    }
}

fn check_pair(s: &PermTuple, t: &PermTuple) -> Result<()> {
    s.check_shape(t)
}

/// `#(σ_c)` summed over colors.
fn sum_cycles(t: &PermTuple) -> i64 {
    t.perms().iter().map(|p| p.cycle_count() as i64).sum()
}

/// `Σ_{c1<c2} #(σ_{c1} σ_{c2}⁻¹)`.
pub fn sum_pair_cycles(t: &PermTuple) -> i64 {
    let d = t.d();
    let mut acc = 0;
    for c1 in 0..d {
        for c2 in c1 + 1..d {
            acc += t.get(c1).compose_inverse_unchecked(t.get(c2)).cycle_count() as i64;
        }
    }
    acc
}

/// `|Π(s, t)|` for two single permutations.
pub(crate) fn pair_orbit_count(s: &Permutation, t: &Permutation) -> usize {
    let n = s.n();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        uf.union(i, s.at(i));
        uf.union(i, t.at(i));
    }
    uf.count()
}

fn joint_orbit_count(s: &PermTuple, t: &PermTuple) -> usize {
    let n = s.n();
    let mut uf = UnionFind::new(n);
    for p in s.perms().iter().chain(t.perms()) {
        for i in 0..n {
            uf.union(i, p.at(i));
        }
    }
    uf.count()
}

/// Degree of the graph of `σ` from permutation data:
/// `ω(σ) = D|Π(σ)| + nD(D−1)/2 − Σ_c #(σ_c) − Σ_{c1<c2} #(σ_{c1}σ_{c2}⁻¹)`.
pub fn sigma_degree(t: &PermTuple) -> HalfInt {
    let d = t.d() as i64;
    let n = t.n() as i64;
    let k = t.orbit_count() as i64;
    HalfInt::from_int(d * k + n * d * (d - 1) / 2 - sum_cycles(t) - sum_pair_cycles(t))
}

/// Thick-color c-degree of the graph of `σ`: `|Π(σ)| + n(D−1) − Σ_c #(σ_c)`.
pub fn sigma_c_degree(t: &PermTuple) -> HalfInt {
    let d = t.d() as i64;
    let n = t.n() as i64;
    HalfInt::from_int(t.orbit_count() as i64 + n * (d - 1) - sum_cycles(t))
}

/// Genus of the 3-colored graph of `(s, t)`:
/// `g = (n + 2|Π(s,t)| − #(st⁻¹) − #(s) − #(t))/2`, summed over components.
pub fn genus(s: &Permutation, t: &Permutation) -> Result<HalfInt> {
    check_same_n(s.n(), t.n())?;
    let n = s.n() as i64;
    let k = pair_orbit_count(s, t) as i64;
    let st = s.compose_inverse_unchecked(t).cycle_count() as i64;
    Ok(HalfInt::from_doubled(n + 2 * k - st - s.cycle_count() as i64 - t.cycle_count() as i64))
}

/// `(D+1)`-melonic test for a connected tuple: the thick c-degree vanishes.
pub fn is_cmelonic(t: &PermTuple) -> Result<bool> {
    let k = t.orbit_count();
    if k != 1 {
        return Err(Error::Disconnected { components: k });
    }
    Ok(sigma_c_degree(t) == HalfInt::ZERO)
}

/// Thick c-degree zero on every component (the possibly disconnected variant).
pub fn is_cmelonic_per_component(t: &PermTuple) -> bool {
    sigma_c_degree(t) == HalfInt::ZERO
}

/// `Δ(σ,τ) = n(D−1) + |Π(σ,τ)| − Σ_c |Π(σ_c,τ_c)|`.
pub fn delta(s: &PermTuple, t: &PermTuple) -> Result<usize> {
    check_pair(s, t)?;
    let d = s.d() as i64;
    let n = s.n() as i64;
    let k = joint_orbit_count(s, t) as i64;
    let per_color: i64 = (0..s.d()).map(|c| pair_orbit_count(s.get(c), t.get(c)) as i64).sum();
    let v = n * (d - 1) + k - per_color;
    debug_assert!(v >= 0);
    Ok(v as usize)
}

/// The incidence graph `G_Δ`: one round vertex per label, one cross vertex per
/// connected component of each `(σ_c, τ_c)`, a round vertex joined to the
/// cross vertices of the components containing its label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GDelta {
    pub round: usize,
    /// Cross vertices as `(color, 1-based block)`.
    pub cross: Vec<(usize, Vec<usize>)>,
    /// Edges `(round vertex, cross vertex index)`.
    pub edges: Vec<(usize, usize)>,
}

impl GDelta {
    pub fn vertex_count(&self) -> usize {
        self.round + self.cross.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn components(&self) -> usize {
        let mut uf = UnionFind::new(self.vertex_count());
        for &(r, x) in &self.edges {
            uf.union(r, self.round + x);
        }
        uf.count()
    }

    /// Cycle rank `E − V + K`.
    pub fn excess(&self) -> usize {
        self.edge_count() + self.components() - self.vertex_count()
    }

    pub fn is_forest(&self) -> bool {
        self.excess() == 0
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("graph {name} {{\n");
        for r in 0..self.round {
            s.push_str(&format!("  r{r} [label=\"{}\", shape=circle];\n", r + 1));
        }
        for (k, (c, block)) in self.cross.iter().enumerate() {
            let lab: Vec<String> = block.iter().map(|x| x.to_string()).collect();
            s.push_str(&format!("  x{k} [label=\"c{} {{{}}}\", shape=box];\n", c + 1, lab.join(",")));
        }
        for &(r, x) in &self.edges {
            s.push_str(&format!("  r{r} -- x{x};\n"));
        }
        s.push_str("}\n");
        s
    }
}

pub fn build_g_delta(s: &PermTuple, t: &PermTuple) -> Result<GDelta> {
    check_pair(s, t)?;
    let n = s.n();
    let mut cross = Vec::new();
    let mut edges = Vec::new();
    for c in 0..s.d() {
        let mut uf = UnionFind::new(n);
        for i in 0..n {
            uf.union(i, s.get(c).at(i));
            uf.union(i, t.get(c).at(i));
        }
        let part = uf.into_partition();
        let base = cross.len();
        for b in part.blocks() {
            cross.push((c, b));
        }
        for (x, lab) in part.block_labels().into_iter().enumerate() {
            edges.push((x, base + lab));
        }
    }
    edges.sort_unstable();
    Ok(GDelta { round: n, cross, edges })
}

/// `Δ = 0`, i.e. `G_Δ` is a forest.
pub fn is_delta_arborescent(s: &PermTuple, t: &PermTuple) -> Result<bool> {
    Ok(delta(s, t)? == 0)
}

/// One chain-quadrangle deletion: the label (1-based, in the pair current at
/// that step) and its external color (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deletion {
    pub label: usize,
    pub color: usize,
    /// The deletion split the external-color component of `(σ_c, τ_c)`
    /// without splitting the graph, lowering `Δ` by one.
    pub delta_drop: bool,
}

/// Sequence of deletions and the pair on which the reduction stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTrace {
    pub deletions: Vec<Deletion>,
    pub terminal_sigma: PermTuple,
    pub terminal_tau: PermTuple,
}

impl ReductionTrace {
    /// True when the terminal pair is a disjoint union of one-label
    /// `(id, id)` quadrangles.
    pub fn is_trivial_terminal(&self) -> bool {
        self.terminal_sigma.is_identity() && self.terminal_tau.is_identity()
    }

    /// Number of deletions that lowered `Δ`; `Δ(input) = delta_drops + Δ(terminal)`.
    pub fn delta_drops(&self) -> usize {
        self.deletions.iter().filter(|d| d.delta_drop).count()
    }
}

/// Removes the 0-based label `x` (fixed in every color but `c`) by splicing
/// it out of `p` and renumbering the labels above it.
fn splice_out(p: &Permutation, x: usize) -> Permutation {
    let n = p.n();
    let relabel = |z: usize| if z > x { z - 1 } else { z };
    let images = (0..n)
        .filter(|&y| y != x)
        .map(|y| {
            let img = if p.at(y) == x { p.at(x) } else { p.at(y) };
            relabel(img)
        })
        .collect();
    Permutation::from_zero_based_unchecked(images)
}

/// Repeatedly deletes chain-quadrangles — labels `x` with
/// `σ_{c'}(x) = τ_{c'}(x) = x` for every color `c' ≠ c` that are not already
/// isolated `(id, id)` quadrangles — choosing the smallest label first.
pub fn chain_quadrangle_reduce(s: &PermTuple, t: &PermTuple) -> Result<ReductionTrace> {
    check_pair(s, t)?;
    let d = s.d();
    let mut sig = s.clone();
    let mut tau = t.clone();
    let mut deletions = Vec::new();
    'outer: loop {
        let n = sig.n();
        if n == 1 {
            break;
        }
        for x in 0..n {
            let moving: Vec<usize> =
                (0..d).filter(|&c| sig.get(c).at(x) != x || tau.get(c).at(x) != x).collect();
            if moving.len() == 1 {
                let c = moving[0];
                let before = delta(&sig, &tau)?;
                sig = PermTuple::new_unchecked(sig.perms().iter().map(|p| splice_out(p, x)).collect());
                tau = PermTuple::new_unchecked(tau.perms().iter().map(|p| splice_out(p, x)).collect());
                let after = delta(&sig, &tau)?;
                debug_assert!(after == before || after + 1 == before);
                deletions.push(Deletion { label: x + 1, color: c, delta_drop: after < before });
                continue 'outer;
            }
        }
        break;
    }
    Ok(ReductionTrace { deletions, terminal_sigma: sig, terminal_tau: tau })
}

fn box_one_side(s: &PermTuple, t: &PermTuple, side: &PermTuple) -> Result<usize> {
    check_pair(s, t)?;
    let k = joint_orbit_count(s, t) as i64;
    let mut v = k - side.orbit_count() as i64;
    for c in 0..s.d() {
        v += side.get(c).cycle_count() as i64 - pair_orbit_count(s.get(c), t.get(c)) as i64;
    }
    debug_assert!(v >= 0, "Box must be non-negative");
    Ok(v as usize)
}

/// `Box_σ = |Π(σ,τ)| − |Π(σ)| + Σ_c (#(σ_c) − |Π(σ_c,τ_c)|)`.
pub fn box_sigma(s: &PermTuple, t: &PermTuple) -> Result<usize> {
    box_one_side(s, t, s)
}

/// `Box_τ`: the same with `τ` in place of `σ`.
pub fn box_tau(s: &PermTuple, t: &PermTuple) -> Result<usize> {
    box_one_side(s, t, t)
}

/// `Box = (Box_σ + Box_τ)/2`.
pub fn box_value(s: &PermTuple, t: &PermTuple) -> Result<HalfInt> {
    Ok(HalfInt::from_doubled((box_sigma(s, t)? + box_tau(s, t)?) as i64))
}

/// Outcome of the exhaustive search for connected `σ` admitting some `τ ⪯ σ`
/// with `Box_τ = 0` and `ω(τ) = 0`, but with `ω(σ) > 0`.
#[derive(Clone, Debug)]
pub struct MelonicSearch {
    pub d: usize,
    pub n: usize,
    /// Number of `(σ, τ)` pairs satisfying the hypotheses.
    pub pairs_checked: usize,
    pub counterexamples: Vec<(PermTuple, PermTuple)>,
}

/// Exhaustive search over connected `σ ∈ S_n^D` and `τ ⪯ σ` (componentwise)
/// for pairs with `Box_τ = 0`, `ω(τ) = 0` and `ω(σ) > 0`.
pub fn search_melonic_counterexamples(d: usize, n: usize) -> Result<MelonicSearch> {
    if (1..=n).product::<usize>().saturating_pow(d as u32) > 2_000_000 {
        return Err(Error::CapExceeded { what: "melonic counterexample search (n!)^D", requested: n, cap: 5 });
    }
    let mut pairs_checked = 0;
    let mut counterexamples = Vec::new();
    for sigma in PermTuple::all(n, d) {
        if !sigma.is_connected() {
            continue;
        }
        let options: Vec<Vec<Permutation>> = sigma.perms().iter().map(noncrossing_on).collect();
        let sigma_melonic = sigma_degree(&sigma) == HalfInt::ZERO;
        let mut idx = vec![0usize; d];
        loop {
            let tau = PermTuple::new_unchecked((0..d).map(|c| options[c][idx[c]].clone()).collect());
            if sigma_degree(&tau) == HalfInt::ZERO && box_tau(&sigma, &tau)? == 0 {
                pairs_checked += 1;
                if !sigma_melonic {
                    counterexamples.push((sigma.clone(), tau.clone()));
                }
            }
            let mut k = d;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < options[k].len() {
                    break;
                }
                idx[k] = 0;
            }
            if k == 0 && idx[0] == 0 {
                break;
            }
        }
    }
    Ok(MelonicSearch { d, n, pairs_checked, counterexamples })
}

/// CSV table `tuple,omega,omega_thick,components` for a list of tuples.
pub fn degree_table_csv(tuples: &[PermTuple]) -> String {
    let mut s = String::from("tuple,omega,omega_thick,components\n");
    for t in tuples {
        s.push_str(&format!(
            "\"{}\",{},{},{}\n",
            t,
            sigma_degree(t),
            sigma_c_degree(t),
            t.orbit_count()
        ));
    }
    s
}
