//! Exact leading-order cumulant coefficients `f[σ, τ]` and an independent
//! exact-Weingarten oracle for small orders.
//!
//! # Coefficient and sign convention
//!
//! With `ν_c = σ_c τ_c⁻¹`, the coefficient is a sum over families of
//! partitions `π_c ≥ Π(ν_c)` such that the block graph of
//! `(Π(σ,τ), {π_c}; {Π(ν_c)})` is a tree.  Each term is
//!
//! ```text
//! (−1)^{nD − Σ_c #(ν_c)} · ∏_p ((2p)!/(p!(p−1)!))^{Σ_c d_p(ν_c)}
//!                        · ∏_c ∏_{B ∈ π_c} (2|B| + #(ν_c|_B) − 3)! / (2|B|)!
//! ```
//!
//! This sign convention is the one reproduced by the exact oracle: the
//! connected Weingarten function assembled from exact Haar moments
//! ([`exact_connected_weingarten`]), rescaled by `N^{2nD − s(σ,τ)}`, converges
//! to this value for every pair with `n ≤ 3`, `D ≤ 2` (see the tests).  In
//! particular `f[id₂, id₂] = +1` at `D = 1`, and `f[id_n, id_n] =
//! 2^n (3n−3)!/(2n)! > 0` for all `n`.
//!
//! # Weingarten convention
//!
//! `Wg_N` is the class function inverse to the Gram function
//! `σ ↦ N^{#(σ)}` under convolution, `Σ_τ Wg_N(σ τ⁻¹) N^{#(τ)} = δ_{σ, id}`,
//! so that `Wg_N(id₁) = 1/N`, `Wg_N(id₂) = 1/(N²−1)` and
//! `Wg_N((12)) = −1/(N(N²−1))`.  Haar moments then read
//! `⟨[Tr(AUBU*)]^n⟩ = Σ_{σ,τ} Tr_σ(A) Tr_{τ⁻¹}(B) ∏_c Wg_N(σ_c τ_c⁻¹)`.

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{factorial, ExactRational};
use crate::perm::{check_same_n, moebius, restricted_growth_strings, PermTuple, Permutation, SetPartition, UnionFind};

/// Environment variable naming a directory where Weingarten tables are cached
/// as JSON between runs.
pub const CACHE_DIR_ENV: &str = "THCIZ_CACHE_DIR";

/// Default largest order for which exact Weingarten tables are computed.
pub const DEFAULT_WEINGARTEN_CAP: usize = 6;

/// Largest number of `(σ, τ)` terms [`exact_moment`] agrees to sum.
pub const MOMENT_TERM_CAP: usize = 50_000_000;

/// `D` partitions `π_c`, each coarser than the corresponding `Π(ν_c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionFamily {
    pis: Vec<SetPartition>,
}

impl PartitionFamily {
    /// Validates `π_c ≥ base_c` for every color.
    pub fn new(pis: Vec<SetPartition>, bases: &[SetPartition]) -> Result<Self> {
        check_same_n(bases.len(), pis.len())?;
        for (p, b) in pis.iter().zip(bases) {
            if !b.refines(p) {
                return Err(Error::NotRefinement(format!("{p} is not coarser than {b}")));
            }
        }
        Ok(Self { pis })
    }

    pub fn pis(&self) -> &[SetPartition] {
        &self.pis
    }
}

/// Number of excess edges (cycle rank) of the block graph with one square
/// vertex per block of `big`, one vertex per block of each `pis[c]`, and one
/// edge per block of `small[c]`:
/// `Σ_c|small_c| − Σ_c|pis_c| − |big| + |big ∨ pis_1 ∨ … ∨ pis_D|`.
pub fn partition_graph_excess(big: &SetPartition, pis: &[SetPartition], small: &[SetPartition]) -> Result<usize> {
    check_same_n(small.len(), pis.len())?;
    let mut join = big.clone();
    let mut edges = 0i64;
    let mut verts = big.len() as i64;
    for (p, s) in pis.iter().zip(small) {
        if !s.refines(big) {
            return Err(Error::NotRefinement(format!("{s} does not refine {big}")));
        }
        if !s.refines(p) {
            return Err(Error::NotRefinement(format!("{s} does not refine {p}")));
        }
        join = join.join(p)?;
        edges += s.len() as i64;
        verts += p.len() as i64;
    }
    Ok((edges - verts + join.len() as i64) as usize)
}

/// Every partition coarser than `base`, each exactly once.
pub fn enumerate_coarsenings(base: &SetPartition) -> impl Iterator<Item = SetPartition> + '_ {
    let blocks = base.blocks();
    restricted_growth_strings(blocks.len()).into_iter().map(move |rgs| {
        let parts = rgs.iter().copied().max().map_or(0, |m| m + 1);
        let mut merged: Vec<Vec<usize>> = vec![Vec::new(); parts];
        for (b, &g) in blocks.iter().zip(&rgs) {
            merged[g].extend(b.iter().copied());
        }
        SetPartition::new(base.n(), merged).expect("merging blocks keeps a partition")
    })
}

/// `s(σ, τ) = Σ_c #(σ_c τ_c⁻¹) − 2|Π(σ,τ)| + 2`: the power of `N` multiplying
/// `f[σ,τ] · N^{−2nD}` in the cumulant.
pub fn weingarten_exponent(s: &PermTuple, t: &PermTuple) -> Result<i64> {
    s.check_shape(t)?;
    let k = s.joint_orbit_partition(t)?.len() as i64;
    let cycles: i64 = (0..s.d()).map(|c| s.get(c).compose_inverse_unchecked(t.get(c)).cycle_count() as i64).sum();
    Ok(cycles - 2 * k + 2)
}

/// Product of non-crossing Moebius functions `∏_c M(σ_c τ_c⁻¹)`.
pub fn moebius_product(s: &PermTuple, t: &PermTuple) -> Result<ExactRational> {
    s.check_shape(t)?;
    Ok((0..s.d()).map(|c| moebius(&s.get(c).compose_inverse_unchecked(t.get(c)))).product())
}

/// Leading coefficient `f[σ, τ]`, with the transitive fast paths
/// (`σ = τ` ⇒ 1; otherwise the Moebius product).
pub fn leading_weingarten(s: &PermTuple, t: &PermTuple) -> Result<ExactRational> {
    s.check_shape(t)?;
    if s.joint_orbit_partition(t)?.len() == 1 {
        if s == t {
            return Ok(ExactRational::one());
        }
        return moebius_product(s, t);
    }
    leading_weingarten_general(s, t)
}

/// `(2|B| + k − 3)! / (2|B|)!` for a block of total size `size` made of `k` cycles.
fn block_weight(size: usize, k: usize) -> ExactRational {
    let num = factorial(2 * size + k - 3);
    let den = factorial(2 * size);
    ExactRational::new(BigInt::from(num), BigInt::from(den)).expect("factorials are positive")
}

/// The `π`-independent prefactor `(−1)^{nD − Σ#(ν_c)} ∏_p ((2p)!/(p!(p−1)!))^{Σ_c d_p(ν_c)}`.
fn cycle_prefactor(nus: &[Permutation]) -> ExactRational {
    let mut acc = ExactRational::one();
    let mut parity = 0usize;
    for nu in nus {
        for cyc in nu.cycles_zero_based() {
            let p = cyc.len();
            parity += p - 1;
            let v = factorial(2 * p) / (factorial(p) * factorial(p - 1));
            acc *= &ExactRational::from_biguint(v);
        }
    }
    if parity % 2 == 1 {
        acc = -acc;
    }
    acc
}

/// Restricted growth strings of `k` items grouped by their number of parts.
fn rgs_by_parts(k: usize) -> Arc<Vec<Vec<Vec<usize>>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<Vec<Vec<usize>>>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().expect("rgs cache poisoned").get(&k) {
        return v.clone();
    }
    let mut grouped = vec![Vec::new(); k + 1];
    for rgs in restricted_growth_strings(k) {
        let parts = rgs.iter().copied().max().map_or(0, |m| m + 1);
        grouped[parts].push(rgs);
    }
    let v = Arc::new(grouped);
    cache.lock().expect("rgs cache poisoned").insert(k, v.clone());
    v
}

/// One admissible grouping of the cycles of `ν_c`: group label per cycle and
/// the product of its block weights.
struct Grouping {
    labels: Vec<usize>,
    parts: usize,
    weight: ExactRational,
}

/// The general partition-sum evaluation of `f[σ, τ]`, valid for every pair.
pub fn leading_weingarten_general(s: &PermTuple, t: &PermTuple) -> Result<ExactRational> {
    s.check_shape(t)?;
    let d = s.d();
    let big = s.joint_orbit_partition(t)?;
    let big_label = big.block_labels();
    let k = big.len();
    let nus: Vec<Permutation> = (0..d).map(|c| s.get(c).compose_inverse_unchecked(t.get(c))).collect();
    let prefactor = cycle_prefactor(&nus);

    // per color: the Π-block of every ν_c cycle and the admissible groupings by merge count
    let mut cycle_blocks: Vec<Vec<usize>> = Vec::with_capacity(d);
    let mut groupings: Vec<Vec<Vec<Grouping>>> = Vec::with_capacity(d);
    for nu in &nus {
        let cycles = nu.cycles_zero_based();
        let m = cycles.len();
        cycle_blocks.push(cycles.iter().map(|cy| big_label[cy[0]]).collect());
        let by_parts = rgs_by_parts(m);
        let mut by_merges: Vec<Vec<Grouping>> = (0..m).map(|_| Vec::new()).collect();
        for parts in 1..=m {
            let merges = m - parts;
            if merges > k - 1 {
                continue;
            }
            for rgs in &by_parts[parts] {
                let mut size = vec![0usize; parts];
                let mut count = vec![0usize; parts];
                for (cy, &g) in cycles.iter().zip(rgs) {
                    size[g] += cy.len();
                    count[g] += 1;
                }
                let weight = (0..parts).map(|g| block_weight(size[g], count[g])).product();
                by_merges[merges].push(Grouping { labels: rgs.clone(), parts, weight });
            }
        }
        groupings.push(by_merges);
    }

    let mut total = ExactRational::zero();
    fn rec(
        c: usize,
        budget: usize,
        k: usize,
        chosen: &mut Vec<(usize, usize)>,
        groupings: &[Vec<Vec<Grouping>>],
        cycle_blocks: &[Vec<usize>],
        total: &mut ExactRational,
    ) {
        let d = groupings.len();
        if c == d {
            if budget != 0 {
                return;
            }
            // square vertices 0..k, then the groups of each color in turn
            let groups: usize = chosen.iter().enumerate().map(|(cc, &(m, i))| groupings[cc][m][i].parts).sum();
            let mut uf = UnionFind::new(k + groups);
            let mut offset = k;
            let mut weight = ExactRational::one();
            for (cc, &(m, i)) in chosen.iter().enumerate() {
                let g = &groupings[cc][m][i];
                for (cy, &lab) in g.labels.iter().enumerate() {
                    uf.union(cycle_blocks[cc][cy], offset + lab);
                }
                offset += g.parts;
                weight *= &g.weight;
            }
            if uf.count() == 1 {
                *total += weight;
            }
            return;
        }
        let max_merges = groupings[c].len().saturating_sub(1).min(budget);
        for m in 0..=max_merges {
            if c + 1 == d && m != budget {
                continue;
            }
            for i in 0..groupings[c][m].len() {
                chosen.push((m, i));
                rec(c + 1, budget - m, k, chosen, groupings, cycle_blocks, total);
                chosen.pop();
            }
        }
    }
    let mut chosen: Vec<(usize, usize)> = Vec::with_capacity(d);
    rec(0, k - 1, k, &mut chosen, &groupings, &cycle_blocks, &mut total);
    Ok(prefactor * total)
}

/// Slow reference evaluation of `f[σ, τ]` that enumerates partition families
/// with [`enumerate_coarsenings`] and tests them with
/// [`partition_graph_excess`].  Intended for cross-checks on small inputs.
pub fn leading_weingarten_by_families(s: &PermTuple, t: &PermTuple) -> Result<ExactRational> {
    s.check_shape(t)?;
    let d = s.d();
    let big = s.joint_orbit_partition(t)?;
    let nus: Vec<Permutation> = (0..d).map(|c| s.get(c).compose_inverse_unchecked(t.get(c))).collect();
    let smalls: Vec<SetPartition> = nus.iter().map(Permutation::cycle_partition).collect();
    let options: Vec<Vec<SetPartition>> = smalls.iter().map(|b| enumerate_coarsenings(b).collect()).collect();
    let mut total = ExactRational::zero();
    let mut idx = vec![0usize; d];
    loop {
        let pis: Vec<SetPartition> = (0..d).map(|c| options[c][idx[c]].clone()).collect();
        let family = PartitionFamily::new(pis, &smalls)?;
        let mut join = big.clone();
        for p in family.pis() {
            join = join.join(p)?;
        }
        if join.len() == 1 && partition_graph_excess(&big, family.pis(), &smalls)? == 0 {
            let mut w = ExactRational::one();
            for (c, p) in family.pis().iter().enumerate() {
                for block in p.blocks() {
                    let inside = smalls[c].blocks().into_iter().filter(|b| block.contains(&b[0])).count();
                    w *= &block_weight(block.len(), inside);
                }
            }
            total += w;
        }
        let mut c = d;
        let mut finished = true;
        while c > 0 {
            c -= 1;
            idx[c] += 1;
            if idx[c] < options[c].len() {
                finished = false;
                break;
            }
            idx[c] = 0;
        }
        if finished {
            break;
        }
    }
    Ok(cycle_prefactor(&nus) * total)
}

/// Closed form of the diagonal coefficient:
/// `f[σ, σ] = 2^{nD} Σ ∏_c ∏_{B ∈ π_c} (3|B|−3)!/(2|B|)!` over families `{π_c}`
/// with `|Π(σ) ∨ π_1 ∨ … ∨ π_D| = 1` and `Σ_c |π_c| = 1 + nD − |Π(σ)|`.
pub fn leading_weingarten_diagonal(s: &PermTuple) -> Result<ExactRational> {
    let n = s.n();
    let d = s.d();
    let big = s.orbit_partition();
    let big_label = big.block_labels();
    let k = big.len();
    let target = 1 + n * d - k;
    let all = restricted_growth_strings(n);
    let weights: Vec<(usize, ExactRational)> = all
        .iter()
        .map(|rgs| {
            let parts = rgs.iter().copied().max().map_or(0, |m| m + 1);
            let mut size = vec![0usize; parts];
            for &g in rgs {
                size[g] += 1;
            }
            let w = size
                .iter()
                .map(|&b| {
                    ExactRational::new(BigInt::from(factorial(3 * b - 3)), BigInt::from(factorial(2 * b)))
                        .expect("positive")
                })
                .product();
            (parts, w)
        })
        .collect();
    let mut total = ExactRational::zero();
    let mut idx = vec![0usize; d];
    loop {
        let parts: usize = idx.iter().map(|&i| weights[i].0).sum();
        if parts == target {
            let mut uf = UnionFind::new(k + parts);
            let mut offset = k;
            for &i in &idx {
                for (x, &g) in all[i].iter().enumerate() {
                    uf.union(big_label[x], offset + g);
                }
                offset += weights[i].0;
            }
            if uf.count() == 1 {
                total += idx.iter().map(|&i| weights[i].1.clone()).product::<ExactRational>();
            }
        }
        let mut c = d;
        let mut finished = true;
        while c > 0 {
            c -= 1;
            idx[c] += 1;
            if idx[c] < all.len() {
                finished = false;
                break;
            }
            idx[c] = 0;
        }
        if finished {
            break;
        }
    }
    let two_pow = ExactRational::int_pow(2, (n * d) as i64)?;
    Ok(two_pow * total)
}

/// Integer partitions of `n` in descending order, each descending.
fn integer_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Descending cycle lengths of `p`.
pub(crate) fn cycle_lengths(p: &Permutation) -> Vec<usize> {
    let mut v: Vec<usize> = p.cycles_zero_based().iter().map(Vec::len).collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

fn permutation_of_type(lengths: &[usize]) -> Permutation {
    let n: usize = lengths.iter().sum();
    let mut images = vec![0usize; n];
    let mut start = 0;
    for &l in lengths {
        for i in 0..l {
            images[start + i] = start + (i + 1) % l;
        }
        start += l;
    }
    Permutation::from_zero_based_unchecked(images)
}

/// Solves the square system `m · x = rhs` exactly by Gaussian elimination.
pub(crate) fn solve_exact(mut m: Vec<Vec<ExactRational>>, mut rhs: Vec<ExactRational>) -> Result<Vec<ExactRational>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or_else(|| Error::RankDeficient(format!("zero pivot in column {col}")))?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = m[col][col].recip()?;
        for j in col..n {
            m[col][j] = &m[col][j] * &inv;
        }
        rhs[col] = &rhs[col] * &inv;
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for j in col..n {
                    let delta = &factor * &m[col][j];
                    m[r][j] -= &delta;
                }
                let delta = &factor * &rhs[col];
                rhs[r] -= &delta;
            }
        }
    }
    Ok(rhs)
}

/// Exact values of `Wg_N` on every conjugacy class of `S_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeingartenTable {
    pub n: usize,
    pub dim: u64,
    /// Class (descending cycle lengths) → value.
    pub values: BTreeMap<Vec<usize>, ExactRational>,
}

#[derive(Serialize, Deserialize)]
struct CachedTable {
    n: usize,
    dim: u64,
    classes: Vec<(Vec<usize>, ExactRational)>,
}

impl WeingartenTable {
    /// Computes the table by solving the class-reduced Gram system
    /// `Σ_λ [Σ_{ρ ∈ C_λ} N^{#(ρ⁻¹ σ_μ)}] Wg(λ) = δ_{μ, id}` over the rationals.
    pub fn compute(n: usize, dim: u64, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("Weingarten order must be at least 1".into()));
        }
        if n > cap {
            return Err(Error::CapExceeded { what: "exact Weingarten order", requested: n, cap });
        }
        if dim < n as u64 {
            return Err(Error::InvalidArgument(format!("Weingarten function needs N >= n (N = {dim}, n = {n})")));
        }
        let classes = integer_partitions(n);
        let class_index: HashMap<Vec<usize>, usize> = classes.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let reps: Vec<Permutation> = classes.iter().map(|c| permutation_of_type(c)).collect();
        let p = classes.len();
        // counts[μ][λ][k] = #{ρ ∈ C_λ : #(ρ⁻¹σ_μ) = k}
        let mut counts = vec![vec![vec![0u64; n + 1]; p]; p];
        for rho in Permutation::all(n) {
            let lam = class_index[&cycle_lengths(&rho)];
            let rho_inv = rho.inverse();
            for (mu, rep) in reps.iter().enumerate() {
                let k = rho_inv.compose_unchecked(rep).cycle_count();
                counts[mu][lam][k] += 1;
            }
        }
        let powers: Vec<BigInt> = (0..=n).map(|k| num_traits::pow(BigInt::from(dim), k)).collect();
        let m: Vec<Vec<ExactRational>> = counts
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cnt| {
                        let v: BigInt = cnt.iter().zip(&powers).map(|(&c, pw)| BigInt::from(c) * pw).sum();
                        ExactRational::from(v)
                    })
                    .collect()
            })
            .collect();
        let id_class = class_index[&vec![1usize; n]];
        let rhs: Vec<ExactRational> =
            (0..p).map(|mu| if mu == id_class { ExactRational::one() } else { ExactRational::zero() }).collect();
        let sol = solve_exact(m, rhs)?;
        Ok(Self { n, dim, values: classes.into_iter().zip(sol).collect() })
    }

    /// Process-wide cached table, optionally persisted under `$THCIZ_CACHE_DIR`.
    pub fn cached(n: usize, dim: u64) -> Result<Arc<Self>> {
        Self::cached_with_cap(n, dim, DEFAULT_WEINGARTEN_CAP)
    }

    pub fn cached_with_cap(n: usize, dim: u64, cap: usize) -> Result<Arc<Self>> {
        type Cache = Mutex<HashMap<(usize, u64), Arc<WeingartenTable>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if n > cap {
            return Err(Error::CapExceeded { what: "exact Weingarten order", requested: n, cap });
        }
        if let Some(t) = cache.lock().expect("Weingarten cache poisoned").get(&(n, dim)) {
            return Ok(t.clone());
        }
        let table = match Self::load_from_disk(n, dim) {
            Some(t) => t,
            None => {
                let t = Self::compute(n, dim, cap)?;
                t.store_to_disk();
                t
            }
        };
        let table = Arc::new(table);
        cache.lock().expect("Weingarten cache poisoned").insert((n, dim), table.clone());
        Ok(table)
    }

    fn disk_path(n: usize, dim: u64) -> Option<PathBuf> {
        let dir = std::env::var_os(CACHE_DIR_ENV)?;
        Some(PathBuf::from(dir).join(format!("weingarten_n{n}_N{dim}.json")))
    }

    fn load_from_disk(n: usize, dim: u64) -> Option<Self> {
        let path = Self::disk_path(n, dim)?;
        let text = std::fs::read_to_string(path).ok()?;
        let cached: CachedTable = serde_json::from_str(&text).ok()?;
        (cached.n == n && cached.dim == dim)
            .then(|| Self { n, dim, values: cached.classes.into_iter().collect() })
    }

    /// Best effort: a failure to write the cache is not an error.
    fn store_to_disk(&self) {
        let Some(path) = Self::disk_path(self.n, self.dim) else { return };
        let cached = CachedTable {
            n: self.n,
            dim: self.dim,
            classes: self.values.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        };
        if let Some(parent) = path.parent() {
            let _ = std::fs::create_dir_all(parent);
        }
        if let Ok(text) = serde_json::to_string_pretty(&cached) {
            let _ = std::fs::write(path, text);
        }
    }

    /// Value on the class with the given descending cycle lengths.
    pub fn class_value(&self, lengths: &[usize]) -> Result<&ExactRational> {
        self.values
            .get(lengths)
            .ok_or_else(|| Error::InvalidArgument(format!("{lengths:?} is not a cycle type of S_{}", self.n)))
    }

    pub fn value(&self, p: &Permutation) -> Result<&ExactRational> {
        check_same_n(self.n, p.n())?;
        self.class_value(&cycle_lengths(p))
    }
}

/// Exact `Wg_N(p)`.
pub fn exact_weingarten(p: &Permutation, dim: u64) -> Result<ExactRational> {
    Ok(WeingartenTable::cached(p.n(), dim)?.value(p)?.clone())
}

/// Scalars that exact moment sums can be evaluated in.
pub trait MomentScalar: Clone + Send + Sync {
    fn zero() -> Self;
    fn from_rational(r: &ExactRational) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
}

impl MomentScalar for ExactRational {
    fn zero() -> Self {
        ExactRational::zero()
    }
    fn from_rational(r: &ExactRational) -> Self {
        r.clone()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl MomentScalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_rational(r: &ExactRational) -> Self {
        Complex64::new(r.to_f64(), 0.0)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl MomentScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_rational(r: &ExactRational) -> Self {
        r.to_f64()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

/// Values of a trace-invariant `Tr_σ(X)` for every `σ ∈ S_n^D`, stored in the
/// order of [`PermTuple::all`].
#[derive(Clone, Debug)]
pub struct TraceTable<T> {
    n: usize,
    d: usize,
    values: Vec<T>,
}

impl<T: Clone> TraceTable<T> {
    /// Fills the table by evaluating `f` on every tuple.
    pub fn from_fn(n: usize, d: usize, mut f: impl FnMut(&PermTuple) -> Result<T>) -> Result<Self> {
        let size = tuple_count(n, d)?;
        let mut values = Vec::with_capacity(size);
        for t in PermTuple::all(n, d) {
            values.push(f(&t)?);
        }
        Ok(Self { n, d, values })
    }

    /// Table from values listed in [`PermTuple::all`] order.
    pub fn from_values(n: usize, d: usize, values: Vec<T>) -> Result<Self> {
        check_same_n(tuple_count(n, d)?, values.len())?;
        Ok(Self { n, d, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, t: &PermTuple) -> Result<&T> {
        if t.n() != self.n || t.d() != self.d {
            return Err(Error::MissingInvariant(t.to_string()));
        }
        self.values.get(t.lex_rank()).ok_or_else(|| Error::MissingInvariant(t.to_string()))
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

fn tuple_count(n: usize, d: usize) -> Result<usize> {
    let fact: usize = (1..=n).product();
    fact.checked_pow(d as u32)
        .filter(|&v| v <= MOMENT_TERM_CAP)
        .ok_or(Error::CapExceeded { what: "tuple table size (n!)^D", requested: n, cap: MOMENT_TERM_CAP })
}

/// Exact Haar moment `⟨[Tr(AUBU*)]^n⟩ = Σ_{σ,τ} Tr_σ(A) Tr_{τ⁻¹}(B) ∏_c Wg_N(σ_c τ_c⁻¹)`.
/// Both tables hold `Tr_ρ(·)` for every `ρ`; the `B` table is read at `τ⁻¹`.
pub fn exact_moment<T: MomentScalar>(tr_a: &TraceTable<T>, tr_b: &TraceTable<T>, dim: u64) -> Result<T> {
    let n = tr_a.n;
    let d = tr_a.d;
    check_same_n(n, tr_b.n)?;
    check_same_n(d, tr_b.d)?;
    let size = tr_a.values.len();
    if size.saturating_mul(size) > MOMENT_TERM_CAP {
        return Err(Error::CapExceeded { what: "exact moment terms (n!)^{2D}", requested: size * size, cap: MOMENT_TERM_CAP });
    }
    let perms = Permutation::all(n);
    let m = perms.len();
    let table = WeingartenTable::cached(n, dim)?;
    let wg: Vec<T> = perms.iter().map(|p| table.value(p).map(T::from_rational)).collect::<Result<_>>()?;
    let inv: Vec<usize> = perms.iter().map(|p| p.inverse().lex_rank()).collect();
    // ratio[i][j] = rank of perms[i] ∘ perms[j]⁻¹
    let ratio: Vec<Vec<usize>> =
        perms.iter().map(|a| perms.iter().map(|b| a.compose_inverse_unchecked(b).lex_rank()).collect()).collect();
    let digits = |mut idx: usize| {
        let mut v = vec![0usize; d];
        for c in (0..d).rev() {
            v[c] = idx % m;
            idx /= m;
        }
        v
    };
    let all_digits: Vec<Vec<usize>> = (0..size).map(digits).collect();
    let b_at_inverse: Vec<&T> = all_digits
        .iter()
        .map(|dg| {
            let r = dg.iter().fold(0, |acc, &i| acc * m + inv[i]);
            &tr_b.values[r]
        })
        .collect();
    let mut total = T::zero();
    for (ia, da) in all_digits.iter().enumerate() {
        let a = &tr_a.values[ia];
        let mut inner = T::zero();
        for (ib, db) in all_digits.iter().enumerate() {
            let mut w = b_at_inverse[ib].clone();
            for c in 0..d {
                w = w.mul(&wg[ratio[da[c]][db[c]]]);
            }
            inner = inner.add(&w);
        }
        total = total.add(&a.mul(&inner));
    }
    Ok(total)
}

/// Cumulants `C_1..C_n` from raw moments `m_1..m_n` (`moments[k-1] = m_k`)
/// via `C_n = m_n − Σ_{k=1}^{n−1} binom(n−1, k−1) C_k m_{n−k}`.
pub fn cumulants_from_moments(moments: &[ExactRational]) -> Vec<ExactRational> {
    let mut c: Vec<ExactRational> = Vec::with_capacity(moments.len());
    for n in 1..=moments.len() {
        let mut v = moments[n - 1].clone();
        for k in 1..n {
            let b = ExactRational::from_biguint(crate::exact::binomial(n - 1, k - 1));
            v -= &(b * &c[k - 1] * &moments[n - k - 1]);
        }
        c.push(v);
    }
    c
}

/// Exact connected Weingarten weight of a pair,
/// `Σ_{π ≥ Π(σ,τ)} (−1)^{|π|−1}(|π|−1)! ∏_{B ∈ π} ∏_c Wg_N((σ_c τ_c⁻¹)|_B)`:
/// the exact coefficient of `Tr_σ(A) Tr_{τ⁻¹}(B)` in the `n`-th cumulant.
pub fn exact_connected_weingarten(s: &PermTuple, t: &PermTuple, dim: u64) -> Result<ExactRational> {
    s.check_shape(t)?;
    let big = s.joint_orbit_partition(t)?;
    let big_label = big.block_labels();
    let k = big.len();
    let nus: Vec<Permutation> = (0..s.d()).map(|c| s.get(c).compose_inverse_unchecked(t.get(c))).collect();
    // cycles of each ν_c with the Π-block they lie in
    let cyc: Vec<Vec<(usize, usize)>> = nus
        .iter()
        .map(|nu| nu.cycles_zero_based().iter().map(|cy| (big_label[cy[0]], cy.len())).collect())
        .collect();
    let block_size: Vec<usize> = {
        let mut v = vec![0usize; k];
        for l in &big_label {
            v[*l] += 1;
        }
        v
    };
    let mut total = ExactRational::zero();
    for rgs in restricted_growth_strings(k) {
        let parts = rgs.iter().copied().max().map_or(0, |m| m + 1);
        let mut size = vec![0usize; parts];
        for (b, &g) in rgs.iter().enumerate() {
            size[g] += block_size[b];
        }
        let mut term = ExactRational::from_biguint(factorial(parts - 1));
        if parts % 2 == 0 {
            term = -term;
        }
        for colour in &cyc {
            let mut lengths: Vec<Vec<usize>> = vec![Vec::new(); parts];
            for &(b, l) in colour {
                lengths[rgs[b]].push(l);
            }
            for (g, mut ls) in lengths.into_iter().enumerate() {
                ls.sort_unstable_by(|a, b| b.cmp(a));
                let table = WeingartenTable::cached(size[g], dim)?;
                term *= table.class_value(&ls)?;
            }
        }
        total += term;
    }
    Ok(total)
}

/// Exact coefficient of `Tr_id(A) Tr_id(B)` in the `n`-th cumulant at
/// dimension `N`, obtained *only* from moments: trace tables are set to the
/// probes `x^{Σ_c #(σ_c)}`, `y^{Σ_c #(τ_c)}`, moments of orders `1..n` are
/// summed with [`exact_moment`], cumulants are formed from them, and the
/// coefficient of `x^{nD} y^{nD}` is read off by Lagrange interpolation.
pub fn identity_cumulant_by_probes(n: usize, d: usize, dim: u64) -> Result<ExactRational> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("order and color count must be positive".into()));
    }
    let deg = n * d;
    let nodes: Vec<i64> = (1..=deg as i64 + 1).collect();
    // Lagrange leading-coefficient weights 1/∏_{j≠i}(x_i − x_j)
    let lead: Vec<ExactRational> = nodes
        .iter()
        .map(|&xi| {
            let prod: i64 = nodes.iter().filter(|&&xj| xj != xi).map(|&xj| xi - xj).product();
            ExactRational::from(prod).recip().expect("distinct nodes")
        })
        .collect();
    let probe = |order: usize, x: i64| {
        TraceTable::from_fn(order, d, |t| {
            let cycles: usize = t.perms().iter().map(Permutation::cycle_count).sum();
            ExactRational::int_pow(x, cycles as i64)
        })
    };
    let mut coeff = ExactRational::zero();
    for (i, &x) in nodes.iter().enumerate() {
        let tables_a: Vec<TraceTable<ExactRational>> = (1..=n).map(|k| probe(k, x)).collect::<Result<_>>()?;
        for (j, &y) in nodes.iter().enumerate() {
            let mut moments = Vec::with_capacity(n);
            for k in 1..=n {
                let tb = probe(k, y)?;
                moments.push(exact_moment(&tables_a[k - 1], &tb, dim)?);
            }
            let cn = cumulants_from_moments(&moments).pop().expect("n >= 1");
            coeff += cn * &lead[i] * &lead[j];
        }
    }
    Ok(coeff)
}

/// Value at `h = 0` of the polynomial in `h = 1/N²` through the points
/// `(N_i, v_i)`: Richardson extrapolation of `v(N) = v_∞ + a/N² + b/N⁴ + …`.
pub fn extrapolate_in_inverse_square(points: &[(u64, ExactRational)]) -> Result<ExactRational> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("extrapolation needs at least one point".into()));
    }
    let hs: Vec<ExactRational> = points
        .iter()
        .map(|&(nn, _)| ExactRational::int_pow(nn as i64, -2))
        .collect::<Result<_>>()?;
    let mut out = ExactRational::zero();
    for (i, (_, v)) in points.iter().enumerate() {
        let mut w = ExactRational::one();
        for (j, hj) in hs.iter().enumerate() {
            if j != i {
                let den = hj - &hs[i];
                if den.is_zero() {
                    return Err(Error::InvalidArgument("extrapolation nodes must be distinct".into()));
                }
                w = w * hj / den;
            }
        }
        out += w * v;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> PermTuple {
        s.parse().unwrap()
    }

    fn q(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    fn sp(n: usize, blocks: &[&[usize]]) -> SetPartition {
        SetPartition::new(n, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    #[test]
    fn excess_examples() {
        let d1 = SetPartition::discrete(1);
        assert_eq!(partition_graph_excess(&d1, &[d1.clone(), d1.clone()], &[d1.clone(), d1.clone()]).unwrap(), 0);
        let one = sp(2, &[&[1, 2]]);
        let disc = SetPartition::discrete(2);
        assert_eq!(partition_graph_excess(&one, &[one.clone()], &[disc.clone()]).unwrap(), 1);
        assert_eq!(partition_graph_excess(&disc, &[one.clone()], &[disc.clone()]).unwrap(), 0);
        assert!(partition_graph_excess(&disc, &[disc.clone()], &[one]).is_err());
    }

    #[test]
    fn coarsening_counts() {
        assert_eq!(enumerate_coarsenings(&SetPartition::single_block(3)).count(), 1);
        assert_eq!(enumerate_coarsenings(&SetPartition::discrete(2)).count(), 2);
        assert_eq!(enumerate_coarsenings(&SetPartition::discrete(4)).count(), 15);
        assert_eq!(enumerate_coarsenings(&sp(4, &[&[1, 3], &[2], &[4]])).count(), 5);
    }

    #[test]
    fn coefficient_examples() {
        for tup in PermTuple::all(3, 2) {
            if tup.is_connected() {
                assert_eq!(leading_weingarten(&tup, &tup).unwrap(), ExactRational::one());
                assert_eq!(leading_weingarten_general(&tup, &tup).unwrap(), ExactRational::one());
            }
        }
        let s = t("2,1;2,1");
        let id = PermTuple::identity(2, 2);
        assert_eq!(leading_weingarten(&s, &id).unwrap(), ExactRational::one());
        assert_eq!(leading_weingarten_general(&s, &id).unwrap(), ExactRational::one());
        let id2 = PermTuple::identity(2, 1);
        assert_eq!(leading_weingarten(&id2, &id2).unwrap(), ExactRational::one());
    }

    #[test]
    fn general_path_matches_reference_enumeration() {
        for d in [1usize, 2] {
            for n in 1..=3 {
                let all: Vec<PermTuple> = PermTuple::all(n, d).collect();
                for s in &all {
                    for tt in &all {
                        assert_eq!(
                            leading_weingarten_general(s, tt).unwrap(),
                            leading_weingarten_by_families(s, tt).unwrap(),
                            "{s} / {tt}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn diagonal_closed_form_matches_general_path() {
        for (n, d) in [(1usize, 3usize), (2, 2), (3, 2), (4, 1), (2, 3)] {
            for s in PermTuple::all(n, d) {
                assert_eq!(leading_weingarten_diagonal(&s).unwrap(), leading_weingarten_general(&s, &s).unwrap(), "{s}");
            }
        }
    }

    #[test]
    fn weingarten_small_values() {
        let id1 = Permutation::identity(1);
        let id2 = Permutation::identity(2);
        let sw = Permutation::new(vec![2, 1]).unwrap();
        for n in [2u64, 3, 5, 7] {
            let nn = n as i64;
            assert_eq!(exact_weingarten(&id1, n).unwrap(), ExactRational::new(1, nn).unwrap());
            assert_eq!(exact_weingarten(&id2, n).unwrap(), ExactRational::new(1, nn * nn - 1).unwrap());
            assert_eq!(exact_weingarten(&sw, n).unwrap(), ExactRational::new(-1, nn * (nn * nn - 1)).unwrap());
        }
        assert!(exact_weingarten(&Permutation::identity(3), 2).is_err());
        assert!(exact_weingarten(&Permutation::identity(7), 9).unwrap_err().is_cap_exceeded());
    }

    #[test]
    fn class_reduction_matches_full_gram_inverse() {
        for n in 1..=3usize {
            for dim in [3u64, 4] {
                let perms = Permutation::all(n);
                let m = perms.len();
                let gram: Vec<Vec<ExactRational>> = perms
                    .iter()
                    .map(|a| {
                        perms
                            .iter()
                            .map(|b| ExactRational::int_pow(dim as i64, a.compose_inverse_unchecked(b).cycle_count() as i64).unwrap())
                            .collect()
                    })
                    .collect();
                // column of G⁻¹ at the identity: Wg(σ) = (G⁻¹)[σ, id]
                let rhs: Vec<ExactRational> =
                    (0..m).map(|i| if i == 0 { ExactRational::one() } else { ExactRational::zero() }).collect();
                let col = solve_exact(gram, rhs).unwrap();
                for (p, v) in perms.iter().zip(&col) {
                    assert_eq!(&exact_weingarten(p, dim).unwrap(), v);
                }
            }
        }
    }

    #[test]
    fn weingarten_orthogonality() {
        let dim = 5u64;
        let perms = Permutation::all(4);
        for s in &perms {
            let mut acc = ExactRational::zero();
            for tt in &perms {
                let w = exact_weingarten(&s.compose_inverse_unchecked(tt), dim).unwrap();
                acc += w * ExactRational::int_pow(dim as i64, tt.cycle_count() as i64).unwrap();
            }
            let expect = if s.is_identity() { ExactRational::one() } else { ExactRational::zero() };
            assert_eq!(acc, expect);
        }
    }

    #[test]
    fn first_moment_and_identity_operators() {
        let dim = 3u64;
        for d in [1usize, 2] {
            let nd = dim.pow(d as u32) as i64;
            // A = B = identity: Tr_σ(1) = N^{Σ #σ_c}
            for n in 1..=3 {
                if n == 3 && d == 2 {
                    continue;
                }
                let table = TraceTable::from_fn(n, d, |t| {
                    ExactRational::int_pow(dim as i64, t.perms().iter().map(|p| p.cycle_count() as i64).sum())
                })
                .unwrap();
                assert_eq!(exact_moment(&table, &table, dim).unwrap(), ExactRational::int_pow(nd, n as i64).unwrap());
            }
            let ta = TraceTable::from_values(1, d, vec![q("7/2")]).unwrap();
            let tb = TraceTable::from_values(1, d, vec![q("5")]).unwrap();
            assert_eq!(exact_moment(&ta, &tb, dim).unwrap(), q("35/2") / ExactRational::from(nd));
        }
    }

    #[test]
    fn connected_weingarten_known_value() {
        let id = PermTuple::identity(2, 1);
        for dim in [2u64, 3, 4] {
            let nn = dim as i64;
            let expect = ExactRational::new(1, nn * nn * (nn * nn - 1)).unwrap();
            assert_eq!(exact_connected_weingarten(&id, &id, dim).unwrap(), expect);
        }
    }

    #[test]
    fn connected_weingarten_converges_to_leading_coefficient() {
        let dim = 400u64;
        for d in [1usize, 2] {
            for n in 1..=3 {
                let all: Vec<PermTuple> = PermTuple::all(n, d).collect();
                for s in &all {
                    for tt in &all {
                        let wc = exact_connected_weingarten(s, tt, dim).unwrap();
                        let power = (2 * n * d) as i64 - weingarten_exponent(s, tt).unwrap();
                        let scaled = (wc * ExactRational::int_pow(dim as i64, power).unwrap()).to_f64();
                        let f = leading_weingarten(s, tt).unwrap().to_f64();
                        assert!((scaled - f).abs() < 1e-3 * (1.0 + f.abs()), "{s} / {tt}: {scaled} vs {f}");
                    }
                }
            }
        }
    }

    #[test]
    fn probes_reproduce_connected_weingarten() {
        for (n, d) in [(1usize, 1usize), (2, 1), (3, 1), (2, 2)] {
            let dim = 4u64;
            let id = PermTuple::identity(n, d);
            assert_eq!(
                identity_cumulant_by_probes(n, d, dim).unwrap(),
                exact_connected_weingarten(&id, &id, dim).unwrap()
            );
        }
    }

    #[test]
    fn cumulant_recursion() {
        // moments of a unit-rate Poisson variable are Bell numbers; all cumulants are 1
        let m: Vec<ExactRational> = [1, 2, 5, 15, 52].iter().map(|&v| ExactRational::from(v as i64)).collect();
        assert!(cumulants_from_moments(&m).iter().all(|c| *c == ExactRational::one()));
    }

    #[test]
    fn extrapolation_is_exact_on_polynomials() {
        let pts: Vec<(u64, ExactRational)> = [2u64, 3, 5]
            .iter()
            .map(|&nn| {
                let h = ExactRational::int_pow(nn as i64, -2).unwrap();
                (nn, q("3/7") + q("2") * &h - q("5") * &h * &h)
            })
            .collect();
        assert_eq!(extrapolate_in_inverse_square(&pts).unwrap(), q("3/7"));
    }
}
