//! Dense operators on `(C^N)^{⊗D}`, trace-invariants by tensor-network
//! contraction, the delta-pattern state families, separable mixtures, the
//! `(β, ε)` scaling fit and a small binary file format.
//!
//! Operators are stored row-major as `side × side` matrices with
//! `side = N^D`; a row (or column) multi-index `(i_1, …, i_D)` maps to
//! `Σ_c i_c N^{D−1−c}`, the first factor being the most significant digit.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeff::TraceTable;
use crate::error::{Error, Result};
use crate::exact::ExactRational;
use crate::graphs::sum_pair_cycles;
use crate::perm::{PermTuple, Permutation};

/// Largest admitted `N^D`.
pub const MAX_SIDE: usize = 4096;

/// Largest number of terms `K^n` expanded by [`separable_mixture_invariant`].
pub const MIXTURE_TERM_CAP: usize = 1_000_000;

/// Default tolerance of the density-matrix checks.
pub const CHECK_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn checked_side(dim: usize, d: usize) -> Result<usize> {
    if dim == 0 || d == 0 {
        return Err(Error::InvalidArgument("local dimension and number of factors must be positive".into()));
    }
    dim.checked_pow(d as u32)
        .filter(|&s| s <= MAX_SIDE)
        .ok_or(Error::CapExceeded { what: "operator side N^D", requested: dim.saturating_pow(d as u32), cap: MAX_SIDE })
}

/// A dense operator on `(C^N)^{⊗D}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    d: usize,
    data: Vec<Complex64>,
}

impl DenseOperator {
    /// Wraps row-major entries of a `N^D × N^D` matrix.
    pub fn new(dim: usize, d: usize, data: Vec<Complex64>) -> Result<Self> {
        let side = checked_side(dim, d)?;
        if data.len() != side * side {
            return Err(Error::SizeMismatch { expected: side * side, found: data.len() });
        }
        Ok(Self { dim, d, data })
    }

    pub fn zeros(dim: usize, d: usize) -> Result<Self> {
        let side = checked_side(dim, d)?;
        Ok(Self { dim, d, data: vec![ZERO; side * side] })
    }

    pub fn identity(dim: usize, d: usize) -> Result<Self> {
        let mut op = Self::zeros(dim, d)?;
        let side = op.side();
        for k in 0..side {
            op.data[k * side + k] = ONE;
        }
        Ok(op)
    }

    /// `M_1 ⊗ … ⊗ M_D` of `N × N` factors.
    pub fn product(factors: &[DMatrix<Complex64>]) -> Result<Self> {
        let Some(first) = factors.first() else {
            return Err(Error::InvalidArgument("a product needs at least one factor".into()));
        };
        let dim = first.nrows();
        for f in factors {
            if f.nrows() != dim || f.ncols() != dim {
                return Err(Error::SizeMismatch { expected: dim, found: f.nrows().max(f.ncols()) });
            }
        }
        checked_side(dim, factors.len())?;
        let mut acc = factors[0].clone();
        for f in &factors[1..] {
            acc = acc.kronecker(f);
        }
        Self::from_matrix(dim, factors.len(), &acc)
    }

    pub fn from_matrix(dim: usize, d: usize, m: &DMatrix<Complex64>) -> Result<Self> {
        let side = checked_side(dim, d)?;
        if m.nrows() != side || m.ncols() != side {
            return Err(Error::SizeMismatch { expected: side, found: m.nrows() });
        }
        let mut data = Vec::with_capacity(side * side);
        for r in 0..side {
            for c in 0..side {
                data.push(m[(r, c)]);
            }
        }
        Ok(Self { dim, d, data })
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let side = self.side();
        DMatrix::from_row_slice(side, side, &self.data)
    }

    /// Local dimension `N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of tensor factors `D`.
    pub fn d(&self) -> usize {
        self.d
    }

    /// `N^D`.
    pub fn side(&self) -> usize {
        self.dim.pow(self.d as u32)
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.side() + col]
    }

    /// Operator trace.
    pub fn trace(&self) -> Complex64 {
        let side = self.side();
        (0..side).map(|k| self.data[k * side + k]).sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { dim: self.dim, d: self.d, data: self.data.iter().map(|v| v * factor).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.d != other.d {
            return Err(Error::SizeMismatch { expected: self.side(), found: other.side() });
        }
        Ok(Self { dim: self.dim, d: self.d, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() })
    }

    /// `max |A − A*|` entrywise.
    pub fn hermiticity_error(&self) -> f64 {
        let side = self.side();
        let mut worst: f64 = 0.0;
        for r in 0..side {
            for c in r..side {
                worst = worst.max((self.data[r * side + c] - self.data[c * side + r].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let m = self.to_matrix();
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(h).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Positive semi-definiteness up to `tol`: the Hermitian part shifted by
    /// `tol` admits a Cholesky factorization.
    pub fn is_positive(&self, tol: f64) -> bool {
        let m = self.to_matrix();
        let side = self.side();
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0) + DMatrix::identity(side, side) * Complex64::new(tol, 0.0);
        Cholesky::new(h).is_some()
    }

    pub fn is_unit_trace(&self, tol: f64) -> bool {
        (self.trace() - ONE).norm() <= tol
    }

    /// Hermitian, positive and of unit trace within `tol`.
    pub fn check_density(&self, tol: f64) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > tol {
            return Err(Error::Numerical(format!("operator is not Hermitian (max deviation {herm:e})")));
        }
        if !self.is_positive(tol) {
            return Err(Error::Numerical(format!("operator is not positive (min eigenvalue {:e})", self.min_eigenvalue())));
        }
        if !self.is_unit_trace(tol) {
            return Err(Error::Numerical(format!("trace is {} instead of 1", self.trace())));
        }
        Ok(())
    }

    fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut v = vec![0; self.d];
        for c in (0..self.d).rev() {
            v[c] = idx % self.dim;
            idx /= self.dim;
        }
        v
    }

    /// Partial trace over every factor except `keep`.
    pub fn partial_trace_keep(&self, keep: usize) -> Result<DMatrix<Complex64>> {
        if keep >= self.d {
            return Err(Error::InvalidArgument(format!("factor {keep} out of range for D = {}", self.d)));
        }
        let side = self.side();
        let mut out = DMatrix::from_element(self.dim, self.dim, ZERO);
        for r in 0..side {
            let rd = self.digits(r);
            for c in 0..side {
                let cd = self.digits(c);
                if (0..self.d).all(|k| k == keep || rd[k] == cd[k]) {
                    out[(rd[keep], cd[keep])] += self.data[r * side + c];
                }
            }
        }
        Ok(out)
    }

    /// `(U_1 ⊗ … ⊗ U_D) A (U_1 ⊗ … ⊗ U_D)*`, applied factor by factor.
    pub fn conjugate_local(&self, us: &[DMatrix<Complex64>]) -> Result<Self> {
        if us.len() != self.d {
            return Err(Error::SizeMismatch { expected: self.d, found: us.len() });
        }
        let mut t = Tensor { legs: (0..2 * self.d).collect(), data: self.data.clone() };
        for (c, u) in us.iter().enumerate() {
            if u.nrows() != self.dim || u.ncols() != self.dim {
                return Err(Error::SizeMismatch { expected: self.dim, found: u.nrows() });
            }
            t = t.apply_on_leg(c, self.dim, |a, b| u[(a, b)]);
            t = t.apply_on_leg(self.d + c, self.dim, |a, b| u[(a, b)].conj());
        }
        Ok(Self { dim: self.dim, d: self.d, data: t.data })
    }

    /// Writes the binary tensor format: magic `THCIZ1`, then `N`, `D`,
    /// `flags` as little-endian `u32`, then the row-major entries as pairs of
    /// little-endian `f32` (real, imaginary).
    pub fn write_to(&self, mut w: impl Write, flags: u32) -> Result<()> {
        w.write_all(MAGIC)?;
        for v in [self.dim as u32, self.d as u32, flags] {
            w.write_all(&v.to_le_bytes())?;
        }
        for z in &self.data {
            w.write_all(&(z.re as f32).to_le_bytes())?;
            w.write_all(&(z.im as f32).to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads the binary tensor format, returning the operator and its flags.
    pub fn read_from(mut r: impl Read) -> Result<(Self, u32)> {
        let mut magic = [0u8; 6];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("bad magic (expected THCIZ1)".into()));
        }
        let mut word = [0u8; 4];
        let mut header = [0u32; 3];
        for h in header.iter_mut() {
            r.read_exact(&mut word)?;
            *h = u32::from_le_bytes(word);
        }
        let (dim, d, flags) = (header[0] as usize, header[1] as usize, header[2]);
        let side = checked_side(dim, d)?;
        let mut data = Vec::with_capacity(side * side);
        for _ in 0..side * side {
            r.read_exact(&mut word)?;
            let re = f32::from_le_bytes(word);
            r.read_exact(&mut word)?;
            let im = f32::from_le_bytes(word);
            data.push(Complex64::new(re as f64, im as f64));
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(Error::Format("trailing bytes after tensor entries".into()));
        }
        Ok((Self { dim, d, data }, flags))
    }

    pub fn save(&self, path: impl AsRef<Path>, flags: u32) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(f, flags)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<(Self, u32)> {
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }

    /// Flags describing the checks this operator passes.
    pub fn density_flags(&self, tol: f64) -> u32 {
        let mut f = 0;
        if self.is_hermitian(tol) {
            f |= FLAG_HERMITIAN;
            if self.is_positive(tol) {
                f |= FLAG_POSITIVE;
            }
        }
        if self.is_unit_trace(tol) {
            f |= FLAG_UNIT_TRACE;
        }
        f
    }
}

const MAGIC: &[u8; 6] = b"THCIZ1";
pub const FLAG_HERMITIAN: u32 = 1;
pub const FLAG_POSITIVE: u32 = 2;
pub const FLAG_UNIT_TRACE: u32 = 4;

/// A dense tensor whose legs all have the local dimension, row-major in leg order.
#[derive(Clone, Debug)]
struct Tensor {
    legs: Vec<usize>,
    data: Vec<Complex64>,
}

fn strides(rank: usize, dim: usize) -> Vec<usize> {
    let mut s = vec![1usize; rank];
    for k in (0..rank.saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dim;
    }
    s
}

impl Tensor {
    /// `new[…, a, …] = Σ_b f(a, b) old[…, b, …]` on leg position `pos`.
    fn apply_on_leg(&self, pos: usize, dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Tensor {
        let st = strides(self.legs.len(), dim);
        let stride = st[pos];
        let mut out = vec![ZERO; self.data.len()];
        for (idx, slot) in out.iter_mut().enumerate() {
            let a = (idx / stride) % dim;
            let base = idx - a * stride;
            let mut acc = ZERO;
            for b in 0..dim {
                acc += f(a, b) * self.data[base + b * stride];
            }
            *slot = acc;
        }
        Tensor { legs: self.legs.clone(), data: out }
    }

    /// Sums over the diagonal of every repeated leg.
    fn trace_repeated(self, dim: usize) -> Tensor {
        let mut unique: Vec<usize> = Vec::new();
        for &l in &self.legs {
            if !unique.contains(&l) {
                unique.push(l);
            }
        }
        let open: Vec<usize> = unique.iter().copied().filter(|l| self.legs.iter().filter(|x| *x == l).count() == 1).collect();
        if open.len() == self.legs.len() {
            return self;
        }
        let closed: Vec<usize> = unique.iter().copied().filter(|l| !open.contains(l)).collect();
        let st = strides(self.legs.len(), dim);
        // stride contributed by each open / closed leg id
        let leg_stride = |l: usize| -> usize { self.legs.iter().zip(&st).filter(|(x, _)| **x == l).map(|(_, s)| *s).sum() };
        let open_st: Vec<usize> = open.iter().map(|&l| leg_stride(l)).collect();
        let closed_st: Vec<usize> = closed.iter().map(|&l| leg_stride(l)).collect();
        let out_len = dim.pow(open.len() as u32);
        let inner_len = dim.pow(closed.len() as u32);
        let mut data = vec![ZERO; out_len];
        for (o, slot) in data.iter_mut().enumerate() {
            let mut base = 0;
            let mut rem = o;
            for k in (0..open.len()).rev() {
                base += (rem % dim) * open_st[k];
                rem /= dim;
            }
            let mut acc = ZERO;
            for i in 0..inner_len {
                let mut off = base;
                let mut rem = i;
                for k in (0..closed.len()).rev() {
                    off += (rem % dim) * closed_st[k];
                    rem /= dim;
                }
                acc += self.data[off];
            }
            *slot = acc;
        }
        Tensor { legs: open, data }
    }

    /// Reorders the legs.
    fn permuted(&self, order: &[usize], dim: usize) -> Vec<Complex64> {
        let st = strides(self.legs.len(), dim);
        let src: Vec<usize> = order
            .iter()
            .map(|l| st[self.legs.iter().position(|x| x == l).expect("leg present")])
            .collect();
        let mut out = vec![ZERO; self.data.len()];
        for (idx, slot) in out.iter_mut().enumerate() {
            let mut off = 0;
            let mut rem = idx;
            for k in (0..order.len()).rev() {
                off += (rem % dim) * src[k];
                rem /= dim;
            }
            *slot = self.data[off];
        }
        out
    }

    /// Contracts all shared legs of `a` and `b`.
    fn contract(a: &Tensor, b: &Tensor, dim: usize) -> Tensor {
        let shared: Vec<usize> = a.legs.iter().copied().filter(|l| b.legs.contains(l)).collect();
        let a_only: Vec<usize> = a.legs.iter().copied().filter(|l| !shared.contains(l)).collect();
        let b_only: Vec<usize> = b.legs.iter().copied().filter(|l| !shared.contains(l)).collect();
        let order_a: Vec<usize> = a_only.iter().chain(&shared).copied().collect();
        let order_b: Vec<usize> = shared.iter().chain(&b_only).copied().collect();
        let ma = a.permuted(&order_a, dim);
        let mb = b.permuted(&order_b, dim);
        let rows = dim.pow(a_only.len() as u32);
        let inner = dim.pow(shared.len() as u32);
        let cols = dim.pow(b_only.len() as u32);
        let mut out = vec![ZERO; rows * cols];
        for i in 0..rows {
            let out_row = &mut out[i * cols..(i + 1) * cols];
            for j in 0..inner {
                let x = ma[i * inner + j];
                if x == ZERO {
                    continue;
                }
                let brow = &mb[j * cols..(j + 1) * cols];
                for (o, y) in out_row.iter_mut().zip(brow) {
                    *o += x * y;
                }
            }
        }
        Tensor { legs: a_only.into_iter().chain(b_only).collect(), data: out }
    }
}

/// `Tr_σ(A) = Σ ∏_s A_{j^s; i^s} ∏_{c,s} δ(i^c_s, j^c_{σ_c(s)})`, evaluated by
/// greedy pairwise contraction of the network of `n` copies of `A`.
pub fn evaluate_trace_invariant(a: &DenseOperator, s: &PermTuple) -> Result<Complex64> {
    if s.d() != a.d {
        return Err(Error::SizeMismatch { expected: a.d, found: s.d() });
    }
    let n = s.n();
    let d = a.d;
    let dim = a.dim;
    let inverses: Vec<Permutation> = s.perms().iter().map(Permutation::inverse).collect();
    // edge (c, t) joins the column leg c of copy t to the row leg c of copy σ_c(t)
    let edge = |c: usize, t: usize| c * n + t;
    let mut nodes: Vec<Tensor> = (0..n)
        .map(|t| {
            let legs: Vec<usize> =
                (0..d).map(|c| edge(c, inverses[c].at(t))).chain((0..d).map(|c| edge(c, t))).collect();
            Tensor { legs, data: a.data.clone() }.trace_repeated(dim)
        })
        .collect();
    let mut scalar = ONE;
    loop {
        // fully contracted nodes are scalars
        let (done, rest): (Vec<Tensor>, Vec<Tensor>) = nodes.into_iter().partition(|t| t.legs.is_empty());
        for t in done {
            scalar *= t.data[0];
        }
        nodes = rest;
        if nodes.is_empty() {
            return Ok(scalar);
        }
        let mut best: Option<(usize, usize, usize)> = None;
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                let shared = nodes[i].legs.iter().filter(|l| nodes[j].legs.contains(l)).count();
                if shared == 0 {
                    continue;
                }
                let cost = nodes[i].legs.len() + nodes[j].legs.len() - shared;
                if best.is_none_or(|b| cost < b.2) {
                    best = Some((i, j, cost));
                }
            }
        }
        let (i, j, _) = best.ok_or_else(|| Error::Numerical("tensor network has dangling legs".into()))?;
        let b = nodes.swap_remove(j);
        let a_node = nodes.swap_remove(i);
        nodes.push(Tensor::contract(&a_node, &b, dim));
    }
}

/// `Tr_σ(A)` for every `σ ∈ S_n^D`, in enumeration order (parallel over σ).
pub fn trace_table(a: &DenseOperator, n: usize) -> Result<TraceTable<Complex64>> {
    let tuples: Vec<PermTuple> = PermTuple::all(n, a.d).collect();
    let values: Vec<Complex64> = tuples.par_iter().map(|t| evaluate_trace_invariant(a, t)).collect::<Result<_>>()?;
    TraceTable::from_values(n, a.d, values)
}

/// One tensor factor of a separable mixture component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FactorSpec {
    /// Diagonal density matrix with the given (normalized) weights.
    Diagonal { diag: Vec<f64> },
    /// Flat projector on the basis vectors `offset, …, offset + rank − 1` (mod `N`).
    Projector { rank: usize, offset: usize },
    /// Rank-one projector on the normalized vector `re + i·im`.
    Pure {
        re: Vec<f64>,
        #[serde(default)]
        im: Vec<f64>,
    },
}

impl FactorSpec {
    pub fn matrix(&self, dim: usize) -> Result<DMatrix<Complex64>> {
        let mut m = DMatrix::from_element(dim, dim, ZERO);
        match self {
            FactorSpec::Diagonal { diag } => {
                if diag.len() != dim {
                    return Err(Error::SizeMismatch { expected: dim, found: diag.len() });
                }
                let total: f64 = diag.iter().sum();
                if diag.iter().any(|&w| w < 0.0) || total <= 0.0 {
                    return Err(Error::InvalidState("diagonal weights must be non-negative with positive sum".into()));
                }
                for (k, w) in diag.iter().enumerate() {
                    m[(k, k)] = Complex64::new(w / total, 0.0);
                }
            }
            FactorSpec::Projector { rank, offset } => {
                if *rank == 0 || *rank > dim {
                    return Err(Error::InvalidState(format!("projector rank {rank} outside 1..={dim}")));
                }
                for k in 0..*rank {
                    let i = (offset + k) % dim;
                    m[(i, i)] = Complex64::new(1.0 / *rank as f64, 0.0);
                }
            }
            FactorSpec::Pure { re, im } => {
                if re.len() != dim || !(im.is_empty() || im.len() == dim) {
                    return Err(Error::SizeMismatch { expected: dim, found: re.len() });
                }
                let v: Vec<Complex64> =
                    (0..dim).map(|k| Complex64::new(re[k], im.get(k).copied().unwrap_or(0.0))).collect();
                let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return Err(Error::InvalidState("pure factor needs a non-zero vector".into()));
                }
                for r in 0..dim {
                    for c in 0..dim {
                        m[(r, c)] = v[r] * v[c].conj() / (norm * norm);
                    }
                }
            }
        }
        Ok(m)
    }
}

/// One weighted product term of a separable mixture.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub factors: Vec<FactorSpec>,
}

/// State families with a prescribed asymptotic scaling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    /// `N^{−D}·1`: `β = 1`, `ε = 0`.
    MaximallyMixed,
    /// Product of rank-one projectors (basis vector 0, or Gaussian random
    /// vectors when a seed is given): `β = ε = 0`.
    PureSeparable {
        #[serde(default)]
        seed: Option<u64>,
    },
    /// `⊗_c P_r / r` with `P_r` a rank-`r` coordinate projector: `β = log_N r`, `ε = 0`.
    ProductRank { rank: usize },
    /// The delta-pattern 1-uniform pure state; needs `N = m^{D−1}`: `β = 0`, `ε = 1/(D−1)`.
    OneUniform,
    /// Rank one on `d1`, maximally mixed on `ds`, 1-uniform on `de^{D−1}`
    /// per factor; needs `N = d1·ds·de^{D−1}`: `β = log_N ds`, `ε = log_N de`.
    Interpolation { d1: usize, ds: usize, de: usize },
    /// `Σ_k p_k ⊗_c ρ_c^{(k)}`.
    SeparableMixture { components: Vec<MixtureComponent> },
}

/// Integer root `m` with `m^k = value`, if any.
fn exact_root(value: usize, k: usize) -> Option<usize> {
    if k == 0 {
        return None;
    }
    let guess = (value as f64).powf(1.0 / k as f64).round() as usize;
    (guess.saturating_sub(1)..=guess + 1).find(|&m| m.checked_pow(k as u32) == Some(value))
}

/// The triple `(d1, ds, de)` of a delta-pattern state, when the family is one.
pub fn delta_pattern_dims(spec: &StateSpec, dim: usize, d: usize) -> Result<Option<(usize, usize, usize)>> {
    Ok(match spec {
        StateSpec::MaximallyMixed => Some((1, dim, 1)),
        StateSpec::PureSeparable { seed: None } => Some((dim, 1, 1)),
        StateSpec::PureSeparable { seed: Some(_) } => None,
        StateSpec::ProductRank { .. } => None,
        StateSpec::OneUniform => {
            if d < 2 {
                return Err(Error::InvalidState("the 1-uniform state needs D ≥ 2".into()));
            }
            let m = exact_root(dim, d - 1)
                .ok_or_else(|| Error::InvalidState(format!("1-uniform state needs N = m^{} (got N = {dim})", d - 1)))?;
            Some((1, 1, m))
        }
        StateSpec::Interpolation { d1, ds, de } => {
            let de_pow = if d >= 2 { de.checked_pow(d as u32 - 1) } else { Some(1) };
            if *d1 == 0 || *ds == 0 || *de == 0 || de_pow.and_then(|p| p.checked_mul(d1 * ds)) != Some(dim) {
                return Err(Error::InvalidState(format!(
                    "interpolation needs N = d1·ds·de^(D−1): {d1}·{ds}·{de}^{} ≠ {dim}",
                    d.saturating_sub(1)
                )));
            }
            if d == 1 && *de != 1 {
                return Err(Error::InvalidState("for D = 1 the entangled dimension must be 1".into()));
            }
            Some((*d1, *ds, *de))
        }
        StateSpec::SeparableMixture { .. } => None,
    })
}

/// Effective exponents `(β, ε)` of a family at size `N`.
pub fn effective_exponents(spec: &StateSpec, dim: usize, d: usize) -> Result<(f64, f64)> {
    let log = |x: usize| if dim == 1 { 0.0 } else { (x as f64).ln() / (dim as f64).ln() };
    match spec {
        StateSpec::ProductRank { rank } => Ok((log(*rank), 0.0)),
        StateSpec::PureSeparable { .. } => Ok((0.0, 0.0)),
        StateSpec::SeparableMixture { .. } => {
            Err(Error::InvalidArgument("a separable mixture has no prescribed exponents; fit them".into()))
        }
        _ => {
            let (_, ds, de) = delta_pattern_dims(spec, dim, d)?.expect("delta-pattern family");
            Ok((log(ds), log(de)))
        }
    }
}

fn delta_pattern_state(dim: usize, d: usize, d1: usize, ds: usize, de: usize) -> Result<DenseOperator> {
    let side = checked_side(dim, d)?;
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|a| (a + 1..d).map(move |b| (a, b))).collect();
    let e_len = de.pow(d as u32 - 1);
    // position of the sub-index shared with c' inside the entangled digit of color c
    let sub_pos = |c: usize, other: usize| if other < c { other } else { other - 1 };
    let e_index = |values: &[usize], c: usize| -> usize {
        let mut digits = vec![0usize; d.saturating_sub(1)];
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if a == c {
                digits[sub_pos(c, b)] = values[k];
            } else if b == c {
                digits[sub_pos(c, a)] = values[k];
            }
        }
        digits.iter().fold(0, |acc, &x| acc * de + x)
    };
    let configs: Vec<Vec<usize>> = {
        let mut out = vec![vec![]];
        for _ in &pairs {
            out = out.into_iter().flat_map(|v| (0..de).map(move |x| [v.clone(), vec![x]].concat())).collect();
        }
        out
    };
    let e_of: Vec<Vec<usize>> = configs.iter().map(|v| (0..d).map(|c| e_index(v, c)).collect()).collect();
    let weight = 1.0 / (ds.pow(d as u32) as f64 * de.pow(pairs.len() as u32) as f64);
    let mut data = vec![ZERO; side * side];
    let local = |x: usize, e: usize| x * e_len + e; // with p_c = 0
    for xs in 0..ds.pow(d as u32) {
        let x_digits: Vec<usize> = {
            let mut v = vec![0; d];
            let mut rem = xs;
            for c in (0..d).rev() {
                v[c] = rem % ds;
                rem /= ds;
            }
            v
        };
        for er in &e_of {
            let row = (0..d).fold(0, |acc, c| acc * dim + local(x_digits[c], er[c]));
            for ec in &e_of {
                let col = (0..d).fold(0, |acc, c| acc * dim + local(x_digits[c], ec[c]));
                data[row * side + col] += Complex64::new(weight, 0.0);
            }
        }
    }
    let _ = d1;
    DenseOperator::new(dim, d, data)
}

fn rng_vector(dim: usize, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let re = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let im = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    (re, im)
}

/// Builds the density matrix of a family at local dimension `N` and `D` factors.
pub fn build_state(spec: &StateSpec, dim: usize, d: usize) -> Result<DenseOperator> {
    checked_side(dim, d)?;
    match spec {
        StateSpec::ProductRank { rank } => {
            let f = FactorSpec::Projector { rank: *rank, offset: 0 }.matrix(dim)?;
            DenseOperator::product(&vec![f; d])
        }
        StateSpec::PureSeparable { seed: Some(seed) } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let factors = (0..d)
                .map(|_| {
                    let (re, im) = rng_vector(dim, &mut rng);
                    FactorSpec::Pure { re, im }.matrix(dim)
                })
                .collect::<Result<Vec<_>>>()?;
            DenseOperator::product(&factors)
        }
        StateSpec::SeparableMixture { components } => {
            check_mixture(components, d)?;
            let total: f64 = components.iter().map(|c| c.weight).sum();
            let mut acc = DenseOperator::zeros(dim, d)?;
            for comp in components {
                let factors = comp.factors.iter().map(|f| f.matrix(dim)).collect::<Result<Vec<_>>>()?;
                acc = acc.add(&DenseOperator::product(&factors)?.scale(Complex64::new(comp.weight / total, 0.0)))?;
            }
            Ok(acc)
        }
        _ => {
            let (d1, ds, de) = delta_pattern_dims(spec, dim, d)?.expect("delta-pattern family");
            delta_pattern_state(dim, d, d1, ds, de)
        }
    }
}

fn check_mixture(components: &[MixtureComponent], d: usize) -> Result<()> {
    if components.is_empty() {
        return Err(Error::InvalidState("a mixture needs at least one component".into()));
    }
    for c in components {
        if c.weight <= 0.0 {
            return Err(Error::InvalidState("mixture weights must be positive".into()));
        }
        if c.factors.len() != d {
            return Err(Error::SizeMismatch { expected: d, found: c.factors.len() });
        }
    }
    Ok(())
}

/// Exact `Tr_σ(ρ)` of the delta-pattern states:
/// `ds^{Σ_c[#(σ_c) − n]} · de^{Σ_{c1<c2}[#(σ_{c1}σ_{c2}⁻¹) − n]}`.
pub fn delta_pattern_invariant(ds: usize, de: usize, s: &PermTuple) -> Result<ExactRational> {
    let n = s.n() as i64;
    let d = s.d() as i64;
    let cycles: i64 = s.perms().iter().map(|p| p.cycle_count() as i64).sum();
    let pairs = sum_pair_cycles(s);
    Ok(ExactRational::int_pow(ds as i64, cycles - n * d)? * ExactRational::int_pow(de as i64, pairs - n * d * (d - 1) / 2)?)
}

/// Closed-form `Tr_σ(ρ)` for the families that have one.
pub fn closed_form_invariant(spec: &StateSpec, dim: usize, d: usize, s: &PermTuple) -> Result<Option<ExactRational>> {
    if s.d() != d {
        return Err(Error::SizeMismatch { expected: d, found: s.d() });
    }
    match spec {
        StateSpec::ProductRank { rank } => {
            let n = s.n() as i64;
            let cycles: i64 = s.perms().iter().map(|p| p.cycle_count() as i64).sum();
            Ok(Some(ExactRational::int_pow(*rank as i64, cycles - n * d as i64)?))
        }
        StateSpec::PureSeparable { .. } => Ok(Some(ExactRational::one())),
        StateSpec::SeparableMixture { .. } => Ok(None),
        _ => {
            let (_, ds, de) = delta_pattern_dims(spec, dim, d)?.expect("delta-pattern family");
            Ok(Some(delta_pattern_invariant(ds, de, s)?))
        }
    }
}

/// Value of the multilinear expansion of a separable mixture invariant and
/// its equal-index (diagonal) part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixtureInvariant {
    pub total: Complex64,
    pub diagonal: Complex64,
}

/// `Σ_{k_1..k_n} p_{k_1}…p_{k_n} ∏_c ∏_{η cycle of σ_c} Tr(→∏_{i∈η} ρ_c^{(k_i)})`,
/// the ordered product following `s, σ_c(s), σ_c²(s), …`.
pub fn separable_mixture_invariant(components: &[MixtureComponent], s: &PermTuple, dim: usize) -> Result<MixtureInvariant> {
    let d = s.d();
    let n = s.n();
    check_mixture(components, d)?;
    let k = components.len();
    let terms = k.checked_pow(n as u32).filter(|&t| t <= MIXTURE_TERM_CAP).ok_or(Error::CapExceeded {
        what: "separable mixture terms K^n",
        requested: k.saturating_pow(n as u32),
        cap: MIXTURE_TERM_CAP,
    })?;
    let total_w: f64 = components.iter().map(|c| c.weight).sum();
    let weights: Vec<f64> = components.iter().map(|c| c.weight / total_w).collect();
    let mats: Vec<Vec<DMatrix<Complex64>>> = components
        .iter()
        .map(|c| c.factors.iter().map(|f| f.matrix(dim)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let cycles: Vec<Vec<Vec<usize>>> = s.perms().iter().map(|p| p.cycles_zero_based()).collect();
    let mut total = ZERO;
    let mut diagonal = ZERO;
    let mut labels = vec![0usize; n];
    for idx in 0..terms {
        let mut rem = idx;
        for l in labels.iter_mut().rev() {
            *l = rem % k;
            rem /= k;
        }
        let w: f64 = labels.iter().map(|&l| weights[l]).product();
        let mut value = Complex64::new(w, 0.0);
        for c in 0..d {
            for cyc in &cycles[c] {
                let mut prod = mats[labels[cyc[0]]][c].clone();
                for &x in &cyc[1..] {
                    prod *= &mats[labels[x]][c];
                }
                value *= prod.trace();
            }
        }
        total += value;
        if labels.iter().all(|&l| l == labels[0]) {
            diagonal += value;
        }
    }
    Ok(MixtureInvariant { total, diagonal })
}

/// One observation for [`fit_scaling`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingSample {
    pub dim: usize,
    pub tuple: PermTuple,
    pub value: Complex64,
}

/// Least-squares estimate of `(β, ε)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub beta_hat: f64,
    pub eps_hat: f64,
    /// Root-mean-square residual of `log |Tr_τ|`.
    pub residual: f64,
    /// Covariance of `(β̂, ε̂)` from the residual variance (zero for exact fits).
    pub covariance: [[f64; 2]; 2],
}

/// Fits `log|Tr_τ| = β·Σ_c[#(τ_c) − n]·log N + ε·Σ_{c1<c2}[#(τ_{c1}τ_{c2}⁻¹) − n]·log N + a_τ`
/// with one intercept `a_τ` per distinct tuple.
pub fn fit_scaling(samples: &[ScalingSample]) -> Result<FitResult> {
    let mut dims: Vec<usize> = samples.iter().map(|s| s.dim).collect();
    dims.sort_unstable();
    dims.dedup();
    if dims.len() < 2 {
        return Err(Error::InvalidArgument("the fit needs at least two distinct N".into()));
    }
    let mut taus: Vec<PermTuple> = samples.iter().map(|s| s.tuple.clone()).collect();
    taus.sort_by_key(|t| (t.n(), t.d(), t.lex_rank()));
    taus.dedup();
    let p = 2 + taus.len();
    let m = samples.len();
    if m < p {
        return Err(Error::RankDeficient(format!("{m} samples for {p} unknowns")));
    }
    let mut a = DMatrix::<f64>::zeros(m, p);
    let mut y = DVector::<f64>::zeros(m);
    for (row, smp) in samples.iter().enumerate() {
        let mag = smp.value.norm();
        if !(mag > 0.0) || !mag.is_finite() {
            return Err(Error::NonPositive(format!("|Tr| = {mag} for {} at N = {}", smp.tuple, smp.dim)));
        }
        let t = &smp.tuple;
        let n = t.n() as f64;
        let d = t.d() as f64;
        let ln_n = (smp.dim as f64).ln();
        let cycles: f64 = t.perms().iter().map(|q| q.cycle_count() as f64).sum();
        a[(row, 0)] = (cycles - n * d) * ln_n;
        a[(row, 1)] = (sum_pair_cycles(t) as f64 - n * d * (d - 1.0) / 2.0) * ln_n;
        let k = taus.iter().position(|x| x == t).expect("tuple listed");
        a[(row, 2 + k)] = 1.0;
        y[row] = mag.ln();
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let rank = svd.singular_values.iter().filter(|&&v| v > smax * 1e-10).count();
    if rank < p {
        return Err(Error::RankDeficient(format!("design matrix has rank {rank} < {p}")));
    }
    let x = svd.solve(&y, smax * 1e-12).map_err(|e| Error::RankDeficient(e.to_string()))?;
    let r = &y - &a * &x;
    let rss = r.norm_squared();
    let sigma2 = if m > p { rss / (m - p) as f64 } else { 0.0 };
    let ata_inv = (a.transpose() * &a)
        .try_inverse()
        .ok_or_else(|| Error::RankDeficient("normal matrix is singular".into()))?;
    let cov = [
        [sigma2 * ata_inv[(0, 0)], sigma2 * ata_inv[(0, 1)]],
        [sigma2 * ata_inv[(1, 0)], sigma2 * ata_inv[(1, 1)]],
    ];
    Ok(FitResult { beta_hat: x[0], eps_hat: x[1], residual: (rss / m as f64).sqrt(), covariance: cov })
}

/// Samples `Tr_τ(ρ_N)` of a state family over sizes and tuples, ready for [`fit_scaling`].
pub fn scaling_samples(spec: &StateSpec, dims: &[usize], d: usize, tuples: &[PermTuple]) -> Result<Vec<ScalingSample>> {
    let mut out = Vec::new();
    for &dim in dims {
        let rho = build_state(spec, dim, d)?;
        for t in tuples {
            out.push(ScalingSample { dim, tuple: t.clone(), value: evaluate_trace_invariant(&rho, t)? });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::haar_unitary;

    fn t(s: &str) -> PermTuple {
        s.parse().unwrap()
    }

    fn close(a: Complex64, b: f64, tol: f64) -> bool {
        (a - Complex64::new(b, 0.0)).norm() <= tol
    }

    #[test]
    fn single_factor_invariants_are_power_traces() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dim = 4;
        let data: Vec<Complex64> =
            (0..dim * dim).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let a = DenseOperator::new(dim, 1, data).unwrap();
        let m = a.to_matrix();
        for p in Permutation::all(4) {
            let tup = PermTuple::new(vec![p.clone()]).unwrap();
            let expect: Complex64 = crate::coeff::cycle_lengths(&p).iter().map(|&l| m.pow(l as u32).trace()).product();
            let got = evaluate_trace_invariant(&a, &tup).unwrap();
            assert!((got - expect).norm() < 1e-10, "{p}");
            let inv = evaluate_trace_invariant(&a, &tup.inverse()).unwrap();
            assert!((got - inv).norm() < 1e-10);
        }
    }

    #[test]
    fn identity_tuple_gives_operator_trace() {
        let rho = build_state(&StateSpec::OneUniform, 3, 2).unwrap();
        assert!(close(evaluate_trace_invariant(&rho, &PermTuple::identity(1, 2)).unwrap(), 1.0, 1e-12));
    }

    #[test]
    fn maximally_mixed_example() {
        let rho = build_state(&StateSpec::MaximallyMixed, 3, 2).unwrap();
        assert!(close(evaluate_trace_invariant(&rho, &t("2,1;2,1")).unwrap(), 1.0 / 9.0, 1e-12));
    }

    #[test]
    fn one_uniform_example_and_partial_trace() {
        for (dim, d) in [(3usize, 2usize), (4, 3)] {
            let rho = build_state(&StateSpec::OneUniform, dim, d).unwrap();
            rho.check_density(1e-12).unwrap();
            for c in 0..d {
                let red = rho.partial_trace_keep(c).unwrap();
                let expect = DMatrix::<Complex64>::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0);
                assert!((red - expect).norm() < 1e-12);
            }
        }
        let rho = build_state(&StateSpec::OneUniform, 3, 2).unwrap();
        assert!(close(evaluate_trace_invariant(&rho, &t("2,1;1,2")).unwrap(), 1.0 / 3.0, 1e-12));
    }

    #[test]
    fn invariants_match_closed_forms() {
        let cases = [
            (StateSpec::MaximallyMixed, 3usize, 2usize),
            (StateSpec::OneUniform, 4, 3),
            (StateSpec::Interpolation { d1: 1, ds: 2, de: 3 }, 6, 2),
            (StateSpec::Interpolation { d1: 2, ds: 1, de: 2 }, 8, 3),
            (StateSpec::ProductRank { rank: 2 }, 3, 2),
            (StateSpec::PureSeparable { seed: None }, 3, 2),
            (StateSpec::PureSeparable { seed: Some(9) }, 3, 2),
        ];
        for (spec, dim, d) in cases {
            let rho = build_state(&spec, dim, d).unwrap();
            rho.check_density(1e-10).unwrap();
            for n in 1..=3 {
                for s in PermTuple::all(n, d).take(60) {
                    let want = closed_form_invariant(&spec, dim, d, &s).unwrap().unwrap().to_f64();
                    let got = evaluate_trace_invariant(&rho, &s).unwrap();
                    assert!(close(got, want, 1e-10), "{spec:?} {s}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn dimension_constraints_are_enforced() {
        assert!(build_state(&StateSpec::OneUniform, 5, 3).is_err());
        assert!(build_state(&StateSpec::Interpolation { d1: 1, ds: 2, de: 2 }, 6, 2).is_err());
        assert!(build_state(&StateSpec::ProductRank { rank: 4 }, 3, 2).is_err());
        assert!(checked_side(65, 2).is_err());
    }

    #[test]
    fn local_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let spec = StateSpec::SeparableMixture {
            components: vec![
                MixtureComponent {
                    weight: 0.3,
                    factors: vec![FactorSpec::Projector { rank: 2, offset: 0 }, FactorSpec::Diagonal { diag: vec![1.0, 2.0, 3.0] }],
                },
                MixtureComponent {
                    weight: 0.7,
                    factors: vec![
                        FactorSpec::Pure { re: vec![1.0, -1.0, 0.5], im: vec![0.2, 0.0, 1.0] },
                        FactorSpec::Projector { rank: 1, offset: 2 },
                    ],
                },
            ],
        };
        let rho = build_state(&spec, 3, 2).unwrap();
        let ent = build_state(&StateSpec::OneUniform, 3, 2).unwrap().scale(Complex64::new(0.5, 0.0));
        let a = rho.add(&ent).unwrap();
        let us: Vec<DMatrix<Complex64>> = (0..2).map(|_| haar_unitary(3, &mut rng)).collect();
        let b = a.conjugate_local(&us).unwrap();
        for n in 1..=3 {
            for s in PermTuple::all(n, 2) {
                let x = evaluate_trace_invariant(&a, &s).unwrap();
                let y = evaluate_trace_invariant(&b, &s).unwrap();
                assert!((x - y).norm() < 1e-8, "{s}");
            }
        }
    }

    #[test]
    fn mixture_expansion_matches_assembled_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dim = 3;
        let mut pure = || {
            let (re, im) = rng_vector(dim, &mut rng);
            FactorSpec::Pure { re, im }
        };
        let components = vec![
            MixtureComponent { weight: 0.4, factors: vec![pure(), pure()] },
            MixtureComponent { weight: 0.6, factors: vec![pure(), pure()] },
        ];
        let rho = build_state(&StateSpec::SeparableMixture { components: components.clone() }, dim, 2).unwrap();
        rho.check_density(1e-10).unwrap();
        for n in 1..=2 {
            for s in PermTuple::all(n, 2) {
                let direct = evaluate_trace_invariant(&rho, &s).unwrap();
                let mix = separable_mixture_invariant(&components, &s, dim).unwrap();
                assert!((direct - mix.total).norm() < 1e-10, "{s}");
            }
        }
        let single = &components[..1];
        let s = t("2,1;1,2");
        let m = separable_mixture_invariant(single, &s, dim).unwrap();
        assert!((m.total - m.diagonal).norm() < 1e-14);
    }

    #[test]
    fn commuting_mixture_dominates_its_diagonal() {
        let components = vec![
            MixtureComponent {
                weight: 1.0,
                factors: vec![FactorSpec::Diagonal { diag: vec![1.0, 0.0, 2.0] }, FactorSpec::Projector { rank: 2, offset: 1 }],
            },
            MixtureComponent {
                weight: 2.0,
                factors: vec![FactorSpec::Projector { rank: 1, offset: 0 }, FactorSpec::Diagonal { diag: vec![3.0, 1.0, 1.0] }],
            },
        ];
        for n in 1..=3 {
            for s in PermTuple::all(n, 2) {
                let m = separable_mixture_invariant(&components, &s, 3).unwrap();
                assert!(m.total.im.abs() < 1e-14 && m.total.re >= m.diagonal.re - 1e-14);
            }
        }
    }

    #[test]
    fn fit_examples() {
        let tuples: Vec<PermTuple> = PermTuple::all(2, 2).chain(PermTuple::all(3, 2).skip(5).take(8)).collect();
        let samples = scaling_samples(&StateSpec::MaximallyMixed, &[2, 3, 4, 5], 2, &tuples).unwrap();
        let fit = fit_scaling(&samples).unwrap();
        assert!((fit.beta_hat - 1.0).abs() < 1e-9 && fit.eps_hat.abs() < 1e-9);
        assert!(fit.residual >= 0.0);
        let tuples3: Vec<PermTuple> = PermTuple::all(2, 3).collect();
        let samples = scaling_samples(&StateSpec::OneUniform, &[4, 9], 3, &tuples3).unwrap();
        let fit = fit_scaling(&samples).unwrap();
        assert!(fit.beta_hat.abs() < 1e-9 && (fit.eps_hat - 0.5).abs() < 1e-9, "{fit:?}");
        let one = &samples[..1];
        assert!(fit_scaling(one).is_err());
        let same_n: Vec<ScalingSample> = samples.iter().filter(|s| s.dim == 4).cloned().collect();
        assert!(matches!(fit_scaling(&same_n), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn binary_round_trip() {
        let rho = build_state(&StateSpec::Interpolation { d1: 1, ds: 2, de: 3 }, 6, 2).unwrap();
        let mut buf = Vec::new();
        let flags = rho.density_flags(1e-10);
        assert_eq!(flags, FLAG_HERMITIAN | FLAG_POSITIVE | FLAG_UNIT_TRACE);
        rho.write_to(&mut buf, flags).unwrap();
        assert_eq!(&buf[..6], b"THCIZ1");
        assert_eq!(buf.len(), 6 + 12 + 8 * 36 * 36);
        let (back, f) = DenseOperator::read_from(&buf[..]).unwrap();
        assert_eq!(f, flags);
        assert!(back.data().iter().zip(rho.data()).all(|(a, b)| (a - b).norm() < 1e-7));
        assert!(DenseOperator::read_from(&buf[..buf.len() - 1]).is_err());
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(DenseOperator::read_from(&bad[..]), Err(Error::Format(_))));
    }

    #[test]
    fn state_spec_json_schema() {
        let spec: StateSpec = serde_json::from_str(r#"{"kind":"interpolation","d1":1,"ds":2,"de":3}"#).unwrap();
        assert_eq!(spec, StateSpec::Interpolation { d1: 1, ds: 2, de: 3 });
        let spec: StateSpec = serde_json::from_str(r#"{"kind":"pure_separable"}"#).unwrap();
        assert_eq!(spec, StateSpec::PureSeparable { seed: None });
        let (b, e) = effective_exponents(&StateSpec::Interpolation { d1: 1, ds: 2, de: 3 }, 6, 2).unwrap();
        assert!((b - 2f64.ln() / 6f64.ln()).abs() < 1e-15 && (e - 3f64.ln() / 6f64.ln()).abs() < 1e-15);
    }
}
