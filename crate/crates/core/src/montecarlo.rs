//! Haar sampling of local unitaries and estimation of the cumulants of
//! `X = Tr(A U B U*)`, `U = U_1 ⊗ … ⊗ U_D`.
//!
//! Randomness is counter based: sample `i` draws from a ChaCha8 stream keyed
//! by `(seed, i)`, so estimates do not depend on the number of worker threads.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regimes::{asymptotic_cumulant, classify, enumerate_leading, Family, InvariantTable, RegimeReport, ScalingAnsatz, SideExponents};
use crate::tensors::{build_state, effective_exponents, evaluate_trace_invariant, DenseOperator, StateSpec};

/// Number of jackknife blocks.
pub const JACKKNIFE_BLOCKS: usize = 100;

/// Highest cumulant order handled by the estimators.
pub const MAX_ORDER: usize = 6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A Haar-distributed `N × N` unitary: QR of a complex Ginibre matrix with the
/// phases of `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let z = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
            * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `D` independent Haar unitaries.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarTuple {
    factors: Vec<DMatrix<Complex64>>,
}

impl HaarTuple {
    pub fn sample<R: Rng + ?Sized>(dim: usize, d: usize, rng: &mut R) -> Result<Self> {
        if dim == 0 || d == 0 {
            return Err(Error::InvalidArgument("local dimension and number of factors must be positive".into()));
        }
        Ok(Self { factors: (0..d).map(|_| haar_unitary(dim, rng)).collect() })
    }

    /// The tuple drawn for sample `index` of the stream `seed`.
    pub fn for_sample(dim: usize, d: usize, seed: u64, index: u64) -> Result<Self> {
        Self::sample(dim, d, &mut sample_rng(seed, index))
    }

    pub fn identity(dim: usize, d: usize) -> Self {
        Self { factors: vec![DMatrix::identity(dim, dim); d] }
    }

    pub fn factors(&self) -> &[DMatrix<Complex64>] {
        &self.factors
    }

    /// `max_c ‖U_c U_c* − 1‖_max`.
    pub fn unitarity_residual(&self) -> f64 {
        self.factors
            .iter()
            .map(|u| {
                let e = u * u.adjoint() - DMatrix::identity(u.nrows(), u.nrows());
                e.iter().map(|z| z.norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `(U_1 ⊗ … ⊗ U_D) v` by mode-wise multiplication.
fn apply_local(us: &[DMatrix<Complex64>], v: &[Complex64], dim: usize, adjoint: bool) -> Vec<Complex64> {
    let d = us.len();
    let mut cur = v.to_vec();
    let mut next = vec![ZERO; v.len()];
    for (c, u) in us.iter().enumerate() {
        let stride = dim.pow((d - 1 - c) as u32);
        for (idx, slot) in next.iter_mut().enumerate() {
            let a = (idx / stride) % dim;
            let base = idx - a * stride;
            let mut acc = ZERO;
            for b in 0..dim {
                let m = if adjoint { u[(b, a)].conj() } else { u[(a, b)] };
                acc += m * cur[base + b * stride];
            }
            *slot = acc;
        }
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

enum Strategy {
    /// `X = Σ_l μ_l ⟨U b_l| A |U b_l⟩` over the eigenvectors of `B`.
    SpectralB { values: Vec<f64>, vectors: Vec<Vec<Complex64>> },
    /// `X = Σ_k λ_k ⟨U* a_k| B |U* a_k⟩` over the eigenvectors of `A`.
    SpectralA { values: Vec<f64>, vectors: Vec<Vec<Complex64>> },
    /// `X = Tr(A · (U B U*))` with the conjugation done leg by leg.
    Conjugate,
}

/// Evaluates `Tr(A U B U*)` for Hermitian `A`, `B`, using the eigenvectors of
/// the lower-rank side so that each sample costs `O(r·(D N^{D+1} + N^{2D}))`.
pub struct OverlapEvaluator {
    a: DenseOperator,
    b: DenseOperator,
    a_matrix: DMatrix<Complex64>,
    b_matrix: DMatrix<Complex64>,
    strategy: Strategy,
}

fn spectrum(m: &DMatrix<Complex64>) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let eig = SymmetricEigen::new(m.clone());
    let scale = eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut values = Vec::new();
    let mut vectors = Vec::new();
    for (k, &v) in eig.eigenvalues.iter().enumerate() {
        if v.abs() > scale * 1e-13 {
            values.push(v);
            vectors.push(eig.eigenvectors.column(k).iter().copied().collect());
        }
    }
    (values, vectors)
}

impl OverlapEvaluator {
    pub fn new(a: &DenseOperator, b: &DenseOperator) -> Result<Self> {
        if a.dim() != b.dim() || a.d() != b.d() {
            return Err(Error::SizeMismatch { expected: a.side(), found: b.side() });
        }
        for (name, op) in [("A", a), ("B", b)] {
            let h = op.hermiticity_error();
            if h > 1e-10 {
                return Err(Error::InvalidArgument(format!("{name} must be Hermitian (deviation {h:e})")));
            }
        }
        let a_matrix = a.to_matrix();
        let b_matrix = b.to_matrix();
        let (va, xa) = spectrum(&a_matrix);
        let (vb, xb) = spectrum(&b_matrix);
        let limit = a.dim().max(2);
        let strategy = if vb.len() <= va.len() && vb.len() <= limit {
            Strategy::SpectralB { values: vb, vectors: xb }
        } else if va.len() <= limit {
            Strategy::SpectralA { values: va, vectors: xa }
        } else {
            Strategy::Conjugate
        };
        Ok(Self { a: a.clone(), b: b.clone(), a_matrix, b_matrix, strategy })
    }

    fn quadratic(m: &DMatrix<Complex64>, w: &[Complex64]) -> Complex64 {
        let side = w.len();
        let mut acc = ZERO;
        for r in 0..side {
            let mut row = ZERO;
            for c in 0..side {
                row += m[(r, c)] * w[c];
            }
            acc += w[r].conj() * row;
        }
        acc
    }

    /// `Tr(A U B U*)`; the imaginary residue must stay below `1e-9·N^D`.
    pub fn overlap(&self, u: &HaarTuple) -> Result<f64> {
        if u.factors.len() != self.a.d() || u.factors.iter().any(|f| f.nrows() != self.a.dim()) {
            return Err(Error::SizeMismatch { expected: self.a.d(), found: u.factors.len() });
        }
        let dim = self.a.dim();
        let value = match &self.strategy {
            Strategy::SpectralB { values, vectors } => values
                .iter()
                .zip(vectors)
                .map(|(mu, v)| Self::quadratic(&self.a_matrix, &apply_local(&u.factors, v, dim, false)) * *mu)
                .sum(),
            Strategy::SpectralA { values, vectors } => values
                .iter()
                .zip(vectors)
                .map(|(lam, v)| Self::quadratic(&self.b_matrix, &apply_local(&u.factors, v, dim, true)) * *lam)
                .sum(),
            Strategy::Conjugate => {
                let ub = self.b.conjugate_local(&u.factors)?;
                let side = self.a.side();
                let (x, y) = (self.a.data(), ub.data());
                let mut acc = ZERO;
                for r in 0..side {
                    for c in 0..side {
                        acc += x[r * side + c] * y[c * side + r];
                    }
                }
                acc
            }
        };
        let tol = 1e-9 * self.a.side() as f64;
        if value.im.abs() > tol {
            return Err(Error::Numerical(format!("overlap has imaginary residue {:e}", value.im)));
        }
        Ok(value.re)
    }
}

/// `Tr(A U B U*)` for a single tuple.
pub fn sample_overlap(a: &DenseOperator, b: &DenseOperator, u: &HaarTuple) -> Result<f64> {
    OverlapEvaluator::new(a, b)?.overlap(u)
}

/// Draws `count` overlaps of the stream `seed`, in sample order.
pub fn sample_overlaps(a: &DenseOperator, b: &DenseOperator, count: usize, seed: u64) -> Result<Vec<f64>> {
    let eval = OverlapEvaluator::new(a, b)?;
    let (dim, d) = (a.dim(), a.d());
    (0..count as u64)
        .into_par_iter()
        .map(|i| eval.overlap(&HaarTuple::for_sample(dim, d, seed, i)?))
        .collect()
}

/// One estimated cumulant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CumulantEstimate {
    pub order: usize,
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Cumulants `κ_1..κ_k` from raw moments `μ_1..μ_k`.
fn cumulants_from_raw(mu: &[f64]) -> Vec<f64> {
    let mut kappa: Vec<f64> = Vec::with_capacity(mu.len());
    for n in 1..=mu.len() {
        let mut v = mu[n - 1];
        let mut binom = 1.0; // C(n−1, m−1)
        for m in 1..n {
            v -= binom * kappa[m - 1] * mu[n - m - 1];
            binom = binom * (n - m) as f64 / m as f64;
        }
        kappa.push(v);
    }
    kappa
}

/// Cumulants of orders `1..=n_max` from the power sums `S_r = Σ (x − shift)^r`
/// of `count` values: k-statistics up to order four, plug-in cumulants of the
/// sample moments for orders five and six.
fn cumulants_from_power_sums(s: &[f64; MAX_ORDER + 1], count: f64, shift: f64, n_max: usize) -> Vec<f64> {
    let n = count;
    let (s1, s2, s3, s4) = (s[1], s[2], s[3], s[4]);
    let naive = cumulants_from_raw(&(1..=MAX_ORDER).map(|r| s[r] / n).collect::<Vec<_>>());
    let mut out = vec![shift + s1 / n];
    if n_max >= 2 {
        out.push((n * s2 - s1 * s1) / (n * (n - 1.0)));
    }
    if n_max >= 3 {
        out.push((2.0 * s1.powi(3) - 3.0 * n * s1 * s2 + n * n * s3) / (n * (n - 1.0) * (n - 2.0)));
    }
    if n_max >= 4 {
        out.push(
            (-6.0 * s1.powi(4) + 12.0 * n * s1 * s1 * s2 - 3.0 * n * (n - 1.0) * s2 * s2 - 4.0 * n * (n + 1.0) * s1 * s3
                + n * n * (n + 1.0) * s4)
                / (n * (n - 1.0) * (n - 2.0) * (n - 3.0)),
        );
    }
    out.extend_from_slice(&naive[out.len()..n_max]);
    out
}

fn power_sums(xs: &[f64], shift: f64) -> [f64; MAX_ORDER + 1] {
    let mut s = [0.0; MAX_ORDER + 1];
    for &x in xs {
        let y = x - shift;
        let mut p = 1.0;
        for slot in s.iter_mut() {
            *slot += p;
            p *= y;
        }
    }
    s
}

/// Cumulant estimates of a sample with block-jackknife standard errors.
pub fn cumulants_of_samples(xs: &[f64], n_max: usize) -> Result<Vec<CumulantEstimate>> {
    if n_max == 0 || n_max > MAX_ORDER {
        return Err(Error::InvalidArgument(format!("cumulant order must be in 1..={MAX_ORDER}")));
    }
    if xs.len() < 10 * JACKKNIFE_BLOCKS {
        return Err(Error::InvalidArgument(format!(
            "need at least {} samples for {JACKKNIFE_BLOCKS} jackknife blocks, got {}",
            10 * JACKKNIFE_BLOCKS,
            xs.len()
        )));
    }
    let shift = xs.iter().sum::<f64>() / xs.len() as f64;
    let block_len = xs.len().div_ceil(JACKKNIFE_BLOCKS);
    let blocks: Vec<(usize, [f64; MAX_ORDER + 1])> =
        xs.chunks(block_len).map(|chunk| (chunk.len(), power_sums(chunk, shift))).collect();
    let mut total = [0.0; MAX_ORDER + 1];
    for (_, b) in &blocks {
        for r in 0..=MAX_ORDER {
            total[r] += b[r];
        }
    }
    let full = cumulants_from_power_sums(&total, xs.len() as f64, shift, n_max);
    let nb = blocks.len() as f64;
    let leave_out: Vec<Vec<f64>> = blocks
        .iter()
        .map(|(len, b)| {
            let mut rest = total;
            for r in 0..=MAX_ORDER {
                rest[r] -= b[r];
            }
            cumulants_from_power_sums(&rest, (xs.len() - len) as f64, shift, n_max)
        })
        .collect();
    Ok((0..n_max)
        .map(|k| {
            let mean = leave_out.iter().map(|v| v[k]).sum::<f64>() / nb;
            let var = leave_out.iter().map(|v| (v[k] - mean).powi(2)).sum::<f64>() * (nb - 1.0) / nb;
            CumulantEstimate { order: k + 1, value: full[k], stderr: var.sqrt(), samples: xs.len() }
        })
        .collect())
}

/// Monte Carlo cumulants `C_1..C_{n_max}` of `Tr(A U B U*)`.
pub fn estimate_cumulants(
    a: &DenseOperator,
    b: &DenseOperator,
    n_max: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<CumulantEstimate>> {
    if n_max == 0 || n_max > MAX_ORDER {
        return Err(Error::InvalidArgument(format!("cumulant order must be in 1..={MAX_ORDER}")));
    }
    if samples < 10 * JACKKNIFE_BLOCKS {
        return Err(Error::InvalidArgument(format!("need at least {} samples", 10 * JACKKNIFE_BLOCKS)));
    }
    cumulants_of_samples(&sample_overlaps(a, b, samples, seed)?, n_max)
}

/// Settings of a convergence run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceConfig {
    pub state_a: StateSpec,
    pub state_b: StateSpec,
    pub d: usize,
    pub dims: Vec<usize>,
    pub orders: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub family: Family,
}

/// One row of a convergence table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(rename = "N")]
    pub dim: usize,
    pub n: usize,
    pub regime: String,
    pub gamma: f64,
    pub delta: f64,
    /// `C_n(N^γ Tr)`.
    pub measured: f64,
    pub stderr: f64,
    /// `N^δ Σ_{leading} tr_σ(a) tr_{τ⁻¹}(b) f[σ,τ]`.
    pub predicted: f64,
    /// `measured / predicted`.
    pub ratio: f64,
    pub ratio_stderr: f64,
}

/// The density-normalized ansatz `(α, β, ε)` of both families at size `N`.
pub fn state_ansatz(a: &StateSpec, b: &StateSpec, dim: usize, d: usize) -> Result<ScalingAnsatz> {
    let (ba, ea) = effective_exponents(a, dim, d)?;
    let (bb, eb) = effective_exponents(b, dim, d)?;
    Ok(ScalingAnsatz::new(SideExponents::normalized(ba, ea, d), SideExponents::normalized(bb, eb, d)))
}

/// Rescaled invariants `tr_σ = Tr_σ / N^{α n + β Σ#σ_c + ε Σ#(σ_{c1}σ_{c2}⁻¹)}` on `tuples`.
pub fn rescaled_invariants(
    op: &DenseOperator,
    side: &SideExponents,
    tuples: impl IntoIterator<Item = crate::perm::PermTuple>,
) -> Result<InvariantTable> {
    let mut table = InvariantTable::new();
    let ln_n = (op.dim() as f64).ln();
    for t in tuples {
        let v = evaluate_trace_invariant(op, &t)?;
        table.insert(t.clone(), v * (-side.exponent(&t) * ln_n).exp());
    }
    Ok(table)
}

/// Measured versus predicted leading-order cumulants over a list of sizes.
pub fn convergence_table(cfg: &ConvergenceConfig) -> Result<Vec<ConvergenceRow>> {
    let n_max = cfg.orders.iter().copied().max().unwrap_or(0);
    if n_max == 0 || n_max > MAX_ORDER {
        return Err(Error::InvalidArgument(format!("orders must lie in 1..={MAX_ORDER}")));
    }
    let mut rows = Vec::new();
    for &dim in &cfg.dims {
        let a = build_state(&cfg.state_a, dim, cfg.d)?;
        let b = build_state(&cfg.state_b, dim, cfg.d)?;
        let ans = state_ansatz(&cfg.state_a, &cfg.state_b, dim, cfg.d)?;
        let report: RegimeReport = classify(cfg.d, &ans, cfg.family)?;
        let gamma = report.effective_gamma();
        let est = estimate_cumulants(&a, &b, n_max, cfg.samples, cfg.seed)?;
        let nf = dim as f64;
        for &n in &cfg.orders {
            let leading = enumerate_leading(cfg.d, n, report.regime)?;
            let tr_a = rescaled_invariants(&a, &ans.a, leading.iter().map(|g| g.sigma.clone()))?;
            let tr_b = rescaled_invariants(&b, &ans.b, leading.iter().map(|g| g.tau.inverse()))?;
            let limit = asymptotic_cumulant(cfg.d, n, report.regime, &tr_a, &tr_b)?;
            let predicted = nf.powf(report.delta) * limit.re;
            let scale = nf.powf(gamma * n as f64);
            let e = &est[n - 1];
            let measured = e.value * scale;
            let stderr = e.stderr * scale;
            rows.push(ConvergenceRow {
                dim,
                n,
                regime: report.regime.label(),
                gamma,
                delta: report.delta,
                measured,
                stderr,
                predicted,
                ratio: measured / predicted,
                ratio_stderr: stderr / predicted.abs(),
            });
        }
    }
    Ok(rows)
}

/// CSV rendering of a convergence table.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("N,n,regime,gamma,delta,measured,stderr,predicted,ratio,ratio_stderr\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{:.10e},{:.4e},{:.10e},{:.8},{:.4e}\n",
            r.dim, r.n, r.regime, r.gamma, r.delta, r.measured, r.stderr, r.predicted, r.ratio, r.ratio_stderr
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{exact_moment, TraceTable};
    use crate::tensors::{trace_table, FactorSpec};

    #[test]
    fn haar_factors_are_unitary() {
        let u = HaarTuple::for_sample(6, 3, 1, 0).unwrap();
        assert!(u.unitarity_residual() < 1e-10);
        assert_eq!(HaarTuple::for_sample(6, 3, 1, 0).unwrap(), u);
        assert_ne!(HaarTuple::for_sample(6, 3, 1, 1).unwrap(), u);
    }

    #[test]
    fn haar_low_moments() {
        let dim = 3;
        let count = 100_000;
        let draws: Vec<Complex64> =
            (0..count as u64).map(|i| HaarTuple::for_sample(dim, 1, 5, i).unwrap().factors()[0][(0, 0)]).collect();
        let mean: Complex64 = draws.iter().sum::<Complex64>() / count as f64;
        let sd = (1.0 / dim as f64 / count as f64).sqrt();
        assert!(mean.re.abs() < 4.0 * sd && mean.im.abs() < 4.0 * sd, "{mean}");
        let sq: Vec<f64> = draws.iter().map(|z| z.norm_sqr()).collect();
        let m = sq.iter().sum::<f64>() / count as f64;
        let var = sq.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (count as f64 - 1.0);
        assert!((m - 1.0 / dim as f64).abs() < 4.0 * (var / count as f64).sqrt(), "{m}");
    }

    #[test]
    fn trivial_overlaps() {
        let id = DenseOperator::identity(3, 2).unwrap();
        let u = HaarTuple::for_sample(3, 2, 2, 0).unwrap();
        assert!((sample_overlap(&id, &id, &u).unwrap() - 9.0).abs() < 1e-10);
        let p = build_state(&StateSpec::PureSeparable { seed: None }, 3, 2).unwrap();
        assert!((sample_overlap(&p, &p, &HaarTuple::identity(3, 2)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn strategies_agree() {
        let dim = 3;
        let pure = build_state(&StateSpec::OneUniform, dim, 2).unwrap();
        let mixed = build_state(&StateSpec::ProductRank { rank: 2 }, dim, 2).unwrap();
        let full = build_state(
            &StateSpec::SeparableMixture {
                components: vec![crate::tensors::MixtureComponent {
                    weight: 1.0,
                    factors: vec![FactorSpec::Diagonal { diag: vec![1.0, 2.0, 3.0] }; 2],
                }],
            },
            dim,
            2,
        )
        .unwrap();
        for k in 0..5 {
            let u = HaarTuple::for_sample(dim, 2, 8, k).unwrap();
            let reference =
                |x: &DenseOperator, y: &DenseOperator| (x.to_matrix() * y.conjugate_local(u.factors()).unwrap().to_matrix()).trace().re;
            for (x, y) in [(&pure, &full), (&full, &pure), (&mixed, &pure)] {
                assert!((sample_overlap(x, y, &u).unwrap() - reference(x, y)).abs() < 1e-12);
            }
            let v1 = sample_overlap(&full, &mixed, &u).unwrap();
            let v2 = (full.to_matrix() * mixed.conjugate_local(u.factors()).unwrap().to_matrix()).trace().re;
            assert!((v1 - v2).abs() < 1e-12);
            let v3 = sample_overlap(&full, &full, &u).unwrap();
            let v4 = (full.to_matrix() * full.conjugate_local(u.factors()).unwrap().to_matrix()).trace().re;
            assert!((v3 - v4).abs() < 1e-12);
        }
    }

    #[test]
    fn first_moment_matches_exact() {
        let dim = 3;
        let a = build_state(&StateSpec::OneUniform, dim, 2).unwrap();
        let b = build_state(&StateSpec::PureSeparable { seed: Some(4) }, dim, 2).unwrap();
        let est = estimate_cumulants(&a, &b, 2, 100_000, 3).unwrap();
        assert!((est[0].value - 1.0 / 9.0).abs() < 4.0 * est[0].stderr);
        assert!(est.iter().all(|e| e.stderr >= 0.0 && e.value.is_finite()));
    }

    #[test]
    fn constant_variable_has_no_higher_cumulants() {
        let id = DenseOperator::identity(2, 2).unwrap();
        let est = estimate_cumulants(&id, &id, 6, 2000, 1).unwrap();
        assert!((est[0].value - 4.0).abs() < 1e-12);
        for e in &est[1..] {
            assert!(e.value.abs() < 1e-9, "{e:?}");
        }
    }

    #[test]
    fn rank_one_first_moment_in_one_color() {
        let dim = 4;
        let p = build_state(&StateSpec::PureSeparable { seed: None }, dim, 1).unwrap();
        let q = build_state(&StateSpec::PureSeparable { seed: Some(2) }, dim, 1).unwrap();
        let est = estimate_cumulants(&p, &q, 1, 200_000, 9).unwrap();
        assert!((est[0].value - 0.25).abs() < 4.0 * est[0].stderr);
    }

    #[test]
    fn cumulants_scale_homogeneously_and_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<f64> = (0..5000).map(|_| rng.sample::<f64, _>(rand_distr::Exp1)).collect();
        let base = cumulants_of_samples(&xs, 6).unwrap();
        let t = -1.7;
        let scaled: Vec<f64> = xs.iter().map(|x| t * x).collect();
        let shifted: Vec<f64> = xs.iter().map(|x| x + 3.0).collect();
        let sc = cumulants_of_samples(&scaled, 6).unwrap();
        let sh = cumulants_of_samples(&shifted, 6).unwrap();
        for k in 0..6 {
            let want = base[k].value * t.powi(k as i32 + 1);
            assert!((sc[k].value - want).abs() <= 1e-9 * want.abs().max(1.0), "order {}", k + 1);
            if k > 0 {
                assert!((sh[k].value - base[k].value).abs() <= 1e-8 * base[k].value.abs().max(1.0));
            }
        }
        // exponential law: κ_n = (n−1)!
        for (k, want) in [1.0, 1.0, 2.0, 6.0].iter().enumerate() {
            assert!((base[k].value - want).abs() < 5.0 * base[k].stderr + 1e-3, "order {}", k + 1);
        }
        assert!(cumulants_of_samples(&xs[..999], 2).is_err());
    }

    #[test]
    fn k_statistics_are_unbiased_on_small_samples() {
        // average of k-statistics over all samples of size 4 drawn with
        // replacement from {0, 1, 3} equals the population cumulants
        let pop = [0.0, 1.0, 3.0];
        let mu: Vec<f64> = (1..=4).map(|r| pop.iter().map(|x: &f64| x.powi(r)).sum::<f64>() / 3.0).collect();
        let kappa = cumulants_from_raw(&mu);
        let mut acc = [0.0; 4];
        let mut count = 0.0;
        for i in 0..81usize {
            let xs: Vec<f64> = (0..4).map(|p| pop[(i / 3usize.pow(p)) % 3]).collect();
            let k = cumulants_from_power_sums(&power_sums(&xs, 0.0), 4.0, 0.0, 3);
            for r in 0..3 {
                acc[r] += k[r];
            }
            count += 1.0;
        }
        for r in 0..3 {
            assert!((acc[r] / count - kappa[r]).abs() < 1e-12, "order {}", r + 1);
        }
    }

    #[test]
    fn seeds_fix_the_estimate() {
        let a = build_state(&StateSpec::OneUniform, 2, 2).unwrap();
        let b = build_state(&StateSpec::ProductRank { rank: 1 }, 2, 2).unwrap();
        let x = estimate_cumulants(&a, &b, 3, 2000, 77).unwrap();
        let y = estimate_cumulants(&a, &b, 3, 2000, 77).unwrap();
        assert_eq!(x, y);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let z = pool.install(|| estimate_cumulants(&a, &b, 3, 2000, 77).unwrap());
        assert_eq!(x, z);
    }

    #[test]
    fn monte_carlo_matches_exact_moments() {
        let dim = 3usize;
        let a = build_state(&StateSpec::PureSeparable { seed: Some(1) }, dim, 2).unwrap();
        let b = build_state(&StateSpec::ProductRank { rank: 2 }, dim, 2).unwrap();
        let xs = sample_overlaps(&a, &b, 200_000, 21).unwrap();
        for n in 1..=3usize {
            let ta: TraceTable<Complex64> = trace_table(&a, n).unwrap();
            let tb: TraceTable<Complex64> = trace_table(&b, n).unwrap();
            let exact = exact_moment(&ta, &tb, dim as u64).unwrap();
            let powered: Vec<f64> = xs.iter().map(|x| x.powi(n as i32)).collect();
            let m = powered.iter().sum::<f64>() / xs.len() as f64;
            let var = powered.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0);
            let se = (var / xs.len() as f64).sqrt();
            assert!(exact.im.abs() < 1e-12);
            assert!((m - exact.re).abs() < 4.0 * se, "n = {n}: {m} vs {}", exact.re);
        }
    }

    #[test]
    fn convergence_rows_are_well_formed() {
        let cfg = ConvergenceConfig {
            state_a: StateSpec::PureSeparable { seed: None },
            state_b: StateSpec::OneUniform,
            d: 2,
            dims: vec![3],
            orders: vec![1, 2],
            samples: 20_000,
            seed: 4,
            family: Family::MicroA,
        };
        let rows = convergence_table(&cfg).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.regime == "V"));
        let csv = convergence_csv(&rows);
        assert!(csv.starts_with("N,n,regime"));
        assert_eq!(csv.lines().count(), 3);
    }
}
