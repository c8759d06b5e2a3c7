//! Scaling ansätze, exponent bookkeeping, the `(β, ε)` regime classifier,
//! leading-order predicates with structured enumeration, asymptotic
//! cumulants and moments, and brute-force oracles.
//!
//! Exponents of trace-invariants follow
//! `s(τ) = α n + β Σ_c #(τ_c) + ε Σ_{c1<c2} #(τ_{c1} τ_{c2}⁻¹)`.  The rescaling
//! exponent `γ` reported by [`classify`] assumes `α_A = α_B = 0`; non-zero
//! `α`s are accounted for by the explicit [`RegimeReport::gamma_shift`].

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeff::{leading_weingarten, weingarten_exponent};
use crate::error::{Error, Result};
use crate::exact::{binomial, factorial, ExactRational};
use crate::graphs::{box_tau, box_value, delta, genus, sigma_c_degree, sigma_degree, sum_pair_cycles, HalfInt};
use crate::perm::{is_noncrossing_on, noncrossing_on, PermTuple, Permutation};

/// Absolute tolerance used when comparing scaling parameters.
pub const PARAMETER_TOLERANCE: f64 = 1e-12;

/// Tolerance used when comparing total exponents of different graphs.
pub const EXPONENT_TOLERANCE: f64 = 1e-9;

/// Largest `n` for regimes with a structural generator (V, III for `D ≥ 3`, IV, II, VIII).
pub const STRUCTURED_CAP: usize = 8;

/// Largest `n` for regimes enumerated by filtering a structured superset.
pub const FILTERED_CAP: usize = 5;

/// Largest number of pairs [`brute_force_leading`] scans.
pub const BRUTE_FORCE_CAP: usize = 2_000_000;

/// The three families of ansätze covered by the classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// One color, arbitrary `β_A ≤ β_B`.
    #[serde(rename = "D1")]
    D1,
    /// `A` microscopic (`β_A = ε_A = 0`), `B` with `β, ε ≥ 0`.
    #[serde(rename = "microA")]
    MicroA,
    /// `β_A = β_B = β`, `ε_A = ε_B = ε ≥ 0`.
    #[serde(rename = "symmetric")]
    Symmetric,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::D1 => "D1",
            Family::MicroA => "microA",
            Family::Symmetric => "symmetric",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d1" => Ok(Family::D1),
            "microa" | "micro-a" | "micro_a" | "micro" => Ok(Family::MicroA),
            "symmetric" | "sym" => Ok(Family::Symmetric),
            _ => Err(Error::Parse(format!("unknown family '{s}' (expected D1, microA or symmetric)"))),
        }
    }
}

/// A regime: items `1..=6` for `D = 1`, `1..=8` (I–VIII) for the other families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Regime {
    pub family: Family,
    pub index: u8,
}

const ROMAN: [&str; 8] = ["I", "II", "III", "IV", "V", "VI", "VII", "VIII"];

impl Regime {
    pub fn new(family: Family, index: u8) -> Result<Self> {
        let max = if family == Family::D1 { 6 } else { 8 };
        if index == 0 || index > max {
            return Err(Error::InvalidArgument(format!("regime index {index} out of range for {family}")));
        }
        Ok(Self { family, index })
    }

    /// Every regime of a family.
    pub fn all(family: Family) -> Vec<Regime> {
        let max = if family == Family::D1 { 6 } else { 8 };
        (1..=max).map(|index| Regime { family, index }).collect()
    }

    /// `"D1-3"`, `"V"`, `"S-II"`.
    pub fn label(&self) -> String {
        match self.family {
            Family::D1 => format!("D1-{}", self.index),
            Family::MicroA => ROMAN[self.index as usize - 1].to_string(),
            Family::Symmetric => format!("S-{}", ROMAN[self.index as usize - 1]),
        }
    }

    /// Several `σ` admit more than one leading `τ`.
    pub fn is_prolific(&self) -> bool {
        match self.family {
            Family::D1 => matches!(self.index, 1 | 2),
            Family::MicroA => matches!(self.index, 1 | 2 | 7),
            Family::Symmetric => matches!(self.index, 1 | 2),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let roman = |r: &str| ROMAN.iter().position(|x| *x == r).map(|i| i as u8 + 1);
        if let Some(rest) = s.strip_prefix("D1-") {
            let k: u8 = rest.parse().map_err(|_| Error::Parse(format!("bad regime label '{s}'")))?;
            return Regime::new(Family::D1, k);
        }
        if let Some(rest) = s.strip_prefix("S-") {
            let k = roman(rest).ok_or_else(|| Error::Parse(format!("bad regime label '{s}'")))?;
            return Regime::new(Family::Symmetric, k);
        }
        let k = roman(s).ok_or_else(|| Error::Parse(format!("bad regime label '{s}'")))?;
        Regime::new(Family::MicroA, k)
    }
}

impl Serialize for Regime {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for Regime {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exponents of one side of the ansatz.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct SideExponents {
    pub alpha: f64,
    pub beta: f64,
    pub eps: f64,
}

impl SideExponents {
    /// `α n + β Σ_c #(t_c) + ε Σ_{c1<c2} #(t_{c1} t_{c2}⁻¹)`.
    pub fn exponent(&self, t: &PermTuple) -> f64 {
        invariant_scaling_exponent(t, self.alpha, self.beta, self.eps)
    }

    /// `α = −β D − ε D(D−1)/2`, which makes `Tr` of order one.
    pub fn normalized(beta: f64, eps: f64, d: usize) -> Self {
        let d = d as f64;
        Self { alpha: -beta * d - eps * d * (d - 1.0) / 2.0, beta, eps }
    }
}

/// Scaling exponents of the trace-invariants of `A` and `B`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct ScalingAnsatz {
    pub a: SideExponents,
    pub b: SideExponents,
}

impl ScalingAnsatz {
    pub fn new(a: SideExponents, b: SideExponents) -> Self {
        Self { a, b }
    }

    /// Both sides microscopic.
    pub fn microscopic() -> Self {
        Self::default()
    }

    /// `A` microscopic, `B` with `(β, ε)`, `α = 0`.
    pub fn micro_a(beta: f64, eps: f64) -> Self {
        Self { a: SideExponents::default(), b: SideExponents { alpha: 0.0, beta, eps } }
    }

    /// Both sides `(β, ε)`, `α = 0`.
    pub fn symmetric(beta: f64, eps: f64) -> Self {
        let s = SideExponents { alpha: 0.0, beta, eps };
        Self { a: s, b: s }
    }

    /// One color with `β_A`, `β_B`.
    pub fn d1(beta_a: f64, beta_b: f64) -> Self {
        Self {
            a: SideExponents { alpha: 0.0, beta: beta_a, eps: 0.0 },
            b: SideExponents { alpha: 0.0, beta: beta_b, eps: 0.0 },
        }
    }
}

/// Which operator a side of the ansatz refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// `α n + β Σ_c #(t_c) + ε Σ_{c1<c2} #(t_{c1} t_{c2}⁻¹)`.
pub fn invariant_scaling_exponent(t: &PermTuple, alpha: f64, beta: f64, eps: f64) -> f64 {
    let cycles: usize = t.perms().iter().map(Permutation::cycle_count).sum();
    alpha * t.n() as f64 + beta * cycles as f64 + eps * sum_pair_cycles(t) as f64
}

/// `s(σ,τ) = Σ_c #(σ_c τ_c⁻¹) − 2|Π(σ,τ)| + 2`.
pub fn pair_scaling_exponent(s: &PermTuple, t: &PermTuple) -> Result<i64> {
    weingarten_exponent(s, t)
}

/// Power of `N` of the `(σ, τ)` term in `C_n(N^γ Tr(AUBU*))`:
/// `n(γ − 2D) + s(σ,τ) + s_A(σ) + s_B(τ)`.
pub fn total_exponent(s: &PermTuple, t: &PermTuple, ans: &ScalingAnsatz, gamma: f64) -> Result<f64> {
    let n = s.n() as f64;
    let d = s.d() as f64;
    Ok(n * (gamma - 2.0 * d) + pair_scaling_exponent(s, t)? as f64 + ans.a.exponent(s) + ans.b.exponent(t))
}

/// The same exponent regrouped through the Euler relation of each
/// `(σ_c, τ_c)`:
/// `n(γ − D + α_A + α_B) − 2(|Π(σ,τ)| − 1) + 2 Σ_c |Π(σ_c,τ_c)| − 2 Σ_c g(σ_c,τ_c)
///  − (1−β_A) Σ_c #(σ_c) − (1−β_B) Σ_c #(τ_c) + ε_A Σ #(σ_{c1}σ_{c2}⁻¹) + ε_B Σ #(τ_{c1}τ_{c2}⁻¹)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentDecomposition {
    pub linear: f64,
    pub components: i64,
    pub color_components: i64,
    pub genera: HalfInt,
    pub sigma_cycles: f64,
    pub tau_cycles: f64,
    pub sigma_entangled: f64,
    pub tau_entangled: f64,
}

impl ExponentDecomposition {
    pub fn total(&self) -> f64 {
        self.linear - 2.0 * self.components as f64 + 2.0 * self.color_components as f64
            - 2.0 * self.genera.to_f64()
            + self.sigma_cycles
            + self.tau_cycles
            + self.sigma_entangled
            + self.tau_entangled
    }
}

pub fn total_exponent_decomposed(
    s: &PermTuple,
    t: &PermTuple,
    ans: &ScalingAnsatz,
    gamma: f64,
) -> Result<ExponentDecomposition> {
    s.check_shape(t)?;
    let n = s.n() as f64;
    let d = s.d() as f64;
    let k = s.joint_orbit_partition(t)?.len() as i64;
    let mut kc = 0i64;
    let mut g = HalfInt::ZERO;
    for c in 0..s.d() {
        kc += crate::graphs::pair_orbit_count(s.get(c), t.get(c)) as i64;
        g = g + genus(s.get(c), t.get(c))?;
    }
    let cyc = |x: &PermTuple| x.perms().iter().map(Permutation::cycle_count).sum::<usize>() as f64;
    Ok(ExponentDecomposition {
        linear: n * (gamma - d + ans.a.alpha + ans.b.alpha),
        components: k - 1,
        color_components: kc,
        genera: g,
        sigma_cycles: -(1.0 - ans.a.beta) * cyc(s),
        tau_cycles: -(1.0 - ans.b.beta) * cyc(t),
        sigma_entangled: ans.a.eps * sum_pair_cycles(s) as f64,
        tau_entangled: ans.b.eps * sum_pair_cycles(t) as f64,
    })
}

/// Classification result.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub family: Family,
    pub regime: Regime,
    /// Rescaling exponent for the normalized `α_A = α_B = 0` convention.
    pub gamma: f64,
    /// Overall exponent: `C_n(N^γ Tr) ~ N^δ c_n`.
    pub delta: f64,
    pub prolific: bool,
    /// Add to `gamma` when the ansatz carries non-zero `α`s: `−(α_A + α_B)`.
    pub gamma_shift: f64,
}

impl RegimeReport {
    /// `γ + gamma_shift`: the rescaling to use with the ansatz as given.
    pub fn effective_gamma(&self) -> f64 {
        self.gamma + self.gamma_shift
    }
}

fn eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= PARAMETER_TOLERANCE
}

fn lt(a: f64, b: f64) -> bool {
    a < b - PARAMETER_TOLERANCE
}

/// Region of the `(β, ε)` quadrant for `D ≥ 2` (shared by both families):
/// returns the Roman index 1..=8.
fn region(d: usize, beta: f64, eps: f64) -> u8 {
    let inv_d = 1.0 / d as f64;
    let line = 1.0 - eps * (d as f64 - 1.0);
    if eq(beta, eps) {
        if eq(beta, 0.0) {
            6
        } else if lt(beta, inv_d) {
            3
        } else if eq(beta, inv_d) {
            1
        } else {
            8
        }
    } else if lt(beta, eps) {
        if lt(beta, inv_d) {
            5
        } else if eq(beta, inv_d) {
            7
        } else {
            8
        }
    } else if lt(beta, line) {
        4
    } else if eq(beta, line) {
        2
    } else {
        8
    }
}

/// Classifies an ansatz within one of the covered families.
pub fn classify(d: usize, ans: &ScalingAnsatz, family: Family) -> Result<RegimeReport> {
    let gamma_shift = 0.0 - (ans.a.alpha + ans.b.alpha);
    let (regime, gamma, delta) = match family {
        Family::D1 => {
            if d != 1 {
                return Err(Error::OutsideFamily(format!("the D1 family needs D = 1, got D = {d}")));
            }
            let (ba, bb) = (ans.a.beta, ans.b.beta);
            if lt(bb, ba) {
                return Err(Error::OutsideFamily(format!("D1 family assumes β_A ≤ β_B (got {ba} > {bb})")));
            }
            let index = if eq(bb, 1.0) {
                if eq(ba, 1.0) {
                    1
                } else {
                    2
                }
            } else if lt(bb, 1.0) {
                3
            } else if lt(ba, 1.0) {
                4
            } else if eq(ba, 1.0) {
                5
            } else {
                6
            };
            let gamma = 3.0 - ba.max(1.0) - bb.max(1.0);
            let delta = ba + bb + 2.0 - ba.max(1.0) - bb.max(1.0);
            (Regime { family, index }, gamma, delta)
        }
        Family::MicroA | Family::Symmetric => {
            if d < 2 {
                return Err(Error::OutsideFamily(format!("{family} family needs D ≥ 2")));
            }
            let (beta, eps) = (ans.b.beta, ans.b.eps);
            if lt(beta, 0.0) || lt(eps, 0.0) {
                return Err(Error::OutsideFamily(format!("β, ε must be non-negative (got β = {beta}, ε = {eps})")));
            }
            if family == Family::MicroA && !(eq(ans.a.beta, 0.0) && eq(ans.a.eps, 0.0)) {
                return Err(Error::OutsideFamily("microA family needs β_A = ε_A = 0".into()));
            }
            if family == Family::Symmetric && !(eq(ans.a.beta, beta) && eq(ans.a.eps, eps)) {
                return Err(Error::OutsideFamily("symmetric family needs β_A = β_B and ε_A = ε_B".into()));
            }
            let index = region(d, beta, eps);
            let df = d as f64;
            let pairs = df * (df - 1.0) / 2.0;
            let (gamma, delta) = if family == Family::MicroA {
                match index {
                    1 => ((df + 1.0) / 2.0, 1.0),
                    2 => (1.0 + eps * pairs, 1.0),
                    3 => (df - eps * pairs, eps * df),
                    4 => (df - (df - 1.0) * (beta - eps + eps * df / 2.0), beta + eps * (df - 1.0)),
                    5 => (df - eps * pairs, beta * df),
                    6 => (df, 0.0),
                    7 => (df - eps * pairs, 1.0),
                    _ => (df + 1.0 - eps * pairs - beta * df, 1.0),
                }
            } else {
                let ent = df * (1.0 - eps * (df - 1.0));
                match index {
                    1 => (1.0, 2.0),
                    2 => (2.0 - df + eps * df * (df - 1.0), 2.0),
                    3 => (ent, 2.0 * eps * df),
                    4 => (df - (df - 1.0) * (eps * (df - 2.0) + 2.0 * beta), 2.0 * (beta + eps * (df - 1.0))),
                    5 => (ent, 2.0 * beta * df),
                    6 => (df, 0.0),
                    7 => (ent, 2.0),
                    _ => (df + 2.0 - eps * df * (df - 1.0) - 2.0 * beta * df, 2.0),
                }
            };
            (Regime { family, index }, gamma, delta)
        }
    };
    Ok(RegimeReport { family, regime, gamma, delta, prolific: regime.is_prolific(), gamma_shift })
}

fn all_equal_full_cycle(s: &PermTuple) -> bool {
    s.is_uniform() && s.get(0).is_full_cycle()
}

fn is_cmelonic_connected(s: &PermTuple) -> bool {
    s.is_connected() && sigma_c_degree(s) == HalfInt::ZERO
}

fn is_noncrossing_tuple(t: &PermTuple, s: &PermTuple) -> Result<bool> {
    for c in 0..s.d() {
        if !is_noncrossing_on(t.get(c), s.get(c))? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn all_genera_zero(s: &PermTuple, t: &PermTuple) -> Result<bool> {
    for c in 0..s.d() {
        if genus(s.get(c), t.get(c))? != HalfInt::ZERO {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Leading-order predicate of a regime.
pub fn is_leading(s: &PermTuple, t: &PermTuple, regime: Regime) -> Result<bool> {
    s.check_shape(t)?;
    let d = s.d();
    if (regime.family == Family::D1) != (d == 1) {
        return Err(Error::InvalidArgument(format!("regime {regime} does not apply to D = {d}")));
    }
    let melonic = |x: &PermTuple| sigma_degree(x) == HalfInt::ZERO;
    let id = PermTuple::identity(s.n(), d);
    use Family::*;
    Ok(match (regime.family, regime.index) {
        (D1, 1) => genus(s.get(0), t.get(0))? == HalfInt::ZERO,
        (D1, 2) => s.get(0).is_full_cycle() && is_noncrossing_on(t.get(0), s.get(0))?,
        (D1, 3) => s == t && s.get(0).is_full_cycle(),
        (D1, 4) => s.get(0).is_full_cycle() && t.is_identity(),
        (D1, 5) => t.is_identity(),
        (D1, _) => s.is_identity() && t.is_identity(),
        (MicroA | Symmetric, 6) => s == t && s.is_connected(),
        (MicroA | Symmetric, 5) => s == t && all_equal_full_cycle(s),
        (MicroA | Symmetric, 3) => s == t && s.is_connected() && melonic(s),
        (MicroA | Symmetric, 4) => s == t && is_cmelonic_connected(s),
        (MicroA, 1) => {
            s.is_connected() && is_noncrossing_tuple(t, s)? && melonic(t) && box_tau(s, t)? == 0
        }
        (MicroA, 2) => is_cmelonic_connected(s) && is_noncrossing_tuple(t, s)?,
        (MicroA, 7) => s.is_connected() && t.is_uniform() && is_noncrossing_tuple(t, s)? && box_tau(s, t)? == 0,
        (MicroA, _) => is_cmelonic_connected(s) && *t == id,
        (Symmetric, 1) => {
            melonic(s) && melonic(t) && box_value(s, t)? == HalfInt::ZERO && all_genera_zero(s, t)?
        }
        (Symmetric, 2) => delta(s, t)? == 0 && all_genera_zero(s, t)?,
        (Symmetric, 7) => s == t && s.is_uniform(),
        (Symmetric, _) => s.is_identity() && t.is_identity(),
    })
}

/// A leading-order pair with its coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeadingGraph {
    #[serde(with = "tuple_string")]
    pub sigma: PermTuple,
    #[serde(with = "tuple_string")]
    pub tau: PermTuple,
    pub coeff: ExactRational,
}

mod tuple_string {
    use super::PermTuple;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &PermTuple, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&t.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<PermTuple, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// CSV rendering with columns `sigma,tau,f_num,f_den`.
pub fn leading_graphs_csv(graphs: &[LeadingGraph]) -> String {
    let mut s = String::from("sigma,tau,f_num,f_den\n");
    for g in graphs {
        s.push_str(&format!("\"{}\",\"{}\",{},{}\n", g.sigma, g.tau, g.coeff.numer(), g.coeff.denom()));
    }
    s
}

fn tuple_work(n: usize, d: usize) -> usize {
    let fact: usize = (1..=n).product();
    fact.saturating_pow(d as u32)
}

fn check_cap(n: usize, cap: usize, what: &'static str) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded { what, requested: n, cap });
    }
    Ok(())
}

/// All connected tuples of `S_n^D`, in enumeration order.
pub fn connected_tuples(n: usize, d: usize) -> Result<Vec<PermTuple>> {
    if tuple_work(n, d) > BRUTE_FORCE_CAP {
        return Err(Error::CapExceeded { what: "connected tuple scan (n!)^D", requested: n, cap: FILTERED_CAP });
    }
    Ok(PermTuple::all(n, d).filter(PermTuple::is_connected).collect())
}

/// The `(n−1)!` full cycles of `S_n`.
pub fn full_cycles(n: usize) -> Vec<Permutation> {
    if n == 1 {
        return vec![Permutation::identity(1)];
    }
    // cycles (0 a_1 … a_{n−1}) for every ordering of 1..n−1
    let rest: Vec<usize> = (1..n).collect();
    let mut out = Vec::new();
    for order in Permutation::all(n - 1) {
        let seq: Vec<usize> = std::iter::once(0).chain(order.as_zero_based().iter().map(|&i| rest[i])).collect();
        let mut images = vec![0usize; n];
        for k in 0..n {
            images[seq[k]] = seq[(k + 1) % n];
        }
        out.push(Permutation::from_zero_based(images).expect("a cycle is a permutation"));
    }
    out
}

type Images = Vec<Vec<usize>>;

fn shift_in(perms: &Images, label: usize) -> Images {
    let up = |y: usize| if y >= label { y + 1 } else { y };
    perms
        .iter()
        .map(|p| {
            let mut q = vec![label; p.len() + 1];
            for (x, &y) in p.iter().enumerate() {
                q[up(x)] = up(y);
            }
            q
        })
        .collect()
}

fn to_tuple(perms: &Images) -> PermTuple {
    PermTuple::new_unchecked(perms.iter().map(|p| Permutation::from_zero_based_unchecked(p.clone())).collect())
}

/// Largest label moving in exactly one color, if any.
fn last_single_color_leaf(perms: &Images) -> Option<usize> {
    let n = perms[0].len();
    (0..n).rev().find(|&x| perms.iter().filter(|p| p[x] != x).count() == 1)
}

/// Connected tuples with vanishing thick-color c-degree, generated by
/// inserting a label into one cycle of one color (canonical augmentation on
/// the largest such label, so each tuple appears once).
pub fn cmelonic_tuples(n: usize, d: usize) -> Result<Vec<PermTuple>> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("n and D must be positive".into()));
    }
    check_cap(n, STRUCTURED_CAP, "(D+1)-melonic generator order")?;
    let mut out = Vec::new();
    fn grow(cur: &Images, target: usize, out: &mut Vec<PermTuple>) {
        let m = cur[0].len();
        if m == target {
            out.push(to_tuple(cur));
            return;
        }
        for label in 0..=m {
            let base = shift_in(cur, label);
            for c in 0..cur.len() {
                for x in (0..=m).filter(|&x| x != label) {
                    let mut child = base.clone();
                    let y = child[c][x];
                    child[c][x] = label;
                    child[c][label] = y;
                    if last_single_color_leaf(&child) == Some(label) {
                        grow(&child, target, out);
                    }
                }
            }
        }
    }
    grow(&vec![vec![0usize]; d], n, &mut out);
    out.sort_by_key(PermTuple::lex_rank);
    Ok(out)
}

/// White label of the melon with the largest white label (`D ≥ 3`), with a
/// flag telling whether its external color is the thick one.
fn last_melon(perms: &Images) -> Option<usize> {
    let n = perms[0].len();
    let d = perms.len();
    (0..n).rev().find(|&w| {
        let fixed = perms.iter().filter(|p| p[w] == w).count();
        let thick_melon = w != perms[0][w] && perms.iter().all(|p| p[w] == perms[0][w]);
        (fixed == d - 1) || thick_melon
    })
}

/// Connected tuples of vanishing degree.  For `D ≥ 3` they are the melonic
/// graphs, generated by recursive melon insertion on an edge of any color; for
/// `D = 2` vanishing degree is planarity and the connected tuples are filtered.
pub fn melonic_tuples(n: usize, d: usize) -> Result<Vec<PermTuple>> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("n and D must be positive".into()));
    }
    if d <= 2 {
        check_cap(n, FILTERED_CAP + 1, "planar (D = 2) tuple scan order")?;
        return Ok(connected_tuples(n, d)?.into_iter().filter(|t| sigma_degree(t) == HalfInt::ZERO).collect());
    }
    check_cap(n, STRUCTURED_CAP, "melonic generator order")?;
    let mut out = Vec::new();
    fn grow(cur: &Images, target: usize, out: &mut Vec<PermTuple>) {
        let m = cur[0].len();
        if m == target {
            out.push(to_tuple(cur));
            return;
        }
        let d = cur.len();
        for label in 0..=m {
            let base = shift_in(cur, label);
            // melon on an edge of tuple color c (external color c)
            for c in 0..d {
                for x in (0..=m).filter(|&x| x != label) {
                    let mut child = base.clone();
                    let y = child[c][x];
                    child[c][x] = label;
                    child[c][label] = y;
                    if last_melon(&child) == Some(label) {
                        grow(&child, target, out);
                    }
                }
            }
            // melon on a thick edge: the new white precedes s in every color
            for s in (0..=m).filter(|&s| s != label) {
                let mut child = base.clone();
                for p in child.iter_mut() {
                    let x = p.iter().position(|&v| v == s).expect("bijection");
                    p[x] = label;
                    p[label] = s;
                }
                if last_melon(&child) == Some(label) {
                    grow(&child, target, out);
                }
            }
        }
    }
    grow(&vec![vec![0usize]; d], n, &mut out);
    out.sort_by_key(PermTuple::lex_rank);
    Ok(out)
}

/// All `τ` with `τ_c ⪯ σ_c` for every color.
pub fn noncrossing_tuples(s: &PermTuple) -> Vec<PermTuple> {
    let options: Vec<Vec<Permutation>> = s.perms().iter().map(noncrossing_on).collect();
    cartesian(&options)
}

fn cartesian(options: &[Vec<Permutation>]) -> Vec<PermTuple> {
    let mut out = vec![Vec::<Permutation>::new()];
    for opts in options {
        let mut next = Vec::with_capacity(out.len() * opts.len());
        for prefix in &out {
            for o in opts {
                let mut v = prefix.clone();
                v.push(o.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out.into_iter().map(PermTuple::new_unchecked).collect()
}

/// Genus-zero partners `{t : g(p, t) = 0}` of every permutation, memoized.
struct PlanarPartners {
    all: Vec<Permutation>,
    memo: HashMap<Permutation, Vec<Permutation>>,
}

impl PlanarPartners {
    fn new(n: usize) -> Self {
        Self { all: Permutation::all(n), memo: HashMap::new() }
    }

    fn of(&mut self, p: &Permutation) -> Vec<Permutation> {
        if let Some(v) = self.memo.get(p) {
            return v.clone();
        }
        let v: Vec<Permutation> =
            self.all.iter().filter(|t| genus(p, t).map(|g| g == HalfInt::ZERO).unwrap_or(false)).cloned().collect();
        self.memo.insert(p.clone(), v.clone());
        v
    }

    fn tuples(&mut self, s: &PermTuple) -> Vec<PermTuple> {
        let options: Vec<Vec<Permutation>> = s.perms().iter().map(|p| self.of(p)).collect();
        cartesian(&options)
    }
}

/// Leading pairs of a regime, generated structurally and returned in the
/// canonical order (by `(σ, τ)` enumeration rank).
pub fn enumerate_leading_pairs(d: usize, n: usize, regime: Regime) -> Result<Vec<(PermTuple, PermTuple)>> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("n and D must be positive".into()));
    }
    if (regime.family == Family::D1) != (d == 1) {
        return Err(Error::InvalidArgument(format!("regime {regime} does not apply to D = {d}")));
    }
    use Family::*;
    let diag = |v: Vec<PermTuple>| v.into_iter().map(|s| (s.clone(), s)).collect::<Vec<_>>();
    let mut pairs: Vec<(PermTuple, PermTuple)> = match (regime.family, regime.index) {
        (D1, 1) => {
            check_cap(n, FILTERED_CAP + 1, "planar D = 1 enumeration order")?;
            let mut partners = PlanarPartners::new(n);
            let mut v = Vec::new();
            for s in Permutation::all(n) {
                for t in partners.of(&s) {
                    v.push((PermTuple::new_unchecked(vec![s.clone()]), PermTuple::new_unchecked(vec![t])));
                }
            }
            v
        }
        (D1, 2) => {
            check_cap(n, STRUCTURED_CAP, "cycle enumeration order")?;
            let mut v = Vec::new();
            for s in full_cycles(n) {
                for t in noncrossing_on(&s) {
                    v.push((PermTuple::new_unchecked(vec![s.clone()]), PermTuple::new_unchecked(vec![t])));
                }
            }
            v
        }
        (D1, 3) | (MicroA | Symmetric, 5) => {
            check_cap(n, STRUCTURED_CAP, "cycle enumeration order")?;
            diag(full_cycles(n).iter().map(|c| PermTuple::uniform(c, d)).collect())
        }
        (D1, 4) => {
            check_cap(n, STRUCTURED_CAP, "cycle enumeration order")?;
            full_cycles(n)
                .into_iter()
                .map(|c| (PermTuple::new_unchecked(vec![c]), PermTuple::identity(n, 1)))
                .collect()
        }
        (D1, 5) => {
            check_cap(n, STRUCTURED_CAP, "S_n enumeration order")?;
            Permutation::all(n).into_iter().map(|s| (PermTuple::new_unchecked(vec![s]), PermTuple::identity(n, 1))).collect()
        }
        (D1, _) | (Symmetric, 8) => vec![(PermTuple::identity(n, d), PermTuple::identity(n, d))],
        (MicroA | Symmetric, 6) => {
            check_cap(n, FILTERED_CAP, "connected tuple enumeration order")?;
            diag(connected_tuples(n, d)?)
        }
        (MicroA | Symmetric, 3) => {
            if d <= 2 {
                check_cap(n, FILTERED_CAP, "planar tuple enumeration order")?;
            }
            diag(melonic_tuples(n, d)?)
        }
        (MicroA | Symmetric, 4) => diag(cmelonic_tuples(n, d)?),
        (MicroA, 2) => {
            let mut v = Vec::new();
            for s in cmelonic_tuples(n, d)? {
                for t in noncrossing_tuples(&s) {
                    v.push((s.clone(), t));
                }
            }
            v
        }
        (MicroA, 8) => cmelonic_tuples(n, d)?.into_iter().map(|s| (s, PermTuple::identity(n, d))).collect(),
        (MicroA, 1) => {
            check_cap(n, FILTERED_CAP, "regime I enumeration order")?;
            let mut v = Vec::new();
            for s in connected_tuples(n, d)? {
                for t in noncrossing_tuples(&s) {
                    if sigma_degree(&t) == HalfInt::ZERO && box_tau(&s, &t)? == 0 {
                        v.push((s.clone(), t));
                    }
                }
            }
            v
        }
        (MicroA, _) => {
            // regime VII: uniform τ non-crossing on every color of σ
            check_cap(n, FILTERED_CAP, "regime VII enumeration order")?;
            let mut v = Vec::new();
            for s in connected_tuples(n, d)? {
                for t in noncrossing_on(s.get(0)) {
                    let tt = PermTuple::uniform(&t, d);
                    if is_noncrossing_tuple(&tt, &s)? && box_tau(&s, &tt)? == 0 {
                        v.push((s.clone(), tt));
                    }
                }
            }
            v
        }
        (Symmetric, 1) => {
            check_cap(n, FILTERED_CAP, "regime S-I enumeration order")?;
            if tuple_work(n, d) > BRUTE_FORCE_CAP {
                return Err(Error::CapExceeded { what: "regime S-I tuple scan", requested: n, cap: FILTERED_CAP });
            }
            let mut partners = PlanarPartners::new(n);
            let mut v = Vec::new();
            for s in PermTuple::all(n, d).filter(|s| sigma_degree(s) == HalfInt::ZERO) {
                for t in partners.tuples(&s) {
                    if sigma_degree(&t) == HalfInt::ZERO && box_value(&s, &t)? == HalfInt::ZERO {
                        v.push((s.clone(), t));
                    }
                }
            }
            v
        }
        (Symmetric, 2) => {
            check_cap(n, FILTERED_CAP, "regime S-II enumeration order")?;
            if tuple_work(n, d) > BRUTE_FORCE_CAP {
                return Err(Error::CapExceeded { what: "regime S-II tuple scan", requested: n, cap: FILTERED_CAP });
            }
            let mut partners = PlanarPartners::new(n);
            let mut v = Vec::new();
            for s in PermTuple::all(n, d) {
                for t in partners.tuples(&s) {
                    if delta(&s, &t)? == 0 {
                        v.push((s.clone(), t));
                    }
                }
            }
            v
        }
        (Symmetric, _) => {
            // regime S-VII: σ_c = τ_c = σ for every color
            check_cap(n, STRUCTURED_CAP, "S_n enumeration order")?;
            diag(Permutation::all(n).iter().map(|p| PermTuple::uniform(p, d)).collect())
        }
    };
    pairs.sort_by_key(|(s, t)| (s.lex_rank(), t.lex_rank()));
    Ok(pairs)
}

/// Leading graphs of a regime with their coefficients `f[σ, τ]`.
pub fn enumerate_leading(d: usize, n: usize, regime: Regime) -> Result<Vec<LeadingGraph>> {
    enumerate_leading_pairs(d, n, regime)?
        .into_iter()
        .map(|(sigma, tau)| {
            let coeff = leading_weingarten(&sigma, &tau)?;
            Ok(LeadingGraph { sigma, tau, coeff })
        })
        .collect()
}

/// `|enumerate_leading|`.
pub fn count_leading(d: usize, n: usize, regime: Regime) -> Result<BigUint> {
    Ok(BigUint::from(enumerate_leading_pairs(d, n, regime)?.len()))
}

/// `(1/(nD+1)) binom(nD+1, n)`, the Fuss–Catalan lower bound on leading
/// counts divided by `(n−1)!`.
pub fn fuss_catalan(d: usize, n: usize) -> BigUint {
    binomial(n * d + 1, n) / BigUint::from(n * d + 1)
}

/// Number of connected `(D+1)`-melonic tuples on `n` labels:
/// `(n−1)! · (1/(nD+1)) binom(nD+1, n)`.
pub fn cmelonic_count_formula(d: usize, n: usize) -> BigUint {
    factorial(n - 1) * fuss_catalan(d, n)
}

/// Result of an exhaustive maximization of the total exponent.
#[derive(Clone, Debug)]
pub struct BruteForce {
    pub max_exponent: f64,
    pub argmax: Vec<(PermTuple, PermTuple)>,
}

/// Maximizes [`total_exponent`] over all of `S_n^D × S_n^D`.
pub fn brute_force_leading(d: usize, n: usize, ans: &ScalingAnsatz, gamma: f64) -> Result<BruteForce> {
    let size = tuple_work(n, d);
    if size.saturating_mul(size) > BRUTE_FORCE_CAP {
        return Err(Error::CapExceeded { what: "brute-force pair scan (n!)^{2D}", requested: size * size, cap: BRUTE_FORCE_CAP });
    }
    let tuples: Vec<PermTuple> = PermTuple::all(n, d).collect();
    let sa: Vec<f64> = tuples.iter().map(|t| ans.a.exponent(t)).collect();
    let sb: Vec<f64> = tuples.iter().map(|t| ans.b.exponent(t)).collect();
    let base = n as f64 * (gamma - 2.0 * d as f64);
    // per-σ maxima in parallel, merged in enumeration order
    let rows: Vec<(f64, Vec<usize>)> = (0..tuples.len())
        .into_par_iter()
        .map(|i| {
            let mut best = f64::NEG_INFINITY;
            let mut cols = Vec::new();
            for (j, t) in tuples.iter().enumerate() {
                let e = base + weingarten_exponent(&tuples[i], t).expect("same shape") as f64 + sa[i] + sb[j];
                if e > best + EXPONENT_TOLERANCE {
                    best = e;
                    cols.clear();
                    cols.push(j);
                } else if (e - best).abs() <= EXPONENT_TOLERANCE {
                    cols.push(j);
                }
            }
            (best, cols)
        })
        .collect();
    let best = rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let argmax: Vec<(usize, usize)> = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| (r.0 - best).abs() <= EXPONENT_TOLERANCE)
        .flat_map(|(i, r)| r.1.iter().map(move |&j| (i, j)))
        .collect();
    Ok(BruteForce {
        max_exponent: best,
        argmax: argmax.into_iter().map(|(i, j)| (tuples[i].clone(), tuples[j].clone())).collect(),
    })
}

/// Rescaled trace-invariants `tr_σ(·)` keyed by tuple.
#[derive(Clone, Debug, Default)]
pub struct InvariantTable {
    values: HashMap<PermTuple, Complex64>,
}

impl InvariantTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Evaluates `f` on every tuple of `S_n^D`.
    pub fn from_fn(n: usize, d: usize, mut f: impl FnMut(&PermTuple) -> Result<Complex64>) -> Result<Self> {
        let mut values = HashMap::new();
        for t in PermTuple::all(n, d) {
            let v = f(&t)?;
            values.insert(t, v);
        }
        Ok(Self { values })
    }

    pub fn insert(&mut self, t: PermTuple, v: Complex64) {
        self.values.insert(t, v);
    }

    pub fn get(&self, t: &PermTuple) -> Result<Complex64> {
        self.values.get(t).copied().ok_or_else(|| Error::MissingInvariant(t.to_string()))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Limit `Σ_{leading} tr_σ(a) tr_{τ⁻¹}(b) f[σ,τ]` of `N^{−δ} C_n(N^γ Tr(AUBU*))`.
pub fn asymptotic_cumulant(
    d: usize,
    n: usize,
    regime: Regime,
    tr_a: &InvariantTable,
    tr_b: &InvariantTable,
) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for g in enumerate_leading(d, n, regime)? {
        acc += tr_a.get(&g.sigma)? * tr_b.get(&g.tau.inverse())? * g.coeff.to_f64();
    }
    Ok(acc)
}

/// Large-`N` moment `N^{−nD} (tr a · tr b)^n` of `Tr(AUBU*)` under normalized
/// ansätze; independent of `(β, ε)`.
pub fn asymptotic_moment(n: usize, d: usize, dim: u64, tr_a: f64, tr_b: f64) -> f64 {
    (dim as f64).powi(-((n * d) as i32)) * (tr_a * tr_b).powi(n as i32)
}

/// Canonical set of pairs for comparisons.
pub fn pair_set(pairs: &[(PermTuple, PermTuple)]) -> HashSet<(PermTuple, PermTuple)> {
    pairs.iter().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> PermTuple {
        s.parse().unwrap()
    }

    #[test]
    fn invariant_exponent_examples() {
        let id = PermTuple::identity(1, 3);
        let a = SideExponents::normalized(0.3, 0.7, 3);
        assert!(a.exponent(&id).abs() < 1e-12);
        assert_eq!(invariant_scaling_exponent(&t("2,1;2,1"), 0.0, 1.0, 0.0), 2.0);
        assert_eq!(invariant_scaling_exponent(&t("2,1;1,2"), 0.0, 0.0, 1.0), 1.0);
    }

    #[test]
    fn pair_exponent_examples() {
        for d in 1..4 {
            let id = PermTuple::identity(1, d);
            assert_eq!(pair_scaling_exponent(&id, &id).unwrap(), d as i64);
        }
        let s = t("2,1;2,1");
        assert_eq!(pair_scaling_exponent(&s, &s).unwrap(), 4);
        assert_eq!(pair_scaling_exponent(&s, &PermTuple::identity(2, 2)).unwrap(), 2);
    }

    #[test]
    fn total_exponent_examples() {
        let id = PermTuple::identity(1, 2);
        assert_eq!(total_exponent(&id, &id, &ScalingAnsatz::microscopic(), 2.0).unwrap(), 0.0);
        let s = t("2,1;1,2");
        assert_eq!(total_exponent(&s, &s, &ScalingAnsatz::micro_a(1.0, 0.0), 1.0).unwrap(), 1.0);
    }

    #[test]
    fn decomposition_matches_total() {
        let ans = ScalingAnsatz::new(
            SideExponents { alpha: 0.25, beta: 0.4, eps: 0.3 },
            SideExponents { alpha: -0.5, beta: 1.1, eps: 0.6 },
        );
        let all: Vec<PermTuple> = PermTuple::all(3, 2).collect();
        for s in &all {
            for tt in &all {
                let a = total_exponent(s, tt, &ans, 0.7).unwrap();
                let b = total_exponent_decomposed(s, tt, &ans, 0.7).unwrap().total();
                assert!((a - b).abs() < 1e-9, "{s} / {tt}");
            }
        }
    }

    #[test]
    fn classify_examples() {
        let r = classify(2, &ScalingAnsatz::micro_a(1.0, 0.0), Family::MicroA).unwrap();
        assert_eq!((r.regime.label().as_str(), r.gamma, r.delta), ("II", 1.0, 1.0));
        let r = classify(2, &ScalingAnsatz::micro_a(0.5, 0.5), Family::MicroA).unwrap();
        assert_eq!((r.regime.label().as_str(), r.gamma, r.delta), ("I", 1.5, 1.0));
        let r = classify(2, &ScalingAnsatz::micro_a(0.0, 1.0), Family::MicroA).unwrap();
        assert_eq!((r.regime.label().as_str(), r.gamma, r.delta), ("V", 1.0, 0.0));
        assert!(classify(2, &ScalingAnsatz::symmetric(0.5, 0.2), Family::MicroA).is_err());
        assert!(classify(2, &ScalingAnsatz::micro_a(-0.1, 0.0), Family::MicroA).is_err());
        assert!(classify(1, &ScalingAnsatz::d1(2.0, 1.0), Family::D1).is_err());
    }

    #[test]
    fn regime_labels_round_trip() {
        for fam in [Family::D1, Family::MicroA, Family::Symmetric] {
            for r in Regime::all(fam) {
                assert_eq!(r.label().parse::<Regime>().unwrap(), r);
            }
        }
        let json = serde_json::to_string(&classify(2, &ScalingAnsatz::symmetric(0.5, 0.5), Family::Symmetric).unwrap()).unwrap();
        assert!(json.contains("\"regime\":\"S-I\"") && json.contains("\"family\":\"symmetric\""));
    }

    #[test]
    fn region_partition_is_total_and_disjoint() {
        // every grid point maps to exactly one region, consistent with the stated inequalities
        for d in 2..5 {
            let inv = 1.0 / d as f64;
            for i in 0..=40 {
                for j in 0..=40 {
                    let beta = i as f64 * 0.05;
                    let eps = j as f64 * 0.05;
                    let line = 1.0 - eps * (d as f64 - 1.0);
                    let conds = [
                        eq(beta, inv) && eq(eps, inv),
                        eq(beta, line) && beta > inv + 1e-12 && eps >= 0.0,
                        beta > 1e-12 && eq(beta, eps) && lt(beta, inv),
                        lt(eps, beta) && lt(beta, line),
                        eps > 1e-12 && lt(beta, inv.min(eps)),
                        eq(beta, 0.0) && eq(eps, 0.0),
                        eq(beta, inv) && lt(beta, eps),
                        beta > inv.max(line) + 1e-12,
                    ];
                    let holding: Vec<usize> = conds.iter().enumerate().filter(|(_, &c)| c).map(|(k, _)| k + 1).collect();
                    assert_eq!(holding.len(), 1, "D={d} β={beta} ε={eps}: {holding:?}");
                    assert_eq!(region(d, beta, eps) as usize, holding[0]);
                }
            }
        }
    }

    #[test]
    fn full_cycle_count() {
        for n in 1..=6 {
            let c = full_cycles(n);
            assert_eq!(c.len(), (1..n).product::<usize>().max(1));
            assert!(c.iter().all(Permutation::is_full_cycle));
        }
    }

    #[test]
    fn cmelonic_generator_counts() {
        for (d, counts) in [(2usize, vec![1usize, 2, 10, 84]), (3, vec![1, 3, 24])] {
            for (k, &expect) in counts.iter().enumerate() {
                let n = k + 1;
                let gen = cmelonic_tuples(n, d).unwrap();
                assert_eq!(gen.len(), expect);
                assert_eq!(BigUint::from(expect), cmelonic_count_formula(d, n));
            }
        }
    }

    #[test]
    fn cmelonic_generator_matches_filter() {
        for (d, nmax) in [(2usize, 4usize), (3, 3), (4, 2)] {
            for n in 1..=nmax {
                let gen = cmelonic_tuples(n, d).unwrap();
                let filt: Vec<PermTuple> = PermTuple::all(n, d).filter(is_cmelonic_connected).collect();
                assert_eq!(gen, filt, "D={d} n={n}");
            }
        }
    }

    #[test]
    fn melonic_generator_matches_filter() {
        for (d, nmax) in [(3usize, 3usize), (4, 3)] {
            for n in 1..=nmax {
                let gen = melonic_tuples(n, d).unwrap();
                let filt: Vec<PermTuple> =
                    connected_tuples(n, d).unwrap().into_iter().filter(|t| sigma_degree(t) == HalfInt::ZERO).collect();
                assert_eq!(gen, filt, "D={d} n={n}");
            }
        }
    }

    #[test]
    fn leading_examples() {
        let v = Regime::new(Family::MicroA, 5).unwrap();
        assert!(is_leading(&t("2,3,1;2,3,1"), &t("2,3,1;2,3,1"), v).unwrap());
        assert!(!is_leading(&t("2,3,1;3,1,2"), &t("2,3,1;3,1,2"), v).unwrap());
        let ii = Regime::new(Family::MicroA, 2).unwrap();
        assert!(is_leading(&t("2,1;1,2"), &PermTuple::identity(2, 2), ii).unwrap());
        assert_eq!(count_leading(2, 3, v).unwrap(), BigUint::from(2u32));
        let vi = Regime::new(Family::MicroA, 6).unwrap();
        assert_eq!(count_leading(2, 2, vi).unwrap(), BigUint::from(3u32));
        let iv = Regime::new(Family::MicroA, 4).unwrap();
        let counts: Vec<usize> = (1..=3).map(|n| enumerate_leading_pairs(2, n, iv).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 10]);
    }

    #[test]
    fn asymptotic_examples() {
        let ones = |n| InvariantTable::from_fn(n, 2, |_| Ok(Complex64::new(1.0, 0.0))).unwrap();
        let v = Regime::new(Family::MicroA, 5).unwrap();
        let c = asymptotic_cumulant(2, 3, v, &ones(3), &ones(3)).unwrap();
        assert!((c.re - 2.0).abs() < 1e-12);
        let vi = Regime::new(Family::MicroA, 6).unwrap();
        let c = asymptotic_cumulant(2, 2, vi, &ones(2), &ones(2)).unwrap();
        assert!((c.re - 3.0).abs() < 1e-12);
        let viii = Regime::new(Family::MicroA, 8).unwrap();
        let mut a = InvariantTable::new();
        a.insert(PermTuple::identity(1, 2), Complex64::new(0.5, 0.0));
        let mut b = InvariantTable::new();
        b.insert(PermTuple::identity(1, 2), Complex64::new(3.0, 0.0));
        assert!((asymptotic_cumulant(2, 1, viii, &a, &b).unwrap().re - 1.5).abs() < 1e-12);
        assert!((asymptotic_moment(1, 2, 4, 2.0, 3.0) - 6.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn brute_force_examples() {
        let bf = brute_force_leading(2, 2, &ScalingAnsatz::microscopic(), 2.0).unwrap();
        assert_eq!(bf.max_exponent, 0.0);
        assert_eq!(bf.argmax.len(), 3);
        let bf = brute_force_leading(2, 3, &ScalingAnsatz::micro_a(0.0, 1.0), 1.0).unwrap();
        assert!(bf.max_exponent.abs() < 1e-12);
        assert_eq!(bf.argmax.len(), 2);
        let bf = brute_force_leading(2, 2, &ScalingAnsatz::micro_a(1.0, 0.0), 1.0).unwrap();
        assert!((bf.max_exponent - 1.0).abs() < 1e-12);
        let ii = Regime::new(Family::MicroA, 2).unwrap();
        assert_eq!(pair_set(&bf.argmax), pair_set(&enumerate_leading_pairs(2, 2, ii).unwrap()));
    }
}
