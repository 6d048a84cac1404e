//! Named subspace and state builders.
//!
//! Bipartite building blocks (antisymmetric and Johnston subspaces), the
//! chain construction `S_1 ⊗ ... ⊗ S_n` with adjacent parties joined, the
//! direct-sum constructions whose hypotheses are checked numerically before
//! anything is built, and the two-qudit Werner family.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::linalg::{max_abs, Bipartition, DensityOperator, DimProfile, PureState, C64};
use crate::measures::{geometric_measure_state, joined_product, subspace_geometric_measure, OptimizerPolicy};
use crate::policy::NumericPolicy;
use crate::subspace::{direct_sum, from_span, join, projector, tensor_capped, JoinSpec, Subspace, SubspaceJson};

const POLICY: NumericPolicy = NumericPolicy::DEFAULT;

fn check_local_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(arg_err!("local dimension must be at least 2, got {d}"));
    }
    Ok(())
}

fn two_qudits(d: usize) -> Result<DimProfile> {
    check_local_dim(d)?;
    DimProfile::new(vec![d, d])
}

/// `SWAP = sum_ij |i,j><j,i|` on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> Result<DMatrix<C64>> {
    check_local_dim(d)?;
    let mut m = DMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j, j * d + i)] = C64::from(1.0);
        }
    }
    Ok(m)
}

/// `(I - SWAP) / 2`.
pub fn antisymmetric_projector(d: usize) -> Result<DMatrix<C64>> {
    let s = swap_operator(d)?;
    Ok((DMatrix::identity(d * d, d * d) - s) * C64::from(0.5))
}

/// `(I + SWAP) / 2`.
pub fn symmetric_projector(d: usize) -> Result<DMatrix<C64>> {
    let s = swap_operator(d)?;
    Ok((DMatrix::identity(d * d, d * d) + s) * C64::from(0.5))
}

/// Span of `(|ij> - |ji>)/sqrt2` for `i < j`, in lexicographic `(i, j)` order.
pub fn antisymmetric_subspace(d: usize) -> Result<Subspace> {
    let profile = two_qudits(d)?;
    let h = C64::from(0.5f64.sqrt());
    let mut cols = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let mut v = DVector::zeros(d * d);
            v[i * d + j] = h;
            v[j * d + i] = -h;
            cols.push(v);
        }
    }
    Subspace::new(DMatrix::from_columns(&cols), profile)
}

/// Span of `|ii>` and `(|ij> + |ji>)/sqrt2` for `i < j`.
pub fn symmetric_subspace(d: usize) -> Result<Subspace> {
    let profile = two_qudits(d)?;
    let h = C64::from(0.5f64.sqrt());
    let mut cols = Vec::new();
    for i in 0..d {
        for j in i..d {
            let mut v = DVector::zeros(d * d);
            if i == j {
                v[i * d + i] = C64::from(1.0);
            } else {
                v[i * d + j] = h;
                v[j * d + i] = h;
            }
            cols.push(v);
        }
    }
    Subspace::new(DMatrix::from_columns(&cols), profile)
}

/// The vectors `(|j>|k+1> - |j+1>|k>)/sqrt2` for `0 <= j <= d1-2`,
/// `0 <= k <= d2-2`, in row-major `(j, k)` order. They are linearly
/// independent but not orthogonal.
pub fn johnston_vectors(d1: usize, d2: usize) -> Result<Vec<PureState>> {
    check_local_dim(d1)?;
    check_local_dim(d2)?;
    let profile = DimProfile::new(vec![d1, d2])?;
    let h = C64::from(0.5f64.sqrt());
    let mut out = Vec::with_capacity((d1 - 1) * (d2 - 1));
    for j in 0..d1 - 1 {
        for k in 0..d2 - 1 {
            let mut v = DVector::zeros(d1 * d2);
            v[j * d2 + k + 1] = h;
            v[(j + 1) * d2 + k] = -h;
            out.push(PureState::new(v, profile.clone())?);
        }
    }
    Ok(out)
}

/// Span of [`johnston_vectors`], with an orthonormalized basis.
pub fn johnston_subspace(d1: usize, d2: usize) -> Result<Subspace> {
    let s = from_span(&johnston_vectors(d1, d2)?)?;
    debug_assert_eq!(s.dim(), (d1 - 1) * (d2 - 1));
    Ok(s)
}

/// `S_1 ⊗ S_2 ⊗ ... ⊗ S_n` with every interior boundary joined: the last
/// party of each factor merges with the first party of the next one.
/// Folds from the left.
pub fn chain_ges(parts: &[Subspace]) -> Result<Subspace> {
    check_chain(parts)?;
    let mut w = parts[0].clone();
    for p in &parts[1..] {
        let boundary = w.profile().n_parties() - 1;
        w = join(&tensor_capped(&w, p, POLICY.ambient_cap)?, JoinSpec { left_party: boundary })?;
    }
    Ok(w)
}

/// Same subspace as [`chain_ges`], folded from the right.
pub fn chain_ges_right(parts: &[Subspace]) -> Result<Subspace> {
    check_chain(parts)?;
    let mut w = parts[parts.len() - 1].clone();
    for p in parts[..parts.len() - 1].iter().rev() {
        let boundary = p.profile().n_parties() - 1;
        w = join(&tensor_capped(p, &w, POLICY.ambient_cap)?, JoinSpec { left_party: boundary })?;
    }
    Ok(w)
}

fn check_chain(parts: &[Subspace]) -> Result<()> {
    if parts.len() < 2 {
        return Err(arg_err!("a chain needs at least two parts, got {}", parts.len()));
    }
    for (i, p) in parts.iter().enumerate() {
        if p.profile().n_parties() != 2 {
            return Err(arg_err!("chain part {i} is not bipartite (profile {})", p.profile()));
        }
    }
    Ok(())
}

/// The sixteen vectors
/// `|j>|3(k+1)+l>|m+1> - |j>|3(k+1)+l+1>|m> - |j+1>|3k+l>|m+1> + |j+1>|3k+l+1>|m>`
/// (coefficients `±1/2`) on `3 ⊗ 9 ⊗ 3`, for `j, k, l, m` in `{0, 1}` in
/// lexicographic order.
pub fn example_w_vectors() -> Result<Vec<PureState>> {
    let profile = DimProfile::new(vec![3, 9, 3])?;
    let idx = |a: usize, b: usize, c: usize| (a * 9 + b) * 3 + c;
    let half = 0.5;
    let mut out = Vec::with_capacity(16);
    for j in 0..2 {
        for k in 0..2 {
            for l in 0..2 {
                for m in 0..2 {
                    let mut v = DVector::zeros(81);
                    v[idx(j, 3 * (k + 1) + l, m + 1)] += C64::from(half);
                    v[idx(j, 3 * (k + 1) + l + 1, m)] -= C64::from(half);
                    v[idx(j + 1, 3 * k + l, m + 1)] -= C64::from(half);
                    v[idx(j + 1, 3 * k + l + 1, m)] += C64::from(half);
                    out.push(PureState::new(v, profile.clone())?);
                }
            }
        }
    }
    Ok(out)
}

/// The 16-dimensional subspace of `3 ⊗ 9 ⊗ 3` spanned by [`example_w_vectors`].
pub fn example_w_basis() -> Result<Subspace> {
    from_span(&example_w_vectors()?)
}

/// Numerically certifies that `s` is completely entangled; `what` names the
/// hypothesis in the error.
pub fn certify_ces(s: &Subspace, opt: &OptimizerPolicy, what: &str) -> Result<f64> {
    if s.profile().n_parties() != 2 {
        return Err(arg_err!("{what} is not bipartite (profile {})", s.profile()));
    }
    let r = subspace_geometric_measure(s, opt)?;
    if !(r.value > POLICY.ces_threshold) {
        return Err(Error::Precondition(format!(
            "{what} is not completely entangled (geometric measure {:e})",
            r.value
        )));
    }
    if !r.stable {
        return Err(Error::Precondition(format!(
            "{what}: complete entanglement could not be certified (only {} restarts agree)",
            r.restarts_agreeing
        )));
    }
    Ok(r.value)
}

fn check_pairwise_orthogonal(parts: &[Subspace], what: &str) -> Result<()> {
    direct_sum(parts).map(|_| ()).map_err(|e| match e {
        Error::Precondition(m) => Error::Precondition(format!("{what}: {m}")),
        other => other,
    })
}

/// `(S_1 ⊗ P_1) ⊕ ... ⊕ (S_n ⊗ P_n)` on `A ⊗ (B_1 B_2)`, with `S_i`
/// completely entangled on `A ⊗ B_1` and `P_i` mutually orthogonal subspaces
/// of `B_2`. The result is completely entangled.
pub fn sum_of_products_ces(s_parts: &[Subspace], p_parts: &[Subspace], opt: &OptimizerPolicy) -> Result<Subspace> {
    if s_parts.is_empty() || s_parts.len() != p_parts.len() {
        return Err(arg_err!("need equally many S and P parts, got {} and {}", s_parts.len(), p_parts.len()));
    }
    for (i, p) in p_parts.iter().enumerate() {
        if p.profile().n_parties() != 1 {
            return Err(arg_err!("P part {i} must live on a single party, got profile {}", p.profile()));
        }
    }
    check_pairwise_orthogonal(p_parts, "P parts")?;
    for (i, s) in s_parts.iter().enumerate() {
        certify_ces(s, opt, &format!("S part {i}"))?;
    }
    let blocks = s_parts
        .iter()
        .zip(p_parts)
        .map(|(s, p)| join(&tensor_capped(s, p, POLICY.ambient_cap)?, JoinSpec { left_party: 1 }))
        .collect::<Result<Vec<_>>>()?;
    same_profiles(&blocks, "S ⊗ P blocks")?;
    direct_sum(&blocks)
}

/// `(S_1 ⊗ G_1) ⊕ ... ⊕ (S_n ⊗ G_n)` on `A ⊗ (B_1 B_2) ⊗ C`, with `S_i`
/// completely entangled on `A ⊗ B_1` and `G_i` mutually orthogonal subspaces
/// of `B_2 ⊗ C` whose direct sum is completely entangled. The result is
/// genuinely entangled.
pub fn sum_of_products_ges(s_parts: &[Subspace], g_parts: &[Subspace], opt: &OptimizerPolicy) -> Result<Subspace> {
    if s_parts.is_empty() || s_parts.len() != g_parts.len() {
        return Err(arg_err!("need equally many S and G parts, got {} and {}", s_parts.len(), g_parts.len()));
    }
    for (i, g) in g_parts.iter().enumerate() {
        if g.profile().n_parties() != 2 {
            return Err(arg_err!("G part {i} is not bipartite (profile {})", g.profile()));
        }
    }
    check_pairwise_orthogonal(g_parts, "G parts")?;
    let sigma = direct_sum(g_parts)?;
    certify_ces(&sigma, opt, "direct sum of the G parts")?;
    for (i, s) in s_parts.iter().enumerate() {
        certify_ces(s, opt, &format!("S part {i}"))?;
    }
    let blocks = s_parts
        .iter()
        .zip(g_parts)
        .map(|(s, g)| join(&tensor_capped(s, g, POLICY.ambient_cap)?, JoinSpec { left_party: 1 }))
        .collect::<Result<Vec<_>>>()?;
    same_profiles(&blocks, "S ⊗ G blocks")?;
    direct_sum(&blocks)
}

fn same_profiles(blocks: &[Subspace], what: &str) -> Result<()> {
    if blocks.iter().any(|b| b.profile() != blocks[0].profile()) {
        return Err(arg_err!("{what} have different profiles"));
    }
    Ok(())
}

/// Span of `psi_i ⊗ chi_i` (joined in the middle) for entangled `psi_i` on
/// `A ⊗ B_1` and mutually orthogonal `chi_i` on `B_2 ⊗ C` spanning a
/// completely entangled subspace. The result is genuinely entangled.
pub fn corollary6_span(psis: &[PureState], chis: &[PureState], opt: &OptimizerPolicy) -> Result<Subspace> {
    if psis.is_empty() || psis.len() != chis.len() {
        return Err(arg_err!("need equally many psi and chi states, got {} and {}", psis.len(), chis.len()));
    }
    for (i, psi) in psis.iter().enumerate() {
        if psi.profile().n_parties() != 2 {
            return Err(arg_err!("psi {i} is not bipartite"));
        }
        let cut = Bipartition::new(&[0], psi.profile())?;
        let g = geometric_measure_state(psi, &cut)?;
        if g <= POLICY.entangled_state {
            return Err(Error::Precondition(format!("psi {i} is not entangled (geometric measure {g:e})")));
        }
    }
    for (i, chi) in chis.iter().enumerate() {
        if chi.profile().n_parties() != 2 || chi.profile() != chis[0].profile() {
            return Err(arg_err!("chi {i} must be bipartite with the same profile as chi 0"));
        }
    }
    for i in 0..chis.len() {
        for j in i + 1..chis.len() {
            let ov = chis[i].inner(&chis[j]).norm();
            if ov > POLICY.orthogonality {
                return Err(Error::Precondition(format!("chi {i} and chi {j} are not orthogonal (overlap {ov:e})")));
            }
        }
    }
    certify_ces(&from_span(chis)?, opt, "span of the chi states")?;
    let products = psis
        .iter()
        .zip(chis)
        .map(|(p, c)| joined_product(p, c))
        .collect::<Result<Vec<_>>>()?;
    if products.iter().any(|v| v.profile() != products[0].profile()) {
        return Err(arg_err!("psi states have different profiles"));
    }
    from_span(&products)
}

// ---------------------------------------------------------------------------
// Werner states

/// Two-qudit Werner parameters. `s` is the weight on the antisymmetric
/// subspace; `p` the coefficient in `(I + p SWAP) / (d^2 + p d)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WernerParams {
    pub d: usize,
    pub s: f64,
    pub p: f64,
}

impl WernerParams {
    pub fn from_s(d: usize, s: f64) -> Result<Self> {
        Ok(Self { d, s, p: s_to_p(s, d)? })
    }

    pub fn from_p(d: usize, p: f64) -> Result<Self> {
        Ok(Self { d, s: p_to_s(p, d)?, p })
    }
}

pub fn p_to_s(p: f64, d: usize) -> Result<f64> {
    check_local_dim(d)?;
    if !(-1.0..=1.0).contains(&p) {
        return Err(arg_err!("Werner p = {p} outside [-1, 1]"));
    }
    let d = d as f64;
    let denom = 2.0 * (p + d);
    if denom.abs() < 1e-300 {
        return Err(arg_err!("p = -d is singular"));
    }
    Ok((d - 1.0) * (1.0 - p) / denom)
}

pub fn s_to_p(s: f64, d: usize) -> Result<f64> {
    check_local_dim(d)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(arg_err!("Werner s = {s} outside [0, 1]"));
    }
    let df = d as f64;
    let c = 2.0 * s / (df - 1.0);
    Ok((1.0 - c * df) / (1.0 + c))
}

/// Largest `p` for which both the Werner state and its `s`-overlap exceed the
/// `1/sqrt2` level needed for the product-state criterion.
pub fn werner_ge_threshold(d: usize) -> Result<f64> {
    check_local_dim(d)?;
    let d = d as f64;
    let r2 = std::f64::consts::SQRT_2;
    Ok((d * (1.0 - r2) - 1.0) / (r2 + d - 1.0))
}

/// `2(1-s)/(d(d+1)) P_S + 2s/(d(d-1)) P_A`.
pub fn werner_state(params: &WernerParams) -> Result<DensityOperator> {
    let d = params.d;
    let s = params.s;
    if !(0.0..=1.0).contains(&s) {
        return Err(arg_err!("Werner s = {s} outside [0, 1]"));
    }
    let df = d as f64;
    let m = symmetric_projector(d)? * C64::from(2.0 * (1.0 - s) / (df * (df + 1.0)))
        + antisymmetric_projector(d)? * C64::from(2.0 * s / (df * (df - 1.0)));
    DensityOperator::new(m, two_qudits(d)?)
}

/// `(I + p SWAP) / (d^2 + p d)`.
pub fn werner_state_p(d: usize, p: f64) -> Result<DensityOperator> {
    p_to_s(p, d)?;
    let df = d as f64;
    let m = (DMatrix::identity(d * d, d * d) + swap_operator(d)? * C64::from(p)) * C64::from(1.0 / (df * df + p * df));
    DensityOperator::new(m, two_qudits(d)?)
}

// ---------------------------------------------------------------------------
// JSON construction specs

/// Amplitudes on a dimension profile, as `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateJson {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<[f64; 2]>,
}

impl TryFrom<&StateJson> for PureState {
    type Error = Error;

    fn try_from(j: &StateJson) -> Result<PureState> {
        let profile = DimProfile::new(j.dims.clone()).map_err(|e| Error::Data(e.to_string()))?;
        if j.amplitudes.len() != profile.total() {
            return Err(Error::Data(format!(
                "state has {} amplitudes, profile {} needs {}",
                j.amplitudes.len(),
                profile,
                profile.total()
            )));
        }
        let v = DVector::from_iterator(j.amplitudes.len(), j.amplitudes.iter().map(|[re, im]| C64::new(*re, *im)));
        PureState::normalized(v, profile).map_err(|e| Error::Data(e.to_string()))
    }
}

/// A subspace operand: either a nested construction or an explicit basis.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PartSpec {
    Construct(Box<ConstructSpec>),
    Inline(SubspaceJson),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "construct", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstructSpec {
    Antisym { d: usize },
    Johnston { d1: usize, d2: usize },
    ExampleW {},
    Chain { parts: Vec<PartSpec> },
    SumProductsCes { s_parts: Vec<PartSpec>, p_parts: Vec<PartSpec> },
    SumProductsGes { s_parts: Vec<PartSpec>, g_parts: Vec<PartSpec> },
    Corollary6 { psis: Vec<StateJson>, chis: Vec<StateJson> },
}

impl ConstructSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Data(format!("construction spec: {e}")))
    }

    pub fn build(&self, opt: &OptimizerPolicy) -> Result<Subspace> {
        let parts = |ps: &[PartSpec]| ps.iter().map(|p| p.build(opt)).collect::<Result<Vec<_>>>();
        match self {
            ConstructSpec::Antisym { d } => antisymmetric_subspace(*d),
            ConstructSpec::Johnston { d1, d2 } => johnston_subspace(*d1, *d2),
            ConstructSpec::ExampleW {} => example_w_basis(),
            ConstructSpec::Chain { parts: ps } => chain_ges(&parts(ps)?),
            ConstructSpec::SumProductsCes { s_parts, p_parts } => {
                sum_of_products_ces(&parts(s_parts)?, &parts(p_parts)?, opt)
            }
            ConstructSpec::SumProductsGes { s_parts, g_parts } => {
                sum_of_products_ges(&parts(s_parts)?, &parts(g_parts)?, opt)
            }
            ConstructSpec::Corollary6 { psis, chis } => {
                let load = |v: &[StateJson]| v.iter().map(PureState::try_from).collect::<Result<Vec<_>>>();
                corollary6_span(&load(psis)?, &load(chis)?, opt)
            }
        }
    }
}

impl PartSpec {
    pub fn build(&self, opt: &OptimizerPolicy) -> Result<Subspace> {
        match self {
            PartSpec::Construct(c) => c.build(opt),
            PartSpec::Inline(j) => Subspace::try_from(j.clone()),
        }
    }
}

/// Projector distance between two subspaces on the same profile.
pub fn projector_distance(a: &Subspace, b: &Subspace) -> Result<f64> {
    if a.profile() != b.profile() {
        return Err(arg_err!("profiles {} and {} differ", a.profile(), b.profile()));
    }
    Ok(max_abs(&(projector(a) - projector(b))))
}
