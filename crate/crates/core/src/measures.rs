//! Entanglement quantifiers.
//!
//! Pure-state geometric measures come straight from the Schmidt spectrum.
//! Subspace measures reduce to the largest overlap `<a⊗b|P|a⊗b>` between the
//! subspace projector and a product vector, maximized by a seesaw: with `a`
//! fixed the best `b` is the top eigenvector of the compressed operator
//! `(<a|⊗I) P (|a>⊗I)`, and vice versa. Each half-step can only increase the
//! objective. The seesaw finds a lower bound on the overlap (an upper bound on
//! the measure), so every subspace report carries a `stable` flag telling
//! whether enough independent restarts agree on the optimum.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::linalg::{
    coefficient_matrix, hermitian_eig, hermiticity_defect, max_abs, max_eigenpair, permute_rows,
    schmidt, ungroup_vector, Bipartition, DensityOperator, DimProfile, PureState, C64,
};
use crate::policy::NumericPolicy;
use crate::rng::{derived_rng, random_unit_vector, Stream};
use crate::subspace::{from_span, projector, Subspace};

const POLICY: NumericPolicy = NumericPolicy::DEFAULT;

/// Agreement window for the `stable` flag.
pub const AGREEMENT_TOL: f64 = 1e-7;

/// Most basis columns used as warm starts in subspace measures.
const MAX_WARM_STARTS: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerPolicy {
    pub restarts: usize,
    pub max_iters: usize,
    pub conv_tol: f64,
    pub seed: u64,
    pub agreement_count: usize,
}

impl Default for OptimizerPolicy {
    fn default() -> Self {
        Self { restarts: 64, max_iters: 500, conv_tol: 1e-10, seed: 0xA5A5, agreement_count: 5 }
    }
}

impl OptimizerPolicy {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self.agreement_count = self.agreement_count.min(restarts);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 || self.agreement_count == 0 {
            return Err(arg_err!("optimizer counts must be positive: {self:?}"));
        }
        if !(self.conv_tol > 0.0) {
            return Err(arg_err!("optimizer tolerance must be positive"));
        }
        if self.agreement_count > self.restarts {
            return Err(arg_err!(
                "agreement count {} exceeds restart count {}",
                self.agreement_count,
                self.restarts
            ));
        }
        Ok(())
    }
}

/// Outcome of an optimized measure.
#[derive(Clone, Debug)]
pub struct MeasureReport {
    /// Measure (or overlap) value in `[0, 1]`.
    pub value: f64,
    /// The vector attaining `value`.
    pub witness_vector: PureState,
    /// At least `agreement_count` restarts reached the best value within
    /// [`AGREEMENT_TOL`].
    pub stable: bool,
    pub restarts_agreeing: usize,
}

// ---------------------------------------------------------------------------
// Pure states

/// `1 - lambda_max` across the cut.
pub fn geometric_measure_state(psi: &PureState, cut: &Bipartition) -> Result<f64> {
    let s = schmidt(psi, cut)?;
    Ok((1.0 - s.coeffs[0] * s.coeffs[0]).max(0.0))
}

/// Minimum of the geometric measure over all cuts, with the minimizing cut
/// (canonical form; ties go to the lexicographically smallest member set).
pub fn gme_measure_state(psi: &PureState) -> Result<(f64, Bipartition)> {
    let cuts = Bipartition::all_cuts(psi.profile());
    if cuts.is_empty() {
        return Err(arg_err!("GME measure needs at least two parties"));
    }
    let mut best: Option<(f64, Bipartition)> = None;
    for cut in cuts {
        let g = geometric_measure_state(psi, &cut)?;
        if best.as_ref().map_or(true, |(b, _)| g < *b) {
            best = Some((g, cut));
        }
    }
    Ok(best.expect("at least one cut"))
}

// ---------------------------------------------------------------------------
// Seesaw

/// One seesaw run from a given left starting vector.
#[derive(Clone, Debug)]
pub struct SeesawRun {
    pub value: f64,
    pub left: DVector<C64>,
    pub right: DVector<C64>,
    /// Objective after every half-step.
    pub objectives: Vec<f64>,
    pub converged: bool,
}

/// `C[b, k] = sum_i conj(a_i) B[i*dr + b, k]`.
fn contract_left(basis: &DMatrix<C64>, dr: usize, a: &DVector<C64>) -> DMatrix<C64> {
    let k = basis.ncols();
    DMatrix::from_fn(dr, k, |b, col| {
        a.iter().enumerate().map(|(i, ai)| ai.conj() * basis[(i * dr + b, col)]).sum()
    })
}

/// `D[i, k] = sum_b conj(b_b) B[i*dr + b, k]`.
fn contract_right(basis: &DMatrix<C64>, dl: usize, dr: usize, b: &DVector<C64>) -> DMatrix<C64> {
    let k = basis.ncols();
    DMatrix::from_fn(dl, k, |i, col| {
        b.iter().enumerate().map(|(j, bj)| bj.conj() * basis[(i * dr + j, col)]).sum()
    })
}

/// Runs the seesaw for the range of `basis` (orthonormal columns over
/// `dl * dr`), starting from the left vector `a0`.
pub fn seesaw_from(
    basis: &DMatrix<C64>,
    dims: (usize, usize),
    a0: DVector<C64>,
    max_iters: usize,
    conv_tol: f64,
) -> Result<SeesawRun> {
    let (dl, dr) = dims;
    if basis.nrows() != dl * dr || a0.len() != dl {
        return Err(arg_err!("seesaw dimensions do not match"));
    }
    let mut a = a0.clone() / C64::from(a0.norm());
    let mut objectives = Vec::with_capacity(2 * max_iters);
    let mut prev = f64::NEG_INFINITY;
    let mut b = DVector::zeros(dr);
    let mut converged = false;
    for _ in 0..max_iters {
        let ca = contract_left(basis, dr, &a);
        let (v1, nb) = max_eigenpair(&(&ca * ca.adjoint()))?;
        b = nb;
        objectives.push(v1);
        let db = contract_right(basis, dl, dr, &b);
        let (v2, na) = max_eigenpair(&(&db * db.adjoint()))?;
        a = na;
        objectives.push(v2);
        debug_assert!(v1 >= prev - 1e-12 && v2 >= v1 - 1e-12, "seesaw objective decreased");
        if v2 - prev < conv_tol {
            converged = true;
            prev = prev.max(v2);
            break;
        }
        prev = v2;
    }
    // the last `a` is optimal for the last `b`; recompute `b` for that `a`
    let ca = contract_left(basis, dr, &a);
    let (v, nb) = max_eigenpair(&(&ca * ca.adjoint()))?;
    if v >= prev - 1e-12 {
        b = nb;
        objectives.push(v);
    }
    let value = objectives.iter().cloned().fold(f64::NEG_INFINITY, f64::max).clamp(0.0, 1.0);
    Ok(SeesawRun { value, left: a, right: b, objectives, converged })
}

/// Best of many seesaw runs.
#[derive(Clone, Debug)]
pub struct OverlapSearch {
    pub best: SeesawRun,
    pub values: Vec<f64>,
    pub restarts_agreeing: usize,
    pub stable: bool,
}

/// Maximizes the product overlap with the range of `basis`, using
/// `opt.restarts` random starts plus the given warm starts.
pub fn search_overlap(
    basis: &DMatrix<C64>,
    dims: (usize, usize),
    opt: &OptimizerPolicy,
    warm_starts: &[DVector<C64>],
) -> Result<OverlapSearch> {
    opt.validate()?;
    let (dl, _) = dims;
    let runs: Vec<Result<SeesawRun>> = (0..opt.restarts + warm_starts.len())
        .into_par_iter()
        .map(|r| {
            let a0 = if r < opt.restarts {
                let mut rng = derived_rng(opt.seed, Stream::Seesaw, r as u64);
                random_unit_vector(&mut rng, dl)
            } else {
                warm_starts[r - opt.restarts].clone()
            };
            seesaw_from(basis, dims, a0, opt.max_iters, opt.conv_tol)
        })
        .collect();
    let runs: Vec<SeesawRun> = runs.into_iter().collect::<Result<_>>()?;
    let mut best_idx = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value > runs[best_idx].value {
            best_idx = i;
        }
    }
    let values: Vec<f64> = runs.iter().map(|r| r.value).collect();
    let best_value = values[best_idx];
    let agreeing = values.iter().filter(|&&v| best_value - v <= AGREEMENT_TOL).count();
    Ok(OverlapSearch {
        best: runs[best_idx].clone(),
        values,
        restarts_agreeing: agreeing,
        stable: agreeing >= opt.agreement_count,
    })
}

/// Orthonormal basis of the range of a projector.
fn projector_range(p: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let n = p.nrows();
    if !p.is_square() {
        return Err(arg_err!("projector must be square"));
    }
    let herm = hermiticity_defect(p);
    let idem = max_abs(&(p * p - p));
    if herm > POLICY.idempotence || idem > POLICY.idempotence {
        return Err(arg_err!("not an orthogonal projector (idempotence defect {idem:e}, Hermiticity defect {herm:e})"));
    }
    let (vals, vecs) = hermitian_eig(p)?;
    let cols: Vec<_> = (0..n).filter(|&k| vals[k] > 0.5).map(|k| vecs.column(k).into_owned()).collect();
    if cols.is_empty() {
        return Err(arg_err!("projector onto the zero subspace"));
    }
    Ok(DMatrix::from_columns(&cols))
}

/// `max <a⊗b|P|a⊗b>` over unit product vectors of `C^dl ⊗ C^dr`. The
/// report's witness is the maximizing product vector.
pub fn max_product_overlap(p: &DMatrix<C64>, dims: (usize, usize), opt: &OptimizerPolicy) -> Result<MeasureReport> {
    if p.nrows() != dims.0 * dims.1 {
        return Err(arg_err!("projector size {} does not match dims {dims:?}", p.nrows()));
    }
    let basis = projector_range(p)?;
    let search = search_overlap(&basis, dims, opt, &[])?;
    let profile = DimProfile::allowing_trivial(vec![dims.0, dims.1])?;
    let prod = crate::linalg::kron_vec(&search.best.left, &search.best.right)?;
    Ok(MeasureReport {
        value: search.best.value,
        witness_vector: PureState::normalized(prod, profile)?,
        stable: search.stable,
        restarts_agreeing: search.restarts_agreeing,
    })
}

/// Geometric measure of a bipartite subspace: the measure of its least
/// entangled vector.
pub fn subspace_geometric_measure(s: &Subspace, opt: &OptimizerPolicy) -> Result<MeasureReport> {
    if s.profile().n_parties() != 2 {
        return Err(arg_err!("expected a bipartite subspace, got profile {}", s.profile()));
    }
    let cut = Bipartition::new(&[0], s.profile())?;
    subspace_measure_across_cut(s, &cut, opt)
}

/// Geometric measure of a multipartite subspace across one cut.
///
/// The value is `1 - lambda_max` of the least entangled vector found, which
/// is the projection of the best product vector onto the subspace. At a
/// seesaw optimum it equals one minus the best product overlap.
pub fn subspace_measure_across_cut(s: &Subspace, cut: &Bipartition, opt: &OptimizerPolicy) -> Result<MeasureReport> {
    if cut.profile() != s.profile() {
        return Err(arg_err!("cut profile {} does not match subspace profile {}", cut.profile(), s.profile()));
    }
    let (dl, dr) = cut.side_dims();
    let perm = cut.grouping_permutation();
    let (_, grouped) = permute_rows(s.basis(), s.profile(), &perm)?;

    let warm: Vec<DVector<C64>> = (0..s.dim().min(MAX_WARM_STARTS))
        .map(|k| {
            let sch = schmidt(&s.column_state(k), cut)?;
            Ok(sch.left.column(0).into_owned())
        })
        .collect::<Result<_>>()?;
    let search = search_overlap(&grouped, (dl, dr), opt, &warm)?;

    let prod = crate::linalg::kron_vec(&search.best.left, &search.best.right)?;
    let projected = &grouped * (grouped.adjoint() * &prod);
    let least = ungroup_vector(&projected, cut)?;
    let least = PureState::normalized(least, s.profile().clone())?;
    let lambda = schmidt(&least, cut)?.coeffs[0].powi(2);
    let value = (1.0 - lambda.max(search.best.value)).clamp(0.0, 1.0);
    Ok(MeasureReport {
        value,
        witness_vector: least,
        stable: search.stable,
        restarts_agreeing: search.restarts_agreeing,
    })
}

/// Per-cut measures of a multipartite subspace and their minimum.
#[derive(Clone, Debug)]
pub struct GmeReport {
    pub per_cut: Vec<(Bipartition, MeasureReport)>,
    pub min_index: usize,
}

impl GmeReport {
    pub fn value(&self) -> f64 {
        self.per_cut[self.min_index].1.value
    }

    pub fn minimizing_cut(&self) -> &Bipartition {
        &self.per_cut[self.min_index].0
    }
}

pub fn subspace_gme_measure(s: &Subspace, opt: &OptimizerPolicy) -> Result<GmeReport> {
    let cuts = Bipartition::all_cuts(s.profile());
    if cuts.is_empty() {
        return Err(arg_err!("GME measure needs at least two parties"));
    }
    let per_cut = cuts
        .into_iter()
        .map(|cut| {
            let r = subspace_measure_across_cut(s, &cut, opt)?;
            Ok((cut, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut min_index = 0;
    for (i, (_, r)) in per_cut.iter().enumerate() {
        if r.value < per_cut[min_index].1.value {
            min_index = i;
        }
    }
    Ok(GmeReport { per_cut, min_index })
}

/// GME measure of a chain of subspaces from the measures of its parts: the
/// minimum of the component values.
pub fn ges_measure_chain(components: &[MeasureReport]) -> Result<f64> {
    let values: Vec<f64> = components.iter().map(|r| r.value).collect();
    min_of(&values)
}

pub fn min_of(values: &[f64]) -> Result<f64> {
    values
        .iter()
        .cloned()
        .reduce(f64::min)
        .ok_or_else(|| arg_err!("empty component list"))
}

// ---------------------------------------------------------------------------
// Witnesses and criteria for states

/// `Tr(rho P_W) + G_GME(W) - 1`; positive values certify genuine entanglement.
pub fn witness_value(rho: &DensityOperator, w: &Subspace, g_gme_of_w: f64) -> Result<f64> {
    if rho.profile() != w.profile() {
        return Err(arg_err!("state profile {} does not match subspace profile {}", rho.profile(), w.profile()));
    }
    if !(0.0..=1.0).contains(&g_gme_of_w) {
        return Err(arg_err!("GME measure {g_gme_of_w} outside [0, 1]"));
    }
    let overlap = rho.expectation(&projector(w)).re;
    Ok(overlap + g_gme_of_w - 1.0)
}

/// Sufficient condition for genuine entanglement of `alpha ⊗ beta` (joined in
/// the middle) from overlaps with two entangled bipartite subspaces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeCondition {
    pub lhs: f64,
    pub rhs: f64,
    pub certified: bool,
}

pub fn product_state_ge_condition(
    alpha: &DensityOperator,
    beta: &DensityOperator,
    w1: &Subspace,
    w2: &Subspace,
    g1: f64,
    g2: f64,
) -> Result<GeCondition> {
    for (rho, w, name) in [(alpha, w1, "alpha"), (beta, w2, "beta")] {
        if rho.profile() != w.profile() || w.profile().n_parties() != 2 {
            return Err(arg_err!("{name} and its subspace must share a bipartite profile"));
        }
    }
    for g in [g1, g2] {
        if !(0.0..=1.0).contains(&g) {
            return Err(arg_err!("geometric measure {g} outside [0, 1]"));
        }
    }
    let o1 = alpha.expectation(&projector(w1)).re;
    let o2 = beta.expectation(&projector(w2)).re;
    let lhs = o1 * o2;
    let rhs = 1.0 - g1.min(g2);
    Ok(GeCondition { lhs, rhs, certified: lhs - rhs > POLICY.strict_margin })
}

/// Lower bound on the convex-roof extended negativity,
/// `(o1 o2 + g12 - 1) / (2 (1 - g12))`. Only meaningful when the numerator is
/// nonnegative; the raw ratio is returned either way.
pub fn cren_lower_bound(overlap1: f64, overlap2: f64, g12: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&g12) {
        return Err(arg_err!("g12 = {g12} outside [0, 1)"));
    }
    for o in [overlap1, overlap2] {
        if !(0.0..=1.0).contains(&o) {
            return Err(arg_err!("overlap {o} outside [0, 1]"));
        }
    }
    Ok((overlap1 * overlap2 + g12 - 1.0) / (2.0 * (1.0 - g12)))
}

/// `sum_i G(psi_i) - (k - 1)` for pairwise orthogonal bipartite states; a
/// positive value certifies that their span is completely entangled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpanCondition {
    pub sum_minus: f64,
    pub certified: bool,
}

pub fn theorem8_condition(states: &[PureState]) -> Result<SpanCondition> {
    let first = states.first().ok_or_else(|| arg_err!("empty state list"))?;
    if first.profile().n_parties() != 2 {
        return Err(arg_err!("states must be bipartite"));
    }
    if states.iter().any(|s| s.profile() != first.profile()) {
        return Err(arg_err!("states have different profiles"));
    }
    check_pairwise_orthogonal(states)?;
    let cut = Bipartition::new(&[0], first.profile())?;
    let total: f64 = states
        .iter()
        .map(|s| geometric_measure_state(s, &cut))
        .sum::<Result<f64>>()?;
    let sum_minus = total - (states.len() as f64 - 1.0);
    Ok(SpanCondition { sum_minus, certified: sum_minus > POLICY.strict_margin })
}

fn check_pairwise_orthogonal(states: &[PureState]) -> Result<()> {
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let ov = states[i].inner(&states[j]).norm();
            if ov > POLICY.orthogonality {
                return Err(Error::Precondition(format!(
                    "states {i} and {j} are not orthogonal (overlap {ov:e})"
                )));
            }
        }
    }
    Ok(())
}

fn check_joined_pairs(pairs: &[(PureState, PureState)]) -> Result<()> {
    if pairs.is_empty() {
        return Err(arg_err!("empty pair list"));
    }
    for (i, (phi, chi)) in pairs.iter().enumerate() {
        for (s, name) in [(phi, "phi"), (chi, "chi")] {
            if s.profile().n_parties() != 2 {
                return Err(arg_err!("pair {i}: {name} must be bipartite"));
            }
        }
        let cut = Bipartition::new(&[0], phi.profile())?;
        let g = geometric_measure_state(phi, &cut)?;
        if g <= POLICY.entangled_state {
            return Err(Error::Precondition(format!("pair {i}: phi is not entangled (G = {g:e})")));
        }
    }
    Ok(())
}

/// Whether the uniform mixture of the joined products `phi_i ⊗ chi_i` is
/// certified genuinely entangled: every `phi_i` must be entangled, the
/// `chi_i` pairwise orthogonal with `sum G(chi_i) - (k-1) > 0`.
pub fn lemma9_certify(pairs: &[(PureState, PureState)]) -> Result<bool> {
    check_joined_pairs(pairs)?;
    let chis: Vec<PureState> = pairs.iter().map(|(_, c)| c.clone()).collect();
    Ok(theorem8_condition(&chis)?.certified)
}

/// The state `sum_i |psi_i><psi_i| / k` with `psi_i` the joined product of the
/// pair `i`, over `A ⊗ (B_1 B_2) ⊗ C`.
pub fn lemma9_state(pairs: &[(PureState, PureState)]) -> Result<DensityOperator> {
    check_joined_pairs(pairs)?;
    let vecs: Vec<PureState> = pairs
        .iter()
        .map(|(phi, chi)| joined_product(phi, chi))
        .collect::<Result<_>>()?;
    let profile = vecs[0].profile().clone();
    if vecs.iter().any(|v| v.profile() != &profile) {
        return Err(arg_err!("pairs have different profiles"));
    }
    let n = profile.total();
    let mut m = DMatrix::zeros(n, n);
    for v in &vecs {
        m += v.amplitudes() * v.amplitudes().adjoint();
    }
    DensityOperator::from_unnormalized(m, profile)
}

/// `phi_{AB1} ⊗ chi_{B2C}` with `B1 B2` joined into one party.
pub fn joined_product(phi: &PureState, chi: &PureState) -> Result<PureState> {
    let prod = phi.kron(chi)?;
    let left_inner = phi.profile().n_parties() - 1;
    let profile = crate::subspace::join_profile(prod.profile(), crate::subspace::JoinSpec { left_party: left_inner })?;
    prod.relabel(profile)
}

/// Span of states as a subspace, reporting which ones are dependent.
pub fn span_of(states: &[PureState]) -> Result<Subspace> {
    from_span(states)
}

/// `lambda_max` of a vector's coefficient matrix (no SVD reordering).
pub fn top_schmidt_weight(v: &DVector<C64>, cut: &Bipartition) -> Result<f64> {
    let m = coefficient_matrix(v, cut)?;
    let (l, _) = max_eigenpair(&(&m * m.adjoint()))?;
    Ok(l / v.norm_squared())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::{direct_sum, tensor, Subspace};
    use approx::assert_abs_diff_eq;

    fn c(x: f64) -> C64 {
        C64::from(x)
    }

    fn prof(d: &[usize]) -> DimProfile {
        DimProfile::new(d.to_vec()).unwrap()
    }

    fn state(dims: &[usize], amps: &[f64]) -> PureState {
        PureState::normalized(DVector::from_iterator(amps.len(), amps.iter().map(|&x| c(x))), prof(dims)).unwrap()
    }

    fn bell() -> PureState {
        state(&[2, 2], &[1.0, 0.0, 0.0, 1.0])
    }

    fn antisym(d: usize) -> Subspace {
        let mut vecs = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                let mut v = DVector::zeros(d * d);
                v[i * d + j] = c(1.0);
                v[j * d + i] = c(-1.0);
                vecs.push(v);
            }
        }
        Subspace::from_vectors(&vecs, prof(&[d, d])).unwrap()
    }

    fn small_policy() -> OptimizerPolicy {
        OptimizerPolicy { restarts: 16, ..OptimizerPolicy::default() }
    }

    #[test]
    fn pure_state_measures() {
        let cut = Bipartition::new(&[0], &prof(&[2, 2])).unwrap();
        let prod = state(&[2, 2], &[0.0, 1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(geometric_measure_state(&prod, &cut).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(geometric_measure_state(&bell(), &cut).unwrap(), 0.5, epsilon = 1e-14);
        let skew = state(&[2, 2], &[0.9f64.sqrt(), 0.0, 0.0, 0.1f64.sqrt()]);
        assert_abs_diff_eq!(geometric_measure_state(&skew, &cut).unwrap(), 0.1, epsilon = 1e-14);
    }

    #[test]
    fn gme_of_pure_states() {
        let h = 0.5f64.sqrt();
        let mut ghz = vec![0.0; 8];
        ghz[0] = h;
        ghz[7] = h;
        let g = state(&[2, 2, 2], &ghz);
        let (v, _) = gme_measure_state(&g).unwrap();
        assert_abs_diff_eq!(v, 0.5, epsilon = 1e-14);

        let zero = state(&[2], &[1.0, 0.0]);
        let bs = bell().kron(&zero).unwrap();
        let (v, cut) = gme_measure_state(&bs).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-14);
        assert_eq!(cut.complement_members(), vec![2]);

        let biproduct = zero.kron(&bell()).unwrap();
        assert_abs_diff_eq!(gme_measure_state(&biproduct).unwrap().0, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn overlap_examples() {
        let opt = small_policy();
        let id = DMatrix::<C64>::identity(4, 4);
        let r = max_product_overlap(&id, (2, 2), &opt).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);

        for d in [2, 3] {
            let p = projector(&antisym(d));
            let r = max_product_overlap(&p, (d, d), &opt).unwrap();
            assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-9);
            assert!(r.stable);
        }
        let r = max_product_overlap(bell().projector().matrix(), (2, 2), &opt).unwrap();
        assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-9);

        let not_proj = DMatrix::<C64>::identity(4, 4) * c(0.5);
        assert!(max_product_overlap(&not_proj, (2, 2), &opt).is_err());
    }

    #[test]
    fn seesaw_objective_never_decreases() {
        let mut rng = derived_rng(99, Stream::Samples, 0);
        for _ in 0..20 {
            let vecs: Vec<_> = (0..3).map(|_| random_unit_vector(&mut rng, 9)).collect();
            let s = Subspace::from_vectors(&vecs, prof(&[3, 3])).unwrap();
            let a0 = random_unit_vector(&mut rng, 3);
            let run = seesaw_from(s.basis(), (3, 3), a0, 200, 1e-12).unwrap();
            for w in run.objectives.windows(2) {
                assert!(w[1] >= w[0] - 1e-12, "{:?}", run.objectives);
            }
        }
    }

    #[test]
    fn subspace_measures() {
        let opt = small_policy();
        let r = subspace_geometric_measure(&antisym(3), &opt).unwrap();
        assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-9);
        assert!(crate::subspace::contains(&antisym(3), &r.witness_vector, 1e-9).unwrap());

        let full = Subspace::full(prof(&[2, 2]));
        let r = subspace_geometric_measure(&full, &opt).unwrap();
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-12);

        assert!(subspace_geometric_measure(&Subspace::full(prof(&[2, 2, 2])), &opt).is_err());
    }

    #[test]
    fn chain_of_two_singlets_across_cuts() {
        let opt = small_policy();
        let s = antisym(2);
        let t = tensor(&s, &s).unwrap();
        let w = crate::subspace::join(&t, crate::subspace::JoinSpec { left_party: 1 }).unwrap();
        let g = subspace_gme_measure(&w, &opt).unwrap();
        for (cut, r) in &g.per_cut {
            assert!(r.value >= 0.5 - 1e-9, "{cut}: {}", r.value);
        }
        assert_abs_diff_eq!(g.value(), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn warm_starts_respect_column_floor() {
        let mut rng = derived_rng(5, Stream::Samples, 1);
        let opt = OptimizerPolicy { restarts: 2, agreement_count: 1, ..OptimizerPolicy::default() };
        for _ in 0..10 {
            let vecs: Vec<_> = (0..2).map(|_| random_unit_vector(&mut rng, 12)).collect();
            let s = Subspace::from_vectors(&vecs, prof(&[3, 4])).unwrap();
            let cut = Bipartition::new(&[0], s.profile()).unwrap();
            let floor = (0..s.dim())
                .map(|k| schmidt(&s.column_state(k), &cut).unwrap().coeffs[0].powi(2))
                .fold(0.0, f64::max);
            let r = subspace_geometric_measure(&s, &opt).unwrap();
            assert!(1.0 - r.value >= floor - 1e-12);
        }
    }

    #[test]
    fn chain_min() {
        let dummy = MeasureReport { value: 0.0, witness_vector: bell(), stable: true, restarts_agreeing: 1 };
        let mk = |v: f64| MeasureReport { value: v, ..dummy.clone() };
        assert_eq!(ges_measure_chain(&[mk(0.5), mk(0.5)]).unwrap(), 0.5);
        assert_eq!(ges_measure_chain(&[mk(0.3), mk(0.5), mk(0.4)]).unwrap(), 0.3);
        assert_eq!(ges_measure_chain(&[mk(0.4)]).unwrap(), 0.4);
        assert!(ges_measure_chain(&[]).is_err());
    }

    #[test]
    fn witness_examples() {
        let s = antisym(2);
        let w = crate::subspace::join(&tensor(&s, &s).unwrap(), crate::subspace::JoinSpec { left_party: 1 }).unwrap();
        let inside = w.column_state(0).projector();
        assert_abs_diff_eq!(witness_value(&inside, &w, 0.5).unwrap(), 0.5, epsilon = 1e-12);
        let mixed = DensityOperator::maximally_mixed(w.profile().clone());
        assert_abs_diff_eq!(witness_value(&mixed, &w, 0.5).unwrap(), 1.0 / 16.0 - 0.5, epsilon = 1e-12);
        assert!(witness_value(&mixed, &w, 1.5).is_err());
    }

    #[test]
    fn ge_condition_examples() {
        let b = bell().projector();
        let span = from_span(&[bell()]).unwrap();
        let r = product_state_ge_condition(&b, &b, &span, &span, 0.5, 0.5).unwrap();
        assert_abs_diff_eq!(r.lhs, 1.0, epsilon = 1e-12);
        assert!(r.certified);
        let m = DensityOperator::maximally_mixed(prof(&[2, 2]));
        let r = product_state_ge_condition(&m, &m, &span, &span, 0.5, 0.5).unwrap();
        assert!(!r.certified);
        assert_abs_diff_eq!(r.lhs, 1.0 / 16.0, epsilon = 1e-12);
    }

    #[test]
    fn cren_examples() {
        assert_abs_diff_eq!(cren_lower_bound(1.0, 1.0, 0.5).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(cren_lower_bound(0.8, 0.9, 0.5).unwrap(), 0.72 - 0.5, epsilon = 1e-15);
        // numerator 0 exactly: 0.5 * 1 + 0.5 - 1
        assert_abs_diff_eq!(cren_lower_bound(0.5, 1.0, 0.5).unwrap(), 0.0, epsilon = 1e-15);
        assert!(cren_lower_bound(1.0, 1.0, 1.0).is_err());
    }

    /// Bipartite qutrit state with Schmidt spectrum `lambdas` on basis pairs
    /// `(i, (i + shift) % 3)`.
    fn qutrit_state(lambdas: [f64; 3], shift: usize) -> PureState {
        let mut v = vec![0.0; 9];
        for i in 0..3 {
            v[i * 3 + (i + shift) % 3] = lambdas[i].sqrt();
        }
        state(&[3, 3], &v)
    }

    #[test]
    fn span_condition_examples() {
        let r = theorem8_condition(&[bell()]).unwrap();
        assert_abs_diff_eq!(r.sum_minus, 0.5, epsilon = 1e-14);
        assert!(r.certified);

        let minus = state(&[2, 2], &[1.0, 0.0, 0.0, -1.0]);
        let r = theorem8_condition(&[bell(), minus]).unwrap();
        assert_abs_diff_eq!(r.sum_minus, 0.0, epsilon = 1e-14);
        assert!(!r.certified);

        // lambda = (0.4, 0.3, 0.3): G = 0.6 each; shifted supports are disjoint
        let a = qutrit_state([0.4, 0.3, 0.3], 0);
        let b = qutrit_state([0.4, 0.3, 0.3], 1);
        let r = theorem8_condition(&[a, b]).unwrap();
        assert_abs_diff_eq!(r.sum_minus, 0.2, epsilon = 1e-12);
        assert!(r.certified);

        let p = state(&[2, 2], &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(theorem8_condition(&[bell(), p]), Err(Error::Precondition(_))));
    }

    #[test]
    fn joined_pair_certificates() {
        assert!(lemma9_certify(&[(bell(), bell())]).unwrap());
        let minus = state(&[2, 2], &[1.0, 0.0, 0.0, -1.0]);
        assert!(!lemma9_certify(&[(bell(), bell()), (bell(), minus)]).unwrap());
        let a = qutrit_state([0.4, 0.3, 0.3], 0);
        let b = qutrit_state([0.4, 0.3, 0.3], 1);
        assert!(lemma9_certify(&[(bell(), a), (bell(), b)]).unwrap());
        let prod = state(&[2, 2], &[1.0, 0.0, 0.0, 0.0]);
        match lemma9_certify(&[(prod, bell())]) {
            Err(Error::Precondition(m)) => assert!(m.contains("pair 0")),
            other => panic!("{other:?}"),
        }
        let rho = lemma9_state(&[(bell(), bell())]).unwrap();
        assert_eq!(rho.profile().dims(), &[2, 4, 2]);
    }

    #[test]
    fn witness_is_linear_in_state() {
        let s = antisym(2);
        let w = crate::subspace::join(&tensor(&s, &s).unwrap(), crate::subspace::JoinSpec { left_party: 1 }).unwrap();
        let a = w.column_state(0).projector();
        let b = DensityOperator::maximally_mixed(w.profile().clone());
        let mix = a.mix(&b, 0.3).unwrap();
        let lhs = witness_value(&mix, &w, 0.5).unwrap();
        let rhs = 0.3 * witness_value(&a, &w, 0.5).unwrap() + 0.7 * witness_value(&b, &w, 0.5).unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
    }

    #[test]
    fn direct_sum_measure_is_not_larger_than_parts() {
        let opt = small_policy();
        let a = antisym(3);
        let sym_part = from_span(&[state(&[3, 3], &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])]).unwrap();
        let sum = direct_sum(&[a, sym_part]).unwrap();
        let r = subspace_geometric_measure(&sum, &opt).unwrap();
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-9);
    }
}
