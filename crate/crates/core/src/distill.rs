//! Partial-transpose tests and one-copy distillability witnesses.
//!
//! A state is NPT across a cut when its partial transpose has a negative
//! eigenvalue, and one-copy distillable when some Schmidt-rank-2 vector `psi`
//! has `<psi|rho^T|psi> < 0`. The rank-2 search alternates between the two
//! sides of the cut: fixing a 2-dimensional subspace on one side, the best
//! vector in `Q ⊗ (other side)` is a minimum eigenvector, and its top two
//! Schmidt vectors on the other side fix the next subspace.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{arg_err, Error, Result};
use crate::linalg::{
    hermitian_eig, kron, kron_vec, max_eigenpair, min_eigenpair, partial_trace, partial_transpose,
    permutation_index_map, ungroup_vector, Bipartition, DensityOperator, DimProfile, PureState, C64,
};
use crate::measures::OptimizerPolicy;
use crate::policy::NumericPolicy;
use crate::rng::{derived_rng, gaussian_matrix, random_unit_vector, Stream};
use crate::subspace::{projector, Subspace};

const POLICY: NumericPolicy = NumericPolicy::DEFAULT;

/// Smallest conditioning weight `c` accepted for a sampled `tau`.
const MIN_TAU_WEIGHT: f64 = 1e-12;

/// Default number of `tau` vectors tried by [`appendix_witness`].
pub const DEFAULT_TAU_SAMPLES: usize = 16;

/// Minimum eigenpair of a partial transpose.
#[derive(Clone, Debug)]
pub struct PTReport {
    pub cut: Bipartition,
    pub min_eigenvalue: f64,
    pub witness_eigvec: DVector<C64>,
}

#[derive(Clone, Debug)]
pub struct DistillWitness {
    pub cut: Bipartition,
    /// Schmidt rank at most 2 across `cut`.
    pub psi: PureState,
    /// `<psi| rho^{T_cut} |psi>`.
    pub value: f64,
}

pub fn min_pt_eigenvalue(rho: &DensityOperator, cut: &Bipartition) -> Result<PTReport> {
    let pt = partial_transpose(rho, cut)?;
    let (min_eigenvalue, witness_eigvec) = min_eigenpair(&pt)?;
    Ok(PTReport { cut: cut.clone(), min_eigenvalue, witness_eigvec })
}

/// `<psi| rho^{T_cut} |psi>`.
pub fn pt_expectation(rho: &DensityOperator, cut: &Bipartition, psi: &PureState) -> Result<f64> {
    if psi.profile() != rho.profile() {
        return Err(arg_err!("state profile {} does not match {}", psi.profile(), rho.profile()));
    }
    let pt = partial_transpose(rho, cut)?;
    let v = psi.amplitudes();
    Ok((v.adjoint() * pt * v)[(0, 0)].re)
}

// ---------------------------------------------------------------------------
// Sampling

fn sample_with_rng<R: Rng + ?Sized>(w: &Subspace, rank: usize, rng: &mut R) -> Result<DensityOperator> {
    if rank == 0 || rank > w.dim() {
        return Err(arg_err!("rank {rank} outside 1..={}", w.dim()));
    }
    let c = gaussian_matrix(rng, w.dim(), rank);
    let b = w.basis() * c;
    DensityOperator::from_unnormalized(&b * b.adjoint(), w.profile().clone())
}

/// `B C C^dagger B^dagger` normalized, with `C` a complex Gaussian
/// `dim(w) × rank` matrix.
pub fn sample_state_on_subspace(w: &Subspace, rank: usize, seed: u64) -> Result<DensityOperator> {
    let mut rng = derived_rng(seed, Stream::Samples, 0);
    sample_with_rng(w, rank, &mut rng)
}

/// Sample `index` of the sequence used by [`npt_subspace_check`]: a state of
/// uniformly random rank in `1..=dim(w)`.
pub fn sample_random_rank(w: &Subspace, seed: u64, index: u64) -> Result<DensityOperator> {
    let mut rng = derived_rng(seed, Stream::Samples, index);
    let rank = rng.random_range(1..=w.dim());
    sample_with_rng(w, rank, &mut rng)
}

/// Per-cut outcome of [`npt_subspace_check`].
#[derive(Clone, Debug, Serialize)]
pub struct CutNptReport {
    pub cut: Vec<usize>,
    pub cut_label: String,
    /// Largest minimum PT eigenvalue over the samples (the least NPT sample).
    pub max_min_eigenvalue: f64,
    pub min_min_eigenvalue: f64,
    pub mean_min_eigenvalue: f64,
    /// Index of the least NPT sample.
    pub worst_sample: usize,
    /// Minimum PT eigenvector of the least NPT sample, as `[re, im]`.
    pub witness_eigvec: Vec<[f64; 2]>,
    pub npt: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NptCheckReport {
    pub dims: Vec<usize>,
    pub subspace_dim: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub margin: f64,
    pub cuts: Vec<CutNptReport>,
    pub passed: bool,
}

/// Samples `n_samples` states of random rank supported on `w` and checks that
/// every one is NPT across every listed cut (minimum PT eigenvalue below
/// `-npt_margin`).
pub fn npt_subspace_check(w: &Subspace, cuts: &[Bipartition], n_samples: usize, seed: u64) -> Result<NptCheckReport> {
    if n_samples == 0 {
        return Err(arg_err!("need at least one sample"));
    }
    for cut in cuts {
        if cut.profile() != w.profile() {
            return Err(arg_err!("cut {cut} does not match profile {}", w.profile()));
        }
    }
    let per_sample: Vec<Result<Vec<PTReport>>> = (0..n_samples)
        .into_par_iter()
        .map(|k| {
            let rho = sample_random_rank(w, seed, k as u64)?;
            cuts.iter().map(|cut| min_pt_eigenvalue(&rho, cut)).collect()
        })
        .collect();
    let per_sample: Vec<Vec<PTReport>> = per_sample.into_iter().collect::<Result<_>>()?;
    let margin = POLICY.npt_margin;
    let reports: Vec<CutNptReport> = cuts
        .iter()
        .enumerate()
        .map(|(ci, cut)| {
            let vals: Vec<f64> = per_sample.iter().map(|s| s[ci].min_eigenvalue).collect();
            let mut worst = 0;
            for (k, &v) in vals.iter().enumerate() {
                if v > vals[worst] {
                    worst = k;
                }
            }
            let max = vals[worst];
            CutNptReport {
                cut: cut.members().to_vec(),
                cut_label: cut.to_string(),
                max_min_eigenvalue: max,
                min_min_eigenvalue: vals.iter().cloned().fold(f64::INFINITY, f64::min),
                mean_min_eigenvalue: vals.iter().sum::<f64>() / vals.len() as f64,
                worst_sample: worst,
                witness_eigvec: per_sample[worst][ci].witness_eigvec.iter().map(|z| [z.re, z.im]).collect(),
                npt: max < -margin,
            }
        })
        .collect();
    Ok(NptCheckReport {
        dims: w.profile().dims().to_vec(),
        subspace_dim: w.dim(),
        n_samples,
        seed,
        margin,
        passed: reports.iter().all(|r| r.npt),
        cuts: reports,
    })
}

// ---------------------------------------------------------------------------
// Schmidt-rank-2 search

/// Top-two Schmidt vectors of a grouped `da × db` vector on each side, padded
/// with an orthonormal completion when the rank is below 2.
fn top_two_schmidt(psi: &DVector<C64>, da: usize, db: usize) -> (DMatrix<C64>, DMatrix<C64>) {
    let m = DMatrix::from_fn(da, db, |a, b| psi[a * db + b]);
    let svd = m.svd(true, true);
    let u = svd.u.expect("svd u");
    let vt = svd.v_t.expect("svd v_t");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let left = DMatrix::from_fn(da, 2, |r, k| u[(r, order[k])]);
    let right = DMatrix::from_fn(db, 2, |r, k| vt[(order[k], r)]);
    (left, right)
}

/// `(Q ⊗ I)^dagger X (Q ⊗ I)` for grouped `X` over `da × db`, `Q` being `da × r`.
fn compress_left(x: &DMatrix<C64>, q: &DMatrix<C64>, db: usize) -> DMatrix<C64> {
    let (da, r) = q.shape();
    let mut out = DMatrix::zeros(r * db, r * db);
    for a in 0..da {
        for a2 in 0..da {
            let block = x.view((a * db, a2 * db), (db, db));
            for k in 0..r {
                for k2 in 0..r {
                    let w = q[(a, k)].conj() * q[(a2, k2)];
                    if w != C64::from(0.0) {
                        let mut target = out.view_mut((k * db, k2 * db), (db, db));
                        target += block * w;
                    }
                }
            }
        }
    }
    out
}

/// `(I ⊗ Q)^dagger X (I ⊗ Q)` for grouped `X` over `da × db`, `Q` being `db × r`.
fn compress_right(x: &DMatrix<C64>, q: &DMatrix<C64>, da: usize) -> DMatrix<C64> {
    let (db, r) = q.shape();
    let qh = q.adjoint();
    let mut out = DMatrix::zeros(da * r, da * r);
    for a in 0..da {
        for a2 in 0..da {
            let block = &qh * x.view((a * db, a2 * db), (db, db)) * q;
            out.view_mut((a * r, a2 * r), (r, r)).copy_from(&block);
        }
    }
    out
}

/// One alternating run from the A-side start `qa` on grouped `x`.
fn rank2_run(x: &DMatrix<C64>, da: usize, db: usize, mut qa: DMatrix<C64>, opt: &OptimizerPolicy) -> Result<(f64, DVector<C64>)> {
    let ib = DMatrix::<C64>::identity(db, db);
    let ia = DMatrix::<C64>::identity(da, da);
    let mut best = (f64::INFINITY, DVector::zeros(da * db));
    for _ in 0..opt.max_iters {
        let (v1, phi) = min_eigenpair(&compress_left(x, &qa, db))?;
        let psi = kron(&qa, &ib)? * phi;
        let (_, qb) = top_two_schmidt(&psi, da, db);
        let (v2, phi) = min_eigenpair(&compress_right(x, &qb, da))?;
        let psi2 = kron(&ia, &qb)? * phi;
        let prev = best.0;
        if v1 < best.0 {
            best = (v1, psi);
        }
        if v2 < best.0 {
            best = (v2, psi2.clone());
        }
        qa = top_two_schmidt(&psi2, da, db).0;
        if prev - best.0 < opt.conv_tol {
            break;
        }
    }
    Ok(best)
}

/// Minimizes `<psi| rho^{T_cut} |psi>` over vectors of Schmidt rank at most 2
/// across `cut`. Returns a witness when the minimum found is below
/// `-witness_margin`.
pub fn rank2_witness_search(rho: &DensityOperator, cut: &Bipartition, opt: &OptimizerPolicy) -> Result<Option<DistillWitness>> {
    opt.validate()?;
    let pt = partial_transpose(rho, cut)?;
    let perm = cut.grouping_permutation();
    let (_, map) = permutation_index_map(rho.profile(), &perm)?;
    let n = map.len();
    let x = DMatrix::from_fn(n, n, |r, c| pt[(map[r], map[c])]);
    let (da, db) = cut.side_dims();

    let (min_val, min_vec) = min_eigenpair(&x)?;
    let grouped = if da.min(db) <= 2 {
        // every vector has Schmidt rank <= 2
        min_vec
    } else {
        let (start, _) = top_two_schmidt(&min_vec, da, db);
        let runs: Vec<Result<(f64, DVector<C64>)>> = (0..opt.restarts)
            .into_par_iter()
            .map(|r| {
                let qa = if r == 0 {
                    start.clone()
                } else {
                    let mut rng = derived_rng(opt.seed, Stream::Rank2, r as u64);
                    gaussian_matrix(&mut rng, da, 2).qr().q()
                };
                rank2_run(&x, da, db, qa, opt)
            })
            .collect();
        let runs: Vec<(f64, DVector<C64>)> = runs.into_iter().collect::<Result<_>>()?;
        let mut best = 0;
        for (i, r) in runs.iter().enumerate() {
            if r.0 < runs[best].0 {
                best = i;
            }
        }
        debug_assert!(runs[best].0 >= min_val - 1e-9);
        runs[best].1.clone()
    };
    let psi = PureState::normalized(ungroup_vector(&grouped, cut)?, rho.profile().clone())?;
    let value = pt_expectation(rho, cut, &psi)?;
    if value < -POLICY.witness_margin {
        Ok(Some(DistillWitness { cut: cut.clone(), psi, value }))
    } else {
        Ok(None)
    }
}

// ---------------------------------------------------------------------------
// Structured witness for two-part chains

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CutKind {
    /// `A_1 | A_2' A_4`: transpose `A_1`, contract `tau` on `A_3 A_4`.
    Left,
    /// `A_1 A_2' | A_4`: transpose `A_4`, contract `tau` on `A_1 A_2`.
    Right,
    /// `A_2' | A_1 A_4`: transpose `A_1 A_4`, product `tau` on `A_3 A_4`.
    Middle,
}

/// `(I ⊗ <t|) m (I ⊗ |t>)` when `tail`, else `(<t| ⊗ I) m (|t> ⊗ I)`.
fn contract(m: &DMatrix<C64>, t: &DVector<C64>, keep_dim: usize, tail: bool) -> DMatrix<C64> {
    let dt = t.len();
    DMatrix::from_fn(keep_dim, keep_dim, |x, y| {
        let mut acc = C64::from(0.0);
        for s in 0..dt {
            for u in 0..dt {
                let (r, c) = if tail { (x * dt + s, y * dt + u) } else { (s * keep_dim + x, u * keep_dim + y) };
                acc += t[s].conj() * m[(r, c)] * t[u];
            }
        }
        acc
    })
}

/// Witness `Gamma = Phi ⊗ tau` for a state supported on the chain of two
/// bipartite subspaces `parts`, built by conditioning on `tau` and running
/// the rank-2 search on the conditioned state of one part.
///
/// `rho` lives on `d1 ⊗ (d2 d3) ⊗ d4`. Fails with a precondition error when
/// `rho` is not supported on the chain.
pub fn appendix_witness(
    rho: &DensityOperator,
    parts: (&Subspace, &Subspace),
    cut: &Bipartition,
    tau_samples: usize,
    opt: &OptimizerPolicy,
) -> Result<Option<DistillWitness>> {
    let (s1, s2) = parts;
    if s1.profile().n_parties() != 2 || s2.profile().n_parties() != 2 {
        return Err(arg_err!("chain parts must be bipartite"));
    }
    let [d1, d2] = [s1.profile().dims()[0], s1.profile().dims()[1]];
    let [d3, d4] = [s2.profile().dims()[0], s2.profile().dims()[1]];
    if rho.profile().dims() != [d1, d2 * d3, d4] {
        return Err(arg_err!("state profile {} does not match the chain {d1}⊗{}⊗{d4}", rho.profile(), d2 * d3));
    }
    if cut.profile() != rho.profile() {
        return Err(arg_err!("cut profile does not match state profile"));
    }
    let chain = crate::constructions::chain_ges(&[s1.clone(), s2.clone()])?;
    let support = rho.expectation(&projector(&chain)).re;
    if support < 1.0 - 1e-8 {
        return Err(Error::Precondition(format!(
            "state is not supported on the chain subspace (weight {support:.12})"
        )));
    }

    let canon = cut.canonical();
    let (kind, transposed): (CutKind, &[usize]) = match canon.members() {
        [0] => (CutKind::Left, &[0]),
        [0, 1] => (CutKind::Right, &[2]),
        [0, 2] => (CutKind::Middle, &[0, 2]),
        other => return Err(arg_err!("unexpected cut {other:?}")),
    };
    // Gamma is built for the transposed set above; for the complementary
    // transposed set the expectation of the full transpose needs conj(Gamma).
    let conjugate = cut.members() != transposed;

    let four = DimProfile::new(vec![d1, d2, d3, d4])?;
    let m = rho.matrix();
    let (d12, d34) = (d1 * d2, d3 * d4);

    let candidates = tau_candidates(rho, &four, kind, tau_samples, opt.seed)?;
    for (tau, tau_eff) in candidates {
        let (sigma, sub_profile, sub_cut) = match kind {
            CutKind::Left | CutKind::Middle => {
                (contract(m, &tau_eff, d12, true), DimProfile::new(vec![d1, d2])?, [0usize])
            }
            CutKind::Right => (contract(m, &tau_eff, d34, false), DimProfile::new(vec![d3, d4])?, [1usize]),
        };
        let c = sigma.trace().re;
        if c <= MIN_TAU_WEIGHT {
            continue;
        }
        let sigma = DensityOperator::from_unnormalized(sigma, sub_profile.clone())?;
        let sub_cut = Bipartition::new(&sub_cut, &sub_profile)?;
        let Some(w) = rank2_witness_search(&sigma, &sub_cut, opt)? else {
            continue;
        };
        let phi = w.psi.amplitudes();
        let gamma = match kind {
            CutKind::Left | CutKind::Middle => kron_vec(phi, &tau)?,
            CutKind::Right => kron_vec(&tau, phi)?,
        };
        let gamma = if conjugate { gamma.map(|z| z.conj()) } else { gamma };
        let psi = PureState::normalized(gamma, rho.profile().clone())?;
        let value = pt_expectation(rho, cut, &psi)?;
        if value < -POLICY.witness_margin {
            return Ok(Some(DistillWitness { cut: cut.clone(), psi, value }));
        }
    }
    Ok(None)
}

/// Candidate `(tau, tau_eff)` pairs; `tau_eff` is the vector contracted with
/// `rho` (it differs from `tau` by conjugating the `A_4` factor in the
/// middle case). The first candidate is taken from the reduced state, the
/// rest are random.
fn tau_candidates(
    rho: &DensityOperator,
    four: &DimProfile,
    kind: CutKind,
    n: usize,
    seed: u64,
) -> Result<Vec<(DVector<C64>, DVector<C64>)>> {
    let dims = four.dims().to_vec();
    let rho4 = rho.relabel(four.clone())?;
    let top = |traced: &[usize]| -> Result<DVector<C64>> {
        let red = partial_trace(&rho4, traced)?;
        Ok(max_eigenpair(red.matrix())?.1)
    };
    let mut pairs: Vec<(DVector<C64>, DVector<C64>)> = Vec::with_capacity(n.max(1));
    match kind {
        CutKind::Left => {
            let t = top(&[0, 1])?;
            pairs.push((t.clone(), t));
        }
        CutKind::Right => {
            let t = top(&[2, 3])?;
            pairs.push((t.clone(), t));
        }
        CutKind::Middle => {
            let mu = top(&[0, 1, 3])?;
            let nu_star = top(&[0, 1, 2])?;
            let nu = nu_star.map(|z| z.conj());
            pairs.push((kron_vec(&mu, &nu)?, kron_vec(&mu, &nu_star)?));
        }
    }
    for k in 1..n {
        let mut rng = derived_rng(seed, Stream::Tau, k as u64);
        let pair = match kind {
            CutKind::Left => {
                let t = random_unit_vector(&mut rng, dims[2] * dims[3]);
                (t.clone(), t)
            }
            CutKind::Right => {
                let t = random_unit_vector(&mut rng, dims[0] * dims[1]);
                (t.clone(), t)
            }
            CutKind::Middle => {
                let mu = random_unit_vector(&mut rng, dims[2]);
                let nu = random_unit_vector(&mut rng, dims[3]);
                let nu_star = nu.map(|z| z.conj());
                (kron_vec(&mu, &nu)?, kron_vec(&mu, &nu_star)?)
            }
        };
        pairs.push(pair);
    }
    Ok(pairs)
}

/// Number of eigenvalues above `tol`.
pub fn numerical_rank(rho: &DensityOperator, tol: f64) -> Result<usize> {
    let (vals, _) = hermitian_eig(rho.matrix())?;
    Ok(vals.iter().filter(|&&v| v > tol).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{antisymmetric_subspace, chain_ges, johnston_subspace};
    use crate::linalg::schmidt;
    use approx::assert_abs_diff_eq;

    fn prof(d: &[usize]) -> DimProfile {
        DimProfile::new(d.to_vec()).unwrap()
    }

    fn bell_rho() -> DensityOperator {
        let v = DVector::from_vec(vec![C64::from(1.0), C64::from(0.0), C64::from(0.0), C64::from(1.0)]);
        PureState::normalized(v, prof(&[2, 2])).unwrap().projector()
    }

    fn opt() -> OptimizerPolicy {
        OptimizerPolicy { restarts: 8, ..OptimizerPolicy::default() }
    }

    #[test]
    fn pt_spectra() {
        let cut = Bipartition::new(&[0], &prof(&[2, 2])).unwrap();
        let r = min_pt_eigenvalue(&bell_rho(), &cut).unwrap();
        assert_abs_diff_eq!(r.min_eigenvalue, -0.5, epsilon = 1e-12);

        let mut rng = derived_rng(3, Stream::Samples, 0);
        let a = PureState::new(random_unit_vector(&mut rng, 3), prof(&[3])).unwrap().projector();
        let b = PureState::new(random_unit_vector(&mut rng, 2), prof(&[2])).unwrap().projector();
        let sep = a.kron(&b).unwrap();
        let cut = Bipartition::new(&[0], sep.profile()).unwrap();
        assert!(min_pt_eigenvalue(&sep, &cut).unwrap().min_eigenvalue >= -1e-12);
    }

    #[test]
    fn pt_spectrum_is_cut_symmetric() {
        let w = chain_ges(&[johnston_subspace(3, 3).unwrap(), johnston_subspace(2, 2).unwrap()]).unwrap();
        let rho = sample_state_on_subspace(&w, 3, 9).unwrap();
        for cut in Bipartition::all_cuts(w.profile()) {
            let a = min_pt_eigenvalue(&rho, &cut).unwrap().min_eigenvalue;
            let b = min_pt_eigenvalue(&rho, &cut.complement()).unwrap().min_eigenvalue;
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn sampling() {
        let w = johnston_subspace(3, 3).unwrap();
        let p = projector(&w);
        for rank in 1..=4 {
            let rho = sample_state_on_subspace(&w, rank, 17).unwrap();
            assert_abs_diff_eq!(rho.expectation(&p).re, 1.0, epsilon = 1e-10);
            assert_eq!(numerical_rank(&rho, 1e-10).unwrap(), rank);
        }
        assert!(sample_state_on_subspace(&w, 5, 1).is_err());
        assert!(sample_state_on_subspace(&w, 0, 1).is_err());
    }

    #[test]
    fn npt_checks() {
        let singlet = antisymmetric_subspace(2).unwrap();
        let cuts = Bipartition::all_cuts(singlet.profile());
        let r = npt_subspace_check(&singlet, &cuts, 5, 1).unwrap();
        assert!(r.passed);
        assert_abs_diff_eq!(r.cuts[0].max_min_eigenvalue, -0.5, epsilon = 1e-12);

        let full = Subspace::full(prof(&[2, 2]));
        let cuts = Bipartition::all_cuts(full.profile());
        let r = npt_subspace_check(&full, &cuts, 30, 1).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn rank2_on_bell_and_separable() {
        let cut = Bipartition::new(&[0], &prof(&[2, 2])).unwrap();
        let w = rank2_witness_search(&bell_rho(), &cut, &opt()).unwrap().unwrap();
        assert_abs_diff_eq!(w.value, -0.5, epsilon = 1e-12);

        let mixed = DensityOperator::maximally_mixed(prof(&[3, 3]));
        let cut = Bipartition::new(&[0], mixed.profile()).unwrap();
        assert!(rank2_witness_search(&mixed, &cut, &opt()).unwrap().is_none());
    }

    #[test]
    fn rank2_in_large_local_dims() {
        // Werner-like singlet mixture on 3 ⊗ 3 ⊗ 3 cut {0}|{1,2}: side dims 3 and 9.
        let a3 = antisymmetric_subspace(3).unwrap();
        let w = crate::subspace::tensor(&a3, &Subspace::full(prof(&[3]))).unwrap();
        let rho = sample_state_on_subspace(&w, 2, 5).unwrap();
        let cut = Bipartition::new(&[0], rho.profile()).unwrap();
        let wit = rank2_witness_search(&rho, &cut, &opt()).unwrap().unwrap();
        let s = schmidt(&wit.psi, &cut).unwrap();
        assert!(s.coeffs.len() < 3 || s.coeffs[2] < 1e-9);
        assert_abs_diff_eq!(wit.value, pt_expectation(&rho, &cut, &wit.psi).unwrap(), epsilon = 1e-10);
        let pt_min = min_pt_eigenvalue(&rho, &cut).unwrap().min_eigenvalue;
        assert!(wit.value >= pt_min - 1e-10);
    }

    #[test]
    fn appendix_on_two_singlets() {
        let s = antisymmetric_subspace(2).unwrap();
        let w = chain_ges(&[s.clone(), s.clone()]).unwrap();
        let rho = w.column_state(0).projector();
        for cut in Bipartition::all_cuts(w.profile()) {
            for c in [cut.clone(), cut.complement()] {
                let wit = appendix_witness(&rho, (&s, &s), &c, DEFAULT_TAU_SAMPLES, &opt()).unwrap().unwrap();
                assert!(wit.value <= -0.125 + 1e-12, "{c}: {}", wit.value);
                let sch = schmidt(&wit.psi, &c).unwrap();
                assert!(sch.coeffs.len() < 3 || sch.coeffs[2] < 1e-9);
            }
        }
    }

    #[test]
    fn appendix_on_example_w() {
        let j = johnston_subspace(3, 3).unwrap();
        let w = chain_ges(&[j.clone(), j.clone()]).unwrap();
        let rho = DensityOperator::from_unnormalized(projector(&w), w.profile().clone()).unwrap();
        for cut in Bipartition::all_cuts(w.profile()) {
            let wit = appendix_witness(&rho, (&j, &j), &cut, DEFAULT_TAU_SAMPLES, &opt()).unwrap().unwrap();
            let general = rank2_witness_search(&rho, &cut, &opt()).unwrap().unwrap();
            assert!(general.value <= wit.value + 1e-9, "{cut}: {} vs {}", general.value, wit.value);
        }
    }

    #[test]
    fn appendix_rejects_unsupported_state() {
        let s = antisymmetric_subspace(2).unwrap();
        let rho = DensityOperator::maximally_mixed(prof(&[2, 4, 2]));
        let cut = Bipartition::new(&[0], rho.profile()).unwrap();
        assert!(matches!(
            appendix_witness(&rho, (&s, &s), &cut, 4, &opt()),
            Err(Error::Precondition(_))
        ));
    }
}
