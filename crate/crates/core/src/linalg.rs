//! Dense complex linear algebra with multipartite index bookkeeping.
//!
//! All flattening follows the lexicographic convention: for parties with
//! dimensions `(d_0, ..., d_{n-1})` the basis state `|i_0 ... i_{n-1}>` sits at
//! flat index `((i_0 d_1 + i_1) d_2 + i_2) ...`. Party indices are 0-based.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::policy::NumericPolicy;

pub type C64 = num_complex::Complex64;

const POLICY: NumericPolicy = NumericPolicy::DEFAULT;

/// Ordered local dimensions of a multipartite space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct DimProfile {
    dims: Vec<usize>,
}

impl DimProfile {
    /// Profile whose parties all have dimension at least two.
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(arg_err!("party dimension {d} < 2 in profile {dims:?}"));
        }
        Self::allowing_trivial(dims)
    }

    /// Like [`DimProfile::new`] but admits one-dimensional parties, as needed
    /// for the input space of a channel built from a one-dimensional subspace.
    pub fn allowing_trivial(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(arg_err!("empty dimension profile"));
        }
        if dims.contains(&0) {
            return Err(arg_err!("zero party dimension in profile {dims:?}"));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= POLICY.ambient_cap)
                .ok_or_else(|| {
                    Error::Resource(format!(
                        "profile {dims:?} exceeds ambient dimension cap {}",
                        POLICY.ambient_cap
                    ))
                })?;
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Product of the dimensions of the listed parties.
    pub fn dim_of(&self, parties: &[usize]) -> usize {
        parties.iter().map(|&p| self.dims[p]).product()
    }

    /// Concatenation `self ⊗ other`.
    pub fn concat(&self, other: &DimProfile) -> Result<DimProfile> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DimProfile::allowing_trivial(dims)
    }

    /// Digits of `index` in the mixed radix given by the profile.
    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.dims.len()];
        for (k, &d) in self.dims.iter().enumerate().rev() {
            digits[k] = index % d;
            index /= d;
        }
        digits
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }
}

impl TryFrom<Vec<usize>> for DimProfile {
    type Error = Error;
    fn try_from(dims: Vec<usize>) -> Result<Self> {
        DimProfile::new(dims)
    }
}

impl From<DimProfile> for Vec<usize> {
    fn from(p: DimProfile) -> Self {
        p.dims
    }
}

impl fmt::Display for DimProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("⊗"))
    }
}

/// Normalized amplitude vector over a [`DimProfile`].
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: DVector<C64>,
    profile: DimProfile,
}

impl PureState {
    /// Wraps an already normalized vector.
    pub fn new(amplitudes: DVector<C64>, profile: DimProfile) -> Result<Self> {
        check_len(amplitudes.len(), &profile)?;
        let n = amplitudes.norm();
        if (n - 1.0).abs() > POLICY.norm {
            return Err(arg_err!("state norm {n} differs from 1"));
        }
        Ok(Self { amplitudes, profile })
    }

    /// Normalizes `amplitudes`; fails on a (numerically) zero vector.
    pub fn normalized(amplitudes: DVector<C64>, profile: DimProfile) -> Result<Self> {
        check_len(amplitudes.len(), &profile)?;
        let n = amplitudes.norm();
        if n < POLICY.rank_cut {
            return Err(arg_err!("cannot normalize a zero vector"));
        }
        Ok(Self { amplitudes: amplitudes / C64::from(n), profile })
    }

    /// Computational basis state `|digits>`.
    pub fn basis(profile: DimProfile, digits: &[usize]) -> Result<Self> {
        if digits.len() != profile.n_parties()
            || digits.iter().zip(profile.dims()).any(|(&i, &d)| i >= d)
        {
            return Err(arg_err!("basis digits {digits:?} invalid for {profile}"));
        }
        let mut v = DVector::zeros(profile.total());
        v[profile.encode(digits)] = C64::from(1.0);
        Ok(Self { amplitudes: v, profile })
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn profile(&self) -> &DimProfile {
        &self.profile
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn projector(&self) -> DensityOperator {
        DensityOperator {
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
            profile: self.profile.clone(),
        }
    }

    /// Same amplitudes read with a different profile of equal total dimension.
    pub fn relabel(&self, profile: DimProfile) -> Result<Self> {
        check_len(self.amplitudes.len(), &profile)?;
        Ok(Self { amplitudes: self.amplitudes.clone(), profile })
    }

    /// Complex conjugate in the computational basis.
    pub fn conj(&self) -> Self {
        Self { amplitudes: self.amplitudes.map(|z| z.conj()), profile: self.profile.clone() }
    }

    pub fn kron(&self, other: &PureState) -> Result<PureState> {
        let profile = self.profile.concat(&other.profile)?;
        Ok(Self { amplitudes: kron_vec(&self.amplitudes, &other.amplitudes)?, profile })
    }
}

fn check_len(len: usize, profile: &DimProfile) -> Result<()> {
    if len != profile.total() {
        return Err(arg_err!("vector length {len} does not match profile {profile}"));
    }
    Ok(())
}

/// Hermitian, unit-trace, positive semidefinite matrix over a [`DimProfile`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<C64>,
    profile: DimProfile,
}

impl DensityOperator {
    /// Validates the density-operator invariants and symmetrizes away
    /// sub-tolerance anti-Hermitian noise.
    pub fn new(matrix: DMatrix<C64>, profile: DimProfile) -> Result<Self> {
        let n = profile.total();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(arg_err!(
                "matrix {}x{} does not match profile {profile}",
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        let herm = hermiticity_defect(&matrix);
        if herm > POLICY.hermiticity {
            return Err(arg_err!("density matrix not Hermitian (defect {herm:e})"));
        }
        let matrix = symmetrize(&matrix);
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > POLICY.norm || tr.im.abs() > POLICY.norm {
            return Err(arg_err!("density matrix trace {tr} differs from 1"));
        }
        let (evals, _) = hermitian_eig(&matrix)?;
        if evals[0] < POLICY.psd_floor {
            return Err(arg_err!("density matrix has eigenvalue {} < 0", evals[0]));
        }
        Ok(Self { matrix, profile })
    }

    /// Scales a positive semidefinite matrix to unit trace, then validates.
    pub fn from_unnormalized(matrix: DMatrix<C64>, profile: DimProfile) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr <= POLICY.rank_cut {
            return Err(arg_err!("cannot normalize an operator with trace {tr}"));
        }
        let scaled = symmetrize(&matrix) / C64::from(tr);
        Self::new(scaled, profile)
    }

    pub fn maximally_mixed(profile: DimProfile) -> Self {
        let n = profile.total();
        Self { matrix: DMatrix::identity(n, n) / C64::from(n as f64), profile }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn profile(&self) -> &DimProfile {
        &self.profile
    }

    /// Same matrix read with a different profile of equal total dimension.
    pub fn relabel(&self, profile: DimProfile) -> Result<Self> {
        check_len(self.matrix.nrows(), &profile)?;
        Ok(Self { matrix: self.matrix.clone(), profile })
    }

    /// `Tr(rho M)` for a square matrix of matching size.
    pub fn expectation(&self, m: &DMatrix<C64>) -> C64 {
        (&self.matrix * m).trace()
    }

    pub fn kron(&self, other: &DensityOperator) -> Result<DensityOperator> {
        let profile = self.profile.concat(&other.profile)?;
        Ok(Self { matrix: kron(&self.matrix, &other.matrix)?, profile })
    }

    /// Convex combination `w rho_1 + (1 - w) rho_2`.
    pub fn mix(&self, other: &DensityOperator, w: f64) -> Result<DensityOperator> {
        if self.profile != other.profile || !(0.0..=1.0).contains(&w) {
            return Err(arg_err!("invalid mixture"));
        }
        Ok(Self {
            matrix: &self.matrix * C64::from(w) + &other.matrix * C64::from(1.0 - w),
            profile: self.profile.clone(),
        })
    }
}

/// Set of parties `A` defining the cut `A | Ā`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bipartition {
    members: Vec<usize>,
    profile: DimProfile,
}

impl Bipartition {
    pub fn new(members: &[usize], profile: &DimProfile) -> Result<Self> {
        let n = profile.n_parties();
        let mut m: Vec<usize> = members.to_vec();
        m.sort_unstable();
        m.dedup();
        if m.len() != members.len() {
            return Err(arg_err!("duplicate party in cut {members:?}"));
        }
        if m.is_empty() || m.len() >= n || m.iter().any(|&p| p >= n) {
            return Err(arg_err!(
                "cut {members:?} is not a nonempty strict subset of {n} parties"
            ));
        }
        Ok(Self { members: m, profile: profile.clone() })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn profile(&self) -> &DimProfile {
        &self.profile
    }

    pub fn complement_members(&self) -> Vec<usize> {
        (0..self.profile.n_parties()).filter(|p| !self.members.contains(p)).collect()
    }

    pub fn complement(&self) -> Bipartition {
        Bipartition { members: self.complement_members(), profile: self.profile.clone() }
    }

    /// The representative of `A | Ā` that contains party 0.
    pub fn canonical(&self) -> Bipartition {
        if self.members[0] == 0 {
            self.clone()
        } else {
            self.complement()
        }
    }

    /// Whether both cuts split the parties the same way.
    pub fn same_split(&self, other: &Bipartition) -> bool {
        self.profile == other.profile && self.canonical().members == other.canonical().members
    }

    /// `(d_A, d_Ā)`.
    pub fn side_dims(&self) -> (usize, usize) {
        (self.profile.dim_of(&self.members), self.profile.dim_of(&self.complement_members()))
    }

    /// Permutation placing the members first, each side in ascending order.
    pub fn grouping_permutation(&self) -> Vec<usize> {
        let mut perm = self.members.clone();
        perm.extend(self.complement_members());
        perm
    }

    /// All `2^(n-1) - 1` cuts, each in canonical form, lexicographically ordered.
    pub fn all_cuts(profile: &DimProfile) -> Vec<Bipartition> {
        let n = profile.n_parties();
        let mut cuts: Vec<Vec<usize>> = Vec::new();
        if n < 2 {
            return Vec::new();
        }
        // subsets of {1..n-1} joined with party 0, excluding the full set
        for mask in 0u64..(1u64 << (n - 1)) {
            let mut m = vec![0];
            m.extend((1..n).filter(|&p| mask & (1 << (p - 1)) != 0));
            if m.len() < n {
                cuts.push(m);
            }
        }
        cuts.sort();
        cuts.into_iter()
            .map(|members| Bipartition { members, profile: profile.clone() })
            .collect()
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}|{:?}", self.members, self.complement_members())
    }
}

// ---------------------------------------------------------------------------
// Kronecker products

fn checked_product(a: usize, b: usize, cap: usize) -> Result<usize> {
    a.checked_mul(b).filter(|&n| n <= cap).ok_or_else(|| {
        Error::Resource(format!("kron of sizes {a} and {b} exceeds ambient dimension cap {cap}"))
    })
}

/// Kronecker product of two matrices; result indices are lexicographic in the
/// operand indices.
pub fn kron(x: &DMatrix<C64>, y: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    kron_capped(x, y, POLICY.ambient_cap)
}

pub fn kron_capped(x: &DMatrix<C64>, y: &DMatrix<C64>, cap: usize) -> Result<DMatrix<C64>> {
    let rows = checked_product(x.nrows(), y.nrows(), cap)?;
    let cols = checked_product(x.ncols(), y.ncols(), cap)?;
    let (yr, yc) = y.shape();
    Ok(DMatrix::from_fn(rows, cols, |r, c| x[(r / yr, c / yc)] * y[(r % yr, c % yc)]))
}

pub fn kron_vec(x: &DVector<C64>, y: &DVector<C64>) -> Result<DVector<C64>> {
    let n = checked_product(x.len(), y.len(), POLICY.ambient_cap)?;
    let m = y.len();
    Ok(DVector::from_fn(n, |i, _| x[i / m] * y[i % m]))
}

// ---------------------------------------------------------------------------
// Party permutations

fn validate_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(arg_err!("permutation {perm:?} has wrong length for {n} parties"));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(arg_err!("{perm:?} is not a permutation of 0..{n}"));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Output profile and, for every output flat index, the input flat index it
/// reads from. Party `k` of the output is party `perm[k]` of the input.
pub fn permutation_index_map(profile: &DimProfile, perm: &[usize]) -> Result<(DimProfile, Vec<usize>)> {
    validate_permutation(perm, profile.n_parties())?;
    let out_dims: Vec<usize> = perm.iter().map(|&p| profile.dims()[p]).collect();
    let out = DimProfile::allowing_trivial(out_dims)?;
    let n = profile.n_parties();
    let map = (0..profile.total())
        .map(|o| {
            let od = out.decode(o);
            let mut id = vec![0; n];
            for k in 0..n {
                id[perm[k]] = od[k];
            }
            profile.encode(&id)
        })
        .collect();
    Ok((out, map))
}

/// Reorders the rows of `m` (the columns of a basis matrix, or a state vector)
/// so that the party order follows `perm`.
pub fn permute_rows(m: &DMatrix<C64>, profile: &DimProfile, perm: &[usize]) -> Result<(DimProfile, DMatrix<C64>)> {
    let (out, map) = permutation_index_map(profile, perm)?;
    check_len(m.nrows(), profile)?;
    let permuted = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(map[r], c)]);
    Ok((out, permuted))
}

/// Values that can have their parties relabelled.
pub trait PermuteParties: Sized {
    /// Party `k` of the result is party `perm[k]` of `self`.
    fn permute_parties(&self, perm: &[usize]) -> Result<Self>;
}

impl PermuteParties for PureState {
    fn permute_parties(&self, perm: &[usize]) -> Result<Self> {
        let (profile, map) = permutation_index_map(&self.profile, perm)?;
        let amplitudes = DVector::from_fn(map.len(), |i, _| self.amplitudes[map[i]]);
        Ok(PureState { amplitudes, profile })
    }
}

impl PermuteParties for DensityOperator {
    fn permute_parties(&self, perm: &[usize]) -> Result<Self> {
        let (profile, map) = permutation_index_map(&self.profile, perm)?;
        let n = map.len();
        let matrix = DMatrix::from_fn(n, n, |r, c| self.matrix[(map[r], map[c])]);
        Ok(DensityOperator { matrix, profile })
    }
}

pub fn permute_parties<T: PermuteParties>(s: &T, perm: &[usize]) -> Result<T> {
    s.permute_parties(perm)
}

// ---------------------------------------------------------------------------
// Partial trace and transpose

/// Traces out the listed parties of a density operator.
pub fn partial_trace(rho: &DensityOperator, traced: &[usize]) -> Result<DensityOperator> {
    let profile = &rho.profile;
    let n = profile.n_parties();
    let mut t: Vec<usize> = traced.to_vec();
    t.sort_unstable();
    t.dedup();
    if t.is_empty() || t.iter().any(|&p| p >= n) || t.len() != traced.len() {
        return Err(arg_err!("invalid traced set {traced:?} for {n} parties"));
    }
    if t.len() == n {
        return Err(arg_err!("cannot trace out every party; use the full trace"));
    }
    let kept: Vec<usize> = (0..n).filter(|p| !t.contains(p)).collect();
    let mut perm = kept.clone();
    perm.extend(&t);
    let (_, map) = permutation_index_map(profile, &perm)?;
    let dk = profile.dim_of(&kept);
    let dt = profile.dim_of(&t);
    let m = &rho.matrix;
    let out = DMatrix::from_fn(dk, dk, |a, b| {
        (0..dt).map(|s| m[(map[a * dt + s], map[b * dt + s])]).sum::<C64>()
    });
    let kept_profile = DimProfile::allowing_trivial(kept.iter().map(|&p| profile.dims()[p]).collect())?;
    Ok(DensityOperator { matrix: symmetrize(&out), profile: kept_profile })
}

/// Transposes the indices of the parties in `cut.members()`. The result is
/// Hermitian with unit trace but need not be positive.
pub fn partial_transpose(rho: &DensityOperator, cut: &Bipartition) -> Result<DMatrix<C64>> {
    if cut.profile() != rho.profile() {
        return Err(arg_err!("cut profile {} does not match state profile {}", cut.profile(), rho.profile()));
    }
    Ok(partial_transpose_matrix(&rho.matrix, &rho.profile, cut.members()))
}

/// Partial transpose of an arbitrary square matrix over `profile`.
pub fn partial_transpose_matrix(m: &DMatrix<C64>, profile: &DimProfile, parties: &[usize]) -> DMatrix<C64> {
    let n = m.nrows();
    let digits: Vec<Vec<usize>> = (0..n).map(|i| profile.decode(i)).collect();
    let mut out = DMatrix::zeros(n, n);
    let mut rd = vec![0; profile.n_parties()];
    let mut cd = vec![0; profile.n_parties()];
    for r in 0..n {
        for c in 0..n {
            rd.copy_from_slice(&digits[r]);
            cd.copy_from_slice(&digits[c]);
            for &p in parties {
                std::mem::swap(&mut rd[p], &mut cd[p]);
            }
            out[(profile.encode(&rd), profile.encode(&cd))] = m[(r, c)];
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Schmidt decomposition

/// Schmidt decomposition of a state across a cut.
///
/// `left` columns live on the members of the cut (in ascending party order),
/// `right` columns on the complement; `coeffs` are the singular values
/// `sqrt(lambda_i)`, in descending order.
#[derive(Clone, Debug)]
pub struct Schmidt {
    pub coeffs: Vec<f64>,
    pub left: DMatrix<C64>,
    pub right: DMatrix<C64>,
    pub cut: Bipartition,
}

impl Schmidt {
    /// Squared coefficients `lambda_i`.
    pub fn lambdas(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c * c).collect()
    }

    /// Number of coefficients above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.coeffs.iter().filter(|&&c| c > tol).count()
    }

    /// Rebuilds the state vector in the original party order.
    pub fn reconstruct(&self) -> Result<DVector<C64>> {
        let (da, db) = self.cut.side_dims();
        let mut grouped = DVector::zeros(da * db);
        for (k, &s) in self.coeffs.iter().enumerate() {
            grouped += kron_vec(&self.left.column(k).into_owned(), &self.right.column(k).into_owned())?
                * C64::from(s);
        }
        ungroup_vector(&grouped, &self.cut)
    }
}

/// Amplitudes of `s` reshaped into the `d_A × d_Ā` coefficient matrix.
pub fn coefficient_matrix(amplitudes: &DVector<C64>, cut: &Bipartition) -> Result<DMatrix<C64>> {
    let perm = cut.grouping_permutation();
    let (_, map) = permutation_index_map(cut.profile(), &perm)?;
    let (da, db) = cut.side_dims();
    Ok(DMatrix::from_fn(da, db, |a, b| amplitudes[map[a * db + b]]))
}

/// Inverse of the grouping: a vector indexed `[A parties, Ā parties]` back to
/// the original party order.
pub fn ungroup_vector(grouped: &DVector<C64>, cut: &Bipartition) -> Result<DVector<C64>> {
    let perm = cut.grouping_permutation();
    let (_, map) = permutation_index_map(cut.profile(), &perm)?;
    let mut out = DVector::zeros(grouped.len());
    for (g, &orig) in map.iter().enumerate() {
        out[orig] = grouped[g];
    }
    Ok(out)
}

pub fn schmidt(s: &PureState, cut: &Bipartition) -> Result<Schmidt> {
    if cut.profile() != s.profile() {
        return Err(arg_err!("cut profile {} does not match state profile {}", cut.profile(), s.profile()));
    }
    let m = coefficient_matrix(&s.amplitudes, cut)?;
    let svd = m.svd(true, true);
    let u = svd.u.ok_or_else(|| arg_err!("SVD failed"))?;
    let vt = svd.v_t.ok_or_else(|| arg_err!("SVD failed"))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let coeffs = order.iter().map(|&i| svd.singular_values[i]).collect();
    let left = DMatrix::from_fn(u.nrows(), order.len(), |r, k| u[(r, order[k])]);
    // M = U S V^dagger, so the right Schmidt vectors are the rows of V^dagger
    let right = DMatrix::from_fn(vt.ncols(), order.len(), |r, k| vt[(order[k], r)]);
    Ok(Schmidt { coeffs, left, right, cut: cut.clone() })
}

// ---------------------------------------------------------------------------
// Eigen-decomposition and orthonormalization

/// Largest entry of `|M - M^dagger|`.
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn symmetrize(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::from(0.5)
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors as
/// columns. Vectors inside a degenerate cluster come in an arbitrary
/// orthonormal basis of the cluster.
pub fn hermitian_eig(m: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>)> {
    if !m.is_square() {
        return Err(arg_err!("eigen-decomposition of a non-square {}x{} matrix", m.nrows(), m.ncols()));
    }
    let scale = max_abs(m).max(1.0);
    let defect = hermiticity_defect(m);
    if defect > POLICY.eig_hermiticity * scale {
        return Err(arg_err!("matrix is not Hermitian (defect {defect:e})"));
    }
    let eig = symmetrize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(m.nrows(), order.len(), |r, k| eig.eigenvectors[(r, order[k])]);
    Ok((values, vecs))
}

/// Smallest eigenpair of a Hermitian matrix.
pub fn min_eigenpair(m: &DMatrix<C64>) -> Result<(f64, DVector<C64>)> {
    let (vals, vecs) = hermitian_eig(m)?;
    Ok((vals[0], vecs.column(0).into_owned()))
}

/// Largest eigenpair of a Hermitian matrix.
pub fn max_eigenpair(m: &DMatrix<C64>) -> Result<(f64, DVector<C64>)> {
    let (vals, vecs) = hermitian_eig(m)?;
    let k = vals.len() - 1;
    Ok((vals[k], vecs.column(k).into_owned()))
}

/// Orthonormal basis of the span of `vectors` (modified Gram-Schmidt with one
/// re-orthogonalization pass). Vectors whose residual norm after projection
/// falls below `tol` are dropped.
pub fn orthonormalize(vectors: &[DVector<C64>], tol: f64) -> Result<DMatrix<C64>> {
    let len = vectors.first().ok_or_else(|| arg_err!("no vectors to orthonormalize"))?.len();
    if vectors.iter().any(|v| v.len() != len) {
        return Err(arg_err!("vectors of differing lengths"));
    }
    let mut basis: Vec<DVector<C64>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = q.dotc(&r);
                r -= q * c;
            }
        }
        let n = r.norm();
        if n >= tol {
            basis.push(r / C64::from(n));
        }
    }
    if basis.is_empty() {
        return Err(arg_err!("all vectors are numerically zero"));
    }
    Ok(DMatrix::from_columns(&basis))
}

/// Largest entry of `|B^dagger B - I|`.
pub fn orthonormality_defect(b: &DMatrix<C64>) -> f64 {
    let g = b.adjoint() * b;
    let n = g.nrows();
    max_abs(&(g - DMatrix::identity(n, n)))
}

/// Spectral norm of a Hermitian matrix.
pub fn hermitian_norm(m: &DMatrix<C64>) -> Result<f64> {
    let (vals, _) = hermitian_eig(m)?;
    Ok(vals.iter().fold(0.0_f64, |a, v| a.max(v.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derived_rng, gaussian_matrix, random_unit_vector, Stream};
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::from(re)
    }

    fn prof(d: &[usize]) -> DimProfile {
        DimProfile::new(d.to_vec()).unwrap()
    }

    fn bell() -> PureState {
        let s = 0.5f64.sqrt();
        PureState::new(DVector::from_vec(vec![c(s), c(0.0), c(0.0), c(s)]), prof(&[2, 2])).unwrap()
    }

    fn pauli_x() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
    }

    fn random_density(rng: &mut rand_chacha::ChaCha8Rng, dims: &[usize]) -> DensityOperator {
        let p = prof(dims);
        let g = gaussian_matrix(rng, p.total(), p.total());
        DensityOperator::from_unnormalized(&g * g.adjoint(), p).unwrap()
    }

    #[test]
    fn profile_rejects_trivial_party() {
        assert!(DimProfile::new(vec![2, 1]).is_err());
        assert!(DimProfile::allowing_trivial(vec![1]).is_ok());
        assert!(matches!(DimProfile::new(vec![64, 65]), Err(Error::Resource(_))));
    }

    #[test]
    fn kron_basis_vectors() {
        let e0 = DVector::from_vec(vec![c(1.0), c(0.0)]);
        let e1 = DVector::from_vec(vec![c(0.0), c(1.0)]);
        let k = kron_vec(&e0, &e1).unwrap();
        assert_eq!(k, DVector::from_vec(vec![c(0.0), c(1.0), c(0.0), c(0.0)]));
    }

    #[test]
    fn kron_identities() {
        let k = kron(&DMatrix::identity(2, 2), &DMatrix::identity(3, 3)).unwrap();
        assert_eq!(k, DMatrix::<C64>::identity(6, 6));
    }

    #[test]
    fn kron_of_pauli_x_spectrum() {
        let xx = kron(&pauli_x(), &pauli_x()).unwrap();
        let (vals, _) = hermitian_eig(&xx).unwrap();
        for (v, e) in vals.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert_abs_diff_eq!(*v, e, epsilon = 1e-12);
        }
    }

    #[test]
    fn kron_respects_cap() {
        let a = DMatrix::<C64>::identity(70, 70);
        assert!(matches!(kron(&a, &a), Err(Error::Resource(_))));
    }

    #[test]
    fn permute_identity_and_swaps() {
        let b = bell();
        assert_eq!(b.permute_parties(&[0, 1]).unwrap(), b);
        assert_abs_diff_eq!((b.permute_parties(&[1, 0]).unwrap().inner(&b) - c(1.0)).norm(), 0.0, epsilon = 1e-15);
        let p = prof(&[2, 2]);
        let s01 = PureState::basis(p.clone(), &[0, 1]).unwrap();
        let s10 = PureState::basis(p, &[1, 0]).unwrap();
        assert_eq!(s01.permute_parties(&[1, 0]).unwrap(), s10);
        assert!(s01.permute_parties(&[0, 0]).is_err());
        assert!(s01.permute_parties(&[0]).is_err());
    }

    #[test]
    fn permute_moves_party_dimensions() {
        let p = prof(&[2, 3, 4]);
        let s = PureState::basis(p, &[1, 2, 3]).unwrap();
        let t = s.permute_parties(&[2, 0, 1]).unwrap();
        assert_eq!(t.profile().dims(), &[4, 2, 3]);
        assert_eq!(t, PureState::basis(prof(&[4, 2, 3]), &[3, 1, 2]).unwrap());
    }

    #[test]
    fn partial_trace_examples() {
        let p = prof(&[2, 2]);
        let s00 = PureState::basis(p, &[0, 0]).unwrap().projector();
        let r = partial_trace(&s00, &[1]).unwrap();
        assert_eq!(r.matrix()[(0, 0)], c(1.0));
        assert_eq!(r.matrix()[(1, 1)], c(0.0));

        let half = DMatrix::<C64>::identity(2, 2) * c(0.5);
        for t in [0, 1] {
            let r = partial_trace(&bell().projector(), &[t]).unwrap();
            assert_abs_diff_eq!(max_abs(&(r.matrix() - &half)), 0.0, epsilon = 1e-15);
        }
        assert!(partial_trace(&bell().projector(), &[0, 1]).is_err());
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let mut rng = derived_rng(7, Stream::Samples, 0);
        for _ in 0..10 {
            let rho = random_density(&mut rng, &[2]);
            let sigma = random_density(&mut rng, &[2]);
            let joint = rho.kron(&sigma).unwrap();
            let r = partial_trace(&joint, &[1]).unwrap();
            assert!(max_abs(&(r.matrix() - rho.matrix())) < 1e-14);
            let s = partial_trace(&joint, &[0]).unwrap();
            assert!(max_abs(&(s.matrix() - sigma.matrix())) < 1e-14);
        }
    }

    #[test]
    fn partial_transpose_examples() {
        let cut = Bipartition::new(&[0], &prof(&[2, 2])).unwrap();
        let pt = partial_transpose(&bell().projector(), &cut).unwrap();
        let (vals, _) = hermitian_eig(&pt).unwrap();
        for (v, e) in vals.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert_abs_diff_eq!(*v, e, epsilon = 1e-12);
        }

        let mut rng = derived_rng(3, Stream::Samples, 0);
        let rho = random_density(&mut rng, &[2]);
        let sigma = random_density(&mut rng, &[3]);
        let joint = rho.kron(&sigma).unwrap();
        let cut = Bipartition::new(&[0], joint.profile()).unwrap();
        let pt = partial_transpose(&joint, &cut).unwrap();
        let expected = kron(&rho.matrix().transpose(), sigma.matrix()).unwrap();
        assert!(max_abs(&(&pt - &expected)) < 1e-15);
        assert!(hermitian_eig(&pt).unwrap().0[0] > -1e-12);
    }

    #[test]
    fn schmidt_examples() {
        let p = prof(&[2, 2]);
        let cut = Bipartition::new(&[0], &p).unwrap();
        let prod = PureState::basis(p, &[1, 0]).unwrap();
        let s = schmidt(&prod, &cut).unwrap();
        assert_abs_diff_eq!(s.coeffs[0], 1.0, epsilon = 1e-14);
        assert_eq!(s.rank(1e-10), 1);

        let s = schmidt(&bell(), &cut).unwrap();
        assert_abs_diff_eq!(s.coeffs[0], 0.5f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(s.coeffs[1], 0.5f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn schmidt_matches_reduced_spectrum() {
        let p = prof(&[3, 3]);
        let cut = Bipartition::new(&[0], &p).unwrap();
        let mut rng = derived_rng(11, Stream::Samples, 0);
        for _ in 0..10 {
            let psi = PureState::new(random_unit_vector(&mut rng, 9), p.clone()).unwrap();
            let s = schmidt(&psi, &cut).unwrap();
            let red = partial_trace(&psi.projector(), &[1]).unwrap();
            let (mut vals, _) = hermitian_eig(red.matrix()).unwrap();
            vals.reverse();
            for (l, v) in s.lambdas().iter().zip(&vals) {
                assert_abs_diff_eq!(*l, *v, epsilon = 1e-12);
            }
            let rec = s.reconstruct().unwrap();
            assert!((rec - psi.amplitudes()).norm() < 1e-10);
        }
    }

    #[test]
    fn schmidt_on_non_contiguous_cut_reconstructs() {
        let p = prof(&[2, 3, 2]);
        let cut = Bipartition::new(&[0, 2], &p).unwrap();
        let mut rng = derived_rng(12, Stream::Samples, 0);
        let psi = PureState::new(random_unit_vector(&mut rng, 12), p).unwrap();
        let s = schmidt(&psi, &cut).unwrap();
        assert_eq!(s.left.nrows(), 4);
        assert_eq!(s.right.nrows(), 3);
        assert!((s.reconstruct().unwrap() - psi.amplitudes()).norm() < 1e-10);
    }

    #[test]
    fn eig_examples() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![c(3.0), c(1.0), c(2.0)]));
        let (vals, _) = hermitian_eig(&d).unwrap();
        assert_eq!(vals.len(), 3);
        for (v, e) in vals.iter().zip([1.0, 2.0, 3.0]) {
            assert_abs_diff_eq!(*v, e, epsilon = 1e-14);
        }
        let (vals, _) = hermitian_eig(&pauli_x()).unwrap();
        assert_abs_diff_eq!(vals[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], 1.0, epsilon = 1e-14);

        let mut swap = DMatrix::<C64>::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                swap[(i * 2 + j, j * 2 + i)] = c(1.0);
            }
        }
        let (vals, _) = hermitian_eig(&swap).unwrap();
        for (v, e) in vals.iter().zip([-1.0, 1.0, 1.0, 1.0]) {
            assert_abs_diff_eq!(*v, e, epsilon = 1e-12);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert!(hermitian_eig(&m).is_err());
    }

    #[test]
    fn eig_residuals_on_random_hermitian() {
        let mut rng = derived_rng(5, Stream::Samples, 0);
        for n in [2, 5, 9, 27] {
            let g = gaussian_matrix(&mut rng, n, n);
            let h = symmetrize(&g);
            let (vals, vecs) = hermitian_eig(&h).unwrap();
            let norm = hermitian_norm(&h).unwrap();
            for k in 0..n {
                let v = vecs.column(k);
                let res = (&h * v - v * C64::from(vals[k])).norm();
                assert!(res <= 1e-9 * norm, "residual {res}");
            }
            assert!(orthonormality_defect(&vecs) < 1e-12);
        }
    }

    #[test]
    fn orthonormalize_examples() {
        let v1 = DVector::from_vec(vec![c(1.0), c(0.0)]);
        let v2 = DVector::from_vec(vec![c(0.0), c(2.0)]);
        let b = orthonormalize(&[v1.clone(), v2], 1e-10).unwrap();
        assert_eq!(b, DMatrix::<C64>::identity(2, 2));
        let b = orthonormalize(&[v1.clone(), v1.clone()], 1e-10).unwrap();
        assert_eq!(b.ncols(), 1);
        let z = DVector::<C64>::zeros(2);
        assert!(orthonormalize(&[z], 1e-10).is_err());
        assert!(orthonormalize(&[], 1e-10).is_err());
    }

    #[test]
    fn density_validation() {
        let p = prof(&[2]);
        let bad = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(1.0)]);
        assert!(DensityOperator::new(bad, p.clone()).is_err());
        let neg = DMatrix::from_row_slice(2, 2, &[c(1.5), c(0.0), c(0.0), c(-0.5)]);
        assert!(DensityOperator::new(neg, p.clone()).is_err());
        let nh = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.1), c(0.0), c(0.5)]);
        assert!(DensityOperator::new(nh, p).is_err());
    }

    #[test]
    fn cuts_enumeration() {
        let cuts = Bipartition::all_cuts(&prof(&[2, 2, 2]));
        let members: Vec<Vec<usize>> = cuts.iter().map(|c| c.members().to_vec()).collect();
        assert_eq!(members, vec![vec![0], vec![0, 1], vec![0, 2]]);
        assert_eq!(Bipartition::all_cuts(&prof(&[2, 2, 2, 2])).len(), 7);
        assert!(Bipartition::new(&[0, 1], &prof(&[2, 2])).is_err());
        assert!(Bipartition::new(&[], &prof(&[2, 2])).is_err());
    }
}
