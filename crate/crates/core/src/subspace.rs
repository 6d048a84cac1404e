//! Subspaces of multipartite spaces and their algebra: tensor products,
//! adjacent-party joins, orthogonal direct sums and projectors.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::linalg::{
    hermitian_norm, kron_capped, max_abs, orthonormality_defect, orthonormalize, permute_rows,
    DimProfile, PureState, C64,
};
use crate::policy::NumericPolicy;

const POLICY: NumericPolicy = NumericPolicy::DEFAULT;

/// Subspace given by an orthonormal basis (ambient-dim × k) and the party
/// structure of the ambient space. The basis matrix doubles as the isometry
/// from `C^k` onto the subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    basis: DMatrix<C64>,
    profile: DimProfile,
}

/// Merge parties `left_party` and `left_party + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JoinSpec {
    pub left_party: usize,
}

impl Subspace {
    /// Wraps a basis that is already orthonormal.
    pub fn new(basis: DMatrix<C64>, profile: DimProfile) -> Result<Self> {
        if basis.nrows() != profile.total() {
            return Err(arg_err!("basis has {} rows, profile {profile} needs {}", basis.nrows(), profile.total()));
        }
        if basis.ncols() == 0 || basis.ncols() > basis.nrows() {
            return Err(arg_err!("subspace dimension {} outside 1..={}", basis.ncols(), basis.nrows()));
        }
        let defect = orthonormality_defect(&basis);
        if defect > POLICY.orthonormality {
            return Err(arg_err!("basis is not orthonormal (defect {defect:e})"));
        }
        Ok(Self { basis, profile })
    }

    /// The whole space.
    pub fn full(profile: DimProfile) -> Self {
        let n = profile.total();
        Self { basis: DMatrix::identity(n, n), profile }
    }

    /// Span of computational basis states given by flat indices.
    pub fn from_basis_indices(profile: DimProfile, indices: &[usize]) -> Result<Self> {
        let n = profile.total();
        let vecs: Vec<DVector<C64>> = indices
            .iter()
            .map(|&i| {
                if i >= n {
                    return Err(arg_err!("basis index {i} out of range for {profile}"));
                }
                let mut v = DVector::zeros(n);
                v[i] = C64::from(1.0);
                Ok(v)
            })
            .collect::<Result<_>>()?;
        Self::from_vectors(&vecs, profile)
    }

    /// Orthonormal envelope of arbitrary (not necessarily normalized) vectors.
    pub fn from_vectors(vectors: &[DVector<C64>], profile: DimProfile) -> Result<Self> {
        if vectors.iter().any(|v| v.len() != profile.total()) {
            return Err(arg_err!("vector length does not match profile {profile}"));
        }
        let basis = orthonormalize(vectors, POLICY.rank_cut)?;
        Ok(Self { basis, profile })
    }

    pub fn basis(&self) -> &DMatrix<C64> {
        &self.basis
    }

    pub fn profile(&self) -> &DimProfile {
        &self.profile
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Basis column `k` as a state.
    pub fn column_state(&self, k: usize) -> PureState {
        PureState::new(self.basis.column(k).into_owned(), self.profile.clone())
            .expect("orthonormal basis columns are unit vectors")
    }

    /// Same subspace with parties reordered (party `k` of the result is party
    /// `perm[k]` of `self`).
    pub fn permute_parties(&self, perm: &[usize]) -> Result<Subspace> {
        let (profile, basis) = permute_rows(&self.basis, &self.profile, perm)?;
        Ok(Subspace { basis, profile })
    }

    /// Projector distance `||P_1 - P_2||` (spectral norm).
    pub fn distance(&self, other: &Subspace) -> Result<f64> {
        if self.profile.total() != other.profile.total() {
            return Err(arg_err!("subspaces live in spaces of different dimension"));
        }
        hermitian_norm(&(projector(self) - projector(other)))
    }

    /// Basis-independent equality within the default projector tolerance.
    pub fn same_as(&self, other: &Subspace) -> Result<bool> {
        Ok(self.profile == other.profile && self.distance(other)? <= POLICY.subspace_equality)
    }

    /// Orthogonal complement within the ambient space.
    pub fn complement(&self) -> Result<Subspace> {
        let n = self.ambient_dim();
        if self.dim() == n {
            return Err(arg_err!("the full space has no nonzero complement"));
        }
        let p = projector(self);
        let resid = DMatrix::<C64>::identity(n, n) - p;
        let cols: Vec<DVector<C64>> = resid.column_iter().map(|c| c.into_owned()).collect();
        let basis = orthonormalize(&cols, 1e-8)?;
        Ok(Subspace { basis, profile: self.profile.clone() })
    }
}

/// Orthonormal basis of the span of `vectors`; dimension is the numerical rank.
pub fn from_span(vectors: &[PureState]) -> Result<Subspace> {
    let first = vectors.first().ok_or_else(|| arg_err!("empty spanning set"))?;
    if vectors.iter().any(|v| v.profile() != first.profile()) {
        return Err(arg_err!("spanning vectors have different profiles"));
    }
    let raw: Vec<DVector<C64>> = vectors.iter().map(|v| v.amplitudes().clone()).collect();
    Subspace::from_vectors(&raw, first.profile().clone())
}

/// `s ⊗ g`: basis columns are the Kronecker products of the input columns
/// (column `i * dim(g) + j` is `s_i ⊗ g_j`).
pub fn tensor(s: &Subspace, g: &Subspace) -> Result<Subspace> {
    tensor_capped(s, g, POLICY.ambient_cap)
}

pub fn tensor_capped(s: &Subspace, g: &Subspace, cap: usize) -> Result<Subspace> {
    let basis = kron_capped(&s.basis, &g.basis, cap)?;
    let profile = s.profile.concat(&g.profile)?;
    Ok(Subspace { basis, profile })
}

/// Merges parties `i` and `i+1` into one party of dimension `d_i d_{i+1}`.
/// With lexicographic flattening this is a relabeling: amplitudes are unchanged.
pub fn join(s: &Subspace, spec: JoinSpec) -> Result<Subspace> {
    let profile = join_profile(&s.profile, spec)?;
    Ok(Subspace { basis: s.basis.clone(), profile })
}

pub fn join_profile(profile: &DimProfile, spec: JoinSpec) -> Result<DimProfile> {
    let i = spec.left_party;
    let dims = profile.dims();
    if dims.len() < 2 || i > dims.len() - 2 {
        return Err(arg_err!("cannot join parties {i},{} of a {}-party profile", i + 1, dims.len()));
    }
    let mut out = dims[..i].to_vec();
    out.push(dims[i] * dims[i + 1]);
    out.extend_from_slice(&dims[i + 2..]);
    DimProfile::allowing_trivial(out)
}

/// Largest entry of the cross-Gram matrix `B_1^dagger B_2`.
pub fn cross_overlap(a: &Subspace, b: &Subspace) -> f64 {
    max_abs(&(a.basis.adjoint() * &b.basis))
}

/// Direct sum of mutually orthogonal subspaces (bases are concatenated).
pub fn direct_sum(parts: &[Subspace]) -> Result<Subspace> {
    let first = parts.first().ok_or_else(|| arg_err!("empty direct sum"))?;
    for (i, p) in parts.iter().enumerate() {
        if p.profile != first.profile {
            return Err(arg_err!("part {i} has profile {}, expected {}", p.profile, first.profile));
        }
    }
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            let ov = cross_overlap(&parts[i], &parts[j]);
            if ov > POLICY.orthogonality {
                return Err(Error::Precondition(format!(
                    "direct-sum parts {i} and {j} are not orthogonal (cross-Gram norm {ov:e})"
                )));
            }
        }
    }
    let cols: Vec<_> = parts.iter().flat_map(|p| p.basis.column_iter()).collect();
    let basis = DMatrix::from_columns(&cols);
    Subspace::new(basis, first.profile.clone())
}

/// Orthogonal projector `B B^dagger`.
pub fn projector(s: &Subspace) -> DMatrix<C64> {
    &s.basis * s.basis.adjoint()
}

/// Whether `||(I - P) v|| <= tol`.
pub fn contains(s: &Subspace, v: &PureState, tol: f64) -> Result<bool> {
    if v.profile() != &s.profile {
        return Err(arg_err!("state profile {} does not match subspace profile {}", v.profile(), s.profile));
    }
    let coeffs = s.basis.adjoint() * v.amplitudes();
    let resid = v.amplitudes() - &s.basis * coeffs;
    Ok(resid.norm() <= tol)
}

// ---------------------------------------------------------------------------
// JSON

/// Serialized form `{ "dims": [..], "basis": [ [[re, im], ..] per column ] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub dims: Vec<usize>,
    pub basis: Vec<Vec<[f64; 2]>>,
}

impl From<&Subspace> for SubspaceJson {
    fn from(s: &Subspace) -> Self {
        SubspaceJson {
            dims: s.profile.dims().to_vec(),
            basis: s
                .basis
                .column_iter()
                .map(|c| c.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<SubspaceJson> for Subspace {
    type Error = Error;

    fn try_from(j: SubspaceJson) -> Result<Self> {
        let profile = DimProfile::new(j.dims).map_err(|e| Error::Data(e.to_string()))?;
        let n = profile.total();
        if j.basis.is_empty() {
            return Err(Error::Data("subspace basis is empty".into()));
        }
        let mut cols = Vec::with_capacity(j.basis.len());
        for (k, col) in j.basis.iter().enumerate() {
            if col.len() != n {
                return Err(Error::Data(format!("basis column {k} has length {}, expected {n}", col.len())));
            }
            if col.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::Data(format!("basis column {k} has non-finite entries")));
            }
            cols.push(DVector::from_iterator(n, col.iter().map(|&[re, im]| C64::new(re, im))));
        }
        Subspace::new(DMatrix::from_columns(&cols), profile).map_err(|e| Error::Data(e.to_string()))
    }
}

impl Subspace {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&SubspaceJson::from(self)).expect("subspace serialization")
    }

    pub fn from_json(text: &str) -> Result<Subspace> {
        let j: SubspaceJson = serde_json::from_str(text).map_err(|e| Error::Data(e.to_string()))?;
        Subspace::try_from(j)
    }
}
