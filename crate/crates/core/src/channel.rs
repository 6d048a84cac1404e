//! Channels whose Stinespring isometry has a given range.
//!
//! A subspace `W` of `C^dB ⊗ C^dC` with orthonormal basis `V` defines the
//! isometry `V: C^dA -> C^dB ⊗ C^dC` (`dA = dim W`) and the pair of
//! complementary channels `rho -> Tr_C(V rho V^dagger)` and
//! `rho -> Tr_B(V rho V^dagger)`. The maximal output eigenvalue over pure
//! inputs is the largest Schmidt weight of a vector in `W`, so it is computed
//! through the product-overlap seesaw of [`crate::measures`].

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};
use crate::linalg::{
    kron, max_eigenpair, orthonormality_defect, partial_trace, permute_rows, Bipartition, DensityOperator,
    DimProfile, C64,
};
use crate::measures::{subspace_measure_across_cut, OptimizerPolicy};
use crate::policy::NumericPolicy;
use crate::subspace::Subspace;

const POLICY: NumericPolicy = NumericPolicy::DEFAULT;

/// Output factor retained by the channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Keep {
    B,
    C,
}

#[derive(Clone, Debug)]
pub struct IsometryChannel {
    isometry: DMatrix<C64>,
    out_dims: (usize, usize),
    keep: Keep,
}

impl IsometryChannel {
    pub fn new(isometry: DMatrix<C64>, out_dims: (usize, usize), keep: Keep) -> Result<Self> {
        if isometry.nrows() != out_dims.0 * out_dims.1 {
            return Err(arg_err!(
                "isometry has {} rows, expected {}x{}",
                isometry.nrows(),
                out_dims.0,
                out_dims.1
            ));
        }
        if isometry.ncols() == 0 || isometry.ncols() > isometry.nrows() {
            return Err(arg_err!("isometry input dimension {} is invalid", isometry.ncols()));
        }
        let defect = orthonormality_defect(&isometry);
        if defect > POLICY.orthonormality {
            return Err(arg_err!("V^dagger V differs from I by {defect:e}"));
        }
        Ok(Self { isometry, out_dims, keep })
    }

    pub fn isometry(&self) -> &DMatrix<C64> {
        &self.isometry
    }

    pub fn out_dims(&self) -> (usize, usize) {
        self.out_dims
    }

    pub fn keep(&self) -> Keep {
        self.keep
    }

    pub fn input_dim(&self) -> usize {
        self.isometry.ncols()
    }

    /// Dimension of the retained output factor.
    pub fn output_dim(&self) -> usize {
        match self.keep {
            Keep::B => self.out_dims.0,
            Keep::C => self.out_dims.1,
        }
    }

    /// The complementary channel (same isometry, other factor kept).
    pub fn complementary(&self) -> Self {
        let keep = match self.keep {
            Keep::B => Keep::C,
            Keep::C => Keep::B,
        };
        Self { keep, ..self.clone() }
    }

    /// Range of the isometry as a subspace of `C^dB ⊗ C^dC`.
    pub fn range(&self) -> Result<Subspace> {
        let profile = DimProfile::allowing_trivial(vec![self.out_dims.0, self.out_dims.1])?;
        Subspace::new(self.isometry.clone(), profile)
    }

    fn range_profile(&self) -> Result<DimProfile> {
        DimProfile::allowing_trivial(vec![self.out_dims.0, self.out_dims.1])
    }
}

pub fn channel_from_subspace(w: &Subspace, keep: Keep) -> Result<IsometryChannel> {
    let dims = w.profile().dims();
    if dims.len() != 2 {
        return Err(arg_err!("channel needs a bipartite subspace, got profile {}", w.profile()));
    }
    IsometryChannel::new(w.basis().clone(), (dims[0], dims[1]), keep)
}

/// `Tr_traced(V rho V^dagger)`.
pub fn apply(ch: &IsometryChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    if rho.profile().total() != ch.input_dim() {
        return Err(arg_err!(
            "input has dimension {}, channel expects {}",
            rho.profile().total(),
            ch.input_dim()
        ));
    }
    let v = &ch.isometry;
    let out = v * rho.matrix() * v.adjoint();
    let joint = DensityOperator::from_unnormalized(out, ch.range_profile()?)?;
    let traced = match ch.keep {
        Keep::B => 1,
        Keep::C => 0,
    };
    partial_trace(&joint, &[traced])
}

/// Tensor product channel `Phi_1 ⊗ Phi_2`, with output factors regrouped as
/// `(B_1 B_2) ⊗ (C_1 C_2)`. Both channels must keep the same side.
pub fn tensor_channels(a: &IsometryChannel, b: &IsometryChannel) -> Result<IsometryChannel> {
    if a.keep != b.keep {
        return Err(arg_err!("tensor product of channels keeping different factors"));
    }
    let v = kron(&a.isometry, &b.isometry)?;
    let profile = DimProfile::allowing_trivial(vec![a.out_dims.0, a.out_dims.1, b.out_dims.0, b.out_dims.1])?;
    let (_, v) = permute_rows(&v, &profile, &[0, 2, 1, 3])?;
    IsometryChannel::new(v, (a.out_dims.0 * b.out_dims.0, a.out_dims.1 * b.out_dims.1), a.keep)
}

/// Maximal output eigenvalue with the input attaining it.
#[derive(Clone, Debug)]
pub struct OutputNormReport {
    pub value: f64,
    pub input: DVector<C64>,
    /// Enough optimizer restarts agreed on the value; otherwise `value` is
    /// only a lower bound.
    pub certified: bool,
    pub restarts_agreeing: usize,
}

/// `nu_inf(Phi) = max over pure inputs of the largest output eigenvalue`.
pub fn nu_infinity(ch: &IsometryChannel, opt: &OptimizerPolicy) -> Result<OutputNormReport> {
    let range = ch.range()?;
    let cut = Bipartition::new(&[0], range.profile())?;
    let r = subspace_measure_across_cut(&range, &cut, opt)?;
    let x = ch.isometry.adjoint() * r.witness_vector.amplitudes();
    let x = &x / C64::from(x.norm());
    let value = top_output_eigenvalue(ch, &x)?;
    Ok(OutputNormReport { value, input: x, certified: r.stable, restarts_agreeing: r.restarts_agreeing })
}

fn top_output_eigenvalue(ch: &IsometryChannel, x: &DVector<C64>) -> Result<f64> {
    let profile = DimProfile::allowing_trivial(vec![x.len()])?;
    let rho = DensityOperator::from_unnormalized(x * x.adjoint(), profile)?;
    let out = apply(ch, &rho)?;
    Ok(max_eigenpair(out.matrix())?.0)
}

/// `nu_inf(I_R ⊗ Phi)` for an ancilla of dimension `ancilla_dim`, optimized
/// over pure inputs on `R ⊗ A`. Equals `nu_inf(Phi)`.
pub fn nu_infinity_extended(ch: &IsometryChannel, ancilla_dim: usize, opt: &OptimizerPolicy) -> Result<OutputNormReport> {
    if ancilla_dim == 0 {
        return Err(arg_err!("ancilla dimension must be at least 1"));
    }
    if ancilla_dim == 1 {
        return nu_infinity(ch, opt);
    }
    let (db, dc) = ch.out_dims;
    let ext = kron(&DMatrix::identity(ancilla_dim, ancilla_dim), &ch.isometry)?;
    let profile = DimProfile::allowing_trivial(vec![ancilla_dim, db, dc])?;
    let range = Subspace::new(ext.clone(), profile.clone())?;
    let kept = match ch.keep {
        Keep::B => [0, 1],
        Keep::C => [0, 2],
    };
    let cut = Bipartition::new(&kept, &profile)?;
    let r = subspace_measure_across_cut(&range, &cut, opt)?;
    let x = ext.adjoint() * r.witness_vector.amplitudes();
    let x = &x / C64::from(x.norm());
    Ok(OutputNormReport {
        value: 1.0 - r.value,
        input: x,
        certified: r.stable,
        restarts_agreeing: r.restarts_agreeing,
    })
}
