//! Numeric tolerances shared by every module.

/// Tolerances and size limits. Operations read from [`NumericPolicy::DEFAULT`]
/// unless an explicit tolerance argument is part of their signature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericPolicy {
    /// Entrywise bound on `|M - M^dagger|` for density operators.
    pub hermiticity: f64,
    /// Looser Hermiticity bound accepted by the eigensolver (input is symmetrized).
    pub eig_hermiticity: f64,
    /// Residual bound relative to `||M||` for eigenpairs.
    pub eig_residual: f64,
    /// Residual below which a vector is treated as linearly dependent.
    pub rank_cut: f64,
    /// Allowed deviation of a state norm (or a density trace) from one.
    pub norm: f64,
    /// Smallest eigenvalue tolerated in a density operator.
    pub psd_floor: f64,
    /// Bound on `||B^dagger B - I||` for subspace bases.
    pub orthonormality: f64,
    /// Cross-Gram norm under which two subspaces (or vectors) count as orthogonal.
    pub orthogonality: f64,
    /// Bound on `||P^2 - P||` for projector inputs.
    pub idempotence: f64,
    /// Projector distance under which two subspaces are considered equal.
    pub subspace_equality: f64,
    /// Geometric-measure value above which a subspace is certified entangled.
    pub ces_threshold: f64,
    /// Geometric-measure value above which a pure state is called entangled.
    pub entangled_state: f64,
    /// Margin for strict positivity of criterion values (Σ G − (k−1) and similar).
    pub strict_margin: f64,
    /// A partial-transpose eigenvalue below `-npt_margin` certifies NPT.
    pub npt_margin: f64,
    /// A rank-2 witness value below `-witness_margin` certifies distillability.
    pub witness_margin: f64,
    /// Largest ambient dimension any construction may produce.
    pub ambient_cap: usize,
}

impl NumericPolicy {
    pub const DEFAULT: NumericPolicy = NumericPolicy {
        hermiticity: 1e-12,
        eig_hermiticity: 1e-10,
        eig_residual: 1e-9,
        rank_cut: 1e-10,
        norm: 1e-12,
        psd_floor: -1e-10,
        orthonormality: 1e-10,
        orthogonality: 1e-8,
        idempotence: 1e-8,
        subspace_equality: 1e-9,
        ces_threshold: 1e-6,
        entangled_state: 1e-9,
        strict_margin: 1e-10,
        npt_margin: 1e-9,
        witness_margin: 1e-10,
        ambient_cap: 4096,
    };
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self::DEFAULT
    }
}
