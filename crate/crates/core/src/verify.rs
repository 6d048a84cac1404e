//! Self-verification table: each row recomputes one published or derived
//! value and compares it with the expected one.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{channel_from_subspace, nu_infinity, nu_infinity_extended, Keep};
use crate::constructions::{
    antisymmetric_projector, antisymmetric_subspace, chain_ges, example_w_basis, johnston_subspace,
    projector_distance, s_to_p, symmetric_projector, werner_ge_threshold, werner_state, ConstructSpec,
    WernerParams,
};
use crate::distill::{appendix_witness, min_pt_eigenvalue, npt_subspace_check, rank2_witness_search, sample_random_rank, DEFAULT_TAU_SAMPLES};
use crate::error::Result;
use crate::linalg::{
    hermiticity_defect, kron, max_abs, partial_transpose_matrix, schmidt, Bipartition, DensityOperator, DimProfile,
    PureState, C64,
};
use crate::measures::{
    cren_lower_bound, geometric_measure_state, ges_measure_chain, joined_product, subspace_geometric_measure,
    subspace_gme_measure, witness_value, OptimizerPolicy,
};
use crate::rng::{derived_rng, gaussian_matrix, random_unit_vector, random_unitary, Stream};
use crate::subspace::{from_span, projector, JoinSpec, Subspace};

const SQRT2: f64 = std::f64::consts::SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Fast,
    Full,
}

/// Sizes used by a verification run.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyConfig {
    pub mode: Mode,
    pub seed: u64,
    pub restarts: usize,
    pub samples: usize,
    /// Restarts of the rank-2 witness search.
    pub witness_restarts: usize,
}

impl VerifyConfig {
    pub fn new(mode: Mode, seed: u64) -> Self {
        match mode {
            Mode::Fast => Self { mode, seed, restarts: 16, samples: 20, witness_restarts: 4 },
            Mode::Full => Self { mode, seed, restarts: 64, samples: 100, witness_restarts: 8 },
        }
    }

    fn optimizer(&self) -> OptimizerPolicy {
        OptimizerPolicy { restarts: self.restarts, seed: self.seed, ..OptimizerPolicy::default() }
    }

    fn witness_optimizer(&self) -> OptimizerPolicy {
        OptimizerPolicy {
            restarts: self.witness_restarts,
            agreement_count: 1,
            seed: self.seed,
            ..OptimizerPolicy::default()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub id: u32,
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub tolerance: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub rows: Vec<Row>,
    pub all_passed: bool,
}

fn num(x: f64) -> String {
    format!("{x:.6e}")
}

fn row(id: u32, name: &str, expected: impl Into<String>, computed: impl Into<String>, tol: impl Into<String>, pass: bool) -> Row {
    Row {
        id,
        name: name.to_string(),
        expected: expected.into(),
        computed: computed.into(),
        tolerance: tol.into(),
        pass,
    }
}

fn error_row(id: u32, name: &str, e: crate::Error) -> Row {
    row(id, name, "-", format!("error: {e}"), "-", false)
}

fn guarded(id: u32, name: &str, f: impl FnOnce() -> Result<Row>) -> Row {
    f().unwrap_or_else(|e| error_row(id, name, e))
}

/// Runs every criterion and collects the table.
pub fn run(config: &VerifyConfig) -> VerifyReport {
    let rows = vec![
        guarded(1, "antisymmetric subspace measure", || criterion_antisym(config)),
        guarded(2, "Werner threshold", criterion_threshold),
        guarded(3, "Werner witness value", criterion_witness),
        guarded(4, "CREN lower bound", criterion_cren),
        guarded(5, "chain measure per cut", || criterion_chain(config)),
        guarded(6, "ancilla-extended output norm", || criterion_extended(config)),
        guarded(7, "16-dim example equals Johnston chain", criterion_example_w),
        guarded(8, "NPT and distillability of the 16-dim example", || criterion_distill(config)),
        guarded(9, "joined entangled pairs are GME", || criterion_joined_pairs(config)),
        guarded(10, "linear-algebra invariants", || criterion_invariants(config)),
        guarded(11, "deterministic output", || criterion_determinism(config)),
    ];
    let all_passed = rows.iter().all(|r| r.pass);
    VerifyReport { config: config.clone(), rows, all_passed }
}

pub fn criterion_antisym(config: &VerifyConfig) -> Result<Row> {
    let opt = config.optimizer();
    let mut worst: f64 = 0.0;
    let mut values = Vec::new();
    for d in [2, 3, 4] {
        let v = subspace_geometric_measure(&antisymmetric_subspace(d)?, &opt)?.value;
        worst = worst.max((v - 0.5).abs());
        values.push(format!("{v:.9}"));
    }
    Ok(row(1, "antisymmetric subspace measure", "0.5 (d=2,3,4)", values.join(" "), "1e-6", worst <= 1e-6))
}

pub fn criterion_threshold() -> Result<Row> {
    let exact = 3.0 * SQRT2 - 5.0;
    let t2 = werner_ge_threshold(2)?;
    let mut err = (t2 - exact).abs().max((t2 - s_to_p(1.0 / SQRT2, 2)?).abs());
    for d in 2..=10 {
        err = err.max((werner_ge_threshold(d)? - s_to_p(1.0 / SQRT2, d)?).abs());
    }
    let limit = 1.0 - SQRT2;
    let mut monotone = true;
    let mut prev = f64::NEG_INFINITY;
    for d in 2..=64 {
        let t = werner_ge_threshold(d)?;
        monotone &= t > prev && t < limit;
        prev = t;
    }
    Ok(row(
        2,
        "Werner threshold",
        format!("{exact:.9}, increasing to {limit:.9}"),
        format!("{t2:.9}, err {}, monotone {monotone}", num(err)),
        "1e-12",
        err <= 1e-12 && monotone,
    ))
}

/// Werner states on `A B_1` and `B_2 C`, joined into `A (B_1 B_2) C`.
pub fn joined_werner(d: usize, s1: f64, s2: f64) -> Result<DensityOperator> {
    let a = werner_state(&WernerParams::from_s(d, s1)?)?;
    let b = werner_state(&WernerParams::from_s(d, s2)?)?;
    let prod = a.kron(&b)?;
    let profile = crate::subspace::join_profile(prod.profile(), JoinSpec { left_party: 1 })?;
    prod.relabel(profile)
}

pub fn criterion_witness() -> Result<Row> {
    let opt = OptimizerPolicy { restarts: 8, ..OptimizerPolicy::default() };
    let a2 = antisymmetric_subspace(2)?;
    let w = chain_ges(&[a2.clone(), a2.clone()])?;
    let parts = [subspace_geometric_measure(&a2, &opt)?, subspace_geometric_measure(&a2, &opt)?];
    let g = ges_measure_chain(&parts)?;
    let rho = joined_werner(2, 0.8, 0.8)?;
    let v = witness_value(&rho, &w, g)?;
    let err = (v - 0.14).abs();
    Ok(row(3, "Werner witness value", "0.14", format!("{v:.12}"), "1e-10", err <= 1e-10))
}

pub fn criterion_cren() -> Result<Row> {
    let mut err: f64 = 0.0;
    for i in 0..5 {
        for j in 0..5 {
            let (s1, s2) = (0.6 + 0.1 * i as f64, 0.6 + 0.1 * j as f64);
            let b = cren_lower_bound(s1, s2, 0.5)?;
            err = err.max((b - (s1 * s2 - 0.5)).abs());
        }
    }
    Ok(row(4, "CREN lower bound", "s1 s2 - 1/2 on 5x5 grid", num(err), "1e-12", err <= 1e-12))
}

pub fn criterion_chain(config: &VerifyConfig) -> Result<Row> {
    let a3 = antisymmetric_subspace(3)?;
    let w = chain_ges(&[a3.clone(), a3])?;
    let g = subspace_gme_measure(&w, &config.optimizer())?;
    let tol = 2e-4;
    let mut pass = true;
    let mut parts = Vec::new();
    for (cut, r) in &g.per_cut {
        let ok = match cut.members() {
            [0, 2] => r.value >= 0.5 - tol,
            _ => (r.value - 0.5).abs() <= tol,
        };
        pass &= ok;
        parts.push(format!("{cut}={:.6}", r.value));
    }
    pass &= (g.value() - 0.5).abs() <= tol;
    Ok(row(5, "chain measure per cut", "0.5, 0.5, >=0.5; min 0.5", format!("{} min {:.6}", parts.join(" "), g.value()), "2e-4", pass))
}

pub fn criterion_extended(config: &VerifyConfig) -> Result<Row> {
    let opt = config.optimizer();
    let mut err: f64 = 0.0;
    let mut vals = Vec::new();
    for s in [antisymmetric_subspace(2)?, antisymmetric_subspace(3)?] {
        let ch = channel_from_subspace(&s, Keep::B)?;
        let base = nu_infinity(&ch, &opt)?.value;
        let ext = nu_infinity_extended(&ch, 2, &opt)?.value;
        err = err.max((base - ext).abs());
        vals.push(format!("{base:.6}/{ext:.6}"));
    }
    Ok(row(6, "ancilla-extended output norm", "equal to plain output norm", vals.join(" "), "1e-4", err <= 1e-4))
}

pub fn criterion_example_w() -> Result<Row> {
    let j = johnston_subspace(3, 3)?;
    let d = projector_distance(&example_w_basis()?, &chain_ges(&[j.clone(), j])?)?;
    Ok(row(7, "16-dim example equals Johnston chain", "0", num(d), "1e-10", d <= 1e-10))
}

pub fn criterion_distill(config: &VerifyConfig) -> Result<Row> {
    let w = example_w_basis()?;
    let j = johnston_subspace(3, 3)?;
    let cuts = Bipartition::all_cuts(w.profile());
    let opt = config.witness_optimizer();
    let per_sample: Vec<Result<[f64; 3]>> = (0..config.samples)
        .into_par_iter()
        .map(|k| {
            let rho = sample_random_rank(&w, config.seed, k as u64)?;
            let mut worst = [f64::NEG_INFINITY; 3];
            for cut in &cuts {
                worst[0] = worst[0].max(min_pt_eigenvalue(&rho, cut)?.min_eigenvalue);
                let general = rank2_witness_search(&rho, cut, &opt)?.map_or(0.0, |w| w.value);
                worst[1] = worst[1].max(general);
                let structured = appendix_witness(&rho, (&j, &j), cut, DEFAULT_TAU_SAMPLES, &opt)?.map_or(0.0, |w| w.value);
                worst[2] = worst[2].max(structured);
            }
            Ok(worst)
        })
        .collect();
    let mut worst = [f64::NEG_INFINITY; 3];
    for s in per_sample {
        let s = s?;
        for i in 0..3 {
            worst[i] = worst[i].max(s[i]);
        }
    }
    let pass = worst[0] < -1e-9 && worst[1] < -1e-10 && worst[2] < -1e-10;
    Ok(row(
        8,
        "NPT and distillability of the 16-dim example",
        format!("{} samples x 3 cuts: PT min < 0, rank-2 and structured witnesses < 0", config.samples),
        format!("max PT min {}, max rank-2 {}, max structured {}", num(worst[0]), num(worst[1]), num(worst[2])),
        "1e-9 / 1e-10",
        pass,
    ))
}

fn random_entangled_state<R: Rng + ?Sized>(rng: &mut R, dims: [usize; 2]) -> Result<PureState> {
    let profile = DimProfile::new(dims.to_vec())?;
    let cut = Bipartition::new(&[0], &profile)?;
    loop {
        let s = PureState::new(random_unit_vector(rng, dims[0] * dims[1]), profile.clone())?;
        if geometric_measure_state(&s, &cut)? > 1e-6 {
            return Ok(s);
        }
    }
}

pub fn criterion_joined_pairs(config: &VerifyConfig) -> Result<Row> {
    let mut rng = derived_rng(config.seed, Stream::Samples, 1 << 32);
    let mut worst = f64::INFINITY;
    for _ in 0..200 {
        let mut dim = || rng.random_range(2..=3usize);
        let (a, b1, b2, c) = (dim(), dim(), dim(), dim());
        let phi = random_entangled_state(&mut rng, [a, b1])?;
        let chi = random_entangled_state(&mut rng, [b2, c])?;
        let psi = joined_product(&phi, &chi)?;
        for cut in Bipartition::all_cuts(psi.profile()) {
            let s = schmidt(&psi, &cut)?;
            worst = worst.min(s.coeffs.get(1).copied().unwrap_or(0.0));
        }
    }
    Ok(row(9, "joined entangled pairs are GME", "second Schmidt coefficient > 1e-8 on every cut", num(worst), "1e-8", worst > 1e-8))
}

pub fn criterion_invariants(config: &VerifyConfig) -> Result<Row> {
    let mut rng = derived_rng(config.seed, Stream::Samples, 2 << 32);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let dims = [rng.random_range(2..=3usize), rng.random_range(2..=3usize), rng.random_range(2..=3usize)];
        let profile = DimProfile::new(dims.to_vec())?;
        let n = profile.total();
        // random mixed state
        let g = gaussian_matrix(&mut rng, n, 3);
        let rho = DensityOperator::from_unnormalized(&g * g.adjoint(), profile.clone())?;
        let parties: Vec<usize> = (0..3).filter(|_| rng.random_bool(0.5)).collect();
        let pt = partial_transpose_matrix(rho.matrix(), &profile, &parties);
        let back = partial_transpose_matrix(&pt, &profile, &parties);
        worst = worst.max(max_abs(&(back - rho.matrix())));
        worst = worst.max((pt.trace() - C64::from(1.0)).norm());
        worst = worst.max(hermiticity_defect(&pt));
        // Schmidt normalization
        let psi = PureState::new(random_unit_vector(&mut rng, n), profile.clone())?;
        for cut in Bipartition::all_cuts(&profile) {
            let total: f64 = schmidt(&psi, &cut)?.lambdas().iter().sum();
            worst = worst.max((total - 1.0).abs());
        }
        // projector idempotence
        let k = rng.random_range(1..n);
        let vecs: Vec<DVector<C64>> = (0..k).map(|_| random_unit_vector(&mut rng, n)).collect();
        let p = projector(&Subspace::from_vectors(&vecs, profile.clone())?);
        worst = worst.max(max_abs(&(&p * &p - &p)));
        // antisymmetric + symmetric
        let d = dims[0] + 1;
        let sum = antisymmetric_projector(d)? + symmetric_projector(d)?;
        worst = worst.max(max_abs(&(sum - DMatrix::identity(d * d, d * d))));
        // Werner U⊗U invariance
        let s: f64 = rng.random();
        let w = werner_state(&WernerParams::from_s(d, s)?)?;
        let u = random_unitary(&mut rng, d);
        let uu = kron(&u, &u)?;
        worst = worst.max(max_abs(&(&uu * w.matrix() * uu.adjoint() - w.matrix())));
    }
    Ok(row(10, "linear-algebra invariants", "0 on 100 instances", num(worst), "1e-10", worst <= 1e-10))
}

/// Renders a few seeded outputs twice and compares the bytes.
pub fn criterion_determinism(config: &VerifyConfig) -> Result<Row> {
    let render = || -> Result<String> {
        let spec = ConstructSpec::from_json(r#"{"construct":"example_w"}"#)?;
        let w = spec.build(&config.optimizer())?;
        let npt = npt_subspace_check(&w, &Bipartition::all_cuts(w.profile()), 4, config.seed)?;
        let a = from_span(&[w.column_state(0)])?;
        let m = subspace_gme_measure(&a, &config.optimizer())?;
        Ok(format!(
            "{}\n{}\n{:?}",
            w.to_json(),
            serde_json::to_string(&npt).expect("serializable"),
            m.per_cut.iter().map(|(c, r)| (c.to_string(), r.value)).collect::<Vec<_>>()
        ))
    };
    let a = render()?;
    let b = render()?;
    Ok(row(11, "deterministic output", "identical bytes", if a == b { "identical" } else { "different" }, "exact", a == b))
}

impl VerifyReport {
    /// Plain-text table, one line per criterion.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "verify-paper mode={} seed={} restarts={} samples={}\n",
            match self.config.mode {
                Mode::Fast => "fast",
                Mode::Full => "full",
            },
            self.config.seed,
            self.config.restarts,
            self.config.samples
        );
        out.push_str("id | pass | criterion | expected | computed | tolerance\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{} | {} | {} | {} | {} | {}\n",
                r.id,
                if r.pass { "PASS" } else { "FAIL" },
                r.name,
                r.expected,
                r.computed,
                r.tolerance
            ));
        }
        out.push_str(if self.all_passed { "all criteria passed\n" } else { "some criteria FAILED\n" });
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,name,expected,computed,tolerance,pass\n");
        for r in &self.rows {
            let q = |s: &str| format!("\"{}\"", s.replace('"', "\"\""));
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.id,
                q(&r.name),
                q(&r.expected),
                q(&r.computed),
                q(&r.tolerance),
                r.pass
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_criteria_pass() {
        assert!(criterion_threshold().unwrap().pass);
        assert!(criterion_witness().unwrap().pass);
        assert!(criterion_cren().unwrap().pass);
        assert!(criterion_example_w().unwrap().pass);
    }

    #[test]
    fn joined_werner_is_product_of_weights() {
        let rho = joined_werner(2, 0.8, 0.6).unwrap();
        let a2 = antisymmetric_subspace(2).unwrap();
        let w = chain_ges(&[a2.clone(), a2]).unwrap();
        let overlap = rho.expectation(&projector(&w)).re;
        approx::assert_abs_diff_eq!(overlap, 0.48, epsilon = 1e-12);
    }
}
