//! The seeded verification suites behind `verify-all`.
//!
//! Each suite draws its instances from its own ChaCha stream, keyed by the
//! suite number and the instance index, so results do not depend on how
//! rayon schedules the instances.

use std::f64::consts::{PI, TAU};

use clarklab::charfun::{char_fn_rank_n, char_fn_rank_n_coupled};
use clarklab::clark::{
    ak_residual, clark_density, finite_spectral_measure, herglotz_residual, jump_report, poltoratski_limit,
    privalov_jump, spectral_transport, theta_beta_from_measure, theta_boundary_at_singular, theta_from_measure, Atom,
    CircleMeasure, Density, DEFAULT_GRID,
};
use clarklab::dense::{op_norm, unitarity_residual};
use clarklab::dilation::{perturbation_rank, spectral_union_error};
use clarklab::linop::DEFAULT_RANK_TOL;
use clarklab::sample::{
    jordan_block, random_atomic_measure, random_cnu, random_contraction, random_disc_point, random_off_circle_point,
    random_unitary, CnuKind,
};
use clarklab::{
    build_dilation, build_perturbed_dilation, char_fn_definition, defect_data, diagonalize_perturbation,
    innerness_defect, livsic_transform, perturb, rank_n_alignment, unimodular, verify_dilation, verify_splitting,
    CharFn, DilationMode, Result, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::report::{p, pc, Row};

/// One numbered acceptance suite.
pub struct Criterion {
    pub number: u8,
    pub title: &'static str,
    pub run: fn(u64) -> Result<Vec<Row>>,
}

pub const CRITERIA: [Criterion; 9] = [
    Criterion { number: 1, title: "rank-n characteristic function vs definition", run: rank_n_cross_check },
    Criterion { number: 2, title: "two-point measure and Jordan block give z^2", run: measure_matrix_coincidence },
    Criterion { number: 3, title: "closed form for 1/2 m + 1/2 delta_1", run: mixed_closed_form },
    Criterion { number: 4, title: "Clark density and innerness", run: clark_self_consistency },
    Criterion { number: 5, title: "Livsic relation", run: livsic_relation },
    Criterion { number: 6, title: "Herglotz and Aronszajn-Krein", run: herglotz_aronszajn_krein },
    Criterion { number: 7, title: "jump formula", run: jump_formula },
    Criterion { number: 8, title: "boundary values at atoms", run: atom_boundary_values },
    Criterion { number: 9, title: "dilation suite", run: dilation_suite },
];

/// Every suite, in order.
pub fn verify_all(seed: u64) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for c in &CRITERIA {
        rows.extend((c.run)(seed)?);
    }
    Ok(rows)
}

fn stream(seed: u64, suite: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((suite << 32) | index);
    rng
}

fn flatten(parts: Result<Vec<Vec<Row>>>) -> Result<Vec<Row>> {
    parts.map(|v| v.into_iter().flatten().collect())
}

/// `½δ₁ + ½δ₋₁`
pub fn two_point() -> CircleMeasure<f64> {
    CircleMeasure::atomic(vec![Atom::at_fraction(0.0, 0.5), Atom::at_fraction(0.5, 0.5)]).expect("valid measure")
}

/// `½m + ½δ₁`
pub fn mixed() -> CircleMeasure<f64> {
    CircleMeasure::new(vec![Atom::at_fraction(0.0, 0.5)], Density::Constant(0.5), DEFAULT_GRID).expect("valid measure")
}

pub fn dirac_one() -> CircleMeasure<f64> {
    CircleMeasure::atomic(vec![Atom::at_fraction(0.0, 1.0)]).expect("valid measure")
}

fn standard_gammas() -> [(&'static str, C64); 3] {
    [("i", C64::new(0.0, 1.0)), ("e^2i", unimodular(2.0)), ("-1", C64::new(-1.0, 0.0))]
}

/// Arclength from `e^{it}` to `1`.
fn arc_from_one(t: f64) -> f64 {
    t.min(TAU - t)
}

const RANK_N_TRIALS: u64 = 50;
const RANK_N_POINTS: usize = 20;

pub fn rank_n_cross_check(seed: u64) -> Result<Vec<Row>> {
    flatten(
        (0..RANK_N_TRIALS)
            .into_par_iter()
            .map(|trial| {
                let mut rng = stream(seed, 1, trial);
                let defects = 1 + (trial % 2) as usize;
                let size = rng.random_range(2..=10usize);
                let u = random_cnu::<f64, _>(size, defects, CnuKind::PartialIsometry, &mut rng)?;
                let rec = defect_data(&u, DEFAULT_RANK_TOL)?;
                let a = random_contraction::<f64, _>(defects, 0.9, &mut rng);
                let diag = diagonalize_perturbation(&a)?;
                let rec_a = defect_data(&perturb(&rec, &a)?, DEFAULT_RANK_TOL)?;
                let (left, right) = rank_n_alignment(&rec, &diag, &rec_a)?;
                let (mut literal, mut coupled) = (0.0f64, 0.0f64);
                for _ in 0..RANK_N_POINTS {
                    let z = random_disc_point::<f64, _>(0.95, &mut rng);
                    let want = &left * char_fn_definition(&rec_a, z)? * &right;
                    literal = literal.max(op_norm(&(char_fn_rank_n(&rec, &diag, z)? - &want)));
                    coupled = coupled.max(op_norm(&(char_fn_rank_n_coupled(&rec, &diag, z)? - &want)));
                }
                let params = format!("trial={trial};size={size};defects={defects}");
                let key = vec![trial as f64];
                Ok(vec![
                    Row::deviation("rank_n_formula", params.clone(), key.clone(), literal, 1e-9),
                    Row::deviation("rank_n_coupled", params, key, coupled, 1e-9),
                ])
            })
            .collect(),
    )
}

pub fn measure_matrix_coincidence(seed: u64) -> Result<Vec<Row>> {
    let mut rng = stream(seed, 2, 0);
    let mu = two_point();
    let rec = defect_data(&jordan_block::<f64>(), DEFAULT_RANK_TOL)?;
    let (mut measure, mut matrix, mut between) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let z = random_disc_point::<f64, _>(0.99, &mut rng);
        let a = theta_from_measure(&mu, z)?;
        let b = char_fn_definition(&rec, z)?[(0, 0)];
        measure = measure.max((a - z * z).norm());
        matrix = matrix.max((b - z * z).norm());
        between = between.max((a - b).norm());
    }
    let params = || "points=100".to_string();
    Ok(vec![
        Row::deviation("two_point_vs_z2", params(), vec![], measure, 1e-12),
        Row::deviation("jordan_vs_z2", params(), vec![], matrix, 1e-12),
        Row::deviation("two_point_vs_jordan", params(), vec![], between, 1e-12),
    ])
}

pub fn mixed_closed_form(seed: u64) -> Result<Vec<Row>> {
    let mut rng = stream(seed, 3, 0);
    let mu = mixed();
    let two = C64::new(2.0, 0.0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let z = random_disc_point::<f64, _>(0.9, &mut rng);
        worst = worst.max((theta_from_measure(&mu, z)? - z / (two - z)).norm());
    }
    let r = 0.9999;
    let spot = theta_from_measure(&mu, C64::new(-r, 0.0))?;
    let third = -1.0 / 3.0;
    Ok(vec![
        Row::deviation("mixed_vs_closed_form", "points=100;grid=2048".into(), vec![], worst, 1e-8),
        Row {
            abs_err: (spot - C64::new(third, 0.0)).norm(),
            pass: (spot - C64::new(third, 0.0)).norm() <= 1e-4,
            ..Row::compare("mixed_at_minus_one", format!("r={}", p(r)), vec![], spot.re, third, 1e-4)
        },
    ])
}

pub fn clark_self_consistency(seed: u64) -> Result<Vec<Row>> {
    let theta = CharFn::from_measure(mixed());
    let one = C64::new(1.0, 0.0);
    let r = 1.0 - 1e-3;
    let mut rows = Vec::new();
    for j in 0..64 {
        let t = TAU * j as f64 / 64.0;
        if arc_from_one(t) < 0.1 {
            continue;
        }
        let v = clark_density(&theta, one, unimodular(t), r)?;
        rows.push(Row::compare("clark_density_mixed", format!("t={};r={}", p(t), p(r)), vec![t], v, 0.5, 1e-2));
    }
    let inner: Result<Vec<Row>> = (1..=12u64)
        .into_par_iter()
        .map(|k| {
            let mu = rotated_roots(k as usize, stream(seed, 4, k).random())?;
            let d = innerness_defect(&CharFn::from_measure(mu), 512, 1.0 - 1e-4)?;
            Ok(Row::at_most("innerness_atomic", format!("atoms={k}"), vec![k as f64], d, 5.0 * k as f64 * 1e-4))
        })
        .collect();
    rows.extend(inner?);
    Ok(rows)
}

/// `k` equal atoms at `e^{2πi(φ + j)/k}`. The innerness bound scales with
/// the atom spacing, so clustered atoms are not covered by it.
pub fn rotated_roots(k: usize, phase: f64) -> Result<CircleMeasure<f64>> {
    let w = 1.0 / k as f64;
    CircleMeasure::atomic((0..k).map(|j| Atom::at_fraction((phase + j as f64) / k as f64, w)).collect())
}

pub fn livsic_relation(seed: u64) -> Result<Vec<Row>> {
    let betas = [C64::new(0.3, 0.0), C64::new(0.0, 0.5), C64::new(-0.7, 0.0)];
    let mut rows = Vec::new();
    for (mi, (name, mu)) in [("two_point", two_point()), ("mixed", mixed())].into_iter().enumerate() {
        for (bi, beta) in betas.iter().enumerate() {
            let mut rng = stream(seed, 5, (mi * 3 + bi) as u64);
            let mut worst = 0.0f64;
            for _ in 0..50 {
                let z = random_disc_point::<f64, _>(0.99, &mut rng);
                let direct = theta_beta_from_measure(&mu, *beta, z)?;
                let via = livsic_transform(theta_from_measure(&mu, z)?, *beta)?;
                worst = worst.max((direct - via).norm());
            }
            let params = format!("measure={name};beta={}", pc(*beta));
            rows.push(Row::deviation("livsic", params, vec![mi as f64, bi as f64], worst, 1e-10));
        }
    }
    Ok(rows)
}

pub fn herglotz_aronszajn_krein(seed: u64) -> Result<Vec<Row>> {
    flatten(
        (0..20u64)
            .into_par_iter()
            .map(|m| {
                let mut rng = stream(seed, 6, m);
                let k = rng.random_range(2..=8usize);
                let mu = random_atomic_measure::<f64, _>(k, &mut rng)?;
                let f: Vec<C64> = (0..k)
                    .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
                    .collect();
                let conj: Vec<C64> = mu.atoms().iter().map(|a| a.position.conj()).collect();
                let mut rows = Vec::new();
                for (gi, (gname, gamma)) in standard_gammas().into_iter().enumerate() {
                    let mu_g = finite_spectral_measure(&mu, gamma)?;
                    let (mut herglotz, mut ak) = (0.0f64, 0.0f64);
                    for _ in 0..10 {
                        let z = random_off_circle_point::<f64, _>(1e-2, &mut rng);
                        herglotz = herglotz.max(herglotz_residual(&mu, &mu_g, gamma, z)?);
                        ak = ak.max(ak_residual(&mu, gamma, &f, z)?);
                    }
                    let moved = spectral_transport(&mu, gamma, &conj)?;
                    let transport = moved
                        .measure
                        .atoms()
                        .iter()
                        .zip(&moved.values)
                        .map(|(a, v)| (v - gamma * a.position.conj()).norm())
                        .fold(0.0, f64::max);
                    let params = format!("measure={m};atoms={k};gamma={gname}");
                    let key = vec![m as f64, gi as f64];
                    rows.push(Row::at_most("herglotz", params.clone(), key.clone(), herglotz, 1e-9));
                    rows.push(Row::at_most("aronszajn_krein", params.clone(), key.clone(), ak, 1e-9));
                    rows.push(Row::deviation("transport_conj_xi", params, key, transport, 1e-10));
                }
                Ok(rows)
            })
            .collect(),
    )
}

/// Sweep points closer than this arclength to the atom at `1` are skipped in
/// the jump suite; the atom's Poisson tail is `≈ (1 − r)/|1 − ξ|²` there.
pub const JUMP_EXCLUSION: f64 = 0.5;

pub fn jump_formula(_seed: u64) -> Result<Vec<Row>> {
    let mu = mixed();
    let (coarse, fine) = (1.0 - 1e-3, 1.0 - 1e-4);
    let mut rows = Vec::new();
    for j in 0..32 {
        let t = TAU * j as f64 / 32.0;
        if arc_from_one(t) < JUMP_EXCLUSION {
            continue;
        }
        let xi = unimodular(t);
        let e_coarse = jump_report(&mu, xi, coarse)?.rel_err();
        let e_fine = jump_report(&mu, xi, fine)?.rel_err();
        let params = format!("t={}", p(t));
        rows.push(Row::at_most("jump_rel_err", format!("{params};r={}", p(coarse)), vec![t], e_coarse, 1e-2));
        rows.push(Row::at_least("jump_improvement", params, vec![t], e_coarse / e_fine, 5.0));
        for r in [coarse, fine] {
            let d = privalov_jump(&mu, xi, r)?.defect();
            rows.push(Row::at_most("privalov_defect", format!("t={};r={}", p(t), p(r)), vec![t, r], d, 1e-2));
        }
    }
    Ok(rows)
}

/// Radius schedule approaching the circle.
pub const SCHEDULE: [f64; 4] = [1.0 - 1e-2, 1.0 - 1e-3, 1.0 - 1e-4, 1.0 - 1e-5];

pub fn atom_boundary_values(_seed: u64) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    let one = C64::new(1.0, 0.0);
    for (mi, (name, mu)) in [("dirac_one", dirac_one()), ("two_point", two_point())].into_iter().enumerate() {
        let gammas = std::iter::once(("1", one)).chain(standard_gammas());
        for (gi, (gname, gamma)) in gammas.enumerate() {
            let mu_g = finite_spectral_measure(&mu, gamma)?;
            for (ai, atom) in mu_g.atoms().iter().enumerate() {
                let values = poltoratski_limit(&mu_g, ai, &SCHEDULE)?;
                for (r, v) in SCHEDULE.iter().zip(values) {
                    let params = format!("measure={name};gamma={gname};atom={ai};r={}", p(*r));
                    let key = vec![mi as f64, gi as f64, ai as f64, *r];
                    rows.push(Row::at_most(
                        "poltoratski",
                        params,
                        key,
                        (v - atom.position.conj()).norm(),
                        10.0 * (1.0 - r),
                    ));
                }
            }
            for (ai, b) in theta_boundary_at_singular(&mu, gamma, &SCHEDULE)?.into_iter().enumerate() {
                for (r, v) in SCHEDULE.iter().zip(b.values) {
                    let params = format!("measure={name};gamma={gname};atom={ai};r={}", p(*r));
                    let key = vec![mi as f64, gi as f64, ai as f64, *r];
                    rows.push(Row::at_most("theta_at_clark_atom", params, key, (v - gamma).norm(), 10.0 * (1.0 - r)));
                }
            }
        }
    }
    // the mixed measure has one atom, at 1, and is its own Clark measure for γ = 1
    let mu = mixed();
    let values = poltoratski_limit(&mu, 0, &SCHEDULE)?;
    for (r, v) in SCHEDULE.iter().zip(values) {
        let params = format!("measure=mixed;gamma=1;atom=0;r={}", p(*r));
        rows.push(Row::at_most(
            "poltoratski",
            params.clone(),
            vec![2.0, 0.0, 0.0, *r],
            (v - one).norm(),
            10.0 * (1.0 - r),
        ));
        let theta = theta_from_measure(&mu, C64::new(*r, 0.0))?;
        rows.push(Row::at_most(
            "theta_at_clark_atom",
            params,
            vec![2.0, 0.0, 0.0, *r],
            (theta - one).norm(),
            10.0 * (1.0 - r),
        ));
    }
    Ok(rows)
}

pub const DILATION_DEPTH: usize = 32;
const DILATION_INSTANCES: u64 = 8;

pub fn dilation_suite(seed: u64) -> Result<Vec<Row>> {
    flatten(
        (0..DILATION_INSTANCES)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(seed, 9, i);
                let n = 1 + (i % 2) as usize;
                let dim = rng.random_range(n + 1..=10usize);
                let u = random_cnu::<f64, _>(dim, n, CnuKind::PartialIsometry, &mut rng)?;
                let rec = defect_data(&u, DEFAULT_RANK_TOL)?;
                let glue_in = random_unitary::<f64, _>(n, &mut rng);
                let glue_out = random_unitary::<f64, _>(n, &mut rng);
                let a = random_unitary::<f64, _>(n, &mut rng);
                let m = DILATION_DEPTH;
                let trunc = build_dilation(&rec, m, &glue_in, &glue_out, DilationMode::Truncated)?;
                let cyc = build_dilation(&rec, m, &glue_in, &glue_out, DilationMode::Cyclic)?;
                let trunc_a = build_perturbed_dilation(&trunc, &a)?;
                let cyc_a = build_perturbed_dilation(&cyc, &a)?;
                let power_err = verify_dilation(&trunc, m)?.max(verify_dilation(&cyc, m)?);
                let split = verify_splitting(&trunc_a, &rec, &a)?.max().max(verify_splitting(&cyc_a, &rec, &a)?.max());
                let rank = perturbation_rank(&trunc_a, &trunc, 1e-10)?;
                let params = format!("instance={i};dim={dim};defects={n};depth={m}");
                let key = vec![i as f64];
                Ok(vec![
                    Row::at_most("dilation_powers", params.clone(), key.clone(), power_err, 1e-12),
                    Row::at_most(
                        "perturbed_unitarity",
                        params.clone(),
                        key.clone(),
                        unitarity_residual(&cyc_a.w),
                        1e-12,
                    ),
                    Row::compare("perturbation_rank", params.clone(), key.clone(), rank as f64, (2 * n) as f64, 0.0),
                    Row::at_most("splitting", params.clone(), key.clone(), split, 1e-11),
                    Row::at_most("spectral_union", params, key, spectral_union_error(&cyc_a)?, 1e-9),
                ])
            })
            .collect(),
    )
}

/// Points `r e^{2πij/grid}` with their angles.
pub fn circle_sweep(grid: usize, r: f64) -> impl Iterator<Item = (f64, C64)> {
    (0..grid).map(move |j| {
        let t = TAU * j as f64 / grid as f64;
        (t, unimodular(t) * r)
    })
}

/// Arclength distance between `e^{it}` and the nearest atom.
pub fn arc_to_atoms(t: f64, mu: &CircleMeasure<f64>) -> f64 {
    mu.atoms()
        .iter()
        .map(|a| {
            let d = (t - clarklab::arg_0_2pi(a.position)).rem_euclid(TAU);
            d.min(TAU - d)
        })
        .fold(PI, f64::min)
}
