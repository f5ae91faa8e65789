//! Pipelines behind each subcommand.

use clarklab::charfun::{char_fn_rank_n, char_fn_rank_n_coupled};
use clarklab::clark::{
    ak_residual, clark_density, finite_spectral_measure, herglotz_residual, jump_report, privalov_jump,
    theta_beta_from_measure, theta_from_measure, CircleMeasure,
};
use clarklab::dense::{op_norm, unitarity_residual};
use clarklab::dilation::{perturbation_rank, spectral_union_error};
use clarklab::linop::DEFAULT_RANK_TOL;
use clarklab::sample::{random_contraction, random_off_circle_point, random_unitary};
use clarklab::{
    build_dilation, build_perturbed_dilation, char_fn_definition, defect_data, diagonalize_perturbation,
    livsic_transform, perturb, rank_n_alignment, unimodular, verify_dilation, verify_splitting, CharFn, DilationMode,
    Matrix64, Result, C64,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Command, ExperimentConfig, MatrixSpec};
use crate::error::{CliError, CliResult};
use crate::report::{p, pc, PlotPoint, Report, Row};
use crate::suite::{arc_to_atoms, circle_sweep, verify_all};

/// Schwarz-bound slack for `|θ| <= 1`.
const SCHWARZ_SLACK: f64 = 1e-9;

/// Executes the pipeline named in `cfg`.
pub fn run(cfg: &ExperimentConfig) -> CliResult<Report> {
    cfg.validate()?;
    let (rows, plot) = match cfg.command {
        Command::Charfun => charfun(cfg)?,
        Command::Clark => clark(cfg)?,
        Command::Jump => jump(cfg)?,
        Command::Dilate => dilate(cfg)?,
        Command::VerifyAll => (verify_all(cfg.seed)?, Vec::new()),
    };
    Ok(Report::new(cfg.command.name(), cfg.seed, rows, plot))
}

type Tables = (Vec<Row>, Vec<PlotPoint>);

fn measure(cfg: &ExperimentConfig) -> CliResult<CircleMeasure<f64>> {
    let spec = cfg.measure.as_ref().ok_or_else(|| CliError::ConfigInvalid("missing [measure]".into()))?;
    Ok(spec.build()?)
}

fn matrix(cfg: &ExperimentConfig) -> CliResult<Matrix64> {
    let spec = cfg.matrix.as_ref().ok_or_else(|| CliError::ConfigInvalid("missing [matrix]".into()))?;
    Ok(spec.build()?)
}

fn collect<T: Send>(items: Vec<Result<Vec<T>>>) -> Result<Vec<T>> {
    items.into_iter().try_fold(Vec::new(), |mut acc, part| {
        acc.extend(part?);
        Ok(acc)
    })
}

fn sweep_points(cfg: &ExperimentConfig) -> Vec<(f64, f64, C64)> {
    cfg.radii.iter().flat_map(|&r| circle_sweep(cfg.grid, r).map(move |(t, z)| (r, t, z))).collect()
}

fn charfun(cfg: &ExperimentConfig) -> CliResult<Tables> {
    let points = sweep_points(cfg);
    if cfg.measure.is_some() {
        let mu = measure(cfg)?;
        let betas = cfg.betas();
        let parts: Vec<Result<(Vec<Row>, PlotPoint)>> = points
            .par_iter()
            .map(|&(r, t, z)| {
                let theta = theta_from_measure(&mu, z)?;
                let params = format!("r={};t={}", p(r), p(t));
                let key = vec![r, t];
                let mut rows =
                    vec![Row::at_most("theta_schwarz", params.clone(), key.clone(), theta.norm(), 1.0 + SCHWARZ_SLACK)];
                for (bi, beta) in betas.iter().enumerate() {
                    let dev = (theta_beta_from_measure(&mu, *beta, z)? - livsic_transform(theta, *beta)?).norm();
                    let mut k = key.clone();
                    k.insert(0, bi as f64);
                    rows.push(Row::deviation("livsic", format!("beta={};{params}", pc(*beta)), k, dev, 1e-10));
                }
                Ok((rows, PlotPoint { x: t, series: format!("abs_theta_r={}", p(r)), value: theta.norm() }))
            })
            .collect();
        return split(parts);
    }

    let m = matrix(cfg)?;
    let rec = defect_data(&m, DEFAULT_RANK_TOL)?;
    let is_jordan = matches!(cfg.matrix, Some(MatrixSpec::Jordan));
    // the rank-n formulas need equal deficiency indices and a perturbation drawn from the seed
    let rank_n = if rec.n == rec.n_star && rec.n > 0 {
        let a = random_contraction::<f64, _>(rec.n, 0.9, &mut ChaCha8Rng::seed_from_u64(cfg.seed));
        let diag = diagonalize_perturbation(&a)?;
        let rec_a = defect_data(&perturb(&rec, &a)?, DEFAULT_RANK_TOL)?;
        let (left, right) = rank_n_alignment(&rec, &diag, &rec_a)?;
        Some((diag, rec_a, left, right))
    } else {
        None
    };
    let parts: Vec<Result<(Vec<Row>, PlotPoint)>> = points
        .par_iter()
        .map(|&(r, t, z)| {
            let theta = char_fn_definition(&rec, z)?;
            let norm = op_norm(&theta);
            let params = format!("r={};t={}", p(r), p(t));
            let key = vec![r, t];
            let mut rows =
                vec![Row::at_most("char_fn_schwarz", params.clone(), key.clone(), norm, 1.0 + SCHWARZ_SLACK)];
            if is_jordan {
                rows.push(Row::deviation(
                    "char_fn_vs_z2",
                    params.clone(),
                    key.clone(),
                    (theta[(0, 0)] - z * z).norm(),
                    1e-12,
                ));
            }
            if let Some((diag, rec_a, left, right)) = &rank_n {
                let want = left * char_fn_definition(rec_a, z)? * right;
                let literal = op_norm(&(char_fn_rank_n(&rec, diag, z)? - &want));
                let coupled = op_norm(&(char_fn_rank_n_coupled(&rec, diag, z)? - &want));
                rows.push(Row::deviation("rank_n_formula", params.clone(), key.clone(), literal, 1e-9));
                rows.push(Row::deviation("rank_n_coupled", params, key, coupled, 1e-9));
            }
            Ok((rows, PlotPoint { x: t, series: format!("abs_theta_r={}", p(r)), value: norm }))
        })
        .collect();
    split(parts)
}

fn split(parts: Vec<Result<(Vec<Row>, PlotPoint)>>) -> CliResult<Tables> {
    let mut rows = Vec::new();
    let mut plot = Vec::new();
    for part in parts {
        let (r, pt) = part?;
        rows.extend(r);
        plot.push(pt);
    }
    Ok((rows, plot))
}

/// Tolerance of the radial Clark density against the density of `μ`.
const CLARK_DENSITY_TOL: f64 = 1e-2;

fn clark(cfg: &ExperimentConfig) -> CliResult<Tables> {
    let mu = measure(cfg)?;
    let theta = CharFn::from_measure(mu.clone());
    let one = C64::new(1.0, 0.0);
    let points: Vec<_> =
        sweep_points(cfg).into_iter().filter(|(_, t, _)| arc_to_atoms(*t, &mu) >= cfg.exclusion).collect();
    let parts: Vec<Result<(Row, PlotPoint)>> = points
        .par_iter()
        .map(|&(r, t, _)| {
            let xi = unimodular(t);
            let v = clark_density(&theta, one, xi, r)?;
            let row = Row::compare(
                "clark_density",
                format!("r={};t={}", p(r), p(t)),
                vec![r, t],
                v,
                mu.density_at(xi),
                CLARK_DENSITY_TOL,
            );
            Ok((row, PlotPoint { x: t, series: format!("clark_density_r={}", p(r)), value: v }))
        })
        .collect();
    let mut rows = Vec::new();
    let mut plot = Vec::new();
    for part in parts {
        let (r, pt) = part?;
        rows.push(r);
        plot.push(pt);
    }

    if mu.is_atomic() {
        let gammas = if cfg.gamma_list.is_empty() {
            vec![C64::new(0.0, 1.0), unimodular(2.0), C64::new(-1.0, 0.0)]
        } else {
            cfg.gammas()
        };
        let f: Vec<C64> = mu.atoms().iter().map(|a| a.position.conj()).collect();
        let per_gamma: Vec<Result<Vec<Row>>> = gammas
            .par_iter()
            .enumerate()
            .map(|(gi, &gamma)| {
                let mu_g = finite_spectral_measure(&mu, gamma)?;
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(gi as u64);
                let mut rows = Vec::new();
                for zi in 0..10 {
                    let z = random_off_circle_point::<f64, _>(1e-2, &mut rng);
                    let params = format!("gamma={};z={}", pc(gamma), pc(z));
                    let key = vec![gi as f64, zi as f64];
                    rows.push(Row::at_most(
                        "herglotz",
                        params.clone(),
                        key.clone(),
                        herglotz_residual(&mu, &mu_g, gamma, z)?,
                        1e-9,
                    ));
                    rows.push(Row::at_most("aronszajn_krein", params, key, ak_residual(&mu, gamma, &f, z)?, 1e-9));
                }
                Ok(rows)
            })
            .collect();
        rows.extend(collect(per_gamma)?);
    }
    Ok((rows, plot))
}

/// Relative tolerance of the radial jump formula.
const JUMP_TOL: f64 = 1e-2;

fn jump(cfg: &ExperimentConfig) -> CliResult<Tables> {
    let mu = measure(cfg)?;
    let last = *cfg.radii.last().expect("validated radii");
    let angles: Vec<f64> =
        circle_sweep(cfg.grid, 1.0).map(|(t, _)| t).filter(|t| arc_to_atoms(*t, &mu) >= cfg.exclusion).collect();
    let parts: Vec<Result<(Vec<Row>, Vec<PlotPoint>)>> = angles
        .par_iter()
        .map(|&t| {
            let xi = unimodular(t);
            let mut rows = Vec::new();
            let mut plot = Vec::new();
            for &r in &cfg.radii {
                let rep = jump_report(&mu, xi, r)?;
                let params = format!("r={};t={}", p(r), p(t));
                rows.push(Row::at_most("jump_rel_err", params.clone(), vec![r, t], rep.rel_err(), JUMP_TOL));
                rows.push(Row::at_most(
                    "privalov_defect",
                    params,
                    vec![r, t],
                    privalov_jump(&mu, xi, r)?.defect(),
                    JUMP_TOL,
                ));
                if r == last {
                    for (series, value) in
                        [("lhs_re", rep.lhs.re), ("rhs_re", rep.rhs.re), ("lhs_im", rep.lhs.im), ("rhs_im", rep.rhs.im)]
                    {
                        plot.push(PlotPoint { x: t, series: series.into(), value });
                    }
                }
            }
            Ok((rows, plot))
        })
        .collect();
    let mut rows = Vec::new();
    let mut plot = Vec::new();
    for part in parts {
        let (r, pts) = part?;
        rows.extend(r);
        plot.extend(pts);
    }
    Ok((rows, plot))
}

fn dilate(cfg: &ExperimentConfig) -> CliResult<Tables> {
    let rec = defect_data(&matrix(cfg)?, DEFAULT_RANK_TOL)?;
    if rec.n != rec.n_star {
        return Err(clarklab::Error::DimensionMismatch(format!(
            "deficiency indices ({}, {}) differ",
            rec.n, rec.n_star
        ))
        .into());
    }
    let n = rec.n;
    let m = cfg.depth;
    let id = Matrix64::identity(n, n);
    let a = random_unitary::<f64, _>(n, &mut ChaCha8Rng::seed_from_u64(cfg.seed));
    let trunc = build_dilation(&rec, m, &id, &id, DilationMode::Truncated)?;
    let cyc = build_dilation(&rec, m, &id, &id, DilationMode::Cyclic)?;
    let trunc_a = build_perturbed_dilation(&trunc, &a)?;
    let cyc_a = build_perturbed_dilation(&cyc, &a)?;
    let params = || format!("dim={};defects={n};depth={m}", rec.dim());
    let split = verify_splitting(&trunc_a, &rec, &a)?.max().max(verify_splitting(&cyc_a, &rec, &a)?.max());
    let rows = vec![
        Row::at_most(
            "dilation_powers",
            params(),
            vec![],
            verify_dilation(&trunc, m)?.max(verify_dilation(&cyc, m)?),
            1e-12,
        ),
        Row::at_most("cyclic_unitarity", params(), vec![], unitarity_residual(&cyc.w), 1e-12),
        Row::at_most("perturbed_unitarity", params(), vec![], unitarity_residual(&cyc_a.w), 1e-12),
        Row::compare(
            "perturbation_rank",
            params(),
            vec![],
            perturbation_rank(&trunc_a, &trunc, 1e-10)? as f64,
            (2 * n) as f64,
            0.0,
        ),
        Row::at_most("splitting", params(), vec![], split, 1e-11),
        Row::at_most("spectral_union", params(), vec![], spectral_union_error(&cyc_a)?, 1e-9),
    ];
    Ok((rows, Vec::new()))
}
