use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use slehydro::burgers::{self, AtomicMeasure};
use slehydro::dyson::{self, Window};
use slehydro::single_source::{g_single, hull_boundary_single, hull_point_single, semicircle_cdf};
use slehydro::two_source::{b_pm, boundary_point, g_two, hull_boundary_two, TwoSourceConfig};
use slehydro::{Error, HullBoundary};

use crate::args::*;
use crate::output::{json_artifact, num, tagged_path, write_atomic, Plot, Table};
use crate::CliError;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn check_time(t: f64) -> Result<(), CliError> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(usage(format!("t = {t} must be finite and non-negative")))
    }
}

fn check_dynamics(d: &DynamicsArgs) -> Result<usize, CliError> {
    check_time(d.t)?;
    if !(d.kappa > 0.0 && d.kappa <= 4.0) {
        return Err(usage(format!("kappa = {} must lie in (0, 4]", d.kappa)));
    }
    if !(d.dt > 0.0 && d.dt.is_finite()) {
        return Err(usage(format!("dt = {} must be positive", d.dt)));
    }
    Ok((d.t / d.dt).round() as usize)
}

pub fn parse_atoms(spec: &str) -> Result<AtomicMeasure, CliError> {
    let mut atoms = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (loc, w) = item
            .split_once(':')
            .ok_or_else(|| usage(format!("atom \"{item}\" is not of the form loc:weight")))?;
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| usage(format!("bad number \"{s}\" in atom \"{item}\"")));
        atoms.push((parse(loc)?, parse(w)?));
    }
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    if !(total > 0.0) || atoms.iter().any(|a| !(a.1 > 0.0)) {
        return Err(usage("atom weights must be positive"));
    }
    AtomicMeasure::new(atoms.into_iter().map(|(u, w)| (u, w / total)).collect()).map_err(CliError::from)
}

fn measure(src: &SourceArgs) -> Result<AtomicMeasure, CliError> {
    match src.source {
        Source::Single => Ok(AtomicMeasure::dirac(0.0)),
        Source::Two => AtomicMeasure::symmetric_pair(src.a).map_err(CliError::from),
        Source::Atoms => parse_atoms(src.atoms.as_deref().ok_or_else(|| usage("--source atoms needs --atoms"))?),
    }
}

fn two_config(src: &SourceArgs, t: f64) -> Result<TwoSourceConfig, CliError> {
    TwoSourceConfig::new(src.a, t).map_err(CliError::from)
}

fn emit(out: &OutputArgs, path_tag: Option<&str>, contents: &str) -> Result<(), CliError> {
    let path = match (&out.output, path_tag) {
        (Some(p), Some(tag)) => Some(tagged_path(p, tag)),
        (Some(p), None) => Some(p.clone()),
        (None, _) => None,
    };
    write_atomic(path.as_deref(), contents)
}

fn no_svg(cmd: &str) -> CliError {
    usage(format!("{cmd}: svg output is not available, use csv or json"))
}

// hull

fn hull_curves(args: &HullArgs, t: f64) -> Result<Vec<HullBoundary>, CliError> {
    let n = args.samples;
    Ok(match args.source.source {
        Source::Single => vec![hull_boundary_single(t, n)?],
        Source::Two if t == 0.0 => {
            two_config(&args.source, 1.0)?;
            [-args.source.a, args.source.a]
                .iter()
                .map(|&x| HullBoundary {
                    params: vec![0.0],
                    points: vec![Complex64::new(x, 0.0)],
                    time: 0.0,
                })
                .collect()
        }
        Source::Two => hull_boundary_two(two_config(&args.source, t)?, n)?.curves().into_iter().cloned().collect(),
        Source::Atoms => burgers::hull_boundary_general(&measure(&args.source)?, t, n)?,
    })
}

fn hull_plot(curves: &[HullBoundary], t: f64) -> Plot {
    let mut labels = Vec::new();
    for c in curves {
        if let (Some(first), Some(last)) = (c.points.first(), c.points.last()) {
            labels.push(((first.re, first.im), format!("{:.4}", first.re)));
            if c.points.len() > 1 {
                labels.push(((last.re, last.im), format!("{:.4}", last.re)));
            }
        }
        if let Some(apex) = c.apex() {
            if apex.im > 0.0 {
                labels.push(((apex.re, apex.im), format!("height {:.4}", apex.im)));
            }
        }
    }
    Plot {
        title: format!("hull boundary at t = {t}"),
        lines: curves.iter().map(|c| c.points.iter().map(|p| (p.re, p.im)).collect()).collect(),
        labels,
        axis: true,
    }
}

pub fn hull(args: &HullArgs, config: &Value) -> Result<(), CliError> {
    if args.t.is_empty() {
        return Err(usage("hull: at least one time is required"));
    }
    if args.t.len() > 1 && args.out.output.is_none() {
        return Err(usage("hull: several times need --output (one file per time)"));
    }
    for &t in &args.t {
        check_time(t)?;
        let curves = hull_curves(args, t)?;
        let contents = match args.out.format {
            Format::Csv => {
                let mut table;
                if args.source.source == Source::Single {
                    table = Table::new(vec!["phi".into(), "re".into(), "im".into()]);
                    for (phi, p) in curves[0].params.iter().zip(&curves[0].points) {
                        table.push_nums(&[*phi, p.re, p.im]);
                    }
                } else {
                    table = Table::new(vec!["curve".into(), "param".into(), "re".into(), "im".into()]);
                    for (k, c) in curves.iter().enumerate() {
                        for (s, p) in c.params.iter().zip(&c.points) {
                            table.rows.push(vec![k.to_string(), num(*s), num(p.re), num(p.im)]);
                        }
                    }
                }
                table.notes.push(("t".into(), num(t)));
                table.to_csv(config)
            }
            Format::Json => {
                let cs: Vec<Value> = curves
                    .iter()
                    .map(|c| {
                        json!({
                            "param": c.params,
                            "re": c.points.iter().map(|p| p.re).collect::<Vec<_>>(),
                            "im": c.points.iter().map(|p| p.im).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                json_artifact("hull", config, json!({ "t": t, "curves": cs }))
            }
            Format::Svg => hull_plot(&curves, t).render(),
        };
        let tag = format!("t{t}");
        emit(&args.out, (args.t.len() > 1).then_some(tag.as_str()), &contents)?;
    }
    Ok(())
}

// gmap

fn parse_grid(spec: &str) -> Result<(Window, usize, usize), CliError> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 6 {
        return Err(usage("--grid needs x_min,x_max,y_min,y_max,nx,ny"));
    }
    let f = |s: &str| s.parse::<f64>().map_err(|_| usage(format!("bad number \"{s}\" in --grid")));
    let u = |s: &str| s.parse::<usize>().map_err(|_| usage(format!("bad count \"{s}\" in --grid")));
    let w = Window {
        x_min: f(parts[0])?,
        x_max: f(parts[1])?,
        y_min: f(parts[2])?,
        y_max: f(parts[3])?,
    };
    Ok((w, u(parts[4])?, u(parts[5])?))
}

fn default_window(mu: &AtomicMeasure, t: f64) -> Window {
    let base = Window::around_single_hull(t.max(1e-6));
    Window {
        x_min: mu.min_location() + base.x_min,
        x_max: mu.max_location() + base.x_max,
        y_min: 0.0,
        y_max: base.y_max,
    }
}

pub fn gmap(args: &GmapArgs, config: &Value) -> Result<(), CliError> {
    check_time(args.t)?;
    if args.out.format == Format::Svg {
        return Err(no_svg("gmap"));
    }
    let mu = measure(&args.source)?;
    let (w, nx, ny) = match &args.grid {
        Some(s) => parse_grid(s)?,
        None => (default_window(&mu, args.t), 64, 32),
    };
    if nx == 0 || ny == 0 || !(w.x_min < w.x_max && w.y_min < w.y_max && w.y_min >= 0.0) {
        return Err(usage("--grid must be a nondegenerate rectangle in the upper half plane with nx, ny > 0"));
    }
    let cfg = match args.source.source {
        Source::Two => Some(two_config(&args.source, args.t)?),
        _ => None,
    };
    let t = args.t;
    let (dx, dy) = ((w.x_max - w.x_min) / nx as f64, (w.y_max - w.y_min) / ny as f64);
    let values: Vec<(Complex64, Option<Complex64>)> = (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let z = Complex64::new(w.x_min + ((idx % nx) as f64 + 0.5) * dx, w.y_min + ((idx / nx) as f64 + 0.5) * dy);
            let g = match args.source.source {
                Source::Single => g_single(t, z),
                Source::Two if t == 0.0 => Ok(z),
                Source::Two => g_two(cfg.unwrap(), z),
                Source::Atoms => burgers::map_g(&mu, t, z),
            };
            match g {
                Ok(g) => Ok((z, Some(g))),
                Err(Error::HullInterior { .. }) => Ok((z, None)),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_, Error>>()?;
    let contents = match args.out.format {
        Format::Csv => {
            let mut table = Table::new(vec!["z_re".into(), "z_im".into(), "g_re".into(), "g_im".into(), "inside".into()]);
            for (z, g) in &values {
                let g = g.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                let mut row = vec![num(z.re), num(z.im), num(g.re), num(g.im)];
                row.push(if g.re.is_nan() { "1" } else { "0" }.into());
                table.rows.push(row);
            }
            table.to_csv(config)
        }
        _ => {
            let col = |f: &dyn Fn(&(Complex64, Option<Complex64>)) -> Value| values.iter().map(f).collect::<Vec<_>>();
            json_artifact(
                "gmap",
                config,
                json!({
                    "nx": nx,
                    "ny": ny,
                    "z_re": col(&|v| json!(v.0.re)),
                    "z_im": col(&|v| json!(v.0.im)),
                    "g_re": col(&|v| v.1.map_or(Value::Null, |g| json!(g.re))),
                    "g_im": col(&|v| v.1.map_or(Value::Null, |g| json!(g.im))),
                }),
            )
        }
    };
    emit(&args.out, None, &contents)
}

// density

pub fn density(args: &DensityArgs, config: &Value) -> Result<(), CliError> {
    check_time(args.t)?;
    if !(args.t > 0.0) {
        return Err(usage("density: t must be positive"));
    }
    if args.points < 2 {
        return Err(usage("density: --points must be at least 2"));
    }
    let mu = measure(&args.source)?;
    let profile = burgers::density(&mu, args.t, &burgers::support_grid(&mu, args.t, args.points))?;
    let (grid, rho) = match &args.u {
        Some(us) => {
            let rho = us
                .par_iter()
                .map(|&u| burgers::density_at(&mu, args.t, u))
                .collect::<Result<Vec<_>, _>>()?;
            (us.clone(), rho)
        }
        None => (profile.grid.clone(), profile.density.clone()),
    };
    let support: Vec<[f64; 2]> = profile.support.iter().map(|s| [s.0, s.1]).collect();
    let contents = match args.out.format {
        Format::Csv => {
            let mut table = Table::new(vec!["u".into(), "rho".into()]);
            for (u, r) in grid.iter().zip(&rho) {
                table.push_nums(&[*u, *r]);
            }
            table.notes.push(("support".into(), json!(support).to_string()));
            table.to_csv(config)
        }
        Format::Json => json_artifact("density", config, json!({ "u": grid, "rho": rho, "support": support })),
        Format::Svg => Plot {
            title: format!("density at t = {}", args.t),
            lines: vec![grid.iter().zip(&rho).map(|(u, r)| (*u, *r)).collect()],
            labels: vec![],
            axis: true,
        }
        .render(),
    };
    emit(&args.out, None, &contents)
}

// simulate

/// Starting targets of `n` particles following the source.
fn targets(src: &SourceArgs, n: usize) -> Result<Vec<f64>, CliError> {
    let mu = measure(src)?;
    let atoms = mu.atoms();
    // Largest-remainder apportionment of n particles to the atoms.
    let mut counts: Vec<usize> = atoms.iter().map(|a| (a.1 * n as f64).floor() as usize).collect();
    let mut order: Vec<usize> = (0..atoms.len()).collect();
    order.sort_by(|&i, &j| {
        let ri = atoms[i].1 * n as f64 - counts[i] as f64;
        let rj = atoms[j].1 * n as f64 - counts[j] as f64;
        rj.total_cmp(&ri).then(i.cmp(&j))
    });
    let missing = n - counts.iter().sum::<usize>();
    for &i in order.iter().take(missing) {
        counts[i] += 1;
    }
    Ok(atoms
        .iter()
        .zip(&counts)
        .flat_map(|(a, &c)| std::iter::repeat_n(a.0, c))
        .collect())
}

pub fn simulate(args: &SimulateArgs, config: &Value) -> Result<(), CliError> {
    let steps = check_dynamics(&args.dynamics)?;
    if args.n == 0 {
        return Err(usage("n must be at least 1"));
    }
    if args.every == 0 {
        return Err(usage("--every must be at least 1"));
    }
    let init = dyson::initial_state(&targets(&args.source, args.n)?, args.dynamics.kappa, args.seed, dyson::DEFAULT_COLLAPSE_OFFSET)?;
    let (path, last) = dyson::simulate(&init, args.dynamics.dt, steps)?;
    let stats = dyson::empirical_stats(&last);
    let stats_json = json!({
        "time": last.time(),
        "mean": stats.mean,
        "second_moment": stats.second_moment,
        "expected_second_moment_from_origin": dyson::expected_second_moment(args.n, args.dynamics.kappa, last.time()),
        "ks_to_semicircle": stats.ks_to_semicircle,
    });
    let kept: Vec<usize> = (0..path.times.len()).filter(|k| k % args.every == 0 || *k == path.times.len() - 1).collect();
    let contents = match args.out.format {
        Format::Csv => {
            let mut cols = vec!["step".to_string(), "time".to_string()];
            cols.extend((1..=args.n).map(|j| format!("V_{j}")));
            let mut table = Table::new(cols);
            for &k in &kept {
                let mut row = vec![k.to_string(), num(path.times[k])];
                row.extend(path.positions[k].iter().map(|&v| num(v)));
                table.rows.push(row);
            }
            table.notes.push(("final".into(), stats_json.to_string()));
            table.to_csv(config)
        }
        Format::Json => json_artifact(
            "simulate",
            config,
            json!({
                "step": kept,
                "time": kept.iter().map(|&k| path.times[k]).collect::<Vec<_>>(),
                "positions": kept.iter().map(|&k| &path.positions[k]).collect::<Vec<_>>(),
                "final": stats_json,
            }),
        ),
        Format::Svg => Plot {
            title: format!("Dyson paths, N = {}, kappa = {}", args.n, args.dynamics.kappa),
            lines: (0..args.n).map(|j| kept.iter().map(|&k| (path.positions[k][j], path.times[k])).collect()).collect(),
            labels: vec![],
            axis: false,
        }
        .render(),
    };
    emit(&args.out, None, &contents)
}

// converge

pub fn converge(args: &ConvergeArgs, config: &Value) -> Result<(), CliError> {
    let steps = check_dynamics(&args.dynamics)?;
    if !(args.dynamics.t > 0.0) {
        return Err(usage("converge: t must be positive"));
    }
    if args.n_list.is_empty() || args.n_list.contains(&0) || args.seeds == 0 {
        return Err(usage("converge: --n-list entries and --seeds must be positive"));
    }
    let raster_size = match &args.raster {
        None => None,
        Some(s) => {
            let (a, b) = s.split_once(',').ok_or_else(|| usage("--raster needs nx,ny"))?;
            let p = |v: &str| v.trim().parse::<usize>().map_err(|_| usage(format!("bad count \"{v}\" in --raster")));
            let (nx, ny) = (p(a)?, p(b)?);
            if nx == 0 || ny == 0 {
                return Err(usage("--raster counts must be positive"));
            }
            if args.out.output.is_none() {
                return Err(usage("--raster needs --output (the raster goes to a second file)"));
            }
            Some((nx, ny))
        }
    };
    let (kappa, dt, t) = (args.dynamics.kappa, args.dynamics.dt, args.dynamics.t);
    let jobs: Vec<(usize, u64)> = args.n_list.iter().flat_map(|&n| (0..args.seeds).map(move |s| (n, s))).collect();
    let ks: Vec<f64> = jobs
        .par_iter()
        .map(|&(n, seed)| -> Result<f64, Error> {
            let init = dyson::initial_state(&vec![0.0; n], kappa, seed, dyson::DEFAULT_COLLAPSE_OFFSET)?;
            let last = dyson::simulate_final(&init, dt, steps)?;
            let tt = last.time();
            Ok(dyson::EmpiricalMeasure::from_state(&last).ks_distance(|u| semicircle_cdf(tt, u)))
        })
        .collect::<Result<_, _>>()?;
    let per_n: Vec<(usize, Vec<f64>)> = args
        .n_list
        .iter()
        .enumerate()
        .map(|(i, &n)| (n, ks[i * args.seeds as usize..(i + 1) * args.seeds as usize].to_vec()))
        .collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;

    let contents = match args.out.format {
        Format::Csv => {
            let mut cols = vec!["n".to_string(), "ks_mean".to_string()];
            cols.extend((0..args.seeds).map(|s| format!("ks_seed{s}")));
            let mut table = Table::new(cols);
            for (n, v) in &per_n {
                let mut row = vec![n.to_string(), num(mean(v))];
                row.extend(v.iter().map(|&x| num(x)));
                table.rows.push(row);
            }
            table.to_csv(config)
        }
        Format::Json => json_artifact(
            "converge",
            config,
            json!({ "rows": per_n.iter().map(|(n, v)| json!({ "n": n, "ks_mean": mean(v), "ks": v })).collect::<Vec<_>>() }),
        ),
        Format::Svg => Plot {
            title: "mean KS distance to the semicircle against N".into(),
            lines: vec![per_n.iter().map(|(n, v)| (*n as f64, mean(v))).collect()],
            labels: per_n.iter().map(|(n, v)| ((*n as f64, mean(v)), format!("N = {n}"))).collect(),
            axis: true,
        }
        .render(),
    };
    emit(&args.out, None, &contents)?;

    if let Some((nx, ny)) = raster_size {
        let n = *args.n_list.iter().max().unwrap();
        let init = dyson::initial_state(&vec![0.0; n], kappa, 0, dyson::DEFAULT_COLLAPSE_OFFSET)?;
        let (path, _) = dyson::simulate(&init, dt, steps)?;
        let window = Window::around_single_hull(t);
        let raster = dyson::hull_raster(&path, window, nx, ny, dyson::DEFAULT_SWALLOW_EPS)?;
        let contents = match args.out.format {
            Format::Csv => {
                let mut table = Table::new(vec!["ix".into(), "iy".into(), "re".into(), "im".into(), "swallowed".into()]);
                for iy in 0..ny {
                    for ix in 0..nx {
                        let c = raster.cell_center(ix, iy);
                        table.rows.push(vec![ix.to_string(), iy.to_string(), num(c.re), num(c.im), (raster.get(ix, iy) as u8).to_string()]);
                    }
                }
                table.notes.push(("raster_n".into(), n.to_string()));
                table.to_csv(config)
            }
            Format::Json => json_artifact(
                "converge-raster",
                config,
                json!({ "n": n, "nx": nx, "ny": ny, "window": [window.x_min, window.x_max, window.y_min, window.y_max], "cells": raster.cells }),
            ),
            Format::Svg => {
                let k = hull_boundary_single(t, 401)?;
                let labels = (0..ny)
                    .flat_map(|iy| (0..nx).map(move |ix| (ix, iy)))
                    .filter(|&(ix, iy)| raster.get(ix, iy))
                    .map(|(ix, iy)| {
                        let c = raster.cell_center(ix, iy);
                        ((c.re, c.im), String::new())
                    })
                    .collect();
                Plot {
                    title: format!("raster hull, N = {n}, against the limit hull"),
                    lines: vec![k.points.iter().map(|p| (p.re, p.im)).collect()],
                    labels,
                    axis: true,
                }
                .render()
            }
        };
        emit(&args.out, Some("raster"), &contents)?;
    }
    Ok(())
}

// asymptote

/// `(relative, absolute)` sup-distance between `∂K_t/√t` and `∂𝒦` at matched φ.
fn collapse_distance(src: &SourceArgs, t: f64, samples: usize) -> Result<(f64, f64), CliError> {
    if src.source == Source::Single {
        return Ok((0.0, 0.0));
    }
    let cfg = two_config(src, t)?;
    let (_, bp) = b_pm(cfg.reduced_time());
    let phis: Vec<f64> = (0..samples)
        .map(|k| -0.5 * std::f64::consts::PI + std::f64::consts::PI * k as f64 / (samples - 1) as f64)
        .collect();
    let d = phis
        .par_iter()
        .map(|&phi| -> Result<(f64, f64), Error> {
            let s = phi.sin() * bp;
            let p = if s >= 0.0 { boundary_point(cfg, s)? } else { -boundary_point(cfg, -s)?.conj() };
            let p = p / t.sqrt();
            let k = hull_point_single(1.0, phi);
            Ok(((p / k - 1.0).norm(), (p - k).norm()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(d.iter().fold((0.0f64, 0.0f64), |acc, x| (acc.0.max(x.0), acc.1.max(x.1))))
}

fn fitted_exponent(ts: &[f64], d: &[f64]) -> Option<f64> {
    if ts.len() < 2 || d.iter().any(|&x| !(x > 0.0)) {
        return None;
    }
    let x: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = d.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    Some(sxy / sxx)
}

pub fn asymptote(args: &AsymptoteArgs, config: &Value) -> Result<(), CliError> {
    if args.source.source == Source::Atoms {
        return Err(usage("asymptote: supports --source single and --source two"));
    }
    if args.samples < 3 {
        return Err(usage("asymptote: --samples must be at least 3"));
    }
    for &t in &args.t_list {
        check_time(t)?;
        if t == 0.0 {
            return Err(usage("asymptote: times must be positive"));
        }
    }
    let rows = args
        .t_list
        .iter()
        .map(|&t| collapse_distance(&args.source, t, args.samples))
        .collect::<Result<Vec<_>, _>>()?;
    let rel: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let exponent = fitted_exponent(&args.t_list, &rel);
    let contents = match args.out.format {
        Format::Csv => {
            let mut table = Table::new(vec!["t".into(), "rel_distance".into(), "abs_distance".into()]);
            for (t, r) in args.t_list.iter().zip(&rows) {
                table.push_nums(&[*t, r.0, r.1]);
            }
            table.notes.push(("fitted_exponent".into(), exponent.map_or("nan".into(), num)));
            table.to_csv(config)
        }
        Format::Json => json_artifact(
            "asymptote",
            config,
            json!({
                "t": args.t_list,
                "rel_distance": rel,
                "abs_distance": rows.iter().map(|r| r.1).collect::<Vec<_>>(),
                "fitted_exponent": exponent,
            }),
        ),
        Format::Svg => Plot {
            title: format!("log distance against log t, fitted exponent {}", exponent.map_or("n/a".into(), |e| format!("{e:.3}"))),
            lines: vec![args.t_list.iter().zip(&rel).filter(|(_, d)| **d > 0.0).map(|(t, d)| (t.ln(), d.ln())).collect()],
            labels: vec![],
            axis: false,
        }
        .render(),
    };
    emit(&args.out, None, &contents)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn src(source: Source, atoms: Option<&str>) -> SourceArgs {
        SourceArgs {
            source,
            a: 1.0,
            atoms: atoms.map(String::from),
        }
    }

    #[test]
    fn atoms_are_parsed_sorted_and_normalized() {
        let mu = parse_atoms("1:1, -1:3").unwrap();
        assert_eq!(mu.atoms(), &[(-1.0, 0.75), (1.0, 0.25)]);
        assert!(parse_atoms("1").is_err());
        assert!(parse_atoms("0:-1").is_err());
        assert!(parse_atoms("0:1,0:1").is_err());
    }

    #[test]
    fn particles_follow_atom_weights() {
        let x = targets(&src(Source::Atoms, Some("-1:0.25,2:0.75")), 10).unwrap();
        assert_eq!(x.iter().filter(|&&v| v == -1.0).count(), 3);
        assert_eq!(x.len(), 10);
        let x = targets(&src(Source::Two, None), 5).unwrap();
        assert_eq!(x, vec![-1.0, -1.0, -1.0, 1.0, 1.0]);
        assert!(x.windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn exponent_of_power_law() {
        let ts = [2.0, 4.0, 8.0];
        let d: Vec<f64> = ts.iter().map(|t| 3.0 / t).collect();
        assert!((fitted_exponent(&ts, &d).unwrap() + 1.0).abs() < 1e-12);
        assert!(fitted_exponent(&ts, &[0.0, 0.0, 0.0]).is_none());
    }
}
