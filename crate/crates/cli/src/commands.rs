use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use riesz_core::ballpot::ball_potential;
use riesz_core::centers::{find_centers, uniqueness_sweep, CenterSearchConfig};
use riesz_core::engine::{gradient, potential, v_hat};
use riesz_core::quadrature::{default_size, SphereQuadrature};
use riesz_core::rings::{asphericity, best_ball, minimal_ring, RingSearch};
use riesz_core::shapes::{builtin, star_cos, Shape, ShapeError};

use crate::error::{finite, CliError};
use crate::report::{heatmap_svg, num, open, opt_num, write_csv, write_json, Meta};
use crate::{Command, Common, Family, RingArgs};

const STAR_SAMPLES: usize = 720;

pub fn parse_point(s: &str) -> Result<Vec<f64>, String> {
    let coords: Result<Vec<f64>, _> = s.split(',').map(|c| c.trim().parse::<f64>()).collect();
    match coords {
        Ok(c) if c.len() >= 2 && c.iter().all(|v| v.is_finite()) => Ok(c),
        Ok(_) => Err(format!("point '{s}' needs at least two finite coordinates")),
        Err(e) => Err(format!("point '{s}': {e}")),
    }
}

fn parse_cloud(s: &str) -> Result<Vec<Vec<f64>>, CliError> {
    s.split(';').map(|p| parse_point(p).map_err(CliError::Validation)).collect()
}

pub fn load_shape(source: &str) -> Result<Shape, CliError> {
    if let Some(name) = source.strip_prefix("builtin:") {
        return Ok(builtin(name)?);
    }
    let text = std::fs::read_to_string(source)
        .map_err(|e| CliError::Validation(format!("cannot read shape file {source}: {e}")))?;
    Ok(Shape::from_json(&text)?)
}

fn rule(dim: usize, common: &Common) -> Result<SphereQuadrature, CliError> {
    match common.directions {
        Some(0) => Err(CliError::Validation("directions must be positive".into())),
        Some(n) => Ok(SphereQuadrature::with_size(dim, n, common.seed)),
        None => Ok(SphereQuadrature::with_size(dim, default_size(dim), common.seed)),
    }
}

fn ring_search(args: &RingArgs) -> Result<RingSearch, CliError> {
    if args.grid < 2 || args.candidates == 0 {
        return Err(CliError::Validation("ring search needs grid >= 2 and at least one candidate".into()));
    }
    Ok(RingSearch { grid_resolution: args.grid, candidates: args.candidates, ..Default::default() })
}

fn meta(command: &'static str, common: &Common, quad: &SphereQuadrature) -> Meta {
    let timestamp = common
        .timestamp
        .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
    Meta { command, seed: common.seed, quadrature: quad.describe(), timestamp, extra: Vec::new() }
}

fn coord_columns(prefix: &str, dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("{prefix}{i}")).collect()
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Potential { shape, lambda, points, vhat, gradient, common } => {
            run_potential(&shape, &lambda, &points, vhat, gradient, &common)
        }
        Command::BallOracle { n, lambda, t, common } => run_ball_oracle(n, &lambda, &t, &common),
        Command::Center { shape, lambda, starts, common } => {
            let shape = load_shape(&shape)?;
            let quad = rule(shape.dim(), &common)?;
            let config = CenterSearchConfig { starts, seed: common.seed, ..CenterSearchConfig::new(lambda) };
            let report = find_centers(&shape, &config, &quad)?;
            let mut m = meta("center", &common, &quad);
            m.extra.push(("lambda".into(), lambda.to_string()));
            m.extra.push(("starts".into(), starts.to_string()));
            write_json(open(common.output.as_deref())?, &m, &report)
        }
        Command::Sweep { family, params, lambda, k, points, starts, no_asphericity, svg, rings, common } => {
            run_sweep(family, &params, &lambda, k, &points, starts, !no_asphericity, svg, &rings, &common)
        }
        Command::Asphericity { shape, rings, common } => {
            let (shape, quad, search) = ring_setup(&shape, &rings, &common)?;
            let report = asphericity(&shape, &search, &quad)?;
            write_json(open(common.output.as_deref())?, &ring_meta("asphericity", &common, &quad, &search), &report)
        }
        Command::MinimalRing { shape, rings, common } => {
            let (shape, quad, search) = ring_setup(&shape, &rings, &common)?;
            let report = minimal_ring(&shape, &search, &quad)?;
            finite("phi", report.phi)?;
            write_json(open(common.output.as_deref())?, &ring_meta("minimal-ring", &common, &quad, &search), &report)
        }
        Command::BestBall { shape, rings, common } => {
            let (shape, quad, search) = ring_setup(&shape, &rings, &common)?;
            let report = best_ball(&shape, &search, &quad)?;
            finite("distance", report.distance)?;
            write_json(open(common.output.as_deref())?, &ring_meta("best-ball", &common, &quad, &search), &report)
        }
    }
}

fn ring_setup(source: &str, rings: &RingArgs, common: &Common) -> Result<(Shape, SphereQuadrature, RingSearch), CliError> {
    let shape = load_shape(source)?;
    let quad = rule(shape.dim(), common)?;
    Ok((shape, quad, ring_search(rings)?))
}

fn ring_meta(command: &'static str, common: &Common, quad: &SphereQuadrature, search: &RingSearch) -> Meta {
    let mut m = meta(command, common, quad);
    m.extra.push(("grid".into(), search.grid_resolution.to_string()));
    m.extra.push(("candidates".into(), search.candidates.to_string()));
    m
}

fn run_potential(
    source: &str,
    lambdas: &[f64],
    points: &[Vec<f64>],
    with_vhat: bool,
    with_gradient: bool,
    common: &Common,
) -> Result<(), CliError> {
    let shape = load_shape(source)?;
    let dim = shape.dim();
    let quad = rule(dim, common)?;
    let mut columns = vec!["lambda".to_string()];
    columns.extend(coord_columns("x", dim));
    columns.extend(["value", "regularized", "std_error"].map(String::from));
    if with_vhat {
        columns.push("vhat".into());
    }
    if with_gradient {
        columns.extend(coord_columns("g", dim));
    }
    let mut rows = Vec::new();
    for &l in lambdas {
        for x in points {
            shape.check_point(x)?;
            let v = potential(&shape, x, l, &quad)?;
            let mut row = vec![num(l)];
            row.extend(x.iter().map(|&c| num(c)));
            row.push(num(finite("potential", v.value)?));
            row.push(v.regularized.to_string());
            row.push(opt_num(v.std_error));
            if with_vhat {
                row.push(num(finite("vhat", v_hat(&shape, x, l, &quad)?)?));
            }
            if with_gradient {
                match gradient(&shape, x, l, &quad) {
                    Ok(g) => row.extend(g.iter().map(|&c| num(c))),
                    Err(_) => row.extend(std::iter::repeat_n(String::new(), dim)),
                }
            }
            rows.push(row);
        }
    }
    write_csv(open(common.output.as_deref())?, &meta("potential", common, &quad), &columns, &rows)
}

fn run_ball_oracle(n: usize, lambdas: &[f64], ts: &[f64], common: &Common) -> Result<(), CliError> {
    if n < 2 {
        return Err(CliError::Validation(format!("dimension must be at least 2, got {n}")));
    }
    let quad = rule(n, common)?;
    let ball = Shape::ball(&vec![0.0; n], 1.0)?;
    let columns: Vec<String> = ["n", "lambda", "t", "closed_form", "engine", "abs_error"].map(String::from).into();
    let mut rows = Vec::new();
    let mut max_err: f64 = 0.0;
    for &l in lambdas {
        for &t in ts {
            let closed = finite("closed form", ball_potential(n, l, t)?)?;
            let mut x = vec![0.0; n];
            x[0] = t;
            let engine = finite("engine value", potential(&ball, &x, l, &quad)?.value)?;
            let err = (engine - closed).abs();
            max_err = max_err.max(err);
            rows.push(vec![n.to_string(), num(l), num(t), num(closed), num(engine), num(err)]);
        }
    }
    let mut m = meta("ball-oracle", common, &quad);
    m.extra.push(("max_abs_error".into(), num(max_err)));
    write_csv(open(common.output.as_deref())?, &m, &columns, &rows)
}

#[allow(clippy::too_many_arguments)]
fn run_sweep(
    family: Family,
    params: &[f64],
    lambdas: &[f64],
    k: u32,
    points: &str,
    starts: usize,
    with_asphericity: bool,
    svg: Option<PathBuf>,
    rings: &RingArgs,
    common: &Common,
) -> Result<(), CliError> {
    let cloud = parse_cloud(points)?;
    let dim = match family {
        Family::StarCos => 2,
        Family::ParallelBody => cloud[0].len(),
    };
    let quad = rule(dim, common)?;
    let search = ring_search(rings)?;
    let make = |p: f64| -> Result<Shape, ShapeError> {
        match family {
            Family::StarCos => star_cos(k, p, STAR_SAMPLES),
            Family::ParallelBody => Shape::parallel_body(&cloud, p),
        }
    };
    let config = CenterSearchConfig { starts, seed: common.seed, ..CenterSearchConfig::new(0.0) };
    let rows = uniqueness_sweep(make, params, lambdas, &config, with_asphericity.then_some(&search), &quad)?;

    let mut columns: Vec<String> = ["param", "lambda", "n_centers"].map(String::from).into();
    columns.extend(coord_columns("x", dim));
    columns.extend(["vhat", "asphericity"].map(String::from));
    let mut table = Vec::new();
    for row in &rows {
        for c in &row.centers {
            let mut line = vec![num(row.parameter), num(row.lambda), row.n_centers.to_string()];
            line.extend(c.point.iter().map(|&v| num(v)));
            line.push(num(c.v_hat));
            line.push(opt_num(row.asphericity));
            table.push(line);
        }
    }
    let mut m = meta("sweep", common, &quad);
    let family_name = match family {
        Family::StarCos => format!("star-cos k={k}"),
        Family::ParallelBody => format!("parallel-body points={points}"),
    };
    m.extra.push(("family".into(), family_name));
    m.extra.push(("starts".into(), starts.to_string()));
    if with_asphericity {
        m.extra.push(("grid".into(), search.grid_resolution.to_string()));
    }
    write_csv(open(common.output.as_deref())?, &m, &columns, &table)?;

    let svg_path = svg.or_else(|| common.output.as_deref().map(|p: &Path| p.with_extension("svg")));
    if let Some(path) = svg_path {
        let count = |i: usize, j: usize| rows[i * lambdas.len() + j].n_centers;
        let body = heatmap_svg(params, lambdas, count);
        std::fs::write(&path, body).map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}
