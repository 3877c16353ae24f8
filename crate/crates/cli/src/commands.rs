use num_complex::Complex64;
use pompeiu_core::acceptance::run_suite;
use pompeiu_core::chi_transform::{
    chi_ft, chi_ft_numeric, conjecture6_integral, factorization_check_with, spherical_zero_scan, ComplexDirection,
    QuadratureBudget, ScanParams,
};
use pompeiu_core::overdetermined::{derive_spherical_zero, residual_check, solve_ball, to_conjecture5};
use pompeiu_core::pompeiu_fields::{
    dbar_integral, eval_field, morera_contour, two_radii_test, verify_pompeiu, wirtinger_residual, CounterexampleField,
    PlanarGrid,
};
use pompeiu_core::symmetry::sphere_decision;
use pompeiu_core::{random_motion, Domain, LabError, Report, SurfaceParametrization};
use serde_json::{json, Value};

use crate::output::{emit, Failure};
use crate::{BallArgs, Cli, Command, Common, FieldArgs, Format, PlanarPreset};

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn load_domain(common: &Common) -> Result<Option<(Domain, Value)>, Failure> {
    let Some(spec) = &common.domain else { return Ok(None) };
    let text = if spec.trim_start().starts_with('{') {
        spec.clone()
    } else {
        std::fs::read_to_string(spec).map_err(|e| usage(format!("cannot read domain file {spec}: {e}")))?
    };
    let dom = Domain::from_json(&text)?;
    let echo: Value = serde_json::from_str(&dom.to_json())?;
    Ok(Some((dom, echo)))
}

fn require_domain(common: &Common) -> Result<(Domain, Value), Failure> {
    load_domain(common)?.ok_or_else(|| usage("--domain is required for this subcommand"))
}

fn positive(name: &str, v: f64) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("{name} must be a positive number, got {v}")))
    }
}

fn budget(common: &Common, default: QuadratureBudget) -> QuadratureBudget {
    let b = match common.budget {
        Some(n) => QuadratureBudget::grid(n),
        None => default,
    };
    match common.tol {
        Some(t) => b.with_tolerance(t),
        None => b,
    }
}

fn parse_point(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| usage(format!("bad coordinate {t:?} in --at {s}: {e}"))))
        .collect()
}

fn build_field(args: &FieldArgs, domain_dim: Option<usize>) -> Result<CounterexampleField, Failure> {
    let dim = args
        .dim
        .or(domain_dim)
        .ok_or_else(|| usage("--dim is required when no --domain is given"))?;
    let field = if args.coeffs.is_empty() {
        CounterexampleField::radial(args.b, dim)?
    } else {
        CounterexampleField::harmonics(args.b, dim, args.coeffs.clone())?
    };
    Ok(field)
}

/// JSON report plus an optional CSV rendering of the same result.
struct Outcome {
    command: &'static str,
    inputs: Value,
    results: Value,
    csv: Option<String>,
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let common = &cli.common;
    if let Some(t) = common.tol {
        positive("--tol", t)?;
    }
    let command = match (&cli.command, cli.check) {
        (Some(Command::Check), _) | (None, true) => return check(common),
        (Some(_), true) => return Err(usage("--check cannot be combined with a subcommand")),
        (Some(c), false) => c,
        (None, false) => return Err(usage("no subcommand given; see --help")),
    };
    let outcome = dispatch(command, common)?;
    let text = match common.format {
        Format::Json => Report::new(outcome.command, common.seed, outcome.inputs, outcome.results).to_json()?,
        Format::Csv => outcome
            .csv
            .ok_or_else(|| usage(format!("csv output is not available for {}; use --format json", outcome.command)))?,
    };
    emit(common.out.as_deref(), &text)
}

fn check(common: &Common) -> Result<(), Failure> {
    if common.format == Format::Csv {
        return Err(usage("the acceptance report is JSON only"));
    }
    let suite = run_suite(common.seed);
    for c in &suite.criteria {
        println!("{}", c.summary_line());
        if let Some(e) = &c.error {
            println!("    error: {e}");
        }
        for chk in c.checks.iter().filter(|k| !k.passed) {
            println!("    {}: {:e} ({:?} {:e})", chk.label, chk.value, chk.relation, chk.limit);
        }
    }
    println!("{}/{} criteria passed", suite.passed, suite.criteria.len());
    if let Some(path) = common.out.as_deref() {
        let report = Report::new("check", common.seed, json!({ "seed": common.seed }), suite);
        crate::output::write_atomic(path, &report.to_json()?)?;
    }
    Ok(())
}

fn dispatch(command: &Command, common: &Common) -> Result<Outcome, Failure> {
    Ok(match command {
        Command::Ft { xi } => {
            let (dom, echo) = require_domain(common)?;
            let value = chi_ft(&dom, xi)?;
            let numeric = match common.budget {
                Some(_) => Some(chi_ft_numeric(&dom, xi, &budget(common, QuadratureBudget::default()))?),
                None => None,
            };
            Outcome {
                command: "ft",
                inputs: json!({ "domain": echo, "xi": xi, "budget": common.budget }),
                results: json!({ "estimate": value, "numeric": numeric, "volume": dom.volume() }),
                csv: None,
            }
        }
        Command::Scan => {
            let (dom, echo) = require_domain(common)?;
            let mut params = ScanParams::new(
                positive("--kmax", common.kmax.unwrap_or(10.0))?,
                common.ksteps.unwrap_or(1000),
                common.dirs.unwrap_or(512),
                common.tol.unwrap_or(1e-8),
            );
            if let Some(n) = common.budget {
                params.budget = QuadratureBudget::grid(n);
            }
            let scan = spherical_zero_scan(&dom, &params)?;
            let shells: Vec<f64> = scan.candidate_shells.iter().map(|c| c.k).collect();
            Outcome {
                command: "scan",
                inputs: json!({
                    "domain": echo, "kmax": params.k_max, "ksteps": params.k_steps,
                    "dirs": params.dir_mesh, "tol": params.tol, "budget": common.budget,
                }),
                csv: Some(scan.to_csv()),
                results: json!({ "shells": shells, "scan": scan }),
            }
        }
        Command::Counterexample(args) => {
            let dom = load_domain(common)?;
            let field = build_field(args, dom.as_ref().map(|d| d.0.dim()))?;
            let mut values = Vec::new();
            for s in &args.at {
                let x = parse_point(s)?;
                let v: Complex64 = eval_field(&field, &x)?;
                values.push(json!({ "x": x, "value": v }));
            }
            Outcome {
                command: "counterexample",
                inputs: json!({ "b": args.b, "dim": field.dim, "coeffs": args.coeffs, "at": args.at }),
                results: json!({ "field": field, "values": values }),
                csv: None,
            }
        }
        Command::Verify { field, motions, bound } => {
            let (dom, echo) = require_domain(common)?;
            let f = build_field(field, Some(dom.dim()))?;
            if !(*bound >= 0.0) {
                return Err(usage("--bound must be >= 0"));
            }
            let b = budget(common, QuadratureBudget::default());
            let v = verify_pompeiu(&f, &dom, *motions, *bound, common.seed, &b)?;
            Outcome {
                command: "verify",
                inputs: json!({
                    "domain": echo, "b": field.b, "dim": f.dim, "coeffs": field.coeffs,
                    "motions": motions, "bound": bound, "budget": common.budget, "tol": common.tol,
                }),
                results: serde_json::to_value(&v)?,
                csv: None,
            }
        }
        Command::Overdet(args) => {
            let sol = solve_ball(positive("--a", args.a)?, args.j, args.n)?;
            let residuals = residual_check(&sol, 2001)?;
            let derivation = if args.n == 3 { Some(derive_spherical_zero(&sol, common.dirs.unwrap_or(64))?) } else { None };
            Outcome {
                command: "overdet",
                inputs: ball_inputs(args),
                csv: Some(sol.to_csv()),
                results: json!({ "solution": sol, "residuals": residuals, "spherical_zero": derivation }),
            }
        }
        Command::Conj5(args) => {
            let sol = solve_ball(positive("--a", args.a)?, args.j, args.n)?;
            let c5 = to_conjecture5(&sol);
            let mut csv = String::from("r,v\n");
            for (r, v) in &c5.profile {
                csv.push_str(&format!("{r:.17e},{v:.17e}\n"));
            }
            Outcome {
                command: "conj5",
                inputs: ball_inputs(args),
                results: serde_json::to_value(&c5)?,
                csv: Some(csv),
            }
        }
        Command::SphereTest { nodes } => {
            let (dom, echo) = require_domain(common)?;
            let mut surf = SurfaceParametrization::from_domain(&dom)?;
            match nodes.as_slice() {
                [] => {}
                [t] => surf = surf.with_nodes(*t, 1),
                [p, q] => surf = surf.with_nodes(*p, *q),
                _ => return Err(usage("--nodes takes one (curve) or two (surface) counts")),
            }
            let tol = positive("--tol", common.tol.unwrap_or(1e-6))?;
            let report = sphere_decision(&surf, tol)?;
            Outcome {
                command: "sphere-test",
                inputs: json!({ "domain": echo, "tol": tol, "nodes": nodes }),
                results: serde_json::to_value(&report)?,
                csv: None,
            }
        }
        Command::TwoRadii { r1, r2, zeros } => {
            let tol = common.tol.unwrap_or(1e-9);
            let report = two_radii_test(*r1, *r2, *zeros, tol)?;
            Outcome {
                command: "two-radii",
                inputs: json!({ "r1": r1, "r2": r2, "zeros": zeros, "tol": tol }),
                results: serde_json::to_value(&report)?,
                csv: None,
            }
        }
        Command::Morera { field, h, bound } => morera(common, *field, *h, *bound)?,
        Command::Conj6 { lambda, theta, k } => {
            let (dom, echo) = require_domain(common)?;
            let cd = ComplexDirection::new(*lambda, *theta, positive("--k", *k)?);
            let est = conjecture6_integral(&dom, &cd, &budget(common, QuadratureBudget::default()))?;
            Outcome {
                command: "conj6",
                inputs: json!({ "domain": echo, "lambda": lambda, "theta": theta, "k": k, "budget": common.budget }),
                results: serde_json::to_value(&est)?,
                csv: None,
            }
        }
        Command::Factor { kstar, probes } => {
            let (dom, echo) = require_domain(common)?;
            let b = budget(common, QuadratureBudget::grid(64));
            let report = factorization_check_with(&dom, positive("--kstar", *kstar)?, *probes, &b)?;
            Outcome {
                command: "factor",
                inputs: json!({ "domain": echo, "kstar": kstar, "probes": probes, "budget": common.budget }),
                results: serde_json::to_value(&report)?,
                csv: None,
            }
        }
        Command::Check => unreachable!("handled before dispatch"),
    })
}

fn ball_inputs(args: &BallArgs) -> Value {
    json!({ "a": args.a, "j": args.j, "n": args.n })
}

fn preset(p: PlanarPreset) -> fn(f64, f64) -> Complex64 {
    match p {
        PlanarPreset::Conj => |x, y| Complex64::new(x, -y),
        PlanarPreset::Exp => |x, y| Complex64::new(x, y).exp(),
        PlanarPreset::Abs2 => |x, y| Complex64::new(x * x + y * y, 0.0),
    }
}

fn morera(common: &Common, which: PlanarPreset, h: f64, bound: f64) -> Result<Outcome, Failure> {
    let (dom, echo) = require_domain(common)?;
    if dom.dim() != 2 {
        return Err(LabError::DimensionMismatch {
            expected: 2,
            got: dom.dim(),
            context: "morera needs a planar domain".into(),
        }
        .into());
    }
    let h = positive("--h", h)?;
    let nodes = common.budget.unwrap_or(512);
    let tol = positive("--tol", common.tol.unwrap_or(1e-6))?;
    let f = preset(which);
    let sigma = random_motion(common.seed, bound, 2)?;
    let moved = dom.apply_motion(&sigma)?;
    let (lo, hi) = moved.bounding_box();
    let cells = ((hi[0] - lo[0]) / h).ceil() * ((hi[1] - lo[1]) / h).ceil();
    if cells > 5e7 {
        return Err(usage(format!("--h {h} needs {cells:.0} lattice cells; use a coarser step")));
    }
    let grid = PlanarGrid::covering(f, [lo[0], lo[1]], [hi[0], hi[1]], h)?;
    let contour = morera_contour(&f, &dom, &sigma, nodes)?;
    let sampled = morera_contour(&grid, &dom, &sigma, nodes)?;
    let area = dbar_integral(&grid, &moved);
    let residual = wirtinger_residual(&grid, &moved);
    Ok(Outcome {
        command: "morera",
        inputs: json!({
            "domain": echo, "field": format!("{which:?}").to_lowercase(), "h": h,
            "bound": bound, "nodes": nodes, "tol": tol,
        }),
        results: json!({
            "motion": sigma,
            "contour": contour,
            "contour_from_grid": sampled,
            "dbar_area_integral": area,
            "green_gap": (contour - area).norm(),
            "wirtinger_residual": residual,
            "analytic": residual < tol,
        }),
        csv: None,
    })
}
