use std::path::PathBuf;

use qasym::asymptotics::{left_tail_estimate, oscillatory_estimate, right_tail_estimate, AsymptoticEstimate, WindowOptions};
use qasym::numerics::{make_context, parse_decimal, QContext, ScaledReal};
use qasym::partition::{
    convergence_csv_line, convergence_table, partition_exact as exact, predicted_scaled, Method, Parity,
    PartitionSpec, CONVERGENCE_CSV_HEADER,
};
use qasym::qpoly::{
    differentiate, eval_pnj, eval_poly, q_hermite_eval, q_laguerre, stieltjes_wigert, CoefficientFamily,
    QHermiteFamily, QLaguerreFamily, QPolynomial, StieltjesWigertFamily,
};
use qasym::qseries::{x_jm, x_jm_abs, TailPolicy};
use qasym::selftest::{run_selftest, SelftestConfig, MIN_INSTANCES};
use qasym::zeros::{
    hermite_zeros, laguerre_zeros, three_decimal, three_decimal_list, sw_zeros, symmetry_products, zeros_csv_lines,
    ZEROS_CSV_HEADER,
};
use rug::{Float, Rational};

use crate::output::{write_file, Format, Report, RunInfo};
use crate::{
    AsymCheckArgs, CliError, Family, GlobalArgs, PartitionConvergeArgs, PartitionExactArgs, PartitionSizeArgs,
    PolyEvalArgs, PolyZerosArgs, RegimeArg, SelftestArgs, ThetaArgs,
};

/// Significant digits in tables; single values use 16.
const TABLE_DIGITS: usize = 30;

fn context(g: &GlobalArgs) -> Result<QContext, CliError> {
    Ok(make_context(&g.q, g.precision_bits, g.tail_tol)?)
}

fn info(g: &GlobalArgs, subcommand: &str, params: Vec<(&'static str, String)>) -> RunInfo {
    RunInfo {
        subcommand: subcommand.to_string(),
        q: g.q.trim().to_string(),
        precision_bits: g.precision_bits,
        tail_tol: g.tail_tol,
        params,
    }
}

fn emit(g: &GlobalArgs, info: &RunInfo, report: &Report, default: Format) -> Result<(), CliError> {
    let format = g.format.unwrap_or(default);
    let text = report.render(info, format, g.output.is_some());
    match &g.output {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn value16(v: &ScaledReal) -> String {
    if v.is_zero() {
        "0e0".into()
    } else {
        v.to_sci_string(16)
    }
}

fn sci(v: &ScaledReal, digits: usize) -> String {
    if v.is_zero() {
        "0e0".into()
    } else {
        v.to_sci_string(digits)
    }
}

fn single_value(columns: &[&str], row: Vec<String>, shown: String) -> Report {
    let mut r = Report::new(columns);
    r.rows.push(row);
    r.text.push(shown);
    r
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Sw => "sw",
        Family::Qlaguerre => "qlaguerre",
        Family::Qhermite => "qhermite",
    }
}

fn alpha_of(literal: &str) -> Result<Rational, CliError> {
    Ok(parse_decimal(literal)?)
}

fn family_params(family: Family, n: usize, alpha: &str) -> Vec<(&'static str, String)> {
    let mut p = vec![("family", family_name(family).to_string()), ("n", n.to_string())];
    if family == Family::Qlaguerre {
        p.push(("alpha", alpha.trim().to_string()));
    }
    p
}

fn family_poly(ctx: &QContext, family: Family, n: usize, alpha: &str) -> Result<QPolynomial, CliError> {
    match family {
        Family::Sw => Ok(stieltjes_wigert(ctx, n)),
        Family::Qlaguerre => Ok(q_laguerre(ctx, n, &alpha_of(alpha)?)?),
        Family::Qhermite => Err(CliError::Usage("qhermite has no explicit coefficient form in x".into())),
    }
}

pub fn theta(g: &GlobalArgs, a: &ThetaArgs) -> Result<(), CliError> {
    let ctx = context(g)?;
    let z = ctx.parse(&a.z)?;
    let policy = TailPolicy::from_context(&ctx);
    let value = x_jm(&ctx, a.j, a.m, &z, &policy)?;
    let scale = x_jm_abs(&ctx, a.j, a.m, &z, &policy)?;
    // anything below the truncation tolerance relative to the terms is noise
    let shown = if value.abs() <= scale.clone() * ctx.real(ctx.tail_tol()) {
        "0e0".to_string()
    } else {
        value16(&value)
    };
    let run = info(
        g,
        "theta",
        vec![("z", a.z.trim().to_string()), ("j", a.j.to_string()), ("m", a.m.to_string())],
    );
    let report = single_value(
        &["j", "m", "z", "value", "abs_sum"],
        vec![
            a.j.to_string(),
            a.m.to_string(),
            a.z.trim().to_string(),
            sci(&value, TABLE_DIGITS),
            sci(&scale, TABLE_DIGITS),
        ],
        shown,
    );
    emit(g, &run, &report, Format::PaperText)
}

pub fn poly_eval(g: &GlobalArgs, a: &PolyEvalArgs) -> Result<(), CliError> {
    let ctx = context(g)?;
    let x = ctx.parse(&a.x)?;
    let value = match a.family {
        Family::Qhermite => {
            if a.j != 0 {
                return Err(CliError::Usage("qhermite evaluation supports only --j 0".into()));
            }
            let xi = Float::with_val(ctx.bits() + 32, x.to_float().asinh_ref());
            q_hermite_eval(&ctx, a.n, &ScaledReal::from_float(xi))
        }
        family => {
            let p = family_poly(&ctx, family, a.n, &a.alpha)?;
            eval_poly(&ctx, &differentiate(&p, a.j), &x) * x.powi(a.j as i64)
        }
    };
    let mut params = family_params(a.family, a.n, &a.alpha);
    params.push(("x", a.x.trim().to_string()));
    params.push(("j", a.j.to_string()));
    let run = info(g, "poly eval", params);
    let report = single_value(
        &["family", "n", "x", "j", "value"],
        vec![
            family_name(a.family).into(),
            a.n.to_string(),
            a.x.trim().to_string(),
            a.j.to_string(),
            sci(&value, TABLE_DIGITS),
        ],
        value16(&value),
    );
    emit(g, &run, &report, Format::PaperText)
}

pub fn poly_zeros(g: &GlobalArgs, a: &PolyZerosArgs) -> Result<(), CliError> {
    let ctx = context(g)?;
    let mut params = family_params(a.family, a.n, &a.alpha);
    if a.paper_table {
        params.push(("paper_table", "true".into()));
    }
    let run = info(g, "poly zeros", params);
    let n = a.n;

    if a.family == Family::Qhermite {
        if a.paper_table {
            return Err(CliError::Usage("--paper-table needs the sw or qlaguerre family".into()));
        }
        let xis = hermite_zeros(&ctx, n)?;
        let mut report = Report::new(&["k", "xi_k"]);
        for (k, xi) in xis.iter().enumerate() {
            report.rows.push(vec![(k + 1).to_string(), sci(xi, TABLE_DIGITS)]);
            report.text.push(value16(xi));
        }
        return emit(g, &run, &report, Format::Csv);
    }

    let (zeros, exponent) = match a.family {
        Family::Sw => (sw_zeros(&ctx, n)?, Rational::from(2 * n as i64 + 1)),
        _ => {
            let alpha = alpha_of(&a.alpha)?;
            let e = Rational::from(2 * n as i64) + Rational::from(2 * &alpha);
            (laguerre_zeros(&ctx, n, &alpha)?, e)
        }
    };
    let products = symmetry_products(&ctx, &zeros, &exponent);

    if a.paper_table {
        // the published lists stop at the last genuine pair
        let pairs = &products[..n / 2];
        let mut report = Report::new(&["k", "normalized_product"]);
        for (k, s) in pairs.iter().enumerate() {
            report.rows.push(vec![(k + 1).to_string(), three_decimal(s)]);
        }
        report.text.push(three_decimal_list(pairs));
        return emit(g, &run, &report, Format::PaperText);
    }

    let mut report = Report::new(&ZEROS_CSV_HEADER.split(',').collect::<Vec<_>>());
    for line in zeros_csv_lines(&zeros, &products, TABLE_DIGITS) {
        report.rows.push(line.split(',').map(str::to_string).collect());
    }
    report.text = zeros.zeros.iter().map(value16).collect();
    emit(g, &run, &report, Format::Csv)
}

fn spec_of(s: &PartitionSizeArgs) -> Result<PartitionSpec, CliError> {
    Ok(PartitionSpec::new(s.n, s.l)?)
}

pub fn partition_exact(g: &GlobalArgs, a: &PartitionExactArgs) -> Result<(), CliError> {
    let ctx = context(g)?;
    let method: Method = a.method.parse()?;
    let spec = spec_of(&a.size)?;
    let r = exact(&ctx, spec, method)?;
    let run = info(
        g,
        "partition exact",
        vec![("N", a.size.n.to_string()), ("L", a.size.l.to_string()), ("method", method.to_string())],
    );
    let digits = (r.verified_digits as usize).clamp(1, TABLE_DIGITS);
    let report = single_value(
        &["N", "L", "method", "raw", "scaled", "verified_digits", "escalations"],
        vec![
            a.size.n.to_string(),
            a.size.l.to_string(),
            method.to_string(),
            sci(&r.raw, digits),
            sci(&r.scaled, digits),
            r.verified_digits.to_string(),
            r.escalations.to_string(),
        ],
        value16(&r.raw),
    );
    emit(g, &run, &report, Format::PaperText)
}

pub fn partition_predict(g: &GlobalArgs, a: &PartitionSizeArgs) -> Result<(), CliError> {
    let ctx = context(g)?;
    let spec = spec_of(a)?;
    let v = predicted_scaled(&ctx, spec)?;
    let run = info(g, "partition predict", vec![("N", a.n.to_string()), ("L", a.l.to_string())]);
    let report = single_value(
        &["N", "L", "parity", "predicted_scaled"],
        vec![a.n.to_string(), a.l.to_string(), spec.parity().to_string(), sci(&v, TABLE_DIGITS)],
        value16(&v),
    );
    emit(g, &run, &report, Format::PaperText)
}

fn dat_path(g: &GlobalArgs, a: &PartitionConvergeArgs) -> Result<Option<PathBuf>, CliError> {
    if let Some(p) = &a.dat {
        return Ok(Some(p.clone()));
    }
    match &g.output {
        Some(out) => {
            let dat = out.with_extension("dat");
            if dat == *out {
                return Err(CliError::Usage("--output already ends in .dat; choose the plot path with --dat".into()));
            }
            Ok(Some(dat))
        }
        None => Ok(None),
    }
}

pub fn partition_converge(g: &GlobalArgs, a: &PartitionConvergeArgs) -> Result<(), CliError> {
    if a.step == 0 {
        return Err(CliError::Usage("--step must be at least 1".into()));
    }
    if a.n_from == 0 || a.n_to < a.n_from {
        return Err(CliError::Usage(format!("need 1 <= --N-from <= --N-to, got {}..{}", a.n_from, a.n_to)));
    }
    let ctx = context(g)?;
    let ns: Vec<usize> = (a.n_from..=a.n_to).step_by(a.step).collect();
    let rows = convergence_table(&ctx, a.l, &ns)?;
    let run = info(
        g,
        "partition converge",
        vec![
            ("L", a.l.to_string()),
            ("N-from", a.n_from.to_string()),
            ("N-to", a.n_to.to_string()),
            ("step", a.step.to_string()),
        ],
    );
    let mut report = Report::new(&CONVERGENCE_CSV_HEADER.split(',').collect::<Vec<_>>());
    report.text.push(CONVERGENCE_CSV_HEADER.to_string());
    for row in &rows {
        let line = convergence_csv_line(row);
        report.rows.push(line.split(',').map(str::to_string).collect());
        report.text.push(line);
    }

    if let Some(path) = dat_path(g, a)? {
        let mut dat = run.comment_line();
        dat.push('\n');
        for (i, parity) in [Parity::Even, Parity::Odd].into_iter().enumerate() {
            if i > 0 {
                dat.push_str("\n\n");
            }
            dat.push_str(&format!("# parity={parity}\n# N |ratio-1|\n"));
            for row in rows.iter().filter(|r| r.parity == parity) {
                dat.push_str(&format!("{} {}\n", row.n, sci(&row.abs_err, 16)));
            }
        }
        write_file(&path, &dat)?;
    }
    emit(g, &run, &report, Format::Csv)
}

fn family_object(family: Family, alpha: &str) -> Result<Box<dyn CoefficientFamily>, CliError> {
    Ok(match family {
        Family::Sw => Box::new(StieltjesWigertFamily),
        Family::Qhermite => Box::new(QHermiteFamily),
        Family::Qlaguerre => Box::new(QLaguerreFamily::new(alpha_of(alpha)?)?),
    })
}

pub fn asym_check(g: &GlobalArgs, a: &AsymCheckArgs) -> Result<(), CliError> {
    let ctx = context(g)?;
    let family = family_object(a.family, &a.alpha)?;
    let y = ctx.parse(&a.y)?;
    let options = WindowOptions {
        delta: a.delta,
        radius: None,
    };
    let n = a.n;
    let tail_point = |t: f64| ctx.q_power_real(&Float::with_val(ctx.bits(), n as f64 * t)) * &y;
    let need_t = || a.t.ok_or_else(|| CliError::Usage("this regime needs --t".into()));
    let (est, x, shape): (AsymptoticEstimate, ScaledReal, (&str, String)) = match a.regime {
        RegimeArg::Osc => {
            let l = a.l.ok_or_else(|| CliError::Usage("the oscillatory regime needs --l".into()))?;
            let est = oscillatory_estimate(&ctx, family.as_ref(), n, a.j, l, &y, options)?;
            let x = ctx.q_half_power(-4 * est.window.m) * &y;
            (est, x, ("l", l.to_string()))
        }
        RegimeArg::Right => {
            let t = need_t()?;
            let lim = family.right_limit(&ctx);
            let est = right_tail_estimate(&ctx, family.as_ref(), &lim, n, a.j, t, &y, options)?;
            (est, tail_point(t), ("t", t.to_string()))
        }
        RegimeArg::Left => {
            let t = need_t()?;
            let lim = family.left_limit(&ctx);
            let est = left_tail_estimate(&ctx, family.as_ref(), &lim, n, a.j, t, &y, options)?;
            (est, tail_point(t), ("t", t.to_string()))
        }
    };
    let exact_value = eval_pnj(&ctx, family.as_ref(), n, a.j as usize, &x)?;
    let error = (&exact_value - &est.value).abs();
    let within = error <= est.error_bound;

    let mut params = family_params(a.family, n, &a.alpha);
    params.push(("j", a.j.to_string()));
    params.push(("regime", est.regime.as_str().to_string()));
    params.push(("y", a.y.trim().to_string()));
    params.push(shape);
    if let Some(d) = a.delta {
        params.push(("delta", d.to_string()));
    }
    let run = info(g, "asym check", params);
    let mut report = Report::new(&[
        "regime",
        "n",
        "j",
        "x",
        "exact",
        "estimate",
        "abs_error",
        "error_bound",
        "relative_bound",
        "window_d",
        "within_bound",
    ]);
    report.rows.push(vec![
        est.regime.as_str().into(),
        n.to_string(),
        a.j.to_string(),
        sci(&x, TABLE_DIGITS),
        sci(&exact_value, TABLE_DIGITS),
        sci(&est.value, TABLE_DIGITS),
        sci(&error, 6),
        sci(&est.error_bound, 6),
        sci(&est.relative_bound(), 6),
        est.window.d.to_string(),
        within.to_string(),
    ]);
    report.text = vec![
        format!("exact     {}", value16(&exact_value)),
        format!("estimate  {}", value16(&est.value)),
        format!("error     {}", sci(&error, 6)),
        format!("bound     {}", sci(&est.error_bound, 6)),
        format!("within    {within}"),
    ];
    emit(g, &run, &report, Format::PaperText)?;
    if within {
        Ok(())
    } else {
        Err(CliError::CheckFailed("estimate error exceeds the reported bound".into()))
    }
}

pub fn selftest(g: &GlobalArgs, a: &SelftestArgs) -> Result<(), CliError> {
    if a.instances < MIN_INSTANCES {
        return Err(CliError::Usage(format!("--instances must be at least {MIN_INSTANCES}")));
    }
    // validates the precision and tolerance flags
    context(g)?;
    let cfg = SelftestConfig {
        seed: a.seed,
        instances: a.instances,
        bits: g.precision_bits,
        tail_tol: g.tail_tol,
    };
    let reports = run_selftest(&cfg)?;
    let run = info(
        g,
        "selftest",
        vec![("seed", a.seed.to_string()), ("instances", a.instances.to_string())],
    );
    let mut report = Report::new(&["identity", "instances", "worst_error", "tolerance", "passed"]);
    for r in &reports {
        report.rows.push(vec![
            r.name.to_string(),
            r.instances.to_string(),
            format!("{:.3e}", r.worst_error),
            format!("{:.1e}", r.tolerance),
            r.passed().to_string(),
        ]);
        report.text.push(r.summary_line());
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    report.text.push(format!("selftest: {passed}/{} identities passed", reports.len()));
    emit(g, &run, &report, Format::PaperText)?;
    if passed == reports.len() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!("{} identities failed", reports.len() - passed)))
    }
}
