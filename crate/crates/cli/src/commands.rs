use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use cubic_genus::acceptance::{self, Status};
use cubic_genus::critical;
use cubic_genus::equilibrium;
use cubic_genus::exact::{bigfloat::parse_float, Precision, RationalRepr, TruncatedSeries};
use cubic_genus::finite_n::{self, ContourConfig, ValidationOptions};
use cubic_genus::hierarchy::StringHierarchy;
use cubic_genus::parallel::Execution;
use cubic_genus::toda::GenusCoeffTable;
use cubic_genus::wick;
use rug::Float;
use serde::Serialize;

use crate::output::{computation, invalid, rational_cell, repr, Document, Failure};
use crate::{Command, Common};

const MAX_GENUS: u32 = 8;
const MAX_J: u32 = 400;
const MAX_HORIZON: usize = 400;
const MAX_N: usize = 200;

fn execution(common: &Common) -> Result<Execution, Failure> {
    match common.workers {
        Some(0) => Err(invalid("--workers must be at least 1")),
        Some(n) => Ok(Execution::with_workers(n)),
        None => Ok(Execution::Auto),
    }
}

fn precision(digits: u32) -> Result<Precision, Failure> {
    if !(10..=5000).contains(&digits) {
        return Err(invalid(format!("precision {digits} outside 10..=5000 digits")));
    }
    Ok(Precision(digits))
}

fn parse_u(s: &str, p: Precision) -> Result<Float, Failure> {
    let bits = p.with_guard(10).bits();
    let u = match s.trim() {
        "uc" | "u_c" | "critical" => equilibrium::u_critical(bits),
        t => parse_float(t, bits).ok_or_else(|| invalid(format!("cannot parse u = {s:?}")))?,
    };
    if u.is_sign_negative() && !u.is_zero() {
        return Err(invalid(format!("u = {s} is negative")));
    }
    Ok(u)
}

pub fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Expand { genus, max_j, common } => expand(genus, max_j, &common),
        Command::Hierarchy { max_k, horizon, common } => hierarchy(max_k, horizon, &common),
        Command::Equilibrium { u, precision: p, samples, common } => equilibrium(&u, p, samples, &common),
        Command::Critical { max_genus, precision: p, common } => critical(max_genus, p, &common),
        Command::Oracle { vertices, common } => oracle(vertices, &common),
        Command::Validate { n, u, precision: p, alpha, toda, toda_step, common } => {
            validate(n, &u, p, &alpha, toda.then_some(toda_step), &common)
        }
        Command::Reproduce { skip, common } => reproduce(skip, &common),
    }
}

#[derive(Serialize)]
struct ExpandRow {
    g: u32,
    j: u32,
    power: u32,
    f: RationalRepr,
    #[serde(rename = "F_coeff")]
    f_coeff: RationalRepr,
}

fn expand(genus: u32, max_j: u32, common: &Common) -> Result<(), Failure> {
    if genus > MAX_GENUS {
        return Err(invalid(format!("--genus must be at most {MAX_GENUS}")));
    }
    if max_j == 0 || max_j > MAX_J {
        return Err(invalid(format!("--max-j must lie in 1..={MAX_J}")));
    }
    let table = GenusCoeffTable::from_pipeline(genus, max_j).map_err(computation("genus table"))?;
    let mut rows = Vec::new();
    let mut csv = Vec::new();
    let mut pretty = format!("F^({}) = ", 2 * genus);
    for j in 1..=max_j {
        let f = table.f(genus, j).cloned().unwrap_or_default();
        let c = table.series_coeff(genus, j).unwrap_or_default();
        csv.push(vec![genus.to_string(), j.to_string(), rational_cell(&f), rational_cell(&c)]);
        if j > 1 {
            pretty.push_str(" + ");
        }
        let _ = write!(pretty, "({c}) u^{}", 2 * j);
        rows.push(ExpandRow { g: genus, j, power: 2 * j, f: repr(&f), f_coeff: repr(&c) });
    }
    let _ = writeln!(pretty, " + O(u^{})", 2 * max_j + 2);
    Document { json: rows, csv: Some((vec!["g", "j", "f", "F_coeff"], csv)), pretty }.emit(common)
}

#[derive(Serialize)]
struct SeriesJson {
    k: usize,
    /// Power of w of the first coefficient.
    offset: i64,
    coeffs: Vec<RationalRepr>,
}

#[derive(Serialize)]
struct HierarchyJson {
    max_k: usize,
    horizon: usize,
    g_hat: Vec<SeriesJson>,
    b_hat: Vec<SeriesJson>,
}

fn hierarchy(max_k: usize, horizon: usize, common: &Common) -> Result<(), Failure> {
    if max_k > MAX_GENUS as usize {
        return Err(invalid(format!("--max-k must be at most {MAX_GENUS}")));
    }
    if horizon == 0 || horizon > MAX_HORIZON {
        return Err(invalid(format!("--horizon must lie in 1..={MAX_HORIZON}")));
    }
    let h = StringHierarchy::compute(max_k, horizon).map_err(computation("string hierarchy"))?;
    let series = |k: usize, s: &TruncatedSeries| SeriesJson { k, offset: s.offset(), coeffs: s.coeffs().iter().map(repr).collect() };
    let mut csv = Vec::new();
    let mut pretty = String::new();
    for (name, list) in [("g_hat", &h.g_hat), ("b_hat", &h.b_hat)] {
        for (k, s) in list.iter().enumerate() {
            let _ = write!(pretty, "{name}_{}(w) =", 2 * k);
            let mut first = true;
            for (e, c) in s.terms() {
                csv.push(vec![name.to_string(), k.to_string(), e.to_string(), rational_cell(c)]);
                if *c != 0 {
                    let _ = write!(pretty, "{}({c}) w^{e}", if first { " " } else { " + " });
                    first = false;
                }
            }
            pretty.push('\n');
        }
    }
    let json = HierarchyJson {
        max_k,
        horizon: h.horizon,
        g_hat: h.g_hat.iter().enumerate().map(|(k, s)| series(k, s)).collect(),
        b_hat: h.b_hat.iter().enumerate().map(|(k, s)| series(k, s)).collect(),
    };
    Document { json, csv: Some((vec!["series", "k", "power", "coeff"], csv)), pretty }.emit(common)
}

#[derive(Serialize)]
struct EquilibriumJson {
    endpoints: equilibrium::EquilibriumData,
    normalization: cubic_genus::exact::BigFloat,
    phi: Option<equilibrium::PhiReport>,
}

fn equilibrium(u: &str, digits: u32, samples: usize, common: &Common) -> Result<(), Failure> {
    let p = precision(digits)?;
    let u = parse_u(u, p)?;
    let eq = equilibrium::solve_endpoints(&u, p).map_err(|e| match e {
        equilibrium::EquilibriumError::Supercritical(_) | equilibrium::EquilibriumError::Negative(_) => invalid(e.to_string()),
        other => Failure::Computation(other.to_string()),
    })?;
    let norm = equilibrium::normalization(&eq);
    let phi = if u.is_zero() || eq.critical || samples == 0 { None } else { Some(equilibrium::phi_check(&eq, samples).map_err(computation("φ check"))?) };
    let mut pretty = String::new();
    let _ = writeln!(pretty, "u  = {}", eq.u);
    let _ = writeln!(pretty, "a  = {}\nb  = {}\nz0 = {}", eq.a, eq.b, eq.z0);
    let _ = writeln!(pretty, "critical: {}", eq.critical);
    let _ = writeln!(pretty, "∫ϱ = {}", cubic_genus::exact::bigfloat::to_decimal(&norm, digits));
    if let Some(phi) = &phi {
        let _ = writeln!(pretty, "φ-inequalities hold: {} (κ/u = {})", phi.positive, phi.kappa_over_u);
    }
    let json = EquilibriumJson { endpoints: eq, normalization: cubic_genus::exact::BigFloat::at(norm, p), phi };
    let csv = vec![
        vec!["u".into(), json.endpoints.u.to_decimal()],
        vec!["x".into(), json.endpoints.x.to_decimal()],
        vec!["y".into(), json.endpoints.y.to_decimal()],
        vec!["a".into(), json.endpoints.a.to_decimal()],
        vec!["b".into(), json.endpoints.b.to_decimal()],
        vec!["z0".into(), json.endpoints.z0.to_decimal()],
    ];
    Document { json, csv: Some((vec!["quantity", "value"], csv)), pretty }.emit(common)
}

#[derive(Serialize)]
struct KJson {
    g: usize,
    exact: critical::Surd,
    display: String,
    value: cubic_genus::exact::BigFloat,
}

#[derive(Serialize)]
struct CriticalJson {
    /// Components on 1, β, β², β³ with β⁴ = 12.
    c: Vec<cubic_genus::exact::AlgebraicNumber>,
    d: Vec<cubic_genus::exact::AlgebraicNumber>,
    k: Vec<KJson>,
    painleve: critical::PainleveReport,
}

fn critical(max_genus: usize, digits: u32, common: &Common) -> Result<(), Failure> {
    if max_genus == 0 || max_genus > 40 {
        return Err(invalid("--max-genus must lie in 1..=40"));
    }
    let p = precision(digits)?;
    let cc = critical::run_c_recursion(max_genus);
    let mut k = Vec::new();
    let mut pretty = String::new();
    for g in 0..=max_genus {
        let exact = critical::k_exact(&cc, g).map_err(computation("K"))?;
        let value = critical::compute_k(&cc, g, p).map_err(computation("K"))?;
        let _ = writeln!(pretty, "C_{} = {}    K_{} = {} = {}", 2 * g, cc.c[g], 2 * g, exact, value);
        k.push(KJson { g, display: exact.to_string(), exact, value });
    }
    let painleve = critical::painleve_check(&cc, max_genus, p).map_err(computation("Painlevé check"))?;
    let _ = writeln!(
        pretty,
        "Painlevé I: q = {} (q·8μ = {}), consistent through genus {}: {}",
        painleve.q, painleve.q_relative_to_inv_8mu, max_genus, painleve.consistent && painleve.residuals_zero
    );
    let csv = (0..=max_genus)
        .map(|g| {
            let comps = cc.c[g].components();
            let mut row = vec![g.to_string()];
            row.extend(comps.iter().map(rational_cell));
            row.push(k[g].value.to_decimal());
            row
        })
        .collect();
    let json = CriticalJson { c: cc.c, d: cc.d, k, painleve };
    Document { json, csv: Some((vec!["g", "C_1", "C_beta", "C_beta2", "C_beta3", "K"], csv)), pretty }.emit(common)
}

#[derive(Serialize)]
struct OracleJson {
    p: usize,
    total: u64,
    connected: BTreeMap<String, u64>,
    disconnected: u64,
    elapsed_ms: u128,
}

fn oracle(p: usize, common: &Common) -> Result<(), Failure> {
    if p == 0 || p % 2 == 1 || p > wick::MAX_VERTICES {
        return Err(invalid(format!("--vertices must be even and in 2..={}", wick::MAX_VERTICES)));
    }
    let exec = execution(common)?;
    let start = Instant::now();
    let tally = wick::enumerate(p, exec).map_err(computation("enumeration"))?;
    let elapsed_ms = start.elapsed().as_millis();
    let connected: BTreeMap<String, u64> = tally.connected_by_genus.iter().map(|(g, c)| (g.to_string(), *c)).collect();
    let mut pretty = format!("p = {p}: {} pairings\n", tally.total_pairings);
    for (g, c) in &tally.connected_by_genus {
        let _ = writeln!(pretty, "  connected, genus {g}: {c}");
    }
    let _ = writeln!(pretty, "  disconnected: {}", tally.disconnected);
    let mut csv: Vec<Vec<String>> = tally.connected_by_genus.iter().map(|(g, c)| vec![g.to_string(), c.to_string()]).collect();
    csv.push(vec!["disconnected".into(), tally.disconnected.to_string()]);
    let json = OracleJson { p, total: tally.total_pairings, connected, disconnected: tally.disconnected, elapsed_ms };
    Document { json, csv: Some((vec!["genus", "count"], csv)), pretty }.emit(common)
}

fn parse_alpha(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || invalid(format!("--alpha expects re,im, got {s:?}"));
    let mut it = s.split(',').map(|x| x.trim().parse::<f64>());
    let re = it.next().ok_or_else(bad)?.map_err(|_| bad())?;
    let im = match it.next() {
        Some(v) => v.map_err(|_| bad())?,
        None => 0.0,
    };
    if it.next().is_some() || !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok((re, im))
}

fn validate(n: usize, u: &str, digits: u32, alpha: &str, toda: Option<f64>, common: &Common) -> Result<(), Failure> {
    if n == 0 || n > MAX_N {
        return Err(invalid(format!("--N must lie in 1..={MAX_N}")));
    }
    let p = precision(digits)?;
    let u = parse_u(u, p)?;
    if let Some(h) = toda {
        if !(h > 0.0 && h < 0.1) {
            return Err(invalid("--toda-step must lie in (0, 0.1)"));
        }
        if u.is_zero() {
            return Err(invalid("the Toda check needs u > 0"));
        }
    }
    let cfg = ContourConfig { alpha: parse_alpha(alpha)?, execution: execution(common)?, ..ContourConfig::with_precision(p) };
    cfg.validate(&u).map_err(|e| invalid(e.to_string()))?;
    let opts = ValidationOptions { n_max: None, toda_step: toda, orthogonality_top: None };
    let rep = finite_n::validate(&cfg, &u, n, &opts).map_err(computation("finite-N validation"))?;
    let mut pretty = String::new();
    let _ = writeln!(pretty, "N = {n}, u = {}, working digits {}", rep.u, rep.working_digits);
    let _ = writeln!(pretty, "string window {:?}: max residual {}", rep.string_window, rep.max_string_residual);
    let _ = writeln!(pretty, "route gaps: γ² {}, β {}", rep.route_gap_gamma2, rep.route_gap_beta);
    if let Some(t) = &rep.toda {
        let _ = writeln!(pretty, "Toda residual at h = {}: {}", t.step, t.residual);
    }
    let csv = (0..rep.gamma2.len())
        .map(|i| vec![i.to_string(), rep.gamma2[i].re.clone(), rep.gamma2[i].im.clone(), rep.beta[i].re.clone(), rep.beta[i].im.clone()])
        .collect();
    Document { json: rep, csv: Some((vec!["n", "gamma2_re", "gamma2_im", "beta_re", "beta_im"], csv)), pretty }.emit(common)
}

fn reproduce(skip: Vec<String>, common: &Common) -> Result<(), Failure> {
    let known: Vec<&str> = acceptance::CRITERIA.iter().map(|c| c.key).chain(["oracle6"]).collect();
    if let Some(bad) = skip.iter().find(|s| !known.contains(&s.as_str())) {
        return Err(invalid(format!("unknown criterion {bad:?}; known: {}", known.join(", "))));
    }
    let opts = acceptance::Options { skip, execution: execution(common)? };
    let mut outcomes = Vec::new();
    let mut pretty = String::new();
    let live = common.output.is_none() && common.format == crate::Format::Pretty;
    for c in acceptance::CRITERIA.iter() {
        let o = acceptance::run(c, &opts);
        if live {
            println!("{}", o.line());
        } else {
            eprintln!("{}", o.line());
            let _ = writeln!(pretty, "{}", o.line());
        }
        outcomes.push(o);
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| o.status == Status::Fail).map(|o| o.id).collect();
    let passed = outcomes.iter().filter(|o| o.status == Status::Pass).count();
    let summary = format!("{passed} passed, {} failed, {} skipped", failed.len(), outcomes.len() - passed - failed.len());
    if live {
        println!("{summary}");
    } else {
        let _ = writeln!(pretty, "{summary}");
        let csv = outcomes
            .iter()
            .map(|o| vec![o.id.to_string(), o.key.to_string(), format!("{:?}", o.status).to_lowercase(), o.elapsed_ms.to_string()])
            .collect();
        Document { json: &outcomes, csv: Some((vec!["id", "key", "status", "elapsed_ms"], csv)), pretty }.emit(common)?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Acceptance(failed))
    }
}
