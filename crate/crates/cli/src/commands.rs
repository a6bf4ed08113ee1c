use clap::ValueEnum;
use involute::classify::{
    classify_walk, conjecture_search, exceptional_ladder, is_globally_reversible,
    least_band_count, params_from_mu_nu, top_right, SamplerConfig,
};
use involute::continuum::{
    discrete_convergence, eigen_residual, eigenvalue, fixed_point_residual, ContinuousWalk,
};
use involute::exactnum::{int, parse_rational, sign};
use involute::poly::Poly;
use involute::spectral::{eigenvalues_closed_form, mixing_report, right_eigenvectors};
use involute::transform::{
    binomial_transform, is_directly_stochastic, is_stochastic, property_report, Witness,
};
use involute::walk::{
    invariant_closed_form, is_reversible, kolmogorov, kolmogorov_sampled, simulate as run_chain,
    stationary as exact_stationary, subset_walk, KOLMOGOROV_CAP,
};
use involute::{LambdaSeq, Matrix, Rational};
use serde_json::{json, Value};

use crate::render::{matrix_report, strings, Report, Table};
use crate::source::Source;
use crate::{CliError, Outcome};

type Run = Result<Outcome, CliError>;

pub fn matrix(src: &Source, down: bool) -> Run {
    let p = src.raw_matrix()?;
    if down {
        let h = &p * &Matrix::anti_diagonal(src.n());
        return Ok(matrix_report(&h, "H", false).into());
    }
    Ok(matrix_report(&p, "P", true).into())
}

pub fn stationary(src: &Source) -> Run {
    let w = src.walk()?;
    let pi = w.stationary()?;
    let closed = match src.named() {
        Some(spec) => Some(invariant_closed_form(spec, src.n())?),
        None => None,
    };
    let balance = w.detailed_balance(&pi);
    let mut t = Table::new(["x", "pi"]);
    for (x, v) in pi.probs().iter().enumerate() {
        t.push([x.to_string(), v.to_string()]);
    }
    let agrees = closed.as_ref().map(|c| *c == pi);
    let json = json!({
        "n": src.n(),
        "pi": strings(pi.probs()),
        "closed_form": closed.as_ref().map(|c| strings(c.probs())),
        "closed_form_agrees": agrees,
        "detailed_balance": balance,
    });
    let mut pretty = t.to_pretty();
    pretty.push_str(&format!("detailed balance: {balance}\n"));
    if let Some(a) = agrees {
        pretty.push_str(&format!("closed form agrees: {a}\n"));
    }
    Ok(Report::new(t, json).with_pretty(pretty).into())
}

/// Signed eigenvalues when a closed form or the diagonal of a binomial
/// transform gives them.
fn known_eigenvalues(src: &Source) -> Result<Option<Vec<Rational>>, CliError> {
    if let Some(spec) = src.named() {
        return Ok(Some(eigenvalues_closed_form(spec, src.n())?));
    }
    let h = match src {
        Source::Lambda(l) => binomial_transform(l),
        Source::Weight(..) => &src.raw_matrix()? * &Matrix::anti_diagonal(src.n()),
    };
    let r = property_report(&h);
    Ok(r.adep.then(|| (0..src.n()).map(|d| sign(d) * &h[(d, d)]).collect()))
}

pub fn spectrum(src: &Source, mixing: bool) -> Run {
    let p = src.raw_matrix()?;
    let cp = p.charpoly();
    let eig = known_eigenvalues(src)?;
    let matches = eig.as_ref().map(|e| Poly::from_roots(e) == cp);
    let mix = match (mixing, src.named()) {
        (false, _) => None,
        (true, Some(spec)) => Some(mixing_report(spec, src.n())?),
        (true, None) => {
            return Err(CliError::Validation("--mixing needs a named family".into()));
        }
    };
    let table = match &eig {
        Some(e) => {
            let mut t = Table::new(["d", "eigenvalue"]);
            for (d, v) in e.iter().enumerate() {
                t.push([d.to_string(), v.to_string()]);
            }
            t
        }
        None => {
            let mut t = Table::new(["k", "charpoly_coefficient"]);
            for (k, c) in cp.coeffs().iter().enumerate() {
                t.push([k.to_string(), c.to_string()]);
            }
            t
        }
    };
    let json = json!({
        "n": src.n(),
        "eigenvalues": eig.as_ref().map(|e| strings(e)),
        "charpoly": strings(cp.coeffs()),
        "charpoly_matches": matches,
        "mixing": mix,
    });
    let mut pretty = table.to_pretty();
    if let Some(m) = matches {
        pretty.push_str(&format!("charpoly matches: {m}\n"));
    }
    if let Some(m) = &mix {
        pretty.push_str(&format!(
            "second |eigenvalue|: {}; fitted decay rate: {:.6}\n",
            m.second_abs_eigenvalue, m.empirical_rate
        ));
    }
    Ok(Report::new(table, json).with_pretty(pretty).into())
}

pub fn eigvec(src: &Source) -> Run {
    let spec = src.named().ok_or_else(|| {
        CliError::Validation("eigenvectors are available for named families only".into())
    })?;
    let sys = right_eigenvectors(spec, src.n())?;
    let mut t = Table::new(
        ["side".to_string(), "d".to_string(), "eigenvalue".to_string()]
            .into_iter()
            .chain((0..sys.n).map(|x| format!("x{x}"))),
    );
    for (side, vecs) in [("right", &sys.right_vectors), ("left", &sys.left_vectors)] {
        for (d, v) in vecs.iter().enumerate() {
            let mut row = vec![side.to_string(), d.to_string(), sys.eigenvalues[d].to_string()];
            row.extend(strings(v));
            t.push(row);
        }
    }
    Ok(Report::new(t, serde_json::to_value(&sys).expect("serializable")).into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Property {
    Stochastic,
    Ergodic,
    Reversible,
    Kolmogorov,
    Adep,
    Gadep,
    Binomial,
    GloballyReversible,
}

fn check_report(property: Property, failure: Option<String>) -> Outcome {
    let name = property.to_possible_value().expect("named").get_name().to_string();
    let holds = failure.is_none();
    let witness = failure.clone().unwrap_or_default();
    let mut t = Table::new(["property", "holds", "witness"]);
    t.push([name.clone(), holds.to_string(), witness]);
    let json = json!({ "property": name, "holds": holds, "witness": failure });
    let pretty = match &failure {
        None => format!("{name}: holds\n"),
        Some(w) => format!("{name}: fails ({w})\n"),
    };
    Outcome { report: Report::new(t, json).with_pretty(pretty), failure }
}

/// The lambda sequence behind a source: its own, the closed form, or the
/// diagonal of a down-step matrix that is a binomial transform.
fn lambda_of(src: &Source) -> Result<LambdaSeq, CliError> {
    match src {
        Source::Lambda(l) => Ok(l.clone()),
        Source::Weight(spec, n) => {
            if spec.is_named() {
                return Ok(LambdaSeq::new(involute::spectral::lambda_closed_form(spec, *n)?));
            }
            let h = &src.raw_matrix()? * &Matrix::anti_diagonal(*n);
            if !property_report(&h).is_binomial_transform {
                return Err(CliError::Validation("the down-step matrix is not a binomial transform".into()));
            }
            Ok(LambdaSeq::new(h.diag()))
        }
    }
}

fn balance_witness(p: &Matrix) -> String {
    let n = p.rows();
    let zero = int(0);
    for x in 0..n {
        for z in x + 1..n {
            if (p[(x, z)] == zero) != (p[(z, x)] == zero) {
                return format!("P[{x}][{z}]={} but P[{z}][{x}]={}", p[(x, z)], p[(z, x)]);
            }
        }
    }
    match exact_stationary(p) {
        Ok(pi) => {
            let w = pi.probs();
            for x in 0..n {
                for z in x + 1..n {
                    if &w[x] * &p[(x, z)] != &w[z] * &p[(z, x)] {
                        return format!("detailed balance fails at ({x},{z})");
                    }
                }
            }
            "no strictly positive reversing measure".into()
        }
        Err(e) => e.to_string(),
    }
}

pub fn check(src: &Source, property: Property, seed: u64) -> Run {
    let failure = match property {
        Property::Stochastic => match src {
            Source::Lambda(l) => {
                let r = is_stochastic(l);
                (!r.stochastic).then(|| match r.witness {
                    Some(z) => format!("z={z}, alternating sum {}", r.sums[z]),
                    None => format!("lambda_0 = {} is not 1", l.values()[0]),
                })
            }
            Source::Weight(..) => {
                let p = src.raw_matrix()?;
                (!is_directly_stochastic(&p)).then(|| "row sums or signs fail".to_string())
            }
        },
        Property::Ergodic => {
            let r = src.walk()?.ergodicity();
            (!r.ergodic).then(|| {
                format!("classes {:?}, periods {:?}", r.communicating_classes, r.periods)
            })
        }
        Property::Reversible => {
            let w = src.walk()?;
            (!is_reversible(w.p())).then(|| balance_witness(w.p()))
        }
        Property::Kolmogorov => {
            let w = src.walk()?;
            let sampled = kolmogorov_sampled(&w, 20_000, seed)?;
            let holds = if w.n() <= KOLMOGOROV_CAP { kolmogorov(&w)? } else { sampled.is_none() };
            (!holds).then(|| match sampled {
                Some(c) => format!("cycle {c:?}"),
                None => "a cycle product differs from its reverse".into(),
            })
        }
        Property::Adep | Property::Gadep | Property::Binomial => {
            let h = match src {
                Source::Lambda(l) => binomial_transform(l),
                Source::Weight(..) => &src.raw_matrix()? * &Matrix::anti_diagonal(src.n()),
            };
            let r = property_report(&h);
            let ok = match property {
                Property::Adep => r.adep,
                Property::Gadep => r.gadep,
                _ => r.is_binomial_transform,
            };
            (!ok).then(|| match (property, r.witness) {
                (Property::Adep, _) => "eigenvalues of H J differ from (-1)^d H_dd".into(),
                (_, Some(Witness::Submatrix(m))) if property == Property::Gadep => {
                    format!("top-left {m}x{m} block")
                }
                (_, Some(Witness::Column(d))) => format!("Pascal column v({d})"),
                (_, w) => format!("{w:?}"),
            })
        }
        Property::GloballyReversible => {
            let l = lambda_of(src)?;
            if is_globally_reversible(&l)? {
                None
            } else {
                let p = involute::transform::pl_matrix(&l);
                let m = (2..=l.len())
                    .find(|&m| {
                        let sub = top_right(&p, m);
                        !(is_directly_stochastic(&sub) && is_reversible(&sub))
                    })
                    .expect("some block fails");
                Some(format!("top-right {m}x{m} block"))
            }
        }
    };
    Ok(check_report(property, failure))
}

fn classification_report(class: &involute::Classification, extra: Value) -> Report {
    let mut t = Table::new(["classification"]);
    t.push([class.to_string()]);
    let mut json = json!({ "classification": class });
    if let (Value::Object(dst), Value::Object(src)) = (&mut json, extra) {
        dst.extend(src);
    }
    Report::new(t, json)
}

pub fn classify(lambda: Option<String>, mu: Option<String>, nu: Option<String>, n: Option<usize>) -> Run {
    if let Some(list) = lambda {
        let l = LambdaSeq::parse(&list)?;
        let class = classify_walk(&l)?;
        let global = is_globally_reversible(&l).ok();
        let mut r = classification_report(&class, json!({ "lambda": l, "globally_reversible": global }));
        r.table = Table::new(["classification", "globally_reversible"]);
        r.table.push([class.to_string(), global.map_or("-".into(), |g| g.to_string())]);
        return Ok(r.into());
    }
    let (Some(mu), Some(nu)) = (mu, nu) else {
        return Err(CliError::Validation("give --lambda, or --mu, --nu and --n".into()));
    };
    let n = n.ok_or_else(|| CliError::Validation("--n is required with --mu and --nu".into()))?;
    let (mu, nu) = (parse_rational(&mu)?, parse_rational(&nu)?);
    let class = params_from_mu_nu(&mu, &nu, n)?;
    Ok(classification_report(&class, json!({ "mu": mu.to_string(), "nu": nu.to_string(), "n": n })).into())
}

pub fn ladder(mu: &str, n: usize) -> Run {
    let mu = parse_rational(mu)?;
    if n < 3 {
        return Err(CliError::Validation(format!("the ladder needs n >= 3, got {n}")));
    }
    let rungs = exceptional_ladder(&mu, n);
    let mut t = Table::new(["m", "nu", "a_prime", "b_prime"]);
    for r in &rungs {
        t.push([r.m.to_string(), r.nu.to_string(), r.a_prime.to_string(), r.m.to_string()]);
    }
    let json = json!({
        "mu": mu.to_string(),
        "n": n,
        "least_m": least_band_count(&mu, n),
        "rungs": rungs,
    });
    Ok(Report::new(t, json).into())
}

pub fn simulate(src: &Source, steps: usize, start: usize, trajectory: bool, seed: u64) -> Run {
    let w = src.walk()?;
    let sim = run_chain(w.p(), start, steps, seed)?;
    if trajectory {
        let mut t = Table::new(["step", "state"]);
        for (k, s) in sim.trajectory.iter().enumerate() {
            t.push([k, *s]);
        }
        let json = json!({ "seed": seed, "trajectory": sim.trajectory });
        return Ok(Report::new(t, json).into());
    }
    let pi = w.stationary()?;
    let tv = sim.empirical.total_variation(&pi);
    let mut t = Table::new(["x", "empirical", "pi"]);
    let emp = sim.empirical.to_f64();
    for (x, v) in pi.probs().iter().enumerate() {
        t.push([x.to_string(), format!("{:.6}", emp[x]), v.to_string()]);
    }
    let json = json!({
        "seed": seed,
        "steps": steps,
        "start": start,
        "empirical": strings(sim.empirical.probs()),
        "pi": strings(pi.probs()),
        "total_variation": tv,
    });
    let pretty = t.to_pretty() + &format!("total variation: {tv:.6}\n");
    Ok(Report::new(t, json).with_pretty(pretty).into())
}

fn subset_label(s: usize, m: usize) -> String {
    let items: Vec<String> = (0..m).filter(|i| s >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", items.join(" "))
}

pub fn subsets(m: usize, p: &str, show_matrix: bool) -> Run {
    let p = parse_rational(p)?;
    let w = subset_walk(m, &p)?;
    if show_matrix {
        let t = crate::render::matrix_table(&w.matrix);
        let json = json!({ "m": m, "p": p.to_string(), "rows": crate::render::matrix_json(&w.matrix) });
        return Ok(Report::new(t, json)
            .with_pretty(involute::walk::format_pretty(&w.matrix, false))
            .into());
    }
    let mut t = Table::new(["subset", "size", "pi"]);
    for (s, v) in w.pi.probs().iter().enumerate() {
        t.push([subset_label(s, m), s.count_ones().to_string(), v.to_string()]);
    }
    let eig: Vec<Value> = w
        .eigenvalues
        .iter()
        .map(|(v, k)| json!({ "eigenvalue": v.to_string(), "multiplicity": k }))
        .collect();
    let json = json!({ "m": m, "p": p.to_string(), "pi": strings(w.pi.probs()), "eigenvalues": eig });
    let mut pretty = t.to_pretty();
    for (v, k) in &w.eigenvalues {
        pretty.push_str(&format!("eigenvalue {v} with multiplicity {k}\n"));
    }
    Ok(Report::new(t, json).with_pretty(pretty).into())
}

pub fn continuum(kappa: Option<Vec<u32>>, trig: bool, degree: usize, convergence: Option<Vec<usize>>) -> Run {
    let walk = match (kappa, trig) {
        (Some(k), false) => ContinuousWalk::Kappa { a: k[0], b: k[1] },
        (None, true) => ContinuousWalk::Trig,
        _ => return Err(CliError::Validation("give --kappa A B or --trig".into())),
    };
    if let Some(ns) = convergence {
        let ContinuousWalk::Kappa { a, b } = walk else {
            return Err(CliError::Validation("--convergence needs --kappa".into()));
        };
        return convergence_report(a, b, degree.clamp(1, 5), &ns).map(Into::into);
    }
    let mut t = Table::new(["d", "eigenvalue", "residual"]);
    let mut rows = Vec::new();
    for d in 0..=degree {
        let ev = eigenvalue(walk, d);
        let r = eigen_residual(walk, d)?;
        t.push([d.to_string(), format!("{ev:.12}"), format!("{r:.3e}")]);
        rows.push(json!({ "d": d, "eigenvalue": ev, "residual": r }));
    }
    let fixed = fixed_point_residual(walk)?;
    let json = json!({ "walk": walk, "eigen": rows, "fixed_point_residual": fixed });
    let pretty = t.to_pretty() + &format!("fixed-point residual: {fixed:.3e}\n");
    Ok(Report::new(t, json).with_pretty(pretty).into())
}

/// Distances for `d = 1..=dmax`.
pub fn convergence_report(a: u32, b: u32, dmax: usize, ns: &[usize]) -> Result<Report, CliError> {
    let mut t = Table::new(["d", "n", "distance"]);
    let mut rows = Vec::new();
    for d in 1..=dmax {
        for p in discrete_convergence(a, b, d, ns)? {
            t.push([d.to_string(), p.n.to_string(), format!("{:.6e}", p.distance)]);
            rows.push(json!({ "d": d, "n": p.n, "distance": p.distance }));
        }
    }
    Ok(Report::new(t, json!({ "a": a, "b": b, "points": rows })))
}

pub fn conjecture(ns: &[usize], samples: usize, max_denominator: u32, records: bool, seed: u64) -> Run {
    let cfg = SamplerConfig { max_denominator, samples, seed, ..SamplerConfig::default() };
    let mut t = Table::new(["n", "examined", "stochastic", "reversible", "unclassified"]);
    let mut summary = Vec::new();
    let mut lines = String::new();
    let mut failure = None;
    for &n in ns {
        let r = conjecture_search(n, &cfg)?;
        t.push([n, r.examined, r.stochastic, r.reversible, r.unclassified.len()]);
        summary.push(json!({
            "n": n,
            "examined": r.examined,
            "stochastic": r.stochastic,
            "reversible": r.reversible,
            "unclassified": r.unclassified,
        }));
        lines.push_str(&r.to_json_lines());
        if failure.is_none() {
            if let Some(u) = r.unclassified.first() {
                failure = Some(format!("n={n}: reversible walk lambda=({}) is not classified", u.lambda));
            }
        }
    }
    let report = if records {
        Report::raw(lines)
    } else {
        Report::new(t, json!({ "config": cfg, "sizes": summary }))
    };
    Ok(Outcome { report, failure })
}
