//! Regeneration of the displayed matrices, tables and figure data.

use clap::ValueEnum;
use involute::classify::{a_prime_m, exceptional_ladder, nu_m};
use involute::exactnum::{int, rat, sign, binom_i};
use involute::transform::{gadep_counterexample, property_report, Counterexample};
use involute::walk::{format_pretty, transition_matrix};
use involute::WeightSpec;
use serde_json::json;

use crate::commands::convergence_report;
use crate::render::{matrix_json, Report, Table};
use crate::{CliError, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    /// The six 4x4 transition matrices of the named families
    IntroMatrices,
    /// The 3x3 down-step matrix in terms of mu and nu
    #[value(name = "section-7")]
    Section7,
    /// The parametrized matrices with the global eigenvalue property
    #[value(name = "example-2")]
    Example2,
    /// The exceptional nu values for mu = 2/3, n = 10
    #[value(name = "example-7")]
    Example7,
    /// nu_m(2/3) for m = 2..6
    #[value(name = "fig-1")]
    Fig1,
    /// Distances between discrete and continuous eigenfunctions
    #[value(name = "fig-2")]
    Fig2,
}

pub fn run(target: Target) -> Result<Outcome, CliError> {
    let report = match target {
        Target::IntroMatrices => intro()?,
        Target::Section7 => section7(),
        Target::Example2 => example2(),
        Target::Example7 => example7(),
        Target::Fig1 => fig1(),
        Target::Fig2 => convergence_report(0, 0, 2, &[10, 20, 40, 80])?,
    };
    Ok(report.into())
}

fn intro() -> Result<Report, CliError> {
    let cases = [
        ("gamma(0,0)", WeightSpec::gamma_ab(int(0), int(0))?),
        ("gamma(1,0)", WeightSpec::gamma_ab(int(1), int(0))?),
        ("gamma(0,1)", WeightSpec::gamma_ab(int(0), int(1))?),
        ("gamma(1/2)", WeightSpec::gamma_c(rat(1, 2))?),
        ("gamma(2)", WeightSpec::gamma_c(int(2))?),
        ("delta(4,2)", WeightSpec::delta_ab(int(4), int(2))?),
    ];
    let mut t = Table::new(["weight", "x", "c0", "c1", "c2", "c3"]);
    let mut js = Vec::new();
    let mut pretty = String::new();
    for (name, spec) in &cases {
        let p = transition_matrix(spec, 4)?.p().clone();
        for x in 0..4 {
            let mut row = vec![name.to_string(), x.to_string()];
            row.extend(p.row(x).iter().map(|v| v.to_string()));
            t.push(row);
        }
        js.push(json!({ "weight": name, "rows": matrix_json(&p) }));
        pretty.push_str(&format!("P({name})\n{}\n", format_pretty(&p, true)));
    }
    Ok(Report::new(t, json!(js)).with_pretty(pretty))
}

/// `H_{xy} = binom(x,y) sum_e (-1)^e binom(x-y,e) lambda_{y+e}` written in
/// `lambda = (1, mu, nu)`.
fn section7() -> Report {
    let names = ["1", "mu", "nu"];
    let entry = |x: usize, y: usize| -> String {
        if y > x {
            return "0".into();
        }
        let mut coeff = [int(0), int(0), int(0)];
        for e in 0..=x - y {
            coeff[y + e] += binom_i(x as i64, y as u64) * sign(e) * binom_i((x - y) as i64, e as u64);
        }
        let mut out = String::new();
        for (c, name) in coeff.iter().zip(names) {
            if c == &int(0) {
                continue;
            }
            let mag = if c < &int(0) { -c.clone() } else { c.clone() };
            let sgn = if c < &int(0) { "-" } else if out.is_empty() { "" } else { "+" };
            let body = match (mag == int(1), name) {
                (true, _) => name.to_string(),
                (false, "1") => mag.to_string(),
                (false, _) => format!("{mag}{name}"),
            };
            out.push_str(sgn);
            out.push_str(&body);
        }
        if out.is_empty() { "0".into() } else { out }
    };
    let mut t = Table::new(["x", "c0", "c1", "c2"]);
    let mut rows = Vec::new();
    for x in 0..3 {
        let row: Vec<String> = (0..3).map(|y| entry(x, y)).collect();
        rows.push(row.clone());
        t.push(std::iter::once(x.to_string()).chain(row));
    }
    Report::new(t, json!({ "lambda": names, "rows": rows }))
}

fn example2() -> Report {
    let mut t = Table::new(["matrix", "tau", "gadep", "binomial_transform", "witness"]);
    let mut js = Vec::new();
    let mut pretty = String::new();
    for which in [Counterexample::L4, Counterexample::H5] {
        for tau in [rat(1, 4), int(1)] {
            let m = gadep_counterexample(which, &tau);
            let r = property_report(&m);
            let name = format!("{which:?}");
            let witness = r.witness.map(|w| format!("{w:?}")).unwrap_or_default();
            t.push([name.clone(), tau.to_string(), r.gadep.to_string(), r.is_binomial_transform.to_string(), witness]);
            js.push(json!({ "matrix": name, "tau": tau.to_string(), "rows": matrix_json(&m), "report": r }));
            pretty.push_str(&format!(
                "{name}, tau = {tau}: gadep {}, binomial transform {}\n{}\n",
                r.gadep,
                r.is_binomial_transform,
                format_pretty(&m, false)
            ));
        }
    }
    Report::new(t, json!(js)).with_pretty(pretty)
}

fn example7() -> Report {
    let mu = rat(2, 3);
    let rungs = exceptional_ladder(&mu, 10);
    let mut t = Table::new(["nu", "a_prime", "b_prime"]);
    for r in &rungs {
        t.push([r.nu.to_string(), r.a_prime.to_string(), r.m.to_string()]);
    }
    Report::new(t, json!({ "mu": mu.to_string(), "n": 10, "rungs": rungs }))
}

fn fig1() -> Report {
    let mu = rat(2, 3);
    let mut t = Table::new(["m", "nu", "a_prime"]);
    for m in 2..=6 {
        t.push([m.to_string(), nu_m(&mu, m).to_string(), a_prime_m(&mu, m).to_string()]);
    }
    let limit = &mu * &mu;
    let json = json!({
        "mu": mu.to_string(),
        "limit": limit.to_string(),
        "rungs": (2..=6).map(|m| json!({ "m": m, "nu": nu_m(&mu, m).to_string() })).collect::<Vec<_>>(),
    });
    let pretty = t.to_pretty() + &format!("limit mu^2 = {limit}\n");
    Report::new(t, json).with_pretty(pretty)
}
