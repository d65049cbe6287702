use std::io::{self, Write};

use alrep_core::algebraic::BoundChain;
use alrep_core::contfrac::CfExpansion;
use alrep_core::pipeline::{KReport, KStatus, LargeKReport, TheoremReport};
use alrep_core::reduction::ReductionSummary;
use alrep_core::AlmostRepdigitForm;
use clap::ValueEnum;
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::json;

use crate::CliResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

fn print_json(v: &impl Serialize) -> CliResult<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn csv_out(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

fn form_str(f: &AlmostRepdigitForm) -> String {
    format!("a={} b={} d1={} d2={}", f.a, f.b, f.d1, f.d2)
}

fn status_str(s: &KStatus) -> String {
    match s {
        KStatus::Complete => "Complete".into(),
        KStatus::BoundOnly => "BoundOnly".into(),
        KStatus::Failed(why) => format!("Failed({why})"),
    }
}

fn opt_big(x: &Option<BigInt>) -> String {
    x.as_ref().map(|v| v.to_string()).unwrap_or_else(|| "-".into())
}

pub fn seq(fmt: Format, k: u32, terms: &[(u64, BigInt)]) -> CliResult<()> {
    match fmt {
        Format::Human => {
            let mut out = io::stdout().lock();
            for (n, v) in terms {
                writeln!(out, "{n} {v}")?;
            }
        }
        Format::Json => print_json(&json!({
            "k": k,
            "terms": terms.iter().map(|(n, v)| json!({"n": n, "value": v.to_string()})).collect::<Vec<_>>(),
        }))?,
        Format::Csv => csv_out(&["n", "value"], terms.iter().map(|(n, v)| vec![n.to_string(), v.to_string()]))?,
    }
    Ok(())
}

pub fn digits(fmt: Format, n: &BigInt, count: u32, forms: &[AlmostRepdigitForm]) -> CliResult<()> {
    let almost = !forms.is_empty();
    let rep = forms.len() == 1 && forms[0].is_repdigit();
    let class = if rep {
        "repdigit"
    } else if almost {
        "almost repdigit"
    } else {
        "not an almost repdigit"
    };
    match fmt {
        Format::Human => {
            let mut out = io::stdout().lock();
            writeln!(out, "{n}: {class} ({count} digits)")?;
            for f in forms {
                writeln!(out, "  {}", form_str(f))?;
            }
        }
        Format::Json => print_json(&json!({
            "n": n.to_string(),
            "digits": count,
            "almost_repdigit": almost,
            "repdigit": rep,
            "forms": forms,
        }))?,
        Format::Csv => csv_out(
            &["n", "a", "b", "d1", "d2"],
            forms.iter().map(|f| vec![n.to_string(), f.a.to_string(), f.b.to_string(), f.d1.to_string(), f.d2.to_string()]),
        )?,
    }
    Ok(())
}

pub fn reduction(fmt: Format, s: &ReductionSummary) -> CliResult<()> {
    match fmt {
        Format::Human => {
            let mut out = io::stdout().lock();
            writeln!(out, "result: {}", s.kind)?;
            writeln!(out, "convergent index: {}", s.convergent_index)?;
            writeln!(out, "q: {}", s.q)?;
            if let Some(e) = &s.epsilon_lower {
                writeln!(out, "epsilon >= {e}")?;
            }
            if let Some(w) = &s.w_bound {
                writeln!(out, "w < {w}")?;
            }
            if let Some(n) = &s.note {
                writeln!(out, "relation: {n}")?;
            }
        }
        Format::Json => print_json(s)?,
        Format::Csv => csv_out(
            &["kind", "convergent_index", "q", "epsilon_lower", "w_bound", "note"],
            [vec![
                s.kind.clone(),
                s.convergent_index.to_string(),
                s.q.clone(),
                s.epsilon_lower.clone().unwrap_or_default(),
                s.w_bound.clone().unwrap_or_default(),
                s.note.clone().unwrap_or_default(),
            ]],
        )?,
    }
    Ok(())
}

pub fn cf(fmt: Format, exp: &CfExpansion, terms: usize) -> CliResult<()> {
    let conv = &exp.convergents()[..terms.min(exp.convergents().len())];
    match fmt {
        Format::Human => {
            let mut out = io::stdout().lock();
            writeln!(
                out,
                "{}: {} certified quotients at {} bits",
                exp.value_id(),
                exp.certified_count(),
                exp.precision_bits()
            )?;
            for c in conv {
                writeln!(out, "{} {} {}/{}", c.index, exp.quotients()[c.index], c.p, c.q)?;
            }
        }
        Format::Json => print_json(&json!({
            "value_id": exp.value_id(),
            "precision_bits": exp.precision_bits(),
            "quotients": exp.quotients()[..conv.len()].iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "convergents": conv,
        }))?,
        Format::Csv => csv_out(
            &["index", "a", "p", "q"],
            conv.iter().map(|c| {
                vec![c.index.to_string(), exp.quotients()[c.index].to_string(), c.p.to_string(), c.q.to_string()]
            }),
        )?,
    }
    Ok(())
}

pub fn chain(fmt: Format, c: &BoundChain) -> CliResult<()> {
    match fmt {
        Format::Human => {
            let mut out = io::stdout().lock();
            for s in &c.provenance {
                let ok = if s.certified { "ok" } else { "FAILED" };
                writeln!(out, "{:<22} {:<28} {:<6} {}", s.step, s.value, ok, s.formula)?;
            }
        }
        Format::Json => print_json(c)?,
        Format::Csv => csv_out(
            &["step", "value", "certified", "formula"],
            c.provenance
                .iter()
                .map(|s| vec![s.step.clone(), s.value.clone(), s.certified.to_string(), s.formula.clone()]),
        )?,
    }
    Ok(())
}

pub fn progress_line(r: &KReport) -> String {
    format!(
        "k={} {} n<={} searched<={} solutions={} ({} ms)",
        r.k,
        status_str(&r.status),
        r.search_window.1,
        r.searched_to,
        r.solutions.len(),
        r.timings.total_ms
    )
}

fn solution_cell(r: &KReport) -> String {
    r.solutions
        .iter()
        .map(|s| format!("{}:{}", s.n, s.value))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn theorem(fmt: Format, rep: &TheoremReport) -> CliResult<()> {
    match fmt {
        Format::Human => {
            let mut out = io::stdout().lock();
            writeln!(out, "{:<5} {:<10} {:>6} {:>8} {:>9}  solutions", "k", "status", "n<=", "d1-d2<=", "searched")?;
            for r in &rep.reports {
                writeln!(
                    out,
                    "{:<5} {:<10} {:>6} {:>8} {:>9}  {}",
                    r.k,
                    status_str(&r.status),
                    r.search_window.1,
                    opt_big(&r.chain.dgap_bound),
                    r.searched_to,
                    solution_cell(r)
                )?;
            }
            writeln!(out, "solutions: {}", rep.solutions.len())?;
            for s in &rep.solutions {
                let forms = s.forms.iter().map(form_str).collect::<Vec<_>>().join("; ");
                writeln!(out, "  L_{}^({}) = {}   {}", s.n, s.k, s.value, forms)?;
            }
            if !rep.missing.is_empty() {
                writeln!(out, "missing: {:?}", rep.missing)?;
            }
            for s in &rep.unexpected {
                writeln!(out, "unexpected: L_{}^({}) = {}", s.n, s.k, s.value)?;
            }
            writeln!(out, "overall: {:?}", rep.overall)?;
        }
        Format::Json => print_json(rep)?,
        Format::Csv => csv_out(
            &["k", "status", "n_bound", "dgap_bound", "searched_to", "solutions"],
            rep.reports.iter().map(|r| {
                vec![
                    r.k.to_string(),
                    status_str(&r.status),
                    r.search_window.1.to_string(),
                    opt_big(&r.chain.dgap_bound),
                    r.searched_to.to_string(),
                    solution_cell(r),
                ]
            }),
        )?,
    }
    Ok(())
}

pub fn large_k(fmt: Format, rep: &LargeKReport) -> CliResult<()> {
    match fmt {
        Format::Human => {
            chain(fmt, &rep.chain)?;
            let mut out = io::stdout().lock();
            for r in &rep.rounds {
                writeln!(
                    out,
                    "{}: M={} lambda<{} d1-d2<={} k<{} (gamma4 min eps {})",
                    r.label,
                    alrep_core::Ball::from_int(r.m.clone(), alrep_core::Precision::DEFAULT_START).to_sci(4),
                    r.lambda_bound,
                    r.gap_max,
                    r.k_bound,
                    r.gamma4
                        .smallest_epsilon
                        .as_ref()
                        .and_then(|b| b.result.epsilon_lower.clone())
                        .unwrap_or_else(|| "-".into())
                )?;
                for e in &r.gamma4.via_relation {
                    writeln!(out, "  {} via relation: w < {}", e.label, e.w_bound)?;
                }
            }
            for r in &rep.a0_rounds {
                writeln!(out, "{}: k<{}", r.label, r.k_bound)?;
            }
            writeln!(
                out,
                "final: k<{} (a != 0), k<{} (a = 0), contradiction: {}",
                rep.final_k_bound,
                rep.a0_final_k_bound,
                if rep.contradiction { "yes" } else { "no" }
            )?;
        }
        Format::Json => print_json(rep)?,
        Format::Csv => chain(fmt, &rep.chain)?,
    }
    Ok(())
}
