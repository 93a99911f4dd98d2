use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use k3zeta::counter::singular::{analyze_curve, Singularities};
use k3zeta::counter::{
    fft_count, naive_count, nonordinary_scan, padic_count, projective_size, CountBound, CountResult, ModelKind,
    PadicOptions, VarietyModel, NAIVE_BUDGET,
};
use k3zeta::families::preset;
use k3zeta::mpoly::{parse_rational, reduce_mod_p, MultiPoly};
use k3zeta::scan::{analyze_double_cover, family_scan, parse_prime_range, AnalysisOptions, ScanOptions};
use k3zeta::weil::zeta_assemble;
use k3zeta::{arith::Rationals, Error, Result};
use serde_json::json;

#[derive(Parser)]
#[command(name = "k3zeta", version, about = "Point counts, Weil polynomials and family scans for K3 surfaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, ValueEnum)]
enum Model {
    Hypersurface,
    DoubleCover,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Naive,
    Fft,
    Padic,
    Auto,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Out {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// #X(F_{p^i}) for i = 1..n.
    Count {
        #[arg(long, value_enum)]
        model: Model,
        /// Polynomial text, or a file containing it.
        #[arg(long)]
        poly: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "text")]
        out: Out,
    },
    /// Weil polynomial and diagnostics of W^2 = f for a nodal sextic f.
    Weil {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        p: u64,
        /// Number of counts, or `auto`.
        #[arg(long, default_value = "auto")]
        n: String,
        #[arg(long, value_enum, default_value = "json")]
        out: Out,
    },
    /// Primes up to pmax at which W^2 = f is non-ordinary.
    ScanNonordinary {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        pmax: u64,
        #[arg(long, value_enum, default_value = "csv")]
        out: Out,
    },
    /// Runs the Weil pipeline over the specialisations of a family preset.
    ScanFamily {
        #[arg(long)]
        family: String,
        /// Inclusive range `a..b` or a single prime.
        #[arg(long)]
        primes: String,
        /// `all`, `sample:<k>` or `values:<t1>;<t2>` with comma-separated tuples.
        #[arg(long, default_value = "all")]
        params: String,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Number of counts per surface; chosen automatically when absent.
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, value_enum, default_value = "text")]
        out: Out,
    },
}

fn read_poly(arg: &str) -> Result<MultiPoly<Rationals>> {
    let text = if Path::new(arg).is_file() {
        std::fs::read_to_string(arg).map_err(|e| Error::Resource(format!("cannot read {arg}: {e}")))?
    } else {
        arg.to_string()
    };
    parse_rational(text.trim())
}

fn mod_p(f: &MultiPoly<Rationals>, p: u64) -> Result<MultiPoly<k3zeta::arith::Zmod>> {
    if p < 3 || !k3zeta::arith::is_prime_u64(p) {
        return Err(Error::Domain(format!("{p} is not an odd prime")));
    }
    reduce_mod_p(f, p).ok_or_else(|| Error::Domain(format!("a coefficient denominator vanishes mod {p}")))
}

fn count_bound(model: &VarietyModel) -> Result<CountBound> {
    if model.kind() == ModelKind::DoubleCover && model.is_k3() {
        if let Singularities::Nodes(o) = analyze_curve(model.f())? {
            return Ok(CountBound::K3Weil { w: 22 - o.iter().sum::<u32>().min(21) });
        }
    }
    Ok(CountBound::Elementary)
}

fn naive_fits(model: &VarietyModel, i: u32) -> bool {
    let work = projective_size(model.p(), i, model.n()) * model.f().len().max(1);
    work <= NAIVE_BUDGET.into()
}

fn count(model: &VarietyModel, n: u32, method: MethodArg) -> Result<Vec<CountResult>> {
    let padic =
        |k: u32| -> Result<Vec<CountResult>> { padic_count(model, k, &PadicOptions::with_bound(count_bound(model)?)) };
    match method {
        MethodArg::Naive => (1..=n).map(|i| naive_count(model, i)).collect(),
        MethodArg::Fft => (1..=n).map(|i| fft_count(model, i)).collect(),
        MethodArg::Padic => padic(n),
        MethodArg::Auto => {
            // small fields by enumeration, the rest p-adically
            let cheap = (1..=n).take_while(|&i| naive_fits(model, i) && i <= 2).count() as u32;
            if cheap == n {
                return (1..=n).map(|i| naive_count(model, i)).collect();
            }
            let mut out = padic(n)?;
            for (i, slot) in out.iter_mut().enumerate().take(cheap as usize) {
                *slot = naive_count(model, i as u32 + 1)?;
            }
            Ok(out)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Count { model, poly, p, n, method, out } => {
            let f = mod_p(&read_poly(&poly)?, p)?;
            let kind = match model {
                Model::Hypersurface => ModelKind::Hypersurface,
                Model::DoubleCover => ModelKind::DoubleCover,
            };
            let m = VarietyModel::new(kind, f)?;
            let res = count(&m, n, method)?;
            match out {
                Out::Json => {
                    let rows: Vec<_> = res
                        .iter()
                        .map(|r| json!({"i": r.i, "count": r.count.to_string(), "method": r.method.name()}))
                        .collect();
                    println!("{}", json!({"schema": 1, "p": p, "counts": rows}));
                }
                _ => {
                    for r in res {
                        println!("{}", r.count);
                    }
                }
            }
        }
        Cmd::Weil { poly, p, n, out } => {
            let f = mod_p(&read_poly(&poly)?, p)?;
            let m = VarietyModel::double_cover(f)?;
            let n = match n.as_str() {
                "auto" => None,
                s => Some(s.parse().map_err(|_| Error::Parse(format!("--n expects a count or auto, got '{s}'")))?),
            };
            let orbits = k3zeta::counter::singular::require_nodal(m.f())?;
            let opts = AnalysisOptions { n, ..Default::default() };
            let a = analyze_double_cover(&m, &orbits, None, &opts)?;
            let chi2: Vec<Vec<String>> =
                a.chi2.iter().map(|w| w.coeffs().iter().map(|c| c.to_string()).collect()).collect();
            let zeta_ok = a.chi2.iter().all(|w| zeta_assemble(w).counts(a.counts.len()) == a.counts_resolved());
            let d = &a.diagnostics[0];
            let doc = json!({
                "schema": 1,
                "p": p,
                "nodes": a.orbits,
                "counts": a.counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "chi2": chi2[0],
                "candidates": chi2,
                "ambiguous": a.ambiguous(),
                "picard_upper": a.picard_upper(),
                "ordinary": a.ordinary(),
                "algebraic": d.algebraic.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "transcendental": d.transcendental.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "zeta_consistent": zeta_ok,
            });
            match out {
                Out::Json => println!("{}", serde_json::to_string_pretty(&doc).expect("json")),
                _ => {
                    for w in &a.chi2 {
                        println!("chi2 = {w}");
                    }
                    println!("picard_upper = {}", a.picard_upper());
                    println!("ordinary = {}", a.ordinary());
                }
            }
        }
        Cmd::ScanNonordinary { poly, pmax, out } => {
            let f = read_poly(&poly)?;
            let primes = k3zeta::scan::primes_in(3, pmax);
            let res = nonordinary_scan(&f, &primes)?;
            match out {
                Out::Json => {
                    let rows: Vec<_> = res.iter().map(|(p, c)| json!({"p": p, "class": c.name()})).collect();
                    println!("{}", json!({"schema": 1, "primes": rows}));
                }
                _ => {
                    println!("p,class");
                    for (p, c) in res {
                        println!("{p},{}", c.name());
                    }
                }
            }
        }
        Cmd::ScanFamily { family, primes, params, jobs, checkpoint, n, out } => {
            let fam = preset(&family)?;
            let primes = parse_prime_range(&primes)?;
            let opts = ScanOptions {
                params: params.parse()?,
                jobs,
                checkpoint,
                analysis: AnalysisOptions { n, ..Default::default() },
            };
            let report = family_scan(fam, &primes, &opts)?;
            match out {
                Out::Json => println!("{}", serde_json::to_string_pretty(&report).expect("json")),
                Out::Csv => print!("{}", report.to_csv()),
                Out::Text => {
                    print!("{}", report.to_csv());
                    println!();
                    print!("{}", report.summary_table());
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_argument_is_text_or_file() {
        let inline = read_poly("T0^6 + T1^6 + T2^6").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.txt");
        std::fs::write(&path, "T0^6 + T1^6 + T2^6\n").unwrap();
        assert_eq!(read_poly(path.to_str().unwrap()).unwrap(), inline);
    }

    #[test]
    fn reduction_needs_an_odd_prime() {
        let f = read_poly("T0^6 + 1/5*T1^6 + T2^6").unwrap();
        assert!(matches!(mod_p(&f, 2), Err(Error::Domain(_))));
        assert!(matches!(mod_p(&f, 15), Err(Error::Domain(_))));
        assert!(matches!(mod_p(&f, 5), Err(Error::Domain(_))));
        assert!(mod_p(&f, 7).is_ok());
    }

    #[test]
    fn bound_for_sextic_covers() {
        let f = mod_p(&read_poly(k3zeta::EXAMPLE_SEXTIC).unwrap(), 7).unwrap();
        let m = VarietyModel::double_cover(f).unwrap();
        assert_eq!(count_bound(&m).unwrap(), CountBound::K3Weil { w: 22 });
        let cubic = mod_p(&read_poly("T0^3 + T1^3 + T2^3").unwrap(), 7).unwrap();
        let h = VarietyModel::hypersurface(cubic).unwrap();
        assert_eq!(count_bound(&h).unwrap(), CountBound::Elementary);
    }

    #[test]
    fn auto_method_matches_padic() {
        let f = mod_p(&read_poly(k3zeta::EXAMPLE_SEXTIC).unwrap(), 7).unwrap();
        let m = VarietyModel::double_cover(f).unwrap();
        let auto: Vec<_> = count(&m, 3, MethodArg::Auto).unwrap().into_iter().map(|r| r.count).collect();
        let padic: Vec<_> = count(&m, 3, MethodArg::Padic).unwrap().into_iter().map(|r| r.count).collect();
        assert_eq!(auto, padic);
        assert!(naive_fits(&m, 1));
        assert!(!naive_fits(&m, 6));
    }
}
