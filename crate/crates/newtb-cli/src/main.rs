use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use newtb_cli::{execute, run_batch, Verb};

const AFTER_HELP: &str = "\
Options are key=value words. Rationals are written a/b. Indices are 1-based.
A polygon P= is a full line such as 'newt q=2 n=2 slopes=2/3,1/6' (quoted)
or a bare slope list together with q= and n=.

Verbs and options:
  newt              q n and one of P= slopes= v=     polygon line, then its eta as a plfun line
  lambda            P (i=<index> | lambda=<r>) k     table k, lambda_k
  fil               P [mu=<r>]                       with mu: table i, lower_k, upper_l
                                                     without: table kind, mu, exponents, class
  simplex           P                                simplexB line, then the lower sauts of S
  hecke             P a=<ints>                       <newt'> sigma=<perm>
  vertexpoly        q n vtx=<ints>                   polygon of the vertex
  psi               P                                pt line
  psiinv            q n x=<rationals>                polygon line
  canonical         P r=<rank> k=<level>             canonical r= k= exists=
  orbit             vtx=<ints> bound=<int>           table vertex
  gh                q n                              table subset, polygon, coefficients
  domain-check      n region=<halfspaces>            covers= line, table rotation, nonempty, face
  delta             q n v=<rationals>                polygon, pt, piece sigma= w=
  balls             roots=<roots> eps=<r>            [zero radius=], table members, radius
  svg-decomposition q n=3 vmax=<r> res=<int>         SVG 1.1 document
  selftest          seed= count=                     table check, cases, status
  batch             threads=<int>                    one command per stdin line, output in input order

Every table starts with a '#schema:' line naming its tab-separated columns.
Exit status: 0 success, 2 bad input, 3 internal invariant violated.
NEWTB_ENUM_CAP caps the size of enumerated torsion subgroups.";

/// Exact Newton-polygon and apartment computations.
#[derive(Parser)]
#[command(name = "newtb", version, about, after_help = AFTER_HELP)]
struct Cli {
    #[arg(value_enum)]
    verb: Verb,
    /// key=value options for the verb
    #[arg(allow_hyphen_values = true)]
    options: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    if cli.verb == Verb::Batch {
        let threads = match cli.options.as_slice() {
            [] => std::thread::available_parallelism().map_or(1, |n| n.get()),
            [one] => match one.strip_prefix("threads=").and_then(|t| t.parse::<usize>().ok()) {
                Some(t) if t > 0 => t,
                _ => return fail(2, "batch accepts only threads=<positive int>"),
            },
            _ => return fail(2, "batch accepts only threads=<positive int>"),
        };
        return match run_batch(std::io::stdin().lock(), threads) {
            Ok((text, code)) => {
                let _ = stdout.write_all(text.as_bytes());
                ExitCode::from(code as u8)
            }
            Err(e) => fail(2, &format!("cannot read standard input: {e}")),
        };
    }
    match execute(cli.verb, &cli.options) {
        Ok(report) => {
            let _ = stdout.write_all(report.text.as_bytes());
            match report.failure {
                None => ExitCode::SUCCESS,
                Some(e) => fail(e.exit_code(), &e.to_string()),
            }
        }
        Err(e) => fail(e.exit_code(), &e.to_string()),
    }
}

fn fail(code: i32, msg: &str) -> ExitCode {
    eprintln!("newtb: {msg}");
    ExitCode::from(code as u8)
}
