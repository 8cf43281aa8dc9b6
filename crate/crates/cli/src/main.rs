//! Command-line surface for the Klein-surface theta invariants.
//!
//! Exit codes: 0 on success, 1 when a verification suite or probe reports a
//! mathematical failure, 2 on usage or validation errors.  Output is
//! deterministic: JSON objects carry sorted keys, rows come in a fixed
//! order, and no timestamps appear in data payloads.  Exact values are
//! emitted as integers or rational strings such as `"1/2"`; floating-point
//! values appear only in verification reports.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use klein_theta::klein::{enumerate_types, picard_involution, standard_model, TopologicalType};
use klein_theta::lattice::{eigenlattice, vector_to_i64, Int, IntegerMatrix};
use klein_theta::stiefel_whitney::{component_group, sw_table, tau_fixed_basis, SWTable};
use klein_theta::theta_form::{enumerate_theta, is_real_theta, QuadraticFormZ2};
use klein_theta::verify::{run_suite, Suite, VerifyConfig};
use klein_theta::RealCurveModel;

#[derive(Parser)]
#[command(
    name = "klein-theta",
    version,
    about = "Topological types of Klein surfaces, theta characteristics, and \
             Stiefel-Whitney tables over the real Picard torus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// List all valid topological types (g, n, a) with g <= the bound
    Types {
        #[arg(long = "g-max")]
        g_max: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Print the standard integer model of the involution for one type
    Model {
        /// Topological type as "g,n,a"
        #[arg(long = "type")]
        ttype: String,
    },
    /// Enumerate theta characteristics as quadratic forms
    Theta {
        #[arg(long)]
        g: u32,
        /// Keep only forms fixed by the involution of --type
        #[arg(long, requires = "ttype")]
        real: bool,
        /// Topological type as "g,n,a" (required with --real)
        #[arg(long = "type")]
        ttype: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Stiefel-Whitney table of the symmetric theta bundle for one form
    Sw {
        /// Topological type as "g,n,a"
        #[arg(long = "type")]
        ttype: String,
        /// Basis bits q(e_1),..,q(f_g), comma separated
        #[arg(long)]
        q: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run consistency suites (exit 1 on any failed check)
    Verify {
        /// One of: lattice, theta, ah, sw, analytic, all
        #[arg(long)]
        suite: String,
        /// Override the numeric tolerances (identity and integration)
        #[arg(long)]
        tol: Option<f64>,
        /// Seed for the randomized checks
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

const USAGE_ERROR: u8 = 2;
const CHECK_FAILED: u8 = 1;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Types { g_max, format } => cmd_types(g_max, format),
        Command::Model { ttype } => cmd_model(&ttype),
        Command::Theta {
            g,
            real,
            ttype,
            format,
        } => cmd_theta(g, real, ttype.as_deref(), format),
        Command::Sw { ttype, q, format } => cmd_sw(&ttype, &q, format),
        Command::Verify {
            suite,
            tol,
            seed,
            format,
        } => cmd_verify(&suite, tol, seed, format),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

type CmdResult = Result<(), (u8, String)>;

fn parse_type(text: &str) -> Result<TopologicalType, (u8, String)> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err((
            USAGE_ERROR,
            format!("type must be \"g,n,a\", got \"{text}\""),
        ));
    }
    let nums: Vec<u32> = parts
        .iter()
        .map(|p| p.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|e| (USAGE_ERROR, format!("type \"{text}\": {e}")))?;
    if nums[2] > 1 {
        return Err((USAGE_ERROR, "orientability bit must be 0 or 1".into()));
    }
    let tt = TopologicalType::new(nums[0], nums[1], nums[2] as u8);
    tt.check().map_err(|e| (USAGE_ERROR, e.to_string()))?;
    Ok(tt)
}

fn parse_form(text: &str, genus: usize) -> Result<QuadraticFormZ2, (u8, String)> {
    let bits: Vec<u8> = text
        .split(',')
        .map(|p| p.trim().parse::<u8>())
        .collect::<Result<_, _>>()
        .map_err(|e| (USAGE_ERROR, format!("q bits \"{text}\": {e}")))?;
    QuadraticFormZ2::from_bits(genus, &bits).map_err(|e| (USAGE_ERROR, e.to_string()))
}

fn provenance(parameters: Value) -> Value {
    json!({
        "program": "klein-theta",
        "version": env!("CARGO_PKG_VERSION"),
        "parameters": parameters,
    })
}

fn type_value(tt: TopologicalType) -> Value {
    json!({
        "g": tt.genus,
        "n": tt.circles,
        "a": tt.quotient_nonorientable,
    })
}

fn int_vec_value(v: &[Int]) -> Value {
    let ints = vector_to_i64(v).expect("entries fit in i64");
    Value::Array(ints.into_iter().map(Value::from).collect())
}

fn matrix_value(m: &IntegerMatrix) -> Value {
    let rows = m.to_i64_rows().expect("entries fit in i64");
    Value::Array(
        rows.into_iter()
            .map(|row| Value::Array(row.into_iter().map(Value::from).collect()))
            .collect(),
    )
}

fn print_json(value: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}

fn cmd_types(g_max: u32, format: Format) -> CmdResult {
    let types = enumerate_types(g_max);
    match format {
        Format::Json => {
            let list: Vec<Value> = types.iter().map(|&t| type_value(t)).collect();
            print_json(&json!({
                "count": list.len(),
                "gMax": g_max,
                "provenance": provenance(json!({"gMax": g_max})),
                "types": list,
            }));
        }
        Format::Csv => {
            println!("g,n,a");
            for t in types {
                println!("{},{},{}", t.genus, t.circles, t.quotient_nonorientable);
            }
        }
    }
    Ok(())
}

fn build_model(tt: TopologicalType) -> Result<RealCurveModel, (u8, String)> {
    standard_model(tt).map_err(|e| (USAGE_ERROR, e.to_string()))
}

fn cmd_model(ttype: &str) -> CmdResult {
    let tt = parse_type(ttype)?;
    let model = build_model(tt)?;
    let tau = picard_involution(&model);
    let components = component_group(&tau).map_err(|e| (CHECK_FAILED, e.to_string()))?;
    let circle_classes: Vec<Value> = model
        .circle_classes()
        .iter()
        .map(|c| int_vec_value(c))
        .collect();
    let tau_basis: Vec<Value> = tau_fixed_basis(&tau)
        .iter()
        .map(|b| int_vec_value(b))
        .collect();
    let anti_basis: Vec<Value> = eigenlattice(&tau, -1)
        .iter()
        .map(|b| int_vec_value(b))
        .collect();
    print_json(&json!({
        "type": type_value(tt),
        "hBlock": matrix_value(model.h_block()),
        "iotaStar": matrix_value(model.iota_star().matrix()),
        "picardInvolution": matrix_value(tau.matrix()),
        "circleClasses": circle_classes,
        "tauFixedBasis": tau_basis,
        "antiInvariantBasis": anti_basis,
        "componentCount": components.len(),
        "provenance": provenance(json!({"type": ttype})),
    }));
    Ok(())
}

fn cmd_theta(g: u32, real: bool, ttype: Option<&str>, format: Format) -> CmdResult {
    if g as usize > klein_theta::theta_form::MAX_GENUS {
        return Err((
            USAGE_ERROR,
            format!("genus {g} exceeds the supported range"),
        ));
    }
    let model = match (real, ttype) {
        (true, Some(text)) => {
            let tt = parse_type(text)?;
            if tt.genus != g {
                return Err((
                    USAGE_ERROR,
                    format!("--type has genus {}, --g is {g}", tt.genus),
                ));
            }
            Some(build_model(tt)?)
        }
        (true, None) => {
            return Err((USAGE_ERROR, "--real requires --type".into()));
        }
        _ => None,
    };
    let forms: Vec<QuadraticFormZ2> = enumerate_theta(g as usize)
        .filter(|q| model.as_ref().is_none_or(|m| is_real_theta(q, m)))
        .collect();
    match format {
        Format::Json => {
            let list: Vec<Value> = forms
                .iter()
                .map(|q| {
                    json!({
                        "arf": q.arf(),
                        "bits": q.basis_values(),
                    })
                })
                .collect();
            let mut params = Map::new();
            params.insert("g".into(), json!(g));
            params.insert("real".into(), json!(real));
            if let Some(text) = ttype {
                params.insert("type".into(), json!(text));
            }
            print_json(&json!({
                "count": list.len(),
                "forms": list,
                "g": g,
                "provenance": provenance(Value::Object(params)),
            }));
        }
        Format::Csv => {
            let header: Vec<String> = (0..2 * g)
                .map(|i| format!("b{i}"))
                .chain(std::iter::once("arf".into()))
                .collect();
            println!("{}", header.join(","));
            for q in &forms {
                let mut row: Vec<String> = q.basis_values().iter().map(u8::to_string).collect();
                row.push(q.arf().to_string());
                println!("{}", row.join(","));
            }
        }
    }
    Ok(())
}

fn sw_json(table: &SWTable, ttype: &str, q_text: &str) -> Value {
    let components: Vec<Value> = table
        .components
        .iter()
        .map(|row| {
            let mu: Vec<Value> = row
                .component
                .mu()
                .iter()
                .map(|r| Value::from(r.to_string()))
                .collect();
            json!({
                "circleValues": row.circle_values,
                "mu": mu,
                "row": row.row,
            })
        })
        .collect();
    let tau_basis: Vec<Value> = table.tau_basis.iter().map(|b| int_vec_value(b)).collect();
    let circles: Vec<Value> = table
        .circle_classes
        .iter()
        .map(|c| int_vec_value(c))
        .collect();
    json!({
        "components": components,
        "provenance": provenance(json!({
            "circleClasses": circles,
            "q": q_text,
            "tauBasis": tau_basis,
            "type": ttype,
        })),
        "q": table.q_bits,
        "spinData": table.spin_data,
        "type": type_value(table.topological_type),
    })
}

fn cmd_sw(ttype: &str, q_text: &str, format: Format) -> CmdResult {
    let tt = parse_type(ttype)?;
    let model = build_model(tt)?;
    let q = parse_form(q_text, model.genus())?;
    let table = sw_table(&model, &q).map_err(|e| match e {
        klein_theta::stiefel_whitney::SwError::NotRealTheta
        | klein_theta::stiefel_whitney::SwError::EmptyRealLocus => (USAGE_ERROR, e.to_string()),
        other => (CHECK_FAILED, other.to_string()),
    })?;
    match format {
        Format::Json => print_json(&sw_json(&table, ttype, q_text)),
        Format::Csv => {
            let g = table.tau_basis.len();
            let n = table.circle_classes.len();
            let header: Vec<String> = std::iter::once("mu".to_string())
                .chain((0..g).map(|i| format!("b{i}")))
                .chain((0..n).map(|i| format!("c{i}")))
                .collect();
            println!("{}", header.join(","));
            for row in &table.components {
                let mu = row
                    .component
                    .mu()
                    .iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                let cells: Vec<String> = std::iter::once(mu)
                    .chain(row.row.iter().map(u8::to_string))
                    .chain(row.circle_values.iter().map(u8::to_string))
                    .collect();
                println!("{}", cells.join(","));
            }
            let spin_cells: Vec<String> = std::iter::once("spin".to_string())
                .chain((0..g).map(|_| String::new()))
                .chain(table.spin_data.iter().map(u8::to_string))
                .collect();
            println!("{}", spin_cells.join(","));
        }
    }
    Ok(())
}

fn cmd_verify(suite: &str, tol: Option<f64>, seed: Option<u64>, format: Format) -> CmdResult {
    let suite = Suite::parse(suite).ok_or((
        USAGE_ERROR,
        format!("unknown suite \"{suite}\"; expected lattice, theta, ah, sw, analytic, or all"),
    ))?;
    let mut cfg = VerifyConfig::default();
    if let Some(t) = tol {
        if t <= 0.0 {
            return Err((USAGE_ERROR, "tolerance must be positive".into()));
        }
        cfg.identity_tol = t;
        cfg.integration_tol = t;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let reports = run_suite(suite, &cfg);
    match format {
        Format::Json => {
            let list: Vec<Value> = reports
                .iter()
                .map(|r| {
                    json!({
                        "detail": r.detail,
                        "id": r.id,
                        "name": r.name,
                        "passed": r.passed,
                        "seconds": r.seconds,
                    })
                })
                .collect();
            print_json(&json!({
                "checks": list,
                "failed": reports.iter().filter(|r| !r.passed).count(),
                "provenance": provenance(json!({
                    "seed": cfg.seed,
                    "identityTol": format!("{:.16e}", cfg.identity_tol),
                    "integrationTol": format!("{:.16e}", cfg.integration_tol),
                })),
            }));
        }
        Format::Csv => {
            println!("id,passed,seconds,detail");
            for r in &reports {
                println!(
                    "{},{},{:.3},\"{}\"",
                    r.id,
                    r.passed,
                    r.seconds,
                    r.detail.replace('"', "'")
                );
            }
        }
    }
    for r in &reports {
        eprintln!("{r}");
    }
    if reports.iter().all(|r| r.passed) {
        Ok(())
    } else {
        let failing: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
        Err((
            CHECK_FAILED,
            format!("failed checks: {}", failing.join(", ")),
        ))
    }
}
