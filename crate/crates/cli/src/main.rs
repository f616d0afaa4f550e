//! `koszul-ext`: resolutions, Ext algebras, periodicity and Hochschild
//! cohomology from plain-text algebra and module files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use koszul_ext::extalg::{diagonal_subalgebra, ext_degrees, ext_dim_via_syzygy, ext_group, nilpotency_survey, ExtAlgebra};
use koszul_ext::gmodule::GradedModule;
use koszul_ext::hochschild::{ext_algebra_of_semisimple, find_non_nilpotent_center, graded_center, hochschild, verify_gr_cent};
use koszul_ext::periodicity::{compare_betti, cx1_criterion, detect_periodicity, simple_syzygy_analysis};
use koszul_ext::presentation::{parse_algebra, parse_module, AlgebraPresentation};
use koszul_ext::resolution::Resolution;
use koszul_ext::{Error, GradedAlgebra};

const SCHEMA: &str = "koszul-ext/report/v1";
const THREADS_VAR: &str = "KOSZUL_EXT_THREADS";

#[derive(Parser, Debug)]
#[command(name = "koszul-ext", version, about = "Ext algebras and periodicity over graded quiver algebras")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Override the unit `q`: a field element, or `generic` for a unit of
    /// maximal multiplicative order.
    #[arg(long, global = true)]
    q: Option<String>,
    /// Override the field, `Q` or `GF(p)`.
    #[arg(long, global = true)]
    field: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
struct OneModule {
    algebra: PathBuf,
    module: PathBuf,
    #[arg(long, default_value_t = 4)]
    n: usize,
}

#[derive(Args, Debug, Clone)]
struct Windowed {
    algebra: PathBuf,
    module: PathBuf,
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    window: usize,
}

#[derive(Args, Debug, Clone)]
struct AlgebraOnly {
    algebra: PathBuf,
    #[arg(long, default_value_t = 4)]
    n: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimal graded projective resolution with its differentials.
    Resolve(OneModule),
    /// Betti numbers.
    Betti(OneModule),
    /// Bigraded dimensions of Ext^n(M, N), N = M unless given.
    Ext {
        #[command(flatten)]
        args: OneModule,
        /// Second module file.
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// Yoneda product of two basis classes, each given as `n,i,k`.
    Yoneda {
        #[command(flatten)]
        args: OneModule,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Dimensions of the diagonal subalgebra and its complement.
    Diagonal(OneModule),
    /// Nilpotency of sampled elements of the complement of the diagonal.
    Nilpotency {
        #[command(flatten)]
        args: OneModule,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Periodicity verdict by direct syzygy comparison and by diagonal classes.
    Periodicity(Windowed),
    /// Complexity-one criterion for modules with all Betti numbers 1.
    Cx1(Windowed),
    /// Betti number comparison from diagonal classes of M and a class into L.
    BettiCompare {
        algebra: PathBuf,
        m: PathBuf,
        target: PathBuf,
        l: PathBuf,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m_degree: usize,
        #[arg(long, default_value_t = 8)]
        window: usize,
    },
    /// Syzygies and periods of all simple modules.
    SimpleSyzygy {
        algebra: PathBuf,
        #[arg(long, default_value_t = 8)]
        window: usize,
    },
    /// Hochschild cohomology dimensions with the diagonal split.
    Hochschild(AlgebraOnly),
    /// Ext algebra of the semisimple top of the algebra.
    ExtSimples(AlgebraOnly),
    /// Graded center of an Ext algebra (of the module if given, else of the top).
    Center {
        algebra: PathBuf,
        module: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long)]
        power_bound: Option<usize>,
    },
    /// Compares the diagonal of Hochschild cohomology with the graded center.
    VerifyGrcent(AlgebraOnly),
}

struct Loaded {
    presentation: AlgebraPresentation,
    algebra: Arc<GradedAlgebra>,
    info: Value,
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_algebra(path: &Path, common: &Common) -> anyhow::Result<Loaded> {
    let mut source = read(path)?;
    if let Some(f) = &common.field {
        let mut replaced = false;
        source = source
            .lines()
            .map(|line| {
                if !replaced && line.split_whitespace().next() == Some("field") {
                    replaced = true;
                    format!("field {f}")
                } else {
                    line.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join("\n");
        if !replaced {
            return Err(anyhow!("{}: no field line to override", path.display()));
        }
    }
    let mut presentation = parse_algebra(&source).with_context(|| format!("in {}", path.display()))?;
    if let Some(q) = &common.q {
        let value = if q == "generic" { presentation.field().generic_unit().to_string() } else { q.clone() };
        presentation =
            AlgebraPresentation::with_unit(&source, "q", &value).with_context(|| format!("in {} with q = {value}", path.display()))?;
    }
    let algebra = Arc::new(GradedAlgebra::from_presentation(&presentation).with_context(|| format!("in {}", path.display()))?);
    let info = json!({
        "path": path.display().to_string(),
        "field": presentation.field().to_string(),
        "units": presentation.field.named_scalars.iter().map(|(k, v)| (k.clone(), Value::String(v.to_string()))).collect::<Map<_, _>>(),
        "vertices": algebra.num_vertices(),
        "dims": algebra.dims(),
        "complete": algebra.is_complete(),
        "truncation": algebra.declared_truncation(),
    });
    Ok(Loaded {
        presentation,
        algebra,
        info,
    })
}

fn load_module(path: &Path, alg: &Loaded) -> anyhow::Result<GradedModule> {
    let text = read(path)?;
    let mp = parse_module(&text, &alg.presentation).with_context(|| format!("in {}", path.display()))?;
    GradedModule::from_presentation(&mp, alg.algebra.clone()).with_context(|| format!("in {}", path.display()))
}

fn module_info(path: &Path, m: &GradedModule) -> Value {
    json!({
        "path": path.display().to_string(),
        "dim": m.total_dim(),
        "degrees": [m.lo(), m.hi()],
        "graded_length": m.graded_length(),
    })
}

fn parse_class(spec: &str) -> anyhow::Result<(usize, i32, usize)> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(anyhow!("class `{spec}` must be `n,i,k`"));
    }
    Ok((parts[0].parse()?, parts[1].parse()?, parts[2].parse()?))
}

fn bidegree_dims(dims: impl IntoIterator<Item = ((usize, i32), usize)>) -> Value {
    Value::Array(dims.into_iter().map(|((n, i), d)| json!({"n": n, "i": i, "dim": d})).collect())
}

fn run(cmd: &Command, common: &Common) -> anyhow::Result<(Value, Value)> {
    let mut inputs = Map::new();
    let result = match cmd {
        Command::Resolve(a) | Command::Betti(a) => {
            let alg = load_algebra(&a.algebra, common)?;
            let m = load_module(&a.module, &alg)?;
            inputs.insert("algebra".into(), alg.info.clone());
            inputs.insert("module".into(), module_info(&a.module, &m));
            let res = Resolution::compute(&m, a.n)?;
            let profile = res.betti_profile(a.n);
            let linear = res.is_linear_up_to(a.n);
            if matches!(cmd, Command::Betti(_)) {
                json!({"betti": profile.betti, "all_ones": profile.all_ones, "bounded_in_window": profile.bounded_in_window, "linear": linear.linear})
            } else {
                let gens: Vec<Vec<i32>> = (0..=a.n).map(|k| res.generator_degrees(k)).collect();
                let diffs: Vec<Value> = (1..=a.n).map(|k| json!({"n": k, "matrix": res.render(k)})).collect();
                json!({
                    "betti": profile.betti,
                    "generator_degrees": gens,
                    "differentials": diffs,
                    "linear": linear.linear,
                    "first_nonlinear": linear.first_failure,
                    "minimal": res.is_minimal(),
                    "complex": res.is_complex(),
                    "exact": res.is_exact(),
                })
            }
        }
        Command::Ext { args: a, target } => {
            let alg = load_algebra(&a.algebra, common)?;
            let m = load_module(&a.module, &alg)?;
            inputs.insert("algebra".into(), alg.info.clone());
            inputs.insert("module".into(), module_info(&a.module, &m));
            let target_module = match target {
                Some(p) => {
                    let t = load_module(p, &alg)?;
                    inputs.insert("target".into(), module_info(p, &t));
                    t
                }
                None => m.clone(),
            };
            let res = Resolution::compute(&m, a.n + 1)?;
            let mut rows = Vec::new();
            let mut totals = Vec::new();
            let mut oracle_agrees = true;
            for n in 0..=a.n {
                let mut total = 0;
                for i in ext_degrees(&res, &target_module, n) {
                    let g = ext_group(&res, &target_module, n, i)?;
                    let oracle = ext_dim_via_syzygy(&res, &target_module, n, i)?;
                    oracle_agrees &= oracle == g.dim();
                    if g.dim() > 0 {
                        rows.push(json!({"n": n, "i": i, "dim": g.dim(), "cocycles": g.cocycle_dim(), "coboundaries": g.coboundary_dim()}));
                    }
                    total += g.dim();
                }
                totals.push(total);
            }
            json!({"slices": rows, "totals": totals, "oracle_agrees": oracle_agrees})
        }
        Command::Yoneda { args: a, left, right } => {
            let alg = load_algebra(&a.algebra, common)?;
            let m = load_module(&a.module, &alg)?;
            inputs.insert("algebra".into(), alg.info.clone());
            inputs.insert("module".into(), module_info(&a.module, &m));
            let (ln, li, lk) = parse_class(left)?;
            let (rn, ri, rk) = parse_class(right)?;
            let ext = ExtAlgebra::new(&m, a.n.max(ln + rn))?;
            let pick = |n: usize, i: i32, k: usize| {
                ext.basis((n, i))
                    .get(k)
                    .cloned()
                    .ok_or_else(|| anyhow!("Ext^{n}_{i} has dimension {}, no basis class {k}", ext.dim((n, i))))
            };
            let xi = pick(ln, li, lk)?;
            let eta = pick(rn, ri, rk)?;
            let prod = ext.product(&xi, &eta)?;
            let coords = ext.coordinates(&prod)?;
            let width = ext.dim(prod.bidegree());
            let dense: Vec<String> = coords.to_dense(width, alg.algebra.field()).iter().map(|c| c.to_string()).collect();
            json!({
                "left": [ln, li, lk],
                "right": [rn, ri, rk],
                "product_bidegree": [prod.n, prod.degree],
                "coordinates": dense,
                "zero": coords.is_zero(),
            })
        }
        Command::Diagonal(a) => {
            let alg = load_algebra(&a.algebra, common)?;
            let m = load_module(&a.module, &alg)?;
            inputs.insert("algebra".into(), alg.info.clone());
            inputs.insert("module".into(), module_info(&a.module, &m));
            let ext = ExtAlgebra::new(&m, a.n)?;
            let report = diagonal_subalgebra(&ext)?;
            let totals: Vec<usize> = (0..=a.n).map(|n| ext.total_dim(n)).collect();
            let rest: Vec<usize> = totals.iter().zip(&report.dims).map(|(t, d)| t - d).collect();
            json!({
                "delta_dims": report.dims,
                "rest_dims": rest,
                "ext_dims": totals,
                "closed": report.closed,
                "linear": ext.resolution().is_linear_up_to(a.n).linear,
                "slices": bidegree_dims(ext.dims()),
            })
        }
        Command::Nilpotency { args: a, samples, seed } => {
            let alg = load_algebra(&a.algebra, common)?;
            let m = load_module(&a.module, &alg)?;
            inputs.insert("algebra".into(), alg.info.clone());
            inputs.insert("module".into(), module_info(&a.module, &m));
            let ext = ExtAlgebra::new(&m, a.n)?;
            serde_json::to_value(nilpotency_survey(&ext, *samples, *seed)?)?
        }
        Command::Periodicity(a) | Command::Cx1(a) => {
            let alg = load_algebra(&a.algebra, common)?;
            let m = load_module(&a.module, &alg)?;
            inputs.insert("algebra".into(), alg.info.clone());
            inputs.insert("module".into(), module_info(&a.module, &m));
            if matches!(cmd, Command::Cx1(_)) {
                serde_json::to_value(cx1_criterion(&m, a.n, a.window)?)?
            } else {
                serde_json::to_value(detect_periodicity(&m, a.n, a.window)?)?
            }
        }
        Command::BettiCompare {
            algebra,
            m,
            target,
            l,
            i,
            n,
            m_degree,
            window,
        } => {
            let alg = load_algebra(algebra, common)?;
            let mm = load_module(m, &alg)?;
            let nn = load_module(target, &alg)?;
            let ll = load_module(l, &alg)?;
            inputs.insert("algebra".into(), alg.info.clone());
            inputs.insert("m".into(), module_info(m, &mm));
            inputs.insert("n".into(), module_info(target, &nn));
            inputs.insert("l".into(), module_info(l, &ll));
            serde_json::to_value(compare_betti(&mm, &nn, &ll, *i, *n, *m_degree, *window)?)?
        }
        Command::SimpleSyzygy { algebra, window } => {
            let alg = load_algebra(algebra, common)?;
            inputs.insert("algebra".into(), alg.info.clone());
            serde_json::to_value(simple_syzygy_analysis(&alg.algebra, *window)?)?
        }
        Command::Hochschild(a) => {
            let alg = load_algebra(&a.algebra, common)?;
            inputs.insert("algebra".into(), alg.info.clone());
            let hh = hochschild(&alg.algebra, a.n)?;
            json!({
                "dims": hh.dims(),
                "delta_dims": hh.delta_dims(),
                "rest_dims": hh.rest_dims(),
                "slices": bidegree_dims(hh.ext.dims()),
                "complete": alg.algebra.is_complete(),
            })
        }
        Command::ExtSimples(a) => {
            let alg = load_algebra(&a.algebra, common)?;
            inputs.insert("algebra".into(), alg.info.clone());
            let e = ext_algebra_of_semisimple(&alg.algebra, a.n)?;
            json!({
                "dims": (0..=a.n).map(|n| e.total_dim(n)).collect::<Vec<_>>(),
                "slices": bidegree_dims(e.dims()),
                "linear": e.resolution().is_linear_up_to(a.n).linear,
            })
        }
        Command::Center {
            algebra,
            module,
            n,
            power_bound,
        } => {
            let alg = load_algebra(algebra, common)?;
            inputs.insert("algebra".into(), alg.info.clone());
            let ext = match module {
                Some(p) => {
                    let m = load_module(p, &alg)?;
                    inputs.insert("module".into(), module_info(p, &m));
                    ExtAlgebra::new(&m, n + 1)?
                }
                None => ext_algebra_of_semisimple(&alg.algebra, n + 1)?,
            };
            let table = ext.table()?;
            let center = graded_center(table, *n)?;
            let witness = find_non_nilpotent_center(table, &center, *n, power_bound.unwrap_or(*n));
            json!({
                "dims": center.dims(),
                "ext_dims": (0..=*n).map(|k| ext.total_dim(k)).collect::<Vec<_>>(),
                "slices": center.slices.iter().map(|(b, v)| (*b, v.len())).map(|((n, i), d)| json!({"n": n, "i": i, "dim": d})).collect::<Vec<_>>(),
                "non_nilpotent_witness": witness,
            })
        }
        Command::VerifyGrcent(a) => {
            let alg = load_algebra(&a.algebra, common)?;
            inputs.insert("algebra".into(), alg.info.clone());
            serde_json::to_value(verify_gr_cent(&alg.algebra, a.n)?)?
        }
    };
    Ok((Value::Object(inputs), result))
}

fn command_echo() -> Value {
    let args: Vec<String> = std::env::args().skip(1).collect();
    Value::from(args)
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match x {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(x, indent + 1, out);
                    }
                    Value::Array(items) if items.iter().any(Value::is_object) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        for item in items {
                            out.push_str(&format!("{pad}  - {}\n", compact(item)));
                        }
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", compact(x))),
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", compact(other))),
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        other => other.to_string(),
    }
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v.trim().parse().with_context(|| format!("{THREADS_VAR} must be a positive integer"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::HypothesisFailed(_)) | Some(Error::PreconditionFailed(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.common.clone();
    let start = Instant::now();
    let outcome = configure_threads().and_then(|_| run(&cli.command, &common));
    let elapsed = start.elapsed().as_millis() as u64;
    match outcome {
        Ok((inputs, result)) => {
            let report = json!({
                "schema": SCHEMA,
                "command": command_echo(),
                "inputs": inputs,
                "result": result,
                "timing_ms": elapsed,
            });
            match common.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("serializable")),
                Format::Text => {
                    let mut out = String::new();
                    render_text(&report["result"], 0, &mut out);
                    print!("{out}");
                }
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            let code = exit_code(&err);
            if common.format == Format::Json {
                let report = json!({
                    "schema": SCHEMA,
                    "command": command_echo(),
                    "error": format!("{err:#}"),
                    "exit_code": code,
                });
                println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            }
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}
