use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use twisted_ep::algebra::{alg_mul, Order, Reducer, DEFAULT_STEP_CAP};
use twisted_ep::ep::EpTuple;
use twisted_ep::io::{self, KatsuraSpec, StabilizeSpec, TermSpec, TupleSpec};
use twisted_ep::katsura::{self, KatsuraTriple, Verdict, DEFAULT_PATH_LEN_CAP};
use twisted_ep::ktheory::{self, BlockMap, KhReport, Matrix};
use twisted_ep::semigroup::{self, STriple};
use twisted_ep::{EdgeId, Error, Field, VertexId};

#[derive(Parser)]
#[command(name = "twep", version, about = "Twisted Exel-Pardo tuples, their algebras, and Katsura K-theory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print the full JSON report instead of a summary.
    #[arg(long, global = true)]
    json: bool,
    /// Coefficient field, e.g. Q or F7; overrides the input file.
    #[arg(long, global = true)]
    field: Option<Field>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TupleInput {
    /// Tuple (or bare graph) as JSON.
    #[arg(long)]
    tuple: PathBuf,
}

#[derive(Args)]
struct TripleInput {
    /// Katsura triple as JSON.
    #[arg(long)]
    triple: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Check the action, cocycle and EP laws.
    Validate {
        #[command(flatten)]
        input: TupleInput,
        /// Random samples per law for the integers.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
    /// Product of two elements in the Cohn algebra.
    Mul {
        #[command(flatten)]
        input: TupleInput,
        /// Two element files.
        #[arg(long, num_args = 2, required = true)]
        element: Vec<PathBuf>,
    },
    /// Normal form in the quotient algebra.
    Nf {
        #[command(flatten)]
        input: TupleInput,
        #[arg(long)]
        element: PathBuf,
        /// Section choices `v=e,w=f`.
        #[arg(long)]
        section: Option<String>,
        #[arg(long, default_value_t = DEFAULT_STEP_CAP)]
        cap_steps: usize,
        /// Rewrite in a seeded random order.
        #[arg(long)]
        shuffle: bool,
    },
    /// Coordinates of a kernel element in the basis `α q_v g β*`.
    Kbasis {
        #[command(flatten)]
        input: TupleInput,
        #[arg(long)]
        element: PathBuf,
        #[arg(long)]
        section: Option<String>,
        #[arg(long, default_value_t = DEFAULT_STEP_CAP)]
        cap_steps: usize,
    },
    /// Build the tuple of a Katsura triple.
    KatsuraBuild {
        #[command(flatten)]
        input: TripleInput,
    },
    Katsura {
        #[command(subcommand)]
        action: KatsuraAction,
    },
    Kspi {
        #[command(flatten)]
        input: TripleInput,
    },
    Hausdorff {
        #[command(flatten)]
        input: TripleInput,
        #[arg(long, default_value_t = DEFAULT_PATH_LEN_CAP)]
        cap_paths: usize,
        /// Largest `l` tried; the lcm of the entries of A by default.
        #[arg(long)]
        l_cap: Option<u64>,
        /// Exit with 3 when the verdict is undetermined.
        #[arg(long)]
        certain: bool,
    },
    Kreg {
        #[command(flatten)]
        input: TripleInput,
    },
    /// KH₀ and KH₁ of the twisted Katsura algebra.
    Ktheory {
        #[command(flatten)]
        input: TripleInput,
    },
    /// Build `E` from `M, N, P`, optionally conjugating with a given or searched `Y`.
    Stabilize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        search_y: bool,
        #[arg(long, default_value_t = 3)]
        y_bound: i64,
        #[arg(long, default_value_t = 100_000)]
        max_tries: usize,
    },
}

#[derive(Subcommand)]
enum KatsuraAction {
    Build {
        #[command(flatten)]
        input: TripleInput,
    },
    /// KSPI, Hausdorff and K-regularity checks together.
    Check {
        #[command(flatten)]
        input: TripleInput,
        #[arg(long, default_value_t = DEFAULT_PATH_LEN_CAP)]
        cap_paths: usize,
    },
}

/// Report plus exit status: 0 ok, 1 negative verdict, 3 undetermined.
struct Outcome {
    report: Value,
    summary: String,
    status: u8,
}

fn ok(report: Value, summary: String) -> Outcome {
    Outcome { report, summary, status: 0 }
}

fn read(path: &FsPath) -> twisted_ep::Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

fn load_tuple(path: &FsPath, field: Option<Field>) -> twisted_ep::Result<EpTuple> {
    io::from_json::<TupleSpec>(&read(path)?)?.build(field)
}

fn load_triple(path: &FsPath, field: Option<Field>) -> twisted_ep::Result<(KatsuraSpec, KatsuraTriple)> {
    let spec: KatsuraSpec = io::from_json(&read(path)?)?;
    let k = spec.build(field)?;
    Ok((spec, k))
}

fn load_element(t: &EpTuple, path: &FsPath) -> twisted_ep::Result<twisted_ep::algebra::AlgElem> {
    let terms: Vec<TermSpec> = io::from_json(&read(path)?)?;
    io::parse_element(t, &terms)
}

fn parse_section(t: &EpTuple, s: Option<&str>) -> twisted_ep::Result<Vec<(VertexId, EdgeId)>> {
    let Some(s) = s else { return Ok(Vec::new()) };
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| {
            let (v, e) = pair
                .split_once('=')
                .ok_or_else(|| Error::Schema(format!("section entry {pair:?} is not v=e")))?;
            Ok((t.graph().vertex(v.trim())?, t.graph().edge(e.trim())?))
        })
        .collect()
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
        Verdict::Undetermined => "undetermined",
    }
}

fn matrix_json(m: &Matrix) -> Value {
    json!(m.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn block_map_json(e: &BlockMap) -> Value {
    json!({
        "top": matrix_json(&e.top),
        "coupling": e.coupling.iter().map(matrix_json).collect::<Vec<_>>(),
        "bottom": matrix_json(&e.bottom),
        "unit_orders": e.unit_orders,
    })
}

fn kh_json(r: &KhReport) -> Value {
    json!({
        "KH0": r.kh0.to_string(),
        "KH1": r.kh1.to_string(),
        "coker_degree1": r.coker1.to_string(),
        "ker_degree0_rank": r.ker0.rank,
        "snf_degree0": r.deg0_diagonal.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "snf_degree1": r.deg1_diagonal.iter().map(ToString::to_string).collect::<Vec<_>>(),
    })
}

fn kspi_json(k: &KatsuraTriple) -> (Value, bool) {
    let r = katsura::is_kspi(k);
    let holds = r.holds();
    (
        json!({
            "kspi": holds,
            "zero_pattern": r.zero_pattern,
            "reachable": r.reachable_strict,
            "reachable_allowing_length_zero": r.reachable_lenient,
            "two_loops": r.two_loops,
            "diagonal_ones": r.diagonal_ones,
            "failure": r.failure,
        }),
        holds,
    )
}

fn hausdorff_json(k: &KatsuraTriple, cap: usize, l_cap: Option<u64>) -> (Value, Verdict) {
    let r = katsura::hausdorff_condition(k, cap, l_cap);
    let g = k.graph();
    let names = |es: &[EdgeId]| es.iter().map(|&e| g.edge_name(e).to_string()).collect::<Vec<_>>();
    let witness = r.witness.as_ref().map(|(l, path, walk)| json!({"l": l, "path": names(path), "cycle": names(walk)}));
    let pairs: Vec<Value> = r
        .pairs
        .iter()
        .map(|&(v, w, verdict)| json!({"v": k.vertices()[v], "w": k.vertices()[w], "verdict": verdict_name(verdict)}))
        .collect();
    (json!({"verdict": verdict_name(r.verdict), "pairs": pairs, "witness": witness}), r.verdict)
}

fn kreg_json(k: &KatsuraTriple) -> Value {
    let r = katsura::kreg_conditions(k);
    let flat: Vec<Value> = r
        .flat
        .iter()
        .map(|&(v, w, f)| json!({"v": k.vertices()[v], "w": k.vertices()[w], "flat": f}))
        .collect();
    json!({"condition_i": r.cond_i, "condition_ii": r.cond_ii, "flat": flat})
}

fn run(cli: &Cli) -> twisted_ep::Result<Outcome> {
    let field = cli.field;
    match &cli.command {
        Command::Validate { input, samples } => {
            let t = load_tuple(&input.tuple, field)?;
            let r = t.validate(cli.seed, *samples);
            let s = t.stratify();
            let g = t.graph();
            let names = |vs: &[VertexId]| vs.iter().map(|&v| g.vertex_name(v).to_string()).collect::<Vec<_>>();
            let failures: Vec<Value> = r.failures.iter().map(|f| json!({"law": f.law, "witness": f.witness})).collect();
            let valid = r.is_valid();
            let report = json!({
                "command": "validate",
                "valid": valid,
                "checked": r.checked,
                "failures": failures,
                "group": t.group().to_string(),
                "field": t.field().to_string(),
                "stratification": {
                    "reg0": names(&s.reg0),
                    "reg1": names(&s.reg1),
                    "other": names(&s.other),
                    "pseudo_free": s.pseudo_free,
                    "partially_pseudo_free": s.partially_pseudo_free,
                },
            });
            let summary = if valid {
                format!("valid ({} checks)", r.checked)
            } else {
                let lines: Vec<String> = r.failures.iter().map(|f| format!("  {}: {}", f.law, f.witness)).collect();
                format!("invalid\n{}", lines.join("\n"))
            };
            Ok(Outcome { report, summary, status: if valid { 0 } else { 1 } })
        }
        Command::Mul { input, element } => {
            let t = load_tuple(&input.tuple, field)?;
            let x = load_element(&t, &element[0])?;
            let y = load_element(&t, &element[1])?;
            let p = alg_mul(&t, &x, &y);
            let omega = match (x.len(), y.len()) {
                (1, 1) => {
                    let a = STriple::Elem(x.terms().next().unwrap().0.clone());
                    let b = STriple::Elem(y.terms().next().unwrap().0.clone());
                    Some(semigroup::omega(&t, &a, &b).map_or("0".to_string(), |w| w.to_string()))
                }
                _ => None,
            };
            let report = json!({"command": "mul", "element": io::element_to_terms(&t, &p), "omega": omega});
            Ok(ok(report, p.format(&t)))
        }
        Command::Nf { input, element, section, cap_steps, shuffle } => {
            let t = load_tuple(&input.tuple, field)?;
            let x = load_element(&t, element)?;
            let mut r = Reducer::with_section(&t, &parse_section(&t, section.as_deref())?)?;
            r.step_cap = *cap_steps;
            if *shuffle {
                r.order = Order::Shuffled(cli.seed);
            }
            let y = r.nf(&x)?;
            let report = json!({"command": "nf", "element": io::element_to_terms(&t, &y), "zero": y.is_zero()});
            Ok(ok(report, y.format(&t)))
        }
        Command::Kbasis { input, element, section, cap_steps } => {
            let t = load_tuple(&input.tuple, field)?;
            let x = load_element(&t, element)?;
            let mut r = Reducer::with_section(&t, &parse_section(&t, section.as_deref())?)?;
            r.step_cap = *cap_steps;
            let coords = match r.to_kernel_basis(&x) {
                Ok(c) => c,
                Err(Error::NotInKernel(why)) => {
                    let report = json!({"command": "kbasis", "in_kernel": false, "reason": why});
                    return Ok(Outcome { report, summary: format!("not in the kernel: {why}"), status: 1 });
                }
                Err(e) => return Err(e),
            };
            let g = t.graph();
            let terms: Vec<Value> = coords
                .iter()
                .map(|(k, c)| {
                    json!({
                        "alpha": g.path_names(&k.alpha),
                        "v": g.vertex_name(k.v),
                        "g": t.group().format(k.g),
                        "beta": g.path_names(&k.beta),
                        "coeff": c.to_string(),
                    })
                })
                .collect();
            let summary = coords.iter().map(|(k, c)| format!("{c} · {}", k.format(&t))).collect::<Vec<_>>().join(" + ");
            Ok(ok(json!({"command": "kbasis", "in_kernel": true, "terms": terms}), summary))
        }
        Command::KatsuraBuild { input } | Command::Katsura { action: KatsuraAction::Build { input } } => {
            let (_, k) = load_triple(&input.triple, field)?;
            let t = k.build_tuple();
            let spec = TupleSpec::from_tuple(&t);
            let summary = format!("{} vertices, {} edges over {}", t.graph().num_vertices(), t.graph().num_edges(), t.field());
            Ok(ok(serde_json::to_value(spec).expect("tuple specs serialise"), summary))
        }
        Command::Katsura { action: KatsuraAction::Check { input, cap_paths } } => {
            let (_, k) = load_triple(&input.triple, field)?;
            let (kspi, holds) = kspi_json(&k);
            let (haus, verdict) = hausdorff_json(&k, *cap_paths, None);
            let report = json!({"command": "katsura check", "kspi": kspi, "hausdorff": haus, "kreg": kreg_json(&k)});
            let summary = format!("kspi: {holds}, hausdorff: {}", verdict_name(verdict));
            Ok(ok(report, summary))
        }
        Command::Kspi { input } => {
            let (_, k) = load_triple(&input.triple, field)?;
            let (mut report, holds) = kspi_json(&k);
            report["command"] = json!("kspi");
            let summary = match &report["failure"] {
                Value::String(why) => format!("not KSPI: {why}"),
                _ => "KSPI".to_string(),
            };
            Ok(Outcome { report, summary, status: if holds { 0 } else { 1 } })
        }
        Command::Hausdorff { input, cap_paths, l_cap, certain } => {
            let (_, k) = load_triple(&input.triple, field)?;
            let (mut report, verdict) = hausdorff_json(&k, *cap_paths, *l_cap);
            report["command"] = json!("hausdorff");
            let status = match verdict {
                Verdict::Holds => 0,
                Verdict::Fails => 1,
                Verdict::Undetermined if *certain => 3,
                Verdict::Undetermined => 0,
            };
            Ok(Outcome { summary: verdict_name(verdict).to_string(), report, status })
        }
        Command::Kreg { input } => {
            let (_, k) = load_triple(&input.triple, field)?;
            let mut report = kreg_json(&k);
            report["command"] = json!("kreg");
            let summary = format!("condition (i): {}, condition (ii): {}", report["condition_i"], report["condition_ii"]);
            Ok(ok(report, summary))
        }
        Command::Ktheory { input } => {
            let (spec, k) = load_triple(&input.triple, field)?;
            let units = spec.units(k.field())?;
            let map = ktheory::katsura_block_map(&k, &units)?;
            let kh = ktheory::kh_groups(&map);
            let (bf, checked) = ktheory::bf_modules(&k, &units)?;
            let report = json!({
                "command": "ktheory",
                "field": k.field().to_string(),
                "units": {"generators": units.generators(), "orders": units.orders(), "group": units.group().to_string()},
                "KH0": kh.kh0.to_string(),
                "KH1": kh.kh1.to_string(),
                "witness": {"block_map": block_map_json(&map), "groups": kh_json(&kh)},
                "BF": bf.to_string(),
                "BF_checked": checked.to_string(),
            });
            Ok(ok(report, format!("KH0 = {}\nKH1 = {}", kh.kh0, kh.kh1)))
        }
        Command::Stabilize { input, search_y, y_bound, max_tries } => {
            let spec: StabilizeSpec = io::from_json(&read(input)?)?;
            let f = io::resolve_field(spec.field.as_deref(), field)?;
            let units = ktheory::UnitsModel::for_field(f, &spec.primes)?;
            let (m, n, p, y) = spec.matrices(&units)?;
            let e = ktheory::stabilize(&m, &n, &p, units.orders())?;
            let kh = ktheory::kh_groups(&e);
            let mut report = json!({"command": "stabilize", "E": block_map_json(&e), "groups": kh_json(&kh)});
            let mut lines = vec![format!("KH0 = {}, KH1 = {}", kh.kh0, kh.kh1)];
            let mut status = 0;
            if let Some(y) = y {
                let (u, v) = ktheory::realization_matrices(&y);
                let conj = e.conjugate(&u, &v)?;
                let solved = ktheory::solve_katsura(&conj, &units);
                report["conjugate"] = json!({
                    "UEV": block_map_json(&conj),
                    "groups": kh_json(&ktheory::kh_groups(&conj)),
                    "triple": solved.as_ref().ok().map(KatsuraSpec::from_triple),
                    "obstruction": solved.as_ref().err(),
                });
                lines.push(match &solved {
                    Ok(_) => "UEV is a Katsura block matrix".to_string(),
                    Err(why) => format!("UEV is not a Katsura block matrix: {why}"),
                });
            }
            if *search_y {
                match ktheory::search_y(&e, &units, *y_bound, *max_tries) {
                    Ok((y, k)) => {
                        report["search"] =
                            json!({"found": true, "Y": matrix_json(&y), "triple": KatsuraSpec::from_triple(&k)});
                        lines.push(format!("found Y = {y}"));
                    }
                    Err(why) => {
                        report["search"] = json!({"found": false, "reason": why});
                        lines.push(why);
                        status = 1;
                    }
                }
            }
            Ok(Outcome { report, summary: lines.join("\n"), status })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.report).expect("reports serialise"));
            } else {
                println!("{}", out.summary);
            }
            ExitCode::from(out.status)
        }
        Err(e) => {
            let code = match e {
                Error::Divergence(_) => 3,
                Error::NotInKernel(_) => 1,
                _ => 2,
            };
            if cli.json {
                println!("{}", json!({"error": e.to_string()}));
            }
            eprintln!("twep: {e}");
            ExitCode::from(code)
        }
    }
}
