use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mmtk_core::foundation::{self, DependencyCut, JudgeError, Judgment, DEFAULT_FUEL, LF_THEORY};
use mmtk_core::integration::{self, IntegError, IntegrationBundle, Solution, SystemImpl};
use mmtk_core::kernel::{
    well_formed_graph, CheckOpts, CheckReport, Code, Context, GraphDecl, KernelError, TheoryGraph,
};
use mmtk_core::morphisms::{self, MorphError, MorphismCompare};
use mmtk_core::prelude::base_program;
use mmtk_core::syntax::{
    export_graph, parse_context_str, parse_morph_str, parse_object_str, parse_query_file,
    parse_solution_file, parse_widening_file, print_bundle, print_context, print_graph,
    print_morph, print_object, print_subst, BundleDecl, ParseError, Program, SolutionDecl,
    SysDecl,
};

#[derive(Parser)]
#[command(
    name = "mmtk",
    version,
    about = "Theory graphs with partial morphisms: checking, translation, safe integration"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Emit machine-readable JSON on stdout
    #[arg(long, global = true)]
    json: bool,
    /// Reduction-step budget (overrides the MMTK_FUEL environment variable)
    #[arg(long, global = true, value_name = "N")]
    fuel: Option<u64>,
    /// Reject assignments whose type or definiens is filtered away
    #[arg(long, global = true)]
    strict_filtering: bool,
    /// Do not preload the built-in LF theory
    #[arg(long, global = true)]
    no_prelude: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse graph files and report every well-formedness violation
    Check {
        files: Vec<PathBuf>,
    },
    /// Apply a morphism to a term
    Apply {
        files: Vec<PathBuf>,
        /// Morphism expression, e.g. "mu1" or "eta2 ; mu1" or "id(Nat)"
        #[arg(long)]
        morph: String,
        /// Term over the morphism's domain
        #[arg(long)]
        term: String,
        /// Print a filtered image (containing ?hid) instead of failing
        #[arg(long)]
        show_filtered: bool,
    },
    /// Decide a typing or equality judgment
    #[command(group(ArgGroup::new("mode").required(true).args(["typing", "eq"])))]
    Judge {
        files: Vec<PathBuf>,
        /// Theory the judgment is stated over
        #[arg(long)]
        theory: String,
        /// Typing: does `--lhs` have type `--rhs`?
        #[arg(long = "type")]
        typing: bool,
        /// Equality: are `--lhs` and `--rhs` equal?
        #[arg(long)]
        eq: bool,
        #[arg(long, value_name = "OBJ")]
        lhs: String,
        #[arg(long, value_name = "OBJ")]
        rhs: String,
        /// Context, e.g. "[$x : Nat/N, $y]"
        #[arg(long, value_name = "CTX")]
        ctx: Option<String>,
        /// JSON file with {"d_type": [["T","c"],...], "d_def": [...]}; the
        /// judgment may only use the listed dependencies
        #[arg(long, value_name = "FILE")]
        cut: Option<PathBuf>,
    },
    /// Compose morphisms and print the signature
    Compose {
        files: Vec<PathBuf>,
        #[arg(long)]
        morph: String,
    },
    /// Compare two parallel morphisms symbol by symbol
    Vieweq {
        files: Vec<PathBuf>,
        #[arg(long, value_enum)]
        mode: VieweqMode,
        #[arg(long)]
        m1: String,
        #[arg(long)]
        m2: String,
    },
    /// Translate a query through a bundle and optionally verify a solution
    Translate {
        files: Vec<PathBuf>,
        /// Query file (may carry an inline solution block)
        #[arg(long)]
        query: PathBuf,
        /// Solution block in its own file
        #[arg(long)]
        solution: Option<PathBuf>,
        /// Bundle name (defaults to the only bundle declared)
        #[arg(long)]
        bundle: Option<String>,
        /// Proceed even when the bundle laws do not hold
        #[arg(long = "unsafe")]
        unsafe_ok: bool,
    },
    /// Extract the hid-free steps of a term
    Sketch {
        files: Vec<PathBuf>,
        #[arg(long)]
        theory: String,
        #[arg(long)]
        term: String,
        /// Check each step against the accessible axioms and earlier steps
        #[arg(long)]
        obligations: bool,
    },
    /// Widen a bundle's specification and re-check the laws
    Widen {
        files: Vec<PathBuf>,
        /// Widening file: new spec declarations plus view extensions
        #[arg(long)]
        ext: PathBuf,
        #[arg(long)]
        bundle: Option<String>,
    },
    /// Emit the graph, the check report, or a bundle as JSON
    Export {
        files: Vec<PathBuf>,
        #[arg(long, value_enum)]
        what: ExportWhat,
        #[arg(long)]
        bundle: Option<String>,
    },
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum VieweqMode {
    Eq,
    Leq,
    Inverse,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ExportWhat {
    Graph,
    Report,
    Bundle,
}

enum Failure {
    /// Bad invocation, unreadable input, parse error: exit 2.
    Usage(String),
    /// The input is meaningful and the answer is no: exit 1.
    Semantic(String),
    /// Undecided within the step budget: exit 3.
    Fuel(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Semantic(_) => 1,
            Failure::Fuel(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Semantic(m) | Failure::Fuel(m) => m,
        }
    }
}

type CRes<T> = Result<T, Failure>;

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Failure {
        Failure::Usage(e.to_string())
    }
}

impl From<KernelError> for Failure {
    fn from(e: KernelError) -> Failure {
        Failure::Semantic(e.to_string())
    }
}

impl From<MorphError> for Failure {
    fn from(e: MorphError) -> Failure {
        Failure::Semantic(e.to_string())
    }
}

impl From<JudgeError> for Failure {
    fn from(e: JudgeError) -> Failure {
        Failure::Semantic(e.to_string())
    }
}

impl From<IntegError> for Failure {
    fn from(e: IntegError) -> Failure {
        match e {
            IntegError::FuelExhausted(_) => Failure::Fuel(e.to_string()),
            _ => Failure::Semantic(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    // Die silently on a closed pipe (`mmtk export ... | head`) instead of
    // panicking mid-write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn effective_fuel(g: &Global) -> CRes<u64> {
    if let Some(f) = g.fuel {
        return Ok(f);
    }
    match std::env::var("MMTK_FUEL") {
        Ok(s) => s
            .parse()
            .map_err(|_| Failure::Usage(format!("MMTK_FUEL is not a number: {s}"))),
        Err(_) => Ok(DEFAULT_FUEL),
    }
}

fn load(files: &[PathBuf], g: &Global) -> CRes<Program> {
    let mut prog = if g.no_prelude { Program::new() } else { base_program() };
    for f in files {
        let text = fs::read_to_string(f)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", f.display())))?;
        prog.parse_into(&text, &f.display().to_string())?;
    }
    Ok(prog)
}

fn opts(g: &Global) -> CRes<CheckOpts> {
    Ok(CheckOpts { fuel: effective_fuel(g)?, strict_filtering: g.strict_filtering })
}

fn code_str(c: &Code) -> String {
    match serde_json::to_value(c) {
        Ok(Value::String(s)) => s,
        _ => format!("{c:?}"),
    }
}

fn print_report_human(rep: &CheckReport) {
    for v in &rep.violations {
        let mut line = format!("error[{}]: {}", code_str(&v.code), v.message);
        if let Some(sp) = &v.span {
            line.push_str(&format!(" ({}:{}:{})", sp.file, sp.line, sp.col));
        }
        println!("{line}");
    }
    if rep.ok() {
        println!("ok");
    } else {
        println!("{} violation(s)", rep.violations.len());
    }
}

fn report_exit(rep: &CheckReport) -> u8 {
    if rep.violations.iter().any(|v| v.code == Code::FuelExhausted) {
        3
    } else if rep.ok() {
        0
    } else {
        1
    }
}

fn pick_bundle<'p>(prog: &'p Program, name: Option<&str>) -> CRes<&'p BundleDecl> {
    match name {
        Some(n) => prog
            .bundles
            .iter()
            .find(|b| b.name == n)
            .ok_or_else(|| Failure::Usage(format!("no bundle named {n} in the input files"))),
        None => match prog.bundles.as_slice() {
            [one] => Ok(one),
            [] => Err(Failure::Usage("no bundle declared in the input files".to_string())),
            many => Err(Failure::Usage(format!(
                "{} bundles declared; pick one with --bundle",
                many.len()
            ))),
        },
    }
}

fn bundle_from_decl(
    graph: &TheoryGraph,
    d: &BundleDecl,
    fuel: u64,
) -> Result<IntegrationBundle, IntegError> {
    integration::build_bundle(
        graph,
        &d.spec,
        SystemImpl {
            spec: d.spec.clone(),
            sys: d.sys1.sys.clone(),
            mu: d.sys1.via.clone(),
            eta: d.sys1.inv.clone(),
        },
        SystemImpl {
            spec: d.spec.clone(),
            sys: d.sys2.sys.clone(),
            mu: d.sys2.via.clone(),
            eta: d.sys2.inv.clone(),
        },
        fuel,
    )
}

fn without_prelude(g: &TheoryGraph, prelude_loaded: bool) -> TheoryGraph {
    if !prelude_loaded {
        return g.clone();
    }
    TheoryGraph {
        decls: g
            .decls
            .iter()
            .filter(|d| !matches!(d, GraphDecl::Theory(t) if t.name == LF_THEORY))
            .cloned()
            .collect(),
    }
}

fn failed_laws(b: &IntegrationBundle) -> Vec<&'static str> {
    let mut out = Vec::new();
    if b.laws.io_id == Some(false) {
        out.push("i;o = id (on unfiltered symbols)");
    }
    if !b.laws.mu1_o_eq_mu2 {
        out.push("mu1;o = mu2");
    }
    if b.laws.mu2_i_eq_mu1 == Some(false) {
        out.push("mu2;i = mu1");
    }
    out
}

fn run(cli: Cli) -> CRes<u8> {
    let g = &cli.global;
    match &cli.cmd {
        Cmd::Check { files } => {
            let prog = load(files, g)?;
            let rep = well_formed_graph(&prog.graph, &opts(g)?, &prog.spans);
            if g.json {
                println!("{}", serde_json::to_string_pretty(&rep).unwrap());
            } else {
                print_report_human(&rep);
            }
            Ok(report_exit(&rep))
        }

        Cmd::Apply { files, morph, term, show_filtered } => {
            let prog = load(files, g)?;
            let m = parse_morph_str(&prog.graph, morph, "<morph>")?;
            let (dom, cod) = morphisms::morphism_signature(&prog.graph, &m)?;
            let o = parse_object_str(&prog.graph, term, "<term>", &dom)?;
            let img = morphisms::apply_morphism(&prog.graph, &m, &o)?;
            if img.contains_hid() && !show_filtered {
                return Err(Failure::Semantic(format!(
                    "the image is filtered: {} (use --show-filtered to print it)",
                    print_object(&img)
                )));
            }
            if g.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "domain": dom,
                        "codomain": cod,
                        "image": img,
                        "filtered": img.contains_hid(),
                    }))
                    .unwrap()
                );
            } else {
                println!("{}", print_object(&img));
            }
            Ok(0)
        }

        Cmd::Judge { files, theory, typing, eq: _, lhs, rhs, ctx, cut } => {
            let prog = load(files, g)?;
            let fuel = effective_fuel(g)?;
            let ctx = match ctx {
                Some(c) => parse_context_str(&prog.graph, c, "<ctx>", theory)?,
                None => Context::default(),
            };
            let lhs = parse_object_str(&prog.graph, lhs, "<lhs>", theory)?;
            let rhs = parse_object_str(&prog.graph, rhs, "<rhs>", theory)?;
            let result = match cut {
                Some(path) => {
                    let text = fs::read_to_string(path).map_err(|e| {
                        Failure::Usage(format!("cannot read {}: {e}", path.display()))
                    })?;
                    let cut: DependencyCut = serde_json::from_str(&text).map_err(|e| {
                        Failure::Usage(format!("bad cut file {}: {e}", path.display()))
                    })?;
                    let j = if *typing {
                        Judgment::Type { ctx, obj: lhs, ty: rhs }
                    } else {
                        Judgment::Eq { ctx, lhs, rhs }
                    };
                    foundation::check_with_cut_result(&prog.graph, theory, &j, &cut, fuel)?
                }
                None => {
                    if *typing {
                        foundation::check_type(&prog.graph, theory, &ctx, &lhs, &rhs, fuel)?
                    } else {
                        foundation::check_eq(&prog.graph, theory, &ctx, &lhs, &rhs, fuel)?
                    }
                }
            };
            if g.json {
                println!("{}", serde_json::to_string_pretty(&result).unwrap());
            } else if result.holds {
                let dt: Vec<String> =
                    result.cut.d_type.iter().map(|(t, c)| format!("{t}/{c}")).collect();
                let dd: Vec<String> =
                    result.cut.d_def.iter().map(|(t, c)| format!("{t}/{c}")).collect();
                println!("holds");
                println!("d_type: [{}]", dt.join(", "));
                println!("d_def: [{}]", dd.join(", "));
            } else {
                println!("does not hold: {}", result.reason.clone().unwrap_or_default());
            }
            Ok(if result.fuel_exhausted {
                3
            } else if result.holds {
                0
            } else {
                1
            })
        }

        Cmd::Compose { files, morph } => {
            let prog = load(files, g)?;
            let m = parse_morph_str(&prog.graph, morph, "<morph>")?;
            let (from, to) = morphisms::morphism_signature(&prog.graph, &m)?;
            if g.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "morph": print_morph(&m),
                        "from": from,
                        "to": to,
                    }))
                    .unwrap()
                );
            } else {
                println!("{} : {from} -> {to}", print_morph(&m));
            }
            Ok(0)
        }

        Cmd::Vieweq { files, mode, m1, m2 } => {
            let prog = load(files, g)?;
            let fuel = effective_fuel(g)?;
            let m1 = parse_morph_str(&prog.graph, m1, "<m1>")?;
            let m2 = parse_morph_str(&prog.graph, m2, "<m2>")?;
            match mode {
                VieweqMode::Eq | VieweqMode::Leq => {
                    let cmp: MorphismCompare = if *mode == VieweqMode::Eq {
                        morphisms::morphism_eq(&prog.graph, &m1, &m2, fuel)?
                    } else {
                        morphisms::morphism_leq(&prog.graph, &m1, &m2, fuel)?
                    };
                    if g.json {
                        println!("{}", serde_json::to_string_pretty(&cmp).unwrap());
                    } else if cmp.holds {
                        println!("holds");
                    } else {
                        println!("does not hold");
                        for ((t, c), why) in &cmp.failures {
                            println!("  {t}/{c}: {why}");
                        }
                    }
                    Ok(if cmp.fuel_exhausted {
                        3
                    } else if cmp.holds {
                        0
                    } else {
                        1
                    })
                }
                VieweqMode::Inverse => {
                    let rep = morphisms::is_partial_inverse(&prog.graph, &m1, &m2, fuel)?;
                    if g.json {
                        println!("{}", serde_json::to_string_pretty(&rep).unwrap());
                    } else {
                        println!(
                            "{} (eq: {}, leq: {})",
                            if rep.holds { "holds" } else { "does not hold" },
                            rep.eq.holds,
                            rep.leq.holds
                        );
                    }
                    Ok(if rep.fuel_exhausted {
                        3
                    } else if rep.holds {
                        0
                    } else {
                        1
                    })
                }
            }
        }

        Cmd::Translate { files, query, solution, bundle, unsafe_ok } => {
            let prog = load(files, g)?;
            let fuel = effective_fuel(g)?;
            let d = pick_bundle(&prog, bundle.as_deref())?;
            let b = bundle_from_decl(&prog.graph, d, fuel)?;
            if b.laws.fuel_exhausted {
                return Err(Failure::Fuel("evaluating the bundle laws".to_string()));
            }
            let bad = failed_laws(&b);
            if !bad.is_empty() {
                if !unsafe_ok {
                    return Err(Failure::Semantic(format!(
                        "bundle laws do not hold ({}); pass --unsafe to proceed anyway",
                        bad.join("; ")
                    )));
                }
                eprintln!(
                    "warning: proceeding despite failing bundle laws ({})",
                    bad.join("; ")
                );
            }
            let goal_theory = if b.i.is_some() { &b.s2.sys } else { &b.spec };
            let qtext = fs::read_to_string(query)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", query.display())))?;
            let qf = parse_query_file(
                &prog.graph,
                &qtext,
                &query.display().to_string(),
                goal_theory,
                &b.s1.sys,
            )?;
            let sol: Option<SolutionDecl> = match solution {
                Some(path) => {
                    if qf.solution.is_some() {
                        return Err(Failure::Usage(
                            "the query file already has a solution block; drop --solution"
                                .to_string(),
                        ));
                    }
                    let text = fs::read_to_string(path).map_err(|e| {
                        Failure::Usage(format!("cannot read {}: {e}", path.display()))
                    })?;
                    Some(parse_solution_file(
                        &prog.graph,
                        &text,
                        &path.display().to_string(),
                        &b.s1.sys,
                    )?)
                }
                None => qf.solution.clone(),
            };

            let (ic, iff) = integration::translate_query(&prog.graph, &b, &qf.query)?;
            let mut out = json!({
                "bundle": d.name,
                "directed": b.i.is_none(),
                "translated_context": ic,
                "translated_goal": iff,
                "laws": b.laws,
            });
            if !g.json {
                println!("translated context: {}", print_context(&ic));
                println!("translated goal: {}", print_object(&iff));
            }
            let mut exit = 0u8;
            if let Some(sol) = sol {
                let s: Solution = integration::verify_solution(
                    &prog.graph,
                    &b,
                    &qf.query,
                    &sol.subst,
                    &sol.proof,
                    fuel,
                )?;
                let obligations = match &s.sketch {
                    Some(sk) => {
                        Some(integration::check_sketch_obligations(&prog.graph, &s.theory, sk, fuel)?)
                    }
                    None => None,
                };
                if !g.json {
                    if s.verified {
                        println!("verified over {}", s.theory);
                    } else if s.sketch.is_some() {
                        println!("sketch-only over {}", s.theory);
                    } else {
                        println!("not verified over {}", s.theory);
                        exit = 1;
                    }
                    println!("answer: {}", print_subst(&s.subst));
                    println!("proof: {}", print_object(&s.proof));
                    if let Some(sk) = &s.sketch {
                        println!("gaps: {}", sk.gaps);
                        for (i, step) in sk.steps.iter().enumerate() {
                            println!("step {i}: {}", print_object(step));
                        }
                    }
                    if let Some(obs) = &obligations {
                        for (i, ok) in obs {
                            println!(
                                "obligation {i}: {}",
                                if *ok { "discharged" } else { "open" }
                            );
                        }
                    }
                    if let Some(note) = &s.note {
                        println!("note: {note}");
                    }
                } else {
                    if !s.verified && s.sketch.is_none() {
                        exit = 1;
                    }
                    out["solution"] = serde_json::to_value(&s).unwrap();
                    if let Some(obs) = obligations {
                        out["obligations"] = serde_json::to_value(obs).unwrap();
                    }
                }
            }
            if g.json {
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            }
            Ok(exit)
        }

        Cmd::Sketch { files, theory, term, obligations } => {
            let prog = load(files, g)?;
            let fuel = effective_fuel(g)?;
            if prog.graph.theory(theory).is_none() {
                return Err(Failure::Semantic(format!("unknown theory {theory}")));
            }
            let o = parse_object_str(&prog.graph, term, "<term>", theory)?;
            let sk = integration::extract_sketch(&o);
            let obs = if *obligations {
                Some(integration::check_sketch_obligations(&prog.graph, theory, &sk, fuel)?)
            } else {
                None
            };
            if g.json {
                let mut out = json!({ "steps": sk.steps, "gaps": sk.gaps });
                if let Some(obs) = obs {
                    out["obligations"] = serde_json::to_value(obs).unwrap();
                }
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            } else {
                println!("gaps: {}", sk.gaps);
                for (i, step) in sk.steps.iter().enumerate() {
                    let suffix = match &obs {
                        Some(list) => {
                            if list[i].1 {
                                " [discharged]"
                            } else {
                                " [open]"
                            }
                        }
                        None => "",
                    };
                    println!("step {i}: {}{suffix}", print_object(step));
                }
            }
            Ok(0)
        }

        Cmd::Widen { files, ext, bundle } => {
            let prog = load(files, g)?;
            let o = opts(g)?;
            let d = pick_bundle(&prog, bundle.as_deref())?;
            let b = bundle_from_decl(&prog.graph, d, o.fuel)?;
            let ext_text = fs::read_to_string(ext)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", ext.display())))?;
            let input = parse_widening_file(
                &prog.graph,
                &ext_text,
                &ext.display().to_string(),
                &d.spec,
                &d.sys1.sys,
                &d.sys2.sys,
            )?;
            let outcome = integration::widen(&prog.graph, &b, &input, &o)?;

            let stem = artifact_stem(&d.src_file);
            let graph_path = format!("{stem}.widened.mmtx");
            let bundle_path = format!("{stem}.widened.bundle.mmtx");
            let printable = without_prelude(&outcome.graph, !g.no_prelude);
            fs::write(&graph_path, print_graph(&printable))
                .map_err(|e| Failure::Usage(format!("cannot write {graph_path}: {e}")))?;
            let new_decl = BundleDecl {
                name: format!("{}_w", d.name),
                spec: outcome.new_spec.clone(),
                sys1: SysDecl {
                    sys: d.sys1.sys.clone(),
                    via: mmtk_core::morphisms::MorphismExpr::named(outcome.names.mu1.clone()),
                    inv: Some(mmtk_core::morphisms::MorphismExpr::named(
                        outcome.names.eta1.clone(),
                    )),
                },
                sys2: SysDecl {
                    sys: d.sys2.sys.clone(),
                    via: mmtk_core::morphisms::MorphismExpr::named(outcome.names.mu2.clone()),
                    inv: outcome
                        .names
                        .eta2
                        .clone()
                        .map(mmtk_core::morphisms::MorphismExpr::named),
                },
                src_file: bundle_path.clone(),
            };
            fs::write(&bundle_path, format!("{}\n", print_bundle(&new_decl)))
                .map_err(|e| Failure::Usage(format!("cannot write {bundle_path}: {e}")))?;

            let laws_ok = outcome.bundle.as_ref().is_some_and(|nb| failed_laws(nb).is_empty());
            let fuel_hit = outcome.report.violations.iter().any(|v| v.code == Code::FuelExhausted)
                || outcome.bundle.as_ref().is_some_and(|nb| nb.laws.fuel_exhausted);
            if g.json {
                let mut out = serde_json::to_value(&outcome).unwrap();
                out["artifacts"] = json!([graph_path, bundle_path]);
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            } else {
                if !outcome.report.ok() {
                    print_report_human(&outcome.report);
                }
                let before = &outcome.eta1_filtered_before;
                let after = &outcome.eta1_filtered_after;
                println!(
                    "eta1 filters {} symbol(s) before, {} after",
                    before.len(),
                    after.len()
                );
                for (t, c) in before.iter().filter(|q| !after.contains(q)) {
                    println!("  now translated: {t}/{c}");
                }
                if let Some(nb) = &outcome.bundle {
                    let bad = failed_laws(nb);
                    if bad.is_empty() {
                        println!("laws hold for {}", outcome.new_spec);
                    } else {
                        println!("laws failing: {}", bad.join("; "));
                    }
                }
                println!("wrote {graph_path}");
                println!("wrote {bundle_path}");
            }
            Ok(if fuel_hit {
                3
            } else if !outcome.report.ok() || !laws_ok {
                1
            } else {
                0
            })
        }

        Cmd::Export { files, what, bundle } => {
            let prog = load(files, g)?;
            let o = opts(g)?;
            match what {
                ExportWhat::Graph => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&export_graph(&prog.graph)).unwrap()
                    );
                    Ok(0)
                }
                ExportWhat::Report => {
                    let rep = well_formed_graph(&prog.graph, &o, &prog.spans);
                    println!("{}", serde_json::to_string_pretty(&rep).unwrap());
                    Ok(report_exit(&rep))
                }
                ExportWhat::Bundle => {
                    let d = pick_bundle(&prog, bundle.as_deref())?;
                    let b = bundle_from_decl(&prog.graph, d, o.fuel)?;
                    println!("{}", serde_json::to_string_pretty(&b).unwrap());
                    Ok(if b.laws.fuel_exhausted { 3 } else { 0 })
                }
            }
        }
    }
}

/// peano.bundle.mmtx -> peano ; peano.mmtx -> peano ; anything else verbatim.
fn artifact_stem(src: &str) -> String {
    let p = Path::new(src);
    let name = p.file_name().and_then(|s| s.to_str()).unwrap_or(src);
    let stem = name
        .strip_suffix(".bundle.mmtx")
        .or_else(|| name.strip_suffix(".mmtx"))
        .unwrap_or(name);
    match p.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            format!("{}/{stem}", dir.display())
        }
        _ => stem.to_string(),
    }
}
