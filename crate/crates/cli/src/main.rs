mod input;
mod report;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hnnconj::decision::{ENV_CONJUGATOR, ENV_IMAGE, ENV_MAX_K, ENV_ORBIT};
use hnnconj::dynamics::{stable_iterate_search, ImageTower};
use hnnconj::hnn::HnnPresentation;
use hnnconj::stallings::fold;
use hnnconj::{Bounds, Decision, Engine, Trace, Word};

use input::{exit_code, load_endomorphism, load_presentation, BoundsError, EXIT_USAGE};
use report::{query, Report, Verdict};

#[derive(Parser)]
#[command(name = "hnnconj", version, about = "Conjugacy in ascending HNN-extensions of free groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct BoundArgs {
    /// Largest exponent tried when iterating an orbit.
    #[arg(long, env = ENV_ORBIT, default_value_t = Bounds::default().orbit)]
    orbit_bound: usize,
    /// Longest conjugator tried by the bounded twisted search.
    #[arg(long, env = ENV_CONJUGATOR, default_value_t = Bounds::default().conjugator)]
    conjugator_bound: usize,
    /// Deepest preimage chain followed when probing the stable image.
    #[arg(long, env = ENV_IMAGE, default_value_t = Bounds::default().image)]
    image_bound: usize,
    /// Largest pullback stage computed (default: k0 + 16).
    #[arg(long, env = ENV_MAX_K)]
    max_k: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

impl BoundArgs {
    fn bounds(&self) -> Result<Bounds> {
        let b = Bounds {
            orbit: self.orbit_bound,
            conjugator: self.conjugator_bound,
            image: self.image_bound,
            max_k: self.max_k,
            ..Bounds::default()
        };
        b.validate().map_err(BoundsError)?;
        Ok(b)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Some p with φ^p(u) ∼ v·k, k ∈ ker φ (k = 1 for injective φ).
    Single,
    /// Some (p, q) with φ^p(u) ∼ φ^q(v).
    Pair,
    /// Some (p, q) with φ^p(u) φⁿ-twisted conjugate to φ^q(v).
    Twisted,
    /// Some (p, q) with φ^p(u) = φ^q(v).
    Equal,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether two elements of F ∗_φ are conjugate.
    Conj {
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long, required_unless_present = "batch")]
        g: Option<String>,
        #[arg(long, required_unless_present = "batch")]
        h: Option<String>,
        /// File with one `G H` pair per line; answers are printed in order.
        #[arg(long, conflicts_with_all = ["g", "h"])]
        batch: Option<PathBuf>,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Decide u = x⁻¹·v·φⁿ(x), or the (p, q) pair version when --n is given.
    Twisted {
        #[arg(long)]
        endo: PathBuf,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long)]
        n: Option<usize>,
        /// Conjugator length bound; overrides --conjugator-bound.
        #[arg(long)]
        bound: Option<usize>,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Exponent problems for an endomorphism.
    Brinkmann {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        endo: PathBuf,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// With `equal`: solve φ^p(u) = v·k with k ∈ ker φ instead.
        #[arg(long)]
        kernel: bool,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Per-stage report of the pullback dynamics of an injective φ.
    Dynamics {
        #[arg(long)]
        endo: PathBuf,
        /// Write one DOT file per stage into this directory.
        #[arg(long)]
        dot: Option<PathBuf>,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Fold a subgroup and report its core graph.
    Fold {
        #[arg(long, required = true, value_delimiter = ',')]
        gens: Vec<String>,
        #[arg(long)]
        rank: Option<usize>,
        /// Fold the conjugacy class (basepoint-free core).
        #[arg(long)]
        free: bool,
        /// Test membership of these words.
        #[arg(long, value_delimiter = ',')]
        contains: Vec<String>,
    },
    /// Print the DOT graph of a folded subgroup.
    Dot {
        #[arg(long, required = true, value_delimiter = ',')]
        gens: Vec<String>,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        free: bool,
        #[arg(long, default_value = "G")]
        name: String,
    },
}

fn emit(report: &Report, format: Format) -> Result<u8> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(report)?),
        Format::Text => println!("{}", report.to_text()),
    }
    Ok(report.decision.exit_code())
}

fn parse_word(s: &str, rank: usize) -> Result<Word> {
    Word::parse(s, rank).with_context(|| format!("parsing word `{s}`"))
}

fn conj_report(engine: &Engine, pres: &HnnPresentation, g: &str, h: &str) -> Result<Report> {
    let gw = pres.parse_word(g).with_context(|| format!("parsing `{g}`"))?;
    let hw = pres.parse_word(h).with_context(|| format!("parsing `{h}`"))?;
    let mut trace = Trace::new();
    let d = engine.hnn_conjugate(pres, &gw, &hw, &mut trace);
    let q = query("conj", [("g", gw.to_string()), ("h", hw.to_string())]);
    let r = Report::new(q, &d, trace, engine.bounds());
    Ok(match d {
        Decision::Yes(w) => r
            .with_witness([
                ("conjugator", w.conjugator.to_string()),
                ("x", w.x.to_string()),
                ("inner", w.inner.to_string()),
            ])
            .with_pair(w.p, w.q, Some(w.n)),
        _ => r,
    })
}

fn run_conj(
    presentation: &Path,
    g: Option<String>,
    h: Option<String>,
    batch: Option<PathBuf>,
    args: &BoundArgs,
) -> Result<u8> {
    let pres = load_presentation(presentation)?;
    let engine = Engine::new(args.bounds()?);
    let Some(batch) = batch else {
        let (Some(g), Some(h)) = (g, h) else {
            bail!("--g and --h are required");
        };
        return emit(&conj_report(&engine, &pres, &g, &h)?, args.format);
    };
    let text = std::fs::read_to_string(&batch).with_context(|| format!("reading {}", batch.display()))?;
    let queries: Vec<(String, String)> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let mut parts = l.split_whitespace();
            match (parts.next(), parts.next(), parts.next()) {
                (Some(g), Some(h), None) => Ok((g.to_string(), h.to_string())),
                _ => bail!("batch line `{l}` is not `G H`"),
            }
        })
        .collect::<Result<_>>()?;
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(queries.len().max(1));
    let mut slots: Vec<Option<Result<Report>>> = (0..queries.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let chunk = queries.len().div_ceil(workers).max(1);
        for (qs, out) in queries.chunks(chunk).zip(slots.chunks_mut(chunk)) {
            let (engine, pres) = (&engine, &pres);
            scope.spawn(move || {
                for ((g, h), slot) in qs.iter().zip(out.iter_mut()) {
                    *slot = Some(conj_report(engine, pres, g, h));
                }
            });
        }
    });
    let mut worst = Verdict::Yes;
    let mut stdout = std::io::stdout().lock();
    for slot in slots {
        let r = slot.expect("every query answered")?;
        match args.format {
            Format::Json => writeln!(stdout, "{}", serde_json::to_string(&r)?)?,
            Format::Text => writeln!(stdout, "{}", r.to_text())?,
        }
        worst = worst.max_by_code(r.decision);
    }
    Ok(worst.exit_code())
}

impl Verdict {
    fn max_by_code(self, other: Verdict) -> Verdict {
        if other.exit_code() > self.exit_code() {
            other
        } else {
            self
        }
    }
}

fn run_twisted(
    endo: &Path,
    u: &str,
    v: &str,
    n: Option<usize>,
    bound: Option<usize>,
    args: &BoundArgs,
) -> Result<u8> {
    let phi = load_endomorphism(endo)?;
    let (u, v) = (parse_word(u, phi.rank())?, parse_word(v, phi.rank())?);
    let mut bounds = args.bounds()?;
    if let Some(b) = bound {
        bounds.conjugator = b;
        bounds.validate().map_err(BoundsError)?;
    }
    let engine = Engine::new(bounds);
    let mut trace = Trace::new();
    let q = query("twisted", [("u", u.to_string()), ("v", v.to_string())]);
    let report = match n {
        None => {
            let d = engine.twisted_conjugate(&phi, &u, &v, &mut trace);
            let r = Report::new(q, &d, trace, engine.bounds());
            match d {
                Decision::Yes(x) => r.with_witness([("x", x.to_string())]),
                _ => r,
            }
        }
        Some(n) => {
            let d = engine.twisted_pair_general(&phi, n, &u, &v, &mut trace);
            let r = Report::new(q, &d, trace, engine.bounds());
            match d {
                Decision::Yes(p) => r.with_witness([("x", p.conjugator.to_string())]).with_pair(p.p, p.q, Some(n)),
                _ => r,
            }
        }
    };
    emit(&report, args.format)
}

fn run_brinkmann(endo: &Path, mode: Mode, u: &str, v: &str, n: usize, kernel: bool, args: &BoundArgs) -> Result<u8> {
    let phi = load_endomorphism(endo)?;
    let (u, v) = (parse_word(u, phi.rank())?, parse_word(v, phi.rank())?);
    let engine = Engine::new(args.bounds()?);
    let mut trace = Trace::new();
    let mode_name = match mode {
        Mode::Single => "single",
        Mode::Pair => "pair",
        Mode::Twisted => "twisted",
        Mode::Equal => "equal",
    };
    let q = query("brinkmann", [("mode", mode_name.to_string()), ("u", u.to_string()), ("v", v.to_string())]);
    let report = match mode {
        Mode::Single => {
            let d = engine.retract_lift_conj(&phi, &u, &v, &mut trace);
            let r = Report::new(q, &d, trace, engine.bounds());
            match d {
                Decision::Yes(l) => r
                    .with_witness([("conjugator", l.conjugator.to_string()), ("kernel", l.kernel.to_string())])
                    .with_pair(l.p, 0, None),
                _ => r,
            }
        }
        Mode::Pair => {
            let d = engine.two_exp_general(&phi, &u, &v, &mut trace);
            let r = Report::new(q, &d, trace, engine.bounds());
            match d {
                Decision::Yes(p) => r
                    .with_witness([("conjugator", p.conjugator.to_string())])
                    .with_pair(p.p, p.q, None),
                _ => r,
            }
        }
        Mode::Twisted => {
            let d = engine.twisted_pair_general(&phi, n, &u, &v, &mut trace);
            let r = Report::new(q, &d, trace, engine.bounds());
            match d {
                Decision::Yes(p) => r.with_witness([("x", p.conjugator.to_string())]).with_pair(p.p, p.q, Some(n)),
                _ => r,
            }
        }
        Mode::Equal if kernel => {
            let d = engine.equality_kernel(&phi, &u, &v, &mut trace);
            let r = Report::new(q, &d, trace, engine.bounds());
            match d {
                Decision::Yes(k) => r.with_witness([("kernel", k.kernel.to_string())]).with_pair(k.p, 0, None),
                _ => r,
            }
        }
        Mode::Equal => {
            let d = engine.equality_pair(&phi, &u, &v, &mut trace);
            let r = Report::new(q, &d, trace, engine.bounds());
            match d {
                Decision::Yes(e) => r.with_pair(e.p, e.q, None),
                _ => r,
            }
        }
    };
    emit(&report, args.format)
}

fn run_dynamics(endo: &Path, dot: Option<PathBuf>, args: &BoundArgs) -> Result<u8> {
    let phi = load_endomorphism(endo)?;
    let bounds = args.bounds()?;
    let max_k = bounds.max_k_for(hnnconj::dynamics::k0(phi.rank()));
    let search = stable_iterate_search(&phi, max_k, bounds.max_vertices, bounds.max_word_len)
        .context("pullback dynamics")?;
    let mut out = String::new();
    out.push_str(&format!("rank {} k0 {} max_k {}\n", phi.rank(), hnnconj::dynamics::k0(phi.rank()), max_k));
    let mut tower = ImageTower::new(&phi, bounds.max_vertices);
    for stage in &search.stages {
        out.push_str(&format!(
            "stage {} lambda {} hat_lambda {}\n",
            stage.index,
            stage.lambda.len(),
            stage.hat_lambda.len()
        ));
        for (c, rep) in stage.hat_lambda.iter().zip(&stage.representatives) {
            match rep {
                Some(r) => out.push_str(&format!("  component rank 1 representative {}\n", r.word())),
                None => out.push_str(&format!("  component rank {}\n", c.rank())),
            }
        }
        if let Some(dir) = &dot {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let image = tower.graph(stage.index).context("image graph")?;
            let mut text = image.to_dot(&format!("image_{}", stage.index));
            for (n, c) in stage.hat_lambda.iter().enumerate() {
                text.push_str(&c.to_dot(&format!("hat_lambda_{}_{}", stage.index, n)));
            }
            let path = dir.join(format!("stage_{}.dot", stage.index));
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    let verdict = match &search.decision {
        Decision::Yes(s) => {
            out.push_str(&format!("stable k {}\n", s.k));
            if s.is_empty() {
                out.push_str("  empty\n");
            }
            for c in &s.components {
                out.push_str(&format!(
                    "  certified {} t {} d {}\n",
                    c.representative.word(),
                    c.t,
                    c.d
                ));
            }
            Verdict::Yes
        }
        Decision::No(c) => {
            out.push_str(&format!("no {c:?}\n"));
            Verdict::No
        }
        Decision::Inconclusive(e) => {
            out.push_str(&format!("inconclusive {:?} {}\n", e.bound, e.value));
            Verdict::Inconclusive
        }
    };
    if args.format == Format::Json {
        let value = serde_json::json!({
            "query": {"command": "dynamics"},
            "decision": verdict,
            "stable": search.decision.clone().yes(),
            "stages": search.stages.iter().map(|s| serde_json::json!({
                "index": s.index,
                "lambda": s.lambda.len(),
                "hat_lambda": s.hat_lambda.len(),
                "representatives": s.representatives.iter()
                    .map(|r| r.as_ref().map(|c| c.word().to_string()))
                    .collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "bounds": bounds,
        });
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        print!("{out}");
    }
    Ok(verdict.exit_code())
}

fn parse_gens(gens: &[String], rank: Option<usize>) -> Result<(Vec<Word>, usize)> {
    let rank = rank.unwrap_or(hnnconj::words::MAX_NAMED_RANK);
    let words = gens.iter().map(|g| parse_word(g, rank)).collect::<Result<Vec<_>>>()?;
    let used = words.iter().map(Word::max_generator).max().unwrap_or(1).max(1);
    Ok((words, if rank == hnnconj::words::MAX_NAMED_RANK { used } else { rank }))
}

fn run_fold(gens: &[String], rank: Option<usize>, free: bool, contains: &[String]) -> Result<u8> {
    let (words, rank) = parse_gens(gens, rank)?;
    let g = fold(&words, rank, !free);
    println!("vertices {}", g.num_vertices());
    println!("edges {}", g.num_edges());
    println!("rank {}", g.rank());
    let basis: Vec<String> = g.basis().iter().map(Word::to_string).collect();
    println!("basis {}", basis.join(","));
    let mut all = true;
    for c in contains {
        let w = parse_word(c, rank)?;
        let member = if free {
            hnnconj::stallings::conjugate_into(&w, &g).is_some()
        } else {
            g.contains(&w)
        };
        println!("contains {w} {member}");
        all &= member;
    }
    Ok(if all { 0 } else { 1 })
}

fn run_dot(gens: &[String], rank: Option<usize>, free: bool, name: &str) -> Result<u8> {
    let (words, rank) = parse_gens(gens, rank)?;
    print!("{}", fold(&words, rank, !free).to_dot(name));
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Conj {
            presentation,
            g,
            h,
            batch,
            bounds,
        } => run_conj(&presentation, g, h, batch, &bounds),
        Command::Twisted {
            endo,
            u,
            v,
            n,
            bound,
            bounds,
        } => run_twisted(&endo, &u, &v, n, bound, &bounds),
        Command::Brinkmann {
            mode,
            endo,
            u,
            v,
            n,
            kernel,
            bounds,
        } => run_brinkmann(&endo, mode, &u, &v, n, kernel, &bounds),
        Command::Dynamics { endo, dot, bounds } => run_dynamics(&endo, dot, &bounds),
        Command::Fold {
            gens,
            rank,
            free,
            contains,
        } => run_fold(&gens, rank, free, &contains),
        Command::Dot { gens, rank, free, name } => run_dot(&gens, rank, free, &name),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
