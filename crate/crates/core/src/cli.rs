//! The `tacheck` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::buchi_check::{aggregate, check, run_bench_tba, to_csv, IterableCheck, Mode, SearchConfig, Verdict, Witness};
use crate::model::generators::{gen_model, gen_property, Family, Params};
use crate::model::{parse_model, print_model, product, Network, Tba, Transition};
use crate::omega_iter::{analyze, IterResult, LoopEnd, PreVerdict};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "tacheck", version, about = "Büchi emptiness checking for timed automata")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a benchmark model in the textual format.
    GenModel(GenModelArgs),
    /// Search for an accepting run.
    Check(CheckArgs),
    /// Decide whether a cyclic transition path can be repeated forever.
    Iterability(IterabilityArgs),
    /// Run both search modes over several seeds.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenModelArgs {
    #[arg(long)]
    pub family: Family,
    #[arg(long)]
    pub n: usize,
    /// CSMA/CD: add the busy loop on RETRY.
    #[arg(long)]
    pub fixed: bool,
    /// CSMA/CD: require y >= 1 when leaving BUSY and reset y on the busy loop.
    #[arg(long)]
    pub nonzeno: bool,
    /// Divide every constant by this factor, rounding up.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(i64).range(1..))]
    pub scale: i64,
    /// Output file, standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Also write the family's property automaton to this file.
    #[arg(long)]
    pub property_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub model: PathBuf,
    /// Property automaton file.
    #[arg(long, conflicts_with = "builtin")]
    pub property: Option<PathBuf>,
    /// Use the built-in property of a family.
    #[arg(long)]
    pub builtin: Option<Family>,
    /// Component count for the built-in property; defaults to the number of
    /// automata in the model minus one.
    #[arg(long)]
    pub n: Option<usize>,
    /// Scale factor applied to the built-in property.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(i64).range(1..))]
    pub scale: i64,
    #[arg(long, default_value = "idfss")]
    pub mode: Mode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Ask only whether the cycle is iterable from some valuation.
    #[arg(long)]
    pub sequence_only: bool,
    /// Print a CSV record instead of the plain report.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct IterabilityArgs {
    pub model: PathBuf,
    /// Comma separated transition indices of the flattened model, such as
    /// `t0,t3`. Indices are listed by `--list`.
    #[arg(long, required_unless_present = "list")]
    pub path: Option<String>,
    /// Print the transitions of the flattened model.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub family: Family,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    /// CSMA/CD: use the original model without the busy loop and the
    /// non-Zeno guard.
    #[arg(long)]
    pub unfixed: bool,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(i64).range(1..))]
    pub scale: i64,
    /// CSV output file, standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `argv`, runs the command and returns the process exit code:
/// 0 for success or an empty language, 1 for an accepting cycle, 2 for errors.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::GenModel(a) => gen_model_cmd(a, out).map(|_| 0),
        Command::Check(a) => check_cmd(a, out),
        Command::Iterability(a) => iterability_cmd(a, out).map(|_| 0),
        Command::Bench(a) => bench_cmd(a, out).map(|_| 0),
    }
}

fn read_model(path: &Path) -> Result<Network> {
    let text = fs::read_to_string(path)?;
    parse_model(&text)
}

fn write_or_print(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn gen_model_cmd(a: GenModelArgs, out: &mut dyn Write) -> Result<()> {
    let params = Params { fixed: a.fixed, nonzeno: a.nonzeno, ..Params::default() };
    let net = gen_model(a.family, a.n, &params).scaled(a.scale);
    write_or_print(a.output.as_deref(), &print_model(&net), out)?;
    if let Some(p) = a.property_out {
        fs::write(p, print_model(&gen_property(a.family, a.n, &params).scaled(a.scale)))?;
    }
    Ok(())
}

fn check_cmd(a: CheckArgs, out: &mut dyn Write) -> Result<i32> {
    let net = read_model(&a.model)?;
    let tba = if let Some(p) = &a.property {
        product(&net, &read_model(p)?)?
    } else if let Some(family) = a.builtin {
        let n = a.n.unwrap_or(net.automata.len().saturating_sub(1));
        product(&net, &gen_property(family, n, &Params::default()).scaled(a.scale))?
    } else {
        net.flatten()?
    };
    let mut cfg = SearchConfig::new(a.mode, a.seed);
    if a.sequence_only {
        cfg.iterable_check = IterableCheck::SequenceOnly;
    }
    let outcome = check(&tba, &cfg);
    let s = outcome.stats;
    if a.csv {
        let model = a.model.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let rec = crate::buchi_check::BenchRecord {
            model,
            n: a.n.unwrap_or(net.automata.len().saturating_sub(1)),
            mode: a.mode,
            seed: a.seed,
            stats: s,
        };
        write!(out, "{}", to_csv(&[rec]))?;
    } else {
        writeln!(out, "result: {}", s.result)?;
        writeln!(out, "states: {}", tba.num_states())?;
        writeln!(out, "visited nodes: {}", s.visited_nodes)?;
        writeln!(out, "subsumption skips: {}", s.subsumption_skips)?;
        writeln!(out, "iterability checks: {}", s.iterability_checks)?;
        match &outcome.witness {
            Some(Witness::Inclusion { state }) => {
                writeln!(out, "witness: zone inclusion at {}", tba.state_names[*state])?;
            }
            Some(Witness::Iterable { state, path, zone }) => {
                let p: Vec<String> = path.iter().map(|k| format!("t{k}")).collect();
                writeln!(out, "witness: iterable cycle {} at {}", p.join(","), tba.state_names[*state])?;
                writeln!(out, "from: {}", zone.to_constraints(&tba.clock_names_with_reference()))?;
            }
            None => {}
        }
    }
    Ok(match s.result {
        Verdict::Empty => 0,
        Verdict::CycleFound => 1,
    })
}

/// Parses `t3,5,t7` into transition indices of `tba` and checks that they
/// form a cycle.
pub fn parse_path(tba: &Tba, spec: &str) -> Result<Vec<usize>> {
    let mut path = Vec::new();
    for item in spec.split(',').map(str::trim) {
        let digits = item.strip_prefix('t').unwrap_or(item);
        let k: usize = digits.parse().map_err(|_| Error::Path(format!("`{item}` is not a transition index")))?;
        if k >= tba.transitions.len() {
            return Err(Error::Path(format!("t{k} does not exist, the model has {} transitions", tba.transitions.len())));
        }
        path.push(k);
    }
    let ts: Vec<&Transition> = path.iter().map(|&k| &tba.transitions[k]).collect();
    for i in 0..ts.len() {
        let (a, b) = (ts[i], ts[(i + 1) % ts.len()]);
        if a.dst != b.src {
            return Err(Error::Path(format!(
                "t{} ends in {} but t{} starts in {}",
                path[i],
                tba.state_names[a.dst],
                path[(i + 1) % ts.len()],
                tba.state_names[b.src]
            )));
        }
    }
    Ok(path)
}

fn describe(tba: &Tba, k: usize) -> String {
    let t = &tba.transitions[k];
    let names = &tba.clocks;
    let resets: Vec<&str> = t.resets.iter().map(|&c| names[c - 1].as_str()).collect();
    format!(
        "t{k}: {} -> {} guard {} reset {{{}}}{}",
        tba.state_names[t.src],
        tba.state_names[t.dst],
        t.guard.display(names),
        resets.join(", "),
        t.label.as_ref().map(|l| format!(" label {l}")).unwrap_or_default()
    )
}

fn iterability_cmd(a: IterabilityArgs, out: &mut dyn Write) -> Result<()> {
    let tba = read_model(&a.model)?.flatten()?;
    if a.list {
        for k in 0..tba.transitions.len() {
            writeln!(out, "{}", describe(&tba, k))?;
        }
    }
    let Some(spec) = a.path else { return Ok(()) };
    let path = parse_path(&tba, &spec)?;
    let seq: Vec<Transition> = path.iter().map(|&k| tba.transitions[k].clone()).collect();
    let res = analyze(&seq, tba.num_clocks());
    match &res.pre {
        PreVerdict::NotIterable(why) => {
            writeln!(out, "NotIterable ({})", why.describe(&tba.clocks))?;
            return Ok(());
        }
        PreVerdict::Iterable => writeln!(out, "preprocess: Iterable")?,
        PreVerdict::Reduced(r) => {
            let dropped: usize = seq.iter().zip(r).map(|(a, b)| a.guard.atoms.len() - b.guard.atoms.len()).sum();
            writeln!(out, "preprocess: Reduced ({dropped} guards on unreset clocks dropped)")?;
        }
    }
    match &res.result {
        IterResult::Iterable(w) => {
            writeln!(out, "Iterable")?;
            writeln!(out, "W: {}", w.to_constraints(&tba.clock_names_with_reference()))?;
        }
        IterResult::NotIterable => {
            let why = match res.end {
                LoopEnd::EmptyRelation => "the relation becomes empty",
                LoopEnd::BoundExceeded => "no stabilization within the bound",
                _ => "no valuation survives",
            };
            writeln!(out, "NotIterable ({why})")?;
        }
    }
    writeln!(out, "compositions: {} ({} squarings)", res.compositions(), res.squarings)?;
    Ok(())
}

fn bench_cmd(a: BenchArgs, out: &mut dyn Write) -> Result<()> {
    let params = if a.unfixed { Params::default() } else { Params::corrected() };
    let model = gen_model(a.family, a.n, &params).scaled(a.scale);
    let prop = gen_property(a.family, a.n, &params).scaled(a.scale);
    let tba = product(&model, &prop)?;
    let seeds: Vec<u64> = (0..a.seeds).collect();
    let records = run_bench_tba(a.family.name(), a.n, &tba, &seeds);
    let csv = to_csv(&records);
    match &a.out {
        Some(p) => {
            fs::write(p, &csv)?;
            writeln!(out, "mode   runs  cycles  visited mean/min/max/median      iter checks mean/min/max")?;
            for g in aggregate(&records) {
                writeln!(
                    out,
                    "{:<6} {:>4}  {:>6}  {:>9.1} {:>7} {:>7} {:>9.1}  {:>6.2} {:>4} {:>4}",
                    g.mode.name(),
                    g.runs,
                    g.cycles_found,
                    g.visited.mean,
                    g.visited.min,
                    g.visited.max,
                    g.visited.median,
                    g.iter_checks.mean,
                    g.iter_checks.min,
                    g.iter_checks.max
                )?;
            }
        }
        None => write!(out, "{csv}")?,
    }
    Ok(())
}
