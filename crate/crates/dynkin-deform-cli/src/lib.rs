//! Command-line driver: argument parsing, file loading and the commands.

pub mod export;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use dynkin_deform::deform::{
    admissibility_equations, build_equation_system, extract_substitutions, free_thetas, Deformation, EquationSystem, HomomorphismForm, PinSet,
    SolutionAssignment,
};
use dynkin_deform::poly::{Element, Scalar};
use dynkin_deform::quiver::arrow_family;
use dynkin_deform::verify::{
    check_round_trip, instantiate_homomorphism, invert_homomorphism, make_numeric_deformation, relation_defects, sample_free_values, sample_rng,
    verify_solution, VerifyMode,
};
use dynkin_deform::{ChooseStrategy, DynkinType, LocalBasis, PathBasis, SubstitutionSet};
use std::io::Write;
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug, Clone)]
#[command(name = "dynkin-deform", about = "Bases, deformations and isomorphism equations for P(E_n)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(clap::Args, Debug, Clone)]
pub struct RunConfig {
    /// Dynkin type: e6, e7 or e8.
    #[arg(long = "type", global = true, default_value = "e7", value_parser = parse_type)]
    pub dynkin: DynkinType,
    /// Order in which unresolved words become basis elements.
    #[arg(long, global = true, default_value = "sorted", value_parser = parse_strategy)]
    pub strategy: ChooseStrategy,
    /// Apply the admissibility substitutions to generated equations.
    #[arg(long, global = true)]
    pub apply_subst: bool,
    /// Allow building the E8 path forest (several GB, minutes).
    #[arg(long, global = true)]
    pub large_memory: bool,
    /// Number of random deformations for numeric verification.
    #[arg(long, global = true, default_value_t = 20)]
    pub sample_count: usize,
    /// Seed for all sampling.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// File of `alpha[k][j] = c` pins.
    #[arg(long, global = true)]
    pub pin_set: Option<PathBuf>,
    /// File of `alpha[k][j] = <polynomial in theta>` values.
    #[arg(long, global = true)]
    pub solution: Option<PathBuf>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

fn parse_type(s: &str) -> Result<DynkinType, String> {
    s.parse().map_err(|e: dynkin_deform::Error| e.to_string())
}

fn parse_strategy(s: &str) -> Result<ChooseStrategy, String> {
    s.parse().map_err(|e: dynkin_deform::Error| e.to_string())
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Basis words of R(E_n).
    BasisR,
    /// Basis paths of P(E_n).
    BasisP,
    /// Matrix of dim e_i P(E_n) e_j.
    Dims,
    /// Forest statistics of R(E_n) and P(E_n).
    Stats,
    /// Admissibility equations.
    Adm,
    /// Triangular substitutions solving the admissibility equations.
    Subst,
    /// Correction slots of the general homomorphism.
    HomForm,
    /// Summary of the isomorphism equation system.
    System,
    /// Monomial counts of the unpinned system per vertex.
    Counts,
    /// Checks a solution against the equation system.
    Verify,
    /// Builds the inverse of an instantiated homomorphism and checks both compositions.
    Invert,
    /// Writes the equation system.
    Export,
}

/// Runs a command, writing to `out`. Returns `false` when a check failed.
pub fn run(cmd: Command, cfg: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    let t = cfg.dynkin;
    match cmd {
        Command::BasisR => {
            let lb = LocalBasis::new(t);
            for id in 0..lb.len() as u32 {
                let label = if id >= 3 { format!("theta[{}]", id - 2) } else { "-".into() };
                writeln!(out, "{id}\t{}\t{}", lb.name(id), label)?;
            }
        }
        Command::BasisP => {
            let pb = path_basis(cfg)?;
            writeln!(out, "# id\tlength\tsource\ttarget\tpath")?;
            for b in 0..pb.len() as u32 {
                writeln!(out, "{b}\t{}\t{}\t{}\t{}", pb.length(b), pb.source(b), pb.target(b), pb.name(b))?;
            }
        }
        Command::Dims => {
            let pb = path_basis(cfg)?;
            let m = pb.dims_matrix();
            for row in &m {
                let cells: Vec<String> = row.iter().map(|d| format!("{d:3}")).collect();
                writeln!(out, "{}", cells.join(" "))?;
            }
            writeln!(out, "total {}", pb.len())?;
        }
        Command::Stats => {
            let lb = LocalBasis::new(t);
            let rows = [("R", Some(lb.stats())), ("P", if t == DynkinType::E8 && !cfg.large_memory { None } else { Some(path_basis(cfg)?.stats()) })];
            writeln!(out, "algebra\tbasis\tdepth\tnodes\tnon-leaf non-root")?;
            for (name, s) in rows {
                match s {
                    Some(s) => writeln!(out, "{name}({t})\t{}\t{}\t{}\t{}", s.basis_size, s.depth, s.total_nodes, s.non_leaf_non_root)?,
                    None => writeln!(out, "{name}({t})\tskipped: needs --large-memory")?,
                }
            }
        }
        Command::Adm => {
            let lb = LocalBasis::new(t);
            let sys = admissibility_equations(&lb);
            for e in &sys.equations {
                writeln!(out, "[{}] {} = 0", lb.name(e.tag), e.poly)?;
            }
            writeln!(out, "# {} equations, at most {} terms", sys.equations.len(), sys.max_terms())?;
        }
        Command::Subst => {
            let lb = LocalBasis::new(t);
            let subst = extract_substitutions(&lb, &admissibility_equations(&lb))?;
            for (v, rhs) in subst.iter() {
                writeln!(out, "{v} = {rhs}")?;
            }
            let free: Vec<String> = free_thetas(&lb, &subst).iter().map(|i| format!("theta[{i}]")).collect();
            writeln!(out, "# {} substitutions, at most {} terms; free: {}", subst.len(), subst.iter().map(|(_, p)| p.num_terms()).max().unwrap_or(0), free.join(" "))?;
        }
        Command::HomForm => {
            let pb = path_basis(cfg)?;
            let form = HomomorphismForm::new(&pb, pins(cfg)?)?;
            let q = &pb.forest.quiver;
            for k in 0..form.num_arrows() {
                let (bar, i) = arrow_family(pb.n(), k);
                writeln!(out, "# arrow {k} {} (family {i}{}) slots {}", q.arrow_names[k], if bar { ", reversed" } else { "" }, form.slot_count(k))?;
                for (j, &b) in form.slots[k].iter().enumerate() {
                    let slot = (k, j + 1);
                    let pinned = form.pins.get(slot).map(|c| format!("\tpinned {c}")).unwrap_or_default();
                    writeln!(out, "alpha[{k}][{}]\t{}{pinned}", j + 1, pb.name(b))?;
                }
            }
        }
        Command::System => {
            let (_, _, sys, _) = system(cfg)?;
            writeln!(out, "# type {t} strategy {} pins {} substituted {}", cfg.strategy, sys.pins, sys.substituted)?;
            writeln!(out, "vertex\tequations\tnontrivial\tmonomials")?;
            for v in &sys.vertices {
                let nontrivial = v.equations.iter().filter(|(_, p)| !p.is_zero()).count();
                let terms: usize = v.equations.iter().map(|(_, p)| p.num_terms()).sum();
                writeln!(out, "{}\t{}\t{}\t{}", v.vertex, v.equations.len(), nontrivial, terms)?;
            }
            writeln!(out, "total\t{}\t{}\t{}", sys.num_equations(), sys.num_nontrivial(), sys.coefficient_counts().iter().sum::<usize>())?;
        }
        Command::Counts => {
            let pb = path_basis(cfg)?;
            let lb = LocalBasis::new(t);
            let counts = dynkin_deform::deform::coefficient_counts(&pb, &lb)?;
            let cells: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
            writeln!(out, "# monomials per vertex, type {t}, strategy {}", cfg.strategy)?;
            writeln!(out, "{}", cells.join("\t"))?;
        }
        Command::Verify => {
            let (pb, lb, sys, subst) = system(cfg)?;
            let sol = solution(cfg)?;
            let mode = if cfg.sample_count == 0 { VerifyMode::Symbolic } else { VerifyMode::Numeric { samples: cfg.sample_count, seed: cfg.seed } };
            let report = verify_solution(&pb, &lb, &sys, &sol, &subst, mode)?;
            write!(out, "{report}")?;
            if report.ok() {
                writeln!(out)?;
            }
            return Ok(report.ok());
        }
        Command::Invert => {
            let pb = path_basis(cfg)?;
            let lb = LocalBasis::new(t);
            let subst = extract_substitutions(&lb, &admissibility_equations(&lb))?;
            let form = HomomorphismForm::new(&pb, pins(cfg)?)?;
            let sol = solution(cfg)?;
            let mut rng = sample_rng(cfg.seed, 0);
            let f = make_numeric_deformation(&lb, &subst, &sample_free_values(&lb, &subst, &mut rng))?;
            let phi = instantiate_homomorphism(&pb, &form, &sol, &f)?;
            if let Some(v) = relation_defects(&pb, &lb, &phi, &f)?.iter().position(|e| !e.is_zero()) {
                writeln!(out, "FAILED: relation at vertex {v} does not vanish under the instantiated map")?;
                return Ok(false);
            }
            let psi = invert_homomorphism(&pb, &phi)?;
            for (k, img) in psi.images.iter().enumerate() {
                writeln!(out, "psi({}) = {}", pb.forest.quiver.arrow_names[k], element_text(&pb, img))?;
            }
            let rt = check_round_trip(&pb, &lb, &f, &phi, &psi)?;
            if rt.ok() {
                writeln!(out, "OK: phi(psi(a)) = a and psi(phi(a)) = a for all {} arrows", psi.images.len())?;
            } else {
                writeln!(out, "FAILED: phi(psi(a)) != a for arrows {:?}; psi(phi(a)) != a for arrows {:?}", rt.phi_psi_failures, rt.psi_phi_failures)?;
            }
            return Ok(rt.ok());
        }
        Command::Export => {
            let (pb, _, sys, _) = system(cfg)?;
            let text = match cfg.format {
                Format::Text => export::system_text(&pb, &sys),
                Format::Json => export::system_json(&pb, &sys),
            };
            out.write_all(text.as_bytes())?;
        }
    }
    Ok(true)
}

/// Renders `Σ c · path` with paths in parentheses.
pub fn element_text(pb: &PathBasis, e: &Element<Scalar>) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (&b, c)) in e.parts.iter().enumerate() {
        let neg = c < &Scalar::from_integer(0.into());
        s.push_str(match (i, neg) {
            (0, true) => "-",
            (0, false) => "",
            (_, true) => " - ",
            (_, false) => " + ",
        });
        let a = if neg { -c.clone() } else { c.clone() };
        if a != Scalar::from_integer(1.into()) {
            s.push_str(&format!("{a}*"));
        }
        s.push_str(&format!("({})", pb.name(b)));
    }
    s
}

fn path_basis(cfg: &RunConfig) -> Result<PathBasis> {
    PathBasis::compute(cfg.dynkin, cfg.strategy, cfg.large_memory).context("building the path basis")
}

fn pins(cfg: &RunConfig) -> Result<PinSet> {
    match &cfg.pin_set {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            PinSet::parse(&text).with_context(|| format!("parsing {}", p.display()))
        }
        None => Ok(PinSet::new()),
    }
}

fn solution(cfg: &RunConfig) -> Result<SolutionAssignment> {
    let Some(p) = &cfg.solution else { bail!("--solution is required") };
    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    SolutionAssignment::parse(&text).with_context(|| format!("parsing {}", p.display()))
}

fn system(cfg: &RunConfig) -> Result<(PathBasis, LocalBasis, EquationSystem, SubstitutionSet)> {
    let pb = path_basis(cfg)?;
    let lb = LocalBasis::new(cfg.dynkin);
    let subst = extract_substitutions(&lb, &admissibility_equations(&lb))?;
    let form = HomomorphismForm::new(&pb, pins(cfg)?)?;
    let sys = build_equation_system(&pb, &lb, &form, &Deformation::symbolic(&lb), cfg.apply_subst.then_some(&subst))?;
    Ok((pb, lb, sys, subst))
}

/// Parses `argv`, runs the command and writes to `--output` or `out`.
pub fn main_with(argv: &[String], out: &mut dyn Write) -> Result<bool> {
    let cli = Cli::try_parse_from(argv)?;
    match &cli.config.output {
        Some(p) => {
            let mut buf = Vec::new();
            let ok = run(cli.command, &cli.config, &mut buf)?;
            std::fs::write(p, buf).with_context(|| format!("writing {}", p.display()))?;
            Ok(ok)
        }
        None => run(cli.command, &cli.config, out),
    }
}
