//! Command-line front-end. Exit status: 0 on success or PASS, 1 on a
//! failed check, 2 on an input error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use itertools::Itertools;
use ktg_core::associator::{self, Conditions, Locus, Route, SolutionFamily, Superscript};
use ktg_core::coeff::fmt_rational;
use ktg_core::diagram::enumerate_diagrams;
use ktg_core::graph_ops::{self, SweepSpec};
use ktg_core::relations::{randomized_dim, reduce};
use ktg_core::strand_algebra::diagram_label;
use ktg_core::{Bases, EdgeId, GradedElement, LinComb, Rational, Series, VertexId};

use crate::cache::{BasisCache, CACHE_ENV};
use crate::error::{CliError, Result};
use crate::format::{self, Stage};
use crate::report::{show, Format, Report, Status};

#[derive(Parser, Debug)]
#[command(name = "ktg", version, about = "Chord diagrams on trivalent graph skeletons")]
pub struct Cli {
    /// Directory for persisted quotient bases (default: $KTG_CACHE_DIR).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Built-in skeleton name or skeleton file.
    #[arg(long, global = true)]
    pub skeleton: Option<String>,
    /// Degree (or truncation degree).
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Diagram, relation and quotient counts per degree, checked against a
    /// randomized rank.
    Dims,
    /// Lists the diagrams of one degree, marking basis diagrams.
    Enumerate,
    /// Normal form of a combination file.
    Reduce { file: PathBuf },
    /// Runs an operation pipeline (`op switch e=3 | op unzip e=5 | reduce`)
    /// on a combination file. The pipeline is a literal or a file.
    Apply { file: PathBuf, pipeline: String },
    /// Pentagon residual of Φ (default: 1 − [t12,t23]/24).
    CheckPentagon(PhiArgs),
    /// Both hexagon residuals of Φ with R (default: exp(t12/2)).
    CheckHexagon {
        #[command(flatten)]
        phi: PhiArgs,
        /// Series file for R.
        #[arg(long)]
        r: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "images")]
        convention: Convention,
    },
    /// Solves the associator equations through degree 2.
    SolveDegree2(SolveArgs),
    /// Symmetry properties (1)-(5) of Φ, or their loci on the solved family.
    Properties {
        #[command(flatten)]
        phi: PhiArgs,
        /// Report where each property holds on the degree-2 family.
        #[arg(long)]
        family: bool,
    },
    /// Pushes the degree-2 family through tetrahedron → dumbbell and checks
    /// that its value never vanishes.
    CertifyNonexistence {
        /// `<switch>/<unzip>` edge ids, e.g. `1/5` or `-/6`.
        #[arg(long, default_value = "1/5")]
        route: String,
        /// Certify along every route with at most one switch.
        #[arg(long)]
        all_routes: bool,
    },
    /// Sweeps a combination into a strand algebra.
    Sweep {
        file: PathBuf,
        /// Spanning tree edge ids, comma separated.
        #[arg(long, value_delimiter = ',')]
        tree: Vec<u32>,
        /// Strand edges in order, comma separated; a leading `-` reverses.
        #[arg(long, allow_hyphen_values = true)]
        strands: Option<String>,
        #[arg(long)]
        root: Option<u32>,
    },
}

#[derive(Args, Debug)]
pub struct PhiArgs {
    /// Series file for Φ on 3 strands.
    #[arg(long)]
    pub phi: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long, value_enum, default_value = "images")]
    pub convention: Convention,
    #[arg(long, value_enum, default_value = "associator")]
    pub conditions: ConditionSet,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Convention {
    Images,
    Positions,
}

impl From<Convention> for Superscript {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Images => Superscript::Images,
            Convention::Positions => Superscript::Positions,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ConditionSet {
    /// Pentagon, hexagons, non-degeneracy and unitarity.
    Associator,
    /// Pentagon and hexagons only.
    Major,
}

impl From<ConditionSet> for Conditions {
    fn from(c: ConditionSet) -> Self {
        match c {
            ConditionSet::Associator => Conditions::ASSOCIATOR,
            ConditionSet::Major => Conditions::MAJOR,
        }
    }
}

/// Parses arguments, runs, prints; returns the exit status.
pub fn main_with_args(args: impl IntoIterator<Item = std::ffi::OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(r) => {
            print!("{}", r.render(cli.format));
            r.status.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command against a fresh cache.
pub fn run(cli: &Cli) -> Result<Report> {
    let dir = cli.cache_dir.clone().or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from));
    let cache = match dir {
        Some(d) => BasisCache::on_disk(d)?,
        None => BasisCache::in_memory(),
    };
    run_with(cli, &cache)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn with_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        CliError::Parse { line, msg } => CliError::Input(format!("{}:{line}: {msg}", path.display())),
        e => e,
    })
}

fn load_lincomb(path: &Path) -> Result<LinComb> {
    with_file(path, format::parse_lincomb(&read(path)?, path.parent()))
}

fn load_series(path: &Path, want_strands: usize, cache: &BasisCache) -> Result<Series> {
    let s = with_file(path, format::parse_series(&read(path)?))?;
    if s.strands != want_strands {
        return Err(CliError::Input(format!("{}: expected {want_strands} strands, found {}", path.display(), s.strands)));
    }
    Ok(Series::from_lincomb(&s.value, s.max_degree, cache)?)
}

fn load_phi(args: &PhiArgs, degree: usize, cache: &BasisCache) -> Result<Series> {
    match &args.phi {
        Some(p) => load_series(p, 3, cache),
        None => Ok(associator::reference_phi(degree, cache)?),
    }
}

pub fn run_with(cli: &Cli, cache: &BasisCache) -> Result<Report> {
    let degree = cli.degree.unwrap_or(2);
    let skeleton = || -> Result<_> {
        let name = cli.skeleton.as_deref().ok_or_else(|| CliError::Input("--skeleton is required".into()))?;
        format::resolve_skeleton(name, None)
    };
    Ok(match &cli.command {
        Command::Dims => dims(&skeleton()?, degree, cache)?,
        Command::Enumerate => enumerate(&skeleton()?, degree, cache)?,
        Command::Reduce { file } => {
            let v = reduce(cache, &load_lincomb(file)?)?;
            let mut r = Report::new("reduce");
            r.line(format::write_lincomb(&v).trim_end().to_string());
            r.field("result", show(&v));
            r
        }
        Command::Apply { file, pipeline } => {
            let text = if Path::new(pipeline).is_file() { read(Path::new(pipeline))? } else { pipeline.clone() };
            let stages = format::parse_pipeline(&text)?;
            let v = apply(&load_lincomb(file)?, &stages, cache)?;
            let mut r = Report::new("apply");
            r.field("stages", stages.len());
            r.line(format::write_lincomb(&v).trim_end().to_string());
            r.field("result", show(&v));
            r
        }
        Command::CheckPentagon(args) => {
            let phi = load_phi(args, degree, cache)?;
            let res = associator::pentagon_residual(&phi, cache)?;
            let mut r = Report::new("check-pentagon");
            residual_lines(&mut r, "pentagon", &res);
            r.status = Status::from_check(res.is_zero());
            r
        }
        Command::CheckHexagon { phi, r: rfile, convention } => {
            let phi = load_phi(phi, degree, cache)?;
            let rr = match rfile {
                Some(p) => load_series(p, 2, cache)?,
                None => associator::standard_r(phi.max_degree(), cache)?,
            };
            let (h1, h2) = associator::hexagon_residuals(&phi, &rr, (*convention).into(), cache)?;
            let mut r = Report::new("check-hexagon");
            r.both("convention", "convention", Superscript::from(*convention).name());
            residual_lines(&mut r, "hexagon_1", &h1);
            residual_lines(&mut r, "hexagon_2", &h2);
            r.status = Status::from_check(h1.is_zero() && h2.is_zero());
            r
        }
        Command::SolveDegree2(args) => solve(args, cache)?,
        Command::Properties { phi, family } => {
            if *family {
                family_properties(cache)?
            } else {
                properties(&load_phi(phi, degree, cache)?, cache)?
            }
        }
        Command::CertifyNonexistence { route, all_routes } => {
            let routes = if *all_routes { Route::all() } else { vec![parse_route(route)?] };
            certify(&routes, cache)?
        }
        Command::Sweep { file, tree, strands, root } => {
            let v = load_lincomb(file)?;
            let mut spec = SweepSpec::new(v.skeleton(), tree.iter().map(|&e| EdgeId(e)));
            if let Some(s) = strands {
                spec.strands = parse_strands(s)?;
            }
            spec.root = root.map(VertexId);
            let g = GradedElement::from_lincomb(&v, v.degrees().into_iter().max().unwrap_or(0), cache)?;
            let series = g.sweep(&spec, cache)?;
            let mut r = Report::new("sweep");
            r.line(format::write_series(series.parts(), series.strands()).trim_end().to_string());
            r.field("strands", series.strands());
            r.field("result", series);
            r
        }
    })
}

fn parse_strands(s: &str) -> Result<Vec<(EdgeId, bool)>> {
    s.split(',')
        .map(|t| {
            let (t, fwd) = t.strip_prefix('-').map_or((t, true), |r| (r, false));
            t.trim().parse().map(|e| (EdgeId(e), fwd)).map_err(|_| CliError::Input(format!("bad strand edge {t:?}")))
        })
        .collect()
}

fn parse_route(s: &str) -> Result<Route> {
    let bad = || CliError::Input(format!("route {s:?} is not `<switch>/<unzip>`"));
    let (a, b) = s.split_once('/').ok_or_else(bad)?;
    let switch = match a.trim() {
        "-" | "" => None,
        e => Some(EdgeId(e.parse().map_err(|_| bad())?)),
    };
    Ok(Route { switch, unzip: EdgeId(b.trim().parse().map_err(|_| bad())?) })
}

fn route_name(r: &Route) -> String {
    format!("{}/{}", r.switch.map_or("-".into(), |e| e.to_string()), r.unzip)
}

/// Applies pipeline stages in order to a combination.
pub fn apply(v: &LinComb, stages: &[Stage], bases: &impl Bases) -> Result<LinComb> {
    let mut v = v.clone();
    for st in stages {
        v = match st {
            Stage::Switch(e) => graph_ops::switch(&v, *e)?,
            Stage::Delete(e) => graph_ops::delete(&v, *e)?,
            Stage::Unzip(e) => graph_ops::unzip(&v, *e)?,
            Stage::DottedUnzip(e) => graph_ops::dotted_unzip(&v, *e)?,
            Stage::Cancel(d, a) => graph_ops::cancel(&v, *d, *a)?,
            Stage::Sweep { .. } => graph_ops::sweep(&v, &st.sweep_spec().expect("sweep stage"))?,
            Stage::Reduce => reduce(bases, &v)?,
        };
    }
    Ok(v)
}

fn residual_lines(r: &mut Report, key: &str, res: &Series) {
    for (d, p) in res.parts().iter().enumerate() {
        r.both(&format!("{key}_degree_{d}"), &format!("{key} residual, degree {d}"), show(p));
    }
}

fn dims(s: &ktg_core::Skeleton, degree: usize, cache: &BasisCache) -> Result<Report> {
    let cells: Vec<_> = (0..=degree).map(|n| (s.clone(), n)).collect();
    cache.prefetch(&cells)?;
    let mut r = Report::new("dims");
    r.line(format!("{:>6} {:>9} {:>9} {:>5} {:>7}", "degree", "diagrams", "relations", "dim", "oracle"));
    let mut ok = true;
    for n in 0..=degree {
        let b = cache.basis(s, n)?;
        let oracle = randomized_dim(s, n, 0x6b7467 + n as u64);
        ok &= oracle == b.dim();
        r.line(format!("{n:>6} {:>9} {:>9} {:>5} {oracle:>7}", b.diagram_count(), b.relation_count(), b.dim()));
        r.field(format!("degree_{n}"), format!("diagrams:{},relations:{},dim:{},oracle:{oracle}", b.diagram_count(), b.relation_count(), b.dim()));
    }
    r.status = Status::from_check(ok);
    Ok(r)
}

fn enumerate(s: &ktg_core::Skeleton, degree: usize, cache: &BasisCache) -> Result<Report> {
    let b = cache.basis(s, degree)?;
    let basis: Vec<_> = b.basis_diagrams().collect();
    let mut r = Report::new("enumerate");
    for (i, d) in enumerate_diagrams(s, degree).iter().enumerate() {
        let tag = if basis.contains(&d) { "b" } else { "p" };
        r.line(format!("{tag} | {}", format::write_inline_diagram(d)));
        r.field(format!("diagram_{i}"), format!("{tag}:{}", diagram_label(d)));
    }
    r.field("count", b.diagram_count());
    r.field("dim", b.dim());
    Ok(r)
}

fn triple(t: &[Rational; 3]) -> String {
    format!("({})", t.iter().map(fmt_rational).join(", "))
}

fn family_lines(r: &mut Report, key: &str, fam: &Option<associator::AffineFamily>) {
    match fam {
        None => r.both(key, key, "none"),
        Some(f) => {
            r.both(&format!("{key}_dim"), &format!("{key} dimension"), f.dim());
            r.both(&format!("{key}_point"), &format!("{key} point"), show(&f.point));
            for (k, d) in f.directions.iter().enumerate() {
                r.both(&format!("{key}_direction_{k}"), &format!("{key} direction s{k}"), show(d));
            }
        }
    }
}

fn solve_family(args: &SolveArgs, cache: &BasisCache) -> Result<SolutionFamily> {
    Ok(associator::solve_degree2(args.convention.into(), args.conditions.into(), cache)?)
}

fn solve(args: &SolveArgs, cache: &BasisCache) -> Result<Report> {
    let fam = solve_family(args, cache)?;
    let mut r = Report::new("solve-degree2");
    let c = fam.conditions;
    let names = [("pentagon", c.pentagon), ("hexagons", c.hexagons), ("non-degenerate", c.non_degenerate), ("unitary", c.unitary)];
    r.both("convention", "convention", fam.convention.name());
    r.both("conditions", "conditions", names.iter().filter(|(_, on)| *on).map(|(n, _)| *n).join(","));
    r.both("unknowns", "unknowns", fam.unknowns);
    r.both("equations", "equations", fam.equations);
    family_lines(&mut r, "degree_1", &fam.degree_one);
    family_lines(&mut r, "degree_2", &fam.degree_two);
    let labels = cache.basis(&ktg_core::skeleton::strands(3), 2)?.basis_diagrams().map(diagram_label).join(" ");
    r.field("basis_labels", labels);
    match &fam.displayed {
        Some(p) => {
            r.both("coordinates_point", "(α, β, γ) point", triple(&p.point));
            for (k, d) in p.directions.iter().enumerate() {
                r.both(&format!("coordinates_direction_{k}"), &format!("(α, β, γ) direction s{k}"), triple(d));
            }
            match &p.constraint {
                Some((n, k)) => {
                    r.both("constraint", "constraint", associator::format_constraint(n, k));
                    r.field("constraint_matrix", format!("{} | {}", triple(n), fmt_rational(k)));
                }
                None => r.both("constraint", "constraint", "none"),
            }
        }
        None => r.both("coordinates", "(α, β, γ) coordinates", "family leaves their span"),
    }
    for (p, locus) in associator::family_properties(&fam, cache)? {
        r.both(&format!("property_{}", p.number()), &format!("({}) {}", p.number(), p.name()), locus_text(&locus));
    }
    r.status = Status::from_check(fam.degree_two.is_some());
    Ok(r)
}

fn locus_text(l: &Locus) -> String {
    match l {
        Locus::Everywhere => "everywhere".into(),
        Locus::Nowhere => "nowhere".into(),
        Locus::Subfamily { point, directions } => {
            let p = point.iter().map(fmt_rational).join(", ");
            let d = directions.iter().map(|d| format!("({})", d.iter().map(fmt_rational).join(", "))).join(" ");
            format!("s = ({p}) + span{{{d}}}")
        }
    }
}

fn properties(phi: &Series, cache: &BasisCache) -> Result<Report> {
    let mut r = Report::new("properties");
    let checks = associator::check_properties(phi, cache)?;
    for c in &checks {
        let verdict = if c.holds { "holds" } else { "fails" };
        r.both(&format!("property_{}", c.property.number()), &format!("({}) {}", c.property.number(), c.property.name()), verdict);
        if !c.holds {
            for (i, res) in c.residuals.iter().enumerate() {
                r.both(&format!("property_{}_residual_{i}", c.property.number()), "  residual", res);
            }
        }
    }
    r.status = Status::from_check(checks.iter().all(|c| c.holds));
    Ok(r)
}

fn family_properties(cache: &BasisCache) -> Result<Report> {
    let fam = associator::solve_degree2(Superscript::Images, Conditions::ASSOCIATOR, cache)?;
    let mut r = Report::new("properties");
    for (p, locus) in associator::family_properties(&fam, cache)? {
        r.both(&format!("property_{}", p.number()), &format!("({}) {}", p.number(), p.name()), locus_text(&locus));
    }
    Ok(r)
}

fn certify(routes: &[Route], cache: &BasisCache) -> Result<Report> {
    let fam = associator::solve_degree2(Superscript::Images, Conditions::ASSOCIATOR, cache)?;
    let mut r = Report::new("certify-nonexistence");
    let mut ok = true;
    for route in routes {
        let c = associator::nonexistence_certificate(&fam, *route, cache)?;
        let k = route_name(route).replace('/', "_").replace('-', "none");
        r.both(&format!("route_{k}"), "route (switch/unzip)", route_name(route));
        r.both(&format!("route_{k}_bridge_sweep"), "  dumbbell sweep (tree; strands)", format!(
            "{}; {}",
            c.sweep.tree.iter().join(","),
            c.sweep.strands.iter().map(|(e, f)| format!("{}{e}", if *f { "" } else { "-" })).join(",")
        ));
        for (name, u) in ["a", "b", "c"].iter().zip(&c.images) {
            r.both(&format!("route_{k}_u_{name}"), &format!("  u({name})"), show(u));
        }
        r.both(&format!("route_{k}_x"), "  x = u(c) - t12 t11", show(&c.x));
        r.both(&format!("route_{k}_vector"), "  reduced vector", show(&c.family.generic()));
        r.both(&format!("route_{k}_matches_display"), "  matches displayed form", c.matches_display);
        if c.matches_display {
            r.line("  = α(t12 t11 + t11 t22) + β t12^2 + γ x - (1/24) t12 t11, with β+γ = -1/24,");
            r.line("    t12^2 read as the opposed pair [1:0,1 2:1,0]");
        }
        r.both(&format!("route_{k}_nonzero"), "  nonzero on the whole family", c.pass());
        ok &= c.pass();
    }
    r.status = Status::from_check(ok);
    Ok(r)
}
