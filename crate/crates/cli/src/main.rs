use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use treegroups::acceptance::{self, DEFAULT_SEED};
use treegroups::criteria::{self, Provenance};
use treegroups::lattice::{cone_family, lattice_checks, parse_cone_spec, rist, NamedSubset};
use treegroups::localaction::{ball_group, defect_set, BallAutomorphism};
use treegroups::series::{
    p_residual_with_certificate, pi_core_with_certificate, sylow_with_certificate, tate_check,
    PrimeSet,
};
use treegroups::tree::{build_ball, CenterKind, TreeBall};
use treegroups::wreath::{direct_square, sylow_tower, wreath_tower, TowerSummary, WreathTower};
use treegroups::{Caps, GroupSpec, PermGroup, Permutation};

/// Relative `--out` paths are resolved against this directory when it is set.
const OUT_DIR_ENV: &str = "TREEGROUPS_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "treegroups",
    version,
    about = "Permutation groups, wreath towers and local-action groups on regular trees"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Largest group listed element by element.
    #[arg(long, global = true, default_value_t = Caps::default().elements)]
    element_cap: u64,
    /// Largest group whose subgroup classes are enumerated.
    #[arg(long, global = true, default_value_t = Caps::default().subgroup_order)]
    subgroup_cap: u64,
    /// Largest leaf count of a flattened wreath tower.
    #[arg(long, global = true, default_value_t = Caps::default().leaves)]
    leaf_cap: usize,
    /// Largest tree ball, in vertices.
    #[arg(long, global = true, default_value_t = Caps::default().ball_vertices)]
    ball_vertex_cap: usize,
    /// Largest ball-group order built by grafting.
    #[arg(long, global = true, default_value_t = Caps::default().ball_order)]
    ball_order_cap: u64,
    /// Largest orbit count for listing invariant subsets.
    #[arg(long, global = true, default_value_t = Caps::default().fixed_orbits)]
    fixed_orbit_cap: usize,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record wall-clock time in the provenance block.
    #[arg(long, global = true)]
    timing: bool,
}

impl GlobalOpts {
    fn caps(&self) -> Caps {
        Caps {
            elements: self.element_cap,
            subgroup_order: self.subgroup_cap,
            leaves: self.leaf_cap,
            ball_vertices: self.ball_vertex_cap,
            ball_order: self.ball_order_cap,
            fixed_orbits: self.fixed_orbit_cap,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simplicity and nondiscreteness criteria for G(F, F').
    #[command(subcommand)]
    Criteria(CriteriaCmd),
    /// Iterated wreath products.
    #[command(subcommand)]
    Wreath(WreathCmd),
    /// Balls in the d-regular tree.
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Local-action groups on a ball.
    #[command(subcommand)]
    Ball(BallCmd),
    /// Normal p-complement check.
    #[command(subcommand)]
    Tate(TateCmd),
    /// Sylow subgroups, cores and residuals.
    #[command(subcommand)]
    Series(SeriesCmd),
    /// Rigid stabilizers of leaf subsets in a wreath tower.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Run the acceptance suite.
    Selftest,
}

#[derive(Subcommand)]
enum CriteriaCmd {
    Check {
        #[arg(long)]
        d: usize,
        #[arg(long = "F")]
        f: String,
        #[arg(long = "Fprime")]
        fprime: String,
        /// Ball radius for the local prime estimate.
        #[arg(long, default_value_t = 2)]
        eta_depth: usize,
    },
    Survey {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        transitive_only: bool,
        /// Also list proper subgroups F of each F' inside the sandwich.
        #[arg(long)]
        pairs: bool,
        #[arg(long)]
        eta_depth: Option<usize>,
        /// Print an aligned table instead of JSON.
        #[arg(long)]
        text: bool,
    },
}

#[derive(Subcommand)]
enum WreathCmd {
    Build {
        #[arg(long)]
        base: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        sylow: Option<u64>,
        #[arg(long)]
        square: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Center {
    Vertex,
    Edge,
}

impl From<Center> for CenterKind {
    fn from(c: Center) -> Self {
        match c {
            Center::Vertex => CenterKind::Vertex,
            Center::Edge => CenterKind::Edge,
        }
    }
}

#[derive(Subcommand)]
enum TreeCmd {
    Ball {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        radius: usize,
        #[arg(long, value_enum, default_value = "vertex")]
        center: Center,
        /// `legal`, or `file:<path>` holding a colored ball or a color list.
        #[arg(long)]
        color: Option<String>,
    },
}

#[derive(Subcommand)]
enum BallCmd {
    Group {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        radius: usize,
        #[arg(long = "F")]
        f: String,
        #[arg(long, value_enum, default_value = "vertex")]
        center: Center,
    },
    Defects {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        radius: usize,
        #[arg(long = "F")]
        f: String,
        #[arg(long = "Fprime")]
        fprime: String,
        /// `file:<path>` holding the element in cycle notation on vertices.
        #[arg(long)]
        element: String,
        #[arg(long, value_enum, default_value = "vertex")]
        center: Center,
    },
}

#[derive(Subcommand)]
enum TateCmd {
    Verify {
        #[arg(long)]
        group: String,
        #[arg(long)]
        p: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Sylow,
    Core,
    Residual,
}

#[derive(Subcommand)]
enum SeriesCmd {
    Op {
        #[arg(long)]
        group: String,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        p: u64,
    },
}

#[derive(Subcommand)]
enum LatticeCmd {
    Rist {
        /// `<base>:<depth>`, e.g. `Klein4:2`.
        #[arg(long)]
        tower: String,
        /// `none`, `all`, `root`, or vertex words like `1.2,3`.
        #[arg(long)]
        subset: String,
    },
    Sweep {
        #[arg(long)]
        tower: String,
        #[arg(long, default_value_t = 1000)]
        max_pairs: usize,
    },
}

/// What a subcommand hands back: the report and the exit code to use.
struct Report {
    body: Value,
    code: u8,
    text: Option<String>,
}

impl Report {
    fn ok(body: impl Serialize) -> Result<Report> {
        Ok(Report {
            body: serde_json::to_value(body)?,
            code: 0,
            text: None,
        })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let caps = cli.global.caps();
    let seed = cli.global.seed;
    let start = Instant::now();
    let mut report = dispatch(&cli.command, &caps, seed)?;

    let mut provenance = Provenance::new(&caps, Some(seed));
    if cli.global.timing {
        provenance.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    if let Value::Object(map) = &mut report.body {
        map.insert("provenance".into(), serde_json::to_value(provenance)?);
    }
    let rendered = match report.text.take() {
        Some(text) => text,
        None => serde_json::to_string_pretty(&report.body)? + "\n",
    };
    match &cli.global.out {
        Some(path) => {
            let path = resolve_out(path);
            if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&path, rendered)
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => print!("{rendered}"),
    }
    Ok(report.code)
}

fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn dispatch(cmd: &Command, caps: &Caps, seed: u64) -> Result<Report> {
    match cmd {
        Command::Criteria(CriteriaCmd::Check {
            d,
            f,
            fprime,
            eta_depth,
        }) => {
            let (f, fp) = (load_spec(f)?, load_spec(fprime)?);
            let eta = (*eta_depth > 0).then_some(*eta_depth);
            let report = criteria::evaluate(*d, &f, &fp, eta, caps)?;
            let code = if report.applicable { 0 } else { 2 };
            Ok(Report {
                code,
                ..Report::ok(report)?
            })
        }
        Command::Criteria(CriteriaCmd::Survey {
            d,
            transitive_only,
            pairs,
            eta_depth,
            text,
        }) => {
            let survey = criteria::survey(*d, *transitive_only, *pairs, *eta_depth, caps)?;
            let rendered = text.then(|| criteria::render_survey_text(&survey));
            Ok(Report {
                text: rendered,
                ..Report::ok(survey)?
            })
        }
        Command::Wreath(WreathCmd::Build {
            base,
            depth,
            sylow,
            square,
        }) => wreath_build(&load_spec(base)?, *depth, *sylow, *square, caps),
        Command::Tree(TreeCmd::Ball {
            d,
            radius,
            center,
            color,
        }) => {
            let ball = build_ball(*d, *radius, (*center).into(), caps)?;
            let ball = match color.as_deref() {
                None => ball,
                Some("legal") => ball.legal_coloring(),
                Some(other) => {
                    let path = other
                        .strip_prefix("file:")
                        .ok_or_else(|| anyhow!("--color expects `legal` or `file:<path>`"))?;
                    color_from_file(&ball, path, caps)?
                }
            };
            let mut body = serde_json::to_value(ball.to_json())?;
            body["vertex_count"] = json!(ball.vertex_count());
            if ball.is_colored() {
                body["coloring"] = serde_json::to_value(ball.check_coloring())?;
            }
            Ok(Report {
                body,
                code: 0,
                text: None,
            })
        }
        Command::Ball(BallCmd::Group {
            d,
            radius,
            f,
            center,
        }) => {
            let spec = load_spec(f)?;
            let ball = build_ball(*d, *radius, (*center).into(), caps)?.legal_coloring();
            let group = ball_group(&ball, &spec.resolve()?, caps)?;
            let formula = group.formula_order().map(|o| o.to_string());
            let tits = match ball.center() {
                CenterKind::Edge => Some(group.tits_report(caps)?),
                CenterKind::Vertex => None,
            };
            Report::ok(json!({
                "d": d,
                "radius": radius,
                "center": ball.center(),
                "F": spec.to_string(),
                "order": group.order().to_string(),
                "formula_order": formula,
                "match": formula.as_deref() == Some(group.order().to_string().as_str()),
                "graft_count": group.graft_count().to_string(),
                "augmented": group.augmented(),
                "generators": group.group().generators().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
                "tits": tits,
            }))
        }
        Command::Ball(BallCmd::Defects {
            d,
            radius,
            f,
            fprime,
            element,
            center,
        }) => {
            let (f, fp) = (load_group(f)?, load_group(fprime)?);
            let ball = build_ball(*d, *radius, (*center).into(), caps)?.legal_coloring();
            let path = element
                .strip_prefix("file:")
                .ok_or_else(|| anyhow!("--element expects `file:<path>`"))?;
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            let perm = Permutation::parse_cycles(ball.vertex_count(), text.trim())?;
            let g = BallAutomorphism::new(&ball, perm)?;
            let report = defect_set(&ball, &g, &f, &fp)?;
            Report::ok(json!({
                "element": g.perm().to_string(),
                "report": report,
            }))
        }
        Command::Tate(TateCmd::Verify { group, p }) => {
            let spec = load_spec(group)?;
            let report = tate_check(&spec.resolve()?, *p, caps)?;
            Report::ok(json!({
                "group": spec.to_string(),
                "consistent": report.consistent(),
                "report": report,
            }))
        }
        Command::Series(SeriesCmd::Op { group, kind, p }) => {
            let spec = load_spec(group)?;
            let g = spec.resolve()?;
            let (h, cert) = match kind {
                Kind::Sylow => sylow_with_certificate(&g, *p, caps)?,
                Kind::Core => pi_core_with_certificate(&g, &PrimeSet::new([*p])?, caps)?,
                Kind::Residual => p_residual_with_certificate(&g, *p)?,
            };
            Report::ok(json!({
                "group": spec.to_string(),
                "verified": cert.verify(&g, &h),
                "certificate": cert,
            }))
        }
        Command::Lattice(LatticeCmd::Rist { tower, subset }) => {
            let t = load_tower(tower, caps)?;
            let alpha = parse_cone_spec(&t, subset)?;
            let r = rist(t.group(), &alpha)?;
            Report::ok(json!({
                "tower": tower,
                "subset": subset,
                "leaves": alpha.points().iter().map(|x| x + 1).collect::<Vec<_>>(),
                "rist_order": r.order().to_string(),
                "generators": r.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            }))
        }
        Command::Lattice(LatticeCmd::Sweep { tower, max_pairs }) => {
            let t = load_tower(tower, caps)?;
            let family: Vec<NamedSubset> = cone_family(&t);
            let report = lattice_checks(t.group(), &family, *max_pairs, caps)?;
            Report::ok(json!({
                "tower": tower,
                "holds": report.holds(),
                "report": report,
            }))
        }
        Command::Selftest => {
            let outcomes = acceptance::run_all(seed);
            for o in &outcomes {
                eprintln!("{o}");
            }
            let passed = outcomes.iter().filter(|o| o.passed).count();
            Ok(Report {
                code: if passed == outcomes.len() { 0 } else { 1 },
                ..Report::ok(json!({
                    "passed": passed,
                    "total": outcomes.len(),
                    "criteria": outcomes
                        .iter()
                        .map(|o| json!({"id": o.id, "title": o.title, "passed": o.passed, "detail": o.detail}))
                        .collect::<Vec<_>>(),
                }))?
            })
        }
    }
}

/// A spec given inline (`Alt(5)`, `degree: 4 / gen: (1 2)`), as
/// `file:<path>`, or as the path of an existing file.
fn load_spec(arg: &str) -> Result<GroupSpec> {
    let path = arg.strip_prefix("file:").map(Path::new).or_else(|| {
        let p = Path::new(arg);
        p.is_file().then_some(p)
    });
    match path {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            GroupSpec::parse(&text).with_context(|| format!("in {}", p.display()))
        }
        None => Ok(GroupSpec::parse(arg)?),
    }
}

fn load_group(arg: &str) -> Result<PermGroup> {
    Ok(load_spec(arg)?.resolve()?)
}

fn load_tower(arg: &str, caps: &Caps) -> Result<WreathTower> {
    let (base, depth) = arg
        .rsplit_once(':')
        .ok_or_else(|| anyhow!("--tower expects `<base>:<depth>`, got `{arg}`"))?;
    let depth: usize = depth
        .trim()
        .parse()
        .with_context(|| format!("bad tower depth `{depth}`"))?;
    Ok(wreath_tower(&load_group(base)?, depth, caps)?)
}

fn wreath_build(
    spec: &GroupSpec,
    depth: usize,
    sylow: Option<u64>,
    square: bool,
    caps: &Caps,
) -> Result<Report> {
    let base = spec.resolve()?;
    let tower = wreath_tower(&base, depth, caps)?;
    let mut body = json!({
        "base": spec.to_string(),
        "tower": TowerSummary::from(&tower),
    });
    if let Some(p) = sylow {
        let s = sylow_tower(&base, p, depth, caps)?;
        body["sylow"] = json!({
            "prime": s.prime,
            "order": s.tower.order().to_string(),
            "ambient_order": s.ambient.order().to_string(),
            "index": s.index.to_string(),
            "contained": s.contained,
            "order_is_p_part": s.order_is_p_part,
            "index_coprime_to_p": s.index_coprime_to_p(),
            "certified": s.certified(),
        });
    }
    if square {
        let sq = direct_square(&tower, caps)?;
        body["square"] = json!({
            "degree": sq.degree(),
            "order": sq.order().to_string(),
        });
    }
    Report::ok(body)
}

/// A colored ball JSON, or a plain array of 1-based colors by edge id.
fn color_from_file(ball: &TreeBall, path: &str, caps: &Caps) -> Result<TreeBall> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {path}"))?;
    if value.is_array() {
        let colors: Vec<usize> = serde_json::from_value(value)?;
        if colors.contains(&0) {
            bail!("colors are 1-based");
        }
        return Ok(ball.with_coloring(colors.into_iter().map(|c| c - 1).collect())?);
    }
    let loaded = TreeBall::from_json_str(&text, caps)?;
    if (loaded.d(), loaded.radius(), loaded.center()) != (ball.d(), ball.radius(), ball.center()) {
        bail!("{path} describes a different ball");
    }
    Ok(loaded)
}
