//! Command line front end. One subcommand group per library module; every
//! artifact is canonical JSON (or CSV for relations). Errors go to stderr as
//! one JSON line `{"error": kind, "message": ...}` with exit code 1 (input)
//! or 2 (numeric / capacity).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::config::{Config, OutputFormat};
use crate::cone::ConvexCone;
use crate::error::{Error, Result};
use crate::events::{self, CausalStructure, KMode, SampleBox};
use crate::group;
use crate::io::{self, AffineJson, ConeJson, EventsJson, MatrixJson, PosetJson, RelationJson, ZeemanJson};
use crate::lorentz::{self, LorentzFrame};
use crate::order::{self, BasisKind, FinitePoset};
use crate::relation::{self, Relation};

#[derive(Debug, Parser)]
#[command(name = "causal-cones", version, about = "Convex cones, light cones, causal relations and finite-poset topologies")]
struct Cli {
    /// JSON config file (tolerances, caps, seed, output_format).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Top,
}

#[derive(Debug, Subcommand)]
enum Top {
    /// Finitely generated convex cones.
    #[command(subcommand)]
    Cone(ConeCmd),
    /// The forward light cone and Lorentz matrices.
    #[command(subcommand)]
    Lorentz(LorentzCmd),
    /// Causal affine maps.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Event samples and their causal relations.
    #[command(subcommand)]
    Events(EventsCmd),
    /// Finite posets and domain-theoretic bases.
    #[command(subcommand)]
    Poset(PosetCmd),
}

#[derive(Debug, Args)]
struct Out {
    /// Write the result here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InFile {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
}

#[derive(Debug, Subcommand)]
enum ConeCmd {
    /// Build Cone(S), dropping zeros and duplicate rays.
    Make {
        #[arg(long)]
        dim: Option<usize>,
        /// Generators as `x1,x2;y1,y2;...`.
        #[arg(long, allow_hyphen_values = true)]
        generators: Option<String>,
        /// Cone JSON to normalize instead of `--dim/--generators`.
        #[arg(long = "in", value_name = "FILE", conflicts_with_all = ["dim", "generators"])]
        input: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
    /// The dual cone C*.
    Dual {
        #[command(flatten)]
        input: InFile,
        /// Fail instead of falling back to normals-only when over the cap.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        out: Out,
    },
    /// Generating / pointed / proper / regular / self-dual report.
    Classify {
        #[command(flatten)]
        input: InFile,
        #[command(flatten)]
        out: Out,
    },
    /// Membership of a vector.
    Member {
        #[command(flatten)]
        input: InFile,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Debug, Subcommand)]
enum LorentzCmd {
    /// Interior / boundary / exterior / backward.
    Classify {
        #[arg(long)]
        q: usize,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: Out,
    },
    /// Boost matrix with rapidity `t` along a spatial axis (1-based).
    Boost {
        #[arg(long)]
        q: usize,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 1)]
        axis: usize,
        #[command(flatten)]
        out: Out,
    },
    /// v = lambda * diag(1, R) * boost(t) * e0 for interior v.
    Decompose {
        #[arg(long)]
        q: usize,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: Out,
    },
    /// Pseudo-orthogonality and orthochronicity of a matrix.
    CheckMap {
        #[command(flatten)]
        input: InFile,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Debug, Subcommand)]
enum GroupCmd {
    /// Monte Carlo causality check of an affine map.
    IsCausal {
        #[command(flatten)]
        input: InFile,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        out: Out,
    },
    /// Factor into dilation, orthochronous Lorentz and translation.
    Zeeman {
        #[command(flatten)]
        input: InFile,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: Out,
    },
    /// A seeded product of causal generators.
    RandomElement {
        #[arg(long)]
        q: usize,
        #[arg(long, default_value_t = 10)]
        length: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RelationKind {
    Chronological,
    Causal,
    KIdeal,
    KClosed,
}

#[derive(Debug, Subcommand)]
enum EventsCmd {
    /// Seeded uniform events in a box.
    Sprinkle {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Corners `lo_0,...,lo_q,hi_0,...,hi_q`.
        #[arg(long = "box", allow_hyphen_values = true)]
        bounds: String,
        /// Identify time periodically with this period.
        #[arg(long)]
        periodic_time: Option<f64>,
        #[command(flatten)]
        out: Out,
    },
    /// I+, J+ or K+ as a relation.
    Relations {
        #[command(flatten)]
        input: InFile,
        #[arg(long, value_enum, default_value = "causal")]
        kind: RelationKind,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[command(flatten)]
        out: Out,
    },
    /// Open and closed intervals between two events.
    Interval {
        #[command(flatten)]
        input: InFile,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Causal-hierarchy diagnostics.
    Hierarchy {
        #[command(flatten)]
        input: InFile,
        #[command(flatten)]
        out: Out,
    },
    /// Is h(U_R(a)) = U_S(h(a)) for all a?
    ConePreserving {
        /// Relation R (JSON or .csv).
        #[arg(long, requires = "s", conflicts_with = "events")]
        r: Option<PathBuf>,
        /// Relation S (JSON or .csv).
        #[arg(long)]
        s: Option<PathBuf>,
        /// The map h as `h(0),h(1),...`; identity when omitted.
        #[arg(long)]
        map: Option<String>,
        /// Alternatively: R from these events, S from their image under `--affine`.
        #[arg(long, requires = "affine")]
        events: Option<PathBuf>,
        #[arg(long)]
        affine: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "causal")]
        kind: RelationKind,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum IntervalKind {
    Interval,
    Alexandrov,
}

#[derive(Debug, Subcommand)]
enum PosetCmd {
    /// Validate a relation as a partial order.
    Make {
        /// Relation file (JSON or .csv).
        #[arg(long = "in", value_name = "FILE", conflicts_with = "events")]
        input: Option<PathBuf>,
        /// Use K+ (closed) of an event sample instead.
        #[arg(long)]
        events: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
    /// Way-below relation and compact elements.
    Waybelow {
        #[command(flatten)]
        input: InFile,
        #[command(flatten)]
        out: Out,
    },
    /// Scott basis, or whether `--set` is Scott open.
    Scott {
        #[command(flatten)]
        input: InFile,
        #[arg(long)]
        set: Option<String>,
        #[command(flatten)]
        out: Out,
    },
    /// Lawson basis {⇑x \ ↑F : |F| <= f_max}.
    Lawson {
        #[command(flatten)]
        input: InFile,
        #[arg(long, default_value_t = 1)]
        f_max: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Interval basis {a << x << b} (or strict Alexandrov intervals).
    IntervalBasis {
        #[command(flatten)]
        input: InFile,
        #[arg(long, value_enum, default_value = "interval")]
        kind: IntervalKind,
        #[command(flatten)]
        out: Out,
    },
    /// Continuity and bicontinuity by enumeration.
    Bicontinuous {
        #[command(flatten)]
        input: InFile,
        #[command(flatten)]
        out: Out,
    },
    /// Interval/Alexandrov, I+ ⊆ K+ and Lawson ⊆ interval checks on events.
    Bridge {
        /// Event sample JSON.
        #[command(flatten)]
        input: InFile,
        #[arg(long, default_value_t = 1)]
        f_max: usize,
        #[command(flatten)]
        out: Out,
    },
}

fn parse_vec(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Input(format!("bad number {t:?} in {s:?}")))
        })
        .collect()
}

fn parse_indices(s: &str) -> Result<Vec<usize>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Input(format!("bad index {t:?} in {s:?}")))
        })
        .collect()
}

fn require_seed(seed: Option<u64>, cfg: &Config) -> Result<u64> {
    seed.or(cfg.seed)
        .ok_or_else(|| Error::Input("this command is randomized and needs --seed".into()))
}

fn read_cone(path: &Path, cfg: &Config) -> Result<ConvexCone> {
    io::read_json::<ConeJson>(path)?.to_cone(cfg.tolerances.feasibility)
}

fn read_events(path: &Path) -> Result<events::EventSet> {
    io::read_json::<EventsJson>(path)?.to_events()
}

fn read_poset(path: &Path) -> Result<FinitePoset> {
    io::read_json::<PosetJson>(path)?.to_poset()
}

fn read_affine(path: &Path) -> Result<group::AffineMap> {
    io::read_json::<AffineJson>(path)?.to_map()
}

fn q_of(f: &group::AffineMap) -> Result<usize> {
    match f.dim() {
        0 | 1 => Err(Error::Input("a map on R^{1+q} needs q >= 1".into())),
        n => Ok(n - 1),
    }
}

fn relation_of(e: &events::EventSet, kind: RelationKind) -> Relation {
    match kind {
        RelationKind::Chronological => e.chronological_relation(),
        RelationKind::Causal => e.causal_relation(),
        RelationKind::KIdeal => e.k_relation(KMode::Ideal),
        RelationKind::KClosed => e.k_relation(KMode::Closed),
    }
}

fn sets_json(sets: &[Vec<usize>]) -> serde_json::Value {
    json!(sets)
}

/// Result of one command: canonical text and where it goes.
struct Artifact {
    text: String,
    out: Option<PathBuf>,
}

fn artifact<T: serde::Serialize + ?Sized>(value: &T, out: Out) -> Result<Artifact> {
    Ok(Artifact {
        text: io::canonical(value)?,
        out: out.out,
    })
}

fn execute(cli: Cli) -> Result<Artifact> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let tol = cfg.tolerances;
    match cli.command {
        Top::Cone(cmd) => match cmd {
            ConeCmd::Make {
                dim,
                generators,
                input,
                out,
            } => {
                let cone = match input {
                    Some(p) => {
                        let j: ConeJson = io::read_json(&p)?;
                        match j.generators {
                            Some(g) => ConvexCone::with_tolerances(j.dim, g, &tol.cone())?,
                            None => j.to_cone(tol.feasibility)?,
                        }
                    }
                    None => {
                        let dim = dim.ok_or_else(|| Error::Input("--dim is required without --in".into()))?;
                        let gens = match generators.as_deref().map(str::trim) {
                            None | Some("") => Vec::new(),
                            Some(g) => g.split(';').map(parse_vec).collect::<Result<_>>()?,
                        };
                        ConvexCone::with_tolerances(dim, gens, &tol.cone())?
                    }
                };
                artifact(&ConeJson::from(&cone), out)
            }
            ConeCmd::Dual { input, strict, out } => {
                let c = read_cone(&input.input, &cfg)?;
                artifact(&ConeJson::from(&c.dual_with(&cfg.caps.dual(), strict)?), out)
            }
            ConeCmd::Classify { input, out } => {
                let c = read_cone(&input.input, &cfg)?;
                artifact(&c.classify(&tol.cone(), &cfg.caps.dual())?, out)
            }
            ConeCmd::Member { input, x, tol: t, out } => {
                let c = read_cone(&input.input, &cfg)?;
                let x = parse_vec(&x)?;
                let t = t.unwrap_or(tol.feasibility);
                let residual = c.membership_residual(&x)?;
                artifact(&json!({"member": residual <= t, "residual": residual, "tol": t}), out)
            }
        },
        Top::Lorentz(cmd) => match cmd {
            LorentzCmd::Classify { q, v, tol: t, out } => {
                let region = lorentz::lc_classify(q, &parse_vec(&v)?, t.unwrap_or(tol.boundary))?;
                artifact(&json!({ "region": region }), out)
            }
            LorentzCmd::Boost { q, t, axis, out } => {
                artifact(&MatrixJson::from(&lorentz::boost(q, t, axis)?), out)
            }
            LorentzCmd::Decompose { q, v, tol: t, out } => {
                let d = lorentz::orbit_decompose(q, &parse_vec(&v)?, t.unwrap_or(tol.orbit))?;
                artifact(
                    &json!({
                        "lambda": d.lambda,
                        "rapidity": d.rapidity,
                        "rotation": MatrixJson::from(&d.rotation),
                        "reconstruction": d.reconstruct(),
                    }),
                    out,
                )
            }
            LorentzCmd::CheckMap { input, p, tol: t, out } => {
                let a = io::read_json::<MatrixJson>(&input.input)?.to_matrix()?;
                if a.nrows() <= p {
                    return Err(Error::Input(format!("matrix of size {} has no spatial part for p={p}", a.nrows())));
                }
                let frame = LorentzFrame::new(p, a.nrows() - p)?;
                let t = t.unwrap_or(tol.pseudo_orthogonal);
                let po = frame.is_pseudo_orthogonal(&a, t)?;
                let ortho = if po && p == 1 {
                    Some(frame.is_orthochronous(&a, t)?)
                } else {
                    None
                };
                artifact(
                    &json!({
                        "pseudo_orthogonal": po,
                        "orthochronous": ortho,
                        "form_deviation": frame.form_deviation(&a)?,
                    }),
                    out,
                )
            }
        },
        Top::Group(cmd) => match cmd {
            GroupCmd::IsCausal {
                input,
                seed,
                samples,
                out,
            } => {
                let f = read_affine(&input.input)?;
                let q = q_of(&f)?;
                let seed = require_seed(seed, &cfg)?;
                let samples = samples.unwrap_or(cfg.caps.samples);
                let cx = group::causal_counterexample(&f, q, samples, seed)?;
                let open = group::preserves_open_order(&f, q, samples, seed)?;
                artifact(
                    &json!({
                        "causal": cx.is_none(),
                        "counterexample": cx.map(|(x, y)| json!({"x": x, "y": y})),
                        "open_order_preserved": open,
                        "samples": samples,
                        "seed": seed,
                    }),
                    out,
                )
            }
            GroupCmd::Zeeman { input, tol: t, out } => {
                let f = read_affine(&input.input)?;
                let z = group::zeeman_decompose(&f, q_of(&f)?, t.unwrap_or(tol.zeeman))?;
                artifact(&ZeemanJson::from(&z), out)
            }
            GroupCmd::RandomElement { q, length, seed, out } => {
                let f = group::random_causal_element(q, length, require_seed(seed, &cfg)?)?;
                artifact(&AffineJson::from(&f), out)
            }
        },
        Top::Events(cmd) => match cmd {
            EventsCmd::Sprinkle {
                q,
                n,
                seed,
                bounds,
                periodic_time,
                out,
            } => {
                let corners = parse_vec(&bounds)?;
                if corners.len() != 2 * (q + 1) {
                    return Err(Error::Input(format!(
                        "--box needs {} numbers (lo then hi corner), got {}",
                        2 * (q + 1),
                        corners.len()
                    )));
                }
                let bx = SampleBox::new(corners[..q + 1].to_vec(), corners[q + 1..].to_vec())?;
                let e = events::sprinkle(q, n, bx, require_seed(seed, &cfg)?, periodic_time)?;
                artifact(&EventsJson::from(&e), out)
            }
            EventsCmd::Relations {
                input,
                kind,
                format,
                out,
            } => {
                let e = read_events(&input.input)?;
                let r = relation_of(&e, kind);
                let csv = match format {
                    Some(Format::Csv) => true,
                    Some(Format::Json) => false,
                    None => cfg.output_format == OutputFormat::Csv,
                };
                if csv {
                    Ok(Artifact {
                        text: r.to_csv().trim_end().to_string(),
                        out: out.out,
                    })
                } else {
                    artifact(&RelationJson::from(&r), out)
                }
            }
            EventsCmd::Interval { input, a, b, out } => {
                let e = read_events(&input.input)?;
                artifact(&CausalStructure::new(&e).interval(a, b)?, out)
            }
            EventsCmd::Hierarchy { input, out } => {
                let e = read_events(&input.input)?;
                artifact(&events::hierarchy_report(&e), out)
            }
            EventsCmd::ConePreserving {
                r,
                s,
                map,
                events: ev,
                affine,
                kind,
                out,
            } => {
                let (r, s) = match (r, s, ev, affine) {
                    (Some(r), Some(s), None, None) => (io::read_relation(&r)?, io::read_relation(&s)?),
                    (None, None, Some(ev), Some(aff)) => {
                        let e = read_events(&ev)?;
                        let image = e.map_events(&read_affine(&aff)?)?;
                        (relation_of(&e, kind), relation_of(&image, kind))
                    }
                    _ => return Err(Error::Input("give either --r and --s, or --events and --affine".into())),
                };
                let h = match map {
                    Some(m) => parse_indices(&m)?,
                    None => (0..r.size()).collect(),
                };
                let (ok, witnesses) = relation::cone_preserving_check(&r, &s, &h)?;
                artifact(&json!({"preserving": ok, "witnesses": witnesses}), out)
            }
        },
        Top::Poset(cmd) => {
            let cap = cfg.caps.subset;
            match cmd {
                PosetCmd::Make { input, events: ev, out } => {
                    let r = match (input, ev) {
                        (Some(p), None) => io::read_relation(&p)?,
                        (None, Some(e)) => read_events(&e)?.k_relation(KMode::Closed),
                        _ => return Err(Error::Input("give --in RELATION or --events EVENTS".into())),
                    };
                    artifact(&PosetJson::from(&order::make_poset(r)?), out)
                }
                PosetCmd::Waybelow { input, out } => {
                    let p = read_poset(&input.input)?;
                    let wb = order::way_below(&p, cap)?;
                    artifact(
                        &json!({
                            "relation": RelationJson::from(&wb.relation),
                            "compact": wb.compact,
                            "equals_order": &wb.relation == p.order(),
                        }),
                        out,
                    )
                }
                PosetCmd::Scott { input, set, out } => {
                    let p = read_poset(&input.input)?;
                    match set {
                        Some(s) => {
                            let u = parse_indices(&s)?;
                            artifact(&json!({"scott_open": order::is_scott_open(&p, &u, cap)?, "set": u}), out)
                        }
                        None => artifact(&order::basis_sets(&p, BasisKind::Scott, 0, cap)?, out),
                    }
                }
                PosetCmd::Lawson { input, f_max, out } => {
                    let p = read_poset(&input.input)?;
                    artifact(&order::basis_sets(&p, BasisKind::Lawson, f_max, cap)?, out)
                }
                PosetCmd::IntervalBasis { input, kind, out } => {
                    let p = read_poset(&input.input)?;
                    let kind = match kind {
                        IntervalKind::Interval => BasisKind::Interval,
                        IntervalKind::Alexandrov => BasisKind::Alexandrov,
                    };
                    let b = order::basis_sets(&p, kind, 0, cap)?;
                    artifact(&json!({"kind": b.kind, "sets": sets_json(&b.sets)}), out)
                }
                PosetCmd::Bicontinuous { input, out } => {
                    let p = read_poset(&input.input)?;
                    let b = order::bicontinuity(&p, cap)?;
                    let mut v = serde_json::to_value(b)?;
                    v["dcpo"] = json!(order::is_dcpo(&p, cap)?);
                    artifact(&v, out)
                }
                PosetCmd::Bridge { input, f_max, out } => {
                    let e = read_events(&input.input)?;
                    artifact(&order::causal_bridge_checks(&e, f_max, cfg.caps.bridge)?, out)
                }
            }
        }
    }
}

fn error_line(kind: &str, message: &str) -> String {
    io::canonical_value(&json!({"error": kind, "message": message}))
}

/// Run one command line (including the program name) and return the exit
/// code. Results go to `stdout` or their `--out` file; errors to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            let _ = writeln!(stderr, "{}", error_line("usage", first));
            return 1;
        }
    };
    let result = execute(cli).and_then(|a| match a.out {
        Some(p) => io::write_text(&p, &(a.text + "\n")),
        None => Ok(writeln!(stdout, "{}", a.text)?),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{}", error_line(e.kind(), &e.to_string()));
            e.exit_code()
        }
    }
}
