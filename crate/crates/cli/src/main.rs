//! `finschem`: load space files, classify, minimize, compute cohomology and
//! compare roofs.
//!
//! Exit codes: 0 true/success, 1 false, 2 undecided, 3 input error.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use finschem::classify::{self, ClassReport, SerreConclusion, Verdict};
use finschem::cohomology::{self, Backend};
use finschem::error::Error;
use finschem::field::Field;
use finschem::fixtures;
use finschem::qcoh::SheafModule;
use finschem::roofs::{roof_equal, Roof};
use finschem::serial::{self, SpaceFile};
use finschem::space::{self, SpaceMap};

#[derive(Parser)]
#[command(name = "finschem", version, about = "Schematic finite spaces")]
struct Cli {
    /// Coefficient field for built-ins and files without a `field` key.
    #[arg(long, global = true, env = "FINSCHEM_FIELD", default_value = "Q")]
    field: String,
    /// Degree window `a..b` for graded cohomology.
    #[arg(long, global = true, env = "FINSCHEM_WINDOW", default_value = "-10..10", allow_hyphen_values = true)]
    window: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check a space file.
    Validate { input: String },
    /// Decide space classes, or the classes of a named map.
    Classify(ClassifyArgs),
    /// Kolmogorov quotient with the removable points deleted.
    Minimize { input: String },
    /// Cohomology table of a module.
    Cohomology {
        input: String,
        /// `O`, `O(d)` or the name of a module in the file.
        #[arg(long, default_value = "O", allow_hyphen_values = true)]
        module: String,
    },
    /// Higher direct images `R^i f_* M` at every target point.
    Rfi {
        input: String,
        #[arg(long)]
        map: String,
        #[arg(long, default_value = "O", allow_hyphen_values = true)]
        module: String,
    },
    /// Product of two spaces over the ground field.
    Product { left: String, right: String },
    /// Fiber product of two maps of the same file.
    Fiber { input: String, f: String, g: String },
    /// Cylinder of a map.
    Cylinder {
        input: String,
        #[arg(long)]
        map: String,
    },
    /// Equality of two roofs of the same file.
    RoofEq { input: String, a: String, b: String },
    /// Print a built-in space as a space file (`p1`, `p2`, `doubled_line`,
    /// `affine_line`, `pseudo_circle`, `plane_doubled_origin`, `point(RING)`).
    Generate { name: String },
}

#[derive(Args)]
struct ClassifyArgs {
    input: String,
    /// Classify the named map instead of the space.
    #[arg(long)]
    map: Option<String>,
    #[arg(long)]
    affine: bool,
    #[arg(long)]
    schematic: bool,
    #[arg(long)]
    semiseparated: bool,
    #[arg(long)]
    fr: bool,
    /// Cross-check the affine verdict against H¹ of the file's modules.
    #[arg(long)]
    serre: bool,
    #[arg(long)]
    flat: bool,
    #[arg(long)]
    faithfully_flat: bool,
    #[arg(long)]
    quasi_iso: bool,
    #[arg(long)]
    quasi_open: bool,
    #[arg(long)]
    quasi_closed: bool,
}

struct Opts {
    field: Field,
    window: (i64, i64),
}

impl Opts {
    fn backend(&self) -> Backend {
        Backend::Graded { window: self.window }
    }

    fn echo(&self) -> Value {
        json!({ "field": self.field.name(), "window": [self.window.0, self.window.1] })
    }

    fn header(&self) -> String {
        format!("# field {}, window [{}, {}]", self.field.name(), self.window.0, self.window.1)
    }
}

/// A report and the exit code it implies.
struct Outcome {
    text: String,
    json: Value,
    code: u8,
}

fn parse_window(s: &str) -> Result<(i64, i64), Error> {
    let bad = || Error::Parse(format!("window `{s}`: expected `a..b` with a ≤ b"));
    let (a, b) = s.split_once("..").or_else(|| s.split_once(',')).ok_or_else(bad)?;
    let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn code_of(v: &Verdict) -> u8 {
    v.exit_code() as u8
}

/// False wins over undecided, undecided over true.
fn combine<'a>(vs: impl IntoIterator<Item = &'a Verdict>) -> u8 {
    vs.into_iter().map(code_of).fold(0, |acc, c| match (acc, c) {
        (1, _) | (_, 1) => 1,
        (2, _) | (_, 2) => 2,
        _ => 0,
    })
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::NotLocalizationPresented(_) | Error::DegreeBoundExceeded(_) | Error::SectionsNotPresented(_) => 2,
        _ => 3,
    }
}

fn get_map<'a>(f: &'a SpaceFile, name: &str) -> Result<&'a SpaceMap, Error> {
    f.maps.get(name).ok_or_else(|| Error::Schema { path: format!("maps.{name}"), message: "no such map".into() })
}

fn module(f: &SpaceFile, spec: &str) -> Result<SheafModule, Error> {
    if let Some(m) = f.modules.get(spec) {
        return Ok(m.clone());
    }
    if spec == "O" {
        return Ok(SheafModule::structure_sheaf(&f.space));
    }
    if let Some(d) = spec.strip_prefix("O(").and_then(|r| r.strip_suffix(')')) {
        let d: i64 = d.trim().parse().map_err(|_| Error::Parse(format!("bad twist `{spec}`")))?;
        return fixtures::standard_twist(&f.space, d);
    }
    Err(Error::Schema { path: format!("modules.{spec}"), message: "no such module".into() })
}

fn reports_outcome(opts: &Opts, reports: Vec<ClassReport>, extra: Option<(String, Value, u8)>) -> Outcome {
    let mut code = combine(reports.iter().map(|r| &r.verdict));
    let mut text = String::new();
    for r in &reports {
        text.push_str(&r.to_string());
    }
    let mut j = json!({ "options": opts.echo(), "reports": reports });
    if let Some((t, v, c)) = extra {
        text.push_str(&t);
        j["serre"] = v;
        code = code.max(c);
    }
    Outcome { text, json: j, code }
}

fn classify_cmd(opts: &Opts, a: &ClassifyArgs) -> Result<Outcome, Error> {
    let file = serial::load_input(&a.input, opts.field)?;
    let x = &file.space;
    if let Some(name) = &a.map {
        if a.fr || a.semiseparated || a.serre {
            return Err(Error::Parse("--fr, --semiseparated and --serre apply to spaces, not maps".into()));
        }
        let f = get_map(&file, name)?;
        let picks = [a.schematic, a.affine, a.flat, a.faithfully_flat, a.quasi_iso, a.quasi_open, a.quasi_closed];
        let all = !picks.iter().any(|&b| b);
        let r = classify::classify_map(f);
        let reports: Vec<ClassReport> =
            r.all().into_iter().zip(picks).filter(|(_, p)| all || *p).map(|(c, _)| c.clone()).collect();
        return Ok(reports_outcome(opts, reports, None));
    }
    if a.flat || a.faithfully_flat || a.quasi_iso || a.quasi_open || a.quasi_closed {
        return Err(Error::Parse("map classes need --map NAME".into()));
    }
    let all = !(a.affine || a.schematic || a.semiseparated || a.fr || a.serre);
    let mut reports = Vec::new();
    if all || a.fr {
        reports.push(classify::is_fr_space(x));
    }
    if all || a.schematic {
        reports.push(classify::is_schematic(x));
    }
    if all || a.affine {
        reports.push(classify::is_affine(x));
    }
    if all || a.semiseparated {
        reports.push(classify::is_semiseparated(x, opts.backend()));
    }
    let serre = a.serre.then(|| {
        let battery: Vec<(String, SheafModule)> = file.modules.iter().map(|(n, m)| (n.clone(), m.clone())).collect();
        let s = classify::serre_harness(x, &battery, opts.backend());
        let code = u8::from(s.conclusion == SerreConclusion::Contradiction);
        let v = serde_json::to_value(&s).expect("serializable");
        (format!("serre cross-check:\n{s}"), v, code)
    });
    Ok(reports_outcome(opts, reports, serre))
}

fn run(cli: &Cli, opts: &Opts) -> Result<Outcome, Error> {
    let doc_outcome = |f: &SpaceFile| {
        let doc = f.to_document();
        Outcome { text: serial::to_json(&doc), json: serde_json::to_value(&doc).expect("serializable"), code: 0 }
    };
    match &cli.command {
        Command::Validate { input } => {
            let f = serial::load_input(input, opts.field)?;
            let x = &f.space;
            let mut text = format!(
                "valid: {} points, dimension {}, {}T0\n",
                x.len(),
                x.dimension(),
                if x.is_t0() { "" } else { "not " }
            );
            let mut mods = serde_json::Map::new();
            let mut code = 0;
            for (n, m) in &f.modules {
                let qc = m.is_quasi_coherent().quasi_coherent;
                text.push_str(&format!("module {n}: {}quasi-coherent\n", if qc { "" } else { "not " }));
                mods.insert(n.clone(), Value::Bool(qc));
                if !qc {
                    code = 1;
                }
            }
            text.push_str(&format!("maps: {}\nroofs: {}\n", f.maps.len(), f.roofs.len()));
            let json = json!({
                "options": opts.echo(), "valid": true, "points": x.len(), "dimension": x.dimension(),
                "t0": x.is_t0(), "quasi_coherent": mods, "maps": f.maps.keys().collect::<Vec<_>>(),
                "roofs": f.roofs.keys().collect::<Vec<_>>(),
            });
            Ok(Outcome { text, json, code })
        }
        Command::Classify(a) => classify_cmd(opts, a),
        Command::Minimize { input } => {
            let f = serial::load_input(input, opts.field)?;
            let mm = classify::minimal_model(&f.space)?;
            let kq = &mm.kolmogorov.space;
            let removed: Vec<&str> = mm.removed.iter().map(|&p| kq.name(p)).collect();
            let doc = serial::space_document(&mm.space);
            let text = format!(
                "points: {} -> Kolmogorov {} -> minimal {}\nremoved: [{}]\n{}",
                f.space.len(),
                kq.len(),
                mm.space.len(),
                removed.join(", "),
                serial::to_json(&doc)
            );
            let json = json!({ "options": opts.echo(), "removed": removed, "space": doc });
            Ok(Outcome { text, json, code: 0 })
        }
        Command::Cohomology { input, module: spec } => {
            let f = serial::load_input(input, opts.field)?;
            let m = module(&f, spec)?;
            let backend = classify::effective_backend(&f.space, opts.backend());
            let t = cohomology::cohomology(&m, backend)?;
            let text = format!("H^*(X, {spec})\n{}", t);
            let json = json!({ "options": opts.echo(), "module": spec, "table": t.to_json() });
            Ok(Outcome { text, json, code: 0 })
        }
        Command::Rfi { input, map, module: spec } => {
            let f = serial::load_input(input, opts.field)?;
            let g = get_map(&f, map)?;
            let m = module(&f, spec)?;
            let backend = classify::effective_backend(&f.space, opts.backend());
            let tables = cohomology::higher_direct_images(g, &m, backend)?;
            let y = g.target();
            let mut text = String::new();
            let mut js = serde_json::Map::new();
            for (q, t) in tables.iter().enumerate() {
                text.push_str(&format!("R {map}_* {spec} at {}\n{}", y.name(q), t));
                js.insert(y.name(q).to_string(), t.to_json());
            }
            let vanish = tables.iter().all(|t| t.is_acyclic());
            text.push_str(&format!("higher direct images vanish: {vanish}\n"));
            let json = json!({ "options": opts.echo(), "map": map, "module": spec, "tables": js, "higher_vanish": vanish });
            Ok(Outcome { text, json, code: 0 })
        }
        Command::Product { left, right } => {
            let a = serial::load_input(left, opts.field)?;
            let b = serial::load_input(right, opts.field)?;
            let p = space::product(&a.space, &b.space)?;
            let mut out = SpaceFile::bare(p.space.clone());
            out.maps.insert("p1".into(), p.p1);
            out.maps.insert("p2".into(), p.p2);
            Ok(doc_outcome(&out))
        }
        Command::Fiber { input, f, g } => {
            let file = serial::load_input(input, opts.field)?;
            let p = space::fiber_product(get_map(&file, f)?, get_map(&file, g)?)?;
            let mut out = SpaceFile::bare(p.space.clone());
            out.maps.insert("p1".into(), p.p1);
            out.maps.insert("p2".into(), p.p2);
            Ok(doc_outcome(&out))
        }
        Command::Cylinder { input, map } => {
            let file = serial::load_input(input, opts.field)?;
            let c = space::cylinder(get_map(&file, map)?);
            let mut out = SpaceFile::bare(c.space.clone());
            out.maps.insert("retraction".into(), c.retraction);
            Ok(doc_outcome(&out))
        }
        Command::RoofEq { input, a, b } => {
            let file = serial::load_input(input, opts.field)?;
            let roof = |n: &str| -> Result<Roof, Error> {
                let r = file.roofs.get(n).ok_or_else(|| Error::Schema { path: format!("roofs.{n}"), message: "no such roof".into() })?;
                Roof::new(get_map(&file, &r.left)?.clone(), get_map(&file, &r.right)?.clone())
            };
            let eq = roof_equal(&roof(a)?, &roof(b)?)?;
            let text = format!("[{a}] {} [{b}]\n", if eq { "=" } else { "≠" });
            let json = json!({ "options": opts.echo(), "left": a, "right": b, "equal": eq });
            Ok(Outcome { text, json, code: u8::from(!eq) })
        }
        Command::Generate { name } => {
            let input = if name.starts_with("point(") { name.clone() } else { format!("builtin:{name}") };
            Ok(doc_outcome(&serial::load_input(&input, opts.field)?))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = Field::parse(&cli.field)
        .and_then(|field| Ok(Opts { field, window: parse_window(&cli.window)? }))
        .and_then(|opts| run(&cli, &opts).map(|o| (opts, o)));
    match result {
        Ok((opts, o)) => {
            let document_verb = matches!(
                cli.command,
                Command::Product { .. } | Command::Fiber { .. } | Command::Cylinder { .. } | Command::Generate { .. }
            );
            let out = match cli.format {
                Format::Json if !document_verb => format!("{}\n", serde_json::to_string_pretty(&o.json).expect("serializable")),
                _ if document_verb => format!("{}\n", o.text),
                _ => format!("{}\n{}", opts.header(), o.text),
            };
            // A closed pipe downstream is not an error of ours.
            let _ = std::io::stdout().lock().write_all(out.as_bytes());
            ExitCode::from(o.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
