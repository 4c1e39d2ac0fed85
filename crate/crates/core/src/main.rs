use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use gradings::catalog::{self, CatalogError, DiagramTag};
use gradings::grading::{self, Grading, GradingError};
use gradings::groups::{Generates, GroupDescriptor, GroupElement};
use gradings::json as encoding;
use gradings::json::JsonError;
use gradings::pi1::{self, Certification, Pi1Error};
use gradings::scalars::FieldDescriptor;
use gradings::smash::{self, SmashError};

#[derive(Parser)]
#[command(
    name = "gradings",
    version,
    about = "Connected group gradings: construction, verification, coverings, fundamental groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Coefficient field: Q, Q(z<m>), or F<p>. Defaults to Q(z12), except
    /// that truncated-polynomial tags default to their own prime field.
    #[arg(long, global = true)]
    field: Option<String>,
    /// Truncation and certification radius.
    #[arg(long, global = true, default_value_t = 6)]
    radius: usize,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text, alias = "emit")]
    format: Format,
    /// Seed for the randomized mutation checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// List, build, or verify the built-in gradings.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Re-verify data produced by this tool or edited by hand.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
    /// Materialize the smash-product covering of a built-in grading and
    /// check the covering (and Galois) properties.
    Smash {
        /// A catalog entry name (see `catalog list`).
        name: String,
    },
    /// Compute and certify the fundamental group of a tagged algebra.
    Pi1 {
        /// k2, k3, k4, M2, M3, Mp:<p>, Tn:<n>, or trunc:<p>.
        tag: String,
    },
    /// Classification reports.
    Report {
        #[command(subcommand)]
        which: ReportKind,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Print the built-in grading names.
    List,
    /// Build one named grading and emit it.
    Build { name: String },
    /// Build and verify every entry, optionally with seeded mutation checks
    /// that must all fail verification.
    Verify {
        /// Verify the whole catalog (the default and only mode).
        #[arg(long)]
        all: bool,
        /// Number of randomly perturbed gradings that must be rejected.
        #[arg(long, default_value_t = 0)]
        mutations: usize,
    },
}

#[derive(Subcommand)]
enum VerifyTarget {
    /// Check the grading axioms on a JSON grading document.
    Grading {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum ReportKind {
    /// The six specific gradings of the four-point diagonal algebra.
    K4Table,
    /// Two simply connected coverings with different invariants.
    NoUniversal { tag: String },
}

enum CliError {
    Usage(String),
    Verification(Value),
    Io(std::io::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn witness(error: impl std::fmt::Display) -> Value {
    json!({
        "schema": encoding::SCHEMA_VERSION,
        "kind": "verification-failure",
        "error": error.to_string(),
    })
}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::UnknownTag(_)
            | CatalogError::Unsupported(_)
            | CatalogError::BadCharacteristic { .. } => CliError::Usage(e.to_string()),
            other => CliError::Verification(witness(other)),
        }
    }
}

impl From<Pi1Error> for CliError {
    fn from(e: Pi1Error) -> Self {
        match e {
            Pi1Error::Unsupported(_) => CliError::Usage(e.to_string()),
            Pi1Error::Catalog(inner) => CliError::from(inner),
            other => CliError::Verification(witness(other)),
        }
    }
}

impl From<SmashError> for CliError {
    fn from(e: SmashError) -> Self {
        match e {
            SmashError::InfiniteWithoutRadius => CliError::Usage(e.to_string()),
            other => CliError::Verification(witness(other)),
        }
    }
}

impl From<GradingError> for CliError {
    fn from(e: GradingError) -> Self {
        if let GradingError::Violation(v) = &e {
            return CliError::Verification(json!({
                "schema": encoding::SCHEMA_VERSION,
                "kind": "verification-failure",
                "error": e.to_string(),
                "violation": {
                    "left": v.left,
                    "right": v.right,
                    "offending": v.offending,
                    "reason": v.reason,
                },
            }));
        }
        CliError::Verification(witness(e))
    }
}

impl From<JsonError> for CliError {
    fn from(e: JsonError) -> Self {
        match e {
            JsonError::Shape(_) | JsonError::Schema(_) | JsonError::Parse(_) => {
                CliError::Usage(e.to_string())
            }
            JsonError::Grading(inner) => CliError::from(inner),
            other => CliError::Verification(witness(other)),
        }
    }
}

/// Prints a line to stdout, ignoring a closed pipe so that piping into
/// `head` and friends ends quietly instead of panicking.
fn emit(s: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{s}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out_path = cli.out.clone();
    match run(cli) {
        Ok(output) => {
            match out_path {
                Some(path) => {
                    if let Err(e) = fs::write(&path, output + "\n") {
                        eprintln!("cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => emit(&output),
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Verification(witness)) => {
            emit(&pretty(&witness));
            ExitCode::from(2)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable value")
}

/// The working field: an explicit --field wins; truncated-polynomial tags
/// fall back to their forced prime field; everything else gets Q(z12),
/// which contains the roots of unity every built-in construction needs.
fn effective_field(flag: &Option<String>, tag: Option<&str>) -> Result<FieldDescriptor, CliError> {
    if let Some(spec) = flag {
        return encoding::parse_field(spec)
            .map_err(|e| CliError::Usage(format!("invalid field {spec}: {e}")));
    }
    if let Some(tag) = tag {
        if let Ok(DiagramTag::Truncated(p)) = DiagramTag::parse(tag) {
            return FieldDescriptor::prime(p as u64)
                .map_err(|e| CliError::Usage(e.to_string()));
        }
    }
    Ok(FieldDescriptor::cyclotomic(12).expect("valid order"))
}

fn run(cli: Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Catalog { action } => match action {
            CatalogAction::List => catalog_list(&cli),
            CatalogAction::Build { name } => catalog_build(&cli, name),
            CatalogAction::Verify { mutations, .. } => catalog_verify(&cli, *mutations),
        },
        Command::Verify { target } => match target {
            VerifyTarget::Grading { file } => verify_grading_file(&cli, file),
        },
        Command::Smash { name } => smash_entry(&cli, name),
        Command::Pi1 { tag } => pi1_run(&cli, tag),
        Command::Report { which } => match which {
            ReportKind::K4Table => k4_table(&cli),
            ReportKind::NoUniversal { tag } => no_universal(&cli, tag),
        },
    }
}

fn catalog_list(cli: &Cli) -> Result<String, CliError> {
    let field = effective_field(&cli.field, None)?;
    let entries = catalog::catalog_entries(&field)?;
    Ok(match cli.format {
        Format::Text => entries
            .iter()
            .map(|e| format!("{:<12} {}", e.name, e.summary))
            .collect::<Vec<_>>()
            .join("\n"),
        Format::Csv => {
            let mut rows = vec!["name,summary".to_string()];
            rows.extend(entries.iter().map(|e| format!("{},{}", e.name, e.summary)));
            rows.join("\n")
        }
        Format::Json => pretty(&json!({
            "schema": encoding::SCHEMA_VERSION,
            "entries": entries
                .iter()
                .map(|e| json!({ "name": e.name, "summary": e.summary }))
                .collect::<Vec<_>>(),
        })),
    })
}

fn catalog_build(cli: &Cli, name: &str) -> Result<String, CliError> {
    let field = effective_field(&cli.field, None)?;
    let entry = catalog::build_entry(name, &field)?;
    let certificate = grading::verify_grading(&entry.grading)?;
    Ok(match cli.format {
        Format::Text => {
            let g = &entry.grading;
            format!(
                "{}: {}\ngroup {}; dimension {}; {}",
                entry.name,
                entry.summary,
                g.group().describe(),
                g.category().dimension(),
                certificate
            )
        }
        Format::Csv => {
            let g = &entry.grading;
            let mut rows = vec!["basis,degree".to_string()];
            for (i, b) in g.category().basis().iter().enumerate() {
                rows.push(format!("{},{}", b.name, g.group().render(g.degree_by_index(i))));
            }
            rows.join("\n")
        }
        Format::Json => pretty(&encoding::entry_to_json(&entry)),
    })
}

/// Picks a group element distinct from the identity, uniformly from the
/// whole group when finite and from a small word ball otherwise.
fn random_nonidentity(
    group: &GroupDescriptor,
    rng: &mut ChaCha8Rng,
) -> Result<GroupElement, CliError> {
    let radius = if group.order().is_some() { None } else { Some(2) };
    let pool: Vec<GroupElement> = group
        .enumerate(radius)
        .map_err(|e| CliError::Verification(witness(e)))?
        .into_iter()
        .filter(|e| *e != group.identity())
        .collect();
    if pool.is_empty() {
        return Err(CliError::Usage("cannot perturb a trivial group".into()));
    }
    Ok(pool[rng.gen_range(0..pool.len())].clone())
}

fn catalog_verify(cli: &Cli, mutations: usize) -> Result<String, CliError> {
    let field = effective_field(&cli.field, None)?;
    let entries = catalog::catalog_entries(&field)?;
    for e in &entries {
        grading::verify_grading(&e.grading)?;
    }

    // Mutation checks: perturb the degree of a composition target away from
    // the product of its factor degrees; verification must refuse each one.
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let usable: Vec<&catalog::CatalogEntry> = entries
        .iter()
        .filter(|e| {
            e.grading.group().order() != Some(1)
                && e.grading
                    .category()
                    .composition_entries()
                    .iter()
                    .any(|(g, f, k, _)| k != g && k != f)
        })
        .collect();
    let mut rejected = 0usize;
    for _ in 0..mutations {
        let entry = usable[rng.gen_range(0..usable.len())];
        let g = &entry.grading;
        let triples: Vec<(usize, usize, usize)> = g
            .category()
            .composition_entries()
            .into_iter()
            .filter(|(gg, ff, kk, _)| kk != gg && kk != ff)
            .map(|(gg, ff, kk, _)| (gg, ff, kk))
            .collect();
        let (gg, ff, kk) = triples[rng.gen_range(0..triples.len())];
        let group = g.group();
        let x = random_nonidentity(group, &mut rng)?;
        let mul = |a: &GroupElement, b: &GroupElement| {
            group.multiply(a, b).map_err(|e| CliError::Verification(witness(e)))
        };
        let mut degrees: Vec<GroupElement> =
            (0..g.category().dimension()).map(|i| g.degree_by_index(i).clone()).collect();
        // The pair (gg, ff) now produces a component of degree differing by
        // the nonidentity factor x, so the axiom fails at that pair.
        degrees[kk] = mul(&mul(&degrees[gg], &degrees[ff])?, &x)?;
        let mutated = Grading::from_degree_vec(g.category().clone(), group.clone(), degrees)?;
        if grading::verify_grading(&mutated).is_ok() {
            return Err(CliError::Verification(json!({
                "schema": encoding::SCHEMA_VERSION,
                "kind": "verification-failure",
                "error": format!(
                    "perturbed copy of {} passed verification; the checker is unsound",
                    entry.name
                ),
            })));
        }
        rejected += 1;
    }

    Ok(match cli.format {
        Format::Text => format!(
            "{} entries verified; {} mutated copies rejected",
            entries.len(),
            rejected
        ),
        Format::Csv => format!("entries,mutations_rejected\n{},{}", entries.len(), rejected),
        Format::Json => pretty(&json!({
            "schema": encoding::SCHEMA_VERSION,
            "entries_verified": entries.len(),
            "mutations_rejected": rejected,
        })),
    })
}

fn verify_grading_file(cli: &Cli, file: &PathBuf) -> Result<String, CliError> {
    let text = fs::read_to_string(file)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", file.display())))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!(
            "{} is not a JSON grading document ({e}); \
             produce one with `catalog build <name> --format json`",
            file.display()
        ))
    })?;
    // Accept both a bare grading document and a catalog entry wrapping one.
    let doc = doc.get("grading").cloned().unwrap_or(doc);
    let grading = encoding::grading_from_json(&doc)?;
    let certificate = grading::verify_grading(&grading)?;
    let connected = grading::is_connected(&grading)?;
    Ok(match cli.format {
        Format::Text => format!(
            "grading verified: {certificate}; connected: {}",
            match connected {
                Generates::Yes => "yes",
                Generates::No => "no",
                Generates::Unknown => "undetermined at this radius",
            }
        ),
        Format::Csv => format!(
            "checked_pairs,support,connected\n{},{},{:?}",
            certificate.checked_pairs, certificate.support_size, connected
        ),
        Format::Json => pretty(&json!({
            "schema": encoding::SCHEMA_VERSION,
            "verified": true,
            "checked_pairs": certificate.checked_pairs,
            "support": certificate.support_size,
            "connected": format!("{connected:?}"),
        })),
    })
}

fn smash_entry(cli: &Cli, name: &str) -> Result<String, CliError> {
    let field = effective_field(&cli.field, None)?;
    let entry = catalog::build_entry(name, &field)?;
    let finite = entry.grading.group().order().is_some();
    let radius = if finite { None } else { Some(cli.radius) };
    let s = smash::smash_product(&entry.grading, radius)?;
    let mut report = smash::verify_covering(&s)?;
    if finite {
        report.galois = Some(smash::verify_galois(&s)?);
    }
    Ok(match cli.format {
        Format::Text => format!(
            "smash covering of {} ({} objects, {} basis morphisms)\n{}",
            entry.name,
            s.objects().len(),
            s.realization().dimension(),
            report
        ),
        Format::Csv => {
            let mut rows = vec!["object,out_dim,in_dim,base_out,base_in".to_string()];
            for r in &report.stars {
                rows.push(format!(
                    "{},{},{},{},{}",
                    r.object, r.out_dim, r.in_dim, r.base_out, r.base_in
                ));
            }
            rows.join("\n")
        }
        Format::Json => pretty(&encoding::covering_to_json(&report)),
    })
}

fn pi1_run(cli: &Cli, tag: &str) -> Result<String, CliError> {
    let field = effective_field(&cli.field, Some(tag))?;
    let result = pi1::fundamental_group(tag, &field, cli.radius)?;
    Ok(match cli.format {
        Format::Text => {
            let mut lines = vec![result.group.describe()];
            lines.push(format!("certification: {}", result.certification));
            lines.push(format!(
                "diagram: {} nodes [{}], {} arrows",
                result.node_groups.len(),
                result.node_groups.join(", "),
                result.diagram_arrows
            ));
            for m in &result.methods {
                lines.push(format!("  {m}"));
            }
            lines.join("\n")
        }
        Format::Csv => {
            let (kind, radius, candidates, tuples) = match &result.certification {
                Certification::Exact => ("exact".to_string(), String::new(), String::new(), String::new()),
                Certification::Bounded(c) => (
                    "bounded".to_string(),
                    c.radius.to_string(),
                    c.candidate_elements.to_string(),
                    c.compatible_tuples.to_string(),
                ),
            };
            format!(
                "tag,group,certification,radius,candidates,tuples\n{},{},{},{},{},{}",
                result.tag,
                result.group.describe(),
                kind,
                radius,
                candidates,
                tuples
            )
        }
        Format::Json => pretty(&encoding::pi1_to_json(&result)),
    })
}

fn k4_table(cli: &Cli) -> Result<String, CliError> {
    let field = effective_field(&cli.field, None)?;
    let rows = catalog::k4_table_report(&field)?;
    Ok(match cli.format {
        Format::Text => {
            let mut lines = vec![format!("{:<10} {:>7}  {}", "group", "trivial", "others")];
            for r in &rows {
                let others = if r.other_dimensions.is_empty() {
                    "-".to_string()
                } else {
                    r.other_dimensions
                        .iter()
                        .map(usize::to_string)
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                lines.push(format!("{:<10} {:>7}  {}", r.group, r.trivial_dimension, others));
            }
            lines.join("\n")
        }
        Format::Csv => {
            let mut lines = vec!["group,trivial_dimension,other_dimensions".to_string()];
            for r in &rows {
                lines.push(format!(
                    "{},{},{}",
                    r.group,
                    r.trivial_dimension,
                    r.other_dimensions
                        .iter()
                        .map(usize::to_string)
                        .collect::<Vec<_>>()
                        .join(" ")
                ));
            }
            lines.join("\n")
        }
        Format::Json => pretty(&encoding::k4_table_to_json(&rows)),
    })
}

fn no_universal(cli: &Cli, tag: &str) -> Result<String, CliError> {
    let field = effective_field(&cli.field, Some(tag))?;
    let report = pi1::check_no_universal(tag, &field)?;
    Ok(match cli.format {
        Format::Text => report.to_string(),
        Format::Csv => format!(
            "tag,left,right,discriminator,bounded\n{},{},{},\"{}\",{}",
            report.tag, report.left_name, report.right_name, report.discriminator, report.bounded
        ),
        Format::Json => pretty(&encoding::no_universal_to_json(&report)),
    })
}
