//! brx: JSON command-line front end for the classification engine.
//!
//! Exit codes: 0 success (one JSON document on stdout), 2 validation error
//! (machine-readable error object on stderr), 1 internal failure. All
//! numbers are exact fraction strings or integers; output is deterministic.

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use brx_core::brauer::{BrauerClass, Inv, Window};
use brx_core::numfield::{parse_rat, FieldSpec, Place, Rat};
use brx_core::quadform::{GramMatrix, QuadraticForm};
use brx_core::quiver::{
    congruent_unimodular, euler_form, euler_form_projective_space, reduced_norm,
    reduced_norm_image_contains, EulerForm, Species,
};
use brx_core::twistclass::{
    act, enumerate_twists, index_reduction, same_twist, schema, stabilizer, Geometry,
    TorsorDatum, TwistPoint,
};

#[derive(Parser)]
#[command(
    name = "brx",
    version,
    about = "Brauer groups, quadratic-form invariants, and twisted Brauer set classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Ground field: reals | rationals | padic:P | finite:Q
    #[arg(long)]
    field: String,
}

#[derive(Args, Clone)]
struct WindowArgs {
    /// Torsion bound m of the enumeration window (mandatory over the
    /// rationals and the p-adics for enumeration)
    #[arg(long)]
    torsion_bound: Option<u64>,
    /// Comma-separated window support, e.g. "oo,2,3" (mandatory over the
    /// rationals)
    #[arg(long)]
    support: Option<String>,
}

#[derive(Args, Clone)]
struct GeometryArgs {
    /// Geometry: genus0 | severi-brauer | quadric-odd | quadric-even |
    /// nc-projective
    #[arg(long)]
    geometry: String,
    /// Degree/size parameter n for the parametrized geometries
    #[arg(long)]
    degree: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all twist points and orbits within the window
    Classify {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Stabilizer subgroup of a torsor under the Brauer-group action
    Stabilizer {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        window: WindowArgs,
        /// Brauer-class torsor, e.g. "{oo:1/2, 2:1/2}" or "{}"
        #[arg(long)]
        class: Option<String>,
        /// Quadratic-form torsor as a diagonal, e.g. "[1,1,1,1]"
        #[arg(long)]
        form: Option<String>,
    },
    /// Orbit of a twist point under the window classes
    Orbit {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        window: WindowArgs,
        /// Brauer-class torsor of the point
        #[arg(long)]
        class: Option<String>,
        /// Quadratic-form torsor of the point
        #[arg(long)]
        form: Option<String>,
        /// Twist class of the point (defaults to 0)
        #[arg(long)]
        twist: Option<String>,
    },
    /// Index of a Brauer class over the function field of a quadric
    IndexReduction {
        #[command(flatten)]
        field: FieldArgs,
        /// The quadratic form p as a diagonal, e.g. "[1,1,1,1,-1]"
        #[arg(long)]
        form: String,
        /// The Brauer class D, e.g. "{oo:1/2, 2:1/2}"
        #[arg(long)]
        class: String,
    },
    /// Invariants of a quadratic form (or of a Gram matrix)
    Form {
        #[command(flatten)]
        field: FieldArgs,
        /// Diagonal coefficients, e.g. "[1,2,-3]" or "[\"1/2\",3]"
        #[arg(long)]
        diag: Option<String>,
        /// Symmetric Gram matrix, e.g. "[[0,1],[1,0]]" (diagonalized first)
        #[arg(long)]
        gram: Option<String>,
    },
    /// Inspect and combine Brauer classes
    Brauer {
        #[command(flatten)]
        field: FieldArgs,
        /// A class by local invariants, e.g. "{oo:1/2, 2:1/2}"
        #[arg(long)]
        class: Option<String>,
        /// A class by quaternion symbol, e.g. "-1,-1"
        #[arg(long, allow_hyphen_values = true)]
        quaternion: Option<String>,
        /// Tensor with a second class before reporting
        #[arg(long)]
        tensor: Option<String>,
    },
    /// Quiver and species invariants
    Quiver {
        #[command(subcommand)]
        action: QuiverAction,
    },
    /// Classification schema of a geometry over a field
    Schema {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[command(flatten)]
        field: FieldArgs,
    },
}

#[derive(Subcommand)]
enum QuiverAction {
    /// Euler form on K0 in the projective basis
    Euler {
        /// The n-arrow Kronecker quiver Omega_n
        #[arg(long)]
        omega: Option<usize>,
        /// Species JSON: {"vertices":[{"label_dim":d}],"arrows":[{"src":i,"dst":j,"dim":m}]}
        #[arg(long)]
        species: Option<String>,
    },
    /// Cartan matrix of a species
    Cartan {
        #[arg(long)]
        omega: Option<usize>,
        #[arg(long)]
        species: Option<String>,
    },
    /// Euler form of the exceptional collection O..O(n) on projective n-space
    Projective {
        #[arg(long)]
        n: u32,
    },
    /// Bounded search for a unimodular congruence between two Euler forms
    Congruent {
        /// First matrix, e.g. "[[1,2],[0,1]]"
        #[arg(long)]
        e1: String,
        /// Second matrix
        #[arg(long)]
        e2: String,
        /// Entry bound of the search
        #[arg(long, default_value_t = 3)]
        bound: i64,
    },
    /// Reduced norm of a real quaternion "a,b,c,d"
    Norm {
        #[arg(long, allow_hyphen_values = true)]
        element: String,
    },
    /// Whether a value is a reduced norm from the split algebra or from H
    NormContains {
        #[arg(long, allow_hyphen_values = true)]
        value: String,
        #[arg(long)]
        split: bool,
    },
}

enum CliError {
    Validation(String),
    Internal(String),
}

impl From<brx_core::Error> for CliError {
    fn from(e: brx_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

// --- input parsing -----------------------------------------------------------

fn parse_field(s: &str) -> CliResult<FieldSpec> {
    match s {
        "reals" | "R" => Ok(FieldSpec::reals()),
        "rationals" | "Q" => Ok(FieldSpec::rationals()),
        _ => {
            if let Some(p) = s.strip_prefix("padic:") {
                let p: u64 = p.parse().map_err(|_| invalid("bad prime in --field"))?;
                Ok(FieldSpec::padic(p)?)
            } else if let Some(q) = s.strip_prefix("finite:") {
                let q: u64 = q.parse().map_err(|_| invalid("bad prime power in --field"))?;
                Ok(FieldSpec::finite(q)?)
            } else {
                Err(invalid(format!(
                    "unknown field '{s}': expected reals, rationals, padic:P or finite:Q"
                )))
            }
        }
    }
}

fn parse_place(s: &str) -> CliResult<Place> {
    match s.trim() {
        "oo" | "∞" | "inf" | "real" => Ok(Place::Real),
        t => {
            let p: u64 = t.parse().map_err(|_| invalid(format!("bad place '{t}'")))?;
            Ok(Place::finite(p)?)
        }
    }
}

fn parse_window(w: &WindowArgs) -> CliResult<Option<Window>> {
    match (&w.torsion_bound, &w.support) {
        (None, None) => Ok(None),
        (m, s) => {
            let m = m.ok_or_else(|| invalid("--support requires --torsion-bound"))?;
            let support = match s {
                None => vec![],
                Some(s) if s.trim().is_empty() => vec![],
                Some(s) => s
                    .split(',')
                    .map(parse_place)
                    .collect::<CliResult<Vec<_>>>()?,
            };
            Ok(Some(Window::new(m, support)?))
        }
    }
}

/// Parses "{oo:1/2, 2:1/2}" (also "{}") into a Brauer class.
fn parse_class(s: &str, k: &FieldSpec) -> CliResult<BrauerClass> {
    // accept the JSON document emitted by this tool as well as the compact
    // {place:inv, ...} syntax
    if s.contains('"') {
        let c: BrauerClass = serde_json::from_str(s)
            .map_err(|e| invalid(format!("bad class document: {e}")))?;
        if c.field() != k {
            return Err(invalid(format!(
                "class is over {}, command field is {}",
                c.field(),
                k
            )));
        }
        return Ok(c);
    }
    let body = s
        .trim()
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| invalid(format!("bad class '{s}': expected {{place:inv, ...}}")))?;
    let mut invariants: Vec<(Place, Inv)> = Vec::new();
    for entry in body.split(',').map(str::trim).filter(|e| !e.is_empty()) {
        let (place, value) = entry
            .split_once(':')
            .ok_or_else(|| invalid(format!("bad invariant entry '{entry}'")))?;
        let value = value.trim();
        let (num, den) = match value.split_once('/') {
            Some((n, d)) => (
                n.trim().parse::<i64>().map_err(|_| invalid("bad numerator"))?,
                d.trim().parse::<i64>().map_err(|_| invalid("bad denominator"))?,
            ),
            None => (
                value.parse::<i64>().map_err(|_| invalid("bad invariant"))?,
                1,
            ),
        };
        if den == 0 {
            return Err(invalid("zero denominator in invariant"));
        }
        invariants.push((parse_place(place)?, Inv::new(num, den)));
    }
    Ok(BrauerClass::from_invariants(k.clone(), invariants)?)
}

fn parse_diag(s: &str, k: &FieldSpec) -> CliResult<QuadraticForm> {
    let entries: Vec<Value> =
        serde_json::from_str(s).map_err(|e| invalid(format!("bad form '{s}': {e}")))?;
    let mut diag: Vec<Rat> = Vec::new();
    for e in entries {
        diag.push(json_number_to_rat(&e)?);
    }
    Ok(QuadraticForm::new(k.clone(), diag)?)
}

fn json_number_to_rat(v: &Value) -> CliResult<Rat> {
    match v {
        Value::Number(n) => {
            let i = n
                .as_i64()
                .ok_or_else(|| invalid("numbers must be integers or fraction strings"))?;
            Ok(parse_rat(&i.to_string())?)
        }
        Value::String(s) => Ok(parse_rat(s)?),
        _ => Err(invalid("expected an integer or a fraction string")),
    }
}

fn parse_matrix(s: &str) -> CliResult<EulerForm> {
    let rows: Vec<Vec<i64>> =
        serde_json::from_str(s).map_err(|e| invalid(format!("bad matrix '{s}': {e}")))?;
    Ok(EulerForm::new(rows)?)
}

fn parse_geometry(g: &GeometryArgs) -> CliResult<Geometry> {
    let need_degree = || {
        g.degree
            .ok_or_else(|| invalid(format!("--geometry {} requires --degree", g.geometry)))
    };
    Ok(match g.geometry.as_str() {
        "genus0" | "conic" => Geometry::Genus0,
        "severi-brauer" => Geometry::severi_brauer(need_degree()?)?,
        "quadric-odd" => Geometry::quadric_odd(need_degree()?)?,
        "quadric-even" => Geometry::quadric_even(need_degree()?)?,
        "nc-projective" => Geometry::nc_projective(need_degree()?)?,
        other => {
            return Err(invalid(format!(
                "unknown geometry '{other}': expected genus0, severi-brauer, quadric-odd, quadric-even or nc-projective"
            )))
        }
    })
}

fn parse_torsor(
    class: &Option<String>,
    form: &Option<String>,
    k: &FieldSpec,
) -> CliResult<TorsorDatum> {
    match (class, form) {
        (Some(c), None) => Ok(TorsorDatum::Brauer(parse_class(c, k)?)),
        (None, Some(f)) => Ok(TorsorDatum::Form(parse_diag(f, k)?)),
        _ => Err(invalid("provide exactly one of --class or --form as the torsor")),
    }
}

// --- command execution ---------------------------------------------------------

fn to_value<T: serde::Serialize>(t: &T) -> CliResult<Value> {
    serde_json::to_value(t).map_err(|e| CliError::Internal(e.to_string()))
}

fn run(cli: Cli) -> CliResult<Value> {
    match cli.command {
        Command::Classify { geometry, field, window } => {
            let g = parse_geometry(&geometry)?;
            let k = parse_field(&field.field)?;
            let w = parse_window(&window)?;
            let points = enumerate_twists(&g, &k, w.as_ref())?;
            let mut out = Vec::new();
            for (point, orbit) in points {
                let mut entry = serde_json::Map::new();
                entry.insert("orbit".into(), json!(orbit));
                if let Some(w) = &w {
                    entry.insert("window".into(), to_value(w)?);
                }
                entry.insert("point".into(), to_value(&point)?);
                out.push(Value::Object(entry));
            }
            Ok(Value::Array(out))
        }
        Command::Stabilizer { geometry, field, window, class, form } => {
            let g = parse_geometry(&geometry)?;
            let k = parse_field(&field.field)?;
            let w = parse_window(&window)?;
            let torsor = parse_torsor(&class, &form, &k)?;
            let stab = stabilizer(&g, &torsor, &k, w.as_ref())?;
            Ok(json!({ "stabilizer": to_value(&stab)? }))
        }
        Command::Orbit { geometry, field, window, class, form, twist } => {
            let g = parse_geometry(&geometry)?;
            let k = parse_field(&field.field)?;
            let w = parse_window(&window)?;
            let torsor = parse_torsor(&class, &form, &k)?;
            let twist = match twist {
                Some(t) => parse_class(&t, &k)?,
                None => BrauerClass::zero(k.clone()),
            };
            let point = TwistPoint::new(g, torsor, twist)?;
            let classes = match (&k, &w) {
                (FieldSpec::Rationals, Some(w)) => brx_core::brauer::enumerate_torsion(
                    &k,
                    w.torsion_bound,
                    Some(&w.support),
                )?,
                (FieldSpec::Rationals, None) => {
                    return Err(brx_core::Error::MissingWindow.into())
                }
                (FieldSpec::PAdic { .. }, Some(w)) => {
                    brx_core::brauer::enumerate_torsion(&k, w.torsion_bound, None)?
                }
                (FieldSpec::PAdic { .. }, None) => {
                    return Err(brx_core::Error::MissingWindow.into())
                }
                (FieldSpec::Reals, _) => brx_core::brauer::enumerate_torsion(&k, 2, None)?,
                (FieldSpec::FiniteField { .. }, _) => {
                    brx_core::brauer::enumerate_torsion(&k, 1, None)?
                }
            };
            let mut orbit: Vec<TwistPoint> = Vec::new();
            for alpha in &classes {
                let moved = act(alpha, &point)?;
                if !orbit.iter().try_fold(false, |acc, p| {
                    same_twist(p, &moved).map(|eq| acc || eq)
                })? {
                    orbit.push(moved);
                }
            }
            Ok(json!({ "orbit": to_value(&orbit)?, "size": orbit.len() }))
        }
        Command::IndexReduction { field, form, class } => {
            let k = parse_field(&field.field)?;
            let p = parse_diag(&form, &k)?;
            let d = parse_class(&class, &k)?;
            Ok(json!({ "index": index_reduction(&d, &p)? }))
        }
        Command::Form { field, diag, gram } => {
            let k = parse_field(&field.field)?;
            let q = match (diag, gram) {
                (Some(d), None) => parse_diag(&d, &k)?,
                (None, Some(g)) => {
                    let rows: Vec<Vec<Value>> = serde_json::from_str(&g)
                        .map_err(|e| invalid(format!("bad gram matrix: {e}")))?;
                    let entries: Vec<Vec<Rat>> = rows
                        .iter()
                        .map(|r| r.iter().map(json_number_to_rat).collect())
                        .collect::<CliResult<_>>()?;
                    GramMatrix::new(k.clone(), entries)?.diagonalize()?
                }
                _ => return Err(invalid("provide exactly one of --diag or --gram")),
            };
            let mut out = serde_json::Map::new();
            out.insert("form".into(), to_value(&q)?);
            out.insert(
                "discriminant".into(),
                json!(q.discriminant()?.rep.to_string()),
            );
            if matches!(k, FieldSpec::Reals | FieldSpec::Rationals) {
                let (pos, neg) = q.signature()?;
                out.insert("signature".into(), json!([pos, neg]));
            }
            let mut hasse = BTreeMap::new();
            match &k {
                FieldSpec::Rationals => {
                    for v in q.relevant_places()? {
                        let key = match v {
                            Place::Real => "oo".to_string(),
                            Place::Finite(p) => p.to_string(),
                        };
                        hasse.insert(key, q.hasse_invariant(v)?);
                    }
                }
                FieldSpec::PAdic { p } => {
                    hasse.insert(p.to_string(), q.hasse_invariant(Place::Finite(*p))?);
                }
                _ => {}
            }
            if !hasse.is_empty() {
                out.insert("hasse".into(), to_value(&hasse)?);
            }
            out.insert("isotropic".into(), json!(q.is_isotropic(&k)?));
            if q.rank() % 2 == 1 {
                out.insert("even_clifford_class".into(), to_value(&q.even_clifford_class()?)?);
            } else {
                out.insert("full_clifford_class".into(), to_value(&q.full_clifford_class()?)?);
            }
            Ok(Value::Object(out))
        }
        Command::Brauer { field, class, quaternion, tensor } => {
            let k = parse_field(&field.field)?;
            let mut c = match (class, quaternion) {
                (Some(s), None) => parse_class(&s, &k)?,
                (None, Some(q)) => {
                    let (a, b) = q
                        .split_once(',')
                        .ok_or_else(|| invalid("expected --quaternion \"a,b\""))?;
                    BrauerClass::quaternion(&parse_rat(a.trim())?, &parse_rat(b.trim())?, &k)?
                }
                _ => return Err(invalid("provide exactly one of --class or --quaternion")),
            };
            if let Some(t) = tensor {
                c = c.tensor(&parse_class(&t, &k)?)?;
            }
            Ok(json!({
                "class": to_value(&c)?,
                "period": c.period(),
                "index": c.index(),
                "is_zero": c.is_zero(),
            }))
        }
        Command::Quiver { action } => run_quiver(action),
        Command::Schema { geometry, field } => {
            let g = parse_geometry(&geometry)?;
            let k = parse_field(&field.field)?;
            to_value(&schema(&g, &k)?)
        }
    }
}

fn species_input(omega: Option<usize>, species: Option<String>) -> CliResult<Species> {
    match (omega, species) {
        (Some(n), None) => {
            if n == 0 {
                return Err(invalid("--omega must be >= 1"));
            }
            Ok(Species::omega(n))
        }
        (None, Some(s)) => {
            serde_json::from_str(&s).map_err(|e| invalid(format!("bad species: {e}")))
        }
        _ => Err(invalid("provide exactly one of --omega or --species")),
    }
}

fn run_quiver(action: QuiverAction) -> CliResult<Value> {
    match action {
        QuiverAction::Euler { omega, species } => {
            let s = species_input(omega, species)?;
            Ok(json!(euler_form(&s)?.matrix))
        }
        QuiverAction::Cartan { omega, species } => {
            let s = species_input(omega, species)?;
            Ok(json!(s.cartan_matrix()?))
        }
        QuiverAction::Projective { n } => {
            if n == 0 {
                return Err(invalid("--n must be >= 1"));
            }
            Ok(json!(euler_form_projective_space(n).matrix))
        }
        QuiverAction::Congruent { e1, e2, bound } => {
            let e1 = parse_matrix(&e1)?;
            let e2 = parse_matrix(&e2)?;
            to_value(&congruent_unimodular(&e1, &e2, bound)?)
        }
        QuiverAction::Norm { element } => {
            let coords: Vec<Rat> = element
                .split(',')
                .map(|c| parse_rat(c.trim()).map_err(CliError::from))
                .collect::<CliResult<_>>()?;
            let coords: [Rat; 4] = coords
                .try_into()
                .map_err(|_| invalid("expected four coordinates \"a,b,c,d\""))?;
            Ok(json!({ "norm": reduced_norm(&coords).to_string() }))
        }
        QuiverAction::NormContains { value, split } => {
            let v = parse_rat(&value)?;
            Ok(json!({ "contains": reduced_norm_image_contains(&v, split)? }))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(cli)));
    match outcome {
        Ok(Ok(doc)) => {
            println!("{doc}");
            ExitCode::SUCCESS
        }
        Ok(Err(CliError::Validation(msg))) => {
            eprintln!("{}", json!({ "error": { "code": "validation", "message": msg } }));
            ExitCode::from(2)
        }
        Ok(Err(CliError::Internal(msg))) => {
            eprintln!("{}", json!({ "error": { "code": "internal", "message": msg } }));
            ExitCode::from(1)
        }
        Err(_) => {
            eprintln!(
                "{}",
                json!({ "error": { "code": "internal", "message": "unexpected panic" } })
            );
            ExitCode::from(1)
        }
    }
}
