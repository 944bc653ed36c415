//! Fixed-format MPS export and import.
//!
//! Columns are written as `C0000001`..., rows as `R0000001`..., in model
//! order, so every name fits the 8-character fields. The original names go
//! to a sidecar map (`<file>.names`, one `short long` pair per line).

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use scuc_core::milp::{LinExpr, MilpError, MilpModel, Sense, Var, VarKind};

const OBJ: &str = "OBJ";

pub fn column_name(j: usize) -> String {
    format!("C{:07}", j + 1)
}

pub fn row_name(i: usize) -> String {
    format!("R{:07}", i + 1)
}

/// Inverse of [`column_name`].
pub fn column_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('C')?;
    if digits.len() != 7 || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse::<usize>().ok()?.checked_sub(1)
}

/// Shortest rendering of `x` in at most 12 characters, picking whichever of
/// plain or exponent notation loses least.
pub fn format_number(x: f64) -> String {
    let plain = format!("{x}");
    if plain.len() <= 12 {
        return plain;
    }
    let mut best: Option<(f64, String)> = None;
    let mut consider = |s: String| {
        if s.len() <= 12 {
            if let Ok(y) = s.parse::<f64>() {
                let err = (y - x).abs();
                if best.as_ref().is_none_or(|(e, b)| err < *e || (err == *e && s.len() < b.len())) {
                    best = Some((err, s));
                }
            }
        }
    };
    for p in 0..12 {
        consider(format!("{x:.p$}"));
        consider(format!("{x:.p$e}"));
    }
    best.map(|(_, s)| s).unwrap_or(plain)
}

fn sense_code(s: Sense) -> &'static str {
    match s {
        Sense::Le => "L",
        Sense::Ge => "G",
        Sense::Eq => "E",
    }
}

fn entry(w: &mut impl Write, a: &str, b: &str, x: f64) -> io::Result<()> {
    writeln!(w, "    {a:<8}  {b:<8}  {:>12}", format_number(x))
}

/// Writes `model` in fixed MPS format. Output is a pure function of the model.
pub fn write_mps<W: Write>(model: &MilpModel, w: &mut W) -> io::Result<()> {
    if model.is_empty() {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "model has no variables"));
    }
    let name: String = model.name.chars().map(|c| if c.is_whitespace() { '_' } else { c }).collect();
    if !model.fingerprint.is_empty() {
        writeln!(w, "* {}", model.fingerprint)?;
    }
    writeln!(w, "NAME          {}", if name.is_empty() { "MODEL" } else { &name })?;
    writeln!(w, "ROWS")?;
    writeln!(w, " N  {OBJ}")?;
    for (i, c) in model.constraints().iter().enumerate() {
        writeln!(w, " {}  {}", sense_code(c.sense), row_name(i))?;
    }

    // column-major coefficient lists
    let n = model.num_vars();
    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, c) in model.constraints().iter().enumerate() {
        for &(v, a) in &c.expr.terms {
            by_col[v.index()].push((i, a));
        }
    }
    let mut obj = vec![0.0; n];
    for &(v, a) in &model.objective().terms {
        obj[v.index()] += a;
    }

    writeln!(w, "COLUMNS")?;
    let mut in_int = false;
    let mut marker = 0;
    for (j, info) in model.vars().iter().enumerate() {
        let is_int = info.kind == VarKind::Binary;
        if is_int != in_int {
            let tag = if is_int { "'INTORG'" } else { "'INTEND'" };
            writeln!(w, "    {:<8}  {:<8}  {:<12}   {tag}", format!("M{marker:07}"), "'MARKER'", "")?;
            marker += 1;
            in_int = is_int;
        }
        let col = column_name(j);
        if obj[j] != 0.0 || by_col[j].is_empty() {
            entry(w, &col, OBJ, obj[j])?;
        }
        for &(i, a) in &by_col[j] {
            entry(w, &col, &row_name(i), a)?;
        }
    }
    if in_int {
        writeln!(w, "    {:<8}  {:<8}  {:<12}   'INTEND'", format!("M{marker:07}"), "'MARKER'", "")?;
    }

    writeln!(w, "RHS")?;
    let constant = model.objective().constant;
    if constant != 0.0 {
        entry(w, "RHS", OBJ, -constant)?;
    }
    for (i, c) in model.constraints().iter().enumerate() {
        if c.rhs != 0.0 {
            entry(w, "RHS", &row_name(i), c.rhs)?;
        }
    }
    writeln!(w, "RANGES")?;

    writeln!(w, "BOUNDS")?;
    let bound = |w: &mut W, code: &str, col: &str, x: Option<f64>| match x {
        Some(x) => writeln!(w, " {code:<2} BND       {col:<8}  {:>12}", format_number(x)),
        None => writeln!(w, " {code:<2} BND       {col}"),
    };
    for (j, info) in model.vars().iter().enumerate() {
        let col = column_name(j);
        let (lo, up) = (info.lower, info.upper);
        if lo == up {
            bound(w, "FX", &col, Some(lo))?;
            continue;
        }
        if info.kind == VarKind::Binary && lo == 0.0 && up == 1.0 {
            bound(w, "BV", &col, None)?;
            continue;
        }
        match (lo.is_finite(), up.is_finite()) {
            (false, false) => bound(w, "FR", &col, None)?,
            (false, true) => {
                bound(w, "MI", &col, None)?;
                bound(w, "UP", &col, Some(up))?;
            }
            (true, up_finite) => {
                // integer columns default to [0, 1] in some readers; be explicit
                if lo != 0.0 || info.kind == VarKind::Binary {
                    bound(w, "LO", &col, Some(lo))?;
                }
                if up_finite {
                    bound(w, "UP", &col, Some(up))?;
                } else if info.kind == VarKind::Binary {
                    bound(w, "PL", &col, None)?;
                }
            }
        }
    }
    writeln!(w, "ENDATA")
}

/// `short long` pairs for every column and row.
pub fn write_name_map<W: Write>(model: &MilpModel, w: &mut W) -> io::Result<()> {
    for (j, v) in model.vars().iter().enumerate() {
        writeln!(w, "{} {}", column_name(j), v.name)?;
    }
    for (i, c) in model.constraints().iter().enumerate() {
        writeln!(w, "{} {}", row_name(i), c.name)?;
    }
    Ok(())
}

pub fn name_map_path(mps: &Path) -> PathBuf {
    let mut s = mps.as_os_str().to_owned();
    s.push(".names");
    PathBuf::from(s)
}

/// Writes the MPS file and its name map; returns the map's path.
pub fn write_mps_file(model: &MilpModel, path: &Path) -> io::Result<PathBuf> {
    let mut w = BufWriter::new(File::create(path)?);
    write_mps(model, &mut w)?;
    w.flush()?;
    let names = name_map_path(path);
    let mut w = BufWriter::new(File::create(&names)?);
    write_name_map(model, &mut w)?;
    w.flush()?;
    Ok(names)
}

pub type NameMap = HashMap<String, String>;

pub fn read_name_map<R: BufRead>(r: R) -> io::Result<NameMap> {
    let mut map = HashMap::new();
    for line in r.lines() {
        let line = line?;
        if let Some((short, long)) = line.split_once(' ') {
            map.insert(short.to_string(), long.to_string());
        }
    }
    Ok(map)
}

#[derive(Debug, thiserror::Error)]
pub enum MpsError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Model(#[from] MilpError),
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
}

struct Column {
    name: String,
    integer: bool,
    lower: Option<f64>,
    upper: Option<f64>,
    entries: Vec<(usize, f64)>,
    cost: f64,
}

/// Reads fixed or free MPS with single-sided rows and 0/1 integer columns.
/// With a name map the original names are restored.
pub fn read_mps<R: BufRead>(r: R, names: Option<&NameMap>) -> Result<MilpModel, MpsError> {
    let mut section = Section::None;
    let mut model_name = String::new();
    let mut obj_row: Option<String> = None;
    let mut rows: Vec<(String, Sense, f64)> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut cols: Vec<Column> = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut integer = false;
    let mut constant = 0.0;

    for (ln, line) in r.lines().enumerate() {
        let line = line?;
        let err = |message: String| MpsError::Parse { line: ln + 1, message };
        if line.starts_with('*') || line.trim().is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| s.parse::<f64>().map_err(|_| err(format!("bad number `{s}`")));
        if !line.starts_with(' ') {
            section = match tok[0] {
                "NAME" => {
                    model_name = tok.get(1).unwrap_or(&"").to_string();
                    Section::None
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => break,
                other => return Err(err(format!("unknown section `{other}`"))),
            };
            continue;
        }
        match section {
            Section::Rows => {
                let [kind, name] = tok[..] else {
                    return Err(err("expected `type name`".into()));
                };
                let sense = match kind {
                    "N" => {
                        if obj_row.is_none() {
                            obj_row = Some(name.to_string());
                        }
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    _ => return Err(err(format!("unknown row type `{kind}`"))),
                };
                row_index.insert(name.to_string(), rows.len());
                rows.push((name.to_string(), sense, 0.0));
            }
            Section::Columns => {
                if tok.get(1) == Some(&"'MARKER'") {
                    match tok.get(2) {
                        Some(&"'INTORG'") => integer = true,
                        Some(&"'INTEND'") => integer = false,
                        _ => return Err(err("bad marker".into())),
                    }
                    continue;
                }
                if tok.len() != 3 && tok.len() != 5 {
                    return Err(err("expected `column row value [row value]`".into()));
                }
                let j = *col_index.entry(tok[0].to_string()).or_insert_with(|| {
                    cols.push(Column {
                        name: tok[0].to_string(),
                        integer,
                        lower: None,
                        upper: None,
                        entries: Vec::new(),
                        cost: 0.0,
                    });
                    cols.len() - 1
                });
                for pair in tok[1..].chunks(2) {
                    let value = num(pair[1])?;
                    if Some(pair[0]) == obj_row.as_deref() {
                        cols[j].cost += value;
                    } else {
                        let i = *row_index.get(pair[0]).ok_or_else(|| err(format!("unknown row `{}`", pair[0])))?;
                        cols[j].entries.push((i, value));
                    }
                }
            }
            Section::Rhs => {
                let pairs = if tok.len() % 2 == 1 { &tok[1..] } else { &tok[..] };
                for pair in pairs.chunks(2) {
                    let [row, value] = pair else {
                        return Err(err("expected `row value` pairs".into()));
                    };
                    let value = num(value)?;
                    if Some(*row) == obj_row.as_deref() {
                        constant = -value;
                    } else {
                        let i = *row_index.get(*row).ok_or_else(|| err(format!("unknown row `{row}`")))?;
                        rows[i].2 = value;
                    }
                }
            }
            Section::Ranges => return Err(err("ranged rows are not supported".into())),
            Section::Bounds => {
                let (kind, col, value) = match tok[..] {
                    [kind, _, col, value] => (kind, col, Some(num(value)?)),
                    [kind, _, col] => (kind, col, None),
                    _ => return Err(err("expected `type bound column [value]`".into())),
                };
                let j = *col_index.get(col).ok_or_else(|| err(format!("unknown column `{col}`")))?;
                let need = || value.ok_or_else(|| err(format!("bound `{kind}` needs a value")));
                let c = &mut cols[j];
                match kind {
                    "UP" | "UI" => c.upper = Some(need()?),
                    "LO" | "LI" => c.lower = Some(need()?),
                    "FX" => {
                        let v = need()?;
                        c.lower = Some(v);
                        c.upper = Some(v);
                    }
                    "FR" => {
                        c.lower = Some(f64::NEG_INFINITY);
                        c.upper = Some(f64::INFINITY);
                    }
                    "MI" => c.lower = Some(f64::NEG_INFINITY),
                    "PL" => c.upper = Some(f64::INFINITY),
                    "BV" => {
                        c.integer = true;
                        c.lower = Some(0.0);
                        c.upper = Some(1.0);
                    }
                    _ => return Err(err(format!("unknown bound type `{kind}`"))),
                }
            }
            Section::None => return Err(err("data outside a section".into())),
        }
    }

    let rename = |short: &str| names.and_then(|m| m.get(short)).cloned().unwrap_or_else(|| short.to_string());
    let mut model = MilpModel::new(model_name);
    let mut exprs: Vec<LinExpr> = vec![LinExpr::new(); rows.len()];
    let mut objective = LinExpr::constant(constant);
    for c in &cols {
        let lower = c.lower.unwrap_or(0.0);
        let upper = c.upper.unwrap_or(if c.integer { 1.0 } else { f64::INFINITY });
        let kind = if c.integer { VarKind::Binary } else { VarKind::Continuous };
        let var: Var = model.add_var(rename(&c.name), kind, lower, upper)?;
        if c.cost != 0.0 {
            objective.push(var, c.cost);
        }
        for &(i, a) in &c.entries {
            exprs[i].push(var, a);
        }
    }
    for ((name, sense, rhs), expr) in rows.into_iter().zip(exprs) {
        model.add_constraint(rename(&name), expr, sense, rhs)?;
    }
    model.set_objective(objective)?;
    Ok(model)
}

pub fn read_mps_file(path: &Path) -> Result<MilpModel, MpsError> {
    let names_path = name_map_path(path);
    let names = if names_path.is_file() {
        Some(read_name_map(BufReader::new(File::open(&names_path)?))?)
    } else {
        None
    };
    read_mps(BufReader::new(File::open(path)?), names.as_ref())
}
