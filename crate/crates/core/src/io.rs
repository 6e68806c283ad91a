//! Text formats: sites, complexes, metric-field configs, theory parameters,
//! and canvas export (OFF in 2D, MEDIT `.mesh` in 3D).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::canvas::Canvas;
use crate::complex::AbstractComplex;
use crate::error::{Error, ParseError, Result};
use crate::metric::{FieldKind, MetricField, MetricGrid, TheoryParams};

/// Strips a `#` comment, returning the content part.
fn content(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() || ch == ',' {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out.into_iter()
}

/// Parses one point per line; blank lines and `#` comments are ignored.
pub fn parse_sites(text: &str) -> std::result::Result<Vec<Vec<f64>>, ParseError> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let mut p = Vec::new();
        for (col, tok) in tokens(content(line)) {
            let v: f64 = tok
                .parse()
                .map_err(|_| ParseError::new(ln + 1, col, format!("expected a number, found '{tok}'")))?;
            if !v.is_finite() {
                return Err(ParseError::new(ln + 1, col, "non-finite coordinate"));
            }
            p.push(v);
        }
        if p.is_empty() {
            continue;
        }
        if let Some(first) = out.first() {
            if first.len() != p.len() {
                return Err(ParseError::new(
                    ln + 1,
                    1,
                    format!("expected {} coordinates, found {}", first.len(), p.len()),
                ));
            }
        } else if !(2..=3).contains(&p.len()) {
            return Err(ParseError::new(ln + 1, 1, format!("points need 2 or 3 coordinates, found {}", p.len())));
        }
        out.push(p);
    }
    Ok(out)
}

/// Shortest round-tripping decimal form of each coordinate.
pub fn format_sites<P: AsRef<[f64]>>(sites: &[P]) -> String {
    let mut s = String::new();
    for p in sites {
        let line: Vec<String> = p.as_ref().iter().map(|x| format!("{x:?}")).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    s
}

/// One simplex per line as sorted site indices; the witness cell of a
/// maximal simplex follows as `# witness <cell>`.
pub fn format_complex(c: &AbstractComplex) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# simplices {}", c.len());
    for simplex in c.simplices() {
        let idx: Vec<String> = simplex.iter().map(|v| v.to_string()).collect();
        match c.witness(simplex) {
            Some(w) => {
                let _ = writeln!(s, "{} # witness {w}", idx.join(" "));
            }
            None => {
                let _ = writeln!(s, "{}", idx.join(" "));
            }
        }
    }
    s
}

pub fn parse_complex(text: &str) -> std::result::Result<AbstractComplex, ParseError> {
    let mut out = AbstractComplex::new();
    let mut witnesses = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let mut simplex = Vec::new();
        for (col, tok) in tokens(content(line)) {
            let v: u32 = tok
                .parse()
                .map_err(|_| ParseError::new(ln + 1, col, format!("expected a site index, found '{tok}'")))?;
            simplex.push(v);
        }
        if simplex.is_empty() {
            continue;
        }
        let mut sorted = simplex.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted != simplex {
            return Err(ParseError::new(ln + 1, 1, "simplex indices must be strictly increasing"));
        }
        if let Some(comment) = line.split_once('#').map(|(_, c)| c.trim()) {
            if let Some(w) = comment.strip_prefix("witness") {
                let w: usize = w
                    .trim()
                    .parse()
                    .map_err(|_| ParseError::new(ln + 1, line.find('#').unwrap_or(0) + 1, "bad witness id"))?;
                witnesses.push((simplex.clone(), w));
            }
        }
        out.insert_with_faces(&simplex);
    }
    for (s, w) in witnesses {
        out.add_witness(&s, w);
    }
    Ok(out)
}

/// `key=value` lines with `#` comments, keeping each value's position.
fn parse_kv(text: &str) -> std::result::Result<Vec<(usize, String, usize, String)>, ParseError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let body = content(line);
        if body.trim().is_empty() {
            continue;
        }
        let Some(eq) = body.find('=') else {
            let col = body.len() - body.trim_start().len() + 1;
            return Err(ParseError::new(ln + 1, col, "expected key=value"));
        };
        let key = body[..eq].trim();
        if key.is_empty() {
            return Err(ParseError::new(ln + 1, eq + 1, "empty key"));
        }
        let raw = &body[eq + 1..];
        let col = eq + 2 + (raw.len() - raw.trim_start().len());
        out.push((ln + 1, key.to_string(), col, raw.trim().to_string()));
    }
    Ok(out)
}

fn parse_float(line: usize, col: usize, v: &str) -> std::result::Result<f64, ParseError> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| ParseError::new(line, col, format!("expected a number, found '{v}'")))
}

/// Metric-field configuration: `kind=<name>` and `param.<name>=<float>`.
/// `custom_grid` also takes `grid=<csv path>` (relative to `base_dir`),
/// `param.nx`, `param.ny` and the extent `param.x0/y0/x1/y1` (default unit square).
pub fn parse_field_config(text: &str, base_dir: Option<&Path>) -> Result<MetricField> {
    let kv = parse_kv(text)?;
    let mut kind = None;
    let mut params = BTreeMap::new();
    let mut grid_path = None;
    for (line, key, col, value) in &kv {
        if key == "kind" {
            kind = Some(
                FieldKind::parse(value)
                    .ok_or_else(|| ParseError::new(*line, *col, format!("unknown field kind '{value}'")))?,
            );
        } else if let Some(name) = key.strip_prefix("param.") {
            params.insert(name.to_string(), parse_float(*line, *col, value)?);
        } else if key == "grid" {
            grid_path = Some(value.clone());
        } else {
            return Err(ParseError::new(*line, 1, format!("unknown key '{key}'")).into());
        }
    }
    let kind = kind.ok_or_else(|| ParseError::new(1, 1, "missing kind="))?;
    if kind != FieldKind::CustomGrid {
        return MetricField::from_params(kind, &params);
    }
    let path = grid_path.ok_or_else(|| ParseError::new(1, 1, "custom_grid needs grid=<path>"))?;
    let path = match base_dir {
        Some(d) => d.join(path),
        None => path.into(),
    };
    let csv = fs::read_to_string(&path)?;
    let get = |k: &str, d: f64| params.get(k).copied().unwrap_or(d);
    let nx = get("nx", 0.0) as usize;
    let ny = get("ny", 0.0) as usize;
    let values = parse_grid_csv(&csv)?;
    let grid = MetricGrid::new(
        [get("x0", 0.0), get("y0", 0.0)],
        [get("x1", 1.0), get("y1", 1.0)],
        nx,
        ny,
        values,
    )?;
    Ok(MetricField::custom_grid(grid))
}

/// Three floats `g11 g12 g22` per line (comma or whitespace separated), row-major.
pub fn parse_grid_csv(text: &str) -> std::result::Result<Vec<[f64; 3]>, ParseError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let toks: Vec<(usize, &str)> = tokens(content(line)).collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 3 {
            return Err(ParseError::new(ln + 1, 1, format!("expected 3 values, found {}", toks.len())));
        }
        let mut v = [0.0; 3];
        for (k, (col, t)) in toks.iter().enumerate() {
            v[k] = parse_float(ln + 1, *col, t)?;
        }
        out.push(v);
    }
    Ok(out)
}

/// Serializes a field to the config format (not `custom_grid`).
pub fn format_field_config(f: &MetricField) -> String {
    let mut s = format!("kind={}\n", f.kind().name());
    for (k, v) in f.params() {
        let _ = writeln!(s, "param.{k}={v:?}");
    }
    s
}

/// Theory parameters as `key=value`: `epsilon`, `mu`, `delta`, `psi0`
/// (default 1), optional `lambda_min_eigen`, `lambda_max_eigen`,
/// `sec_curv_lo`, `sec_curv_hi`, `inj_radius`.
pub fn parse_theory_params(text: &str) -> Result<TheoryParams> {
    let kv = parse_kv(text)?;
    let mut vals: BTreeMap<String, f64> = BTreeMap::new();
    const KEYS: [&str; 9] = [
        "epsilon",
        "mu",
        "delta",
        "psi0",
        "lambda_min_eigen",
        "lambda_max_eigen",
        "sec_curv_lo",
        "sec_curv_hi",
        "inj_radius",
    ];
    for (line, key, col, value) in &kv {
        if !KEYS.contains(&key.as_str()) {
            return Err(ParseError::new(*line, 1, format!("unknown key '{key}'")).into());
        }
        vals.insert(key.clone(), parse_float(*line, *col, value)?);
    }
    let need = |k: &str| {
        vals.get(k)
            .copied()
            .ok_or_else(|| Error::from(ParseError::new(1, 1, format!("missing {k}="))))
    };
    let mut p = TheoryParams::new(
        need("epsilon")?,
        need("mu")?,
        need("delta")?,
        vals.get("psi0").copied().unwrap_or(1.0),
    );
    p.lambda_min_eigen = vals.get("lambda_min_eigen").copied().unwrap_or(1.0);
    p.lambda_max_eigen = vals.get("lambda_max_eigen").copied().unwrap_or(p.lambda_min_eigen.max(1.0));
    p.sec_curv_lo = vals.get("sec_curv_lo").copied();
    p.sec_curv_hi = vals.get("sec_curv_hi").copied();
    p.inj_radius = vals.get("inj_radius").copied();
    p.validate()?;
    Ok(p)
}

/// 2D canvas as OFF (z = 0); 3D canvases need [`format_medit`].
pub fn format_off(c: &Canvas) -> Result<String> {
    if c.dim() != 2 {
        return Err(Error::Unsupported("OFF export is for 2D canvases".into()));
    }
    let mut s = String::with_capacity(c.num_vertices() * 24 + c.num_cells() * 24);
    let _ = writeln!(s, "OFF\n{} {} 0", c.num_vertices(), c.num_cells());
    for p in c.vertex_iter() {
        let _ = writeln!(s, "{:?} {:?} 0", p[0], p[1]);
    }
    for i in 0..c.num_cells() {
        let t = c.cell(i);
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    Ok(s)
}

/// 3D canvas as a MEDIT mesh (1-based indices).
pub fn format_medit(c: &Canvas) -> Result<String> {
    if c.dim() != 3 {
        return Err(Error::Unsupported("MEDIT export is for 3D canvases".into()));
    }
    let mut s = String::new();
    let _ = writeln!(s, "MeshVersionFormatted 2\nDimension 3\nVertices\n{}", c.num_vertices());
    for p in c.vertex_iter() {
        let _ = writeln!(s, "{:?} {:?} {:?} 0", p[0], p[1], p[2]);
    }
    let _ = writeln!(s, "Tetrahedra\n{}", c.num_cells());
    for i in 0..c.num_cells() {
        let t = c.cell(i);
        let _ = writeln!(s, "{} {} {} {} 0", t[0] + 1, t[1] + 1, t[2] + 1, t[3] + 1);
    }
    s.push_str("End\n");
    Ok(s)
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidInput, "no file name")))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::Io(e)
    })
}
