use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::CliError;

pub const ARTIFACT_VERSION: u32 = 1;

/// Schema string carried by every JSON artifact.
pub fn schema(command: &str) -> String {
    format!("slehydro/{command}/v{ARTIFACT_VERSION}")
}

/// 17 significant digits, exact round trip.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "nan".to_string()
    }
}

pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Extra `# key: value` lines after the config header.
    pub notes: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&x| num(x)).collect());
    }

    pub fn to_csv(&self, config: &Value) -> String {
        let mut s = String::new();
        s.push_str(&format!("# slehydro {} artifact v{ARTIFACT_VERSION}\n", env!("CARGO_PKG_VERSION")));
        s.push_str(&format!("# config: {config}\n"));
        for (k, v) in &self.notes {
            s.push_str(&format!("# {k}: {v}\n"));
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Wrap `data` in the JSON envelope (schema string plus resolved config).
pub fn json_artifact(command: &str, config: &Value, data: Value) -> String {
    let doc = serde_json::json!({
        "schema": schema(command),
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "data": data,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json values always serialize");
    s.push('\n');
    s
}

/// `out.csv` with tag `t0.25` becomes `out_t0.25.csv`.
pub fn tagged_path(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{tag}"),
    };
    path.with_file_name(name)
}

/// Write to a temp file next to the target, then rename over it.
pub fn write_atomic(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out.write_all(contents.as_bytes()).map_err(|e| CliError::Io(e.to_string()));
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Minimal 800×400 SVG: polylines in data coordinates with the real axis.
pub struct Plot {
    pub title: String,
    pub lines: Vec<Vec<(f64, f64)>>,
    pub labels: Vec<((f64, f64), String)>,
    /// Draw the y = 0 axis.
    pub axis: bool,
}

impl Plot {
    pub fn render(&self) -> String {
        const W: f64 = 800.0;
        const H: f64 = 400.0;
        const PAD: f64 = 40.0;
        let all = self.lines.iter().flatten().chain(self.labels.iter().map(|l| &l.0));
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in all.filter(|p| p.0.is_finite() && p.1.is_finite()) {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (-1.0, 1.0, 0.0, 1.0);
        }
        if self.axis {
            y0 = y0.min(0.0);
        }
        let xs = (x1 - x0).max(1e-12);
        let ys = (y1 - y0).max(1e-12);
        // Same scale on both axes so hull shapes are not distorted.
        let scale = ((W - 2.0 * PAD) / xs).min((H - 2.0 * PAD) / ys);
        let ox = PAD + 0.5 * ((W - 2.0 * PAD) - scale * xs);
        let oy = H - PAD - 0.5 * ((H - 2.0 * PAD) - scale * ys);
        let px = |x: f64| ox + (x - x0) * scale;
        let py = |y: f64| oy - (y - y0) * scale;

        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
             <text x=\"{PAD}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
            escape(&self.title)
        );
        if self.axis {
            s.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"gray\"/>\n",
                PAD / 2.0,
                py(0.0),
                W - PAD / 2.0,
                py(0.0)
            ));
        }
        for line in &self.lines {
            let d: Vec<String> = line
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            if d.is_empty() {
                continue;
            }
            s.push_str(&format!("<path d=\"M{}\" fill=\"none\" stroke=\"#1f4e9e\" stroke-width=\"1.5\"/>\n", d.join(" L")));
        }
        for ((x, y), text) in &self.labels {
            s.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#b22\"/><text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
                px(*x),
                py(*y),
                px(*x) + 4.0,
                py(*y) - 6.0,
                escape(text)
            ));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, std::f64::consts::PI] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(f64::NAN), "nan");
    }

    #[test]
    fn tagged_paths() {
        assert_eq!(tagged_path(Path::new("a/b.csv"), "t2"), PathBuf::from("a/b_t2.csv"));
        assert_eq!(tagged_path(Path::new("b"), "t2"), PathBuf::from("b_t2"));
    }

    #[test]
    fn svg_has_fixed_viewport() {
        let p = Plot {
            title: "x < y".into(),
            lines: vec![vec![(0.0, 0.0), (1.0, 1.0)]],
            labels: vec![],
            axis: true,
        };
        let s = p.render();
        assert!(s.contains("viewBox=\"0 0 800 400\""));
        assert!(s.contains("x &lt; y"));
    }
}
