//! Plot output: a two-column `.dat` file and a standalone SVG line chart
//! per CSV column.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::csv::Table;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 60.0;

fn svg_chart(name: &str, t: &[f64], v: &[f64]) -> String {
    let positive = v.iter().all(|x| *x > 0.0);
    let (vmin, vmax) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
    let log = positive && vmin > 0.0 && vmax / vmin > 100.0;
    let map = |x: f64| if log { x.log10() } else { x };
    let (ylo, yhi) = if v.is_empty() {
        (0.0, 1.0)
    } else if map(vmax) > map(vmin) {
        (map(vmin), map(vmax))
    } else {
        (map(vmin) - 0.5, map(vmin) + 0.5)
    };
    let (tlo, thi) = match (t.first(), t.last()) {
        (Some(a), Some(b)) if b > a => (*a, *b),
        (Some(a), _) => (*a - 0.5, *a + 0.5),
        _ => (0.0, 1.0),
    };
    let px = |x: f64| PAD + (x - tlo) / (thi - tlo) * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (map(y) - ylo) / (yhi - ylo) * (H - 2.0 * PAD);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{p} {q} L{p} {r} L{u} {r}" stroke="black" fill="none"/>"#,
        p = PAD,
        q = PAD,
        r = H - PAD,
        u = W - PAD
    );
    let points: Vec<String> = t
        .iter()
        .zip(v)
        .filter(|(_, y)| !log || **y > 0.0)
        .map(|(x, y)| format!("{:.3},{:.3}", px(*x), py(*y)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline points="{}" stroke="steelblue" stroke-width="1.5" fill="none"/>"#,
        points.join(" ")
    );
    let label = |y: f64| if log { format!("1e{y:.1}") } else { format!("{y:.3e}") };
    let _ = writeln!(
        s,
        r#"<text x="{x}" y="{y}" font-size="12" text-anchor="end">{l}</text>"#,
        x = PAD - 4.0,
        y = H - PAD,
        l = label(ylo)
    );
    let _ = writeln!(
        s,
        r#"<text x="{x}" y="{y}" font-size="12" text-anchor="end">{l}</text>"#,
        x = PAD - 4.0,
        y = PAD + 4.0,
        l = label(yhi)
    );
    let _ = writeln!(
        s,
        r#"<text x="{x}" y="{y}" font-size="12" text-anchor="middle">t = {a} .. {b}</text>"#,
        x = W / 2.0,
        y = H - PAD / 3.0,
        a = tlo,
        b = thi
    );
    let _ = writeln!(
        s,
        r#"<text x="{x}" y="{y}" font-size="14" text-anchor="middle">{name}{scale}</text>"#,
        x = W / 2.0,
        y = PAD / 2.0,
        scale = if log { " (log scale)" } else { "" }
    );
    s.push_str("</svg>\n");
    s
}

/// Write `<column>.dat` and `<column>.svg` for every column but `t`.
pub fn emit_plots(table: &Table, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let t = table.column("t")?;
    let mut written = Vec::new();
    for (name, col) in table.names.iter().zip(&table.columns) {
        if name == "t" {
            continue;
        }
        let mut dat = format!("# t {name}\n");
        for (x, y) in t.iter().zip(col) {
            let _ = writeln!(dat, "{x:.16e} {y:.16e}");
        }
        let p = out_dir.join(format!("{name}.dat"));
        std::fs::write(&p, dat).map_err(|e| Error::io(&p, e))?;
        written.push(p);
        let p = out_dir.join(format!("{name}.svg"));
        std::fs::write(&p, svg_chart(name, t, col)).map_err(|e| Error::io(&p, e))?;
        written.push(p);
    }
    Ok(written)
}
