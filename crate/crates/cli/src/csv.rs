//! Trajectory CSV: one header row, one row per sample, then `#` trailer lines.

use std::io::{self, Write};

use leadcons_core::sim::Trajectory;

/// `t,sigma,x0,x_1..x_n,v_1..v_n,errx_1..errx_n,errv_1..errv_n`.
pub fn header(n: usize) -> String {
    let mut cols = vec!["t".to_owned(), "sigma".to_owned(), "x0".to_owned()];
    for prefix in ["x", "v", "errx", "errv"] {
        cols.extend((1..=n).map(|i| format!("{prefix}_{i}")));
    }
    cols.join(",")
}

/// Seventeen significant digits.
fn push_value(line: &mut String, v: f64) {
    use std::fmt::Write as _;
    write!(line, ",{v:.16e}").expect("string write");
}

/// Writes the samples of `tr`. `sigma` is the one-based graph index.
/// Each trailer line is written after a `# ` prefix.
pub fn write_trajectory<W: Write>(mut w: W, tr: &Trajectory, trailer: &[String]) -> io::Result<()> {
    writeln!(w, "{}", header(tr.n))?;
    let mut line = String::new();
    for s in 0..tr.len() {
        line.clear();
        line.push_str(&format!(
            "{:.16e},{},{:.16e}",
            tr.times[s],
            tr.sigma[s] + 1,
            tr.leader_x[s]
        ));
        for block in [tr.x(s), tr.v(s), tr.ex(s), tr.ev(s)] {
            for &v in block {
                push_value(&mut line, v);
            }
        }
        writeln!(w, "{line}")?;
    }
    for t in trailer {
        writeln!(w, "# {t}")?;
    }
    w.flush()
}
