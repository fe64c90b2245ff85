use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{csv_err, io_err, HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    /// Timing summary: one curve per solver over `T`, log-y.
    Timing,
    /// Convergence rows: one panel per horizon, log-y distances.
    Convergence,
    /// Closed-loop trace: inputs, margins and solve times over steps.
    ClosedLoop,
}

impl PlotKind {
    fn required(self) -> &'static [&'static str] {
        match self {
            PlotKind::Timing => &["T", "solver", "mean_ns_per_iter", "median_ns_per_iter"],
            PlotKind::Convergence => &["experiment", "T", "iteration", "mean_distance"],
            PlotKind::ClosedLoop => &[
                "step",
                "iterations",
                "solve_ns",
                "amplitude_margin",
                "rate_margin",
            ],
        }
    }

    fn stem(self) -> &'static str {
        match self {
            PlotKind::Timing => "timing",
            PlotKind::Convergence => "convergence",
            PlotKind::ClosedLoop => "closed_loop",
        }
    }
}

impl std::str::FromStr for PlotKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "timing" => Ok(PlotKind::Timing),
            "convergence" => Ok(PlotKind::Convergence),
            "closed-loop" | "closed_loop" => Ok(PlotKind::ClosedLoop),
            other => Err(format!(
                "unknown plot kind `{other}` (timing, convergence, closed-loop)"
            )),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlotOutput {
    pub data_files: Vec<PathBuf>,
    pub script: PathBuf,
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn read(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
        let header = r
            .headers()
            .map_err(csv_err(path))?
            .iter()
            .map(String::from)
            .collect();
        let rows = r
            .records()
            .map(|rec| {
                rec.map(|r| r.iter().map(String::from).collect())
                    .map_err(csv_err(path))
            })
            .collect::<Result<_>>()?;
        Ok(Self { header, rows })
    }

    fn col(&self, name: &str) -> usize {
        self.header
            .iter()
            .position(|h| h == name)
            .expect("column checked")
    }
}

/// Writes whitespace-delimited data files and a gnuplot script next to them.
/// Numeric fields are copied verbatim from the CSV.
pub fn emit_plotdata(csv_path: &Path, kind: PlotKind, out_dir: &Path) -> Result<PlotOutput> {
    let table = Table::read(csv_path)?;
    let missing: Vec<String> = kind
        .required()
        .iter()
        .filter(|c| !table.header.iter().any(|h| h == *c))
        .map(|c| c.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(HarnessError::Schema {
            path: csv_path.to_path_buf(),
            missing,
        });
    }
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let (files, script) = match kind {
        PlotKind::Timing => timing(&table),
        PlotKind::Convergence => convergence(&table),
        PlotKind::ClosedLoop => closed_loop(&table),
    };
    let mut data_files = Vec::new();
    for (name, text) in files {
        let path = out_dir.join(name);
        std::fs::write(&path, text).map_err(io_err(&path))?;
        data_files.push(path);
    }
    let script_path = out_dir.join(format!("{}.gp", kind.stem()));
    std::fs::write(&script_path, script).map_err(io_err(&script_path))?;
    Ok(PlotOutput {
        data_files,
        script: script_path,
    })
}

fn distinct(values: impl Iterator<Item = String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for v in values {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn timing(t: &Table) -> (Vec<(String, String)>, String) {
    let (ct, cs, cm, cmed) = (
        t.col("T"),
        t.col("solver"),
        t.col("mean_ns_per_iter"),
        t.col("median_ns_per_iter"),
    );
    let solvers = distinct(t.rows.iter().map(|r| r[cs].clone()));
    let mut files = Vec::new();
    let mut plots = Vec::new();
    for s in &solvers {
        let mut text = String::from("# T mean_ns_per_iter median_ns_per_iter\n");
        for r in t.rows.iter().filter(|r| &r[cs] == s) {
            writeln!(text, "{} {} {}", r[ct], r[cm], r[cmed]).unwrap();
        }
        let name = format!("timing_{s}.dat");
        plots.push(format!("'{name}' using 1:2 with linespoints title '{s}'"));
        files.push((name, text));
    }
    let script = format!(
        "set terminal pngcairo size 800,500\nset output 'timing.png'\nset logscale y\nset xlabel 'T'\nset ylabel 'time per iteration [ns]'\nplot {}\n",
        plots.join(", \\\n     ")
    );
    (files, script)
}

fn convergence(t: &Table) -> (Vec<(String, String)>, String) {
    let (ce, ct, ci, cd) = (
        t.col("experiment"),
        t.col("T"),
        t.col("iteration"),
        t.col("mean_distance"),
    );
    let experiments = distinct(t.rows.iter().map(|r| r[ce].clone()));
    let horizons = distinct(t.rows.iter().map(|r| r[ct].clone()));
    let mut files = Vec::new();
    for e in &experiments {
        for h in &horizons {
            let rows: Vec<&Vec<String>> = t
                .rows
                .iter()
                .filter(|r| &r[ce] == e && &r[ct] == h)
                .collect();
            if rows.is_empty() {
                continue;
            }
            let mut text = String::from("# iteration mean_distance\n");
            for r in rows {
                writeln!(text, "{} {}", r[ci], r[cd]).unwrap();
            }
            files.push((format!("conv_{e}_T{h}.dat"), text));
        }
    }
    let have = |e: &str, h: &str| {
        files
            .iter()
            .any(|(n, _)| n == &format!("conv_{e}_T{h}.dat"))
    };
    let (rows, cols) = panel_layout(horizons.len());
    let mut script = String::from("set terminal pngcairo size 1000,800\nset logscale y\nset xlabel 'iteration'\nset ylabel 'distance to u*'\n");
    let groups: [(&str, Vec<&String>); 2] = [
        (
            "solvers",
            experiments
                .iter()
                .filter(|e| !e.starts_with("dykstra"))
                .collect(),
        ),
        (
            "dykstra",
            experiments
                .iter()
                .filter(|e| e.starts_with("dykstra"))
                .collect(),
        ),
    ];
    for (group, members) in groups {
        if members.is_empty() {
            continue;
        }
        writeln!(script, "set output 'convergence_{group}.png'").unwrap();
        writeln!(script, "set multiplot layout {rows},{cols}").unwrap();
        for h in &horizons {
            let curves: Vec<String> = members
                .iter()
                .filter(|e| have(e, h))
                .map(|e| format!("'conv_{e}_T{h}.dat' using 1:2 with lines title '{e}'"))
                .collect();
            writeln!(script, "set title 'T = {h}'").unwrap();
            writeln!(script, "plot {}", curves.join(", ")).unwrap();
        }
        script.push_str("unset multiplot\n");
    }
    (files, script)
}

fn panel_layout(n: usize) -> (usize, usize) {
    let cols = if n <= 1 { 1 } else { 2 };
    (n.div_ceil(cols).max(1), cols)
}

fn closed_loop(t: &Table) -> (Vec<(String, String)>, String) {
    let cstep = t.col("step");
    let inputs: Vec<usize> = (0..t.header.len())
        .filter(|&i| t.header[i].starts_with("u_"))
        .collect();
    let tail = ["iterations", "solve_ns", "amplitude_margin", "rate_margin"].map(|c| t.col(c));
    let mut text = String::from("# step");
    for &i in inputs.iter().chain(&tail) {
        write!(text, " {}", t.header[i]).unwrap();
    }
    text.push('\n');
    for r in &t.rows {
        text.push_str(&r[cstep]);
        for &i in inputs.iter().chain(&tail) {
            write!(text, " {}", r[i]).unwrap();
        }
        text.push('\n');
    }
    let n_in = inputs.len();
    let input_curves: Vec<String> = (0..n_in)
        .map(|k| {
            format!(
                "'closed_loop.dat' using 1:{} with lines title '{}'",
                k + 2,
                &t.header[inputs[k]]
            )
        })
        .collect();
    let script = format!(
        "set terminal pngcairo size 1000,800\nset output 'closed_loop.png'\nset multiplot layout 3,1\nset xlabel 'step'\n\
         set ylabel 'input'\nplot {}\n\
         set ylabel 'margin'\nplot 'closed_loop.dat' using 1:{} with lines title 'amplitude', '' using 1:{} with lines title 'rate'\n\
         set logscale y\nset ylabel 'solve time [ns]'\nplot 'closed_loop.dat' using 1:{} with lines title 'solve'\nunset multiplot\n",
        input_curves.join(", "),
        n_in + 4,
        n_in + 5,
        n_in + 3
    );
    (vec![("closed_loop.dat".to_string(), text)], script)
}
