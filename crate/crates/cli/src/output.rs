//! File output: atomic writes, number formatting and gnuplot scripts.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Shortest round-trip scientific notation; `nan` for undefined cells.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x == 0.0 {
        "0e0".to_string()
    } else {
        format!("{x:e}")
    }
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let result = (|| {
        let mut w = BufWriter::new(File::create(&tmp)?);
        body(&mut w)?;
        let file = w.into_inner().map_err(|e| e.into_error())?;
        file.sync_all()?;
        Ok::<_, anyhow::Error>(())
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(e.context(format!("writing {}", path.display())));
    }
    fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, |w| Ok(w.write_all(text.as_bytes())?))
}

/// Label used in file names, e.g. `a27.00mm`, or `a5.000e-5mm` below 10 μm.
pub fn well_tag(a_mm: f64) -> String {
    if a_mm == 0.0 || a_mm >= 0.01 {
        format!("a{a_mm:.2}mm")
    } else {
        format!("a{a_mm:.3e}mm")
    }
}

fn plot_header(png: &str, rows: usize, height: usize) -> String {
    format!(
        "# gnuplot script; run `gnuplot <this file>` in the output directory\n\
         set datafile separator ','\n\
         set terminal pngcairo size 900,{height}\n\
         set output '{png}'\n\
         set multiplot layout {rows},1\n\
         set grid\n"
    )
}

fn panel(files: &[(String, String)], ylabel: &str, using: &str) -> String {
    let curves: Vec<String> = files
        .iter()
        .map(|(f, title)| format!("'{f}' skip 1 using {using} with lines title '{title}'"))
        .collect();
    format!(
        "set ylabel '{ylabel}'\nplot {}\n",
        curves.join(", \\\n     ")
    )
}

/// |F|², phase and τ panels over frequency; `files` pairs CSV name and title.
pub fn sweep_script(files: &[(String, String)]) -> String {
    let mut s = plot_header("sweep.png", 3, 1200);
    s.push_str("set xlabel 'f (GHz)'\n");
    s.push_str(&panel(files, "|F|^2", "($1/1e9):4"));
    s.push_str(&panel(files, "phase (rad)", "($1/1e9):5"));
    s.push_str(&panel(files, "tau (ns)", "($1/1e9):($7*1e9)"));
    s.push_str("unset multiplot\n");
    s
}

/// τ heat map with the negative cells outlined underneath.
pub fn regions_script(csv: &str) -> String {
    let mut s = plot_header("regions.png", 2, 1100);
    s.push_str(&format!(
        "set xlabel 'a (mm)'\nset ylabel 'f (GHz)'\n\
         set cblabel 'tau (ns)'\nset cbrange [-1:1]\nset palette defined (-1 'blue', 0 'white', 1 'red')\n\
         plot '{csv}' skip 1 using ($1*1e3):($2/1e9):($3*1e9) with image notitle\n\
         set cblabel 'tau < 0'\nset cbrange [0:1]\nset palette defined (0 'white', 1 'black')\n\
         plot '{csv}' skip 1 using ($1*1e3):($2/1e9):4 with image notitle\n\
         unset multiplot\n"
    ));
    s
}

pub fn packet_script(pairs: &[(String, String, String)]) -> String {
    let mut s = plot_header("packet.png", pairs.len().max(1), 350 * pairs.len().max(1));
    s.push_str("set xlabel 't (ns)'\nset ylabel 'envelope'\n");
    for (inc, out, title) in pairs {
        s.push_str(&format!(
            "set title '{title}'\n\
             plot '{inc}' skip 1 using ($1*1e9):2 with lines title 'incident', \\\n     \
             '{out}' skip 1 using ($1*1e9):2 with lines title 'transmitted'\n"
        ));
    }
    s.push_str("unset multiplot\n");
    s
}

pub fn profile_script(csv: &str, png: &str) -> String {
    let files = [(csv.to_string(), "measured".to_string())];
    let mut s = plot_header(png, 2, 800);
    s.push_str("set xlabel 'f (GHz)'\n");
    s.push_str(&panel(&files, "phase (rad)", "($1/1e9):2"));
    s.push_str(&panel(&files, "tau (ns)", "($1/1e9):($3*1e9)"));
    s.push_str("unset multiplot\n");
    s
}
