use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use defectloc::farfield::FarFieldMatrix;
use defectloc::io::{
    read_farfield, read_map_csv, write_farfield, write_map_csv, write_pgm, GrayScale, MapMeta, MapRow,
};
use defectloc::pipeline::{reconstruct, Media};
use defectloc::sampling::{lower_median, summarize, LOG10_FLOOR};
use defectloc::{Error, Result};

use crate::config::RunConfig;

pub const FARFIELD_N0: &str = "farfield_n0.txt";
pub const FARFIELD_N1: &str = "farfield_n1.txt";

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn synthesize(cfg: &RunConfig, out: &mut impl Write) -> Result<()> {
    let n0 = cfg.n0()?;
    let n1 = cfg.n1()?;
    if n0.grid() != n1.grid() {
        return Err(Error::Config("index files use different grids".into()));
    }
    let dirs = cfg.direction_set()?;
    let data = Media::new(&n0, &n1, cfg.wavenumber)?.synthesize(&dirs)?;
    let comments = [
        format!("config_hash {}", cfg.hash()),
        format!("field_grid {} {}", n0.grid().nx, n0.grid().ny),
    ];
    for (name, f) in [(FARFIELD_N0, &data.f0), (FARFIELD_N1, &data.f1)] {
        let path = cfg.output_dir.join(name);
        write_with(&path, |w| write_farfield(w, f, &comments))?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}

fn load_farfield(path: &Path) -> Result<FarFieldMatrix> {
    read_farfield(open(path)?)
}

pub fn run_reconstruct(
    cfg: &RunConfig,
    f0_path: Option<PathBuf>,
    f1_path: Option<PathBuf>,
    out: &mut impl Write,
) -> Result<()> {
    let f0 = load_farfield(&f0_path.unwrap_or_else(|| cfg.output_dir.join(FARFIELD_N0)))?;
    let f1 = load_farfield(&f1_path.unwrap_or_else(|| cfg.output_dir.join(FARFIELD_N1)))?;
    if f0.directions != f1.directions || f0.k != f1.k {
        return Err(Error::Config(
            "the two far-field files use different directions or wavenumbers".into(),
        ));
    }
    if f0.directions != cfg.direction_set()? || f0.k != cfg.wavenumber {
        return Err(Error::Config(
            "far-field data do not match the configured directions and wavenumber".into(),
        ));
    }
    let n0 = cfg.n0()?;
    let reference = Media::new(&n0, &n0, cfg.wavenumber)?.reference_fields(&f0.directions)?;
    let grid = cfg.sampling()?;
    let optimizer = cfg.optimizer()?;
    let r = reconstruct(&f0, &f1, &reference, cfg.noise(), &grid, &optimizer)?;
    let map = &r.map;
    let scale = GrayScale::of(map);
    let stats = summarize(map)?;

    let dir = &cfg.output_dir;
    write_with(&dir.join("map.csv"), |w| write_map_csv(w, map))?;
    write_with(&dir.join("map.pgm"), |w| write_pgm(w, map, &scale))?;

    let mut meta = MapMeta::default();
    meta.push("config_hash", cfg.hash());
    meta.push("method", optimizer.method.name());
    meta.push("noise", cfg.noise);
    meta.push("seed", cfg.seed);
    let (x0, x1, y0, y1) = grid.bounds;
    meta.push("bounds", format!("{x0} {x1} {y0} {y1}"));
    meta.push("resolution", format!("{} {}", grid.resolution.0, grid.resolution.1));
    meta.push("gray_floor", scale.floor);
    meta.push("gray_max", scale.max);
    meta.push("log10_floor", LOG10_FLOOR);
    meta.push("operator_norm", format!("{:.6e}", r.operator.frobenius_norm()));
    write_with(&dir.join("map.meta"), |w| meta.write(w))?;

    let converged = map.converged.iter().filter(|&&c| c).count();
    write_with(&dir.join("stats.txt"), |w| {
        writeln!(w, "points {}", map.len())?;
        writeln!(w, "converged {converged}")?;
        writeln!(w, "iterations_min {}", stats.min)?;
        writeln!(w, "iterations_median {}", stats.median)?;
        writeln!(w, "iterations_max {}", stats.max)?;
        Ok(())
    })?;
    writeln!(out, "wrote {}", dir.join("map.csv").display())?;
    writeln!(
        out,
        "iterations min {} median {} max {}",
        stats.min, stats.median, stats.max
    )?;
    Ok(())
}

fn meta_path(map: &Path) -> PathBuf {
    map.with_extension("meta")
}

fn median_of(rows: &[MapRow], keep: impl Fn(&MapRow) -> bool) -> Option<f64> {
    let v: Vec<f64> = rows.iter().filter(|r| keep(r)).map(|r| r.log10_value).collect();
    lower_median(&v)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |v| format!("{v:.4}"))
}

pub fn report(map_path: &Path, cfg: Option<&RunConfig>, out: &mut impl Write) -> Result<()> {
    let rows = read_map_csv(open(map_path)?)?;
    let meta_file = meta_path(map_path);
    let meta = if meta_file.is_file() {
        Some(MapMeta::read(open(&meta_file)?)?)
    } else {
        None
    };
    let recorded = meta.as_ref().and_then(|m| m.get("config_hash"));
    if let (Some(cfg), Some(recorded)) = (cfg, recorded) {
        if recorded != cfg.hash() {
            return Err(Error::Config(format!(
                "map was computed with configuration {recorded}, not {}",
                cfg.hash()
            )));
        }
    }

    let mut iterations: Vec<usize> = rows.iter().map(|r| r.iterations).collect();
    iterations.sort_unstable();
    let logs: Vec<f64> = rows.iter().map(|r| r.log10_value).collect();
    let (lo, hi) = logs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));

    writeln!(out, "{:<24}{}", "points", rows.len())?;
    writeln!(
        out,
        "{:<24}{}",
        "converged",
        rows.iter().filter(|r| r.converged).count()
    )?;
    writeln!(
        out,
        "{:<24}{}",
        "zero_values",
        rows.iter().filter(|r| r.value == 0.0).count()
    )?;
    writeln!(
        out,
        "{:<24}{} {} {}",
        "iterations_min_med_max",
        iterations[0],
        iterations[(iterations.len() - 1) / 2],
        iterations[iterations.len() - 1]
    )?;
    writeln!(
        out,
        "{:<24}{lo:.4} {} {hi:.4}",
        "log10_min_med_max",
        fmt_opt(lower_median(&logs))
    )?;
    if let Some(h) = recorded {
        writeln!(out, "{:<24}{h}", "config_hash")?;
    }
    if let Some(cfg) = cfg {
        let defect = cfg.defect_disc();
        let support = cfg.support();
        let inside = median_of(&rows, |r| defect.contains([r.x, r.y]));
        let outside = median_of(&rows, |r| !support.contains([r.x, r.y]));
        writeln!(out, "{:<24}{}", "median_inside_defect", fmt_opt(inside))?;
        writeln!(out, "{:<24}{}", "median_outside_support", fmt_opt(outside))?;
        let gap = inside.zip(outside).map(|(a, b)| a - b);
        writeln!(out, "{:<24}{}", "gap", fmt_opt(gap))?;
    }
    Ok(())
}
