use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use defectloc::criterion::OptimizerConfig;
use defectloc::io::{read_farfield, read_map_csv, write_map_csv};
use defectloc::pipeline::{reconstruct, Media};
use defectloc::sampling::SamplingGrid;
use defectloc::scattering::{rasterize_disc, Disc, Grid2D, RadialProfile};
use tempfile::TempDir;

const SMALL: &str = "field_cells = 16\ndirections = 12\nsampling_points = [8, 8]\noutput_dir = \"out\"\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_defectloc"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn workspace(config: &str) -> TempDir {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("run.toml"), config).unwrap();
    dir
}

fn data(dir: &Path) -> PathBuf {
    dir.join("tests").join("data")
}

#[test]
fn synthesize_is_byte_for_byte_reproducible() {
    let a = workspace(SMALL);
    let b = workspace(SMALL);
    for d in [&a, &b] {
        ok(d.path(), &["--config", "run.toml", "synthesize"]);
    }
    for name in ["farfield_n0.txt", "farfield_n1.txt"] {
        let x = fs::read(a.path().join("out").join(name)).unwrap();
        let y = fs::read(b.path().join("out").join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    ok(a.path(), &["--config", "run.toml", "synthesize"]);
    let again = fs::read(a.path().join("out/farfield_n1.txt")).unwrap();
    assert_eq!(again, fs::read(b.path().join("out/farfield_n1.txt")).unwrap());
}

#[test]
fn without_defect_both_files_are_identical_and_the_map_is_zero() {
    let dir = workspace(&format!("{SMALL}defect = false\n"));
    ok(dir.path(), &["--config", "run.toml", "synthesize"]);
    let out = dir.path().join("out");
    assert_eq!(
        fs::read(out.join("farfield_n0.txt")).unwrap(),
        fs::read(out.join("farfield_n1.txt")).unwrap()
    );
    ok(dir.path(), &["--config", "run.toml", "reconstruct"]);
    let rows = read_map_csv(std::io::BufReader::new(fs::File::open(out.join("map.csv")).unwrap())).unwrap();
    assert!(rows.iter().all(|r| r.value == 0.0 && r.iterations == 1 && r.converged));
    let report = ok(dir.path(), &["report", "out/map.csv"]);
    assert!(report.contains("zero_values             64"), "{report}");
}

#[test]
fn reconstruct_matches_the_in_memory_pipeline() {
    let dir = workspace(SMALL);
    ok(dir.path(), &["--config", "run.toml", "synthesize"]);
    ok(dir.path(), &["--config", "run.toml", "reconstruct"]);
    let out = dir.path().join("out");

    let case = defectloc::cases::DiscCase {
        field_cells: 16,
        directions: 12,
        sampling: SamplingGrid::new((-1.2, 1.2, -1.2, 1.2), (8, 8)).unwrap(),
        ..defectloc::cases::DiscCase::simple_disc()
    };
    let media = Media::new(&case.n0().unwrap(), &case.n1().unwrap(), case.k).unwrap();
    let synthetic = media.synthesize(&case.direction_set().unwrap()).unwrap();
    let read = |name: &str| read_farfield(std::io::BufReader::new(fs::File::open(out.join(name)).unwrap())).unwrap();
    assert_eq!(read("farfield_n0.txt"), synthetic.f0);
    assert_eq!(read("farfield_n1.txt"), synthetic.f1);

    let r = reconstruct(
        &synthetic.f0,
        &synthetic.f1,
        &synthetic.reference,
        None,
        &case.sampling,
        &OptimizerConfig::default(),
    )
    .unwrap();
    let mut expected = Vec::new();
    write_map_csv(&mut expected, &r.map).unwrap();
    assert_eq!(fs::read(out.join("map.csv")).unwrap(), expected);
}

#[test]
fn mismatched_direction_sets_exit_with_config_code() {
    let dir = workspace(SMALL);
    ok(dir.path(), &["--config", "run.toml", "synthesize"]);
    fs::rename(dir.path().join("out/farfield_n0.txt"), dir.path().join("n0_12.txt")).unwrap();
    fs::write(
        dir.path().join("other.toml"),
        SMALL.replace("directions = 12", "directions = 10"),
    )
    .unwrap();
    ok(dir.path(), &["--config", "other.toml", "synthesize"]);
    let out = run(
        dir.path(),
        &[
            "--config",
            "run.toml",
            "reconstruct",
            "n0_12.txt",
            "out/farfield_n1.txt",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.starts_with("error: kind=config code=2"), "{stderr}");
}

#[test]
fn empty_map_is_an_error() {
    let dir = workspace(SMALL);
    fs::write(
        dir.path().join("map.csv"),
        "x,y,log10_value,value,iterations,converged\n",
    )
    .unwrap();
    let out = run(dir.path(), &["report", "map.csv"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kind=empty_map"));
}

#[test]
fn invalid_configuration_is_rejected_before_any_work() {
    let dir = workspace("wavenumber = -1.0\n");
    let out = run(dir.path(), &["--config", "run.toml", "synthesize"]);
    assert_eq!(out.status.code(), Some(2));
    let dir = workspace("unknown_key = 1\n");
    assert_eq!(
        run(dir.path(), &["--config", "run.toml", "synthesize"]).status.code(),
        Some(2)
    );
}

#[test]
fn report_refuses_a_map_from_another_configuration() {
    let dir = workspace(SMALL);
    ok(dir.path(), &["--config", "run.toml", "synthesize"]);
    ok(dir.path(), &["--config", "run.toml", "reconstruct"]);
    let report = ok(dir.path(), &["--config", "run.toml", "report", "out/map.csv"]);
    assert!(report.contains("gap"), "{report}");
    fs::write(dir.path().join("other.toml"), format!("{SMALL}seed = 9\n")).unwrap();
    let out = run(dir.path(), &["--config", "other.toml", "report", "out/map.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_matches_golden_output() {
    let fixtures = data(Path::new(env!("CARGO_MANIFEST_DIR")));
    let got = ok(&fixtures, &["report", "map.csv"]);
    let expected = fs::read_to_string(fixtures.join("report.expected")).unwrap();
    assert_eq!(got, expected);
}

#[test]
fn index_files_replace_the_built_in_media() {
    let dir = workspace("");
    let grid = Grid2D::centered_square(12, 1.0).unwrap();
    let n0 = rasterize_disc(
        grid,
        &Disc {
            center: [0.0, 0.0],
            diameter: 1.6,
        },
        &RadialProfile::constant(1.5),
    );
    let n1 = n0.with_inclusion(
        &Disc {
            center: [0.3, 0.0],
            diameter: 0.5,
        },
        &RadialProfile::constant(2.0),
    );
    for (name, field) in [("n0.txt", &n0), ("n1.txt", &n1)] {
        let mut buf = Vec::new();
        defectloc::io::write_index(&mut buf, field).unwrap();
        fs::write(dir.path().join(name), buf).unwrap();
    }
    fs::write(
        dir.path().join("run.toml"),
        "wavenumber = 5.0\nindex_n0 = \"n0.txt\"\nindex_n1 = \"n1.txt\"\ndirections = 8\nsampling_points = [4, 4]\noutput_dir = \"out\"\n",
    )
    .unwrap();
    ok(dir.path(), &["--config", "run.toml", "synthesize"]);
    ok(dir.path(), &["--config", "run.toml", "--threads", "1", "reconstruct"]);
    let f0 = read_farfield(std::io::BufReader::new(
        fs::File::open(dir.path().join("out/farfield_n0.txt")).unwrap(),
    ))
    .unwrap();
    let expected = Media::new(&n0, &n1, 5.0).unwrap().synthesize(&f0.directions).unwrap();
    assert_eq!(f0, expected.f0);
}
