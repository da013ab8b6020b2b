//! Command-line entry points.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 numerical
//! failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::calculus::{ScalarField, SolutionField};
use crate::control_volume::cv_ratio_report;
use crate::error::{Error, Result};
use crate::geometry::{mesh_quality, EvolvingSurface};
use crate::hamiltonian::Hamiltonian;
use crate::io::{
    extract_levelset, format_off, load_config, write_polylines_vtk, write_vtk_frame, MeshSource,
    OutputFormat, RunConfig,
};
use crate::solver::{run, stats_line, RunObserver, RunStats, SolverState};
use crate::surfaces::MeshBuilder;
use crate::verify::{
    consistency_residual, eoc, eoc_csv, manufactured_study, monotonicity_bound, monotonicity_fuzz,
    ErrorTracker,
};

#[derive(Debug, Parser)]
#[command(
    name = "surfhj",
    version,
    about = "Hamilton-Jacobi equations on evolving surfaces"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomised checks, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print mesh and parameter diagnostics to stderr.
    #[arg(long, global = true)]
    diagnostics: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve and write frames and step statistics.
    Run { config: PathBuf },
    /// Convergence study over mesh levels; writes eoc.csv.
    Eoc { config: PathBuf },
    /// Monotonicity fuzzing and consistency residuals; writes verify.txt.
    Verify { config: PathBuf },
    /// Write a generated mesh in OFF format.
    Mesh {
        /// icosphere, nonacute_sphere or example2
        builder: String,
        level: usize,
        /// Output file (default: stdout).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Error::Config(format!("cannot start {n} threads: {e}"))),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() {
                1
            } else {
                2
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { config } => cmd_run(&load_config(config)?, cli.diagnostics),
        Command::Eoc { config } => cmd_eoc(&load_config(config)?),
        Command::Verify { config } => cmd_verify(&load_config(config)?, cli.seed),
        Command::Mesh {
            builder,
            level,
            output,
        } => {
            let mesh = builder.parse::<MeshBuilder>()?.build(*level)?;
            let text = format_off(&mesh);
            match output {
                Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn print_diagnostics(
    surface: &EvolvingSurface,
    h: &dyn Hamiltonian,
    cfg: &RunConfig,
) -> Result<()> {
    let mesh = surface.initial_mesh();
    let q = mesh_quality(mesh);
    eprintln!(
        "mesh: {} vertices, {} triangles, h_max {:.6e}, h_min {:.6e}, min edge {:.6e}, max h/rho {:.4}",
        mesh.vertex_count(),
        mesh.triangle_count(),
        q.h_max,
        q.h_min,
        q.min_edge,
        q.max_ratio
    );
    let cv = cv_ratio_report(mesh)?;
    eprintln!(
        "control volumes: (hL+hR)/|E| in [{:.4e}, {:.4e}], max h_T/d {:.4}",
        cv.min_edge_ratio, cv.max_edge_ratio, cv.max_diameter_over_d
    );
    for w in &cv.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!("hamiltonian: {}", h.label());
    if let Some(l) = h.lipschitz_p_estimate() {
        let c1 = cfg.params.c1_viscosity;
        let b = monotonicity_bound(mesh, l, c1)?;
        eprintln!(
            "lipschitz estimate in p: {l}; monotone for C1 >= {:.4} (have {c1}) and C_tau <= {:.4} (have {})",
            b.c1_min, b.c_tau_max, cfg.params.c_tau
        );
    }
    Ok(())
}

struct FrameWriter<'a> {
    cfg: &'a RunConfig,
    frame: usize,
    stats: String,
    exact: Option<ErrorTracker<'a>>,
}

impl RunObserver for FrameWriter<'_> {
    fn on_step(&mut self, state: &SolverState) -> Result<()> {
        match &mut self.exact {
            Some(t) => t.on_step(state),
            None => Ok(()),
        }
    }

    fn on_output(&mut self, state: &SolverState, stats: &RunStats) -> Result<()> {
        let dir = &self.cfg.output.directory;
        for format in &self.cfg.output.formats {
            match format {
                OutputFormat::Vtk => write_vtk_frame(
                    &state.mesh,
                    &state.field,
                    &dir.join(format!("frame_{:04}.vtk", self.frame)),
                )?,
                OutputFormat::Levelset => {
                    let lines =
                        extract_levelset(&state.mesh, &state.field, self.cfg.output.level_value)?;
                    write_polylines_vtk(
                        &lines,
                        state.time,
                        &dir.join(format!("levelset_{:04}.vtk", self.frame)),
                    )?;
                }
            }
        }
        let line = stats_line(state, stats);
        println!("{line}");
        self.stats.push_str(&line);
        self.stats.push('\n');
        self.frame += 1;
        Ok(())
    }
}

fn cmd_run(cfg: &RunConfig, diagnostics: bool) -> Result<()> {
    let surface = cfg.build_surface(cfg.build_mesh(None)?)?;
    let h = cfg.build_hamiltonian(&surface);
    if diagnostics {
        print_diagnostics(&surface, h.as_ref(), cfg)?;
    }
    create_dir(&cfg.output.directory)?;
    let u0 = cfg.initial_data();
    let exact = cfg.exact_solution();
    let exact_field = exact.as_ref().map(|g| SolutionField(g.as_ref()));
    let mut writer = FrameWriter {
        cfg,
        frame: 0,
        stats: String::from("# n t tau_min tau_max eps_min eps_max u_min u_max\n"),
        exact: exact_field
            .as_ref()
            .map(|f| ErrorTracker::new(f as &dyn ScalarField)),
    };
    let outcome = run(&surface, h.as_ref(), u0.as_ref(), &cfg.params, &mut writer)?;
    write_text(&cfg.output.directory.join("stats.txt"), &writer.stats)?;
    if let Some(t) = &writer.exact {
        println!("max_error {:.16e} h_max {:.16e}", t.max_error, t.h_max);
    }
    if diagnostics {
        eprintln!("steps: {}", outcome.stats.steps);
    }
    Ok(())
}

fn builder_of(cfg: &RunConfig) -> Result<MeshBuilder> {
    match cfg.surface.mesh {
        MeshSource::Builder { builder, .. } => Ok(builder),
        MeshSource::Off(_) => Err(Error::Config(
            "mesh-level studies need a mesh builder, not an OFF file".into(),
        )),
    }
}

fn cmd_eoc(cfg: &RunConfig) -> Result<()> {
    let g = cfg.exact_solution().ok_or_else(|| {
        Error::Config(
            "eoc needs a manufactured hamiltonian (sphere-g1, sphere-g2, sphere-expr)".into(),
        )
    })?;
    let builder = builder_of(cfg)?;
    let meshes = cfg
        .eoc_levels
        .iter()
        .map(|&l| builder.build(l))
        .collect::<Result<Vec<_>>>()?;
    let rows = eoc(&manufactured_study(meshes, g, &cfg.params)?)?;
    let csv = eoc_csv(&rows);
    create_dir(&cfg.output.directory)?;
    write_text(&cfg.output.directory.join("eoc.csv"), &csv)?;
    print!("{csv}");
    Ok(())
}

fn cmd_verify(cfg: &RunConfig, seed: Option<u64>) -> Result<()> {
    let builder = builder_of(cfg)?;
    let seed = seed.unwrap_or(cfg.verify.seed);
    let exact = cfg.exact_solution();
    let mut report = String::new();
    let mut previous: Option<f64> = None;
    for &level in &cfg.verify.levels {
        let surface = cfg.build_surface(builder.build(level)?)?;
        let h = cfg.build_hamiltonian(&surface);
        let fuzz = monotonicity_fuzz(&surface, h.as_ref(), &cfg.params, cfg.verify.trials, seed)?;
        let h_max = mesh_quality(surface.initial_mesh()).h_max;
        let _ = writeln!(
            report,
            "level {level} h_max {h_max:.6e} trials {} seed {} violations {} worst_margin {:.6e}",
            fuzz.trials, fuzz.seed, fuzz.violations, fuzz.worst_margin
        );
        if let Some(g) = &exact {
            let r = consistency_residual(g.as_ref(), &surface, h.as_ref(), &cfg.params)?;
            let ratio = previous
                .map(|p| format!(" ratio {:.4}", r / p))
                .unwrap_or_default();
            let _ = writeln!(report, "level {level} consistency_residual {r:.6e}{ratio}");
            previous = Some(r);
        }
    }
    create_dir(&cfg.output.directory)?;
    write_text(&cfg.output.directory.join("verify.txt"), &report)?;
    print!("{report}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(cli_main(["surfhj"]), 1);
        assert_eq!(cli_main(["surfhj", "frobnicate"]), 1);
        assert_eq!(cli_main(["surfhj", "mesh", "cube", "1"]), 1);
        assert_eq!(cli_main(["surfhj", "mesh", "icosphere", "9"]), 1);
    }

    #[test]
    fn missing_config_exits_one() {
        assert_eq!(cli_main(["surfhj", "run", "/nonexistent/run.cfg"]), 1);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(cli_main(["surfhj", "--help"]), 0);
    }
}
