//! `spdc`: compute fiber-coupled idler density matrices from a JSON config.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 numerical
//! failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use spdc_core::config::{ResolvedConfig, RunConfig, RunManifest};
use spdc_core::density::{run_pipeline, FrequencyGrid, QuadratureSpec};
use spdc_core::dispersion::delta_kz_central;
use spdc_core::oracle::{self, TransverseNodes};
use spdc_core::output::{self, MatrixDocument, MatrixMetadata};
use spdc_core::paraxial::expand_delta_kz;
use spdc_core::units::omega_from_wavelength_nm;
use spdc_core::{heatmap, Error};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "spdc", version, about = "Spectral density matrix of a fiber-coupled SPDC idler photon")]
struct Cli {
    /// Run configuration (JSON) or a manifest from an earlier run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also render Re ρ as PNG.
    #[arg(long, global = true)]
    heatmap: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Density matrix on the configured grid: CSV, JSON and manifest.
    Compute,
    /// Solve the phase-matching angle for the configured crystal.
    Angle,
    /// Dump the paraxial expansion of Δk_z at one frequency pair.
    Expansion {
        /// Signal wavelength; defaults to degenerate.
        #[arg(long)]
        signal_nm: Option<f64>,
        /// Idler wavelength; defaults to degenerate.
        #[arg(long)]
        idler_nm: Option<f64>,
    },
    /// Compare the pipeline with a brute-force integration on a small grid.
    Oracle {
        #[arg(long, value_enum, default_value_t = OracleMode::Quadratic)]
        mode: OracleMode,
        /// Grid points (the configured wavelength range is kept).
        #[arg(long, default_value_t = 5)]
        points: usize,
        /// Gauss–Hermite nodes per transverse dimension.
        #[arg(long, default_value_t = 24)]
        nodes: usize,
    },
    /// Rerun the pipeline for each value of one parameter.
    Sweep {
        /// Dotted config path, e.g. filter.fwhm_nm or collection.alpha_deg.
        #[arg(long)]
        param: String,
        /// Comma-separated values (JSON literals, so "auto" needs quotes).
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OracleMode {
    Quadratic,
    Exact,
}

fn exit_code(e: &Error) -> u8 {
    if e.is_config_error() {
        EXIT_CONFIG
    } else {
        EXIT_NUMERIC
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        return Err(config_error("--threads", "must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidState(e.to_string()))?;

    let path = cli.config.as_deref().ok_or_else(|| config_error("--config", "required"))?;
    let config = RunConfig::from_path(path)?;
    match &cli.command {
        Command::Compute => compute(cli, &config, threads),
        Command::Angle => angle(&config),
        Command::Expansion { signal_nm, idler_nm } => expansion(&config, *signal_nm, *idler_nm),
        Command::Oracle { mode, points, nodes } => run_oracle(cli, &config, *mode, *points, *nodes),
        Command::Sweep { param, values } => sweep(cli, &config, param, values),
    }
}

fn config_error(field: &str, message: &str) -> Error {
    Error::InvalidConfig {
        field: field.into(),
        message: message.into(),
    }
}

fn create_out(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))
}

fn write_text(path: &Path, text: String) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn compute(cli: &Cli, config: &RunConfig, threads: usize) -> Result<(), Error> {
    let start = Instant::now();
    let resolved = config.resolve()?;
    create_out(&cli.out)?;

    let t = Instant::now();
    let result = run_pipeline(&resolved.source, &resolved.grid, &resolved.quadrature)?;
    let compute_s = t.elapsed().as_secs_f64();
    let d = result.diagnostics;

    let meta = MatrixMetadata {
        config_hash: resolved.hash.clone(),
        alpha_deg: resolved.alpha_deg,
        alpha_solved: resolved.alpha_solved,
        purity: Some(d.purity),
        trace: d.raw_trace,
        normalized: true,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    output::write_csv_path(&result.rho, &cli.out.join("rho.csv"))?;
    output::write_json(&MatrixDocument::new(&result.rho, meta), &cli.out.join("rho.json"))?;
    if cli.heatmap {
        heatmap::write_png(&result.rho, &cli.out.join("rho_re.png"))?;
    }

    let mut manifest = RunManifest::new(&resolved, threads);
    manifest.diagnostics = Some(d);
    manifest.timings.compute_s = compute_s;
    manifest.timings.total_s = start.elapsed().as_secs_f64();
    write_text(
        &cli.out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n",
    )?;

    println!(
        "alpha = {:.4} deg{}  purity = {:.6}  trace = {:.6e}  fwhm = {}  ({:.1} s)",
        resolved.alpha_deg,
        if resolved.alpha_solved { " (solved)" } else { "" },
        d.purity,
        d.raw_trace,
        d.marginal_fwhm_nm.map_or("n/a".to_string(), |w| format!("{w:.3} nm")),
        compute_s
    );
    Ok(())
}

fn angle(config: &RunConfig) -> Result<(), Error> {
    let mut c = config.clone();
    c.collection.alpha_deg = spdc_core::config::AlphaSpec::Auto;
    let r = c.resolve()?;
    let w0 = r.source.geometry.omega0;
    let residual = delta_kz_central(&r.source.crystal, &r.source.geometry, w0, w0)?;
    let doc = json!({
        "alpha_deg": r.alpha_deg,
        "alpha_rad": r.alpha_deg.to_radians(),
        "degenerate_nm": spdc_core::units::wavelength_nm_from_omega(w0),
        "delta_kz_residual_per_um": residual,
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
    Ok(())
}

fn expansion(config: &RunConfig, signal_nm: Option<f64>, idler_nm: Option<f64>) -> Result<(), Error> {
    let r = config.resolve()?;
    let w0 = r.source.geometry.omega0;
    let ws = signal_nm.map_or(w0, omega_from_wavelength_nm);
    let wi = idler_nm.map_or(w0, omega_from_wavelength_nm);
    let e = expand_delta_kz(ws, wi, &r.source.crystal, &r.source.geometry)?;
    let doc = json!({
        "alpha_deg": r.alpha_deg,
        "omega_s": e.omega_s,
        "omega_i": e.omega_i,
        "k_s0": [e.k_s0.kx, e.k_s0.ky],
        "k_i0": [e.k_i0.kx, e.k_i0.ky],
        "delta_kz0": e.dkz0,
        "d1": e.d1,
        "d2": e.d2(),
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
    Ok(())
}

fn small_grid(r: &ResolvedConfig, points: usize) -> Result<FrequencyGrid, Error> {
    let g = &r.config.grid;
    FrequencyGrid::from_wavelength_range(g.lambda_min_nm, g.lambda_max_nm, points)
}

fn run_oracle(cli: &Cli, config: &RunConfig, mode: OracleMode, points: usize, nodes: usize) -> Result<(), Error> {
    let start = Instant::now();
    let r = config.resolve()?;
    let grid = small_grid(&r, points)?;
    let quad: QuadratureSpec = r.quadrature;
    let pipeline = spdc_core::density::compute_density_matrix(&r.source, &grid, &quad)?;
    let nodes = TransverseNodes::uniform(nodes);
    let reference = match mode {
        OracleMode::Quadratic => oracle::density_matrix_quadratic_direct(&r.source, &grid, nodes, &quad)?,
        OracleMode::Exact => oracle::density_matrix_direct(&r.source, &grid, nodes, &quad)?,
    };
    let mut report = oracle::compare(&pipeline, &reference)?;
    report.transverse_nodes = Some(nodes);
    report.n_omega_s = Some(quad.n_omega_s);
    report.runtime_s = start.elapsed().as_secs_f64();
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    create_out(&cli.out)?;
    write_text(&cli.out.join("oracle_report.json"), text.clone() + "\n")?;
    println!("{text}");
    Ok(())
}

fn sweep(cli: &Cli, config: &RunConfig, param: &str, values: &[String]) -> Result<(), Error> {
    create_out(&cli.out)?;
    let mut rows = vec![format!("{param},raw_trace,purity,fwhm_nm")];
    for raw in values {
        let raw = raw.trim();
        let value: Value = serde_json::from_str(raw).map_err(|_| config_error(param, &format!("bad sweep value `{raw}`")))?;
        let r = config.with_override(param, value)?.resolve()?;
        let d = run_pipeline(&r.source, &r.grid, &r.quadrature)?.diagnostics;
        let fwhm = d.marginal_fwhm_nm.map_or(String::new(), |w| w.to_string());
        rows.push(format!("{raw},{},{},{fwhm}", d.raw_trace, d.purity));
        eprintln!("{param} = {raw}: purity {:.6}", d.purity);
    }
    let text = rows.join("\n") + "\n";
    write_text(&cli.out.join("sweep.csv"), text.clone())?;
    print!("{text}");
    Ok(())
}
