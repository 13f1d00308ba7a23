use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use finedomain::par::ExecMode;
use finedomain::runge::PartialSum;
use finedomain::scenario::{
    blowup_report, certify_blowup_mechanics, export_field, failure_report, number, read_run, report_file_name,
    run_scenario, write_run, BlowupInputs, BlowupOptions, CertificateReport, Region, Scenario, ScenarioError,
};

#[derive(Parser)]
#[command(name = "finedomain", version, about = "Fine-domain exhaustions, barriers and Runge synthesis with certificates")]
struct Cli {
    /// Run every data-parallel loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and certify a scenario, writing the report and artifacts.
    Run {
        /// Scenario config file, or the name of a shipped scenario.
        scenario: String,
        #[arg(long)]
        stages: Option<usize>,
        /// Cell size, as a decimal or a fraction like 1/256.
        #[arg(long)]
        resolution: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; defaults to `finedomain-out/<name>`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay the blow-up argument on a run directory against a bound M.
    Certify {
        report_dir: PathBuf,
        #[arg(long)]
        bound: f64,
        /// Qualifying wedges to check; defaults to the scenario's blow-up trial count.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Wedge length factor; defaults to the scenario's alpha.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Write a graymap, a CSV and a report of the synthesized field.
    Export {
        report_dir: PathBuf,
        /// `x0,y0,x1,y1`.
        #[arg(long, allow_hyphen_values = true)]
        region: String,
        #[arg(long)]
        px: usize,
        /// File stem for the outputs; defaults to `field`.
        #[arg(long, default_value = "field")]
        stem: String,
    },
}

fn load_scenario(arg: &str) -> Result<Scenario, ScenarioError> {
    let path = Path::new(arg);
    if path.is_file() {
        Scenario::parse(&std::fs::read_to_string(path)?)
    } else {
        Scenario::named(arg)
    }
}

fn run(
    scenario: &str,
    stages: Option<usize>,
    resolution: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    mode: ExecMode,
) -> Result<bool, ScenarioError> {
    let mut sc = load_scenario(scenario)?;
    if let Some(n) = stages {
        sc.stages = n;
    }
    if let Some(h) = resolution {
        sc.resolution = number(&h)?;
    }
    if let Some(s) = seed {
        sc.seed = s;
    }
    // Invalid configs stop here and leave no artifacts behind.
    sc.validate()?;
    let dir = out.unwrap_or_else(|| PathBuf::from("finedomain-out").join(&sc.name));
    match run_scenario(&sc, mode) {
        Ok(output) => {
            write_run(&dir, &output)?;
            print!("{}", output.report.to_text());
            for (phase, secs) in &output.timings {
                eprintln!("{phase}: {secs:.2} s");
            }
            eprintln!("wrote {}", dir.display());
            Ok(output.report.passed())
        }
        Err(err) => {
            std::fs::create_dir_all(&dir)?;
            let report = failure_report(&sc, &err);
            std::fs::write(dir.join(report_file_name(&sc.name)), report.to_text())?;
            print!("{}", report.to_text());
            Err(err)
        }
    }
}

fn certify(dir: &Path, bound: f64, trials: Option<usize>, seed: u64, alpha: Option<f64>, mode: ExecMode) -> Result<bool, ScenarioError> {
    let st = read_run(dir)?;
    let trials = trials.unwrap_or(st.scenario.blowup_trials);
    let opts = BlowupOptions { bound, trials, alpha: alpha.unwrap_or(st.scenario.alpha), seed, mode };
    let f = PartialSum { terms: &st.function };
    let path = dir.join(format!("{}.blowup.report.txt", st.scenario.name));
    let report = match certify_blowup_mechanics(&BlowupInputs { k: &st.k, f: &st.f, l: &st.l }, &f, &opts) {
        Ok(rec) => blowup_report(&st.scenario.name, &rec, trials),
        Err(ScenarioError::InsufficientStages { bound, stages }) => {
            let mut r = CertificateReport::default();
            r.section("blowup")
                .put("scenario", &st.scenario.name)
                .put("status", "insufficient-stages")
                .put_f64("bound", bound)
                .put("stages", stages);
            // Not a failure: nothing was checked at this bound.
            r.section("verdict").put("pass", false).put("failures", "").put("inconclusive", "insufficient-stages");
            r
        }
        Err(e) => return Err(e),
    };
    std::fs::write(&path, report.to_text())?;
    print!("{}", report.to_text());
    if report.get("blowup", "status") == Some("insufficient-stages") {
        eprintln!("bound {bound} is beyond the stored stages; nothing to check");
        return Ok(true);
    }
    Ok(report.passed())
}

fn export(dir: &Path, region: &str, px: usize, stem: &str, mode: ExecMode) -> Result<bool, ScenarioError> {
    let st = read_run(dir)?;
    let region = Region::parse(region)?;
    if region.is_empty() || px == 0 {
        return Err(ScenarioError::Config("empty export region".into()));
    }
    let g = st.k[0].grid();
    let fr = st.frame;
    let frame = Region {
        x0: g.origin.x + fr.i0 as f64 * g.h,
        y0: g.origin.y + fr.j0 as f64 * g.h,
        x1: g.origin.x + fr.i1 as f64 * g.h,
        y1: g.origin.y + fr.j1 as f64 * g.h,
    };
    if !frame.contains(&region) {
        return Err(ScenarioError::Config(format!(
            "region must lie inside the frame {:?},{:?},{:?},{:?}",
            frame.x0, frame.y0, frame.x1, frame.y1
        )));
    }
    let f = PartialSum { terms: &st.function };
    let files = export_field(&f, region, px, dir, stem, mode)?;
    print!("{}", files.report_body.to_text());
    for p in [&files.pgm, &files.csv, &files.report] {
        let size = std::fs::metadata(p)?.len();
        eprintln!("wrote {} ({size} bytes)", p.display());
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mode = if cli.sequential { ExecMode::Sequential } else { ExecMode::default() };
    let result = match cli.command {
        Command::Run { scenario, stages, resolution, seed, out } => run(&scenario, stages, resolution, seed, out, mode),
        Command::Certify { report_dir, bound, trials, seed, alpha } => certify(&report_dir, bound, trials, seed, alpha, mode),
        Command::Export { report_dir, region, px, stem } => export(&report_dir, &region, px, &stem, mode),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("certificate failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
