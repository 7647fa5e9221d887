use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stabsel::data::{ingest_csv, DatasetMatrix};
use stabsel::pipeline::{
    ell_sweep_tsv, run_ell_sweep, run_selection, run_stability, write_selection, RunConfig,
};
use stabsel::rng::{Purpose, StreamKey};
use stabsel::synthetic::{generate_synthetic, SyntheticSpec};
use stabsel::verify::run_oracle_suite;
use stabsel::{Error, Result};

#[derive(Parser)]
#[command(
    name = "stabsel",
    version,
    about = "Rank-based feature screening with FDR control and stability curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-feature statistics and p-values, then FDR selection (writes report.tsv).
    Select(RunArgs),
    /// Stable-feature counts across cross-validation folds (writes stability.csv).
    Stability {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated s values; defaults to 1..=p.
        #[arg(long, value_delimiter = ',')]
        s_grid: Vec<usize>,
    },
    /// Rejection counts of the resampled statistic per fold and ell (writes ell_sweep.tsv).
    EllSweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
        ell_grid: Vec<usize>,
    },
    /// Synthetic two-class data (writes synthetic.csv and truth.tsv).
    Synth(SynthArgs),
    /// Check closed forms against brute-force enumeration.
    Verify,
}

#[derive(Args)]
struct RunArgs {
    /// key=value file; command-line flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    label_col: Option<String>,
    /// Single-character field delimiter.
    #[arg(long)]
    delimiter: Option<char>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// auc or xi
    #[arg(long)]
    statistic: Option<String>,
    /// Use the subsampled statistic (`--resample false` turns it off).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    resample: Option<bool>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    n_perm: Option<usize>,
    /// exact or mc
    #[arg(long)]
    pvalue: Option<String>,
    /// by or bh
    #[arg(long)]
    fdr: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    /// two-sided, greater or less
    #[arg(long)]
    alternative: Option<String>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 200)]
    p: usize,
    #[arg(long, default_value_t = 10)]
    n_nonnull: usize,
    /// Mean shift of planted features in standard deviations.
    #[arg(long, default_value_t = 1.0)]
    shift: f64,
    /// Equicorrelation across features.
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    #[arg(long, default_value = "label")]
    label_col: String,
}

/// Resolved run settings: defaults, then the config file, then flags.
struct Resolved {
    config: RunConfig,
    input: PathBuf,
    label_col: String,
    delimiter: u8,
    output_dir: PathBuf,
}

fn delimiter_byte(c: char) -> Result<u8> {
    if c.is_ascii() {
        Ok(c as u8)
    } else {
        Err(Error::Config(format!(
            "delimiter '{c}' is not a single ASCII character"
        )))
    }
}

impl RunArgs {
    fn resolve(&self) -> Result<Resolved> {
        let mut config = RunConfig::default();
        let mut input = None;
        let mut label_col = "label".to_string();
        let mut delimiter = b',';
        let mut output_dir = PathBuf::from(".");
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)?;
            for (k, v) in config.apply_config_text(&text)? {
                match k.as_str() {
                    "input" => input = Some(PathBuf::from(v)),
                    "label-col" | "label_col" => label_col = v,
                    "output-dir" | "output_dir" => output_dir = PathBuf::from(v),
                    "delimiter" => {
                        let mut chars = v.chars();
                        match (chars.next(), chars.next()) {
                            (Some(c), None) => delimiter = delimiter_byte(c)?,
                            _ => {
                                return Err(Error::Config(format!(
                                    "delimiter '{v}' is not one character"
                                )))
                            }
                        }
                    }
                    other => return Err(Error::Config(format!("unknown option '{other}'"))),
                }
            }
        }
        let flags: [(&str, Option<String>); 12] = [
            ("statistic", self.statistic.clone()),
            ("resample", self.resample.map(|b| b.to_string())),
            ("m", self.m.map(|v| v.to_string())),
            ("ell", self.ell.map(|v| v.to_string())),
            ("n-perm", self.n_perm.map(|v| v.to_string())),
            ("pvalue", self.pvalue.clone()),
            ("fdr", self.fdr.clone()),
            ("alpha", self.alpha.map(|v| v.to_string())),
            ("alternative", self.alternative.clone()),
            ("folds", self.folds.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("threads", self.threads.map(|v| v.to_string())),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                config.set(k, &v)?;
            }
        }
        if let Some(p) = &self.input {
            input = Some(p.clone());
        }
        if let Some(l) = &self.label_col {
            label_col = l.clone();
        }
        if let Some(d) = self.delimiter {
            delimiter = delimiter_byte(d)?;
        }
        if let Some(o) = &self.output_dir {
            output_dir = o.clone();
        }
        config.validate()?;
        Ok(Resolved {
            config,
            input: input.ok_or_else(|| Error::Config("no input file (use --input)".into()))?,
            label_col,
            delimiter,
            output_dir,
        })
    }
}

impl Resolved {
    fn load(&self) -> Result<DatasetMatrix> {
        ingest_csv(&self.input, &self.label_col, self.delimiter)
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Select(args) => {
            let r = args.resolve()?;
            let data = r.load()?;
            let out = run_selection(&data, &r.config)?;
            write_selection(&r.output_dir, &out)?;
            println!(
                "selected {} of {} features; wrote {}",
                out.selection.selected.len(),
                data.p(),
                r.output_dir.join("report.tsv").display()
            );
        }
        Command::Stability { run, s_grid } => {
            let r = run.resolve()?;
            let data = r.load()?;
            let curve = run_stability(&data, &r.config, &s_grid)?;
            let path = write_file(
                &r.output_dir,
                "stability.csv",
                &curve.to_csv(&r.config.method_name()),
            )?;
            println!("wrote {}", path.display());
        }
        Command::EllSweep { run, ell_grid } => {
            let r = run.resolve()?;
            let data = r.load()?;
            let rows = run_ell_sweep(&data, &r.config, &ell_grid)?;
            let path = write_file(&r.output_dir, "ell_sweep.tsv", &ell_sweep_tsv(&rows))?;
            println!("wrote {}", path.display());
        }
        Command::Synth(a) => {
            let synth = generate_synthetic(&SyntheticSpec {
                n: a.n,
                p: a.p,
                n_nonnull: a.n_nonnull,
                shift: a.shift,
                rho: a.rho,
                key: StreamKey::scoped(a.seed, Purpose::Synthetic, 0, 0),
            })?;
            std::fs::create_dir_all(&a.output_dir)?;
            let file = std::fs::File::create(a.output_dir.join("synthetic.csv"))?;
            synth
                .data
                .write_csv(std::io::BufWriter::new(file), &a.label_col)?;
            let mut truth = String::from("feature\tnonnull\n");
            for (name, &planted) in synth.data.names().iter().zip(&synth.nonnull) {
                truth.push_str(&format!("{name}\t{}\n", u8::from(planted)));
            }
            write_file(&a.output_dir, "truth.tsv", &truth)?;
            println!("wrote {}", a.output_dir.join("synthetic.csv").display());
        }
        Command::Verify => {
            let checks = run_oracle_suite();
            for c in &checks {
                println!("{c}");
            }
            return Ok(checks.iter().all(|c| c.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let msg = e.to_string().replace(['\n', '\t'], " ");
            eprintln!("error\t{}\t{}", e.kind(), msg);
            ExitCode::from(2)
        }
    }
}
