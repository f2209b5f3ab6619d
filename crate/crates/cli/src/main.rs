use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use dcsbm::criteria::CriterionKind;
use dcsbm::eval::{adjusted_rand, nmi};
use dcsbm::graph::{load_gml_subset, load_indexed_edge_list, write_edge_list, Graph, Labeling};
use dcsbm::harness::{
    self, preset, preset_names, run_counterexample, run_experiment, run_polblogs, write_csv,
    CounterexampleConfig, ExperimentSpec, Method, PolblogsConfig, DEFAULT_SPECTRAL_ITERS,
    DEFAULT_SPECTRAL_TOL,
};
use dcsbm::models::{sample_network, DcbmParams, ModelSpec};
use dcsbm::optim::spectral_bisect;
use dcsbm::population::{
    brute_force_population_max, check_erm_condition, check_ngm_condition, counterexample_params,
    DEFAULT_GRID_BUDGET,
};

#[derive(Parser)]
#[command(
    name = "dcsbm",
    version,
    about = "Block-model community detection and consistency checks"
)]
struct Cli {
    /// Root seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a network from a model parameter file.
    Generate {
        /// TOML parameter file (K, pi, P, theta, m, alpha, rho or lambda).
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        n: usize,
        /// Output prefix; writes PREFIX.edges, PREFIX.labels and PREFIX.theta.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Find communities in a graph.
    Detect {
        /// Edge list of 0-based node indices, or a .gml file.
        graph: PathBuf,
        #[arg(long, short)]
        k: usize,
        #[arg(long, default_value = "dcbm")]
        criterion: CriterionKind,
        /// Node count, when trailing nodes are isolated.
        #[arg(long)]
        n: Option<usize>,
        /// Label file to write (1-based, one per line); stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        method: MethodArgs,
    },
    /// Compare two label files.
    Evaluate { first: PathBuf, second: PathBuf },
    /// Check the sufficient conditions for modularity consistency.
    Conditions {
        /// TOML parameter file; rho/lambda may be omitted.
        #[arg(long, conflicts_with = "counterexample")]
        params: Option<PathBuf>,
        /// Use the built-in degree-grouping counterexample.
        #[arg(long)]
        counterexample: bool,
    },
    /// Maximize a population criterion on a grid.
    Popmax {
        #[arg(long, conflicts_with = "counterexample")]
        params: Option<PathBuf>,
        #[arg(long)]
        counterexample: bool,
        #[arg(long, default_value = "dcbm")]
        criterion: CriterionKind,
        /// Grid resolution g: each column is split in steps of 1/g.
        #[arg(long, default_value_t = 10)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_GRID_BUDGET)]
        budget: u128,
    },
    /// Run a preset or a spec file and write CSV.
    Experiment {
        /// Preset name (see --list) or path to a TOML spec file.
        target: Option<String>,
        /// Full scale: n = 1000, 100 replications.
        #[arg(long)]
        full: bool,
        #[arg(long)]
        list: bool,
        /// Override the number of replications.
        #[arg(long)]
        reps: Option<usize>,
        /// Override the node count.
        #[arg(long)]
        n: Option<usize>,
        /// CSV path; defaults to <output dir>/<name>.csv.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        method: MethodArgs,
    },
    /// Verify the degree-grouping counterexample.
    Counterexample {
        #[arg(long, default_value_t = 2000)]
        n: usize,
        /// Number of sampled networks.
        #[arg(long, default_value_t = 10)]
        networks: usize,
        #[arg(long, default_value_t = 2)]
        restarts: usize,
        #[arg(long, default_value_t = 10)]
        grid: usize,
    },
    /// Analyze the political blogs network.
    Polblogs {
        /// GML file with node `value` labels.
        #[arg(long, env = harness::POLBLOGS_ENV, default_value = harness::DEFAULT_POLBLOGS_PATH)]
        gml: PathBuf,
        #[command(flatten)]
        method: MethodArgs,
    },
}

#[derive(Args, Clone)]
struct MethodArgs {
    /// tabu or spectral.
    #[arg(long, default_value = "tabu")]
    method: String,
    #[arg(long)]
    tenure: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    max_stall: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SPECTRAL_TOL)]
    spectral_tol: f64,
    #[arg(long, default_value_t = DEFAULT_SPECTRAL_ITERS)]
    spectral_max_iters: usize,
}

impl MethodArgs {
    fn tabu(&self) -> Method {
        Method::Tabu {
            tenure: self.tenure,
            restarts: self.restarts,
            max_iters: self.max_iters,
            max_stall: self.max_stall,
        }
    }

    fn method(&self) -> Result<Method> {
        match self.method.as_str() {
            "tabu" => Ok(self.tabu()),
            "spectral" => Ok(Method::Spectral {
                tol: self.spectral_tol,
                max_iters: self.spectral_max_iters,
            }),
            other => bail!("unknown method {other:?} (expected tabu or spectral)"),
        }
    }

    fn tabu_overridden(&self) -> bool {
        self.tenure.is_some()
            || self.restarts.is_some()
            || self.max_iters.is_some()
            || self.max_stall.is_some()
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_graph(path: &Path, n: Option<usize>) -> Result<Graph> {
    let text = read(path)?;
    let graph = if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("gml"))
    {
        load_gml_subset(&text)?.graph
    } else {
        load_indexed_edge_list(&text, n)?
    };
    Ok(graph)
}

fn load_params(path: Option<&Path>, counterexample: bool) -> Result<DcbmParams> {
    if counterexample {
        return Ok(counterexample_params()?);
    }
    let Some(path) = path else {
        bail!("give --params FILE or --counterexample");
    };
    let mut spec =
        ModelSpec::parse(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    // the population analysis does not depend on the overall edge density
    if spec.rho.is_none() && (spec.lambda.is_none() || spec.n.is_none()) {
        spec.lambda = None;
        spec.rho = Some(0.0);
    }
    Ok(spec.resolve(None)?)
}

fn fmt_matrix(values: &[f64], k: usize) -> String {
    values
        .chunks(k)
        .map(|row| {
            row.iter()
                .map(|v| format!("{v:>10.6}"))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let seed = cli.seed;
    match cli.command {
        Command::Generate { params, n, output } => {
            let spec = ModelSpec::parse(&read(&params)?)
                .with_context(|| format!("in {}", params.display()))?;
            let model = spec.resolve(Some(n))?;
            let net = sample_network(&model, n, seed)?;
            let prefix = output.unwrap_or_else(|| harness::output_dir().join("network"));
            let with_ext = |ext: &str| {
                let mut p = prefix.clone().into_os_string();
                p.push(ext);
                PathBuf::from(p)
            };
            write(&with_ext(".edges"), &write_edge_list(&net.graph))?;
            write(&with_ext(".labels"), &net.labels.to_text())?;
            let theta: String = net.theta.iter().map(|t| format!("{t}\n")).collect();
            write(&with_ext(".theta"), &theta)?;
            println!(
                "n={} edges={} mean_degree={:.3} rho={} clamped={} -> {}.{{edges,labels,theta}}",
                n,
                net.graph.edge_count(),
                net.graph.total_degree() as f64 / n as f64,
                model.rho,
                net.clamped,
                prefix.display()
            );
        }
        Command::Detect {
            graph,
            k,
            criterion,
            n,
            output,
            method,
        } => {
            let g = load_graph(&graph, n)?;
            let labels = match method.method()? {
                Method::Spectral { tol, max_iters } => {
                    if k != 2 {
                        bail!("spectral bisection finds exactly 2 communities");
                    }
                    let res = spectral_bisect(&g, criterion, tol, max_iters, seed)?;
                    if !res.converged {
                        eprintln!(
                            "warning: power iteration did not converge in {} iterations",
                            res.iterations
                        );
                    }
                    res.labeling
                }
                tabu => {
                    let cfg = tabu.tabu_config(g.n(), seed).expect("tabu method");
                    let res = dcsbm::optim::tabu_search(&g, k, criterion, &cfg)?;
                    eprintln!("{criterion} = {} (restart {})", res.score, res.best_restart);
                    res.labeling
                }
            };
            match output {
                Some(path) => write(&path, &labels.to_text())?,
                None => print!("{}", labels.to_text()),
            }
        }
        Command::Evaluate { first, second } => {
            let a = Labeling::parse(&read(&first)?)
                .with_context(|| format!("in {}", first.display()))?;
            let b = Labeling::parse(&read(&second)?)
                .with_context(|| format!("in {}", second.display()))?;
            println!("ari {}", adjusted_rand(a.as_slice(), b.as_slice())?);
            println!("nmi {}", nmi(a.as_slice(), b.as_slice())?);
        }
        Command::Conditions {
            params,
            counterexample,
        } => {
            let model = load_params(params.as_deref(), counterexample)?;
            let ngm = check_ngm_condition(&model)?;
            println!("ngm {}", if ngm.pass { "pass" } else { "fail" });
            println!("E_tilde =\n{}", fmt_matrix(&ngm.e_tilde, model.k));
            match check_erm_condition(&model) {
                Ok(erm) => println!(
                    "erm {} (P0 = {})",
                    if erm.pass { "pass" } else { "fail" },
                    erm.p0
                ),
                Err(e) => println!("erm n/a: {e}"),
            }
        }
        Command::Popmax {
            params,
            counterexample,
            criterion,
            grid,
            budget,
        } => {
            let model = load_params(params.as_deref(), counterexample)?;
            let res = brute_force_population_max(criterion, &model, grid, budget)?;
            let a = &res.argmax;
            println!(
                "criterion {criterion}, grid g={grid}, {} points",
                res.points
            );
            println!("max value {}", res.value);
            println!("value at truth {}", res.diagonal_value);
            println!("argmax is the true partition: {}", res.is_diagonal);
            println!("argmax S[k][a][u]:");
            for k in 0..a.k() {
                let row: Vec<String> = (0..a.blocks())
                    .flat_map(|b| (0..a.m()).map(move |u| (b, u)))
                    .map(|(b, u)| format!("{:.4}", a.get(k, b, u)))
                    .collect();
                println!("  k={k}: {}", row.join(" "));
            }
        }
        Command::Experiment {
            target,
            full,
            list,
            reps,
            n,
            output,
            method,
        } => {
            if list {
                for name in preset_names() {
                    println!("{name}");
                }
                return Ok(());
            }
            let Some(target) = target else {
                bail!("give a preset name or spec file (see --list)");
            };
            let mut spec = match preset(&target, full) {
                Some(spec) => spec,
                None if Path::new(&target).exists() => {
                    ExperimentSpec::parse(&read(Path::new(&target))?)
                        .with_context(|| format!("in {target}"))?
                }
                None => bail!(
                    "{target:?} is neither a preset nor a file; presets: {}",
                    preset_names().join(", ")
                ),
            };
            spec.seed = seed;
            if let Some(r) = reps {
                spec.replications = r;
            }
            if let Some(n) = n {
                spec.n = n;
            }
            if method.method != "tabu" || method.tabu_overridden() {
                spec.method = method.method()?;
            }
            let rows = run_experiment(&spec)?;
            let path =
                output.unwrap_or_else(|| harness::output_dir().join(format!("{}.csv", spec.name)));
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            write(&path, std::str::from_utf8(&buf)?)?;
            for r in rows.iter().filter(|r| r.is_summary() || r.is_error()) {
                println!(
                    "{}={} {:<5} {} {}",
                    r.sweep_param, r.sweep_value, r.criterion, r.replication, r.value
                );
            }
            println!("wrote {} rows to {}", rows.len(), path.display());
        }
        Command::Counterexample {
            n,
            networks,
            restarts,
            grid,
        } => {
            let cfg = CounterexampleConfig {
                n,
                seeds: networks,
                restarts,
                grid_resolution: grid,
                seed,
            };
            let report = run_counterexample(&cfg)?;
            println!("population values (truth, degree grouping):");
            for (kind, truth, grouped) in &report.population {
                println!("  {kind:<5} {truth:.6} {grouped:.6}");
            }
            println!("grid argmax is the true partition (g={grid}):");
            for (kind, res) in &report.grid {
                println!("  {kind:<5} {} (max {:.6})", res.is_diagonal, res.value);
            }
            for kind in [CriterionKind::Erm, CriterionKind::Bm] {
                println!(
                    "{kind}: closer to the degree grouping on {:.0}% of {networks} networks, median ARI vs truth {:.3}",
                    100.0 * report.theta_preference(kind),
                    report.median_ari_truth(kind).unwrap_or(f64::NAN)
                );
            }
        }
        Command::Polblogs { gml, method } => {
            let cfg = PolblogsConfig {
                tabu: method.tabu(),
                spectral_tol: method.spectral_tol,
                spectral_max_iters: method.spectral_max_iters,
                seed,
            };
            let report = run_polblogs(&gml, &cfg)?;
            let d = &report.degrees;
            println!(
                "largest component: {} nodes, {} edges ({} self-loops dropped)",
                report.nodes, report.edges, report.loops_removed
            );
            println!(
                "degrees: mean {:.2} median {:.2} min {} Q1 {} Q3 {} max {}",
                d.mean, d.median, d.min, d.q1, d.q3, d.max
            );
            for fit in &report.fits {
                let note = match fit.converged {
                    Some(false) => " (not converged)",
                    _ => "",
                };
                println!(
                    "{:<8} {:<5} ARI {:.3}{note}",
                    fit.method, fit.criterion, fit.ari
                );
            }
        }
    }
    Ok(())
}
