//! Command-line front end: evaluation metrics, scar quantification,
//! domain-discrepancy metrics and the embedded verification suite.
//!
//! Output contract: one compact JSON report on stdout, diagnostics on
//! stderr. Exit codes: 0 ok, 1 selfcheck failure, 2 format error, 3 shape
//! mismatch, 4 empty input.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use cardioquant::discrepancy::{self, read_feature_csv, GaussianBatch};
use cardioquant::error::{CqError, Result};
use cardioquant::report::RunReport;
use cardioquant::scargraph::{
    quantify_scar, read_probability_csv, write_labeling_csv, MspConfig, ScarProvider,
};
use cardioquant::segmetrics::{self, ConfusionCounts};
use cardioquant::volgrid::{extract_isosurface, read_volume, write_obj, Volume};
use cardioquant::{selfcheck, volgrid};

#[derive(Parser)]
#[command(name = "cardioquant", version, about = "Cardiac LGE MRI quantification toolkit")]
struct Cli {
    /// Also write the JSON report to this path (quantify: output prefix).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Emit compact JSON on stdout (the default; accepted for scripting).
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for independent sub-computations (results are
    /// assembled in input order, so the output is thread-count invariant).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Seed for randomized generation (selfcheck property families).
    #[arg(long, global = true, default_value_t = 20240612)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segmentation metrics between two label volumes (cqvol .json headers).
    Metrics {
        /// Automatic segmentation volume.
        seg: PathBuf,
        /// Gold-standard volume.
        gd: PathBuf,
        /// Labels to evaluate (default: all labels present in either volume).
        #[arg(long, value_delimiter = ',')]
        labels: Option<Vec<u8>>,
    },
    /// Scar quantification on the LA surface of a mask.
    Quantify {
        /// Intensity volume (cqvol .json header).
        image: PathBuf,
        /// Binary LA mask (cqvol .json header).
        la_mask: PathBuf,
        /// Per-node probability source.
        #[arg(long, value_enum, default_value_t = ProviderArg::TwoSd)]
        provider: ProviderArg,
        /// External probability CSV (header `node_index,p_scar`); required
        /// with --provider external.
        #[arg(long)]
        probs: Option<PathBuf>,
        /// Smoothness weight of the boundary term.
        #[arg(long, default_value_t = 0.4)]
        lambda: f64,
        /// Profile sample spacings in mm, strictly increasing.
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0])]
        scales: Vec<f64>,
        /// Profile samples per side of the center.
        #[arg(long, default_value_t = 2)]
        half_width: usize,
        /// n-link similarity bandwidth (default: std of node intensities).
        #[arg(long)]
        sigma: Option<f64>,
        /// Histogram bins for the otsu provider.
        #[arg(long, default_value_t = 32)]
        bins: usize,
    },
    /// Domain-discrepancy metrics between two latent batches.
    Discrepancy {
        /// Source feature CSV (one sample per row).
        #[arg(long)]
        zs: Option<PathBuf>,
        /// Target feature CSV.
        #[arg(long)]
        zt: Option<PathBuf>,
        /// Gaussian-batch CSVs for the posterior-overlap metrics.
        #[arg(long)]
        zs_means: Option<PathBuf>,
        #[arg(long)]
        zs_vars: Option<PathBuf>,
        #[arg(long)]
        zt_means: Option<PathBuf>,
        #[arg(long)]
        zt_vars: Option<PathBuf>,
        /// Metric to compute (or use --all).
        #[arg(long, value_enum)]
        metric: Option<MetricArg>,
        /// Compute every metric the given inputs support.
        #[arg(long)]
        all: bool,
        /// CF box half-width.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// MMD kernel bandwidth (default: median pairwise distance).
        #[arg(long)]
        sigma: Option<f64>,
    },
    /// Run the embedded oracle suite and exit 0 iff every property passes.
    Selfcheck,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProviderArg {
    TwoSd,
    Otsu,
    External,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    Cfd,
    SlicedCfd,
    Mean,
    Mmd,
    Coral,
    Varda,
    VardaMarginal,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

/// Order-preserving parallel map over task indices.
fn parallel_indexed<T, F>(threads: usize, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let slots: Vec<Mutex<Option<T>>> = (0..count).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..threads.max(1).min(count.max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= count {
                    break;
                }
                *slots[i].lock().unwrap() = Some(f(i));
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every slot was filled"))
        .collect()
}

fn run(cli: Cli) -> Result<i32> {
    let started = Instant::now();
    let (mut report, code) = match &cli.command {
        Command::Metrics { seg, gd, labels } => (cmd_metrics(seg, gd, labels, cli.threads)?, 0),
        Command::Quantify {
            image,
            la_mask,
            provider,
            probs,
            lambda,
            scales,
            half_width,
            sigma,
            bins,
        } => (
            cmd_quantify(
                image, la_mask, *provider, probs, *lambda, scales, *half_width, *sigma, *bins,
                &cli.out,
            )?,
            0,
        ),
        Command::Discrepancy {
            zs,
            zt,
            zs_means,
            zs_vars,
            zt_means,
            zt_vars,
            metric,
            all,
            a,
            sigma,
        } => (
            cmd_discrepancy(
                zs, zt, zs_means, zs_vars, zt_means, zt_vars, *metric, *all, *a, *sigma,
                cli.threads,
            )?,
            0,
        ),
        Command::Selfcheck => {
            let (report, ok) = cmd_selfcheck(cli.seed)?;
            (report, if ok { 0 } else { 1 })
        }
    };
    report.wall_ms = started.elapsed().as_millis() as u64;
    let json = report.to_json();
    println!("{json}");
    if let Some(out) = &cli.out {
        // quantify interprets --out as a prefix and writes its own files
        if !matches!(cli.command, Command::Quantify { .. }) {
            std::fs::write(out, format!("{json}\n"))?;
        }
    }
    Ok(code)
}

fn load_label_volume(path: &Path) -> Result<Volume> {
    let vol = read_volume(path)?;
    if vol.label_data().is_err() {
        return Err(CqError::Format(format!(
            "{} is not a label volume",
            path.display()
        )));
    }
    Ok(vol)
}

fn cmd_metrics(
    seg_path: &Path,
    gd_path: &Path,
    labels: &Option<Vec<u8>>,
    threads: usize,
) -> Result<RunReport> {
    let seg = load_label_volume(seg_path)?;
    let gd = load_label_volume(gd_path)?;
    if !seg.same_grid(&gd) {
        return Err(CqError::Shape(format!(
            "volumes are on different grids: dims {:?}/{:?}, spacing {:?}/{:?}",
            seg.dims(),
            gd.dims(),
            seg.spacing(),
            gd.spacing()
        )));
    }

    let labels: Vec<u8> = match labels {
        Some(l) => l.clone(),
        None => {
            let mut present = std::collections::BTreeSet::new();
            for &v in seg.label_data()?.iter().chain(gd.label_data()?) {
                if v > 0 {
                    present.insert(v);
                }
            }
            present.into_iter().collect()
        }
    };
    if labels.is_empty() {
        return Err(CqError::EmptyInput(
            "both volumes are entirely background".into(),
        ));
    }

    let mut report = RunReport::new("metrics");
    report.add_input("seg", seg_path)?;
    report.add_input("gd", gd_path)?;
    report.add_param(
        "labels",
        labels
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );

    // independent tasks: per-label Dice, then HD, then ASD on the binarized
    // foreground boundary (3-D boundary voxels)
    enum Task {
        Dice(u8),
        Hd,
        Asd,
    }
    let mut tasks = vec![Task::Hd, Task::Asd];
    for &l in &labels {
        tasks.push(Task::Dice(l));
    }
    let seg_ref = &seg;
    let gd_ref = &gd;
    let values = parallel_indexed(threads, tasks.len(), |i| -> Result<f64> {
        match tasks[i] {
            Task::Dice(label) => {
                let a: Vec<u8> = seg_ref
                    .label_data()?
                    .iter()
                    .map(|&v| (v == label) as u8)
                    .collect();
                let b: Vec<u8> = gd_ref
                    .label_data()?
                    .iter()
                    .map(|&v| (v == label) as u8)
                    .collect();
                segmetrics::dice_slices(&a, &b)
            }
            Task::Hd => {
                let x = segmetrics::boundary_points(seg_ref)?;
                let y = segmetrics::boundary_points(gd_ref)?;
                segmetrics::hausdorff(&x, &y)
            }
            Task::Asd => {
                let x = segmetrics::boundary_points(seg_ref)?;
                let y = segmetrics::boundary_points(gd_ref)?;
                segmetrics::asd(&x, &y)
            }
        }
    });
    for (task, value) in tasks.iter().zip(values) {
        let value = value?;
        match task {
            Task::Dice(l) => report.add_result(&format!("dice_{l}"), value),
            Task::Hd => report.add_result("hd", value),
            Task::Asd => report.add_result("asd", value),
        }
    }

    report.add_result("gdice", segmetrics::gdice(&seg, &gd, &labels)?);

    // accuracy only for binary volumes
    let binary = seg.label_data()?.iter().all(|&v| v <= 1)
        && gd.label_data()?.iter().all(|&v| v <= 1);
    if binary {
        let c = ConfusionCounts::from_binary(seg.label_data()?, gd.label_data()?)?;
        report.add_result("accuracy", segmetrics::accuracy(&c)?);
    }
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn cmd_quantify(
    image_path: &Path,
    mask_path: &Path,
    provider: ProviderArg,
    probs: &Option<PathBuf>,
    lambda: f64,
    scales: &[f64],
    half_width: usize,
    sigma: Option<f64>,
    bins: usize,
    out: &Option<PathBuf>,
) -> Result<RunReport> {
    let image = read_volume(image_path)?;
    if image.scalar_data().is_err() {
        return Err(CqError::Format(format!(
            "{} is not a scalar volume",
            image_path.display()
        )));
    }
    let mask = load_label_volume(mask_path)?;

    let provider = match provider {
        ProviderArg::TwoSd => ScarProvider::TwoSd,
        ProviderArg::Otsu => ScarProvider::Otsu { bins },
        ProviderArg::External => {
            let path = probs.as_ref().ok_or_else(|| {
                CqError::Format("--provider external requires --probs <csv>".into())
            })?;
            // the mesh fixes the node count the file must cover
            let mesh = extract_isosurface(&mask)?;
            ScarProvider::External(read_probability_csv(path, mesh.vertices.len())?)
        }
    };

    let msp = MspConfig {
        scales: scales.to_vec(),
        half_width,
        sigma,
    };
    let result = quantify_scar(&image, &mask, &provider, lambda, &msp)?;

    let prefix = out
        .clone()
        .unwrap_or_else(|| PathBuf::from("quantify_out"));
    let obj_path = prefix.with_extension("obj");
    let labels_path = PathBuf::from(format!("{}_labels.csv", prefix.display()));
    write_obj(&obj_path, &result.mesh)?;
    write_labeling_csv(&labels_path, &result.labeling)?;

    let mut report = RunReport::new("quantify");
    report.add_input("image", image_path)?;
    report.add_input("la_mask", mask_path)?;
    if let Some(p) = probs {
        report.add_input("probs", p)?;
    }
    report.add_param("provider", provider_name(&provider));
    report.add_param("lambda", lambda);
    report.add_param(
        "scales",
        scales
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    report.add_param("half_width", half_width);
    report.add_result("scar_fraction", result.scar_fraction);
    report.add_result("energy", result.energy);
    report.add_result("vertices", result.mesh.vertices.len() as f64);
    if let Some(t) = result.threshold {
        report.add_result("threshold", t);
    }
    report.add_result_text("mesh", &obj_path.display().to_string());
    report.add_result_text("labels", &labels_path.display().to_string());
    Ok(report)
}

fn provider_name(p: &ScarProvider) -> &'static str {
    match p {
        ScarProvider::TwoSd => "two-sd",
        ScarProvider::Otsu { .. } => "otsu",
        ScarProvider::External(_) => "external",
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_discrepancy(
    zs: &Option<PathBuf>,
    zt: &Option<PathBuf>,
    zs_means: &Option<PathBuf>,
    zs_vars: &Option<PathBuf>,
    zt_means: &Option<PathBuf>,
    zt_vars: &Option<PathBuf>,
    metric: Option<MetricArg>,
    all: bool,
    a: f64,
    sigma: Option<f64>,
    threads: usize,
) -> Result<RunReport> {
    let mut report = RunReport::new("discrepancy");
    report.add_param("a", a);

    let features = match (zs, zt) {
        (Some(s), Some(t)) => {
            report.add_input("zs", s)?;
            report.add_input("zt", t)?;
            Some((read_feature_csv(s)?, read_feature_csv(t)?))
        }
        (None, None) => None,
        _ => {
            return Err(CqError::Format(
                "--zs and --zt must be given together".into(),
            ))
        }
    };
    let gaussians = match (zs_means, zs_vars, zt_means, zt_vars) {
        (Some(sm), Some(sv), Some(tm), Some(tv)) => {
            report.add_input("zs_means", sm)?;
            report.add_input("zs_vars", sv)?;
            report.add_input("zt_means", tm)?;
            report.add_input("zt_vars", tv)?;
            let qs = GaussianBatch::new(
                read_feature_csv(sm)?.rows().to_vec(),
                read_feature_csv(sv)?.rows().to_vec(),
            )?;
            let qt = GaussianBatch::new(
                read_feature_csv(tm)?.rows().to_vec(),
                read_feature_csv(tv)?.rows().to_vec(),
            )?;
            Some((qs, qt))
        }
        (None, None, None, None) => None,
        _ => {
            return Err(CqError::Format(
                "gaussian batches need all four of --zs-means --zs-vars --zt-means --zt-vars"
                    .into(),
            ))
        }
    };
    if features.is_none() && gaussians.is_none() {
        return Err(CqError::Format(
            "no inputs: give --zs/--zt and/or the gaussian batch files".into(),
        ));
    }

    let metrics: Vec<MetricArg> = if all {
        let mut m = Vec::new();
        if features.is_some() {
            m.extend([
                MetricArg::Cfd,
                MetricArg::SlicedCfd,
                MetricArg::Mean,
                MetricArg::Mmd,
                MetricArg::Coral,
            ]);
        }
        if gaussians.is_some() {
            m.extend([MetricArg::Varda, MetricArg::VardaMarginal]);
        }
        m
    } else {
        vec![metric.ok_or_else(|| {
            CqError::Format("give --metric <name> or --all".into())
        })?]
    };

    // resolve the MMD bandwidth once so the report shows the value used
    let mmd_sigma = if metrics.iter().any(|m| matches!(m, MetricArg::Mmd)) {
        let (fs, ft) = features.as_ref().ok_or_else(|| {
            CqError::Format("mmd needs --zs/--zt feature batches".into())
        })?;
        let s = match sigma {
            Some(s) => s,
            None => discrepancy::median_heuristic_sigma(fs, ft)?,
        };
        report.add_param("sigma", s);
        Some(s)
    } else {
        None
    };

    let compute = |m: &MetricArg| -> Result<(String, f64)> {
        let need_features = || {
            features
                .as_ref()
                .ok_or_else(|| CqError::Format("this metric needs --zs/--zt".into()))
        };
        let need_gaussians = || {
            gaussians.as_ref().ok_or_else(|| {
                CqError::Format("this metric needs the gaussian batch files".into())
            })
        };
        Ok(match m {
            MetricArg::Cfd => {
                let (s, t) = need_features()?;
                ("cfd".into(), discrepancy::cfd_point(s, t, a)?)
            }
            MetricArg::SlicedCfd => {
                let (s, t) = need_features()?;
                ("sliced_cfd".into(), discrepancy::sliced_cfd(s, t, a)?)
            }
            MetricArg::Mean => {
                let (s, t) = need_features()?;
                ("mean".into(), discrepancy::mean_loss(s, t)?)
            }
            MetricArg::Mmd => {
                let (s, t) = need_features()?;
                (
                    "mmd".into(),
                    discrepancy::mmd_gaussian(s, t, mmd_sigma.expect("sigma resolved"))?,
                )
            }
            MetricArg::Coral => {
                let (s, t) = need_features()?;
                ("coral".into(), discrepancy::coral_distance(s, t)?)
            }
            MetricArg::Varda => {
                let (s, t) = need_gaussians()?;
                ("varda".into(), discrepancy::varda_distance(s, t)?)
            }
            MetricArg::VardaMarginal => {
                let (s, t) = need_gaussians()?;
                (
                    "varda_marginal".into(),
                    discrepancy::varda_marginal_distance(s, t)?,
                )
            }
        })
    };

    let results = parallel_indexed(threads, metrics.len(), |i| compute(&metrics[i]));
    for r in results {
        let (name, value) = r?;
        report.add_result(&name, value);
    }
    Ok(report)
}

fn cmd_selfcheck(seed: u64) -> Result<(RunReport, bool)> {
    let sc = selfcheck::run_selfcheck(seed);
    for family in &sc.families {
        let tag = if family.passed { "PASS" } else { "FAIL" };
        eprintln!("[{tag}] {}: {}", family.name, family.detail);
    }
    let mut report = RunReport::new("selfcheck");
    report.add_param("seed", seed);
    report.add_param("families", sc.families.len());
    for family in &sc.families {
        report.add_result_text(&family.name, if family.passed { "pass" } else { "fail" });
    }
    let ok = sc.all_passed();
    report.add_result_text("status", if ok { "pass" } else { "fail" });
    // keep the volgrid module linked into the binary for format docs
    let _ = volgrid::NEIGHBORS_6;
    Ok((report, ok))
}
