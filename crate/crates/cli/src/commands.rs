use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use treebed_core::tree::DEFAULT_SCAN_CAP;
use treebed_core::verifier::{default_m_grid, run_pipeline, EvalOptions, Region, SamplePlan, Strategy};
use treebed_core::{
    embed_with, export_subtree as export, hyp_distance, meet, separation_check, validate_params,
    verify_covering_level0, CubeId, HoroPoint, LevelRule, Norm, Params, SubtreeFormat,
};

use crate::config::FileConfig;
use crate::{CliError, Common, GraphFormat, Outcome, ReportFormat, VerifyArgs};

const DEFAULT_N: usize = 1;
const DEFAULT_P: u32 = 5;
const DEFAULT_SEED: u64 = 0;
const DEFAULT_SAMPLES: usize = 10_000;

fn setup(common: &Common) -> Result<(Params, FileConfig), CliError> {
    let cfg = FileConfig::load(common.config.as_deref())?;
    let n = common.n.or(cfg.n).unwrap_or(DEFAULT_N);
    let p = common.p.or(cfg.p).unwrap_or(DEFAULT_P);
    Ok((validate_params(n, p)?, cfg))
}

macro_rules! out {
    ($($arg:tt)*) => {
        say(format_args!($($arg)*))
    };
}

/// Writes one line to standard output. A closed pipe ends output quietly.
fn say(text: impl std::fmt::Display) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = writeln!(out, "{text}") {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: writing output: {e}");
        std::process::exit(2);
    }
}

fn print_json<T: Serialize>(value: &T) {
    say(serde_json::to_string_pretty(value).expect("serializable output"));
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            say(text.strip_suffix('\n').unwrap_or(text));
            Ok(())
        }
    }
}

pub fn embed(common: &Common, z: HoroPoint, level: Option<i64>) -> Outcome {
    let (params, _) = setup(common)?;
    let rule = level.map_or(LevelRule::Rounded, LevelRule::Fixed);
    let e = embed_with(&params, &z, rule)?;
    if common.json {
        print_json(&e);
    } else {
        for id in &e.images {
            out!("{id}");
        }
    }
    Ok(true)
}

pub fn distance(common: &Common, z: &HoroPoint, w: &HoroPoint) -> Outcome {
    let (params, _) = setup(common)?;
    let d = hyp_distance(&params, z, w)?;
    if common.json {
        print_json(&serde_json::json!({ "d_hyp": d }));
    } else {
        out!("{d}");
    }
    Ok(true)
}

pub fn tree_dist(common: &Common, u: &CubeId, v: &CubeId, scan_cap: Option<u32>) -> Outcome {
    let (params, cfg) = setup(common)?;
    let cap = scan_cap.or(cfg.scan_cap).unwrap_or(DEFAULT_SCAN_CAP);
    let m = meet(&params, u, v, cap)?;
    let distance = m.steps_from_u + m.steps_from_v;
    if common.json {
        print_json(&serde_json::json!({
            "u": u,
            "v": v,
            "distance": distance,
            "meet": m.vertex,
        }));
    } else {
        out!("{distance}");
    }
    Ok(true)
}

pub fn check_covering(common: &Common) -> Outcome {
    let (params, _) = setup(common)?;
    let report = verify_covering_level0(&params)?;
    if common.json {
        print_json(&report);
    } else if report.covered {
        out!("covered: {} cells of side {} checked", report.cells_total, report.grid_step);
    } else {
        out!(
            "not covered: {} of {} cells of side {} uncovered",
            report.cells_uncovered, report.cells_total, report.grid_step
        );
        for w in &report.witnesses {
            out!("  uncovered point ({})", w.join(", "));
        }
    }
    Ok(report.covered)
}

pub fn check_separation(common: &Common, samples: Option<usize>, seed: Option<u64>, k_min: i64, k_max: i64) -> Outcome {
    let (params, cfg) = setup(common)?;
    let count = samples.or(cfg.samples).unwrap_or(DEFAULT_SAMPLES);
    let seed = seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let check = separation_check(&params, count, seed, k_min, k_max)?;
    if common.json {
        print_json(&check);
    } else {
        out!(
            "{} pairs: {} disjoint, {} nested, {} violations",
            check.checked, check.disjoint_far, check.nested_deep, check.violations
        );
        for w in &check.witnesses {
            out!("  {} vs {}: {} (threshold {})", w.low, w.high, w.witness, w.threshold);
        }
    }
    Ok(check.violations == 0)
}

pub fn verify(args: &VerifyArgs) -> Outcome {
    let (params, cfg) = setup(&args.common)?;
    let defaults = Region::default_for(&params);
    let plan = SamplePlan {
        region: Region {
            t_min: args.t_min.or(cfg.region.t_min).unwrap_or(defaults.t_min),
            t_max: args.t_max.or(cfg.region.t_max).unwrap_or(defaults.t_max),
            x_radius: args.x_radius.or(cfg.region.x_radius).unwrap_or(defaults.x_radius),
        },
        count: args.samples.or(cfg.samples).unwrap_or(DEFAULT_SAMPLES),
        strategy: args.strategy.or(cfg.strategy).unwrap_or(Strategy::Uniform),
        seed: args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
    };
    let opts = EvalOptions {
        norm: args.norm.or(cfg.norm).unwrap_or(Norm::L1),
        scan_cap: args.scan_cap.or(cfg.scan_cap).unwrap_or(DEFAULT_SCAN_CAP),
        level_rule: args.level.map_or(LevelRule::Rounded, LevelRule::Fixed),
    };
    let format = match (args.format, cfg.format.as_deref()) {
        (Some(f), _) => f,
        (None, None | Some("json")) => ReportFormat::Json,
        (None, Some("csv")) => ReportFormat::Csv,
        (None, Some(other)) => return Err(CliError::Usage(format!("unknown report format {other:?}"))),
    };
    let output = args.output.clone().or(cfg.output_path);

    let report = run_pipeline(&params, &plan, &opts, &default_m_grid())?;
    let fit = report.fit.expect("pipeline fits");
    eprintln!(
        "{} pairs, l = {}, m = {}, {} violations, {} ms",
        report.samples.len(),
        fit.l,
        fit.m,
        report.violations,
        report.runtime_ms
    );
    let summary = report.summary_json(args.timing);
    let body = match format {
        ReportFormat::Json => summary.clone(),
        ReportFormat::Csv => report.to_csv(),
    };
    write_output(output.as_deref(), &body)?;
    if output.is_some() {
        if args.common.json {
            out!("{summary}");
        } else {
            out!("l = {}, m = {}, violations = {}", fit.l, fit.m, report.violations);
        }
    }
    Ok(fit.l.is_finite() && report.violations == 0)
}

fn read_ids(path: &Path) -> Result<Vec<CubeId>, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let line = line.split('#').next().unwrap_or("").trim();
            (!line.is_empty()).then(|| {
                line.parse::<CubeId>()
                    .map_err(|e| CliError::Usage(format!("{}:{}: {e}", path.display(), i + 1)))
            })
        })
        .collect()
}

pub fn export_subtree(
    common: &Common,
    ids: &Path,
    format: Option<GraphFormat>,
    output: Option<PathBuf>,
    scan_cap: Option<u32>,
) -> Outcome {
    let (params, cfg) = setup(common)?;
    let ids = read_ids(ids)?;
    let format = match (format, cfg.format.as_deref(), common.json) {
        (Some(GraphFormat::Json), _, _) | (None, _, true) | (None, Some("json"), _) => SubtreeFormat::Json,
        (Some(GraphFormat::Dot), _, _) | (None, None | Some("dot"), false) => SubtreeFormat::Dot,
        (None, Some(other), false) => return Err(CliError::Usage(format!("unknown graph format {other:?}"))),
    };
    let cap = scan_cap.or(cfg.scan_cap).unwrap_or(DEFAULT_SCAN_CAP);
    let doc = export(&params, &ids, format, cap)?;
    write_output(output.or(cfg.output_path).as_deref(), &doc)?;
    Ok(true)
}
