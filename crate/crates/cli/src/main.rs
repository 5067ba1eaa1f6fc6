use std::path::PathBuf;
use std::process::ExitCode;

use aoi_gossip_cli::commands::{cmd_compare, cmd_plot, cmd_simulate, cmd_solve};
use aoi_gossip_cli::plan::{parse_plan_file, ExperimentPlan, Scenario};

const USAGE: &str = "\
aoi-gossip — age of information in gossip networks under timestamp attacks

USAGE:
  aoi-gossip <COMMAND> [FLAGS]

COMMANDS:
  simulate   Run seeded replications over an n grid; emit CSV (and optional SVG)
  solve      Exact stationary ages from the balance-equation solvers; emit CSV
  compare    Run both and check per-n relative errors against a tolerance
  plot       Render simulate/solve CSV files as a standalone SVG line chart

FLAGS (also usable as key=value lines in a --plan file):
  --scenario {baseline|capture|capture-thinned|mitm}   network/adversary layout
  --n LIST|START:STOP:STEP   node counts, e.g. 4,8,16 or 10:100:10
  --p F                      outgoing-stomp probability (capture; default 1)
  --q F                      incoming-stomp probability (capture; default = p)
  --lambda F                 per-node total transmission rate (default 1)
  --horizon-mult F           simulate each n for F*n seconds (default 1000)
  --reps N                   replications per n (default 10)
  --seed U64                 master seed; replication i derives its own stream
  --mode {coin|thinned|both} node-capture realization (default coin)
  --tolerance F              compare: max relative error (default 0.10)
  --jobs N                   worker threads (default: available parallelism)
  --csv PATH                 output CSV (simulate/solve/compare; stdout if absent)
                             plot: input CSV, repeatable
  --svg PATH                 output SVG (simulate: optional; plot: required)
  --plan PATH                plan file with key=value lines; flags override it
  --help                     show this help

EXIT CODES:
  0 success   1 tolerance failure (compare)   2 invalid config   3 I/O error

EXAMPLES:
  aoi-gossip solve --scenario capture --n 4,16,64 --p 1 --q 1
  aoi-gossip simulate --scenario capture --n 8,16 --reps 10 --seed 7 --csv out.csv
  aoi-gossip compare --scenario capture --n 50 --mode both --tolerance 0.1
  aoi-gossip plot --csv sim.csv --csv exact.csv --svg figure.svg
";

fn fail_usage(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    eprintln!("run 'aoi-gossip --help' for usage");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" {
        print!("{USAGE}");
        return ExitCode::from(if args.is_empty() { 2 } else { 0 });
    }
    let command = args[0].as_str();
    if !matches!(command, "simulate" | "solve" | "compare" | "plot") {
        return fail_usage(&format!("unknown command '{command}'"));
    }

    // Gather plan-file entries first, then flags: later entries override.
    let mut entries: Vec<(String, String)> = Vec::new();
    let mut plot_inputs: Vec<PathBuf> = Vec::new();
    let mut flag_pairs: Vec<(String, String)> = Vec::new();
    let mut plan_path: Option<PathBuf> = None;
    let mut iter = args[1..].iter();
    while let Some(arg) = iter.next() {
        if arg == "--help" || arg == "-h" {
            print!("{USAGE}");
            return ExitCode::SUCCESS;
        }
        let Some(key) = arg.strip_prefix("--") else {
            return fail_usage(&format!("unexpected argument '{arg}'"));
        };
        let Some(value) = iter.next() else {
            return fail_usage(&format!("flag --{key} needs a value"));
        };
        match key {
            "plan" => plan_path = Some(PathBuf::from(value)),
            "csv" if command == "plot" => plot_inputs.push(PathBuf::from(value)),
            _ => flag_pairs.push((key.to_string(), value.clone())),
        }
    }
    if let Some(path) = &plan_path {
        let text = match std::fs::read_to_string(path) {
            Ok(text) => text,
            Err(err) => {
                eprintln!("error: reading {}: {err}", path.display());
                return ExitCode::from(3);
            }
        };
        match parse_plan_file(&text) {
            Ok(file_entries) => entries.extend(file_entries),
            Err(err) => return fail_usage(&format!("{}: {err}", path.display())),
        }
    }
    entries.extend(flag_pairs);

    // The scenario decides default grids, so resolve it before the rest.
    let scenario = match entries
        .iter()
        .rev()
        .find(|(k, _)| k == "scenario")
        .map(|(_, v)| Scenario::parse(v).ok_or(v))
    {
        Some(Ok(s)) => s,
        Some(Err(v)) => return fail_usage(&format!("unknown scenario '{v}'")),
        None => Scenario::Baseline,
    };
    let mut plan = ExperimentPlan::defaults(scenario);
    for (key, value) in &entries {
        if let Err(err) = plan.apply(key, value) {
            return fail_usage(&err);
        }
    }
    // q follows p unless the user set it explicitly.
    if !entries.iter().any(|(k, _)| k == "q") {
        plan.q = plan.p;
    }

    let result = match command {
        "simulate" => cmd_simulate(&plan),
        "solve" => cmd_solve(&plan),
        "compare" => cmd_compare(&plan),
        "plot" => {
            let Some(svg) = plan.svg.clone() else {
                return fail_usage("plot needs --svg OUTPUT");
            };
            cmd_plot(&plot_inputs, &svg)
        }
        _ => unreachable!("command validated above"),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
