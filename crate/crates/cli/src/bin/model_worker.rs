//! Toy black box speaking the JSON-lines protocol, for testing external models.

use std::io::{BufRead, Write};
use std::time::Duration;

use anyhow::Result;
use clap::{Parser, ValueEnum};
use ecertify::harness::protocol::{Request, Response};
use ecertify::special::synthetic::SyntheticPwl;

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// First coordinate.
    Identity,
    /// `--value` everywhere.
    Constant,
    /// Synthetic piecewise-linear benchmark.
    Pwl,
}

#[derive(Parser)]
#[command(name = "ecertify-model-worker")]
struct Args {
    #[arg(long, value_enum, default_value = "identity")]
    mode: Mode,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    value: f64,
    /// Exit without answering once this many requests have been served.
    #[arg(long)]
    die_after: Option<u64>,
    /// Delay before each response.
    #[arg(long, default_value_t = 0)]
    sleep_ms: u64,
    /// Answer with a line that is not valid JSON.
    #[arg(long)]
    garbage: bool,
}

fn main() -> Result<()> {
    let args = Args::parse();
    let stdin = std::io::stdin();
    let mut stdout = std::io::stdout().lock();
    let mut served = 0u64;
    for line in stdin.lock().lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if args.die_after.is_some_and(|n| served >= n) {
            std::process::exit(3);
        }
        if args.sleep_ms > 0 {
            std::thread::sleep(Duration::from_millis(args.sleep_ms));
        }
        if args.garbage {
            writeln!(stdout, "not json")?;
            stdout.flush()?;
            continue;
        }
        let response = match serde_json::from_str::<Request>(&line) {
            Ok(req) => {
                let ys = req
                    .xs
                    .iter()
                    .map(|x| match args.mode {
                        Mode::Identity => x.first().copied().unwrap_or(0.0),
                        Mode::Constant => args.value,
                        Mode::Pwl => SyntheticPwl::value(x),
                    })
                    .collect();
                Response::ok(req.id, ys)
            }
            Err(e) => Response { id: 0, ys: None, error: Some(e.to_string()) },
        };
        stdout.write_all(response.to_line()?.as_bytes())?;
        stdout.flush()?;
        served += 1;
    }
    Ok(())
}
