//! A black box hosted in a child process speaking the JSON-lines protocol.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use super::protocol::{Request, Response};
use crate::blackbox::Model;
use crate::error::{Error, Result};
use crate::point::Point;

pub const TIMEOUT_ENV: &str = "ECERT_TIMEOUT_SECS";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

/// Per-batch timeout from `ECERT_TIMEOUT_SECS`, defaulting to 30 s.
pub fn timeout_from_env() -> Duration {
    std::env::var(TIMEOUT_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<f64>().ok())
        .filter(|s| s.is_finite() && *s > 0.0)
        .map(Duration::from_secs_f64)
        .unwrap_or(DEFAULT_TIMEOUT)
}

struct Worker {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
}

impl Worker {
    fn spawn(argv: &[String]) -> Result<Self> {
        let (program, args) = argv
            .split_first()
            .ok_or_else(|| Error::InvalidArgument("empty black-box command".into()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::BlackBox(format!("cannot spawn {program:?}: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Self { child, stdin, lines: rx })
    }

    fn kill(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

enum Failure {
    /// The child went away; a restart may help.
    Died(String),
    Fatal(Error),
}

struct State {
    worker: Option<Worker>,
    next_id: u64,
    restarted: bool,
}

/// Client for an external model process.
///
/// Calls are serialized per child. If the child dies, it is restarted once
/// and the batch retried; a second death is a hard error.
pub struct SubprocessModel {
    argv: Vec<String>,
    dim: Option<usize>,
    timeout: Duration,
    state: Mutex<State>,
}

impl SubprocessModel {
    pub fn spawn(argv: Vec<String>, dim: Option<usize>, timeout: Duration) -> Result<Self> {
        let worker = Worker::spawn(&argv)?;
        Ok(Self {
            argv,
            dim,
            timeout,
            state: Mutex::new(State { worker: Some(worker), next_id: 0, restarted: false }),
        })
    }

    /// Spawns with the timeout taken from the environment.
    pub fn spawn_default(argv: Vec<String>, dim: Option<usize>) -> Result<Self> {
        Self::spawn(argv, dim, timeout_from_env())
    }

    pub fn restarted(&self) -> bool {
        self.state.lock().map(|s| s.restarted).unwrap_or(true)
    }

    fn round_trip(&self, worker: &mut Worker, id: u64, xs: &[Point]) -> std::result::Result<Vec<f64>, Failure> {
        let req = Request { id, xs: xs.iter().map(|x| x.coords().to_vec()).collect() };
        let line = req.to_line().map_err(Failure::Fatal)?;
        if let Err(e) = worker.stdin.write_all(line.as_bytes()).and_then(|_| worker.stdin.flush()) {
            return Err(Failure::Died(format!("write failed: {e}")));
        }
        match worker.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => Response::parse_for(&line, id, xs.len()).map_err(Failure::Fatal),
            Ok(Err(e)) => Err(Failure::Died(format!("read failed: {e}"))),
            Err(RecvTimeoutError::Disconnected) => Err(Failure::Died("child closed its output".into())),
            Err(RecvTimeoutError::Timeout) => Err(Failure::Fatal(Error::Timeout(self.timeout))),
        }
    }
}

impl Model for SubprocessModel {
    fn dim(&self) -> Option<usize> {
        self.dim
    }

    fn evaluate_batch(&self, xs: &[Point]) -> Result<Vec<f64>> {
        if xs.is_empty() {
            return Ok(Vec::new());
        }
        let mut state = self
            .state
            .lock()
            .map_err(|_| Error::BlackBox("subprocess client poisoned".into()))?;
        loop {
            let id = state.next_id;
            state.next_id += 1;
            let mut worker = match state.worker.take() {
                Some(w) => w,
                None if !state.restarted => {
                    state.restarted = true;
                    Worker::spawn(&self.argv)?
                }
                None => return Err(Error::BlackBox("black-box process is gone".into())),
            };
            match self.round_trip(&mut worker, id, xs) {
                Ok(ys) => {
                    state.worker = Some(worker);
                    return Ok(ys);
                }
                Err(Failure::Fatal(e)) => {
                    // The stream may be out of sync; the next call starts a fresh child if allowed.
                    worker.kill();
                    return Err(e);
                }
                Err(Failure::Died(why)) => {
                    worker.kill();
                    if state.restarted {
                        return Err(Error::BlackBox(format!("black-box process died again: {why}")));
                    }
                    log::warn!("black-box process died ({why}); restarting once");
                }
            }
        }
    }
}

impl Drop for SubprocessModel {
    fn drop(&mut self) {
        if let Ok(state) = self.state.get_mut() {
            if let Some(mut w) = state.worker.take() {
                w.kill();
            }
        }
    }
}
