//! The `pixcrypt` command line. Each command returns a [`CommandOutcome`]
//! instead of exiting so it can be driven in-process.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or format error, 3 internal
//! failure (including a failed gradient check).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use rayon::prelude::*;

use crate::adaptnet::{gradcheck, run_gradcheck_with, Analytic, BackwardOps};
use crate::augment::Augmentation;
use crate::error::{Error, Result};
use crate::imageio::{read_cifar_batch, read_ppm, write_cifar_batch, write_ppm, DatasetBatch, Record, CIFAR_SIDE};
use crate::keying::KeySet;
use crate::keyspace::{pixel_count, proposed_keyspace_with_digits, tanaka_keyspace};
use crate::scheme::Scheme;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub stdout: String,
    /// Empty on success.
    pub diagnostics: String,
}

impl CommandOutcome {
    fn ok(stdout: String) -> Self {
        Self {
            exit_code: EXIT_OK,
            stdout,
            diagnostics: String::new(),
        }
    }

    fn fail(exit_code: i32, diagnostics: impl Into<String>) -> Self {
        let mut diagnostics = diagnostics.into();
        if !diagnostics.ends_with('\n') {
            diagnostics.push('\n');
        }
        Self {
            exit_code,
            stdout: String::new(),
            diagnostics,
        }
    }

    fn from_result(r: Result<String>) -> Self {
        match r {
            Ok(out) => Self::ok(out),
            Err(e) => Self::fail(EXIT_DATA, format!("error: {e}")),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pixcrypt", version, about = "Pixel-based perceptual image encryption toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Lines,
    Text,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a key file.
    Keygen {
        #[arg(long)]
        out: PathBuf,
        /// Master seed; omitted means system entropy.
        #[arg(long)]
        seed: Option<u64>,
        /// Include the KS color-shuffle key.
        #[arg(long)]
        shuffle: bool,
    },
    /// Encrypt (or decrypt) one PPM image.
    Encrypt {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        scheme: Scheme,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        decrypt: bool,
    },
    /// Encrypt every record of a CIFAR-10 binary batch, optionally augmenting
    /// the ciphertexts.
    Dataset {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        scheme: Scheme,
        #[arg(long)]
        output: PathBuf,
        /// hflip | vflip | shift:DX,DY | padcrop:OX,OY
        #[arg(long)]
        augment: Option<Augmentation>,
        /// Keep the un-augmented ciphertexts and append augmented copies.
        #[arg(long)]
        append: bool,
    },
    /// Print key-space sizes for an image size.
    Keyspace {
        #[arg(long)]
        width: u64,
        #[arg(long)]
        height: u64,
        #[arg(long)]
        no_shuffle: bool,
        #[arg(long, value_enum, default_value = "lines")]
        format: ReportFormat,
    },
    /// Finite-difference check of the adaptation-network gradients.
    Gradcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        cases: usize,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CommandOutcome::ok(e.to_string()),
                _ => CommandOutcome::fail(EXIT_USAGE, e.to_string()),
            };
        }
    };
    match cli.command {
        Command::Keygen { out, seed, shuffle } => cmd_keygen(&out, seed, shuffle),
        Command::Encrypt {
            input,
            key,
            scheme,
            output,
            decrypt,
        } => cmd_encrypt(&input, &key, scheme, &output, decrypt),
        Command::Dataset {
            input,
            key,
            scheme,
            output,
            augment,
            append,
        } => cmd_dataset(&input, &key, scheme, &output, augment, append),
        Command::Keyspace {
            width,
            height,
            no_shuffle,
            format,
        } => cmd_keyspace(width, height, !no_shuffle, matches!(format, ReportFormat::Text)),
        Command::Gradcheck { seed, cases } => cmd_gradcheck(seed, cases),
    }
}

fn read_keys(path: &Path) -> Result<KeySet> {
    KeySet::parse_key_file(&fs::read_to_string(path)?)
}

pub fn cmd_keygen(out: &Path, seed: Option<u64>, with_shuffle: bool) -> CommandOutcome {
    let keys = match seed {
        Some(seed) => KeySet::from_master_seed(seed, with_shuffle),
        None => {
            let mut rng = rand::thread_rng();
            KeySet::new(rng.gen(), rng.gen(), rng.gen(), with_shuffle.then(|| rng.gen()))
        }
    };
    CommandOutcome::from_result(fs::write(out, keys.to_key_file()).map(|_| String::new()).map_err(Error::from))
}

pub fn cmd_encrypt(input: &Path, key: &Path, scheme: Scheme, output: &Path, decrypt: bool) -> CommandOutcome {
    CommandOutcome::from_result((|| {
        let keys = read_keys(key)?;
        let img = read_ppm(&fs::read(input)?)?;
        let out = if decrypt {
            scheme.decrypt(&img, &keys)?
        } else {
            scheme.encrypt(&img, &keys)?
        };
        fs::write(output, write_ppm(&out))?;
        Ok(String::new())
    })())
}

/// Encrypts every record under one key set, then applies `augment` to the
/// ciphertexts. Labels are carried through unchanged and record order is
/// preserved.
pub fn encrypt_batch(
    batch: &DatasetBatch,
    keys: &KeySet,
    scheme: Scheme,
    augment: Option<Augmentation>,
    append: bool,
) -> Result<DatasetBatch> {
    let cipher = scheme.prepare(keys, CIFAR_SIDE, CIFAR_SIDE)?;
    let encrypted = batch
        .records
        .par_iter()
        .map(|r| {
            Ok(Record {
                label: r.label,
                image: cipher.encrypt(&r.image)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let Some(aug) = augment else {
        return Ok(DatasetBatch { records: encrypted });
    };
    let augmented = encrypted
        .par_iter()
        .map(|r| {
            Ok(Record {
                label: r.label,
                image: aug.apply(&r.image)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let records = if append {
        encrypted.into_iter().chain(augmented).collect()
    } else {
        augmented
    };
    Ok(DatasetBatch { records })
}

pub fn cmd_dataset(
    input: &Path,
    key: &Path,
    scheme: Scheme,
    output: &Path,
    augment: Option<Augmentation>,
    append: bool,
) -> CommandOutcome {
    CommandOutcome::from_result((|| {
        let keys = read_keys(key)?;
        let batch = read_cifar_batch(&fs::read(input)?)?;
        let out = encrypt_batch(&batch, &keys, scheme, augment, append)?;
        fs::write(output, write_cifar_batch(&out)?)?;
        Ok(format!("records_in={}\nrecords_out={}\n", batch.len(), out.len()))
    })())
}

pub fn cmd_keyspace(width: u64, height: u64, with_shuffle: bool, text: bool) -> CommandOutcome {
    if width == 0 || height == 0 {
        return CommandOutcome::fail(EXIT_USAGE, "error: width and height must be positive");
    }
    let n = pixel_count(width, height);
    let report = proposed_keyspace_with_digits(n, with_shuffle);
    let tanaka = tanaka_keyspace();
    let mut out = String::new();
    if text {
        out.push_str(&report.to_string());
        let _ = writeln!(out, "{:<14} {:>12.2}", "log2 N_tanaka", tanaka);
    } else {
        out.push_str(&report.to_lines());
        let _ = writeln!(out, "tanaka_log2={tanaka:.2}");
        let _ = writeln!(out, "proposed_exceeds_tanaka={}", report.log2_total > tanaka);
        let seed_bits = if with_shuffle { 256 } else { 192 };
        let _ = writeln!(out, "seed_entropy_bits={seed_bits}");
    }
    CommandOutcome::ok(out)
}

pub fn cmd_gradcheck(seed: u64, cases: usize) -> CommandOutcome {
    cmd_gradcheck_with(&Analytic, seed, cases)
}

/// [`cmd_gradcheck`] with substitute backward passes.
pub fn cmd_gradcheck_with(ops: &dyn BackwardOps, seed: u64, cases: usize) -> CommandOutcome {
    let report = match run_gradcheck_with(ops, seed, cases) {
        Ok(r) => r,
        Err(e) => return CommandOutcome::fail(EXIT_INTERNAL, format!("error: {e}")),
    };
    let stdout = format!("{report}tolerance={:e}\n", gradcheck::TOLERANCE);
    let failures = report.failures(gradcheck::TOLERANCE);
    if failures.is_empty() {
        return CommandOutcome::ok(stdout);
    }
    let mut diag = String::new();
    for f in failures {
        let _ = writeln!(
            diag,
            "gradcheck failed: op={} case={} shape={:?} widths={:?} max_rel_err={:.3e}",
            f.op, f.case, f.shape, f.widths, f.max_rel_error
        );
    }
    CommandOutcome {
        exit_code: EXIT_INTERNAL,
        stdout,
        diagnostics: diag,
    }
}
