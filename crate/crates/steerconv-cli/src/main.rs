//! Command-line front end: wires the text formats, the layer operations, the
//! sample-set generators, and the verification suites together.
//!
//! Exit codes: 0 success, 1 verification failure, 2 I/O or parse error,
//! 3 triangle violation, 4 shape mismatch.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use steerconv::activation::relu_activation;
use steerconv::cg::{cg_scalar, cg_tensor_real, CgKey};
use steerconv::conv::{se3_conv_layer, tfn_layer, LayerOptions};
use steerconv::format::{self, ActivationSpec, AnyWeights, SampleSetSpec};
use steerconv::sampling::{exact_euler_grid, fps_rotations, icosahedral_group};
use steerconv::sh::eval_real_spherical_harmonics;
use steerconv::weights::{iota, iota_inv};
use steerconv::wigner::wigner_d_real;
use steerconv::{Error, EulerZYZ, Rotation, Vec3};
use steerconv_oracles::suite;

#[derive(Parser)]
#[command(name = "steerconv", about = "Steerable and SE(3) convolution toolkit", version)]
struct Cli {
    /// Seed for randomized verification instances.
    #[arg(long, global = true, default_value_t = suite::DEFAULT_SEED)]
    seed: u64,
    /// Scales every suite tolerance (1.0 = the pinned defaults).
    #[arg(long, global = true, default_value_t = 1.0)]
    tolerance: f64,
    /// Rescale input point clouds so the farthest point sits at this radius.
    #[arg(long, global = true)]
    rescale: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suites and print one line per check.
    Verify(VerifyArgs),
    /// Print harmonic basis values: spherical harmonics, Wigner blocks, or
    /// Clebsch-Gordan coefficients.
    EvalBasis(EvalBasisArgs),
    /// Emit a rotation sample set in the text format.
    SampleRotations(SampleRotationsArgs),
    /// Apply a configured convolution layer to a feature field.
    Conv(ConvArgs),
    /// Convert a weight file between the se3 and tfn parametrizations.
    ConvertWeights(ConvertWeightsArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only the named suite (repeatable). Known suites: harmonic,
    /// clebsch, sampling, basis, conv, equivalence, activation, multiview.
    #[arg(long)]
    suite: Vec<String>,
    /// Also write the report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct EvalBasisArgs {
    /// Spherical harmonics: L X Y Z.
    #[arg(long, num_args = 4, value_names = ["L", "X", "Y", "Z"], allow_negative_numbers = true)]
    sh: Option<Vec<String>>,
    /// Real Wigner block from Euler angles: L ALPHA BETA GAMMA.
    #[arg(long, num_args = 4, value_names = ["L", "ALPHA", "BETA", "GAMMA"], allow_negative_numbers = true)]
    wigner: Option<Vec<String>>,
    /// Clebsch-Gordan: `l lp L` prints the real tensor, `l lp L m mp M` the
    /// scalar coefficient.
    #[arg(long, num_args = 3..=6, value_names = ["L1", "L2", "L", "M1", "M2", "M"], allow_negative_numbers = true)]
    cg: Option<Vec<String>>,
}

#[derive(Args)]
struct SampleRotationsArgs {
    /// grid | ico | fps
    #[arg(long)]
    kind: String,
    /// Band limit for grid, sample count for fps.
    #[arg(long)]
    param: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ConvArgs {
    #[arg(long)]
    cloud: PathBuf,
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    layer: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Drop the self-interaction term from the point sums.
    #[arg(long)]
    exclude_self: bool,
}

#[derive(Args)]
struct ConvertWeightsArgs {
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
    input: PathBuf,
    output: PathBuf,
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::TriangleViolation { .. } => 3,
        Error::ShapeMismatch(_) | Error::SizeMismatch(_) | Error::BandLimitMismatch(_) => 4,
        _ => 2,
    }
}

fn parse_f64(tok: &str) -> Result<f64, Error> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::Parse(format!("bad number {tok:?}")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("non-finite number {tok:?}")));
    }
    Ok(v)
}

fn parse_usize(tok: &str) -> Result<usize, Error> {
    tok.parse().map_err(|_| Error::Parse(format!("bad integer {tok:?}")))
}

fn parse_i64(tok: &str) -> Result<i64, Error> {
    tok.parse().map_err(|_| Error::Parse(format!("bad integer {tok:?}")))
}

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values
        .into_iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Verify(args) => {
            eprintln!("# seed {}", cli.seed);
            let mut report = suite::run(&args.suite, cli.seed)
                .ok_or_else(|| Error::Parse(format!("unknown suite in {:?}", args.suite)))?;
            if cli.tolerance != 1.0 {
                for e in &mut report.entries {
                    e.tolerance *= cli.tolerance;
                    e.pass = e.max_abs_error <= e.tolerance;
                }
            }
            let text = report.render();
            print!("{text}");
            if let Some(path) = args.report {
                std::fs::write(path, &text)?;
            }
            Ok(if report.all_pass() { 0 } else { 1 })
        }
        Command::EvalBasis(args) => {
            let mut did_something = false;
            if let Some(sh) = args.sh {
                let l = parse_usize(&sh[0])?;
                let x = Vec3::new(parse_f64(&sh[1])?, parse_f64(&sh[2])?, parse_f64(&sh[3])?);
                println!("{}", join(eval_real_spherical_harmonics(l, x)));
                did_something = true;
            }
            if let Some(wig) = args.wigner {
                let l = parse_usize(&wig[0])?;
                let e =
                    EulerZYZ::new(parse_f64(&wig[1])?, parse_f64(&wig[2])?, parse_f64(&wig[3])?)?;
                let d = wigner_d_real(l, &Rotation::from_euler(e))?;
                for i in 0..2 * l + 1 {
                    println!("{}", join((0..2 * l + 1).map(|j| d[[i, j]])));
                }
                did_something = true;
            }
            if let Some(cg) = args.cg {
                let l = parse_usize(&cg[0])?;
                let lp = parse_usize(&cg[1])?;
                let big_l = parse_usize(&cg[2])?;
                match cg.len() {
                    3 => {
                        let q = cg_tensor_real(l, lp, big_l)?;
                        for big_m in 0..2 * big_l + 1 {
                            for m in 0..2 * l + 1 {
                                println!("{}", join((0..2 * lp + 1).map(|mp| q[[big_m, m, mp]])));
                            }
                        }
                    }
                    6 => {
                        let key = CgKey {
                            l,
                            lp,
                            big_l,
                            m: parse_i64(&cg[3])?,
                            mp: parse_i64(&cg[4])?,
                            big_m: parse_i64(&cg[5])?,
                        };
                        println!("{}", cg_scalar(&key)?);
                    }
                    n => {
                        return Err(Error::Parse(format!("--cg takes 3 or 6 arguments, got {n}")))
                    }
                }
                did_something = true;
            }
            if !did_something {
                return Err(Error::Parse("eval-basis needs --sh, --wigner, or --cg".into()));
            }
            Ok(0)
        }
        Command::SampleRotations(args) => {
            let set = match args.kind.as_str() {
                "grid" => {
                    let band = args
                        .param
                        .ok_or_else(|| Error::Parse("--kind grid needs --param B".into()))?;
                    exact_euler_grid(band)
                }
                "ico" => icosahedral_group(),
                "fps" => {
                    let n = args
                        .param
                        .ok_or_else(|| Error::Parse("--kind fps needs --param N".into()))?;
                    fps_rotations(n, cli.seed)
                }
                other => return Err(Error::Parse(format!("unknown kind {other:?}"))),
            };
            std::fs::write(&args.out, format::write_rotation_set(&set))?;
            Ok(0)
        }
        Command::Conv(args) => {
            let cloud_text = std::fs::read_to_string(&args.cloud)?;
            let mut cloud = format::read_point_cloud(&cloud_text)?;
            if let Some(radius) = cli.rescale {
                cloud = cloud.rescaled(radius);
            }
            let field_text = std::fs::read_to_string(&args.field)?;
            let field = format::read_feature_field(&field_text)?;
            let config_text = std::fs::read_to_string(&args.layer)?;
            let config = format::read_layer_config(&config_text)?;
            let weights_path = args
                .layer
                .parent()
                .map(|p| p.join(&config.weights_path))
                .unwrap_or_else(|| PathBuf::from(&config.weights_path));
            let weights_text = std::fs::read_to_string(&weights_path)?;
            let weights = format::read_weights(&weights_text)?;
            let opts = LayerOptions {
                exclude_self: args.exclude_self || config.exclude_self,
                lmax_out: config.lmax_out,
            };
            let out = match (config.form.as_str(), weights) {
                ("se3", AnyWeights::Se3(w)) => {
                    se3_conv_layer(&field, &cloud, &config.kernel, &w, &opts)?
                }
                ("tfn", AnyWeights::Tfn(v)) => tfn_layer(&field, &cloud, &config.kernel, &v, &opts)?,
                (form, _) => {
                    return Err(Error::Parse(format!(
                        "config form {form:?} does not match the weight file"
                    )))
                }
            };
            let out = match config.activation {
                ActivationSpec::None => out,
                ActivationSpec::ReluWt(ref set_spec) => {
                    let set = match set_spec {
                        SampleSetSpec::Ico => icosahedral_group(),
                        SampleSetSpec::Fps(n) => fps_rotations(*n, cli.seed),
                        SampleSetSpec::Grid(b) => exact_euler_grid(*b),
                    };
                    relu_activation(&out, &set)?
                }
            };
            std::fs::write(&args.out, format::write_feature_field(&out))?;
            Ok(0)
        }
        Command::ConvertWeights(args) => {
            let text = std::fs::read_to_string(&args.input)?;
            let weights = format::read_weights(&text)?;
            let out = match (args.from.as_str(), args.to.as_str(), weights) {
                ("se3", "tfn", AnyWeights::Se3(w)) => format::write_tfn_weights(&iota(&w)?),
                ("tfn", "se3", AnyWeights::Tfn(v)) => format::write_se3_weights(&iota_inv(&v)?),
                ("se3", "se3", AnyWeights::Se3(w)) => format::write_se3_weights(&w),
                ("tfn", "tfn", AnyWeights::Tfn(v)) => format::write_tfn_weights(&v),
                (from, _, _) => {
                    return Err(Error::Parse(format!(
                        "weight file does not match --from {from:?}"
                    )))
                }
            };
            std::fs::write(&args.output, out)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
