use std::fs;
use std::path::Path;

use vlwe::bench::{bench_compare, Series};
use vlwe::codec::Container;
use vlwe::estimator::toy::{toy_distinguisher_with, DistinguisherConfig};
use vlwe::estimator::{cost, recommend_params, render_table, toy_key_recovery, Attack, CostConstants};
use vlwe::noise::{self, simulate, SimOp};
use vlwe::params_file::{format_params, read_params, write_params};
use vlwe::sampling::{sample_uniform_elem, DiscreteGaussian};
use vlwe::scheme::vlwe_sample;
use vlwe::{Ciphertext, Context, Plaintext, PublicKey, RelinKey, Ring, Sampler, SecretKey, VarietyParams};

use crate::{Cli, Command, Format};

pub enum Failure {
    /// Missing or inconsistent arguments; exit code 2.
    Usage(String),
    /// Anything the library rejects; exit code 1.
    Lib(vlwe::Error),
}

impl From<vlwe::Error> for Failure {
    fn from(e: vlwe::Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(e.into())
    }
}

type Result<T> = std::result::Result<T, Failure>;

pub const SECRET_FILE: &str = "secret.key";
pub const PUBLIC_FILE: &str = "public.key";
pub const RELIN_FILE: &str = "relin.key";

pub fn run(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    // parameters are validated up front, whichever subcommand runs
    let params = g.params.as_deref().map(read_params).transpose()?;
    let mut rng = match g.seed {
        Some(seed) => Sampler::from_u64(seed),
        None => Sampler::from_os(),
    };
    let need_ctx = || -> Result<Context> {
        let p = params
            .clone()
            .ok_or_else(|| Failure::Usage("this subcommand needs --params".into()))?;
        Ok(Context::new(p)?)
    };
    let fmt = g.format;

    match &cli.command {
        Command::Keygen { out } => {
            let ctx = need_ctx()?;
            let (pk, sk) = ctx.keygen(&mut rng)?;
            let rlk = ctx.relin_keygen(&sk, &mut rng)?;
            fs::create_dir_all(out)?;
            let p = ctx.params();
            fs::write(out.join(SECRET_FILE), sk.encode(p)?)?;
            fs::write(out.join(PUBLIC_FILE), pk.encode(p)?)?;
            fs::write(out.join(RELIN_FILE), rlk.encode(p)?)?;
            if fmt == Format::Human {
                println!("wrote {SECRET_FILE}, {PUBLIC_FILE}, {RELIN_FILE} to {}", out.display());
            }
        }
        Command::Encrypt { pk, vector, out } => {
            let ctx = need_ctx()?;
            let pk: PublicKey = load(&ctx, pk)?;
            let pt = Plaintext::from_vector(&ctx, vector)?;
            let ct = ctx.encrypt(&pk, &pt, &mut rng)?;
            store(&ctx, out, &ct)?;
        }
        Command::Decrypt { sk, input } => {
            let ctx = need_ctx()?;
            let sk: SecretKey = load(&ctx, sk)?;
            let ct: Ciphertext = load(&ctx, input)?;
            print_vector(fmt, &ctx.decrypt(&sk, &ct)?.to_vector());
        }
        Command::Add { a, b, out } => {
            let ctx = need_ctx()?;
            let sum = ctx.eval_add(&load(&ctx, a)?, &load(&ctx, b)?)?;
            store(&ctx, out, &sum)?;
        }
        Command::Mul { a, b, out } => {
            let ctx = need_ctx()?;
            let prod = ctx.eval_mul_literal(&load(&ctx, a)?, &load(&ctx, b)?)?;
            store(&ctx, out, &prod)?;
        }
        Command::Relin { rlk, input, out } => {
            let ctx = need_ctx()?;
            let rlk: RelinKey = load(&ctx, rlk)?;
            let ct = ctx.relinearize(&rlk, &load(&ctx, input)?)?;
            store(&ctx, out, &ct)?;
        }
        Command::Modswitch { input, level, out } => {
            let ctx = need_ctx()?;
            let ct = ctx.mod_switch(&load(&ctx, input)?, *level)?;
            store(&ctx, out, &ct)?;
        }
        Command::Noise { sk, input } => {
            let ctx = need_ctx()?;
            let sk: SecretKey = load(&ctx, sk)?;
            let ct: Ciphertext = load(&ctx, input)?;
            let delta = ctx.delta(ct.level)?;
            // the phase is taken relative to the decrypted message
            let pt = ctx.decrypt(&sk, &ct)?;
            let measured = noise::measure_noise(&ctx, &sk, &ct, &pt)?;
            match fmt {
                Format::Tsv => {
                    println!("coord\tpredicted_var\tmeasured_inf\tbudget");
                    for (i, m) in measured.iter().enumerate() {
                        println!("{i}\t{:.6e}\t{m}\t{}", ct.noise.var[i], delta / 2);
                    }
                }
                Format::Human => {
                    for (i, m) in measured.iter().enumerate() {
                        println!(
                            "coordinate {i}: predicted std {:.1}, measured |e| {m}, budget {}",
                            ct.noise.var[i].sqrt(),
                            delta / 2
                        );
                    }
                    let safe = noise::decryption_safe(ct.noise.max_var(), delta);
                    println!("model says decryption is {}", if safe { "safe" } else { "at risk" });
                }
            }
        }
        Command::NoiseSim { ops, trials } => {
            let ctx = need_ctx()?;
            let ops = ops
                .iter()
                .map(|s| s.parse::<SimOp>())
                .collect::<vlwe::Result<Vec<_>>>()?;
            if fmt == Format::Tsv {
                println!("op\tcoord\tpredicted\tmeasured\tratio");
            }
            for op in ops {
                let report = simulate(&ctx, op, *trials, &rng)?;
                match fmt {
                    Format::Tsv => print!("{}", report.to_tsv()),
                    Format::Human => {
                        println!(
                            "{op}: {} trials, mean predicted {:.4e}, mean measured {:.4e}, max |rho| {:.4}, within budget {:.3}",
                            report.trials,
                            report.mean_predicted(),
                            report.mean_measured(),
                            report.max_cross_correlation,
                            report.within_budget
                        );
                        for i in 0..report.predicted.len() {
                            println!("  coordinate {i}: ratio {:.4}", report.ratio(i));
                        }
                    }
                }
            }
        }
        Command::Estimate { n, d, attack, constants } => {
            let mut k = CostConstants::default();
            if let Some(spec) = constants {
                k = k.with_overrides(spec)?;
            }
            let reports = Attack::select(attack)?
                .into_iter()
                .map(|a| cost(a, *n, *d, &k))
                .collect::<vlwe::Result<Vec<_>>>()?;
            match fmt {
                Format::Tsv => print!("{}", render_table(&reports)),
                Format::Human => {
                    for r in &reports {
                        let cap = if r.capped { " (capped)" } else { "" };
                        println!("{:<16} 2^{:.2}{cap}   {}", r.attack.name(), r.log2_cost, r.formula);
                    }
                }
            }
        }
        Command::Recommend { bits, quantum, out } => {
            let rec = recommend_params(*bits, *quantum)?;
            match out {
                Some(path) => write_params(path, &rec.params)?,
                None => print!("{}", format_params(&rec.params)),
            }
            if fmt == Format::Human {
                for note in &rec.notes {
                    eprintln!("# {note}");
                }
            }
        }
        Command::Bench { n_list, d, reps, out } => {
            let report = bench_compare(n_list, *d, *reps)?;
            let tsv = report.to_tsv();
            if let Some(path) = out {
                fs::write(path, &tsv)?;
            }
            match fmt {
                Format::Tsv => print!("{tsv}"),
                Format::Human => {
                    for row in &report.rows {
                        println!("{:<28} {:>12.0} ns", row.config(), row.median_ns);
                    }
                    for s in [Series::Vlwe, Series::RlweSplit, Series::RlweFull] {
                        if let Some(e) = report.exponent(s) {
                            println!("{} exponent in n: {e:.3}", s.name());
                        }
                    }
                }
            }
        }
        Command::AttackToy { samples, trials } => {
            let ring_params = match &params {
                Some(p) => p.ring.clone(),
                None => VarietyParams::negacyclic(1, 2, 17, 2, 1.0)?,
            };
            attack_toy(&ring_params, *samples, *trials, fmt, &mut rng)?;
        }
    }
    Ok(())
}

fn attack_toy(params: &VarietyParams, samples: usize, trials: usize, fmt: Format, rng: &mut Sampler) -> Result<()> {
    let ring = Ring::new(params)?;
    let dist = DiscreteGaussian::new(params.sigma)?;
    let secret = sample_uniform_elem(&ring, rng);
    let draws = (0..samples)
        .map(|_| vlwe_sample(&ring, &secret, &dist, rng))
        .collect::<vlwe::Result<Vec<_>>>()?;
    let found = toy_key_recovery(&ring, &draws)?;
    let real = toy_distinguisher_with(params, trials, DistinguisherConfig::VarietyVsUniform, rng)?;
    let null = toy_distinguisher_with(params, trials, DistinguisherConfig::UniformVsUniform, rng)?;
    let recovered = found.secret == secret;
    match fmt {
        Format::Tsv => {
            println!("metric\tvalue");
            println!("recovered\t{recovered}");
            println!("score\t{}", found.score);
            println!("advantage\t{:.4}", real.advantage);
            println!("null_advantage\t{:.4}", null.advantage);
        }
        Format::Human => {
            println!(
                "key recovery from {samples} samples: {} (residual score {})",
                if recovered { "secret recovered" } else { "wrong secret" },
                found.score
            );
            println!(
                "distinguisher over {trials} trials: advantage {:.4} (uniform-vs-uniform {:.4})",
                real.advantage, null.advantage
            );
        }
    }
    Ok(())
}

fn load<T: Container>(ctx: &Context, path: &Path) -> Result<T> {
    Ok(T::decode(ctx.params(), &fs::read(path)?)?)
}

fn store<T: Container>(ctx: &Context, path: &Path, value: &T) -> Result<()> {
    fs::write(path, value.encode(ctx.params())?)?;
    Ok(())
}

fn print_vector(fmt: Format, v: &[u64]) {
    let joined: Vec<String> = v.iter().map(u64::to_string).collect();
    match fmt {
        Format::Tsv => println!("{}", joined.join("\t")),
        Format::Human => println!("[{}]", joined.join(", ")),
    }
}
