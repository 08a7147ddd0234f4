use std::path::Path;

use dyadic_core::builder::{build as build_subbase, separation};
use dyadic_core::file::{check_domain, load_subbase, write_json, write_text};
use dyadic_core::space::parse_point;
use dyadic_core::{
    builtin_space, check_proper, check_strong_proper, enumerate_k, is_cusl, parse_rational, BuilderParams, CheckReport,
    CuslVerdict, Error, LoadedSubbase, Result, SpaceModel, SpaceName, SubbaseFile, Q,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{CheckArgs, Outcome, SpaceArgs};

fn parse_q(text: &str, what: &str) -> Result<Q> {
    parse_rational(text).map_err(|_| Error::InvalidParams(format!("{what} must be a rational, got {text:?}")))
}

impl SpaceArgs {
    fn name(&self) -> Result<Option<SpaceName>> {
        match (&self.space, &self.space_file) {
            (_, Some(path)) => Ok(Some(SpaceName::Finite(path.clone()))),
            (Some(name), None) => name.parse().map(Some),
            (None, None) => Ok(None),
        }
    }

    fn resolution(&self) -> Result<Option<Q>> {
        self.resolution.as_deref().map(|r| parse_q(r, "resolution")).transpose()
    }
}

/// The space a command samples: the one given on the command line, or the
/// one the subbase file names.
fn sample_space(loaded: &LoadedSubbase, args: &SpaceArgs) -> Result<SpaceModel> {
    let model = match (args.name()?, args.resolution()?) {
        (None, None) => loaded.model.clone(),
        (None, Some(r)) => builtin_space(&loaded.space, &r)?,
        (Some(name), r) => {
            let r = r.unwrap_or_else(|| name.default_resolution());
            builtin_space(&name, &r)?
        }
    };
    check_domain(&loaded.subbase, &model)?;
    Ok(model)
}

fn check_depth(loaded: &LoadedSubbase, depth: usize) -> Result<()> {
    if depth > loaded.subbase.len() {
        return Err(Error::IndexOutOfRange {
            index: depth - 1,
            len: loaded.subbase.len(),
        });
    }
    Ok(())
}

pub fn build(
    args: &SpaceArgs,
    params: BuilderParams,
    out: &Path,
    log: Option<&Path>,
    threads: usize,
) -> Result<Outcome> {
    let name = args
        .name()?
        .ok_or_else(|| Error::InvalidParams("build needs --space or --space-file".into()))?;
    let resolution = args.resolution()?.unwrap_or_else(|| name.default_resolution());
    let model = builtin_space(&name, &resolution)?;
    eprintln!(
        "# dyadic build space={name} resolution={} pairs={} strong={} seed={} avoid_margin={} max_retries={} threads={threads}",
        model.resolution(),
        params.count,
        params.strong,
        params.rng_seed,
        params.avoid_margin,
        params.max_retries,
    );
    let built = build_subbase(&model, &params)?;
    SubbaseFile::from_build(&name, model.resolution(), &built).save(out)?;
    if let Some(path) = log {
        let mut text = built.log_lines().join("\n");
        text.push('\n');
        write_text(path, &text)?;
    }
    for cut in &built.cuts {
        println!(
            "pair {:>3}: centre {} in {}, level {} ({} values avoided, {} draws rejected)",
            cut.n,
            cut.centre,
            cut.interval,
            cut.level,
            cut.avoid.len(),
            cut.retries
        );
    }
    let sep = separation(&built.subbase, &model, built.subbase.len())?;
    println!(
        "separated {} of {} sample pairs{}",
        sep.pairs_separated,
        sep.pairs_total,
        if sep.complete() {
            ""
        } else {
            " (more pairs needed to reach the sample resolution)"
        }
    );
    println!("wrote {}", out.display());
    Ok(Outcome::Success)
}

pub fn encode(subbase: &Path, point: &str, depth: usize) -> Result<Outcome> {
    let loaded = load_subbase(subbase)?;
    check_depth(&loaded, depth)?;
    let x = parse_point(point)?;
    loaded.model.validate_point(&x)?;
    println!("{}", loaded.subbase.phi(&x, depth)?);
    Ok(Outcome::Success)
}

fn label(s: &dyadic_core::BottomedSeq) -> String {
    if s.is_empty() {
        "ε".to_string()
    } else {
        s.to_string()
    }
}

pub fn kslice(subbase: &Path, space: &SpaceArgs, depth: usize, dot: Option<&Path>, threads: usize) -> Result<Outcome> {
    let loaded = load_subbase(subbase)?;
    check_depth(&loaded, depth)?;
    let model = sample_space(&loaded, space)?;
    eprintln!(
        "# dyadic kslice subbase={} space={} resolution={} depth={depth} threads={threads}",
        subbase.display(),
        model.name(),
        model.resolution()
    );
    let slice = enumerate_k(&loaded.subbase, &model, depth)?;
    println!(
        "{} elements of length at most {depth} from {} samples at resolution {}",
        slice.len(),
        model.len(),
        model.resolution()
    );
    for s in slice.elements() {
        println!("{}", label(s));
    }
    if let Some(path) = dot {
        write_text(path, &slice.to_dot())?;
    }
    Ok(Outcome::Success)
}

fn outcome(report: &CheckReport) -> Outcome {
    if report.passed() {
        Outcome::Success
    } else {
        Outcome::CheckFailed
    }
}

pub fn check(args: &CheckArgs, strong: bool, threads: usize) -> Result<Outcome> {
    let loaded = load_subbase(&args.subbase)?;
    check_depth(&loaded, args.depth)?;
    let model = sample_space(&loaded, &args.space)?;
    let delta = match &args.delta {
        Some(d) => parse_q(d, "delta")?,
        None => model.resolution() * Q::from_integer(2),
    };
    eprintln!(
        "# dyadic {} subbase={} space={} resolution={} depth={} delta={delta} threads={threads}",
        if strong { "check-strong" } else { "check-proper" },
        args.subbase.display(),
        model.name(),
        model.resolution(),
        args.depth,
    );
    let report = if strong {
        check_strong_proper(&loaded.subbase, &model, args.depth, &delta)?
    } else {
        check_proper(&loaded.subbase, &model, args.depth, &delta)?
    };
    print!("{report}");
    if let Some(path) = &args.json {
        write_json(path, &report.to_json())?;
    }
    Ok(outcome(&report))
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = vec![perm.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
        out.push(perm.clone());
    }
}

pub fn check_cusl(
    subbase: &Path,
    space: &SpaceArgs,
    depth: usize,
    permutations: usize,
    exhaustive: bool,
    seed: u64,
    threads: usize,
) -> Result<Outcome> {
    let loaded = load_subbase(subbase)?;
    check_depth(&loaded, depth)?;
    let model = sample_space(&loaded, space)?;
    eprintln!(
        "# dyadic check-cusl subbase={} space={} resolution={} depth={depth} permutations={} seed={seed} threads={threads}",
        subbase.display(),
        model.name(),
        model.resolution(),
        if exhaustive { "all".to_string() } else { permutations.to_string() },
    );
    let perms = if exhaustive {
        all_permutations(depth)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let identity: Vec<usize> = (0..depth).collect();
        let mut perms = vec![identity.clone()];
        for _ in 0..permutations {
            let mut p = identity.clone();
            p.shuffle(&mut rng);
            perms.push(p);
        }
        perms
    };
    let mut failures = 0;
    for perm in &perms {
        let permuted = loaded.subbase.permute(perm)?;
        let slice = enumerate_k(&permuted, &model, depth)?;
        match is_cusl(&slice) {
            CuslVerdict::Cusl => println!("{perm:?}: cusl ({} elements)", slice.len()),
            CuslVerdict::NotCusl {
                left,
                right,
                minimal_upper_bounds,
            } => {
                failures += 1;
                let bounds: Vec<String> = minimal_upper_bounds.iter().map(label).collect();
                println!(
                    "{perm:?}: NOT a cusl: {} and {} have minimal upper bounds {}",
                    label(&left),
                    label(&right),
                    bounds.join(", ")
                );
            }
        }
    }
    println!("{} of {} enumerations fail", failures, perms.len());
    Ok(if failures == 0 {
        Outcome::Success
    } else {
        Outcome::CheckFailed
    })
}
