//! Random-packet check of `F(τ) = 1 ⇔ C(τ/2) = 1` on chains and on lattices
//! with a general site symmetry.

use std::f64::consts::FRAC_PI_2;

use clap::Args;
use mirrorqst::lab::scan_grid;
use mirrorqst::{
    build_couplings, build_hamiltonian, diagonalize, evolve, fidelity_at, mirror_mode_concurrence,
    reflection_permutation, ChainSpec, CouplingFamily, Error, Hamiltonian, Result, SpectralDecomposition,
    SymmetryPermutation, WavePacket,
};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::{pretty, Context, Verdict};

const DEFAULT_TOL: f64 = 1e-8;

#[derive(Args)]
pub struct TheoremArgs {
    /// Random real packets per model.
    #[arg(long, default_value_t = 100)]
    packets: usize,
    #[arg(long, default_value_t = 8)]
    seed: u64,
    /// Grid intervals on [0, 2τ] for the converse scan.
    #[arg(long, default_value_t = 1000)]
    steps: usize,
}

struct Model {
    label: String,
    decomp: SpectralDecomposition,
    symmetry: SymmetryPermutation,
    tau: f64,
}

fn chain(spec: ChainSpec) -> Result<Model> {
    Ok(Model {
        label: format!("{:?} N={}", spec.family(), spec.n_sites()),
        decomp: diagonalize(&build_hamiltonian(&build_couplings(&spec)?))?,
        symmetry: reflection_permutation(spec.n_sites())?,
        tau: spec.characteristic_time()?,
    })
}

fn models(rng: &mut ChaCha8Rng) -> Result<Vec<Model>> {
    let mut out = Vec::new();
    for n in [3, 4, 5, 8, 16] {
        out.push(chain(ChainSpec::christandl(n)?)?);
    }
    for k in [1, 4] {
        for n in [4, 8] {
            out.push(chain(ChainSpec::new(n, 1.0, CouplingFamily::KFamily { k })?)?);
        }
    }
    for (m, l) in [(1, 1), (1, 2), (2, 1), (2, 3)] {
        for n in [4, 8, 16] {
            out.push(chain(ChainSpec::new(n, 1.0, CouplingFamily::MlFamily { m, l })?)?);
        }
    }

    let spec = ChainSpec::new(8, 1.0, CouplingFamily::MlFamily { m: 1, l: 2 })?;
    let mut relabel: Vec<usize> = (0..8).collect();
    relabel.shuffle(rng);
    let h = build_hamiltonian(&build_couplings(&spec)?).permuted(&relabel)?;
    out.push(Model {
        label: format!("relabelled MlFamily m=1 l=2 N=8 {relabel:?}"),
        decomp: diagonalize(&h)?,
        symmetry: reflection_permutation(8)?.conjugated(&relabel)?,
        tau: spec.characteristic_time()?,
    });

    let a = build_hamiltonian(&build_couplings(&ChainSpec::christandl(4)?)?);
    let b = build_hamiltonian(&build_couplings(&ChainSpec::christandl(3)?)?);
    out.push(Model {
        label: "4x3 Christandl product lattice".into(),
        decomp: diagonalize(&Hamiltonian::product_lattice(&a, &b)?)?,
        symmetry: SymmetryPermutation::product(&reflection_permutation(4)?, &reflection_permutation(3)?)?,
        tau: FRAC_PI_2,
    });
    Ok(out)
}

fn random_real_packet(rng: &mut impl Rng, n: usize) -> Result<WavePacket> {
    loop {
        let v: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
        if v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-2 {
            return WavePacket::normalized(v);
        }
    }
}

pub fn run(ctx: &Context, args: &TheoremArgs) -> Result<Verdict> {
    if args.steps == 0 {
        return Err(Error::config("--steps", "must be at least 1"));
    }
    let tol = ctx.tol.unwrap_or(DEFAULT_TOL);
    // F(2t) is a square of the amplitude C controls, so it gets a looser bound.
    let converse_tol = 10.0 * tol;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut cases = Vec::new();
    let mut all_hold = true;
    for model in models(&mut rng)? {
        let n = model.decomp.n_sites();
        let s = &model.symmetry;
        let paired = s.fixed_points().next().is_none();
        let grid: Vec<f64> = (0..=args.steps)
            .map(|i| 2.0 * model.tau * i as f64 / args.steps as f64)
            .collect();
        let (mut worst_f, mut worst_c, mut worst_converse) = (0.0f64, 0.0f64, 0.0f64);
        let (mut hits, mut violations, mut unpaired_misses) = (0usize, 0usize, 0usize);
        for _ in 0..args.packets {
            let psi = random_real_packet(&mut rng, n)?;
            let f = fidelity_at(&model.decomp, &psi, s, model.tau)?;
            let c = mirror_mode_concurrence(&evolve(&model.decomp, &psi, 0.5 * model.tau)?, s)?.mmc;
            worst_f = worst_f.max((f - 1.0).abs());
            worst_c = worst_c.max((c - 1.0).abs());
            for row in scan_grid(&model.decomp, &psi, s, &grid, ctx.threads)?.rows() {
                if (row.mmc - 1.0).abs() > tol {
                    continue;
                }
                let defect = (fidelity_at(&model.decomp, &psi, s, 2.0 * row.t)? - 1.0).abs();
                if !paired {
                    unpaired_misses += usize::from(defect > converse_tol);
                    continue;
                }
                hits += 1;
                worst_converse = worst_converse.max(defect);
                violations += usize::from(defect > converse_tol);
            }
        }
        let holds = worst_f <= tol && worst_c <= tol && violations == 0 && (hits > 0 || !paired || args.packets == 0);
        all_hold &= holds;
        log::info!("{}: holds = {holds}", model.label);
        cases.push(json!({
            "model": model.label,
            "n_sites": n,
            "tau": model.tau,
            "fixed_points": s.fixed_points().map(|j| j + 1).collect::<Vec<_>>(),
            "max_fidelity_defect": worst_f,
            "max_mmc_defect": worst_c,
            "converse": {
                "checked": paired,
                "hits": hits,
                "max_fidelity_defect": worst_converse,
                "violations": violations,
                "unpaired_misses": unpaired_misses,
            },
            "holds": holds,
        }));
    }
    let doc = json!({
        "holds": all_hold,
        "seed": args.seed,
        "packets": args.packets,
        "steps": args.steps,
        "tolerance": tol,
        "converse_tolerance": converse_tol,
        "cases": cases,
    });
    ctx.write("theorem.json", &pretty(&doc))?;
    Ok(if all_hold { Verdict::Holds } else { Verdict::Fails })
}
