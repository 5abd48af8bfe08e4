use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::cache::Cache;
use super::dsl::{parse_group_expr, parse_words};
use super::report::{Check, Payload, Report, RunConfig};
use crate::ends::{ends, EndsEstimate, EndsParams, Strategy};
use crate::error::{Error, Result};
use crate::exactlin::IntMatrix;
use crate::fpgroup::{Presentation, Word};
use crate::grushko::{
    cp_lattice_classify, fbar_structure, hab_module_structure, kurosh, random_unimodular, schreier_basis_cyclic_cover,
    FreeProductDescriptor, LatticeData, SubgroupSpec,
};
use crate::modrep::{krull_schmidt, restricted_augmentation_check, star_sequence_check, FiniteGroup, GModule};

fn finish(
    cfg: &RunConfig,
    command: String,
    module: &str,
    input: &str,
    relevant: Value,
    f: impl FnOnce() -> Result<Payload>,
) -> Result<Report> {
    cfg.validate()?;
    let cache = match &cfg.cache_dir {
        Some(d) => Some(Cache::open(d)?),
        None => None,
    };
    let key = Cache::key(module, module, input, &relevant);
    if let Some(p) = cache.as_ref().and_then(|c| c.get(&key)) {
        return Ok(Report {
            command,
            config: cfg.echo(),
            payload: p,
            cached: true,
        });
    }
    let payload = match f() {
        Ok(p) => p,
        Err(Error::BudgetExceeded(b)) => Payload {
            result: json!({ "status": "inconclusive", "reason": format!("coset budget of {b} exceeded") }),
            checks: vec![],
            flags: vec!["inconclusive".into(), "budget-exceeded".into()],
        },
        Err(e) => return Err(e),
    };
    if let Some(c) = &cache {
        c.put(&key, &payload)?;
    }
    Ok(Report {
        command,
        config: cfg.echo(),
        payload,
        cached: false,
    })
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

pub fn ends_payload(expr: &str, cfg: &RunConfig, strategy: Strategy) -> Result<Payload> {
    let desc = parse_group_expr(expr)?.to_pro_p(cfg.p)?;
    let params = EndsParams {
        depth: cfg.depth,
        coset_budget: cfg.max_cosets,
        strategy,
    };
    let r = ends(&desc, &params)?;
    let mut result = to_json(&r);
    result["e_label"] = json!(r.e.label());
    let checks = vec![
        Check::new("colimit_monotone", r.monotone),
        Check::new("ends_arithmetic", r.arithmetic_holds()),
        Check::new("shift_invariance", r.shifted_e.is_none_or(|s| s == r.e)),
    ];
    let mut flags = Vec::new();
    if r.e == EndsEstimate::Inconclusive {
        flags.push("inconclusive".into());
    }
    if r.budget_hit {
        flags.push("budget-hit".into());
    }
    if r.catalog_unverified {
        flags.push("catalog-unverified".into());
    }
    if r.torsion {
        flags.push("torsion".into());
    }
    Ok(Payload { result, checks, flags })
}

pub fn run_ends(expr: &str, cfg: &RunConfig, strategy: Strategy) -> Result<Report> {
    let canon = parse_group_expr(expr)?.print();
    let relevant =
        json!({"p": cfg.p, "depth": cfg.depth, "max_cosets": cfg.max_cosets, "strategy": format!("{strategy:?}")});
    finish(cfg, format!("ends {canon}"), "ends", &canon, relevant, || {
        ends_payload(&canon, cfg, strategy)
    })
}

/// `a->1,b->1` or `a->1:0,b->0:1`; unnamed generators map to zero.
pub fn parse_kernel_spec(text: &str, pres: &Presentation) -> Result<Vec<Vec<u32>>> {
    let mut entries = Vec::new();
    let mut k = None;
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, img) = part
            .split_once("->")
            .ok_or_else(|| Error::Input(format!("kernel entry '{part}' is not of the form gen->value")))?;
        let name = name.trim();
        let g = pres.names().iter().position(|n| n == name).ok_or_else(|| {
            Error::Input(format!(
                "unknown generator '{name}' (generators: {})",
                pres.names().join(", ")
            ))
        })?;
        let v: Vec<u32> = img
            .split(':')
            .map(|x| {
                x.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Input(format!("bad kernel value '{x}'")))
            })
            .collect::<Result<_>>()?;
        if *k.get_or_insert(v.len()) != v.len() {
            return Err(Error::Input("kernel images have different lengths".into()));
        }
        entries.push((g, v));
    }
    let k = k.ok_or_else(|| Error::Input("empty kernel map".into()))?;
    let mut images = vec![vec![0; k]; pres.n_gens()];
    for (g, v) in entries {
        images[g] = v;
    }
    Ok(images)
}

pub enum SubgroupArg<'a> {
    Kernel { spec: &'a str, modulus: Option<u32> },
    Generators(&'a str),
}

pub fn kurosh_payload(expr: &str, h: &SubgroupArg, cfg: &RunConfig) -> Result<Payload> {
    let desc = parse_group_expr(expr)?.to_pro_p(cfg.p)?;
    let g = FreeProductDescriptor::from_descriptor(&desc)?;
    let pres = g.compile()?;
    let spec = match h {
        SubgroupArg::Kernel { spec, modulus } => SubgroupSpec::Kernel {
            modulus: modulus.unwrap_or(cfg.p),
            images: parse_kernel_spec(spec, &pres)?,
        },
        SubgroupArg::Generators(ws) => SubgroupSpec::Generators(parse_words(ws, pres.names())?),
    };
    let k = kurosh(&g, &spec, cfg.max_cosets)?;
    let mut result = to_json(&k);
    let names = pres.names();
    for (fi, f) in k.factors.iter().enumerate() {
        for (di, d) in f.double_cosets.iter().enumerate() {
            let slot = &mut result["factors"][fi]["double_cosets"][di];
            slot["representative"] = json!(d.representative.format(names));
            slot["intersection_gens"] = json!(d.intersection_gens.iter().map(|w| w.format(names)).collect::<Vec<_>>());
        }
    }
    result["generators"] = json!(names);
    result["s_g"] = json!(g.s());
    let total: usize = k.factors.iter().map(|f| f.count()).sum();
    let mut checks = vec![Check::new("double_coset_bound", total <= k.index * k.factors.len())];
    if let Some(ok) = k.rank_agrees() {
        checks.push(Check::new("kurosh_rank_equals_rs_rank", ok));
    }
    let mut flags = Vec::new();
    if k.torsion_caveat {
        flags.push("torsion-caveat".into());
    } else {
        checks.push(Check::new("s_h_index_formula", k.s_h == k.s_h_formula));
    }
    if g.untagged() {
        flags.push("untagged-factor".into());
    }
    Ok(Payload { result, checks, flags })
}

pub fn run_kurosh(expr: &str, h: &SubgroupArg, cfg: &RunConfig) -> Result<Report> {
    let canon = parse_group_expr(expr)?.print();
    let h_text = match h {
        SubgroupArg::Kernel { spec, modulus } => format!("kernel {spec} mod {}", modulus.unwrap_or(cfg.p)),
        SubgroupArg::Generators(w) => format!("generators {w}"),
    };
    let relevant = json!({"p": cfg.p, "max_cosets": cfg.max_cosets});
    finish(
        cfg,
        format!("kurosh {canon} --subgroup {h_text}"),
        "kurosh",
        &format!("{canon} | {h_text}"),
        relevant,
        || kurosh_payload(&canon, h, cfg),
    )
}

/// Build the module named by `spec` over the finite group `g`.
pub fn build_module(g: &Arc<FiniteGroup>, spec: &str) -> Result<GModule> {
    let (kind, arg) = spec.split_once(':').map_or((spec.trim(), ""), |(k, a)| (k.trim(), a));
    let sub = || -> Result<crate::modrep::Subgroup> {
        let words = parse_words(arg, g.presentation().names())?;
        g.subgroup(&words, None)
    };
    match kind {
        "augmentation" => Ok(GModule::augmentation_ideal(Arc::clone(g)).0),
        "regular" => Ok(GModule::regular(Arc::clone(g))),
        "trivial" => Ok(GModule::trivial(Arc::clone(g), 1)),
        "permutation" => {
            let s = sub()?;
            GModule::induce(&s, &GModule::trivial(Arc::clone(&s.group), 1))
        }
        "jideal" => GModule::j_ideal(&sub()?),
        "restricted-augmentation" => {
            let s = sub()?;
            GModule::augmentation_ideal(Arc::clone(g)).0.restrict(&s)
        }
        other => Err(Error::Input(format!(
            "unknown module '{other}' (augmentation, regular, trivial, permutation:<words>, jideal:<words>, restricted-augmentation:<words>)"
        ))),
    }
}

pub fn decompose_payload(group: &str, module: &str, cfg: &RunConfig) -> Result<Payload> {
    let desc = parse_group_expr(group)?.to_pro_p(cfg.p)?;
    let pres = desc.compile()?;
    let g = FiniteGroup::from_presentation(&pres, cfg.p, cfg.max_cosets)?;
    let m = build_module(&g, module)?;
    let rep = krull_schmidt(&m, &cfg.ks_options())?;
    let summands: Vec<Value> = rep
        .summands
        .iter()
        .map(|s| {
            json!({
                "dim": s.module.dim(),
                "multiplicity": s.multiplicity,
                "certificate": s.certificate.label(),
                "fixed_dim": s.module.invariants().dim(),
            })
        })
        .collect();
    let result = json!({
        "group_order": g.order(),
        "generators": pres.names(),
        "module": module,
        "dim": m.dim(),
        "fixed_dim": m.invariants().dim(),
        "components": rep.n_components(),
        "indecomposable": rep.is_indecomposable(),
        "exact": rep.all_exact(),
        "summands": summands,
    });
    let total: usize = rep.summands.iter().map(|s| s.multiplicity * s.module.dim()).sum();
    let checks = vec![
        Check::new("block_diagonal", rep.verify(&m)),
        Check::new("dimension_sum", total == m.dim()),
    ];
    let flags = if rep.all_exact() {
        vec![]
    } else {
        vec!["probabilistic".into()]
    };
    Ok(Payload { result, checks, flags })
}

pub fn run_decompose(group: &str, module: &str, cfg: &RunConfig) -> Result<Report> {
    let canon = parse_group_expr(group)?.print();
    let relevant = cfg.echo();
    finish(
        cfg,
        format!("decompose {canon} --module {module}"),
        "decompose",
        &format!("{canon} | {module}"),
        relevant,
        || decompose_payload(&canon, module, cfg),
    )
}

/// Rows separated by `;`, entries by `,` or whitespace.
pub fn parse_int_matrix(text: &str) -> Result<IntMatrix> {
    let rows: Vec<Vec<i64>> = text
        .split(';')
        .map(|r| {
            r.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|x| !x.is_empty())
                .map(|x| {
                    x.parse::<i64>()
                        .map_err(|_| Error::Input(format!("bad matrix entry '{x}'")))
                })
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<_>>()?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Input("σ must be a square matrix".into()));
    }
    Ok(IntMatrix::from_i64_rows(&rows))
}

pub enum LatticeArg<'a> {
    Sigma(&'a str),
    /// `Z[C_p]^a ⊕ I^b ⊕ Z^c` conjugated by a seeded random unimodular matrix
    Standard {
        a: usize,
        b: usize,
        c: usize,
    },
}

pub fn classify_payload(arg: &LatticeArg, cfg: &RunConfig) -> Result<Payload> {
    let m = match arg {
        LatticeArg::Sigma(s) => LatticeData::new(cfg.p, parse_int_matrix(s)?)?,
        LatticeArg::Standard { a, b, c } => {
            let m = LatticeData::standard(cfg.p, *a, *b, *c)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let (u, v) = random_unimodular(m.rank(), 3 * m.rank(), &mut rng);
            m.conjugate(&u, &v)
        }
    };
    let cls = cp_lattice_classify(&m)?;
    let mut result = to_json(&cls);
    result["sigma"] = json!(m.sigma.to_i64_rows());
    let mut checks = vec![Check::new("rank_equation", cls.invariants_hold())];
    if let LatticeArg::Standard { a, b, c } = arg {
        checks.push(Check::new("recovers_construction", cls.triple() == (*a, *b, *c)));
    }
    Ok(Payload {
        result,
        checks,
        flags: vec![],
    })
}

pub fn run_classify_lattice(arg: &LatticeArg, cfg: &RunConfig) -> Result<Report> {
    let input = match arg {
        LatticeArg::Sigma(s) => format!(
            "sigma {}",
            parse_int_matrix(s)?
                .to_i64_rows()
                .map_or(String::new(), |r| format!("{r:?}"))
        ),
        LatticeArg::Standard { a, b, c } => format!("standard {a},{b},{c} seed {}", cfg.seed),
    };
    let relevant = json!({"p": cfg.p, "seed": cfg.seed});
    finish(
        cfg,
        format!("classify-lattice {input}"),
        "grushko",
        &input,
        relevant,
        || classify_payload(arg, cfg),
    )
}

pub fn schreier_payload(r: usize, cfg: &RunConfig) -> Result<Payload> {
    let b = schreier_basis_cyclic_cover(r, cfg.p)?;
    let names = crate::fpgroup::word::default_names(r);
    let hab = hab_module_structure(r, cfg.p)?;
    let result = json!({
        "r": r,
        "rank": b.words.len(),
        "expected_rank": cfg.p as usize * (r - 1) + 1,
        "words": b.words.iter().map(|w| w.format(&names)).collect::<Vec<_>>(),
        "rs_words": b.rs_words.iter().map(|w| w.format(&names)).collect::<Vec<_>>(),
        "hab": to_json(&hab),
    });
    let checks = vec![
        Check::new("count", b.count_ok),
        Check::new("kernel", b.kernel_ok),
        Check::new("same_subgroup_as_rs", b.same_subgroup),
        Check::new("folded_rank", b.folded_rank == b.words.len()),
        Check::new("hab_structure", hab.triple() == (r - 1, 0, 1)),
    ];
    Ok(Payload {
        result,
        checks,
        flags: vec![],
    })
}

pub fn run_schreier(r: usize, cfg: &RunConfig) -> Result<Report> {
    let relevant = json!({"p": cfg.p});
    finish(
        cfg,
        format!("schreier {r}"),
        "grushko",
        &format!("schreier {r}"),
        relevant,
        || schreier_payload(r, cfg),
    )
}

fn expect_ends(expr: &str, p: u32, want: EndsEstimate, cfg: &RunConfig, checks: &mut Vec<Check>) {
    let c = RunConfig { p, ..cfg.clone() };
    match ends_payload(expr, &c, Strategy::Mixed) {
        Ok(pl) => {
            let got = pl.result["e"].clone();
            checks.push(Check::new(
                format!("ends[{expr}, p={p}] = {}", want.label()),
                got == json!(want),
            ));
            for ch in pl.checks {
                checks.push(Check::new(format!("ends[{expr}, p={p}] {}", ch.name), ch.pass));
            }
        }
        Err(_) => checks.push(Check::new(format!("ends[{expr}, p={p}]"), false)),
    }
}

/// The invariant suite of every module on a small catalog.
pub fn selftest_payload(cfg: &RunConfig) -> Result<Payload> {
    let mut checks = Vec::new();
    for p in [2u32, 3] {
        for k in 1..=3 {
            expect_ends(
                &format!("cyclic({})", p.pow(k)),
                p,
                EndsEstimate::Zero,
                cfg,
                &mut checks,
            );
        }
        expect_ends("Zp", p, EndsEstimate::Two, cfg, &mut checks);
        expect_ends("pres{a, b; [a, b]}", p, EndsEstimate::One, cfg, &mut checks);
    }
    expect_ends("cyclic(2) * cyclic(2)", 2, EndsEstimate::Two, cfg, &mut checks);
    expect_ends("free(2)", 2, EndsEstimate::InfinityEvidence, cfg, &mut checks);
    expect_ends("free(3)", 2, EndsEstimate::InfinityEvidence, cfg, &mut checks);

    for p in [2u32, 3, 5] {
        for r in 1..=4 {
            let c = RunConfig { p, ..cfg.clone() };
            let ok = schreier_payload(r, &c).is_ok_and(|pl| pl.checks.iter().all(|x| x.pass));
            checks.push(Check::new(format!("cyclic cover r={r} p={p}"), ok));
        }
    }
    for p in [2u32, 3] {
        for n in 1..=4 {
            let ok =
                fbar_structure(n, p).is_ok_and(|c| c.triple() == (0, n - 1, 0) && c.rank == (p as usize - 1) * (n - 1));
            checks.push(Check::new(format!("fbar n={n} p={p}"), ok));
        }
    }
    for p in [2u32, 3] {
        for r in 1..=3 {
            let g = FreeProductDescriptor::new(p, vec![], r)?;
            let mut first = vec![0u32; r];
            first[0] = 1;
            let mut specs = vec![
                (p, first.iter().map(|&x| vec![x]).collect::<Vec<_>>()),
                (p * p, first.iter().map(|&x| vec![x]).collect()),
                (2 * p, first.iter().map(|&x| vec![x]).collect()),
            ];
            if r >= 2 {
                specs.push((p, (0..r).map(|i| vec![u32::from(i == 0), u32::from(i == 1)]).collect()));
            }
            for (modulus, images) in specs {
                let ok = kurosh(&g, &SubgroupSpec::Kernel { modulus, images }, cfg.max_cosets).is_ok_and(|k| {
                    k.rank_agrees() == Some(true)
                        && k.s_h == k.index as i64 * (r as i64 - 1) + 1
                        && k.s_h == k.s_h_formula
                });
                checks.push(Check::new(format!("kurosh free({r}) p={p} modulus {modulus}"), ok));
            }
        }
    }
    let groups = [
        ("cyclic(4)", 2u32),
        ("finite{a, b; a^2, b^2, [a, b]}", 2),
        ("finite{a, b; a^4, b^2, b a b^-1 a}", 2),
        ("cyclic(9)", 3),
    ];
    for (text, p) in groups {
        let pres = parse_group_expr(text)?.to_pro_p(p)?.compile()?;
        let g = FiniteGroup::from_presentation(&pres, p, 256)?;
        let (ig, _) = GModule::augmentation_ideal(Arc::clone(&g));
        checks.push(Check::new(format!("{text}: dim I_G^G = 1"), ig.invariants().dim() == 1));
        checks.push(Check::new(
            format!("{text}: star sequence"),
            star_sequence_check(&g).unwrap_or(false),
        ));
        let sub = g.subgroup(&[Word::gen(0)], None)?;
        checks.push(Check::new(
            format!("{text}: Res_U I_G"),
            restricted_augmentation_check(&sub, &cfg.ks_options()).unwrap_or(false),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for (i, p) in [2u32, 3, 5].into_iter().cycle().take(9).enumerate() {
        let (a, b, c) = (i % 3, (i + 1) % 3, i % 2);
        let m = LatticeData::standard(p, a, b, c)?;
        let (u, v) = random_unimodular(m.rank(), 3 * m.rank(), &mut rng);
        let ok = cp_lattice_classify(&m.conjugate(&u, &v)).is_ok_and(|cls| cls.triple() == (a, b, c));
        checks.push(Check::new(format!("lattice ({a},{b},{c}) p={p}"), ok));
    }
    let passed = checks.iter().filter(|c| c.pass).count();
    let result = json!({"passed": passed, "total": checks.len()});
    Ok(Payload {
        result,
        checks,
        flags: vec![],
    })
}

pub fn run_selftest(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    Ok(Report {
        command: "selftest".into(),
        config: cfg.echo(),
        payload: selftest_payload(cfg)?,
        cached: false,
    })
}
