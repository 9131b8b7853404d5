use std::collections::VecDeque;
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use epskit::ciphers::{
    build_compress_encrypt_pad, build_one_time_pad, build_partition_from_spec, decrypt, encrypt,
    huffman_code, induced_joint, psi_exact, psi_floor, shannon_code, CipherSpec,
};
use epskit::formats::{parse_cipher, parse_dist, parse_joint, write_cipher, write_extraction_plan};
use epskit::prob::{entropy, FiniteDist, JointSystem};
use epskit::recycle::{build_example2, build_extraction, extraction_metrics, residual_contexts};
use epskit::tables::{render_table, table};
use epskit::tradeoff::{frontier_csv, sweep_csv, theta_sweep, tradeoff_frontier, FrontierBudget};
use epskit::verify::{cor2_bound, render_bounds, render_eps, verify_joint};

use crate::output::{emit, info, num, read, unit, CliResult, Kv};
use crate::{Format, Global, Scheme};

fn load_dist(path: &Path) -> CliResult<FiniteDist> {
    Ok(parse_dist(&read(path)?)?)
}

/// A joint file, or a cipher file reduced to its induced joint.
fn load_system(path: &Path) -> CliResult<JointSystem> {
    let text = read(path)?;
    if text.lines().any(|l| l.trim() == "[SOURCE]") {
        Ok(induced_joint(&parse_cipher(&text)?))
    } else {
        Ok(parse_joint(&text)?)
    }
}

fn json_out(g: &Global, value: &serde_json::Value) -> CliResult<()> {
    emit(g, &format!("{}\n", serde_json::to_string_pretty(value)?))
}

pub fn analyze(g: &Global, path: &Path) -> CliResult<u8> {
    let d = load_dist(path)?;
    let n = d.len();
    let h = entropy(&d);
    let pi = d.min_mass();
    let (floor_bound, log_inv) = cor2_bound(pi)?;
    let log_n = (n as f64).log2();
    if g.format == Format::Json {
        json_out(
            g,
            &json!({
                "support": n,
                "h_u": h,
                "min_mass": pi.to_string(),
                "max_mass": d.max_mass().to_string(),
                "log_support": log_n,
                "max_mass_bound": format!("1/{n}"),
                "floor_bound": floor_bound,
                "log_inverse_min_mass": log_inv,
                "uniform": d.is_uniform(),
            }),
        )?;
        return Ok(0);
    }
    let u = unit(g);
    let mut kv = Kv::default();
    kv.push("|U|", n.to_string());
    kv.push(format!("H(U) [{u}]"), info(g, h));
    kv.push("min mass pi", pi.to_string());
    kv.push("max mass", d.max_mass().to_string());
    kv.push(format!("H(X), H(R) >= log|U| [{u}]"), info(g, log_n));
    kv.push("max P_X, max P_R <=", format!("1/{n}"));
    kv.push(
        format!("min{{H(X),H(R)}} >= floor bound [{u}], when I(X;R)=0"),
        info(g, floor_bound),
    );
    kv.push(format!("log(1/pi) [{u}]"), info(g, log_inv));
    kv.push("max P_X, max P_R <= pi, when I(X;R)=0", pi.to_string());
    emit(g, &kv.render(g.format))?;
    Ok(0)
}

fn build_spec(source: &FiniteDist, scheme: Scheme, theta: Option<u64>, arity: u32) -> CliResult<CipherSpec> {
    Ok(match scheme {
        Scheme::Otp => build_one_time_pad(source),
        Scheme::Partition => {
            let code = match theta {
                Some(t) => psi_floor(source, t)?,
                None => psi_exact(source)?,
            };
            build_partition_from_spec(source, &code)?
        }
        Scheme::CepHuffman => build_compress_encrypt_pad(source, &huffman_code(source, arity)?)?,
        Scheme::CepShannon => build_compress_encrypt_pad(source, &shannon_code(source, arity)?)?,
    })
}

pub fn build(g: &Global, scheme: Scheme, theta: Option<u64>, arity: u32, path: &Path) -> CliResult<u8> {
    let source = load_dist(path)?;
    let spec = build_spec(&source, scheme, theta, arity)?;
    let joint = induced_joint(&spec);
    let rep = verify_joint(&joint)?;
    let i = &rep.info;
    let cipher = write_cipher(&spec)?;
    if g.format == Format::Json {
        let body = json!({
            "scheme": spec.scheme(),
            "key_size": spec.key().len(),
            "ciphertext_size": spec.x_labels().len(),
            "eps": rep.eps.is_eps(),
            "info": i,
            "metrics": rep.metrics,
            "cipher": cipher,
        });
        json_out(g, &body)?;
        return Ok(if rep.eps.is_eps() { 0 } else { 1 });
    }
    let u = unit(g);
    let mut kv = Kv::default();
    kv.push("scheme", spec.scheme());
    kv.push("|R|", spec.key().len().to_string());
    kv.push("|X|", spec.x_labels().len().to_string());
    kv.push("EPS", if rep.eps.is_eps() { "yes" } else { "no" });
    kv.push(format!("H(U) [{u}]"), info(g, i.h_u));
    kv.push(format!("H(X) [{u}]"), info(g, i.h_x));
    kv.push(format!("H(R) [{u}]"), info(g, i.h_r));
    kv.push(format!("I(R;UX) consumption [{u}]"), info(g, i.i_r_uxjoint));
    kv.push(format!("H(R|UX) residual [{u}]"), info(g, i.h_r_given_ux));
    kv.push(format!("I(R;X) excess [{u}]"), info(g, i.i_xr));
    if g.out.is_some() {
        emit(g, &cipher)?;
        print!("{}", kv.render(g.format));
    } else {
        print!("{cipher}{}", kv.render_comment());
    }
    Ok(if rep.eps.is_eps() { 0 } else { 1 })
}

pub fn verify(g: &Global, path: &Path) -> CliResult<u8> {
    let joint = load_system(path)?;
    let rep = verify_joint(&joint)?;
    let status = if rep.all_ok() { 0 } else { 1 };
    if g.format == Format::Json {
        json_out(g, &serde_json::to_value(&rep)?)?;
    } else {
        let mut out = render_eps(&rep.eps);
        for b in &rep.bounds {
            out.push_str(&render_bounds(b));
        }
        for (regime, why) in &rep.skipped {
            out.push_str(&format!("SKIP\t[{regime}]\t{why}\n"));
        }
        let u = unit(g);
        let i = &rep.info;
        for (name, v) in [
            ("H(U)", i.h_u),
            ("H(X)", i.h_x),
            ("H(R)", i.h_r),
            ("I(U;X)", i.i_ux),
            ("H(U|RX)", i.h_u_given_rx),
            ("I(U;R)", i.i_ur),
            ("I(R;UX)", i.i_r_uxjoint),
            ("H(R|UX)", i.h_r_given_ux),
            ("I(R;X)", i.i_xr),
        ] {
            out.push_str(&format!("VALUE\t{name}\t{}\t{u}\n", info(g, v)));
        }
        out.push_str(&format!("RESULT\t{}\n", if status == 0 { "PASS" } else { "FAIL" }));
        emit(g, &out)?;
    }
    if status != 0 {
        for name in rep.eps.failed_constraints() {
            eprintln!("violated: {name}");
        }
        for b in &rep.bounds {
            for c in b.failed() {
                eprintln!("violated: [{}] {}", b.regime, c.name);
            }
        }
    }
    Ok(status)
}

/// Integer weights proportional to the masses, for sampling.
fn weights(d: &FiniteDist) -> Vec<u64> {
    let lcm = epskit::prob::rational::lcm_of_denominators(d.masses());
    d.masses()
        .iter()
        .map(|p| {
            let w = p.numer() * (&lcm / p.denom());
            u64::try_from(w).expect("denominators fit in u64")
        })
        .collect()
}

pub fn simulate(g: &Global, rounds: usize, pool_bits: usize) -> CliResult<u8> {
    let ex = build_example2(2)?;
    let spec = &ex.spec;
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let sampler = WeightedIndex::new(weights(spec.source())).expect("positive weights");
    let mut pool: VecDeque<u8> = (0..pool_bits).map(|_| rng.gen_range(0..2u8)).collect();
    let mut out = String::from("round\tu\tkey\tx\tbits_used\tbits_returned\tpool\n");
    let mut used_total = 0usize;
    let mut played = 0usize;
    let mut errors = 0usize;
    for round in 1..=rounds {
        if pool.len() < 2 {
            break;
        }
        let k0 = pool.pop_front().expect("len checked");
        let k1 = pool.pop_front().expect("len checked");
        let r = (k0 as usize) << 1 | k1 as usize;
        let u = sampler.sample(&mut rng);
        let aux = if spec.aux_size(u, r)? > 1 { rng.gen_range(0..2) } else { 0 };
        let x = encrypt(spec, u, r, aux)?;
        if decrypt(spec, x, r)? != u {
            errors += 1;
        }
        let residual = ex.residual(u, r, aux);
        let back: Vec<u8> = residual
            .chars()
            .filter_map(|c| c.to_digit(2).map(|d| d as u8))
            .collect();
        let used = 2 - back.len();
        debug_assert_eq!(used as u32, ex.bits_consumed(u));
        for b in back.iter().rev() {
            pool.push_front(*b);
        }
        used_total += used;
        played += 1;
        out.push_str(&format!(
            "{round}\t{}\t{}\t{}\t{used}\t{}\t{}\n",
            spec.source().labels()[u],
            spec.key().labels()[r],
            spec.x_labels()[x],
            back.len(),
            pool.len()
        ));
    }
    let mean = if played == 0 { 0.0 } else { used_total as f64 / played as f64 };
    let mut kv = Kv::default();
    kv.push("seed", g.seed.to_string());
    kv.push("rounds played", played.to_string());
    kv.push("key bits used", used_total.to_string());
    kv.push("mean bits per round", num(g, mean));
    kv.push("expected bits per round", ex.expected_consumption().to_string());
    kv.push("pool left", pool.len().to_string());
    kv.push("decoding errors", errors.to_string());
    if g.format == Format::Json {
        json_out(
            g,
            &json!({
                "seed": g.seed,
                "rounds": played,
                "bits_used": used_total,
                "mean_bits": mean,
                "expected_bits": ex.expected_consumption().to_string(),
                "pool_left": pool.len(),
                "decoding_errors": errors,
                "ledger": out,
            }),
        )?;
    } else {
        emit(g, &format!("{out}{}", kv.render_comment()))?;
    }
    Ok(if errors == 0 { 0 } else { 1 })
}

pub fn recycle(g: &Global, target: &Path, single: bool, input: &Path) -> CliResult<u8> {
    let target = load_dist(target)?;
    let (contexts, ctx_weights) = if single {
        let d = load_dist(input)?;
        (vec![("residual".to_string(), d)], FiniteDist::point("residual"))
    } else {
        residual_contexts(&load_system(input)?)?
    };
    let plan = build_extraction(&target, &contexts)?;
    let m = extraction_metrics(&plan, &ctx_weights)?;
    let ok = m.newkey2 && m.newkey3 != Some(false) && plan.target_matches();
    let u = unit(g);
    if g.format == Format::Json {
        json_out(
            g,
            &json!({ "metrics": m, "target_matches": plan.target_matches(), "plan": write_extraction_plan(&plan) }),
        )?;
        return Ok(if ok { 0 } else { 1 });
    }
    let mut kv = Kv::default();
    kv.push("contexts", plan.contexts.len().to_string());
    kv.push(format!("H(S) [{u}]"), info(g, m.h_s));
    kv.push(format!("H(R|context) residual [{u}]"), info(g, m.residual));
    kv.push(format!("H(A|R,context) [{u}]"), info(g, m.h_a_given_r));
    kv.push(format!("gain H(S)-H(A|R) [{u}]"), info(g, m.gain));
    kv.push("max target < min residual", yes_no(m.precondition));
    kv.push("induced P_S equals target", yes_no(plan.target_matches()));
    kv.push("gain <= residual", yes_no(m.newkey2));
    kv.push(
        "gain >= residual - 1",
        match m.newkey3 {
            Some(b) => yes_no(b).to_string(),
            None => "not tested (precondition unmet)".to_string(),
        },
    );
    kv.push("max residual values per key value", m.max_preimages.to_string());
    let plan_text = write_extraction_plan(&plan);
    if g.out.is_some() {
        emit(g, &plan_text)?;
        print!("{}", kv.render(g.format));
    } else {
        print!("{plan_text}{}", kv.render_comment());
    }
    Ok(if ok { 0 } else { 1 })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn scale(g: &Global, bits: f64) -> f64 {
    match g.base {
        crate::LogBase::Two => bits,
        crate::LogBase::E => bits * std::f64::consts::LN_2,
    }
}

pub fn sweep(g: &Global, thetas: &[u64], path: &Path) -> CliResult<u8> {
    let source = load_dist(path)?;
    let mut rows = theta_sweep(&source, thetas)?;
    for r in &mut rows {
        r.consumption = scale(g, r.consumption);
        r.divergence = scale(g, r.divergence);
        r.h_x = scale(g, r.h_x);
    }
    if g.format == Format::Json {
        json_out(g, &serde_json::to_value(&rows)?)?;
    } else {
        emit(g, &sweep_csv(&rows, g.precision))?;
    }
    Ok(0)
}

pub fn frontier(g: &Global, grid: &[f64], max_theta: u64, max_matrix: usize, path: &Path) -> CliResult<u8> {
    let source = load_dist(path)?;
    let mut pts = tradeoff_frontier(
        &source,
        grid,
        FrontierBudget {
            max_theta,
            max_matrix,
        },
    )?;
    for p in &mut pts {
        p.gamma = scale(g, p.gamma);
        p.consumption = scale(g, p.consumption);
        p.h_x = scale(g, p.h_x);
    }
    if g.format == Format::Json {
        json_out(g, &serde_json::to_value(&pts)?)?;
    } else {
        emit(g, &frontier_csv(&pts, g.precision))?;
    }
    Ok(0)
}

pub fn tables(g: &Global, which: u8) -> CliResult<u8> {
    let rep = table(which)?;
    if g.format == Format::Json {
        json_out(g, &serde_json::to_value(&rep)?)?;
    } else {
        emit(g, &render_table(&rep))?;
    }
    if !rep.all_ok() {
        for r in rep.rows.iter().filter(|r| !r.ok) {
            eprintln!("golden diff: {} differs from the published row", r.scheme);
        }
        return Ok(1);
    }
    Ok(0)
}
