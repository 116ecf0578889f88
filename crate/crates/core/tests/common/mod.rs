//! Property checks shared by the proptest suites and the acceptance run.
//! Each returns `Err` with a description of the first counterexample.

#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use patseq::catalog::Catalog;
use patseq::edk::{Edk, EdkMode, Series};
use patseq::kita::{apply_dge, apply_dgd, dgd_groups, foc_layout, Kita};
use patseq::planted::{self, Planted};
use patseq::predictor;
use patseq::search::{minimal_prefix_solve, replay, select_mdl, solve, Mode, SearchConfig, Solution, Status};
use patseq::triangle::Growth;
use patseq::value::Value;

pub fn ints(v: &[i64]) -> Vec<Value> {
    v.iter().map(|&x| Value::int(x)).collect()
}

pub fn strings(v: &[Value]) -> Vec<String> {
    v.iter().map(Value::to_string).collect()
}

pub fn planted_config(depth: usize) -> SearchConfig {
    let mut cfg = SearchConfig::new(Arc::new(Catalog::with(&planted::alphabet())), Mode::S1Z, depth);
    cfg.budget.max_time = None;
    cfg
}

/// Rebuilding a table element by element gives the same rows, each row
/// telescopes onto the one below, and pushing the next cell of any row
/// reproduces the next base element.
pub fn edk_rebuild_and_telescoping(values: &[i64], mode: EdkMode) -> Result<(), String> {
    let base = ints(values);
    if mode == EdkMode::Ratios && base.iter().any(Value::is_zero) {
        return Ok(());
    }
    let n = base.len();
    let Ok(short) = Edk::from_values(base[..n - 1].to_vec(), mode, None) else {
        return Ok(());
    };
    let Ok(full) = Edk::from_values(base.clone(), mode, None) else {
        return Ok(());
    };
    let g = Growth::from_values(mode, &base).ok_or("growth failed on a buildable table")?;
    for (j, row) in full.rows().iter().enumerate() {
        if g.row(j) != Some(row.as_slice()) {
            return Err(format!("row {j} differs after rebuild"));
        }
    }
    for j in 0..full.built_rows() {
        let (row, above) = (&full.rows()[j], &full.rows()[j + 1]);
        let ok = match mode {
            EdkMode::Differences => {
                let sum = above.iter().try_fold(Value::zero(), |acc, v| acc.checked_add(v));
                sum == row.last().unwrap().checked_sub(&row[0])
            }
            EdkMode::Ratios => {
                let prod = above.iter().try_fold(Value::one(), |acc, v| acc.checked_mul(v));
                prod == row.last().unwrap().checked_div(&row[0])
            }
        };
        if !ok {
            return Err(format!("row {} does not telescope onto row {j}", j + 1));
        }
    }
    for j in 0..n - 1 {
        if short.row(j).is_none() || full.row(j).is_none() {
            continue;
        }
        let mut g = Growth::from_edk(&short);
        let next = full.rows()[j].last().unwrap().clone();
        if g.push_at_row(j, next) != Some(base[n - 1].clone()) {
            return Err(format!("push at row {j} does not reproduce the last element"));
        }
    }
    Ok(())
}

/// The planted pattern (or a cheaper one) is found on the full series.
pub fn planted_is_solved(p: &Planted) -> Result<(), String> {
    let series = p.series();
    let out = solve(&series, &planted_config(p.steps.len()));
    let sol = out
        .solutions
        .first()
        .ok_or_else(|| format!("unsolved: {:?} on {}", p.steps, series))?;
    if sol.cost() > p.steps.len().max(1) {
        return Err(format!("cost {} above planted {:?}", sol.cost(), p.steps));
    }
    Ok(())
}

/// Every constant table rests on at least two cells. A single top cell
/// that happens to be zero fits a polynomial of maximal degree, which
/// predicts nothing in particular.
pub fn determined(sol: &Solution) -> bool {
    sol.levels.last().unwrap().entries.iter().all(|e| match e.status {
        Status::Constant(k0) => e.edk.len() >= k0 + 2,
        _ => true,
    })
}

/// Predictions of a solution, appended to the series, are solved by the
/// same kitas and predicted again from every intermediate length. For
/// determined solutions the predictions must also be the planted
/// continuation.
pub fn predictions_round_trip(p: &Planted) -> Result<(), String> {
    let cfg = planted_config(p.steps.len());
    let Some(sol) = replay(&p.series(), &p.steps, &cfg) else {
        // The prefix may be too short for a leaf; nothing to compare.
        return Ok(());
    };
    let extra = p.values.len() - p.len;
    let pred = predictor::extend(&sol, extra).values;
    if determined(&sol) && pred != p.values[p.len..] {
        return Err(format!(
            "{:?} on {}: predicted {:?}, expected {:?}",
            p.steps,
            p.series(),
            strings(&pred),
            strings(&p.values[p.len..])
        ));
    }
    let mut values = p.series().values().to_vec();
    for (k, v) in pred.iter().enumerate() {
        values.push(v.clone());
        let longer = Series::new(values.clone()).unwrap();
        let again = replay(&longer, &p.steps, &cfg)
            .ok_or_else(|| format!("{:?} no longer solves {} plus {} predictions", p.steps, p.series(), k + 1))?;
        let rest = predictor::extend(&again, pred.len() - k - 1).values;
        if determined(&again) && rest != pred[k + 1..] {
            return Err(format!("{:?} on {}: predictions {:?} drift to {:?} after appending {}", p.steps, p.series(), strings(&pred), strings(&rest), k + 1));
        }
    }
    Ok(())
}

/// FOC subseries partition the base: positions are a permutation of
/// `0..n`, so the element multiset is preserved.
pub fn foc_partition(skip: usize, parts: &[usize], n: usize) -> Result<(), String> {
    let sd: usize = parts.iter().sum();
    if skip > sd || skip + sd > n {
        return Ok(());
    }
    let mut all: Vec<usize> = foc_layout(skip, parts, n).into_iter().flatten().collect();
    all.sort_unstable();
    if all != (0..n).collect::<Vec<_>>() {
        return Err(format!("FOC({skip},{parts:?}) over {n} is not a partition: {all:?}"));
    }
    let base: Vec<Value> = (0..n as i64).map(|i| Value::int(i * i % 7)).collect();
    let edk = Edk::from_values(base.clone(), EdkMode::Differences, None).unwrap();
    let kita = Kita::Foc { skip, parts: parts.to_vec() };
    if let Ok(r) = patseq::kita::apply(&kita, &edk, &Default::default()) {
        let mut got: Vec<String> = r.children().iter().flat_map(|c| strings(c.base())).collect();
        let mut want = strings(&base);
        got.sort();
        want.sort();
        if got != want {
            return Err(format!("FOC({skip},{parts:?}) changed the element multiset"));
        }
    }
    Ok(())
}

/// DGE children expand back to the base; DGD groups concatenate back.
pub fn dge_dgd_reconstruct(values: &[i64]) -> Result<(), String> {
    let base = ints(values);
    let Ok(edk) = Edk::from_values(base.clone(), EdkMode::Differences, None) else {
        return Ok(());
    };
    if let Ok(c) = apply_dge(&edk, 1e-9) {
        let mut back = Vec::new();
        for (v, l) in c[0].base().iter().zip(c[1].base()) {
            let l = l.to_string().parse::<usize>().map_err(|e| e.to_string())?;
            back.extend(std::iter::repeat(v.clone()).take(l));
        }
        if back != base {
            return Err(format!("DGE does not reconstruct {values:?}"));
        }
    }
    if let Ok(c) = apply_dgd(&edk, 1e-9) {
        let (distinct, lens) = dgd_groups(&base, 1e-9).ok_or("DGD applied without groups")?;
        if c[0].base() != distinct.as_slice() {
            return Err("DGD distinct child differs from the groups".into());
        }
        let back: Vec<Value> = lens.iter().flat_map(|&l| distinct[..l].iter().cloned()).collect();
        if back != base {
            return Err(format!("DGD does not reconstruct {values:?}"));
        }
    }
    Ok(())
}

/// MDL selection does not depend on the order solutions are listed in.
pub fn mdl_permutation_invariant(series: &Series, catalog: &Catalog, perm_seed: u64) -> Result<(), String> {
    let mut cfg = SearchConfig::new(Arc::new(catalog.clone()), Mode::N1Z, 2);
    cfg.budget.max_time = None;
    let out = solve(series, &cfg);
    let Some(best) = select_mdl(&out.solutions, catalog) else {
        return Ok(());
    };
    let mut shuffled: Vec<Solution> = out.solutions.clone();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(perm_seed));
    let again = select_mdl(&shuffled, catalog).unwrap();
    if again.pattern() != best.pattern() || again.discovery != best.discovery {
        return Err(format!("{} vs {} after shuffling", again.pattern(), best.pattern()));
    }
    Ok(())
}

/// Appending a solution's own predictions does not change what is found.
pub fn prefix_stable(series: &Series, cfg: &SearchConfig, extra: usize) -> Result<(), String> {
    let Ok(found) = minimal_prefix_solve(series, cfg) else {
        return Ok(());
    };
    let sol = &found.solution;
    let held = series.len() - sol.n_e();
    let ext = predictor::extend(sol, held + extra).values;
    if ext.len() < held + extra {
        return Ok(());
    }
    let mut longer = series.values().to_vec();
    longer.extend(ext[held..].iter().cloned());
    let longer = Series::new(longer).unwrap();
    let again = minimal_prefix_solve(&longer, cfg).map_err(|e| format!("{series}: lost after extension: {e}"))?;
    if again.solution.pattern() != sol.pattern() || again.solution.n_e() != sol.n_e() {
        return Err(format!(
            "{series}: {} at {} became {} at {}",
            sol.pattern(),
            sol.n_e(),
            again.solution.pattern(),
            again.solution.n_e()
        ));
    }
    Ok(())
}
