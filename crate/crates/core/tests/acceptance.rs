//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use camspmv::accel::{plan_tiles, spmspv, Accelerator};
use camspmv::cam::{CamRamArray, CompareKey};
use camspmv::config::AcceleratorConfig;
use camspmv::dse::{
    area_estimate, full_utilization_workload, modules_from_bandwidth, peak_performance,
    power_estimate, MemoryStyle, GPU_BASELINE_GFLOPS_PER_W,
};
use camspmv::sparse::{
    gen_random_csr_with, gen_random_vector, oracle_spmspv, CsrMatrix, SparseVector, ValueDist,
};
use camspmv::TechParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Random instance: `n <= 512`, density <= 5%, vector density up to 10%.
fn instance(rng: &mut ChaCha8Rng, dist: ValueDist) -> (CsrMatrix, SparseVector) {
    let n = rng.random_range(1..=512);
    let m = rng.random_range(1..=512);
    let density = rng.random_range(0.0..=0.05);
    let vdensity = rng.random_range(0.0..=0.10);
    let a = gen_random_csr_with(n, m, density, rng.random(), dist);
    let b = gen_random_vector(m, vdensity, rng.random(), dist);
    (a, b)
}

fn criterion_1_oracle_equivalence() -> Outcome {
    const TOL: f64 = 1e-12;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let mut runs = 0;
    for i in 0..240 {
        let integer = i % 2 == 1;
        let dist = if integer {
            ValueDist::SmallIntegers(9)
        } else {
            ValueDist::UniformSigned
        };
        let (a, b) = instance(&mut rng, dist);
        let oracle = oracle_spmspv(&a, &b).map_err(|e| e.to_string())?;
        for k in [1, 2, 4, 15] {
            for h in [8, 64, 512] {
                let (c, _) = spmspv(&a, &b, &AcceleratorConfig::with_geometry(k, h))
                    .map_err(|e| e.to_string())?;
                runs += 1;
                if integer {
                    ensure(c == oracle, format!("instance {i}, k={k}, h={h}: integer result differs"))?;
                    continue;
                }
                for j in 0..a.n_rows() {
                    let (x, y) = (c.get(j), oracle.get(j));
                    ensure(
                        (x - y).abs() <= TOL * (1.0 + y.abs()),
                        format!("instance {i}, k={k}, h={h}, row {j}: {x} vs {y}"),
                    )?;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(
        elapsed < Duration::from_secs(60),
        format!("took {elapsed:?}, limit 60 s"),
    )?;
    Ok(format!("240 instances x 12 configs = {runs} runs in {elapsed:.2?}"))
}

fn criterion_2_worked_example() -> Outcome {
    let mut module = CamRamArray::new(8, 5).map_err(|e| e.to_string())?;
    module
        .load_segment(&[(4, 98.0), (10, 40.0), (12, 32.0)])
        .map_err(|e| e.to_string())?;
    let fetched = [(4u64, 56.0), (10, 16.0), (12, 78.0), (20, 12.0)];
    let products: Vec<f64> = fetched
        .iter()
        .map(|&(c, a)| a * module.search_and_read(c))
        .collect();
    ensure(
        products == [56.0 * 98.0, 16.0 * 40.0, 78.0 * 32.0, 0.0],
        format!("singleton products {products:?}"),
    )?;
    ensure(module.energy().ram_reads == 3, "index 20 must miss without a RAM read")?;

    let a = CsrMatrix::from_parts(1, 21, vec![0, 4], vec![4, 10, 12, 20], vec![56.0, 16.0, 78.0, 12.0])
        .map_err(|e| e.to_string())?;
    let b = SparseVector::new(21, vec![(4, 98.0), (10, 40.0), (12, 32.0)]).map_err(|e| e.to_string())?;
    let (c, m) = spmspv(&a, &b, &AcceleratorConfig::with_geometry(4, 8)).map_err(|e| e.to_string())?;
    ensure(c.entries() == [(0, 8624.0)], format!("C = {:?}", c.entries()))?;
    ensure(m.inner_iterations == 1, "expected one inner iteration")?;
    Ok("products 5488, 640, 2496, 0; C_0 = 8624".into())
}

fn criterion_3_masked_compare() -> Outcome {
    let mut arr = CamRamArray::from_dump(2, 4, "0 0110 1\n1 0101 2\n").map_err(|e| e.to_string())?;
    let key = CompareKey::from_pattern("0110").ok_or("bad key")?;
    let hit = arr.compare_select(key).map_err(|e| e.to_string())?;
    ensure(hit == Some(0), format!("got {hit:?}"))?;
    Ok("key 0110 selects row 0 only".into())
}

/// Steps through the fetch stream one element at a time, issuing a cycle
/// whenever all `k` lanes are occupied or a row ends.
fn event_stepped_cycles(a: &CsrMatrix, nnz_b: usize, k: usize, h: usize, depth: u64) -> u64 {
    let mut cycles = depth;
    let mut remaining_b = nnz_b as i64;
    loop {
        for j in 0..a.n_rows() {
            let mut lanes = 0;
            for _ in a.row(j).0 {
                lanes += 1;
                if lanes == k {
                    cycles += 1;
                    lanes = 0;
                }
            }
            if lanes > 0 {
                cycles += 1;
            }
        }
        remaining_b -= h as i64;
        if remaining_b <= 0 {
            return cycles;
        }
    }
}

fn criterion_4_cycle_model() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..300 {
        let (a, b) = instance(&mut rng, ValueDist::SmallIntegers(5));
        let k = rng.random_range(1..=20);
        let h = rng.random_range(1..=64);
        let mut cfg = AcceleratorConfig::with_geometry(k, h);
        cfg.pipeline_depth = rng.random_range(1..=10);
        let (_, m) = spmspv(&a, &b, &cfg).map_err(|e| e.to_string())?;
        let passes = plan_tiles(b.nnz(), h) as u64;
        let formula: u64 = passes
            * (0..a.n_rows())
                .map(|j| a.row_nnz(j).div_ceil(k) as u64)
                .sum::<u64>();
        ensure(
            m.cycles - cfg.pipeline_depth == formula,
            format!("instance {i}: {} vs formula {formula}", m.cycles - cfg.pipeline_depth),
        )?;
        let stepped = event_stepped_cycles(&a, b.nnz(), k, h, cfg.pipeline_depth);
        ensure(m.cycles == stepped, format!("instance {i}: {} vs stepped {stepped}", m.cycles))?;
    }
    Ok("300 random instances, exact agreement".into())
}

fn criterion_5_dse() -> Outcome {
    let k = modules_from_bandwidth(250e9, 2e9, 32, 32).map_err(|e| e.to_string())?;
    ensure(k == 15, format!("k = {k}"))?;
    let p = peak_performance(15, 1 << 20, 2e9);
    ensure(p.flops_per_s == 6.0e10, format!("flops {}", p.flops_per_s))?;
    let rel = (p.index_ops_per_s - 3.0e16).abs() / 3.0e16;
    ensure(rel <= 0.05, format!("index ops {:e} off by {rel:.3}", p.index_ops_per_s))?;
    Ok(format!(
        "k = 15, 6.0e10 FLOP/s, {:.4e} index OP/s ({:.1}% from 3e16)",
        p.index_ops_per_s,
        rel * 100.0
    ))
}

fn criterion_6_area() -> Outcome {
    let mut cfg = AcceleratorConfig::with_geometry(15, 1 << 20);
    cfg.w = 32;
    let tech = TechParams::default();
    ensure(tech.feature_nm == 22.0, "default feature size must be 22 nm")?;
    let cmos = area_estimate(&cfg, &tech, MemoryStyle::Cmos);
    let res = area_estimate(&cfg, &tech, MemoryStyle::Resistive);
    let ratio = cmos / res;
    ensure((cmos - 90.0).abs() <= 0.2 * 90.0, format!("CMOS {cmos:.2} mm2"))?;
    ensure((res - 3.0).abs() <= 0.2 * 3.0, format!("resistive {res:.3} mm2"))?;
    ensure(ratio >= 25.0, format!("ratio {ratio:.1}"))?;
    Ok(format!("CMOS {cmos:.2} mm2, resistive {res:.3} mm2, ratio {ratio:.1}x"))
}

fn criterion_7_power() -> Outcome {
    let cfg = AcceleratorConfig::with_geometry(15, 512);
    let (a, b) = full_utilization_workload(15, 512, 4096);
    let (_, m) = spmspv(&a, &b, &cfg).map_err(|e| e.to_string())?;
    let util = m.utilization(cfg.k);
    ensure(util > 0.99, format!("utilization {util}"))?;
    let watts = power_estimate(&cfg, &m, m.seconds(cfg.clock_hz));
    let total = watts.total();
    let eff = m.flops_per_second(cfg.clock_hz) / total / 1e9;
    ensure(total <= 0.3, format!("total power {total:.4} W"))?;
    ensure(
        eff >= 10.0 * GPU_BASELINE_GFLOPS_PER_W,
        format!("{eff:.1} GFLOPs/W vs GPU baseline {GPU_BASELINE_GFLOPS_PER_W}"),
    )?;
    Ok(format!(
        "{total:.4} W at {:.1}% utilization, {eff:.1} GFLOPs/W ({:.0}x the {GPU_BASELINE_GFLOPS_PER_W} GFLOPs/W GPU baseline)",
        util * 100.0,
        eff / GPU_BASELINE_GFLOPS_PER_W
    ))
}

fn criterion_8_tiling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..100 {
        let n = rng.random_range(1..=200);
        let m = rng.random_range(1..=200);
        let a = gen_random_csr_with(n, m, 0.05, rng.random(), ValueDist::SmallIntegers(9));
        let b = gen_random_vector(m, rng.random_range(0.0..=0.5), rng.random(), ValueDist::SmallIntegers(9));
        let mut results = Vec::new();
        for h in [4, 16, 512] {
            let (c, met) = spmspv(&a, &b, &AcceleratorConfig::with_geometry(4, h)).map_err(|e| e.to_string())?;
            let expect = b.nnz().div_ceil(h).max(1) as u64;
            ensure(met.passes == expect, format!("instance {i}, h={h}: {} passes, expected {expect}", met.passes))?;
            results.push(c);
        }
        ensure(
            results.windows(2).all(|w| w[0] == w[1]),
            format!("instance {i}: results differ across h"),
        )?;
    }
    Ok("100 integer instances identical for h in {4, 16, 512}".into())
}

fn criterion_9_endurance() -> Outcome {
    let mut arr = CamRamArray::new(512, 32).map_err(|e| e.to_string())?;
    let entries: Vec<(u64, f64)> = (0..390).map(|i| (i * 3, i as f64 + 1.0)).collect();
    arr.load_segment(&entries).map_err(|e| e.to_string())?;
    for i in 0..1_000_000u64 {
        arr.search_and_read(i % 1500);
    }
    ensure(arr.max_write_count() == 1, format!("max write_count {}", arr.max_write_count()))?;

    let (a, b) = full_utilization_workload(15, 512, 2000);
    let mut acc = Accelerator::new(AcceleratorConfig::with_geometry(15, 512)).map_err(|e| e.to_string())?;
    let (_, m) = acc.spmspv(&a, &b).map_err(|e| e.to_string())?;
    ensure(acc.max_write_count() == 1, format!("accelerator max write_count {}", acc.max_write_count()))?;
    Ok(format!(
        "10^6 compares on one array and {} accelerator compares: max write_count = 1",
        m.fetched_elements
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 oracle equivalence", criterion_1_oracle_equivalence),
        ("2 singleton-product golden", criterion_2_worked_example),
        ("3 two-row compare golden", criterion_3_masked_compare),
        ("4 cycle model", criterion_4_cycle_model),
        ("5 design-space point", criterion_5_dse),
        ("6 area calibration", criterion_6_area),
        ("7 power calibration", criterion_7_power),
        ("8 tiling invariance", criterion_8_tiling),
        ("9 endurance", criterion_9_endurance),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why}");
            }
        }
    }
    println!("{} of 9 acceptance criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
