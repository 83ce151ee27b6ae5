//! Multi-threaded path ensembles.

use rayon::prelude::*;
use ssd_core::ou::{Runner, Simulator};

/// Paths per task. Results do not depend on it or on the thread count.
const BLOCK: u64 = 2048;

/// Runs blocks of paths on the rayon pool and concatenates them in path order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Parallel;

impl Runner for Parallel {
    fn run(&self, sim: &Simulator, seed: u64, n: u64, record: &[usize]) -> Vec<Vec<f64>> {
        let blocks: Vec<Vec<Vec<f64>>> = (0..n.div_ceil(BLOCK))
            .into_par_iter()
            .map(|b| {
                let lo = b * BLOCK;
                let hi = (lo + BLOCK).min(n);
                let mut out: Vec<Vec<f64>> =
                    record.iter().map(|_| Vec::with_capacity((hi - lo) as usize * sim.dim())).collect();
                sim.run_range(seed, lo..hi, record, &mut out);
                out
            })
            .collect();
        let mut out: Vec<Vec<f64>> = record.iter().map(|_| Vec::with_capacity(n as usize * sim.dim())).collect();
        for blk in blocks {
            for (o, v) in out.iter_mut().zip(blk) {
                o.extend_from_slice(&v);
            }
        }
        out
    }
}

/// Size the global pool from `SSD_THREADS` when set. Call before any parallel work.
pub fn init_threads() {
    if let Some(n) = std::env::var("SSD_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ssd_core::idist::{LevyTriplet, SamplerConfig};
    use ssd_core::ou::{InitSpec, OUConfig, Sequential};

    #[test]
    fn matches_sequential() {
        let cfg = OUConfig::new(2.0, 1.0, 0.0, 10.0).unwrap();
        let sim = Simulator::new(&LevyTriplet::gaussian(vec![1.0]), &cfg, &InitSpec::Zero, 0, &[], &SamplerConfig::default())
            .unwrap();
        let a = Parallel.run(&sim, 4, 5000, &[1, 7]);
        let b = Sequential.run(&sim, 4, 5000, &[1, 7]);
        assert_eq!(a, b);
    }
}
