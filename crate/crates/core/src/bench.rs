//! Scaling workload: `mods` copies of a small list module, each published
//! in `vers` identical versions, all imported by one entry module.

use std::fmt;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::driver::{Compilation, DriverError};
use crate::surface::{parse_module, Repository, SurfaceError, SurfaceModule};
use crate::version::Version;

pub const CSV_HEADER: &str = "mods,vers,reps,mean_ms,stddev_ms";

fn list_module(i: usize) -> String {
    let m = format!("List_{i}");
    format!(
        "module {m} where

concat_{m} xs ys = xs ++ ys

map_{m} f xs = map f xs

filter_{m} p xs = filter p xs

sum_{m} xs = sum xs

length_{m} xs = length xs

reverse_{m} xs = reverse xs

sortDesc_{m} xs = reverse_{m} (sort xs)

maximum_{m} xs = head (sortDesc_{m} xs)

minimum_{m} xs = head (sort xs)

product_{m} xs = foldl (\\acc x -> acc * x) 1 xs

positives_{m} xs = filter_{m} (\\x -> x > 0) xs

scale_{m} k xs = map_{m} (\\x -> x * k) xs

dot_{m} xs ys = sum_{m} (map_{m} (\\p -> case p of {{ (a, b) -> a * b }}) (zip_{m} xs ys))

zip_{m} xs ys = case xs of {{ [] -> []; (x : _) -> case ys of {{ [] -> []; (y : _) -> [(x, y)] }} }}

range_{m} xs = maximum_{m} xs - minimum_{m} xs
"
    )
}

fn main_module(mods: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = String::from("module Main where\n");
    for i in 1..=mods {
        s.push_str(&format!("import List_{i}\n"));
    }
    let mut xs: Vec<i64> = (1..=5).collect();
    xs.shuffle(&mut rng);
    let xs = xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    let terms: Vec<String> = (1..=mods)
        .map(|i| {
            let m = format!("List_{i}");
            format!(
                "sum_{m} (concat_{m} (sortDesc_{m} xs) (map_{m} (\\x -> x + {i}) xs)) + length_{m} (reverse_{m} xs) + maximum_{m} xs + product_{m} (positives_{m} xs) + dot_{m} xs (scale_{m} {i} xs) + range_{m} xs"
            )
        })
        .collect();
    s.push_str(&format!("\nmain = let xs = [{xs}] in\n  {}\n", terms.join(" +\n  ")));
    s
}

/// Repository and entry module for one configuration.
pub fn workload(mods: usize, vers: usize, seed: u64) -> Result<(Repository, SurfaceModule), SurfaceError> {
    let mut all = Vec::new();
    for i in 1..=mods {
        let src = list_module(i);
        for v in 1..=vers {
            let mut m = parse_module(&src)?;
            m.version = Some(Version::new(v as u64, 0, 0));
            all.push(m);
        }
    }
    let repo = Repository::from_modules(all)?;
    Ok((repo, parse_module(&main_module(mods, seed))?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub mods: usize,
    pub vers: usize,
    pub reps: usize,
    pub mean_ms: f64,
    pub stddev_ms: f64,
}

impl fmt::Display for BenchRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{:.3},{:.3}", self.mods, self.vers, self.reps, self.mean_ms, self.stddev_ms)
    }
}

/// Compiles the workload once, then times `reps` solves of `main`.
pub fn run_config(mods: usize, vers: usize, reps: usize, seed: u64) -> Result<BenchRow, DriverError> {
    let (repo, entry) = workload(mods, vers, seed)?;
    let comp = Compilation::new(&repo, &entry)?;
    comp.solve_def("main")?;
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        comp.solve_def("main")?;
        times.push(start.elapsed().as_secs_f64() * 1e3);
    }
    let n = times.len().max(1) as f64;
    let mean = times.iter().sum::<f64>() / n;
    let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n;
    Ok(BenchRow { mods, vers, reps, mean_ms: mean, stddev_ms: var.sqrt() })
}

/// One row per (m, v) with 1 ≤ m ≤ mods and 1 ≤ v ≤ vers.
pub fn run_grid(mods: usize, vers: usize, reps: usize, seed: u64) -> Result<Vec<BenchRow>, DriverError> {
    let mut rows = Vec::new();
    for m in 1..=mods {
        for v in 1..=vers {
            rows.push(run_config(m, v, reps, seed)?);
        }
    }
    Ok(rows)
}
