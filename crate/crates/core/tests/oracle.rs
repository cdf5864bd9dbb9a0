mod common;

use common::Gen;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tailor::pipeline::{compile_text, Options};
use tailor::satenc::AmoScheme;

const SCHEMES: [AmoScheme; 4] = [AmoScheme::Product, AmoScheme::Commander, AmoScheme::Ladder, AmoScheme::Tree];

fn pipeline_count(src: &str, opt: u8, amo: AmoScheme) -> Result<u64, String> {
    let mut o = Options::preset(opt, 0);
    o.sat.amo = amo;
    let c = compile_text(src, None, &o).map_err(|e| e.to_string())?;
    let mut s = c.session(0);
    s.enumerate(None, &mut |_| Ok(())).map_err(|e| e.to_string())
}

#[test]
fn random_instances_match_brute_force() {
    let n: u64 = std::env::var("ORACLE_N").ok().and_then(|s| s.parse().ok()).unwrap_or(200);
    let mut failures = Vec::new();
    for seed in 1000..1000 + n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = Gen::instance(&mut rng, false);
        let src = inst.to_eprime();
        let want = inst.count();
        for opt in 0..=3 {
            let amo = SCHEMES[(seed as usize + opt as usize) % SCHEMES.len()];
            let got = pipeline_count(&src, opt, amo);
            if got != Ok(want) {
                failures.push(format!("seed {seed} -O{opt} {amo:?}: got {got:?}, want {want}\n{src}"));
                break;
            }
        }
    }
    for f in failures.iter().take(5) {
        eprintln!("{f}");
    }
    assert!(failures.is_empty(), "{} failures", failures.len());
}
