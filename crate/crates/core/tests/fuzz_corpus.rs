//! Replays the checked-in fuzz seeds through the same checks as the fuzz
//! targets, so the corpus stays meaningful on a stable toolchain.

use std::fs;
use std::path::PathBuf;

use nilgeom::decomposition::witt_decompose;
use nilgeom::scalar::parse_rational;
use nilgeom::{bundled, curvature, io};

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|f| f.unwrap().path())
        .collect();
    paths.sort();
    assert!(!paths.is_empty(), "no seeds for {target}");
    paths.iter().map(|p| String::from_utf8_lossy(&fs::read(p).unwrap()).into_owned()).collect()
}

/// Runs `check` on every seed and returns how many parsed.
fn replay(target: &str, mut check: impl FnMut(&str) -> bool) -> usize {
    seeds(target).iter().filter(|text| check(text)).count()
}

#[test]
fn rational_seeds() {
    let ok = replay("parse_rational", |s| match parse_rational(s) {
        Ok(r) => {
            assert_eq!(parse_rational(&io::scalar_string(&r)).unwrap(), r);
            true
        }
        Err(_) => false,
    });
    assert!(ok >= 5);
}

#[test]
fn algebra_seeds() {
    let ok = replay("parse_algebra", |s| match io::parse_algebra(s) {
        Ok(alg) => {
            assert_eq!(io::parse_algebra(&io::algebra_to_json(&alg)).unwrap(), alg);
            true
        }
        Err(_) => false,
    });
    assert!(ok >= 5);
}

#[test]
fn pipeline_seeds() {
    let ok = replay("algebra_pipeline", |s| {
        let Ok(alg) = io::parse_algebra(s) else { return false };
        if alg.dim() > 8 || !alg.validate().is_valid() {
            return false;
        }
        let frame = witt_decompose(&alg).unwrap();
        frame.check(&alg, 0.0).unwrap();
        let _ = curvature::is_flat(&alg, 0.0);
        true
    });
    assert!(ok >= 5);
}

#[test]
fn frame_seeds() {
    let alg = bundled::lookup("quaternionic7(1,-1,1)").unwrap();
    let ok = replay("parse_frame", |s| match io::parse_frame(s, &alg) {
        Ok(frame) => {
            io::parse_frame(&io::frame_to_json(&frame), &alg).unwrap();
            true
        }
        Err(_) => false,
    });
    assert_eq!(ok, 1);
}

#[test]
fn ivp_seeds() {
    let alg = bundled::lookup("quaternionic7").unwrap();
    let frame = witt_decompose(&alg).unwrap().to_float();
    let ok = replay("parse_ivp", |s| match io::parse_ivp(s, &frame) {
        Ok(file) => {
            let text = io::ivp_to_value(&file.ivp, file.times.as_deref()).to_string();
            assert_eq!(io::parse_ivp(&text, &frame).unwrap(), file);
            true
        }
        Err(_) => false,
    });
    assert_eq!(ok, 3);
}

#[test]
fn lattice_seeds() {
    let mut ok = 0;
    for name in ["heisenberg3", "flat-u-group"] {
        let alg = bundled::lookup(name).unwrap();
        ok += replay("parse_lattice", |s| match io::parse_lattice(s, &alg) {
            Ok((_, lattice)) => {
                io::parse_lattice(&io::lattice_to_json(&lattice), &alg).unwrap();
                true
            }
            Err(_) => false,
        });
    }
    assert_eq!(ok, 3);
}

#[test]
fn record_seeds() {
    let ok = replay("parse_records", |s| match io::parse_records(s) {
        Ok(records) => {
            assert_eq!(io::parse_records(&io::records_to_json(&records)).unwrap(), records);
            true
        }
        Err(_) => false,
    });
    assert_eq!(ok, 2);
}

mod mutations {
    use super::*;
    use proptest::prelude::*;

    fn mutate(seed: &str, edits: &[(usize, u8)]) -> String {
        let mut bytes = seed.as_bytes().to_vec();
        for &(pos, b) in edits {
            if bytes.is_empty() {
                bytes.push(b);
            } else {
                let i = pos % bytes.len();
                match b % 3 {
                    0 => bytes[i] = b" 0123456789-./eE[]{},\":"[b as usize % 23],
                    1 => {
                        bytes.remove(i);
                    }
                    _ => bytes.insert(i, b"019-/.,[]\""[b as usize % 10]),
                }
            }
        }
        String::from_utf8_lossy(&bytes).into_owned()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(std::env::var("PROPTEST_CASES").ok().and_then(|v| v.parse().ok()).unwrap_or(64)))]

        #[test]
        fn mutated_seeds_never_panic(which in 0usize..64, edits in prop::collection::vec((any::<usize>(), any::<u8>()), 1..6)) {
            let q7 = bundled::lookup("quaternionic7").unwrap();
            let q7f = witt_decompose(&q7).unwrap().to_float();
            let h = bundled::lookup("heisenberg3").unwrap();
            let targets = ["parse_rational", "parse_algebra", "parse_frame", "parse_ivp", "parse_lattice", "parse_records"];
            let target = targets[which % targets.len()];
            let all = seeds(target);
            let text = mutate(&all[which % all.len()], &edits);
            match target {
                "parse_rational" => { let _ = parse_rational(&text); }
                "parse_algebra" => {
                    if let Ok(alg) = io::parse_algebra(&text) {
                        prop_assert_eq!(io::parse_algebra(&io::algebra_to_json(&alg)).unwrap(), alg);
                    }
                }
                "parse_frame" => { let _ = io::parse_frame(&text, &q7); }
                "parse_ivp" => { let _ = io::parse_ivp(&text, &q7f); }
                "parse_lattice" => { let _ = io::parse_lattice(&text, &h); }
                _ => { let _ = io::parse_records(&text); }
            }
        }
    }
}
