//! The shipped example configs stay parseable and schema-valid.

use std::path::PathBuf;

use prodcf::rates::{ChannelSpec, EstimatorMode};

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RatesProbe {
    constellation: serde_json::Value,
    channel: ChannelSpec,
    snr_grid_db: Vec<f64>,
    modes: Vec<EstimatorMode>,
    n_samples: usize,
}

#[derive(serde::Deserialize)]
struct DemoProbe {
    primes: Vec<u64>,
    codes: Vec<serde_json::Value>,
    channel: Vec<i64>,
    messages: Vec<serde_json::Value>,
}

#[test]
fn shipped_configs_parse() {
    let dir = configs_dir();
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        let text = std::fs::read_to_string(&path).unwrap();
        if name.starts_with("constellation_") {
            // full run: builds the map and writes the dump
            let out_dir =
                std::env::temp_dir().join(format!("prodcf-cfg-{}-{}", std::process::id(), seen));
            let out = std::process::Command::new(env!("CARGO_BIN_EXE_prodcf"))
                .args(["constellation", "--config", path.to_str().unwrap()])
                .arg("--out-dir")
                .arg(&out_dir)
                .output()
                .unwrap();
            assert_eq!(out.status.code(), Some(0), "{name}");
            let _ = std::fs::remove_dir_all(&out_dir);
        } else if name.starts_with("rates_") {
            let p: RatesProbe =
                serde_json::from_str(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(!p.snr_grid_db.is_empty() && !p.modes.is_empty(), "{name}");
            assert!(p.n_samples > 0 && p.constellation.is_object(), "{name}");
            match p.channel {
                ChannelSpec::Fixed(ref list) => assert!(!list.is_empty(), "{name}"),
                ChannelSpec::Rayleigh { count } => assert!(count > 0, "{name}"),
            }
        } else {
            let p: DemoProbe =
                serde_json::from_str(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(p.primes.len(), p.codes.len(), "{name}");
            assert_eq!(p.channel.len(), p.messages.len(), "{name}");
        }
        seen += 1;
    }
    assert!(seen >= 6, "expected the example configs to be present");
}
