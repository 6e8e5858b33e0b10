#![no_main]
use libfuzzer_sys::fuzz_target;
use nlac_harness::{ExperimentConfig, ExperimentKind};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        for kind in ExperimentKind::ALL {
            if let Ok(config) = ExperimentConfig::from_text(kind, text) {
                let again = ExperimentConfig::from_text(kind, &config.to_text()).unwrap();
                assert_eq!(again, config);
            }
        }
    }
});
