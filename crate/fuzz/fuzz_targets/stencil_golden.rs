#![no_main]
use libfuzzer_sys::fuzz_target;
use nlac_core::Stencil;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(stencil) = Stencil::from_golden(&text) {
        let back = Stencil::from_golden(&stencil.to_golden()).unwrap();
        assert_eq!(back.coeffs(), stencil.coeffs());
    }
});
