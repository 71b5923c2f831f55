//! Regenerates `assets/filters/db{1..4}.txt` from the internal Daubechies filters.
//!
//! cargo run -p gensamp --example gen_filters -- [out_dir]

use gensamp::wavelet::assets;

// Extremal-phase Daubechies lowpass filters, h_n for n = 1-a ..= a, to 20 digits.
const FILTERS: [&[&str]; 4] = [
    &["0.7071067811865475244", "0.7071067811865475244"],
    &["0.48296291314453414337", "0.83651630373780790558", "0.22414386804201338103", "-0.12940952255126038117"],
    &[
        "0.332670552950082616", "0.80689150931109257649", "0.4598775021184915701",
        "-0.1350110200102545887", "-0.085441273882026661693", "0.035226291885709536603",
    ],
    &[
        "0.23037781330889650086", "0.71484657055291564709", "0.63088076792985890788",
        "-0.027983769416859854211", "-0.18703481171909308408", "0.030841381835560763627",
        "0.032883011666885199735", "-0.010597401785069032105",
    ],
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/assets/filters").to_string());
    for (i, f) in FILTERS.iter().enumerate() {
        let h: Vec<f64> = f.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
        let text = assets::render(&h)?;
        let path = format!("{out}/db{}.txt", i + 1);
        std::fs::write(&path, text)?;
        println!("wrote {path}");
    }
    Ok(())
}
