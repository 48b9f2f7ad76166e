//! Round trip through the file formats: write a path as text and binary,
//! read it back, estimate, and write a JSON report with its manifest.

use hurstlab::io::{
    read_report, read_signal, write_report, write_signal, Envelope, Payload, ReportFormat,
    RunManifest, SampleEncoding, SignalFormat,
};
use hurstlab::prelude::*;

fn main() -> hurstlab::Result<()> {
    let dir = tempfile::tempdir()?;
    let path = generate_fbm(&FgnSpec::new(0.35, 4096, 1.0, 5)?)?;
    let txt = dir.path().join("path.txt");
    let bin = dir.path().join("path.bin");
    write_signal(&txt, &path, SampleEncoding::Text)?;
    write_signal(&bin, &path, SampleEncoding::Bin)?;

    let a = read_signal(&txt, SignalFormat::Auto, None)?;
    let b = read_signal(&bin, SignalFormat::Auto, None)?;
    assert_eq!(a.samples(), b.samples());

    let d = ndwt(&a, &WaveletFilter::haar(), 11)?;
    let range = LevelRange::default_for(d.j_max())?;
    let estimates = Method::ALL
        .iter()
        .map(|&m| estimate_hurst(&d, m, range, Some(0)))
        .collect::<hurstlab::Result<Vec<_>>>()?;

    let mut manifest = RunManifest::new(
        &["ingest_and_report".into()],
        serde_json::json!({"levels": range}),
    );
    manifest.add_input(&txt, &a);
    manifest.finish(0.0);
    let out = dir.path().join("estimates.json");
    write_report(
        Payload::Estimates(&estimates),
        &out,
        ReportFormat::Json,
        Some(&manifest),
    )?;

    let back: Envelope<Vec<hurstlab::estimators::HurstEstimate>> = read_report(&out)?;
    assert_eq!(back.payload, estimates);
    println!("{}", back.level_convention);
    for e in &back.payload {
        println!("{:<12} {:.4}", e.method.label(), e.hurst);
    }
    println!("input digest {}", back.manifest.unwrap().inputs[0].digest);
    Ok(())
}
