//! Writes the benchmark instances as JSON problem files, ready for
//! `sldp solve --problem <file>`.
//!
//! `cargo run --example export_problems -- <dir>` (default `problems`).

use std::path::PathBuf;

use sldp::bench::{
    caroe_sldp_config, control_sldp_config, gen_caroe_schultz, gen_control1d, CaroeSchultzSpec, ControlProblemSpec,
};
use sldp::cuts::CutFamily;
use sldp::io::ProblemFile;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "problems".into()));
    std::fs::create_dir_all(&dir)?;
    for n in [2, 3, 6] {
        for discrete in [true, false] {
            let model = gen_caroe_schultz(&CaroeSchultzSpec {
                n,
                discrete_first_stage: discrete,
            });
            let mut file = ProblemFile::from_model(&model, Some(caroe_sldp_config(CutFamily::StrengthenedAugBenders, 200)));
            let tag = if discrete { "int" } else { "cont" };
            file.name = Some(format!("caroe_n{n}_{tag}"));
            let path = dir.join(format!("caroe_n{n}_{tag}.json"));
            std::fs::write(&path, file.to_json() + "\n")?;
            println!("wrote {}", path.display());
        }
    }
    for horizon in [3, 8] {
        let model = gen_control1d(&ControlProblemSpec {
            horizon,
            ..ControlProblemSpec::default()
        })?;
        let mut file = ProblemFile::from_model(
            &model,
            Some(control_sldp_config(CutFamily::ReverseNorm, 100, 200, 0)),
        );
        file.name = Some(format!("control_t{horizon}"));
        let path = dir.join(format!("control_t{horizon}.json"));
        std::fs::write(&path, file.to_json() + "\n")?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
