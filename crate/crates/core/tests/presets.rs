use std::path::PathBuf;

use nema_core::experiment::{ExperimentConfig, PRESETS};

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn shipped_config_files_match_the_presets() {
    for name in PRESETS {
        let path = configs_dir().join(format!("{name}.toml"));
        let loaded = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(loaded, ExperimentConfig::preset(name).unwrap(), "{name}");
        assert_eq!(ExperimentConfig::resolve(path.to_str().unwrap()).unwrap(), loaded);
    }
}

#[test]
fn desk_presets_shrink_only_the_budgets() {
    for kind in ["biophysical_realism", "architecture_statistics", "limitations"] {
        let mut desk = ExperimentConfig::preset(&format!("desk_{kind}")).unwrap();
        let full = ExperimentConfig::preset(&format!("full_{kind}")).unwrap();
        assert_eq!(desk.experiment.arms, full.experiment.arms);
        assert_eq!(desk.experiment.kind, full.experiment.kind);
        assert_eq!((desk.ga.population_size, desk.ga.elite_size, desk.ga.generations), (50, 4, 100));
        assert_eq!(desk.ga.mutation_rate_connectome, full.ga.mutation_rate_connectome);
        assert_eq!(desk.ga.mutation_rate_enc_dec, full.ga.mutation_rate_enc_dec);
        let (de, pe) = (desk.es.unwrap(), full.es.unwrap());
        assert_eq!((de.population_size, de.epochs), (40, 100));
        assert_eq!((pe.population_size, pe.epochs), (200, 1000));
        assert_eq!(desk.alif, full.alif);
        assert_eq!(desk.izhikevich, full.izhikevich);
        desk.mnist.data_dir = configs_dir().join("../data/mnist");
        desk.validate().unwrap_or_else(|e| panic!("desk_{kind}: {e}"));
    }
}
