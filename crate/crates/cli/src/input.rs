use curvagraph::{generate, parse_map, CombinatorialMap, GeneratorKind, GeneratorSpec};

use crate::RunConfig;

pub struct Input {
    pub map: CombinatorialMap,
    pub horizon: usize,
    pub label: String,
}

pub fn load(config: &RunConfig) -> Result<Input, String> {
    let (map, default_horizon, label) = match (&config.file, &config.gen) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            let map = parse_map(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            (map, 3, name)
        }
        (None, Some(spec)) => {
            let kind: GeneratorKind = spec.parse().map_err(|e| format!("--gen {spec}: {e}"))?;
            let map = generate(&GeneratorSpec::new(kind.clone(), config.radius)).map_err(|e| e.to_string())?;
            (map, config.radius.saturating_sub(1).max(1), format!("{kind} radius {}", config.radius))
        }
        _ => return Err("exactly one of --file or --gen is required".into()),
    };
    if config.root >= map.num_vertices() {
        return Err(format!("root {} is not a vertex (map has {} vertices)", config.root, map.num_vertices()));
    }
    Ok(Input { map, horizon: config.horizon.unwrap_or(default_horizon), label })
}
