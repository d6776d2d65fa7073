//! Shipped run configurations and their scaled-down variants.

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    Fig1b,
    Fig2,
    Fig3,
}

pub fn preset_text(preset: Preset, quick: bool) -> &'static str {
    match (preset, quick) {
        (Preset::Fig1b, false) => include_str!("../presets/fig1b.json"),
        (Preset::Fig2, false) => include_str!("../presets/fig2.json"),
        (Preset::Fig3, false) => include_str!("../presets/fig3.json"),
        (Preset::Fig1b, true) => include_str!("../presets/ci/fig1b.json"),
        (Preset::Fig2, true) => include_str!("../presets/ci/fig2.json"),
        (Preset::Fig3, true) => include_str!("../presets/ci/fig3.json"),
    }
}
