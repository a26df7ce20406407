//! Figure presets shipped as JSON data files.

use crate::config::Command;

pub const PRESETS: [(&str, &str); 23] = [
    ("fig2a", include_str!("../presets/fig2a.json")),
    ("fig3b", include_str!("../presets/fig3b.json")),
    ("spectrum", include_str!("../presets/spectrum.json")),
    ("selfenergy", include_str!("../presets/selfenergy.json")),
    ("validate", include_str!("../presets/validate.json")),
    ("fig2b", include_str!("../presets/fig2b.json")),
    ("fig2c", include_str!("../presets/fig2c.json")),
    ("fig3a", include_str!("../presets/fig3a.json")),
    ("fig3c", include_str!("../presets/fig3c.json")),
    ("fig4c", include_str!("../presets/fig4c.json")),
    ("fig4d", include_str!("../presets/fig4d.json")),
    ("fig4d-inset", include_str!("../presets/fig4d-inset.json")),
    ("fig6", include_str!("../presets/fig6.json")),
    ("fig7a", include_str!("../presets/fig7a.json")),
    ("fig7b", include_str!("../presets/fig7b.json")),
    ("fig9", include_str!("../presets/fig9.json")),
    ("fig10a", include_str!("../presets/fig10a.json")),
    ("fig10b", include_str!("../presets/fig10b.json")),
    ("fig11", include_str!("../presets/fig11.json")),
    ("fig12", include_str!("../presets/fig12.json")),
    ("fig13", include_str!("../presets/fig13.json")),
    ("fig14", include_str!("../presets/fig14.json")),
    ("fig15", include_str!("../presets/fig15.json")),
];

pub fn get(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn default_for(command: Command) -> &'static str {
    match command {
        Command::Phase => "fig2a",
        Command::Spectrum => "spectrum",
        Command::Selfenergy => "selfenergy",
        Command::Bs => "fig9",
        Command::Dynamics => "fig2b",
        Command::Interaction => "fig12",
        Command::G2 => "fig4d",
        Command::Validate => "validate",
    }
}

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}
