//! Figure-reproduction presets, stored as ordinary config text.

pub const NAMES: [&str; 9] = ["fig3", "fig4", "fig5", "fig6", "fig8", "fig9", "fig10", "fig11", "fig12"];

pub fn text(name: &str) -> Option<&'static str> {
    Some(match name {
        // classical regime: quantum and Rabi-formula curves against L
        "fig3" => {
            r#"
[params]
h_e = 1000
h_int = 1
delta = -0.2
[sweep]
var = "L"
min = 0
max = 1100
count = 2201
classical = true
"#
        }
        // resonance spikes against L for h_E = 1
        "fig4" => {
            r#"
[params]
h_e = 1
h_int = 100
[sweep]
var = "L"
min = 0
max = 20
count = 4001
deltas = [-1, 0, 1]
[peaks]
min_height = 0.05
min_prominence = 0.05
"#
        }
        // energy sweep through the negative-energy resonances; the density
        // subcommand uses the resonance point itself
        "fig5" => {
            r#"
[params]
h_e = -1.90991
h_int = 10
delta = -1
l = 10
[sweep]
var = "h_E"
min = -3
max = 0
count = 3001
classical = true
overlap_check = true
[density]
points = 1001
margin = 10
"#
        }
        // peak positions for detunings 0 and +-0.5 in a long cavity
        "fig6" => {
            r#"
[params]
h_int = 10
l = 40
[sweep]
var = "h_E"
min = -4
max = 2
count = 6001
deltas = [-0.5, 0, 0.5]
"#
        }
        // resonance amplitude against detuning, measured and closed form
        "fig8" => {
            r#"
[params]
h_int = 100
[amplitude]
var = "delta"
min = -4
max = 4
count = 33
series = [3, 1]
"#
        }
        // resonance amplitude against energy for detunings +-2
        "fig9" => {
            r#"
[params]
h_int = 100
[amplitude]
var = "h_E"
min = 0
max = 8
count = 33
series = [-2, 2]
"#
        }
        // saturation with cavity length for h_E = -1
        "fig10" => {
            r#"
[params]
h_e = -1
h_int = 10
[sweep]
var = "L"
min = 0
max = 30
count = 3001
deltas = [-1, 0, 1]
"#
        }
        // narrow line against detuning in a long cavity
        "fig11" => {
            r#"
[params]
h_e = -2.5
h_int = 100
l = 200
[sweep]
var = "delta"
min = -0.05
max = 0.05
count = 2001
adaptive = true
[peaks]
min_height = 0.01
min_prominence = 0.01
"#
        }
        // sine mode: energy sweep, families shifted by the detuning
        "fig12" => {
            r#"
[params]
h_int = 10
l = 10
[mode]
kind = "sine"
[sweep]
var = "h_E"
min = -4
max = 4
count = 801
deltas = [-2, 0, 2]
"#
        }
        _ => return None,
    })
}
